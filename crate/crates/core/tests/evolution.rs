mod common;

use std::f64::consts::PI;

use nhsta::evolution::{
    adiabatic_frame, criterion_eta, propagate, EvolutionConfig, HamiltonianKind, InitialState,
    StateVector,
};
use nhsta::linalg::{self, Vector2};
use nhsta::model::{eigensystem_h0, phase_at, CdMode, ChartPoint};
use nhsta::trajectory::{CustomPath, TrajectorySpec};
use nhsta::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn static_at(x: f64, y: f64, duration: f64) -> TrajectorySpec<f64> {
    let t = vec![0.0, 0.5 * duration, duration];
    TrajectorySpec::custom(CustomPath::new(t, vec![x; 3], vec![y; 3]).unwrap())
}

fn shortcut(r: f64, omega: f64, init: InitialState<f64>) -> EvolutionConfig<f64> {
    EvolutionConfig::new(TrajectorySpec::modified(r, omega, PI), HamiltonianKind::Hm)
        .with_cd_mode(CdMode::Real)
        .with_initial(init)
}

fn conventional(r: f64, omega: f64) -> EvolutionConfig<f64> {
    EvolutionConfig::new(TrajectorySpec::original(r, omega, PI), HamiltonianKind::H0)
}

fn acceptance_configs() -> Vec<EvolutionConfig<f64>> {
    let mut v = Vec::new();
    for (r, w) in [(0.5, PI / 10.0), (1.5, PI)] {
        for init in [InitialState::Minus, InitialState::Plus] {
            v.push(shortcut(r, w, init));
        }
    }
    for (r, w) in [(0.5, PI / 100.0), (0.5, PI / 10.0), (1.5, PI)] {
        v.push(conventional(r, w));
    }
    v
}

#[test]
fn vanishing_generator_leaves_state_unchanged() {
    let init = [c(0.3, -0.1), c(0.5, 0.8)];
    let cfg = EvolutionConfig::new(static_at(1.0, 0.0, 5.0), HamiltonianKind::H0)
        .with_initial(InitialState::Custom(init))
        .with_samples(50);
    let series = propagate(&cfg).unwrap();
    assert_eq!(series.final_state.amplitudes, init);
    assert!(series
        .state_norm
        .iter()
        .all(|n| (n - linalg::norm(&init)).abs() == 0.0));
    assert!(series.eta.iter().all(|e| e.is_nan()));
}

#[test]
fn constant_generator_matches_exponential() {
    for (x, y) in [(0.3, 1.2), (-1.1, 0.4), (0.7, -2.0)] {
        let init: Vector2<f64> = [c(0.6, 0.1), c(-0.2, 0.7)];
        let cfg = EvolutionConfig::new(static_at(x, y, 1.0), HamiltonianKind::H0)
            .with_initial(InitialState::Custom(init));
        let got = propagate(&cfg).unwrap().final_state.amplitudes;
        let h = cfg.hamiltonian_at(0.3).unwrap();
        let want = common::expm_by_eigenbasis(&h, 1.0).apply(&init);
        let err = (got[0] - want[0]).norm().max((got[1] - want[1]).norm());
        assert!(err < 1e-9, "({x}, {y}): {err:e}");
        let want2 = h.propagator(1.0).apply(&init);
        assert!((want[0] - want2[0]).norm() < 1e-12);
    }
}

#[test]
fn series_invariants() {
    let series = propagate(&conventional(0.5, PI / 10.0)).unwrap();
    let n = series.len();
    assert_eq!(n, 2002);
    for v in [
        &series.f_minus,
        &series.f_plus,
        &series.raw_minus,
        &series.raw_plus,
        &series.state_norm,
        &series.eta,
    ] {
        assert_eq!(v.len(), n);
    }
    assert_eq!(series.times[0], 0.0);
    assert_eq!(series.times[n - 1], 20.0);
    assert!(series.times.windows(2).all(|w| w[1] > w[0]));
    for i in 0..n {
        assert!((series.f_minus[i] + series.f_plus[i] - 1.0).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&series.f_plus[i]));
    }
    assert!((series.f_minus[0] - 1.0).abs() < 1e-15);
}

#[test]
fn shortcut_transfers_and_conventional_fails() {
    let (_, fp) = propagate(&shortcut(0.5, PI / 10.0, InitialState::Minus))
        .unwrap()
        .terminal();
    assert!(fp >= 0.999, "{fp}");
    let (_, fp) = propagate(&conventional(0.5, PI / 10.0)).unwrap().terminal();
    assert!(fp < 0.9, "{fp}");
}

#[test]
fn swapping_initial_state_swaps_roles() {
    for (r, w) in [(0.5, PI / 10.0), (1.5, PI)] {
        let (m1, p1) = propagate(&shortcut(r, w, InitialState::Minus))
            .unwrap()
            .terminal();
        let (m2, p2) = propagate(&shortcut(r, w, InitialState::Plus))
            .unwrap()
            .terminal();
        assert!((m1 - p2).abs() < 1e-6 && (p1 - m2).abs() < 1e-6);
    }
}

#[test]
fn halving_tolerance_changes_little() {
    for cfg in acceptance_configs() {
        let a = propagate(&cfg).unwrap().terminal().1;
        let tight = cfg.clone().with_tolerances(cfg.rel_tol / 2.0, cfg.abs_tol);
        let b = propagate(&tight).unwrap().terminal().1;
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }
}

#[test]
fn two_periods_return() {
    for (r, w) in [(0.5, PI / 10.0), (1.5, PI)] {
        for init in [InitialState::Minus, InitialState::Plus] {
            let (fm, fp) = propagate(&shortcut(r, w, init).with_periods(2.0))
                .unwrap()
                .terminal();
            let back = if init == InitialState::Minus { fm } else { fp };
            assert!(back >= 0.999, "{back}");
        }
    }
}

#[test]
fn adaptive_matches_piecewise_exponential_on_full_coupling() {
    let cfg = EvolutionConfig::new(TrajectorySpec::original(1.5, PI, PI), HamiltonianKind::Hm)
        .with_cd_mode(CdMode::Full);
    let (fm, fp) = propagate(&cfg).unwrap().terminal();
    let (om, op) = common::piecewise_fidelities(&cfg, 50_000);
    assert!((fm - om).abs() < 1e-6 && (fp - op).abs() < 1e-6);
}

#[test]
fn adiabatic_frame_coefficients() {
    let p = ChartPoint::new(0.4, 1.7).unwrap();
    let b = eigensystem_h0(p).unwrap();
    let at = |v: Vector2<f64>| {
        adiabatic_frame(
            &StateVector {
                amplitudes: v,
                t: 0.0,
            },
            p,
        )
        .unwrap()
    };
    let a = at(b.right_minus);
    assert!(a.plus.norm() < 1e-14 && (a.minus - c(1.0, 0.0)).norm() < 1e-14);
    let sum = [
        b.right_plus[0] + b.right_minus[0],
        b.right_plus[1] + b.right_minus[1],
    ];
    let a = at(sum);
    assert!((a.plus - c(1.0, 0.0)).norm() < 1e-14 && (a.minus - c(1.0, 0.0)).norm() < 1e-14);

    let mut rng = common::rng(3);
    for p in common::random_points(500, 11) {
        let psi = [
            common::random_complex(&mut rng),
            common::random_complex(&mut rng),
        ];
        let a = adiabatic_frame(
            &StateVector {
                amplitudes: psi,
                t: 0.0,
            },
            p,
        )
        .unwrap();
        let proj = eigensystem_h0(p).unwrap().project(&psi);
        assert!((a.plus - proj.plus).norm() < 1e-12 && (a.minus - proj.minus).norm() < 1e-12);
    }
}

#[test]
fn adiabaticity_measure() {
    let traj = TrajectorySpec::modified(1.5, PI / 10.0, PI);
    let s = traj.sample(0.0);
    let phase = phase_at(s.point()).unwrap();
    let eta = criterion_eta(&s, &phase).unwrap();
    // On the axis x = 0 above the cut, |α| = √(y² − 1).
    let alpha = (s.y * s.y - 1.0).sqrt();
    assert!((phase.alpha.abs() - alpha).abs() < 1e-14);
    assert!((eta - 0.047_559_9 / (4.0 * alpha)).abs() < 1e-8, "{eta}");

    // ⟨φ̂₊|∂tφ₋⟩ by central differences of the instantaneous eigenvectors.
    let h = 1e-6;
    let basis = |t: f64| eigensystem_h0(traj.sample(t).point()).unwrap();
    let (bp, bm) = (basis(h), basis(-h));
    let d = [
        (bp.right_minus[0] - bm.right_minus[0]) / (2.0 * h),
        (bp.right_minus[1] - bm.right_minus[1]) / (2.0 * h),
    ];
    let coupling = linalg::inner(&basis(0.0).left_plus, &d);
    let want = coupling.norm() / (2.0 * phase.alpha).abs();
    assert!((eta - want).abs() < 1e-6 * eta, "{eta} {want}");

    let fast = TrajectorySpec::modified(1.5, PI, PI).sample(0.0);
    let ratio = criterion_eta(&fast, &phase).unwrap() / eta;
    assert!((ratio - 10.0).abs() < 1e-12);

    let on_line = phase_at(ChartPoint::new(1.0, 0.0).unwrap()).unwrap();
    assert!(matches!(
        criterion_eta(&s, &on_line),
        Err(Error::AtDegeneracy { .. })
    ));
}

#[test]
fn config_validation() {
    let base = shortcut(0.5, PI / 10.0, InitialState::Minus);
    assert!(base.validate().is_ok());
    assert!(base
        .clone()
        .with_tolerances(1e-15, 1e-12)
        .validate()
        .is_err());
    assert!(base
        .clone()
        .with_tolerances(1e-10, 1e-2)
        .validate()
        .is_err());
    assert!(base.clone().with_periods(0.0).validate().is_err());
    assert!(base.clone().with_samples(0).validate().is_err());
    let zero = base
        .clone()
        .with_initial(InitialState::Custom([c(0.0, 0.0); 2]));
    assert!(propagate(&zero).unwrap_err().is_config());
}

#[test]
fn initial_state_parsing() {
    assert_eq!(
        "minus".parse::<InitialState<f64>>().unwrap(),
        InitialState::Minus
    );
    assert_eq!(
        "plus".parse::<InitialState<f64>>().unwrap(),
        InitialState::Plus
    );
    assert_eq!(
        "1,0.5+0.2i".parse::<InitialState<f64>>().unwrap(),
        InitialState::Custom([c(1.0, 0.0), c(0.5, 0.2)])
    );
    for bad in ["", "up", "1", "1,2,3", "a,b", "0,0", "nan,1"] {
        assert!(bad.parse::<InitialState<f64>>().is_err(), "{bad}");
    }
}

#[test]
fn config_serde_round_trip_and_unknown_keys() {
    let cfg = shortcut(1.5, PI, InitialState::Plus).with_periods(2.0);
    let json = serde_json::to_string(&cfg).unwrap();
    let back: EvolutionConfig<f64> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cfg);
    let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
    v["colour"] = serde_json::json!(1);
    assert!(serde_json::from_value::<EvolutionConfig<f64>>(v).is_err());
}

#[test]
fn single_precision_shortcut() {
    let cfg = EvolutionConfig::<f32>::new(
        TrajectorySpec::modified(0.5, std::f32::consts::PI / 10.0, std::f32::consts::PI),
        HamiltonianKind::Hm,
    )
    .with_tolerances(1e-6, 1e-8)
    .with_samples(200);
    let (_, fp) = propagate(&cfg).unwrap().terminal();
    assert!(fp > 0.999, "{fp}");
}
