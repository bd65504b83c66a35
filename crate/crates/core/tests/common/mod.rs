//! Reference computations that share no numerical path with the library's
//! adaptive integrator.

#![allow(dead_code)]

use std::f64::consts::PI;

use nhsta::evolution::{EvolutionConfig, InitialState};
use nhsta::linalg::{Operator2, Vector2};
use nhsta::model::{eigensystem_from_phase, eigensystem_general, phase_at, ChartPoint};
use nhsta::trajectory::TrajectorySpec;
use nhsta::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform chart points in `[−3, 3] × [−3, 4]` with `|y| > 1e-3`, off the cut.
pub fn random_points(n: usize, seed: u64) -> Vec<ChartPoint<f64>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (x, y) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..4.0));
        let p = ChartPoint::new(x, y).unwrap();
        if f64::abs(y) > 1e-3 && !p.on_cut() {
            out.push(p);
        }
    }
    out
}

pub fn random_complex(r: &mut StdRng) -> C64 {
    C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// `exp(−iHt)` as `Σ_n e^{−iE_n t} |φ_n⟩⟨φ̂_n|` from the biorthogonal eigenbasis.
pub fn expm_by_eigenbasis(h: &Operator2<f64>, t: f64) -> Operator2<f64> {
    let b = eigensystem_general(h).expect("nondegenerate generator");
    let phase = |e: C64| (C64::new(0.0, -t) * e).exp();
    b.projector_minus().scaled(phase(b.e_minus)) + b.projector_plus().scaled(phase(b.e_plus))
}

pub fn initial_vector(config: &EvolutionConfig<f64>) -> Vector2<f64> {
    let s = config.trajectory.sample(0.0);
    let basis = eigensystem_from_phase(&phase_at(s.point()).unwrap());
    match config.initial {
        InitialState::Minus => basis.right_minus,
        InitialState::Plus => basis.right_plus,
        InitialState::Custom(v) => v,
    }
}

/// Piecewise-constant propagation: `slices` equal steps, each advanced by the
/// exact exponential of the generator frozen at the slice midpoint.
pub fn piecewise_state(config: &EvolutionConfig<f64>, slices: usize) -> Vector2<f64> {
    let t_end = config.duration();
    let dt = t_end / slices as f64;
    let mut psi = initial_vector(config);
    for j in 0..slices {
        let h = config.hamiltonian_at((j as f64 + 0.5) * dt).unwrap();
        psi = h.propagator(dt).apply(&psi);
    }
    psi
}

/// Normalized `(f_minus, f_plus)` of `psi` against the eigenbasis at time `t`.
pub fn fidelities(traj: &TrajectorySpec<f64>, t: f64, psi: &Vector2<f64>) -> (f64, f64) {
    let s = traj.sample(t);
    let proj = eigensystem_from_phase(&phase_at(s.point()).unwrap()).project(psi);
    let (m, p) = (proj.minus.norm_sqr(), proj.plus.norm_sqr());
    (m / (m + p), p / (m + p))
}

pub fn piecewise_fidelities(config: &EvolutionConfig<f64>, slices: usize) -> (f64, f64) {
    let psi = piecewise_state(config, slices);
    fidelities(&config.trajectory, config.duration(), &psi)
}

/// `φ = arctan(1/z)` shifted by the multiple of π nearest to `prev`.
pub fn continue_phase(z: C64, prev: C64) -> C64 {
    let p = z.inv().atan();
    let n = ((prev.re - p.re) / PI).round();
    p + C64::new(n * PI, 0.0)
}

/// `φ(t)` carried continuously from `t = 0` with `steps` small steps per period.
pub fn continued_phase_change(traj: &TrajectorySpec<f64>, periods: usize, steps: usize) -> f64 {
    let total = periods * steps;
    let dt = traj.period() * periods as f64 / total as f64;
    let z0 = traj.sample(0.0).point().as_complex();
    let start = z0.inv().atan();
    let mut phi = start;
    for j in 1..=total {
        // Shift grid points by a hair so no sample sits exactly on x = 0.
        let t = if j == total {
            j as f64 * dt
        } else {
            (j as f64 + 1e-7) * dt
        };
        phi = continue_phase(traj.sample(t).point().as_complex(), phi);
    }
    phi.re - start.re
}

/// Central difference of the continuously tracked `φ` along the path.
pub fn finite_difference_phidot(traj: &TrajectorySpec<f64>, t: f64, h: f64) -> C64 {
    let z = |t: f64| traj.sample(t).point().as_complex();
    let a = z(t - h).inv().atan();
    let b = continue_phase(z(t + h), a);
    (b - a) / (2.0 * h)
}
