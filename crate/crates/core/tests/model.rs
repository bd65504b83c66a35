mod common;

use nhsta::linalg::Operator2;
use nhsta::model::{
    eigensystem_general, eigensystem_h0, eigenvalues, h0_at, h1_at, hm_at, phase_at, CdMode,
    ChartPoint,
};
use nhsta::{Error, C64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pt(x: f64, y: f64) -> ChartPoint<f64> {
    ChartPoint::new(x, y).unwrap()
}

/// Eigenvalues of a 2×2 matrix from its characteristic polynomial.
fn char_poly_eigenvalues(h: &Operator2<f64>) -> (C64, C64) {
    let (tr, det) = (h.trace(), h.det());
    let disc = (tr * tr - det * 4.0).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

#[test]
fn exceptional_line_has_zero_scale() {
    let p = phase_at(pt(1.0, 0.0)).unwrap();
    assert_eq!(p.phi_i, 0.0);
    assert_eq!(p.alpha, 0.0);
    for v in [p.k, p.kappa, p.epsilon, p.delta] {
        assert_eq!(v, 0.0);
    }
    assert_eq!(h0_at(pt(1.0, 0.0)).unwrap().frobenius_norm(), 0.0);
}

#[test]
fn removable_singularity_matches_one_sided_limits() {
    let p = phase_at(pt(0.0, 2.0)).unwrap();
    assert!((p.alpha + 3f64.sqrt()).abs() < 1e-14, "{}", p.alpha);
    assert!(p.k.abs() < 1e-15 && p.delta.abs() < 1e-15);
    for x in [1e-6, -1e-6] {
        let (a, b) = char_poly_eigenvalues(&h0_at(pt(x, 2.0)).unwrap());
        let big = a.norm().max(b.norm());
        assert!((big - 3f64.sqrt()).abs() < 1e-6, "x = {x}: {a} {b}");
        assert!(a.im.abs() < 1e-9 && b.im.abs() < 1e-9);
    }
    let (a, b) = char_poly_eigenvalues(&h0_at(pt(0.0, 2.0)).unwrap());
    assert!((a.re.abs() - 3f64.sqrt()).abs() < 1e-12 && (a + b).norm() < 1e-12);
}

#[test]
fn scale_squared_is_sum_of_squared_couplings() {
    let p = phase_at(pt(0.3, 1.2)).unwrap();
    let i = c(0.0, 1.0);
    let rhs = (p.k + i * p.kappa).powu(2) + (p.epsilon - i * p.delta).powu(2);
    assert!((c(p.alpha * p.alpha, 0.0) - rhs).norm() < 1e-10 * p.alpha * p.alpha);
    assert!(
        (p.eigen_product() - c(p.alpha * p.alpha, 0.0)).norm() < 1e-10 * (1.0 + p.alpha * p.alpha)
    );
}

#[test]
fn cut_and_nonfinite_points_are_rejected() {
    for y in [0.5, 1.0, -1.0, -0.2] {
        assert!(
            matches!(phase_at(pt(0.0, y)), Err(Error::OnCut { .. })),
            "y = {y}"
        );
    }
    assert!(matches!(
        ChartPoint::new(f64::NAN, 1.0),
        Err(Error::NonFinite(_))
    ));
    assert!(ChartPoint::new(0.0, f64::INFINITY).is_err());
    assert!(phase_at(pt(0.0, 1.5)).is_ok());
    assert!(phase_at(pt(0.0, 0.0)).is_ok());
}

#[test]
fn principal_branch_range() {
    for p in common::random_points(2000, 7) {
        let ph = phase_at(p).unwrap();
        assert!(ph.phi_r > -std::f64::consts::FRAC_PI_2 && ph.phi_r <= std::f64::consts::FRAC_PI_2);
        assert_eq!(ph.branch_offset, 0);
    }
}

#[test]
fn identity_phase_basis() {
    // φ → 0 far from the origin along +x.
    let b = eigensystem_h0(pt(1e300, 0.0)).unwrap();
    assert!((b.right_plus[0] - c(1.0, 0.0)).norm() < 1e-15 && b.right_plus[1].norm() < 1e-15);
    assert!(b.right_minus[0].norm() < 1e-15 && (b.right_minus[1] - c(1.0, 0.0)).norm() < 1e-15);
    assert!(b.biorthogonality_error() < 1e-15);
}

#[test]
fn counter_diabatic_term_by_mode() {
    for mode in [CdMode::None, CdMode::Real, CdMode::Full] {
        assert_eq!(h1_at(c(0.0, 0.0), mode).unwrap().frobenius_norm(), 0.0);
    }
    let h = h1_at(c(0.2, 0.0), CdMode::Real).unwrap();
    assert!(h.is_hermitian(0.0));
    assert!((h.max_abs_diff(&Operator2::sigma_y().scaled(c(0.1, 0.0)))) < 1e-17);
    let h = h1_at(c(0.2, 0.1), CdMode::Full).unwrap();
    assert!((h.m[0][1] - h.m[1][0].conj()).norm() > 1e-3);
    assert_eq!(
        h1_at(c(0.2, 0.1), CdMode::Real).unwrap(),
        h1_at(c(0.2, 0.0), CdMode::Full).unwrap()
    );
    assert!(h1_at(c(f64::NAN, 0.0), CdMode::Real).is_err());
}

#[test]
fn modified_hamiltonian_spectrum() {
    let p = pt(0.3, 1.7);
    assert_eq!(
        hm_at(p, c(0.4, 0.3), CdMode::None).unwrap(),
        h0_at(p).unwrap()
    );
    let h = hm_at(pt(0.0, 2.0), c(0.2, 0.0), CdMode::Real).unwrap();
    let want = (0.01f64 + 3.0).sqrt();
    let (em, ep) = eigenvalues(&h);
    let (a, b) = char_poly_eigenvalues(&h);
    assert!((ep - c(want, 0.0)).norm() < 1e-12 && (em + c(want, 0.0)).norm() < 1e-12);
    assert!((a.norm() - want).abs() < 1e-12 && (b.norm() - want).abs() < 1e-12);
}

#[test]
fn mode_parsing() {
    assert_eq!("real".parse::<CdMode>().unwrap(), CdMode::Real);
    assert_eq!("real-part".parse::<CdMode>().unwrap(), CdMode::Real);
    assert_eq!("full".parse::<CdMode>().unwrap(), CdMode::Full);
    assert_eq!("none".parse::<CdMode>().unwrap(), CdMode::None);
    assert!("imag".parse::<CdMode>().is_err());
}

#[test]
fn general_eigensystem_trivial_and_degenerate() {
    let h = Operator2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
    let b = eigensystem_general(&h).unwrap();
    assert_eq!(b.e_plus, c(1.0, 0.0));
    assert_eq!(b.e_minus, c(-1.0, 0.0));
    assert!(b.biorthogonality_error() < 1e-15 && b.residual(&h) < 1e-15);
    assert!(matches!(
        eigensystem_general(&Operator2::<f64>::identity()),
        Err(Error::Degenerate { .. })
    ));
    // Jordan block at the exceptional point.
    let jordan = Operator2::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    assert!(eigensystem_general(&jordan).is_err());
}

#[test]
fn general_eigensystem_ordering() {
    let h = Operator2::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
    let b = eigensystem_general(&h).unwrap();
    assert_eq!(b.e_plus, c(0.0, 1.0));
    let h = Operator2::new(c(-2.0, 5.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, -5.0));
    assert!((eigensystem_general(&h).unwrap().e_plus - c(3.0, -5.0)).norm() < 1e-14);
}

#[test]
fn single_precision_instantiation() {
    let p = ChartPoint::<f32>::new(0.3, 1.2).unwrap();
    let b = eigensystem_h0(p).unwrap();
    assert!(b.biorthogonality_error() < 1e-5);
    assert!(b.closure_error() < 1e-5);
    let ph = phase_at(p).unwrap();
    assert!(ph.h0().max_abs_diff(&ph.h0_from_parameters()) < 1e-5);
    let at_x0 = phase_at(ChartPoint::<f32>::new(0.0, 2.0).unwrap()).unwrap();
    assert!((at_x0.alpha + 3f32.sqrt()).abs() < 1e-5);
}

fn off_cut() -> impl Strategy<Value = ChartPoint<f64>> {
    (-4.0..4.0f64, -4.0..4.0f64)
        .prop_filter("off the cut and the exceptional line", |(x, y)| {
            y.abs() > 1e-3 && !(*x == 0.0 && y.abs() <= 1.0)
        })
        .prop_map(|(x, y)| ChartPoint::new(x, y).unwrap())
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn branch_shift_leaves_h0_unchanged(p in off_cut(), n in -3i32..=3) {
        let ph = phase_at(p).unwrap();
        prop_assert!(ph.h0().max_abs_diff(&ph.shifted(n).h0()) < 1e-12);
    }

    #[test]
    fn two_assemblies_agree(p in off_cut()) {
        let ph = phase_at(p).unwrap();
        prop_assert!(ph.h0().max_abs_diff(&ph.h0_from_parameters()) < 1e-12);
        prop_assert!(h0_at(p).unwrap().max_abs_diff(&ph.h0()) == 0.0);
    }

    #[test]
    fn scale_matches_eigenvalue_product(p in off_cut()) {
        let ph = phase_at(p).unwrap();
        let e = ph.eigen_product().sqrt();
        prop_assert!((e.norm() - ph.alpha.abs()).abs() <= 1e-10 * (1.0 + ph.alpha.abs()));
    }

    #[test]
    fn principal_basis_is_biorthonormal_and_complete(p in off_cut()) {
        let b = eigensystem_h0(p).unwrap();
        prop_assert!(b.biorthogonality_error() < 1e-12);
        prop_assert!(b.closure_error() < 1e-12);
        let h = h0_at(p).unwrap();
        prop_assert!(b.residual(&h) <= 1e-10 * h.frobenius_norm().max(1e-300));
    }

    #[test]
    fn general_solver_reproduces_h0_projectors(p in off_cut()) {
        let h = h0_at(p).unwrap();
        prop_assume!(phase_at(p).unwrap().alpha.abs() > 1e-6);
        let g = eigensystem_general(&h).unwrap();
        let b = eigensystem_h0(p).unwrap();
        let (gp, gm) = (g.projector_plus(), g.projector_minus());
        let (bp, bm) = (b.projector_plus(), b.projector_minus());
        let same = gp.max_abs_diff(&bp).max(gm.max_abs_diff(&bm));
        let swapped = gp.max_abs_diff(&bm).max(gm.max_abs_diff(&bp));
        prop_assert!(same.min(swapped) < 1e-10, "{} {}", same, swapped);
    }

    #[test]
    fn general_solver_residual(a in complex(), b in complex(), c_ in complex(), d in complex()) {
        let h = Operator2::new(a, b, c_, d);
        if let Ok(basis) = eigensystem_general(&h) {
            prop_assert!(basis.residual(&h) <= 1e-10 * h.frobenius_norm());
            prop_assert!(basis.biorthogonality_error() < 1e-9);
            prop_assert!(basis.e_plus.re > basis.e_minus.re
                || (basis.e_plus.re == basis.e_minus.re && basis.e_plus.im >= basis.e_minus.im));
        }
    }

    #[test]
    fn real_part_coupling_keeps_spectrum_real(p in off_cut(), w in -5.0..5.0f64) {
        let h = hm_at(p, C64::new(w, 0.7), CdMode::Real).unwrap();
        let (em, ep) = eigenvalues(&h);
        let alpha = phase_at(p).unwrap().alpha;
        let want = (0.25 * w * w + alpha * alpha).sqrt();
        prop_assert!(em.im.abs() < 1e-12 * (1.0 + want) && ep.im.abs() < 1e-12 * (1.0 + want));
        prop_assert!((ep.re - want).abs() < 1e-10 * (1.0 + want));
        prop_assert_eq!(em, -ep);
    }
}
