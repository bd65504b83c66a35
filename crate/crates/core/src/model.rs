//! The two-level non-Hermitian model.
//!
//! A chart point `(x, y)` fixes a complex phase `φ = arctan[1/(x + iy)]` and
//! a real scale `α`; together they produce the physical parameters
//!
//! ```text
//! k = α cosh φ_i sin φ_r      κ = α sinh φ_i cos φ_r
//! ε = α cosh φ_i cos φ_r      Δ = α sinh φ_i sin φ_r
//! ```
//!
//! and the Hamiltonian `H₀ = (k + iκ)σx + (ε − iΔ)σz = α [[cos φ, sin φ], [sin φ, −cos φ]]`,
//! whose spectrum `±α` is real. The principal arctan branch puts a cut on
//! `{x = 0, 0 < |y| ≤ 1}`; `H₀` itself is continuous across it (it vanishes
//! there), only the eigenvector labels swap.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Operator2, Vector2};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFinite("chart point"));
        }
        Ok(Self { x, y })
    }

    /// True on the principal branch cut `{x = 0, 0 < |y| ≤ 1}`.
    pub fn on_cut(&self) -> bool {
        self.x == T::zero() && self.y != T::zero() && self.y.abs() <= T::one()
    }

    pub fn as_complex(&self) -> Complex<T> {
        Complex::new(self.x, self.y)
    }
}

/// Phase, scale and mapped physical parameters at one chart point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub phi_r: T,
    pub phi_i: T,
    pub alpha: T,
    pub k: T,
    pub kappa: T,
    pub epsilon: T,
    pub delta: T,
    /// Number of π shifts applied to the principal `φ_r`.
    pub branch_offset: i32,
}

impl<T: Real> PhasePoint<T> {
    fn from_phase(phi_r: T, phi_i: T, alpha: T, branch_offset: i32) -> Self {
        let (sr, cr) = phi_r.sin_cos();
        let (shi, chi) = (phi_i.sinh(), phi_i.cosh());
        Self {
            phi_r,
            phi_i,
            alpha,
            k: alpha * chi * sr,
            kappa: alpha * shi * cr,
            epsilon: alpha * chi * cr,
            delta: alpha * shi * sr,
            branch_offset,
        }
    }

    pub fn phi(&self) -> Complex<T> {
        Complex::new(self.phi_r, self.phi_i)
    }

    /// The same physical point on another branch: `φ → φ + nπ`, `α → (−1)ⁿ α`.
    pub fn shifted(&self, n: i32) -> Self {
        let sign = if n % 2 == 0 { T::one() } else { -T::one() };
        let phi_r = self.phi_r + T::of(n as f64) * T::PI();
        let mut p = Self::from_phase(phi_r, self.phi_i, sign * self.alpha, self.branch_offset + n);
        // k, κ, ε, Δ are branch invariant; keep the original bits.
        p.k = self.k;
        p.kappa = self.kappa;
        p.epsilon = self.epsilon;
        p.delta = self.delta;
        p
    }

    /// `H₀ = α [[cos φ, sin φ], [sin φ, −cos φ]]`.
    pub fn h0(&self) -> Operator2<T> {
        let phi = self.phi();
        let a = Complex::new(self.alpha, T::zero());
        let (s, c) = (phi.sin() * a, phi.cos() * a);
        Operator2::new(c, s, s, -c)
    }

    /// `H₀ = (k + iκ)σx + (ε − iΔ)σz`, assembled from the mapped parameters.
    pub fn h0_from_parameters(&self) -> Operator2<T> {
        assemble(
            self,
            Complex::new(T::zero(), T::zero()),
            &ControlScales::identity(),
        )
    }

    /// Eigenvalues `(E₁E₂)^{1/2}` per the physical-parameter form; equals `±α` up to sign.
    pub fn eigen_product(&self) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        let re = |v: T| Complex::new(v, T::zero());
        let e1 = re(self.k) - re(self.delta) - i * (self.epsilon - self.kappa);
        let e2 = re(self.k) + re(self.delta) + i * (self.epsilon + self.kappa);
        e1 * e2
    }
}

/// Principal branch of `φ = arctan[1/(x + iy)]` with the scale `α` and mapped parameters.
///
/// Rejects points on the branch cut; see [`phase_at_one_sided`] for a variant
/// that evaluates them as the `x → 0⁺` limit.
pub fn phase_at<T: Real>(p: ChartPoint<T>) -> Result<PhasePoint<T>> {
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(Error::NonFinite("chart point"));
    }
    if p.on_cut() {
        return Err(Error::OnCut {
            x: p.x.to_f64().unwrap_or(f64::NAN),
            y: p.y.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(principal_phase(p))
}

/// Like [`phase_at`], but cut points are evaluated as the limit `x → 0⁺`:
/// `φ = π/2 − i·atanh(y)`, `α = 0`. The branch point `(0, ±1)` is still rejected.
pub fn phase_at_one_sided<T: Real>(p: ChartPoint<T>) -> Result<PhasePoint<T>> {
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(Error::NonFinite("chart point"));
    }
    if p.on_cut() {
        if p.y.abs() == T::one() {
            return Err(Error::OnCut {
                x: 0.0,
                y: p.y.to_f64().unwrap_or(f64::NAN),
            });
        }
        return Ok(PhasePoint::from_phase(
            T::FRAC_PI_2(),
            -p.y.atanh(),
            T::zero(),
            0,
        ));
    }
    Ok(principal_phase(p))
}

fn principal_phase<T: Real>(p: ChartPoint<T>) -> PhasePoint<T> {
    let z = p.as_complex();
    if z.re == T::zero() && z.im == T::zero() {
        // arctan(∞) = π/2 on the exceptional line.
        return PhasePoint::from_phase(T::FRAC_PI_2(), T::zero(), T::zero(), 0);
    }
    let phi = z.inv().atan();
    let (mut phi_r, phi_i) = (phi.re, phi.im);
    if phi_r <= -T::FRAC_PI_2() {
        phi_r = phi_r + T::PI();
    }
    let sr = phi_r.sin();
    let alpha = if sr.abs() >= T::removable_tol() {
        p.x * phi_i.sinh() / sr
    } else {
        // x·sinh φ_i / sin φ_r = −y cos φ_r / cosh φ_i identically; the right
        // side has no 0/0 at x = 0.
        -p.y * phi_r.cos() / phi_i.cosh()
    };
    PhasePoint::from_phase(phi_r, phi_i, alpha, 0)
}

/// `H₀(x, y)` in the simplified form.
pub fn h0_at<T: Real>(p: ChartPoint<T>) -> Result<Operator2<T>> {
    Ok(phase_at(p)?.h0())
}

/// Which part of the complex `φ̇` drives the counter-diabatic term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdMode {
    /// No counter-diabatic term.
    None,
    /// `φ̇ → Re φ̇`: Hermitian coupling, real spectrum.
    #[default]
    Real,
    /// Full complex `φ̇`: exactly transitionless.
    Full,
}

impl CdMode {
    pub fn coupling<T: Real>(self, phidot: Complex<T>) -> Complex<T> {
        match self {
            CdMode::None => Complex::new(T::zero(), T::zero()),
            CdMode::Real => Complex::new(phidot.re, T::zero()),
            CdMode::Full => phidot,
        }
    }
}

impl std::str::FromStr for CdMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(CdMode::None),
            "real" | "real-part" => Ok(CdMode::Real),
            "full" => Ok(CdMode::Full),
            other => Err(invalid(format!(
                "unknown cd mode `{other}` (none|real|full)"
            ))),
        }
    }
}

/// `H₁ = iħ [[0, −φ̇/2], [φ̇/2, 0]] = (φ̇/2) σy`, with `φ̇` filtered by `mode`.
pub fn h1_at<T: Real>(phidot: Complex<T>, mode: CdMode) -> Result<Operator2<T>> {
    if !(phidot.re.is_finite() && phidot.im.is_finite()) {
        return Err(Error::NonFinite("phidot"));
    }
    let omega = mode.coupling(phidot) * T::half();
    Ok(Operator2::sigma_y().scaled(omega))
}

/// `Hₘ = H₀ + H₁`.
pub fn hm_at<T: Real>(p: ChartPoint<T>, phidot: Complex<T>, mode: CdMode) -> Result<Operator2<T>> {
    Ok(h0_at(p)? + h1_at(phidot, mode)?)
}

/// Multiplicative miscalibration of each term of `Hₘ`, constant in time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlScales<T> {
    pub k: T,
    pub kappa: T,
    pub epsilon: T,
    pub delta: T,
    /// Scale on the counter-diabatic coupling `Ω`.
    pub omega_c: T,
}

impl<T: Real> ControlScales<T> {
    pub fn identity() -> Self {
        let o = T::one();
        Self {
            k: o,
            kappa: o,
            epsilon: o,
            delta: o,
            omega_c: o,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl<T: Real> Default for ControlScales<T> {
    fn default() -> Self {
        Self::identity()
    }
}

/// `(s_k k + i s_κ κ)σx + s_Ω Ω σy + (s_ε ε − i s_Δ Δ)σz` with `Ω = coupling/2`.
pub fn assemble<T: Real>(
    phase: &PhasePoint<T>,
    coupling: Complex<T>,
    scales: &ControlScales<T>,
) -> Operator2<T> {
    let off = Complex::new(scales.k * phase.k, scales.kappa * phase.kappa);
    let diag = Complex::new(
        scales.epsilon * phase.epsilon,
        -(scales.delta * phase.delta),
    );
    let omega = coupling * (T::half() * scales.omega_c);
    let i = Complex::new(T::zero(), T::one());
    Operator2::new(diag, off - i * omega, off + i * omega, -diag)
}

/// Paired right and left eigenvectors with eigenvalues.
///
/// Left vectors are stored as kets `|φ̂_n⟩`; the bra `⟨φ̂_n|` is their conjugate
/// transpose, so `⟨φ̂_n|φ_m⟩ = δ_nm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiorthoBasis<T> {
    pub right_minus: Vector2<T>,
    pub right_plus: Vector2<T>,
    pub left_minus: Vector2<T>,
    pub left_plus: Vector2<T>,
    pub e_minus: Complex<T>,
    pub e_plus: Complex<T>,
}

/// Biorthogonal projections of a state on the two eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projections<T> {
    pub plus: Complex<T>,
    pub minus: Complex<T>,
}

impl<T: Real> BiorthoBasis<T> {
    /// `(⟨φ̂_+|ψ⟩, ⟨φ̂_−|ψ⟩)`.
    pub fn project(&self, psi: &Vector2<T>) -> Projections<T> {
        Projections {
            plus: linalg::inner(&self.left_plus, psi),
            minus: linalg::inner(&self.left_minus, psi),
        }
    }

    pub fn projector_plus(&self) -> Operator2<T> {
        Operator2::outer(&self.right_plus, &self.left_plus)
    }

    pub fn projector_minus(&self) -> Operator2<T> {
        Operator2::outer(&self.right_minus, &self.left_minus)
    }

    /// `max |⟨φ̂_n|φ_m⟩ − δ_nm|`.
    pub fn biorthogonality_error(&self) -> T {
        let one = Complex::new(T::one(), T::zero());
        let l = [&self.left_minus, &self.left_plus];
        let r = [&self.right_minus, &self.right_plus];
        let mut worst = T::zero();
        for (n, ln) in l.iter().enumerate() {
            for (m, rm) in r.iter().enumerate() {
                let want = if n == m {
                    one
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                worst = worst.max((linalg::inner(ln, rm) - want).norm());
            }
        }
        worst
    }

    /// `max |Σ_n |φ_n⟩⟨φ̂_n| − 1|` entrywise.
    pub fn closure_error(&self) -> T {
        (self.projector_minus() + self.projector_plus()).max_abs_diff(&Operator2::identity())
    }

    /// `max_n ‖h|φ_n⟩ − E_n|φ_n⟩‖`.
    pub fn residual(&self, h: &Operator2<T>) -> T {
        let res = |v: &Vector2<T>, e: Complex<T>| {
            let hv = h.apply(v);
            linalg::norm(&[hv[0] - v[0] * e, hv[1] - v[1] * e])
        };
        res(&self.right_minus, self.e_minus).max(res(&self.right_plus, self.e_plus))
    }
}

/// Closed-form biorthogonal eigensystem of `H₀` on the principal branch.
pub fn eigensystem_h0<T: Real>(p: ChartPoint<T>) -> Result<BiorthoBasis<T>> {
    Ok(eigensystem_from_phase(&phase_at(p)?))
}

/// `|φ_−⟩ = [−sin(φ/2), cos(φ/2)]`, `|φ_+⟩ = [cos(φ/2), sin(φ/2)]`, left vectors
/// with `φ → φ*`, and `E_± = ±α`.
pub fn eigensystem_from_phase<T: Real>(phase: &PhasePoint<T>) -> BiorthoBasis<T> {
    let half = phase.phi() * T::half();
    let (s, c) = (half.sin(), half.cos());
    let right_minus = [-s, c];
    let right_plus = [c, s];
    BiorthoBasis {
        right_minus,
        right_plus,
        left_minus: linalg::conj(&right_minus),
        left_plus: linalg::conj(&right_plus),
        e_minus: Complex::new(-phase.alpha, T::zero()),
        e_plus: Complex::new(phase.alpha, T::zero()),
    }
}

/// Eigenvalues `(e_minus, e_plus)` of an arbitrary 2×2 operator, ordered so
/// that `e_plus` has the larger real part (ties: larger imaginary part).
///
/// Computed as `tr/2 ± s`, so a traceless operator gives exact negatives.
pub fn eigenvalues<T: Real>(h: &Operator2<T>) -> (Complex<T>, Complex<T>) {
    let m = &h.m;
    let mean = (m[0][0] + m[1][1]) * T::half();
    let half_diff = (m[0][0] - m[1][1]) * T::half();
    let s = (half_diff * half_diff + m[0][1] * m[1][0]).sqrt();
    let (a, b) = (mean + s, mean - s);
    if precedes(a, b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// True when `a` sorts below `b` (real part first, then imaginary).
fn precedes<T: Real>(a: Complex<T>, b: Complex<T>) -> bool {
    a.re < b.re || (a.re == b.re && a.im <= b.im)
}

/// Biorthonormal eigensystem of an arbitrary non-degenerate 2×2 operator.
pub fn eigensystem_general<T: Real>(h: &Operator2<T>) -> Result<BiorthoBasis<T>> {
    if !h.is_finite() {
        return Err(Error::NonFinite("operator"));
    }
    let (e_minus, e_plus) = eigenvalues(h);
    let gap = (e_plus - e_minus).norm();
    let threshold = T::degenerate_tol() * h.frobenius_norm();
    if gap.is_nan() || gap <= threshold {
        return Err(Error::Degenerate {
            gap: gap.to_f64().unwrap_or(f64::NAN),
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (right_minus, left_minus) = eigenpair(h, e_minus);
    let (right_plus, left_plus) = eigenpair(h, e_plus);
    Ok(BiorthoBasis {
        right_minus,
        right_plus,
        left_minus,
        left_plus,
        e_minus,
        e_plus,
    })
}

/// Unit right eigenvector and the matching left ket scaled so `⟨φ̂|φ⟩ = 1`.
fn eigenpair<T: Real>(h: &Operator2<T>, e: Complex<T>) -> (Vector2<T>, Vector2<T>) {
    let m = &h.m;
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let larger = |u: Vector2<T>, v: Vector2<T>| {
        if linalg::norm(&u) >= linalg::norm(&v) {
            u
        } else {
            v
        }
    };
    // (h − e)·v = 0 and u·(h − e) = 0, from either row/column of h − e.
    let right = larger([b, e - a], [e - d, c]);
    let row = larger([c, e - a], [e - d, b]);
    let nr = linalg::norm(&right);
    let right = linalg::scale(&right, Complex::new(T::one() / nr, T::zero()));
    let row = linalg::scale(&row, linalg::dot(&row, &right).inv());
    (right, linalg::conj(&row))
}
