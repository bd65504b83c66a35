//! Closed encircling loops in the `(x, y)` chart.
//!
//! Two analytic families share `x = r sin θ`, `θ = ωt + φ₀`:
//!
//! - original: `y = 1 − r cos θ`, a circle around the branch point `(0, 1)`;
//! - modified: `y = √(1 + r²) − r cos θ`, on which `φ̇` is purely real and
//!   which never reaches the exceptional line `y = 0`.
//!
//! The phase velocity is the exact derivative of `φ = arccot z` along the
//! path, `φ̇ = −ż/(1 + z²)`, i.e.
//! `φ̇ = −[ẋa + ẏb + i(ẏa − ẋb)]/(a² + b²)` with `a = 1 + x² − y²`, `b = 2xy`.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{phase_at, ChartPoint};
use crate::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + serde::de::DeserializeOwned"
))]
pub enum Variant<T> {
    Original,
    Modified,
    Custom(CustomPath<T>),
}

impl<T> Variant<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Modified => "modified",
            Variant::Custom(_) => "custom",
        }
    }
}

/// A parametric closed loop.
///
/// For the custom variant `r` and `φ₀` are unused and `ω = 2π/period` of the table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + serde::de::DeserializeOwned"
))]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec<T> {
    pub r: T,
    pub omega: T,
    pub phi0: T,
    pub variant: Variant<T>,
}

/// Position, velocity and phase velocity at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub xdot: T,
    pub ydot: T,
    /// `1 + x² − y²`
    pub a: T,
    /// `2xy`
    pub b: T,
    pub phidot: Complex<T>,
}

impl<T: Real> TrajectorySample<T> {
    pub fn point(&self) -> ChartPoint<T> {
        ChartPoint {
            x: self.x,
            y: self.y,
        }
    }
}

/// `φ̇` from position and velocity.
pub fn phase_velocity<T: Real>(x: T, y: T, xdot: T, ydot: T) -> (T, T, Complex<T>) {
    let a = T::one() + x * x - y * y;
    let b = T::two() * x * y;
    let den = a * a + b * b;
    let phidot = Complex::new(-(xdot * a + ydot * b) / den, -(ydot * a - xdot * b) / den);
    (a, b, phidot)
}

impl<T: Real> TrajectorySpec<T> {
    pub fn original(r: T, omega: T, phi0: T) -> Self {
        Self {
            r,
            omega,
            phi0,
            variant: Variant::Original,
        }
    }

    pub fn modified(r: T, omega: T, phi0: T) -> Self {
        Self {
            r,
            omega,
            phi0,
            variant: Variant::Modified,
        }
    }

    pub fn custom(path: CustomPath<T>) -> Self {
        let omega = T::two() * T::PI() / path.period();
        Self {
            r: T::zero(),
            omega,
            phi0: T::zero(),
            variant: Variant::Custom(path),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega != T::zero()) {
            return Err(invalid("omega must be finite and nonzero"));
        }
        if !self.phi0.is_finite() {
            return Err(invalid("phi0 must be finite"));
        }
        if !(self.r.is_finite() && self.r >= T::zero()) {
            return Err(invalid("r must be finite and non-negative"));
        }
        Ok(())
    }

    /// `T = 2π/|ω|`.
    pub fn period(&self) -> T {
        match &self.variant {
            Variant::Custom(path) => path.period(),
            _ => T::two() * T::PI() / self.omega.abs(),
        }
    }

    /// Vertical offset of the loop centre: 1 (original) or `√(1 + r²)` (modified).
    pub fn center_y(&self) -> Option<T> {
        match self.variant {
            Variant::Original => Some(T::one()),
            Variant::Modified => Some((T::one() + self.r * self.r).sqrt()),
            Variant::Custom(_) => None,
        }
    }

    pub fn sample(&self, t: T) -> TrajectorySample<T> {
        let (x, y, xdot, ydot) = match (&self.variant, self.center_y()) {
            (Variant::Custom(path), _) => path.eval(t),
            (_, Some(c)) => {
                let theta = self.omega * t + self.phi0;
                let (s, co) = theta.sin_cos();
                let rw = self.r * self.omega;
                (self.r * s, c - self.r * co, rw * co, rw * s)
            }
            (_, None) => unreachable!("analytic variants have a centre"),
        };
        let (a, b, phidot) = phase_velocity(x, y, xdot, ydot);
        TrajectorySample {
            t,
            x,
            y,
            xdot,
            ydot,
            a,
            b,
            phidot,
        }
    }
}

/// Output grid `0, (j + ½)·t_end/n for j < n, t_end`.
///
/// Interior samples sit half a step off the uniform grid so that symmetric
/// loops never place one exactly on the branch cut.
pub fn sample_times<T: Real>(t_end: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    let dt = t_end / T::of(n as f64);
    let mut times = Vec::with_capacity(n + 2);
    times.push(T::zero());
    times.extend((0..n).map(|j| (T::of(j as f64) + T::half()) * dt));
    times.push(t_end);
    times
}

/// `max_t |Im φ̇| / max_t |φ̇|` over `samples` uniform times in one period.
///
/// Zero exactly when the loop keeps `φ̇` real. A stationary loop (or one
/// parked on the branch point, where `φ̇` is undefined) reports zero.
pub fn im_phidot_residual<T: Real>(spec: &TrajectorySpec<T>, samples: usize) -> Result<T> {
    spec.validate()?;
    if samples < 2 {
        return Err(invalid("residual needs at least 2 samples"));
    }
    let period = spec.period();
    let (mut num, mut den) = (T::zero(), T::zero());
    for j in 0..samples {
        let s = spec.sample(period * T::of(j as f64) / T::of(samples as f64));
        if !(s.phidot.re.is_finite() && s.phidot.im.is_finite()) {
            continue;
        }
        num = num.max(s.phidot.im.abs());
        den = den.max(s.phidot.norm());
    }
    if num == T::zero() || den == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / den)
}

/// Continuous `φ_r(t)` obtained by removing the π jumps of the principal branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnwrappedPhase<T> {
    pub times: Vec<T>,
    pub phi_r: Vec<T>,
    /// Times at which a cut crossing was detected (midpoint of the bracketing samples).
    pub crossings: Vec<T>,
    /// `φ_r(end) − φ_r(start)`; `−π` per counterclockwise turn around `(0, 1)`.
    pub delta_phi_r: T,
    /// Signed winding in radians, positive for counterclockwise loops (`−Δφ_r`).
    pub winding: T,
}

pub fn unwrap_phase<T: Real>(
    spec: &TrajectorySpec<T>,
    n_periods: usize,
    samples_per_period: usize,
) -> Result<UnwrappedPhase<T>> {
    spec.validate()?;
    if n_periods == 0 || samples_per_period < 2 {
        return Err(invalid(
            "unwrap_phase needs n_periods >= 1 and samples_per_period >= 2",
        ));
    }
    let t_end = spec.period() * T::of(n_periods as f64);
    let mut times = Vec::new();
    let mut principal = Vec::new();
    for t in sample_times(t_end, n_periods * samples_per_period) {
        let s = spec.sample(t);
        match phase_at(s.point()) {
            Ok(p) => {
                times.push(t);
                principal.push(p.phi_r);
            }
            // Only an endpoint can land on the cut; drop it.
            Err(Error::OnCut { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let (quarter, three_quarter) = (T::FRAC_PI_4(), T::of(3.0) * T::FRAC_PI_4());
    let mut phi_r = Vec::with_capacity(principal.len());
    let mut crossings = Vec::new();
    let mut offset = T::zero();
    for (j, &p) in principal.iter().enumerate() {
        if j > 0 {
            let jump = p - principal[j - 1];
            if jump.abs() >= three_quarter {
                offset = offset - (jump / T::PI()).round() * T::PI();
                crossings.push((times[j] + times[j - 1]) * T::half());
            } else if jump.abs() >= quarter {
                return Err(Error::Undersampled {
                    t: times[j].to_f64().unwrap_or(f64::NAN),
                    jump: jump.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        phi_r.push(p + offset);
    }
    let delta_phi_r = match (phi_r.first(), phi_r.last()) {
        (Some(&a), Some(&b)) => b - a,
        _ => T::zero(),
    };
    Ok(UnwrappedPhase {
        times,
        phi_r,
        crossings,
        delta_phi_r,
        winding: -delta_phi_r,
    })
}

/// A user-supplied `(t, x, y)` table with piecewise-cubic Hermite interpolation.
///
/// Slopes come from the three-point parabola through each node; tables whose
/// first and last points coincide are treated as periodic and wrap around.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PathTable<T>", try_from = "PathTable<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + serde::de::DeserializeOwned"
))]
pub struct CustomPath<T> {
    t: Vec<T>,
    x: Vec<T>,
    y: Vec<T>,
    slopes: Option<(Vec<T>, Vec<T>)>,
    closed: bool,
}

/// Serialized form of a [`CustomPath`]: the raw table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathTable<T> {
    pub t: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> From<CustomPath<T>> for PathTable<T> {
    fn from(p: CustomPath<T>) -> Self {
        Self {
            t: p.t,
            x: p.x,
            y: p.y,
        }
    }
}

impl<T: Real> TryFrom<PathTable<T>> for CustomPath<T> {
    type Error = Error;
    fn try_from(table: PathTable<T>) -> Result<Self> {
        CustomPath::new(table.t, table.x, table.y)
    }
}

impl<T: Real> CustomPath<T> {
    pub fn new(t: Vec<T>, x: Vec<T>, y: Vec<T>) -> Result<Self> {
        let n = t.len();
        if n < 3 || x.len() != n || y.len() != n {
            return Err(invalid(
                "custom path needs at least 3 rows of equal-length t, x, y",
            ));
        }
        if t.iter().chain(&x).chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("custom path"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("custom path times must be strictly increasing"));
        }
        let scale = x.iter().chain(&y).fold(T::one(), |m, v| m.max(v.abs()));
        let tol = T::of(1e-12) * scale;
        let closed = (x[0] - x[n - 1]).abs() <= tol && (y[0] - y[n - 1]).abs() <= tol;
        let mut path = Self {
            t,
            x,
            y,
            slopes: None,
            closed,
        };
        path.slopes = Some((path.node_slopes(&path.x), path.node_slopes(&path.y)));
        Ok(path)
    }

    /// Reads a CSV table with header `t,x,y`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t", "x", "y"] {
            return Err(invalid(format!(
                "custom trajectory header must be `t,x,y`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let (mut t, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<T> {
                record
                    .get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .and_then(T::from_f64)
                    .ok_or_else(|| {
                        invalid(format!("row {}: bad number in column {}", line + 2, i + 1))
                    })
            };
            t.push(field(0)?);
            x.push(field(1)?);
            y.push(field(2)?);
        }
        Self::new(t, x, y)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn period(&self) -> T {
        self.t[self.t.len() - 1] - self.t[0]
    }

    fn node_slopes(&self, v: &[T]) -> Vec<T> {
        let n = self.t.len();
        let h: Vec<T> = self.t.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<T> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / h[i]).collect();
        let interior = |hl: T, hr: T, dl: T, dr: T| (hr * dl + hl * dr) / (hl + hr);
        let mut m = vec![T::zero(); n];
        for i in 1..n - 1 {
            m[i] = interior(h[i - 1], h[i], d[i - 1], d[i]);
        }
        if self.closed {
            let wrap = interior(h[n - 2], h[0], d[n - 2], d[0]);
            m[0] = wrap;
            m[n - 1] = wrap;
        } else {
            m[0] = d[0] - h[0] * (d[1] - d[0]) / (h[0] + h[1]);
            m[n - 1] = d[n - 2] + h[n - 2] * (d[n - 2] - d[n - 3]) / (h[n - 3] + h[n - 2]);
        }
        m
    }

    /// `(x, y, ẋ, ẏ)` at time `t`; periodic tables wrap, open tables extrapolate
    /// with their end segments.
    pub fn eval(&self, t: T) -> (T, T, T, T) {
        let n = self.t.len();
        let (t0, tn) = (self.t[0], self.t[n - 1]);
        let t = if self.closed {
            let span = tn - t0;
            let u = (t - t0) % span;
            t0 + if u < T::zero() { u + span } else { u }
        } else {
            t
        };
        let i = self.t.partition_point(|&ti| ti <= t).clamp(1, n - 1) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (mx, my) = self
            .slopes
            .as_ref()
            .expect("slopes computed in constructor");
        let (x, xd) = hermite(s, h, self.x[i], self.x[i + 1], mx[i], mx[i + 1]);
        let (y, yd) = hermite(s, h, self.y[i], self.y[i + 1], my[i], my[i + 1]);
        (x, y, xd, yd)
    }
}

/// Cubic Hermite value and time derivative on one segment.
fn hermite<T: Real>(s: T, h: T, p0: T, p1: T, m0: T, m1: T) -> (T, T) {
    let (s2, s3) = (s * s, s * s * s);
    let (two, three) = (T::two(), T::of(3.0));
    let h00 = two * s3 - three * s2 + T::one();
    let h10 = s3 - two * s2 + s;
    let h01 = three * s2 - two * s3;
    let h11 = s3 - s2;
    let value = h00 * p0 + h10 * h * m0 + h01 * p1 + h11 * h * m1;
    let six = T::of(6.0);
    let d00 = six * s2 - six * s;
    let d10 = three * s2 - T::of(4.0) * s + T::one();
    let d01 = six * s - six * s2;
    let d11 = three * s2 - two * s;
    let deriv = (d00 * p0 + d01 * p1) / h + d10 * m0 + d11 * m1;
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn original_start_point() {
        let s = TrajectorySpec::original(1.5, PI / 10.0, PI).sample(0.0);
        assert!(s.x.abs() < 1e-15 && (s.y - 2.5).abs() < 1e-15);
    }

    #[test]
    fn modified_start_point_and_phidot() {
        let spec = TrajectorySpec::modified(1.5, PI / 10.0, PI);
        let s = spec.sample(0.0);
        let y0 = 3.25f64.sqrt() + 1.5;
        assert!(s.x.abs() < 1e-15 && (s.y - y0).abs() < 1e-14);
        // φ̇ = rω/(1 − y²) at x = 0 (b = 0, ẏ = 0, ẋ = −rω).
        let want = 1.5 * PI / 10.0 / (1.0 - y0 * y0);
        assert!((s.phidot.re - want).abs() < 1e-15, "{}", s.phidot);
        assert!(s.phidot.im.abs() < 1e-30);
        assert!((s.phidot.re + 0.047559886).abs() < 1e-8);
    }

    #[test]
    fn phidot_is_arccot_derivative() {
        let spec = TrajectorySpec::original(0.8, 0.7, 0.3);
        for t in [0.1, 1.3, 4.0] {
            let s = spec.sample(t);
            let z = Complex::new(s.x, s.y);
            let zdot = Complex::new(s.xdot, s.ydot);
            let want = -zdot / (Complex::new(1.0, 0.0) + z * z);
            assert!((s.phidot - want).norm() < 1e-14);
        }
    }

    #[test]
    fn residual_is_small_on_modified_and_order_one_on_original() {
        let m = im_phidot_residual(&TrajectorySpec::modified(1.5, PI / 10.0, PI), 10_000).unwrap();
        assert!(m < 1e-10, "{m}");
        let o = im_phidot_residual(&TrajectorySpec::original(0.5, PI / 10.0, PI), 10_000).unwrap();
        assert!(o > 0.1, "{o}");
        let still = im_phidot_residual(&TrajectorySpec::original(0.0, 1.0, PI), 100).unwrap();
        assert_eq!(still, 0.0);
        assert!(im_phidot_residual(&TrajectorySpec::modified(1.5, 1.0, PI), 1).is_err());
    }

    #[test]
    fn closed_loop() {
        for spec in [
            TrajectorySpec::original(1.5, PI, PI),
            TrajectorySpec::modified(0.5, -2.0, 0.4),
        ] {
            let (a, b) = (spec.sample(0.0), spec.sample(spec.period()));
            for (u, v) in [(a.x, b.x), (a.y, b.y), (a.xdot, b.xdot), (a.ydot, b.ydot)] {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(TrajectorySpec::original(1.0, 0.0, 0.0).validate().is_err());
        assert!(TrajectorySpec::original(-1.0, 1.0, 0.0).validate().is_err());
        assert!(TrajectorySpec::modified(1.0, 1.0, f64::NAN)
            .validate()
            .is_err());
        assert!(TrajectorySpec::modified(1.0, -1.0, 0.0).validate().is_ok());
    }

    #[test]
    fn sample_grid_shape() {
        let t = sample_times(2.0, 4);
        assert_eq!(t, vec![0.0, 0.25, 0.75, 1.25, 1.75, 2.0]);
    }

    #[test]
    fn unwrap_counts_half_turns() {
        let spec = TrajectorySpec::modified(1.5, PI / 10.0, PI);
        let one = unwrap_phase(&spec, 1, 10_000).unwrap();
        assert!((one.delta_phi_r.abs() - PI).abs() < 1e-6);
        assert_eq!(one.crossings.len(), 1);
        // counterclockwise ⇒ positive winding
        assert!(one.winding > 0.0);
        let two = unwrap_phase(&spec, 2, 10_000).unwrap();
        assert!((two.delta_phi_r.abs() - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn clockwise_loop_winds_negative() {
        let spec = TrajectorySpec::modified(1.5, -PI / 10.0, PI);
        let u = unwrap_phase(&spec, 1, 2_000).unwrap();
        assert!((u.winding + PI).abs() < 1e-6);
    }

    #[test]
    fn unwrap_flags_undersampling() {
        let spec = TrajectorySpec::modified(1.5, 1.0, PI);
        assert!(matches!(
            unwrap_phase(&spec, 1, 3),
            Err(Error::Undersampled { .. })
        ));
    }

    fn circle_table(cx: f64, cy: f64, rad: f64, n: usize) -> CustomPath<f64> {
        let (mut t, mut x, mut y) = (vec![], vec![], vec![]);
        for j in 0..=n {
            let th = 2.0 * PI * j as f64 / n as f64;
            t.push(j as f64 / n as f64 * 10.0);
            x.push(cx + rad * th.sin());
            y.push(cy - rad * th.cos());
        }
        // close exactly
        x[n] = x[0];
        y[n] = y[0];
        CustomPath::new(t, x, y).unwrap()
    }

    #[test]
    fn custom_loop_interpolates_circle() {
        let path = circle_table(0.0, 3.0, 0.1, 400);
        assert!(path.is_closed());
        let spec = TrajectorySpec::custom(path);
        assert!((spec.period() - 10.0).abs() < 1e-12);
        let w = 2.0 * PI / 10.0;
        for t in [0.013, 2.5, 7.77, 12.5] {
            let s = spec.sample(t);
            let th = w * t;
            assert!((s.x - 0.1 * th.sin()).abs() < 1e-8);
            assert!((s.y - (3.0 - 0.1 * th.cos())).abs() < 1e-8);
            assert!((s.xdot - 0.1 * w * th.cos()).abs() < 1e-5);
        }
        let u = unwrap_phase(&spec, 1, 1000).unwrap();
        assert!(u.delta_phi_r.abs() < 1e-12);
        assert!(u.crossings.is_empty());
    }

    #[test]
    fn custom_path_rejects_bad_tables() {
        assert!(CustomPath::new(vec![0.0, 1.0], vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(CustomPath::new(vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(
            CustomPath::new(vec![0.0, 1.0, 2.0], vec![0.0, f64::NAN, 0.0], vec![0.0; 3]).is_err()
        );
    }

    #[test]
    fn open_custom_path_is_exact_for_quadratics() {
        let t: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let x: Vec<f64> = t.iter().map(|t| t * t).collect();
        let y: Vec<f64> = t.iter().map(|t| 1.0 + 2.0 * t).collect();
        let p = CustomPath::new(t, x, y).unwrap();
        assert!(!p.is_closed());
        let (x, y, xd, yd) = p.eval(1.3);
        assert!((x - 1.69).abs() < 1e-12 && (y - 3.6).abs() < 1e-12);
        assert!((xd - 2.6).abs() < 1e-12 && (yd - 2.0).abs() < 1e-12);
    }
}
