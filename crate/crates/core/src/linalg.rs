//! Two-dimensional complex linear algebra.
//!
//! Everything here is closed form: the operators are 2×2, so eigenvalues,
//! inverses and exponentials never need an iterative solver.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::Real;

/// A two-component complex column vector.
pub type Vector2<T> = [Complex<T>; 2];

/// Bilinear product `Σ uᵢ vᵢ` (no conjugation).
#[inline]
pub fn dot<T: Real>(u: &Vector2<T>, v: &Vector2<T>) -> Complex<T> {
    u[0] * v[0] + u[1] * v[1]
}

/// Hermitian inner product `⟨u|v⟩ = Σ conj(uᵢ) vᵢ`.
#[inline]
pub fn inner<T: Real>(u: &Vector2<T>, v: &Vector2<T>) -> Complex<T> {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

#[inline]
pub fn norm<T: Real>(v: &Vector2<T>) -> T {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

#[inline]
pub fn scale<T: Real>(v: &Vector2<T>, s: Complex<T>) -> Vector2<T> {
    [v[0] * s, v[1] * s]
}

#[inline]
pub fn conj<T: Real>(v: &Vector2<T>) -> Vector2<T> {
    [v[0].conj(), v[1].conj()]
}

/// A 2×2 complex operator, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operator2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Operator2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self {
            m: [[a, b], [c, d]],
        }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new(o, z, z, o)
    }

    pub fn sigma_x() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new(z, o, o, z)
    }

    pub fn sigma_y() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        Self::new(z, -i, i, z)
    }

    pub fn sigma_z() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new(o, z, z, -o)
    }

    /// Outer product `|u⟩⟨w|`, where `w` is given as a ket (it is conjugated).
    pub fn outer(u: &Vector2<T>, w: &Vector2<T>) -> Self {
        Self::new(
            u[0] * w[0].conj(),
            u[0] * w[1].conj(),
            u[1] * w[0].conj(),
            u[1] * w[1].conj(),
        )
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn apply(&self, v: &Vector2<T>) -> Vector2<T> {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(
            m[0][0].conj(),
            m[1][0].conj(),
            m[0][1].conj(),
            m[1][1].conj(),
        )
    }

    pub fn frobenius_norm(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Matrix exponential `exp(M)`.
    ///
    /// Writes `M = μ·1 + K` with `K` traceless, so `K² = q·1` with `q = −det K`
    /// and `exp(M) = e^μ (cosh s · 1 + sinh(s)/s · K)` for `s² = q`. Both
    /// `cosh s` and `sinh(s)/s` are even in `s`, so the square-root branch is
    /// irrelevant and the formula stays valid at `q = 0` (defective `K`).
    pub fn exp(&self) -> Self {
        let two = Complex::new(T::two(), T::zero());
        let mu = self.trace() / two;
        let k = *self - Self::identity().scaled(mu);
        let q = -k.det();
        let s = q.sqrt();
        let ch = s.cosh();
        let sh = sinhc(s, q);
        let e = mu.exp();
        (Self::identity().scaled(ch) + k.scaled(sh)).scaled(e)
    }

    /// Propagator `exp(−i·H·dt)` of the constant generator `self` (ħ = 1).
    pub fn propagator(&self, dt: T) -> Self {
        self.scaled(Complex::new(T::zero(), -dt)).exp()
    }
}

/// `sinh(s)/s` given `s` and `q = s²`, with a series near zero.
fn sinhc<T: Real>(s: Complex<T>, q: Complex<T>) -> Complex<T> {
    if q.norm() < T::of(1e-4) {
        // 1 + q/6 + q²/120 + q³/5040; truncation below 1e-16 for |q| < 1e-4.
        let one = Complex::new(T::one(), T::zero());
        one + q / T::of(6.0) + q * q / T::of(120.0) + q * q * q / T::of(5040.0)
    } else {
        s.sinh() / s
    }
}

impl<T: Real> Add for Operator2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl<T: Real> Sub for Operator2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for Operator2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let m = &self.m;
        Self::new(-m[0][0], -m[0][1], -m[1][0], -m[1][1])
    }
}

impl<T: Real> Mul for Operator2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
