//! Non-unitary propagation and biorthogonal fidelities.
//!
//! The state obeys `i dΨ/dt = H(t)Ψ` (ħ = 1) with `H = H₀` or `Hₘ = H₀ + H₁`
//! evaluated analytically along a trajectory. Fidelities are the squared
//! biorthogonal projections on the principal-branch eigenvectors of `H₀`,
//! normalized so that `F_− + F_+ = 1`; raw projections are kept alongside.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrator::{integrate, Stats, Tolerances};
use crate::linalg::{self, Operator2, Vector2};
use crate::model::{
    assemble, eigensystem_from_phase, phase_at, phase_at_one_sided, CdMode, ChartPoint,
    ControlScales, PhasePoint,
};
use crate::trajectory::{sample_times, TrajectorySample, TrajectorySpec};
use crate::Real;

/// Lower and upper bounds on the state norm during a run.
pub const NORM_BOUNDS: (f64, f64) = (1e-12, 1e12);

/// `|α|` below which the adiabaticity criterion is undefined.
pub const DEGENERACY_ALPHA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector<T> {
    pub amplitudes: Vector2<T>,
    pub t: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    #[default]
    H0,
    Hm,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState<T> {
    #[default]
    Minus,
    Plus,
    Custom(Vector2<T>),
}

impl<T: Real> std::str::FromStr for InitialState<T> {
    type Err = Error;

    /// `minus`, `plus`, or two comma-separated complex amplitudes such as `1,0.5+0.2i`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "minus" => Ok(InitialState::Minus),
            "plus" => Ok(InitialState::Plus),
            other => {
                let parts: Vec<&str> = other.split(',').map(str::trim).collect();
                let parse = |p: &str| {
                    p.parse::<Complex<f64>>()
                        .ok()
                        .filter(|z| z.re.is_finite() && z.im.is_finite())
                        .and_then(|z| Some(Complex::new(T::from_f64(z.re)?, T::from_f64(z.im)?)))
                };
                match parts.as_slice() {
                    [a, b] => match (parse(a), parse(b)) {
                        (Some(a), Some(b)) if a.norm() + b.norm() > T::zero() => {
                            Ok(InitialState::Custom([a, b]))
                        }
                        _ => Err(invalid(format!("bad initial amplitudes `{other}`"))),
                    },
                    _ => Err(invalid(format!(
                        "initial state must be minus, plus or `a,b`, got `{other}`"
                    ))),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + serde::de::DeserializeOwned"
))]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig<T> {
    pub trajectory: TrajectorySpec<T>,
    pub hamiltonian: HamiltonianKind,
    /// Used only with [`HamiltonianKind::Hm`].
    pub cd_mode: CdMode,
    pub initial: InitialState<T>,
    pub n_periods: T,
    pub rel_tol: T,
    pub abs_tol: T,
    /// Interior output samples per period.
    pub output_samples: usize,
    #[serde(default)]
    pub scales: ControlScales<T>,
    /// Overrides `n_periods × period` as the run length.
    #[serde(default)]
    pub duration: Option<T>,
}

impl<T: Real> EvolutionConfig<T> {
    pub fn new(trajectory: TrajectorySpec<T>, hamiltonian: HamiltonianKind) -> Self {
        Self {
            trajectory,
            hamiltonian,
            cd_mode: CdMode::Real,
            initial: InitialState::Minus,
            n_periods: T::one(),
            rel_tol: T::of(1e-10),
            abs_tol: T::of(1e-12),
            output_samples: 2000,
            scales: ControlScales::identity(),
            duration: None,
        }
    }

    pub fn with_initial(mut self, initial: InitialState<T>) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_cd_mode(mut self, mode: CdMode) -> Self {
        self.cd_mode = mode;
        self
    }

    pub fn with_periods(mut self, n: T) -> Self {
        self.n_periods = n;
        self
    }

    pub fn with_tolerances(mut self, rel: T, abs: T) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.output_samples = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.trajectory.validate()?;
        let (lo, hi) = (T::of(1e-14), T::of(1e-3));
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v >= lo && v <= hi) {
                return Err(invalid(format!("{name} must lie in [1e-14, 1e-3]")));
            }
        }
        if !(self.n_periods.is_finite() && self.n_periods > T::zero()) {
            return Err(invalid("n_periods must be positive"));
        }
        if let Some(d) = self.duration {
            if !(d.is_finite() && d > T::zero()) {
                return Err(invalid("duration must be positive"));
            }
        }
        if self.output_samples < 1 {
            return Err(invalid("output_samples must be at least 1"));
        }
        let s = &self.scales;
        if [s.k, s.kappa, s.epsilon, s.delta, s.omega_c]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("control scales"));
        }
        if let InitialState::Custom(v) = &self.initial {
            if !(linalg::norm(v).is_finite() && linalg::norm(v) > T::zero()) {
                return Err(invalid("custom initial state must be finite and nonzero"));
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> T {
        self.duration
            .unwrap_or_else(|| self.n_periods * self.trajectory.period())
    }

    /// Number of interior output samples over the whole run.
    pub fn interior_samples(&self) -> usize {
        let n = (self.n_periods * T::of(self.output_samples as f64)).ceil();
        n.to_usize().unwrap_or(1).max(1)
    }

    /// The generator at time `t`.
    ///
    /// Cut points (where `H₀` vanishes) are evaluated as the `x → 0⁺` limit so
    /// that an internal stage landing there is harmless.
    pub fn hamiltonian_at(&self, t: T) -> Result<Operator2<T>> {
        let s = self.trajectory.sample(t);
        let phase = phase_at_one_sided(s.point())?;
        Ok(self.hamiltonian_from(&phase, &s))
    }

    fn hamiltonian_from(&self, phase: &PhasePoint<T>, s: &TrajectorySample<T>) -> Operator2<T> {
        let coupling = match self.hamiltonian {
            HamiltonianKind::H0 => Complex::new(T::zero(), T::zero()),
            HamiltonianKind::Hm => self.cd_mode.coupling(s.phidot),
        };
        if self.scales.is_identity() && self.hamiltonian == HamiltonianKind::H0 {
            phase.h0()
        } else if self.scales.is_identity() {
            phase.h0() + Operator2::sigma_y().scaled(coupling * T::half())
        } else {
            assemble(phase, coupling, &self.scales)
        }
    }
}

/// Time-resolved fidelities of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelitySeries<T> {
    pub times: Vec<T>,
    pub f_minus: Vec<T>,
    pub f_plus: Vec<T>,
    pub raw_minus: Vec<T>,
    pub raw_plus: Vec<T>,
    pub state_norm: Vec<T>,
    /// `η(t) = |φ̇|/(4|α|)`; NaN where `|α|` vanishes. The oscillatory factor
    /// `exp(i∫ω₊₋)` is excluded (unit modulus on a real spectrum).
    pub eta: Vec<T>,
    /// Complex summand `⟨φ̂₊|∂tφ₋⟩/ω₊₋ = φ̇/(4α)` without the oscillatory factor.
    pub eta_summand: Vec<Complex<T>>,
    pub final_state: StateVector<T>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl<T: Real> FidelitySeries<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(f_minus, f_plus)` at the last sample.
    pub fn terminal(&self) -> (T, T) {
        let n = self.len() - 1;
        (self.f_minus[n], self.f_plus[n])
    }
}

/// Integrates the configured run and samples fidelities on the output grid.
pub fn propagate<T: Real>(config: &EvolutionConfig<T>) -> Result<FidelitySeries<T>> {
    config.validate()?;
    let to_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
    let t_end = config.duration();
    let times = sample_times(t_end, config.interior_samples());

    let start = config.trajectory.sample(T::zero());
    let basis0 = eigensystem_from_phase(&phase_at(start.point())?);
    let psi0 = match &config.initial {
        InitialState::Minus => basis0.right_minus,
        InitialState::Plus => basis0.right_plus,
        InitialState::Custom(v) => *v,
    };

    let minus_i = Complex::new(T::zero(), -T::one());
    let generator = |t: T, psi: &Vector2<T>| -> Vector2<T> {
        let s = config.trajectory.sample(t);
        // Only the branch point (0, ±1) fails here, which a loop cannot visit
        // without a singular φ̇; propagate NaN so the step is rejected.
        match phase_at_one_sided(s.point()) {
            Ok(phase) => {
                let hv = config.hamiltonian_from(&phase, &s).apply(psi);
                [hv[0] * minus_i, hv[1] * minus_i]
            }
            Err(_) => [Complex::new(T::nan(), T::nan()); 2],
        }
    };
    let (lo, hi) = (T::of(NORM_BOUNDS.0), T::of(NORM_BOUNDS.1));
    let guard = |t: T, psi: &Vector2<T>| {
        let n = linalg::norm(psi);
        if n >= lo && n <= hi {
            Ok(())
        } else {
            Err(Error::NormOutOfRange {
                t: to_f64(t),
                norm: to_f64(n),
            })
        }
    };
    let tol = Tolerances::new(config.rel_tol, config.abs_tol);
    let (states, stats): (Vec<Vector2<T>>, Stats) =
        integrate(generator, T::zero(), psi0, t_end, &times, &tol, guard)?;

    let n = times.len();
    let mut series = FidelitySeries {
        times: Vec::with_capacity(n),
        f_minus: Vec::with_capacity(n),
        f_plus: Vec::with_capacity(n),
        raw_minus: Vec::with_capacity(n),
        raw_plus: Vec::with_capacity(n),
        state_norm: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        eta_summand: Vec::with_capacity(n),
        final_state: StateVector {
            amplitudes: states[n - 1],
            t: t_end,
        },
        steps_accepted: stats.accepted,
        steps_rejected: stats.rejected,
    };
    for (&t, psi) in times.iter().zip(&states) {
        let s = config.trajectory.sample(t);
        let phase = phase_at(s.point()).map_err(|e| match e {
            Error::OnCut { .. } => Error::OnCutSample { t: to_f64(t) },
            other => other,
        })?;
        let proj = eigensystem_from_phase(&phase).project(psi);
        let (rm, rp) = (proj.minus.norm_sqr(), proj.plus.norm_sqr());
        let total = rm + rp;
        series.times.push(t);
        series.raw_minus.push(rm);
        series.raw_plus.push(rp);
        series.f_minus.push(rm / total);
        series.f_plus.push(rp / total);
        series.state_norm.push(linalg::norm(psi));
        series
            .eta
            .push(criterion_eta(&s, &phase).unwrap_or_else(|_| T::nan()));
        series
            .eta_summand
            .push(if phase.alpha.abs() < T::of(DEGENERACY_ALPHA) {
                Complex::new(T::nan(), T::nan())
            } else {
                s.phidot / (T::of(4.0) * phase.alpha)
            });
    }
    Ok(series)
}

/// Coefficients of a state in the instantaneous adiabatic frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdiabaticCoefficients<T> {
    pub plus: Complex<T>,
    pub minus: Complex<T>,
}

/// `R̃†(t)Ψ` with `R̃† = [[cos(φ/2), sin(φ/2)], [−sin(φ/2), cos(φ/2)]]`.
pub fn adiabatic_frame<T: Real>(
    state: &StateVector<T>,
    p: ChartPoint<T>,
) -> Result<AdiabaticCoefficients<T>> {
    let half = phase_at(p)?.phi() * T::half();
    let (s, c) = (half.sin(), half.cos());
    let r_dag = Operator2::new(c, s, -s, c);
    let v = r_dag.apply(&state.amplitudes);
    Ok(AdiabaticCoefficients {
        plus: v[0],
        minus: v[1],
    })
}

/// Adiabaticity measure `η = |⟨φ̂₊|∂tφ₋⟩| / |ω₊₋| = |φ̇| / (4|α|)`.
pub fn criterion_eta<T: Real>(sample: &TrajectorySample<T>, phase: &PhasePoint<T>) -> Result<T> {
    let alpha = phase.alpha.abs();
    if alpha < T::of(DEGENERACY_ALPHA) {
        return Err(Error::AtDegeneracy {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(sample.phidot.norm() / (T::of(4.0) * alpha))
}
