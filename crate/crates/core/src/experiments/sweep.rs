//! Terminal-fidelity maps under static multiplicative miscalibration.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{fmt_f64, fmt_opt, write_table};
use crate::error::invalid;
use crate::evolution::{propagate, EvolutionConfig, HamiltonianKind, InitialState};
use crate::model::{CdMode, ControlScales};
use crate::trajectory::TrajectorySpec;
use crate::{Error, Result};

/// A quantity that can be miscalibrated.
///
/// `R` and `Omega` act on the trajectory; the rest scale one term of `Hₘ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    R,
    Omega,
    K,
    Kappa,
    #[serde(rename = "eps")]
    Epsilon,
    Delta,
    OmegaC,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Axis::R,
        Axis::Omega,
        Axis::K,
        Axis::Kappa,
        Axis::Epsilon,
        Axis::Delta,
        Axis::OmegaC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::R => "r",
            Axis::Omega => "omega",
            Axis::K => "k",
            Axis::Kappa => "kappa",
            Axis::Epsilon => "eps",
            Axis::Delta => "delta",
            Axis::OmegaC => "omega_c",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                invalid(format!(
                    "unknown sweep axis `{s}` (r, omega, k, kappa, eps, delta, omega_c)"
                ))
            })
    }
}

fn default_rel_tol() -> f64 {
    1e-10
}

fn default_abs_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub r: f64,
    pub omega: f64,
    pub phi0: f64,
    pub axes: (Axis, Axis),
    /// Largest relative deviation; axis values span `[−range, range]`.
    pub range: f64,
    /// Points per axis, odd so the centre is the unperturbed run.
    pub res: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            r: 1.5,
            omega: 100.0 * PI,
            phi0: PI,
            axes: (Axis::K, Axis::OmegaC),
            range: 0.1,
            res: 41,
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base_trajectory().validate()?;
        if self.axes.0 == self.axes.1 {
            return Err(invalid("sweep axes must differ"));
        }
        if !(self.range.is_finite() && (0.0..1.0).contains(&self.range)) {
            return Err(invalid("range must lie in [0, 1)"));
        }
        if self.res % 2 == 0 {
            return Err(invalid(format!("res must be odd, got {}", self.res)));
        }
        self.cell_config(0.0, 0.0).validate()
    }

    pub fn base_trajectory(&self) -> TrajectorySpec<f64> {
        TrajectorySpec::modified(self.r, self.omega, self.phi0)
    }

    /// Relative deviations along one axis, symmetric with an exact zero centre.
    pub fn values(&self) -> Vec<f64> {
        if self.res == 1 {
            return vec![0.0];
        }
        let m = (self.res - 1) as f64;
        (0..self.res)
            .map(|i| self.range * (2.0 * i as f64 - m) / m)
            .collect()
    }

    /// The run for deviations `(da, db)` on `(axes.0, axes.1)`.
    ///
    /// Deviating `ω` keeps the nominal run length `2π/ω`.
    pub fn cell_config(&self, da: f64, db: f64) -> EvolutionConfig<f64> {
        let nominal = self.base_trajectory();
        let mut traj = nominal.clone();
        let mut scales = ControlScales::identity();
        for (axis, d) in [(self.axes.0, da), (self.axes.1, db)] {
            let f = 1.0 + d;
            match axis {
                Axis::R => traj.r *= f,
                Axis::Omega => traj.omega *= f,
                Axis::K => scales.k *= f,
                Axis::Kappa => scales.kappa *= f,
                Axis::Epsilon => scales.epsilon *= f,
                Axis::Delta => scales.delta *= f,
                Axis::OmegaC => scales.omega_c *= f,
            }
        }
        let mut cfg = EvolutionConfig::new(traj, HamiltonianKind::Hm)
            .with_cd_mode(CdMode::Real)
            .with_initial(InitialState::Minus)
            .with_tolerances(self.rel_tol, self.abs_tol)
            .with_samples(4);
        cfg.scales = scales;
        cfg.duration = Some(nominal.period());
        cfg
    }
}

/// `f_plus(T)` per cell, row-major with the first axis outer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    pub values: Vec<f64>,
    pub cells: Vec<Option<f64>>,
}

impl SweepGrid {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.cells[i * self.values.len() + j]
    }

    pub fn centre(&self) -> Option<f64> {
        let c = self.values.len() / 2;
        self.get(c, c)
    }

    pub fn present(&self) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().flatten().copied()
    }

    pub fn missing(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn min(&self) -> Option<f64> {
        self.present().reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.present().reduce(f64::max)
    }

    pub fn spread(&self) -> Option<f64> {
        Some(self.max()? - self.min()?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let (a, b) = self.spec.axes;
        let header = [a.name(), b.name(), "f_plus"];
        let n = self.values.len();
        let rows = self.cells.iter().enumerate().map(|(idx, f)| {
            vec![
                fmt_f64(self.values[idx / n]),
                fmt_f64(self.values[idx % n]),
                fmt_opt(*f),
            ]
        });
        write_table(path, &header, rows)
    }
}

fn run_cell(spec: &SweepSpec, da: f64, db: f64) -> Option<f64> {
    let series = propagate(&spec.cell_config(da, db)).ok()?;
    let f = series.terminal().1;
    f.is_finite().then_some(f)
}

/// Evaluates every cell on a pool of `jobs` workers (`0` = all cores).
///
/// Failed cells are recorded as missing. The result does not depend on `jobs`.
pub fn sensitivity_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepGrid> {
    spec.validate()?;
    let values = spec.values();
    let n = values.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    let cells = pool.install(|| {
        (0..n * n)
            .into_par_iter()
            .map(|idx| run_cell(spec, values[idx / n], values[idx % n]))
            .collect()
    });
    Ok(SweepGrid {
        spec: spec.clone(),
        values,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names_round_trip() {
        for a in Axis::ALL {
            assert_eq!(a.name().parse::<Axis>().unwrap(), a);
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                format!("\"{}\"", a.name())
            );
        }
        assert!("Omega".parse::<Axis>().is_err());
    }

    #[test]
    fn values_are_symmetric_with_exact_centre() {
        let spec = SweepSpec {
            res: 41,
            range: 0.05,
            ..SweepSpec::default()
        };
        let v = spec.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[20], 0.0);
        assert_eq!(v[0], -0.05);
        assert_eq!(v[40], 0.05);
        for i in 0..41 {
            assert_eq!(v[i], -v[40 - i]);
        }
    }

    #[test]
    fn even_resolution_and_repeated_axes_are_rejected() {
        assert!(SweepSpec {
            res: 4,
            ..SweepSpec::default()
        }
        .validate()
        .unwrap_err()
        .is_config());
        let same = SweepSpec {
            axes: (Axis::K, Axis::K),
            ..SweepSpec::default()
        };
        assert!(same.validate().is_err());
    }

    #[test]
    fn omega_deviation_keeps_nominal_duration() {
        let spec = SweepSpec {
            axes: (Axis::R, Axis::Omega),
            ..SweepSpec::default()
        };
        let cfg = spec.cell_config(0.0, 0.05);
        assert_eq!(cfg.duration, Some(2.0 * PI / spec.omega));
        assert!((cfg.trajectory.omega - 1.05 * spec.omega).abs() < 1e-12);
    }
}
