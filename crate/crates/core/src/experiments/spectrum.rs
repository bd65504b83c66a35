//! Eigenvalue surfaces of `H₀` and `Hₘ` over a rectangle of the chart.

use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{fmt_f64, fmt_opt, write_table};
use crate::error::invalid;
use crate::model::{eigenvalues, phase_at, CdMode, ChartPoint, PhasePoint};
use crate::trajectory::{phase_velocity, sample_times, TrajectorySpec, Variant};
use crate::{Error, Result, C64};

pub const GRID_HEADER: [&str; 8] = [
    "x",
    "y",
    "re_e_minus",
    "im_e_minus",
    "re_e_plus",
    "im_e_plus",
    "gap",
    "omega_c",
];
pub const OVERLAY_HEADER: [&str; 9] = [
    "t",
    "x",
    "y",
    "re_e_minus",
    "im_e_minus",
    "re_e_plus",
    "im_e_plus",
    "gap",
    "omega_c",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    #[default]
    H0,
    Hm,
}

impl std::str::FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h0" => Ok(Which::H0),
            "hm" => Ok(Which::Hm),
            other => Err(invalid(format!(
                "spectrum operator must be h0 or hm, got `{other}`"
            ))),
        }
    }
}

/// A `res × res` lattice of cell centres over `x_range × y_range`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub res: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_range: (-2.0, 2.0),
            y_range: (-0.5, 4.0),
            res: 201,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("x_range", self.x_range), ("y_range", self.y_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!(
                    "{name} must be a finite interval with lo < hi"
                )));
            }
        }
        if self.res == 0 {
            return Err(invalid("res must be positive"));
        }
        Ok(())
    }

    fn centre(range: (f64, f64), res: usize, i: usize) -> f64 {
        range.0 + (i as f64 + 0.5) * (range.1 - range.0) / res as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        Self::centre(self.x_range, self.res, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        Self::centre(self.y_range, self.res, j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCell {
    pub x: f64,
    pub y: f64,
    pub e_minus: C64,
    pub e_plus: C64,
    /// `|E₊ − E₋|`.
    pub gap: f64,
    /// Counter-diabatic coupling `Ω` used at this point (`Hₘ` only).
    pub omega_c: Option<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayPoint {
    pub t: f64,
    pub cell: SpectrumCell,
}

/// Cells are stored row by row: `y` outer, `x` inner. Missing cells are
/// those on the branch cut or, for `Hₘ`, outside the trajectory family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub grid: GridSpec,
    pub which: Which,
    pub cells: Vec<Option<SpectrumCell>>,
    pub overlay: Vec<OverlayPoint>,
}

impl SpectrumGrid {
    pub fn cell(&self, i: usize, j: usize) -> Option<&SpectrumCell> {
        self.cells[j * self.grid.res + i].as_ref()
    }

    pub fn present(&self) -> impl Iterator<Item = &SpectrumCell> {
        self.cells.iter().flatten()
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.present().map(|c| c.gap).reduce(f64::min)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let res = self.grid.res;
        let rows = self.cells.iter().enumerate().map(|(n, c)| match c {
            Some(c) => cell_fields(c),
            None => {
                let (x, y) = (self.grid.x(n % res), self.grid.y(n / res));
                let mut row = vec![fmt_f64(x), fmt_f64(y)];
                row.resize(GRID_HEADER.len(), String::new());
                row
            }
        });
        write_table(path, &GRID_HEADER, rows)
    }

    pub fn write_overlay_csv(&self, path: &Path) -> Result<()> {
        let rows = self.overlay.iter().map(|p| {
            let mut row = vec![fmt_f64(p.t)];
            row.extend(cell_fields(&p.cell));
            row
        });
        write_table(path, &OVERLAY_HEADER, rows)
    }
}

fn cell_fields(c: &SpectrumCell) -> Vec<String> {
    vec![
        fmt_f64(c.x),
        fmt_f64(c.y),
        fmt_f64(c.e_minus.re),
        fmt_f64(c.e_minus.im),
        fmt_f64(c.e_plus.re),
        fmt_f64(c.e_plus.im),
        fmt_f64(c.gap),
        fmt_opt(c.omega_c.map(|w| w.re)),
    ]
}

/// `φ̇` at `(x, y)` from the member of the trajectory's loop family (same `ω`,
/// variant and centre rule, free radius) passing through that point.
///
/// Original loops share the centre `(0, 1)`; modified loops through `(x, y)`
/// have centre `(0, c)` with `c = (1 + x² + y²)/(2y)`, so only `y > 0` is
/// reachable.
pub fn family_phidot(traj: &TrajectorySpec<f64>, x: f64, y: f64) -> Result<Option<C64>> {
    let c = match &traj.variant {
        Variant::Original => 1.0,
        Variant::Modified => {
            if y <= 0.0 {
                return Ok(None);
            }
            (1.0 + x * x + y * y) / (2.0 * y)
        }
        Variant::Custom(_) => {
            return Err(invalid(
                "hm spectra need an original or modified trajectory family",
            ))
        }
    };
    let (xdot, ydot) = (traj.omega * (c - y), traj.omega * x);
    Ok(Some(phase_velocity(x, y, xdot, ydot).2))
}

fn evaluate(
    phase: &PhasePoint<f64>,
    x: f64,
    y: f64,
    which: Which,
    phidot: Option<C64>,
    mode: CdMode,
) -> SpectrumCell {
    match which {
        Which::H0 => {
            let a = Complex::new(phase.alpha, 0.0);
            SpectrumCell {
                x,
                y,
                e_minus: -a,
                e_plus: a,
                gap: 2.0 * phase.alpha.abs(),
                omega_c: None,
            }
        }
        Which::Hm => {
            let coupling = mode.coupling(phidot.unwrap_or_default());
            let omega = coupling * 0.5;
            let h = phase.h0() + crate::linalg::Operator2::sigma_y().scaled(omega);
            let (e_minus, e_plus) = eigenvalues(&h);
            SpectrumCell {
                x,
                y,
                e_minus,
                e_plus,
                gap: (e_plus - e_minus).norm(),
                omega_c: Some(omega),
            }
        }
    }
}

/// Samples the spectrum of `which` on `grid`, plus its value along `traj`.
///
/// `H₀` uses the principal labels `E∓ = ∓α`; `Hₘ` orders by real part. The
/// overlay uses `overlay_samples` interior points per period of `traj`.
pub fn spectrum_surface(
    grid: &GridSpec,
    which: Which,
    traj: Option<&TrajectorySpec<f64>>,
    mode: CdMode,
    overlay_samples: usize,
) -> Result<SpectrumGrid> {
    grid.validate()?;
    if let Some(t) = traj {
        t.validate()?;
    }
    let family = match (which, traj) {
        (Which::Hm, None) => return Err(invalid("hm spectrum needs a trajectory for phidot")),
        (Which::Hm, Some(t)) => {
            family_phidot(t, 1.0, 1.0)?;
            Some(t)
        }
        (Which::H0, _) => None,
    };

    let res = grid.res;
    let cells = (0..res * res)
        .into_par_iter()
        .map(|n| -> Result<Option<SpectrumCell>> {
            let (x, y) = (grid.x(n % res), grid.y(n / res));
            let p = ChartPoint::new(x, y)?;
            if p.on_cut() {
                return Ok(None);
            }
            let phidot = match family {
                Some(t) => match family_phidot(t, x, y)? {
                    Some(v) if v.re.is_finite() && v.im.is_finite() => Some(v),
                    _ => return Ok(None),
                },
                None => None,
            };
            Ok(Some(evaluate(&phase_at(p)?, x, y, which, phidot, mode)))
        })
        .collect::<Result<Vec<_>>>()?;

    let overlay = match traj {
        Some(t) if overlay_samples > 0 => sample_times(t.period(), overlay_samples)
            .into_iter()
            .map(|time| {
                let s = t.sample(time);
                let phase = phase_at(s.point())?;
                Ok(OverlayPoint {
                    t: time,
                    cell: evaluate(&phase, s.x, s.y, which, Some(s.phidot), mode),
                })
            })
            .collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    Ok(SpectrumGrid {
        grid: *grid,
        which,
        cells,
        overlay,
    })
}
