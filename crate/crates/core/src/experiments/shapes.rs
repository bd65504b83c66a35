//! Time profiles of the physical control parameters along a trajectory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::{fmt_f64, write_table};
use crate::error::invalid;
use crate::model::phase_at;
use crate::trajectory::{sample_times, TrajectorySpec};
use crate::{Error, Result};

pub const SHAPES_HEADER: [&str; 6] = ["t", "k", "kappa", "epsilon", "delta", "omega_c"];

/// Largest tolerated `|Im φ̇|/|φ̇|` for the coupling to count as real.
pub const REAL_OMEGA_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub t: f64,
    pub k: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// `Ω = Re φ̇ / 2`.
    pub omega_c: f64,
}

/// `k, κ, ε, Δ, Ω` over one period, on the standard half-offset grid with
/// `samples` interior points.
pub fn shapes(traj: &TrajectorySpec<f64>, samples: usize) -> Result<Vec<ShapeRow>> {
    traj.validate()?;
    if samples == 0 {
        return Err(invalid("shapes needs at least one interior sample"));
    }
    sample_times(traj.period(), samples)
        .into_iter()
        .map(|t| {
            let s = traj.sample(t);
            let mag = s.phidot.norm();
            let ratio = if mag > 0.0 {
                s.phidot.im.abs() / mag
            } else {
                0.0
            };
            if ratio.is_nan() || ratio > REAL_OMEGA_TOL {
                return Err(Error::NonRealOmega { t, ratio });
            }
            let p = phase_at(s.point())?;
            Ok(ShapeRow {
                t,
                k: p.k,
                kappa: p.kappa,
                epsilon: p.epsilon,
                delta: p.delta,
                omega_c: 0.5 * s.phidot.re,
            })
        })
        .collect()
}

pub fn write_shapes_csv(path: &Path, rows: &[ShapeRow]) -> Result<()> {
    write_table(
        path,
        &SHAPES_HEADER,
        rows.iter().map(|r| {
            [r.t, r.k, r.kappa, r.epsilon, r.delta, r.omega_c]
                .into_iter()
                .map(fmt_f64)
                .collect()
        }),
    )
}
