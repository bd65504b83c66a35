//! Conventional and shortcut state-transfer runs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{write_json, write_series_csv, SeriesDocument};
use crate::evolution::{propagate, EvolutionConfig, FidelitySeries, HamiltonianKind, InitialState};
use crate::model::CdMode;
use crate::trajectory::TrajectorySpec;
use crate::Result;

/// A labelled configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferCase {
    pub label: String,
    pub config: EvolutionConfig<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRun {
    pub label: String,
    pub config: EvolutionConfig<f64>,
    pub series: FidelitySeries<f64>,
}

/// Bare `H₀` on the original loop from `|φ₋(0)⟩`, `φ₀ = π`.
pub fn conventional_cases() -> Vec<TransferCase> {
    [
        ("conventional_r0.5_w0.01pi", 0.5, PI / 100.0),
        ("conventional_r0.5_w0.1pi", 0.5, PI / 10.0),
        ("conventional_r1.5_w0.1pi", 1.5, PI / 10.0),
        ("conventional_r1.5_w1pi", 1.5, PI),
    ]
    .into_iter()
    .map(|(label, r, omega)| TransferCase {
        label: label.to_owned(),
        config: EvolutionConfig::new(TrajectorySpec::original(r, omega, PI), HamiltonianKind::H0),
    })
    .collect()
}

/// `Hₘ` with the real-part coupling on the modified loop, both initial states.
pub fn shortcut_cases() -> Vec<TransferCase> {
    let mut out = Vec::new();
    for (tag, r, omega) in [("r0.5_w0.1pi", 0.5, PI / 10.0), ("r1.5_w1pi", 1.5, PI)] {
        for (init_tag, init) in [("minus", InitialState::Minus), ("plus", InitialState::Plus)] {
            out.push(TransferCase {
                label: format!("shortcut_{tag}_{init_tag}"),
                config: EvolutionConfig::new(
                    TrajectorySpec::modified(r, omega, PI),
                    HamiltonianKind::Hm,
                )
                .with_cd_mode(CdMode::Real)
                .with_initial(init),
            });
        }
    }
    out
}

/// Runs every case in parallel; results keep the input order.
pub fn transfer_experiment(cases: &[TransferCase]) -> Result<Vec<TransferRun>> {
    cases
        .par_iter()
        .map(|c| {
            Ok(TransferRun {
                label: c.label.clone(),
                config: c.config.clone(),
                series: propagate(&c.config)?,
            })
        })
        .collect()
}

/// Writes `<label>.csv` and `<label>.json` into `dir` for every run.
pub fn persist_runs(dir: &Path, runs: &[TransferRun]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(2 * runs.len());
    for run in runs {
        let csv = dir.join(format!("{}.csv", run.label));
        let json = dir.join(format!("{}.json", run.label));
        write_series_csv(&csv, &run.series)?;
        write_json(&json, &SeriesDocument::new(&run.config, &run.series))?;
        files.push(csv);
        files.push(json);
    }
    Ok(files)
}
