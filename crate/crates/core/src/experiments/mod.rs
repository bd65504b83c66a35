//! Figure-reproduction pipelines: spectrum surfaces, control shapes,
//! transfer runs and sensitivity sweeps, with their file formats.

pub mod io;
pub mod shapes;
pub mod spectrum;
pub mod sweep;
pub mod transfer;

pub use io::{Manifest, SeriesDocument};
pub use shapes::{shapes, ShapeRow};
pub use spectrum::{spectrum_surface, GridSpec, SpectrumCell, SpectrumGrid, Which};
pub use sweep::{sensitivity_sweep, Axis, SweepGrid, SweepSpec};
pub use transfer::{
    conventional_cases, shortcut_cases, transfer_experiment, TransferCase, TransferRun,
};
