use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nhsta::evolution::InitialState;
use nhsta::experiments::{Axis, Which};
use nhsta::model::CdMode;
use serde::{Deserialize, Serialize};

/// Shortcut-to-adiabaticity state transfer in two-level non-Hermitian systems.
///
/// Units: hbar = 1; times and inverse frequencies in arbitrary units; angles
/// in radians. Angles and frequencies accept expressions such as `pi/10`,
/// `100pi` or `-0.5*pi`. Each command prints its resolved configuration as
/// JSON on stdout, progress on stderr, and writes data plus a
/// `<out>.manifest.json` file. Exit codes: 0 success, 2 configuration error,
/// 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "nhsta", version, about, long_about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue surfaces of H0 or Hm over a chart rectangle.
    Spectrum(SpectrumArgs),
    /// Propagate one state along a loop and record fidelities.
    Evolve(EvolveArgs),
    /// Terminal-fidelity map under static miscalibration of two quantities.
    Sweep(SweepArgs),
    /// Time profiles of k, kappa, epsilon, Delta and Omega along a loop.
    Shapes(ShapesArgs),
    /// Run the conventional and shortcut transfer sets.
    Transfer(TransferArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopKind {
    Original,
    Modified,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamiltonianArg {
    H0,
    Hm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseSet {
    Conventional,
    Shortcut,
    All,
}

/// Loop selection shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct LoopArgs {
    /// Loop family
    #[arg(long, value_enum)]
    pub trajectory: Option<LoopKind>,
    /// CSV table with header `t,x,y` for `--trajectory custom` (times in time units)
    #[arg(long, value_name = "FILE")]
    pub path: Option<PathBuf>,
    /// Loop radius in the (x, y) chart, dimensionless
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Angular frequency of the loop, rad per time unit, nonzero
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Initial loop phase, rad [default: pi]
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
}

impl LoopArgs {
    pub fn any(&self) -> bool {
        self.trajectory.is_some()
            || self.path.is_some()
            || self.r.is_some()
            || self.omega.is_some()
            || self.phi0.is_some()
    }
}

#[derive(Debug, Args)]
#[command(
    after_help = "Loop: none by default. For hm, or to add the overlay curve, pass --r and --omega; the loop is modified with phi0 = pi unless --trajectory or --phi0 say otherwise. The hm coupling at each cell comes from the loop of the same family and omega through that cell."
)]
pub struct SpectrumArgs {
    /// JSON or TOML configuration, or a manifest from an earlier run
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Operator whose eigenvalues are sampled [default: h0]
    #[arg(long, value_parser = parse_which)]
    pub which: Option<Which>,
    #[command(flatten)]
    pub traj: LoopArgs,
    /// Counter-diabatic coupling for hm: none, real or full [default: real]
    #[arg(long, value_parser = parse_cd)]
    pub cd: Option<CdMode>,
    /// x interval `lo,hi`, dimensionless [default: -2,2]
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub xrange: Option<(f64, f64)>,
    /// y interval `lo,hi`, dimensionless [default: -0.5,4]
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub yrange: Option<(f64, f64)>,
    /// Cells per axis; output has res x res rows [default: 201]
    #[arg(long)]
    pub res: Option<usize>,
    /// Interior overlay samples per loop period [default: 2000]
    #[arg(long)]
    pub overlay_samples: Option<usize>,
    /// Grid CSV; overlay and manifest are written beside it
    #[arg(long, default_value = "spectrum.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(after_help = "Loop defaults: modified, r = 0.5, omega = pi/10, phi0 = pi.")]
pub struct EvolveArgs {
    /// JSON or TOML configuration, or a manifest from an earlier run
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub traj: LoopArgs,
    /// Generator: bare h0 or h0 plus counter-diabatic term [default: hm]
    #[arg(long, value_enum)]
    pub hamiltonian: Option<HamiltonianArg>,
    /// Counter-diabatic coupling: none, real or full [default: real]
    #[arg(long, value_parser = parse_cd)]
    pub cd: Option<CdMode>,
    /// Initial state: minus, plus or amplitudes `a,b` such as `1,0.5+0.2i` [default: minus]
    #[arg(long, value_parser = parse_init, allow_hyphen_values = true)]
    pub init: Option<InitialState<f64>>,
    /// Run length in loop periods [default: 1]
    #[arg(long, value_parser = parse_real)]
    pub periods: Option<f64>,
    /// Interior output samples per period [default: 2000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative integrator tolerance, in [1e-14, 1e-3] [default: 1e-10]
    #[arg(long, value_parser = parse_real)]
    pub rtol: Option<f64>,
    /// Absolute integrator tolerance, in [1e-14, 1e-3] [default: 1e-12]
    #[arg(long, value_parser = parse_real)]
    pub atol: Option<f64>,
    /// Series CSV; series JSON and manifest are written beside it
    #[arg(long, default_value = "evolve.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON or TOML configuration, or a manifest from an earlier run
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Two distinct axes from r, omega, k, kappa, eps, delta, omega_c [default: k,omega_c]
    #[arg(long, value_parser = parse_axes)]
    pub axes: Option<(Axis, Axis)>,
    /// Largest relative deviation, dimensionless, in [0, 1) [default: 0.1]
    #[arg(long, value_parser = parse_real)]
    pub range: Option<f64>,
    /// Points per axis, odd [default: 41]
    #[arg(long)]
    pub res: Option<usize>,
    /// Worker threads; 0 uses every core. Does not change the output
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Loop radius, dimensionless [default: 1.5]
    #[arg(long, value_parser = parse_real)]
    pub r: Option<f64>,
    /// Loop angular frequency, rad per time unit [default: 100pi]
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Initial loop phase, rad [default: pi]
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    /// Relative integrator tolerance [default: 1e-10]
    #[arg(long, value_parser = parse_real)]
    pub rtol: Option<f64>,
    /// Absolute integrator tolerance [default: 1e-12]
    #[arg(long, value_parser = parse_real)]
    pub atol: Option<f64>,
    /// Grid CSV; the manifest is written beside it
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(after_help = "Loop defaults: modified, r = 1.5, omega = pi/10, phi0 = pi.")]
pub struct ShapesArgs {
    /// JSON or TOML configuration, or a manifest from an earlier run
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub traj: LoopArgs,
    /// Interior samples over one period [default: 2000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Shapes CSV; the manifest is written beside it
    #[arg(long, default_value = "shapes.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// JSON or TOML configuration, or a manifest from an earlier run
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Which runs to include [default: all]
    #[arg(long, value_enum)]
    pub set: Option<CaseSet>,
    /// Interior output samples per period for every run [default: 2000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Relative integrator tolerance for every run [default: 1e-10]
    #[arg(long, value_parser = parse_real)]
    pub rtol: Option<f64>,
    /// Output directory for per-run CSV and JSON files and the manifest
    #[arg(long, default_value = "transfer")]
    pub out: PathBuf,
}

/// A finite real number.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// A real number or a multiple of pi: `2.5`, `pi`, `-pi/2`, `100pi`, `0.5*pi/3`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let Some(at) = t.find("pi") else {
        return parse_real(&t);
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => parse_real(h).map_err(|_| format!("bad coefficient in `{s}`"))?,
    };
    let div = match tail {
        "" => 1.0,
        d => {
            let d = d
                .strip_prefix('/')
                .ok_or_else(|| format!("cannot parse `{s}`"))?;
            parse_real(d).map_err(|_| format!("bad divisor in `{s}`"))?
        }
    };
    if div == 0.0 {
        return Err(format!("division by zero in `{s}`"));
    }
    Ok(coef * std::f64::consts::PI / div)
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let (lo, hi) = (parse_real(a)?, parse_real(b)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("interval `{s}` must have lo < hi"))
    }
}

pub fn parse_axes(s: &str) -> Result<(Axis, Axis), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two axes `a,b`, got `{s}`"))?;
    let a: Axis = a.trim().parse().map_err(|e: nhsta::Error| e.to_string())?;
    let b: Axis = b.trim().parse().map_err(|e: nhsta::Error| e.to_string())?;
    if a == b {
        return Err(format!("axes must differ, got `{s}`"));
    }
    Ok((a, b))
}

fn parse_which(s: &str) -> Result<Which, String> {
    s.parse().map_err(|e: nhsta::Error| e.to_string())
}

fn parse_cd(s: &str) -> Result<CdMode, String> {
    s.parse().map_err(|e: nhsta::Error| e.to_string())
}

fn parse_init(s: &str) -> Result<InitialState<f64>, String> {
    s.parse().map_err(|e: nhsta::Error| e.to_string())
}
