use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use nhsta::evolution::{propagate, EvolutionConfig, HamiltonianKind};
use nhsta::experiments::io::{
    conventions, series_conventions, sibling, write_json, write_series_csv, Manifest,
    SeriesDocument,
};
use nhsta::experiments::shapes::write_shapes_csv;
use nhsta::experiments::transfer::persist_runs;
use nhsta::experiments::{
    conventional_cases, sensitivity_sweep, shapes, shortcut_cases, spectrum_surface,
    transfer_experiment, GridSpec, SweepSpec, Which,
};
use nhsta::model::CdMode;
use nhsta::trajectory::{CustomPath, TrajectorySpec, Variant};
use serde::{Deserialize, Serialize};

use crate::args::{
    CaseSet, EvolveArgs, HamiltonianArg, LoopArgs, LoopKind, ShapesArgs, SpectrumArgs, SweepArgs,
    TransferArgs,
};
use crate::config::resolve;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub which: Which,
    pub grid: GridSpec,
    pub trajectory: Option<TrajectorySpec<f64>>,
    pub cd_mode: CdMode,
    pub overlay_samples: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            which: Which::H0,
            grid: GridSpec::default(),
            trajectory: None,
            cd_mode: CdMode::Real,
            overlay_samples: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapesConfig {
    pub trajectory: TrajectorySpec<f64>,
    pub samples: usize,
}

impl Default for ShapesConfig {
    fn default() -> Self {
        Self {
            trajectory: TrajectorySpec::modified(1.5, PI / 10.0, PI),
            samples: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    pub set: CaseSet,
    pub output_samples: usize,
    pub rel_tol: f64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            set: CaseSet::All,
            output_samples: 2000,
            rel_tol: 1e-10,
        }
    }
}

pub fn default_evolve() -> EvolutionConfig<f64> {
    EvolutionConfig::new(
        TrajectorySpec::modified(0.5, PI / 10.0, PI),
        HamiltonianKind::Hm,
    )
}

fn units() -> (&'static str, &'static str) {
    ("units", "hbar = 1, arbitrary time units, angles in rad")
}

fn print_config<C: Serialize>(config: &C) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(config).map_err(|e| CliError::Config(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn prepare_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(nhsta::Error::from)?;
    }
    Ok(())
}

fn finish(mut manifest: Manifest, start: Instant, path: &Path) -> Result<(), CliError> {
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn load_custom(path: &Path) -> Result<TrajectorySpec<f64>, CliError> {
    CustomPath::from_csv(path)
        .map(TrajectorySpec::custom)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Applies loop flags on top of `traj`. `fallback` supplies `r`, `ω`, `φ₀`
/// when switching from a custom table back to a parametric loop.
fn apply_loop(
    traj: &mut TrajectorySpec<f64>,
    a: &LoopArgs,
    fallback: &TrajectorySpec<f64>,
) -> Result<(), CliError> {
    let kind = a.trajectory.or(a.path.as_ref().map(|_| LoopKind::Custom));
    match kind {
        Some(LoopKind::Custom) => {
            let path = a
                .path
                .as_deref()
                .ok_or_else(|| CliError::Config("--trajectory custom needs --path".into()))?;
            *traj = load_custom(path)?;
        }
        Some(k) => {
            if a.path.is_some() {
                return Err(CliError::Config("--path needs --trajectory custom".into()));
            }
            if matches!(traj.variant, Variant::Custom(_)) {
                *traj = fallback.clone();
            }
            traj.variant = if k == LoopKind::Original {
                Variant::Original
            } else {
                Variant::Modified
            };
        }
        None => {}
    }
    let shape_flags = a.r.is_some() || a.omega.is_some() || a.phi0.is_some();
    if matches!(traj.variant, Variant::Custom(_)) {
        if shape_flags {
            return Err(CliError::Config(
                "--r, --omega and --phi0 do not apply to a custom trajectory".into(),
            ));
        }
        return Ok(());
    }
    if let Some(r) = a.r {
        traj.r = r;
    }
    if let Some(w) = a.omega {
        traj.omega = w;
    }
    if let Some(p) = a.phi0 {
        traj.phi0 = p;
    }
    Ok(())
}

pub fn spectrum(a: SpectrumArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut cfg = resolve(&SpectrumConfig::default(), a.config.as_deref(), "spectrum")?;
    if let Some(w) = a.which {
        cfg.which = w;
    }
    if let Some(m) = a.cd {
        cfg.cd_mode = m;
    }
    if let Some(r) = a.xrange {
        cfg.grid.x_range = r;
    }
    if let Some(r) = a.yrange {
        cfg.grid.y_range = r;
    }
    if let Some(n) = a.res {
        cfg.grid.res = n;
    }
    if let Some(n) = a.overlay_samples {
        cfg.overlay_samples = n;
    }
    if a.traj.any() {
        let fallback = TrajectorySpec::modified(f64::NAN, f64::NAN, PI);
        let mut traj = match cfg.trajectory.take() {
            Some(t) => t,
            None if a.traj.trajectory == Some(LoopKind::Custom) || a.traj.path.is_some() => {
                fallback.clone()
            }
            None => {
                let (Some(_), Some(_)) = (a.traj.r, a.traj.omega) else {
                    return Err(CliError::Config(
                        "a spectrum trajectory needs both --r and --omega".into(),
                    ));
                };
                fallback.clone()
            }
        };
        apply_loop(&mut traj, &a.traj, &fallback)?;
        cfg.trajectory = Some(traj);
    }
    if cfg.which == Which::Hm && cfg.trajectory.is_none() {
        return Err(CliError::Config(
            "--which hm needs a trajectory: pass --r and --omega (and optionally --trajectory, --phi0)".into(),
        ));
    }
    cfg.grid.validate()?;
    print_config(&cfg)?;

    eprintln!(
        "spectrum: {} over {}x{} cells",
        if cfg.which == Which::H0 { "h0" } else { "hm" },
        cfg.grid.res,
        cfg.grid.res
    );
    let surface = spectrum_surface(
        &cfg.grid,
        cfg.which,
        cfg.trajectory.as_ref(),
        cfg.cd_mode,
        cfg.overlay_samples,
    )?;
    prepare_parent(&a.out)?;
    let mut manifest = Manifest::new("spectrum", &cfg)?.with_conventions(conventions(&[
        units(),
        (
            "labels",
            "h0: E_minus = -alpha, E_plus = +alpha on the principal branch; hm: ordered by real part",
        ),
        (
            "grid",
            "cell centres lo + (i + 1/2)(hi - lo)/res; rows run over x fastest, then y",
        ),
        (
            "missing",
            "empty fields on the branch cut x = 0, 0 < |y| <= 1 and, for hm on a modified family, at y <= 0",
        ),
        (
            "omega_c",
            "hm only: Omega = coupling(phidot)/2 with phidot from the loop of the same family and omega through the cell",
        ),
        ("overlay", "rows along the trajectory at t = 0, (j + 1/2) T / N, T"),
    ]));
    surface.write_csv(&a.out)?;
    manifest.record(&a.out)?;
    eprintln!("wrote {}", a.out.display());
    if cfg.trajectory.is_some() {
        let overlay = sibling(&a.out, "overlay", "csv");
        surface.write_overlay_csv(&overlay)?;
        manifest.record(&overlay)?;
        eprintln!("wrote {}", overlay.display());
    }
    let missing = surface.cells.iter().filter(|c| c.is_none()).count();
    match surface.min_gap() {
        Some(g) => eprintln!("minimum gap {g:.6e}, {missing} empty cells"),
        None => eprintln!("every cell is empty"),
    }
    finish(manifest, start, &sibling(&a.out, "manifest", "json"))
}

pub fn evolve(a: EvolveArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let defaults = default_evolve();
    let mut cfg = resolve(&defaults, a.config.as_deref(), "evolve")?;
    apply_loop(&mut cfg.trajectory, &a.traj, &defaults.trajectory)?;
    if let Some(h) = a.hamiltonian {
        cfg.hamiltonian = match h {
            HamiltonianArg::H0 => HamiltonianKind::H0,
            HamiltonianArg::Hm => HamiltonianKind::Hm,
        };
    }
    if let Some(m) = a.cd {
        cfg.cd_mode = m;
    }
    if let Some(i) = a.init {
        cfg.initial = i;
    }
    if let Some(n) = a.periods {
        cfg.n_periods = n;
    }
    if let Some(n) = a.samples {
        cfg.output_samples = n;
    }
    if let Some(t) = a.rtol {
        cfg.rel_tol = t;
    }
    if let Some(t) = a.atol {
        cfg.abs_tol = t;
    }
    cfg.validate()?;
    print_config(&cfg)?;

    eprintln!(
        "evolve: {} loop, {} periods of {:.6} time units",
        cfg.trajectory.variant.name(),
        cfg.n_periods,
        cfg.trajectory.period()
    );
    let series = propagate(&cfg)?;
    prepare_parent(&a.out)?;
    let mut manifest = Manifest::new("evolve", &cfg)?.with_conventions(series_conventions());
    write_series_csv(&a.out, &series)?;
    manifest.record(&a.out)?;
    eprintln!("wrote {}", a.out.display());
    let doc = sibling(&a.out, "series", "json");
    write_json(&doc, &SeriesDocument::new(&cfg, &series))?;
    manifest.record(&doc)?;
    eprintln!("wrote {}", doc.display());
    let (fm, fp) = series.terminal();
    eprintln!(
        "terminal f_minus = {fm:.9}, f_plus = {fp:.9} ({} steps, {} rejected)",
        series.steps_accepted, series.steps_rejected
    );
    finish(manifest, start, &sibling(&a.out, "manifest", "json"))
}

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut spec = resolve(&SweepSpec::default(), a.config.as_deref(), "sweep")?;
    if let Some(axes) = a.axes {
        spec.axes = axes;
    }
    if let Some(v) = a.range {
        spec.range = v;
    }
    if let Some(n) = a.res {
        spec.res = n;
    }
    if let Some(v) = a.r {
        spec.r = v;
    }
    if let Some(v) = a.omega {
        spec.omega = v;
    }
    if let Some(v) = a.phi0 {
        spec.phi0 = v;
    }
    if let Some(v) = a.rtol {
        spec.rel_tol = v;
    }
    if let Some(v) = a.atol {
        spec.abs_tol = v;
    }
    spec.validate()?;
    print_config(&spec)?;

    let workers = if a.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        a.jobs
    };
    eprintln!(
        "sweep: {} x {} over {}x{} cells on {workers} workers",
        spec.axes.0, spec.axes.1, spec.res, spec.res
    );
    let grid = sensitivity_sweep(&spec, a.jobs)?;
    prepare_parent(&a.out)?;
    let mut conv = series_conventions();
    conv.extend(conventions(&[
        (
            "deviation",
            "multiplicative: q -> (1 + d) q with d = range (2i - (res - 1))/(res - 1)",
        ),
        ("omega_axis", "a deviated omega keeps the nominal run length 2 pi / omega"),
        (
            "cell",
            "f_plus after one period from |phi_minus(0)> under hm with the real-part coupling; empty if the run failed",
        ),
        ("rows", "first axis outer, second axis inner"),
    ]));
    let mut manifest = Manifest::new("sweep", &spec)?.with_conventions(conv);
    grid.write_csv(&a.out)?;
    manifest.record(&a.out)?;
    eprintln!("wrote {}", a.out.display());
    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_owned(), |f| format!("{f:.9}"));
    eprintln!(
        "centre {}, min {}, max {}, {} failed cells",
        show(grid.centre()),
        show(grid.min()),
        show(grid.max()),
        grid.missing()
    );
    finish(manifest, start, &sibling(&a.out, "manifest", "json"))
}

pub fn shapes_cmd(a: ShapesArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let defaults = ShapesConfig::default();
    let mut cfg = resolve(&defaults, a.config.as_deref(), "shapes")?;
    apply_loop(&mut cfg.trajectory, &a.traj, &defaults.trajectory)?;
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    print_config(&cfg)?;

    eprintln!("shapes: {} samples over one period", cfg.samples);
    let rows = shapes(&cfg.trajectory, cfg.samples)?;
    prepare_parent(&a.out)?;
    let mut manifest = Manifest::new("shapes", &cfg)?.with_conventions(conventions(&[
        units(),
        (
            "omega_c",
            "Omega = Re phidot / 2, required real along the loop",
        ),
        ("time_grid", "t = 0, (j + 1/2) T / N for j < N, T"),
    ]));
    write_shapes_csv(&a.out, &rows)?;
    manifest.record(&a.out)?;
    eprintln!("wrote {}", a.out.display());
    finish(manifest, start, &sibling(&a.out, "manifest", "json"))
}

pub fn transfer(a: TransferArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut cfg = resolve(&TransferConfig::default(), a.config.as_deref(), "transfer")?;
    if let Some(s) = a.set {
        cfg.set = s;
    }
    if let Some(n) = a.samples {
        cfg.output_samples = n;
    }
    if let Some(t) = a.rtol {
        cfg.rel_tol = t;
    }
    let mut cases = match cfg.set {
        CaseSet::Conventional => conventional_cases(),
        CaseSet::Shortcut => shortcut_cases(),
        CaseSet::All => {
            let mut v = conventional_cases();
            v.extend(shortcut_cases());
            v
        }
    };
    for c in &mut cases {
        c.config.output_samples = cfg.output_samples;
        c.config.rel_tol = cfg.rel_tol;
        c.config.validate()?;
    }
    print_config(&cfg)?;

    eprintln!("transfer: {} runs", cases.len());
    let runs = transfer_experiment(&cases)?;
    let files = persist_runs(&a.out, &runs)?;
    let mut manifest = Manifest::new("transfer", &cfg)?.with_conventions(series_conventions());
    for f in &files {
        manifest.record(f)?;
    }
    for run in &runs {
        let (fm, fp) = run.series.terminal();
        eprintln!(
            "{:<32} f_minus(T) = {fm:.9}  f_plus(T) = {fp:.9}",
            run.label
        );
    }
    eprintln!("wrote {} files to {}", files.len(), a.out.display());
    finish(manifest, start, &a.out.join("transfer.manifest.json"))
}
