//! Command-line front end: coefficient dumps, the verification suite,
//! single runs, the ε-scan and the attractor experiment. Every command
//! writes an [`ExperimentManifest`] that `replay` can re-execute.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    attractor_dim_bound, fit_epsilon_slope, grashof, tail_statistics, DimensionBound, ScanEntry, ScanResult, SlopeFit,
    TailWindow,
};
use crate::error::{Error, Result};
use crate::operators::OperatorContext;
use crate::solver::{parse_epsilon, run_pair, Epsilon, Solver, SolverConfig, TimeProfile, TrajectoryRecord};
use crate::spharm::snapshot::save_snapshot;
use crate::triads::{SignConvention, TableSummary, TriadTable};
use crate::verify::{run_suite, VerifyOptions, VerifyReport};

pub const MAX_COEFFS_TRUNCATION: usize = 31;
pub const MAX_VERIFY_TRUNCATION: usize = 12;

/// Global sign choices, as calibrated against quadrature by `verify`.
pub const SIGN_CONVENTION: SignConvention = SignConvention {
    jacobian: 1.0,
    lemma: -1.0,
};

#[derive(Parser, Debug)]
#[command(name = "zonalsphere", version, about = "Rotating-sphere vorticity dynamics and triad coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the triad coefficient table as CSV.
    Coeffs {
        #[arg(long = "K")]
        truncation: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property suite; exit 0 iff every check passes.
    Verify {
        #[arg(long = "K")]
        truncation: usize,
        /// Flip the sign of J for positive first order before checking.
        #[arg(long)]
        corrupt_sign: bool,
        /// Also write report.json and manifest.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Integrate one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// One run per ε with shared forcing and initial condition, then a
    /// log-log fit of the late non-zonal energy.
    ScanEpsilon {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated, e.g. `1,1/4,1/16,1/64,inf`.
        #[arg(long)]
        epsilons: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        slope_min: f64,
        #[arg(long, default_value_t = 1.2)]
        slope_max: f64,
    },
    /// Two initial conditions, one forcing: does the distance collapse?
    Attractor {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        epsilon: String,
        /// Two seeds, `a,b`.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
    },
    /// Re-execute the command recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// A fully resolved command, as stored in manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Invocation {
    Coeffs {
        #[serde(rename = "K")]
        truncation: usize,
    },
    Verify {
        #[serde(rename = "K")]
        truncation: usize,
        corrupt_sign: bool,
    },
    Run {
        config: SolverConfig,
    },
    ScanEpsilon {
        config: SolverConfig,
        epsilons: Vec<Epsilon>,
        slope_band: [f64; 2],
    },
    Attractor {
        config: SolverConfig,
        epsilon: Epsilon,
        seeds: [u64; 2],
        threshold: f64,
    },
}

impl Invocation {
    pub fn name(&self) -> &'static str {
        match self {
            Invocation::Coeffs { .. } => "coeffs",
            Invocation::Verify { .. } => "verify",
            Invocation::Run { .. } => "run",
            Invocation::ScanEpsilon { .. } => "scan-epsilon",
            Invocation::Attractor { .. } => "attractor",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub invocation: Invocation,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<PathBuf>,
    pub sign_convention: SignConvention,
    pub summary: serde_json::Value,
}

impl ExperimentManifest {
    fn new(invocation: Invocation, outputs: Vec<PathBuf>, summary: serde_json::Value) -> Self {
        let now: chrono::DateTime<chrono::Utc> = std::time::SystemTime::now().into();
        Self {
            invocation,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs,
            sign_convention: SIGN_CONVENTION,
            summary,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// What a command produced: its exit code and manifest.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub manifest: ExperimentManifest,
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn file_name(p: &Path) -> PathBuf {
    p.file_name().map(PathBuf::from).unwrap_or_else(|| p.to_path_buf())
}

pub fn coeffs(truncation: usize, out: &Path) -> Result<(TableSummary, ExperimentManifest)> {
    if truncation < 1 || truncation > MAX_COEFFS_TRUNCATION {
        return Err(Error::Config(format!("coeffs needs 1 <= K <= {MAX_COEFFS_TRUNCATION}, got {truncation}")));
    }
    let table = TriadTable::build(truncation);
    write_file(out, |w| table.write_csv(w))?;
    let summary = table.summary();
    let manifest_path = out.with_extension("manifest.json");
    let manifest = ExperimentManifest::new(
        Invocation::Coeffs { truncation },
        vec![file_name(out)],
        serde_json::to_value(summary)?,
    );
    manifest.save(&manifest_path)?;
    Ok((summary, manifest))
}

pub fn verify(truncation: usize, corrupt_sign: bool, out_dir: Option<&Path>) -> Result<(VerifyReport, Option<ExperimentManifest>)> {
    if truncation < 1 || truncation > MAX_VERIFY_TRUNCATION {
        return Err(Error::Config(format!("verify needs 1 <= K <= {MAX_VERIFY_TRUNCATION}, got {truncation}")));
    }
    let mut opts = VerifyOptions::new(truncation);
    opts.corrupt_sign = corrupt_sign;
    let report = run_suite(&opts)?;
    let manifest = match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
            let m = ExperimentManifest::new(
                Invocation::Verify {
                    truncation,
                    corrupt_sign,
                },
                vec!["report.json".into()],
                serde_json::json!({ "passed": report.passed() }),
            );
            m.save(&dir.join("manifest.json"))?;
            Some(m)
        }
        None => None,
    };
    Ok((report, manifest))
}

fn save_trajectory(dir: &Path, stem: &str, rec: &TrajectoryRecord, outputs: &mut Vec<PathBuf>) -> Result<()> {
    let csv = format!("{stem}.csv");
    write_file(&dir.join(&csv), |w| rec.write_csv(w))?;
    outputs.push(csv.into());
    let snap = format!("{stem}_final.snapshot");
    save_snapshot(&rec.final_state, &dir.join(&snap))?;
    outputs.push(snap.into());
    Ok(())
}

pub fn run(cfg: &SolverConfig, out_dir: &Path) -> Result<ExperimentManifest> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let solver = Solver::new(cfg.clone())?;
    let (rec, failure) = match solver.run() {
        Ok(rec) => (rec, None),
        Err(f) => (f.partial, Some(f.error)),
    };
    let mut outputs = Vec::new();
    save_trajectory(out_dir, "trajectory", &rec, &mut outputs)?;
    let last = rec.rows.last().copied();
    let summary = serde_json::json!({
        "dt": rec.dt,
        "steps": rec.steps,
        "final_time": rec.final_time,
        "final": last,
        "error": failure.as_ref().map(|e| e.to_string()),
    });
    let manifest = ExperimentManifest::new(Invocation::Run { config: cfg.clone() }, outputs, summary);
    manifest.save(&out_dir.join("manifest.json"))?;
    match failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanReport {
    pub scan: ScanResult,
    pub fit: SlopeFit,
    pub slope_band: [f64; 2],
    pub within_band: bool,
    /// Consecutive ε pairs (larger, smaller) whose tail supremum rose by
    /// more than 10 % as ε decreased.
    pub monotonicity_violations: Vec<(f64, f64)>,
}

pub fn scan_epsilon(
    cfg: &SolverConfig,
    epsilons: &[f64],
    slope_band: [f64; 2],
    out_dir: &Path,
) -> Result<(ScanReport, ExperimentManifest)> {
    cfg.validate()?;
    let finite = epsilons.iter().filter(|e| e.is_finite()).count();
    if finite < 3 {
        return Err(Error::Config(format!("scan needs at least 3 finite epsilons, got {finite}")));
    }
    let window = TailWindow::new(cfg.mu, cfg.t_start, cfg.t_end)?;
    fs::create_dir_all(out_dir)?;
    let ctx = Arc::new(OperatorContext::new(cfg.truncation));
    let runs: Vec<Result<TrajectoryRecord>> = epsilons
        .par_iter()
        .map(|&eps| {
            let member = SolverConfig { epsilon: eps, ..cfg.clone() };
            let solver = Solver::with_context(member, ctx.clone())?;
            solver.run().map_err(|f| f.error)
        })
        .collect();
    let mut outputs = Vec::new();
    let mut entries = Vec::new();
    for (i, (&eps, rec)) in epsilons.iter().zip(runs).enumerate() {
        let rec = rec?;
        save_trajectory(out_dir, &format!("trajectory_{i:02}"), &rec, &mut outputs)?;
        let (sup, avg) = tail_statistics(&rec.rows, cfg.mu, &window)?;
        entries.push(ScanEntry {
            epsilon: eps,
            sup_tail_nonzonal: sup,
            avg_mu_grad_nonzonal: avg,
            included: eps.is_finite(),
        });
    }
    let scan = ScanResult {
        mu: cfg.mu,
        window,
        entries,
    };
    let fit = fit_epsilon_slope(&scan)?;
    let report = ScanReport {
        within_band: fit.slope >= slope_band[0] && fit.slope <= slope_band[1],
        monotonicity_violations: scan.monotonicity_violations(0.1),
        scan,
        fit,
        slope_band,
    };
    write_file(&out_dir.join("scan.csv"), |w| report.scan.write_csv(w))?;
    fs::write(out_dir.join("scan.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    outputs.push("scan.csv".into());
    outputs.push("scan.json".into());
    let manifest = ExperimentManifest::new(
        Invocation::ScanEpsilon {
            config: cfg.clone(),
            epsilons: epsilons.iter().map(|&e| Epsilon(e)).collect(),
            slope_band,
        },
        outputs,
        serde_json::json!({ "slope": fit.slope, "r_squared": fit.r_squared, "within_band": report.within_band }),
    );
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok((report, manifest))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttractorReport {
    #[serde(with = "crate::solver::epsilon_format")]
    pub epsilon: f64,
    pub seeds: [u64; 2],
    pub dt: f64,
    pub final_time: f64,
    pub final_distance: f64,
    pub threshold: f64,
    pub first_below_threshold: Option<f64>,
    pub grashof: f64,
    /// With `c_S = 1`; the true constant is not known.
    pub dimension_bound: DimensionBound,
}

pub fn attractor(
    cfg: &SolverConfig,
    epsilon: f64,
    seeds: [u64; 2],
    threshold: f64,
    out_dir: &Path,
) -> Result<(AttractorReport, ExperimentManifest)> {
    cfg.validate()?;
    if cfg.forcing.profile != TimeProfile::Steady {
        return Err(Error::Config("attractor needs a steady forcing profile".into()));
    }
    fs::create_dir_all(out_dir)?;
    let ctx = Arc::new(OperatorContext::new(cfg.truncation));
    let member = |seed| {
        Solver::with_context(
            SolverConfig {
                epsilon,
                seed,
                ..cfg.clone()
            },
            ctx.clone(),
        )
    };
    let (a, b) = (member(seeds[0])?, member(seeds[1])?);
    let pair = run_pair(&a, &b)?;
    let mut outputs = Vec::new();
    save_trajectory(out_dir, "trajectory_a", &pair.a, &mut outputs)?;
    save_trajectory(out_dir, "trajectory_b", &pair.b, &mut outputs)?;
    write_file(&out_dir.join("distance.csv"), |w| {
        writeln!(w, "t,distance_l2")?;
        for (t, d) in &pair.distance {
            writeln!(w, "{t:.16e},{d:.16e}")?;
        }
        Ok(())
    })?;
    outputs.push("distance.csv".into());
    let g = grashof(a.forcing(), cfg.mu)?;
    let report = AttractorReport {
        epsilon,
        seeds,
        dt: a.dt(),
        final_time: pair.a.final_time,
        final_distance: pair.final_distance(),
        threshold,
        first_below_threshold: pair.first_below(threshold),
        grashof: g,
        dimension_bound: attractor_dim_bound(g, 1.0),
    };
    fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    outputs.push("report.json".into());
    let manifest = ExperimentManifest::new(
        Invocation::Attractor {
            config: cfg.clone(),
            epsilon: Epsilon(epsilon),
            seeds,
            threshold,
        },
        outputs,
        serde_json::to_value(&report)?,
    );
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok((report, manifest))
}

fn parse_seeds(text: &str) -> Result<[u64; 2]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("expected two seeds `a,b`, got {text:?}")));
    }
    let parse = |s: &str| s.parse::<u64>().map_err(|_| Error::Config(format!("bad seed {s:?}")));
    Ok([parse(parts[0])?, parse(parts[1])?])
}

pub fn parse_epsilon_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse_epsilon).collect()
}

/// Executes a resolved command, printing a short report to stdout. Only
/// `verify` may run without an output location.
pub fn execute(inv: &Invocation, out: Option<&Path>) -> Result<i32> {
    let need = || out.ok_or_else(|| Error::Config(format!("{} needs an output location", inv.name())));
    match inv {
        Invocation::Coeffs { truncation } => {
            let (s, _) = coeffs(*truncation, need()?)?;
            println!(
                "K = {}: {} triads, {} resonant, {} with zonal output",
                s.truncation, s.total, s.resonant, s.zonal_output
            );
            Ok(0)
        }
        Invocation::Verify {
            truncation,
            corrupt_sign,
        } => {
            let (report, _) = verify(*truncation, *corrupt_sign, out)?;
            print!("{report}");
            for c in report.failures() {
                println!("failed check: {}", c.name);
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Invocation::Run { config } => {
            let m = run(config, need()?)?;
            println!("{}", serde_json::to_string_pretty(&m.summary)?);
            Ok(0)
        }
        Invocation::ScanEpsilon {
            config,
            epsilons,
            slope_band,
        } => {
            let eps: Vec<f64> = epsilons.iter().map(|e| e.0).collect();
            let (r, _) = scan_epsilon(config, &eps, *slope_band, need()?)?;
            println!("{:>14} {:>24} {:>24}  fit", "epsilon", "sup tail |w~|^2", "<mu |grad w~|^2>");
            for e in &r.scan.entries {
                println!(
                    "{:>14.6e} {:>24.16e} {:>24.16e}  {}",
                    e.epsilon, e.sup_tail_nonzonal, e.avg_mu_grad_nonzonal, e.included
                );
            }
            println!(
                "slope {:.4} (r^2 {:.4}); band [{}, {}]: {}",
                r.fit.slope,
                r.fit.r_squared,
                slope_band[0],
                slope_band[1],
                if r.within_band { "inside" } else { "outside" }
            );
            for (a, b) in &r.monotonicity_violations {
                println!("tail supremum rose from epsilon {a} to {b}");
            }
            Ok(if r.within_band { 0 } else { 1 })
        }
        Invocation::Attractor {
            config,
            epsilon,
            seeds,
            threshold,
        } => {
            let (r, _) = attractor(config, epsilon.0, *seeds, *threshold, need()?)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(0)
        }
    }
}

fn resolve(command: Command) -> Result<(Invocation, Option<PathBuf>)> {
    Ok(match command {
        Command::Coeffs { truncation, out } => (Invocation::Coeffs { truncation }, Some(out)),
        Command::Verify {
            truncation,
            corrupt_sign,
            out_dir,
        } => {
            let inv = Invocation::Verify {
                truncation,
                corrupt_sign,
            };
            (inv, out_dir)
        }
        Command::Run { config, out_dir } => (
            Invocation::Run {
                config: SolverConfig::load(&config)?,
            },
            Some(out_dir),
        ),
        Command::ScanEpsilon {
            config,
            epsilons,
            out_dir,
            slope_min,
            slope_max,
        } => (
            Invocation::ScanEpsilon {
                config: SolverConfig::load(&config)?,
                epsilons: parse_epsilon_list(&epsilons)?.into_iter().map(Epsilon).collect(),
                slope_band: [slope_min, slope_max],
            },
            Some(out_dir),
        ),
        Command::Attractor {
            config,
            epsilon,
            seeds,
            out_dir,
            threshold,
        } => (
            Invocation::Attractor {
                config: SolverConfig::load(&config)?,
                epsilon: Epsilon(parse_epsilon(&epsilon)?),
                seeds: parse_seeds(&seeds)?,
                threshold,
            },
            Some(out_dir),
        ),
        Command::Replay { manifest, out_dir } => (ExperimentManifest::load(&manifest)?.invocation, Some(out_dir)),
    })
}

/// Exit status for an error: 2 for usage and configuration problems,
/// 1 for failures while computing.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::NonPositiveViscosity(_)
        | Error::Snapshot(_)
        | Error::InvalidWaveVector { .. }
        | Error::DegenerateScan(_) => 2,
        _ => 1,
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("ZONALSPHERE_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring ZONALSPHERE_THREADS={v:?}"),
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    configure_threads();
    match resolve(cli.command).and_then(|(inv, out)| execute(&inv, out.as_deref())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
