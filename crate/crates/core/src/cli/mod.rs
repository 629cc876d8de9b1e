//! `spinfreeze` command line.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2
//! propagation failure, 3 I/O failure.

mod output;

pub use output::*;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::{preset, run_scenario, FrameKind, FreezingMode, ScenarioConfig, PRESETS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PROPAGATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Output directory used when neither `--out` nor the environment sets one.
pub const DEFAULT_OUT: &str = "spinfreeze-out";
pub const OUT_ENV: &str = "SPINFREEZE_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "spinfreeze",
    version,
    about = "Interaction-induced spin freezing simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Lab,
    Rotating,
}

impl From<FrameArg> for FrameKind {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Lab => FrameKind::Lab,
            FrameArg::Rotating => FrameKind::Rotating,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct RunOptions {
    /// Output directory (default: $SPINFREEZE_OUT, else ./spinfreeze-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Noise seed override
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frame override
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    /// Also compute the discord trace
    #[arg(long)]
    pub discord: bool,
    /// Also write an SVG plot
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List built-in scenarios
    List,
    /// Print a scenario's configuration as TOML
    Show { preset: String },
    /// Run one scenario
    Run {
        /// Built-in scenario name
        #[arg(required_unless_present = "config", conflicts_with = "config")]
        preset: Option<String>,
        /// Scenario configuration file (TOML)
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Run several scenarios, each into its own subdirectory
    Batch {
        /// Scenario names (default: all built-in scenarios)
        presets: Vec<String>,
        /// Concurrent scenarios
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        opts: RunOptions,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config { .. } | Error::UnknownPreset { .. } => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::Integration { .. } | Error::Contract(_) | Error::Dimension { .. } | Error::Scenario { .. } => {
            EXIT_PROPAGATION
        }
    }
}

/// One line per preset, sorted by name.
pub fn cmd_list() -> String {
    let mut rows: Vec<_> = PRESETS.to_vec();
    rows.sort_by_key(|(n, _)| *n);
    rows.iter().map(|(n, d)| format!("{n:<14} {d}\n")).collect()
}

fn resolve_out(out: &Option<PathBuf>) -> PathBuf {
    out.clone()
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn load_config(preset_name: Option<&str>, config: Option<&Path>) -> Result<ScenarioConfig> {
    match (preset_name, config) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            ScenarioConfig::from_toml(&text)
        }
        (Some(name), None) => preset(name),
        (None, None) => Err(Error::config("run", "give a preset name or --config FILE")),
    }
}

/// Summary of a completed run.
pub struct RunReport {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Runs a scenario and writes its outputs into `out_dir`; the manifest is
/// written last and only on success.
pub fn execute_run(
    mut cfg: ScenarioConfig,
    config_path: Option<&Path>,
    out_dir: &Path,
    opts: &RunOptions,
) -> Result<RunReport> {
    let start = Instant::now();
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(frame) = opts.frame {
        cfg.frame = frame.into();
    }
    if opts.discord {
        cfg.outputs.discord = true;
    }
    let io = |source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(out_dir).map_err(io)?;
    let manifest_path = out_dir.join(MANIFEST_NAME);
    if manifest_path.exists() {
        // a stale manifest would claim this run completed
        std::fs::remove_file(&manifest_path).map_err(io)?;
    }

    let run = run_scenario(&cfg)?;
    let name = &cfg.name;
    let marginal = cfg.outputs.nuclear_marginal || cfg.freezing_mode() == FreezingMode::Superposition;
    let mut files = Vec::new();

    let pop_path = out_dir.join(format!("{name}_populations.csv"));
    emit_csv(
        &run.series,
        CsvColumns {
            nuclear_marginal: marginal,
            diagnostics: true,
        },
        &pop_path,
    )?;
    files.push(pop_path);
    if run.series.discord.is_some() {
        let p = out_dir.join(format!("{name}_discord.csv"));
        write_file(&p, &discord_csv(&run.series))?;
        files.push(p);
    }
    if opts.svg {
        let p = out_dir.join(format!("{name}.svg"));
        let title = if cfg.description.is_empty() {
            name.clone()
        } else {
            format!("{name}: {}", cfg.description)
        };
        emit_svg(&run.series, &title, marginal, &p)?;
        files.push(p);
    }

    let manifest = RunManifest {
        scenario: name.clone(),
        config_path: config_path.map(Path::to_path_buf),
        output_dir: out_dir.to_path_buf(),
        seed: cfg.seed,
        seed_override: opts.seed,
        frame: format!("{:?}", cfg.frame).to_lowercase(),
        frame_override: opts.frame.map(|f| format!("{f:?}").to_lowercase()),
        files,
        wall_clock_s: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        metrics: run.metrics,
        max_discord: run
            .series
            .discord
            .as_ref()
            .map(|d| d.iter().map(|(_, r)| r.discord).fold(0.0, f64::max)),
        warnings: run.warnings,
    };
    let manifest_path = write_manifest(&manifest)?;
    Ok(RunReport {
        manifest,
        manifest_path,
    })
}

fn summary(r: &RunReport) -> String {
    let m = &r.manifest;
    let mut s = format!(
        "{}: max_leakage {:.4e} mean_leakage {:.4e} ({:?}, {} us)",
        m.scenario, m.metrics.max_leakage, m.metrics.mean_leakage, m.metrics.mode, m.metrics.time_window
    );
    if let Some(d) = m.max_discord {
        s.push_str(&format!(" max_discord {d:.4}"));
    }
    s.push_str(&format!(" -> {}", r.manifest_path.display()));
    s
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match cli.command {
        Command::List => {
            let _ = write!(out, "{}", cmd_list());
            EXIT_OK
        }
        Command::Show { preset: name } => match preset(&name).and_then(|c| c.to_toml()) {
            Ok(text) => {
                let _ = write!(out, "{text}");
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                exit_code(&e)
            }
        },
        Command::Run {
            preset: name,
            config,
            opts,
        } => {
            let result = load_config(name.as_deref(), config.as_deref())
                .and_then(|cfg| execute_run(cfg, config.as_deref(), &resolve_out(&opts.out), &opts));
            match result {
                Ok(r) => {
                    for w in &r.manifest.warnings {
                        let _ = writeln!(err, "warning: {w}");
                    }
                    let _ = writeln!(out, "{}", summary(&r));
                    EXIT_OK
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    exit_code(&e)
                }
            }
        }
        Command::Batch { presets, jobs, opts } => {
            let names: Vec<String> = if presets.is_empty() {
                PRESETS.iter().map(|(n, _)| n.to_string()).collect()
            } else {
                presets
            };
            let root = resolve_out(&opts.out);
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot start worker pool: {e}");
                    return EXIT_CONFIG;
                }
            };
            let results: Vec<(String, Result<RunReport>)> = pool.install(|| {
                names
                    .par_iter()
                    .map(|n| {
                        let r = preset(n).and_then(|cfg| execute_run(cfg, None, &root.join(n), &opts));
                        (n.clone(), r)
                    })
                    .collect()
            });
            let mut code = EXIT_OK;
            for (n, r) in results {
                match r {
                    Ok(r) => {
                        let _ = writeln!(out, "{}", summary(&r));
                    }
                    Err(e) => {
                        let _ = writeln!(err, "error: {n}: {e}");
                        code = code.max(exit_code(&e));
                    }
                }
            }
            code
        }
    }
}
