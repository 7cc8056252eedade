#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Radial projection of planar point sets and their angular spacing statistics.
#[derive(Parser, Debug)]
#[command(name = "radproj", version, about)]
struct Cli {
    /// Worker threads for generation and visibility (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set and write it as CSV.
    Generate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output file ("-" or omitted: standard output).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a point set and keep the points visible from the reference point.
    Visible {
        #[command(flatten)]
        config: ConfigArgs,
        /// Read the points from this CSV instead of generating them.
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Write all points with a `visible` column instead of only the visible ones.
        #[arg(long)]
        flags: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Full run: config, histogram CSV, summary JSON and optionally gaps CSV and SVG.
    Pipeline {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output prefix; files are PREFIX.config, PREFIX.hist.csv, PREFIX.summary.json, ...
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the normalised gaps to PREFIX.gaps.csv.
        #[arg(long)]
        gaps: bool,
        /// Also write a diagnostic plot to PREFIX.svg.
        #[arg(long)]
        svg: bool,
        /// Leave the generation time out of the SVG.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Power-law tail fit on a gaps or histogram CSV (or re-emit a fit JSON).
    Fit {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Distances between a histogram (or gaps CSV) and a reference density.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate g(t), its two-term tail expansion and the exponential density.
    Density {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 4.0)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Run configuration: a `key = value` file overridden by individual flags.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// Configuration file with one `key = value` per line.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Point set: z2, poisson, ab, tt, gs, lb, chair or rule.
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    intensity: Option<String>,
    /// Inflation steps for substitution sets.
    #[arg(long)]
    steps: Option<String>,
    #[arg(long, value_name = "FILE")]
    rule_file: Option<String>,
    /// Window shift "x,y" in units of the window edge, or "default".
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    /// Window rotation in radians, or "default".
    #[arg(long, allow_hyphen_values = true)]
    window_rotation: Option<String>,
    /// auto, brute_force, gcd_z2, cms_local or norm_class_gs.
    #[arg(long)]
    visibility: Option<String>,
    #[arg(long)]
    angular_tolerance: Option<String>,
    /// Include the gap that closes the circle.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    wraparound: Option<String>,
    #[arg(long)]
    bin_width: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    fit_lo: Option<String>,
    #[arg(long)]
    fit_hi: Option<String>,
    #[arg(long)]
    fit_min_bin_count: Option<String>,
    #[arg(long)]
    fit_extra_terms: Option<String>,
    /// Reference density: z2 or exp.
    #[arg(long)]
    reference: Option<String>,
    /// Rate of the exponential reference.
    #[arg(long)]
    lambda: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_text(&text)
                .with_context(|| format!("in configuration file {}", path.display()))?;
        }
        let flags = [
            ("set", &self.set),
            ("radius", &self.radius),
            ("seed", &self.seed),
            ("intensity", &self.intensity),
            ("steps", &self.steps),
            ("rule_file", &self.rule_file),
            ("epsilon", &self.epsilon),
            ("window_rotation", &self.window_rotation),
            ("visibility", &self.visibility),
            ("angular_tolerance", &self.angular_tolerance),
            ("wraparound", &self.wraparound),
            ("bin_width", &self.bin_width),
            ("t_max", &self.t_max),
            ("fit_lo", &self.fit_lo),
            ("fit_hi", &self.fit_hi),
            ("fit_min_bin_count", &self.fit_min_bin_count),
            ("fit_extra_terms", &self.fit_extra_terms),
            ("reference", &self.reference),
            ("lambda", &self.lambda),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set_key(key, v).map_err(radproj::Error::Usage)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit status for an error: 2 usage, 3 resource, 4 integrity.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<radproj::Error>() {
            return match e {
                radproj::Error::Resource { .. } | radproj::Error::Overflow(_) => 3,
                radproj::Error::Integrity(_) => 4,
                _ => 2,
            };
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(radproj::Error::Usage("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Generate { config, output } => commands::generate(&config.resolve()?, output.as_deref()),
        Command::Visible {
            config,
            input,
            flags,
            output,
        } => commands::visible(&config.resolve()?, input.as_deref(), flags, output.as_deref()),
        Command::Pipeline {
            config,
            output,
            gaps,
            svg,
            no_timestamp,
        } => commands::pipeline(
            &config.resolve()?,
            &commands::PipelineOutputs {
                prefix: output,
                gaps,
                svg,
                timestamp: !no_timestamp,
            },
        ),
        Command::Fit { config, input, output } => commands::fit(&config.resolve()?, &input, output.as_deref()),
        Command::Compare { config, input, output } => {
            commands::compare(&config.resolve()?, &input, output.as_deref())
        }
        Command::Density {
            config,
            from,
            to,
            step,
            output,
        } => commands::density(&config.resolve()?, from, to, step, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radproj: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
