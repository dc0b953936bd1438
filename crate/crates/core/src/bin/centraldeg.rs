use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use centraldeg::centralpath::ScheduleConfig;
use centraldeg::commands::{
    cmd_degree, cmd_genus, cmd_path, reproduce_paper, to_json, GenusQuery, MethodChoice, OutputFormat, PathFamily,
    RunConfig, Target,
};
use centraldeg::homotopy::TrackerConfig;
use centraldeg::{Error, Result};

#[derive(Parser)]
#[command(name = "centraldeg", version, about = "Degree and genus of central curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Instance seed.
    #[arg(long, global = true, env = "CENTRALDEG_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (CSV samples for `path`, the report otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Keep wall-clock timings in the output.
    #[arg(long, global = true)]
    timings: bool,
    /// Comma-separated tracker seeds.
    #[arg(long, global = true, value_delimiter = ',')]
    tracker_seeds: Option<Vec<u64>>,
    #[arg(long, global = true)]
    step_init: Option<f64>,
    #[arg(long, global = true)]
    step_min: Option<f64>,
    #[arg(long, global = true)]
    corrector_tol: Option<f64>,
    #[arg(long, global = true)]
    dedup_tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum DegreeFamily {
    Lp,
    Qp,
    Sdp,
    Sos,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Formula,
    Polytope,
    Homotopy,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Lp,
    Qp,
    Sdp,
}

#[derive(Subcommand)]
enum Command {
    /// Degree of the central curve.
    Degree {
        #[arg(value_enum)]
        family: DegreeFamily,
        #[arg(long, required_unless_present = "n")]
        m: Option<usize>,
        #[arg(long, required_unless_present = "n")]
        d: Option<usize>,
        /// Number of variables of the form (sos only).
        #[arg(long, requires = "two_d", conflicts_with_all = ["m", "d"])]
        n: Option<usize>,
        /// Degree of the form (sos only).
        #[arg(long = "two-d")]
        two_d: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Genus of the central curve.
    Genus {
        #[command(subcommand)]
        kind: GenusKind,
    },
    /// Trace the central path of a random instance.
    Path {
        #[arg(value_enum)]
        family: PathArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda_start: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run every desk-scale check and print a pass/fail table.
    ReproducePaper,
}

#[derive(Subcommand)]
enum GenusKind {
    SdpSpecial {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
    },
    Lp {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
    },
    Hvector {
        /// Coefficients h_0,h_1,...
        #[arg(value_delimiter = ',', required = true)]
        h: Vec<u64>,
    },
}

impl Common {
    fn run_config(&self) -> RunConfig {
        let mut tracker = TrackerConfig::default();
        if let Some(s) = &self.tracker_seeds {
            tracker.seeds = s.clone();
        }
        let overrides = [
            (self.step_init, &mut tracker.step_init),
            (self.step_min, &mut tracker.step_min),
            (self.corrector_tol, &mut tracker.corrector_tol),
            (self.dedup_tol, &mut tracker.dedup_tol),
        ];
        for (v, slot) in overrides {
            if let Some(v) = v {
                *slot = v;
            }
        }
        RunConfig {
            seed: self.seed,
            tracker,
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Text => OutputFormat::Text,
            },
            out: self.out.clone(),
            timings: self.timings,
        }
    }
}

fn render<T: Serialize>(v: &T, cfg: &RunConfig, csv: impl FnOnce() -> String, text: impl FnOnce() -> String) -> Result<String> {
    Ok(match cfg.format {
        OutputFormat::Json => to_json(v, cfg.timings)? + "\n",
        OutputFormat::Csv => csv(),
        OutputFormat::Text => text(),
    })
}

/// Output text and, when an internal check failed, what failed.
fn run(cli: &Cli) -> Result<(String, Option<String>)> {
    let cfg = cli.common.run_config();
    match &cli.command {
        Command::Degree {
            family,
            m,
            d,
            n,
            two_d,
            method,
        } => {
            let target = match (family, n, two_d) {
                (DegreeFamily::Sos, Some(n), Some(two_d)) => Target::Sos { n: *n, two_d: *two_d },
                (DegreeFamily::Sos, _, _) => return Err(Error::Invalid("sos needs --n and --two-d".into())),
                (_, Some(_), _) => return Err(Error::Invalid("--n and --two-d are for sos only".into())),
                (f, None, _) => {
                    let (m, d) = (m.expect("required"), d.expect("required"));
                    match f {
                        DegreeFamily::Lp => Target::Lp { m, d },
                        DegreeFamily::Qp => Target::Qp { m, d },
                        _ => Target::Sdp { m, d },
                    }
                }
            };
            let method = match method {
                MethodArg::Formula => MethodChoice::Formula,
                MethodArg::Polytope => MethodChoice::Polytope,
                MethodArg::Homotopy => MethodChoice::Homotopy,
                MethodArg::All => MethodChoice::All,
            };
            let o = cmd_degree(&target, method, &cfg)?;
            Ok((render(&o, &cfg, || o.to_csv(), || o.to_text())?, None))
        }
        Command::Genus { kind } => {
            let query = match kind {
                GenusKind::SdpSpecial { m, d } => GenusQuery::SdpSpecial { m: *m, d: *d },
                GenusKind::Lp { m, d } => GenusQuery::Lp { m: *m, d: *d },
                GenusKind::Hvector { h } => GenusQuery::Hvector { h: h.clone() },
            };
            let o = cmd_genus(&query)?;
            Ok((render(&o, &cfg, || o.to_csv(), || o.to_text())?, None))
        }
        Command::Path {
            family,
            m,
            d,
            lambda_start,
            sigma,
            steps,
        } => {
            let defaults = ScheduleConfig::default();
            let sched = ScheduleConfig {
                lambda_start: lambda_start.unwrap_or(defaults.lambda_start),
                sigma: sigma.unwrap_or(defaults.sigma),
                steps: steps.unwrap_or(defaults.steps),
                ..defaults
            };
            let family = match family {
                PathArg::Lp => PathFamily::Lp,
                PathArg::Qp => PathFamily::Qp,
                PathArg::Sdp => PathFamily::Sdp,
            };
            let o = cmd_path(family, *m, *d, &sched, &cfg)?;
            // the samples go to --out; stdout carries the summary
            let csv = || centraldeg::centralpath::to_csv(&o.trace).unwrap_or_default();
            let text = render(&o, &cfg, csv, || o.to_text())?;
            let failure = match o.failure_lambda {
                Some(lambda) => Some(format!("newton failed at lambda {lambda:e}; kept {} samples", o.samples)),
                None if !o.passed() => Some("a sample violates the central path invariants".into()),
                None => None,
            };
            Ok((text, failure))
        }
        Command::ReproducePaper => {
            let r = reproduce_paper(cfg.seed, &cfg.tracker);
            let failed: Vec<String> = r.claims.iter().filter(|c| !c.pass).map(|c| c.id.to_string()).collect();
            let failure = (!failed.is_empty()).then(|| format!("failed claims: {}", failed.join(", ")));
            Ok((render(&r, &cfg, || r.to_csv(), || r.to_text())?, failure))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let writes_report = !matches!(cli.command, Command::Path { .. });
    match run(&cli) {
        Ok((text, failure)) => {
            match (&cli.common.out, writes_report) {
                (Some(path), true) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: {e}");
                        return ExitCode::FAILURE;
                    }
                }
                _ => print!("{text}"),
            }
            match failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
