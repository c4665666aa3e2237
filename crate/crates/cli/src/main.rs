use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use scurve_cli::commands;
use scurve_cli::config::{Format, Settings, CONFIG_ENV};
use scurve_cli::report::ReportDocument;
use scurve_core::C64;

/// S-curves, trajectories, equilibrium measures and orthogonal-polynomial
/// zeros for the cubic and quintic potentials.
///
/// Settings are layered: built-in defaults, then the config file (`--config`,
/// else $SCURVE_CONFIG), then `--set key=value`, then dedicated flags.
/// Exit status: 0 all checks pass, 1 some check failed, 2 error.
#[derive(Parser)]
#[command(name = "scurve", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, global = true)]
    emit: Option<String>,
    /// Decimal digits for moments and the Hankel solve.
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Line-oriented `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override any config key, e.g. `--set drift_tol=1e-9`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct Member {
    /// cubic or quintic.
    #[arg(long)]
    family: Option<String>,
    /// Cubic parameter.
    #[arg(long = "K", allow_negative_numbers = true)]
    k: Option<f64>,
    /// Quintic contour class, `3,1` or `4,5`.
    #[arg(long)]
    class: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Cubic family member: parameters, phase, arc, tails, equilibrium, figure.
    Cubic {
        #[arg(long = "K", allow_negative_numbers = true, conflicts_with = "critical")]
        k: Option<f64>,
        /// Print the critical constants instead.
        #[arg(long)]
        critical: bool,
    },
    /// Quintic S-curve for a contour class.
    Quintic {
        #[arg(long)]
        class: Option<String>,
    },
    /// Export one trajectory.
    Trace {
        #[command(flatten)]
        member: Member,
        /// Zero of Q to start from.
        #[arg(long)]
        zero: Option<usize>,
        /// Emanation direction index at that zero.
        #[arg(long)]
        angle: Option<usize>,
        /// horizontal or vertical.
        #[arg(long)]
        kind: Option<String>,
        /// Trace both ways through a regular point `re,im` instead.
        #[arg(long, allow_hyphen_values = true)]
        through: Option<String>,
    },
    /// Zeros of the orthogonal polynomial of degree n.
    Zeros {
        #[command(flatten)]
        member: Member,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Comma-separated criterion numbers.
        #[arg(long)]
        criteria: Option<String>,
    },
}

fn set_member(s: &mut Settings, m: &Member) -> Result<()> {
    if let Some(f) = &m.family {
        s.set("family", f)?;
    }
    if let Some(k) = m.k {
        s.set("K", &k.to_string())?;
    }
    if let Some(c) = &m.class {
        s.set("class", c)?;
    }
    Ok(())
}

fn parse_point(text: &str) -> Result<C64> {
    let (re, im) = text.split_once(',').context("expected re,im")?;
    Ok(C64::new(re.trim().parse()?, im.trim().parse()?))
}

fn settings(cli: &Cli) -> Result<Settings> {
    let g = &cli.global;
    let mut s = Settings::defaults();
    let path = g.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(path) = path {
        s.apply_file(&path)?;
    }
    for kv in &g.sets {
        let Some((k, v)) = kv.split_once('=') else {
            bail!("--set expects KEY=VALUE, got {kv:?}");
        };
        s.set(k.trim(), v.trim())?;
    }
    if let Some(out) = &g.out {
        s.set("out", &out.display().to_string())?;
    }
    if let Some(e) = &g.emit {
        s.set("emit", e)?;
    }
    if let Some(d) = g.digits {
        s.set("digits", &d.to_string())?;
    }
    if let Some(seed) = g.seed {
        s.set("seed", &seed.to_string())?;
    }
    match &cli.command {
        Command::Cubic { k, .. } => {
            s.set("family", "cubic")?;
            if let Some(k) = k {
                s.set("K", &k.to_string())?;
            }
        }
        Command::Quintic { class } => {
            s.set("family", "quintic")?;
            if let Some(c) = class {
                s.set("class", c)?;
            }
        }
        Command::Trace { member, zero, angle, kind, .. } => {
            set_member(&mut s, member)?;
            if let Some(z) = zero {
                s.set("zero", &z.to_string())?;
            }
            if let Some(a) = angle {
                s.set("angle", &a.to_string())?;
            }
            if let Some(k) = kind {
                s.set("kind", k)?;
            }
        }
        Command::Zeros { member, n } => {
            set_member(&mut s, member)?;
            if let Some(n) = n {
                s.set("n", &n.to_string())?;
            }
        }
        Command::Verify { criteria } => {
            if let Some(c) = criteria {
                s.set("criteria", c)?;
            }
        }
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<ReportDocument> {
    let cfg = settings(cli)?.resolve()?;
    let report = match &cli.command {
        Command::Cubic { critical: true, .. } => {
            let report = commands::cubic_critical(&cfg)?;
            if let Some(c) = report.results.get("critical") {
                for key in ["v", "a", "b", "k"] {
                    let name = if key == "k" { "K" } else { key };
                    println!("{name}* = {}", c[key]);
                }
            }
            report
        }
        Command::Cubic { .. } => commands::cubic(&cfg)?,
        Command::Quintic { .. } => commands::quintic(&cfg)?,
        Command::Trace { through, .. } => {
            let point = through.as_deref().map(parse_point).transpose()?;
            commands::trace(&cfg, point)?
        }
        Command::Zeros { .. } => commands::zeros(&cfg)?,
        Command::Verify { .. } => {
            let report = commands::verify(&cfg, |o| println!("{}", o.line()))?;
            println!("overall {}", report.status.label());
            return Ok(written(report, &cfg.out, cfg.emits(Format::Json)));
        }
    };
    for c in &report.checks {
        println!("{}", c.line());
    }
    println!("overall {}", report.status.label());
    Ok(written(report, &cfg.out, cfg.emits(Format::Json)))
}

fn written(report: ReportDocument, out: &std::path::Path, json: bool) -> ReportDocument {
    if json {
        eprintln!("report: {}", out.join("report.json").display());
    }
    report
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) if report.passed() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
