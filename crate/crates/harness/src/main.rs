use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use microsob_core::indices::IndexHypotheses;
use microsob_core::product::ProductMode;
use microsob_core::{synthesize, DistributionSpec};
use microsob_harness::config::{ConfigError, ExperimentConfig, Operation};
use microsob_harness::report::{Verdict, VerificationReport};
use microsob_harness::run::{run, RunOutcome, REPORT_FILE};
use microsob_harness::{corpus, plot, suites};

const DEFAULT_OUT: &str = "microsob-out";

#[derive(Parser)]
#[command(
    name = "microsob",
    version,
    about = "Microlocal Sobolev experiments on periodic spectral grids"
)]
struct Cli {
    /// Experiment config (JSON); runs its operations when no command is given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "MICROSOB_OUT")]
    out: Option<PathBuf>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    grid_size: Option<usize>,
    /// Gate products on estimated wave fronts instead of catalog ones.
    #[arg(long, global = true)]
    estimate: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a corpus member's coefficients and annulus profile.
    Synth { member: String },
    /// Global order, order field and WF^r of a member.
    Analyze {
        member: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Tensor seminorm bound and tensor order field of a pair.
    Tensor { first: String, second: String },
    /// Gated product of two members.
    Multiply(MultiplyArgs),
    /// Run a named acceptance suite, or all of them.
    VerifySuite {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        name: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Summarize a stored report; exits 1 if it holds a failure.
    Report { path: Option<PathBuf> },
    /// List corpus labels and suite names.
    List,
}

#[derive(Args)]
struct MultiplyArgs {
    first: String,
    second: String,
    /// `r',r'',r1,r2`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    hypotheses: Vec<f64>,
    /// Use the disjoint-support gate.
    #[arg(long)]
    disjoint: bool,
    /// Expect rejection with this error kind.
    #[arg(long)]
    expect_error: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.grid_size {
        cfg.grid.size = n;
    }
    Ok(cfg)
}

fn output_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| DEFAULT_OUT.into())
}

/// Resolves a member argument (config name, corpus label, or inline JSON spec) and registers it.
fn register(
    cfg: &mut ExperimentConfig,
    arg: &str,
    slot: &str,
) -> Result<(String, DistributionSpec)> {
    if arg.trim_start().starts_with('{') {
        let spec: DistributionSpec = serde_json::from_str(arg).map_err(ConfigError::from)?;
        cfg.corpus.insert(slot.into(), spec.clone());
        return Ok((slot.into(), spec));
    }
    let spec = cfg.member(arg)?;
    Ok((arg.into(), spec))
}

/// Sets the grid dimension from the members unless a config fixed it.
fn fit_grid(cli: &Cli, cfg: &mut ExperimentConfig, spec: &DistributionSpec) {
    if cli.config.is_none() {
        cfg.grid.dim = spec.dim();
        if cli.grid_size.is_none() && spec.dim() == 2 {
            cfg.grid.size = 256;
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    let mut cfg = base_config(&cli)?;
    let op = match &cli.command {
        None if cli.config.is_some() => None,
        None => bail!(ConfigError::Invalid(
            "nothing to do: give a command or --config".into()
        )),
        Some(Command::List) => {
            println!("corpus: {}", corpus::labels().join(", "));
            for s in suites::SUITES {
                println!("suite {:>2} {:<20} {}", s.criterion, s.name, s.summary);
            }
            return Ok(0);
        }
        Some(Command::Report { path }) => {
            let path = path
                .clone()
                .unwrap_or_else(|| output_dir(&cli, &cfg).join(REPORT_FILE));
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let report = VerificationReport::from_json(&text)?;
            print_report(&report);
            return Ok(u8::from(report.any_failed()));
        }
        Some(Command::Synth { member }) => {
            let (name, spec) = register(&mut cfg, member, "inline")?;
            fit_grid(&cli, &mut cfg, &spec);
            return synth(&name, &spec, &cfg, &output_dir(&cli, &cfg));
        }
        Some(Command::Analyze { member, r }) => {
            let (name, spec) = register(&mut cfg, member, "inline")?;
            fit_grid(&cli, &mut cfg, &spec);
            Some(Operation::Analyze {
                member: name,
                r: Some(*r),
            })
        }
        Some(Command::Tensor { first, second }) => {
            let (a, spec) = register(&mut cfg, first, "first")?;
            let (b, _) = register(&mut cfg, second, "second")?;
            fit_grid(&cli, &mut cfg, &spec);
            Some(Operation::Tensor {
                first: a,
                second: b,
            })
        }
        Some(Command::Multiply(args)) => {
            let (a, spec) = register(&mut cfg, &args.first, "first")?;
            let (b, _) = register(&mut cfg, &args.second, "second")?;
            fit_grid(&cli, &mut cfg, &spec);
            let [rp, rpp, r1, r2] = args.hypotheses[..] else {
                bail!(ConfigError::Invalid(
                    "--hypotheses needs r',r'',r1,r2".into()
                ));
            };
            cfg.hypotheses.insert(
                "cli".into(),
                IndexHypotheses::new(rp, rpp, r1, r2, cfg.grid.dim),
            );
            Some(Operation::Multiply {
                first: a,
                second: b,
                hypotheses: "cli".into(),
                mode: if args.disjoint {
                    ProductMode::DisjointSupport
                } else {
                    ProductMode::General
                },
                l1: None,
                l2: None,
                estimate: cli.estimate,
                expect_error: args.expect_error.clone(),
            })
        }
        Some(Command::VerifySuite { name, all }) => {
            let name = if *all {
                "all".to_string()
            } else {
                name.clone().ok_or_else(|| anyhow!("--name or --all"))?
            };
            Some(Operation::VerifySuite { name })
        }
    };
    if let Some(op) = op {
        cfg.operations = vec![op];
    } else if cli.estimate {
        for op in &mut cfg.operations {
            if let Operation::Multiply { estimate, .. } = op {
                *estimate = true;
            }
        }
    }
    cfg.validate()?;
    let out = output_dir(&cli, &cfg);
    let outcome = run(&cfg, &out)?;
    print_outcome(&outcome, &out);
    Ok(outcome.exit_code() as u8)
}

fn synth(name: &str, spec: &DistributionSpec, cfg: &ExperimentConfig, out: &Path) -> Result<u8> {
    let grid = cfg.grid_spec()?;
    let u = synthesize(spec, &grid)?;
    std::fs::create_dir_all(out)?;
    let path = out.join(format!("{name}.msd"));
    u.write_binary(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    let profile = out.join(format!("{name}-profile.csv"));
    plot::write_annulus_profile(&u, &profile)?;
    println!(
        "{} ({} coefficients, N = {})",
        path.display(),
        grid.len(),
        grid.size()
    );
    println!("{}", profile.display());
    Ok(0)
}

fn print_report(report: &VerificationReport) {
    for (_, checks) in report.sections() {
        for c in checks {
            let tag = if c.expected_reject {
                " (expected reject)"
            } else {
                ""
            };
            println!("{:<9} {}{tag}", c.verdict.to_string(), c.id);
            if c.verdict != Verdict::Pass && !c.note.is_empty() {
                println!("          {}", c.note);
            }
        }
    }
    for s in report.summary() {
        println!(
            "[{}] {} passed, {} failed, {} undecided",
            s.name, s.passed, s.failed, s.undecided
        );
    }
}

fn print_outcome(outcome: &RunOutcome, out: &Path) {
    print_report(&outcome.report);
    println!("report: {}", out.join(REPORT_FILE).display());
}
