use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use profilekit::codec::size_budget_bits;
use profilekit::estimate::{collision_tester, pml_uniformity_tester, Estimator};
use profilekit::oracle::{pml_brute, profile_distribution_exact};
use profilekit::profile::max_dimension_bound;
use profilekit::proxy::{en, hs, EN_DEFAULT_TOL};
use profilekit::{decode_block, encode_block, profile_of, Profile, SeqEncoderState};
use profilekit_cli::{emit_report, run_suite, ExperimentConfig, FamilySpec, ReportFormat, Suite};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "profilekit", version, about = "Sample profiles: compression, shape proxies, estimation, experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode the profile of a whitespace-separated symbol sequence as PRFL.
    Compress {
        #[command(flatten)]
        input: Input,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Use the streaming tree encoder instead of the batch encoder.
        #[arg(long)]
        stream: bool,
    },
    /// Decode a PRFL stream and print the profile as JSON.
    Decompress {
        /// PRFL file, or `-` for stdin.
        path: PathBuf,
    },
    /// Profile statistics of a symbol sequence.
    Stats {
        #[command(flatten)]
        input: Input,
    },
    /// Per-interval decomposition of the shape proxy `H^S_n`.
    Hs {
        #[arg(long)]
        family: FamilySpec,
        #[arg(short)]
        n: u64,
    },
    /// Expected Poissonized truncated profile dimension `E_n`.
    En {
        #[arg(long)]
        family: FamilySpec,
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = EN_DEFAULT_TOL)]
        tol: f64,
    },
    /// Exact law of the profile for a small distribution and sample size.
    Oracle {
        #[arg(long)]
        family: FamilySpec,
        #[arg(short)]
        n: u64,
        /// Also report the number of profiles covering `1 − δ` of the mass.
        #[arg(long)]
        delta: Option<f64>,
        /// Print every profile with its probability.
        #[arg(long)]
        full: bool,
    },
    /// Fit a natural estimator to a symbol sequence.
    Estimate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "good-turing")]
        estimator: EstimatorKind,
        /// Alphabet size; required by dirichlet and james-stein.
        #[arg(long)]
        alphabet: Option<u64>,
        /// Pseudo-count for the dirichlet estimator.
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
    },
    /// Test a symbol sequence for uniformity over an alphabet of known size.
    TestUniformity {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        alphabet: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "collision")]
        method: TesterKind,
    },
    /// Run a verification suite and write its report.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct Input {
    /// File of whitespace-separated symbols, or `-` for stdin.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorKind {
    Empirical,
    GoodTuring,
    Dirichlet,
    JamesStein,
}

#[derive(Clone, Copy, ValueEnum)]
enum TesterKind {
    Collision,
    /// Brute-force PML over a grid; only for n ≤ 10.
    Pml,
}

#[derive(Args)]
struct SimulateArgs {
    suite: Suite,
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "PROFILEKIT_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Family in compact form, repeatable (e.g. `uniform:100`, `power-law:1.5:inf`).
    #[arg(long = "family")]
    families: Vec<FamilySpec>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn read_input(path: &Path) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut buf)?;
    } else {
        buf = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    }
    Ok(buf)
}

/// Symbols mapped to integer labels in order of first appearance.
fn read_symbols(path: &Path) -> anyhow::Result<Vec<i64>> {
    let text = String::from_utf8(read_input(path)?).context("input is not UTF-8")?;
    let mut ids: HashMap<&str, i64> = HashMap::new();
    Ok(text
        .split_whitespace()
        .map(|tok| {
            let next = ids.len() as i64;
            *ids.entry(tok).or_insert(next)
        })
        .collect())
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct Stats<'a> {
    n: u64,
    distinct_symbols: u64,
    dimension: usize,
    max_dimension_bound: u64,
    max_multiplicity: u64,
    encoded_bits: u64,
    budget_bits: u64,
    profile: &'a Profile,
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default_for(args.suite),
    };
    cfg.suite = args.suite;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(grid) = args.n_grid {
        cfg.n_grid = grid;
    }
    if !args.families.is_empty() {
        cfg.families = args.families;
    }
    if args.json.is_some() {
        cfg.output.json = args.json;
    }
    if args.csv.is_some() {
        cfg.output.csv = args.csv;
    }
    cfg.validate()?;
    let report = run_suite(&cfg)?;
    if let Some(path) = &cfg.output.json {
        emit_report(&report, ReportFormat::Json, path)?;
    }
    if let Some(path) = &cfg.output.csv {
        emit_report(&report, ReportFormat::Csv, path)?;
    }
    for r in report.failures() {
        eprintln!(
            "FAIL {} {} {} n={} statistic={} bound={} margin={} {}",
            r.case,
            r.claim.as_str(),
            r.family,
            r.n,
            r.statistic,
            r.bound,
            r.margin,
            r.detail
        );
    }
    eprintln!(
        "{}: {}/{} passed ({:.1}%) in {:.2?}",
        report.suite,
        report.passed,
        report.total,
        100.0 * report.pass_rate,
        report.wall_clock
    );
    if cfg.output.json.is_none() && cfg.output.csv.is_none() {
        print_json(&report)?;
    }
    if report.passed != report.total {
        std::process::exit(1);
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Compress { input, output, stream } => {
            let symbols = read_symbols(&input.input)?;
            let bytes = if stream {
                let mut enc: SeqEncoderState<i64> = SeqEncoderState::new();
                for s in symbols {
                    enc.feed_symbol(s);
                }
                enc.finalize().1
            } else {
                encode_block(&profile_of(symbols))
            };
            match output {
                Some(path) => std::fs::write(&path, bytes.as_bytes()).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(bytes.as_bytes())?,
            }
        }
        Command::Decompress { path } => {
            let profile = decode_block(&read_input(&path)?).map_err(|e| anyhow::anyhow!("decode error {}: {e}", e.code()))?;
            println!("{}", profile.to_json());
        }
        Command::Stats { input } => {
            let profile = profile_of(read_symbols(&input.input)?);
            print_json(&Stats {
                n: profile.len(),
                distinct_symbols: profile.distinct_symbols(),
                dimension: profile.dimension(),
                max_dimension_bound: max_dimension_bound(profile.len(), None),
                max_multiplicity: profile.max_multiplicity(),
                encoded_bits: encode_block(&profile).size_bits(),
                budget_bits: size_budget_bits(&profile),
                profile: &profile,
            })?;
        }
        Command::Hs { family, n } => print_json(&hs(&family.build()?, n)?)?,
        Command::En { family, n, tol } => print_json(&en(&family.build()?, n, tol)?)?,
        Command::Oracle { family, n, delta, full } => {
            let law = profile_distribution_exact(&family.build()?, n)?;
            if full {
                println!("{}", law.to_json());
            } else {
                let (mean, variance) = law.dimension_moments();
                print_json(&serde_json::json!({
                    "n": law.n,
                    "alphabet_size": law.alphabet_size,
                    "profiles": law.entries.len(),
                    "entropy": law.entropy(),
                    "dimension_mean": mean,
                    "dimension_variance": variance,
                    "typical_cardinality": delta.map(|d| law.typical_cardinality(d)).transpose()?,
                }))?;
            }
        }
        Command::Estimate {
            input,
            estimator,
            alphabet,
            beta,
        } => {
            let profile = profile_of(read_symbols(&input.input)?);
            let est = match estimator {
                EstimatorKind::Empirical => Estimator::Empirical,
                EstimatorKind::GoodTuring => Estimator::GoodTuring,
                EstimatorKind::Dirichlet => Estimator::Dirichlet { beta },
                EstimatorKind::JamesStein => Estimator::JamesStein,
            };
            print_json(&est.fit(&profile, alphabet)?)?;
        }
        Command::TestUniformity {
            input,
            alphabet,
            epsilon,
            method,
        } => {
            let profile = profile_of(read_symbols(&input.input)?);
            match method {
                TesterKind::Collision => print_json(&collision_tester(&profile, alphabet, epsilon)?)?,
                TesterKind::Pml => {
                    if alphabet > 8 {
                        bail!("the brute-force PML solver supports alphabets of at most 8");
                    }
                    let outcome = pml_uniformity_tester(&profile, alphabet, epsilon, |f| {
                        Ok(pml_brute(f, alphabet as usize, 1.0 / 40.0)?.distribution)
                    })?;
                    print_json(&outcome)?;
                }
            }
        }
        Command::Simulate(args) => simulate(args)?,
    }
    Ok(())
}
