//! `dpsynth` command-line front end.
//!
//! Exit codes: 0 success (audits: all checks passed), 1 usage, I/O or format error,
//! 2 privacy gate refused the run (audits: a check failed).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dpsynth::audit::{
    boolean_experiment, deviation_check_empirical, privacy_audit, render_errors,
    reweighted_deviation_check, BooleanExperiment,
};
use dpsynth::data::{Dataset, QueryFamily, Schema};
use dpsynth::distributions::{
    renyi_condition_number_exact, renyi_condition_number_mc, Distribution, ProductDistribution,
};
use dpsynth::queries::parse_query_spec;
use dpsynth::report::Report;
use dpsynth::synth::{generate, PipelineConfig};

#[derive(Parser)]
#[command(name = "dpsynth", version, about = "Differentially private synthetic data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from private records.
    Generate(GenerateArgs),
    /// Run one of the statistical verification checks.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Compute the condition number kappa(nu || mu).
    Kappa(KappaArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Private dataset file.
    #[arg(long)]
    data: PathBuf,
    /// Query spec file.
    #[arg(long)]
    queries: PathBuf,
    /// Sampling distribution spec file, or `uniform`.
    #[arg(long)]
    mu: String,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    gamma: f64,
    /// Synthetic sample size.
    #[arg(long)]
    k: usize,
    /// Reduced domain size.
    #[arg(long)]
    m: usize,
    /// Privacy budget to enforce; without it the achieved epsilon is only reported.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Trusted upper bound on kappa(nu || mu).
    #[arg(long, default_value_t = 1.0)]
    kappa_bound: f64,
    #[arg(long)]
    seed: u64,
    /// Output path for the synthetic dataset.
    #[arg(long)]
    out: PathBuf,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Generate even when the epsilon gate fails.
    #[arg(long)]
    allow_privacy_override: bool,
    /// Include the noisy targets (already private) in the report.
    #[arg(long)]
    export_noisy_targets: bool,
}

#[derive(Subcommand)]
enum AuditCommand {
    /// Deviation of the empirical statistics of n samples from nu.
    Lemma3(Lemma3Args),
    /// Deviation of the reweighted reduced-domain measure.
    Lemma4(Lemma4Args),
    /// Histogram audit of the noisy-statistics release on two neighboring datasets.
    Dp(DpArgs),
    /// Repeated end-to-end runs on uniform Boolean data with low-degree marginals.
    Corollary(CorollaryArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: u64,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Lemma3Args {
    /// Distribution spec file, or `uniform` (with --dims).
    #[arg(long)]
    nu: String,
    /// Boolean dimension for `uniform`.
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Lemma4Args {
    #[arg(long)]
    nu: String,
    #[arg(long)]
    mu: String,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DpArgs {
    #[arg(long)]
    d1: PathBuf,
    #[arg(long)]
    d2: PathBuf,
    /// At most three functions.
    #[arg(long)]
    queries: PathBuf,
    /// Laplace scale of the audited release.
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 1_000_000)]
    trials: usize,
    #[arg(long, default_value_t = 40)]
    bins: usize,
    #[arg(long, default_value_t = 0.15)]
    slack: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CorollaryArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct KappaArgs {
    #[arg(long)]
    nu: String,
    #[arg(long)]
    mu: String,
    /// Boolean dimension when either side is `uniform`.
    #[arg(long)]
    dims: Option<usize>,
    /// Monte-Carlo sample count for an additional estimate.
    #[arg(long, requires = "seed")]
    mc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Audit(cmd) => cmd_audit(cmd),
        Command::Kappa(args) => cmd_kappa(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<dpsynth::Error>() {
                Some(dpsynth::Error::PrivacyGate { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    Dataset::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_queries(path: &Path, schema: &Schema) -> Result<QueryFamily> {
    parse_query_spec(&read(path)?, schema, false)
        .with_context(|| format!("parsing {}", path.display()))
}

/// `uniform` resolves against `schema`; anything else is a spec file.
fn load_distribution(spec: &str, schema: Option<&Schema>, flag: &str) -> Result<Distribution> {
    if spec == "uniform" {
        let Some(schema) = schema else {
            bail!("--{flag} uniform needs --dims");
        };
        return Ok(ProductDistribution::uniform(schema).into());
    }
    let path = Path::new(spec);
    Distribution::parse(&read(path)?).with_context(|| format!("parsing --{flag} {}", path.display()))
}

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    let text = report.to_string();
    print!("{text}");
    if let Some(path) = out {
        write(path, &text)?;
    }
    Ok(())
}

fn pass_code(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode> {
    let data = load_dataset(&args.data)?;
    let schema = data.schema().clone();
    let queries = load_queries(&args.queries, &schema)?;
    let mu = load_distribution(&args.mu, Some(&schema), "mu")?;

    let mut config = PipelineConfig::new(args.delta, args.gamma, args.k, args.m, args.seed);
    config.epsilon = args.epsilon;
    config.kappa_bound = args.kappa_bound;
    config.allow_privacy_override = args.allow_privacy_override;
    config.export_noisy_targets = args.export_noisy_targets;

    let out = generate(&data, &queries, &mu, &config)?;
    write(&args.out, &out.data.to_string())?;

    let mut report = Report::new();
    report
        .push("command", "generate")
        .push("data", args.data.display())
        .push("queries", args.queries.display())
        .push("mu", &args.mu)
        .push("out", args.out.display())
        .push("allow_privacy_override", args.allow_privacy_override)
        .extend(&out.report.to_report());
    let text = report.to_string();
    match &args.report {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_audit(cmd: AuditCommand) -> Result<ExitCode> {
    match cmd {
        AuditCommand::Lemma3(a) => {
            let schema = a.dims.map(Schema::boolean);
            let nu = load_distribution(&a.nu, schema.as_ref(), "nu")?;
            let queries = load_queries(&a.queries, nu.schema())?;
            let rep = deviation_check_empirical(
                &nu, &queries, a.n, a.delta, a.gamma, a.trials, a.common.seed,
            )?;
            let mut r = Report::new();
            r.push("command", "audit lemma3")
                .push("nu", &a.nu)
                .push("queries", a.queries.display())
                .push("family_size", queries.len())
                .push("n", a.n)
                .push("delta", a.delta)
                .push("gamma", a.gamma)
                .push("seed", a.common.seed)
                .extend(&rep.to_report());
            emit(&r, a.common.out.as_deref())?;
            Ok(pass_code(rep.pass))
        }
        AuditCommand::Lemma4(a) => {
            let schema = a.dims.map(Schema::boolean);
            let nu = load_distribution(&a.nu, schema.as_ref(), "nu")?;
            let mu = load_distribution(&a.mu, schema.as_ref().or(Some(nu.schema())), "mu")?;
            let queries = load_queries(&a.queries, nu.schema())?;
            let rep = reweighted_deviation_check(
                &nu, &mu, &queries, a.m, a.delta, a.gamma, a.trials, a.common.seed,
            )?;
            let mut r = Report::new();
            r.push("command", "audit lemma4")
                .push("nu", &a.nu)
                .push("mu", &a.mu)
                .push("queries", a.queries.display())
                .push("family_size", queries.len())
                .push("m", a.m)
                .push("delta", a.delta)
                .push("gamma", a.gamma)
                .push("seed", a.common.seed)
                .extend(&rep.to_report());
            emit(&r, a.common.out.as_deref())?;
            Ok(pass_code(rep.pass))
        }
        AuditCommand::Dp(a) => {
            let d1 = load_dataset(&a.d1)?;
            let d2 = load_dataset(&a.d2)?;
            let queries = load_queries(&a.queries, d1.schema())?;
            let rep = privacy_audit(
                &queries, a.sigma, &d1, &d2, a.trials, a.bins, a.slack, a.common.seed,
            )?;
            let mut r = Report::new();
            r.push("command", "audit dp")
                .push("d1", a.d1.display())
                .push("d2", a.d2.display())
                .push("queries", a.queries.display())
                .push("sigma", a.sigma)
                .push("trials", a.trials)
                .push("bins", a.bins)
                .push("seed", a.common.seed)
                .extend(&rep.to_report());
            emit(&r, a.common.out.as_deref())?;
            Ok(pass_code(rep.pass))
        }
        AuditCommand::Corollary(a) => {
            let rep = boolean_experiment(BooleanExperiment {
                p: a.p,
                d: a.d,
                n: a.n,
                k: a.k,
                m: a.m,
                delta: a.delta,
                gamma: a.gamma,
                trials: a.trials,
                seed: a.common.seed,
            })?;
            let mut r = Report::new();
            r.push("command", "audit corollary").extend(&rep.to_report());
            emit(&r, a.common.out.as_deref())?;
            eprintln!("trial errors: {}", render_errors(&rep.errors));
            Ok(pass_code(rep.pass))
        }
    }
}

fn cmd_kappa(args: KappaArgs) -> Result<ExitCode> {
    let schema = args.dims.map(Schema::boolean);
    let (nu, mu) = if args.nu == "uniform" && schema.is_none() {
        // resolve `uniform` against the other side's schema
        let mu = load_distribution(&args.mu, None, "mu")?;
        let nu = load_distribution(&args.nu, Some(mu.schema()), "nu")?;
        (nu, mu)
    } else {
        let nu = load_distribution(&args.nu, schema.as_ref(), "nu")?;
        let mu = load_distribution(&args.mu, schema.as_ref().or(Some(nu.schema())), "mu")?;
        (nu, mu)
    };
    let exact = renyi_condition_number_exact(&nu, &mu)?;
    println!("kappa_exact: {exact:.9}");
    if let (Some(samples), Some(seed)) = (args.mc, args.seed) {
        let mc = renyi_condition_number_mc(&nu, &mu, samples, seed)?;
        println!("kappa_mc: {mc:.9}");
        println!("mc_samples: {samples}");
        println!("seed: {seed}");
    }
    Ok(ExitCode::SUCCESS)
}
