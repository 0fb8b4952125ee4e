//! The end-to-end generator: noisy statistics, min-max reweighting, bootstrap.
//!
//! The true records are read exactly once, to compute their exact statistics. Everything
//! downstream (the reduced domain, the fit and the bootstrap) sees only the noisy targets,
//! so the output inherits their privacy by post-processing.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, RngCore};

use crate::data::{evaluate_all, Dataset, FiniteDensity, QueryFamily, Schema};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::mechanism::{perturb, privacy_check, sensitivity_bound, sigma_for, substream, PrivacyCheck};
use crate::optimize::{build_lp, solve_min_max, SolveStatus, SolverOptions};
use crate::report::Report;

/// Read access to the private records.
///
/// The generator calls [`RecordSource::records`] exactly once per run; schema and size are
/// metadata and may be queried freely.
pub trait RecordSource {
    fn schema(&self) -> &Schema;
    fn len(&self) -> usize;
    fn records(&self) -> &Dataset;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RecordSource for Dataset {
    fn schema(&self) -> &Schema {
        Dataset::schema(self)
    }

    fn len(&self) -> usize {
        Dataset::len(self)
    }

    fn records(&self) -> &Dataset {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Accuracy target `δ`; fixes `σ = δ / ln(|F|/γ)`.
    pub delta: f64,
    /// Failure probability `γ`.
    pub gamma: f64,
    /// Privacy budget to enforce. When absent the achieved `ε = Δ/σ` is only reported.
    pub epsilon: Option<f64>,
    /// Synthetic sample size.
    pub k: usize,
    /// Size of the reduced domain drawn from `μ`.
    pub m: usize,
    /// Trusted upper bound on `κ(ν‖μ)`.
    pub kappa_bound: f64,
    pub seed: u64,
    /// Flag `δ ∉ (0, 1/2]` or `γ ∉ (0, 1/4)` as configuration violations.
    pub check_accuracy_ranges: bool,
    /// Generate even when the `ε` gate fails.
    pub allow_privacy_override: bool,
    /// Include the (already private) noisy targets in the report.
    pub export_noisy_targets: bool,
    /// Replaces the computed `σ`. Test hook; it voids the guarantees.
    pub sigma_override: Option<f64>,
    pub solver: SolverOptions,
}

impl PipelineConfig {
    pub fn new(delta: f64, gamma: f64, k: usize, m: usize, seed: u64) -> Self {
        Self {
            delta,
            gamma,
            epsilon: None,
            k,
            m,
            kappa_bound: 1.0,
            seed,
            check_accuracy_ranges: true,
            allow_privacy_override: false,
            export_noisy_targets: false,
            sigma_override: None,
            solver: SolverOptions::default(),
        }
    }
}

/// Advisory parameter validation against the privacy and accuracy thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Present when an `ε` was supplied.
    pub privacy: Option<PrivacyCheck>,
    /// `δ⁻² ln(|F|/γ)`, required of both `n` and `k`.
    pub threshold_n_k: f64,
    /// `δ⁻² K |F| / γ`.
    pub threshold_m: f64,
    pub accuracy_pass: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn privacy_pass(&self) -> Option<bool> {
        self.privacy.map(|p| p.pass)
    }
}

pub fn validate_params(config: &PipelineConfig, n: usize, family_size: usize) -> ValidationReport {
    let mut violations = Vec::new();
    let (delta, gamma) = (config.delta, config.gamma);
    if config.check_accuracy_ranges {
        if !(delta > 0.0 && delta <= 0.5) {
            violations.push(format!("delta = {delta} outside (0, 1/2]"));
        }
        if !(gamma > 0.0 && gamma < 0.25) {
            violations.push(format!("gamma = {gamma} outside (0, 1/4)"));
        }
    }
    if config.k == 0 {
        violations.push("k must be at least 1".into());
    }
    if config.m == 0 {
        violations.push("m must be at least 1".into());
    }
    if !(config.kappa_bound >= 1.0) {
        violations.push(format!("kappa bound {} below 1", config.kappa_bound));
    }
    let f = family_size as f64;
    let inv_sq = 1.0 / (delta * delta);
    let threshold_n_k = inv_sq * (f / gamma).ln();
    let threshold_m = inv_sq * config.kappa_bound * f / gamma;
    let accuracy_pass = violations.is_empty()
        && (n.min(config.k) as f64) >= threshold_n_k
        && config.m as f64 >= threshold_m;
    let privacy = config.epsilon.and_then(|eps| {
        match privacy_check(n, eps, delta, family_size, gamma) {
            Ok(check) => Some(check),
            Err(e) => {
                violations.push(e.to_string());
                None
            }
        }
    });
    ValidationReport {
        privacy,
        threshold_n_k,
        threshold_m,
        accuracy_pass,
        violations,
    }
}

/// `k` i.i.d. draws from `h`.
pub fn bootstrap<R: Rng + ?Sized>(h: &FiniteDensity, k: usize, rng: &mut R) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let sampler = WeightedIndex::new(h.weights()).map_err(|e| Error::param(e.to_string()))?;
    let support = h.support().points();
    let points = (0..k).map(|_| support[sampler.sample(rng)].clone()).collect();
    Ok(Dataset::from_parts_unchecked(h.support().schema().clone(), points))
}

/// Everything a run produced besides the synthetic records. Holds no raw statistic of the
/// true data.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub seed: u64,
    pub n: usize,
    pub family_size: usize,
    pub constant_added: bool,
    pub sigma: f64,
    pub sensitivity: f64,
    pub epsilon_achieved: f64,
    pub validation: ValidationReport,
    pub lp_objective: f64,
    pub lp_status: SolveStatus,
    pub lp_iterations: usize,
    pub support_points: usize,
    pub noisy_targets: Option<Vec<f64>>,
    pub config: PipelineConfig,
}

impl GenerationReport {
    pub fn to_report(&self) -> Report {
        let c = &self.config;
        let v = &self.validation;
        let mut r = Report::new();
        r.push("seed", self.seed)
            .push_real("delta", c.delta)
            .push_real("gamma", c.gamma)
            .push(
                "epsilon",
                c.epsilon.map_or("none".to_string(), crate::report::sig9),
            )
            .push("k", c.k)
            .push("m", c.m)
            .push_real("kappa_bound", c.kappa_bound)
            .push("n", self.n)
            .push("family_size", self.family_size)
            .push("constant_added", self.constant_added)
            .push_real("sigma", self.sigma)
            .push_real("sensitivity", self.sensitivity)
            .push_real("epsilon_achieved", self.epsilon_achieved);
        if let Some(p) = v.privacy {
            r.push_real("required_n", p.required_n)
                .push("privacy_pass", p.pass);
        }
        r.push_real("accuracy_threshold_n_k", v.threshold_n_k)
            .push_real("accuracy_threshold_m", v.threshold_m)
            .push("accuracy_pass", v.accuracy_pass)
            .push(
                "config_violations",
                if v.violations.is_empty() {
                    "none".to_string()
                } else {
                    v.violations.join("; ")
                },
            )
            .push_real("lp_objective", self.lp_objective)
            .push(
                "lp_status",
                match self.lp_status {
                    SolveStatus::Optimal => "optimal",
                    SolveStatus::IterationLimit => "iteration-limit",
                },
            )
            .push("lp_iterations", self.lp_iterations)
            .push("support_points", self.support_points);
        if let Some(t) = &self.noisy_targets {
            r.push_reals("noisy_targets", t);
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub data: Dataset,
    pub report: GenerationReport,
}

/// Independent seeds for the three random stages of one run.
fn stage_seeds(seed: u64) -> (u64, u64, u64) {
    let mut rng = substream(seed, 0);
    (rng.next_u64(), rng.next_u64(), rng.next_u64())
}

/// Runs the full generator on the private records `x`.
pub fn generate<S: RecordSource + ?Sized>(
    x: &S,
    queries: &QueryFamily,
    mu: &Distribution,
    config: &PipelineConfig,
) -> Result<Synthesis> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.schema() != queries.schema() || x.schema() != mu.schema() {
        return Err(Error::SchemaMismatch(
            "data, family and sampling distribution must share a schema".into(),
        ));
    }
    if config.k == 0 || config.m == 0 {
        return Err(Error::param("k and m must be at least 1"));
    }
    let mut queries = queries.clone();
    let constant_added = queries.ensure_constant();
    let family_size = queries.len();
    let n = x.len();

    let validation = validate_params(config, n, family_size);
    if let (Some(check), false) = (validation.privacy, config.allow_privacy_override) {
        if !check.pass {
            return Err(Error::PrivacyGate {
                n,
                required_n: check.required_n,
                epsilon: config.epsilon.unwrap_or(f64::NAN),
            });
        }
    }
    let sigma = match config.sigma_override {
        Some(s) => s,
        None => sigma_for(config.delta, family_size as f64, config.gamma)?,
    };
    let sensitivity = sensitivity_bound(family_size, n);

    // the only read of the private records
    let exact = evaluate_all(&queries, x.records())?;

    let (omega_seed, noise_seed, bootstrap_seed) = stage_seeds(config.seed);
    let noisy = perturb(&exact, sigma, noise_seed)?;
    drop(exact);

    let omega_star = mu.sample(config.m, omega_seed)?;
    let problem = build_lp(&queries, &omega_star, &noisy)?;
    let solution = solve_min_max(&problem, &config.solver)?;
    let mut rng = substream(bootstrap_seed, 0);
    let data = bootstrap(&solution.density, config.k, &mut rng)?;

    let report = GenerationReport {
        seed: config.seed,
        n,
        family_size,
        constant_added,
        sigma,
        sensitivity,
        epsilon_achieved: sensitivity / sigma,
        validation,
        lp_objective: solution.objective,
        lp_status: solution.status,
        lp_iterations: solution.iterations,
        support_points: problem.cols(),
        noisy_targets: config.export_noisy_targets.then(|| noisy.into_values()),
        config: config.clone(),
    };
    Ok(Synthesis { data, report })
}
