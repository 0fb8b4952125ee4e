//! Empirical verification of the privacy and accuracy guarantees.
//!
//! Every check is a seeded Monte-Carlo experiment whose pass criterion allows the
//! theoretical failure probability plus three binomial standard errors.

use std::collections::HashMap;

use rand::RngCore;
use rayon::prelude::*;

use crate::data::{
    accuracy_error, evaluate_all, CompensatedSum, DataPoint, Dataset, QueryFamily,
    StatisticsVector,
};
use crate::distributions::{density_ratio, renyi_condition_number_exact, Distribution, ProductDistribution};
use crate::error::{Error, Result};
use crate::mechanism::{laplace_sample, perturb, sigma_for, substream};
use crate::queries::{marginal_family, MarginalKind};
use crate::report::{sig9, Report};
use crate::synth::{generate, PipelineConfig};

/// `rate + 3·√(rate/trials)`: the allowed empirical failure frequency.
pub fn allowed_failure_rate(rate: f64, trials: usize) -> f64 {
    rate + 3.0 * (rate / trials as f64).sqrt()
}

/// The importance-weighted empirical measure `(1/m) Σ (dν/dμ)(Z_i) δ_{Z_i}` with `Z_i ~ μ`.
/// Unbiased for `ν`, but its total mass `r` is generally not one.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightedMeasure {
    support: Dataset,
    weights: Vec<f64>,
    total_mass: f64,
}

impl ReweightedMeasure {
    pub fn new(nu: &Distribution, mu: &Distribution, sample: Dataset) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let m = sample.len() as f64;
        let weights = sample
            .points()
            .iter()
            .map(|z| density_ratio(nu, mu, z).map(|r| r / m))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = CompensatedSum::default();
        weights.iter().for_each(|w| acc.add(*w));
        Ok(Self {
            support: sample,
            weights,
            total_mass: acc.value(),
        })
    }

    pub fn support(&self) -> &Dataset {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `r = ⟨1, ν'_m⟩`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn statistics(&self, queries: &QueryFamily) -> Result<StatisticsVector> {
        if queries.schema() != self.support.schema() {
            return Err(Error::SchemaMismatch("family and sample schemas differ".into()));
        }
        let schema = self.support.schema();
        let values = queries
            .functions()
            .iter()
            .map(|f| {
                let mut acc = CompensatedSum::default();
                for (z, w) in self.support.points().iter().zip(&self.weights) {
                    acc.add(w * f.eval(schema, z));
                }
                acc.value()
            })
            .collect();
        Ok(StatisticsVector::new(values))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    /// `δ⁻² ln(|F|/γ)`.
    pub threshold_n: f64,
    pub allowed_rate: f64,
    pub pass: bool,
}

impl DeviationReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("lemma3_trials", self.trials)
            .push_real("lemma3_failure_rate", self.failure_rate)
            .push_real("lemma3_allowed_rate", self.allowed_rate)
            .push_real("lemma3_threshold_n", self.threshold_n)
            .push("lemma3_pass", self.pass);
        r
    }
}

/// Frequency with which `max_f |⟨f, ν_n⟩ − ⟨f, ν⟩| > δ` for `X ~ ν^n`.
pub fn deviation_check_empirical(
    nu: &Distribution,
    queries: &QueryFamily,
    n: usize,
    delta: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<DeviationReport> {
    if n == 0 || trials == 0 {
        return Err(Error::param("n and trials must be positive"));
    }
    let exact = nu.exact_statistics(queries)?;
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let mut rng = substream(seed, t as u64);
            let x = nu.sample_with(n, &mut rng);
            let stats = evaluate_all(queries, &x)?;
            Ok(usize::from(stats.max_abs_diff(&exact) > delta))
        })
        .sum::<Result<usize>>()?;
    let failure_rate = failures as f64 / trials as f64;
    let allowed_rate = allowed_failure_rate(gamma, trials);
    Ok(DeviationReport {
        trials,
        failures,
        failure_rate,
        threshold_n: (queries.len() as f64 / gamma).ln() / (delta * delta),
        allowed_rate,
        pass: failure_rate <= allowed_rate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReweightedReport {
    pub trials: usize,
    pub failure_rate: f64,
    pub mean_r: f64,
    /// Exact `κ(ν‖μ)`.
    pub kappa: f64,
    /// `δ⁻² κ |F| / γ`.
    pub threshold_m: f64,
    pub allowed_rate: f64,
    /// `3·√(κ / (m·trials))`.
    pub r_tolerance: f64,
    pub pass: bool,
}

impl ReweightedReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("lemma4_trials", self.trials)
            .push_real("lemma4_failure_rate", self.failure_rate)
            .push_real("lemma4_allowed_rate", self.allowed_rate)
            .push_real("lemma4_threshold_m", self.threshold_m)
            .push_real("kappa", self.kappa)
            .push_real("mean_r", self.mean_r)
            .push_real("mean_r_tolerance", self.r_tolerance)
            .push("lemma4_pass", self.pass);
        r
    }
}

/// Deviation of the reweighted measure `ν'_m` from `ν`, and the mean of its mass `r`.
#[allow(clippy::too_many_arguments)]
pub fn reweighted_deviation_check(
    nu: &Distribution,
    mu: &Distribution,
    queries: &QueryFamily,
    m: usize,
    delta: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<ReweightedReport> {
    if m == 0 || trials == 0 {
        return Err(Error::param("m and trials must be positive"));
    }
    let kappa = renyi_condition_number_exact(nu, mu)?;
    let exact = nu.exact_statistics(queries)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, f64)> {
            let mut rng = substream(seed, t as u64);
            let sample = mu.sample_with(m, &mut rng);
            let measure = ReweightedMeasure::new(nu, mu, sample)?;
            let stats = measure.statistics(queries)?;
            Ok((stats.max_abs_diff(&exact) > delta, measure.total_mass()))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = per_trial.iter().filter(|(fail, _)| *fail).count();
    let mut acc = CompensatedSum::default();
    per_trial.iter().for_each(|(_, r)| acc.add(*r));
    let mean_r = acc.value() / trials as f64;
    let failure_rate = failures as f64 / trials as f64;
    let allowed_rate = allowed_failure_rate(gamma, trials);
    let r_tolerance = 3.0 * (kappa / (m as f64 * trials as f64)).sqrt();
    Ok(ReweightedReport {
        trials,
        failure_rate,
        mean_r,
        kappa,
        threshold_m: kappa * queries.len() as f64 / (gamma * delta * delta),
        allowed_rate,
        r_tolerance,
        pass: failure_rate <= allowed_rate && (mean_r - 1.0).abs() <= r_tolerance,
    })
}

/// Frequency of `max_f |λ(f)| > σ ln(|F|/γ) = δ` over i.i.d. noise vectors.
pub fn laplace_bound_check(
    family_size: usize,
    delta: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<(f64, bool)> {
    let sigma = sigma_for(delta, family_size as f64, gamma)?;
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<usize> {
            let mut rng = substream(seed, t as u64);
            let mut worst = 0.0f64;
            for _ in 0..family_size {
                worst = worst.max(laplace_sample(sigma, &mut rng)?.abs());
            }
            Ok(usize::from(worst > delta))
        })
        .sum::<Result<usize>>()?;
    let rate = failures as f64 / trials as f64;
    Ok((rate, rate <= allowed_failure_rate(gamma, trials)))
}

/// Whether one dataset is the other plus one record (as multisets), or they are equal.
pub fn are_neighbors(a: &Dataset, b: &Dataset) -> bool {
    if a.schema() != b.schema() {
        return false;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let extra = large.len() - small.len();
    if extra > 1 {
        return false;
    }
    let mut counts: HashMap<&DataPoint, i64> = HashMap::new();
    for p in large.points() {
        *counts.entry(p).or_default() += 1;
    }
    for p in small.points() {
        match counts.get_mut(p) {
            Some(c) if *c > 0 => *c -= 1,
            _ => return false,
        }
    }
    counts.values().sum::<i64>() == extra as i64
}

/// Cells with fewer observations than this on either side are not compared.
pub const AUDIT_OCCUPANCY_FLOOR: u64 = 10;
/// Largest family the histogram audit accepts.
pub const AUDIT_MAX_FAMILY: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DpAuditReport {
    pub epsilon_hat: f64,
    /// `‖L(D1) − L(D2)‖₁ / σ`.
    pub epsilon_theoretical: f64,
    pub slack: f64,
    pub compared_cells: usize,
    pub pass: bool,
}

impl DpAuditReport {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push_real("epsilon_hat", self.epsilon_hat)
            .push_real("epsilon_theoretical", self.epsilon_theoretical)
            .push_real("audit_slack", self.slack)
            .push("compared_cells", self.compared_cells)
            .push("dp_pass", self.pass);
        r
    }
}

/// Histogram likelihood-ratio audit of the noisy-statistics release on two neighbors.
///
/// Both runs are pooled per coordinate and cut into `bins` equal-frequency intervals;
/// `ε̂` is the largest `|ln(c1/c2)|` over cells where both counts reach
/// [`AUDIT_OCCUPANCY_FLOOR`].
#[allow(clippy::too_many_arguments)]
pub fn privacy_audit(
    queries: &QueryFamily,
    sigma: f64,
    d1: &Dataset,
    d2: &Dataset,
    trials: usize,
    bins: usize,
    slack: f64,
    seed: u64,
) -> Result<DpAuditReport> {
    if !are_neighbors(d1, d2) {
        return Err(Error::NotNeighbors);
    }
    let dims = queries.len();
    if dims == 0 || dims > AUDIT_MAX_FAMILY {
        return Err(Error::param(format!(
            "audit needs 1..={AUDIT_MAX_FAMILY} functions, got {dims}"
        )));
    }
    if trials == 0 || bins == 0 {
        return Err(Error::param("trials and bins must be positive"));
    }
    let s1 = evaluate_all(queries, d1)?;
    let s2 = evaluate_all(queries, d2)?;
    let epsilon_theoretical = s1.l1_diff(&s2) / sigma;

    let release = |stats: &StatisticsVector, stream: u64| -> Result<Vec<f64>> {
        let mut rng = substream(seed, stream);
        let seeds: Vec<u64> = (0..trials).map(|_| rng.next_u64()).collect();
        let outputs = seeds
            .par_iter()
            .map(|&s| perturb(stats, sigma, s).map(StatisticsVector::into_values))
            .collect::<Result<Vec<_>>>()?;
        Ok(outputs.concat())
    };
    let out1 = release(&s1, 1)?;
    let out2 = release(&s2, 2)?;

    let edges: Vec<Vec<f64>> = (0..dims)
        .map(|j| {
            let mut pooled: Vec<f64> = out1
                .iter()
                .skip(j)
                .step_by(dims)
                .chain(out2.iter().skip(j).step_by(dims))
                .copied()
                .collect();
            pooled.sort_unstable_by(f64::total_cmp);
            (1..bins)
                .map(|b| pooled[b * pooled.len() / bins])
                .collect()
        })
        .collect();
    let cell_of = |row: &[f64]| -> usize {
        row.iter()
            .zip(&edges)
            .fold(0, |acc, (v, e)| acc * bins + e.partition_point(|edge| edge <= v))
    };
    let count = |out: &[f64]| {
        let mut counts: HashMap<usize, u64> = HashMap::new();
        for row in out.chunks_exact(dims) {
            *counts.entry(cell_of(row)).or_default() += 1;
        }
        counts
    };
    let c1 = count(&out1);
    let c2 = count(&out2);

    let mut epsilon_hat = 0.0f64;
    let mut compared_cells = 0;
    for (cell, &a) in &c1 {
        let b = c2.get(cell).copied().unwrap_or(0);
        if a < AUDIT_OCCUPANCY_FLOOR || b < AUDIT_OCCUPANCY_FLOOR {
            continue;
        }
        compared_cells += 1;
        epsilon_hat = epsilon_hat.max((a as f64 / b as f64).ln().abs());
    }
    Ok(DpAuditReport {
        epsilon_hat,
        epsilon_theoretical,
        slack,
        compared_cells,
        pass: epsilon_hat <= epsilon_theoretical + slack,
    })
}

/// The exact privacy loss `max_x |ln(p1(x)/p2(x))|` of adding `Lap(σ)` noise to two
/// statistic vectors: the ℓ¹ shift over `σ`. An analytic oracle for [`privacy_audit`].
pub fn laplace_privacy_loss(s1: &StatisticsVector, s2: &StatisticsVector, sigma: f64) -> f64 {
    s1.l1_diff(s2) / sigma
}

/// Parameters of the Boolean end-to-end experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BooleanExperiment {
    pub p: usize,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub delta: f64,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub params: BooleanExperiment,
    pub family_size: usize,
    pub errors: Vec<f64>,
    /// Fraction of trials with error above `8δ`.
    pub exceed_fraction: f64,
    /// `4γ + 3·√(4γ/trials)`.
    pub allowed_fraction: f64,
    pub median_error: f64,
    pub median_within_soft_bound: bool,
    pub pass: bool,
    /// Generator reports of every trial, in order.
    pub runs: Vec<Report>,
}

impl ExperimentReport {
    pub fn to_report(&self) -> Report {
        let p = &self.params;
        let mut r = Report::new();
        r.push("p", p.p)
            .push("d", p.d)
            .push("n", p.n)
            .push("k", p.k)
            .push("m", p.m)
            .push_real("delta", p.delta)
            .push_real("gamma", p.gamma)
            .push("trials", p.trials)
            .push("seed", p.seed)
            .push("family_size", self.family_size)
            .push_real("exceed_fraction", self.exceed_fraction)
            .push_real("allowed_fraction", self.allowed_fraction)
            .push_real("median_error", self.median_error)
            .push("median_within_4delta", self.median_within_soft_bound)
            .push("corollary_pass", self.pass)
            .push_reals("trial_errors", &self.errors);
        r
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Repeated end-to-end runs with `ν = μ = uniform` on `{0,1}^p` and monotone marginals of
/// degree at most `d`. Passes when errors above `8δ` occur in at most `4γ` of trials
/// (plus three standard errors).
pub fn boolean_experiment(params: BooleanExperiment) -> Result<ExperimentReport> {
    let BooleanExperiment {
        p,
        d,
        n,
        k,
        m,
        delta,
        gamma,
        trials,
        seed,
    } = params;
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let queries = marginal_family(p, d, MarginalKind::Monotone)?;
    let uniform: Distribution = ProductDistribution::uniform(queries.schema()).into();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, Report)> {
            let mut rng = substream(seed, 2 * t as u64);
            let x = uniform.sample_with(n, &mut rng);
            let mut config = PipelineConfig::new(delta, gamma, k, m, substream(seed, 2 * t as u64 + 1).next_u64());
            config.check_accuracy_ranges = false;
            let out = generate(&x, &queries, &uniform, &config)?;
            let error = accuracy_error(&queries, &x, &out.data)?;
            Ok((error, out.report.to_report()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (errors, runs): (Vec<f64>, Vec<Report>) = outcomes.into_iter().unzip();
    let exceed = errors.iter().filter(|&&e| e > 8.0 * delta).count();
    let exceed_fraction = exceed as f64 / trials as f64;
    let allowed_fraction = allowed_failure_rate(4.0 * gamma, trials);
    let median_error = median(&errors);
    Ok(ExperimentReport {
        params,
        family_size: queries.len(),
        exceed_fraction,
        allowed_fraction,
        median_within_soft_bound: median_error <= 4.0 * delta,
        median_error,
        pass: exceed_fraction <= allowed_fraction,
        errors,
        runs,
    })
}

/// Renders a per-trial list compactly for reports.
pub fn render_errors(errors: &[f64]) -> String {
    errors.iter().map(|e| sig9(*e)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Schema, TestFunction};
    use crate::distributions::ExplicitDistribution;

    fn two_point() -> (Distribution, Distribution, QueryFamily) {
        let schema = Schema::boolean(1);
        let pts = vec![DataPoint::new(vec![0]), DataPoint::new(vec![1])];
        let nu = ExplicitDistribution::new(schema.clone(), pts.clone(), vec![0.75, 0.25]).unwrap();
        let mu = ExplicitDistribution::new(schema.clone(), pts, vec![0.5, 0.5]).unwrap();
        let fam = QueryFamily::new(
            schema,
            vec![
                TestFunction::Constant,
                TestFunction::assignment(vec![0], vec![0]).unwrap(),
            ],
        )
        .unwrap();
        (nu.into(), mu.into(), fam)
    }

    #[test]
    fn lemma3_at_threshold() {
        let nu: Distribution = ProductDistribution::uniform(&Schema::boolean(4)).into();
        let fam = marginal_family(4, 1, MarginalKind::Monotone).unwrap();
        let n = (25.0 * 50f64.ln()).ceil() as usize;
        assert_eq!(n, 98);
        let rep = deviation_check_empirical(&nu, &fam, n, 0.2, 0.1, 500, 1).unwrap();
        assert!((rep.threshold_n - 97.8006).abs() < 1e-3);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn lemma3_trivial_delta() {
        let nu: Distribution = ProductDistribution::uniform(&Schema::boolean(3)).into();
        let fam = marginal_family(3, 2, MarginalKind::Monotone).unwrap();
        let rep = deviation_check_empirical(&nu, &fam, 3, 2.0, 0.1, 200, 2).unwrap();
        assert_eq!(rep.failures, 0);
    }

    #[test]
    fn lemma3_huge_sample() {
        let nu: Distribution = ProductDistribution::uniform(&Schema::boolean(4)).into();
        let fam = marginal_family(4, 1, MarginalKind::Monotone).unwrap();
        let rep = deviation_check_empirical(&nu, &fam, 1_000_000, 0.2, 0.1, 100, 3).unwrap();
        assert_eq!(rep.failure_rate, 0.0);
    }

    #[test]
    fn lemma4_equal_measures_have_unit_mass() {
        let nu: Distribution = ProductDistribution::uniform(&Schema::boolean(3)).into();
        let fam = marginal_family(3, 1, MarginalKind::Monotone).unwrap();
        for seed in 0..20 {
            let sample = nu.sample(50, seed).unwrap();
            let measure = ReweightedMeasure::new(&nu, &nu, sample).unwrap();
            assert!((measure.total_mass() - 1.0).abs() < 1e-12);
        }
        let rep = reweighted_deviation_check(&nu, &nu, &fam, 50, 0.2, 0.1, 30, 1).unwrap();
        assert!((rep.mean_r - 1.0).abs() < 1e-12);
        assert_eq!(rep.kappa, 1.0);
    }

    #[test]
    fn lemma4_two_point_at_threshold() {
        let (nu, mu, fam) = two_point();
        let m = (25.0f64 * 1.25 * 20.0).ceil() as usize;
        assert_eq!(m, 625);
        let rep = reweighted_deviation_check(&nu, &mu, &fam, m, 0.2, 0.1, 500, 5).unwrap();
        assert!((rep.kappa - 1.25).abs() < 1e-12);
        assert!((rep.threshold_m - 625.0).abs() < 1e-9);
        assert!(rep.failure_rate <= rep.allowed_rate, "{rep:?}");
    }

    #[test]
    fn lemma4_mean_mass_is_unbiased() {
        let (nu, mu, fam) = two_point();
        let rep = reweighted_deviation_check(&nu, &mu, &fam, 625, 0.2, 0.1, 10_000, 6).unwrap();
        assert!((rep.mean_r - 1.0).abs() < 0.01, "{}", rep.mean_r);
    }

    #[test]
    fn lemma4_rejects_undominated_pairs() {
        let schema = Schema::boolean(1);
        let nu: Distribution = ExplicitDistribution::uniform(&schema).unwrap().into();
        let mu: Distribution = ExplicitDistribution::point_mass(&schema, DataPoint::new(vec![0]))
            .unwrap()
            .into();
        let fam = marginal_family(1, 1, MarginalKind::Monotone).unwrap();
        assert_eq!(
            reweighted_deviation_check(&nu, &mu, &fam, 10, 0.2, 0.1, 5, 1),
            Err(Error::NotDominated)
        );
    }

    #[test]
    fn laplace_bound_event_is_rare() {
        let (rate, pass) = laplace_bound_check(17, 0.2, 0.1, 20_000, 9).unwrap();
        assert!(pass, "{rate}");
        assert!(rate > 0.0);
    }

    #[test]
    fn neighbor_relation() {
        let schema = Schema::boolean(1);
        let a = Dataset::from_rows(schema.clone(), &[&[0], &[0], &[1]]).unwrap();
        let b = Dataset::from_rows(schema.clone(), &[&[0], &[1], &[0], &[1]]).unwrap();
        let c = Dataset::from_rows(schema.clone(), &[&[1], &[1], &[1], &[1]]).unwrap();
        let d = Dataset::from_rows(schema, &[&[0]]).unwrap();
        assert!(are_neighbors(&a, &b));
        assert!(are_neighbors(&b, &a));
        assert!(are_neighbors(&a, &a));
        assert!(!are_neighbors(&a, &c));
        assert!(!are_neighbors(&a, &d));
    }

    fn audit_family() -> (QueryFamily, Dataset, Dataset) {
        let schema = Schema::boolean(1);
        let fam = QueryFamily::new(schema.clone(), vec![TestFunction::monotone(vec![0])]).unwrap();
        let zeros: Vec<&[u32]> = vec![&[0]; 10];
        let d1 = Dataset::from_rows(schema.clone(), &zeros).unwrap();
        let d2 = d1
            .concat(&Dataset::from_rows(schema, &[&[1]]).unwrap())
            .unwrap();
        (fam, d1, d2)
    }

    #[test]
    fn audit_identical_datasets() {
        let (fam, d1, _) = audit_family();
        let rep = privacy_audit(&fam, 0.1, &d1, &d1, 1_000_000, 40, 0.15, 1).unwrap();
        assert_eq!(rep.epsilon_theoretical, 0.0);
        assert!(rep.epsilon_hat <= 0.05, "{}", rep.epsilon_hat);
    }

    #[test]
    fn audit_tracks_exact_privacy_loss() {
        let (fam, d1, d2) = audit_family();
        let sigma = 0.1;
        let oracle = laplace_privacy_loss(
            &evaluate_all(&fam, &d1).unwrap(),
            &evaluate_all(&fam, &d2).unwrap(),
            sigma,
        );
        assert!((oracle - 1.0 / 11.0 / 0.1).abs() < 1e-12);
        let rep = privacy_audit(&fam, sigma, &d1, &d2, 1_000_000, 40, 0.15, 2).unwrap();
        assert!((rep.epsilon_theoretical - oracle).abs() < 1e-12);
        assert!(rep.epsilon_hat >= 0.3 * oracle, "{rep:?}");
        assert!(rep.epsilon_hat <= oracle + 0.15, "{rep:?}");
    }

    #[test]
    fn audit_with_very_large_noise() {
        let (fam, d1, d2) = audit_family();
        let sigma = 1e3 * (1.0 / 11.0);
        let rep = privacy_audit(&fam, sigma, &d1, &d2, 1_000_000, 4, 0.15, 3).unwrap();
        assert!(rep.epsilon_theoretical <= 0.001 + 1e-12);
        assert!(rep.epsilon_hat <= 0.01, "{rep:?}");
    }

    #[test]
    fn audit_input_errors() {
        let (fam, d1, _) = audit_family();
        let far = d1.concat(&d1).unwrap();
        assert_eq!(
            privacy_audit(&fam, 0.1, &d1, &far, 10, 4, 0.15, 1),
            Err(Error::NotNeighbors)
        );
        let big = marginal_family(4, 1, MarginalKind::Monotone).unwrap();
        let x = Dataset::from_rows(Schema::boolean(4), &[&[0, 0, 0, 0]]).unwrap();
        assert!(privacy_audit(&big, 0.1, &x, &x, 10, 4, 0.15, 1).is_err());
    }

    #[test]
    fn trivially_loose_experiment_passes() {
        let rep = boolean_experiment(BooleanExperiment {
            p: 6,
            d: 1,
            n: 40,
            k: 40,
            m: 30,
            delta: 2.0,
            gamma: 0.1,
            trials: 4,
            seed: 1,
        })
        .unwrap();
        assert!(rep.pass);
        assert!(rep.errors.iter().all(|&e| e <= 2.0));
        assert_eq!(rep.runs.len(), 4);
    }

    #[test]
    fn degenerate_reduced_domain_still_runs() {
        let rep = boolean_experiment(BooleanExperiment {
            p: 8,
            d: 1,
            n: 50,
            k: 50,
            m: 1,
            delta: 0.2,
            gamma: 0.1,
            trials: 3,
            seed: 2,
        })
        .unwrap();
        assert_eq!(rep.errors.len(), 3);
        // a single point carries every synthetic record
        assert!(rep.median_error > 0.2);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
