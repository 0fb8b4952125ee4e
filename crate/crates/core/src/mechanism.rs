//! Laplace mechanism and the privacy parameter formulas.
//!
//! Neighboring datasets differ by adding or removing one record. For a family of `|F|`
//! functions valued in `[-1, 1]`, the ℓ¹ sensitivity of the statistics vector is at most
//! `Δ = 2|F|/n`, and Laplace noise of scale `σ` on each coordinate gives `Δ/σ`-DP.
//! All logarithms are natural.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::StatisticsVector;
use crate::error::{Error, Result};

/// One draw from `Lap(σ)` by inverting the CDF at a single open-interval uniform.
pub fn laplace_sample<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param(format!("laplace scale must be positive, got {sigma}")));
    }
    let u: f64 = rng.sample(Open01);
    Ok(laplace_quantile(sigma, u))
}

#[inline]
fn laplace_quantile(sigma: f64, u: f64) -> f64 {
    let centered = u - 0.5;
    -sigma * centered.signum() * (1.0 - 2.0 * centered.abs()).ln()
}

/// `Δ = 2|F|/n`.
pub fn sensitivity_bound(family_size: usize, n: usize) -> f64 {
    2.0 * family_size as f64 / n as f64
}

/// `σ = δ / ln(|F|/γ)`. The family size is real-valued so boundary cases can be probed.
pub fn sigma_for(delta: f64, family_size: f64, gamma: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::param(format!("delta must be positive, got {delta}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let ratio = family_size / gamma;
    if !(ratio > 1.0) {
        return Err(Error::param(format!(
            "|F|/gamma = {ratio} must exceed 1 for a positive noise scale"
        )));
    }
    Ok(delta / ratio.ln())
}

/// Outcome of the sample-size privacy gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyCheck {
    pub pass: bool,
    /// `2/(εδ) · |F| · ln(|F|/γ)`.
    pub required_n: f64,
    pub sensitivity: f64,
    pub sigma: f64,
    /// `Δ/σ`, the budget actually spent at this `n`.
    pub epsilon_achieved: f64,
}

/// Passes iff `n ≥ 2/(εδ) · |F| · ln(|F|/γ)`, equivalently `Δ/σ ≤ ε`.
pub fn privacy_check(
    n: usize,
    epsilon: f64,
    delta: f64,
    family_size: usize,
    gamma: f64,
) -> Result<PrivacyCheck> {
    if !(epsilon > 0.0) {
        return Err(Error::param(format!("epsilon must be positive, got {epsilon}")));
    }
    if n == 0 || family_size == 0 {
        return Err(Error::param("n and |F| must be positive"));
    }
    let sigma = sigma_for(delta, family_size as f64, gamma)?;
    let log_ratio = (family_size as f64 / gamma).ln();
    let required_n = 2.0 / (epsilon * delta) * family_size as f64 * log_ratio;
    let sensitivity = sensitivity_bound(family_size, n);
    Ok(PrivacyCheck {
        pass: n as f64 >= required_n,
        required_n,
        sensitivity,
        sigma,
        epsilon_achieved: sensitivity / sigma,
    })
}

/// The full parameter set of one release.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub delta_target: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub family_size: usize,
    pub n: usize,
}

impl PrivacyParams {
    /// Chooses `σ` from the accuracy target and reports the `ε = Δ/σ` it buys.
    pub fn derive(delta_target: f64, gamma: f64, family_size: usize, n: usize) -> Result<Self> {
        if n == 0 || family_size == 0 {
            return Err(Error::param("n and |F| must be positive"));
        }
        let sigma = sigma_for(delta_target, family_size as f64, gamma)?;
        Ok(Self {
            epsilon: sensitivity_bound(family_size, n) / sigma,
            delta_target,
            gamma,
            sigma,
            family_size,
            n,
        })
    }

    pub fn sensitivity(&self) -> f64 {
        sensitivity_bound(self.family_size, self.n)
    }

    /// Whether the accuracy-side ranges `δ ∈ (0, 1/2]`, `γ ∈ (0, 1/4)` hold.
    pub fn in_accuracy_range(&self) -> bool {
        self.delta_target > 0.0 && self.delta_target <= 0.5 && self.gamma > 0.0 && self.gamma < 0.25
    }
}

/// Adds i.i.d. `Lap(σ)` noise to every statistic. Entry `j` draws from substream `j` of
/// the seeded generator, so the result is independent of evaluation order. No clipping.
pub fn perturb(stats: &StatisticsVector, sigma: f64, seed: u64) -> Result<StatisticsVector> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param(format!("laplace scale must be positive, got {sigma}")));
    }
    let noisy = stats
        .values()
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let mut rng = substream(seed, j as u64);
            let u: f64 = rng.sample(Open01);
            s + laplace_quantile(sigma, u)
        })
        .collect();
    Ok(StatisticsVector::new(noisy))
}

pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_median_of_absolute_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 1_000_000;
        let t = 2f64.ln();
        let over = (0..draws)
            .filter(|_| laplace_sample(1.0, &mut rng).unwrap().abs() > t)
            .count();
        assert!((over as f64 / draws as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn laplace_draws_are_nonzero_and_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100_000 {
            let x = laplace_sample(1.0, &mut rng).unwrap();
            assert!(x != 0.0 && x.is_finite());
        }
    }

    #[test]
    fn laplace_scale_family() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x1 = laplace_sample(1.0, &mut a).unwrap();
            let x2 = laplace_sample(2.0, &mut b).unwrap();
            assert_eq!(x2, 2.0 * x1);
        }
        assert!(laplace_sample(0.0, &mut a).is_err());
        assert!(laplace_sample(-1.0, &mut a).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        assert!((sensitivity_bound(56, 1000) - 0.112).abs() < 1e-15);
        assert_eq!(sensitivity_bound(1, 2), 1.0);
    }

    #[test]
    fn sigma_examples() {
        assert!((sigma_for(0.1, 56.0, 0.01).unwrap() - 0.011587).abs() < 1e-6);
        assert!((sigma_for(0.2, 17.0, 0.1).unwrap() - 0.038942).abs() < 1e-6);
        let e = std::f64::consts::E;
        assert!(sigma_for(0.1, e, 0.999_999).is_ok());
        assert!(sigma_for(0.1, 0.5, 0.9).is_err());
        assert!(sigma_for(0.1, 1.0, 1.0).is_err());
        assert!(sigma_for(0.0, 5.0, 0.1).is_err());
    }

    #[test]
    fn privacy_gate_threshold() {
        let pass = privacy_check(10_000, 1.0, 0.1, 56, 0.01).unwrap();
        assert!((pass.required_n - 9666.2).abs() < 0.05, "{}", pass.required_n);
        assert!(pass.pass);
        assert!(!privacy_check(9_000, 1.0, 0.1, 56, 0.01).unwrap().pass);
        assert!(privacy_check(1, f64::INFINITY, 0.1, 56, 0.01).unwrap().pass);
    }

    #[test]
    fn perturb_is_deterministic_and_unclipped() {
        let stats = StatisticsVector::new(vec![0.5, -1.0, 1.0, 0.0]);
        let a = perturb(&stats, 0.3, 9).unwrap();
        assert_eq!(a, perturb(&stats, 0.3, 9).unwrap());
        assert_ne!(a, perturb(&stats, 0.3, 10).unwrap());
        let wide = perturb(&StatisticsVector::new(vec![1.0; 64]), 5.0, 1).unwrap();
        assert!(wide.values().iter().any(|v| v.abs() > 1.0));
        assert!(perturb(&stats, 0.0, 1).is_err());
    }

    #[test]
    fn perturb_with_tiny_scale_is_near_identity() {
        let stats = StatisticsVector::new(vec![0.25, 0.75, 1.0]);
        let noisy = perturb(&stats, 1e-12, 4).unwrap();
        assert!(noisy.max_abs_diff(&stats) < 1e-9);
    }

    #[test]
    fn perturb_noise_is_centered() {
        let zero = StatisticsVector::new(vec![0.0]);
        let reps = 100_000u64;
        let mean = (0..reps)
            .map(|s| perturb(&zero, 1.0, s).unwrap().values()[0])
            .sum::<f64>()
            / reps as f64;
        assert!(mean.abs() < 0.02, "{mean}");
    }

    #[test]
    fn derived_params_spend_sensitivity_over_sigma() {
        let p = PrivacyParams::derive(0.2, 0.1, 17, 150).unwrap();
        assert!((p.sigma - 0.2 / 170f64.ln()).abs() < 1e-15);
        assert!((p.epsilon - 2.0 * 17.0 / (150.0 * p.sigma)).abs() < 1e-12);
        assert!(p.in_accuracy_range());
        assert!(!PrivacyParams::derive(0.6, 0.1, 17, 150).unwrap().in_accuracy_range());
    }
}
