//! Conjugate posteriors for network density and the comparator ensembles
//! used alongside posterior-predictive CCMs.
//!
//! * Several fully observed networks: a normal likelihood on their densities
//!   with known (plug-in) standard deviation and a normal prior.
//! * One sampled sub-network: a Bernoulli likelihood on the observed dyads
//!   with a beta prior, optionally with a finite-population correction.
//!   The correction scales the posterior variance by
//!   `1 - observed_dyads / population_dyads`; the beta handed to the CCM is
//!   moment matched to the posterior mean and the corrected variance.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::ClassDistribution;
use crate::error::{Error, Result};
use crate::math::pairs;
use crate::sampler::CcmSpec;
use crate::stats::PropertySpec;

/// Smallest finite-population variance factor.
pub const FPC_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DensityPosterior {
    Normal {
        mean: f64,
        variance: f64,
        provenance: NormalInputs,
    },
    Beta {
        a: f64,
        b: f64,
        /// Variance factor from the finite-population correction (1 when
        /// no correction applies).
        fpc: f64,
        provenance: BetaInputs,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalInputs {
    pub densities: Vec<f64>,
    pub prior_mean: f64,
    pub prior_variance: f64,
    pub sigma: f64,
    pub sigma_from_sample: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaInputs {
    pub observed_edges: u64,
    pub observed_dyads: u64,
    pub a0: f64,
    pub b0: f64,
    pub population_dyads: Option<u64>,
}

/// Normal-normal update with known likelihood sd; `sigma = None` uses the
/// sample sd of `densities`.
pub fn normal_posterior(
    densities: &[f64],
    prior_mean: f64,
    prior_variance: f64,
    sigma: Option<f64>,
) -> Result<DensityPosterior> {
    if densities.is_empty() {
        return Err(Error::InvalidParameter("at least one density is required".into()));
    }
    if let Some(i) = densities.iter().position(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter(format!("density {i} is not finite")));
    }
    if !(prior_variance.is_finite() && prior_variance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "prior variance {prior_variance} must be > 0"
        )));
    }
    let (sigma, from_sample) = match sigma {
        Some(s) => (s, false),
        None => {
            if densities.len() < 2 {
                return Err(Error::InvalidParameter(
                    "the likelihood sd defaults to the sample sd, which needs at least 2 densities; pass sigma explicitly".into(),
                ));
            }
            (crate::diagnostics::sd(densities), true)
        }
    };
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("likelihood sd {sigma} must be > 0")));
    }
    let n = densities.len() as f64;
    let xbar = crate::diagnostics::mean(densities);
    let s2 = sigma * sigma;
    let precision = 1.0 / prior_variance + n / s2;
    let mean = (prior_mean / prior_variance + n * xbar / s2) / precision;
    Ok(DensityPosterior::Normal {
        mean,
        variance: 1.0 / precision,
        provenance: NormalInputs {
            densities: densities.to_vec(),
            prior_mean,
            prior_variance,
            sigma,
            sigma_from_sample: from_sample,
        },
    })
}

/// Beta-Bernoulli update from a sampled sub-network.
pub fn beta_posterior(
    observed_edges: u64,
    observed_dyads: u64,
    a0: f64,
    b0: f64,
    population_dyads: Option<u64>,
) -> Result<DensityPosterior> {
    if observed_edges > observed_dyads {
        return Err(Error::InvalidParameter(format!(
            "{observed_edges} observed edges exceed {observed_dyads} observed dyads"
        )));
    }
    for (name, v) in [("a0", a0), ("b0", b0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("prior {name} = {v} must be > 0")));
        }
    }
    let fpc = match population_dyads {
        None => 1.0,
        Some(pop) => {
            let f = 1.0 - observed_dyads as f64 / pop as f64;
            if f < FPC_FLOOR {
                log::warn!(
                    "observed dyads ({observed_dyads}) reach the population ({pop}); \
                     finite-population factor clamped to {FPC_FLOOR}"
                );
                FPC_FLOOR
            } else {
                f
            }
        }
    };
    Ok(DensityPosterior::Beta {
        a: a0 + observed_edges as f64,
        b: b0 + (observed_dyads - observed_edges) as f64,
        fpc,
        provenance: BetaInputs {
            observed_edges,
            observed_dyads,
            a0,
            b0,
            population_dyads,
        },
    })
}

impl DensityPosterior {
    pub fn mean(&self) -> f64 {
        match *self {
            DensityPosterior::Normal { mean, .. } => mean,
            DensityPosterior::Beta { a, b, .. } => a / (a + b),
        }
    }

    /// Reported variance (after any finite-population correction).
    pub fn variance(&self) -> f64 {
        match *self {
            DensityPosterior::Normal { variance, .. } => variance,
            DensityPosterior::Beta { a, b, fpc, .. } => {
                fpc * a * b / ((a + b) * (a + b) * (a + b + 1.0))
            }
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Beta shapes matching the reported mean and variance.
    pub fn matched_beta(&self) -> Option<(f64, f64)> {
        match *self {
            DensityPosterior::Beta { a, b, fpc, .. } => {
                if fpc == 1.0 {
                    return Some((a, b));
                }
                let m = self.mean();
                let total = m * (1.0 - m) / self.variance() - 1.0;
                Some((m * total, (1.0 - m) * total))
            }
            DensityPosterior::Normal { .. } => None,
        }
    }

    /// Class distribution on density for a population of `n` nodes.
    pub fn class_distribution(&self, n: usize) -> Result<ClassDistribution> {
        match *self {
            DensityPosterior::Normal { mean, variance, .. } => ClassDistribution::normal(mean, variance),
            DensityPosterior::Beta { .. } => {
                let (a, b) = self.matched_beta().expect("beta posterior");
                ClassDistribution::beta(a, b, pairs(n as u64))
            }
        }
    }

    /// `[kind, params]` in the config schema.
    pub fn config_distribution(&self) -> Value {
        match *self {
            DensityPosterior::Normal { mean, variance, .. } => {
                json!({"kind": "normal", "params": [mean, variance]})
            }
            DensityPosterior::Beta { .. } => {
                let (a, b) = self.matched_beta().expect("beta posterior");
                json!({"kind": "beta", "params": [a, b]})
            }
        }
    }
}

/// Density-property CCM whose class law is the posterior.
pub fn posterior_to_ccm(post: &DensityPosterior, n: usize) -> Result<CcmSpec> {
    CcmSpec::new(n, vec![PropertySpec::Density], vec![post.class_distribution(n)?], None)
}

/// Ready-to-run config: a diagnostic run followed by a short ensemble stage
/// started from the diagnostic run's final graph.
pub fn posterior_config_template(
    post: &DensityPosterior,
    n: usize,
    ensemble_size: usize,
    seed: u64,
) -> Value {
    json!({
        "description": "posterior predictive density ensemble",
        "model": {
            "population": n,
            "properties": ["density"],
            "distributions": [post.config_distribution()],
        },
        "sampler": {
            "burnin": 500_000,
            "interval": 1000,
            "sample_size": 1000,
            "seed": seed,
            "stats_only": true,
        },
        "ensemble_stage": {
            "burnin": 0,
            "interval": 1000,
            "sample_size": ensemble_size,
        },
        "outputs": {
            "dir": "posterior_ensemble",
            "ensemble_format": "edgelist-dir",
        },
    })
}

/// Densities of the fixed-edge-count comparator: `m / C(n, 2)`, `count`
/// times.
pub fn benchmark_gnm(n: usize, m: u64, count: usize) -> Result<Vec<f64>> {
    let dyads = pairs(n as u64);
    if dyads == 0 || m > dyads {
        return Err(Error::InvalidParameter(format!(
            "m = {m} must lie in [0, {dyads}] for n = {n}"
        )));
    }
    Ok(vec![m as f64 / dyads as f64; count])
}

/// Densities of independent Bernoulli(p) dyads (an edges-only exponential
/// random graph with `theta = logit p`).
pub fn benchmark_bernoulli_edges<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let dyads = pairs(n as u64);
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
    }
    if dyads == 0 {
        return Err(Error::InvalidParameter(format!("n = {n} has no dyads")));
    }
    let bin = Binomial::new(dyads, p).expect("valid binomial");
    Ok((0..count).map(|_| bin.sample(rng) as f64 / dyads as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn school_densities() -> Vec<f64> {
        [(203u64, 205u64), (439, 107), (1197, 248), (974, 1461)]
            .iter()
            .map(|&(m, n)| m as f64 / pairs(n) as f64)
            .collect()
    }

    #[test]
    fn symmetric_normal_update() {
        let p = normal_posterior(&[1.0], 0.0, 1.0, Some(1.0)).unwrap();
        assert!((p.mean() - 0.5).abs() < 1e-12);
        assert!((p.variance() - 0.5).abs() < 1e-12);
        assert!(normal_posterior(&[1.0], 0.0, 1.0, None).is_err());
    }

    #[test]
    fn school_posterior() {
        let p = normal_posterior(&school_densities(), 0.5, 1.0, None).unwrap();
        assert!((p.mean() - 0.0319).abs() < 5e-5, "{}", p.mean());
        assert!((p.sd() - 0.0173).abs() < 5e-5, "{}", p.sd());
    }

    #[test]
    fn flat_prior_limit_is_sample_mean() {
        let d = school_densities();
        let p = normal_posterior(&d, 0.5, 1e12, None).unwrap();
        assert!((p.mean() - crate::diagnostics::mean(&d)).abs() < 1e-9);
    }

    #[test]
    fn beta_updates() {
        let p = beta_posterior(5, 10, 1.0, 1.0, None).unwrap();
        assert_eq!(p.matched_beta(), Some((6.0, 6.0)));
        assert_eq!(p.mean(), 0.5);
        let z = beta_posterior(0, 300, 1.0, 1.0, None).unwrap();
        assert_eq!(z.matched_beta(), Some((1.0, 301.0)));
        assert!(beta_posterior(11, 10, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn finite_population_correction() {
        let pop = pairs(248);
        let plain = beta_posterior(20, 300, 1.0, 1.0, None).unwrap();
        let fpc = beta_posterior(20, 300, 1.0, 1.0, Some(pop)).unwrap();
        let factor = 1.0 - 300.0 / 30628.0;
        assert!((fpc.variance() / plain.variance() - factor).abs() < 1e-12);
        assert!((factor - 0.9902).abs() < 1e-4);
        assert_eq!(fpc.mean(), plain.mean());
        let (a, b) = fpc.matched_beta().unwrap();
        let var = a * b / ((a + b).powi(2) * (a + b + 1.0));
        assert!((a / (a + b) - fpc.mean()).abs() < 1e-12);
        assert!((var - fpc.variance()).abs() < 1e-15);
        let full = beta_posterior(20, pop, 1.0, 1.0, Some(pop)).unwrap();
        assert!(full.variance() > 0.0 && full.variance() < plain.variance());
    }

    #[test]
    fn beta_sd_narrows_with_more_dyads() {
        let mut prev = f64::INFINITY;
        for n in [25u64, 75, 125, 175, 225] {
            let dyads = pairs(n);
            let edges = (dyads as f64 * 0.039).round() as u64;
            let sd = beta_posterior(edges, dyads, 1.0, 1.0, Some(pairs(248))).unwrap().sd();
            assert!(sd < prev);
            prev = sd;
        }
    }

    #[test]
    fn comparators() {
        let g = benchmark_gnm(100, 158, 5).unwrap();
        assert!(g.iter().all(|&d| d == 158.0 / 4950.0));
        assert!(benchmark_gnm(4, 7, 1).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = benchmark_bernoulli_edges(4, 0.5, 100_000, &mut rng).unwrap();
        let mean_edges = crate::diagnostics::mean(&d) * 6.0;
        assert!((mean_edges - 3.0).abs() < 3.0 * (1.5f64 / 100_000.0).sqrt());
        let d = benchmark_bernoulli_edges(100, 0.0319, 20_000, &mut rng).unwrap();
        let want = (0.0319f64 * (1.0 - 0.0319) / 4950.0).sqrt();
        assert!((crate::diagnostics::sd(&d) / want - 1.0).abs() < 0.05);
        assert!(benchmark_bernoulli_edges(10, 1.0, 1, &mut rng).is_err());
    }

    #[test]
    fn posterior_specs() {
        let p = normal_posterior(&school_densities(), 0.5, 1.0, None).unwrap();
        let spec = posterior_to_ccm(&p, 100).unwrap();
        assert_eq!(spec.properties, vec![PropertySpec::Density]);
        assert_eq!(spec.distributions[0].kind_name(), "normal");
        let b = beta_posterior(5, 10, 1.0, 1.0, None).unwrap();
        let spec = posterior_to_ccm(&b, 10).unwrap();
        assert_eq!(spec.distributions[0].kind_name(), "beta");
        let t = posterior_config_template(&p, 100, 10, 1);
        assert_eq!(t["ensemble_stage"]["sample_size"], 10);
        assert_eq!(t["model"]["distributions"][0]["kind"], "normal");
    }
}
