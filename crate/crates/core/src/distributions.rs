//! Class-level distributions `P(x | theta)` over property values.
//!
//! Only ratios enter the sampler, so every density is used as an
//! unnormalised weight on the statistic's lattice. Continuous families
//! (normal, beta, mvn) are evaluated at the discrete statistic value.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Beta, Binomial, Distribution, Gamma, Normal, Poisson, StandardNormal};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::math::{ln_factorial, ln_gamma_shift};
use crate::stats::PropertySpec;

#[derive(Debug, Clone)]
pub enum ClassDistribution {
    /// Independent Poisson per coordinate; a single rate broadcasts.
    Poisson { lambda: Vec<f64> },
    /// Uniform over edge counts `0..=upper`.
    Uniform { upper: u64 },
    /// Arbitrary probability vector indexed by edge count.
    NonParametric { alpha: Vec<f64>, ln_alpha: Vec<f64> },
    /// Normal weight on each coordinate.
    Normal { mean: f64, variance: f64 },
    /// Beta weight on a density clamped to `[1/(2M), 1 - 1/(2M)]`.
    Beta { a: f64, b: f64, dyads: u64 },
    /// Dirichlet-multinomial over degree counts summing to `nodes`.
    DirMult { alpha: Vec<f64>, nodes: u64 },
    Mvn(Mvn),
}

#[derive(Debug, Clone)]
pub struct Mvn {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    chol_lower: DMatrix<f64>,
    precision: DMatrix<f64>,
}

impl Mvn {
    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    fn quad(&self, x: &[f64]) -> f64 {
        let r = DVector::from_column_slice(x) - &self.mean;
        (r.transpose() * &self.precision * &r)[(0, 0)]
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

impl ClassDistribution {
    pub fn poisson(lambda: Vec<f64>) -> Result<Self> {
        check(!lambda.is_empty(), || "poisson needs at least one rate".into())?;
        for (i, &l) in lambda.iter().enumerate() {
            check(l.is_finite() && l > 0.0, || format!("poisson lambda[{i}] = {l} must be > 0"))?;
        }
        Ok(ClassDistribution::Poisson { lambda })
    }

    pub fn uniform(upper: u64) -> Self {
        ClassDistribution::Uniform { upper }
    }

    pub fn non_parametric(alpha: Vec<f64>) -> Result<Self> {
        check(!alpha.is_empty(), || "np vector is empty".into())?;
        if let Some(i) = alpha.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "np entry {i} = {} must be a non-negative number",
                alpha[i]
            )));
        }
        let sum: f64 = alpha.iter().sum();
        check((sum - 1.0).abs() <= 1e-9, || format!("np vector sums to {sum}, expected 1"))?;
        let ln_alpha = alpha.iter().map(|a| a.ln()).collect();
        Ok(ClassDistribution::NonParametric { alpha, ln_alpha })
    }

    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        check(mean.is_finite(), || format!("normal mean {mean} must be finite"))?;
        check(variance.is_finite() && variance > 0.0, || {
            format!("normal variance {variance} must be > 0")
        })?;
        Ok(ClassDistribution::Normal { mean, variance })
    }

    pub fn beta(a: f64, b: f64, dyads: u64) -> Result<Self> {
        check(a.is_finite() && a > 0.0, || format!("beta shape a = {a} must be > 0"))?;
        check(b.is_finite() && b > 0.0, || format!("beta shape b = {b} must be > 0"))?;
        check(dyads > 0, || "beta needs at least one dyad".into())?;
        Ok(ClassDistribution::Beta { a, b, dyads })
    }

    pub fn dirmult(alpha: Vec<f64>, nodes: u64) -> Result<Self> {
        check(alpha.len() >= 2, || "dirmult needs at least two categories".into())?;
        for (i, &a) in alpha.iter().enumerate() {
            check(a.is_finite() && a > 0.0, || format!("dirmult alpha[{i}] = {a} must be > 0"))?;
        }
        Ok(ClassDistribution::DirMult { alpha, nodes })
    }

    pub fn mvn(mean: Vec<f64>, covariance: Vec<Vec<f64>>) -> Result<Self> {
        let s = mean.len();
        check(s >= 1, || "mvn mean is empty".into())?;
        check(covariance.len() == s && covariance.iter().all(|r| r.len() == s), || {
            format!("mvn covariance must be {s}x{s} to match the mean")
        })?;
        let cov = DMatrix::from_fn(s, s, |i, j| covariance[i][j]);
        for i in 0..s {
            for j in 0..i {
                let (x, y) = (cov[(i, j)], cov[(j, i)]);
                check((x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())), || {
                    format!("mvn covariance is not symmetric at ({i}, {j})")
                })?;
            }
        }
        let chol = nalgebra::Cholesky::new(cov.clone()).ok_or_else(|| {
            Error::InvalidParameter("mvn covariance is not positive definite".into())
        })?;
        let precision = chol.inverse();
        Ok(ClassDistribution::Mvn(Mvn {
            mean: DVector::from_vec(mean),
            covariance: cov,
            chol_lower: chol.l(),
            precision,
        }))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ClassDistribution::Poisson { .. } => "poisson",
            ClassDistribution::Uniform { .. } => "uniform",
            ClassDistribution::NonParametric { .. } => "np",
            ClassDistribution::Normal { .. } => "normal",
            ClassDistribution::Beta { .. } => "beta",
            ClassDistribution::DirMult { .. } => "dirmult",
            ClassDistribution::Mvn(_) => "mvn",
        }
    }

    /// Checks that this family can be placed on `spec` at population `n`.
    pub fn check_property(&self, spec: &PropertySpec, n: usize) -> Result<()> {
        use PropertySpec as P;
        let dim = spec.dim();
        let dyads = crate::math::pairs(n as u64);
        let incompatible = || {
            Err(Error::Validation(format!(
                "distribution {} cannot be placed on property {}",
                self.kind_name(),
                spec.kind_name()
            )))
        };
        match (self, spec) {
            (ClassDistribution::Poisson { lambda }, P::Edges | P::Triangles | P::Mixing { .. }) => {
                check(lambda.len() == 1 || lambda.len() == dim, || {
                    format!("poisson has {} rates for a {dim}-dimensional statistic", lambda.len())
                })
                .map_err(to_validation)
            }
            (ClassDistribution::Uniform { upper }, P::Edges) => {
                check(*upper == dyads, || format!("uniform upper bound {upper} != C(n,2) = {dyads}"))
                    .map_err(to_validation)
            }
            (ClassDistribution::NonParametric { alpha, .. }, P::Edges) => {
                check(alpha.len() as u64 == dyads + 1, || {
                    format!("np vector has length {}, expected C(n,2) + 1 = {}", alpha.len(), dyads + 1)
                })
                .map_err(to_validation)
            }
            (ClassDistribution::Normal { .. }, P::Density | P::Edges | P::Triangles)
            | (ClassDistribution::Normal { .. }, P::DegreeDistByGroup { .. }) => Ok(()),
            (ClassDistribution::Beta { dyads: d, .. }, P::Density) => {
                check(*d == dyads, || format!("beta bound to {d} dyads, population has {dyads}"))
                    .map_err(to_validation)
            }
            (ClassDistribution::DirMult { alpha, nodes }, P::DegreeDist { max_degree }) => {
                check(alpha.len() == max_degree + 1, || {
                    format!(
                        "dirmult alpha has length {} but degreedist tracks degrees 0..={max_degree} ({} bins)",
                        alpha.len(),
                        max_degree + 1
                    )
                })
                .map_err(to_validation)?;
                check(*nodes == n as u64, || format!("dirmult bound to {nodes} nodes, population is {n}"))
                    .map_err(to_validation)
            }
            (
                ClassDistribution::Mvn(m),
                P::DegMixing { .. } | P::Mixing { .. } | P::DegreeDistByGroup { .. } | P::DegreeDist { .. },
            ) => check(m.mean.len() == dim, || {
                format!(
                    "mvn dimension {} does not match the {dim} entries of {}",
                    m.mean.len(),
                    spec.kind_name()
                )
            })
            .map_err(to_validation),
            _ => incompatible(),
        }
    }

    /// Unnormalised `ln P(x)`; `-inf` outside the support.
    pub fn log_weight(&self, x: &[f64]) -> f64 {
        match self {
            ClassDistribution::Poisson { lambda } => x
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let l = lambda[if lambda.len() == 1 { 0 } else { i }];
                    match as_count(k) {
                        Some(k) => k as f64 * l.ln() - l - ln_factorial(k),
                        None => f64::NEG_INFINITY,
                    }
                })
                .sum(),
            ClassDistribution::Uniform { upper } => match as_count(x[0]) {
                Some(k) if k <= *upper => -((*upper + 1) as f64).ln(),
                _ => f64::NEG_INFINITY,
            },
            ClassDistribution::NonParametric { ln_alpha, .. } => match as_count(x[0]) {
                Some(k) if (k as usize) < ln_alpha.len() => ln_alpha[k as usize],
                _ => f64::NEG_INFINITY,
            },
            ClassDistribution::Normal { mean, variance } => x
                .iter()
                .map(|&v| -(v - mean) * (v - mean) / (2.0 * variance))
                .sum(),
            ClassDistribution::Beta { a, b, dyads } => {
                let x = clamp_density(x[0], *dyads);
                (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln()
            }
            ClassDistribution::DirMult { alpha, nodes } => {
                let mut total = 0u64;
                let mut out = 0.0;
                for (&c, &a) in x.iter().zip(alpha) {
                    let Some(c) = as_count(c) else {
                        return f64::NEG_INFINITY;
                    };
                    total += c;
                    out += ln_gamma(c as f64 + a) - ln_gamma(a) - ln_factorial(c);
                }
                if total != *nodes {
                    return f64::NEG_INFINITY;
                }
                let a_sum: f64 = alpha.iter().sum();
                out + ln_factorial(*nodes) + ln_gamma(a_sum) - ln_gamma(*nodes as f64 + a_sum)
            }
            ClassDistribution::Mvn(m) => -0.5 * m.quad(x),
        }
    }

    /// `ln P(to) - ln P(from)`. `-inf` marks a proposal outside the support.
    pub fn log_pmf_ratio(&self, from: &[f64], to: &[f64]) -> f64 {
        match self {
            ClassDistribution::Uniform { upper } => match as_count(to[0]) {
                Some(k) if k <= *upper => 0.0,
                _ => f64::NEG_INFINITY,
            },
            ClassDistribution::Poisson { lambda } => {
                let mut out = 0.0;
                for (i, (&f, &t)) in from.iter().zip(to).enumerate() {
                    if f == t {
                        continue;
                    }
                    let (Some(f), Some(t)) = (as_count(f), as_count(t)) else {
                        return f64::NEG_INFINITY;
                    };
                    let l = lambda[if lambda.len() == 1 { 0 } else { i }];
                    // lambda^(t-f) * f! / t!
                    out += (t as f64 - f as f64) * l.ln()
                        - ln_gamma_shift(f as f64 + 1.0, t as i64 - f as i64);
                }
                out
            }
            ClassDistribution::DirMult { alpha, .. } => {
                let mut out = 0.0;
                for ((&f, &t), &a) in from.iter().zip(to).zip(alpha) {
                    if f == t {
                        continue;
                    }
                    let (Some(f), Some(t)) = (as_count(f), as_count(t)) else {
                        return f64::NEG_INFINITY;
                    };
                    let d = t as i64 - f as i64;
                    out += ln_gamma_shift(f as f64 + a, d) - ln_gamma_shift(f as f64 + 1.0, d);
                }
                out
            }
            ClassDistribution::Normal { mean, variance } => from
                .iter()
                .zip(to)
                .map(|(&f, &t)| ((f - mean).powi(2) - (t - mean).powi(2)) / (2.0 * variance))
                .sum(),
            _ => {
                let t = self.log_weight(to);
                if t == f64::NEG_INFINITY {
                    return t;
                }
                t - self.log_weight(from)
            }
        }
    }

    /// Mean of the distribution per coordinate, for initial states and
    /// overlays.
    pub fn mean(&self, dim: usize) -> Vec<f64> {
        match self {
            ClassDistribution::Poisson { lambda } => (0..dim)
                .map(|i| lambda[if lambda.len() == 1 { 0 } else { i }])
                .collect(),
            ClassDistribution::Uniform { upper } => vec![*upper as f64 / 2.0],
            ClassDistribution::NonParametric { alpha, .. } => {
                vec![alpha.iter().enumerate().map(|(k, a)| k as f64 * a).sum()]
            }
            ClassDistribution::Normal { mean, .. } => vec![*mean; dim],
            ClassDistribution::Beta { a, b, .. } => vec![a / (a + b)],
            ClassDistribution::DirMult { alpha, nodes } => {
                let s: f64 = alpha.iter().sum();
                alpha.iter().map(|a| *nodes as f64 * a / s).collect()
            }
            ClassDistribution::Mvn(m) => m.mean.iter().copied().collect(),
        }
    }

    /// Exact marginal mean and central 95% interval where the marginal is
    /// normal.
    pub fn normal_overlay(&self, coord: usize) -> Option<Overlay> {
        let (mu, var) = match self {
            ClassDistribution::Normal { mean, variance } => (*mean, *variance),
            ClassDistribution::Mvn(m) => (m.mean[coord], m.covariance[(coord, coord)]),
            _ => return None,
        };
        let z = 1.959_963_984_540_054;
        Some(Overlay {
            mean: mu,
            lower: mu - z * var.sqrt(),
            upper: mu + z * var.sqrt(),
        })
    }

    /// `count` independent draws; each row has `dim` coordinates.
    pub fn sample_theoretical<R: Rng + ?Sized>(&self, dim: usize, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.draw(dim, rng)).collect()
    }

    fn draw<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        match self {
            ClassDistribution::Poisson { lambda } => (0..dim)
                .map(|i| {
                    let l = lambda[if lambda.len() == 1 { 0 } else { i }];
                    Poisson::new(l).expect("validated rate").sample(rng)
                })
                .collect(),
            ClassDistribution::Uniform { upper } => vec![rng.random_range(0..=*upper) as f64],
            ClassDistribution::NonParametric { alpha, .. } => {
                let idx = rand::distr::weighted::WeightedIndex::new(alpha)
                    .expect("validated np vector")
                    .sample(rng);
                vec![idx as f64]
            }
            ClassDistribution::Normal { mean, variance } => {
                let d = Normal::new(*mean, variance.sqrt()).expect("validated variance");
                (0..dim).map(|_| d.sample(rng)).collect()
            }
            ClassDistribution::Beta { a, b, .. } => {
                vec![Beta::new(*a, *b).expect("validated shapes").sample(rng)]
            }
            ClassDistribution::DirMult { alpha, nodes } => {
                let g: Vec<f64> = alpha
                    .iter()
                    .map(|&a| Gamma::new(a, 1.0).expect("validated alpha").sample(rng))
                    .collect();
                let total: f64 = g.iter().sum();
                // multinomial by sequential conditional binomials
                let mut left = *nodes;
                let mut mass = 1.0;
                let mut out = Vec::with_capacity(g.len());
                for (i, &gi) in g.iter().enumerate() {
                    let p = gi / total;
                    let c = if i + 1 == g.len() || left == 0 {
                        left
                    } else {
                        let q = (p / mass).clamp(0.0, 1.0);
                        Binomial::new(left, q).expect("probability in [0,1]").sample(rng)
                    };
                    out.push(c as f64);
                    left -= c;
                    mass -= p;
                }
                out
            }
            ClassDistribution::Mvn(m) => {
                let z = DVector::from_fn(m.mean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
                (&m.mean + &m.chol_lower * z).iter().copied().collect()
            }
        }
    }
}

fn to_validation(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Validation(m),
        other => other,
    }
}

#[inline]
fn as_count(x: f64) -> Option<u64> {
    (x >= 0.0 && x.fract() == 0.0 && x < 9.0e15).then_some(x as u64)
}

#[inline]
fn clamp_density(x: f64, dyads: u64) -> f64 {
    let eps = 1.0 / (2.0 * dyads as f64);
    x.clamp(eps, 1.0 - eps)
}

/// Reference lines for trace plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Overlay {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}
