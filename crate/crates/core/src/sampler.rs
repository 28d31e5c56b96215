//! Tie-no-tie Metropolis-Hastings over labelled simple graphs on `n` nodes,
//! targeting `P(g) ∝ P(x(g)) / |c(x(g))|`.
//!
//! One "iteration" is one toggle attempt. The proposal keeps the existing
//! edges and the absent dyads as two disjoint pools: with probability 1/2 a
//! uniform edge is removed, otherwise a uniform non-edge is added. At the
//! empty and complete graphs the only possible move is forced, and the
//! Hastings ratio accounts for it exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cardinality::{BoundTerm, CardinalityEstimator, CardinalityMode};
use crate::distributions::ClassDistribution;
use crate::error::{Error, Result};
use crate::graph::{Dyad, Graph};
use crate::stats::{names_all, PropertySpec, StatDelta};

/// A fully specified congruence class model.
#[derive(Debug, Clone)]
pub struct CcmSpec {
    pub population: usize,
    pub properties: Vec<PropertySpec>,
    pub distributions: Vec<ClassDistribution>,
    pub cardinality: CardinalityEstimator,
    pub covariates: Option<Vec<u32>>,
}

impl CcmSpec {
    /// Builds and validates a spec using the default estimator for each
    /// property.
    pub fn new(
        population: usize,
        properties: Vec<PropertySpec>,
        distributions: Vec<ClassDistribution>,
        covariates: Option<Vec<u32>>,
    ) -> Result<Self> {
        let cardinality = CardinalityEstimator::default_for(&properties);
        let spec = CcmSpec {
            population,
            properties,
            distributions,
            cardinality,
            covariates,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_cardinality(mut self, cardinality: CardinalityEstimator) -> Result<Self> {
        self.cardinality = cardinality;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.population;
        if n < 2 {
            return Err(Error::Validation(format!(
                "population {n} has no dyads; at least 2 nodes are required"
            )));
        }
        if self.properties.is_empty() {
            return Err(Error::Validation("at least one property is required".into()));
        }
        if self.properties.len() != self.distributions.len() {
            return Err(Error::Validation(format!(
                "{} properties but {} distributions",
                self.properties.len(),
                self.distributions.len()
            )));
        }
        for (i, (p, d)) in self.properties.iter().zip(&self.distributions).enumerate() {
            p.validate()
                .map_err(|e| Error::Validation(format!("property {i}: {e}")))?;
            d.check_property(p, n)
                .map_err(|e| Error::Validation(format!("property {i}: {e}")))?;
            if let Some(groups) = p.groups() {
                let cov = self.covariates.as_ref().ok_or_else(|| {
                    Error::Validation(format!(
                        "property {i} ({}) requires node covariates",
                        p.kind_name()
                    ))
                })?;
                if let Some(pos) = cov.iter().position(|&c| c as usize >= groups) {
                    return Err(Error::Validation(format!(
                        "covariate of node {pos} is {} but property {i} declares {groups} groups",
                        cov[pos]
                    )));
                }
            }
        }
        if let Some(cov) = &self.covariates {
            if cov.len() != n {
                return Err(Error::Validation(format!(
                    "{} covariate labels for a population of {n}",
                    cov.len()
                )));
            }
        }
        self.cardinality
            .validate(&self.properties, n, self.covariates.as_deref())
    }

    pub fn names(&self) -> Vec<String> {
        names_all(&self.properties)
    }

    pub fn dim(&self) -> usize {
        self.properties.iter().map(PropertySpec::dim).sum()
    }

    /// Unnormalised log target `ln P(x(g)) - ln|c(x(g))|` up to the class-size
    /// constant, or `None` when `g` lies outside the support. Only the
    /// oracle-table estimator knows absolute class sizes; for product
    /// estimators the result omits the class-size term.
    pub fn log_weight(&self, g: &Graph) -> Result<Option<f64>> {
        let mut total = 0.0;
        let mut key = Vec::new();
        for (p, d) in self.properties.iter().zip(&self.distributions) {
            let counts = match p.evaluate_counts(g) {
                Ok(c) => c,
                Err(Error::Support(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let div = p.divisor(g.node_count());
            let values: Vec<f64> = counts.iter().map(|&c| c as f64 / div).collect();
            let w = d.log_weight(&values);
            if w == f64::NEG_INFINITY {
                return Ok(None);
            }
            total += w;
            key.extend(counts);
        }
        if let CardinalityEstimator::OracleTable(t) = &self.cardinality {
            match t.log_size(&key) {
                Some(s) => total -= s,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }
}

/// Run controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Toggle attempts discarded before recording.
    pub burnin: u64,
    /// Attempts between recorded rows.
    pub interval: u64,
    /// Number of recorded rows.
    pub sample_size: usize,
    pub seed: u64,
    #[serde(skip)]
    pub initial_graph: Option<Graph>,
    pub use_initial: bool,
    /// When false, each recorded state's graph is kept in the ensemble.
    pub stats_only: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burnin: 100_000,
            interval: 1000,
            sample_size: 1000,
            seed: 0,
            initial_graph: None,
            use_initial: false,
            stats_only: true,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.interval < 1 {
            return Err(Error::Validation("sampler.interval must be >= 1".into()));
        }
        if self.sample_size < 1 {
            return Err(Error::Validation("sampler.sample_size must be >= 1".into()));
        }
        if self.use_initial && self.initial_graph.is_none() {
            return Err(Error::Validation(
                "use_initial is set but no initial graph was supplied".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Acceptance {
    pub proposed: u64,
    pub accepted: u64,
    /// Proposals leaving the support, rejected without a Metropolis draw.
    pub auto_rejected: u64,
}

impl Acceptance {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn merge(&mut self, other: &Acceptance) {
        self.proposed += other.proposed;
        self.accepted += other.accepted;
        self.auto_rejected += other.auto_rejected;
    }
}

#[derive(Debug, Clone)]
pub struct SampleOutput {
    pub names: Vec<String>,
    /// `sample_size` rows of reported statistic values.
    pub stats: Vec<Vec<f64>>,
    pub ensemble: Vec<Graph>,
    pub acceptance: Acceptance,
    pub final_state: Graph,
}

impl SampleOutput {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.stats.iter().map(|r| r[j]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.column(j))
    }
}

/// A tie-no-tie move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proposal {
    pub dyad: Dyad,
    pub adding: bool,
    /// `ln q(g | g') - ln q(g' | g)`.
    pub log_q_ratio: f64,
}

fn p_add(m: u64, dyads: u64) -> f64 {
    if m == 0 {
        1.0
    } else if m == dyads {
        0.0
    } else {
        0.5
    }
}

/// Hastings ratio of a tie-no-tie move out of a graph with `m` of `dyads`
/// edges.
pub fn tnt_log_q_ratio(m: u64, dyads: u64, adding: bool) -> f64 {
    if adding {
        let forward = p_add(m, dyads) / (dyads - m) as f64;
        let reverse = (1.0 - p_add(m + 1, dyads)) / (m + 1) as f64;
        (reverse / forward).ln()
    } else {
        let forward = (1.0 - p_add(m, dyads)) / m as f64;
        let reverse = p_add(m - 1, dyads) / (dyads - m + 1) as f64;
        (reverse / forward).ln()
    }
}

pub fn propose<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<Proposal> {
    let dyads = g.dyad_count();
    if dyads == 0 {
        return Err(Error::Precondition("a graph with fewer than 2 nodes has no dyads".into()));
    }
    let m = g.edge_count() as u64;
    let adding = match m {
        0 => true,
        _ if m == dyads => false,
        _ => rng.random::<bool>(),
    };
    let dyad = if adding {
        g.uniform_nonedge(rng)?
    } else {
        g.uniform_edge(rng)?
    };
    Ok(Proposal {
        dyad,
        adding,
        log_q_ratio: tnt_log_q_ratio(m, dyads, adding),
    })
}

/// Outcome of one toggle attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    Rejected,
    OutOfSupport,
}

enum Cardinality {
    Product(Vec<BoundTerm>),
    Oracle(std::sync::Arc<crate::enumeration::EnumerationTable>),
}

/// A single chain: graph state, cached statistics and its random stream.
pub struct Chain<'s> {
    spec: &'s CcmSpec,
    graph: Graph,
    rng: ChaCha8Rng,
    counts: Vec<Vec<i64>>,
    values: Vec<Vec<f64>>,
    divisors: Vec<f64>,
    deltas: Vec<StatDelta>,
    proposed_values: Vec<Vec<f64>>,
    proposed_counts: Vec<Vec<i64>>,
    key_from: Vec<i64>,
    key_to: Vec<i64>,
    cardinality: Cardinality,
    check_cancellation: bool,
    acceptance: Acceptance,
}

const RECOMPUTE_EVERY: u64 = 1_000_000;
const FINGERPRINT_EVERY: u64 = 100_003;

impl<'s> Chain<'s> {
    /// Starts a chain at `initial`, which must lie inside the support.
    pub fn new(spec: &'s CcmSpec, initial: Graph, seed: u64) -> Result<Self> {
        let mut graph = initial;
        if graph.node_count() != spec.population {
            return Err(Error::Validation(format!(
                "initial graph has {} nodes, population is {}",
                graph.node_count(),
                spec.population
            )));
        }
        if spec.covariates.is_some() {
            graph.set_covariate(spec.covariates.clone())?;
        }
        for p in &spec.properties {
            p.check_graph(&graph)?;
        }
        let n = spec.population;
        let mut counts = Vec::with_capacity(spec.properties.len());
        for p in &spec.properties {
            counts.push(p.evaluate_counts(&graph)?);
        }
        let divisors: Vec<f64> = spec.properties.iter().map(|p| p.divisor(n)).collect();
        let values: Vec<Vec<f64>> = counts
            .iter()
            .zip(&divisors)
            .map(|(c, s)| c.iter().map(|&x| x as f64 / s).collect())
            .collect();
        for (i, (d, v)) in spec.distributions.iter().zip(&values).enumerate() {
            if d.log_weight(v) == f64::NEG_INFINITY {
                return Err(Error::Support(format!(
                    "initial graph has zero {} probability for property {i} ({}) at {v:?}",
                    d.kind_name(),
                    spec.properties[i].kind_name()
                )));
            }
        }
        let cardinality = match &spec.cardinality {
            CardinalityEstimator::Product(modes) => Cardinality::Product(
                spec.properties
                    .iter()
                    .zip(modes)
                    .map(|(p, &m)| BoundTerm::bind(m, p, n, spec.covariates.as_deref()))
                    .collect(),
            ),
            CardinalityEstimator::OracleTable(t) => {
                let key: Vec<i64> = counts.concat();
                if t.size(&key).is_none() {
                    return Err(Error::Support(format!(
                        "initial graph's class {} does not occur in the oracle table",
                        crate::enumeration::EnumerationTable::key_string(&key)
                    )));
                }
                Cardinality::Oracle(t.clone())
            }
        };
        let check_cancellation = cfg!(debug_assertions)
            && matches!(&spec.cardinality, CardinalityEstimator::Product(modes)
                if spec.properties.len() == 1
                    && modes[0] == CardinalityMode::ExactAnalytic
                    && matches!(spec.properties[0], PropertySpec::Edges | PropertySpec::Density));
        Ok(Chain {
            spec,
            graph,
            rng: ChaCha8Rng::seed_from_u64(seed),
            deltas: vec![StatDelta::default(); spec.properties.len()],
            proposed_values: values.clone(),
            proposed_counts: counts.clone(),
            counts,
            values,
            divisors,
            key_from: Vec::new(),
            key_to: Vec::new(),
            cardinality,
            check_cancellation,
            acceptance: Acceptance::default(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn acceptance(&self) -> Acceptance {
        self.acceptance
    }

    /// Cached statistic values, concatenated in property order.
    pub fn values(&self) -> Vec<f64> {
        self.values.concat()
    }

    pub fn write_values(&self, out: &mut Vec<f64>) {
        out.clear();
        for v in &self.values {
            out.extend_from_slice(v);
        }
    }

    /// One toggle attempt.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let proposal = propose(&self.graph, &mut self.rng)?;
        self.acceptance.proposed += 1;
        let outcome = self.evaluate(proposal)?;
        match outcome {
            StepOutcome::Accepted => {
                self.acceptance.accepted += 1;
                self.graph.toggle(proposal.dyad);
                for i in 0..self.counts.len() {
                    self.deltas[i].apply(&mut self.counts[i]);
                    for &(j, _) in self.deltas[i].entries() {
                        let c = self.counts[i][j];
                        self.proposed_counts[i][j] = c;
                        self.values[i][j] = c as f64 / self.divisors[i];
                        self.proposed_values[i][j] = self.values[i][j];
                    }
                }
            }
            StepOutcome::OutOfSupport => self.acceptance.auto_rejected += 1,
            StepOutcome::Rejected => {}
        }
        if cfg!(debug_assertions) {
            self.debug_checks(outcome)?;
        }
        Ok(outcome)
    }

    fn evaluate(&mut self, proposal: Proposal) -> Result<StepOutcome> {
        let spec = self.spec;
        let g = &self.graph;
        let d = proposal.dyad;
        for (i, p) in spec.properties.iter().enumerate() {
            match p.change_into(g, d, &mut self.deltas[i]) {
                Ok(()) => {}
                Err(Error::Support(_)) => return Ok(StepOutcome::OutOfSupport),
                Err(e) => return Err(e),
            }
        }
        let mut pmf = 0.0;
        for (i, dist) in spec.distributions.iter().enumerate() {
            let to = &mut self.proposed_values[i];
            let scratch = &mut self.proposed_counts[i];
            self.deltas[i].apply(scratch);
            for &(j, _) in self.deltas[i].entries() {
                to[j] = scratch[j] as f64 / self.divisors[i];
            }
            let negative = self.deltas[i].entries().iter().any(|&(j, _)| scratch[j] < 0);
            let r = if negative {
                f64::NAN
            } else {
                dist.log_pmf_ratio(&self.values[i], to)
            };
            // restore the scratch buffers to the current state
            for &(j, _) in self.deltas[i].entries() {
                scratch[j] = self.counts[i][j];
                to[j] = self.values[i][j];
            }
            if negative {
                return Err(Error::Invariant(format!(
                    "a {} count would become negative",
                    spec.properties[i].kind_name()
                )));
            }
            if r == f64::NEG_INFINITY {
                return Ok(StepOutcome::OutOfSupport);
            }
            if !r.is_finite() {
                return Err(Error::Runtime(format!(
                    "non-finite {} ratio ({r}) for property {i} ({})",
                    dist.kind_name(),
                    spec.properties[i].kind_name()
                )));
            }
            pmf += r;
        }
        let (u, v) = d.endpoints();
        let (a, b) = (g.degree(u), g.degree(v));
        let card = match &self.cardinality {
            Cardinality::Product(terms) => terms
                .iter()
                .enumerate()
                .map(|(i, t)| t.log_ratio(g, a, b, proposal.adding, &self.counts[i], &self.deltas[i]))
                .sum::<f64>(),
            Cardinality::Oracle(table) => {
                self.key_from.clear();
                self.key_to.clear();
                for (c, delta) in self.counts.iter().zip(&self.deltas) {
                    let start = self.key_to.len();
                    self.key_from.extend_from_slice(c);
                    self.key_to.extend_from_slice(c);
                    delta.apply(&mut self.key_to[start..]);
                }
                let r = table.log_ratio(&self.key_from, &self.key_to);
                if r == f64::NEG_INFINITY {
                    return Ok(StepOutcome::OutOfSupport);
                }
                r
            }
        };
        if !card.is_finite() {
            return Err(Error::Runtime(format!(
                "non-finite cardinality ratio ({card}) under {}",
                spec.cardinality.mode_name()
            )));
        }
        let delta = pmf + card + proposal.log_q_ratio;
        if self.check_cancellation {
            let m = g.edge_count() as u64;
            let interior = m > 0 && m < g.dyad_count();
            let interior_after = if proposal.adding { m + 1 < g.dyad_count() } else { m > 1 };
            if interior && interior_after && (delta - pmf).abs() > 1e-12 * (1.0 + pmf.abs()) {
                return Err(Error::Invariant(format!(
                    "cardinality and proposal ratios do not cancel: delta {delta}, pmf ratio {pmf}"
                )));
            }
        }
        if delta >= 0.0 {
            return Ok(StepOutcome::Accepted);
        }
        let u: f64 = self.rng.random();
        Ok(if u.ln() < delta {
            StepOutcome::Accepted
        } else {
            StepOutcome::Rejected
        })
    }

    fn debug_checks(&mut self, outcome: StepOutcome) -> Result<()> {
        let attempts = self.acceptance.proposed;
        if attempts.is_multiple_of(RECOMPUTE_EVERY) {
            self.verify_cache()?;
        }
        if outcome != StepOutcome::Accepted && attempts.is_multiple_of(FINGERPRINT_EVERY) {
            let before = self.graph.fingerprint();
            self.graph.check_consistency()?;
            if before != self.graph.fingerprint() {
                return Err(Error::Invariant("rejected proposal changed the graph".into()));
            }
        }
        Ok(())
    }

    /// Recomputes every statistic from scratch and compares with the cache.
    pub fn verify_cache(&self) -> Result<()> {
        for (i, p) in self.spec.properties.iter().enumerate() {
            let fresh = p.evaluate_counts(&self.graph)?;
            if fresh != self.counts[i] {
                return Err(Error::Invariant(format!(
                    "cached {} statistics drifted from a full recompute",
                    p.kind_name()
                )));
            }
        }
        Ok(())
    }

    pub fn run_attempts(&mut self, attempts: u64) -> Result<()> {
        for _ in 0..attempts {
            self.step()?;
            if self.acceptance.proposed.is_multiple_of(PROGRESS_EVERY) {
                log::info!(
                    "{} attempts, acceptance {:.4}, out of support {}",
                    self.acceptance.proposed,
                    self.acceptance.rate(),
                    self.acceptance.auto_rejected
                );
            }
        }
        Ok(())
    }
}

const PROGRESS_EVERY: u64 = 1_000_000;

/// Default starting graph: a uniformly random graph in the modal edge class
/// of the first edge-type property, else the empty graph, else the modal
/// class of a lone edge-count property.
pub fn initial_graph(spec: &CcmSpec, seed: u64) -> Result<Graph> {
    let n = spec.population;
    let dyads = crate::math::pairs(n as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_F42D_4C95_7F2D);
    let mut candidates: Vec<u64> = Vec::new();
    for (p, d) in spec.properties.iter().zip(&spec.distributions) {
        match p {
            PropertySpec::Edges => candidates.push(d.mean(1)[0].round().clamp(0.0, dyads as f64) as u64),
            PropertySpec::Density => {
                candidates.push((d.mean(1)[0] * dyads as f64).round().clamp(0.0, dyads as f64) as u64)
            }
            _ => {}
        }
    }
    candidates.push(0);
    for (p, d) in spec.properties.iter().zip(&spec.distributions) {
        if matches!(p, PropertySpec::Edges | PropertySpec::Density) {
            let div = p.divisor(n);
            let modal = (0..=dyads)
                .max_by(|&a, &b| {
                    d.log_weight(&[a as f64 / div])
                        .total_cmp(&d.log_weight(&[b as f64 / div]))
                })
                .unwrap_or(0);
            candidates.push(modal);
        }
    }
    let mut last = None;
    for m in candidates {
        let g = random_gnm(n, m, spec.covariates.clone(), &mut rng)?;
        match spec.log_weight(&g) {
            Ok(Some(_)) => return Ok(g),
            Ok(None) => last = Some(m),
            Err(e) => return Err(e),
        }
    }
    let g = random_gnm(n, last.unwrap_or(0), spec.covariates.clone(), &mut rng)?;
    let reason = describe_violation(spec, &g);
    Err(Error::Support(format!(
        "could not construct an initial graph inside the support: {reason}"
    )))
}

fn describe_violation(spec: &CcmSpec, g: &Graph) -> String {
    for (i, (p, d)) in spec.properties.iter().zip(&spec.distributions).enumerate() {
        match p.evaluate(g) {
            Err(e) => return format!("property {i} ({}): {e}", p.kind_name()),
            Ok(v) => {
                if d.log_weight(&v.values) == f64::NEG_INFINITY {
                    return format!(
                        "property {i} ({}) value {:?} has zero {} probability",
                        p.kind_name(),
                        v.values,
                        d.kind_name()
                    );
                }
            }
        }
    }
    "the class is absent from the oracle table".into()
}

/// Uniform graph with exactly `m` edges.
pub fn random_gnm<R: Rng + ?Sized>(n: usize, m: u64, covariate: Option<Vec<u32>>, rng: &mut R) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    g.set_covariate(covariate)?;
    let dyads = g.dyad_count();
    if m > dyads {
        return Err(Error::InvalidParameter(format!("{m} edges exceed the {dyads} dyads")));
    }
    if m * 2 <= dyads {
        while (g.edge_count() as u64) < m {
            let d = g.uniform_nonedge(rng)?;
            g.toggle(d);
        }
    } else {
        let mut full = Graph::complete(n)?;
        full.set_covariate(g.covariate().map(<[u32]>::to_vec))?;
        while full.edge_count() as u64 > m {
            let d = full.uniform_edge(rng)?;
            full.toggle(d);
        }
        g = full;
    }
    Ok(g)
}

/// Runs one chain: `burnin` attempts, then `sample_size` rows recorded every
/// `interval` attempts.
pub fn run(spec: &CcmSpec, config: &SamplerConfig) -> Result<SampleOutput> {
    run_with_observer(spec, config, |_, _| {})
}

/// As [`run`], calling `observe(row, graph)` at every recorded state.
pub fn run_with_observer<F>(spec: &CcmSpec, config: &SamplerConfig, mut observe: F) -> Result<SampleOutput>
where
    F: FnMut(usize, &Graph),
{
    spec.validate()?;
    config.validate()?;
    let initial = match (&config.initial_graph, config.use_initial) {
        (Some(g), true) => g.clone(),
        _ => initial_graph(spec, config.seed)?,
    };
    let mut chain = Chain::new(spec, initial, config.seed)?;
    chain.run_attempts(config.burnin)?;
    let mut stats = Vec::with_capacity(config.sample_size);
    let mut ensemble = Vec::new();
    for row in 0..config.sample_size {
        chain.run_attempts(config.interval)?;
        stats.push(chain.values());
        if !config.stats_only {
            ensemble.push(chain.graph().clone());
        }
        observe(row, chain.graph());
    }
    chain.verify_cache()?;
    Ok(SampleOutput {
        names: spec.names(),
        stats,
        ensemble,
        acceptance: chain.acceptance(),
        final_state: chain.into_graph(),
    })
}

/// Seed of chain `index` in a multi-chain run; chain 0 keeps the base seed.
pub fn chain_seed(base: u64, index: usize) -> u64 {
    if index == 0 {
        return base;
    }
    let mut z = base.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `chains` independent chains on separate threads.
pub fn run_chains(spec: &CcmSpec, config: &SamplerConfig, chains: usize) -> Result<Vec<SampleOutput>> {
    if chains == 0 {
        return Err(Error::Validation("--chains must be >= 1".into()));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..chains)
            .map(|i| {
                let mut cfg = config.clone();
                cfg.seed = chain_seed(config.seed, i);
                s.spawn(move || run(spec, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Runtime("chain thread panicked".into()))))
            .collect()
    })
}
