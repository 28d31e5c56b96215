//! Log ratios of congruence-class sizes, `ln |c(x_from)| - ln |c(x_to)|`.
//!
//! * edges / density and attribute mixing: exact binomial closed forms;
//! * degree distribution: multinomial over degree bins times the
//!   Bender–Canfield graph count
//!   `N(d) = (2m)! / (2^m m! prod d_i!) * exp(-nu/2 - nu^2/4)`,
//!   `nu = sum d_i (d_i - 1) / (2m)`;
//! * joint degree matrix: the degree-distribution estimate times the
//!   probability that a uniform stub matching realises the matrix;
//! * oracle tables: exact sizes from exhaustive enumeration.
//!
//! Everything is computed in log space.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::enumeration::EnumerationTable;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::{ln_choose, ln_factorial, ln_gamma_shift, ln_stub_matchings, pairs};
use crate::stats::{PropertySpec, StatDelta};

/// How one property contributes to the cardinality ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CardinalityMode {
    /// Binomial closed forms (edges, density, mixing).
    ExactAnalytic,
    /// Multinomial times Bender–Canfield (degreedist, degreedist_by_group).
    BenderCanfield,
    /// Stub-matching factorisation (degmixing).
    MatchingApprox,
    /// No cardinality term: the property only tilts the target.
    Tilt,
}

impl CardinalityMode {
    pub fn default_for(spec: &PropertySpec) -> Self {
        match spec {
            PropertySpec::Edges | PropertySpec::Density | PropertySpec::Mixing { .. } => {
                CardinalityMode::ExactAnalytic
            }
            PropertySpec::DegreeDist { .. } | PropertySpec::DegreeDistByGroup { .. } => {
                CardinalityMode::BenderCanfield
            }
            PropertySpec::DegMixing { .. } => CardinalityMode::MatchingApprox,
            PropertySpec::Triangles => CardinalityMode::Tilt,
        }
    }

    pub fn supports(self, spec: &PropertySpec) -> bool {
        self == CardinalityMode::Tilt || self == CardinalityMode::default_for(spec)
    }
}

/// Cardinality evaluator for a whole model.
#[derive(Debug, Clone)]
pub enum CardinalityEstimator {
    /// Sum of per-property log ratios (product approximation of the joint
    /// class size).
    Product(Vec<CardinalityMode>),
    /// Exact class sizes over the joint (concatenated) statistic.
    OracleTable(Arc<EnumerationTable>),
}

impl CardinalityEstimator {
    pub fn default_for(specs: &[PropertySpec]) -> Self {
        CardinalityEstimator::Product(specs.iter().map(CardinalityMode::default_for).collect())
    }

    pub fn mode_name(&self) -> String {
        match self {
            CardinalityEstimator::Product(modes) => {
                let names: Vec<String> = modes
                    .iter()
                    .map(|m| {
                        serde_json::to_value(m)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_owned))
                            .unwrap_or_default()
                    })
                    .collect();
                format!("product-approx[{}]", names.join(","))
            }
            CardinalityEstimator::OracleTable(_) => "oracle-table".into(),
        }
    }

    pub fn validate(&self, specs: &[PropertySpec], n: usize, covariate: Option<&[u32]>) -> Result<()> {
        match self {
            CardinalityEstimator::Product(modes) => {
                if modes.len() != specs.len() {
                    return Err(Error::Validation(format!(
                        "{} cardinality modes for {} properties",
                        modes.len(),
                        specs.len()
                    )));
                }
                for (i, (m, s)) in modes.iter().zip(specs).enumerate() {
                    if !m.supports(s) {
                        return Err(Error::Validation(format!(
                            "cardinality mode {m:?} cannot be used for property {i} ({})",
                            s.kind_name()
                        )));
                    }
                }
                Ok(())
            }
            CardinalityEstimator::OracleTable(t) => {
                if t.node_count() != n || t.properties() != specs {
                    return Err(Error::Validation(
                        "oracle table was built for a different population or property list".into(),
                    ));
                }
                if t.covariate() != covariate {
                    return Err(Error::Validation(
                        "oracle table was built for different covariates".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// `ln[C(M, k_from) / C(M, k_to)]` with `M = C(n, 2)`.
pub fn log_ratio_edges(k_from: u64, k_to: u64, n: u64) -> Result<f64> {
    let dyads = pairs(n);
    for k in [k_from, k_to] {
        if k > dyads {
            return Err(Error::Domain(format!(
                "edge count {k} outside [0, {dyads}] for n = {n}"
            )));
        }
    }
    Ok(edge_class_ratio(k_from, k_to, dyads))
}

#[inline]
fn edge_class_ratio(k_from: u64, k_to: u64, dyads: u64) -> f64 {
    if k_to == k_from + 1 {
        ((k_from + 1) as f64 / (dyads - k_from) as f64).ln()
    } else if k_from == k_to + 1 {
        ((dyads - k_to) as f64 / (k_to + 1) as f64).ln()
    } else if k_from == k_to {
        0.0
    } else {
        ln_choose(dyads, k_from) - ln_choose(dyads, k_to)
    }
}

/// Log ratio current/proposed for one mixing block holding `edges` of
/// `capacity` dyads when one edge is added (`direction = 1`) or removed
/// (`direction = -1`).
pub fn log_ratio_mixing(edges: u64, direction: i8, capacity: u64) -> Result<f64> {
    if edges > capacity {
        return Err(Error::Domain(format!(
            "block holds {edges} edges but only {capacity} dyads"
        )));
    }
    match direction {
        1 if edges == capacity => Err(Error::Domain(format!(
            "cannot add an edge to a full block of {capacity} dyads"
        ))),
        1 => Ok(((edges + 1) as f64 / (capacity - edges) as f64).ln()),
        -1 if edges == 0 => Err(Error::Domain("cannot remove an edge from an empty block".into())),
        -1 => Ok(((capacity - edges + 1) as f64 / edges as f64).ln()),
        _ => Err(Error::Domain(format!("direction must be +1 or -1, got {direction}"))),
    }
}

/// Dyad capacity of every mixing block in `MIX<i>.<j>` order.
pub fn block_capacities(group_sizes: &[u64]) -> Vec<u64> {
    let g = group_sizes.len();
    let mut out = Vec::with_capacity(g * (g + 1) / 2);
    for i in 0..g {
        for j in i..g {
            out.push(if i == j {
                pairs(group_sizes[i])
            } else {
                group_sizes[i] * group_sizes[j]
            });
        }
    }
    out
}

/// Degree sequence summarised by bin counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSummary {
    /// `counts[j]` = number of nodes of degree `j`.
    pub counts: Vec<u64>,
    pub edges: u64,
    /// `sum_i d_i (d_i - 1)`.
    pub falling: u64,
}

impl DegreeSummary {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let stubs: u64 = counts.iter().enumerate().map(|(j, &c)| j as u64 * c).sum();
        if !stubs.is_multiple_of(2) {
            return Err(Error::Invariant(format!("degree sum {stubs} is odd")));
        }
        let falling = counts
            .iter()
            .enumerate()
            .map(|(j, &c)| (j as u64) * (j as u64).saturating_sub(1) * c)
            .sum();
        Ok(DegreeSummary {
            counts,
            edges: stubs / 2,
            falling,
        })
    }

    pub fn from_degrees(degrees: &[u32]) -> Result<Self> {
        let max = degrees.iter().copied().max().unwrap_or(0) as usize;
        let mut counts = vec![0; max + 1];
        for &d in degrees {
            counts[d as usize] += 1;
        }
        DegreeSummary::from_counts(counts)
    }

    pub fn of_graph(g: &Graph) -> Self {
        DegreeSummary {
            counts: g.degree_histogram().iter().map(|&c| c as u64).collect(),
            edges: g.edge_count() as u64,
            falling: g.sum_degree_falling(),
        }
    }

    pub fn nodes(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn count(&self, j: usize) -> u64 {
        self.counts.get(j).copied().unwrap_or(0)
    }
}

/// `-nu/2 - nu^2/4` with `nu = falling / (2m)`, zero for the empty graph.
#[inline]
fn bc_correction(edges: u64, falling: u64) -> f64 {
    if edges == 0 {
        return 0.0;
    }
    let nu = falling as f64 / (2 * edges) as f64;
    -nu / 2.0 - nu * nu / 4.0
}

/// Bender–Canfield estimate of the number of labelled simple graphs with
/// the given degree sequence, in log space.
pub fn ln_graph_count_bc(degrees: &[u32]) -> Result<f64> {
    let s = DegreeSummary::from_degrees(degrees)?;
    let ln_prod_fact: f64 = degrees.iter().map(|&d| ln_factorial(d as u64)).sum();
    Ok(ln_stub_matchings(s.edges) - ln_prod_fact + bc_correction(s.edges, s.falling))
}

/// `ln |c(D)|` for a degree distribution: multinomial placement of the bin
/// counts on labelled nodes times the Bender–Canfield count.
pub fn ln_class_size_degreedist(s: &DegreeSummary) -> f64 {
    let n = s.nodes();
    let mut out = ln_factorial(n) + ln_stub_matchings(s.edges) + bc_correction(s.edges, s.falling);
    for (j, &c) in s.counts.iter().enumerate() {
        out -= ln_factorial(c) + c as f64 * ln_factorial(j as u64);
    }
    out
}

/// Net bin-count changes when the endpoints of a toggled dyad move from
/// degrees `(a, b)` to `(a ± 1, b ± 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinMoves {
    moves: [(usize, i64); 4],
    len: usize,
}

impl BinMoves {
    pub fn new(a: usize, b: usize, adding: bool) -> Self {
        let mut out = BinMoves {
            moves: [(0, 0); 4],
            len: 0,
        };
        let mut push = |bin: usize, change: i64| {
            out.moves[out.len] = (bin, change);
            out.len += 1;
        };
        if adding {
            if a == b {
                push(a, -2);
                push(a + 1, 2);
            } else if a + 1 == b {
                // u lands in b's old bin while v leaves it
                push(a, -1);
                push(b + 1, 1);
            } else if b + 1 == a {
                push(b, -1);
                push(a + 1, 1);
            } else {
                push(a, -1);
                push(a + 1, 1);
                push(b, -1);
                push(b + 1, 1);
            }
        } else {
            assert!(a >= 1 && b >= 1, "removal from an isolated node");
            if a == b {
                push(a, -2);
                push(a - 1, 2);
            } else if b + 1 == a {
                push(a, -1);
                push(b - 1, 1);
            } else if a + 1 == b {
                push(b, -1);
                push(a - 1, 1);
            } else {
                push(a, -1);
                push(a - 1, 1);
                push(b, -1);
                push(b - 1, 1);
            }
        }
        out
    }

    pub fn as_slice(&self) -> &[(usize, i64)] {
        &self.moves[..self.len]
    }
}

/// Change of `sum d(d-1)` for the toggle.
#[inline]
fn falling_after(falling: u64, a: usize, b: usize, adding: bool) -> u64 {
    if adding {
        falling + 2 * (a + b) as u64
    } else {
        falling - 2 * (a + b - 2) as u64
    }
}

/// `ln|c(m)| - ln|c(m')|` contributions shared by every Bender–Canfield-type
/// class size: stub matchings and the `nu` correction.
#[inline]
fn bc_global_ratio(edges: u64, falling: u64, a: usize, b: usize, adding: bool) -> f64 {
    let edges_after = if adding { edges + 1 } else { edges - 1 };
    let matchings = if adding {
        // (2m+1)!! / (2m-1)!! = 2m + 1
        -((2 * edges + 1) as f64).ln()
    } else {
        ((2 * edges - 1) as f64).ln()
    };
    let falling_after = falling_after(falling, a, b, adding);
    matchings + bc_correction(edges, falling) - bc_correction(edges_after, falling_after)
}

/// Estimated `ln|c(D_before)| - ln|c(D_after)|` for toggling a dyad whose
/// endpoints have degrees `a` and `b` in the `before` state.
pub fn log_ratio_degreedist(before: &DegreeSummary, a: usize, b: usize, adding: bool) -> Result<f64> {
    if !adding && (before.edges == 0 || a == 0 || b == 0) {
        return Err(Error::Invariant("removal from a state without that edge".into()));
    }
    let mut out = bc_global_ratio(before.edges, before.falling, a, b, adding);
    for &(bin, change) in BinMoves::new(a, b, adding).as_slice() {
        let c = before.count(bin);
        if (c as i64) + change < 0 {
            return Err(Error::Invariant(format!("degree bin {bin} would go negative")));
        }
        // -ln n_j! and -n_j ln j! before minus after
        out += ln_gamma_shift(c as f64 + 1.0, change) + change as f64 * ln_factorial(bin as u64);
    }
    Ok(out)
}

/// Joint degree matrix with the degree counts it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDegreeSummary {
    pub max_degree: usize,
    /// Upper triangle in `DM<i><j>` order, degrees `1..=max_degree`.
    pub jdm: Vec<u64>,
    pub degrees: DegreeSummary,
}

impl JointDegreeSummary {
    pub fn new(max_degree: usize, jdm: Vec<u64>, degrees: DegreeSummary) -> Result<Self> {
        let k = max_degree;
        if jdm.len() != k * (k + 1) / 2 {
            return Err(Error::Invariant(format!(
                "joint degree matrix has {} entries, expected {}",
                jdm.len(),
                k * (k + 1) / 2
            )));
        }
        let mut stubs = vec![0u64; k + 1];
        let mut idx = 0;
        for i in 1..=k {
            for j in i..=k {
                stubs[i] += jdm[idx];
                stubs[j] += jdm[idx];
                idx += 1;
            }
        }
        for (deg, &s) in stubs.iter().enumerate().skip(1) {
            if s != deg as u64 * degrees.count(deg) {
                return Err(Error::Invariant(format!(
                    "joint degree matrix gives {s} stubs on degree-{deg} nodes, degree counts give {}",
                    deg as u64 * degrees.count(deg)
                )));
            }
        }
        if degrees.counts.iter().skip(k + 1).any(|&c| c > 0) {
            return Err(Error::Invariant("degree above the matrix range".into()));
        }
        Ok(JointDegreeSummary {
            max_degree,
            jdm,
            degrees,
        })
    }
}

/// `ln |c(J)|` ≈ `ln |c(D)| + ln P_match(J | d)`.
pub fn ln_class_size_degmixing(s: &JointDegreeSummary) -> f64 {
    let k = s.max_degree;
    let d = &s.degrees;
    let mut out = ln_factorial(d.nodes()) + bc_correction(d.edges, d.falling);
    for (j, &c) in d.counts.iter().enumerate() {
        out += ln_factorial(j as u64 * c) - ln_factorial(c) - c as f64 * ln_factorial(j as u64);
    }
    let mut idx = 0;
    for i in 1..=k {
        for j in i..=k {
            let x = s.jdm[idx];
            out -= ln_factorial(x);
            if i == j {
                out -= x as f64 * std::f64::consts::LN_2;
            }
            idx += 1;
        }
    }
    out
}

/// Estimated `ln|c(J_before)| - ln|c(J_after)|`.
pub fn log_ratio_degmixing(before: &JointDegreeSummary, after: &JointDegreeSummary) -> f64 {
    if before == after {
        return 0.0;
    }
    ln_class_size_degmixing(before) - ln_class_size_degmixing(after)
}

/// Per-property cardinality evaluator bound to a population, reused across
/// toggles.
#[derive(Debug, Clone)]
pub(crate) enum BoundTerm {
    Zero,
    Edges { dyads: u64 },
    Mixing { capacities: Vec<u64> },
    DegreeBc,
    DegreeByGroupBc,
    DegMixing { diagonal: Vec<bool> },
}

impl BoundTerm {
    pub(crate) fn bind(mode: CardinalityMode, spec: &PropertySpec, n: usize, covariate: Option<&[u32]>) -> Self {
        if mode == CardinalityMode::Tilt {
            return BoundTerm::Zero;
        }
        match *spec {
            PropertySpec::Edges | PropertySpec::Density => BoundTerm::Edges {
                dyads: pairs(n as u64),
            },
            PropertySpec::Mixing { groups } => {
                let mut sizes = vec![0u64; groups];
                for &c in covariate.expect("mixing requires covariates") {
                    sizes[c as usize] += 1;
                }
                BoundTerm::Mixing {
                    capacities: block_capacities(&sizes),
                }
            }
            PropertySpec::DegreeDist { .. } => BoundTerm::DegreeBc,
            PropertySpec::DegreeDistByGroup { .. } => BoundTerm::DegreeByGroupBc,
            PropertySpec::DegMixing { max_degree } => {
                let mut diagonal = Vec::new();
                for i in 1..=max_degree {
                    for j in i..=max_degree {
                        diagonal.push(i == j);
                    }
                }
                BoundTerm::DegMixing { diagonal }
            }
            PropertySpec::Triangles => BoundTerm::Zero,
        }
    }

    /// `ln|c(current)| - ln|c(proposed)|` for toggling a dyad with endpoint
    /// degrees `(a, b)` in `g`; `counts` is the property's current count
    /// vector and `delta` its change.
    pub(crate) fn log_ratio(
        &self,
        g: &Graph,
        a: usize,
        b: usize,
        adding: bool,
        counts: &[i64],
        delta: &StatDelta,
    ) -> f64 {
        match self {
            BoundTerm::Zero => 0.0,
            BoundTerm::Edges { dyads } => {
                let m = g.edge_count() as u64;
                let to = if adding { m + 1 } else { m - 1 };
                edge_class_ratio(m, to, *dyads)
            }
            BoundTerm::Mixing { capacities } => {
                let (block, change) = delta.entries()[0];
                let edges = counts[block] as u64;
                let cap = capacities[block];
                if change > 0 {
                    ((edges + 1) as f64 / (cap - edges) as f64).ln()
                } else {
                    ((cap - edges + 1) as f64 / edges as f64).ln()
                }
            }
            BoundTerm::DegreeBc => {
                let hist = g.degree_histogram();
                let mut out =
                    bc_global_ratio(g.edge_count() as u64, g.sum_degree_falling(), a, b, adding);
                for &(bin, change) in BinMoves::new(a, b, adding).as_slice() {
                    out += ln_gamma_shift(hist[bin] as f64 + 1.0, change)
                        + change as f64 * ln_factorial(bin as u64);
                }
                out
            }
            BoundTerm::DegreeByGroupBc => {
                let mut out =
                    bc_global_ratio(g.edge_count() as u64, g.sum_degree_falling(), a, b, adding);
                // prod d_i! over all nodes
                out += if adding {
                    ((a + 1) as f64).ln() + ((b + 1) as f64).ln()
                } else {
                    -(a as f64).ln() - (b as f64).ln()
                };
                // per-group multinomials
                for (idx, change) in delta.compacted() {
                    out += ln_gamma_shift(counts[idx] as f64 + 1.0, change);
                }
                out
            }
            BoundTerm::DegMixing { diagonal } => {
                let hist = g.degree_histogram();
                let edges = g.edge_count() as u64;
                let falling = g.sum_degree_falling();
                let falling_after = falling_after(falling, a, b, adding);
                let edges_after = if adding { edges + 1 } else { edges - 1 };
                let mut out = bc_correction(edges, falling) - bc_correction(edges_after, falling_after);
                for &(bin, change) in BinMoves::new(a, b, adding).as_slice() {
                    let c = hist[bin] as f64;
                    let j = bin as f64;
                    out += ln_gamma_shift(c + 1.0, change) + change as f64 * ln_factorial(bin as u64);
                    // + ln (j n_j)! before minus after
                    out -= ln_gamma_shift(j * c + 1.0, (bin as i64) * change);
                }
                for (idx, change) in delta.compacted() {
                    out += ln_gamma_shift(counts[idx] as f64 + 1.0, change);
                    if diagonal[idx] {
                        out += change as f64 * std::f64::consts::LN_2;
                    }
                }
                out
            }
        }
    }
}
