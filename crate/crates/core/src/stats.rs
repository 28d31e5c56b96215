//! Network properties: full evaluation and per-toggle change statistics.
//!
//! Every property lives on an integer lattice ("counts"). The public
//! [`StatVector`] reports the same coordinates as reals; the only property
//! whose reported value differs from its count is `density`, reported as
//! `m / C(n, 2)` while its count is the edge count `m`.
//!
//! Degree-indexed properties truncate at a maximum degree `K`: a graph with a
//! node of degree above `K` is outside the property's support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dyad, Graph};

/// One network property defining congruence classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PropertySpec {
    Edges,
    Density,
    /// Counts of nodes with degree `0..=max_degree`.
    #[serde(rename = "degreedist")]
    DegreeDist { max_degree: usize },
    /// Joint degree matrix: edges between degree classes `1..=max_degree`.
    #[serde(rename = "degmixing")]
    DegMixing { max_degree: usize },
    Triangles,
    /// Attribute mixing matrix over covariate groups `0..groups`.
    Mixing { groups: usize },
    /// Degree distribution within each covariate group.
    #[serde(rename = "degreedist_by_group")]
    DegreeDistByGroup { max_degree: usize, groups: usize },
}

/// Named statistic values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl StatVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn concat(parts: impl IntoIterator<Item = StatVector>) -> StatVector {
        let mut out = StatVector {
            names: Vec::new(),
            values: Vec::new(),
        };
        for p in parts {
            out.names.extend(p.names);
            out.values.extend(p.values);
        }
        out
    }
}

/// Sparse change of a property's count vector for one toggle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatDelta {
    entries: Vec<(usize, i64)>,
}

impl StatDelta {
    pub fn clear(&mut self) {
        self.entries.clear();
    }

    #[inline]
    fn push(&mut self, index: usize, change: i64) {
        self.entries.push((index, change));
    }

    /// Raw entries; an index may repeat.
    pub fn entries(&self) -> &[(usize, i64)] {
        &self.entries
    }

    pub fn to_dense(&self, dim: usize) -> Vec<i64> {
        let mut out = vec![0; dim];
        self.apply(&mut out);
        out
    }

    pub fn apply(&self, counts: &mut [i64]) {
        for &(i, c) in &self.entries {
            counts[i] += c;
        }
    }

    pub fn negated(&self) -> StatDelta {
        StatDelta {
            entries: self.entries.iter().map(|&(i, c)| (i, -c)).collect(),
        }
    }

    /// Merged, zero-free entries sorted by index.
    pub fn compacted(&self) -> Vec<(usize, i64)> {
        let mut e = self.entries.clone();
        e.sort_unstable_by_key(|x| x.0);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(e.len());
        for (i, c) in e {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|x| x.1 != 0);
        out
    }
}

/// Index of `(i, j)`, `i <= j`, in a row-major upper triangle with `k`
/// rows whose first row and column are `base`.
#[inline]
fn tri_index(i: usize, j: usize, k: usize, base: usize) -> usize {
    debug_assert!(i <= j);
    let (r, c) = (i - base, j - base);
    r * k - r * r.saturating_sub(1) / 2 - r + c
}

#[inline]
fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PropertySpec {
    /// Stable short name used in configs and manifests.
    pub fn kind_name(&self) -> &'static str {
        match self {
            PropertySpec::Edges => "edges",
            PropertySpec::Density => "density",
            PropertySpec::DegreeDist { .. } => "degreedist",
            PropertySpec::DegMixing { .. } => "degmixing",
            PropertySpec::Triangles => "triangles",
            PropertySpec::Mixing { .. } => "mixing",
            PropertySpec::DegreeDistByGroup { .. } => "degreedist_by_group",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("{}: {msg}", self.kind_name())));
        match *self {
            PropertySpec::DegreeDist { max_degree } | PropertySpec::DegMixing { max_degree }
                if max_degree < 1 =>
            {
                bad("max_degree must be at least 1")
            }
            PropertySpec::Mixing { groups } if groups < 1 => bad("groups must be at least 1"),
            PropertySpec::DegreeDistByGroup { max_degree, groups } if max_degree < 1 || groups < 1 => {
                bad("max_degree and groups must be at least 1")
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            PropertySpec::Edges | PropertySpec::Density | PropertySpec::Triangles => 1,
            PropertySpec::DegreeDist { max_degree } => max_degree + 1,
            PropertySpec::DegMixing { max_degree } => max_degree * (max_degree + 1) / 2,
            PropertySpec::Mixing { groups } => groups * (groups + 1) / 2,
            PropertySpec::DegreeDistByGroup { max_degree, groups } => groups * (max_degree + 1),
        }
    }

    pub fn names(&self) -> Vec<String> {
        match *self {
            PropertySpec::Edges => vec!["edges".into()],
            PropertySpec::Density => vec!["density".into()],
            PropertySpec::Triangles => vec!["triangles".into()],
            PropertySpec::DegreeDist { max_degree } => {
                (0..=max_degree).map(|j| format!("deg{j}")).collect()
            }
            PropertySpec::DegMixing { max_degree } => {
                // Two-digit degrees would make "DM<i><j>" ambiguous.
                let sep = if max_degree >= 10 { "." } else { "" };
                let mut out = Vec::with_capacity(self.dim());
                for i in 1..=max_degree {
                    for j in i..=max_degree {
                        out.push(format!("DM{i}{sep}{j}"));
                    }
                }
                out
            }
            PropertySpec::Mixing { groups } => {
                let mut out = Vec::with_capacity(self.dim());
                for i in 0..groups {
                    for j in i..groups {
                        out.push(format!("MIX{i}.{j}"));
                    }
                }
                out
            }
            PropertySpec::DegreeDistByGroup { max_degree, groups } => (0..groups)
                .flat_map(|g| (0..=max_degree).map(move |j| format!("G{g}deg{j}")))
                .collect(),
        }
    }

    pub fn needs_covariates(&self) -> bool {
        matches!(
            self,
            PropertySpec::Mixing { .. } | PropertySpec::DegreeDistByGroup { .. }
        )
    }

    /// Largest degree inside the support, when the property caps degrees.
    pub fn degree_cap(&self) -> Option<usize> {
        match *self {
            PropertySpec::DegreeDist { max_degree }
            | PropertySpec::DegMixing { max_degree }
            | PropertySpec::DegreeDistByGroup { max_degree, .. } => Some(max_degree),
            _ => None,
        }
    }

    pub fn groups(&self) -> Option<usize> {
        match *self {
            PropertySpec::Mixing { groups } | PropertySpec::DegreeDistByGroup { groups, .. } => {
                Some(groups)
            }
            _ => None,
        }
    }

    /// Divisor turning counts into reported values.
    pub fn divisor(&self, n: usize) -> f64 {
        match self {
            PropertySpec::Density => crate::math::pairs(n as u64).max(1) as f64,
            _ => 1.0,
        }
    }

    fn covariate<'g>(&self, g: &'g Graph) -> Result<&'g [u32]> {
        let cov = g.covariate().ok_or_else(|| {
            Error::InvalidParameter(format!("{} requires node covariates", self.kind_name()))
        })?;
        let groups = self.groups().unwrap_or(0);
        if let Some(pos) = cov.iter().position(|&c| c as usize >= groups) {
            return Err(Error::InvalidParameter(format!(
                "node {pos} has group label {} but {} declares {groups} groups",
                cov[pos],
                self.kind_name()
            )));
        }
        Ok(cov)
    }

    fn check_degrees(&self, g: &Graph) -> Result<()> {
        if let Some(k) = self.degree_cap() {
            if g.max_degree() > k {
                let node = (0..g.node_count()).find(|&u| g.degree(u) > k).unwrap();
                return Err(Error::Support(format!(
                    "node {node} has degree {} above the {} cap {k}",
                    g.degree(node),
                    self.kind_name()
                )));
            }
        }
        Ok(())
    }

    /// Count vector of `g`.
    pub fn evaluate_counts(&self, g: &Graph) -> Result<Vec<i64>> {
        self.check_degrees(g)?;
        let mut out = vec![0i64; self.dim()];
        match *self {
            PropertySpec::Edges | PropertySpec::Density => out[0] = g.edge_count() as i64,
            PropertySpec::Triangles => out[0] = count_triangles(g) as i64,
            PropertySpec::DegreeDist { max_degree } => {
                for (j, &c) in g.degree_histogram().iter().take(max_degree + 1).enumerate() {
                    out[j] = c as i64;
                }
            }
            PropertySpec::DegMixing { max_degree } => {
                for d in g.edge_pool() {
                    let (a, b) = ordered(g.degree(d.u as usize), g.degree(d.v as usize));
                    out[tri_index(a, b, max_degree, 1)] += 1;
                }
            }
            PropertySpec::Mixing { groups } => {
                let cov = self.covariate(g)?;
                for d in g.edge_pool() {
                    let (a, b) = ordered(cov[d.u as usize] as usize, cov[d.v as usize] as usize);
                    out[tri_index(a, b, groups, 0)] += 1;
                }
            }
            PropertySpec::DegreeDistByGroup { max_degree, .. } => {
                let cov = self.covariate(g)?;
                for (u, &c) in cov.iter().enumerate() {
                    out[c as usize * (max_degree + 1) + g.degree(u)] += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, g: &Graph) -> Result<StatVector> {
        let div = self.divisor(g.node_count());
        let values = self
            .evaluate_counts(g)?
            .into_iter()
            .map(|c| c as f64 / div)
            .collect();
        Ok(StatVector {
            names: self.names(),
            values,
        })
    }

    /// Change of the count vector when `d` is toggled in `g`, written into
    /// `delta` (cleared first). Fails with [`Error::Support`] when the toggle
    /// would push a degree above the cap. Assumes `g` satisfies the
    /// property's preconditions (covariates present and labels in range).
    pub fn change_into(&self, g: &Graph, d: Dyad, delta: &mut StatDelta) -> Result<()> {
        delta.clear();
        let adding = !g.has_edge(d);
        let sign = if adding { 1 } else { -1 };
        let (u, v) = d.endpoints();
        let (a, b) = (g.degree(u), g.degree(v));
        if adding {
            if let Some(k) = self.degree_cap() {
                if a + 1 > k || b + 1 > k {
                    let node = if a + 1 > k { u } else { v };
                    return Err(Error::Support(format!(
                        "toggle ({u}, {v}) raises node {node} above degree cap {k}"
                    )));
                }
            }
        }
        match *self {
            PropertySpec::Edges | PropertySpec::Density => delta.push(0, sign),
            PropertySpec::Triangles => {
                delta.push(0, sign * g.common_neighbors(u, v) as i64);
            }
            PropertySpec::DegreeDist { .. } => {
                let shift = |x: usize| if adding { x + 1 } else { x - 1 };
                delta.push(a, -1);
                delta.push(shift(a), 1);
                delta.push(b, -1);
                delta.push(shift(b), 1);
            }
            PropertySpec::DegreeDistByGroup { max_degree, .. } => {
                let cov = g.covariate().expect("covariates checked at construction");
                let shift = |x: usize| if adding { x + 1 } else { x - 1 };
                let (ou, ov) = (
                    cov[u] as usize * (max_degree + 1),
                    cov[v] as usize * (max_degree + 1),
                );
                delta.push(ou + a, -1);
                delta.push(ou + shift(a), 1);
                delta.push(ov + b, -1);
                delta.push(ov + shift(b), 1);
            }
            PropertySpec::Mixing { groups } => {
                let cov = g.covariate().expect("covariates checked at construction");
                let (x, y) = ordered(cov[u] as usize, cov[v] as usize);
                delta.push(tri_index(x, y, groups, 0), sign);
            }
            PropertySpec::DegMixing { max_degree: k } => {
                let idx = |p: usize, q: usize| {
                    let (p, q) = ordered(p, q);
                    tri_index(p, q, k, 1)
                };
                // every other edge at u and v is reclassified by the endpoint's
                // new degree; the toggled edge itself is added or removed
                for (node, other, deg) in [(u, v, a), (v, u, b)] {
                    let new_deg = if adding { deg + 1 } else { deg - 1 };
                    for &w in g.neighbors(node) {
                        let w = w as usize;
                        if w == other {
                            continue;
                        }
                        let dw = g.degree(w);
                        delta.push(idx(deg, dw), -1);
                        delta.push(idx(new_deg, dw), 1);
                    }
                }
                if adding {
                    delta.push(idx(a + 1, b + 1), 1);
                } else {
                    delta.push(idx(a, b), -1);
                }
            }
        }
        Ok(())
    }

    pub fn change_stat(&self, g: &Graph, d: Dyad) -> Result<StatDelta> {
        let mut delta = StatDelta::default();
        self.change_into(g, d, &mut delta)?;
        Ok(delta)
    }

    /// Checks that `g` carries what this property needs.
    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.needs_covariates() {
            self.covariate(g)?;
        }
        Ok(())
    }
}

/// Concatenated stat vector of several properties in declaration order.
pub fn evaluate_all(specs: &[PropertySpec], g: &Graph) -> Result<StatVector> {
    let parts = specs
        .iter()
        .map(|s| s.evaluate(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(StatVector::concat(parts))
}

pub fn names_all(specs: &[PropertySpec]) -> Vec<String> {
    specs.iter().flat_map(|s| s.names()).collect()
}

fn count_triangles(g: &Graph) -> u64 {
    let mut t = 0;
    for u in 0..g.node_count() {
        let nu = g.neighbors(u);
        for (i, &v) in nu.iter().enumerate() {
            if (v as usize) < u {
                continue;
            }
            for &w in &nu[i + 1..] {
                if g.has_edge(Dyad::new(v as usize, w as usize)) {
                    t += 1;
                }
            }
        }
    }
    t
}
