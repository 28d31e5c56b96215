//! Mutable simple undirected graph used as the sampler state.
//!
//! Besides sorted adjacency lists the graph keeps an indexed pool of its edges
//! (and, for graphs of moderate size, of its non-edges) so that the tie-no-tie
//! proposal can draw a uniform edge or non-edge in constant time.

mod io;

pub use io::GraphFormat;

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{Error, Result};

/// Dense dyad slots are kept up to this many dyads (n ~ 4096).
const DENSE_DYAD_LIMIT: u64 = 1 << 23;
const EDGE_TAG: u32 = 1 << 31;
/// Below this density non-edges are drawn by rejection.
const REJECTION_DENSITY: f64 = 0.9;

/// An unordered node pair stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyad {
    pub u: u32,
    pub v: u32,
}

impl Dyad {
    /// Orders the endpoints. Panics on a self-loop; use [`Dyad::checked`] for
    /// untrusted input.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "dyad endpoints must differ");
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Dyad {
            u: u as u32,
            v: v as u32,
        }
    }

    pub fn checked(a: usize, b: usize, n: usize) -> Result<Self> {
        for node in [a, b] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        Ok(Dyad::new(a, b))
    }

    #[inline]
    pub fn endpoints(self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }
}

#[derive(Debug, Clone)]
enum DyadSlots {
    /// One slot per dyad: `EDGE_TAG | pos` for an edge at `edges[pos]`,
    /// plain `pos` for a non-edge at `non_edges[pos]`.
    Dense { slots: Vec<u32>, non_edges: Vec<Dyad> },
    /// Edge positions only; non-edges are always drawn by rejection.
    Sparse { index: HashMap<u64, u32> },
}

/// Simple undirected labelled graph on nodes `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    degree_hist: Vec<u32>,
    sum_sq_degrees: u64,
    edges: Vec<Dyad>,
    slots: DyadSlots,
    covariate: Option<Vec<u32>>,
}

impl Graph {
    /// Empty graph on `n >= 1` nodes.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("node count must be at least 1".into()));
        }
        if n > u32::MAX as usize / 2 {
            return Err(Error::InvalidParameter(format!("node count {n} too large")));
        }
        let dyads = crate::math::pairs(n as u64);
        let slots = if dyads <= DENSE_DYAD_LIMIT {
            let mut non_edges = Vec::with_capacity(dyads as usize);
            for u in 0..n {
                for v in u + 1..n {
                    non_edges.push(Dyad::new(u, v));
                }
            }
            DyadSlots::Dense {
                slots: (0..dyads as u32).collect(),
                non_edges,
            }
        } else {
            DyadSlots::Sparse {
                index: HashMap::new(),
            }
        };
        let mut degree_hist = vec![0; n];
        degree_hist[0] = n as u32;
        Ok(Graph {
            n,
            adj: vec![Vec::new(); n],
            degrees: vec![0; n],
            degree_hist,
            sum_sq_degrees: 0,
            edges: Vec::new(),
            slots,
            covariate: None,
        })
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for (a, b) in edges {
            let d = Dyad::checked(a, b, n)?;
            if g.has_edge(d) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({}, {})",
                    d.u, d.v
                )));
            }
            g.toggle(d);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, pairs)
    }

    /// Attaches categorical group labels, one per node.
    pub fn with_covariate(mut self, labels: Vec<u32>) -> Result<Self> {
        self.set_covariate(Some(labels))?;
        Ok(self)
    }

    pub fn set_covariate(&mut self, labels: Option<Vec<u32>>) -> Result<()> {
        if let Some(l) = &labels {
            if l.len() != self.n {
                return Err(Error::InvalidParameter(format!(
                    "covariate has {} labels for {} nodes",
                    l.len(),
                    self.n
                )));
            }
        }
        self.covariate = labels;
        Ok(())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `C(n, 2)`.
    #[inline]
    pub fn dyad_count(&self) -> u64 {
        crate::math::pairs(self.n as u64)
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn density(&self) -> f64 {
        match self.dyad_count() {
            0 => 0.0,
            dyads => self.edge_count() as f64 / dyads as f64,
        }
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.degrees[u] as usize
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Number of nodes with each degree `0..n`.
    pub fn degree_histogram(&self) -> &[u32] {
        &self.degree_hist
    }

    /// `sum_i d_i (d_i - 1)`.
    pub fn sum_degree_falling(&self) -> u64 {
        self.sum_sq_degrees - 2 * self.edge_count() as u64
    }

    pub fn max_degree(&self) -> usize {
        self.degree_hist.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// Sorted neighbours of `u`.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[u]
    }

    pub fn covariate(&self) -> Option<&[u32]> {
        self.covariate.as_deref()
    }

    /// Edges in insertion-pool order (not sorted).
    pub fn edge_pool(&self) -> &[Dyad] {
        &self.edges
    }

    /// Edges sorted ascending by `(u, v)`.
    pub fn sorted_edges(&self) -> Vec<Dyad> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    #[inline]
    fn dyad_index(&self, d: Dyad) -> u64 {
        let (u, v, n) = (d.u as u64, d.v as u64, self.n as u64);
        u * (2 * n - u - 1) / 2 + (v - u - 1)
    }

    #[inline]
    pub fn has_edge(&self, d: Dyad) -> bool {
        match &self.slots {
            DyadSlots::Dense { slots, .. } => slots[self.dyad_index(d) as usize] & EDGE_TAG != 0,
            DyadSlots::Sparse { index } => index.contains_key(&self.dyad_index(d)),
        }
    }

    /// Checked edge query on raw node indices.
    pub fn contains(&self, a: usize, b: usize) -> Result<bool> {
        Ok(self.has_edge(Dyad::checked(a, b, self.n)?))
    }

    /// Flips the dyad and returns whether the edge was present beforehand.
    pub fn toggle(&mut self, d: Dyad) -> bool {
        let idx = self.dyad_index(d);
        let present = self.has_edge(d);
        let (u, v) = d.endpoints();
        if present {
            let pos = match &mut self.slots {
                DyadSlots::Dense { slots, .. } => (slots[idx as usize] & !EDGE_TAG) as usize,
                DyadSlots::Sparse { index } => index.remove(&idx).expect("indexed edge") as usize,
            };
            self.edges.swap_remove(pos);
            if pos < self.edges.len() {
                let moved = self.edges[pos];
                let moved_idx = self.dyad_index(moved);
                self.set_edge_slot(moved_idx, pos as u32);
            }
            if let DyadSlots::Dense { slots, non_edges } = &mut self.slots {
                slots[idx as usize] = non_edges.len() as u32;
                non_edges.push(d);
            }
            remove_sorted(&mut self.adj[u], v as u32);
            remove_sorted(&mut self.adj[v], u as u32);
            self.shift_degree(u, false);
            self.shift_degree(v, false);
        } else {
            if let DyadSlots::Dense { slots, non_edges } = &mut self.slots {
                let pos = slots[idx as usize] as usize;
                non_edges.swap_remove(pos);
                if pos < non_edges.len() {
                    let moved = non_edges[pos];
                    let (mu, mv, n) = (moved.u as u64, moved.v as u64, self.n as u64);
                    let moved_idx = mu * (2 * n - mu - 1) / 2 + (mv - mu - 1);
                    slots[moved_idx as usize] = pos as u32;
                }
            }
            let pos = self.edges.len() as u32;
            self.edges.push(d);
            self.set_edge_slot(idx, pos);
            insert_sorted(&mut self.adj[u], v as u32);
            insert_sorted(&mut self.adj[v], u as u32);
            self.shift_degree(u, true);
            self.shift_degree(v, true);
        }
        present
    }

    fn set_edge_slot(&mut self, idx: u64, pos: u32) {
        match &mut self.slots {
            DyadSlots::Dense { slots, .. } => slots[idx as usize] = EDGE_TAG | pos,
            DyadSlots::Sparse { index } => {
                index.insert(idx, pos);
            }
        }
    }

    #[inline]
    fn shift_degree(&mut self, u: usize, up: bool) {
        let d = self.degrees[u] as u64;
        self.degree_hist[d as usize] -= 1;
        let nd = if up { d + 1 } else { d - 1 };
        self.degree_hist[nd as usize] += 1;
        self.degrees[u] = nd as u32;
        self.sum_sq_degrees = self.sum_sq_degrees + nd * nd - d * d;
    }

    /// Checked toggle on raw node indices.
    pub fn toggle_nodes(&mut self, a: usize, b: usize) -> Result<bool> {
        let d = Dyad::checked(a, b, self.n)?;
        Ok(self.toggle(d))
    }

    /// Uniformly random existing edge.
    pub fn uniform_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Dyad> {
        if self.edges.is_empty() {
            return Err(Error::Precondition("uniform_edge on a graph with no edges".into()));
        }
        Ok(self.edges[rng.random_range(0..self.edges.len())])
    }

    /// Uniformly random absent dyad.
    pub fn uniform_nonedge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Dyad> {
        let dyads = self.dyad_count();
        let m = self.edge_count() as u64;
        if m >= dyads {
            return Err(Error::Precondition(
                "uniform_nonedge on a complete graph".into(),
            ));
        }
        if let DyadSlots::Dense { non_edges, .. } = &self.slots {
            if (m as f64) >= REJECTION_DENSITY * dyads as f64 {
                return Ok(non_edges[rng.random_range(0..non_edges.len())]);
            }
        }
        loop {
            let a = rng.random_range(0..self.n);
            let mut b = rng.random_range(0..self.n - 1);
            if b >= a {
                b += 1;
            }
            let d = Dyad::new(a, b);
            if !self.has_edge(d) {
                return Ok(d);
            }
        }
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        let (small, other) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[small]
            .iter()
            .filter(|&&w| w as usize != other && self.has_edge(Dyad::new(w as usize, other)))
            .count()
    }

    /// Order-independent hash of the edge set, node count and covariates.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.n.hash(&mut h);
        self.sorted_edges().hash(&mut h);
        self.covariate.hash(&mut h);
        h.finish()
    }

    /// Recounts every incremental counter from the adjacency lists.
    pub fn check_consistency(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        let mut hist = vec![0u32; self.n];
        let mut sum = 0usize;
        let mut sq = 0u64;
        for u in 0..self.n {
            let nb = &self.adj[u];
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("adjacency of {u} not strictly sorted"));
            }
            for &v in nb {
                if v as usize == u {
                    return fail(format!("self-loop at {u}"));
                }
                if self.adj[v as usize].binary_search(&(u as u32)).is_err() {
                    return fail(format!("asymmetric adjacency {u}-{v}"));
                }
                if !self.has_edge(Dyad::new(u, v as usize)) {
                    return fail(format!("edge {u}-{v} missing from pool"));
                }
            }
            if self.degrees[u] as usize != nb.len() {
                return fail(format!("degree counter of {u} is stale"));
            }
            hist[nb.len()] += 1;
            sum += nb.len();
            sq += (nb.len() * nb.len()) as u64;
        }
        if sum != 2 * self.edges.len() {
            return fail("degree sum differs from 2m".into());
        }
        if hist != self.degree_hist {
            return fail("degree histogram is stale".into());
        }
        if sq != self.sum_sq_degrees {
            return fail("squared-degree sum is stale".into());
        }
        if let DyadSlots::Dense { non_edges, .. } = &self.slots {
            if non_edges.len() as u64 + self.edges.len() as u64 != self.dyad_count() {
                return fail("edge and non-edge pools do not partition the dyads".into());
            }
        }
        Ok(())
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.covariate == other.covariate
            && self.edges.len() == other.edges.len()
            && self.edges.iter().all(|&d| other.has_edge(d))
    }
}

impl Eq for Graph {}

fn insert_sorted(list: &mut Vec<u32>, x: u32) {
    if let Err(pos) = list.binary_search(&x) {
        list.insert(pos, x);
    }
}

fn remove_sorted(list: &mut Vec<u32>, x: u32) {
    if let Ok(pos) = list.binary_search(&x) {
        list.remove(pos);
    }
}
