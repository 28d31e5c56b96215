//! Exhaustive enumeration of all graphs on a small node set, giving exact
//! congruence-class sizes. Used as ground truth for the estimators and as the
//! cardinality source of the oracle sampler mode.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{Dyad, Graph};
use crate::math::pairs;
use crate::stats::{names_all, PropertySpec};

/// Default node cap: `2^C(7,2) = 2^21` graphs.
pub const MAX_ENUMERATION_NODES: usize = 7;

/// Exact map from a joint statistic (concatenated counts) to its class size.
#[derive(Debug, Clone)]
pub struct EnumerationTable {
    n: usize,
    properties: Vec<PropertySpec>,
    covariate: Option<Vec<u32>>,
    entries: BTreeMap<Vec<i64>, BigUint>,
    /// Graphs outside every class (a degree cap is exceeded).
    unsupported: BigUint,
    log_sizes: HashMap<Vec<i64>, f64>,
}

impl EnumerationTable {
    pub fn enumerate(n: usize, properties: &[PropertySpec], covariate: Option<&[u32]>) -> Result<Self> {
        Self::enumerate_with_cap(n, properties, covariate, MAX_ENUMERATION_NODES)
    }

    pub fn enumerate_with_cap(
        n: usize,
        properties: &[PropertySpec],
        covariate: Option<&[u32]>,
        max_nodes: usize,
    ) -> Result<Self> {
        let dyads = pairs(n as u64);
        if n > max_nodes || dyads >= 63 {
            return Err(Error::TooLarge(format!(
                "n = {n} needs 2^{dyads} = {} graph evaluations; the cap is n <= {max_nodes}",
                BigUint::one() << dyads as usize
            )));
        }
        if properties.is_empty() {
            return Err(Error::InvalidParameter("no properties to enumerate".into()));
        }
        for p in properties {
            p.validate()?;
        }
        let mut probe = Graph::empty(n)?;
        probe.set_covariate(covariate.map(<[u32]>::to_vec))?;
        for p in properties {
            p.check_graph(&probe)?;
        }

        let total = 1u64 << dyads;
        let workers = std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
            .min(16)
            .min(total.div_ceil(1 << 12) as usize)
            .max(1);
        let chunk = total.div_ceil(workers as u64);
        let ranges: Vec<(u64, u64)> = (0..workers as u64)
            .map(|w| (w * chunk, ((w + 1) * chunk).min(total)))
            .filter(|(a, b)| a < b)
            .collect();

        let partials: Vec<Result<PartialCounts>> = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|&(start, end)| {
                    let probe = probe.clone();
                    scope.spawn(move || count_range(probe, properties, start, end))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .collect()
        });

        let mut entries: BTreeMap<Vec<i64>, BigUint> = BTreeMap::new();
        let mut unsupported = BigUint::zero();
        for part in partials {
            let (map, out) = part?;
            unsupported += out;
            for (k, c) in map {
                *entries.entry(k).or_insert_with(BigUint::zero) += c;
            }
        }
        Ok(Self::assemble(n, properties.to_vec(), covariate.map(<[u32]>::to_vec), entries, unsupported))
    }

    fn assemble(
        n: usize,
        properties: Vec<PropertySpec>,
        covariate: Option<Vec<u32>>,
        entries: BTreeMap<Vec<i64>, BigUint>,
        unsupported: BigUint,
    ) -> Self {
        let log_sizes = entries
            .iter()
            .map(|(k, v)| (k.clone(), ln_biguint(v)))
            .collect();
        EnumerationTable {
            n,
            properties,
            covariate,
            entries,
            unsupported,
            log_sizes,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn properties(&self) -> &[PropertySpec] {
        &self.properties
    }

    pub fn covariate(&self) -> Option<&[u32]> {
        self.covariate.as_deref()
    }

    pub fn names(&self) -> Vec<String> {
        names_all(&self.properties)
    }

    pub fn entries(&self) -> &BTreeMap<Vec<i64>, BigUint> {
        &self.entries
    }

    pub fn size(&self, key: &[i64]) -> Option<&BigUint> {
        self.entries.get(key)
    }

    pub fn log_size(&self, key: &[i64]) -> Option<f64> {
        self.log_sizes.get(key).copied()
    }

    pub fn unsupported(&self) -> &BigUint {
        &self.unsupported
    }

    /// Sum of all class sizes plus unsupported graphs; always `2^C(n,2)`.
    pub fn total(&self) -> BigUint {
        self.entries.values().fold(self.unsupported.clone(), |acc, v| acc + v)
    }

    /// Exact `ln|c(from)| - ln|c(to)|`; `-inf` when `to` is not a class.
    pub fn log_ratio(&self, from: &[i64], to: &[i64]) -> f64 {
        match (self.log_sizes.get(from), self.log_sizes.get(to)) {
            (Some(a), Some(b)) => a - b,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Class sizes of a single-coordinate statistic indexed by value, e.g.
    /// the edge-count table `[1, 6, 15, 20, 15, 6, 1]` for `n = 4`.
    pub fn sizes_by_scalar(&self) -> Option<Vec<BigUint>> {
        if self.names().len() != 1 {
            return None;
        }
        let max = self.entries.keys().map(|k| k[0]).max()?;
        let mut out = vec![BigUint::zero(); max as usize + 1];
        for (k, v) in &self.entries {
            out[k[0] as usize] = v.clone();
        }
        Some(out)
    }

    pub fn key_string(key: &[i64]) -> String {
        key.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
    }

    pub fn to_json(&self) -> Value {
        let mut entries = Map::new();
        for (k, v) in &self.entries {
            entries.insert(Self::key_string(k), Value::String(v.to_string()));
        }
        json!({
            "n": self.n,
            "properties": self.properties,
            "covariate": self.covariate,
            "names": self.names(),
            "total": self.total().to_string(),
            "unsupported": self.unsupported.to_string(),
            "entries": entries,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |m: String| Error::parse(0, 0, m);
        let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        let n = v["n"].as_u64().ok_or_else(|| bad("table.n missing".into()))? as usize;
        let properties: Vec<PropertySpec> = serde_json::from_value(v["properties"].clone())
            .map_err(|e| bad(format!("table.properties: {e}")))?;
        let covariate: Option<Vec<u32>> = serde_json::from_value(v["covariate"].clone())
            .map_err(|e| bad(format!("table.covariate: {e}")))?;
        let parse_big = |s: &Value, what: &str| -> Result<BigUint> {
            s.as_str()
                .and_then(|s| s.parse::<BigUint>().ok())
                .ok_or_else(|| bad(format!("table.{what} must be a decimal string")))
        };
        let unsupported = parse_big(&v["unsupported"], "unsupported")?;
        let mut entries = BTreeMap::new();
        let obj = v["entries"]
            .as_object()
            .ok_or_else(|| bad("table.entries must be an object".into()))?;
        for (k, size) in obj {
            let key = k
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("table.entries key `{k}`: {e}")))?;
            entries.insert(key, parse_big(size, &format!("entries[{k}]"))?);
        }
        let table = Self::assemble(n, properties, covariate, entries, unsupported);
        let expected = BigUint::one() << pairs(n as u64) as usize;
        if table.total() != expected {
            return Err(bad(format!(
                "class sizes sum to {} but 2^C({n},2) = {expected}",
                table.total()
            )));
        }
        Ok(table)
    }
}

/// Class counts of one worker's range, plus graphs outside the support.
type PartialCounts = (HashMap<Vec<i64>, u64>, u64);

fn count_range(
    mut g: Graph,
    properties: &[PropertySpec],
    start: u64,
    end: u64,
) -> Result<PartialCounts> {
    let n = g.node_count();
    let dyads: Vec<Dyad> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| Dyad::new(u, v)))
        .collect();
    // Gray-code walk: graph i has edge set gray(i) = i ^ (i >> 1)
    let gray = start ^ (start >> 1);
    for (bit, &d) in dyads.iter().enumerate() {
        if gray >> bit & 1 == 1 {
            g.toggle(d);
        }
    }
    let mut counts: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut unsupported = 0u64;
    let mut key = Vec::new();
    for i in start..end {
        if i > start {
            g.toggle(dyads[i.trailing_zeros() as usize]);
        }
        key.clear();
        let mut inside = true;
        for p in properties {
            match p.evaluate_counts(&g) {
                Ok(c) => key.extend(c),
                Err(Error::Support(_)) => {
                    inside = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if inside {
            *counts.entry(key.clone()).or_insert(0) += 1;
        } else {
            unsupported += 1;
        }
    }
    Ok((counts, unsupported))
}

fn ln_biguint(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() && f > 0.0 => f.ln(),
        _ => {
            let bits = x.bits();
            let shift = bits.saturating_sub(60);
            (x >> shift as usize).to_f64().unwrap_or(f64::NAN).ln()
                + shift as f64 * std::f64::consts::LN_2
        }
    }
}
