//! Post-processing of sampler output: six-number summaries, two-sample
//! Kolmogorov-Smirnov comparisons against direct draws, effective sample
//! sizes and plot-ready tables (histogram, kernel density, trace).
//!
//! Quantiles use linear interpolation between order statistics (R's type 7).
//! Histogram bins are shared by both samples and follow the
//! Freedman-Diaconis rule on the pooled sample. Kernel densities use a
//! Gaussian kernel with Silverman's rule-of-thumb bandwidth.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distributions::Overlay;
use crate::error::{Error, Result};
use crate::sampler::CcmSpec;

/// Number of points in kernel-density grids.
pub const DENSITY_GRID: usize = 512;

const MAX_BINS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Type-7 quantile of an ascending sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_copy(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the `n - 1` divisor, computed on data shifted by the
/// first value so that constant input gives exactly zero.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let shift = x[0];
    let m = x.iter().map(|v| v - shift).sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - shift - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

pub fn sd(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

pub fn summarize(x: &[f64]) -> Result<Summary> {
    if x.is_empty() {
        return Err(Error::InvalidParameter("cannot summarise an empty column".into()));
    }
    let s = sorted_copy(x);
    Ok(Summary {
        min: s[0],
        q1: quantile_sorted(&s, 0.25),
        median: quantile_sorted(&s, 0.5),
        mean: mean(x),
        q3: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}

/// Summaries of every column of a row-major matrix.
pub fn summarize_rows(rows: &[Vec<f64>], dim: usize) -> Result<Vec<Summary>> {
    (0..dim).map(|j| summarize(&column(rows, j))).collect()
}

pub fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

/// Text table in the layout of R's `summary()`.
pub fn format_summaries(names: &[String], summaries: &[Summary]) -> String {
    let width = names.iter().map(String::len).max().unwrap_or(0).max(4);
    let mut out = format!(
        "{:width$} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
        "", "Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max."
    );
    for (name, s) in names.iter().zip(summaries) {
        writeln!(
            out,
            "{:width$} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            name,
            fmt_num(s.min),
            fmt_num(s.q1),
            fmt_num(s.median),
            fmt_num(s.mean),
            fmt_num(s.q3),
            fmt_num(s.max)
        )
        .expect("write to String");
    }
    out
}

fn fmt_num(x: f64) -> String {
    if x != 0.0 && x.abs() < 0.01 {
        format!("{x:.3e}")
    } else if x.abs() < 10.0 {
        format!("{x:.4}")
    } else {
        format!("{x:.1}")
    }
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let a = sorted_copy(a);
    let b = sorted_copy(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample KS statistic against an integer-lattice distribution with
/// cumulative distribution function `cdf`.
pub fn ks_discrete(sample: &[f64], cdf: impl Fn(i64) -> f64) -> f64 {
    let s = sorted_copy(sample);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let v = s[i];
        let below = i as f64 / n;
        while i < s.len() && s[i] == v {
            i += 1;
        }
        let k = v.round() as i64;
        d = d.max((below - cdf(k - 1)).abs());
        d = d.max((i as f64 / n - cdf(k)).abs());
    }
    d
}

/// Effective sample size by Geyer's initial monotone sequence estimator.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return n as f64;
    }
    let m = mean(x);
    let centred: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0 = centred.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return n as f64;
    }
    let acf = |lag: usize| -> f64 {
        centred[..n - lag]
            .iter()
            .zip(&centred[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
            / c0
    };
    // sums of adjacent autocorrelation pairs, kept while positive and
    // forced to be non-increasing
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = acf(lag) + acf(lag + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        tau += 2.0 * pair;
        prev = pair;
        lag += 2;
    }
    (n as f64 / tau.max(1.0 / n as f64)).min(n as f64)
}

/// Shared histogram bin edges for the pooled sample.
pub fn freedman_diaconis_edges(pooled: &[f64]) -> Vec<f64> {
    let s = sorted_copy(pooled);
    let (lo, hi) = (s[0], s[s.len() - 1]);
    let integer = s.iter().all(|v| v.fract() == 0.0);
    if lo == hi {
        return vec![lo - 0.5, hi + 0.5];
    }
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    let mut h = 2.0 * iqr / (s.len() as f64).cbrt();
    if h <= 0.0 {
        h = (hi - lo) / (s.len() as f64).log2().ceil().max(1.0);
    }
    if integer {
        h = h.ceil().max(1.0);
    }
    let (start, span) = if integer {
        (lo - 0.5, hi - lo + 1.0)
    } else {
        (lo, hi - lo)
    };
    let bins = ((span / h).ceil() as usize).clamp(1, MAX_BINS);
    let width = if integer && bins < MAX_BINS { h } else { span / bins as f64 };
    let mut edges: Vec<f64> = (0..=bins).map(|i| start + i as f64 * width).collect();
    edges[bins] = edges[bins].max(if integer { hi + 0.5 } else { hi });
    edges
}

/// Density-scaled histogram: `count / (total * width)` per bin. The last
/// bin is closed on the right; values outside the edges are ignored.
pub fn histogram(sample: &[f64], edges: &[f64]) -> Vec<f64> {
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    for &v in sample {
        if v < edges[0] || v > edges[bins] {
            continue;
        }
        let idx = edges.partition_point(|&e| e <= v).saturating_sub(1).min(bins - 1);
        counts[idx] += 1;
    }
    let total = sample.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / (total * (edges[i + 1] - edges[i])))
        .collect()
}

/// Silverman's rule-of-thumb bandwidth `0.9 min(sd, IQR/1.34) n^(-1/5)`.
pub fn silverman_bandwidth(x: &[f64]) -> f64 {
    let s = sorted_copy(x);
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    let sd = sd(x);
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => return 1.0,
    };
    0.9 * spread * (x.len() as f64).powf(-0.2)
}

/// Gaussian kernel density at each point of `grid`.
pub fn kde(sample: &[f64], bandwidth: f64, grid: &[f64]) -> Vec<f64> {
    let norm = 1.0 / (sample.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    grid.iter()
        .map(|&x| {
            norm * sample
                .iter()
                .map(|&v| {
                    let z = (x - v) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect()
}

/// Per-statistic comparison of chain output with direct draws.
#[derive(Debug, Clone, Serialize)]
pub struct StatComparison {
    pub name: String,
    pub mcmc: Summary,
    pub theoretical: Summary,
    pub ks: f64,
    pub mcmc_ess: f64,
    /// Mean and central 95% interval of the theoretical law.
    pub overlay: Overlay,
    /// "exact" when read off a normal law, "empirical" when estimated from
    /// the direct draws.
    pub overlay_source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub statistics: Vec<StatComparison>,
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.statistics {
            let names = [format!("{} (mcmc)", s.name), format!("{} (theoretical)", s.name)];
            out.push_str(&format_summaries(&names, &[s.mcmc, s.theoretical]));
            writeln!(
                out,
                "KS = {:.4}, mcmc ESS = {:.1}, overlay mean {:.4} [{:.4}, {:.4}] ({})\n",
                s.ks, s.mcmc_ess, s.overlay.mean, s.overlay.lower, s.overlay.upper, s.overlay_source
            )
            .expect("write to String");
        }
        out
    }
}

/// Compares chain rows with theoretical rows column by column. `overlays`
/// may supply exact overlay values per column.
pub fn compare(
    mcmc_names: &[String],
    mcmc: &[Vec<f64>],
    theo_names: &[String],
    theo: &[Vec<f64>],
    overlays: &[Option<Overlay>],
) -> Result<ComparisonReport> {
    if mcmc_names != theo_names {
        return Err(Error::InvalidParameter(format!(
            "statistic names differ: sample has [{}], theoretical has [{}]",
            mcmc_names.join(", "),
            theo_names.join(", ")
        )));
    }
    if mcmc.is_empty() || theo.is_empty() {
        return Err(Error::InvalidParameter("comparison needs non-empty samples".into()));
    }
    let mut statistics = Vec::with_capacity(mcmc_names.len());
    for (j, name) in mcmc_names.iter().enumerate() {
        let a = column(mcmc, j);
        let b = column(theo, j);
        let theo_sorted = sorted_copy(&b);
        let (overlay, overlay_source) = match overlays.get(j).copied().flatten() {
            Some(o) => (o, "exact"),
            None => (
                Overlay {
                    mean: mean(&b),
                    lower: quantile_sorted(&theo_sorted, 0.025),
                    upper: quantile_sorted(&theo_sorted, 0.975),
                },
                "empirical",
            ),
        };
        statistics.push(StatComparison {
            name: name.clone(),
            mcmc: summarize(&a)?,
            theoretical: summarize(&b)?,
            ks: ks_statistic(&a, &b),
            mcmc_ess: effective_sample_size(&a),
            overlay,
            overlay_source,
        });
    }
    Ok(ComparisonReport { statistics })
}

/// Direct draws of the whole statistic vector of `spec`, one row per draw.
pub fn theoretical_draws(spec: &CcmSpec, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![Vec::with_capacity(spec.dim()); count];
    for (p, d) in spec.properties.iter().zip(&spec.distributions) {
        for (row, draw) in rows.iter_mut().zip(d.sample_theoretical(p.dim(), count, &mut rng)) {
            row.extend(draw);
        }
    }
    Ok(rows)
}

/// Exact overlays per statistic column where the marginal law is normal.
pub fn exact_overlays(spec: &CcmSpec) -> Vec<Option<Overlay>> {
    let mut out = Vec::with_capacity(spec.dim());
    for (p, d) in spec.properties.iter().zip(&spec.distributions) {
        for j in 0..p.dim() {
            out.push(d.normal_overlay(j));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Hist,
    Density,
    Trace,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hist" => Ok(PlotKind::Hist),
            "density" => Ok(PlotKind::Density),
            "trace" => Ok(PlotKind::Trace),
            other => Err(Error::InvalidParameter(format!(
                "unknown plot kind `{other}` (expected hist, density or trace)"
            ))),
        }
    }
}

/// CSV plot data for every statistic.
///
/// * hist: `statistic,bin_left,bin_right,mcmc_density,theo_density`
/// * density: `statistic,x,mcmc_density,theo_density,bandwidth_mcmc,bandwidth_theo`
/// * trace: `statistic,index,value,overlay_mean,overlay_lower,overlay_upper`
///
/// Theoretical columns are empty when no theoretical sample is given.
pub fn plot_data(
    kind: PlotKind,
    names: &[String],
    mcmc: &[Vec<f64>],
    theo: Option<&[Vec<f64>]>,
    report: Option<&ComparisonReport>,
) -> Result<String> {
    if mcmc.is_empty() {
        return Err(Error::InvalidParameter("no rows to plot".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: &[&str] = match kind {
        PlotKind::Hist => &["statistic", "bin_left", "bin_right", "mcmc_density", "theo_density"],
        PlotKind::Density => &[
            "statistic",
            "x",
            "mcmc_density",
            "theo_density",
            "bandwidth_mcmc",
            "bandwidth_theo",
        ],
        PlotKind::Trace => &[
            "statistic",
            "index",
            "value",
            "overlay_mean",
            "overlay_lower",
            "overlay_upper",
        ],
    };
    w.write_record(header).map_err(csv_error)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for (j, name) in names.iter().enumerate() {
        let a = column(mcmc, j);
        let b = theo.map(|t| column(t, j));
        match kind {
            PlotKind::Hist => {
                let mut pooled = a.clone();
                if let Some(b) = &b {
                    pooled.extend_from_slice(b);
                }
                let edges = freedman_diaconis_edges(&pooled);
                let ha = histogram(&a, &edges);
                let hb = b.as_ref().map(|b| histogram(b, &edges));
                for i in 0..ha.len() {
                    w.write_record([
                        name.clone(),
                        edges[i].to_string(),
                        edges[i + 1].to_string(),
                        ha[i].to_string(),
                        opt(hb.as_ref().map(|h| h[i])),
                    ])
                    .map_err(csv_error)?;
                }
            }
            PlotKind::Density => {
                let bw_a = silverman_bandwidth(&a);
                let bw_b = b.as_ref().map(|b| silverman_bandwidth(b));
                let mut lo = a.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * bw_a;
                let mut hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bw_a;
                if let (Some(b), Some(bw)) = (&b, bw_b) {
                    lo = lo.min(b.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * bw);
                    hi = hi.max(b.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bw);
                }
                let grid: Vec<f64> = (0..DENSITY_GRID)
                    .map(|i| lo + (hi - lo) * i as f64 / (DENSITY_GRID - 1) as f64)
                    .collect();
                let da = kde(&a, bw_a, &grid);
                let db = b.as_ref().zip(bw_b).map(|(b, bw)| kde(b, bw, &grid));
                for i in 0..grid.len() {
                    w.write_record([
                        name.clone(),
                        grid[i].to_string(),
                        da[i].to_string(),
                        opt(db.as_ref().map(|d| d[i])),
                        bw_a.to_string(),
                        opt(bw_b),
                    ])
                    .map_err(csv_error)?;
                }
            }
            PlotKind::Trace => {
                let overlay = report.and_then(|r| r.statistics.get(j)).map(|s| s.overlay);
                for (i, v) in a.iter().enumerate() {
                    w.write_record([
                        name.clone(),
                        (i + 1).to_string(),
                        v.to_string(),
                        opt(overlay.map(|o| o.mean)),
                        opt(overlay.map(|o| o.lower)),
                        opt(overlay.map(|o| o.upper)),
                    ])
                    .map_err(csv_error)?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Runtime(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Runtime(format!("CSV write failed: {e}"))
}
