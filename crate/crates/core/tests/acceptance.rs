//! Acceptance suite A1-A11.
//!
//! Run with `cargo test -p ccm-core --test acceptance`; pass criterion ids
//! (e.g. `A4 A7`) to run a subset. Each criterion prints one line:
//!
//! ```text
//! A4  PASS  mean 349.93 in [348, 352]; ...  [12.3 s / 60 s]
//! ```
//!
//! The process exits non-zero when any selected criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ccm_core::cardinality::{log_ratio_degreedist, DegreeSummary};
use ccm_core::config::RunConfig;
use ccm_core::diagnostics::{effective_sample_size, ks_discrete, ks_statistic, mean, sd, variance};
use ccm_core::posterior::{beta_posterior, normal_posterior, posterior_to_ccm};
use ccm_core::sampler::{random_gnm, run_with_observer};
use ccm_core::{
    run, CardinalityEstimator, CcmSpec, ClassDistribution, EnumerationTable, Graph, PropertySpec,
    SamplerConfig,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.to_uppercase())
        .collect();
    let criteria = [
        Criterion { id: "A1", title: "exact class probabilities at n = 4", budget: secs(1), check: a1 },
        Criterion { id: "A2", title: "oracle sampler matches the 64-graph target", budget: secs(60), check: a2 },
        Criterion { id: "A3", title: "binomial CCM equals G(4, 1/2)", budget: secs(60), check: a3 },
        Criterion { id: "A4", title: "Poisson(350) edge counts", budget: secs(60), check: a4 },
        Criterion { id: "A5", title: "uniform and bimodal edge counts", budget: secs(600), check: a5 },
        Criterion { id: "A6", title: "Dirichlet-multinomial degree counts", budget: secs(300), check: a6 },
        Criterion { id: "A7", title: "degree mixing plus triangles", budget: secs(900), check: a7 },
        Criterion { id: "A8", title: "school posterior ensemble ordering", budget: secs(300), check: a8 },
        Criterion { id: "A9", title: "beta posterior narrowing", budget: secs(600), check: a9 },
        Criterion { id: "A10", title: "degree-distribution estimator calibration", budget: secs(300), check: a10 },
        Criterion { id: "A11", title: "two-stage ensemble mechanics", budget: secs(60), check: a11 },
    ];
    let mut failed = Vec::new();
    let mut ran = 0;
    for c in &criteria {
        if !filters.is_empty() && !filters.iter().any(|f| f == c.id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = (c.check)();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_budget = elapsed <= c.budget;
        let ok = pass && in_budget;
        let budget_note = if in_budget { "" } else { " (over runtime budget)" };
        println!(
            "{:<4} {}  {}: {}  [{:.1} s / {} s]{}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            budget_note
        );
        if !ok {
            failed.push(c.id);
        }
    }
    if ran == 0 {
        eprintln!("no criterion matches {filters:?}");
        std::process::exit(2);
    }
    println!("acceptance: {} of {ran} passed", ran - failed.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn load(name: &str) -> Result<RunConfig, String> {
    RunConfig::from_path(&config_path(name)).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Dyads of `n` nodes in lexicographic order.
fn dyad_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn graph_of_mask(n: usize, dyads: &[(usize, usize)], mask: u32) -> Graph {
    let edges = dyads
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &d)| d);
    Graph::from_edges(n, edges).expect("valid edges")
}

fn mask_of_graph(g: &Graph) -> usize {
    let n = g.node_count();
    g.sorted_edges().iter().fold(0, |acc, d| {
        let (u, v) = (d.u as usize, d.v as usize);
        acc | 1 << (u * (2 * n - u - 1) / 2 + (v - u - 1))
    })
}

fn oracle(n: usize, properties: &[PropertySpec]) -> Result<CardinalityEstimator, String> {
    let table = EnumerationTable::enumerate(n, properties, None).map_err(err)?;
    Ok(CardinalityEstimator::OracleTable(Arc::new(table)))
}

/// Exact normalised target over all graphs on `n` nodes, by brute force.
fn exact_graph_law(spec: &CcmSpec) -> Result<Vec<f64>, String> {
    let n = spec.population;
    let dyads = dyad_list(n);
    let mut w = Vec::with_capacity(1 << dyads.len());
    for mask in 0..1u32 << dyads.len() {
        let g = graph_of_mask(n, &dyads, mask);
        w.push(spec.log_weight(&g).map_err(err)?.map_or(0.0, f64::exp));
    }
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Geweke z-score between the first 10% and the last 50% of a trace, with
/// variances scaled by the effective sample size of each window.
fn geweke(x: &[f64]) -> f64 {
    let a = &x[..x.len() / 10];
    let b = &x[x.len() / 2..];
    let se2 = |w: &[f64]| variance(w) / effective_sample_size(w).max(1.0);
    let denom = (se2(a) + se2(b)).sqrt();
    if denom == 0.0 {
        return if mean(a) == mean(b) { 0.0 } else { f64::INFINITY };
    }
    (mean(a) - mean(b)) / denom
}

// Printed values of the n = 4 edge-count table: class law and per-graph
// probability for the uniform, binomial and non-traditional models.
const TABLE_SIZES: [u64; 7] = [1, 6, 15, 20, 15, 6, 1];
const TABLE_UNIFORM: ([f64; 7], [f64; 7]) = (
    [0.143; 7],
    [0.1430, 0.0238, 0.0095, 0.0071, 0.0095, 0.0238, 0.1430],
);
const TABLE_BINOMIAL: ([f64; 7], [f64; 7]) = (
    [0.016, 0.094, 0.234, 0.313, 0.234, 0.094, 0.016],
    [0.0156; 7],
);
const TABLE_NONTRADITIONAL: ([f64; 7], [f64; 7]) = (
    [0.050, 0.200, 0.100, 0.350, 0.150, 0.100, 0.050],
    [0.0500, 0.0333, 0.0067, 0.0175, 0.0100, 0.0167, 0.0500],
);
/// Agreement to three decimals; the table prints 1/7 as 0.1430.
const TABLE_TOLERANCE: f64 = 5e-4 + 1e-12;
const NONTRADITIONAL_LAW: [f64; 7] = [0.05, 0.2, 0.1, 0.35, 0.15, 0.1, 0.05];

fn binomial_law() -> Vec<f64> {
    TABLE_SIZES.iter().map(|&s| s as f64 / 64.0).collect()
}

fn edges_spec_n4(dist: ClassDistribution) -> Result<CcmSpec, String> {
    let props = vec![PropertySpec::Edges];
    let card = oracle(4, &props)?;
    CcmSpec::new(4, props, vec![dist], None)
        .and_then(|s| s.with_cardinality(card))
        .map_err(err)
}

fn a1() -> Outcome {
    let table = EnumerationTable::enumerate(4, &[PropertySpec::Edges], None).map_err(err)?;
    let sizes: Vec<u64> = table
        .sizes_by_scalar()
        .ok_or("edge table is not scalar")?
        .iter()
        .map(|s| s.to_string().parse().expect("small size"))
        .collect();
    let mut ok = sizes == TABLE_SIZES;
    let models = [
        ("uniform", ClassDistribution::uniform(6), TABLE_UNIFORM),
        ("binomial", ClassDistribution::non_parametric(binomial_law()).map_err(err)?, TABLE_BINOMIAL),
        (
            "non-traditional",
            ClassDistribution::non_parametric(NONTRADITIONAL_LAW.to_vec()).map_err(err)?,
            TABLE_NONTRADITIONAL,
        ),
    ];
    let dyads = dyad_list(4);
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut bad = Vec::new();
    for (name, dist, (printed_law, printed_graph)) in models {
        let spec = edges_spec_n4(dist)?;
        let law = exact_graph_law(&spec)?;
        let mut class_prob = [0.0; 7];
        let mut graph_prob = [f64::NAN; 7];
        for (mask, p) in law.iter().enumerate() {
            let k = graph_of_mask(4, &dyads, mask as u32).edge_count();
            class_prob[k] += p;
            if graph_prob[k].is_nan() {
                graph_prob[k] = *p;
            } else if (graph_prob[k] - p).abs() > 1e-15 {
                ok = false;
                bad.push(format!("{name}: class {k} is not uniform"));
            }
        }
        for k in 0..7 {
            for (label, got, want) in [("law", class_prob[k], printed_law[k]), ("graph", graph_prob[k], printed_graph[k])] {
                compared += 1;
                let e = (got - want).abs();
                worst = worst.max(e);
                if e > TABLE_TOLERANCE {
                    ok = false;
                    bad.push(format!("{name} {label} k={k}: {got:.5} vs {want}"));
                }
            }
        }
    }
    let mut detail = format!(
        "sizes {sizes:?}; {compared} printed values, max |error| {worst:.2e} (tolerance 5e-4)"
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; mismatches: {}", bad.join(", ")));
    }
    Ok((ok, detail))
}

/// Runs the n = 4 oracle sampler and returns graph frequencies.
fn n4_frequencies(spec: &CcmSpec, seed: u64) -> Result<(Vec<f64>, f64), String> {
    let cfg = SamplerConfig {
        burnin: 10_000,
        interval: 10,
        sample_size: 1_000_000,
        seed,
        ..Default::default()
    };
    let mut counts = vec![0u64; 64];
    let out = run_with_observer(spec, &cfg, |_, g| counts[mask_of_graph(g)] += 1).map_err(err)?;
    let total = cfg.sample_size as f64;
    Ok((counts.iter().map(|&c| c as f64 / total).collect(), out.acceptance.rate()))
}

fn a2() -> Outcome {
    let spec = edges_spec_n4(ClassDistribution::uniform(6))?;
    let exact = exact_graph_law(&spec)?;
    let (freq, rate) = n4_frequencies(&spec, 2002)?;
    let tv = total_variation(&freq, &exact);

    let dyads = dyad_list(4);
    let class_of: Vec<usize> = (0..64u32).map(|m| graph_of_mask(4, &dyads, m).edge_count()).collect();
    let mut class_freq = [0.0; 7];
    let mut class_exact = [0.0; 7];
    for m in 0..64 {
        class_freq[class_of[m]] += freq[m];
        class_exact[class_of[m]] += exact[m];
    }
    let class_tv = total_variation(&class_freq, &class_exact);

    let members: Vec<f64> = (0..64).filter(|&m| class_of[m] == 2).map(|m| freq[m] * 1e6).collect();
    let expected = members.iter().sum::<f64>() / members.len() as f64;
    let chi2: f64 = members.iter().map(|o| (o - expected).powi(2) / expected).sum();
    let df = (members.len() - 1) as f64;
    let p = 1.0 - ChiSquared::new(df).map_err(err)?.cdf(chi2);

    let ok = tv <= 0.02 && class_tv <= 0.01 && p > 1e-3;
    Ok((
        ok,
        format!(
            "TV {tv:.4} (<= 0.02), class TV {class_tv:.4} (<= 0.01), class-2 chi-square {chi2:.2} on {df} df, p = {p:.3} (> 1e-3); acceptance {rate:.3}"
        ),
    ))
}

fn a3() -> Outcome {
    let spec = edges_spec_n4(ClassDistribution::non_parametric(binomial_law()).map_err(err)?)?;
    let (freq, _) = n4_frequencies(&spec, 3003)?;
    let uniform = vec![1.0 / 64.0; 64];
    let tv = total_variation(&freq, &uniform);
    let worst = freq.iter().map(|f| (f - 1.0 / 64.0).abs()).fold(0.0, f64::max);
    Ok((
        tv <= 0.02,
        format!("TV to 1/64 {tv:.4} (<= 0.02); max |freq - 1/64| {worst:.5}"),
    ))
}

fn a4() -> Outcome {
    let cfg = load("poisson350.json")?;
    let s = &cfg.sampler;
    if (s.burnin, s.interval, s.sample_size) != (100_000, 1000, 1000) {
        return Err("poisson350.json no longer has burnin 1e5, interval 1e3, 1000 samples".into());
    }
    let out = run(&cfg.spec, s).map_err(err)?;
    let edges = out.column(0);
    let m = mean(&edges);
    let v = variance(&edges);
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let pois = Poisson::new(350.0).map_err(err)?;
    let direct: Vec<f64> = (0..100_000).map(|_| pois.sample(&mut rng)).collect();
    let ks = ks_statistic(&edges, &direct);
    let ess = effective_sample_size(&edges);
    let ok = (348.0..=352.0).contains(&m) && (297.0..=403.0).contains(&v) && ks <= 0.05;
    Ok((
        ok,
        format!(
            "mean {m:.2} in [348, 352], variance {v:.1} in [297, 403], KS {ks:.4} (<= 0.05); ESS {ess:.0}, acceptance {:.3}",
            out.acceptance.rate()
        ),
    ))
}

fn a5() -> Outcome {
    let mut cfg = load("uniform_edges.json")?;
    cfg.sampler.sample_size = 200_000;
    cfg.sampler.interval = 5000;
    let out = run(&cfg.spec, &cfg.sampler).map_err(err)?;
    let edges = out.column(0);
    let ks_u = ks_discrete(&edges, |k| ((k + 1) as f64 / 1226.0).clamp(0.0, 1.0));
    let mut seen = vec![false; 1226];
    for &e in &edges {
        seen[e as usize] = true;
    }
    let coverage = seen.iter().filter(|&&s| s).count() as f64 / 1226.0;

    let mut cfg = load("bimodal_np.json")?;
    cfg.sampler.sample_size = 50_000;
    cfg.sampler.interval = 1000;
    let out = run(&cfg.spec, &cfg.sampler).map_err(err)?;
    let edges_np = out.column(0);
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let direct: Vec<f64> = cfg.spec.distributions[0]
        .sample_theoretical(1, 100_000, &mut rng)
        .into_iter()
        .map(|r| r[0])
        .collect();
    let ks_np = ks_statistic(&edges_np, &direct);
    let mut hist = vec![0.0; 1226];
    for &e in &edges_np {
        hist[e as usize] += 1.0;
    }
    let smooth: Vec<f64> = (0..1226usize)
        .map(|i| {
            let lo = i.saturating_sub(3);
            let hi = (i + 3).min(1225);
            hist[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let argmax = |lo: usize, hi: usize| (lo..hi).max_by(|&a, &b| smooth[a].total_cmp(&smooth[b])).unwrap();
    let m1 = argmax(20, 75);
    let m2 = argmax(75, 160);
    let valley = (m1..=m2).map(|i| smooth[i]).fold(f64::INFINITY, f64::min);
    let modes_ok = m1.abs_diff(50) <= 5
        && m2.abs_diff(100) <= 5
        && valley < smooth[m1].min(smooth[m2]);

    let ok = ks_u <= 0.03 && coverage >= 0.95 && ks_np <= 0.05 && modes_ok;
    Ok((
        ok,
        format!(
            "uniform: KS {ks_u:.4} (<= 0.03), {:.1}% of values visited (>= 95%); bimodal: KS {ks_np:.4} (<= 0.05), modes at {m1} and {m2} (50 +- 5, 100 +- 5), valley/peak {:.2}",
            100.0 * coverage,
            valley / smooth[m1].min(smooth[m2])
        ),
    ))
}

fn a6() -> Outcome {
    let mut cfg = load("dirmult_degrees.json")?;
    cfg.sampler.sample_size = 10_000;
    cfg.sampler.interval = 1000;
    let out = run(&cfg.spec, &cfg.sampler).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6006);
    let direct = cfg.spec.distributions[0].sample_theoretical(4, 100_000, &mut rng);
    let mut ok = true;
    let mut parts = Vec::new();
    for j in 0..4 {
        let chain = mean(&out.column(j));
        let reference = mean(&direct.iter().map(|r| r[j]).collect::<Vec<_>>());
        let rel = (chain - reference).abs() / reference;
        ok &= rel <= 0.05;
        parts.push(format!("deg{j} {chain:.3} vs {reference:.3} ({:+.1}%)", 100.0 * (chain - reference) / reference));
    }
    Ok((ok, format!("{} (each within 5%); acceptance {:.3}", parts.join(", "), out.acceptance.rate())))
}

fn a7() -> Outcome {
    let n = 6;
    let props = vec![PropertySpec::DegMixing { max_degree: 3 }, PropertySpec::Triangles];
    let dists = vec![
        ClassDistribution::mvn(
            vec![0.5, 1.0, 1.0, 0.5, 1.5, 1.0],
            (0..6)
                .map(|i| (0..6).map(|j| if i == j { 2.0 } else { -0.1 }).collect())
                .collect(),
        )
        .map_err(err)?,
        ClassDistribution::normal(1.0, 2.0).map_err(err)?,
    ];
    let card = oracle(n, &props)?;
    let spec = CcmSpec::new(n, props.clone(), dists, None)
        .and_then(|s| s.with_cardinality(card))
        .map_err(err)?;
    let key_of = |g: &Graph| -> Vec<i64> {
        props
            .iter()
            .flat_map(|p| p.evaluate_counts(g).expect("supported graph"))
            .collect()
    };

    let dyads = dyad_list(n);
    let mut exact: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    let mut z = 0.0;
    for mask in 0..1u32 << dyads.len() {
        let g = graph_of_mask(n, &dyads, mask);
        if let Some(w) = spec.log_weight(&g).map_err(err)? {
            let w = w.exp();
            z += w;
            *exact.entry(key_of(&g)).or_default() += w;
        }
    }
    let cfg = SamplerConfig {
        burnin: 10_000,
        interval: 10,
        sample_size: 1_000_000,
        seed: 7007,
        ..Default::default()
    };
    let mut hits: HashMap<Vec<i64>, u64> = HashMap::new();
    let out = run_with_observer(&spec, &cfg, |_, g| *hits.entry(key_of(g)).or_default() += 1).map_err(err)?;
    let total = cfg.sample_size as f64;
    let mut tv = 0.0;
    for (k, w) in &exact {
        tv += (hits.get(k).copied().unwrap_or(0) as f64 / total - w / z).abs();
    }
    let stray: u64 = hits.iter().filter(|(k, _)| !exact.contains_key(*k)).map(|(_, c)| c).sum();
    tv = 0.5 * (tv + stray as f64 / total);
    let exact_ok = tv <= 0.05;

    let cfg = load("degmixing_triangles.json")?;
    let approx = run(&cfg.spec, &cfg.sampler).map_err(err)?;
    let rate = approx.acceptance.rate();
    let zs: Vec<f64> = (0..cfg.spec.dim()).map(|j| geweke(&approx.column(j))).collect();
    let worst_z = zs.iter().map(|z| z.abs()).fold(0.0, f64::max);
    let approx_ok = (0.05..=0.95).contains(&rate) && worst_z < 4.0;

    Ok((
        exact_ok && approx_ok,
        format!(
            "n = 6 oracle: TV {tv:.4} over {} classes (<= 0.05), acceptance {:.3}; n = 100 approximate: acceptance {rate:.3} in [0.05, 0.95], max |Geweke z| {worst_z:.2} (< 4)",
            exact.len(),
            out.acceptance.rate()
        ),
    ))
}

fn school_densities() -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(config_path("school_observations.json")).map_err(err)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(err)?;
    v["networks"]
        .as_array()
        .ok_or("school observations have no networks")?
        .iter()
        .map(|net| {
            let nodes = net["nodes"].as_u64().ok_or("nodes")?;
            let edges = net["edges"].as_u64().ok_or("edges")?;
            Ok(edges as f64 / (nodes * (nodes - 1) / 2) as f64)
        })
        .collect()
}

fn a8() -> Outcome {
    let post = normal_posterior(&school_densities()?, 0.5, 1.0, None).map_err(err)?;
    let n = 100;
    let r = ccm_core::cli::run_comparators(&post, n, 5000, 200_000, 10_000, 8008).map_err(err)?;
    let ccm_sd = sd(&r.ccm.column(0));
    let bern_sd = sd(&r.bernoulli);
    let gnm_sd = sd(&r.gnm);
    let bern_ref = (r.p * (1.0 - r.p) / 4950.0).sqrt();
    let ccm_rel = (ccm_sd - post.sd()).abs() / post.sd();
    let bern_rel = (bern_sd - bern_ref).abs() / bern_ref;
    let ok = ccm_rel <= 0.10 && bern_rel <= 0.10 && gnm_sd == 0.0 && ccm_sd > bern_sd && bern_sd > gnm_sd;
    Ok((
        ok,
        format!(
            "posterior mean {:.4}, sd {:.4}; CCM sd {ccm_sd:.4} ({:+.1}%, within 10%), bernoulli sd {bern_sd:.5} vs {bern_ref:.5} ({:+.1}%), gnm sd {gnm_sd}; order {}",
            post.mean(),
            post.sd(),
            100.0 * (ccm_sd - post.sd()) / post.sd(),
            100.0 * (bern_sd - bern_ref) / bern_ref,
            if ccm_sd > bern_sd && bern_sd > gnm_sd { "CCM > bernoulli > gnm" } else { "violated" }
        ),
    ))
}

fn a9() -> Outcome {
    let n = 248;
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let population = random_gnm(n, 1197, None, &mut rng).map_err(err)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let population_dyads = (n * (n - 1) / 2) as u64;
    let mut post_sds = Vec::new();
    let mut ens_sds = Vec::new();
    for (i, size) in [25usize, 75, 125, 175, 225].into_iter().enumerate() {
        let mut inside = vec![false; n];
        for &v in &order[..size] {
            inside[v] = true;
        }
        let edges = population
            .sorted_edges()
            .iter()
            .filter(|d| inside[d.u as usize] && inside[d.v as usize])
            .count() as u64;
        let dyads = (size * (size - 1) / 2) as u64;
        let post = beta_posterior(edges, dyads, 1.0, 1.0, Some(population_dyads)).map_err(err)?;
        let spec = posterior_to_ccm(&post, n).map_err(err)?;
        let cfg = SamplerConfig {
            burnin: 100_000,
            interval: 10_000,
            sample_size: 2000,
            seed: 9100 + i as u64,
            ..Default::default()
        };
        let out = run(&spec, &cfg).map_err(err)?;
        post_sds.push(post.sd());
        ens_sds.push(sd(&out.column(0)));
    }
    let decreasing = |x: &[f64]| x.windows(2).all(|w| w[1] < w[0]);
    let ok = decreasing(&post_sds) && decreasing(&ens_sds);
    let fmt = |x: &[f64]| x.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(" > ");
    Ok((
        ok,
        format!("posterior sd {}; ensemble sd {}", fmt(&post_sds), fmt(&ens_sds)),
    ))
}

/// Largest |error| of the degree-distribution estimator over adjacent
/// classes at n = 6, max degree 3. First calibration measured 0.5817 at
/// [3, 0, 3, 0] -> [2, 1, 2, 1]; the bound is frozen just above it.
const A10_FROZEN_BOUND: f64 = 0.59;

fn a10() -> Outcome {
    let n = 6;
    let prop = PropertySpec::DegreeDist { max_degree: 3 };
    let table = EnumerationTable::enumerate(n, std::slice::from_ref(&prop), None).map_err(err)?;
    let dyads = dyad_list(n);
    let mut moves: BTreeMap<(Vec<i64>, usize, usize, bool), Vec<i64>> = BTreeMap::new();
    for mask in 0..1u32 << dyads.len() {
        let mut g = graph_of_mask(n, &dyads, mask);
        if g.max_degree() > 3 {
            continue;
        }
        let from = prop.evaluate_counts(&g).map_err(err)?;
        for &(u, v) in &dyads {
            let (a, b) = (g.degree(u), g.degree(v));
            let adding = !g.toggle_nodes(u, v).map_err(err)?;
            if g.max_degree() <= 3 {
                let to = prop.evaluate_counts(&g).map_err(err)?;
                let key = (from.clone(), a.min(b), a.max(b), adding);
                moves.insert(key, to);
            }
            g.toggle_nodes(u, v).map_err(err)?;
        }
    }
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut pairs = std::collections::BTreeSet::new();
    for ((from, a, b, adding), to) in &moves {
        let before = DegreeSummary::from_counts(from.iter().map(|&c| c as u64).collect()).map_err(err)?;
        let estimate = log_ratio_degreedist(&before, *a, *b, *adding).map_err(err)?;
        let exact = table.log_ratio(from, to);
        let e = (estimate - exact).abs();
        pairs.insert((from.clone(), to.clone()));
        if e > worst {
            worst = e;
            worst_at = format!("{from:?} -> {to:?}");
        }
    }
    Ok((
        worst <= A10_FROZEN_BOUND,
        format!(
            "{} adjacent class pairs ({} degree moves), max |log-ratio error| {worst:.4} at {worst_at} (bound {A10_FROZEN_BOUND})",
            pairs.len(),
            moves.len()
        ),
    ))
}

fn a11() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let out_dir = dir.path().join("out");
    let mut sink = Vec::new();
    let args = [
        "ccm".to_string(),
        "sample".into(),
        "--config".into(),
        config_path("density_two_stage.json").display().to_string(),
        "--out".into(),
        out_dir.display().to_string(),
    ];
    let code = ccm_core::cli::run(args, &mut sink);
    if code != 0 {
        return Err(format!("ccm sample exited with {code}"));
    }
    let (names, rows) = ccm_core::cli::read_stats_csv(&out_dir.join("ensemble_stats.csv")).map_err(err)?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(out_dir.join("ensemble"))
        .map_err(err)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    files.sort();
    let mut equal = 0;
    for (path, row) in files.iter().zip(&rows) {
        let g = Graph::from_edge_list(&std::fs::read_to_string(path).map_err(err)?).map_err(err)?;
        let d = PropertySpec::Density.evaluate(&g).map_err(err)?.values[0];
        if d == row[0] {
            equal += 1;
        }
    }
    let ok = names == ["density"] && files.len() == 10 && rows.len() == 10 && equal == 10;
    Ok((
        ok,
        format!(
            "{} graph files, {} stats rows, {equal} recomputed densities equal their rows exactly",
            files.len(),
            rows.len()
        ),
    ))
}
