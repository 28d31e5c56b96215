//! The `ccm` command-line front end.
//!
//! Exit status: 0 on success, 1 for usage and validation errors, 2 for
//! failures while running.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{EnsembleFormat, RawConfig, RunConfig};
use crate::diagnostics::{self, PlotKind};
use crate::enumeration::EnumerationTable;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::pairs;
use crate::posterior::{self, DensityPosterior};
use crate::sampler::{self, SampleOutput, SamplerConfig};
use crate::stats::PropertySpec;

#[derive(Debug, Parser)]
#[command(name = "ccm", version, about = "Congruence class model network ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the sampler and write statistics, ensemble and manifest.
    Sample(SampleArgs),
    /// Draw directly from the class distributions of a config.
    Theoretical(TheoreticalArgs),
    /// Exhaustively enumerate class sizes for a small population.
    Enumerate(EnumerateArgs),
    /// Summaries, comparisons and plot data for a statistics file.
    Diagnose(DiagnoseArgs),
    /// Conjugate density posterior and a ready-to-run config.
    Posterior(PosteriorArgs),
    /// Posterior CCM ensemble against Bernoulli and G(n, m) comparators.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Run configuration (JSON).
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    pub config: Option<PathBuf>,
    /// Re-run exactly what a previous manifest records.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent chains run in parallel with derived seeds.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Output directory (overrides the config and $CCM_OUTPUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoreticalArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Number of draws (default: the config's sample_size).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// edges, density, triangles, degreedist:K, degmixing:K, mixing:G or
    /// degreedist_by_group:K:G; repeat for a joint table.
    #[arg(long = "property", required = true)]
    pub properties: Vec<String>,
    /// Comma-separated group labels, one per node.
    #[arg(long)]
    pub covariates: Option<String>,
    /// Write the table as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Statistics CSV written by `sample`.
    #[arg(long)]
    pub stats: PathBuf,
    /// Config used to draw the theoretical reference.
    #[arg(long, conflicts_with = "theoretical")]
    pub config: Option<PathBuf>,
    /// Theoretical draws CSV written by `theoretical`.
    #[arg(long)]
    pub theoretical: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    /// Observations JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Observations JSON, as for `posterior`.
    #[arg(long)]
    pub input: PathBuf,
    /// Draws per model.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 100_000)]
    pub burnin: u64,
    #[arg(long, default_value_t = 1000)]
    pub interval: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs, and returns the exit
/// status. Normal output goes to `stdout`, errors to standard error.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn std::io::Write) -> Result<()> {
    match cmd {
        Command::Sample(a) => cmd_sample(a, out),
        Command::Theoretical(a) => cmd_theoretical(a, out),
        Command::Enumerate(a) => cmd_enumerate(a, out),
        Command::Diagnose(a) => cmd_diagnose(a, out),
        Command::Posterior(a) => cmd_posterior(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Io(format!("cannot write output: {e}")))
}

/// Statistics matrix as CSV with a named header.
pub fn stats_csv(names: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(names).map_err(|e| Error::Runtime(e.to_string()))?;
    for r in rows {
        w.write_record(r.iter().map(f64::to_string))
            .map_err(|e| Error::Runtime(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Runtime(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Reads a statistics CSV back into names and rows.
pub fn read_stats_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = read_text(path)?;
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let names: Vec<String> = r
        .headers()
        .map_err(|e| Error::parse(1, 1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, 1, e.to_string()))?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, f)| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(line, j + 1, format!("bad number `{f}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter(format!("{} has no rows", path.display())));
    }
    Ok((names, rows))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn write_ensemble(dir: &Path, label: &str, graphs: &[Graph], format: EnsembleFormat) -> Result<Vec<String>> {
    match format {
        EnsembleFormat::EdgelistDir => {
            let sub = dir.join(label);
            create_dir(&sub)?;
            let width = graphs.len().to_string().len().max(4);
            let mut files = Vec::with_capacity(graphs.len());
            for (i, g) in graphs.iter().enumerate() {
                let name = format!("graph_{:0width$}.edges", i + 1);
                write_file(&sub.join(&name), g.to_edge_list())?;
                files.push(format!("{label}/{name}"));
            }
            Ok(files)
        }
        EnsembleFormat::Jsonl => {
            let mut text = String::new();
            for g in graphs {
                text.push_str(&g.to_json());
                text.push('\n');
            }
            let name = format!("{label}.jsonl");
            write_file(&dir.join(&name), text)?;
            Ok(vec![name])
        }
    }
}

/// The fields of `manifest.json` needed to repeat a run; the rest is
/// informational.
#[derive(Debug, Deserialize)]
struct Manifest {
    config: RawConfig,
    base_dir: PathBuf,
    seed: u64,
    chains: usize,
}

fn cmd_sample(a: SampleArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let (mut cfg, chains) = match (&a.config, &a.manifest) {
        (Some(path), _) => (RunConfig::from_path(path)?, a.chains.unwrap_or(1)),
        (None, Some(path)) => {
            let text = read_text(path)?;
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| Error::Validation(format!("{}: not a sample manifest: {e}", path.display())))?;
            let mut raw = m.config;
            raw.sampler.seed = Some(m.seed);
            (RunConfig::from_raw(raw, &m.base_dir)?, a.chains.unwrap_or(m.chains))
        }
        (None, None) => unreachable!("clap requires --config or --manifest"),
    };
    if chains == 0 {
        return Err(Error::Validation("--chains must be >= 1".into()));
    }
    if let Some(seed) = a.seed {
        cfg.sampler.seed = seed;
    }
    cfg.raw.sampler.seed = Some(cfg.sampler.seed);
    let dir = cfg.raw.outputs.resolve_dir(a.out.as_deref(), &cfg.base_dir);
    create_dir(&dir)?;
    let outputs = if chains == 1 {
        vec![sampler::run(&cfg.spec, &cfg.sampler)?]
    } else {
        sampler::run_chains(&cfg.spec, &cfg.sampler, chains)?
    };
    let names = cfg.spec.names();
    let mut chain_records = Vec::new();
    for (i, o) in outputs.iter().enumerate() {
        let suffix = if chains == 1 { String::new() } else { format!("_chain{}", i + 1) };
        let mut files = Vec::new();
        let stats_name = format!("stats{suffix}.csv");
        write_file(&dir.join(&stats_name), stats_csv(&names, &o.stats)?)?;
        files.push(stats_name);
        let final_name = format!("final_state{suffix}.edges");
        write_file(&dir.join(&final_name), o.final_state.to_edge_list())?;
        files.push(final_name);
        if !cfg.sampler.stats_only {
            files.extend(write_ensemble(&dir, &format!("ensemble{suffix}"), &o.ensemble, cfg.raw.outputs.ensemble_format)?);
        }
        let mut record = json!({
            "seed": sampler::chain_seed(cfg.sampler.seed, i),
            "acceptance": o.acceptance,
            "acceptance_rate": o.acceptance.rate(),
        });
        if let Some(stage) = cfg.stage_sampler(o.final_state.clone()) {
            let stage = SamplerConfig {
                seed: sampler::chain_seed(cfg.sampler.seed, i).wrapping_add(1),
                ..stage
            };
            let s = sampler::run(&cfg.spec, &stage)?;
            let name = format!("ensemble_stats{suffix}.csv");
            write_file(&dir.join(&name), stats_csv(&names, &s.stats)?)?;
            files.push(name);
            files.extend(write_ensemble(&dir, &format!("ensemble{suffix}"), &s.ensemble, cfg.raw.outputs.ensemble_format)?);
            record["ensemble_stage"] = json!({
                "seed": stage.seed,
                "acceptance": s.acceptance,
                "acceptance_rate": s.acceptance.rate(),
            });
        }
        record["files"] = json!(files);
        chain_records.push(record);
        let summaries = diagnostics::summarize_rows(&o.stats, names.len())?;
        let mut text = String::new();
        if chains > 1 {
            writeln!(text, "chain {}", i + 1).expect("write to String");
        }
        text.push_str(&diagnostics::format_summaries(&names, &summaries));
        writeln!(
            text,
            "acceptance {:.4} ({} of {} proposals; {} outside the support)",
            o.acceptance.rate(),
            o.acceptance.accepted,
            o.acceptance.proposed,
            o.acceptance.auto_rejected
        )
        .expect("write to String");
        emit(out, &text)?;
    }
    let config_value = serde_json::to_value(&cfg.raw).expect("config serialises");
    let config_bytes = serde_json::to_vec(&config_value).expect("config serialises");
    let base_dir = std::path::absolute(&cfg.base_dir).unwrap_or(cfg.base_dir.clone());
    let manifest = json!({
        "tool": "ccm",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "sample",
        "seed": cfg.sampler.seed,
        "chains": chains,
        "estimator": cfg.spec.cardinality.mode_name(),
        "config_sha256": sha256_hex(&config_bytes),
        "base_dir": base_dir,
        "config": config_value,
        "runs": chain_records,
    });
    write_file(
        &dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n",
    )?;
    emit(out, &format!("wrote {}\n", dir.display()))
}

fn cmd_theoretical(a: TheoreticalArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let cfg = RunConfig::from_path(&a.config)?;
    let count = a.count.unwrap_or(cfg.sampler.sample_size);
    let seed = a.seed.unwrap_or(cfg.sampler.seed);
    let rows = diagnostics::theoretical_draws(&cfg.spec, count, seed)?;
    let names = cfg.spec.names();
    let dir = cfg.raw.outputs.resolve_dir(a.out.as_deref(), &cfg.base_dir);
    create_dir(&dir)?;
    write_file(&dir.join("theoretical.csv"), stats_csv(&names, &rows)?)?;
    let summaries = diagnostics::summarize_rows(&rows, names.len())?;
    emit(out, &diagnostics::format_summaries(&names, &summaries))?;
    emit(out, &format!("wrote {}\n", dir.join("theoretical.csv").display()))
}

/// Parses `edges`, `degreedist:3`, `degreedist_by_group:3:2` and similar.
pub fn parse_property_arg(s: &str) -> Result<PropertySpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("property `{s}` is missing a parameter")))?
            .parse::<usize>()
            .map_err(|e| Error::InvalidParameter(format!("property `{s}`: {e}")))
    };
    let spec = match (parts[0], parts.len()) {
        ("edges", 1) => PropertySpec::Edges,
        ("density", 1) => PropertySpec::Density,
        ("triangles", 1) => PropertySpec::Triangles,
        ("degreedist", 2) => PropertySpec::DegreeDist { max_degree: num(1)? },
        ("degmixing", 2) => PropertySpec::DegMixing { max_degree: num(1)? },
        ("mixing", 2) => PropertySpec::Mixing { groups: num(1)? },
        ("degreedist_by_group", 3) => PropertySpec::DegreeDistByGroup {
            max_degree: num(1)?,
            groups: num(2)?,
        },
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unrecognised property `{s}` (expected edges, density, triangles, degreedist:K, degmixing:K, mixing:G or degreedist_by_group:K:G)"
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_enumerate(a: EnumerateArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let props = a
        .properties
        .iter()
        .map(|s| parse_property_arg(s))
        .collect::<Result<Vec<_>>>()?;
    let cov = match &a.covariates {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::InvalidParameter(format!("covariate `{t}`: {e}")))
                })
                .collect::<Result<Vec<u32>>>()?,
        ),
    };
    let table = EnumerationTable::enumerate(a.n, &props, cov.as_deref())?;
    let mut text = format!("# n = {}, classes over ({})\n", a.n, table.names().join(", "));
    for (k, v) in table.entries() {
        writeln!(text, "{}\t{v}", EnumerationTable::key_string(k)).expect("write to String");
    }
    if let Some(sizes) = table.sizes_by_scalar() {
        let list: Vec<String> = sizes.iter().map(ToString::to_string).collect();
        writeln!(text, "sizes: [{}]", list.join(", ")).expect("write to String");
    }
    if table.unsupported() > &num_bigint::BigUint::from(0u32) {
        writeln!(text, "outside support: {}", table.unsupported()).expect("write to String");
    }
    writeln!(text, "total: {}", table.total()).expect("write to String");
    emit(out, &text)?;
    if let Some(path) = &a.out {
        write_file(path, serde_json::to_string_pretty(&table.to_json()).expect("table serialises") + "\n")?;
    }
    Ok(())
}

fn cmd_diagnose(a: DiagnoseArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let (names, rows) = read_stats_csv(&a.stats)?;
    let (theo, overlays) = match (&a.config, &a.theoretical) {
        (Some(c), _) => {
            let cfg = RunConfig::from_path(c)?;
            let seed = a.seed.unwrap_or(cfg.sampler.seed);
            let draws = diagnostics::theoretical_draws(&cfg.spec, a.count, seed)?;
            (Some((cfg.spec.names(), draws)), diagnostics::exact_overlays(&cfg.spec))
        }
        (None, Some(t)) => (Some(read_stats_csv(t)?), Vec::new()),
        (None, None) => (None, Vec::new()),
    };
    let dir = a
        .out
        .clone()
        .unwrap_or_else(|| crate::config::OutputConfig::default().resolve_dir(None, Path::new(".")));
    create_dir(&dir)?;
    let summaries = diagnostics::summarize_rows(&rows, names.len())?;
    let mut text = diagnostics::format_summaries(&names, &summaries);
    let report = match &theo {
        Some((theo_names, theo_rows)) => {
            let r = diagnostics::compare(&names, &rows, theo_names, theo_rows, &overlays)?;
            text.push('\n');
            text.push_str(&r.to_text());
            write_file(
                &dir.join("comparison.json"),
                serde_json::to_string_pretty(&r).expect("report serialises") + "\n",
            )?;
            Some(r)
        }
        None => None,
    };
    write_file(&dir.join("summary.txt"), &text)?;
    let theo_rows = theo.as_ref().map(|t| t.1.as_slice());
    for (kind, file) in [
        (PlotKind::Hist, "hist.csv"),
        (PlotKind::Density, "density.csv"),
        (PlotKind::Trace, "trace.csv"),
    ] {
        let csv = diagnostics::plot_data(kind, &names, &rows, theo_rows, report.as_ref())?;
        write_file(&dir.join(file), csv)?;
    }
    let ess: Vec<f64> = (0..names.len())
        .map(|j| diagnostics::effective_sample_size(&diagnostics::column(&rows, j)))
        .collect();
    let meta = json!({
        "quantiles": "type 7 (linear interpolation between order statistics)",
        "histogram_bins": "Freedman-Diaconis on the pooled sample",
        "density_bandwidth": "Silverman rule of thumb",
        "density_grid_points": diagnostics::DENSITY_GRID,
        "effective_sample_size": names
            .iter()
            .cloned()
            .zip(ess.into_iter().map(Value::from))
            .collect::<serde_json::Map<String, Value>>(),
        "theoretical_draws": theo.as_ref().map(|t| t.1.len()),
    });
    write_file(
        &dir.join("metadata.json"),
        serde_json::to_string_pretty(&meta).expect("metadata serialises") + "\n",
    )?;
    emit(out, &text)?;
    emit(out, &format!("wrote {}\n", dir.display()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkObs {
    nodes: u64,
    edges: u64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase", deny_unknown_fields)]
enum Observations {
    Normal {
        #[serde(default)]
        densities: Option<Vec<f64>>,
        #[serde(default)]
        networks: Option<Vec<NetworkObs>>,
        prior_mean: f64,
        prior_variance: f64,
        #[serde(default)]
        sigma: Option<f64>,
        population: usize,
        #[serde(default = "default_ensemble_size")]
        ensemble_size: usize,
    },
    Beta {
        observed_edges: u64,
        observed_dyads: u64,
        #[serde(default = "one")]
        a0: f64,
        #[serde(default = "one")]
        b0: f64,
        #[serde(default)]
        population_dyads: Option<u64>,
        population: usize,
        #[serde(default = "default_ensemble_size")]
        ensemble_size: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn default_ensemble_size() -> usize {
    10
}

fn load_posterior(path: &Path) -> Result<(DensityPosterior, usize, usize)> {
    let text = read_text(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let obs: Observations = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::parse(inner.line(), inner.column(), inner.to_string())
        } else {
            Error::Validation(format!("{p}: {inner}"))
        }
    })?;
    match obs {
        Observations::Normal {
            densities,
            networks,
            prior_mean,
            prior_variance,
            sigma,
            population,
            ensemble_size,
        } => {
            let d = match (densities, networks) {
                (Some(d), None) => d,
                (None, Some(nets)) => nets
                    .iter()
                    .enumerate()
                    .map(|(i, n)| {
                        let m = pairs(n.nodes);
                        if m == 0 || n.edges > m {
                            Err(Error::Validation(format!(
                                "networks[{i}]: {} edges on {} nodes is impossible",
                                n.edges, n.nodes
                            )))
                        } else {
                            Ok(n.edges as f64 / m as f64)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
                _ => {
                    return Err(Error::Validation(
                        "give exactly one of `densities` or `networks`".into(),
                    ))
                }
            };
            let post = posterior::normal_posterior(&d, prior_mean, prior_variance, sigma)
                .map_err(|e| Error::Validation(e.to_string()))?;
            Ok((post, population, ensemble_size))
        }
        Observations::Beta {
            observed_edges,
            observed_dyads,
            a0,
            b0,
            population_dyads,
            population,
            ensemble_size,
        } => {
            let post = posterior::beta_posterior(observed_edges, observed_dyads, a0, b0, population_dyads)
                .map_err(|e| Error::Validation(e.to_string()))?;
            Ok((post, population, ensemble_size))
        }
    }
}

fn cmd_posterior(a: PosteriorArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let (post, n, ensemble_size) = load_posterior(&a.input)?;
    posterior::posterior_to_ccm(&post, n)?;
    let dir = a
        .out
        .clone()
        .unwrap_or_else(|| crate::config::OutputConfig::default().resolve_dir(None, Path::new(".")));
    create_dir(&dir)?;
    let summary = json!({
        "posterior": post,
        "mean": post.mean(),
        "variance": post.variance(),
        "sd": post.sd(),
        "ccm_distribution": post.config_distribution(),
        "population": n,
    });
    write_file(
        &dir.join("posterior.json"),
        serde_json::to_string_pretty(&summary).expect("posterior serialises") + "\n",
    )?;
    let mut template = posterior::posterior_config_template(&post, n, ensemble_size, a.seed.unwrap_or(0));
    template["outputs"]["dir"] = json!("ensemble");
    write_file(
        &dir.join("ccm_config.json"),
        serde_json::to_string_pretty(&template).expect("config serialises") + "\n",
    )?;
    emit(
        out,
        &format!(
            "posterior mean {:.6}, sd {:.6}\nwrote {} and {}\n",
            post.mean(),
            post.sd(),
            dir.join("posterior.json").display(),
            dir.join("ccm_config.json").display()
        ),
    )
}

/// Densities from the posterior CCM and its two comparators.
pub struct ComparatorRun {
    pub ccm: SampleOutput,
    pub bernoulli: Vec<f64>,
    pub gnm: Vec<f64>,
    pub m: u64,
    pub p: f64,
}

/// Runs the posterior CCM and both comparators at population `n`.
pub fn run_comparators(
    post: &DensityPosterior,
    n: usize,
    count: usize,
    burnin: u64,
    interval: u64,
    seed: u64,
) -> Result<ComparatorRun> {
    let spec = posterior::posterior_to_ccm(post, n)?;
    let cfg = SamplerConfig {
        burnin,
        interval,
        sample_size: count,
        seed,
        ..Default::default()
    };
    let ccm = sampler::run(&spec, &cfg)?;
    let dyads = pairs(n as u64);
    let p = post.mean().clamp(1.0 / dyads as f64, 1.0 - 1.0 / dyads as f64);
    let m = (post.mean() * dyads as f64).round().clamp(0.0, dyads as f64) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(sampler::chain_seed(seed, 1));
    let bernoulli = posterior::benchmark_bernoulli_edges(n, p, count, &mut rng)?;
    let gnm = posterior::benchmark_gnm(n, m, count)?;
    Ok(ComparatorRun { ccm, bernoulli, gnm, m, p })
}

fn cmd_compare(a: CompareArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let (post, n, _) = load_posterior(&a.input)?;
    if a.count < 2 {
        return Err(Error::Validation("--count must be >= 2".into()));
    }
    let seed = a.seed.unwrap_or(0);
    let r = run_comparators(&post, n, a.count, a.burnin, a.interval, seed)?;
    let ccm = r.ccm.column(0);
    let models: [(&str, &[f64]); 3] = [("ccm", &ccm), ("bernoulli", &r.bernoulli), ("gnm", &r.gnm)];
    let dir = a
        .out
        .clone()
        .unwrap_or_else(|| crate::config::OutputConfig::default().resolve_dir(None, Path::new(".")));
    create_dir(&dir)?;
    let mut summary = csv::Writer::from_writer(Vec::new());
    let mut samples = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Runtime(e.to_string());
    summary.write_record(["model", "mean", "sd", "min", "max"]).map_err(err)?;
    samples.write_record(["model", "density"]).map_err(err)?;
    let mut text = format!(
        "posterior mean {:.6}, sd {:.6}; bernoulli p = {:.6}; G(n, m) with m = {}\n{:<10} {:>12} {:>12}\n",
        post.mean(),
        post.sd(),
        r.p,
        r.m,
        "model",
        "mean",
        "sd"
    );
    let mut sds = Vec::new();
    for (name, xs) in models {
        let s = diagnostics::summarize(xs)?;
        let sd = diagnostics::sd(xs);
        sds.push(sd);
        summary
            .write_record([name.to_string(), s.mean.to_string(), sd.to_string(), s.min.to_string(), s.max.to_string()])
            .map_err(err)?;
        for x in xs {
            samples.write_record([name.to_string(), x.to_string()]).map_err(err)?;
        }
        writeln!(text, "{name:<10} {:>12.6} {:>12.6}", s.mean, sd).expect("write to String");
    }
    let ordered = sds[0] > sds[1] && sds[1] > sds[2];
    writeln!(text, "sd ordering ccm > bernoulli > gnm: {}", if ordered { "holds" } else { "does not hold" })
        .expect("write to String");
    write_file(&dir.join("compare.csv"), summary.into_inner().map_err(|e| Error::Runtime(e.to_string()))?)?;
    write_file(&dir.join("samples.csv"), samples.into_inner().map_err(|e| Error::Runtime(e.to_string()))?)?;
    emit(out, &text)?;
    emit(out, &format!("wrote {}\n", dir.display()))
}

/// Entry point of the `ccm` binary.
pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = run(std::env::args_os(), &mut lock);
    let _ = lock.flush();
    code
}
