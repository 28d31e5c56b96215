//! JSON run configuration.
//!
//! ```json
//! {
//!   "description": "optional free text",
//!   "model": {
//!     "population": 50,
//!     "properties": ["edges"],
//!     "distributions": [{"kind": "poisson", "params": [350]}],
//!     "covariates": null,
//!     "estimator": "auto"
//!   },
//!   "sampler": {"burnin": 100000, "interval": 1000, "sample_size": 1000, "seed": 7},
//!   "ensemble_stage": {"burnin": 0, "interval": 1000, "sample_size": 10},
//!   "outputs": {"dir": "out", "ensemble_format": "edgelist-dir"}
//! }
//! ```
//!
//! Properties are either a bare name (`"edges"`, `"density"`,
//! `"triangles"`) or an object such as `{"kind": "degreedist",
//! "max_degree": 3}`. Each distribution takes a positional `params` list:
//!
//! | kind      | params                                   |
//! |-----------|------------------------------------------|
//! | poisson   | `[lambda]`, lambda a number or a list     |
//! | uniform   | `[]`                                      |
//! | np        | `[[p_0, ..., p_M]]`                       |
//! | normal    | `[mean, variance]`                        |
//! | beta      | `[a, b]`                                  |
//! | dirmult   | `[[alpha_0, ..., alpha_K]]`               |
//! | mvn       | `[[mean...], [[covariance row]...]]`      |
//!
//! `estimator` is `"auto"`, `"oracle-table"` (exhaustive enumeration at
//! load time), `{"oracle_table_file": "table.json"}`, or one mode per
//! property (`"exact-analytic"`, `"bender-canfield"`, `"matching-approx"`,
//! `"tilt"`). Relative file paths resolve against the config file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cardinality::{CardinalityEstimator, CardinalityMode};
use crate::distributions::ClassDistribution;
use crate::enumeration::EnumerationTable;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math::pairs;
use crate::sampler::{CcmSpec, SamplerConfig};
use crate::stats::PropertySpec;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CCM_OUTPUT_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: RawModel,
    #[serde(default)]
    pub sampler: RawSampler,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble_stage: Option<StageConfig>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub population: usize,
    pub properties: Vec<Value>,
    pub distributions: Vec<RawDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariates: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDistribution {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawSampler {
    pub burnin: u64,
    pub interval: u64,
    pub sample_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub stats_only: bool,
    pub use_initial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_graph: Option<PathBuf>,
}

impl Default for RawSampler {
    fn default() -> Self {
        let d = SamplerConfig::default();
        RawSampler {
            burnin: d.burnin,
            interval: d.interval,
            sample_size: d.sample_size,
            seed: None,
            stats_only: d.stats_only,
            use_initial: d.use_initial,
            initial_graph: None,
        }
    }
}

/// Second run started from the first run's final graph, keeping graphs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    #[serde(default)]
    pub burnin: u64,
    pub interval: u64,
    pub sample_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleFormat {
    /// One edge-list file per graph in an `ensemble/` directory.
    EdgelistDir,
    /// One graph JSON object per line in `ensemble.jsonl`.
    Jsonl,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub ensemble_format: EnsembleFormat,
}

fn default_format() -> EnsembleFormat {
    EnsembleFormat::EdgelistDir
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            ensemble_format: default_format(),
        }
    }
}

impl OutputConfig {
    /// Output directory: explicit override, then the config, then
    /// `$CCM_OUTPUT_DIR`, then `ccm_output`.
    pub fn resolve_dir(&self, cli: Option<&Path>, base: &Path) -> PathBuf {
        if let Some(p) = cli {
            return p.to_path_buf();
        }
        if let Some(p) = &self.dir {
            return resolve(base, p);
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => PathBuf::from("ccm_output"),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub spec: CcmSpec,
    pub sampler: SamplerConfig,
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RunConfig::from_str_with_base(&text, &base)
    }

    pub fn from_str_with_base(text: &str, base: &Path) -> Result<RunConfig> {
        let raw = parse_raw(text)?;
        RunConfig::from_raw(raw, base)
    }

    pub fn from_raw(raw: RawConfig, base: &Path) -> Result<RunConfig> {
        let spec = build_spec(&raw.model, base)?;
        let sampler = build_sampler(&raw.sampler, base, &spec)?;
        if let Some(stage) = &raw.ensemble_stage {
            if stage.interval < 1 {
                return Err(Error::Validation("ensemble_stage.interval must be >= 1".into()));
            }
            if stage.sample_size < 1 {
                return Err(Error::Validation("ensemble_stage.sample_size must be >= 1".into()));
            }
        }
        Ok(RunConfig {
            raw,
            spec,
            sampler,
            base_dir: base.to_path_buf(),
        })
    }

    /// Sampler settings of the ensemble stage, started from `initial`.
    pub fn stage_sampler(&self, initial: Graph) -> Option<SamplerConfig> {
        let stage = self.raw.ensemble_stage.as_ref()?;
        Some(SamplerConfig {
            burnin: stage.burnin,
            interval: stage.interval,
            sample_size: stage.sample_size,
            seed: self.sampler.seed.wrapping_add(1),
            initial_graph: Some(initial),
            use_initial: true,
            stats_only: false,
        })
    }
}

/// Parses JSON into the raw schema, reporting the path of the first error.
pub fn parse_raw(text: &str) -> Result<RawConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::parse(inner.line(), inner.column(), inner.to_string())
        } else {
            let msg = strip_position(&inner.to_string());
            if path == "." {
                Error::Validation(msg)
            } else {
                Error::Validation(format!("{path}: {msg}"))
            }
        }
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Validation(format!("{path} {msg}"))
}

/// Parses one property entry.
pub fn parse_property(v: &Value, path: &str) -> Result<PropertySpec> {
    let spec = match v {
        Value::String(name) => match name.as_str() {
            "edges" => PropertySpec::Edges,
            "density" => PropertySpec::Density,
            "triangles" => PropertySpec::Triangles,
            "degreedist" | "degmixing" | "mixing" | "degreedist_by_group" => {
                return Err(invalid(
                    path,
                    format!("`{name}` needs parameters; write it as an object such as {{\"kind\": \"{name}\", ...}}"),
                ))
            }
            other => return Err(invalid(path, format!("unknown property `{other}`"))),
        },
        Value::Object(_) => serde_json::from_value::<PropertySpec>(v.clone())
            .map_err(|e| invalid(path, format!("is not a valid property: {e}")))?,
        _ => return Err(invalid(path, "must be a property name or object")),
    };
    spec.validate().map_err(|e| invalid(path, format!(": {e}")))?;
    Ok(spec)
}

fn number(v: &Value, path: &str, name: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| invalid(&format!("{path} ({name})"), "must be a finite number"))
}

fn positive(v: &Value, path: &str, name: &str) -> Result<f64> {
    let x = number(v, path, name)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(&format!("{path} ({name})"), format!("must be > 0 (got {x})")))
    }
}

fn vector(v: &Value, path: &str, name: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| invalid(&format!("{path} ({name})"), "must be a list of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]"), name))
        .collect()
}

fn arity(params: &[Value], path: &str, kind: &str, names: &[&str]) -> Result<()> {
    if params.len() != names.len() {
        return Err(invalid(
            &format!("{path}.params"),
            format!(
                "must have {} entr{} for {kind} ({}), got {}",
                names.len(),
                if names.len() == 1 { "y" } else { "ies" },
                names.join(", "),
                params.len()
            ),
        ));
    }
    Ok(())
}

/// Builds the class distribution of `prop` from a config entry.
pub fn parse_distribution(
    d: &RawDistribution,
    prop: &PropertySpec,
    n: usize,
    path: &str,
) -> Result<ClassDistribution> {
    let p = &d.params;
    let pp = |i: usize| format!("{path}.params[{i}]");
    let dist = match d.kind.as_str() {
        "poisson" => {
            arity(p, path, "poisson", &["lambda"])?;
            let lambda = if p[0].is_array() {
                let v = vector(&p[0], &pp(0), "lambda")?;
                for (i, x) in v.iter().enumerate() {
                    if *x <= 0.0 {
                        return Err(invalid(&format!("{}[{i}] (lambda)", pp(0)), format!("must be > 0 (got {x})")));
                    }
                }
                v
            } else {
                vec![positive(&p[0], &pp(0), "lambda")?]
            };
            ClassDistribution::poisson(lambda)
        }
        "uniform" => {
            arity(p, path, "uniform", &[])?;
            Ok(ClassDistribution::uniform(pairs(n as u64)))
        }
        "np" => {
            arity(p, path, "np", &["probabilities"])?;
            let alpha = vector(&p[0], &pp(0), "probabilities")?;
            ClassDistribution::non_parametric(alpha)
        }
        "normal" => {
            arity(p, path, "normal", &["mean", "variance"])?;
            let mean = number(&p[0], &pp(0), "mean")?;
            let var = positive(&p[1], &pp(1), "variance")?;
            ClassDistribution::normal(mean, var)
        }
        "beta" => {
            arity(p, path, "beta", &["a", "b"])?;
            let a = positive(&p[0], &pp(0), "a")?;
            let b = positive(&p[1], &pp(1), "b")?;
            ClassDistribution::beta(a, b, pairs(n as u64))
        }
        "dirmult" => {
            arity(p, path, "dirmult", &["alpha"])?;
            let alpha = vector(&p[0], &pp(0), "alpha")?;
            for (i, x) in alpha.iter().enumerate() {
                if *x <= 0.0 {
                    return Err(invalid(&format!("{}[{i}] (alpha)", pp(0)), format!("must be > 0 (got {x})")));
                }
            }
            ClassDistribution::dirmult(alpha, n as u64)
        }
        "mvn" => {
            arity(p, path, "mvn", &["mean", "covariance"])?;
            let mean = vector(&p[0], &pp(0), "mean")?;
            let rows = p[1]
                .as_array()
                .ok_or_else(|| invalid(&format!("{} (covariance)", pp(1)), "must be a list of rows"))?;
            let cov = rows
                .iter()
                .enumerate()
                .map(|(i, r)| vector(r, &format!("{}[{i}]", pp(1)), "covariance"))
                .collect::<Result<Vec<_>>>()?;
            ClassDistribution::mvn(mean, cov)
        }
        other => {
            return Err(invalid(
                &format!("{path}.kind"),
                format!("unknown distribution `{other}` (expected poisson, uniform, np, normal, beta, dirmult or mvn)"),
            ))
        }
    }
    .map_err(|e| invalid(path, format!(": {}", error_message(&e))))?;
    dist.check_property(prop, n)
        .map_err(|e| invalid(path, format!(": {}", error_message(&e))))?;
    Ok(dist)
}

fn error_message(e: &Error) -> String {
    match e {
        Error::InvalidParameter(m) | Error::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}

fn parse_estimator(v: Option<&Value>, props: &[PropertySpec], n: usize, cov: Option<&[u32]>, base: &Path) -> Result<CardinalityEstimator> {
    let path = "model.estimator";
    match v {
        None => Ok(CardinalityEstimator::default_for(props)),
        Some(Value::String(s)) if s == "auto" => Ok(CardinalityEstimator::default_for(props)),
        Some(Value::String(s)) if s == "oracle-table" => {
            let table = EnumerationTable::enumerate(n, props, cov)
                .map_err(|e| invalid(path, format!(": {}", error_message(&e))))?;
            Ok(CardinalityEstimator::OracleTable(Arc::new(table)))
        }
        Some(Value::Object(map)) => {
            let file = match (map.len(), map.get("oracle_table_file")) {
                (1, Some(Value::String(f))) => f,
                _ => {
                    return Err(invalid(
                        path,
                        "object form must be {\"oracle_table_file\": \"<path>\"}",
                    ))
                }
            };
            let full = resolve(base, Path::new(file));
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::Io(format!("cannot read {}: {e}", full.display())))?;
            Ok(CardinalityEstimator::OracleTable(Arc::new(EnumerationTable::from_json(&text)?)))
        }
        Some(Value::Array(items)) => {
            let modes = items
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    serde_json::from_value::<CardinalityMode>(m.clone()).map_err(|_| {
                        invalid(
                            &format!("{path}[{i}]"),
                            "must be one of exact-analytic, bender-canfield, matching-approx, tilt",
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CardinalityEstimator::Product(modes))
        }
        Some(_) => Err(invalid(
            path,
            "must be \"auto\", \"oracle-table\", {\"oracle_table_file\": ...} or a list of modes",
        )),
    }
}

pub fn build_spec(model: &RawModel, base: &Path) -> Result<CcmSpec> {
    let n = model.population;
    if n < 2 {
        return Err(invalid("model.population", format!("must be >= 2 (got {n})")));
    }
    let props = model
        .properties
        .iter()
        .enumerate()
        .map(|(i, v)| parse_property(v, &format!("model.properties[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if props.is_empty() {
        return Err(invalid("model.properties", "must list at least one property"));
    }
    if props.len() != model.distributions.len() {
        return Err(invalid(
            "model.distributions",
            format!(
                "has {} entries but model.properties has {}",
                model.distributions.len(),
                props.len()
            ),
        ));
    }
    let dists = model
        .distributions
        .iter()
        .zip(&props)
        .enumerate()
        .map(|(i, (d, p))| parse_distribution(d, p, n, &format!("model.distributions[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if let Some(cov) = &model.covariates {
        if cov.len() != n {
            return Err(invalid(
                "model.covariates",
                format!("has {} labels for a population of {n}", cov.len()),
            ));
        }
    }
    for (i, p) in props.iter().enumerate() {
        if p.needs_covariates() && model.covariates.is_none() {
            return Err(invalid(
                &format!("model.properties[{i}]"),
                format!("({}) requires model.covariates", p.kind_name()),
            ));
        }
    }
    let estimator = parse_estimator(model.estimator.as_ref(), &props, n, model.covariates.as_deref(), base)?;
    let spec = CcmSpec {
        population: n,
        properties: props,
        distributions: dists,
        cardinality: estimator,
        covariates: model.covariates.clone(),
    };
    spec.validate().map_err(|e| invalid("model", format!(": {}", error_message(&e))))?;
    Ok(spec)
}

fn build_sampler(raw: &RawSampler, base: &Path, spec: &CcmSpec) -> Result<SamplerConfig> {
    if raw.interval < 1 {
        return Err(invalid("sampler.interval", "must be >= 1"));
    }
    if raw.sample_size < 1 {
        return Err(invalid("sampler.sample_size", "must be >= 1"));
    }
    let initial_graph = match &raw.initial_graph {
        None => None,
        Some(p) => {
            let full = resolve(base, p);
            let bytes = std::fs::read(&full)
                .map_err(|e| Error::Io(format!("cannot read {}: {e}", full.display())))?;
            let format = if full.extension().is_some_and(|e| e == "json") {
                crate::graph::GraphFormat::Json
            } else {
                crate::graph::GraphFormat::EdgeList
            };
            let g = Graph::deserialize(&bytes, format)?;
            if g.node_count() != spec.population {
                return Err(invalid(
                    "sampler.initial_graph",
                    format!("has {} nodes, population is {}", g.node_count(), spec.population),
                ));
            }
            Some(g)
        }
    };
    if raw.use_initial && initial_graph.is_none() {
        return Err(invalid("sampler.use_initial", "is true but sampler.initial_graph is not set"));
    }
    Ok(SamplerConfig {
        burnin: raw.burnin,
        interval: raw.interval,
        sample_size: raw.sample_size,
        seed: raw.seed.unwrap_or(0),
        initial_graph,
        use_initial: raw.use_initial,
        stats_only: raw.stats_only,
    })
}
