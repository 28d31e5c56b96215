//! C ABI for `ccm-core`.
//!
//! Every fallible call returns a [`CcmStatus`]; on failure the message is
//! available from [`ccm_last_error_message`] on the same thread. Objects are
//! opaque handles created by calls such as `ccm_sample_run` and released
//! with the matching `ccm_*_free`. Strings returned as `char *` are owned by
//! the caller and must be released with [`ccm_string_free`]; strings returned
//! as `const char *` are borrowed from the handle that produced them.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ccm_core::config::{parse_property, RunConfig};
use ccm_core::{EnumerationTable, Error, Graph, SampleOutput};

/// Result of a library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON, edge list or other text input.
    Parse = 3,
    /// A distribution or function parameter is out of range.
    InvalidParameter = 4,
    /// The model or run configuration is inconsistent.
    Validation = 5,
    /// A node index or buffer size is out of range.
    OutOfRange = 6,
    /// An enumeration was refused as too large.
    TooLarge = 7,
    /// File system failure.
    Io = 8,
    /// The sampler could not start or continue (e.g. no supported state).
    Runtime = 9,
    /// An internal error; please report it.
    Internal = 10,
}

/// Result of a sampler run.
pub struct CcmSample {
    output: SampleOutput,
    names: Vec<CString>,
}

/// A simple undirected graph.
pub struct CcmGraph {
    graph: Graph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CcmStatus {
    match e {
        Error::Parse { .. } => CcmStatus::Parse,
        Error::InvalidParameter(_) | Error::Domain(_) => CcmStatus::InvalidParameter,
        Error::Validation(_) | Error::Precondition(_) => CcmStatus::Validation,
        Error::NodeOutOfRange { .. } | Error::SelfLoop(_) => CcmStatus::OutOfRange,
        Error::TooLarge(_) => CcmStatus::TooLarge,
        Error::Io(_) => CcmStatus::Io,
        Error::Support(_) | Error::Runtime(_) => CcmStatus::Runtime,
        Error::Invariant(_) => CcmStatus::Internal,
    }
}

struct Failure(CcmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording its error and converting panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CcmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CcmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            CcmStatus::Internal
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(CcmStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CcmStatus::InvalidUtf8, format!("{name} is not UTF-8: {e}")))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(CcmStatus::Internal, "string contains NUL".into()))
}

/// Message of the last failed call on this thread, or null after a
/// successful call. Valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn ccm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version, e.g. `"0.1.0"`. Static storage.
#[no_mangle]
pub extern "C" fn ccm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer returned by this library as `char *`, not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a JSON run configuration and runs the sampler.
///
/// `base_dir` resolves relative paths inside the config and may be null
/// (current directory). When `override_seed` is non-zero, `seed` replaces
/// the configured seed. On success `*out` receives a handle to release with
/// [`ccm_sample_free`].
///
/// # Safety
/// `config_json` and `base_dir` (if non-null) must be NUL-terminated
/// strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_run(
    config_json: *const c_char,
    base_dir: *const c_char,
    override_seed: i32,
    seed: u64,
    out: *mut *mut CcmSample,
) -> CcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let json = text(config_json, "config_json")?;
        let base = if base_dir.is_null() { "" } else { text(base_dir, "base_dir")? };
        let mut cfg = RunConfig::from_str_with_base(json, Path::new(base))?;
        if override_seed != 0 {
            cfg.sampler.seed = seed;
        }
        let output = ccm_core::run(&cfg.spec, &cfg.sampler)?;
        let names = output
            .names
            .iter()
            .map(|n| CString::new(n.as_str()).expect("statistic names have no NUL"))
            .collect();
        *out = Box::into_raw(Box::new(CcmSample { output, names }));
        Ok(())
    })
}

/// Releases a sample. Null is ignored.
///
/// # Safety
/// `sample` must be null or a live handle from [`ccm_sample_run`].
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_free(sample: *mut CcmSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of recorded rows; 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_rows(sample: *const CcmSample) -> usize {
    sample.as_ref().map_or(0, |s| s.output.stats.len())
}

/// Number of statistic columns; 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_columns(sample: *const CcmSample) -> usize {
    sample.as_ref().map_or(0, |s| s.names.len())
}

/// Name of column `index`, or null when out of range. Borrowed from the
/// handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_column_name(sample: *const CcmSample, index: usize) -> *const c_char {
    sample
        .as_ref()
        .and_then(|s| s.names.get(index))
        .map_or(std::ptr::null(), |n| n.as_ptr())
}

/// Copies the statistics row-major into `buffer`, which must hold
/// `rows * columns` doubles.
///
/// # Safety
/// `sample` must be a live handle and `buffer` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_copy_stats(sample: *const CcmSample, buffer: *mut f64, len: usize) -> CcmStatus {
    guard(|| {
        let s = sample.as_ref().ok_or_else(|| null("sample"))?;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let needed = s.output.stats.len() * s.names.len();
        if len < needed {
            return Err(Failure(
                CcmStatus::OutOfRange,
                format!("buffer holds {len} values but {needed} are needed"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, needed);
        for (chunk, row) in dst.chunks_mut(s.names.len().max(1)).zip(&s.output.stats) {
            chunk.copy_from_slice(row);
        }
        Ok(())
    })
}

/// Metropolis-Hastings acceptance rate of the run; NaN for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_acceptance_rate(sample: *const CcmSample) -> f64 {
    sample.as_ref().map_or(f64::NAN, |s| s.output.acceptance.rate())
}

/// Copies the final state of the chain into a new graph handle.
///
/// # Safety
/// `sample` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccm_sample_final_graph(sample: *const CcmSample, out: *mut *mut CcmGraph) -> CcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let s = sample.as_ref().ok_or_else(|| null("sample"))?;
        *out = Box::into_raw(Box::new(CcmGraph {
            graph: s.output.final_state.clone(),
        }));
        Ok(())
    })
}

/// Builds a graph on `nodes` nodes from `edge_count` pairs stored as
/// `edges[2 * i], edges[2 * i + 1]`. Duplicate pairs toggle the dyad back.
///
/// # Safety
/// `edges` must point to `2 * edge_count` values (it may be null when
/// `edge_count` is 0); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_from_edges(
    nodes: usize,
    edges: *const u32,
    edge_count: usize,
    out: *mut *mut CcmGraph,
) -> CcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let pairs: &[u32] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return Err(null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let graph = Graph::from_edges(nodes, pairs.chunks(2).map(|p| (p[0] as usize, p[1] as usize)))?;
        *out = Box::into_raw(Box::new(CcmGraph { graph }));
        Ok(())
    })
}

/// Parses an edge list (`n <count>` header, then one `u v` pair per line).
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_from_edge_list(source: *const c_char, out: *mut *mut CcmGraph) -> CcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let graph = Graph::from_edge_list(text(source, "source")?)?;
        *out = Box::into_raw(Box::new(CcmGraph { graph }));
        Ok(())
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_free(graph: *mut CcmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_node_count(graph: *const CcmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Number of edges; 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_edge_count(graph: *const CcmGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Copies the sorted edge list as `u, v` pairs with `u < v` into `buffer`,
/// which must hold `2 * edge_count` values.
///
/// # Safety
/// `graph` must be a live graph handle and `buffer` must point to `len`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_copy_edges(graph: *const CcmGraph, buffer: *mut u32, len: usize) -> CcmStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let edges = g.graph.sorted_edges();
        let needed = 2 * edges.len();
        if needed == 0 {
            return Ok(());
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        if len < needed {
            return Err(Failure(
                CcmStatus::OutOfRange,
                format!("buffer holds {len} values but {needed} are needed"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, needed);
        for (pair, d) in dst.chunks_mut(2).zip(edges) {
            pair[0] = d.u;
            pair[1] = d.v;
        }
        Ok(())
    })
}

/// Serializes the graph as an edge list; release with [`ccm_string_free`].
///
/// # Safety
/// `graph` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ccm_graph_to_edge_list(graph: *const CcmGraph, out: *mut *mut c_char) -> CcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        *out = owned_string(g.graph.to_edge_list())?;
        Ok(())
    })
}

/// Exact class sizes of every graph on `nodes` nodes. `properties_json` is a
/// JSON array of properties in the config schema, e.g.
/// `["edges"]` or `[{"kind": "degreedist", "max_degree": 3}]`. The result is
/// a JSON object whose `entries` map comma-joined statistic counts to
/// decimal class sizes; release it with [`ccm_string_free`].
///
/// # Safety
/// `properties_json` must be a NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn ccm_enumerate_json(
    nodes: usize,
    properties_json: *const c_char,
    out: *mut *mut c_char,
) -> CcmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let src = text(properties_json, "properties_json")?;
        let value: serde_json::Value = serde_json::from_str(src).map_err(|e| {
            Failure(
                CcmStatus::Parse,
                format!("properties_json: {e} at line {}, column {}", e.line(), e.column()),
            )
        })?;
        let items = value
            .as_array()
            .ok_or_else(|| Failure(CcmStatus::Validation, "properties_json must be a JSON array".into()))?;
        let properties = items
            .iter()
            .enumerate()
            .map(|(i, v)| parse_property(v, &format!("properties[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let table = EnumerationTable::enumerate(nodes, &properties, None)?;
        *out = owned_string(table.to_json().to_string())?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = ccm_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    const CONFIG: &str = r#"{
        "model": {"population": 10, "properties": ["edges"],
                  "distributions": [{"kind": "poisson", "params": [12]}]},
        "sampler": {"burnin": 1000, "interval": 10, "sample_size": 50, "seed": 3}
    }"#;

    #[test]
    fn sample_round_trip() {
        let cfg = CString::new(CONFIG).unwrap();
        let mut s = std::ptr::null_mut();
        let st = unsafe { ccm_sample_run(cfg.as_ptr(), std::ptr::null(), 0, 0, &mut s) };
        assert_eq!(st, CcmStatus::Ok);
        assert!(ccm_last_error_message().is_null());
        unsafe {
            assert_eq!(ccm_sample_rows(s), 50);
            assert_eq!(ccm_sample_columns(s), 1);
            assert_eq!(CStr::from_ptr(ccm_sample_column_name(s, 0)).to_str().unwrap(), "edges");
            assert!(ccm_sample_column_name(s, 1).is_null());
            let mut buf = vec![0.0; 50];
            assert_eq!(ccm_sample_copy_stats(s, buf.as_mut_ptr(), 49), CcmStatus::OutOfRange);
            assert_eq!(ccm_sample_copy_stats(s, buf.as_mut_ptr(), 50), CcmStatus::Ok);
            assert!(buf.iter().all(|&x| (0.0..=45.0).contains(&x) && x.fract() == 0.0));
            let rate = ccm_sample_acceptance_rate(s);
            assert!(rate > 0.0 && rate <= 1.0);

            let mut g = std::ptr::null_mut();
            assert_eq!(ccm_sample_final_graph(s, &mut g), CcmStatus::Ok);
            assert_eq!(ccm_graph_node_count(g), 10);
            assert_eq!(ccm_graph_edge_count(g) as f64, buf[49]);
            ccm_graph_free(g);
            ccm_sample_free(s);
        }
    }

    #[test]
    fn seed_override_is_deterministic() {
        let cfg = CString::new(CONFIG).unwrap();
        let run = |seed| {
            let mut s = std::ptr::null_mut();
            unsafe {
                assert_eq!(ccm_sample_run(cfg.as_ptr(), std::ptr::null(), 1, seed, &mut s), CcmStatus::Ok);
                let mut buf = vec![0.0; 50];
                ccm_sample_copy_stats(s, buf.as_mut_ptr(), buf.len());
                ccm_sample_free(s);
                buf
            }
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn errors_carry_codes_and_messages() {
        let mut s = std::ptr::null_mut();
        let bad = CString::new("{ not json").unwrap();
        assert_eq!(unsafe { ccm_sample_run(bad.as_ptr(), std::ptr::null(), 0, 0, &mut s) }, CcmStatus::Parse);
        assert!(s.is_null());
        assert!(last_error().contains("line"));

        let mismatch = CString::new(
            r#"{"model": {"population": 10, "properties": [{"kind": "degmixing", "max_degree": 3}],
                "distributions": [{"kind": "mvn", "params": [[1, 2], [[1, 0], [0, 1]]]}]}}"#,
        )
        .unwrap();
        assert_eq!(
            unsafe { ccm_sample_run(mismatch.as_ptr(), std::ptr::null(), 0, 0, &mut s) },
            CcmStatus::Validation
        );
        assert!(last_error().contains("degmixing"), "{}", last_error());

        assert_eq!(
            unsafe { ccm_sample_run(std::ptr::null(), std::ptr::null(), 0, 0, &mut s) },
            CcmStatus::NullPointer
        );
        let invalid = [0xffu8, 0];
        assert_eq!(
            unsafe { ccm_sample_run(invalid.as_ptr().cast(), std::ptr::null(), 0, 0, &mut s) },
            CcmStatus::InvalidUtf8
        );
    }

    #[test]
    fn graphs_round_trip() {
        let edges = [0u32, 1, 2, 1, 3, 0];
        let mut g = std::ptr::null_mut();
        unsafe {
            assert_eq!(ccm_graph_from_edges(4, edges.as_ptr(), 3, &mut g), CcmStatus::Ok);
            assert_eq!(ccm_graph_edge_count(g), 3);
            let mut buf = [0u32; 6];
            assert_eq!(ccm_graph_copy_edges(g, buf.as_mut_ptr(), 6), CcmStatus::Ok);
            assert_eq!(buf, [0, 1, 0, 3, 1, 2]);
            let mut text_out = std::ptr::null_mut();
            assert_eq!(ccm_graph_to_edge_list(g, &mut text_out), CcmStatus::Ok);
            let mut h = std::ptr::null_mut();
            assert_eq!(ccm_graph_from_edge_list(text_out, &mut h), CcmStatus::Ok);
            assert_eq!(ccm_graph_edge_count(h), 3);
            ccm_string_free(text_out);
            ccm_graph_free(h);
            ccm_graph_free(g);

            let bad = [0u32, 9];
            assert_eq!(ccm_graph_from_edges(4, bad.as_ptr(), 1, &mut g), CcmStatus::OutOfRange);
            assert!(g.is_null());
            let lp = [2u32, 2];
            assert_eq!(ccm_graph_from_edges(4, lp.as_ptr(), 1, &mut g), CcmStatus::OutOfRange);
        }
    }

    #[test]
    fn enumerate_edge_classes() {
        let props = CString::new(r#"["edges"]"#).unwrap();
        let mut out = std::ptr::null_mut();
        unsafe {
            assert_eq!(ccm_enumerate_json(4, props.as_ptr(), &mut out), CcmStatus::Ok);
            let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            ccm_string_free(out);
            assert_eq!(v["total"], "64");
            assert_eq!(v["entries"]["3"], "20");

            let bad = CString::new(r#"["degreedist"]"#).unwrap();
            assert_eq!(ccm_enumerate_json(4, bad.as_ptr(), &mut out), CcmStatus::Validation);
            let big = CString::new(r#"["edges"]"#).unwrap();
            assert_eq!(ccm_enumerate_json(40, big.as_ptr(), &mut out), CcmStatus::TooLarge);
        }
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(ccm_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
