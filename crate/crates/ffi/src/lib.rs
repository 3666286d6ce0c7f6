//! C interface to `treepack`.
//!
//! Graphs and packings are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`TpStatus`]; on failure the
//! message is available from [`tp_last_error_message`] on the same thread.
//! Vertices are `uint32_t` and edges are passed as flat `u, v` pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use treepack::io::{read_edge_list_file, FormatError};
use treepack::oracle::{self, OracleError};
use treepack::packing::{self, PackingError, PackingResult};
use treepack::random::{self, RandomError};
use treepack::{experiment, Graph, GraphError, Seed};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGraph = 3,
    Io = 4,
    Parse = 5,
    OutOfRange = 6,
    BufferTooSmall = 7,
    Internal = 99,
}

pub struct TpGraph {
    graph: Graph,
}

pub struct TpPacking {
    n: usize,
    result: PackingResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: TpStatus, msg: impl Into<String>) -> TpStatus {
    set_error(msg);
    status
}

trait Status {
    fn status(&self) -> TpStatus;
}

impl Status for GraphError {
    fn status(&self) -> TpStatus {
        TpStatus::InvalidGraph
    }
}

impl Status for OracleError {
    fn status(&self) -> TpStatus {
        match self {
            OracleError::OutOfRange { .. } => TpStatus::OutOfRange,
            OracleError::Graph(_) => TpStatus::InvalidGraph,
            _ => TpStatus::InvalidArgument,
        }
    }
}

impl Status for PackingError {
    fn status(&self) -> TpStatus {
        match self {
            PackingError::Graph(_) => TpStatus::InvalidGraph,
            PackingError::Oracle(e) => e.status(),
            PackingError::CertificateRejected => TpStatus::Internal,
            _ => TpStatus::InvalidArgument,
        }
    }
}

impl Status for RandomError {
    fn status(&self) -> TpStatus {
        match self {
            RandomError::Packing(e) => e.status(),
            _ => TpStatus::InvalidArgument,
        }
    }
}

impl Status for FormatError {
    fn status(&self) -> TpStatus {
        match self {
            FormatError::Io(_) => TpStatus::Io,
            FormatError::Graph(_) => TpStatus::InvalidGraph,
            _ => TpStatus::Parse,
        }
    }
}

fn guard(f: impl FnOnce() -> TpStatus) -> TpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TpStatus::Internal, "panic inside treepack"),
    }
}

fn report<T, E: Status + std::fmt::Display>(r: Result<T, E>, out: impl FnOnce(T)) -> TpStatus {
    match r {
        Ok(v) => {
            out(v);
            TpStatus::Ok
        }
        Err(e) => fail(e.status(), e.to_string()),
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn into_handle(graph: Graph, out: *mut *mut TpGraph) {
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(TpGraph { graph })) };
}

/// Builds a simple graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (or may be NULL when
/// `edge_count` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_new(
    n: usize,
    edges: *const u32,
    edge_count: usize,
    out: *mut *mut TpGraph,
) -> TpStatus {
    guard(|| {
        if out.is_null() || (edges.is_null() && edge_count > 0) {
            return fail(TpStatus::NullPointer, "null argument");
        }
        let flat: &[u32] = if edge_count == 0 { &[] } else { std::slice::from_raw_parts(edges, 2 * edge_count) };
        let pairs = flat.chunks_exact(2).map(|c| (c[0], c[1]));
        report(Graph::new(n, pairs), |g| into_handle(g, out))
    })
}

/// Reads the text edge-list format. Non-numeric labels are renumbered in order of first appearance.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_read(path: *const c_char, out: *mut *mut TpGraph) -> TpStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(TpStatus::NullPointer, "null argument");
        }
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(TpStatus::InvalidArgument, "path is not UTF-8");
        };
        report(read_edge_list_file(Path::new(path)), |lg| into_handle(lg.graph, out))
    })
}

/// Samples `G(n, p)` with the library's deterministic generator.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_sample_gnp(n: usize, p: f64, seed: u64, out: *mut *mut TpGraph) -> TpStatus {
    guard(|| {
        if out.is_null() {
            return fail(TpStatus::NullPointer, "null argument");
        }
        report(random::sample_gnp(n, p, Seed(seed)), |g| into_handle(g, out))
    })
}

/// # Safety
/// `graph` must come from this library and not be freed already, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_free(graph: *mut TpGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn tp_graph_vertex_count(graph: *const TpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.vertex_count())
}

/// # Safety
/// `graph` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn tp_graph_edge_count(graph: *const TpGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_min_degree(graph: *const TpGraph, out: *mut usize) -> TpStatus {
    guard(|| match (graph.as_ref(), out.is_null()) {
        (Some(g), false) => report(g.graph.min_degree(), |d| *out = d),
        _ => fail(TpStatus::NullPointer, "null argument"),
    })
}

/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_graph_max_degree(graph: *const TpGraph, out: *mut usize) -> TpStatus {
    guard(|| match (graph.as_ref(), out.is_null()) {
        (Some(g), false) => report(g.graph.max_degree(), |d| *out = d),
        _ => fail(TpStatus::NullPointer, "null argument"),
    })
}

/// Maximum packing with its trees and, below the trivial upper bound, a certificate partition.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_max_packing(graph: *const TpGraph, out: *mut *mut TpPacking) -> TpStatus {
    guard(|| match (graph.as_ref(), out.is_null()) {
        (Some(g), false) => report(packing::max_packing(&g.graph), |result| {
            *out = Box::into_raw(Box::new(TpPacking { n: g.graph.vertex_count(), result }))
        }),
        _ => fail(TpStatus::NullPointer, "null argument"),
    })
}

/// # Safety
/// `packing` must come from [`tp_max_packing`] and not be freed already, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tp_packing_free(packing: *mut TpPacking) {
    if !packing.is_null() {
        drop(Box::from_raw(packing));
    }
}

/// # Safety
/// `packing` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn tp_packing_sigma(packing: *const TpPacking) -> usize {
    packing.as_ref().map_or(0, |p| p.result.sigma)
}

/// Writes the `n - 1` edges of tree `index` as flat pairs into `buf`, which
/// holds `buf_len` values. `written` receives the number of values needed.
///
/// # Safety
/// `buf` must have room for `buf_len` values; `packing` and `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tp_packing_tree_edges(
    packing: *const TpPacking,
    index: usize,
    buf: *mut u32,
    buf_len: usize,
    written: *mut usize,
) -> TpStatus {
    guard(|| {
        let Some(p) = packing.as_ref() else {
            return fail(TpStatus::NullPointer, "null packing");
        };
        if written.is_null() {
            return fail(TpStatus::NullPointer, "null argument");
        }
        let Some(tree) = p.result.trees.get(index) else {
            return fail(TpStatus::OutOfRange, format!("tree {index} of {}", p.result.trees.len()));
        };
        let need = 2 * tree.len();
        *written = need;
        if buf_len < need || (buf.is_null() && need > 0) {
            return fail(TpStatus::BufferTooSmall, format!("need {need} values"));
        }
        for (i, e) in tree.edges().iter().enumerate() {
            *buf.add(2 * i) = e.u;
            *buf.add(2 * i + 1) = e.v;
        }
        TpStatus::Ok
    })
}

/// Whether the packing carries a certificate partition.
///
/// # Safety
/// `packing` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tp_packing_has_certificate(packing: *const TpPacking) -> bool {
    packing.as_ref().is_some_and(|p| p.result.certificate.is_some())
}

/// Writes the certificate as a block index per vertex into `labels`
/// (`n` values) and the block count into `blocks`.
///
/// # Safety
/// `labels` must have room for `labels_len` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tp_packing_certificate_labels(
    packing: *const TpPacking,
    labels: *mut u32,
    labels_len: usize,
    blocks: *mut usize,
) -> TpStatus {
    guard(|| {
        let Some(p) = packing.as_ref() else {
            return fail(TpStatus::NullPointer, "null packing");
        };
        if blocks.is_null() {
            return fail(TpStatus::NullPointer, "null argument");
        }
        let Some(cert) = &p.result.certificate else {
            return fail(TpStatus::InvalidArgument, "packing has no certificate");
        };
        if labels.is_null() || labels_len < p.n {
            return fail(TpStatus::BufferTooSmall, format!("need {} values", p.n));
        }
        for (b, block) in cert.blocks().iter().enumerate() {
            for &v in block {
                *labels.add(v as usize) = b as u32;
            }
        }
        *blocks = cert.len();
        TpStatus::Ok
    })
}

/// Whether the graph has `k` edge-disjoint spanning trees.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_has_k_spanning_trees(graph: *const TpGraph, k: usize, out: *mut bool) -> TpStatus {
    guard(|| match (graph.as_ref(), out.is_null()) {
        (Some(g), false) => report(packing::has_k_spanning_trees(&g.graph, k), |t| *out = t.is_some()),
        _ => fail(TpStatus::NullPointer, "null argument"),
    })
}

/// Packing number by enumerating all partitions; `n` must be in `2..=12`.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_brute_sigma(graph: *const TpGraph, out: *mut usize) -> TpStatus {
    guard(|| match (graph.as_ref(), out.is_null()) {
        (Some(g), false) => report(oracle::brute_sigma(&g.graph), |s| *out = s),
        _ => fail(TpStatus::NullPointer, "null argument"),
    })
}

/// Seed of one campaign trial, identical to the one the experiment harness uses.
///
/// # Safety
/// `experiment_id` must be a NUL-terminated UTF-8 string of at most 255 bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_derive_trial_seed(
    master: u64,
    experiment_id: *const c_char,
    n: u64,
    p_index: u32,
    trial: u64,
    out: *mut u64,
) -> TpStatus {
    guard(|| {
        if experiment_id.is_null() || out.is_null() {
            return fail(TpStatus::NullPointer, "null argument");
        }
        let id = match CStr::from_ptr(experiment_id).to_str() {
            Ok(s) if s.len() <= 255 => s,
            _ => return fail(TpStatus::InvalidArgument, "experiment id must be UTF-8 of at most 255 bytes"),
        };
        *out = experiment::derive_trial_seed(Seed(master), id, n, p_index, trial).0;
        TpStatus::Ok
    })
}
