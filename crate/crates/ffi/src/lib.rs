//! C interface: opaque graph handles, status codes and a thread-local
//! error message.
//!
//! Every function returns a [`PillowStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`pillow_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use pillow_core::graph::io as graph_io;
use pillow_core::modulus::{solve_modulus, CurveEndpoints, ModulusProblem, Network};
use pillow_core::{CentralEdgePolicy, Error, ReplacementGraph, Side, Word};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PillowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    Format = 4,
    Io = 5,
    Consistency = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PillowSide {
    Left = 0,
    Right = 1,
    Bottom = 2,
    Top = 3,
}

impl From<PillowSide> for Side {
    fn from(s: PillowSide) -> Side {
        match s {
            PillowSide::Left => Side::Left,
            PillowSide::Right => Side::Right,
            PillowSide::Bottom => Side::Bottom,
            PillowSide::Top => Side::Top,
        }
    }
}

/// Opaque replacement graph.
pub struct PillowGraph {
    inner: ReplacementGraph,
}

/// Certified modulus bounds.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PillowModulus {
    pub value_lower: f64,
    pub value_upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> PillowStatus {
    match e {
        Error::Parse { .. } | Error::Domain(_) => PillowStatus::InvalidArgument,
        Error::Capacity { .. } => PillowStatus::Capacity,
        Error::Format(_) => PillowStatus::Format,
        Error::Io { .. } => PillowStatus::Io,
        Error::Consistency(_) => PillowStatus::Consistency,
    }
}

struct Fail(PillowStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PillowStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PillowStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PillowStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PillowStatus::Panic
        }
    }
}

unsafe fn graph<'a>(g: *const PillowGraph) -> Result<&'a ReplacementGraph, Fail> {
    // SAFETY: the caller passes a handle from pillow_graph_build or null.
    unsafe { g.as_ref() }.map(|g| &g.inner).ok_or_else(|| null("graph"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    // SAFETY: the caller passes a valid writable pointer or null.
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the contract, nul-terminated.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Fail(PillowStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn vertex(g: &ReplacementGraph, u: usize) -> Result<usize, Fail> {
    if u < g.vertex_count() {
        Ok(u)
    } else {
        Err(Fail(
            PillowStatus::InvalidArgument,
            format!("vertex {u} out of range 0..{}", g.vertex_count()),
        ))
    }
}

/// Library version, a static nul-terminated string.
#[no_mangle]
pub extern "C" fn pillow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn pillow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Builds `G_level`. `central_edges` selects the central-edge policy.
///
/// # Safety
/// `out_graph` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_build(level: u32, central_edges: bool, out_graph: *mut *mut PillowGraph) -> PillowStatus {
    guard(|| {
        let slot = unsafe { out(out_graph, "out_graph") }?;
        let policy = if central_edges { CentralEdgePolicy::On } else { CentralEdgePolicy::Off };
        let g = ReplacementGraph::build(level, policy)?;
        *slot = Box::into_raw(Box::new(PillowGraph { inner: g }));
        Ok(())
    })
}

/// Loads a graph file in either format.
///
/// # Safety
/// `path` must be null or nul-terminated; `out_graph` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_load(path: *const c_char, out_graph: *mut *mut PillowGraph) -> PillowStatus {
    guard(|| {
        let slot = unsafe { out(out_graph, "out_graph") }?;
        let path = unsafe { text(path, "path") }?;
        let g = graph_io::load(Path::new(path))?;
        *slot = Box::into_raw(Box::new(PillowGraph { inner: g }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_free(g: *mut PillowGraph) {
    if !g.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be a live handle or null; `n` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_vertex_count(g: *const PillowGraph, n: *mut usize) -> PillowStatus {
    guard(|| {
        *unsafe { out(n, "n") }? = unsafe { graph(g) }?.vertex_count();
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle or null; `n` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_edge_count(g: *const PillowGraph, n: *mut usize) -> PillowStatus {
    guard(|| {
        *unsafe { out(n, "n") }? = unsafe { graph(g) }?.edge_count();
        Ok(())
    })
}

/// Hop distance between two vertices.
///
/// # Safety
/// `g` must be a live handle or null; `d` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_distance(g: *const PillowGraph, u: usize, v: usize, d: *mut u32) -> PillowStatus {
    guard(|| {
        let g = unsafe { graph(g) }?;
        let slot = unsafe { out(d, "d") }?;
        let (u, v) = (vertex(g, u)?, vertex(g, v)?);
        *slot = g
            .distance(u, v)
            .ok_or_else(|| Fail(PillowStatus::Consistency, "graph is disconnected".into()))?;
        Ok(())
    })
}

/// Writes the word of vertex `u` into `buf` with a trailing nul. `needed`
/// receives the buffer size required, nul included.
///
/// # Safety
/// `buf` must be null or hold `len` bytes; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_word(
    g: *const PillowGraph,
    u: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> PillowStatus {
    guard(|| {
        let g = unsafe { graph(g) }?;
        let word = g.word(vertex(g, u)?).to_string();
        if let Some(n) = unsafe { needed.as_mut() } {
            *n = word.len() + 1;
        }
        if buf.is_null() || len < word.len() + 1 {
            return Err(Fail(PillowStatus::BufferTooSmall, format!("word needs {} bytes", word.len() + 1)));
        }
        // SAFETY: buf holds at least word.len() + 1 bytes.
        unsafe {
            std::ptr::copy_nonoverlapping(word.as_ptr().cast(), buf, word.len());
            *buf.add(word.len()) = 0;
        }
        Ok(())
    })
}

/// Index of the vertex with the given word.
///
/// # Safety
/// `word` must be null or nul-terminated; `u` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_index_of(g: *const PillowGraph, word: *const c_char, u: *mut usize) -> PillowStatus {
    guard(|| {
        let g = unsafe { graph(g) }?;
        let slot = unsafe { out(u, "u") }?;
        let w: Word = unsafe { text(word, "word") }?.parse()?;
        *slot = g.vertex(&w)?;
        Ok(())
    })
}

/// Certified p-modulus of the curves joining two sides. `tolerance` of 0
/// selects the default.
///
/// # Safety
/// `g` must be a live handle or null; `result` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pillow_graph_modulus(
    g: *const PillowGraph,
    from: PillowSide,
    to: PillowSide,
    p: f64,
    tolerance: f64,
    result: *mut PillowModulus,
) -> PillowStatus {
    guard(|| {
        let g = unsafe { graph(g) }?;
        let slot = unsafe { out(result, "result") }?;
        let net = Network::from_graph(g);
        let ends = CurveEndpoints::sides(g, from.into(), to.into())?;
        let mut prob = ModulusProblem::new(&net, ends, p);
        if tolerance != 0.0 {
            prob = prob.with_tolerance(tolerance);
        }
        let r = solve_modulus(&prob)?;
        *slot = PillowModulus {
            value_lower: r.value_lower,
            value_upper: r.value_upper,
            iterations: r.iterations,
            converged: r.converged,
        };
        Ok(())
    })
}
