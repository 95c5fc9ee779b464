use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pillow_ffi::*;

fn built(level: u32) -> *mut PillowGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { pillow_graph_build(level, true, &mut g) }, PillowStatus::Ok);
    assert!(!g.is_null());
    g
}

fn last_error() -> String {
    let p = pillow_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn counts_and_distances() {
    let g = built(2);
    let (mut v, mut e) = (0, 0);
    unsafe {
        assert_eq!(pillow_graph_vertex_count(g, &mut v), PillowStatus::Ok);
        assert_eq!(pillow_graph_edge_count(g, &mut e), PillowStatus::Ok);
    }
    assert_eq!((v, e), (100, 226));

    let word = CString::new("55").unwrap();
    let mut u = 0;
    assert_eq!(unsafe { pillow_graph_index_of(g, word.as_ptr(), &mut u) }, PillowStatus::Ok);
    let mut buf = [0 as std::ffi::c_char; 8];
    let mut needed = 0;
    assert_eq!(unsafe { pillow_graph_word(g, u, buf.as_mut_ptr(), buf.len(), &mut needed) }, PillowStatus::Ok);
    assert_eq!(needed, 3);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "55");
    assert_eq!(
        unsafe { pillow_graph_word(g, u, buf.as_mut_ptr(), 2, &mut needed) },
        PillowStatus::BufferTooSmall
    );

    let other = CString::new("50").unwrap();
    let mut w = 0;
    let mut d = 0;
    unsafe {
        assert_eq!(pillow_graph_index_of(g, other.as_ptr(), &mut w), PillowStatus::Ok);
        assert_eq!(pillow_graph_distance(g, u, w, &mut d), PillowStatus::Ok);
    }
    assert_eq!(d, 1);
    unsafe { pillow_graph_free(g) };
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { pillow_graph_build(7, true, &mut g) }, PillowStatus::Capacity);
    assert!(g.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { pillow_graph_build(1, true, ptr::null_mut()) }, PillowStatus::NullPointer);
    let mut n = 0;
    assert_eq!(unsafe { pillow_graph_vertex_count(ptr::null(), &mut n) }, PillowStatus::NullPointer);
    assert!(last_error().contains("graph"));

    let g = built(1);
    let bad = CString::new("5x").unwrap();
    let mut u = 0;
    assert_eq!(unsafe { pillow_graph_index_of(g, bad.as_ptr(), &mut u) }, PillowStatus::InvalidArgument);
    let mut d = 0;
    assert_eq!(unsafe { pillow_graph_distance(g, 0, 10, &mut d) }, PillowStatus::InvalidArgument);
    assert_eq!(unsafe { pillow_graph_vertex_count(g, &mut n) }, PillowStatus::Ok);
    assert!(pillow_last_error().is_null());
    let missing = CString::new("/nonexistent/graph.json").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pillow_graph_load(missing.as_ptr(), &mut h) }, PillowStatus::Io);
    unsafe {
        pillow_graph_free(g);
        pillow_graph_free(ptr::null_mut());
    }
}

#[test]
fn modulus_of_level_one() {
    let g = built(1);
    let mut r = PillowModulus::default();
    let s = unsafe { pillow_graph_modulus(g, PillowSide::Left, PillowSide::Right, 1.0, 0.0, &mut r) };
    assert_eq!(s, PillowStatus::Ok);
    assert_eq!((r.value_lower, r.value_upper, r.converged), (4.0, 4.0, true));
    let s = unsafe { pillow_graph_modulus(g, PillowSide::Left, PillowSide::Right, 2.0, 1e-8, &mut r) };
    assert_eq!(s, PillowStatus::Ok);
    assert!(r.converged && (r.value_lower - 2.0).abs() < 1e-7 && (r.value_upper - 2.0).abs() < 1e-7);
    let s = unsafe { pillow_graph_modulus(g, PillowSide::Left, PillowSide::Left, 2.0, 0.0, &mut r) };
    assert_eq!(s, PillowStatus::InvalidArgument);
    unsafe { pillow_graph_free(g) };
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(pillow_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/pillow.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct PillowGraph PillowGraph;",
        "pillow_graph_build(",
        "pillow_graph_free(",
        "pillow_graph_modulus(",
        "pillow_last_error(",
        "PILLOW_STATUS_BUFFER_TOO_SMALL = 7",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "pillow.h"
int main(void) {
    PillowGraph *g = NULL;
    size_t n = 0;
    if (pillow_graph_build(3, true, &g) != PILLOW_STATUS_OK) return 1;
    if (pillow_graph_vertex_count(g, &n) != PILLOW_STATUS_OK || n != 1000) return 2;
    if (pillow_graph_build(7, true, &g) != PILLOW_STATUS_CAPACITY) return 3;
    if (pillow_last_error() == NULL) return 4;
    pillow_graph_free(g);
    printf("%s\n", pillow_version());
    return 0;
}
"#;

/// Compiles a C client against the header and, when cargo has produced it,
/// links it with the static library.
#[test]
fn c_client() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("client.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());

    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libpillow_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link step skipped", lib.display());
        return;
    }
    let exe = dir.join("client");
    let status = Command::new("cc")
        .args(["-std=c11", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{run:?}");
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), env!("CARGO_PKG_VERSION"));
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pillow-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
