use std::ffi::{CStr, CString};
use std::ptr;

use treepack_ffi::*;

fn graph(n: usize, edges: &[(u32, u32)]) -> *mut TpGraph {
    let flat: Vec<u32> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tp_graph_new(n, flat.as_ptr(), edges.len(), &mut g) }, TpStatus::Ok);
    g
}

fn complete(n: u32) -> *mut TpGraph {
    let edges: Vec<(u32, u32)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    graph(n as usize, &edges)
}

fn last_error() -> String {
    let p = tp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn packing_round_trip() {
    let g = complete(6);
    unsafe {
        assert_eq!(tp_graph_vertex_count(g), 6);
        assert_eq!(tp_graph_edge_count(g), 15);
        let mut pk = ptr::null_mut();
        assert_eq!(tp_max_packing(g, &mut pk), TpStatus::Ok);
        assert_eq!(tp_packing_sigma(pk), 3);

        let mut seen = std::collections::HashSet::new();
        for t in 0..3 {
            let mut buf = [0u32; 10];
            let mut written = 0;
            assert_eq!(tp_packing_tree_edges(pk, t, buf.as_mut_ptr(), buf.len(), &mut written), TpStatus::Ok);
            assert_eq!(written, 10);
            for e in buf.chunks(2) {
                assert!(seen.insert((e[0], e[1])));
            }
        }
        let mut written = 0;
        assert_eq!(tp_packing_tree_edges(pk, 3, ptr::null_mut(), 0, &mut written), TpStatus::OutOfRange);
        let mut small = [0u32; 3];
        assert_eq!(tp_packing_tree_edges(pk, 0, small.as_mut_ptr(), 3, &mut written), TpStatus::BufferTooSmall);
        assert_eq!(written, 10);

        assert!(tp_packing_has_certificate(pk));
        let mut labels = [u32::MAX; 6];
        let mut blocks = 0;
        assert_eq!(tp_packing_certificate_labels(pk, labels.as_mut_ptr(), 6, &mut blocks), TpStatus::Ok);
        assert!(blocks >= 2);
        assert!(labels.iter().all(|&l| (l as usize) < blocks));

        let mut brute = 0;
        assert_eq!(tp_brute_sigma(g, &mut brute), TpStatus::Ok);
        assert_eq!(brute, 3);
        let mut has = false;
        assert_eq!(tp_has_k_spanning_trees(g, 4, &mut has), TpStatus::Ok);
        assert!(!has);

        tp_packing_free(pk);
        tp_graph_free(g);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        let loop_edge = [1u32, 1];
        assert_eq!(tp_graph_new(3, loop_edge.as_ptr(), 1, &mut g), TpStatus::InvalidGraph);
        assert!(g.is_null());
        assert!(last_error().contains("loop"));

        let out_of_range = [0u32, 7];
        assert_eq!(tp_graph_new(3, out_of_range.as_ptr(), 1, &mut g), TpStatus::InvalidGraph);
        assert_eq!(tp_graph_new(3, ptr::null(), 1, &mut g), TpStatus::NullPointer);
        assert_eq!(tp_sample_gnp(10, 1.5, 0, &mut g), TpStatus::InvalidArgument);

        let missing = CString::new("/nonexistent/graph.txt").unwrap();
        assert_eq!(tp_graph_read(missing.as_ptr(), &mut g), TpStatus::Io);

        let big = complete(13);
        let mut s = 0;
        assert_eq!(tp_brute_sigma(big, &mut s), TpStatus::OutOfRange);
        tp_graph_free(big);

        let mut has = false;
        let tri = complete(3);
        assert_eq!(tp_has_k_spanning_trees(tri, 0, &mut has), TpStatus::InvalidArgument);
        assert_eq!(tp_max_packing(ptr::null(), &mut ptr::null_mut()), TpStatus::NullPointer);
        tp_graph_free(tri);

        assert_eq!(tp_graph_vertex_count(ptr::null()), 0);
        tp_graph_free(ptr::null_mut());
        tp_packing_free(ptr::null_mut());
    }
}

#[test]
fn read_sample_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, "4 4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(tp_graph_read(c.as_ptr(), &mut g), TpStatus::Ok);
        let (mut lo, mut hi) = (0, 0);
        assert_eq!(tp_graph_min_degree(g, &mut lo), TpStatus::Ok);
        assert_eq!(tp_graph_max_degree(g, &mut hi), TpStatus::Ok);
        assert_eq!((lo, hi), (2, 2));
        let mut pk = ptr::null_mut();
        assert_eq!(tp_max_packing(g, &mut pk), TpStatus::Ok);
        assert_eq!(tp_packing_sigma(pk), 1);
        tp_packing_free(pk);
        tp_graph_free(g);

        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(tp_sample_gnp(40, 0.2, 9, &mut a), TpStatus::Ok);
        assert_eq!(tp_sample_gnp(40, 0.2, 9, &mut b), TpStatus::Ok);
        assert_eq!(tp_graph_edge_count(a), tp_graph_edge_count(b));
        tp_graph_free(a);
        tp_graph_free(b);

        let id = CString::new("equality").unwrap();
        let mut seed = 0;
        assert_eq!(tp_derive_trial_seed(0, id.as_ptr(), 4, 0, 0, &mut seed), TpStatus::Ok);
        assert_eq!(seed, 12654445760312492793);
    }
    let v = unsafe { CStr::from_ptr(tp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
