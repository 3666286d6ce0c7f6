use proptest::prelude::*;

use treepack::oracle::{brute_sigma, find_violation, nw_check};
use treepack::packing::{extract_certificate, has_k_spanning_trees, max_packing, upper_bound, verify_packing};
use treepack::Graph;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=9).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v))).collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()).prop_map(move |es| Graph::new(n, es).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn packing_matches_enumeration(g in graph_strategy()) {
        let res = max_packing(&g).unwrap();
        prop_assert_eq!(res.sigma, brute_sigma(&g).unwrap());
        prop_assert!(res.sigma <= upper_bound(&g));
        verify_packing(&g, &res.trees).unwrap();
        let cert = res.certificate.expect("n >= 2 always has a certificate");
        prop_assert!(!nw_check(&g, res.sigma + 1, &cert).unwrap());
    }

    #[test]
    fn decision_agrees_with_enumeration(g in graph_strategy(), k in 1usize..5) {
        let trees = has_k_spanning_trees(&g, k).unwrap();
        let violation = find_violation(&g, k).unwrap();
        prop_assert_eq!(trees.is_some(), violation.is_none());
        match trees {
            Some(t) => verify_packing(&g, &t).unwrap(),
            None => {
                let p = extract_certificate(&g, k).unwrap();
                prop_assert!(!nw_check(&g, k, &p).unwrap());
            }
        }
    }
}
