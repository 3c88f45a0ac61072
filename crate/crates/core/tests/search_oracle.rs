mod common;

use std::collections::BTreeSet;

use sailfree::search::SearchError;
use sailfree::{canonical_form, enumerate_extremal, make_system, max_sail_free, upper_bound, CanonicalForm, SailGuard, SearchOptions, Triple};

/// Every labeled sail-free system on `n` vertices, grouped by edge count,
/// by plain DFS without symmetry breaking.
fn labeled_classes(n: usize) -> Vec<BTreeSet<CanonicalForm>> {
    let all: Vec<Triple> = common::all_triples(n)
        .into_iter()
        .map(|[a, b, c]| Triple::new(a, b, c).unwrap())
        .collect();
    let mut by_size = vec![BTreeSet::new(); upper_bound(n) + 2];
    fn walk(g: &mut SailGuard, all: &[Triple], from: usize, out: &mut Vec<BTreeSet<CanonicalForm>>) {
        out[g.len()].insert(canonical_form(&g.to_system()));
        for i in from..all.len() {
            if g.try_push(all[i]) {
                walk(g, all, i + 1, out);
                g.pop().unwrap();
            }
        }
    }
    walk(&mut SailGuard::new(n), &all, 0, &mut by_size);
    by_size
}

#[test]
fn enumeration_matches_labeled_dfs() {
    let opts = SearchOptions::default();
    for n in 3..=7 {
        let truth = labeled_classes(n);
        let max = truth.iter().rposition(|s| !s.is_empty()).unwrap();
        assert_eq!(max_sail_free(n, &opts).unwrap().max_edges, max, "n={n}");
        for (m, classes) in truth.iter().enumerate().skip(1) {
            assert_eq!(&enumerate_extremal(n, m, &opts).unwrap(), classes, "n={n} m={m}");
        }
    }
}

#[test]
fn maxima_are_monotone_and_bounded() {
    let opts = SearchOptions::default();
    let mut prev = 0;
    for n in 3..=10 {
        let r = max_sail_free(n, &opts).unwrap();
        assert!(r.exhausted);
        assert!(r.max_edges >= prev, "n={n}");
        assert!(r.max_edges <= upper_bound(n));
        assert_eq!(r.witness.edge_count(), r.max_edges);
        prev = r.max_edges;
    }
}

#[test]
fn worker_counts_agree_at_ten() {
    let one = max_sail_free(10, &SearchOptions::default()).unwrap();
    let four = max_sail_free(10, &SearchOptions::default().with_workers(4)).unwrap();
    assert_eq!((one.max_edges, four.max_edges), (10, 10));
    let classes = enumerate_extremal(10, 10, &SearchOptions::default().with_workers(3)).unwrap();
    assert_eq!(classes, enumerate_extremal(10, 10, &SearchOptions::default()).unwrap());
}

#[test]
fn nothing_beats_the_maximum() {
    let opts = SearchOptions::default();
    assert!(enumerate_extremal(9, 10, &opts).unwrap().is_empty());
    assert!(enumerate_extremal(10, 11, &opts).unwrap().is_empty());
    let r = max_sail_free(10, &opts.clone().with_target(11)).unwrap();
    assert_eq!(r.max_edges, 10);
    assert!(r.exhausted);
}

#[test]
fn limits() {
    let opts = SearchOptions::default().with_node_limit(50_000);
    match max_sail_free(10, &opts) {
        Err(SearchError::LimitExceeded(r)) => {
            assert!(!r.exhausted);
            assert!(r.witness.edge_count() == r.max_edges);
        }
        other => panic!("expected a limit, got {other:?}"),
    }
    let quick = SearchOptions::default().with_time_limit(std::time::Duration::ZERO);
    assert!(matches!(max_sail_free(10, &quick), Err(SearchError::LimitExceeded(_))));
    assert!(matches!(
        enumerate_extremal(10, 10, &SearchOptions::default().with_node_limit(100)),
        Err(SearchError::EnumerationLimitExceeded { .. })
    ));
}

#[test]
fn transversal_design_is_the_only_six_vertex_maximum() {
    let classes = enumerate_extremal(6, 4, &SearchOptions::default()).unwrap();
    let td = make_system(6, [[0, 2, 4], [0, 3, 5], [1, 2, 5], [1, 3, 4]]).unwrap();
    assert_eq!(classes.into_iter().collect::<Vec<_>>(), vec![canonical_form(&td)]);
}
