#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sailfree::{make_system, LinearTripleSystem};

pub fn all_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Random accepted-edge process: triples in random order, each kept when it
/// shares at most one vertex with every kept triple. Stops after `steps`
/// candidates.
pub fn random_linear<R: Rng>(rng: &mut R, n: usize, steps: usize) -> LinearTripleSystem {
    let mut ts = all_triples(n);
    ts.shuffle(rng);
    let mut covered = vec![vec![false; n]; n];
    let mut kept = Vec::new();
    for t in ts.into_iter().take(steps) {
        let [a, b, c] = t;
        if covered[a][b] || covered[a][c] || covered[b][c] {
            continue;
        }
        for (u, v) in [(a, b), (a, c), (b, c)] {
            covered[u][v] = true;
            covered[v][u] = true;
        }
        kept.push(t);
    }
    make_system(n, kept).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
