//! Sail (3-fan) detection.
//!
//! A sail is four edges `f1, f2, f3, g` where the `fi` pairwise meet exactly
//! in an apex `v` and `g` avoids `v` while meeting every `fi`. In a linear
//! system this happens exactly when some edge lies inside `N(v)` for a vertex
//! `v` outside it, which is what [`find_sail_fast`] and [`SailGuard`] test.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::system::{LinearTripleSystem, Triple, Vertex, VertexSet, MAX_VERTICES};

/// Four edges certifying a sail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SailWitness {
    pub apex: Vertex,
    pub fans: [Triple; 3],
    pub crossbar: Triple,
}

impl SailWitness {
    /// Checks the defining incidences, independent of any host system.
    pub fn is_valid(&self) -> bool {
        let v = self.apex;
        if self.crossbar.contains(v) || !self.fans.iter().all(|f| f.contains(v)) {
            return false;
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if (self.fans[i].mask() & self.fans[j].mask()) != VertexSet::singleton(v) {
                    return false;
                }
            }
        }
        self.fans
            .iter()
            .all(|f| f.intersection_size(&self.crossbar) == 1)
    }

    /// True when all four edges are edges of `h`.
    pub fn is_in(&self, h: &LinearTripleSystem) -> bool {
        h.contains_edge(&self.crossbar) && self.fans.iter().all(|f| h.contains_edge(f))
    }
}

impl fmt::Display for SailWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sail at apex {}: fans {} {} {}, crossbar {}",
            self.apex, self.fans[0], self.fans[1], self.fans[2], self.crossbar
        )
    }
}

/// Tries every 4-subset of edges and every choice of crossbar in it.
/// Returns the witness with the smallest `(apex, crossbar)`.
pub fn find_sail_bruteforce(h: &LinearTripleSystem) -> Option<SailWitness> {
    let mut best: Option<SailWitness> = None;
    for_each_sail(h, |w| {
        if best.is_none_or(|b| (w.apex, w.crossbar) < (b.apex, b.crossbar)) {
            best = Some(w);
        }
    });
    best
}

/// Number of (4-edge subset, crossbar) pairs forming a sail.
pub fn count_sails_bruteforce(h: &LinearTripleSystem) -> usize {
    let mut count = 0;
    for_each_sail(h, |_| count += 1);
    count
}

fn for_each_sail(h: &LinearTripleSystem, mut visit: impl FnMut(SailWitness)) {
    let e = h.edges();
    let m = e.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in k + 1..m {
                    let four = [e[i], e[j], e[k], e[l]];
                    for g in 0..4 {
                        let mut fans = [four[0]; 3];
                        let mut slot = 0;
                        for (idx, f) in four.iter().enumerate() {
                            if idx != g {
                                fans[slot] = *f;
                                slot += 1;
                            }
                        }
                        let common = fans[0].mask() & fans[1].mask() & fans[2].mask();
                        if common.len() != 1 {
                            continue;
                        }
                        let w = SailWitness {
                            apex: common.lowest().unwrap(),
                            fans,
                            crossbar: four[g],
                        };
                        if w.is_valid() {
                            visit(w);
                        }
                    }
                }
            }
        }
    }
}

/// Searches for a vertex `v` and an edge `g ⊆ N(v)`. Apexes are scanned in
/// increasing order and crossbars in edge order, so the result is the
/// lexicographically first witness.
pub fn find_sail_fast(h: &LinearTripleSystem) -> Option<SailWitness> {
    let nbr = h.neighborhoods();
    for (v, &nv) in nbr.iter().enumerate() {
        if nv.len() < 3 {
            continue;
        }
        if let Some(g) = h.edges().iter().find(|g| g.mask().is_subset(&nv)) {
            return Some(witness_from_crossbar(h.edges(), v, *g));
        }
    }
    None
}

/// Given `g ⊆ N(v)`, picks the edge through `v` and each vertex of `g`.
fn witness_from_crossbar<'a>(
    edges: impl IntoIterator<Item = &'a Triple> + Clone,
    apex: Vertex,
    crossbar: Triple,
) -> SailWitness {
    let fans = crossbar.vertices().map(|u| {
        *edges
            .clone()
            .into_iter()
            .find(|e| e.contains(apex) && e.contains(u))
            .expect("crossbar vertex lies in N(apex)")
    });
    let w = SailWitness {
        apex,
        fans,
        crossbar,
    };
    debug_assert!(w.is_valid());
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("vertex {vertex} is out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("pair {{{}, {}}} is already covered by {existing}", pair.0, pair.1)]
    LinearityViolation { pair: (Vertex, Vertex), existing: Triple },
    #[error("{0}")]
    SailCreated(SailWitness),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the guard holds no edges")]
pub struct EmptyStack;

/// Incrementally maintained linear, sail-free edge set.
///
/// `covered` is the symmetric pair-coverage matrix: bit `u` of row `v` is set
/// iff `uv` lies in an edge. Row `v` is therefore also `N(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SailGuard {
    n: usize,
    stack: Vec<Triple>,
    covered: [u64; MAX_VERTICES],
    incident: Vec<Vec<Triple>>,
}

impl SailGuard {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        SailGuard {
            n,
            stack: Vec::new(),
            covered: [0; MAX_VERTICES],
            incident: vec![Vec::new(); n],
        }
    }

    /// Recomputes every derived field from the edge stack alone.
    pub fn rebuild(&self) -> SailGuard {
        let mut g = SailGuard::new(self.n);
        for &t in &self.stack {
            g.commit(t);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Triple] {
        &self.stack
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn last(&self) -> Option<Triple> {
        self.stack.last().copied()
    }

    pub fn neighborhood(&self, v: Vertex) -> VertexSet {
        VertexSet(self.covered[v])
    }

    pub fn is_covered(&self, u: Vertex, v: Vertex) -> bool {
        self.covered[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.incident[v].len()
    }

    /// Linearity test only: all three pairs of `t` uncovered.
    #[inline]
    pub fn is_compatible(&self, t: &Triple) -> bool {
        let [a, b, c] = t.vertices();
        (self.covered[a] >> b | self.covered[a] >> c | self.covered[b] >> c) & 1 == 0
    }

    pub fn to_system(&self) -> LinearTripleSystem {
        crate::system::make_system(self.n, self.stack.iter().map(Triple::vertices))
            .expect("guard stack is always linear")
    }

    /// Adds `t` if the result stays linear and sail-free.
    pub fn push(&mut self, t: Triple) -> Result<(), Rejection> {
        if t.highest() >= self.n {
            return Err(Rejection::VertexOutOfRange {
                vertex: t.highest(),
                n: self.n,
            });
        }
        if !self.is_compatible(&t) {
            let (u, v) = t
                .pairs()
                .into_iter()
                .find(|&(u, v)| self.is_covered(u, v))
                .unwrap();
            let existing = *self.incident[u].iter().find(|e| e.contains(v)).unwrap();
            return Err(Rejection::LinearityViolation {
                pair: (u, v),
                existing,
            });
        }
        if let Some(w) = self.sail_after(t) {
            return Err(Rejection::SailCreated(w));
        }
        self.commit(t);
        Ok(())
    }

    /// Like [`push`](Self::push) but without building a witness on failure.
    #[inline]
    pub fn try_push(&mut self, t: Triple) -> bool {
        if self.is_compatible(&t) && !self.creates_sail(&t) {
            self.commit(t);
            true
        } else {
            false
        }
    }

    pub fn pop(&mut self) -> Result<Triple, EmptyStack> {
        let t = self.stack.pop().ok_or(EmptyStack)?;
        for (u, v) in t.pairs() {
            self.covered[u] &= !(1 << v);
            self.covered[v] &= !(1 << u);
        }
        for v in t.vertices() {
            let popped = self.incident[v].pop();
            debug_assert_eq!(popped, Some(t));
        }
        Ok(t)
    }

    fn commit(&mut self, t: Triple) {
        for (u, v) in t.pairs() {
            self.covered[u] |= 1 << v;
            self.covered[v] |= 1 << u;
        }
        for v in t.vertices() {
            self.incident[v].push(t);
        }
        self.stack.push(t);
    }

    /// Sail test for a linear-compatible `t`. Two ways a sail can appear:
    /// `t` lands inside some `N(v)`, or a member of `t` gains two new
    /// neighbors that complete an existing edge inside its neighborhood.
    #[inline]
    fn creates_sail(&self, t: &Triple) -> bool {
        let [x, y, z] = t.vertices();
        if self.covered[x] & self.covered[y] & self.covered[z] != 0 {
            return true;
        }
        self.apex_gains_edge(x, y, z).is_some()
            || self.apex_gains_edge(y, x, z).is_some()
            || self.apex_gains_edge(z, x, y).is_some()
    }

    /// With `v` gaining neighbors `p` and `q`, an edge through `p` (or `q`)
    /// whose other two vertices are old neighbors of `v` becomes a crossbar.
    #[inline]
    fn apex_gains_edge(&self, v: Vertex, p: Vertex, q: Vertex) -> Option<Triple> {
        let nv = self.covered[v];
        for &u in &[p, q] {
            for h in &self.incident[u] {
                let rest = h.mask().0 & !(1u64 << u);
                if rest & !nv == 0 {
                    return Some(*h);
                }
            }
        }
        None
    }

    fn sail_after(&self, t: Triple) -> Option<SailWitness> {
        let [x, y, z] = t.vertices();
        let common = VertexSet(self.covered[x] & self.covered[y] & self.covered[z]);
        if let Some(v) = common.lowest() {
            return Some(witness_from_crossbar(self.incident[v].iter(), v, t));
        }
        for (v, p, q) in [(x, y, z), (y, x, z), (z, x, y)] {
            if let Some(h) = self.apex_gains_edge(v, p, q) {
                let edges = self.incident[v].iter().chain(std::iter::once(&t));
                return Some(witness_from_crossbar(edges, v, h));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::make_system;

    fn t(a: usize, b: usize, c: usize) -> Triple {
        Triple::new(a, b, c).unwrap()
    }

    fn sail7() -> LinearTripleSystem {
        make_system(7, [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5]]).unwrap()
    }

    #[test]
    fn detectors_on_sail7() {
        let h = sail7();
        for w in [find_sail_bruteforce(&h).unwrap(), find_sail_fast(&h).unwrap()] {
            assert_eq!(w.apex, 0);
            assert_eq!(w.crossbar, t(1, 3, 5));
            assert_eq!(w.fans, [t(0, 1, 2), t(0, 3, 4), t(0, 5, 6)]);
            assert!(w.is_valid() && w.is_in(&h));
        }
        assert_eq!(count_sails_bruteforce(&h), 1);
    }

    #[test]
    fn three_edges_never_form_a_sail() {
        let h = make_system(7, [[0, 1, 2], [0, 3, 4], [0, 5, 6]]).unwrap();
        assert!(find_sail_bruteforce(&h).is_none());
        assert!(find_sail_fast(&h).is_none());
    }

    #[test]
    fn witness_validation_rejects_bad_shapes() {
        let mut w = find_sail_fast(&sail7()).unwrap();
        assert!(w.is_valid());
        w.crossbar = t(0, 1, 3);
        assert!(!w.is_valid());
    }

    #[test]
    fn guard_push_examples() {
        let mut g = SailGuard::new(7);
        assert_eq!(g.push(t(0, 1, 2)), Ok(()));
        assert!(matches!(
            g.push(t(0, 1, 3)),
            Err(Rejection::LinearityViolation { pair: (0, 1), .. })
        ));
        assert_eq!(g.len(), 1);

        let mut g = SailGuard::new(7);
        for e in [t(0, 1, 2), t(0, 3, 4), t(0, 5, 6)] {
            g.push(e).unwrap();
        }
        let before = g.clone();
        match g.push(t(1, 3, 5)) {
            Err(Rejection::SailCreated(w)) => {
                assert_eq!(w.apex, 0);
                assert_eq!(w.crossbar, t(1, 3, 5));
            }
            other => panic!("expected a sail, got {other:?}"),
        }
        assert_eq!(g, before);
    }

    #[test]
    fn guard_detects_sail_when_apex_edge_arrives_last() {
        let mut g = SailGuard::new(7);
        for e in [t(1, 3, 5), t(0, 1, 2), t(0, 3, 4)] {
            g.push(e).unwrap();
        }
        match g.push(t(0, 5, 6)) {
            Err(Rejection::SailCreated(w)) => {
                assert!(w.is_valid());
                assert_eq!(w.apex, 0);
                assert_eq!(w.crossbar, t(1, 3, 5));
            }
            other => panic!("expected a sail, got {other:?}"),
        }
    }

    #[test]
    fn guard_pop_restores() {
        let fresh = SailGuard::new(6);
        let mut g = fresh.clone();
        g.push(t(0, 1, 2)).unwrap();
        assert_eq!(g.pop(), Ok(t(0, 1, 2)));
        assert_eq!(g, fresh);
        g.push(t(0, 1, 2)).unwrap();
        g.push(t(0, 3, 4)).unwrap();
        g.pop().unwrap();
        g.pop().unwrap();
        assert_eq!(g, fresh);
        assert_eq!(g.pop(), Err(EmptyStack));
        assert!(matches!(
            g.push(t(0, 1, 6)),
            Err(Rejection::VertexOutOfRange { vertex: 6, n: 6 })
        ));
    }
}
