//! Exact maximum and extremal classes by exhaustive search.
//!
//! `max_sail_free` is a depth-first branch and bound over triples in
//! lexicographic order. The first edge is fixed to `{0,1,2}`. Each extension
//! goes through a [`SailGuard`], so every state on the stack is linear and
//! sail-free.
//!
//! The remaining-edge bound splits future edges by their lowest vertex `c`.
//! An edge whose lowest vertex is `c` uses two pairs `c-x`, `c-y` with
//! `x, y > c` that are still uncovered, so there are at most
//! `floor(u_c / 2)` of them. Edges entirely above some vertex `b` form a
//! sail-free system on `n - b` vertices, so together with the edges already
//! there they number at most the exact value for `n - b`. Those values come
//! from searching the smaller vertex counts first.
//!
//! `enumerate_extremal` grows isomorphism classes one edge at a time. Deleting
//! an edge keeps a system linear and sail-free, so every `m`-edge system is
//! reached from some `(m-1)`-edge class and deduplicating each level by
//! canonical form loses nothing.

use std::collections::BTreeSet;
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalForm};
use crate::sail::SailGuard;
use crate::system::{make_system, LinearTripleSystem, Triple, VertexSet, MAX_VERTICES};

/// Nodes a worker counts locally before touching the shared counter.
const FLUSH_EVERY: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Stop as soon as a system of this size is found.
    pub target_edges: Option<usize>,
    /// Ask the caller to also list extremal classes. `max_sail_free` ignores it.
    pub enumerate: bool,
    pub worker_count: NonZeroUsize,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            target_edges: None,
            enumerate: false,
            worker_count: NonZeroUsize::MIN,
            node_limit: None,
            time_limit: None,
        }
    }
}

impl SearchOptions {
    /// Worker count, clamped to at least one.
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_count = NonZeroUsize::new(workers).unwrap_or(NonZeroUsize::MIN);
        self
    }

    pub fn with_target(mut self, m: usize) -> Self {
        self.target_edges = Some(m);
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub max_edges: usize,
    pub witness: LinearTripleSystem,
    pub nodes_explored: u64,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
    /// The whole space was covered, so `max_edges` is the exact maximum.
    pub exhausted: bool,
}

fn seconds<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("vertex count {0} outside 3..=64")]
    VertexCount(usize),
    #[error(
        "limit exceeded after {} nodes; best found has {} edges",
        .0.nodes_explored,
        .0.max_edges
    )]
    LimitExceeded(Box<SearchReport>),
    #[error("enumeration limit exceeded at level {level} after {nodes} nodes")]
    EnumerationLimitExceeded { level: usize, nodes: u64 },
}

/// `min(floor(n^2/9), floor(n * floor((n-1)/2) / 3))`.
pub fn upper_bound(n: usize) -> usize {
    (n * n / 9).min(n * (n.saturating_sub(1) / 2) / 3)
}

/// All triples on `0..n` in lexicographic order.
fn triples(n: usize) -> Vec<Triple> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push(Triple::new(a, b, c).unwrap());
            }
        }
    }
    out
}

struct Budget {
    start: Instant,
    nodes: AtomicU64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    hit: AtomicBool,
}

impl Budget {
    fn new(opts: &SearchOptions) -> Self {
        let start = Instant::now();
        Budget {
            start,
            nodes: AtomicU64::new(0),
            node_limit: opts.node_limit,
            deadline: opts.time_limit.map(|d| start + d),
            hit: AtomicBool::new(false),
        }
    }

    /// Adds a batch of nodes; returns false once a limit is hit.
    fn flush(&self, count: u64) -> bool {
        let total = self.nodes.fetch_add(count, Ordering::Relaxed) + count;
        let over = self.node_limit.is_some_and(|l| total > l)
            || self.deadline.is_some_and(|d| Instant::now() >= d);
        if over {
            self.hit.store(true, Ordering::Relaxed);
        }
        !self.hit.load(Ordering::Relaxed)
    }

    fn is_hit(&self) -> bool {
        self.hit.load(Ordering::Relaxed)
    }

    fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

/// Upper bound on edges that can still be added, all with lowest vertex
/// `>= from`. `ex[j]` bounds sail-free systems on `j` vertices.
fn remaining_bound(guard: &SailGuard, from: usize, ex: &[usize]) -> usize {
    let n = guard.n();
    let full = VertexSet::full(n);
    // inside[b]: current edges with lowest vertex >= b
    let mut inside = vec![0usize; n + 1];
    for e in guard.edges() {
        inside[e.lowest()] += 1;
    }
    for b in (0..n).rev() {
        inside[b] += inside[b + 1];
    }
    let mut best = usize::MAX;
    let mut prefix = 0;
    for b in from..=n {
        let above = ex[n - b].saturating_sub(inside[b]);
        best = best.min(prefix + above);
        if b == n {
            break;
        }
        let higher = full - VertexSet::full(b + 1);
        let open = (higher - guard.neighborhood(b)).len();
        prefix += open / 2;
        if prefix >= best {
            break;
        }
    }
    best
}

struct Shared<'a> {
    budget: &'a Budget,
    best: AtomicUsize,
    witness: Mutex<Vec<Triple>>,
    goal: usize,
    done: AtomicBool,
}

impl Shared<'_> {
    fn best(&self) -> usize {
        self.best.load(Ordering::Relaxed)
    }

    fn stopped(&self) -> bool {
        self.done.load(Ordering::Relaxed) || self.budget.is_hit()
    }

    fn offer(&self, edges: &[Triple]) {
        let mut w = self.witness.lock().unwrap();
        if edges.len() > self.best() {
            *w = edges.to_vec();
            self.best.store(edges.len(), Ordering::Relaxed);
            if edges.len() >= self.goal {
                self.done.store(true, Ordering::Relaxed);
            }
        }
    }
}

struct Worker<'a> {
    triples: &'a [Triple],
    /// `starts[a]`: index of the first triple with lowest vertex `a`.
    starts: &'a [usize],
    ex: &'a [usize],
    shared: &'a Shared<'a>,
    guard: SailGuard,
    pending: u64,
}

impl Worker<'_> {
    fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            let ok = self.shared.budget.flush(self.pending);
            self.pending = 0;
            ok
        } else {
            true
        }
    }

    fn finish(&mut self) {
        self.shared.budget.flush(self.pending);
        self.pending = 0;
    }

    /// Tries triple `i`; on success explores everything above it.
    fn branch(&mut self, i: usize) {
        if !self.tick() {
            return;
        }
        if self.guard.try_push(self.triples[i]) {
            if self.guard.len() > self.shared.best() {
                self.shared.offer(self.guard.edges());
            }
            self.dfs(i + 1);
            self.guard.pop().unwrap();
        }
    }

    fn dfs(&mut self, from: usize) {
        let cur = self.guard.len();
        let mut i = from;
        while i < self.triples.len() {
            let a = self.triples[i].lowest();
            let room = remaining_bound(&self.guard, a, self.ex);
            // the bound only shrinks as the lowest vertex grows
            if cur + room <= self.shared.best() {
                return;
            }
            for j in i..self.starts[a + 1] {
                if self.shared.stopped() || cur + room <= self.shared.best() {
                    return;
                }
                self.branch(j);
            }
            i = self.starts[a + 1];
        }
    }
}

/// Exact maximum over `n` vertices, given exact values below `n`.
fn search_one(n: usize, ex: &[usize], opts: &SearchOptions, budget: &Budget) -> (usize, Vec<Triple>) {
    let all = triples(n);
    let mut starts = vec![all.len(); n + 1];
    for (i, t) in all.iter().enumerate().rev() {
        starts[t.lowest()] = i;
    }
    for a in (0..n).rev() {
        starts[a] = starts[a].min(starts[a + 1]);
    }
    let goal = opts
        .target_edges
        .unwrap_or(usize::MAX)
        .min(upper_bound(n))
        .max(1);
    let shared = Shared {
        budget,
        best: AtomicUsize::new(1),
        witness: Mutex::new(vec![all[0]]),
        goal,
        done: AtomicBool::new(goal <= 1),
    };
    let next = AtomicUsize::new(1);
    std::thread::scope(|s| {
        for _ in 0..opts.worker_count.get() {
            s.spawn(|| {
                let mut guard = SailGuard::new(n);
                guard.try_push(all[0]);
                let mut w = Worker {
                    triples: &all,
                    starts: &starts,
                    ex,
                    shared: &shared,
                    guard,
                    pending: 0,
                };
                // one task per choice of second edge
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= all.len() || shared.stopped() {
                        break;
                    }
                    let room = remaining_bound(&w.guard, all[i].lowest(), ex);
                    if room < shared.best() {
                        continue;
                    }
                    w.branch(i);
                }
                w.finish();
            });
        }
    });
    let best = shared.best();
    (best, shared.witness.into_inner().unwrap())
}

/// Exact values for every vertex count below `n`, then `upper_bound(n)`.
fn exact_table(n: usize, opts: &SearchOptions, budget: &Budget) -> Option<Vec<usize>> {
    let mut ex = vec![0; n + 1];
    let sub = SearchOptions {
        target_edges: None,
        ..opts.clone()
    };
    for j in 3..n {
        ex[j] = upper_bound(j);
        let (best, _) = search_one(j, &ex, &sub, budget);
        if budget.is_hit() {
            return None;
        }
        ex[j] = best;
    }
    ex[n] = upper_bound(n);
    Some(ex)
}

/// Largest sail-free linear system on `n` vertices.
pub fn max_sail_free(n: usize, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    if !(3..=MAX_VERTICES).contains(&n) {
        return Err(SearchError::VertexCount(n));
    }
    let budget = Budget::new(opts);
    let ex = exact_table(n, opts, &budget);
    let (best, edges) = match &ex {
        Some(ex) => search_one(n, ex, opts, &budget),
        None => (1, vec![Triple::new(0, 1, 2).unwrap()]),
    };
    let witness = make_system(n, edges.iter().map(Triple::vertices))
        .expect("guarded edges form a linear system");
    let limited = budget.is_hit();
    let target_hit = opts.target_edges.is_some_and(|t| best >= t);
    let report = SearchReport {
        n,
        max_edges: best,
        witness,
        nodes_explored: budget.nodes(),
        elapsed: budget.start.elapsed(),
        exhausted: !limited && (!target_hit || best == upper_bound(n)),
    };
    if limited && !target_hit && best < upper_bound(n) {
        return Err(SearchError::LimitExceeded(Box::new(report)));
    }
    Ok(report)
}

fn guard_for(form: &CanonicalForm) -> SailGuard {
    let mut g = SailGuard::new(form.n());
    for &e in form.edges() {
        g.push(e).expect("canonical forms are sail-free");
    }
    g
}

/// All sail-free linear systems with exactly `m` edges on `n` vertices, one
/// canonical form per isomorphism class.
pub fn enumerate_extremal(
    n: usize,
    m: usize,
    opts: &SearchOptions,
) -> Result<BTreeSet<CanonicalForm>, SearchError> {
    if !(3..=MAX_VERTICES).contains(&n) {
        return Err(SearchError::VertexCount(n));
    }
    let budget = Budget::new(opts);
    let Some(ex) = exact_table(n, opts, &budget) else {
        return Err(SearchError::EnumerationLimitExceeded {
            level: 0,
            nodes: budget.nodes(),
        });
    };
    if m > upper_bound(n) {
        return Ok(BTreeSet::new());
    }
    let all = triples(n);
    let empty = LinearTripleSystem::empty(n).expect("n checked above");
    let mut level: Vec<CanonicalForm> = vec![canonical_form(&empty)];
    for j in 0..m {
        let next = AtomicUsize::new(0);
        let found = Mutex::new(BTreeSet::new());
        std::thread::scope(|s| {
            for _ in 0..opts.worker_count.get() {
                s.spawn(|| {
                    let mut local = BTreeSet::new();
                    let mut pending = 0u64;
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= level.len() || budget.is_hit() {
                            break;
                        }
                        let mut g = guard_for(&level[i]);
                        for &t in &all {
                            pending += 1;
                            if !g.try_push(t) {
                                continue;
                            }
                            if j + 1 + remaining_bound(&g, 0, &ex) >= m {
                                local.insert(canonical_form(&g.to_system()));
                            }
                            g.pop().unwrap();
                        }
                        if pending >= FLUSH_EVERY {
                            budget.flush(pending);
                            pending = 0;
                        }
                    }
                    budget.flush(pending);
                    found.lock().unwrap().append(&mut local);
                });
            }
        });
        if budget.is_hit() {
            return Err(SearchError::EnumerationLimitExceeded {
                level: j + 1,
                nodes: budget.nodes(),
            });
        }
        level = found.into_inner().unwrap().into_iter().collect();
    }
    Ok(level.into_iter().collect())
}
