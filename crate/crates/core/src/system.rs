//! Linear triple systems and the exact primitives used everywhere else:
//! validated construction, the 2-shadow, per-vertex statistics, deficiency
//! and the neighborhood partition of the edge set around a vertex.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported vertex count. Vertex sets are single `u64` words.
pub const MAX_VERTICES: usize = 64;

/// Vertices are 0-based indices into `0..n`.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("a triple system needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("at most {MAX_VERTICES} vertices are supported, got {0}")]
    TooManyVertices(usize),
    #[error("vertex {vertex} is out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("triple {0:?} does not have three distinct vertices")]
    DegenerateTriple([usize; 3]),
    #[error("edge {0} appears more than once")]
    DuplicateEdge(Triple),
    #[error("edges {first} and {second} share the pair {{{}, {}}}", pair.0, pair.1)]
    LinearityViolation {
        first: Triple,
        second: Triple,
        pair: (Vertex, Vertex),
    },
}

/// A 3-element vertex set, stored in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 3]", try_from = "[usize; 3]")]
pub struct Triple([u8; 3]);

impl Triple {
    /// Sorts the three vertices. Returns `None` unless they are distinct and
    /// below [`MAX_VERTICES`].
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Option<Self> {
        let mut t = [a, b, c];
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] || t[2] >= MAX_VERTICES {
            return None;
        }
        Some(Triple([t[0] as u8, t[1] as u8, t[2] as u8]))
    }

    pub fn vertices(&self) -> [Vertex; 3] {
        [self.0[0] as usize, self.0[1] as usize, self.0[2] as usize]
    }

    pub fn lowest(&self) -> Vertex {
        self.0[0] as usize
    }

    pub fn highest(&self) -> Vertex {
        self.0[2] as usize
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.iter().any(|&x| x as usize == v)
    }

    pub fn mask(&self) -> VertexSet {
        VertexSet::from_iter(self.vertices())
    }

    /// The three 2-subsets, each as an ascending pair.
    pub fn pairs(&self) -> [(Vertex, Vertex); 3] {
        let [a, b, c] = self.vertices();
        [(a, b), (a, c), (b, c)]
    }

    /// The two vertices of the triple other than `v`, if `v` is a member.
    pub fn others(&self, v: Vertex) -> Option<(Vertex, Vertex)> {
        let [a, b, c] = self.vertices();
        match v {
            _ if v == a => Some((b, c)),
            _ if v == b => Some((a, c)),
            _ if v == c => Some((a, b)),
            _ => None,
        }
    }

    pub fn intersection_size(&self, other: &Triple) -> usize {
        (self.mask() & other.mask()).len()
    }

    /// Applies a vertex map and re-sorts.
    pub fn relabel(&self, map: &[Vertex]) -> Triple {
        let [a, b, c] = self.vertices();
        Triple::new(map[a], map[b], map[c]).expect("relabeling must be injective")
    }
}

impl From<Triple> for [usize; 3] {
    fn from(t: Triple) -> Self {
        t.vertices()
    }
}

impl TryFrom<[usize; 3]> for Triple {
    type Error = SystemError;

    fn try_from(t: [usize; 3]) -> Result<Self, Self::Error> {
        Triple::new(t[0], t[1], t[2]).ok_or(SystemError::DegenerateTriple(t))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// A set of vertices as a 64-bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0 &= !(1u64 << v);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn lowest(&self) -> Option<Vertex> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn highest(&self) -> Option<Vertex> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn iter(&self) -> VertexSetIter {
        VertexSetIter(self.0)
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl IntoIterator for VertexSet {
    type Item = Vertex;
    type IntoIter = VertexSetIter;

    fn into_iter(self) -> Self::IntoIter {
        VertexSetIter(self.0)
    }
}

impl std::ops::BitAnd for VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: Self) -> Self {
        VertexSet(self.0 & rhs.0)
    }
}

impl std::ops::BitOr for VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: Self) -> Self {
        VertexSet(self.0 | rhs.0)
    }
}

impl std::ops::Sub for VertexSet {
    type Output = VertexSet;
    fn sub(self, rhs: Self) -> Self {
        VertexSet(self.0 & !rhs.0)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

pub struct VertexSetIter(u64);

impl Iterator for VertexSetIter {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for VertexSetIter {}

/// A 3-uniform linear hypergraph on vertices `0..n`.
///
/// The edge list is sorted and duplicate free, so two values compare equal
/// exactly when they are the same labeled system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct LinearTripleSystem {
    n: usize,
    edges: Vec<Triple>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    n: usize,
    edges: Vec<[usize; 3]>,
}

impl TryFrom<RawSystem> for LinearTripleSystem {
    type Error = SystemError;

    fn try_from(raw: RawSystem) -> Result<Self, Self::Error> {
        make_system(raw.n, raw.edges)
    }
}

impl From<LinearTripleSystem> for RawSystem {
    fn from(h: LinearTripleSystem) -> Self {
        RawSystem {
            n: h.n,
            edges: h.edges.iter().map(Triple::vertices).collect(),
        }
    }
}

/// Validates and normalizes a list of triples into a linear system.
pub fn make_system<I>(n: usize, triples: I) -> Result<LinearTripleSystem, SystemError>
where
    I: IntoIterator<Item = [usize; 3]>,
{
    if n < 3 {
        return Err(SystemError::TooFewVertices(n));
    }
    if n > MAX_VERTICES {
        return Err(SystemError::TooManyVertices(n));
    }
    let mut edges = Vec::new();
    for t in triples {
        if let Some(&vertex) = t.iter().find(|&&v| v >= n) {
            return Err(SystemError::VertexOutOfRange { vertex, n });
        }
        edges.push(Triple::try_from(t)?);
    }
    edges.sort_unstable();
    if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
        return Err(SystemError::DuplicateEdge(w[0]));
    }
    let mut covered = [0u64; MAX_VERTICES];
    for (i, e) in edges.iter().enumerate() {
        for (u, v) in e.pairs() {
            if covered[u] >> v & 1 == 1 {
                let first = edges[..i]
                    .iter()
                    .find(|f| f.contains(u) && f.contains(v))
                    .copied()
                    .expect("a covered pair has an owning edge");
                return Err(SystemError::LinearityViolation {
                    first,
                    second: *e,
                    pair: (u, v),
                });
            }
        }
        for (u, v) in e.pairs() {
            covered[u] |= 1 << v;
            covered[v] |= 1 << u;
        }
    }
    Ok(LinearTripleSystem { n, edges })
}

impl LinearTripleSystem {
    /// The system with no edges.
    pub fn empty(n: usize) -> Result<Self, SystemError> {
        make_system(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, t: &Triple) -> bool {
        self.edges.binary_search(t).is_ok()
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for v in e.vertices() {
                d[v] += 1;
            }
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// `N(v)`: vertices sharing an edge with `v` (never contains `v`).
    pub fn neighborhood(&self, v: Vertex) -> VertexSet {
        let mut s = VertexSet::EMPTY;
        for e in self.edges.iter().filter(|e| e.contains(v)) {
            s = s | e.mask();
        }
        s.remove(v);
        s
    }

    /// Neighborhood masks of every vertex.
    pub fn neighborhoods(&self) -> Vec<VertexSet> {
        let mut nbr = vec![VertexSet::EMPTY; self.n];
        for e in &self.edges {
            let m = e.mask();
            for v in e.vertices() {
                nbr[v] = nbr[v] | (m - VertexSet::singleton(v));
            }
        }
        nbr
    }

    /// `L(v)`: the pairs completing `v` to an edge, ascending.
    pub fn link(&self, v: Vertex) -> Vec<(Vertex, Vertex)> {
        self.edges.iter().filter_map(|e| e.others(v)).collect()
    }

    /// Image of the system under the vertex bijection `map` (old -> new).
    pub fn relabel(&self, map: &[Vertex]) -> LinearTripleSystem {
        assert_eq!(map.len(), self.n, "relabeling must cover every vertex");
        let mut edges: Vec<Triple> = self.edges.iter().map(|e| e.relabel(map)).collect();
        edges.sort_unstable();
        LinearTripleSystem { n: self.n, edges }
    }

    /// Sub-system induced by deleting `v` and its edges; vertices above `v`
    /// shift down by one.
    pub fn delete_vertex(&self, v: Vertex) -> Result<LinearTripleSystem, SystemError> {
        if v >= self.n {
            return Err(SystemError::VertexOutOfRange { vertex: v, n: self.n });
        }
        let shift = |u: usize| if u > v { u - 1 } else { u };
        make_system(
            self.n - 1,
            self.edges
                .iter()
                .filter(|e| !e.contains(v))
                .map(|e| e.vertices().map(shift)),
        )
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), SystemError> {
        if v < self.n {
            Ok(())
        } else {
            Err(SystemError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }
}

impl fmt::Display for LinearTripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} [", self.n, self.edges.len())?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let [a, b, c] = e.vertices();
            write!(f, "{a}{}{b}{}{c}", sep(self.n), sep(self.n))?;
        }
        f.write_str("]")
    }
}

fn sep(n: usize) -> &'static str {
    if n <= 10 {
        ""
    } else {
        "."
    }
}

/// The 2-shadow: every vertex pair covered by some edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowGraph {
    pub n: usize,
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl ShadowGraph {
    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        let p = if u < v { (u, v) } else { (v, u) };
        self.pairs.binary_search(&p).is_ok()
    }

    /// Pairs with both ends in `within`.
    pub fn restrict(&self, within: VertexSet) -> Vec<(Vertex, Vertex)> {
        self.pairs
            .iter()
            .copied()
            .filter(|&(u, v)| within.contains(u) && within.contains(v))
            .collect()
    }
}

pub fn shadow(h: &LinearTripleSystem) -> ShadowGraph {
    let mut pairs: Vec<_> = h.edges.iter().flat_map(Triple::pairs).collect();
    pairs.sort_unstable();
    pairs.dedup();
    ShadowGraph { n: h.n, pairs }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexStats {
    pub vertex: Vertex,
    pub degree: usize,
    /// `N(v)`
    pub neighborhood: VertexSet,
    /// `S(v) = V \ N(v)`, which contains `v` itself.
    pub complement: VertexSet,
    /// `L(v)`
    pub link: Vec<(Vertex, Vertex)>,
}

pub fn vertex_stats(h: &LinearTripleSystem, v: Vertex) -> Result<VertexStats, SystemError> {
    h.check_vertex(v)?;
    let neighborhood = h.neighborhood(v);
    Ok(VertexStats {
        vertex: v,
        degree: h.degree(v),
        neighborhood,
        complement: h.vertex_set() - neighborhood,
        link: h.link(v),
    })
}

/// `Def(S) = |S|·k − Σ_{x∈S} d(x)`. Negative when vertices exceed degree `k`.
pub fn deficiency(h: &LinearTripleSystem, set: VertexSet, k: i64) -> Result<i64, SystemError> {
    if let Some(v) = set.highest() {
        h.check_vertex(v)?;
    }
    let degrees = h.degrees();
    Ok(set.iter().map(|x| k - degrees[x] as i64).sum())
}

/// Degrees of a vertex `x ∈ S(v)` split by the class of the incident edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DegreeSplit {
    pub d1: usize,
    pub d2: usize,
    pub d3: usize,
}

impl DegreeSplit {
    pub fn total(&self) -> usize {
        self.d1 + self.d2 + self.d3
    }
}

/// The edge set classified by how many vertices each edge has in `N(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodAnalysis {
    pub vertex: Vertex,
    pub k: i64,
    pub neighborhood: VertexSet,
    pub complement: VertexSet,
    /// Edges with all three vertices in `N(v)`. Each one closes a sail at `v`.
    pub e0: Vec<Triple>,
    /// Two vertices in `N(v)`, one in `S(v)`.
    pub e1: Vec<Triple>,
    /// One vertex in `N(v)`, two in `S(v)`.
    pub e2: Vec<Triple>,
    /// Contained in `S(v)`.
    pub e3: Vec<Triple>,
    /// `(d1, d2, d3)` for every `x ∈ S(v)`.
    pub d_table: BTreeMap<Vertex, DegreeSplit>,
    /// `M_x = {yz : xyz ∈ E1(v)}` for every `x ∈ S(v)`.
    pub m_family: BTreeMap<Vertex, Vec<(Vertex, Vertex)>>,
}

impl NeighborhoodAnalysis {
    pub fn is_sail_free_at_vertex(&self) -> bool {
        self.e0.is_empty()
    }

    /// Union of the matchings `M_x` over `xs`, sorted.
    pub fn matching_union(&self, xs: &[Vertex]) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<_> = xs
            .iter()
            .filter_map(|x| self.m_family.get(x))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out
    }

    /// `Def(S(v))` relative to the stored `k`.
    pub fn complement_deficiency(&self) -> i64 {
        self.d_table
            .values()
            .map(|s| self.k - s.total() as i64)
            .sum()
    }
}

pub fn neighborhood_partition(
    h: &LinearTripleSystem,
    v: Vertex,
    k: i64,
) -> Result<NeighborhoodAnalysis, SystemError> {
    h.check_vertex(v)?;
    let neighborhood = h.neighborhood(v);
    let complement = h.vertex_set() - neighborhood;
    let mut out = NeighborhoodAnalysis {
        vertex: v,
        k,
        neighborhood,
        complement,
        e0: Vec::new(),
        e1: Vec::new(),
        e2: Vec::new(),
        e3: Vec::new(),
        d_table: complement.iter().map(|x| (x, DegreeSplit::default())).collect(),
        m_family: complement.iter().map(|x| (x, Vec::new())).collect(),
    };
    for e in &h.edges {
        let inside = (e.mask() & neighborhood).len();
        let outside = e.mask() & complement;
        match inside {
            3 => out.e0.push(*e),
            2 => {
                out.e1.push(*e);
                let x = outside.lowest().expect("one vertex outside N(v)");
                out.d_table.get_mut(&x).unwrap().d1 += 1;
                out.m_family
                    .get_mut(&x)
                    .unwrap()
                    .push(e.others(x).unwrap());
            }
            1 => {
                out.e2.push(*e);
                for x in outside {
                    out.d_table.get_mut(&x).unwrap().d2 += 1;
                }
            }
            _ => {
                out.e3.push(*e);
                for x in outside {
                    out.d_table.get_mut(&x).unwrap().d3 += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Cycle lengths of a graph given as an edge list, if every vertex touched
/// has degree exactly 2. Sorted ascending.
pub fn cycle_lengths(pairs: &[(Vertex, Vertex)]) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(u, v) in pairs {
        if u == v {
            return None;
        }
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    if adj.values().any(|a| a.len() != 2) {
        return None;
    }
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if seen.contains_key(&start) {
            continue;
        }
        let (mut prev, mut cur, mut len) = (start, adj[&start][0], 1);
        seen.insert(start, ());
        while cur != start {
            seen.insert(cur, ());
            let a = &adj[&cur];
            let next = if a[0] == prev { a[1] } else { a[0] };
            prev = cur;
            cur = next;
            len += 1;
        }
        out.push(len);
    }
    // parallel edges make a 2-cycle, which is not a cycle of a simple graph
    if out.contains(&2) {
        return None;
    }
    out.sort_unstable();
    Some(out)
}
