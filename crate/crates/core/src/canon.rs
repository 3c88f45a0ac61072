//! Canonical labeling of triple systems.
//!
//! The canonical form is the lexicographically smallest sorted edge list over
//! all labelings reachable in an individualization-refinement search tree.
//! Vertex colors start from degrees (highest first) and are refined by the sorted multiset of
//! color pairs over incident edges until stable. Cells are ordered by color;
//! the branching cell is the first largest non-singleton cell. Since every
//! step depends only on the colors, never on vertex names, the minimum is a
//! labeling invariant.
//!
//! Equal leaves give automorphisms. They prune sibling branches by orbits of
//! the pointwise stabilizer of the current prefix, and let the search jump
//! back to the level where the current path left the best one.
//!
//! Byte encoding: `n` as one byte, then each canonical edge as three bytes,
//! edges in ascending order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::system::{make_system, LinearTripleSystem, Triple, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    n: usize,
    edges: Vec<Triple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("empty input")]
    Empty,
    #[error("length {0} is not 1 + 3m")]
    Length(usize),
    #[error("encoded bytes are not a valid system: {0}")]
    Invalid(String),
    #[error("encoded edges are not in canonical order")]
    NotCanonical,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 3 * self.edges.len());
        out.push(self.n as u8);
        for e in &self.edges {
            out.extend(e.vertices().map(|v| v as u8));
        }
        out
    }

    /// Parses the byte encoding and checks it is the canonical form of the
    /// system it describes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (&n, rest) = bytes.split_first().ok_or(DecodeError::Empty)?;
        if rest.len() % 3 != 0 {
            return Err(DecodeError::Length(bytes.len()));
        }
        let h = make_system(
            n as usize,
            rest.chunks(3)
                .map(|c| [c[0] as usize, c[1] as usize, c[2] as usize]),
        )
        .map_err(|e| DecodeError::Invalid(e.to_string()))?;
        let form = canonical_form(&h);
        if form.to_bytes() != bytes {
            return Err(DecodeError::NotCanonical);
        }
        Ok(form)
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The canonical representative as a system.
    pub fn to_system(&self) -> LinearTripleSystem {
        make_system(self.n, self.edges.iter().map(Triple::vertices))
            .expect("canonical edges form a linear system")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

pub fn canonical_form(h: &LinearTripleSystem) -> CanonicalForm {
    canonical_labeling(h).0
}

/// The canonical form and a labeling (old vertex -> new vertex) producing it.
pub fn canonical_labeling(h: &LinearTripleSystem) -> (CanonicalForm, Vec<Vertex>) {
    let mut search = Search::new(h);
    let colors = search.refine(search.initial_colors());
    search.descend(colors, &mut Vec::new());
    let best = search.best.expect("the search tree has at least one leaf");
    (
        CanonicalForm {
            n: h.n(),
            edges: best.code,
        },
        best.labeling,
    )
}

pub fn is_isomorphic(h1: &LinearTripleSystem, h2: &LinearTripleSystem) -> bool {
    h1.n() == h2.n()
        && h1.edge_count() == h2.edge_count()
        && sorted_degrees(h1) == sorted_degrees(h2)
        && canonical_form(h1) == canonical_form(h2)
}

/// A vertex map `old -> new` carrying `h1` onto `h2`, verified edge by edge.
pub fn find_isomorphism(h1: &LinearTripleSystem, h2: &LinearTripleSystem) -> Option<Vec<Vertex>> {
    if h1.n() != h2.n() || h1.edge_count() != h2.edge_count() {
        return None;
    }
    let (f1, l1) = canonical_labeling(h1);
    let (f2, l2) = canonical_labeling(h2);
    if f1 != f2 {
        return None;
    }
    let mut inv2 = vec![0; h2.n()];
    for (v, &c) in l2.iter().enumerate() {
        inv2[c] = v;
    }
    let map: Vec<Vertex> = l1.iter().map(|&c| inv2[c]).collect();
    (h1.relabel(&map) == *h2).then_some(map)
}

pub fn sorted_degrees(h: &LinearTripleSystem) -> Vec<usize> {
    let mut d = h.degrees();
    d.sort_unstable();
    d
}

struct Leaf {
    code: Vec<Triple>,
    labeling: Vec<Vertex>,
    path: Vec<Vertex>,
}

struct Search<'a> {
    h: &'a LinearTripleSystem,
    incident: Vec<Vec<(Vertex, Vertex)>>,
    best: Option<Leaf>,
    generators: Vec<Vec<Vertex>>,
}

impl<'a> Search<'a> {
    fn new(h: &'a LinearTripleSystem) -> Self {
        let mut incident = vec![Vec::new(); h.n()];
        for e in h.edges() {
            for v in e.vertices() {
                incident[v].push(e.others(v).unwrap());
            }
        }
        Search {
            h,
            incident,
            best: None,
            generators: Vec::new(),
        }
    }

    fn initial_colors(&self) -> Vec<u32> {
        // high degree first, so edges land on small labels
        let keys: Vec<std::cmp::Reverse<usize>> = self
            .incident
            .iter()
            .map(|i| std::cmp::Reverse(i.len()))
            .collect();
        rank(&keys)
    }

    /// Iterates the incidence refinement to a fixed point. Colors are dense
    /// ranks `0..cells`, ordered by the (invariant) refinement keys.
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = colors.len();
        let mut cells = count_cells(&colors);
        while cells < n {
            let keys: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
                .map(|v| {
                    let mut sig: Vec<(u32, u32)> = self.incident[v]
                        .iter()
                        .map(|&(p, q)| {
                            let (cp, cq) = (colors[p], colors[q]);
                            (cp.min(cq), cp.max(cq))
                        })
                        .collect();
                    sig.sort_unstable();
                    (colors[v], sig)
                })
                .collect();
            let next = rank(&keys);
            let next_cells = count_cells(&next);
            colors = next;
            if next_cells == cells {
                break;
            }
            cells = next_cells;
        }
        colors
    }

    fn individualize(&self, colors: &[u32], w: Vertex) -> Vec<u32> {
        let keys: Vec<(u32, bool)> = colors
            .iter()
            .enumerate()
            .map(|(v, &c)| (c, v != w))
            .collect();
        self.refine(rank(&keys))
    }

    /// Returns `Some(d)` to unwind the recursion to depth `d`.
    fn descend(&mut self, colors: Vec<u32>, path: &mut Vec<Vertex>) -> Option<usize> {
        let n = colors.len();
        let Some(cell) = target_cell(&colors) else {
            return self.leaf(colors, path);
        };
        let depth = path.len();
        let mut explored: Vec<Vertex> = Vec::new();
        for w in cell {
            if !explored.is_empty() && self.same_orbit(path, &explored, w, n) {
                continue;
            }
            explored.push(w);
            let child = self.individualize(&colors, w);
            path.push(w);
            let jump = self.descend(child, path);
            path.pop();
            match jump {
                Some(d) if d < depth => return Some(d),
                _ => {}
            }
        }
        None
    }

    fn leaf(&mut self, labeling: Vec<u32>, path: &[Vertex]) -> Option<usize> {
        let labeling: Vec<Vertex> = labeling.into_iter().map(|c| c as usize).collect();
        let mut code: Vec<Triple> = self.h.edges().iter().map(|e| e.relabel(&labeling)).collect();
        code.sort_unstable();
        let ord = match &self.best {
            None => Ordering::Less,
            Some(b) => code.cmp(&b.code),
        };
        match ord {
            Ordering::Less => {
                self.best = Some(Leaf {
                    code,
                    labeling,
                    path: path.to_vec(),
                });
                None
            }
            Ordering::Greater => None,
            Ordering::Equal => {
                let best = self.best.as_ref().unwrap();
                let mut inv = vec![0; labeling.len()];
                for (v, &c) in best.labeling.iter().enumerate() {
                    inv[c] = v;
                }
                // maps the best leaf's vertex order onto this one
                let gamma: Vec<Vertex> = labeling.iter().map(|&c| inv[c]).collect();
                let common = best
                    .path
                    .iter()
                    .zip(path)
                    .take_while(|(a, b)| a == b)
                    .count();
                if gamma.iter().enumerate().any(|(v, &g)| v != g) {
                    self.generators.push(gamma);
                }
                Some(common)
            }
        }
    }

    /// Whether `w` lies in the orbit of an explored sibling under the group
    /// generated by known automorphisms fixing `path` pointwise.
    fn same_orbit(&self, path: &[Vertex], explored: &[Vertex], w: Vertex, n: usize) -> bool {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.generators {
            if path.iter().all(|&v| g[v] == v) {
                any = true;
                for v in 0..n {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, w);
        explored.iter().any(|&x| find(&mut parent, x) == root)
    }
}

/// Dense ranks of `keys` in sorted order.
fn rank<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut out = vec![0u32; keys.len()];
    let mut r = 0u32;
    for i in 0..order.len() {
        if i > 0 && keys[order[i]] != keys[order[i - 1]] {
            r += 1;
        }
        out[order[i]] = r;
    }
    // colors are positions: a color class of size s occupies s slots, so a
    // discrete coloring is directly a labeling
    let mut sizes = vec![0u32; keys.len()];
    for &c in &out {
        sizes[c as usize] += 1;
    }
    let mut start = vec![0u32; keys.len()];
    let mut acc = 0;
    for c in 0..keys.len() {
        start[c] = acc;
        acc += sizes[c];
    }
    out.iter().map(|&c| start[c as usize]).collect()
}

fn count_cells(colors: &[u32]) -> usize {
    let mut seen = vec![false; colors.len()];
    let mut c = 0;
    for &x in colors {
        if !std::mem::replace(&mut seen[x as usize], true) {
            c += 1;
        }
    }
    c
}

/// Members of the first largest non-singleton cell, ascending.
fn target_cell(colors: &[u32]) -> Option<Vec<Vertex>> {
    let n = colors.len();
    let mut size = vec![0usize; n];
    for &c in colors {
        size[c as usize] += 1;
    }
    let (mut best_color, mut best_size) = (None, 1);
    for c in 0..n {
        if size[c] > best_size {
            best_size = size[c];
            best_color = Some(c as u32);
        }
    }
    let bc = best_color?;
    Some((0..n).filter(|&v| colors[v] == bc).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{transversal_design, ConstructionSpec, Variant};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_relabel(h: &LinearTripleSystem, rng: &mut ChaCha8Rng) -> LinearTripleSystem {
        let mut p: Vec<usize> = (0..h.n()).collect();
        p.shuffle(rng);
        h.relabel(&p)
    }

    #[test]
    fn single_edge_with_isolated_vertices() {
        let h = make_system(10, [[3, 7, 9]]).unwrap();
        let f = canonical_form(&h);
        assert_eq!(f.n(), 10);
        assert_eq!(f.edges(), &[Triple::new(0, 1, 2).unwrap()]);
        assert_eq!(f.to_bytes(), vec![10, 0, 1, 2]);
    }

    #[test]
    fn empty_system_on_many_vertices_is_fast() {
        let h = LinearTripleSystem::empty(64).unwrap();
        assert_eq!(canonical_form(&h).to_bytes(), vec![64]);
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let systems = [
            ConstructionSpec::new(Variant::C1, 4).build().unwrap(),
            ConstructionSpec::new(Variant::C4, 3).build().unwrap(),
            transversal_design(4, None).unwrap(),
        ];
        for h in &systems {
            let f = canonical_form(h);
            for _ in 0..20 {
                let g = random_relabel(h, &mut rng);
                assert_eq!(canonical_form(&g), f);
                let map = find_isomorphism(h, &g).unwrap();
                assert_eq!(h.relabel(&map), g);
            }
        }
    }

    #[test]
    fn idempotent() {
        let h = ConstructionSpec::new(Variant::C2, 3).build().unwrap();
        let f = canonical_form(&h);
        assert_eq!(canonical_form(&f.to_system()), f);
    }

    #[test]
    fn labeling_produces_form() {
        let h = ConstructionSpec::new(Variant::C3, 3).build().unwrap();
        let (f, l) = canonical_labeling(&h);
        assert_eq!(h.relabel(&l), f.to_system());
    }

    #[test]
    fn isomorphism_basics() {
        let h = transversal_design(3, None).unwrap();
        assert!(is_isomorphic(&h, &h));
        let smaller = make_system(9, h.edges()[1..].iter().map(Triple::vertices)).unwrap();
        assert!(!is_isomorphic(&h, &smaller));
        assert!(find_isomorphism(&h, &smaller).is_none());
    }

    #[test]
    fn bytes_round_trip() {
        let f = canonical_form(&transversal_design(2, None).unwrap());
        assert_eq!(CanonicalForm::from_bytes(&f.to_bytes()).unwrap(), f);
        assert_eq!(CanonicalForm::from_bytes(&[]), Err(DecodeError::Empty));
        assert_eq!(CanonicalForm::from_bytes(&[6, 0]), Err(DecodeError::Length(2)));
        assert_eq!(
            CanonicalForm::from_bytes(&[6, 3, 4, 5]),
            Err(DecodeError::NotCanonical)
        );
    }

    #[test]
    fn distinguishes_nonisomorphic_pair() {
        // a path of two edges vs. two disjoint edges
        let p = make_system(6, [[0, 1, 2], [2, 3, 4]]).unwrap();
        let q = make_system(6, [[0, 1, 2], [3, 4, 5]]).unwrap();
        assert_ne!(canonical_form(&p), canonical_form(&q));
    }
}
