//! Generators for the extremal families.
//!
//! Vertex layout for parameter `k`: `x_1..x_k` are `0..k`, `y_1..y_k` are
//! `k..2k`, and the third block starts at `2k`. For the two general
//! constructions the third block is `z_1..z_{k-2}, a, b, c` (so `a = 3k-2`,
//! `b = 3k-1`, `c = 3k`). For the two `k = 3` constructions it is
//! `a, b, c, v` (`6, 7, 8, 9`). Transversal designs use `z_1..z_k`.
//!
//! Every generator is a pure function of a [`ConstructionSpec`]. A spec may
//! leave free choices open; [`ConstructionSpec::resolve`] fills them with
//! deterministic defaults, or with seeded random choices when `seed` is set,
//! and the resolved spec reproduces the same system on its own.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::system::{make_system, LinearTripleSystem, SystemError, Vertex, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{variant} needs k >= {min}, got {k}")]
    KTooSmall { variant: Variant, k: usize, min: usize },
    #[error("{variant} with k = {k} needs more than {MAX_VERTICES} vertices")]
    TooLarge { variant: Variant, k: usize },
    #[error("{variant} is only defined for k = 3, got {k}")]
    FixedK { variant: Variant, k: usize },
    #[error("k = {0} is not divisible by 3")]
    DivisibilityViolation(usize),
    #[error("sigma({0}) = tau({0}): the two matchings of a 2-factor must be disjoint")]
    DerangementViolation(usize),
    #[error("{0} is not a permutation of 0..{1}")]
    NotAPermutation(&'static str, usize),
    #[error("the 2-factor has no cycle of length at least 6")]
    NoLongCycle,
    #[error("cycle lengths {0:?} are not all divisible by 6")]
    BadCycleLengths(Vec<usize>),
    #[error("invalid special edges: {0}")]
    BadSpecialEdges(String),
    #[error("no proper coloring satisfies the anchors")]
    ColoringInfeasible,
    #[error("color assignment {0:?} is not a bijection onto {{a, b, c}}")]
    BadColorAssignment(Vec<usize>),
    #[error("matching variant {0} is not one of 1, 2, 3")]
    BadVariant(u8),
    #[error("invalid Latin square: {0}")]
    InvalidLatinSquare(String),
    #[error("invalid matching decomposition: {0}")]
    BadMatchings(String),
    #[error("parameter `{param}` does not apply to {variant}")]
    UnexpectedParameter { variant: Variant, param: &'static str },
    #[error(transparent)]
    System(#[from] SystemError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

/// Which generator a spec selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    C1,
    C2,
    C3,
    C4,
    Td,
    Truncated,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::C1,
        Variant::C2,
        Variant::C3,
        Variant::C4,
        Variant::Td,
        Variant::Truncated,
    ];

    /// Vertex count produced for parameter `k`.
    pub fn vertex_count(self, k: usize) -> usize {
        match self {
            Variant::Td => 3 * k,
            Variant::Truncated => 3 * k + 2,
            _ => 3 * k + 1,
        }
    }

    /// Edge count produced for parameter `k`.
    pub fn edge_count(self, k: usize) -> usize {
        match self {
            Variant::Td => k * k,
            Variant::Truncated => k * k + k,
            _ => k * k + 1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::C1 => "c1",
            Variant::C2 => "c2",
            Variant::C3 => "c3",
            Variant::C4 => "c4",
            Variant::Td => "td",
            Variant::Truncated => "truncated",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown construction type `{s}`"))
    }
}

/// Index arithmetic for the fixed vertex layout.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub k: usize,
}

impl Layout {
    pub fn x(&self, i: usize) -> Vertex {
        i
    }

    pub fn y(&self, j: usize) -> Vertex {
        self.k + j
    }

    /// `z_{i+1}` for `i` in `0..k-2`.
    pub fn z(&self, i: usize) -> Vertex {
        2 * self.k + i
    }

    pub fn a(&self) -> Vertex {
        3 * self.k - 2
    }

    pub fn b(&self) -> Vertex {
        3 * self.k - 1
    }

    pub fn c(&self) -> Vertex {
        3 * self.k
    }

    /// `a`, `b` or `c` by color index 0, 1, 2.
    pub fn color(&self, color: usize) -> Vertex {
        self.a() + color
    }

    pub fn is_x(&self, v: Vertex) -> bool {
        v < self.k
    }
}

/// Vertices of the two `k = 3` constructions.
pub mod small {
    pub const X: [usize; 3] = [0, 1, 2];
    pub const Y: [usize; 3] = [3, 4, 5];
    pub const A: usize = 6;
    pub const B: usize = 7;
    pub const C: usize = 8;
    pub const V: usize = 9;
}

/// A 2-factor of `K_{k,k}` given as two disjoint perfect matchings
/// `x_i y_{sigma(i)}` and `x_i y_{tau(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoFactorSpec {
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl TwoFactorSpec {
    pub fn new(sigma: Vec<usize>, tau: Vec<usize>) -> Result<Self> {
        let spec = TwoFactorSpec { sigma, tau };
        spec.validate()?;
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// `sigma = id`, `tau = i + 1 mod k`: one cycle of length `2k`.
    pub fn hamiltonian(k: usize) -> Self {
        TwoFactorSpec {
            sigma: (0..k).collect(),
            tau: (0..k).map(|i| (i + 1) % k).collect(),
        }
    }

    /// Cycles of length `2p` for each `p` in `halves` (each `p >= 2`),
    /// on consecutive index blocks.
    pub fn from_cycle_halves(halves: &[usize]) -> Self {
        let k = halves.iter().sum();
        let sigma = (0..k).collect();
        let mut tau = vec![0; k];
        let mut start = 0;
        for &p in halves {
            for r in 0..p {
                tau[start + r] = start + (r + 1) % p;
            }
            start += p;
        }
        TwoFactorSpec { sigma, tau }
    }

    /// Same cycle structure under random relabelings of `X` and of `Y`.
    pub fn shuffled<R: Rng>(&self, rng: &mut R) -> Self {
        let k = self.k();
        let mut px: Vec<usize> = (0..k).collect();
        let mut py: Vec<usize> = (0..k).collect();
        px.shuffle(rng);
        py.shuffle(rng);
        let mut sigma = vec![0; k];
        let mut tau = vec![0; k];
        for i in 0..k {
            sigma[px[i]] = py[self.sigma[i]];
            tau[px[i]] = py[self.tau[i]];
        }
        TwoFactorSpec { sigma, tau }
    }

    fn validate(&self) -> Result<()> {
        let k = self.k();
        check_permutation(&self.sigma, k, "sigma")?;
        check_permutation(&self.tau, k, "tau")?;
        if let Some(i) = (0..k).find(|&i| self.sigma[i] == self.tau[i]) {
            return Err(ConstructionError::DerangementViolation(i));
        }
        Ok(())
    }
}

fn check_permutation(p: &[usize], k: usize, name: &'static str) -> Result<()> {
    let mut seen = vec![false; k];
    for &x in p {
        if x >= k || std::mem::replace(&mut seen[x], true) {
            return Err(ConstructionError::NotAPermutation(name, k));
        }
    }
    if p.len() != k {
        return Err(ConstructionError::NotAPermutation(name, k));
    }
    Ok(())
}

/// Cycles of the 2-factor as vertex sequences alternating `X`, `Y`.
///
/// Each cycle starts at its smallest `X` vertex and leaves it along the
/// `sigma` edge. Cycles are listed by that starting vertex. Edge `i` of a
/// cycle joins positions `i` and `i + 1 (mod len)`.
pub fn two_factor(spec: &TwoFactorSpec) -> Result<Vec<Vec<Vertex>>> {
    spec.validate()?;
    let k = spec.k();
    let lay = Layout { k };
    let mut tau_inv = vec![0; k];
    for (i, &t) in spec.tau.iter().enumerate() {
        tau_inv[t] = i;
    }
    let mut seen = vec![false; k];
    let mut cycles = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        loop {
            seen[i] = true;
            let j = spec.sigma[i];
            cycle.push(lay.x(i));
            cycle.push(lay.y(j));
            i = tau_inv[j];
            if i == start {
                break;
            }
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// A perfect matching of `K_{k,k}`: entry `i` is the `Y` index matched to `x_i`.
pub type Matching = Vec<usize>;

/// Splits `K_{k,k}` minus the 2-factor into `k - 2` perfect matchings by
/// repeated augmenting-path extraction. With an `rng`, vertex and edge
/// orders are shuffled so different seeds give different decompositions.
pub fn matching_decomposition<R: Rng>(
    forbidden: &TwoFactorSpec,
    mut rng: Option<&mut R>,
) -> Result<Vec<Matching>> {
    forbidden.validate()?;
    let k = forbidden.k();
    let mut adj = vec![vec![true; k]; k];
    for i in 0..k {
        adj[i][forbidden.sigma[i]] = false;
        adj[i][forbidden.tau[i]] = false;
    }
    let mut out = Vec::with_capacity(k.saturating_sub(2));
    for _ in 0..k.saturating_sub(2) {
        let mut xs: Vec<usize> = (0..k).collect();
        let mut ys: Vec<usize> = (0..k).collect();
        if let Some(r) = rng.as_deref_mut() {
            xs.shuffle(r);
            ys.shuffle(r);
        }
        let m = perfect_matching(&adj, &xs, &ys)
            .expect("a regular bipartite graph has a perfect matching");
        for (i, &j) in m.iter().enumerate() {
            adj[i][j] = false;
        }
        out.push(m);
    }
    Ok(out)
}

/// Kuhn's augmenting-path algorithm on a dense bipartite adjacency matrix.
fn perfect_matching(adj: &[Vec<bool>], xs: &[usize], ys: &[usize]) -> Option<Matching> {
    let k = adj.len();
    let mut match_y: Vec<Option<usize>> = vec![None; k];

    fn augment(
        x: usize,
        adj: &[Vec<bool>],
        ys: &[usize],
        visited: &mut [bool],
        match_y: &mut [Option<usize>],
    ) -> bool {
        for &y in ys {
            if adj[x][y] && !visited[y] {
                visited[y] = true;
                if match_y[y].is_none_or(|x2| augment(x2, adj, ys, visited, match_y)) {
                    match_y[y] = Some(x);
                    return true;
                }
            }
        }
        false
    }

    for &x in xs {
        let mut visited = vec![false; k];
        if !augment(x, adj, ys, &mut visited, &mut match_y) {
            return None;
        }
    }
    let mut m = vec![0; k];
    for (y, x) in match_y.iter().enumerate() {
        m[x.unwrap()] = y;
    }
    Some(m)
}

/// Parameters of one generator run. Unset optional fields are free choices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub variant: Variant,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_factor: Option<TwoFactorSpec>,
    /// Index (into [`two_factor`] output) of the cycle carrying the special
    /// edges in the first construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub long_cycle: Option<usize>,
    /// Edge positions on the long cycle of `a'c'` and `x'y'`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_edges: Option<(usize, usize)>,
    /// Per-cycle color order for the second construction: cycle edge `i`
    /// gets color `perm[i % 3]` (0 = a, 1 = b, 2 = c).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_colors: Option<Vec<[usize; 3]>>,
    /// Colors of `x1x2, x2x3, x3x1` and of `y1y2, y2y3, y3y1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle_colors: Option<[[usize; 3]; 2]>,
    /// Which `M_v` the fourth construction uses (1, 2 or 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mv_variant: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matchings: Option<Vec<Matching>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latin: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConstructionSpec {
    pub fn new(variant: Variant, k: usize) -> Self {
        ConstructionSpec {
            variant,
            k,
            two_factor: None,
            long_cycle: None,
            special_edges: None,
            cycle_colors: None,
            triangle_colors: None,
            mv_variant: None,
            matchings: None,
            latin: None,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_two_factor(mut self, tf: TwoFactorSpec) -> Self {
        self.two_factor = Some(tf);
        self
    }

    pub fn with_special_edges(mut self, a_c: usize, x_y: usize) -> Self {
        self.special_edges = Some((a_c, x_y));
        self
    }

    pub fn with_triangle_colors(mut self, colors: [[usize; 3]; 2]) -> Self {
        self.triangle_colors = Some(colors);
        self
    }

    pub fn with_mv_variant(mut self, variant: u8) -> Self {
        self.mv_variant = Some(variant);
        self
    }

    pub fn with_latin(mut self, latin: Vec<Vec<usize>>) -> Self {
        self.latin = Some(latin);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.variant.vertex_count(self.k)
    }

    fn rng(&self) -> Option<ChaCha8Rng> {
        self.seed.map(ChaCha8Rng::seed_from_u64)
    }

    fn reject(&self, param: &'static str, present: bool) -> Result<()> {
        if present {
            Err(ConstructionError::UnexpectedParameter {
                variant: self.variant,
                param,
            })
        } else {
            Ok(())
        }
    }

    fn check_shape(&self) -> Result<()> {
        let (v, k) = (self.variant, self.k);
        let min = match v {
            Variant::C1 | Variant::C2 => 3,
            Variant::C3 | Variant::C4 => {
                if k != 3 {
                    return Err(ConstructionError::FixedK { variant: v, k });
                }
                3
            }
            Variant::Td | Variant::Truncated => 1,
        };
        if k < min {
            return Err(ConstructionError::KTooSmall { variant: v, k, min });
        }
        if v == Variant::C2 && k % 3 != 0 {
            return Err(ConstructionError::DivisibilityViolation(k));
        }
        if v.vertex_count(k) > MAX_VERTICES {
            return Err(ConstructionError::TooLarge { variant: v, k });
        }
        let general = matches!(v, Variant::C1 | Variant::C2);
        self.reject("two_factor", !general && self.two_factor.is_some())?;
        self.reject("matchings", !general && self.matchings.is_some())?;
        self.reject("long_cycle", v != Variant::C1 && self.long_cycle.is_some())?;
        self.reject("special_edges", v != Variant::C1 && self.special_edges.is_some())?;
        self.reject("cycle_colors", v != Variant::C2 && self.cycle_colors.is_some())?;
        self.reject("triangle_colors", v != Variant::C3 && self.triangle_colors.is_some())?;
        self.reject("mv_variant", v != Variant::C4 && self.mv_variant.is_some())?;
        self.reject(
            "latin",
            !matches!(v, Variant::Td | Variant::Truncated) && self.latin.is_some(),
        )?;
        if let Some(tf) = &self.two_factor {
            if tf.k() != k {
                return Err(ConstructionError::NotAPermutation("two_factor", k));
            }
            tf.validate()?;
        }
        Ok(())
    }

    /// Fills every free choice. The result builds the same system as `self`
    /// and needs no seed.
    pub fn resolve(&self) -> Result<ConstructionSpec> {
        self.check_shape()?;
        let mut rng = self.rng();
        let mut out = self.clone();
        out.seed = None;
        let k = self.k;
        match self.variant {
            Variant::C1 => {
                let tf = match &self.two_factor {
                    Some(tf) => tf.clone(),
                    None => match rng.as_mut() {
                        Some(r) => random_two_factor(k, r, |h| h >= 3, |hs| hs.iter().any(|&h| h >= 3)),
                        None => TwoFactorSpec::hamiltonian(k),
                    },
                };
                let cycles = two_factor(&tf)?;
                let long = match self.long_cycle {
                    Some(i) if i < cycles.len() => i,
                    Some(i) => {
                        return Err(ConstructionError::BadSpecialEdges(format!(
                            "cycle index {i} out of range ({} cycles)",
                            cycles.len()
                        )))
                    }
                    None => {
                        let longest = cycles.iter().map(Vec::len).max().unwrap_or(0);
                        cycles.iter().position(|c| c.len() == longest).unwrap()
                    }
                };
                if cycles[long].len() < 6 {
                    return Err(ConstructionError::NoLongCycle);
                }
                let special = match (self.special_edges, rng.as_mut()) {
                    (Some(s), _) => s,
                    (None, Some(r)) => {
                        let options = valid_special_edges(&cycles[long]);
                        *options.choose(r).expect("a cycle of length >= 6 has valid special edges")
                    }
                    (None, None) => (0, 3),
                };
                special_roles(&cycles[long], special)?;
                out.matchings = Some(self.resolve_matchings(&tf, rng.as_mut())?);
                out.two_factor = Some(tf);
                out.long_cycle = Some(long);
                out.special_edges = Some(special);
            }
            Variant::C2 => {
                let tf = match &self.two_factor {
                    Some(tf) => tf.clone(),
                    None => match rng.as_mut() {
                        Some(r) => random_two_factor(k, r, |h| h % 3 == 0, |_| true),
                        None => TwoFactorSpec::hamiltonian(k),
                    },
                };
                let cycles = two_factor(&tf)?;
                let lengths: Vec<usize> = cycles.iter().map(Vec::len).collect();
                if lengths.iter().any(|l| l % 6 != 0) {
                    return Err(ConstructionError::BadCycleLengths(lengths));
                }
                let colors = match (&self.cycle_colors, rng.as_mut()) {
                    (Some(c), _) => c.clone(),
                    (None, Some(r)) => cycles
                        .iter()
                        .map(|_| {
                            let mut p = [0, 1, 2];
                            p.shuffle(r);
                            p
                        })
                        .collect(),
                    (None, None) => vec![[0, 1, 2]; cycles.len()],
                };
                if colors.len() != cycles.len() {
                    return Err(ConstructionError::BadColorAssignment(
                        colors.iter().flatten().copied().collect(),
                    ));
                }
                for p in &colors {
                    check_color_perm(p)?;
                }
                out.matchings = Some(self.resolve_matchings(&tf, rng.as_mut())?);
                out.two_factor = Some(tf);
                out.cycle_colors = Some(colors);
            }
            Variant::C3 => {
                let colors = match (self.triangle_colors, rng.as_mut()) {
                    (Some(c), _) => c,
                    (None, Some(r)) => {
                        let mut p = [0, 1, 2];
                        let mut q = [0, 1, 2];
                        p.shuffle(r);
                        q.shuffle(r);
                        [p, q]
                    }
                    (None, None) => [[0, 1, 2], [0, 1, 2]],
                };
                check_color_perm(&colors[0])?;
                check_color_perm(&colors[1])?;
                out.triangle_colors = Some(colors);
            }
            Variant::C4 => {
                let mv = match (self.mv_variant, rng.as_mut()) {
                    (Some(m), _) => m,
                    (None, Some(r)) => r.gen_range(1..=3),
                    (None, None) => 1,
                };
                if !(1..=3).contains(&mv) {
                    return Err(ConstructionError::BadVariant(mv));
                }
                out.mv_variant = Some(mv);
            }
            Variant::Td | Variant::Truncated => {
                let order = if self.variant == Variant::Td { k } else { k + 1 };
                let latin = match (&self.latin, rng.as_mut()) {
                    (Some(l), _) => l.clone(),
                    (None, Some(r)) => random_isotope(order, r),
                    (None, None) => cyclic_latin_square(order),
                };
                validate_latin(&latin, order)?;
                out.latin = Some(latin);
            }
        }
        Ok(out)
    }

    fn resolve_matchings(
        &self,
        tf: &TwoFactorSpec,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Vec<Matching>> {
        match &self.matchings {
            Some(ms) => {
                validate_matchings(tf, ms)?;
                Ok(ms.clone())
            }
            None => matching_decomposition(tf, rng),
        }
    }

    /// Resolves and runs the selected generator.
    pub fn build(&self) -> Result<LinearTripleSystem> {
        let spec = self.resolve()?;
        match spec.variant {
            Variant::C1 => build_c1(&spec).map(|(h, _)| h),
            Variant::C2 => build_c2(&spec),
            Variant::C3 => build_c3(&spec),
            Variant::C4 => build_c4(&spec),
            Variant::Td => build_td(spec.k, spec.latin.as_ref().unwrap()),
            Variant::Truncated => {
                let td = build_td(spec.k + 1, spec.latin.as_ref().unwrap())?;
                Ok(td.delete_vertex(3 * spec.k + 2)?)
            }
        }
    }
}

fn check_color_perm(p: &[usize; 3]) -> Result<()> {
    let mut sorted = *p;
    sorted.sort_unstable();
    if sorted == [0, 1, 2] {
        Ok(())
    } else {
        Err(ConstructionError::BadColorAssignment(p.to_vec()))
    }
}

/// Random 2-factor whose cycles have half-lengths drawn from `allowed`
/// (each at least 2) and whose multiset of half-lengths satisfies `accept`.
fn random_two_factor<R: Rng>(
    k: usize,
    rng: &mut R,
    allowed: impl Fn(usize) -> bool,
    accept: impl Fn(&[usize]) -> bool,
) -> TwoFactorSpec {
    loop {
        let mut halves = Vec::new();
        let mut left = k;
        while left > 0 {
            let choices: Vec<usize> = (2..=left)
                .filter(|&h| allowed(h) && (left - h == 0 || left - h >= 2))
                .collect();
            let Some(&h) = choices.choose(rng) else { break };
            halves.push(h);
            left -= h;
        }
        if left == 0 && accept(&halves) {
            return TwoFactorSpec::from_cycle_halves(&halves).shuffled(rng);
        }
    }
}

/// All `(a'c', x'y')` edge-position pairs on a cycle meeting the
/// disjointness and non-adjacency requirements.
pub fn valid_special_edges(cycle: &[Vertex]) -> Vec<(usize, usize)> {
    let len = cycle.len();
    let mut out = Vec::new();
    for i in 0..len {
        for j in 0..len {
            if special_roles(cycle, (i, j)).is_ok() {
                out.push((i, j));
            }
        }
    }
    out
}

/// The four named vertices of the first construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialVertices {
    pub a_prime: Vertex,
    pub c_prime: Vertex,
    pub x_prime: Vertex,
    pub y_prime: Vertex,
}

fn special_roles(cycle: &[Vertex], (i, j): (usize, usize)) -> Result<SpecialVertices> {
    let len = cycle.len();
    let bad = |msg: String| Err(ConstructionError::BadSpecialEdges(msg));
    if i >= len || j >= len {
        return bad(format!("positions ({i}, {j}) out of range for a {len}-cycle"));
    }
    // X indices are below every Y index
    let split = |p: usize| {
        let (u, w) = (cycle[p], cycle[(p + 1) % len]);
        if u < w { (u, w) } else { (w, u) }
    };
    let (a_prime, c_prime) = split(i);
    let (x_prime, y_prime) = split(j);
    let gap = (j + len - i) % len;
    if gap <= 1 || gap == len - 1 {
        return bad(format!("edges {i} and {j} are not disjoint"));
    }
    let adjacent = |u: Vertex, w: Vertex| {
        (0..len).any(|p| {
            let (s, t) = (cycle[p], cycle[(p + 1) % len]);
            (s == u && t == w) || (s == w && t == u)
        })
    };
    if adjacent(a_prime, y_prime) {
        return bad("a'y' is an edge of the cycle".into());
    }
    if adjacent(c_prime, x_prime) {
        return bad("c'x' is an edge of the cycle".into());
    }
    Ok(SpecialVertices {
        a_prime,
        c_prime,
        x_prime,
        y_prime,
    })
}

/// Named vertices of a resolved first-construction spec.
pub fn c1_special_vertices(spec: &ConstructionSpec) -> Result<SpecialVertices> {
    let spec = spec.resolve()?;
    if spec.variant != Variant::C1 {
        return Err(ConstructionError::UnexpectedParameter {
            variant: spec.variant,
            param: "special_edges",
        });
    }
    let cycles = two_factor(spec.two_factor.as_ref().unwrap())?;
    special_roles(&cycles[spec.long_cycle.unwrap()], spec.special_edges.unwrap())
}

fn validate_matchings(tf: &TwoFactorSpec, ms: &[Matching]) -> Result<()> {
    let k = tf.k();
    let bad = |msg: String| Err(ConstructionError::BadMatchings(msg));
    if ms.len() != k - 2 {
        return bad(format!("expected {} matchings, got {}", k - 2, ms.len()));
    }
    let mut used = vec![vec![false; k]; k];
    for i in 0..k {
        used[i][tf.sigma[i]] = true;
        used[i][tf.tau[i]] = true;
    }
    for m in ms {
        check_permutation(m, k, "matching")
            .or_else(|_| bad(format!("{m:?} is not a perfect matching")))?;
        for (i, &j) in m.iter().enumerate() {
            if std::mem::replace(&mut used[i][j], true) {
                return bad(format!("edge x{i} y{j} used twice"));
            }
        }
    }
    Ok(())
}

fn edge_list(k: usize) -> (Layout, Vec<[usize; 3]>) {
    (Layout { k }, Vec::with_capacity(k * k + 1))
}

fn push_matchings(lay: &Layout, ms: &[Matching], edges: &mut Vec<[usize; 3]>) {
    for (i, m) in ms.iter().enumerate() {
        for (x, &y) in m.iter().enumerate() {
            edges.push([lay.x(x), lay.y(y), lay.z(i)]);
        }
    }
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;

fn build_c1(spec: &ConstructionSpec) -> Result<(LinearTripleSystem, SpecialVertices)> {
    let k = spec.k;
    let (lay, mut edges) = edge_list(k);
    let cycles = two_factor(spec.two_factor.as_ref().unwrap())?;
    let long = spec.long_cycle.unwrap();
    let (i, j) = spec.special_edges.unwrap();
    let roles = special_roles(&cycles[long], (i, j))?;

    for (ci, cycle) in cycles.iter().enumerate() {
        let len = cycle.len();
        let edge = |p: usize| (cycle[p % len], cycle[(p + 1) % len]);
        if ci != long {
            // even cycle starting at its smallest X vertex: a, c, a, c, ...
            for p in 0..len {
                let (u, w) = edge(p);
                let color = if p % 2 == 0 { A } else { C };
                edges.push([u, w, lay.color(color)]);
            }
            continue;
        }
        // Two paths remain after deleting a'c' (position i) and x'y'
        // (position j). Each starts at a' or c' and alternates from the
        // anchor color of that endpoint.
        let anchor = |v: Vertex| {
            if v == roles.a_prime {
                Ok(A)
            } else if v == roles.c_prime {
                Ok(C)
            } else {
                Err(ConstructionError::ColoringInfeasible)
            }
        };
        let forward_start = cycle[(i + 1) % len];
        let mut color = anchor(forward_start)?;
        let mut p = i + 1;
        while p % len != j {
            let (u, w) = edge(p);
            edges.push([u, w, lay.color(color)]);
            color = A + C - color;
            p += 1;
        }
        let backward_start = cycle[i];
        let mut color = anchor(backward_start)?;
        let mut p = (i + len - 1) % len;
        while p != j {
            let (u, w) = edge(p);
            edges.push([u, w, lay.color(color)]);
            color = A + C - color;
            p = (p + len - 1) % len;
        }
        edges.push([roles.x_prime, roles.y_prime, lay.color(B)]);
    }
    push_matchings(&lay, spec.matchings.as_ref().unwrap(), &mut edges);
    edges.push([roles.a_prime, lay.b(), lay.c()]);
    edges.push([roles.c_prime, lay.a(), lay.b()]);
    Ok((make_system(3 * k + 1, edges)?, roles))
}

fn build_c2(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    let k = spec.k;
    let (lay, mut edges) = edge_list(k);
    let cycles = two_factor(spec.two_factor.as_ref().unwrap())?;
    let colors = spec.cycle_colors.as_ref().unwrap();
    for (cycle, perm) in cycles.iter().zip(colors) {
        let len = cycle.len();
        for p in 0..len {
            edges.push([cycle[p], cycle[(p + 1) % len], lay.color(perm[p % 3])]);
        }
    }
    push_matchings(&lay, spec.matchings.as_ref().unwrap(), &mut edges);
    edges.push([lay.a(), lay.b(), lay.c()]);
    Ok(make_system(3 * k + 1, edges)?)
}

fn build_c3(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    use small::*;
    let colors = spec.triangle_colors.unwrap();
    let color_vertex = [A, B, C];
    let mut edges = Vec::with_capacity(10);
    for i in 0..3 {
        edges.push([X[i], Y[i], V]);
    }
    for (side, tri) in [X, Y].iter().enumerate() {
        for p in 0..3 {
            edges.push([tri[p], tri[(p + 1) % 3], color_vertex[colors[side][p]]]);
        }
    }
    edges.push([A, B, C]);
    Ok(make_system(10, edges)?)
}

fn build_c4(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    use small::*;
    let [x1, x2, x3] = X;
    let [y1, y2, y3] = Y;
    let mv = match spec.mv_variant.unwrap() {
        1 => [[x1, y1], [x2, y2], [x3, y3]],
        2 => [[x1, y2], [x2, y1], [x3, y3]],
        3 => [[x1, y3], [x3, y1], [x2, y2]],
        other => return Err(ConstructionError::BadVariant(other)),
    };
    let mut edges = vec![
        [y1, y2, A],
        [x1, x2, A],
        [x2, x3, B],
        [y1, y3, C],
        [x1, x3, C],
        [A, B, y3],
        [B, C, y2],
    ];
    edges.extend(mv.iter().map(|&[x, y]| [x, y, V]));
    Ok(make_system(10, edges)?)
}

/// `L(i, j) = (i + j) mod k`.
pub fn cyclic_latin_square(k: usize) -> Vec<Vec<usize>> {
    (0..k).map(|i| (0..k).map(|j| (i + j) % k).collect()).collect()
}

/// The cyclic square under random row, column and symbol permutations.
fn random_isotope<R: Rng>(k: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut perms: [Vec<usize>; 3] = [(0..k).collect(), (0..k).collect(), (0..k).collect()];
    for p in perms.iter_mut() {
        p.shuffle(rng);
    }
    let base = cyclic_latin_square(k);
    (0..k)
        .map(|i| (0..k).map(|j| perms[2][base[perms[0][i]][perms[1][j]]]).collect())
        .collect()
}

pub fn validate_latin(latin: &[Vec<usize>], k: usize) -> Result<()> {
    let bad = |msg: String| Err(ConstructionError::InvalidLatinSquare(msg));
    if latin.len() != k || latin.iter().any(|row| row.len() != k) {
        return bad(format!("expected a {k}x{k} array"));
    }
    for i in 0..k {
        let mut row = vec![false; k];
        let mut col = vec![false; k];
        for j in 0..k {
            let (r, c) = (latin[i][j], latin[j][i]);
            if r >= k || c >= k {
                return bad(format!("symbol out of range 0..{k}"));
            }
            if std::mem::replace(&mut row[r], true) {
                return bad(format!("row {i} repeats symbol {r}"));
            }
            if std::mem::replace(&mut col[c], true) {
                return bad(format!("column {i} repeats symbol {c}"));
            }
        }
    }
    Ok(())
}

fn build_td(k: usize, latin: &[Vec<usize>]) -> Result<LinearTripleSystem> {
    validate_latin(latin, k)?;
    let edges = (0..k).flat_map(|i| (0..k).map(move |j| [i, k + j, 2 * k + latin[i][j]]));
    Ok(make_system(3 * k, edges)?)
}

/// Transversal design on `3k` vertices from a Latin square (cyclic by default).
pub fn transversal_design(
    k: usize,
    latin: Option<Vec<Vec<usize>>>,
) -> Result<LinearTripleSystem> {
    let mut spec = ConstructionSpec::new(Variant::Td, k);
    spec.latin = latin;
    spec.build()
}

/// Transversal design on `3k + 3` vertices minus its last vertex.
pub fn truncated_design(k: usize) -> Result<LinearTripleSystem> {
    ConstructionSpec::new(Variant::Truncated, k).build()
}

pub fn construct_c1(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    expect_variant(spec, Variant::C1)?.build()
}

pub fn construct_c2(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    expect_variant(spec, Variant::C2)?.build()
}

pub fn construct_c3(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    expect_variant(spec, Variant::C3)?.build()
}

pub fn construct_c4(spec: &ConstructionSpec) -> Result<LinearTripleSystem> {
    expect_variant(spec, Variant::C4)?.build()
}

fn expect_variant(spec: &ConstructionSpec, v: Variant) -> Result<&ConstructionSpec> {
    if spec.variant == v {
        Ok(spec)
    } else {
        Err(ConstructionError::UnexpectedParameter {
            variant: spec.variant,
            param: "variant",
        })
    }
}

/// Every labeled parameter choice of the four constructions at `k = 3`:
/// all 2-factors of `K_{3,3}` (each a Hamiltonian 6-cycle) with every valid
/// special-edge pair or cycle coloring, every triangle coloring, and every
/// `M_v` variant.
pub fn k3_parameter_sweep() -> Vec<ConstructionSpec> {
    let perms: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    let mut specs = Vec::new();
    for sigma in &perms {
        for tau in &perms {
            let Ok(tf) = TwoFactorSpec::new(sigma.clone(), tau.clone()) else {
                continue;
            };
            let cycles = two_factor(&tf).unwrap();
            for special in valid_special_edges(&cycles[0]) {
                specs.push(
                    ConstructionSpec::new(Variant::C1, 3)
                        .with_two_factor(tf.clone())
                        .with_special_edges(special.0, special.1),
                );
            }
            for p in &perms {
                let mut s = ConstructionSpec::new(Variant::C2, 3).with_two_factor(tf.clone());
                s.cycle_colors = Some(vec![[p[0], p[1], p[2]]]);
                specs.push(s);
            }
        }
    }
    for p in &perms {
        for q in &perms {
            specs.push(
                ConstructionSpec::new(Variant::C3, 3)
                    .with_triangle_colors([[p[0], p[1], p[2]], [q[0], q[1], q[2]]]),
            );
        }
    }
    for mv in 1..=3 {
        specs.push(ConstructionSpec::new(Variant::C4, 3).with_mv_variant(mv));
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sail::{find_sail_bruteforce, find_sail_fast};
    use crate::system::Triple;

    fn edges_of(h: &LinearTripleSystem) -> Vec<[usize; 3]> {
        h.edges().iter().map(Triple::vertices).collect()
    }

    fn sorted(mut e: Vec<[usize; 3]>) -> Vec<[usize; 3]> {
        for t in e.iter_mut() {
            t.sort_unstable();
        }
        e.sort_unstable();
        e
    }

    #[test]
    fn hamiltonian_k3_is_one_six_cycle() {
        let c = two_factor(&TwoFactorSpec::hamiltonian(3)).unwrap();
        assert_eq!(c, vec![vec![0, 3, 2, 5, 1, 4]]);
    }

    #[test]
    fn two_four_cycles() {
        // sigma = id, tau = (0 1)(2 3)
        let tf = TwoFactorSpec::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2]).unwrap();
        let c = two_factor(&tf).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|cy| cy.len() == 4));
        assert_eq!(c[0], vec![0, 4, 1, 5]);
    }

    #[test]
    fn k2_single_four_cycle() {
        let tf = TwoFactorSpec::new(vec![0, 1], vec![1, 0]).unwrap();
        assert_eq!(two_factor(&tf).unwrap().len(), 1);
        assert_eq!(two_factor(&tf).unwrap()[0].len(), 4);
    }

    #[test]
    fn derangement_violation() {
        assert_eq!(
            TwoFactorSpec::new(vec![0, 1, 2], vec![1, 1, 0]).unwrap_err(),
            ConstructionError::NotAPermutation("tau", 3)
        );
        assert_eq!(
            TwoFactorSpec::new(vec![0, 1, 2], vec![1, 0, 2]).unwrap_err(),
            ConstructionError::DerangementViolation(2)
        );
    }

    #[test]
    fn matching_decomposition_covers_remainder() {
        for k in 3..=7 {
            let tf = TwoFactorSpec::hamiltonian(k);
            let ms = matching_decomposition::<ChaCha8Rng>(&tf, None).unwrap();
            assert_eq!(ms.len(), k - 2);
            validate_matchings(&tf, &ms).unwrap();
            let total: usize = ms.iter().map(Vec::len).sum();
            assert_eq!(total, k * k - 2 * k);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tf = TwoFactorSpec::hamiltonian(5).shuffled(&mut rng);
        let ms = matching_decomposition(&tf, Some(&mut rng)).unwrap();
        assert_eq!(ms.len(), 3);
        validate_matchings(&tf, &ms).unwrap();
    }

    #[test]
    fn c1_default_k3() {
        let h = ConstructionSpec::new(Variant::C1, 3).build().unwrap();
        assert_eq!((h.n(), h.edge_count()), (10, 10));
        assert!(find_sail_fast(&h).is_none());
        assert!(find_sail_bruteforce(&h).is_none());
    }

    #[test]
    fn c1_k_too_small() {
        assert!(matches!(
            ConstructionSpec::new(Variant::C1, 2).build(),
            Err(ConstructionError::KTooSmall { k: 2, .. })
        ));
    }

    #[test]
    fn c1_needs_long_cycle() {
        let tf = TwoFactorSpec::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2]).unwrap();
        assert_eq!(
            ConstructionSpec::new(Variant::C1, 4).with_two_factor(tf).build(),
            Err(ConstructionError::NoLongCycle)
        );
    }

    #[test]
    fn c1_rejects_bad_special_edges() {
        // adjacent edges share a vertex
        assert!(matches!(
            ConstructionSpec::new(Variant::C1, 3).with_special_edges(0, 1).build(),
            Err(ConstructionError::BadSpecialEdges(_))
        ));
        // on a 6-cycle positions 0 and 2 put y' next to a'
        assert!(matches!(
            ConstructionSpec::new(Variant::C1, 3).with_special_edges(0, 2).build(),
            Err(ConstructionError::BadSpecialEdges(_))
        ));
        assert_eq!(valid_special_edges(&[0, 3, 2, 5, 1, 4]).len(), 6);
    }

    #[test]
    fn c1_default_k5_is_sail_free() {
        let h = ConstructionSpec::new(Variant::C1, 5).build().unwrap();
        assert_eq!((h.n(), h.edge_count()), (16, 26));
        assert!(find_sail_bruteforce(&h).is_none());
        assert!(find_sail_fast(&h).is_none());
    }

    #[test]
    fn c1_default_k3_edges() {
        // 6-cycle x1 y1 x3 y3 x2 y2; a'c' = x1y1, x'y' = y3x2.
        // From c' = y1: y1x3 (c), x3y3 (a). From a' = x1: x1y2 (a), y2x2 (c).
        let spec = ConstructionSpec::new(Variant::C1, 3);
        let roles = c1_special_vertices(&spec).unwrap();
        assert_eq!(
            roles,
            SpecialVertices {
                a_prime: 0,
                c_prime: 3,
                x_prime: 1,
                y_prime: 5
            }
        );
        // z1 = 6, a = 7, b = 8, c = 9
        let expected = sorted(vec![
            [2, 3, 9],
            [2, 5, 7],
            [0, 4, 7],
            [1, 4, 9],
            [1, 5, 8],
            [0, 5, 6],
            [1, 3, 6],
            [2, 4, 6],
            [0, 8, 9],
            [3, 7, 8],
        ]);
        assert_eq!(edges_of(&spec.build().unwrap()), expected);
    }

    #[test]
    fn c2_examples() {
        let h = ConstructionSpec::new(Variant::C2, 3).build().unwrap();
        assert_eq!((h.n(), h.edge_count()), (10, 10));
        assert!(find_sail_bruteforce(&h).is_none());
        assert_eq!(
            ConstructionSpec::new(Variant::C2, 4).build(),
            Err(ConstructionError::DivisibilityViolation(4))
        );
        let h = ConstructionSpec::new(Variant::C2, 6).build().unwrap();
        assert_eq!((h.n(), h.edge_count()), (19, 37));
        assert!(find_sail_fast(&h).is_none());
        let tf = TwoFactorSpec::from_cycle_halves(&[2, 4]);
        assert!(matches!(
            ConstructionSpec::new(Variant::C2, 6).with_two_factor(tf).build(),
            Err(ConstructionError::BadCycleLengths(_))
        ));
    }

    #[test]
    fn c3_default_edges() {
        use small::*;
        let h = ConstructionSpec::new(Variant::C3, 3).build().unwrap();
        let [x1, x2, x3] = X;
        let [y1, y2, y3] = Y;
        let expected = sorted(vec![
            [x1, y1, V],
            [x2, y2, V],
            [x3, y3, V],
            [x1, x2, A],
            [y1, y2, A],
            [x2, x3, B],
            [y2, y3, B],
            [x3, x1, C],
            [y3, y1, C],
            [A, B, C],
        ]);
        assert_eq!(edges_of(&h), expected);
        assert!(find_sail_bruteforce(&h).is_none());
    }

    #[test]
    fn c3_bad_coloring() {
        assert!(matches!(
            ConstructionSpec::new(Variant::C3, 3)
                .with_triangle_colors([[0, 0, 1], [0, 1, 2]])
                .build(),
            Err(ConstructionError::BadColorAssignment(_))
        ));
        assert!(matches!(
            ConstructionSpec::new(Variant::C3, 4).build(),
            Err(ConstructionError::FixedK { k: 4, .. })
        ));
    }

    #[test]
    fn c4_variants() {
        use small::*;
        let h = ConstructionSpec::new(Variant::C4, 3).build().unwrap();
        let [x1, x2, x3] = X;
        let [y1, y2, y3] = Y;
        let expected = sorted(vec![
            [y1, y2, A],
            [x1, x2, A],
            [x2, x3, B],
            [y1, y3, C],
            [x1, x3, C],
            [x1, y1, V],
            [x2, y2, V],
            [x3, y3, V],
            [A, B, y3],
            [B, C, y2],
        ]);
        assert_eq!(edges_of(&h), expected);
        for mv in 1..=3 {
            let h = ConstructionSpec::new(Variant::C4, 3).with_mv_variant(mv).build().unwrap();
            assert_eq!(h.edge_count(), 10);
            assert!(find_sail_bruteforce(&h).is_none());
            assert!(find_sail_fast(&h).is_none());
        }
        assert_eq!(
            ConstructionSpec::new(Variant::C4, 3).with_mv_variant(4).build(),
            Err(ConstructionError::BadVariant(4))
        );
    }

    #[test]
    fn transversal_designs() {
        let h = transversal_design(1, None).unwrap();
        assert_eq!((h.n(), h.edge_count()), (3, 1));
        let h = transversal_design(2, None).unwrap();
        assert_eq!((h.n(), h.edge_count()), (6, 4));
        let s = crate::system::shadow(&h);
        // all 12 cross-group pairs, each once (linear, so 3m distinct pairs)
        assert_eq!(s.pairs.len(), 12);
        assert!(s.pairs.iter().all(|&(u, v)| u / 2 != v / 2));
        let h = transversal_design(3, None).unwrap();
        assert_eq!(h.edge_count(), 9);
        assert!(find_sail_bruteforce(&h).is_none());
        assert!(matches!(
            transversal_design(2, Some(vec![vec![0, 1], vec![0, 1]])),
            Err(ConstructionError::InvalidLatinSquare(_))
        ));
    }

    #[test]
    fn truncated_designs() {
        let h = truncated_design(1).unwrap();
        assert_eq!((h.n(), h.edge_count()), (5, 2));
        let h = truncated_design(2).unwrap();
        assert_eq!((h.n(), h.edge_count()), (8, 6));
        let h = truncated_design(4).unwrap();
        assert_eq!((h.n(), h.edge_count()), (14, 20));
        assert!(find_sail_fast(&h).is_none());
        assert!(find_sail_bruteforce(&h).is_none());
    }

    #[test]
    fn resolve_is_reproducible() {
        for v in [Variant::C1, Variant::C2, Variant::Td, Variant::C3, Variant::C4] {
            let k = if v == Variant::C2 { 6 } else if matches!(v, Variant::C3 | Variant::C4) { 3 } else { 5 };
            let spec = ConstructionSpec::new(v, k).with_seed(11);
            let resolved = spec.resolve().unwrap();
            assert!(resolved.seed.is_none());
            assert_eq!(resolved.build().unwrap(), spec.build().unwrap());
            assert_eq!(resolved.resolve().unwrap(), resolved);
        }
    }

    #[test]
    fn inapplicable_parameters_are_rejected() {
        assert!(matches!(
            ConstructionSpec::new(Variant::C3, 3).with_mv_variant(1).build(),
            Err(ConstructionError::UnexpectedParameter { param: "mv_variant", .. })
        ));
    }

    #[test]
    fn k3_sweep_outputs_are_extremal() {
        let specs = k3_parameter_sweep();
        assert!(specs.len() > 50);
        for s in specs {
            let h = s.build().unwrap();
            assert_eq!((h.n(), h.edge_count()), (10, 10), "{s:?}");
            assert!(find_sail_fast(&h).is_none(), "{s:?}");
        }
    }
}
