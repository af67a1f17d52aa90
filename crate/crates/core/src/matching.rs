//! Matching of sampled part trees as a maximum-weight clique in their
//! association graph.
//!
//! A vertex pairs a node of tree A with a node of tree B of the same sign
//! class whose scale-free attributes are similar enough. Two vertices are
//! adjacent when they use distinct nodes on both sides and the two A-nodes
//! stand in the same ancestor/descendant/unrelated relation as the two
//! B-nodes, so every clique is a one-to-one, hierarchy-preserving matching.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::parts::{PartNode, PartTree};
use crate::random::{sample, RandomizedTree, SampledTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeNorms {
    /// |Ω| in pixels².
    pub area: f64,
    /// Global max |ω|.
    pub max_abs_omega: f64,
}

impl ShapeNorms {
    pub fn of(tree: &PartTree) -> Self {
        ShapeNorms { area: tree.shape_area as f64, max_abs_omega: tree.max_abs_omega }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchConfig {
    /// Minimum similarity for a node pair to become a vertex.
    pub tau: f64,
    pub sigma_area: f64,
    pub sigma_w: f64,
    /// Whether the two roots may be paired.
    pub include_root: bool,
    pub vertex_cap: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig { tau: 0.1, sigma_area: 0.1, sigma_w: 0.2, include_root: true, vertex_cap: 400 }
    }
}

/// `exp(−(|â_a − â_b|/σ_area + |ŵ_a − ŵ_b|/σ_w))` on area and max |ω|
/// normalized by the owning shape.
pub fn similarity(a: &PartNode, b: &PartNode, norm_a: ShapeNorms, norm_b: ShapeNorms, config: &MatchConfig) -> f64 {
    let area = (a.area as f64 / norm_a.area - b.area as f64 / norm_b.area).abs();
    let peak = (a.max_abs_omega / norm_a.max_abs_omega - b.max_abs_omega / norm_b.max_abs_omega).abs();
    libm::exp(-(area / config.sigma_area + peak / config.sigma_w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssocVertex {
    pub a: usize,
    pub b: usize,
    pub similarity: f64,
}

/// Weighted undirected graph with bitset adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationGraph {
    pub vertices: Vec<AssocVertex>,
    adjacency: Vec<Vec<u64>>,
}

impl AssociationGraph {
    /// A graph over bare weights, for vertices that do not come from trees.
    pub fn from_weighted(weights: &[f64], edges: &[(usize, usize)]) -> Self {
        let vertices = weights.iter().enumerate().map(|(i, &w)| AssocVertex { a: i, b: i, similarity: w }).collect();
        let mut g = AssociationGraph { vertices, adjacency: Vec::new() };
        g.adjacency = vec![vec![0; words(weights.len())]; weights.len()];
        for &(u, v) in edges {
            g.connect(u, v);
        }
        g
    }

    fn connect(&mut self, u: usize, v: usize) {
        if u != v {
            self.adjacency[u][v / 64] |= 1 << (v % 64);
            self.adjacency[v][u / 64] |= 1 << (u % 64);
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|u| (u + 1..n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v))).collect()
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ancestor,
    Descendant,
    Unrelated,
}

/// Ancestor table of a sampled tree, indexed by base node.
struct Ancestry {
    anc: Vec<Vec<bool>>,
}

impl Ancestry {
    fn new(t: &SampledTree) -> Self {
        let n = t.base().nodes.len();
        let mut anc = vec![vec![false; n]; n];
        for v in t.nodes() {
            let mut cur = t.parent(v);
            while let Some(p) = cur {
                anc[p][v] = true;
                cur = t.parent(p);
            }
        }
        Ancestry { anc }
    }

    fn relation(&self, x: usize, y: usize) -> Relation {
        if self.anc[x][y] {
            Relation::Ancestor
        } else if self.anc[y][x] {
            Relation::Descendant
        } else {
            Relation::Unrelated
        }
    }
}

/// Hierarchical relation of `x` to `y` in a sampled tree.
pub fn relation(t: &SampledTree, x: usize, y: usize) -> Relation {
    if t.is_ancestor(x, y) {
        Relation::Ancestor
    } else if t.is_ancestor(y, x) {
        Relation::Descendant
    } else {
        Relation::Unrelated
    }
}

pub fn build_association(ta: &SampledTree, tb: &SampledTree, config: &MatchConfig) -> AssociationGraph {
    let (base_a, base_b) = (ta.base(), tb.base());
    let (norm_a, norm_b) = (ShapeNorms::of(base_a), ShapeNorms::of(base_b));
    let mut vertices = Vec::new();
    for a in ta.nodes() {
        let na = &base_a.nodes[a];
        if na.parent.is_none() && !config.include_root {
            continue;
        }
        for b in tb.nodes() {
            let nb = &base_b.nodes[b];
            if na.sign != nb.sign {
                continue;
            }
            let s = similarity(na, nb, norm_a, norm_b, config);
            if s >= config.tau {
                vertices.push(AssocVertex { a, b, similarity: s });
            }
        }
    }
    let (anc_a, anc_b) = (Ancestry::new(ta), Ancestry::new(tb));
    let n = vertices.len();
    let mut g = AssociationGraph { vertices, adjacency: vec![vec![0; words(n)]; n] };
    for u in 0..n {
        for v in u + 1..n {
            let (x, y) = (g.vertices[u], g.vertices[v]);
            if x.a != y.a && x.b != y.b && anc_a.relation(x.a, y.a) == anc_b.relation(x.b, y.b) {
                g.connect(u, v);
            }
        }
    }
    g
}

/// A clique with its canonical score: the sum of weights taken in
/// increasing vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct Clique {
    pub vertices: Vec<usize>,
    pub score: f64,
}

impl Clique {
    fn empty() -> Self {
        Clique { vertices: Vec::new(), score: 0.0 }
    }

    /// Total order: higher score, then more vertices, then the
    /// lexicographically smaller vertex list.
    fn beats(&self, other: &Clique) -> bool {
        match self.score.total_cmp(&other.score) {
            core::cmp::Ordering::Greater => true,
            core::cmp::Ordering::Less => false,
            core::cmp::Ordering::Equal => match self.vertices.len().cmp(&other.vertices.len()) {
                core::cmp::Ordering::Greater => true,
                core::cmp::Ordering::Less => false,
                core::cmp::Ordering::Equal => self.vertices < other.vertices,
            },
        }
    }
}

const PRUNE_SLACK: f64 = 1e-9;

struct CliqueSearch<'g> {
    graph: &'g AssociationGraph,
    best: Clique,
}

impl CliqueSearch<'_> {
    fn weight(&self, v: usize) -> f64 {
        self.graph.vertices[v].similarity
    }

    /// Greedy weighted coloring: returns candidates grouped by color and the
    /// cumulative sum of per-color maximum weights, an upper bound on any
    /// clique inside each prefix.
    fn color_sort(&self, cand: &[usize]) -> (Vec<usize>, Vec<f64>) {
        let mut sorted = cand.to_vec();
        sorted.sort_by(|&u, &v| self.weight(v).total_cmp(&self.weight(u)).then(u.cmp(&v)));
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for v in sorted {
            match classes.iter_mut().find(|c| c.iter().all(|&u| !self.graph.has_edge(u, v))) {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cand.len());
        let mut bounds = Vec::with_capacity(cand.len());
        let mut total = 0.0;
        for class in classes {
            total += self.weight(class[0]);
            for v in class {
                order.push(v);
                bounds.push(total);
            }
        }
        (order, bounds)
    }

    fn consider(&mut self, current: &[usize]) {
        let mut vertices = current.to_vec();
        vertices.sort_unstable();
        let score = vertices.iter().map(|&v| self.weight(v)).sum();
        let candidate = Clique { vertices, score };
        if candidate.beats(&self.best) {
            self.best = candidate;
        }
    }

    fn expand(&mut self, current: &mut Vec<usize>, weight: f64, cand: &[usize]) {
        let (order, bounds) = self.color_sort(cand);
        for i in (0..order.len()).rev() {
            if weight + bounds[i] < self.best.score - PRUNE_SLACK {
                return;
            }
            let v = order[i];
            current.push(v);
            self.consider(current);
            let next: Vec<usize> = order[..i].iter().copied().filter(|&u| self.graph.has_edge(u, v)).collect();
            if !next.is_empty() {
                self.expand(current, weight + self.weight(v), &next);
            }
            current.pop();
        }
    }
}

/// Exact maximum-weight clique by branch and bound with a greedy coloring
/// bound. Ties prefer more vertices, then the lexicographically smallest
/// vertex list.
pub fn max_clique(graph: &AssociationGraph, vertex_cap: usize) -> Result<Clique> {
    if graph.len() > vertex_cap {
        return Err(Error::VertexCapExceeded { found: graph.len(), cap: vertex_cap });
    }
    let mut search = CliqueSearch { graph, best: Clique::empty() };
    let all: Vec<usize> = (0..graph.len()).collect();
    search.expand(&mut Vec::new(), 0.0, &all);
    Ok(search.best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub a: usize,
    pub b: usize,
    pub similarity: f64,
}

/// The winning correspondence between two sampled trees.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub pairs: Vec<MatchedPair>,
    pub score: f64,
    /// Draw seeds of the winning samples.
    pub seeds: (u64, u64),
    pub sample_a: SampledTree,
    pub sample_b: SampledTree,
}

impl Matching {
    pub fn partner_of_a(&self, a: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.a == a).map(|p| p.b)
    }

    pub fn partner_of_b(&self, b: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.b == b).map(|p| p.a)
    }

    pub fn unmatched_a(&self) -> Vec<usize> {
        self.sample_a.nodes().into_iter().filter(|&n| self.partner_of_a(n).is_none()).collect()
    }

    pub fn unmatched_b(&self) -> Vec<usize> {
        self.sample_b.nodes().into_iter().filter(|&n| self.partner_of_b(n).is_none()).collect()
    }
}

/// Matches one pair of sampled trees.
pub fn match_samples(ta: &SampledTree, tb: &SampledTree, config: &MatchConfig) -> Result<Matching> {
    let g = build_association(ta, tb, config);
    let clique = max_clique(&g, config.vertex_cap)?;
    let pairs = clique
        .vertices
        .iter()
        .map(|&v| {
            let x = g.vertices[v];
            MatchedPair { a: x.a, b: x.b, similarity: x.similarity }
        })
        .collect();
    Ok(Matching {
        pairs,
        score: clique.score,
        seeds: (ta.draw_seed, tb.draw_seed),
        sample_a: ta.clone(),
        sample_b: tb.clone(),
    })
}

/// Seed of the `index`-th sample under `base_seed` (a splitmix64 step).
/// Both trees use the same seed sequence.
pub fn sample_seed(base_seed: u64, index: usize) -> u64 {
    let mut z = base_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples each tree `num_samples` times, matches all sample pairs, and
/// returns the highest-scoring matching (ties go to the earlier sample pair).
pub fn match_shapes(
    rtree_a: &RandomizedTree,
    rtree_b: &RandomizedTree,
    num_samples: usize,
    base_seed: u64,
    config: &MatchConfig,
) -> Result<Matching> {
    if num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..num_samples).map(|i| sample_seed(base_seed, i)).collect();
    let samples_a: Vec<SampledTree> = seeds.iter().map(|&s| sample(rtree_a, s)).collect();
    let samples_b: Vec<SampledTree> = seeds.iter().map(|&s| sample(rtree_b, s)).collect();
    let mut best: Option<Matching> = None;
    for ta in &samples_a {
        for tb in &samples_b {
            let m = match_samples(ta, tb, config)?;
            if best.as_ref().is_none_or(|b| m.score > b.score) {
                best = Some(m);
            }
        }
    }
    Ok(best.expect("at least one sample pair"))
}
