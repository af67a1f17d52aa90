//! Zero-level decomposition of ω and merge trees of its nested level sets.
//!
//! The central structure Ω⁺ = {ω > 0} uses 8-connectivity, the peripheral
//! structure Ω₋ = {ω < 0} uses 4-connectivity, and pixels with ω = 0 belong
//! to neither. Inside each component, a sorted sweep with union-find records
//! every merge of two level-set components; read from the last merge down,
//! these merges form a proper binary split tree whose internal nodes are the
//! saddle points of ω.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Connectivity, Lattice, ShapeGrid};
use crate::solver::Field;
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn connectivity(self) -> Connectivity {
        match self {
            Sign::Positive => Connectivity::Eight,
            Sign::Negative => Connectivity::Four,
        }
    }

    /// Leading digit of part-tree ids: 1 for Ω⁺, 2 for Ω₋.
    pub fn digit(self) -> char {
        match self {
            Sign::Positive => '1',
            Sign::Negative => '2',
        }
    }

    fn contains(self, value: f64) -> bool {
        match self {
            Sign::Positive => value > 0.0,
            Sign::Negative => value < 0.0,
        }
    }
}

/// Orders pixels from most to least extreme: larger |ω| first, then lower
/// linear index.
fn more_extreme(a: (f64, usize), b: (f64, usize)) -> core::cmp::Ordering {
    b.0.abs().total_cmp(&a.0.abs()).then(a.1.cmp(&b.1))
}

/// One connected component of Ω⁺ or Ω₋.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelComponent {
    /// Sorted raster indices.
    pub pixels: Vec<usize>,
    /// Max of ω (Ω⁺) or min of ω (Ω₋).
    pub extremum_value: f64,
    pub extremum_pixel: usize,
    /// Euler characteristic under the sign's connectivity.
    pub euler: i64,
}

impl LevelComponent {
    pub fn holes(&self) -> usize {
        (1 - self.euler).max(0) as usize
    }

    pub fn is_simply_connected(&self) -> bool {
        self.euler == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignRegion {
    pub sign: Sign,
    /// Ordered by decreasing |extremum|, then extremum pixel.
    pub components: Vec<LevelComponent>,
}

impl SignRegion {
    pub fn pixel_count(&self) -> usize {
        self.components.iter().map(|c| c.pixels.len()).sum()
    }
}

/// Splits the shape into Ω⁺ and Ω₋ components.
pub fn sign_decompose(field: &Field) -> Result<(SignRegion, SignRegion)> {
    let positive = sign_region(field, Sign::Positive);
    if positive.components.is_empty() {
        return Err(Error::EmptyPositiveRegion);
    }
    Ok((positive, sign_region(field, Sign::Negative)))
}

fn sign_region(field: &Field, sign: Sign) -> SignRegion {
    let grid = field.grid();
    let member: Vec<bool> = (0..grid.len()).map(|p| grid.is_interior(p) && sign.contains(field.at(p))).collect();
    let conn = sign.connectivity();
    let (labels, count) = grid.label_components(&member, conn);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (p, &l) in labels.iter().enumerate() {
        if l != u32::MAX {
            buckets[l as usize].push(p);
        }
    }
    let mut components: Vec<LevelComponent> = buckets
        .into_iter()
        .map(|pixels| {
            let (extremum_value, extremum_pixel) = pixels
                .iter()
                .map(|&p| (field.at(p), p))
                .min_by(|&a, &b| more_extreme(a, b))
                .expect("components are non-empty");
            let euler = euler_characteristic(grid, &pixels, conn);
            LevelComponent { pixels, extremum_value, extremum_pixel, euler }
        })
        .collect();
    components.sort_by(|a, b| more_extreme((a.extremum_value, a.extremum_pixel), (b.extremum_value, b.extremum_pixel)));
    SignRegion { sign, components }
}

/// Euler characteristic (components minus holes) of a pixel set, counted
/// from its 2×2 neighborhood configurations.
pub fn euler_characteristic(grid: &ShapeGrid, pixels: &[usize], conn: Connectivity) -> i64 {
    let member = grid.membership(pixels);
    if grid.lattice() == Lattice::Line {
        return (0..member.len()).filter(|&p| member[p] && (p == 0 || !member[p - 1])).count() as i64;
    }
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let at = |x: isize, y: isize| x >= 0 && y >= 0 && x < w && y < h && member[(y * w + x) as usize];
    let (mut q1, mut q3, mut qd) = (0i64, 0i64, 0i64);
    for y in -1..h {
        for x in -1..w {
            let (a, b, c, d) = (at(x, y), at(x + 1, y), at(x, y + 1), at(x + 1, y + 1));
            match a as u8 + b as u8 + c as u8 + d as u8 {
                1 => q1 += 1,
                3 => q3 += 1,
                2 if (a && d) || (b && c) => qd += 1,
                _ => {}
            }
        }
    }
    match conn {
        Connectivity::Four => (q1 - q3 + 2 * qd) / 4,
        Connectivity::Eight => (q1 - q3 - 2 * qd) / 4,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitNodeKind {
    /// A local extremum's level-set component.
    Leaf,
    /// The region splits at `saddle_value` into two children, ordered by
    /// decreasing |extremum|.
    Split { saddle_value: f64, saddle_pixel: usize, children: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitNode {
    pub kind: SplitNodeKind,
    pub extremum_value: f64,
    pub extremum_pixel: usize,
    /// Pixels first absorbed while this node was the active set; the node's
    /// level-set region is the union over its subtree.
    pub own_pixels: Vec<usize>,
}

/// A merge event viewed top-down: `parent`'s region splits into `children`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitEvent {
    pub saddle_value: f64,
    pub saddle_pixel: usize,
    pub parent: usize,
    pub children: [usize; 2],
}

/// Binary split tree of one sign-region component.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTree {
    pub sign: Sign,
    pub component: usize,
    pub nodes: Vec<SplitNode>,
    pub root: usize,
}

impl SplitTree {
    pub fn children(&self, node: usize) -> Option<[usize; 2]> {
        match self.nodes[node].kind {
            SplitNodeKind::Split { children, .. } => Some(children),
            SplitNodeKind::Leaf => None,
        }
    }

    pub fn events(&self) -> Vec<SplitEvent> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            if let SplitNodeKind::Split { saddle_value, saddle_pixel, children } = self.nodes[n].kind {
                out.push(SplitEvent { saddle_value, saddle_pixel, parent: n, children });
                stack.push(children[1]);
                stack.push(children[0]);
            }
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == SplitNodeKind::Leaf).count()
    }

    /// Sorted pixels of `node`'s level-set region.
    pub fn region(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            out.extend_from_slice(&self.nodes[n].own_pixels);
            if let Some(c) = self.children(n) {
                stack.extend_from_slice(&c);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Per-component split trees of both sign regions.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitForest {
    pub positive: Vec<SplitTree>,
    pub negative: Vec<SplitTree>,
}

impl SplitForest {
    pub fn build(field: &Field, positive: &SignRegion, negative: &SignRegion) -> Self {
        let trees = |region: &SignRegion| (0..region.components.len()).map(|c| split_tree(field, region, c)).collect();
        SplitForest { positive: trees(positive), negative: trees(negative) }
    }

    pub fn trees(&self, sign: Sign) -> &[SplitTree] {
        match sign {
            Sign::Positive => &self.positive,
            Sign::Negative => &self.negative,
        }
    }
}

/// Builds the split tree of one component by sweeping its pixels from most
/// to least extreme ω.
///
/// When a pixel joins k ≥ 2 existing sets, k − 1 binary splits are recorded
/// at the same saddle value, merging sets in order of decreasing |extremum|.
pub fn split_tree(field: &Field, region: &SignRegion, component: usize) -> SplitTree {
    let grid = field.grid();
    let sign = region.sign;
    let pixels = &region.components[component].pixels;
    let conn = sign.connectivity();

    let mut local = vec![u32::MAX; grid.len()];
    for (i, &p) in pixels.iter().enumerate() {
        local[p] = i as u32;
    }
    let mut order: Vec<usize> = (0..pixels.len()).collect();
    order.sort_by(|&a, &b| more_extreme((field.at(pixels[a]), pixels[a]), (field.at(pixels[b]), pixels[b])));

    let mut uf = UnionFind::new(pixels.len());
    let mut visited = vec![false; pixels.len()];
    // per union-find root: the active tree node
    let mut active = vec![usize::MAX; pixels.len()];
    let mut nodes: Vec<SplitNode> = Vec::new();
    let mut roots: Vec<usize> = Vec::with_capacity(8);

    for &i in &order {
        let p = pixels[i];
        let value = field.at(p);
        visited[i] = true;
        roots.clear();
        for q in grid.neighbors(p, conn) {
            let j = local[q];
            if j != u32::MAX && visited[j as usize] {
                let r = uf.find(j as usize);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        let node = match roots.len() {
            0 => {
                nodes.push(SplitNode {
                    kind: SplitNodeKind::Leaf,
                    extremum_value: value,
                    extremum_pixel: p,
                    own_pixels: Vec::new(),
                });
                nodes.len() - 1
            }
            1 => active[roots[0]],
            _ => {
                roots.sort_by(|&a, &b| {
                    let (na, nb) = (&nodes[active[a]], &nodes[active[b]]);
                    more_extreme((na.extremum_value, na.extremum_pixel), (nb.extremum_value, nb.extremum_pixel))
                });
                let mut current = active[roots[0]];
                for &r in &roots[1..] {
                    let other = active[r];
                    nodes.push(SplitNode {
                        kind: SplitNodeKind::Split { saddle_value: value, saddle_pixel: p, children: [current, other] },
                        extremum_value: nodes[current].extremum_value,
                        extremum_pixel: nodes[current].extremum_pixel,
                        own_pixels: Vec::new(),
                    });
                    current = nodes.len() - 1;
                }
                current
            }
        };
        nodes[node].own_pixels.push(p);
        let mut root = i;
        for &r in &roots {
            root = uf.union(root, r);
        }
        active[root] = node;
    }
    for n in &mut nodes {
        n.own_pixels.sort_unstable();
    }
    let root = nodes.len() - 1;
    SplitTree { sign, component, nodes, root }
}
