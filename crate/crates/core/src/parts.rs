//! The initial part tree: shape root, one node per retained Ω⁺/Ω₋
//! component, and below each a proper binary tree of saddle splits. Every
//! node stores its level-set seed, the watershed part grown from that seed,
//! and the part's area and max |ω|.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Connectivity, ShapeGrid};
use crate::heap::Prioritized;
use crate::solver::Field;
use crate::topology::{sign_decompose, Sign, SignRegion, SplitForest, SplitNodeKind, SplitTree};

/// Size and adjacency filters applied while splitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Minimum seed area as a fraction of |Ω|.
    pub seed_min_frac: f64,
    /// Minimum part area as a fraction of |Ω|.
    pub part_min_frac: f64,
    /// Reject Ω₋ splits whose zones both miss the closure of Ω⁺.
    pub adjacency_filter: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { seed_min_frac: 0.0005, part_min_frac: 0.005, adjacency_filter: true }
    }
}

impl FilterConfig {
    /// Accepts every split.
    pub fn disabled() -> Self {
        FilterConfig { seed_min_frac: 0.0, part_min_frac: 0.0, adjacency_filter: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartNode {
    /// Path id: "0" for the root, `1k`/`2k` for the k-th Ω⁺/Ω₋ component,
    /// then one digit (1 or 2) per split. Component indices of 10 or more
    /// are written `1.10.` so ids stay unambiguous.
    pub id: String,
    /// Root is level 1.
    pub level: usize,
    /// `None` for the root.
    pub sign: Option<Sign>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Sorted raster indices of the level-set component.
    pub seed: Vec<usize>,
    /// Sorted raster indices of the enclosing watershed zone.
    pub part: Vec<usize>,
    /// ω at the saddle that created this node; 0 for the root and level 2.
    pub saddle_value: f64,
    pub parent_saddle_value: f64,
    pub saddle_pixel: Option<usize>,
    pub extremum_value: f64,
    pub extremum_pixel: Option<usize>,
    pub area: usize,
    pub max_abs_omega: f64,
    /// `(|s| − |s_parent|) / |s|`, defined from level 3 on.
    pub d_omega: Option<f64>,
}

impl PartNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Nodes in pre-order with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PartTree {
    pub width: usize,
    pub height: usize,
    /// |Ω|.
    pub shape_area: usize,
    /// Global max |ω|.
    pub max_abs_omega: f64,
    pub nodes: Vec<PartNode>,
}

/// Skeleton description of a node for hand-built trees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlineNode<'a> {
    pub id: &'a str,
    pub parent: Option<&'a str>,
    pub saddle_value: f64,
    pub area: usize,
    pub max_abs_omega: f64,
}

impl PartTree {
    pub fn root(&self) -> &PartNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_leaf())
    }

    /// Parent → child index pairs in pre-order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.nodes.iter().enumerate().flat_map(|(i, n)| n.children.iter().map(move |&c| (i, c))).collect()
    }

    /// Builds a tree from an outline (fixtures, tests). Signs come from the
    /// leading id digit, levels from the parent chain, and Dω from the
    /// saddle values. Seeds and parts are left empty.
    pub fn from_outline(shape_area: usize, max_abs_omega: f64, outline: &[OutlineNode<'_>]) -> Result<PartTree> {
        let roots: Vec<_> = outline.iter().filter(|n| n.parent.is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidParameter(format!("outline needs one root, found {}", roots.len())));
        }
        let mut nodes = Vec::with_capacity(outline.len());
        let mut stack: Vec<(usize, Option<usize>)> =
            vec![(outline.iter().position(|n| n.parent.is_none()).expect("checked above"), None)];
        while let Some((o, parent)) = stack.pop() {
            let spec = &outline[o];
            let (level, parent_saddle) = match parent {
                None => (1, 0.0),
                Some(p) => {
                    let pn: &PartNode = &nodes[p];
                    (pn.level + 1, pn.saddle_value)
                }
            };
            let sign = match (level, spec.id.as_bytes().first()) {
                (1, _) => None,
                (_, Some(b'1')) => Some(Sign::Positive),
                (_, Some(b'2')) => Some(Sign::Negative),
                _ => return Err(Error::InvalidParameter(format!("bad node id `{}`", spec.id))),
            };
            let idx = nodes.len();
            nodes.push(PartNode {
                id: spec.id.to_string(),
                level,
                sign,
                parent,
                children: Vec::new(),
                seed: Vec::new(),
                part: Vec::new(),
                saddle_value: spec.saddle_value,
                parent_saddle_value: parent_saddle,
                saddle_pixel: None,
                extremum_value: 0.0,
                extremum_pixel: None,
                area: spec.area,
                max_abs_omega: spec.max_abs_omega,
                d_omega: (level >= 3).then(|| d_omega(spec.saddle_value, parent_saddle)),
            });
            if let Some(p) = parent {
                nodes[p].children.push(idx);
            }
            let mut kids: Vec<usize> = (0..outline.len()).filter(|&k| outline[k].parent == Some(spec.id)).collect();
            kids.sort_by(|&a, &b| outline[a].id.cmp(outline[b].id));
            for &k in kids.iter().rev() {
                stack.push((k, Some(idx)));
            }
        }
        if nodes.len() != outline.len() {
            return Err(Error::InvalidParameter("outline has unreachable nodes".into()));
        }
        Ok(PartTree { width: 0, height: 0, shape_area, max_abs_omega, nodes })
    }

    /// Checks structural invariants: parent/child links, pre-order layout,
    /// unique ids, and properness of every split below level 2.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.nodes.is_empty() || self.nodes[0].parent.is_some() {
            return bad("tree has no root at index 0".into());
        }
        let mut ids: Vec<&str> = self.nodes.iter().map(|n| n.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate node ids".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                if c <= i || c >= self.nodes.len() || self.nodes[c].parent != Some(i) {
                    return bad(format!("inconsistent child link {} -> {c}", n.id));
                }
            }
            if n.level >= 2 && !n.children.is_empty() && n.children.len() != 2 {
                return bad(format!("node {} splits into {} parts", n.id, n.children.len()));
            }
        }
        Ok(())
    }
}

/// Relative saddle gap of a split.
pub fn d_omega(saddle: f64, parent_saddle: f64) -> f64 {
    (saddle.abs() - parent_saddle.abs()) / saddle.abs()
}

/// Partitions `domain` among `seeds` by priority flooding in order of
/// decreasing |ω|.
///
/// A claimed pixel joins the zone of its claimed neighbor with the largest
/// |ω| (lower zone index on ties); frontier pixels with equal |ω| are taken
/// in raster order. Zones are returned as sorted pixel lists.
pub fn watershed_parts(field: &Field, seeds: &[Vec<usize>], domain: &[usize], sign: Sign) -> Result<Vec<Vec<usize>>> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let grid = field.grid();
    const OUTSIDE: u32 = u32::MAX;
    const FREE: u32 = u32::MAX - 1;
    let mut label = vec![OUTSIDE; grid.len()];
    for &p in domain {
        label[p] = FREE;
    }
    for (k, seed) in seeds.iter().enumerate() {
        for &p in seed {
            if label[p] != FREE {
                return Err(Error::InvalidParameter(format!(
                    "seed {k} overlaps another seed or leaves the domain at pixel {p}"
                )));
            }
            label[p] = k as u32;
        }
    }
    let conn = sign.connectivity();
    let mut heap = BinaryHeap::new();
    let push_free = |heap: &mut BinaryHeap<Prioritized>, label: &[u32], p: usize| {
        for q in grid.neighbors(p, conn) {
            if label[q] == FREE {
                heap.push(Prioritized { priority: field.at(q).abs(), index: q });
            }
        }
    };
    for seed in seeds {
        for &p in seed {
            push_free(&mut heap, &label, p);
        }
    }
    while let Some(Prioritized { index: q, .. }) = heap.pop() {
        if label[q] != FREE {
            continue;
        }
        let zone = grid
            .neighbors(q, conn)
            .filter(|&r| label[r] < FREE)
            .map(|r| (field.at(r).abs(), label[r]))
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, z)| z)
            .expect("queued pixels have a claimed neighbor");
        label[q] = zone;
        push_free(&mut heap, &label, q);
    }
    let mut zones = vec![Vec::new(); seeds.len()];
    for &p in domain {
        if label[p] < FREE {
            zones[label[p] as usize].push(p);
        }
    }
    for z in &mut zones {
        z.sort_unstable();
    }
    Ok(zones)
}

/// Something that can be walked as a saddle-split hierarchy.
trait SplitSource {
    type Node: Copy;
    fn split(&self, node: Self::Node) -> Option<(f64, usize, [Self::Node; 2])>;
    fn seed(&self, node: Self::Node) -> Vec<usize>;
    fn extremum(&self, node: Self::Node) -> (f64, Option<usize>);
}

impl SplitSource for SplitTree {
    type Node = usize;

    fn split(&self, node: usize) -> Option<(f64, usize, [usize; 2])> {
        match self.nodes[node].kind {
            SplitNodeKind::Split { saddle_value, saddle_pixel, children } => {
                Some((saddle_value, saddle_pixel, children))
            }
            SplitNodeKind::Leaf => None,
        }
    }

    fn seed(&self, node: usize) -> Vec<usize> {
        self.region(node)
    }

    fn extremum(&self, node: usize) -> (f64, Option<usize>) {
        (self.nodes[node].extremum_value, Some(self.nodes[node].extremum_pixel))
    }
}

impl SplitSource for PartTree {
    type Node = usize;

    fn split(&self, node: usize) -> Option<(f64, usize, [usize; 2])> {
        match self.nodes[node].children.as_slice() {
            &[a, b] => {
                let saddle = self.nodes[a].saddle_value;
                Some((saddle, self.nodes[a].saddle_pixel.unwrap_or(0), [a, b]))
            }
            _ => None,
        }
    }

    fn seed(&self, node: usize) -> Vec<usize> {
        self.nodes[node].seed.clone()
    }

    fn extremum(&self, node: usize) -> (f64, Option<usize>) {
        (self.nodes[node].extremum_value, self.nodes[node].extremum_pixel)
    }
}

struct Builder<'a> {
    field: &'a Field,
    config: FilterConfig,
    seed_min: f64,
    part_min: f64,
    /// Pixels 8-adjacent to the closure of Ω⁺.
    near_central: Vec<bool>,
    nodes: Vec<PartNode>,
}

impl<'a> Builder<'a> {
    fn new(field: &'a Field, config: FilterConfig) -> Self {
        let grid = field.grid();
        let area = grid.area() as f64;
        Builder {
            field,
            config,
            seed_min: config.seed_min_frac * area,
            part_min: config.part_min_frac * area,
            near_central: near_central_structure(field),
            nodes: Vec::new(),
        }
    }

    fn push_root(&mut self) {
        let grid = self.field.grid();
        let all = grid.interior().to_vec();
        self.nodes.push(PartNode {
            id: "0".to_string(),
            level: 1,
            sign: None,
            parent: None,
            children: Vec::new(),
            seed: all.clone(),
            part: all,
            saddle_value: 0.0,
            parent_saddle_value: 0.0,
            saddle_pixel: None,
            extremum_value: self.field.max_abs(),
            extremum_pixel: None,
            area: grid.area(),
            max_abs_omega: self.field.max_abs(),
            d_omega: None,
        });
    }

    fn passes_size(&self, seed: usize, part: usize) -> bool {
        seed as f64 >= self.seed_min && part as f64 >= self.part_min
    }

    fn touches_central(&self, zone: &[usize]) -> bool {
        zone.iter().any(|&p| self.near_central[p])
    }

    fn max_abs(&self, pixels: &[usize]) -> f64 {
        pixels.iter().fold(0.0, |m, &p| m.max(self.field.at(p).abs()))
    }

    /// Adds a level-2 node for a whole component and grows its splits.
    fn add_component<S: SplitSource>(&mut self, src: &S, top: S::Node, sign: Sign, index: usize) -> Result<()> {
        let seed = src.seed(top);
        let (extremum_value, extremum_pixel) = src.extremum(top);
        let id = if index < 10 { format!("{}{}", sign.digit(), index) } else { format!("{}.{}.", sign.digit(), index) };
        let idx = self.nodes.len();
        self.nodes.push(PartNode {
            id,
            level: 2,
            sign: Some(sign),
            parent: Some(0),
            children: Vec::new(),
            area: seed.len(),
            max_abs_omega: self.max_abs(&seed),
            part: seed.clone(),
            seed,
            saddle_value: 0.0,
            parent_saddle_value: 0.0,
            saddle_pixel: None,
            extremum_value,
            extremum_pixel,
            d_omega: None,
        });
        self.nodes[0].children.push(idx);
        self.grow(src, idx, top, sign)
    }

    fn grow<S: SplitSource>(&mut self, src: &S, at: usize, mut cursor: S::Node, sign: Sign) -> Result<()> {
        loop {
            let Some((saddle, saddle_pixel, [a, b])) = src.split(cursor) else {
                return Ok(());
            };
            let seeds = [src.seed(a), src.seed(b)];
            let part = self.nodes[at].part.clone();
            let zones = watershed_parts(self.field, &seeds, &part, sign)?;
            if self.config.adjacency_filter
                && sign == Sign::Negative
                && !self.touches_central(&zones[0])
                && !self.touches_central(&zones[1])
            {
                return Ok(());
            }
            let keep = [0, 1].map(|k| self.passes_size(seeds[k].len(), zones[k].len()));
            match keep {
                [true, true] => {
                    let [seed_a, seed_b] = seeds;
                    let [zone_a, zone_b] = <[Vec<usize>; 2]>::try_from(zones).expect("two zones");
                    let child_a = self.push_child(src, at, a, saddle, saddle_pixel, seed_a, zone_a, '1');
                    let child_b = self.push_child(src, at, b, saddle, saddle_pixel, seed_b, zone_b, '2');
                    self.grow(src, child_a, a, sign)?;
                    return self.grow(src, child_b, b, sign);
                }
                // an ignored split leaves the node whole; keep looking for
                // saddles inside the surviving branch
                [true, false] => cursor = a,
                [false, true] => cursor = b,
                [false, false] => return Ok(()),
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push_child<S: SplitSource>(
        &mut self,
        src: &S,
        parent: usize,
        node: S::Node,
        saddle: f64,
        saddle_pixel: usize,
        seed: Vec<usize>,
        part: Vec<usize>,
        digit: char,
    ) -> usize {
        let p = &self.nodes[parent];
        let (extremum_value, extremum_pixel) = src.extremum(node);
        let mut id = p.id.clone();
        id.push(digit);
        let parent_saddle = p.saddle_value;
        let child = PartNode {
            id,
            level: p.level + 1,
            sign: p.sign,
            parent: Some(parent),
            children: Vec::new(),
            area: part.len(),
            max_abs_omega: self.max_abs(&part),
            seed,
            part,
            saddle_value: saddle,
            parent_saddle_value: parent_saddle,
            saddle_pixel: Some(saddle_pixel),
            extremum_value,
            extremum_pixel,
            d_omega: Some(d_omega(saddle, parent_saddle)),
        };
        self.nodes.push(child);
        let idx = self.nodes.len() - 1;
        self.nodes[parent].children.push(idx);
        idx
    }

    fn finish(self) -> PartTree {
        let grid = self.field.grid();
        let tree = PartTree {
            width: grid.width(),
            height: grid.height(),
            shape_area: grid.area(),
            max_abs_omega: self.field.max_abs(),
            nodes: self.nodes,
        };
        reorder_preorder(tree)
    }
}

/// Children are appended after recursion into earlier siblings, so node
/// indices are already pre-order except for sibling pairs; normalize.
fn reorder_preorder(tree: PartTree) -> PartTree {
    let mut order = Vec::with_capacity(tree.nodes.len());
    let mut stack = vec![0usize];
    while let Some(n) = stack.pop() {
        order.push(n);
        stack.extend(tree.nodes[n].children.iter().rev());
    }
    let mut new_index = vec![0usize; tree.nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let mut nodes: Vec<Option<PartNode>> = tree.nodes.into_iter().map(Some).collect();
    let reordered = order
        .iter()
        .map(|&old| {
            let mut n = nodes[old].take().expect("each node visited once");
            n.parent = n.parent.map(|p| new_index[p]);
            n.children.iter_mut().for_each(|c| *c = new_index[*c]);
            n
        })
        .collect();
    PartTree { nodes: reordered, ..tree }
}

/// Marks pixels that touch the closure of the central structure: Ω⁺ plus
/// zero-valued shape pixels adjacent to it.
fn near_central_structure(field: &Field) -> Vec<bool> {
    let grid: &ShapeGrid = field.grid();
    let positive: Vec<bool> = (0..grid.len()).map(|p| grid.is_interior(p) && field.at(p) > 0.0).collect();
    let closure: Vec<bool> = (0..grid.len())
        .map(|p| {
            positive[p]
                || (grid.is_interior(p)
                    && field.at(p) == 0.0
                    && grid.neighbors(p, Connectivity::Eight).any(|q| positive[q]))
        })
        .collect();
    (0..grid.len()).map(|p| closure[p] || grid.neighbors(p, Connectivity::Eight).any(|q| closure[q])).collect()
}

/// Builds the unfiltered initial part tree: every saddle split becomes a
/// node, with watershed parts computed top-down.
pub fn build_initial_tree(field: &Field, regions: &(SignRegion, SignRegion), forest: &SplitForest) -> Result<PartTree> {
    build_with(field, regions, forest, FilterConfig::disabled())
}

/// Builds the filtered part tree straight from the split forest.
pub fn build_part_tree(field: &Field, config: FilterConfig) -> Result<PartTree> {
    let regions = sign_decompose(field)?;
    let forest = SplitForest::build(field, &regions.0, &regions.1);
    build_with(field, &regions, &forest, config)
}

fn build_with(
    field: &Field,
    regions: &(SignRegion, SignRegion),
    forest: &SplitForest,
    config: FilterConfig,
) -> Result<PartTree> {
    let mut b = Builder::new(field, config);
    b.push_root();
    for region in [&regions.0, &regions.1] {
        let trees = forest.trees(region.sign);
        let mut index = 0;
        for (c, comp) in region.components.iter().enumerate() {
            if !b.passes_size(comp.pixels.len(), comp.pixels.len()) {
                continue;
            }
            index += 1;
            let tree = &trees[c];
            b.add_component(tree, tree.root, region.sign, index)?;
        }
    }
    Ok(b.finish())
}

/// Re-walks an unfiltered tree, keeping only splits that pass `config`.
///
/// Splits are evaluated top-down. A split whose zones both miss the central
/// structure ends the branch; a split with one undersized side is ignored
/// and the search continues inside the other side; a split with two
/// undersized sides ends the branch.
pub fn apply_filters(tree: &PartTree, field: &Field, config: FilterConfig) -> Result<PartTree> {
    if tree.shape_area != field.grid().area() {
        return Err(Error::GridMismatch("tree and field come from different shapes".into()));
    }
    let mut b = Builder::new(field, config);
    b.push_root();
    let mut counters = [0usize; 2];
    for &top in &tree.nodes[0].children {
        let n = &tree.nodes[top];
        let sign = n.sign.expect("level-2 nodes carry a sign");
        if !b.passes_size(n.seed.len(), n.part.len()) {
            continue;
        }
        let k = match sign {
            Sign::Positive => 0,
            Sign::Negative => 1,
        };
        counters[k] += 1;
        b.add_component(tree, top, sign, counters[k])?;
    }
    Ok(b.finish())
}
