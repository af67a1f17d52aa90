//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the code paths it checks: the distance oracle
//! scans every background pixel, the solver oracle assembles the dense system
//! and factors it with LU, the split-tree oracle re-labels components at
//! every threshold, and the clique oracle enumerates all vertex subsets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use parthier_core::grid::{Connectivity, Lattice, Limb, ShapeGrid, SyntheticShape};
use parthier_core::matching::AssociationGraph;
use parthier_core::topology::SplitNodeKind;
use parthier_core::{Field, SplitTree};

/// A 4-connected blob traced by a random walk inside a `w × h` box.
pub fn walk_mask(w: usize, h: usize, steps: &[u8]) -> Vec<bool> {
    let mut mask = vec![false; w * h];
    let (mut x, mut y) = (w / 2, h / 2);
    mask[y * w + x] = true;
    for s in steps {
        match s % 4 {
            0 if x > 0 => x -= 1,
            1 if x + 1 < w => x += 1,
            2 if y > 0 => y -= 1,
            3 if y + 1 < h => y += 1,
            _ => {}
        }
        mask[y * w + x] = true;
    }
    mask
}

pub fn walk_grid(w: usize, h: usize, steps: &[u8]) -> ShapeGrid {
    ShapeGrid::from_mask(w, h, &walk_mask(w, h, steps)).unwrap()
}

/// Mask pixels of a disc of radius `r` centred in a `size × size` box.
pub fn disc_mask(size: usize, r: f64) -> Vec<bool> {
    let c = (size as f64 - 1.0) / 2.0;
    (0..size * size)
        .map(|p| {
            let (x, y) = ((p % size) as f64, (p / size) as f64);
            (x - c).powi(2) + (y - c).powi(2) <= r * r
        })
        .collect()
}

fn neighbor_offsets(lattice: Lattice) -> &'static [(isize, isize)] {
    match lattice {
        Lattice::Line => &[(-1, 0), (1, 0)],
        Lattice::Plane => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
    }
}

fn offset(grid: &ShapeGrid, p: usize, (dx, dy): (isize, isize)) -> Option<usize> {
    let (x, y) = ((p % grid.width()) as isize + dx, (p / grid.width()) as isize + dy);
    (x >= 0 && y >= 0 && (x as usize) < grid.width() && (y as usize) < grid.height())
        .then(|| y as usize * grid.width() + x as usize)
}

/// Distance from each pixel centre to the nearest background pixel centre,
/// by exhaustive search. Background pixels get 0.
pub fn brute_force_edt(grid: &ShapeGrid) -> Vec<f64> {
    let w = grid.width();
    let background: Vec<(f64, f64)> =
        (0..grid.len()).filter(|&p| !grid.mask()[p]).map(|p| ((p % w) as f64, (p / w) as f64)).collect();
    (0..grid.len())
        .map(|p| {
            if !grid.mask()[p] {
                return 0.0;
            }
            let (x, y) = ((p % w) as f64, (p / w) as f64);
            background
                .iter()
                .map(|&(bx, by)| ((bx - x).powi(2) + (by - y).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// The assembled Euler–Lagrange matrix `(1/ρ²) I − Δ + (1/N) 1 1ᵀ` over mask
/// pixels, in increasing pixel order.
pub fn dense_system(grid: &ShapeGrid, rho: f64) -> DMatrix<f64> {
    let pixels: Vec<usize> = (0..grid.len()).filter(|&p| grid.mask()[p]).collect();
    let n = pixels.len();
    let slot = |p: usize| pixels.binary_search(&p).ok();
    let offsets = neighbor_offsets(grid.lattice());
    let mut a = DMatrix::from_element(n, n, 1.0 / n as f64);
    for (i, &p) in pixels.iter().enumerate() {
        a[(i, i)] += 1.0 / (rho * rho) + offsets.len() as f64;
        for &d in offsets {
            if let Some(j) = offset(grid, p, d).and_then(slot) {
                a[(i, j)] -= 1.0;
            }
        }
    }
    a
}

/// Dense LU solution of the Euler–Lagrange system for interior data `f`.
pub fn dense_solve(grid: &ShapeGrid, f: &[f64], rho: f64) -> Vec<f64> {
    let a = dense_system(grid, rho);
    let b = DVector::from_iterator(f.len(), f.iter().map(|v| v / (rho * rho)));
    a.lu().solve(&b).expect("system is non-singular").iter().copied().collect()
}

/// Energy written out term by term: data, every lattice edge touching the
/// shape (edges to ∂Ω see ω = 0), and the squared-mean term.
pub fn dense_energy(grid: &ShapeGrid, omega: &[f64], f: &[f64], rho: f64) -> f64 {
    let pixels: Vec<usize> = (0..grid.len()).filter(|&p| grid.mask()[p]).collect();
    let value = |p: usize| pixels.binary_search(&p).map(|i| omega[i]).unwrap_or(0.0);
    let mut data = 0.0;
    let mut gradient = 0.0;
    for (i, &p) in pixels.iter().enumerate() {
        data += (omega[i] - f[i]).powi(2);
        for &d in neighbor_offsets(grid.lattice()) {
            let q = offset(grid, p, d).unwrap();
            // each shape-shape edge is visited from both ends
            let weight = if grid.mask()[q] { 0.5 } else { 1.0 };
            gradient += weight * (omega[i] - value(q)).powi(2);
        }
    }
    let n = omega.len() as f64;
    let mean = omega.iter().sum::<f64>() / n;
    data / rho + rho * (gradient + n * mean * mean)
}

/// Connected components of `set` (a membership raster) under `conn`, each
/// sorted, listed by smallest pixel.
pub fn components(grid: &ShapeGrid, set: &[bool], conn: Connectivity) -> Vec<Vec<usize>> {
    let offsets: Vec<(isize, isize)> = match (grid.lattice(), conn) {
        (Lattice::Line, _) => vec![(-1, 0), (1, 0)],
        (Lattice::Plane, Connectivity::Four) => vec![(0, -1), (-1, 0), (1, 0), (0, 1)],
        (Lattice::Plane, Connectivity::Eight) => {
            let mut v = Vec::new();
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if (dx, dy) != (0, 0) {
                        v.push((dx, dy));
                    }
                }
            }
            v
        }
    };
    let mut seen = vec![false; set.len()];
    let mut out = Vec::new();
    for start in 0..set.len() {
        if !set[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(p) = stack.pop() {
            comp.push(p);
            for &d in &offsets {
                if let Some(q) = offset(grid, p, d) {
                    if set[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// What happens to superlevel sets of |ω| inside `domain` as the threshold
/// sweeps down through every pixel value.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// (value, pixel) of every component birth.
    pub births: Vec<(f64, usize)>,
    /// (value, pixel, merged regions) of every merge, regions sorted.
    pub merges: Vec<(f64, usize, BTreeSet<Vec<usize>>)>,
}

/// Exhaustive threshold sweep: at each pixel value, label the superlevel set
/// from scratch and compare with the previous labelling. Values must be
/// distinct.
pub fn threshold_sweep(grid: &ShapeGrid, omega: &[f64], domain: &[usize], conn: Connectivity) -> Sweep {
    let mut order = domain.to_vec();
    order.sort_by(|&a, &b| omega[b].abs().total_cmp(&omega[a].abs()));
    let mut active = vec![false; grid.len()];
    let mut prev: Vec<Vec<usize>> = Vec::new();
    let mut sweep = Sweep { births: Vec::new(), merges: Vec::new() };
    for &p in &order {
        active[p] = true;
        let comps = components(grid, &active, conn);
        let host = comps.iter().find(|c| c.binary_search(&p).is_ok()).unwrap();
        let absorbed: BTreeSet<Vec<usize>> =
            prev.iter().filter(|c| host.binary_search(&c[0]).is_ok()).cloned().collect();
        match absorbed.len() {
            0 => sweep.births.push((omega[p].abs(), p)),
            1 => {}
            _ => sweep.merges.push((omega[p].abs(), p, absorbed)),
        }
        prev = comps;
    }
    sweep
}

/// Optimal clique under the same ordering rules as the matcher: highest
/// score summed in increasing vertex order, then more vertices, then the
/// lexicographically smallest vertex list.
pub fn brute_force_clique(graph: &AssociationGraph) -> (Vec<usize>, f64) {
    let n = graph.len();
    assert!(n <= 20);
    let mut is_clique = vec![false; 1 << n];
    is_clique[0] = true;
    let mut best: (Vec<usize>, f64) = (Vec::new(), 0.0);
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        is_clique[mask] = is_clique[rest] && (0..n).all(|v| rest >> v & 1 == 0 || graph.has_edge(low, v));
        if !is_clique[mask] {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        let score: f64 = verts.iter().map(|&v| graph.vertices[v].similarity).sum();
        let better = score > best.1
            || (score == best.1 && (verts.len() > best.0.len() || (verts.len() == best.0.len() && verts < best.0)));
        if better {
            best = (verts, score);
        }
    }
    best
}

/// The four-organization example: root → {11, 21}, 21 → {211, 212},
/// 211 → {2111, 2112}, with lift probabilities p = 0.3 for the pair under 21
/// and q = 0.6 for the pair under 211.
pub fn four_organization_tree(p: f64, q: f64) -> parthier_core::RandomizedTree {
    use parthier_core::parts::OutlineNode;
    let o = |id, parent, saddle_value| OutlineNode { id, parent, saddle_value, area: 10, max_abs_omega: 1.0 };
    let tree = parthier_core::PartTree::from_outline(
        100,
        1.0,
        &[
            o("0", None, 0.0),
            o("11", Some("0"), 0.0),
            o("21", Some("0"), 0.0),
            o("211", Some("21"), -0.4),
            o("212", Some("21"), -0.4),
            o("2111", Some("211"), -1.0),
            o("2112", Some("211"), -1.0),
        ],
    )
    .unwrap();
    let mut r = parthier_core::randomize(tree);
    r.set_probability("21", p).unwrap();
    r.set_probability("211", q).unwrap();
    r
}

/// Organizations (a)–(d) of the four-organization example as structure keys.
pub const FOUR_ORGANIZATIONS: [&str; 4] = [
    "0>11;0>21;211>2111;211>2112;21>211;21>212",
    "0>11;0>21;21>2111;21>2112;21>212",
    "0>11;0>211;0>212;211>2111;211>2112",
    "0>11;0>2111;0>2112;0>212",
];

/// Majority limb label over a pixel set (ties go to the smaller label).
pub fn limb_of(labels: &[Option<Limb>], pixels: &[usize]) -> Option<Limb> {
    let mut counts: std::collections::BTreeMap<Option<Limb>, usize> = std::collections::BTreeMap::new();
    for &p in pixels {
        *counts.entry(labels[p]).or_default() += 1;
    }
    counts.into_iter().rev().max_by_key(|e| e.1).and_then(|e| e.0)
}

/// Births and merges read off a split tree, with runs of binary splits at
/// one pixel folded back into a single multi-way merge.
pub fn tree_sweep(tree: &SplitTree) -> Sweep {
    let mut parent = BTreeMap::new();
    for (i, node) in tree.nodes.iter().enumerate() {
        if let SplitNodeKind::Split { children, .. } = node.kind {
            for c in children {
                parent.insert(c, i);
            }
        }
    }
    let saddle = |n: usize| match tree.nodes[n].kind {
        SplitNodeKind::Split { saddle_pixel, .. } => Some(saddle_pixel),
        SplitNodeKind::Leaf => None,
    };
    let mut sweep = Sweep { births: Vec::new(), merges: Vec::new() };
    for (i, node) in tree.nodes.iter().enumerate() {
        match node.kind {
            SplitNodeKind::Leaf => sweep.births.push((node.extremum_value.abs(), node.extremum_pixel)),
            SplitNodeKind::Split { saddle_value, saddle_pixel, .. } => {
                if parent.get(&i).and_then(|&p| saddle(p)) == Some(saddle_pixel) {
                    continue;
                }
                let mut regions = BTreeSet::new();
                let mut stack = vec![i];
                while let Some(n) = stack.pop() {
                    for c in tree.children(n).unwrap() {
                        if saddle(c) == Some(saddle_pixel) {
                            assert!(tree.nodes[c].own_pixels.is_empty());
                            stack.push(c);
                        } else {
                            regions.insert(tree.region(c));
                        }
                    }
                }
                sweep.merges.push((saddle_value.abs(), saddle_pixel, regions));
            }
        }
    }
    sweep
}

pub fn normalized(mut s: Sweep) -> Sweep {
    s.births.sort_by_key(|b| b.1);
    s.merges.sort_by_key(|m| m.1);
    s
}

/// A smooth random field with distinct values over a disc.
pub fn random_field(r: usize, bumps: &[(f64, f64, f64, f64)], offset: f64, jitter: &[f64]) -> Field {
    let grid = SyntheticShape::Disc { r }.rasterize().unwrap();
    let omega: Vec<f64> = grid
        .interior()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (x, y) = grid.coords(p);
            let smooth: f64 = bumps
                .iter()
                .map(|&(bx, by, amp, width)| {
                    let (dx, dy) = (x as f64 - bx * grid.width() as f64, y as f64 - by * grid.height() as f64);
                    amp * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
                })
                .sum();
            smooth - offset + 1e-6 * jitter[i % jitter.len()] + 1e-9 * i as f64
        })
        .collect();
    Field::from_parts(grid, omega, 1.0, 0.0, 0).unwrap()
}

/// A field on a line lattice with the given values.
pub fn line_field(values: &[f64]) -> Field {
    let grid = ShapeGrid::from_line(&vec![true; values.len()]).unwrap();
    Field::from_parts(grid, values.to_vec(), 1.0, 0.0, 0).unwrap()
}

/// A 10000-pixel line: a positive stretch of 5000 pixels holding a side hill
/// (`tail` low pixels, then a `seed`-pixel peak, then a valley) and a main
/// hill, followed by 5000 negative pixels.
pub fn side_hill_field(tail: usize, seed: usize) -> Field {
    let mut values = Vec::with_capacity(10_000);
    for i in 0..tail {
        values.push(0.2 + 1e-6 * i as f64);
    }
    values.extend(std::iter::repeat_n(3.0, seed));
    values.push(0.5);
    let rest = 5000 - values.len();
    for i in 0..rest {
        values.push(1.5 + 8.0 * (1.0 - ((i as f64 - rest as f64 / 2.0) / rest as f64).abs()));
    }
    values.extend(std::iter::repeat_n(-1.0, 5000));
    line_field(&values)
}
