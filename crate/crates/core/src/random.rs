//! Randomized re-organization of a part tree.
//!
//! Every split below level 2 (a sibling pair and their parent) is annotated
//! with a lift probability `p = exp(−4·Dω)`. A sample visits splits in
//! pre-order and, with probability `p`, replaces the parent by the pair under
//! the parent's current parent. Splits with well separated saddle values
//! (Dω near 1) almost never lift; near-simultaneous saddles almost always do.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::parts::PartTree;

/// Exponent of the saliency-to-probability map `exp(−k·Dω)`.
pub const LIFT_EXPONENT: f64 = 4.0;

/// Default cap on the number of splits for exhaustive enumeration.
pub const MAX_ENUMERATED_SPLITS: usize = 12;

pub fn lift_probability(d_omega: f64, exponent: f64) -> f64 {
    libm::exp(-exponent * d_omega)
}

/// A sibling pair and the parent it may replace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub parent: usize,
    pub children: [usize; 2],
    pub lift_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedTree {
    base: Arc<PartTree>,
    /// In pre-order of their parents; this is also the draw order.
    splits: Vec<SplitChoice>,
}

impl RandomizedTree {
    pub fn base(&self) -> &PartTree {
        &self.base
    }

    pub fn shared_base(&self) -> Arc<PartTree> {
        Arc::clone(&self.base)
    }

    pub fn splits(&self) -> &[SplitChoice] {
        &self.splits
    }

    /// Overrides the lift probability of the split whose parent has `parent_id`.
    pub fn set_probability(&mut self, parent_id: &str, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
        let base = &self.base;
        let split = self
            .splits
            .iter_mut()
            .find(|s| base.nodes[s.parent].id == parent_id)
            .ok_or_else(|| Error::InvalidParameter(format!("no split under node `{parent_id}`")))?;
        split.lift_probability = p;
        Ok(())
    }
}

/// Annotates every split below level 2 with `exp(−4·Dω)`.
pub fn randomize(tree: PartTree) -> RandomizedTree {
    randomize_with_exponent(tree, LIFT_EXPONENT)
}

pub fn randomize_with_exponent(tree: PartTree, exponent: f64) -> RandomizedTree {
    let splits = tree
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.level >= 2 && n.children.len() == 2)
        .map(|(i, n)| {
            let children = [n.children[0], n.children[1]];
            let d = tree.nodes[children[0]].d_omega.unwrap_or(1.0);
            SplitChoice { parent: i, children, lift_probability: lift_probability(d, exponent) }
        })
        .collect();
    RandomizedTree { base: Arc::new(tree), splits }
}

/// One re-organization of the base tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTree {
    base: Arc<PartTree>,
    parent: Vec<Option<usize>>,
    present: Vec<bool>,
    children: Vec<Vec<usize>>,
    pub draw_seed: u64,
    /// Base indices of parents replaced by their children, in draw order.
    pub lifted: Vec<usize>,
}

impl SampledTree {
    pub fn base(&self) -> &PartTree {
        &self.base
    }

    pub fn is_present(&self, node: usize) -> bool {
        self.present[node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// Present nodes in pre-order of the sampled structure.
    pub fn nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.children[n].iter().rev());
        }
        out
    }

    pub fn depth(&self, node: usize) -> usize {
        let mut d = 1;
        let mut cur = node;
        while let Some(p) = self.parent[cur] {
            d += 1;
            cur = p;
        }
        d
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.nodes().into_iter().filter(|&n| self.children[n].is_empty()).collect()
    }

    /// True if `a` is a proper ancestor of `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.parent[b];
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent[p];
        }
        false
    }

    /// Parent → child id pairs in pre-order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.nodes().into_iter().flat_map(|n| self.children[n].iter().map(move |&c| (n, c))).collect()
    }

    /// Canonical key: sorted `parent>child` id edges joined by `;`.
    pub fn structure_key(&self) -> String {
        let ids = &self.base.nodes;
        let mut edges: Vec<String> =
            self.edges().into_iter().map(|(p, c)| format!("{}>{}", ids[p].id, ids[c].id)).collect();
        edges.sort_unstable();
        edges.join(";")
    }
}

fn apply_draws(rtree: &RandomizedTree, seed: u64, mut lift: impl FnMut(usize, &SplitChoice) -> bool) -> SampledTree {
    let base = rtree.shared_base();
    let n = base.nodes.len();
    let mut parent: Vec<Option<usize>> = base.nodes.iter().map(|n| n.parent).collect();
    let mut present = vec![true; n];
    let mut lifted = Vec::new();
    for (k, split) in rtree.splits.iter().enumerate() {
        if lift(k, split) {
            let grand = parent[split.parent];
            for &c in &split.children {
                parent[c] = grand;
            }
            present[split.parent] = false;
            parent[split.parent] = None;
            lifted.push(split.parent);
        }
    }
    let mut children = vec![Vec::new(); n];
    // base indices are pre-order, so pushing in index order keeps siblings
    // in base order
    for c in 0..n {
        if present[c] {
            if let Some(p) = parent[c] {
                children[p].push(c);
            }
        }
    }
    SampledTree { base, parent, present, children, draw_seed: seed, lifted }
}

/// Uniform draw in [0, 1) from the top 53 bits of a ChaCha8 word.
fn unit_draw(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws one re-organization. The generator is ChaCha8 seeded with
/// `seed_from_u64(seed)`; one draw is consumed per split in pre-order and the
/// split lifts when the draw is below its probability.
pub fn sample(rtree: &RandomizedTree, seed: u64) -> SampledTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    apply_draws(rtree, seed, |_, s| unit_draw(&mut rng) < s.lift_probability)
}

/// The base structure as a sample with no lifts.
pub fn identity_sample(rtree: &RandomizedTree) -> SampledTree {
    apply_draws(rtree, 0, |_, _| false)
}

/// Applies an explicit lift decision per split (in draw order).
pub fn sample_with_draws(rtree: &RandomizedTree, lifts: &[bool]) -> SampledTree {
    apply_draws(rtree, 0, |k, _| lifts.get(k).copied().unwrap_or(false))
}

/// Exact probability of every reachable organization, by enumerating all
/// lift combinations. Results are listed in order of first appearance when
/// combinations are counted up from "no lifts".
pub fn organization_distribution(rtree: &RandomizedTree, max_splits: usize) -> Result<Vec<(String, f64)>> {
    let k = rtree.splits.len();
    if k > max_splits {
        return Err(Error::TooManySplits { found: k, max: max_splits });
    }
    let mut order: Vec<String> = Vec::new();
    let mut probs: BTreeMap<String, f64> = BTreeMap::new();
    for mask in 0u64..(1u64 << k) {
        let draws: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
        let prob: f64 = rtree
            .splits
            .iter()
            .zip(&draws)
            .map(|(s, &d)| if d { s.lift_probability } else { 1.0 - s.lift_probability })
            .product();
        let key = sample_with_draws(rtree, &draws).structure_key();
        match probs.get_mut(&key) {
            Some(p) => *p += prob,
            None => {
                probs.insert(key.clone(), prob);
                order.push(key);
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let p = probs[&key];
            (key, p)
        })
        .collect())
}
