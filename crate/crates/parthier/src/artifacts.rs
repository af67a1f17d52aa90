//! JSON documents for part trees, samples, matchings and the topology
//! report. Pixel sets are row-major run-length codes over the padded raster.

use std::collections::BTreeMap;
use std::path::Path;

use parthier_core::matching::Matching;
use parthier_core::random::sample_with_draws;
use parthier_core::{rle, PartNode, PartTree, RandomizedTree, SampledTree, Sign, SignRegion, SplitForest};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign class of a node as written in the documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignDoc {
    Positive,
    Negative,
}

impl From<Sign> for SignDoc {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Positive => SignDoc::Positive,
            Sign::Negative => SignDoc::Negative,
        }
    }
}

impl From<SignDoc> for Sign {
    fn from(s: SignDoc) -> Self {
        match s {
            SignDoc::Positive => Sign::Positive,
            SignDoc::Negative => Sign::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub level: usize,
    pub sign: Option<SignDoc>,
    pub saddle_value: f64,
    pub parent_saddle_value: f64,
    pub d_omega: Option<f64>,
    pub area: usize,
    pub max_abs_omega: f64,
    pub extremum_value: f64,
    pub saddle_pixel: Option<usize>,
    pub extremum_pixel: Option<usize>,
    pub seed_rle: Vec<u32>,
    pub part_rle: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub width: usize,
    pub height: usize,
    pub shape_area: usize,
    pub max_abs_omega: f64,
    /// Pre-order, root first.
    pub nodes: Vec<NodeDoc>,
    /// `[parent_id, child_id]` pairs in pre-order.
    pub edges: Vec<[String; 2]>,
}

impl TreeDoc {
    pub fn of(tree: &PartTree) -> Self {
        let len = tree.width * tree.height;
        let nodes = tree.nodes.iter().map(|n| node_doc(n, len)).collect();
        let edges =
            tree.edges().into_iter().map(|(p, c)| [tree.nodes[p].id.clone(), tree.nodes[c].id.clone()]).collect();
        TreeDoc {
            width: tree.width,
            height: tree.height,
            shape_area: tree.shape_area,
            max_abs_omega: tree.max_abs_omega,
            nodes,
            edges,
        }
    }

    /// Rebuilds the tree, checking that the edges describe a pre-order tree
    /// rooted at the first node.
    pub fn to_tree(&self, path: &Path) -> Result<PartTree> {
        let bad = |msg: String| Error::invalid(path, msg);
        let len = self.width * self.height;
        let index: BTreeMap<&str, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        if index.len() != self.nodes.len() {
            return Err(bad("duplicate node ids".into()));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let decode =
                |runs: &[u32], what: &str| rle::decode(len, runs).map_err(|e| bad(format!("nodes[{i}].{what}: {e}")));
            nodes.push(PartNode {
                id: n.id.clone(),
                level: n.level,
                sign: n.sign.map(Sign::from),
                parent: None,
                children: Vec::new(),
                seed: decode(&n.seed_rle, "seed_rle")?,
                part: decode(&n.part_rle, "part_rle")?,
                saddle_value: n.saddle_value,
                parent_saddle_value: n.parent_saddle_value,
                saddle_pixel: n.saddle_pixel,
                extremum_value: n.extremum_value,
                extremum_pixel: n.extremum_pixel,
                area: n.area,
                max_abs_omega: n.max_abs_omega,
                d_omega: n.d_omega,
            });
        }
        for (k, [p, c]) in self.edges.iter().enumerate() {
            let lookup =
                |id: &str| index.get(id).copied().ok_or_else(|| bad(format!("edges[{k}]: unknown node `{id}`")));
            let (p, c) = (lookup(p)?, lookup(c)?);
            if nodes[c].parent.is_some() {
                return Err(bad(format!("edges[{k}]: node `{}` has two parents", nodes[c].id)));
            }
            nodes[c].parent = Some(p);
            nodes[p].children.push(c);
        }
        let tree = PartTree {
            width: self.width,
            height: self.height,
            shape_area: self.shape_area,
            max_abs_omega: self.max_abs_omega,
            nodes,
        };
        tree.validate().map_err(|e| bad(e.to_string()))?;
        if tree.nodes.iter().skip(1).any(|n| n.parent.is_none()) {
            return Err(bad("tree has nodes without a parent".into()));
        }
        Ok(tree)
    }
}

fn node_doc(n: &PartNode, len: usize) -> NodeDoc {
    NodeDoc {
        id: n.id.clone(),
        level: n.level,
        sign: n.sign.map(SignDoc::from),
        saddle_value: n.saddle_value,
        parent_saddle_value: n.parent_saddle_value,
        d_omega: n.d_omega,
        area: n.area,
        max_abs_omega: n.max_abs_omega,
        extremum_value: n.extremum_value,
        saddle_pixel: n.saddle_pixel,
        extremum_pixel: n.extremum_pixel,
        seed_rle: rle::encode(len, &n.seed),
        part_rle: rle::encode(len, &n.part),
    }
}

/// A sampled tree: the present nodes and the sampled edges in the tree
/// schema, plus the draw seed and the ids of the replaced parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleDoc {
    pub width: usize,
    pub height: usize,
    pub shape_area: usize,
    pub max_abs_omega: f64,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<[String; 2]>,
    pub draw_seed: u64,
    pub lifted_split_ids: Vec<String>,
}

impl SampleDoc {
    pub fn of(sample: &SampledTree) -> Self {
        let base = sample.base();
        let len = base.width * base.height;
        let ids = |n: usize| base.nodes[n].id.clone();
        SampleDoc {
            width: base.width,
            height: base.height,
            shape_area: base.shape_area,
            max_abs_omega: base.max_abs_omega,
            nodes: sample.nodes().into_iter().map(|n| node_doc(&base.nodes[n], len)).collect(),
            edges: sample.edges().into_iter().map(|(p, c)| [ids(p), ids(c)]).collect(),
            draw_seed: sample.draw_seed,
            lifted_split_ids: sample.lifted.iter().map(|&n| ids(n)).collect(),
        }
    }

    /// Replays the recorded lifts on `rtree` and checks that the result has
    /// the recorded edges.
    pub fn to_sample(&self, rtree: &RandomizedTree, path: &Path) -> Result<SampledTree> {
        let base = rtree.base();
        let mut lifted = Vec::with_capacity(self.lifted_split_ids.len());
        for id in &self.lifted_split_ids {
            let node =
                base.find(id).ok_or_else(|| Error::invalid(path, format!("lifted split `{id}` is not in the tree")))?;
            lifted.push(node);
        }
        let draws: Vec<bool> = rtree.splits().iter().map(|s| lifted.contains(&s.parent)).collect();
        let mut sample = sample_with_draws(rtree, &draws);
        sample.draw_seed = self.draw_seed;
        if SampleDoc::of(&sample) != *self {
            return Err(Error::invalid(path, "sample does not match a re-organization of the given tree"));
        }
        Ok(sample)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub a_id: String,
    pub b_id: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchDoc {
    pub score: f64,
    /// Draw seeds of the winning samples of A and B.
    pub seeds: [u64; 2],
    pub pairs: Vec<PairDoc>,
    pub unmatched_a: Vec<String>,
    pub unmatched_b: Vec<String>,
    pub lifted_a: Vec<String>,
    pub lifted_b: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_b: Option<String>,
}

impl MatchDoc {
    pub fn of(m: &Matching) -> Self {
        let ids_a = |n: usize| m.sample_a.base().nodes[n].id.clone();
        let ids_b = |n: usize| m.sample_b.base().nodes[n].id.clone();
        MatchDoc {
            score: m.score,
            seeds: [m.seeds.0, m.seeds.1],
            pairs: m
                .pairs
                .iter()
                .map(|p| PairDoc { a_id: ids_a(p.a), b_id: ids_b(p.b), similarity: p.similarity })
                .collect(),
            unmatched_a: m.unmatched_a().into_iter().map(ids_a).collect(),
            unmatched_b: m.unmatched_b().into_iter().map(ids_b).collect(),
            lifted_a: m.sample_a.lifted.iter().map(|&n| ids_a(n)).collect(),
            lifted_b: m.sample_b.lifted.iter().map(|&n| ids_b(n)).collect(),
            tree_a: None,
            tree_b: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEventDoc {
    pub saddle_value: f64,
    pub saddle_pixel: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub area: usize,
    pub euler: i64,
    pub holes: usize,
    pub extremum_value: f64,
    pub extremum_pixel: usize,
    pub leaves: usize,
    pub split_events: Vec<SplitEventDoc>,
}

/// The zero-level decomposition and the split events inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub positive: Vec<ComponentDoc>,
    pub negative: Vec<ComponentDoc>,
}

impl TopologyDoc {
    pub fn of(regions: &(SignRegion, SignRegion), forest: &SplitForest) -> Self {
        let side = |region: &SignRegion| {
            let trees = forest.trees(region.sign);
            region
                .components
                .iter()
                .zip(trees)
                .map(|(c, t)| ComponentDoc {
                    area: c.pixels.len(),
                    euler: c.euler,
                    holes: c.holes(),
                    extremum_value: c.extremum_value,
                    extremum_pixel: c.extremum_pixel,
                    leaves: t.leaf_count(),
                    split_events: t
                        .events()
                        .into_iter()
                        .map(|e| SplitEventDoc { saddle_value: e.saddle_value, saddle_pixel: e.saddle_pixel })
                        .collect(),
                })
                .collect()
        };
        TopologyDoc { positive: side(&regions.0), negative: side(&regions.1) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganizationDoc {
    /// Sorted `parent>child` id edges joined by `;`.
    pub structure: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganizationsDoc {
    pub splits: Vec<SplitDoc>,
    pub organizations: Vec<OrganizationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDoc {
    pub parent_id: String,
    pub child_ids: [String; 2],
    pub lift_probability: f64,
}

impl OrganizationsDoc {
    pub fn of(rtree: &RandomizedTree, distribution: Vec<(String, f64)>) -> Self {
        let id = |n: usize| rtree.base().nodes[n].id.clone();
        OrganizationsDoc {
            splits: rtree
                .splits()
                .iter()
                .map(|s| SplitDoc {
                    parent_id: id(s.parent),
                    child_ids: [id(s.children[0]), id(s.children[1])],
                    lift_probability: s.lift_probability,
                })
                .collect(),
            organizations: distribution
                .into_iter()
                .map(|(structure, probability)| OrganizationDoc { structure, probability })
                .collect(),
        }
    }
}

pub fn read_tree(path: &Path) -> Result<PartTree> {
    let doc: TreeDoc = crate::read_json(path)?;
    doc.to_tree(path)
}
