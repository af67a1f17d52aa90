mod common;

use parthier_core::grid::{HumanoidPreset, Limb};
use parthier_core::matching::{match_samples, relation, AssociationGraph};
use parthier_core::parts::{build_part_tree, OutlineNode};
use parthier_core::random::identity_sample;
use parthier_core::{
    build_association, distance_transform, match_shapes, max_clique, randomize, sample, solve, FilterConfig,
    MatchConfig, PartTree, RandomizedTree, SolverParams, SyntheticShape,
};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64, coarse: bool) -> AssociationGraph {
    let uniform = |rng: &mut ChaCha8Rng| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let weights: Vec<f64> = (0..n)
        .map(|_| {
            let w = uniform(rng);
            // coarse weights force many exact ties
            if coarse {
                (w * 4.0).floor() / 4.0 + 0.25
            } else {
                0.1 + 0.9 * w
            }
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if uniform(rng) < density {
                edges.push((u, v));
            }
        }
    }
    AssociationGraph::from_weighted(&weights, &edges)
}

#[test]
fn clique_search_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..30 {
        let n = 6 + k % 13;
        let density = [0.3, 0.5, 0.7, 0.9][k % 4];
        let g = random_graph(&mut rng, n, density, k % 3 == 0);
        let found = max_clique(&g, 400).unwrap();
        let (vertices, score) = common::brute_force_clique(&g);
        assert!(g.is_clique(&found.vertices), "graph {k}");
        assert_eq!(found.score, score, "graph {k}");
        assert_eq!(found.vertices, vertices, "graph {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clique_search_agrees_with_enumeration_on_any_graph(
        seed in any::<u64>(),
        n in 0usize..=16,
        density in 0.0f64..1.0,
        coarse in any::<bool>(),
    ) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, density, coarse);
        let found = max_clique(&g, 400).unwrap();
        let (vertices, score) = common::brute_force_clique(&g);
        prop_assert!(g.is_clique(&found.vertices));
        prop_assert_eq!(found.score, score);
        prop_assert_eq!(found.vertices, vertices);
    }
}

type Outline = Vec<(String, Option<String>, f64, usize, f64)>;

fn build(outline: &Outline, shape_area: usize) -> PartTree {
    let nodes: Vec<OutlineNode<'_>> = outline
        .iter()
        .map(|(id, parent, s, area, peak)| OutlineNode {
            id,
            parent: parent.as_deref(),
            saddle_value: *s,
            area: *area,
            max_abs_omega: *peak,
        })
        .collect();
    PartTree::from_outline(shape_area, 1.0, &nodes).unwrap()
}

/// Random trees with random attributes on a 1000-pixel shape.
fn tree_strategy() -> impl Strategy<Value = Outline> {
    (
        1usize..3,
        1usize..3,
        prop::collection::vec((any::<prop::sample::Index>(), 0.01f64..0.6), 0..6),
        prop::collection::vec((1usize..600, 0.05f64..1.0), 16),
    )
        .prop_map(|(np, nn, splits, attrs)| {
            let mut nodes: Outline = vec![("0".into(), None, 0.0, 1000, 1.0)];
            for k in 1..=np {
                nodes.push((format!("1{k}"), Some("0".into()), 0.0, 0, 0.0));
            }
            for k in 1..=nn {
                nodes.push((format!("2{k}"), Some("0".into()), 0.0, 0, 0.0));
            }
            for (pick, step) in splits {
                let leaves: Vec<usize> = (1..nodes.len())
                    .filter(|&i| !nodes.iter().any(|n| n.1.as_deref() == Some(nodes[i].0.as_str())))
                    .collect();
                let at = leaves[pick.index(leaves.len())];
                let (id, saddle) = (nodes[at].0.clone(), nodes[at].2);
                let sign = if id.starts_with('1') { 1.0 } else { -1.0 };
                let child = saddle + sign * step;
                nodes.push((format!("{id}1"), Some(id.clone()), child, 0, 0.0));
                nodes.push((format!("{id}2"), Some(id), child, 0, 0.0));
            }
            for (k, node) in nodes.iter_mut().enumerate().skip(1) {
                (node.3, node.4) = attrs[k % attrs.len()];
            }
            nodes
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matchings_are_hierarchy_preserving_cliques(
        a in tree_strategy(),
        b in tree_strategy(),
        seeds in (any::<u64>(), any::<u64>()),
        tau in 0.0f64..0.5,
    ) {
        let (ra, rb) = (randomize(build(&a, 1000)), randomize(build(&b, 1000)));
        let (ta, tb) = (sample(&ra, seeds.0), sample(&rb, seeds.1));
        let config = MatchConfig { tau, ..MatchConfig::default() };
        let g = build_association(&ta, &tb, &config);
        for v in &g.vertices {
            prop_assert!(v.similarity >= tau && v.similarity <= 1.0);
            prop_assert_eq!(ta.base().nodes[v.a].sign, tb.base().nodes[v.b].sign);
        }
        let m = match_samples(&ta, &tb, &config).unwrap();
        let total: f64 = m.pairs.iter().map(|p| p.similarity).sum();
        prop_assert!((m.score - total).abs() < 1e-12);
        for (i, p) in m.pairs.iter().enumerate() {
            prop_assert!(ta.is_present(p.a) && tb.is_present(p.b));
            for q in &m.pairs[i + 1..] {
                prop_assert!(p.a != q.a && p.b != q.b);
                prop_assert_eq!(relation(&ta, p.a, q.a), relation(&tb, p.b, q.b));
            }
        }
    }

    #[test]
    fn raising_tau_never_raises_the_score(a in tree_strategy(), b in tree_strategy(), seed in any::<u64>()) {
        let (ra, rb) = (randomize(build(&a, 1000)), randomize(build(&b, 1000)));
        let mut last = f64::INFINITY;
        for tau in [0.0, 0.1, 0.3, 0.6, 0.9, 1.0] {
            let config = MatchConfig { tau, ..MatchConfig::default() };
            let score = match_shapes(&ra, &rb, 3, seed, &config).unwrap().score;
            prop_assert!(score <= last);
            last = score;
        }
    }

    #[test]
    fn self_match_is_the_identity(a in tree_strategy(), seed in any::<u64>()) {
        let r = randomize(build(&a, 1000));
        let config = MatchConfig { tau: 0.0, ..MatchConfig::default() };
        let m = match_shapes(&r, &r, 1, seed, &config).unwrap();
        let nodes = m.sample_a.nodes();
        prop_assert_eq!(m.pairs.len(), nodes.len());
        prop_assert_eq!(m.score, nodes.len() as f64);
        for p in &m.pairs {
            prop_assert_eq!(p.a, p.b);
        }
    }
}

type Spec<'a> = (&'a str, Option<&'a str>, f64, usize, f64);

fn fixture(nodes: &[Spec<'_>]) -> RandomizedTree {
    let outline: Vec<OutlineNode<'_>> = nodes
        .iter()
        .map(|&(id, parent, saddle_value, area, max_abs_omega)| OutlineNode {
            id,
            parent,
            saddle_value,
            area,
            max_abs_omega,
        })
        .collect();
    randomize(PartTree::from_outline(1000, 1.0, &outline).unwrap())
}

/// The person and the occluded person: the occluder adds two splits above
/// the leg pair and above the right leg, shifting the legs two levels down.
fn person_fixtures() -> (RandomizedTree, RandomizedTree) {
    let shared: [Spec<'_>; 7] = [
        ("0", None, 0.0, 1000, 1.0),
        ("11", Some("0"), 0.0, 300, 1.0),
        ("21", Some("0"), 0.0, 600, 0.5),
        ("211", Some("21"), -0.1, 320, 0.45),
        ("2111", Some("211"), -0.2, 220, 0.44),
        ("21111", Some("2111"), -0.3, 110, 0.43),
        ("21112", Some("2111"), -0.3, 105, 0.40),
    ];
    let mut person = shared.to_vec();
    person.extend([
        ("2112", Some("211"), -0.2, 95, 0.33),
        ("212", Some("21"), -0.1, 270, 0.31),
        ("2121", Some("212"), -0.15, 140, 0.30),
        ("2122", Some("212"), -0.15, 125, 0.29),
    ]);
    let mut occluded = shared.to_vec();
    occluded.extend([
        ("2112", Some("211"), -0.2, 95, 0.33),
        ("212", Some("21"), -0.1, 420, 0.36),
        ("2121", Some("212"), -0.12, 350, 0.35),
        ("21211", Some("2121"), -0.13, 80, 0.80),
        ("21212", Some("2121"), -0.13, 270, 0.31),
        ("212121", Some("21212"), -0.15, 140, 0.30),
        ("212122", Some("21212"), -0.15, 125, 0.29),
        ("2122", Some("212"), -0.12, 70, 0.90),
    ]);
    (fixture(&person), fixture(&occluded))
}

const PERSON_PAIRS: [(&str, &str); 8] = [
    ("11", "11"),
    ("211", "211"),
    ("21111", "21111"),
    ("21112", "21112"),
    ("2112", "2112"),
    ("212", "21212"),
    ("2121", "212121"),
    ("2122", "212122"),
];

#[test]
fn published_correspondences_form_a_clique() {
    let (ra, rb) = person_fixtures();
    let (ta, tb) = (identity_sample(&ra), identity_sample(&rb));
    let g = build_association(&ta, &tb, &MatchConfig::default());
    let vertex = |a: &str, b: &str| {
        let (a, b) = (ra.base().find(a).unwrap(), rb.base().find(b).unwrap());
        g.vertices.iter().position(|v| v.a == a && v.b == b)
    };
    let chosen: Vec<usize> = PERSON_PAIRS
        .iter()
        .map(|&(a, b)| vertex(a, b).unwrap_or_else(|| panic!("{a} <-> {b} is not a vertex")))
        .collect();
    assert!(g.is_clique(&chosen));

    let m = match_samples(&ta, &tb, &MatchConfig::default()).unwrap();
    for (a, b) in PERSON_PAIRS {
        let a = ra.base().find(a).unwrap();
        assert_eq!(m.partner_of_a(a), rb.base().find(b));
    }
    for occluder in ["21211", "2122"] {
        assert_eq!(m.partner_of_b(rb.base().find(occluder).unwrap()), None);
    }
}

#[test]
fn a_leaf_can_match_a_part_that_splits_further() {
    // B resolves A's leaf 212 into two sub-parts
    let common_nodes: [Spec<'_>; 5] = [
        ("0", None, 0.0, 1000, 1.0),
        ("11", Some("0"), 0.0, 400, 1.0),
        ("21", Some("0"), 0.0, 500, 0.5),
        ("211", Some("21"), -0.1, 260, 0.45),
        ("212", Some("21"), -0.1, 230, 0.40),
    ];
    let a = fixture(&common_nodes);
    let mut finer = common_nodes.to_vec();
    finer.extend([("2121", Some("212"), -0.2, 120, 0.39), ("2122", Some("212"), -0.2, 105, 0.3)]);
    let b = fixture(&finer);
    let m = match_samples(&identity_sample(&a), &identity_sample(&b), &MatchConfig::default()).unwrap();
    let leaf = a.base().find("212").unwrap();
    assert!(a.base().nodes[leaf].is_leaf());
    let partner = m.partner_of_a(leaf).expect("leaf 212 is matched");
    assert_eq!(b.base().nodes[partner].id, "212");
    assert!(!b.base().nodes[partner].is_leaf());
}

fn humanoid_tree(preset: HumanoidPreset) -> (PartTree, Vec<Option<Limb>>) {
    let grid = SyntheticShape::Humanoid(preset).rasterize().unwrap();
    let field = solve(&distance_transform(&grid), &SolverParams::default()).unwrap();
    (build_part_tree(&field, FilterConfig::default()).unwrap(), preset.labels().2)
}

#[test]
fn occluded_humanoid_matches_limb_for_limb() {
    let (ta, labels_a) = humanoid_tree(HumanoidPreset::Standard);
    let (tb, labels_b) = humanoid_tree(HumanoidPreset::Occluded);
    let limb_a = |n: usize| common::limb_of(&labels_a, &ta.nodes[n].part);
    let limb_b = |n: usize| common::limb_of(&labels_b, &tb.nodes[n].part);
    let (ra, rb) = (randomize(ta.clone()), randomize(tb.clone()));
    let m = match_shapes(&ra, &rb, 16, 7, &MatchConfig::default()).unwrap();

    assert_eq!(m.partner_of_a(ta.find("11").unwrap()), tb.find("11"));
    for leaf in ta.leaves() {
        let limb = limb_a(leaf);
        let partner = m.partner_of_a(leaf).unwrap_or_else(|| panic!("{:?} leaf is unmatched", limb));
        assert_eq!(limb_b(partner), limb, "{} <-> {}", ta.nodes[leaf].id, tb.nodes[partner].id);
    }
    let occluder: Vec<usize> = (0..tb.len()).filter(|&n| limb_b(n) == Some(Limb::Occluder)).collect();
    assert!(!occluder.is_empty());
    for n in occluder {
        assert_eq!(m.partner_of_b(n), None, "occluder part {} is matched", tb.nodes[n].id);
    }
}
