mod common;

use std::collections::BTreeMap;

use parthier_core::parts::OutlineNode;
use parthier_core::random::{identity_sample, lift_probability, sample_with_draws, MAX_ENUMERATED_SPLITS};
use parthier_core::{organization_distribution, randomize, sample, PartTree};
use proptest::prelude::*;

#[test]
fn lift_probabilities_match_the_worked_example() {
    let p = lift_probability(0.301, 4.0);
    assert!((0.2995..=0.3015).contains(&p), "{p}");
    let q = lift_probability(0.128, 4.0);
    assert!((0.5985..=0.6000).contains(&q), "{q}");
    let top = lift_probability(1.0, 4.0);
    assert!((0.0183..=0.0184).contains(&top), "{top}");
    assert!(lift_probability(0.002, 4.0) > 0.99);
}

#[test]
fn fixture_draws_give_the_drawn_organizations() {
    let r = common::four_organization_tree(0.3, 0.6);
    assert_eq!(r.base().len(), 7);
    let leaves: Vec<&str> = r.base().leaves().map(|l| r.base().nodes[l].id.as_str()).collect();
    assert_eq!(leaves, vec!["11", "2111", "2112", "212"]);
    for (k, draws) in [[false, false], [false, true], [true, false], [true, true]].iter().enumerate() {
        assert_eq!(sample_with_draws(&r, draws).structure_key(), common::FOUR_ORGANIZATIONS[k]);
    }
}

#[test]
fn four_organizations_with_exact_probabilities() {
    let r = common::four_organization_tree(0.3, 0.6);
    let dist: BTreeMap<String, f64> =
        organization_distribution(&r, MAX_ENUMERATED_SPLITS).unwrap().into_iter().collect();
    assert_eq!(dist.len(), 4);
    for (key, expected) in common::FOUR_ORGANIZATIONS.iter().zip([0.28, 0.42, 0.12, 0.18]) {
        assert!((dist[*key] - expected).abs() < 1e-9, "{key}: {}", dist[*key]);
    }
}

#[test]
fn sampled_frequencies_match_the_distribution() {
    let r = common::four_organization_tree(0.3, 0.6);
    let n = 100_000u64;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for seed in 0..n {
        *counts.entry(sample(&r, seed).structure_key()).or_default() += 1;
    }
    for (key, p) in organization_distribution(&r, MAX_ENUMERATED_SPLITS).unwrap() {
        let freq = counts.get(&key).copied().unwrap_or(0) as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * se, "{key}: {freq} vs {p}");
    }
}

#[test]
fn tree_without_splits_has_one_organization() {
    let o = |id, parent| OutlineNode { id, parent, saddle_value: 0.0, area: 1, max_abs_omega: 1.0 };
    let tree = PartTree::from_outline(10, 1.0, &[o("0", None), o("11", Some("0")), o("21", Some("0"))]).unwrap();
    let dist = organization_distribution(&randomize(tree), MAX_ENUMERATED_SPLITS).unwrap();
    assert_eq!(dist.len(), 1);
    assert_eq!(dist[0].1, 1.0);
}

/// Random part trees: level-2 nodes are split repeatedly with saddle
/// magnitudes growing down each path.
fn outline_strategy() -> impl Strategy<Value = Vec<(String, Option<String>, f64)>> {
    (1usize..3, 1usize..3, prop::collection::vec((any::<prop::sample::Index>(), 0.001f64..0.6), 0..11)).prop_map(
        |(np, nn, splits)| {
            let mut nodes: Vec<(String, Option<String>, f64)> = vec![("0".into(), None, 0.0)];
            for k in 1..=np {
                nodes.push((format!("1{k}"), Some("0".into()), 0.0));
            }
            for k in 1..=nn {
                nodes.push((format!("2{k}"), Some("0".into()), 0.0));
            }
            for (pick, step) in splits {
                let leaves: Vec<usize> = (1..nodes.len())
                    .filter(|&i| !nodes.iter().any(|n| n.1.as_deref() == Some(nodes[i].0.as_str())))
                    .collect();
                let at = leaves[pick.index(leaves.len())];
                let (id, saddle) = (nodes[at].0.clone(), nodes[at].2);
                let sign = if id.starts_with('1') { 1.0 } else { -1.0 };
                let child = saddle + sign * (step + saddle.abs() * step);
                nodes.push((format!("{id}1"), Some(id.clone()), child));
                nodes.push((format!("{id}2"), Some(id), child));
            }
            nodes
        },
    )
}

fn build(outline: &[(String, Option<String>, f64)]) -> PartTree {
    let nodes: Vec<OutlineNode<'_>> = outline
        .iter()
        .map(|(id, parent, s)| OutlineNode {
            id,
            parent: parent.as_deref(),
            saddle_value: *s,
            area: 1,
            max_abs_omega: 1.0,
        })
        .collect();
    PartTree::from_outline(1000, 1.0, &nodes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn samples_preserve_leaves_and_never_deepen(outline in outline_strategy(), seed in any::<u64>()) {
        let r = randomize(build(&outline));
        let base = identity_sample(&r);
        let s = sample(&r, seed);
        prop_assert_eq!(&s, &sample(&r, seed));
        let mut a = s.leaves();
        let mut b = base.leaves();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        for n in s.nodes() {
            prop_assert!(s.depth(n) <= base.depth(n));
        }
        for &lifted in &s.lifted {
            prop_assert!(!s.is_present(lifted));
            let split = r.splits().iter().find(|sp| sp.parent == lifted).unwrap();
            let [x, y] = split.children;
            // a member that split again may have been replaced in turn
            if !s.is_present(x) || !s.is_present(y) {
                continue;
            }
            prop_assert_eq!(s.parent(x), s.parent(y));
            let siblings = s.children(s.parent(x).unwrap());
            let ix = siblings.iter().position(|&c| c == x).unwrap();
            prop_assert_eq!(siblings.get(ix + 1), Some(&y));
        }
    }

    #[test]
    fn lift_probabilities_follow_d_omega(outline in outline_strategy()) {
        let r = randomize(build(&outline));
        for split in r.splits() {
            let child = &r.base().nodes[split.children[0]];
            let p = split.lift_probability;
            prop_assert!(((-4.0f64).exp()..=1.0).contains(&p));
            if child.level == 3 {
                prop_assert_eq!(p, (-4.0f64).exp());
            } else {
                prop_assert!((p - (-4.0 * child.d_omega.unwrap()).exp()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn organization_probabilities_sum_to_one(outline in outline_strategy()) {
        let r = randomize(build(&outline));
        let dist = organization_distribution(&r, MAX_ENUMERATED_SPLITS).unwrap();
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let no_lifts = identity_sample(&r).structure_key();
        prop_assert!(dist.iter().any(|(k, _)| *k == no_lifts));
    }
}
