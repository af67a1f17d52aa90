mod common;

use parthier_core::{distance_transform, ShapeGrid, SyntheticShape};
use proptest::prelude::*;

fn assert_matches_oracle(grid: &ShapeGrid) {
    let f = distance_transform(grid);
    let oracle = common::brute_force_edt(grid);
    for (p, &expected) in oracle.iter().enumerate() {
        assert!((f.at(p) - expected).abs() < 1e-9, "pixel {p}: {} vs brute force {expected}", f.at(p));
    }
}

#[test]
fn reference_shapes_match_brute_force() {
    for spec in ["disc:12", "annulus:8,16", "dumbbell:10,10,3,12", "dumbbell:10,10,14,6", "strip:9"] {
        let grid = spec.parse::<SyntheticShape>().unwrap().rasterize().unwrap();
        assert_matches_oracle(&grid);
    }
}

#[test]
fn disc_values_rise_toward_the_centre() {
    let grid = ShapeGrid::from_mask(33, 33, &common::disc_mask(33, 12.0)).unwrap();
    let f = distance_transform(&grid);
    let c = grid.width() / 2;
    // rays from the rim inward along the four axes
    for dir in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
        let mut prev = 0.0;
        for step in (0..=12isize).rev() {
            let x = (c as isize + dir.0 * step) as usize;
            let y = (c as isize + dir.1 * step) as usize;
            let v = f.at(grid.index(x, y));
            assert!(v >= prev, "ray {dir:?} decreases at step {step}");
            prev = v;
        }
        // nearest background centre is one row off an axis at (12, 1)
        assert_eq!(prev, 145f64.sqrt());
    }
}

#[test]
fn single_pixel_image() {
    let grid = ShapeGrid::from_mask(3, 3, &[false, false, false, false, true, false, false, false, false]).unwrap();
    assert_eq!((grid.width(), grid.height(), grid.area()), (5, 5, 1));
    let f = distance_transform(&grid);
    assert_eq!(f.interior_values(), vec![1.0]);
}

#[test]
fn background_and_boundary_ring_are_zero() {
    let grid = "dumbbell:10,10,3,12".parse::<SyntheticShape>().unwrap().rasterize().unwrap();
    let f = distance_transform(&grid);
    for p in 0..grid.len() {
        if !grid.mask()[p] {
            assert_eq!(f.at(p), 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_blobs_match_brute_force(
        w in 1usize..=40,
        h in 1usize..=40,
        steps in prop::collection::vec(any::<u8>(), 0..600),
    ) {
        assert_matches_oracle(&common::walk_grid(w, h, &steps));
    }

    #[test]
    fn extra_padding_does_not_change_values(
        w in 1usize..=24,
        h in 1usize..=24,
        pad in 1usize..=4,
        steps in prop::collection::vec(any::<u8>(), 0..300),
    ) {
        let mask = common::walk_mask(w, h, &steps);
        let (pw, ph) = (w + 2 * pad, h + 2 * pad);
        let mut padded = vec![false; pw * ph];
        for y in 0..h {
            for x in 0..w {
                padded[(y + pad) * pw + x + pad] = mask[y * w + x];
            }
        }
        let a = distance_transform(&ShapeGrid::from_mask(w, h, &mask).unwrap());
        let b = distance_transform(&ShapeGrid::from_mask(pw, ph, &padded).unwrap());
        prop_assert_eq!(a.interior_values(), b.interior_values());
    }
}
