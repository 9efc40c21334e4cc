use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::freegroup::{Rank, ReducedWord};
use crate::random::{random_boundary, random_word_in};
use crate::walk::{run_experiment, MeasureSpec, Walk, WalkConfig};

fn r2() -> Rank {
    Rank::new(2).unwrap()
}

fn any_point(rng: &mut ChaCha8Rng) -> Point {
    if rng.random_bool(0.5) {
        Point::Vertex(TreePoint(random_word_in(rng, r2(), 0..10)))
    } else {
        Point::Boundary(random_boundary(rng, r2(), 4, 4))
    }
}

fn at_least(p: GromovProduct, q: GromovProduct) -> bool {
    match (p, q) {
        (GromovProduct::Infinite, _) => true,
        (GromovProduct::Finite(_), GromovProduct::Infinite) => false,
        (GromovProduct::Finite(a), GromovProduct::Finite(b)) => a >= b,
    }
}

fn min(p: GromovProduct, q: GromovProduct) -> GromovProduct {
    if at_least(p, q) {
        q
    } else {
        p
    }
}

#[test]
fn four_point_condition_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..100_000 {
        let (x, y, z) = (any_point(&mut rng), any_point(&mut rng), any_point(&mut rng));
        let xy = gromov_product(&x, &y).unwrap();
        let bound = min(gromov_product(&x, &z).unwrap(), gromov_product(&y, &z).unwrap());
        assert!(at_least(xy, bound), "{x:?} {y:?} {z:?}");
    }
}

#[test]
fn lemma_identities_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..100_000 {
        let g = random_word_in(&mut rng, r2(), 0..12);
        let xi = random_boundary(&mut rng, r2(), 5, 5);
        assert!(lemma_identities_check(&g, &xi).unwrap().is_exact(), "{g} {xi}");
    }
    for _ in 0..5_000 {
        let g = random_word_in(&mut rng, r2(), 0..12);
        let xi = random_boundary(&mut rng, r2(), 5, 5);
        assert!(lemma_identities_by_distances(&g, &xi).unwrap().is_exact(), "{g} {xi}");
    }
}

#[test]
fn busemann_cocycle_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for _ in 0..10_000 {
        let g = random_word_in(&mut rng, r2(), 0..10);
        let h = random_word_in(&mut rng, r2(), 0..10);
        let xi = random_boundary(&mut rng, r2(), 4, 4);
        let lhs = busemann(&g.mul(&h), &xi).unwrap();
        let rhs = busemann(&g, &boundary_action(&h, &xi).unwrap()).unwrap() + busemann(&h, &xi).unwrap();
        assert_eq!(lhs, rhs, "{g} {h} {xi}");
        assert!(busemann(&g, &xi).unwrap().unsigned_abs() as usize <= g.len());
        assert_eq!(busemann(&g, &xi).unwrap(), busemann_by_distances(&g, &xi).unwrap());
    }
}

#[test]
fn corollary_bound_holds_and_is_attained() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    for _ in 0..200 {
        let x = random_boundary(&mut rng, r2(), 3, 3);
        let y = random_boundary(&mut rng, r2(), 3, 3);
        if gromov_product(&Point::Boundary(x.clone()), &Point::Boundary(y.clone()))
            .unwrap()
            .is_infinite()
        {
            continue;
        }
        for _ in 0..20 {
            let g = random_word_in(&mut rng, r2(), 0..10);
            let (lhs, rhs) = corollary_check(&g, &x, &y).unwrap();
            assert!(lhs >= rhs);
        }
        let w = corollary_witness(&x, &y, r2(), 6).unwrap();
        assert!(w.is_some(), "{x} {y}");
    }
}

#[test]
fn srw_tracking_is_sublinear() {
    let walk = Walk::Tree {
        rank: r2(),
        measure: MeasureSpec::uniform(["a", "A", "b", "B"].iter().map(|s| s.parse().unwrap()).collect()).unwrap(),
        tracked: vec![],
    };
    // run past n so that the limit point is certified beyond g_n⁻¹·o
    let cfg = WalkConfig::new(1_300, 400, 17, vec![250, 500, 1_000, 1_300]).unwrap();
    let recs = run_experiment(&walk, &cfg, 0).unwrap();
    let mut last: Vec<u64> = recs.iter().map(|r| r.at_step(1_000).unwrap().tracking.unwrap()).collect();
    last.sort_unstable();
    let p99 = last[(last.len() * 99).div_ceil(100) - 1];
    assert!(p99 < 100, "{p99}");
}

proptest! {
    #[test]
    fn horofunction_product_matches_prefix(
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_boundary(&mut rng, r2(), 5, 4);
        let y = random_boundary(&mut rng, r2(), 5, 4);
        if let GromovProduct::Finite(p) = gromov_product(&Point::Boundary(x.clone()), &Point::Boundary(y.clone())).unwrap() {
            prop_assert_eq!(gromov_product_by_horofunctions(&x, &y, p as usize + 2).unwrap(), p as i64);
        }
    }

    #[test]
    fn finite_products_match_distances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = TreePoint(random_word_in(&mut rng, r2(), 0..15));
        let v = TreePoint(random_word_in(&mut rng, r2(), 0..15));
        let p = gromov_product(&Point::Vertex(u.clone()), &Point::Vertex(v.clone())).unwrap();
        prop_assert_eq!(p, GromovProduct::Finite(gromov_product_by_distances(&u, &v)));
        prop_assert_eq!(tree_distance(&u, &v), tree_distance(&v, &u));
        prop_assert_eq!(tree_distance(&u, &v) == 0, u == v);
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<TreePoint> = (0..3).map(|_| TreePoint(random_word_in(&mut rng, r2(), 0..12))).collect();
        prop_assert!(tree_distance(&pts[0], &pts[1]) + tree_distance(&pts[1], &pts[2]) >= tree_distance(&pts[0], &pts[2]));
    }

    #[test]
    fn action_keeps_points_periodic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_word_in(&mut rng, r2(), 0..10);
        let xi = random_boundary(&mut rng, r2(), 4, 4);
        let moved = boundary_action(&g, &xi).unwrap();
        prop_assert!(!moved.is_truncated());
        // g·ξ agrees with the reduced word g·ξ_k deep enough
        let k = g.len() + 20;
        let deep = g.mul(&xi.prefix(k).unwrap());
        prop_assert_eq!(moved.prefix(10).unwrap(), deep.prefix(10));
        prop_assert_eq!(boundary_action(&g.inverse(), &moved).unwrap(), xi);
    }

    #[test]
    fn tracking_is_monotone_along_the_ray(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = random_boundary(&mut rng, r2(), 4, 4);
        let w = random_word_in(&mut rng, r2(), 0..8);
        let before = tracking_distance(&TreePoint(w.clone()), &xi).unwrap();
        let c = prefix_with_boundary(&w, &xi).unwrap();
        let along = xi.prefix(c + 3).unwrap();
        prop_assert_eq!(tracking_distance(&TreePoint(along), &xi).unwrap(), 0);
        prop_assert!(before <= w.len() as u64);
    }
}

#[test]
fn empty_word_is_the_basepoint() {
    assert_eq!(TreePoint::origin().word(), &ReducedWord::empty());
}
