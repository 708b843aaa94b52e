mod common;

use common::{local_polytope, random_body, random_point, rng, small_instance_bodies};
use covercert::approximation::{build_outer, check_outer_shrink, min_norm_point};
use covercert::geometry::{BallBody, Body, Halfspace, Plank, Polytope, Vector};
use covercert::harness::{
    generate_partition, grid_uncovered_oracle, random_polygon, random_tangent_polytope,
    random_unit, verify_covering, Scenario, INEQUALITY_TOL,
};
use covercert::inradius::{inradius_body, inradius_clipped, inradius_polytope};
use covercert::witness::{
    evaluate, is_coordinate_maximal, maximize, objective, witness, CoveringInstance, Mode,
};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn support_is_positively_homogeneous(seed in any::<u64>(), t in 0.1f64..10.0) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let body = random_body(&mut r, dim, 0.3, 1.0);
        let u = match &body.shape {
            covercert::geometry::Shape::Plank(p) => p.direction().clone(),
            _ => random_unit(&mut r, dim),
        };
        let a = body.support_value(&u.scaled(t)).unwrap();
        let b = t * body.support_value(&u).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn plank_matches_its_two_halfspaces(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let plank = Plank::new(random_point(&mut r, dim, 1.0), random_unit(&mut r, dim), r.gen_range(0.05..1.0)).unwrap();
        let poly: Body = plank.to_polytope().into();
        let plank: Body = plank.into();
        for _ in 0..1000 {
            let p = random_point(&mut r, dim, 2.0);
            let margin = plank.excess(&p).unwrap();
            if margin.abs() < 1e-9 {
                continue;
            }
            prop_assert_eq!(plank.contains(&p, 0.0).unwrap(), poly.contains(&p, 0.0).unwrap());
        }
    }

    #[test]
    fn inscribed_ball_fits_and_touches(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=4);
        let facets = r.gen_range(dim + 1..=dim + 6);
        let p = random_tangent_polytope(&mut r, dim, facets, 0.5);
        let ball = inradius_polytope(&p).unwrap();
        prop_assert!(!ball.touching.is_empty());
        for (i, h) in p.halfspaces().iter().enumerate() {
            let slack = h.offset() - ball.center.dot(h.normal()) - ball.radius * h.normal().norm();
            prop_assert!(slack >= -1e-7 * h.normal().norm());
            if ball.touching.contains(&i) {
                prop_assert!(slack.abs() <= 1e-7 * h.normal().norm());
            }
        }
        // Support check: the ball lies inside every halfspace along its normal.
        let body: Body = p.clone().into();
        for h in p.halfspaces() {
            let u = h.normal().normalized().unwrap();
            prop_assert!(ball.center.dot(&u) + ball.radius <= body.support_value(&u).unwrap() + 1e-7);
        }
    }

    #[test]
    fn kkt_certificate_at_the_optimum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(2..=4);
        let facets = r.gen_range(dim + 1..=dim + 6);
        let p = random_tangent_polytope(&mut r, dim, facets, 0.5);
        let ball = inradius_polytope(&p).unwrap();
        let normals: Vec<Vector> = ball
            .touching
            .iter()
            .map(|&i| p.halfspaces()[i].normal().normalized().unwrap())
            .collect();
        prop_assert!(min_norm_point(&normals).unwrap().distance <= 1e-6);
    }

    #[test]
    fn adding_a_halfspace_never_grows_the_inradius(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let facets = r.gen_range(dim + 1..=dim + 4);
        let p = random_tangent_polytope(&mut r, dim, facets, 0.5);
        let before = inradius_polytope(&p).unwrap().radius;
        let ball = inradius_polytope(&p).unwrap();
        let u = random_unit(&mut r, dim);
        let offset = ball.center.dot(&u) + r.gen_range(-0.5..1.0) * ball.radius;
        let q = p.with_halfspace(Halfspace::new(u, offset).unwrap()).unwrap();
        if let Ok(after) = inradius_polytope(&q) {
            prop_assert!(after.radius <= before + 1e-9);
        }
    }

    #[test]
    fn clipping_never_exceeds_either_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let facets = r.gen_range(dim + 1..=dim + 4);
        let p = random_tangent_polytope(&mut r, dim, facets, 0.5);
        let Ok(clipped) = inradius_clipped(&p) else {
            return Ok(());
        };
        let plain = inradius_polytope(&p).unwrap().radius;
        prop_assert!(clipped.radius <= plain.min(1.0) + 1e-7);
        prop_assert!(clipped.center.norm() + clipped.radius <= 1.0 + 1e-6);
        let body: Body = p.into();
        prop_assert!(body.contains(&clipped.center, 1e-7).unwrap());
    }

    #[test]
    fn min_norm_variational_inequality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=4);
        let n = r.gen_range(1..=8);
        let shift = random_point(&mut r, dim, 1.5);
        let points: Vec<Vector> = (0..n).map(|_| &random_point(&mut r, dim, 1.0) + &shift).collect();
        let q = min_norm_point(&points).unwrap();
        prop_assert!((q.distance - q.point.norm()).abs() < 1e-12);
        prop_assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for p in &points {
            prop_assert!(q.point.dot(&(p - &q.point)) >= -1e-7);
        }
    }

    #[test]
    fn outer_polytope_contains_the_body(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let size = r.gen_range(0.05..0.5);
        let body = random_body(&mut r, dim, size, 1.0);
        let eps = 10f64.powf(r.gen_range(-6.0..-1.0));
        let outer = build_outer(&body, eps).unwrap();
        for v in &outer.directions {
            prop_assert!((v.norm() - outer.inradius).abs() <= 1e-9);
        }
        prop_assert!(outer.hull_certificate().unwrap().distance <= eps);
        let ball = inradius_body(&body).unwrap();
        let mut hits = 0;
        while hits < 1000 {
            let p = &ball.center + &random_point(&mut r, dim, 3.0 * ball.radius + 0.5);
            if body.contains(&p, 0.0).unwrap() {
                prop_assert!(outer.contains(&p));
                hits += 1;
            }
        }
    }

    #[test]
    fn outer_shrink_is_monotone_and_above_the_body(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let size = r.gen_range(0.05..0.3);
        let body = random_body(&mut r, dim, size, 0.9 - 2.0 * size);
        let r_body = inradius_body(&body.clone().clipped()).unwrap().radius;
        let schedule = check_outer_shrink(&body, &[1e-2, 1e-3, 1e-4]).unwrap();
        for w in schedule.windows(2) {
            prop_assert!(w[1].1 <= w[0].1 + 1e-7);
        }
        for &(_, rc) in &schedule {
            prop_assert!(rc >= r_body - 1e-7);
        }
    }

    #[test]
    fn ascent_is_coordinate_maximal_and_below_exhaustive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=3);
        let n = r.gen_range(1..=4);
        let bodies = small_instance_bodies(&mut r, dim, n);
        let inst = CoveringInstance::assemble(dim, &bodies, r.gen_range(0.1..0.9)).unwrap();
        prop_assume!(inst.product_size() <= 10_000);
        let asc = maximize(&inst, Mode::Ascent).unwrap();
        let exh = maximize(&inst, Mode::Exhaustive).unwrap();
        prop_assert!(is_coordinate_maximal(&inst, &asc, 1e-12));
        prop_assert!(is_coordinate_maximal(&inst, &exh, 1e-12));
        prop_assert!(objective(&inst, &asc) <= objective(&inst, &exh) + 1e-12);
        prop_assert!(evaluate(&inst, &exh).unwrap().valid);
    }

    #[test]
    fn witness_agrees_with_the_grid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let bodies = small_instance_bodies(&mut r, 2, n);
        let inst = CoveringInstance::assemble(2, &bodies, 0.5).unwrap();
        let report = witness(&inst, Mode::Ascent).unwrap();
        for b in &bodies {
            prop_assert!(!b.contains(&report.witness, 1e-9).unwrap());
        }
        let scenario = Scenario::new(BallBody::unit(2).into(), bodies, seed, "instance").unwrap();
        prop_assert!(grid_uncovered_oracle(&scenario, 0.02).is_some());
    }

    #[test]
    fn generated_partitions_cover_and_satisfy_the_inequality(seed in any::<u64>(), cuts in 0usize..5) {
        let mut r = rng(seed);
        let sides = r.gen_range(3..=5);
        let target = random_polygon(&mut r, sides);
        let scenario = generate_partition(&target, cuts, seed).unwrap();
        prop_assert_eq!(scenario.pieces.len(), cuts + 1);
        let res = verify_covering(&scenario, 300).unwrap();
        prop_assert!(res.covered);
        prop_assert!(res.inequality_holds);
        prop_assert_eq!(res.inequality_holds, !res.covered || res.sum_radii >= res.r_target - INEQUALITY_TOL);
        prop_assert!(grid_uncovered_oracle(&scenario, 0.05).is_none());
    }

    #[test]
    fn scenarios_are_byte_identical_for_equal_seeds(seed in any::<u64>(), cuts in 0usize..6) {
        let mut r = rng(seed);
        let dim = r.gen_range(2..=3);
        let target = random_tangent_polytope(&mut r, dim, dim + 2, 0.5);
        let a = serde_json::to_string(&generate_partition(&target, cuts, seed).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_partition(&target, cuts, seed).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn local_polytopes_have_the_requested_inradius() {
    let mut r = rng(5);
    for dim in 1..=3 {
        for _ in 0..20 {
            let c = random_point(&mut r, dim, 0.5);
            let p = local_polytope(&mut r, &c, 0.2, dim + 2);
            let ball = inradius_polytope(&p).unwrap();
            assert!((ball.radius - 0.2).abs() < 1e-9);
        }
    }
}

#[test]
fn body_json_round_trips() {
    let mut r = rng(8);
    for _ in 0..50 {
        let dim = r.gen_range(1..=3);
        let body = random_body(&mut r, dim, 0.3, 1.0);
        let body = if r.gen_bool(0.5) { body.clipped() } else { body };
        let text = serde_json::to_string(&body).unwrap();
        let back: Body = serde_json::from_str(&text).unwrap();
        assert_eq!(back, body);
    }
    let square: Body = Polytope::cube(2, -1.0, 1.0).into();
    assert!(serde_json::to_string(&square).unwrap().contains("\"type\":\"polytope\""));
}
