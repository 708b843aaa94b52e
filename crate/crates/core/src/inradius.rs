//! Inradius `r(A)` and maximizing inscribed balls.
//!
//! Polytopes go through the Chebyshev-center LP. Intersections with the unit
//! ball are a second-order cone problem; they are solved by bisection on the
//! radius, with each feasibility test answered by a Dykstra projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallBody, Body, Halfspace, Plank, Polytope, Shape, Vector};
use crate::lp::{self, LpOutcome};

/// Tolerance for reporting a constraint as touching the inscribed ball.
pub const TOUCH_TOL: f64 = 1e-7;

/// Bisection tolerance on the radius for clipped bodies.
pub const BISECTION_TOL: f64 = 1e-9;

/// A maximal inscribed ball.
///
/// `touching` lists the indices of the halfspaces the ball touches (for a
/// plank, 0 is the upper side and 1 the lower side). The unit-ball clip is
/// never listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InscribedBall {
    pub radius: f64,
    pub center: Vector,
    pub touching: Vec<usize>,
}

enum Chebyshev {
    Finite(InscribedBall),
    /// The LP objective is unbounded: the polytope holds arbitrarily large balls.
    Infinite,
}

/// Solve `max r  s.t. <x, w_i> + r |w_i| <= a_i, r >= 0` without any
/// boundedness check on the polytope itself.
fn chebyshev(p: &Polytope) -> Result<Chebyshev> {
    let d = p.dim();
    let mut rows = Vec::with_capacity(p.halfspaces().len());
    let mut rhs = Vec::with_capacity(p.halfspaces().len());
    for h in p.halfspaces() {
        let norm = h.normal().norm();
        let mut row: Vec<f64> = h.normal().as_slice().iter().map(|w| w / norm).collect();
        row.push(1.0);
        rows.push(row);
        rhs.push(h.offset() / norm);
    }
    let mut c = vec![0.0; d + 1];
    c[d] = 1.0;
    let mut free = vec![true; d + 1];
    free[d] = false;
    match lp::maximize(&c, &rows, &rhs, &free) {
        LpOutcome::Optimal { x, value } => {
            if value <= 1e-12 {
                return Err(Error::EmptyInterior);
            }
            let center = Vector::new(x[..d].to_vec())?;
            let touching = touching_indices(p, &center, value, TOUCH_TOL);
            Ok(Chebyshev::Finite(InscribedBall {
                radius: value,
                center,
                touching,
            }))
        }
        LpOutcome::Unbounded => Ok(Chebyshev::Infinite),
        LpOutcome::Infeasible => Err(Error::EmptyInterior),
        LpOutcome::IterationLimit => Err(Error::NoConvergence {
            what: "simplex",
            iterations: lp::MAX_PIVOTS,
        }),
    }
}

fn touching_indices(p: &Polytope, center: &Vector, radius: f64, tol: f64) -> Vec<usize> {
    p.halfspaces()
        .iter()
        .enumerate()
        .filter(|(_, h)| (-h.excess(center) / h.normal().norm() - radius).abs() <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Inradius of a bounded polytope with nonempty interior.
pub fn inradius_polytope(p: &Polytope) -> Result<InscribedBall> {
    if !p.is_bounded() {
        return Err(Error::Unbounded);
    }
    match chebyshev(p)? {
        Chebyshev::Finite(ball) => Ok(ball),
        Chebyshev::Infinite => Err(Error::Unbounded),
    }
}

/// Inradius of any supported body, clipped or not.
pub fn inradius_body(b: &Body) -> Result<InscribedBall> {
    match (&b.shape, b.clip_to_unit_ball) {
        (Shape::Polytope(p), false) => inradius_polytope(p),
        (Shape::Polytope(p), true) => inradius_clipped(p),
        (Shape::Ball(ball), false) => Ok(InscribedBall {
            radius: ball.radius(),
            center: ball.center().clone(),
            touching: Vec::new(),
        }),
        (Shape::Ball(ball), true) => clipped_ball(ball),
        (Shape::Plank(plank), false) => Ok(InscribedBall {
            radius: 0.5 * plank.width(),
            center: plank.median_center(),
            touching: vec![0, 1],
        }),
        (Shape::Plank(plank), true) => clipped_plank(plank),
    }
}

/// Largest ball inside the lens `ball ∩ B`.
fn clipped_ball(ball: &BallBody) -> Result<InscribedBall> {
    let dist = ball.center().norm();
    let rho = ball.radius();
    if dist + rho <= 1.0 {
        return Ok(InscribedBall {
            radius: rho,
            center: ball.center().clone(),
            touching: Vec::new(),
        });
    }
    if dist + 1.0 <= rho {
        return Ok(InscribedBall {
            radius: 1.0,
            center: Vector::zeros(ball.dim()),
            touching: Vec::new(),
        });
    }
    if dist >= 1.0 + rho {
        return Err(Error::EmptyInterior);
    }
    // The lens meets the line through both centers in [dist - rho, 1].
    let radius = 0.5 * (1.0 + rho - dist);
    let along = 0.5 * (dist - rho + 1.0);
    let center = ball.center().scaled(along / dist);
    Ok(InscribedBall {
        radius,
        center,
        touching: Vec::new(),
    })
}

/// Largest ball inside `plank ∩ B`: the slab interval intersected with [-1, 1].
fn clipped_plank(plank: &Plank) -> Result<InscribedBall> {
    let s = plank.median_offset();
    let half = 0.5 * plank.width();
    let lo = (s - half).max(-1.0);
    let hi = (s + half).min(1.0);
    if hi - lo <= 0.0 {
        return Err(Error::EmptyInterior);
    }
    let radius = 0.5 * (hi - lo);
    let mut touching = Vec::new();
    if (s + half - hi).abs() <= TOUCH_TOL {
        touching.push(0);
    }
    if (lo - (s - half)).abs() <= TOUCH_TOL {
        touching.push(1);
    }
    Ok(InscribedBall {
        radius,
        center: plank.direction().scaled(0.5 * (lo + hi)),
        touching,
    })
}

/// Iteration controls for Dykstra's projection.
#[derive(Clone, Copy, Debug)]
pub struct ProjectionOptions {
    pub max_iter: usize,
    /// Stop once a full cycle moves the iterate and the correction terms by
    /// less than this.
    pub tol: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            tol: 1e-13,
        }
    }
}

/// Feasibility slack accepted on the final projected point.
const PROJECTION_FEAS_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
enum ConvexSet {
    Halfspace { normal: Vector, offset: f64, norm_sq: f64 },
    Ball { center: Vector, radius: f64 },
}

impl ConvexSet {
    fn halfspace(h: &Halfspace) -> Self {
        ConvexSet::Halfspace {
            normal: h.normal().clone(),
            offset: h.offset(),
            norm_sq: h.normal().norm_sq(),
        }
    }

    fn project(&self, z: &Vector) -> Vector {
        match self {
            ConvexSet::Halfspace {
                normal,
                offset,
                norm_sq,
            } => {
                let e = z.dot(normal) - offset;
                if e > 0.0 {
                    z.add_scaled(-e / norm_sq, normal)
                } else {
                    z.clone()
                }
            }
            ConvexSet::Ball { center, radius } => {
                let dist = z.distance(center);
                if dist > *radius {
                    center.add_scaled(radius / dist, &(z - center))
                } else {
                    z.clone()
                }
            }
        }
    }

    fn excess(&self, z: &Vector) -> f64 {
        match self {
            ConvexSet::Halfspace {
                normal,
                offset,
                norm_sq,
            } => (z.dot(normal) - offset) / norm_sq.sqrt(),
            ConvexSet::Ball { center, radius } => z.distance(center) - radius,
        }
    }
}

fn shape_sets(shape: &Shape) -> Vec<ConvexSet> {
    match shape {
        Shape::Polytope(p) => p.halfspaces().iter().map(ConvexSet::halfspace).collect(),
        Shape::Ball(b) => vec![ConvexSet::Ball {
            center: b.center().clone(),
            radius: b.radius(),
        }],
        Shape::Plank(p) => p
            .to_polytope()
            .halfspaces()
            .iter()
            .map(ConvexSet::halfspace)
            .collect(),
    }
}

/// Dykstra's alternating projections: nearest point of `⋂ sets` to `target`.
fn dykstra(sets: &[ConvexSet], target: &Vector, opts: ProjectionOptions) -> Result<Vector> {
    match sets.len() {
        0 => return Ok(target.clone()),
        1 => return Ok(sets[0].project(target)),
        _ => {}
    }
    let d = target.dim();
    let mut x = target.clone();
    let mut corrections = vec![Vector::zeros(d); sets.len()];
    let scale = 1.0 + target.norm();
    for _ in 0..opts.max_iter {
        let start = x.clone();
        let mut correction_change = 0.0;
        for (set, y) in sets.iter().zip(corrections.iter_mut()) {
            let z = &x + y;
            let next = set.project(&z);
            let new_y = &z - &next;
            correction_change += new_y.distance(y).powi(2);
            *y = new_y;
            x = next;
        }
        if x.distance(&start) <= opts.tol * scale
            && correction_change.sqrt() <= opts.tol * scale
        {
            return finish_projection(sets, x);
        }
    }
    let worst = max_excess(sets, &x);
    if worst > PROJECTION_FEAS_TOL {
        Err(Error::EmptyIntersection)
    } else {
        Err(Error::NoConvergence {
            what: "Dykstra projection",
            iterations: opts.max_iter,
        })
    }
}

fn max_excess(sets: &[ConvexSet], x: &Vector) -> f64 {
    sets.iter()
        .map(|s| s.excess(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn finish_projection(sets: &[ConvexSet], x: Vector) -> Result<Vector> {
    if max_excess(sets, &x) > PROJECTION_FEAS_TOL {
        Err(Error::EmptyIntersection)
    } else {
        Ok(x)
    }
}

fn polytope_is_empty(p: &Polytope) -> bool {
    if p.halfspaces().is_empty() {
        return false;
    }
    let (a, b) = p.rows();
    matches!(
        lp::maximize_free(&vec![0.0; p.dim()], &a, &b),
        LpOutcome::Infeasible
    )
}

/// Nearest point of `{|x| <= ball_radius} ∩ p` to `target`.
///
/// `ball_radius` may be `f64::INFINITY` to project onto `p` alone.
pub fn project_point(p: &Polytope, ball_radius: f64, target: &Vector) -> Result<Vector> {
    project_point_with(p, ball_radius, target, ProjectionOptions::default())
}

pub fn project_point_with(
    p: &Polytope,
    ball_radius: f64,
    target: &Vector,
    opts: ProjectionOptions,
) -> Result<Vector> {
    target.check_dim(p.dim())?;
    if !(ball_radius >= 0.0) {
        return Err(Error::InvalidInput("ball radius must be nonnegative".into()));
    }
    if polytope_is_empty(p) {
        return Err(Error::EmptyIntersection);
    }
    let mut sets: Vec<ConvexSet> = p.halfspaces().iter().map(ConvexSet::halfspace).collect();
    if ball_radius.is_finite() {
        sets.push(ConvexSet::Ball {
            center: Vector::zeros(p.dim()),
            radius: ball_radius,
        });
    }
    dykstra(&sets, target, opts)
}

/// Inradius of `p ∩ B` for the closed unit ball `B`.
pub fn inradius_clipped(p: &Polytope) -> Result<InscribedBall> {
    let origin = Vector::zeros(p.dim());
    let upper = match chebyshev(p)? {
        Chebyshev::Finite(ball) => {
            if ball.center.norm() + ball.radius <= 1.0 {
                return Ok(ball);
            }
            ball.radius.min(1.0)
        }
        Chebyshev::Infinite => 1.0,
    };

    // Feasible iff the shrunken polytope comes within 1 - rho of the origin.
    let feasible = |rho: f64| -> Result<Option<Vector>> {
        let q = project_point(&p.shrunk(rho), f64::INFINITY, &origin)?;
        Ok((q.norm() <= 1.0 - rho).then_some(q))
    };

    let mut lo = 0.0;
    let mut center = feasible(0.0)?.ok_or(Error::EmptyInterior)?;
    if let Some(q) = feasible(upper)? {
        lo = upper;
        center = q;
    } else {
        let mut hi = upper;
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            match feasible(mid)? {
                Some(q) => {
                    lo = mid;
                    center = q;
                }
                None => hi = mid,
            }
        }
    }
    if lo <= BISECTION_TOL {
        return Err(Error::EmptyInterior);
    }
    let touching = touching_indices(p, &center, lo, TOUCH_TOL);
    Ok(InscribedBall {
        radius: lo,
        center,
        touching,
    })
}

/// `sup <h, u>` over `shape ∩ B` by bisection on the level `t`.
pub(crate) fn clipped_support(shape: &Shape, u: &Vector) -> Result<f64> {
    let unclipped = match shape.support(u) {
        Ok(v) => v,
        Err(Error::UnboundedSupport) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let sets = shape_sets(shape);
    let origin = Vector::zeros(u.dim());
    let closest = dykstra(&sets, &origin, ProjectionOptions::default())?;
    if closest.norm() > 1.0 + PROJECTION_FEAS_TOL {
        return Err(Error::EmptyIntersection);
    }
    let unorm = u.norm();
    let mut hi = unclipped.min(unorm);
    let mut lo = closest.dot(u).min(hi);
    let cut = -u;
    let reaches = |t: f64| -> Result<bool> {
        if t > unclipped {
            return Ok(false);
        }
        let mut level_sets = sets.clone();
        level_sets.push(ConvexSet::Halfspace {
            normal: cut.clone(),
            offset: -t,
            norm_sq: unorm * unorm,
        });
        match dykstra(&level_sets, &origin, ProjectionOptions::default()) {
            Ok(q) => Ok(q.norm() <= 1.0),
            Err(Error::EmptyIntersection) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if reaches(hi)? {
        return Ok(hi);
    }
    let tol = 1e-11 * unorm.max(1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if reaches(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn triangle() -> Polytope {
        Polytope::from_constraints(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![3.0, 4.0]],
            vec![0.0, 0.0, 12.0],
        )
        .unwrap()
    }

    #[test]
    fn square_inradius() {
        let ball = inradius_polytope(&Polytope::cube(2, -1.0, 1.0)).unwrap();
        close(ball.radius, 1.0, 1e-9);
        close(ball.center.norm(), 0.0, 1e-9);
        assert_eq!(ball.touching, vec![0, 1, 2, 3]);
    }

    #[test]
    fn triangle_inradius_matches_area_over_semiperimeter() {
        // Area 6, semiperimeter (3 + 4 + 5) / 2 = 6.
        let ball = inradius_polytope(&triangle()).unwrap();
        close(ball.radius, 6.0 / 6.0, 1e-9);
        close(ball.center[0], 1.0, 1e-9);
        close(ball.center[1], 1.0, 1e-9);
        assert_eq!(ball.touching, vec![0, 1, 2]);
    }

    #[test]
    fn plank_as_polytope_is_unbounded_but_plank_path_works() {
        let plank = Plank::new(Vector::zeros(2), Vector::from([1.0, 0.0]), 1.0).unwrap();
        assert_eq!(inradius_polytope(&plank.to_polytope()), Err(Error::Unbounded));
        close(inradius_body(&plank.into()).unwrap().radius, 0.5, 0.0);
    }

    #[test]
    fn body_dispatch() {
        let ball: Body = BallBody::new(Vector::from([3.0, 3.0]), 0.25).unwrap().into();
        let got = inradius_body(&ball).unwrap();
        assert_eq!(got.radius, 0.25);
        assert_eq!(got.center, Vector::from([3.0, 3.0]));

        let plank: Body = Plank::new(Vector::from([0.1, 0.0]), Vector::from([1.0, 0.0]), 0.4)
            .unwrap()
            .into();
        let got = inradius_body(&plank).unwrap();
        close(got.radius, 0.2, 1e-15);
        close(got.center[0], 0.1, 1e-15);
    }

    #[test]
    fn empty_interior_is_an_error() {
        let flat = Polytope::from_constraints(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![0.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(inradius_polytope(&flat), Err(Error::EmptyInterior));
        let empty = Polytope::from_constraints(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![-1.0, -1.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(inradius_polytope(&empty), Err(Error::EmptyInterior));
    }

    #[test]
    fn projection_examples() {
        let half = Polytope::from_constraints(vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
        let q = project_point(&half, 1.0, &Vector::from([2.0, 0.0])).unwrap();
        close(q.distance(&Vector::from([0.0, 0.0])), 0.0, 1e-8);

        let q = project_point(&Polytope::whole_space(2), 1.0, &Vector::from([3.0, 4.0])).unwrap();
        close(q.distance(&Vector::from([0.6, 0.8])), 0.0, 1e-8);

        let corner = Polytope::from_constraints(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![-0.5, -0.5],
        )
        .unwrap();
        let q = project_point(&corner, 1.0, &Vector::from([1.0, 1.0])).unwrap();
        close(q.distance(&Vector::from([-0.5, -0.5])), 0.0, 1e-8);
    }

    #[test]
    fn projection_corner_matches_grid_oracle() {
        // Brute force over a grid of the feasible set.
        let corner = Polytope::from_constraints(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![-0.5, -0.5],
        )
        .unwrap();
        let target = Vector::from([1.0, 1.0]);
        let step = 1e-3;
        let mut best = (f64::INFINITY, Vector::zeros(2));
        for i in 0..=2000 {
            for j in 0..=2000 {
                let p = Vector::from([-1.0 + i as f64 * step, -1.0 + j as f64 * step]);
                if p.norm() <= 1.0 && corner.excess(&p) <= 1e-12 {
                    let dist = p.distance(&target);
                    if dist < best.0 {
                        best = (dist, p);
                    }
                }
            }
        }
        let q = project_point(&corner, 1.0, &target).unwrap();
        assert!(q.distance(&best.1) <= 2.0 * step);
        assert!(q.distance(&target) <= best.0 + 1e-9);
    }

    #[test]
    fn projection_detects_empty_intersection() {
        let far = Polytope::from_constraints(vec![vec![-1.0, 0.0]], vec![-2.0]).unwrap();
        assert_eq!(
            project_point(&far, 1.0, &Vector::zeros(2)),
            Err(Error::EmptyIntersection)
        );
        let empty = Polytope::from_constraints(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            vec![-1.0, -1.0],
        )
        .unwrap();
        assert_eq!(
            project_point(&empty, f64::INFINITY, &Vector::zeros(2)),
            Err(Error::EmptyIntersection)
        );
    }

    #[test]
    fn clipped_examples() {
        let ball = inradius_clipped(&Polytope::whole_space(2)).unwrap();
        close(ball.radius, 1.0, 1e-7);
        close(ball.center.norm(), 0.0, 1e-7);

        let half = Polytope::from_constraints(vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
        let ball = inradius_clipped(&half).unwrap();
        close(ball.radius, 0.5, 1e-7);
        close(ball.center.distance(&Vector::from([-0.5, 0.0])), 0.0, 1e-6);

        let slab = Polytope::from_constraints(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            vec![0.0, 0.2],
        )
        .unwrap();
        close(inradius_clipped(&slab).unwrap().radius, 0.1, 1e-7);
    }

    #[test]
    fn clipped_half_plane_matches_one_parameter_oracle() {
        // Ball center (-c, 0): radius min(c, 1 - c), maximized over a grid of c.
        let best = (0..=100_000)
            .map(|i| {
                let c = i as f64 * 1e-5;
                c.min(1.0 - c)
            })
            .fold(0.0, f64::max);
        let half = Polytope::from_constraints(vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
        close(inradius_clipped(&half).unwrap().radius, best, 1e-5);
    }

    #[test]
    fn clipped_far_polytope_is_empty() {
        let far = Polytope::cube(2, 2.0, 3.0);
        assert_eq!(inradius_clipped(&far), Err(Error::EmptyInterior));
    }

    #[test]
    fn clipped_closed_forms_match_bisection() {
        let ball: Body = BallBody::new(Vector::from([0.8, 0.0]), 0.5).unwrap().into();
        let lens = inradius_body(&ball.clipped()).unwrap();
        close(lens.radius, 0.35, 1e-12);
        close(lens.center[0], 0.65, 1e-12);

        let plank = Plank::new(Vector::from([0.9, 0.0]), Vector::from([1.0, 0.0]), 0.4).unwrap();
        let exact = inradius_body(&Body::from(plank.clone()).clipped()).unwrap();
        close(exact.radius, 0.15, 1e-12);
        let numeric = inradius_clipped(&plank.to_polytope()).unwrap();
        close(numeric.radius, exact.radius, 1e-7);
    }

    #[test]
    fn clipped_support_values() {
        let square: Body = Body::from(Polytope::cube(2, -1.0, 1.0)).clipped();
        let u = Vector::from([1.0, 1.0]);
        close(square.support_value(&u).unwrap(), 2f64.sqrt(), 1e-9);

        let plank: Body = Plank::new(Vector::zeros(2), Vector::from([1.0, 0.0]), 0.4)
            .unwrap()
            .into();
        let clipped = plank.clipped();
        close(clipped.support_value(&Vector::from([1.0, 0.0])).unwrap(), 0.2, 1e-9);
        close(clipped.support_value(&Vector::from([0.0, 1.0])).unwrap(), 1.0, 1e-9);
        // Corner of the slab on the circle: (0.2, sqrt(0.96)).
        close(
            clipped.support_value(&Vector::from([1.0, 1.0])).unwrap(),
            0.2 + 0.96f64.sqrt(),
            1e-9,
        );
    }
}
