//! Outer polytopes with convex-hull certificates.
//!
//! For a body `A` with inscribed ball `o + rB`, an [`OuterPolytope`] is a set
//! of directions `V` on the sphere of radius `r` such that
//!
//! * `A ⊂ W = ⋂_{v ∈ V} {h : <h - o, v> < r² + ε}`, and
//! * `dist(conv V, 0) <= ε`.
//!
//! Directions come from the touching normals of the Chebyshev LP for
//! polytopes (LP optimality puts 0 in their convex hull) and from closed forms
//! for balls and planks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Body, Polytope, Shape, Vector};
use crate::inradius::{inradius_body, inradius_clipped, InscribedBall};

/// Iteration cap for the Frank-Wolfe solver.
pub const MIN_NORM_MAX_ITER: usize = 100_000;

/// Tolerance on `|v| = r` for outer directions.
pub const DIRECTION_NORM_TOL: f64 = 1e-9;

/// Minimum-norm element of a convex hull, with its convex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct MinNormPoint {
    pub point: Vector,
    pub distance: f64,
    pub weights: Vec<f64>,
}

/// Nearest point of `conv(points)` to the origin.
///
/// Hulls of at most three points are solved exactly by enumerating active
/// faces; larger inputs use Frank-Wolfe with away steps, finished by an exact
/// solve on the final active face.
pub fn min_norm_point(points: &[Vector]) -> Result<MinNormPoint> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("min_norm_point needs at least one point".into()))?;
    for p in points {
        p.check_dim(first.dim())?;
    }
    if points.len() <= 3 {
        return Ok(min_norm_by_faces(points));
    }
    frank_wolfe_away(points)
}

fn combine(points: &[Vector], weights: &[f64]) -> Vector {
    let mut q = Vector::zeros(points[0].dim());
    for (p, &w) in points.iter().zip(weights) {
        if w != 0.0 {
            q.axpy(w, p);
        }
    }
    q
}

fn finish(points: &[Vector], weights: Vec<f64>) -> MinNormPoint {
    let point = combine(points, &weights);
    MinNormPoint {
        distance: point.norm(),
        point,
        weights,
    }
}

/// Affine minimizer of `|sum λ_i p_i|` subject to `sum λ_i = 1` over `subset`.
fn affine_min_norm(points: &[Vector], subset: &[usize]) -> Option<Vec<f64>> {
    let k = subset.len();
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    for (r, &i) in subset.iter().enumerate() {
        for (c, &j) in subset.iter().enumerate() {
            a[r][c] = points[i].dot(&points[j]);
        }
        a[r][k] = 1.0;
        a[k][r] = 1.0;
    }
    let mut b = vec![0.0; k + 1];
    b[k] = 1.0;
    let sol = solve_dense(a, b)?;
    Some(sol[..k].to_vec())
}

/// Gaussian elimination with partial pivoting; `None` when (near) singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[row][c] -= f * a[col][c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn min_norm_by_faces(points: &[Vector]) -> MinNormPoint {
    let n = points.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let Some(lambda) = affine_min_norm(points, &subset) else {
            continue;
        };
        if lambda.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let mut weights = vec![0.0; n];
        let total: f64 = lambda.iter().map(|l| l.max(0.0)).sum();
        for (&i, &l) in subset.iter().zip(&lambda) {
            weights[i] = l.max(0.0) / total;
        }
        let norm_sq = combine(points, &weights).norm_sq();
        if best.as_ref().is_none_or(|(b, _)| norm_sq < *b) {
            best = Some((norm_sq, weights));
        }
    }
    // Singletons are always feasible, so `best` is set.
    let (_, weights) = best.expect("singleton faces are always feasible");
    finish(points, weights)
}

fn frank_wolfe_away(points: &[Vector]) -> Result<MinNormPoint> {
    let n = points.len();
    let dim = points[0].dim();
    let radius_sq = points.iter().map(Vector::norm_sq).fold(0.0, f64::max);
    let gap_tol = 1e-16 * radius_sq.max(1.0);

    let start = (0..n)
        .min_by(|&i, &j| points[i].norm_sq().total_cmp(&points[j].norm_sq()))
        .unwrap_or(0);
    let mut weights = vec![0.0; n];
    weights[start] = 1.0;
    let mut q = points[start].clone();

    for it in 0..MIN_NORM_MAX_ITER {
        let dots: Vec<f64> = points.iter().map(|p| p.dot(&q)).collect();
        let qq = q.norm_sq();
        let (s, &ds) = dots
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let gap = qq - ds;
        if gap <= gap_tol {
            return Ok(finish(points, weights));
        }
        let (a, &da) = dots
            .iter()
            .enumerate()
            .filter(|(i, _)| weights[*i] > 0.0)
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("active set is nonempty");
        let away_gap = da - qq;

        if gap >= away_gap {
            let d = &points[s] - &q;
            let dd = d.norm_sq();
            let gamma = (-q.dot(&d) / dd).clamp(0.0, 1.0);
            for w in weights.iter_mut() {
                *w *= 1.0 - gamma;
            }
            weights[s] += gamma;
        } else {
            let wa = weights[a];
            let d = &q - &points[a];
            let dd = d.norm_sq();
            let gamma_max = wa / (1.0 - wa);
            let gamma = (-q.dot(&d) / dd).clamp(0.0, gamma_max);
            for w in weights.iter_mut() {
                *w *= 1.0 + gamma;
            }
            if gamma >= gamma_max {
                weights[a] = 0.0;
            } else {
                weights[a] -= gamma;
            }
        }
        q = combine(points, &weights);

        if it % 16 == 15 {
            polish(points, &mut weights, &mut q, dim);
        }
    }
    Err(Error::NoConvergence {
        what: "min-norm point",
        iterations: MIN_NORM_MAX_ITER,
    })
}

/// Jump to the affine minimizer of the active face when it stays inside the
/// face and lowers the norm.
fn polish(points: &[Vector], weights: &mut [f64], q: &mut Vector, dim: usize) {
    let active: Vec<usize> = (0..points.len()).filter(|&i| weights[i] > 0.0).collect();
    if active.len() > dim + 1 {
        return;
    }
    let Some(lambda) = affine_min_norm(points, &active) else {
        return;
    };
    if lambda.iter().any(|&l| l <= 0.0) {
        return;
    }
    let mut candidate = vec![0.0; points.len()];
    for (&i, &l) in active.iter().zip(&lambda) {
        candidate[i] = l;
    }
    let cq = combine(points, &candidate);
    if cq.norm_sq() <= q.norm_sq() {
        weights.copy_from_slice(&candidate);
        *q = cq;
    }
}

/// Upper bound on `|x - y|` when `|x| = 1 + eps` and the hyperplane
/// `<h, y> = |y|²` separates `x` from the unit ball: `sqrt((1 + eps)² - 1)`.
pub fn separ_bound(eps: f64) -> f64 {
    assert!(eps >= 0.0, "separ_bound needs eps >= 0, got {eps}");
    ((1.0 + eps).powi(2) - 1.0).sqrt()
}

/// `W = ⋂_{v ∈ directions} {h : <h - center, v> < inradius² + slack}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterPolytope {
    pub center: Vector,
    pub directions: Vec<Vector>,
    pub inradius: f64,
    pub slack: f64,
}

impl OuterPolytope {
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Right-hand side `r² + ε` shared by every facet.
    pub fn threshold(&self) -> f64 {
        self.inradius * self.inradius + self.slack
    }

    /// `max_v <p - o, v> - (r² + ε)`; negative exactly on the open polytope.
    pub fn excess(&self, p: &Vector) -> f64 {
        let rel = p - &self.center;
        let t = self.threshold();
        self.directions
            .iter()
            .map(|v| rel.dot(v) - t)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership in the open polytope `W`.
    pub fn contains(&self, p: &Vector) -> bool {
        self.excess(p) < 0.0
    }

    /// The closure of `W` as an H-represented polytope.
    pub fn to_polytope(&self) -> Result<Polytope> {
        let t = self.threshold();
        let normals = self
            .directions
            .iter()
            .map(|v| v.as_slice().to_vec())
            .collect();
        let offsets = self
            .directions
            .iter()
            .map(|v| t + self.center.dot(v))
            .collect();
        Polytope::from_constraints(normals, offsets)
    }

    /// `dist(conv V, 0)` with its convex weights.
    pub fn hull_certificate(&self) -> Result<MinNormPoint> {
        min_norm_point(&self.directions)
    }
}

/// Build the outer polytope of `body` for slack `eps`.
///
/// Clipped bodies are accepted only when the clip does not cut the inscribed
/// ball of the unclipped body; the unclipped construction is then exact.
pub fn build_outer(body: &Body, eps: f64) -> Result<OuterPolytope> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput("slack must be positive".into()));
    }
    let unclipped = Body {
        shape: body.shape.clone(),
        clip_to_unit_ball: false,
    };
    let ball = match inradius_body(&unclipped) {
        Err(Error::Unbounded) => {
            return Err(Error::UnsupportedBody("unbounded polytope".into()));
        }
        other => other?,
    };
    if body.clip_to_unit_ball && ball.center.norm() + ball.radius > 1.0 + 1e-12 {
        return Err(Error::UnsupportedBody(
            "unit-ball clip cuts the inscribed ball".into(),
        ));
    }
    let outer = OuterPolytope {
        directions: outer_directions(&body.shape, &ball),
        center: ball.center,
        inradius: ball.radius,
        slack: eps,
    };
    certify(&body.shape, &outer)?;
    Ok(outer)
}

fn outer_directions(shape: &Shape, ball: &InscribedBall) -> Vec<Vector> {
    let r = ball.radius;
    match shape {
        Shape::Polytope(p) => ball
            .touching
            .iter()
            .map(|&i| {
                let n = p.halfspaces()[i].normal();
                n.scaled(r / n.norm())
            })
            .collect(),
        Shape::Ball(b) => (0..b.dim())
            .flat_map(|k| {
                [
                    Vector::axis(b.dim(), k, r),
                    Vector::axis(b.dim(), k, -r),
                ]
            })
            .collect(),
        Shape::Plank(p) => vec![p.direction().scaled(r), p.direction().scaled(-r)],
    }
}

/// Re-check both certificates before handing the polytope out.
fn certify(shape: &Shape, outer: &OuterPolytope) -> Result<()> {
    if outer.directions.is_empty() {
        return Err(Error::CertificateFailure("no outer directions".into()));
    }
    let threshold = outer.threshold();
    for v in &outer.directions {
        if (v.norm() - outer.inradius).abs() > DIRECTION_NORM_TOL {
            return Err(Error::CertificateFailure(format!(
                "direction {v:?} has norm {} instead of {}",
                v.norm(),
                outer.inradius
            )));
        }
        let support = match shape.support(v) {
            Ok(s) => s,
            Err(Error::UnboundedSupport) => {
                return Err(Error::CertificateFailure(format!(
                    "body is unbounded along {v:?}"
                )))
            }
            Err(e) => return Err(e),
        };
        let reach = support - outer.center.dot(v);
        if !(reach < threshold) {
            return Err(Error::CertificateFailure(format!(
                "body reaches {reach} along {v:?}, threshold {threshold}"
            )));
        }
    }
    let hull = outer.hull_certificate()?;
    if hull.distance > outer.slack {
        return Err(Error::CertificateFailure(format!(
            "dist(conv V, 0) = {} exceeds slack {}",
            hull.distance, outer.slack
        )));
    }
    Ok(())
}

/// For each slack in `eps_schedule`, the inradius of `W ∩ B`.
pub fn check_outer_shrink(body: &Body, eps_schedule: &[f64]) -> Result<Vec<(f64, f64)>> {
    eps_schedule
        .iter()
        .map(|&eps| {
            let outer = build_outer(body, eps)?;
            let clipped = inradius_clipped(&outer.to_polytope()?)?;
            Ok((eps, clipped.radius))
        })
        .collect()
}
