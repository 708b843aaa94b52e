#![allow(dead_code)]

use covercert::geometry::{BallBody, Body, Halfspace, Plank, Polytope, Vector};
use covercert::harness::{random_tangent_polytope, random_unit};
use covercert::inradius::inradius_body;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vector {
    random_unit(rng, dim).scaled(radius * rng.gen::<f64>().powf(1.0 / dim as f64))
}

/// Polytope cut out by a few supporting hyperplanes of the ball
/// `center + radius B`, boxed in so it stays within `center + 2 radius B`.
pub fn local_polytope<R: Rng>(rng: &mut R, center: &Vector, radius: f64, facets: usize) -> Polytope {
    let dim = center.dim();
    let mut p = random_tangent_polytope(rng, dim, facets, 0.3);
    // Move the generator's random ball onto the requested one.
    let ball = inradius_body(&p.clone().into()).expect("generated polytopes are bounded");
    let scale = radius / ball.radius;
    let halfspaces = p
        .halfspaces()
        .iter()
        .map(|h| {
            let w = h.normal();
            let off = (h.offset() - ball.center.dot(w)) * scale + center.dot(w);
            Halfspace::new(w.clone(), off).unwrap()
        })
        .collect();
    p = Polytope::new(dim, halfspaces).unwrap();
    let reach = 2.0 * radius / (dim as f64).sqrt();
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let w = Vector::axis(dim, k, sign);
            let off = center.dot(&w) + reach.max(radius * 1.01);
            p = p.with_halfspace(Halfspace::new(w, off).unwrap()).unwrap();
        }
    }
    p
}

/// Polytope, ball or plank of size about `size` around a point of
/// `spread B`.
pub fn random_body<R: Rng>(rng: &mut R, dim: usize, size: f64, spread: f64) -> Body {
    let center = random_point(rng, dim, spread);
    let kind = if dim == 1 { rng.gen_range(1..3) } else { rng.gen_range(0..3) };
    match kind {
        0 => {
            let facets = rng.gen_range(dim + 1..=dim + 3);
            local_polytope(rng, &center, size, facets).into()
        }
        1 => BallBody::new(center, size).unwrap().into(),
        _ => Plank::new(center, random_unit(rng, dim), 2.0 * size).unwrap().into(),
    }
}

/// Grid brute force for the inradius of a polygon: the largest distance to
/// the boundary over grid points inside it.
pub fn grid_inradius(p: &Polytope, step: f64) -> f64 {
    let rows: Vec<(f64, f64, f64)> = p
        .halfspaces()
        .iter()
        .map(|h| {
            let n = h.normal().norm();
            (h.normal()[0] / n, h.normal()[1] / n, h.offset() / n)
        })
        .collect();
    let body: Body = p.clone().into();
    let hi_x = body.support_value(&Vector::from([1.0, 0.0])).unwrap();
    let lo_x = -body.support_value(&Vector::from([-1.0, 0.0])).unwrap();
    let hi_y = body.support_value(&Vector::from([0.0, 1.0])).unwrap();
    let lo_y = -body.support_value(&Vector::from([0.0, -1.0])).unwrap();
    let mut best = 0.0f64;
    let nx = ((hi_x - lo_x) / step).ceil() as usize;
    let ny = ((hi_y - lo_y) / step).ceil() as usize;
    for i in 0..=nx {
        let x = lo_x + i as f64 * step;
        for j in 0..=ny {
            let y = lo_y + j as f64 * step;
            let mut d = f64::INFINITY;
            for &(a, b, c) in &rows {
                d = d.min(c - a * x - b * y);
                if d <= best {
                    break;
                }
            }
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Bodies of total inradius below one with incenters well inside the unit
/// ball.
pub fn small_instance_bodies<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Vec<Body> {
    loop {
        let sizes: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..0.4)).collect();
        if sizes.iter().sum::<f64>() < 0.95 {
            return sizes
                .iter()
                .map(|&s| random_body(rng, dim, s, 0.9 - 2.0 * s.min(0.4)))
                .collect();
        }
    }
}
