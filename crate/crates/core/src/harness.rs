//! Scenario generation and end-to-end checks of `Σ r(A_n) >= r(A)`.
//!
//! Scenarios are genuine coverings: a target polytope cut into cells by random
//! hyperplanes. Coverage of a scenario is certified by quasi-random sampling;
//! the grid oracle is an independent brute-force search for uncovered points.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Body, Halfspace, Polytope, Vector, DEFAULT_TOL};
use crate::inradius::{inradius_body, inradius_polytope};

/// Cells thinner than this are rejected when cutting.
pub const MIN_CELL_INRADIUS: f64 = 1e-6;

/// Redraws allowed per cut before giving up.
pub const CUT_RETRIES: usize = 100;

/// Slack on `Σ r(A_n) >= r(A)`.
pub const INEQUALITY_TOL: f64 = 1e-7;

/// Quasi-random samples per scenario in [`sweep`].
pub const SWEEP_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetadata {
    pub seed: u64,
    pub generator: String,
}

/// A target body and the pieces claimed to cover it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub target: Body,
    pub pieces: Vec<Body>,
    pub metadata: ScenarioMetadata,
}

impl Scenario {
    pub fn new(target: Body, pieces: Vec<Body>, seed: u64, generator: &str) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("scenario needs at least one piece".into()));
        }
        for p in &pieces {
            if p.dim() != target.dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.dim(),
                    found: p.dim(),
                });
            }
        }
        Ok(Self {
            target,
            pieces,
            metadata: ScenarioMetadata {
                seed,
                generator: generator.to_string(),
            },
        })
    }

    fn covered(&self, p: &Vector) -> Result<bool> {
        for piece in &self.pieces {
            if piece.contains(p, DEFAULT_TOL)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub r_target: f64,
    pub piece_radii: Vec<f64>,
    pub sum_radii: f64,
    /// Sampling verdict: no sampled point of the target was left uncovered.
    pub covered: bool,
    pub inequality_holds: bool,
    pub uncovered_sample: Option<Vector>,
}

/// Split `cell` by the hyperplane through `point` with normal `normal`.
pub fn split_cell(cell: &Polytope, point: &Vector, normal: &Vector) -> Result<(Polytope, Polytope)> {
    let offset = point.dot(normal);
    let below = cell.with_halfspace(Halfspace::new(normal.clone(), offset)?)?;
    let above = cell.with_halfspace(Halfspace::new(-normal, -offset)?)?;
    Ok((below, above))
}

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    value
}

const HALTON_BASES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Halton points in `[0, 1)^d`, bases 2, 3, 5, … in coordinate order,
/// starting from index 1.
#[derive(Clone, Debug)]
pub struct Halton {
    dim: usize,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize) -> Self {
        assert!(
            dim <= HALTON_BASES.len(),
            "Halton sequence supports up to {} dimensions",
            HALTON_BASES.len()
        );
        Self { dim, index: 0 }
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.index += 1;
        Some(
            HALTON_BASES[..self.dim]
                .iter()
                .map(|&b| radical_inverse(self.index, b))
                .collect(),
        )
    }
}

/// Axis-aligned bounding box from support values.
pub fn bounding_box(body: &Body) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = body.dim();
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for k in 0..d {
        hi.push(body.support_value(&Vector::axis(d, k, 1.0))?);
        lo.push(-body.support_value(&Vector::axis(d, k, -1.0))?);
    }
    Ok((lo, hi))
}

/// Compute all inradii and test coverage on `samples` quasi-random points of
/// the target.
pub fn verify_covering(s: &Scenario, samples: usize) -> Result<VerificationResult> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be >= 1".into()));
    }
    let r_target = inradius_body(&s.target)?.radius;
    let piece_radii = s
        .pieces
        .iter()
        .map(|p| Ok(inradius_body(p)?.radius))
        .collect::<Result<Vec<_>>>()?;
    let sum_radii: f64 = piece_radii.iter().sum();

    let (lo, hi) = bounding_box(&s.target)?;
    let max_draws = samples.saturating_mul(1000);
    let mut accepted = 0;
    let mut uncovered_sample = None;
    for u in Halton::new(s.target.dim()).take(max_draws) {
        let p = Vector::new(
            u.iter()
                .enumerate()
                .map(|(k, t)| lo[k] + t * (hi[k] - lo[k]))
                .collect(),
        )?;
        if !s.target.contains(&p, 0.0)? {
            continue;
        }
        accepted += 1;
        if !s.covered(&p)? {
            uncovered_sample = Some(p);
            break;
        }
        if accepted == samples {
            break;
        }
    }
    let covered = uncovered_sample.is_none();
    let inequality_holds = !covered || sum_radii >= r_target - INEQUALITY_TOL;
    Ok(VerificationResult {
        r_target,
        piece_radii,
        sum_radii,
        covered,
        inequality_holds,
        uncovered_sample,
    })
}

/// First point of a grid of pitch `step` strictly inside the target and
/// outside every piece.
///
/// The grid is centered on the target's bounding box. Only `d <= 3` is
/// scanned; higher dimensions and unbounded targets return `None`.
pub fn grid_uncovered_oracle(s: &Scenario, step: f64) -> Option<Vector> {
    let d = s.target.dim();
    if d > 3 || !(step > 0.0) {
        return None;
    }
    let (lo, hi) = bounding_box(&s.target).ok()?;
    let counts: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| ((h - l) / step).floor() as usize)
        .collect();
    let starts: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .zip(&counts)
        .map(|((l, h), &n)| 0.5 * (l + h) - 0.5 * n as f64 * step)
        .collect();
    let mut idx = vec![0usize; d];
    loop {
        let p = Vector::new(
            idx.iter()
                .zip(&starts)
                .map(|(&i, &s0)| s0 + i as f64 * step)
                .collect(),
        )
        .ok()?;
        let inside = s.target.excess(&p).ok()? < -DEFAULT_TOL;
        if inside && !s.covered(&p).ok()? {
            return Some(p);
        }
        let mut k = d;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] <= counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Uniform random unit vector.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return Vector::from_raw(v.into_iter().map(|c| c / n).collect());
        }
    }
}

/// Random convex polygon with `sides` vertices on a random circle.
pub fn random_polygon<R: Rng>(rng: &mut R, sides: usize) -> Polytope {
    assert!(sides >= 3, "a polygon needs at least 3 sides");
    let min_gap = 0.6 * std::f64::consts::TAU / (2.0 * sides as f64);
    loop {
        let mut angles: Vec<f64> = (0..sides)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        let gaps_ok = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(std::f64::consts::TAU - angles[sides - 1] + angles[0]))
            .all(|g| g >= min_gap && g <= std::f64::consts::PI - 0.05);
        if !gaps_ok {
            continue;
        }
        let scale = rng.gen_range(0.5..2.0);
        let cx = rng.gen_range(-1.0..1.0);
        let cy = rng.gen_range(-1.0..1.0);
        let vertices: Vec<[f64; 2]> = angles
            .iter()
            .map(|a| [cx + scale * a.cos(), cy + scale * a.sin()])
            .collect();
        if let Ok(p) = Polytope::from_ccw_polygon(&vertices) {
            return p;
        }
    }
}

/// Bounded polytope cut out by `facets` random supporting hyperplanes of a
/// random ball; each offset is pushed out by up to `jitter` times the radius.
pub fn random_tangent_polytope<R: Rng>(
    rng: &mut R,
    dim: usize,
    facets: usize,
    jitter: f64,
) -> Polytope {
    loop {
        let center = Vector::from_raw((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let radius = rng.gen_range(0.2..0.6);
        let halfspaces = (0..facets)
            .map(|_| {
                let u = random_unit(rng, dim);
                let offset = center.dot(&u) + radius * (1.0 + jitter * rng.gen::<f64>());
                Halfspace::new(u, offset)
            })
            .collect::<Result<Vec<_>>>()
            .expect("unit normals are nonzero");
        let p = Polytope::new(dim, halfspaces).expect("dimensions agree");
        if p.is_bounded() {
            return p;
        }
    }
}

fn random_interior_point<R: Rng>(rng: &mut R, cell: &Polytope) -> Result<Vector> {
    let body = Body::from(cell.clone());
    let (lo, hi) = bounding_box(&body)?;
    for _ in 0..1000 {
        let p = Vector::from_raw(
            lo.iter()
                .zip(&hi)
                .map(|(l, h)| rng.gen_range(*l..=*h))
                .collect(),
        );
        if cell.excess(&p) < 0.0 {
            return Ok(p);
        }
    }
    Ok(inradius_polytope(cell)?.center)
}

/// Cut `target` by `cuts` random hyperplanes, each through a random interior
/// point of a randomly chosen cell. Deterministic in `seed`.
pub fn generate_partition(target: &Polytope, cuts: usize, seed: u64) -> Result<Scenario> {
    inradius_polytope(target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = vec![target.clone()];
    for _ in 0..cuts {
        let mut attempt = 0;
        loop {
            if attempt == CUT_RETRIES {
                return Err(Error::DegenerateCell {
                    retries: CUT_RETRIES,
                });
            }
            attempt += 1;
            let idx = rng.gen_range(0..cells.len());
            let point = random_interior_point(&mut rng, &cells[idx])?;
            let normal = random_unit(&mut rng, target.dim());
            let (a, b) = split_cell(&cells[idx], &point, &normal)?;
            let thick = |c: &Polytope| {
                inradius_polytope(c).is_ok_and(|ball| ball.radius >= MIN_CELL_INRADIUS)
            };
            if thick(&a) && thick(&b) {
                cells[idx] = a;
                cells.push(b);
                break;
            }
        }
    }
    Scenario::new(
        target.clone().into(),
        cells.into_iter().map(Body::from).collect(),
        seed,
        "hyperplane-partition",
    )
}

/// One line of the sweep report.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub trial: usize,
    pub sum_r: f64,
    pub r_target: f64,
    pub margin: f64,
    pub cuts: usize,
    pub inequality_holds: bool,
}

/// Random target for trial `trial`: a triangle or quadrilateral in the plane,
/// a tangent polytope otherwise.
fn sweep_target(rng: &mut ChaCha8Rng, dim: usize) -> Polytope {
    if dim == 2 {
        let sides = if rng.gen_bool(0.5) { 3 } else { 4 };
        random_polygon(rng, sides)
    } else {
        let facets = rng.gen_range(dim + 1..=dim + 3);
        random_tangent_polytope(rng, dim, facets, 0.5)
    }
}

/// Run `trials` random partitions (each with up to `max_cuts` cuts) through
/// [`verify_covering`]. Rows come back in trial order.
pub fn sweep(trials: usize, seed: u64, dim: usize, max_cuts: usize) -> Result<Vec<SweepRow>> {
    if dim == 0 || dim > HALTON_BASES.len() {
        return Err(Error::InvalidInput(format!(
            "sweep dimension must lie in 1..={}",
            HALTON_BASES.len()
        )));
    }
    if dim == 1 {
        return Err(Error::InvalidInput("sweep needs dimension >= 2".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let target = sweep_target(&mut rng, dim);
            let cuts = rng.gen_range(0..=max_cuts);
            let scenario = generate_partition(&target, cuts, rng.gen())?;
            let result = verify_covering(&scenario, SWEEP_SAMPLES)?;
            Ok(SweepRow {
                trial,
                sum_r: result.sum_radii,
                r_target: result.r_target,
                margin: result.sum_radii - result.r_target,
                cuts,
                inequality_holds: result.inequality_holds,
            })
        })
        .collect()
}

/// CSV with header `trial,sum_r,r_target,margin`, 17 significant digits and
/// LF line endings.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("trial,sum_r,r_target,margin\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            r.trial, r.sum_r, r.r_target, r.margin
        )
        .expect("writing to a String cannot fail");
    }
    out
}
