//! Uncovered-point witnesses for finite families of outer polytopes.
//!
//! Given bodies `A_n ⊂ B` with outer polytopes `W_n` (center `o_n`, directions
//! `V_n ⊂ r_n S`, slack `ε_n`) and inflations `δ_n` with
//! `Σ (1 + δ_n) r_n < 1`, the engine picks one direction `x_n ∈ V_n` per body
//! so that no single swap increases
//!
//! ```text
//! |f(g)|² = |Σ (1 + δ_n) g_n|² + Σ |(1 + δ_n) g_n - o_n|²
//! ```
//!
//! and returns `x = Σ (1 + δ_n) x_n`. That point lies in the open unit ball and
//! satisfies `<x - o_j, x_j> >= r_j² + ε_j` for every `j`, so it avoids every
//! `W_j`. The objective lives on `H ⊕ H_1 ⊕ … ⊕ H_N`; it is evaluated blockwise
//! and never materialized.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::approximation::{build_outer, min_norm_point, OuterPolytope, DIRECTION_NORM_TOL};
use crate::error::{Error, Result};
use crate::geometry::{Body, Plank, Vector};
use crate::inradius::inradius_body;

/// Margins below `-MARGIN_TOL` invalidate a witness.
pub const MARGIN_TOL: f64 = 1e-9;

/// A witness must satisfy `|x| < 1 - NORM_TOL`.
pub const NORM_TOL: f64 = 1e-12;

/// Coordinate ascent accepts a swap only above this improvement.
pub const ASCENT_IMPROVEMENT: f64 = 1e-12;

/// Largest assignment space the exhaustive search will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

/// Required slack in `Σ (1 + δ_n) r_n < 1`.
pub const DELTA_MARGIN: f64 = 1e-9;

/// Margin used by [`bang_plank_witness`] when choosing parameters.
pub const DEFAULT_MARGIN: f64 = 0.5;

/// One body of a covering instance: its outer polytope plus inflation `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceBody {
    pub center: Vector,
    pub directions: Vec<Vector>,
    pub inradius: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl InstanceBody {
    pub fn from_outer(outer: &OuterPolytope, delta: f64) -> Self {
        Self {
            center: outer.center.clone(),
            directions: outer.directions.clone(),
            inradius: outer.inradius,
            epsilon: outer.slack,
            delta,
        }
    }

    fn scale(&self) -> f64 {
        1.0 + self.delta
    }

    fn threshold(&self) -> f64 {
        self.inradius * self.inradius + self.epsilon
    }
}

/// Outer-approximated bodies with their inflation parameters.
///
/// Construction only checks shapes (dimensions, nonempty direction sets);
/// [`CoveringInstance::validate`] checks the conditions the witness relies on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr")]
pub struct CoveringInstance {
    dimension: usize,
    bodies: Vec<InstanceBody>,
}

#[derive(Deserialize)]
struct InstanceRepr {
    dimension: usize,
    bodies: Vec<InstanceBody>,
}

impl TryFrom<InstanceRepr> for CoveringInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        CoveringInstance::new(r.dimension, r.bodies)
    }
}

impl CoveringInstance {
    pub fn new(dimension: usize, bodies: Vec<InstanceBody>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        for (n, b) in bodies.iter().enumerate() {
            b.center.check_dim(dimension)?;
            if b.directions.is_empty() {
                return Err(Error::InvalidInput(format!("body {n} has no directions")));
            }
            for v in &b.directions {
                v.check_dim(dimension)?;
            }
            let finite = [b.inradius, b.epsilon, b.delta];
            if finite.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("body {n} has non-finite parameters")));
            }
        }
        Ok(Self { dimension, bodies })
    }

    /// Outer-approximate `bodies`, choose `δ_n`, `ε_n` and assemble.
    pub fn assemble(dimension: usize, bodies: &[Body], margin: f64) -> Result<Self> {
        let radii = bodies
            .iter()
            .map(|b| {
                if b.dim() != dimension {
                    return Err(Error::DimensionMismatch {
                        expected: dimension,
                        found: b.dim(),
                    });
                }
                let unclipped = Body {
                    shape: b.shape.clone(),
                    clip_to_unit_ball: false,
                };
                Ok(inradius_body(&unclipped)?.radius)
            })
            .collect::<Result<Vec<_>>>()?;
        let params = choose_parameters(&radii, margin)?;
        let parts = bodies
            .iter()
            .zip(params.deltas.iter().zip(&params.epsilons))
            .map(|(b, (&delta, &eps))| Ok(InstanceBody::from_outer(&build_outer(b, eps)?, delta)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dimension, parts)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bodies(&self) -> &[InstanceBody] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    /// `|K| = Π |V_n|`, saturating.
    pub fn product_size(&self) -> u128 {
        self.bodies
            .iter()
            .fold(1u128, |acc, b| acc.saturating_mul(b.directions.len() as u128))
    }

    /// Check every condition the witness construction relies on.
    pub fn validate(&self) -> Result<()> {
        let n_bodies = self.bodies.len() as f64;
        let mut weighted = 0.0;
        for (n, b) in self.bodies.iter().enumerate() {
            let fail = |msg: String| Err(Error::InvalidInstance(format!("body {n}: {msg}")));
            if !(b.inradius > 0.0 && b.epsilon > 0.0 && b.delta > 0.0) {
                return fail("inradius, epsilon and delta must be positive".into());
            }
            let r2 = b.inradius * b.inradius;
            let lhs = b.scale() * (r2 - 6.0 * n_bodies * b.epsilon);
            if lhs < r2 + b.epsilon - 1e-12 * r2.max(1.0) {
                return fail(format!(
                    "(1+δ)(r² - 6Nε) = {lhs} is below r² + ε = {}",
                    r2 + b.epsilon
                ));
            }
            for v in &b.directions {
                if (v.norm() - b.inradius).abs() > DIRECTION_NORM_TOL {
                    return fail(format!("direction {v:?} is off the radius-r sphere"));
                }
            }
            if b.center.norm() > 1.0 + 1e-9 {
                return fail(format!("center {:?} lies outside the unit ball", b.center));
            }
            let hull = min_norm_point(&b.directions)?;
            if hull.distance > b.epsilon {
                return fail(format!(
                    "dist(conv V, 0) = {} exceeds epsilon {}",
                    hull.distance, b.epsilon
                ));
            }
            weighted += b.scale() * b.inradius;
        }
        if weighted > 1.0 - DELTA_MARGIN {
            return Err(Error::InvalidInstance(format!(
                "Σ (1+δ) r = {weighted} is not below 1"
            )));
        }
        Ok(())
    }
}

/// Inflations `δ_n` and slacks `ε_n` for a list of inradii.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameters {
    pub deltas: Vec<f64>,
    pub epsilons: Vec<f64>,
}

/// Uniform `δ` with `(1 + δ) Σ r = 1 - margin (1 - Σ r)` and
/// `ε_n = δ r_n² / (2 (1 + 6N(1 + δ)))`, half the largest slack that keeps
/// `(1 + δ)(r² - 6Nε) >= r² + ε`.
pub fn choose_parameters(inradii: &[f64], margin: f64) -> Result<Parameters> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidInput("margin must lie in (0, 1)".into()));
    }
    if inradii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::InvalidInput("inradii must lie in (0, 1]".into()));
    }
    if inradii.is_empty() {
        return Ok(Parameters {
            deltas: Vec::new(),
            epsilons: Vec::new(),
        });
    }
    let sum: f64 = inradii.iter().sum();
    if sum >= 1.0 {
        return Err(Error::InfeasibleSum { sum });
    }
    let n = inradii.len() as f64;
    let delta = (1.0 - margin) * (1.0 / sum - 1.0);
    if (1.0 + delta) * sum > 1.0 - DELTA_MARGIN {
        return Err(Error::InfeasibleSum { sum });
    }
    let epsilons: Vec<f64> = inradii
        .iter()
        .map(|r| 0.5 * delta * r * r / (1.0 + 6.0 * n * (1.0 + delta)))
        .collect();
    for (r, eps) in inradii.iter().zip(&epsilons) {
        let r2 = r * r;
        if (1.0 + delta) * (r2 - 6.0 * n * eps) < r2 + eps {
            return Err(Error::CertificateFailure(format!(
                "slack {eps} violates the inflation condition for r = {r}"
            )));
        }
    }
    Ok(Parameters {
        deltas: vec![delta; inradii.len()],
        epsilons,
    })
}

/// One direction index per body: an element of `K = V_1 × … × V_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    pub choices: Vec<usize>,
}

impl Assignment {
    pub fn vectors<'a>(&'a self, instance: &'a CoveringInstance) -> impl Iterator<Item = &'a Vector> {
        self.choices
            .iter()
            .zip(&instance.bodies)
            .map(|(&i, b)| &b.directions[i])
    }

    fn check(&self, instance: &CoveringInstance) -> Result<()> {
        if self.choices.len() != instance.len() {
            return Err(Error::InvalidInput(format!(
                "assignment has {} entries for {} bodies",
                self.choices.len(),
                instance.len()
            )));
        }
        for (n, (&i, b)) in self.choices.iter().zip(&instance.bodies).enumerate() {
            if i >= b.directions.len() {
                return Err(Error::InvalidInput(format!(
                    "choice {i} out of range for body {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Search strategy for [`maximize`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    #[default]
    Ascent,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "ascent" => Ok(Mode::Ascent),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Ascent => "ascent",
        })
    }
}

/// `x = Σ (1 + δ_n) g_n`, the `H` block of `f`.
fn weighted_sum(instance: &CoveringInstance, a: &Assignment) -> Vector {
    let mut x = Vector::zeros(instance.dimension);
    for (b, v) in instance.bodies.iter().zip(a.vectors(instance)) {
        x.axpy(b.scale(), v);
    }
    x
}

/// `|(1 + δ) v - o|²`, one `H_n` block of `f`.
fn block_sq(b: &InstanceBody, v: &Vector) -> f64 {
    v.scaled(b.scale()).distance(&b.center).powi(2)
}

/// `|f(g)|²` evaluated blockwise.
pub fn objective(instance: &CoveringInstance, a: &Assignment) -> f64 {
    let x = weighted_sum(instance, a);
    let blocks: f64 = instance
        .bodies
        .iter()
        .zip(a.vectors(instance))
        .map(|(b, v)| block_sq(b, v))
        .sum();
    x.norm_sq() + blocks
}

/// Value of the objective, up to terms independent of coordinate `j`, when
/// coordinate `j` takes `v` and the rest of the weighted sum is `rest`.
fn coordinate_value(b: &InstanceBody, rest: &Vector, v: &Vector) -> f64 {
    rest.add_scaled(b.scale(), v).norm_sq() + block_sq(b, v)
}

/// Best index for coordinate `j` given the rest; ties keep the earliest.
fn best_choice(b: &InstanceBody, rest: &Vector) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in b.directions.iter().enumerate() {
        let val = coordinate_value(b, rest, v);
        if val > best.1 {
            best = (i, val);
        }
    }
    best
}

/// Pick an assignment for which no single-coordinate swap increases the
/// objective by more than [`ASCENT_IMPROVEMENT`].
pub fn maximize(instance: &CoveringInstance, mode: Mode) -> Result<Assignment> {
    match mode {
        Mode::Exhaustive => exhaustive(instance),
        Mode::Ascent => Ok(ascent(instance)),
    }
}

fn exhaustive(instance: &CoveringInstance) -> Result<Assignment> {
    let size = instance.product_size();
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::ProductTooLarge { size });
    }
    let sizes: Vec<usize> = instance.bodies.iter().map(|b| b.directions.len()).collect();
    let mut current = Assignment {
        choices: vec![0; sizes.len()],
    };
    let mut best = (current.clone(), objective(instance, &current));
    // Odometer over K in lexicographic order; strict improvement keeps the
    // lowest index among ties.
    loop {
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return Ok(best.0);
            }
            pos -= 1;
            current.choices[pos] += 1;
            if current.choices[pos] < sizes[pos] {
                break;
            }
            current.choices[pos] = 0;
        }
        let val = objective(instance, &current);
        if val > best.1 {
            best = (current.clone(), val);
        }
    }
}

fn ascent(instance: &CoveringInstance) -> Assignment {
    let bodies = &instance.bodies;
    let mut sum = Vector::zeros(instance.dimension);
    let mut choices = Vec::with_capacity(bodies.len());
    // Greedy start: each coordinate maximizes the objective restricted to the
    // bodies chosen so far.
    for b in bodies {
        let (i, _) = best_choice(b, &sum);
        sum.axpy(b.scale(), &b.directions[i]);
        choices.push(i);
    }
    loop {
        let mut swapped = false;
        for (j, b) in bodies.iter().enumerate() {
            let current = &b.directions[choices[j]];
            let rest = sum.add_scaled(-b.scale(), current);
            let incumbent = coordinate_value(b, &rest, current);
            let (i, val) = best_choice(b, &rest);
            if val > incumbent + ASCENT_IMPROVEMENT {
                choices[j] = i;
                sum = rest.add_scaled(b.scale(), &b.directions[i]);
                swapped = true;
            }
        }
        if !swapped {
            return Assignment { choices };
        }
    }
}

/// Whether no single swap raises the objective by more than `tol`.
pub fn is_coordinate_maximal(instance: &CoveringInstance, a: &Assignment, tol: f64) -> bool {
    let sum = weighted_sum(instance, a);
    instance
        .bodies
        .iter()
        .zip(&a.choices)
        .all(|(b, &c)| {
            let current = &b.directions[c];
            let rest = sum.add_scaled(-b.scale(), current);
            let incumbent = coordinate_value(b, &rest, current);
            b.directions
                .iter()
                .all(|v| coordinate_value(b, &rest, v) <= incumbent + tol)
        })
}

/// The witness point with its per-body margins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witness: Vector,
    pub assignment: Assignment,
    /// `|f(x̄)|²`
    pub objective: f64,
    #[serde(rename = "norm")]
    pub norm_x: f64,
    /// `<x - o_j, x_j> - (r_j² + ε_j)`
    pub margins: Vec<f64>,
    pub valid: bool,
    /// `|y_j|` for `y_j = f(x̄) - (1 + δ_j)(x_j + U_j x_j)`
    pub aux_bounds: Vec<f64>,
}

/// Build the report for a given assignment without judging it.
pub fn evaluate(instance: &CoveringInstance, a: &Assignment) -> Result<WitnessReport> {
    a.check(instance)?;
    let x = weighted_sum(instance, a);
    let blocks: Vec<f64> = instance
        .bodies
        .iter()
        .zip(a.vectors(instance))
        .map(|(b, v)| block_sq(b, v))
        .collect();
    let block_total: f64 = blocks.iter().sum();
    let mut margins = Vec::with_capacity(instance.len());
    let mut aux_bounds = Vec::with_capacity(instance.len());
    for ((b, xj), block) in instance.bodies.iter().zip(a.vectors(instance)).zip(&blocks) {
        margins.push((&x - &b.center).dot(xj) - b.threshold());
        // Blocks of y_j: H gets x - (1+δ_j)x_j, H_j gets -o_j, H_n keeps its block.
        let y_sq = x.add_scaled(-b.scale(), xj).norm_sq() + (block_total - block)
            + b.center.norm_sq();
        aux_bounds.push(y_sq.sqrt());
    }
    let norm_x = x.norm();
    let valid = norm_x < 1.0 - NORM_TOL && margins.iter().all(|&m| m >= -MARGIN_TOL);
    Ok(WitnessReport {
        objective: x.norm_sq() + block_total,
        witness: x,
        assignment: a.clone(),
        norm_x,
        margins,
        valid,
        aux_bounds,
    })
}

/// Maximize, build the witness and insist that it is valid.
pub fn witness(instance: &CoveringInstance, mode: Mode) -> Result<WitnessReport> {
    let a = maximize(instance, mode)?;
    let report = evaluate(instance, &a)?;
    if !report.valid {
        return Err(Error::WitnessInvalid {
            norm: report.norm_x,
            margins: report.margins,
        });
    }
    Ok(report)
}

/// The intermediate inequalities behind a witness, for one body `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofStepCheck {
    pub body: usize,
    /// `min_v <y_j, (1+δ_j)(x_j + U_j x_j)> - <y_j, (1+δ_j)(v + U_j v)>`
    pub swap_slack: f64,
    /// `<y_j, (1+δ_j)(x_j + U_j x_j)>`
    pub chosen_term: f64,
    /// The same pairing averaged over `V_j` with the min-norm convex weights.
    pub averaged_term: f64,
    /// `-2 ε_j (1+δ_j) |y_j|`
    pub averaged_bound: f64,
    pub aux_norm: f64,
    /// `3N`
    pub aux_limit: f64,
}

impl ProofStepCheck {
    pub fn swap_inequality_holds(&self, tol: f64) -> bool {
        self.swap_slack >= -tol
    }

    pub fn averaged_bound_holds(&self, tol: f64) -> bool {
        self.chosen_term >= self.averaged_term - tol
            && self.averaged_term >= self.averaged_bound - tol
            && self.chosen_term >= self.averaged_bound - tol
    }

    pub fn aux_norm_holds(&self, tol: f64) -> bool {
        self.aux_norm <= self.aux_limit + tol
    }

    pub fn all_hold(&self, tol: f64) -> bool {
        self.swap_inequality_holds(tol) && self.averaged_bound_holds(tol) && self.aux_norm_holds(tol)
    }
}

/// Evaluate each intermediate inequality of the witness argument at `a`.
pub fn proof_checks(instance: &CoveringInstance, a: &Assignment) -> Result<Vec<ProofStepCheck>> {
    let report = evaluate(instance, a)?;
    let x = &report.witness;
    let limit = 3.0 * instance.len() as f64;
    instance
        .bodies
        .iter()
        .zip(a.vectors(instance))
        .enumerate()
        .map(|(j, (b, xj))| {
            // <y_j, (1+δ)(v + U_j v)> = (1+δ) <x - (1+δ) x_j - o_j, v>
            let probe = &x.add_scaled(-b.scale(), xj) - &b.center;
            let pair = |v: &Vector| b.scale() * probe.dot(v);
            let chosen = pair(xj);
            let swap_slack = b
                .directions
                .iter()
                .map(|v| chosen - pair(v))
                .fold(f64::INFINITY, f64::min);
            let hull = min_norm_point(&b.directions)?;
            let averaged = b
                .directions
                .iter()
                .zip(&hull.weights)
                .map(|(v, w)| w * pair(v))
                .sum();
            Ok(ProofStepCheck {
                body: j,
                swap_slack,
                chosen_term: chosen,
                averaged_term: averaged,
                averaged_bound: -2.0 * b.epsilon * b.scale() * report.aux_bounds[j],
                aux_norm: report.aux_bounds[j],
                aux_limit: limit,
            })
        })
        .collect()
}

/// Restrict a plank to the part that can meet the unit ball; `None` if it
/// misses the open ball.
fn trim_to_unit_ball(plank: &Plank) -> Result<Option<Plank>> {
    let s = plank.median_offset();
    let half = 0.5 * plank.width();
    let lo = (s - half).max(-1.0);
    let hi = (s + half).min(1.0);
    if hi <= lo {
        return Ok(None);
    }
    let e = plank.direction();
    Plank::new(e.scaled(0.5 * (lo + hi)), e.clone(), hi - lo).map(Some)
}

/// A point of the open unit ball outside every plank, for planks of total
/// half-width below 1.
///
/// Planks are first trimmed to their part inside `[-1, 1]` along their
/// direction (which only narrows them); planks missing the ball are dropped.
/// With `widths_check`, the witness is also re-tested against every original
/// plank.
pub fn bang_plank_witness(planks: &[Plank], widths_check: bool) -> Result<WitnessReport> {
    let Some(dim) = planks.first().map(Plank::dim) else {
        return Err(Error::InvalidInput("need at least one plank".into()));
    };
    for p in planks {
        p.base().check_dim(dim)?;
    }
    let half_sum: f64 = planks.iter().map(|p| 0.5 * p.width()).sum();
    if half_sum >= 1.0 {
        return Err(Error::InfeasibleSum { sum: half_sum });
    }
    let trimmed: Vec<Body> = planks
        .iter()
        .map(trim_to_unit_ball)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(Body::from)
        .collect();
    let instance = CoveringInstance::assemble(dim, &trimmed, DEFAULT_MARGIN)?;
    let report = if instance.is_empty() {
        evaluate(&instance, &Assignment { choices: vec![] })?
    } else {
        witness(&instance, Mode::Ascent)?
    };
    if widths_check {
        for p in planks {
            if p.excess(&report.witness) <= MARGIN_TOL {
                return Err(Error::WitnessInvalid {
                    norm: report.norm_x,
                    margins: report.margins,
                });
            }
        }
    }
    Ok(report)
}
