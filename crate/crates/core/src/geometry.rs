//! Vectors and convex bodies in R^d.
//!
//! Bodies come in three shapes: H-represented polytopes, Euclidean balls and
//! planks (slabs between two parallel hyperplanes). Any of them may carry a
//! `clip_to_unit_ball` flag, in which case the body is intersected with the
//! closed unit ball centered at the origin.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};

/// Default tolerance for geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance on `|direction| = 1` for planks.
pub const UNIT_TOL: f64 = 1e-12;

/// A point or direction in R^d.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Checked constructor: `d >= 1` and all coordinates finite.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("vector must have dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("vector coordinates must be finite".into()));
        }
        Ok(Self(coords))
    }

    /// Unchecked constructor for coordinates known to be finite.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `k`-th standard basis vector scaled by `scale`.
    pub fn axis(dim: usize, k: usize, scale: f64) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = scale;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Vector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    /// Unchecked convenience conversion for literals.
    fn from(coords: [f64; N]) -> Self {
        Vector(coords.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.add_scaled(-1.0, rhs)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, rhs: f64) -> Vector {
        self.scaled(rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scaled(-1.0)
    }
}

/// Closed halfspace `{h : <h, normal> <= offset}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    normal: Vector,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        if !(normal.norm() > 0.0) {
            return Err(Error::InvalidInput("halfspace normal must be nonzero".into()));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidInput("halfspace offset must be finite".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// `<p, normal> - offset`; nonpositive inside.
    pub fn excess(&self, p: &Vector) -> f64 {
        p.dot(&self.normal) - self.offset
    }

    /// The same halfspace moved inward by Euclidean distance `by`.
    pub fn shrunk(&self, by: f64) -> Halfspace {
        Halfspace {
            normal: self.normal.clone(),
            offset: self.offset - by * self.normal.norm(),
        }
    }
}

/// Intersection of finitely many closed halfspaces. The empty list is the
/// whole space.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        for h in &halfspaces {
            h.normal.check_dim(dim)?;
        }
        Ok(Self { dim, halfspaces })
    }

    /// Build from parallel lists of normals and offsets.
    pub fn from_constraints(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::InvalidInput(format!(
                "{} normals but {} offsets",
                normals.len(),
                offsets.len()
            )));
        }
        let dim = normals
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("polytope needs at least one halfspace".into()))?;
        let halfspaces = normals
            .into_iter()
            .zip(offsets)
            .map(|(n, a)| Halfspace::new(Vector::new(n)?, a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, halfspaces)
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
        }
    }

    /// Axis-aligned box `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            halfspaces.push(Halfspace {
                normal: Vector::axis(dim, k, 1.0),
                offset: hi,
            });
            halfspaces.push(Halfspace {
                normal: Vector::axis(dim, k, -1.0),
                offset: -lo,
            });
        }
        Self { dim, halfspaces }
    }

    /// Convex polygon from counterclockwise vertices.
    pub fn from_ccw_polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput("polygon needs at least 3 vertices".into()));
        }
        let halfspaces = (0..vertices.len())
            .map(|i| {
                let [x0, y0] = vertices[i];
                let [x1, y1] = vertices[(i + 1) % vertices.len()];
                let normal = Vector::from([y1 - y0, x0 - x1]);
                let offset = normal[0] * x0 + normal[1] * y0;
                Halfspace::new(normal, offset)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(2, halfspaces)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn with_halfspace(&self, h: Halfspace) -> Result<Polytope> {
        h.normal.check_dim(self.dim)?;
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.push(h);
        Ok(Polytope {
            dim: self.dim,
            halfspaces,
        })
    }

    /// Largest constraint violation at `p` (nonpositive inside).
    pub fn excess(&self, p: &Vector) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.excess(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Each halfspace moved inward by `by`.
    pub fn shrunk(&self, by: f64) -> Polytope {
        Polytope {
            dim: self.dim,
            halfspaces: self.halfspaces.iter().map(|h| h.shrunk(by)).collect(),
        }
    }

    /// Whether the recession cone `{y : <y, w_i> <= 0}` is trivial.
    pub fn is_bounded(&self) -> bool {
        let rows: Vec<Vec<f64>> = self
            .halfspaces
            .iter()
            .map(|h| h.normal.as_slice().to_vec())
            .collect();
        let zeros = vec![0.0; rows.len()];
        for k in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; self.dim];
                c[k] = sign;
                // Bound the cone direction so the LP stays bounded; any positive
                // optimum means a nonzero recession direction.
                let mut a = rows.clone();
                let mut b = zeros.clone();
                for j in 0..self.dim {
                    let mut e = vec![0.0; self.dim];
                    e[j] = 1.0;
                    a.push(e.clone());
                    b.push(1.0);
                    e[j] = -1.0;
                    a.push(e);
                    b.push(1.0);
                }
                match lp::maximize_free(&c, &a, &b) {
                    LpOutcome::Optimal { value, .. } if value <= 1e-9 => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// `sup <h, u>` over the polytope via LP.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        u.check_dim(self.dim)?;
        let (a, b) = self.rows();
        match lp::maximize_free(u.as_slice(), &a, &b) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Unbounded => Err(Error::UnboundedSupport),
            LpOutcome::Infeasible => Err(Error::EmptyInterior),
            LpOutcome::IterationLimit => Err(Error::NoConvergence {
                what: "simplex",
                iterations: lp::MAX_PIVOTS,
            }),
        }
    }

    pub(crate) fn rows(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        self.halfspaces
            .iter()
            .map(|h| (h.normal.as_slice().to_vec(), h.offset))
            .unzip()
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct BallBody {
    center: Vector,
    radius: f64,
}

impl BallBody {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput("ball radius must be positive".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn excess(&self, p: &Vector) -> f64 {
        p.distance(&self.center) - self.radius
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.center.dot(u) + self.radius * u.norm()
    }
}

/// Plank `{h : |<h - base, direction>| <= width / 2}` with a unit direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Plank {
    base: Vector,
    direction: Vector,
    width: f64,
}

impl Plank {
    pub fn new(base: Vector, direction: Vector, width: f64) -> Result<Self> {
        direction.check_dim(base.dim())?;
        if ((direction.norm() - 1.0).abs()) > UNIT_TOL {
            return Err(Error::InvalidInput("plank direction must be a unit vector".into()));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput("plank width must be positive".into()));
        }
        Ok(Self {
            base,
            direction,
            width,
        })
    }

    /// Like [`Plank::new`] but normalizes `direction` first.
    pub fn with_direction(base: Vector, direction: &Vector, width: f64) -> Result<Self> {
        let unit = direction
            .normalized()
            .ok_or_else(|| Error::InvalidInput("plank direction must be nonzero".into()))?;
        Self::new(base, unit, width)
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn direction(&self) -> &Vector {
        &self.direction
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Signed position of the median hyperplane along `direction`.
    pub fn median_offset(&self) -> f64 {
        self.base.dot(&self.direction)
    }

    /// The point of the median hyperplane closest to the origin.
    pub fn median_center(&self) -> Vector {
        self.direction.scaled(self.median_offset())
    }

    pub fn excess(&self, p: &Vector) -> f64 {
        (p.dot(&self.direction) - self.median_offset()).abs() - 0.5 * self.width
    }

    /// The plank as two halfspaces.
    pub fn to_polytope(&self) -> Polytope {
        let s = self.median_offset();
        let half = 0.5 * self.width;
        Polytope {
            dim: self.dim(),
            halfspaces: vec![
                Halfspace {
                    normal: self.direction.clone(),
                    offset: s + half,
                },
                Halfspace {
                    normal: -&self.direction,
                    offset: -s + half,
                },
            ],
        }
    }

    pub fn support(&self, u: &Vector) -> Result<f64> {
        let along = u.dot(&self.direction);
        let across = u.add_scaled(-along, &self.direction);
        if across.norm() > UNIT_TOL * u.norm().max(1.0) {
            return Err(Error::UnboundedSupport);
        }
        Ok(along * self.median_offset() + 0.5 * self.width * along.abs())
    }
}

/// The geometric payload of a [`Body`].
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Polytope(Polytope),
    Ball(BallBody),
    Plank(Plank),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Polytope(p) => p.dim(),
            Shape::Ball(b) => b.dim(),
            Shape::Plank(p) => p.dim(),
        }
    }

    pub fn excess(&self, p: &Vector) -> f64 {
        match self {
            Shape::Polytope(poly) => poly.excess(p),
            Shape::Ball(b) => b.excess(p),
            Shape::Plank(pl) => pl.excess(p),
        }
    }

    pub fn support(&self, u: &Vector) -> Result<f64> {
        match self {
            Shape::Polytope(p) => p.support(u),
            Shape::Ball(b) => Ok(b.support(u)),
            Shape::Plank(p) => p.support(u),
        }
    }
}

/// A convex body, optionally intersected with the unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyRepr", into = "BodyRepr")]
pub struct Body {
    pub shape: Shape,
    pub clip_to_unit_ball: bool,
}

impl Body {
    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn clipped(mut self) -> Self {
        self.clip_to_unit_ball = true;
        self
    }

    /// Largest signed violation of the defining inequalities at `p`.
    pub fn excess(&self, p: &Vector) -> Result<f64> {
        p.check_dim(self.dim())?;
        let mut e = self.shape.excess(p);
        if self.clip_to_unit_ball {
            e = e.max(p.norm() - 1.0);
        }
        Ok(e)
    }

    /// Whether `p` satisfies every defining inequality within `tol`.
    pub fn contains(&self, p: &Vector, tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
        }
        Ok(self.excess(p)? <= tol)
    }

    /// `sup_{h in body} <h, u>`.
    pub fn support_value(&self, u: &Vector) -> Result<f64> {
        u.check_dim(self.dim())?;
        if !(u.norm() > 0.0) {
            return Err(Error::InvalidInput("support direction must be nonzero".into()));
        }
        if self.clip_to_unit_ball {
            crate::inradius::clipped_support(&self.shape, u)
        } else {
            self.shape.support(u)
        }
    }
}

impl From<Polytope> for Body {
    fn from(p: Polytope) -> Self {
        Body {
            shape: Shape::Polytope(p),
            clip_to_unit_ball: false,
        }
    }
}

impl From<BallBody> for Body {
    fn from(b: BallBody) -> Self {
        Body {
            shape: Shape::Ball(b),
            clip_to_unit_ball: false,
        }
    }
}

impl From<Plank> for Body {
    fn from(p: Plank) -> Self {
        Body {
            shape: Shape::Plank(p),
            clip_to_unit_ball: false,
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Wire form of [`Body`].
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum BodyRepr {
    Polytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dimension: Option<usize>,
        #[serde(default, skip_serializing_if = "is_false")]
        clip_to_unit_ball: bool,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        clip_to_unit_ball: bool,
    },
    Plank {
        base: Vec<f64>,
        direction: Vec<f64>,
        width: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        clip_to_unit_ball: bool,
    },
}

impl TryFrom<BodyRepr> for Body {
    type Error = Error;

    fn try_from(repr: BodyRepr) -> Result<Self> {
        let (shape, clip) = match repr {
            BodyRepr::Polytope {
                normals,
                offsets,
                dimension,
                clip_to_unit_ball,
            } => {
                let poly = match (normals.is_empty(), dimension) {
                    (true, Some(d)) if offsets.is_empty() => Polytope::new(d, Vec::new())?,
                    (_, d) => {
                        let p = Polytope::from_constraints(normals, offsets)?;
                        if let Some(d) = d {
                            if d != p.dim() {
                                return Err(Error::DimensionMismatch {
                                    expected: d,
                                    found: p.dim(),
                                });
                            }
                        }
                        p
                    }
                };
                (Shape::Polytope(poly), clip_to_unit_ball)
            }
            BodyRepr::Ball {
                center,
                radius,
                clip_to_unit_ball,
            } => (
                Shape::Ball(BallBody::new(Vector::new(center)?, radius)?),
                clip_to_unit_ball,
            ),
            BodyRepr::Plank {
                base,
                direction,
                width,
                clip_to_unit_ball,
            } => (
                Shape::Plank(Plank::new(
                    Vector::new(base)?,
                    Vector::new(direction)?,
                    width,
                )?),
                clip_to_unit_ball,
            ),
        };
        Ok(Body {
            shape,
            clip_to_unit_ball: clip,
        })
    }
}

impl From<Body> for BodyRepr {
    fn from(body: Body) -> Self {
        let clip_to_unit_ball = body.clip_to_unit_ball;
        match body.shape {
            Shape::Polytope(p) => {
                let dimension = p.halfspaces.is_empty().then_some(p.dim);
                let (normals, offsets) = p.rows();
                BodyRepr::Polytope {
                    normals,
                    offsets,
                    dimension,
                    clip_to_unit_ball,
                }
            }
            Shape::Ball(b) => BodyRepr::Ball {
                center: b.center.into_inner(),
                radius: b.radius,
                clip_to_unit_ball,
            },
            Shape::Plank(p) => BodyRepr::Plank {
                base: p.base.into_inner(),
                direction: p.direction.into_inner(),
                width: p.width,
                clip_to_unit_ball,
            },
        }
    }
}
