//! The Bézier average of two point–tangent pairs.
//!
//! The pair `(p0, v0), (p1, v1)` defines the cubic with control points
//! `p0, p0 + α v0, p1 − α v1, p1`, where
//! `α = |p1 − p0| / (3 cos²((θ0 + θ1)/4))`. The average with weight `ω` is the
//! point of that cubic at `t = ω` together with its normalized derivative.
//! At `ω = ½` the average has closed forms that never produce a vanishing
//! tangent; [`midpoint_average`] uses them and is the hot path of every
//! refinement scheme in this crate.

use serde::{Deserialize, Serialize};

use crate::error::{HermiteError, Result};
use crate::geometry::{direction_status, pair_geometry, PairGeometry};
use crate::types::{HermitePair, UnitVec, Vector};

/// Smallest admissible value of the `3cos²(·)` denominator of α.
pub const ALPHA_DENOMINATOR_FLOOR: f64 = 1e-12;

/// Relative threshold under which `|b'(ω)|` counts as zero.
pub const VANISHING_TANGENT_TOLERANCE: f64 = 1e-12;

/// Which angle drives the control-arm length α.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaVariant {
    /// `α = d / (3cos²((θ0 + θ1)/4))`
    #[default]
    EndAngles,
    /// `α = d / (3cos²(θ/4))`, the choice of the 2D circle-preserving
    /// average of Lipovetsky and Dyn.
    Lv,
}

/// Control-arm length of the cubic for a pair with geometry `g` and chord
/// length `dist`.
pub fn alpha(g: &PairGeometry, dist: f64, variant: AlphaVariant) -> Result<f64> {
    let quarter = match variant {
        AlphaVariant::EndAngles => 0.25 * (g.theta0 + g.theta1),
        AlphaVariant::Lv => 0.25 * g.theta,
    };
    let denominator = 3.0 * quarter.cos().powi(2);
    if !(denominator >= ALPHA_DENOMINATOR_FLOOR) {
        return Err(HermiteError::DegenerateAngles { denominator });
    }
    Ok(dist / denominator)
}

/// A cubic Bézier segment built from a Hermite pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BezierSegment {
    #[serde(rename = "q")]
    pub control: [Vector; 4],
    pub alpha: f64,
    /// `q1 − q0`, `q2 − q1`, `q3 − q2` formed from the chord and tangents
    /// rather than from the control points, so the derivative does not pick
    /// up roundoff proportional to the distance from the origin.
    #[serde(skip)]
    legs: [Vector; 3],
    /// Rounding errors of `q1` and `q2`, carried into the compensated point
    /// evaluation.
    #[serde(skip)]
    control_err: [Vector; 2],
}

impl BezierSegment {
    /// Point and derivative at `t ∈ [0, 1]` by De Casteljau subdivision,
    /// compensated for the point. The derivative runs the plain recursion on
    /// the legs.
    pub fn eval(&self, t: f64) -> (Vector, Vector) {
        let q = &self.control;
        let dim = q[0].dim();
        let point = (0..dim)
            .map(|i| {
                let err = [
                    0.0,
                    self.control_err[0].as_slice()[i],
                    self.control_err[1].as_slice()[i],
                    0.0,
                ];
                let x = [
                    q[0].as_slice()[i],
                    q[1].as_slice()[i],
                    q[2].as_slice()[i],
                    q[3].as_slice()[i],
                ];
                compensated_de_casteljau(x, err, t)
            })
            .collect();
        let l = &self.legs;
        let derivative = &l[0].lerp(&l[1], t).lerp(&l[1].lerp(&l[2], t), t) * 3.0;
        (Vector::raw(point), derivative)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// De Casteljau with error-free transformations: the result is as accurate as
/// a run in doubled precision. Far-out control points (large α) otherwise cost
/// roundoff of order ε·α even when the curve point itself is small.
fn compensated_de_casteljau(mut x: [f64; 4], mut err: [f64; 4], t: f64) -> f64 {
    let (s, rho) = two_sum(1.0, -t);
    for n in (1..4).rev() {
        for i in 0..n {
            let (p1, e1) = two_prod(s, x[i]);
            let (p2, e2) = two_prod(t, x[i + 1]);
            let (r, e3) = two_sum(p1, p2);
            err[i] = e1 + e2 + e3 + rho * x[i] + s * err[i] + t * err[i + 1];
            x[i] = r;
        }
    }
    x[0] + err[0]
}

/// Geometry of a pair that passed the admissibility gate.
pub(crate) fn admitted_geometry(a: &HermitePair, b: &HermitePair) -> Result<PairGeometry> {
    let g = match pair_geometry(a, b) {
        Ok(g) => g,
        Err(HermiteError::CoincidentPoints { .. }) => {
            return Err(HermiteError::Inadmissible {
                index: 0,
                round: None,
                reason: "points coincide".into(),
            })
        }
        Err(e) => return Err(e),
    };
    let status = direction_status(&g);
    if !status.is_admissible() {
        return Err(HermiteError::Inadmissible {
            index: 0,
            round: None,
            reason: format!(
                "tangents and chord are collinear but not aligned (θ0 = {}, θ1 = {})",
                g.theta0, g.theta1
            ),
        });
    }
    Ok(g)
}

pub fn segment(a: &HermitePair, b: &HermitePair, variant: AlphaVariant) -> Result<BezierSegment> {
    let g = admitted_geometry(a, b)?;
    let alpha = alpha(&g, g.distance, variant)?;
    Ok(segment_with_alpha(a, b, alpha))
}

fn segment_with_alpha(a: &HermitePair, b: &HermitePair, alpha: f64) -> BezierSegment {
    let v0 = a.tangent.as_vector();
    let v1 = b.tangent.as_vector();
    let chord = &b.point - &a.point;
    let (q1, e1) = offset_with_error(&a.point, alpha, v0);
    let (q2, e2) = offset_with_error(&b.point, -alpha, v1);
    BezierSegment {
        control: [a.point.clone(), q1, q2, b.point.clone()],
        alpha,
        legs: [v0 * alpha, chord.add_scaled(-alpha, &(v0 + v1)), v1 * alpha],
        control_err: [e1, e2],
    }
}

/// `p + c·v` and the rounding error of that expression.
fn offset_with_error(p: &Vector, c: f64, v: &Vector) -> (Vector, Vector) {
    let (value, err): (Vec<f64>, Vec<f64>) = p
        .as_slice()
        .iter()
        .zip(v.as_slice())
        .map(|(&p, &v)| {
            let (m, em) = two_prod(c, v);
            let (s, es) = two_sum(p, m);
            (s, em + es)
        })
        .unzip();
    (Vector::raw(value), Vector::raw(err))
}

/// Weighted Bézier average `B_ω(a, b)`.
///
/// Fails with [`HermiteError::VanishingTangent`] when the cubic is singular at
/// `ω`, which signals that the pair lies outside the set where the average is
/// defined for this weight.
pub fn average(
    a: &HermitePair,
    b: &HermitePair,
    w: f64,
    variant: AlphaVariant,
) -> Result<HermitePair> {
    if !(0.0..=1.0).contains(&w) {
        return Err(HermiteError::OutOfRange {
            value: w,
            min: 0.0,
            max: 1.0,
        });
    }
    let g = admitted_geometry(a, b)?;
    if w == 0.0 {
        return Ok(a.clone());
    }
    if w == 1.0 {
        return Ok(b.clone());
    }
    let seg = segment_with_alpha(a, b, alpha(&g, g.distance, variant)?);
    let (point, derivative) = seg.eval(w);
    let norm = derivative.norm();
    if norm < VANISHING_TANGENT_TOLERANCE * (1.0 + g.distance) {
        return Err(HermiteError::VanishingTangent { weight: w });
    }
    Ok(HermitePair {
        point,
        tangent: UnitVec::new(derivative)?,
    })
}

/// `B_½(a, b)` from its closed forms:
/// `p = (p0 + p1)/2 + (3/8)α(v0 − v1)` and
/// `v ∝ p1 − p0 − (α/2)(v0 + v1)`.
///
/// Exactly equal operands average to themselves; refinement schemes that
/// double their input rely on this.
pub fn midpoint_average(
    a: &HermitePair,
    b: &HermitePair,
    variant: AlphaVariant,
) -> Result<HermitePair> {
    if a == b {
        return Ok(a.clone());
    }
    let g = admitted_geometry(a, b)?;
    let alpha = alpha(&g, g.distance, variant)?;
    Ok(midpoint_with_alpha(a, b, alpha))
}

pub(crate) fn midpoint_with_alpha(a: &HermitePair, b: &HermitePair, alpha: f64) -> HermitePair {
    let p0 = a.point.as_slice();
    let p1 = b.point.as_slice();
    let v0 = a.tangent.as_slice();
    let v1 = b.tangent.as_slice();
    let dim = p0.len();
    let mut point = Vec::with_capacity(dim);
    let mut direction = Vec::with_capacity(dim);
    for i in 0..dim {
        point.push(0.5 * (p0[i] + p1[i]) + 0.375 * alpha * (v0[i] - v1[i]));
        direction.push(p1[i] - p0[i] - 0.5 * alpha * (v0[i] + v1[i]));
    }
    let tangent = UnitVec::new(Vector::raw(direction))
        .expect("midpoint derivative of an admissible pair never vanishes");
    HermitePair {
        point: Vector::raw(point),
        tangent,
    }
}

/// Same point, tangent negated.
pub fn reverse(a: &HermitePair) -> HermitePair {
    a.reverse()
}
