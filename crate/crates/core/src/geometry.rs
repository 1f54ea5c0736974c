//! Derived quantities of an ordered pair of Hermite samples and the
//! admissibility verdicts built on them.

use serde::{Deserialize, Serialize};

use crate::error::{HermiteError, Result};
use crate::types::{unit_angle, HermitePair, HermiteSequence, UnitVec, POINT_TOLERANCE};

/// Angular tolerance under which two directions count as linearly dependent.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-10;

/// Gram-determinant threshold for `{v0, v1, u}` spanning at most a plane.
pub const PLANAR_GRAM_TOLERANCE: f64 = 1e-10;

/// Two roots of the planar degeneracy system closer than this are the same.
pub const ROOT_MATCH_TOLERANCE: f64 = 1e-9;

/// Geometry of an ordered pair `(p0, v0), (p1, v1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    /// Unit chord direction `(p1 − p0)/|p1 − p0|`.
    pub u: UnitVec,
    /// Angle between the two tangents.
    pub theta: f64,
    /// Deviation of `v0` from the chord.
    pub theta0: f64,
    /// Deviation of `v1` from the chord.
    pub theta1: f64,
    /// `sqrt(theta0² + theta1²)`: how far the pair is from line samples.
    pub sigma: f64,
    /// `|p1 − p0|`
    pub distance: f64,
}

pub fn pair_geometry(a: &HermitePair, b: &HermitePair) -> Result<PairGeometry> {
    if a.dim() != b.dim() {
        return Err(HermiteError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let chord = &b.point - &a.point;
    let distance = chord.norm();
    if distance <= POINT_TOLERANCE {
        return Err(HermiteError::CoincidentPoints { index: 0 });
    }
    let u = UnitVec::new(chord)?;
    let v0 = a.tangent.as_vector();
    let v1 = b.tangent.as_vector();
    let theta = unit_angle(v0, v1);
    let theta0 = unit_angle(v0, u.as_vector());
    let theta1 = unit_angle(v1, u.as_vector());
    Ok(PairGeometry {
        u,
        theta,
        theta0,
        theta1,
        sigma: theta0.hypot(theta1),
        distance,
    })
}

/// How the directions `{v0, v1, u}` of a pair relate to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionStatus {
    /// `v0 = v1 = u`: samples of a straight line.
    Aligned,
    /// No two of the three directions are parallel.
    PairwiseIndependent,
    /// Exactly one pair is parallel and the third direction is independent of
    /// both. The cubic stays regular on (0, 1) in this case.
    PartiallyDependent,
    /// All three are parallel but not all equal; the cubic folds back.
    Degenerate,
}

impl DirectionStatus {
    pub fn is_admissible(self) -> bool {
        self != DirectionStatus::Degenerate
    }
}

pub fn direction_status(g: &PairGeometry) -> DirectionStatus {
    if g.theta0 <= DEPENDENCE_TOLERANCE && g.theta1 <= DEPENDENCE_TOLERANCE {
        return DirectionStatus::Aligned;
    }
    let parallel = |angle: f64| {
        angle <= DEPENDENCE_TOLERANCE || angle >= std::f64::consts::PI - DEPENDENCE_TOLERANCE
    };
    let angles = [g.theta, g.theta0, g.theta1];
    let dependent = angles.into_iter().filter(|&a| parallel(a)).count();
    let reversed = angles
        .into_iter()
        .any(|a| a >= std::f64::consts::PI - DEPENDENCE_TOLERANCE);
    match dependent {
        0 => DirectionStatus::PairwiseIndependent,
        1 => DirectionStatus::PartiallyDependent,
        // two small angles force the third to be small too: a nearly straight
        // pair whose angles straddle the tolerance
        _ if !reversed => DirectionStatus::Aligned,
        _ => DirectionStatus::Degenerate,
    }
}

/// Admissibility verdicts for a pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub points_distinct: bool,
    pub direction_status: DirectionStatus,
    /// Sufficient condition for a regular cubic: all angles between
    /// consecutive control-polygon legs are acute.
    pub acute_sufficient: bool,
    /// Parameters in [0, 1] where the derivative of the cubic vanishes, when
    /// the control points are coplanar; empty otherwise.
    pub planar_degeneracy_roots: Vec<f64>,
}

impl AdmissibilityReport {
    /// Gate used before averaging: distinct points and non-degenerate
    /// directions.
    pub fn is_admissible(&self) -> bool {
        self.points_distinct && self.direction_status.is_admissible()
    }

    pub fn reason(&self) -> String {
        if !self.points_distinct {
            "points coincide".to_string()
        } else {
            format!("directions are {:?}", self.direction_status)
        }
    }
}

pub fn check_admissible(a: &HermitePair, b: &HermitePair) -> Result<AdmissibilityReport> {
    if a.dim() != b.dim() {
        return Err(HermiteError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let g = match pair_geometry(a, b) {
        Ok(g) => g,
        Err(HermiteError::CoincidentPoints { .. }) => {
            return Ok(AdmissibilityReport {
                points_distinct: false,
                direction_status: DirectionStatus::Degenerate,
                acute_sufficient: false,
                planar_degeneracy_roots: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let direction_status = direction_status(&g);
    let c = (0.25 * (g.theta0 + g.theta1)).cos().powi(2);
    let leg = |theta_j: f64| 3.0 * c * theta_j.cos() - 1.0 - g.theta.cos();
    let acute_sufficient =
        g.theta < std::f64::consts::FRAC_PI_2 && leg(g.theta0) > 0.0 && leg(g.theta1) > 0.0;
    let planar_degeneracy_roots = if is_planar(a, b, &g) {
        planar_roots(a, b, &g, c)
    } else {
        Vec::new()
    };
    Ok(AdmissibilityReport {
        points_distinct: true,
        direction_status,
        acute_sufficient,
        planar_degeneracy_roots,
    })
}

fn is_planar(a: &HermitePair, b: &HermitePair, g: &PairGeometry) -> bool {
    let c01 = a.tangent.dot(&b.tangent);
    let c0u = a.tangent.dot(&g.u);
    let c1u = b.tangent.dot(&g.u);
    let gram = 1.0 + 2.0 * c01 * c0u * c1u - c01 * c01 - c0u * c0u - c1u * c1u;
    gram <= PLANAR_GRAM_TOLERANCE
}

/// Solves the degeneracy system of the planar case: with `p0 = 0`,
/// `p1 = e1`, `v0 = (cos x, sin x)` and `v1 = (cos y, sin y)` the derivative of
/// the cubic vanishes iff both quadratics below share a root in [0, 1].
fn planar_roots(a: &HermitePair, b: &HermitePair, g: &PairGeometry, c: f64) -> Vec<f64> {
    let u = g.u.as_vector();
    let v0 = a.tangent.as_vector();
    let v1 = b.tangent.as_vector();
    let normal_part = |v: &crate::types::Vector| v.add_scaled(-v.dot(u), u);
    let mut e2 = normal_part(v0);
    if e2.norm() < DEPENDENCE_TOLERANCE {
        e2 = normal_part(v1);
    }
    let n2 = e2.norm();
    let (sx, sy) = if n2 < DEPENDENCE_TOLERANCE {
        (0.0, 0.0)
    } else {
        (v0.dot(&e2) / n2, v1.dot(&e2) / n2)
    };
    let (cx, cy) = (v0.dot(u), v1.dot(u));

    // 6t(1−t)c + (3t−1)(t−1)cos x + t(3t−2)cos y
    let eq1 = [
        cx,
        6.0 * c - 4.0 * cx - 2.0 * cy,
        -6.0 * c + 3.0 * cx + 3.0 * cy,
    ];
    // (3t−1)(t−1)sin x + t(3t−2)sin y
    let eq2 = [sx, -4.0 * sx - 2.0 * sy, 3.0 * (sx + sy)];

    match (unit_interval_roots(eq1), unit_interval_roots(eq2)) {
        (QuadraticRoots::All, QuadraticRoots::All) => vec![0.0],
        (QuadraticRoots::All, QuadraticRoots::Some(r))
        | (QuadraticRoots::Some(r), QuadraticRoots::All) => r,
        (QuadraticRoots::Some(r1), QuadraticRoots::Some(r2)) => r1
            .into_iter()
            .filter(|t| r2.iter().any(|s| (t - s).abs() <= ROOT_MATCH_TOLERANCE))
            .collect(),
    }
}

enum QuadraticRoots {
    /// The polynomial vanishes identically.
    All,
    Some(Vec<f64>),
}

/// Roots in [0, 1] of `k[0] + k[1] t + k[2] t²`.
fn unit_interval_roots(k: [f64; 3]) -> QuadraticRoots {
    const NEGLIGIBLE: f64 = 1e-12;
    let scale = k.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale <= NEGLIGIBLE {
        return QuadraticRoots::All;
    }
    let [c0, c1, c2] = k.map(|x| x / scale);
    let mut roots = Vec::new();
    if c2.abs() <= NEGLIGIBLE {
        if c1.abs() > NEGLIGIBLE {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= -NEGLIGIBLE {
            let sq = disc.max(0.0).sqrt();
            // q = −(c1 + sign(c1)·sqrt(disc))/2 avoids cancellation
            let q = -0.5 * (c1 + c1.signum() * sq);
            if q != 0.0 {
                roots.push(q / c2);
                roots.push(c0 / q);
            } else {
                roots.push(0.0);
            }
        }
    }
    let mut inside: Vec<f64> = roots
        .into_iter()
        .filter(|t| (-ROOT_MATCH_TOLERANCE..=1.0 + ROOT_MATCH_TOLERANCE).contains(t))
        .map(|t| t.clamp(0.0, 1.0))
        .collect();
    inside.sort_by(f64::total_cmp);
    inside.dedup_by(|a, b| (*a - *b).abs() <= ROOT_MATCH_TOLERANCE);
    QuadraticRoots::Some(inside)
}

/// Supremum of σ over consecutive pairs (wrapping when closed).
pub fn sigma_sup(s: &HermiteSequence) -> Result<f64> {
    let mut sup = 0.0_f64;
    for (j, a, b) in s.segments() {
        let g = pair_geometry(a, b).map_err(|e| e.at(j))?;
        sup = sup.max(g.sigma);
    }
    Ok(sup)
}

/// Largest distance between consecutive points.
pub fn max_gap(s: &HermiteSequence) -> f64 {
    s.segments()
        .map(|(_, a, b)| a.point.distance(&b.point))
        .fold(0.0, f64::max)
}
