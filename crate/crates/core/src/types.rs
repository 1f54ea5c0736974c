//! Hermite data types: points and unit tangents in R^n, point–tangent pairs
//! and ordered sequences of pairs with open or closed topology.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{HermiteError, Result};

/// Absolute distance below which two points are treated as coincident.
pub const POINT_TOLERANCE: f64 = 1e-14;

/// Norm below which a vector is refused as a direction.
pub const NEAR_ZERO_NORM: f64 = 1e-14;

/// A point or displacement in R^n, n ≥ 2, with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(HermiteError::InvalidVector(format!(
                "dimension must be at least 2, got {}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(HermiteError::InvalidVector(format!(
                "non-finite coordinate {bad}"
            )));
        }
        Ok(Vector(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim.max(2)])
    }

    /// Builds a vector from arithmetic on already validated vectors.
    pub(crate) fn raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.len() >= 2);
        Vector(coords)
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
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    /// `(1 - w) * self + w * other`
    pub fn lerp(&self, other: &Vector, w: f64) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - w) * a + w * b)
                .collect(),
        )
    }

    pub fn midpoint(&self, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        )
    }

    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(HermiteError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = HermiteError;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

/// A direction on the unit sphere S^{n-1}.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "Vec<f64>")]
pub struct UnitVec(Vector);

impl UnitVec {
    /// Normalizes `v`; near-zero input is rejected.
    pub fn new(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > NEAR_ZERO_NORM) {
            return Err(HermiteError::NearZeroVector { norm });
        }
        Ok(UnitVec(&v * (1.0 / norm)))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(Vector::from_slice(coords)?)
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn dot(&self, other: &UnitVec) -> f64 {
        self.0.dot(&other.0)
    }

    /// Geodesic (angular) distance on the sphere, in [0, π].
    pub fn angle_to(&self, other: &UnitVec) -> f64 {
        unit_angle(&self.0, &other.0)
    }

    pub fn negated(&self) -> UnitVec {
        UnitVec(-&self.0)
    }
}

impl<'de> Deserialize<'de> for UnitVec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vector::deserialize(deserializer)?;
        UnitVec::new(v).map_err(serde::de::Error::custom)
    }
}

impl From<UnitVec> for Vec<f64> {
    fn from(u: UnitVec) -> Self {
        u.0.into_inner()
    }
}

/// Angle between two unit vectors.
///
/// `2·atan2(|a−b|, |a+b|)` keeps full relative accuracy near 0 and π, where
/// `acos` of the inner product loses about half of the significant digits.
pub(crate) fn unit_angle(a: &Vector, b: &Vector) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// A point of a curve coupled with its unit tangent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitePair {
    pub point: Vector,
    pub tangent: UnitVec,
}

impl HermitePair {
    pub fn new(point: Vector, tangent: UnitVec) -> Result<Self> {
        point.check_dim(tangent.as_vector())?;
        Ok(HermitePair { point, tangent })
    }

    /// Convenience constructor from raw coordinates; the tangent is normalized.
    pub fn from_slices(point: &[f64], tangent: &[f64]) -> Result<Self> {
        Self::new(Vector::from_slice(point)?, UnitVec::from_slice(tangent)?)
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// Same point, opposite orientation.
    pub fn reverse(&self) -> HermitePair {
        HermitePair {
            point: self.point.clone(),
            tangent: self.tangent.negated(),
        }
    }
}

/// Whether the last element of a sequence connects back to the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Open,
    Closed,
}

/// An ordered sequence of Hermite pairs: the state of a refinement level.
///
/// Invariants: at least two pairs, one common dimension, and consecutive
/// points (including the wrap-around pair of a closed sequence) distinct.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteSequence {
    pairs: Vec<HermitePair>,
    topology: Topology,
}

impl HermiteSequence {
    pub fn new(pairs: Vec<HermitePair>, topology: Topology) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(HermiteError::TooFewElements {
                min: 2,
                found: pairs.len(),
            });
        }
        let dim = pairs[0].dim();
        if let Some(bad) = pairs.iter().find(|p| p.dim() != dim) {
            return Err(HermiteError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let seq = HermiteSequence { pairs, topology };
        for (j, a, b) in seq.segments() {
            if a.point.distance(&b.point) <= POINT_TOLERANCE {
                return Err(HermiteError::CoincidentPoints { index: j });
            }
        }
        Ok(seq)
    }

    pub fn open(pairs: Vec<HermitePair>) -> Result<Self> {
        Self::new(pairs, Topology::Open)
    }

    pub fn closed(pairs: Vec<HermitePair>) -> Result<Self> {
        Self::new(pairs, Topology::Closed)
    }

    pub fn pairs(&self) -> &[HermitePair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<HermitePair> {
        self.pairs
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].dim()
    }

    /// Number of consecutive pairs: N−1 when open, N when closed.
    pub fn segment_count(&self) -> usize {
        match self.topology {
            Topology::Open => self.pairs.len() - 1,
            Topology::Closed => self.pairs.len(),
        }
    }

    /// Consecutive pairs `(j, pair_j, pair_{j+1})`, wrapping when closed.
    pub fn segments(&self) -> impl Iterator<Item = (usize, &HermitePair, &HermitePair)> + '_ {
        let n = self.pairs.len();
        (0..self.segment_count()).map(move |j| (j, &self.pairs[j], &self.pairs[(j + 1) % n]))
    }

    pub fn points(&self) -> Vec<Vector> {
        self.pairs.iter().map(|p| p.point.clone()).collect()
    }

    /// The same data, with orientation and order reversed.
    pub fn reversed(&self) -> HermiteSequence {
        HermiteSequence {
            pairs: self.pairs.iter().rev().map(HermitePair::reverse).collect(),
            topology: self.topology,
        }
    }
}
