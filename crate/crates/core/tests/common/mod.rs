//! Independent reference computations for the integration tests. Nothing
//! here calls into the averaging or angle code of the crate: angles use acos
//! of clamped dot products and Bézier curves use the Bernstein form.

#![allow(dead_code)]

use hermite_core::{HermitePair, SimilarityTransform};
use rand::Rng;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn acos_angle(a: &[f64], b: &[f64]) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn pair(p: &[f64], v: &[f64]) -> HermitePair {
    HermitePair::from_slices(p, v).unwrap()
}

/// `(θ0, θ1, θ)` of an ordered pair.
pub fn oracle_angles(a: &HermitePair, b: &HermitePair) -> (f64, f64, f64) {
    let chord = sub(b.point.as_slice(), a.point.as_slice());
    (
        acos_angle(a.tangent.as_slice(), &chord),
        acos_angle(b.tangent.as_slice(), &chord),
        acos_angle(a.tangent.as_slice(), b.tangent.as_slice()),
    )
}

/// Places a pair with the given angles: `p0 = 0`, `p1 = d·e1`,
/// `v0 = (cos θ0, sin θ0, 0)` and `v1` on the cone of half-angle `θ1` about
/// `e1` at angle `θ` from `v0`. `None` when the triple is not realizable.
pub fn cone_pair(
    theta0: f64,
    theta1: f64,
    theta: f64,
    d: f64,
) -> Option<(HermitePair, HermitePair)> {
    let (s0, c0) = theta0.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    let cos_phi = if s0 * s1 == 0.0 {
        1.0
    } else {
        (theta.cos() - c0 * c1) / (s0 * s1)
    };
    if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&cos_phi) {
        return None;
    }
    let cos_phi = cos_phi.clamp(-1.0, 1.0);
    let sin_phi = (1.0 - cos_phi * cos_phi).sqrt();
    Some((
        pair(&[0.0, 0.0, 0.0], &[c0, s0, 0.0]),
        pair(&[d, 0.0, 0.0], &[c1, s1 * cos_phi, s1 * sin_phi]),
    ))
}

/// Planar placement: `sign = -1` turns the second tangent to the other side
/// of the chord (θ = θ0 + θ1), `sign = 1` to the same side (θ = |θ0 − θ1|).
pub fn planar_pair(theta0: f64, theta1: f64, sign: f64, d: f64) -> (HermitePair, HermitePair) {
    let (s0, c0) = theta0.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    (
        pair(&[0.0, 0.0], &[c0, s0]),
        pair(&[d, 0.0], &[c1, sign * s1]),
    )
}

/// Lifts a 3D pair into `dim ≥ 3` dimensions and moves it by a random
/// similarity.
pub fn embed<R: Rng + ?Sized>(
    (a, b): (HermitePair, HermitePair),
    dim: usize,
    rng: &mut R,
) -> (HermitePair, HermitePair) {
    let lift = |x: &[f64]| {
        let mut y = x.to_vec();
        y.resize(dim, 0.0);
        y
    };
    let t = SimilarityTransform::random(dim, rng);
    let map = |h: &HermitePair| {
        let p = hermite_core::Vector::new(lift(h.point.as_slice())).unwrap();
        let v = hermite_core::UnitVec::from_slice(&lift(h.tangent.as_slice())).unwrap();
        HermitePair {
            point: t.apply_point(&p),
            tangent: t.apply_direction(&v),
        }
    };
    (map(&a), map(&b))
}

/// Random realizable angle triple with `θ0, θ1 ∈ (0, π)` and the given
/// constraint on `(θ0, θ1)`, placed in dimension 2, 3 or 5.
pub fn random_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    accept: impl Fn(f64, f64) -> bool,
) -> (HermitePair, HermitePair) {
    let dims = [2, 3, 5];
    let dim = dims[rng.random_range(0..dims.len())];
    loop {
        let theta0 = rng.random_range(1e-6..std::f64::consts::PI - 1e-6);
        let theta1 = rng.random_range(1e-6..std::f64::consts::PI - 1e-6);
        if !accept(theta0, theta1) {
            continue;
        }
        let d = 10f64.powf(rng.random_range(-2.0..2.0));
        if dim == 2 {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            if sign < 0.0 && theta0 + theta1 >= std::f64::consts::PI {
                continue;
            }
            let (a, b) = planar_pair(theta0, theta1, sign, d);
            let t = SimilarityTransform::random(2, rng);
            let map = |h: &HermitePair| HermitePair {
                point: t.apply_point(&h.point),
                tangent: t.apply_direction(&h.tangent),
            };
            return (map(&a), map(&b));
        }
        let lo = (theta0 - theta1).abs();
        let hi = (theta0 + theta1).min(2.0 * std::f64::consts::PI - theta0 - theta1);
        let theta = rng.random_range(lo..=hi);
        if let Some(p) = cone_pair(theta0, theta1, theta, d) {
            return embed(p, dim, rng);
        }
    }
}

/// Random points and uniformly random directions, kept when the pair is
/// admissible.
pub fn random_admissible<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (HermitePair, HermitePair) {
    loop {
        let mut gauss = || -> Vec<f64> { (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let (p0, p1, v0, v1) = (gauss(), gauss(), gauss(), gauss());
        if norm(&v0) < 1e-3 || norm(&v1) < 1e-3 || norm(&sub(&p1, &p0)) < 1e-3 {
            continue;
        }
        let (a, b) = (pair(&p0, &v0), pair(&p1, &v1));
        if hermite_core::check_admissible(&a, &b)
            .unwrap()
            .is_admissible()
        {
            return (a, b);
        }
    }
}

/// `α = d / (3 cos²((θ0 + θ1)/4))` from acos angles.
pub fn oracle_alpha(a: &HermitePair, b: &HermitePair) -> f64 {
    let (t0, t1, _) = oracle_angles(a, b);
    let d = norm(&sub(b.point.as_slice(), a.point.as_slice()));
    d / (3.0 * (0.25 * (t0 + t1)).cos().powi(2))
}

pub fn oracle_control(a: &HermitePair, b: &HermitePair) -> [Vec<f64>; 4] {
    let alpha = oracle_alpha(a, b);
    let p0 = a.point.as_slice();
    let p1 = b.point.as_slice();
    let v0 = a.tangent.as_slice();
    let v1 = b.tangent.as_slice();
    [
        p0.to_vec(),
        p0.iter().zip(v0).map(|(p, v)| p + alpha * v).collect(),
        p1.iter().zip(v1).map(|(p, v)| p - alpha * v).collect(),
        p1.to_vec(),
    ]
}

/// Bernstein-form value and derivative of a cubic.
pub fn bernstein(q: &[Vec<f64>; 4], t: f64) -> (Vec<f64>, Vec<f64>) {
    let s = 1.0 - t;
    let w = [s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t];
    let dw = [s * s, 2.0 * s * t, t * t];
    let dim = q[0].len();
    let mut p = vec![0.0; dim];
    let mut dp = vec![0.0; dim];
    for i in 0..dim {
        for k in 0..4 {
            p[i] += w[k] * q[k][i];
        }
        for k in 0..3 {
            dp[i] += 3.0 * dw[k] * (q[k + 1][i] - q[k][i]);
        }
    }
    (p, dp)
}

/// Bézier average from the Bernstein form: point and unit tangent.
pub fn oracle_average(a: &HermitePair, b: &HermitePair, w: f64) -> (Vec<f64>, Vec<f64>) {
    let (p, dp) = bernstein(&oracle_control(a, b), w);
    (p, normalized(&dp))
}

pub fn oracle_sigma(a: &HermitePair, b: &HermitePair) -> f64 {
    let (t0, t1, _) = oracle_angles(a, b);
    t0.hypot(t1)
}

/// Samples of a random quadratic curve with a dominant linear part, so
/// consecutive pairs stay well inside the admissible set.
pub fn random_smooth_sequence<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
) -> hermite_core::HermiteSequence {
    loop {
        let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.15..0.15)).collect();
        if norm(&a) < 0.3 {
            continue;
        }
        let pairs = (0..n)
            .map(|k| {
                let t = k as f64 + rng.random_range(-0.3..0.3);
                let p: Vec<f64> = (0..dim).map(|i| a[i] * t + b[i] * t * t).collect();
                let v: Vec<f64> = (0..dim).map(|i| a[i] + 2.0 * b[i] * t).collect();
                HermitePair::from_slices(&p, &v)
            })
            .collect::<Result<Vec<_>, _>>();
        if let Ok(s) = pairs.and_then(hermite_core::HermiteSequence::open) {
            return s;
        }
    }
}

/// Samples of a circle of the given radius at increasing angles, closed when
/// they go all the way round.
pub fn circle_sequence(
    radius: f64,
    angles: &[f64],
    topology: hermite_core::Topology,
) -> hermite_core::HermiteSequence {
    let pairs = angles
        .iter()
        .map(|t| {
            let (s, c) = t.sin_cos();
            pair(&[radius * c, radius * s], &[-s, c])
        })
        .collect();
    hermite_core::HermiteSequence::new(pairs, topology).unwrap()
}
