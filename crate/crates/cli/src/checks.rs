//! The reconstruct-check suite: exact reproduction of lines and circles and
//! commutation with similarities.

use std::f64::consts::FRAC_PI_2;

use hermite_core::{
    refine, HermitePair, HermiteSequence, RefineConfig, Scheme, SimilarityTransform, Topology,
    UnitVec, Vector,
};
use rand::Rng;

use crate::{equivariance_defect, random_smooth_data};

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn run_all<R: Rng + ?Sized>(trials: usize, rng: &mut R) -> Vec<CheckResult> {
    vec![
        line_check("line-ihb", Scheme::Ihb),
        line_check("line-hb-lr3", Scheme::HbLr(3)),
        circle_check(),
        circle_sigma_check(),
        similarity_check(trials, rng),
    ]
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> CheckResult {
    CheckResult {
        name,
        passed: false,
        detail: format!("error: {e}"),
    }
}

/// Five samples of a line in general position.
pub fn line_samples() -> (HermiteSequence, Vector, UnitVec) {
    let origin = Vector::from_slice(&[1.0, -2.0]).expect("finite");
    let u = UnitVec::from_slice(&[3.0, 4.0]).expect("nonzero");
    let pairs = (0..5)
        .map(|k| HermitePair {
            point: origin.add_scaled(0.7 * k as f64, u.as_vector()),
            tangent: u.clone(),
        })
        .collect();
    (
        HermiteSequence::open(pairs).expect("distinct points"),
        origin,
        u,
    )
}

pub fn circle_samples(radius: f64) -> HermiteSequence {
    let pairs = (0..4)
        .map(|k| {
            let (s, c) = (k as f64 * FRAC_PI_2).sin_cos();
            HermitePair::from_slices(&[radius * c, radius * s], &[-s, c]).expect("valid pair")
        })
        .collect();
    HermiteSequence::closed(pairs).expect("distinct points")
}

fn line_check(name: &'static str, scheme: Scheme) -> CheckResult {
    let (data, origin, u) = line_samples();
    let out = match refine(&data, &RefineConfig::new(scheme, 6)) {
        Ok((s, _)) => s,
        Err(e) => return failed(name, e),
    };
    let (mut off_line, mut tangent) = (0.0_f64, 0.0_f64);
    for p in out.pairs() {
        let d = &p.point - &origin;
        let along = d.dot(u.as_vector());
        off_line = off_line.max(d.add_scaled(-along, u.as_vector()).norm());
        tangent = tangent.max(p.tangent.as_vector().max_abs_diff(u.as_vector()));
    }
    CheckResult {
        name,
        passed: off_line <= 1e-12 && tangent <= 1e-12,
        detail: format!("distance to line {off_line:.2e}, tangent error {tangent:.2e}"),
    }
}

fn circle_check() -> CheckResult {
    let name = "circle-ihb";
    let out = match refine(
        &circle_samples(1.0),
        &RefineConfig::for_topology(Scheme::Ihb, 6, Topology::Closed),
    ) {
        Ok((s, _)) => s,
        Err(e) => return failed(name, e),
    };
    let (mut radial, mut normal) = (0.0_f64, 0.0_f64);
    for p in out.pairs() {
        let r = p.point.norm();
        radial = radial.max((r - 1.0).abs());
        normal = normal.max((p.point.dot(p.tangent.as_vector()) / r).abs());
    }
    CheckResult {
        name,
        passed: radial <= 1e-10 && normal <= 1e-9,
        detail: format!("radial deviation {radial:.2e}, tangent·radius {normal:.2e}"),
    }
}

fn circle_sigma_check() -> CheckResult {
    let name = "circle-sigma-ratio";
    let trace = match refine(
        &circle_samples(2.5),
        &RefineConfig::for_topology(Scheme::Ihb, 6, Topology::Closed),
    ) {
        Ok((_, t)) => t,
        Err(e) => return failed(name, e),
    };
    let worst = trace
        .sigma_ratios()
        .iter()
        .map(|r| (r - 0.5).abs())
        .fold(0.0, f64::max);
    CheckResult {
        name,
        passed: worst <= 1e-9,
        detail: format!(
            "max |ratio − 1/2| {worst:.2e} over {} levels",
            trace.rows.len() - 1
        ),
    }
}

fn similarity_check<R: Rng + ?Sized>(trials: usize, rng: &mut R) -> CheckResult {
    let name = "similarity";
    let dims = [2, 3, 5];
    let schemes = [Scheme::Ihb, Scheme::HbLr(3)];
    let mut worst = 0.0_f64;
    for k in 0..trials {
        let dim = dims[k % dims.len()];
        let data = random_smooth_data(dim, 5, rng);
        let t = SimilarityTransform::random(dim, rng);
        let cfg = RefineConfig::new(schemes[k % schemes.len()], 4);
        match equivariance_defect(&data, &t, &cfg) {
            // compare in the units of the transformed data
            Ok(d) => worst = worst.max(d / t.scale().max(1.0)),
            Err(e) => return failed(name, format!("trial {k}: {e}")),
        }
    }
    CheckResult {
        name,
        passed: worst <= 1e-10,
        detail: format!("max defect {worst:.2e} over {trials} transforms"),
    }
}
