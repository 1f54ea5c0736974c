mod common;

use std::f64::consts::PI;

use common::*;
use hermite_core::experiments::{dense_curve, directed_hausdorff};
use hermite_core::{
    estimate_tangents, functional_error, order_experiment, refine_only, sample_curve, CurveKind,
    CurveSpec, HMeasure, RefineConfig, Scheme, Topology,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refined_circles_stay_on_the_circle(n in 4usize..9, radius in 0.1..10.0f64, offset in 0.0..2.0 * PI) {
        let angles: Vec<f64> = (0..n).map(|k| offset + 2.0 * PI * k as f64 / n as f64).collect();
        let data = circle_sequence(radius, &angles, Topology::Closed);
        let out = refine_only(&data, &RefineConfig::for_topology(Scheme::Ihb, 6, Topology::Closed)).unwrap();
        let circle = dense_curve(&CurveKind::Circle { radius }, 0.0, 2.0 * PI, 1 << 17);
        prop_assert!(directed_hausdorff(&out.points(), &circle) <= 1e-9 * radius);
    }
}

const H_LIST: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];

fn quintic() -> CurveSpec {
    CurveSpec::new("poly:0.5,0.3,-0.1,0.02,0,0.001".parse().unwrap(), 1.0).with_range(0.0, 6.0)
}

#[test]
fn slopes_are_resolved_by_depth_nine() {
    for scheme in [Scheme::Ihb, Scheme::HbLr(3), Scheme::LinearLr(1)] {
        let cfg = RefineConfig::new(scheme, 0);
        let deep = order_experiment(&quintic(), &cfg, &H_LIST, 10, HMeasure::Parametric).unwrap();
        let shallow = order_experiment(&quintic(), &cfg, &H_LIST, 9, HMeasure::Parametric).unwrap();
        assert!(
            (deep.slope - shallow.slope).abs() <= 0.1,
            "{scheme:?}: {} vs {}",
            deep.slope,
            shallow.slope
        );
    }
}

#[test]
fn cubic_is_fourth_order() {
    let spec = CurveSpec::new("poly:0,1,-0.3,0.05".parse().unwrap(), 1.0).with_range(0.0, 4.0);
    let report = order_experiment(
        &spec,
        &RefineConfig::new(Scheme::Ihb, 0),
        &H_LIST,
        9,
        HMeasure::Parametric,
    )
    .unwrap();
    assert!((report.slope - 4.0).abs() <= 0.3, "slope {}", report.slope);
}

fn sine_errors(h: f64) -> (f64, f64) {
    let spec = CurveSpec::new(CurveKind::Sine, h).with_range(0.0, 4.0 * PI);
    let points = sample_curve(&spec).unwrap().points();
    let estimated = estimate_tangents(&points, Topology::Open).unwrap();
    let hermite = refine_only(&estimated, &RefineConfig::new(Scheme::HbLr(3), 8)).unwrap();
    let linear = refine_only(&estimated, &RefineConfig::new(Scheme::LinearLr(3), 8)).unwrap();
    (
        functional_error(&CurveKind::Sine, &hermite.points()).unwrap(),
        functional_error(&CurveKind::Sine, &linear.points()).unwrap(),
    )
}

#[test]
fn estimated_tangents_beat_linear_refinement_on_the_sine() {
    let (hermite, linear) = sine_errors(2.0 * PI / 3.0);
    assert!(hermite < linear, "{hermite} vs {linear}");
    // every sample sits on a zero of the sine, so both collapse onto the axis
    let (hermite, linear) = sine_errors(PI);
    assert!(hermite <= linear, "{hermite} vs {linear}");
}
