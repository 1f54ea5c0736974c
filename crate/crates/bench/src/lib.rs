//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use hermite_core::{sample_curve, CurveKind, CurveSpec, HermiteSequence};

/// Planar spiral samples, open.
pub fn spiral(h: f64) -> HermiteSequence {
    sample_curve(&CurveSpec::new(CurveKind::Spiral2d, h)).expect("valid spiral spec")
}

/// Spatial spiral samples, open.
pub fn helix(h: f64) -> HermiteSequence {
    sample_curve(&CurveSpec::new(CurveKind::Spiral3d, h)).expect("valid helix spec")
}

/// Sine samples over two periods.
pub fn sine(h: f64) -> HermiteSequence {
    sample_curve(&CurveSpec::new(CurveKind::Sine, h).with_range(0.0, 4.0 * PI))
        .expect("valid sine spec")
}
