//! Geometric Hermite interpolation by refinement.
//!
//! Point–tangent pairs are averaged through a cubic Bézier construction and
//! the average drives interpolatory and Lane–Riesenfeld type subdivision
//! schemes. The crate also carries the numerical verification of the
//! σ-contraction inequality behind the convergence analysis and the
//! approximation-order experiments.

// `!(x > y)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bezier;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod lemma;
pub mod subdivision;
pub mod types;

pub use bezier::{average, midpoint_average, reverse, segment, AlphaVariant, BezierSegment};
pub use error::{HermiteError, Result};
pub use experiments::{
    apply_transform, functional_error, hausdorff, order_experiment, sample_curve, CurveKind,
    CurveSpec, HMeasure, OrderReport, OrderRow, SimilarityTransform,
};
pub use geometry::{
    check_admissible, direction_status, max_gap, pair_geometry, sigma_sup, AdmissibilityReport,
    DirectionStatus, PairGeometry,
};
pub use lemma::{
    d_value, q_value, theta_tilde, verify_nonnegativity, verify_nonnegativity_threaded,
    AngleTriple, SearchParams, VerificationCertificate,
};
pub use subdivision::{
    estimate_tangents, geodesic_average, geodesic_interpolant, hb_lr_step, ihb_step,
    linear_lr_step, refine, refine_only, Boundary, ConvergenceTrace, RefineConfig, Scheme,
    TraceRow,
};
pub use types::{HermitePair, HermiteSequence, Topology, UnitVec, Vector};
