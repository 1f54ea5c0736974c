//! Test curves, error measures and the approximation-order harness.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HermiteError, Result};
use crate::subdivision::{refine_only, RefineConfig};
use crate::types::{HermitePair, HermiteSequence, Topology, UnitVec, Vector};

/// Errors below this are treated as roundoff and left out of slope fits.
pub const ERROR_FLOOR: f64 = 1e3 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CurveKind {
    /// `(t, sin t)`
    Sine,
    /// `(t cos t, t sin t)`
    Spiral2d,
    /// `(t cos t, t sin t, t)`
    Spiral3d,
    /// `(R cos t, R sin t)`
    Circle { radius: f64 },
    /// `(t, P(t))` with `P(t) = Σ c_i t^i`
    Poly { coefficients: Vec<f64> },
}

impl CurveKind {
    pub fn default_range(&self) -> (f64, f64) {
        match self {
            CurveKind::Sine => (0.0, 4.0 * PI),
            CurveKind::Spiral2d | CurveKind::Spiral3d => (0.5 * PI, 4.0 * PI),
            CurveKind::Circle { .. } => (0.0, 2.0 * PI),
            CurveKind::Poly { .. } => (0.0, 1.0),
        }
    }

    pub fn is_functional(&self) -> bool {
        matches!(self, CurveKind::Sine | CurveKind::Poly { .. })
    }

    /// Second coordinate as a function of the first, for functional curves.
    pub fn graph_value(&self, x: f64) -> Option<f64> {
        match self {
            CurveKind::Sine => Some(x.sin()),
            CurveKind::Poly { coefficients } => Some(horner(coefficients, x)),
            _ => None,
        }
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        let (s, c) = t.sin_cos();
        match self {
            CurveKind::Sine => vec![t, s],
            CurveKind::Spiral2d => vec![t * c, t * s],
            CurveKind::Spiral3d => vec![t * c, t * s, t],
            CurveKind::Circle { radius } => vec![radius * c, radius * s],
            CurveKind::Poly { coefficients } => vec![t, horner(coefficients, t)],
        }
    }

    pub fn derivative(&self, t: f64) -> Vec<f64> {
        let (s, c) = t.sin_cos();
        match self {
            CurveKind::Sine => vec![1.0, c],
            CurveKind::Spiral2d => vec![c - t * s, s + t * c],
            CurveKind::Spiral3d => vec![c - t * s, s + t * c, 1.0],
            CurveKind::Circle { radius } => vec![-radius * s, radius * c],
            CurveKind::Poly { coefficients } => {
                let d: Vec<f64> = coefficients
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| i as f64 * c)
                    .collect();
                vec![1.0, horner(&d, t)]
            }
        }
    }
}

fn horner(coefficients: &[f64], t: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Parses `sine`, `spiral2d`, `spiral3d`, `circle[:R]` and `poly:c0,c1,...`.
impl FromStr for CurveKind {
    type Err = HermiteError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let numbers = |a: &str| -> Result<Vec<f64>> {
            a.split(',')
                .map(|x| {
                    x.trim().parse::<f64>().map_err(|_| {
                        HermiteError::Parse(format!("bad number {x:?} in curve {s:?}"))
                    })
                })
                .collect()
        };
        match (name.to_ascii_lowercase().as_str(), args) {
            ("sine", None) => Ok(CurveKind::Sine),
            ("spiral2d", None) => Ok(CurveKind::Spiral2d),
            ("spiral3d", None) => Ok(CurveKind::Spiral3d),
            ("circle", None) => Ok(CurveKind::Circle { radius: 1.0 }),
            ("circle", Some(a)) => {
                let radius = a
                    .parse::<f64>()
                    .map_err(|_| HermiteError::Parse(format!("bad radius in curve {s:?}")))?;
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(HermiteError::Parse(format!(
                        "radius must be positive in {s:?}"
                    )));
                }
                Ok(CurveKind::Circle { radius })
            }
            ("poly", Some(a)) => {
                let coefficients = numbers(a)?;
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(HermiteError::Parse(format!(
                        "non-finite coefficient in {s:?}"
                    )));
                }
                Ok(CurveKind::Poly { coefficients })
            }
            _ => Err(HermiteError::Parse(format!("unknown curve {s:?}"))),
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::Sine => write!(f, "sine"),
            CurveKind::Spiral2d => write!(f, "spiral2d"),
            CurveKind::Spiral3d => write!(f, "spiral3d"),
            CurveKind::Circle { radius } => write!(f, "circle:{radius}"),
            CurveKind::Poly { coefficients } => {
                let c: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:{}", c.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub kind: CurveKind,
    /// Parameter step between samples.
    pub h: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl CurveSpec {
    /// Samples over the default range of `kind`.
    pub fn new(kind: CurveKind, h: f64) -> Self {
        let (t_min, t_max) = kind.default_range();
        CurveSpec {
            kind,
            h,
            t_min,
            t_max,
        }
    }

    pub fn with_range(mut self, t_min: f64, t_max: f64) -> Self {
        self.t_min = t_min;
        self.t_max = t_max;
        self
    }

    pub fn with_h(&self, h: f64) -> Self {
        CurveSpec { h, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(HermiteError::InvalidConfig(format!(
                "step h must be positive, got {}",
                self.h
            )));
        }
        if !(self.t_min < self.t_max) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(HermiteError::InvalidConfig(format!(
                "empty parameter range [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    /// Equispaced parameters `t_min + k·h` up to `t_max` (inclusive up to
    /// roundoff).
    pub fn parameters(&self) -> Vec<f64> {
        let n = ((self.t_max - self.t_min) / self.h + 1e-9).floor() as usize;
        (0..=n).map(|k| self.t_min + k as f64 * self.h).collect()
    }
}

/// Exact points and normalized analytic tangents at the sample parameters.
pub fn sample_curve(spec: &CurveSpec) -> Result<HermiteSequence> {
    spec.validate()?;
    let pairs = spec
        .parameters()
        .into_iter()
        .map(|t| HermitePair::from_slices(&spec.kind.point(t), &spec.kind.derivative(t)))
        .collect::<Result<Vec<_>>>()?;
    HermiteSequence::open(pairs)
}

/// Points of the curve on a fine grid, for comparisons against refinements.
pub fn dense_curve(kind: &CurveKind, t_min: f64, t_max: f64, n: usize) -> Vec<Vector> {
    let n = n.max(1);
    (0..=n)
        .map(|i| {
            let t = t_min + (t_max - t_min) * i as f64 / n as f64;
            Vector::raw(kind.point(t))
        })
        .collect()
}

fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for i in 0..p.len() {
        let ab = b[i] - a[i];
        ab2 += ab * ab;
        ap_ab += (p[i] - a[i]) * ab;
    }
    let s = if ab2 > 0.0 {
        (ap_ab / ab2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut d2 = 0.0;
    for i in 0..p.len() {
        let q = a[i] + s * (b[i] - a[i]);
        d2 += (p[i] - q) * (p[i] - q);
    }
    d2.sqrt()
}

/// Largest distance from a vertex of `from` to the polyline `to`.
pub fn directed_hausdorff(from: &[Vector], to: &[Vector]) -> f64 {
    from.iter()
        .map(|p| {
            if to.len() == 1 {
                return p.distance(&to[0]);
            }
            to.windows(2)
                .map(|w| point_segment_distance(p.as_slice(), w[0].as_slice(), w[1].as_slice()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two polylines, measured from the vertices of
/// each to the segments of the other.
pub fn hausdorff(a: &[Vector], b: &[Vector]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(HermiteError::TooFewElements { min: 1, found: 0 });
    }
    if a[0].dim() != b[0].dim() {
        return Err(HermiteError::DimensionMismatch {
            expected: a[0].dim(),
            found: b[0].dim(),
        });
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Largest vertical distance from the vertices of `approx` to the graph of a
/// functional curve.
pub fn functional_error(curve: &CurveKind, approx: &[Vector]) -> Result<f64> {
    if !curve.is_functional() {
        return Err(HermiteError::NonFunctionalInput(format!(
            "{curve} is not a graph"
        )));
    }
    if let Some(i) = approx
        .windows(2)
        .position(|w| w[1].as_slice()[0] < w[0].as_slice()[0])
    {
        return Err(HermiteError::NonFunctionalInput(format!(
            "first coordinate decreases after vertex {i}"
        )));
    }
    let mut err = 0.0_f64;
    for p in approx {
        let c = p.as_slice();
        let y = curve.graph_value(c[0]).expect("functional curve");
        err = err.max((c[1] - y).abs());
    }
    Ok(err)
}

/// How the sampling density of a row is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HMeasure {
    /// Parameter step between consecutive samples.
    #[default]
    Parametric,
    /// Largest distance between consecutive samples.
    Chordal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub h: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub rows: Vec<OrderRow>,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit residuals in log space.
    pub residual: f64,
    /// Rows that entered the fit.
    pub fitted: usize,
}

#[derive(Serialize)]
struct OrderSummary {
    slope: f64,
    intercept: f64,
    residual: f64,
}

impl OrderReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["h", "error", "log_h", "log_error"])?;
        for r in &self.rows {
            w.write_record([
                r.h.to_string(),
                r.error.to_string(),
                r.h.ln().to_string(),
                r.error.ln().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&OrderSummary {
            slope: self.slope,
            intercept: self.intercept,
            residual: self.residual,
        })?)
    }
}

/// Least-squares fit of `ln e = β ln h + ln C` over rows above
/// [`ERROR_FLOOR`].
pub fn fit_order(rows: &[OrderRow]) -> Result<(f64, f64, f64, usize)> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error >= ERROR_FLOOR && r.h > 0.0)
        .map(|r| (r.h.ln(), r.error.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(HermiteError::ParameterError(format!(
            "only {} rows above the error floor, cannot fit a slope",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, intercept, residual, pts.len()))
}

/// Samples the curve at every `h`, refines `depth` levels and fits the decay
/// of the functional error.
pub fn order_experiment(
    spec: &CurveSpec,
    scheme: &RefineConfig,
    h_list: &[f64],
    depth: usize,
    measure: HMeasure,
) -> Result<OrderReport> {
    if h_list.len() < 4 {
        return Err(HermiteError::ParameterError(format!(
            "need at least 4 step sizes, got {}",
            h_list.len()
        )));
    }
    if h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(HermiteError::ParameterError(
            "step sizes must be strictly decreasing".into(),
        ));
    }
    if depth < 6 {
        return Err(HermiteError::ParameterError(format!(
            "depth must be at least 6, got {depth}"
        )));
    }
    let cfg = RefineConfig {
        levels: depth,
        ..*scheme
    };
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let data = sample_curve(&spec.with_h(h))?;
        let refined = refine_only(&data, &cfg)?;
        let error = functional_error(&spec.kind, &refined.points())?;
        let h = match measure {
            HMeasure::Parametric => h,
            HMeasure::Chordal => crate::geometry::max_gap(&data),
        };
        rows.push(OrderRow { h, error });
    }
    let (slope, intercept, residual, fitted) = fit_order(&rows)?;
    Ok(OrderReport {
        rows,
        slope,
        intercept,
        residual,
        fitted,
    })
}

/// `x ↦ scale·R·x + translation` on points; tangents are rotated only.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityTransform {
    rotation: DMatrix<f64>,
    translation: DVector<f64>,
    scale: f64,
}

impl SimilarityTransform {
    pub fn new(rotation: DMatrix<f64>, translation: Vec<f64>, scale: f64) -> Result<Self> {
        let n = rotation.nrows();
        if rotation.ncols() != n || translation.len() != n {
            return Err(HermiteError::DimensionMismatch {
                expected: n,
                found: if rotation.ncols() != n {
                    rotation.ncols()
                } else {
                    translation.len()
                },
            });
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(n, n)).amax();
        if defect > 1e-12 {
            return Err(HermiteError::InvalidConfig(format!(
                "rotation is not orthogonal (defect {defect:e})"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(HermiteError::InvalidConfig(format!(
                "scale must be positive, got {scale}"
            )));
        }
        Ok(SimilarityTransform {
            rotation,
            translation: DVector::from_vec(translation),
            scale,
        })
    }

    pub fn identity(n: usize) -> Self {
        SimilarityTransform {
            rotation: DMatrix::identity(n, n),
            translation: DVector::zeros(n),
            scale: 1.0,
        }
    }

    /// Orthogonal factor of a random matrix, a translation in `[-10, 10]^n`
    /// and a log-uniform scale in `[0.1, 10]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let rotation = m.qr().q();
        let translation = DVector::from_fn(n, |_, _| rng.random_range(-10.0..10.0));
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        SimilarityTransform {
            rotation,
            translation,
            scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply_point(&self, p: &Vector) -> Vector {
        let x = DVector::from_column_slice(p.as_slice());
        let y = &self.rotation * x * self.scale + &self.translation;
        Vector::raw(y.as_slice().to_vec())
    }

    pub fn apply_direction(&self, v: &UnitVec) -> UnitVec {
        let x = DVector::from_column_slice(v.as_slice());
        let y = &self.rotation * x;
        UnitVec::new(Vector::raw(y.as_slice().to_vec())).expect("rotation preserves length")
    }
}

pub fn apply_transform(s: &HermiteSequence, t: &SimilarityTransform) -> Result<HermiteSequence> {
    if s.dim() != t.dim() {
        return Err(HermiteError::DimensionMismatch {
            expected: t.dim(),
            found: s.dim(),
        });
    }
    let pairs = s
        .pairs()
        .iter()
        .map(|p| HermitePair {
            point: t.apply_point(&p.point),
            tangent: t.apply_direction(&p.tangent),
        })
        .collect();
    HermiteSequence::new(pairs, s.topology())
}

const SVG_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// SVG document drawing 2D polylines, one path each, with the view box
/// fitted to their bounding box. A closed polyline gets its closing segment.
pub fn polylines_svg(lines: &[(&[Vector], Topology)]) -> Result<String> {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for (line, _) in lines {
        for p in line.iter() {
            if p.dim() != 2 {
                return Err(HermiteError::DimensionMismatch {
                    expected: 2,
                    found: p.dim(),
                });
            }
            // SVG y grows downwards
            let q = [p.as_slice()[0], 0.0 - p.as_slice()[1]];
            for i in 0..2 {
                min[i] = min[i].min(q[i]);
                max[i] = max[i].max(q[i]);
            }
        }
    }
    if !min[0].is_finite() {
        return Err(HermiteError::TooFewElements { min: 1, found: 0 });
    }
    let extent = (max[0] - min[0]).max(max[1] - min[1]).max(1e-12);
    let stroke = 0.005 * extent;
    let margin = 0.05 * extent;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        min[0] - margin,
        min[1] - margin,
        max[0] - min[0] + 2.0 * margin,
        max[1] - min[1] + 2.0 * margin
    );
    for (k, (line, topology)) in lines.iter().enumerate() {
        let mut d = String::new();
        for (i, p) in line.iter().enumerate() {
            let c = p.as_slice();
            d.push_str(if i == 0 { "M" } else { " L" });
            d.push_str(&format!("{} {}", c[0], 0.0 - c[1]));
        }
        if *topology == Topology::Closed {
            d.push_str(" Z");
        }
        svg.push_str(&format!(
            "  <path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{stroke}\"/>\n",
            SVG_COLORS[k % SVG_COLORS.len()]
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
