//! Refinement schemes on Hermite data and their convergence diagnostics.
//!
//! * IHB: keep every pair and insert the Bézier midpoint average of each
//!   consecutive pair.
//! * HB-LR(m): Lane–Riesenfeld of order `m` with the Bézier midpoint average
//!   in place of the linear one. Each pair is doubled, then `m` rounds
//!   replace the sequence by the averages of its consecutive elements.
//! * linear LR(m): the classical scheme on points, with tangents refined by
//!   geodesic midpoints on the sphere when a Hermite sequence is given.
//!
//! Open sequences keep their two end pairs fixed; closed sequences wrap.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bezier::{midpoint_average, AlphaVariant};
use crate::error::{HermiteError, Result};
use crate::geometry::{max_gap, sigma_sup};
use crate::types::{HermitePair, HermiteSequence, Topology, UnitVec, Vector, POINT_TOLERANCE};

/// Largest accepted number of refinement levels.
pub const MAX_LEVELS: usize = 30;

/// Vectors closer than this to antipodal have no unique geodesic.
pub const ANTIPODAL_TOLERANCE: f64 = 1e-9;

/// σ bound under which IHB is known to converge.
pub const SIGMA_CONVERGENCE_BOUND: f64 = 0.75 * PI;

/// Upper limit on grid points used for one tangent-drift measurement.
const DRIFT_GRID_CAP: usize = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Ihb,
    HbLr(usize),
    LinearLr(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Open data: the end pairs are kept and never refined away.
    #[default]
    Clamp,
    /// Closed data: indices wrap around.
    Wrap,
}

impl Boundary {
    pub fn for_topology(t: Topology) -> Self {
        match t {
            Topology::Open => Boundary::Clamp,
            Topology::Closed => Boundary::Wrap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub scheme: Scheme,
    pub levels: usize,
    pub variant: AlphaVariant,
    pub boundary: Boundary,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            scheme: Scheme::Ihb,
            levels: 0,
            variant: AlphaVariant::EndAngles,
            boundary: Boundary::Clamp,
        }
    }
}

impl RefineConfig {
    pub fn new(scheme: Scheme, levels: usize) -> Self {
        RefineConfig {
            scheme,
            levels,
            ..Default::default()
        }
    }

    /// Same as [`RefineConfig::new`] with the boundary matching `topology`.
    pub fn for_topology(scheme: Scheme, levels: usize, topology: Topology) -> Self {
        RefineConfig {
            boundary: Boundary::for_topology(topology),
            ..Self::new(scheme, levels)
        }
    }

    /// Checks the configuration against the topology of the data.
    pub fn validate(&self, topology: Topology) -> Result<()> {
        if self.levels > MAX_LEVELS {
            return Err(HermiteError::InvalidConfig(format!(
                "levels = {} exceeds the limit of {MAX_LEVELS}",
                self.levels
            )));
        }
        if let Scheme::HbLr(0) | Scheme::LinearLr(0) = self.scheme {
            return Err(HermiteError::InvalidConfig(
                "order m must be at least 1".into(),
            ));
        }
        match (self.boundary, topology) {
            (Boundary::Wrap, Topology::Open) => Err(HermiteError::InvalidConfig(
                "wrap boundary requires closed data".into(),
            )),
            (Boundary::Clamp, Topology::Closed) => Err(HermiteError::InvalidConfig(
                "clamp boundary requires open data".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Diagnostics of one refinement level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub level: usize,
    pub sigma_sup: f64,
    pub max_gap: f64,
    /// Largest angle between the piecewise geodesic tangent interpolants of
    /// this level and the next. `None` on the last level, or when some pair
    /// of adjacent tangents is antipodal.
    pub tangent_drift: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    pub warnings: Vec<String>,
}

impl ConvergenceTrace {
    /// Ratios `σ^(k+1)/σ^(k)`; `NaN` where `σ^(k)` is zero.
    pub fn sigma_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[1].sigma_sup / w[0].sigma_sup)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["level", "sigma_sup", "max_gap", "tangent_drift"])?;
        for r in &self.rows {
            w.write_record([
                r.level.to_string(),
                r.sigma_sup.to_string(),
                r.max_gap.to_string(),
                r.tangent_drift.map(|d| d.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn ihb_step(s: &HermiteSequence, variant: AlphaVariant) -> Result<HermiteSequence> {
    let mut out = Vec::with_capacity(2 * s.len());
    for (j, a, b) in s.segments() {
        out.push(a.clone());
        out.push(midpoint_average(a, b, variant).map_err(|e| e.at(j))?);
    }
    if s.topology() == Topology::Open {
        out.push(s.pairs()[s.len() - 1].clone());
    }
    HermiteSequence::new(out, s.topology())
}

/// Doubling followed by `m` rounds of averaging consecutive elements.
///
/// Open data: the first round reproduces the end elements by itself, since
/// the doubled ends average to themselves. Later rounds shorten the sequence
/// by one, so the original end elements are put back.
fn lane_riesenfeld<T: Clone>(
    items: &[T],
    m: usize,
    topology: Topology,
    avg: impl Fn(&T, &T) -> Result<T>,
) -> Result<Vec<T>> {
    if m == 0 {
        return Err(HermiteError::InvalidConfig(
            "order m must be at least 1".into(),
        ));
    }
    let mut cur: Vec<T> = items.iter().flat_map(|x| [x.clone(), x.clone()]).collect();
    for round in 1..=m {
        let n = cur.len();
        let mut next = Vec::with_capacity(n + 2);
        match topology {
            Topology::Closed => {
                for i in 0..n {
                    next.push(
                        avg(&cur[i], &cur[(i + 1) % n]).map_err(|e| e.at(i).in_round(round))?,
                    );
                }
            }
            Topology::Open => {
                for i in 0..n - 1 {
                    next.push(avg(&cur[i], &cur[i + 1]).map_err(|e| e.at(i).in_round(round))?);
                }
            }
        }
        cur = next;
    }
    if topology == Topology::Open && m > 1 {
        // rounds after the first shave one item per round off the ends
        cur.insert(0, items[0].clone());
        cur.push(items[items.len() - 1].clone());
    }
    Ok(cur)
}

pub fn hb_lr_step(s: &HermiteSequence, m: usize, variant: AlphaVariant) -> Result<HermiteSequence> {
    let out = lane_riesenfeld(s.pairs(), m, s.topology(), |a, b| {
        midpoint_average(a, b, variant)
    })?;
    HermiteSequence::new(out, s.topology())
}

/// Classical Lane–Riesenfeld step of order `m` on points.
pub fn linear_lr_step(points: &[Vector], m: usize, topology: Topology) -> Result<Vec<Vector>> {
    if points.len() < 2 {
        return Err(HermiteError::TooFewElements {
            min: 2,
            found: points.len(),
        });
    }
    lane_riesenfeld(points, m, topology, |a, b| Ok(a.midpoint(b)))
}

fn linear_lr_hermite_step(s: &HermiteSequence, m: usize) -> Result<HermiteSequence> {
    let out = lane_riesenfeld(s.pairs(), m, s.topology(), |a, b| {
        if a == b {
            return Ok(a.clone());
        }
        Ok(HermitePair {
            point: a.point.midpoint(&b.point),
            tangent: geodesic_average(&a.tangent, &b.tangent, 0.5)?,
        })
    })?;
    HermiteSequence::new(out, s.topology())
}

fn step(s: &HermiteSequence, cfg: &RefineConfig) -> Result<HermiteSequence> {
    match cfg.scheme {
        Scheme::Ihb => ihb_step(s, cfg.variant),
        Scheme::HbLr(m) => hb_lr_step(s, m, cfg.variant),
        Scheme::LinearLr(m) => linear_lr_hermite_step(s, m),
    }
}

/// Applies `cfg.levels` refinement steps and records σ^(k), Δ(P^k) and the
/// tangent drift at every level.
pub fn refine(
    s: &HermiteSequence,
    cfg: &RefineConfig,
) -> Result<(HermiteSequence, ConvergenceTrace)> {
    cfg.validate(s.topology())?;
    let mut trace = ConvergenceTrace::default();
    let sigma0 = sigma_sup(s)?;
    if !matches!(cfg.scheme, Scheme::LinearLr(_)) && sigma0 > SIGMA_CONVERGENCE_BOUND {
        trace.warnings.push(format!(
            "initial sigma {sigma0} exceeds 3π/4; convergence is not guaranteed"
        ));
    }
    let mut cur = s.clone();
    let mut sigma = sigma0;
    for level in 0..cfg.levels {
        let next = step(&cur, cfg)?;
        trace.rows.push(TraceRow {
            level,
            sigma_sup: sigma,
            max_gap: max_gap(&cur),
            tangent_drift: tangent_drift(&cur, &next),
        });
        sigma = sigma_sup(&next)?;
        cur = next;
    }
    trace.rows.push(TraceRow {
        level: cfg.levels,
        sigma_sup: sigma,
        max_gap: max_gap(&cur),
        tangent_drift: None,
    });
    Ok((cur, trace))
}

/// Like [`refine`] without the per-level diagnostics.
pub fn refine_only(s: &HermiteSequence, cfg: &RefineConfig) -> Result<HermiteSequence> {
    cfg.validate(s.topology())?;
    let mut cur = s.clone();
    for _ in 0..cfg.levels {
        cur = step(&cur, cfg)?;
    }
    Ok(cur)
}

/// Point at geodesic distance `w·g(u, v)` from `u` on the great circle
/// through `u` and `v`.
pub fn geodesic_average(u: &UnitVec, v: &UnitVec, w: f64) -> Result<UnitVec> {
    if !(0.0..=1.0).contains(&w) {
        return Err(HermiteError::OutOfRange {
            value: w,
            min: 0.0,
            max: 1.0,
        });
    }
    let g = u.angle_to(v);
    if g >= PI - ANTIPODAL_TOLERANCE {
        return Err(HermiteError::AntipodalVectors { index: 0 });
    }
    if w == 0.0 {
        return Ok(u.clone());
    }
    if w == 1.0 {
        return Ok(v.clone());
    }
    let (cu, cv) = if g < 1e-8 {
        (1.0 - w, w)
    } else {
        let s = g.sin();
        (((1.0 - w) * g).sin() / s, (w * g).sin() / s)
    };
    let combo = (u.as_vector() * cu).add_scaled(cv, v.as_vector());
    UnitVec::new(combo)
}

/// Number of segments of the piecewise interpolants of `s`.
fn interval_count(s: &HermiteSequence) -> usize {
    s.segment_count()
}

/// `PG(y)` for `y ∈ [0, segments]`, one unit per segment.
fn pg_unit(s: &HermiteSequence, y: f64) -> Result<UnitVec> {
    let segments = interval_count(s);
    let j = (y.floor() as usize).min(segments - 1);
    let w = (y - j as f64).clamp(0.0, 1.0);
    let pairs = s.pairs();
    let a = &pairs[j].tangent;
    let b = &pairs[(j + 1) % pairs.len()].tangent;
    geodesic_average(a, b, w).map_err(|e| e.at(j))
}

/// Piecewise geodesic interpolant of the tangents of level `level`:
/// `PG_k(t) = M_{t·2^k − j}(v_j, v_{j+1})` for `t ∈ [2^{-k} j, 2^{-k}(j+1)]`.
pub fn geodesic_interpolant(s: &HermiteSequence, level: u32, t: f64) -> Result<UnitVec> {
    let scale = 2f64.powi(level as i32);
    let max = interval_count(s) as f64 / scale;
    if !(0.0..=max).contains(&t) {
        return Err(HermiteError::OutOfRange {
            value: t,
            min: 0.0,
            max,
        });
    }
    pg_unit(s, t * scale)
}

/// Sup over a uniform grid of the angle between the tangent interpolants of
/// two levels, both parametrized over [0, 1].
fn tangent_drift(coarse: &HermiteSequence, fine: &HermiteSequence) -> Option<f64> {
    let nc = interval_count(coarse) as f64;
    let nf = interval_count(fine) as f64;
    let grid = (2 * interval_count(fine)).min(DRIFT_GRID_CAP);
    let mut sup = 0.0_f64;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        let a = pg_unit(coarse, x * nc).ok()?;
        let b = pg_unit(fine, x * nf).ok()?;
        sup = sup.max(a.angle_to(&b));
    }
    Some(sup)
}

/// Tangents for point-only data.
///
/// Interior tangents are the geodesic average of the unit differences to
/// the previous and next point, weighted by `|p_j − p_{j−1}|` over the sum of
/// both distances. Open ends use the one-sided difference.
pub fn estimate_tangents(points: &[Vector], topology: Topology) -> Result<HermiteSequence> {
    let n = points.len();
    if n < 3 {
        return Err(HermiteError::TooFewElements { min: 3, found: n });
    }
    let dim = points[0].dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
        return Err(HermiteError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let edges = match topology {
        Topology::Open => n - 1,
        Topology::Closed => n,
    };
    let mut dirs = Vec::with_capacity(edges);
    let mut lens = Vec::with_capacity(edges);
    for j in 0..edges {
        let d = &points[(j + 1) % n] - &points[j];
        let len = d.norm();
        if len <= POINT_TOLERANCE {
            return Err(HermiteError::CoincidentPoints { index: j });
        }
        dirs.push(UnitVec::new(d)?);
        lens.push(len);
    }
    let mut pairs = Vec::with_capacity(n);
    for j in 0..n {
        let tangent = match (topology, j) {
            (Topology::Open, 0) => dirs[0].clone(),
            (Topology::Open, j) if j == n - 1 => dirs[n - 2].clone(),
            _ => {
                let prev = (j + edges - 1) % edges;
                let w = lens[prev] / (lens[prev] + lens[j % edges]);
                geodesic_average(&dirs[prev], &dirs[j % edges], w).map_err(|e| e.at(j))?
            }
        };
        pairs.push(HermitePair::new(points[j].clone(), tangent)?);
    }
    HermiteSequence::new(pairs, topology)
}
