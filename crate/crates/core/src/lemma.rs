//! Numerical verification of the σ-contraction inequality of the midpoint
//! average.
//!
//! For an admissible pair with angles `(θ0, θ1, θ)` the left child
//! `(p0, v0), (p½, v½)` has angles `θ̃00, θ̃01` given in closed form by
//! [`theta_tilde`]. The contraction `σ(child) ≤ √0.9·σ` is equivalent to
//! `D = 0.9(θ0² + θ1²) − θ̃00² − θ̃01² ≥ 0` on the domain
//!
//! `Ω = {√(θ0² + θ1²) ≤ 3π/4, |θ1 − θ0| ≤ θ ≤ θ0 + θ1} ⊂ [0, π]³`.
//!
//! [`verify_nonnegativity`] checks this in two parts. Inside the ball
//! `B_r(0)` the minimum sits at the origin provided `D ≥ 0` on the boundary of
//! `B_r(0) ∩ Ω`, which is sampled densely. Outside the ball a Lipschitz
//! covering argument is used: with `|∇D|∞ ≤ M`, every evaluation `D(x) ≥ eps`
//! certifies `D ≥ eps` on the Euclidean ball of radius `(D(x) − eps)/(√3 M)`
//! around `x`, and the evaluation points are placed so that these balls cover
//! `Ω ∖ B_r(0)`.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{HermiteError, Result};

/// Radius bound `3π/4` on `√(θ0² + θ1²)`.
pub const SIGMA_MAX: f64 = 0.75 * PI;

/// Smallest tile half-diagonal the search may refine to.
pub const STEP_FLOOR: f64 = 1e-7;

/// Angular grid spacing used on the boundary of the inner ball.
pub const BOUNDARY_GRID: f64 = 1e-3;

/// Default roundoff margin, `2^-52`.
pub const DEFAULT_EPS: f64 = f64::EPSILON;

/// A tile is split once its covering radius falls below this multiple of the
/// tile radius. `2/√3 · 1/√2 ≈ 1.22` is where a column of balls covers a
/// prism most economically.
const SPLIT_RATIO: f64 = 1.22;

/// Number of tile rows and columns the search starts from.
const ROOT_TILES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub theta0: f64,
    pub theta1: f64,
    pub theta: f64,
}

impl AngleTriple {
    pub fn new(theta0: f64, theta1: f64, theta: f64) -> Self {
        AngleTriple {
            theta0,
            theta1,
            theta,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta0, self.theta1, self.theta]
    }

    pub fn sigma(&self) -> f64 {
        self.theta0.hypot(self.theta1)
    }

    pub fn norm(&self) -> f64 {
        self.sigma().hypot(self.theta)
    }
}

/// Closed forms for `(θ̃00, θ̃01)`.
pub fn theta_tilde(t: &AngleTriple) -> Result<(f64, f64)> {
    Column::new(t.theta0, t.theta1).theta_tilde(t.theta)
}

/// `(θ̃00² + θ̃01²)/(θ0² + θ1²)`
pub fn q_value(t: &AngleTriple) -> Result<f64> {
    let s2 = t.theta0 * t.theta0 + t.theta1 * t.theta1;
    if s2 == 0.0 {
        return Err(HermiteError::UndefinedAtOrigin);
    }
    let (a, b) = theta_tilde(t)?;
    Ok((a * a + b * b) / s2)
}

/// `0.9(θ0² + θ1²) − θ̃00² − θ̃01²`
pub fn d_value(t: &AngleTriple) -> Result<f64> {
    Column::new(t.theta0, t.theta1).d(t.theta)
}

pub fn in_omega(t: &AngleTriple) -> bool {
    let box_ok = [t.theta0, t.theta1, t.theta]
        .iter()
        .all(|x| (0.0..=PI).contains(x));
    box_ok
        && t.theta0 * t.theta0 + t.theta1 * t.theta1 <= SIGMA_MAX * SIGMA_MAX
        && (t.theta1 - t.theta0).abs() <= t.theta
        && t.theta <= t.theta0 + t.theta1
}

/// Central finite-difference gradient of `D`.
pub fn gradient_probe(t: &AngleTriple, h: f64) -> Result<[f64; 3]> {
    if !(h > 0.0) {
        return Err(HermiteError::ParameterError(format!(
            "step must be positive, got {h}"
        )));
    }
    let x = t.as_array();
    let mut g = [0.0; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut hi = x;
        let mut lo = x;
        hi[i] += h;
        lo[i] -= h;
        let f = |y: [f64; 3]| d_value(&AngleTriple::new(y[0], y[1], y[2]));
        *gi = (f(hi)? - f(lo)?) / (2.0 * h);
    }
    Ok(g)
}

/// The parts of `D` that depend on `(θ0, θ1)` only, so that sweeping `θ`
/// costs one sine per point.
///
/// Each angle `θ̃ = acos(n/√g)` is evaluated as `atan2(√(g − n²), n)` with
/// `g − n²` expanded in `x = sin²(θ0/2)`, `y = sin²(θ1/2)`, `z = sin²(θ/2)` and
/// `q = sin²((θ0 + θ1)/4)`. The expansions have no constant term, so the
/// result keeps its accuracy near the origin where `acos` of a quotient close
/// to one does not.
#[derive(Clone, Copy, Debug)]
struct Column {
    theta0: f64,
    theta1: f64,
    x: f64,
    y: f64,
    q: f64,
    c: f64,
    sigma2: f64,
}

impl Column {
    fn new(theta0: f64, theta1: f64) -> Self {
        let quarter = 0.25 * (theta0 + theta1);
        Column {
            theta0,
            theta1,
            x: (0.5 * theta0).sin().powi(2),
            y: (0.5 * theta1).sin().powi(2),
            q: quarter.sin().powi(2),
            c: quarter.cos().powi(2),
            sigma2: theta0 * theta0 + theta1 * theta1,
        }
    }

    fn theta_tilde(&self, theta: f64) -> Result<(f64, f64)> {
        let Column { x, y, q, c, .. } = *self;
        let z = (0.5 * theta).sin().powi(2);
        // 8cos⁴ + 1 − cosθ + 4cos²(cosθ0 − cosθ1)
        let b = 8.0 * c * c + 2.0 * z + 8.0 * c * (y - x);
        // 18cos⁴ + 1 + cosθ − 6cos²(cosθ0 + cosθ1)
        let a = 18.0 * c * c + 2.0 - 2.0 * z - 6.0 * c * (2.0 - 2.0 * x - 2.0 * y);
        if !(a > 1e-14 && b > 1e-14) {
            return Err(HermiteError::DegenerateDenominator {
                theta0: self.theta0,
                theta1: self.theta1,
                theta,
            });
        }
        let n00 = 4.0 * c * (1.0 - 2.0 * x) + 2.0 * z;
        let g00 = q * q * (64.0 * x - 64.0 * x * x)
            + q * (128.0 * x * x - 32.0 * x * z - 112.0 * x - 16.0 * y + 16.0 * z)
            - 64.0 * x * x
            + x * (32.0 * z + 48.0)
            + 16.0 * y
            - 4.0 * z * z
            - 12.0 * z;
        let n01 = c * (8.0 - 12.0 * q - 2.0 * x + 10.0 * y);
        let g01 =
            q * q * (-100.0 * x * x + 40.0 * x * y + 80.0 * x - 4.0 * y * y - 16.0 * y + 20.0 * z)
                + q * (200.0 * x * x - 80.0 * x * y - 40.0 * x * z - 144.0 * x + 8.0 * y * y
                    - 8.0 * y * z
                    + 16.0 * y
                    - 16.0 * z)
                - 100.0 * x * x
                + x * (40.0 * y + 40.0 * z + 64.0)
                - 4.0 * y * y
                + 8.0 * y * z
                - 4.0 * z * z;
        Ok((
            g00.max(0.0).sqrt().atan2(n00),
            g01.max(0.0).sqrt().atan2(n01),
        ))
    }

    fn d(&self, theta: f64) -> Result<f64> {
        let (a, b) = self.theta_tilde(theta)?;
        Ok(0.9 * self.sigma2 - a * a - b * b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Bound on `|∇D|∞` over Ω.
    #[serde(rename = "M")]
    pub m: f64,
    /// Radius of the ball around the origin handled through its boundary.
    pub r: f64,
    /// Roundoff margin every evaluation outside the ball must clear.
    pub eps: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            m: 10.0,
            r: 0.1,
            eps: DEFAULT_EPS,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(HermiteError::ParameterError(format!(
                "M must be positive, got {}",
                self.m
            )));
        }
        if !(self.r > 0.0 && self.r < SIGMA_MAX) {
            return Err(HermiteError::ParameterError(format!(
                "r must lie in (0, 3π/4), got {}",
                self.r
            )));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(HermiteError::ParameterError(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationCertificate {
    pub passed: bool,
    /// Evaluations of `D` outside the inner ball.
    pub points: u64,
    /// Smallest value of `D` seen outside the inner ball.
    pub min_value: f64,
    pub min_at: [f64; 3],
    #[serde(rename = "M")]
    pub m: f64,
    pub r: f64,
    pub eps: f64,
    pub seconds: f64,
    /// Evaluations on the boundary of the inner ball.
    pub boundary_points: u64,
    pub boundary_min_value: f64,
    pub boundary_min_at: [f64; 3],
    pub boundary_grid: f64,
    /// `D(0, 0, 0)`, the minimum over the inner ball.
    pub origin_value: f64,
    /// Description of the first problem found when `passed` is false.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
}

/// Running minimum and failure record of one part of the search.
#[derive(Clone, Debug)]
struct Tally {
    points: u64,
    min_value: f64,
    min_at: [f64; 3],
    failure: Option<([f64; 3], String)>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            points: 0,
            min_value: f64::INFINITY,
            min_at: [f64::NAN; 3],
            failure: None,
        }
    }

    fn record(&mut self, x: [f64; 3], value: f64) {
        self.points += 1;
        if value < self.min_value || (value == self.min_value && lex_less(x, self.min_at)) {
            self.min_value = value;
            self.min_at = x;
        }
    }

    fn fail(&mut self, x: [f64; 3], reason: String) {
        match &self.failure {
            Some((y, _)) if !lex_less(x, *y) => {}
            _ => self.failure = Some((x, reason)),
        }
    }

    /// Order-independent merge.
    fn merge(&mut self, other: Tally) {
        self.points += other.points;
        if other.min_value < self.min_value
            || (other.min_value == self.min_value && lex_less(other.min_at, self.min_at))
        {
            self.min_value = other.min_value;
            self.min_at = other.min_at;
        }
        if let Some((x, reason)) = other.failure {
            self.fail(x, reason);
        }
    }
}

fn lex_less(a: [f64; 3], b: [f64; 3]) -> bool {
    if b[0].is_nan() {
        return true;
    }
    a.iter()
        .zip(&b)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

/// Runs the search single-threaded.
pub fn verify_nonnegativity(p: &SearchParams) -> Result<VerificationCertificate> {
    verify_nonnegativity_threaded(p, 1)
}

/// Runs the search with the outer domain split over `threads` workers. The
/// certificate does not depend on the thread count.
pub fn verify_nonnegativity_threaded(
    p: &SearchParams,
    threads: usize,
) -> Result<VerificationCertificate> {
    verify_with_offset(p, threads, 0.0)
}

/// Runs the search on `D − offset` instead of `D`. Used to check that the
/// engine reports counterexamples.
pub fn verify_with_offset(
    p: &SearchParams,
    threads: usize,
    offset: f64,
) -> Result<VerificationCertificate> {
    p.validate()?;
    let start = Instant::now();
    let origin_value = d_value(&AngleTriple::new(0.0, 0.0, 0.0))? - offset;

    let boundary = search_inner_boundary(p, offset);

    let tiles = root_tiles();
    let threads = threads.max(1);
    let mut outer = Tally::new();
    if threads == 1 {
        for tile in &tiles {
            outer.merge(search_tile(p, offset, tile));
        }
    } else {
        let parts: Vec<Tally> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let tiles = &tiles;
                    scope.spawn(move || {
                        let mut tally = Tally::new();
                        for tile in tiles.iter().skip(w).step_by(threads) {
                            tally.merge(search_tile(p, offset, tile));
                        }
                        tally
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        });
        for part in parts {
            outer.merge(part);
        }
    }

    let mut failure = None;
    if origin_value < 0.0 {
        failure = Some(format!("D(0, 0, 0) = {origin_value} is negative"));
    }
    if let Some((x, reason)) = &boundary.failure {
        failure.get_or_insert_with(|| format!("inner-ball boundary at {x:?}: {reason}"));
    }
    if let Some((x, reason)) = &outer.failure {
        failure.get_or_insert_with(|| format!("outer domain at {x:?}: {reason}"));
    }

    Ok(VerificationCertificate {
        passed: failure.is_none(),
        points: outer.points,
        min_value: outer.min_value,
        min_at: outer.min_at,
        m: p.m,
        r: p.r,
        eps: p.eps,
        seconds: start.elapsed().as_secs_f64(),
        boundary_points: boundary.points,
        boundary_min_value: boundary.min_value,
        boundary_min_at: boundary.min_at,
        boundary_grid: BOUNDARY_GRID,
        origin_value,
        failure,
    })
}

/// Samples `D ≥ 0` on the sphere cap `|x| = r` inside Ω and on the three
/// bounding planes `θ = θ0 + θ1`, `θ = θ0 − θ1`, `θ = θ1 − θ0` inside the ball.
fn search_inner_boundary(p: &SearchParams, offset: f64) -> Tally {
    let mut tally = Tally::new();
    let check = |x: [f64; 3], tally: &mut Tally| match d_value(&AngleTriple::new(x[0], x[1], x[2]))
    {
        Ok(d) => {
            let d = d - offset;
            tally.record(x, d);
            if d < 0.0 {
                tally.fail(x, format!("D = {d} is negative"));
            }
        }
        Err(e) => tally.fail(x, e.to_string()),
    };

    // sphere cap: polar angle φ from the θ axis, azimuth ψ in the (θ0, θ1) plane
    let n = (0.5 * PI / BOUNDARY_GRID).ceil() as usize;
    for i in 0..=n {
        let phi = 0.5 * PI * i as f64 / n as f64;
        let (sp, cp) = phi.sin_cos();
        for j in 0..=n {
            let psi = 0.5 * PI * j as f64 / n as f64;
            let (ss, cs) = psi.sin_cos();
            let t = AngleTriple::new(p.r * sp * cs, p.r * sp * ss, p.r * cp);
            if in_omega(&t) {
                check(t.as_array(), &mut tally);
            }
        }
    }

    // planes, on a grid of spacing r·BOUNDARY_GRID in (θ0, θ1)
    let h = p.r * BOUNDARY_GRID;
    let k = (1.0 / BOUNDARY_GRID).round() as usize;
    for i in 0..=k {
        for j in 0..=k {
            if i == 0 && j == 0 {
                continue;
            }
            let (a, b) = (i as f64 * h, j as f64 * h);
            let mut planes = vec![a + b];
            if a >= b {
                planes.push(a - b);
            } else {
                planes.push(b - a);
            }
            for theta in planes {
                let t = AngleTriple::new(a, b, theta);
                if t.norm() <= p.r && in_omega(&t) {
                    check(t.as_array(), &mut tally);
                }
            }
        }
    }
    tally
}

#[derive(Clone, Copy, Debug)]
struct Tile {
    /// Lower-left corner in the (θ0, θ1) plane.
    x0: f64,
    x1: f64,
    side: f64,
}

impl Tile {
    fn center(&self) -> (f64, f64) {
        (self.x0 + 0.5 * self.side, self.x1 + 0.5 * self.side)
    }

    fn half_diagonal(&self) -> f64 {
        0.5 * self.side * SQRT_2
    }

    fn children(&self) -> [Tile; 4] {
        let s = 0.5 * self.side;
        [
            Tile {
                x0: self.x0,
                x1: self.x1,
                side: s,
            },
            Tile {
                x0: self.x0 + s,
                x1: self.x1,
                side: s,
            },
            Tile {
                x0: self.x0,
                x1: self.x1 + s,
                side: s,
            },
            Tile {
                x0: self.x0 + s,
                x1: self.x1 + s,
                side: s,
            },
        ]
    }
}

fn root_tiles() -> Vec<Tile> {
    let side = SIGMA_MAX / ROOT_TILES as f64;
    let mut tiles = Vec::with_capacity(ROOT_TILES * ROOT_TILES);
    for i in 0..ROOT_TILES {
        for j in 0..ROOT_TILES {
            tiles.push(Tile {
                x0: i as f64 * side,
                x1: j as f64 * side,
                side,
            });
        }
    }
    tiles
}

fn search_tile(p: &SearchParams, offset: f64, tile: &Tile) -> Tally {
    let mut tally = Tally::new();
    cover(p, offset, tile, 0.0, PI, &mut tally);
    tally
}

/// Covers `{x ∈ Ω ∖ B_r : (θ0, θ1) ∈ tile, θ ∈ [from, to]}` by balls centered
/// on one column above the tile, splitting the tile where the balls get too
/// small for it.
fn cover(p: &SearchParams, offset: f64, tile: &Tile, from: f64, to: f64, tally: &mut Tally) {
    // nearest tile point to the origin is the lower-left corner
    if tile.x0.hypot(tile.x1) > SIGMA_MAX {
        return;
    }
    let (cx, cy) = tile.center();
    let center_norm = cx.hypot(cy);
    let far_norm = (center_norm + tile.half_diagonal()).min(SIGMA_MAX);
    // |x|² ≤ 3(θ0² + θ1²) on Ω, so the whole prism may lie inside the ball
    if 3.0 * far_norm * far_norm < p.r * p.r {
        return;
    }
    // column anchor: the tile center pulled into the quarter disk
    let (ax, ay) = if center_norm > SIGMA_MAX {
        (cx * SIGMA_MAX / center_norm, cy * SIGMA_MAX / center_norm)
    } else {
        (cx, cy)
    };
    let radius = (cx - ax).hypot(cy - ay) + tile.half_diagonal();
    let col = Column::new(ax, ay);
    let col_lo = (ax - ay).abs();
    let col_hi = (ax + ay).min(PI);

    let sphere_floor = if far_norm < p.r {
        (p.r * p.r - far_norm * far_norm).sqrt()
    } else {
        0.0
    };
    let lo = (col_lo - SQRT_2 * radius).max(sphere_floor).max(from);
    let hi = (col_hi + SQRT_2 * radius).min(PI).min(to);
    if lo >= hi {
        return;
    }

    let scale = 1.0 / (3f64.sqrt() * p.m);
    let mut covered = lo;
    let mut guess = radius;
    while covered < hi {
        let t = (covered + guess).clamp(col_lo, col_hi);
        let x = [ax, ay, t];
        let d = match col.d(t) {
            Ok(d) => d - offset,
            Err(e) => {
                tally.fail(x, e.to_string());
                return;
            }
        };
        tally.record(x, d);
        if d < p.eps {
            tally.fail(x, format!("D = {d} is below eps"));
            return;
        }
        let rho = (d - p.eps) * scale;
        let reach = if rho > radius {
            (rho * rho - radius * radius).sqrt()
        } else {
            0.0
        };
        let fits = rho >= SPLIT_RATIO * radius;
        if fits && t - reach <= covered && t + reach > covered {
            covered = t + reach;
            guess = reach;
            continue;
        }
        if fits && t - reach > covered && t > col_lo {
            // the ball is fine but was placed too far up
            guess = 0.9 * reach.min(t - covered);
            continue;
        }
        // balls are too small for this tile around here
        if tile.half_diagonal() < STEP_FLOOR {
            tally.fail(
                x,
                format!("covering radius {rho:e} needs a step below the floor"),
            );
            return;
        }
        let until = (covered + 4.0 * radius).min(hi);
        for child in tile.children() {
            cover(p, offset, &child, covered, until, tally);
            if tally.failure.is_some() {
                return;
            }
        }
        covered = until;
        guess = radius;
    }
}

/// Writes `θ0, θ1, θ, D, Q` on a coarse grid of Ω with `n` steps per axis.
pub fn write_grid_dump<W: Write>(writer: W, n: usize) -> Result<()> {
    let n = n.max(1);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["theta0", "theta1", "theta", "D", "Q"])?;
    for i in 0..=n {
        for j in 0..=n {
            let (a, b) = (
                SIGMA_MAX * i as f64 / n as f64,
                SIGMA_MAX * j as f64 / n as f64,
            );
            if a.hypot(b) > SIGMA_MAX {
                continue;
            }
            let lo = (a - b).abs();
            let hi = (a + b).min(PI);
            for k in 0..=n {
                let t = AngleTriple::new(a, b, lo + (hi - lo) * k as f64 / n as f64);
                let d = d_value(&t)?;
                let q = q_value(&t).map_or(String::new(), |q| q.to_string());
                w.write_record([
                    a.to_string(),
                    b.to_string(),
                    t.theta.to_string(),
                    d.to_string(),
                    q,
                ])?;
                if hi == lo {
                    break;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn theta_tilde_at_origin() {
        assert_eq!(
            theta_tilde(&AngleTriple::new(0.0, 0.0, 0.0)).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(d_value(&AngleTriple::new(0.0, 0.0, 0.0)).unwrap(), 0.0);
        assert!(matches!(
            q_value(&AngleTriple::new(0.0, 0.0, 0.0)),
            Err(HermiteError::UndefinedAtOrigin)
        ));
    }

    #[test]
    fn quarter_circle_values() {
        let t = AngleTriple::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_2);
        let (a, b) = theta_tilde(&t).unwrap();
        assert!((a - FRAC_PI_8).abs() < 1e-15);
        assert!((b - FRAC_PI_8).abs() < 1e-15);
        assert!((q_value(&t).unwrap() - 0.25).abs() < 1e-15);
        let d = d_value(&t).unwrap();
        let expected = 0.9 * PI * PI / 8.0 - PI * PI / 32.0;
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.80190).abs() < 1e-4);
    }

    fn acos_forms(t: &AngleTriple) -> (f64, f64) {
        let c = (0.25 * (t.theta0 + t.theta1)).cos().powi(2);
        let (c0, c1, ct) = (t.theta0.cos(), t.theta1.cos(), t.theta.cos());
        let den00 = (16.0 * c * c + 2.0 - 2.0 * ct + 8.0 * c * (c0 - c1)).sqrt();
        let a = 18.0 * c * c + 1.0 + ct - 6.0 * c * (c0 + c1);
        let b = 8.0 * c * c + 1.0 - ct + 4.0 * c * (c0 - c1);
        (
            ((4.0 * c * c0 + 1.0 - ct) / den00).clamp(-1.0, 1.0).acos(),
            (c * (12.0 * c + c0 - 5.0 * c1) / (a.sqrt() * b.sqrt()))
                .clamp(-1.0, 1.0)
                .acos(),
        )
    }

    #[test]
    fn expansion_matches_acos_forms() {
        let mut count = 0;
        for i in 1..40 {
            for j in 1..40 {
                let (a, b) = (0.06 * i as f64, 0.06 * j as f64);
                if a.hypot(b) > SIGMA_MAX {
                    continue;
                }
                for k in 0..=10 {
                    let lo = (a - b).abs();
                    let t = AngleTriple::new(a, b, lo + ((a + b).min(PI) - lo) * k as f64 / 10.0);
                    let (x, y) = theta_tilde(&t).unwrap();
                    let (u, v) = acos_forms(&t);
                    assert!((x - u).abs() < 1e-7 && (y - v).abs() < 1e-7, "{t:?}");
                    count += 1;
                }
            }
        }
        assert!(count > 5000);
    }

    #[test]
    fn omega_membership() {
        assert!(in_omega(&AngleTriple::new(0.0, 0.0, 0.0)));
        assert!(in_omega(&AngleTriple::new(FRAC_PI_2, FRAC_PI_2, PI)));
        assert!(!in_omega(&AngleTriple::new(PI, 0.0, FRAC_PI_4)));
        assert!(!in_omega(&AngleTriple::new(0.5, 0.1, 0.3)));
        assert!(!in_omega(&AngleTriple::new(0.5, 0.1, 0.7)));
    }

    #[test]
    fn gradient_is_finite_near_origin() {
        let g = gradient_probe(&AngleTriple::new(1e-3, 1e-3, 1e-3), 1e-5).unwrap();
        assert!(g.iter().all(|x| x.is_finite()));
        assert!(g.iter().all(|x| x.abs() < 1.0));
        assert!(gradient_probe(&AngleTriple::new(0.1, 0.1, 0.1), 0.0).is_err());
    }

    #[test]
    fn gradient_matches_slope() {
        let t = AngleTriple::new(0.7, 0.4, 0.6);
        let g = gradient_probe(&t, 1e-6).unwrap();
        let h = 1e-3;
        let f = |x: f64| d_value(&AngleTriple::new(0.7, 0.4, x)).unwrap();
        let slope = (f(0.6 + h) - f(0.6 - h)) / (2.0 * h);
        assert!((g[2] - slope).abs() < 1e-5);
    }

    #[test]
    fn params_are_validated() {
        let bad = [
            SearchParams {
                m: 0.0,
                ..Default::default()
            },
            SearchParams {
                r: 0.0,
                ..Default::default()
            },
            SearchParams {
                r: 3.0,
                ..Default::default()
            },
            SearchParams {
                eps: -1.0,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(matches!(
                verify_nonnegativity(&p),
                Err(HermiteError::ParameterError(_))
            ));
        }
    }

    #[test]
    fn small_bound_search_passes() {
        let p = SearchParams {
            m: 1.0,
            r: 0.3,
            eps: DEFAULT_EPS,
        };
        let cert = verify_nonnegativity(&p).unwrap();
        assert!(cert.passed, "{:?}", cert.failure);
        assert!(cert.points > 0 && cert.boundary_points > 0);
        assert!(cert.min_value >= p.eps);
        assert_eq!(cert.origin_value, 0.0);
    }

    #[test]
    fn shifted_function_fails_with_location() {
        let p = SearchParams {
            m: 1.0,
            r: 0.3,
            eps: DEFAULT_EPS,
        };
        let cert = verify_with_offset(&p, 1, 0.5).unwrap();
        assert!(!cert.passed);
        assert!(cert.failure.is_some());
        assert!(cert.min_value < 0.0);
        assert!(in_omega(&AngleTriple::new(
            cert.min_at[0],
            cert.min_at[1],
            cert.min_at[2]
        )));
    }

    #[test]
    fn thread_count_does_not_change_certificate() {
        let p = SearchParams {
            m: 1.0,
            r: 0.3,
            eps: DEFAULT_EPS,
        };
        let a = verify_nonnegativity_threaded(&p, 1).unwrap();
        let b = verify_nonnegativity_threaded(&p, 3).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.min_value, b.min_value);
        assert_eq!(a.min_at, b.min_at);
    }

    #[test]
    fn certificate_json_fields() {
        let p = SearchParams {
            m: 1.0,
            r: 0.3,
            eps: DEFAULT_EPS,
        };
        let cert = verify_nonnegativity(&p).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        for key in [
            "passed",
            "points",
            "min_value",
            "min_at",
            "M",
            "r",
            "eps",
            "seconds",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert!(json.get("failure").is_none());
    }

    #[test]
    fn grid_dump_has_rows() {
        let mut buf = Vec::new();
        write_grid_dump(&mut buf, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta0,theta1,theta,D,Q"));
        assert!(lines.count() > 10);
    }
}
