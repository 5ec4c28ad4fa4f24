//! Monodromy of rational connections on the punctured plane.
//!
//! A `Connection` wraps a rational coefficient matrix `A(t)`; transport
//! solves `dphi + A phi dt = 0` along explicit paths built from line and arc
//! segments, so the monodromy around a singular point is the transport along
//! a based loop encircling it once, positively. Loops never encircle the
//! irregular point at infinity: its triviality is inferred from the product
//! of the finite-point monodromies.
//!
//! Numerical answers carry their own accounting: every transport reports an
//! accumulated local-error estimate and the Liouville residual
//! `|det M - exp(-int tr A dt)|`, and every loop is checked against a
//! clearance radius before integration starts.
//!
//! Triviality of the monodromy representation is measured in the adjoint
//! group: a loop matrix in the center of GL(n) acts trivially on ratios of
//! solutions, which is the notion of single-valuedness that characterizes
//! spectral connections. Odd-weight regular points contribute central
//! factors of -1, so the raw distance to the identity and the adjoint
//! defect are reported separately.

use crate::error::{Error, Result};
use crate::json as js;
use crate::mat::Mat;
use crate::ode::{transport_linear, OdeOptions};
use crate::opers::residue_constraint;
use crate::ratmat::RatMat;
use crate::scalar::{Rat, Scalar, C64};
use serde_json::{json, Value};

/// A rational connection matrix `A(t)` with complex coefficients.
#[derive(Clone, Debug)]
pub struct Connection {
    pub coeff: RatMat<C64>,
}

impl Connection {
    pub fn new(coeff: RatMat<C64>) -> Self {
        Connection { coeff }
    }

    pub fn dimension(&self) -> usize {
        self.coeff.dim()
    }

    /// Finite singular points, with exact duplicates already merged.
    pub fn singular_points(&self) -> Vec<C64> {
        self.coeff.singular_points()
    }

    pub fn eval(&self, t: C64) -> Mat<C64> {
        match self.coeff.eval(&t) {
            Ok(m) => m,
            Err(_) => Mat::scalar(self.dimension(), &C64::new(f64::NAN, 0.0)),
        }
    }

    pub fn residue_trace(&self, location: &C64) -> C64 {
        self.coeff.residue_at(location).trace()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dimension": self.dimension(),
            "poles": self.coeff.poles.iter().map(|p| json!({
                "location": js::c64_to_value(&p.location),
                "coefficients": p.coeffs.iter().map(cmat_to_value).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "polynomial": self.coeff.poly.iter().map(cmat_to_value).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = js::usize_from_value(js::field(v, "dimension")?)?;
        let mut a = RatMat::zero(dim);
        let poles = js::field(v, "poles")?
            .as_array()
            .ok_or_else(|| Error::Serialization("poles must be an array".into()))?;
        for p in poles {
            let loc = js::c64_from_value(js::field(p, "location")?)?;
            let coeffs = js::field(p, "coefficients")?
                .as_array()
                .ok_or_else(|| Error::Serialization("coefficients must be an array".into()))?;
            for (i, c) in coeffs.iter().enumerate() {
                a.add_pole_term(loc, i + 1, cmat_from_value(c, dim)?);
            }
        }
        let poly = js::field(v, "polynomial")?
            .as_array()
            .ok_or_else(|| Error::Serialization("polynomial must be an array".into()))?;
        for (k, c) in poly.iter().enumerate() {
            a.add_poly_term(k, cmat_from_value(c, dim)?);
        }
        a.normalize();
        Ok(Connection::new(a))
    }
}

fn cmat_to_value(m: &Mat<C64>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| js::c64_to_value(&m[(i, j)])).collect()))
            .collect(),
    )
}

fn cmat_from_value(v: &Value, dim: usize) -> Result<Mat<C64>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Serialization("matrix must be an array of rows".into()))?;
    if rows.len() != dim {
        return Err(Error::Serialization(format!("expected {dim} rows, got {}", rows.len())));
    }
    let mut m = Mat::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Serialization("matrix row must be an array".into()))?;
        if row.len() != dim {
            return Err(Error::Serialization(format!("expected {dim} columns, got {}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = js::c64_from_value(e)?;
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug)]
pub enum Segment {
    Line { from: C64, to: C64 },
    Arc { center: C64, radius: f64, from_angle: f64, to_angle: f64 },
}

impl Segment {
    pub fn point(&self, tau: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * tau,
            Segment::Arc { center, radius, from_angle, to_angle } => {
                let theta = from_angle + (to_angle - from_angle) * tau;
                center + C64::new(0.0, theta).exp() * radius
            }
        }
    }

    pub fn velocity(&self, tau: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { center, radius: _, from_angle, to_angle } => {
                let dtheta = to_angle - from_angle;
                C64::new(0.0, dtheta) * (self.point(tau) - center)
            }
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, from_angle, to_angle } => {
                Segment::Arc { center, radius, from_angle: to_angle, to_angle: from_angle }
            }
        }
    }

    /// Distance from the segment to a point, exact for lines and full
    /// circles, endpoint-conservative for partial arcs.
    pub fn distance_to(&self, q: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (q - from).norm();
                }
                let t = ((q - from) * d.conj()).re / len2;
                let t = t.clamp(0.0, 1.0);
                (q - (from + d * t)).norm()
            }
            Segment::Arc { center, radius, from_angle, to_angle } => {
                let radial = ((q - center).norm() - radius).abs();
                let span = (to_angle - from_angle).abs();
                if span >= 2.0 * std::f64::consts::PI - 1e-9 {
                    return radial;
                }
                let lo = from_angle.min(to_angle);
                let hi = from_angle.max(to_angle);
                let mut psi = (q - center).arg();
                while psi < lo {
                    psi += 2.0 * std::f64::consts::PI;
                }
                while psi - 2.0 * std::f64::consts::PI >= lo {
                    psi -= 2.0 * std::f64::consts::PI;
                }
                if psi <= hi {
                    radial
                } else {
                    let a = (q - self.point(0.0)).norm();
                    let b = (q - self.point(1.0)).norm();
                    a.min(b)
                }
            }
        }
    }
}

/// A based path assembled from segments, with a clearance radius that every
/// segment must keep from every singular point.
#[derive(Clone, Debug)]
pub struct PathPlan {
    pub base: C64,
    pub segments: Vec<Segment>,
    pub clearance: f64,
}

impl PathPlan {
    pub fn reversed(&self) -> PathPlan {
        PathPlan {
            base: self.base,
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            clearance: self.clearance,
        }
    }

    pub fn margin(&self, singularities: &[C64]) -> f64 {
        let mut margin = f64::INFINITY;
        for seg in &self.segments {
            for s in singularities {
                margin = margin.min(seg.distance_to(*s));
            }
        }
        margin
    }

    fn check(&self, singularities: &[C64]) -> Result<()> {
        let margin = self.margin(singularities);
        if margin < self.clearance {
            return Err(Error::PathClearance(format!(
                "path passes within {margin:.3e} of a singular point, clearance is {:.3e}",
                self.clearance
            )));
        }
        Ok(())
    }
}

/// Radius used for a loop when the connection has no other finite singular
/// point to set the scale. Large enough that, for the calibrated families
/// with an irregular point at infinity, a genuinely nontrivial monodromy
/// shows a defect well above the pass threshold.
const LONE_POINT_RADIUS: f64 = 12.0;

fn default_radius(singularities: &[C64], index: usize) -> f64 {
    let p = singularities[index];
    let mut nearest = f64::INFINITY;
    for (k, q) in singularities.iter().enumerate() {
        if k != index {
            nearest = nearest.min((q - p).norm());
        }
    }
    if nearest.is_finite() {
        0.5 * nearest
    } else {
        LONE_POINT_RADIUS
    }
}

fn auto_base(singularities: &[C64], max_radius: f64) -> C64 {
    let n = singularities.len() as f64;
    let centroid = singularities.iter().sum::<C64>() / n;
    let spread = singularities.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    centroid + C64::new(0.0, 2.0 * (spread + max_radius) + 1.0)
}

/// Plan a based loop around `singularities[index]`: a radial approach, one
/// positively-oriented full circle, and the approach reversed. The default
/// radius is half the distance to the nearest other singular point.
pub fn plan_loop(
    singularities: &[C64],
    index: usize,
    radius: Option<f64>,
    base: Option<C64>,
) -> Result<PathPlan> {
    if index >= singularities.len() {
        return Err(Error::InvalidParameter(format!(
            "singularity index {index} out of range for {}",
            singularities.len()
        )));
    }
    let p = singularities[index];
    let r = radius.unwrap_or_else(|| default_radius(singularities, index));
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("loop radius must be positive".into()));
    }
    for (k, q) in singularities.iter().enumerate() {
        if k != index && (q - p).norm() <= r {
            return Err(Error::InvalidParameter(format!(
                "a loop of radius {r} around singular point {index} would also encircle point {k}"
            )));
        }
    }
    let clearance = 0.4 * r;
    let explicit_base = base.is_some();
    let mut b = base.unwrap_or_else(|| auto_base(singularities, r));
    for _attempt in 0..8 {
        let theta = (b - p).arg();
        let entry = p + C64::new(0.0, theta).exp() * r;
        let plan = PathPlan {
            base: b,
            segments: vec![
                Segment::Line { from: b, to: entry },
                Segment::Arc {
                    center: p,
                    radius: r,
                    from_angle: theta,
                    to_angle: theta + 2.0 * std::f64::consts::PI,
                },
                Segment::Line { from: entry, to: b },
            ],
            clearance,
        };
        if plan.check(singularities).is_ok() {
            return Ok(plan);
        }
        if explicit_base {
            break;
        }
        b = p + (b - p) * 1.5;
    }
    Err(Error::PathClearance(format!(
        "no clear approach to singular point {index} within the attempted bases"
    )))
}

/// Transport of the fundamental solution of `dphi + A phi dt = 0` along a
/// path plan.
#[derive(Clone, Debug)]
pub struct PathTransport {
    pub matrix: Mat<C64>,
    pub error_estimate: f64,
    /// `int tr A dt` along the path.
    pub trace_integral: C64,
}

impl PathTransport {
    /// `|det(matrix) - exp(-trace_integral)|`, the Liouville residual.
    pub fn det_residual(&self) -> f64 {
        (self.matrix.det() - (-self.trace_integral).exp()).norm()
    }
}

pub fn transport(conn: &Connection, plan: &PathPlan, opts: &OdeOptions) -> Result<PathTransport> {
    plan.check(&conn.singular_points())?;
    let dim = conn.dimension();
    let mut total = Mat::<C64>::identity(dim);
    let mut error_estimate = 0.0;
    let mut log_det = C64::new(0.0, 0.0);
    for seg in &plan.segments {
        let rhs = |tau: f64| {
            let v = seg.velocity(tau);
            conn.eval(seg.point(tau)).scale(&-v)
        };
        let out = transport_linear(dim, rhs, opts)?;
        total = out.matrix.matmul(&total);
        error_estimate += out.error_estimate;
        log_det += out.log_det;
    }
    Ok(PathTransport { matrix: total, error_estimate, trace_integral: -log_det })
}

pub fn frobenius_norm(m: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Spectral norm, the largest singular value.
pub fn operator_norm(m: &Mat<C64>) -> f64 {
    let n = nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    n.singular_values().iter().fold(0.0f64, |a, &b| a.max(b))
}

fn identity_defect(m: &Mat<C64>) -> f64 {
    operator_norm(&m.sub(&Mat::identity(m.rows())))
}

fn adjoint_identity_defect(m: &Mat<C64>) -> Result<f64> {
    let inv = invert(m)?;
    Ok(identity_defect(&m.kron(&inv.transpose())))
}

fn invert(m: &Mat<C64>) -> Result<Mat<C64>> {
    let n = m.rows();
    let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let inv = na
        .try_inverse()
        .ok_or_else(|| Error::Internal("transport matrix is numerically singular".into()))?;
    Ok(Mat::from_fn(n, n, |i, j| inv[(i, j)]))
}

#[derive(Clone, Copy, Debug)]
pub struct MonodromyOptions {
    pub radius: Option<f64>,
    pub base: Option<C64>,
    /// Defect below which a monodromy matrix counts as trivial.
    pub defect_tol: f64,
    pub ode: OdeOptions,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        MonodromyOptions { radius: None, base: None, defect_tol: 1e-6, ode: OdeOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct MonodromyResult {
    pub matrix: Mat<C64>,
    /// Operator-norm distance from the identity.
    pub defect: f64,
    pub error_estimate: f64,
    /// Liouville residual of the loop transport.
    pub det_residual: f64,
    pub loop_plan: PathPlan,
}

impl MonodromyResult {
    /// Operator-norm distance of `kron(M, transpose(M^-1))` from the
    /// identity: the defect of the monodromy acting by conjugation, blind
    /// to central scalar factors.
    pub fn adjoint_defect(&self) -> Result<f64> {
        adjoint_identity_defect(&self.matrix)
    }
}

/// Monodromy around one finite singular point of the connection.
pub fn monodromy_matrix(
    conn: &Connection,
    index: usize,
    opts: &MonodromyOptions,
) -> Result<MonodromyResult> {
    let sing = conn.singular_points();
    let plan = plan_loop(&sing, index, opts.radius, opts.base)?;
    let out = transport(conn, &plan, &opts.ode)?;
    Ok(MonodromyResult {
        defect: identity_defect(&out.matrix),
        det_residual: out.det_residual(),
        matrix: out.matrix,
        error_estimate: out.error_estimate,
        loop_plan: plan,
    })
}

#[derive(Clone, Debug)]
pub struct TrivialityReport {
    pub per_point: Vec<MonodromyResult>,
    /// Adjoint defect of each loop, aligned with `per_point`. This is the
    /// quantity gated by `trivial`: a central loop matrix is a trivial
    /// monodromy even when its raw defect is large.
    pub adjoint_defects: Vec<f64>,
    /// Adjoint defect of the product of all loop matrices, taken from a
    /// common base point: the total monodromy around every finite
    /// singularity at once, which must also be trivial. This is the
    /// cross-check standing in for the never-encircled point at infinity.
    pub product_defect: f64,
    pub tol: f64,
    pub trivial: bool,
}

/// Test whether the monodromy representation is trivial: every finite-point
/// loop must act trivially in the adjoint group (central matrices pass).
/// Loops share one base point; the product of the loop matrices is the
/// transport around all finite singularities together and is reported as a
/// cross-check. The point at infinity is never encircled.
pub fn trivial_monodromy_test(conn: &Connection, opts: &MonodromyOptions) -> Result<TrivialityReport> {
    let sing = conn.singular_points();
    if sing.is_empty() {
        return Ok(TrivialityReport {
            per_point: Vec::new(),
            adjoint_defects: Vec::new(),
            product_defect: 0.0,
            tol: opts.defect_tol,
            trivial: true,
        });
    }
    let radii: Vec<f64> = (0..sing.len())
        .map(|i| opts.radius.unwrap_or_else(|| default_radius(&sing, i)))
        .collect();
    let max_radius = radii.iter().fold(0.0f64, |a, &b| a.max(b));
    let base = opts.base.unwrap_or_else(|| auto_base(&sing, max_radius));
    let mut per_point = Vec::with_capacity(sing.len());
    let mut adjoint_defects = Vec::with_capacity(sing.len());
    let mut product = Mat::<C64>::identity(conn.dimension());
    for i in 0..sing.len() {
        let one = monodromy_matrix(
            conn,
            i,
            &MonodromyOptions { radius: Some(radii[i]), base: Some(base), ..*opts },
        )?;
        product = one.matrix.matmul(&product);
        adjoint_defects.push(one.adjoint_defect()?);
        per_point.push(one);
    }
    let product_defect = adjoint_identity_defect(&product)?;
    let trivial = adjoint_defects.iter().all(|&d| d < opts.defect_tol)
        && product_defect < opts.defect_tol;
    Ok(TrivialityReport { per_point, adjoint_defects, product_defect, tol: opts.defect_tol, trivial })
}

/// The one-point rank-one connection `A = e_21 + (u11 t^-2 + u10 t^-1) e_12`.
fn one_point_sl2(u11: C64, u10: C64) -> Connection {
    let mut e12 = Mat::<C64>::zeros(2, 2);
    e12[(0, 1)] = C64::new(1.0, 0.0);
    let mut e21 = Mat::<C64>::zeros(2, 2);
    e21[(1, 0)] = C64::new(1.0, 0.0);
    let mut a = RatMat::zero(2);
    a.add_poly_term(0, e21);
    let origin = C64::new(0.0, 0.0);
    a.add_pole_term(origin, 2, e12.scale(&u11));
    a.add_pole_term(origin, 1, e12.scale(&u10));
    Connection::new(a)
}

#[derive(Clone, Copy, Debug)]
pub struct RigidityRow {
    pub u: C64,
    pub defect: f64,
    pub error_estimate: f64,
    pub pass: bool,
}

/// Scan the one-point family with second-order residue fixed by the residue
/// constraint at the given spin, over a grid of first-order residues `u`.
/// Each row records the monodromy defect at `u`; rigidity of the family
/// shows as a single passing row at `u = 0`.
pub fn rigidity_scan(
    spin: &Rat,
    grid: &[C64],
    opts: &MonodromyOptions,
) -> Result<Vec<RigidityRow>> {
    let u11 = residue_constraint(spin).to_c64();
    // The loop is planned around the marked point itself, so grid corners
    // where the coefficients happen to vanish (spin 0, u = 0) still get a
    // well-defined, trivially-passing row.
    let origin = [C64::new(0.0, 0.0)];
    let plan = plan_loop(&origin, 0, opts.radius, opts.base)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &u in grid {
        let conn = one_point_sl2(u11, u);
        let out = transport(&conn, &plan, &opts.ode)?;
        let defect = identity_defect(&out.matrix);
        rows.push(RigidityRow {
            u,
            defect,
            error_estimate: out.error_estimate,
            pass: defect < opts.defect_tol,
        });
    }
    Ok(rows)
}
