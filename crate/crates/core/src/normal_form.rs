//! Truncated formal normal forms at an irregular singular point.
//!
//! Input is a connection `d + A(w) dw` with its only finite singularity at
//! the origin, typically obtained by `ramified_pullback` from the point at
//! infinity. A diagonal shearing gauge with half-integer exponents, a
//! constant diagonalizing gauge, and a sequence of polynomial gauges
//! `I + h w^{q}` reduce it, order by order, to
//!
//! `d + (B_m w^-m + ... + B_2 w^-2 + C w^-1) dw`
//!
//! with every `B_k` diagonal. Cases needing deeper shearing than one
//! half-step lattice pass fail explicitly rather than returning a wrong
//! answer. Separation rays and sector growth classification are exact
//! trigonometry in the entries of `B_m`.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::monodromy::Connection;
use crate::scalar::C64;
use std::collections::BTreeMap;

/// A matrix Laurent series on the half-integer lattice: the key `k` holds
/// the coefficient of `w^(k/2)`. Coefficients above `tmax2` are truncated;
/// every kept coefficient is exact for exact inputs.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    dim: usize,
    tmax2: i64,
    terms: BTreeMap<i64, Mat<C64>>,
}

const COEFF_EPS: f64 = 1e-12;

impl LaurentSeries {
    pub fn zero(dim: usize, tmax2: i64) -> Self {
        LaurentSeries { dim, tmax2, terms: BTreeMap::new() }
    }

    pub fn identity(dim: usize, tmax2: i64) -> Self {
        let mut s = Self::zero(dim, tmax2);
        s.add_term(0, Mat::identity(dim));
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of `w^(key/2)`.
    pub fn coeff(&self, key: i64) -> Mat<C64> {
        self.terms.get(&key).cloned().unwrap_or_else(|| Mat::zeros(self.dim, self.dim))
    }

    pub fn add_term(&mut self, key: i64, m: Mat<C64>) {
        if key > self.tmax2 {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(|| Mat::zeros(self.dim, self.dim));
        *entry = entry.add(&m);
        if entry.max_abs_est() < COEFF_EPS {
            self.terms.remove(&key);
        }
    }

    /// Smallest key with a nonvanishing coefficient.
    pub fn leading_key(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn from_ratmat(a: &crate::ratmat::RatMat<C64>, tmax2: i64) -> Result<Self> {
        let mut s = Self::zero(a.dim(), tmax2);
        for p in &a.poles {
            if p.location.norm() > 1e-14 {
                return Err(Error::Unsupported(
                    "normal form requires the singularity at the origin".into(),
                ));
            }
            for (i, coeff) in p.coeffs.iter().enumerate() {
                s.add_term(-2 * (i as i64 + 1), coeff.clone());
            }
        }
        for (k, coeff) in a.poly.iter().enumerate() {
            s.add_term(2 * k as i64, coeff.clone());
        }
        Ok(s)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, m) in &rhs.terms {
            out.add_term(*k, m.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let minus = C64::new(-1.0, 0.0);
        LaurentSeries {
            dim: self.dim,
            tmax2: self.tmax2,
            terms: self.terms.iter().map(|(k, m)| (*k, m.scale(&minus))).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.dim, self.tmax2.min(rhs.tmax2));
        for (ka, ma) in &self.terms {
            for (kb, mb) in &rhs.terms {
                let k = ka + kb;
                if k <= out.tmax2 {
                    out.add_term(k, ma.matmul(mb));
                }
            }
        }
        out
    }

    /// Derivative in `w`: the `w^(k/2)` term maps to `(k/2) w^(k/2 - 1)`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.dim, self.tmax2);
        for (k, m) in &self.terms {
            if *k != 0 {
                out.add_term(k - 2, m.scale(&C64::new(*k as f64 / 2.0, 0.0)));
            }
        }
        out
    }

    /// Inverse of `I + H` where `H` has only positive-order terms.
    fn neumann_inverse(&self) -> Result<Self> {
        let mut h = self.clone();
        h.add_term(0, Mat::identity(self.dim).scale(&C64::new(-1.0, 0.0)));
        match h.leading_key() {
            None => return Ok(Self::identity(self.dim, self.tmax2)),
            Some(k) if k >= 1 => {}
            Some(_) => {
                return Err(Error::Internal("gauge series is not a perturbation of I".into()))
            }
        }
        let minus_h = h.neg();
        let mut out = Self::identity(self.dim, self.tmax2);
        let mut power = Self::identity(self.dim, self.tmax2);
        loop {
            power = power.mul(&minus_h);
            if power.terms.is_empty() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }

    fn conjugate_constant(&self, p: &Mat<C64>, p_inv: &Mat<C64>) -> Self {
        LaurentSeries {
            dim: self.dim,
            tmax2: self.tmax2,
            terms: self.terms.iter().map(|(k, m)| (*k, p_inv.matmul(m).matmul(p))).collect(),
        }
    }

    /// Gauge action of `g` on a connection series: `g^-1 a g + g^-1 g'`.
    fn gauged(&self, g: &Self) -> Result<Self> {
        let ginv = g.neumann_inverse()?;
        Ok(ginv.mul(&self.mul(g)).add(&ginv.mul(&g.derivative())))
    }

    pub fn max_abs_below(&self, key_limit: i64) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| **k < key_limit)
            .map(|(_, m)| m.max_abs_est())
            .fold(0.0, f64::max)
    }
}

/// The reduced data at the irregular point: diagonal irregular coefficients
/// `B_2..B_m`, the residue coefficient `C`, and the gauge chain that got
/// there (diagonal shearing exponents, a constant change of basis, and a
/// truncated polynomial tail gauge).
#[derive(Clone, Debug)]
pub struct FormalNormalForm {
    pub ramification: u32,
    /// Pole order `m` of the reduced connection; 1 means a regular
    /// singularity with no irregular coefficients.
    pub pole_order: usize,
    /// `b[k]` is `B_{k+2}`, diagonal; the last entry is the leading `B_m`.
    pub b: Vec<Mat<C64>>,
    pub c: Mat<C64>,
    /// Exponents of the diagonal shearing gauge `diag(w^shear[i])`.
    pub shear: Vec<f64>,
    pub constant_gauge: Mat<C64>,
    pub tail_gauge: LaurentSeries,
    /// Orders below this are fully normalized.
    pub truncation: usize,
    /// Largest leftover coefficient norm below the truncation order after
    /// subtracting the normal form from the gauged input.
    pub residual: f64,
}

impl FormalNormalForm {
    /// Leading irregular coefficient `B_m`, or `C` at a regular point.
    pub fn leading(&self) -> &Mat<C64> {
        self.b.last().unwrap_or(&self.c)
    }
}

/// Coordinate change `w^N = s` at the point at infinity:
/// `A(w) = N w^(N-1) A(w^N)`.
pub fn ramified_pullback(conn: &Connection, n: u32) -> Result<Connection> {
    Ok(Connection::new(conn.coeff.pullback_power(n)?))
}

fn is_nilpotent(m: &Mat<C64>) -> bool {
    let scale = m.max_abs_est().max(1.0);
    let mut p = m.clone();
    for _ in 1..m.rows() {
        p = p.matmul(m);
    }
    p.max_abs_est() < 1e-10 * scale.powi(m.rows() as i32)
}

fn is_diagonal(m: &Mat<C64>, tol: f64) -> bool {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j && m[(i, j)].norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Constant gauge diagonalizing a 2x2 leading coefficient with distinct
/// eigenvalues; identity when already diagonal; None when defective.
fn diagonalizer(m: &Mat<C64>) -> Option<(Mat<C64>, Mat<C64>)> {
    let n = m.rows();
    let scale = m.max_abs_est().max(1.0);
    if is_diagonal(m, 1e-12 * scale) {
        return Some((Mat::identity(n), Mat::identity(n)));
    }
    if n != 2 {
        return None;
    }
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = tr * tr - det.scale(4.0);
    let sq = disc.sqrt();
    if sq.norm() < 1e-10 * scale {
        return None;
    }
    let half = C64::new(0.5, 0.0);
    let eigs = [(tr + sq) * half, (tr - sq) * half];
    let mut p = Mat::zeros(2, 2);
    for (col, x) in eigs.iter().enumerate() {
        // Kernel vector of m - x: use the larger of the two row choices.
        let (v0, v1) = if m[(0, 1)].norm() + (*x - m[(0, 0)]).norm()
            >= m[(1, 0)].norm() + (*x - m[(1, 1)]).norm()
        {
            (m[(0, 1)], *x - m[(0, 0)])
        } else {
            (*x - m[(1, 1)], m[(1, 0)])
        };
        p[(0, col)] = v0;
        p[(1, col)] = v1;
    }
    let pdet = p[(0, 0)] * p[(1, 1)] - p[(0, 1)] * p[(1, 0)];
    if pdet.norm() < 1e-12 * scale * scale {
        return None;
    }
    let inv_det = C64::new(1.0, 0.0) / pdet;
    let mut p_inv = Mat::zeros(2, 2);
    p_inv[(0, 0)] = p[(1, 1)] * inv_det;
    p_inv[(0, 1)] = -p[(0, 1)] * inv_det;
    p_inv[(1, 0)] = -p[(1, 0)] * inv_det;
    p_inv[(1, 1)] = p[(0, 0)] * inv_det;
    Some((p, p_inv))
}

/// Apply the 2x2 shearing gauge `diag(w^(d/2), w^(-d/2))` where `delta2 = d`
/// counts half-steps: off-diagonal orders shift and the derivative adds a
/// traceless diagonal residue term.
fn sheared(a: &LaurentSeries, delta2: i64) -> LaurentSeries {
    let mut out = LaurentSeries::zero(a.dim, a.tmax2);
    for (k, m) in &a.terms {
        let mut diag = Mat::zeros(2, 2);
        diag[(0, 0)] = m[(0, 0)];
        diag[(1, 1)] = m[(1, 1)];
        out.add_term(*k, diag);
        let mut upper = Mat::zeros(2, 2);
        upper[(0, 1)] = m[(0, 1)];
        out.add_term(k - delta2, upper);
        let mut lower = Mat::zeros(2, 2);
        lower[(1, 0)] = m[(1, 0)];
        out.add_term(k + delta2, lower);
    }
    let mut res = Mat::zeros(2, 2);
    res[(0, 0)] = C64::new(delta2 as f64 / 4.0, 0.0);
    res[(1, 1)] = C64::new(-(delta2 as f64) / 4.0, 0.0);
    out.add_term(-2, res);
    out
}

/// Shearing candidates in half-steps of the exponent difference, smallest
/// absolute value first.
const SHEAR_CANDIDATES: [i64; 9] = [0, 1, -1, 2, -2, 3, -3, 4, -4];

struct ShearChoice {
    series: LaurentSeries,
    delta2: i64,
    constant: Mat<C64>,
}

fn find_shearing(a: &LaurentSeries) -> Result<ShearChoice> {
    let dim = a.dim;
    let candidates: &[i64] = if dim == 2 { &SHEAR_CANDIDATES } else { &SHEAR_CANDIDATES[..1] };
    for &delta2 in candidates {
        let s = if delta2 == 0 { a.clone() } else { sheared(a, delta2) };
        let Some(k0) = s.leading_key() else {
            // Zero connection: already in normal form.
            return Ok(ShearChoice {
                series: s,
                delta2,
                constant: Mat::identity(dim),
            });
        };
        if k0 % 2 != 0 {
            continue;
        }
        if k0 >= -2 {
            // Regular singularity (or no pole at all): nothing to
            // diagonalize, the residue is reported as found.
            return Ok(ShearChoice {
                series: s,
                delta2,
                constant: Mat::identity(dim),
            });
        }
        let lead = s.coeff(k0);
        if is_nilpotent(&lead) {
            continue;
        }
        if let Some((p, p_inv)) = diagonalizer(&lead) {
            return Ok(ShearChoice {
                series: s.conjugate_constant(&p, &p_inv),
                delta2,
                constant: p,
            });
        }
    }
    Err(Error::ShearingUnsupported(
        "no half-step shearing yields a diagonalizable non-nilpotent leading coefficient".into(),
    ))
}

/// Reduce a connection with its singularity at the origin to the truncated
/// formal normal form. `ramification` records the pullback degree `w^N = s`
/// used to reach this coordinate and bounds the pole order when the input
/// leading coefficient is nilpotent.
pub fn formal_normal_form(
    conn: &Connection,
    ramification: u32,
    truncation: usize,
) -> Result<FormalNormalForm> {
    if ramification == 0 {
        return Err(Error::InvalidParameter("ramification degree must be positive".into()));
    }
    if truncation == 0 {
        return Err(Error::InvalidParameter("truncation order must be positive".into()));
    }
    let dim = conn.dimension();
    // Orders below `stop2` (doubled) are normalized; the working capacity is
    // deeper because a gauge killing order q uses a monomial of order
    // q + m, whose own series effects must stay representable.
    let stop2 = 2 * truncation as i64;
    let max_pole = conn.coeff.poles.iter().map(|p| p.coeffs.len()).max().unwrap_or(0) as i64;
    let tmax2 = stop2 + 2 * max_pole + 8;
    let input = LaurentSeries::from_ratmat(&conn.coeff, tmax2)?;
    let input_leading_nilpotent = match input.leading_key() {
        Some(k0) if k0 <= -4 => is_nilpotent(&input.coeff(k0)),
        _ => false,
    };

    let choice = find_shearing(&input)?;
    let mut work = choice.series;
    let shear = if choice.delta2 == 0 {
        vec![0.0; dim]
    } else {
        vec![choice.delta2 as f64 / 4.0, -(choice.delta2 as f64) / 4.0]
    };

    let k0 = work.leading_key().unwrap_or(-2).min(-2);
    let m = (-k0 / 2) as usize;
    if input_leading_nilpotent && m as u32 > ramification {
        return Err(Error::Internal(format!(
            "pole order {m} exceeds the ramification bound {ramification} for a nilpotent leading coefficient"
        )));
    }

    let mut tail_gauge = LaurentSeries::identity(dim, tmax2);
    let mut resonance: Option<String> = None;

    if m >= 2 {
        let lead = work.coeff(k0);
        let scale = lead.max_abs_est().max(1.0);
        // Ascending cleanup: at each half-step order, kill the off-diagonal
        // part against the leading coefficient and the diagonal part (at
        // nonnegative orders) against the derivative term. Processed orders
        // stay diagonal, so later gauges never disturb them.
        let mut key = k0 + 1;
        while key < stop2 {
            let d = work.coeff(key);
            let mut h_off = Mat::zeros(dim, dim);
            let mut have_off = false;
            for i in 0..dim {
                for j in 0..dim {
                    if i == j || d[(i, j)].norm() < COEFF_EPS * scale {
                        continue;
                    }
                    let gap = lead[(i, i)] - lead[(j, j)];
                    if gap.norm() < 1e-10 * scale {
                        resonance = Some(format!(
                            "resonant leading eigenvalues block removal of the order w^{} off-diagonal term",
                            (key as f64) / 2.0
                        ));
                        break;
                    }
                    h_off[(i, j)] = -d[(i, j)] / gap;
                    have_off = true;
                }
            }
            if resonance.is_some() {
                break;
            }
            if have_off {
                let mut g = LaurentSeries::identity(dim, tmax2);
                g.add_term(key - k0, h_off);
                work = work.gauged(&g)?;
                tail_gauge = tail_gauge.mul(&g);
            }
            if key >= -1 {
                let d = work.coeff(key);
                let mut h_diag = Mat::zeros(dim, dim);
                let mut have_diag = false;
                for i in 0..dim {
                    if d[(i, i)].norm() >= COEFF_EPS * scale {
                        let power = (key + 2) as f64 / 2.0;
                        h_diag[(i, i)] = -d[(i, i)] / C64::new(power, 0.0);
                        have_diag = true;
                    }
                }
                if have_diag {
                    let mut g = LaurentSeries::identity(dim, tmax2);
                    g.add_term(key + 2, h_diag);
                    work = work.gauged(&g)?;
                    tail_gauge = tail_gauge.mul(&g);
                }
            }
            key += 1;
        }
    } else {
        // Regular singularity: the residue keeps its shape; only diagonal
        // tails can be normalized away without risking integer-exponent
        // resonances, and anything else is out of scope.
        let c = work.coeff(-2);
        let scale = work.max_abs_below(stop2).max(1.0);
        let mut key = -1;
        while key < stop2 {
            let d = work.coeff(key);
            if d.max_abs_est() >= COEFF_EPS * scale {
                if !is_diagonal(&d, COEFF_EPS * scale) || !is_diagonal(&c, COEFF_EPS * scale) {
                    resonance = Some(
                        "non-diagonal tail at a regular singular point is not normalized here"
                            .into(),
                    );
                    break;
                }
                let mut h_diag = Mat::zeros(dim, dim);
                for i in 0..dim {
                    let power = (key + 2) as f64 / 2.0;
                    h_diag[(i, i)] = -d[(i, i)] / C64::new(power, 0.0);
                }
                let mut g = LaurentSeries::identity(dim, tmax2);
                g.add_term(key + 2, h_diag);
                work = work.gauged(&g)?;
                tail_gauge = tail_gauge.mul(&g);
            }
            key += 1;
        }
    }
    if let Some(msg) = resonance {
        return Err(Error::ShearingUnsupported(msg));
    }

    // Read off the normal form and measure what remains.
    let mut b = Vec::new();
    for order in 2..=m {
        b.push(work.coeff(-2 * order as i64));
    }
    let c = work.coeff(-2);
    for (order, bk) in b.iter().enumerate() {
        let scale = bk.max_abs_est().max(1.0);
        if !is_diagonal(bk, 1e-10 * scale) {
            return Err(Error::Internal(format!(
                "irregular coefficient B_{} failed to diagonalize",
                order + 2
            )));
        }
    }
    let mut leftover = work.clone();
    for order in 2..=m {
        leftover.add_term(-2 * order as i64, work.coeff(-2 * order as i64).scale(&C64::new(-1.0, 0.0)));
    }
    leftover.add_term(-2, c.scale(&C64::new(-1.0, 0.0)));
    let residual = leftover.max_abs_below(stop2);

    Ok(FormalNormalForm {
        ramification,
        pole_order: m.max(1),
        b,
        c,
        shear,
        constant_gauge: choice.constant,
        tail_gauge,
        truncation,
        residual,
    })
}

/// Separation rays of the leading irregular coefficient, sorted in
/// `[0, 2*pi)` and labeled by the ordered index pair `(i, j)` whose
/// eigenvalue difference produced them.
#[derive(Clone, Debug)]
pub struct SeparationRaySet {
    pub rays: Vec<f64>,
    pub root_labels: Vec<(usize, usize)>,
    /// Number of index pairs with a nonzero eigenvalue difference: the ray
    /// count is `(2m - 2) * active_roots` when no rays coincide.
    pub active_roots: usize,
}

pub fn separation_rays(nf: &FormalNormalForm) -> Result<SeparationRaySet> {
    if nf.pole_order < 2 || nf.b.is_empty() {
        return Err(Error::InvalidParameter(
            "a regular singular point has no separation rays".into(),
        ));
    }
    let bm = nf.b.last().unwrap();
    let n = bm.rows();
    let m = nf.pole_order as f64;
    let tau = 2.0 * std::f64::consts::PI;
    let scale = bm.max_abs_est().max(1.0);
    let mut active_roots = 0;
    let mut labeled: Vec<(f64, (usize, usize))> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let alpha = bm[(i, i)] - bm[(j, j)];
            if alpha.norm() < 1e-12 * scale {
                continue;
            }
            active_roots += 1;
            let phi = alpha.arg();
            for k in 0..(nf.pole_order - 1) {
                for sign in [1.0, -1.0] {
                    let mut theta =
                        (phi + sign * std::f64::consts::FRAC_PI_2 + tau * k as f64) / (m - 1.0);
                    theta = theta.rem_euclid(tau);
                    labeled.push((theta, (i, j)));
                }
            }
        }
    }
    labeled.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut rays = Vec::new();
    let mut root_labels = Vec::new();
    for (theta, label) in labeled {
        let coincides = rays
            .last()
            .map(|&last: &f64| (theta - last).abs() < 1e-9)
            .unwrap_or(false)
            || (!rays.is_empty() && (theta - rays[0] - tau).abs() < 1e-9);
        if !coincides {
            rays.push(theta);
            root_labels.push(label);
        }
    }
    Ok(SeparationRaySet { rays, root_labels, active_roots })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorBehavior {
    Decaying,
    Growing,
    Neutral,
}

/// Growth of the solution ratio `exp(alpha w^(1-m) / (m-1))` along the ray
/// at angle `theta` as `w -> 0`: the sign of `Re(alpha e^(-i(m-1)theta))`
/// decides, exactly as trigonometry.
pub fn sector_behavior(alpha: C64, pole_order: usize, theta: f64) -> Result<SectorBehavior> {
    if pole_order < 2 {
        return Err(Error::InvalidParameter(
            "sector classification needs an irregular point (pole order >= 2)".into(),
        ));
    }
    let m = pole_order as f64;
    let s = (alpha * C64::new(0.0, -(m - 1.0) * theta).exp()).re;
    let tol = 1e-12 * alpha.norm().max(1.0);
    Ok(if s > tol {
        SectorBehavior::Growing
    } else if s < -tol {
        SectorBehavior::Decaying
    } else {
        SectorBehavior::Neutral
    })
}
