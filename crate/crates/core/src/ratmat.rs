//! Matrix-valued rational functions kept in partial-fraction form.
//!
//! A value represents
//!   A(t) = sum_j P_j t^j  +  sum_p sum_{k>=1} M_{p,k} (t-p)^{-k}
//! with matrix coefficients. Sums, products, derivatives, and the coordinate
//! changes used at infinity all return the same explicit form, so pole data
//! never has to be re-extracted numerically.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::{Scalar, C64};

/// One pole: location plus coefficient matrices `coeffs[i]` of `(t-p)^{-(i+1)}`.
#[derive(Clone, Debug)]
pub struct PolePart<S: Scalar> {
    pub location: S,
    pub coeffs: Vec<Mat<S>>,
}

/// Rational matrix function in partial-fraction form.
#[derive(Clone, Debug)]
pub struct RatMat<S: Scalar> {
    dim: usize,
    pub poles: Vec<PolePart<S>>,
    /// Polynomial part: `poly[j]` multiplies `t^j`.
    pub poly: Vec<Mat<S>>,
}

fn binom_s<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let mut v: i64 = 1;
    for i in 0..k {
        v = v * (n - i) as i64 / (i + 1) as i64;
    }
    S::from_int(v)
}

/// `s^k` for signed `k`; requires `s != 0` when `k < 0`.
fn spow<S: Scalar>(s: &S, k: i64) -> S {
    let mut acc = S::one();
    for _ in 0..k.unsigned_abs() {
        acc = acc * s.clone();
    }
    if k < 0 {
        S::one() / acc
    } else {
        acc
    }
}

impl<S: Scalar> RatMat<S> {
    pub fn zero(dim: usize) -> Self {
        RatMat { dim, poles: Vec::new(), poly: Vec::new() }
    }

    pub fn constant(m: Mat<S>) -> Self {
        assert!(m.is_square());
        let dim = m.rows();
        let mut out = Self::zero(dim);
        out.add_poly_term(0, m);
        out
    }

    /// `c * I * t^exp`; negative `exp` places a pole at the origin.
    pub fn scalar_monomial(dim: usize, exp: i64, c: S) -> Self {
        let mut out = Self::zero(dim);
        let m = Mat::scalar(dim, &c);
        if exp >= 0 {
            out.add_poly_term(exp as usize, m);
        } else {
            out.add_pole_term(S::zero(), (-exp) as usize, m);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_poly_term(&mut self, power: usize, m: Mat<S>) {
        assert_eq!(m.rows(), self.dim);
        assert_eq!(m.cols(), self.dim);
        while self.poly.len() <= power {
            self.poly.push(Mat::zeros(self.dim, self.dim));
        }
        self.poly[power] = self.poly[power].add(&m);
    }

    pub fn add_pole_term(&mut self, location: S, order: usize, m: Mat<S>) {
        assert!(order >= 1);
        assert_eq!(m.rows(), self.dim);
        assert_eq!(m.cols(), self.dim);
        let part = match self.poles.iter_mut().find(|p| p.location == location) {
            Some(p) => p,
            None => {
                self.poles.push(PolePart { location, coeffs: Vec::new() });
                self.poles.last_mut().unwrap()
            }
        };
        while part.coeffs.len() < order {
            part.coeffs.push(Mat::zeros(self.dim, self.dim));
        }
        part.coeffs[order - 1] = part.coeffs[order - 1].add(&m);
    }

    /// Drops zero coefficients, empty poles, and trailing zero polynomial terms.
    pub fn normalize(&mut self) {
        for p in &mut self.poles {
            while p.coeffs.last().map_or(false, Mat::is_zero) {
                p.coeffs.pop();
            }
        }
        self.poles.retain(|p| !p.coeffs.is_empty());
        while self.poly.last().map_or(false, Mat::is_zero) {
            self.poly.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        let mut c = self.clone();
        c.normalize();
        c.poles.is_empty() && c.poly.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for p in &other.poles {
            for (i, m) in p.coeffs.iter().enumerate() {
                if !m.is_zero() {
                    out.add_pole_term(p.location.clone(), i + 1, m.clone());
                }
            }
        }
        for (j, m) in other.poly.iter().enumerate() {
            if !m.is_zero() {
                out.add_poly_term(j, m.clone());
            }
        }
        out.normalize();
        out
    }

    pub fn neg(&self) -> Self {
        let minus_one = S::zero() - S::one();
        self.scale(&minus_one)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = self.clone();
        for p in &mut out.poles {
            for m in &mut p.coeffs {
                *m = m.scale(c);
            }
        }
        for m in &mut out.poly {
            *m = m.scale(c);
        }
        out.normalize();
        out
    }

    /// Pointwise matrix product, re-expanded into partial fractions.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);

        // poly x poly
        for (j1, m1) in self.poly.iter().enumerate() {
            if m1.is_zero() {
                continue;
            }
            for (j2, m2) in other.poly.iter().enumerate() {
                if m2.is_zero() {
                    continue;
                }
                out.add_poly_term(j1 + j2, m1.matmul(m2));
            }
        }

        // pole x poly and poly x pole
        for p in &self.poles {
            for (k, m1) in p.coeffs.iter().enumerate() {
                if m1.is_zero() {
                    continue;
                }
                for (j, m2) in other.poly.iter().enumerate() {
                    if m2.is_zero() {
                        continue;
                    }
                    out.accumulate_pole_times_monomial(
                        &p.location,
                        k + 1,
                        j,
                        &m1.matmul(m2),
                    );
                }
            }
        }
        for (j, m1) in self.poly.iter().enumerate() {
            if m1.is_zero() {
                continue;
            }
            for p in &other.poles {
                for (k, m2) in p.coeffs.iter().enumerate() {
                    if m2.is_zero() {
                        continue;
                    }
                    out.accumulate_pole_times_monomial(
                        &p.location,
                        k + 1,
                        j,
                        &m1.matmul(m2),
                    );
                }
            }
        }

        // pole x pole
        for pa in &self.poles {
            for (j, m1) in pa.coeffs.iter().enumerate() {
                if m1.is_zero() {
                    continue;
                }
                for pb in &other.poles {
                    for (k, m2) in pb.coeffs.iter().enumerate() {
                        if m2.is_zero() {
                            continue;
                        }
                        out.accumulate_pole_times_pole(
                            &pa.location,
                            j + 1,
                            &pb.location,
                            k + 1,
                            &m1.matmul(m2),
                        );
                    }
                }
            }
        }

        out.normalize();
        out
    }

    /// Adds `M (t-p)^{-k} t^j` in standard form via `t = (t-p) + p`.
    fn accumulate_pole_times_monomial(&mut self, p: &S, k: usize, j: usize, m: &Mat<S>) {
        for i in 0..=j {
            let c = binom_s::<S>(j, i) * spow(p, (j - i) as i64);
            let piece = m.scale(&c);
            if piece.is_zero() {
                continue;
            }
            if i < k {
                self.add_pole_term(p.clone(), k - i, piece);
            } else {
                // (t-p)^{i-k} expanded back into powers of t
                let d = i - k;
                for r in 0..=d {
                    let mp = S::zero() - p.clone();
                    let cr = binom_s::<S>(d, r) * spow(&mp, (d - r) as i64);
                    let term = piece.scale(&cr);
                    if !term.is_zero() {
                        self.add_poly_term(r, term);
                    }
                }
            }
        }
    }

    /// Adds `M (t-p)^{-j} (t-q)^{-k}` in standard form.
    fn accumulate_pole_times_pole(&mut self, p: &S, j: usize, q: &S, k: usize, m: &Mat<S>) {
        if p == q {
            self.add_pole_term(p.clone(), j + k, m.clone());
            return;
        }
        let pq = p.clone() - q.clone();
        let qp = q.clone() - p.clone();
        for mm in 1..=j {
            let sign = if (j - mm) % 2 == 0 { S::one() } else { S::zero() - S::one() };
            let c = sign
                * binom_s::<S>(k + j - mm - 1, j - mm)
                * spow(&pq, -((k + j - mm) as i64));
            let term = m.scale(&c);
            if !term.is_zero() {
                self.add_pole_term(p.clone(), mm, term);
            }
        }
        for mm in 1..=k {
            let sign = if (k - mm) % 2 == 0 { S::one() } else { S::zero() - S::one() };
            let c = sign
                * binom_s::<S>(j + k - mm - 1, k - mm)
                * spow(&qp, -((j + k - mm) as i64));
            let term = m.scale(&c);
            if !term.is_zero() {
                self.add_pole_term(q.clone(), mm, term);
            }
        }
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for p in &self.poles {
            for (i, m) in p.coeffs.iter().enumerate() {
                if !m.is_zero() {
                    let k = (i + 1) as i64;
                    out.add_pole_term(p.location.clone(), i + 2, m.scale(&S::from_int(-k)));
                }
            }
        }
        for (j, m) in self.poly.iter().enumerate().skip(1) {
            if !m.is_zero() {
                out.add_poly_term(j - 1, m.scale(&S::from_int(j as i64)));
            }
        }
        out.normalize();
        out
    }

    /// Evaluates at a regular point; rejects pole locations.
    pub fn eval(&self, t: &S) -> Result<Mat<S>> {
        let mut acc = Mat::zeros(self.dim, self.dim);
        let mut tp = S::one();
        for m in &self.poly {
            acc = acc.add(&m.scale(&tp.clone()));
            tp = tp * t.clone();
        }
        for p in &self.poles {
            let d = t.clone() - p.location.clone();
            if d.is_zero() || (!S::is_exact() && d.abs_est() == 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "evaluation point coincides with a pole of order {}",
                    p.coeffs.len()
                )));
            }
            let inv = S::one() / d;
            let mut w = S::one();
            for m in &p.coeffs {
                w = w * inv.clone();
                acc = acc.add(&m.scale(&w.clone()));
            }
        }
        Ok(acc)
    }

    pub fn to_c64(&self) -> RatMat<C64> {
        RatMat {
            dim: self.dim,
            poles: self
                .poles
                .iter()
                .map(|p| PolePart {
                    location: p.location.to_c64(),
                    coeffs: p.coeffs.iter().map(Mat::to_c64).collect(),
                })
                .collect(),
            poly: self.poly.iter().map(Mat::to_c64).collect(),
        }
    }

    /// `A(1/s)` in standard form.
    fn reciprocal_substitution(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (j, m) in self.poly.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            if j == 0 {
                out.add_poly_term(0, m.clone());
            } else {
                out.add_pole_term(S::zero(), j, m.clone());
            }
        }
        for p in &self.poles {
            for (i, m) in p.coeffs.iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                let k = i + 1;
                if p.location.is_zero() {
                    out.add_poly_term(k, m.clone());
                } else {
                    // (1/s - p)^{-k} = s^k (-p)^{-k} (s - 1/p)^{-k}
                    let mp = S::zero() - p.location.clone();
                    let c = spow(&mp, -(k as i64));
                    let recip = S::one() / p.location.clone();
                    let mut base = Self::zero(self.dim);
                    base.add_pole_term(recip, k, m.scale(&c));
                    let mono = Self::scalar_monomial(self.dim, k as i64, S::one());
                    out = out.add(&mono.matmul(&base));
                }
            }
        }
        out.normalize();
        out
    }

    /// Connection coefficient in the coordinate `s = 1/t`: `B(s) = -s^{-2} A(1/s)`.
    pub fn at_infinity(&self) -> Self {
        let recip = self.reciprocal_substitution();
        let factor = Self::scalar_monomial(self.dim, -2, S::zero() - S::one());
        recip.matmul(&factor)
    }

    /// Substitutes `t = w^N` and multiplies by `d(w^N)/dw`, i.e.
    /// `A~(w) = N w^{N-1} A(w^N)`. Requires every pole to sit at the origin.
    pub fn pullback_power(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("ramification order must be >= 1".into()));
        }
        if self.poles.iter().any(|p| !p.location.is_zero() && !p.coeffs.iter().all(Mat::is_zero)) {
            return Err(Error::Unsupported(
                "power pullback is only defined for connections with poles at the origin".into(),
            ));
        }
        let n = n as i64;
        let nf = S::from_int(n);
        let mut out = Self::zero(self.dim);
        for (j, m) in self.poly.iter().enumerate() {
            if !m.is_zero() {
                let e = n - 1 + n * j as i64;
                out.add_poly_term(e as usize, m.scale(&nf.clone()));
            }
        }
        for p in &self.poles {
            for (i, m) in p.coeffs.iter().enumerate() {
                if !m.is_zero() {
                    let k = (i + 1) as i64;
                    let e = n - 1 - n * k;
                    if e >= 0 {
                        out.add_poly_term(e as usize, m.scale(&nf.clone()));
                    } else {
                        out.add_pole_term(S::zero(), (-e) as usize, m.scale(&nf.clone()));
                    }
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    /// Locations of genuine poles.
    pub fn singular_points(&self) -> Vec<S> {
        let mut c = self.clone();
        c.normalize();
        c.poles.iter().map(|p| p.location.clone()).collect()
    }

    pub fn pole_order_at(&self, location: &S) -> usize {
        let mut c = self.clone();
        c.normalize();
        c.poles
            .iter()
            .find(|p| &p.location == location)
            .map_or(0, |p| p.coeffs.len())
    }

    /// Coefficient of `(t - location)^{-1}`.
    pub fn residue_at(&self, location: &S) -> Mat<S> {
        self.poles
            .iter()
            .find(|p| &p.location == location)
            .and_then(|p| p.coeffs.first().cloned())
            .unwrap_or_else(|| Mat::zeros(self.dim, self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn random_ratmat(rng: &mut ChaCha20Rng, dim: usize) -> RatMat<Rat> {
        let mut a = RatMat::zero(dim);
        let locations = [r(0), r(1), r(-2)];
        for loc in &locations {
            for order in 1..=2usize {
                if rng.gen_bool(0.6) {
                    let m = Mat::from_fn(dim, dim, |_, _| r(rng.gen_range(-3..=3)));
                    a.add_pole_term(loc.clone(), order, m);
                }
            }
        }
        for j in 0..=2usize {
            if rng.gen_bool(0.6) {
                let m = Mat::from_fn(dim, dim, |_, _| r(rng.gen_range(-3..=3)));
                a.add_poly_term(j, m);
            }
        }
        a
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..8 {
            let a = random_ratmat(&mut rng, 2);
            let b = random_ratmat(&mut rng, 2);
            let c = a.matmul(&b);
            for t in [r(3), Rat::new(5.into(), 2.into()), r(-7), Rat::new(1.into(), 3.into())] {
                let lhs = c.eval(&t).unwrap();
                let rhs = a.eval(&t).unwrap().matmul(&b.eval(&t).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn sum_and_derivative_product_rule() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let a = random_ratmat(&mut rng, 2);
        let b = random_ratmat(&mut rng, 2);
        let s = a.add(&b);
        let t = Rat::new(7.into(), 3.into());
        assert_eq!(s.eval(&t).unwrap(), a.eval(&t).unwrap().add(&b.eval(&t).unwrap()));

        let lhs = a.matmul(&b).derivative();
        let rhs = a.derivative().matmul(&b).add(&a.matmul(&b.derivative()));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn derivative_of_simple_pole() {
        let mut a = RatMat::zero(2);
        let m = Mat::from_rows(vec![vec![r(1), r(2)], vec![r(0), r(1)]]);
        a.add_pole_term(r(1), 2, m.clone());
        let d = a.derivative();
        assert_eq!(d.pole_order_at(&r(1)), 3);
        let mut expect = RatMat::zero(2);
        expect.add_pole_term(r(1), 3, m.scale(&r(-2)));
        assert!(d.sub(&expect).is_zero());
    }

    #[test]
    fn evaluation_at_pole_is_rejected() {
        let mut a = RatMat::zero(1);
        a.add_pole_term(r(2), 1, Mat::scalar(1, &r(1)));
        assert!(a.eval(&r(2)).is_err());
        assert!(a.eval(&r(3)).is_ok());
    }

    #[test]
    fn infinity_coordinate_matches_substitution() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..4 {
            // avoid a pole at 0 so that 1/s sweeps regular points easily
            let mut a = random_ratmat(&mut rng, 2);
            a.poles.retain(|p| !p.location.is_zero());
            let b = a.at_infinity();
            for s in [r(3), Rat::new(1.into(), 5.into()), r(-2)] {
                let inv = Rat::from_integer(1.into()) / s.clone();
                let lhs = b.eval(&s).unwrap();
                let factor = r(-1) / (s.clone() * s.clone());
                let rhs = a.eval(&inv).unwrap().scale(&factor);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn power_pullback_reference_cases() {
        // c s^{-1} with N = 3 becomes 3c w^{-1}
        let mut a = RatMat::zero(1);
        a.add_pole_term(r(0), 1, Mat::scalar(1, &r(5)));
        let b = a.pullback_power(3).unwrap();
        let mut expect = RatMat::zero(1);
        expect.add_pole_term(r(0), 1, Mat::scalar(1, &r(15)));
        assert!(b.sub(&expect).is_zero());

        // N = 1 leaves any connection unchanged
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let mut a = random_ratmat(&mut rng, 2);
        a.poles.retain(|p| p.location.is_zero());
        let b = a.pullback_power(1).unwrap();
        assert!(b.sub(&a).is_zero());

        // poles away from the origin are rejected
        let mut c = RatMat::zero(1);
        c.add_pole_term(r(1), 1, Mat::scalar(1, &r(1)));
        assert!(c.pullback_power(2).is_err());
    }

    #[test]
    fn quadratic_irregular_pullback() {
        // A(s) = s^{-2} E21 + (lam(lam+1) + a^2 s^{-1}) E12 with lam = 1, a^2 = 9;
        // the degree-two cover t = w^2 gives
        // 2 w^{-3} E21 + (4 w + 18 w^{-1}) E12.
        let e12 = Mat::unit_entry(2, 0, 1, r(1));
        let e21 = Mat::unit_entry(2, 1, 0, r(1));
        let mut a = RatMat::zero(2);
        a.add_pole_term(r(0), 2, e21.clone());
        a.add_poly_term(0, e12.scale(&r(2)));
        a.add_pole_term(r(0), 1, e12.scale(&r(9)));
        let b = a.pullback_power(2).unwrap();

        let mut expect = RatMat::zero(2);
        expect.add_pole_term(r(0), 3, e21.scale(&r(2)));
        expect.add_poly_term(1, e12.scale(&r(4)));
        expect.add_pole_term(r(0), 1, e12.scale(&r(18)));
        assert!(b.sub(&expect).is_zero());
    }

    #[test]
    fn residues_and_pole_orders() {
        let mut a = RatMat::zero(2);
        let m1 = Mat::scalar(2, &r(3));
        let m2 = Mat::unit_entry(2, 0, 1, r(4));
        a.add_pole_term(r(1), 1, m1.clone());
        a.add_pole_term(r(1), 2, m2.clone());
        assert_eq!(a.pole_order_at(&r(1)), 2);
        assert_eq!(a.residue_at(&r(1)), m1);
        assert_eq!(a.pole_order_at(&r(5)), 0);
        assert!(a.residue_at(&r(5)).is_zero());
    }
}
