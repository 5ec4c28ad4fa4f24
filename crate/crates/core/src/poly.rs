//! Dense univariate polynomials over a [`Scalar`] field.

use crate::scalar::Scalar;

/// Polynomial with coefficients stored low degree first; no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![S::one()] }
    }

    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// The monomial c q^k.
    pub fn monomial(c: S, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// 1 - q^k.
    pub fn one_minus_power(k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[0] = S::one();
        coeffs[k] = coeffs[k].clone() - S::one();
        Poly::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, s: &S) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Exact division: returns `(quotient, remainder)`.
    pub fn div_rem(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero(), "division by zero polynomial");
        let dd = den.degree().unwrap();
        let lead = den.coeffs[dd].clone();
        let mut rem = self.clone();
        let mut q = vec![S::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.coeffs[rd].clone() / lead.clone();
            q[rd - dd] = c.clone();
            let shifted = Poly::monomial(c, rd - dd).mul(den);
            rem = rem.sub(&shifted);
        }
        (Poly::from_coeffs(q), rem)
    }

    /// Exact quotient when the division leaves no remainder.
    pub fn div_exact(&self, den: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(den);
        if r.is_zero() { Some(q) } else { None }
    }

    /// Coefficient list reads the same in both directions.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|k| self.coeffs[k] == self.coeffs[n - 1 - k])
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * S::from_int(k as i64))
            .collect();
        Poly::from_coeffs(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn p(cs: &[i64]) -> Poly<Rat> {
        Poly::from_coeffs(cs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn division_exact() {
        // (1 - q^6)/(1 - q^2) = 1 + q^2 + q^4.
        let num = Poly::<Rat>::one_minus_power(6);
        let den = Poly::<Rat>::one_minus_power(2);
        assert_eq!(num.div_exact(&den).unwrap(), p(&[1, 0, 1, 0, 1]));
        // (1 - q^3)/(1 - q^2) has a remainder.
        let num = Poly::<Rat>::one_minus_power(3);
        assert!(num.div_exact(&den).is_none());
    }

    #[test]
    fn palindrome_and_eval() {
        let q = p(&[1, 2, 3, 2, 1]);
        assert!(q.is_palindromic());
        assert!(!p(&[1, 2]).is_palindromic());
        assert_eq!(q.eval(&Rat::from_int(1)), Rat::from_int(9));
    }

    #[test]
    fn ring_ops() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(a.add(&b), p(&[0, 2]));
        assert_eq!(a.mul(&b).div_exact(&a).unwrap(), b);
    }
}
