//! Scalar fields the kernels are generic over: exact rationals, Gaussian
//! rationals, and complex doubles.

use num_bigint::BigInt;
use num_complex::Complex;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational numbers with arbitrary-precision integer parts.
pub type Rat = BigRational;
/// Rationals extended by i; closed under conjugation and exact arithmetic.
pub type GaussRat = Complex<Rat>;
/// Double-precision complex numbers.
pub type C64 = Complex<f64>;

/// A field of scalars.
///
/// `Rat` and `GaussRat` are exact, `C64` is floating point. Exact types make
/// every identity check in the crate a literal equality; the floating type is
/// entered only through [`Scalar::to_c64`].
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Complex conjugate (identity on `Rat`).
    fn conj(&self) -> Self;

    /// Embed an exact rational.
    fn from_rat(r: &Rat) -> Self;

    /// Embed a small integer.
    fn from_int(n: i64) -> Self {
        Self::from_rat(&Rat::from_integer(BigInt::from(n)))
    }

    /// Embed a quotient of small integers. `den` must be nonzero.
    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rat(&Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Magnitude estimate, used for conversions and diagnostics only.
    fn abs_est(&self) -> f64;

    /// Convert to a complex double. This is the only exact-to-float bridge.
    fn to_c64(&self) -> C64;

    /// Whether arithmetic in this type is exact.
    fn is_exact() -> bool;

    /// A square root inside the field, if one exists.
    ///
    /// For `Rat` and `GaussRat` this is `None` unless the root is again
    /// rational (respectively Gaussian rational). For `C64` it always
    /// returns the principal branch.
    fn sqrt_exact(&self) -> Option<Self>;
}

fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rat::zero());
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

impl Scalar for Rat {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn abs_est(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }

    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn is_exact() -> bool {
        true
    }

    fn sqrt_exact(&self) -> Option<Self> {
        rat_sqrt(self)
    }
}

impl Scalar for GaussRat {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn from_rat(r: &Rat) -> Self {
        Complex::new(r.clone(), Rat::zero())
    }

    fn abs_est(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re.hypot(im)
    }

    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn is_exact() -> bool {
        true
    }

    fn sqrt_exact(&self) -> Option<Self> {
        // (x + iy)^2 = re + i im: x^2 - y^2 = re, 2xy = im.
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rat_sqrt(&(-self.re.clone())).map(|s| Complex::new(Rat::zero(), s))
            } else {
                rat_sqrt(&self.re).map(|s| Complex::new(s, Rat::zero()))
            };
        }
        let norm2 = &self.re * &self.re + &self.im * &self.im;
        let n = rat_sqrt(&norm2)?;
        let two = Rat::from_integer(BigInt::from(2));
        let x2 = (&self.re + &n) / &two;
        let x = rat_sqrt(&x2)?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / &(&x * &two);
        let cand = Complex::new(x, y);
        debug_assert_eq!(&cand * &cand, *self);
        Some(cand)
    }
}

impl Scalar for C64 {
    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }

    fn from_rat(r: &Rat) -> Self {
        C64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn abs_est(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }

    fn sqrt_exact(&self) -> Option<Self> {
        Some(self.sqrt())
    }
}

/// Parse a rational from `"p"`, `"-p"`, or `"p/q"` form.
pub fn rat_from_str(s: &str) -> crate::Result<Rat> {
    let parse_int = |t: &str| -> crate::Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| crate::Error::Serialization(format!("bad integer: {t:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(crate::Error::Serialization(format!("zero denominator: {s:?}")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Render a rational as `"p"` or `"p/q"` in lowest terms.
pub fn rat_to_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt() {
        let r = Rat::new(BigInt::from(9), BigInt::from(4));
        assert_eq!(r.sqrt_exact(), Some(Rat::new(BigInt::from(3), BigInt::from(2))));
        let r = Rat::new(BigInt::from(2), BigInt::from(1));
        assert_eq!(r.sqrt_exact(), None);
        let r = Rat::new(BigInt::from(-4), BigInt::from(1));
        assert_eq!(r.sqrt_exact(), None);
    }

    #[test]
    fn gaussian_sqrt() {
        // sqrt(-9) = 3i.
        let m9 = GaussRat::from_int(-9);
        let s = m9.sqrt_exact().unwrap();
        assert_eq!(s, GaussRat::new(Rat::zero(), Rat::from_integer(BigInt::from(3))));
        // sqrt(2i) = 1 + i.
        let two_i = GaussRat::new(Rat::zero(), Rat::from_integer(BigInt::from(2)));
        let s = two_i.sqrt_exact().unwrap();
        assert_eq!(&s * &s, two_i);
        // sqrt(i) is not Gaussian rational.
        let i = GaussRat::new(Rat::zero(), Rat::one());
        assert!(i.sqrt_exact().is_none());
    }

    #[test]
    fn rat_round_trip() {
        for s in ["3", "-7/2", "0", "22/7"] {
            let r = rat_from_str(s).unwrap();
            assert_eq!(rat_to_str(&r), s);
        }
        assert!(rat_from_str("1/0").is_err());
    }
}
