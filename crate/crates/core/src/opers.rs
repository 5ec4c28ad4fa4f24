//! Coordinates on spaces of opers with regular singularities at marked
//! points and one irregular singularity at infinity.
//!
//! An oper space is indexed by a simple type, marked points `z_1..z_N`, and a
//! shift element recorded through its canonical invariants. Its coordinates
//! are `u_{j,n}^{(i)}` with `j` running over the fundamental invariants,
//! `n = 0..=d_j` over the pole depth at `z_i`, and `deg u_{j,n} = j - n`. The
//! total count is `(dim g + rank g) / 2` per marked point.
//!
//! For `sl_2` the space is realized concretely: a point gives the first-order
//! system `A(t) = e_21 + v(t) e_12` with
//! `v(t) = sum_i (u_{1,1}^{(i)} (t - z_i)^{-2} + u_{1,0}^{(i)} (t - z_i)^{-1}) + mubar_1`,
//! and the local Frobenius analysis at each marked point is exact. Other
//! types are supported at the level of coordinate and relation counting only.

use crate::error::{Error, Result};
use crate::gaudin::check_distinct;
use crate::json as js;
use crate::mat::Mat;
use crate::modules::{build_irreducible, principal_grading_character};
use crate::poly::Poly;
use crate::quantum::is_regular_element;
use crate::ratmat::RatMat;
use crate::roots::{coroot_pairing, q_weyl_dimension, weyl_dim, RootSystemData, Series, TypeLabel, Weight};
use crate::scalar::{Rat, Scalar, C64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

/// One coordinate `u_{j,n}` attached to the marked point `site`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CoordIndex {
    /// Index of the fundamental invariant, `1..=rank`.
    pub j: usize,
    /// Pole depth offset, `0..=d_j`.
    pub n: usize,
    pub site: usize,
    /// Grading degree `j - n`.
    pub degree: i64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct OperSpace {
    pub type_label: TypeLabel,
    pub z: Vec<Rat>,
    /// Canonical invariants of the shift element, `mubar_1..mubar_rank`.
    pub mu_canonical: Vec<Rat>,
    /// Exponents `d_1 <= ... <= d_rank` of the type.
    pub exponents: Vec<usize>,
    /// Site-major, then by invariant, then by depth.
    pub coordinates: Vec<CoordIndex>,
}

impl OperSpace {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn num_sites(&self) -> usize {
        self.z.len()
    }

    pub fn coordinate_count(&self) -> usize {
        self.coordinates.len()
    }

    pub fn index_of(&self, site: usize, j: usize, n: usize) -> Option<usize> {
        self.coordinates
            .iter()
            .position(|c| c.site == site && c.j == j && c.n == n)
    }

    /// Column label for tables: `u[j,n]`, with an `@site` suffix when there
    /// is more than one marked point.
    pub fn coordinate_label(&self, idx: usize) -> String {
        let c = &self.coordinates[idx];
        if self.num_sites() > 1 {
            format!("u[{},{}]@{}", c.j, c.n, c.site)
        } else {
            format!("u[{},{}]", c.j, c.n)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": self.type_label.to_string(),
            "z": js::rat_vec_to_value(&self.z),
            "mu_canonical": js::rat_vec_to_value(&self.mu_canonical),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let label = TypeLabel::parse(
            js::field(v, "type")?
                .as_str()
                .ok_or_else(|| Error::Serialization("type must be a string".into()))?,
        )?;
        let z = js::rat_vec_from_value(js::field(v, "z")?)?;
        let mu_canonical = js::rat_vec_from_value(js::field(v, "mu_canonical")?)?;
        oper_space_unchecked(label, &z, mu_canonical)
    }
}

/// A point of an oper space: one value per coordinate, in coordinate order.
#[derive(Clone, PartialEq, Debug)]
pub struct OperPoint<S: Scalar> {
    pub space: OperSpace,
    pub values: Vec<S>,
}

impl<S: Scalar> OperPoint<S> {
    pub fn new(space: OperSpace, values: Vec<S>) -> Result<Self> {
        if values.len() != space.coordinate_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} coordinates",
                values.len(),
                space.coordinate_count()
            )));
        }
        Ok(OperPoint { space, values })
    }

    pub fn value(&self, site: usize, j: usize, n: usize) -> Result<&S> {
        self.space
            .index_of(site, j, n)
            .map(|i| &self.values[i])
            .ok_or_else(|| {
                Error::InvalidParameter(format!("no coordinate u[{j},{n}] at site {site}"))
            })
    }
}

impl OperPoint<Rat> {
    pub fn to_json(&self) -> Value {
        json!({
            "space": self.space.to_json(),
            "values": js::rat_vec_to_value(&self.values),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let space = OperSpace::from_json(js::field(v, "space")?)?;
        let values = js::rat_vec_from_value(js::field(v, "values")?)?;
        OperPoint::new(space, values)
    }
}

impl OperPoint<C64> {
    pub fn to_json(&self) -> Value {
        json!({
            "space": self.space.to_json(),
            "values": self.values.iter().map(js::c64_to_value).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let space = OperSpace::from_json(js::field(v, "space")?)?;
        let values = js::field(v, "values")?
            .as_array()
            .ok_or_else(|| Error::Serialization("values must be an array".into()))?
            .iter()
            .map(js::c64_from_value)
            .collect::<Result<Vec<_>>>()?;
        OperPoint::new(space, values)
    }
}

fn oper_space_unchecked(label: TypeLabel, z: &[Rat], mu_canonical: Vec<Rat>) -> Result<OperSpace> {
    let rsd = RootSystemData::build(label)?;
    if mu_canonical.len() != rsd.rank() {
        return Err(Error::DimensionMismatch(format!(
            "{} canonical invariants for rank {}",
            mu_canonical.len(),
            rsd.rank()
        )));
    }
    let exponents: Vec<usize> = rsd
        .exponents
        .iter()
        .map(|&d| d.to_usize().expect("positive exponent"))
        .collect();
    let mut coordinates = Vec::new();
    for site in 0..z.len() {
        for (jm1, &d) in exponents.iter().enumerate() {
            let j = jm1 + 1;
            for n in 0..=d {
                coordinates.push(CoordIndex { j, n, site, degree: j as i64 - n as i64 });
            }
        }
    }
    let dim = rsd.rank() + 2 * rsd.positive_roots.len();
    debug_assert_eq!(coordinates.len(), (dim + rsd.rank()) / 2 * z.len());
    Ok(OperSpace {
        type_label: label,
        z: z.to_vec(),
        mu_canonical,
        exponents,
        coordinates,
    })
}

/// Invariants of the shift element on the trace-projected part, without the
/// regularity gate. `canonical_mu` is the public, gated entry point.
fn invariant_coefficients(mu: &Mat<Rat>) -> Vec<Rat> {
    let n = mu.rows();
    let mean = mu.trace() / Rat::from_int(n as i64);
    let centred = mu.sub(&Mat::scalar(n, &mean));
    let doubled = centred.scale(&Rat::from_int(2 * n as i64));
    let p = doubled.char_poly();
    (1..n).map(|j| -p.coeff(n - 1 - j)).collect()
}

/// Canonical invariants `mubar_1..mubar_{n-1}` of a regular shift element of
/// `gl_n`, as the signed characteristic coefficients of `2n` times its
/// traceless part. They are conjugation invariant, vanish identically on a
/// principal nilpotent, and for `diag(a, -a)` give `mubar_1 = 16 a^2`. The
/// factor matches the normalization of the quantum family, where the shift
/// pairs with the generators through `2n` times the trace form.
///
/// Non-regular elements are rejected: the canonical form is only a complete
/// invariant on the regular locus.
pub fn canonical_mu(mu: &Mat<Rat>) -> Result<Vec<Rat>> {
    if !mu.is_square() || mu.rows() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "shift element must be square of size at least 2, got {}x{}",
            mu.rows(),
            mu.cols()
        )));
    }
    if !is_regular_element(mu) {
        return Err(Error::NonRegularShift);
    }
    Ok(invariant_coefficients(mu))
}

/// Build the coordinate space of opers for a type-A label, marked points `z`,
/// and a regular shift element.
pub fn build_oper_space(label: TypeLabel, z: &[Rat], mu: &Mat<Rat>) -> Result<OperSpace> {
    if label.series != Series::A {
        return Err(Error::NonASeriesModule);
    }
    if z.is_empty() {
        return Err(Error::InvalidParameter("need at least one marked point".into()));
    }
    check_distinct(z)?;
    let n = label.rank + 1;
    if (mu.rows(), mu.cols()) != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "shift element is {}x{}, type {} needs {}x{}",
            mu.rows(),
            mu.cols(),
            label,
            n,
            n
        )));
    }
    let mu_canonical = canonical_mu(mu)?;
    oper_space_unchecked(label, z, mu_canonical)
}

/// The fixed second-order residue `lambda (lambda + 1)` attached to a spin
/// `lambda`. It sits a quarter below the square `(lambda + 1/2)^2`, so the
/// local Frobenius exponents are `-lambda` and `lambda + 1`, with difference
/// `2 lambda + 1`.
pub fn residue_constraint(lambda: &Rat) -> Rat {
    lambda * &(lambda + Rat::one())
}

/// The residue constraint at one marked point, keyed by its spin.
#[derive(Clone, PartialEq, Debug)]
pub struct ResidueConstraint {
    pub lambda: Rat,
    pub value: Rat,
}

impl ResidueConstraint {
    pub fn for_spin(lambda: &Rat) -> Self {
        ResidueConstraint { lambda: lambda.clone(), value: residue_constraint(lambda) }
    }
}

/// Degrees `<alpha^vee, lambda + rho>` over the positive roots, sorted
/// ascending. At `lambda = 0` these are the coroot heights.
pub fn relation_degrees(rsd: &RootSystemData, lambda: &Weight) -> Result<Vec<u64>> {
    if !lambda.is_dominant_integral() {
        return Err(Error::NonDominantWeight(format!("{:?}", lambda.coords)));
    }
    let lam_rho = lambda.add(&rsd.rho);
    let mut out = Vec::with_capacity(rsd.positive_roots.len());
    for k in 0..rsd.positive_roots.len() {
        let x = coroot_pairing(rsd, &rsd.coroots[k], &lam_rho)?;
        let d = x
            .is_integer()
            .then(|| x.to_integer().to_u64())
            .flatten()
            .ok_or_else(|| Error::Internal("pairing with a dominant weight must be a positive integer".into()))?;
        out.push(d);
    }
    out.sort_unstable();
    Ok(out)
}

/// Hilbert series `prod (1 - q^{<a^vee, l + rho>}) / prod (1 - q^{<a^vee, rho>})`
/// of the graded quotient ring attached to `lambda`, with its Gorenstein
/// properties enforced: the quotient must divide exactly, agree with the
/// principal character, have nonnegative coefficients, be palindromic, and
/// sum to the Weyl dimension at `q = 1`. For type A and moderate dimension
/// the series is also cross-checked against the principal grading of the
/// irreducible module itself.
pub fn gorenstein_series_check(rsd: &RootSystemData, lambda: &Weight) -> Result<Poly<Rat>> {
    let fail = |msg: &str| Error::Internal(format!("graded series check failed: {msg}"));
    let num_degrees = relation_degrees(rsd, lambda)?;
    let den_degrees = relation_degrees(rsd, &Weight::zero(rsd.rank()))?;
    let mut num = Poly::<Rat>::one();
    for &d in &num_degrees {
        num = num.mul(&Poly::one_minus_power(d as usize));
    }
    let mut den = Poly::<Rat>::one();
    for &d in &den_degrees {
        den = den.mul(&Poly::one_minus_power(d as usize));
    }
    let series = num.div_exact(&den).ok_or_else(|| fail("quotient is not polynomial"))?;
    if series != q_weyl_dimension(rsd, lambda)? {
        return Err(fail("series disagrees with the principal character"));
    }
    if series.coeffs().iter().any(|c| c.is_negative()) {
        return Err(fail("negative coefficient"));
    }
    if !series.is_palindromic() {
        return Err(fail("series is not palindromic"));
    }
    let dim = weyl_dim(rsd, lambda)?;
    if series.eval(&Rat::one()) != Rat::from_int(dim as i64) {
        return Err(fail("series does not sum to the module dimension"));
    }
    if rsd.type_label.series == Series::A && dim <= 4000 {
        let module = build_irreducible(rsd.type_label, lambda)?;
        if series != principal_grading_character(&module) {
            return Err(fail("series disagrees with the module grading"));
        }
    }
    Ok(series)
}

fn require_sl2(space: &OperSpace) -> Result<()> {
    if space.type_label != (TypeLabel { series: Series::A, rank: 1 }) {
        return Err(Error::Unsupported(format!(
            "realized only for type A1, got {}",
            space.type_label
        )));
    }
    Ok(())
}

fn sl2_site_values<S: Scalar>(point: &OperPoint<S>, site: usize) -> Result<(S, S)> {
    let u10 = point.value(site, 1, 0)?.clone();
    let u11 = point.value(site, 1, 1)?.clone();
    Ok((u10, u11))
}

/// The first-order system `A(t) = e_21 + v(t) e_12` of an `sl_2` oper point,
/// with `v(t) = sum_i (u_{1,1}^{(i)} (t - z_i)^{-2} + u_{1,0}^{(i)} (t - z_i)^{-1}) + mubar_1`.
pub fn sl2_oper_connection<S: Scalar>(point: &OperPoint<S>) -> Result<RatMat<S>> {
    require_sl2(&point.space)?;
    let mut e12 = Mat::<S>::zeros(2, 2);
    e12[(0, 1)] = S::one();
    let mut e21 = Mat::<S>::zeros(2, 2);
    e21[(1, 0)] = S::one();
    let mut a = RatMat::zero(2);
    a.add_poly_term(0, e21);
    let mubar = S::from_rat(&point.space.mu_canonical[0]);
    if !mubar.is_zero() {
        a.add_poly_term(0, e12.scale(&mubar));
    }
    for (i, zi) in point.space.z.iter().enumerate() {
        let (u10, u11) = sl2_site_values(point, i)?;
        let loc = S::from_rat(zi);
        if !u11.is_zero() {
            a.add_pole_term(loc.clone(), 2, e12.scale(&u11));
        }
        if !u10.is_zero() {
            a.add_pole_term(loc, 1, e12.scale(&u10));
        }
    }
    Ok(a)
}

/// Map a joint eigenvalue tuple of the quadratic Hamiltonians to an `sl_2`
/// oper point. `weights[i]` is the highest weight of the `i`-th tensor
/// factor, `eigenvalues[i]` the eigenvalue of the `i`-th Hamiltonian on the
/// chosen joint eigenvector.
///
/// The second-order residue at `z_i` is pinned by the residue constraint at
/// spin `weights[i] / 2`, and the first-order residue is linear in the
/// eigenvalue, `u_{1,0}^{(i)} = 4 E_i`. The normalization is frozen against
/// two exact families: the trivial tensor module, where every coordinate must
/// vanish, and the two-point rank-one module with a rational Cartan shift,
/// where the local no-logarithm conditions must cut out exactly the joint
/// spectrum. The shift element enters only through its canonical invariants,
/// which are defined for every traceless matrix here, including non-regular
/// ones: the homogeneous limit is the zero shift.
pub fn sl2_spectrum_to_oper<S: Scalar>(
    weights: &[i64],
    z: &[Rat],
    mu: &Mat<Rat>,
    eigenvalues: &[S],
) -> Result<OperPoint<S>> {
    if weights.len() != z.len() || eigenvalues.len() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights and {} eigenvalues for {} marked points",
            weights.len(),
            eigenvalues.len(),
            z.len()
        )));
    }
    if z.is_empty() {
        return Err(Error::InvalidParameter("need at least one marked point".into()));
    }
    if weights.iter().any(|&w| w < 0) {
        return Err(Error::NonDominantWeight(format!("{weights:?}")));
    }
    check_distinct(z)?;
    if (mu.rows(), mu.cols()) != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "shift element is {}x{}, need 2x2",
            mu.rows(),
            mu.cols()
        )));
    }
    if !mu.trace().is_zero() {
        return Err(Error::InvalidParameter("shift element must be traceless".into()));
    }
    let label = TypeLabel { series: Series::A, rank: 1 };
    let space = oper_space_unchecked(label, z, invariant_coefficients(mu))?;
    let mut values = Vec::with_capacity(2 * z.len());
    let four = S::from_int(4);
    for i in 0..z.len() {
        let lam = Rat::from_int(weights[i]);
        let u11 = residue_constraint(&(lam / Rat::from_int(2)));
        values.push(four.clone() * eigenvalues[i].clone());
        values.push(S::from_rat(&u11));
    }
    OperPoint::new(space, values)
}

/// Exact obstruction to a logarithm-free Frobenius solution at marked point
/// `site` of an `sl_2` oper point.
///
/// Around `z_i` the scalar form of the system is `y'' = v(t) y` with
/// `v = L tau^-2 + w tau^-1 + sum_m a_m tau^m`, `tau = t - z_i`. The
/// exponents are the roots of `r (r - 1) = L`; their difference `D` must be a
/// positive integer here, and the recursion from the lower exponent
/// `r = (1 - D) / 2`,
/// `c_k ((r + k)(r + k - 1) - L) = w c_{k-1} + sum_m a_m c_{k-2-m}`,
/// pins every coefficient until `k = D`, where the left side vanishes. The
/// returned value is the right side at that step: the point is free of local
/// logarithms, hence of local monodromy, exactly when it is zero.
pub fn sl2_log_obstruction(point: &OperPoint<Rat>, site: usize) -> Result<Rat> {
    require_sl2(&point.space)?;
    let sites = point.space.num_sites();
    if site >= sites {
        return Err(Error::InvalidParameter(format!(
            "site {site} out of range for {sites} marked points"
        )));
    }
    let (w, lam) = {
        let (u10, u11) = sl2_site_values(point, site)?;
        (u10, u11)
    };
    let disc = Rat::one() + Rat::from_int(4) * &lam;
    let s = disc.sqrt_exact().ok_or_else(|| {
        Error::ExactSqrtUnavailable(format!(
            "exponent difference at site {site}: 1 + 4 u[1,1] = {disc} is not a rational square"
        ))
    })?;
    if !s.is_integer() || s.is_zero() {
        return Err(Error::InvalidParameter(format!(
            "exponent difference {s} at site {site} is not a positive integer"
        )));
    }
    let delta = s
        .to_integer()
        .to_usize()
        .ok_or_else(|| Error::InvalidParameter("exponent difference overflows".into()))?;
    let r = (Rat::one() - &s) / Rat::from_int(2);

    // Taylor tail of v at z_site: the double and simple poles of the other
    // sites, re-expanded, plus the constant term.
    let mut tail = vec![Rat::zero(); delta.saturating_sub(1)];
    if !tail.is_empty() {
        tail[0] = point.space.mu_canonical[0].clone();
        for k in 0..sites {
            if k == site {
                continue;
            }
            let (u10_k, u11_k) = sl2_site_values(point, k)?;
            let d = &point.space.z[site] - &point.space.z[k];
            let mut inv_pow = (Rat::one() / &d) * (Rat::one() / &d);
            for (m, slot) in tail.iter_mut().enumerate() {
                // (tau + d)^-2 = sum_m (-1)^m (m+1) d^{-m-2} tau^m and
                // (tau + d)^-1 = sum_m (-1)^m d^{-m-1} tau^m.
                let sign = if m % 2 == 0 { Rat::one() } else { -Rat::one() };
                let second = &sign * Rat::from_int(m as i64 + 1) * &inv_pow * &u11_k;
                let first = sign * &d * &inv_pow * &u10_k;
                *slot += second + first;
                inv_pow = inv_pow / &d;
            }
        }
    }

    let mut c = vec![Rat::one()];
    for k in 1..=delta {
        let kk = Rat::from_int(k as i64);
        let mut rhs = &w * &c[k - 1];
        for m in 0..k.saturating_sub(1) {
            rhs += &tail[m] * &c[k - 2 - m];
        }
        if k == delta {
            return Ok(rhs);
        }
        let denom = (&r + &kk) * (&r + &kk - Rat::one()) - &lam;
        debug_assert!(!denom.is_zero());
        c.push(rhs / denom);
    }
    unreachable!("loop returns at k = delta");
}

/// True when every marked point of an `sl_2` oper point is free of local
/// logarithms, i.e. the local monodromy at each marked point is trivial.
pub fn sl2_log_free(point: &OperPoint<Rat>) -> Result<bool> {
    for site in 0..point.space.num_sites() {
        if !sl2_log_obstruction(point, site)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaudin::inhomogeneous_hamiltonians;
    use crate::modules::TensorModule;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_frac(n, d)
    }

    fn diag2(a: Rat) -> Mat<Rat> {
        let mut m = Mat::zeros(2, 2);
        m[(0, 0)] = a.clone();
        m[(1, 1)] = -a;
        m
    }

    fn nilpotent2() -> Mat<Rat> {
        let mut f = Mat::zeros(2, 2);
        f[(1, 0)] = Rat::one();
        f
    }

    fn a1() -> TypeLabel {
        TypeLabel::parse("A1").unwrap()
    }

    fn zs(vals: &[i64]) -> Vec<Rat> {
        vals.iter().map(|&v| Rat::from_int(v)).collect()
    }

    #[test]
    fn coordinate_counts_match_the_flag_dimension() {
        let s = build_oper_space(a1(), &zs(&[0]), &nilpotent2()).unwrap();
        assert_eq!(s.coordinate_count(), 2);
        let degrees: Vec<i64> = s.coordinates.iter().map(|c| c.degree).collect();
        assert_eq!(degrees, vec![1, 0]);
        assert_eq!(s.coordinate_label(0), "u[1,0]");

        let mut m3 = Mat::<Rat>::zeros(3, 3);
        m3[(0, 0)] = Rat::one();
        m3[(2, 2)] = -Rat::one();
        let s3 = build_oper_space(TypeLabel::parse("A2").unwrap(), &zs(&[0]), &m3).unwrap();
        assert_eq!(s3.coordinate_count(), 5);
        let mut degrees: Vec<i64> = s3.coordinates.iter().map(|c| c.degree).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![0, 0, 1, 1, 2]);

        let s33 = build_oper_space(a1(), &zs(&[0, 1, 2]), &diag2(Rat::one())).unwrap();
        assert_eq!(s33.coordinate_count(), 6);
        assert_eq!(s33.coordinate_label(5), "u[1,1]@2");

        assert!(matches!(
            build_oper_space(a1(), &zs(&[1, 1]), &diag2(Rat::one())),
            Err(Error::CoincidentPoints)
        ));
        assert!(matches!(
            build_oper_space(TypeLabel::parse("B2").unwrap(), &zs(&[0]), &diag2(Rat::one())),
            Err(Error::NonASeriesModule)
        ));
        assert!(matches!(
            build_oper_space(a1(), &zs(&[0]), &Mat::zeros(3, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn canonical_invariants_of_the_shift() {
        // diag(a, -a) doubles to diag(4a, -4a), whose characteristic
        // polynomial is t^2 - 16 a^2.
        assert_eq!(canonical_mu(&diag2(rat(3, 16))).unwrap(), vec![rat(9, 16)]);
        assert_eq!(canonical_mu(&nilpotent2()).unwrap(), vec![Rat::zero()]);

        let mut m3 = Mat::<Rat>::zeros(3, 3);
        m3[(0, 0)] = Rat::from_int(1);
        m3[(1, 1)] = Rat::from_int(2);
        m3[(2, 2)] = Rat::from_int(-3);
        let inv = canonical_mu(&m3).unwrap();
        assert_eq!(inv, vec![Rat::from_int(252), Rat::from_int(-1296)]);

        // Invariance under conjugation by I + E_01.
        let mut g = Mat::<Rat>::identity(3);
        g[(0, 1)] = Rat::from_int(5);
        let mut g_inv = Mat::<Rat>::identity(3);
        g_inv[(0, 1)] = Rat::from_int(-5);
        let conj = g.matmul(&m3).matmul(&g_inv);
        assert_eq!(canonical_mu(&conj).unwrap(), inv);

        // Only the traceless part matters.
        let shifted = m3.add(&Mat::scalar(3, &Rat::from_int(7)));
        assert_eq!(canonical_mu(&shifted).unwrap(), inv);

        assert!(matches!(canonical_mu(&Mat::zeros(2, 2)), Err(Error::NonRegularShift)));
    }

    #[test]
    fn residue_constraint_values() {
        assert_eq!(residue_constraint(&Rat::zero()), Rat::zero());
        assert_eq!(residue_constraint(&Rat::one()), Rat::from_int(2));
        assert_eq!(residue_constraint(&Rat::from_int(3)), Rat::from_int(12));
        let rc = ResidueConstraint::for_spin(&rat(1, 2));
        assert_eq!(rc.value, rat(3, 4));

        // The constraint sits a quarter below the square of the half-sum of
        // exponents: for a weight-w module, spin w/2, the residue plus 1/4 is
        // ((w + 1) / 2)^2.
        for w in 0..=6i64 {
            let u11 = residue_constraint(&rat(w, 2));
            let half = rat(w + 1, 2);
            assert_eq!(u11 + rat(1, 4), &half * &half);
        }
    }

    #[test]
    fn relation_degree_multisets() {
        let a1 = RootSystemData::build(TypeLabel::parse("A1").unwrap()).unwrap();
        assert_eq!(relation_degrees(&a1, &Weight::from_ints(&[2])).unwrap(), vec![3]);

        let a2 = RootSystemData::build(TypeLabel::parse("A2").unwrap()).unwrap();
        assert_eq!(relation_degrees(&a2, &Weight::zero(2)).unwrap(), vec![1, 1, 2]);
        assert_eq!(relation_degrees(&a2, &Weight::from_ints(&[1, 1])).unwrap(), vec![2, 2, 4]);

        // At lambda = 0 the degrees are the coroot heights, i.e. the heights
        // of the positive roots of the dual system.
        let b2 = RootSystemData::build(TypeLabel::parse("B2").unwrap()).unwrap();
        assert_eq!(relation_degrees(&b2, &Weight::zero(2)).unwrap(), vec![1, 1, 2, 3]);

        assert!(matches!(
            relation_degrees(&a1, &Weight::from_ints(&[-1])),
            Err(Error::NonDominantWeight(_))
        ));
    }

    #[test]
    fn gorenstein_series_examples() {
        let a1 = RootSystemData::build(TypeLabel::parse("A1").unwrap()).unwrap();
        let s = gorenstein_series_check(&a1, &Weight::from_ints(&[1])).unwrap();
        assert_eq!(s, Poly::from_coeffs(vec![Rat::one(), Rat::one()]));
        let s = gorenstein_series_check(&a1, &Weight::zero(1)).unwrap();
        assert_eq!(s, Poly::one());

        let a2 = RootSystemData::build(TypeLabel::parse("A2").unwrap()).unwrap();
        let s = gorenstein_series_check(&a2, &Weight::from_ints(&[1, 0])).unwrap();
        assert_eq!(s, Poly::from_coeffs(vec![Rat::one(), Rat::one(), Rat::one()]));
        let s = gorenstein_series_check(&a2, &Weight::from_ints(&[1, 1])).unwrap();
        assert_eq!(s.eval(&Rat::one()), Rat::from_int(8));

        for label in ["B2", "G2"] {
            let rsd = RootSystemData::build(TypeLabel::parse(label).unwrap()).unwrap();
            let s = gorenstein_series_check(&rsd, &Weight::from_ints(&[1, 0])).unwrap();
            let dim = weyl_dim(&rsd, &Weight::from_ints(&[1, 0])).unwrap();
            assert_eq!(s.eval(&Rat::one()), Rat::from_int(dim as i64));
        }
    }

    #[test]
    fn spectrum_dictionary_trivial_and_nilpotent_pins() {
        // Trivial tensor module: both Hamiltonians act by zero and every
        // oper coordinate vanishes.
        let v0 = build_irreducible(a1(), &Weight::from_ints(&[0])).unwrap();
        let module = TensorModule::new(vec![v0.clone(), v0]).unwrap();
        let z = zs(&[0, 1]);
        let mu = diag2(Rat::one());
        let fam = inhomogeneous_hamiltonians(&module, &z, &mu).unwrap();
        for h in &fam.operators {
            assert!(h.is_zero());
        }
        let point =
            sl2_spectrum_to_oper(&[0, 0], &z, &mu, &[Rat::zero(), Rat::zero()]).unwrap();
        assert!(point.values.iter().all(Rat::is_zero));
        assert_eq!(point.space.mu_canonical, vec![Rat::from_int(16)]);
        assert!(sl2_log_free(&point).unwrap());

        // One point, principal nilpotent shift: the lone family member is
        // nilpotent, its generalized eigenvalue 0 maps to the residue-free
        // point with the fixed second-order residue of the module.
        let v3 = build_irreducible(a1(), &Weight::from_ints(&[3])).unwrap();
        let module = TensorModule::new(vec![v3]).unwrap();
        let f = nilpotent2();
        let fam = inhomogeneous_hamiltonians(&module, &zs(&[0]), &f).unwrap();
        let h = &fam.operators[0];
        let n = h.rows();
        let p = h.char_poly();
        assert_eq!(p, Poly::monomial(Rat::one(), n));
        let point = sl2_spectrum_to_oper(&[3], &zs(&[0]), &f, &[Rat::zero()]).unwrap();
        assert_eq!(point.values, vec![Rat::zero(), rat(15, 4)]);
        assert_eq!(point.space.mu_canonical, vec![Rat::zero()]);

        let conn = sl2_oper_connection(&point).unwrap();
        assert_eq!(conn.pole_order_at(&Rat::zero()), 2);
        let at1 = conn.eval(&Rat::one()).unwrap();
        assert_eq!(at1[(1, 0)], Rat::one());
        assert_eq!(at1[(0, 1)], rat(15, 4));
        assert!(sl2_log_free(&point).unwrap());
    }

    #[test]
    fn two_point_spectrum_satisfies_the_no_logarithm_conditions() {
        // Rank-one tensor square at z = (0, 1) with the Cartan shift
        // diag(3/16, -3/16): the four joint eigenvalue pairs are simple, and
        // the dictionary sends each onto a point where both local
        // obstructions vanish identically.
        let v1 = build_irreducible(a1(), &Weight::from_ints(&[1])).unwrap();
        let module = TensorModule::new(vec![v1.clone(), v1]).unwrap();
        let z = zs(&[0, 1]);
        let mu = diag2(rat(3, 16));
        let fam = inhomogeneous_hamiltonians(&module, &z, &mu).unwrap();
        let tuples = [
            (rat(1, 16), rat(5, 16)),
            (rat(-5, 16), rat(-1, 16)),
            (rat(7, 16), rat(-7, 16)),
            (rat(-3, 16), rat(3, 16)),
        ];
        for (e1, e2) in &tuples {
            for (h, e) in fam.operators.iter().zip([e1, e2]) {
                let shifted = h.sub(&Mat::scalar(h.rows(), e));
                assert!(shifted.det().is_zero(), "claimed eigenvalue is not one");
            }
            let point = sl2_spectrum_to_oper(&[1, 1], &z, &mu, &[e1.clone(), e2.clone()]).unwrap();
            assert_eq!(point.space.mu_canonical, vec![rat(9, 16)]);
            assert!(sl2_log_obstruction(&point, 0).unwrap().is_zero());
            assert!(sl2_log_obstruction(&point, 1).unwrap().is_zero());
            assert!(sl2_log_free(&point).unwrap());

            // Off-spectrum control: shifting one eigenvalue breaks it.
            let bad =
                sl2_spectrum_to_oper(&[1, 1], &z, &mu, &[e1 + Rat::one(), e2.clone()]).unwrap();
            assert!(!sl2_log_free(&bad).unwrap());
        }
    }

    #[test]
    fn log_obstruction_matches_closed_forms() {
        // Two points of weight 1: exponent difference 2 at each site, and
        // the recursion collapses to
        //   -w_site^2 + 3/4 + mubar + (z_site - z_other) w_other.
        let z = zs(&[0, 1]);
        let mu = diag2(rat(3, 16));
        let space = build_oper_space(a1(), &z, &mu).unwrap();
        let mubar = space.mu_canonical[0].clone();
        let (w1, w2) = (rat(1, 3), rat(-2, 7));
        let point = OperPoint::new(
            space,
            vec![w1.clone(), rat(3, 4), w2.clone(), rat(3, 4)],
        )
        .unwrap();
        let o1 = -(&w1 * &w1) + rat(3, 4) + &mubar - &w2;
        let o2 = -(&w2 * &w2) + rat(3, 4) + &mubar + &w1;
        assert_eq!(sl2_log_obstruction(&point, 0).unwrap(), o1);
        assert_eq!(sl2_log_obstruction(&point, 1).unwrap(), o2);

        // One point of weight 2: exponent difference 3 and the closed form
        // is w^3/4 - mubar w.
        let mu = diag2(rat(1, 2));
        let space = build_oper_space(a1(), &zs(&[0]), &mu).unwrap();
        assert_eq!(space.mu_canonical, vec![Rat::from_int(4)]);
        let w = Rat::from_int(6);
        let point = OperPoint::new(space, vec![w.clone(), Rat::from_int(2)]).unwrap();
        let expected = &w * &w * &w / Rat::from_int(4) - Rat::from_int(4) * &w;
        assert_eq!(sl2_log_obstruction(&point, 0).unwrap(), expected);

        // With no shift the weight-2 obstruction is u^3/4: among the real
        // residues 0, 1/4, -1/4, 1, -1 only u = 0 is logarithm-free.
        let space = build_oper_space(a1(), &zs(&[0]), &nilpotent2()).unwrap();
        for u in [Rat::zero(), rat(1, 4), rat(-1, 4), Rat::one(), -Rat::one()] {
            let point =
                OperPoint::new(space.clone(), vec![u.clone(), Rat::from_int(2)]).unwrap();
            let got = sl2_log_obstruction(&point, 0).unwrap();
            assert_eq!(got, &u * &u * &u / Rat::from_int(4));
            assert_eq!(got.is_zero(), u.is_zero());
        }

        // A residue whose exponents are not integer-spaced is rejected.
        let point = OperPoint::new(space, vec![Rat::zero(), Rat::one()]).unwrap();
        assert!(matches!(
            sl2_log_obstruction(&point, 0),
            Err(Error::ExactSqrtUnavailable(_))
        ));
    }

    #[test]
    fn oper_points_round_trip_through_json() {
        let z = zs(&[0, 1]);
        let mu = diag2(rat(3, 16));
        let exact =
            sl2_spectrum_to_oper(&[1, 1], &z, &mu, &[rat(1, 16), rat(5, 16)]).unwrap();
        let back = OperPoint::<Rat>::from_json(&exact.to_json()).unwrap();
        assert_eq!(back, exact);

        let ev = [C64::new(0.0625, 0.0), C64::new(0.3125, -1.5)];
        let float = sl2_spectrum_to_oper(&[1, 1], &z, &mu, &ev).unwrap();
        let back = OperPoint::<C64>::from_json(&float.to_json()).unwrap();
        assert_eq!(back, float);
    }
}
