//! Exact root-system combinatorics for the simple types A through G.
//!
//! Conventions used throughout:
//! - The Cartan matrix is `a[i][j] = <alpha_i^vee, alpha_j>`, so row `i` holds
//!   the pairings of the `i`-th simple coroot against all simple roots.
//! - Roots are stored both in simple-root coordinates (`beta = sum k_i alpha_i`)
//!   and in fundamental-weight coordinates (`<alpha_j^vee, beta>`); both are
//!   integral.
//! - Coroots are stored as integer expansions in the simple coroots.
//! - Weights live in the fundamental-weight basis with rational coordinates.
//! - The invariant bilinear form is normalized so the symmetrizer `d_i` in
//!   `(alpha_i, alpha_j) = d_i a_ij` consists of coprime positive integers.
//!   For the A series this makes `(alpha, alpha) = 2`, i.e. the trace form of
//!   the defining representation.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::json as js;
use crate::mat::Mat;
use crate::poly::Poly;
use crate::{Error, Rat, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// A simple type, e.g. `A2` or `G2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TypeLabel {
    pub series: Series,
    pub rank: usize,
}

impl TypeLabel {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let ok = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 3,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if ok {
            Ok(TypeLabel { series, rank })
        } else {
            Err(Error::UnknownTypeLabel(format!("{series:?}{rank}")))
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let series = match chars.next() {
            Some('A') => Series::A,
            Some('B') => Series::B,
            Some('C') => Series::C,
            Some('D') => Series::D,
            Some('E') => Series::E,
            Some('F') => Series::F,
            Some('G') => Series::G,
            _ => return Err(Error::UnknownTypeLabel(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::UnknownTypeLabel(s.to_string()))?;
        TypeLabel::new(series, rank)
    }

    pub fn is_a_series(&self) -> bool {
        self.series == Series::A
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.series, self.rank)
    }
}

/// A weight in fundamental-weight coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Weight {
    pub coords: Vec<Rat>,
}

impl Weight {
    pub fn new(coords: Vec<Rat>) -> Self {
        Weight { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Weight { coords: vec![Rat::zero(); rank] }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Weight { coords: coords.iter().map(|&c| Rat::from_integer(c.into())).collect() }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        assert_eq!(self.coords.len(), other.coords.len());
        Weight {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn is_dominant_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer() && !c.is_negative())
    }

    /// Integer coordinates, if the weight is integral.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.coords
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect()
    }
}

/// A positive root in both coordinate systems.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Root {
    /// Coefficients of the simple roots.
    pub simple_coords: Vec<i64>,
    /// Pairings with the simple coroots.
    pub fund_coords: Vec<i64>,
    pub height: i64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct RootSystemData {
    pub type_label: TypeLabel,
    /// `a[i][j] = <alpha_i^vee, alpha_j>`.
    pub cartan_matrix: Mat<Rat>,
    /// `d_i` with `(alpha_i, alpha_j) = d_i a_ij`, coprime positive integers.
    pub symmetrizer: Vec<Rat>,
    pub simple_roots: Vec<Root>,
    /// Sorted by height, then lexicographically by simple-root coordinates.
    pub positive_roots: Vec<Root>,
    /// `coroots[k]` expands the coroot of `positive_roots[k]` in simple coroots.
    pub coroots: Vec<Vec<i64>>,
    /// Half the sum of positive roots; all-ones in fundamental coordinates.
    pub rho: Weight,
    /// Ascending, with multiplicity (e.g. `[1, 3, 3, 5]` for D4).
    pub exponents: Vec<i64>,
    /// Gram matrix of the fundamental weights for the normalized form.
    pub invariant_pairing: Mat<Rat>,
}

fn cartan_entries(label: TypeLabel) -> Vec<Vec<i64>> {
    let n = label.rank;
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
    }
    let link = |i: usize, j: usize, aij: i64, aji: i64, a: &mut Vec<Vec<i64>>| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match label.series {
        Series::A => {
            for i in 0..n.saturating_sub(1) {
                link(i, i + 1, -1, -1, &mut a);
            }
        }
        Series::B => {
            for i in 0..n - 1 {
                link(i, i + 1, -1, -1, &mut a);
            }
            // Last simple root short: its coroot pairs to -2 with the neighbor.
            a[n - 1][n - 2] = -2;
        }
        Series::C => {
            for i in 0..n - 1 {
                link(i, i + 1, -1, -1, &mut a);
            }
            a[n - 2][n - 1] = -2;
        }
        Series::D => {
            for i in 0..n - 2 {
                link(i, i + 1, -1, -1, &mut a);
            }
            link(n - 3, n - 1, -1, -1, &mut a);
        }
        Series::E => {
            // Bourbaki numbering: chain 1-3-4-5-...-n with node 2 attached to 4.
            link(0, 2, -1, -1, &mut a);
            link(1, 3, -1, -1, &mut a);
            for i in 2..n - 1 {
                link(i, i + 1, -1, -1, &mut a);
            }
        }
        Series::F => {
            link(0, 1, -1, -1, &mut a);
            link(2, 3, -1, -1, &mut a);
            a[1][2] = -1;
            a[2][1] = -2;
        }
        Series::G => {
            a[0][1] = -3;
            a[1][0] = -1;
        }
    }
    a
}

/// Symmetrizing weights: positive coprime integers `d_i` with
/// `d_i a_ij = d_j a_ji`. The Dynkin diagram of a simple type is connected, so
/// propagating from node 0 determines them up to overall scale.
fn symmetrizer(a: &[Vec<i64>]) -> Vec<Rat> {
    let n = a.len();
    let mut d = vec![None::<Rat>; n];
    d[0] = Some(Rat::one());
    let mut queue = vec![0usize];
    while let Some(i) = queue.pop() {
        for j in 0..n {
            if i != j && a[i][j] != 0 && d[j].is_none() {
                let di = d[i].clone().unwrap();
                d[j] = Some(di * Rat::new(a[i][j].into(), a[j][i].into()));
                queue.push(j);
            }
        }
    }
    let mut d: Vec<Rat> = d.into_iter().map(|x| x.expect("connected diagram")).collect();
    // Clear denominators, then divide by the common factor.
    let mut denom_lcm = num_bigint::BigInt::one();
    for x in &d {
        denom_lcm = num_integer::lcm(denom_lcm, x.denom().clone());
    }
    let scale = Rat::from_integer(denom_lcm);
    for x in d.iter_mut() {
        *x = &*x * &scale;
    }
    let mut numer_gcd = num_bigint::BigInt::zero();
    for x in &d {
        numer_gcd = num_integer::gcd(numer_gcd, x.numer().clone());
    }
    let scale = Rat::from_integer(numer_gcd);
    for x in d.iter_mut() {
        *x = &*x / &scale;
    }
    for i in 0..n {
        for j in 0..n {
            debug_assert_eq!(
                &d[i] * Rat::from_integer(a[i][j].into()),
                &d[j] * Rat::from_integer(a[j][i].into())
            );
        }
    }
    d
}

fn vec_add(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn vec_sub(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// All positive roots in simple-root coordinates, found by closing the simple
/// roots under root strings: for a root `beta` and simple `alpha_i`, the string
/// extends `q = p - <alpha_i^vee, beta>` steps forward where `p` is the number
/// of backward steps.
fn close_positive_roots(a: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = a.len();
    let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut frontier: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        found.insert(e.clone());
        frontier.push(e);
    }
    for _height in 1..10_000 {
        let mut next: BTreeSet<Vec<i64>> = BTreeSet::new();
        for beta in &frontier {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|j| a[i][j] * beta[j]).sum();
                let mut e = vec![0i64; n];
                e[i] = 1;
                let mut p = 0i64;
                let mut gamma = vec_sub(beta, &e);
                while found.contains(&gamma) {
                    p += 1;
                    gamma = vec_sub(&gamma, &e);
                }
                if p - pairing >= 1 {
                    let cand = vec_add(beta, &e);
                    if !found.contains(&cand) {
                        next.insert(cand);
                    }
                }
            }
        }
        if next.is_empty() {
            let mut out: Vec<Vec<i64>> = found.into_iter().collect();
            out.sort_by_key(|k| (k.iter().sum::<i64>(), k.clone()));
            return Ok(out);
        }
        frontier = next.iter().cloned().collect();
        found.extend(next);
    }
    Err(Error::Internal("root closure did not terminate".into()))
}

pub fn build_root_system(label: &str) -> Result<RootSystemData> {
    RootSystemData::build(TypeLabel::parse(label)?)
}

impl RootSystemData {
    pub fn build(type_label: TypeLabel) -> Result<Self> {
        let n = type_label.rank;
        let a = cartan_entries(type_label);
        let d = symmetrizer(&a);
        let simple_coords = close_positive_roots(&a)?;

        let fund = |k: &[i64]| -> Vec<i64> {
            (0..n).map(|j| (0..n).map(|i| k[i] * a[j][i]).sum()).collect()
        };
        let positive_roots: Vec<Root> = simple_coords
            .iter()
            .map(|k| Root {
                simple_coords: k.clone(),
                fund_coords: fund(k),
                height: k.iter().sum(),
            })
            .collect();
        let simple_roots: Vec<Root> =
            positive_roots.iter().filter(|r| r.height == 1).cloned().collect();
        assert_eq!(simple_roots.len(), n);

        // Coroot of beta = sum k_i alpha_i is sum (k_i d_i / d_beta) alpha_i^vee
        // with d_beta = (beta, beta)/2; the coefficients are integers.
        let mut coroots = Vec::with_capacity(positive_roots.len());
        for r in &positive_roots {
            let k = &r.simple_coords;
            let mut norm = Rat::zero();
            for i in 0..n {
                for j in 0..n {
                    norm += &d[i]
                        * Rat::from_integer((a[i][j] * k[i] * k[j]).into());
                }
            }
            let d_beta = norm / Rat::from_integer(2.into());
            let mut c = Vec::with_capacity(n);
            for i in 0..n {
                let ci = &d[i] * Rat::from_integer(k[i].into()) / &d_beta;
                let ci = ci
                    .is_integer()
                    .then(|| ci.to_integer().to_i64())
                    .flatten()
                    .ok_or_else(|| Error::Internal("non-integral coroot".into()))?;
                c.push(ci);
            }
            coroots.push(c);
        }

        // Exponents: conjugate partition of the height histogram.
        let max_h = positive_roots.iter().map(|r| r.height).max().unwrap() as usize;
        let mut hist = vec![0usize; max_h];
        for r in &positive_roots {
            hist[r.height as usize - 1] += 1;
        }
        let mut exponents: Vec<i64> = (1..=n)
            .map(|i| hist.iter().filter(|&&c| c >= i).count() as i64)
            .collect();
        exponents.sort_unstable();

        let cartan_matrix =
            Mat::from_fn(n, n, |i, j| Rat::from_integer(a[i][j].into()));
        let a_inv = cartan_matrix
            .inverse()
            .ok_or_else(|| Error::Internal("singular Cartan matrix".into()))?;
        // Gram matrix of fundamental weights: G_ij = (A^{-1})_ji d_j.
        let invariant_pairing = Mat::from_fn(n, n, |i, j| &a_inv[(j, i)] * &d[j]);
        for i in 0..n {
            for j in 0..n {
                debug_assert_eq!(invariant_pairing[(i, j)], invariant_pairing[(j, i)]);
            }
        }

        Ok(RootSystemData {
            type_label,
            cartan_matrix,
            symmetrizer: d,
            simple_roots,
            positive_roots,
            coroots,
            rho: Weight::from_ints(&vec![1; n]),
            exponents,
            invariant_pairing,
        })
    }

    pub fn rank(&self) -> usize {
        self.type_label.rank
    }

    /// Dimension of the algebra: twice the positive roots plus the rank.
    pub fn dim_algebra(&self) -> usize {
        2 * self.positive_roots.len() + self.rank()
    }

    /// Predicted count of free generators of the classical shift algebra:
    /// `sum_i (d_i + 1) = (dim + rank)/2`.
    pub fn free_generator_count(&self) -> usize {
        self.exponents.iter().map(|d| (d + 1) as usize).sum()
    }

    /// Invariant form on weights in fundamental coordinates.
    pub fn pairing(&self, x: &Weight, y: &Weight) -> Result<Rat> {
        let n = self.rank();
        if x.rank() != n || y.rank() != n {
            return Err(Error::DimensionMismatch(format!(
                "weights of rank {}, {} for {}",
                x.rank(),
                y.rank(),
                self.type_label
            )));
        }
        let mut out = Rat::zero();
        for i in 0..n {
            for j in 0..n {
                out += &x.coords[i] * &self.invariant_pairing[(i, j)] * &y.coords[j];
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type_label": self.type_label.to_string(),
            "cartan_matrix": js::qmat_to_value(&self.cartan_matrix),
            "symmetrizer": js::rat_vec_to_value(&self.symmetrizer),
            "positive_roots": self.positive_roots.iter().map(|r| json!({
                "simple": r.simple_coords,
                "fund": r.fund_coords,
                "height": r.height,
            })).collect::<Vec<_>>(),
            "coroots": self.coroots,
            "rho": js::rat_vec_to_value(&self.rho.coords),
            "exponents": self.exponents,
            "invariant_pairing": js::qmat_to_value(&self.invariant_pairing),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Serialization(m.to_string());
        let label = js::field(v, "type_label")?
            .as_str()
            .ok_or_else(|| bad("type_label must be a string"))?;
        let type_label = TypeLabel::parse(label)?;
        let n = type_label.rank;
        let cartan_matrix = js::qmat_from_value(js::field(v, "cartan_matrix")?)?;
        let symmetrizer = js::rat_vec_from_value(js::field(v, "symmetrizer")?)?;
        let ivec = |w: &Value| -> Result<Vec<i64>> {
            w.as_array()
                .ok_or_else(|| bad("expected integer array"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("expected integer")))
                .collect()
        };
        let mut positive_roots = Vec::new();
        for rv in js::field(v, "positive_roots")?
            .as_array()
            .ok_or_else(|| bad("positive_roots must be an array"))?
        {
            positive_roots.push(Root {
                simple_coords: ivec(js::field(rv, "simple")?)?,
                fund_coords: ivec(js::field(rv, "fund")?)?,
                height: js::field(rv, "height")?
                    .as_i64()
                    .ok_or_else(|| bad("height must be an integer"))?,
            });
        }
        let simple_roots: Vec<Root> =
            positive_roots.iter().filter(|r| r.height == 1).cloned().collect();
        let coroots = js::field(v, "coroots")?
            .as_array()
            .ok_or_else(|| bad("coroots must be an array"))?
            .iter()
            .map(|w| ivec(w))
            .collect::<Result<Vec<_>>>()?;
        let rho = Weight::new(js::rat_vec_from_value(js::field(v, "rho")?)?);
        let exponents = ivec(js::field(v, "exponents")?)?;
        let invariant_pairing = js::qmat_from_value(js::field(v, "invariant_pairing")?)?;
        if simple_roots.len() != n
            || coroots.len() != positive_roots.len()
            || rho.rank() != n
            || exponents.len() != n
        {
            return Err(bad("inconsistent root system data"));
        }
        Ok(RootSystemData {
            type_label,
            cartan_matrix,
            symmetrizer,
            simple_roots,
            positive_roots,
            coroots,
            rho,
            exponents,
            invariant_pairing,
        })
    }
}

/// Pairing `<alpha^vee, weight>` of a coroot (given by its expansion in simple
/// coroots) with a weight in fundamental coordinates.
pub fn coroot_pairing(
    rsd: &RootSystemData,
    alpha_check: &[i64],
    weight: &Weight,
) -> Result<Rat> {
    let n = rsd.rank();
    if alpha_check.len() != n || weight.rank() != n {
        return Err(Error::DimensionMismatch(format!(
            "coroot of length {}, weight of rank {} for {}",
            alpha_check.len(),
            weight.rank(),
            rsd.type_label
        )));
    }
    let mut out = Rat::zero();
    for i in 0..n {
        out += Rat::from_integer(alpha_check[i].into()) * &weight.coords[i];
    }
    Ok(out)
}

fn positive_integer_pairing(rsd: &RootSystemData, k: usize, w: &Weight) -> Result<usize> {
    let x = coroot_pairing(rsd, &rsd.coroots[k], w)?;
    x.is_integer()
        .then(|| x.to_integer().to_usize())
        .flatten()
        .ok_or_else(|| Error::Internal("pairing not a positive integer".into()))
}

/// The principal character `prod_{alpha>0} (1-q^{<a^vee, l+rho>}) / (1-q^{<a^vee, rho>})`.
/// Evaluating at `q = 1` gives the dimension of the irreducible module.
pub fn q_weyl_dimension(rsd: &RootSystemData, lambda: &Weight) -> Result<Poly<Rat>> {
    if !lambda.is_dominant_integral() {
        return Err(Error::NonDominantWeight(format!("{:?}", lambda.coords)));
    }
    let lam_rho = lambda.add(&rsd.rho);
    let mut num = Poly::<Rat>::one();
    let mut den = Poly::<Rat>::one();
    for k in 0..rsd.positive_roots.len() {
        num = num.mul(&Poly::one_minus_power(positive_integer_pairing(rsd, k, &lam_rho)?));
        den = den.mul(&Poly::one_minus_power(positive_integer_pairing(rsd, k, &rsd.rho)?));
    }
    num.div_exact(&den)
        .ok_or_else(|| Error::Internal("character quotient is not polynomial".into()))
}

/// Weyl dimension formula, as an exact integer.
pub fn weyl_dim(rsd: &RootSystemData, lambda: &Weight) -> Result<u64> {
    if !lambda.is_dominant_integral() {
        return Err(Error::NonDominantWeight(format!("{:?}", lambda.coords)));
    }
    let lam_rho = lambda.add(&rsd.rho);
    let mut out = Rat::one();
    for k in 0..rsd.positive_roots.len() {
        let num = coroot_pairing(rsd, &rsd.coroots[k], &lam_rho)?;
        let den = coroot_pairing(rsd, &rsd.coroots[k], &rsd.rho)?;
        out *= num / den;
    }
    out.is_integer()
        .then(|| out.to_integer().to_u64())
        .flatten()
        .ok_or_else(|| Error::Internal("non-integral Weyl dimension".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_parsing() {
        assert!(TypeLabel::parse("A1").is_ok());
        assert!(TypeLabel::parse("G2").is_ok());
        assert!(TypeLabel::parse("E8").is_ok());
        assert!(TypeLabel::parse("B1").is_err());
        assert!(TypeLabel::parse("E9").is_err());
        assert!(TypeLabel::parse("A0").is_err());
        assert!(TypeLabel::parse("H3").is_err());
        assert!(TypeLabel::parse("foo").is_err());
        assert_eq!(TypeLabel::parse("D4").unwrap().to_string(), "D4");
    }

    #[test]
    fn root_counts_and_dimensions() {
        // (label, positive roots, dim of the algebra)
        let table = [
            ("A1", 1, 3),
            ("A2", 3, 8),
            ("A3", 6, 15),
            ("B2", 4, 10),
            ("B3", 9, 21),
            ("C3", 9, 21),
            ("D4", 12, 28),
            ("G2", 6, 14),
            ("F4", 24, 52),
            ("E6", 36, 78),
        ];
        for (label, pos, dim) in table {
            let rsd = build_root_system(label).unwrap();
            assert_eq!(rsd.positive_roots.len(), pos, "{label}");
            assert_eq!(rsd.dim_algebra(), dim, "{label}");
            // sum (2 d_i + 1) also recovers the dimension
            let via_exponents: i64 = rsd.exponents.iter().map(|d| 2 * d + 1).sum();
            assert_eq!(via_exponents as usize, dim, "{label}");
        }
    }

    #[test]
    fn exponents_match_reference_values() {
        let table: [(&str, &[i64]); 8] = [
            ("A1", &[1]),
            ("A2", &[1, 2]),
            ("A3", &[1, 2, 3]),
            ("B2", &[1, 3]),
            ("B3", &[1, 3, 5]),
            ("D4", &[1, 3, 3, 5]),
            ("G2", &[1, 5]),
            ("F4", &[1, 5, 7, 11]),
        ];
        for (label, exps) in table {
            let rsd = build_root_system(label).unwrap();
            assert_eq!(rsd.exponents, exps, "{label}");
        }
    }

    #[test]
    fn free_generator_counts() {
        for (label, count) in [("A1", 2), ("A2", 5), ("B2", 6), ("G2", 8)] {
            let rsd = build_root_system(label).unwrap();
            assert_eq!(rsd.free_generator_count(), count, "{label}");
            assert_eq!(2 * count, rsd.dim_algebra() + rsd.rank(), "{label}");
        }
    }

    #[test]
    fn rho_is_half_the_sum_of_positive_roots() {
        for label in ["A1", "A2", "B2", "B3", "D4", "G2", "F4"] {
            let rsd = build_root_system(label).unwrap();
            let n = rsd.rank();
            let mut total = vec![0i64; n];
            for r in &rsd.positive_roots {
                for j in 0..n {
                    total[j] += r.fund_coords[j];
                }
            }
            let half: Vec<Rat> = total
                .iter()
                .map(|&t| Rat::new(t.into(), 2.into()))
                .collect();
            assert_eq!(Weight::new(half), rsd.rho, "{label}");
        }
    }

    #[test]
    fn coroot_pairing_reference_values() {
        let a1 = build_root_system("A1").unwrap();
        let alpha_check = &a1.coroots[0];
        assert_eq!(
            coroot_pairing(&a1, alpha_check, &a1.rho).unwrap(),
            Rat::one()
        );
        let lam_rho = Weight::from_ints(&[2]).add(&a1.rho);
        assert_eq!(
            coroot_pairing(&a1, alpha_check, &lam_rho).unwrap(),
            Rat::from_integer(3.into())
        );

        let a2 = build_root_system("A2").unwrap();
        let idx = a2
            .positive_roots
            .iter()
            .position(|r| r.simple_coords == [1, 1])
            .unwrap();
        let lam_rho = Weight::from_ints(&[1, 0]).add(&a2.rho);
        assert_eq!(
            coroot_pairing(&a2, &a2.coroots[idx], &lam_rho).unwrap(),
            Rat::from_integer(3.into())
        );
    }

    #[test]
    fn coroots_are_integral_and_pair_to_two() {
        // <beta^vee, beta> = 2 for every positive root.
        for label in ["B2", "G2", "F4", "C3"] {
            let rsd = build_root_system(label).unwrap();
            for (k, r) in rsd.positive_roots.iter().enumerate() {
                let w = Weight::from_ints(&r.fund_coords);
                assert_eq!(
                    coroot_pairing(&rsd, &rsd.coroots[k], &w).unwrap(),
                    Rat::from_integer(2.into()),
                    "{label} root {k}"
                );
            }
        }
    }

    #[test]
    fn q_dimension_reference_values() {
        let a1 = build_root_system("A1").unwrap();
        let chi = q_weyl_dimension(&a1, &Weight::from_ints(&[2])).unwrap();
        assert_eq!(
            chi,
            Poly::from_coeffs(vec![Rat::one(), Rat::one(), Rat::one()])
        );
        let chi0 = q_weyl_dimension(&a1, &Weight::zero(1)).unwrap();
        assert_eq!(chi0, Poly::one());

        let a2 = build_root_system("A2").unwrap();
        let adj = q_weyl_dimension(&a2, &Weight::from_ints(&[1, 1])).unwrap();
        assert_eq!(adj.eval(&Rat::one()), Rat::from_integer(8.into()));
        let def = q_weyl_dimension(&a2, &Weight::from_ints(&[1, 0])).unwrap();
        assert_eq!(
            def,
            Poly::from_coeffs(vec![Rat::one(), Rat::one(), Rat::one()])
        );

        assert!(q_weyl_dimension(&a1, &Weight::from_ints(&[-1])).is_err());
    }

    #[test]
    fn weyl_dimension_reference_values() {
        let a1 = build_root_system("A1").unwrap();
        assert_eq!(weyl_dim(&a1, &Weight::from_ints(&[4])).unwrap(), 5);
        let a2 = build_root_system("A2").unwrap();
        assert_eq!(weyl_dim(&a2, &Weight::from_ints(&[1, 0])).unwrap(), 3);
        assert_eq!(weyl_dim(&a2, &Weight::from_ints(&[1, 1])).unwrap(), 8);
        let b2 = build_root_system("B2").unwrap();
        assert_eq!(weyl_dim(&b2, &Weight::from_ints(&[1, 0])).unwrap(), 5);
        assert_eq!(weyl_dim(&b2, &Weight::from_ints(&[0, 1])).unwrap(), 4);
    }

    #[test]
    fn pairing_reference_values() {
        // A1: (omega, omega) = 1/2 in the trace-form normalization.
        let a1 = build_root_system("A1").unwrap();
        let w = Weight::from_ints(&[1]);
        assert_eq!(a1.pairing(&w, &w).unwrap(), Rat::new(1.into(), 2.into()));

        // A2 defining rep: (lambda, lambda + 2 rho) = 8/3.
        let a2 = build_root_system("A2").unwrap();
        let lam = Weight::from_ints(&[1, 0]);
        let shifted = lam.add(&a2.rho).add(&a2.rho);
        assert_eq!(
            a2.pairing(&lam, &shifted).unwrap(),
            Rat::new(8.into(), 3.into())
        );

        // Symmetry of the Gram matrix in the mixed-length types.
        for label in ["B2", "G2", "F4"] {
            let rsd = build_root_system(label).unwrap();
            assert_eq!(
                rsd.invariant_pairing,
                rsd.invariant_pairing.transpose(),
                "{label}"
            );
        }
    }

    #[test]
    fn serialization_round_trip() {
        for label in ["A2", "B2"] {
            let rsd = build_root_system(label).unwrap();
            let v = rsd.to_json();
            let back = RootSystemData::from_json(&v).unwrap();
            assert_eq!(back, rsd);
        }
    }
}
