//! Exact-rational matrix realizations of irreducible finite-dimensional
//! modules for sl_n, and tensor products thereof.
//!
//! A module with highest weight `lambda = (l_1, .., l_{n-1})` is realized
//! inside the tensor product of `l_k` copies of the k-th fundamental module
//! `Wedge^k C^n`, generated from the top vector by the lowering operators.
//! The ambient monomial basis is orthonormal for the compact-real-form
//! Hermitian product, so the restricted Gram matrix is `B^T B` where the
//! columns of `B` are the module basis vectors.

use std::collections::VecDeque;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::json as js;
use crate::mat::{InsertOutcome, Mat, RowSpaceBasis};
use crate::poly::Poly;
use crate::roots::{RootSystemData, Series, TypeLabel, Weight, weyl_dim};
use crate::{Error, Rat, Result};

fn rat_i(k: i64) -> Rat {
    Rat::from_integer(k.into())
}

/// The fundamental module `Wedge^k C^n` with its lexicographic subset basis.
/// The first basis vector is `{0, .., k-1}`, the highest weight line.
pub struct FundamentalRep {
    pub n: usize,
    pub k: usize,
    pub subsets: Vec<Vec<u8>>,
}

fn subsets_lex(n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<u8> = (0..k as u8).collect();
    loop {
        out.push(cur.clone());
        // Advance: rightmost position that can still increase.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < (n - k + i) as u8 {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl FundamentalRep {
    pub fn new(n: usize, k: usize) -> Self {
        FundamentalRep { n, k, subsets: subsets_lex(n, k) }
    }

    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    fn index_of(&self, s: &[u8]) -> usize {
        self.subsets.binary_search_by(|t| t.as_slice().cmp(s)).unwrap()
    }

    /// Matrix of `E_ab` on the wedge basis.
    pub fn unit(&self, a: usize, b: usize) -> Mat<Rat> {
        let d = self.dim();
        let mut m = Mat::<Rat>::zeros(d, d);
        let (a, b) = (a as u8, b as u8);
        for (col, s) in self.subsets.iter().enumerate() {
            if !s.contains(&b) {
                continue;
            }
            if a == b {
                m[(col, col)] = Rat::one();
                continue;
            }
            let t: Vec<u8> = s.iter().copied().filter(|&x| x != b).collect();
            if t.contains(&a) {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let crossings = t.iter().filter(|&&x| lo < x && x < hi).count();
            let mut u = t.clone();
            u.push(a);
            u.sort_unstable();
            let row = self.index_of(&u);
            m[(row, col)] = if crossings % 2 == 0 { Rat::one() } else { -Rat::one() };
        }
        m
    }
}

/// An irreducible sl_n module in exact rational arithmetic.
///
/// `units[a*n + b]` is the matrix of the gl unit `E_ab` restricted to the
/// module; the Chevalley generators are derived from these via [`Self::e`],
/// [`Self::f`], [`Self::h`].
#[derive(Clone, PartialEq, Debug)]
pub struct IrreducibleModule {
    pub algebra: TypeLabel,
    pub highest_weight: Weight,
    pub dimension: usize,
    pub n: usize,
    pub units: Vec<Mat<Rat>>,
    /// sl-weights in fundamental coordinates, one per basis vector.
    pub weight_of_basis_vector: Vec<Weight>,
    /// Diagonal gl-weights, one per basis vector.
    pub gl_weights: Vec<Vec<i64>>,
    pub highest_vector_index: usize,
    /// Gram matrix of the invariant Hermitian form on the module basis.
    pub hermitian_gram: Mat<Rat>,
}

impl IrreducibleModule {
    pub fn unit(&self, a: usize, b: usize) -> &Mat<Rat> {
        &self.units[a * self.n + b]
    }

    /// Raising generator for the i-th simple root.
    pub fn e(&self, i: usize) -> Mat<Rat> {
        self.unit(i, i + 1).clone()
    }

    /// Lowering generator for the i-th simple root.
    pub fn f(&self, i: usize) -> Mat<Rat> {
        self.unit(i + 1, i).clone()
    }

    /// Cartan generator `E_ii - E_{i+1,i+1}`.
    pub fn h(&self, i: usize) -> Mat<Rat> {
        self.unit(i, i).sub(self.unit(i + 1, i + 1))
    }

    /// Action of an arbitrary gl_n element given by its defining-rep matrix.
    pub fn apply_gl(&self, x: &Mat<Rat>) -> Mat<Rat> {
        assert_eq!((x.rows(), x.cols()), (self.n, self.n));
        let mut out = Mat::<Rat>::zeros(self.dimension, self.dimension);
        for a in 0..self.n {
            for b in 0..self.n {
                let c = &x[(a, b)];
                if !c.is_zero() {
                    out.add_assign(&self.unit(a, b).scale(c));
                }
            }
        }
        out
    }

    /// Casimir operator in the Killing normalization.
    pub fn casimir(&self) -> Mat<Rat> {
        let kb = killing_orthonormal_basis(self.algebra).expect("A series");
        let mut out = Mat::<Rat>::zeros(self.dimension, self.dimension);
        for (m, q) in &kb.elements {
            let img = self.apply_gl(m);
            out.add_assign(&img.matmul(&img).scale(&(Rat::one() / q)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra.to_string(),
            "highest_weight": js::rat_vec_to_value(&self.highest_weight.coords),
            "dimension": self.dimension,
            "n": self.n,
            "units": self.units.iter().map(js::qmat_to_value).collect::<Vec<_>>(),
            "weights": self.weight_of_basis_vector.iter()
                .map(|w| js::rat_vec_to_value(&w.coords)).collect::<Vec<_>>(),
            "gl_weights": self.gl_weights,
            "highest_vector_index": self.highest_vector_index,
            "hermitian_gram": js::qmat_to_value(&self.hermitian_gram),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Serialization(m.to_string());
        let algebra = TypeLabel::parse(
            js::field(v, "algebra")?.as_str().ok_or_else(|| bad("algebra"))?,
        )?;
        let highest_weight =
            Weight::new(js::rat_vec_from_value(js::field(v, "highest_weight")?)?);
        let dimension = js::usize_from_value(js::field(v, "dimension")?)?;
        let n = js::usize_from_value(js::field(v, "n")?)?;
        let units = js::field(v, "units")?
            .as_array()
            .ok_or_else(|| bad("units"))?
            .iter()
            .map(js::qmat_from_value)
            .collect::<Result<Vec<_>>>()?;
        let weight_of_basis_vector = js::field(v, "weights")?
            .as_array()
            .ok_or_else(|| bad("weights"))?
            .iter()
            .map(|w| js::rat_vec_from_value(w).map(Weight::new))
            .collect::<Result<Vec<_>>>()?;
        let gl_weights = js::field(v, "gl_weights")?
            .as_array()
            .ok_or_else(|| bad("gl_weights"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("gl_weights row"))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad("gl weight entry")))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let highest_vector_index =
            js::usize_from_value(js::field(v, "highest_vector_index")?)?;
        let hermitian_gram = js::qmat_from_value(js::field(v, "hermitian_gram")?)?;
        if units.len() != n * n
            || units.iter().any(|u| u.rows() != dimension || u.cols() != dimension)
            || weight_of_basis_vector.len() != dimension
            || gl_weights.len() != dimension
            || hermitian_gram.rows() != dimension
            || highest_vector_index >= dimension
        {
            return Err(bad("inconsistent module data"));
        }
        Ok(IrreducibleModule {
            algebra,
            highest_weight,
            dimension,
            n,
            units,
            weight_of_basis_vector,
            gl_weights,
            highest_vector_index,
            hermitian_gram,
        })
    }
}

/// Builds the irreducible module with the given dominant integral highest
/// weight by exact lowering-operator closure from the top vector.
pub fn build_irreducible(label: TypeLabel, lambda: &Weight) -> Result<IrreducibleModule> {
    if label.series != Series::A {
        return Err(Error::NonASeriesModule);
    }
    let rank = label.rank;
    let n = rank + 1;
    if lambda.rank() != rank {
        return Err(Error::DimensionMismatch(format!(
            "weight of rank {} for {}",
            lambda.rank(),
            label
        )));
    }
    if !lambda.is_dominant_integral() {
        return Err(Error::NonDominantWeight(format!("{:?}", lambda.coords)));
    }
    let lam = lambda.to_ints().expect("dominant integral");

    // Ambient: l_k copies of Wedge^k C^n, k = 1..rank.
    let mut slots: Vec<FundamentalRep> = Vec::new();
    for (k_idx, &mult) in lam.iter().enumerate() {
        for _ in 0..mult {
            slots.push(FundamentalRep::new(n, k_idx + 1));
        }
    }
    let ambient_dim: usize = slots.iter().map(|s| s.dim()).product();

    // Ambient action of E_ab: sum over tensor slots.
    let ambient_unit = |a: usize, b: usize| -> Mat<Rat> {
        let mut out = Mat::<Rat>::zeros(ambient_dim, ambient_dim);
        for s in 0..slots.len() {
            let mut piece = Mat::<Rat>::identity(1);
            for (t, rep) in slots.iter().enumerate() {
                let factor = if t == s {
                    rep.unit(a, b)
                } else {
                    Mat::identity(rep.dim())
                };
                piece = piece.kron(&factor);
            }
            out.add_assign(&piece);
        }
        out
    };
    let ambient_f: Vec<Mat<Rat>> = (0..rank).map(|i| ambient_unit(i + 1, i)).collect();

    // Top vector: every slot in its lexicographically first subset.
    let mut v0 = vec![Rat::zero(); ambient_dim];
    v0[0] = Rat::one();
    let mut top_gl = vec![0i64; n];
    for rep in &slots {
        for a in 0..rep.k {
            top_gl[a] += 1;
        }
    }

    let mut span = RowSpaceBasis::new(ambient_dim);
    assert!(matches!(span.insert(&v0), InsertOutcome::Added { .. }));
    let mut raw: Vec<Vec<Rat>> = vec![v0];
    let mut gl_weights: Vec<Vec<i64>> = vec![top_gl];
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(idx) = queue.pop_front() {
        for i in 0..rank {
            let w = ambient_f[i].matvec(&raw[idx]);
            if w.iter().all(|x| x.is_zero()) {
                continue;
            }
            if let InsertOutcome::Added { .. } = span.insert(&w) {
                let mut gw = gl_weights[idx].clone();
                gw[i] -= 1;
                gw[i + 1] += 1;
                raw.push(w);
                gl_weights.push(gw);
                queue.push_back(raw.len() - 1);
            }
        }
    }
    let dim = raw.len();

    let rsd = RootSystemData::build(label)?;
    let expected = weyl_dim(&rsd, lambda)? as usize;
    if dim != expected {
        return Err(Error::Internal(format!(
            "closure found {dim} vectors, Weyl dimension is {expected}"
        )));
    }

    // Restrict every gl unit to the module basis.
    let mut units = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let amb = ambient_unit(a, b);
            let mut m = Mat::<Rat>::zeros(dim, dim);
            for (col, vec) in raw.iter().enumerate() {
                let img = amb.matvec(vec);
                let coords = span.coordinates(&img).ok_or_else(|| {
                    Error::Internal("module not stable under gl action".into())
                })?;
                m.set_col(col, &coords);
            }
            units.push(m);
        }
    }

    // The ambient monomial basis is orthonormal, so Gram = B^T B.
    let mut b = Mat::<Rat>::zeros(ambient_dim, dim);
    for (col, vec) in raw.iter().enumerate() {
        b.set_col(col, vec);
    }
    let hermitian_gram = b.transpose().matmul(&b);

    let weight_of_basis_vector: Vec<Weight> = gl_weights
        .iter()
        .map(|gw| {
            Weight::from_ints(
                &(0..rank).map(|i| gw[i] - gw[i + 1]).collect::<Vec<_>>(),
            )
        })
        .collect();
    debug_assert_eq!(weight_of_basis_vector[0], *lambda);

    Ok(IrreducibleModule {
        algebra: label,
        highest_weight: lambda.clone(),
        dimension: dim,
        n,
        units,
        weight_of_basis_vector,
        gl_weights,
        highest_vector_index: 0,
        hermitian_gram,
    })
}

/// Killing form of sl_n on defining-representation matrices.
pub fn killing_form(n: usize, x: &Mat<Rat>, y: &Mat<Rat>) -> Rat {
    x.matmul(y).trace() * rat_i(2 * n as i64)
}

/// A Killing-orthogonal basis with symbolic normalizations: element `(M, q)`
/// stands for `M / sqrt(q)`, and `kappa(M_a, M_b) = delta_ab q_a` exactly.
/// The orthonormal vectors themselves may need a quadratic extension, but
/// every bilinear expression `sum_a x_a (..) x_a` stays rational.
pub struct KillingBasis {
    pub n: usize,
    pub elements: Vec<(Mat<Rat>, Rat)>,
}

pub fn killing_orthonormal_basis(label: TypeLabel) -> Result<KillingBasis> {
    if label.series != Series::A {
        return Err(Error::NonASeriesModule);
    }
    let n = label.rank + 1;
    let mut elements: Vec<(Mat<Rat>, Rat)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let eab = Mat::unit_entry(n, a, b, Rat::one());
            let eba = Mat::unit_entry(n, b, a, Rat::one());
            let plus = eab.add(&eba);
            let minus = eab.sub(&eba);
            let qp = killing_form(n, &plus, &plus);
            let qm = killing_form(n, &minus, &minus);
            elements.push((plus, qp));
            elements.push((minus, qm));
        }
    }
    // Gram-Schmidt over the Cartan h_i = E_ii - E_{i+1,i+1}.
    for i in 0..n - 1 {
        let mut m = Mat::unit_entry(n, i, i, Rat::one());
        m[(i + 1, i + 1)] = -Rat::one();
        for (prev, q) in elements.iter().skip(n * (n - 1)) {
            let c = killing_form(n, &m, prev) / q;
            m = m.sub(&prev.scale(&c));
        }
        let q = killing_form(n, &m, &m);
        elements.push((m, q));
    }
    debug_assert_eq!(elements.len(), n * n - 1);
    Ok(KillingBasis { n, elements })
}

/// Split Casimir for the Killing form as a list of exact summands:
/// `Omega = sum c (x tensor y)` over the returned triples `(x, y, c)`.
/// Built from the trace-form dual bases, then rescaled by `1/(2n)`.
pub fn split_casimir_summands(n: usize) -> Vec<(Mat<Rat>, Mat<Rat>, Rat)> {
    let s = Rat::new(1.into(), (2 * n as i64).into());
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                out.push((
                    Mat::unit_entry(n, a, b, Rat::one()),
                    Mat::unit_entry(n, b, a, Rat::one()),
                    s.clone(),
                ));
            }
        }
    }
    let h = |i: usize| -> Mat<Rat> {
        let mut m = Mat::unit_entry(n, i, i, Rat::one());
        m[(i + 1, i + 1)] = -Rat::one();
        m
    };
    let c = Mat::from_fn(n - 1, n - 1, |i, j| h(i).matmul(&h(j)).trace());
    let c_inv = c.inverse().expect("Cartan trace form is nondegenerate");
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            if !c_inv[(i, j)].is_zero() {
                out.push((h(i), h(j), &c_inv[(i, j)] * &s));
            }
        }
    }
    out
}

/// A tensor product of irreducible modules over a common sl_n, with basis
/// ordered so that the first factor is the most significant index.
pub struct TensorModule {
    pub factors: Vec<IrreducibleModule>,
    pub dimension: usize,
}

impl TensorModule {
    pub fn new(factors: Vec<IrreducibleModule>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty tensor product".into()));
        }
        let n = factors[0].n;
        if factors.iter().any(|f| f.n != n) {
            return Err(Error::DimensionMismatch(
                "tensor factors over different algebras".into(),
            ));
        }
        let dimension = factors.iter().map(|f| f.dimension).product();
        Ok(TensorModule { factors, dimension })
    }

    pub fn n(&self) -> usize {
        self.factors[0].n
    }

    pub fn num_sites(&self) -> usize {
        self.factors.len()
    }

    /// Embeds an operator on the i-th factor as `1 x .. x m x .. x 1`.
    pub fn at_site(&self, i: usize, m: &Mat<Rat>) -> Mat<Rat> {
        assert_eq!(m.rows(), self.factors[i].dimension);
        let pre: usize = self.factors[..i].iter().map(|f| f.dimension).product();
        let post: usize = self.factors[i + 1..].iter().map(|f| f.dimension).product();
        Mat::<Rat>::identity(pre).kron(m).kron(&Mat::identity(post))
    }

    /// The gl unit `E_ab` acting at one site.
    pub fn unit_at(&self, i: usize, a: usize, b: usize) -> Mat<Rat> {
        self.at_site(i, self.factors[i].unit(a, b))
    }

    /// An arbitrary gl element (defining-rep matrix) acting at one site.
    pub fn apply_gl_at(&self, i: usize, x: &Mat<Rat>) -> Mat<Rat> {
        self.at_site(i, &self.factors[i].apply_gl(x))
    }

    /// An algebra element acting diagonally, `sum_i x^{(i)}`.
    pub fn apply_gl_diagonal(&self, x: &Mat<Rat>) -> Mat<Rat> {
        let mut out = Mat::<Rat>::zeros(self.dimension, self.dimension);
        for i in 0..self.num_sites() {
            out.add_assign(&self.apply_gl_at(i, x));
        }
        out
    }

    /// Gram matrix of the product Hermitian form.
    pub fn gram(&self) -> Mat<Rat> {
        let mut g = Mat::<Rat>::identity(1);
        for f in &self.factors {
            g = g.kron(&f.hermitian_gram);
        }
        g
    }

    /// Factor indices of a product-basis index, most significant first.
    pub fn split_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.num_sites()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            out[i] = idx % f.dimension;
            idx /= f.dimension;
        }
        out
    }

    pub fn gl_weight_of(&self, idx: usize) -> Vec<i64> {
        let parts = self.split_index(idx);
        let mut w = vec![0i64; self.n()];
        for (i, f) in self.factors.iter().enumerate() {
            for (a, x) in f.gl_weights[parts[i]].iter().enumerate() {
                w[a] += x;
            }
        }
        w
    }
}

/// Character of the principal grading: coefficient of `q^k` is the dimension
/// of the k-th graded piece, graded by the principal coweight (the half-sum
/// of positive coroots) and shifted so the lowest piece sits in degree 0.
pub fn principal_grading_character(module: &IrreducibleModule) -> Poly<Rat> {
    let n = module.n as i64;
    // Twice the principal coweight's diagonal entry at position a is n-1-2a,
    // so twice the grading of a basis vector is an integer of fixed parity.
    let doubled: Vec<i64> = module
        .gl_weights
        .iter()
        .map(|gw| {
            gw.iter()
                .enumerate()
                .map(|(a, &w)| w * (n - 1 - 2 * a as i64))
                .sum()
        })
        .collect();
    let min = *doubled.iter().min().expect("nonempty module");
    let mut counts: Vec<Rat> = Vec::new();
    for d in &doubled {
        let deg = ((d - min) / 2) as usize;
        debug_assert_eq!((d - min) % 2, 0);
        if counts.len() <= deg {
            counts.resize(deg + 1, Rat::zero());
        }
        counts[deg] += Rat::one();
    }
    Poly::from_coeffs(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{build_root_system, q_weyl_dimension};

    fn a_label(rank: usize) -> TypeLabel {
        TypeLabel::new(Series::A, rank).unwrap()
    }

    fn wt(coords: &[i64]) -> Weight {
        Weight::from_ints(coords)
    }

    #[test]
    fn defining_rep_of_sl2() {
        let m = build_irreducible(a_label(1), &wt(&[1])).unwrap();
        assert_eq!(m.dimension, 2);
        let e = m.e(0);
        let f = m.f(0);
        let h = m.h(0);
        assert_eq!(e, Mat::unit_entry(2, 0, 1, Rat::one()));
        assert_eq!(f, Mat::unit_entry(2, 1, 0, Rat::one()));
        let mut hh = Mat::<Rat>::zeros(2, 2);
        hh[(0, 0)] = Rat::one();
        hh[(1, 1)] = -Rat::one();
        assert_eq!(h, hh);
        assert_eq!(m.hermitian_gram, Mat::identity(2));
        assert_eq!(m.weight_of_basis_vector[0], wt(&[1]));
        assert_eq!(m.weight_of_basis_vector[1], wt(&[-1]));
    }

    #[test]
    fn chevalley_relations_hold_exactly() {
        for (rank, lam) in [(1usize, vec![4i64]), (2, vec![1, 1]), (2, vec![2, 0])] {
            let label = a_label(rank);
            let m = build_irreducible(label, &wt(&lam)).unwrap();
            let rsd = build_root_system(&label.to_string()).unwrap();
            for i in 0..rank {
                for j in 0..rank {
                    let ef = Mat::commutator(&m.e(i), &m.f(j));
                    if i == j {
                        assert_eq!(ef, m.h(i));
                    } else {
                        assert!(ef.is_zero());
                    }
                    let he = Mat::commutator(&m.h(i), &m.e(j));
                    let aij = &rsd.cartan_matrix[(i, j)];
                    assert_eq!(he, m.e(j).scale(aij));
                    let hf = Mat::commutator(&m.h(i), &m.f(j));
                    assert_eq!(hf, m.f(j).scale(&-aij.clone()));
                }
            }
            // Highest vector is annihilated by every raising generator.
            for i in 0..rank {
                let col = m.e(i).col(m.highest_vector_index);
                assert!(col.iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn dimensions_match_weyl_formula() {
        // build_irreducible cross-checks against the Weyl dimension internally;
        // spot-check the reported values too.
        let cases = [
            (1usize, vec![0i64], 1usize),
            (1, vec![1], 2),
            (1, vec![4], 5),
            (2, vec![1, 0], 3),
            (2, vec![0, 1], 3),
            (2, vec![1, 1], 8),
            (2, vec![2, 1], 15),
            (3, vec![0, 1, 0], 6),
        ];
        for (rank, lam, dim) in cases {
            let m = build_irreducible(a_label(rank), &wt(&lam)).unwrap();
            assert_eq!(m.dimension, dim, "A{rank} {lam:?}");
        }
    }

    #[test]
    fn adjoint_of_sl3_has_double_zero_weight() {
        let m = build_irreducible(a_label(2), &wt(&[1, 1])).unwrap();
        let zero_count = m
            .weight_of_basis_vector
            .iter()
            .filter(|w| w.coords.iter().all(|c| c.is_zero()))
            .count();
        assert_eq!(zero_count, 2);
    }

    #[test]
    fn gram_makes_raising_and_lowering_adjoint() {
        for (rank, lam) in [(1usize, vec![3i64]), (2, vec![1, 1])] {
            let m = build_irreducible(a_label(rank), &wt(&lam)).unwrap();
            let g = &m.hermitian_gram;
            for i in 0..rank {
                // <f x, y> = <x, e y> reads f^T G = G e on matrices.
                assert_eq!(m.f(i).transpose().matmul(g), g.matmul(&m.e(i)));
                assert_eq!(m.h(i).transpose().matmul(g), g.matmul(&m.h(i)));
            }
        }
    }

    #[test]
    fn killing_basis_is_orthonormal() {
        for rank in [1usize, 2] {
            let kb = killing_orthonormal_basis(a_label(rank)).unwrap();
            let n = rank + 1;
            assert_eq!(kb.elements.len(), n * n - 1);
            for (i, (mi, qi)) in kb.elements.iter().enumerate() {
                for (j, (mj, qj)) in kb.elements.iter().enumerate() {
                    let form = killing_form(n, mi, mj);
                    if i == j {
                        assert_eq!(&form, qi);
                        assert!(!qj.is_zero());
                    } else {
                        assert!(form.is_zero(), "off-diagonal pairing {i},{j}");
                    }
                }
            }
        }
        assert!(killing_orthonormal_basis(TypeLabel::parse("B2").unwrap()).is_err());
    }

    #[test]
    fn casimir_reference_values() {
        // Adjoint module: identity. Defining sl_2 module: 3/8.
        let adj2 = build_irreducible(a_label(1), &wt(&[2])).unwrap();
        assert_eq!(adj2.casimir(), Mat::identity(3));
        let def2 = build_irreducible(a_label(1), &wt(&[1])).unwrap();
        assert_eq!(
            def2.casimir(),
            Mat::scalar(2, &Rat::new(3.into(), 8.into()))
        );
        let adj3 = build_irreducible(a_label(2), &wt(&[1, 1])).unwrap();
        assert_eq!(adj3.casimir(), Mat::identity(8));
        let def3 = build_irreducible(a_label(2), &wt(&[1, 0])).unwrap();
        assert_eq!(
            def3.casimir(),
            Mat::scalar(3, &Rat::new(4.into(), 9.into()))
        );
    }

    #[test]
    fn split_casimir_agrees_with_orthonormal_route() {
        for rank in [1usize, 2] {
            let n = rank + 1;
            let mut direct = Mat::<Rat>::zeros(n * n, n * n);
            for (x, y, c) in split_casimir_summands(n) {
                direct.add_assign(&x.kron(&y).scale(&c));
            }
            let kb = killing_orthonormal_basis(a_label(rank)).unwrap();
            let mut via_basis = Mat::<Rat>::zeros(n * n, n * n);
            for (m, q) in &kb.elements {
                via_basis.add_assign(&m.kron(m).scale(&(Rat::one() / q)));
            }
            assert_eq!(direct, via_basis);
        }
    }

    #[test]
    fn split_casimir_sl2_closed_form() {
        // (e x f + f x e)/4 + (h x h)/8.
        let e = Mat::unit_entry(2, 0, 1, Rat::one());
        let f = Mat::unit_entry(2, 1, 0, Rat::one());
        let mut h = Mat::<Rat>::zeros(2, 2);
        h[(0, 0)] = Rat::one();
        h[(1, 1)] = -Rat::one();
        let quarter = Rat::new(1.into(), 4.into());
        let eighth = Rat::new(1.into(), 8.into());
        let expected = e
            .kron(&f)
            .add(&f.kron(&e))
            .scale(&quarter)
            .add(&h.kron(&h).scale(&eighth));
        let mut direct = Mat::<Rat>::zeros(4, 4);
        for (x, y, c) in split_casimir_summands(2) {
            direct.add_assign(&x.kron(&y).scale(&c));
        }
        assert_eq!(direct, expected);
    }

    #[test]
    fn principal_character_matches_q_dimension() {
        let a1 = build_root_system("A1").unwrap();
        for lam in [vec![0i64], vec![1], vec![2], vec![3], vec![4]] {
            let m = build_irreducible(a_label(1), &wt(&lam)).unwrap();
            let chi = q_weyl_dimension(&a1, &wt(&lam)).unwrap();
            assert_eq!(principal_grading_character(&m), chi, "A1 {lam:?}");
        }
        let a2 = build_root_system("A2").unwrap();
        for lam in [vec![1i64, 0], vec![0, 1], vec![1, 1], vec![2, 0]] {
            let m = build_irreducible(a_label(2), &wt(&lam)).unwrap();
            let chi = q_weyl_dimension(&a2, &wt(&lam)).unwrap();
            assert_eq!(principal_grading_character(&m), chi, "A2 {lam:?}");
        }
        // Frozen small cases.
        let m = build_irreducible(a_label(1), &wt(&[2])).unwrap();
        assert_eq!(
            principal_grading_character(&m),
            Poly::from_coeffs(vec![Rat::one(), Rat::one(), Rat::one()])
        );
    }

    #[test]
    fn tensor_sites_commute() {
        let v1 = build_irreducible(a_label(1), &wt(&[1])).unwrap();
        let t = TensorModule::new(vec![v1.clone(), v1.clone(), v1]).unwrap();
        assert_eq!(t.dimension, 8);
        let x = t.at_site(0, &t.factors[0].e(0));
        let y = t.at_site(2, &t.factors[2].f(0));
        assert_eq!(x.matmul(&y), y.matmul(&x));
        // Weight bookkeeping: the top product vector has gl-weight (3, 0).
        assert_eq!(t.gl_weight_of(0), vec![3, 0]);
        assert_eq!(t.gl_weight_of(t.dimension - 1), vec![0, 3]);
        assert_eq!(t.gram(), Mat::identity(8));
    }

    #[test]
    fn invalid_module_requests_are_rejected() {
        assert!(matches!(
            build_irreducible(TypeLabel::parse("B2").unwrap(), &wt(&[1, 0])),
            Err(Error::NonASeriesModule)
        ));
        assert!(matches!(
            build_irreducible(a_label(1), &wt(&[-1])),
            Err(Error::NonDominantWeight(_))
        ));
        assert!(matches!(
            build_irreducible(a_label(2), &wt(&[1])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn module_serialization_round_trip() {
        let m = build_irreducible(a_label(2), &wt(&[1, 1])).unwrap();
        let v = m.to_json();
        let back = IrreducibleModule::from_json(&v).unwrap();
        assert_eq!(back, m);
    }
}
