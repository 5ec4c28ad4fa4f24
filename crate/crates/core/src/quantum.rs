//! Quantum argument-shift families.
//!
//! The generating object is the column determinant of
//!
//! ```text
//!     d/dz  -  M  -  sum_k E^{(k)} / (z - z_k)
//! ```
//!
//! acting in U(gl_n)^{(N)}[d/dz] with Laurent coefficients, where `M`
//! places the shift matrix and `E` is the matrix of generator units.
//! Expanding the determinant column by column and collecting the
//! coefficient of each (pole order, derivative power) slot yields a
//! family of elements of the tensor-product enveloping algebra that
//! commute pairwise; evaluated on a module they give the quantum
//! shift-of-argument operators.
//!
//! Index conventions are pinned so that three facts hold at once:
//! the coefficients commute, their top symbols reproduce the classical
//! shift-of-argument polynomials, and the quadratic members span the
//! usual (inhomogeneous) quadratic Hamiltonians.  Concretely the entry
//! in row r, column c of the connection matrix is
//! `delta_rc d/dz - mu[c][r] - sum_k E_rc^{(k)}/(z - z_k)`: the shift
//! matrix enters through the trace pairing of gl_n with its dual, which
//! transposes indices, while the generator matrix does not.

use num_traits::{One, Zero};
use serde_json::json;

use crate::gaudin::{check_distinct, OperatorFamily};
use crate::json::{qmat_to_value, rat_vec_to_value};
use crate::mat::{Mat, RowSpaceBasis};
use crate::modules::TensorModule;
use crate::pbw::{CoefKey, UOp, UglElem};
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result};

/// All permutations of `{0, .., n-1}` with their signs.
fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i64)>) {
        if cur.len() == n {
            let mut inv = 0i64;
            for i in 0..n {
                for j in i + 1..n {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// Entry (r, c) of the connection matrix as an element of the
/// coefficient-ring/enveloping-algebra composite.
fn connection_entry(
    n: usize,
    sites: usize,
    zs: &[Rat],
    mu: &Mat<Rat>,
    r: usize,
    c: usize,
) -> UOp {
    let mut m = UOp::zero(n as u8, sites as u8, zs.to_vec());
    if r == c {
        m.add_term(CoefKey::Pow(0), 1, UglElem::scalar(n as u8, sites as u8, Rat::one()));
    }
    let shift = mu[(c, r)].clone();
    if !shift.is_zero() {
        m.add_term(CoefKey::Pow(0), 0, UglElem::scalar(n as u8, sites as u8, -shift));
    }
    for k in 0..sites {
        let gen = UglElem::generator(n as u8, sites as u8, k as u8, r as u8, c as u8);
        m.add_term(CoefKey::Pole(k as u8, 1), 0, gen.neg());
    }
    m
}

/// Column determinant of the connection matrix: the sum over
/// permutations of signed products taken column by column, left to
/// right.  Ordering matters because the entries do not commute.
pub fn cdet_connection(n: usize, zs: &[Rat], mu: &Mat<Rat>) -> UOp {
    let sites = zs.len();
    let entries: Vec<Vec<UOp>> = (0..n)
        .map(|r| (0..n).map(|c| connection_entry(n, sites, zs, mu, r, c)).collect())
        .collect();
    let mut out = UOp::zero(n as u8, sites as u8, zs.to_vec());
    for (perm, sign) in permutations_with_sign(n) {
        let mut prod = entries[perm[0]][0].clone();
        for (c, &r) in perm.iter().enumerate().skip(1) {
            prod = prod.mul(&entries[r][c]);
        }
        let s = Rat::from_int(sign);
        for ((key, dpow), elem) in &prod.terms {
            out.add_term(*key, *dpow, elem.scale(&s));
        }
    }
    out
}

/// One abstract member of the family: `degree` is the invariant degree
/// it quantizes, `order` the pole order at the marked point `site`.
pub struct QuantumCoefficient {
    pub degree: usize,
    pub order: usize,
    pub site: usize,
    pub elem: UglElem,
}

/// The coefficients of the column determinant that carry an operator
/// part, normalized so that the top symbol of the `(degree, order)`
/// member is the classical shift-of-argument polynomial obtained from
/// the degree-`degree` invariant by `degree - order` directional
/// derivatives along the shift matrix.
pub fn cdet_coefficients(n: usize, zs: &[Rat], mu: &Mat<Rat>) -> Result<Vec<QuantumCoefficient>> {
    let det = cdet_connection(n, zs, mu);
    let mut out = Vec::new();
    for ((key, dpow), elem) in &det.terms {
        if elem.as_scalar().is_some() {
            continue;
        }
        let (site, order) = match key {
            CoefKey::Pole(i, m) => (*i as usize, *m as usize),
            CoefKey::Pow(_) => {
                return Err(Error::Internal(
                    "column determinant has an operator coefficient without a pole".into(),
                ))
            }
        };
        let degree = n - *dpow as usize;
        if order > degree {
            return Err(Error::Internal(
                "pole order of a determinant coefficient exceeds its invariant degree".into(),
            ));
        }
        let mut norm = Rat::one();
        for j in 1..=(degree - order) {
            norm = norm * Rat::from_int(j as i64);
        }
        if degree % 2 == 1 {
            norm = -norm;
        }
        out.push(QuantumCoefficient { degree, order, site, elem: elem.scale(&norm) });
    }
    Ok(out)
}

/// A shift matrix is regular when its powers `I, m, .., m^{n-1}` are
/// linearly independent, equivalently its centralizer has dimension n.
pub fn is_regular_element(mu: &Mat<Rat>) -> bool {
    let n = mu.rows();
    let mut basis = RowSpaceBasis::<Rat>::new(n * n);
    let mut p = Mat::<Rat>::identity(n);
    for _ in 0..n {
        basis.insert(&p.vectorize());
        p = p.matmul(mu);
    }
    basis.rank() == n
}

/// Quantum shift-of-argument family on a tensor module, one marked
/// point per factor.
///
/// The `mu` argument is the same shift element the Hamiltonian
/// builders take: an element of the algebra, identified with a
/// functional through the invariant form `2n * trace`.  The
/// determinant slot is a trace-identified object, so it receives
/// `2n * mu`; with that matching the span of the family together with
/// the identity contains the quadratic inhomogeneous Hamiltonians for
/// the same `mu` exactly.
///
/// With `restrict_to_sl` the shift matrix must be traceless and every
/// member is recentred so that it is trace-free; members that act as
/// scalars are dropped either way.  Commutativity of what remains is
/// checked exactly and failure is an error, never a silent
/// degradation.
pub fn quantum_mf_family(
    module: &TensorModule,
    z: &[Rat],
    mu: &Mat<Rat>,
    restrict_to_sl: bool,
) -> Result<OperatorFamily<Rat>> {
    let n = module.n();
    let sites = module.num_sites();
    if z.len() != sites {
        return Err(Error::DimensionMismatch(format!(
            "{} marked points for {} sites",
            z.len(),
            sites
        )));
    }
    check_distinct(z)?;
    if sites == 1 && !z[0].is_zero() {
        return Err(Error::InvalidParameter(
            "a single marked point is pinned to the origin".into(),
        ));
    }
    if (mu.rows(), mu.cols()) != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "shift element is {}x{}, algebra needs {}x{}",
            mu.rows(),
            mu.cols(),
            n,
            n
        )));
    }
    if restrict_to_sl && !mu.trace().is_zero() {
        return Err(Error::InvalidParameter(
            "restriction to the traceless subalgebra needs a traceless shift".into(),
        ));
    }
    let regular = is_regular_element(mu);
    let mut warnings: Vec<String> = Vec::new();
    if !regular {
        warnings.push(
            "shift element is not regular; the family may be smaller than generic".into(),
        );
    }

    let slot = mu.scale(&Rat::from_int(2 * n as i64));
    let dim = module.dimension;
    let dim_rat = Rat::from_int(dim as i64);
    let mut labels = Vec::new();
    let mut operators = Vec::new();
    for qc in cdet_coefficients(n, z, &slot)? {
        let mut op = qc.elem.evaluate(module);
        let mean = op.trace() / dim_rat.clone();
        let centred = op.sub(&Mat::scalar(dim, &mean));
        if centred.is_zero() {
            continue;
        }
        if restrict_to_sl {
            op = centred;
        }
        let label = if sites == 1 {
            format!("q[{},{}]", qc.degree, qc.order)
        } else {
            format!("q[{},{}]@{}", qc.degree, qc.order, qc.site)
        };
        labels.push(label);
        operators.push(op);
    }

    let family = OperatorFamily {
        name: "quantum shift-of-argument family".into(),
        labels,
        operators,
        params: json!({
            "z": rat_vec_to_value(z),
            "mu": qmat_to_value(mu),
            "restricted_to_sl": restrict_to_sl,
            "regular_shift": regular,
            "warnings": warnings,
        }),
    };
    family.check_commutativity()?;
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{classical_mf_generators, elementary_invariant, ClassicalMFGenerators};
    use crate::gaudin::inhomogeneous_hamiltonians;
    use crate::modules::{build_irreducible, TensorModule};
    use crate::roots::{TypeLabel, Weight};

    fn r(k: i64) -> Rat {
        Rat::from_int(k)
    }

    fn rmat(n: usize, entries: &[i64]) -> Mat<Rat> {
        Mat::from_fn(n, n, |i, j| r(entries[i * n + j]))
    }

    fn a1_module(weights: &[i64]) -> TensorModule {
        let factors = weights
            .iter()
            .map(|&w| {
                build_irreducible(TypeLabel::parse("A1").unwrap(), &Weight::from_ints(&[w]))
                    .unwrap()
            })
            .collect();
        TensorModule::new(factors).unwrap()
    }

    #[test]
    fn column_determinant_coefficients_commute() {
        for (n, entries) in [
            (2usize, vec![1i64, 2, 3, -1]),
            (3, vec![1, 2, 0, 1, 3, 1, 0, 1, -4]),
        ] {
            let mu = rmat(n, &entries);
            let coefs = cdet_coefficients(n, &[Rat::zero()], &mu).unwrap();
            let expected = n * (n + 1) / 2;
            assert_eq!(coefs.len(), expected);
            for i in 0..coefs.len() {
                for j in i + 1..coefs.len() {
                    let c = UglElem::commutator(&coefs[i].elem, &coefs[j].elem);
                    assert!(
                        c.is_zero(),
                        "coefficients ({},{}) and ({},{}) fail to commute for n={}",
                        coefs[i].degree,
                        coefs[i].order,
                        coefs[j].degree,
                        coefs[j].order,
                        n
                    );
                }
            }
        }
    }

    #[test]
    fn quantum_symbols_match_classical_generators() {
        for (n, entries) in [
            (2usize, vec![1i64, 2, 3, -1]),
            (3, vec![1, 2, 0, 1, 3, 1, 0, 1, -4]),
        ] {
            let mu = rmat(n, &entries);
            let classical = classical_mf_generators(n, &mu).unwrap();
            let coefs = cdet_coefficients(n, &[Rat::zero()], &mu).unwrap();
            let mut matched = 0;
            for qc in &coefs {
                let sym = qc.elem.symbol();
                if qc.degree == 1 {
                    assert!(sym.sub(&elementary_invariant(n, 1)).is_zero());
                    continue;
                }
                let gen = classical
                    .generators
                    .iter()
                    .find(|g| {
                        g.invariant_degree == qc.degree
                            && g.derivative_order == qc.degree - qc.order
                    })
                    .expect("classical counterpart exists");
                assert!(
                    sym.sub(&gen.poly).is_zero(),
                    "symbol mismatch at degree {} order {} for n={}",
                    qc.degree,
                    qc.order,
                    n
                );
                matched += 1;
            }
            assert_eq!(matched, ClassicalMFGenerators::expected_count(n));
        }
    }

    #[test]
    fn single_point_sl2_family_is_the_recentred_shift_action() {
        let module = a1_module(&[3]);
        let mu = rmat(2, &[1, 0, 0, -1]);
        let fam = quantum_mf_family(&module, &[Rat::zero()], &mu, true).unwrap();
        // The quadratic member acts as a scalar on an irreducible factor
        // and is dropped; only the linear member survives.  Its action
        // is the form-matched multiple of the shift's weight action.
        assert_eq!(fam.labels, vec!["q[2,1]".to_string()]);
        let expect = Mat::from_fn(4, 4, |i, j| if i == j { r(8 * i as i64 - 12) } else { r(0) });
        assert_eq!(fam.operators[0], expect);
    }

    #[test]
    fn gl2_fundamental_family_has_distinct_eigenvalues() {
        let module = a1_module(&[1]);
        let mu = rmat(2, &[1, 0, 0, -1]);
        let fam = quantum_mf_family(&module, &[Rat::zero()], &mu, false).unwrap();
        assert_eq!(fam.labels, vec!["q[2,1]".to_string()]);
        let expect = Mat::from_fn(2, 2, |i, j| if i == j { r(8 * i as i64 - 4) } else { r(0) });
        assert_eq!(fam.operators[0], expect);
    }

    #[test]
    fn principal_nilpotent_shift_gives_nondiagonalizable_family() {
        let adjoint =
            build_irreducible(TypeLabel::parse("A2").unwrap(), &Weight::from_ints(&[1, 1]))
                .unwrap();
        let module = TensorModule::new(vec![adjoint]).unwrap();
        let mut f = Mat::<Rat>::zeros(3, 3);
        f[(1, 0)] = r(2);
        f[(2, 1)] = r(2);
        let fam = quantum_mf_family(&module, &[Rat::zero()], &f, true).unwrap();
        assert_eq!(fam.params["regular_shift"], serde_json::json!(true));
        assert!(fam.params["warnings"].as_array().unwrap().is_empty());
        assert!(!fam.is_empty());
        let dim = module.dimension;
        let mut some_nonzero = false;
        for op in &fam.operators {
            some_nonzero |= !op.is_zero();
            let mut p = Mat::<Rat>::identity(dim);
            for _ in 0..dim {
                p = p.matmul(op);
            }
            assert!(p.is_zero(), "family member is not nilpotent");
        }
        assert!(some_nonzero, "family acts by zero, nothing to test");
    }

    #[test]
    fn adjoint_module_is_cyclic_over_the_nilpotent_family() {
        use crate::gaudin::cyclic_span_dimension;
        let adjoint =
            build_irreducible(TypeLabel::parse("A2").unwrap(), &Weight::from_ints(&[1, 1]))
                .unwrap();
        let module = TensorModule::new(vec![adjoint]).unwrap();
        let mut f = Mat::<Rat>::zeros(3, 3);
        f[(1, 0)] = r(2);
        f[(2, 1)] = r(2);
        let fam = quantum_mf_family(&module, &[Rat::zero()], &f, true).unwrap();
        let dim = module.dimension;
        let mut top = vec![Rat::zero(); dim];
        top[0] = Rat::one();
        // The f-string alone misses part of the zero weight space; the
        // full family closes the gap.
        let f_op = module.apply_gl_at(0, &f);
        assert!(cyclic_span_dimension(&top, &[f_op]) < dim);
        assert_eq!(cyclic_span_dimension(&top, &fam.operators), dim);
    }

    #[test]
    fn two_point_family_spans_the_quadratic_hamiltonians() {
        let module = a1_module(&[1, 1]);
        let z = [r(0), r(1)];
        let mu = rmat(2, &[1, 0, 0, -1]);
        let fam = quantum_mf_family(&module, &z, &mu, true).unwrap();
        assert!(fam.labels.iter().any(|l| l.ends_with("@0")));
        assert!(fam.labels.iter().any(|l| l.ends_with("@1")));
        let dim = module.dimension;
        let mut span = RowSpaceBasis::<Rat>::new(dim * dim);
        span.insert(&Mat::<Rat>::identity(dim).vectorize());
        for op in &fam.operators {
            span.insert(&op.vectorize());
        }
        let ham = inhomogeneous_hamiltonians(&module, &z, &mu).unwrap();
        for (h, label) in ham.operators.iter().zip(&ham.labels) {
            assert!(
                span.contains(&h.vectorize()),
                "{} is not in the quantum family's span",
                label
            );
        }
    }

    #[test]
    fn degenerate_shift_element_is_allowed_with_a_warning() {
        let module = a1_module(&[1, 1]);
        let z = [r(0), r(1)];
        let mu = Mat::<Rat>::zeros(2, 2);
        let fam = quantum_mf_family(&module, &z, &mu, true).unwrap();
        assert_eq!(fam.params["regular_shift"], serde_json::json!(false));
        assert!(!fam.params["warnings"].as_array().unwrap().is_empty());
        assert!(!fam.is_empty());
    }

    #[test]
    fn parameter_validation_is_strict() {
        let module = a1_module(&[1]);
        let mu = rmat(2, &[1, 0, 0, -1]);
        assert!(matches!(
            quantum_mf_family(&module, &[r(1)], &mu, true),
            Err(Error::InvalidParameter(_))
        ));
        let skew = rmat(2, &[1, 0, 0, 1]);
        assert!(matches!(
            quantum_mf_family(&module, &[Rat::zero()], &skew, true),
            Err(Error::InvalidParameter(_))
        ));
        let pair = a1_module(&[1, 1]);
        assert!(matches!(
            quantum_mf_family(&pair, &[r(0), r(0)], &mu, true),
            Err(Error::CoincidentPoints)
        ));
    }
}
