//! Commuting Hamiltonian families on tensor products of sl_n modules:
//! the homogeneous quadratic Hamiltonians, their inhomogeneous shifts by an
//! algebra element, cyclicity checks, and the principal contraction.
//!
//! All operator constructions are generic over the scalar field, so the same
//! code path produces exact rational, Gaussian-rational, and floating
//! families.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::mat::{InsertOutcome, Mat, RowSpaceBasis};
use crate::modules::{TensorModule, split_casimir_summands};
use crate::{Error, Rat, Result, Scalar};

/// A named family of operators on one module, expected to commute pairwise.
#[derive(Clone, Debug)]
pub struct OperatorFamily<S: Scalar> {
    pub name: String,
    pub labels: Vec<String>,
    pub operators: Vec<Mat<S>>,
    /// Parameter record for reports (marked points, shift element, weights).
    pub params: Value,
}

impl<S: Scalar> OperatorFamily<S> {
    pub fn dimension(&self) -> usize {
        self.operators.first().map_or(0, Mat::rows)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn to_c64(&self) -> OperatorFamily<crate::C64> {
        OperatorFamily {
            name: self.name.clone(),
            labels: self.labels.clone(),
            operators: self.operators.iter().map(Mat::to_c64).collect(),
            params: self.params.clone(),
        }
    }

    /// Verifies pairwise commutativity: exact equality for exact scalars, a
    /// relative Frobenius bound for floating ones.
    pub fn check_commutativity(&self) -> Result<()> {
        for i in 0..self.operators.len() {
            for j in i + 1..self.operators.len() {
                let c = Mat::commutator(&self.operators[i], &self.operators[j]);
                let ok = if S::is_exact() {
                    c.is_zero()
                } else {
                    let scale = 1.0
                        + self.operators[i].frobenius_est()
                            * self.operators[j].frobenius_est();
                    c.frobenius_est() < 1e-10 * scale
                };
                if !ok {
                    return Err(Error::CommutativityGate(format!(
                        "[{}, {}] != 0 in family {}",
                        self.labels[i], self.labels[j], self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Whether `a` is self-adjoint for the Hermitian form with Gram matrix
/// `gram`, i.e. `a^H G = G a` exactly.
pub fn is_self_adjoint<S: Scalar>(a: &Mat<S>, gram: &Mat<S>) -> bool {
    a.dagger().matmul(gram) == gram.matmul(a)
}

pub(crate) fn check_distinct<S: Scalar>(z: &[S]) -> Result<()> {
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            if z[i] == z[j] {
                return Err(Error::CoincidentPoints);
            }
        }
    }
    Ok(())
}

/// The split Casimir acting at sites `i != k`, an exact rational matrix.
pub fn pair_casimir(module: &TensorModule, i: usize, k: usize) -> Mat<Rat> {
    let mut out = Mat::<Rat>::zeros(module.dimension, module.dimension);
    for (x, y, c) in split_casimir_summands(module.n()) {
        let xi = module.apply_gl_at(i, &x);
        let yk = module.apply_gl_at(k, &y);
        out.add_assign(&xi.matmul(&yk).scale(&c));
    }
    out
}

fn site_term<S: Scalar>(module: &TensorModule, i: usize, mu: &Mat<S>) -> Mat<S> {
    let n = module.n();
    let mut out = Mat::<S>::zeros(module.dimension, module.dimension);
    for a in 0..n {
        for b in 0..n {
            let c = &mu[(a, b)];
            if !c.is_zero() {
                let emb = module.unit_at(i, a, b).map(|r| S::from_rat(r));
                out.add_assign(&emb.scale(c));
            }
        }
    }
    out
}

fn hamiltonian_family<S: Scalar>(
    module: &TensorModule,
    z: &[S],
    mu: Option<&Mat<S>>,
    name: &str,
) -> Result<OperatorFamily<S>> {
    let sites = module.num_sites();
    if z.len() != sites {
        return Err(Error::DimensionMismatch(format!(
            "{} marked points for {} sites",
            z.len(),
            sites
        )));
    }
    check_distinct(z)?;
    let dim = module.dimension;
    let mut ops = vec![Mat::<S>::zeros(dim, dim); sites];
    for i in 0..sites {
        for k in i + 1..sites {
            let omega = pair_casimir(module, i, k).map(|r| S::from_rat(r));
            let dz = z[i].clone() - z[k].clone();
            let inv_ik = S::one() / dz.clone();
            let inv_ki = -(S::one() / dz);
            ops[i].add_assign(&omega.scale(&inv_ik));
            ops[k].add_assign(&omega.scale(&inv_ki));
        }
    }
    if let Some(m) = mu {
        if (m.rows(), m.cols()) != (module.n(), module.n()) {
            return Err(Error::DimensionMismatch(format!(
                "shift element is {}x{}, algebra needs {}x{}",
                m.rows(),
                m.cols(),
                module.n(),
                module.n()
            )));
        }
        let tr = m.trace();
        let traceless = if S::is_exact() {
            tr.is_zero()
        } else {
            tr.abs_est() < 1e-9 * (1.0 + m.max_abs_est())
        };
        if !traceless {
            return Err(Error::InvalidParameter(
                "shift element must be traceless".into(),
            ));
        }
        for i in 0..sites {
            ops[i].add_assign(&site_term(module, i, m));
        }
    }
    Ok(OperatorFamily {
        name: name.to_string(),
        labels: (1..=sites).map(|i| format!("H_{i}")).collect(),
        operators: ops,
        params: json!({
            "sites": sites,
            "dimension": dim,
            "z": z.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "mu": mu.map(|m| format!("{m:?}")),
        }),
    })
}

/// Quadratic Hamiltonians `H_i = sum_{k != i} Omega^{(i,k)} / (z_i - z_k)`.
pub fn homogeneous_hamiltonians<S: Scalar>(
    module: &TensorModule,
    z: &[S],
) -> Result<OperatorFamily<S>> {
    if module.num_sites() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two sites; the one-point family is the shifted one".into(),
        ));
    }
    hamiltonian_family(module, z, None, "homogeneous")
}

/// Inhomogeneous Hamiltonians: the quadratic part plus the one-site term of
/// the shift element.
///
/// The shift is an element of the algebra given by its defining-representation
/// matrix, identified with a functional via the Killing form; expanding the
/// functional over a Killing-orthonormal basis reproduces the element itself,
/// so the extra term at site `i` is just the action of the matrix there.
pub fn inhomogeneous_hamiltonians<S: Scalar>(
    module: &TensorModule,
    z: &[S],
    mu: &Mat<S>,
) -> Result<OperatorFamily<S>> {
    hamiltonian_family(module, z, Some(mu), "inhomogeneous")
}

/// Dimension of the smallest subspace containing `start` and stable under all
/// the operators, by exact closure. Meaningful for exact scalar types.
pub fn cyclic_span_dimension<S: Scalar>(start: &[S], operators: &[Mat<S>]) -> usize {
    if start.iter().all(|x| x.is_zero()) {
        return 0;
    }
    let mut span = RowSpaceBasis::<S>::new(start.len());
    span.insert(start);
    let mut raw = vec![start.to_vec()];
    let mut head = 0;
    while head < raw.len() {
        for op in operators {
            let w = op.matvec(&raw[head]);
            if w.iter().all(|x| x.is_zero()) {
                continue;
            }
            if let InsertOutcome::Added { .. } = span.insert(&w) {
                raw.push(w);
            }
        }
        head += 1;
    }
    span.rank()
}

/// The principal sl_2 triple `(e, h, f)` of sl_n in the defining
/// representation: `e` the sum of superdiagonal units, `h` the principal
/// Cartan element, `f` weighted subdiagonal units with `[e, f] = h`.
pub fn principal_triple(n: usize) -> (Mat<Rat>, Mat<Rat>, Mat<Rat>) {
    let mut e = Mat::<Rat>::zeros(n, n);
    let mut h = Mat::<Rat>::zeros(n, n);
    let mut f = Mat::<Rat>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Rat::from_integer((n as i64 - 1 - 2 * i as i64).into());
    }
    for i in 0..n - 1 {
        e[(i, i + 1)] = Rat::from_integer(1.into());
        let c = ((i + 1) * (n - 1 - i)) as i64;
        f[(i + 1, i)] = Rat::from_integer(c.into());
    }
    (e, h, f)
}

/// Verifies the principal contraction `f + x -> f`: conjugating by the
/// one-parameter subgroup of the principal coweight and rescaling by the
/// square of the parameter leaves `f` in degree zero and pushes everything
/// else to strictly negative degrees, exactly as a Laurent identity.
///
/// `x` must centralize the principal nilpotent `e`.
pub fn principal_contraction_check(n: usize, x: &Mat<Rat>) -> Result<bool> {
    let (e, _h, f) = principal_triple(n);
    if !Mat::commutator(&e, x).is_zero() {
        return Err(Error::NotInCentralizer);
    }
    let m = f.add(x);
    // Entry (i, j) of Ad of the subgroup element scales by t^{2(i-j)}; with
    // the overall t^{-2} the Laurent degree of entry (i, j) is 2(i-j) - 2.
    let mut degree_zero = Mat::<Rat>::zeros(n, n);
    let mut positive_degree_present = false;
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)].is_zero() {
                continue;
            }
            let deg = 2 * (i as i64 - j as i64) - 2;
            if deg == 0 {
                degree_zero[(i, j)] = m[(i, j)].clone();
            } else if deg > 0 {
                positive_degree_present = true;
            }
        }
    }
    Ok(!positive_degree_present && degree_zero == f)
}
