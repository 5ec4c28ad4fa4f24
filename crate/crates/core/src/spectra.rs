//! Joint spectra of commuting operator families and the large-shift
//! rescaling limit.
//!
//! Two arithmetic modes meet here.  Families whose members are exactly
//! diagonal are read off in exact arithmetic.  Everything else crosses
//! a single explicit boundary into complex floating point, where a
//! family that is self-adjoint for the module's Hermitian form is
//! diagonalized by congruence (Cholesky of the Gram matrix, then one
//! symmetric eigensolve of a random real combination, then a
//! per-member diagonality confirmation).  Families that are not
//! self-adjoint fall back to a common Schur triangularization; the
//! diagonal of the triangular forms still carries the joint
//! eigenvalues, but the returned basis is then only a triangularizing
//! one and the residual field reflects that.

use nalgebra::{Cholesky, DMatrix, Schur, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::gaudin::{inhomogeneous_hamiltonians, OperatorFamily};
use crate::mat::Mat;
use crate::modules::TensorModule;
use crate::poly::Poly;
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result, C64};

/// Which basis the spectrum was computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralBasis {
    /// All operators were exactly diagonal; the basis is a permutation
    /// of the module basis and everything is exact.
    ExactDiagonal,
    /// Congruence transform by the Cholesky factor of the Gram matrix,
    /// then a unitary diagonalization; the basis columns are joint
    /// eigenvectors, orthonormal for the module's Hermitian form.
    HermitianCongruence,
    /// Common Schur basis of the family; columns triangularize every
    /// member but are joint eigenvectors only for the leading one.
    SchurTriangular,
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    pub seed: u64,
    /// Relative tolerance for diagonality / triangularity confirmation.
    pub tol: f64,
    /// Tuples closer than this (after per-operator normalization to a
    /// unit spectral radius estimate) are one cluster.
    pub cluster_tol: f64,
    /// Combination resampling attempts before giving up.
    pub resamples: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { seed: 7, tol: 1e-10, cluster_tol: 1e-8, resamples: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct JointSpectrum {
    /// One representative tuple per cluster, lexicographically sorted
    /// by (re, im) of the successive entries.
    pub eigenvalue_tuples: Vec<Vec<C64>>,
    pub multiplicities: Vec<usize>,
    /// Basis columns, grouped to follow the tuple order.
    pub eigenvectors: Mat<C64>,
    /// Smallest normalized distance between distinct tuples
    /// (infinite when there is a single cluster).
    pub min_gap: f64,
    pub basis: SpectralBasis,
    /// Worst eigen-equation residual over all members and columns,
    /// relative to the member's scale.  Meaningful for the diagonal
    /// and Hermitian bases; informational for the Schur basis.
    pub max_residual: f64,
    /// Human-readable flags: clusters merged from visibly distinct
    /// tuples, or distinct clusters separated by less than ten times
    /// the clustering tolerance.  Never silently dropped.
    pub ambiguities: Vec<String>,
}

impl JointSpectrum {
    pub fn distinct_count(&self) -> usize {
        self.eigenvalue_tuples.len()
    }

    /// Simple joint spectrum: every multiplicity is one and no
    /// clustering call was ambiguous.
    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1) && self.ambiguities.is_empty()
    }
}

fn mat_to_na(m: &Mat<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn na_max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Per-coordinate scales: spectral radius estimates from the tuples
/// themselves, floored at one for coordinates that are essentially zero.
fn tuple_scales(raw: &[Vec<C64>]) -> Vec<f64> {
    let k = raw.first().map(Vec::len).unwrap_or(0);
    (0..k)
        .map(|i| {
            let m = raw.iter().map(|t| t[i].norm()).fold(0.0, f64::max);
            if m > 1e-12 {
                m
            } else {
                1.0
            }
        })
        .collect()
}

fn tuple_distance(a: &[C64], b: &[C64], scales: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(scales)
        .map(|((x, y), s)| (*x - *y).norm() / s)
        .fold(0.0, f64::max)
}

fn lex_key_less(a: &[C64], b: &[C64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.re.total_cmp(&y.re) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
        match x.im.total_cmp(&y.im) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

struct Clustering {
    reps: Vec<Vec<C64>>,
    mults: Vec<usize>,
    /// Original column indices, grouped cluster by cluster.
    order: Vec<usize>,
    min_gap: f64,
    ambiguities: Vec<String>,
}

/// Groups tuples at distance below `tol` (union of all links, so
/// clusters are never split heuristically) and sorts the clusters
/// lexicographically by their mean tuple.
fn cluster_tuples(raw: &[Vec<C64>], tol: f64) -> Clustering {
    let dim = raw.len();
    let scales = tuple_scales(raw);
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..dim {
        for j in i + 1..dim {
            if tuple_distance(&raw[i], &raw[j], &scales) < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; dim];
    for i in 0..dim {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(c) => members[c].push(i),
            None => {
                root_of[r] = Some(members.len());
                members.push(vec![i]);
            }
        }
    }
    let k = raw[0].len();
    let mut clusters: Vec<(Vec<C64>, Vec<usize>, f64)> = members
        .into_iter()
        .map(|ms| {
            let mut mean = vec![C64::new(0.0, 0.0); k];
            for &m in &ms {
                for (acc, v) in mean.iter_mut().zip(&raw[m]) {
                    *acc += v;
                }
            }
            let inv = 1.0 / ms.len() as f64;
            for acc in &mut mean {
                *acc *= C64::new(inv, 0.0);
            }
            let mut diam = 0.0f64;
            for a in 0..ms.len() {
                for b in a + 1..ms.len() {
                    diam = diam.max(tuple_distance(&raw[ms[a]], &raw[ms[b]], &scales));
                }
            }
            (mean, ms, diam)
        })
        .collect();
    clusters.sort_by(|a, b| {
        if lex_key_less(&a.0, &b.0) {
            std::cmp::Ordering::Less
        } else if lex_key_less(&b.0, &a.0) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });

    let mut ambiguities = Vec::new();
    for (c, (_, _, diam)) in clusters.iter().enumerate() {
        if *diam > tol / 10.0 {
            ambiguities.push(format!(
                "cluster {} merges tuples spread over {:.3e} (tolerance {:.1e}); treated as one multiplicity",
                c, diam, tol
            ));
        }
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let d = tuple_distance(&clusters[i].0, &clusters[j].0, &scales);
            min_gap = min_gap.min(d);
            if d < 10.0 * tol {
                ambiguities.push(format!(
                    "clusters {} and {} are separated by only {:.3e}",
                    i, j, d
                ));
            }
        }
    }
    Clustering {
        reps: clusters.iter().map(|c| c.0.clone()).collect(),
        mults: clusters.iter().map(|c| c.1.len()).collect(),
        order: clusters.into_iter().flat_map(|c| c.1).collect(),
        min_gap,
        ambiguities,
    }
}

/// Simultaneous eigen-decomposition of a commuting family.
///
/// `gram` is the Hermitian form the family is expected to respect; when
/// it is omitted the standard form is used for the self-adjointness
/// test.  Commutativity is re-checked here because it is the
/// precondition everything else rides on.
pub fn joint_spectrum<S: Scalar>(
    family: &OperatorFamily<S>,
    gram: Option<&Mat<Rat>>,
    opts: &SpectrumOptions,
) -> Result<JointSpectrum> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty family has no joint spectrum".into()));
    }
    family.check_commutativity()?;
    let dim = family.dimension();

    if S::is_exact() && family.operators.iter().all(Mat::is_diagonal) {
        return exact_diagonal_spectrum(family, opts);
    }

    let ops: Vec<DMatrix<C64>> = family
        .operators
        .iter()
        .map(|m| mat_to_na(&m.to_c64()))
        .collect();
    let g = match gram {
        Some(g) => {
            if (g.rows(), g.cols()) != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "Gram matrix is {}x{}, family dimension is {}",
                    g.rows(),
                    g.cols(),
                    dim
                )));
            }
            DMatrix::from_fn(dim, dim, |i, j| g[(i, j)].to_c64())
        }
        None => DMatrix::<f64>::identity(dim, dim).map(|x| C64::new(x, 0.0)),
    };
    let self_adjoint = ops.iter().all(|h| {
        let lhs = h.adjoint() * &g;
        let rhs = &g * h;
        na_max_abs(&(lhs - rhs)) <= opts.tol * (1.0 + na_max_abs(h)) * (1.0 + na_max_abs(&g))
    });
    if self_adjoint {
        hermitian_spectrum(&ops, &g, dim, opts)
    } else {
        schur_spectrum(&ops, dim, opts)
    }
}

fn exact_diagonal_spectrum<S: Scalar>(
    family: &OperatorFamily<S>,
    _opts: &SpectrumOptions,
) -> Result<JointSpectrum> {
    let dim = family.dimension();
    // Exact grouping first, so multiplicities are certain, then the
    // floating image only for reporting and ordering.
    let mut reps_exact: Vec<Vec<S>> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for j in 0..dim {
        let tuple: Vec<S> = family.operators.iter().map(|m| m[(j, j)].clone()).collect();
        match reps_exact.iter().position(|r| *r == tuple) {
            Some(c) => members[c].push(j),
            None => {
                reps_exact.push(tuple);
                members.push(vec![j]);
            }
        }
    }
    let mut clusters: Vec<(Vec<C64>, Vec<usize>)> = reps_exact
        .iter()
        .zip(members)
        .map(|(r, ms)| (r.iter().map(Scalar::to_c64).collect(), ms))
        .collect();
    clusters.sort_by(|a, b| {
        if lex_key_less(&a.0, &b.0) {
            std::cmp::Ordering::Less
        } else if lex_key_less(&b.0, &a.0) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let reps: Vec<Vec<C64>> = clusters.iter().map(|c| c.0.clone()).collect();
    let scales = tuple_scales(&reps);
    let mut min_gap = f64::INFINITY;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            min_gap = min_gap.min(tuple_distance(&reps[i], &reps[j], &scales));
        }
    }
    let mut vectors = Mat::<C64>::zeros(dim, dim);
    let mut col = 0;
    for (_, ms) in &clusters {
        for &j in ms {
            vectors[(j, col)] = C64::new(1.0, 0.0);
            col += 1;
        }
    }
    Ok(JointSpectrum {
        eigenvalue_tuples: reps,
        multiplicities: clusters.iter().map(|c| c.1.len()).collect(),
        eigenvectors: vectors,
        min_gap,
        basis: SpectralBasis::ExactDiagonal,
        max_residual: 0.0,
        ambiguities: Vec::new(),
    })
}

fn hermitian_spectrum(
    ops: &[DMatrix<C64>],
    g: &DMatrix<C64>,
    dim: usize,
    opts: &SpectrumOptions,
) -> Result<JointSpectrum> {
    let g_real = DMatrix::from_fn(dim, dim, |i, j| g[(i, j)].re);
    let chol = Cholesky::new(g_real)
        .ok_or_else(|| Error::InvalidParameter("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("Cholesky factor is not invertible".into()))?;
    let lc = l.map(|x| C64::new(x, 0.0));
    let lic = l_inv.map(|x| C64::new(x, 0.0));
    let lt = lc.transpose();
    let lit = lic.transpose();
    // K = L^H H L^{-H} is Hermitian exactly when H is self-adjoint for
    // the form; symmetrize to remove roundoff skew.
    let ks: Vec<DMatrix<C64>> = ops
        .iter()
        .map(|h| {
            let k = &lt * h * &lit;
            let ka = k.adjoint();
            (k + ka) * C64::new(0.5, 0.0)
        })
        .collect();

    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let mut chosen: Option<(DMatrix<C64>, Vec<DMatrix<C64>>)> = None;
    'attempt: for _ in 0..=opts.resamples {
        let mut combo = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for k in &ks {
            let c: f64 = rng.gen_range(1.0..2.0);
            combo += k * C64::new(c, 0.0);
        }
        let se = SymmetricEigen::new(combo);
        let u = se.eigenvectors;
        let mut diags = Vec::with_capacity(ks.len());
        for k in &ks {
            let d = u.adjoint() * k * &u;
            let scale = 1.0 + na_max_abs(k);
            for i in 0..dim {
                for j in 0..dim {
                    if i != j && d[(i, j)].norm() > opts.tol * scale {
                        continue 'attempt;
                    }
                }
            }
            diags.push(d);
        }
        chosen = Some((u, diags));
        break;
    }
    let (u, diags) = chosen.ok_or(Error::NotSimultaneouslyDiagonalizable)?;

    let raw: Vec<Vec<C64>> = (0..dim)
        .map(|j| diags.iter().map(|d| d[(j, j)]).collect())
        .collect();
    let clustering = cluster_tuples(&raw, opts.cluster_tol);
    let v = &lit * &u;
    let mut vectors = Mat::<C64>::zeros(dim, dim);
    for (col, &orig) in clustering.order.iter().enumerate() {
        for r in 0..dim {
            vectors[(r, col)] = v[(r, orig)];
        }
    }
    let max_residual = eigen_residual(ops, &v, &raw);
    Ok(JointSpectrum {
        eigenvalue_tuples: clustering.reps,
        multiplicities: clustering.mults,
        eigenvectors: vectors,
        min_gap: clustering.min_gap,
        basis: SpectralBasis::HermitianCongruence,
        max_residual,
        ambiguities: clustering.ambiguities,
    })
}

fn eigen_residual(ops: &[DMatrix<C64>], v: &DMatrix<C64>, raw: &[Vec<C64>]) -> f64 {
    let dim = v.nrows();
    let mut worst = 0.0f64;
    for (i, h) in ops.iter().enumerate() {
        let hv = h * v;
        let scale = 1.0 + na_max_abs(h);
        for j in 0..raw.len() {
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for r in 0..dim {
                num += (hv[(r, j)] - raw[j][i] * v[(r, j)]).norm_sqr();
                den += v[(r, j)].norm_sqr();
            }
            worst = worst.max((num / den.max(1e-300)).sqrt() / scale);
        }
    }
    worst
}

fn schur_spectrum(
    ops: &[DMatrix<C64>],
    dim: usize,
    opts: &SpectrumOptions,
) -> Result<JointSpectrum> {
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let mut chosen: Option<(DMatrix<C64>, Vec<DMatrix<C64>>)> = None;
    'attempt: for _ in 0..=opts.resamples {
        let mut combo = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for h in ops {
            let c: f64 = rng.gen_range(1.0..2.0);
            combo += h * C64::new(c, 0.0);
        }
        let schur = Schur::try_new(combo, 1e-13, 10_000).ok_or_else(|| {
            Error::Unsupported("Schur iteration failed to converge".into())
        })?;
        let (q, _) = schur.unpack();
        let mut tris = Vec::with_capacity(ops.len());
        for h in ops {
            let t = q.adjoint() * h * &q;
            let scale = 1.0 + na_max_abs(&t);
            for i in 0..dim {
                for j in 0..i {
                    if t[(i, j)].norm() > opts.tol.sqrt() * scale {
                        continue 'attempt;
                    }
                }
            }
            tris.push(t);
        }
        chosen = Some((q, tris));
        break;
    }
    let (q, tris) = chosen.ok_or_else(|| {
        Error::Unsupported(
            "family is not simultaneously triangularizable in the sampled Schur bases; \
             a degenerate non-diagonalizable family needs exact treatment"
                .into(),
        )
    })?;
    let raw: Vec<Vec<C64>> = (0..dim)
        .map(|j| tris.iter().map(|t| t[(j, j)]).collect())
        .collect();
    let clustering = cluster_tuples(&raw, opts.cluster_tol);
    let mut vectors = Mat::<C64>::zeros(dim, dim);
    for (col, &orig) in clustering.order.iter().enumerate() {
        for r in 0..dim {
            vectors[(r, col)] = q[(r, orig)];
        }
    }
    let max_residual = eigen_residual(ops, &q, &raw);
    Ok(JointSpectrum {
        eigenvalue_tuples: clustering.reps,
        multiplicities: clustering.mults,
        eigenvectors: vectors,
        min_gap: clustering.min_gap,
        basis: SpectralBasis::SchurTriangular,
        max_residual,
        ambiguities: clustering.ambiguities,
    })
}

fn poly_gcd_is_constant(a: &Poly<Rat>, b: &Poly<Rat>) -> bool {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y);
        x = y;
        y = r;
    }
    x.degree() == Some(0)
}

/// Regular semisimple matrices have squarefree characteristic
/// polynomials: all eigenvalues distinct.
pub fn is_regular_semisimple(mu: &Mat<Rat>) -> bool {
    let p = mu.char_poly();
    poly_gcd_is_constant(&p, &p.derivative())
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub s_values: Vec<Rat>,
    /// Largest angle (radians) between a joint eigenvector of the
    /// family at `s * mu` and the nearest product eigenvector of the
    /// factorwise shift actions, one entry per s.
    pub max_angles: Vec<f64>,
    pub monotone_decreasing: bool,
    pub notes: Vec<String>,
}

/// Checks that for growing `s` the joint eigenvectors of the
/// inhomogeneous family at shift `s * mu` concentrate on the product
/// eigenbasis of the factorwise shift actions.  Angles are measured in
/// the module's invariant Hermitian form.
pub fn rescaling_limit_check(
    module: &TensorModule,
    z: &[Rat],
    mu: &Mat<Rat>,
    s_values: &[Rat],
    opts: &SpectrumOptions,
) -> Result<LimitReport> {
    if !is_regular_semisimple(mu) {
        return Err(Error::InvalidParameter(
            "the rescaling limit needs a regular semisimple shift".into(),
        ));
    }
    if s_values.is_empty() {
        return Err(Error::InvalidParameter("no scale values given".into()));
    }
    for w in s_values.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter("scale values must increase".into()));
        }
    }
    let mut notes = Vec::new();
    let dim = module.dimension;

    // Eigenbases of the shift action on each factor.
    let mut factor_bases: Vec<Mat<C64>> = Vec::new();
    for (i, f) in module.factors.iter().enumerate() {
        let op = f.apply_gl(mu);
        let fam = OperatorFamily {
            name: format!("shift action on factor {i}"),
            labels: vec!["mu".into()],
            operators: vec![op],
            params: serde_json::json!({}),
        };
        let js = joint_spectrum(&fam, Some(&f.hermitian_gram), opts)?;
        if js.multiplicities.iter().any(|&m| m > 1) {
            notes.push(format!(
                "factor {i} has a degenerate shift spectrum; product matching may be ambiguous"
            ));
        }
        // Any eigenbasis works: matching scans all product columns.
        factor_bases.push(js.eigenvectors);
    }

    // Product vectors, indexed like the module basis itself.
    let mut products = Mat::<C64>::zeros(dim, dim);
    for j in 0..dim {
        let js = module.split_index(j);
        for r in 0..dim {
            let rs = module.split_index(r);
            let mut v = C64::new(1.0, 0.0);
            for (i, base) in factor_bases.iter().enumerate() {
                v *= base[(rs[i], js[i])];
            }
            products[(r, j)] = v;
        }
    }
    let g = mat_to_na(&module.gram().to_c64());
    let p_na = mat_to_na(&products);
    let p_norms: Vec<f64> = (0..dim)
        .map(|j| {
            let col = p_na.column(j);
            (col.adjoint() * &g * col)[(0, 0)].re.max(1e-300).sqrt()
        })
        .collect();

    let mut max_angles = Vec::new();
    for s in s_values {
        let scaled = mu.scale(s);
        let fam = inhomogeneous_hamiltonians(module, z, &scaled)?;
        let js = joint_spectrum(&fam, Some(&module.gram()), opts)?;
        let v_na = mat_to_na(&js.eigenvectors);
        let overlaps = v_na.adjoint() * &g * &p_na;
        let mut worst = 0.0f64;
        let mut assigned = vec![usize::MAX; dim];
        for vcol in 0..dim {
            let vnorm = {
                let col = v_na.column(vcol);
                (col.adjoint() * &g * col)[(0, 0)].re.max(1e-300).sqrt()
            };
            let mut best = 0.0f64;
            let mut best_p = 0;
            for pcol in 0..dim {
                let c = overlaps[(vcol, pcol)].norm() / (vnorm * p_norms[pcol]);
                if c > best {
                    best = c;
                    best_p = pcol;
                }
            }
            if assigned.contains(&best_p) {
                notes.push(format!(
                    "s = {}: two eigenvectors match the same product vector {}",
                    crate::scalar::rat_to_str(s),
                    best_p
                ));
            }
            assigned[vcol] = best_p;
            worst = worst.max(best.min(1.0).acos());
        }
        max_angles.push(worst);
    }
    let monotone_decreasing = max_angles.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok(LimitReport { s_values: s_values.to_vec(), max_angles, monotone_decreasing, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{build_irreducible, TensorModule};
    use crate::roots::{TypeLabel, Weight};
    use crate::scalar::GaussRat;
    use num_traits::{One, Zero};
    use serde_json::json;

    fn r(k: i64) -> Rat {
        Rat::from_int(k)
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

    fn plain_family<S: Scalar>(ops: Vec<Mat<S>>) -> OperatorFamily<S> {
        OperatorFamily {
            name: "test".into(),
            labels: (0..ops.len()).map(|i| format!("op{i}")).collect(),
            operators: ops,
            params: json!({}),
        }
    }

    #[test]
    fn already_diagonal_family_reads_off_exactly() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { r(i as i64 + 1) } else { r(0) });
        let b = Mat::from_fn(2, 2, |i, j| if i == j { r(3) } else { r(0) });
        let js = joint_spectrum(&plain_family(vec![a, b]), None, &SpectrumOptions::default())
            .unwrap();
        assert_eq!(js.basis, SpectralBasis::ExactDiagonal);
        assert_eq!(js.multiplicities, vec![1, 1]);
        assert_eq!(js.eigenvalue_tuples.len(), 2);
        assert_eq!(js.eigenvalue_tuples[0], vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0)]);
        assert_eq!(js.eigenvalue_tuples[1], vec![C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        // Coordinate scales are 2 and 3, so the gap is |1-2|/2.
        assert!((js.min_gap - 0.5).abs() < 1e-15);
        assert!(js.ambiguities.is_empty());
    }

    #[test]
    fn imaginary_cartan_shift_has_simple_spectrum() {
        let module = a1_module(&[3]);
        let i = GaussRat::new(Rat::zero(), Rat::one());
        let mut mu = Mat::<GaussRat>::zeros(2, 2);
        mu[(0, 0)] = i.clone();
        mu[(1, 1)] = -i;
        let fam = inhomogeneous_hamiltonians(&module, &[GaussRat::zero()], &mu).unwrap();
        let js = joint_spectrum(&fam, None, &SpectrumOptions::default()).unwrap();
        assert_eq!(js.basis, SpectralBasis::ExactDiagonal);
        assert_eq!(js.distinct_count(), 4);
        assert!(js.is_simple());
        let ims: Vec<f64> = js.eigenvalue_tuples.iter().map(|t| t[0].im).collect();
        assert_eq!(ims, vec![-3.0, -1.0, 1.0, 3.0]);
        assert!(js.min_gap > 0.0);
    }

    #[test]
    fn zero_shift_produces_a_multiplicity_not_a_split() {
        let module = a1_module(&[1, 1]);
        let z = [r(0), r(1)];
        let mu = Mat::<Rat>::zeros(2, 2);
        let fam = inhomogeneous_hamiltonians(&module, &z, &mu).unwrap();
        let js = joint_spectrum(&fam, Some(&module.gram()), &SpectrumOptions::default()).unwrap();
        assert_eq!(js.basis, SpectralBasis::HermitianCongruence);
        // H_1 = -Omega for these points: -1/8 on the top summand (dim 3),
        // 3/8 on the singlet; H_2 = -H_1.
        assert_eq!(js.multiplicities, vec![3, 1]);
        assert!(!js.is_simple());
        assert!(js.ambiguities.is_empty(), "true degeneracy is not an ambiguity");
        assert!(js.max_residual < 1e-8);
        let t0 = &js.eigenvalue_tuples[0];
        assert!((t0[0].re + 0.125).abs() < 1e-10 && (t0[1].re - 0.125).abs() < 1e-10);
        let t1 = &js.eigenvalue_tuples[1];
        assert!((t1[0].re - 0.375).abs() < 1e-10 && (t1[1].re + 0.375).abs() < 1e-10);
    }

    #[test]
    fn hermitian_path_recovers_the_weight_spectrum() {
        // A shift conjugate to the diagonal one: same spectrum, but the
        // operator is no longer diagonal so the float path is used.
        let module = a1_module(&[3]);
        let mut mu = Mat::<Rat>::zeros(2, 2);
        mu[(0, 1)] = r(1);
        mu[(1, 0)] = r(1);
        let fam = inhomogeneous_hamiltonians(&module, &[r(0)], &mu).unwrap();
        let js = joint_spectrum(&fam, Some(&module.gram()), &SpectrumOptions::default()).unwrap();
        assert_eq!(js.basis, SpectralBasis::HermitianCongruence);
        assert_eq!(js.distinct_count(), 4);
        assert!(js.max_residual < 1e-9);
        let res: Vec<f64> = js.eigenvalue_tuples.iter().map(|t| t[0].re).collect();
        for (got, want) in res.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-9, "eigenvalue {got} vs {want}");
        }
    }

    #[test]
    fn non_self_adjoint_family_falls_back_to_schur() {
        let mut nilp = Mat::<Rat>::zeros(2, 2);
        nilp[(0, 1)] = r(1);
        let js = joint_spectrum(&plain_family(vec![nilp]), None, &SpectrumOptions::default())
            .unwrap();
        assert_eq!(js.basis, SpectralBasis::SchurTriangular);
        assert_eq!(js.multiplicities, vec![2]);
        assert!(js.eigenvalue_tuples[0][0].norm() < 1e-12);
        assert!(js.min_gap.is_infinite());
    }

    #[test]
    fn rescaling_limit_concentrates_on_the_product_basis() {
        let module = a1_module(&[1, 1]);
        let z = [r(0), r(1)];
        let mut mu = Mat::<Rat>::zeros(2, 2);
        mu[(0, 0)] = r(1);
        mu[(1, 1)] = r(-1);
        let s = [r(10), r(100), r(1000)];
        let rep =
            rescaling_limit_check(&module, &z, &mu, &s, &SpectrumOptions::default()).unwrap();
        assert!(rep.monotone_decreasing, "angles {:?}", rep.max_angles);
        assert!(rep.max_angles[2] < 1e-2, "angles {:?}", rep.max_angles);
    }

    #[test]
    fn single_factor_limit_is_immediate() {
        let module = a1_module(&[3]);
        let mut mu = Mat::<Rat>::zeros(2, 2);
        mu[(0, 0)] = r(1);
        mu[(1, 1)] = r(-1);
        let rep = rescaling_limit_check(
            &module,
            &[r(0)],
            &mu,
            &[r(10), r(100)],
            &SpectrumOptions::default(),
        )
        .unwrap();
        assert!(rep.max_angles.iter().all(|&a| a < 1e-10), "angles {:?}", rep.max_angles);
    }

    #[test]
    fn rescaling_limit_rejects_degenerate_shifts() {
        let module = a1_module(&[1, 1]);
        let z = [r(0), r(1)];
        let mut nilp = Mat::<Rat>::zeros(2, 2);
        nilp[(0, 1)] = r(1);
        assert!(matches!(
            rescaling_limit_check(&module, &z, &nilp, &[r(10)], &SpectrumOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
        let ident = Mat::<Rat>::identity(2);
        assert!(matches!(
            rescaling_limit_check(&module, &z, &ident, &[r(10)], &SpectrumOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
