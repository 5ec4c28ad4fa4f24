//! The classical shift-of-argument family on gl_n^*: coefficients of the
//! characteristic polynomial, their directional derivatives along the shift
//! element, and the Lie-Poisson bracket that certifies their commutativity.
//!
//! Coordinates on the dual space are the matrix entries `x_{ab}`; the
//! variable index of `x_{ab}` is `a*n + b`.

use num_traits::One;

use crate::mat::Mat;
use crate::mpoly::MPoly;
use crate::{Rat, Result, Error};

pub fn var_index(n: usize, a: usize, b: usize) -> usize {
    a * n + b
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Determinant of the square submatrix of variables on `rows x rows`,
/// expanded over permutations (fine for the small degrees in use).
fn principal_minor(n: usize, rows: &[usize]) -> MPoly {
    let k = rows.len();
    let nvars = n * n;
    let mut out = MPoly::zero(nvars);
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        // sign of perm
        let mut sign = 0usize;
        for i in 0..k {
            for j in i + 1..k {
                if perm[i] > perm[j] {
                    sign += 1;
                }
            }
        }
        let mut term = MPoly::constant(
            nvars,
            if sign % 2 == 0 { Rat::one() } else { -Rat::one() },
        );
        for (i, &p) in perm.iter().enumerate() {
            term = term.mul(&MPoly::var(nvars, var_index(n, rows[i], rows[p])));
        }
        out = out.add(&term);
        // next permutation in lexicographic order
        let mut i = k.wrapping_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = k - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// The degree-k coefficient of the characteristic polynomial: the sum of all
/// principal k x k minors of the matrix of coordinates.
pub fn elementary_invariant(n: usize, k: usize) -> MPoly {
    let mut out = MPoly::zero(n * n);
    for rows in combinations(n, k) {
        out = out.add(&principal_minor(n, &rows));
    }
    out
}

/// One generator of the classical shift family, tagged by the invariant it
/// polarizes and the derivative order.
#[derive(Clone, Debug)]
pub struct ClassicalGenerator {
    /// 1-based index among the fundamental invariants (degree = index + 1).
    pub invariant_index: usize,
    pub invariant_degree: usize,
    pub derivative_order: usize,
    pub poly: MPoly,
}

#[derive(Clone, Debug)]
pub struct ClassicalMFGenerators {
    pub n: usize,
    pub generators: Vec<ClassicalGenerator>,
}

impl ClassicalMFGenerators {
    /// Expected generator count: half of (dimension + rank) of sl_n.
    pub fn expected_count(n: usize) -> usize {
        (n * n + n - 2) / 2
    }
}

/// All directional derivatives `(d_mu)^m P_k`, `k = 2..n`, `m = 0..k-1`,
/// of the fundamental invariants along the shift element.
pub fn classical_mf_generators(n: usize, mu: &Mat<Rat>) -> Result<ClassicalMFGenerators> {
    if (mu.rows(), mu.cols()) != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "shift element is {}x{}, expected {n}x{n}",
            mu.rows(),
            mu.cols()
        )));
    }
    let dir: Vec<Rat> = mu.vectorize();
    let mut generators = Vec::new();
    for degree in 2..=n {
        let mut p = elementary_invariant(n, degree);
        for order in 0..degree {
            generators.push(ClassicalGenerator {
                invariant_index: degree - 1,
                invariant_degree: degree,
                derivative_order: order,
                poly: p.clone(),
            });
            p = p.directional(&dir);
        }
    }
    Ok(ClassicalMFGenerators { n, generators })
}

/// Lie-Poisson bracket on polynomials over gl_n^*:
/// `{x_ab, x_cd} = delta_cb x_ad - delta_ad x_cb`, extended by Leibniz.
pub fn poisson_bracket(n: usize, p: &MPoly, q: &MPoly) -> MPoly {
    let nvars = n * n;
    assert_eq!(p.nvars, nvars);
    assert_eq!(q.nvars, nvars);
    let partials = |f: &MPoly| -> Vec<(usize, usize, MPoly)> {
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let d = f.partial(var_index(n, a, b));
                if !d.is_zero() {
                    out.push((a, b, d));
                }
            }
        }
        out
    };
    let dps = partials(p);
    let dqs = partials(q);
    let mut out = MPoly::zero(nvars);
    for (a, b, dp) in &dps {
        for (c, d, dq) in &dqs {
            if c != b && a != d {
                continue;
            }
            let prod = dp.mul(dq);
            if c == b {
                out = out.add(&prod.mul(&MPoly::var(nvars, var_index(n, *a, *d))));
            }
            if a == d {
                out = out.sub(&prod.mul(&MPoly::var(nvars, var_index(n, *c, *b))));
            }
        }
    }
    out
}
