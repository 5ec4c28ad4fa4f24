//! Dense matrices generic over a [`Scalar`] field, with exact linear algebra
//! (row reduction, solving, nullspaces) used by every algebraic identity
//! check in the crate.

use crate::poly::Poly;
use crate::scalar::{C64, Scalar};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn scalar(n: usize, s: &S) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// n x n matrix with a single nonzero entry.
    pub fn unit_entry(n: usize, i: usize, j: usize, v: S) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = v;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[S]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i].clone();
        }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| f(x)).collect() }
    }

    pub fn to_c64(&self) -> Mat<C64> {
        self.map(|x| x.to_c64())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = a.clone() + b.clone();
        }
    }

    /// Matrix product; zero entries of the left factor are skipped, which
    /// matters a lot for the sparse generator matrices.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![S::zero(); self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() || v[k].is_zero() {
                    continue;
                }
                out[i] = out[i].clone() + a.clone() * v[k].clone();
            }
        }
        out
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out: Mat<S> = Mat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = &rhs[(k, l)];
                        if b.is_zero() {
                            continue;
                        }
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.matmul(b).sub(&b.matmul(a))
    }

    pub fn trace(&self) -> S {
        assert!(self.is_square());
        let mut t = S::zero();
        for i in 0..self.rows {
            t = t + self[(i, i)].clone();
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Entries flattened row-major; used for span computations on operators.
    pub fn vectorize(&self) -> Vec<S> {
        self.data.clone()
    }

    /// Frobenius norm estimate through `abs_est`.
    pub fn frobenius_est(&self) -> f64 {
        self.data.iter().map(|x| x.abs_est().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs_est(&self) -> f64 {
        self.data.iter().map(|x| x.abs_est()).fold(0.0, f64::max)
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // Best nonzero pivot in column c at or below row r.
            let mut pivot_row = None;
            let mut best = -1.0f64;
            for i in r..m.rows {
                if !m[(i, c)].is_zero() {
                    let a = m[(i, c)].abs_est();
                    if a > best {
                        best = a;
                        pivot_row = Some(i);
                    }
                    if S::is_exact() {
                        break;
                    }
                }
            }
            let Some(p) = pivot_row else { continue };
            m.swap_rows(r, p);
            let inv = S::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = m[(r, j)].clone() * f.clone();
                        m[(i, j)] = m[(i, j)].clone() - v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Any exact solution X of self * X = rhs, or `None` if inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug: Mat<S> = Mat::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                aug[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        let (red, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.cols, rhs.cols);
        for (r, &c) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(c, j)] = red[(r, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let x = self.solve(&Mat::identity(self.rows))?;
        if self.matmul(&x) == Mat::identity(self.rows) { Some(x) } else { None }
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (red, pivots) = self.rref();
        let mut free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.sort_unstable();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![S::zero(); self.cols];
            v[fc] = S::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -red[(r, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Characteristic polynomial det(t I - A) by the trace recursion,
    /// valid over any field of characteristic zero.
    pub fn char_poly(&self) -> Poly<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = S::one();
        let mut m = Mat::identity(n);
        for k in 1..=n {
            m = self.matmul(&m);
            let c = -(m.trace() / S::from_int(k as i64));
            coeffs[n - k] = c.clone();
            for i in 0..n {
                m[(i, i)] = m[(i, i)].clone() + c.clone();
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn det(&self) -> S {
        // det A = (-1)^n * charpoly(0).
        let p = self.char_poly().coeff(0);
        if self.rows % 2 == 0 { p } else { -p }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}", self[(i, j)])?;
                if j + 1 < self.cols {
                    write!(f, ", ")?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Outcome of inserting a vector into a [`RowSpaceBasis`].
pub enum InsertOutcome<S> {
    /// The vector was independent; it becomes raw basis vector number `index`.
    Added { index: usize },
    /// The vector lies in the span; coordinates are in the raw basis.
    InSpan { coords: Vec<S> },
}

/// Incremental exact row space with coordinate recovery.
///
/// Raw vectors are kept by the caller in insertion order; this structure
/// stores an echelon form together with the transform expressing each echelon
/// row in the raw vectors, so membership tests come with exact coordinates.
pub struct RowSpaceBasis<S> {
    ambient: usize,
    /// Echelon rows sorted by pivot column, pivot entry normalized to 1.
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
    /// transform[r] expresses rows[r] in the raw vectors.
    transform: Vec<Vec<S>>,
    raw_count: usize,
}

impl<S: Scalar> RowSpaceBasis<S> {
    pub fn new(ambient: usize) -> Self {
        RowSpaceBasis { ambient, rows: Vec::new(), pivots: Vec::new(), transform: Vec::new(), raw_count: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[S]) -> (Vec<S>, Vec<S>) {
        let mut work = v.to_vec();
        let mut coeffs = vec![S::zero(); self.rows.len()];
        for (r, row) in self.rows.iter().enumerate() {
            let c = work[self.pivots[r]].clone();
            if c.is_zero() {
                continue;
            }
            for (w, x) in work.iter_mut().zip(row.iter()) {
                if !x.is_zero() {
                    *w = w.clone() - c.clone() * x.clone();
                }
            }
            coeffs[r] = c;
        }
        (work, coeffs)
    }

    /// Insert a vector, returning either its new raw index or its exact
    /// coordinates in the previously inserted independent vectors.
    pub fn insert(&mut self, v: &[S]) -> InsertOutcome<S> {
        assert_eq!(v.len(), self.ambient);
        let (work, coeffs) = self.reduce(v);
        if let Some(p) = work.iter().position(|x| !x.is_zero()) {
            let inv = S::one() / work[p].clone();
            let row: Vec<S> = work.iter().map(|x| x.clone() * inv.clone()).collect();
            // row = (v - sum coeffs[r] rows[r]) / pivot, so in raw vectors:
            // transform_new = (e_new - sum coeffs[r] transform[r]) / pivot.
            let mut tr = vec![S::zero(); self.raw_count + 1];
            tr[self.raw_count] = inv.clone();
            for (r, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (t, x) in tr.iter_mut().zip(self.transform[r].iter()) {
                    *t = t.clone() - inv.clone() * c.clone() * x.clone();
                }
            }
            let pos = self.pivots.partition_point(|&q| q < p);
            self.rows.insert(pos, row);
            self.pivots.insert(pos, p);
            self.transform.insert(pos, tr);
            let index = self.raw_count;
            self.raw_count += 1;
            InsertOutcome::Added { index }
        } else {
            let mut coords = vec![S::zero(); self.raw_count];
            for (r, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (out, x) in coords.iter_mut().zip(self.transform[r].iter()) {
                    *out = out.clone() + c.clone() * x.clone();
                }
            }
            InsertOutcome::InSpan { coords }
        }
    }

    /// Coordinates of `v` in the raw basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[S]) -> Option<Vec<S>> {
        assert_eq!(v.len(), self.ambient);
        let (work, coeffs) = self.reduce(v);
        if work.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut coords = vec![S::zero(); self.raw_count];
        for (r, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (out, x) in coords.iter_mut().zip(self.transform[r].iter()) {
                *out = out.clone() + c.clone() * x.clone();
            }
        }
        Some(coords)
    }

    pub fn contains(&self, v: &[S]) -> bool {
        let (work, _) = self.reduce(v);
        work.iter().all(S::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num_traits::Zero;

    fn qm(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rat::from_int(x)).collect()).collect())
    }

    #[test]
    fn matmul_and_kron() {
        let a = qm(&[&[1, 2], &[3, 4]]);
        let b = qm(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.matmul(&b), qm(&[&[2, 1], &[4, 3]]));
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 1)], Rat::from_int(1));
        assert_eq!(k[(0, 3)], Rat::from_int(2));
        // Mixed product rule (A kron B)(C kron D) = AC kron BD.
        let c = qm(&[&[2, 0], &[1, 1]]);
        let d = qm(&[&[1, 1], &[0, 2]]);
        assert_eq!(a.kron(&b).matmul(&c.kron(&d)), a.matmul(&c).kron(&b.matmul(&d)));
    }

    #[test]
    fn exact_inverse_and_solve() {
        let a = qm(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Mat::identity(2));
        let singular = qm(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        // (1, 3) is outside the column span of the singular matrix.
        let b = qm(&[&[1], &[3]]);
        assert!(singular.solve(&b).is_none());
    }

    #[test]
    fn solve_consistent() {
        let a = qm(&[&[1, 2], &[2, 4]]);
        let b = qm(&[&[1], &[2]]);
        // b equals the first column, so a solution exists.
        let x = a.solve(&b).unwrap();
        assert_eq!(a.matmul(&x), b);
    }

    #[test]
    fn nullspace_and_rank() {
        let a = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!(a.matvec(v).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn char_poly_and_det() {
        let a = qm(&[&[2, 1], &[1, 2]]);
        let p = a.char_poly();
        // t^2 - 4t + 3.
        assert_eq!(p.coeff(0), Rat::from_int(3));
        assert_eq!(p.coeff(1), Rat::from_int(-4));
        assert_eq!(p.coeff(2), Rat::from_int(1));
        assert_eq!(a.det(), Rat::from_int(3));
        let n = qm(&[&[0, 1], &[0, 0]]);
        assert_eq!(n.det(), Rat::from_int(0));
    }

    #[test]
    fn row_space_coordinates() {
        let mut rsb = RowSpaceBasis::<Rat>::new(3);
        let v0 = [Rat::from_int(1), Rat::from_int(1), Rat::from_int(0)];
        let v1 = [Rat::from_int(0), Rat::from_int(2), Rat::from_int(2)];
        assert!(matches!(rsb.insert(&v0), InsertOutcome::Added { index: 0 }));
        assert!(matches!(rsb.insert(&v1), InsertOutcome::Added { index: 1 }));
        // 3*v0 - v1 = (3, 1, -2).
        let w = [Rat::from_int(3), Rat::from_int(1), Rat::from_int(-2)];
        match rsb.insert(&w) {
            InsertOutcome::InSpan { coords } => {
                assert_eq!(coords, vec![Rat::from_int(3), Rat::from_int(-1)]);
            }
            _ => panic!("expected membership"),
        }
        assert_eq!(rsb.coordinates(&w).unwrap(), vec![Rat::from_int(3), Rat::from_int(-1)]);
        let out = [Rat::from_int(0), Rat::from_int(0), Rat::from_int(1)];
        assert!(rsb.coordinates(&out).is_none());
    }
}
