//! Normal-ordered elements of U(gl_n)^{x sites} and operator coefficients in
//! z and d/dz. This is the engine behind the column-determinant construction:
//! straightening uses [E_ab, E_cd] = d_cb E_ad - d_da E_cb at equal sites and
//! plain commutation across sites, and the coefficient ring keeps rational
//! functions of z in partial-fraction form relative to the marked points.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::mat::Mat;
use crate::modules::TensorModule;
use crate::mpoly::MPoly;
use crate::scalar::Rat;

/// Generator `E_ab` at a tensor site, encoded `(site, a, b)`.
pub type Gen = (u8, u8, u8);

/// Rational combination of normal-ordered words in the `E_ab^{(site)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UglElem {
    pub n: u8,
    pub sites: u8,
    pub terms: BTreeMap<Vec<Gen>, Rat>,
}

fn accumulate(map: &mut BTreeMap<Vec<Gen>, Rat>, word: Vec<Gen>, c: Rat) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(word.clone()).or_insert_with(Rat::zero);
    *entry += c;
    if entry.is_zero() {
        map.remove(&word);
    }
}

/// Rewrites an arbitrary word into normal order, accumulating into `out`.
fn straighten_into(word: Vec<Gen>, coeff: Rat, out: &mut BTreeMap<Vec<Gen>, Rat>) {
    let mut stack = vec![(word, coeff)];
    while let Some((mut w, c)) = stack.pop() {
        let mut i = 0;
        let mut split = None;
        while i + 1 < w.len() {
            if w[i] <= w[i + 1] {
                i += 1;
                continue;
            }
            if w[i].0 != w[i + 1].0 {
                // different sites commute strictly
                w.swap(i, i + 1);
                i = i.saturating_sub(1);
                continue;
            }
            split = Some(i);
            break;
        }
        match split {
            None => accumulate(out, w, c),
            Some(i) => {
                let (s, a, b) = w[i];
                let (_, cc, dd) = w[i + 1];
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                stack.push((swapped, c.clone()));
                if cc == b {
                    let mut u = w.clone();
                    u.splice(i..i + 2, [(s, a, dd)]);
                    stack.push((u, c.clone()));
                }
                if a == dd {
                    let mut u = w;
                    u.splice(i..i + 2, [(s, cc, b)]);
                    stack.push((u, -c));
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
}

impl UglElem {
    pub fn zero(n: u8, sites: u8) -> Self {
        UglElem { n, sites, terms: BTreeMap::new() }
    }

    pub fn scalar(n: u8, sites: u8, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        UglElem { n, sites, terms }
    }

    pub fn generator(n: u8, sites: u8, site: u8, a: u8, b: u8) -> Self {
        assert!(site < sites && a < n && b < n);
        let mut terms = BTreeMap::new();
        terms.insert(vec![(site, a, b)], Rat::one());
        UglElem { n, sites, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the element is the scalar `c`.
    pub fn as_scalar(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (w, c) = self.terms.iter().next().unwrap();
                if w.is_empty() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Maximal word length.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.n, self.sites), (rhs.n, rhs.sites));
        let mut terms = self.terms.clone();
        for (w, c) in &rhs.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        terms.retain(|_, v| !v.is_zero());
        UglElem { n: self.n, sites: self.sites, terms }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.n, self.sites);
        }
        let terms = self
            .terms
            .iter()
            .map(|(w, v)| (w.clone(), v * c))
            .collect();
        UglElem { n: self.n, sites: self.sites, terms }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!((self.n, self.sites), (rhs.n, rhs.sites));
        let mut terms = BTreeMap::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                straighten_into(w, c1 * c2, &mut terms);
            }
        }
        UglElem { n: self.n, sites: self.sites, terms }
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.mul(b).sub(&b.mul(a))
    }

    /// Top-degree image in the symmetric algebra. The identification of
    /// gr U(gl_n) with polynomials on gl_n uses the trace pairing, under
    /// which `E_ab` is the coordinate function `x_ba` (index `b*n + a`).
    /// Single-site elements only.
    pub fn symbol(&self) -> MPoly {
        assert_eq!(self.sites, 1, "symbols are taken for one-site elements");
        let n = self.n as usize;
        let d = self.degree();
        let mut out = MPoly::zero(n * n);
        for (w, c) in &self.terms {
            if w.len() != d {
                continue;
            }
            let mut mono = MPoly::constant(n * n, c.clone());
            for (_, a, b) in w {
                mono = mono.mul(&MPoly::var(n * n, *b as usize * n + *a as usize));
            }
            out = out.add(&mono);
        }
        out
    }

    /// Image in End(V) for a tensor module: words act by left-to-right
    /// products of the embedded matrix units.
    pub fn evaluate(&self, module: &TensorModule) -> Mat<Rat> {
        assert_eq!(module.n(), self.n as usize);
        assert_eq!(module.num_sites(), self.sites as usize);
        let dim = module.dimension;
        let mut out = Mat::<Rat>::zeros(dim, dim);
        for (w, c) in &self.terms {
            let mut acc = Mat::<Rat>::identity(dim);
            for (s, a, b) in w {
                acc = acc.matmul(&module.unit_at(*s as usize, *a as usize, *b as usize));
            }
            out.add_assign(&acc.scale(c));
        }
        out
    }
}

/// Scalar basis element of the coefficient ring: either `z^k` or
/// `(z - z_i)^{-order}` for the `i`-th marked point.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CoefKey {
    Pow(u32),
    Pole(u8, u32),
}

fn binom_rat(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut v: i64 = 1;
    for i in 0..k as i64 {
        v = v * (n as i64 - i) / (i + 1);
    }
    Rat::from_integer(v.into())
}

fn rat_pow(base: &Rat, k: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k.unsigned_abs() {
        acc *= base;
    }
    if k < 0 {
        Rat::one() / acc
    } else {
        acc
    }
}

/// d/dz on the coefficient basis; `None` means the derivative vanishes.
fn key_derivative(key: CoefKey) -> Option<(Rat, CoefKey)> {
    match key {
        CoefKey::Pow(0) => None,
        CoefKey::Pow(b) => Some((Rat::from_integer((b as i64).into()), CoefKey::Pow(b - 1))),
        CoefKey::Pole(i, k) => Some((
            Rat::from_integer((-(k as i64)).into()),
            CoefKey::Pole(i, k + 1),
        )),
    }
}

/// Product of two basis elements, re-expanded over the basis.
fn key_mul(zs: &[Rat], k1: CoefKey, k2: CoefKey) -> Vec<(Rat, CoefKey)> {
    match (k1, k2) {
        (CoefKey::Pow(a), CoefKey::Pow(b)) => vec![(Rat::one(), CoefKey::Pow(a + b))],
        (CoefKey::Pow(j), CoefKey::Pole(i, k)) | (CoefKey::Pole(i, k), CoefKey::Pow(j)) => {
            let p = &zs[i as usize];
            let mut out = Vec::new();
            for t in 0..=j {
                let c1 = binom_rat(j, t) * rat_pow(p, (j - t) as i64);
                if c1.is_zero() {
                    continue;
                }
                if t < k {
                    out.push((c1, CoefKey::Pole(i, k - t)));
                } else {
                    let d = t - k;
                    for r in 0..=d {
                        let mp = -p.clone();
                        let c = &c1 * binom_rat(d, r) * rat_pow(&mp, (d - r) as i64);
                        if !c.is_zero() {
                            out.push((c, CoefKey::Pow(r)));
                        }
                    }
                }
            }
            out
        }
        (CoefKey::Pole(i, j), CoefKey::Pole(l, k)) if i == l => {
            vec![(Rat::one(), CoefKey::Pole(i, j + k))]
        }
        (CoefKey::Pole(i, j), CoefKey::Pole(l, k)) => {
            let pq = &zs[i as usize] - &zs[l as usize];
            let mut out = Vec::new();
            for m in 1..=j {
                let sign = if (j - m) % 2 == 0 { Rat::one() } else { -Rat::one() };
                let c = sign
                    * binom_rat(k + j - m - 1, j - m)
                    * rat_pow(&pq, -((k + j - m) as i64));
                out.push((c, CoefKey::Pole(i, m)));
            }
            let qp = -pq;
            for m in 1..=k {
                let sign = if (k - m) % 2 == 0 { Rat::one() } else { -Rat::one() };
                let c = sign
                    * binom_rat(j + k - m - 1, k - m)
                    * rat_pow(&qp, -((j + k - m) as i64));
                out.push((c, CoefKey::Pole(l, m)));
            }
            out
        }
    }
}

/// Operator-valued expression `sum f(z) d^p X` with `f` in the coefficient
/// basis and `X` in U(gl_n)^{x sites}.
#[derive(Clone, Debug)]
pub struct UOp {
    pub n: u8,
    pub sites: u8,
    pub zs: Vec<Rat>,
    pub terms: BTreeMap<(CoefKey, u32), UglElem>,
}

impl UOp {
    pub fn zero(n: u8, sites: u8, zs: Vec<Rat>) -> Self {
        UOp { n, sites, zs, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: CoefKey, dpow: u32, elem: UglElem) {
        if elem.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry((key, dpow))
            .or_insert_with(|| UglElem::zero(self.n, self.sites));
        *slot = slot.add(&elem);
        if slot.is_zero() {
            self.terms.remove(&(key, dpow));
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.zs, rhs.zs);
        let mut out = self.clone();
        for ((key, p), elem) in &rhs.terms {
            out.add_term(*key, *p, elem.clone());
        }
        out
    }

    /// Composition of differential operators: `d` is moved right past the
    /// coefficient functions via `d^p g = sum_j C(p,j) g^(j) d^(p-j)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.zs, rhs.zs);
        assert_eq!((self.n, self.sites), (rhs.n, rhs.sites));
        let mut out = Self::zero(self.n, self.sites, self.zs.clone());
        for ((k1, p1), x) in &self.terms {
            for ((k2, p2), y) in &rhs.terms {
                let xy = x.mul(y);
                if xy.is_zero() {
                    continue;
                }
                for j in 0..=*p1 {
                    let mut dc = Rat::one();
                    let mut kk = *k2;
                    let mut vanished = false;
                    for _ in 0..j {
                        match key_derivative(kk) {
                            Some((c, nk)) => {
                                dc *= c;
                                kk = nk;
                            }
                            None => {
                                vanished = true;
                                break;
                            }
                        }
                    }
                    if vanished {
                        continue;
                    }
                    let cb = binom_rat(*p1, j) * dc;
                    for (c, key) in key_mul(&self.zs, *k1, kk) {
                        let coeff = &c * &cb;
                        out.add_term(key, p1 - j + p2, xy.scale(&coeff));
                    }
                }
            }
        }
        out
    }
}
