//! Exact multihomogeneous polynomials in the coordinates `z_i`, `zb_i` and the
//! fiber variables `dz_i`, `dzb_i` of `C^{n+1}`.
//!
//! All four families are independent commuting indeterminates; no conjugation
//! relation is imposed, so every computation stays over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

pub fn rat(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(v))
}

/// The four variable families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Z,
    Zbar,
    Dz,
    Dzbar,
}

impl VarKind {
    pub const ALL: [VarKind; 4] = [VarKind::Z, VarKind::Zbar, VarKind::Dz, VarKind::Dzbar];

    fn slot(self) -> usize {
        match self {
            VarKind::Z => 0,
            VarKind::Zbar => 1,
            VarKind::Dz => 2,
            VarKind::Dzbar => 3,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            VarKind::Z => "z",
            VarKind::Zbar => "zb",
            VarKind::Dz => "dz",
            VarKind::Dzbar => "dzb",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub fn z(i: usize) -> Self {
        Var { kind: VarKind::Z, index: i }
    }
    pub fn zbar(i: usize) -> Self {
        Var { kind: VarKind::Zbar, index: i }
    }
    pub fn dz(i: usize) -> Self {
        Var { kind: VarKind::Dz, index: i }
    }
    pub fn dzbar(i: usize) -> Self {
        Var { kind: VarKind::Dzbar, index: i }
    }
}

/// Degrees of a monomial in each variable family: `k` in `z`, `l` in `zb`,
/// `p` in `dz`, `q` in `dzb`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Multidegree {
    pub k: usize,
    pub l: usize,
    pub p: usize,
    pub q: usize,
}

impl Multidegree {
    pub fn new(k: usize, l: usize, p: usize, q: usize) -> Self {
        Multidegree { k, l, p, q }
    }

    pub fn total(&self) -> usize {
        self.k + self.l + self.p + self.q
    }

    /// Shift every component by a signed offset; `None` if any goes negative.
    pub fn shifted(&self, dk: i64, dl: i64, dp: i64, dq: i64) -> Option<Multidegree> {
        let f = |a: usize, d: i64| usize::try_from(a as i64 + d).ok();
        Some(Multidegree {
            k: f(self.k, dk)?,
            l: f(self.l, dl)?,
            p: f(self.p, dp)?,
            q: f(self.q, dq)?,
        })
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.k, self.l, self.p, self.q)
    }
}

/// Result of [`BiPoly::multidegree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous(Multidegree),
    Inhomogeneous,
}

/// A monomial in the `4(n+1)` variables.
///
/// Exponents are kept as one packed vector laid out `[z | zb | dz | dzb]`, each
/// block of length `n+1`. Unused positions hold zero, so two monomials over
/// the same `n` compare equal exactly when they are the same monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u16]>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            exps: vec![0; 4 * (n + 1)].into_boxed_slice(),
        }
    }

    pub fn var(n: usize, v: Var) -> Self {
        let mut m = Monomial::one(n);
        m.exps[Self::pos(n, v)] = 1;
        m
    }

    /// Build from the four exponent blocks, each of length `n+1`.
    pub fn from_blocks(z: &[u16], zbar: &[u16], dz: &[u16], dzbar: &[u16]) -> Self {
        debug_assert!(z.len() == zbar.len() && z.len() == dz.len() && z.len() == dzbar.len());
        let exps: Vec<u16> = z
            .iter()
            .chain(zbar)
            .chain(dz)
            .chain(dzbar)
            .copied()
            .collect();
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn n(&self) -> usize {
        self.exps.len() / 4 - 1
    }

    fn pos(n: usize, v: Var) -> usize {
        assert!(v.index <= n, "variable index {} out of range for n={}", v.index, n);
        v.kind.slot() * (n + 1) + v.index
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.exps[Self::pos(self.n(), v)]
    }

    pub fn block(&self, kind: VarKind) -> &[u16] {
        let w = self.n() + 1;
        &self.exps[kind.slot() * w..(kind.slot() + 1) * w]
    }

    pub fn degree(&self, kind: VarKind) -> usize {
        self.block(kind).iter().map(|&e| e as usize).sum()
    }

    pub fn multidegree(&self) -> Multidegree {
        Multidegree {
            k: self.degree(VarKind::Z),
            l: self.degree(VarKind::Zbar),
            p: self.degree(VarKind::Dz),
            q: self.degree(VarKind::Dzbar),
        }
    }

    pub fn total_degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    /// Formal partial derivative: `(exponent, monomial / v)` or `None` when
    /// `v` does not divide the monomial.
    pub fn derive(&self, v: Var) -> Option<(u16, Monomial)> {
        let i = Self::pos(self.n(), v);
        let e = self.exps[i];
        if e == 0 {
            return None;
        }
        let mut out = self.clone();
        out.exps[i] -= 1;
        Some((e, out))
    }

    pub fn times_var(&self, v: Var) -> Monomial {
        let mut out = self.clone();
        out.exps[Self::pos(self.n(), v)] += 1;
        out
    }

    pub fn product(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        let exps: Vec<u16> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    /// Torus weight: for each index `i`, the `z_i`/`dz_i` degree minus the
    /// `zb_i`/`dzb_i` degree. Every operator in this crate preserves it.
    pub fn weight(&self) -> Vec<i32> {
        let w = self.n() + 1;
        (0..w)
            .map(|i| {
                self.exps[i] as i32 + self.exps[2 * w + i] as i32
                    - self.exps[w + i] as i32
                    - self.exps[3 * w + i] as i32
            })
            .collect()
    }
}

/// Graded lexicographic order over the concatenated exponent vector.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for kind in VarKind::ALL {
            for (i, &e) in self.block(kind).iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "{}{}", kind.prefix(), i)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial with exact rational coefficients over `C^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    n: usize,
    terms: BTreeMap<Monomial, ExactRational>,
}

impl BiPoly {
    pub fn zero(n: usize) -> Self {
        BiPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: ExactRational) -> Self {
        Self::monomial(n, Monomial::one(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, ExactRational::one())
    }

    pub fn var(n: usize, v: Var) -> Self {
        Self::monomial(n, Monomial::var(n, v), ExactRational::one())
    }

    pub fn monomial(n: usize, m: Monomial, c: ExactRational) -> Self {
        debug_assert_eq!(m.n(), n);
        let mut p = BiPoly::zero(n);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, ExactRational)>) -> Self {
        let mut p = BiPoly::zero(n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &ExactRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> ExactRational {
        self.terms.get(m).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: ExactRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_same_n(&self, other: &BiPoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::usage(format!(
                "polynomials over different ambient dimensions (n={} vs n={})",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_same_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_same_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &BiPoly) -> Result<BiPoly> {
        self.check_same_n(other)?;
        let mut out = BiPoly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.product(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ExactRational) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero(self.n);
        }
        BiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Formal partial derivative with respect to one variable.
    pub fn partial(&self, v: Var) -> BiPoly {
        let mut out = BiPoly::zero(self.n);
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derive(v) {
                out.add_term(dm, c * BigInt::from(e));
            }
        }
        out
    }

    /// `sum_i d/dz_i d/dzb_i f`; the fiber variables are constants here.
    pub fn mixed_laplacian(&self) -> BiPoly {
        let mut out = BiPoly::zero(self.n);
        for (m, c) in &self.terms {
            for i in 0..=self.n {
                if let Some((a, m1)) = m.derive(Var::z(i)) {
                    if let Some((b, m2)) = m1.derive(Var::zbar(i)) {
                        out.add_term(m2, c * BigInt::from(a as u32 * b as u32));
                    }
                }
            }
        }
        out
    }

    /// Common multidegree of all terms. The zero polynomial reports `(0,0,0,0)`.
    pub fn multidegree(&self) -> Homogeneity {
        let mut it = self.terms.keys().map(Monomial::multidegree);
        let Some(first) = it.next() else {
            return Homogeneity::Homogeneous(Multidegree::default());
        };
        if it.all(|d| d == first) {
            Homogeneity::Homogeneous(first)
        } else {
            Homogeneity::Inhomogeneous
        }
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &ExactRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Canonical rendering: terms in descending graded-lex order, e.g.
/// `z0^2 + 2*z0*z1 + z1^2`.
impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_unit = m.total_degree() == 0;
            if abs.is_one() && !is_unit {
                write!(f, "{}", m)?;
            } else {
                write_coeff(f, &abs)?;
                if !is_unit {
                    write!(f, "*{}", m)?;
                }
            }
        }
        Ok(())
    }
}

// Operator sugar for same-n polynomials; panics on mismatched n. Use the
// `try_*` methods when `n` is not known to agree.
impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        self.try_add(rhs).expect("mismatched n")
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self.try_sub(rhs).expect("mismatched n")
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        self.try_mul(rhs).expect("mismatched n")
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(&-ExactRational::one())
    }
}

/// All exponent vectors of length `vars` summing to `degree`, in descending
/// lexicographic order.
pub fn compositions(degree: usize, vars: usize) -> Vec<Vec<u16>> {
    fn rec(rem: usize, slots: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if slots == 1 {
            cur.push(rem as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=rem).rev() {
            cur.push(e as u16);
            rec(rem - e, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(degree, vars, &mut Vec::with_capacity(vars), &mut out);
    out
}

/// Every monomial of multidegree `md` over `C^{n+1}`, sorted ascending.
pub fn monomials_of_multidegree(n: usize, md: Multidegree) -> Vec<Monomial> {
    let w = n + 1;
    let zs = compositions(md.k, w);
    let zbs = compositions(md.l, w);
    let dzs = compositions(md.p, w);
    let dzbs = compositions(md.q, w);
    let mut out = Vec::with_capacity(zs.len() * zbs.len() * dzs.len() * dzbs.len());
    for a in &zs {
        for b in &zbs {
            for c in &dzs {
                for d in &dzbs {
                    out.push(Monomial::from_blocks(a, b, c, d));
                }
            }
        }
    }
    out.sort();
    out
}
