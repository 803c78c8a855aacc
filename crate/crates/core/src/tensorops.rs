//! Symmetric tensor fields on `C^{n+1}` in the polynomial model and the
//! operators acting on them.
//!
//! A symmetric tensor of type `(p,q)` is identified with the polynomial
//! `T(X,...,X)`, which has degree `p` in the `dz` variables and `q` in the
//! `dzb` variables. In this model
//!
//! * contraction with the radial fields is `i_W = sum z_i d/d(dz_i)` and
//!   `i_Wb = sum zb_i d/d(dzb_i)`,
//! * the holomorphic symmetric gradients are `sum dz_i d/dz_i` and
//!   `sum dzb_i d/dzb_i`,
//! * the metric trace is `sum d/d(dz_i) d/d(dzb_i)`,
//!
//! with no combinatorial normalisation factors. These satisfy the commutator
//! identities `[i_W, grad] = k - p` exactly, and the compositions
//! `grad . i_W` that enter the projected Laplacian do not depend on the
//! slot-counting convention.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polyring::{int, rat, BiPoly, ExactRational, Homogeneity, Monomial, Multidegree, Var, VarKind};

/// Holomorphic or antiholomorphic half of an operator pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Hol,
    Antihol,
}

/// A symmetric tensor field with polynomial coefficients of fixed multidegree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorPoly {
    md: Multidegree,
    body: BiPoly,
}

impl TensorPoly {
    /// Wrap `body`, checking every term against the declared multidegree.
    pub fn new(body: BiPoly, md: Multidegree) -> Result<Self> {
        if let Some((m, _)) = body.terms().find(|(m, _)| m.multidegree() != md) {
            return Err(Error::usage(format!(
                "term {} has multidegree {}, expected {}",
                m,
                m.multidegree(),
                md
            )));
        }
        Ok(TensorPoly { md, body })
    }

    /// Infer the multidegree from the terms. Fails on inhomogeneous input; the
    /// zero polynomial gets `(0,0,0,0)`.
    pub fn from_poly(body: BiPoly) -> Result<Self> {
        match body.multidegree() {
            Homogeneity::Homogeneous(md) => Ok(TensorPoly { md, body }),
            Homogeneity::Inhomogeneous => Err(Error::usage("inhomogeneous polynomial")),
        }
    }

    pub fn zero(n: usize, md: Multidegree) -> Self {
        TensorPoly {
            md,
            body: BiPoly::zero(n),
        }
    }

    pub(crate) fn from_parts_unchecked(body: BiPoly, md: Multidegree) -> Self {
        debug_assert!(body.terms().all(|(m, _)| m.multidegree() == md));
        TensorPoly { md, body }
    }

    pub fn n(&self) -> usize {
        self.body.n()
    }

    pub fn multidegree(&self) -> Multidegree {
        self.md
    }

    pub fn body(&self) -> &BiPoly {
        &self.body
    }

    pub fn into_body(self) -> BiPoly {
        self.body
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    pub fn scale(&self, c: &ExactRational) -> TensorPoly {
        TensorPoly {
            md: self.md,
            body: self.body.scale(c),
        }
    }

    pub fn try_add(&self, other: &TensorPoly) -> Result<TensorPoly> {
        self.check_compatible(other)?;
        Ok(TensorPoly {
            md: self.md,
            body: self.body.try_add(&other.body)?,
        })
    }

    pub fn try_sub(&self, other: &TensorPoly) -> Result<TensorPoly> {
        self.check_compatible(other)?;
        Ok(TensorPoly {
            md: self.md,
            body: self.body.try_sub(&other.body)?,
        })
    }

    fn check_compatible(&self, other: &TensorPoly) -> Result<()> {
        if self.md != other.md {
            return Err(Error::usage(format!(
                "multidegree mismatch: {} vs {}",
                self.md, other.md
            )));
        }
        Ok(())
    }

    /// `Some(c)` when `other == c * self`; `self` must be nonzero.
    pub fn proportionality(&self, other: &TensorPoly) -> Option<ExactRational> {
        let (m0, c0) = self.body.terms().next()?;
        let factor = other.body.coefficient(m0) / c0;
        if self.body.scale(&factor) == other.body {
            Some(factor)
        } else {
            None
        }
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

/// The operators of the polynomial tensor calculus.
///
/// Each tag moves a multidegree `(k,l,p,q)` to a unique target; the
/// divergence is split into its two halves for that reason.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorTag {
    /// `i_W`: `(k,l,p,q) -> (k+1,l,p-1,q)`
    ContractHol,
    /// `i_Wb`: `(k,l,p,q) -> (k,l+1,p,q-1)`
    ContractAntihol,
    /// holomorphic symmetric gradient: `(k,l,p,q) -> (k-1,l,p+1,q)`
    SymgradHol,
    /// antiholomorphic symmetric gradient: `(k,l,p,q) -> (k,l-1,p,q+1)`
    SymgradAntihol,
    /// metric trace: `(k,l,p,q) -> (k,l,p-1,q-1)`
    Trace,
    /// `sum d/dz_i d/d(dzb_i)`: `(k,l,p,q) -> (k-1,l,p,q-1)`
    DivergenceHol,
    /// `sum d/dzb_i d/d(dz_i)`: `(k,l,p,q) -> (k,l-1,p-1,q)`
    DivergenceAntihol,
    /// componentwise `sum d/dz_i d/dzb_i`: `(k,l,p,q) -> (k-1,l-1,p,q)`
    MixedLaplacian,
    /// multiplication by the metric `sum dz_i dzb_i`: `(k,l,p,q) -> (k,l,p+1,q+1)`
    MetricMult,
    /// radial Lie derivative, `(k+l+p+q)` times the identity
    EulerRadial,
    /// projected Laplacian `L(T)` (see [`pushforward_laplacian`])
    PushforwardLaplacian,
}

impl OperatorTag {
    pub const ALL: [OperatorTag; 11] = [
        OperatorTag::ContractHol,
        OperatorTag::ContractAntihol,
        OperatorTag::SymgradHol,
        OperatorTag::SymgradAntihol,
        OperatorTag::Trace,
        OperatorTag::DivergenceHol,
        OperatorTag::DivergenceAntihol,
        OperatorTag::MixedLaplacian,
        OperatorTag::MetricMult,
        OperatorTag::EulerRadial,
        OperatorTag::PushforwardLaplacian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OperatorTag::ContractHol => "contract_hol",
            OperatorTag::ContractAntihol => "contract_antihol",
            OperatorTag::SymgradHol => "symgrad_hol",
            OperatorTag::SymgradAntihol => "symgrad_antihol",
            OperatorTag::Trace => "trace",
            OperatorTag::DivergenceHol => "divergence_hol",
            OperatorTag::DivergenceAntihol => "divergence_antihol",
            OperatorTag::MixedLaplacian => "mixed_laplacian",
            OperatorTag::MetricMult => "metric_mult",
            OperatorTag::EulerRadial => "euler_radial",
            OperatorTag::PushforwardLaplacian => "pushforward_laplacian",
        }
    }

    /// `(dk, dl, dp, dq)`.
    pub fn degree_shift(&self) -> (i64, i64, i64, i64) {
        match self {
            OperatorTag::ContractHol => (1, 0, -1, 0),
            OperatorTag::ContractAntihol => (0, 1, 0, -1),
            OperatorTag::SymgradHol => (-1, 0, 1, 0),
            OperatorTag::SymgradAntihol => (0, -1, 0, 1),
            OperatorTag::Trace => (0, 0, -1, -1),
            OperatorTag::DivergenceHol => (-1, 0, 0, -1),
            OperatorTag::DivergenceAntihol => (0, -1, -1, 0),
            OperatorTag::MixedLaplacian => (-1, -1, 0, 0),
            OperatorTag::MetricMult => (0, 0, 1, 1),
            OperatorTag::EulerRadial | OperatorTag::PushforwardLaplacian => (0, 0, 0, 0),
        }
    }

    /// Target multidegree; `None` when a component would be negative, in which
    /// case the operator is zero on that space.
    pub fn target(&self, md: Multidegree) -> Option<Multidegree> {
        let (dk, dl, dp, dq) = self.degree_shift();
        md.shifted(dk, dl, dp, dq)
    }

    /// Image of a single monomial. Every operator here has integer
    /// coefficients in the monomial basis.
    pub fn apply_monomial(&self, m: &Monomial) -> Vec<(Monomial, i64)> {
        use VarKind::*;
        match self {
            OperatorTag::ContractHol => first_order(m, Z, Dz),
            OperatorTag::ContractAntihol => first_order(m, Zbar, Dzbar),
            OperatorTag::SymgradHol => first_order(m, Dz, Z),
            OperatorTag::SymgradAntihol => first_order(m, Dzbar, Zbar),
            OperatorTag::Trace => second_order(m, Dz, Dzbar),
            OperatorTag::DivergenceHol => second_order(m, Z, Dzbar),
            OperatorTag::DivergenceAntihol => second_order(m, Zbar, Dz),
            OperatorTag::MixedLaplacian => second_order(m, Z, Zbar),
            OperatorTag::MetricMult => (0..=m.n())
                .map(|i| (m.times_var(Var::dz(i)).times_var(Var::dzbar(i)), 1))
                .collect(),
            OperatorTag::EulerRadial => vec![(m.clone(), m.total_degree() as i64)],
            OperatorTag::PushforwardLaplacian => pushforward_monomial(m),
        }
    }

    /// Apply to a tensor. The pushforward Laplacian checks its precondition.
    pub fn apply(&self, t: &TensorPoly) -> Result<TensorPoly> {
        if *self == OperatorTag::PushforwardLaplacian {
            return pushforward_laplacian(t);
        }
        Ok(self.apply_unchecked(t))
    }

    fn apply_unchecked(&self, t: &TensorPoly) -> TensorPoly {
        let n = t.n();
        let Some(md) = self.target(t.md) else {
            // Operators that lower a degree below zero act as zero; keep the
            // (clamped) bookkeeping so results still carry a sensible label.
            let (dk, dl, dp, dq) = self.degree_shift();
            let clamp = |a: usize, d: i64| (a as i64 + d).max(0) as usize;
            let md = Multidegree::new(
                clamp(t.md.k, dk),
                clamp(t.md.l, dl),
                clamp(t.md.p, dp),
                clamp(t.md.q, dq),
            );
            return TensorPoly::zero(n, md);
        };
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        let mut body = BiPoly::zero(n);
        for (m, c) in t.body.terms() {
            if c.is_integer() {
                for (img, e) in self.apply_monomial(m) {
                    *acc.entry(img).or_insert_with(BigInt::zero) += c.numer() * e;
                }
            } else {
                for (img, e) in self.apply_monomial(m) {
                    body.add_term(img, c * BigInt::from(e));
                }
            }
        }
        for (m, c) in acc {
            body.add_term(m, ExactRational::from_integer(c));
        }
        TensorPoly { md, body }
    }
}

impl fmt::Display for OperatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn kind_var(kind: VarKind, i: usize) -> Var {
    Var { kind, index: i }
}

/// `sum_i x_i d/dy_i`
fn first_order(m: &Monomial, mult: VarKind, deriv: VarKind) -> Vec<(Monomial, i64)> {
    let mut out = Vec::new();
    for i in 0..=m.n() {
        if let Some((e, dm)) = m.derive(kind_var(deriv, i)) {
            out.push((dm.times_var(kind_var(mult, i)), e as i64));
        }
    }
    merge(out)
}

/// `sum_i d/dx_i d/dy_i`
fn second_order(m: &Monomial, a: VarKind, b: VarKind) -> Vec<(Monomial, i64)> {
    let mut out = Vec::new();
    for i in 0..=m.n() {
        if let Some((e1, m1)) = m.derive(kind_var(a, i)) {
            if let Some((e2, m2)) = m1.derive(kind_var(b, i)) {
                out.push((m2, e1 as i64 * e2 as i64));
            }
        }
    }
    merge(out)
}

fn merge(terms: Vec<(Monomial, i64)>) -> Vec<(Monomial, i64)> {
    if terms.len() < 2 {
        return terms;
    }
    let mut acc: HashMap<Monomial, i64> = HashMap::with_capacity(terms.len());
    for (m, c) in terms {
        *acc.entry(m).or_insert(0) += c;
    }
    let mut out: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    out.sort();
    out
}

fn compose(first: OperatorTag, second: OperatorTag, m: &Monomial) -> Vec<(Monomial, i64)> {
    let mut out = Vec::new();
    for (m1, c1) in first.apply_monomial(m) {
        for (m2, c2) in second.apply_monomial(&m1) {
            out.push((m2, c1 * c2));
        }
    }
    out
}

/// Scalar part of the correction term for a tensor of multidegree `md` over
/// `C^{n+1}`, with `P = p+q` and `E = k+l+p+q`:
/// `2P(1-P) + 2(P-n)E - E^2 + 4*tJ0(p,q)`.
fn correction_scalar(n: usize, md: Multidegree) -> i64 {
    let p_tot = (md.p + md.q) as i64;
    let e = md.total() as i64;
    let n = n as i64;
    let tj0 = tj0_scalar(md.p, md.q);
    debug_assert!(tj0.is_integer());
    let tj0 = tj0.to_integer();
    let tj0: i64 = i64::try_from(&tj0).expect("tJ0 scalar fits in i64");
    2 * p_tot * (1 - p_tot) + 2 * (p_tot - n) * e - e * e + 4 * tj0
}

fn pushforward_monomial(m: &Monomial) -> Vec<(Monomial, i64)> {
    let md = m.multidegree();
    let scalar = correction_scalar(m.n(), md);
    // L(T) = -4 * mixed_laplacian(T) - C(T)
    let mut out = vec![(m.clone(), -scalar)];
    for (img, c) in OperatorTag::MixedLaplacian.apply_monomial(m) {
        out.push((img, -4 * c));
    }
    for (img, c) in compose(OperatorTag::ContractAntihol, OperatorTag::SymgradAntihol, m) {
        out.push((img, 4 * c));
    }
    for (img, c) in compose(OperatorTag::ContractHol, OperatorTag::SymgradHol, m) {
        out.push((img, 4 * c));
    }
    for (img, c) in compose(OperatorTag::Trace, OperatorTag::MetricMult, m) {
        out.push((img, -2 * c));
    }
    merge(out)
}

/// The distinguished tensors on `C^{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialTensor {
    /// `g = sum dz_i dzb_i`
    Metric,
    /// `W* = sum zb_i dz_i`
    WStar,
    /// `Wb* = sum z_i dzb_i`
    WbarStar,
    /// `r^2 = sum z_i zb_i`
    RSquared,
}

pub fn special_tensor(kind: SpecialTensor, n: usize) -> TensorPoly {
    let (a, b): (fn(usize) -> Var, fn(usize) -> Var) = match kind {
        SpecialTensor::Metric => (Var::dz, Var::dzbar),
        SpecialTensor::WStar => (Var::zbar, Var::dz),
        SpecialTensor::WbarStar => (Var::z, Var::dzbar),
        SpecialTensor::RSquared => (Var::z, Var::zbar),
    };
    let body = BiPoly::from_terms(
        n,
        (0..=n).map(|i| (Monomial::var(n, a(i)).times_var(b(i)), int(1))),
    );
    TensorPoly::from_poly(body).expect("special tensors are homogeneous")
}

/// `i_W` (hol) or `i_Wb` (antihol).
pub fn contract(t: &TensorPoly, side: Side) -> TensorPoly {
    match side {
        Side::Hol => OperatorTag::ContractHol.apply_unchecked(t),
        Side::Antihol => OperatorTag::ContractAntihol.apply_unchecked(t),
    }
}

/// Holomorphic (`sum dz_i d/dz_i`) or antiholomorphic symmetric gradient.
pub fn symgrad(t: &TensorPoly, side: Side) -> TensorPoly {
    match side {
        Side::Hol => OperatorTag::SymgradHol.apply_unchecked(t),
        Side::Antihol => OperatorTag::SymgradAntihol.apply_unchecked(t),
    }
}

/// The real symmetric gradient, the sum of both halves. Inhomogeneous in
/// general, hence a bare polynomial.
pub fn symgrad_real(t: &TensorPoly) -> BiPoly {
    symgrad(t, Side::Hol).body().try_add(symgrad(t, Side::Antihol).body()).expect("same n")
}

/// Difference of the two halves; the complex-structure-twisted gradient up to
/// a factor of the imaginary unit.
pub fn symgrad_twisted(t: &TensorPoly) -> BiPoly {
    symgrad(t, Side::Hol).body().try_sub(symgrad(t, Side::Antihol).body()).expect("same n")
}

/// Metric trace with normalisation constant 1.
pub fn trace_metric(t: &TensorPoly) -> TensorPoly {
    OperatorTag::Trace.apply_unchecked(t)
}

/// Flat divergence `sum (d/dz_i d/d(dzb_i) + d/dzb_i d/d(dz_i))`. Its two
/// halves land in different multidegrees, so the result is a bare polynomial;
/// it vanishes iff both halves do.
pub fn divergence(t: &TensorPoly) -> BiPoly {
    let a = OperatorTag::DivergenceHol.apply_unchecked(t);
    let b = OperatorTag::DivergenceAntihol.apply_unchecked(t);
    a.body().try_add(b.body()).expect("same n")
}

pub fn metric_mult(t: &TensorPoly) -> TensorPoly {
    OperatorTag::MetricMult.apply_unchecked(t)
}

pub fn mixed_laplacian(t: &TensorPoly) -> TensorPoly {
    OperatorTag::MixedLaplacian.apply_unchecked(t)
}

/// Full Euler operator `sum (z d/dz + zb d/dzb + dz d/d(dz) + dzb d/d(dzb))`
/// on an arbitrary polynomial.
pub fn euler_operator(f: &BiPoly) -> BiPoly {
    let mut out = BiPoly::zero(f.n());
    for (m, c) in f.terms() {
        out.add_term(m.clone(), c * BigInt::from(m.total_degree()));
    }
    out
}

/// Radial Lie derivative: `(k+l+p+q) f` on multihomogeneous input.
pub fn euler_radial(f: &BiPoly) -> Result<BiPoly> {
    let md = match f.multidegree() {
        Homogeneity::Homogeneous(md) => md,
        Homogeneity::Inhomogeneous => {
            return Err(Error::usage("radial derivative needs a multihomogeneous input"))
        }
    };
    let out = f.scale(&int(md.total() as i64));
    debug_assert_eq!(out, euler_operator(f));
    Ok(out)
}

/// The complex-structure term on pure-type symmetric tensors:
/// `((p+q) - (p-q)^2) / 2`.
pub fn tj0_scalar(p: usize, q: usize) -> ExactRational {
    let (p, q) = (p as i64, q as i64);
    rat((p + q) - (p - q) * (p - q), 2)
}

/// `k + p == l + q`: the polynomial tensor is invariant under the circle
/// action and descends to projective space.
pub fn is_circle_invariant(t: &TensorPoly) -> bool {
    let md = t.multidegree();
    md.k + md.p == md.l + md.q
}

/// The projected Laplacian `L(T) = Delta_flat(T) - C(T)` where
///
/// `C(T) = 2P(1-P)T + 2(P-n) L_r T - L_r L_r T + 4 T^{J0}
///        - 4 gradb(i_Wb T) - 4 grad(i_W T) + 2 g Tr T`,
///
/// `P = p+q` is the total tensor degree and `Delta_flat = -4 * mixed_laplacian`.
/// For harmonic `T` the Laplacian of the projected tensor is the projection of
/// `L(T)`.
pub fn pushforward_laplacian(t: &TensorPoly) -> Result<TensorPoly> {
    if !is_circle_invariant(t) {
        return Err(Error::usage(format!(
            "projected Laplacian needs k+p = l+q, got multidegree {}",
            t.multidegree()
        )));
    }
    Ok(OperatorTag::PushforwardLaplacian.apply_unchecked(t))
}

/// `C(T)` assembled from the individual tensor operators, used to cross-check
/// the monomial-level implementation.
pub fn correction_term(t: &TensorPoly) -> Result<TensorPoly> {
    let md = t.multidegree();
    let n = t.n();
    let p_tot = (md.p + md.q) as i64;
    let lr = euler_radial(t.body())?;
    let lrlr = euler_radial(&lr)?;
    let mut c = t.body().scale(&int(2 * p_tot * (1 - p_tot)));
    c = &c + &lr.scale(&int(2 * (p_tot - n as i64)));
    c = &c - &lrlr;
    c = &c + &t.body().scale(&(tj0_scalar(md.p, md.q) * int(4)));
    c = &c - &symgrad(&contract(t, Side::Antihol), Side::Antihol).body().scale(&int(4));
    c = &c - &symgrad(&contract(t, Side::Hol), Side::Hol).body().scale(&int(4));
    c = &c + &metric_mult(&trace_metric(t)).body().scale(&int(2));
    TensorPoly::new(c, md)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono(n: usize, vars: &[Var]) -> Monomial {
        vars.iter().fold(Monomial::one(n), |m, &v| m.times_var(v))
    }

    fn tp(n: usize, terms: &[(i64, &[Var])]) -> TensorPoly {
        TensorPoly::from_poly(BiPoly::from_terms(
            n,
            terms.iter().map(|(c, vs)| (mono(n, vs), int(*c))),
        ))
        .unwrap()
    }

    #[test]
    fn special_tensors() {
        assert_eq!(special_tensor(SpecialTensor::Metric, 1).to_string(), "dz0*dzb0 + dz1*dzb1");
        assert_eq!(special_tensor(SpecialTensor::WStar, 1).to_string(), "zb0*dz0 + zb1*dz1");
        assert_eq!(
            special_tensor(SpecialTensor::RSquared, 2).multidegree(),
            Multidegree::new(1, 1, 0, 0)
        );
        assert_eq!(
            special_tensor(SpecialTensor::WbarStar, 0).to_string(),
            "z0*dzb0"
        );
    }

    #[test]
    fn contraction_examples() {
        let n = 1;
        let t = tp(n, &[(1, &[Var::dz(0), Var::dzbar(1)])]);
        assert_eq!(contract(&t, Side::Hol).to_string(), "z0*dzb1");
        let f = tp(n, &[(1, &[Var::z(0), Var::zbar(1)])]);
        assert!(contract(&f, Side::Hol).is_zero());
        let g = special_tensor(SpecialTensor::Metric, n);
        let twice = contract(&contract(&g, Side::Hol), Side::Antihol);
        assert_eq!(twice, special_tensor(SpecialTensor::RSquared, n));
    }

    #[test]
    fn symgrad_examples() {
        let n = 1;
        let f = tp(n, &[(1, &[Var::z(0), Var::z(0)])]);
        assert_eq!(symgrad(&f, Side::Hol).to_string(), "2*z0*dz0");
        let anti = tp(
            n,
            &[(1, &[Var::zbar(0), Var::dzbar(1)]), (-1, &[Var::zbar(1), Var::dzbar(0)])],
        );
        assert!(symgrad(&anti, Side::Antihol).is_zero());
    }

    #[test]
    fn trace_examples() {
        let off = tp(2, &[(1, &[Var::dz(0), Var::dzbar(1)])]);
        assert!(trace_metric(&off).is_zero());
        let g = special_tensor(SpecialTensor::Metric, 2);
        assert_eq!(trace_metric(&g).body(), &BiPoly::constant(2, int(3)));
        let diff = tp(2, &[(1, &[Var::dz(0), Var::dzbar(0)]), (-1, &[Var::dz(1), Var::dzbar(1)])]);
        assert!(trace_metric(&diff).is_zero());
    }

    #[test]
    fn divergence_examples() {
        let n = 2;
        let g = special_tensor(SpecialTensor::Metric, n);
        assert!(divergence(&g).is_zero());
        let wstar = special_tensor(SpecialTensor::WStar, n);
        assert_eq!(divergence(&wstar), BiPoly::constant(n, int(n as i64 + 1)));
        let anti = tp(n, &[(1, &[Var::zbar(0), Var::dz(1)]), (-1, &[Var::zbar(1), Var::dz(0)])]);
        assert!(divergence(&anti).is_zero());
    }

    #[test]
    fn euler_radial_examples() {
        let n = 1;
        let f = tp(n, &[(1, &[Var::z(0), Var::zbar(1)])]);
        assert_eq!(euler_radial(f.body()).unwrap(), f.body().scale(&int(2)));
        assert!(euler_radial(&BiPoly::constant(n, int(5))).unwrap().is_zero());
        let h = tp(n, &[(3, &[Var::z(0), Var::z(1), Var::zbar(0), Var::dzbar(1)])]);
        assert_eq!(h.multidegree(), Multidegree::new(2, 1, 0, 1));
        assert_eq!(euler_radial(h.body()).unwrap(), h.body().scale(&int(4)));
        let inhom = &BiPoly::var(n, Var::z(0)) + &BiPoly::var(n, Var::zbar(0));
        assert!(matches!(euler_radial(&inhom), Err(Error::Usage(_))));
    }

    #[test]
    fn tj0_examples() {
        assert_eq!(tj0_scalar(1, 1), int(1));
        assert_eq!(tj0_scalar(0, 0), int(0));
        assert_eq!(tj0_scalar(0, 2), int(-1));
    }

    #[test]
    fn circle_invariance() {
        let n = 1;
        assert!(is_circle_invariant(&tp(n, &[(1, &[Var::z(0), Var::dzbar(1)])])));
        assert!(!is_circle_invariant(&tp(n, &[(1, &[Var::zbar(0), Var::dzbar(1)])])));
        assert!(is_circle_invariant(&tp(
            n,
            &[(1, &[Var::z(0), Var::z(1), Var::zbar(0), Var::zbar(0), Var::dz(0), Var::dzbar(1)])]
        )));
    }

    #[test]
    fn pushforward_examples() {
        let f = tp(1, &[(1, &[Var::z(0), Var::zbar(1)])]);
        assert_eq!(pushforward_laplacian(&f).unwrap(), f.scale(&int(8)));
        let c = TensorPoly::from_poly(BiPoly::one(3)).unwrap();
        assert!(pushforward_laplacian(&c).unwrap().is_zero());
        let t = tp(2, &[(1, &[Var::dz(0), Var::dzbar(1)])]);
        assert_eq!(pushforward_laplacian(&t).unwrap(), t.scale(&int(12)));
        let bad = tp(2, &[(1, &[Var::z(0), Var::dz(1)])]);
        assert!(matches!(pushforward_laplacian(&bad), Err(Error::Usage(_))));
    }

    #[test]
    fn degree_bookkeeping_matches_tags() {
        let n = 1;
        let t = tp(n, &[(1, &[Var::z(0), Var::z(1), Var::zbar(1), Var::dz(0), Var::dzbar(0)])]);
        for tag in OperatorTag::ALL {
            if tag == OperatorTag::PushforwardLaplacian {
                continue;
            }
            let img = tag.apply(&t).unwrap();
            if !img.is_zero() {
                assert_eq!(Some(img.multidegree()), tag.target(t.multidegree()), "{tag}");
            }
        }
    }

    fn arb_tensor(n: usize, md: Multidegree) -> impl Strategy<Value = TensorPoly> {
        let monos = crate::polyring::monomials_of_multidegree(n, md);
        let len = monos.len();
        prop::collection::vec(-3i64..=3, len).prop_map(move |cs| {
            let body = BiPoly::from_terms(n, monos.iter().cloned().zip(cs.into_iter().map(int)));
            TensorPoly::new(body, md).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hol_and_antihol_gradients_commute(t in arb_tensor(1, Multidegree::new(2, 2, 1, 0))) {
            let a = symgrad(&symgrad(&t, Side::Hol), Side::Antihol);
            let b = symgrad(&symgrad(&t, Side::Antihol), Side::Hol);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn correction_term_matches_monomial_route(t in arb_tensor(2, Multidegree::new(1, 2, 1, 0))) {
            let c = correction_term(&t).unwrap();
            let lap = mixed_laplacian(&t).body().scale(&int(-4));
            let expected = &lap - c.body();
            let got = pushforward_laplacian(&t).unwrap();
            prop_assert_eq!(got.body(), &expected);
        }

        #[test]
        fn laplacian_commutes_with_fiber_derivatives(t in arb_tensor(1, Multidegree::new(2, 1, 1, 1))) {
            let n = 1;
            for i in 0..=n {
                for v in [Var::dz(i), Var::dzbar(i)] {
                    let a = t.body().mixed_laplacian().partial(v);
                    let b = t.body().partial(v).mixed_laplacian();
                    prop_assert_eq!(a, b);
                }
            }
        }

        #[test]
        fn euler_identities(t in arb_tensor(2, Multidegree::new(2, 1, 0, 1))) {
            let n = 2;
            let md = t.multidegree();
            let mut hol = BiPoly::zero(n);
            let mut anti = BiPoly::zero(n);
            for i in 0..=n {
                hol = &hol + &(&BiPoly::var(n, Var::z(i)) * &t.body().partial(Var::z(i)));
                anti = &anti + &(&BiPoly::var(n, Var::zbar(i)) * &t.body().partial(Var::zbar(i)));
            }
            prop_assert_eq!(hol, t.body().scale(&int(md.k as i64)));
            prop_assert_eq!(anti, t.body().scale(&int(md.l as i64)));
        }
    }
}
