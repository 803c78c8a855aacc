//! The spaces `SP`, `SH`, `T` and the primitive subspaces as exact subspaces
//! of monomial coordinate spaces, the projector built from a pair of lowering
//! and raising operators, and the four-branch decomposition of a `T`-space.
//!
//! Every operator in play preserves the torus weight of a monomial (`z_i` and
//! `dz_i` count `+e_i`, `zb_i` and `dzb_i` count `-e_i`), so kernels are
//! computed block by block over weight classes.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::elim::{self, IntRow};
use crate::linalg::{check_cap, Ambient, MonomialBasis, RatMatrix, SparseVec, Subspace};
use crate::polyring::{BiPoly, Multidegree};
use crate::tensorops::{special_tensor, OperatorTag, SpecialTensor, TensorPoly};

pub use crate::dims::{
    dim_primitive, dim_primitive_expanded, dim_primitive_from_t, dim_sh, dim_sp, dim_t, table1_corrected,
    table1_printed, ClosedFormRow, PrimitiveCase, SpaceQuery,
};

/// Harmonic and divergence-free.
pub const SH_CONSTRAINTS: [OperatorTag; 3] = [
    OperatorTag::MixedLaplacian,
    OperatorTag::DivergenceHol,
    OperatorTag::DivergenceAntihol,
];

/// Harmonic, divergence-free and traceless.
pub const T_CONSTRAINTS: [OperatorTag; 4] = [
    OperatorTag::MixedLaplacian,
    OperatorTag::DivergenceHol,
    OperatorTag::DivergenceAntihol,
    OperatorTag::Trace,
];

fn ambient_of(q: &SpaceQuery) -> Ambient {
    match q.multidegree() {
        Some(md) => Ambient::tensors(q.n, md),
        None => Ambient::Plain(0),
    }
}

/// Monomial indices grouped by torus weight, in increasing index order.
fn weight_blocks(mb: &MonomialBasis) -> Vec<Vec<usize>> {
    let mut blocks: BTreeMap<Vec<i32>, Vec<usize>> = BTreeMap::new();
    for (i, m) in mb.monomials().iter().enumerate() {
        blocks.entry(m.weight()).or_default().push(i);
    }
    blocks.into_values().collect()
}

/// Rows of the stacked operator matrix restricted to one weight block, one
/// row per (operator, image monomial), columns local to the block.
fn block_rows(mb: &MonomialBasis, cols: &[usize], ops: &[OperatorTag]) -> Vec<IntRow> {
    let mut index: HashMap<(usize, crate::polyring::Monomial), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    for (local, &g) in cols.iter().enumerate() {
        let m = &mb.monomials()[g];
        for (oi, op) in ops.iter().enumerate() {
            for (img, c) in op.apply_monomial(m) {
                let id = *index.entry((oi, img)).or_insert_with(|| {
                    rows.push(Vec::new());
                    rows.len() - 1
                });
                match rows[id].last_mut() {
                    Some(last) if last.0 == local => last.1 += c,
                    _ => rows[id].push((local, c)),
                }
            }
        }
    }
    rows.into_iter()
        .map(|r| {
            r.into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(j, c)| (j, BigInt::from(c)))
                .collect::<IntRow>()
        })
        .filter(|r| !r.is_empty())
        .collect()
}

type CacheKey = (usize, Multidegree, Vec<OperatorTag>);

fn cache() -> &'static Mutex<HashMap<CacheKey, Subspace>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Subspace>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Common kernel of `ops` on the full space of multidegree `md`, in reduced
/// row echelon form.
pub fn constrained_kernel(n: usize, md: Multidegree, ops: &[OperatorTag]) -> Result<Subspace> {
    let mut key_ops = ops.to_vec();
    key_ops.sort();
    key_ops.dedup();
    let key = (n, md, key_ops);
    if let Some(s) = cache().lock().expect("cache lock").get(&key) {
        return Ok(s.clone());
    }
    let mb = MonomialBasis::new(n, md)?;
    let blocks = weight_blocks(&mb);
    let per_block: Vec<Vec<SparseVec>> = blocks
        .par_iter()
        .map(|cols| {
            let rows = block_rows(&mb, cols, &key.2);
            let ker = elim::kernel(&rows, cols.len());
            let ints: Vec<IntRow> = ker.iter().map(|v| elim::integer_row(v)).collect();
            elim::rref(&ints)
                .into_iter()
                .map(|(_, r)| r.into_iter().map(|(j, v)| (cols[j], v)).collect())
                .collect()
        })
        .collect();
    let basis = per_block.into_iter().flatten().collect();
    let s = Subspace::from_rref_unchecked(Ambient::tensors(n, md), basis);
    cache().lock().expect("cache lock").insert(key, s.clone());
    Ok(s)
}

/// Dimension of the common kernel, by ranks only.
pub fn constrained_kernel_dim(n: usize, md: Multidegree, ops: &[OperatorTag]) -> Result<usize> {
    let mb = MonomialBasis::new(n, md)?;
    let blocks = weight_blocks(&mb);
    Ok(blocks
        .par_iter()
        .map(|cols| cols.len() - elim::rank(&block_rows(&mb, cols, ops)))
        .sum())
}

/// Full monomial basis.
pub fn basis_sp(q: &SpaceQuery) -> Result<Subspace> {
    let amb = ambient_of(q);
    check_cap(amb.dim())?;
    Ok(Subspace::full(amb))
}

pub fn basis_sh(q: &SpaceQuery) -> Result<Subspace> {
    match q.multidegree() {
        Some(md) => constrained_kernel(q.n, md, &SH_CONSTRAINTS),
        None => Ok(Subspace::zero(Ambient::Plain(0))),
    }
}

pub fn basis_t(q: &SpaceQuery) -> Result<Subspace> {
    match q.multidegree() {
        Some(md) => constrained_kernel(q.n, md, &T_CONSTRAINTS),
        None => Ok(Subspace::zero(Ambient::Plain(0))),
    }
}

fn primitive_ops(case: PrimitiveCase) -> Vec<OperatorTag> {
    let mut ops = T_CONSTRAINTS.to_vec();
    ops.extend(case.kernel_operators());
    ops
}

pub fn basis_primitive(q: &SpaceQuery, case: PrimitiveCase) -> Result<Subspace> {
    if !q.is_empty_space() && !case.is_consistent(q) {
        return Err(Error::usage(format!("primitive case {} does not apply to {}", case, q)));
    }
    match q.multidegree() {
        Some(md) => constrained_kernel(q.n, md, &primitive_ops(case)),
        None => Ok(Subspace::zero(Ambient::Plain(0))),
    }
}

/// Kernel dimensions without materialising bases.
pub fn brute_dim_sh(q: &SpaceQuery) -> Result<usize> {
    match q.multidegree() {
        Some(md) => constrained_kernel_dim(q.n, md, &SH_CONSTRAINTS),
        None => Ok(0),
    }
}

pub fn brute_dim_t(q: &SpaceQuery) -> Result<usize> {
    match q.multidegree() {
        Some(md) => constrained_kernel_dim(q.n, md, &T_CONSTRAINTS),
        None => Ok(0),
    }
}

pub fn brute_dim_primitive(q: &SpaceQuery, case: PrimitiveCase) -> Result<usize> {
    if !q.is_empty_space() && !case.is_consistent(q) {
        return Err(Error::usage(format!("primitive case {} does not apply to {}", case, q)));
    }
    match q.multidegree() {
        Some(md) => constrained_kernel_dim(q.n, md, &primitive_ops(case)),
        None => Ok(0),
    }
}

/// Apply each operator of `chain` in order (first element first).
pub fn apply_chain(t: &TensorPoly, chain: &[OperatorTag]) -> Result<TensorPoly> {
    let mut cur = t.clone();
    for op in chain {
        cur = op.apply(&cur)?;
    }
    Ok(cur)
}

/// Span of `f(b)` over the basis `b` of `domain`, as a subspace of the tensor
/// ambient `(n, md)`.
pub fn image_of<F>(domain: &Subspace, n: usize, md: Multidegree, f: F) -> Result<Subspace>
where
    F: Fn(&TensorPoly) -> Result<TensorPoly> + Sync,
{
    let mb = MonomialBasis::new(n, md)?;
    let vecs = domain
        .tensors()?
        .par_iter()
        .map(|t| {
            let img = f(t)?;
            mb.coordinates(img.body())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Subspace::from_vectors(Ambient::tensors(n, md), vecs))
}

/// A pair `(phi, psi)` satisfying `phi psi - psi phi = (a - b)` on the graded
/// family, where `phi` lowers `b` and raises `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorPair {
    /// `phi = grad`, `psi = i_W`; needs `k <= p`.
    HolGradient,
    /// `phi = i_W`, `psi = grad`; needs `p <= k`.
    HolContraction,
    /// `phi = gradb`, `psi = i_Wb`; needs `l <= q`.
    AntiholGradient,
    /// `phi = i_Wb`, `psi = gradb`; needs `q <= l`.
    AntiholContraction,
}

impl OperatorPair {
    pub const ALL: [OperatorPair; 4] = [
        OperatorPair::HolGradient,
        OperatorPair::HolContraction,
        OperatorPair::AntiholGradient,
        OperatorPair::AntiholContraction,
    ];

    /// `(phi, psi)`.
    pub fn operators(&self) -> (OperatorTag, OperatorTag) {
        use OperatorTag::*;
        match self {
            OperatorPair::HolGradient => (SymgradHol, ContractHol),
            OperatorPair::HolContraction => (ContractHol, SymgradHol),
            OperatorPair::AntiholGradient => (SymgradAntihol, ContractAntihol),
            OperatorPair::AntiholContraction => (ContractAntihol, SymgradAntihol),
        }
    }

    /// `(a, b)`: `phi` maps degree `(a, b)` to `(a+1, b-1)`.
    pub fn grading(&self, q: &SpaceQuery) -> (i64, i64) {
        match self {
            OperatorPair::HolGradient => (q.p, q.k),
            OperatorPair::HolContraction => (q.k, q.p),
            OperatorPair::AntiholGradient => (q.q, q.l),
            OperatorPair::AntiholContraction => (q.l, q.q),
        }
    }

    /// Index shift of one application of `psi` as `(dp, dq, dk, dl)`.
    pub fn psi_shift(&self) -> (i64, i64, i64, i64) {
        match self {
            OperatorPair::HolGradient => (-1, 0, 1, 0),
            OperatorPair::HolContraction => (1, 0, -1, 0),
            OperatorPair::AntiholGradient => (0, -1, 0, 1),
            OperatorPair::AntiholContraction => (0, 1, 0, -1),
        }
    }
}

/// `P = sum_{s=0..b} alpha_s psi^s phi^s` with `alpha_0 = 1` and
/// `alpha_{s+1} = alpha_s / ((s+1)(b-a-s-2))`.
#[derive(Clone, Debug)]
pub struct Projector {
    pub query: SpaceQuery,
    pub pair: OperatorPair,
    pub alphas: Vec<BigRational>,
}

pub fn projector_lemma33(q: &SpaceQuery, pair: OperatorPair) -> Result<Projector> {
    let (a, b) = pair.grading(q);
    if q.is_empty_space() || b > a {
        return Err(Error::usage(format!("projector for {:?} needs the lowered degree <= the raised one at {}", pair, q)));
    }
    let mut alphas = vec![BigRational::one()];
    for s in 0..b {
        let den = (s + 1) * (b - a - s - 2);
        let next = alphas[s as usize].clone() / BigRational::from_integer(BigInt::from(den));
        alphas.push(next);
    }
    Ok(Projector { query: *q, pair, alphas })
}

impl Projector {
    pub fn apply(&self, t: &TensorPoly) -> Result<TensorPoly> {
        let md = self.query.multidegree().expect("nonempty");
        if t.multidegree() != md && !t.is_zero() {
            return Err(Error::usage(format!(
                "projector defined on multidegree {}, got {}",
                md,
                t.multidegree()
            )));
        }
        let (phi, psi) = self.pair.operators();
        let mut out = TensorPoly::zero(t.n(), md);
        let mut down = t.clone();
        for (s, alpha) in self.alphas.iter().enumerate() {
            if s > 0 {
                down = phi.apply(&down)?;
            }
            if down.is_zero() {
                break;
            }
            let mut up = down.clone();
            for _ in 0..s {
                up = psi.apply(&up)?;
            }
            if !up.is_zero() {
                out = out.try_add(&up.scale(alpha))?;
            }
        }
        Ok(out)
    }

    /// Matrix on the coordinates of `domain`'s ambient, column `j` being the
    /// image of basis vector `j`.
    pub fn matrix(&self, domain: &Subspace) -> Result<RatMatrix> {
        crate::linalg::operator_matrix(|t| self.apply(t), domain, domain.ambient())
    }
}

/// One summand of the four-branch decomposition of a `T`-space: the image of
/// a primitive space under `r` hol and `s` antihol operator applications.
#[derive(Clone, Debug)]
pub struct TPiece {
    pub r: i64,
    pub s: i64,
    pub case: PrimitiveCase,
    /// Indices of the primitive space the piece is built from.
    pub source: SpaceQuery,
    pub space: Subspace,
}

impl TPiece {
    /// Operators applied to the primitive space, hol ones first.
    pub fn chain(&self) -> Vec<OperatorTag> {
        piece_chain(self.case, self.r, self.s)
    }
}

fn piece_chain(case: PrimitiveCase, r: i64, s: i64) -> Vec<OperatorTag> {
    let hol = if case.hol_is_gradient() {
        OperatorTag::ContractHol
    } else {
        OperatorTag::SymgradHol
    };
    let anti = if case.antihol_is_gradient() {
        OperatorTag::ContractAntihol
    } else {
        OperatorTag::SymgradAntihol
    };
    let mut chain = vec![hol; r as usize];
    chain.extend(std::iter::repeat_n(anti, s as usize));
    chain
}

/// Ranges of `(r, s)` and the source indices for one branch.
pub fn piece_labels(q: &SpaceQuery, case: PrimitiveCase) -> Vec<(i64, i64, SpaceQuery)> {
    let rmax = if case.hol_is_gradient() { q.k } else { q.p };
    let smax = if case.antihol_is_gradient() { q.l } else { q.q };
    let hs = if case.hol_is_gradient() { 1 } else { -1 };
    let as_ = if case.antihol_is_gradient() { 1 } else { -1 };
    let mut out = Vec::new();
    for r in 0..=rmax.max(-1) {
        for s in 0..=smax.max(-1) {
            out.push((r, s, q.shifted(hs * r, as_ * s, -hs * r, -as_ * s)));
        }
    }
    out
}

/// The decomposition along the branch chosen by the index region.
pub fn decompose_t(q: &SpaceQuery) -> Result<Vec<TPiece>> {
    decompose_t_with_case(q, PrimitiveCase::for_indices(q))
}

/// The decomposition along an explicitly chosen branch; the branch must be
/// consistent with the indices (on a boundary both neighbours are).
pub fn decompose_t_with_case(q: &SpaceQuery, case: PrimitiveCase) -> Result<Vec<TPiece>> {
    if q.is_empty_space() {
        return Ok(Vec::new());
    }
    if !case.is_consistent(q) {
        return Err(Error::usage(format!("branch {} does not apply to {}", case, q)));
    }
    let md = q.multidegree().expect("nonempty");
    let mut pieces = Vec::new();
    for (r, s, source) in piece_labels(q, case) {
        let prim = basis_primitive(&source, case)?;
        let chain = piece_chain(case, r, s);
        let space = image_of(&prim, q.n, md, |t| apply_chain(t, &chain))?;
        pieces.push(TPiece { r, s, case, source, space });
    }
    Ok(pieces)
}

/// `W*.SP^{p-1,q}_{k,l-1} + Wb*.SP^{p,q-1}_{k-1,l} + r^2.SP^{p,q}_{k-1,l-1}`.
pub fn radial_complement(q: &SpaceQuery) -> Result<Subspace> {
    let Some(md) = q.multidegree() else {
        return Ok(Subspace::zero(Ambient::Plain(0)));
    };
    let n = q.n;
    let mb = MonomialBasis::new(n, md)?;
    let mut vecs = Vec::new();
    for (kind, src) in [
        (SpecialTensor::WStar, q.shifted(-1, 0, 0, -1)),
        (SpecialTensor::WbarStar, q.shifted(0, -1, -1, 0)),
        (SpecialTensor::RSquared, q.shifted(0, 0, -1, -1)),
    ] {
        let Some(smd) = src.multidegree() else { continue };
        let factor: BiPoly = special_tensor(kind, n).into_body();
        let src_basis = MonomialBasis::new(n, smd)?;
        for m in src_basis.monomials() {
            let prod = factor.try_mul(&BiPoly::monomial(n, m.clone(), BigRational::one()))?;
            vecs.push(mb.coordinates(&prod)?);
        }
    }
    Ok(Subspace::from_vectors(Ambient::tensors(n, md), vecs))
}

/// True when `SP = SH (+) radial_complement` as a direct sum.
pub fn check_radial_splitting(q: &SpaceQuery) -> Result<bool> {
    let sp = basis_sp(q)?;
    let sh = basis_sh(q)?;
    let c = radial_complement(q)?;
    if q.is_empty_space() {
        return Ok(true);
    }
    let total = sh.sum(&c)?;
    Ok(sh.dim() + c.dim() == sp.dim() && total.dim() == sp.dim())
}

/// True when each of the four operators maps `T^{p,q}_{k,l}` into the
/// `T`-space of the shifted indices.
pub fn check_operator_mapping(q: &SpaceQuery) -> Result<Vec<(OperatorTag, bool)>> {
    let t = basis_t(q)?;
    let mut out = Vec::new();
    if q.is_empty_space() {
        return Ok(out);
    }
    let tensors = t.tensors()?;
    for op in [
        OperatorTag::ContractHol,
        OperatorTag::ContractAntihol,
        OperatorTag::SymgradHol,
        OperatorTag::SymgradAntihol,
    ] {
        let ok = tensors.iter().all(|b| {
            let img = op.apply(b).expect("first-order operators never fail");
            T_CONSTRAINTS
                .iter()
                .all(|c| c.apply(&img).map(|x| x.is_zero()).unwrap_or(false))
        });
        out.push((op, ok));
    }
    Ok(out)
}

/// Coordinates of `t` in the monomial basis of its own multidegree.
pub fn coordinates(t: &TensorPoly) -> Result<SparseVec> {
    MonomialBasis::new(t.n(), t.multidegree())?.coordinates(t.body())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat;

    fn sq(n: usize, p: i64, q: i64, k: i64, l: i64) -> SpaceQuery {
        SpaceQuery::new(n, p, q, k, l)
    }

    #[test]
    fn sp_dimensions() {
        assert_eq!(basis_sp(&sq(1, 0, 0, 1, 1)).unwrap().dim(), 4);
        assert_eq!(basis_sp(&sq(2, 1, 1, 0, 0)).unwrap().dim(), 9);
        assert_eq!(basis_sp(&sq(3, 0, 0, 0, 0)).unwrap().dim(), 1);
    }

    #[test]
    fn t_space_examples() {
        assert_eq!(basis_t(&sq(1, 0, 0, 1, 1)).unwrap().dim(), 3);
        assert_eq!(basis_t(&sq(2, 1, 1, 0, 0)).unwrap().dim(), 8);
        assert_eq!(basis_t(&sq(2, 1, -1, 0, 0)).unwrap().dim(), 0);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(basis_primitive(&sq(2, 0, 1, 0, 1), PrimitiveCase::GradGrad).unwrap().dim(), 3);
        assert_eq!(basis_primitive(&sq(2, 0, 2, 0, 1), PrimitiveCase::GradGrad).unwrap().dim(), 8);
        assert_eq!(basis_primitive(&sq(2, 0, 0, 0, 0), PrimitiveCase::GradGrad).unwrap().dim(), 1);
        assert!(matches!(
            basis_primitive(&sq(2, 0, 1, 1, 0), PrimitiveCase::GradGrad),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn ranks_match_bases() {
        for q in [sq(2, 1, 1, 1, 1), sq(1, 2, 1, 1, 2), sq(2, 0, 2, 2, 0)] {
            assert_eq!(brute_dim_t(&q).unwrap(), basis_t(&q).unwrap().dim());
            let case = PrimitiveCase::for_indices(&q);
            assert_eq!(
                brute_dim_primitive(&q, case).unwrap(),
                basis_primitive(&q, case).unwrap().dim()
            );
        }
    }

    #[test]
    fn blocked_kernel_matches_dense_kernel() {
        let q = sq(1, 1, 1, 1, 1);
        let md = q.multidegree().unwrap();
        let full = Subspace::full(Ambient::tensors(1, md));
        let mut rows = Vec::new();
        for op in T_CONSTRAINTS {
            let target = op.target(md).unwrap();
            let m = crate::linalg::operator_matrix(|t| op.apply(t), &full, &Ambient::tensors(1, target)).unwrap();
            rows.extend(m.integer_rows());
        }
        let dense = Subspace::from_vectors(
            Ambient::tensors(1, md),
            elim::kernel(&rows, full.dim()),
        );
        assert_eq!(dense, basis_t(&q).unwrap());
    }

    #[test]
    fn projector_coefficients() {
        let p0 = projector_lemma33(&sq(2, 2, 0, 0, 0), OperatorPair::HolGradient).unwrap();
        assert_eq!(p0.alphas, vec![rat(1, 1)]);
        for p in 1..4 {
            let pr = projector_lemma33(&sq(2, p, 0, 1, 1), OperatorPair::HolGradient).unwrap();
            assert_eq!(pr.alphas[1], rat(-1, p + 1));
        }
        assert!(projector_lemma33(&sq(2, 0, 0, 1, 1), OperatorPair::HolGradient).is_err());
    }

    #[test]
    fn projector_is_idempotent_on_t() {
        let q = sq(1, 1, 1, 1, 1);
        let t = basis_t(&q).unwrap();
        let pr = projector_lemma33(&q, OperatorPair::HolGradient).unwrap();
        let m = pr.matrix(&t).unwrap();
        let b = t.basis_matrix();
        // P(P(b_j)) = P(b_j): apply the ambient matrix of P to its own images
        let full = Subspace::full(t.ambient().clone());
        let pm = pr.matrix(&full).unwrap();
        assert_eq!(pm.mul(&m).unwrap(), m);
        assert_eq!(m.cols(), b.cols());
    }

    #[test]
    fn single_piece_cases() {
        for n in 1..3 {
            let q = sq(n, 0, 0, 2, 2);
            let pieces = decompose_t(&q).unwrap();
            assert_eq!(pieces.len(), 1);
            assert_eq!(pieces[0].space, basis_t(&q).unwrap());
            let q = sq(n, 0, 1, 1, 0);
            let pieces = decompose_t(&q).unwrap();
            assert_eq!(pieces.len(), 1);
            assert_eq!(pieces[0].case, PrimitiveCase::ContractGrad);
        }
    }

    #[test]
    fn pieces_fill_t() {
        let q = sq(2, 1, 1, 1, 1);
        let pieces = decompose_t(&q).unwrap();
        let total: usize = pieces.iter().map(|p| p.space.dim()).sum();
        assert_eq!(total, basis_t(&q).unwrap().dim());
        let mut sum = Subspace::zero(pieces[0].space.ambient().clone());
        for p in &pieces {
            sum = sum.sum(&p.space).unwrap();
        }
        assert_eq!(sum.dim(), total);
    }

    #[test]
    fn radial_splitting_small() {
        for q in [sq(1, 1, 0, 1, 2), sq(2, 1, 1, 1, 1), sq(2, 0, 0, 2, 2)] {
            assert!(check_radial_splitting(&q).unwrap(), "{q}");
        }
    }

    #[test]
    fn operators_preserve_t_family() {
        for (_, ok) in check_operator_mapping(&sq(2, 1, 1, 1, 1)).unwrap() {
            assert!(ok);
        }
    }
}
