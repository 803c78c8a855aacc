//! Exact dense matrices and subspaces over the rationals.

pub mod elim;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyring::{monomials_of_multidegree, BiPoly, Monomial, Multidegree};
use crate::tensorops::TensorPoly;

pub use elim::IntRow;

/// Default cap on the dimension of any ambient monomial space.
pub const DEFAULT_AMBIENT_CAP: usize = 20_000;

static AMBIENT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_AMBIENT_CAP);

pub fn ambient_cap() -> usize {
    AMBIENT_CAP.load(Ordering::Relaxed)
}

pub fn set_ambient_cap(cap: usize) {
    AMBIENT_CAP.store(cap, Ordering::Relaxed);
}

pub fn check_cap(requested: usize) -> Result<()> {
    let cap = ambient_cap();
    if requested > cap {
        return Err(Error::Resource { requested, cap });
    }
    Ok(())
}

pub type SparseVec = Vec<(usize, BigRational)>;

/// Dense matrix of exact rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::usage("ragged rows"));
        }
        let nrows = rows.len();
        Ok(RatMatrix {
            rows: nrows,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(rows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> SparseVec {
        (0..self.rows)
            .filter_map(|i| {
                let v = self.get(i, j);
                (!v.is_zero()).then(|| (i, v.clone()))
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::usage(format!(
                "shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::usage("shape mismatch in subtraction"));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Rows cleared of denominators; same row space and kernel.
    pub fn integer_rows(&self) -> Vec<IntRow> {
        (0..self.rows)
            .map(|i| {
                let row: SparseVec = (0..self.cols)
                    .filter_map(|j| {
                        let v = self.get(i, j);
                        (!v.is_zero()).then(|| (j, v.clone()))
                    })
                    .collect();
                elim::integer_row(&row)
            })
            .filter(|r| !r.is_empty())
            .collect()
    }

    pub fn rank(&self) -> usize {
        elim::rank(&self.integer_rows())
    }

    /// Null space of the matrix as a subspace of `Q^cols`.
    pub fn kernel_basis(&self) -> Subspace {
        let vecs = elim::kernel(&self.integer_rows(), self.cols);
        Subspace::from_vectors(Ambient::Plain(self.cols), vecs)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Ambient coordinate space of a subspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// `Q^d` with the standard basis.
    Plain(usize),
    /// Polynomial tensors of one multidegree over `C^{n+1}`, coordinates in
    /// the ascending graded-lex monomial basis.
    Tensors { n: usize, md: Multidegree },
}

impl Ambient {
    pub fn tensors(n: usize, md: Multidegree) -> Self {
        Ambient::Tensors { n, md }
    }

    pub fn dim(&self) -> usize {
        match self {
            Ambient::Plain(d) => *d,
            Ambient::Tensors { n, md } => crate::dims::dim_sp_count(*n, *md),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Plain(d) => write!(f, "Q^{}", d),
            Ambient::Tensors { n, md } => write!(f, "SP(n={}, k={}, l={}, p={}, q={})", n, md.k, md.l, md.p, md.q),
        }
    }
}

/// Ordered monomial basis of a tensor ambient space with a reverse index.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    monomials: Vec<Monomial>,
    index: std::collections::HashMap<Monomial, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, md: Multidegree) -> Result<Self> {
        check_cap(crate::dims::dim_sp_count(n, md))?;
        let monomials = monomials_of_multidegree(n, md);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(MonomialBasis { monomials, index })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of a polynomial; fails if a term lies outside the basis.
    pub fn coordinates(&self, f: &BiPoly) -> Result<SparseVec> {
        let mut out: SparseVec = f
            .terms()
            .map(|(m, c)| {
                self.index_of(m)
                    .map(|i| (i, c.clone()))
                    .ok_or_else(|| Error::usage(format!("monomial {} outside the ambient basis", m)))
            })
            .collect::<Result<_>>()?;
        out.sort_by_key(|e| e.0);
        Ok(out)
    }

    pub fn polynomial(&self, n: usize, v: &SparseVec) -> BiPoly {
        BiPoly::from_terms(n, v.iter().map(|(i, c)| (self.monomials[*i].clone(), c.clone())))
    }
}

/// A linear subspace of an ambient coordinate space, held in reduced row
/// echelon form (one basis vector per row, leading entry 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: Ambient,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn from_vectors(ambient: Ambient, vectors: Vec<SparseVec>) -> Self {
        let rows: Vec<IntRow> = vectors
            .iter()
            .map(|v| elim::integer_row(v))
            .filter(|r| !r.is_empty())
            .collect();
        let basis = elim::rref(&rows).into_iter().map(|(_, r)| r).collect();
        Subspace { ambient, basis }
    }

    /// Trust that `basis` is already in reduced row echelon form.
    pub(crate) fn from_rref_unchecked(ambient: Ambient, mut basis: Vec<SparseVec>) -> Self {
        basis.sort_by_key(|v| v.first().map(|e| e.0));
        Subspace { ambient, basis }
    }

    pub fn full(ambient: Ambient) -> Self {
        let d = ambient.dim();
        let basis = (0..d).map(|i| vec![(i, BigRational::one())]).collect();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: Ambient) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    /// Basis vectors as the columns of an `ambient_dim x dim` matrix.
    pub fn basis_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.ambient_dim(), &self.basis)
    }

    /// Basis vector `j` as a tensor; only for tensor ambients.
    pub fn tensors(&self) -> Result<Vec<TensorPoly>> {
        let Ambient::Tensors { n, md } = self.ambient else {
            return Err(Error::usage("subspace is not a space of tensors"));
        };
        let mb = MonomialBasis::new(n, md)?;
        Ok(self
            .basis
            .iter()
            .map(|v| TensorPoly::from_parts_unchecked(mb.polynomial(n, v), md))
            .collect())
    }

    pub fn canonicalize(&self) -> Subspace {
        Subspace::from_vectors(self.ambient.clone(), self.basis.clone())
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::usage(format!(
                "subspaces of different ambients: {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let mut vecs = self.basis.clone();
        vecs.extend(other.basis.iter().cloned());
        Ok(Subspace::from_vectors(self.ambient.clone(), vecs))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let a = self.dim();
        // Solve sum c_i v_i - sum d_j w_j = 0, one equation per coordinate.
        let d = self.ambient_dim();
        let mut coord_rows: Vec<SparseVec> = vec![Vec::new(); d];
        for (j, v) in self.basis.iter().enumerate() {
            for (i, x) in v {
                coord_rows[*i].push((j, x.clone()));
            }
        }
        for (j, w) in other.basis.iter().enumerate() {
            for (i, x) in w {
                coord_rows[*i].push((a + j, -x.clone()));
            }
        }
        let rows: Vec<IntRow> = coord_rows
            .iter()
            .map(|r| elim::integer_row(r))
            .filter(|r| !r.is_empty())
            .collect();
        let ker = elim::kernel(&rows, a + other.dim());
        let vecs = ker
            .into_iter()
            .map(|c| {
                let mut acc: std::collections::BTreeMap<usize, BigRational> = Default::default();
                for (j, cj) in c.iter().filter(|(j, _)| *j < a) {
                    for (i, x) in &self.basis[*j] {
                        *acc.entry(*i).or_insert_with(BigRational::zero) += cj * x;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(Subspace::from_vectors(self.ambient.clone(), vecs))
    }

    /// `other` is a subspace of `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(self.sum(other)?.dim() == self.dim())
    }

    pub fn contains_vector(&self, v: &SparseVec) -> bool {
        let mut vecs = self.basis.clone();
        vecs.push(v.clone());
        Subspace::from_vectors(self.ambient.clone(), vecs).dim() == self.dim()
    }
}

/// Matrix of `op` from `domain` into the tensor ambient `codomain`: column `j`
/// holds the coordinates of `op(basis_j)`.
pub fn operator_matrix<F>(op: F, domain: &Subspace, codomain: &Ambient) -> Result<RatMatrix>
where
    F: Fn(&TensorPoly) -> Result<TensorPoly>,
{
    let Ambient::Tensors { n, md } = *codomain else {
        return Err(Error::usage("codomain must be a tensor ambient"));
    };
    let target = MonomialBasis::new(n, md)?;
    let mut cols = Vec::with_capacity(domain.dim());
    for t in domain.tensors()? {
        let img = op(&t)?;
        if !img.is_zero() && img.multidegree() != md {
            return Err(Error::usage(format!(
                "operator maps into multidegree {}, expected {}",
                img.multidegree(),
                md
            )));
        }
        if !img.is_zero() && img.n() != n {
            return Err(Error::usage("operator changes n"));
        }
        cols.push(target.coordinates(img.body())?);
    }
    Ok(RatMatrix::from_columns(target.len(), &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{int, Var};
    use crate::tensorops::{contract, Side};
    use proptest::prelude::*;

    fn q(v: i64) -> BigRational {
        int(v)
    }

    #[test]
    fn identity_operator_matrix() {
        let amb = Ambient::tensors(1, Multidegree::new(1, 1, 0, 0));
        let full = Subspace::full(amb.clone());
        let m = operator_matrix(|t| Ok(t.clone()), &full, &amb).unwrap();
        assert_eq!(m, RatMatrix::identity(4));
    }

    #[test]
    fn mixed_laplacian_matrix_on_bidegree_one_one() {
        let amb = Ambient::tensors(1, Multidegree::new(1, 1, 0, 0));
        let target = Ambient::tensors(1, Multidegree::new(0, 0, 0, 0));
        let m = operator_matrix(
            |t| Ok(crate::tensorops::mixed_laplacian(t)),
            &Subspace::full(amb),
            &target,
        )
        .unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 4));
        assert_eq!(m.rank(), 1);
        // ascending order: z1*zb1, z1*zb0, z0*zb1, z0*zb0
        let mut images: Vec<_> = (0..4).map(|j| m.get(0, j).clone()).collect();
        images.sort();
        assert_eq!(images, vec![q(0), q(0), q(1), q(1)]);
        assert_eq!(m.kernel_basis().dim(), 3);
    }

    #[test]
    fn contraction_matrix_sends_dz0_to_z0() {
        let n = 1;
        let dom_amb = Ambient::tensors(n, Multidegree::new(0, 0, 1, 0));
        let mb = MonomialBasis::new(n, Multidegree::new(0, 0, 1, 0)).unwrap();
        let idx = mb.index_of(&Monomial::var(n, Var::dz(0))).unwrap();
        let dom = Subspace::from_vectors(dom_amb, vec![vec![(idx, q(1))]]);
        let cod = Ambient::tensors(n, Multidegree::new(1, 0, 0, 0));
        let m = operator_matrix(|t| Ok(contract(t, Side::Hol)), &dom, &cod).unwrap();
        let cb = MonomialBasis::new(n, Multidegree::new(1, 0, 0, 0)).unwrap();
        let z0 = cb.index_of(&Monomial::var(n, Var::z(0))).unwrap();
        assert_eq!(m.column(0), vec![(z0, q(1))]);
    }

    #[test]
    fn degree_mismatch_is_usage_error() {
        let amb = Ambient::tensors(1, Multidegree::new(0, 0, 1, 0));
        let wrong = Ambient::tensors(1, Multidegree::new(0, 1, 0, 0));
        let err = operator_matrix(|t| Ok(contract(t, Side::Hol)), &Subspace::full(amb), &wrong).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn kernels_of_identity_and_zero() {
        assert_eq!(RatMatrix::identity(5).kernel_basis().dim(), 0);
        assert_eq!(RatMatrix::zeros(3, 5).kernel_basis().dim(), 5);
    }

    #[test]
    fn subspace_examples() {
        let amb = Ambient::Plain(4);
        let v = Subspace::from_vectors(amb.clone(), vec![vec![(0, q(1)), (1, q(2))], vec![(2, q(3))]]);
        assert_eq!(v.intersect(&v).unwrap(), v);
        let w = Subspace::from_vectors(amb.clone(), vec![vec![(2, q(1)), (3, q(1))], vec![(0, q(1)), (1, q(2))]]);
        let s = v.sum(&w).unwrap();
        let i = v.intersect(&w).unwrap();
        assert_eq!(s.dim() + i.dim(), v.dim() + w.dim());
        assert_eq!(i.dim(), 1);
        assert!(Subspace::full(amb.clone()).contains(&v).unwrap());
        assert!(!v.contains(&w).unwrap());
        let other = Subspace::full(Ambient::Plain(3));
        assert!(matches!(v.sum(&other), Err(Error::Usage(_))));
    }

    #[test]
    fn resource_cap_is_enforced() {
        // n=4, k=l=p=q=4 has 70^4 monomials.
        let err = MonomialBasis::new(4, Multidegree::new(4, 4, 4, 4)).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    fn arb_matrix() -> impl Strategy<Value = RatMatrix> {
        (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-3i64..=3, c), r).prop_map(|rows| {
                RatMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn kernel_is_annihilated_and_rank_nullity_holds(m in arb_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.dim(), m.cols());
            if k.dim() > 0 {
                prop_assert!(m.mul(&k.basis_matrix()).unwrap().is_zero());
            }
        }

        #[test]
        fn canonicalization_is_idempotent(m in arb_matrix()) {
            let cols: Vec<SparseVec> = (0..m.cols()).map(|j| m.column(j)).collect();
            let v = Subspace::from_vectors(Ambient::Plain(m.rows()), cols);
            let once = v.canonicalize();
            prop_assert_eq!(&once, &v);
            prop_assert_eq!(once.canonicalize(), once);
        }
    }
}
