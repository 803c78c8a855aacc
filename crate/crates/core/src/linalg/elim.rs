//! Fraction-free row reduction on sparse integer rows.
//!
//! Rows are combined as `a*row - b*pivot` with `a, b` the cofactors of the
//! gcd of the two leading entries, then divided by their content. Entries
//! stay integral throughout, and row contents are kept primitive, which keeps
//! growth small on the structured operator matrices this crate produces.
//!
//! The reduction first runs on `i128` with overflow checks and restarts on
//! big integers only if an intermediate value does not fit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Sparse row: `(column, value)` pairs with strictly increasing columns and
/// no zero values.
pub type IntRow = Vec<(usize, BigInt)>;

trait Scalar: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn is_one(&self) -> bool;
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        i128::try_from(b).ok()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

type Row<T> = Vec<(usize, T)>;

/// Divide by the content and make the leading entry positive.
fn normalize<T: Scalar>(row: &mut Row<T>) -> Option<()> {
    let Some(first) = row.first() else {
        return Some(());
    };
    let mut g = first.1.gcd(&first.1);
    for (_, v) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    let flip = row[0].1.is_negative();
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
    if flip {
        for (_, v) in row.iter_mut() {
            *v = v.neg()?;
        }
    }
    Some(())
}

/// `row <- a*row - b*pivot` eliminating column `col`, where `pivot[col] != 0`.
fn eliminate<T: Scalar>(row: &Row<T>, pivot: &Row<T>, col: usize) -> Option<Row<T>> {
    let rv = &row.iter().find(|(c, _)| *c == col)?.1;
    let pv = &pivot.iter().find(|(c, _)| *c == col)?.1;
    let g = rv.gcd(pv);
    let a = pv.div_exact(&g);
    let b = rv.div_exact(&g);
    let mut out: Row<T> = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = pivot.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ci < cj {
            out.push((ci, row[i].1.mul(&a)?));
            i += 1;
        } else if cj < ci {
            out.push((cj, T::zero().sub(&pivot[j].1.mul(&b)?)?));
            j += 1;
        } else {
            let v = row[i].1.mul(&a)?.sub(&pivot[j].1.mul(&b)?)?;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    normalize(&mut out)?;
    Some(out)
}

/// Row echelon form keyed by pivot column.
struct Echelon<T> {
    pivots: BTreeMap<usize, Row<T>>,
}

impl<T: Scalar> Echelon<T> {
    fn new() -> Self {
        Echelon {
            pivots: BTreeMap::new(),
        }
    }

    /// Reduce leading entries against existing pivots; insert if something is
    /// left. `None` on arithmetic overflow.
    fn insert(&mut self, mut row: Row<T>) -> Option<bool> {
        normalize(&mut row)?;
        loop {
            let Some(&(lead, _)) = row.first() else {
                return Some(false);
            };
            match self.pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p, lead)?,
                None => {
                    self.pivots.insert(lead, row);
                    return Some(true);
                }
            }
        }
    }

    /// Clear every entry that sits in another row's pivot column.
    fn back_substitute(&mut self) -> Option<()> {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for &pc in &cols {
            let pivot_row = self.pivots[&pc].clone();
            let earlier: Vec<usize> = self.pivots.range(..pc).map(|(c, _)| *c).collect();
            for c in earlier {
                let row = &self.pivots[&c];
                if row.iter().any(|(col, _)| *col == pc) {
                    let reduced = eliminate(row, &pivot_row, pc)?;
                    self.pivots.insert(c, reduced);
                }
            }
        }
        Some(())
    }
}

fn convert<T: Scalar>(rows: &[IntRow]) -> Option<Vec<Row<T>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|(c, v)| T::from_big(v).map(|x| (*c, x)))
                .collect::<Option<Row<T>>>()
        })
        .collect()
}

fn rank_with<T: Scalar>(rows: &[IntRow]) -> Option<usize> {
    let mut ech = Echelon::<T>::new();
    for r in convert::<T>(rows)? {
        ech.insert(r)?;
    }
    Some(ech.pivots.len())
}

/// Exact rank of the integer matrix with the given rows.
pub fn rank(rows: &[IntRow]) -> usize {
    rank_with::<i128>(rows).unwrap_or_else(|| rank_with::<BigInt>(rows).expect("bigint never overflows"))
}

/// Reduced row echelon form over the rationals: `(pivot column, row)` pairs
/// with the pivot entry equal to 1, sorted by pivot column.
pub fn rref(rows: &[IntRow]) -> Vec<(usize, Vec<(usize, BigRational)>)> {
    fn with<T: Scalar>(rows: &[IntRow]) -> Option<Vec<(usize, Vec<(usize, BigRational)>)>> {
        let mut ech = Echelon::<T>::new();
        for r in convert::<T>(rows)? {
            ech.insert(r)?;
        }
        ech.back_substitute()?;
        Some(
            ech.pivots
                .into_iter()
                .map(|(pc, row)| {
                    let lead = row[0].1.to_big();
                    let out = row
                        .iter()
                        .map(|(c, v)| (*c, BigRational::new(v.to_big(), lead.clone())))
                        .collect();
                    (pc, out)
                })
                .collect(),
        )
    }
    with::<i128>(rows).unwrap_or_else(|| with::<BigInt>(rows).expect("bigint never overflows"))
}

/// Basis of the null space of the `ncols`-column matrix with the given rows.
/// One vector per free column `f`, with a 1 in position `f` and zeros in the
/// other free columns; each vector is returned as a sparse rational row.
pub fn kernel(rows: &[IntRow], ncols: usize) -> Vec<Vec<(usize, BigRational)>> {
    let reduced = rref(rows);
    let mut is_pivot = vec![false; ncols];
    for (pc, _) in &reduced {
        is_pivot[*pc] = true;
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v: Vec<(usize, BigRational)> = Vec::new();
        for (pc, row) in &reduced {
            if let Some((_, val)) = row.iter().find(|(c, _)| *c == f) {
                v.push((*pc, -val.clone()));
            }
        }
        v.push((f, BigRational::one()));
        v.sort_by_key(|e| e.0);
        out.push(v);
    }
    out
}

/// Convert a rational row to a primitive integer row spanning the same line.
pub fn integer_row(row: &[(usize, BigRational)]) -> IntRow {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    row.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(entries: &[(usize, i64)]) -> IntRow {
        entries.iter().map(|(c, v)| (*c, BigInt::from(*v))).collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[r(&[(0, 1)]), r(&[(1, 1)])]), 2);
        assert_eq!(rank(&[r(&[(0, 2), (1, 4)]), r(&[(0, 1), (1, 2)])]), 1);
        assert_eq!(
            rank(&[r(&[(0, 1), (1, 2), (2, 3)]), r(&[(0, 4), (1, 5), (2, 6)]), r(&[(0, 7), (1, 8), (2, 9)])]),
            2
        );
    }

    #[test]
    fn kernel_of_rank_one_row() {
        // x0 + x3 = 0 in four unknowns
        let k = kernel(&[r(&[(0, 1), (3, 1)])], 4);
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn bigint_fallback_agrees() {
        let big = BigInt::from(i128::MAX) * BigInt::from(3);
        let rows = vec![
            vec![(0, big.clone()), (1, BigInt::from(1))],
            vec![(0, BigInt::from(1)), (1, big.clone())],
        ];
        assert_eq!(rank(&rows), 2);
        let dependent = vec![
            vec![(0, big.clone()), (1, big.clone() * 2)],
            vec![(0, BigInt::from(1)), (1, BigInt::from(2))],
        ];
        assert_eq!(rank(&dependent), 1);
    }
}
