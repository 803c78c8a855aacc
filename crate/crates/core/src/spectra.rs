//! Eigenvalues, the pieces of the spectral decomposition of `S^{p,p+l}`,
//! their multiplicities, merged spectra, and the tabulated special cases.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::{self, factorial, ClosedFormRow, PrimitiveCase, SpaceQuery};
use crate::error::{Error, Result};

/// Index set of a piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceCase {
    S0,
    S1,
    S2,
}

impl PieceCase {
    /// Branch of the `T`-space decomposition the piece comes from.
    pub fn primitive_case(&self) -> PrimitiveCase {
        match self {
            PieceCase::S0 => PrimitiveCase::GradGrad,
            PieceCase::S1 => PrimitiveCase::ContractGrad,
            PieceCase::S2 => PrimitiveCase::ContractContract,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PieceCase::S0 => "S0",
            PieceCase::S1 => "S1",
            PieceCase::S2 => "S2",
        }
    }
}

impl fmt::Display for PieceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `4((p+k)(n-q+k) + p(p-1) + q(q-1) + r(r+1) + s(s+1) + r|p-k| + s|q-l|
///   + (|p-k| + |q-l| + p-k + q-l)/2)` for a traceless core of type `(p,q)`
/// and bidegree `(k,l)` with `k+p = l+q`.
pub fn lambda_lemma34(n: i64, p: i64, q: i64, k: i64, l: i64, r: i64, s: i64) -> Result<i64> {
    if k + p != l + q {
        return Err(Error::usage(format!(
            "eigenvalue formula needs k+p = l+q, got p={p} q={q} k={k} l={l}"
        )));
    }
    let twice = 2 * ((p + k) * (n - q + k) + p * (p - 1) + q * (q - 1) + r * (r + 1) + s * (s + 1))
        + 2 * (r * (p - k).abs() + s * (q - l).abs())
        + ((p - k).abs() + (q - l).abs() + p - k + q - l);
    Ok(2 * twice)
}

/// The eigenvalue of the piece `V^{p,l,m,k}_{r,s,i}`, written directly in the
/// piece indices.
pub fn lambda_thm32(n: i64, p: i64, l: i64, m: i64, k: i64, r: i64, s: i64) -> i64 {
    let a = p - m;
    let twice = 2
        * ((a + k + l) * (n - p + m + k)
            + a * (a - 1)
            + (a + l) * (a + l - 1)
            + r * (r + 1)
            + s * (s + 1)
            + r * (a - k - l).abs()
            + s * (a + l - k).abs())
        + ((a - k - l).abs() + (a + l - k).abs() + 2 * (a - k));
    2 * twice
}

/// Which index set `(m, k)` falls in, for the block `(p, l)`.
pub fn piece_region(p: i64, l: i64, m: i64, k: i64) -> Option<PieceCase> {
    if m < 0 || m > p || k < 0 {
        return None;
    }
    let a = p - m;
    Some(if k < a - l {
        PieceCase::S0
    } else if k < a + l {
        PieceCase::S1
    } else {
        PieceCase::S2
    })
}

/// Ranges `r <= rmax`, `s <= smax` of the index set.
pub fn piece_ranges(p: i64, l: i64, m: i64, k: i64, case: PieceCase) -> (i64, i64) {
    let a = p - m;
    match case {
        PieceCase::S0 => (k + l, k),
        PieceCase::S1 => (a, k),
        PieceCase::S2 => (a, a + l),
    }
}

/// One summand `V^{p,l,m,k}_{r,s,i}` of the decomposition of `S^{p,p+l}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectralPiece {
    pub n: usize,
    pub p: i64,
    pub l: i64,
    pub m: i64,
    pub k: i64,
    pub r: i64,
    pub s: i64,
    pub case: PieceCase,
    pub eigenvalue: i64,
    #[serde(with = "decimal")]
    pub multiplicity: BigUint,
}

impl SpectralPiece {
    /// Ordering key: eigenvalue first, then indices.
    fn key(&self) -> (i64, i64, i64, i64, i64, PieceCase) {
        (self.eigenvalue, self.m, self.k, self.r, self.s, self.case)
    }

    /// Traceless core `T^{p-m, p-m+l}_{k+l, k}` the piece lives in.
    pub fn core(&self) -> SpaceQuery {
        let a = self.p - self.m;
        SpaceQuery::new(self.n, a, a + self.l, self.k + self.l, self.k)
    }
}

/// The primitive space whose dimension is the multiplicity of a piece.
#[allow(clippy::too_many_arguments)]
pub fn piece_source(n: usize, p: i64, l: i64, m: i64, k: i64, r: i64, s: i64, case: PieceCase) -> (SpaceQuery, PrimitiveCase) {
    let a = p - m;
    let (pp, qq, kk, ll) = (a, a + l, k + l, k);
    let q = match case {
        PieceCase::S0 => SpaceQuery::new(n, pp + r, qq + s, kk - r, ll - s),
        PieceCase::S1 => SpaceQuery::new(n, pp - r, qq + s, kk + r, ll - s),
        PieceCase::S2 => SpaceQuery::new(n, pp - r, qq - s, kk + r, ll + s),
    };
    (q, case.primitive_case())
}

pub fn piece_multiplicity(piece: &SpectralPiece) -> Result<BigUint> {
    let (q, case) = piece_source(piece.n, piece.p, piece.l, piece.m, piece.k, piece.r, piece.s, piece.case);
    dims::dim_primitive(&q, case)
}

/// Build a piece with its eigenvalue and multiplicity; `None` outside the
/// index sets.
pub fn make_piece(n: usize, p: i64, l: i64, m: i64, k: i64, r: i64, s: i64) -> Result<Option<SpectralPiece>> {
    let Some(case) = piece_region(p, l, m, k) else {
        return Ok(None);
    };
    let (rmax, smax) = piece_ranges(p, l, m, k, case);
    if r < 0 || s < 0 || r > rmax || s > smax {
        return Ok(None);
    }
    let mut piece = SpectralPiece {
        n,
        p,
        l,
        m,
        k,
        r,
        s,
        case,
        eigenvalue: lambda_thm32(n as i64, p, l, m, k, r, s),
        multiplicity: BigUint::zero(),
    };
    piece.multiplicity = piece_multiplicity(&piece)?;
    Ok(Some(piece))
}

/// Every `(m, k, r, s)` with `k <= k_max`, including zero-dimensional pieces.
pub fn all_pieces(n: usize, p: i64, l: i64, k_max: i64) -> Result<Vec<SpectralPiece>> {
    let mut idx = Vec::new();
    for m in 0..=p {
        for k in 0..=k_max {
            let case = piece_region(p, l, m, k).expect("m <= p");
            let (rmax, smax) = piece_ranges(p, l, m, k, case);
            for r in 0..=rmax {
                for s in 0..=smax {
                    idx.push((m, k, r, s));
                }
            }
        }
    }
    let mut out = idx
        .par_iter()
        .map(|&(m, k, r, s)| make_piece(n, p, l, m, k, r, s).map(|o| o.expect("in range")))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|pc| pc.key());
    Ok(out)
}

/// Lower bound of every eigenvalue at `(m, k)`, increasing in `k`.
fn eigen_floor(n: i64, p: i64, l: i64, m: i64, k: i64) -> i64 {
    let a = p - m;
    4 * (k + a + l) * (k + n - a)
}

/// Pieces with eigenvalue at most `max_eig` and positive multiplicity.
pub fn enumerate_pieces(n: usize, p: i64, l: i64, max_eig: i64) -> Result<Vec<SpectralPiece>> {
    if p < 0 || l < 0 {
        return Err(Error::usage("block indices must be nonnegative"));
    }
    let ni = n as i64;
    let mut idx = Vec::new();
    for m in 0..=p {
        let mut k = 0;
        // The other terms of the eigenvalue are nonnegative, so once the
        // floor passes the bound no larger k can contribute.
        while eigen_floor(ni, p, l, m, k) <= max_eig {
            let case = piece_region(p, l, m, k).expect("m <= p");
            let (rmax, smax) = piece_ranges(p, l, m, k, case);
            for r in 0..=rmax {
                for s in 0..=smax {
                    if lambda_thm32(ni, p, l, m, k, r, s) <= max_eig {
                        idx.push((m, k, r, s));
                    }
                }
            }
            k += 1;
        }
    }
    let pieces = idx
        .par_iter()
        .map(|&(m, k, r, s)| make_piece(n, p, l, m, k, r, s).map(|o| o.expect("in range")))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<_> = pieces.into_iter().filter(|pc| !pc.multiplicity.is_zero()).collect();
    out.sort_by_key(|pc| pc.key());
    Ok(out)
}

/// A printed value that differs from the computed one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Discrepancy {
    pub kind: String,
    pub location: String,
    pub printed: String,
    pub computed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumQuery {
    pub n: usize,
    pub p: i64,
    pub q: i64,
    pub max_eig: i64,
}

/// A piece as listed in a report line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceSummary {
    pub m: i64,
    pub k: i64,
    pub r: i64,
    pub s: i64,
    pub case: PieceCase,
    #[serde(with = "decimal")]
    pub dim: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub eigenvalue: i64,
    #[serde(with = "decimal")]
    pub multiplicity: BigUint,
    pub pieces: Vec<PieceSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub query: SpectrumQuery,
    pub lines: Vec<SpectrumLine>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Closed-form anomalies met while computing the multiplicity of a piece.
fn piece_discrepancies(pc: &SpectralPiece) -> Vec<Discrepancy> {
    let (q, case) = piece_source(pc.n, pc.p, pc.l, pc.m, pc.k, pc.r, pc.s, pc.case);
    let reflected = case.reflect(&q);
    let location = format!("piece m={} k={} r={} s={} {} -> dim of {} primitive space at {}", pc.m, pc.k, pc.r, pc.s, pc.case, case, q);
    let mut out = Vec::new();
    match ClosedFormRow::classify(&reflected) {
        Some(row) if row.has_half_misprint() => {
            let printed = dims::table1_printed(&reflected).unwrap_or_else(BigRational::zero);
            if printed != BigRational::from_integer(BigInt::from(pc.multiplicity.clone())) {
                out.push(Discrepancy {
                    kind: format!("table-I-row-{}-half-factor", row.number()),
                    location,
                    printed: printed.to_string(),
                    computed: pc.multiplicity.to_string(),
                });
            }
        }
        _ if dims::is_degenerate_line_case(&reflected) => {
            out.push(Discrepancy {
                kind: "closed-form-negative-at-n1".into(),
                location,
                printed: dims::dim_primitive_from_t(&reflected).to_string(),
                computed: pc.multiplicity.to_string(),
            });
        }
        _ => {}
    }
    out
}

/// Merge pieces of equal eigenvalue; the result does not depend on the order
/// of `pieces`.
pub fn build_spectrum(query: SpectrumQuery, pieces: &[SpectralPiece]) -> SpectrumReport {
    let mut sorted = pieces.to_vec();
    sorted.sort_by_key(|pc| pc.key());
    let mut lines: Vec<SpectrumLine> = Vec::new();
    let mut discrepancies = BTreeSet::new();
    for pc in &sorted {
        discrepancies.extend(piece_discrepancies(pc));
        let summary = PieceSummary {
            m: pc.m,
            k: pc.k,
            r: pc.r,
            s: pc.s,
            case: pc.case,
            dim: pc.multiplicity.clone(),
        };
        match lines.last_mut() {
            Some(line) if line.eigenvalue == pc.eigenvalue => {
                line.multiplicity += &pc.multiplicity;
                line.pieces.push(summary);
            }
            _ => lines.push(SpectrumLine {
                eigenvalue: pc.eigenvalue,
                multiplicity: pc.multiplicity.clone(),
                pieces: vec![summary],
            }),
        }
    }
    SpectrumReport {
        query,
        lines,
        discrepancies: discrepancies.into_iter().collect(),
    }
}

/// Spectrum on `S^{p,q}` up to `max_eig`. For `p > q` the conjugate block
/// `(q, p)` is computed; eigenvalues and multiplicities agree.
pub fn spectrum(n: usize, p: i64, q: i64, max_eig: i64) -> Result<SpectrumReport> {
    if n == 0 {
        return Err(Error::usage("n must be at least 1"));
    }
    if p < 0 || q < 0 || max_eig < 0 {
        return Err(Error::usage("p, q and max-eig must be nonnegative"));
    }
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    let pieces = enumerate_pieces(n, lo, hi - lo, max_eig)?;
    Ok(build_spectrum(SpectrumQuery { n, p, q, max_eig }, &pieces))
}

/// Pieces retained in the low-dimensional statements: the `n = 2` lists by
/// their `(r, s)` patterns, and the `n = 1` list with its companion pieces.
/// Returns `(m, k, r, s, case)` with `k <= k_max`.
pub fn theorem_piece_list(n: usize, p: i64, l: i64, k_max: i64) -> BTreeSet<(i64, i64, i64, i64, PieceCase)> {
    let mut out = BTreeSet::new();
    let mut push = |m: i64, k: i64, r: i64, s: i64, case: PieceCase| {
        let (rmax, smax) = piece_ranges(p, l, m, k, case);
        if piece_region(p, l, m, k) == Some(case) && (0..=rmax).contains(&r) && (0..=smax).contains(&s) {
            out.insert((m, k, r, s, case));
        }
    };
    for m in 0..=p {
        let a = p - m;
        for k in 0..=k_max {
            let Some(case) = piece_region(p, l, m, k) else { continue };
            let (rmax, smax) = piece_ranges(p, l, m, k, case);
            match (n, case) {
                (2, PieceCase::S0) => {
                    for r in 0..=k {
                        push(m, k, k + l, r, case);
                    }
                    for r in 0..=k + l {
                        push(m, k, r, k, case);
                    }
                }
                (2, PieceCase::S1) => {
                    for r in 0..=k {
                        push(m, k, a, r, case);
                    }
                    for r in 0..=a {
                        push(m, k, r, k, case);
                    }
                }
                (2, PieceCase::S2) => {
                    for r in 0..=a + l {
                        push(m, k, a, r, case);
                    }
                    for r in 0..=a {
                        push(m, k, r, a + l, case);
                    }
                }
                (1, PieceCase::S0) => {
                    push(m, k, k + l - 1, k - 1, case);
                    push(m, k, k + l, k, case);
                }
                (1, PieceCase::S1) => {
                    push(m, k, a - 1, k - 1, case);
                    push(m, k, a, k, case);
                }
                (1, PieceCase::S2) => {
                    push(m, k, a - 1, a + l - 1, case);
                    push(m, k, a, a + l, case);
                }
                _ => {
                    for r in 0..=rmax {
                        for s in 0..=smax {
                            push(m, k, r, s, case);
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Tabulated special cases

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableName {
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl TableName {
    pub const ALL: [TableName; 7] = [
        TableName::II,
        TableName::III,
        TableName::IV,
        TableName::V,
        TableName::VI,
        TableName::VII,
        TableName::VIII,
    ];

    pub fn parse(s: &str) -> Option<TableName> {
        TableName::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TableName::II => "II",
            TableName::III => "III",
            TableName::IV => "IV",
            TableName::V => "V",
            TableName::VI => "VI",
            TableName::VII => "VII",
            TableName::VIII => "VIII",
        }
    }

    /// Tables tabulated for `P^2` only.
    pub fn fixed_n(&self) -> Option<usize> {
        matches!(self, TableName::VI | TableName::VII | TableName::VIII).then_some(2)
    }
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rendered row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub block: String,
    /// Row number within its block, counting from 1.
    pub row: usize,
    /// Table parameter (`k` or `m`); `None` for rows without one.
    pub index: Option<i64>,
    pub eigenspace: String,
    pub eigenvalue: i64,
    pub printed_eigenvalue: i64,
    #[serde(with = "decimal")]
    pub dimension: BigUint,
    pub printed_dimension: String,
    pub pieces: Vec<PieceSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedTable {
    pub name: TableName,
    pub n: usize,
    pub index_max: i64,
    pub rows: Vec<TableRow>,
    pub discrepancies: Vec<Discrepancy>,
}

type EigFn = fn(i64, i64) -> i64;
type DimFn = fn(i64, i64) -> BigRational;
type LabelFn = fn(i64, bool) -> String;

/// A tabulated row: its printed eigenvalue and dimension as functions of
/// `(n, index)` and the pieces `(m, k, r, s)` realising it.
struct RowSpec {
    parametric: bool,
    label: LabelFn,
    eig: EigFn,
    dim: DimFn,
    pieces: fn(i64) -> Vec<(i64, i64, i64, i64)>,
}

fn fi(x: i64) -> BigInt {
    BigInt::from(factorial(x.max(0) as u64))
}

fn frac(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Scalar harmonic dimension `n(n+2k)((n+k-1)!)^2 / ((n!)^2 (k!)^2)`.
fn scalar_dim(n: i64, k: i64) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    frac(b(n * (n + 2 * k)) * fi(n + k - 1).pow(2), fi(n).pow(2) * fi(k).pow(2))
}

fn bar(conj: bool) -> (&'static str, &'static str, &'static str, &'static str) {
    // (gradient, contraction, its kernel partner gradient, partner contraction)
    if conj {
        ("grad", "i_W", "gradb", "i_Wb")
    } else {
        ("gradb", "i_Wb", "grad", "i_W")
    }
}

fn t_label(p: i64, q: i64, k: i64, l: i64, conj: bool) -> String {
    if conj {
        format!("T^{{{},{}}}_{{{},{}}}", q, p, l, k)
    } else {
        format!("T^{{{},{}}}_{{{},{}}}", p, q, k, l)
    }
}

fn rows_scalar() -> Vec<RowSpec> {
    vec![RowSpec {
        parametric: true,
        label: |j, _| format!("phi(T^{{0,0}}_{{{j},{j}}})"),
        eig: |n, j| 4 * j * (n + j),
        dim: scalar_dim,
        pieces: |j| vec![(0, j, 0, 0)],
    }]
}

fn rows_one_forms(printed_row2_shift: i64) -> Vec<RowSpec> {
    let row2_eig: EigFn = if printed_row2_shift == 1 {
        |n, j| 4 * (j + 1) * (n + j + 2)
    } else {
        |n, j| 4 * (j + 2) * (n + j + 2)
    };
    vec![
        RowSpec {
            parametric: false,
            label: |_, c| format!("phi({})", t_label(0, 1, 1, 0, c)),
            eig: |n, _| 4 * (n + 1),
            dim: |n, _| BigRational::from_integer(b(n * (n + 2))),
            pieces: |_| vec![(0, 0, 0, 0)],
        },
        RowSpec {
            parametric: true,
            label: |j, c| format!("phi o {}({})", bar(c).0, t_label(0, 0, j + 2, j + 2, c)),
            eig: row2_eig,
            dim: |n, j| frac(b(n * (n + 2 * j + 4)) * fi(n + j + 1).pow(2), fi(n).pow(2) * fi(j + 2).pow(2)),
            pieces: |j| vec![(0, j + 1, 0, 1)],
        },
        RowSpec {
            parametric: true,
            label: |j, c| format!("phi({} cap ker {})", t_label(0, 1, j + 2, j + 1, c), bar(c).1),
            eig: |n, j| 4 * (j + 2) * (n + j + 1),
            dim: |n, j| {
                frac(
                    b((j + 1) * n * (n - 1) * (n + j + 2) * (n + 2 * j + 3)) * fi(n + j).pow(2),
                    fi(n).pow(2) * fi(j + 2).pow(2),
                )
            },
            pieces: |j| vec![(0, j + 1, 0, 0)],
        },
    ]
}

fn rows_two_tensors(n2: bool) -> Vec<RowSpec> {
    vec![
        RowSpec {
            parametric: false,
            label: |_, c| format!("phi({} cap ker {})", t_label(0, 2, 2, 0, c), bar(c).0),
            eig: |n, _| 8 * (n + 2),
            dim: |n, _| frac(b(n * (n + 4) * (n + 1) * (n + 1)), b(4)),
            pieces: |_| vec![(0, 0, 0, 0)],
        },
        RowSpec {
            parametric: false,
            label: |_, c| format!("phi o {}({} cap ker {})", bar(c).1, t_label(0, 3, 3, 0, c), bar(c).0),
            eig: |n, _| 12 * (n + 3),
            dim: |n, _| frac(b(n * (n + 1).pow(2) * (n + 2).pow(2) * (n + 6)), b(36)),
            pieces: |_| vec![(0, 1, 0, 1)],
        },
        RowSpec {
            parametric: true,
            label: |j, c| format!("phi o {}^2({})", bar(c).0, t_label(0, 0, j + 4, j + 4, c)),
            eig: |n, j| 4 * (j + 4) * (n + j + 4),
            dim: |n, j| frac(fi(n + j + 3).pow(2) * b(n * (n + 2 * j + 8)), fi(n).pow(2) * fi(j + 4).pow(2)),
            pieces: |j| vec![(0, j + 2, 0, 2)],
        },
        RowSpec {
            parametric: false,
            label: |_, c| format!("phi({} cap ker {})", t_label(0, 2, 3, 1, c), bar(c).0),
            eig: |n, _| 12 * (n + 2),
            dim: |n, _| frac(b(n * (n + 1).pow(2) * (n - 1) * (n + 2) * (n + 5)), b(9)),
            pieces: |_| vec![(0, 1, 0, 0)],
        },
        RowSpec {
            parametric: true,
            label: |j, c| format!("phi o {}({} cap ker {})", bar(c).0, t_label(0, 1, j + 4, j + 3, c), bar(c).1),
            eig: |n, j| 4 * (j + 4) * (n + j + 3),
            dim: if n2 {
                |_, m| frac(b((m + 3) * (m + 6) * (2 * m + 9)), b(2))
            } else {
                |n, j| {
                    frac(
                        fi(n + j + 2).pow(2) * b(n * (n - 1) * (j + 3) * (n + j + 4) * (n + 2 * j + 7)),
                        fi(n).pow(2) * fi(j + 4).pow(2),
                    )
                }
            },
            pieces: |j| vec![(0, j + 2, 0, 1)],
        },
        RowSpec {
            parametric: true,
            label: |j, c| format!("phi({} cap ker {})", t_label(0, 2, j + 4, j + 2, c), bar(c).1),
            eig: |n, j| 4 * (j * j + (n + 6) * j + 4 * n + 10),
            dim: if n2 {
                |_, m| BigRational::from_integer(b((m + 1) * (m + 7) * (m + 4)))
            } else {
                |n, j| {
                    frac(
                        fi(n + j + 2) * fi(n + j + 1) * b(n * n * (n - 1) * (j + 1) * (n + j + 5) * (n + 2 * j + 6)),
                        b(2) * fi(n).pow(2) * fi(j + 4) * fi(j + 3),
                    )
                }
            },
            pieces: |j| vec![(0, j + 2, 0, 0)],
        },
    ]
}

fn rows_mixed(n2: bool) -> Vec<RowSpec> {
    let mut rows = vec![
        RowSpec {
            parametric: false,
            label: |_, _| "phi(T^{1,1}_{0,0})".into(),
            eig: |n, _| 4 * (n + 1),
            dim: |n, _| BigRational::from_integer(b(n * (n + 2))),
            pieces: |_| vec![(0, 0, 0, 0)],
        },
        RowSpec {
            parametric: true,
            label: |j, _| format!("phi o grad o gradb(T^{{0,0}}_{{{},{}}})", j + 2, j + 2),
            eig: |n, j| 4 * (j + 2) * (n + j + 2),
            dim: |n, j| frac(fi(n + j + 1).pow(2) * b(n * (n + 2 * j + 4)), fi(n).pow(2) * fi(j + 2).pow(2)),
            pieces: |j| vec![(0, j + 1, 1, 1)],
        },
        RowSpec {
            parametric: true,
            label: |j, _| format!("phi(g . T^{{0,0}}_{{{j},{j}}})"),
            eig: |n, j| 4 * j * (n + j),
            dim: scalar_dim,
            pieces: |j| vec![(1, j, 0, 0)],
        },
        RowSpec {
            parametric: true,
            label: |j, _| {
                format!(
                    "phi o gradb(T^{{1,0}}_{{{},{}}} cap ker i_W) + phi o grad(T^{{0,1}}_{{{},{}}} cap ker i_Wb)",
                    j + 1,
                    j + 2,
                    j + 2,
                    j + 1
                )
            },
            eig: |n, j| 4 * (j + 2) * (n + j + 1),
            dim: if n2 {
                |_, m| BigRational::from_integer(b((m + 1) * (m + 3) * (2 * m + 5)))
            } else {
                |n, j| {
                    frac(
                        b(2) * fi(n + j).pow(2) * b(n * (n - 1) * (j + 1) * (n + j + 1) * (n + 2 * j + 3)),
                        fi(n).pow(2) * fi(j + 2).pow(2),
                    )
                }
            },
            pieces: |j| vec![(0, j + 1, 0, 1), (0, j + 1, 1, 0)],
        },
    ];
    if !n2 {
        rows.push(RowSpec {
            parametric: true,
            label: |j, _| format!("phi(T^{{1,1}}_{{{},{}}} cap ker i_W cap ker i_Wb)", j + 1, j + 1),
            eig: |n, j| 4 * (j + 2) * (n + j),
            dim: |n, j| {
                frac(
                    fi(n + j - 1).pow(2) * b(n * n * (n - 2) * (j + 1).pow(2) * (n + j + 1).pow(2) * (n + 2 * j + 2)),
                    fi(n).pow(2) * fi(j + 2).pow(2),
                )
            },
            pieces: |j| vec![(0, j + 1, 0, 0)],
        });
    }
    if n2 {
        // Tabulated for P^2 with the constant rows written out.
        rows[0].eig = |_, _| 12;
        rows[0].dim = |_, _| BigRational::from_integer(b(8));
        rows[1].dim = |_, m| BigRational::from_integer(b((m + 3).pow(3)));
        rows[2].dim = |_, m| BigRational::from_integer(b((m + 1).pow(3)));
    }
    rows
}

fn two_tensor_constants_n2(rows: &mut [RowSpec]) {
    rows[0].eig = |_, _| 32;
    rows[0].dim = |_, _| BigRational::from_integer(b(27));
    rows[1].eig = |_, _| 60;
    rows[1].dim = |_, _| BigRational::from_integer(b(64));
    rows[2].dim = |_, m| BigRational::from_integer(b((m + 5).pow(3)));
    rows[3].eig = |_, _| 48;
    rows[3].dim = |_, _| BigRational::from_integer(b(56));
}

/// `(block label, p, l, conjugate, rows)` for each block of a table.
fn table_blocks(name: TableName) -> Vec<(&'static str, i64, i64, bool, Vec<RowSpec>)> {
    match name {
        TableName::II => vec![
            ("C^inf", 0, 0, false, rows_scalar()),
            ("S^{0,1}", 0, 1, false, rows_one_forms(1)),
            ("S^{1,0}", 0, 1, true, rows_one_forms(2)),
        ],
        TableName::III => vec![("S^{0,2}", 0, 2, false, rows_two_tensors(false))],
        TableName::IV => vec![("S^{2,0}", 0, 2, true, rows_two_tensors(false))],
        TableName::V => vec![("S^{1,1}", 1, 0, false, rows_mixed(false))],
        TableName::VI | TableName::VII => {
            let mut rows = rows_two_tensors(true);
            two_tensor_constants_n2(&mut rows);
            let (label, conj) = if name == TableName::VI {
                ("S^{0,2}", false)
            } else {
                ("S^{2,0}", true)
            };
            vec![(label, 0, 2, conj, rows)]
        }
        TableName::VIII => vec![("S^{1,1}", 1, 0, false, rows_mixed(true))],
    }
}

/// Rows of a table for indices `0..=index_max`, with computed eigenvalues and
/// dimensions next to the printed ones.
pub fn render_named_table(name: TableName, n: usize, index_max: i64) -> Result<NamedTable> {
    if n == 0 {
        return Err(Error::usage("n must be at least 1"));
    }
    if let Some(fixed) = name.fixed_n() {
        if n != fixed {
            return Err(Error::usage(format!("table {} is tabulated for n = {} only", name, fixed)));
        }
    }
    if index_max < 0 {
        return Err(Error::usage("index-max must be nonnegative"));
    }
    let ni = n as i64;
    let mut rows = Vec::new();
    let mut discrepancies = Vec::new();
    for (block, p, l, conj, specs) in table_blocks(name) {
        for (row_no, layout) in specs.iter().enumerate() {
            let indices: Vec<Option<i64>> = if layout.parametric {
                (0..=index_max).map(Some).collect()
            } else {
                vec![None]
            };
            for idx in indices {
                let j = idx.unwrap_or(0);
                let mut pieces = Vec::new();
                for (m, k, r, s) in (layout.pieces)(j) {
                    let pc = make_piece(n, p, l, m, k, r, s)?
                        .ok_or_else(|| Error::usage(format!("row {} of table {} names an invalid piece", row_no + 1, name)))?;
                    pieces.push(pc);
                }
                let eigenvalue = pieces[0].eigenvalue;
                if pieces.iter().any(|pc| pc.eigenvalue != eigenvalue) {
                    return Err(Error::Verification {
                        what: format!("row {} of table {}: summands with different eigenvalues", row_no + 1, name),
                        left: pieces[0].eigenvalue.to_string(),
                        right: pieces.iter().map(|pc| pc.eigenvalue.to_string()).collect::<Vec<_>>().join(","),
                    });
                }
                let dimension: BigUint = pieces.iter().map(|pc| pc.multiplicity.clone()).sum();
                let printed_eigenvalue = (layout.eig)(ni, j);
                let printed_dim = (layout.dim)(ni, j);
                let location = match idx {
                    Some(j) => format!("table {} {} row {} index {}", name, block, row_no + 1, j),
                    None => format!("table {} {} row {}", name, block, row_no + 1),
                };
                if printed_eigenvalue != eigenvalue {
                    discrepancies.push(Discrepancy {
                        kind: "eigenvalue".into(),
                        location: location.clone(),
                        printed: printed_eigenvalue.to_string(),
                        computed: eigenvalue.to_string(),
                    });
                }
                if printed_dim != BigRational::from_integer(BigInt::from(dimension.clone())) {
                    discrepancies.push(Discrepancy {
                        kind: "dimension".into(),
                        location: location.clone(),
                        printed: printed_dim.to_string(),
                        computed: dimension.to_string(),
                    });
                }
                rows.push(TableRow {
                    block: block.to_string(),
                    row: row_no + 1,
                    index: idx,
                    eigenspace: (layout.label)(j, conj),
                    eigenvalue,
                    printed_eigenvalue,
                    dimension,
                    printed_dimension: printed_dim.to_string(),
                    pieces: pieces
                        .iter()
                        .map(|pc| PieceSummary {
                            m: pc.m,
                            k: pc.k,
                            r: pc.r,
                            s: pc.s,
                            case: pc.case,
                            dim: pc.multiplicity.clone(),
                        })
                        .collect(),
                });
            }
        }
    }
    Ok(NamedTable {
        name,
        n,
        index_max,
        rows,
        discrepancies,
    })
}

/// Serialize big integers as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
