//! Brute-force verification: eigen-equations through the pushforward
//! Laplacian, dimension cross-checks against kernel computations, commutator
//! identities on full monomial bases, and decomposition audits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dims::{self, ClosedFormRow, PrimitiveCase, SpaceQuery};
use crate::error::{Error, Result};
use crate::linalg::{MonomialBasis, Subspace};
use crate::polyring::BiPoly;
use crate::spaces::{self, OperatorPair, TPiece};
use crate::spectra::{self, PieceCase, TableName};
use crate::tensorops::{pushforward_laplacian, OperatorTag, TensorPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    PaperDiscrepancy,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PaperDiscrepancy => "paper-discrepancy",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub id: String,
    pub status: Status,
    pub witness: BTreeMap<String, String>,
}

impl CheckEntry {
    fn new(id: impl Into<String>, status: Status) -> Self {
        CheckEntry {
            id: id.into(),
            status,
            witness: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.witness.insert(key.to_string(), value.to_string());
        self
    }

    fn pass_if(id: impl Into<String>, ok: bool) -> Self {
        CheckEntry::new(id, if ok { Status::Pass } else { Status::Fail })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Small,
    Full,
}

impl Grid {
    pub fn parse(s: &str) -> Option<Grid> {
        match s {
            "small" => Some(Grid::Small),
            "full" => Some(Grid::Full),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Grid::Small => "small",
            Grid::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eigen,
    Dims,
    Commutators,
    Decomposition,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "eigen" => Some(Suite::Eigen),
            "dims" => Some(Suite::Dims),
            "commutators" => Some(Suite::Commutators),
            "decomposition" => Some(Suite::Decomposition),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Eigen => "eigen",
            Suite::Dims => "dims",
            Suite::Commutators => "commutators",
            Suite::Decomposition => "decomposition",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub grid: String,
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new(suite: &str, grid: &str, entries: Vec<CheckEntry>) -> Self {
        let mut r = VerificationReport {
            suite: suite.to_string(),
            grid: grid.to_string(),
            entries: Vec::new(),
        };
        r.merge(entries);
        r
    }

    /// Add entries, keeping the list sorted by id; a later entry with an
    /// existing id replaces the earlier one.
    pub fn merge(&mut self, entries: Vec<CheckEntry>) {
        let mut by_id: BTreeMap<String, CheckEntry> =
            self.entries.drain(..).map(|e| (e.id.clone(), e)).collect();
        for e in entries {
            by_id.insert(e.id.clone(), e);
        }
        self.entries = by_id.into_values().collect();
    }

    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    /// 1 when any check failed, else 0.
    pub fn exit_status(&self) -> i32 {
        if self.count(Status::Fail) > 0 {
            1
        } else {
            0
        }
    }
}

fn qid(q: &SpaceQuery) -> String {
    format!("n{}/p{}q{}k{}l{}", q.n, q.p, q.q, q.k, q.l)
}

fn indices(e: CheckEntry, q: &SpaceQuery) -> CheckEntry {
    e.with("indices", q)
}

fn monomial_tensors(q: &SpaceQuery) -> Result<Vec<TensorPoly>> {
    let Some(md) = q.multidegree() else {
        return Ok(Vec::new());
    };
    let mb = MonomialBasis::new(q.n, md)?;
    mb.monomials()
        .iter()
        .map(|m| TensorPoly::from_poly(BiPoly::monomial(q.n, m.clone(), BigRational::one())))
        .collect()
}

fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `Some(c)` when `f(t) = c t` for every basis tensor, with `c` common.
/// `Err(witness)` when some image is not proportional or factors differ.
fn common_eigenvalue(space: &Subspace) -> Result<std::result::Result<Option<BigRational>, String>> {
    let tensors = space.tensors()?;
    let results = tensors
        .par_iter()
        .map(|t| pushforward_laplacian(t).map(|lt| (t, t.proportionality(&lt))))
        .collect::<Result<Vec<_>>>()?;
    let mut factor: Option<BigRational> = None;
    for (t, c) in results {
        match (c, &factor) {
            (None, _) => return Ok(Err(format!("not an eigentensor: {}", t))),
            (Some(c), None) => factor = Some(c),
            (Some(c), Some(f)) if &c != f => {
                return Ok(Err(format!("factor {} differs from {} at {}", c, f, t)));
            }
            _ => {}
        }
    }
    Ok(Ok(factor))
}

// ---------------------------------------------------------------------------
// eigen

fn core_and_case(n: usize, p: i64, l: i64, k: i64) -> Result<(SpaceQuery, PieceCase)> {
    let case = spectra::piece_region(p, l, 0, k).ok_or_else(|| Error::usage("piece indices out of range"))?;
    Ok((SpaceQuery::new(n, p, p + l, k + l, k), case))
}

fn eigen_entry(n: usize, p: i64, l: i64, k: i64, piece: &TPiece) -> Result<CheckEntry> {
    let expected = spectra::lambda_thm32(n as i64, p, l, 0, k, piece.r, piece.s);
    let id = format!("eigen/n{}/p{}l{}/k{}/r{}s{}", n, p, l, k, piece.r, piece.s);
    let entry = match common_eigenvalue(&piece.space)? {
        Err(w) => CheckEntry::new(id, Status::Fail).with("tensor", w),
        Ok(None) => CheckEntry::new(id, Status::Pass).with("dim", 0),
        Ok(Some(c)) => CheckEntry::pass_if(id, c == rational(expected))
            .with("dim", piece.space.dim())
            .with("realized", &c),
    };
    Ok(entry.with("expected", expected).with("source", piece.source))
}

/// Build the piece `V^{p,l,0,k}_{r,s}` inside its traceless core, apply the
/// pushforward Laplacian to every basis vector, and compare the common factor
/// with the closed-form eigenvalue.
pub fn verify_eigen_piece(n: usize, p: i64, l: i64, k: i64, r: i64, s: i64) -> Result<CheckEntry> {
    let (core, case) = core_and_case(n, p, l, k)?;
    let pieces = spaces::decompose_t_with_case(&core, case.primitive_case())?;
    let piece = pieces
        .iter()
        .find(|pc| pc.r == r && pc.s == s)
        .ok_or_else(|| Error::usage(format!("no piece r={r} s={s} at {core}")))?;
    eigen_entry(n, p, l, k, piece)
}

/// Every `(r, s)` piece of the traceless core at `(p, l, k)`.
pub fn verify_eigen_core(n: usize, p: i64, l: i64, k: i64) -> Result<Vec<CheckEntry>> {
    let (core, case) = core_and_case(n, p, l, k)?;
    let pieces = spaces::decompose_t_with_case(&core, case.primitive_case())?;
    pieces.iter().map(|pc| eigen_entry(n, p, l, k, pc)).collect()
}

/// Realize the eigenvalue of every traceless row of a table by operator
/// application and compare it with the printed one.
pub fn verify_table_eigen(name: TableName, n: usize, index_max: i64) -> Result<Vec<CheckEntry>> {
    let table = spectra::render_named_table(name, n, index_max)?;
    let (p, l) = match name {
        TableName::II => (None, None),
        TableName::III | TableName::IV | TableName::VI | TableName::VII => (Some(0), Some(2)),
        TableName::V | TableName::VIII => (Some(1), Some(0)),
    };
    let mut jobs = Vec::new();
    for row in &table.rows {
        if row.pieces.iter().any(|pc| pc.m != 0) {
            continue;
        }
        let (bp, bl) = match row.block.as_str() {
            "C^inf" => (0, 0),
            "S^{0,1}" | "S^{1,0}" => (0, 1),
            _ => (p.expect("block"), l.expect("block")),
        };
        jobs.push((row.clone(), bp, bl));
    }
    let mut cache: HashMap<(i64, i64, i64), Vec<TPiece>> = HashMap::new();
    let mut out = Vec::new();
    for (row, bp, bl) in jobs {
        let mut realized = Vec::new();
        let mut failure = None;
        for pc in &row.pieces {
            let pieces = match cache.entry((bp, bl, pc.k)) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => {
                    let (core, case) = core_and_case(n, bp, bl, pc.k)?;
                    e.insert(spaces::decompose_t_with_case(&core, case.primitive_case())?)
                }
            };
            let piece = pieces
                .iter()
                .find(|t| t.r == pc.r && t.s == pc.s)
                .expect("table pieces lie in range");
            match common_eigenvalue(&piece.space)? {
                Err(w) => failure = Some(w),
                Ok(Some(c)) => realized.push(c),
                Ok(None) => {}
            }
        }
        let id = match row.index {
            Some(j) => format!("eigen/table{}/n{}/{}/row{}/i{}", name, n, row.block, row.row, j),
            None => format!("eigen/table{}/n{}/{}/row{}", name, n, row.block, row.row),
        };
        let computed = rational(row.eigenvalue);
        let printed = rational(row.printed_eigenvalue);
        let entry = if let Some(w) = failure {
            CheckEntry::new(id, Status::Fail).with("tensor", w)
        } else if realized.iter().any(|c| c != &computed) {
            CheckEntry::new(id, Status::Fail)
        } else if realized.is_empty() {
            CheckEntry::new(id, Status::Pass).with("dim", 0)
        } else if computed != printed {
            CheckEntry::new(id, Status::PaperDiscrepancy)
        } else {
            CheckEntry::new(id, Status::Pass)
        };
        out.push(
            entry
                .with("printed", row.printed_eigenvalue)
                .with("computed", row.eigenvalue)
                .with("realized", realized.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")),
        );
    }
    Ok(out)
}

pub fn verify_eigen(grid: Grid) -> Result<VerificationReport> {
    let mut entries = Vec::new();
    let (ns, kmax, imax): (&[usize], i64, i64) = match grid {
        Grid::Small => (&[1, 2], 2, 0),
        Grid::Full => (&[1, 2, 3], 4, 2),
    };
    for &n in ns {
        for k in 0..=kmax {
            entries.extend(verify_eigen_core(n, 0, 0, k)?);
        }
        entries.extend(verify_table_eigen(TableName::II, n, imax)?);
    }
    let n2_tables: &[TableName] = match grid {
        Grid::Small => &[TableName::VIII],
        Grid::Full => &[TableName::VI, TableName::VII, TableName::VIII],
    };
    for &t in n2_tables {
        entries.extend(verify_table_eigen(t, 2, imax)?);
    }
    Ok(VerificationReport::new("eigen", grid.as_str(), entries))
}

// ---------------------------------------------------------------------------
// dims

fn compare(id: String, q: &SpaceQuery, closed: &BigInt, brute: usize, n1_known: bool) -> CheckEntry {
    let ok = *closed == BigInt::from(brute);
    let status = if ok {
        Status::Pass
    } else if n1_known && q.n == 1 {
        Status::PaperDiscrepancy
    } else {
        Status::Fail
    };
    indices(CheckEntry::new(id, status), q)
        .with("printed", closed)
        .with("computed", brute)
}

/// Brute-force kernel dimensions against every closed form at one tuple.
pub fn verify_dims_tuple(q: &SpaceQuery) -> Result<Vec<CheckEntry>> {
    let mut out = Vec::new();
    let id = qid(q);
    let md = q.multidegree().ok_or_else(|| Error::usage("empty space"))?;

    let sp_count = dims::dim_sp_count(q.n, md);
    out.push(indices(CheckEntry::pass_if(format!("dims/{id}/sp"), dims::dim_sp(q) == BigInt::from(sp_count)), q).with("computed", sp_count));

    out.push(indices(CheckEntry::pass_if(format!("dims/{id}/radial-splitting"), spaces::check_radial_splitting(q)?), q));

    let sh = spaces::brute_dim_sh(q)?;
    out.push(compare(format!("dims/{id}/sh"), q, &dims::dim_sh(q), sh, true));
    let t = spaces::brute_dim_t(q)?;
    out.push(compare(format!("dims/{id}/t"), q, &dims::dim_t(q), t, true));

    // Every branch, at the indices it maps onto this tuple.
    for case in PrimitiveCase::ALL {
        let src = case.reflect(q);
        let brute = spaces::brute_dim_primitive(&src, case)?;
        let cid = format!("dims/{}/prim/{}", qid(&src), case.name());
        let value = dims::dim_primitive(&src, case)?;
        out.push(indices(CheckEntry::pass_if(cid.clone(), value == BigUint::from(brute)), &src).with("computed", brute).with("value", &value));
        if case == PrimitiveCase::GradGrad {
            out.push(compare(format!("{cid}/via-t"), q, &dims::dim_primitive_from_t(q), brute, true));
            out.push(compare(format!("{cid}/expanded"), q, &dims::dim_primitive_expanded(q), brute, true));
            let corrected = dims::table1_corrected(q).expect("k <= p, l <= q");
            let ok = corrected == BigRational::from_integer(BigInt::from(brute));
            let status = if ok {
                Status::Pass
            } else if dims::is_degenerate_line_case(q) {
                Status::PaperDiscrepancy
            } else {
                Status::Fail
            };
            out.push(indices(CheckEntry::new(format!("{cid}/table-I-corrected"), status), q).with("printed", &corrected).with("computed", brute));
            let printed = dims::table1_printed(q).expect("k <= p, l <= q");
            let row = ClosedFormRow::classify(q).expect("k <= p, l <= q");
            let b = BigRational::from_integer(BigInt::from(brute));
            let status = if printed == b {
                Status::Pass
            } else if (row.has_half_misprint() && printed.clone() * BigInt::from(2) == b) || dims::is_degenerate_line_case(q) {
                Status::PaperDiscrepancy
            } else {
                Status::Fail
            };
            out.push(
                indices(CheckEntry::new(format!("{cid}/table-I-row{}-printed", row.number()), status), q)
                    .with("printed", &printed)
                    .with("computed", brute),
            );
        }
    }
    Ok(out)
}

/// Closed-form routes only, for sizes beyond the brute-force grid.
pub fn verify_dims_closed(q: &SpaceQuery) -> Result<Vec<CheckEntry>> {
    let id = qid(q);
    let via_t = dims::dim_primitive_from_t(q);
    let expanded = dims::dim_primitive_expanded(q);
    let corrected = dims::table1_corrected(q).ok_or_else(|| Error::usage("closed forms need k <= p, l <= q"))?;
    let ok = via_t == expanded && corrected == BigRational::from_integer(via_t.clone());
    Ok(vec![indices(CheckEntry::pass_if(format!("dims/{id}/closed-routes"), ok), q)
        .with("via-t", &via_t)
        .with("expanded", &expanded)
        .with("table-I", &corrected)])
}

fn dims_tuples(grid: Grid) -> (Vec<SpaceQuery>, Vec<SpaceQuery>) {
    let top = match grid {
        Grid::Small => 2,
        Grid::Full => 3,
    };
    let mut brute = Vec::new();
    let mut closed = Vec::new();
    for n in 1..=4usize {
        for p in 0..=top {
            for q in 0..=top {
                for k in 0..=p {
                    for l in 0..=q {
                        let t = SpaceQuery::new(n, p, q, k, l);
                        if n <= 2 {
                            brute.push(t);
                        } else {
                            closed.push(t);
                        }
                    }
                }
            }
        }
    }
    (brute, closed)
}

pub fn verify_dims(grid: Grid) -> Result<VerificationReport> {
    let (brute, closed) = dims_tuples(grid);
    let mut entries: Vec<CheckEntry> = brute
        .par_iter()
        .map(verify_dims_tuple)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    for q in &closed {
        entries.extend(verify_dims_closed(q)?);
    }
    Ok(VerificationReport::new("dims", grid.as_str(), entries))
}

// ---------------------------------------------------------------------------
// commutators

fn first_failure<F>(basis: &[TensorPoly], check: F) -> Result<Option<String>>
where
    F: Fn(&TensorPoly) -> Result<bool> + Sync,
{
    let bad = basis
        .par_iter()
        .map(|t| check(t).map(|ok| (!ok).then(|| t.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(bad.into_iter().flatten().next())
}

fn apply_n(op: OperatorTag, t: &TensorPoly, times: i64) -> Result<TensorPoly> {
    let mut cur = t.clone();
    for _ in 0..times {
        cur = op.apply(&cur)?;
    }
    Ok(cur)
}

/// `a - b == c` as polynomials, ignoring the nominal multidegree of zeros.
fn difference_is(a: &TensorPoly, b: &TensorPoly, c: &TensorPoly) -> Result<bool> {
    Ok(a.body().try_sub(b.body())?.try_sub(c.body())?.is_zero())
}

fn same(a: &TensorPoly, b: &TensorPoly) -> Result<bool> {
    Ok(a.body().try_sub(b.body())?.is_zero())
}

fn identity_entry(id: String, q: &SpaceQuery, witness: Option<String>) -> CheckEntry {
    let e = indices(CheckEntry::pass_if(id, witness.is_none()), q);
    match witness {
        Some(w) => e.with("monomial", w),
        None => e,
    }
}

/// `x y t - y x t == c t` on every tensor of `basis`.
fn commutator_check(basis: &[TensorPoly], x: OperatorTag, y: OperatorTag, c: i64) -> Result<Option<String>> {
    first_failure(basis, |t| difference_is(&x.apply(&y.apply(t)?)?, &y.apply(&x.apply(t)?)?, &t.scale(&rational(c))))
}

/// The commutation relations on one `SP` space.
pub fn verify_commutators_tuple(q: &SpaceQuery) -> Result<Vec<CheckEntry>> {
    use OperatorTag::*;
    let id = qid(q);
    let basis = monomial_tensors(q)?;
    let mut out = Vec::new();
    for (name, x, y, c) in [
        ("iw-grad", ContractHol, SymgradHol, q.k - q.p),
        ("iwb-gradb", ContractAntihol, SymgradAntihol, q.l - q.q),
        ("iwb-grad", ContractAntihol, SymgradHol, 0),
        ("iw-gradb", ContractHol, SymgradAntihol, 0),
        ("grad-gradb", SymgradHol, SymgradAntihol, 0),
    ] {
        let w = commutator_check(&basis, x, y, c)?;
        out.push(identity_entry(format!("commutators/{id}/{name}"), q, w).with("scalar", c));
    }
    for pair in OperatorPair::ALL {
        let (phi, psi) = pair.operators();
        let (a, b) = pair.grading(q);
        for l in 1..=3i64 {
            // phi^l psi - psi phi^l = l(a-b+l-1) phi^{l-1}
            let w18 = first_failure(&basis, |t| {
                let lhs = apply_n(phi, &psi.apply(t)?, l)?;
                let rhs = psi.apply(&apply_n(phi, t, l)?)?;
                let tail = apply_n(phi, t, l - 1)?.scale(&rational(l * (a - b + l - 1)));
                difference_is(&lhs, &rhs, &tail)
            })?;
            out.push(identity_entry(format!("commutators/{id}/{:?}/raise-power-{l}", pair), q, w18));
            // psi^l phi - phi psi^l = l(b-a+l-1) psi^{l-1}
            let w19 = first_failure(&basis, |t| {
                let lhs = apply_n(psi, &phi.apply(t)?, l)?;
                let rhs = phi.apply(&apply_n(psi, t, l)?)?;
                let tail = apply_n(psi, t, l - 1)?.scale(&rational(l * (b - a + l - 1)));
                difference_is(&lhs, &rhs, &tail)
            })?;
            out.push(identity_entry(format!("commutators/{id}/{:?}/lower-power-{l}", pair), q, w19));
        }
    }
    Ok(out)
}

fn commutator_tuples(grid: Grid) -> Vec<SpaceQuery> {
    let (pq, kl) = match grid {
        Grid::Small => (2, 2),
        Grid::Full => (3, 4),
    };
    let mut out = Vec::new();
    for n in 1..=2usize {
        for p in 0..=pq {
            for q in 0..=pq - p {
                for k in 0..=kl {
                    for l in 0..=kl - k {
                        out.push(SpaceQuery::new(n, p, q, k, l));
                    }
                }
            }
        }
    }
    out
}

pub fn verify_commutators(grid: Grid) -> Result<VerificationReport> {
    let entries = commutator_tuples(grid)
        .par_iter()
        .map(verify_commutators_tuple)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(VerificationReport::new("commutators", grid.as_str(), entries))
}

// ---------------------------------------------------------------------------
// decomposition

/// Idempotence, image and kernel of the projector for one operator pair.
pub fn verify_projector(q: &SpaceQuery, pair: OperatorPair) -> Result<Vec<CheckEntry>> {
    let id = format!("decomposition/{}/projector/{:?}", qid(q), pair);
    let proj = spaces::projector_lemma33(q, pair)?;
    let (phi, psi) = pair.operators();
    let t = spaces::basis_t(q)?;
    let tensors = t.tensors()?;
    let idem = first_failure(&tensors, |x| {
        let px = proj.apply(x)?;
        same(&proj.apply(&px)?, &px)
    })?;
    let into_kernel = first_failure(&tensors, |x| Ok(phi.apply(&proj.apply(x)?)?.is_zero()))?;
    let (dp, dq, dk, dl) = pair.psi_shift();
    let prev = q.shifted(-dp, -dq, -dk, -dl);
    let md = q.multidegree().expect("nonempty");
    let psi_image = if prev.is_empty_space() {
        Subspace::zero(t.ambient().clone())
    } else {
        spaces::image_of(&spaces::basis_t(&prev)?, q.n, md, |x| psi.apply(x))?
    };
    let killed = first_failure(&psi_image.tensors()?, |x| Ok(proj.apply(x)?.is_zero()))?;
    let image = spaces::image_of(&t, q.n, md, |x| proj.apply(x))?;
    let split = image.dim() + psi_image.dim() == t.dim() && image.sum(&psi_image)?.dim() == t.dim();
    let mut out = vec![
        identity_entry(format!("{id}/idempotent"), q, idem),
        identity_entry(format!("{id}/image-in-kernel"), q, into_kernel),
        identity_entry(format!("{id}/kills-lowered-image"), q, killed),
        indices(CheckEntry::pass_if(format!("{id}/direct-sum"), split), q)
            .with("image", image.dim())
            .with("lowered", psi_image.dim())
            .with("t", t.dim()),
    ];
    let (a, b) = pair.grading(q);
    if b < a {
        let (dp, dq, dk, dl) = pair.psi_shift();
        let target = q.shifted(dp, dq, dk, dl).multidegree().expect("b < a leaves room to lower");
        let img = spaces::image_of(&t, q.n, target, |x| psi.apply(x))?;
        out.push(
            indices(CheckEntry::pass_if(format!("{id}/lowering-injective"), img.dim() == t.dim()), q)
                .with("image", img.dim())
                .with("t", t.dim()),
        );
    }
    Ok(out)
}

/// Completeness, independence and eigenvalues of every branch decomposition
/// of `T^{p,q}_{k,l}`, plus the projector and mapping properties.
pub fn verify_decomposition_tuple(q: &SpaceQuery) -> Result<Vec<CheckEntry>> {
    let id = qid(q);
    let mut out = Vec::new();
    let t = spaces::basis_t(q)?;
    for case in PrimitiveCase::ALL.into_iter().filter(|c| c.is_consistent(q)) {
        let cid = format!("decomposition/{id}/{}", case.name());
        let pieces = spaces::decompose_t_with_case(q, case)?;
        let total: usize = pieces.iter().map(|pc| pc.space.dim()).sum();
        let mut span = Subspace::zero(t.ambient().clone());
        for pc in &pieces {
            span = span.sum(&pc.space)?;
        }
        out.push(indices(CheckEntry::pass_if(format!("{cid}/complete"), total == t.dim()), q).with("sum", total).with("t", t.dim()));
        out.push(indices(CheckEntry::pass_if(format!("{cid}/independent"), span.dim() == total && t.contains(&span)?), q).with("span", span.dim()));
        if q.is_circle_invariant() {
            for pc in &pieces {
                let expected = spectra::lambda_lemma34(q.n as i64, q.p, q.q, q.k, q.l, pc.r, pc.s)?;
                let pid = format!("{cid}/r{}s{}/eigenvalue", pc.r, pc.s);
                let entry = match common_eigenvalue(&pc.space)? {
                    Err(w) => CheckEntry::new(pid, Status::Fail).with("tensor", w),
                    Ok(None) => CheckEntry::new(pid, Status::Pass).with("dim", 0),
                    Ok(Some(c)) => CheckEntry::pass_if(pid, c == rational(expected)).with("realized", &c),
                };
                out.push(indices(entry, q).with("expected", expected));
            }
        }
    }
    for pair in OperatorPair::ALL {
        let (a, b) = pair.grading(q);
        if b <= a {
            out.extend(verify_projector(q, pair)?);
        }
    }
    let mapping = spaces::check_operator_mapping(q)?;
    for (op, ok) in mapping {
        out.push(indices(CheckEntry::pass_if(format!("decomposition/{id}/maps-t/{}", op.name()), ok), q));
    }
    if q.is_circle_invariant() {
        out.push(verify_metric_powers(q)?);
    }
    Ok(out)
}

/// The sum over `m` of metric powers times `T^{p-m,q-m}_{k,l}` is direct
/// inside `SP^{p,q}_{k,l}`.
pub fn verify_metric_powers(q: &SpaceQuery) -> Result<CheckEntry> {
    let md = q.multidegree().expect("nonempty");
    let mut total = 0;
    let mut span: Option<Subspace> = None;
    for m in 0..=q.p.min(q.q) {
        let src = q.shifted(-m, -m, 0, 0);
        let img = spaces::image_of(&spaces::basis_t(&src)?, q.n, md, |t| apply_n(OperatorTag::MetricMult, t, m))?;
        total += img.dim();
        span = Some(match span {
            None => img,
            Some(s) => s.sum(&img)?,
        });
    }
    let got = span.map(|s| s.dim()).unwrap_or(0);
    Ok(indices(CheckEntry::pass_if(format!("decomposition/{}/metric-powers-independent", qid(q)), got == total), q)
        .with("sum", total)
        .with("span", got))
}

fn decomposition_tuples(grid: Grid) -> Vec<SpaceQuery> {
    let kl = match grid {
        Grid::Small => 3,
        Grid::Full => 6,
    };
    let mut out = Vec::new();
    for n in 1..=2usize {
        for p in 0..=2 {
            for q in 0..=2 - p {
                for k in 0..=kl {
                    for l in 0..=kl - k {
                        if k + p == l + q {
                            out.push(SpaceQuery::new(n, p, q, k, l));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn verify_decomposition(grid: Grid) -> Result<VerificationReport> {
    let entries = decomposition_tuples(grid)
        .par_iter()
        .map(verify_decomposition_tuple)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(VerificationReport::new("decomposition", grid.as_str(), entries))
}

pub fn verify(suite: Suite, grid: Grid) -> Result<VerificationReport> {
    match suite {
        Suite::Eigen => verify_eigen(grid),
        Suite::Dims => verify_dims(grid),
        Suite::Commutators => verify_commutators(grid),
        Suite::Decomposition => verify_decomposition(grid),
        Suite::All => {
            let mut report = VerificationReport::new("all", grid.as_str(), Vec::new());
            for s in [Suite::Eigen, Suite::Dims, Suite::Commutators, Suite::Decomposition] {
                report.merge(verify(s, grid)?.entries);
            }
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mixed_tensors_have_eigenvalue_twelve() {
        let e = verify_eigen_piece(2, 1, 0, 0, 0, 0).unwrap();
        assert_eq!(e.status, Status::Pass);
        assert_eq!(e.witness["realized"], "12");
        assert_eq!(e.witness["dim"], "8");
    }

    #[test]
    fn scalar_eigenvalues_on_the_line() {
        for k in 0..=3 {
            let e = verify_eigen_piece(1, 0, 0, k, 0, 0).unwrap();
            assert_eq!(e.witness["realized"], (4 * k * (k + 1)).to_string());
        }
    }

    #[test]
    fn table_ii_row_two_is_flagged() {
        let entries = verify_table_eigen(TableName::II, 2, 0).unwrap();
        let flagged: Vec<_> = entries.iter().filter(|e| e.status == Status::PaperDiscrepancy).collect();
        assert_eq!(flagged.len(), 1);
        assert_eq!(flagged[0].witness["printed"], "16");
        assert_eq!(flagged[0].witness["computed"], "32");
        assert!(entries.iter().all(|e| e.status != Status::Fail));
    }

    #[test]
    fn commutator_scalar_example() {
        let q = SpaceQuery::new(1, 1, 0, 2, 1);
        let entries = verify_commutators_tuple(&q).unwrap();
        assert!(entries.iter().all(|e| e.status == Status::Pass), "{:?}", entries.iter().find(|e| e.status != Status::Pass));
        assert_eq!(entries[0].witness["scalar"], "1");
    }

    #[test]
    fn decomposition_of_t1111() {
        let q = SpaceQuery::new(2, 1, 1, 1, 1);
        let entries = verify_decomposition_tuple(&q).unwrap();
        let bad: Vec<_> = entries.iter().filter(|e| e.status != Status::Pass).collect();
        assert!(bad.is_empty(), "{:?}", bad);
    }

    #[test]
    fn dims_on_a_pure_row() {
        let q = SpaceQuery::new(2, 0, 2, 0, 1);
        let entries = verify_dims_tuple(&q).unwrap();
        let flagged: Vec<_> = entries.iter().filter(|e| e.status == Status::PaperDiscrepancy).collect();
        assert_eq!(flagged.len(), 1);
        assert!(flagged[0].id.ends_with("table-I-row6-printed"));
        assert!(entries.iter().all(|e| e.status != Status::Fail));
    }

    #[test]
    fn merge_is_sorted_and_replaces() {
        let mut r = VerificationReport::new("x", "small", vec![CheckEntry::new("b", Status::Pass), CheckEntry::new("a", Status::Fail)]);
        r.merge(vec![CheckEntry::new("a", Status::Pass)]);
        let ids: Vec<_> = r.entries.iter().map(|e| (e.id.as_str(), e.status)).collect();
        assert_eq!(ids, vec![("a", Status::Pass), ("b", Status::Pass)]);
        assert_eq!(r.exit_status(), 0);
    }
}
