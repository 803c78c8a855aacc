//! Acceptance criteria 1-9. Each criterion prints one PASS/FAIL line.
//!
//! A criterion that is red because the printed source disagrees with exact
//! computation is checked against the precise set of mismatches that has been
//! analysed; the test only fails when the outcome moves away from that set.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use lichnerowicz::dims::{self, factorial, ClosedFormRow, PrimitiveCase, SpaceQuery};
use lichnerowicz::oracle::{self, CheckEntry, Grid, Status};
use lichnerowicz::spaces::{self, OperatorPair};
use lichnerowicz::spectra::{self, TableName};

struct Outcome {
    pass: bool,
    /// For a red criterion: the mismatches are exactly the analysed ones.
    as_analysed: bool,
    detail: String,
}

impl Outcome {
    fn green(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            as_analysed: pass,
            detail: detail.into(),
        }
    }
}

fn fact(n: i64) -> BigInt {
    BigInt::from(factorial(n as u64))
}

fn scalar_mult(n: i64, k: i64) -> BigUint {
    let v = BigInt::from(n * (n + 2 * k)) * fact(n + k - 1).pow(2) / (fact(n).pow(2) * fact(k).pow(2));
    v.to_biguint().unwrap()
}

fn non_pass(entries: &[CheckEntry]) -> Vec<&CheckEntry> {
    entries.iter().filter(|e| e.status != Status::Pass).collect()
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=3i64 {
        let report = spectra::spectrum(n as usize, 0, 0, 4 * 4 * (n + 4)).unwrap();
        let got: Vec<(i64, BigUint)> = report.lines.iter().map(|l| (l.eigenvalue, l.multiplicity.clone())).collect();
        let want: Vec<(i64, BigUint)> = (0..=4).map(|k| (4 * k * (n + k), scalar_mult(n, k))).collect();
        if got != want {
            bad.push(format!("spectrum n={n}"));
        }
        for k in 0..=4 {
            let entries = oracle::verify_eigen_core(n as usize, 0, 0, k).unwrap();
            let realized = entries[0].witness.get("realized").cloned();
            if !non_pass(&entries).is_empty() || realized != Some((4 * k * (n + k)).to_string()) {
                bad.push(format!("eigencheck n={n} k={k}"));
            }
        }
    }
    Outcome::green(bad.is_empty(), format!("n in 1..3, k <= 4, operator-checked; mismatches: {:?}", bad))
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut flagged = 0;
    for n in 1..=3usize {
        let ni = n as i64;
        let t = spectra::render_named_table(TableName::II, n, 2).unwrap();
        for block in ["S^{0,1}", "S^{1,0}"] {
            let first = t.rows.iter().find(|r| r.block == block && r.row == 1).unwrap();
            if first.eigenvalue != 4 * (ni + 1) || first.dimension != BigUint::from((n * (n + 2)) as u64) {
                bad.push(format!("first row {block} n={n}"));
            }
        }
        for d in &t.discrepancies {
            let is_row2 = d.kind == "eigenvalue" && d.location.starts_with("table II S^{0,1} row 2 index ");
            if !is_row2 {
                bad.push(format!("unexpected {} at {}", d.kind, d.location));
                continue;
            }
            let j: i64 = d.location.rsplit(' ').next().unwrap().parse().unwrap();
            if d.computed != (4 * (j + 2) * (ni + j + 2)).to_string() || d.printed != (4 * (j + 1) * (ni + j + 2)).to_string() {
                bad.push(format!("row 2 values at n={n} j={j}"));
            }
            flagged += 1;
        }
        let entries = oracle::verify_table_eigen(TableName::II, n, 2).unwrap();
        for e in non_pass(&entries) {
            let expected = e.status == Status::PaperDiscrepancy && e.id.contains("/S^{0,1}/row2/");
            if !expected {
                bad.push(format!("oracle {} {}", e.status, e.id));
            }
        }
        let row2 = entries.iter().filter(|e| e.id.contains("/S^{0,1}/row2/")).count();
        if row2 != 3 || entries.iter().filter(|e| e.status == Status::PaperDiscrepancy).count() != 3 {
            bad.push(format!("row 2 oracle entries at n={n}"));
        }
    }
    let pass = bad.is_empty() && flagged == 9;
    Outcome::green(
        pass,
        format!("blocks reproduced for n in 1..3, k <= 2; row 2 realized as 4(k+2)(n+k+2), flagged {flagged}x against printed 4(k+1)(n+k+2); problems: {:?}", bad),
    )
}

/// Dimension of a table row from the pieces built by elimination.
fn brute_row_dim(n: usize, p: i64, l: i64, row: &spectra::TableRow) -> usize {
    row.pieces
        .iter()
        .map(|pc| {
            let core = SpaceQuery::new(n, p, p + l, pc.k + l, pc.k);
            let pieces = spaces::decompose_t_with_case(&core, pc.case.primitive_case()).unwrap();
            pieces.iter().find(|t| t.r == pc.r && t.s == pc.s).unwrap().space.dim()
        })
        .sum()
}

fn criterion_3() -> Outcome {
    let mut mismatches = BTreeSet::new();
    let mut problems = Vec::new();
    for name in [TableName::VI, TableName::VII, TableName::VIII] {
        let t = spectra::render_named_table(name, 2, 2).unwrap();
        let (p, l) = if name == TableName::VIII { (1, 0) } else { (0, 2) };
        for d in &t.discrepancies {
            mismatches.insert(format!("{} {}", d.kind, d.location));
        }
        for row in &t.rows {
            if row.pieces.iter().all(|pc| pc.m == 0) {
                let brute = brute_row_dim(2, p, l, row);
                if BigUint::from(brute) != row.dimension {
                    problems.push(format!("brute dim {} at table {} row {}", brute, name, row.row));
                }
            }
        }
        // the pairs singled out in the criterion
        for m in 0..=2i64 {
            let find = |e: i64| t.rows.iter().find(|r| r.eigenvalue == e && r.index.is_none_or(|i| i == m)).map(|r| r.dimension.clone());
            let want: Vec<(i64, BigUint)> = match name {
                TableName::VIII => vec![
                    (12, BigUint::from(8u32)),
                    (4 * (m + 2) * (m + 4), BigUint::from(((m + 3).pow(3)) as u64)),
                    (4 * m * (m + 2), BigUint::from(((m + 1).pow(3)) as u64)),
                ],
                _ => vec![(4 * (m * m + 8 * m + 18), BigUint::from(((m + 1) * (m + 7) * (m + 4)) as u64))],
            };
            for (e, d) in want {
                if find(e) != Some(d.clone()) {
                    problems.push(format!("table {} m={} eigenvalue {} dim {}", name, m, e, d));
                }
            }
        }
        let entries = oracle::verify_table_eigen(name, 2, 2).unwrap();
        for e in non_pass(&entries) {
            problems.push(format!("oracle {} {}", e.status, e.id));
        }
    }
    let analysed: BTreeSet<String> = [
        "dimension table VI S^{0,2} row 4",
        "dimension table VII S^{2,0} row 4",
        "dimension table VIII S^{1,1} row 4 index 0",
        "dimension table VIII S^{1,1} row 4 index 1",
        "dimension table VIII S^{1,1} row 4 index 2",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    Outcome {
        pass: mismatches.is_empty() && problems.is_empty(),
        as_analysed: mismatches == analysed && problems.is_empty(),
        detail: format!(
            "listed pairs, eigenvalues, elimination dimensions and m=0 eigenchecks agree; printed dimension differs on {} rows (VI/VII row 4: 56 printed, 35 computed; VIII row 4: (m+1)(m+3)(2m+5) printed, (m+1)(m+4)(2m+5) computed); other problems: {:?}",
            mismatches.len(),
            problems
        ),
    }
}

/// `(n, p, q, k, l)` from an id such as `dims/n1/p2q1k1l0/t`.
fn id_indices(id: &str) -> SpaceQuery {
    let mut parts = id.split('/').skip(1);
    let n = parts.next().unwrap()[1..].parse().unwrap();
    let rest = parts.next().unwrap();
    let nums: Vec<i64> = rest.split(|c: char| c.is_ascii_alphabetic()).filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect();
    SpaceQuery::new(n, nums[0], nums[1], nums[2], nums[3])
}

fn criterion_4() -> Outcome {
    let report = oracle::verify_dims(Grid::Full).unwrap();
    let mut unexpected = Vec::new();
    let mut half_flags = 0;
    let mut n1_routes = BTreeSet::new();
    let mut n1_t = 0;
    for e in non_pass(&report.entries) {
        let q = id_indices(&e.id);
        let rat = |key: &str| e.witness.get(key).map(|v| v.parse::<BigRational>().unwrap()).unwrap_or_else(BigRational::zero);
        let half = e.id.ends_with("table-I-row6-printed") || e.id.ends_with("table-I-row7-printed");
        if e.status != Status::PaperDiscrepancy {
            unexpected.push(format!("{} {}", e.status, e.id));
        } else if half && rat("printed") * BigInt::from(2) == rat("computed") {
            half_flags += 1;
        } else if dims::is_degenerate_line_case(&q) && e.id.contains("/prim/") {
            n1_routes.insert(format!("{}", q));
        } else if q.n == 1 && e.id.ends_with("/t") && q.k >= 1 && q.l >= 1 {
            n1_t += 1;
        } else {
            unexpected.push(format!("{} {}", e.status, e.id));
        }
    }
    // every pure-type tuple with a nonzero space must carry the flag
    let mut pure_nonzero = 0;
    for n in 1..=2usize {
        for p in 0..=3 {
            for q in 0..=3 {
                for k in 0..=p {
                    for l in 0..=q {
                        let t = SpaceQuery::new(n, p, q, k, l);
                        if ClosedFormRow::classify(&t).unwrap().has_half_misprint() && !spaces::brute_dim_primitive(&t, PrimitiveCase::GradGrad).unwrap().is_zero() {
                            pure_nonzero += 1;
                        }
                    }
                }
            }
        }
    }
    let expected_routes: BTreeSet<String> = (1..=3)
        .flat_map(|p| (1..=3).map(move |q| format!("{}", SpaceQuery::new(1, p, q, 1, 1))))
        .collect();
    let clean = unexpected.is_empty() && half_flags == pure_nonzero;
    Outcome {
        pass: clean && n1_routes.is_empty() && n1_t == 0,
        as_analysed: clean && n1_routes == expected_routes && n1_t == 36,
        detail: format!(
            "{} checks; rows 6-7 flagged as exactly 1/2 on {half_flags}/{pure_nonzero} tuples; n=2 and closed-form n=3,4 agree; \
             n=1: closed forms are negative on {} k=l=1 tuples where the space is 0, and dim T differs on {n1_t} tuples with k,l >= 1; unexpected: {:?}",
            report.entries.len(),
            n1_routes.len(),
            unexpected
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut entries = oracle::verify_commutators(Grid::Full).unwrap().entries;
    let mut tuples = 0;
    for n in 1..=2usize {
        for p in 0..=3 {
            for q in 0..=3 - p {
                for k in 0..=4 {
                    for l in 0..=4 - k {
                        let t = SpaceQuery::new(n, p, q, k, l);
                        tuples += 1;
                        let ok = spaces::check_radial_splitting(&t).unwrap();
                        entries.push(radial_entry(&t, ok));
                        for pair in OperatorPair::ALL {
                            let (a, b) = pair.grading(&t);
                            if b <= a {
                                entries.extend(oracle::verify_projector(&t, pair).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
    let bad: Vec<String> = non_pass(&entries).iter().map(|e| e.id.clone()).collect();
    Outcome::green(
        bad.is_empty(),
        format!("{} exact identities on {tuples} tuples (commutators, power relations for l <= 3, radial splitting, projectors); failures: {:?}", entries.len(), bad),
    )
}

fn radial_entry(t: &SpaceQuery, ok: bool) -> CheckEntry {
    CheckEntry {
        id: format!("radial/{t}"),
        status: if ok { Status::Pass } else { Status::Fail },
        witness: Default::default(),
    }
}

fn criterion_6() -> Outcome {
    let report = oracle::verify_decomposition(Grid::Full).unwrap();
    let bad: Vec<String> = non_pass(&report.entries).iter().map(|e| e.id.clone()).collect();
    let eig = report.entries.iter().filter(|e| e.id.ends_with("/eigenvalue")).count();
    Outcome::green(
        bad.is_empty(),
        format!("{} checks, {eig} piece eigenvalue checks, on n <= 2, p+q <= 2, k+l <= 6; failures: {:?}", report.entries.len(), bad),
    )
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    let mut bad = 0;
    for n in 1..=5 {
        for p in 0..=3 {
            for l in 0..=2 {
                for m in 0..=p {
                    for k in 0..=5 {
                        for r in 0..=3 {
                            for s in 0..=3 {
                                let a = p - m;
                                count += 1;
                                if spectra::lambda_thm32(n, p, l, m, k, r, s) != spectra::lambda_lemma34(n, a, a + l, k + l, k, r, s).unwrap() {
                                    bad += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Outcome::green(bad == 0, format!("{count} index tuples, {bad} disagreements"))
}

fn criterion_8() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut as_analysed = true;
    for n in [1usize, 2] {
        let (mut extra_total, mut missing_total) = (0, 0);
        for p in 0..=2 {
            for l in 0..=1 {
                let listed = spectra::theorem_piece_list(n, p, l, 3);
                let all = spectra::all_pieces(n, p, l, 3).unwrap();
                let key = |pc: &spectra::SpectralPiece| (pc.m, pc.k, pc.r, pc.s, pc.case);
                let nonzero: BTreeSet<_> = all.iter().filter(|pc| !pc.multiplicity.is_zero()).map(key).collect();
                // listed pieces whose primitive source is the k = l = 1 family over C^2
                let degenerate: BTreeSet<_> = all
                    .iter()
                    .filter(|pc| {
                        let (src, case) = spectra::piece_source(pc.n, pc.p, pc.l, pc.m, pc.k, pc.r, pc.s, pc.case);
                        dims::is_degenerate_line_case(&case.reflect(&src))
                    })
                    .map(key)
                    .collect();
                let extra: BTreeSet<_> = nonzero.difference(&listed).cloned().collect();
                let missing: BTreeSet<_> = listed.difference(&nonzero).cloned().collect();
                pass &= extra.is_empty() && missing.is_empty();
                as_analysed &= extra.is_empty() && (n == 1 || missing.is_empty()) && missing.is_subset(&degenerate);
                extra_total += extra.len();
                missing_total += missing.len();
            }
        }
        details.push(format!("n={n}: {extra_total} unlisted nonzero pieces, {missing_total} listed pieces of multiplicity 0"));
    }
    details.push("the n=1 exceptions all come from the k=l=1 primitive family, which is 0 over C^2".into());
    Outcome {
        pass,
        as_analysed,
        detail: details.join("; "),
    }
}

fn run_bin(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_lichnerowicz")).args(args).output().unwrap();
    assert!(out.status.success(), "{:?}", args);
    out.stdout
}

fn criterion_9() -> Outcome {
    let mut queries: Vec<Vec<String>> = Vec::new();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    for n in 1..=3 {
        let ns = n.to_string();
        let max = (16 * (n + 4)).to_string();
        queries.push(s(&["spectrum", "--n", &ns, "--p", "0", "--q", "0", "--max-eig", &max]));
        queries.push(s(&["spectrum", "--n", &ns, "--p", "0", "--q", "1", "--max-eig", "200"]));
        queries.push(s(&["spectrum", "--n", &ns, "--p", "1", "--q", "1", "--max-eig", "200"]));
        queries.push(s(&["table", "--name", "II", "--n", &ns, "--index-max", "2"]));
    }
    for t in ["VI", "VII", "VIII"] {
        queries.push(s(&["table", "--name", t, "--n", "2", "--index-max", "2"]));
    }
    queries.push(s(&["verify", "--suite", "eigen", "--grid", "small"]));
    queries.push(s(&["verify", "--suite", "decomposition", "--grid", "small"]));
    let mut runs = 0;
    let mut differing = Vec::new();
    for q in &queries {
        for format in ["json", "csv"] {
            let mut outputs = Vec::new();
            for workers in ["1", "4", "1", "4"] {
                let mut args: Vec<&str> = q.iter().map(String::as_str).collect();
                args.extend(["--format", format, "--workers", workers]);
                outputs.push(run_bin(&args));
                runs += 1;
            }
            if outputs.iter().any(|o| o != &outputs[0]) {
                differing.push(format!("{} {}", q.join(" "), format));
            }
        }
    }
    Outcome::green(differing.is_empty(), format!("{runs} runs over {} queries x 2 formats x workers 1/4; differing: {:?}", queries.len(), differing))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "scalar spectrum", criterion_1),
        (2, "1-forms", criterion_2),
        (3, "n=2 tensor tables", criterion_3),
        (4, "dimension audit", criterion_4),
        (5, "operator identities", criterion_5),
        (6, "decomposition completeness", criterion_6),
        (7, "formula coherence", criterion_7),
        (8, "degeneration", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let mut unexplained = Vec::new();
    for (id, name, check) in criteria {
        let start = std::time::Instant::now();
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        // written past the test harness capture so the lines show in every run
        writeln!(std::io::stdout(), "criterion {id} ({name}): {status} [{:.1?}] {}", start.elapsed(), outcome.detail).unwrap();
        if !outcome.pass && !outcome.as_analysed {
            unexplained.push(id);
        }
    }
    assert!(unexplained.is_empty(), "criteria red for reasons outside the analysed set: {:?}", unexplained);
}
