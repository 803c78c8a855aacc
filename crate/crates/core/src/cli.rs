//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dims::{self, PrimitiveCase, SpaceQuery};
use crate::error::{Error, Result};
use crate::linalg;
use crate::oracle::{self, Grid, Status, Suite, VerificationReport};
use crate::spaces;
use crate::spectra::{self, NamedTable, SpectrumReport, TableName};

#[derive(Parser, Debug)]
#[command(name = "lichnerowicz", version, about = "Spectra of the Lichnerowicz Laplacian on symmetric tensors over CP^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Largest ambient dimension a brute-force computation may use.
    #[arg(long, global = true, default_value_t = 20000)]
    pub cap: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues and multiplicities on S^{p,q} up to a bound.
    Spectrum(SpectrumArgs),
    /// Reproduce one of the tabulated special cases.
    Table(TableArgs),
    /// Dimensions of the polynomial tensor spaces at one index tuple.
    Dims(DimsArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("degree").required(true).args(["q", "l"])))]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: i64,
    #[arg(long)]
    pub q: Option<i64>,
    /// `q - p`, as an alternative to `--q`.
    #[arg(long)]
    pub l: Option<i64>,
    #[arg(long = "max-eig")]
    pub max_eig: i64,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "index-max", default_value_t = 2)]
    pub index_max: i64,
}

#[derive(Args, Debug)]
pub struct DimsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: i64,
    #[arg(long)]
    pub q: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub l: i64,
    /// grad-grad, grad-contract, contract-grad or contract-contract;
    /// defaults to the branch the indices select.
    #[arg(long)]
    pub case: Option<String>,
    /// Also compute kernel dimensions by elimination.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value = "small")]
    pub grid: String,
}

#[derive(Serialize)]
struct DimsReport {
    query: SpaceQuery,
    case: String,
    sp: String,
    sh: String,
    t: String,
    primitive: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute: Option<BruteDims>,
}

#[derive(Serialize)]
struct BruteDims {
    sh: usize,
    t: usize,
    primitive: usize,
}

/// Parse `argv`, execute, write to `out`/`err`; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    linalg::set_ambient_cap(cli.cap);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::usage("--workers must be positive"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::usage(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Spectrum(a) => {
            let q = match (a.q, a.l) {
                (Some(q), None) => q,
                (None, Some(l)) => a.p + l,
                _ => return Err(Error::usage("give exactly one of --q and --l")),
            };
            let report = spectra::spectrum(a.n, a.p, q, a.max_eig)?;
            Ok((emit_spectrum(&report, cli.format), 0))
        }
        Command::Table(a) => {
            let name = TableName::parse(&a.name).ok_or_else(|| Error::usage(format!("unknown table {:?}; expected II..VIII", a.name)))?;
            let table = spectra::render_named_table(name, a.n, a.index_max)?;
            Ok((emit_table(&table, cli.format), 0))
        }
        Command::Dims(a) => {
            let q = SpaceQuery::new(a.n, a.p, a.q, a.k, a.l);
            if a.n == 0 {
                return Err(Error::usage("n must be at least 1"));
            }
            let case = match &a.case {
                Some(c) => PrimitiveCase::parse(c).ok_or_else(|| Error::usage(format!("unknown case {c:?}")))?,
                None => PrimitiveCase::for_indices(&q),
            };
            let brute = if a.brute {
                Some(BruteDims {
                    sh: spaces::brute_dim_sh(&q)?,
                    t: spaces::brute_dim_t(&q)?,
                    primitive: spaces::brute_dim_primitive(&q, case)?,
                })
            } else {
                None
            };
            let report = DimsReport {
                query: q,
                case: case.name().to_string(),
                sp: dims::dim_sp(&q).to_string(),
                sh: dims::dim_sh(&q).to_string(),
                t: dims::dim_t(&q).to_string(),
                primitive: dims::dim_primitive(&q, case)?.to_string(),
                brute,
            };
            Ok((emit_dims(&report, cli.format), 0))
        }
        Command::Verify(a) => {
            let suite = Suite::parse(&a.suite).ok_or_else(|| Error::usage(format!("unknown suite {:?}", a.suite)))?;
            let grid = Grid::parse(&a.grid).ok_or_else(|| Error::usage(format!("unknown grid {:?}", a.grid)))?;
            let report = oracle::verify(suite, grid)?;
            let code = report.exit_status();
            Ok((emit_verification(&report, cli.format), code))
        }
    })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
}

/// Left-aligned columns separated by two spaces.
fn columns(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let last = cells.len() - 1;
        for (i, c) in cells.iter().enumerate() {
            if i == last {
                out.push_str(c);
            } else {
                let _ = write!(out, "{:w$}  ", c, w = width[i]);
            }
        }
        out.truncate(out.trim_end_matches(' ').len());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn emit_spectrum(report: &SpectrumReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let rows = report
                .lines
                .iter()
                .map(|l| vec![l.eigenvalue.to_string(), l.multiplicity.to_string(), l.pieces.len().to_string()]);
            csv(&["eigenvalue", "multiplicity", "piece_count"], rows)
        }
        Format::Table => {
            let q = &report.query;
            let mut s = format!("# spectrum on S^{{{},{}}}, n={}, eigenvalues <= {}\n", q.p, q.q, q.n, q.max_eig);
            let rows: Vec<Vec<String>> = report
                .lines
                .iter()
                .map(|l| {
                    let pieces = l
                        .pieces
                        .iter()
                        .map(|p| format!("{}(m={},k={},r={},s={}):{}", p.case, p.m, p.k, p.r, p.s, p.dim))
                        .collect::<Vec<_>>()
                        .join(" ");
                    vec![l.eigenvalue.to_string(), l.multiplicity.to_string(), pieces]
                })
                .collect();
            s.push_str(&columns(&["eigenvalue", "multiplicity", "pieces"], &rows));
            emit_discrepancies(&mut s, &report.discrepancies);
            s
        }
    }
}

fn emit_discrepancies(s: &mut String, ds: &[spectra::Discrepancy]) {
    for d in ds {
        let _ = writeln!(s, "! {}: {}: printed {}, computed {}", d.kind, d.location, d.printed, d.computed);
    }
}

pub fn emit_table(table: &NamedTable, format: Format) -> String {
    match format {
        Format::Json => json(table),
        Format::Csv => {
            let header = ["block", "row", "index", "eigenvalue", "printed_eigenvalue", "dimension", "printed_dimension", "eigenspace"];
            let rows = table.rows.iter().map(|r| {
                vec![
                    r.block.clone(),
                    r.row.to_string(),
                    r.index.map(|i| i.to_string()).unwrap_or_default(),
                    r.eigenvalue.to_string(),
                    r.printed_eigenvalue.to_string(),
                    r.dimension.to_string(),
                    r.printed_dimension.clone(),
                    r.eigenspace.clone(),
                ]
            });
            csv(&header, rows)
        }
        Format::Table => {
            let mut s = format!("# table {}, n={}\n", table.name, table.n);
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    let mark = |ok: bool| if ok { "" } else { " !" };
                    vec![
                        r.block.clone(),
                        r.row.to_string(),
                        r.index.map(|i| i.to_string()).unwrap_or_else(|| "-".into()),
                        format!("{}{}", r.eigenvalue, mark(r.eigenvalue == r.printed_eigenvalue)),
                        format!("{}{}", r.dimension, mark(r.dimension.to_string() == r.printed_dimension)),
                        r.eigenspace.clone(),
                    ]
                })
                .collect();
            s.push_str(&columns(&["block", "row", "index", "eigenvalue", "dimension", "eigenspace"], &rows));
            emit_discrepancies(&mut s, &table.discrepancies);
            s
        }
    }
}

fn emit_dims(r: &DimsReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let header = ["n", "p", "q", "k", "l", "case", "sp", "sh", "t", "primitive", "brute_sh", "brute_t", "brute_primitive"];
            let b = |f: fn(&BruteDims) -> usize| r.brute.as_ref().map(|x| f(x).to_string()).unwrap_or_default();
            let q = &r.query;
            let row = vec![
                q.n.to_string(),
                q.p.to_string(),
                q.q.to_string(),
                q.k.to_string(),
                q.l.to_string(),
                r.case.to_string(),
                r.sp.clone(),
                r.sh.clone(),
                r.t.clone(),
                r.primitive.clone(),
                b(|x| x.sh),
                b(|x| x.t),
                b(|x| x.primitive),
            ];
            csv(&header, [row])
        }
        Format::Table => {
            let mut s = format!("# dimensions at {}\n", r.query);
            let mut rows = vec![
                vec!["SP".to_string(), r.sp.clone(), String::new()],
                vec!["SH".into(), r.sh.clone(), r.brute.as_ref().map(|b| b.sh.to_string()).unwrap_or_default()],
                vec!["T".into(), r.t.clone(), r.brute.as_ref().map(|b| b.t.to_string()).unwrap_or_default()],
            ];
            rows.push(vec![
                format!("primitive ({})", r.case),
                r.primitive.clone(),
                r.brute.as_ref().map(|b| b.primitive.to_string()).unwrap_or_default(),
            ]);
            s.push_str(&columns(&["space", "closed form", "kernel"], &rows));
            s
        }
    }
}

pub fn emit_verification(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let rows = report.entries.iter().map(|e| {
                let w = e.witness.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
                vec![e.id.clone(), e.status.to_string(), w]
            });
            csv(&["id", "status", "witness"], rows)
        }
        Format::Table => {
            let mut s = format!("# verify suite={} grid={}\n", report.suite, report.grid);
            for e in report.entries.iter().filter(|e| e.status != Status::Pass) {
                let w = e.witness.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
                let _ = writeln!(s, "{}  {}  {}", e.status, e.id, w);
            }
            let _ = writeln!(
                s,
                "{} checks: {} pass, {} fail, {} paper-discrepancy",
                report.entries.len(),
                report.count(Status::Pass),
                report.count(Status::Fail),
                report.count(Status::PaperDiscrepancy)
            );
            s
        }
    }
}
