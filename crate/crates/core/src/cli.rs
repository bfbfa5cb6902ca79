//! Command-line front end: argument model, subcommand dispatch and output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bivariate::{unit_grid, BiMoment, BiOperator, BiParams};
use crate::convergence::{Certifier, CertifyOptions, LipschitzSpec, Theorem};
use crate::error::{Error, Result};
use crate::korovkin::korovkin_experiment;
use crate::pq_core::{ln_pq_binomial, ln_pq_factorial, pq_integers_upto, PQPair};
use crate::report::{Cell, Table};
use crate::schedule::ParamSchedule;
use crate::selftest::{run_selftest, Status};
use crate::target::TargetFunction;
use crate::univariate::{
    quartic_variant_coefficients, uni_central_moment, uni_moment_closed, uni_moment_variant,
    UniOperator,
};
use crate::voronovskaja::{default_degrees, scaled_central_moment_limit_check, voronovskaja_trace};

pub const EXIT_OK: i32 = 0;
/// A bound, identity or self-check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "pqbern",
    version,
    about = "(p,q)-Bernstein operators: moments, convergence bounds and asymptotics"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Emit one JSON document instead of CSV
    #[arg(long, global = true)]
    pub json: bool,

    /// Write output to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 20240601)]
    pub seed: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Table of [k], [k]!, [n k] and nodes.
    /// Columns: k,pq_integer,pq_factorial,pq_binomial,node
    Pq(PairArgs),
    /// Evaluate B_{n,m} f on a grid.
    /// Columns: x,y,operator,target,abs_error
    Eval(EvalArgs),
    /// Closed-form raw moments e0..e4 against direct summation.
    /// Columns: x,i,closed_form,oracle,abs_diff,statement_form
    Moments(MomentArgs),
    /// Central moments of order 2 and 4 against direct summation.
    /// Columns: x,r,closed_form,oracle,abs_diff,printed_coefficients
    CentralMoments(MomentArgs),
    /// Sup-errors along a schedule for f and the six test monomials.
    /// Columns: n,m,sup_error,err_1,err_s,err_t,err_st,err_s2,err_t2,warning
    Korovkin(KorovkinArgs),
    /// Check the five error bounds.
    /// Columns: theorem,function,schedule,n,m,status,lhs,rhs,rhs_envelope,rhs_variant,margin,
    /// pointwise_pass,uniform_pass,strict_pass,variant_pass,worst_x,worst_y,note
    Certify(CertifyArgs),
    /// Scaled error [n](B_{n,n} f - f) at a point, or scaled central moments.
    /// Columns: n,bracket,scaled_value,predicted_limit,abs_error,richardson
    /// (with --moment-order: n,scaled_value,predicted_limit,refined_limit,abs_error)
    Voronovskaja(VoronovskajaArgs),
    /// Run the identity and property suite.
    /// Columns: check,status,detail
    Selftest,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Evaluate at i/G for i = 0..=G
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Corpus name or expression in x and y
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub n: u32,
    /// Degree in y (defaults to n)
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Pair in y (defaults to p, q)
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub q2: Option<f64>,
    /// Take (p, q) from a schedule instead: i, ii, iii or fixed:P,Q
    #[arg(long, conflicts_with_all = ["p", "q"])]
    pub schedule: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct KorovkinArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long, default_value = "i")]
    pub schedule: String,
    /// Schedule in y (defaults to --schedule)
    #[arg(long)]
    pub schedule2: Option<String>,
    /// Comma list of n or NxM
    #[arg(long, default_value = "8,16,32,64")]
    pub degrees: String,
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    /// all, or a comma list of complete-modulus, partial-moduli, lipschitz, c1, peetre-k
    #[arg(long, default_value = "all")]
    pub theorem: String,
    /// all (the corpus), or a comma list of corpus names; a single expression is also accepted
    #[arg(long, default_value = "all")]
    pub f: String,
    /// all, or a comma list of schedules
    #[arg(long, default_value = "all")]
    pub schedule: String,
    /// Comma list of n (with m = n) or NxM
    #[arg(long, default_value = "4,8,16,32")]
    pub degrees: String,
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = 200)]
    pub modulus_grid: usize,
    /// Lipschitz constants M,a1,a2 overriding the registered ones
    #[arg(long)]
    pub lipschitz: Option<String>,
    /// Use finite-difference partials for functions without analytic ones
    #[arg(long)]
    pub assume_c1: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VoronovskajaArgs {
    #[arg(long, default_value = "quad")]
    pub f: String,
    #[arg(long, default_value = "i")]
    pub schedule: String,
    #[arg(long, default_value = "0.5,0.5")]
    pub point: String,
    /// Comma list; defaults to 16,32,...,2048
    #[arg(long)]
    pub degrees: Option<String>,
    /// Allow finite-difference second partials for corpus functions without
    /// analytic ones (expressions always use finite differences)
    #[arg(long)]
    pub fd: bool,
    /// Trace [n]^(r/2) times the r-th central moment instead (r = 2 or 4)
    #[arg(long, value_parser = ["2", "4"])]
    pub moment_order: Option<String>,
    /// Abscissa for --moment-order
    #[arg(long, default_value_t = 0.5)]
    pub x: f64,
}

/// A finished run: the table and the exit status it implies.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub status: i32,
}

fn parse_list<T, F>(text: &str, what: &str, parse: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Option<T>,
{
    let items: Vec<T> = text
        .split(',')
        .map(|s| {
            parse(s.trim())
                .ok_or_else(|| Error::param(format!("bad {what} entry {s:?} in {text:?}")))
        })
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::param(format!("empty {what} list")));
    }
    Ok(items)
}

/// `"8,16"` or `"8x4,16x8"`.
pub fn parse_degree_pairs(text: &str) -> Result<Vec<(u32, u32)>> {
    parse_list(text, "degree", |s| match s.split_once('x') {
        Some((n, m)) => Some((n.trim().parse().ok()?, m.trim().parse().ok()?)),
        None => s.parse().ok().map(|n| (n, n)),
    })
}

fn parse_point(text: &str) -> Result<(f64, f64)> {
    let v = parse_list(text, "coordinate", |s| s.parse::<f64>().ok())?;
    match v[..] {
        [x, y] => Ok((x, y)),
        _ => Err(Error::param(format!("expected x,y, got {text:?}"))),
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid == 0 {
        return Err(Error::param("grid resolution must be positive"));
    }
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    match &config.command {
        Command::Pq(a) => pq_table(a),
        Command::Eval(a) => eval_table(a),
        Command::Moments(a) => moments_table(a),
        Command::CentralMoments(a) => central_table(a),
        Command::Korovkin(a) => korovkin_table(a),
        Command::Certify(a) => certify_table(a),
        Command::Voronovskaja(a) => voronovskaja_table(a),
        Command::Selftest => selftest_table(config.seed),
    }
}

/// Runs the command and writes its output; returns the exit status.
pub fn execute(config: &RunConfig) -> i32 {
    let outcome = match run(config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_CHECK_FAILED,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Err(e) = emit(config, &outcome.table) {
        eprintln!("error: {e}");
        return EXIT_CHECK_FAILED;
    }
    outcome.status
}

pub fn emit(config: &RunConfig, table: &Table) -> Result<()> {
    let sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if config.json {
        table.write_json(sink)
    } else {
        table.write_csv(sink)
    }
}

fn pq_table(a: &PairArgs) -> Result<Outcome> {
    let pq = PQPair::new(a.p, a.q)?;
    if a.n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let ints = pq_integers_upto(a.n, &pq);
    let op = UniOperator::new(a.n, pq)?;
    let mut t = Table::new(
        "pq",
        &["k", "pq_integer", "pq_factorial", "pq_binomial", "node"],
    );
    for k in 0..=a.n {
        t.push(vec![
            k.into(),
            ints[k as usize].into(),
            ln_pq_factorial(k, &pq).exp().into(),
            ln_pq_binomial(a.n, k, &pq).exp().into(),
            op.nodes()[k as usize].into(),
        ]);
    }
    Ok(Outcome {
        table: t,
        status: EXIT_OK,
    })
}

fn eval_table(a: &EvalArgs) -> Result<Outcome> {
    check_grid(a.grid)?;
    let f = TargetFunction::resolve(&a.f)?;
    let m = a.m.unwrap_or(a.n);
    let (pq1, pq2) = match &a.schedule {
        Some(s) => {
            let s: ParamSchedule = s.parse()?;
            (s.pair(a.n)?, s.pair(m)?)
        }
        None => {
            let (p, q) = match (a.p, a.q) {
                (Some(p), Some(q)) => (p, q),
                _ => return Err(Error::param("give --p and --q, or --schedule")),
            };
            (
                PQPair::new(p, q)?,
                PQPair::new(a.p2.unwrap_or(p), a.q2.unwrap_or(q))?,
            )
        }
    };
    let op = BiOperator::new(BiParams::new(pq1, pq2, a.n, m)?)?;
    let table = op.tabulate(|s, t| Ok(f.eval(s, t)?))?;
    let mut t = Table::new("eval", &["x", "y", "operator", "target", "abs_error"]);
    let pts = unit_grid(a.grid);
    for &x in &pts {
        for &y in &pts {
            let (wx, wy) = op.weights(&x, &y)?;
            let b = op.apply_tabulated(&wx, &wy, &table);
            let v = f.eval(x, y)?;
            t.push(vec![
                x.into(),
                y.into(),
                b.into(),
                v.into(),
                (b - v).abs().into(),
            ]);
        }
    }
    Ok(Outcome {
        table: t,
        status: EXIT_OK,
    })
}

/// Agreement required between closed forms and direct summation.
const MOMENT_TOL: f64 = 1e-11;

fn moments_table(a: &MomentArgs) -> Result<Outcome> {
    check_grid(a.grid)?;
    let pq = PQPair::new(a.pair.p, a.pair.q)?;
    let op = UniOperator::new(a.pair.n, pq)?;
    let mut t = Table::new(
        "moments",
        &[
            "x",
            "i",
            "closed_form",
            "oracle",
            "abs_diff",
            "statement_form",
        ],
    );
    let mut status = EXIT_OK;
    for x in unit_grid(a.grid) {
        for i in 0..=4u32 {
            let closed = uni_moment_closed(i, a.pair.n, &x, &pq)?;
            let oracle = op.apply_fn(&x, |s| s.powi(i as i32))?;
            let diff = (closed - oracle).abs();
            if diff.is_nan() || diff > MOMENT_TOL {
                status = EXIT_CHECK_FAILED;
            }
            let statement = if i >= 3 {
                Some(uni_moment_variant(i, a.pair.n, &x, &pq)?)
            } else {
                None
            };
            t.push(vec![
                x.into(),
                i.into(),
                closed.into(),
                oracle.into(),
                diff.into(),
                statement.into(),
            ]);
        }
    }
    Ok(Outcome { table: t, status })
}

fn central_table(a: &MomentArgs) -> Result<Outcome> {
    check_grid(a.grid)?;
    let n = a.pair.n;
    let pq = PQPair::new(a.pair.p, a.pair.q)?;
    let op = UniOperator::new(n, pq)?;
    let [a1, a2, a3, a4] = quartic_variant_coefficients(n, &pq);
    let mut t = Table::new(
        "central-moments",
        &[
            "x",
            "r",
            "closed_form",
            "oracle",
            "abs_diff",
            "printed_coefficients",
        ],
    );
    let mut status = EXIT_OK;
    for x in unit_grid(a.grid) {
        for r in [2u32, 4] {
            let closed = uni_central_moment(r, n, &x, &pq)?;
            let oracle = op.apply_fn(&x, |s| (s - x).powi(r as i32))?;
            let diff = (closed - oracle).abs();
            if diff.is_nan() || diff > MOMENT_TOL {
                status = EXIT_CHECK_FAILED;
            }
            let printed = (r == 4).then(|| a1 * x.powi(4) + a2 * x.powi(3) + a3 * x * x + a4 * x);
            t.push(vec![
                x.into(),
                r.into(),
                closed.into(),
                oracle.into(),
                diff.into(),
                printed.into(),
            ]);
        }
    }
    Ok(Outcome { table: t, status })
}

fn korovkin_table(a: &KorovkinArgs) -> Result<Outcome> {
    let f = TargetFunction::resolve(&a.f)?;
    let s1: ParamSchedule = a.schedule.parse()?;
    let s2: ParamSchedule = match &a.schedule2 {
        Some(s) => s.parse()?,
        None => s1.clone(),
    };
    let degrees = parse_degree_pairs(&a.degrees)?;
    let k = korovkin_experiment(&f, &s1, &s2, &degrees, a.grid)?;
    let mut cols = vec!["n", "m", "sup_error"];
    let names: Vec<String> = BiMoment::ALL
        .iter()
        .map(|w| format!("err_{}", w.name()))
        .collect();
    cols.extend(names.iter().map(String::as_str));
    cols.push("warning");
    let mut t = Table::new("korovkin", &cols);
    for r in &k.rows {
        let mut row: Vec<Cell> = vec![r.n.into(), r.m.into(), r.sup_error.into()];
        row.extend(r.test_errors.iter().map(|&e| Cell::from(e)));
        row.push(r.warning.clone().map_or(Cell::Empty, Cell::Text));
        t.push(row);
    }
    Ok(Outcome {
        table: t,
        status: EXIT_OK,
    })
}

fn parse_selection<T, F>(text: &str, all: impl FnOnce() -> Vec<T>, one: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Result<T>,
{
    if text.trim() == "all" {
        return Ok(all());
    }
    text.split(',').map(|s| one(s.trim())).collect()
}

fn certify_table(a: &CertifyArgs) -> Result<Outcome> {
    check_grid(a.grid)?;
    check_grid(a.modulus_grid)?;
    let theorems = parse_selection(&a.theorem, || Theorem::ALL.to_vec(), |s| s.parse())?;
    let functions = if a.f.trim() == "all" {
        TargetFunction::corpus()
    } else if TargetFunction::by_name(a.f.split(',').next().unwrap_or("").trim()).is_some() {
        a.f.split(',')
            .map(|s| {
                TargetFunction::by_name(s.trim())
                    .ok_or_else(|| Error::param(format!("unknown corpus function {s:?}")))
            })
            .collect::<Result<_>>()?
    } else {
        vec![TargetFunction::resolve(&a.f)?]
    };
    let schedules = parse_selection(&a.schedule, ParamSchedule::builtin, |s| s.parse())?;
    let degrees = parse_degree_pairs(&a.degrees)?;
    let lipschitz = match &a.lipschitz {
        Some(s) => {
            let v = parse_list(s, "Lipschitz constant", |x| x.parse::<f64>().ok())?;
            match v[..] {
                [m, a1, a2] => Some(LipschitzSpec::new(m, a1, a2)?),
                _ => return Err(Error::param("expected --lipschitz M,a1,a2")),
            }
        }
        None => None,
    };
    let opts = CertifyOptions {
        grid: a.grid,
        modulus_grid: a.modulus_grid,
        k_grid: a.modulus_grid,
        lipschitz,
        assume_c1: a.assume_c1,
        ..Default::default()
    };
    let mut t = Table::new(
        "certify",
        &[
            "theorem",
            "function",
            "schedule",
            "n",
            "m",
            "status",
            "lhs",
            "rhs",
            "rhs_envelope",
            "rhs_variant",
            "margin",
            "pointwise_pass",
            "uniform_pass",
            "strict_pass",
            "variant_pass",
            "worst_x",
            "worst_y",
            "note",
        ],
    );
    let mut status = EXIT_OK;
    for f in &functions {
        let certifier = Certifier::new(f, opts.clone());
        for s in &schedules {
            for &(n, m) in &degrees {
                let params = BiParams::new(s.pair(n)?, s.pair(m)?, n, m)?;
                let results = certifier.certify_all(&theorems, &params)?;
                for (th, r) in theorems.iter().zip(results) {
                    let head: Vec<Cell> = vec![
                        th.id().into(),
                        f.name().into(),
                        s.name().into(),
                        n.into(),
                        m.into(),
                    ];
                    let row = match r {
                        Ok(c) => {
                            let note = match c.counterexample() {
                                Some((x, y)) => format!("counterexample at ({x}, {y})"),
                                None => String::new(),
                            };
                            if !c.pass {
                                status = EXIT_CHECK_FAILED;
                            }
                            let tail: Vec<Cell> = vec![
                                if c.pass { "pass" } else { "fail" }.into(),
                                c.lhs.into(),
                                c.rhs.into(),
                                c.rhs_envelope.into(),
                                c.rhs_variant.into(),
                                c.margin.into(),
                                c.pointwise_pass.into(),
                                c.uniform_pass.into(),
                                c.strict_pass.into(),
                                c.variant_pass.into(),
                                c.worst_point.0.into(),
                                c.worst_point.1.into(),
                                note.into(),
                            ];
                            head.into_iter().chain(tail).collect()
                        }
                        Err(Error::Hypothesis { reason, .. }) => {
                            let mut row = head;
                            row.push("skip".into());
                            row.extend(std::iter::repeat_n(Cell::Empty, 11));
                            row.push(format!("hypothesis not met: {reason}").into());
                            row
                        }
                        Err(e) => return Err(e),
                    };
                    t.push(row);
                }
            }
        }
    }
    Ok(Outcome { table: t, status })
}

fn voronovskaja_table(a: &VoronovskajaArgs) -> Result<Outcome> {
    let schedule: ParamSchedule = a.schedule.parse()?;
    let degrees: Vec<u32> = match &a.degrees {
        Some(d) => parse_list(d, "degree", |s| s.parse().ok())?,
        None => default_degrees(),
    };
    if let Some(order) = &a.moment_order {
        let order: u32 = order
            .parse()
            .map_err(|_| Error::param("moment order must be 2 or 4"))?;
        let tr = scaled_central_moment_limit_check(order, &schedule, a.x, &degrees)?;
        let mut t = Table::new(
            "voronovskaja",
            &[
                "n",
                "scaled_value",
                "predicted_limit",
                "refined_limit",
                "abs_error",
            ],
        );
        for i in 0..tr.degrees.len() {
            t.push(vec![
                tr.degrees[i].into(),
                tr.scaled_values[i].into(),
                tr.predicted_limit.into(),
                tr.refined_limit.into(),
                tr.abs_errors[i].into(),
            ]);
        }
        return Ok(Outcome {
            table: t,
            status: EXIT_OK,
        });
    }
    let f = TargetFunction::resolve(&a.f)?;
    let point = parse_point(&a.point)?;
    let allow_fd = a.fd || f.as_builtin().is_none();
    let tr = voronovskaja_trace(&f, &schedule, point, &degrees, allow_fd)?;
    let rich = tr.richardson();
    let errs = tr.abs_errors();
    let mut t = Table::new(
        "voronovskaja",
        &[
            "n",
            "bracket",
            "scaled_value",
            "predicted_limit",
            "abs_error",
            "richardson",
        ],
    );
    for (i, &n) in tr.degrees.iter().enumerate() {
        let bracket = crate::pq_core::pq_integer(n, &schedule.pair(n)?);
        let last = i + 1 == tr.degrees.len();
        t.push(vec![
            n.into(),
            bracket.into(),
            tr.scaled_values[i].into(),
            tr.predicted_limit.into(),
            errs[i].into(),
            if last { rich.into() } else { Cell::Empty },
        ]);
    }
    Ok(Outcome {
        table: t,
        status: EXIT_OK,
    })
}

fn selftest_table(seed: u64) -> Result<Outcome> {
    let checks = run_selftest(seed)?;
    let mut t = Table::new("selftest", &["check", "status", "detail"]);
    let mut status = EXIT_OK;
    for c in checks {
        if c.status == Status::Fail {
            status = EXIT_CHECK_FAILED;
        }
        t.push(vec![c.name.into(), c.status.name().into(), c.detail.into()]);
    }
    Ok(Outcome { table: t, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("pqbern").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn degree_lists() {
        assert_eq!(
            parse_degree_pairs("8, 16x4").unwrap(),
            vec![(8, 8), (16, 4)]
        );
        assert!(parse_degree_pairs("8,,16").is_err());
        assert!(parse_degree_pairs("eight").is_err());
    }

    #[test]
    fn moments_agree_with_oracle() {
        let o = run(&cfg(&["moments", "--n", "10", "--p", "0.9", "--q", "0.6"])).unwrap();
        assert_eq!(o.status, EXIT_OK);
        let c = o.table.column("abs_diff").unwrap();
        for row in &o.table.rows {
            match row[c] {
                Cell::Num(v) => assert!(v <= 1e-11),
                _ => panic!("missing diff"),
            }
        }
    }

    #[test]
    fn eval_constant_column() {
        let o = run(&cfg(&[
            "eval", "--f", "1", "--n", "5", "--m", "5", "--p", "0.9", "--q", "0.5",
        ]))
        .unwrap();
        for row in &o.table.rows {
            assert_eq!(row[2], Cell::Num(1.0));
        }
    }

    #[test]
    fn invalid_parameters_are_errors() {
        assert!(run(&cfg(&["pq", "--n", "5", "--p", "0.5", "--q", "0.9"])).is_err());
        assert!(run(&cfg(&[
            "eval", "--f", "x+", "--n", "5", "--p", "0.9", "--q", "0.5"
        ]))
        .is_err());
        assert!(RunConfig::try_parse_from(["pqbern", "moments", "--n", "x"]).is_err());
    }
}
