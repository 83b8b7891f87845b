//! The `chfi` command line. Every command prints (or atomically writes)
//! one canonical JSON document and exits with
//! 0 ok, 1 identity fails or no solution, 2 usage/parse error,
//! 3 internal error, 4 resource cap.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fisolve::{
    check_fi, commuting_trace_form, decompose_two_sided, eval_trace_form, expand_gpi_sum,
    oracle_decompose, solve_one_sided, to_gpi_sum, trace_of_map, FISpec,
};
use crate::gpi::{ch_poly, noncentral_part, polarized_ch};
use crate::io::{to_canonical_json, write_atomic, Problem, ProblemFile, SCHEMA_VERSION};
use crate::modgb::{
    buchberger, build_g_families_kl, determinantal_generators, multilinear_chains,
    multilinear_determinantal_generators, stacked_generic, BuchbergerOptions, FamilyKind,
};
use crate::poly::{rat, Poly};
use crate::symmat::{build_xi, PolyMatrix};

const MAX_N: usize = 3;
const MAX_M: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "chfi",
    version,
    about = "Exact Cayley-Hamilton and functional identities on n x n rational matrices"
)]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cross-check solver output by an independent route.
    #[arg(long, global = true)]
    oracle: bool,
    /// Lift the default caps n ≤ 3, m ≤ 5.
    #[arg(long, global = true)]
    allow_large: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print q_n, Q_n or its noncentral part.
    Qn {
        #[arg(long)]
        n: usize,
        #[arg(long, group = "form")]
        polarized: bool,
        #[arg(long, group = "form")]
        noncentral: bool,
        #[arg(long, group = "form")]
        scalar: bool,
    },
    /// Verify the identity in --input on generic matrices.
    Check,
    /// Solve the problem in --input.
    Solve {
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Gröbner basis of a row module or of its determinantal syzygies.
    Groebner {
        #[arg(long, value_enum)]
        rows: Rows,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        multilinear_only: bool,
        #[arg(long, default_value_t = 20_000)]
        max_elements: usize,
    },
    /// Determinantal syzygy generators or the G'/G'' families.
    SyzygyGens {
        #[arg(long, value_enum, default_value = "determinantal")]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// K for the G' family (default: 1..=m).
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        /// L for the G'' family (default: 1..=m).
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Left,
    TwoSided,
    TraceForm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rows {
    Xi,
    Generic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Determinantal,
    GFamilies,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IdentityFails | Error::NoSolution(_) => 1,
        Error::OutOfBounds(_)
        | Error::Dimension(_)
        | Error::Malformed(_)
        | Error::NotMultilinear(_)
        | Error::Json(_)
        | Error::Io(_) => 2,
        Error::Internal(_) => 3,
        Error::ResourceCap(_) => 4,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::Internal(format!("thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    match outcome.and_then(|(doc, code)| emit(&cli.global, &doc).map(|_| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(g: &Global, doc: &Value) -> Result<()> {
    let text = to_canonical_json(doc)?;
    match &g.output {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn envelope(command: &str, mut body: Value) -> Value {
    body["schema"] = json!(SCHEMA_VERSION);
    body["command"] = json!(command);
    body
}

fn caps(g: &Global, n: usize, m: Option<usize>) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfBounds("n must be ≥ 1".into()));
    }
    if g.allow_large {
        return Ok(());
    }
    if n > MAX_N {
        return Err(Error::ResourceCap(format!(
            "n = {n} exceeds the default cap {MAX_N}; pass --allow-large to override"
        )));
    }
    if let Some(m) = m.filter(|&m| m > MAX_M) {
        return Err(Error::ResourceCap(format!(
            "m = {m} exceeds the default cap {MAX_M}; pass --allow-large to override"
        )));
    }
    Ok(())
}

fn load(g: &Global) -> Result<Problem> {
    let path = g
        .input
        .as_ref()
        .ok_or_else(|| Error::Malformed("this command needs --input".into()))?;
    Ok(ProblemFile::read(path)?.problem)
}

fn execute(cli: &Cli) -> Result<(Value, i32)> {
    let g = &cli.global;
    match &cli.command {
        Command::Qn {
            n,
            noncentral,
            scalar,
            ..
        } => {
            caps(g, *n, None)?;
            let (form, poly) = if *scalar {
                ("scalar", ch_poly(*n)?)
            } else if *noncentral {
                ("noncentral", noncentral_part(*n))
            } else {
                ("polarized", polarized_ch(*n))
            };
            let body = json!({
                "n": n,
                "form": form,
                "text": poly.to_string(),
                "genpoly": poly,
            });
            Ok((envelope("qn", body), 0))
        }
        Command::Check => cmd_check(g),
        Command::Solve { mode } => cmd_solve(g, *mode),
        Command::Groebner {
            rows,
            n,
            m,
            multilinear_only,
            max_elements,
        } => cmd_groebner(g, *rows, *n, *m, *multilinear_only, *max_elements),
        Command::SyzygyGens { family, n, m, k, l } => {
            caps(g, *n, Some(*m))?;
            let all: Vec<usize> = (1..=*m).collect();
            let body = match family {
                Family::Determinantal => {
                    let chains = multilinear_chains(*n, *m)?;
                    json!({
                        "family": "determinantal",
                        "n": n,
                        "m": m,
                        "generators": chains
                            .into_iter()
                            .map(|(c, e)| json!({"chain": c, "element": e}))
                            .collect::<Vec<_>>(),
                    })
                }
                Family::GFamilies => {
                    let k = k.clone().unwrap_or_else(|| all.clone());
                    let l = l.clone().unwrap_or_else(|| all.clone());
                    if k.iter().chain(&l).any(|&i| i == 0 || i > *m) {
                        return Err(Error::OutOfBounds(format!("indices must lie in 1..={m}")));
                    }
                    let (gp, gpp) = build_g_families_kl(*n, &k, &l)?;
                    let fam = |v: Vec<crate::modgb::FamilyElement>| -> Vec<Value> {
                        v.into_iter()
                            .map(|e| {
                                json!({
                                    "kind": match e.kind {
                                        FamilyKind::Prime => "prime",
                                        FamilyKind::DoublePrime => "double_prime",
                                    },
                                    "fixed": e.fixed,
                                    "set": e.set,
                                    "tuple": e.tuple,
                                    "element": e.element,
                                    "expression": e.expression,
                                })
                            })
                            .collect()
                    };
                    json!({
                        "family": "g_families",
                        "n": n,
                        "m": m,
                        "K": k,
                        "L": l,
                        "prime": fam(gp),
                        "double_prime": fam(gpp),
                    })
                }
            };
            Ok((envelope("syzygy-gens", body), 0))
        }
    }
}

/// Evaluates `Σ F_k A_k − Σ A_l G_l` at random integer matrices.
fn spot_check(spec: &FISpec, seed: u64, points: usize) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n;
    for _ in 0..points {
        let vals: Vec<Vec<i64>> = (0..=spec.m)
            .map(|_| (0..n * n).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let at = |v: crate::poly::VarId| {
            Some(rat(vals[v.k as usize][(v.i as usize - 1) * n + v.j as usize - 1]))
        };
        let a = |k: usize| {
            let mut out = PolyMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    out.set(i, j, Poly::constant(rat(vals[k][i * n + j])));
                }
            }
            out
        };
        let mut r = PolyMatrix::zeros(n, n);
        for (&k, h) in &spec.f {
            r.add_assign(&h.map(|p| p.substitute_values(&at)).checked_mul(&a(k))?);
        }
        for (&l, h) in &spec.g {
            r.sub_assign(&a(l).checked_mul(&h.map(|p| p.substitute_values(&at)))?);
        }
        if !r.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cmd_check(g: &Global) -> Result<(Value, i32)> {
    match load(g)? {
        Problem::Trace { n, r, t } => {
            caps(g, n, Some(r + 1))?;
            let tr = trace_of_map(&t);
            let x = PolyMatrix::generic(1, n)?;
            let res = tr.checked_mul(&x)?.checked_sub(&x.checked_mul(&tr)?)?;
            let holds = res.is_zero();
            let body = json!({"kind": "trace", "commuting": holds, "holds": holds, "residual": res});
            Ok((envelope("check", body), if holds { 0 } else { 1 }))
        }
        p => {
            let spec = p.to_fi()?;
            caps(g, spec.n, Some(spec.m))?;
            let c = check_fi(&spec)?;
            let spot = spot_check(&spec, g.seed, 3)?;
            if spot != c.holds {
                return Err(Error::Internal("symbolic and numeric checks disagree".into()));
            }
            let body = json!({
                "kind": "fi",
                "holds": c.holds,
                "residual": c.residual,
                "spot_check": {"seed": g.seed, "points": 3, "zero": spot},
            });
            Ok((envelope("check", body), if c.holds { 0 } else { 1 }))
        }
    }
}

fn cmd_solve(g: &Global, mode: Mode) -> Result<(Value, i32)> {
    let problem = load(g)?;
    let body = match mode {
        Mode::Left => {
            let spec = problem.to_fi()?;
            caps(g, spec.n, Some(spec.m))?;
            if !check_fi(&spec)?.holds {
                return Err(Error::IdentityFails);
            }
            let sol = solve_one_sided(&spec)?;
            let gpi = to_gpi_sum(&sol);
            if g.oracle && expand_gpi_sum(&gpi, spec.n, spec.m)? != spec.f {
                return Err(Error::Internal("GPI sum does not expand to the input".into()));
            }
            json!({"mode": "left", "oracle": g.oracle, "solution": sol, "gpi_sum": gpi})
        }
        Mode::TwoSided => {
            let spec = problem.to_fi()?;
            caps(g, spec.n, Some(spec.m))?;
            if !check_fi(&spec)?.holds {
                return Err(Error::IdentityFails);
            }
            let d = decompose_two_sided(&spec)?;
            d.verify(&spec)?;
            if g.oracle && oracle_decompose(&spec)?.is_none() {
                return Err(Error::Internal("oracle finds no decomposition".into()));
            }
            json!({
                "mode": "two-sided",
                "oracle": g.oracle,
                "standard": d.is_standard(),
                "decomposition": d,
            })
        }
        Mode::TraceForm => {
            let Problem::Trace { n, r, t } = problem else {
                return Err(Error::Malformed("trace-form needs a trace problem".into()));
            };
            caps(g, n, Some(r + 1))?;
            let tf = commuting_trace_form(&t, n, r)?;
            if g.oracle && eval_trace_form(&tf)? != trace_of_map(&t) {
                return Err(Error::Internal("standard form does not reproduce T".into()));
            }
            json!({"mode": "trace-form", "oracle": g.oracle, "trace_form": tf})
        }
    };
    Ok((envelope("solve", body), 0))
}

fn cmd_groebner(
    g: &Global,
    rows: Rows,
    n: usize,
    m: usize,
    multilinear: bool,
    max_elements: usize,
) -> Result<(Value, i32)> {
    caps(g, n, Some(m))?;
    let mut options = if multilinear {
        BuchbergerOptions::multilinear()
    } else {
        BuchbergerOptions::default()
    };
    options.max_elements = Some(max_elements);
    let (name, gens) = match rows {
        Rows::Xi => {
            let all: Vec<usize> = (1..=m).collect();
            ("xi", build_xi(&all, &all, n)?.row_elements())
        }
        Rows::Generic if multilinear => {
            options = options.with_position_groups(
                (0..n * m).map(|p| (p / n + 1) as u16).collect(),
            );
            ("generic", multilinear_determinantal_generators(n, m)?)
        }
        Rows::Generic => ("generic", determinantal_generators(&stacked_generic(n, m)?)?),
    };
    let count = gens.iter().filter(|e| !e.is_zero()).count();
    let basis = buchberger(gens, options)?;
    let elements: Vec<Value> = basis
        .elements
        .iter()
        .zip(&basis.expressions)
        .map(|(e, x)| json!({"element": e, "expression": x}))
        .collect();
    let body = json!({
        "rows": name,
        "n": n,
        "m": m,
        "multilinear_only": multilinear,
        "generators": count,
        "added": basis.len() - count,
        "elements": elements,
    });
    Ok((envelope("groebner", body), 0))
}
