//! `tensim`: products, similarity transforms, witness checks, similarity
//! decisions and characteristic polynomials on JSON tensor files.
//!
//! Exactly one JSON document goes to stdout per run; a one-line summary
//! goes to stderr. Exit codes: 0 success, 1 negative answer, 2 usage or
//! input error, 3 numeric failure.

mod args;
mod demo;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use tensim::io::{
    charpoly_to_json, complex_pair, parse_matrix, parse_structured_witness, parse_tensor, parse_witness,
    structured_witness_to_json, tensor_to_json, TensorFormat,
};
use tensim::{
    char_poly_dim2, check_unit_preserving_with, compose_witness, decide_similar, decompose_witness_with,
    diagonal_transform, general_product, general_transform_with, permutation_transform, similarity_invariants,
    spectral::poly_roots, CTensor, CWitness, DiagonalScaling, Error, Permutation, Tolerances, COMPARE_TOL,
    STRUCTURAL_TOL,
};

#[derive(Parser)]
#[command(name = "tensim", version, about = "Tensor products, similarity and similarity invariants")]
struct Cli {
    /// Threshold below which a witness entry counts as zero.
    #[arg(long, global = true, default_value_t = STRUCTURAL_TOL)]
    tol_structural: f64,
    /// Tolerance when comparing a witness with its recomposition.
    #[arg(long, global = true, default_value_t = COMPARE_TOL)]
    tol_compare: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// General product A B of two tensor files.
    Product {
        a: PathBuf,
        b: PathBuf,
        /// Write the tensor here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sparse: bool,
    },
    /// Diagonal transform by --diag, then relabeling by --perm; or a full witness.
    ///
    /// --perm "s1,s2,..." maps A to R A R^T with B[i1..im] = A[s(i1)..s(im)].
    /// --diag "d1,d2,..." maps A to D^(1-m) A D; entries are re, re+imi or imi.
    /// --witness takes a {"m","P","Q"} file, a {"m","sigma","d"} file, or the
    /// output of `decide`, and applies B = P A Q.
    Transform {
        a: PathBuf,
        // full path: one flag parsed into a list, not a repeated flag
        #[arg(long, allow_hyphen_values = true, value_parser = args::parse_perm)]
        perm: Option<::std::vec::Vec<usize>>,
        #[arg(long, allow_hyphen_values = true, value_parser = args::parse_diag)]
        diag: Option<::std::vec::Vec<Complex64>>,
        #[arg(long, conflicts_with_all = ["perm", "diag"])]
        witness: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sparse: bool,
    },
    /// Unit-preservation and structural checks for a witness pair.
    CheckWitness {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Factor a witness pair as a relabeling and a diagonal scaling.
    Decompose {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Decide whether B = P A Q for some unit-preserving witness.
    Decide {
        a: PathBuf,
        b: PathBuf,
        /// Entries below this magnitude are treated as zero.
        #[arg(long, default_value_t = 1e-12)]
        clean_eps: f64,
    },
    /// Similarity invariants of a tensor of order >= 3.
    Invariants {
        a: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        clean_eps: f64,
    },
    /// Characteristic polynomial and spectrum of a dimension-2 tensor.
    Charpoly { a: PathBuf },
    /// Built-in worked examples.
    Demo { name: DemoName },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    #[value(name = "remark-3-4")]
    Nnz,
    #[value(name = "remark-3-7")]
    Diagonalizable,
    #[value(name = "remark-3-10")]
    Triangular,
}

/// Result of one command.
struct Outcome {
    code: u8,
    doc: Value,
    summary: String,
}

impl Outcome {
    fn new(code: u8, doc: Value, summary: impl Into<String>) -> Self {
        Outcome { code, doc, summary: summary.into() }
    }
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Io(..) => "io",
            Failure::Lib(e) => match e {
                Error::InvalidOrder { .. } => "invalid_order",
                Error::ZeroDimension => "zero_dimension",
                Error::DimensionMismatch { .. } => "dimension_mismatch",
                Error::TooLarge { .. } => "too_large",
                Error::LengthMismatch { .. } => "length_mismatch",
                Error::IndexOutOfRange { .. } => "index_out_of_range",
                Error::OrderOutOfRange { .. } => "order_out_of_range",
                Error::NotUnitPreserving => "not_unit_preserving",
                Error::MalformedWitnessRow { .. } => "malformed_witness_row",
                Error::InconsistentWitness { .. } => "inconsistent_witness",
                Error::ZeroScaling { .. } => "zero_scaling",
                Error::InvalidPermutation(_) => "invalid_permutation",
                Error::UnsupportedDimension { .. } => "unsupported_dimension",
                Error::SearchTooLarge { .. } => "search_too_large",
                Error::NoConvergence { .. } => "no_convergence",
                Error::ZeroVector => "zero_vector",
                Error::Format(_) => "format",
                Error::Json(_) => "json",
            },
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::NotUnitPreserving | Error::MalformedWitnessRow { .. }) => 1,
            Failure::Lib(Error::InconsistentWitness { .. } | Error::NoConvergence { .. }) => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Lib(e) => e.to_string(),
        }
    }

    fn outcome(&self) -> Outcome {
        let message = self.message();
        Outcome::new(self.code(), json!({"error": {"kind": self.kind(), "message": message}}), message)
    }
}

type Run = std::result::Result<Outcome, Failure>;

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
    Ok(serde_json::from_str(&text)?)
}

fn read_tensor(path: &Path) -> std::result::Result<CTensor, Failure> {
    Ok(parse_tensor(&read_json(path)?)?)
}

fn read_pair(p: &Path, q: &Path, m: usize) -> std::result::Result<CWitness, Failure> {
    Ok(CWitness::new(parse_matrix(&read_json(p)?)?, parse_matrix(&read_json(q)?)?, m)?)
}

fn format_of(sparse: bool) -> TensorFormat {
    if sparse {
        TensorFormat::Sparse
    } else {
        TensorFormat::Dense
    }
}

/// The tensor document itself, or a pointer to the file it went to.
fn emit_tensor(t: &CTensor, sparse: bool, out: Option<&Path>, what: &str) -> Run {
    let doc = tensor_to_json(t, format_of(sparse))?;
    let summary = format!("{what}: order {}, dimension {}", t.order(), t.dim());
    match out {
        None => Ok(Outcome::new(0, doc, summary)),
        Some(path) => {
            let text = serde_json::to_string_pretty(&doc)? + "\n";
            fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
            let pointer = json!({"output": path.display().to_string(), "order": t.order(), "dim": t.dim()});
            Ok(Outcome::new(0, pointer, format!("{summary}, written to {}", path.display())))
        }
    }
}

/// Accepts a plain witness, a structured witness, or a `decide` result.
fn read_witness(path: &Path) -> std::result::Result<CWitness, Failure> {
    let mut v = read_json(path)?;
    if let Some(inner) = v.get("witness") {
        if inner.is_null() {
            return Err(Error::Format("the decide result holds no witness".into()).into());
        }
        v = inner.clone();
    }
    if v.get("sigma").is_some() {
        Ok(compose_witness(&parse_structured_witness(&v)?)?)
    } else {
        Ok(parse_witness(&v)?)
    }
}

fn product(a: &Path, b: &Path, out: Option<&Path>, sparse: bool) -> Run {
    let c = general_product(&read_tensor(a)?, &read_tensor(b)?)?;
    emit_tensor(&c, sparse, out, "product")
}

struct TransformArgs<'a> {
    perm: Option<&'a [usize]>,
    diag: Option<&'a [Complex64]>,
    witness: Option<&'a Path>,
}

fn transform(a: &Path, t: TransformArgs, tol: &Tolerances, out: Option<&Path>, sparse: bool) -> Run {
    let mut x = read_tensor(a)?;
    if let Some(path) = t.witness {
        let w = read_witness(path)?;
        let b = general_transform_with(&x, &w, tol.structural)?;
        return emit_tensor(&b, sparse, out, "transform");
    }
    if let Some(d) = t.diag {
        x = diagonal_transform(&x, &DiagonalScaling::new(d.to_vec())?)?;
    }
    if let Some(p) = t.perm {
        x = permutation_transform(&x, &Permutation::from_one_based(p)?)?;
    }
    emit_tensor(&x, sparse, out, "transform")
}

fn report_json<R: Into<f64> + Copy>(r: &tensim::Lemma21Report<R>) -> Value {
    json!({
        "passed": r.passed(),
        "off_slices_vanish": r.off_slices_vanish,
        "first_violation": r.first_violation,
        "max_off_slice": r.max_off_slice.into(),
        "left_inverse": r.left_inverse,
        "max_left_inverse_error": r.max_left_inverse_error.into(),
    })
}

fn check_witness(p: &Path, q: &Path, m: usize, tol: &Tolerances) -> Run {
    let w = read_pair(p, q, m)?;
    let unit_preserving = check_unit_preserving_with(&w, tol.structural)?;
    let lemma = if m >= 3 { Some(tensim::verify_lemma21_with(&w, tol.structural)?) } else { None };
    let gp_p = w.p.is_generalized_permutation(tol.structural);
    let gp_q = w.q.is_generalized_permutation(tol.structural);
    let passed = unit_preserving && lemma.as_ref().is_none_or(|r| r.passed());
    let doc = json!({
        "m": m,
        "unit_preserving": unit_preserving,
        "structure": lemma.as_ref().map(report_json),
        "generalized_permutation": {"P": gp_p, "Q": gp_q},
        "passed": passed,
    });
    let summary = if passed {
        "witness is unit-preserving".to_string()
    } else if !unit_preserving {
        "witness is not unit-preserving".to_string()
    } else {
        "witness failed a structural check".to_string()
    };
    Ok(Outcome::new(if passed { 0 } else { 1 }, doc, summary))
}

fn decompose(p: &Path, q: &Path, m: usize, tol: &Tolerances) -> Run {
    let s = decompose_witness_with(&read_pair(p, q, m)?, tol)?;
    let summary = format!("sigma = {:?}", s.sigma.to_one_based());
    Ok(Outcome::new(0, structured_witness_to_json(&s)?, summary))
}

fn decide(a: &Path, b: &Path, eps: f64) -> Run {
    let a = read_tensor(a)?.clean(eps);
    let b = read_tensor(b)?.clean(eps);
    match decide_similar(&a, &b)? {
        Some(s) => {
            let rebuilt = general_transform_with(&a, &compose_witness(&s)?, STRUCTURAL_TOL)?;
            let err = rebuilt.max_relative_diff(&b)?;
            let doc = json!({"similar": true, "witness": structured_witness_to_json(&s)?, "reconstruction_error": err});
            Ok(Outcome::new(0, doc, format!("similar (reconstruction error {err:.3e})")))
        }
        None => {
            let doc = json!({"similar": false, "witness": null, "reconstruction_error": null});
            Ok(Outcome::new(1, doc, "not similar"))
        }
    }
}

fn invariants(a: &Path, eps: f64) -> Run {
    let r = similarity_invariants(&read_tensor(a)?.clean(eps))?;
    let doc = json!({
        "order": r.order,
        "dim": r.dim,
        "nnz": r.nnz,
        "pattern_hash": r.pattern_hash,
        "hash_omitted": r.hash_omitted,
        "diagonal": r.diagonal,
        "triangularizable": r.triangularizable,
    });
    let summary = format!("nnz {}, diagonal {}", r.nnz, r.diagonal);
    Ok(Outcome::new(0, doc, summary))
}

fn charpoly(a: &Path) -> Run {
    let phi = char_poly_dim2(&read_tensor(a)?)?;
    if phi.is_zero() {
        let doc = json!({"charpoly": charpoly_to_json(&phi)?, "spectrum": [], "degenerate": true});
        return Ok(Outcome::new(3, doc, "characteristic polynomial vanished identically"));
    }
    let roots = poly_roots(phi.coeffs())?;
    let spectrum = roots.iter().map(complex_pair).collect::<tensim::Result<Vec<_>>>()?;
    let doc = json!({"charpoly": charpoly_to_json(&phi)?, "spectrum": spectrum, "degenerate": false});
    Ok(Outcome::new(0, doc, format!("degree {}", phi.degree())))
}

fn run_demo(name: DemoName) -> Run {
    let d = match name {
        DemoName::Nnz => demo::nnz_not_invariant(),
        DemoName::Diagonalizable => demo::diagonal_contrast(),
        DemoName::Triangular => demo::triangular_obstruction(),
    }?;
    Ok(Outcome::new(if d.holds { 0 } else { 3 }, d.doc, d.summary))
}

fn dispatch(cli: Cli) -> Run {
    let tol = Tolerances { structural: cli.tol_structural, compare: cli.tol_compare };
    match cli.command {
        Command::Product { a, b, out, sparse } => product(&a, &b, out.as_deref(), sparse),
        Command::Transform { a, perm, diag, witness, out, sparse } => {
            let t = TransformArgs { perm: perm.as_deref(), diag: diag.as_deref(), witness: witness.as_deref() };
            transform(&a, t, &tol, out.as_deref(), sparse)
        }
        Command::CheckWitness { p, q, m } => check_witness(&p, &q, m, &tol),
        Command::Decompose { p, q, m } => decompose(&p, &q, m, &tol),
        Command::Decide { a, b, clean_eps } => decide(&a, &b, clean_eps),
        Command::Invariants { a, clean_eps } => invariants(&a, clean_eps),
        Command::Charpoly { a } => charpoly(&a),
        Command::Demo { name } => run_demo(name),
    }
}

fn main() -> ExitCode {
    let outcome = match Cli::try_parse() {
        Ok(cli) => dispatch(cli).unwrap_or_else(|f| f.outcome()),
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let head = message.split("\n\nUsage:").next().unwrap_or_default();
            let brief = head.trim_start_matches("error: ").split_whitespace().collect::<Vec<_>>().join(" ");
            Outcome::new(2, json!({"error": {"kind": "usage", "message": brief}}), message.trim_end().to_string())
        }
    };
    match serde_json::to_string_pretty(&outcome.doc) {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    }
    eprintln!("{}", outcome.summary);
    ExitCode::from(outcome.code)
}
