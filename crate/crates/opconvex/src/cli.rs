//! Command-line frontend: spec parsing, evaluations, face queries,
//! decompositions and sweeps, measure fitting, and randomized matrix
//! verification.
//!
//! Exit codes: 0 success, 2 usage error, 3 precondition violation,
//! 4 verification witness found.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decompose::{decomposition_range, extremal_decomposition};
use crate::error::{Error, Result};
use crate::faces::{is_maximal, is_simplicial, member, smallest_closed_face};
use crate::interval::{affine_transport, boundary_rep_i, identity_check_i, membership_i, SourceFunction};
use crate::matcalc::convexity_witness_search;
use crate::ocfun::OcFunction;
use crate::param::ExtendedParam;
use crate::recover::{fit_measure, lambda_grid, SampleSet};
use crate::specfile::{
    parse_face, parse_face_i, parse_spec_str, spec_from_function,
    spec_from_interval_function, ParsedFunction, ParsedSpec,
};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 2;
const EXIT_PRECONDITION: i32 = 3;
const EXIT_WITNESS: i32 = 4;

#[derive(Parser)]
#[command(
    name = "opconvex",
    version,
    about = "Conic calculus of non-negative operator convex functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Machine,
}

#[derive(Args)]
struct Common {
    /// Output format: human text, CSV (where applicable), or machine JSON
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write the output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a spec'd function at a point
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        at: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary data: limits at the domain ends and their side conditions
    Boundary {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Support of the canonical representing measure
    Sigma {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Face membership: does the function lie in the given closed face?
    Member {
        #[arg(long)]
        spec: PathBuf,
        /// Face expression, e.g. "F(1,{3})" or "E({0..2,inf})"
        #[arg(long)]
        face: String,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest closed face, simpliciality, and maximality
    Face {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Anchor range of the tangent family, plus one decomposition if --alpha
    Decompose {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// CSV sweep of the extremal decompositions over the anchor range
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Number of anchor values
        #[arg(long, default_value_t = 33)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fit canonical data to samples (CSV lines "x,y") by non-negative least squares
    Fit {
        #[arg(long)]
        samples: PathBuf,
        /// Number of interior λ-grid nodes
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized matrix-convexity verification; exits 4 on a witness
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Matrix order
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// RNG seed (default: OPCONVEX_SEED env var, else 0)
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// The involution f ↦ x·f(1/x) in canonical data
    Tau {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Max gap of the (−1,1) extreme-element identity at a parameter
    IntervalIdentity {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary representation of a (−1,1) member vanishing at ±1
    IntervalBoundary {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Transport a closed-form function on (a, b) to the interval (−1, 1)
    IntervalTransport {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Quadratic source "c0,c1,c2"
        #[arg(long, conflicts_with = "extreme", allow_hyphen_values = true)]
        poly2: Option<String>,
        /// Extreme source "alpha,lambda" for (y−alpha)²/(1−lambda·y)
        #[arg(long, allow_hyphen_values = true)]
        extreme: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// A command outcome: human summary plus the machine-readable section that
/// backs every number in it, and optionally a CSV body.
struct Report {
    human: String,
    machine: Value,
    csv: Option<String>,
}

impl Report {
    fn new(human: String, machine: Value) -> Self {
        Report {
            human,
            machine,
            csv: None,
        }
    }
}

/// 12 significant digits, plain decimal where reasonable.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let digits = (11 - exp).max(0) as usize;
        format!("{:.*}", digits, v)
    } else {
        format!("{:.11e}", v)
    }
}

/// Parameter display at 12 significant digits ("inf" for the point at ∞).
fn param12(p: &ExtendedParam) -> String {
    match p {
        ExtendedParam::Finite(v) => sig12(*v),
        ExtendedParam::Infinity => "inf".into(),
    }
}

/// JSON for possibly-infinite values ("inf" where JSON has no number).
fn num_or_inf(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn load_spec(path: &Path) -> Result<ParsedSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_spec_str(&text)
}

fn require_halfline(spec: ParsedSpec) -> Result<(String, OcFunction)> {
    match spec.function {
        ParsedFunction::HalfLine(f) => Ok((spec.name, f)),
        ParsedFunction::Interval(_) => Err(Error::OutOfRange(
            "this subcommand needs a (0, inf) spec, got an interval-* one".into(),
        )),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (common, result) = dispatch(cli.command);
    match result {
        Ok((report, code)) => match emit(&report, &common) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_PRECONDITION
        }
    }
}

fn emit(report: &Report, common: &Common) -> Result<()> {
    let body = match common.format {
        OutputFormat::Text => report.human.clone(),
        OutputFormat::Machine => {
            serde_json::to_string_pretty(&report.machine).expect("JSON output") + "\n"
        }
        OutputFormat::Csv => report
            .csv
            .clone()
            .ok_or_else(|| Error::Parse("this subcommand has no CSV output".into()))?,
    };
    match &common.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> (Common, Result<(Report, i32)>) {
    match command {
        Command::Eval { spec, at, common } => (common, cmd_eval(&spec, at)),
        Command::Boundary { spec, common } => (common, cmd_boundary(&spec)),
        Command::Sigma { spec, common } => (common, cmd_sigma(&spec)),
        Command::Member { spec, face, common } => (common, cmd_member(&spec, &face)),
        Command::Face { spec, common } => (common, cmd_face(&spec)),
        Command::Decompose { spec, alpha, common } => (common, cmd_decompose(&spec, alpha)),
        Command::Sweep { spec, grid, common } => (common, cmd_sweep(&spec, grid)),
        Command::Fit {
            samples,
            grid,
            tol,
            common,
        } => (common, cmd_fit(&samples, grid, tol)),
        Command::Verify {
            spec,
            n,
            trials,
            seed,
            common,
        } => (common, cmd_verify(&spec, n, trials, seed)),
        Command::Tau { spec, common } => (common, cmd_tau(&spec)),
        Command::IntervalIdentity { lambda, common } => {
            (common, cmd_interval_identity(lambda))
        }
        Command::IntervalBoundary { spec, alpha, common } => {
            (common, cmd_interval_boundary(&spec, alpha))
        }
        Command::IntervalTransport {
            a,
            b,
            poly2,
            extreme,
            common,
        } => (common, cmd_interval_transport(a, b, poly2, extreme)),
    }
}

fn cmd_eval(path: &Path, at: f64) -> Result<(Report, i32)> {
    let spec = load_spec(path)?;
    let value = match &spec.function {
        ParsedFunction::HalfLine(f) => f.evaluate(at)?,
        ParsedFunction::Interval(f) => f.evaluate(at)?,
    };
    let human = format!("{}({}) = {}\n", spec.name, sig12(at), sig12(value));
    let machine = json!({ "name": spec.name, "at": at, "value": value });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_boundary(path: &Path) -> Result<(Report, i32)> {
    let spec = load_spec(path)?;
    match &spec.function {
        ParsedFunction::HalfLine(f) => {
            let b = f.boundary();
            let human = format!(
                "f(+0) = {}\nf'(inf) = {}\nslope at 0 = {}\nquadratic coefficient at inf = {}\n",
                sig12(b.f_at_0),
                sig12(b.slope_at_inf),
                b.lin0.map_or("undefined".into(), sig12),
                sig12(b.quad_inf),
            );
            let machine = json!({
                "name": spec.name,
                "f_at_0": num_or_inf(b.f_at_0),
                "slope_at_inf": num_or_inf(b.slope_at_inf),
                "lin0": b.lin0,
                "quad_inf": b.quad_inf,
            });
            Ok((Report::new(human, machine), EXIT_OK))
        }
        ParsedFunction::Interval(f) => {
            let lo = f.boundary_value(false);
            let hi = f.boundary_value(true);
            let human = format!("f(-1) = {}\nf(+1) = {}\n", sig12(lo), sig12(hi));
            let machine = json!({
                "name": spec.name,
                "f_at_minus_1": num_or_inf(lo),
                "f_at_plus_1": num_or_inf(hi),
            });
            Ok((Report::new(human, machine), EXIT_OK))
        }
    }
}

fn cmd_sigma(path: &Path) -> Result<(Report, i32)> {
    let spec = load_spec(path)?;
    let support = match &spec.function {
        ParsedFunction::HalfLine(f) => f.sigma_support().to_string(),
        ParsedFunction::Interval(f) => f.mu().support().to_string(),
    };
    let human = format!("sigma support = {support}\n");
    let machine = json!({ "name": spec.name, "sigma_support": support });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_member(path: &Path, face: &str) -> Result<(Report, i32)> {
    let spec = load_spec(path)?;
    let (descriptor, inside) = match &spec.function {
        ParsedFunction::HalfLine(f) => {
            let d = parse_face(face)?;
            (d.to_string(), member(f, &d))
        }
        ParsedFunction::Interval(f) => {
            let d = parse_face_i(face)?;
            (format!("{d:?}"), membership_i(f, &d))
        }
    };
    let human = format!("{inside}\n");
    let machine = json!({ "name": spec.name, "face": descriptor, "member": inside });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_face(path: &Path) -> Result<(Report, i32)> {
    let (name, f) = require_halfline(load_spec(path)?)?;
    let smallest = smallest_closed_face(&f)?;
    let simp = is_simplicial(&smallest);
    let maximal = is_maximal(&smallest);
    let human = format!(
        "smallest closed face = {smallest}\nsimplicial = {}\nmaximal = {maximal}\n",
        simp.simplicial
    );
    let machine = json!({
        "name": name,
        "smallest_closed_face": smallest.to_string(),
        "simplicial": simp.simplicial,
        "witness_lambda": simp.witness.map(|w| w.lambda.to_string()),
        "maximal": maximal,
    });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_decompose(path: &Path, alpha: Option<f64>) -> Result<(Report, i32)> {
    let (name, f) = require_halfline(load_spec(path)?)?;
    let range = decomposition_range(&f)?;
    let mut human = format!(
        "anchor range: alpha0 = {}, alpha1 = {}\n",
        sig12(range.alpha0),
        range.alpha1
    );
    let mut machine = json!({
        "name": name,
        "alpha0": range.alpha0,
        "alpha1": range.alpha1,
    });
    if let Some(alpha) = alpha {
        let d = extremal_decomposition(&f, alpha)?;
        let gamma = d.remainder.weights.mass_at_infinity();
        let atoms: Vec<Value> = d
            .remainder
            .weights
            .atoms()
            .iter()
            .filter_map(|(p, m)| p.as_finite().map(|l| json!({ "lambda": l, "mass": m })))
            .collect();
        human += &format!(
            "at alpha = {}: a = {}, c = {}, gamma = {}, {} finite atom(s)\n",
            sig12(alpha),
            sig12(d.a),
            sig12(d.c),
            sig12(gamma),
            atoms.len()
        );
        machine["alpha"] = json!(alpha);
        machine["a"] = json!(d.a);
        machine["c"] = json!(d.c);
        machine["gamma"] = json!(gamma);
        machine["atoms"] = json!(atoms);
    }
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_sweep(path: &Path, grid: usize) -> Result<(Report, i32)> {
    if grid < 2 {
        return Err(Error::OutOfRange("sweep needs --grid >= 2".into()));
    }
    let (name, f) = require_halfline(load_spec(path)?)?;
    let range = decomposition_range(&f)?;
    let hi = match range.alpha1 {
        ExtendedParam::Finite(v) => v,
        ExtendedParam::Infinity => (range.alpha0.max(1.0)) * 10.0,
    };
    let mut csv = String::from("alpha,a,c,gamma,atom_lambda,atom_mass\n");
    let mut rows = Vec::new();
    for i in 0..grid {
        let alpha = range.alpha0 + (hi - range.alpha0) * i as f64 / (grid - 1) as f64;
        let d = match extremal_decomposition(&f, alpha) {
            Ok(d) => d,
            // fp dust at the exact endpoints may fall just outside the range
            Err(_) if i == 0 || i + 1 == grid => continue,
            Err(e) => return Err(e),
        };
        let gamma = d.remainder.weights.mass_at_infinity();
        let finite_atoms: Vec<(f64, f64)> = d
            .remainder
            .weights
            .atoms()
            .iter()
            .filter_map(|(p, m)| p.as_finite().map(|l| (l, *m)))
            .collect();
        if finite_atoms.is_empty() {
            csv += &format!(
                "{},{},{},{},,\n",
                sig12(alpha),
                sig12(d.a),
                sig12(d.c),
                sig12(gamma)
            );
        }
        for (l, m) in &finite_atoms {
            csv += &format!(
                "{},{},{},{},{},{}\n",
                sig12(alpha),
                sig12(d.a),
                sig12(d.c),
                sig12(gamma),
                sig12(*l),
                sig12(*m)
            );
        }
        rows.push(json!({
            "alpha": alpha,
            "a": d.a,
            "c": d.c,
            "gamma": gamma,
            "atoms": finite_atoms
                .iter()
                .map(|(l, m)| json!({ "lambda": l, "mass": m }))
                .collect::<Vec<_>>(),
        }));
    }
    let human = format!(
        "swept {} anchors over [{}, {}]\n{csv}",
        rows.len(),
        sig12(range.alpha0),
        range.alpha1
    );
    let machine = json!({ "name": name, "rows": rows });
    Ok((
        Report {
            human,
            machine,
            csv: Some(csv),
        },
        EXIT_OK,
    ))
}

fn cmd_fit(samples_path: &Path, grid: usize, tol: f64) -> Result<(Report, i32)> {
    let text = fs::read_to_string(samples_path)
        .map_err(|e| Error::Parse(format!("{}: {e}", samples_path.display())))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.eq_ignore_ascii_case("x,y")) {
            continue;
        }
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `x,y`", lineno + 1)))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: bad number `{s}`", lineno + 1)))
        };
        points.push((parse(x)?, parse(y)?));
    }
    let samples = SampleSet::new(points)?;
    let fit = fit_measure(&samples, &lambda_grid(grid), tol)?;
    let human = format!(
        "fitted f1 = {}, d1 = {}, {} atom(s); rms residual = {}, kkt residual = {}\n",
        sig12(fit.f.f1()),
        sig12(fit.f.d1()),
        fit.f.nu().atoms().len(),
        sig12(fit.rms_residual),
        sig12(fit.kkt_residual)
    );
    let machine = json!({
        "fit": spec_from_function("fit", &fit.f),
        "rms_residual": fit.rms_residual,
        "kkt_residual": fit.kkt_residual,
    });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_verify(path: &Path, n: usize, trials: u64, seed: Option<u64>) -> Result<(Report, i32)> {
    let seed = seed
        .or_else(|| {
            std::env::var("OPCONVEX_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    let (name, f) = require_halfline(load_spec(path)?)?;
    match convexity_witness_search(&f, n, trials, seed)? {
        None => {
            let human = format!("no witness in {trials} trials at order {n} (seed {seed})\n");
            let machine = json!({
                "name": name, "n": n, "trials": trials, "seed": seed, "witness": Value::Null,
            });
            Ok((Report::new(human, machine), EXIT_OK))
        }
        Some(w) => {
            let human = format!(
                "witness at trial {}: convexity defect has eigenvalue {}\n",
                w.trial,
                sig12(w.min_eig)
            );
            let machine = json!({
                "name": name, "n": n, "trials": trials, "seed": seed,
                "witness": { "trial": w.trial, "t": w.t, "min_eig": w.min_eig },
            });
            Ok((Report::new(human, machine), EXIT_WITNESS))
        }
    }
}

fn cmd_tau(path: &Path) -> Result<(Report, i32)> {
    let (name, f) = require_halfline(load_spec(path)?)?;
    let tau = f.tau_transform();
    let classified = tau.classify_extreme()?;
    let spec = spec_from_function(&format!("tau({name})"), &tau);
    let human = match &classified {
        Some(ray) => format!(
            "tau({name}) = {} * g({}, {})\n",
            sig12(ray.coefficient),
            param12(&ray.alpha),
            param12(&ray.lambda)
        ),
        None => format!(
            "tau({name}): f1 = {}, d1 = {}, {} atom(s)\n",
            sig12(tau.f1()),
            sig12(tau.d1()),
            tau.nu().atoms().len()
        ),
    };
    let machine = json!({
        "name": name,
        "tau": spec,
        "extreme_ray": classified.map(|r| json!({
            "alpha": r.alpha.to_string(),
            "lambda": r.lambda.to_string(),
            "coefficient": r.coefficient,
        })),
    });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_interval_identity(lambda: f64) -> Result<(Report, i32)> {
    let gap = identity_check_i(lambda)?;
    let human = format!("max identity gap at lambda = {} is {}\n", sig12(lambda), sig12(gap));
    let machine = json!({ "lambda": lambda, "max_gap": gap });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn cmd_interval_boundary(path: &Path, alpha: f64) -> Result<(Report, i32)> {
    let spec = load_spec(path)?;
    let f = match &spec.function {
        ParsedFunction::Interval(f) => f,
        ParsedFunction::HalfLine(_) => {
            return Err(Error::OutOfRange(
                "interval-boundary needs an interval-* spec".into(),
            ))
        }
    };
    let nu = boundary_rep_i(f, alpha)?;
    let mut human = format!("boundary representation at {}:\n", sig12(alpha));
    for (l, m) in nu.atoms() {
        human += &format!("  atom at {} with mass {}\n", sig12(*l), sig12(*m));
    }
    let machine = json!({
        "name": spec.name,
        "alpha": alpha,
        "atoms": nu.atoms().iter().map(|(l, m)| json!({ "lambda": l, "mass": m })).collect::<Vec<_>>(),
    });
    Ok((Report::new(human, machine), EXIT_OK))
}

fn parse_numbers<const N: usize>(text: &str, what: &str) -> Result<[f64; N]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("cannot parse {what} `{text}`")))?;
    parts
        .try_into()
        .map_err(|_| Error::Parse(format!("{what} needs {N} comma-separated numbers")))
}

fn cmd_interval_transport(
    a: f64,
    b: f64,
    poly2: Option<String>,
    extreme: Option<String>,
) -> Result<(Report, i32)> {
    let source = match (&poly2, &extreme) {
        (Some(text), None) => {
            let [c0, c1, c2] = parse_numbers(text, "--poly2")?;
            SourceFunction::Poly2 { c0, c1, c2 }
        }
        (None, Some(text)) => {
            let [alpha, lambda] = parse_numbers(text, "--extreme")?;
            SourceFunction::Extreme { alpha, lambda }
        }
        _ => {
            return Err(Error::Parse(
                "give exactly one of --poly2 or --extreme".into(),
            ))
        }
    };
    let g = affine_transport(&source, a, b)?;
    let spec = spec_from_interval_function("transported", &g);
    let human = format!(
        "transported to (-1, 1): f(0) = {}, f'(0) = {}, {} atom(s)\n",
        sig12(g.f0()),
        sig12(g.d0()),
        g.mu().atoms().len()
    );
    let machine = json!({ "a": a, "b": b, "result": spec });
    Ok((Report::new(human, machine), EXIT_OK))
}
