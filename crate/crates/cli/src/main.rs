//! `noetherkit` command-line tool.
//!
//! Exit codes: 0 success, 1 verification FAIL, 2 input or parse error,
//! 3 singular Hessian, 4 integral not conserved, 5 `L` or `g` singular
//! during a solve, 6 trajectory truncated at a singularity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use noetherkit::corpus::{self, CorpusName};
use noetherkit::dynamics::{self, State, DEFAULT_DT};
use noetherkit::expr::identity::{CheckConfig, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use noetherkit::expr::{parse, Expr};
use noetherkit::mechanics::{LagrangianSystem, MechanicsError};
use noetherkit::noether::{self, FirstIntegral, Form, NoetherError, Triple};
use noetherkit::sysfile::{self, FileError, SystemDocument};

#[derive(Parser)]
#[command(name = "noetherkit", version, about = "Noether triples and first integrals for Lagrangian ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Sampling {
    /// Number of sample points.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    k: usize,
    /// Relative tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl Sampling {
    fn config(self) -> CheckConfig {
        CheckConfig { k: self.k.max(1), tol: self.tol, seed: self.seed }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print n, L, g, Λ and the regularity check of a system.
    Describe {
        /// System file or corpus name.
        system: String,
    },
    /// Build a triple for a first integral.
    Solve {
        system: String,
        /// Integral name from the system file, or an expression.
        integral: String,
        #[arg(long, value_enum)]
        mode: SolveMode,
        /// Time change for `strong`.
        #[arg(long)]
        tau: Option<String>,
        /// Comma-separated vector for `onflow-R`.
        #[arg(long = "R")]
        r: Option<String>,
        /// Shift constant: divide by L + c instead of L.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c: f64,
        /// Replace the boundary term by this expression afterwards.
        #[arg(long)]
        h: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
        /// Where to write the triple file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a triple against the Killing-type equation.
    Verify {
        system: String,
        /// Triple file, or the name of a triple in the system file.
        triple: String,
        /// Interpretation; defaults to the triple's own form.
        #[arg(long)]
        form: Option<Form>,
        /// Also compare the Noether integral with this integral.
        #[arg(long)]
        integral: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
        /// Where to write the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the equations of motion with RK4.
    Integrate {
        system: String,
        /// Initial coordinates, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        q0: String,
        /// Initial velocities, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        qdot0: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, allow_negative_numbers = true)]
        t1: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Integrals to monitor: names from the system file or expressions.
        #[arg(long, value_delimiter = ',')]
        monitor: Vec<String>,
        /// Where to write the trajectory CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in systems.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    /// Write the system file of an entry.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    #[value(name = "onflow-simplest")]
    OnflowSimplest,
    #[value(name = "onflow-R")]
    OnflowR,
    Strong,
    #[value(name = "alt-strong")]
    AltStrong,
}

impl SolveMode {
    fn operation(self) -> &'static str {
        match self {
            SolveMode::OnflowSimplest => "simplest on-flow solution with f = 0",
            SolveMode::OnflowR => "on-flow solution with f = 0 and free R",
            SolveMode::Strong => "general solution of the strong equation",
            SolveMode::AltStrong => "alternative strong solution with trivial gauge",
        }
    }
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Failure {
        match e {
            FileError::System(m) => m.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

impl From<MechanicsError> for Failure {
    fn from(e: MechanicsError) -> Failure {
        let code = if matches!(e, MechanicsError::SingularHessian { .. }) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<NoetherError> for Failure {
    fn from(e: NoetherError) -> Failure {
        let code = match &e {
            NoetherError::NotConserved { .. } => 4,
            NoetherError::LagrangianVanishes { .. } | NoetherError::NoSymbolicInverse => 5,
            NoetherError::Mechanics(MechanicsError::SingularHessian { .. }) => 5,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<dynamics::DynamicsError> for Failure {
    fn from(e: dynamics::DynamicsError) -> Failure {
        Failure::input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// A system file path, or a corpus name when no such file exists.
fn load_system(arg: &str) -> Result<SystemDocument, Failure> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Ok(name) = arg.parse::<CorpusName>() {
            let entry = corpus::load(name).map_err(|e| Failure::input(e.to_string()))?;
            return Ok(sysfile::parse_system(&sysfile::export_entry(&entry))?);
        }
    }
    Ok(sysfile::parse_system(&read(path)?)?)
}

fn expr(doc: &SystemDocument, text: &str) -> Result<Expr, Failure> {
    parse(text, doc.system.alphabet()).map_err(|e| Failure::input(format!("`{text}`: {e}")))
}

fn named_or_expr(doc: &SystemDocument, text: &str) -> Result<(String, Expr), Failure> {
    match doc.integral(text) {
        Some(e) => Ok((text.to_string(), e.clone())),
        None => Ok((text.to_string(), expr(doc, text)?)),
    }
}

fn expr_list(doc: &SystemDocument, text: &str) -> Result<Vec<Expr>, Failure> {
    text.split(',').map(|s| expr(doc, s.trim())).collect()
}

fn numbers(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::input(format!("`{}` is not a number", s.trim()))))
        .collect()
}

fn triple_json(tr: &Triple, sys: &LagrangianSystem) -> Value {
    let a = sys.alphabet();
    json!({
        "form": tr.form.name(),
        "tau": tr.tau.print(a),
        "xi": tr.xi.iter().map(|x| x.print(a)).collect::<Vec<_>>(),
        "f": tr.f.print(a),
    })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn describe(system: &str) -> Result<u8, Failure> {
    let doc = load_system(system)?;
    let sys = &doc.system;
    let a = sys.alphabet();
    let show = |es: &[Expr]| es.iter().map(|e| e.print(a)).collect::<Vec<_>>().join(", ");
    println!("system: {}", sys.name());
    println!("n = {}", sys.dim());
    println!("coordinates: {}", a.coords().join(", "));
    if !sys.params().is_empty() {
        let ps: Vec<String> = sys.params().iter().map(|(k, v)| format!("{k} = {v}")).collect();
        println!("parameters: {}", ps.join(", "));
    }
    println!("L = {}", sys.lagrangian().print(a));
    println!("p = ({})", show(sys.momentum()));
    println!("g =");
    for row in sys.hessian() {
        println!("  [{}]", show(row));
    }
    println!("Lambda = ({})", show(sys.accel()));
    let r = sys.regularity();
    println!("regularity: |det g| >= {:e} at {} sample points", r.min_abs_det, r.samples);
    if !sys.singular_sets().is_empty() {
        println!("singular sets: {}", show(sys.singular_sets()));
    }
    for (name, e) in &doc.integrals {
        println!("integral {name} = {}", e.print(a));
    }
    for (name, t) in &doc.triples {
        println!("triple {name} ({})", t.form);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn solve(
    system: &str,
    integral: &str,
    mode: SolveMode,
    tau: Option<&str>,
    r: Option<&str>,
    c: f64,
    h: Option<&str>,
    sampling: Sampling,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let doc = load_system(system)?;
    let sys = &doc.system;
    let cfg = sampling.config();
    let (name, n_expr) = named_or_expr(&doc, integral)?;
    let n = FirstIntegral::check(sys, &name, n_expr.clone(), &cfg)?;
    let mut triple = match mode {
        SolveMode::OnflowSimplest => noether::solve_onflow_simplest(sys, &n, c)?,
        SolveMode::OnflowR => {
            let text = r.ok_or_else(|| Failure::input("--mode onflow-R needs --R"))?;
            noether::solve_onflow_with_r(sys, &n, &expr_list(&doc, text)?, c)?
        }
        SolveMode::Strong => {
            let tau = tau.map_or(Ok(Expr::zero()), |t| expr(&doc, t))?;
            noether::solve_strong(sys, &n, tau)?
        }
        SolveMode::AltStrong => noether::solve_alt_strong_trivial_gauge(sys, &n, c)?,
    };
    if let Some(h) = h {
        triple = noether::multiplicity_transform(sys, &triple, expr(&doc, h)?)?;
    }
    let triple = triple.simplified();
    let report = noether::verify_triple(sys, &triple, triple.form, Some(&n_expr), &cfg)?;
    if let Some(path) = out {
        write(path, &sysfile::write_triple(&triple, sys.alphabet(), Some(&format!("{name}_{}", triple.form))))?;
    }
    print_json(&json!({
        "operation": mode.operation(),
        "system": sys.name(),
        "integral": { "name": name, "expr": n_expr.print(sys.alphabet()) },
        "triple": triple_json(&triple, sys),
        "verification": report,
        "seed": cfg.seed,
    }));
    Ok(if report.passed() { 0 } else { 1 })
}

fn verify(system: &str, triple: &str, form: Option<Form>, integral: Option<&str>, sampling: Sampling, out: Option<&Path>) -> Result<u8, Failure> {
    let doc = load_system(system)?;
    let sys = &doc.system;
    let cfg = sampling.config();
    let (name, tr) = match doc.triple(triple) {
        Some(t) if !Path::new(triple).exists() => (triple.to_string(), t.clone()),
        _ => {
            let (name, t) = sysfile::parse_triple(&read(Path::new(triple))?, sys)?;
            (name.unwrap_or_else(|| triple.to_string()), t)
        }
    };
    let form = form.unwrap_or(tr.form);
    let n = integral.map(|i| named_or_expr(&doc, i)).transpose()?;
    let report = noether::verify_triple(sys, &tr, form, n.as_ref().map(|(_, e)| e), &cfg)?;
    let value = json!({
        "operation": "Killing-type equation check",
        "system": sys.name(),
        "triple": name,
        "report": report,
    });
    if let Some(path) = out {
        write(path, &serde_json::to_string_pretty(&value).expect("reports serialize"))?;
    }
    print_json(&value);
    if !report.passed() {
        let failing = if report.verdict.passed() { report.integral.as_deref().unwrap_or(&report) } else { &report };
        eprintln!("FAIL ({}): residual {:e} at", failing.check, failing.max_residual);
        for (k, v) in &failing.worst_point {
            eprintln!("  {k} = {v}");
        }
        return Ok(1);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn integrate(system: &str, q0: &str, qdot0: &str, t0: f64, t1: f64, dt: f64, monitor: &[String], out: Option<&Path>) -> Result<u8, Failure> {
    let doc = load_system(system)?;
    let sys = &doc.system;
    let start = State { t: t0, q: numbers(q0)?, qdot: numbers(qdot0)? };
    let traj = dynamics::integrate(sys, start, t1, dt)?;
    if let Some(path) = out {
        let file = fs::File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        traj.write_csv(file).map_err(|e| Failure::input(e.to_string()))?;
    }
    let mut drifts = Vec::new();
    for m in monitor {
        let (name, e) = named_or_expr(&doc, m)?;
        drifts.push(dynamics::monitor_drift(sys, &traj, &name, &e).map_err(|e| Failure::input(e.to_string()))?);
    }
    let last = traj.last();
    print_json(&json!({
        "operation": "RK4 integration",
        "system": sys.name(),
        "method": traj.method,
        "t0": traj.t0,
        "t1": traj.t1,
        "dt": traj.dt,
        "nodes": traj.states.len(),
        "final": { "t": last.t, "q": last.q, "qdot": last.qdot },
        "truncated": traj.truncated,
        "lambda_crosscheck": traj.lambda_crosscheck,
        "drift": drifts,
    }));
    if let Some(cut) = &traj.truncated {
        eprintln!("trajectory truncated at t = {}: {}", cut.t, cut.reason);
        return Ok(6);
    }
    Ok(0)
}

fn corpus_cmd(action: &CorpusAction) -> Result<u8, Failure> {
    match action {
        CorpusAction::List => {
            for name in CorpusName::all() {
                let entry = corpus::load(name).map_err(|e| Failure::input(e.to_string()))?;
                let integrals: Vec<&str> = entry.integrals.iter().map(|n| n.name()).collect();
                let triples: Vec<&str> = entry.triples.iter().map(|t| t.name.as_str()).collect();
                println!("{name}\n  integrals: {}\n  triples: {}", integrals.join(", "), triples.join(", "));
            }
            Ok(0)
        }
        CorpusAction::Export { name, out } => {
            let name: CorpusName = name.parse().map_err(|e: corpus::CorpusError| Failure::input(e.to_string()))?;
            let entry = corpus::load(name).map_err(|e| Failure::input(e.to_string()))?;
            let text = sysfile::export_entry(&entry);
            match out {
                Some(path) => write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Describe { system } => describe(system),
        Command::Solve { system, integral, mode, tau, r, c, h, sampling, out } => {
            solve(system, integral, *mode, tau.as_deref(), r.as_deref(), *c, h.as_deref(), *sampling, out.as_deref())
        }
        Command::Verify { system, triple, form, integral, sampling, out } => {
            verify(system, triple, *form, integral.as_deref(), *sampling, out.as_deref())
        }
        Command::Integrate { system, q0, qdot0, t0, t1, dt, monitor, out } => {
            integrate(system, q0, qdot0, *t0, *t1, *dt, monitor, out.as_deref())
        }
        Command::Corpus { action } => corpus_cmd(action),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
