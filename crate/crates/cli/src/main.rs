mod config;

use clap::{Args, Parser, Subcommand};
use config::{baseline_factor, load_grid, FileConfig};
use hypwave::besselpot::{f_z, PotentialParam};
use hypwave::gamma::gamma;
use hypwave::hypwave::{default_beta, kernel, l2_multiplier_sup, l2_multiplier_sup_sampled, KernelQuery, Kind};
use hypwave::modbessel::{k_eval_estimate, BesselOrder};
use hypwave::report::BoundReport;
use hypwave::verifier::{
    estimate_constant, kind_from_index, report_summary, run_all, summary_json, sweep_dispersive_with, Baseline,
    GridSpec, Suite, SuiteConfig, SweepOptions,
};
use hypwave::{Complex64, HypwaveError};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hypwave", version, about = "Kernel evaluation, sweeps and bound verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one quantity and print a JSON record.
    Eval {
        #[command(subcommand)]
        what: EvalWhat,
    },
    /// Sweep the dispersive bound for one dimension and write CSV + JSON.
    Sweep(SweepArgs),
    /// Run the verification suites against a baseline.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum EvalWhat {
    /// Γ(z).
    Gamma(ZArgs),
    /// K_ν(x).
    Bessel {
        #[arg(long, allow_hyphen_values = true)]
        nu_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        nu_im: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
    /// F_z(x).
    Potential {
        #[command(flatten)]
        z: ZArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
    /// Dispersive kernel function at (n, β, t, r, s, kind).
    Kernel {
        #[command(flatten)]
        k: KernelArgs,
        #[arg(long)]
        r: Option<f64>,
    },
    /// sup over λ of the L² multiplier.
    Multiplier {
        #[command(flatten)]
        k: KernelArgs,
        /// Real part of z; defaults to 1.
        #[arg(long, allow_hyphen_values = true)]
        z_re: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
    },
}

#[derive(Args)]
struct ZArgs {
    #[arg(long, allow_hyphen_values = true)]
    z_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z_im: Option<f64>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long)]
    kind: Option<Kind>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    /// With --r and --s: a single-point grid.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long)]
    grid_file: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (repeatable or comma-separated); default all.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Dimensions (repeatable); default 2,3,4,5.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// β override; needs exactly one --n.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    grid_file: Option<PathBuf>,
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Usage(String),
    Eval(HypwaveError),
    Io(String),
    Bounds,
}

impl From<HypwaveError> for Failure {
    fn from(e: HypwaveError) -> Self {
        Failure::Eval(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Eval(HypwaveError::Hypothesis(_) | HypwaveError::Grid(_)) => 2,
            Failure::Eval(_) | Failure::Io(_) => 3,
            Failure::Bounds => 1,
        }
    }

    fn report(&self) {
        match self {
            Failure::Usage(m) => eprintln!("ArgumentError: {m}"),
            Failure::Eval(e) => eprintln!("{}: {e}", e.name()),
            Failure::Io(m) => eprintln!("IoError: {m}"),
            Failure::Bounds => eprintln!("BoundFailure: at least one bound did not pass"),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn need<T>(flag: Option<T>, file: Option<T>, name: &str) -> Outcome<T> {
    flag.or(file).ok_or_else(|| Failure::Usage(format!("missing --{}", name.replace('_', "-"))))
}

fn kind_or(flag: Option<Kind>, file: &FileConfig) -> Outcome<Kind> {
    match (flag, &file.kind) {
        (Some(k), _) => Ok(k),
        (None, Some(k)) => k.parse().map_err(|e: HypwaveError| Failure::Usage(e.to_string())),
        (None, None) => Err(Failure::Usage("missing --kind".into())),
    }
}

fn record(inputs: Value, value: Complex64, err: f64, method: &str) -> Value {
    json!({
        "inputs": inputs,
        "value_re": value.re,
        "value_im": value.im,
        "abs_error_estimate": err,
        "method": method,
    })
}

fn cmd_eval(what: EvalWhat, file: &FileConfig) -> Outcome<()> {
    let out = match what {
        EvalWhat::Gamma(z) => {
            let (re, im) = (need(z.z_re, file.z_re, "z_re")?, z.z_im.or(file.z_im).unwrap_or(0.0));
            let v = gamma(Complex64::new(re, im))?;
            let method = if re >= 0.5 { "lanczos" } else { "lanczos-reflection" };
            record(json!({"z_re": re, "z_im": im}), v, 1e-13 * v.norm(), method)
        }
        EvalWhat::Bessel { nu_re, nu_im, x } => {
            let re = need(nu_re, file.nu_re, "nu_re")?;
            let im = nu_im.or(file.nu_im).unwrap_or(0.0);
            let x = need(x, file.x, "x")?;
            let (e, route) = k_eval_estimate(BesselOrder::new(re, im), x)?;
            record(json!({"nu_re": re, "nu_im": im, "x": x}), e.value, e.abs_error, route.name())
        }
        EvalWhat::Potential { z, x } => {
            let re = need(z.z_re, file.z_re, "z_re")?;
            let im = z.z_im.or(file.z_im).unwrap_or(0.0);
            let x = need(x, file.x, "x")?;
            let p = PotentialParam::new(Complex64::new(re, im))?;
            let v = f_z(&p, x)?;
            let (k, route) = k_eval_estimate(p.nu, x.abs().max(f64::MIN_POSITIVE))?;
            let rel = if k.value.norm() > 0.0 { k.abs_error / k.value.norm() } else { 0.0 };
            let err = v.norm() * (rel + 8.0 * f64::EPSILON);
            record(json!({"z_re": re, "z_im": im, "x": x}), v, err, &format!("bessel-{}", route.name()))
        }
        EvalWhat::Kernel { k, r } => {
            let n = need(k.n, file.n, "n")?;
            let beta = k.beta.or(file.beta).unwrap_or_else(|| default_beta(n));
            let (t, r, s) = (need(k.t, file.t, "t")?, need(r, file.r, "r")?, need(k.s, file.s, "s")?);
            let kind = kind_or(k.kind, file)?;
            let res = kernel(&KernelQuery::new(n, beta, t, r, s, kind)?)?;
            let inputs = json!({"n": n, "beta": beta, "t": t, "r": r, "s": s, "kind": kind.name()});
            record(inputs, res.value, res.abs_error_estimate, res.method.name())
        }
        EvalWhat::Multiplier { k, z_re, lambda_max } => {
            let n = need(k.n, file.n, "n")?;
            if !(2..=5).contains(&n) {
                return Err(Failure::Usage(format!("dimension must be in 2..=5, got {n}")));
            }
            let beta = k.beta.or(file.beta).unwrap_or_else(|| default_beta(n));
            let (t, s) = (need(k.t, file.t, "t")?, need(k.s, file.s, "s")?);
            let kind = kind_or(k.kind, file)?;
            let z_re = z_re.or(file.z_re).unwrap_or(1.0);
            let lmax = lambda_max.or(file.lambda_max).unwrap_or_else(|| 200f64.max(10.0 / t));
            let rho = 0.5 * (n as f64 - 1.0);
            let v = l2_multiplier_sup(rho, z_re, s, t, beta, lmax, kind)?;
            let fine = l2_multiplier_sup_sampled(rho, z_re, s, t, beta, lmax, kind, 128)?;
            let inputs = json!({"n": n, "beta": beta, "t": t, "s": s, "kind": kind.name(), "z_re": z_re, "lambda_max": lmax});
            record(inputs, Complex64::new(v, 0.0), (fine - v).abs(), "grid-sup")
        }
    };
    println!("{out}");
    Ok(())
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Writes through a temporary file so that a failed run leaves nothing behind.
fn write_file(path: &Path, contents: &str) -> Outcome<()> {
    let tmp = path.with_extension("partial");
    if let Err(e) = fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(path, e));
    }
    Ok(())
}

fn create_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn header() -> Value {
    json!({
        "generated_at": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "tool": "hypwave",
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn resolve_grid(flag: Option<&PathBuf>, file: &FileConfig) -> Outcome<GridSpec> {
    let grid = match (flag.or(file.grid_file.as_ref()), &file.grid) {
        (Some(p), _) => load_grid(p).map_err(Failure::Usage)?,
        (None, Some(g)) => g.clone(),
        (None, None) => GridSpec::default_grid(),
    };
    grid.validate()?;
    Ok(grid)
}

const CSV_HEADER: &str = "n,beta,kind,r,t,s,value_abs,weight,ratio,err_est";

fn sweep_csv(n: usize, beta: f64, report: &BoundReport) -> String {
    let mut out = String::with_capacity(96 * (report.cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in &report.cells {
        let (t, r, s, kind) = (c.params[0], c.params[1], c.params[2], kind_from_index(c.params[3]));
        let _ = writeln!(
            out,
            "{n},{beta:e},{},{r:e},{t:e},{s:e},{:e},{:e},{:e},{:e}",
            kind.name(),
            c.value,
            c.weight,
            c.ratio,
            c.err_est
        );
    }
    out
}

fn cmd_sweep(a: SweepArgs, file: &FileConfig) -> Outcome<()> {
    let n = need(a.n, file.n, "n")?;
    let beta = a.beta.or(file.beta).unwrap_or_else(|| default_beta(n));
    let point = (a.t.or(file.t), a.r.or(file.r), a.s.or(file.s));
    let grid = match point {
        (Some(t), Some(r), Some(s)) => GridSpec::new(vec![r], vec![t], vec![s], false)?,
        (None, None, None) => resolve_grid(a.grid_file.as_ref(), file)?,
        _ => return Err(Failure::Usage("--t, --r and --s go together".into())),
    };
    let workers = a.workers.or(file.workers);
    if workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let dir = a.output_dir.or(file.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let report = sweep_dispersive_with(n, beta, &grid, &SweepOptions { workers, refine: true })?;

    create_dir(&dir)?;
    let csv_name = format!("sweep_n{n}.csv");
    let csv_path = dir.join(&csv_name);
    let json_path = dir.join(format!("sweep_n{n}.json"));
    let (c_hat, note) = match estimate_constant(&report) {
        Ok((c, note)) => (Some(c), note),
        Err(e) => (None, format!("{}: {e}", e.name())),
    };
    let failed: Vec<Value> = report.failed.iter().map(|f| json!({"params": f.params, "error": f.error})).collect();
    let summary = json!({
        "header": header(),
        "n": n,
        "beta": beta,
        "rho": 0.5 * (n as f64 - 1.0),
        "csv": csv_name,
        "report": report_summary(&report),
        "failed": failed,
        "c_hat": c_hat,
        "constant_note": note,
    });
    write_file(&csv_path, &sweep_csv(n, beta, &report))?;
    if let Err(e) = write_file(&json_path, &(pretty(&summary) + "\n")) {
        let _ = fs::remove_file(&csv_path);
        return Err(e);
    }
    println!("{}", json!({"csv": csv_path, "summary": json_path, "sup_ratio": report.sup_ratio, "pass": report.pass}));
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn suite_config(a: &VerifyArgs, file: &FileConfig) -> Outcome<SuiteConfig> {
    let names: Vec<String> = if a.suite.is_empty() { file.suite.clone().unwrap_or_default() } else { a.suite.clone() };
    let suites = if names.is_empty() || names.iter().any(|s| s == "all") {
        Suite::ALL.to_vec()
    } else {
        names.iter().map(|s| s.parse::<Suite>()).collect::<Result<Vec<_>, _>>().map_err(|e| Failure::Usage(e.to_string()))?
    };
    let dimensions = if !a.n.is_empty() {
        a.n.clone()
    } else {
        file.dimensions.clone().unwrap_or_else(|| vec![2, 3, 4, 5])
    };
    let mut beta_overrides = file.beta_overrides().map_err(Failure::Usage)?;
    if let Some(beta) = a.beta {
        let [n] = a.n[..] else {
            return Err(Failure::Usage("--beta needs exactly one --n".into()));
        };
        beta_overrides.insert(n, beta);
    }
    let mut cfg = SuiteConfig {
        suites,
        dimensions,
        beta_overrides,
        grid: resolve_grid(a.grid_file.as_ref(), file)?,
        workers: a.workers.or(file.workers),
    };
    cfg.dimensions.sort_unstable();
    cfg.dimensions.dedup();
    cfg.validate()?;
    Ok(cfg)
}

fn text_summary(reports: &[BoundReport], notes: &[String]) -> String {
    let mut out = String::new();
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "hypwave verify: {passed}/{} bounds pass", reports.len());
    for note in notes {
        let _ = writeln!(out, "note: {note}");
    }
    for r in reports {
        let ceiling = r.ceiling.map_or("none".to_string(), |c| format!("{c:.6e}"));
        let _ = writeln!(
            out,
            "{} {} sup={:.6e} ceiling={} delta={:.3e} failed={}/{}",
            if r.pass { "PASS" } else { "FAIL" },
            r.bound_id,
            r.sup_ratio,
            ceiling,
            r.refinement_delta,
            r.failed.len(),
            r.total_cells()
        );
    }
    out
}

fn cmd_verify(a: VerifyArgs, file: &FileConfig) -> Outcome<()> {
    let cfg = suite_config(&a, file)?;
    let factor = baseline_factor(file.tolerances.as_ref()).map_err(Failure::Usage)?;
    let baseline_path = a.baseline.clone().or(file.baseline.clone()).unwrap_or_else(|| PathBuf::from("baseline.txt"));
    let dir = a.output_dir.clone().or(file.output_dir.clone()).unwrap_or_else(|| PathBuf::from("hypwave-report"));
    let existing = match fs::read_to_string(&baseline_path) {
        Ok(text) => Some(Baseline::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", baseline_path.display())))?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(io_err(&baseline_path, e)),
    };

    let reports = run_all(&cfg)?;

    let mut notes = Vec::new();
    let mut baseline = existing.clone().unwrap_or_default();
    let added = baseline.add_missing(&reports, factor);
    match (&existing, added) {
        (None, _) => notes.push(format!("baseline created at {} with {added} bounds", baseline_path.display())),
        (Some(_), 0) => {}
        (Some(_), k) => notes.push(format!("baseline extended with {k} bounds")),
    }
    if existing.is_none() || added > 0 {
        if let Some(parent) = baseline_path.parent().filter(|p| !p.as_os_str().is_empty()) {
            create_dir(parent)?;
        }
        write_file(&baseline_path, &baseline.to_text())?;
    }
    let reports = baseline.apply(reports);

    let bounds_dir = dir.join("bounds");
    create_dir(&bounds_dir)?;
    for r in &reports {
        let v = serde_json::to_value(r).expect("reports serialize");
        write_file(&bounds_dir.join(format!("{}.json", r.bound_id)), &(pretty(&v) + "\n"))?;
    }
    let mut summary = summary_json(&reports);
    summary["header"] = header();
    summary["notes"] = json!(notes);
    write_file(&dir.join("summary.json"), &(pretty(&summary) + "\n"))?;
    let text = text_summary(&reports, &notes);
    write_file(&dir.join("summary.txt"), &text)?;
    print!("{text}");
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Bounds)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = FileConfig::from_env().map_err(Failure::Usage).and_then(|file| match cli.cmd {
        Cmd::Eval { what } => cmd_eval(what, &file),
        Cmd::Sweep(a) => cmd_sweep(a, &file),
        Cmd::Verify(a) => cmd_verify(a, &file),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.exit_code())
        }
    }
}
