use crate::besselpot::{check_decay, check_deriv_envelope, riesz_subtraction_probe, series_gh_derivative_bound, PotentialParam};
use crate::gamma::{check_gamma_inequalities, GammaGrid};
use crate::hypwave::{check_beta, default_beta, kernel_even_batch, kernel_odd, l2_multiplier_sup_sampled, EvalResult, KernelQuery, Kind};
use crate::modbessel::{k_envelope, k_eval, BesselOrder};
use crate::report::{logspace, relative_change, BoundReport, Cell, FailedCell, MAX_REFINEMENT_DELTA};
use crate::{Complex64, HypwaveError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

/// Relative offset of the diagonal probes t = r(1 ± offset).
pub const DIAGONAL_OFFSET: f64 = 1e-2;
/// C_hat = sup ratio times this factor.
pub const SAFETY_FACTOR: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_points: Vec<f64>,
    pub t_points: Vec<f64>,
    pub s_points: Vec<f64>,
    #[serde(default)]
    pub refinement_level: u32,
    /// Adds t = r(1 ± 1e-2) for every r > 0 on top of the t points.
    #[serde(default)]
    pub diagonal_probes: bool,
}

fn strictly_increasing(name: &str, v: &[f64], ok: impl Fn(f64) -> bool) -> Result<()> {
    if v.is_empty() {
        return Err(HypwaveError::Grid(format!("{name} is empty")));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite() || !ok(**x)) {
        return Err(HypwaveError::Grid(format!("{name} has invalid point {x}")));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HypwaveError::Grid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

fn midpoints(v: &[f64], mid: impl Fn(f64, f64) -> Option<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for w in v.windows(2) {
        out.push(w[0]);
        out.extend(mid(w[0], w[1]));
    }
    out.extend(v.last());
    out
}

fn span(v: &[f64]) -> String {
    format!("{} in [{:e}, {:e}]", v.len(), v[0], v[v.len() - 1])
}

impl GridSpec {
    pub fn new(r_points: Vec<f64>, t_points: Vec<f64>, s_points: Vec<f64>, diagonal_probes: bool) -> Result<Self> {
        let g = GridSpec { r_points, t_points, s_points, refinement_level: 0, diagonal_probes };
        g.validate()?;
        Ok(g)
    }

    /// r ∈ {0} ∪ logspace(1e-3, 10, 40), t ∈ logspace(1e-3, 10, 40) with the
    /// diagonal probes, s ∈ {0, ±0.1, ±0.5, ±1, ±2, ±4, ±6}.
    pub fn default_grid() -> Self {
        let mut r_points = vec![0.0];
        r_points.extend(logspace(1e-3, 10.0, 40));
        let pos = [0.1, 0.5, 1.0, 2.0, 4.0, 6.0];
        let mut s_points: Vec<f64> = pos.iter().rev().map(|s| -s).collect();
        s_points.push(0.0);
        s_points.extend(pos);
        GridSpec { r_points, t_points: logspace(1e-3, 10.0, 40), s_points, refinement_level: 0, diagonal_probes: true }
    }

    pub fn validate(&self) -> Result<()> {
        strictly_increasing("r_points", &self.r_points, |r| r >= 0.0)?;
        strictly_increasing("t_points", &self.t_points, |t| t > 0.0)?;
        strictly_increasing("s_points", &self.s_points, |_| true)
    }

    /// One doubling: geometric midpoints in r (between positive neighbours)
    /// and t.  The s points stay fixed: s enters through the explicit factor
    /// s e^{−s²}, and doubling s would only measure how well the grid samples
    /// that factor's peak at |s| = 1/√2.  Every point of `self` is kept, so
    /// the cells of `self` are a subset of the refined cells.
    pub fn refine(&self) -> Self {
        let geo = |a: f64, b: f64| (a > 0.0).then(|| (a * b).sqrt());
        GridSpec {
            r_points: midpoints(&self.r_points, geo),
            t_points: midpoints(&self.t_points, geo),
            s_points: self.s_points.clone(),
            refinement_level: self.refinement_level + 1,
            diagonal_probes: self.diagonal_probes,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "level {}: r {}, t {}, s {}{}",
            self.refinement_level,
            span(&self.r_points),
            span(&self.t_points),
            span(&self.s_points),
            if self.diagonal_probes { ", diagonal probes t = r(1 ± 1e-2)" } else { "" }
        )
    }

    /// Work units at fixed (t, s, kind), each covering a list of radii.
    fn groups(&self) -> Vec<Group> {
        let mut out = Vec::new();
        let mut push = |t: f64, rs: &[f64]| {
            for &s in &self.s_points {
                for kind in [Kind::Sine, Kind::Cosine] {
                    out.push(Group { t, s, kind, rs: rs.to_vec() });
                }
            }
        };
        for &t in &self.t_points {
            push(t, &self.r_points);
        }
        if self.diagonal_probes {
            let on_grid: HashSet<u64> = self.t_points.iter().map(|t| t.to_bits()).collect();
            for &r in self.r_points.iter().filter(|r| **r > 0.0) {
                for t in [r * (1.0 - DIAGONAL_OFFSET), r * (1.0 + DIAGONAL_OFFSET)] {
                    if !on_grid.contains(&t.to_bits()) {
                        push(t, &[r]);
                    }
                }
            }
        }
        out
    }
}

struct Group {
    t: f64,
    s: f64,
    kind: Kind,
    rs: Vec<f64>,
}

impl Group {
    fn eval(&self, n: usize, beta: f64) -> Vec<Result<EvalResult>> {
        if n % 2 == 0 {
            match kernel_even_batch(n, beta, self.t, self.s, self.kind, &self.rs) {
                Ok(v) => v,
                Err(e) => self.rs.iter().map(|_| Err(e.clone())).collect(),
            }
        } else {
            self.rs
                .iter()
                .map(|&r| KernelQuery::new(n, beta, self.t, r, self.s, self.kind).and_then(|q| kernel_odd(&q)))
                .collect()
        }
    }
}

pub fn kind_index(kind: Kind) -> f64 {
    match kind {
        Kind::Sine => 0.0,
        Kind::Cosine => 1.0,
    }
}

pub fn kind_from_index(i: f64) -> Kind {
    if i == 0.0 {
        Kind::Sine
    } else {
        Kind::Cosine
    }
}

pub const DISPERSIVE_PARAMS: [&str; 4] = ["t", "r", "s", "kind"];

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// `Some(1)` is the serial reference path; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Also evaluate one refinement level and record the change of the sup.
    pub refine: bool,
}

fn par_map<T: Sync, U: Send>(items: &[T], workers: Option<usize>, f: impl Fn(&T) -> U + Sync + Send) -> Result<Vec<U>> {
    match workers {
        Some(0) => Err(HypwaveError::domain("workers must be at least 1")),
        Some(1) => Ok(items.iter().map(f).collect()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| HypwaveError::domain(format!("thread pool: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(&f).collect()))
        }
        None => Ok(items.par_iter().map(f).collect()),
    }
}

type Keyed = (Vec<f64>, std::result::Result<Cell, String>);

fn evaluate(n: usize, beta: f64, grid: &GridSpec, workers: Option<usize>) -> Result<Vec<Keyed>> {
    let rho = 0.5 * (n as f64 - 1.0);
    let groups = grid.groups();
    let results = par_map(&groups, workers, |g| g.eval(n, beta))?;
    let mut out = Vec::new();
    for (g, res) in groups.iter().zip(results) {
        let weight = g.t.sinh().powf(rho);
        for (&r, v) in g.rs.iter().zip(res) {
            let params = vec![g.t, r, g.s, kind_index(g.kind)];
            let entry = match v {
                Ok(e) => {
                    let value = e.value.norm();
                    Ok(Cell { params: params.clone(), value, weight, ratio: value * weight, err_est: e.abs_error_estimate * weight })
                }
                Err(e) => Err(format!("{}: {e}", e.name())),
            };
            out.push((params, entry));
        }
    }
    out.sort_by(|a, b| {
        a.0.iter().zip(&b.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn assemble(n: usize, grid: &GridSpec, entries: impl Iterator<Item = Keyed>) -> BoundReport {
    let mut cells = Vec::new();
    let mut failed = Vec::new();
    for (params, e) in entries {
        match e {
            Ok(c) => cells.push(c),
            Err(error) => failed.push(FailedCell { params, error }),
        }
    }
    BoundReport::new(format!("dispersive.n{n}"), &DISPERSIVE_PARAMS, grid.describe(), cells, failed)
}

fn key(params: &[f64]) -> Vec<u64> {
    params.iter().map(|p| p.to_bits()).collect()
}

/// |kernel|·(sinh t)^ρ over `grid` for both kinds, with the change of the
/// sup against one refinement of the grid.
pub fn sweep_dispersive(n: usize, beta: f64, grid: &GridSpec) -> Result<BoundReport> {
    sweep_dispersive_with(n, beta, grid, &SweepOptions { workers: None, refine: true })
}

/// The cells of the returned report are those of `grid`, ordered by
/// (t, r, s, kind).  With `opts.refine` the refined grid is evaluated once
/// and the report on `grid` is read off as a subset of its cells.
pub fn sweep_dispersive_with(n: usize, beta: f64, grid: &GridSpec, opts: &SweepOptions) -> Result<BoundReport> {
    check_beta(n, beta)?;
    if n > 5 {
        return Err(HypwaveError::domain(format!("dimension must be in 2..=5, got {n}")));
    }
    grid.validate()?;
    if !opts.refine {
        return Ok(assemble(n, grid, evaluate(n, beta, grid, opts.workers)?.into_iter()));
    }
    let fine_grid = grid.refine();
    let fine = evaluate(n, beta, &fine_grid, opts.workers)?;
    let coarse_keys: HashSet<Vec<u64>> = grid
        .groups()
        .iter()
        .flat_map(|g| g.rs.iter().map(move |&r| key(&[g.t, r, g.s, kind_index(g.kind)])))
        .collect();
    let coarse = assemble(n, grid, fine.iter().filter(|(p, _)| coarse_keys.contains(&key(p))).cloned());
    let fine = assemble(n, &fine_grid, fine.into_iter());
    let delta = relative_change(coarse.sup_ratio, fine.sup_ratio);
    Ok(coarse.with_refinement_delta(delta))
}

/// C_hat = 1.1 × sup ratio, with a note on grid and arg-sup.
pub fn estimate_constant(report: &BoundReport) -> Result<(f64, String)> {
    if !(report.refinement_delta <= MAX_REFINEMENT_DELTA) {
        return Err(HypwaveError::StaleReport(report.refinement_delta));
    }
    let at: Vec<String> = report
        .param_names
        .iter()
        .zip(&report.arg_sup)
        .map(|(n, v)| format!("{n}={v:e}"))
        .collect();
    let note = format!(
        "{}: sup {:e} at ({}) over {} cells ({} failed), refinement change {:.3e}; grid {}",
        report.bound_id,
        report.sup_ratio,
        at.join(", "),
        report.total_cells(),
        report.failed.len(),
        report.refinement_delta,
        report.grid
    );
    Ok((SAFETY_FACTOR * report.sup_ratio, note))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gamma,
    Envelope,
    Derivative,
    Series,
    Decay,
    Multiplier,
    Dispersive,
}

impl Suite {
    /// Execution order of `run_all`.
    pub const ALL: [Suite; 7] =
        [Suite::Gamma, Suite::Envelope, Suite::Derivative, Suite::Series, Suite::Decay, Suite::Multiplier, Suite::Dispersive];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gamma => "gamma",
            Suite::Envelope => "envelope",
            Suite::Derivative => "derivative",
            Suite::Series => "series",
            Suite::Decay => "decay",
            Suite::Multiplier => "multiplier",
            Suite::Dispersive => "dispersive",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = HypwaveError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HypwaveError::domain(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub dimensions: Vec<usize>,
    pub beta_overrides: BTreeMap<usize, f64>,
    pub grid: GridSpec,
    pub workers: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            dimensions: vec![2, 3, 4, 5],
            beta_overrides: BTreeMap::new(),
            grid: GridSpec::default_grid(),
            workers: None,
        }
    }
}

impl SuiteConfig {
    pub fn beta(&self, n: usize) -> f64 {
        self.beta_overrides.get(&n).copied().unwrap_or_else(|| default_beta(n))
    }

    /// Dimensions in 2..=5, β overrides satisfying the hypothesis, a valid grid.
    pub fn validate(&self) -> Result<()> {
        for &n in self.dimensions.iter().chain(self.beta_overrides.keys()) {
            if !(2..=5).contains(&n) {
                return Err(HypwaveError::domain(format!("dimension must be in 2..=5, got {n}")));
            }
        }
        for (&n, &beta) in &self.beta_overrides {
            check_beta(n, beta)?;
        }
        if self.workers == Some(0) {
            return Err(HypwaveError::domain("workers must be at least 1"));
        }
        self.grid.validate()
    }
}

fn refine_pair(fine: Result<BoundReport>, coarse: Result<BoundReport>) -> Result<BoundReport> {
    Ok(fine?.with_coarse(&coarse?))
}

fn gamma_suite() -> Result<Vec<BoundReport>> {
    let coarse = check_gamma_inequalities(&GammaGrid::standard(0))?;
    let fine = check_gamma_inequalities(&GammaGrid::standard(1))?;
    Ok(coarse.into_iter().zip(fine).map(|(c, f)| f.with_coarse(&c)).collect())
}

/// |K_ν(x)| / envelope on μ ∈ {0, 0.5, 1, 2.5}, s ∈ {0, 0.5, 2, −5} and
/// x = 10^{−3 + 4.5i/N}, i = 0..N, N = 40·2^level, plus {0.9, 1, 1.1}.
pub fn bessel_envelope_report(level: u32) -> BoundReport {
    let n = 40usize << level;
    let mut cells = Vec::new();
    let mut failed = Vec::new();
    for mu in [0.0, 0.5, 1.0, 2.5] {
        for s in [-5.0, 0.0, 0.5, 2.0] {
            if mu == 0.0 && s == 0.0 {
                continue;
            }
            let mut xs: Vec<f64> = (0..=n).map(|i| 10f64.powf(-3.0 + 4.5 * i as f64 / n as f64)).collect();
            xs.extend([0.9, 1.0, 1.1]);
            for x in xs {
                let nu = BesselOrder::new(mu, s);
                let params = vec![mu, s, x];
                match k_eval(nu, x) {
                    Ok(k) => {
                        let weight = 1.0 / k_envelope(nu, x);
                        let value = k.norm();
                        cells.push(Cell { params, value, weight, ratio: value * weight, err_est: 0.0 });
                    }
                    Err(e) => failed.push(FailedCell { params, error: format!("{}: {e}", e.name()) }),
                }
            }
        }
    }
    let grid = format!("mu 4 x s 4 (minus mu=s=0), x {} log points in [1e-3, 10^1.5] plus 0.9, 1, 1.1", n + 1);
    BoundReport::new("bessel.envelope", &["mu", "s", "x"], grid, cells, failed)
}

pub const DERIV_CASES: [(f64, f64, usize); 6] =
    [(-2.0, 1.0, 0), (-1.0, 0.3, 0), (-3.0, 2.0, 3), (-2.5, -1.5, 2), (-1.0, 0.3, 1), (-3.0, 0.5, 2)];

fn deriv_grid(n: usize) -> Vec<f64> {
    let mut xs = logspace(1e-3, 10.0, n);
    xs.push(1.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn derivative_suite() -> Result<Vec<BoundReport>> {
    DERIV_CASES
        .iter()
        .map(|&(a, b, j)| {
            let p = PotentialParam::new(Complex64::new(a, b))?;
            refine_pair(check_deriv_envelope(&p, j, &deriv_grid(119)), check_deriv_envelope(&p, j, &deriv_grid(60)))
        })
        .collect()
}

pub const SERIES_ORDERS: [(f64, f64); 2] = [(0.5, 1.0), (0.5, 10.0)];
pub const SERIES_GROWTH: f64 = 2.0;

fn series_suite() -> Result<Vec<BoundReport>> {
    let rs = |n: usize| (1..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>();
    let mut out = Vec::new();
    for (a, b) in SERIES_ORDERS {
        let nu = Complex64::new(a, b);
        for p in 0..=4 {
            out.push(refine_pair(
                series_gh_derivative_bound(nu, p, SERIES_GROWTH, &rs(100)),
                series_gh_derivative_bound(nu, p, SERIES_GROWTH, &rs(50)),
            )?);
        }
    }
    Ok(out)
}

pub const DECAY_CASES: [(usize, f64); 3] = [(1, 1.0), (2, 2.0), (2, 2.5)];
pub const DECAY_S: [f64; 13] = [-6.0, -4.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0];
pub const RIESZ_S: [f64; 6] = [-4.0, -1.0, -0.1, 0.1, 1.0, 4.0];

fn decay_lambdas(n: usize) -> Vec<f64> {
    let pos = logspace(1e-3, 20.0, n);
    let mut all: Vec<f64> = pos.iter().rev().map(|l| -l).collect();
    all.extend(pos);
    all
}

fn decay_suite() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for (k, beta) in DECAY_CASES {
        for m in 0..k {
            out.push(refine_pair(
                check_decay(k, beta, m, &decay_lambdas(79), &DECAY_S),
                check_decay(k, beta, m, &decay_lambdas(40), &DECAY_S),
            )?);
        }
        out.push(riesz_subtraction_probe(k, beta, &RIESZ_S)?);
    }
    Ok(out)
}

pub const MULTIPLIER_T: [f64; 3] = [0.1, 1.0, 10.0];
pub const MULTIPLIER_S: [f64; 5] = [-3.0, -1.0, 0.0, 1.0, 3.0];
/// Upper end of the λ range; beyond it both multipliers are monotone in the envelope.
pub const MULTIPLIER_LAMBDA_MAX: f64 = 200.0;

/// sup_λ of the Re z = 1 multiplier divided by (1+t), for one (n, β, kind).
pub fn multiplier_report(n: usize, beta: f64, kind: Kind, per_period: usize) -> Result<BoundReport> {
    let rho = 0.5 * (n as f64 - 1.0);
    let mut cells = Vec::new();
    for t in MULTIPLIER_T {
        for s in MULTIPLIER_S {
            let lmax = MULTIPLIER_LAMBDA_MAX.max(10.0 / t);
            let value = l2_multiplier_sup_sampled(rho, 1.0, s, t, beta, lmax, kind, per_period)?;
            let weight = 1.0 / (1.0 + t);
            cells.push(Cell { params: vec![t, s], value, weight, ratio: value * weight, err_est: 0.0 });
        }
    }
    let grid = format!("t in {MULTIPLIER_T:?}, s in {MULTIPLIER_S:?}, lambda <= {MULTIPLIER_LAMBDA_MAX}, {per_period} points per period");
    Ok(BoundReport::new(format!("multiplier.n{n}.{}", kind.name()), &["t", "s"], grid, cells, vec![]))
}

fn multiplier_suite(config: &SuiteConfig) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &n in &config.dimensions {
        for kind in [Kind::Sine, Kind::Cosine] {
            let beta = config.beta(n);
            out.push(refine_pair(multiplier_report(n, beta, kind, 128), multiplier_report(n, beta, kind, 64))?);
        }
    }
    Ok(out)
}

/// Runs the selected suites in the fixed order of [`Suite::ALL`].
pub fn run_all(config: &SuiteConfig) -> Result<Vec<BoundReport>> {
    config.validate()?;
    let mut dims = config.dimensions.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut out = Vec::new();
    for suite in Suite::ALL.into_iter().filter(|s| config.suites.contains(s)) {
        match suite {
            Suite::Gamma => out.extend(gamma_suite()?),
            Suite::Envelope => out.push(bessel_envelope_report(1).with_coarse(&bessel_envelope_report(0))),
            Suite::Derivative => out.extend(derivative_suite()?),
            Suite::Series => out.extend(series_suite()?),
            Suite::Decay => out.extend(decay_suite()?),
            Suite::Multiplier => out.extend(multiplier_suite(config)?),
            Suite::Dispersive => {
                let opts = SweepOptions { workers: config.workers, refine: true };
                for &n in &dims {
                    out.push(sweep_dispersive_with(n, config.beta(n), &config.grid, &opts)?);
                }
            }
        }
    }
    Ok(out)
}

/// Regression ceilings, one `bound_id ceiling` pair per line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Baseline {
    pub ceilings: BTreeMap<String, f64>,
}

pub const BASELINE_HEADER: &str = "# hypwave baseline v1";

impl Baseline {
    pub fn parse(text: &str) -> Result<Self> {
        let mut ceilings = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(id), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(HypwaveError::domain(format!("baseline line {}: expected `bound_id ceiling`", i + 1)));
            };
            let c: f64 = c
                .parse()
                .map_err(|_| HypwaveError::domain(format!("baseline line {}: bad ceiling {c:?}", i + 1)))?;
            ceilings.insert(id.to_string(), c);
        }
        Ok(Baseline { ceilings })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{BASELINE_HEADER}\n");
        for (id, c) in &self.ceilings {
            let _ = writeln!(s, "{id} {c:e}");
        }
        s
    }

    /// Intrinsic ceilings are recorded as they are; the others become
    /// `factor` × sup ratio.
    pub fn add_missing(&mut self, reports: &[BoundReport], factor: f64) -> usize {
        let mut added = 0;
        for r in reports {
            if !self.ceilings.contains_key(&r.bound_id) {
                self.ceilings.insert(r.bound_id.clone(), r.ceiling.unwrap_or(factor * r.sup_ratio));
                added += 1;
            }
        }
        added
    }

    /// Attaches ceilings to reports that have none of their own.
    pub fn apply(&self, reports: Vec<BoundReport>) -> Vec<BoundReport> {
        reports
            .into_iter()
            .map(|r| match (r.ceiling, self.ceilings.get(&r.bound_id)) {
                (None, Some(&c)) => r.with_ceiling(c),
                _ => r,
            })
            .collect()
    }
}

/// Summary record of one report, without its cell table.
pub fn report_summary(r: &BoundReport) -> Value {
    let arg: BTreeMap<&str, f64> = r.param_names.iter().map(String::as_str).zip(r.arg_sup.iter().copied()).collect();
    json!({
        "bound_id": r.bound_id,
        "sup_ratio": r.sup_ratio,
        "arg_sup": arg,
        "ceiling": r.ceiling,
        "refinement_delta": r.refinement_delta,
        "cells": r.cells.len(),
        "failed_cells": r.failed.len(),
        "failed_fraction": r.failed_fraction(),
        "grid": r.grid,
        "pass": r.pass,
    })
}

/// Machine-readable summary; object keys come out sorted.
pub fn summary_json(reports: &[BoundReport]) -> Value {
    json!({
        "all_pass": reports.iter().all(|r| r.pass),
        "bounds": reports.iter().map(report_summary).collect::<Vec<_>>(),
    })
}
