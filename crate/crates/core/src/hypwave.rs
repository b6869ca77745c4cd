//! Radial kernel functions of the shifted wave propagators on H^n.
//!
//! With z = −ρ + is, the odd-dimensional kernels (n = 2k+1) are
//!   sine:   s e^{−s²} ∂_τ^{k−1}[(1/sinh r) ∫⟨η⟩^{−k+is} sin(βtη) e^{−iβrη} dη]
//!   cosine: s e^{−s²} ∂_τ^{k}[∫⟨η⟩^{−k−1+is} cos(βtη) e^{−iβrη} dη]
//! and the even-dimensional ones (n = 2k) integrate the same inner
//! expressions, with exponents 1/2−k+is and −k−1/2+is, against
//! sinh u (cosh u − cosh r)^{−1/2} over u ∈ [r, ∞).  Here τ = cosh r − 1, so
//! ∂_τ = (1/sinh r)∂_r.  The η-integrals are Bessel potentials:
//! ∫⟨η⟩^w sin(βtη)e^{−iβrη}dη = (1/2i)[F_w(β(t−r)) − F_w(β(t+r))] and the
//! cosine analogue is ½[F_w(β(t−r)) + F_w(β(t+r))].

use crate::besselpot::{f_z_derivs, PotentialParam};
use crate::error::{HypwaveError, Result};
use crate::jet::{csch_jet, q_of_tau, u_over_sinh_in_q, Jet};
use crate::quad::{adaptive_points, fourier_half_line, gk15, Tolerance, Trig};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sine,
    Cosine,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Sine => "sine",
            Kind::Cosine => "cosine",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = HypwaveError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(Kind::Sine),
            "cosine" => Ok(Kind::Cosine),
            _ => Err(HypwaveError::domain(format!("unknown kernel kind {s:?}"))),
        }
    }
}

/// Whether β satisfies β ≥ ρ (n = 3) or β > ρ (n ≠ 3).
pub fn beta_allowed(n: usize, beta: f64) -> bool {
    let rho = 0.5 * (n as f64 - 1.0);
    if n == 3 {
        beta >= rho
    } else {
        beta > rho
    }
}

/// β = ρ for n = 3 and ρ + 1/2 otherwise.
pub fn default_beta(n: usize) -> f64 {
    let rho = 0.5 * (n as f64 - 1.0);
    if n == 3 {
        rho
    } else {
        rho + 0.5
    }
}

pub fn check_beta(n: usize, beta: f64) -> Result<()> {
    if n < 2 {
        return Err(HypwaveError::domain(format!("dimension must be at least 2, got {n}")));
    }
    if !beta.is_finite() || !beta_allowed(n, beta) {
        let rel = if n == 3 { ">=" } else { ">" };
        return Err(HypwaveError::Hypothesis(format!(
            "n = {n} needs beta {rel} rho = {}, got {beta}",
            0.5 * (n as f64 - 1.0)
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelQuery {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub beta: f64,
    pub t: f64,
    pub r: f64,
    pub s: f64,
    pub kind: Kind,
}

impl KernelQuery {
    pub fn new(n: usize, beta: f64, t: f64, r: f64, s: f64, kind: Kind) -> Result<Self> {
        check_beta(n, beta)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(HypwaveError::domain(format!("time must be positive, got {t}")));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(HypwaveError::domain(format!("radius must be nonnegative, got {r}")));
        }
        if !s.is_finite() {
            return Err(HypwaveError::domain(format!("s must be finite, got {s}")));
        }
        Ok(KernelQuery { n, k: n / 2, rho: 0.5 * (n as f64 - 1.0), beta, t, r, s, kind })
    }

    pub fn with_r(self, r: f64) -> Self {
        KernelQuery { r, ..self }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(-self.rho, self.s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    JetClosedForm,
    FiniteDifference,
    SpectralQuadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::JetClosedForm => "jet_closed_form",
            Method::FiniteDifference => "finite_difference",
            Method::SpectralQuadrature => "spectral_quadrature",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub method: Method,
}

impl EvalResult {
    fn zero() -> Self {
        EvalResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, method: Method::JetClosedForm }
    }
}

/// |r − t| below this fraction of min(t, 1) counts as the diagonal.
pub const DIAGONAL_REL: f64 = 1e-4;
/// The Taylor expansion at u = 0 is used for u ≤ min(0.02 t, 0.05).
pub const SMALL_U_FRACTION: f64 = 0.02;
pub const SMALL_U_CAP: f64 = 0.05;
/// Extra Taylor orders carried by the expansion at u = 0.
const SERIES_EXTRA: usize = 2;
/// Even-dimensional integrals are cut at u = r + TAIL_CUT.
pub const TAIL_CUT: f64 = 40.0;

fn diagonal_offset(t: f64) -> f64 {
    DIAGONAL_REL * t.min(1.0)
}

fn prefactor(s: f64) -> f64 {
    s * (-s * s).exp()
}

/// ∂_τ^p of the inner expression E(u), for fixed (β, t) and order w.
#[derive(Clone, Copy, Debug)]
struct Inner {
    kind: Kind,
    w: PotentialParam,
    p: usize,
    beta: f64,
    t: f64,
}

const I2: Complex64 = Complex64::new(0.0, 2.0);

impl Inner {
    fn new(n: usize, kind: Kind, s: f64, beta: f64, t: f64) -> Result<Self> {
        let k = (n / 2) as f64;
        let shift = if n % 2 == 1 { 0.0 } else { 0.5 };
        let (re, p) = match kind {
            Kind::Sine => (shift - k, n / 2 - 1),
            Kind::Cosine => (-k - 1.0 + shift, n / 2),
        };
        let w = PotentialParam::new(Complex64::new(re, s))?;
        Ok(Inner { kind, w, p, beta, t })
    }

    /// Value and error estimate at u > 0; `diff` is t − u, supplied
    /// separately because u may sit within rounding of t.
    fn eval(&self, u: f64, diff: f64) -> Result<(Complex64, f64)> {
        if u <= (SMALL_U_FRACTION * self.t).min(SMALL_U_CAP) {
            self.eval_series(u)
        } else {
            self.eval_jet(u, diff)
        }
    }

    fn eval_jet(&self, u: f64, diff: f64) -> Result<(Complex64, f64)> {
        let p = self.p;
        let b = self.beta;
        let d1 = f_z_derivs(&self.w, b * diff, p)?;
        let d2 = f_z_derivs(&self.w, b * (self.t + u), p)?;
        let mut fact = 1.0;
        let mut coeffs = Vec::with_capacity(p + 1);
        for i in 0..=p {
            if i > 0 {
                fact *= i as f64;
            }
            let bi = b.powi(i as i32);
            let a = d1[i] * if i % 2 == 0 { bi } else { -bi };
            let c = d2[i] * bi;
            coeffs.push(match self.kind {
                Kind::Sine => (a - c) / (I2 * fact),
                Kind::Cosine => 0.5 * (a + c) / fact,
            });
        }
        let mut e = Jet::from_coeffs(u, &coeffs);
        let mut mag = Jet::from_real(u, &coeffs.iter().map(|c| c.norm()).collect::<Vec<_>>());
        if self.kind == Kind::Sine {
            let csch = csch_jet(u, p);
            e = &e * &csch;
            mag = &mag * &abs_jet(&csch);
        }
        for _ in 0..p {
            e = e.tau_derivative();
            let d = mag.derivative();
            mag = &d * &abs_jet(&csch_jet(u, d.order()));
        }
        let value = e.value();
        Ok((value, 16.0 * f64::EPSILON * (p + 1) as f64 * mag.value().re))
    }

    /// Taylor expansion at u = 0 in q = u², re-expanded in τ through
    /// q(τ) = arccosh(1+τ)²; avoids the 1/sinh cancellation at small u.
    fn eval_series(&self, u: f64) -> Result<(Complex64, f64)> {
        let p = self.p;
        let order = p + SERIES_EXTRA;
        let b = self.beta;
        let d = f_z_derivs(&self.w, b * self.t, 2 * order + 1)?;
        let mut fact = vec![1.0; 2 * order + 2];
        for i in 1..fact.len() {
            fact[i] = fact[i - 1] * i as f64;
        }
        let in_q: Vec<Complex64> = match self.kind {
            Kind::Sine => {
                // (1/sinh u)(1/2i)[F(β(t−u)) − F(β(t+u))]: odd part over u.
                let odd: Vec<Complex64> = (0..=order)
                    .map(|m| -2.0 * b.powi(2 * m as i32 + 1) * d[2 * m + 1] / fact[2 * m + 1] / I2)
                    .collect();
                let uos = u_over_sinh_in_q(order);
                (0..=order).map(|i| (0..=i).map(|j| odd[j] * uos[i - j]).sum()).collect()
            }
            Kind::Cosine => (0..=order).map(|m| b.powi(2 * m as i32) * d[2 * m] / fact[2 * m]).collect(),
        };
        let q = Jet::from_real(0.0, &q_of_tau(order));
        let in_tau = q.compose(&in_q);
        let tau0 = 2.0 * (0.5 * u).sinh().powi(2);
        let mut value = Complex64::new(0.0, 0.0);
        let mut last = 0.0;
        let mut sum_abs = 0.0;
        for i in p..=order {
            let term = in_tau.coeffs[i] * (fact[i] / fact[i - p]) * tau0.powi((i - p) as i32);
            value += term;
            sum_abs += term.norm();
            last = term.norm();
        }
        Ok((value, last + 16.0 * f64::EPSILON * sum_abs))
    }
}

fn abs_jet(j: &Jet) -> Jet {
    Jet::from_real(j.center, &j.coeffs.iter().map(|c| c.norm()).collect::<Vec<_>>())
}

/// Odd-dimensional kernel function, including the factor s e^{−s²}.
///
/// Within DIAGONAL_REL·min(t, 1) of r = t the kernel is evaluated at
/// r = t ± that offset; the larger modulus is returned and the spread of the
/// two values is added to the error estimate.
pub fn kernel_odd(q: &KernelQuery) -> Result<EvalResult> {
    if q.n % 2 == 0 {
        return Err(HypwaveError::domain(format!("kernel_odd needs odd n, got {}", q.n)));
    }
    if q.s == 0.0 {
        return Ok(EvalResult::zero());
    }
    let inner = Inner::new(q.n, q.kind, q.s, q.beta, q.t)?;
    let pf = prefactor(q.s);
    let delta = diagonal_offset(q.t);
    if (q.r - q.t).abs() < delta {
        let a = inner.eval(q.t - delta, delta)?;
        let b = inner.eval(q.t + delta, -delta)?;
        let (big, spread) = if b.0.norm() > a.0.norm() { (b.0, (a.0 - b.0).norm()) } else { (a.0, (a.0 - b.0).norm()) };
        return Ok(EvalResult {
            value: big * pf,
            abs_error_estimate: (spread + a.1 + b.1) * pf.abs(),
            method: Method::JetClosedForm,
        });
    }
    let r = q.r;
    let (v, e) = if r == 0.0 { inner.eval_series(0.0)? } else { inner.eval(r, q.t - r)? };
    Ok(EvalResult { value: v * pf, abs_error_estimate: e * pf.abs(), method: Method::JetClosedForm })
}

/// sinh u (cosh u − cosh r)^{−1/2}, with d = u − r supplied exactly.
fn weight(u: f64, r: f64, d: f64) -> f64 {
    u.sinh() / (2.0 * (0.5 * (u + r)).sinh() * (0.5 * d).sinh()).sqrt()
}

/// t − u from cosh u − cosh t = a, accurate when u is close to t.
fn t_minus_u(t: f64, u: f64, a: f64) -> f64 {
    -2.0 * (a / (2.0 * (0.5 * (t + u)).sinh())).asinh()
}

/// Rate of exponential decay of the even-dimensional integrand in u.
fn tail_rate(beta: f64, k: usize) -> f64 {
    beta + k as f64 - 0.5
}

const EVEN_TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-10, max_panels: 4000 };

fn check_tail(total: Complex64, tail: f64, r: f64) -> Result<()> {
    if tail > 1e-9 * total.norm().max(1e-10) {
        return Err(HypwaveError::Tail(format!("remainder bound {tail:e} beyond u = {}", r + TAIL_CUT)));
    }
    Ok(())
}

fn geometric_points(hi: f64, levels: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=levels).rev().map(|i| hi * 0.5f64.powi(i as i32)).collect();
    pts.insert(0, 0.0);
    pts
}

/// Direct route: with v = (cosh u − cosh r)^{1/2} the weight becomes 2 dv;
/// the v-range is split at v(t) and each side uses v = v(t) ∓ w², which
/// absorbs the |u−t|^{−1/2} singularity.  Beyond u = max(r, t) + 1 the
/// integral runs in u up to r + 40.
fn even_direct(inner: &Inner, k: usize, r: f64) -> Result<(Complex64, f64)> {
    let t = inner.t;
    let cr = r.cosh();
    let mut err = 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut fail: Option<HypwaveError> = None;
    let mut g = |u: f64, diff: f64| -> Complex64 {
        match inner.eval(u, diff) {
            Ok((v, _)) => v,
            Err(e) => {
                fail.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let u1 = r.max(t) + 1.0;
    if r < t {
        let vt = (2.0 * (0.5 * (t + r)).sinh() * (0.5 * (t - r)).sinh()).sqrt();
        // left of t: v = vt − w²
        let wl = vt.sqrt();
        let mut f = |w: f64| {
            let v = vt - w * w;
            let u = (cr + v * v).acosh();
            let diff = t_minus_u(t, u, -w * w * (2.0 * vt - w * w));
            g(u, diff) * (4.0 * w)
        };
        let a = adaptive_points(&mut f, &geometric_points(wl, 40), EVEN_TOL);
        // right of t: v = vt + w²
        let v1 = (2.0 * (0.5 * (u1 + r)).sinh() * (0.5 * (u1 - r)).sinh()).sqrt();
        let wr = (v1 - vt).sqrt();
        let mut f = |w: f64| {
            let v = vt + w * w;
            let u = (cr + v * v).acosh();
            let diff = t_minus_u(t, u, w * w * (2.0 * vt + w * w));
            g(u, diff) * (4.0 * w)
        };
        let b = adaptive_points(&mut f, &geometric_points(wr, 40), EVEN_TOL);
        total += a.value + b.value;
        err += a.abs_error + b.abs_error;
        if !(a.converged && b.converged) {
            err += a.l1 + b.l1;
        }
    } else {
        let v1 = (2.0 * (0.5 * (u1 + r)).sinh() * (0.5 * (u1 - r)).sinh()).sqrt();
        // u − r from 2 sinh((u+r)/2) sinh((u−r)/2) = v²; acosh near 1 alone
        // would leave t − u with only a few digits at small r.
        let mut f = |v: f64| {
            let rough = (cr + v * v).acosh();
            let d = 2.0 * (v * v / (2.0 * (0.5 * (rough + r)).sinh())).asinh();
            g(r + d, (t - r) - d) * 2.0
        };
        let a = adaptive_points(&mut f, &geometric_points(v1, 40), EVEN_TOL);
        total += a.value;
        err += a.abs_error;
        if !a.converged {
            err += a.l1;
        }
    }
    let cut = r + TAIL_CUT;
    let mut f = |u: f64| g(u, t - u) * weight(u, r, u - r);
    let pts: Vec<f64> = (0..=((cut - u1) / 2.0).ceil() as usize).map(|i| (u1 + 2.0 * i as f64).min(cut)).collect();
    let mut pts = pts;
    pts.dedup();
    let c = adaptive_points(&mut f, &pts, EVEN_TOL);
    total += c.value;
    err += c.abs_error;
    let tail = f(cut).norm() / tail_rate(inner.beta, k);
    if let Some(e) = fail {
        return Err(e);
    }
    check_tail(total, tail, r)?;
    Ok((total, err + tail))
}

/// Even-dimensional kernel function, including the factor s e^{−s²}.
pub fn kernel_even(q: &KernelQuery) -> Result<EvalResult> {
    if q.n % 2 == 1 {
        return Err(HypwaveError::domain(format!("kernel_even needs even n, got {}", q.n)));
    }
    if q.s == 0.0 {
        return Ok(EvalResult::zero());
    }
    let inner = Inner::new(q.n, q.kind, q.s, q.beta, q.t)?;
    let pf = prefactor(q.s);
    let (v, e) = even_at(&inner, q.k, q.r)?;
    Ok(EvalResult { value: v * pf, abs_error_estimate: e * pf.abs(), method: Method::JetClosedForm })
}

fn even_at(inner: &Inner, k: usize, r: f64) -> Result<(Complex64, f64)> {
    let t = inner.t;
    let delta = diagonal_offset(t);
    if (r - t).abs() < delta {
        let a = even_direct(inner, k, t - delta)?;
        let b = even_direct(inner, k, t + delta)?;
        let spread = (a.0 - b.0).norm();
        let big = if b.0.norm() > a.0.norm() { b.0 } else { a.0 };
        return Ok((big, spread + a.1 + b.1));
    }
    even_direct(inner, k, r)
}

/// The even-dimensional integrand s e^{−s²} sinh u (cosh u − cosh r)^{−1/2} G(u)
/// at u > r, u ≠ t.
pub fn even_integrand(q: &KernelQuery, u: f64) -> Result<Complex64> {
    if q.n % 2 == 1 {
        return Err(HypwaveError::domain(format!("even_integrand needs even n, got {}", q.n)));
    }
    if !(u > q.r) || u == q.t {
        return Err(HypwaveError::domain(format!("integrand needs u > r and u != t, got u = {u}")));
    }
    let inner = Inner::new(q.n, q.kind, q.s, q.beta, q.t)?;
    let (g, _) = inner.eval(u, q.t - u)?;
    Ok(g * (prefactor(q.s) * weight(u, q.r, u - q.r)))
}

/// Either kernel with its parity dispatch.
pub fn kernel(q: &KernelQuery) -> Result<EvalResult> {
    if q.n % 2 == 1 {
        kernel_odd(q)
    } else {
        kernel_even(q)
    }
}

/// Lattice of u-breakpoints shared by all radii of a batch: ratio 10^{1/8}
/// below 1, step 1/2 above.
fn lattice_step(u: f64) -> f64 {
    if u < 1.0 {
        u * (10f64.powf(1.0 / 8.0) - 1.0)
    } else {
        0.5
    }
}

fn lattice(hi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (-40..0).map(|j| 10f64.powf(j as f64 / 8.0)).collect();
    let n = ((hi - 1.0) / 0.5).ceil() as usize;
    pts.extend((0..=n).map(|i| 1.0 + 0.5 * i as f64));
    pts
}

/// Range of the log variable on each side of u = t, and its panel width.
const LOG_SPAN: f64 = 40.0;
const LOG_PANEL: f64 = 2.0;

#[derive(Clone, Copy, Debug)]
enum Panel {
    /// Plain panel [a, b].
    Plain(f64, f64),
    /// [r, b] with u = r + (b − r) y², absorbing (u − r)^{−1/2}.
    Sqrt(f64, f64),
    /// u = t + side·δ e^{−w}, w ∈ [a, b].
    Log(f64, f64, f64),
}

/// Even-dimensional kernel values for every radius in `rs` at fixed
/// (n, β, t, s, kind).  Values of the inner expression are cached on a
/// lattice of u independent of r, which is what makes sweeps affordable;
/// radii within two lattice half-steps of t use the direct route.
pub fn kernel_even_batch(n: usize, beta: f64, t: f64, s: f64, kind: Kind, rs: &[f64]) -> Result<Vec<Result<EvalResult>>> {
    let probe = KernelQuery::new(n, beta, t, 0.0, s, kind)?;
    if n % 2 == 1 {
        return Err(HypwaveError::domain(format!("kernel_even_batch needs even n, got {n}")));
    }
    if s == 0.0 {
        return Ok(rs.iter().map(|_| Ok(EvalResult::zero())).collect());
    }
    let inner = Inner::new(n, kind, s, beta, t)?;
    let pf = prefactor(s);
    let k = probe.k;
    let delta = 0.5 * lattice_step(t);
    let rmax = rs.iter().cloned().fold(0.0, f64::max);
    let base = lattice(rmax + TAIL_CUT);
    let mut cache: HashMap<(u64, u64), Result<Complex64>> = HashMap::new();
    let mut out = Vec::with_capacity(rs.len());
    for &r in rs {
        if !(r >= 0.0) || !r.is_finite() {
            out.push(Err(HypwaveError::domain(format!("radius must be nonnegative, got {r}"))));
            continue;
        }
        if (r - t).abs() < 2.0 * delta {
            out.push(even_at(&inner, k, r).map(|(v, e)| EvalResult {
                value: v * pf,
                abs_error_estimate: e * pf.abs(),
                method: Method::JetClosedForm,
            }));
            continue;
        }
        let res = batch_one(&inner, k, r, delta, &base, &mut cache);
        out.push(res.map(|(v, e)| EvalResult { value: v * pf, abs_error_estimate: e * pf.abs(), method: Method::JetClosedForm }));
    }
    Ok(out)
}

fn batch_panels(r: f64, t: f64, delta: f64, base: &[f64]) -> Vec<Panel> {
    let cut = r + TAIL_CUT;
    let region = t > r;
    let mut pts: Vec<f64> = base
        .iter()
        .copied()
        .filter(|&b| b > r && b < cut && !(region && (b - t).abs() < 1.5 * delta))
        .collect();
    if region {
        pts.push(t - delta);
        pts.push(t + delta);
    }
    pts.push(cut);
    pts.sort_by(f64::total_cmp);
    if pts.len() >= 2 && pts[0] - r < 0.5 * (pts[1] - pts[0]) && !(region && pts[0] == t - delta) {
        pts.remove(0);
    }
    let mut panels = vec![Panel::Sqrt(r, pts[0])];
    for w in pts.windows(2) {
        if region && w[0] == t - delta {
            let mut a = 0.0;
            while a < LOG_SPAN {
                panels.push(Panel::Log(a, a + LOG_PANEL, -1.0));
                panels.push(Panel::Log(a, a + LOG_PANEL, 1.0));
                a += LOG_PANEL;
            }
        } else {
            panels.push(Panel::Plain(w[0], w[1]));
        }
    }
    panels
}

fn batch_one(
    inner: &Inner,
    k: usize,
    r: f64,
    delta: f64,
    base: &[f64],
    cache: &mut HashMap<(u64, u64), Result<Complex64>>,
) -> Result<(Complex64, f64)> {
    let t = inner.t;
    let mut fail: Option<HypwaveError> = None;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut g = |u: f64, diff: f64, cache: &mut HashMap<(u64, u64), Result<Complex64>>| -> Complex64 {
        let key = (u.to_bits(), diff.to_bits());
        let v = cache.entry(key).or_insert_with(|| inner.eval(u, diff).map(|x| x.0));
        match v {
            Ok(v) => *v,
            Err(e) => {
                fail.get_or_insert(e.clone());
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let rate = tail_rate(inner.beta, k);
    let mut last_value = Complex64::new(0.0, 0.0);
    for panel in batch_panels(r, t, delta, base) {
        let p = match panel {
            Panel::Plain(a, b) => {
                let mut f = |u: f64| g(u, t - u, cache) * weight(u, r, u - r);
                gk15(&mut f, a, b)
            }
            Panel::Sqrt(a, b) => {
                let h = b - a;
                let mut f = |y: f64| {
                    let d = h * y * y;
                    let u = a + d;
                    g(u, t - u, cache) * (weight(u, r, d) * 2.0 * h * y)
                };
                gk15(&mut f, 0.0, 1.0)
            }
            Panel::Log(a, b, side) => {
                let mut f = |w: f64| {
                    let off = delta * (-w).exp();
                    let u = t + side * off;
                    g(u, -side * off, cache) * (weight(u, r, (t - r) + side * off) * off)
                };
                gk15(&mut f, a, b)
            }
        };
        total += p.value;
        err += p.error;
        if let Panel::Plain(_, b) = panel {
            // The integrand decays like e^{−rate·u} once past r and t.
            last_value = g(b, t - b, cache) * weight(b, r, b - r);
            if b > r.max(t) + 2.0 && last_value.norm() / rate < 1e-16 * total.norm() {
                break;
            }
        }
    }
    // Truncation at w = LOG_SPAN on both sides of t: |integrand| ~ e^{−w/2}.
    if t > r {
        for side in [-1.0, 1.0] {
            let off = delta * (-LOG_SPAN).exp();
            let u = t + side * off;
            let v = g(u, -side * off, cache) * (weight(u, r, (t - r) + side * off) * off);
            err += 2.0 * v.norm();
        }
    }
    if let Some(e) = fail {
        return Err(e);
    }
    let tail = last_value.norm() / rate;
    check_tail(total, tail, r)?;
    Ok((total, err + tail))
}

/// sup over λ ∈ [0, λ_max] of the L² multiplier
/// |(z+ρ) e^{z²} (λ²+β²)^{z/2} sin(tλ)/λ| (sine) or
/// |(z+ρ) e^{z²} (λ²+β²)^{(z−1)/2} cos(tλ)| (cosine), z = z_re + is.
/// The grid is uniform with 64 points per period of the trigonometric
/// factor, and sin(tλ)/λ is replaced by its limit t at λ = 0.
pub fn l2_multiplier_sup(rho: f64, z_re: f64, s: f64, t: f64, beta: f64, lambda_max: f64, kind: Kind) -> Result<f64> {
    l2_multiplier_sup_sampled(rho, z_re, s, t, beta, lambda_max, kind, 64)
}

/// [`l2_multiplier_sup`] with `per_period` grid points per period.
#[allow(clippy::too_many_arguments)]
pub fn l2_multiplier_sup_sampled(
    rho: f64,
    z_re: f64,
    s: f64,
    t: f64,
    beta: f64,
    lambda_max: f64,
    kind: Kind,
    per_period: usize,
) -> Result<f64> {
    if per_period < 8 {
        return Err(HypwaveError::Grid(format!("need at least 8 points per period, got {per_period}")));
    }
    if !(t > 0.0 && beta > 0.0) {
        return Err(HypwaveError::Grid(format!("need t > 0 and beta > 0, got t = {t}, beta = {beta}")));
    }
    if !(lambda_max >= (10.0 / t).max(10.0)) {
        return Err(HypwaveError::Grid(format!("lambda_max = {lambda_max} must be at least max(10/t, 10)")));
    }
    let z = Complex64::new(z_re, s);
    let front = ((z + rho) * (z * z).exp()).norm();
    let step = (2.0 * PI / (per_period as f64 * t)).min(4.0 * beta / per_period as f64);
    let n = (lambda_max / step).ceil() as usize;
    let mut sup: f64 = 0.0;
    for i in 0..=n {
        let l = (i as f64 * step).min(lambda_max);
        let base = Complex64::new(l * l + beta * beta, 0.0);
        let v = match kind {
            Kind::Sine => {
                let sinc = if l == 0.0 { t } else { (t * l).sin() / l };
                base.powc(0.5 * z).norm() * sinc.abs()
            }
            Kind::Cosine => base.powc(0.5 * (z - 1.0)).norm() * (t * l).cos().abs(),
        };
        sup = sup.max(front * v);
    }
    Ok(sup)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    None,
    ApplyInIntegrand,
}

const ORACLE_TOL: f64 = 1e-9;

/// Direct oscillatory quadrature of the odd-dimensional spectral integrals.
/// Supported: n = 3 sine without derivative, n = 3 cosine and n = 5 sine
/// with the single r-derivative taken inside the integral (factor −iβη).
pub fn spectral_quadrature_oracle(q: &KernelQuery, mode: DerivativeMode) -> Result<EvalResult> {
    let supported = matches!(
        (q.n, q.kind, mode),
        (3, Kind::Sine, DerivativeMode::None) | (3, Kind::Cosine, DerivativeMode::ApplyInIntegrand) | (5, Kind::Sine, DerivativeMode::ApplyInIntegrand)
    );
    if !supported {
        return Err(HypwaveError::domain(format!(
            "spectral oracle does not cover n = {}, {} kind, {:?}",
            q.n,
            q.kind.name(),
            mode
        )));
    }
    if q.r == 0.0 {
        return Err(HypwaveError::domain("spectral oracle needs r > 0"));
    }
    if q.s == 0.0 {
        return Ok(EvalResult { method: Method::SpectralQuadrature, ..EvalResult::zero() });
    }
    let k = (q.n / 2) as f64;
    let re = match q.kind {
        Kind::Sine => -k,
        Kind::Cosine => -k - 1.0,
    };
    let half = 0.5 * Complex64::new(re, q.s);
    let one = Complex64::new(1.0, 0.0);
    let a = |e: &Jet| (e * e).add_constant(one).powc(half);
    let ea = |e: &Jet| &(e * e).add_constant(one).powc(half) * e;
    let b = q.beta;
    let (tp, tm) = (b * (q.t + q.r), b * (q.t - q.r));
    // C(ω) = ∫₀^∞ a cos ωη dη, S(ω) = ∫₀^∞ η a sin ωη dη (odd in ω).
    let cint = |w: f64| {
        if w == 0.0 {
            Err(HypwaveError::domain("spectral oracle needs r != t"))
        } else {
            fourier_half_line(&a, w.abs(), Trig::Cos, ORACLE_TOL)
        }
    };
    let sint = |w: f64| -> Result<(Complex64, f64)> {
        if w == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let e = fourier_half_line(&ea, w.abs(), Trig::Sin, ORACLE_TOL)?;
        Ok((e.value * w.signum(), e.abs_error))
    };
    let sh = q.r.sinh();
    let mi = Complex64::new(0.0, -1.0);
    let (value, err) = match (q.n, q.kind) {
        (3, Kind::Sine) => {
            let (c1, c2) = (cint(tm)?, cint(tp)?);
            ((c1.value - c2.value) * mi / sh, (c1.abs_error + c2.abs_error) / sh)
        }
        (3, Kind::Cosine) => {
            let (s1, s2) = (sint(tp)?, sint(tm)?);
            (-b * (s1.0 - s2.0) / sh, b * (s1.1 + s2.1) / sh)
        }
        _ => {
            let (c1, c2) = (cint(tm)?, cint(tp)?);
            let i_s = (c1.value - c2.value) * mi;
            let (s1, s2) = (sint(tp)?, sint(tm)?);
            let d_s = mi * b * (s1.0 + s2.0);
            let ch = q.r.cosh();
            let v = d_s / (sh * sh) - i_s * ch / (sh * sh * sh);
            (v, b * (s1.1 + s2.1) / (sh * sh) + (c1.abs_error + c2.abs_error) * ch / sh.powi(3))
        }
    };
    let pf = prefactor(q.s);
    Ok(EvalResult { value: value * pf, abs_error_estimate: err * pf.abs(), method: Method::SpectralQuadrature })
}
