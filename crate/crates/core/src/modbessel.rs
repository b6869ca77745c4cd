//! K_ν(x) for complex order and positive argument.
//!
//! Two independent routes: the Laplace-type integral
//! K_ν(x) = (π/2)^{1/2} x^ν e^{-x} / Γ(ν+½) ∫₀^∞ e^{-xτ} (τ + τ²/2)^{ν-½} dτ
//! by double-exponential quadrature, and the reflection formula
//! K_ν = π/(2 sin νπ) [I_{-ν} − I_ν] with power series for I_{±ν}.
//! For large |Im ν| both suffer exponential cancellation, and the dispatcher
//! falls back to K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt, whose integrand has
//! modulus at most that of K_{Re ν}(x).

use crate::error::{HypwaveError, Result};
use crate::gamma::{recip_gamma, sinpi};
pub use crate::quad::Estimate;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Complex order ν = mu + i·s_part.  Supported box: |mu| ≤ 10, |s_part| ≤ 40.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselOrder {
    pub mu: f64,
    pub s_part: f64,
}

impl BesselOrder {
    pub fn new(mu: f64, s_part: f64) -> Self {
        BesselOrder { mu, s_part }
    }

    pub fn nu(self) -> Complex64 {
        Complex64::new(self.mu, self.s_part)
    }
}

impl From<Complex64> for BesselOrder {
    fn from(z: Complex64) -> Self {
        BesselOrder { mu: z.re, s_part: z.im }
    }
}

impl From<f64> for BesselOrder {
    fn from(mu: f64) -> Self {
        BesselOrder { mu, s_part: 0.0 }
    }
}

/// Distance of ν from the integers below which the series route is refused.
pub const INTEGER_MARGIN: f64 = 1e-6;
/// Largest argument accepted by the series route.
pub const SERIES_MAX_X: f64 = 10.0;
/// The dispatcher uses the series up to this argument.
pub const SERIES_SWITCH_X: f64 = 2.0;
const SERIES_MAX_TERMS: usize = 200;
const MAX_ABS_MU: f64 = 40.0;

#[derive(Clone, Copy)]
struct Node {
    /// abscissa (τ on [0,1], σ on [0,∞))
    x: f64,
    /// dx/dt
    w: f64,
    /// ln(τ + τ²/2) for the finite part; unused for the infinite part
    ell: f64,
}

struct Tables {
    finite: Vec<Vec<Node>>,
    infinite: Vec<Vec<Node>>,
}

const H0: f64 = 0.5;
const MAX_LEVEL: usize = 8;

fn level_ts(level: usize, lo: f64, hi: f64) -> Vec<f64> {
    let h = H0 / (1u64 << level) as f64;
    let jmin = (lo / h).floor() as i64;
    let jmax = (hi / h).ceil() as i64;
    (jmin..=jmax)
        .filter(|j| level == 0 || j.rem_euclid(2) == 1)
        .map(|j| j as f64 * h)
        .collect()
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut finite = Vec::new();
        let mut infinite = Vec::new();
        for level in 0..=MAX_LEVEL {
            // tanh-sinh on [0,1]: τ = 1/(1+e^{-π sinh t}), with ln τ formed
            // without cancellation near the origin.
            let nodes = level_ts(level, -4.0, 3.5)
                .into_iter()
                .map(|t| {
                    let u = PI * t.sinh();
                    let (x, ln_x, one_minus) = if u >= 0.0 {
                        let e = (-u).exp();
                        (1.0 / (1.0 + e), -e.ln_1p(), e / (1.0 + e))
                    } else {
                        let e = u.exp();
                        (e / (1.0 + e), u - e.ln_1p(), 1.0 / (1.0 + e))
                    };
                    let w = PI * t.cosh() * x * one_minus;
                    Node { x, w, ell: ln_x + (0.5 * x).ln_1p() }
                })
                .collect();
            finite.push(nodes);
            // exp-sinh on [0,∞): σ = exp(π/2 sinh t).
            let nodes = level_ts(level, -4.0, 3.0)
                .into_iter()
                .map(|t| {
                    let x = (0.5 * PI * t.sinh()).exp();
                    Node { x, w: 0.5 * PI * t.cosh() * x, ell: 0.0 }
                })
                .collect();
            infinite.push(nodes);
        }
        Tables { finite, infinite }
    })
}

/// K_ν(x) by the integral representation; requires Re ν > −1/2.
pub fn k_integral(nu: impl Into<BesselOrder>, x: f64) -> Result<Complex64> {
    k_integral_estimate(nu, x).map(|e| e.value)
}

pub fn k_integral_estimate(nu: impl Into<BesselOrder>, x: f64) -> Result<Estimate> {
    let nu = nu.into().nu();
    if !(nu.re > -0.5) {
        return Err(HypwaveError::domain(format!("k_integral needs Re ν > -1/2, got {nu}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(HypwaveError::domain(format!("k_integral needs x > 0, got {x}")));
    }
    let t = tables();
    let a = nu - 0.5;
    let ln_x = x.ln();
    let pre = 0.5 * (0.5 * PI).ln() + nu * ln_x - x;
    let pre_inf = pre - x - ln_x;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut err = f64::INFINITY;
    let mut h = H0;
    let mut converged = false;
    for level in 0..=MAX_LEVEL {
        h = H0 / (1u64 << level) as f64;
        for n in &t.finite[level] {
            let e = (pre - x * n.x + a * n.ell).exp() * n.w;
            sum += e;
            l1 += e.norm();
        }
        for n in &t.infinite[level] {
            let tau = 1.0 + n.x / x;
            let ell = tau.ln() + (0.5 * tau).ln_1p();
            let e = (pre_inf - n.x + a * ell).exp() * n.w;
            sum += e;
            l1 += e.norm();
        }
        let cur = sum * h;
        if level >= 2 {
            err = (cur - prev).norm();
            if err <= 1e-14 * l1 * h {
                prev = cur;
                converged = true;
                break;
            }
        }
        prev = cur;
    }
    let mass = l1 * h;
    if !converged && !(err <= 1e-10 * mass) {
        return Err(HypwaveError::Convergence(format!(
            "K_{nu}({x}): error estimate {err:e} against integrand mass {mass:e}"
        )));
    }
    let rg = recip_gamma(nu + 0.5);
    let value = prev * rg;
    let abs_error = (err + 4.0 * f64::EPSILON * mass) * rg.norm();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(HypwaveError::domain(format!("K_{nu}({x}) overflows")));
    }
    Ok(Estimate { value, abs_error })
}

/// K_ν(x) by the trapezoid rule on ∫₀^∞ e^{-x cosh t} cosh(νt) dt.  The
/// integrand is even and entire, so halving the step converges geometrically;
/// the error is absolute, of order ε·K_{Re ν}(x).
pub fn k_cosh_estimate(nu: impl Into<BesselOrder>, x: f64) -> Result<Estimate> {
    let nu = nu.into().nu();
    if !(x > 0.0) || !x.is_finite() {
        return Err(HypwaveError::domain(format!("K_ν needs x > 0, got {x}")));
    }
    let mu = nu.re.abs();
    // Peak of -x cosh t + μt, and the point past which the integrand is
    // below e^{-40} of it.
    let t_peak = (mu / x).asinh();
    let log_peak = -x * t_peak.cosh() + mu * t_peak;
    let log_at = |t: f64| -x * t.cosh() + mu * t;
    let mut t_end = t_peak + 1.0;
    while log_at(t_end) > log_peak - 40.0 {
        t_end += 1.0;
    }
    let term = |t: f64| {
        let e = -x * t.cosh() - log_peak;
        0.5 * ((nu * t + e).exp() + (-nu * t + e).exp())
    };
    let mut h = 0.25;
    let mut sum = 0.5 * term(0.0);
    let mut l1 = sum.norm();
    let mut k = 1;
    while k as f64 * h <= t_end {
        let v = term(k as f64 * h);
        sum += v;
        l1 += v.norm();
        k += 1;
    }
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_end {
            let v = term(k as f64 * h);
            sum += v;
            l1 += v.norm();
            k += 2;
        }
        let cur = sum * h;
        err = (cur - prev).norm();
        prev = cur;
        if err <= 1e-15 * l1 * h {
            break;
        }
    }
    let mass = l1 * h;
    if !(err <= 1e-10 * mass) {
        return Err(HypwaveError::Convergence(format!(
            "K_{nu}({x}): trapezoid error {err:e} against integrand mass {mass:e}"
        )));
    }
    let scale = log_peak.exp();
    let value = prev * scale;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(HypwaveError::domain(format!("K_{nu}({x}) overflows")));
    }
    Ok(Estimate { value, abs_error: (err + 4.0 * f64::EPSILON * mass) * scale })
}

pub fn k_cosh(nu: impl Into<BesselOrder>, x: f64) -> Result<Complex64> {
    k_cosh_estimate(nu, x).map(|e| e.value)
}

fn distance_to_integer(nu: Complex64) -> f64 {
    Complex64::new(nu.re - nu.re.round(), nu.im).norm()
}

fn i_series(a: Complex64, x: f64) -> Complex64 {
    let q = 0.25 * x * x;
    let mut term = (a * (0.5 * x).ln()).exp() * recip_gamma(a + 1.0);
    let mut sum = term;
    for j in 0..SERIES_MAX_TERMS {
        let jf = j as f64;
        term *= q / ((jf + 1.0) * (a + jf + 1.0));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// K_ν(x) from the I_{±ν} power series.  Requires ν off the integers and
/// 0 < x ≤ 10.
pub fn k_series(nu: impl Into<BesselOrder>, x: f64) -> Result<Complex64> {
    k_series_estimate(nu, x).map(|e| e.value)
}

/// The error estimate is rounding in the difference I_{−ν} − I_ν.
pub fn k_series_estimate(nu: impl Into<BesselOrder>, x: f64) -> Result<Estimate> {
    let nu = nu.into().nu();
    if distance_to_integer(nu) < INTEGER_MARGIN {
        return Err(HypwaveError::domain(format!("k_series needs non-integer ν, got {nu}")));
    }
    if !(x > 0.0 && x <= SERIES_MAX_X) {
        return Err(HypwaveError::domain(format!("k_series needs 0 < x <= 10, got {x}")));
    }
    let (a, b) = (i_series(-nu, x), i_series(nu, x));
    let scale = PI / (2.0 * sinpi(nu));
    Ok(Estimate { value: (a - b) * scale, abs_error: 8.0 * f64::EPSILON * (a.norm() + b.norm()) * scale.norm() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KRoute {
    Series,
    Asymptotic,
    Trapezoid,
    Integral,
}

impl KRoute {
    pub fn name(self) -> &'static str {
        match self {
            KRoute::Series => "power-series",
            KRoute::Asymptotic => "large-x-expansion",
            KRoute::Trapezoid => "cosh-trapezoid",
            KRoute::Integral => "tau-integral",
        }
    }
}

/// Routed evaluation of K_ν(x) using K_ν = K_{−ν}: the power series for
/// x ≤ 2 off the integers, the large-x expansion where it reaches full
/// accuracy, and otherwise the trapezoid rule, which is several times
/// cheaper than the τ-integral and does not cancel at large |Im ν|.
pub fn k_eval(nu: impl Into<BesselOrder>, x: f64) -> Result<Complex64> {
    k_eval_estimate(nu, x).map(|(e, _)| e.value)
}

/// [`k_eval`] with an error estimate and the route taken.
pub fn k_eval_estimate(nu: impl Into<BesselOrder>, x: f64) -> Result<(Estimate, KRoute)> {
    let mut nu = nu.into().nu();
    if !(x > 0.0) || !x.is_finite() {
        return Err(HypwaveError::domain(format!("K_ν needs x > 0, got {x}")));
    }
    if nu.re.abs() > MAX_ABS_MU {
        return Err(HypwaveError::domain(format!("order {nu} outside the supported range")));
    }
    if nu.re < 0.0 {
        nu = -nu;
    }
    if x <= SERIES_SWITCH_X && distance_to_integer(nu) >= INTEGER_MARGIN {
        Ok((k_series_estimate(nu, x)?, KRoute::Series))
    } else if let Some(v) = k_asymptotic(nu, x) {
        Ok((Estimate { value: v, abs_error: 8.0 * f64::EPSILON * v.norm() }, KRoute::Asymptotic))
    } else {
        match k_cosh_estimate(nu, x) {
            Ok(e) => Ok((e, KRoute::Trapezoid)),
            Err(_) => Ok((k_integral_estimate(nu, x)?, KRoute::Integral)),
        }
    }
}

/// Below this argument the large-x expansion is not attempted.
pub const ASYMPTOTIC_X: f64 = 20.0;

/// Large-x expansion K_ν(x) ~ √(π/2x) e^{−x} Σ a_k(ν)/x^k with
/// a_k/a_{k−1} = (4ν² − (2k−1)²)/(8k).  Returns None unless the terms fall
/// below 1e-17 of the sum before they start to grow.
pub fn k_asymptotic(nu: impl Into<BesselOrder>, x: f64) -> Option<Complex64> {
    let nu = nu.into().nu();
    if !(x >= ASYMPTOTIC_X) {
        return None;
    }
    let four = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (four - odd * odd) / (8.0 * k as f64 * x);
        if next.norm() <= 1e-17 * sum.norm() {
            return Some(sum * (PI / (2.0 * x)).sqrt() * (-x).exp());
        }
        if next.norm() > term.norm() && k as f64 > nu.norm() {
            return None;
        }
        sum += next;
        term = next;
    }
    None
}

/// K_{ν+m}(x) for m = 0..count.  Orders with Re < 1 are evaluated directly;
/// above that the upward recurrence K_{μ+1} = K_{μ−1} + (2μ/x) K_μ runs in
/// its stable direction.
pub fn k_sequence(nu: impl Into<BesselOrder>, x: f64, count: usize) -> Result<Vec<Complex64>> {
    let nu = nu.into().nu();
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let mu = nu + m as f64;
        if m < 2 || mu.re < 1.0 {
            out.push(k_eval(mu, x)?);
        } else {
            let next = out[m - 2] + (mu - 1.0) * (2.0 / x) * out[m - 1];
            out.push(next);
        }
    }
    Ok(out)
}

/// Case formula of the K_ν envelope times e^{π|Im ν|}, without the
/// implicit constant.  In 0.9 ≤ x < 1.1 the larger of the two adjacent cases
/// is used.  On either side the ratio |K_ν|/envelope is monotone, so its sup
/// is attained at a grid point once 1.1 is on the grid.
pub fn k_envelope(nu: impl Into<BesselOrder>, x: f64) -> f64 {
    let nu = nu.into();
    let large = x.powf(-0.5) * (-x).exp();
    let small = if nu.mu.abs() < 1e-12 {
        let log = (1.0 / x).ln();
        let cap = if nu.s_part == 0.0 { log } else { (1.0 / nu.s_part.abs()).min(log) };
        cap.max(0.0) + 1.0
    } else {
        x.powf(-nu.mu.abs())
    };
    let case = if (0.9..1.1).contains(&x) {
        large.max(small)
    } else if x >= 1.0 {
        large
    } else {
        small
    };
    (PI * nu.s_part.abs()).exp() * case
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_form() {
        let exact = (PI / 4.0).sqrt() * (-2.0f64).exp();
        assert!((k_integral(0.5, 2.0).unwrap().re - exact).abs() < 1e-14);
        assert!((k_series(0.5, 2.0).unwrap().re - exact).abs() < 1e-14);
        assert!((exact - 0.1199377).abs() < 1e-7);
    }

    #[test]
    fn domain_errors() {
        assert!(k_integral(-0.6, 1.0).is_err());
        assert!(k_integral(0.2, 0.0).is_err());
        assert!(k_series(2.0, 1.0).is_err());
        assert!(k_series(0.3, 11.0).is_err());
        assert!(k_eval(0.3, -1.0).is_err());
    }

    #[test]
    fn envelope_cases() {
        let e = k_envelope(Complex64::new(0.0, 2.0), 0.5);
        assert!((e - (2.0 * PI).exp() * 1.5).abs() < 1e-9 * e);
        assert!((k_envelope(1.0, 0.5) - 2.0).abs() < 1e-15);
        let e3 = k_envelope(Complex64::new(0.7, -1.3), 3.0);
        assert!((e3 - (1.3 * PI).exp() * 3f64.powf(-0.5) * (-3.0f64).exp()).abs() < 1e-12 * e3);
    }
}
