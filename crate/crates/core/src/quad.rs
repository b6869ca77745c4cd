//! Quadrature rules shared by the special-function and kernel evaluators.

use crate::error::{HypwaveError, Result};
use crate::jet::Jet;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::collections::BinaryHeap;

// Kronrod 15-point nodes on [0, 1]; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of one Gauss–Kronrod panel.
#[derive(Clone, Copy, Debug)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
    /// Kronrod estimate of the integral of |f|.
    pub l1: f64,
}

/// Applies the 15-point Kronrod rule with embedded 7-point Gauss estimate.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        *slot = (f1, f2);
        k += (f1 + f2) * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut asc = (fc - mean).norm() * WGK[7];
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let ah = h.abs();
    let mut err = ((k - g) * h).norm();
    let asc = asc * ah;
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let l1 = l1 * ah;
    if l1 > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * l1);
    }
    Panel { a, b, value: k * h, error: err, l1 }
}

#[derive(Clone, Copy, Debug)]
struct Queued(Panel);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Tolerances for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_panels: 2000 }
    }

    pub fn with_max_panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: Complex64,
    pub abs_error: f64,
    pub l1: f64,
    pub panels: usize,
    pub converged: bool,
}

impl Integral {
    pub fn zero() -> Self {
        Integral {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            l1: 0.0,
            panels: 0,
            converged: true,
        }
    }

    pub fn add(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            abs_error: self.abs_error + o.abs_error,
            l1: self.l1 + o.l1,
            panels: self.panels + o.panels,
            converged: self.converged && o.converged,
        }
    }
}

/// Globally adaptive bisection over the initial breakpoints `points`
/// (strictly increasing).  Stops when the summed error estimate falls below
/// `max(abs, rel * |value|)`, or when the panel budget is exhausted.
pub fn adaptive_points<F: FnMut(f64) -> Complex64>(f: &mut F, points: &[f64], tol: Tolerance) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in points.windows(2) {
        let p = gk15(f, w[0], w[1]);
        value += p.value;
        error += p.error;
        heap.push(Queued(p));
    }
    let mut n = heap.len();
    let mut converged = true;
    let mut dropped = 0.0;
    while error > tol.abs.max(tol.rel * value.norm()) {
        if n >= tol.max_panels {
            converged = false;
            break;
        }
        let Some(Queued(worst)) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Floating point cannot split this panel; keep its error aside.
            converged = false;
            dropped += worst.error;
            error -= worst.error;
            heap.push(Queued(Panel { error: 0.0, ..worst }));
            continue;
        }
        let l = gk15(f, worst.a, m);
        let r = gk15(f, m, worst.b);
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(Queued(l));
        heap.push(Queued(r));
        n += 1;
    }
    // Re-sum to avoid drift from the incremental updates.
    let mut panels: Vec<Panel> = heap.into_iter().map(|q| q.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().fold(Complex64::new(0.0, 0.0), |s, p| s + p.value);
    let abs_error = panels.iter().map(|p| p.error).sum::<f64>() + dropped;
    let l1 = panels.iter().map(|p| p.l1).sum();
    Integral { value, abs_error, l1, panels: panels.len(), converged }
}

pub fn adaptive<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, tol: Tolerance) -> Integral {
    adaptive_points(f, &[a, b], tol)
}

/// Value together with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub abs_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Largest truncation point accepted by [`fourier_half_line`].
pub const FOURIER_CAP: f64 = 1e6;
const PANELS_PER_PERIOD: f64 = 8.0;
const TAIL_TERMS: usize = 9;

/// ∫₀^∞ a(η) trig(ωη) dη for ω > 0 and an amplitude with a(η) = O(η^{-1-δ}).
///
/// `amp` evaluates the amplitude on jets, so that the same closure serves
/// pointwise values and the derivatives needed by the tail.  The range is
/// split at max(1/ω, 1); beyond that the breakpoints are eighth-periods up to
/// L with ωL ≥ 100 and L ≥ 50, and [L, ∞) is summed by repeated integration
/// by parts, cut at its smallest term.
pub fn fourier_half_line<A: Fn(&Jet) -> Jet>(amp: &A, omega: f64, trig: Trig, abs_tol: f64) -> Result<Estimate> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(HypwaveError::domain(format!("frequency must be positive, got {omega}")));
    }
    let head_end = (1.0 / omega).max(1.0);
    let l = (100.0 / omega).max(50.0).max(2.0 * head_end);
    if l > FOURIER_CAP {
        return Err(HypwaveError::Convergence(format!("frequency {omega:e} needs truncation beyond {FOURIER_CAP:e}")));
    }
    let w = |eta: f64| match trig {
        Trig::Cos => (omega * eta).cos(),
        Trig::Sin => (omega * eta).sin(),
    };
    let mut f = |eta: f64| amp(&Jet::variable(eta, 0)).value() * w(eta);
    let tol = Tolerance::new(0.25 * abs_tol, 0.0);
    let head = adaptive(&mut f, 0.0, head_end, tol);
    let step = 2.0 * PI / (omega * PANELS_PER_PERIOD);
    let n = ((l - head_end) / step).ceil() as usize;
    let pts: Vec<f64> = (0..=n).map(|i| if i == n { l } else { head_end + i as f64 * step }).collect();
    let body = adaptive_points(&mut f, &pts, tol.with_max_panels(n + 2000));
    let (tail, tail_err) = ibp_tail(amp, omega, l, trig);
    let abs_error = head.abs_error + body.abs_error + tail_err;
    if !(head.converged && body.converged) || tail_err > 0.25 * abs_tol {
        return Err(HypwaveError::Convergence(format!(
            "oscillatory integral at ω = {omega}: error estimate {abs_error:e}"
        )));
    }
    Ok(Estimate { value: head.value + body.value + tail, abs_error })
}

/// ∫_L^∞ a(η) e^{±iωη} dη = e^{±iωL} Σ_k (−1)^{k+1} a^{(k)}(L) / (±iω)^{k+1},
/// combined into cos or sin.  Returns the sum and the first omitted term.
fn ibp_tail<A: Fn(&Jet) -> Jet>(amp: &A, omega: f64, l: f64, trig: Trig) -> (Complex64, f64) {
    let jet = amp(&Jet::variable(l, TAIL_TERMS));
    let mut out = Complex64::new(0.0, 0.0);
    let mut omitted = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let iw = Complex64::new(0.0, sign * omega);
        let phase = (iw * l).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut prev = f64::INFINITY;
        let mut last = f64::INFINITY;
        let mut pow = iw;
        for k in 0..=TAIL_TERMS {
            let term = -jet.derivative_at_center(k) * phase / pow * if k % 2 == 0 { 1.0 } else { -1.0 };
            let m = term.norm();
            last = m;
            if m > prev || k == TAIL_TERMS {
                break;
            }
            sum += term;
            prev = m;
            pow *= iw;
        }
        omitted = if sign > 0.0 { last } else { omitted.max(last) };
        out += match trig {
            Trig::Cos => 0.5 * sum,
            Trig::Sin => sum * Complex64::new(0.0, -0.5 * sign),
        };
    }
    (out, omitted)
}

/// Gauss–Legendre rule on [-1, 1], computed by Newton iteration.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
                let pm1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Maps the rule to [a, b]: (node, weight) pairs.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_exact_for_degree_22() {
        let mut f = |x: f64| Complex64::new(x.powi(22) + x.powi(7), 0.0);
        let p = gk15(&mut f, 0.0, 1.0);
        assert!((p.value.re - (1.0 / 23.0 + 1.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn gauss_part_exact_for_degree_13() {
        // The Kronrod-Gauss difference vanishes when both are exact.
        let mut f = |x: f64| Complex64::new(x.powi(13) - 3.0 * x.powi(4), 0.0);
        let p = gk15(&mut f, -0.5, 2.0);
        assert!(p.error < 1e-13 * p.l1);
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let g = GaussLegendre::new(12);
        let s: f64 = g.on(0.0, 2.0).map(|(x, w)| w * x.powi(23)).sum();
        assert!((s - 2f64.powi(24) / 24.0).abs() / s < 1e-14);
        let total: f64 = g.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fourier_transform_of_lorentzian() {
        // ∫₀^∞ cos(ωη)/(1+η²) dη = (π/2)e^{-ω}
        let amp = |j: &Jet| (j * j).add_constant(Complex64::new(1.0, 0.0)).recip();
        for omega in [0.2, 1.0, 3.0] {
            let e = fourier_half_line(&amp, omega, Trig::Cos, 1e-9).unwrap();
            assert!((e.value.re - 0.5 * PI * (-omega).exp()).abs() < 1e-9, "ω={omega}");
            assert!(e.value.im.abs() < 1e-12);
        }
        // ∫₀^∞ η sin(ωη)/(1+η²)^2 dη = (π/4) ω e^{-ω}
        let amp = |j: &Jet| {
            let d = (j * j).add_constant(Complex64::new(1.0, 0.0)).recip();
            &(&d * &d) * j
        };
        let e = fourier_half_line(&amp, 2.0, Trig::Sin, 1e-9).unwrap();
        assert!((e.value.re - 0.25 * PI * 2.0 * (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let mut f = |x: f64| Complex64::new(x.powf(-0.5), x.sin());
        let r = adaptive(&mut f, 0.0, 1.0, Tolerance::new(1e-12, 1e-12));
        assert!(r.converged);
        assert!((r.value.re - 2.0).abs() < 1e-10);
        assert!((r.value.im - (1.0 - 1f64.cos())).abs() < 1e-12);
    }
}
