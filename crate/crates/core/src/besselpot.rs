//! Bessel potentials F_z = 𝓕(⟨η⟩^z), ⟨η⟩ = (1+η²)^{1/2}, in one dimension.
//!
//! F_z(x) = C_z |x|^{-ν} K_ν(|x|) with ν = (1+z)/2 and
//! C_z = 2√π 2^{(1+z)/2} / Γ(−z/2).  Derivatives follow from
//! F_z' = −Γ(−z/2−1)/(2Γ(−z/2)) x F_{z+2}.

use crate::error::{HypwaveError, Result};
use crate::gamma::{gamma, recip_gamma, sinpi};
use crate::jet::Jet;
use crate::modbessel::{k_eval, k_sequence};
use crate::quad::{fourier_half_line, Estimate, Trig};
use crate::report::{BoundReport, Cell, FailedCell};
use num_complex::Complex64;
use std::f64::consts::PI;

/// 1.5 × sup over Im z of |C_z| e^{-π|Im z|/2}, with Re z within ±1/4 of
/// −24 + i/2.  Computed offline from high-precision log-gamma.
const C_TABLE: [f64; 97] = [
    6.801938e-11,
    1.481534e-10,
    3.208872e-10,
    6.910328e-10,
    1.479421e-09,
    3.148261e-09,
    6.658410e-09,
    1.399342e-08,
    2.921857e-08,
    6.060402e-08,
    1.248452e-07,
    2.553798e-07,
    5.186297e-07,
    1.045419e-06,
    2.091157e-06,
    4.149922e-06,
    8.168418e-06,
    1.594264e-05,
    3.084456e-05,
    5.913639e-05,
    1.123157e-04,
    2.112400e-04,
    3.932682e-04,
    7.244208e-04,
    1.319710e-03,
    2.376450e-03,
    4.227633e-03,
    7.425313e-03,
    1.286717e-02,
    2.198217e-02,
    3.699179e-02,
    6.125883e-02,
    9.972059e-02,
    1.593707e-01,
    2.496946e-01,
    3.828677e-01,
    5.733934e-01,
    8.366962e-01,
    1.186049e+00,
    1.627188e+00,
    2.150225e+00,
    2.719263e+00,
    3.261635e+00,
    3.661172e+00,
    3.774819e+00,
    3.762894e+00,
    3.399078e+00,
    2.446227e+00,
    1.046810e+00,
    2.549309e+00,
    3.089426e+00,
    3.057783e+00,
    2.498161e+00,
    7.010599e+00,
    9.937795e+00,
    9.948277e+00,
    1.087875e+01,
    3.330035e+01,
    5.217343e+01,
    5.281320e+01,
    6.893332e+01,
    2.247773e+02,
    3.782573e+02,
    3.886673e+02,
    5.738437e+02,
    1.966802e+03,
    3.498880e+03,
    3.651019e+03,
    5.919856e+03,
    2.114312e+04,
    3.936240e+04,
    4.169280e+04,
    7.287181e+04,
    2.695748e+05,
    5.215518e+05,
    5.603347e+05,
    1.042407e+06,
    3.976228e+06,
    7.953666e+06,
    8.660635e+06,
    1.699183e+07,
    6.660181e+07,
    1.372007e+08,
    1.513018e+08,
    3.109018e+08,
    1.248784e+09,
    2.641114e+09,
    2.947628e+09,
    6.309516e+09,
    2.591227e+10,
    5.612368e+10,
    6.419239e+10,
    1.406501e+11,
    5.895041e+11,
    1.304875e+12,
    1.527142e+12,
    3.416330e+12,
];
const C_TABLE_MIN: f64 = -24.0;
const C_TABLE_STEP: f64 = 0.5;

/// Largest public derivative order of [`f_z_deriv`].
pub const MAX_DERIVATIVE: usize = 8;
/// Gamma arguments closer than this to a pole are refused by the recursion.
pub const RATIO_POLE_MARGIN: f64 = 1e-10;
/// Series are refused when ν is this close to an integer.
pub const SERIES_INTEGER_MARGIN: f64 = 1e-6;

fn c_table(re: f64) -> Option<f64> {
    let i = ((re - C_TABLE_MIN) / C_TABLE_STEP).round();
    if i < 0.0 || i as usize >= C_TABLE.len() {
        None
    } else {
        Some(C_TABLE[i as usize])
    }
}

/// 2√π 2^{(1+z)/2} / Γ(−z/2).
pub fn c_of(z: Complex64) -> Complex64 {
    let nu = 0.5 * (1.0 + z);
    2.0 * PI.sqrt() * (nu * std::f64::consts::LN_2).exp() * recip_gamma(-0.5 * z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialParam {
    pub z: Complex64,
    /// (1+z)/2, the order in the closed form.
    pub nu: Complex64,
    /// (−1−z)/2, the order in the small-x series.
    pub nu_series: Complex64,
    pub c_z: Complex64,
}

impl PotentialParam {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(HypwaveError::domain(format!("exponent must be finite, got {z}")));
        }
        let bound = c_table(z.re)
            .ok_or_else(|| HypwaveError::domain(format!("Re z = {} outside [-24, 24]", z.re)))?;
        let nu = 0.5 * (1.0 + z);
        let c_z = c_of(z);
        if c_z.norm() > bound * (0.5 * PI * z.im.abs()).exp() {
            return Err(HypwaveError::domain(format!("|C_z| = {:e} exceeds its tabulated envelope", c_z.norm())));
        }
        Ok(PotentialParam { z, nu, nu_series: -nu, c_z })
    }
}

fn nonzero(x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        Err(HypwaveError::domain(format!("F_z needs finite x != 0, got {x}")))
    } else {
        Ok(x.abs())
    }
}

/// F_z(x) from the closed form; even in x.
pub fn f_z(p: &PotentialParam, x: f64) -> Result<Complex64> {
    let ax = nonzero(x)?;
    if p.c_z == Complex64::new(0.0, 0.0) {
        return Ok(p.c_z);
    }
    Ok(p.c_z * (-p.nu * ax.ln()).exp() * k_eval(p.nu, ax)?)
}

fn near_pole(a: Complex64) -> bool {
    a.re < RATIO_POLE_MARGIN && Complex64::new(a.re - a.re.round(), a.im).norm() < RATIO_POLE_MARGIN
}

/// −Γ(−w/2−1)/(2Γ(−w/2)), the factor in F_w' = ratio(w) x F_{w+2}.
fn ratio(w: Complex64) -> Result<Complex64> {
    let a = -0.5 * w;
    if near_pole(a) || near_pole(a - 1.0) {
        return Err(HypwaveError::domain(format!("derivative recursion meets a gamma pole at z = {w}")));
    }
    Ok((w + 2.0).inv())
}

/// Coefficients of F_z^{(j)}(x) = Σ_m a_{j,m} x^{2m−j} F_{z+2m}(x), x > 0,
/// for j = 0..=jmax, obtained by differentiating term by term.
fn expansion(z: Complex64, jmax: usize) -> Result<Vec<Vec<Complex64>>> {
    let ratios: Vec<Complex64> = (0..jmax).map(|m| ratio(z + 2.0 * m as f64)).collect::<Result<_>>()?;
    let mut levels = vec![vec![Complex64::new(1.0, 0.0)]];
    for j in 0..jmax {
        let cur = &levels[j];
        let mut next = vec![Complex64::new(0.0, 0.0); j + 2];
        for (m, &a) in cur.iter().enumerate() {
            // d/dx [x^q F_w] = q x^{q−1} F_w + ratio(w) x^{q+1} F_{w+2}
            let q = 2.0 * m as f64 - j as f64;
            next[m] += a * q;
            next[m + 1] += a * ratios[m];
        }
        levels.push(next);
    }
    Ok(levels)
}

/// F_z^{(j)}(x) for j = 0..=jmax, sharing one K_{ν+m} sequence.
pub fn f_z_derivs(p: &PotentialParam, x: f64, jmax: usize) -> Result<Vec<Complex64>> {
    let ax = nonzero(x)?;
    let levels = expansion(p.z, jmax)?;
    let ks = k_sequence(p.nu, ax, jmax + 1)?;
    let ln_x = ax.ln();
    let fs: Vec<Complex64> = (0..=jmax)
        .map(|m| {
            let c = c_of(p.z + 2.0 * m as f64);
            if c == Complex64::new(0.0, 0.0) {
                c
            } else {
                c * (-(p.nu + m as f64) * ln_x).exp() * ks[m]
            }
        })
        .collect();
    let mut out = Vec::with_capacity(jmax + 1);
    for (j, coeffs) in levels.iter().enumerate() {
        let mut v = Complex64::new(0.0, 0.0);
        for (m, &a) in coeffs.iter().enumerate() {
            if a != Complex64::new(0.0, 0.0) {
                v += a * ax.powi(2 * m as i32 - j as i32) * fs[m];
            }
        }
        out.push(if x < 0.0 && j % 2 == 1 { -v } else { v });
    }
    Ok(out)
}

/// F_z^{(j)}(x), j ≤ 8.
pub fn f_z_deriv(p: &PotentialParam, x: f64, j: usize) -> Result<Complex64> {
    if j > MAX_DERIVATIVE {
        return Err(HypwaveError::domain(format!("derivative order {j} exceeds {MAX_DERIVATIVE}")));
    }
    if j == 0 {
        return f_z(p, x);
    }
    Ok(f_z_derivs(p, x, j)?[j])
}

/// F_z(x) = 2∫₀^∞ ⟨η⟩^z cos(|x|η) dη by direct oscillatory quadrature.
pub fn f_z_quadrature(p: &PotentialParam, x: f64) -> Result<Estimate> {
    let ax = nonzero(x)?;
    if p.z.re > -1.5 {
        return Err(HypwaveError::domain(format!("quadrature oracle needs Re z <= -1.5, got {}", p.z.re)));
    }
    let half = 0.5 * p.z;
    let amp = |e: &Jet| (e * e).add_constant(Complex64::new(1.0, 0.0)).powc(half);
    let e = fourier_half_line(&amp, ax, Trig::Cos, 5e-8)?;
    Ok(Estimate { value: 2.0 * e.value, abs_error: 2.0 * e.abs_error })
}

/// d_j^1 = 2^{ν−2j}/(j! Γ(j+1−ν)) and d_j^2 = 2^{−ν−2j}/(j! Γ(j+1+ν)).
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoeffs {
    pub nu: Complex64,
    pub d1: Vec<Complex64>,
    pub d2: Vec<Complex64>,
    pub order: usize,
}

impl SeriesCoeffs {
    pub fn new(nu: Complex64, order: usize) -> Self {
        let mut d1 = Vec::with_capacity(order);
        let mut d2 = Vec::with_capacity(order);
        let ln2 = std::f64::consts::LN_2;
        let mut ln_fact = 0.0;
        for j in 0..order {
            let jf = j as f64;
            if j > 0 {
                ln_fact += jf.ln();
            }
            d1.push(((nu - 2.0 * jf) * ln2 - ln_fact).exp() * recip_gamma(jf + 1.0 - nu));
            d2.push(((-nu - 2.0 * jf) * ln2 - ln_fact).exp() * recip_gamma(jf + 1.0 + nu));
        }
        SeriesCoeffs { nu, d1, d2, order }
    }

    /// Coefficients for the small-x series of F_z; 40 terms reach the double
    /// precision floor on (0, 1].
    pub fn for_param(p: &PotentialParam) -> Self {
        SeriesCoeffs::new(p.nu_series, 40)
    }

    /// g_z(r) = Σ d_j^1 r^j, a function of r = x² only.
    pub fn g(&self, r: f64) -> Complex64 {
        self.d1.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &d| acc * r + d)
    }

    /// h_z(r) = −Σ d_j^2 r^j.
    pub fn h(&self, r: f64) -> Complex64 {
        -self.d2.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &d| acc * r + d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub g_part: Complex64,
    pub h_part: Complex64,
    pub total: Complex64,
}

/// F_z(x) = C_z π/(2 sin νπ) [g_z(x²) + x^{2ν} h_z(x²)], ν = (−1−z)/2.
pub fn f_z_series(p: &PotentialParam, x: f64, coeffs: &SeriesCoeffs) -> Result<SeriesValue> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(HypwaveError::domain(format!("series needs 0 < x <= 1, got {x}")));
    }
    let nu = p.nu_series;
    if Complex64::new(nu.re - nu.re.round(), nu.im).norm() < SERIES_INTEGER_MARGIN {
        return Err(HypwaveError::domain(format!("series needs non-integer ν, got {nu}")));
    }
    if coeffs.nu != nu {
        return Err(HypwaveError::domain("series coefficients built for a different order"));
    }
    let r = x * x;
    let g_part = coeffs.g(r);
    let h_part = coeffs.h(r);
    let front = p.c_z * PI / (2.0 * sinpi(nu));
    let total = front * (g_part + (2.0 * nu * x.ln()).exp() * h_part);
    Ok(SeriesValue { g_part, h_part, total })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(l: usize, p: usize) -> f64 {
    (0..p).fold(1.0, |acc, i| acc * (l - i) as f64)
}

/// ∂_r^p of g(r) = Σ_{j≥1} d_j^1 C_j Σ_{l<j} binom(2j, 2l+1) r^l with
/// C_j = (−c)^j, summed term by term.
pub fn series_g_deriv(coeffs: &SeriesCoeffs, r: f64, p: usize, c: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &d) in coeffs.d1.iter().enumerate().skip(p + 1) {
        let cj = (-c).powi(j as i32);
        let mut inner = 0.0;
        for l in p..j {
            inner += binomial(2 * j, 2 * l + 1) * falling(l, p) * r.powi((l - p) as i32);
        }
        sum += d * cj * inner;
    }
    sum
}

/// ∂_r^p of h(r) = Σ_{j≥0} d_j^2 r^j.
pub fn series_h_deriv(coeffs: &SeriesCoeffs, r: f64, p: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &d) in coeffs.d2.iter().enumerate().skip(p) {
        sum += d * falling(j, p) * r.powi((j - p) as i32);
    }
    sum
}

fn check_grid(name: &str, xs: &[f64], ok: impl Fn(f64) -> bool) -> Result<()> {
    if xs.is_empty() {
        return Err(HypwaveError::Grid(format!("{name}: empty grid")));
    }
    if let Some(x) = xs.iter().find(|&&x| !x.is_finite() || !ok(x)) {
        return Err(HypwaveError::Grid(format!("{name}: point {x} outside the admissible range")));
    }
    Ok(())
}

fn cell(params: Vec<f64>, value: f64, weight: f64, err_est: f64) -> Cell {
    Cell { params, value, weight, ratio: value * weight, err_est }
}

/// Series terms for the g/h derivative sums; kept large enough that the omitted
/// part is below double precision for c ≤ 100.
const SERIES_BOUND_TERMS: usize = 80;

/// Sup over r ∈ grid of |∂^p g(r)| e^{−π|s|} and |∂^p h(r)| e^{−π|s|},
/// ν = μ + is.  Cells carry (part, r) with part 0 for g and 1 for h.
pub fn series_gh_derivative_bound(nu: Complex64, p: usize, c_growth: f64, rs: &[f64]) -> Result<BoundReport> {
    check_grid("series.gh", rs, |r| r > 0.0 && r <= 1.0)?;
    if p > 4 {
        return Err(HypwaveError::Grid(format!("derivative order {p} exceeds 4")));
    }
    if !(c_growth > 0.0) {
        return Err(HypwaveError::Grid(format!("growth constant must be positive, got {c_growth}")));
    }
    let coeffs = SeriesCoeffs::new(nu, SERIES_BOUND_TERMS);
    let w = (-PI * nu.im.abs()).exp();
    let mut cells = Vec::with_capacity(2 * rs.len());
    for &r in rs {
        cells.push(cell(vec![0.0, r], series_g_deriv(&coeffs, r, p, c_growth).norm(), w, 0.0));
        cells.push(cell(vec![1.0, r], series_h_deriv(&coeffs, r, p).norm(), w, 0.0));
    }
    let grid = format!("r: {} points in [{:e}, {:e}]", rs.len(), rs[0], rs[rs.len() - 1]);
    Ok(BoundReport::new(format!("series.gh.nu{}{:+}i.p{p}", nu.re, nu.im), &["part", "r"], grid, cells, vec![]))
}

fn is_rez_integer(re: f64) -> bool {
    (re - re.round()).abs() < 1e-12
}

/// 𝓕(|η|^z)(λ) as displayed for z = −k + is:
/// 2^{z} √π Γ((1+z)/2)/Γ(−z/2) |λ|^{−1−z}.
///
/// The Fourier transform of |η|^z is twice this expression; the subtraction
/// check in [`riesz_subtraction_probe`] accounts for the factor.
pub fn riesz(z: Complex64, lambda: f64) -> Result<Complex64> {
    if !is_rez_integer(z.re) || z.re > 0.0 {
        return Err(HypwaveError::domain(format!("Riesz form needs Re z = -k, got {z}")));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(HypwaveError::domain(format!("Riesz form needs λ != 0, got {lambda}")));
    }
    let g = gamma(0.5 * (1.0 + z))?;
    let front = (z * std::f64::consts::LN_2).exp() * PI.sqrt() * g * recip_gamma(-0.5 * z);
    Ok(front * (-(1.0 + z) * lambda.abs().ln()).exp())
}

/// The x^{2ν} h_z(0) part of F_z as a function of x > 0, differentiated m
/// times: the homogeneous piece that the Riesz potential reproduces.
fn riesz_deriv(z: Complex64, x: f64, m: usize) -> Result<Complex64> {
    let mut v = 2.0 * riesz(z, x)?;
    let e = -1.0 - z;
    for i in 0..m {
        v *= (e - i as f64) / x;
    }
    Ok(v)
}

/// Case envelope for F_z^{(j)}(x), without its constant.
pub fn deriv_envelope(z: Complex64, j: usize, x: f64) -> f64 {
    let w = (2.0 * PI * z.im.abs()).exp();
    if x >= 1.0 {
        return w * x.powf(-0.5 * z.re - 1.0) * (-x).exp();
    }
    let jf = j as f64;
    let critical = -z.re - 1.0;
    if jf > critical + 1e-12 {
        w * x.powf(-z.re - jf - 1.0)
    } else if (jf - critical).abs() < 1e-12 && j % 2 == 0 {
        let log = (1.0 / x).ln();
        let cap = if z.im == 0.0 { log } else { (1.0 / z.im.abs()).min(log) };
        w * (cap + 1.0)
    } else {
        w
    }
}

/// Sup of |F_z^{(j)}(x)| / envelope over the grid (both regimes).
pub fn check_deriv_envelope(p: &PotentialParam, j: usize, xs: &[f64]) -> Result<BoundReport> {
    check_grid("potential.deriv", xs, |x| x > 0.0)?;
    if p.z.im == 0.0 {
        return Err(HypwaveError::Grid("the derivative envelope needs a non-real exponent".into()));
    }
    let mut cells = Vec::new();
    let mut failed = Vec::new();
    for &x in xs {
        match f_z_deriv(p, x, j) {
            Ok(v) => cells.push(cell(vec![x], v.norm(), 1.0 / deriv_envelope(p.z, j, x), 0.0)),
            Err(e) => failed.push(FailedCell { params: vec![x], error: e.to_string() }),
        }
    }
    let id = format!("potential.deriv.z{}{:+}i.j{j}", p.z.re, p.z.im);
    let grid = format!("x: {} points in [{:e}, {:e}]", xs.len(), xs[0], xs[xs.len() - 1]);
    Ok(BoundReport::new(id, &["x"], grid, cells, failed))
}

fn decay_hypothesis(k: usize, beta: f64) -> Result<()> {
    let ok = match k {
        1 | 2 => beta >= k as f64,
        3 => beta > 3.0,
        _ => return Err(HypwaveError::domain(format!("the decay bound covers k = 1, 2, 3, got {k}"))),
    };
    if ok {
        Ok(())
    } else {
        Err(HypwaveError::domain(format!("β = {beta} violates the decay-bound hypothesis for k = {k}")))
    }
}

/// Sup over (λ, s) of |s e^{−s²} F^{(m)}_{−k+is}(βλ)| e^{k|λ|}.
pub fn check_decay(k: usize, beta: f64, m: usize, lambdas: &[f64], ss: &[f64]) -> Result<BoundReport> {
    decay_hypothesis(k, beta)?;
    if m + 1 > k {
        return Err(HypwaveError::domain(format!("derivative order {m} must be below k = {k}")));
    }
    check_grid("potential.decay", lambdas, |l| l != 0.0)?;
    check_grid("potential.decay", ss, |_| true)?;
    let mut cells = Vec::new();
    let mut failed = Vec::new();
    for &lambda in lambdas {
        for &s in ss {
            let weight = (k as f64 * lambda.abs()).exp();
            if s == 0.0 {
                cells.push(cell(vec![lambda, s], 0.0, weight, 0.0));
                continue;
            }
            let z = Complex64::new(-(k as f64), s);
            let r = PotentialParam::new(z).and_then(|p| f_z_deriv(&p, beta * lambda, m));
            match r {
                Ok(v) => cells.push(cell(vec![lambda, s], (s * (-s * s).exp()).abs() * v.norm(), weight, 0.0)),
                Err(e) => failed.push(FailedCell { params: vec![lambda, s], error: e.to_string() }),
            }
        }
    }
    let grid = format!("lambda: {} points, s: {} points", lambdas.len(), ss.len());
    Ok(BoundReport::new(format!("potential.decay.k{k}.b{beta}.m{m}"), &["lambda", "s"], grid, cells, failed))
}

/// Probe points βλ for the subtraction check.
pub const RIESZ_PROBES: [f64; 3] = [0.1, 0.01, 0.001];
/// The second Cauchy difference must shrink at least by this factor.
pub const RIESZ_CONTRACTION: f64 = 0.5;

/// Q(x) = F^{(k−1)}_{−k+is}(x) − ∂^{k−1}[2 R_{−k+is}](x) at x = βλ for the
/// probes λ = 0.1, 0.01, 0.001.  Subtracting the homogeneous part leaves a
/// C^{k−1} remainder, so Q is Cauchy as λ → 0; one cell per s has ratio
/// |Q₃ − Q₂| / |Q₂ − Q₁|, with ceiling 1/2.
pub fn riesz_subtraction_probe(k: usize, beta: f64, ss: &[f64]) -> Result<BoundReport> {
    decay_hypothesis(k, beta)?;
    check_grid("potential.riesz", ss, |s| s != 0.0)?;
    let m = k - 1;
    let mut cells = Vec::new();
    let mut failed = Vec::new();
    for &s in ss {
        let z = Complex64::new(-(k as f64), s);
        let qs: Result<Vec<Complex64>> = PotentialParam::new(z).and_then(|p| {
            RIESZ_PROBES
                .iter()
                .map(|&l| {
                    let x = beta * l;
                    Ok(f_z_deriv(&p, x, m)? - riesz_deriv(z, x, m)?)
                })
                .collect()
        });
        match qs {
            Ok(q) => {
                let d1 = (q[1] - q[0]).norm();
                let d2 = (q[2] - q[1]).norm();
                cells.push(cell(vec![s], d2, 1.0 / d1, 0.0));
            }
            Err(e) => failed.push(FailedCell { params: vec![s], error: e.to_string() }),
        }
    }
    let grid = format!("lambda: {RIESZ_PROBES:?}, s: {} points", ss.len());
    Ok(BoundReport::new(format!("potential.riesz.k{k}.b{beta}"), &["s"], grid, cells, failed).with_ceiling(RIESZ_CONTRACTION))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lorentzian_closed_form() {
        let p = PotentialParam::new(c(-2.0, 0.0)).unwrap();
        for x in [0.1, 1.0, 5.0] {
            let v = f_z(&p, x).unwrap();
            assert!((v.re - PI * (-x).exp()).abs() < 1e-13 * v.re);
        }
        assert!(f_z(&p, 0.0).is_err());
    }

    #[test]
    fn expansion_matches_hand_computation() {
        // F'' = r(z) F_{z+2} + r(z) r(z+2) x² F_{z+4}
        let z = c(-3.0, 0.7);
        let l = expansion(z, 2).unwrap();
        let r0 = ratio(z).unwrap();
        let r1 = ratio(z + 2.0).unwrap();
        assert_eq!(l[2].len(), 3);
        assert!(l[2][0].norm() == 0.0);
        assert!((l[2][1] - r0).norm() < 1e-15);
        assert!((l[2][2] - r0 * r1).norm() < 1e-15);
    }

    #[test]
    fn table_covers_supported_exponents() {
        assert!(PotentialParam::new(c(-24.0, 3.0)).is_ok());
        assert!(PotentialParam::new(c(24.0, -3.0)).is_ok());
        assert!(PotentialParam::new(c(24.5, 0.0)).is_err());
    }
}
