//! Complex gamma function and the classical inequalities for |Γ(x+iy)|.

use crate::error::{HypwaveError, Result};
use crate::report::{BoundReport, Cell};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type ComplexScalar = Complex64;

/// Distance to a nonpositive integer below which `gamma` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;
/// Minimum distance of inequality-grid abscissae from the poles.
pub const GRID_POLE_MARGIN: f64 = 1e-6;
/// Violation slack accepted by the inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// sin(πx) with exact argument reduction.
fn sinpi_real(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn cospi_real(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let c = (PI * r).cos();
    if (n as i64) % 2 == 0 {
        c
    } else {
        -c
    }
}

/// sin(πz) for complex z, accurate near the integers.
pub fn sinpi(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    Complex64::new(
        sinpi_real(a) * (PI * b).cosh(),
        cospi_real(a) * (PI * b).sinh(),
    )
}

/// Lanczos log-gamma, valid for Re z >= 1/2.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z1 = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z1 + i as f64);
    }
    let t = z1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z1 + 0.5) * t.ln() - t + a.ln()
}

fn nearest_pole_distance(z: Complex64) -> Option<f64> {
    if z.re > 0.5 {
        return None;
    }
    let n = z.re.round().min(0.0);
    Some((z - n).norm())
}

/// A logarithm of Γ(z): its real part is ln|Γ(z)| and its exponential is Γ(z).
/// The imaginary part is not normalised to the principal branch.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if let Some(d) = nearest_pole_distance(z) {
        if d < POLE_TOLERANCE {
            return Err(HypwaveError::Pole { re: z.re, im: z.im });
        }
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        Ok(Complex64::new(PI.ln(), 0.0) - sinpi(z).ln() - ln_gamma_right(1.0 - z))
    }
}

/// Γ(z).
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if let Some(d) = nearest_pole_distance(z) {
        if d < POLE_TOLERANCE {
            return Err(HypwaveError::Pole { re: z.re, im: z.im });
        }
    }
    let g = if z.re >= 0.5 {
        ln_gamma_right(z).exp()
    } else {
        PI / (sinpi(z) * ln_gamma_right(1.0 - z).exp())
    };
    if g.re.is_finite() && g.im.is_finite() {
        Ok(g)
    } else {
        Err(HypwaveError::domain(format!("gamma overflows at {z}")))
    }
}

/// 1/Γ(z); entire, exactly zero at the nonpositive integers.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        sinpi(z) * ln_gamma_right(1.0 - z).exp() / PI
    }
}

/// ln|1/Γ(z)|, finite away from the poles.
pub fn ln_abs_recip_gamma(z: Complex64) -> f64 {
    if z.re >= 0.5 {
        -ln_gamma_right(z).re
    } else {
        sinpi(z).norm().ln() + ln_gamma_right(1.0 - z).re - PI.ln()
    }
}

/// C(x) = ½ Σ_{k≥0} (k+x)^{-2}, truncated after `terms` terms plus the tail
/// lower bound 1/(terms+x).  Using the lower bound keeps the growth check strict.
pub fn c_constant(x: f64, terms: usize) -> f64 {
    let mut s = 0.0;
    for k in (0..terms).rev() {
        let d = k as f64 + x;
        s += 1.0 / (d * d);
    }
    0.5 * (s + 1.0 / (terms as f64 + x))
}

/// Sample points for the gamma inequality checks.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaGrid {
    /// Real parts, none closer than [`GRID_POLE_MARGIN`] to a nonpositive integer.
    pub xs: Vec<f64>,
    /// Imaginary parts, all nonzero.
    pub ys: Vec<f64>,
    /// Nonpositive integers -N used for the product bound.
    pub poles: Vec<u32>,
}

impl GammaGrid {
    /// x ∈ [−6, 6] with pole-hugging extras, y ∈ [−20, 20] with small-|y| extras.
    /// Each level doubles the density of the uniform part.
    pub fn standard(level: u32) -> Self {
        let m = 1usize << level;
        let mut xs: Vec<f64> = (0..=48 * m)
            .map(|i| -6.0 + 0.25 * i as f64 / m as f64 + 0.037)
            .filter(|x| *x <= 6.0)
            .collect();
        for n in 0..=5 {
            for d in [1e-3, 1e-2, 0.1] {
                xs.push(-(n as f64) + d);
                xs.push(-(n as f64) - d);
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut ys: Vec<f64> = (0..=160 * m)
            .map(|i| -20.0 + 0.25 * i as f64 / m as f64)
            .filter(|y| *y != 0.0)
            .collect();
        for d in [1e-3, 1e-2, 0.1] {
            ys.push(d);
            ys.push(-d);
        }
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        GammaGrid { xs, ys, poles: (0..=6).collect() }
    }

    fn validate(&self) -> Result<()> {
        if self.xs.is_empty() || self.ys.is_empty() {
            return Err(HypwaveError::Grid("empty gamma grid".into()));
        }
        for &x in &self.xs {
            if !x.is_finite() || x.abs() > 6.0 + 1e-12 {
                return Err(HypwaveError::Grid(format!("x = {x} outside [-6, 6]")));
            }
            if x <= 0.5 && (x - x.round()).abs() < GRID_POLE_MARGIN && x.round() <= 0.0 {
                return Err(HypwaveError::Grid(format!("x = {x} is within the pole margin")));
            }
        }
        for &y in &self.ys {
            if !y.is_finite() || y == 0.0 || y.abs() > 20.0 + 1e-12 {
                return Err(HypwaveError::Grid(format!("y = {y} not in [-20, 20] \\ {{0}}")));
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("{} x-points in [-6,6], {} y-points in [-20,20]", self.xs.len(), self.ys.len())
    }
}

fn cell(params: Vec<f64>, log_lhs: f64, log_rhs: f64) -> Cell {
    Cell {
        params,
        value: log_lhs.exp(),
        weight: (-log_rhs).exp(),
        ratio: (log_lhs - log_rhs).exp(),
        err_est: 0.0,
    }
}

/// Ceiling for the exact inequalities: a ratio lhs/rhs of at most 1 + slack.
pub const INEQUALITY_CEILING: f64 = 1.0 + INEQUALITY_SLACK;
/// Onset of the asymptotic bound.
pub const ASYMPTOTIC_ONSET: f64 = 5.0;
/// |y| splitting the core band from the tail band in the weighted check.
pub const CORE_BAND: f64 = 10.0;

/// Checks the gamma inequalities on `grid`, one report per inequality.
///
/// Ratios are lhs/rhs computed in log space.  The exact inequalities
/// (`gamma.modulus`: |Γ(x+iy)| ≤ Γ(x); `gamma.growth`:
/// |1/Γ(x+iy)| ≤ e^{C(x)y²}/Γ(x); `gamma.poles`: the product bound at x = −N;
/// and `gamma.weighted_tail`, which asks that the weighted modulus
/// |1/Γ(x+iy)|e^{-π|y|} on the tail band never exceed its core-band maximum)
/// carry the ceiling `1 + 1e-9`.  `gamma.asymptotic` (only |y| ≥ 5) and
/// `gamma.weighted` (the weighted modulus itself) are returned without a
/// ceiling; they are regression quantities.
pub fn check_gamma_inequalities(grid: &GammaGrid) -> Result<Vec<BoundReport>> {
    grid.validate()?;
    let desc = grid.describe();
    let mut modulus = Vec::new();
    let mut growth = Vec::new();
    let mut asymptotic = Vec::new();
    let mut tail_cells = Vec::new();
    let mut weighted = Vec::new();
    for &x in &grid.xs {
        let lg_x = -ln_abs_recip_gamma(Complex64::new(x, 0.0));
        let cx = c_constant(x, 10_000);
        let mut core: f64 = f64::NEG_INFINITY;
        // The weighted modulus decreases in |y| past the band edge, so the
        // edge itself is always a tail candidate.
        let mut tail = ln_abs_recip_gamma(Complex64::new(x, CORE_BAND)) - PI * CORE_BAND;
        let mut tail_arg = CORE_BAND;
        for &y in &grid.ys {
            let z = Complex64::new(x, y);
            let lr = ln_abs_recip_gamma(z);
            modulus.push(cell(vec![x, y], -lr, lg_x));
            growth.push(cell(vec![x, y], lr, -lg_x + cx * y * y));
            if y.abs() >= ASYMPTOTIC_ONSET {
                asymptotic.push(cell(vec![x, y], lr, (0.5 - x) * y.abs().ln() + 0.5 * PI * y.abs()));
            }
            let w = lr - PI * y.abs();
            weighted.push(cell(vec![x, y], lr, PI * y.abs()));
            if y.abs() <= CORE_BAND {
                core = core.max(w);
            } else if w > tail {
                tail = w;
                tail_arg = y;
            }
        }
        if core.is_finite() {
            tail_cells.push(cell(vec![x, tail_arg], tail, core));
        }
    }
    let mut poles_cells = Vec::new();
    for &n in &grid.poles {
        for &y in &grid.ys {
            let lr = ln_abs_recip_gamma(Complex64::new(-(n as f64), y));
            let mut rhs = y * y;
            for k in 0..=n {
                rhs += Complex64::new(k as f64, y).norm().ln();
            }
            poles_cells.push(cell(vec![-(n as f64), y], lr, rhs));
        }
    }
    let names = ["x", "y"];
    Ok(vec![
        BoundReport::new("gamma.modulus", &names, desc.clone(), modulus, vec![]).with_ceiling(INEQUALITY_CEILING),
        BoundReport::new("gamma.growth", &names, desc.clone(), growth, vec![]).with_ceiling(INEQUALITY_CEILING),
        BoundReport::new("gamma.poles", &names, desc.clone(), poles_cells, vec![]).with_ceiling(INEQUALITY_CEILING),
        BoundReport::new("gamma.asymptotic", &names, desc.clone(), asymptotic, vec![]),
        BoundReport::new("gamma.weighted_tail", &names, desc.clone(), tail_cells, vec![]).with_ceiling(INEQUALITY_CEILING),
        BoundReport::new("gamma.weighted", &names, desc, weighted, vec![]),
    ])
}
