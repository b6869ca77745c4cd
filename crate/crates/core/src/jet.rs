//! Truncated Taylor expansions with complex coefficients.
//!
//! A `Jet` of order p at center c holds f(c), f'(c)/1!, ..., f^{(p)}(c)/p!.
//! Products and lifts truncate to the smaller order of their operands.

use num_complex::Complex64;
use smallvec::SmallVec;
use std::ops::{Add, Mul, Neg, Sub};

type Coeffs = SmallVec<[Complex64; 10]>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub center: f64,
    pub coeffs: Coeffs,
}

impl Jet {
    pub fn from_coeffs(center: f64, coeffs: &[Complex64]) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { center, coeffs: coeffs.iter().copied().collect() }
    }

    pub fn from_real(center: f64, coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { center, coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect() }
    }

    pub fn constant(center: f64, value: Complex64, order: usize) -> Self {
        let mut coeffs: Coeffs = SmallVec::from_elem(ZERO, order + 1);
        coeffs[0] = value;
        Jet { center, coeffs }
    }

    /// The identity function u ↦ u expanded at `center`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut j = Jet::constant(center, Complex64::new(center, 0.0), order);
        if order >= 1 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// The i-th derivative at the center.
    pub fn derivative_at_center(&self, i: usize) -> Complex64 {
        let mut f = 1.0;
        for k in 2..=i {
            f *= k as f64;
        }
        self.coeffs[i] * f
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet { center: self.center, coeffs: self.coeffs.iter().take(order + 1).copied().collect() }
    }

    pub fn scale(&self, a: Complex64) -> Jet {
        Jet { center: self.center, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add_constant(&self, a: Complex64) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] += a;
        j
    }

    /// Taylor polynomial evaluated at center + h.
    pub fn eval_offset(&self, h: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * h + c)
    }

    /// d/du, lowering the order by one.
    pub fn derivative(&self) -> Jet {
        if self.order() == 0 {
            return Jet::constant(self.center, ZERO, 0);
        }
        Jet {
            center: self.center,
            coeffs: (1..self.coeffs.len()).map(|i| self.coeffs[i] * i as f64).collect(),
        }
    }

    /// (1/sinh u) d/du, the τ-derivative for τ = cosh u − 1; lowers the order by one.
    pub fn tau_derivative(&self) -> Jet {
        let d = self.derivative();
        let inv = csch_jet(self.center, d.order());
        &d * &inv
    }

    pub fn recip(&self) -> Jet {
        let n = self.coeffs.len();
        let g = &self.coeffs;
        let mut h: Coeffs = SmallVec::from_elem(ZERO, n);
        h[0] = g[0].inv();
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..=k {
                s += g[j] * h[k - j];
            }
            h[k] = -s * h[0];
        }
        Jet { center: self.center, coeffs: h }
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self * &other.recip()
    }

    pub fn exp(&self) -> Jet {
        let n = self.coeffs.len();
        let g = &self.coeffs;
        let mut h: Coeffs = SmallVec::from_elem(ZERO, n);
        h[0] = g[0].exp();
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..=k {
                s += g[j] * h[k - j] * j as f64;
            }
            h[k] = s / k as f64;
        }
        Jet { center: self.center, coeffs: h }
    }

    /// Principal logarithm; the constant term must be nonzero.
    pub fn ln(&self) -> Jet {
        let n = self.coeffs.len();
        let g = &self.coeffs;
        let mut h: Coeffs = SmallVec::from_elem(ZERO, n);
        h[0] = g[0].ln();
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..k {
                s += h[j] * g[k - j] * j as f64;
            }
            h[k] = (g[k] - s / k as f64) / g[0];
        }
        Jet { center: self.center, coeffs: h }
    }

    /// g^a with the principal branch at the constant term.
    pub fn powc(&self, a: Complex64) -> Jet {
        let n = self.coeffs.len();
        let g = &self.coeffs;
        let mut h: Coeffs = SmallVec::from_elem(ZERO, n);
        h[0] = g[0].powc(a);
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..=k {
                s += g[j] * h[k - j] * ((a + 1.0) * j as f64 - k as f64);
            }
            h[k] = s / (g[0] * k as f64);
        }
        Jet { center: self.center, coeffs: h }
    }

    pub fn powf(&self, a: f64) -> Jet {
        self.powc(Complex64::new(a, 0.0))
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    /// (sinh g, cosh g).
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        let n = self.coeffs.len();
        let g = &self.coeffs;
        let mut s: Coeffs = SmallVec::from_elem(ZERO, n);
        let mut c: Coeffs = SmallVec::from_elem(ZERO, n);
        s[0] = g[0].sinh();
        c[0] = g[0].cosh();
        for k in 1..n {
            let (mut ss, mut cc) = (ZERO, ZERO);
            for j in 1..=k {
                let w = g[j] * j as f64;
                ss += w * c[k - j];
                cc += w * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Jet { center: self.center, coeffs: s }, Jet { center: self.center, coeffs: c })
    }

    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }

    /// f ∘ self, where `outer` holds the Taylor coefficients of f at self's
    /// constant term.
    pub fn compose(&self, outer: &[Complex64]) -> Jet {
        let n = self.coeffs.len().min(outer.len());
        let mut d = self.truncate(n - 1);
        d.coeffs[0] = ZERO;
        let mut acc = Jet::constant(self.center, outer[n - 1], n - 1);
        for i in (0..n - 1).rev() {
            acc = &acc * &d;
            acc.coeffs[0] += outer[i];
        }
        acc
    }
}

/// Jet of 1/sinh u at u0 > 0.
pub fn csch_jet(u0: f64, order: usize) -> Jet {
    Jet::variable(u0, order).sinh().recip()
}

/// Jet of u/sinh u in the variable q = u², at q = 0: Σ a_i q^i.
pub fn u_over_sinh_in_q(order: usize) -> Vec<f64> {
    // sinh(u)/u = Σ q^i/(2i+1)!; invert the power series.
    let n = order + 1;
    let mut s = vec![0.0; n];
    let mut f = 1.0;
    for (i, si) in s.iter_mut().enumerate() {
        if i > 0 {
            f *= ((2 * i) * (2 * i + 1)) as f64;
        }
        *si = 1.0 / f;
    }
    let mut h = vec![0.0; n];
    h[0] = 1.0;
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += s[j] * h[k - j];
        }
        h[k] = -acc;
    }
    h
}

/// Coefficients of q(τ) = arccosh(1+τ)² at τ = 0, i.e. the series reversion
/// of τ = cosh(√q) − 1 = Σ_{m≥1} q^m/(2m)!.
pub fn q_of_tau(order: usize) -> Vec<f64> {
    let n = order + 1;
    let mut tau_of_q = vec![0.0; n];
    let mut f = 1.0;
    for (m, t) in tau_of_q.iter_mut().enumerate().skip(1) {
        f *= ((2 * m - 1) * (2 * m)) as f64;
        *t = 1.0 / f;
    }
    // Fixed point q = 2(τ − Σ_{m≥2} q^m/(2m)!), exact through one more order per pass.
    let mut q = vec![0.0; n];
    if n > 1 {
        q[1] = 2.0;
    }
    for _ in 0..n {
        let mut next = vec![0.0; n];
        if n > 1 {
            next[1] = 1.0;
        }
        let mut pw = q.clone();
        for t in tau_of_q.iter().skip(2) {
            pw = mul_real(&pw, &q);
            for (a, b) in next.iter_mut().zip(&pw) {
                *a -= t * b;
            }
        }
        q = next.into_iter().map(|x| 2.0 * x).collect();
    }
    q
}

fn mul_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    let mut c = vec![0.0; n];
    for i in 0..n {
        for j in 0..=i {
            c[i] += a[j] * b[i - j];
        }
    }
    c
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let n = self.coeffs.len().min(o.coeffs.len());
        Jet { center: self.center, coeffs: (0..n).map(|i| self.coeffs[i] + o.coeffs[i]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let n = self.coeffs.len().min(o.coeffs.len());
        Jet { center: self.center, coeffs: (0..n).map(|i| self.coeffs[i] - o.coeffs[i]).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.coeffs.len().min(o.coeffs.len());
        let mut c: Coeffs = SmallVec::from_elem(ZERO, n);
        for i in 0..n {
            for j in 0..=i {
                c[i] += self.coeffs[j] * o.coeffs[i - j];
            }
        }
        Jet { center: self.center, coeffs: c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_of_tau_inverts_cosh() {
        let q = q_of_tau(6);
        let tau: f64 = 0.01;
        let approx: f64 = q.iter().enumerate().map(|(i, c)| c * tau.powi(i as i32)).sum();
        let exact = (1.0 + tau).acosh().powi(2);
        assert!((approx - exact).abs() < 1e-16);
        assert_eq!(q[1], 2.0);
        assert!((q[2] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn u_over_sinh_series() {
        let a = u_over_sinh_in_q(8);
        let u: f64 = 0.3;
        let approx: f64 = a.iter().enumerate().map(|(i, c)| c * (u * u).powi(i as i32)).sum();
        assert!((approx - u / u.sinh()).abs() < 1e-13);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = Jet::variable(0.7, 6);
        let g = &x.sinh() + &Jet::constant(0.7, Complex64::new(2.0, 1.0), 6);
        let back = g.ln().exp();
        for (a, b) in back.coeffs.iter().zip(&g.coeffs) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn compose_matches_direct() {
        let x = Jet::variable(0.4, 5);
        let inner = x.sinh();
        let g0 = inner.value();
        let outer: Vec<Complex64> = (0..6)
            .map(|k| {
                let mut f = 1.0;
                for i in 2..=k {
                    f *= i as f64;
                }
                g0.exp() / f
            })
            .collect();
        let a = inner.compose(&outer);
        let b = inner.exp();
        for (p, q) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((p - q).norm() < 1e-13);
        }
    }
}
