use hypwave::besselpot::*;
use hypwave::gamma::{gamma, recip_gamma, sinpi};
use hypwave::report::logspace;
use hypwave::HypwaveError;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn param(re: f64, im: f64) -> PotentialParam {
    PotentialParam::new(c(re, im)).unwrap()
}

// (Re z, Im z, x, Re F, Im F) from 30-digit Bessel K.
const GOLDEN: [(f64, f64, f64, f64, f64); 6] = [
    (-3.0, 2.0, 0.7, 1.456136430966897, 0.37925151339292146),
    (-1.6, 1.0, 0.5, 2.1671671390804237, 0.21986363832418065),
    (-2.0, 0.5, 0.5, 1.930686538995624, 0.11286310660529929),
    (-1.0, 0.3, 0.001, 7.886981048401498, 9.062033833469613),
    (-2.5, -4.0, 3.0, 0.37515060241064374, 0.40110132159578976),
    (0.5, 1.0, 0.2, 26.18594485113941, -16.809315738692984),
];

#[test]
fn golden_values() {
    for (a, b, x, re, im) in GOLDEN {
        let v = f_z(&param(a, b), x).unwrap();
        let w = c(re, im);
        assert!((v - w).norm() < 1e-12 * w.norm(), "z={a}{b:+}i x={x}: {v} vs {w}");
    }
}

#[test]
fn lorentzian_fidelity_and_evenness() {
    let p = param(-2.0, 0.0);
    for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let want = PI * f64::exp(-x);
        for sx in [x, -x] {
            let v = f_z(&p, sx).unwrap();
            assert!((v - want).norm() <= 1e-9 * want, "x={sx}");
        }
    }
    assert!((f_z(&p, 1.0).unwrap().re - 1.1557273).abs() < 1e-7);
    assert!(matches!(f_z(&p, 0.0), Err(HypwaveError::Domain(_))));
}

#[test]
fn constant_consistency() {
    let p = param(-3.0, 2.0);
    assert_eq!(p.nu_series, -p.nu);
    let direct = 2.0 * PI * (p.nu * std::f64::consts::LN_2).exp() / (PI.sqrt() * gamma(-0.5 * p.z).unwrap());
    assert!((p.c_z - direct).norm() < 1e-13 * direct.norm());
}

#[test]
fn quadrature_matches_closed_form() {
    let res = [-4.0, -3.5, -3.0, -2.5, -2.0, -1.6];
    let ims = [-5.0, -2.5, -1.0, 0.0, 1.0, 2.5, 5.0];
    for re in res {
        for im in ims {
            let p = param(re, im);
            for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let q = f_z_quadrature(&p, x).unwrap();
                let v = f_z(&p, x).unwrap();
                assert!((q.value - v).norm() <= 1e-6, "z={re}{im:+}i x={x}");
                assert!(q.abs_error <= 1e-6);
            }
        }
    }
}

#[test]
fn quadrature_examples() {
    let q = f_z_quadrature(&param(-2.0, 0.0), 3.0).unwrap();
    assert!((q.value.re - PI * (-3.0f64).exp()).abs() < 1e-6);
    let q = f_z_quadrature(&param(-3.0, 2.0), 0.7).unwrap();
    assert!((q.value - c(1.456136430966897, 0.37925151339292146)).norm() < 1e-6);
    assert!(matches!(f_z_quadrature(&param(-1.4, 0.0), 1.0), Err(HypwaveError::Domain(_))));
}

/// Central j-th difference with two Richardson levels, steps h, h/2, h/4.
fn richardson(f: &dyn Fn(f64) -> Complex64, x: f64, j: usize, h: f64) -> Complex64 {
    let d = |h: f64| {
        let mut s = c(0.0, 0.0);
        let mut binom = 1.0;
        for i in 0..=j {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += f(x + (0.5 * j as f64 - i as f64) * h) * (sign * binom);
            binom *= (j - i) as f64 / (i + 1) as f64;
        }
        s / h.powi(j as i32)
    };
    let (d0, d1, d2) = (d(h), d(h / 2.0), d(h / 4.0));
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r1 - r0) / 15.0
}

#[test]
fn derivatives_match_finite_differences() {
    for (a, b) in [(-2.0, 1.0), (-3.0, 2.0)] {
        let p = param(a, b);
        let f = |x: f64| f_z(&p, x).unwrap();
        for x in [0.3, 0.8, 2.0] {
            for j in 1..=3 {
                let fd = richardson(&f, x, j, 1e-2);
                let v = f_z_deriv(&p, x, j).unwrap();
                assert!((fd - v).norm() <= 1e-5, "z={a}{b:+}i x={x} j={j}: {v} vs {fd}");
            }
        }
    }
}

#[test]
fn derivative_examples() {
    let p = param(-4.0, 0.0);
    let d = f_z_deriv(&p, 1.0, 1).unwrap();
    assert!((d.re + 0.5 * PI * (-1.0f64).exp()).abs() < 1e-13 && d.im.abs() < 1e-15);
    let p = param(-2.0, 1.0);
    assert_eq!(f_z_deriv(&p, 0.8, 0).unwrap(), f_z(&p, 0.8).unwrap());
    let fd = richardson(&|x| f_z(&p, x).unwrap(), 0.8, 2, 1e-2);
    assert!((f_z_deriv(&p, 0.8, 2).unwrap() - fd).norm() < 1e-5);
    // F_{-2}'' would need F_0, a multiple of δ: the recursion hits Γ(0).
    assert!(matches!(f_z_deriv(&param(-4.0, 0.0), 1.0, 2), Err(HypwaveError::Domain(_))));
    assert!(f_z_deriv(&p, 0.8, 9).is_err());
}

#[test]
fn first_derivative_is_the_recursion() {
    for (a, b, x) in [(-2.0, 1.0, 0.4), (-3.5, -0.7, 2.2), (-1.2, 3.0, 0.05)] {
        let z = c(a, b);
        let p = PotentialParam::new(z).unwrap();
        let lhs = f_z_deriv(&p, x, 1).unwrap();
        let g = gamma(-0.5 * z - 1.0).unwrap() / gamma(-0.5 * z).unwrap();
        let rhs = -0.5 * g * x * f_z(&PotentialParam::new(z + 2.0).unwrap(), x).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()), "z={z}");
    }
}

#[test]
fn derivatives_are_parity_consistent() {
    let p = param(-2.5, 0.8);
    let pos = f_z_derivs(&p, 0.6, 5).unwrap();
    let neg = f_z_derivs(&p, -0.6, 5).unwrap();
    for j in 0..=5 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(neg[j], pos[j] * sign);
    }
}

#[test]
fn series_matches_closed_form() {
    for (a, b) in [(-2.0, 0.5), (-3.0, 2.0), (-1.0, 0.3), (-4.5, -1.0), (-2.2, 0.0), (0.5, 1.0)] {
        let p = param(a, b);
        let coeffs = SeriesCoeffs::for_param(&p);
        for x in [1e-3, 0.01, 0.1, 0.3, 0.5, 0.75, 1.0] {
            let s = f_z_series(&p, x, &coeffs).unwrap();
            let v = f_z(&p, x).unwrap();
            assert!((s.total - v).norm() <= 1e-8 * (1.0 + v.norm()), "z={a}{b:+}i x={x}");
        }
    }
}

#[test]
fn series_pieces() {
    let p = param(-2.0, 0.5);
    let coeffs = SeriesCoeffs::for_param(&p);
    let x: f64 = 0.37;
    assert_eq!(coeffs.g(x * x).to_string(), coeffs.g((-x) * (-x)).to_string());
    let nu = p.nu_series;
    let d0 = (nu * std::f64::consts::LN_2).exp() / gamma(1.0 - nu).unwrap();
    assert!((coeffs.d1[0] - d0).norm() < 1e-14 * d0.norm());
    for j in 5..30 {
        let r1 = coeffs.d1[j + 1].norm() / coeffs.d1[j].norm();
        let r2 = coeffs.d2[j + 1].norm() / coeffs.d2[j].norm();
        assert!(r1 < 1.0 / (j as f64) && r2 < 1.0 / (j as f64));
    }
    assert!(f_z_series(&param(-3.0, 0.0), 0.5, &SeriesCoeffs::for_param(&param(-3.0, 0.0))).is_err());
    assert!(f_z_series(&p, 1.5, &coeffs).is_err());
}

#[test]
fn riesz_homogeneity_and_pins() {
    let z = c(-1.0, 1.0);
    assert!((riesz(z, 0.7).unwrap().norm() - riesz(z, -0.7).unwrap().norm()).abs() < 1e-15);
    for k in 1..=3 {
        let z = c(-(k as f64), 0.8);
        let base = riesz(z, 0.3).unwrap().norm();
        for a in [0.01, 2.0, 50.0] {
            let scaled = riesz(z, 0.3 * a).unwrap().norm();
            let want = a.powi(k - 1) * base;
            assert!((scaled - want).abs() <= 1e-12 * want, "k={k} a={a}");
        }
    }
    let v = riesz(c(-1.0, 0.5), 1.0).unwrap().norm();
    let composed = 0.5 * PI.sqrt() * (gamma(c(0.0, 0.25)).unwrap() * recip_gamma(c(0.5, -0.25))).norm();
    assert!((v - 2.18872475441317450602716390863).abs() < 1e-12);
    assert!((v - composed).abs() < 1e-13);
    assert!(matches!(riesz(c(-1.0, 0.0), 1.0), Err(HypwaveError::Pole { .. })));
    assert!(riesz(c(-1.5, 1.0), 1.0).is_err());
}

#[test]
fn riesz_is_half_the_homogeneous_series_part() {
    for k in 1..=3 {
        let z = c(-(k as f64), 0.9);
        let p = PotentialParam::new(z).unwrap();
        let coeffs = SeriesCoeffs::for_param(&p);
        let nu = p.nu_series;
        for x in [0.2, 0.9] {
            let part: Complex64 = -p.c_z * PI / (2.0 * sinpi(nu)) * coeffs.d2[0] * (2.0 * nu * f64::ln(x)).exp();
            let r = riesz(z, x).unwrap();
            assert!((part - 2.0 * r).norm() < 1e-12 * part.norm(), "k={k} x={x}");
        }
    }
}

fn deriv_grid(n: usize) -> Vec<f64> {
    let mut xs = logspace(1e-3, 10.0, n);
    xs.push(1.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

#[test]
fn deriv_envelope_cases() {
    let e = deriv_envelope(c(-1.0, 0.3), 0, 1e-3);
    let want = (0.6 * PI).exp() * ((1.0f64 / 0.3).min(1000f64.ln()) + 1.0);
    assert!((e - want).abs() < 1e-12 * want);
    let e = deriv_envelope(c(-3.0, 2.0), 3, 0.1);
    assert!((e - (4.0 * PI).exp() * 10.0).abs() < 1e-9 * e);
    let e = deriv_envelope(c(-2.0, 1.0), 0, 4.0);
    assert!((e - (2.0 * PI).exp() * (-4.0f64).exp()).abs() < 1e-12 * e);
    // Re z = −2 with j = 1 is the critical index, but j is odd: bounded case.
    assert_eq!(deriv_envelope(c(-2.0, 1.0), 1, 0.01), (2.0 * PI).exp());
}

#[test]
fn deriv_envelope_ratios_are_refinement_stable() {
    for (a, b, j) in [(-2.0, 1.0, 0), (-1.0, 0.3, 0), (-3.0, 2.0, 3), (-2.5, -1.5, 2), (-1.0, 0.3, 1), (-3.0, 0.5, 2)] {
        let p = param(a, b);
        let coarse = check_deriv_envelope(&p, j, &deriv_grid(60)).unwrap();
        let fine = check_deriv_envelope(&p, j, &deriv_grid(119)).unwrap().with_coarse(&coarse);
        assert!(fine.sup_ratio.is_finite() && fine.sup_ratio > 0.0);
        assert!(fine.failed.is_empty());
        assert!(fine.pass, "z={a}{b:+}i j={j}: {} -> {}", coarse.sup_ratio, fine.sup_ratio);
    }
    let large = check_deriv_envelope(&param(-2.0, 1.0), 0, &logspace(1.0, 10.0, 50)).unwrap();
    assert!(large.sup_ratio.is_finite());
    assert!(check_deriv_envelope(&param(-2.0, 1.0), 0, &[]).is_err());
    assert!(check_deriv_envelope(&param(-2.0, 0.0), 0, &[0.5]).is_err());
}

#[test]
fn series_gh_bounds() {
    let rs = |n: usize| (1..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>();
    let nu = c(0.5, 1.0);
    let r0 = series_gh_derivative_bound(nu, 0, 2.0, &rs(50)).unwrap();
    let r1 = series_gh_derivative_bound(nu, 0, 2.0, &rs(100)).unwrap().with_coarse(&r0);
    assert!(r1.pass && r1.sup_ratio.is_finite());
    let coeffs = SeriesCoeffs::new(nu, 40);
    assert_eq!(series_h_deriv(&coeffs, 0.0, 0), coeffs.d2[0]);
    let nu = c(0.5, 10.0);
    let p0 = series_gh_derivative_bound(nu, 0, 2.0, &rs(50)).unwrap();
    let p4 = series_gh_derivative_bound(nu, 4, 2.0, &rs(50)).unwrap();
    assert!(p4.sup_ratio <= 3.0 * p0.sup_ratio);
    assert!(series_gh_derivative_bound(nu, 0, 2.0, &[1.5]).is_err());
}

#[test]
fn series_gh_derivatives_are_termwise() {
    let coeffs = SeriesCoeffs::new(c(0.3, -0.6), 60);
    let r = 0.4;
    let h = 1e-3;
    for p in 0..3 {
        let fd = (series_g_deriv(&coeffs, r + h, p, 1.5) - series_g_deriv(&coeffs, r - h, p, 1.5)) / (2.0 * h);
        let d = series_g_deriv(&coeffs, r, p + 1, 1.5);
        assert!((fd - d).norm() < 1e-5 * (1.0 + d.norm()));
        let fd = (series_h_deriv(&coeffs, r + h, p) - series_h_deriv(&coeffs, r - h, p)) / (2.0 * h);
        assert!((fd - series_h_deriv(&coeffs, r, p + 1)).norm() < 1e-6);
    }
}

const DECAY_S: [f64; 13] = [-6.0, -4.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0];

fn decay_lambdas(n: usize) -> Vec<f64> {
    let pos = logspace(1e-3, 20.0, n);
    let mut all: Vec<f64> = pos.iter().rev().map(|l| -l).collect();
    all.extend(pos);
    all
}

#[test]
fn decay_sup_is_stable() {
    for (k, beta) in [(1usize, 1.0), (2, 2.0), (2, 2.5)] {
        for m in 0..k {
            let coarse = check_decay(k, beta, m, &decay_lambdas(40), &DECAY_S).unwrap();
            let fine = check_decay(k, beta, m, &decay_lambdas(79), &DECAY_S).unwrap().with_coarse(&coarse);
            assert!(fine.pass, "k={k} β={beta} m={m}: {} -> {}", coarse.sup_ratio, fine.sup_ratio);
            assert!(fine.cells.iter().filter(|c| c.params[1] == 0.0).all(|c| c.value == 0.0));
        }
    }
    let r = check_decay(1, 1.0, 0, &[5.0], &[1.0]).unwrap();
    assert!(r.sup_ratio.is_finite() && r.sup_ratio > 0.0);
    assert!(matches!(check_decay(2, 1.5, 0, &[1.0], &[1.0]), Err(HypwaveError::Domain(_))));
    assert!(matches!(check_decay(3, 3.0, 0, &[1.0], &[1.0]), Err(HypwaveError::Domain(_))));
}

#[test]
fn riesz_subtraction_leaves_a_smooth_remainder() {
    let ss = [-4.0, -1.0, -0.1, 0.1, 1.0, 4.0];
    for (k, beta) in [(1usize, 1.0), (2, 2.5), (2, 2.0), (3, 3.5)] {
        let r = riesz_subtraction_probe(k, beta, &ss).unwrap();
        assert!(r.pass, "k={k}: {}", r.sup_ratio);
    }
    // Without the subtraction F^{(k−1)} keeps oscillating like x^{−is}.
    let p = param(-2.0, 1.0);
    let q: Vec<Complex64> = RIESZ_PROBES.iter().map(|l| f_z_deriv(&p, 2.5 * l, 1).unwrap()).collect();
    assert!((q[2] - q[1]).norm() > 0.5 * (q[1] - q[0]).norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn even_in_x(re in -5.0f64..-0.5, im in -4.0f64..4.0, x in 0.01f64..20.0) {
        let p = param(re, im);
        prop_assert_eq!(f_z(&p, x).unwrap(), f_z(&p, -x).unwrap());
    }

    #[test]
    fn conjugate_exponent(re in -5.0f64..-0.5, im in -4.0f64..4.0, x in 0.01f64..20.0) {
        let a = f_z(&param(re, im), x).unwrap();
        let b = f_z(&param(re, -im), x).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn recursion_identity(re in -5.0f64..-0.5, im in 0.2f64..4.0, x in 0.05f64..8.0) {
        let z = c(re, im);
        let lhs = f_z_deriv(&PotentialParam::new(z).unwrap(), x, 1).unwrap();
        let rhs = -0.5 * x * f_z(&PotentialParam::new(z + 2.0).unwrap(), x).unwrap()
            * gamma(-0.5 * z - 1.0).unwrap() / gamma(-0.5 * z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }
}
