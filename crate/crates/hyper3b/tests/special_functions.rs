use hyper3b::special_functions::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn legendre_bonnet(n: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let k = f64::from(k);
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[test]
fn small_d_routes_agree() {
    for two_j in 0..=8 {
        for two_m in (-two_j..=two_j).step_by(2) {
            for two_n in (-two_j..=two_j).step_by(2) {
                for &b in &[0.0, 0.3, 1.1, 2.0, 3.0] {
                    let a = wigner_small_d(two_j, two_m, two_n, b).unwrap();
                    let c = wigner_small_d_jacobi(two_j, two_m, two_n, b).unwrap();
                    assert!(
                        (a - c).abs() < 1e-12,
                        "j={two_j} m={two_m} n={two_n} b={b}: {a} vs {c}"
                    );
                }
            }
        }
    }
}

#[test]
fn small_d_closed_forms() {
    let b = 0.83f64;
    let (c, s) = ((b / 2.0).cos(), (b / 2.0).sin());
    let cases = [
        (1, 1, 1, c),
        (1, 1, -1, -s),
        (1, -1, 1, s),
        (2, 2, 2, (1.0 + b.cos()) / 2.0),
        (2, 2, 0, -b.sin() / 2f64.sqrt()),
        (2, 0, 0, b.cos()),
        (2, 2, -2, (1.0 - b.cos()) / 2.0),
    ];
    for (j, m, n, want) in cases {
        assert!(
            (wigner_small_d(j, m, n, b).unwrap() - want).abs() < 1e-15,
            "{j} {m} {n}"
        );
    }
}

#[test]
fn invalid_d_indices_are_rejected() {
    assert!(wigner_small_d(2, 1, 0, 0.1).is_err());
    assert!(wigner_small_d(2, 4, 0, 0.1).is_err());
    assert!(wigner_small_d_extended(3, 1, 2, 0.1).is_err());
    assert!(wigner_small_d_extended(3, 2, 0, 0.1).is_err());
    assert!(wigner_small_d_extended(3, 1, 0, 4.0).is_err());
}

#[test]
fn extended_d_matches_ordinary_d() {
    // On ordinary indices the extension is d^l_{ba}.
    for two_l in 0..=6 {
        for two_a in (0..=two_l).rev().step_by(2) {
            for two_b in (-two_a..=two_a).step_by(2) {
                for &beta in &[0.2, 1.0, 2.9] {
                    let e = wigner_small_d_extended(two_l, two_a, two_b, beta).unwrap();
                    let d = wigner_small_d(two_l, two_b, two_a, beta).unwrap();
                    assert!((e - d).abs() < 1e-13, "{two_l} {two_a} {two_b}");
                }
            }
        }
    }
}

#[test]
fn extended_d_jacobi_identity() {
    // Half-integer offsets between l - a and l - b.
    for (two_l, two_a, two_b) in [
        (3, 1, 0),
        (5, 3, 2),
        (5, 1, 0),
        (7, 3, -2),
        (6, 2, 1),
        (4, 2, -1),
    ] {
        for &beta in &[0.3f64, 1.4, 2.5] {
            let (l, a, b) = (
                f64::from(two_l) / 2.0,
                f64::from(two_a) / 2.0,
                f64::from(two_b) / 2.0,
            );
            let g = |t: i32| gamma_half(i64::from(t) + 2);
            let pref = (g(two_l + two_a) * g(two_l - two_a)
                / (g(two_l + two_b) * g(two_l - two_b)))
            .sqrt();
            let p = jacobi_poly(
                JacobiParams::new(a - b, a + b, (l - a) as u32).unwrap(),
                beta.cos(),
            )
            .unwrap();
            let want = pref * (beta / 2.0).sin().powf(a - b) * (beta / 2.0).cos().powf(a + b) * p;
            let got = wigner_small_d_extended(two_l, two_a, two_b, beta).unwrap();
            assert!(
                (got - want).abs() < 1e-13,
                "{two_l} {two_a} {two_b} {beta}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn jacobi_reduces_to_legendre() {
    for n in 0..10 {
        for &x in &[-0.9, -0.2, 0.0, 0.5, 1.0] {
            let j = jacobi_poly(JacobiParams::new(0.0, 0.0, n).unwrap(), x).unwrap();
            assert!((j - legendre_bonnet(n, x)).abs() < 1e-13);
        }
    }
}

#[test]
fn jacobi_binomial_sum_matches_recurrence() {
    for n in 0..8 {
        let p = JacobiParams::new(1.5, 0.5, n).unwrap();
        let x = 0.37f64;
        let (lo, hi) = ((x - 1.0) / 2.0, (x + 1.0) / 2.0);
        let sum: f64 = jacobi_binomial_coeffs(p)
            .iter()
            .enumerate()
            .map(|(s, c)| c * lo.powi(s as i32) * hi.powi((n as i32) - s as i32))
            .sum();
        assert!((sum - jacobi_poly(p, x).unwrap()).abs() < 1e-13);
        assert!((jacobi_poly(p, 1.0).unwrap() - binomial(f64::from(n) + 1.5, n)).abs() < 1e-12);
    }
}

#[test]
fn jacobi_domain_is_checked() {
    assert!(JacobiParams::new(-1.0, 0.0, 2).is_err());
    assert!(gegenbauer_poly(-0.5, 2, 0.1).is_err());
}

#[test]
fn gegenbauer_matches_jacobi() {
    // C_n^λ(x) = (2λ)_n/(λ+½)_n P_n^{(λ-½, λ-½)}(x)
    let lam = 2.0;
    for n in 0..7u32 {
        let poch = |a: f64| (0..n).map(|k| a + f64::from(k)).product::<f64>();
        let x = -0.41;
        let want = poch(2.0 * lam) / poch(lam + 0.5)
            * jacobi_poly(JacobiParams::new(lam - 0.5, lam - 0.5, n).unwrap(), x).unwrap();
        assert!((gegenbauer_poly(lam, n, x).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn factorial_helpers() {
    assert_eq!(factorial(0), 1.0);
    assert_eq!(factorial(10), 3_628_800.0);
    assert!(try_factorial(1000).is_err());
    assert_eq!(double_factorial(7), 105.0);
    assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    assert!((binomial(0.5, 2) + 0.125).abs() < 1e-16);
}

#[test]
fn big_d_phases() {
    let d = wigner_d_big(2, 2, -2, (0.3, 1.0, 0.5)).unwrap();
    let want = wigner_small_d(2, 2, -2, 1.0).unwrap()
        * num_complex::Complex64::from_polar(1.0, -(0.3 - 0.5));
    assert!((d - want).norm() < 1e-15);
}

#[test]
fn delta_tables() {
    assert!((delta_pi_half(2, 0, 0).unwrap()).abs() < 1e-15);
    assert!((delta_pi_half(2, 2, 2).unwrap() - 0.5).abs() < 1e-15);
    // d^1_{10}(π/2) = -1/√2 and d^2_{20}(π/2) = √6/4; the rescaling factors are 1/√2 and 1/√6.
    assert!((delta_pi_half(2, 2, 0).unwrap() + 0.5f64.sqrt()).abs() < 1e-15);
    assert!((delta_pi_half_tilde(2, 2, 0).unwrap() + 0.5).abs() < 1e-15);
    assert!((delta_pi_half(4, 4, 0).unwrap() - 6f64.sqrt() / 4.0).abs() < 1e-15);
    assert!((delta_pi_half_tilde(4, 4, 0).unwrap() - 0.25).abs() < 1e-15);
}

proptest! {
    #[test]
    fn small_d_is_orthogonal(two_j in 0i32..8, beta in 0.0f64..PI) {
        let idx: Vec<i32> = (-two_j..=two_j).step_by(2).collect();
        for &m in &idx {
            for &k in &idx {
                let s: f64 = idx.iter().map(|&n| wigner_small_d(two_j, m, n, beta).unwrap() * wigner_small_d(two_j, k, n, beta).unwrap()).sum();
                let want = if m == k { 1.0 } else { 0.0 };
                prop_assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_d_symmetries(two_j in 0i32..9, mi in 0usize..9, ni in 0usize..9, beta in -3.0f64..3.0) {
        let idx: Vec<i32> = (-two_j..=two_j).step_by(2).collect();
        let (m, n) = (idx[mi % idx.len()], idx[ni % idx.len()]);
        let d = wigner_small_d(two_j, m, n, beta).unwrap();
        let sign = if ((m - n) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        prop_assert!((d - sign * wigner_small_d(two_j, n, m, beta).unwrap()).abs() < 1e-12);
        prop_assert!((d - wigner_small_d(two_j, -n, -m, beta).unwrap()).abs() < 1e-12);
        prop_assert!((d - wigner_small_d(two_j, n, m, -beta).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn d_addition_theorem(two_j in 0i32..7, b1 in -1.5f64..1.5, b2 in -1.5f64..1.5) {
        let idx: Vec<i32> = (-two_j..=two_j).step_by(2).collect();
        for &m in &idx {
            for &n in &idx {
                let s: f64 = idx.iter().map(|&k| wigner_small_d(two_j, m, k, b1).unwrap() * wigner_small_d(two_j, k, n, b2).unwrap()).sum();
                prop_assert!((s - wigner_small_d(two_j, m, n, b1 + b2).unwrap()).abs() < 1e-12);
            }
        }
    }
}
