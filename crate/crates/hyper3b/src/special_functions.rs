//! Scalar special functions: Jacobi and Gegenbauer polynomials, factorials
//! and half-integer Gamma values, Wigner small-d and D functions, and the
//! fixed-angle Δ symbols.
//!
//! Angular momenta are carried as doubled integers (`two_j = 2j`) so that
//! half-integer labels stay exact.
//!
//! Phase conventions: `D^j_{mn}(φ1, θ, φ2) = e^{-i m φ1} d^j_{mn}(θ) e^{-i n φ2}`
//! with the real orthogonal small-d matrices of the standard Wigner formula.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest argument accepted by [`factorial`]; beyond it the callers are
/// outside the scale this crate is built for.
pub const MAX_FACTORIAL: u32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("Jacobi parameters out of domain: alpha={alpha}, beta={beta} (both must exceed -1)")]
    JacobiDomain { alpha: f64, beta: f64 },
    #[error("Gegenbauer parameter out of domain: lambda={0} (must exceed -1/2)")]
    GegenbauerDomain(f64),
    #[error("invalid angular momentum indices: 2j={two_j}, 2m={two_m}, 2n={two_n}")]
    Index { two_j: i32, two_m: i32, two_n: i32 },
    #[error("factorial argument {0} exceeds the supported range")]
    FactorialRange(i64),
}

/// Angular momentum label `(j, m)` stored as doubled integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AngularMomentum {
    pub two_j: i32,
    pub two_m: i32,
}

impl AngularMomentum {
    pub fn new(two_j: i32, two_m: i32) -> Result<Self, SpecialError> {
        if two_j < 0 || two_m.abs() > two_j || (two_j - two_m).rem_euclid(2) != 0 {
            return Err(SpecialError::Index {
                two_j,
                two_m,
                two_n: two_m,
            });
        }
        Ok(Self { two_j, two_m })
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn m(&self) -> f64 {
        f64::from(self.two_m) / 2.0
    }
}

/// Parameters of `P_n^{(α,β)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64, n: u32) -> Result<Self, SpecialError> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(SpecialError::JacobiDomain { alpha, beta });
        }
        Ok(Self { alpha, beta, n })
    }
}

/// Kahan-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

fn factorial_table() -> &'static [f64; MAX_FACTORIAL as usize + 1] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; MAX_FACTORIAL as usize + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; MAX_FACTORIAL as usize + 1];
        for i in 1..t.len() {
            t[i] = t[i - 1] * i as f64;
        }
        t
    })
}

/// `n!` for `0 <= n <= MAX_FACTORIAL`.
pub fn try_factorial(n: i64) -> Result<f64, SpecialError> {
    if n < 0 || n > i64::from(MAX_FACTORIAL) {
        return Err(SpecialError::FactorialRange(n));
    }
    Ok(factorial_table()[n as usize])
}

/// `n!`; panics outside `0..=MAX_FACTORIAL`, which callers rule out by their
/// own label validation.
pub fn factorial(n: i64) -> f64 {
    try_factorial(n).expect("factorial argument out of range")
}

/// `Γ(x)` for `x = two_x / 2 > 0`, exact for integers and half-integers.
pub fn gamma_half(two_x: i64) -> f64 {
    assert!(two_x > 0, "gamma_half needs a positive argument");
    if two_x % 2 == 0 {
        factorial(two_x / 2 - 1)
    } else {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let n = (two_x - 1) / 2;
        factorial(2 * n) * std::f64::consts::PI.sqrt() / (4f64.powi(n as i32) * factorial(n))
    }
}

/// Generalized binomial coefficient `C(a, k)` for real `a`.
pub fn binomial(a: f64, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (a - f64::from(i)) / f64::from(i + 1);
    }
    r
}

/// Double factorial `n!!` with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> f64 {
    let mut r = 1.0;
    let mut k = n;
    while k > 1 {
        r *= k as f64;
        k -= 2;
    }
    r
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by the three-term recurrence.
pub fn jacobi_poly(p: JacobiParams, x: f64) -> Result<f64, SpecialError> {
    let JacobiParams {
        alpha: a,
        beta: b,
        n,
    } = JacobiParams::new(p.alpha, p.beta, p.n)?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (a - b + (a + b + 2.0) * x);
    for k in 2..=n {
        let k = f64::from(k);
        let s = 2.0 * k + a + b;
        let c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// Coefficients of `P_n^{(α,β)}` in the finite binomial form
/// `Σ_s c_s ((x-1)/2)^s ((x+1)/2)^{n-s}`.
pub fn jacobi_binomial_coeffs(p: JacobiParams) -> Vec<f64> {
    let n = p.n;
    (0..=n)
        .map(|s| binomial(f64::from(n) + p.alpha, n - s) * binomial(f64::from(n) + p.beta, s))
        .collect()
}

/// Gegenbauer polynomial `C_n^{λ}(x)` by the three-term recurrence.
pub fn gegenbauer_poly(lam: f64, n: u32, x: f64) -> Result<f64, SpecialError> {
    if lam.is_nan() || lam <= -0.5 {
        return Err(SpecialError::GegenbauerDomain(lam));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut c0 = 1.0;
    let mut c1 = 2.0 * lam * x;
    for k in 2..=n {
        let k = f64::from(k);
        let c2 = (2.0 * x * (k + lam - 1.0) * c1 - (k + 2.0 * lam - 2.0) * c0) / k;
        c0 = c1;
        c1 = c2;
    }
    Ok(c1)
}

fn check_dj(two_j: i32, two_m: i32, two_n: i32) -> Result<(), SpecialError> {
    let ok = two_j >= 0
        && two_m.abs() <= two_j
        && two_n.abs() <= two_j
        && (two_j - two_m).rem_euclid(2) == 0
        && (two_j - two_n).rem_euclid(2) == 0;
    if ok {
        Ok(())
    } else {
        Err(SpecialError::Index {
            two_j,
            two_m,
            two_n,
        })
    }
}

/// Wigner small-d `d^j_{mn}(β)` from the factorial sum
/// `Σ_k (-1)^{n-m+k} cos^{2j+n-m-2k}(β/2) sin^{m-n+2k}(β/2) / ((j+n-k)! k! (m-n+k)! (j-m-k)!)`
/// times `√((j+m)!(j-m)!(j+n)!(j-n)!)`.
pub fn wigner_small_d(two_j: i32, two_m: i32, two_n: i32, beta: f64) -> Result<f64, SpecialError> {
    check_dj(two_j, two_m, two_n)?;
    let jpm = i64::from((two_j + two_m) / 2);
    let jmm = i64::from((two_j - two_m) / 2);
    let jpn = i64::from((two_j + two_n) / 2);
    let jmn = i64::from((two_j - two_n) / 2);
    let mmn = i64::from((two_m - two_n) / 2);
    let pref = (factorial(jpm) * factorial(jmm) * factorial(jpn) * factorial(jmn)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let kmin = 0.max(-mmn);
    let kmax = jpn.min(jmm);
    let mut acc = KahanSum::default();
    for k in kmin..=kmax {
        let sign = if (k - mmn).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let den = factorial(jpn - k) * factorial(k) * factorial(mmn + k) * factorial(jmm - k);
        let pc = (jpn + jmm - 2 * k) as i32;
        let ps = (mmn + 2 * k) as i32;
        acc.add(sign * c.powi(pc) * s.powi(ps) / den);
    }
    Ok(pref * acc.value())
}

/// Wigner small-d through the Jacobi polynomial route; an independent
/// evaluation used as a cross-check of [`wigner_small_d`].
///
/// `d^j_{mn}(β) = ξ √(s!(s+μ+ν)!/((s+μ)!(s+ν)!)) sin^μ(β/2) cos^ν(β/2) P_s^{(μ,ν)}(cos β)`
/// with `μ = |m-n|`, `ν = |m+n|`, `s = j - (μ+ν)/2`, and `ξ = 1` for `n >= m`,
/// `(-1)^{n-m}` otherwise.
pub fn wigner_small_d_jacobi(
    two_j: i32,
    two_m: i32,
    two_n: i32,
    beta: f64,
) -> Result<f64, SpecialError> {
    check_dj(two_j, two_m, two_n)?;
    let mu = i64::from((two_m - two_n).abs() / 2);
    let nu = i64::from((two_m + two_n).abs() / 2);
    let s = (i64::from(two_j) - mu - nu) / 2;
    let sign = if two_n >= two_m || ((two_n - two_m) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let pref =
        (factorial(s) * factorial(s + mu + nu) / (factorial(s + mu) * factorial(s + nu))).sqrt();
    let p = jacobi_poly(
        JacobiParams {
            alpha: mu as f64,
            beta: nu as f64,
            n: s as u32,
        },
        beta.cos(),
    )?;
    let (c, sn) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    Ok(sign * pref * sn.powi(mu as i32) * c.powi(nu as i32) * p)
}

/// `d`-function continued to a second index `b` with `l - b` a half-integer
/// offset allowed, as needed for the half-integer Jacobi indices of the
/// six-dimensional rotation coefficients:
///
/// `d^l_{ab}(β) = Σ_k (-1)^k √(Γ(l+a+1)Γ(l-a+1)Γ(l+b+1)Γ(l-b+1))
///   cos^{2l-2k+b-a}(β/2) sin^{2k+a-b}(β/2) / (Γ(l+b-k+1) k! Γ(l-a-k+1) Γ(k+a-b+1))`
///
/// with `l - a` a non-negative integer and `a >= |b|`. It equals
/// `√(Γ(l+a+1)Γ(l-a+1)/(Γ(l+b+1)Γ(l-b+1))) sin^{a-b}(β/2) cos^{a+b}(β/2) P_{l-a}^{(a-b,a+b)}(cos β)`.
/// Defined for `0 <= β <= π`, where the half-angle powers are real.
pub fn wigner_small_d_extended(
    two_l: i32,
    two_a: i32,
    two_b: i32,
    beta: f64,
) -> Result<f64, SpecialError> {
    let bad = SpecialError::Index {
        two_j: two_l,
        two_m: two_a,
        two_n: two_b,
    };
    if two_a < two_b.abs()
        || two_l < two_a
        || (two_l - two_a) % 2 != 0
        || !(0.0..=std::f64::consts::PI).contains(&beta)
    {
        return Err(bad);
    }
    let (l2, a2, b2) = (i64::from(two_l), i64::from(two_a), i64::from(two_b));
    let n = (l2 - a2) / 2;
    let pref = (gamma_half(l2 + a2 + 2)
        * gamma_half(l2 - a2 + 2)
        * gamma_half(l2 + b2 + 2)
        * gamma_half(l2 - b2 + 2))
    .sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let mut acc = KahanSum::default();
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let den = gamma_half(l2 + b2 - 2 * k + 2)
            * factorial(k)
            * factorial(n - k)
            * gamma_half(2 * k + a2 - b2 + 2);
        let pc = (2 * l2 - 4 * k + b2 - a2) as f64 / 2.0;
        let ps = (4 * k + a2 - b2) as f64 / 2.0;
        acc.add(sign * c.powf(pc) * s.powf(ps) / den);
    }
    Ok(pref * acc.value())
}

/// Wigner `D^j_{mn}(φ1, θ, φ2) = e^{-i m φ1} d^j_{mn}(θ) e^{-i n φ2}`.
pub fn wigner_d_big(
    two_j: i32,
    two_m: i32,
    two_n: i32,
    angles: (f64, f64, f64),
) -> Result<Complex64, SpecialError> {
    let d = wigner_small_d(two_j, two_m, two_n, angles.1)?;
    let phase = -(f64::from(two_m) * angles.0 + f64::from(two_n) * angles.2) / 2.0;
    Ok(Complex64::from_polar(d, phase))
}

/// `Δ^{(l)}_{mn} = d^l_{mn}(π/2)`.
pub fn delta_pi_half(two_l: i32, two_m: i32, two_n: i32) -> Result<f64, SpecialError> {
    wigner_small_d(two_l, two_m, two_n, std::f64::consts::FRAC_PI_2)
}

/// Factorial-rescaled variant
/// `Δ̃^{(l)}_{mn} = Δ^{(l)}_{mn} √((l-n)!(l+n)!/((l-m)!(l+m)!))`.
pub fn delta_pi_half_tilde(two_l: i32, two_m: i32, two_n: i32) -> Result<f64, SpecialError> {
    let d = delta_pi_half(two_l, two_m, two_n)?;
    let f = |t: i32| factorial(i64::from(t / 2));
    Ok(d * (f(two_l - two_n) * f(two_l + two_n) / (f(two_l - two_m) * f(two_l + two_m))).sqrt())
}
