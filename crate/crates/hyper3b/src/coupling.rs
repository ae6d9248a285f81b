//! Angular-momentum recoupling: Clebsch–Gordan, 3j, 6j and 9j symbols, and
//! the composite "double-brace" symbol of the O(6) rotation coefficients.
//!
//! All labels are doubled integers. 3j and 6j symbols are evaluated from the
//! Racah formulas in exact rational arithmetic: the squared magnitude is
//! exact and the sign is carried separately, so the only rounding is the
//! final square root. The 9j symbol is the usual 6j triple-sum contraction.
//! Values are memoized per label tuple; selection-rule violations give 0.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Triple of doubled angular momenta `(2j1, 2j2, 2j3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CouplingTriple {
    pub two_j1: i32,
    pub two_j2: i32,
    pub two_j3: i32,
}

impl CouplingTriple {
    pub fn new(two_j1: i32, two_j2: i32, two_j3: i32) -> Self {
        Self {
            two_j1,
            two_j2,
            two_j3,
        }
    }

    /// Triangle rule with integer perimeter.
    pub fn is_valid(&self) -> bool {
        triangle(self.two_j1, self.two_j2, self.two_j3)
    }
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

fn big_factorial(n: i64) -> BigInt {
    static CACHE: OnceLock<Mutex<Vec<BigInt>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![BigInt::one()]));
    let mut c = cache.lock().expect("factorial cache poisoned");
    while (c.len() as i64) <= n {
        let k = c.len();
        let next = &c[k - 1] * BigInt::from(k);
        c.push(next);
    }
    c[n as usize].clone()
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Converts `sign · √r` to `f64`.
fn signed_sqrt(sign: i32, r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let v = r.to_f64().unwrap_or(f64::NAN).sqrt();
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// Squared triangle coefficient `Δ(abc)² = (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!`.
fn delta_sq(a: i32, b: i32, c: i32) -> BigRational {
    let f = |x: i32| big_factorial(i64::from(x / 2));
    ratio(
        f(a + b - c) * f(a - b + c) * f(-a + b + c),
        big_factorial(i64::from((a + b + c) / 2 + 1)),
    )
}

/// Exact `(sign, magnitude²)` of a 3j symbol.
fn three_j_exact(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> (i32, BigRational) {
    let zero = (1, BigRational::zero());
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return zero;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j - m) % 2 != 0 {
            return zero;
        }
    }
    let h = |x: i32| i64::from(x / 2);
    let kmin = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let kmax = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = big_factorial(k)
            * big_factorial(h(j3 - j2 + m1) + k)
            * big_factorial(h(j3 - j1 - m2) + k)
            * big_factorial(h(j1 + j2 - j3) - k)
            * big_factorial(h(j1 - m1) - k)
            * big_factorial(h(j2 + m2) - k);
        let term = ratio(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return zero;
    }
    let f = |x: i32| big_factorial(h(x));
    let mprod = f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3);
    let mag = delta_sq(j1, j2, j3) * ratio(mprod, BigInt::one()) * &sum * &sum;
    let phase = h(j1 - j2 - m3);
    let mut sign = if phase.rem_euclid(2) == 0 { 1 } else { -1 };
    if sum.is_negative() {
        sign = -sign;
    }
    (sign, mag)
}

/// Exact `(sign, magnitude²)` of a 6j symbol `{j1 j2 j3; j4 j5 j6}`.
fn six_j_exact(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> (i32, BigRational) {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return (1, BigRational::zero());
    }
    let h = |x: i32| i64::from(x / 2);
    let a = [
        h(j1 + j2 + j3),
        h(j1 + j5 + j6),
        h(j4 + j2 + j6),
        h(j4 + j5 + j3),
    ];
    let b = [
        h(j1 + j2 + j4 + j5),
        h(j2 + j3 + j5 + j6),
        h(j3 + j1 + j6 + j4),
    ];
    let kmin = *a.iter().max().expect("four triads");
    let kmax = *b.iter().min().expect("three sums");
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let mut den = BigInt::one();
        for &ai in &a {
            den *= big_factorial(k - ai);
        }
        for &bi in &b {
            den *= big_factorial(bi - k);
        }
        let term = ratio(big_factorial(k + 1), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return (1, BigRational::zero());
    }
    let mut mag = &sum * &sum;
    for &(x, y, z) in &triads {
        mag *= delta_sq(x, y, z);
    }
    (if sum.is_negative() { -1 } else { 1 }, mag)
}

type Key6 = [i32; 6];

fn memo() -> &'static Mutex<HashMap<(u8, Key6), f64>> {
    static MEMO: OnceLock<Mutex<HashMap<(u8, Key6), f64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn memoized(tag: u8, key: Key6, f: impl FnOnce() -> f64) -> f64 {
    if let Some(v) = memo().lock().expect("memo poisoned").get(&(tag, key)) {
        return *v;
    }
    let v = f();
    memo().lock().expect("memo poisoned").insert((tag, key), v);
    v
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`, doubled arguments.
pub fn wigner_3j(
    two_j1: i32,
    two_j2: i32,
    two_j3: i32,
    two_m1: i32,
    two_m2: i32,
    two_m3: i32,
) -> f64 {
    let key = [two_j1, two_j2, two_j3, two_m1, two_m2, two_m3];
    memoized(3, key, || {
        let (s, r) = three_j_exact(two_j1, two_j2, two_j3, two_m1, two_m2, two_m3);
        signed_sqrt(s, &r)
    })
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩` (Condon–Shortley),
/// doubled arguments.
pub fn clebsch_gordan(
    two_j1: i32,
    two_m1: i32,
    two_j2: i32,
    two_m2: i32,
    two_j: i32,
    two_m: i32,
) -> f64 {
    if two_m1 + two_m2 != two_m {
        return 0.0;
    }
    let three_j = wigner_3j(two_j1, two_j2, two_j, two_m1, two_m2, -two_m);
    let phase = (two_j1 - two_j2 + two_m) / 2;
    let sign = if phase.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * f64::from(two_j + 1).sqrt() * three_j
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`, doubled arguments.
pub fn wigner_6j(
    two_j1: i32,
    two_j2: i32,
    two_j3: i32,
    two_j4: i32,
    two_j5: i32,
    two_j6: i32,
) -> f64 {
    let key = [two_j1, two_j2, two_j3, two_j4, two_j5, two_j6];
    memoized(6, key, || {
        let (s, r) = six_j_exact(two_j1, two_j2, two_j3, two_j4, two_j5, two_j6);
        signed_sqrt(s, &r)
    })
}

/// Wigner 9j symbol with rows `(j11 j12 j13)`, `(j21 j22 j23)`, `(j31 j32 j33)`,
/// doubled arguments.
pub fn wigner_9j(rows: [[i32; 3]; 3]) -> f64 {
    let [[a, b, c], [d, e, f], [g, h, i]] = rows;
    let rows_ok = triangle(a, b, c) && triangle(d, e, f) && triangle(g, h, i);
    let cols_ok = triangle(a, d, g) && triangle(b, e, h) && triangle(c, f, i);
    if !rows_ok || !cols_ok {
        return 0.0;
    }
    static MEMO9: OnceLock<Mutex<HashMap<[[i32; 3]; 3], f64>>> = OnceLock::new();
    let memo9 = MEMO9.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo9.lock().expect("memo poisoned").get(&rows) {
        return *v;
    }
    // Σ_x (-1)^{2x} (2x+1) {a b c; f i x} {d e f; b x h} {g h i; x a d}
    let lo = (a - i).abs().max((d - h).abs()).max((b - f).abs());
    let hi = (a + i).min(d + h).min(b + f);
    let mut sum = 0.0;
    let mut x = lo;
    while x <= hi {
        let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign
            * f64::from(x + 1)
            * wigner_6j(a, b, c, f, i, x)
            * wigner_6j(d, e, f, b, x, h)
            * wigner_6j(g, h, i, x, a, d);
        x += 2;
    }
    memo9.lock().expect("memo poisoned").insert(rows, sum);
    sum
}

/// The double-brace symbol
///
/// ```text
/// {{ p r j1' ; q s j2' ; j1 j2 J }} = [(2j1+1)(2j2+1)(2j1'+1)(2j2'+1)]^{1/2}
///     (2p+1)(2q+1)(2r+1)(2s+1)
///     (p q j1; 0 0 0)(s r j2; 0 0 0)(p r j1'; 0 0 0)(q s j2'; 0 0 0)
///     {p r j1'; q s j2'; j1 j2 J}
/// ```
///
/// with integer (not doubled) arguments.
#[allow(clippy::too_many_arguments)]
pub fn double_brace(
    p: i32,
    r: i32,
    j1p: i32,
    q: i32,
    s: i32,
    j2p: i32,
    j1: i32,
    j2: i32,
    big_j: i32,
) -> f64 {
    let t = |a: i32, b: i32, c: i32| wigner_3j(2 * a, 2 * b, 2 * c, 0, 0, 0);
    let three = t(p, q, j1) * t(s, r, j2) * t(p, r, j1p) * t(q, s, j2p);
    if three == 0.0 {
        return 0.0;
    }
    let nine = wigner_9j([
        [2 * p, 2 * r, 2 * j1p],
        [2 * q, 2 * s, 2 * j2p],
        [2 * j1, 2 * j2, 2 * big_j],
    ]);
    let dims = f64::from((2 * j1 + 1) * (2 * j2 + 1) * (2 * j1p + 1) * (2 * j2p + 1)).sqrt()
        * f64::from((2 * p + 1) * (2 * q + 1) * (2 * r + 1) * (2 * s + 1));
    dims * three * nine
}
