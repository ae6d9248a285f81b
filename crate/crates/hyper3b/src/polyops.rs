//! Exact polynomial engine over the six complex variables
//! `(z1, z2, z3, w1, w2, w3)` with `w = z*`, carrying the SU(3) and O(6)
//! operator algebra as linear maps on sparse coefficient tables.
//!
//! Operators, with indices `1..=3` as in the physics notation:
//!
//! ```text
//! A_ik = i z_i ∂/∂z_k - i w_k ∂/∂w_i
//! L_ik = (A_ik - A_ki)/2,   B_ik = (A_ik + A_ki)/2
//! N    = ½ Σ_k (z_k ∂/∂z_k - w_k ∂/∂w_k)
//! Lap6 = 4 Σ_k ∂²/∂z_k∂w_k        (flat Laplacian in ξ, η)
//! L3   = 2 L_12,   L2 = -4 Σ_{i<k} L_ik²   (L2 z_M = -2 z_M)
//! Ω    = Σ_{ikl} L_ik B_kl L_li
//! ```
//!
//! Only coefficient arithmetic rounds; the exponent bookkeeping is exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

/// Exponents of `(z1, z2, z3, w1, w2, w3)`.
pub type Monomial6 = [u8; 6];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Holomorphic degree `p` (powers of `z`).
pub fn holo_degree(m: &Monomial6) -> u32 {
    m[..3].iter().map(|&e| u32::from(e)).sum()
}

/// Antiholomorphic degree `q` (powers of `w`).
pub fn anti_degree(m: &Monomial6) -> u32 {
    m[3..].iter().map(|&e| u32::from(e)).sum()
}

/// Sparse complex polynomial in `(z, w)`; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Polynomial6 {
    terms: BTreeMap<Monomial6, Complex64>,
}

impl Polynomial6 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial([0; 6], c)
    }

    pub fn monomial(m: Monomial6, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// The single variable with index `k` (0..3 are `z`, 3..6 are `w`).
    pub fn var(k: usize) -> Self {
        let mut m = [0u8; 6];
        m[k] = 1;
        Self::monomial(m, ONE)
    }

    /// `Σ_k z_k w_k = ρ²`.
    pub fn rho_sq() -> Self {
        let mut p = Self::zero();
        for k in 0..3 {
            let mut m = [0u8; 6];
            m[k] = 1;
            m[k + 3] = 1;
            p.add_term(m, ONE);
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial6, Complex64)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial6, c: Complex64) {
        if c == ZERO {
            return;
        }
        let e = self.terms.entry(m).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial6, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial6) -> Complex64 {
        self.terms.get(m).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every coefficient is at most `tol`.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Total degree when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| holo_degree(m) + anti_degree(m));
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(*m, *c);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        for (m, c) in &other.terms {
            self.add_term(*m, c * s);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -ONE);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: HashMap<Monomial6, Complex64> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = [0, 1, 2, 3, 4, 5].map(|k| ma[k] + mb[k]);
                *acc.entry(m).or_insert(ZERO) += ca * cb;
            }
        }
        Self::from_terms(acc)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(ONE);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn conj_coeffs(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.conj())))
    }

    /// Complex conjugate as a function: swaps `z ↔ w` and conjugates
    /// coefficients.
    pub fn conjugate(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| ([m[3], m[4], m[5], m[0], m[1], m[2]], c.conj())),
        )
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(m, c)| (*m, *c)),
        )
    }

    /// `∂/∂x_k` for variable index `k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            if m[k] > 0 {
                let mut n = *m;
                n[k] -= 1;
                p.add_term(n, c * f64::from(m[k]));
            }
        }
        p
    }

    /// Value at `z` with `w = z̄`.
    pub fn evaluate(&self, z: &[Complex64; 3]) -> Complex64 {
        let v = [z[0], z[1], z[2], z[0].conj(), z[1].conj(), z[2].conj()];
        self.evaluate_vars(&v)
    }

    /// Value with all six variables given independently.
    pub fn evaluate_vars(&self, v: &[Complex64; 6]) -> Complex64 {
        let mut s = ZERO;
        for (m, c) in &self.terms {
            let mut t = *c;
            for k in 0..6 {
                if m[k] > 0 {
                    t *= v[k].powu(u32::from(m[k]));
                }
            }
            s += t;
        }
        s
    }

    /// Textual dump: one term per line, `coeff_re coeff_im e1 .. e6`,
    /// sorted by exponent tuple.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            let _ = writeln!(
                s,
                "{:.16e} {:.16e} {} {} {} {} {} {}",
                c.re, c.im, m[0], m[1], m[2], m[3], m[4], m[5]
            );
        }
        s
    }

    /// Splits by `p - q`, returned in ascending order of `two_nu = p - q`.
    pub fn nu_split(&self) -> Vec<(i32, Polynomial6)> {
        let mut by: BTreeMap<i32, Polynomial6> = BTreeMap::new();
        for (m, c) in &self.terms {
            let two_nu = holo_degree(m) as i32 - anti_degree(m) as i32;
            by.entry(two_nu).or_default().add_term(*m, *c);
        }
        by.into_iter().collect()
    }
}

/// Operator labels with physics indices `1..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorTag {
    A(u8, u8),
    L(u8, u8),
    B(u8, u8),
    N,
    Lap6,
    L2,
    L3,
    Omega,
}

impl OperatorTag {
    fn check(i: u8, k: u8) {
        assert!(
            (1..=3).contains(&i) && (1..=3).contains(&k),
            "operator index out of range: ({i},{k})"
        );
    }
}

/// First-order operator `Σ c · x_a ∂/∂x_b`, stored as `(c, a, b)`.
type VectorField = Vec<(Complex64, usize, usize)>;

fn vector_field(op: OperatorTag) -> Option<VectorField> {
    let a_field = |i: u8, k: u8| -> VectorField {
        OperatorTag::check(i, k);
        let (i, k) = (usize::from(i - 1), usize::from(k - 1));
        vec![(I, i, k), (-I, 3 + k, 3 + i)]
    };
    let combine = |i: u8, k: u8, sign: f64| -> VectorField {
        let mut f: VectorField = a_field(i, k)
            .into_iter()
            .map(|(c, a, b)| (c * 0.5, a, b))
            .collect();
        f.extend(
            a_field(k, i)
                .into_iter()
                .map(|(c, a, b)| (c * 0.5 * sign, a, b)),
        );
        f
    };
    match op {
        OperatorTag::A(i, k) => Some(a_field(i, k)),
        OperatorTag::L(i, k) => Some(combine(i, k, -1.0)),
        OperatorTag::B(i, k) => Some(combine(i, k, 1.0)),
        OperatorTag::L3 => Some(
            combine(1, 2, -1.0)
                .into_iter()
                .map(|(c, a, b)| (c * 2.0, a, b))
                .collect(),
        ),
        OperatorTag::N => Some(
            (0..3)
                .flat_map(|k| {
                    [
                        (Complex64::new(0.5, 0.0), k, k),
                        (Complex64::new(-0.5, 0.0), k + 3, k + 3),
                    ]
                })
                .collect(),
        ),
        _ => None,
    }
}

fn apply_field_monomial(
    field: &VectorField,
    m: &Monomial6,
    c: Complex64,
    out: &mut HashMap<Monomial6, Complex64>,
) {
    for &(fc, a, b) in field {
        if m[b] == 0 {
            continue;
        }
        let mut n = *m;
        n[b] -= 1;
        n[a] += 1;
        *out.entry(n).or_insert(ZERO) += c * fc * f64::from(m[b]);
    }
}

fn apply_field(field: &VectorField, f: &Polynomial6) -> Polynomial6 {
    let mut out = HashMap::new();
    for (m, c) in f.terms() {
        apply_field_monomial(field, m, *c, &mut out);
    }
    Polynomial6::from_terms(out)
}

type MonoImage = Arc<Vec<(Monomial6, Complex64)>>;

fn image_cache() -> &'static RwLock<HashMap<(OperatorTag, Monomial6), MonoImage>> {
    static CACHE: OnceLock<RwLock<HashMap<(OperatorTag, Monomial6), MonoImage>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn composite_on_monomial(op: OperatorTag, m: &Monomial6) -> MonoImage {
    if let Some(v) = image_cache().read().expect("cache poisoned").get(&(op, *m)) {
        return v.clone();
    }
    let unit = Polynomial6::monomial(*m, ONE);
    let img = match op {
        OperatorTag::Lap6 => {
            let mut p = Polynomial6::zero();
            for k in 0..3 {
                p.add_scaled(
                    &unit.derivative(k).derivative(k + 3),
                    Complex64::new(4.0, 0.0),
                );
            }
            p
        }
        OperatorTag::L2 => {
            let mut p = Polynomial6::zero();
            for (i, k) in [(1, 2), (1, 3), (2, 3)] {
                let f = vector_field(OperatorTag::L(i, k)).expect("first order");
                p.add_scaled(
                    &apply_field(&f, &apply_field(&f, &unit)),
                    Complex64::new(-4.0, 0.0),
                );
            }
            p
        }
        OperatorTag::Omega => {
            let mut p = Polynomial6::zero();
            for l in 1..=3u8 {
                for i in 1..=3u8 {
                    let li = apply_field(
                        &vector_field(OperatorTag::L(l, i)).expect("first order"),
                        &unit,
                    );
                    if li.is_empty() {
                        continue;
                    }
                    for k in 1..=3u8 {
                        let bkl = apply_field(
                            &vector_field(OperatorTag::B(k, l)).expect("first order"),
                            &li,
                        );
                        let lik = apply_field(
                            &vector_field(OperatorTag::L(i, k)).expect("first order"),
                            &bkl,
                        );
                        p.add_assign(&lik);
                    }
                }
            }
            p
        }
        _ => unreachable!("first-order operators are applied directly"),
    };
    let v: MonoImage = Arc::new(img.terms().map(|(m, c)| (*m, *c)).collect());
    image_cache()
        .write()
        .expect("cache poisoned")
        .insert((op, *m), v.clone());
    v
}

/// Applies an operator exactly.
pub fn apply(op: OperatorTag, f: &Polynomial6) -> Polynomial6 {
    if let Some(field) = vector_field(op) {
        return apply_field(&field, f);
    }
    let mut out: HashMap<Monomial6, Complex64> = HashMap::new();
    for (m, c) in f.terms() {
        for (n, d) in composite_on_monomial(op, m).iter() {
            *out.entry(*n).or_insert(ZERO) += c * d;
        }
    }
    Polynomial6::from_terms(out)
}

/// `[op1, op2] f = op1(op2 f) - op2(op1 f)`.
pub fn commutator(op1: OperatorTag, op2: OperatorTag, f: &Polynomial6) -> Polynomial6 {
    apply(op1, &apply(op2, f)).sub(&apply(op2, &apply(op1, f)))
}

/// Linear combination of operators applied to `f`.
pub fn apply_combination(terms: &[(Complex64, OperatorTag)], f: &Polynomial6) -> Polynomial6 {
    let mut out = Polynomial6::zero();
    for (c, op) in terms {
        out.add_scaled(&apply(*op, f), *c);
    }
    out
}

fn delta(a: u8, b: u8) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Right-hand side of `[op1, op2]` as a combination of generators, for
/// pairs of first-order generators. Returns `None` for composite operators.
///
/// ```text
/// [A_ij, A_kl] = i(δ_jk A_il - δ_il A_kj)
/// [L_ik, L_jl] = (i/2)(δ_kj L_il + δ_il L_kj - δ_kl L_ij - δ_ij L_kl)
/// [B_ik, B_jl] = (i/2)(δ_kj L_il + δ_il L_kj + δ_kl L_ij + δ_ij L_kl)
/// [B_ik, L_jl] = (i/2)(δ_kj B_il - δ_il B_jk - δ_kl B_ij + δ_ij B_kl)
/// [N, ·] = 0
/// ```
pub fn structure_constants(
    op1: OperatorTag,
    op2: OperatorTag,
) -> Option<Vec<(Complex64, OperatorTag)>> {
    use OperatorTag::*;
    let h = I * 0.5;
    let raw: Vec<(Complex64, OperatorTag)> = match (op1, op2) {
        (N, A(..) | L(..) | B(..) | N | L3) | (A(..) | L(..) | B(..) | L3, N) => vec![],
        (A(i, j), A(k, l)) => vec![(I * delta(j, k), A(i, l)), (-I * delta(i, l), A(k, j))],
        (L(i, k), L(j, l)) => vec![
            (h * delta(k, j), L(i, l)),
            (h * delta(i, l), L(k, j)),
            (-h * delta(k, l), L(i, j)),
            (-h * delta(i, j), L(k, l)),
        ],
        (B(i, k), B(j, l)) => vec![
            (h * delta(k, j), L(i, l)),
            (h * delta(i, l), L(k, j)),
            (h * delta(k, l), L(i, j)),
            (h * delta(i, j), L(k, l)),
        ],
        (B(i, k), L(j, l)) => vec![
            (h * delta(k, j), B(i, l)),
            (-h * delta(i, l), B(j, k)),
            (-h * delta(k, l), B(i, j)),
            (h * delta(i, j), B(k, l)),
        ],
        (L(j, l), B(i, k)) => {
            let fwd = structure_constants(B(i, k), L(j, l))?;
            fwd.into_iter().map(|(c, t)| (-c, t)).collect()
        }
        _ => return None,
    };
    Some(raw.into_iter().filter(|(c, _)| *c != ZERO).collect())
}

/// Every monomial of total degree `d`, in lexicographic order.
pub fn monomials_of_degree(d: u32) -> Vec<Monomial6> {
    let mut out = Vec::new();
    let mut cur = [0u8; 6];
    fn rec(pos: usize, left: u32, cur: &mut Monomial6, out: &mut Vec<Monomial6>) {
        if pos == 5 {
            cur[5] = left as u8;
            out.push(*cur);
            return;
        }
        for e in 0..=left {
            cur[pos] = e as u8;
            rec(pos + 1, left - e, cur, out);
        }
    }
    rec(0, d, &mut cur, &mut out);
    out.sort();
    out
}

fn factorial_u(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Integral of `z^α w^β` over the unit sphere `S⁵`: nonzero only for
/// `α = β`, then `2π³ Π α_k! / (2 + |α|)!`.
pub fn sphere_moment(m: &Monomial6) -> f64 {
    if m[0] != m[3] || m[1] != m[4] || m[2] != m[5] {
        return 0.0;
    }
    let s: u32 = m[..3].iter().map(|&e| u32::from(e)).sum();
    let num: f64 = m[..3].iter().map(|&e| factorial_u(u32::from(e))).product();
    2.0 * std::f64::consts::PI.powi(3) * num / factorial_u(2 + s)
}

/// `∫_{S⁵} f ḡ dΩ`, exact per monomial pair.
pub fn inner_product(f: &Polynomial6, g: &Polynomial6) -> Complex64 {
    // conj(z^c w^d) = z^d w^c on the sphere.
    let mut by_key: HashMap<[i16; 3], Vec<(Monomial6, Complex64)>> = HashMap::new();
    for (m, c) in g.terms() {
        let key = [0, 1, 2].map(|k| i16::from(m[k]) - i16::from(m[k + 3]));
        by_key.entry(key).or_default().push((*m, c.conj()));
    }
    let mut s = ZERO;
    for (mf, cf) in f.terms() {
        // need (a+d) = (b+c) per component: a - b = c - d.
        let key = [0, 1, 2].map(|k| i16::from(mf[k]) - i16::from(mf[k + 3]));
        if let Some(list) = by_key.get(&key) {
            for (mg, cg) in list {
                let comb = [
                    mf[0] + mg[3],
                    mf[1] + mg[4],
                    mf[2] + mg[5],
                    mf[3] + mg[0],
                    mf[4] + mg[1],
                    mf[5] + mg[2],
                ];
                s += cf * cg * sphere_moment(&comb);
            }
        }
    }
    s
}

/// `√⟨f, f⟩`.
pub fn sphere_norm(f: &Polynomial6) -> f64 {
    inner_product(f, f).re.max(0.0).sqrt()
}

/// Linear change of variables: old variable `j` is replaced by
/// `Σ_k map[j][k] y_k` in the new variables `y`.
pub fn substitute_linear(f: &Polynomial6, map: &[[Complex64; 6]; 6]) -> Polynomial6 {
    let images: Vec<Polynomial6> = (0..6)
        .map(|j| {
            Polynomial6::from_terms((0..6).map(|k| {
                let mut m = [0u8; 6];
                m[k] = 1;
                (m, map[j][k])
            }))
        })
        .collect();
    let mut powers: Vec<Vec<Polynomial6>> = images
        .iter()
        .map(|p| vec![Polynomial6::constant(ONE), p.clone()])
        .collect();
    let mut out = Polynomial6::zero();
    for (m, c) in f.terms() {
        let mut t = Polynomial6::constant(*c);
        for j in 0..6 {
            let e = usize::from(m[j]);
            if e == 0 {
                continue;
            }
            while powers[j].len() <= e {
                let next = powers[j].last().expect("nonempty").mul(&images[j]);
                powers[j].push(next);
            }
            t = t.mul(&powers[j][e]);
        }
        out.add_assign(&t);
    }
    out
}

/// Rewrites a polynomial in the real variables `(ξ1, ξ2, ξ3, η1, η2, η3)`
/// (same exponent layout) in `(z, w)` via `ξ = (z+w)/2`, `η = (z-w)/(2i)`.
pub fn substitute_real(f: &Polynomial6) -> Polynomial6 {
    let mut map = [[ZERO; 6]; 6];
    for k in 0..3 {
        map[k][k] = Complex64::new(0.5, 0.0);
        map[k][k + 3] = Complex64::new(0.5, 0.0);
        map[k + 3][k] = -I * 0.5;
        map[k + 3][k + 3] = I * 0.5;
    }
    substitute_linear(f, &map)
}

/// Inverse of [`substitute_real`]: `z = ξ + iη`, `w = ξ - iη`.
pub fn to_real(f: &Polynomial6) -> Polynomial6 {
    let mut map = [[ZERO; 6]; 6];
    for k in 0..3 {
        map[k][k] = ONE;
        map[k][k + 3] = I;
        map[k + 3][k] = ONE;
        map[k + 3][k + 3] = -I;
    }
    substitute_linear(f, &map)
}

/// Six-dimensional rotation `ξ' = cos φ ξ - sin φ η`, `η' = sin φ ξ + cos φ η`
/// of the argument: returns `g(z) = f(ξ', η')`, which is `f(e^{iφ} z)`.
pub fn rotate_argument(f: &Polynomial6, phi: f64) -> Polynomial6 {
    let e = Complex64::from_polar(1.0, phi);
    let mut map = [[ZERO; 6]; 6];
    for k in 0..3 {
        map[k][k] = e;
        map[k + 3][k + 3] = e.conj();
    }
    substitute_linear(f, &map)
}

/// Harmonic projection of a homogeneous degree-`K` polynomial:
/// `H f = Σ_k (-1)^k (K-k+1)! / (4^k k! (K+1)!) ρ^{2k} Δ^k f`.
pub fn harmonic_projection(f: &Polynomial6) -> Polynomial6 {
    let Some(k_deg) = f.homogeneous_degree() else {
        return f.clone();
    };
    let mut out = f.clone();
    let mut lap = f.clone();
    let r2 = Polynomial6::rho_sq();
    let mut r2k = Polynomial6::constant(ONE);
    for k in 1..=k_deg / 2 {
        lap = apply(OperatorTag::Lap6, &lap);
        if lap.is_empty() {
            break;
        }
        r2k = r2k.mul(&r2);
        let coef = factorial_u(k_deg - k + 1)
            / (4f64.powi(k as i32) * factorial_u(k) * factorial_u(k_deg + 1));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.add_scaled(&r2k.mul(&lap), Complex64::new(sign * coef, 0.0));
    }
    out
}

/// `ν`-eigenvalue, doubled, of a monomial: `p - q`.
pub fn two_nu(m: &Monomial6) -> i32 {
    holo_degree(m) as i32 - anti_degree(m) as i32
}

/// Spherical components `z_{+1} = -(z1 + i z2)/√2`, `z_0 = z3`,
/// `z_{-1} = (z1 - i z2)/√2` (and the same for `w`), as polynomials.
pub fn spherical_z(two_m: i32, conj: bool) -> Polynomial6 {
    let off = if conj { 3 } else { 0 };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m1 = [0u8; 6];
    m1[off] = 1;
    let mut m2 = [0u8; 6];
    m2[off + 1] = 1;
    let mut m3 = [0u8; 6];
    m3[off + 2] = 1;
    match two_m {
        2 => {
            Polynomial6::from_terms([(m1, Complex64::new(-s, 0.0)), (m2, Complex64::new(0.0, -s))])
        }
        0 => Polynomial6::monomial(m3, ONE),
        -2 => {
            Polynomial6::from_terms([(m1, Complex64::new(s, 0.0)), (m2, Complex64::new(0.0, -s))])
        }
        _ => panic!("spherical component index must be -2, 0 or 2 (doubled)"),
    }
}
