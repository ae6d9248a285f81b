//! Tree functions of the six-dimensional sphere, their normalization,
//! enumeration and degeneracy bookkeeping, and the closed-form `J = 0`
//! sector.
//!
//! A tree function couples a solid harmonic of `ξ` (degree `j1`) and one of
//! `η` (degree `j2`) to total `(J, M)` and multiplies by the hyperangular
//! Jacobi factor:
//!
//! ```text
//! ρ^K Φ = N_{K j1 j2} [𝒴_{j1}(ξ) ⊗ 𝒴_{j2}(η)]_{JM} ρ^{2n} P_n^{(j2+½, j1+½)}((ξ²-η²)/ρ²)
//! ```
//!
//! with `n = (K - j1 - j2)/2`. The result is a homogeneous harmonic
//! polynomial of degree `K`, unit-normalized on `S⁵`.

use crate::coupling::clebsch_gordan;
use crate::kinematics::{reconstruct, FrameOrientation, ShapeState};
use crate::polyops::{harmonic_projection, inner_product, substitute_real, Polynomial6};
use crate::special_functions::{
    binomial, factorial, gamma_half, jacobi_binomial_coeffs, wigner_d_big, JacobiParams,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("invalid tree label K={k} j1={j1} j2={j2} J={j} M={m}")]
    InvalidLabel {
        k: i32,
        j1: i32,
        j2: i32,
        j: i32,
        m: i32,
    },
    #[error("no J=0 function for K={k}, nu={nu}")]
    InvalidSector { k: i32, nu: i32 },
}

/// Quantum numbers `(K, j1, j2, J, M)` of a tree function. All entries are
/// integers for the orbital tree basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeLabel {
    pub k: i32,
    pub j1: i32,
    pub j2: i32,
    pub j: i32,
    pub m: i32,
}

impl TreeLabel {
    pub fn new(k: i32, j1: i32, j2: i32, j: i32, m: i32) -> Result<Self, BasisError> {
        let l = Self { k, j1, j2, j, m };
        if l.is_valid() {
            Ok(l)
        } else {
            Err(BasisError::InvalidLabel { k, j1, j2, j, m })
        }
    }

    pub fn is_valid(&self) -> bool {
        let Self { k, j1, j2, j, m } = *self;
        j1 >= 0
            && j2 >= 0
            && k >= j1 + j2
            && (k - j1 - j2) % 2 == 0
            && j >= (j1 - j2).abs()
            && j <= j1 + j2
            && m.abs() <= j
    }

    /// Hyperangular order `n = (K - j1 - j2)/2`.
    pub fn n(&self) -> i32 {
        (self.k - self.j1 - self.j2) / 2
    }
}

/// Label of a simultaneous eigenfunction of `(Lap6, L2, L3, N, Ω')`:
/// `two_nu = 2ν = p - q` and `omega_index` orders the block eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymLabel {
    pub k: i32,
    pub j: i32,
    pub m: i32,
    pub two_nu: i32,
    pub omega_index: usize,
}

/// Normalization `N_{K j1 j2}` with
/// `N² = 2(K+2) n! Γ(n+j1+j2+2) / (Γ(n+j2+3/2) Γ(n+j1+3/2))`,
/// so that the hyperangular factor is unit-normalized against
/// `cos²Φ sin²Φ dΦ` on `[0, π/2]`.
pub fn tree_norm(k: i32, j1: i32, j2: i32) -> Result<f64, BasisError> {
    if j1 < 0 || j2 < 0 || k < j1 + j2 || (k - j1 - j2) % 2 != 0 {
        return Err(BasisError::InvalidLabel {
            k,
            j1,
            j2,
            j: 0,
            m: 0,
        });
    }
    let n = i64::from((k - j1 - j2) / 2);
    let (j1, j2) = (i64::from(j1), i64::from(j2));
    let num = 2.0 * f64::from(k + 2) * factorial(n) * gamma_half(2 * (n + j1 + j2 + 2));
    let den = gamma_half(2 * (n + j2) + 3) * gamma_half(2 * (n + j1) + 3);
    Ok((num / den).sqrt())
}

type SolidMemo = Mutex<HashMap<(i32, i32, usize), Arc<Polynomial6>>>;

/// Solid harmonic `r^l Y_{lm}` (Condon–Shortley) of the real 3-vector
/// occupying variables `offset..offset+3` of the real layout.
pub fn solid_harmonic(l: i32, m: i32, offset: usize) -> Polynomial6 {
    static MEMO: OnceLock<SolidMemo> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = memo.lock().expect("memo poisoned").get(&(l, m, offset)) {
        return (**p).clone();
    }
    let p = solid_harmonic_uncached(l, m, offset);
    memo.lock()
        .expect("memo poisoned")
        .insert((l, m, offset), Arc::new(p.clone()));
    p
}

fn solid_harmonic_uncached(l: i32, m: i32, offset: usize) -> Polynomial6 {
    assert!(l >= 0 && m.abs() <= l, "solid harmonic index out of range");
    let am = m.abs();
    let var = |k: usize| Polynomial6::var(offset + k);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let x_pm = if m >= 0 {
        var(0).add(&var(1).scale(i))
    } else {
        var(0).add(&var(1).scale(-i))
    };
    let r2 = var(0)
        .mul(&var(0))
        .add(&var(1).mul(&var(1)))
        .add(&var(2).mul(&var(2)));
    let f = |n: i32| factorial(i64::from(n));
    let mut sum = Polynomial6::zero();
    for k in 0..=(l - am) / 2 {
        let c = (if k % 2 == 0 { 1.0 } else { -1.0 })
            * binomial(f64::from(l), k as u32)
            * binomial(f64::from(2 * l - 2 * k), l as u32)
            * f(l - 2 * k)
            / f(l - 2 * k - am)
            / 2f64.powi(l);
        let term = var(2).pow((l - 2 * k - am) as u32).mul(&r2.pow(k as u32));
        sum.add_scaled(&term, one * c);
    }
    let norm = (f64::from(2 * l + 1) / (4.0 * std::f64::consts::PI) * f(l - am) / f(l + am)).sqrt();
    let sign = if m > 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    x_pm.pow(am as u32).mul(&sum).scale_re(norm * sign)
}

/// Tree function in the real layout `(ξ1, ξ2, ξ3, η1, η2, η3)`.
pub fn tree_function_real(label: &TreeLabel) -> Result<Polynomial6, BasisError> {
    if !label.is_valid() {
        let TreeLabel { k, j1, j2, j, m } = *label;
        return Err(BasisError::InvalidLabel { k, j1, j2, j, m });
    }
    let TreeLabel { k, j1, j2, j, m } = *label;
    let mut angular = Polynomial6::zero();
    for m1 in -j1..=j1 {
        let m2 = m - m1;
        if m2.abs() > j2 {
            continue;
        }
        let cg = clebsch_gordan(2 * j1, 2 * m1, 2 * j2, 2 * m2, 2 * j, 2 * m);
        if cg == 0.0 {
            continue;
        }
        let y = solid_harmonic(j1, m1, 0).mul(&solid_harmonic(j2, m2, 3));
        angular.add_scaled(&y, Complex64::new(cg, 0.0));
    }
    let n = label.n();
    let sq = |off: usize| {
        (0..3).fold(Polynomial6::zero(), |acc, k| {
            acc.add(&Polynomial6::var(off + k).pow(2))
        })
    };
    let (xi2, eta2) = (sq(0), sq(3));
    let params = JacobiParams {
        alpha: f64::from(j2) + 0.5,
        beta: f64::from(j1) + 0.5,
        n: n as u32,
    };
    let mut radial = Polynomial6::zero();
    for (s, c) in jacobi_binomial_coeffs(params).into_iter().enumerate() {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        let t = eta2.pow(s as u32).mul(&xi2.pow(n as u32 - s as u32));
        radial.add_scaled(&t, Complex64::new(sign * c, 0.0));
    }
    let norm = tree_norm(k, j1, j2)?;
    Ok(angular.mul(&radial).scale_re(norm))
}

/// Tree function as a polynomial in `(z, z*)`.
pub fn tree_function(label: &TreeLabel) -> Result<Polynomial6, BasisError> {
    static MEMO: OnceLock<Mutex<HashMap<TreeLabel, Arc<Polynomial6>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = memo.lock().expect("memo poisoned").get(label) {
        return Ok((**p).clone());
    }
    let p = substitute_real(&tree_function_real(label)?);
    memo.lock()
        .expect("memo poisoned")
        .insert(*label, Arc::new(p.clone()));
    Ok(p)
}

/// All tree labels of degree `K`, ordered by `(j1, j2, J, M)`.
pub fn enumerate_tree_basis(k: i32) -> Vec<TreeLabel> {
    let mut out = Vec::new();
    if k < 0 {
        return out;
    }
    for j1 in 0..=k {
        for j2 in 0..=(k - j1) {
            if (k - j1 - j2) % 2 != 0 {
                continue;
            }
            for j in (j1 - j2).abs()..=(j1 + j2) {
                for m in -j..=j {
                    out.push(TreeLabel { k, j1, j2, j, m });
                }
            }
        }
    }
    out
}

/// Pairs `(j1, j2)` admissible for given `(K, J)`.
pub fn admissible_pairs(k: i32, j: i32) -> Vec<(i32, i32)> {
    let mut v = Vec::new();
    for j1 in 0..=k {
        for j2 in 0..=(k - j1) {
            if (k - j1 - j2) % 2 == 0 && j >= (j1 - j2).abs() && j <= j1 + j2 {
                v.push((j1, j2));
            }
        }
    }
    v
}

/// SU(3) multiplicity `n(K, ν) = (K+2)(K+2-2ν)(K+2+2ν)/8` with `2ν = two_nu`;
/// zero outside `|2ν| ≤ K`, `2ν ≡ K (mod 2)`.
pub fn degeneracy(k: i32, two_nu: i32) -> i64 {
    if k < 0 || two_nu.abs() > k || (k - two_nu).rem_euclid(2) != 0 {
        return 0;
    }
    let (k, t) = (i64::from(k), i64::from(two_nu));
    (k + 2) * (k + 2 - t) * (k + 2 + t) / 8
}

/// `n(K) = (K+3)(K+2)²(K+1)/12`.
pub fn degeneracy_total(k: i32) -> i64 {
    if k < 0 {
        return 0;
    }
    let k = i64::from(k);
    (k + 3) * (k + 2) * (k + 2) * (k + 1) / 12
}

/// Largest multiplicity over `ν`: `n(K, 0) = (K+2)³/8` for even `K` and
/// `n(K, ½) = (K+1)(K+2)(K+3)/8` for odd `K`.
pub fn degeneracy_max(k: i32) -> i64 {
    degeneracy(k, k % 2)
}

/// Dimension of harmonic polynomials of degree `K` in six variables,
/// `C(K+5, 5) - C(K+3, 5)`.
pub fn harmonic_dimension(k: i32) -> i64 {
    let c5 = |n: i64| {
        if n < 5 {
            0
        } else {
            n * (n - 1) * (n - 2) * (n - 3) * (n - 4) / 120
        }
    };
    c5(i64::from(k) + 5) - c5(i64::from(k) + 3)
}

/// Number of monomials of degree `d` in three variables of weights
/// `+1, 0, -1` whose weights add up to `w`.
fn weight_count(d: i32, w: i32) -> i64 {
    if d < 0 {
        return 0;
    }
    // a + b + c = d, a - c = w
    (0..=d).filter(|&c| c + w >= 0 && 2 * c + w <= d).count() as i64
}

/// Number of harmonic polynomials of bidegree `(p, q)` in `(z, z*)` with
/// `L3` weight `w`.
fn harmonic_weight_count(p: i32, q: i32, w: i32) -> i64 {
    let bideg = |p: i32, q: i32| -> i64 {
        if p < 0 || q < 0 {
            return 0;
        }
        (-p..=p)
            .map(|u| weight_count(p, u) * weight_count(q, w - u))
            .sum()
    };
    bideg(p, q) - bideg(p - 1, q - 1)
}

/// Multiplicity of angular momentum `J` inside the `(K, ν)` sector, i.e. the
/// number of independent `Ω` eigenfunctions in each `(K, J, M, ν)` block.
/// Counted from `L3` weights of bidegree-`(p, q)` harmonic polynomials with
/// `p - q = 2ν`, `p + q = K`.
pub fn block_dimension(k: i32, j: i32, two_nu: i32) -> i64 {
    if degeneracy(k, two_nu) == 0 || j < 0 {
        return 0;
    }
    let (p, q) = ((k + two_nu) / 2, (k - two_nu) / 2);
    harmonic_weight_count(p, q, j) - harmonic_weight_count(p, q, j + 1)
}

fn j0_check(k: i32, nu: i32) -> Result<(i32, i32), BasisError> {
    let bad = BasisError::InvalidSector { k, nu };
    if k < 0 || k % 2 != 0 {
        return Err(bad);
    }
    let p = k / 2 + nu;
    let q = k / 2 - nu;
    if p < 0 || q < 0 || p % 2 != 0 || q % 2 != 0 {
        return Err(bad);
    }
    Ok((p, q))
}

/// `ν` values (eigenvalues of `N`) carried by the `J = 0` sector of degree `K`.
pub fn j0_nus(k: i32) -> Vec<i32> {
    (-k / 2..=k / 2)
        .filter(|&nu| j0_check(k, nu).is_ok())
        .collect()
}

/// Closed-form `J = 0` function `D^{K/4}_{ν/2,-ν/2}(2λ, 2a, 0)`, with `ν`
/// the eigenvalue of `N`.
pub fn j0_harmonic(k: i32, nu: i32, lambda: f64, a: f64) -> Result<Complex64, BasisError> {
    j0_check(k, nu)?;
    wigner_d_big(k / 2, nu, -nu, (2.0 * lambda, 2.0 * a, 0.0))
        .map_err(|_| BasisError::InvalidSector { k, nu })
}

/// Polynomial realization of [`j0_harmonic`]: the harmonic projection of
/// `(z·z)^{p/2} (z*·z*)^{q/2}` with `p = K/2 + ν`, `q = K/2 - ν`, scaled to
/// coincide with the closed form on the unit sphere.
pub fn j0_harmonic_poly(k: i32, nu: i32) -> Result<Polynomial6, BasisError> {
    let (p, q) = j0_check(k, nu)?;
    let mut zz = Polynomial6::zero();
    let mut ww = Polynomial6::zero();
    for i in 0..3 {
        zz.add_assign(&Polynomial6::var(i).pow(2));
        ww.add_assign(&Polynomial6::var(i + 3).pow(2));
    }
    let raw = harmonic_projection(&zz.pow((p / 2) as u32).mul(&ww.pow((q / 2) as u32)));
    let (lambda, a) = (0.37, 0.61);
    let s = ShapeState {
        rho: 1.0,
        lambda,
        a,
    };
    let f = FrameOrientation {
        phi1: 0.2,
        theta: 0.9,
        phi2: -0.4,
    };
    let z = reconstruct(&s, &f);
    let target = j0_harmonic(k, nu, lambda, a)?;
    let got = raw.evaluate(&z.z);
    Ok(raw.scale(target / got))
}

fn j0_prefactor_literal(k: i32, j: i32) -> f64 {
    let (kk, jj) = (i64::from(k), i64::from(j));
    -((f64::from(k + 2) / f64::from(2 * j + 1)).sqrt()) / 2f64.powf(2.0 * f64::from(j) - 0.5)
        * gamma_half(2 * (2 * jj + 2))
        * gamma_half(2 * kk + 3)
        / (gamma_half(2 * (jj + 1)) * gamma_half(2 * jj + 3) * gamma_half(kk + 3))
}

/// Expansion coefficients of the `J = 0` tree function with `j1 = j2 = j`
/// over `D^{K/4}_{ν/2,-ν/2}(2λ, 2a, 0)`, in the literal closed form
/// `-i^j 2^{½-2j} ((K+2)/(2j+1))^{½} Γ(2j+2)Γ(K+3/2) / (Γ(j+1)Γ(j+3/2)Γ((K+3)/2))
/// (K/4, ν/2; K/4, -ν/2 | j 0)`. Returned as `(ν, c_ν)` in ascending `ν`.
pub fn j0_expansion_coeffs_literal(k: i32, j: i32) -> Result<Vec<(i32, Complex64)>, BasisError> {
    if 2 * j > k {
        return Err(BasisError::InvalidLabel {
            k,
            j1: j,
            j2: j,
            j: 0,
            m: 0,
        });
    }
    let ij = Complex64::i().powi(j);
    let pref = j0_prefactor_literal(k, j);
    j0_nus(k)
        .into_iter()
        .map(|nu| {
            let cg = clebsch_gordan(k / 2, nu, k / 2, -nu, 2 * j, 0);
            Ok((nu, ij * pref * cg))
        })
        .collect()
}

/// Expansion coefficients in the form that matches the exact projection up
/// to one constant per `K`: the literal closed form times `√(2j+1) i^{-ν}`,
/// which removes its `(2j+1)^{-½}` factor and applies the phase of the
/// `D`-function convention used here.
pub fn j0_expansion_coeffs(k: i32, j: i32) -> Result<Vec<(i32, Complex64)>, BasisError> {
    let lit = j0_expansion_coeffs_literal(k, j)?;
    Ok(lit
        .into_iter()
        .map(|(nu, c)| {
            (
                nu,
                c * f64::from(2 * j + 1).sqrt() * Complex64::i().powi(-nu),
            )
        })
        .collect())
}

/// Expansion coefficients by exact projection
/// `c_ν = ⟨Φ, D_ν⟩ / ⟨D_ν, D_ν⟩` on `S⁵`.
pub fn j0_projection_coeffs(k: i32, j: i32) -> Result<Vec<(i32, Complex64)>, BasisError> {
    let tree = tree_function(&TreeLabel::new(k, j, j, 0, 0)?)?;
    j0_nus(k)
        .into_iter()
        .map(|nu| {
            let d = j0_harmonic_poly(k, nu)?;
            Ok((nu, inner_product(&tree, &d) / inner_product(&d, &d)))
        })
        .collect()
}
