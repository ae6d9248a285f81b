//! Six-dimensional rotation coefficients between tree bases, the Weyl turn
//! to the `(z, z*)` frame, the split by the eigenvalue of `N`, and the
//! diagonalization of `Ω' = iΩ` inside `(K, J, M, ν)` blocks.
//!
//! A rotation by `φ` in the `(ξ, η)` plane, `ξ' = ξ cos φ - η sin φ`,
//! `η' = ξ sin φ + η cos φ`, is `z → e^{iφ} z`. The coefficients are defined
//! by `Φ_{j1 j2}(ξ', η') = Σ ⟨j1' j2'|j1 j2⟩^φ Φ_{j1' j2'}(ξ, η)`; the matrix
//! is stored with rows `(j1', j2')` and columns `(j1, j2)`, both in the order
//! of [`admissible_pairs`].
//!
//! Each column is computed by splitting the rotated function into a
//! `ξ`-branch of degree `K1 = K - j2` and an `η`-branch of degree
//! `K2 = j2 = r + s`, expanding each branch over the rotated two-vector tree
//! functions and recoupling the four momenta through the double-brace symbol.
//! Two evaluations of the branch factors are provided: Jacobi polynomials at
//! `-cos 2φ`, and `d`-functions of argument `2φ` with the `1/sin 2φ`
//! normalization factor.

use crate::basis::{admissible_pairs, tree_function, tree_norm, BasisError, SymLabel, TreeLabel};
use crate::coupling::{double_brace, wigner_9j};
use crate::kinematics::{reconstruct, FrameOrientation, ShapeState};
use crate::polyops::{apply, inner_product, rotate_argument, OperatorTag, Polynomial6};
use crate::special_functions::{
    binomial, gamma_half, jacobi_binomial_coeffs, jacobi_poly, wigner_d_big,
    wigner_small_d_extended, JacobiParams, SpecialError,
};
use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("the d-function form needs 0 < phi < pi/2, got phi = {0}")]
    SingularAngle(f64),
    #[error("empty block K={k} J={j} M={m} 2nu={two_nu}")]
    EmptyBlock { k: i32, j: i32, m: i32, two_nu: i32 },
    #[error("2nu={two_nu} does not occur in the split of {label:?}")]
    NuAbsent { label: TreeLabel, two_nu: i32 },
    #[error("Gram matrix of the block is not positive definite")]
    Gram,
}

/// Evaluation route for [`rotation_coefficient`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffForm {
    /// Branch factors from Jacobi polynomials of `-cos 2φ`.
    Jacobi,
    /// Branch factors from `d`-functions of `2φ` over `sin 2φ`.
    DFunction,
    /// Exact overlap integrals of rotated tree polynomials.
    Overlap,
}

/// Matrix of rotation coefficients `⟨j1' j2'|j1 j2⟩^φ_{KJM}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationCoeff {
    pub k: i32,
    pub j: i32,
    pub m: i32,
    pub phi: f64,
    /// Row and column labels `(j1, j2)`.
    pub pairs: Vec<(i32, i32)>,
    /// `matrix[row][col] = ⟨pairs[row] | pairs[col]⟩`.
    pub matrix: Vec<Vec<f64>>,
}

impl RotationCoeff {
    pub fn entry(&self, row: (i32, i32), col: (i32, i32)) -> Option<f64> {
        let r = self.pairs.iter().position(|&p| p == row)?;
        let c = self.pairs.iter().position(|&p| p == col)?;
        Some(self.matrix[r][c])
    }

    /// `max |RᵀR - 1|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.pairs.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..n).map(|r| self.matrix[r][a] * self.matrix[r][b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }

    /// Matrix product `self · other` (rotation by the sum of the angles).
    pub fn compose(&self, other: &RotationCoeff) -> Vec<Vec<f64>> {
        let n = self.pairs.len();
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| (0..n).map(|t| self.matrix[r][t] * other.matrix[t][c]).sum())
                    .collect()
            })
            .collect()
    }
}

/// `h_{K a b}(Φ) = cos^a Φ sin^b Φ P_n^{(b+½, a+½)}(cos 2Φ)` expanded as
/// `(cos power, sin power, coefficient)` terms.
fn hyper_terms(k: i32, a: i32, b: i32) -> Vec<(i64, i64, f64)> {
    let n = (k - a - b) / 2;
    let params = JacobiParams {
        alpha: f64::from(b) + 0.5,
        beta: f64::from(a) + 0.5,
        n: n as u32,
    };
    jacobi_binomial_coeffs(params)
        .into_iter()
        .enumerate()
        .map(|(s, c)| {
            let s = s as i64;
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            (
                i64::from(a) + 2 * (i64::from(n) - s),
                i64::from(b) + 2 * s,
                sign * c,
            )
        })
        .collect()
}

/// `∫_0^{π/2} h_{K j1' j2'} h_{K1 p q} h_{K2 r s} cos²Φ sin²Φ dΦ`, exact.
#[allow(clippy::too_many_arguments)]
fn hyper_overlap(
    k: i32,
    j1p: i32,
    j2p: i32,
    k1: i32,
    p: i32,
    q: i32,
    k2: i32,
    r: i32,
    s: i32,
) -> f64 {
    let (ta, tb, tc) = (
        hyper_terms(k, j1p, j2p),
        hyper_terms(k1, p, q),
        hyper_terms(k2, r, s),
    );
    let mut sum = 0.0;
    for &(ca, sa, xa) in &ta {
        for &(cb, sb, xb) in &tb {
            for &(cc, sc, xc) in &tc {
                let (a, b) = (ca + cb + cc + 2, sa + sb + sc + 2);
                // ∫ cos^a sin^b = Γ((a+1)/2) Γ((b+1)/2) / (2 Γ((a+b)/2 + 1))
                let beta = gamma_half(a + 1) * gamma_half(b + 1) / (2.0 * gamma_half(a + b + 2));
                sum += xa * xb * xc * beta;
            }
        }
    }
    sum
}

fn norm(k: i32, a: i32, b: i32) -> f64 {
    tree_norm(k, a, b).expect("branch labels are admissible by construction")
}

/// Branch factor `h_{K a b}(φ)` in the Jacobi form `(-1)^n cos^a sin^b P_n^{(a+½,b+½)}(-cos 2φ)`.
fn branch_jacobi(k: i32, a: i32, b: i32, phi: f64) -> Result<f64, TransformError> {
    let n = (k - a - b) / 2;
    let params = JacobiParams {
        alpha: f64::from(a) + 0.5,
        beta: f64::from(b) + 0.5,
        n: n as u32,
    };
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * phi.cos().powi(a) * phi.sin().powi(b) * jacobi_poly(params, -(2.0 * phi).cos())?)
}

/// Branch factor `h_{K a b}(φ) √(sin φ cos φ)` in the `d`-function form
/// `√((l+b')!(l-b')!/((l+a')!(l-a')!)) d^l_{a' b'}(2φ)` with `l = (K+1)/2`,
/// `a' = (a+b+1)/2`, `b' = (a-b)/2`.
fn branch_d(k: i32, a: i32, b: i32, phi: f64) -> Result<f64, TransformError> {
    let (two_l, two_a, two_b) = (k + 1, a + b + 1, a - b);
    let g = |t: i32| gamma_half(i64::from(t) + 2);
    let ratio =
        (g(two_l + two_b) * g(two_l - two_b) / (g(two_l + two_a) * g(two_l - two_a))).sqrt();
    Ok(ratio * wigner_small_d_extended(two_l, two_a, two_b, 2.0 * phi)?)
}

type BranchFn = fn(i32, i32, i32, f64) -> Result<f64, TransformError>;

fn closed_form_matrix(
    k: i32,
    j: i32,
    phi: f64,
    form: CoeffForm,
) -> Result<Vec<Vec<f64>>, TransformError> {
    let pairs = admissible_pairs(k, j);
    let (global, branch): (f64, BranchFn) = match form {
        CoeffForm::Jacobi => (1.0, branch_jacobi),
        CoeffForm::DFunction => {
            let s2 = (2.0 * phi).sin();
            if !(phi > 0.0 && phi < PI / 2.0) || s2 < 1e-12 {
                return Err(TransformError::SingularAngle(phi));
            }
            (2.0 / s2, branch_d)
        }
        CoeffForm::Overlap => unreachable!("overlap form is handled separately"),
    };
    let n = pairs.len();
    let mut mat = vec![vec![0.0; n]; n];
    for (col, &(j1, j2)) in pairs.iter().enumerate() {
        let k1 = k - j2;
        let n1 = (k1 - j1) / 2;
        let h0 = binomial(f64::from(n1) + 0.5, n1 as u32);
        let nine = wigner_9j([
            [2 * j1, 0, 2 * j1],
            [0, 2 * j2, 2 * j2],
            [2 * j1, 2 * j2, 2 * j],
        ]);
        let d = norm(k, j1, j2)
            * norm(k1, j1, 0)
            * norm(j2, 0, j2)
            * hyper_overlap(k, j1, j2, k1, j1, 0, j2, 0, j2)
            * f64::from((2 * j1 + 1) * (2 * j2 + 1))
            * nine
            / (4.0 * PI);
        let pref = global / (4.0 * PI * norm(k1, j1, 0) * h0 * norm(j2, 0, j2) * d);
        for p in 0..=k1 {
            for q in 0..=(k1 - p) {
                if (k1 - p - q) % 2 != 0
                    || (p - q).abs() > j1
                    || j1 > p + q
                    || (p + q + j1) % 2 != 0
                {
                    continue;
                }
                let ha = branch(k1, p, q, phi)?;
                let sign_q = if q % 2 == 0 { 1.0 } else { -1.0 };
                for r in 0..=j2 {
                    let s = j2 - r;
                    let hb = branch(j2, s, r, phi)?;
                    let w = sign_q * norm(k1, p, q).powi(2) * norm(j2, r, s).powi(2) * ha * hb;
                    for (row, &(j1p, j2p)) in pairs.iter().enumerate() {
                        let db = double_brace(p, r, j1p, q, s, j2p, j1, j2, j);
                        if db == 0.0 {
                            continue;
                        }
                        let hyp = hyper_overlap(k, j1p, j2p, k1, p, q, j2, r, s);
                        mat[row][col] += pref * w * db * norm(k, j1p, j2p) * hyp;
                    }
                }
            }
        }
    }
    Ok(mat)
}

fn overlap_matrix(k: i32, j: i32, m: i32, phi: f64) -> Result<Vec<Vec<f64>>, TransformError> {
    let pairs = admissible_pairs(k, j);
    let trees = pairs
        .iter()
        .map(|&(j1, j2)| tree_function(&TreeLabel::new(k, j1, j2, j, m)?))
        .collect::<Result<Vec<_>, _>>()?;
    let n = pairs.len();
    let mut mat = vec![vec![0.0; n]; n];
    for (col, t) in trees.iter().enumerate() {
        let rotated = rotate_argument(t, phi);
        for (row, tp) in trees.iter().enumerate() {
            mat[row][col] = inner_product(&rotated, tp).re;
        }
    }
    Ok(mat)
}

/// Rotation coefficients for all admissible `(j1', j2'), (j1, j2)` at fixed
/// `(K, J, M)`. The branch split uses `K2 = j2` for every column. An
/// inadmissible `(K, J, M)` gives an empty matrix.
pub fn rotation_coefficient(
    k: i32,
    j: i32,
    m: i32,
    phi: f64,
    form: CoeffForm,
) -> Result<RotationCoeff, TransformError> {
    let pairs = if k < 0 || j < 0 || m.abs() > j {
        Vec::new()
    } else {
        admissible_pairs(k, j)
    };
    let matrix = if pairs.is_empty() {
        Vec::new()
    } else {
        match form {
            CoeffForm::Overlap => overlap_matrix(k, j, m, phi)?,
            _ => closed_form_matrix(k, j, phi, form)?,
        }
    };
    Ok(RotationCoeff {
        k,
        j,
        m,
        phi,
        pairs,
        matrix,
    })
}

/// Expansion of the rotated tree function over the unrotated tree basis.
pub fn rotate_tree(label: &TreeLabel, phi: f64) -> Result<Vec<(TreeLabel, f64)>, TransformError> {
    let TreeLabel { k, j1, j2, j, m } =
        TreeLabel::new(label.k, label.j1, label.j2, label.j, label.m)?;
    let rc = rotation_coefficient(k, j, m, phi, CoeffForm::Jacobi)?;
    let col = rc
        .pairs
        .iter()
        .position(|&p| p == (j1, j2))
        .expect("label pair is admissible");
    Ok(rc
        .pairs
        .iter()
        .enumerate()
        .map(|(row, &(a, b))| {
            (
                TreeLabel {
                    k,
                    j1: a,
                    j2: b,
                    j,
                    m,
                },
                rc.matrix[row][col],
            )
        })
        .collect())
}

/// Tree function carried to the `(z, z*)` frame by the rotation by `π/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylTurn {
    pub label: TreeLabel,
    /// `Φ_{j1 j2}(ξ', η')` at `φ = π/4` as a polynomial in `(z, z*)`.
    pub polynomial: Polynomial6,
    /// Coefficients `⟨j1' j2'|j1 j2⟩^{π/4}` over the tree basis.
    pub coeffs: Vec<(TreeLabel, f64)>,
}

/// Weyl turn of a tree function. Memoized per label.
pub fn weyl_turn(label: &TreeLabel) -> Result<WeylTurn, TransformError> {
    static MEMO: OnceLock<Mutex<HashMap<TreeLabel, Arc<WeylTurn>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = memo.lock().expect("memo poisoned").get(label) {
        return Ok((**t).clone());
    }
    let coeffs = rotate_tree(label, PI / 4.0)?;
    let polynomial = rotate_argument(&tree_function(label)?, PI / 4.0);
    let turn = WeylTurn {
        label: *label,
        polynomial,
        coeffs,
    };
    memo.lock()
        .expect("memo poisoned")
        .insert(*label, Arc::new(turn.clone()));
    Ok(turn)
}

/// One `N`-eigencomponent of a turned tree function, tagged by `(j1, j2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuPiece {
    pub two_nu: i32,
    pub j1: i32,
    pub j2: i32,
    pub polynomial: Polynomial6,
}

/// Splits a turned function by `2ν = p - q` (holomorphic minus
/// antiholomorphic degree), in ascending `ν`.
pub fn nu_split(turn: &WeylTurn) -> Vec<NuPiece> {
    turn.polynomial
        .nu_split()
        .into_iter()
        .map(|(two_nu, polynomial)| NuPiece {
            two_nu,
            j1: turn.label.j1,
            j2: turn.label.j2,
            polynomial,
        })
        .collect()
}

/// Coefficient `a(Λ, μ)` of `D^Λ_{ν, μ/2}(λ, a, 0) D^J_{μ M}(φ1, θ, φ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralCoeff {
    pub two_lambda: i32,
    pub mu: i32,
    pub value: Complex64,
}

/// Expansion of one `ν`-component of a turned tree function over products
/// of shape and frame `D`-functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSolution {
    pub label: TreeLabel,
    pub two_nu: i32,
    pub coeffs: Vec<GeneralCoeff>,
}

impl GeneralSolution {
    /// Value of the expansion at `ρ = 1`.
    pub fn evaluate(&self, s: &ShapeState, f: &FrameOrientation) -> Complex64 {
        self.coeffs
            .iter()
            .map(|c| c.value * general_basis(self.label, self.two_nu, c.two_lambda, c.mu, s, f))
            .sum()
    }
}

fn general_basis(
    label: TreeLabel,
    two_nu: i32,
    two_lambda: i32,
    mu: i32,
    s: &ShapeState,
    f: &FrameOrientation,
) -> Complex64 {
    let shape =
        wigner_d_big(two_lambda, two_nu, mu, (s.lambda, s.a, 0.0)).expect("indices are in range");
    let frame = wigner_d_big(2 * label.j, 2 * mu, 2 * label.m, (f.phi1, f.theta, f.phi2))
        .expect("indices are in range");
    shape * frame
}

/// Index set `(2Λ, μ)`: `|μ| <= J`, `μ ≡ 2ν (mod 2)`, `max(|ν|, |μ|/2) <= Λ <= K/2`.
fn general_terms(label: &TreeLabel, two_nu: i32) -> Vec<(i32, i32)> {
    let mut v = Vec::new();
    for mu in -label.j..=label.j {
        if (mu - two_nu).rem_euclid(2) != 0 {
            continue;
        }
        let mut t = two_nu.abs().max(mu.abs());
        while t <= label.k {
            v.push((t, mu));
            t += 2;
        }
    }
    v
}

fn nu_piece(label: &TreeLabel, two_nu: i32) -> Result<Polynomial6, TransformError> {
    let turn = weyl_turn(label)?;
    nu_split(&turn)
        .into_iter()
        .find(|p| p.two_nu == two_nu && p.polynomial.max_abs() > 1e-13)
        .map(|p| p.polynomial)
        .ok_or(TransformError::NuAbsent {
            label: *label,
            two_nu,
        })
}

/// Coefficients by projection: the frame dependence is integrated with a
/// trapezoid rule in `φ1` and Gauss–Legendre in `θ`, the shape dependence
/// with Gauss–Legendre in `a`, using the orthogonality of `D^J` over the
/// rotation group and of `d^Λ_{ν,μ/2}(a)` on `[0, π]`.
pub fn general_solution_coeffs(
    label: &TreeLabel,
    two_nu: i32,
) -> Result<GeneralSolution, TransformError> {
    let label = TreeLabel::new(label.k, label.j1, label.j2, label.j, label.m)?;
    let f = nu_piece(&label, two_nu)?;
    let terms = general_terms(&label, two_nu);
    let nodes = GaussLegendre::new((2 * label.k as usize + 14).try_into().expect("nonzero"));
    let nodes: Vec<(f64, f64)> = nodes
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| ((x + 1.0) * PI / 2.0, w * PI / 2.0))
        .collect();
    let n_phi = 2 * label.k + 3;
    let j = label.j;
    // g[μ index][a index] = (2J+1)/(8π²) ∫ f D^{J*}_{μM} dR, with the φ2
    // integral done analytically since f ∝ e^{-iMφ2}.
    let mus: Vec<i32> = (-j..=j).collect();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); nodes.len()]; mus.len()];
    for (ia, &(a, _)) in nodes.iter().enumerate() {
        let shape = ShapeState {
            rho: 1.0,
            lambda: 0.0,
            a,
        };
        for &(theta, wt) in &nodes {
            for t in 0..n_phi {
                let phi1 = 2.0 * PI * f64::from(t) / f64::from(n_phi);
                let frame = FrameOrientation {
                    phi1,
                    theta,
                    phi2: 0.0,
                };
                let val = f.evaluate(&reconstruct(&shape, &frame).z);
                let w = wt * theta.sin() * 2.0 * PI / f64::from(n_phi) * 2.0 * PI;
                for (im, &mu) in mus.iter().enumerate() {
                    let d = wigner_d_big(2 * j, 2 * mu, 2 * label.m, (phi1, theta, 0.0))?;
                    g[im][ia] += val * d.conj() * w;
                }
            }
        }
    }
    let norm_r = f64::from(2 * j + 1) / (8.0 * PI * PI);
    let coeffs = terms
        .into_iter()
        .map(|(two_lambda, mu)| {
            let im = (mu + j) as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for (ia, &(a, wa)) in nodes.iter().enumerate() {
                let d = wigner_d_big(two_lambda, two_nu, mu, (0.0, a, 0.0))?.re;
                acc += g[im][ia] * norm_r * d * a.sin() * wa;
            }
            let value = acc * f64::from(two_lambda + 1) / 2.0;
            Ok(GeneralCoeff {
                two_lambda,
                mu,
                value,
            })
        })
        .collect::<Result<Vec<_>, TransformError>>()?;
    Ok(GeneralSolution {
        label,
        two_nu,
        coeffs,
    })
}

/// Least-squares fit of the same expansion to `samples` point values on a
/// deterministic low-discrepancy set. Returns the fit and its relative
/// residual `‖Ax - b‖ / ‖b‖`.
pub fn general_solution_fit(
    label: &TreeLabel,
    two_nu: i32,
    samples: usize,
) -> Result<(GeneralSolution, f64), TransformError> {
    let label = TreeLabel::new(label.k, label.j1, label.j2, label.j, label.m)?;
    let f = nu_piece(&label, two_nu)?;
    let terms = general_terms(&label, two_nu);
    let irr = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_2,
        0.438_289_043_977_341_6,
        0.342_205_593_609_815_3,
        0.267_504_041_424_233_9,
    ];
    let mut a_mat = DMatrix::<Complex64>::zeros(samples, terms.len());
    let mut b = DVector::<Complex64>::zeros(samples);
    for i in 0..samples {
        let u: Vec<f64> = irr
            .iter()
            .map(|&x| (0.5 + x * (i as f64 + 1.0)).fract())
            .collect();
        let s = ShapeState {
            rho: 1.0,
            lambda: 2.0 * PI * u[0],
            a: PI * u[1],
        };
        let fr = FrameOrientation {
            phi1: 2.0 * PI * u[2],
            theta: PI * u[3],
            phi2: 2.0 * PI * u[4],
        };
        b[i] = f.evaluate(&reconstruct(&s, &fr).z);
        for (c, &(two_lambda, mu)) in terms.iter().enumerate() {
            a_mat[(i, c)] = general_basis(label, two_nu, two_lambda, mu, &s, &fr);
        }
    }
    let svd = a_mat.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).map_err(|_| TransformError::Gram)?;
    let residual = (&a_mat * &x - &b).norm() / b.norm();
    let coeffs = terms
        .into_iter()
        .zip(x.iter())
        .map(|((two_lambda, mu), &value)| GeneralCoeff {
            two_lambda,
            mu,
            value,
        })
        .collect();
    Ok((
        GeneralSolution {
            label,
            two_nu,
            coeffs,
        },
        residual,
    ))
}

/// `Ω' = iΩ` and the overlap matrix over the `(j1, j2)`-tagged `ν`-components
/// of one `(K, J, M, ν)` block.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaBlock {
    pub k: i32,
    pub j: i32,
    pub m: i32,
    pub two_nu: i32,
    pub tags: Vec<(i32, i32)>,
    pub basis: Vec<Polynomial6>,
    /// `matrix[a][b] = ⟨f_a | Ω' f_b⟩`.
    pub matrix: Vec<Vec<Complex64>>,
    /// `gram[a][b] = ⟨f_a | f_b⟩`.
    pub gram: Vec<Vec<Complex64>>,
}

/// Simultaneous eigenfunction of `(Lap6, L2, L3, N, Ω')`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymFunction {
    pub label: SymLabel,
    /// Eigenvalue of `Ω' = iΩ`.
    pub omega: f64,
    /// Coefficients over the tagged block basis.
    pub components: Vec<((i32, i32), Complex64)>,
    pub polynomial: Polynomial6,
}

/// Builds the block from the `ν`-components of the turned tree functions.
pub fn omega_block(k: i32, j: i32, m: i32, two_nu: i32) -> Result<OmegaBlock, TransformError> {
    let empty = TransformError::EmptyBlock { k, j, m, two_nu };
    if k < 0 || j < 0 || m.abs() > j {
        return Err(empty);
    }
    let mut tags = Vec::new();
    let mut basis = Vec::new();
    for (j1, j2) in admissible_pairs(k, j) {
        match nu_piece(&TreeLabel::new(k, j1, j2, j, m)?, two_nu) {
            Ok(p) => {
                tags.push((j1, j2));
                basis.push(p);
            }
            Err(TransformError::NuAbsent { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if basis.is_empty() {
        return Err(empty);
    }
    let images: Vec<Polynomial6> = basis
        .iter()
        .map(|f| apply(OperatorTag::Omega, f).scale(Complex64::i()))
        .collect();
    let n = basis.len();
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut gram = matrix.clone();
    for a in 0..n {
        for b in 0..n {
            matrix[a][b] = inner_product(&images[b], &basis[a]);
            gram[a][b] = inner_product(&basis[b], &basis[a]);
        }
    }
    Ok(OmegaBlock {
        k,
        j,
        m,
        two_nu,
        tags,
        basis,
        matrix,
        gram,
    })
}

const GRAM_COND_MAX: f64 = 1e12;
const GRAM_RANK_TOL: f64 = 1e-10;

fn to_dmatrix(m: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |r, c| m[r][c])
}

/// Solves `H v = ω G v`. The Gram matrix is Cholesky-factored when its
/// condition number is below `1e12`; otherwise the tagged set is first
/// reduced to the eigenvectors of `G` above a relative threshold `1e-10`.
/// Eigenvectors are `G`-orthonormal, ordered by eigenvalue and then by the
/// `(j1, j2)` tag of their dominant component, with that component made
/// real and positive.
pub fn diagonalize_block(b: &OmegaBlock) -> Result<Vec<SymFunction>, TransformError> {
    let h = to_dmatrix(&b.matrix);
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let g = to_dmatrix(&b.gram);
    let g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let ge = g.clone().symmetric_eigen();
    let gmax = ge.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let gmin = ge.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if gmax <= 0.0 {
        return Err(TransformError::Gram);
    }
    // Columns of `t` map reduced coordinates to tagged coefficients with tᴴ G t = 1.
    let t: DMatrix<Complex64> = if gmin > gmax / GRAM_COND_MAX {
        let chol = g.cholesky().ok_or(TransformError::Gram)?;
        let linv = chol.l().try_inverse().ok_or(TransformError::Gram)?;
        linv.adjoint()
    } else {
        let keep: Vec<usize> = (0..ge.eigenvalues.len())
            .filter(|&i| ge.eigenvalues[i] > GRAM_RANK_TOL * gmax)
            .collect();
        let mut t = DMatrix::<Complex64>::zeros(g.nrows(), keep.len());
        for (c, &i) in keep.iter().enumerate() {
            let s = 1.0 / ge.eigenvalues[i].sqrt();
            t.set_column(c, &(ge.eigenvectors.column(i) * Complex64::new(s, 0.0)));
        }
        t
    };
    let hr = t.adjoint() * &h * &t;
    let hr = (&hr + hr.adjoint()) * Complex64::new(0.5, 0.0);
    let he = hr.symmetric_eigen();
    let mut sols: Vec<(f64, (i32, i32), DVector<Complex64>)> = (0..he.eigenvalues.len())
        .map(|i| {
            let mut v: DVector<Complex64> = &t * he.eigenvectors.column(i);
            let mut dom = 0;
            for a in 1..v.len() {
                if v[a].norm() > v[dom].norm() + 1e-12 {
                    dom = a;
                }
            }
            let ph = v[dom].conj() / v[dom].norm();
            v *= ph;
            (he.eigenvalues[i], b.tags[dom], v)
        })
        .collect();
    sols.sort_by(|x, y| {
        if (x.0 - y.0).abs() < 1e-9 {
            x.1.cmp(&y.1)
        } else {
            x.0.partial_cmp(&y.0).expect("finite eigenvalues")
        }
    });
    Ok(sols
        .into_iter()
        .enumerate()
        .map(|(idx, (omega, _, v))| {
            let mut poly = Polynomial6::zero();
            for (a, f) in b.basis.iter().enumerate() {
                poly.add_scaled(f, v[a]);
            }
            SymFunction {
                label: SymLabel {
                    k: b.k,
                    j: b.j,
                    m: b.m,
                    two_nu: b.two_nu,
                    omega_index: idx,
                },
                omega,
                components: b.tags.iter().copied().zip(v.iter().copied()).collect(),
                polynomial: poly.pruned(1e-15),
            }
        })
        .collect())
}

/// All non-empty `(J, M, 2ν)` blocks of degree `K`, in ascending order.
pub fn block_labels(k: i32) -> Vec<(i32, i32, i32)> {
    let mut v = Vec::new();
    for j in 0..=k.max(-1) {
        for m in -j..=j {
            let mut t = -k;
            while t <= k {
                v.push((j, m, t));
                t += 2;
            }
        }
    }
    v
}

/// Diagonalizes every block of degree `K` in parallel and returns the
/// eigenfunctions in block order.
pub fn block_sweep(k: i32) -> Result<Vec<SymFunction>, TransformError> {
    let results: Vec<Result<Vec<SymFunction>, TransformError>> = block_labels(k)
        .into_par_iter()
        .map(|(j, m, t)| match omega_block(k, j, m, t) {
            Ok(b) => diagonalize_block(&b),
            Err(TransformError::EmptyBlock { .. }) => Ok(Vec::new()),
            Err(e) => Err(e),
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}
