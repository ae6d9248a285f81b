//! Classical mechanics of the rotating and deforming triangle in the
//! coordinates `q = (a, λ, φ1, θ, φ2, ρ)`.
//!
//! The kinetic energy is `T = ½ q̇ᵀ M(q) q̇` with `M = ρ² X(a, φ1, θ) ⊕ 1`,
//!
//! ```text
//! 2T/ρ² = ¼ȧ² + ¼λ̇² + φ̇1² + ½θ̇² + ½(1 + cos²θ)φ̇2² + 2cosθ φ̇1φ̇2
//!       + sin a (½ sin2φ1 sin²θ φ̇2² + cos2φ1 sinθ φ̇2θ̇ - ½ sin2φ1 θ̇²)
//!       + cos a (φ̇1 + cosθ φ̇2) λ̇          (+ ρ̇²/ρ²)
//! ```
//!
//! and the Euler–Lagrange system `M q̈ = ½ ∂(q̇ᵀMq̇) - Ṁ q̇ - ∂U` is solved
//! for the accelerations at every right-hand-side evaluation. Reduced
//! models cover planar motion (`θ̇ = φ̇2 = 0`), the deforming triangle
//! (`p_φ1 = 0` in addition) and the equilateral Newtonian (Kepler) case.
//!
//! Integration uses the Dormand–Prince 5(4) pair with PI step control.
//! Steps are clipped to land on the requested sample times. Integration
//! halts with a typed event on approach to a chart singularity.

use crate::kinematics::{
    add, cross, dot, mat_mul, reconstruct, rot_x_pi, rot_y, rot_z, FrameOrientation, Mat3,
    ShapeState, Vec3,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

/// Distance from a chart singularity (`sin θ`, `sin a`, `cos a`) at which
/// integration stops.
pub const SINGULAR_EPS: f64 = 1e-8;
/// Smallest hyperradius accepted by the Newtonian models.
pub const RHO_MIN: f64 = 1e-8;
/// Tolerance for the constraint checks of the reduced models.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("singular configuration: {0}")]
    Singular(&'static str),
    #[error("constraint violated: {0}")]
    Constraint(&'static str),
    #[error("hyperradius {0} too small")]
    Collapse(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid state: {0}")]
    InvalidState(&'static str),
}

/// Generalized coordinates and their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynState {
    pub a: f64,
    pub lambda: f64,
    pub phi1: f64,
    pub theta: f64,
    pub phi2: f64,
    pub rho: f64,
    pub da: f64,
    pub dlambda: f64,
    pub dphi1: f64,
    pub dtheta: f64,
    pub dphi2: f64,
    pub drho: f64,
}

impl DynState {
    pub fn coords(&self) -> [f64; 6] {
        [
            self.a,
            self.lambda,
            self.phi1,
            self.theta,
            self.phi2,
            self.rho,
        ]
    }

    pub fn velocities(&self) -> [f64; 6] {
        [
            self.da,
            self.dlambda,
            self.dphi1,
            self.dtheta,
            self.dphi2,
            self.drho,
        ]
    }

    pub fn to_array(&self) -> [f64; 12] {
        let (q, v) = (self.coords(), self.velocities());
        std::array::from_fn(|i| if i < 6 { q[i] } else { v[i - 6] })
    }

    pub fn from_array(y: &[f64]) -> Self {
        Self {
            a: y[0],
            lambda: y[1],
            phi1: y[2],
            theta: y[3],
            phi2: y[4],
            rho: y[5],
            da: y[6],
            dlambda: y[7],
            dphi1: y[8],
            dtheta: y[9],
            dphi2: y[10],
            drho: y[11],
        }
    }

    pub fn shape(&self) -> ShapeState {
        ShapeState {
            rho: self.rho,
            lambda: self.lambda,
            a: self.a,
        }
    }

    pub fn frame(&self) -> FrameOrientation {
        FrameOrientation {
            phi1: self.phi1,
            theta: self.theta,
            phi2: self.phi2,
        }
    }

    /// Same configuration with reversed velocities.
    pub fn reversed(&self) -> Self {
        let mut y = self.to_array();
        for v in &mut y[6..] {
            *v = -*v;
        }
        Self::from_array(&y)
    }
}

/// Interaction potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Free,
    /// `U = ½[(ξ-ξ0)² + (η-η0)²] = ½(ρ² + ρ0² - 2ρρ0 sin(a/2) cos(λ/2))`,
    /// with the equilateral equilibrium `(ξ0, η0)` carried by the frame.
    Harmonic {
        rho0: f64,
    },
    /// `U = -Σ 1/r_ij` with unit coupling, `-3/ρ` on equilateral shapes.
    Newton,
}

/// Which equations are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// All six coordinates.
    Full,
    /// `θ̇ = φ̇2 = 0`: motion in a fixed plane.
    Planar,
    /// Planar with `p_φ1 = 0`: `φ̇1 = -½ cos a λ̇`.
    Deforming,
    /// Equilateral (`a = 0`) Newtonian case, reduced to `(ρ, ψ)` with
    /// `ψ̇ = ½λ̇ + φ̇1`.
    Kepler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub potential: PotentialSpec,
    pub reduction: Reduction,
}

impl Model {
    pub fn free() -> Self {
        Self {
            potential: PotentialSpec::Free,
            reduction: Reduction::Full,
        }
    }

    pub fn planar() -> Self {
        Self {
            potential: PotentialSpec::Free,
            reduction: Reduction::Planar,
        }
    }

    pub fn deforming() -> Self {
        Self {
            potential: PotentialSpec::Free,
            reduction: Reduction::Deforming,
        }
    }

    pub fn harmonic(rho0: f64) -> Self {
        Self {
            potential: PotentialSpec::Harmonic { rho0 },
            reduction: Reduction::Full,
        }
    }

    pub fn kepler() -> Self {
        Self {
            potential: PotentialSpec::Newton,
            reduction: Reduction::Kepler,
        }
    }

    /// Coordinate chart used by the model, for reports.
    pub fn chart(&self) -> &'static str {
        match (self.potential, self.reduction) {
            (PotentialSpec::Harmonic { .. }, _) => "equilibrium at a=pi, lambda=0",
            (_, Reduction::Kepler) => "equilateral sector a=0",
            _ => "generic (a, lambda) chart",
        }
    }
}

type Mat6 = [[f64; 6]; 6];

/// `X(a, φ1, θ)` with `M = ρ² X` on the angular block; indices
/// `(a, λ, φ1, θ, φ2)`.
fn metric_x(a: f64, phi1: f64, theta: f64) -> [[f64; 5]; 5] {
    let (sa, ca) = a.sin_cos();
    let (s2, c2) = (2.0 * phi1).sin_cos();
    let (st, ct) = theta.sin_cos();
    let mut x = [[0.0; 5]; 5];
    x[0][0] = 0.25;
    x[1][1] = 0.25;
    x[2][2] = 1.0;
    x[3][3] = 0.5 - 0.5 * sa * s2;
    x[4][4] = 0.5 + 0.5 * ct * ct + 0.5 * sa * s2 * st * st;
    x[2][4] = ct;
    x[4][3] = 0.5 * sa * c2 * st;
    x[1][2] = 0.5 * ca;
    x[1][4] = 0.5 * ca * ct;
    symmetrize5(&mut x);
    x
}

/// Partial derivatives of `X` with respect to `a`, `φ1` and `θ`.
fn metric_x_partials(a: f64, phi1: f64, theta: f64) -> [[[f64; 5]; 5]; 3] {
    let (sa, ca) = a.sin_cos();
    let (s2, c2) = (2.0 * phi1).sin_cos();
    let (st, ct) = theta.sin_cos();
    let mut da = [[0.0; 5]; 5];
    da[3][3] = -0.5 * ca * s2;
    da[4][4] = 0.5 * ca * s2 * st * st;
    da[4][3] = 0.5 * ca * c2 * st;
    da[1][2] = -0.5 * sa;
    da[1][4] = -0.5 * sa * ct;
    let mut dp = [[0.0; 5]; 5];
    dp[3][3] = -sa * c2;
    dp[4][4] = sa * c2 * st * st;
    dp[4][3] = -sa * s2 * st;
    let mut dt = [[0.0; 5]; 5];
    dt[4][4] = -ct * st + sa * s2 * st * ct;
    dt[2][4] = -st;
    dt[4][3] = 0.5 * sa * c2 * ct;
    dt[1][4] = -0.5 * ca * st;
    for m in [&mut da, &mut dp, &mut dt] {
        symmetrize5(m);
    }
    [da, dp, dt]
}

/// Copies the entries set below or above the diagonal to the mirror position.
#[allow(clippy::needless_range_loop)]
fn symmetrize5(x: &mut [[f64; 5]; 5]) {
    for i in 0..5 {
        for j in 0..i {
            let v = if x[i][j] != 0.0 { x[i][j] } else { x[j][i] };
            x[i][j] = v;
            x[j][i] = v;
        }
    }
}

/// Mass matrix `M(q)`.
pub fn mass_matrix(s: &DynState) -> Mat6 {
    let x = metric_x(s.a, s.phi1, s.theta);
    let r2 = s.rho * s.rho;
    let mut m = [[0.0; 6]; 6];
    for i in 0..5 {
        for j in 0..5 {
            m[i][j] = r2 * x[i][j];
        }
    }
    m[5][5] = 1.0;
    m
}

/// `∂M/∂q_k` for all six coordinates.
fn mass_partials(s: &DynState) -> [Mat6; 6] {
    let x = metric_x(s.a, s.phi1, s.theta);
    let [xa, xp, xt] = metric_x_partials(s.a, s.phi1, s.theta);
    let r2 = s.rho * s.rho;
    let lift = |src: &[[f64; 5]; 5], f: f64| {
        let mut m = [[0.0; 6]; 6];
        for i in 0..5 {
            for j in 0..5 {
                m[i][j] = f * src[i][j];
            }
        }
        m
    };
    let zero = [[0.0; 6]; 6];
    [
        lift(&xa, r2),
        zero,
        lift(&xp, r2),
        lift(&xt, r2),
        zero,
        lift(&x, 2.0 * s.rho),
    ]
}

/// Kinetic energy from the Euler-angle form of the mass matrix.
pub fn kinetic_energy(s: &DynState) -> f64 {
    let m = mass_matrix(s);
    let v = s.velocities();
    0.5 * (0..6)
        .map(|i| (0..6).map(|j| v[i] * m[i][j] * v[j]).sum::<f64>())
        .sum::<f64>()
}

/// Angular velocity components on the moving axes,
/// `Ω̇1 = -cos φ1 sin θ φ̇2 + sin φ1 θ̇`, `Ω̇2 = sin φ1 sin θ φ̇2 + cos φ1 θ̇`,
/// `Ω̇3 = -φ̇1 - cos θ φ̇2`.
pub fn body_rates(s: &DynState) -> [f64; 3] {
    let (sp, cp) = s.phi1.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    [
        -cp * st * s.dphi2 + sp * s.dtheta,
        sp * st * s.dphi2 + cp * s.dtheta,
        -s.dphi1 - ct * s.dphi2,
    ]
}

/// Kinetic energy from the moving-axis rates,
/// `T = ½ρ²[¼ȧ² + ¼λ̇² + ½Ω̇1² + ½Ω̇2² + Ω̇3² - sin a Ω̇1Ω̇2 - cos a Ω̇3λ̇] + ½ρ̇²`.
pub fn kinetic_energy_body(s: &DynState) -> f64 {
    let [w1, w2, w3] = body_rates(s);
    let (sa, ca) = s.a.sin_cos();
    let ang =
        0.25 * s.da * s.da + 0.25 * s.dlambda * s.dlambda + 0.5 * w1 * w1 + 0.5 * w2 * w2 + w3 * w3
            - sa * w1 * w2
            - ca * w3 * s.dlambda;
    0.5 * s.rho * s.rho * ang + 0.5 * s.drho * s.drho
}

/// Potential energy and its gradient with respect to `(a, λ, ρ)`.
pub fn potential(s: &DynState, p: &PotentialSpec) -> Result<(f64, [f64; 3]), DynamicsError> {
    match *p {
        PotentialSpec::Free => Ok((0.0, [0.0; 3])),
        PotentialSpec::Harmonic { rho0 } => {
            let (sh, ch) = (s.a / 2.0).sin_cos();
            let (sl, cl) = (s.lambda / 2.0).sin_cos();
            let u = 0.5 * (s.rho * s.rho + rho0 * rho0 - 2.0 * s.rho * rho0 * sh * cl);
            let grad = [
                -0.5 * s.rho * rho0 * ch * cl,
                0.5 * s.rho * rho0 * sh * sl,
                s.rho - rho0 * sh * cl,
            ];
            Ok((u, grad))
        }
        PotentialSpec::Newton => {
            if s.rho < RHO_MIN {
                return Err(DynamicsError::Collapse(s.rho));
            }
            let (sa, ca) = s.a.sin_cos();
            let mut u = 0.0;
            let mut grad = [0.0; 3];
            // r_ij² = ρ² (1 + sin a sin(λ + δ)), δ = π (12), -π/3 (13), π/3 (23)
            for delta in [PI, -PI / 3.0, PI / 3.0] {
                let (sl, cl) = (s.lambda + delta).sin_cos();
                let g = 1.0 + sa * sl;
                if g < RHO_MIN * RHO_MIN {
                    return Err(DynamicsError::Collapse(s.rho * g.max(0.0).sqrt()));
                }
                let gi = g.powf(-0.5);
                let gi3 = gi * gi * gi;
                u -= gi / s.rho;
                grad[0] += 0.5 * gi3 * ca * sl / s.rho;
                grad[1] += 0.5 * gi3 * sa * cl / s.rho;
                grad[2] += gi / (s.rho * s.rho);
            }
            Ok((u, grad))
        }
    }
}

fn check_full_chart(s: &DynState) -> Result<(), DynamicsError> {
    if s.theta.sin().abs() < SINGULAR_EPS {
        return Err(DynamicsError::Singular("sin theta = 0"));
    }
    if s.a.cos().abs() < SINGULAR_EPS {
        return Err(DynamicsError::Singular("cos a = 0 (collinear)"));
    }
    if s.rho.is_nan() || s.rho <= 0.0 {
        return Err(DynamicsError::InvalidState("rho must be positive"));
    }
    Ok(())
}

/// Solves the Euler–Lagrange system on the coordinate subset `idx`, the
/// remaining velocities being zero. A singular reduced mass matrix (as at
/// `sin a = 0`) is handled by the minimum-norm least-squares solution.
fn solve_subset(s: &DynState, p: &PotentialSpec, idx: &[usize]) -> Result<[f64; 6], DynamicsError> {
    let m = mass_matrix(s);
    let dm = mass_partials(s);
    let v = s.velocities();
    let (_, grad) = potential(s, p)?;
    let du = [grad[0], grad[1], 0.0, 0.0, 0.0, grad[2]];
    let quad = |mat: &Mat6| -> f64 {
        (0..6)
            .map(|i| (0..6).map(|j| v[i] * mat[i][j] * v[j]).sum::<f64>())
            .sum()
    };
    let mut mdot = [[0.0; 6]; 6];
    for (k, dmk) in dm.iter().enumerate() {
        if v[k] != 0.0 {
            for i in 0..6 {
                for j in 0..6 {
                    mdot[i][j] += dmk[i][j] * v[k];
                }
            }
        }
    }
    let n = idx.len();
    let mr = DMatrix::from_fn(n, n, |r, c| m[idx[r]][idx[c]]);
    let rhs = DVector::from_fn(n, |r, _| {
        let i = idx[r];
        0.5 * quad(&dm[i]) - (0..6).map(|j| mdot[i][j] * v[j]).sum::<f64>() - du[i]
    });
    let sol = match mr.clone().cholesky() {
        Some(ch) if mr.symmetric_eigenvalues().min() > 1e-13 * mr.norm() => ch.solve(&rhs),
        _ => mr
            .svd(true, true)
            .solve(&rhs, 1e-12 * m[5][5].max(s.rho * s.rho))
            .map_err(|_| DynamicsError::Singular("mass matrix"))?,
    };
    let mut acc = [0.0; 6];
    for (r, &i) in idx.iter().enumerate() {
        acc[i] = sol[r];
    }
    Ok(acc)
}

/// Accelerations of the full six-coordinate free system.
pub fn eom_free(s: &DynState) -> Result<[f64; 6], DynamicsError> {
    eom_potential(s, &PotentialSpec::Free)
}

/// Accelerations of the full system under a potential.
pub fn eom_potential(s: &DynState, p: &PotentialSpec) -> Result<[f64; 6], DynamicsError> {
    check_full_chart(s)?;
    solve_subset(s, p, &[0, 1, 2, 3, 4, 5])
}

/// Accelerations of planar motion, `θ̇ = φ̇2 = 0`; `θ` and `φ2` stay fixed.
pub fn eom_planar(s: &DynState, p: &PotentialSpec) -> Result<[f64; 6], DynamicsError> {
    if s.dtheta.abs() > CONSTRAINT_TOL || s.dphi2.abs() > CONSTRAINT_TOL {
        return Err(DynamicsError::Constraint(
            "planar motion needs dtheta = dphi2 = 0",
        ));
    }
    if s.rho.is_nan() || s.rho <= 0.0 {
        return Err(DynamicsError::InvalidState("rho must be positive"));
    }
    solve_subset(s, p, &[0, 1, 2, 5])
}

/// `p_φ1 = ½ρ²(2φ̇1 + 2cos θ φ̇2 + cos a λ̇)`.
pub fn p_phi1(s: &DynState) -> f64 {
    0.5 * s.rho * s.rho * (2.0 * s.dphi1 + 2.0 * s.theta.cos() * s.dphi2 + s.a.cos() * s.dlambda)
}

/// `p_λ = ¼ρ² sin²a λ̇` of the deforming triangle.
pub fn p_lambda_deforming(s: &DynState) -> f64 {
    0.25 * s.rho * s.rho * s.a.sin().powi(2) * s.dlambda
}

/// Accelerations of the deforming triangle: planar motion with `p_φ1 = 0`,
/// from the reduced Lagrangian `½ρ²(¼ȧ² + ¼ sin²a λ̇²) + ½ρ̇² - U`.
pub fn eom_deforming(s: &DynState, p: &PotentialSpec) -> Result<[f64; 6], DynamicsError> {
    if s.dtheta.abs() > CONSTRAINT_TOL || s.dphi2.abs() > CONSTRAINT_TOL {
        return Err(DynamicsError::Constraint(
            "deforming motion needs dtheta = dphi2 = 0",
        ));
    }
    let scale = 1.0 + s.rho * s.rho * (s.dlambda.abs() + s.dphi1.abs());
    if p_phi1(s).abs() > CONSTRAINT_TOL * scale {
        return Err(DynamicsError::Constraint(
            "deforming motion needs p_phi1 = 0",
        ));
    }
    let (sa, ca) = s.a.sin_cos();
    if sa.abs() < SINGULAR_EPS {
        return Err(DynamicsError::Singular("sin a = 0"));
    }
    if s.rho.is_nan() || s.rho <= 0.0 {
        return Err(DynamicsError::InvalidState("rho must be positive"));
    }
    let (_, [ua, ul, ur]) = potential(s, p)?;
    let (r, dr, da, dl) = (s.rho, s.drho, s.da, s.dlambda);
    let acc_a = sa * ca * dl * dl - 2.0 * dr * da / r - 4.0 * ua / (r * r);
    let acc_l = -2.0 * dr * dl / r - 2.0 * ca / sa * da * dl - 4.0 * ul / (r * r * sa * sa);
    let acc_r = r * (0.25 * da * da + 0.25 * sa * sa * dl * dl) - ur;
    let acc_p1 = 0.5 * sa * da * dl - 0.5 * ca * acc_l;
    Ok([acc_a, acc_l, acc_p1, 0.0, 0.0, acc_r])
}

/// `ψ̇ = ½λ̇ + φ̇1`.
pub fn kepler_psi_dot(s: &DynState) -> f64 {
    0.5 * s.dlambda + s.dphi1
}

/// Equilateral Newtonian reduction: `ρ̈ = ρψ̇² - 3/ρ²`, `ψ̈ = -2ρ̇ψ̇/ρ`. The
/// angular acceleration is carried by `φ1`.
pub fn eom_kepler(s: &DynState) -> Result<[f64; 6], DynamicsError> {
    if s.a.abs() > CONSTRAINT_TOL || s.da.abs() > CONSTRAINT_TOL {
        return Err(DynamicsError::Constraint(
            "Kepler reduction needs a = 0 and da = 0",
        ));
    }
    if s.dtheta.abs() > CONSTRAINT_TOL || s.dphi2.abs() > CONSTRAINT_TOL {
        return Err(DynamicsError::Constraint(
            "Kepler reduction needs dtheta = dphi2 = 0",
        ));
    }
    if s.rho < RHO_MIN {
        return Err(DynamicsError::Collapse(s.rho));
    }
    let w = kepler_psi_dot(s);
    let acc_r = s.rho * w * w - 3.0 / (s.rho * s.rho);
    let acc_psi = -2.0 * s.drho * w / s.rho;
    Ok([0.0, 0.0, acc_psi, 0.0, 0.0, acc_r])
}

/// Accelerations of a model.
pub fn accelerations(s: &DynState, m: &Model) -> Result<[f64; 6], DynamicsError> {
    match m.reduction {
        Reduction::Full => eom_potential(s, &m.potential),
        Reduction::Planar => eom_planar(s, &m.potential),
        Reduction::Deforming => eom_deforming(s, &m.potential),
        Reduction::Kepler => eom_kepler(s),
    }
}

fn scaled_mat(m: &Mat3, f: f64) -> Mat3 {
    m.map(|row| row.map(|x| x * f))
}

fn rot_z_prime(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]]
}

fn rot_y_prime(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]]
}

fn l_plus_of(r: &Mat3) -> [Complex64; 3] {
    [0, 1, 2].map(|k| Complex64::new(r[k][0], r[k][1]) * FRAC_1_SQRT_2)
}

/// `∂z/∂q` for `q = (a, λ, φ1, θ, φ2, ρ)`.
pub fn z_jacobian(s: &DynState) -> [[Complex64; 3]; 6] {
    let f = s.frame();
    let z = reconstruct(&s.shape(), &f).z;
    let e = Complex64::from_polar(s.rho, -s.lambda / 2.0);
    let (c, sn) = ((s.a / 2.0).cos(), (s.a / 2.0).sin());
    let i = Complex64::i();
    let lp = f.l_plus();
    let lm = f.l_minus();
    let d_a = [0, 1, 2].map(|k| e * (lp[k] * (-0.5 * sn) + i * lm[k] * (0.5 * c)));
    let d_l = z.map(|x| x * Complex64::new(0.0, -0.5));
    let d_r = if s.rho != 0.0 {
        z.map(|x| x / s.rho)
    } else {
        [0, 1, 2].map(|k| lp[k] * c + i * lm[k] * sn)
    };
    let xr = rot_x_pi();
    let (rz2, ry, rz1) = (rot_z(s.phi2), rot_y(-s.theta), rot_z(s.phi1));
    let frame_d = |m: Mat3| {
        let lpd = l_plus_of(&m);
        [0, 1, 2].map(|k| e * (lpd[k] * c + i * lpd[k].conj() * sn))
    };
    let dr1 = mat_mul(&xr, &mat_mul(&rz2, &mat_mul(&ry, &rot_z_prime(s.phi1))));
    let drt = mat_mul(
        &xr,
        &mat_mul(
            &rz2,
            &mat_mul(&scaled_mat(&rot_y_prime(-s.theta), -1.0), &rz1),
        ),
    );
    let dr2 = mat_mul(&xr, &mat_mul(&rot_z_prime(s.phi2), &mat_mul(&ry, &rz1)));
    [d_a, d_l, frame_d(dr1), frame_d(drt), frame_d(dr2), d_r]
}

/// `(z, ż)` of a state.
pub fn z_and_velocity(s: &DynState) -> ([Complex64; 3], [Complex64; 3]) {
    let z = reconstruct(&s.shape(), &s.frame()).z;
    let jac = z_jacobian(s);
    let v = s.velocities();
    let zd = [0, 1, 2].map(|k| (0..6).map(|q| jac[q][k] * v[q]).sum());
    (z, zd)
}

/// Conserved quantities evaluated from the Cartesian Jacobi vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    /// `T + U`.
    pub energy: f64,
    /// `|ż|²/2`, the kinetic energy from the Cartesian velocities.
    pub kinetic_cartesian: f64,
    /// `L = ξ × ξ̇ + η × η̇`.
    pub angular_momentum: Vec3,
    /// `Ω = 2[(ξ·L)(η̇·L) - (η·L)(ξ̇·L)]`.
    pub omega: f64,
}

impl Observables {
    pub fn angular_momentum_norm(&self) -> f64 {
        dot(self.angular_momentum, self.angular_momentum).sqrt()
    }
}

/// Classical cubic invariant `Ω = 2[(ξ·L)(η̇·L) - (η·L)(ξ̇·L)]`.
pub fn classical_omega(xi: Vec3, eta: Vec3, dxi: Vec3, deta: Vec3) -> f64 {
    let l = add(cross(xi, dxi), cross(eta, deta));
    2.0 * (dot(xi, l) * dot(deta, l) - dot(eta, l) * dot(dxi, l))
}

pub fn observables(s: &DynState, p: &PotentialSpec) -> Result<Observables, DynamicsError> {
    let (z, zd) = z_and_velocity(s);
    let xi = z.map(|c| c.re);
    let eta = z.map(|c| c.im);
    let dxi = zd.map(|c| c.re);
    let deta = zd.map(|c| c.im);
    let (u, _) = potential(s, p)?;
    let kin_c = 0.5 * zd.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok(Observables {
        energy: kinetic_energy(s) + u,
        kinetic_cartesian: kin_c,
        angular_momentum: add(cross(xi, dxi), cross(eta, deta)),
        omega: classical_omega(xi, eta, dxi, deta),
    })
}

/// Reason an integration stopped before `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DynEvent {
    /// A chart coordinate came within [`SINGULAR_EPS`] of a singular value.
    Singular { t: f64, reason: String },
    /// The step size fell below the resolvable limit.
    StepUnderflow { t: f64 },
    /// The right-hand side failed (collapse or constraint loss).
    Failure { t: f64, reason: String },
}

/// Accepted and rejected step counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Samples of a solution with its termination status.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub samples: Vec<(f64, Vec<f64>)>,
    pub event: Option<DynEvent>,
    pub stats: StepStats,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand–Prince 5(4) integration of `y' = f(t, y)` from `t0` to the last
/// of `sample_times` (ascending, all `>= t0`). Mixed absolute and relative
/// error `tol` per step, PI step-size control, FSAL. `event` is checked
/// after every accepted step; a `Some` return stops the integration.
pub fn dopri5<F, G>(
    y0: &[f64],
    t0: f64,
    sample_times: &[f64],
    tol: f64,
    mut f: F,
    mut event: G,
) -> Result<OdeSolution, DynamicsError>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>, DynamicsError>,
    G: FnMut(f64, &[f64]) -> Option<String>,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(DynamicsError::InvalidTolerance(tol));
    }
    let n = y0.len();
    let mut stats = StepStats::default();
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut next = 0;
    while next < sample_times.len() && sample_times[next] <= t0 {
        samples.push((sample_times[next], y.clone()));
        next += 1;
    }
    let Some(&t_end) = sample_times.last() else {
        return Ok(OdeSolution {
            samples,
            event: None,
            stats,
        });
    };
    if let Some(reason) = event(t, &y) {
        return Ok(OdeSolution {
            samples,
            event: Some(DynEvent::Singular { t, reason }),
            stats,
        });
    }
    let mut k1 = match f(t, &y) {
        Ok(k) => k,
        Err(e) => {
            return Ok(OdeSolution {
                samples,
                event: Some(DynEvent::Failure {
                    t,
                    reason: e.to_string(),
                }),
                stats,
            })
        }
    };
    stats.evaluations += 1;
    let span = t_end - t0;
    let mut h = (span * 1e-3)
        .min(tol.powf(0.2) * 0.1)
        .max(1e-12 * span.max(1.0));
    let mut err_prev = 1e-4f64;
    let mut rejected_last = false;
    let mut k = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    while next < sample_times.len() {
        let target = sample_times[next];
        let mut step = h;
        let mut lands = false;
        if t + step >= target - 1e-14 * target.abs().max(1.0) {
            step = target - t;
            lands = true;
        }
        if step.abs() < 1e-14 * t.abs().max(1.0) && !lands {
            return Ok(OdeSolution {
                samples,
                event: Some(DynEvent::StepUnderflow { t }),
                stats,
            });
        }
        k[0].clone_from(&k1);
        let mut failed = None;
        for s in 1..7 {
            for i in 0..n {
                ytmp[i] = y[i] + step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            match f(t + C[s] * step, &ytmp) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
            stats.evaluations += 1;
        }
        if let Some(e) = failed {
            // A stage left the domain: retry with a smaller step.
            stats.rejected += 1;
            h = step * 0.25;
            rejected_last = true;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Ok(OdeSolution {
                    samples,
                    event: Some(DynEvent::Failure {
                        t,
                        reason: e.to_string(),
                    }),
                    stats,
                });
            }
            continue;
        }
        // ytmp now holds the fifth-order solution (stage 7 input).
        let mut acc = 0.0;
        for i in 0..n {
            let e: f64 = step * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = tol + tol * y[i].abs().max(ytmp[i].abs());
            acc += (e / sc).powi(2);
        }
        let err = (acc / n as f64).sqrt();
        if err <= 1.0 {
            stats.accepted += 1;
            t = if lands { target } else { t + step };
            y.clone_from(&ytmp);
            k1.clone_from(&k[6]);
            let mut fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            fac = fac.clamp(0.2, 5.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_prev = err.max(1e-4);
            rejected_last = false;
            if !lands {
                h = step * fac;
            } else {
                h = h.max(step * fac);
            }
            while next < sample_times.len() && sample_times[next] <= t {
                samples.push((sample_times[next], y.clone()));
                next += 1;
            }
            if let Some(reason) = event(t, &y) {
                return Ok(OdeSolution {
                    samples,
                    event: Some(DynEvent::Singular { t, reason }),
                    stats,
                });
            }
        } else {
            stats.rejected += 1;
            rejected_last = true;
            h = step * (0.9 * err.powf(-0.2)).max(0.2);
        }
        if stats.accepted + stats.rejected > 50_000_000 {
            return Ok(OdeSolution {
                samples,
                event: Some(DynEvent::StepUnderflow { t }),
                stats,
            });
        }
    }
    Ok(OdeSolution {
        samples,
        event: None,
        stats,
    })
}

/// Sampled trajectory of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model: Model,
    pub samples: Vec<(f64, DynState)>,
    pub event: Option<DynEvent>,
    pub stats: StepStats,
}

fn singular_reason(s: &DynState, m: &Model) -> Option<String> {
    let check = |v: f64, what: &str| {
        (v.abs() < SINGULAR_EPS).then(|| format!("|{what}| < {SINGULAR_EPS:e}"))
    };
    match m.reduction {
        Reduction::Full => check(s.theta.sin(), "sin theta")
            .or_else(|| check(s.a.cos(), "cos a"))
            .or_else(|| check(s.a.sin(), "sin a")),
        Reduction::Planar | Reduction::Deforming => check(s.a.sin(), "sin a"),
        Reduction::Kepler => (s.rho < RHO_MIN).then(|| format!("rho < {RHO_MIN:e}")),
    }
}

/// Integrates a model and samples it at `times` (ascending, `>= 0`, the
/// initial state being at `t = 0`).
pub fn integrate_at(
    s0: &DynState,
    m: &Model,
    times: &[f64],
    tol: f64,
) -> Result<Trajectory, DynamicsError> {
    accelerations(s0, m)?;
    let model = *m;
    let rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>, DynamicsError> {
        let s = DynState::from_array(y);
        let acc = accelerations(&s, &model)?;
        let mut out = y[6..].to_vec();
        out.extend_from_slice(&acc);
        Ok(out)
    };
    let ev = |_t: f64, y: &[f64]| singular_reason(&DynState::from_array(y), &model);
    let sol = dopri5(&s0.to_array(), 0.0, times, tol, rhs, ev)?;
    Ok(Trajectory {
        model: *m,
        samples: sol
            .samples
            .into_iter()
            .map(|(t, y)| (t, DynState::from_array(&y)))
            .collect(),
        event: sol.event,
        stats: sol.stats,
    })
}

/// Integrates to `t_end` with `n_samples + 1` evenly spaced samples.
pub fn integrate(
    s0: &DynState,
    m: &Model,
    t_end: f64,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory, DynamicsError> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::InvalidState(
            "t_end must be finite and non-negative",
        ));
    }
    let n = n_samples.max(1);
    let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    integrate_at(s0, m, &times, tol)
}

/// Least-squares fit of `1/r = α + β cos χ + γ sin χ` (a conic with one
/// focus at the origin) to polar points `(r, χ)`. Returns the coefficients
/// and the largest radial residual, or `None` with fewer than three points.
pub fn focal_conic_fit(points: &[(f64, f64)]) -> Option<([f64; 3], f64)> {
    if points.len() < 3 {
        return None;
    }
    let a = DMatrix::from_fn(points.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => points[i].1.cos(),
        _ => points[i].1.sin(),
    });
    let b = DVector::from_fn(points.len(), |i, _| 1.0 / points[i].0);
    let x = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let c = [x[0], x[1], x[2]];
    let resid = points
        .iter()
        .map(|&(r, chi)| (1.0 / (c[0] + c[1] * chi.cos() + c[2] * chi.sin()) - r).abs())
        .fold(0.0, f64::max);
    Some((c, resid))
}
