//! Coordinates of the three-body triangle.
//!
//! Particle positions in the centre-of-mass frame map to the Jacobi pair
//! `ξ = -√(3/2)(x1+x2)`, `η = (x1-x2)/√2` and to the complex vector
//! `z = ξ + iη`. The sphere coordinates are the scale `ρ`, the shape angles
//! `(λ, a)` and the Euler angles `(φ1, θ, φ2)` of the moving frame
//! `(l1, l2, l3)`:
//!
//! ```text
//! z = ρ e^{-iλ/2} (cos(a/2) l₊ + i sin(a/2) l₋),   l± = (l1 ± i l2)/√2
//! R = [l1 l2 l3] = Rx(π) Rz(φ2) Ry(-θ) Rz(φ1)
//! ```
//!
//! The pair `(a, l1, l2)` and `(π-a, l2, l1)` describe the same `z`, so
//! [`parametrize`] returns `a ∈ [0, π/2]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("centre of mass not at the origin (|x1+x2+x3| = {0:e})")]
    CenterOfMass(f64),
    #[error("hyperradius must be positive, got {0}")]
    ZeroRadius(f64),
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
}

/// Positions of the three equal-mass particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfig {
    pub x1: Vec3,
    pub x2: Vec3,
    pub x3: Vec3,
}

/// Jacobi vectors of the equal-mass system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiPair {
    pub xi: Vec3,
    pub eta: Vec3,
}

/// Complex vector `z = ξ + iη`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexVec {
    pub z: [Complex64; 3],
}

/// Scale and shape of the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeState {
    pub rho: f64,
    pub lambda: f64,
    pub a: f64,
}

/// Euler angles of the moving frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameOrientation {
    pub phi1: f64,
    pub theta: f64,
    pub phi2: f64,
}

/// Particle transpositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Permutation {
    P12,
    P13,
    P23,
}

pub fn add(u: Vec3, v: Vec3) -> Vec3 {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

pub fn sub(u: Vec3, v: Vec3) -> Vec3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

pub fn scale(s: f64, v: Vec3) -> Vec3 {
    [s * v[0], s * v[1], s * v[2]]
}

pub fn dot(u: Vec3, v: Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

pub fn cross(u: Vec3, v: Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub fn norm(v: Vec3) -> f64 {
    dot(v, v).sqrt()
}

fn cdot(u: &[Complex64; 3], v: &[Complex64; 3]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Spherical components `(v_{-1}, v_0, v_{+1})` with
/// `v_{±1} = ∓(v_x ± i v_y)/√2`, `v_0 = v_z`.
pub fn spherical_components(v: [Complex64; 3]) -> [Complex64; 3] {
    let i = Complex64::i();
    [
        (v[0] - i * v[1]) * FRAC_1_SQRT_2,
        v[2],
        -(v[0] + i * v[1]) * FRAC_1_SQRT_2,
    ]
}

impl ParticleConfig {
    pub fn center_of_mass_residual(&self) -> f64 {
        norm(add(add(self.x1, self.x2), self.x3))
    }

    pub fn swapped(&self, p: Permutation) -> Self {
        let (x1, x2, x3) = (self.x1, self.x2, self.x3);
        match p {
            Permutation::P12 => Self { x1: x2, x2: x1, x3 },
            Permutation::P13 => Self { x1: x3, x2, x3: x1 },
            Permutation::P23 => Self { x1, x2: x3, x3: x2 },
        }
    }

    pub fn rho_sq(&self) -> f64 {
        dot(self.x1, self.x1) + dot(self.x2, self.x2) + dot(self.x3, self.x3)
    }
}

/// Jacobi coordinates of a centre-of-mass configuration.
pub fn to_jacobi(cfg: &ParticleConfig) -> Result<JacobiPair, KinematicsError> {
    let scale_ref = cfg.rho_sq().sqrt().max(1.0);
    let res = cfg.center_of_mass_residual();
    if res > 1e-12 * scale_ref {
        return Err(KinematicsError::CenterOfMass(res));
    }
    let s = add(cfg.x1, cfg.x2);
    let d = sub(cfg.x1, cfg.x2);
    Ok(JacobiPair {
        xi: scale(-(1.5f64).sqrt(), s),
        eta: scale(FRAC_1_SQRT_2, d),
    })
}

/// Particle positions from the Jacobi pair:
/// `x1 = -ξ/√6 + η/√2`, `x2 = -ξ/√6 - η/√2`, `x3 = √(2/3) ξ`.
pub fn particle_positions(j: &JacobiPair) -> ParticleConfig {
    let c = 1.0 / 6f64.sqrt();
    ParticleConfig {
        x1: add(scale(-c, j.xi), scale(FRAC_1_SQRT_2, j.eta)),
        x2: sub(scale(-c, j.xi), scale(FRAC_1_SQRT_2, j.eta)),
        x3: scale((2.0f64 / 3.0).sqrt(), j.xi),
    }
}

impl JacobiPair {
    pub fn rho_sq(&self) -> f64 {
        dot(self.xi, self.xi) + dot(self.eta, self.eta)
    }

    /// Angular momentum `ξ × ξ̇ + η × η̇` for the velocity pair `d`.
    pub fn angular_momentum(&self, d: &JacobiPair) -> Vec3 {
        add(cross(self.xi, d.xi), cross(self.eta, d.eta))
    }
}

impl ComplexVec {
    pub fn from_jacobi(j: &JacobiPair) -> Self {
        let z = [0, 1, 2].map(|k| Complex64::new(j.xi[k], j.eta[k]));
        Self { z }
    }

    pub fn to_jacobi(&self) -> JacobiPair {
        JacobiPair {
            xi: self.z.map(|c| c.re),
            eta: self.z.map(|c| c.im),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            z: self.z.map(|c| c.conj()),
        }
    }

    /// `z·z̄ = ρ²`.
    pub fn rho_sq(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Bilinear square `z·z = ξ² - η² + 2iξ·η`.
    pub fn square(&self) -> Complex64 {
        cdot(&self.z, &self.z)
    }

    pub fn spherical(&self) -> [Complex64; 3] {
        spherical_components(self.z)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            z: self.z.map(|c| s * c),
        }
    }
}

impl ShapeState {
    fn half_angles(&self) -> (Complex64, f64, f64) {
        (
            Complex64::from_polar(1.0, -self.lambda / 2.0),
            (self.a / 2.0).cos(),
            (self.a / 2.0).sin(),
        )
    }

    /// `u = e^{-iλ/2} cos(a/2) - i e^{iλ/2} sin(a/2)`.
    pub fn u(&self) -> Complex64 {
        let (e, c, s) = self.half_angles();
        e * c - Complex64::i() * e.conj() * s
    }

    /// `v = e^{-iλ/2} cos(a/2) + i e^{iλ/2} sin(a/2)`.
    pub fn v(&self) -> Complex64 {
        let (e, c, s) = self.half_angles();
        e * c + Complex64::i() * e.conj() * s
    }

    /// Phase `ψ1` of `u`.
    pub fn psi1(&self) -> f64 {
        self.u().arg()
    }

    /// `ψ2 = arg v - π/2`.
    pub fn psi2(&self) -> f64 {
        self.v().arg() - PI / 2.0
    }

    /// `ξ² = ρ²(1 + sin a sin λ)/2`.
    pub fn xi_sq(&self) -> f64 {
        0.5 * self.rho * self.rho * (1.0 + self.a.sin() * self.lambda.sin())
    }

    /// `η² = ρ²(1 - sin a sin λ)/2`.
    pub fn eta_sq(&self) -> f64 {
        0.5 * self.rho * self.rho * (1.0 - self.a.sin() * self.lambda.sin())
    }

    /// `ξ·η = ρ² sin a cos λ / 2`.
    pub fn xi_dot_eta(&self) -> f64 {
        0.5 * self.rho * self.rho * self.a.sin() * self.lambda.cos()
    }
}

pub(crate) fn rot_x_pi() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]
}

pub(crate) fn rot_z(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub(crate) fn rot_y(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

impl FrameOrientation {
    /// Rotation matrix whose columns are `l1`, `l2`, `l3`.
    pub fn matrix(&self) -> Mat3 {
        let r = mat_mul(
            &rot_z(self.phi2),
            &mat_mul(&rot_y(-self.theta), &rot_z(self.phi1)),
        );
        mat_mul(&rot_x_pi(), &r)
    }

    /// Moving axes `(l1, l2, l3)`.
    pub fn axes(&self) -> [Vec3; 3] {
        let r = self.matrix();
        [0, 1, 2].map(|c| [r[0][c], r[1][c], r[2][c]])
    }

    /// `l₊ = (l1 + i l2)/√2`.
    pub fn l_plus(&self) -> [Complex64; 3] {
        let [l1, l2, _] = self.axes();
        [0, 1, 2].map(|k| Complex64::new(l1[k], l2[k]) * FRAC_1_SQRT_2)
    }

    /// `l₋ = (l1 - i l2)/√2`.
    pub fn l_minus(&self) -> [Complex64; 3] {
        self.l_plus().map(|c| c.conj())
    }

    /// Euler angles of a proper rotation matrix with columns `l1, l2, l3`.
    /// At `sin θ = 0` the gauge `φ2 = 0` is used.
    pub fn from_matrix(r: &Mat3) -> Self {
        let q = mat_mul(&rot_x_pi(), r);
        let ct = q[2][2].clamp(-1.0, 1.0);
        let st = (q[0][2] * q[0][2] + q[1][2] * q[1][2]).sqrt();
        if st > 1e-14 {
            let theta = st.atan2(ct);
            let phi2 = (-q[1][2]).atan2(-q[0][2]);
            let phi1 = (-q[2][1]).atan2(q[2][0]);
            Self { phi1, theta, phi2 }
        } else if ct > 0.0 {
            Self {
                phi1: q[1][0].atan2(q[0][0]),
                theta: 0.0,
                phi2: 0.0,
            }
        } else {
            Self {
                phi1: q[1][0].atan2(q[1][1]),
                theta: PI,
                phi2: 0.0,
            }
        }
    }
}

/// `z = ρ e^{-iλ/2} (cos(a/2) l₊ + i sin(a/2) l₋)`.
pub fn reconstruct(s: &ShapeState, f: &FrameOrientation) -> ComplexVec {
    let e = Complex64::from_polar(s.rho, -s.lambda / 2.0);
    let (c, sn) = ((s.a / 2.0).cos(), (s.a / 2.0).sin());
    let lp = f.l_plus();
    let lm = f.l_minus();
    let z = [0, 1, 2].map(|k| e * (lp[k] * c + Complex64::i() * lm[k] * sn));
    ComplexVec { z }
}

/// Inverse of [`reconstruct`] with `a ∈ [0, π/2]`.
///
/// At `sin a = 0` the shape phase is fixed to `λ = 0`, which aligns `ξ` with
/// `l1`. At `cos a = 0` (collinear shapes) `l3` is a canonical unit vector
/// orthogonal to the line of the particles.
pub fn parametrize(z: &ComplexVec) -> Result<(ShapeState, FrameOrientation), KinematicsError> {
    let rho_sq = z.rho_sq();
    if rho_sq.is_nan() || rho_sq <= 0.0 {
        return Err(KinematicsError::ZeroRadius(rho_sq.sqrt()));
    }
    let rho = rho_sq.sqrt();
    let w: [Complex64; 3] = z.z.map(|c| c / rho);
    let sq = cdot(&w, &w);
    let sin_a = sq.norm().min(1.0);
    // i (w × w̄) = cos a · l3 is real.
    let wc = w.map(|c| c.conj());
    let cr = [
        w[1] * wc[2] - w[2] * wc[1],
        w[2] * wc[0] - w[0] * wc[2],
        w[0] * wc[1] - w[1] * wc[0],
    ];
    let n_vec: Vec3 = cr.map(|c| (Complex64::i() * c).re);
    let cos_a = norm(n_vec).min(1.0);
    let a = sin_a.atan2(cos_a);
    let lambda = if sin_a > 1e-15 {
        (sq / Complex64::i()).conj().arg()
    } else {
        0.0
    };
    // √2 w e^{iλ/2} = (c Re + s l2 …): Re = c l1 + s l2, Im = s l1 + c l2.
    let ph = Complex64::from_polar(2f64.sqrt(), lambda / 2.0);
    let v = w.map(|c| c * ph);
    let re: Vec3 = v.map(|c| c.re);
    let im: Vec3 = v.map(|c| c.im);
    let (c, s) = ((a / 2.0).cos(), (a / 2.0).sin());
    let (l1, l2) = if cos_a > 1e-10 {
        let l1 = scale(1.0 / cos_a, sub(scale(c, re), scale(s, im)));
        let l2 = scale(1.0 / cos_a, sub(scale(c, im), scale(s, re)));
        orthonormalize(l1, l2)
    } else {
        // Re ≈ Im ≈ (l1 + l2)/√2 along the particle line.
        let u = scale(0.5, add(re, im));
        let nu = norm(u);
        let u = scale(1.0 / nu, u);
        let p = canonical_perpendicular(u);
        let l1 = scale(FRAC_1_SQRT_2, add(u, p));
        let l2 = scale(FRAC_1_SQRT_2, sub(u, p));
        (l1, l2)
    };
    let l3 = cross(l1, l2);
    let r = [
        [l1[0], l2[0], l3[0]],
        [l1[1], l2[1], l3[1]],
        [l1[2], l2[2], l3[2]],
    ];
    Ok((
        ShapeState { rho, lambda, a },
        FrameOrientation::from_matrix(&r),
    ))
}

fn orthonormalize(l1: Vec3, l2: Vec3) -> (Vec3, Vec3) {
    let e1 = scale(1.0 / norm(l1), l1);
    let l2p = sub(l2, scale(dot(e1, l2), e1));
    (e1, scale(1.0 / norm(l2p), l2p))
}

fn canonical_perpendicular(u: Vec3) -> Vec3 {
    let k = (0..3)
        .min_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()))
        .expect("three components");
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let p = sub(e, scale(dot(e, u), u));
    scale(1.0 / norm(p), p)
}

/// Relabelling of the particles acting on `z`.
///
/// Transposition of particles 1 and 2 gives `z → z*`; the two transpositions
/// involving particle 3 give `z → e^{2πi/3} z*` (P13) and
/// `z → e^{-2πi/3} z*` (P23).
pub fn permute(p: Permutation, z: &ComplexVec) -> ComplexVec {
    let phase = match p {
        Permutation::P12 => Complex64::new(1.0, 0.0),
        Permutation::P13 => Complex64::from_polar(1.0, 2.0 * PI / 3.0),
        Permutation::P23 => Complex64::from_polar(1.0, -2.0 * PI / 3.0),
    };
    z.conj().scaled(phase)
}

/// Angle between `ξ` and `η`:
/// `cos Θ = cos λ sin a / √(1 - sin²λ sin²a)`.
pub fn inter_vector_angle(s: &ShapeState) -> Result<f64, KinematicsError> {
    let den = 1.0 - (s.lambda.sin() * s.a.sin()).powi(2);
    if den <= 1e-15 {
        return Err(KinematicsError::Degenerate("one Jacobi vector vanishes"));
    }
    let c = s.lambda.cos() * s.a.sin() / den.sqrt();
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Principal moments of inertia
/// `(ρ² sin²(a/2 - π/4), ρ² cos²(a/2 - π/4), ρ²)`.
pub fn inertia_components(s: &ShapeState) -> (f64, f64, f64) {
    let r2 = s.rho * s.rho;
    let t = s.a / 2.0 - PI / 4.0;
    (r2 * t.sin().powi(2), r2 * t.cos().powi(2), r2)
}

/// Inertia tensor `Σ (|x|² 1 - x xᵀ)` of unit-mass particles.
pub fn inertia_tensor(cfg: &ParticleConfig) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for x in [cfg.x1, cfg.x2, cfg.x3] {
        let r2 = dot(x, x);
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] += if i == j { r2 } else { 0.0 } - x[i] * x[j];
            }
        }
    }
    t
}

/// Named shapes used to illustrate the `(λ, a)` chart, all at `ρ = 1` and
/// identity-like frame.
pub fn gallery() -> Vec<(&'static str, ShapeState)> {
    let sh = |lambda: f64, a: f64| ShapeState {
        rho: 1.0,
        lambda,
        a,
    };
    vec![
        ("a=pi/2,lambda=0", sh(0.0, PI / 2.0)),
        ("a=pi/2,lambda=pi/6", sh(PI / 6.0, PI / 2.0)),
        ("a=0,lambda=0", sh(0.0, 0.0)),
        ("a=pi/4,lambda=0", sh(0.0, PI / 4.0)),
        ("a=3pi/4,lambda=0", sh(0.0, 3.0 * PI / 4.0)),
        ("a=pi,lambda=0", sh(0.0, PI)),
        ("a=0,lambda=pi/2", sh(PI / 2.0, 0.0)),
        ("a=pi/6,lambda=pi/2", sh(PI / 2.0, PI / 6.0)),
        ("a=pi/2,lambda=pi/2", sh(PI / 2.0, PI / 2.0)),
    ]
}

/// Particle positions of a shape in the frame with all Euler angles zero.
pub fn shape_positions(s: &ShapeState) -> ParticleConfig {
    let f = FrameOrientation {
        phi1: 0.0,
        theta: 0.0,
        phi2: 0.0,
    };
    particle_positions(&reconstruct(s, &f).to_jacobi())
}
