//! Acceptance suite: one pass/fail line per criterion.

use hyper3b::basis::{
    degeneracy, degeneracy_total, enumerate_tree_basis, harmonic_dimension, j0_expansion_coeffs,
    j0_expansion_coeffs_literal, j0_harmonic, j0_nus, tree_function, TreeLabel,
};
use hyper3b::dynamics::{eom_potential, integrate, observables, DynState, Model, PotentialSpec};
use hyper3b::kinematics::{particle_positions, reconstruct, FrameOrientation, ShapeState};
use hyper3b::polyops::{
    apply, commutator, monomials_of_degree, sphere_norm, OperatorTag, Polynomial6,
};
use hyper3b::transform::{block_sweep, rotate_tree, rotation_coefficient, CoeffForm, SymFunction};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn judge(value: f64, limit: f64, what: &str) -> Outcome {
    let msg = format!("{what} {value:.3e} (limit {limit:.1e})");
    if value <= limit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let failed = parts.iter().any(Result::is_err);
    let text = parts
        .into_iter()
        .map(|p| p.unwrap_or_else(|e| format!("FAILED {e}")))
        .collect::<Vec<_>>()
        .join("; ");
    if failed {
        Err(text)
    } else {
        Ok(text)
    }
}

// Differential operators built from partial derivatives, independent of the
// library's operator tables. Variable order is (z1, z2, z3, w1, w2, w3).

fn times_var(f: &Polynomial6, k: usize) -> Polynomial6 {
    f.mul(&Polynomial6::var(k))
}

fn laplacian(f: &Polynomial6) -> Polynomial6 {
    let mut out = Polynomial6::zero();
    for k in 0..3 {
        out.add_scaled(&f.derivative(k).derivative(k + 3), c(4.0, 0.0));
    }
    out
}

/// `A_ik = i z_i ∂/∂z_k - i w_k ∂/∂w_i`, indices from 0.
fn op_a(i: usize, k: usize, f: &Polynomial6) -> Polynomial6 {
    times_var(&f.derivative(k), i)
        .scale(c(0.0, 1.0))
        .sub(&times_var(&f.derivative(3 + i), 3 + k).scale(c(0.0, 1.0)))
}

fn op_l(i: usize, k: usize, f: &Polynomial6) -> Polynomial6 {
    op_a(i, k, f).sub(&op_a(k, i, f)).scale_re(0.5)
}

fn op_b(i: usize, k: usize, f: &Polynomial6) -> Polynomial6 {
    op_a(i, k, f).add(&op_a(k, i, f)).scale_re(0.5)
}

fn op_n(f: &Polynomial6) -> Polynomial6 {
    Polynomial6::from_terms(f.terms().map(|(m, v)| {
        (
            *m,
            v * 0.5 * (f64::from(m[0] + m[1] + m[2]) - f64::from(m[3] + m[4] + m[5])),
        )
    }))
}

fn op_l3(f: &Polynomial6) -> Polynomial6 {
    op_l(0, 1, f).scale_re(2.0)
}

fn op_l2(f: &Polynomial6) -> Polynomial6 {
    let mut out = Polynomial6::zero();
    for (i, k) in [(0, 1), (0, 2), (1, 2)] {
        out.add_scaled(&op_l(i, k, &op_l(i, k, f)), c(-4.0, 0.0));
    }
    out
}

/// `Ω = Σ L_ik B_kl L_li`.
fn op_omega(f: &Polynomial6) -> Polynomial6 {
    let mut out = Polynomial6::zero();
    for l in 0..3 {
        for i in 0..3 {
            let li = op_l(l, i, f);
            for k in 0..3 {
                out.add_assign(&op_l(i, k, &op_b(k, l, &li)));
            }
        }
    }
    out
}

fn eigen_defect(image: &Polynomial6, f: &Polynomial6, value: Complex64) -> f64 {
    image.sub(&f.scale(value)).max_abs() / f.max_abs()
}

/// Largest relative defect of the five defining eigen-equations.
fn five_operator_defect(f: &SymFunction) -> f64 {
    let p = &f.polynomial;
    let l = f.label;
    [
        eigen_defect(&laplacian(p), p, c(0.0, 0.0)),
        eigen_defect(&op_l2(p), p, c(-f64::from(l.j * (l.j + 1)), 0.0)),
        eigen_defect(&op_l3(p), p, c(-f64::from(l.m), 0.0)),
        eigen_defect(&op_n(p), p, c(f64::from(l.two_nu) / 2.0, 0.0)),
        eigen_defect(&op_omega(p), p, c(0.0, -f.omega)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Harmonic polynomials of bidegree `(p, q)` in three complex variables.
fn harmonic_count(p: i64, q: i64) -> i64 {
    let monos = |p: i64, q: i64| {
        if p < 0 || q < 0 {
            0
        } else {
            binom(p + 2, 2) * binom(q + 2, 2)
        }
    };
    monos(p, q) - monos(p - 1, q - 1)
}

fn random_point(rng: &mut ChaCha8Rng) -> (ShapeState, FrameOrientation, [Complex64; 3]) {
    let s = ShapeState {
        rho: 1.0,
        lambda: rng.gen_range(-PI..PI),
        a: rng.gen_range(0.05..1.5),
    };
    let f = FrameOrientation {
        phi1: rng.gen_range(-PI..PI),
        theta: rng.gen_range(0.1..3.0),
        phi2: rng.gen_range(-PI..PI),
    };
    let z = reconstruct(&s, &f).z;
    (s, f, z)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut tree = 0.0f64;
    let mut sym = 0.0f64;
    let mut count = 0;
    for k in 0..=6 {
        for l in enumerate_tree_basis(k) {
            let f = tree_function(&l).map_err(|e| e.to_string())?;
            tree = tree.max(laplacian(&f).max_abs() / sphere_norm(&f));
            count += 1;
        }
        for f in block_sweep(k).map_err(|e| e.to_string())? {
            sym = sym.max(laplacian(&f.polynomial).max_abs() / sphere_norm(&f.polynomial));
            count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    all(vec![
        Ok(format!("{count} functions")),
        judge(tree, 1e-10, "tree Lap6 residual/norm"),
        judge(sym, 1e-10, "symmetrized Lap6 residual/norm"),
        judge(secs, 60.0, "runtime s"),
    ])
}

fn criterion_2() -> Outcome {
    let fs = block_sweep(1).map_err(|e| e.to_string())?;
    if fs.len() != 6 {
        return Err(format!("expected 6 functions at K=1, got {}", fs.len()));
    }
    let mut worst = 0.0f64;
    for f in &fs {
        let p = &f.polynomial;
        let l = f.label;
        // N = ±1/2, -L2 = 2, L3 = -M, Ω' = +3/4 for N = +1/2 and -3/4 for N = -1/2.
        let n = if l.two_nu == 1 {
            0.5
        } else if l.two_nu == -1 {
            -0.5
        } else {
            return Err(format!("2nu={}", l.two_nu));
        };
        let omega = 1.5 * n;
        if l.j != 1 {
            return Err(format!("J={} at K=1", l.j));
        }
        worst = worst
            .max(eigen_defect(&op_n(p), p, c(n, 0.0)))
            .max(eigen_defect(&op_l2(p).scale_re(-1.0), p, c(2.0, 0.0)))
            .max(eigen_defect(&op_l3(p), p, c(-f64::from(l.m), 0.0)))
            .max(eigen_defect(
                &op_omega(p).scale(c(0.0, 1.0)),
                p,
                c(omega, 0.0),
            ))
            .max(eigen_defect(&laplacian(p), p, c(0.0, 0.0)))
            .max((f.omega - omega).abs());
    }
    judge(worst, 1e-12, "6 functions, largest defect")
}

fn criterion_3() -> Outcome {
    let expected = [1i64, 6, 20, 50, 105, 196, 336];
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (k, &want) in expected.iter().enumerate() {
        let k = k as i32;
        let counted = binom(i64::from(k) + 5, 5) - binom(i64::from(k) + 3, 5);
        let mut sum = 0;
        let mut t = -k;
        while t <= k {
            let p = i64::from((k + t) / 2);
            let q = i64::from((k - t) / 2);
            let n = degeneracy(k, t);
            if n != harmonic_count(p, q) {
                bad.push(format!("n({k},{t}/2)={n} vs {}", harmonic_count(p, q)));
            }
            sum += n;
            t += 2;
        }
        if sum != want
            || degeneracy_total(k) != want
            || counted != want
            || harmonic_dimension(k) != want
        {
            bad.push(format!(
                "K={k}: sum {sum}, total {}, counted {counted}, want {want}",
                degeneracy_total(k)
            ));
        }
        parts.push(sum.to_string());
    }
    let text = format!("n(K) = {{{}}}", parts.join(","));
    if bad.is_empty() {
        Ok(text)
    } else {
        Err(format!("{text}; {}", bad.join(", ")))
    }
}

fn delta(a: u8, b: u8) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Right-hand sides of the generator commutators.
fn algebra(x: OperatorTag, y: OperatorTag) -> Vec<(Complex64, OperatorTag)> {
    use OperatorTag::*;
    let i1 = c(0.0, 1.0);
    let h = c(0.0, 0.5);
    match (x, y) {
        (A(i, j), A(k, l)) => vec![(i1 * delta(j, k), A(i, l)), (-i1 * delta(i, l), A(k, j))],
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
        _ => vec![],
    }
}

fn criterion_4() -> Outcome {
    use OperatorTag::*;
    let idx: Vec<(u8, u8)> = (1..=3).flat_map(|i| (1..=3).map(move |k| (i, k))).collect();
    let mut pairs = Vec::new();
    for &(i, j) in &idx {
        for &(k, l) in &idx {
            pairs.push((A(i, j), A(k, l)));
            pairs.push((L(i, j), L(k, l)));
            pairs.push((B(i, j), B(k, l)));
            pairs.push((B(i, j), L(k, l)));
        }
        pairs.push((N, A(i, j)));
        pairs.push((N, L(i, j)));
        pairs.push((N, B(i, j)));
    }
    let monos: Vec<Polynomial6> = (0..=4)
        .flat_map(monomials_of_degree)
        .map(|m| Polynomial6::monomial(m, c(1.0, 0.0)))
        .collect();
    let mut worst = 0.0f64;
    for &(x, y) in &pairs {
        let rhs = algebra(x, y);
        for f in &monos {
            let mut want = Polynomial6::zero();
            for (coef, op) in &rhs {
                want.add_scaled(&apply(*op, f), *coef);
            }
            worst = worst.max(commutator(x, y, f).sub(&want).max_abs());
        }
    }
    judge(
        worst,
        1e-11,
        &format!(
            "{} pairs on {} monomials, residual",
            pairs.len(),
            monos.len()
        ),
    )
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

/// Largest deviation between `f(e^{iφ}z)` and the rotation expansion, over
/// random sample points.
fn substitution_defect(l: &TreeLabel, phi: f64, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let f = tree_function(l).map_err(|e| e.to_string())?;
    let terms: Vec<(Polynomial6, f64)> = rotate_tree(l, phi)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(lp, v)| Ok((tree_function(&lp).map_err(|e| e.to_string())?, v)))
        .collect::<Result<_, String>>()?;
    let rot = Complex64::from_polar(1.0, phi);
    let mut worst = 0.0f64;
    for _ in 0..8 {
        let (_, _, z) = random_point(rng);
        let direct = f.evaluate(&z.map(|x| x * rot));
        let expanded: Complex64 = terms.iter().map(|(g, v)| g.evaluate(&z) * *v).sum();
        worst = worst.max((direct - expanded).norm());
    }
    Ok(worst)
}

fn criterion_5() -> Outcome {
    let mut forms = 0.0f64;
    let mut orth = 0.0f64;
    let angles = [0.2, 0.7, PI / 4.0, 1.3];
    for k in 0..=4 {
        for j in 0..=k {
            for m in [0, j] {
                for &phi in &angles {
                    let Ok(ja) = rotation_coefficient(k, j, m, phi, CoeffForm::Jacobi) else {
                        continue;
                    };
                    let df = rotation_coefficient(k, j, m, phi, CoeffForm::DFunction)
                        .map_err(|e| e.to_string())?;
                    let ov = rotation_coefficient(k, j, m, phi, CoeffForm::Overlap)
                        .map_err(|e| e.to_string())?;
                    forms = forms
                        .max(max_diff(&ja.matrix, &df.matrix))
                        .max(max_diff(&ja.matrix, &ov.matrix));
                    let n = ja.pairs.len();
                    for a in 0..n {
                        for b in 0..n {
                            let s: f64 = (0..n).map(|r| ja.matrix[r][a] * ja.matrix[r][b]).sum();
                            orth = orth.max((s - delta(a as u8, b as u8)).abs());
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut k1 = 0.0f64;
    let mut analytic = 0.0f64;
    for &phi in &angles {
        for l in enumerate_tree_basis(1) {
            k1 = k1.max(substitution_defect(&l, phi, &mut rng)?);
        }
        // ξ → ξ cos φ - η sin φ, η → ξ sin φ + η cos φ.
        let r = rotation_coefficient(1, 1, 0, phi, CoeffForm::Jacobi).map_err(|e| e.to_string())?;
        let (cs, sn) = (phi.cos(), phi.sin());
        let want = [
            ((1, 0), (1, 0), cs),
            ((0, 1), (1, 0), -sn),
            ((1, 0), (0, 1), sn),
            ((0, 1), (0, 1), cs),
        ];
        for (row, col, v) in want {
            let got = r.entry(row, col).ok_or("missing K=1 entry")?;
            analytic = analytic.max((got - v).abs());
        }
    }
    let mut general = 0.0f64;
    for k in 2..=4 {
        for l in enumerate_tree_basis(k).into_iter().filter(|l| l.m == l.j) {
            general = general.max(substitution_defect(&l, 0.6, &mut rng)?);
        }
    }
    all(vec![
        judge(forms, 1e-10, "closed forms vs overlap"),
        judge(orth, 1e-10, "orthogonality"),
        judge(k1.max(analytic), 1e-12, "K=1 substitution oracle"),
        judge(general, 1e-10, "K=2..4 substitution oracle"),
    ])
}

fn criterion_6() -> Outcome {
    let mut eigen = 0.0f64;
    let mut bad = Vec::new();
    let mut counts = Vec::new();
    for k in 0..=6 {
        let fs = block_sweep(k).map_err(|e| e.to_string())?;
        for f in &fs {
            eigen = eigen.max(five_operator_defect(f));
        }
        let counted = binom(i64::from(k) + 5, 5) - binom(i64::from(k) + 3, 5);
        if fs.len() as i64 != counted {
            bad.push(format!("K={k}: {} functions, expected {counted}", fs.len()));
        }
        counts.push(fs.len().to_string());
        let mut blocks: BTreeMap<(i32, i32, i32), usize> = BTreeMap::new();
        for f in &fs {
            *blocks
                .entry((f.label.j, f.label.m, f.label.two_nu))
                .or_default() += 1;
        }
        if k < 4 {
            for (key, n) in &blocks {
                if *n != 1 {
                    bad.push(format!("K={k} block {key:?} has dimension {n}"));
                }
            }
        }
    }
    let counts = Ok(format!("counts {{{}}}", counts.join(",")));
    let structure = if bad.is_empty() {
        Ok("K<4 blocks one-dimensional".to_string())
    } else {
        Err(bad.join(", "))
    };
    all(vec![
        judge(eigen, 1e-9, "eigen-residual"),
        counts,
        structure,
    ])
}

/// Fits the `J = 0` tree function over the closed-form harmonics by least
/// squares on random points.
fn sampled_coeffs(k: i32, j: i32, rng: &mut ChaCha8Rng) -> Result<(Vec<Complex64>, f64), String> {
    let tree = tree_function(&TreeLabel::new(k, j, j, 0, 0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let nus = j0_nus(k);
    let rows = 40;
    let mut a = DMatrix::<Complex64>::zeros(rows, nus.len());
    let mut b = DVector::<Complex64>::zeros(rows);
    for r in 0..rows {
        let (s, _, z) = random_point(rng);
        b[r] = tree.evaluate(&z);
        for (col, &nu) in nus.iter().enumerate() {
            a[(r, col)] = j0_harmonic(k, nu, s.lambda, s.a).map_err(|e| e.to_string())?;
        }
    }
    let x = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| e.to_string())?;
    let fit = (&a * &x - &b).camax() / b.camax();
    Ok((x.iter().copied().collect(), fit))
}

/// Best single constant `c` with `p ≈ c f` and the relative residual.
fn proportionality(pairs: &[(Complex64, Complex64)]) -> (Complex64, f64) {
    let num: Complex64 = pairs.iter().map(|(f, p)| f.conj() * p).sum();
    let den: f64 = pairs.iter().map(|(f, _)| f.norm_sqr()).sum();
    let cst = num / den;
    let scale = pairs.iter().map(|(_, p)| p.norm()).fold(0.0, f64::max);
    (
        cst,
        pairs
            .iter()
            .map(|(f, p)| (p - cst * f).norm())
            .fold(0.0, f64::max)
            / scale,
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut fit_worst = 0.0f64;
    let mut literal_worst = 0.0f64;
    let mut constants = Vec::new();
    for k in (0..=6).step_by(2) {
        let mut pairs = Vec::new();
        let mut literal = Vec::new();
        for j in 0..=k / 2 {
            let (sampled, fit) = sampled_coeffs(k, j, &mut rng)?;
            fit_worst = fit_worst.max(fit);
            let closed = j0_expansion_coeffs(k, j).map_err(|e| e.to_string())?;
            let lit = j0_expansion_coeffs_literal(k, j).map_err(|e| e.to_string())?;
            pairs.extend(
                closed
                    .into_iter()
                    .map(|(_, v)| v)
                    .zip(sampled.iter().copied()),
            );
            literal.extend(lit.into_iter().map(|(_, v)| v).zip(sampled));
        }
        let (cst, r) = proportionality(&pairs);
        worst = worst.max(r);
        literal_worst = literal_worst.max(proportionality(&literal).1);
        constants.push(format!("K={k}: {:.10e}{:+.10e}i", cst.re, cst.im));
    }
    all(vec![
        judge(fit_worst, 1e-10, "sampled fit residual"),
        judge(worst, 1e-8, "relative residual"),
        Ok(format!("constants {}", constants.join(", "))),
        Ok(format!(
            "literal closed-form residual {literal_worst:.3e} (informational)"
        )),
    ])
}

fn rel(x: f64, x0: f64) -> f64 {
    (x - x0).abs() / x0.abs()
}

fn state(shape: [f64; 6], rates: [f64; 6]) -> DynState {
    let mut y = shape.to_vec();
    y.extend_from_slice(&rates);
    DynState::from_array(&y)
}

/// Equilateral state of size `rho` rotating in its plane at rate `w`.
fn equilateral(rho: f64, w: f64) -> DynState {
    state([0.0, 0.0, 0.0, 0.0, 0.0, rho], [0.0, 0.0, w, 0.0, 0.0, 0.0])
}

fn z_of(s: &DynState) -> [Complex64; 3] {
    reconstruct(&s.shape(), &s.frame()).z
}

/// Largest radial residual of `1/r = α + β cos χ + γ sin χ` fitted to
/// planar points.
fn conic_residual(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let a = DMatrix::from_fn(n, 3, |r, col| {
        let chi = points[r].1.atan2(points[r].0);
        [1.0, chi.cos(), chi.sin()][col]
    });
    let b = DVector::from_fn(n, |r, _| 1.0 / points[r].0.hypot(points[r].1));
    let Ok(x) = a.clone().svd(true, true).solve(&b, 1e-14) else {
        return f64::INFINITY;
    };
    (0..n)
        .map(|r| {
            let chi = points[r].1.atan2(points[r].0);
            (points[r].0.hypot(points[r].1) - 1.0 / (x[0] + x[1] * chi.cos() + x[2] * chi.sin()))
                .abs()
        })
        .fold(0.0, f64::max)
}

fn criterion_8() -> Result<String, String> {
    let start = Instant::now();
    let tol = 1e-10;
    let e = |e: hyper3b::dynamics::DynamicsError| e.to_string();
    let s0 = state(
        [0.7, 0.4, 0.3, 1.1, -0.5, 1.2],
        [0.05, -0.04, 0.03, 0.02, -0.03, 0.01],
    );
    let free = integrate(&s0, &Model::free(), 100.0, tol, 200).map_err(e)?;
    let o0 = observables(&s0, &PotentialSpec::Free).map_err(e)?;
    let (mut de, mut dl, mut dw) = (0.0f64, 0.0f64, 0.0f64);
    for (_, s) in &free.samples {
        let o = observables(s, &PotentialSpec::Free).map_err(e)?;
        de = de.max(rel(o.energy, o0.energy));
        dl = dl.max(rel(o.angular_momentum_norm(), o0.angular_momentum_norm()));
        dw = dw.max(rel(o.omega, o0.omega));
    }
    if free.event.is_some() || free.samples.last().map(|x| x.0) != Some(100.0) {
        de = f64::INFINITY;
    }

    // Straight line z(t) = z0 + v0 t, with v0 from central differences.
    let h = 1e-6;
    let step = |sign: f64| {
        let mut y = s0.to_array();
        for i in 0..6 {
            y[i] += sign * h * y[6 + i];
        }
        z_of(&DynState::from_array(&y))
    };
    let (zp, zm) = (step(1.0), step(-1.0));
    let z0 = z_of(&s0);
    let line = integrate(&s0, &Model::free(), 20.0, tol, 100).map_err(e)?;
    let mut cart = if line.event.is_some() {
        f64::INFINITY
    } else {
        0.0
    };
    for (t, s) in &line.samples {
        let z = z_of(s);
        for k in 0..3 {
            let v = (zp[k] - zm[k]) / (2.0 * h);
            cart = cart.max((z[k] - z0[k] - v * *t).norm());
        }
    }

    // Equilateral circular orbit: V = -3/ρ at ρ = 1 needs ψ̇ = √3.
    let w = 3f64.sqrt();
    let period = 2.0 * PI / w;
    let circ0 = equilateral(1.0, w);
    let circ = integrate(&circ0, &Model::kepler(), 10.0 * period, tol, 400).map_err(e)?;
    let mut drift = if circ.event.is_some() {
        f64::INFINITY
    } else {
        0.0
    };
    for (_, s) in &circ.samples {
        drift = drift.max((s.rho - 1.0).abs());
    }

    // Elliptic orbit: every particle moves on a conic about the centre of mass.
    let ell0 = equilateral(1.0, 1.5);
    let ell = integrate(&ell0, &Model::kepler(), 10.0, tol, 300).map_err(e)?;
    let mut conic = if ell.event.is_some() {
        f64::INFINITY
    } else {
        0.0
    };
    for p in 0..3 {
        let pts: Vec<(f64, f64)> = ell
            .samples
            .iter()
            .map(|(_, s)| {
                let cfg = particle_positions(&reconstruct(&s.shape(), &s.frame()).to_jacobi());
                let x = [cfg.x1, cfg.x2, cfg.x3][p];
                (x[0], x[1])
            })
            .collect();
        conic = conic.max(conic_residual(&pts));
    }

    // Harmonic binding: a = π, λ = 0, ρ = ρ0 at rest is an equilibrium.
    let rho0 = 1.3;
    let eq = state([PI, 0.0, 0.2, 0.9, 0.1, rho0], [0.0; 6]);
    let acc = eom_potential(&eq, &PotentialSpec::Harmonic { rho0 }).map_err(e)?;
    let equilibrium = acc.iter().map(|x| x.abs()).fold(0.0, f64::max);

    let secs = start.elapsed().as_secs_f64();
    all(vec![
        judge(de, 1e-8, "free energy drift"),
        judge(dl, 1e-8, "free |L| drift"),
        judge(cart, 1e-6, "straight-line deviation"),
        judge(drift, 1e-6, "circular radius drift"),
        judge(conic, 1e-6, "conic residual"),
        judge(equilibrium, 1e-12, "equilibrium acceleration"),
        judge(dw, 1e-8, "classical Omega drift"),
        judge(secs, 120.0, "runtime s"),
    ])
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hyper3b"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let init = dir.path().join("init.json");
    std::fs::write(
        &init,
        r#"{"a":0.7,"lambda":0.4,"phi1":0.3,"theta":1.1,"phi2":-0.5,"rho":1.2,
"da":0.05,"dlambda":-0.04,"dphi1":0.03,"dtheta":0.02,"dphi2":-0.03,"drho":0.01}"#,
    )
    .map_err(|e| e.to_string())?;
    let init = init.to_str().ok_or("path")?.to_string();
    let mut runs: Vec<Vec<Vec<u8>>> = Vec::new();
    // Both runs write to the same paths, since paths appear in some outputs.
    for _ in 0..2 {
        let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
        let (traj, svg, polys) = (p("traj.csv"), p("energy.svg"), p("polys"));
        let mut outputs = vec![
            run_cli(&["enumerate", "--K", "4"])?,
            run_cli(&["enumerate", "--K", "3", "--format", "csv"])?,
            run_cli(&[
                "transform",
                "coeffs",
                "--K",
                "4",
                "--J",
                "2",
                "--phi",
                "0.7",
            ])?,
            run_cli(&[
                "transform",
                "coeffs",
                "--K",
                "3",
                "--J",
                "1",
                "--phi",
                "0.4",
                "--format",
                "csv",
            ])?,
            run_cli(&["transform", "omega", "--K", "5", "--J", "2", "--nu", "0.5"])?,
            run_cli(&["verify", "omega", "--K-max", "4"])?,
            run_cli(&[
                "simulate",
                "free",
                "--init",
                &init,
                "--t-end",
                "5",
                "--out",
                &traj,
                "--samples",
                "50",
            ])?,
            run_cli(&["export", "--in", &traj, "--plot", "energy", "--out", &svg])?,
            run_cli(&["export", "--in", &traj, "--format", "json"])?,
        ];
        let manifest = run_cli(&["basis", "--K", "3", "--kind", "sym", "--out-dir", &polys])?;
        outputs.push(manifest.clone());
        let entries: serde_json::Value =
            serde_json::from_slice(&manifest).map_err(|e| e.to_string())?;
        for entry in entries.as_array().ok_or("manifest")? {
            let path = entry["polynomial-dump-path"].as_str().ok_or("dump path")?;
            outputs.push(std::fs::read(path).map_err(|e| e.to_string())?);
        }
        outputs.push(std::fs::read(&traj).map_err(|e| e.to_string())?);
        outputs.push(std::fs::read(&svg).map_err(|e| e.to_string())?);
        runs.push(outputs);
    }
    let n = runs[0].len();
    let differ: Vec<String> = (0..n)
        .filter(|&i| runs[0][i] != runs[1].get(i).cloned().unwrap_or_default())
        .map(|i| i.to_string())
        .collect();
    let msg = format!("{n} outputs compared");
    if differ.is_empty() && runs[1].len() == n {
        Ok(msg)
    } else {
        Err(format!("{msg}, outputs {} differ", differ.join(",")))
    }
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        (
            "harmonicity of tree and symmetrized functions, K<=6",
            criterion_1,
        ),
        ("K=1 multiplet table", criterion_2),
        ("degeneracies", criterion_3),
        (
            "generator commutators on monomials of degree <= 4",
            criterion_4,
        ),
        ("rotation coefficients", criterion_5),
        ("Omega blocks", criterion_6),
        (
            "J=0 expansion proportional to Clebsch-Gordan form",
            criterion_7,
        ),
        ("dynamics", criterion_8),
        ("byte-identical CLI output", criterion_9),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {}: {name}: {detail}", n + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
