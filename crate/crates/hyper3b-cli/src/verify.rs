//! Invariant suites behind `hyper3b verify`.

use crate::config::Config;
use crate::enumerate::check_k;
use crate::output::{emit, to_json, usage};
use anyhow::Result;
use hyper3b::basis::{
    admissible_pairs, block_dimension, degeneracy_total, enumerate_tree_basis, j0_expansion_coeffs,
    j0_projection_coeffs, tree_function, TreeLabel,
};
use hyper3b::dynamics::{
    eom_potential, focal_conic_fit, integrate, kepler_psi_dot, observables, z_and_velocity,
    DynState, Model, PotentialSpec,
};
use hyper3b::polyops::{
    apply, apply_combination, commutator, inner_product, monomials_of_degree, rotate_argument,
    sphere_norm, structure_constants, OperatorTag, Polynomial6,
};
use hyper3b::transform::{block_sweep, rotate_tree, rotation_coefficient, CoeffForm, SymFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Harmonicity,
    Commutators,
    Orthonormality,
    Transform,
    Omega,
    Dynamics,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Largest degree K checked (monomial degree for `commutators`).
    #[arg(long = "K-max", allow_negative_numbers = true)]
    pub k_max: Option<i32>,
    /// Overrides every residual threshold of the suite; for `dynamics`
    /// it is the integrator tolerance instead.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

/// One named check with its worst offender.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub count: usize,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub worst: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FittedConstant {
    pub k: i32,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub k_max: i32,
    pub tol: Option<f64>,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<FittedConstant>,
}

/// Builds a check from `(residual, description)` items. The first item
/// with the largest residual is reported; NaN counts as a failure.
fn check(name: &str, items: Vec<(f64, String)>, threshold: f64) -> Check {
    let mut residual = 0.0;
    let mut worst = String::new();
    for (v, what) in &items {
        if v.is_nan() || *v > residual {
            residual = *v;
            worst.clone_from(what);
            if v.is_nan() {
                break;
            }
        }
    }
    Check {
        name: name.to_string(),
        count: items.len(),
        residual,
        threshold,
        passed: residual <= threshold,
        worst,
    }
}

fn nu_str(two_nu: i32) -> String {
    if two_nu % 2 == 0 {
        (two_nu / 2).to_string()
    } else {
        format!("{two_nu}/2")
    }
}

fn tree_str(l: &TreeLabel) -> String {
    format!("K={} j1={} j2={} J={} M={}", l.k, l.j1, l.j2, l.j, l.m)
}

fn sym_str(f: &SymFunction) -> String {
    let l = f.label;
    format!(
        "K={} J={} M={} nu={} omega_index={}",
        l.k,
        l.j,
        l.m,
        nu_str(l.two_nu),
        l.omega_index
    )
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sweep_all(k_max: i32) -> Result<Vec<SymFunction>> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        out.extend(block_sweep(k)?);
    }
    Ok(out)
}

pub fn harmonicity(k_max: i32, tol: Option<f64>) -> Result<Vec<Check>> {
    let thr = tol.unwrap_or(1e-10);
    let labels: Vec<TreeLabel> = (0..=k_max).flat_map(enumerate_tree_basis).collect();
    let tree: Vec<(f64, String)> = labels
        .par_iter()
        .map(|l| {
            let f = tree_function(l)?;
            Ok((
                apply(OperatorTag::Lap6, &f).max_abs() / sphere_norm(&f),
                tree_str(l),
            ))
        })
        .collect::<Result<_>>()?;
    let sym: Vec<(f64, String)> = sweep_all(k_max)?
        .par_iter()
        .map(|f| {
            (
                apply(OperatorTag::Lap6, &f.polynomial).max_abs() / sphere_norm(&f.polynomial),
                sym_str(f),
            )
        })
        .collect();
    Ok(vec![
        check("tree functions harmonic", tree, thr),
        check("symmetrized functions harmonic", sym, thr),
    ])
}

fn generators() -> Vec<OperatorTag> {
    let mut v = vec![OperatorTag::N];
    for i in 1..=3 {
        for k in 1..=3 {
            v.extend([
                OperatorTag::A(i, k),
                OperatorTag::L(i, k),
                OperatorTag::B(i, k),
            ]);
        }
    }
    v
}

type Combination = Vec<(Complex64, OperatorTag)>;

pub fn commutators(degree: i32, tol: Option<f64>) -> Result<Vec<Check>> {
    let thr = tol.unwrap_or(1e-11);
    let basis: Vec<(Polynomial6, String)> = (0..=degree as u32)
        .flat_map(monomials_of_degree)
        .map(|m| (Polynomial6::monomial(m, re(1.0)), format!("{m:?}")))
        .collect();
    let gens = generators();
    let pairs: Vec<(OperatorTag, OperatorTag, Combination)> = gens
        .iter()
        .flat_map(|&a| gens.iter().map(move |&b| (a, b)))
        .filter_map(|(a, b)| structure_constants(a, b).map(|rhs| (a, b, rhs)))
        .collect();
    let relations: Vec<(f64, String)> = pairs
        .par_iter()
        .flat_map_iter(|(a, b, rhs)| {
            basis.iter().map(move |(f, name)| {
                let r = commutator(*a, *b, f)
                    .sub(&apply_combination(rhs, f))
                    .max_abs();
                (r, format!("[{a:?}, {b:?}] on {name}"))
            })
        })
        .collect();
    let mut scalar_pairs: Vec<(OperatorTag, OperatorTag)> =
        gens.iter().map(|&g| (OperatorTag::Lap6, g)).collect();
    for (i, k) in [(1, 2), (1, 3), (2, 3)] {
        scalar_pairs.push((OperatorTag::L2, OperatorTag::L(i, k)));
        scalar_pairs.push((OperatorTag::Omega, OperatorTag::L(i, k)));
    }
    scalar_pairs.extend([
        (OperatorTag::N, OperatorTag::Omega),
        (OperatorTag::N, OperatorTag::L2),
        (OperatorTag::L3, OperatorTag::L2),
        (OperatorTag::L3, OperatorTag::Omega),
    ]);
    let invariants: Vec<(f64, String)> = scalar_pairs
        .par_iter()
        .flat_map_iter(|(a, b)| {
            basis.iter().map(move |(f, name)| {
                (
                    commutator(*a, *b, f).max_abs(),
                    format!("[{a:?}, {b:?}] on {name}"),
                )
            })
        })
        .collect();
    Ok(vec![
        check("structure relations", relations, thr),
        check("invariant operators commute", invariants, thr),
    ])
}

pub fn orthonormality(k_max: i32, tol: Option<f64>) -> Result<Vec<Check>> {
    let thr = tol.unwrap_or(1e-10);
    let sectors: Vec<(i32, i32, i32)> = (0..=k_max)
        .flat_map(|k| (0..=k).flat_map(move |j| (-j..=j).map(move |m| (k, j, m))))
        .collect();
    let tree: Vec<(f64, String)> = sectors
        .par_iter()
        .map(|&(k, j, m)| {
            let fs: Vec<(TreeLabel, Polynomial6)> = admissible_pairs(k, j)
                .into_iter()
                .map(|(j1, j2)| {
                    let l = TreeLabel::new(k, j1, j2, j, m)?;
                    Ok((l, tree_function(&l)?))
                })
                .collect::<Result<_>>()?;
            let mut worst = (0.0, format!("K={k} J={j} M={m}"));
            for (a, (la, fa)) in fs.iter().enumerate() {
                for (b, (lb, fb)) in fs.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    let r = (inner_product(fa, fb) - want).norm();
                    if r > worst.0 {
                        worst = (r, format!("<{}|{}>", tree_str(la), tree_str(lb)));
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut blocks: BTreeMap<(i32, i32, i32, i32), Vec<SymFunction>> = BTreeMap::new();
    for f in sweep_all(k_max)? {
        blocks
            .entry((f.label.k, f.label.j, f.label.m, f.label.two_nu))
            .or_default()
            .push(f);
    }
    let sym: Vec<(f64, String)> = blocks
        .par_iter()
        .map(|(_, fs)| {
            let mut worst = (0.0, sym_str(&fs[0]));
            for (a, fa) in fs.iter().enumerate() {
                for (b, fb) in fs.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    let r = (inner_product(&fa.polynomial, &fb.polynomial) - want).norm();
                    if r > worst.0 {
                        worst = (r, format!("<{}|{}>", sym_str(fa), sym_str(fb)));
                    }
                }
            }
            worst
        })
        .collect();
    Ok(vec![
        check("tree Gram matrix is identity", tree, thr),
        check("block eigenfunctions orthonormal", sym, thr),
    ])
}

fn matrix_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

/// Largest deviation between the substituted polynomial `f(e^{iφ}z)` and
/// the expansion given by the rotation coefficients.
fn substitution_residual(l: &TreeLabel, phi: f64) -> Result<f64> {
    let direct = rotate_argument(&tree_function(l)?, phi);
    let mut expanded = Polynomial6::zero();
    for (lp, c) in rotate_tree(l, phi)? {
        expanded.add_scaled(&tree_function(&lp)?, re(c));
    }
    Ok(direct.sub(&expanded).max_abs())
}

/// One complex constant per `K` relating the closed-form `J = 0` expansion
/// to the exact projection, and the relative residual after the fit.
pub fn j0_fit(k: i32) -> Result<(Complex64, f64)> {
    let mut pairs = Vec::new();
    for j in 0..=k / 2 {
        let f = j0_expansion_coeffs(k, j)?;
        let p = j0_projection_coeffs(k, j)?;
        pairs.extend(f.into_iter().zip(p).map(|((_, a), (_, b))| (a, b)));
    }
    let num: Complex64 = pairs.iter().map(|(f, p)| f.conj() * p).sum();
    let den: f64 = pairs.iter().map(|(f, _)| f.norm_sqr()).sum();
    let c = num / den;
    let scale = pairs.iter().map(|(_, p)| p.norm()).fold(0.0, f64::max);
    let resid = pairs
        .iter()
        .map(|(f, p)| (p - c * f).norm())
        .fold(0.0, f64::max)
        / scale;
    Ok((c, resid))
}

pub fn transform(k_max: i32, tol: Option<f64>) -> Result<(Vec<Check>, Vec<FittedConstant>)> {
    let sectors: Vec<(i32, i32)> = (0..=k_max)
        .flat_map(|k| (0..=k).map(move |j| (k, j)))
        .filter(|&(k, j)| !admissible_pairs(k, j).is_empty())
        .collect();
    let angles = [0.3, FRAC_PI_4, 1.2];
    let forms: Vec<(f64, String)> = sectors
        .par_iter()
        .flat_map_iter(|&(k, j)| angles.iter().map(move |&phi| (k, j, phi)))
        .map(|(k, j, phi)| {
            let ov = rotation_coefficient(k, j, 0, phi, CoeffForm::Overlap)?;
            let ja = rotation_coefficient(k, j, 0, phi, CoeffForm::Jacobi)?;
            let df = rotation_coefficient(k, j, 0, phi, CoeffForm::DFunction)?;
            let r = matrix_diff(&ja.matrix, &df.matrix).max(matrix_diff(&ja.matrix, &ov.matrix));
            Ok((r, format!("K={k} J={j} phi={phi}")))
        })
        .collect::<Result<_>>()?;
    let orth: Vec<(f64, String)> = sectors
        .par_iter()
        .map(|&(k, j)| {
            let rc = rotation_coefficient(k, j, 0, 0.9, CoeffForm::Jacobi)?;
            Ok((rc.orthogonality_defect(), format!("K={k} J={j}")))
        })
        .collect::<Result<_>>()?;
    let labels: Vec<TreeLabel> = (0..=k_max)
        .flat_map(enumerate_tree_basis)
        .filter(|l| l.m == l.j)
        .collect();
    let subst = |pred: &(dyn Fn(&TreeLabel) -> bool + Sync)| -> Result<Vec<(f64, String)>> {
        labels
            .par_iter()
            .filter(|l| pred(l))
            .map(|l| Ok((substitution_residual(l, 0.3)?, tree_str(l))))
            .collect()
    };
    let k1 = subst(&|l| l.k == 1)?;
    let all = subst(&|l| l.k != 1)?;
    let mut constants = Vec::new();
    let mut j0 = Vec::new();
    for k in (0..=k_max).step_by(2) {
        let (c, r) = j0_fit(k)?;
        constants.push(FittedConstant {
            k,
            re: c.re,
            im: c.im,
        });
        j0.push((r, format!("K={k}")));
    }
    let mut checks = vec![
        check("closed forms agree", forms, tol.unwrap_or(1e-10)),
        check("matrices orthogonal", orth, tol.unwrap_or(1e-10)),
        check("K=1 substitution oracle", k1, tol.unwrap_or(1e-12)),
        check("substitution oracle", all, tol.unwrap_or(1e-10)),
    ];
    checks.push(check(
        "J=0 coefficients proportional to projection",
        j0,
        tol.unwrap_or(1e-8),
    ));
    Ok((checks, constants))
}

/// Largest relative deviation of `op f` from `value · f`.
fn eigen_defect(op: OperatorTag, f: &Polynomial6, value: Complex64) -> f64 {
    apply(op, f).sub(&f.scale(value)).max_abs() / f.max_abs()
}

fn five_operator_defect(f: &SymFunction) -> f64 {
    let l = f.label;
    let checks = [
        (OperatorTag::Lap6, re(0.0)),
        (OperatorTag::L2, re(-f64::from(l.j * (l.j + 1)))),
        (OperatorTag::L3, re(-f64::from(l.m))),
        (OperatorTag::N, re(f64::from(l.two_nu) / 2.0)),
        // Ω' = iΩ has eigenvalue `omega`, so Ω has -i·omega.
        (OperatorTag::Omega, Complex64::new(0.0, -f.omega)),
    ];
    checks
        .iter()
        .map(|&(op, v)| eigen_defect(op, &f.polynomial, v))
        .fold(0.0, f64::max)
}

pub fn omega(k_max: i32, tol: Option<f64>) -> Result<Vec<Check>> {
    let mut eigen = Vec::new();
    let mut counts = Vec::new();
    let mut ranks = Vec::new();
    let mut simple = Vec::new();
    let mut table = Vec::new();
    for k in 0..=k_max {
        let fs = block_sweep(k)?;
        eigen.extend(
            fs.par_iter()
                .map(|f| (five_operator_defect(f), sym_str(f)))
                .collect::<Vec<_>>(),
        );
        counts.push((
            (fs.len() as i64 - degeneracy_total(k)).abs() as f64,
            format!("K={k}: {} functions", fs.len()),
        ));
        let mut per_block: BTreeMap<(i32, i32, i32), i64> = BTreeMap::new();
        for f in &fs {
            *per_block
                .entry((f.label.j, f.label.m, f.label.two_nu))
                .or_default() += 1;
        }
        for ((j, m, t), n) in &per_block {
            let want = block_dimension(k, *j, *t);
            let what = format!(
                "K={k} J={j} M={m} nu={}: {n} functions, expected {want}",
                nu_str(*t)
            );
            ranks.push(((n - want).abs() as f64, what.clone()));
            if k < 4 {
                simple.push(((n - 1).max(0) as f64, what));
            }
        }
        if k == 1 {
            for f in &fs {
                let l = f.label;
                let want_omega = 0.75 * f64::from(l.two_nu.signum());
                let d = five_operator_defect(f).max((f.omega - want_omega).abs());
                let d = if l.two_nu.abs() == 1 && l.j == 1 {
                    d
                } else {
                    f64::INFINITY
                };
                table.push((d, sym_str(f)));
            }
        }
    }
    let mut checks = vec![
        check("simultaneous eigenfunctions", eigen, tol.unwrap_or(1e-9)),
        check("function count equals n(K)", counts, 0.0),
        check("block ranks match weight count", ranks, 0.0),
    ];
    if k_max >= 0 {
        checks.push(check("blocks with K<4 are one-dimensional", simple, 0.0));
    }
    if k_max >= 1 {
        checks.push(check("K=1 multiplet table", table, tol.unwrap_or(1e-12)));
    }
    Ok(checks)
}

fn free_reference_state() -> DynState {
    DynState {
        a: 0.7,
        lambda: 0.4,
        phi1: 0.3,
        theta: 1.1,
        phi2: -0.5,
        rho: 1.2,
        da: 0.05,
        dlambda: -0.04,
        dphi1: 0.03,
        dtheta: 0.02,
        dphi2: -0.03,
        drho: 0.01,
    }
}

/// Equilateral Newtonian state at hyperradius `rho` rotating with `ψ̇`.
pub fn kepler_state(rho: f64, psi_dot: f64) -> DynState {
    DynState {
        a: 0.0,
        lambda: 0.0,
        phi1: 0.0,
        theta: 0.0,
        phi2: 0.0,
        rho,
        da: 0.0,
        dlambda: 0.0,
        dphi1: psi_dot,
        dtheta: 0.0,
        dphi2: 0.0,
        drho: 0.0,
    }
}

fn rel(x: f64, x0: f64) -> f64 {
    (x - x0).abs() / x0.abs().max(f64::MIN_POSITIVE)
}

pub fn dynamics(tol: f64) -> Result<Vec<Check>> {
    let s = free_reference_state();
    let free = integrate(&s, &Model::free(), 100.0, tol, 200)?;
    let o0 = observables(&s, &PotentialSpec::Free)?;
    let mut energy = Vec::new();
    let mut ang = Vec::new();
    let mut omega = Vec::new();
    for (t, st) in &free.samples {
        let o = observables(st, &PotentialSpec::Free)?;
        energy.push((rel(o.energy, o0.energy), format!("t={t}")));
        ang.push((
            rel(o.angular_momentum_norm(), o0.angular_momentum_norm()),
            format!("t={t}"),
        ));
        omega.push((rel(o.omega, o0.omega), format!("t={t}")));
    }
    if let Some(ev) = &free.event {
        energy.push((f64::INFINITY, format!("stopped early: {ev:?}")));
    }
    let (z0, v0) = z_and_velocity(&s);
    let line = integrate(&s, &Model::free(), 20.0, tol, 100)?;
    let mut cart: Vec<(f64, String)> = line
        .samples
        .iter()
        .map(|(t, st)| {
            let z = z_and_velocity(st).0;
            let d = (0..3)
                .map(|k| (z[k] - z0[k] - v0[k] * *t).norm())
                .fold(0.0, f64::max);
            (d, format!("t={t}"))
        })
        .collect();
    if line.event.is_some() {
        cart.push((f64::INFINITY, "stopped early".to_string()));
    }
    let period = 2.0 * PI / 3f64.sqrt();
    let circ = integrate(
        &kepler_state(1.0, 3f64.sqrt()),
        &Model::kepler(),
        10.0 * period,
        tol,
        400,
    )?;
    let drift: Vec<(f64, String)> = circ
        .samples
        .iter()
        .map(|(t, st)| ((st.rho - 1.0).abs(), format!("t={t}")))
        .collect();
    let mom: Vec<(f64, String)> = circ
        .samples
        .iter()
        .map(|(t, st)| {
            (
                (st.rho * st.rho * kepler_psi_dot(st) - 3f64.sqrt()).abs(),
                format!("t={t}"),
            )
        })
        .collect();
    let ell = integrate(&kepler_state(1.0, 1.5), &Model::kepler(), 10.0, tol, 300)?;
    let pts: Vec<(f64, f64)> = ell
        .samples
        .iter()
        .map(|(_, st)| (st.rho, st.phi1 + 0.5 * st.lambda))
        .collect();
    let conic = match focal_conic_fit(&pts) {
        Some((_, r)) => vec![(r, "elliptic orbit rho=1, psi_dot=1.5".to_string())],
        None => vec![(f64::INFINITY, "fit failed".to_string())],
    };
    let rho0 = 1.3;
    let eq = DynState {
        a: PI,
        lambda: 0.0,
        rho: rho0,
        ..kepler_state(rho0, 0.0)
    };
    let eq = DynState {
        phi1: 0.2,
        theta: 0.9,
        phi2: 0.1,
        ..eq
    };
    let acc = eom_potential(&eq, &PotentialSpec::Harmonic { rho0 })?;
    let fixed = vec![(
        acc.iter().map(|x| x.abs()).fold(0.0, f64::max),
        "a=pi, lambda=0, rho=rho0".to_string(),
    )];
    Ok(vec![
        check("free energy conserved", energy, 100.0 * tol),
        check("free |L| conserved", ang, 100.0 * tol),
        check("classical Omega conserved", omega, 100.0 * tol),
        check("Cartesian straight-line oracle", cart, 1e-6),
        check("Kepler circular radius drift", drift, 1e-6),
        check("Kepler rho^2 psi_dot conserved", mom, 1e-9),
        check("elliptic conic fit", conic, 1e-6),
        check("harmonic equilibrium fixed point", fixed, 1e-12),
    ])
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Harmonicity => "harmonicity",
        Suite::Commutators => "commutators",
        Suite::Orthonormality => "orthonormality",
        Suite::Transform => "transform",
        Suite::Omega => "omega",
        Suite::Dynamics => "dynamics",
    }
}

pub fn run(args: &Args, cfg: &Config) -> Result<u8> {
    let k_max = args.k_max.or(cfg.k_max).unwrap_or(match args.suite {
        Suite::Harmonicity => 6,
        _ => 4,
    });
    check_k(k_max, cfg)?;
    let tol = args.tol.or(cfg.tol);
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return usage(format!("--tol must be finite and non-negative, got {t}"));
        }
    }
    let start = Instant::now();
    let mut constants = Vec::new();
    let checks = match args.suite {
        Suite::Harmonicity => harmonicity(k_max, tol)?,
        Suite::Commutators => commutators(k_max, tol)?,
        Suite::Orthonormality => orthonormality(k_max, tol)?,
        Suite::Transform => {
            let (c, k) = transform(k_max, tol)?;
            constants = k;
            c
        }
        Suite::Omega => omega(k_max, tol)?,
        Suite::Dynamics => {
            let t = tol.unwrap_or(1e-10);
            if t <= 0.0 {
                return usage("the dynamics suite needs a positive integrator tolerance");
            }
            dynamics(t)?
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = Report {
        suite: suite_name(args.suite).to_string(),
        k_max,
        tol,
        passed,
        checks,
        constants,
    };
    emit(&to_json(&report)?, None)?;
    eprintln!(
        "verify {}: {:.3} s",
        report.suite,
        start.elapsed().as_secs_f64()
    );
    if !passed {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!(
                "violation: {} residual {:e} > {:e} at {}",
                c.name, c.residual, c.threshold, c.worst
            );
        }
    }
    Ok(u8::from(!passed))
}
