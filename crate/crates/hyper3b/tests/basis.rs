use hyper3b::basis::*;
use hyper3b::kinematics::{reconstruct, FrameOrientation, ShapeState};
use hyper3b::polyops::*;
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn trivial_norm_and_symmetry() {
    assert!((tree_norm(0, 0, 0).unwrap() - 4.0 / PI.sqrt()).abs() < 1e-14);
    for k in 0..=8 {
        for j1 in 0..=k {
            for j2 in 0..=(k - j1) {
                if (k - j1 - j2) % 2 == 0 {
                    let a = tree_norm(k, j1, j2).unwrap();
                    let b = tree_norm(k, j2, j1).unwrap();
                    assert!((a - b).abs() < 1e-12 * a);
                }
            }
        }
    }
}

/// `∫_0^{π/2} cos²Φ sin²Φ dΦ = π/16` by midpoint quadrature.
#[test]
fn weight_integral_oracle() {
    let n = 20000;
    let h = PI / 2.0 / f64::from(n);
    let s: f64 = (0..n)
        .map(|i| {
            let t = (f64::from(i) + 0.5) * h;
            (t.cos() * t.sin()).powi(2)
        })
        .sum::<f64>()
        * h;
    assert!((s - PI / 16.0).abs() < 1e-9);
    let n0 = tree_norm(0, 0, 0).unwrap();
    // The constant tree function has value N/(4π) on the sphere.
    let t0 = tree_function(&TreeLabel::new(0, 0, 0, 0, 0).unwrap()).unwrap();
    assert!((t0.coeff(&[0; 6]).re - n0 / (4.0 * PI)).abs() < 1e-14);
    assert!((inner_product(&t0, &t0).re - 1.0).abs() < 1e-12);
}

#[test]
fn counts_match_degeneracy_formulas() {
    let expected = [1, 6, 20, 50, 105, 196, 336];
    for k in 0..=8 {
        let n = enumerate_tree_basis(k).len() as i64;
        assert_eq!(n, degeneracy_total(k));
        assert_eq!(n, harmonic_dimension(k));
        let s: i64 = (-k..=k).map(|t| degeneracy(k, t)).sum();
        assert_eq!(s, n);
        if (k as usize) < expected.len() {
            assert_eq!(n, expected[k as usize]);
        }
    }
    assert_eq!(degeneracy(1, 1), 3);
    assert_eq!(degeneracy(2, 1), 0);
    assert_eq!(degeneracy_max(4), 27);
    assert_eq!(degeneracy_max(3), 15);
}

/// Rank of the Laplacian on degree-K monomials: harmonic dimension as a
/// kernel dimension, via the surjectivity of Lap6 onto degree K-2.
#[test]
fn harmonic_dimension_by_monomial_count() {
    for k in 0..=6u32 {
        let dk = monomials_of_degree(k).len() as i64;
        let dk2 = if k >= 2 {
            monomials_of_degree(k - 2).len() as i64
        } else {
            0
        };
        assert_eq!(dk - dk2, harmonic_dimension(k as i32));
    }
}

#[test]
fn tree_functions_are_harmonic_eigenfunctions() {
    for k in 0..=4 {
        for l in enumerate_tree_basis(k) {
            let f = tree_function(&l).unwrap();
            assert_eq!(f.homogeneous_degree().unwrap_or(0), k as u32);
            let scale = f.max_abs();
            assert!(
                apply(OperatorTag::Lap6, &f).max_abs() <= 1e-10 * scale,
                "{l:?}"
            );
            let jj = f64::from(l.j * (l.j + 1));
            assert!(apply(OperatorTag::L2, &f).add(&f.scale_re(jj)).max_abs() <= 1e-10 * scale);
            assert!(
                apply(OperatorTag::L3, &f)
                    .add(&f.scale_re(f64::from(l.m)))
                    .max_abs()
                    <= 1e-10 * scale
            );
        }
    }
}

#[test]
fn tree_basis_is_orthonormal() {
    for k in 0..=4 {
        let labels = enumerate_tree_basis(k);
        let fs: Vec<_> = labels.iter().map(|l| tree_function(l).unwrap()).collect();
        for (a, fa) in fs.iter().enumerate() {
            for (b, fb) in fs.iter().enumerate() {
                let g = inner_product(fa, fb);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (g - c(want)).norm() < 1e-12,
                    "{:?} {:?} {g}",
                    labels[a],
                    labels[b]
                );
            }
        }
    }
}

#[test]
fn k1_tree_is_solid_harmonic_of_xi() {
    for m in -1..=1 {
        let f = tree_function_real(&TreeLabel::new(1, 1, 0, 1, m).unwrap()).unwrap();
        let want =
            solid_harmonic(1, m, 0).scale_re(tree_norm(1, 1, 0).unwrap() / (4.0 * PI).sqrt());
        assert!(f.sub(&want).max_abs() < 1e-14);
    }
}

#[test]
fn k2_scalar_tree_is_proportional_to_xi_dot_eta() {
    let f = tree_function(&TreeLabel::new(2, 1, 1, 0, 0).unwrap()).unwrap();
    let mut zz = Polynomial6::zero();
    let mut ww = Polynomial6::zero();
    for k in 0..3 {
        zz.add_assign(&Polynomial6::var(k).pow(2));
        ww.add_assign(&Polynomial6::var(k + 3).pow(2));
    }
    let xe = zz.sub(&ww).scale(Complex64::new(0.0, -0.25));
    let ratio = f.coeff(&[2, 0, 0, 0, 0, 0]) / xe.coeff(&[2, 0, 0, 0, 0, 0]);
    assert!(f.sub(&xe.scale(ratio)).max_abs() < 1e-14);
}

#[test]
fn j0_harmonic_polynomial_matches_closed_form() {
    let samples = [
        (0.1, 0.2, 0.3, 1.0, -0.5),
        (1.3, 0.9, -0.7, 2.0, 0.4),
        (2.5, 1.4, 0.0, 0.5, 1.1),
    ];
    for k in [0, 2, 4, 6] {
        for nu in j0_nus(k) {
            let p = j0_harmonic_poly(k, nu).unwrap();
            assert!(apply(OperatorTag::Lap6, &p).max_abs() < 1e-10 * p.max_abs());
            assert!(
                apply(OperatorTag::N, &p)
                    .sub(&p.scale_re(f64::from(nu)))
                    .max_abs()
                    < 1e-12
            );
            assert!(apply(OperatorTag::L2, &p).max_abs() < 1e-10 * p.max_abs());
            for &(lambda, a, p1, th, p2) in &samples {
                let z = reconstruct(
                    &ShapeState {
                        rho: 1.0,
                        lambda,
                        a,
                    },
                    &FrameOrientation {
                        phi1: p1,
                        theta: th,
                        phi2: p2,
                    },
                );
                let want = j0_harmonic(k, nu, lambda, a).unwrap();
                assert!((p.evaluate(&z.z) - want).norm() < 1e-12);
            }
        }
    }
    assert_eq!(j0_nus(2), vec![-1, 1]);
    assert_eq!(j0_nus(6), vec![-3, -1, 1, 3]);
}

#[test]
fn j0_closed_form_is_proportional_to_projection() {
    for k in [0, 2, 4, 6] {
        let mut ratio: Option<Complex64> = None;
        for j in 0..=k / 2 {
            let proj = j0_projection_coeffs(k, j).unwrap();
            let formula = j0_expansion_coeffs(k, j).unwrap();
            for ((nu, p), (_, f)) in proj.iter().zip(&formula) {
                if f.norm() < 1e-14 {
                    assert!(p.norm() < 1e-12, "K={k} j={j} nu={nu}");
                    continue;
                }
                let r = p / f;
                match ratio {
                    None => ratio = Some(r),
                    Some(r0) => assert!(
                        (r - r0).norm() < 1e-8 * r0.norm(),
                        "K={k} j={j} nu={nu}: {r} vs {r0}"
                    ),
                }
            }
        }
    }
}

#[test]
fn j0_coefficients_reflect_in_nu() {
    for k in [2, 4, 6] {
        for j in 0..=k / 2 {
            let cs = j0_expansion_coeffs(k, j).unwrap();
            for (nu, cv) in &cs {
                let (_, cm) = cs.iter().find(|(n, _)| *n == -nu).unwrap();
                assert!((cv.norm() - cm.norm()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn block_dimensions_add_up() {
    for k in 0..=8 {
        let mut total = 0;
        for two_nu in (-k..=k).step_by(2) {
            let sector: i64 = (0..=k)
                .map(|j| (2 * i64::from(j) + 1) * block_dimension(k, j, two_nu))
                .sum();
            assert_eq!(sector, degeneracy(k, two_nu), "K={k} 2nu={two_nu}");
            total += sector;
        }
        assert_eq!(total, degeneracy_total(k));
    }
    for k in 0..4 {
        for j in 0..=k {
            for two_nu in (-k..=k).step_by(2) {
                assert!(block_dimension(k, j, two_nu) <= 1);
            }
        }
    }
    assert_eq!(block_dimension(4, 2, 0), 2);
    assert_eq!(block_dimension(1, 1, 1), 1);
    assert_eq!(block_dimension(1, 0, 1), 0);
}
