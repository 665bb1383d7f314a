use std::f64::consts::PI;

use cssplit::linalg::Combine;
use cssplit::spectral::*;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_field(b: &Basis1D, space: Space, rng: &mut StdRng) -> Field2D {
    let d = space.dim(b.degree());
    Field2D::new(b, space, DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0))).unwrap()
}

fn random_velocity(b: &Basis1D, rng: &mut StdRng) -> VelocityField {
    VelocityField::new(random_field(b, Space::Velocity, rng), random_field(b, Space::Velocity, rng)).unwrap()
}

fn initial_u(x: f64, y: f64) -> [f64; 2] {
    let s = |t: f64| (PI * t).sin();
    [(2.0 * PI * y).sin() * s(x).powi(2), -(2.0 * PI * x).sin() * s(y).powi(2)]
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

#[test]
fn quadrature_exact_on_monomials() {
    for n in [4, 9, 16] {
        let b = Basis1D::new(n).unwrap();
        let top = 2 * b.n_nodes() - 3;
        for p in 0..=top {
            let q: f64 = b.nodes().iter().zip(b.weights()).map(|(x, w)| w * x.powi(p as i32)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((q - exact).abs() <= 1e-12 * exact.max(1e-3), "n={n} p={p}: {q} vs {exact}");
        }
    }
}

#[test]
fn transform_roundtrip() {
    let mut rng = StdRng::seed_from_u64(1);
    for n in [3, 8, 17] {
        let b = Basis1D::new(n).unwrap();
        for space in [Space::Velocity, Space::Full] {
            let f = random_field(&b, space, &mut rng);
            let back = transform_to_coeffs(&b, &transform_to_nodes(&b, &f), space).unwrap();
            assert!(rel(back.coeffs(), f.coeffs()) < 1e-12, "n={n} {space:?}");
        }
    }
}

#[test]
fn bubble_node_values() {
    for n in [3, 6, 12] {
        let b = Basis1D::new(n).unwrap();
        let bubble = |x: f64, y: f64| (1.0 - x * x) * (1.0 - y * y);
        let f = Field2D::from_fn(&b, Space::Velocity, bubble);
        let g = transform_to_nodes(&b, &f);
        let x = b.nodes();
        for a in 0..x.len() {
            for c in 0..x.len() {
                assert!((g[(a, c)] - bubble(x[a], x[c])).abs() < 1e-12);
            }
        }
        assert!((f.eval(&b, 0.3, -0.7) - bubble(0.3, -0.7)).abs() < 1e-12);
    }
}

#[test]
fn curlcurl_of_bubble() {
    let b = Basis1D::new(8).unwrap();
    let u = VelocityField::new(
        Field2D::from_fn(&b, Space::Velocity, |x, y| (1.0 - x * x) * (1.0 - y * y)),
        Field2D::zeros(&b, Space::Velocity),
    )
    .unwrap();
    let (c1, c2) = curlcurl(&b, &u);
    for (x, y) in [(0.1, 0.2), (-0.9, 0.5), (0.77, -0.33)] {
        assert!((c1.eval(&b, x, y) - 2.0 * (1.0 - x * x)).abs() < 1e-12);
        assert!((c2.eval(&b, x, y) - 4.0 * x * y).abs() < 1e-12);
    }
}

#[test]
fn constant_pressure_has_zero_gradient() {
    let b = Basis1D::new(10).unwrap();
    let p = Field2D::from_fn(&b, Space::Full, |_, _| 3.5);
    let (gx, gy) = grad(&b, &p);
    assert!(gx.coeffs().amax() < 1e-13 && gy.coeffs().amax() < 1e-13);
}

#[test]
fn initial_field_is_discretely_divergence_free() {
    let b = Basis1D::new(32).unwrap();
    let u = VelocityField::from_fn(&b, initial_u);
    let d = div(&b, &u).l2_norm(&b);
    assert!(d <= 1e-10, "div = {d:e}");
    assert!(u.boundary_max(&b) <= 1e-11);
}

#[test]
fn adjointness() {
    let mut rng = StdRng::seed_from_u64(2);
    let b = Basis1D::new(14).unwrap();
    for _ in 0..5 {
        let p = random_field(&b, Space::Full, &mut rng);
        let u = random_velocity(&b, &mut rng);
        let (gx, gy) = grad(&b, &p);
        let lhs = gx.inner(u.u1(), &b) + gy.inner(u.u2(), &b);
        let rhs = -p.inner(&div(&b, &u), &b);
        assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn curlcurl_identity() {
    let mut rng = StdRng::seed_from_u64(3);
    let b = Basis1D::new(16).unwrap();
    let u = random_velocity(&b, &mut rng);
    let (c1, c2) = curlcurl(&b, &u);
    let (g1, g2) = grad(&b, &div(&b, &u));
    let l1 = laplacian(&b, u.u1());
    let l2 = laplacian(&b, u.u2());
    let scale = c1.coeffs().amax().max(c2.coeffs().amax());
    assert!((c1.coeffs() - (g1.coeffs() - l1.coeffs())).amax() <= 1e-11 * scale);
    assert!((c2.coeffs() - (g2.coeffs() - l2.coeffs())).amax() <= 1e-11 * scale);
}

#[test]
fn helmholtz_manufactured() {
    let b = Basis1D::new(10).unwrap();
    let exact = |x: f64, y: f64| (1.0 - x * x) * (1.0 - y * y);
    let rhs = Field2D::from_fn(&b, Space::Full, |x, y| exact(x, y) + 2.0 * (1.0 - x * x) + 2.0 * (1.0 - y * y));
    let u = helmholtz_solve(&b, 1.0, 1.0, &rhs).unwrap();
    let want = Field2D::from_fn(&b, Space::Velocity, exact);
    assert!((u.coeffs() - want.coeffs()).amax() < 1e-11);
    assert!(helmholtz_solve(&b, 1.0, 1.0, &Field2D::zeros(&b, Space::Full)).unwrap().coeffs().amax() == 0.0);
}

#[test]
fn helmholtz_random_residual() {
    let mut rng = StdRng::seed_from_u64(4);
    for n in [8, 32, 64] {
        let b = Basis1D::new(n).unwrap();
        for (alpha, diff) in [(1.0, 1.0), (7000.0, 0.005), (0.0, 2.0), (3.0, 0.0)] {
            let rhs = random_field(&b, Space::Full, &mut rng);
            let u = helmholtz_solve(&b, alpha, diff, &rhs).unwrap();
            let load = galerkin_load(&b, &rhs);
            let applied = helmholtz_apply(&b, alpha, diff, &u);
            assert!(rel(&applied, &load) <= 1e-10, "n={n} alpha={alpha}: {:e}", rel(&applied, &load));
        }
    }
}

#[test]
fn solves_are_linear() {
    let mut rng = StdRng::seed_from_u64(5);
    let b = Basis1D::new(20).unwrap();
    let f = random_field(&b, Space::Full, &mut rng);
    let g = random_field(&b, Space::Full, &mut rng);
    let (s, t) = (1.7, -0.4);
    let mut fg = f.zero_like();
    fg.axpy(s, &f);
    fg.axpy(t, &g);
    let solve = |r: &Field2D| helmholtz_solve(&b, 2.0, 0.3, r).unwrap();
    let mut lin = solve(&f).zero_like();
    lin.axpy(s, &solve(&f));
    lin.axpy(t, &solve(&g));
    assert!((solve(&fg).coeffs() - lin.coeffs()).amax() <= 1e-11 * lin.coeffs().amax());

    let h = random_field(&b, Space::Full, &mut rng);
    let k = random_field(&b, Space::Full, &mut rng);
    let pp = |a: &Field2D, c: &Field2D| pressure_poisson(&b, (a, c)).unwrap().into_field();
    let mut f2 = f.zero_like();
    f2.axpy(s, &h);
    f2.axpy(t, &k);
    let mut lin = pp(&f, &h).zero_like();
    lin.axpy(s, &pp(&f, &h));
    lin.axpy(t, &pp(&g, &k));
    assert!((pp(&fg, &f2).coeffs() - lin.coeffs()).amax() <= 1e-11 * lin.coeffs().amax().max(1.0));
}

#[test]
fn poisson_recovers_potential() {
    let b = Basis1D::new(12).unwrap();
    let gx = Field2D::from_fn(&b, Space::Full, |x, _| 2.0 * x);
    let gy = Field2D::from_fn(&b, Space::Full, |_, y| 2.0 * y);
    let p = pressure_poisson(&b, (&gx, &gy)).unwrap();
    let want = Field2D::from_fn(&b, Space::Full, |x, y| x * x + y * y - 2.0 / 3.0);
    assert!((p.field().coeffs() - want.coeffs()).amax() < 1e-12);
    assert!(pressure_residual(&b, &p, (&gx, &gy)).amax() <= 1e-10);
    let z = Field2D::zeros(&b, Space::Full);
    assert_eq!(pressure_poisson(&b, (&z, &z)).unwrap().field().coeffs().amax(), 0.0);
}

#[test]
fn poisson_rotational_field_is_orthogonal() {
    for n in [12, 64] {
        let b = Basis1D::new(n).unwrap();
        let chi = |x: f64, y: f64| (1.0 + x * x) * (2.0 - y);
        let gx = Field2D::from_fn(&b, Space::Full, |x, y| -y * chi(x, y));
        let gy = Field2D::from_fn(&b, Space::Full, |x, y| x * chi(x, y));
        let p = pressure_poisson(&b, (&gx, &gy)).unwrap();
        let r = pressure_residual(&b, &p, (&gx, &gy));
        assert!(r.amax() <= 1e-10, "n={n}: {:e}", r.amax());
        let norm = p.field().l2_norm(&b);
        assert!((4.0 * p.field().mean(&b)).abs() <= 1e-11 * norm);
    }
}

#[test]
fn poisson_random_residual() {
    let mut rng = StdRng::seed_from_u64(6);
    for n in [8, 32, 64] {
        let b = Basis1D::new(n).unwrap();
        let gx = random_field(&b, Space::Full, &mut rng);
        let gy = random_field(&b, Space::Full, &mut rng);
        let p = pressure_poisson(&b, (&gx, &gy)).unwrap();
        let load = pressure_load(&b, (&gx, &gy));
        let r = pressure_residual(&b, &p, (&gx, &gy));
        assert!(r.amax() <= 1e-10 * load.amax(), "n={n}: {:e}", r.amax() / load.amax());
    }
}

#[test]
fn nonlinear_trivial_cases() {
    let b = Basis1D::new(8).unwrap();
    let (n1, n2) = nonlinear_term(&b, &VelocityField::zeros(&b));
    assert_eq!(n1.coeffs().amax() + n2.coeffs().amax(), 0.0);
    let mut c1 = DMatrix::zeros(9, 9);
    let mut c2 = DMatrix::zeros(9, 9);
    c1[(0, 0)] = 1.5;
    c2[(0, 0)] = -0.5;
    let (n1, n2) = advect_legendre(&b, &c1, &c2);
    assert!(n1.amax() < 1e-14 && n2.amax() < 1e-14);
}

/// Sixth-order periodic central difference; the initial field has period 1.
fn fd6(f: &DMatrix<f64>, h: f64, along_x: bool) -> DMatrix<f64> {
    let n = f.nrows();
    let c = [(1, 45.0), (2, -9.0), (3, 1.0)];
    DMatrix::from_fn(n, n, |i, j| {
        let at = |o: isize| {
            let k = (((if along_x { i } else { j }) as isize + o).rem_euclid(n as isize)) as usize;
            if along_x {
                f[(k, j)]
            } else {
                f[(i, k)]
            }
        };
        c.iter().map(|&(o, w)| w * (at(o) - at(-o))).sum::<f64>() / (60.0 * h)
    })
}

#[test]
fn nonlinear_matches_finite_differences() {
    let b = Basis1D::new(32).unwrap();
    let u = VelocityField::from_fn(&b, initial_u);
    let (n1, n2) = nonlinear_term(&b, &u);

    let m = 512;
    let h = 2.0 / m as f64;
    let xs: Vec<f64> = (0..m).map(|i| -1.0 + h * i as f64).collect();
    let u1 = DMatrix::from_fn(m, m, |i, j| initial_u(xs[i], xs[j])[0]);
    let u2 = DMatrix::from_fn(m, m, |i, j| initial_u(xs[i], xs[j])[1]);
    let fd1 = u1.component_mul(&fd6(&u1, h, true)) + u2.component_mul(&fd6(&u1, h, false));
    let fd2 = u1.component_mul(&fd6(&u2, h, true)) + u2.component_mul(&fd6(&u2, h, false));

    let v = DMatrix::from_fn(m, 33, |i, j| legendre_values(32, xs[i])[j]);
    let s1 = &v * n1.coeffs() * v.transpose();
    let s2 = &v * n2.coeffs() * v.transpose();
    let err = (s1 - fd1).amax().max((s2 - fd2).amax());
    assert!(err <= 1e-6, "max deviation {err:e}");
}

#[test]
fn interpolation_error_decays_spectrally() {
    let fine = 120;
    let (xq, wq) = lgl_nodes_weights(fine);
    let errors: Vec<f64> = [8, 16, 24, 32]
        .iter()
        .map(|&n| {
            let b = Basis1D::new(n).unwrap();
            let u = VelocityField::from_fn(&b, initial_u);
            let v = DMatrix::from_fn(fine, n + 1, |a, j| legendre_values(n, xq[a])[j]);
            let g1 = &v * u.u1().to_legendre(&b) * v.transpose();
            let g2 = &v * u.u2().to_legendre(&b) * v.transpose();
            let mut e = 0.0;
            for a in 0..fine {
                for c in 0..fine {
                    let ex = initial_u(xq[a], xq[c]);
                    e += wq[a] * wq[c] * ((g1[(a, c)] - ex[0]).powi(2) + (g2[(a, c)] - ex[1]).powi(2));
                }
            }
            e.sqrt()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] > 10.0, "{errors:?}");
    }
}

#[test]
fn pressure_field_is_mean_zero() {
    let b = Basis1D::new(10).unwrap();
    let p = PressureField::from_fn(&b, |x, y| (PI * x).cos() * (PI * y).sin() + 3.0);
    assert!(p.field().mean(&b).abs() <= 1e-11 * p.field().l2_norm(&b));
}
