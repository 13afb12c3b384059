mod oracle;

use num_complex::Complex64 as C64;
use pmlbie::geometry::{build_surface, mesh_cell, BoundaryMesh, CellSpec, Defect, Point, Profile};
use pmlbie::kernels::*;
use pmlbie::pml::{PmlParams, TopBc};
use pmlbie::quadrature::AlpertRule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

fn pml() -> PmlParams {
    PmlParams::new(2.8, 2.2, 3.0, 0, TopBc::Dirichlet).unwrap()
}

/// (A(y)ν)·∇_y G̃ by central differences in the real coordinates of y.
fn fd_conormal(p: &PmlParams, x: Point, y: Point, nu: Point, k: f64, h: f64) -> C64 {
    let g = |y: Point| green(p.point(x), p.point(y), k).unwrap();
    let d1 = (g([y[0] + h, y[1]]) - g([y[0] - h, y[1]])) / (2.0 * h);
    let d2 = (g([y[0], y[1] + h]) - g([y[0], y[1] - h])) / (2.0 * h);
    let a = p.alpha(y[1]);
    a * nu[0] * d1 + nu[1] / a * d2
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Point, Point, Point) {
    loop {
        let x: Point = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..5.2)];
        let y: Point = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..5.2)];
        let far_from_kink = (y[1] - 3.0).abs() > 1e-3;
        if (x[0] - y[0]).hypot(x[1] - y[1]) > 0.1 && far_from_kink {
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            return (x, y, [a.cos(), a.sin()]);
        }
    }
}

#[test]
fn green_reduces_to_free_space() {
    let p = pml();
    let r: f64 = 0.8;
    let g = green(p.point([0.1, 0.2]), p.point([0.1, 1.0]), 5.0).unwrap();
    let z = C64::new(5.0 * r, 0.0);
    let o = oracle::reference(z);
    let exact = 0.25 * I * o.h0_scaled * (I * z).exp();
    assert!((g - exact).norm() < 1e-14);
}

#[test]
fn green_is_symmetric() {
    let p = pml();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let (x, y, _) = random_pair(&mut rng);
        let (a, b) = (p.point(x), p.point(y));
        assert_eq!(green(a, b, 6.0).unwrap(), green(b, a, 6.0).unwrap());
    }
}

#[test]
fn green_mirror_identity() {
    let p = pml();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x = p.point([rng.gen_range(-0.5..0.5), 5.2]);
        let y = [rng.gen_range(-0.5..0.5), rng.gen_range(3.0..5.2)];
        let img = [y[0], 10.4 - y[1]];
        let d = (green(x, p.point(y), 6.47).unwrap() - green(x, p.point(img), 6.47).unwrap()).norm();
        assert!(d <= 1e-13);
    }
}

#[test]
fn conormal_matches_finite_differences() {
    let p = pml();
    let k = 2.0 * PI * 1.03;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let (x, y, nu) = random_pair(&mut rng);
        let exact = green_conormal(p.point(x), p.point(y), nu, p.alpha(y[1]), k).unwrap();
        let fd = fd_conormal(&p, x, y, nu, k, 1e-5);
        assert!((exact - fd).norm() <= 1e-6 * exact.norm(), "x {x:?} y {y:?}");
    }
}

#[test]
fn conormal_physical_flat_normal_is_y2_derivative() {
    let p = pml();
    let (x, y) = ([0.3, 1.0], [-0.2, 0.0]);
    let k = 4.0;
    let r = (0.25f64 + 1.0).sqrt();
    let o = oracle::reference(C64::new(k * r, 0.0));
    let h1 = o.h1_scaled * (I * k * r).exp();
    // ∂/∂y₂ (i/4)H₀(k|x−y|) = (i/4)·k·H₁·(x₂−y₂)/r
    let exact = 0.25 * I * k * h1 * (x[1] - y[1]) / r;
    let v = green_conormal(p.point(x), p.point(y), [0.0, 1.0], p.alpha(0.0), k).unwrap();
    assert!((v - exact).norm() < 1e-14);
}

#[test]
fn laplace_conormal_matches_finite_differences() {
    let p = pml();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let (x, y, nu) = random_pair(&mut rng);
        let g = |y: Point| laplace_green(p.point(x), p.point(y)).unwrap();
        let h = 1e-5;
        let d1 = (g([y[0] + h, y[1]]) - g([y[0] - h, y[1]])) / (2.0 * h);
        let d2 = (g([y[0], y[1] + h]) - g([y[0], y[1] - h])) / (2.0 * h);
        let a = p.alpha(y[1]);
        let fd = a * nu[0] * d1 + nu[1] / a * d2;
        let v = laplace_conormal(p.point(x), p.point(y), nu, a).unwrap();
        assert!((v - fd).norm() <= 1e-6 * v.norm().max(1e-3));
    }
}

#[test]
fn laplace_conormal_vanishes_along_a_line() {
    let p = pml();
    for (x, y, nu) in [([0.1, 0.0], [0.7, 0.0], [0.0, -1.0]), ([0.5, 3.4], [0.5, 4.9], [1.0, 0.0]), ([0.5, 1.0], [0.5, 4.0], [1.0, 0.0])] {
        let v = laplace_conormal(p.point(x), p.point(y), nu, p.alpha(y[1])).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }
    assert!(laplace_conormal(p.point([0.0, 0.0]), p.point([0.0, 0.0]), [0.0, 1.0], C64::new(1.0, 0.0)).is_err());
}

struct CircleModes {
    s: C64,
    k: C64,
}

/// Single- and double-layer eigenvalues (with the factor 2) of mode n ∈ {0, 1} on a circle.
fn circle_modes(k: f64, r: f64, n: usize) -> CircleModes {
    let z = k * r;
    let o = oracle::reference(C64::new(z, 0.0));
    let back = (I * z).exp();
    let (h0, h1) = (o.h0_scaled * back, o.h1_scaled * back);
    let (j0, j1) = (o.j0, o.j1);
    let (jn, hn, djn, dhn) = if n == 0 { (j0, h0, -j1, -h1) } else { (j1, h1, j0 - j1 / z, h0 - h1 / z) };
    CircleModes { s: I * PI * r * jn * hn, k: 0.5 * I * PI * z * (jn * dhn + djn * hn) }
}

fn mode_errors(nodes: usize, k: f64, r: f64, n: usize) -> (f64, f64, f64) {
    let p = pml();
    let mesh = BoundaryMesh::circle([0.0, 1.5], r, nodes).unwrap();
    let lay = assemble_layers(&mesh, k, &p, &AlpertRule::log_order6()).unwrap();
    let ev = circle_modes(k, r, n);
    let phase = |j: usize| C64::from_polar(1.0, 2.0 * PI * (n * j) as f64 / nodes as f64);
    let (mut es, mut ek, mut e0) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..nodes {
        let mut sv = C64::new(0.0, 0.0);
        let mut kv = C64::new(0.0, 0.0);
        for j in 0..nodes {
            sv += lay.s_mat[(i, j)] * phase(j) * mesh.speeds[j];
            kv += lay.k_mat[(i, j)] * phase(j);
        }
        es = es.max((sv - ev.s * phase(i)).norm());
        ek = ek.max((kv - ev.k * phase(i)).norm());
        e0 = e0.max((lay.k0_one[i] + 1.0).norm());
    }
    (es / ev.s.norm(), ek / ev.k.norm(), e0)
}

#[test]
fn circle_single_and_double_layer_eigenvalues() {
    for n in [0, 1] {
        let (es, ek, e0) = mode_errors(128, 5.0, 0.7, n);
        assert!(es < 1e-9 && ek < 1e-9 && e0 < 1e-10, "mode {n}: {es:e} {ek:e} {e0:e}");
    }
}

#[test]
fn circle_quadrature_order() {
    for n in [0, 1] {
        let (a, _, _) = mode_errors(24, 5.0, 0.7, n);
        let (b, _, _) = mode_errors(48, 5.0, 0.7, n);
        assert!(a / b >= 32.0, "mode {n}: {a:e} -> {b:e}");
    }
}

#[test]
fn assembly_is_deterministic() {
    let p = pml();
    let curve = build_surface(&Profile::Sine { amplitude: 1.0, phase: PI, offset: 0.0 }, &Defect::None, 1.0).unwrap();
    let mesh = mesh_cell(&CellSpec::new(&curve, 0, &p).unwrap(), 16, 6).unwrap();
    let rule = AlpertRule::log_order6();
    let a = assemble_layers(&mesh, 6.47, &p, &rule).unwrap();
    let b = assemble_layers(&mesh, 6.47, &p, &rule).unwrap();
    assert!(a.s_mat == b.s_mat && a.k_mat == b.k_mat && a.k0_one == b.k0_one);
    assert!(a.s_mat.col_iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite())));
}

#[test]
fn assembly_rejects_bad_node_counts() {
    let p = pml();
    let rule = AlpertRule::log_order6();
    let small = BoundaryMesh::circle([0.0, 1.0], 0.5, 12).unwrap();
    assert!(assemble_layers(&small, 5.0, &p, &rule).unwrap_err().is_config());
    assert!(BoundaryMesh::circle([0.0, 1.0], 0.5, 13).is_err());
}
