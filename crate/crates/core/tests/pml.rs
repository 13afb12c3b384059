use num_complex::Complex64 as C64;
use pmlbie::pml::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(m: u32) -> PmlParams {
    PmlParams::new(2.8, 2.2, 3.0, m, TopBc::Dirichlet).unwrap()
}

#[test]
fn sigma_values() {
    for m in [0, 1, 2, 4] {
        assert_eq!(params(m).sigma(2.0), 0.0);
        assert_eq!(params(m).sigma(3.0), 0.0);
    }
    assert_eq!(params(0).sigma(3.0 + 0.55), 1.0);
    assert!((params(2).sigma(3.0 + 0.55) - 1.0).abs() < 1e-15);
    assert!((params(2).sigma(3.0 + 1.1) - 2.0).abs() < 1e-15);
    assert_eq!(params(2).sigma(5.0), 2.0);
    // continuity at H
    assert!(params(3).sigma(3.0 + 1e-6) < 1e-12);
}

#[test]
fn rejects_bad_parameters() {
    assert!(PmlParams::new(0.0, 1.0, 3.0, 0, TopBc::Dirichlet).unwrap_err().is_config());
    assert!(PmlParams::new(1.0, -1.0, 3.0, 0, TopBc::Dirichlet).unwrap_err().is_config());
    assert!(PmlParams::new(f64::NAN, 1.0, 3.0, 0, TopBc::Dirichlet).is_err());
}

#[test]
fn complexified_height() {
    let p = params(0);
    assert_eq!(p.complexify_height(1.7), C64::new(1.7, 0.0));
    let top = p.complexify_height(5.2);
    assert!((top - C64::new(5.2, 2.8 * 2.2)).norm() < 1e-14);
    assert!((p.complex_thickness() - C64::new(2.2, 2.8 * 2.2)).norm() < 1e-14);
}

#[test]
fn m2_integral_matches_composite_simpson() {
    let p = params(2);
    let n = 20000;
    let (a, b) = (3.0, 5.2);
    let h = (b - a) / n as f64;
    let mut s = p.sigma(a) + p.sigma(b);
    for i in 1..n {
        s += p.sigma(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = s * h / 3.0;
    assert!((p.sigma_integral(5.2) - simpson).abs() < 1e-10);
    assert!((p.complexify_height(5.2).im - 2.8 * (1.1 + 2.0 * 1.1)).abs() < 1e-12);
}

#[test]
fn height_derivative_is_alpha() {
    for m in [0, 2, 3] {
        let p = params(m);
        for x in [3.3, 3.9, 4.4, 5.0] {
            let h = 1e-6;
            let fd = (p.complexify_height(x + h) - p.complexify_height(x - h)) / (2.0 * h);
            assert!((fd - p.alpha(x)).norm() < 1e-7, "m {m} x {x}");
        }
    }
}

#[test]
fn imaginary_part_is_monotone() {
    let p = params(2);
    let mut last = 0.0;
    for i in 0..=600 {
        let v = p.complexify_height(i as f64 * 0.01).im;
        assert!(v >= last);
        last = v;
    }
}

#[test]
fn coefficients() {
    let p = params(0);
    let (a, m) = p.pml_coefficients(1.0);
    assert_eq!(a, C64::new(1.0, 0.0));
    assert_eq!(m, [C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    let (a, m) = p.pml_coefficients(4.0);
    assert_eq!(a, C64::new(1.0, 2.8));
    assert!((m[1] * a - 1.0).norm() < 1e-15);
    assert!((a.norm_sqr() - (1.0 + 2.8f64 * 2.8)).abs() < 1e-14);
}

#[test]
fn branch_sqrt_examples() {
    assert_eq!(branch_sqrt(C64::new(4.0, 0.0)).unwrap(), C64::new(2.0, 0.0));
    let w = branch_sqrt(C64::new(0.0, 1.0)).unwrap();
    assert!((w - C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
    let w = branch_sqrt(C64::new(-4.0, 1e-300)).unwrap();
    assert!((w - C64::new(0.0, 2.0)).norm() < 1e-15);
    assert!(branch_sqrt(C64::new(-1.0, 0.0)).is_err());
    let w = branch_sqrt(C64::new(-3.0, -2.0)).unwrap();
    assert!(w.re >= 0.0 && (w * w - C64::new(-3.0, -2.0)).norm() < 1e-14);
}

#[test]
fn distance_examples() {
    let p = params(0);
    let x = p.point([0.2, 1.0]);
    let y = p.point([-0.4, 1.8]);
    assert!((complex_distance(x, y).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    let h = 0.37;
    let r = complex_distance(p.point([0.0, 3.0]), p.point([0.0, 3.0 + h])).unwrap();
    assert!((r - C64::new(h, h * 2.8)).norm() < 1e-14);
    assert!(matches!(complex_distance(x, x), Err(pmlbie::Error::Singular(_))));
}

#[test]
fn distance_sign_and_symmetry_on_random_pairs() {
    let p = params(0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..5.2)];
        let b = [rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..5.2)];
        let (x, y) = (p.point(a), p.point(b));
        let r = complex_distance(x, y).unwrap();
        assert_eq!(r, complex_distance(y, x).unwrap());
        assert!(r.re >= 0.0);
        if a[1] >= 3.0 && b[1] >= 3.0 {
            assert!(r.im >= 0.0);
        }
    }
}

#[test]
fn mirror_identity_near_the_top() {
    let p = params(0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = p.point([rng.gen_range(-0.5..0.5), 5.2]);
        let y = [rng.gen_range(-0.5..0.5), rng.gen_range(3.0..5.2)];
        let img = [y[0], 2.0 * 5.2 - y[1]];
        let (r1, r2) = (complex_distance(x, p.point(y)).unwrap(), complex_distance(x, p.point(img)).unwrap());
        assert!((r1 - r2).norm() <= 1e-13 * r1.norm().max(1.0));
    }
}
