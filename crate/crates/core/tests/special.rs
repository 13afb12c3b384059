mod oracle;

use num_complex::Complex64 as C64;
use pmlbie::special::*;
use std::f64::consts::PI;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn oracle_at_one() {
    let r = oracle::reference(C64::new(1.0, 0.0));
    // J0(1), Y0(1)
    assert!((r.j0.re - 0.765_197_686_557_966_6).abs() < 1e-15);
    let h0 = r.h0_scaled * C64::new(0.0, 1.0).exp();
    assert!((h0.im - 0.088_256_964_215_676_96).abs() < 1e-15, "{h0}");
}

#[test]
fn value_at_one() {
    let h = hankel1_0_1(C64::new(1.0, 0.0)).unwrap();
    assert!((h.h0 - C64::new(0.765_197_686_557_966_6, 0.088_256_964_215_676_96)).norm() < 1e-14);
}

#[test]
fn matches_multiprecision_oracle_on_sector_grid() {
    let mut worst: f64 = 0.0;
    for z in oracle::sector_grid() {
        let r = oracle::reference(z);
        let h = hankel1_0_1_scaled(z).unwrap();
        let e = rel(h.h0, r.h0_scaled).max(rel(h.h1, r.h1_scaled));
        assert!(e <= 1e-12, "z = {z}: relative error {e:e}");
        worst = worst.max(e);
        let u = hankel1_0_1(z).unwrap();
        let back = (C64::new(0.0, 1.0) * z).exp();
        if (r.h0_scaled * back).norm() > 1e-280 {
            let e = rel(u.h0, r.h0_scaled * back).max(rel(u.h1, r.h1_scaled * back));
            assert!(e <= 1e-12, "unscaled z = {z}: {e:e}");
        }
    }
    eprintln!("worst relative error {worst:e}");
    assert!(worst > 0.0);
}

#[test]
fn wronskian_at_2_plus_3i() {
    assert!(wronskian_defect(C64::new(2.0, 3.0)).unwrap() < 1e-12);
}

#[test]
fn derivative_relation() {
    let h = 1e-5;
    for z in [C64::new(0.7, 0.2), C64::new(3.0, 1.0), C64::new(10.0, 0.5), C64::new(0.1, 2.0)] {
        let hp = hankel1_0_1(z + h).unwrap().h0;
        let hm = hankel1_0_1(z - h).unwrap().h0;
        let fd = (hp - hm) / (2.0 * h);
        let h1 = hankel1_0_1(z).unwrap().h1;
        assert!(rel(-fd, h1) < 1e-8, "z = {z}");
    }
}

#[test]
fn decays_along_rays() {
    for angle in [PI / 4.0, PI / 2.0] {
        let mut last = f64::INFINITY;
        for i in 0..=99 {
            let r = 1.0 + i as f64;
            let v = hankel1_0_1(C64::from_polar(r, angle)).unwrap().h0.norm();
            assert!(v < last, "angle {angle}, r {r}");
            last = v;
        }
    }
}

#[test]
fn log_singularity_isolated() {
    let mut prev: Option<C64> = None;
    for e in [1e-4, 1e-6, 1e-8] {
        let z = C64::new(e, e);
        let d = hankel1_0_1(z).unwrap().h0 - C64::new(0.0, 2.0 / PI) * z.ln();
        if let Some(p) = prev {
            assert!((d - p).norm() < 1e-6);
        }
        prev = Some(d);
    }
}

#[test]
fn rejects_bad_arguments() {
    assert!(matches!(hankel1_0_1(C64::new(0.0, 0.0)), Err(pmlbie::Error::Singular(_))));
    assert!(matches!(hankel1_0_1(C64::new(-1.0, 0.5)), Err(pmlbie::Error::Domain(_))));
    assert!(matches!(hankel1_0_1(C64::new(1.0, -0.5)), Err(pmlbie::Error::Domain(_))));
    assert!(matches!(hankel1_0_1(C64::new(2e5, 0.0)), Err(pmlbie::Error::Domain(_))));
}

#[test]
fn log_kernel_values() {
    assert!(log_kernel(C64::new(1.0, 0.0)).unwrap().norm() == 0.0);
    let e = log_kernel(C64::new(std::f64::consts::E, 0.0)).unwrap();
    assert!((e - C64::new(-1.0 / (2.0 * PI), 0.0)).norm() < 1e-16);
    let i = log_kernel(C64::new(0.0, 1.0)).unwrap();
    assert!((i - C64::new(0.0, -0.25)).norm() < 1e-16);
    assert!(log_kernel(C64::new(-1.0, 0.0)).is_err());
}
