//! Periodic quadrature for log-singular integrands and its supporting pieces.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Hybrid Gauss-trapezoidal rule for integrands with a log singularity at a
/// grid point (Alpert 1999, hybrid Gauss-trapezoidal rules, log table, order 6).
///
/// On a periodic grid of spacing h with the singularity at t_i the rule reads
/// h·Σ_{|k|≥a} f(t_i + kh) + h·Σ_p w_p [f(t_i + χ_p h) + f(t_i − χ_p h)].
#[derive(Clone, Debug)]
pub struct AlpertRule {
    /// Grid offsets 0, ±1, …, ±(a−1) are skipped.
    pub a: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AlpertRule {
    pub fn log_order6() -> AlpertRule {
        AlpertRule {
            a: 3,
            nodes: vec![
                4.004_884_194_926_569_6e-3,
                7.745_655_373_336_686_1e-2,
                3.972_849_993_523_248_6e-1,
                1.075_673_352_915_103_7,
                2.003_796_927_111_872_0,
            ],
            weights: vec![
                1.671_879_691_147_101_7e-2,
                1.636_958_371_447_359_7e-1,
                4.981_856_569_770_636_5e-1,
                8.372_266_245_578_912_2e-1,
                9.841_730_844_088_380_6e-1,
            ],
        }
    }

    /// Fewest grid points the rule can be applied on.
    pub fn min_points(&self) -> usize {
        4 * self.a + 2
    }
}

impl Default for AlpertRule {
    fn default() -> Self {
        Self::log_order6()
    }
}

/// Cardinal function of trigonometric interpolation on N equispaced points of
/// [0, 1) (N even), evaluated at a distance of `u` grid spacings from its node.
pub fn periodic_cardinal(u: f64, n: usize) -> f64 {
    let r = u.rem_euclid(n as f64);
    if r == 0.0 {
        return 1.0;
    }
    let nf = n as f64;
    (PI * r).sin() / (nf * (PI * r / nf).tan())
}

/// Weights c_m with f(t_i + u·h) ≈ Σ_m c_m f(t_{i+m}), m = 0..N−1.
pub fn interpolation_stencil(u: f64, n: usize) -> Vec<f64> {
    (0..n).map(|m| periodic_cardinal(u - m as f64, n)).collect()
}
