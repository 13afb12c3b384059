//! Complexified Green functions and the Nyström layer matrices on a cell boundary.

use crate::dense::CMat;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, Point};
use crate::pml::{complex_distance, ComplexPoint, PmlParams};
use crate::quadrature::{interpolation_stencil, AlpertRule};
use crate::special::{hankel1_0_1, log_kernel};
use faer::{c64, Mat};
use std::f64::consts::PI;

const I: c64 = c64::new(0.0, 1.0);

/// G̃(x, y) = (i/4)·H₀⁽¹⁾(kρ).
pub fn green(x: ComplexPoint, y: ComplexPoint, k: f64) -> Result<c64> {
    let rho = complex_distance(x, y)?;
    Ok(0.25 * I * hankel1_0_1(k * rho)?.h0)
}

/// Numerator of both co-normal kernels: α(y₂)ν₁(x₁−y₁) + ν₂(x̃₂−ỹ₂).
fn conormal_factor(x: ComplexPoint, y: ComplexPoint, nu: Point, alpha_y: c64) -> c64 {
    alpha_y * nu[0] * (x.x1 - y.x1) + nu[1] * (x.x2 - y.x2)
}

/// (A(y)ν)·∇_y G̃(x, y), with ν the unit normal at y and α(y₂) its PML coefficient.
pub fn green_conormal(x: ComplexPoint, y: ComplexPoint, nu: Point, alpha_y: c64, k: f64) -> Result<c64> {
    let rho = complex_distance(x, y)?;
    let h = hankel1_0_1(k * rho)?;
    Ok(0.25 * I * k * h.h1 / rho * conormal_factor(x, y, nu, alpha_y))
}

/// (A(y)ν)·∇_y of G̃₀ = −log(ρ)/(2π).
pub fn laplace_conormal(x: ComplexPoint, y: ComplexPoint, nu: Point, alpha_y: c64) -> Result<c64> {
    let rho = complex_distance(x, y)?;
    Ok(conormal_factor(x, y, nu, alpha_y) / (2.0 * PI * rho * rho))
}

/// G̃₀(x, y).
pub fn laplace_green(x: ComplexPoint, y: ComplexPoint) -> Result<c64> {
    log_kernel(complex_distance(x, y)?)
}

/// A boundary point with everything the kernels need.
#[derive(Clone, Copy, Debug)]
pub struct Source {
    pub z: ComplexPoint,
    pub alpha: c64,
    /// Outward normal times the parametrization speed.
    pub scaled_normal: Point,
}

impl Source {
    pub fn new(pml: &PmlParams, x: Point, dx: Point) -> Source {
        Source { z: pml.point(x), alpha: pml.alpha(x[1]), scaled_normal: [dx[1], -dx[0]] }
    }
}

/// Integrands of S, K and K₀ for target x and source y, all including the factor 2.
#[inline]
fn kernels(x: ComplexPoint, y: &Source, k: f64) -> Result<(c64, c64, c64)> {
    // Off-grid nodes next to a graded corner can round onto the corner itself;
    // the scaled density vanishes there, so the contribution is dropped.
    if x.x1 == y.z.x1 && x.x2 == y.z.x2 {
        let z = c64::new(0.0, 0.0);
        return Ok((z, z, z));
    }
    let rho = complex_distance(x, y.z)?;
    let h = hankel1_0_1(k * rho)?;
    let f = conormal_factor(x, y.z, y.scaled_normal, y.alpha);
    Ok((0.5 * I * h.h0, 0.5 * I * k * h.h1 / rho * f, f / (PI * rho * rho)))
}

/// Discretized single layer S, double layer K and the vector K₀[1].
#[derive(Clone, Debug)]
pub struct LayerMatrices {
    pub s_mat: CMat,
    pub k_mat: CMat,
    pub k0_one: Vec<c64>,
}

pub fn assemble_layers(mesh: &BoundaryMesh, k: f64, pml: &PmlParams, rule: &AlpertRule) -> Result<LayerMatrices> {
    let n = mesh.len();
    if n % 2 != 0 {
        return Err(Error::Config(format!("node count {n} must be even")));
    }
    if n < rule.min_points() {
        return Err(Error::Config(format!(
            "{n} nodes cannot carry the corrected rule (need at least {})",
            rule.min_points()
        )));
    }
    let h = mesh.h();
    let wq = mesh.weight();
    let src: Vec<Source> = (0..n).map(|j| Source::new(pml, mesh.points[j], mesh.derivs[j])).collect();
    let offsets: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .flat_map(|(&x, &w)| [(x, w), (-x, w)])
        .collect();
    let stencils: Vec<Vec<f64>> = offsets.iter().map(|&(u, _)| interpolation_stencil(u, n)).collect();

    let mut s_mat = Mat::<c64>::zeros(n, n);
    let mut k_mat = Mat::<c64>::zeros(n, n);
    let mut k0_one = vec![c64::new(0.0, 0.0); n];
    let a = rule.a;
    for i in 0..n {
        let x = src[i].z;
        let mut k0 = c64::new(0.0, 0.0);
        for d in a..=n - a {
            let j = (i + d) % n;
            let (ks, kk, kl) = kernels(x, &src[j], k)?;
            s_mat[(i, j)] = wq * ks;
            k_mat[(i, j)] = wq * kk;
            k0 += wq * kl;
        }
        for (c, &(u, w)) in offsets.iter().enumerate() {
            let t = (i as f64 + u) * h;
            let (y, dy) = mesh.eval(t);
            let (ks, kk, kl) = kernels(x, &Source::new(pml, y, dy), k)?;
            k0 += wq * w * kl;
            let (ws, wk) = (wq * w * ks, wq * w * kk);
            for (m, &cm) in stencils[c].iter().enumerate() {
                let j = (i + m) % n;
                s_mat[(i, j)] += ws * cm;
                k_mat[(i, j)] += wk * cm;
            }
        }
        k0_one[i] = k0;
    }
    Ok(LayerMatrices { s_mat, k_mat, k0_one })
}
