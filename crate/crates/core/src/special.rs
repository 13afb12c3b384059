//! Hankel functions H₀⁽¹⁾, H₁⁽¹⁾ on the closed first quadrant and the complex
//! logarithmic kernel.
//!
//! Values come from the Amos algorithm (pure Rust port in `complex-bessel`).
//! Power series and the large-argument expansion alone lose digits near the
//! imaginary axis, where J₀ and Y₀ grow like e^{Im z} while H₀⁽¹⁾ decays.

use crate::error::{Error, Result};
use complex_bessel::Scaling;
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Largest accepted |z|.
pub const MAX_ARG: f64 = 1e5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HankelPair {
    pub h0: C64,
    pub h1: C64,
}

fn check_sector(z: C64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite Hankel argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Singular("Hankel function at z = 0".into()));
    }
    let r = z.norm();
    if r > MAX_ARG {
        return Err(Error::Domain(format!("|z| = {r:.3e} exceeds {MAX_ARG:e}")));
    }
    // rounding in ρ² may leave a last-bit excursion across the sector edges
    let slack = 4.0 * f64::EPSILON * r;
    if z.re < -slack || z.im < -slack {
        return Err(Error::Domain(format!(
            "Hankel argument {z} outside the sector 0 <= arg z <= pi/2"
        )));
    }
    Ok(())
}

fn pair(z: C64, scaling: Scaling) -> Result<HankelPair> {
    check_sector(z)?;
    let z = C64::new(z.re.max(0.0), z.im.max(0.0));
    let r = complex_bessel::hankel1_seq(0.0, z, 2, scaling)
        .map_err(|e| Error::Special(format!("H(1) at {z}: {e}")))?;
    Ok(HankelPair { h0: r.values[0], h1: r.values[1] })
}

/// H₀⁽¹⁾(z) and H₁⁽¹⁾(z) for z ≠ 0 with 0 ≤ arg z ≤ π/2 and |z| ≤ 10⁵.
/// Values below the smallest normal double flush to zero.
pub fn hankel1_0_1(z: C64) -> Result<HankelPair> {
    pair(z, Scaling::Unscaled)
}

/// e^{−iz}·H₀⁽¹⁾(z) and e^{−iz}·H₁⁽¹⁾(z), representable on the whole sector.
pub fn hankel1_0_1_scaled(z: C64) -> Result<HankelPair> {
    pair(z, Scaling::Exponential)
}

/// J₀(z), J₁(z).
pub fn bessel_j0_j1(z: C64) -> Result<(C64, C64)> {
    check_sector(z)?;
    let r = complex_bessel::besselj_seq(0.0, z, 2, Scaling::Unscaled)
        .map_err(|e| Error::Special(format!("J at {z}: {e}")))?;
    Ok((r.values[0], r.values[1]))
}

/// |H₀J₁ − H₁J₀ − 2i/(πz)| relative to 2/(π|z|).
pub fn wronskian_defect(z: C64) -> Result<f64> {
    let h = hankel1_0_1(z)?;
    let (j0, j1) = bessel_j0_j1(z)?;
    let exact = C64::new(0.0, 2.0 / PI) / z;
    Ok((h.h0 * j1 - h.h1 * j0 - exact).norm() / exact.norm())
}

/// −log(ρ)/(2π), principal branch.
pub fn log_kernel(rho: C64) -> Result<C64> {
    if rho.im == 0.0 && rho.re <= 0.0 {
        return Err(Error::Domain(format!("log kernel argument {rho} lies on the branch cut")));
    }
    Ok(-rho.ln() / (2.0 * PI))
}

/// True when arg z lies in [0, π/2] up to rounding.
pub fn in_sector(z: C64) -> bool {
    check_sector(z).is_ok() && z.arg() <= FRAC_PI_2 + 1e-15
}
