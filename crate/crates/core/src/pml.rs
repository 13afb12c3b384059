//! Vertical PML: absorbing profile, complexified height and distance.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopBc {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PmlParams {
    /// Absorbing constant S.
    pub s: f64,
    /// Thickness L.
    pub l: f64,
    /// Height H of the physical strip.
    pub h: f64,
    /// Smoothness m of the absorbing profile.
    pub m: u32,
    pub top_bc: TopBc,
}

/// A point with real x₁ and complexified height x̃₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPoint {
    pub x1: f64,
    pub x2: C64,
}

impl PmlParams {
    pub fn new(s: f64, l: f64, h: f64, m: u32, top_bc: TopBc) -> Result<PmlParams> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Config(format!("PML absorbing constant S must be positive, got {s}")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Config(format!("PML thickness L must be positive, got {l}")));
        }
        if !h.is_finite() {
            return Err(Error::Config(format!("H must be finite, got {h}")));
        }
        Ok(PmlParams { s, l, h, m, top_bc })
    }

    pub fn top(&self) -> f64 {
        self.h + self.l
    }

    /// Heights inside (H, H+L) where σ fails to be smooth, plus H itself.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.m == 0 {
            vec![self.h]
        } else {
            vec![self.h, self.h + 0.5 * self.l]
        }
    }

    fn ramp(&self, x2: f64) -> f64 {
        let m = self.m as f64;
        let half = 0.5 * self.l;
        let xi = (2.0 * x2 - (2.0 * self.h + half)) / half;
        let f1 = (0.5 - 1.0 / m) * xi * xi * xi + xi / m + 0.5;
        let f2 = 1.0 - f1;
        let a = f1.powi(self.m as i32);
        2.0 * a / (a + f2.powi(self.m as i32))
    }

    pub fn sigma(&self, x2: f64) -> f64 {
        if x2 <= self.h {
            0.0
        } else if self.m == 0 {
            1.0
        } else if x2 < self.h + 0.5 * self.l {
            self.ramp(x2)
        } else {
            2.0
        }
    }

    /// ∫_H^{x₂} σ.
    pub fn sigma_integral(&self, x2: f64) -> f64 {
        if x2 <= self.h {
            return 0.0;
        }
        if self.m == 0 {
            return x2 - self.h;
        }
        let mid = self.h + 0.5 * self.l;
        if x2 >= mid {
            // σ(ξ) + σ(−ξ) = 2 on the ramp, so its integral is L/2
            return 0.5 * self.l + 2.0 * (x2 - mid);
        }
        adaptive_gauss(&|t| self.ramp(t), self.h, x2, 1e-15, 0)
    }

    pub fn complexify_height(&self, x2: f64) -> C64 {
        C64::new(x2, self.s * self.sigma_integral(x2))
    }

    pub fn point(&self, p: Point) -> ComplexPoint {
        ComplexPoint { x1: p[0], x2: self.complexify_height(p[1]) }
    }

    /// α(x₂) = 1 + iSσ(x₂); A = diag(α, 1/α).
    pub fn alpha(&self, x2: f64) -> C64 {
        C64::new(1.0, self.s * self.sigma(x2))
    }

    pub fn pml_coefficients(&self, x2: f64) -> (C64, [C64; 2]) {
        let a = self.alpha(x2);
        (a, [a, a.inv()])
    }

    /// x̃₂(H+L) − H.
    pub fn complex_thickness(&self) -> C64 {
        self.complexify_height(self.top()) - self.h
    }
}

fn adaptive_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let rule = |lo: f64, hi: f64| {
        let (x, w) = gauss_legendre(10);
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        x.iter().zip(&w).map(|(xi, wi)| wi * r * f(c + r * xi)).sum::<f64>()
    };
    let whole = rule(a, b);
    let mid = 0.5 * (a + b);
    let split = rule(a, mid) + rule(mid, b);
    if (whole - split).abs() <= tol * (1.0 + split.abs()) || depth > 40 {
        split
    } else {
        adaptive_gauss(f, a, mid, tol, depth + 1) + adaptive_gauss(f, mid, b, tol, depth + 1)
    }
}

/// Square root with Re ≥ 0 and argument in [0, π).
pub fn branch_sqrt(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain(format!("square root argument {z} lies on the branch cut")));
    }
    let mut w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        w = -w;
    }
    Ok(w)
}

/// ρ(x̃, ỹ) = √((x₁−y₁)² + (x̃₂−ỹ₂)²).
pub fn complex_distance(x: ComplexPoint, y: ComplexPoint) -> Result<C64> {
    let d1 = x.x1 - y.x1;
    let d2 = x.x2 - y.x2;
    let r2 = d2 * d2 + d1 * d1;
    if r2 == C64::new(0.0, 0.0) {
        return Err(Error::Singular("coincident points in the complex distance".into()));
    }
    branch_sqrt(r2)
}
