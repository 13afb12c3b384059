//! Multiprecision reference values for the Bessel and Hankel functions of
//! orders 0 and 1, from the ascending series evaluated with enough guard bits
//! to absorb the cancellation between J and Y for large |z|.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64 as C64;
use std::sync::OnceLock;

const RM: RoundingMode = RoundingMode::ToEven;
const GAMMA_BITS: usize = 3600;

#[derive(Clone)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    fn new(z: C64, p: usize) -> Cx {
        Cx { re: BigFloat::from_f64(z.re, p), im: BigFloat::from_f64(z.im, p) }
    }

    fn real(x: BigFloat, p: usize) -> Cx {
        Cx { re: x, im: BigFloat::from_f64(0.0, p) }
    }

    fn add(&self, o: &Cx, p: usize) -> Cx {
        Cx { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM) }
    }

    fn sub(&self, o: &Cx, p: usize) -> Cx {
        Cx { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM) }
    }

    fn mul(&self, o: &Cx, p: usize) -> Cx {
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        Cx { re, im }
    }

    fn scale(&self, s: &BigFloat, p: usize) -> Cx {
        Cx { re: self.re.mul(s, p, RM), im: self.im.mul(s, p, RM) }
    }

    fn div_real(&self, s: &BigFloat, p: usize) -> Cx {
        Cx { re: self.re.div(s, p, RM), im: self.im.div(s, p, RM) }
    }

    fn recip(&self, p: usize) -> Cx {
        let d = self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM);
        Cx { re: self.re.div(&d, p, RM), im: self.im.neg().div(&d, p, RM) }
    }

    /// i·self
    fn times_i(&self) -> Cx {
        Cx { re: self.im.neg(), im: self.re.clone() }
    }

    fn below(&self, bits: usize) -> bool {
        let small = |x: &BigFloat| x.is_zero() || x.exponent().map_or(true, |e| (e as i64) < -(bits as i64));
        small(&self.re) && small(&self.im)
    }

    fn to_c64(&self, cc: &mut Consts) -> C64 {
        C64::new(to_f64(&self.re, cc), to_f64(&self.im, cc))
    }
}

fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let s = x.format(Radix::Dec, RM, cc).expect("decimal formatting");
    s.parse::<f64>().unwrap_or_else(|_| panic!("cannot parse {s}"))
}

fn int(n: usize, p: usize) -> BigFloat {
    BigFloat::from_u64(n as u64, p)
}

/// Euler's constant by the Brent–McMillan series.
fn euler_gamma(cc: &mut Consts) -> BigFloat {
    static G: OnceLock<String> = OnceLock::new();
    let p = GAMMA_BITS;
    let s = G.get_or_init(|| {
        let n = (p as f64 * std::f64::consts::LN_2 / 4.0).ceil() as usize + 2;
        let nn = int(n * n, p);
        let mut a = int(1, p);
        let mut h = int(0, p);
        let mut sa = int(1, p);
        let mut sah = int(0, p);
        let mut k = 1usize;
        loop {
            a = a.mul(&nn, p, RM).div(&int(k * k, p), p, RM);
            h = h.add(&int(1, p).div(&int(k, p), p, RM), p, RM);
            sa = sa.add(&a, p, RM);
            sah = sah.add(&a.mul(&h, p, RM), p, RM);
            if k > 4 * n && a.exponent().map_or(true, |e| (e as i64) < -(p as i64) - 8) {
                break;
            }
            k += 1;
        }
        let g = sah.div(&sa, p, RM).sub(&int(n, p).ln(p, RM, cc), p, RM);
        g.format(Radix::Dec, RM, cc).expect("format")
    });
    BigFloat::parse(s, Radix::Dec, p, RM, cc)
}

/// Working precision for argument z.
fn precision(z: C64) -> usize {
    let bits = (2.0 * z.norm() / std::f64::consts::LN_2).ceil() as usize + 200;
    assert!(bits + 64 <= GAMMA_BITS, "|z| too large for the oracle");
    bits
}

pub struct Reference {
    pub j0: C64,
    pub j1: C64,
    /// e^{−iz}·H₀⁽¹⁾(z)
    pub h0_scaled: C64,
    /// e^{−iz}·H₁⁽¹⁾(z)
    pub h1_scaled: C64,
}

/// Reference values for z in the closed first quadrant, z ≠ 0.
pub fn reference(z: C64) -> Reference {
    assert!(z.re >= 0.0 && z.im >= 0.0 && z.norm() > 0.0);
    let p = precision(z);
    let mut cc = Consts::new().expect("constants cache");
    let zz = Cx::new(z, p);
    let four = int(4, p);
    let mq = zz.mul(&zz, p).div_real(&four, p).scale(&BigFloat::from_f64(-1.0, p), p);
    let gamma = euler_gamma(&mut cc);
    let pi = cc.pi(p, RM);

    let one = int(1, p);
    let mut t = Cx::real(one.clone(), p);
    let mut u = Cx::real(one.clone(), p);
    let mut j0 = t.clone();
    let mut s0 = Cx::real(int(0, p), p);
    let mut sj1 = u.clone();
    let mut harm = int(0, p);
    let two_gamma = gamma.add(&gamma, p, RM);
    // ψ(1) + ψ(2) = H₁ − 2γ
    let mut s1 = u.scale(&one.sub(&two_gamma, p, RM), p);
    let kmin = (z.norm() as usize) + 2;
    let mut k = 1usize;
    loop {
        t = t.mul(&mq, p).div_real(&int(k * k, p), p);
        u = u.mul(&mq, p).div_real(&int(k * (k + 1), p), p);
        harm = harm.add(&one.div(&int(k, p), p, RM), p, RM);
        let harm_next = harm.add(&one.div(&int(k + 1, p), p, RM), p, RM);
        j0 = j0.add(&t, p);
        s0 = s0.add(&t.scale(&harm, p), p);
        sj1 = sj1.add(&u, p);
        let psi = harm.add(&harm_next, p, RM).sub(&two_gamma, p, RM);
        s1 = s1.add(&u.scale(&psi, p), p);
        if k > kmin && t.below(p) && u.below(p) {
            break;
        }
        k += 1;
    }
    let half_z = zz.div_real(&int(2, p), p);
    let j1 = half_z.mul(&sj1, p);

    // log(z/2) on the principal branch
    let r2 = half_z.re.mul(&half_z.re, p, RM).add(&half_z.im.mul(&half_z.im, p, RM), p, RM);
    let ln_abs = r2.ln(p, RM, &mut cc).div(&int(2, p), p, RM);
    let arg = if z.re == 0.0 {
        pi.div(&int(2, p), p, RM)
    } else {
        zz.im.div(&zz.re, p, RM).atan(p, RM, &mut cc)
    };
    let log_half = Cx { re: ln_abs, im: arg };

    let two_over_pi = int(2, p).div(&pi, p, RM);
    let y0 = log_half
        .add(&Cx::real(gamma.clone(), p), p)
        .mul(&j0, p)
        .sub(&s0, p)
        .scale(&two_over_pi, p);
    let y1 = log_half
        .mul(&j1, p)
        .scale(&two_over_pi, p)
        .sub(&zz.recip(p).scale(&two_over_pi, p), p)
        .sub(&half_z.mul(&s1, p).div_real(&pi, p), p);
    let h0 = j0.add(&y0.times_i(), p);
    let h1 = j1.add(&y1.times_i(), p);

    // e^{−iz} = e^{Im z}(cos Re z − i sin Re z)
    let ey = zz.im.exp(p, RM, &mut cc);
    let factor = Cx {
        re: zz.re.cos(p, RM, &mut cc).mul(&ey, p, RM),
        im: zz.re.sin(p, RM, &mut cc).mul(&ey, p, RM).neg(),
    };
    Reference {
        j0: j0.to_c64(&mut cc),
        j1: j1.to_c64(&mut cc),
        h0_scaled: h0.mul(&factor, p).to_c64(&mut cc),
        h1_scaled: h1.mul(&factor, p).to_c64(&mut cc),
    }
}

/// 200 sample points: 20 moduli log-spaced over [10⁻³, 10³] times 10 angles over [0, π/2].
pub fn sector_grid() -> Vec<C64> {
    let mut out = Vec::with_capacity(200);
    for i in 0..20 {
        let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 19.0);
        for j in 0..10 {
            let a = std::f64::consts::FRAC_PI_2 * j as f64 / 9.0;
            let z = if j == 9 { C64::new(0.0, r) } else { C64::from_polar(r, a) };
            out.push(z);
        }
    }
    out
}
