//! Truncated scattering problems on the defect cell and field evaluation in
//! the physical strip.

use crate::dense::{column, lu_solve, select, to_vec, CMat};
use crate::error::{Error, Result};
use crate::geometry::{mesh_cell, BoundaryMesh, CellSpec, Point, PiecewiseCurve, Segment};
use crate::kernels::{assemble_layers, green, green_conormal};
use crate::ntd::{eliminate_mixed, CellBie, MarchingOps, NtDBlocks, RdpLevels};
use crate::pml::{complex_distance, PmlParams, TopBc};
use crate::quadrature::AlpertRule;
use crate::special::hankel1_0_1;
use faer::{c64, Mat};
use std::collections::HashMap;
use std::f64::consts::PI;

const I: c64 = c64::new(0.0, 1.0);
const ZERO: c64 = c64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Incidence {
    /// Point source x* inside the strip above the surface.
    Cylindrical { source: Point },
    /// Plane wave exp(ik(cosθ·x₁ − sinθ·x₂)), θ ∈ (0, π).
    Plane { theta: f64 },
}

/// Trace u and scaled co-normal density φˢ at every node of a cell mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub u: Vec<c64>,
    pub phi: Vec<c64>,
}

impl BoundaryData {
    pub fn zeros(n: usize) -> BoundaryData {
        BoundaryData { u: vec![ZERO; n], phi: vec![ZERO; n] }
    }

    pub fn u_on(&self, mesh: &BoundaryMesh, seg: Segment) -> Vec<c64> {
        mesh.indices(seg).iter().map(|&k| self.u[k]).collect()
    }

    pub fn phi_on(&self, mesh: &BoundaryMesh, seg: Segment) -> Vec<c64> {
        mesh.indices(seg).iter().map(|&k| self.phi[k]).collect()
    }

    pub fn sub(&self, other: &BoundaryData) -> BoundaryData {
        BoundaryData {
            u: self.u.iter().zip(&other.u).map(|(a, b)| a - b).collect(),
            phi: self.phi.iter().zip(&other.phi).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &BoundaryData) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.phi.iter().zip(&other.phi))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// ũ^inc and its scaled co-normal density on the nodes of `mesh`.
pub fn incident_trace(inc: &Incidence, mesh: &BoundaryMesh, pml: &PmlParams, k: f64) -> Result<BoundaryData> {
    let n = mesh.len();
    let mut out = BoundaryData::zeros(n);
    for q in 0..n {
        let p = mesh.points[q];
        let nrm = mesh.scaled_normal(q);
        let alpha = pml.alpha(p[1]);
        let (u, du1, du2) = incident_gradient(inc, p, pml, k)?;
        out.u[q] = u;
        out.phi[q] = alpha * nrm[0] * du1 + nrm[1] * du2;
    }
    Ok(out)
}

/// ũ^inc, ∂₁ũ^inc and ∂ũ^inc/∂x̃₂ at a point.
pub fn incident_gradient(inc: &Incidence, p: Point, pml: &PmlParams, k: f64) -> Result<(c64, c64, c64)> {
    let x = pml.point(p);
    match *inc {
        Incidence::Plane { theta } => {
            let (c, s) = (theta.cos(), theta.sin());
            let u = (I * k * (c * x.x1 - s * x.x2)).exp();
            Ok((u, I * k * c * u, -I * k * s * u))
        }
        Incidence::Cylindrical { source } => {
            let y = pml.point(source);
            let rho = complex_distance(x, y)
                .map_err(|_| Error::Config(format!("source {source:?} lies on the boundary")))?;
            let h = hankel1_0_1(k * rho)?;
            let f = -0.25 * I * k * h.h1 / rho;
            Ok((0.25 * I * h.h0, f * (x.x1 - y.x1), f * (x.x2 - y.x2)))
        }
    }
}

pub fn incident_field(inc: &Incidence, p: Point, pml: &PmlParams, k: f64) -> Result<c64> {
    Ok(incident_gradient(inc, p, pml, k)?.0)
}

/// Everything that defines one truncated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub curve: PiecewiseCurve,
    pub pml: PmlParams,
    pub k: f64,
    pub n_per_segment: usize,
    pub grading: u32,
    pub rdp_level: usize,
}

/// Assembled operators of the periodic cell, the marching operators and the
/// boundary relation of the defect cell.
pub struct Solver {
    pub problem: Problem,
    pub periodic_mesh: BoundaryMesh,
    pub periodic_bie: CellBie,
    pub blocks: NtDBlocks,
    pub ops: MarchingOps,
    pub defect_mesh: BoundaryMesh,
    defect_bie: Option<CellBie>,
}

pub fn build_cell(problem: &Problem, spec: &CellSpec) -> Result<(BoundaryMesh, CellBie)> {
    let mesh = mesh_cell(spec, problem.n_per_segment, problem.grading)?;
    let layers = assemble_layers(&mesh, problem.k, &problem.pml, &AlpertRule::log_order6())?;
    Ok((mesh, CellBie::new(&layers)))
}

impl Solver {
    pub fn new(problem: Problem) -> Result<Solver> {
        if !(problem.k > 0.0) || !problem.k.is_finite() {
            return Err(Error::Config(format!("wavenumber must be positive, got {}", problem.k)));
        }
        let unperturbed = problem.curve.unperturbed();
        let (periodic_mesh, periodic_bie) =
            build_cell(&problem, &CellSpec::new(&unperturbed, 0, &problem.pml)?)?;
        let blocks = eliminate_mixed(&periodic_bie, &periodic_mesh, problem.pml.top_bc)?;
        let ops = RdpLevels::new(&blocks, problem.rdp_level.max(1))?.marching(problem.rdp_level.max(1))?;
        let (defect_mesh, defect_bie) = if problem.curve.has_defect() {
            let (m, n) = build_cell(&problem, &CellSpec::new(&problem.curve, 0, &problem.pml)?)?;
            if m.lateral_len() != periodic_mesh.lateral_len() {
                return Err(Error::Config("defect and periodic cells have different lateral meshes".into()));
            }
            (m, Some(n))
        } else {
            (periodic_mesh.clone(), None)
        };
        Ok(Solver { problem, periodic_mesh, periodic_bie, blocks, ops, defect_mesh, defect_bie })
    }

    /// Boundary relation of the cell |x₁| < T/2 of the perturbed surface.
    pub fn defect_bie(&self) -> &CellBie {
        self.defect_bie.as_ref().unwrap_or(&self.periodic_bie)
    }

    /// Solve A·u − S·φ = r on the defect cell, with u = C·φ + f on each lateral,
    /// u = b on the bottom and the configured condition on the top.
    #[allow(clippy::too_many_arguments)]
    fn solve_cell_system(
        &self,
        r: &[c64],
        c_left: &CMat,
        f_left: &[c64],
        c_right: &CMat,
        f_right: &[c64],
        b: &[c64],
    ) -> Result<BoundaryData> {
        let mesh = &self.defect_mesh;
        let bie = self.defect_bie();
        let n = mesh.len();
        let left = mesh.indices(Segment::Left);
        let right = mesh.indices(Segment::Right);
        let bottom = mesh.indices(Segment::Bottom);
        let top = mesh.indices(Segment::Top);
        let neumann = self.problem.pml.top_bc == TopBc::Neumann;
        let all: Vec<usize> = (0..n).collect();
        // column q carries φ_q, or u_q on a Neumann top
        let mut m = Mat::<c64>::from_fn(n, n, |i, j| -bie.s[(i, j)]);
        if neumann {
            for &q in top {
                for i in 0..n {
                    m[(i, q)] = bie.a[(i, q)];
                }
            }
        }
        let mut rhs: Vec<c64> = r.to_vec();
        for (idx, c, f) in [(left, c_left, f_left), (right, c_right, f_right)] {
            let a_lat = select(&bie.a, &all, idx);
            let ac = &a_lat * c;
            let af = to_vec(&(&a_lat * column(f)));
            for i in 0..n {
                for (bb, &cb) in idx.iter().enumerate() {
                    m[(i, cb)] += ac[(i, bb)];
                }
                rhs[i] -= af[i];
            }
        }
        let ab = to_vec(&(select(&bie.a, &all, bottom) * column(b)));
        for i in 0..n {
            rhs[i] -= ab[i];
        }
        let z = to_vec(&lu_solve(&m, &column(&rhs), "defect-cell system")?.x);
        let mut out = BoundaryData::zeros(n);
        for q in 0..n {
            out.phi[q] = z[q];
        }
        if neumann {
            for &q in top {
                out.u[q] = z[q];
                out.phi[q] = ZERO;
            }
        }
        let lphi: Vec<c64> = left.iter().map(|&q| out.phi[q]).collect();
        let rphi: Vec<c64> = right.iter().map(|&q| out.phi[q]).collect();
        let lu = to_vec(&(c_left * column(&lphi)));
        let ru = to_vec(&(c_right * column(&rphi)));
        for (a, &q) in left.iter().enumerate() {
            out.u[q] = lu[a] + f_left[a];
        }
        for (a, &q) in right.iter().enumerate() {
            out.u[q] = ru[a] + f_right[a];
        }
        for (a, &q) in bottom.iter().enumerate() {
            out.u[q] = b[a];
        }
        Ok(out)
    }

    /// Cylindrical incidence: total field data u^og = u^tot on the defect cell.
    pub fn solve_point_source(&self, source: Point) -> Result<Solution> {
        let p = &self.problem;
        if !p.curve.is_above(source) || source[1] >= p.pml.top() || (source[0] / p.curve.period).abs() >= 0.5 {
            return Err(Error::Config(format!(
                "source {source:?} must lie above the surface inside the strip with |x1| < T/2"
            )));
        }
        let inc_kind = Incidence::Cylindrical { source };
        let inc = incident_trace(&inc_kind, &self.defect_mesh, &p.pml, p.k)?;
        // the outgoing part u − u^inc satisfies the homogeneous relation
        let bie = self.defect_bie();
        let au = to_vec(&(&bie.a * column(&inc.u)));
        let sphi = to_vec(&(&bie.s * column(&inc.phi)));
        let g: Vec<c64> = au.iter().zip(&sphi).map(|(a, b)| a - b).collect();
        let m = self.defect_mesh.lateral_len();
        let zeros = vec![ZERO; m];
        let nb = self.defect_mesh.indices(Segment::Bottom).len();
        let total = self.solve_cell_system(&g, &(-&self.ops.n_minus), &zeros, &(-&self.ops.n_plus), &zeros, &vec![ZERO; nb])?;
        Ok(Solution { incidence: inc_kind, inc, field: total, reference: None })
    }

    /// Quasi-periodic scattered field ũ^sc_ref of the unperturbed surface on the periodic cell.
    pub fn solve_plane_reference(&self, theta: f64) -> Result<BoundaryData> {
        let p = &self.problem;
        check_angle(theta)?;
        wood_check(p.k, theta, p.curve.period, 1e-3 * p.k)?;
        let mesh = &self.periodic_mesh;
        let bie = &self.periodic_bie;
        let n = mesh.len();
        let gamma = (I * p.k * theta.cos() * p.curve.period).exp();
        let left = mesh.indices(Segment::Left);
        let right = mesh.indices(Segment::Right);
        let bottom = mesh.indices(Segment::Bottom);
        let top = mesh.indices(Segment::Top);
        let neumann = p.pml.top_bc == TopBc::Neumann;
        let ml = left.len();
        // unknowns: u₁, φ₁, φ on the bottom, φ (or u) on the top
        let mut cols: Vec<usize> = Vec::with_capacity(n);
        cols.extend(bottom);
        cols.extend(top);
        // A·u − S·φ = 0 with u₃ = γu₁, φ₃ = −γφ₁, u = −u^inc on the bottom
        let mut m = Mat::<c64>::zeros(n, n);
        for a in 0..ml {
            for i in 0..n {
                m[(i, a)] = bie.a[(i, left[a])] + gamma * bie.a[(i, right[a])];
                m[(i, ml + a)] = -bie.s[(i, left[a])] + gamma * bie.s[(i, right[a])];
            }
        }
        for (c, &q) in cols.iter().enumerate() {
            let col = 2 * ml + c;
            let u_unknown = neumann && top.contains(&q);
            for i in 0..n {
                m[(i, col)] = if u_unknown { bie.a[(i, q)] } else { -bie.s[(i, q)] };
            }
        }
        let inc = incident_trace(&Incidence::Plane { theta }, mesh, &p.pml, p.k)?;
        let all: Vec<usize> = (0..n).collect();
        let ub: Vec<c64> = bottom.iter().map(|&q| inc.u[q]).collect();
        let rhs = to_vec(&(select(&bie.a, &all, bottom) * column(&ub)));
        let z = to_vec(&lu_solve(&m, &column(&rhs), "quasi-periodic reference system")?.x);
        let mut out = BoundaryData::zeros(n);
        for a in 0..ml {
            out.u[left[a]] = z[a];
            out.u[right[a]] = gamma * z[a];
            out.phi[left[a]] = z[ml + a];
            out.phi[right[a]] = -gamma * z[ml + a];
        }
        for (c, &q) in cols.iter().enumerate() {
            if neumann && top.contains(&q) {
                out.u[q] = z[2 * ml + c];
            } else {
                out.phi[q] = z[2 * ml + c];
            }
        }
        for &q in bottom {
            out.u[q] = -inc.u[q];
        }
        Ok(out)
    }

    /// Plane-wave incidence on the perturbed surface: ũ^sc on the defect cell.
    pub fn solve_plane_defected(&self, theta: f64, reference: &BoundaryData) -> Result<Solution> {
        let p = &self.problem;
        check_angle(theta)?;
        let inc_kind = Incidence::Plane { theta };
        let inc = incident_trace(&inc_kind, &self.defect_mesh, &p.pml, p.k)?;
        let pm = &self.periodic_mesh;
        let rl = column(&reference.phi_on(pm, Segment::Left));
        let rr = column(&reference.phi_on(pm, Segment::Right));
        let fl: Vec<c64> = reference
            .u_on(pm, Segment::Left)
            .iter()
            .zip(to_vec(&(&self.ops.n_minus * &rl)))
            .map(|(u, v)| u + v)
            .collect();
        let fr: Vec<c64> = reference
            .u_on(pm, Segment::Right)
            .iter()
            .zip(to_vec(&(&self.ops.n_plus * &rr)))
            .map(|(u, v)| u + v)
            .collect();
        let b: Vec<c64> = inc.u_on(&self.defect_mesh, Segment::Bottom).iter().map(|v| -v).collect();
        let g = vec![ZERO; self.defect_mesh.len()];
        let sc = self.solve_cell_system(&g, &(-&self.ops.n_minus), &fl, &(-&self.ops.n_plus), &fr, &b)?;
        Ok(Solution { incidence: inc_kind, inc, field: sc, reference: Some(reference.clone()) })
    }

    /// Densities φˢ_{j,1}, φˢ_{j,3} of the outgoing part on periodic cell j ≠ 0.
    pub fn march(&self, sol: &Solution, j: i64) -> (Vec<c64>, Vec<c64>) {
        let (l0, r0) = sol.outgoing_lateral_phi(&self.defect_mesh, &self.periodic_mesh);
        let neg = |v: &[c64]| v.iter().map(|z| -z).collect::<Vec<c64>>();
        let apply = |a: &CMat, v: &[c64]| to_vec(&(a * column(v)));
        if j > 0 {
            let mut p1 = neg(&r0);
            let mut p3 = apply(&self.ops.rp_plus, &p1);
            for _ in 1..j {
                p1 = neg(&p3);
                p3 = apply(&self.ops.rp_plus, &p1);
            }
            (p1, p3)
        } else {
            let mut p3 = neg(&l0);
            let mut p1 = apply(&self.ops.rp_minus, &p3);
            for _ in 1..(-j) {
                p3 = neg(&p1);
                p1 = apply(&self.ops.rp_minus, &p3);
            }
            (p1, p3)
        }
    }

    /// Full boundary data of the outgoing part on periodic cell j ≠ 0, on the periodic mesh.
    pub fn cell_data(&self, sol: &Solution, j: i64) -> BoundaryData {
        let (p1, p3) = self.march(sol, j);
        let mesh = &self.periodic_mesh;
        let mut lat = p1.clone();
        lat.extend(&p3);
        let phi_l = column(&lat);
        let u_lat = to_vec(&(&self.blocks.full() * &phi_l));
        let mut out = BoundaryData::zeros(mesh.len());
        let m = p1.len();
        for (a, &q) in mesh.indices(Segment::Left).iter().enumerate() {
            out.phi[q] = p1[a];
            out.u[q] = u_lat[a];
        }
        for (a, &q) in mesh.indices(Segment::Right).iter().enumerate() {
            out.phi[q] = p3[a];
            out.u[q] = u_lat[m + a];
        }
        if let Some(rec) = &self.blocks.recovery {
            let phi = to_vec(&(&rec.phi * &phi_l));
            let u = to_vec(&(&rec.u * &phi_l));
            for (a, &q) in rec.nodes.iter().enumerate() {
                out.phi[q] = phi[a];
                out.u[q] = u[a];
            }
        }
        out
    }

    /// Total field at the targets; see [`FieldGrid`] for the mask codes.
    pub fn evaluate_field(&self, sol: &Solution, targets: &[Point]) -> Result<FieldGrid> {
        let p = &self.problem;
        let t = p.curve.period;
        let mut cache: HashMap<i64, BoundaryData> = HashMap::new();
        let sc0 = match sol.reference {
            Some(_) => sol.field.clone(),
            None => sol.field.sub(&sol.inc),
        };
        let mut values = Vec::with_capacity(targets.len());
        let mut mask = Vec::with_capacity(targets.len());
        let gamma = match sol.incidence {
            Incidence::Plane { theta } => (I * p.k * theta.cos() * t).exp(),
            Incidence::Cylindrical { .. } => ZERO,
        };
        for &x in targets {
            if !p.curve.is_above(x) {
                values.push(c64::new(f64::NAN, f64::NAN));
                mask.push(MASK_BELOW);
                continue;
            }
            if x[1] > p.pml.h {
                values.push(c64::new(f64::NAN, f64::NAN));
                mask.push(MASK_PML);
                continue;
            }
            if let Incidence::Cylindrical { source } = sol.incidence {
                if (x[0] - source[0]).hypot(x[1] - source[1]) <= 1e-12 * t {
                    values.push(c64::new(f64::NAN, f64::NAN));
                    mask.push(MASK_SOURCE);
                    continue;
                }
            }
            let j = p.curve.cell_of(x[0]);
            let shifted = [x[0] - j as f64 * t, x[1]];
            let inc = incident_field(&sol.incidence, x, &p.pml, p.k)?;
            let (mesh, value) = if j == 0 {
                (&self.defect_mesh, representation(&self.defect_mesh, &sc0, x, &p.pml, p.k).map(|v| inc + v))
            } else {
                let data = cache.entry(j).or_insert_with(|| self.cell_data(sol, j));
                // cylindrical: the marched data is the total field, which is source free here
                let mut v = representation(&self.periodic_mesh, data, shifted, &p.pml, p.k);
                if let (Some(r), Ok(v)) = (&sol.reference, v.as_mut()) {
                    *v += inc + gamma.powi(j as i32) * representation(&self.periodic_mesh, r, shifted, &p.pml, p.k)?;
                }
                (&self.periodic_mesh, v)
            };
            let local = if j == 0 { x } else { shifted };
            match value {
                Ok(v) => {
                    values.push(v);
                    mask.push(if mesh.is_near(local, 2.0) { MASK_NEAR } else { MASK_OK });
                }
                // the target sits on a boundary node
                Err(Error::Singular(_)) => {
                    values.push(c64::new(f64::NAN, f64::NAN));
                    mask.push(MASK_NEAR);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(FieldGrid { points: targets.to_vec(), values, mask })
    }

    /// φˢ of the scattered field on the perturbed part of the surface.
    pub fn scattered_bottom_phi(&self, sol: &Solution) -> Vec<c64> {
        let idx = self.defect_mesh.indices(Segment::Bottom);
        match sol.reference {
            Some(_) => idx.iter().map(|&q| sol.field.phi[q]).collect(),
            None => idx.iter().map(|&q| sol.field.phi[q] - sol.inc.phi[q]).collect(),
        }
    }
}

/// Green's representation ∫ G̃·φˢ − ∂_{ν_c}G̃·|x′|·u dτ by the trapezoidal rule.
pub fn representation(mesh: &BoundaryMesh, data: &BoundaryData, x: Point, pml: &PmlParams, k: f64) -> Result<c64> {
    let xz = pml.point(x);
    let w = mesh.weight();
    let mut acc = ZERO;
    for q in 0..mesh.len() {
        let y = mesh.points[q];
        let yz = pml.point(y);
        let g = green(xz, yz, k)?;
        let dg = green_conormal(xz, yz, mesh.scaled_normal(q), pml.alpha(y[1]), k)?;
        acc += g * data.phi[q] - dg * data.u[q];
    }
    Ok(w * acc)
}

pub const MASK_OK: u8 = 0;
pub const MASK_BELOW: u8 = 1;
pub const MASK_PML: u8 = 2;
pub const MASK_NEAR: u8 = 3;
pub const MASK_SOURCE: u8 = 4;

/// Field values at target points. Mask: 0 valid, 1 below the surface, 2 above H,
/// 3 closer than two node spacings to a cell boundary (value kept, accuracy reduced),
/// 4 at the point source.
#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub points: Vec<Point>,
    pub values: Vec<c64>,
    pub mask: Vec<u8>,
}

/// Solved boundary data on the defect cell.
#[derive(Clone, Debug)]
pub struct Solution {
    pub incidence: Incidence,
    pub inc: BoundaryData,
    /// Total field for cylindrical incidence, scattered field for plane incidence.
    pub field: BoundaryData,
    /// Quasi-periodic reference scattered field on the periodic cell (plane incidence).
    pub reference: Option<BoundaryData>,
}

impl Solution {
    /// φˢ of the outgoing part on the two laterals of cell 0.
    pub fn outgoing_lateral_phi(&self, defect: &BoundaryMesh, periodic: &BoundaryMesh) -> (Vec<c64>, Vec<c64>) {
        let l = self.field.phi_on(defect, Segment::Left);
        let r = self.field.phi_on(defect, Segment::Right);
        match &self.reference {
            None => (l, r),
            Some(re) => (
                l.iter().zip(re.phi_on(periodic, Segment::Left)).map(|(a, b)| a - b).collect(),
                r.iter().zip(re.phi_on(periodic, Segment::Right)).map(|(a, b)| a - b).collect(),
            ),
        }
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Config(format!("incidence angle must lie in (0, pi), got {theta}")));
    }
    Ok(())
}

/// Vertical wavenumber β_j of diffraction order j.
pub fn beta(k: f64, theta: f64, period: f64, j: i64) -> c64 {
    let a = k * theta.cos() + 2.0 * PI * j as f64 / period;
    if a.abs() <= k {
        c64::new((k * k - a * a).sqrt(), 0.0)
    } else {
        c64::new(0.0, (a * a - k * k).sqrt())
    }
}

/// Orders with |α_j| ≤ k.
pub fn propagating_orders(k: f64, theta: f64, period: f64) -> Vec<i64> {
    let c = k * theta.cos();
    let lo = ((-k - c) * period / (2.0 * PI)).ceil() as i64;
    let hi = ((k - c) * period / (2.0 * PI)).floor() as i64;
    (lo..=hi).collect()
}

pub fn wood_check(k: f64, theta: f64, period: f64, tol: f64) -> Result<()> {
    let c = k * theta.cos();
    let lo = ((-k - c) * period / (2.0 * PI)).floor() as i64 - 1;
    let hi = ((k - c) * period / (2.0 * PI)).ceil() as i64 + 1;
    for j in lo..=hi {
        let b = beta(k, theta, period, j).norm();
        if b < tol {
            return Err(Error::WoodAnomaly { order: j, beta: b, tol });
        }
    }
    Ok(())
}

/// Least-squares Rayleigh coefficients R_j, |j| ≤ `orders`, of a field sampled
/// at points of the physical region above the surface:
/// u ≈ Σ R_j exp(i(α_j x₁ + β_j x₂)).
pub fn rayleigh_coefficients(
    samples: &[(Point, c64)],
    k: f64,
    theta: f64,
    period: f64,
    orders: i64,
) -> Result<Vec<(i64, c64)>> {
    use faer::linalg::solvers::SolveLstsq;
    let y0 = samples.iter().map(|(p, _)| p[1]).fold(f64::INFINITY, f64::min);
    let js: Vec<i64> = (-orders..=orders).collect();
    let a = Mat::<c64>::from_fn(samples.len(), js.len(), |r, c| {
        let j = js[c];
        let al = k * theta.cos() + 2.0 * PI * j as f64 / period;
        let b = beta(k, theta, period, j);
        let p = samples[r].0;
        (I * al * p[0] + I * b * (p[1] - y0)).exp()
    });
    let rhs = Mat::<c64>::from_fn(samples.len(), 1, |r, _| samples[r].1);
    let x = a.col_piv_qr().solve_lstsq(&rhs);
    Ok(js
        .iter()
        .enumerate()
        .map(|(c, &j)| (j, x[(c, 0)] * (-I * beta(k, theta, period, j) * y0).exp()))
        .collect())
}

/// Σ over propagating orders of (β_j/β₀)|R_j|².
pub fn energy_balance(coeffs: &[(i64, c64)], k: f64, theta: f64, period: f64) -> f64 {
    let b0 = k * theta.sin();
    let prop = propagating_orders(k, theta, period);
    coeffs
        .iter()
        .filter(|(j, _)| prop.contains(j))
        .map(|(j, r)| beta(k, theta, period, *j).re / b0 * r.norm_sqr())
        .sum()
}
