//! Cell Neumann-to-Dirichlet matrices, lateral blocks, recursive doubling and
//! the marching operators of the two semi-infinite waveguides.
//!
//! Densities on every cell are taken with respect to that cell's outward
//! normal, and lateral vectors are ordered from bottom to top on both sides.
//! Across an interface φ changes sign: φ_{j+1,1} = −φ_{j,3}. With this
//! convention the right marching operator satisfies φ_{j,3} = R⁺·φ_{j,1} and
//! N₁₀ + (N₀₀+N₁₁)R⁺ + N₀₁(R⁺)² = 0, while the left one satisfies
//! φ_{j,1} = R⁻·φ_{j,3} and N₀₁ + (N₀₀+N₁₁)R⁻ + N₁₀(R⁻)² = 0. On cell 0 the
//! truncation conditions read u_{0,3} = −N⁺·φ_{0,3} and u_{0,1} = −N⁻·φ_{0,1}.

use crate::dense::{lu_solve, norm_inf, select, spectral_radius, CMat};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, Segment};
use crate::kernels::LayerMatrices;
use crate::pml::TopBc;
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{c64, Mat};

/// u = Nu·φˢ on the whole closed boundary.
#[derive(Clone, Debug)]
pub struct CellNtD {
    pub nu: CMat,
    pub pivot_ratio: f64,
    /// ‖(K − K₀[1])·Nu − S‖_max / ‖S‖_max.
    pub residual: f64,
}

pub fn cell_ntd(layers: &LayerMatrices) -> Result<CellNtD> {
    let a = CellBie::new(layers).a;
    let solved = lu_solve(&a, &layers.s_mat, "cell NtD (K - K0[1])")?;
    let r = &a * &solved.x - &layers.s_mat;
    let residual = r.norm_max() / layers.s_mat.norm_max();
    if !(residual <= 1e-10) {
        return Err(Error::SingularSystem { what: "cell NtD residual".into(), cond: solved.pivot_ratio });
    }
    Ok(CellNtD { nu: solved.x, pivot_ratio: solved.pivot_ratio, residual })
}

/// Maps lateral densities to the eliminated bottom/top data.
#[derive(Clone, Debug)]
pub struct Recovery {
    /// Node indices (bottom then top) the rows refer to.
    pub nodes: Vec<usize>,
    /// φˢ on `nodes` from [φ_left; φ_right].
    pub phi: CMat,
    /// u on `nodes` from [φ_left; φ_right].
    pub u: CMat,
}

/// Lateral block operator [u₁; u₃] = [N₀₀ N₀₁; N₁₀ N₁₁]·[φ₁; φ₃].
#[derive(Clone, Debug)]
pub struct NtDBlocks {
    pub n00: CMat,
    pub n01: CMat,
    pub n10: CMat,
    pub n11: CMat,
    pub recovery: Option<Recovery>,
    pub pivot_ratio: f64,
}

impl NtDBlocks {
    pub fn lateral_len(&self) -> usize {
        self.n00.nrows()
    }

    /// The full 2N₁×2N₁ lateral matrix.
    pub fn full(&self) -> CMat {
        let m = self.lateral_len();
        Mat::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
            (true, true) => self.n00[(i, j)],
            (true, false) => self.n01[(i, j - m)],
            (false, true) => self.n10[(i - m, j)],
            (false, false) => self.n11[(i - m, j - m)],
        })
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.full())
    }
}

fn split_blocks(full: &CMat, m: usize) -> [CMat; 4] {
    [
        Mat::from_fn(m, m, |i, j| full[(i, j)]),
        Mat::from_fn(m, m, |i, j| full[(i, j + m)]),
        Mat::from_fn(m, m, |i, j| full[(i + m, j)]),
        Mat::from_fn(m, m, |i, j| full[(i + m, j + m)]),
    ]
}

pub fn eliminate_topbottom(ntd: &CellNtD, mesh: &BoundaryMesh, top_bc: TopBc) -> Result<NtDBlocks> {
    let nu = &ntd.nu;
    let lat: Vec<usize> = mesh.indices(Segment::Left).iter().chain(mesh.indices(Segment::Right)).cloned().collect();
    let bottom = mesh.indices(Segment::Bottom);
    let top = mesh.indices(Segment::Top);
    let m = mesh.lateral_len();
    if mesh.indices(Segment::Right).len() != m {
        return Err(Error::Config("left and right lateral node counts differ".into()));
    }
    let nodes: Vec<usize> = bottom.iter().chain(top).cloned().collect();
    let (nlat, phi, u, ratio) = match top_bc {
        TopBc::Dirichlet => {
            let t = lu_solve(&select(nu, &nodes, &nodes), &select(nu, &nodes, &lat), "top/bottom elimination")?;
            let phi = -t.x;
            let nlat = select(nu, &lat, &lat) + select(nu, &lat, &nodes) * &phi;
            let u = Mat::<c64>::zeros(nodes.len(), 2 * m);
            (nlat, phi, u, t.pivot_ratio)
        }
        TopBc::Neumann => {
            let t = lu_solve(&select(nu, bottom, bottom), &select(nu, bottom, &lat), "bottom elimination")?;
            let phi_b = -t.x;
            let nlat = select(nu, &lat, &lat) + select(nu, &lat, bottom) * &phi_b;
            let u_top = select(nu, top, &lat) + select(nu, top, bottom) * &phi_b;
            let nb = bottom.len();
            let phi = Mat::from_fn(nodes.len(), 2 * m, |i, j| if i < nb { phi_b[(i, j)] } else { c64::new(0.0, 0.0) });
            let u = Mat::from_fn(nodes.len(), 2 * m, |i, j| if i < nb { c64::new(0.0, 0.0) } else { u_top[(i - nb, j)] });
            (nlat, phi, u, t.pivot_ratio)
        }
    };
    let [n00, n01, n10, n11] = split_blocks(&nlat, m);
    Ok(NtDBlocks { n00, n01, n10, n11, recovery: Some(Recovery { nodes, phi, u }), pivot_ratio: ratio })
}

/// The discretized boundary relation (K − K₀[1])·u = S·φˢ of one cell.
#[derive(Clone, Debug)]
pub struct CellBie {
    pub a: CMat,
    pub s: CMat,
}

impl CellBie {
    pub fn new(layers: &LayerMatrices) -> CellBie {
        let n = layers.s_mat.nrows();
        let a = Mat::from_fn(n, n, |i, j| {
            let v = layers.k_mat[(i, j)];
            if i == j { v - layers.k0_one[i] } else { v }
        });
        CellBie { a, s: layers.s_mat.clone() }
    }
}

/// Same blocks as [`eliminate_topbottom`], obtained by solving the boundary
/// relation with the bottom and top conditions built in instead of inverting
/// K − K₀[1] first. The full NtD map does not exist when k² is a Neumann
/// eigenvalue of the cell (for a flat cell of width T this happens at kT/π ∈ ℕ,
/// with an eigenfunction independent of x₂), while this mixed problem stays
/// solvable under a Dirichlet top.
pub fn eliminate_mixed(bie: &CellBie, mesh: &BoundaryMesh, top_bc: TopBc) -> Result<NtDBlocks> {
    let n = mesh.len();
    let lat: Vec<usize> = mesh.indices(Segment::Left).iter().chain(mesh.indices(Segment::Right)).cloned().collect();
    let bottom = mesh.indices(Segment::Bottom);
    let top = mesh.indices(Segment::Top);
    let m = mesh.lateral_len();
    if mesh.indices(Segment::Right).len() != m {
        return Err(Error::Config("left and right lateral node counts differ".into()));
    }
    let nodes: Vec<usize> = bottom.iter().chain(top).cloned().collect();
    let dirichlet_top = top_bc == TopBc::Dirichlet;
    // unknowns: u on the laterals, then per bottom/top node φ (u = 0) or u (Neumann top, φ = 0)
    let mut mat = Mat::<c64>::zeros(n, n);
    for (c, &q) in lat.iter().enumerate() {
        for i in 0..n {
            mat[(i, c)] = bie.a[(i, q)];
        }
    }
    for (c, &q) in nodes.iter().enumerate() {
        let u_unknown = !dirichlet_top && mesh.tags[q] == Segment::Top;
        for i in 0..n {
            mat[(i, 2 * m + c)] = if u_unknown { bie.a[(i, q)] } else { -bie.s[(i, q)] };
        }
    }
    let rhs = select(&bie.s, &(0..n).collect::<Vec<_>>(), &lat);
    let solved = lu_solve(&mat, &rhs, "mixed cell problem")?;
    let x = solved.x;
    let nlat = Mat::from_fn(2 * m, 2 * m, |i, j| x[(i, j)]);
    let nb = bottom.len();
    let phi = Mat::from_fn(nodes.len(), 2 * m, |i, j| {
        if dirichlet_top || i < nb { x[(2 * m + i, j)] } else { c64::new(0.0, 0.0) }
    });
    let u = Mat::from_fn(nodes.len(), 2 * m, |i, j| {
        if dirichlet_top || i < nb { c64::new(0.0, 0.0) } else { x[(2 * m + i, j)] }
    });
    let [n00, n01, n10, n11] = split_blocks(&nlat, m);
    Ok(NtDBlocks { n00, n01, n10, n11, recovery: Some(Recovery { nodes, phi, u }), pivot_ratio: solved.pivot_ratio })
}

/// Blocks of two merged copies of the input cell.
pub fn rdp_step(b: &NtDBlocks) -> Result<NtDBlocks> {
    let s = &b.n00 + &b.n11;
    let lu = s.partial_piv_lu();
    let ratio = pivot_ratio(&lu)?;
    let a = lu.solve(&b.n10);
    let bb = lu.solve(&b.n01);
    Ok(NtDBlocks {
        n00: &b.n00 - &b.n01 * &a,
        n01: &b.n01 * &bb,
        n10: &b.n10 * &a,
        n11: &b.n11 - &b.n10 * &bb,
        recovery: None,
        pivot_ratio: ratio,
    })
}

fn pivot_ratio(lu: &PartialPivLu<c64>) -> Result<f64> {
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..u.nrows() {
        let d = u[(i, i)].norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if !(lo > 0.0) || !(hi / lo).is_finite() {
        return Err(Error::SingularSystem { what: "N00 + N11 in the doubling step".into(), cond: f64::INFINITY });
    }
    Ok(hi / lo)
}

/// Doubling levels 0..=l of a periodic cell with the factorizations of N₀₀+N₁₁.
pub struct RdpLevels {
    pub levels: Vec<NtDBlocks>,
    lus: Vec<PartialPivLu<c64>>,
}

impl RdpLevels {
    pub fn new(blocks0: &NtDBlocks, l: usize) -> Result<RdpLevels> {
        let mut levels = vec![blocks0.clone()];
        let mut lus = Vec::with_capacity(l + 1);
        for j in 0..=l {
            let cur = &levels[j];
            let lu = (&cur.n00 + &cur.n11).partial_piv_lu();
            pivot_ratio(&lu)?;
            lus.push(lu);
            if j < l {
                let next = rdp_step(cur)?;
                levels.push(next);
            }
        }
        Ok(RdpLevels { levels, lus })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Marching operators truncated at level l ≤ depth.
    pub fn marching(&self, l: usize) -> Result<MarchingOps> {
        if l > self.depth() {
            return Err(Error::Config(format!("requested level {l} beyond computed depth {}", self.depth())));
        }
        let top = &self.levels[l];
        let lu = &self.lus[l];
        let mut mp = -lu.solve(&top.n10);
        let mut mm = -lu.solve(&top.n01);
        let n_plus = &top.n00 + &top.n01 * &mp;
        let n_minus = &top.n11 + &top.n10 * &mm;
        for j in (0..l).rev() {
            let b = &self.levels[j];
            let lu = &self.lus[j];
            mp = -lu.solve(&(&b.n10 - &b.n01 * &mp));
            mm = -lu.solve(&(&b.n01 - &b.n10 * &mm));
        }
        let max_ratio = self.lus[..=l].iter().map(|lu| pivot_ratio(lu).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
        Ok(MarchingOps { rp_plus: mp, rp_minus: mm, n_plus, n_minus, level: l, pivot_ratio: max_ratio })
    }
}

#[derive(Clone, Debug)]
pub struct MarchingOps {
    pub rp_plus: CMat,
    pub rp_minus: CMat,
    pub n_plus: CMat,
    pub n_minus: CMat,
    pub level: usize,
    /// Worst pivot ratio of N₀₀+N₁₁ over the doubling levels used.
    pub pivot_ratio: f64,
}

impl MarchingOps {
    pub fn spectral_radii(&self) -> Result<(f64, f64)> {
        Ok((spectral_radius(&self.rp_plus)?, spectral_radius(&self.rp_minus)?))
    }

    pub fn ill_conditioned(&self) -> bool {
        self.pivot_ratio > crate::dense::COND_WARN
    }
}

pub fn solve_marching(blocks0: &NtDBlocks, l: usize) -> Result<MarchingOps> {
    if l == 0 {
        return Err(Error::Config("doubling level must be at least 1".into()));
    }
    RdpLevels::new(blocks0, l)?.marching(l)
}

/// ‖N₁₀ + (N₁₁+N₀₀)R⁺ + N₀₁(R⁺)²‖∞.
pub fn riccati_residual(ops: &MarchingOps, blocks0: &NtDBlocks) -> f64 {
    let r = &ops.rp_plus;
    let res = &blocks0.n10 + (&blocks0.n11 + &blocks0.n00) * r + &blocks0.n01 * (r * r);
    norm_inf(&res)
}

/// Same residual for the left operator, N₀₁ + (N₀₀+N₁₁)R⁻ + N₁₀(R⁻)².
pub fn riccati_residual_minus(ops: &MarchingOps, blocks0: &NtDBlocks) -> f64 {
    let r = &ops.rp_minus;
    let res = &blocks0.n01 + (&blocks0.n11 + &blocks0.n00) * r + &blocks0.n10 * (r * r);
    norm_inf(&res)
}
