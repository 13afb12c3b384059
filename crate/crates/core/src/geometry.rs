//! Scattering surfaces, unit cells and the graded Nyström parametrization of
//! each cell boundary.

use crate::error::{Error, Result};
use crate::pml::PmlParams;
use std::f64::consts::PI;

pub type Point = [f64; 2];

/// Tolerance used when matching arc endpoints.
const JOIN_TOL: f64 = 1e-12;

/// A smooth parametric arc, parametrized by s ∈ [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub enum Arc {
    Line { a: Point, b: Point },
    /// Graph x₂ = offset + amplitude·sin(wavenumber·(x₁ − origin) + phase), x₁ from `x0` to `x1`.
    Sine {
        amplitude: f64,
        wavenumber: f64,
        phase: f64,
        offset: f64,
        origin: f64,
        x0: f64,
        x1: f64,
    },
}

/// Exact at both ends and for a == b.
fn lerp(a: f64, b: f64, s: f64) -> f64 {
    if s < 0.5 { a + s * (b - a) } else { b - (1.0 - s) * (b - a) }
}

impl Arc {
    pub fn line(a: Point, b: Point) -> Arc {
        Arc::Line { a, b }
    }

    /// Position and dx/ds.
    pub fn eval(&self, s: f64) -> (Point, Point) {
        match *self {
            Arc::Line { a, b } => ([lerp(a[0], b[0], s), lerp(a[1], b[1], s)], [b[0] - a[0], b[1] - a[1]]),
            Arc::Sine { amplitude, wavenumber, phase, offset, origin, x0, x1 } => {
                let x = lerp(x0, x1, s);
                let arg = wavenumber * (x - origin) + phase;
                let d = x1 - x0;
                (
                    [x, offset + amplitude * arg.sin()],
                    [d, amplitude * wavenumber * arg.cos() * d],
                )
            }
        }
    }

    pub fn start(&self) -> Point {
        self.eval(0.0).0
    }

    pub fn end(&self) -> Point {
        self.eval(1.0).0
    }

    pub fn translated(&self, dx: f64) -> Arc {
        match *self {
            Arc::Line { a, b } => Arc::Line { a: [a[0] + dx, a[1]], b: [b[0] + dx, b[1]] },
            Arc::Sine { amplitude, wavenumber, phase, offset, origin, x0, x1 } => Arc::Sine {
                amplitude,
                wavenumber,
                phase,
                offset,
                origin: origin + dx,
                x0: x0 + dx,
                x1: x1 + dx,
            },
        }
    }

    /// Arc length by 20-point Gauss-Legendre on 8 panels.
    pub fn length(&self) -> f64 {
        match *self {
            Arc::Line { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]),
            Arc::Sine { .. } => {
                let (x, w) = crate::quadrature::gauss_legendre(20);
                let panels = 8;
                let mut total = 0.0;
                for p in 0..panels {
                    let lo = p as f64 / panels as f64;
                    let half = 0.5 / panels as f64;
                    for (xi, wi) in x.iter().zip(&w) {
                        let d = self.eval(lo + half * (1.0 + xi)).1;
                        total += wi * half * d[0].hypot(d[1]);
                    }
                }
                total
            }
        }
    }

    /// x₁ never decreases along the arc.
    fn is_graph_like(&self) -> bool {
        match *self {
            Arc::Line { a, b } => b[0] >= a[0],
            Arc::Sine { x0, x1, .. } => x1 > x0,
        }
    }

    /// Surface height at `x`, for non-vertical arcs covering `x`.
    fn height_at(&self, x: f64) -> Option<f64> {
        match *self {
            Arc::Line { a, b } => {
                if a[0] == b[0] || x < a[0] || x > b[0] {
                    return None;
                }
                let s = (x - a[0]) / (b[0] - a[0]);
                Some((1.0 - s) * a[1] + s * b[1])
            }
            Arc::Sine { amplitude, wavenumber, phase, offset, origin, x0, x1 } => {
                if x < x0 || x > x1 {
                    return None;
                }
                Some(offset + amplitude * (wavenumber * (x - origin) + phase).sin())
            }
        }
    }

    fn max_height(&self) -> f64 {
        match *self {
            Arc::Line { a, b } => a[1].max(b[1]),
            Arc::Sine { amplitude, offset, .. } => offset + amplitude.abs(),
        }
    }
}

/// Shape of the unperturbed periodic surface over one period |x₁| ≤ T/2.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Flat { height: f64 },
    /// x₂ = offset + amplitude·sin(2πx₁/T + phase).
    Sine { amplitude: f64, phase: f64, offset: f64 },
    /// Rectangular grooves centred at x₁ = jT.
    BinaryGrating { depth: f64, width: f64 },
    /// Arcs covering [−T/2, T/2] from left to right.
    Arcs(Vec<Arc>),
}

/// Replacement of the cell |x₁| < T/2.
#[derive(Clone, Debug, PartialEq)]
pub enum Defect {
    None,
    /// Straight segment joining the two cell endpoints of the periodic surface.
    Flat,
    Arcs(Vec<Arc>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseCurve {
    pub period: f64,
    /// Periodic surface over [−T/2, T/2].
    pub cell: Vec<Arc>,
    /// Surface over [−T/2, T/2] replacing the periodic one.
    pub defect: Option<Vec<Arc>>,
}

pub fn build_surface(profile: &Profile, defect: &Defect, period: f64) -> Result<PiecewiseCurve> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Config(format!("period must be positive, got {period}")));
    }
    let h = 0.5 * period;
    let cell = match profile {
        Profile::Flat { height } => vec![Arc::line([-h, *height], [h, *height])],
        Profile::Sine { amplitude, phase, offset } => {
            if *amplitude == 0.0 {
                return Err(Error::Config("sine amplitude must be nonzero".into()));
            }
            vec![Arc::Sine {
                amplitude: *amplitude,
                wavenumber: 2.0 * PI / period,
                phase: *phase,
                offset: *offset,
                origin: 0.0,
                x0: -h,
                x1: h,
            }]
        }
        Profile::BinaryGrating { depth, width } => {
            if !(*depth > 0.0) || !(*width > 0.0) || !(*width < period) {
                return Err(Error::Config(format!(
                    "binary grating needs depth > 0 and 0 < width < period (depth {depth}, width {width})"
                )));
            }
            let w = 0.5 * width;
            vec![
                Arc::line([-h, 0.0], [-w, 0.0]),
                Arc::line([-w, 0.0], [-w, -depth]),
                Arc::line([-w, -depth], [w, -depth]),
                Arc::line([w, -depth], [w, 0.0]),
                Arc::line([w, 0.0], [h, 0.0]),
            ]
        }
        Profile::Arcs(arcs) => arcs.clone(),
    };
    validate_cell(&cell, period, "periodic cell")?;
    let (a, b) = (cell[0].start(), cell[cell.len() - 1].end());
    if (a[1] - b[1]).abs() > JOIN_TOL {
        return Err(Error::Config(format!(
            "periodic cell endpoints differ in height ({} vs {})",
            a[1], b[1]
        )));
    }
    let defect = match defect {
        Defect::None => None,
        Defect::Flat => Some(vec![Arc::line(a, b)]),
        Defect::Arcs(arcs) => {
            validate_cell(arcs, period, "defect")?;
            let (da, db) = (arcs[0].start(), arcs[arcs.len() - 1].end());
            if dist(da, a) > JOIN_TOL || dist(db, b) > JOIN_TOL {
                return Err(Error::Config("defect endpoints must meet the periodic surface".into()));
            }
            Some(arcs.clone())
        }
    };
    Ok(PiecewiseCurve { period, cell, defect })
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn validate_cell(arcs: &[Arc], period: f64, what: &str) -> Result<()> {
    if arcs.is_empty() {
        return Err(Error::Config(format!("{what}: no arcs")));
    }
    let h = 0.5 * period;
    if (arcs[0].start()[0] + h).abs() > JOIN_TOL || (arcs[arcs.len() - 1].end()[0] - h).abs() > JOIN_TOL {
        return Err(Error::Config(format!("{what}: arcs must span x1 in [-T/2, T/2]")));
    }
    for (i, arc) in arcs.iter().enumerate() {
        if !arc.is_graph_like() {
            return Err(Error::Config(format!("{what}: arc {i} runs backwards in x1")));
        }
        if !(arc.length() > 0.0) {
            return Err(Error::Config(format!("{what}: arc {i} has zero length")));
        }
        if i > 0 && dist(arcs[i - 1].end(), arc.start()) > JOIN_TOL {
            return Err(Error::Config(format!("{what}: arcs {} and {i} do not join", i - 1)));
        }
    }
    Ok(())
}

impl PiecewiseCurve {
    pub fn has_defect(&self) -> bool {
        self.defect.is_some()
    }

    pub fn unperturbed(&self) -> PiecewiseCurve {
        PiecewiseCurve { defect: None, ..self.clone() }
    }

    /// Surface arcs of cell j, i.e. over [jT − T/2, jT + T/2].
    pub fn cell_arcs(&self, j: i64) -> Vec<Arc> {
        let src = match (&self.defect, j) {
            (Some(d), 0) => d,
            _ => &self.cell,
        };
        let dx = j as f64 * self.period;
        src.iter().map(|a| if j == 0 { a.clone() } else { a.translated(dx) }).collect()
    }

    /// Arc junctions of cell j where the tangent direction jumps.
    pub fn corners(&self, j: i64) -> Vec<Point> {
        let arcs = self.cell_arcs(j);
        arcs.windows(2)
            .filter(|w| {
                let t0 = w[0].eval(1.0).1;
                let t1 = w[1].eval(0.0).1;
                let cross = t0[0] * t1[1] - t0[1] * t1[0];
                cross.abs() > 1e-12 * t0[0].hypot(t0[1]) * t1[0].hypot(t1[1])
            })
            .map(|w| w[1].start())
            .collect()
    }

    pub fn cell_of(&self, x1: f64) -> i64 {
        (x1 / self.period).round() as i64
    }

    /// Strictly above the surface (GC1 region).
    pub fn is_above(&self, p: Point) -> bool {
        let j = self.cell_of(p[0]);
        let heights: Vec<f64> = self.cell_arcs(j).iter().filter_map(|a| a.height_at(p[0])).collect();
        match heights.iter().cloned().reduce(f64::min) {
            Some(y) => p[1] > y,
            None => false,
        }
    }

    pub fn max_height(&self) -> f64 {
        let mut m = self.cell.iter().map(Arc::max_height).fold(f64::NEG_INFINITY, f64::max);
        if let Some(d) = &self.defect {
            m = m.max(d.iter().map(Arc::max_height).fold(f64::NEG_INFINITY, f64::max));
        }
        m
    }

    pub fn min_height(&self) -> f64 {
        let lo = |arcs: &[Arc]| {
            arcs.iter()
                .flat_map(|a| (0..=256).map(move |i| a.eval(i as f64 / 256.0).0[1]))
                .fold(f64::INFINITY, f64::min)
        };
        let mut m = lo(&self.cell);
        if let Some(d) = &self.defect {
            m = m.min(lo(d));
        }
        m
    }
}

/// The four boundary pieces of a cell, tagged as in the usual cell picture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Segment {
    Left = 1,
    Bottom = 2,
    Right = 3,
    Top = 4,
}

impl Segment {
    fn is_horizontal(self) -> bool {
        matches!(self, Segment::Bottom | Segment::Top)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Defect,
    Periodic,
}

/// A unit cell (or a block of consecutive periods) of the truncated strip.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSpec {
    pub index: i64,
    pub periods: usize,
    pub kind: CellKind,
    pub x_left: f64,
    pub x_right: f64,
    pub bottom: Vec<Arc>,
    /// Heights strictly between the surface and the top where the verticals are split.
    pub breaks: Vec<f64>,
    pub top: f64,
}

impl CellSpec {
    pub fn new(curve: &PiecewiseCurve, j: i64, pml: &PmlParams) -> Result<CellSpec> {
        Self::block(curve, j, 1, pml)
    }

    /// `count` consecutive periods starting at cell j0, merged into one cell.
    pub fn block(curve: &PiecewiseCurve, j0: i64, count: usize, pml: &PmlParams) -> Result<CellSpec> {
        if count == 0 {
            return Err(Error::Config("cell block needs at least one period".into()));
        }
        let mut bottom = Vec::new();
        for j in j0..j0 + count as i64 {
            bottom.extend(curve.cell_arcs(j));
        }
        let top_surface = curve.max_height();
        if !(pml.h > top_surface) {
            return Err(Error::Config(format!(
                "H = {} must lie strictly above the surface (max height {top_surface})",
                pml.h
            )));
        }
        let kind = if curve.has_defect() && j0 <= 0 && 0 < j0 + count as i64 {
            CellKind::Defect
        } else {
            CellKind::Periodic
        };
        let t = curve.period;
        Ok(CellSpec {
            index: j0,
            periods: count,
            kind,
            x_left: (j0 as f64 - 0.5) * t,
            x_right: (j0 as f64 + count as f64 - 0.5) * t,
            bottom,
            breaks: pml.breakpoints(),
            top: pml.top(),
        })
    }

    /// Closed boundary as tagged pieces, counterclockwise from the bottom-left corner.
    fn pieces(&self) -> Vec<(Arc, Segment)> {
        let mut out: Vec<(Arc, Segment)> = self.bottom.iter().map(|a| (a.clone(), Segment::Bottom)).collect();
        let yl = self.bottom[0].start()[1];
        let yr = self.bottom[self.bottom.len() - 1].end()[1];
        let mut right = vec![yr];
        right.extend(self.breaks.iter().cloned());
        right.push(self.top);
        for w in right.windows(2) {
            out.push((Arc::line([self.x_right, w[0]], [self.x_right, w[1]]), Segment::Right));
        }
        // one top piece per period, so a block meshes like its cells side by side
        let width = (self.x_right - self.x_left) / self.periods as f64;
        for q in (0..self.periods).rev() {
            let a = self.x_left + q as f64 * width;
            let b = if q + 1 == self.periods { self.x_right } else { self.x_left + (q + 1) as f64 * width };
            out.push((Arc::line([b, self.top], [a, self.top]), Segment::Top));
        }
        let mut left = vec![self.top];
        left.extend(self.breaks.iter().rev().cloned());
        left.push(yl);
        for w in left.windows(2) {
            out.push((Arc::line([self.x_left, w[0]], [self.x_left, w[1]]), Segment::Left));
        }
        out
    }
}

/// Graded map of [t⁰, t¹] onto [s⁰, s¹] whose derivative vanishes to order p at both ends.
pub fn graded_map(t: f64, t0: f64, t1: f64, s0: f64, s1: f64, p: u32) -> (f64, f64) {
    if t <= t0 {
        return (s0, 0.0);
    }
    if t >= t1 {
        return (s1, 0.0);
    }
    let pf = p as f64;
    let xi = (2.0 * t - (t0 + t1)) / (t1 - t0);
    let c = 0.5 - 1.0 / pf;
    let w1 = c * xi * xi * xi + xi / pf + 0.5;
    let w2 = 1.0 - w1;
    let dw1 = (3.0 * c * xi * xi + 1.0 / pf) * 2.0 / (t1 - t0);
    let a = w1.powi(p as i32);
    let b = w2.powi(p as i32);
    let den = a + b;
    let s = (s0 * b + s1 * a) / den;
    let ds = (s1 - s0) * pf * dw1 * w1.powi(p as i32 - 1) * w2.powi(p as i32 - 1) / (den * den);
    (s, ds)
}

/// Nyström nodes t_k = k/N on a closed cell boundary.
#[derive(Clone, Debug)]
pub struct BoundaryMesh {
    pub n_per_segment: usize,
    pub grading: u32,
    pieces: Vec<(Arc, Segment)>,
    /// Centre and radius when the boundary is a circle instead of graded pieces.
    circle: Option<(Point, f64)>,
    pub points: Vec<Point>,
    /// dx/dτ including the grading factor, τ ∈ [0, 1] running along each piece.
    pub derivs: Vec<Point>,
    pub speeds: Vec<f64>,
    pub tags: Vec<Segment>,
    /// Node sits on a piece junction (corner or graded breakpoint), where the speed vanishes.
    pub breakpoints: Vec<bool>,
    left: Vec<usize>,
    right: Vec<usize>,
    bottom: Vec<usize>,
    top: Vec<usize>,
}

pub fn mesh_cell(cell: &CellSpec, n_per_segment: usize, p: u32) -> Result<BoundaryMesh> {
    if n_per_segment < 2 || n_per_segment % 2 != 0 {
        return Err(Error::Config(format!(
            "points per segment must be even and positive, got {n_per_segment}"
        )));
    }
    if p < 2 {
        return Err(Error::Config(format!("grading exponent must be at least 2, got {p}")));
    }
    let pieces = cell.pieces();
    for (i, (arc, _)) in pieces.iter().enumerate() {
        if !(arc.length() > 0.0) {
            return Err(Error::Config(format!("boundary piece {i} has zero length")));
        }
    }
    let n = n_per_segment;
    let np = pieces.len();
    let total = n * np;
    let mut mesh = BoundaryMesh {
        n_per_segment: n,
        grading: p,
        pieces,
        circle: None,
        points: Vec::with_capacity(total),
        derivs: Vec::with_capacity(total),
        speeds: Vec::with_capacity(total),
        tags: Vec::with_capacity(total),
        breakpoints: Vec::with_capacity(total),
        left: vec![],
        right: vec![],
        bottom: vec![],
        top: vec![],
    };
    for k in 0..total {
        let (piece, m) = (k / n, k % n);
        let tag = mesh.pieces[piece].1;
        let tag = if m == 0 {
            let prev = mesh.pieces[(piece + np - 1) % np].1;
            if prev == tag || tag.is_horizontal() { tag } else { prev }
        } else {
            tag
        };
        let (x, d) = mesh.eval_piece(piece, k as f64 / total as f64);
        mesh.points.push(x);
        mesh.derivs.push(d);
        mesh.speeds.push(d[0].hypot(d[1]));
        mesh.tags.push(tag);
        mesh.breakpoints.push(m == 0);
        match tag {
            Segment::Left => mesh.left.push(k),
            Segment::Bottom => mesh.bottom.push(k),
            Segment::Right => mesh.right.push(k),
            Segment::Top => mesh.top.push(k),
        }
    }
    mesh.left.reverse();
    // make the left side an exact translate of the right one
    for i in 0..mesh.left.len() {
        let (a, b) = (mesh.left[i], mesh.right[i]);
        mesh.points[a] = [cell.x_left, mesh.points[b][1]];
        mesh.derivs[a] = [-mesh.derivs[b][0], -mesh.derivs[b][1]];
        mesh.speeds[a] = mesh.speeds[b];
    }
    Ok(mesh)
}

impl BoundaryMesh {
    /// Uniform counterclockwise nodes on a circle, all tagged as bottom.
    pub fn circle(center: Point, radius: f64, n: usize) -> Result<BoundaryMesh> {
        if n < 2 || n % 2 != 0 || !(radius > 0.0) {
            return Err(Error::Config(format!("circle needs an even node count and positive radius, got {n}, {radius}")));
        }
        let mut mesh = BoundaryMesh {
            n_per_segment: n,
            grading: 0,
            pieces: vec![],
            circle: Some((center, radius)),
            points: vec![],
            derivs: vec![],
            speeds: vec![],
            tags: vec![Segment::Bottom; n],
            breakpoints: vec![false; n],
            left: vec![],
            right: vec![],
            bottom: (0..n).collect(),
            top: vec![],
        };
        for k in 0..n {
            let (x, d) = mesh.eval(k as f64 / n as f64);
            mesh.points.push(x);
            mesh.derivs.push(d);
            mesh.speeds.push(d[0].hypot(d[1]));
        }
        Ok(mesh)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Trapezoid weight in the piece parameter, 1/n.
    pub fn weight(&self) -> f64 {
        1.0 / self.n_per_segment as f64
    }

    /// Position and dx/dτ at any t (taken modulo 1).
    pub fn eval(&self, t: f64) -> (Point, Point) {
        let t = t.rem_euclid(1.0);
        if let Some((c, r)) = self.circle {
            let (s, co) = (2.0 * PI * t).sin_cos();
            return ([c[0] + r * co, c[1] + r * s], [-2.0 * PI * r * s, 2.0 * PI * r * co]);
        }
        let np = self.pieces.len();
        let piece = ((t * np as f64).floor() as usize).min(np - 1);
        self.eval_piece(piece, t)
    }

    fn eval_piece(&self, piece: usize, t: f64) -> (Point, Point) {
        let total = (self.n_per_segment * self.pieces.len()) as f64;
        let t0 = (piece * self.n_per_segment) as f64 / total;
        let t1 = ((piece + 1) * self.n_per_segment) as f64 / total;
        let (s, ds) = graded_map(t, t0, t1, 0.0, 1.0, self.grading);
        // derivative with respect to the piece parameter τ = (t − t⁰)/(t¹ − t⁰)
        let ds = ds * (t1 - t0);
        let (x, dx) = self.pieces[piece].0.eval(s);
        (x, [dx[0] * ds, dx[1] * ds])
    }

    /// Node indices of a segment; the verticals are listed from bottom to top.
    pub fn indices(&self, seg: Segment) -> &[usize] {
        match seg {
            Segment::Left => &self.left,
            Segment::Bottom => &self.bottom,
            Segment::Right => &self.right,
            Segment::Top => &self.top,
        }
    }

    pub fn lateral_len(&self) -> usize {
        self.left.len()
    }

    /// Outward normal times the speed, (x₂′, −x₁′).
    pub fn scaled_normal(&self, k: usize) -> Point {
        let d = self.derivs[k];
        [d[1], -d[0]]
    }

    pub fn translated(&self, dx: f64) -> BoundaryMesh {
        let mut m = self.clone();
        for (arc, _) in &mut m.pieces {
            *arc = arc.translated(dx);
        }
        if let Some((c, _)) = &mut m.circle {
            c[0] += dx;
        }
        for p in &mut m.points {
            p[0] += dx;
        }
        m
    }

    /// Interior angle of the boundary at node k (π away from corners).
    pub fn interior_angle(&self, k: usize) -> f64 {
        if !self.breakpoints[k] {
            return PI;
        }
        let np = self.pieces.len();
        let piece = k / self.n_per_segment;
        let t0 = self.pieces[(piece + np - 1) % np].0.eval(1.0).1;
        let t1 = self.pieces[piece].0.eval(0.0).1;
        let turn = (t0[0] * t1[1] - t0[1] * t1[0]).atan2(t0[0] * t1[0] + t0[1] * t1[1]);
        PI - turn
    }

    /// Distance from `p` to the nearest node.
    pub fn node_distance(&self, p: Point) -> f64 {
        self.points.iter().map(|q| dist(*q, p)).fold(f64::INFINITY, f64::min)
    }

    /// True when `p` lies within `factor` local node spacings of the boundary,
    /// where the plain trapezoid rule loses accuracy.
    pub fn is_near(&self, p: Point, factor: f64) -> bool {
        let n = self.len();
        (0..n).any(|k| {
            let a = self.points[k];
            let b = self.points[(k + 1) % n];
            seg_dist(p, a, b) < factor * dist(a, b)
        })
    }

    /// Largest gap between consecutive nodes.
    pub fn max_spacing(&self) -> f64 {
        let n = self.len();
        (0..n).map(|k| dist(self.points[k], self.points[(k + 1) % n])).fold(0.0, f64::max)
    }
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    if l2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}
