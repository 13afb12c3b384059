//! `solve`, `sweep` and `diag`.

use crate::config::{ReferenceKind, RunConfig, SweepParam};
use crate::output::{num, write_dump, write_json, Csv, VERSION};
use crate::CliError;
use num_complex::Complex64 as C64;
use pmlbie::geometry::{Point, Segment};
use pmlbie::kernels::{green, green_conormal};
use pmlbie::ntd::{riccati_residual, RdpLevels};
use pmlbie::scattering::{Incidence, Solution, Solver, MASK_SOURCE};
use serde::Serialize;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Runs `f` on every item with up to `workers` threads; results keep input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|sc| {
        for _ in 0..workers {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every item processed")).collect()
}

fn solve(solver: &Solver, inc: Incidence) -> Result<Solution, CliError> {
    Ok(match inc {
        Incidence::Cylindrical { source } => solver.solve_point_source(source)?,
        Incidence::Plane { theta } => {
            let r = solver.solve_plane_reference(theta)?;
            solver.solve_plane_defected(theta, &r)?
        }
    })
}

fn create_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn sup(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rel_error(a: &[C64], exact: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(exact).map(|(x, y)| x - y).collect();
    sup(&d) / sup(exact)
}

/// Image source of the flat surface x₂ = h.
fn image_of(cfg: &RunConfig, source: Point) -> Point {
    let h = cfg.surface.height.unwrap_or(0.0);
    [source[0], 2.0 * h - source[1]]
}

/// Exact φˢ of the scattered field on the surface nodes of the defect cell (flat surface, point source).
fn analytic_bottom_phi(cfg: &RunConfig, solver: &Solver, source: Point) -> Result<Vec<C64>, CliError> {
    let m = &solver.defect_mesh;
    let pml = &solver.problem.pml;
    let img = pml.point(image_of(cfg, source));
    m.indices(Segment::Bottom)
        .iter()
        .map(|&q| {
            if m.speeds[q] == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            let y = m.points[q];
            Ok(-green_conormal(img, pml.point(y), m.scaled_normal(q), pml.alpha(y[1]), solver.problem.k)?)
        })
        .collect()
}

/// G(x, x*) − G(x, x*_imag).
fn analytic_field(cfg: &RunConfig, solver: &Solver, source: Point, x: Point) -> Result<C64, CliError> {
    let pml = &solver.problem.pml;
    let k = solver.problem.k;
    Ok(green(pml.point(x), pml.point(source), k)? - green(pml.point(x), pml.point(image_of(cfg, source)), k)?)
}

fn segment_name(solver: &Solver) -> Vec<&'static str> {
    let m = &solver.defect_mesh;
    let mut names = vec![""; m.len()];
    for (seg, name) in [
        (Segment::Left, "left"),
        (Segment::Bottom, "bottom"),
        (Segment::Right, "right"),
        (Segment::Top, "top"),
    ] {
        for &q in m.indices(seg) {
            names[q] = name;
        }
    }
    names
}

#[derive(Serialize)]
struct SolveDiagnostics {
    version: &'static str,
    config_hash: String,
    wavenumber: f64,
    nodes_per_cell: usize,
    lateral_nodes: usize,
    rdp_level: usize,
    spectral_radius_plus: f64,
    spectral_radius_minus: f64,
    pivot_ratio: f64,
    ill_conditioned: bool,
    riccati_residual: f64,
    /// Relative sup error of φˢ on the surface against the image-source solution.
    e_rel_analytic: Option<f64>,
    seconds: Option<Timings>,
}

#[derive(Serialize)]
struct Timings {
    setup: f64,
    solve: f64,
    field: f64,
}

pub fn run_solve(cfg: &RunConfig, out: &Path, workers: usize) -> Result<(), CliError> {
    create_dir(out)?;
    let hash = cfg.hash();
    let t0 = Instant::now();
    let solver = Solver::new(cfg.problem()?)?;
    let t_setup = t0.elapsed().as_secs_f64();
    let inc = cfg.incidence()?;
    let t1 = Instant::now();
    let sol = solve(&solver, inc)?;
    let t_solve = t1.elapsed().as_secs_f64();

    let m = &solver.defect_mesh;
    let names = segment_name(&solver);
    let mut csv = Csv::create(
        &out.join("boundary_data.csv"),
        &hash,
        &["segment", "node", "x1", "x2", "u_re", "u_im", "phi_re", "phi_im"],
    )?;
    for q in 0..m.len() {
        let (u, p) = (sol.field.u[q], sol.field.phi[q]);
        csv.row(&[
            names[q].to_string(),
            q.to_string(),
            num(m.points[q][0]),
            num(m.points[q][1]),
            num(u.re),
            num(u.im),
            num(p.re),
            num(p.im),
        ])?;
    }
    csv.finish()?;

    let source = match inc {
        Incidence::Cylindrical { source } if cfg.has_analytic_solution() => Some(source),
        _ => None,
    };
    let e_rel = match source {
        Some(s) => Some(rel_error(&solver.scattered_bottom_phi(&sol), &analytic_bottom_phi(cfg, &solver, s)?)),
        None => None,
    };

    let t2 = Instant::now();
    if cfg.output.field_grid {
        let o = &cfg.output;
        let coord = |r: [f64; 2], n: usize, i: usize| {
            if n == 1 { r[0] } else { r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64 }
        };
        let mut targets = Vec::with_capacity(o.nx1 * o.nx2);
        for j in 0..o.nx2 {
            for i in 0..o.nx1 {
                targets.push([coord(o.x1, o.nx1, i), coord(o.x2, o.nx2, j)]);
            }
        }
        let chunk = targets.len().div_ceil(workers.max(1) * 4).max(1);
        let chunks: Vec<&[Point]> = targets.chunks(chunk).collect();
        let grids = parallel_map(&chunks, workers, |c| solver.evaluate_field(&sol, c));
        let mut header = vec!["x1", "x2", "re", "im", "mask"];
        if source.is_some() {
            header.push("abs_err");
        }
        let mut csv = Csv::create(&out.join("field_grid.csv"), &hash, &header)?;
        for g in grids {
            let g = g?;
            for ((x, v), mask) in g.points.iter().zip(&g.values).zip(&g.mask) {
                let mut row = vec![num(x[0]), num(x[1]), num(v.re), num(v.im), mask.to_string()];
                if let Some(s) = source {
                    let err = if *mask != MASK_SOURCE && v.re.is_finite() { (v - analytic_field(cfg, &solver, s, *x)?).norm() } else { f64::NAN };
                    row.push(num(err));
                }
                csv.row(&row)?;
            }
        }
        csv.finish()?;
    }
    let t_field = t2.elapsed().as_secs_f64();

    let (rp, rm) = solver.ops.spectral_radii()?;
    let diag = SolveDiagnostics {
        version: VERSION,
        config_hash: hash,
        wavenumber: solver.problem.k,
        nodes_per_cell: m.len(),
        lateral_nodes: m.lateral_len(),
        rdp_level: solver.ops.level,
        spectral_radius_plus: rp,
        spectral_radius_minus: rm,
        pivot_ratio: solver.ops.pivot_ratio,
        ill_conditioned: solver.ops.ill_conditioned(),
        riccati_residual: riccati_residual(&solver.ops, &solver.blocks),
        e_rel_analytic: e_rel,
        seconds: cfg.output.timing.then_some(Timings { setup: t_setup, solve: t_solve, field: t_field }),
    };
    write_json(&out.join("diagnostics.json"), &diag)
}

/// φˢ of the scattered field on the surface of the defect cell.
fn surface_phi(cfg: &RunConfig, s: f64, l: f64, n: usize) -> Result<Vec<C64>, CliError> {
    let solver = Solver::new(cfg.problem_with(s, l, n)?)?;
    let sol = solve(&solver, cfg.incidence()?)?;
    Ok(solver.scattered_bottom_phi(&sol))
}

pub fn run_sweep(cfg: &RunConfig, out: &Path, workers: usize) -> Result<(), CliError> {
    let sw = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing key `sweep`".into()))?;
    create_dir(out)?;
    let hash = cfg.hash();
    let values = cfg.sweep_values();
    let point = |v: f64| match sw.param {
        SweepParam::S => (v, cfg.pml.l),
        SweepParam::L => (cfg.pml.s, v),
    };
    let n = cfg.mesh.n_per_segment;
    let reference = sw.reference.unwrap_or(if cfg.has_analytic_solution() {
        ReferenceKind::Analytic
    } else {
        ReferenceKind::SelfReference
    });
    let exact: Vec<C64> = match reference {
        ReferenceKind::Analytic => {
            let Incidence::Cylindrical { source } = cfg.incidence()? else {
                return Err(CliError::Config("analytic reference needs cylindrical incidence".into()));
            };
            let solver = Solver::new(cfg.problem()?)?;
            analytic_bottom_phi(cfg, &solver, source)?
        }
        ReferenceKind::SelfReference => {
            let smax = values.iter().map(|&v| point(v).0).fold(cfg.pml.s, f64::max);
            let lmax = values.iter().map(|&v| point(v).1).fold(cfg.pml.l, f64::max);
            // node 2i of a piece at 2n points sits where node i sits at n points
            let fine = surface_phi(cfg, smax, lmax, 2 * n)?;
            (0..fine.len() / 2).map(|a| fine[2 * n * (a / n) + 2 * (a % n)]).collect()
        }
    };
    let results = parallel_map(&values, workers, |&v| {
        let t = Instant::now();
        let (s, l) = point(v);
        let r = surface_phi(cfg, s, l, n).map(|phi| rel_error(&phi, &exact));
        (r, t.elapsed().as_secs_f64())
    });
    let name = match sw.param {
        SweepParam::S => "S",
        SweepParam::L => "L",
    };
    let mut csv = Csv::create(&out.join("convergence.csv"), &hash, &["param", "value", "e_rel", "seconds"])?;
    let mut failures = vec![];
    for (&v, (r, secs)) in values.iter().zip(&results) {
        let e = match r {
            Ok(e) => *e,
            Err(err) => {
                failures.push(format!("{name} = {}: {err}", num(v)));
                f64::NAN
            }
        };
        let secs = if cfg.output.timing { *secs } else { 0.0 };
        csv.row(&[name.to_string(), num(v), num(e), num(secs)])?;
    }
    for f in &failures {
        csv.comment(&format!("failed {f}"))?;
    }
    csv.finish()?;
    for f in &failures {
        eprintln!("warning: sweep point failed, {f}");
    }
    Ok(())
}

#[derive(Serialize)]
struct Spectral {
    version: &'static str,
    config_hash: String,
    rdp_level: usize,
    spectral_radius_plus: f64,
    spectral_radius_minus: f64,
    pivot_ratio: f64,
    ill_conditioned: bool,
}

pub fn run_diagnostics(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    create_dir(out)?;
    let hash = cfg.hash();
    let solver = Solver::new(cfg.problem()?)?;
    let levels = RdpLevels::new(&solver.blocks, cfg.mesh.rdp_level)?;
    let scale = solver.blocks.norm_inf();
    let mut csv = Csv::create(&out.join("riccati_residual.csv"), &hash, &["l", "e_ric", "e_ric_rel"])?;
    for l in 1..=cfg.mesh.rdp_level {
        let e = riccati_residual(&levels.marching(l)?, &solver.blocks);
        csv.row(&[l.to_string(), num(e), num(e / scale)])?;
    }
    csv.finish()?;

    let mut csv = Csv::create(&out.join("lateral_decay.csv"), &hash, &["j", "phi_norm"])?;
    if cfg.output.decay_cells > 0 {
        let sol = solve(&solver, cfg.incidence()?)?;
        for j in 1..=cfg.output.decay_cells {
            let (_, p3) = solver.march(&sol, j as i64);
            csv.row(&[j.to_string(), num(sup(&p3))])?;
        }
    }
    csv.finish()?;

    let ops = &solver.ops;
    let (rp, rm) = ops.spectral_radii()?;
    write_json(
        &out.join("spectral.json"),
        &Spectral {
            version: VERSION,
            config_hash: hash,
            rdp_level: ops.level,
            spectral_radius_plus: rp,
            spectral_radius_minus: rm,
            pivot_ratio: ops.pivot_ratio,
            ill_conditioned: ops.ill_conditioned(),
        },
    )?;
    if cfg.output.dump {
        write_dump(
            &out.join("operators.bin"),
            &[("R_plus", &ops.rp_plus), ("R_minus", &ops.rp_minus), ("N_plus", &ops.n_plus), ("N_minus", &ops.n_minus)],
        )?;
    }
    Ok(())
}
