use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hypfill::acceptance;
use hypfill::boundary::{
    check_proposition_fillability, check_tall, classify_geodesic_curve, oscillation_check, trace_surface_boundary,
    FillabilityOptions, GeodesicBoundarySet, PiecewiseBoundaryCurve, TraceError, TraceOptions, Witness,
};
use hypfill::families::{
    build_mesh, catenoid_profile, tall_profile, BoundaryArc, Family, FamilyError, RuledSurface, TallRectangle,
};
use hypfill::mesh::SurfaceMesh;
use hypfill::plateau::{solve_with, DirichletProblem, Edges, PlateauError, SolveOptions, SolveResult};
use hypfill::residual::mesh_mean_curvature;
use hypfill::{AmbientPoint, GeodesicH2, HPoint, IdealPoint};

use crate::config::{write_file, Failure, Report, RunConfig};
use crate::{ClassifyArgs, Command, FamilyArgs, FamilyKind, SolveArgs, TableArgs, TableKind, TraceArgs};

pub fn dispatch(cmd: &Command, cfg: &mut RunConfig) -> (&'static str, Result<Report, Failure>) {
    match cmd {
        Command::Family(a) => ("family", family(a, cfg)),
        Command::Table(a) => ("table", table(a, cfg)),
        Command::Solve(a) => ("solve", solve(a, cfg)),
        Command::Classify(a) => ("classify", classify(a, cfg)),
        Command::Trace(a) => ("trace", trace(a, cfg)),
        Command::Accept => ("accept", accept(cfg)),
    }
}

fn family_failure(e: FamilyError) -> Failure {
    match e {
        FamilyError::QuadratureFailure(_) => Failure::numerical(e.to_string()),
        _ => Failure::validation(e.to_string()),
    }
}

fn parse_ideal(s: &str) -> Result<IdealPoint<f64>, Failure> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(IdealPoint::Infinity);
    }
    let v: f64 = t.parse().map_err(|_| Failure::validation(format!("{s:?} is not an ideal point")))?;
    IdealPoint::finite(v).map_err(|e| Failure::validation(e.to_string()))
}

fn ideal_or(s: &Option<String>, default: IdealPoint<f64>) -> Result<IdealPoint<f64>, Failure> {
    s.as_deref().map_or(Ok(default), parse_ideal)
}

fn read_input(cfg: &mut RunConfig, p: &Path) -> Result<String, Failure> {
    cfg.inputs.push(p.to_path_buf());
    fs::read_to_string(p).map_err(|e| Failure::validation(format!("cannot read {}: {e}", p.display())))
}

fn family(a: &FamilyArgs, cfg: &mut RunConfig) -> Result<Report, Failure> {
    let res = a.res.or(cfg.res).unwrap_or(32);
    cfg.res = Some(res);
    let origin = IdealPoint::Finite(0.0);
    let mut extra = json!({});
    let mut profile_csv = None;
    let fam = match a.kind {
        FamilyKind::Slice => Family::HorizontalSlice { t: a.t.unwrap_or(0.0) },
        FamilyKind::Flat => {
            let g = GeodesicH2::new(ideal_or(&a.q1, IdealPoint::Finite(-1.0))?, ideal_or(&a.q2, IdealPoint::Finite(1.0))?)
                .map_err(|e| Failure::validation(e.to_string()))?;
            Family::VerticalFlat { geodesic: g }
        }
        FamilyKind::Tall => {
            let arc = BoundaryArc {
                q1: ideal_or(&a.q1, origin)?,
                q2: ideal_or(&a.q2, IdealPoint::Infinity)?,
                ccw: true,
            };
            let c = a.c.unwrap_or(0.5);
            let bottom = a.a.unwrap_or(0.0);
            let tr = if c == 1.0 {
                TallRectangle::semi_infinite(arc, bottom, true)
            } else {
                TallRectangle::finite(c, arc, bottom)
            }
            .map_err(family_failure)?;
            let ell = tr.profile.ell;
            println!("ell = {ell}");
            extra = json!({ "C": c, "a": bottom, "s_min": tr.profile.s_min, "ell": if ell.is_finite() { json!(ell) } else { json!("inf") }, "exceeds_pi": ell > std::f64::consts::PI });
            let mut s = String::from("s,f\n");
            for (x, f) in &tr.profile.f_samples {
                let _ = writeln!(s, "{x},{f}");
            }
            profile_csv = Some(s);
            Family::TallRectangle(tr)
        }
        FamilyKind::Catenoid => {
            let c = a.c.unwrap_or(1.0);
            let p = catenoid_profile(c).map_err(family_failure)?;
            let two_b = 2.0 * p.half_height;
            println!("2b = {two_b}");
            extra = json!({ "C": c, "r_neck": p.r_neck, "two_b": two_b, "below_pi": two_b < std::f64::consts::PI });
            let mut s = String::from("t,r\n");
            for (t, r) in &p.r_samples {
                let _ = writeln!(s, "{t},{r}");
            }
            profile_csv = Some(s);
            Family::Catenoid {
                profile: p,
                center: HPoint::origin(),
            }
        }
        FamilyKind::Diagonal => Family::Ruled(RuledSurface::Diagonal {
            axis: GeodesicH2::new(origin, IdealPoint::Infinity).map_err(|e| Failure::validation(e.to_string()))?,
            slope: a.slope.unwrap_or(1.0),
        }),
        FamilyKind::Helicoid => Family::Ruled(RuledSurface::Helicoid {
            center: HPoint::origin(),
            pitch: a.pitch.unwrap_or(1.0),
        }),
    };
    let mesh = build_mesh(&fam, res, res).map_err(family_failure)?;
    let resid = mesh_mean_curvature(&mesh).map_err(|e| Failure::numerical(e.to_string()))?.summary();
    println!(
        "{}: {} vertices, {} triangles; mean curvature residual sup {:e}, l2 {:e}",
        fam.name(),
        mesh.vertices.len(),
        mesh.triangles.len(),
        resid.sup,
        resid.l2
    );
    let dir = cfg.out_dir()?;
    let stem = fam.name();
    let mut outputs = Vec::new();
    write_file(&dir, &format!("{stem}.obj"), &mesh.to_obj(), &mut outputs)?;
    write_file(&dir, &format!("{stem}_vertices.csv"), &mesh.vertices_csv(), &mut outputs)?;
    write_file(&dir, &format!("{stem}_triangles.csv"), &mesh.triangles_csv(), &mut outputs)?;
    if let Some(s) = profile_csv {
        write_file(&dir, &format!("{stem}_profile.csv"), &s, &mut outputs)?;
    }
    let summary = json!({
        "family": stem,
        "resolution": [res, res],
        "vertices": mesh.vertices.len(),
        "triangles": mesh.triangles.len(),
        "residual": resid,
        "profile": extra,
    });
    Ok(Report {
        outputs,
        summary,
        failure: None,
    })
}

fn grid_values(a: &TableArgs) -> Result<Vec<f64>, Failure> {
    let mut cs = a.values.clone();
    let spaced = |v: &[f64], geometric: bool| -> Result<Vec<f64>, Failure> {
        if v.len() != 3 {
            return Err(Failure::validation("grid spec must be START,STOP,N"));
        }
        let (lo, hi, n) = (v[0], v[1], v[2]);
        if n < 1.0 || n.fract() != 0.0 {
            return Err(Failure::validation(format!("grid count {n} is not a positive integer")));
        }
        if geometric && !(lo > 0.0 && hi > 0.0) {
            return Err(Failure::validation("geometric grid needs positive endpoints"));
        }
        let n = n as usize;
        Ok((0..n)
            .map(|k| {
                let f = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                if geometric {
                    lo * (hi / lo).powf(f)
                } else {
                    lo + (hi - lo) * f
                }
            })
            .collect())
    };
    if let Some(v) = &a.linspace {
        cs.extend(spaced(v, false)?);
    }
    if let Some(v) = &a.logspace {
        cs.extend(spaced(v, true)?);
    }
    if cs.is_empty() {
        return Err(Failure::validation("parameter grid is empty"));
    }
    Ok(cs)
}

struct Row {
    c: f64,
    fields: Result<(f64, f64), FamilyError>,
}

fn table(a: &TableArgs, cfg: &mut RunConfig) -> Result<Report, Failure> {
    let cs = grid_values(a)?;
    let pi = std::f64::consts::PI;
    let rows: Vec<Row> = cs
        .par_iter()
        .map(|&c| Row {
            c,
            fields: match a.kind {
                TableKind::Tall => tall_profile(c).map(|p| (p.s_min, p.ell)),
                TableKind::Catenoid => catenoid_profile(c).map(|p| (p.r_neck, 2.0 * p.half_height)),
            },
        })
        .collect();
    let (name, header) = match a.kind {
        TableKind::Tall => ("tall", "C,s_min,ell,ell_gt_pi,error\n"),
        TableKind::Catenoid => ("catenoid", "C,r_neck,two_b,two_b_lt_pi,error\n"),
    };
    let mut csv = String::from(header);
    let mut worst: Option<Failure> = None;
    let (mut passed, mut failed) = (0usize, 0usize);
    for r in &rows {
        match &r.fields {
            Ok((x, h)) => {
                let ok = match a.kind {
                    TableKind::Tall => *h > pi,
                    TableKind::Catenoid => *h < pi,
                };
                if ok {
                    passed += 1;
                } else {
                    failed += 1;
                }
                let h = if h.is_finite() { h.to_string() } else { "inf".into() };
                let _ = writeln!(csv, "{},{x},{h},{},", r.c, if ok { "pass" } else { "fail" });
            }
            Err(e) => {
                let _ = writeln!(csv, "{},,,error,{}", r.c, e.to_string().replace(',', ";"));
                let f = family_failure(e.clone());
                if worst.as_ref().map_or(true, |w| f.code() > w.code()) {
                    worst = Some(f);
                }
            }
        }
    }
    print!("{csv}");
    let dir = cfg.out_dir()?;
    let mut outputs = Vec::new();
    write_file(&dir, &format!("table_{name}.csv"), &csv, &mut outputs)?;
    let errors = rows.len() - passed - failed;
    Ok(Report {
        outputs,
        summary: json!({ "table": name, "rows": rows.len(), "threshold_pass": passed, "threshold_fail": failed, "errors": errors }),
        failure: worst.map(|w| match w {
            Failure::Validation(m) => Failure::Validation(format!("{errors} row(s) failed; last: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("{errors} row(s) failed; last: {m}")),
        }),
    })
}

/// Problem file: `{domain: {x_max, y}, grid, edges}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub domain: Domain,
    pub grid: (usize, usize),
    pub edges: Edges,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Domain {
    pub x_max: f64,
    pub y: (f64, f64),
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::validation(format!("grid {s:?} is not NX or NXxNY"));
    let mut it = s.split(['x', 'X']);
    let nx: usize = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let ny: usize = match it.next() {
        Some(v) => v.trim().parse().map_err(|_| bad())?,
        None => nx,
    };
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((nx, ny))
}

fn plateau_failure(e: &PlateauError) -> Failure {
    match e {
        PlateauError::IllPosedData { .. } | PlateauError::InvalidProblem(_) => Failure::validation(e.to_string()),
        _ => Failure::numerical(e.to_string()),
    }
}

fn solution_csv(r: &SolveResult<f64>) -> String {
    let u = &r.solution;
    let (nx, ny) = u.dim();
    let mut s = String::from("x,y,u\n");
    for i in 0..nx {
        for j in 0..ny {
            let _ = writeln!(s, "{},{},{}", u.xi(i), u.cj(j), u.values[[i, j]]);
        }
    }
    s
}

fn solve(a: &SolveArgs, cfg: &mut RunConfig) -> Result<Report, Failure> {
    let src = read_input(cfg, &a.problem)?;
    let pf: ProblemFile = serde_json::from_str(&src).map_err(|e| Failure::validation(format!("bad problem file: {e}")))?;
    let tol = RunConfig::positive("tol", a.tol.or(cfg.tol).unwrap_or(1e-8))?;
    let max_iter = a.max_iter.or(cfg.max_iter).unwrap_or(50);
    if max_iter == 0 {
        return Err(Failure::validation("max-iter must be at least 1"));
    }
    let grid = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => cfg.grid.unwrap_or(pf.grid),
    };
    cfg.tol = Some(tol);
    cfg.max_iter = Some(max_iter);
    cfg.grid = Some(grid);
    let problem = DirichletProblem {
        x_max: pf.domain.x_max,
        y: pf.domain.y,
        grid,
        edges: pf.edges,
    };
    let opts = SolveOptions {
        tol,
        max_iter,
        ..SolveOptions::default()
    };
    let (result, failure) = match solve_with::<f64>(&problem, &opts) {
        Ok(r) => (r, None),
        Err(PlateauError::NonConvergence { iterations, residual, best }) => {
            let e = PlateauError::NonConvergence {
                iterations,
                residual,
                best: best.clone(),
            };
            (*best, Some(plateau_failure(&e)))
        }
        Err(e) => return Err(plateau_failure(&e)),
    };
    let (lo, hi) = result
        .solution
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    println!(
        "{} after {} Newton steps, residual {:e}; u in [{lo}, {hi}]",
        if result.converged { "converged" } else { "not converged" },
        result.iterations,
        result.final_residual
    );
    let log = json!({
        "converged": result.converged,
        "iterations": result.iterations,
        "final_residual": result.final_residual,
        "history": result.history,
        "tol": tol,
        "max_iter": max_iter,
        "grid": [grid.0, grid.1],
    });
    let dir = cfg.out_dir()?;
    let mut outputs = Vec::new();
    write_file(&dir, "solution.csv", &solution_csv(&result), &mut outputs)?;
    write_file(&dir, "convergence.json", &(serde_json::to_string_pretty(&log).unwrap_or_default() + "\n"), &mut outputs)?;
    Ok(Report {
        outputs,
        summary: json!({ "converged": result.converged, "iterations": result.iterations, "final_residual": result.final_residual, "min": lo, "max": hi }),
        failure,
    })
}

fn describe_witness(w: &Witness<f64>) -> String {
    match w {
        Witness::ShortComponent { theta, interval, length } => format!(
            "short component over theta = {} spanning t in [{}, {}], length {length} <= pi",
            theta,
            interval.lo,
            interval.hi
        ),
        Witness::ThinTail { tail } => format!(
            "thin tail at theta = {} over t in [{}, {}] (segments {} and {})",
            tail.theta,
            tail.t_lo,
            tail.t_hi,
            tail.segments.0,
            tail.segments.1
        ),
        Witness::CapTrace { sign, reason } => format!("cap {sign}: {reason}"),
        Witness::Height { h } => format!("h = {h}"),
    }
}


fn classify(a: &ClassifyArgs, cfg: &mut RunConfig) -> Result<Report, Failure> {
    let src = read_input(cfg, &a.curve)?;
    let dir = cfg.out_dir()?;
    let mut outputs = Vec::new();
    if a.geodesic {
        let set: GeodesicBoundarySet<f64> =
            serde_json::from_str(&src).map_err(|e| Failure::validation(format!("bad geodesic boundary set: {e}")))?;
        let ty = classify_geodesic_curve(&set).map_err(|e| Failure::validation(e.to_string()))?;
        let osc = oscillation_check(&set, 1e-9);
        println!("type: {}", serde_json::to_string(&ty).unwrap_or_default());
        let body = json!({ "type": ty, "oscillation": match &osc { Ok(()) => json!("ok"), Err(v) => json!(v) } });
        write_file(&dir, "classify.json", &(serde_json::to_string_pretty(&body).unwrap_or_default() + "\n"), &mut outputs)?;
        return Ok(Report {
            outputs,
            summary: body,
            failure: None,
        });
    }
    let curve: PiecewiseBoundaryCurve<f64> =
        serde_json::from_str(&src).map_err(|e| Failure::validation(format!("bad curve: {e}")))?;
    let samples = a.theta_samples.or(cfg.theta_samples).unwrap_or(FillabilityOptions::default().theta_samples);
    if samples == 0 {
        return Err(Failure::validation("theta-samples must be positive"));
    }
    cfg.theta_samples = Some(samples);
    let verdict = check_proposition_fillability(&curve, &FillabilityOptions { theta_samples: samples })
        .map_err(|e| Failure::validation(e.to_string()))?;
    let tall = if curve.in_cylinder() {
        Some(check_tall(&curve, samples).map_err(|e| Failure::validation(e.to_string()))?)
    } else {
        None
    };
    println!("status: {}", serde_json::to_value(verdict.status).unwrap_or_default().as_str().unwrap_or("?"));
    for w in &verdict.witnesses {
        println!("witness: {}", describe_witness(w));
    }
    for n in &verdict.notes {
        println!("note: {n}");
    }
    if let Some(t) = &tall {
        println!("tallness: {:?}, h = {}", t.status, t.h);
    }
    let body = json!({ "verdict": verdict, "tall": tall });
    write_file(&dir, "classify.json", &(serde_json::to_string_pretty(&body).unwrap_or_default() + "\n"), &mut outputs)?;
    Ok(Report {
        outputs,
        summary: body,
        failure: None,
    })
}

fn trace(a: &TraceArgs, cfg: &mut RunConfig) -> Result<Report, Failure> {
    let src = read_input(cfg, &a.mesh)?;
    let mesh = SurfaceMesh::<f64>::from_obj(&src).map_err(|e| Failure::validation(e.to_string()))?;
    let radius = RunConfig::positive("radius", a.radius.or(cfg.radius).unwrap_or(20.0))?;
    let bins = a.bins.or(cfg.bins).unwrap_or(360);
    if bins == 0 {
        return Err(Failure::validation("bins must be positive"));
    }
    cfg.radius = Some(radius);
    cfg.bins = Some(bins);
    let b = a.base.clone().unwrap_or_else(|| vec![1.0, 0.0, 0.0]);
    if b.len() != 3 {
        return Err(Failure::validation("base must be x,y,t"));
    }
    let base = AmbientPoint::new(b[0], b[1], b[2]).map_err(|e| Failure::validation(e.to_string()))?;
    let tr = trace_surface_boundary(&mesh, &base, &TraceOptions::new(radius, bins)).map_err(|e| match e {
        TraceError::MeshTooSmall(_) => Failure::validation(e.to_string()),
        _ => Failure::numerical(e.to_string()),
    })?;
    let g = &tr.geodesic;
    let ty = classify_geodesic_curve(g).map_err(|e| e.to_string());
    let osc = oscillation_check(g, 1e-9);
    println!(
        "{} equator arc(s), poles {:?}, {} chamber bin(s), {} cylinder bin(s), caps +{} -{}",
        g.equator_arcs.len(),
        g.poles,
        g.chambers.len(),
        tr.product.cylinder.len(),
        tr.product.cap_plus,
        tr.product.cap_minus
    );
    println!("oscillation: {}", if osc.is_ok() { "ok" } else { "violated" });
    let body = json!({
        "trace": tr,
        "type": match &ty { Ok(t) => json!(t), Err(m) => json!({ "error": m }) },
        "oscillation": match &osc { Ok(()) => json!("ok"), Err(v) => json!(v) },
    });
    let dir = cfg.out_dir()?;
    let mut outputs = Vec::new();
    write_file(&dir, "trace.json", &(serde_json::to_string_pretty(&body).unwrap_or_default() + "\n"), &mut outputs)?;
    let summary = json!({
        "equator_arcs": g.equator_arcs.len(),
        "poles": g.poles,
        "chambers": g.chambers.len(),
        "oscillation_ok": osc.is_ok(),
    });
    Ok(Report {
        outputs,
        summary,
        failure: None,
    })
}

fn accept(cfg: &mut RunConfig) -> Result<Report, Failure> {
    let results = acceptance::run_all();
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    let dir = cfg.out_dir()?;
    let mut outputs: Vec<PathBuf> = Vec::new();
    write_file(&dir, "acceptance.json", &(serde_json::to_string_pretty(&results).unwrap_or_default() + "\n"), &mut outputs)?;
    let summary: Value = json!({ "criteria": results.len(), "failed": failed });
    let failure = (!failed.is_empty()).then(|| Failure::numerical(format!("acceptance criteria failed: {}", failed.join(", "))));
    Ok(Report {
        outputs,
        summary,
        failure,
    })
}
