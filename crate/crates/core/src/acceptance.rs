//! End-to-end acceptance checks, one line per criterion.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{
    check_proposition_fillability, check_tall, classify_geodesic_curve, oscillation_check, orbit_slope_sample,
    trace_surface_boundary, CurveType, Direction, FillabilityOptions, FillabilityStatus, GeodesicBoundarySet,
    PiecewiseBoundaryCurve, PolyPoint, Segment, Tallness, TraceOptions, Witness,
};
use crate::compactify::{
    geodesic_limit, geodesic_to_product, product_limit, product_to_geodesic, DivergingSample, GeodesicBoundaryPoint,
    LimitConfig, ProductBoundaryPoint, Sign, SlopeInterval,
};
use crate::families::{
    build_mesh_on, butterfly_curve, butterfly_feasibility, catenoid_profile, tall_profile, ButterflyParams, Family,
    Feasibility, RuledSurface,
};
use crate::hyp::{AmbientPoint, GeodesicH2, HPoint, IdealPoint, Isometry};
use crate::plateau::{solve, unit_tall, DirichletProblem, EdgeData};
use crate::residual::{vertical_residual, GraphFunction, Orientation};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{}] {} ({:.2}s): {}", self.id, self.name, self.seconds, self.detail)
    }
}

type Check = Result<String, String>;

fn run(id: &str, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Check) -> CriterionResult {
    let t0 = Instant::now();
    let out = f();
    let el = t0.elapsed();
    let (mut passed, mut detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = budget {
        if el > b {
            passed = false;
            detail = format!("{detail}; over the {}s budget", b.as_secs());
        }
    }
    CriterionResult {
        id: id.into(),
        name: name.into(),
        passed,
        detail,
        seconds: el.as_secs_f64(),
    }
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Criteria in order; sub-items that can fail independently get their own line.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        run("1a", "tall heights exceed pi", Some(Duration::from_secs(10)), tall_heights),
        run("1b", "tall height at C=0.999 exceeds 10", Some(Duration::from_secs(10)), tall_near_one),
        run("2", "C=1 closed form residual", None, closed_form_residual),
        run("3", "catenoid thresholds", Some(Duration::from_secs(5)), catenoid_thresholds),
        run("4", "Dirichlet solver oracle", Some(Duration::from_secs(60)), plateau_oracle),
        run("5", "fillability truth table", None, fillability_table),
        run("6", "classifier bijection", None, classifier_bijection),
        run("7", "oscillation and slope tracing", Some(Duration::from_secs(20)), slope_tracing),
        run("8", "compactification correspondence", None, correspondence),
    ]
}

pub fn tall_heights() -> Check {
    let mut worst = (0.0, f64::INFINITY);
    for k in 1..=19 {
        let c = 0.05 * k as f64;
        let p = tall_profile(c).map_err(|e| format!("C={c}: {e}"))?;
        if p.ell < worst.1 {
            worst = (c, p.ell);
        }
        ensure(p.ell > PI, format!("ell({c:.2}) = {:.6} ≤ π", p.ell))?;
    }
    Ok(format!("min ell = {:.6} at C={:.2}", worst.1, worst.0))
}

pub fn tall_near_one() -> Check {
    let p = tall_profile(0.999).map_err(|e| e.to_string())?;
    let msg = format!("ell(0.999) = {:.6}", p.ell);
    ensure(p.ell > 10.0, msg.clone())?;
    Ok(msg)
}

fn unit_tall_graph(n: usize) -> Result<GraphFunction<f64>, String> {
    GraphFunction::sample(Orientation::Vertical, (0.0, 0.25), (-0.25, 0.25), n, n, unit_tall).map_err(|e| e.to_string())
}

pub fn closed_form_residual() -> Check {
    let coarse = vertical_residual(&unit_tall_graph(65)?).map_err(|e| e.to_string())?.sup_norm;
    let fine = vertical_residual(&unit_tall_graph(129)?).map_err(|e| e.to_string())?.sup_norm;
    let ratio = coarse / fine;
    let msg = format!("sup = {fine:.3e} at 128², refinement ratio {ratio:.3}");
    ensure(fine < 1e-4 && (3.2..=4.8).contains(&ratio), msg.clone())?;
    Ok(msg)
}

pub fn catenoid_thresholds() -> Check {
    for c in [0.5, 0.4, 0.0, -1.0] {
        ensure(catenoid_profile(c).is_err(), format!("C={c} accepted"))?;
    }
    let mut out = Vec::new();
    for c in [0.6, 1.0, 5.0, 50.0] {
        let p = catenoid_profile(c).map_err(|e| e.to_string())?;
        let h = 2.0 * p.half_height;
        ensure(h < PI, format!("2b({c}) = {h:.6} ≥ π"))?;
        out.push(format!("2b({c})={h:.4}"));
    }
    let mut best: f64 = 0.0;
    for k in 1..=8 {
        let c = 0.5 + 10f64.powi(-k);
        best = best.max(2.0 * catenoid_profile(c).map_err(|e| e.to_string())?.half_height);
    }
    ensure(best > 3.0 && best < PI, format!("max sampled 2b = {best:.6}"))?;
    Ok(format!("{}; max sampled 2b = {best:.6}", out.join(" ")))
}

fn interior_range_violation(values: &ndarray::Array2<f64>) -> f64 {
    let (nx, ny) = values.dim();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for ((i, j), v) in values.indexed_iter() {
        if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    values.iter().map(|v| (lo - v).max(v - hi)).fold(0.0, f64::max)
}

/// Smooth data of moderate slope on the boundary of `[0, 1] × [-1, 1]`.
/// The edge `x = 1` is a horocycle seen from its concave side, so steep data need not admit a solution.
pub fn random_smooth_problem(rng: &mut impl Rng, n: usize) -> DirichletProblem {
    let terms: Vec<[f64; 5]> = (0..4)
        .map(|_| {
            [
                rng.gen_range(-0.25..0.25),
                rng.gen_range(0.5..3.0),
                rng.gen_range(0.5..3.0),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..2.0 * PI),
            ]
        })
        .collect();
    let f = move |x: f64, y: f64| terms.iter().map(|[a, kx, ky, px, py]| a * (kx * x + px).sin() * (ky * y + py).cos()).sum();
    DirichletProblem::from_fn(1.0, (-1.0, 1.0), (n, n), f)
}

pub fn plateau_oracle() -> Check {
    let p = DirichletProblem::uniform(0.5, (-0.5, 0.5), (128, 128), EdgeData::UnitTall);
    let r = solve::<f64>(&p, 1e-10, 30).map_err(|e| e.to_string())?;
    let g = &r.solution;
    let err = g.values.indexed_iter().map(|((i, j), v)| (v - unit_tall(g.xi(i), g.cj(j))).abs()).fold(0.0, f64::max);
    ensure(err < 5e-4, format!("oracle sup error {err:.3e}"))?;

    let c = DirichletProblem::uniform(1.0, (-1.0, 1.0), (32, 32), EdgeData::Constant { value: 5.0 });
    let rc = solve::<f64>(&c, 1e-8, 50).map_err(|e| e.to_string())?;
    ensure(rc.iterations <= 2, format!("constant data took {} steps", rc.iterations))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let p = random_smooth_problem(&mut rng, 48);
        let r = solve::<f64>(&p, 1e-9, 50).map_err(|e| format!("random problem {k}: {e}"))?;
        worst = worst.max(interior_range_violation(&r.solution.values));
    }
    ensure(worst <= 1e-9, format!("maximum principle violated by {worst:.3e}"))?;
    Ok(format!(
        "oracle sup error {err:.3e} in {} steps; constants in {} steps; max-principle excess {worst:.1e} over 20 problems",
        r.iterations, rc.iterations
    ))
}

fn circle(t: f64) -> Segment<f64> {
    Segment::Horizontal {
        from: IdealPoint::Infinity,
        to: IdealPoint::Infinity,
        direction: Direction::Ccw,
        t,
    }
}

/// Two cap geodesics joined by two monotone arcs.
pub fn twisted_curve() -> PiecewiseBoundaryCurve<f64> {
    let at = IdealPoint::from_angle;
    let (q1, q2, q3, q4) = (at(0.0), at(PI), at(1.5 * PI), at(0.5 * PI));
    PiecewiseBoundaryCurve::new(vec![
        Segment::CapGeodesic {
            sign: Sign::Plus,
            from: q1,
            to: q2,
        },
        Segment::Vertical {
            at: q2,
            from: f64::INFINITY,
            to: 1.0,
        },
        Segment::Polyline {
            points: vec![PolyPoint { theta: q2, t: 1.0 }, PolyPoint { theta: q3, t: -1.0 }],
        },
        Segment::Vertical {
            at: q3,
            from: -1.0,
            to: f64::NEG_INFINITY,
        },
        Segment::CapGeodesic {
            sign: Sign::Minus,
            from: q3,
            to: q4,
        },
        Segment::Vertical {
            at: q4,
            from: f64::NEG_INFINITY,
            to: -1.0,
        },
        Segment::Polyline {
            points: vec![PolyPoint { theta: q4, t: -1.0 }, PolyPoint { theta: q1, t: 1.0 }],
        },
        Segment::Vertical {
            at: q1,
            from: 1.0,
            to: f64::INFINITY,
        },
    ])
}

pub fn butterfly_points() -> [IdealPoint<f64>; 4] {
    [-10.0, -0.1, 0.1, 10.0].map(IdealPoint::Finite)
}

pub fn fillability_table() -> Check {
    let opts = FillabilityOptions::default();
    let v = check_proposition_fillability(&twisted_curve(), &opts).map_err(|e| e.to_string())?;
    ensure(v.status == FillabilityStatus::FillableByCriterion, format!("twisted curve: {:?}", v.status))?;

    let q = butterfly_points();
    let w = match butterfly_feasibility(2.0, q).map_err(|e| e.to_string())? {
        Feasibility::Feasible(w) => w,
        Feasibility::Infeasible { d_disk, dist_geodesics } => {
            return Err(format!("butterfly infeasible: disk {d_disk:.4} vs geodesics {dist_geodesics:.4}"))
        }
    };
    ensure(w.big_l > PI && 2.0 * w.r_tall < w.margin, format!("butterfly witness {w:?}"))?;
    let bf = butterfly_curve(&ButterflyParams {
        ell: 2.0,
        big_l: w.big_l,
        a: 0.0,
        b: 1.0,
        q,
    })
    .map_err(|e| e.to_string())?;
    let v = check_proposition_fillability(&bf, &opts).map_err(|e| e.to_string())?;
    ensure(v.status != FillabilityStatus::FillableByCriterion, "butterfly passed the criterion")?;
    let short = v.witnesses.iter().find_map(|x| match x {
        Witness::ShortComponent { theta, length, .. } => Some((*theta, *length)),
        _ => None,
    });
    let Some((theta, len)) = short else { return Err(format!("no short component witness: {v:?}")) };
    ensure(theta.approx_eq(&q[1], 1e-9) && (len - 2.0).abs() < 1e-9, format!("witness at {theta:?} has length {len}"))?;

    let two = PiecewiseBoundaryCurve::new(vec![circle(0.0), circle(2.0)]);
    let four = PiecewiseBoundaryCurve::new(vec![circle(0.0), circle(4.0)]);
    let s2 = check_tall(&two, 64).map_err(|e| e.to_string())?.status;
    let s4 = check_tall(&four, 64).map_err(|e| e.to_string())?.status;
    ensure(s2 == Tallness::Short && s4 == Tallness::Tall, format!("circles: {s2:?}, {s4:?}"))?;
    Ok(format!(
        "twisted fillable; butterfly {:?} with length-2 witness, L = {:.4}, margin - 2r(L) = {:.2e}; circles short/tall",
        v.status,
        w.big_l,
        w.margin - 2.0 * w.r_tall
    ))
}

pub fn classifier_bijection() -> Check {
    let [q1, q2, ..] = butterfly_points();
    let q = butterfly_points();
    let gens = [
        (GeodesicBoundarySet::slice(), CurveType::Equator),
        (
            GeodesicBoundarySet::semi_infinite_rectangle(q1, q2, Sign::Plus),
            CurveType::ArcWithChambers { sign: Sign::Plus },
        ),
        (GeodesicBoundarySet::four_chambers(q), CurveType::FourChambers),
        (GeodesicBoundarySet::two_opposite(q), CurveType::TwoOpposite),
    ];
    for (k, (set, want)) in gens.iter().enumerate() {
        let got = classify_geodesic_curve(set).map_err(|e| e.to_string())?;
        ensure(&got == want, format!("generator {} classified as {got:?}", k + 1))?;
    }
    let mut partial = GeodesicBoundarySet::semi_infinite_rectangle(q1, q2, Sign::Plus);
    partial.chambers[0].slopes = SlopeInterval { lo: 0.0, hi: 2.0 };
    let got = classify_geodesic_curve(&partial);
    ensure(matches!(got, Ok(CurveType::NotFillableCurve { .. }) | Err(_)), format!("partial chamber accepted: {got:?}"))?;
    Ok("types 1-4 recovered, partial chamber rejected".into())
}

pub fn diagonal_family(slope: f64) -> Family<f64> {
    let axis = GeodesicH2::new(IdealPoint::Finite(0.0), IdealPoint::Infinity).expect("distinct endpoints");
    Family::Ruled(RuledSurface::Diagonal { axis, slope })
}

pub fn slope_tracing() -> Check {
    let (tau, delta) = (2.0, 1.0);
    let m = build_mesh_on(&diagonal_family(delta / tau), ((-150.0, 150.0), (-150.0, 150.0)), 601, 601).map_err(|e| e.to_string())?;
    let base = AmbientPoint::from_base(HPoint::origin(), 0.0);
    let tr = trace_surface_boundary(&m, &base, &TraceOptions::new(100.0, 360)).map_err(|e| e.to_string())?;
    let ch = &tr.geodesic.chambers;
    ensure(ch.len() == 2, format!("{} chamber bins, expected 2", ch.len()))?;
    for c in ch {
        let (want_theta, want_sign) = if c.theta.is_infinite() {
            (IdealPoint::Infinity, Sign::Plus)
        } else {
            (IdealPoint::Finite(0.0), Sign::Minus)
        };
        ensure(c.theta.approx_eq(&want_theta, 1e-9) && c.sign == want_sign, format!("chamber at {:?} {:?}", c.theta, c.sign))?;
        let err = c.slopes.lo.abs().max((c.slopes.hi - 0.5).abs());
        ensure(err < 0.02, format!("interval [{}, {}] at {:?}", c.slopes.lo, c.slopes.hi, c.theta))?;
    }
    oscillation_check(&tr.geodesic, 1e-9).map_err(|v| format!("oscillation violated: {v:?}"))?;
    let g = Isometry::screw(&IdealPoint::Finite(0.0), &IdealPoint::Infinity, tau, delta).map_err(|e| e.to_string())?;
    let o = orbit_slope_sample(&g, 40, &base).map_err(|e| e.to_string())?;
    let slope = match o.limit.limit() {
        Some(GeodesicBoundaryPoint::Chamber { slope, .. }) => *slope,
        other => return Err(format!("orbit limit {other:?}")),
    };
    ensure((slope - 0.5).abs() < 1e-6, format!("orbit slope {slope}"))?;
    Ok(format!(
        "chambers {} ; orbit slope {slope:.9}",
        ch.iter()
            .map(|c| format!("{}{}[{:.3},{:.3}]", c.theta, c.sign, c.slopes.lo, c.slopes.hi))
            .collect::<Vec<_>>()
            .join(" ")
    ))
}

fn random_ideal(rng: &mut impl Rng) -> IdealPoint<f64> {
    IdealPoint::from_angle(rng.gen_range(-PI..PI))
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn random_geodesic_point(rng: &mut impl Rng) -> GeodesicBoundaryPoint<f64> {
    match rng.gen_range(0..3) {
        0 => GeodesicBoundaryPoint::Equator { theta: random_ideal(rng) },
        1 => GeodesicBoundaryPoint::Pole { sign: random_sign(rng) },
        _ => GeodesicBoundaryPoint::Chamber {
            theta: random_ideal(rng),
            sign: random_sign(rng),
            slope: rng.gen_range(0.01..20.0),
        },
    }
}

pub fn random_product_point(rng: &mut impl Rng) -> ProductBoundaryPoint<f64> {
    match rng.gen_range(0..3) {
        0 => ProductBoundaryPoint::VerticalCylinder {
            theta: random_ideal(rng),
            t: rng.gen_range(-50.0..50.0),
        },
        1 => ProductBoundaryPoint::Cap {
            sign: random_sign(rng),
            p: HPoint::new(rng.gen_range(0.01..10.0), rng.gen_range(-10.0..10.0)).expect("positive height"),
        },
        _ => ProductBoundaryPoint::Corner {
            theta: random_ideal(rng),
            sign: random_sign(rng),
        },
    }
}

pub fn correspondence() -> Check {
    let ap = |x: f64, y: f64, t: f64| AmbientPoint::new(x, y, t).expect("positive height");
    let ray = |f: &dyn Fn(f64) -> AmbientPoint<f64>| DivergingSample::new((0..40).map(|k| f(k as f64)).collect(), ap(1.0, 0.0, 0.0));
    let cfg = LimitConfig::default();
    let cases: [(&str, DivergingSample<f64>, GeodesicBoundaryPoint<f64>, ProductBoundaryPoint<f64>); 3] = [
        (
            "vertical",
            ray(&|k| ap(1.0, 0.0, k)),
            GeodesicBoundaryPoint::Pole { sign: Sign::Plus },
            ProductBoundaryPoint::Cap {
                sign: Sign::Plus,
                p: HPoint::origin(),
            },
        ),
        (
            "horizontal",
            ray(&|k| ap(k.exp(), 0.0, 0.0)),
            GeodesicBoundaryPoint::Equator {
                theta: IdealPoint::Infinity,
            },
            ProductBoundaryPoint::VerticalCylinder {
                theta: IdealPoint::Infinity,
                t: 0.0,
            },
        ),
        (
            "diagonal",
            ray(&|k| ap(k.exp(), 0.0, 0.7 * k)),
            GeodesicBoundaryPoint::Chamber {
                theta: IdealPoint::Infinity,
                sign: Sign::Plus,
                slope: 0.7,
            },
            ProductBoundaryPoint::Corner {
                theta: IdealPoint::Infinity,
                sign: Sign::Plus,
            },
        ),
    ];
    for (name, s, g, p) in &cases {
        let gl = geodesic_limit(s, &cfg).map_err(|e| e.to_string())?;
        let pl = product_limit(s, &cfg).map_err(|e| e.to_string())?;
        let gl = gl.limit().ok_or(format!("{name}: no geodesic limit"))?;
        let pl = pl.limit().ok_or(format!("{name}: no product limit"))?;
        ensure(gl.approx_eq(g, 1e-6), format!("{name}: geodesic limit {gl:?}"))?;
        let same = match (pl, p) {
            (ProductBoundaryPoint::Cap { sign: a, p: x }, ProductBoundaryPoint::Cap { sign: b, p: y }) => a == b && x.dist(y) < 1e-6,
            (ProductBoundaryPoint::VerticalCylinder { theta: a, t: x }, ProductBoundaryPoint::VerticalCylinder { theta: b, t: y }) => {
                a.approx_eq(b, 1e-9) && (x - y).abs() < 1e-6
            }
            (ProductBoundaryPoint::Corner { theta: a, sign: x }, ProductBoundaryPoint::Corner { theta: b, sign: y }) => a.approx_eq(b, 1e-9) && x == y,
            _ => false,
        };
        ensure(same, format!("{name}: product limit {pl:?}"))?;
        ensure(product_to_geodesic(pl).contains(gl, 1e-9), format!("{name}: limits do not correspond"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let g = random_geodesic_point(&mut rng);
        for pb in geodesic_to_product(&g).sample_members() {
            ensure(product_to_geodesic(&pb).contains(&g, 1e-9), format!("{g:?} not recovered from {pb:?}"))?;
        }
        let p = random_product_point(&mut rng);
        for gb in product_to_geodesic(&p).sample_members() {
            ensure(geodesic_to_product(&gb).contains(&p, 1e-9), format!("{p:?} not recovered from {gb:?}"))?;
        }
    }
    Ok("three rays agree in both compactifications; 1000 random round trips contained".into())
}
