use std::f64::consts::PI;

use hypfill::acceptance::{diagonal_family, random_geodesic_point, random_product_point, random_smooth_problem};
use hypfill::boundary::{
    check_proposition_fillability, classify_geodesic_curve, oscillation_check, trace_surface_boundary, Direction,
    FillabilityOptions, FillabilityStatus, GeodesicBoundarySet, PiecewiseBoundaryCurve, Segment, TraceOptions,
};
use hypfill::compactify::{
    geodesic_limit, geodesic_to_product, product_limit, product_to_geodesic, DivergingSample, LimitConfig, Sign,
};
use hypfill::families::{
    build_mesh, build_mesh_on, butterfly_curve, catenoid_profile, ButterflyParams, Family, RuledSurface, TallRectangle,
    BoundaryArc,
};
use hypfill::hyp::{disk_from_halfplane, dist_disk, halfplane_from_disk};
use hypfill::plateau::{solve, solve_with, InitialGuess, SolveOptions};
use hypfill::residual::{mesh_mean_curvature, vertical_residual, GraphFunction, Orientation};
use hypfill::{dist_ambient, dist_h2, equidistant_coordinate, AmbientPoint, GeodesicH2, HPoint, IdealPoint, Isometry, Mobius};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hpoint() -> impl Strategy<Value = HPoint<f64>> {
    (0.05f64..5.0, -5.0f64..5.0).prop_map(|(x, y)| HPoint::new(x, y).unwrap())
}

fn ambient() -> impl Strategy<Value = AmbientPoint<f64>> {
    (hpoint(), -5.0f64..5.0).prop_map(|(p, t)| AmbientPoint::from_base(p, t))
}

fn isometry() -> impl Strategy<Value = Isometry<f64>> {
    (hpoint(), -PI..PI, -3.0f64..3.0, -3.0f64..3.0, any::<bool>()).prop_map(|(c, a, tau, shift, flip)| {
        let m = Mobius::rotation(&c, a).compose(&Mobius::dilation(tau));
        Isometry::new(m, shift, flip).unwrap()
    })
}

fn ideal() -> impl Strategy<Value = IdealPoint<f64>> {
    (-PI..PI).prop_map(IdealPoint::from_angle)
}

proptest! {
    #[test]
    fn metric_axioms(p in hpoint(), q in hpoint(), r in hpoint()) {
        let (pq, qr, pr) = (dist_h2(&p, &q), dist_h2(&q, &r), dist_h2(&p, &r));
        prop_assert!(dist_h2(&p, &p).abs() < 1e-10);
        prop_assert!((pq - dist_h2(&q, &p)).abs() < 1e-10 * (1.0 + pq));
        prop_assert!(pr <= pq + qr + 1e-10 * (1.0 + pr));
    }

    #[test]
    fn isometries_preserve_distance(phi in isometry(), p in ambient(), q in ambient()) {
        let d0 = dist_ambient(&p, &q);
        let d1 = dist_ambient(&phi.apply(&p), &phi.apply(&q));
        prop_assert!((d0 - d1).abs() < 1e-8 * (1.0 + d0), "{} vs {}", d0, d1);
    }

    #[test]
    fn isometries_map_geodesics(phi in isometry(), a in ideal(), b in ideal(), u in -3.0f64..3.0) {
        prop_assume!((a.angle() - b.angle()).abs() > 0.05);
        let g = GeodesicH2::new(a, b).unwrap();
        let h = phi.apply_geodesic(&g).unwrap();
        let image = phi.moebius.apply(&g.point_at(u));
        prop_assert!(h.distance_to_point(&image) < 1e-7);
    }

    #[test]
    fn equidistant_levels(s in -5.0f64..5.0, ys in prop::collection::vec(-0.99f64..0.99, 10)) {
        let g = GeodesicH2::new(IdealPoint::Finite(-1.0), IdealPoint::Finite(1.0)).unwrap();
        let want = s.asinh().abs();
        for y in ys {
            // solve (1 - x² - y²) = 2 s x for x > 0
            let x = -s + (s * s + 1.0 - y * y).sqrt();
            let p = HPoint::new(x, y).unwrap();
            prop_assert!((equidistant_coordinate(&p) - s).abs() < 1e-8 * (1.0 + s.abs()));
            prop_assert!((g.distance_to_point(&p) - want).abs() < 1e-8);
        }
    }

    #[test]
    fn disk_model_round_trip(p in hpoint(), q in hpoint()) {
        let (a, b) = (disk_from_halfplane(&p), disk_from_halfplane(&q));
        prop_assert!(dist_h2(&halfplane_from_disk(a).unwrap(), &p) < 1e-8);
        prop_assert!((dist_disk(a, b) - dist_h2(&p, &q)).abs() < 1e-7 * (1.0 + dist_h2(&p, &q)));
    }

    #[test]
    fn limits_covariant_and_compatible(phi in isometry(), r0 in prop_oneof![Just(0.0), -2.0f64..-0.4, 0.4f64..2.0], y in -2.0f64..2.0, base in ambient()) {
        let phi = Isometry { vertical_flip: false, ..phi };
        let pts: Vec<_> = (0..60).map(|k| AmbientPoint::new((k as f64).exp(), y, r0 * k as f64).unwrap()).collect();
        let s = DivergingSample::new(pts, base);
        let cfg = LimitConfig { escape_radius: 20.0, ..LimitConfig::default() };
        let g0 = *geodesic_limit(&s, &cfg).unwrap().limit().unwrap();
        let g1 = *geodesic_limit(&s.map(&phi), &cfg).unwrap().limit().unwrap();
        prop_assert!(g0.transform(&phi).approx_eq(&g1, 1e-6), "{:?} vs {:?}", g0.transform(&phi), g1);
        let shifted = s.map(&Isometry::vertical(7.0));
        let g2 = *geodesic_limit(&shifted, &cfg).unwrap().limit().unwrap();
        prop_assert!(g0.approx_eq(&g2, 1e-6));
        let p0 = *product_limit(&s, &cfg).unwrap().limit().unwrap();
        prop_assert!(product_to_geodesic(&p0).contains(&g0, 1e-6));
    }

    #[test]
    fn correspondence_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geodesic_point(&mut rng);
        for pb in geodesic_to_product(&g).sample_members() {
            prop_assert!(product_to_geodesic(&pb).contains(&g, 1e-9));
        }
        let p = random_product_point(&mut rng);
        for gb in product_to_geodesic(&p).sample_members() {
            prop_assert!(geodesic_to_product(&gb).contains(&p, 1e-9));
        }
    }

    #[test]
    fn catenoid_is_symmetric(c in 0.51f64..60.0, f in 0.0f64..1.0) {
        let p = catenoid_profile(c).unwrap();
        let sigma = f * p.sigma_max();
        let (r1, t1) = p.at_sigma(sigma).unwrap();
        let (r2, t2) = p.at_sigma(-sigma).unwrap();
        prop_assert!((r1 - r2).abs() < 1e-8 && (t1 + t2).abs() < 1e-8);
        prop_assert!(p.r_samples.iter().all(|(_, r)| *r >= p.r_neck - 1e-12));
        let n = p.r_samples.len();
        for k in 0..n {
            let (ta, ra) = p.r_samples[k];
            let (tb, rb) = p.r_samples[n - 1 - k];
            prop_assert!((ra - rb).abs() < 1e-8 && (ta + tb).abs() < 1e-8);
        }
        prop_assert!(2.0 * p.half_height < PI);
    }

    #[test]
    fn butterfly_closed_and_simple(ell in 0.3f64..3.0, extra in 0.1f64..4.0, a in -3.0f64..3.0, gap in 0.1f64..2.0, q in prop::array::uniform4(0.1f64..1.0)) {
        let b = a + gap;
        let big_l = (b + ell - a + extra).max(PI + 0.01);
        let mut acc = -2.0;
        let qs = q.map(|d| { acc += d; IdealPoint::Finite(acc) });
        let c = butterfly_curve(&ButterflyParams { ell, big_l, a, b, q: qs }).unwrap();
        prop_assert_eq!(c.segments.len(), 12);
        prop_assert!(c.is_closed());
        prop_assert!(c.validate().is_ok());
    }

    #[test]
    fn classifier_is_isometry_invariant(phi in isometry(), start in -PI..PI, gaps in prop::array::uniform4(0.2f64..1.4)) {
        let total: f64 = gaps.iter().sum();
        let mut a = start;
        let q = gaps.map(|g| { let out = IdealPoint::from_angle(a); a += g / total * 2.0 * PI * 0.95; out });
        let m = Isometry { vertical_flip: false, ..phi };
        let moved = q.map(|p| m.apply_ideal(&p));
        for (x, y) in [
            (GeodesicBoundarySet::semi_infinite_rectangle(q[0], q[1], Sign::Minus), GeodesicBoundarySet::semi_infinite_rectangle(moved[0], moved[1], Sign::Minus)),
            (GeodesicBoundarySet::four_chambers(q), GeodesicBoundarySet::four_chambers(moved)),
            (GeodesicBoundarySet::two_opposite(q), GeodesicBoundarySet::two_opposite(moved)),
        ] {
            prop_assert_eq!(classify_geodesic_curve(&x).unwrap(), classify_geodesic_curve(&y).unwrap());
        }
    }

    #[test]
    fn rectangle_fillable_iff_taller_than_pi(h in 0.3f64..7.0, a0 in -PI..0.0, span in 0.3f64..3.0) {
        prop_assume!((h - PI).abs() > 1e-3);
        let at = IdealPoint::from_angle;
        let (p, q) = (at(a0), at(a0 + span));
        let c = PiecewiseBoundaryCurve::new(vec![
            Segment::Horizontal { from: p, to: q, direction: Direction::Ccw, t: 0.0 },
            Segment::Vertical { at: q, from: 0.0, to: h },
            Segment::Horizontal { from: q, to: p, direction: Direction::Cw, t: h },
            Segment::Vertical { at: p, from: h, to: 0.0 },
        ]);
        let v = check_proposition_fillability(&c, &FillabilityOptions::default()).unwrap();
        prop_assert_eq!(v.status == FillabilityStatus::FillableByCriterion, h > PI, "{:?}", v);
    }

    #[test]
    fn residual_ignores_vertical_translation(c in -50.0f64..50.0, k in 0.5f64..3.0) {
        let u = move |x: f64, y: f64| (k * x + 0.3).sin() * (k * y).cos();
        let g = |shift: f64| GraphFunction::sample(Orientation::Vertical, (0.0, 0.5), (-0.5, 0.5), 21, 21, move |x, y| u(x, y) + shift).unwrap();
        let a = vertical_residual(&g(0.0)).unwrap();
        let b = vertical_residual(&g(c)).unwrap();
        for (x, y) in a.cells.iter().zip(&b.cells) {
            prop_assert!((x.2 - y.2).abs() < 1e-6 * (1.0 + x.2.abs()), "{:?} vs {:?}", x, y);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_translation_equivariant(seed in any::<u64>(), c in -20.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_smooth_problem(&mut rng, 24);
        let mut q = p.clone();
        for e in [&mut q.edges.ideal, &mut q.edges.outer, &mut q.edges.bottom, &mut q.edges.top] {
            if let hypfill::plateau::EdgeData::Sampled { values } = e {
                values.iter_mut().for_each(|v| *v += c);
            }
        }
        let a = solve::<f64>(&p, 1e-11, 50).unwrap();
        let b = solve::<f64>(&q, 1e-11, 50).unwrap();
        let gap = a.solution.values.iter().zip(b.solution.values.iter()).map(|(x, y)| (y - x - c).abs()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-10, "{}", gap);
    }

    #[test]
    fn solver_unique_and_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_smooth_problem(&mut rng, 32);
        let coons = solve::<f64>(&p, 1e-11, 50).unwrap();
        let zero = solve_with::<f64>(&p, &SolveOptions { tol: 1e-11, initial: InitialGuess::Zero, ..SolveOptions::default() }).unwrap();
        let gap = coons.solution.values.iter().zip(zero.solution.values.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-8, "{}", gap);

        let v = &coons.solution.values;
        let (nx, ny) = v.dim();
        let edge = v.indexed_iter().filter(|((i, j), _)| *i == 0 || *j == 0 || *i == nx - 1 || *j == ny - 1).map(|(_, x)| *x);
        let (lo, hi) = edge.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
        prop_assert!(v.iter().all(|x| *x >= lo - 1e-9 && *x <= hi + 1e-9));

        // quadratic tail
        let h = &coons.history;
        for w in h.windows(2) {
            if w[0] < 1e-3 && w[1] > 1e-12 {
                prop_assert!(w[1] <= 1e3 * w[0] * w[0], "{:?}", h);
            }
        }
    }
}

fn trace_opts() -> TraceOptions<f64> {
    TraceOptions::new(100.0, 360)
}

fn origin(t: f64) -> AmbientPoint<f64> {
    AmbientPoint::from_base(HPoint::origin(), t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn diagonal_traces_pass_oscillation_and_shift(r0 in 0.1f64..2.0) {
        let m = build_mesh_on(&diagonal_family(r0), ((-150.0, 150.0), (-300.0, 300.0)), 301, 601).unwrap();
        let a = trace_surface_boundary(&m, &origin(0.0), &trace_opts()).unwrap();
        prop_assert!(oscillation_check(&a.geodesic, 1e-9).is_ok());
        let ends = [IdealPoint::Finite(0.0), IdealPoint::Infinity];
        let opts = trace_opts();
        for c in &a.geodesic.chambers {
            prop_assert!(c.slopes.lo == 0.0);
            if ends.iter().any(|e| c.theta.approx_eq(e, 1e-9)) {
                prop_assert!((c.slopes.hi - r0).abs() < 0.02 * (1.0 + r0));
            } else {
                // rulings not yet flat at the escape radius
                prop_assert!(c.slopes.hi < 2.0 * opts.slope_floor, "{:?}", c);
            }
        }
        for e in &ends {
            prop_assert!(a.geodesic.chambers.iter().any(|c| c.theta.approx_eq(e, 1e-9) && (c.slopes.hi - r0).abs() < 0.02 * (1.0 + r0)));
        }
        let up = m.map(|v| AmbientPoint::from_base(v.base, v.t + 10.0));
        let b = trace_surface_boundary(&up, &origin(10.0), &trace_opts()).unwrap();
        prop_assert_eq!(a.geodesic.chambers.len(), b.geodesic.chambers.len());
        for (x, y) in a.geodesic.chambers.iter().zip(&b.geodesic.chambers) {
            prop_assert!(x.theta.approx_eq(&y.theta, 1e-12) && x.sign == y.sign);
            prop_assert!((x.slopes.lo - y.slopes.lo).abs() < 1e-3 && (x.slopes.hi - y.slopes.hi).abs() < 1e-3);
        }
    }

    #[test]
    fn helicoid_traces_pass_oscillation(pitch in 0.2f64..3.0) {
        let f = Family::Ruled(RuledSurface::Helicoid { center: HPoint::origin(), pitch });
        let s_max = (6.0 / pitch).min(60.0);
        let m = build_mesh_on(&f, ((-s_max, s_max), (-150.0, 150.0)), 241, 301).unwrap();
        let tr = trace_surface_boundary(&m, &origin(0.0), &trace_opts()).unwrap();
        prop_assert!(oscillation_check(&tr.geodesic, 1e-9).is_ok());
    }
}

#[test]
fn family_traces_pass_oscillation() {
    let arc = BoundaryArc {
        q1: IdealPoint::Finite(-1.0),
        q2: IdealPoint::Finite(1.0),
        ccw: true,
    };
    let families: [Family<f64>; 5] = [
        Family::HorizontalSlice { t: 2.0 },
        Family::VerticalFlat {
            geodesic: GeodesicH2::new(IdealPoint::Finite(0.0), IdealPoint::Infinity).unwrap(),
        },
        Family::TallRectangle(TallRectangle::semi_infinite(arc, 0.0, true).unwrap()),
        Family::TallRectangle(TallRectangle::finite(0.5, arc, 0.0).unwrap()),
        Family::Catenoid {
            profile: catenoid_profile(0.6).unwrap(),
            center: HPoint::origin(),
        },
    ];
    for f in &families {
        let dom = match f {
            Family::HorizontalSlice { .. } => ((0.5, 120.0), (-PI, PI)),
            Family::TallRectangle(tr) if tr.b.is_infinite() => ((0.01, 300.0), (-150.0, 150.0)),
            Family::TallRectangle(tr) => ((tr.a + 1e-3, tr.b - 1e-3), (-150.0, 150.0)),
            _ => {
                let ((u0, u1), (v0, v1)) = f.domain();
                ((u0 * 150.0, u1 * 150.0), (v0, v1))
            }
        };
        let dom = match f {
            Family::Catenoid { .. } => f.domain(),
            _ => dom,
        };
        let m = build_mesh_on(f, dom, 201, 301).unwrap();
        let Ok(tr) = trace_surface_boundary(&m, &origin(0.0), &trace_opts()) else { continue };
        assert!(oscillation_check(&tr.geodesic, 1e-9).is_ok(), "{}: {:?}", f.name(), tr.geodesic);
    }
}

#[test]
fn meshes_refine_at_second_order() {
    let arc = BoundaryArc {
        q1: IdealPoint::Finite(0.0),
        q2: IdealPoint::Infinity,
        ccw: true,
    };
    let axis = GeodesicH2::new(IdealPoint::Finite(-1.0), IdealPoint::Finite(2.0)).unwrap();
    let families = [
        Family::VerticalFlat { geodesic: axis },
        Family::TallRectangle(TallRectangle::finite(0.5, arc, 0.0).unwrap()),
        Family::TallRectangle(TallRectangle::semi_infinite(arc, 0.0, true).unwrap()),
        Family::Catenoid {
            profile: catenoid_profile(1.0).unwrap(),
            center: HPoint::origin(),
        },
        Family::Ruled(RuledSurface::Diagonal { axis, slope: 0.7 }),
        Family::Ruled(RuledSurface::Helicoid {
            center: HPoint::origin(),
            pitch: 0.5,
        }),
    ];
    for f in &families {
        let coarse = mesh_mean_curvature(&build_mesh(f, 65, 65).unwrap()).unwrap().sup_norm;
        let fine = mesh_mean_curvature(&build_mesh(f, 129, 129).unwrap()).unwrap().sup_norm;
        assert!(fine < 1e-10 || coarse / fine >= 3.0, "{}: {coarse} -> {fine}", f.name());
    }
    let slice = mesh_mean_curvature(&build_mesh(&Family::HorizontalSlice { t: 2.0 }, 33, 33).unwrap()).unwrap();
    assert!(slice.sup_norm < 1e-9);
}

#[test]
fn expanded_form_agrees_with_coordinate_form() {
    // Δu(1 + x²|∇u|²) − x² Σ u_ij u_i u_j − x u_x |∇u|², differenced directly
    let u = |x: f64, y: f64| (1.3 * x).sin() * (0.7 * y + 0.2).cos() + 0.4 * x * y;
    for n in [33usize, 65] {
        let g = GraphFunction::sample(Orientation::Vertical, (0.0, 0.5), (-0.5, 0.5), n, n, u).unwrap();
        let r = vertical_residual(&g).unwrap();
        let (hx, hy) = g.spacing();
        let v = &g.values;
        for &(i, j, res) in r.cells.iter().filter(|c| c.0 > 0) {
            let x = g.xi(i);
            let ux = (v[[i + 1, j]] - v[[i - 1, j]]) / (2.0 * hx);
            let uy = (v[[i, j + 1]] - v[[i, j - 1]]) / (2.0 * hy);
            let uxx = (v[[i + 1, j]] - 2.0 * v[[i, j]] + v[[i - 1, j]]) / (hx * hx);
            let uyy = (v[[i, j + 1]] - 2.0 * v[[i, j]] + v[[i, j - 1]]) / (hy * hy);
            let uxy = (v[[i + 1, j + 1]] - v[[i + 1, j - 1]] - v[[i - 1, j + 1]] + v[[i - 1, j - 1]]) / (4.0 * hx * hy);
            let grad2 = ux * ux + uy * uy;
            let hess = uxx * ux * ux + 2.0 * uxy * ux * uy + uyy * uy * uy;
            let expanded = (uxx + uyy) * (1.0 + x * x * grad2) - x * x * hess - x * ux * grad2;
            assert!((expanded - res).abs() < 1e-9 * (1.0 + res.abs()), "({i},{j}) {expanded} vs {res}");
        }
    }
}

#[test]
fn generators_classify_once_each() {
    let q = [-10.0, -0.1, 0.1, 10.0].map(IdealPoint::Finite);
    let types: Vec<_> = [
        GeodesicBoundarySet::slice(),
        GeodesicBoundarySet::semi_infinite_rectangle(q[0], q[1], Sign::Plus),
        GeodesicBoundarySet::four_chambers(q),
        GeodesicBoundarySet::two_opposite(q),
    ]
    .iter()
    .map(|s| classify_geodesic_curve(s).unwrap())
    .collect();
    for (k, a) in types.iter().enumerate() {
        for b in &types[k + 1..] {
            assert_ne!(a, b);
        }
    }
}
