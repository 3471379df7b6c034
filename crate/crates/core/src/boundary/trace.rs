//! Asymptotic boundary of discrete surfaces and of isometry orbits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geodesic::{ChamberEntry, EquatorArc, GeodesicBoundarySet};
use crate::compactify::{geodesic_limit, DivergingSample, GeodesicBoundaryPoint, Limit, LimitConfig, LimitError, Sign, SlopeInterval};
use crate::hyp::{dist_h2, ray_endpoint, AmbientPoint, IdealPoint, Isometry};
use crate::mesh::SurfaceMesh;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("no mesh vertex lies beyond the escape radius {0}")]
    MeshTooSmall(f64),
    #[error("generator is not a hyperbolic translation (|trace| = {0})")]
    DegenerateGenerator(f64),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions<T> {
    pub escape_radius: T,
    pub bins: usize,
    /// Slopes at or below this count as the equator.
    pub slope_floor: T,
    /// Horizontal radius within which a vertex with `|t| > R` marks a pole.
    pub pole_radius: T,
}

impl<T: Scalar> TraceOptions<T> {
    pub fn new(escape_radius: T, bins: usize) -> Self {
        Self {
            escape_radius,
            bins,
            slope_floor: T::lit(0.05),
            pole_radius: escape_radius * T::lit(0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProductBin<T> {
    pub theta: IdealPoint<T>,
    pub t_min: T,
    pub t_max: T,
    pub count: usize,
}

/// Far vertices sorted into the product compactification: cylinder bins and cap counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProductTrace<T> {
    pub cylinder: Vec<ProductBin<T>>,
    pub cap_plus: usize,
    pub cap_minus: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SurfaceTrace<T> {
    pub geodesic: GeodesicBoundarySet<T>,
    pub product: ProductTrace<T>,
    /// Bin width in radians; bin `k` is centred at Cayley angle `k·width`.
    pub bin_width: T,
}

#[derive(Clone, Copy)]
struct Hull<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Hull<T> {
    fn add(h: &mut Option<Self>, v: T) {
        *h = Some(match *h {
            None => Hull { lo: v, hi: v },
            Some(Hull { lo, hi }) => Hull { lo: lo.min(v), hi: hi.max(v) },
        });
    }
}

pub fn bin_of<T: Scalar>(angle: T, bins: usize) -> usize {
    let w = (T::PI() + T::PI()) / T::from_usize_lossy(bins);
    let k = (angle / w).round().to_i64().unwrap_or(0);
    k.rem_euclid(bins as i64) as usize
}

pub fn bin_center<T: Scalar>(k: usize, bins: usize) -> IdealPoint<T> {
    let w = (T::PI() + T::PI()) / T::from_usize_lossy(bins);
    IdealPoint::from_angle(w * T::from_usize_lossy(k))
}

/// Bin far vertices by ideal direction and record slope hulls per bin and sign.
pub fn trace_surface_boundary<T: Scalar>(
    m: &SurfaceMesh<T>,
    basepoint: &AmbientPoint<T>,
    opts: &TraceOptions<T>,
) -> Result<SurfaceTrace<T>, TraceError> {
    let n = opts.bins.max(1);
    let r = opts.escape_radius;
    let mut hull: Vec<[Option<Hull<T>>; 2]> = vec![[None, None]; n];
    let mut equator = vec![false; n];
    let mut cyl: Vec<Option<Hull<T>>> = vec![None; n];
    let mut cyl_count = vec![0usize; n];
    let (mut poles, mut caps) = ([false; 2], [0usize; 2]);
    let mut far = 0usize;
    let mut flat_angle: Vec<Option<T>> = vec![None; m.vertices.len()];
    let q0 = basepoint.base;
    for (vi, v) in m.vertices.iter().enumerate() {
        let dh = dist_h2(&q0, &v.base);
        let dt = v.t - basepoint.t;
        if (dh * dh + dt * dt).sqrt() <= r {
            continue;
        }
        far += 1;
        let side = if dt >= T::zero() { 0 } else { 1 };
        if dt.abs() > r && dh <= opts.pole_radius {
            poles[side] = true;
        }
        if dh <= r {
            caps[side] += 1;
        }
        if dh <= opts.pole_radius {
            continue;
        }
        let Ok(end) = ray_endpoint(&q0, &v.base) else { continue };
        let k = bin_of(end.angle(), n);
        if dh > r {
            Hull::add(&mut cyl[k], v.t);
            cyl_count[k] += 1;
        }
        let slope = dt.abs() / dh;
        if slope <= opts.slope_floor {
            equator[k] = true;
            flat_angle[vi] = Some(end.angle());
        }
        Hull::add(&mut hull[k][side], slope);
    }
    if far == 0 {
        return Err(TraceError::MeshTooSmall(r.as_f64()));
    }

    // A triangle with all corners on the equator covers the short arc between them.
    let tau = T::PI() + T::PI();
    for tri in &m.triangles {
        let [Some(a), Some(b), Some(c)] = tri.map(|i| flat_angle[i]) else { continue };
        let rel = |u: T| {
            let d = (u - a) % tau;
            let d = if d > T::PI() { d - tau } else if d < -T::PI() { d + tau } else { d };
            d
        };
        let (db, dc) = (rel(b), rel(c));
        let lo = T::zero().min(db).min(dc);
        let hi = T::zero().max(db).max(dc);
        if hi - lo >= T::PI() {
            continue;
        }
        let k0 = bin_of(a + lo, n);
        let steps = (bin_of(a + hi, n) + n - k0) % n;
        for s in 0..=steps {
            equator[(k0 + s) % n] = true;
        }
    }

    // A bin whose slopes sit inside a steeper neighbour's is that chamber's spill-over.
    let absorbed = |k: usize, side: usize, h: &Hull<T>| {
        [(k + 1) % n, (k + n - 1) % n].iter().any(|&j| {
            j != k
                && hull[j][side].is_some_and(|g| g.hi > h.hi && g.lo <= h.lo.max(opts.slope_floor))
        })
    };
    let mut set = GeodesicBoundarySet::default();
    for (k, signs) in hull.iter().enumerate() {
        for (side, h) in signs.iter().enumerate() {
            let Some(h) = h else { continue };
            if h.hi <= opts.slope_floor || absorbed(k, side, h) {
                continue;
            }
            set.chambers.push(ChamberEntry {
                theta: bin_center(k, n),
                sign: if side == 0 { Sign::Plus } else { Sign::Minus },
                slopes: SlopeInterval {
                    lo: if h.lo <= opts.slope_floor { T::zero() } else { h.lo },
                    hi: h.hi,
                },
            });
        }
    }
    for (side, p) in poles.iter().enumerate() {
        if *p {
            set.poles.push(if side == 0 { Sign::Plus } else { Sign::Minus });
        }
    }
    set.equator_arcs = merge_bins(&equator, n);

    let product = ProductTrace {
        cylinder: (0..n)
            .filter_map(|k| {
                cyl[k].map(|h| ProductBin {
                    theta: bin_center(k, n),
                    t_min: h.lo,
                    t_max: h.hi,
                    count: cyl_count[k],
                })
            })
            .collect(),
        cap_plus: caps[0],
        cap_minus: caps[1],
    };
    Ok(SurfaceTrace {
        geodesic: set,
        product,
        bin_width: (T::PI() + T::PI()) / T::from_usize_lossy(n),
    })
}

/// Runs of flagged bins as counterclockwise arcs between bin edges.
fn merge_bins<T: Scalar>(flag: &[bool], n: usize) -> Vec<EquatorArc<T>> {
    if flag.iter().all(|f| *f) {
        return vec![EquatorArc::full()];
    }
    let w = (T::PI() + T::PI()) / T::from_usize_lossy(n);
    let Some(gap) = flag.iter().position(|f| !*f) else { return vec![] };
    let mut arcs = Vec::new();
    let mut k = 0;
    while k < n {
        let i = (gap + k) % n;
        if !flag[i] {
            k += 1;
            continue;
        }
        let mut len = 0;
        while k + len < n && flag[(gap + k + len) % n] {
            len += 1;
        }
        let start = w * (T::from_usize_lossy(i) - T::half());
        let end = start + w * T::from_usize_lossy(len);
        arcs.push(EquatorArc::ccw(IdealPoint::from_angle(start), IdealPoint::from_angle(end)));
        k += len;
    }
    arcs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OrbitSample<T> {
    pub sample: DivergingSample<T>,
    /// Translation length of the horizontal part.
    pub tau: T,
    pub delta: T,
    /// `(t_n − t_0) / d_H(z_0, z_n)` for `n ≥ 1`.
    pub slopes: Vec<T>,
    pub limit: Limit<GeodesicBoundaryPoint<T>, T>,
}

/// Iterate a screw motion from `basepoint` and read off its limiting boundary point.
pub fn orbit_slope_sample<T: Scalar>(
    generator: &Isometry<T>,
    steps: usize,
    basepoint: &AmbientPoint<T>,
) -> Result<OrbitSample<T>, TraceError> {
    let mb = generator.moebius;
    let tr = (mb.a + mb.d).abs() / mb.det().sqrt();
    if generator.vertical_flip || !(tr > T::two()) {
        return Err(TraceError::DegenerateGenerator(tr.as_f64()));
    }
    let tau = T::two() * (tr * T::half()).acosh();
    let mut points = Vec::with_capacity(steps);
    let mut p = *basepoint;
    let mut slopes = Vec::with_capacity(steps);
    for _ in 0..steps {
        p = generator.apply(&p);
        points.push(p);
        slopes.push((p.t - basepoint.t) / dist_h2(&basepoint.base, &p.base));
    }
    let sample = DivergingSample::new(points, *basepoint);
    let escape = (tau * tau + generator.vertical_shift.powi(2)).sqrt() * T::from_usize_lossy(steps / 2);
    let cfg = LimitConfig {
        escape_radius: escape,
        ..LimitConfig::default()
    };
    let limit = geodesic_limit(&sample, &cfg)?;
    Ok(OrbitSample {
        sample,
        tau,
        delta: generator.vertical_shift,
        slopes,
        limit,
    })
}
