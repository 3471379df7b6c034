//! Explicit minimal surfaces: slices, flats, tall rectangles, catenoids,
//! ruled surfaces, and the butterfly boundary curve.

use std::fmt::Write as _;

use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::{Direction, PiecewiseBoundaryCurve, Segment};
use crate::hyp::{ccw_offset, halfplane_from_disk, polar_point, AmbientPoint, GeodesicH2, GeometryError, HPoint, IdealPoint, Mobius};
use crate::mesh::SurfaceMesh;
use crate::residual::{GraphFunction, Orientation};
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions, QuadratureError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("parameter out of domain: {0}")]
    DomainError(String),
    #[error(transparent)]
    QuadratureFailure(#[from] QuadratureError),
    #[error("t = {t} outside the open interval ({a}, {b})")]
    OutOfRange { t: f64, a: f64, b: f64 },
    #[error("resolution {0}x{1} below the 8x8 minimum")]
    ResolutionTooLow(usize, usize),
    #[error("invalid butterfly parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn quad<T: Scalar>() -> QuadOptions<T> {
    QuadOptions {
        max_intervals: 4000,
        ..QuadOptions::default()
    }
}

/// Newton on a decreasing function `g(σ) = target`, safeguarded by bisection
/// on `[0, ∞)`. `dg` is the derivative.
fn invert_decreasing<T: Scalar>(
    g: impl Fn(T) -> Result<T, FamilyError>,
    dg: impl Fn(T) -> T,
    target: T,
    start: T,
) -> Result<T, FamilyError> {
    let (mut lo, mut hi) = (T::zero(), T::infinity());
    let mut x = start;
    for _ in 0..200 {
        let r = g(x)? - target;
        if r > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let step = r / -dg(x);
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { (lo + hi) * T::half() } else { x * T::two() + T::one() };
        }
        if (next - x).abs() <= T::epsilon() * T::lit(8.0) * (T::one() + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Tall-rectangle profile `f'(s) = -1/√P(s)`, `P = C s⁴ + (2C−1) s² + C − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TallRectangleProfile<T> {
    pub c: T,
    pub s_min: T,
    /// `(s, f(s))`, `s` increasing from `s_min`.
    pub f_samples: Vec<(T, T)>,
    /// Total height `ℓ = 2 f(s_min)`; infinite at `C = 1`.
    #[serde(with = "crate::boundary::curve::ext")]
    pub ell: T,
}

impl<T: Scalar> TallRectangleProfile<T> {
    pub fn quartic(&self, s: T) -> T {
        let c = self.c;
        let s2 = s * s;
        c * s2 * s2 + (T::two() * c - T::one()) * s2 + c - T::one()
    }

    /// Integrand after `s = s_min + σ²`.
    fn h(&self, sigma: T) -> T {
        let s = self.s_min + sigma * sigma;
        T::two() / (self.c * (T::two() * self.s_min + sigma * sigma) * (s * s + T::one())).sqrt()
    }

    fn tail(&self, sigma: T) -> Result<T, FamilyError> {
        Ok(integrate_to_infinity(|u| self.h(u), sigma, &quad())?.value)
    }

    /// `f(s)`, normalised by `f(∞) = 0`.
    pub fn f(&self, s: T) -> Result<T, FamilyError> {
        if !(s >= self.s_min) {
            return Err(FamilyError::DomainError(format!("s = {s} below s_min = {}", self.s_min)));
        }
        if self.c == T::one() {
            return Ok((T::one() + s * s).sqrt().recip().atanh());
        }
        self.tail((s - self.s_min).sqrt())
    }

    /// Solve `f(s) = tau` for `tau ∈ (0, ℓ/2]`.
    pub fn f_inverse(&self, tau: T) -> Result<T, FamilyError> {
        if !(tau > T::zero()) || tau > self.ell * T::half() {
            return Err(FamilyError::DomainError(format!("height {tau} outside (0, ℓ/2]")));
        }
        if self.c == T::one() {
            return Ok(tau.sinh().recip());
        }
        if tau == self.ell * T::half() {
            return Ok(self.s_min);
        }
        // tail(σ) ≈ 1/(√C σ²) for large σ
        let start = (self.c.sqrt() * tau).sqrt().recip();
        let sigma = invert_decreasing(|x| self.tail(x), |x| -self.h(x), tau, start)?;
        Ok(self.s_min + sigma * sigma)
    }
}

pub fn tall_profile<T: Scalar>(c: T) -> Result<TallRectangleProfile<T>, FamilyError> {
    if !(c > T::zero() && c <= T::one()) {
        return Err(FamilyError::DomainError(format!("C = {c} not in (0, 1]")));
    }
    let s_min = ((T::one() - c) / c).sqrt();
    let mut p = TallRectangleProfile {
        c,
        s_min,
        f_samples: Vec::new(),
        ell: T::infinity(),
    };
    if c < T::one() {
        p.ell = T::two() * p.tail(T::zero())?;
    }
    for k in 1..=64 {
        let sigma = T::from_usize_lossy(k) * T::lit(0.125);
        let s = s_min + sigma * sigma;
        p.f_samples.push((s, p.f(s)?));
    }
    if c < T::one() {
        p.f_samples.insert(0, (s_min, p.ell * T::half()));
    }
    Ok(p)
}

/// Boundary arc of `∂H²` from `q1` to `q2`, counterclockwise if `ccw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundaryArc<T> {
    pub q1: IdealPoint<T>,
    pub q2: IdealPoint<T>,
    pub ccw: bool,
}

impl<T: Scalar> BoundaryArc<T> {
    /// Orientation-preserving map taking the positive imaginary half-axis
    /// side of `0 → ∞` (boundary arc through `1`) onto this arc's side.
    pub fn frame(&self) -> Result<Mobius<T>, GeometryError> {
        if self.ccw {
            Mobius::zero_inf_frame(&self.q1, &self.q2)
        } else {
            Mobius::zero_inf_frame(&self.q2, &self.q1)
        }
    }

    pub fn geodesic(&self) -> Result<GeodesicH2<T>, GeometryError> {
        GeodesicH2::new(self.q1, self.q2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TallRectangle<T> {
    pub profile: TallRectangleProfile<T>,
    pub arc: BoundaryArc<T>,
    #[serde(with = "crate::boundary::curve::ext")]
    pub a: T,
    #[serde(with = "crate::boundary::curve::ext")]
    pub b: T,
}

impl<T: Scalar> TallRectangle<T> {
    /// `H(c, a, a + ℓ(C))`.
    pub fn finite(c: T, arc: BoundaryArc<T>, a: T) -> Result<Self, FamilyError> {
        let profile = tall_profile(c)?;
        if !profile.ell.is_finite() {
            return Err(FamilyError::DomainError("C = 1 has infinite height".into()));
        }
        let b = a + profile.ell;
        arc.geodesic()?;
        Ok(Self { profile, arc, a, b })
    }

    /// `H(c, a, ∞)` if `upward`, else `H(c, -∞, a)`.
    pub fn semi_infinite(arc: BoundaryArc<T>, a: T, upward: bool) -> Result<Self, FamilyError> {
        arc.geodesic()?;
        let profile = tall_profile(T::one())?;
        let (a, b) = if upward { (a, T::infinity()) } else { (T::neg_infinity(), a) };
        Ok(Self { profile, arc, a, b })
    }

    /// `s(t) = sinh ρ(t)`.
    pub fn s_at(&self, t: T) -> Result<T, FamilyError> {
        if !(t > self.a && t < self.b) {
            return Err(FamilyError::OutOfRange {
                t: t.as_f64(),
                a: self.a.as_f64(),
                b: self.b.as_f64(),
            });
        }
        let tau = if self.b.is_infinite() {
            t - self.a
        } else if self.a.is_infinite() {
            self.b - t
        } else {
            self.profile.ell * T::half() - (t - (self.a + self.b) * T::half()).abs()
        };
        self.profile.f_inverse(tau)
    }

    /// Point at signed position `w` along the equidistant slice at height `t`.
    pub fn point(&self, t: T, w: T) -> Result<AmbientPoint<T>, FamilyError> {
        let rho = self.s_at(t)?.asinh();
        let e = w.exp();
        let base = HPoint::new(e / rho.cosh(), e * rho.tanh())?;
        Ok(AmbientPoint::from_base(self.arc.frame()?.apply(&base), t))
    }

    /// Horizontal graph `y = v(x, t) = x·s(t)` over the canonical axis `0 → ∞`.
    pub fn horizontal_graph(&self, x: (T, T), t: (T, T), nx: usize, nt: usize) -> Result<GraphFunction<T>, FamilyError> {
        if nx < 2 || nt < 2 {
            return Err(FamilyError::ResolutionTooLow(nx, nt));
        }
        let hx = (x.1 - x.0) / T::from_usize_lossy(nx - 1);
        let ht = (t.1 - t.0) / T::from_usize_lossy(nt - 1);
        let mut values = Array2::from_elem((nx, nt), T::zero());
        for j in 0..nt {
            let s = self.s_at(t.0 + ht * T::from_usize_lossy(j))?;
            for i in 0..nx {
                values[[i, j]] = (x.0 + hx * T::from_usize_lossy(i)) * s;
            }
        }
        GraphFunction::new(Orientation::Horizontal, x, t, values).map_err(|e| FamilyError::DomainError(e.to_string()))
    }
}

pub fn rho_profile<T: Scalar>(tr: &TallRectangle<T>, t: T) -> Result<T, FamilyError> {
    let s = tr.s_at(t)?;
    Ok(s.asinh())
}

/// Catenoid profile `r' = ±√(C r² − (1 + r⁴)/4)` in the disk model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CatenoidProfile<T> {
    pub c: T,
    pub r_neck: T,
    pub half_height: T,
    /// `(t, r(t))` on `[-b, b]`.
    pub r_samples: Vec<(T, T)>,
}

impl<T: Scalar> CatenoidProfile<T> {
    pub fn radicand(&self, r: T) -> T {
        self.c * r * r - (T::one() + r.powi(4)) / T::lit(4.0)
    }

    /// Integrand of `t(σ)` after `r = r_neck + σ²`.
    fn g(&self, sigma: T) -> T {
        let r = self.r_neck + sigma * sigma;
        let big = self.r_neck.powi(2).recip();
        T::lit(4.0) / ((T::two() * self.r_neck + sigma * sigma) * (big - r * r)).sqrt()
    }

    /// `(r, t)` at signed neck parameter `σ`, `|σ| ≤ √(1 − r_neck)`.
    pub fn at_sigma(&self, sigma: T) -> Result<(T, T), FamilyError> {
        let t = integrate(|u| self.g(u), T::zero(), sigma.abs(), &quad())?.value;
        Ok((self.r_neck + sigma * sigma, t.copysign(sigma)))
    }

    pub fn sigma_max(&self) -> T {
        (T::one() - self.r_neck).sqrt()
    }

    /// Hyperbolic diameter of the disk bounded by the neck.
    pub fn neck_diameter(&self) -> T {
        T::lit(4.0) * self.r_neck.atanh()
    }
}

pub fn catenoid_profile<T: Scalar>(c: T) -> Result<CatenoidProfile<T>, FamilyError> {
    if !(c > T::half()) || !c.is_finite() {
        return Err(FamilyError::DomainError(format!("C = {c} must exceed 1/2")));
    }
    let r2 = T::two() * c - (T::lit(4.0) * c * c - T::one()).sqrt();
    let mut p = CatenoidProfile {
        c,
        r_neck: r2.sqrt(),
        half_height: T::zero(),
        r_samples: Vec::new(),
    };
    let smax = p.sigma_max();
    p.half_height = integrate(|u| p.g(u), T::zero(), smax, &quad())?.value;
    let n = 32;
    let mut half = Vec::with_capacity(n + 1);
    let mut t = T::zero();
    let mut prev = T::zero();
    for k in 0..=n {
        let sigma = smax * T::from_usize_lossy(k) / T::from_usize_lossy(n);
        t += integrate(|u| p.g(u), prev, sigma, &quad())?.value;
        prev = sigma;
        half.push((t, p.r_neck + sigma * sigma));
    }
    p.r_samples = half.iter().rev().map(|(t, r)| (-*t, *r)).chain(half.iter().skip(1).copied()).collect();
    Ok(p)
}

/// Catenoid whose height `2b` equals `height ∈ (0, π)`; bisection in `log(C − 1/2)`.
pub fn catenoid_for_height<T: Scalar>(height: T) -> Result<CatenoidProfile<T>, FamilyError> {
    if !(height > T::zero() && height < T::PI()) {
        return Err(FamilyError::DomainError(format!("catenoid height {height} not in (0, π)")));
    }
    let two_b = |lc: T| -> Result<T, FamilyError> { Ok(T::two() * catenoid_profile(T::half() + lc.exp())?.half_height) };
    let (mut lo, mut hi) = (T::lit(-20.0), T::lit(20.0));
    if two_b(lo)? < height {
        return Err(FamilyError::DomainError(format!("height {height} too close to π")));
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if two_b(mid)? > height {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * T::lit(4.0) * (T::one() + lo.abs()) {
            break;
        }
    }
    catenoid_profile(T::half() + ((lo + hi) * T::half()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum RuledSurface<T> {
    /// Orbit of the geodesic orthogonal to `axis` at its point nearest `(1,0)`
    /// under screw motions rising `slope` per unit translation.
    Diagonal { axis: GeodesicH2<T>, slope: T },
    /// Orbit of a geodesic through `center` under rotations rising `pitch` per radian.
    Helicoid { center: HPoint<T>, pitch: T },
}

impl<T: Scalar> RuledSurface<T> {
    pub fn point(&self, s: T, u: T) -> Result<AmbientPoint<T>, FamilyError> {
        let ruling = HPoint::new(u.cosh().recip(), u.tanh())?;
        match self {
            RuledSurface::Diagonal { axis, slope } => {
                let (p, q) = axis.endpoints();
                let m = Mobius::zero_inf_frame(&p, &q)?;
                let moved = Mobius::dilation(s).apply(&ruling);
                Ok(AmbientPoint::from_base(m.apply(&moved), *slope * s))
            }
            RuledSurface::Helicoid { center, pitch } => {
                if *pitch == T::zero() {
                    return Err(FamilyError::DomainError("helicoid pitch must be nonzero".into()));
                }
                let base = Mobius::affine_to(center).apply(&ruling);
                Ok(AmbientPoint::from_base(Mobius::rotation(center, s).apply(&base), *pitch * s))
            }
        }
    }
}

/// Family selector for [`build_mesh`]. Parameter domains are fixed so that
/// meshes at different resolutions sample the same patch.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    HorizontalSlice { t: T },
    VerticalFlat { geodesic: GeodesicH2<T> },
    TallRectangle(TallRectangle<T>),
    Catenoid { profile: CatenoidProfile<T>, center: HPoint<T> },
    Ruled(RuledSurface<T>),
}

impl<T: Scalar> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::HorizontalSlice { .. } => "horizontal_slice",
            Family::VerticalFlat { .. } => "vertical_flat",
            Family::TallRectangle(_) => "tall_rectangle",
            Family::Catenoid { .. } => "catenoid",
            Family::Ruled(RuledSurface::Diagonal { .. }) => "ruled_diagonal",
            Family::Ruled(RuledSurface::Helicoid { .. }) => "helicoid",
        }
    }

    /// Parameter rectangle `[u0, u1] × [v0, v1]`.
    pub fn domain(&self) -> ((T, T), (T, T)) {
        let l = T::lit;
        match self {
            Family::HorizontalSlice { .. } => ((l(0.5), l(1.5)), (-T::PI(), T::PI())),
            Family::VerticalFlat { .. } => ((l(-1.0), l(1.0)), (l(-1.0), l(1.0))),
            Family::TallRectangle(tr) => {
                let (a, b) = if tr.a.is_finite() && tr.b.is_finite() {
                    let pad = (tr.b - tr.a) * l(0.05);
                    (tr.a + pad, tr.b - pad)
                } else if tr.a.is_finite() {
                    (tr.a + l(0.5), tr.a + l(4.0))
                } else {
                    (tr.b - l(4.0), tr.b - l(0.5))
                };
                ((a, b), (l(-2.0), l(2.0)))
            }
            Family::Catenoid { profile, .. } => {
                let m = profile.sigma_max() * l(0.9);
                ((-m, m), (-T::PI(), T::PI()))
            }
            Family::Ruled(RuledSurface::Diagonal { .. }) => ((l(-1.0), l(1.0)), (l(-2.0), l(2.0))),
            Family::Ruled(RuledSurface::Helicoid { .. }) => ((-T::PI(), T::PI()), (l(-2.0), l(2.0))),
        }
    }

    fn row_cache(&self, u: T) -> Result<T, FamilyError> {
        match self {
            Family::TallRectangle(tr) => Ok(tr.s_at(u)?.asinh()),
            _ => Ok(T::zero()),
        }
    }

    fn point(&self, u: T, v: T, cache: T) -> Result<AmbientPoint<T>, FamilyError> {
        match self {
            Family::HorizontalSlice { t } => Ok(AmbientPoint::from_base(polar_point(&HPoint::origin(), u, v), *t)),
            Family::VerticalFlat { geodesic } => {
                let (p, q) = geodesic.endpoints();
                let m = Mobius::zero_inf_frame(&p, &q)?;
                Ok(AmbientPoint::from_base(m.apply(&HPoint::new(u.exp(), T::zero())?), v))
            }
            Family::TallRectangle(tr) => {
                let rho = cache;
                let e = v.exp();
                let base = HPoint::new(e / rho.cosh(), e * rho.tanh())?;
                Ok(AmbientPoint::from_base(tr.arc.frame()?.apply(&base), u))
            }
            Family::Catenoid { .. } => unreachable!("catenoid rows are built directly"),
            Family::Ruled(rs) => rs.point(u, v),
        }
    }
}

pub fn build_mesh<T: Scalar>(family: &Family<T>, nu: usize, nv: usize) -> Result<SurfaceMesh<T>, FamilyError> {
    build_mesh_on(family, family.domain(), nu, nv)
}

/// [`build_mesh`] on an explicit parameter rectangle, e.g. a large patch for tracing.
pub fn build_mesh_on<T: Scalar>(family: &Family<T>, domain: ((T, T), (T, T)), nu: usize, nv: usize) -> Result<SurfaceMesh<T>, FamilyError> {
    if nu < 8 || nv < 8 {
        return Err(FamilyError::ResolutionTooLow(nu, nv));
    }
    let ((u0, u1), (v0, v1)) = domain;
    let lerp = |a: T, b: T, k: usize, n: usize| a + (b - a) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1);
    let us: Vec<T> = (0..nu).map(|i| lerp(u0, u1, i, nu)).collect();
    let vs: Vec<T> = (0..nv).map(|j| lerp(v0, v1, j, nv)).collect();
    build_mesh_rows(family, &us, &vs)
}

/// Mesh on the tensor grid of explicit parameter values.
pub fn build_mesh_rows<T: Scalar>(family: &Family<T>, us: &[T], vs: &[T]) -> Result<SurfaceMesh<T>, FamilyError> {
    let (nu, nv) = (us.len(), vs.len());
    if nu < 8 || nv < 8 {
        return Err(FamilyError::ResolutionTooLow(nu, nv));
    }
    let mut verts = Vec::with_capacity(nu * nv);
    if let Family::Catenoid { profile, center } = family {
        let frame = Mobius::affine_to(center);
        for u in us {
            let (r, t) = profile.at_sigma(*u)?;
            for phi in vs {
                let w = Complex::from_polar(r, *phi);
                let p = frame.apply(&halfplane_from_disk(w)?);
                verts.push(AmbientPoint::from_base(p, t));
            }
        }
    } else {
        for u in us {
            let cache = family.row_cache(*u)?;
            for v in vs {
                verts.push(family.point(*u, *v, cache)?);
            }
        }
    }
    Ok(SurfaceMesh::from_grid(verts, nu, nv, family.name()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ButterflyParams<T> {
    pub ell: T,
    pub big_l: T,
    pub a: T,
    pub b: T,
    pub q: [IdealPoint<T>; 4],
}

impl<T: Scalar> ButterflyParams<T> {
    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |m: &str| Err(FamilyError::InvalidParams(m.into()));
        if !(self.ell > T::zero() && self.ell < T::PI()) {
            return bad("need 0 < ℓ < π");
        }
        if !(self.big_l > T::PI()) {
            return bad("need L > π");
        }
        if !(self.a < self.b && self.b + self.ell < self.a + self.big_l) {
            return bad("need a < b and b + ℓ < a + L");
        }
        let base = self.q[0].angle();
        let offs: Vec<T> = self.q.iter().map(|p| ccw_offset(base, p.angle())).collect();
        if !(offs[1] > T::zero() && offs[1] < offs[2] && offs[2] < offs[3]) {
            return bad("q1..q4 must be distinct and counterclockwise ordered");
        }
        Ok(())
    }
}

/// The twelve-segment closed curve.
pub fn butterfly_curve<T: Scalar>(p: &ButterflyParams<T>) -> Result<PiecewiseBoundaryCurve<T>, FamilyError> {
    p.validate()?;
    let [q1, q2, q3, q4] = p.q;
    let (a, b, top, bl) = (p.a, p.b, p.a + p.big_l, p.b + p.ell);
    let vert = |at, from, to| Segment::Vertical { at, from, to };
    let hor = |from, to, direction, t| Segment::Horizontal { from, to, direction, t };
    use Direction::{Ccw, Cw};
    let c = PiecewiseBoundaryCurve::new(vec![
        vert(q1, a, top),
        hor(q1, q2, Ccw, top),
        vert(q2, top, bl),
        hor(q2, q3, Ccw, bl),
        vert(q3, bl, top),
        hor(q3, q4, Ccw, top),
        vert(q4, top, a),
        hor(q4, q3, Cw, a),
        vert(q3, a, b),
        hor(q3, q2, Cw, b),
        vert(q2, b, a),
        hor(q2, q1, Cw, a),
    ]);
    c.validate().map_err(|e| FamilyError::InvalidParams(e.to_string()))?;
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ButterflyWitness<T> {
    pub ell: T,
    pub c_catenoid: T,
    pub r_neck: T,
    /// Hyperbolic diameter of the disk bounded by the catenoid's neck.
    pub d_disk: T,
    pub dist_geodesics: T,
    pub margin: T,
    pub c_tall: T,
    pub big_l: T,
    /// Distance from the tall rectangle to its limiting flat.
    pub r_tall: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case", bound = "T: Scalar")]
pub enum Feasibility<T> {
    Feasible(ButterflyWitness<T>),
    Infeasible { d_disk: T, dist_geodesics: T },
}

pub const FEASIBILITY_SAFETY: f64 = 0.9;

/// Search for a tall height `L` making the barrier argument go through.
pub fn butterfly_feasibility<T: Scalar>(ell: T, q: [IdealPoint<T>; 4]) -> Result<Feasibility<T>, FamilyError> {
    if !(ell > T::zero() && ell < T::PI()) {
        return Err(FamilyError::DomainError(format!("ℓ = {ell} not in (0, π)")));
    }
    let cat = catenoid_for_height(ell)?;
    let d = cat.neck_diameter();
    let g1 = GeodesicH2::new(q[0], q[1])?;
    let g4 = GeodesicH2::new(q[2], q[3])?;
    let dist = g1.distance_to(&g4);
    if dist >= d {
        return Ok(Feasibility::Infeasible {
            d_disk: d,
            dist_geodesics: dist,
        });
    }
    let margin = T::lit(FEASIBILITY_SAFETY) * (d - dist);
    // 2 asinh(s_min) < margin  ⇔  C > sech²(margin/2)
    let c_star = (margin * T::half()).cosh().powi(-2);
    let c_tall = c_star + (T::one() - c_star) * T::lit(1e-6);
    let prof = tall_profile(c_tall)?;
    let r_tall = prof.s_min.asinh();
    if !(T::two() * r_tall < margin && prof.ell > T::PI()) {
        return Err(FamilyError::DomainError("tall rectangle search failed the verification".into()));
    }
    Ok(Feasibility::Feasible(ButterflyWitness {
        ell,
        c_catenoid: cat.c,
        r_neck: cat.r_neck,
        d_disk: d,
        dist_geodesics: dist,
        margin,
        c_tall,
        big_l: prof.ell,
        r_tall,
    }))
}

/// CSV rows `C,s_min,ell`.
pub fn tall_table<T: Scalar>(cs: &[T]) -> Result<String, FamilyError> {
    let mut s = String::from("C,s_min,ell\n");
    for c in cs {
        let p = tall_profile(*c)?;
        let _ = writeln!(s, "{},{},{}", c, p.s_min, p.ell);
    }
    Ok(s)
}

/// CSV rows `C,r_neck,two_b`.
pub fn catenoid_table<T: Scalar>(cs: &[T]) -> Result<String, FamilyError> {
    let mut s = String::from("C,r_neck,two_b\n");
    for c in cs {
        let p = catenoid_profile(*c)?;
        let _ = writeln!(s, "{},{},{}", c, p.r_neck, T::two() * p.half_height);
    }
    Ok(s)
}
