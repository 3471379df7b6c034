//! Hyperbolic plane (upper half-plane model) and the product `H² × R`.
//!
//! Coordinates follow the half-plane convention used throughout the crate:
//! a point is `(x, y)` with `x > 0` the height above the ideal boundary and
//! `y` the boundary coordinate, metric `(dx² + dy²)/x²`. Complex arithmetic
//! uses `z = y + i·x`. The ambient space adds a Euclidean `t` factor.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{default_tol, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid half-plane point (x = {x}, y = {y}): need x > 0 and finite coordinates")]
    InvalidPoint { x: f64, y: f64 },
    #[error("geodesic endpoints must be distinct")]
    DegenerateGeodesic,
    #[error("points coincide; no unique geodesic through them")]
    CoincidentPoints,
    #[error("disk point must lie strictly inside the unit disk (|w| = {0})")]
    OutsideDisk(f64),
    #[error("Moebius map is singular or orientation reversing (det = {0})")]
    BadMobius(f64),
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
}

/// Point of the hyperbolic plane in half-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "RawHPoint<T>")]
pub struct HPoint<T> {
    x: T,
    y: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawHPoint<T> {
    x: T,
    y: T,
}

impl<T: Scalar> TryFrom<RawHPoint<T>> for HPoint<T> {
    type Error = GeometryError;
    fn try_from(raw: RawHPoint<T>) -> Result<Self, Self::Error> {
        HPoint::new(raw.x, raw.y)
    }
}

impl<T: Scalar> HPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self, GeometryError> {
        if x > T::zero() && x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeometryError::InvalidPoint {
                x: x.as_f64(),
                y: y.as_f64(),
            })
        }
    }

    /// The base point `(1, 0)`, which the Cayley map sends to the disk origin.
    pub fn origin() -> Self {
        Self {
            x: T::one(),
            y: T::zero(),
        }
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }

    #[inline]
    pub fn y(&self) -> T {
        self.y
    }

    #[inline]
    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.y, self.x)
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self, GeometryError> {
        Self::new(z.im, z.re)
    }

    pub fn dist(&self, other: &Self) -> T {
        dist_h2(self, other)
    }
}

/// Point `(x, y, t)` of `H² × R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AmbientPoint<T> {
    pub base: HPoint<T>,
    pub t: T,
}

impl<T: Scalar> AmbientPoint<T> {
    pub fn new(x: T, y: T, t: T) -> Result<Self, GeometryError> {
        if !t.is_finite() {
            return Err(GeometryError::NonFinite("t"));
        }
        Ok(Self {
            base: HPoint::new(x, y)?,
            t,
        })
    }

    pub fn from_base(base: HPoint<T>, t: T) -> Self {
        Self { base, t }
    }

    pub fn dist(&self, other: &Self) -> T {
        dist_ambient(self, other)
    }
}

/// Point of the ideal boundary `∂H² = R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdealPoint<T> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> fmt::Display for IdealPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealPoint::Infinity => f.write_str("inf"),
            IdealPoint::Finite(y) => write!(f, "{}", y.as_f64()),
        }
    }
}

impl<T: Scalar> IdealPoint<T> {
    pub fn finite(v: T) -> Result<Self, GeometryError> {
        if v.is_finite() {
            Ok(IdealPoint::Finite(v))
        } else {
            Err(GeometryError::NonFinite("ideal point"))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IdealPoint::Infinity)
    }

    /// Cayley angle in `(-π, π]`: `y ↦ arg((y - i)/(y + i))`, with `∞ ↦ 0`
    /// and `0 ↦ π`. Increasing `y` turns counterclockwise.
    pub fn angle(&self) -> T {
        match *self {
            IdealPoint::Infinity => T::zero(),
            IdealPoint::Finite(y) => {
                // arg((y - i)^2 / (y^2 + 1)) = atan2(-2y, y^2 - 1)
                let a = (-(y + y)).atan2(y * y - T::one());
                if a <= -T::PI() {
                    T::PI()
                } else {
                    a
                }
            }
        }
    }

    /// Inverse of [`IdealPoint::angle`]; angle `0` (mod 2π) maps to `∞`.
    pub fn from_angle(theta: T) -> Self {
        let th = wrap_angle(theta);
        if th.abs() <= T::epsilon() * T::lit(4.0) {
            return IdealPoint::Infinity;
        }
        // y = i(1 + w)/(1 - w) with w = e^{iθ} gives y = -cot(θ/2)
        let half = th * T::half();
        let y = -half.cos() / half.sin();
        IdealPoint::Finite(if y.abs() <= T::epsilon() { T::zero() } else { y })
    }

    /// Point on the unit circle under the Cayley identification.
    pub fn to_circle(&self) -> Complex<T> {
        let a = self.angle();
        Complex::new(a.cos(), a.sin())
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        angle_distance(self.angle(), other.angle()) <= tol
    }

    /// Ordering used for canonical geodesic endpoints: finite by value, `∞` last.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (IdealPoint::Infinity, IdealPoint::Infinity) => Ordering::Equal,
            (IdealPoint::Infinity, _) => Ordering::Greater,
            (_, IdealPoint::Infinity) => Ordering::Less,
            (IdealPoint::Finite(a), IdealPoint::Finite(b)) => {
                a.partial_cmp(b).unwrap_or(Ordering::Equal)
            }
        }
    }
}

impl<T: Scalar> Serialize for IdealPoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            IdealPoint::Finite(v) => s.serialize_f64(v.as_f64()),
            IdealPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de, T: Scalar> Deserialize<'de> for IdealPoint<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) if v.is_finite() => Ok(IdealPoint::Finite(T::lit(v))),
            Repr::Num(_) => Ok(IdealPoint::Infinity),
            Repr::Str(s) if s == "inf" || s == "infinity" => Ok(IdealPoint::Infinity),
            Repr::Str(s) => Err(de::Error::custom(format!("bad ideal point {s:?}"))),
        }
    }
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = a % two_pi;
    if r > T::PI() {
        r -= two_pi;
    } else if r <= -T::PI() {
        r += two_pi;
    }
    r
}

/// Unsigned distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance<T: Scalar>(a: T, b: T) -> T {
    wrap_angle(a - b).abs()
}

/// Counterclockwise angular offset from `from` to `to`, in `[0, 2π)`.
pub fn ccw_offset<T: Scalar>(from: T, to: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut d = (to - from) % two_pi;
    if d < T::zero() {
        d += two_pi;
    }
    d
}

/// Complete geodesic of `H²`, stored by its two ideal endpoints in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GeodesicH2<T> {
    endpoints: (IdealPoint<T>, IdealPoint<T>),
}

/// Shape of a geodesic in half-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicShape<T> {
    /// The vertical line `y = c`.
    Vertical { c: T },
    /// Half-circle of radius `r` centred at `y = c` on the boundary.
    Circle { c: T, r: T },
}

impl<T: Scalar> GeodesicH2<T> {
    pub fn new(a: IdealPoint<T>, b: IdealPoint<T>) -> Result<Self, GeometryError> {
        if a.approx_eq(&b, T::epsilon() * T::lit(16.0)) {
            return Err(GeometryError::DegenerateGeodesic);
        }
        let endpoints = match a.canonical_cmp(&b) {
            Ordering::Greater => (b, a),
            _ => (a, b),
        };
        Ok(Self { endpoints })
    }

    pub fn endpoints(&self) -> (IdealPoint<T>, IdealPoint<T>) {
        self.endpoints
    }

    pub fn shape(&self) -> GeodesicShape<T> {
        match self.endpoints {
            (IdealPoint::Finite(c), IdealPoint::Infinity)
            | (IdealPoint::Infinity, IdealPoint::Finite(c)) => GeodesicShape::Vertical { c },
            (IdealPoint::Finite(a), IdealPoint::Finite(b)) => GeodesicShape::Circle {
                c: (a + b) * T::half(),
                r: (b - a).abs() * T::half(),
            },
            (IdealPoint::Infinity, IdealPoint::Infinity) => unreachable!("validated endpoints"),
        }
    }

    /// Unit-speed parametrisation. For a vertical line the parameter is
    /// `log x`; for a half-circle `u = 0` is the top and `u → +∞` tends to the
    /// larger endpoint.
    pub fn point_at(&self, u: T) -> HPoint<T> {
        match self.shape() {
            GeodesicShape::Vertical { c } => HPoint { x: u.exp(), y: c },
            GeodesicShape::Circle { c, r } => HPoint {
                x: r / u.cosh(),
                y: c + r * u.tanh(),
            },
        }
    }

    /// Signed distance from `p`; positive on the side away from infinity
    /// (inside the half-circle) or, for a vertical line, on the side `y > c`.
    pub fn signed_distance(&self, p: &HPoint<T>) -> T {
        match self.shape() {
            GeodesicShape::Vertical { c } => ((p.y - c) / p.x).asinh(),
            GeodesicShape::Circle { c, r } => {
                let dy = p.y - c;
                ((r * r - dy * dy - p.x * p.x) / (T::two() * r * p.x)).asinh()
            }
        }
    }

    pub fn distance_to_point(&self, p: &HPoint<T>) -> T {
        self.signed_distance(p).abs()
    }

    pub fn contains(&self, p: &HPoint<T>, tol: T) -> bool {
        self.distance_to_point(p) <= tol
    }

    /// Whether the two geodesics cross in `H²` (endpoints interleave).
    pub fn crosses(&self, other: &Self) -> bool {
        let (a, b) = (self.endpoints.0.angle(), self.endpoints.1.angle());
        let span = ccw_offset(a, b);
        let c = ccw_offset(a, other.endpoints.0.angle());
        let d = ccw_offset(a, other.endpoints.1.angle());
        let tol = T::epsilon() * T::lit(64.0);
        let inside = |v: T| v > tol && v < span - tol;
        let outside = |v: T| v > span + tol && v < T::PI() + T::PI() - tol;
        (inside(c) && outside(d)) || (inside(d) && outside(c))
    }

    /// Hyperbolic distance between two geodesics; zero when they cross or
    /// share an endpoint. Uses the cross-ratio of the four endpoints.
    pub fn distance_to(&self, other: &Self) -> T {
        if self.crosses(other) {
            return T::zero();
        }
        let (p1, p2) = self.endpoints;
        let (p3, p4) = other.endpoints;
        let tol = T::epsilon() * T::lit(64.0);
        for q in [p3, p4] {
            if q.approx_eq(&p1, tol) || q.approx_eq(&p2, tol) {
                return T::zero();
            }
        }
        // cyclic order a, b, c, d with {a, b} and {c, d} the two geodesics
        let a0 = p1.angle();
        let (o2, o3, o4) = (
            ccw_offset(a0, p2.angle()),
            ccw_offset(a0, p3.angle()),
            ccw_offset(a0, p4.angle()),
        );
        let (x, y) = if o3 < o4 { (p3, p4) } else { (p4, p3) };
        let (a, b, c, d) = if o3 > o2 { (p1, p2, x, y) } else { (x, y, p2, p1) };
        let chord = |u: IdealPoint<T>, v: IdealPoint<T>| (u.to_circle() - v.to_circle()).norm();
        let q = chord(b, c) * chord(a, d) / (chord(b, d) * chord(a, c));
        if q >= T::one() {
            return T::zero();
        }
        T::two() * q.sqrt().atanh()
    }
}

/// Hyperbolic distance, computed as `2 asinh(|Δ| / (2 √(x₁x₂)))`.
pub fn dist_h2<T: Scalar>(p: &HPoint<T>, q: &HPoint<T>) -> T {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = dx.hypot(dy);
    T::two() * (chord / (T::two() * (p.x.sqrt() * q.x.sqrt()))).asinh()
}

/// Product-metric distance in `H² × R`.
pub fn dist_ambient<T: Scalar>(p: &AmbientPoint<T>, q: &AmbientPoint<T>) -> T {
    dist_h2(&p.base, &q.base).hypot(p.t - q.t)
}

/// `s(x, y) = (1 - x² - y²)/(2x)`, the sinh of the signed distance to the
/// unit half-circle geodesic joining `y = -1` and `y = 1`.
pub fn equidistant_coordinate<T: Scalar>(p: &HPoint<T>) -> T {
    (T::one() - p.x * p.x - p.y * p.y) / (T::two() * p.x)
}

/// The unique geodesic through two distinct points.
pub fn geodesic_through<T: Scalar>(p: &HPoint<T>, q: &HPoint<T>) -> Result<GeodesicH2<T>, GeometryError> {
    if dist_h2(p, q) <= default_tol::<T>() * T::lit(1e-2) {
        return Err(GeometryError::CoincidentPoints);
    }
    let dy = q.y - p.y;
    let scale = T::one().max(p.y.abs()).max(q.y.abs());
    if dy.abs() <= T::epsilon() * scale {
        return GeodesicH2::new(IdealPoint::Finite(p.y), IdealPoint::Infinity);
    }
    // centre on the boundary equidistant (Euclidean) from p and q
    let c = ((q.x * q.x + q.y * q.y) - (p.x * p.x + p.y * p.y)) / (T::two() * dy);
    let r = (p.y - c).hypot(p.x);
    GeodesicH2::new(IdealPoint::Finite(c - r), IdealPoint::Finite(c + r))
}

/// Ideal endpoint of the geodesic ray starting at `from` and passing through `to`.
pub fn ray_endpoint<T: Scalar>(from: &HPoint<T>, to: &HPoint<T>) -> Result<IdealPoint<T>, GeometryError> {
    if dist_h2(from, to) <= default_tol::<T>() * T::lit(1e-2) {
        return Err(GeometryError::CoincidentPoints);
    }
    if to.y == from.y {
        return Ok(if to.x > from.x { IdealPoint::Infinity } else { IdealPoint::Finite(from.y) });
    }
    // move `from` to i, then read the direction of `to` in the disk
    let z = Complex::new((to.y - from.y) / from.x, to.x / from.x);
    let i = Complex::new(T::zero(), T::one());
    let w = (z - i) / (z + i);
    Ok(match IdealPoint::from_angle(w.im.atan2(w.re)) {
        IdealPoint::Infinity => IdealPoint::Infinity,
        IdealPoint::Finite(y) => IdealPoint::Finite(from.x * y + from.y),
    })
}

/// Real Moebius transformation `z ↦ (az + b)/(cz + d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Mobius<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> Mobius<T> {
    pub fn identity() -> Self {
        Self {
            a: T::one(),
            b: T::zero(),
            c: T::zero(),
            d: T::one(),
        }
    }

    /// Build from a matrix with positive determinant, rescaling to `det = 1`.
    pub fn normalized(a: T, b: T, c: T, d: T) -> Result<Self, GeometryError> {
        let det = a * d - b * c;
        if !(det > T::zero()) || !det.is_finite() {
            return Err(GeometryError::BadMobius(det.as_f64()));
        }
        let k = det.sqrt().recip();
        Ok(Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self {
            a: self.d / det,
            b: -self.b / det,
            c: -self.c / det,
            d: self.a / det,
        }
    }

    pub fn apply(&self, p: &HPoint<T>) -> HPoint<T> {
        let z = p.to_complex();
        let num = z * self.a + self.b;
        let den = z * self.c + self.d;
        let w = num / den;
        // det = 1 keeps the image in the upper half-plane: Im w = x/|cz+d|²
        let x = p.x / den.norm_sqr();
        HPoint { x, y: w.re }
    }

    pub fn apply_ideal(&self, q: &IdealPoint<T>) -> IdealPoint<T> {
        match *q {
            IdealPoint::Infinity => {
                if self.c == T::zero() {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(self.a / self.c)
                }
            }
            IdealPoint::Finite(y) => {
                let den = self.c * y + self.d;
                if den == T::zero() {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((self.a * y + self.b) / den)
                }
            }
        }
    }

    /// Dilation `z ↦ e^τ z`: translation by `τ` along the geodesic `0 → ∞`.
    pub fn dilation(tau: T) -> Self {
        let h = (tau * T::half()).exp();
        Self {
            a: h,
            b: T::zero(),
            c: T::zero(),
            d: h.recip(),
        }
    }

    /// Elliptic rotation by `alpha` (counterclockwise) about the point `i = (1, 0)`.
    pub fn rotation_about_origin(alpha: T) -> Self {
        let (s, c) = (alpha * T::half()).sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    /// Affine map `z ↦ x₀z + y₀` taking `(1, 0)` to `p`.
    pub fn affine_to(p: &HPoint<T>) -> Self {
        let k = p.x.sqrt();
        Self {
            a: k,
            b: p.y / k,
            c: T::zero(),
            d: k.recip(),
        }
    }

    /// Matrix (not normalised) sending `0 ↦ p`, `∞ ↦ q`; used for conjugation.
    fn zero_inf_to(p: &IdealPoint<T>, q: &IdealPoint<T>) -> Result<(T, T, T, T), GeometryError> {
        match (*p, *q) {
            (IdealPoint::Finite(p), IdealPoint::Finite(q)) => Ok((q, p, T::one(), T::one())),
            (IdealPoint::Finite(p), IdealPoint::Infinity) => Ok((T::one(), p, T::zero(), T::one())),
            (IdealPoint::Infinity, IdealPoint::Finite(q)) => Ok((q, -T::one(), T::one(), T::zero())),
            (IdealPoint::Infinity, IdealPoint::Infinity) => Err(GeometryError::DegenerateGeodesic),
        }
    }

    /// Orientation-preserving map with `0 ↦ p`, `∞ ↦ q`, `det = 1`.
    pub fn zero_inf_frame(p: &IdealPoint<T>, q: &IdealPoint<T>) -> Result<Self, GeometryError> {
        let (a, b, c, d) = match (*p, *q) {
            (IdealPoint::Finite(p), IdealPoint::Finite(q)) if q < p => (q, -p, T::one(), -T::one()),
            _ => Self::zero_inf_to(p, q)?,
        };
        if a * d - b * c <= T::zero() {
            return Err(GeometryError::DegenerateGeodesic);
        }
        Self::normalized(a, b, c, d)
    }

    /// Hyperbolic translation by `tau` along the geodesic from `from` towards `to`.
    pub fn translation(from: &IdealPoint<T>, to: &IdealPoint<T>, tau: T) -> Result<Self, GeometryError> {
        if from.approx_eq(to, T::epsilon() * T::lit(16.0)) {
            return Err(GeometryError::DegenerateGeodesic);
        }
        let (a, b, c, d) = Self::zero_inf_to(from, to)?;
        let m = Self { a, b, c, d };
        let det = m.det();
        if det == T::zero() {
            return Err(GeometryError::DegenerateGeodesic);
        }
        let conj = m.compose(&Self::dilation(tau)).compose(&m.inverse());
        // det(conj) = 1 up to rounding; renormalise
        Self::normalized(conj.a, conj.b, conj.c, conj.d)
    }

    /// Rotation by `alpha` about an arbitrary point.
    pub fn rotation(center: &HPoint<T>, alpha: T) -> Self {
        let a = Self::affine_to(center);
        a.compose(&Self::rotation_about_origin(alpha)).compose(&a.inverse())
    }

    /// Orientation-preserving map sending `z1, z2, z3` to `w1, w2, w3`.
    pub fn from_three_points(z: [IdealPoint<T>; 3], w: [IdealPoint<T>; 3]) -> Result<Self, GeometryError> {
        let sz = Self::to_standard(z)?;
        let sw = Self::to_standard(w)?;
        let m = sw.inverse().compose(&sz);
        Self::normalized(m.a, m.b, m.c, m.d)
    }

    /// Matrix sending `(p1, p2, p3) ↦ (0, 1, ∞)`.
    fn to_standard(p: [IdealPoint<T>; 3]) -> Result<Self, GeometryError> {
        use IdealPoint::*;
        let (a, b, c, d) = match (p[0], p[1], p[2]) {
            (Finite(z1), Finite(z2), Finite(z3)) => (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)),
            (Infinity, Finite(z2), Finite(z3)) => (T::zero(), -(z2 - z3), -T::one(), z3),
            (Finite(z1), Infinity, Finite(z3)) => (T::one(), -z1, T::one(), -z3),
            (Finite(z1), Finite(z2), Infinity) => (T::one(), -z1, T::zero(), z2 - z1),
            _ => return Err(GeometryError::DegenerateGeodesic),
        };
        let m = Self { a, b, c, d };
        if m.det() == T::zero() {
            return Err(GeometryError::DegenerateGeodesic);
        }
        Ok(m)
    }
}

/// Isometry of `H² × R`: a Moebius map on the base, optional flip and shift in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Isometry<T> {
    pub moebius: Mobius<T>,
    pub vertical_shift: T,
    pub vertical_flip: bool,
}

impl<T: Scalar> Isometry<T> {
    pub fn new(moebius: Mobius<T>, vertical_shift: T, vertical_flip: bool) -> Result<Self, GeometryError> {
        let det = moebius.det();
        let m = &moebius;
        let scale = T::one().max(m.a.abs().max(m.b.abs()).max(m.c.abs()).max(m.d.abs()).powi(2));
        if !det.is_finite() || (det - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) * scale {
            return Err(GeometryError::BadMobius(det.as_f64()));
        }
        Ok(Self {
            moebius,
            vertical_shift,
            vertical_flip,
        })
    }

    pub fn identity() -> Self {
        Self::horizontal(Mobius::identity())
    }

    pub fn horizontal(moebius: Mobius<T>) -> Self {
        Self {
            moebius,
            vertical_shift: T::zero(),
            vertical_flip: false,
        }
    }

    pub fn vertical(shift: T) -> Self {
        Self {
            moebius: Mobius::identity(),
            vertical_shift: shift,
            vertical_flip: false,
        }
    }

    /// Screw motion: hyperbolic translation by `tau` along `from → to` combined
    /// with a vertical shift `delta`.
    pub fn screw(from: &IdealPoint<T>, to: &IdealPoint<T>, tau: T, delta: T) -> Result<Self, GeometryError> {
        Ok(Self {
            moebius: Mobius::translation(from, to, tau)?,
            vertical_shift: delta,
            vertical_flip: false,
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let sign = if self.vertical_flip { -T::one() } else { T::one() };
        Self {
            moebius: self.moebius.compose(&inner.moebius),
            vertical_shift: sign * inner.vertical_shift + self.vertical_shift,
            vertical_flip: self.vertical_flip ^ inner.vertical_flip,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| self.compose(&acc))
    }

    pub fn apply(&self, p: &AmbientPoint<T>) -> AmbientPoint<T> {
        apply_isometry(self, p)
    }

    pub fn apply_ideal(&self, q: &IdealPoint<T>) -> IdealPoint<T> {
        self.moebius.apply_ideal(q)
    }

    pub fn apply_geodesic(&self, g: &GeodesicH2<T>) -> Result<GeodesicH2<T>, GeometryError> {
        let (a, b) = g.endpoints();
        GeodesicH2::new(self.apply_ideal(&a), self.apply_ideal(&b))
    }
}

pub fn apply_isometry<T: Scalar>(phi: &Isometry<T>, p: &AmbientPoint<T>) -> AmbientPoint<T> {
    let t = if phi.vertical_flip { -p.t } else { p.t };
    AmbientPoint {
        base: phi.moebius.apply(&p.base),
        t: t + phi.vertical_shift,
    }
}

/// Cayley map `z ↦ (z - i)/(z + i)`, sending `(1, 0)` to the disk origin.
pub fn disk_from_halfplane<T: Scalar>(p: &HPoint<T>) -> Complex<T> {
    let z = p.to_complex();
    let i = Complex::new(T::zero(), T::one());
    (z - i) / (z + i)
}

pub fn halfplane_from_disk<T: Scalar>(w: Complex<T>) -> Result<HPoint<T>, GeometryError> {
    let r = w.norm();
    if !(r < T::one()) {
        return Err(GeometryError::OutsideDisk(r.as_f64()));
    }
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let z = i * (one + w) / (one - w);
    HPoint::from_complex(z)
}

/// Poincaré disk distance `2 artanh(|w₁ - w₂| / |1 - w₁ w̄₂|)`.
pub fn dist_disk<T: Scalar>(w1: Complex<T>, w2: Complex<T>) -> T {
    let one = Complex::new(T::one(), T::zero());
    let num = (w1 - w2).norm();
    let den = (one - w1 * w2.conj()).norm();
    T::two() * (num / den).atanh()
}

/// Point at hyperbolic distance `rho` from `center` in the direction whose
/// ray ends at Cayley angle `alpha` when `center` is the origin. Stable for
/// large `rho` (no overflow until `e^{-rho}` underflows).
pub fn polar_point<T: Scalar>(center: &HPoint<T>, rho: T, alpha: T) -> HPoint<T> {
    let e = (-rho).exp();
    let (s, c) = (alpha * T::half()).sin_cos();
    let den = c * c * e * e + s * s;
    let x0 = e / den;
    let y0 = s * c * (e * e - T::one()) / den;
    let base = HPoint { x: x0, y: y0 };
    Mobius::affine_to(center).apply(&base)
}
