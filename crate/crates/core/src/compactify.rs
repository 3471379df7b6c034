//! Boundary points of `H² × R` in the product and geodesic compactifications,
//! limits of diverging samples, and the correspondence between the two.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::hyp::{angle_distance, dist_ambient, dist_h2, ray_endpoint, AmbientPoint, HPoint, IdealPoint, Isometry};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl Sign {
    pub fn of<T: Scalar>(v: T) -> Self {
        if v < T::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// Point of the product compactification `H̄² × R̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", bound = "T: Scalar")]
pub enum ProductBoundaryPoint<T> {
    #[serde(rename = "cylinder")]
    VerticalCylinder { theta: IdealPoint<T>, t: T },
    Cap { sign: Sign, p: HPoint<T> },
    Corner { theta: IdealPoint<T>, sign: Sign },
}

/// Point of the geodesic compactification. `slope` is the ratio of vertical
/// to horizontal speed of the asymptotic ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", bound = "T: Scalar")]
pub enum GeodesicBoundaryPoint<T> {
    Equator { theta: IdealPoint<T> },
    Pole { sign: Sign },
    Chamber { theta: IdealPoint<T>, sign: Sign, slope: T },
}

impl<T: Scalar> GeodesicBoundaryPoint<T> {
    /// Normalise a (θ, sign, slope) triple with `slope ∈ [0, ∞]`.
    pub fn from_slope(theta: IdealPoint<T>, sign: Sign, slope: T) -> Self {
        if slope == T::zero() {
            GeodesicBoundaryPoint::Equator { theta }
        } else if slope.is_infinite() {
            GeodesicBoundaryPoint::Pole { sign }
        } else {
            GeodesicBoundaryPoint::Chamber { theta, sign, slope }
        }
    }

    /// Image under an isometry of `H² × R`: `θ` moves by the boundary action,
    /// slopes are preserved and a vertical flip exchanges the signs.
    pub fn transform(&self, phi: &Isometry<T>) -> Self {
        let fs = |s: Sign| if phi.vertical_flip { s.flip() } else { s };
        match *self {
            GeodesicBoundaryPoint::Equator { theta } => GeodesicBoundaryPoint::Equator {
                theta: phi.apply_ideal(&theta),
            },
            GeodesicBoundaryPoint::Pole { sign } => GeodesicBoundaryPoint::Pole { sign: fs(sign) },
            GeodesicBoundaryPoint::Chamber { theta, sign, slope } => GeodesicBoundaryPoint::Chamber {
                theta: phi.apply_ideal(&theta),
                sign: fs(sign),
                slope,
            },
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        use GeodesicBoundaryPoint::*;
        match (self, other) {
            (Equator { theta: a }, Equator { theta: b }) => a.approx_eq(b, tol),
            (Pole { sign: a }, Pole { sign: b }) => a == b,
            (
                Chamber { theta: a, sign: s, slope: r },
                Chamber { theta: b, sign: u, slope: q },
            ) => a.approx_eq(b, tol) && s == u && (*r - *q).abs() <= tol * (T::one() + r.abs()),
            _ => false,
        }
    }
}

/// Closed slope interval `[lo, hi] ⊆ [0, ∞]`, serialised as `[lo, hi]` with `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> SlopeInterval<T> {
    pub fn full() -> Self {
        Self {
            lo: T::zero(),
            hi: T::infinity(),
        }
    }

    pub fn point(v: T) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, v: T, tol: T) -> bool {
        if v.is_infinite() {
            return self.hi.is_infinite();
        }
        v >= self.lo - tol * (T::one() + self.lo) && (self.hi.is_infinite() || v <= self.hi + tol * (T::one() + self.hi))
    }

    pub fn is_full(&self) -> bool {
        self.lo == T::zero() && self.hi.is_infinite()
    }
}

fn ser_slope<T: Scalar, S: serde::ser::SerializeTuple>(tup: &mut S, v: T) -> Result<(), S::Error> {
    if v.is_infinite() {
        tup.serialize_element("inf")
    } else {
        tup.serialize_element(&v.as_f64())
    }
}

impl<T: Scalar> Serialize for SlopeInterval<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut tup = s.serialize_tuple(2)?;
        ser_slope(&mut tup, self.lo)?;
        ser_slope(&mut tup, self.hi)?;
        tup.end()
    }
}

impl<'de, T: Scalar> Deserialize<'de> for SlopeInterval<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum V {
            Num(f64),
            Str(String),
        }
        let conv = |v: V| -> Result<T, D::Error> {
            match v {
                V::Num(x) if x >= 0.0 => Ok(T::lit(x)),
                V::Str(s) if s == "inf" => Ok(T::infinity()),
                _ => Err(de::Error::custom("slope must be a nonnegative number or \"inf\"")),
            }
        };
        let (a, b) = <(V, V)>::deserialize(d)?;
        let (lo, hi) = (conv(a)?, conv(b)?);
        if lo > hi {
            return Err(de::Error::custom("slope interval with lo > hi"));
        }
        Ok(Self { lo, hi })
    }
}

/// Subset of the geodesic boundary: a single point or a closed interval in one
/// Weyl chamber `W±(θ)`, whose endpoints are the equator point (slope 0) and
/// the pole (slope ∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum GeodesicBoundaryRegion<T> {
    Point { point: GeodesicBoundaryPoint<T> },
    ChamberInterval { theta: IdealPoint<T>, sign: Sign, slopes: SlopeInterval<T> },
}

impl<T: Scalar> GeodesicBoundaryRegion<T> {
    pub fn full_chamber(theta: IdealPoint<T>, sign: Sign) -> Self {
        GeodesicBoundaryRegion::ChamberInterval {
            theta,
            sign,
            slopes: SlopeInterval::full(),
        }
    }

    pub fn contains(&self, b: &GeodesicBoundaryPoint<T>, tol: T) -> bool {
        match self {
            GeodesicBoundaryRegion::Point { point } => point.approx_eq(b, tol),
            GeodesicBoundaryRegion::ChamberInterval { theta, sign, slopes } => match *b {
                GeodesicBoundaryPoint::Equator { theta: th } => slopes.lo <= tol && th.approx_eq(theta, tol),
                GeodesicBoundaryPoint::Pole { sign: s } => slopes.hi.is_infinite() && s == *sign,
                GeodesicBoundaryPoint::Chamber { theta: th, sign: s, slope } => {
                    s == *sign && th.approx_eq(theta, tol) && slopes.contains(slope, tol)
                }
            },
        }
    }

    /// A few representative members, used for round-trip checks.
    pub fn sample_members(&self) -> Vec<GeodesicBoundaryPoint<T>> {
        match *self {
            GeodesicBoundaryRegion::Point { point } => vec![point],
            GeodesicBoundaryRegion::ChamberInterval { theta, sign, slopes } => {
                let mut out = vec![GeodesicBoundaryPoint::from_slope(theta, sign, slopes.lo)];
                let mid = if slopes.hi.is_infinite() {
                    slopes.lo + T::one()
                } else {
                    (slopes.lo + slopes.hi) * T::half()
                };
                out.push(GeodesicBoundaryPoint::from_slope(theta, sign, mid));
                out.push(GeodesicBoundaryPoint::from_slope(theta, sign, slopes.hi));
                out
            }
        }
    }
}

/// Closed subset of the product boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum ProductBoundaryRegion<T> {
    Point { point: ProductBoundaryPoint<T> },
    /// The vertical line `{θ} × R̄` of the cylinder, corners included.
    CylinderLine { theta: IdealPoint<T> },
    /// The whole closed cap `H̄² × {±∞}`.
    WholeCap { sign: Sign },
}

impl<T: Scalar> ProductBoundaryRegion<T> {
    pub fn contains(&self, b: &ProductBoundaryPoint<T>, tol: T) -> bool {
        use ProductBoundaryPoint::*;
        match (self, b) {
            (ProductBoundaryRegion::Point { point }, _) => match (point, b) {
                (VerticalCylinder { theta: a, t: s }, VerticalCylinder { theta: c, t: u }) => {
                    a.approx_eq(c, tol) && (*s - *u).abs() <= tol
                }
                (Cap { sign: a, p }, Cap { sign: c, p: q }) => a == c && dist_h2(p, q) <= tol,
                (Corner { theta: a, sign: s }, Corner { theta: c, sign: u }) => a.approx_eq(c, tol) && s == u,
                _ => false,
            },
            (ProductBoundaryRegion::CylinderLine { theta }, VerticalCylinder { theta: th, .. } | Corner { theta: th, .. }) => {
                theta.approx_eq(th, tol)
            }
            (ProductBoundaryRegion::WholeCap { sign }, Cap { sign: s, .. } | Corner { sign: s, .. }) => s == sign,
            _ => false,
        }
    }

    pub fn sample_members(&self) -> Vec<ProductBoundaryPoint<T>> {
        match *self {
            ProductBoundaryRegion::Point { point } => vec![point],
            ProductBoundaryRegion::CylinderLine { theta } => [-T::one(), T::zero(), T::lit(3.5)]
                .into_iter()
                .map(|t| ProductBoundaryPoint::VerticalCylinder { theta, t })
                .collect(),
            ProductBoundaryRegion::WholeCap { sign } => [(T::one(), T::zero()), (T::lit(0.25), T::lit(-2.0))]
                .into_iter()
                .map(|(x, y)| ProductBoundaryPoint::Cap {
                    sign,
                    p: HPoint::new(x, y).expect("valid sample point"),
                })
                .collect(),
        }
    }
}

/// Blow up the corners and blow down the caps.
pub fn product_to_geodesic<T: Scalar>(b: &ProductBoundaryPoint<T>) -> GeodesicBoundaryRegion<T> {
    match *b {
        ProductBoundaryPoint::VerticalCylinder { theta, .. } => GeodesicBoundaryRegion::Point {
            point: GeodesicBoundaryPoint::Equator { theta },
        },
        ProductBoundaryPoint::Cap { sign, .. } => GeodesicBoundaryRegion::Point {
            point: GeodesicBoundaryPoint::Pole { sign },
        },
        ProductBoundaryPoint::Corner { theta, sign } => GeodesicBoundaryRegion::full_chamber(theta, sign),
    }
}

/// Blow up the equator and the poles, blow down the open chambers.
pub fn geodesic_to_product<T: Scalar>(b: &GeodesicBoundaryPoint<T>) -> ProductBoundaryRegion<T> {
    match *b {
        GeodesicBoundaryPoint::Equator { theta } => ProductBoundaryRegion::CylinderLine { theta },
        GeodesicBoundaryPoint::Pole { sign } => ProductBoundaryRegion::WholeCap { sign },
        GeodesicBoundaryPoint::Chamber { theta, sign, .. } => ProductBoundaryRegion::Point {
            point: ProductBoundaryPoint::Corner { theta, sign },
        },
    }
}

/// Sequence of points escaping to infinity, together with a basepoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DivergingSample<T> {
    pub points: Vec<AmbientPoint<T>>,
    pub basepoint: AmbientPoint<T>,
}

impl<T: Scalar> DivergingSample<T> {
    pub fn new(points: Vec<AmbientPoint<T>>, basepoint: AmbientPoint<T>) -> Self {
        Self { points, basepoint }
    }

    pub fn map(&self, phi: &Isometry<T>) -> Self {
        Self {
            points: self.points.iter().map(|p| phi.apply(p)).collect(),
            basepoint: phi.apply(&self.basepoint),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LimitConfig<T> {
    pub escape_radius: T,
    pub tail_len: usize,
    /// Maximal tail fluctuation (radians of speed angle, or absolute `t`).
    pub tol: T,
}

impl<T: Scalar> Default for LimitConfig<T> {
    fn default() -> Self {
        Self {
            escape_radius: T::lit(20.0),
            tail_len: 8,
            tol: T::lit(1e-3),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("only {have} sample points beyond the escape radius, need {need}")]
    SampleTooShort { have: usize, need: usize },
}

/// Result of a limit computation; `NoLimit` carries the tail fluctuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case", bound = "T: Scalar, P: Serialize + serde::de::DeserializeOwned")]
pub enum Limit<P, T> {
    Converged { limit: P },
    NoLimit { fluctuation: T },
}

impl<P, T> Limit<P, T> {
    pub fn limit(&self) -> Option<&P> {
        match self {
            Limit::Converged { limit } => Some(limit),
            Limit::NoLimit { .. } => None,
        }
    }
}

fn tail<'a, T: Scalar>(s: &'a DivergingSample<T>, cfg: &LimitConfig<T>) -> Result<Vec<&'a AmbientPoint<T>>, LimitError> {
    let past: Vec<_> = s
        .points
        .iter()
        .filter(|p| dist_ambient(&s.basepoint, p) > cfg.escape_radius)
        .collect();
    let need = cfg.tail_len.max(2);
    if past.len() < need {
        return Err(LimitError::SampleTooShort { have: past.len(), need });
    }
    Ok(past[past.len() - need..].to_vec())
}

fn spread<T: Scalar>(v: impl Iterator<Item = T>) -> T {
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    hi - lo
}

/// Limit in the geodesic compactification.
///
/// The speed angle `φ = atan2(Δt, Δd_H)` is read from consecutive tail
/// increments, with `d_H` the horizontal distance to the basepoint. Using
/// increments rather than the ratio `(t - t₀)/d_H` makes the reading
/// insensitive to the choice of basepoint up to exponentially small terms.
pub fn geodesic_limit<T: Scalar>(
    s: &DivergingSample<T>,
    cfg: &LimitConfig<T>,
) -> Result<Limit<GeodesicBoundaryPoint<T>, T>, LimitError> {
    let tail = tail(s, cfg)?;
    let q0 = s.basepoint.base;
    let d: Vec<T> = tail.iter().map(|p| dist_h2(&q0, &p.base)).collect();
    let phis: Vec<T> = tail
        .windows(2)
        .zip(d.windows(2))
        .map(|(p, dd)| (p[1].t - p[0].t).atan2(dd[1] - dd[0]))
        .collect();
    let mut fluct = spread(phis.iter().copied());

    let n = tail.len() - 1;
    let phi = (tail[n].t - tail[0].t).atan2(d[n] - d[0]);
    let half_pi = T::FRAC_PI_2();
    let pole_like = (phi.abs() - half_pi).abs() <= cfg.tol;
    if !pole_like {
        // horizontal direction must settle as well
        let angles: Vec<T> = tail
            .iter()
            .filter_map(|p| ray_endpoint(&q0, &p.base).ok().map(|e| e.angle()))
            .collect();
        let a_last = *angles.last().unwrap_or(&T::zero());
        let theta_spread = angles
            .iter()
            .map(|a| angle_distance(*a, a_last))
            .fold(T::zero(), |m, v| m.max(v));
        fluct = fluct.max(theta_spread);
    }
    if fluct > cfg.tol || phi.abs() > half_pi + cfg.tol {
        return Ok(Limit::NoLimit { fluctuation: fluct });
    }
    let tiny = T::lit(1e-9);
    let limit = if phi.abs() >= half_pi - tiny {
        GeodesicBoundaryPoint::Pole { sign: Sign::of(phi) }
    } else {
        let theta = ray_endpoint(&q0, &tail[n].base).unwrap_or(IdealPoint::Infinity);
        if phi.abs() <= tiny {
            GeodesicBoundaryPoint::Equator { theta }
        } else {
            GeodesicBoundaryPoint::Chamber {
                theta,
                sign: Sign::of(phi),
                slope: phi.abs().tan(),
            }
        }
    };
    Ok(Limit::Converged { limit })
}

/// Limit in the product compactification.
pub fn product_limit<T: Scalar>(
    s: &DivergingSample<T>,
    cfg: &LimitConfig<T>,
) -> Result<Limit<ProductBoundaryPoint<T>, T>, LimitError> {
    let tail = tail(s, cfg)?;
    let q0 = s.basepoint.base;
    let n = tail.len() - 1;
    let last = tail[n];

    let base_spread = tail.iter().map(|p| dist_h2(&p.base, &last.base)).fold(T::zero(), |m, v| m.max(v));
    let d: Vec<T> = tail.iter().map(|p| dist_h2(&q0, &p.base)).collect();
    let base_diverges = d.windows(2).all(|w| w[1] > w[0]) && d[n] > cfg.escape_radius * T::half();
    let base_converges = base_spread <= cfg.tol;

    let t_spread = spread(tail.iter().map(|p| p.t));
    let dt: Vec<T> = tail.windows(2).map(|w| w[1].t - w[0].t).collect();
    let t_monotone = dt.iter().all(|v| *v > T::zero()) || dt.iter().all(|v| *v < T::zero());
    let t_diverges = t_monotone && (last.t - s.basepoint.t).abs() > cfg.escape_radius * T::half();
    let t_converges = t_spread <= cfg.tol;

    let theta = || ray_endpoint(&q0, &last.base).unwrap_or(IdealPoint::Infinity);
    let limit = if base_diverges && t_converges {
        ProductBoundaryPoint::VerticalCylinder {
            theta: theta(),
            t: last.t,
        }
    } else if base_converges && t_diverges {
        ProductBoundaryPoint::Cap {
            sign: Sign::of(last.t - s.basepoint.t),
            p: last.base,
        }
    } else if base_diverges && t_diverges {
        ProductBoundaryPoint::Corner {
            theta: theta(),
            sign: Sign::of(last.t - s.basepoint.t),
        }
    } else {
        return Ok(Limit::NoLimit {
            fluctuation: base_spread.max(t_spread),
        });
    };
    Ok(Limit::Converged { limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::Mobius;

    fn ap(x: f64, y: f64, t: f64) -> AmbientPoint<f64> {
        AmbientPoint::new(x, y, t).unwrap()
    }

    fn sample(f: impl Fn(f64) -> AmbientPoint<f64>, n: usize) -> DivergingSample<f64> {
        DivergingSample::new((0..n).map(|k| f(k as f64)).collect(), ap(1.0, 0.0, 0.0))
    }

    fn cfg() -> LimitConfig<f64> {
        LimitConfig::default()
    }

    fn glimit(s: &DivergingSample<f64>) -> GeodesicBoundaryPoint<f64> {
        *geodesic_limit(s, &cfg()).unwrap().limit().expect("limit exists")
    }

    fn plimit(s: &DivergingSample<f64>) -> ProductBoundaryPoint<f64> {
        *product_limit(s, &cfg()).unwrap().limit().expect("limit exists")
    }

    #[test]
    fn geodesic_limit_examples() {
        assert_eq!(
            glimit(&sample(|k| ap(1.0, 0.0, k), 40)),
            GeodesicBoundaryPoint::Pole { sign: Sign::Plus }
        );
        assert_eq!(
            glimit(&sample(|k| ap(k.exp(), 0.0, 0.0), 40)),
            GeodesicBoundaryPoint::Equator {
                theta: IdealPoint::Infinity
            }
        );
        let r0 = 0.7;
        match glimit(&sample(|k| ap(k.exp(), 0.0, r0 * k), 40)) {
            GeodesicBoundaryPoint::Chamber { theta, sign, slope } => {
                assert_eq!(theta, IdealPoint::Infinity);
                assert_eq!(sign, Sign::Plus);
                assert!((slope - r0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_samples_are_rejected() {
        let s = sample(|k| ap(1.0, 0.0, k), 25);
        assert_eq!(
            geodesic_limit(&s, &cfg()),
            Err(LimitError::SampleTooShort { have: 4, need: 8 })
        );
    }

    #[test]
    fn oscillating_sample_has_no_limit() {
        // slope alternates between 0.5 and 1.5
        let s = sample(
            |k| {
                let r = if (k as usize) % 2 == 0 { 0.5 } else { 1.5 };
                ap(k.exp(), 0.0, r * k)
            },
            40,
        );
        match geodesic_limit(&s, &cfg()).unwrap() {
            Limit::NoLimit { fluctuation } => assert!(fluctuation > 0.1),
            l => panic!("{l:?}"),
        }
    }

    #[test]
    fn product_limit_examples() {
        match plimit(&sample(|k| ap(k.exp(), 0.0, 5.0 - 2f64.powf(-k)), 40)) {
            ProductBoundaryPoint::VerticalCylinder { theta, t } => {
                assert_eq!(theta, IdealPoint::Infinity);
                assert!((t - 5.0).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            plimit(&sample(|k| ap(1.0, 0.0, k), 40)),
            ProductBoundaryPoint::Cap {
                sign: Sign::Plus,
                p: HPoint::origin()
            }
        );
        assert_eq!(
            plimit(&sample(|k| ap(k.exp(), 0.0, k), 40)),
            ProductBoundaryPoint::Corner {
                theta: IdealPoint::Infinity,
                sign: Sign::Plus
            }
        );
    }

    #[test]
    fn correspondence_examples() {
        let th = IdealPoint::Finite(0.3);
        assert_eq!(
            product_to_geodesic(&ProductBoundaryPoint::VerticalCylinder { theta: th, t: 7.0 }),
            GeodesicBoundaryRegion::Point {
                point: GeodesicBoundaryPoint::Equator { theta: th }
            }
        );
        assert_eq!(
            product_to_geodesic(&ProductBoundaryPoint::Cap {
                sign: Sign::Plus,
                p: HPoint::new(0.2, 5.0).unwrap()
            }),
            GeodesicBoundaryRegion::Point {
                point: GeodesicBoundaryPoint::Pole { sign: Sign::Plus }
            }
        );
        let w = product_to_geodesic(&ProductBoundaryPoint::Corner {
            theta: th,
            sign: Sign::Minus,
        });
        assert_eq!(w, GeodesicBoundaryRegion::full_chamber(th, Sign::Minus));
        assert!(w.contains(&GeodesicBoundaryPoint::Equator { theta: th }, 1e-12));
        assert!(w.contains(&GeodesicBoundaryPoint::Pole { sign: Sign::Minus }, 1e-12));
        assert!(!w.contains(&GeodesicBoundaryPoint::Pole { sign: Sign::Plus }, 1e-12));

        let ch = GeodesicBoundaryPoint::Chamber {
            theta: th,
            sign: Sign::Plus,
            slope: 2.5,
        };
        assert_eq!(
            geodesic_to_product(&ch),
            ProductBoundaryRegion::Point {
                point: ProductBoundaryPoint::Corner {
                    theta: th,
                    sign: Sign::Plus
                }
            }
        );
        assert_eq!(
            geodesic_to_product::<f64>(&GeodesicBoundaryPoint::Pole { sign: Sign::Plus }),
            ProductBoundaryRegion::WholeCap { sign: Sign::Plus }
        );
        for pb in geodesic_to_product(&ch).sample_members() {
            assert!(product_to_geodesic(&pb).contains(&ch, 1e-12));
        }
    }

    #[test]
    fn limits_are_compatible_with_correspondence() {
        let samples = [
            sample(|k| ap(1.0, 0.0, k), 40),
            sample(|k| ap(k.exp(), 0.0, 0.0), 40),
            sample(|k| ap(k.exp(), 0.0, 0.7 * k), 40),
            sample(|k| ap(k.exp(), 0.0, -k), 40),
            sample(|k| ap(k.exp(), 0.0, 5.0 - 2f64.powf(-k)), 40),
        ];
        for s in &samples {
            let g = glimit(s);
            let p = plimit(s);
            assert!(product_to_geodesic(&p).contains(&g, 1e-9), "{p:?} vs {g:?}");
        }
    }

    #[test]
    fn basepoint_invariance_at_radius_50() {
        let cfg = LimitConfig {
            escape_radius: 50.0,
            ..cfg()
        };
        let pts: Vec<_> = (0..80).map(|k| ap((k as f64).exp(), 0.0, 0.7 * k as f64)).collect();
        let a = DivergingSample::new(pts.clone(), ap(1.0, 0.0, 0.0));
        let b = DivergingSample::new(pts, ap(0.4, 2.0, 3.0));
        let la = *geodesic_limit(&a, &cfg).unwrap().limit().unwrap();
        let lb = *geodesic_limit(&b, &cfg).unwrap().limit().unwrap();
        assert!(la.approx_eq(&lb, 1e-6), "{la:?} vs {lb:?}");
    }

    #[test]
    fn isometries_act_covariantly() {
        let s = sample(|k| ap(k.exp(), 0.0, 0.7 * k), 40);
        let phi = Isometry::new(Mobius::rotation(&HPoint::new(0.5, 1.0).unwrap(), 1.1), 2.0, false).unwrap();
        let l0 = glimit(&s);
        let l1 = glimit(&s.map(&phi));
        assert!(l0.transform(&phi).approx_eq(&l1, 1e-8), "{:?} vs {l1:?}", l0.transform(&phi));
    }

    #[test]
    fn json_schema() {
        let b = GeodesicBoundaryPoint::Chamber {
            theta: IdealPoint::Infinity,
            sign: Sign::Minus,
            slope: 0.5,
        };
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            r#"{"kind":"chamber","theta":"inf","sign":"-","slope":0.5}"#
        );
        let c = ProductBoundaryPoint::VerticalCylinder {
            theta: IdealPoint::Finite(1.0),
            t: 2.0,
        };
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"kind":"cylinder","theta":1.0,"t":2.0}"#);
        let w: GeodesicBoundaryRegion<f64> = GeodesicBoundaryRegion::full_chamber(IdealPoint::Finite(0.0), Sign::Plus);
        let js = serde_json::to_string(&w).unwrap();
        assert!(js.contains(r#""slopes":[0.0,"inf"]"#), "{js}");
        let back: GeodesicBoundaryRegion<f64> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, w);
    }
}
