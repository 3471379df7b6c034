//! Decision procedures on product-boundary curves: vertical-line criterion,
//! tallness, thin tails and cap traces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::curve::{angle_tol, CurveError, Direction, PiecewiseBoundaryCurve, Segment, TInterval};
use crate::compactify::Sign;
use crate::hyp::{ccw_offset, wrap_angle, GeodesicH2, IdealPoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillabilityStatus {
    FillableByCriterion,
    TallMinimizing,
    ThinTailObstruction,
    CapNotGeodesic,
    ShortNotTall,
    Unknown,
}

/// A subarc touching `{theta} × [t_lo, t_hi]` from one side and turning back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ThinTail<T> {
    pub theta: IdealPoint<T>,
    pub t_lo: T,
    pub t_hi: T,
    /// Side of the vertical line on which the tail lies, as seen from the line.
    pub side: Direction,
    /// Segment indices entering and leaving the contact.
    pub segments: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum Witness<T> {
    ShortComponent { theta: IdealPoint<T>, interval: TInterval<T>, length: T },
    ThinTail { tail: ThinTail<T> },
    CapTrace { sign: Sign, reason: String },
    Height { h: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FillabilityVerdict<T> {
    pub status: FillabilityStatus,
    pub witnesses: Vec<Witness<T>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct FillabilityOptions {
    /// Dense grid of vertical lines checked in addition to all breakpoints.
    pub theta_samples: usize,
}

impl Default for FillabilityOptions {
    fn default() -> Self {
        Self { theta_samples: 720 }
    }
}

/// Angles to test: breakpoints in curve order, midpoints between sorted
/// breakpoints, then a uniform grid.
fn sample_angles<T: Scalar>(c: &PiecewiseBoundaryCurve<T>, dense: usize) -> Vec<T> {
    let bps = c.breakpoints();
    let mut out = bps.clone();
    let mut sorted: Vec<T> = bps.iter().map(|a| ccw_offset(T::zero(), *a)).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let two_pi = T::PI() + T::PI();
    for (i, a) in sorted.iter().enumerate() {
        let b = if i + 1 < sorted.len() { sorted[i + 1] } else { sorted[0] + two_pi };
        out.push(wrap_angle((*a + b) * T::half()));
    }
    for k in 0..dense {
        out.push(wrap_angle(two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(dense)));
    }
    out
}

/// Shortest bounded complementary component over the sampled lines, with its line.
fn shortest_component<T: Scalar>(c: &PiecewiseBoundaryCurve<T>, dense: usize) -> Option<(T, TInterval<T>)> {
    let mut best: Option<(T, TInterval<T>)> = None;
    for a in sample_angles(c, dense) {
        for comp in c.components_at_angle(a) {
            if comp.is_bounded() && best.map_or(true, |(_, b)| comp.length() < b.length()) {
                best = Some((a, comp));
            }
        }
    }
    best
}

/// First sampled line (in curve order) with a bounded component of length ≤ π.
fn first_short_line<T: Scalar>(c: &PiecewiseBoundaryCurve<T>, dense: usize) -> Option<(T, TInterval<T>)> {
    for a in sample_angles(c, dense) {
        if let Some(comp) = c
            .components_at_angle(a)
            .into_iter()
            .filter(|k| k.is_bounded() && k.length() <= T::PI())
            .min_by(|x, y| x.length().partial_cmp(&y.length()).unwrap())
        {
            return Some((a, comp));
        }
    }
    None
}

/// Problems with the cap traces `σ±`.
fn cap_problems<T: Scalar>(c: &PiecewiseBoundaryCurve<T>) -> (Vec<Witness<T>>, [usize; 2]) {
    let mut witnesses = Vec::new();
    let mut counts = [0usize; 2];
    for sign in [Sign::Plus, Sign::Minus] {
        let mut geos = Vec::new();
        for s in &c.segments {
            match s {
                Segment::CapCircle { sign: sg, radius, .. } if *sg == sign => witnesses.push(Witness::CapTrace {
                    sign,
                    reason: format!("cap trace contains a circle of radius {radius}, not a geodesic"),
                }),
                Segment::CapGeodesic { sign: sg, from, to } if *sg == sign => {
                    if let Ok(g) = GeodesicH2::new(*from, *to) {
                        geos.push(g);
                    }
                }
                _ => {}
            }
        }
        for i in 0..geos.len() {
            for j in i + 1..geos.len() {
                if geos[i].crosses(&geos[j]) {
                    witnesses.push(Witness::CapTrace {
                        sign,
                        reason: "cap geodesics cross".into(),
                    });
                }
            }
        }
        counts[if sign == Sign::Plus { 0 } else { 1 }] = geos.len();
    }
    (witnesses, counts)
}

fn is_two_circles<T: Scalar>(c: &PiecewiseBoundaryCurve<T>) -> bool {
    c.segments.len() == 2 && c.segments.iter().all(|s| matches!(s, Segment::Horizontal { .. }) && s.is_loop())
}

pub fn check_proposition_fillability<T: Scalar>(
    c: &PiecewiseBoundaryCurve<T>,
    opts: &FillabilityOptions,
) -> Result<FillabilityVerdict<T>, CurveError> {
    c.validate()?;
    let (cap_w, counts) = cap_problems(c);
    if !cap_w.is_empty() {
        return Ok(FillabilityVerdict {
            status: FillabilityStatus::CapNotGeodesic,
            witnesses: cap_w,
            notes: vec!["cap traces of a minimally fillable curve are unions of disjoint geodesics".into()],
        });
    }
    if let Some(tail) = detect_thin_tail(c) {
        return Ok(FillabilityVerdict {
            status: FillabilityStatus::ThinTailObstruction,
            witnesses: vec![Witness::ThinTail { tail }],
            notes: vec![],
        });
    }
    let short = first_short_line(c, opts.theta_samples);
    let caps_ok = counts.iter().all(|n| *n <= 1);
    let mut notes = Vec::new();
    match short {
        None if caps_ok => {
            if c.in_cylinder() {
                notes.push("curve is tall: an area-minimizing filling exists as well".into());
            }
            Ok(FillabilityVerdict {
                status: FillabilityStatus::FillableByCriterion,
                witnesses: vec![],
                notes,
            })
        }
        None => Ok(FillabilityVerdict {
            status: FillabilityStatus::Unknown,
            witnesses: vec![],
            notes: vec!["a cap trace has several disjoint geodesics; the criterion needs at most one".into()],
        }),
        Some((a, comp)) => {
            let w = Witness::ShortComponent {
                theta: IdealPoint::from_angle(a),
                interval: comp,
                length: comp.length(),
            };
            if c.in_cylinder() {
                if is_two_circles(c) {
                    notes.push("minimal ≠ minimizing: a minimal catenoid fills two circles closer than π".into());
                }
                Ok(FillabilityVerdict {
                    status: FillabilityStatus::ShortNotTall,
                    witnesses: vec![w],
                    notes,
                })
            } else {
                Ok(FillabilityVerdict {
                    status: FillabilityStatus::Unknown,
                    witnesses: vec![w],
                    notes,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tallness {
    Tall,
    Short,
    BoundaryCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TallReport<T> {
    pub status: Tallness,
    /// Infimum of bounded complementary component lengths (`∞` if none).
    #[serde(with = "super::curve::ext")]
    pub h: T,
    pub notes: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TallError {
    #[error("curve reaches the caps; tallness is defined for curves in the cylinder")]
    CurveTouchesCaps,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

pub fn check_tall<T: Scalar>(c: &PiecewiseBoundaryCurve<T>, theta_samples: usize) -> Result<TallReport<T>, TallError> {
    if !c.in_cylinder() {
        return Err(TallError::CurveTouchesCaps);
    }
    c.validate()?;
    let h = shortest_component(c, theta_samples).map_or(T::infinity(), |(_, k)| k.length());
    let status = if (h - T::PI()).abs() <= T::lit(1e-9) {
        Tallness::BoundaryCase
    } else if h > T::PI() {
        Tallness::Tall
    } else {
        Tallness::Short
    };
    let mut notes = Vec::new();
    if status == Tallness::BoundaryCase {
        notes.push("h(σ) = π: the minimizing criterion does not apply".into());
    }
    if status == Tallness::Short && is_two_circles(c) {
        notes.push("minimal ≠ minimizing: no minimizing filling, but a minimal catenoid exists".into());
    }
    Ok(TallReport { status, h, notes })
}

#[derive(Debug, Clone, Copy)]
enum Move<T> {
    /// θ moves with the given sign; `a0`/`a1` are the start and end angles.
    Turn { sign: i8, a1: T, t0: T, t1: T, seg: usize },
    Still { t0: T, t1: T },
    Break,
}

fn moves_of<T: Scalar>(c: &PiecewiseBoundaryCurve<T>, range: std::ops::Range<usize>) -> Vec<Move<T>> {
    let tol = angle_tol::<T>();
    let mut out = Vec::new();
    for k in range {
        match &c.segments[k] {
            Segment::Vertical { from, to, .. } => out.push(Move::Still {
                t0: *from,
                t1: *to,
            }),
            Segment::Horizontal { to, direction, t, .. } => out.push(Move::Turn {
                sign: if *direction == Direction::Ccw { 1 } else { -1 },
                a1: to.angle(),
                t0: *t,
                t1: *t,
                seg: k,
            }),
            Segment::Polyline { points } => {
                for w in points.windows(2) {
                    let d = wrap_angle(w[1].theta.angle() - w[0].theta.angle());
                    if d.abs() <= tol {
                        out.push(Move::Still {
                            t0: w[0].t,
                            t1: w[1].t,
                        });
                    } else {
                        out.push(Move::Turn {
                            sign: if d > T::zero() { 1 } else { -1 },
                            a1: w[1].theta.angle(),
                            t0: w[0].t,
                            t1: w[1].t,
                            seg: k,
                        });
                    }
                }
            }
            Segment::CapGeodesic { .. } | Segment::CapCircle { .. } => out.push(Move::Break),
        }
    }
    out
}

/// Find a thin tail: a reversal of the θ-direction along the curve whose
/// contact with the vertical line has height < π.
pub fn detect_thin_tail<T: Scalar>(c: &PiecewiseBoundaryCurve<T>) -> Option<ThinTail<T>> {
    for range in c.components() {
        if range.len() == 1 && c.segments[range.start].is_loop() {
            continue;
        }
        let moves = moves_of(c, range);
        let n = moves.len();
        let turns: Vec<usize> = (0..n).filter(|i| matches!(moves[*i], Move::Turn { .. })).collect();
        if turns.len() < 2 {
            continue;
        }
        for (idx, &i) in turns.iter().enumerate() {
            let j = turns[(idx + 1) % turns.len()];
            let Move::Turn { sign: si, a1, t1: ti, seg: seg_i, .. } = moves[i] else { unreachable!() };
            let Move::Turn { sign: sj, t0: tj, seg: seg_j, .. } = moves[j] else { unreachable!() };
            if si == sj {
                continue;
            }
            let (mut lo, mut hi) = (ti.min(tj), ti.max(tj));
            let mut broken = false;
            let mut k = (i + 1) % n;
            while k != j {
                match moves[k] {
                    Move::Still { t0, t1, .. } => {
                        lo = lo.min(t0.min(t1));
                        hi = hi.max(t0.max(t1));
                    }
                    Move::Break => broken = true,
                    Move::Turn { .. } => unreachable!(),
                }
                k = (k + 1) % n;
            }
            if broken || !(hi - lo < T::PI()) {
                continue;
            }
            return Some(ThinTail {
                theta: IdealPoint::from_angle(a1),
                t_lo: lo,
                t_hi: hi,
                side: if si > 0 { Direction::Cw } else { Direction::Ccw },
                segments: (seg_i, seg_j),
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::curve::PolyPoint;
    use super::*;

    fn at(a: f64) -> IdealPoint<f64> {
        IdealPoint::from_angle(a)
    }

    fn circle(t: f64) -> Segment<f64> {
        Segment::Horizontal {
            from: IdealPoint::Infinity,
            to: IdealPoint::Infinity,
            direction: Direction::Ccw,
            t,
        }
    }

    pub(crate) fn rectangle(a0: f64, a1: f64, lo: f64, hi: f64) -> PiecewiseBoundaryCurve<f64> {
        PiecewiseBoundaryCurve::new(vec![
            Segment::Horizontal {
                from: at(a0),
                to: at(a1),
                direction: Direction::Ccw,
                t: lo,
            },
            Segment::Vertical {
                at: at(a1),
                from: lo,
                to: hi,
            },
            Segment::Horizontal {
                from: at(a1),
                to: at(a0),
                direction: Direction::Cw,
                t: hi,
            },
            Segment::Vertical {
                at: at(a0),
                from: hi,
                to: lo,
            },
        ])
    }

    fn twisted() -> PiecewiseBoundaryCurve<f64> {
        use std::f64::consts::PI;
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

    #[test]
    fn twisted_curve_is_fillable() {
        let c = twisted();
        c.validate().unwrap();
        let v = check_proposition_fillability(&c, &FillabilityOptions::default()).unwrap();
        assert_eq!(v.status, FillabilityStatus::FillableByCriterion, "{v:?}");
        assert!(detect_thin_tail(&c).is_none());
    }

    #[test]
    fn cap_circle_is_rejected() {
        let c = PiecewiseBoundaryCurve::new(vec![
            Segment::CapCircle {
                sign: Sign::Plus,
                center: crate::hyp::HPoint::origin(),
                radius: 1.0,
            },
            circle(0.0),
        ]);
        let v = check_proposition_fillability(&c, &FillabilityOptions::default()).unwrap();
        assert_eq!(v.status, FillabilityStatus::CapNotGeodesic);
        assert!(!v.witnesses.is_empty());
    }

    #[test]
    fn two_circles() {
        let short = PiecewiseBoundaryCurve::new(vec![circle(0.0), circle(2.0)]);
        let r = check_tall(&short, 64).unwrap();
        assert_eq!(r.status, Tallness::Short);
        assert_eq!(r.h, 2.0);
        assert!(r.notes.iter().any(|n| n.contains("minimal ≠ minimizing")));
        let tall = PiecewiseBoundaryCurve::new(vec![circle(0.0), circle(4.0)]);
        assert_eq!(check_tall(&tall, 64).unwrap().status, Tallness::Tall);
        let edge = PiecewiseBoundaryCurve::new(vec![circle(0.0), circle(std::f64::consts::PI)]);
        assert_eq!(check_tall(&edge, 64).unwrap().status, Tallness::BoundaryCase);
        let v = check_proposition_fillability(&short, &FillabilityOptions::default()).unwrap();
        assert_eq!(v.status, FillabilityStatus::ShortNotTall);
    }

    #[test]
    fn rectangle_trace() {
        let c = rectangle(-1.0, 1.0, 0.0, 4.0);
        let r = check_tall(&c, 360).unwrap();
        assert_eq!(r.status, Tallness::Tall);
        assert!((r.h - 4.0).abs() < 1e-12);
        assert!(detect_thin_tail(&c).is_none());
        let v = check_proposition_fillability(&c, &FillabilityOptions::default()).unwrap();
        assert_eq!(v.status, FillabilityStatus::FillableByCriterion);
        assert!(matches!(check_tall(&twisted(), 16), Err(TallError::CurveTouchesCaps)));
    }

    #[test]
    fn bulge_is_a_thin_tail() {
        // lower arc, bulge out to angle 1.5 and back, upper arc, return at angle -1
        let c = PiecewiseBoundaryCurve::new(vec![
            Segment::Horizontal {
                from: at(-1.0),
                to: at(1.0),
                direction: Direction::Ccw,
                t: 0.0,
            },
            Segment::Polyline {
                points: vec![
                    PolyPoint { theta: at(1.0), t: 0.0 },
                    PolyPoint { theta: at(1.5), t: 1.0 },
                    PolyPoint { theta: at(1.0), t: 2.0 },
                ],
            },
            Segment::Horizontal {
                from: at(1.0),
                to: at(-1.0),
                direction: Direction::Cw,
                t: 2.0,
            },
            Segment::Vertical {
                at: at(-1.0),
                from: 2.0,
                to: 0.0,
            },
        ]);
        c.validate().unwrap();
        let tail = detect_thin_tail(&c).expect("thin tail");
        assert!(tail.t_hi - tail.t_lo < std::f64::consts::PI);
        let v = check_proposition_fillability(&c, &FillabilityOptions::default()).unwrap();
        assert_eq!(v.status, FillabilityStatus::ThinTailObstruction);
    }
}
