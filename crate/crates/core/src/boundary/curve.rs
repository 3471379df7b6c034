//! Piecewise curves on the product boundary: the cylinder `∂H² × R`, plus
//! the two caps at `t = ±∞`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compactify::Sign;
use crate::hyp::{ccw_offset, wrap_angle, HPoint, IdealPoint};
use crate::scalar::Scalar;

/// Serde helper for reals that may be `±∞` (written as `"inf"` / `"-inf"`).
pub mod ext {
    use serde::de::{self, Deserializer};
    use serde::{Deserialize, Serializer};

    use crate::scalar::Scalar;

    pub fn serialize<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > T::zero() { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(v.as_f64())
        }
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum V {
            Num(f64),
            Str(String),
        }
        match V::deserialize(d)? {
            V::Num(x) => Ok(T::lit(x)),
            V::Str(s) if s == "inf" || s == "+inf" => Ok(T::infinity()),
            V::Str(s) if s == "-inf" => Ok(T::neg_infinity()),
            V::Str(s) => Err(de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Ccw,
    Cw,
}

/// Vertex of a polyline: ideal point and height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PolyPoint<T> {
    pub theta: IdealPoint<T>,
    pub t: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum Segment<T> {
    /// `{at} × [from, to]`, traversed from `from` to `to`; either end may be infinite.
    Vertical {
        at: IdealPoint<T>,
        #[serde(with = "ext")]
        from: T,
        #[serde(with = "ext")]
        to: T,
    },
    /// Arc of `∂H² × {t}`; `from == to` is the full circle.
    Horizontal {
        from: IdealPoint<T>,
        to: IdealPoint<T>,
        direction: Direction,
        t: T,
    },
    /// Straight in the (Cayley angle, t) chart; consecutive vertices are
    /// joined along the shorter arc.
    Polyline { points: Vec<PolyPoint<T>> },
    /// Complete geodesic in the cap `H² × {±∞}`, traversed `from → to`.
    CapGeodesic { sign: Sign, from: IdealPoint<T>, to: IdealPoint<T> },
    /// Closed hyperbolic circle in a cap.
    CapCircle { sign: Sign, center: HPoint<T>, radius: T },
}

/// Location on the closed cylinder; `t = ±∞` are corner points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T> {
    pub theta: IdealPoint<T>,
    pub t: T,
}

impl<T: Scalar> CurvePoint<T> {
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        if !self.theta.approx_eq(&other.theta, tol) {
            return false;
        }
        if self.t.is_infinite() || other.t.is_infinite() {
            return self.t == other.t;
        }
        (self.t - other.t).abs() <= tol
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("segment {0} is malformed: {1}")]
    Malformed(usize, &'static str),
    #[error("segment {0} does not start where segment {1} ends")]
    Discontinuous(usize, usize),
    #[error("component starting at segment {0} is not closed")]
    NotClosed(usize),
    #[error("segments {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("curve has no segments")]
    Empty,
}

/// A (possibly disconnected) piecewise curve on the product boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PiecewiseBoundaryCurve<T> {
    pub segments: Vec<Segment<T>>,
}

/// Closed `t`-interval (points have `lo == hi`), bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TInterval<T> {
    #[serde(with = "ext")]
    pub lo: T,
    #[serde(with = "ext")]
    pub hi: T,
}

impl<T: Scalar> TInterval<T> {
    pub fn length(&self) -> T {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

pub(crate) fn angle_tol<T: Scalar>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
}

/// Arc described by a start angle and a counterclockwise span in `[0, 2π]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AngleArc<T> {
    pub start: T,
    pub span: T,
}

impl<T: Scalar> AngleArc<T> {
    pub fn contains(&self, a: T, tol: T) -> bool {
        let off = ccw_offset(self.start, a);
        off <= self.span + tol || off >= T::PI() + T::PI() - tol
    }

    /// Fraction of the span at which the arc reaches `a`.
    pub fn fraction(&self, a: T) -> T {
        if self.span <= T::zero() {
            return T::zero();
        }
        let mut off = ccw_offset(self.start, a);
        if off > self.span {
            // outside by rounding: snap to the nearer end
            off = if off - self.span < T::PI() + T::PI() - off { self.span } else { T::zero() };
        }
        (off / self.span).min(T::one())
    }
}

pub(crate) fn horizontal_arc<T: Scalar>(from: &IdealPoint<T>, to: &IdealPoint<T>, direction: Direction) -> AngleArc<T> {
    let full = from.approx_eq(to, angle_tol());
    let two_pi = T::PI() + T::PI();
    match direction {
        Direction::Ccw => AngleArc {
            start: from.angle(),
            span: if full { two_pi } else { ccw_offset(from.angle(), to.angle()) },
        },
        Direction::Cw => AngleArc {
            start: to.angle(),
            span: if full { two_pi } else { ccw_offset(to.angle(), from.angle()) },
        },
    }
}

impl<T: Scalar> Segment<T> {
    pub fn start(&self) -> Option<CurvePoint<T>> {
        match self {
            Segment::Vertical { at, from, .. } => Some(CurvePoint { theta: *at, t: *from }),
            Segment::Horizontal { from, t, .. } => Some(CurvePoint { theta: *from, t: *t }),
            Segment::Polyline { points } => points.first().map(|p| CurvePoint { theta: p.theta, t: p.t }),
            Segment::CapGeodesic { sign, from, .. } => Some(CurvePoint {
                theta: *from,
                t: sign.value::<T>() * T::infinity(),
            }),
            Segment::CapCircle { .. } => None,
        }
    }

    pub fn end(&self) -> Option<CurvePoint<T>> {
        match self {
            Segment::Vertical { at, to, .. } => Some(CurvePoint { theta: *at, t: *to }),
            Segment::Horizontal { to, t, .. } => Some(CurvePoint { theta: *to, t: *t }),
            Segment::Polyline { points } => points.last().map(|p| CurvePoint { theta: p.theta, t: p.t }),
            Segment::CapGeodesic { sign, to, .. } => Some(CurvePoint {
                theta: *to,
                t: sign.value::<T>() * T::infinity(),
            }),
            Segment::CapCircle { .. } => None,
        }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Segment::CapGeodesic { .. } | Segment::CapCircle { .. })
    }

    /// Whether the segment closes on itself (full circle or cap circle).
    pub fn is_loop(&self) -> bool {
        match self {
            Segment::CapCircle { .. } => true,
            Segment::Horizontal { from, to, .. } => from.approx_eq(to, angle_tol()),
            _ => false,
        }
    }

    fn validate(&self, idx: usize) -> Result<(), CurveError> {
        match self {
            Segment::Vertical { from, to, .. } => {
                if from.is_nan() || to.is_nan() || from == to {
                    return Err(CurveError::Malformed(idx, "vertical segment needs two distinct heights"));
                }
            }
            Segment::Horizontal { t, .. } => {
                if !t.is_finite() {
                    return Err(CurveError::Malformed(idx, "horizontal arc needs a finite height"));
                }
            }
            Segment::Polyline { points } => {
                if points.len() < 2 || points.iter().any(|p| !p.t.is_finite()) {
                    return Err(CurveError::Malformed(idx, "polyline needs at least two finite vertices"));
                }
            }
            Segment::CapGeodesic { from, to, .. } => {
                if from.approx_eq(to, angle_tol()) {
                    return Err(CurveError::Malformed(idx, "cap geodesic endpoints coincide"));
                }
            }
            Segment::CapCircle { radius, .. } => {
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return Err(CurveError::Malformed(idx, "cap circle needs a positive finite radius"));
                }
            }
        }
        Ok(())
    }

    /// Closed subset of the vertical line at angle `a` met by this segment.
    pub fn meet_vertical_line(&self, a: T, out: &mut Vec<TInterval<T>>) {
        let tol = angle_tol::<T>();
        match self {
            Segment::Vertical { at, from, to } => {
                if angle_close(at.angle(), a, tol) {
                    out.push(TInterval {
                        lo: from.min(*to),
                        hi: from.max(*to),
                    });
                }
            }
            Segment::Horizontal { from, to, direction, t } => {
                if horizontal_arc(from, to, *direction).contains(a, tol) {
                    out.push(TInterval { lo: *t, hi: *t });
                }
            }
            Segment::Polyline { points } => {
                for w in points.windows(2) {
                    meet_poly_piece(&w[0], &w[1], a, tol, out);
                }
            }
            Segment::CapGeodesic { .. } | Segment::CapCircle { .. } => {}
        }
    }

    /// Angles at which the segment's combinatorics can change.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Segment::Vertical { at, .. } => vec![at.angle()],
            Segment::Horizontal { from, to, .. } => vec![from.angle(), to.angle()],
            Segment::Polyline { points } => points.iter().map(|p| p.theta.angle()).collect(),
            Segment::CapGeodesic { from, to, .. } => vec![from.angle(), to.angle()],
            Segment::CapCircle { .. } => vec![],
        }
    }
}

fn angle_close<T: Scalar>(a: T, b: T, tol: T) -> bool {
    wrap_angle(a - b).abs() <= tol
}

pub(crate) fn poly_piece_arc<T: Scalar>(p: &PolyPoint<T>, q: &PolyPoint<T>) -> (T, T) {
    let a0 = p.theta.angle();
    (a0, wrap_angle(q.theta.angle() - a0))
}

fn meet_poly_piece<T: Scalar>(p: &PolyPoint<T>, q: &PolyPoint<T>, a: T, tol: T, out: &mut Vec<TInterval<T>>) {
    let (a0, delta) = poly_piece_arc(p, q);
    if delta.abs() <= tol {
        if angle_close(a0, a, tol) {
            out.push(TInterval {
                lo: p.t.min(q.t),
                hi: p.t.max(q.t),
            });
        }
        return;
    }
    let arc = if delta > T::zero() {
        AngleArc { start: a0, span: delta }
    } else {
        AngleArc {
            start: a0 + delta,
            span: -delta,
        }
    };
    if !arc.contains(a, tol) {
        return;
    }
    let mut s = arc.fraction(a);
    if delta < T::zero() {
        s = T::one() - s;
    }
    let t = p.t + s * (q.t - p.t);
    out.push(TInterval { lo: t, hi: t });
}

impl<T: Scalar> PiecewiseBoundaryCurve<T> {
    pub fn new(segments: Vec<Segment<T>>) -> Self {
        Self { segments }
    }

    /// Split into components: maximal runs of consecutive segments that
    /// close up. Open trailing runs are reported as an error by `validate`.
    pub fn components(&self) -> Vec<std::ops::Range<usize>> {
        let tol = self.point_tol();
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.segments.len() {
            if self.segments[i].is_loop() {
                out.push(i..i + 1);
                i += 1;
                continue;
            }
            let start = self.segments[i].start();
            let mut j = i;
            loop {
                let end = self.segments[j].end();
                let closes = matches!((start, end), (Some(s), Some(e)) if s.approx_eq(&e, tol));
                j += 1;
                if closes || j >= self.segments.len() {
                    break;
                }
            }
            out.push(i..j);
            i = j;
        }
        out
    }

    fn point_tol(&self) -> T {
        T::lit(1e-9)
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        if self.segments.is_empty() {
            return Err(CurveError::Empty);
        }
        for (k, s) in self.segments.iter().enumerate() {
            s.validate(k)?;
        }
        let tol = self.point_tol();
        for r in self.components() {
            for k in r.start..r.end - 1 {
                let e = self.segments[k].end();
                let s = self.segments[k + 1].start();
                match (e, s) {
                    (Some(e), Some(s)) if e.approx_eq(&s, tol) => {}
                    _ => return Err(CurveError::Discontinuous(k + 1, k)),
                }
            }
            let first = &self.segments[r.start];
            let last = &self.segments[r.end - 1];
            if !(first.is_loop() && r.len() == 1) {
                match (first.start(), last.end()) {
                    (Some(s), Some(e)) if s.approx_eq(&e, tol) => {}
                    _ => return Err(CurveError::NotClosed(r.start)),
                }
            }
        }
        self.check_embedded()
    }

    pub fn is_closed(&self) -> bool {
        self.validate().is_ok()
    }

    /// Whether the curve stays in the cylinder (no cap pieces, finite heights).
    pub fn in_cylinder(&self) -> bool {
        self.segments.iter().all(|s| match s {
            Segment::Vertical { from, to, .. } => from.is_finite() && to.is_finite(),
            Segment::CapGeodesic { .. } | Segment::CapCircle { .. } => false,
            _ => true,
        })
    }

    /// Connected components of `({θ} × R) ∖ σ`, ordered by height.
    pub fn vertical_line_components(&self, theta: &IdealPoint<T>) -> Vec<TInterval<T>> {
        self.components_at_angle(theta.angle())
    }

    pub fn components_at_angle(&self, a: T) -> Vec<TInterval<T>> {
        let mut hits = Vec::new();
        for s in &self.segments {
            s.meet_vertical_line(a, &mut hits);
        }
        complement_components(hits, T::lit(1e-12))
    }

    /// All θ-breakpoints, in curve order, without near-duplicates.
    pub fn breakpoints(&self) -> Vec<T> {
        let tol = angle_tol::<T>();
        let mut out: Vec<T> = Vec::new();
        for s in &self.segments {
            for a in s.breakpoints() {
                if !out.iter().any(|b| angle_close(*b, a, tol)) {
                    out.push(a);
                }
            }
        }
        out
    }

    /// Sample the cylinder part as short straight pieces in the unwrapped
    /// `(angle, t)` chart, tagged with their segment index. Infinite heights
    /// are clipped at `clip`.
    pub(crate) fn chart_pieces(&self, per_segment: usize, clip: T) -> Vec<(usize, [T; 4])> {
        let mut out = Vec::new();
        let c = |t: T| t.max(-clip).min(clip);
        for (k, s) in self.segments.iter().enumerate() {
            match s {
                Segment::Vertical { at, from, to } => {
                    let a = at.angle();
                    out.push((k, [a, c(*from), a, c(*to)]));
                }
                Segment::Horizontal { from, to, direction, t } => {
                    let arc = horizontal_arc(from, to, *direction);
                    let n = per_segment.max(1);
                    let (a0, span) = match direction {
                        Direction::Ccw => (arc.start, arc.span),
                        Direction::Cw => (arc.start + arc.span, -arc.span),
                    };
                    for i in 0..n {
                        let s0 = T::from_usize_lossy(i) / T::from_usize_lossy(n);
                        let s1 = T::from_usize_lossy(i + 1) / T::from_usize_lossy(n);
                        out.push((k, [a0 + span * s0, *t, a0 + span * s1, *t]));
                    }
                }
                Segment::Polyline { points } => {
                    for w in points.windows(2) {
                        let (a0, d) = poly_piece_arc(&w[0], &w[1]);
                        out.push((k, [a0, w[0].t, a0 + d, w[1].t]));
                    }
                }
                Segment::CapGeodesic { .. } | Segment::CapCircle { .. } => {}
            }
        }
        out
    }

    fn check_embedded(&self) -> Result<(), CurveError> {
        let finite_max = self
            .segments
            .iter()
            .flat_map(|s| match s {
                Segment::Vertical { from, to, .. } => vec![*from, *to],
                Segment::Horizontal { t, .. } => vec![*t],
                Segment::Polyline { points } => points.iter().map(|p| p.t).collect(),
                _ => vec![],
            })
            .filter(|t| t.is_finite())
            .fold(T::zero(), |m, t| m.max(t.abs()));
        let pieces = self.chart_pieces(16, finite_max + T::lit(10.0));
        // unwrap each piece into [0, 2π) copies so crossings across the seam are caught
        let two_pi = T::PI() + T::PI();
        let mut flat: Vec<(usize, [T; 4])> = Vec::new();
        for (k, p) in pieces {
            let base = p[0] - (p[0] / two_pi).floor() * two_pi;
            let shift = base - p[0];
            for m in [-T::one(), T::zero(), T::one()] {
                let sh = shift + m * two_pi;
                flat.push((k, [p[0] + sh, p[1], p[2] + sh, p[3]]));
            }
        }
        let tol = T::lit(1e-9);
        for i in 0..flat.len() {
            for j in i + 1..flat.len() {
                let (ki, a) = flat[i];
                let (kj, b) = flat[j];
                if ki == kj {
                    continue;
                }
                if segments_cross(&a, &b, tol) && !touch_at_shared_end(self, ki, kj, &a, &b, tol) {
                    return Err(CurveError::SelfIntersecting(ki.min(kj), ki.max(kj)));
                }
            }
        }
        Ok(())
    }
}

/// Components of `R ∖ ∪ hits`.
pub(crate) fn complement_components<T: Scalar>(mut hits: Vec<TInterval<T>>, tol: T) -> Vec<TInterval<T>> {
    hits.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
    let mut merged: Vec<TInterval<T>> = Vec::new();
    for h in hits {
        match merged.last_mut() {
            Some(m) if h.lo <= m.hi + tol => m.hi = m.hi.max(h.hi),
            _ => merged.push(h),
        }
    }
    let mut out = Vec::new();
    let mut lo = T::neg_infinity();
    for m in &merged {
        if m.lo > lo {
            out.push(TInterval { lo, hi: m.lo });
        }
        lo = m.hi;
    }
    if lo < T::infinity() {
        out.push(TInterval { lo, hi: T::infinity() });
    }
    out
}

fn segments_cross<T: Scalar>(a: &[T; 4], b: &[T; 4], tol: T) -> bool {
    let (ax0, ax1) = (a[0].min(a[2]), a[0].max(a[2]));
    let (bx0, bx1) = (b[0].min(b[2]), b[0].max(b[2]));
    let (ay0, ay1) = (a[1].min(a[3]), a[1].max(a[3]));
    let (by0, by1) = (b[1].min(b[3]), b[1].max(b[3]));
    if ax1 < bx0 - tol || bx1 < ax0 - tol || ay1 < by0 - tol || by1 < ay0 - tol {
        return false;
    }
    let orient = |p: (T, T), q: (T, T), r: (T, T)| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let (p1, p2, p3, p4) = ((a[0], a[1]), (a[2], a[3]), (b[0], b[1]), (b[2], b[3]));
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    let z = |v: T| v.abs() <= tol;
    if ((d1 > T::zero() && d2 < T::zero()) || (d1 < T::zero() && d2 > T::zero()))
        && ((d3 > T::zero() && d4 < T::zero()) || (d3 < T::zero() && d4 > T::zero()))
    {
        return true;
    }
    // collinear or touching configurations
    z(d1) || z(d2) || z(d3) || z(d4)
}

fn touch_at_shared_end<T: Scalar>(c: &PiecewiseBoundaryCurve<T>, ki: usize, kj: usize, a: &[T; 4], b: &[T; 4], tol: T) -> bool {
    // adjacent segments (including wrap within a component) may share an endpoint
    let comps = c.components();
    let adjacent = comps.iter().any(|r| {
        let n = r.len();
        if !r.contains(&ki) || !r.contains(&kj) {
            return false;
        }
        let (i, j) = (ki - r.start, kj - r.start);
        (i + 1) % n == j || (j + 1) % n == i
    });
    if !adjacent {
        return false;
    }
    let ends_a = [(a[0], a[1]), (a[2], a[3])];
    let ends_b = [(b[0], b[1]), (b[2], b[3])];
    let shared = ends_a
        .iter()
        .any(|p| ends_b.iter().any(|q| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol));
    if !shared {
        return false;
    }
    // sharing an endpoint is fine unless the pieces overlap along a stretch
    let da = (a[2] - a[0], a[3] - a[1]);
    let db = (b[2] - b[0], b[3] - b[1]);
    let cross = da.0 * db.1 - da.1 * db.0;
    let na = da.0.hypot(da.1);
    let nb = db.0.hypot(db.1);
    if cross.abs() > tol * na * nb {
        return true;
    }
    // parallel pieces overlap only when one doubles back over the other
    da.0 * db.0 + da.1 * db.1 > T::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(y: f64) -> IdealPoint<f64> {
        IdealPoint::Finite(y)
    }

    fn circle(t: f64) -> Segment<f64> {
        Segment::Horizontal {
            from: fin(0.0),
            to: fin(0.0),
            direction: Direction::Ccw,
            t,
        }
    }

    #[test]
    fn two_circles_components() {
        let c = PiecewiseBoundaryCurve::new(vec![circle(0.0), circle(4.0)]);
        assert!(c.validate().is_ok());
        let comps = c.vertical_line_components(&fin(3.0));
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[1].length(), 4.0);
        assert!(!comps[0].is_bounded() && !comps[2].is_bounded());
    }

    #[test]
    fn empty_line_is_one_component() {
        let c = PiecewiseBoundaryCurve::new(vec![
            Segment::Vertical {
                at: fin(0.0),
                from: 0.0,
                to: 1.0,
            },
            Segment::Horizontal {
                from: fin(0.0),
                to: fin(1.0),
                direction: Direction::Ccw,
                t: 1.0,
            },
            Segment::Vertical {
                at: fin(1.0),
                from: 1.0,
                to: 0.0,
            },
            Segment::Horizontal {
                from: fin(1.0),
                to: fin(0.0),
                direction: Direction::Cw,
                t: 0.0,
            },
        ]);
        c.validate().unwrap();
        let comps = c.vertical_line_components(&fin(5.0));
        assert_eq!(comps.len(), 1);
        assert!(comps[0].lo.is_infinite() && comps[0].hi.is_infinite());
        assert_eq!(c.vertical_line_components(&fin(0.5)).len(), 3);
    }

    #[test]
    fn detects_open_and_crossing_curves() {
        let open = PiecewiseBoundaryCurve::new(vec![Segment::Vertical {
            at: fin(0.0),
            from: 0.0,
            to: 1.0,
        }]);
        assert!(matches!(open.validate(), Err(CurveError::NotClosed(0))));
        // two circles at the same height overlap
        let c = PiecewiseBoundaryCurve::new(vec![circle(1.0), circle(1.0)]);
        assert!(matches!(c.validate(), Err(CurveError::SelfIntersecting(0, 1))));
    }

    #[test]
    fn polyline_meets_line_once() {
        let c = PiecewiseBoundaryCurve::new(vec![Segment::Polyline {
            points: vec![
                PolyPoint {
                    theta: IdealPoint::from_angle(1.0),
                    t: 0.0,
                },
                PolyPoint {
                    theta: IdealPoint::from_angle(2.0),
                    t: 2.0,
                },
            ],
        }]);
        let comps = c.components_at_angle(1.5f64);
        assert_eq!(comps.len(), 2);
        assert!((comps[0].hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let c = PiecewiseBoundaryCurve::new(vec![
            Segment::Vertical {
                at: IdealPoint::Infinity,
                from: 1.0,
                to: f64::INFINITY,
            },
            Segment::CapGeodesic {
                sign: Sign::Plus,
                from: IdealPoint::Infinity,
                to: fin(0.0),
            },
        ]);
        let js = serde_json::to_string(&c).unwrap();
        assert!(js.contains(r#""to":"inf""#), "{js}");
        let back: PiecewiseBoundaryCurve<f64> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, c);
    }
}
