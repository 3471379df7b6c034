//! Subsets of the geodesic boundary made of equatorial arcs, poles and
//! Weyl-chamber slope intervals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::curve::{angle_tol, horizontal_arc, AngleArc, Direction};
use crate::compactify::{Sign, SlopeInterval};
use crate::hyp::{wrap_angle, IdealPoint};
use crate::scalar::Scalar;

/// Equatorial arc running counterclockwise from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EquatorArc<T> {
    pub from: IdealPoint<T>,
    pub to: IdealPoint<T>,
    #[serde(default)]
    pub full: bool,
}

impl<T: Scalar> EquatorArc<T> {
    pub fn full() -> Self {
        Self {
            from: IdealPoint::Infinity,
            to: IdealPoint::Infinity,
            full: true,
        }
    }

    pub fn ccw(from: IdealPoint<T>, to: IdealPoint<T>) -> Self {
        Self { from, to, full: false }
    }

    fn angles(&self) -> AngleArc<T> {
        if self.full {
            AngleArc {
                start: T::zero(),
                span: T::PI() + T::PI(),
            }
        } else {
            horizontal_arc(&self.from, &self.to, Direction::Ccw)
        }
    }

    pub fn contains(&self, q: &IdealPoint<T>, tol: T) -> bool {
        self.angles().contains(q.angle(), tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ChamberEntry<T> {
    pub theta: IdealPoint<T>,
    pub sign: Sign,
    pub slopes: SlopeInterval<T>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GeodesicBoundarySet<T> {
    pub equator_arcs: Vec<EquatorArc<T>>,
    pub poles: Vec<Sign>,
    pub chambers: Vec<ChamberEntry<T>>,
}

impl<T: Scalar> GeodesicBoundarySet<T> {
    pub fn has_pole(&self, s: Sign) -> bool {
        self.poles.contains(&s)
    }

    /// The equator: boundary of a horizontal slice.
    pub fn slice() -> Self {
        Self {
            equator_arcs: vec![EquatorArc::full()],
            ..Self::default()
        }
    }

    /// Arc `c` from `q1` to `q2` (ccw) with the two full chambers over its
    /// endpoints: boundary of a semi-infinite tall rectangle.
    pub fn semi_infinite_rectangle(q1: IdealPoint<T>, q2: IdealPoint<T>, sign: Sign) -> Self {
        Self {
            equator_arcs: vec![EquatorArc::ccw(q1, q2)],
            poles: vec![sign],
            chambers: vec![full_chamber(q1, sign), full_chamber(q2, sign)],
        }
    }

    /// Upward chambers at `q1, q2`, downward at `q3, q4`, arcs `q2→q3` and
    /// `q4→q1`. Cyclically ordered `q1..q4`.
    pub fn four_chambers(q: [IdealPoint<T>; 4]) -> Self {
        Self {
            equator_arcs: vec![EquatorArc::ccw(q[1], q[2]), EquatorArc::ccw(q[3], q[0])],
            poles: vec![Sign::Plus, Sign::Minus],
            chambers: vec![
                full_chamber(q[0], Sign::Plus),
                full_chamber(q[1], Sign::Plus),
                full_chamber(q[2], Sign::Minus),
                full_chamber(q[3], Sign::Minus),
            ],
        }
    }

    /// Two semi-infinite rectangles of opposite signs over `q1→q2` and `q3→q4`.
    pub fn two_opposite(q: [IdealPoint<T>; 4]) -> Self {
        let mut a = Self::semi_infinite_rectangle(q[0], q[1], Sign::Plus);
        let b = Self::semi_infinite_rectangle(q[2], q[3], Sign::Minus);
        a.equator_arcs.extend(b.equator_arcs);
        a.poles.extend(b.poles);
        a.chambers.extend(b.chambers);
        a
    }
}

fn full_chamber<T: Scalar>(theta: IdealPoint<T>, sign: Sign) -> ChamberEntry<T> {
    ChamberEntry {
        theta,
        sign,
        slopes: SlopeInterval::full(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveType {
    /// (1) the equator.
    Equator,
    /// (2) an arc and the two chambers over its endpoints.
    ArcWithChambers { sign: Sign },
    /// (3) two upward and two downward chambers joined by two (possibly degenerate) arcs.
    FourChambers,
    /// (4) two disjoint type-2 curves of opposite signs.
    TwoOpposite,
    NotFillableCurve { rule: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("malformed curve: {0}")]
    MalformedCurve(String),
}

fn not_fillable(rule: &str) -> Result<CurveType, ClassifyError> {
    Ok(CurveType::NotFillableCurve { rule: rule.into() })
}

fn arcs_overlap<T: Scalar>(a: &AngleArc<T>, b: &AngleArc<T>, tol: T) -> bool {
    let inside = |arc: &AngleArc<T>, x: T| {
        let off = crate::hyp::ccw_offset(arc.start, x);
        off > tol && off < arc.span - tol
    };
    let ends = |arc: &AngleArc<T>| {
        [
            arc.start,
            wrap_angle(arc.start + arc.span),
            wrap_angle(arc.start + arc.span * T::half()),
        ]
    };
    ends(b).iter().any(|x| inside(a, *x)) || ends(a).iter().any(|x| inside(b, *x))
}

#[derive(Clone, Copy, PartialEq)]
enum Node<T> {
    Eq(IdealPoint<T>),
    Pole(Sign),
}

/// Classify a candidate boundary curve into one of the four fillable types.
pub fn classify_geodesic_curve<T: Scalar>(b: &GeodesicBoundarySet<T>) -> Result<CurveType, ClassifyError> {
    let tol = angle_tol::<T>();
    for c in &b.chambers {
        let s = c.slopes;
        if s.lo.is_nan() || s.hi.is_nan() || s.lo < T::zero() || s.lo > s.hi {
            return Err(ClassifyError::MalformedCurve("slope interval must satisfy 0 ≤ lo ≤ hi".into()));
        }
    }
    for a in &b.equator_arcs {
        if !a.full && a.from.approx_eq(&a.to, tol) {
            return Err(ClassifyError::MalformedCurve("equatorial arc with coincident endpoints".into()));
        }
    }
    if b.equator_arcs.is_empty() && b.chambers.is_empty() {
        return Err(ClassifyError::MalformedCurve("empty curve".into()));
    }
    if b.chambers.iter().any(|c| !c.slopes.is_full()) {
        return not_fillable("contains only part of a Weyl chamber");
    }
    let arcs: Vec<AngleArc<T>> = b.equator_arcs.iter().map(|a| a.angles()).collect();
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            if b.equator_arcs[i].full || b.equator_arcs[j].full || arcs_overlap(&arcs[i], &arcs[j], tol) {
                return not_fillable("equatorial arcs overlap");
            }
        }
    }
    if b.equator_arcs.iter().any(|a| a.full) {
        return if b.chambers.is_empty() {
            Ok(CurveType::Equator)
        } else {
            not_fillable("a chamber meets the full equator")
        };
    }
    for c in &b.chambers {
        if !b.has_pole(c.sign) {
            return Err(ClassifyError::MalformedCurve("full chamber without its pole".into()));
        }
    }

    // graph: nodes are equatorial endpoints and poles, edges are arcs and chambers
    let mut nodes: Vec<Node<T>> = vec![Node::Pole(Sign::Plus), Node::Pole(Sign::Minus)];
    let node_of = |q: IdealPoint<T>, nodes: &mut Vec<Node<T>>| -> usize {
        if let Some(k) = nodes.iter().position(|n| matches!(n, Node::Eq(p) if p.approx_eq(&q, tol))) {
            return k;
        }
        nodes.push(Node::Eq(q));
        nodes.len() - 1
    };
    // (u, v, kind) with kind 0 = arc, 1 = + chamber, 2 = - chamber
    let mut edges: Vec<(usize, usize, u8)> = Vec::new();
    for a in &b.equator_arcs {
        let u = node_of(a.from, &mut nodes);
        let v = node_of(a.to, &mut nodes);
        edges.push((u, v, 0));
    }
    for c in &b.chambers {
        let u = node_of(c.theta, &mut nodes);
        let (p, k) = if c.sign == Sign::Plus { (0, 1) } else { (1, 2) };
        edges.push((u, p, k));
    }
    let mut degree = vec![0usize; nodes.len()];
    for (u, v, _) in &edges {
        degree[*u] += 1;
        degree[*v] += 1;
    }
    for (k, d) in degree.iter().enumerate() {
        let is_pole = k < 2;
        if *d == 0 && is_pole {
            continue;
        }
        if *d != 2 {
            return not_fillable(if is_pole {
                "curves meet at a pole"
            } else {
                "not a disjoint union of Jordan curves"
            });
        }
    }

    // connected components
    let mut comp = vec![usize::MAX; nodes.len()];
    let mut ncomp = 0;
    for start in 0..nodes.len() {
        if degree[start] == 0 || comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = ncomp;
        while let Some(u) = stack.pop() {
            for (a, b2, _) in &edges {
                let w = if *a == u {
                    *b2
                } else if *b2 == u {
                    *a
                } else {
                    continue;
                };
                if comp[w] == usize::MAX {
                    comp[w] = ncomp;
                    stack.push(w);
                }
            }
        }
        ncomp += 1;
    }
    let mut counts = vec![[0usize; 3]; ncomp];
    for (u, _, k) in &edges {
        counts[comp[*u]][*k as usize] += 1;
    }
    let type2 = |c: &[usize; 3]| -> Option<Sign> {
        match c {
            [1, 2, 0] => Some(Sign::Plus),
            [1, 0, 2] => Some(Sign::Minus),
            _ => None,
        }
    };
    match ncomp {
        1 => {
            let c = counts[0];
            if c[1] == 0 && c[2] == 0 {
                Ok(CurveType::Equator)
            } else if let Some(sign) = type2(&c) {
                Ok(CurveType::ArcWithChambers { sign })
            } else if c[1] == 2 && c[2] == 2 && c[0] <= 2 {
                Ok(CurveType::FourChambers)
            } else {
                not_fillable("chamber pattern matches none of the four types")
            }
        }
        2 => match (type2(&counts[0]), type2(&counts[1])) {
            (Some(s1), Some(s2)) if s1 != s2 => Ok(CurveType::TwoOpposite),
            _ => not_fillable("two components must be type-2 curves of opposite signs"),
        },
        _ => not_fillable("more than two components"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OscillationViolation<T> {
    pub theta: IdealPoint<T>,
    pub sign: Sign,
    pub slopes: SlopeInterval<T>,
    /// Missing part of the chamber between the equator and the interval.
    pub gap: SlopeInterval<T>,
}

/// Every chamber set must be empty, the pole alone, or `[0, r]` through the
/// equator point.
pub fn oscillation_check<T: Scalar>(b: &GeodesicBoundarySet<T>, tol: T) -> Result<(), OscillationViolation<T>> {
    for c in &b.chambers {
        let s = c.slopes;
        let pole_only = s.lo.is_infinite();
        if pole_only || s.lo <= tol {
            continue;
        }
        return Err(OscillationViolation {
            theta: c.theta,
            sign: c.sign,
            slopes: s,
            gap: SlopeInterval { lo: T::zero(), hi: s.lo },
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> [IdealPoint<f64>; 4] {
        [-2.0, -0.5, 0.5, 2.0].map(|y| IdealPoint::finite(y).unwrap())
    }

    #[test]
    fn generators_hit_distinct_types() {
        let [q1, q2, ..] = q();
        assert_eq!(classify_geodesic_curve(&GeodesicBoundarySet::<f64>::slice()), Ok(CurveType::Equator));
        assert_eq!(
            classify_geodesic_curve(&GeodesicBoundarySet::semi_infinite_rectangle(q1, q2, Sign::Minus)),
            Ok(CurveType::ArcWithChambers { sign: Sign::Minus })
        );
        assert_eq!(classify_geodesic_curve(&GeodesicBoundarySet::four_chambers(q())), Ok(CurveType::FourChambers));
        assert_eq!(classify_geodesic_curve(&GeodesicBoundarySet::two_opposite(q())), Ok(CurveType::TwoOpposite));
    }

    #[test]
    fn partial_chamber_is_rejected() {
        let [q1, q2, ..] = q();
        let mut b = GeodesicBoundarySet::semi_infinite_rectangle(q1, q2, Sign::Plus);
        b.chambers[0].slopes = SlopeInterval { lo: 0.0, hi: 2.0 };
        assert!(matches!(classify_geodesic_curve(&b), Ok(CurveType::NotFillableCurve { .. })));
    }

    #[test]
    fn same_sign_pair_meets_at_pole() {
        let mut b = GeodesicBoundarySet::two_opposite(q());
        for c in &mut b.chambers {
            c.sign = Sign::Plus;
        }
        assert!(matches!(classify_geodesic_curve(&b), Ok(CurveType::NotFillableCurve { .. })));
    }

    #[test]
    fn malformed() {
        let mut b = GeodesicBoundarySet::<f64>::slice();
        b.chambers.push(ChamberEntry {
            theta: IdealPoint::Infinity,
            sign: Sign::Plus,
            slopes: SlopeInterval { lo: -1.0, hi: 1.0 },
        });
        assert!(classify_geodesic_curve(&b).is_err());
    }

    #[test]
    fn oscillation() {
        let mut b = GeodesicBoundarySet::<f64>::slice();
        assert!(oscillation_check(&b, 1e-9).is_ok());
        b.chambers.push(ChamberEntry {
            theta: IdealPoint::Infinity,
            sign: Sign::Plus,
            slopes: SlopeInterval { lo: 0.3, hi: 0.7 },
        });
        let v = oscillation_check(&b, 1e-9).unwrap_err();
        assert_eq!(v.gap.hi, 0.3);
        let strip = GeodesicBoundarySet {
            equator_arcs: vec![EquatorArc::full()],
            poles: vec![],
            chambers: (0..16)
                .flat_map(|k| {
                    let theta = IdealPoint::from_angle(k as f64 * 0.39);
                    [Sign::Plus, Sign::Minus].map(|sign| ChamberEntry {
                        theta,
                        sign,
                        slopes: SlopeInterval { lo: 0.0, hi: 0.5 },
                    })
                })
                .collect(),
        };
        assert!(oscillation_check(&strip, 1e-9).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let b = GeodesicBoundarySet::four_chambers(q());
        let s = serde_json::to_string(&b).unwrap();
        let back: GeodesicBoundarySet<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
    }
}
