//! Boundary curves in the product and geodesic compactifications.

pub mod curve;
pub mod fillability;
pub mod geodesic;
pub mod trace;

pub use curve::{CurveError, CurvePoint, Direction, PiecewiseBoundaryCurve, PolyPoint, Segment, TInterval};
pub use fillability::{
    check_proposition_fillability, check_tall, detect_thin_tail, FillabilityOptions, FillabilityStatus, FillabilityVerdict,
    TallError, TallReport, Tallness, ThinTail, Witness,
};
pub use geodesic::{
    classify_geodesic_curve, oscillation_check, ChamberEntry, ClassifyError, CurveType, EquatorArc, GeodesicBoundarySet,
    OscillationViolation,
};
pub use trace::{orbit_slope_sample, trace_surface_boundary, OrbitSample, ProductTrace, SurfaceTrace, TraceError, TraceOptions};
