//! Minimal surfaces in `H² × R`.

pub mod acceptance;
pub mod boundary;
pub mod compactify;
pub mod families;
pub mod hyp;
pub mod mesh;
pub mod quadrature;
pub mod plateau;
pub mod residual;
pub mod scalar;

pub use hyp::{
    apply_isometry, dist_ambient, dist_h2, equidistant_coordinate, geodesic_through, ray_endpoint, AmbientPoint,
    GeodesicH2, GeometryError, HPoint, IdealPoint, Isometry, Mobius,
};
pub use scalar::Scalar;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type HPoint64 = HPoint<f64>;
pub type AmbientPoint64 = AmbientPoint<f64>;
pub type IdealPoint64 = IdealPoint<f64>;
pub type Geodesic64 = GeodesicH2<f64>;
pub type Isometry64 = Isometry<f64>;
