//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All geometry, quadrature and solver code is written against [`Scalar`], so
//! `f32` and `f64` both work; the concrete `*64` aliases at the crate root are
//! what the command-line tool uses.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Default absolute geometric tolerance for `T`.
pub fn default_tol<T: Scalar>() -> T {
    // 1e-10 for f64, scaled to the type's precision otherwise
    let eps = T::epsilon();
    let wanted = T::lit(1e-10);
    if wanted > eps * T::lit(1e3) {
        wanted
    } else {
        eps * T::lit(1e3)
    }
}
