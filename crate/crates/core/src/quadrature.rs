//! Globally adaptive Gauss–Kronrod (7/15) quadrature, generic over the scalar type.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature tolerance not met: estimate {estimate}, error {error} after {intervals} intervals")]
    ToleranceNotMet { estimate: f64, error: f64, intervals: usize },
    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon() * T::lit(50.0);
        Self {
            abs_tol: T::lit(1e-13).max(eps),
            rel_tol: T::lit(1e-12).max(eps),
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<Segment<T>, QuadratureError> {
    let c = (a + b) * T::half();
    let h = (b - a) * T::half();
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite(c.as_f64()));
    }
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let (x1, x2) = (c - dx, c + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite(x1.as_f64()));
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite(x2.as_f64()));
        }
        k += (f1 + f2) * T::lit(WGK[j]);
        if j % 2 == 1 {
            g += (f1 + f2) * T::lit(WG[j / 2]);
        }
    }
    Ok(Segment {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    })
}

/// `∫_a^b f` for finite `a < b`. The integrand is never evaluated at the endpoints.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>, QuadratureError> {
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b)?;
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    loop {
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(QuadratureError::ToleranceNotMet {
                estimate: value.as_f64(),
                error: error.as_f64(),
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.a + worst.b) * T::half();
        if !(mid > worst.a && mid < worst.b) {
            // interval can no longer be split in this precision
            return Err(QuadratureError::ToleranceNotMet {
                estimate: value.as_f64(),
                error: error.as_f64(),
                intervals: heap.len() + 1,
            });
        }
        let left = kronrod(&f, worst.a, mid)?;
        let right = kronrod(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // re-sum occasionally to stop drift of the running totals
        if heap.len() % 64 == 0 {
            value = heap.iter().fold(T::zero(), |s, seg| s + seg.value);
            error = heap.iter().fold(T::zero(), |s, seg| s + seg.error);
        }
    }
}

/// `∫_a^∞ f`, via `x = a + u/(1 - u)` on `u ∈ (0, 1)`.
pub fn integrate_to_infinity<T: Scalar, F: Fn(T) -> T>(f: F, a: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>, QuadratureError> {
    let g = |u: T| {
        let w = T::one() - u;
        let x = a + u / w;
        let v = f(x) / (w * w);
        // tails that underflow are genuinely zero
        if v.is_nan() && !x.is_finite() {
            T::zero()
        } else {
            v
        }
    };
    integrate(g, T::zero(), T::one(), opts)
}
