use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the model is generic over. Implemented for `f32` and `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal; exact for `f64`, rounded for `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}

/// `exp(i theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Reduces an angle into `[lo, lo + period)`.
pub fn wrap_into<T: Real>(x: T, lo: T, period: T) -> T {
    if x >= lo && x < lo + period {
        return x;
    }
    let mut r = (x - lo) % period;
    if r < T::zero() {
        r += period;
    }
    // `%` can return exactly `period` after the correction for tiny negatives
    if r >= period {
        r -= period;
    }
    lo + r
}
