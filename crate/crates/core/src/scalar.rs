//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar usable throughout the library: `f32` or `f64`.
///
/// Every bound here is needed somewhere: `FftNum` for the spectral paths,
/// `FloatConst` for π, `Send + Sync` for the parallel reductions.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Display + LowerExp + Debug
{
    /// Converts an `f64` literal. Infallible for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion to `f64`, used for reporting and serialization.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Converts a signed lattice coordinate.
    #[inline]
    fn from_coord(n: i64) -> Self {
        Self::from_i64(n).expect("coordinate representable")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Display + LowerExp + Debug
{
}

/// Summation strategy for reductions over lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Plain left-to-right accumulation in lexicographic site order.
    #[default]
    Lexicographic,
    /// Kahan-Babuška (Neumaier) compensated accumulation, same order.
    Compensated,
}

impl Summation {
    pub fn sum<T: Real, I: IntoIterator<Item = T>>(self, items: I) -> T {
        match self {
            Summation::Lexicographic => items.into_iter().fold(T::zero(), |acc, x| acc + x),
            Summation::Compensated => {
                let mut sum = T::zero();
                let mut comp = T::zero();
                for x in items {
                    let t = sum + x;
                    if sum.abs() >= x.abs() {
                        comp = comp + ((sum - t) + x);
                    } else {
                        comp = comp + ((x - t) + sum);
                    }
                    sum = t;
                }
                sum + comp
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_recovers_small_terms() {
        let items = [1.0e16_f64, 1.0, -1.0e16, 1.0];
        assert_eq!(Summation::Lexicographic.sum(items), 1.0);
        assert_eq!(Summation::Compensated.sum(items), 2.0);
    }

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::from_coord(-3), -3.0);
    }
}
