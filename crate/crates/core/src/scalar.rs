//! Scalar abstraction shared by the linear-programming and polytope code.
//!
//! Every algorithm in this crate is written against [`Scalar`]. Exact types
//! (`BigRational`, `Ratio<i64>`, `Ratio<i128>`) compare against zero exactly;
//! floating-point types use a fixed absolute tolerance.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, NumAssignRef, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Signed
    + NumAssignRef
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact and [`Scalar::tolerance`] is zero.
    const EXACT: bool;

    /// Absolute magnitude at or below which a value is treated as zero.
    fn tolerance() -> Self;

    /// Converts an exact rational into this scalar type (rounding for floats).
    fn from_rational(r: &BigRational) -> Self;

    fn approx_zero(&self) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs() <= Self::tolerance()
        }
    }

    fn strictly_positive(&self) -> bool {
        if Self::EXACT {
            self.is_positive()
        } else {
            *self > Self::tolerance()
        }
    }

    fn strictly_negative(&self) -> bool {
        if Self::EXACT {
            self.is_negative()
        } else {
            *self < -Self::tolerance()
        }
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let mut d = self.clone();
        d -= other;
        d.approx_zero()
    }

    /// Rescales a nonzero direction vector to a canonical positive multiple.
    ///
    /// The default divides by the largest absolute entry. Exact big rationals
    /// override this to produce a primitive integer vector, which keeps
    /// coefficient growth in check during vertex enumeration.
    fn normalize_direction(v: &mut [Self]) {
        let mut max = Self::zero();
        for x in v.iter() {
            let a = x.abs();
            if a > max {
                max = a;
            }
        }
        if max.approx_zero() {
            return;
        }
        for x in v.iter_mut() {
            *x /= &max;
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-9
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-5
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Self::zero()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn normalize_direction(v: &mut [Self]) {
        let mut lcm = BigInt::from(1);
        for x in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut gcd = BigInt::zero();
        for x in v.iter() {
            let scaled = x.numer() * (&lcm / x.denom());
            gcd = gcd.gcd(&scaled);
        }
        if gcd.is_zero() {
            return;
        }
        for x in v.iter_mut() {
            let scaled = x.numer() * (&lcm / x.denom());
            *x = BigRational::from_integer(scaled / &gcd);
        }
    }
}

macro_rules! fixed_width_ratio {
    ($($int:ty),*) => {$(
        impl Scalar for Ratio<$int> {
            const EXACT: bool = true;

            fn tolerance() -> Self {
                Self::zero()
            }

            /// Panics if `r` does not fit the fixed-width integer type.
            fn from_rational(r: &BigRational) -> Self {
                let n = r.numer().to_string().parse::<$int>().expect("numerator overflows");
                let d = r.denom().to_string().parse::<$int>().expect("denominator overflows");
                Ratio::new(n, d)
            }
        }
    )*};
}

fixed_width_ratio!(i64, i128);
