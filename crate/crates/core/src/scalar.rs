//! Coefficient rings for truncated q-series.
//!
//! Every series operation is generic over [`Coefficient`]. The exact
//! instances are `BigRational` (the default carrier), `BigInt` (integral
//! generating functions, no gcd normalisation on every add) and the
//! fixed-width `i64`/`Ratio<i64>` for small hand-written tests.

use std::fmt;
use std::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// An exact commutative ring usable as a q-series coefficient.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Num
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self;

    fn from_bigint(v: BigInt) -> Self;

    /// `None` unless the rational value is representable exactly.
    fn from_rational(v: &BigRational) -> Option<Self>;

    /// The value as an integer, `None` when it is not integral.
    fn to_bigint(&self) -> Option<BigInt>;

    fn to_rational(&self) -> BigRational;

    /// `self / rhs` when the quotient exists in the ring.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);

    /// `self -= a * b`
    fn sub_product(&mut self, a: &Self, b: &Self);

    fn mul_ref(&self, rhs: &Self) -> Self;
}

macro_rules! impl_fixed_int {
    ($t:ty) => {
        impl Coefficient for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_bigint(v: BigInt) -> Self {
                <$t as num_traits::FromPrimitive>::from_i128(
                    v.to_i128().expect("coefficient overflow"),
                )
                .expect("coefficient overflow")
            }
            fn from_rational(v: &BigRational) -> Option<Self> {
                if v.is_integer() {
                    v.numer().to_i128().and_then(|x| <$t>::try_from(x).ok())
                } else {
                    None
                }
            }
            fn to_bigint(&self) -> Option<BigInt> {
                Some(BigInt::from(*self))
            }
            fn to_rational(&self) -> BigRational {
                BigRational::from_integer(BigInt::from(*self))
            }
            fn checked_div(&self, rhs: &Self) -> Option<Self> {
                if *rhs == 0 || self % rhs != 0 {
                    None
                } else {
                    Some(self / rhs)
                }
            }
            fn add_product(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }
            fn sub_product(&mut self, a: &Self, b: &Self) {
                *self -= a * b;
            }
            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }
        }
    };
}

impl_fixed_int!(i64);
impl_fixed_int!(i128);

impl Coefficient for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: BigInt) -> Self {
        v
    }
    fn from_rational(v: &BigRational) -> Option<Self> {
        v.is_integer().then(|| v.to_integer())
    }
    fn to_bigint(&self) -> Option<BigInt> {
        Some(self.clone())
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        r.is_zero().then_some(q)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if b.is_one() {
            *self += a;
        } else if a.is_one() {
            *self += b;
        } else {
            *self += a * b;
        }
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        if b.is_one() {
            *self -= a;
        } else if a.is_one() {
            *self -= b;
        } else {
            *self -= a * b;
        }
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl<I> Coefficient for Ratio<I>
where
    I: Clone + Integer + Signed + fmt::Debug + fmt::Display + Send + Sync + RatioBase,
    Ratio<I>: for<'a> AddAssign<&'a Ratio<I>> + for<'a> SubAssign<&'a Ratio<I>>,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(I::from_i64(v))
    }
    fn from_bigint(v: BigInt) -> Self {
        Ratio::from_integer(I::from_bigint(v))
    }
    fn from_rational(v: &BigRational) -> Option<Self> {
        Some(Ratio::new(
            I::try_from_bigint(v.numer())?,
            I::try_from_bigint(v.denom())?,
        ))
    }
    fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().to_big())
    }
    fn to_rational(&self) -> BigRational {
        BigRational::new(self.numer().to_big(), self.denom().to_big())
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| self.clone() / rhs.clone())
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += &(a.clone() * b.clone());
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        *self -= &(a.clone() * b.clone());
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
}

/// Integer types that can sit under a `Ratio` coefficient.
pub trait RatioBase: Sized {
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: BigInt) -> Self;
    fn try_from_bigint(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl RatioBase for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn from_bigint(v: BigInt) -> Self {
        v.to_i64().expect("coefficient overflow")
    }
    fn try_from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl RatioBase for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: BigInt) -> Self {
        v
    }
    fn try_from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `+1` or `-1` check used by the sparse kernels.
pub(crate) fn unit_sign<T: Coefficient>(c: &T) -> Option<bool> {
    if c.is_one() {
        Some(true)
    } else if (-c.clone()).is_one() {
        Some(false)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_div_respects_ring() {
        assert_eq!(Coefficient::checked_div(&BigInt::from(6), &BigInt::from(3)), Some(BigInt::from(2)));
        assert_eq!(Coefficient::checked_div(&BigInt::from(7), &BigInt::from(3)), None);
        assert_eq!(Coefficient::checked_div(&7i64, &0), None);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            Coefficient::checked_div(&BigRational::from_i64(1), &BigRational::from_i64(2)),
            Some(half)
        );
    }

    #[test]
    fn rational_roundtrip() {
        let r = BigRational::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(<Ratio<i64>>::from_rational(&r).unwrap().to_rational(), r);
        assert_eq!(BigInt::from_rational(&r), None);
        assert_eq!(r.to_bigint(), None);
    }
}
