//! 2x2 matrices over an arbitrary numeric ring, acting by Möbius maps.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

/// `[a b; c d]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Clone + Num> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn scale(&self, k: &T) -> Self {
        Mat2::new(
            self.a.clone() * k.clone(),
            self.b.clone() * k.clone(),
            self.c.clone() * k.clone(),
            self.d.clone() * k.clone(),
        )
    }

    /// Multiplies the top row by `k`: the matrix of `tau -> k * M(tau)`.
    pub fn scale_top(&self, k: &T) -> Self {
        Mat2::new(
            self.a.clone() * k.clone(),
            self.b.clone() * k.clone(),
            self.c.clone(),
            self.d.clone(),
        )
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat2<U> {
        Mat2 {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
            d: f(&self.d),
        }
    }

    /// Same Möbius action: the entry vectors are proportional.
    pub fn same_action(&self, other: &Self) -> bool {
        let x = self.entries();
        let y = other.entries();
        (0..4).all(|i| {
            (0..4).all(|j| x[i].clone() * y[j].clone() == x[j].clone() * y[i].clone())
        })
    }

    /// `(a z + b) / (c z + d)` for any field extending the entries.
    pub fn apply<Z>(&self, z: Z) -> Z
    where
        Z: Clone + Num + From<T>,
    {
        let num = Z::from(self.a.clone()) * z.clone() + Z::from(self.b.clone());
        let den = Z::from(self.c.clone()) * z + Z::from(self.d.clone());
        num / den
    }
}

impl<T: Clone + Num> Mul for &Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, o: &Mat2<T>) -> Mat2<T> {
        let m = |x: &T, y: &T, z: &T, w: &T| x.clone() * y.clone() + z.clone() * w.clone();
        Mat2::new(
            m(&self.a, &o.a, &self.b, &o.c),
            m(&self.a, &o.b, &self.b, &o.d),
            m(&self.c, &o.a, &self.d, &o.c),
            m(&self.c, &o.b, &self.d, &o.d),
        )
    }
}

impl<T: Clone + Num> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, o: Mat2<T>) -> Mat2<T> {
        &self * &o
    }
}

impl<T: fmt::Display> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

pub type RationalMatrix = Mat2<BigRational>;
pub type IntMatrix = Mat2<BigInt>;

impl RationalMatrix {
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |x: i64| BigRational::from_integer(x.into());
        Mat2::new(r(a), r(b), r(c), r(d))
    }

    /// The primitive integer matrix with the same action (positive scaling
    /// of the entries), together with the scaling factor applied.
    pub fn to_primitive(&self) -> (IntMatrix, BigRational) {
        let lcm = self
            .entries()
            .iter()
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = self
            .entries()
            .iter()
            .map(|x| (*x * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let m = Mat2::new(&ints[0] / &g, &ints[1] / &g, &ints[2] / &g, &ints[3] / &g);
        (m, BigRational::new(lcm, g))
    }

    pub fn is_integral(&self) -> bool {
        self.entries().iter().all(|x| x.is_integer())
    }
}

impl IntMatrix {
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn to_rational(&self) -> RationalMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    pub fn is_sl2(&self) -> bool {
        self.det().is_one()
    }

    /// `-M` when needed so that `c > 0`, or `c = 0` and `d > 0`.
    pub fn normalized(&self) -> Self {
        if self.c.is_negative() || (self.c.is_zero() && self.d.is_negative()) {
            self.map(|x| -x.clone())
        } else {
            self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_det() {
        let s = IntMatrix::from_i64(23, 5, 9, 2);
        let t = IntMatrix::from_i64(4, 2, 0, 2);
        assert_eq!(&s * &t, IntMatrix::from_i64(92, 56, 36, 22));
        assert!(s.is_sl2());
        assert_eq!(t.det(), BigInt::from(8));
    }

    #[test]
    fn primitive_clearing() {
        let half = BigRational::new(1.into(), 2.into());
        let m = Mat2::new(
            BigRational::from_integer(2.into()),
            half,
            BigRational::from_integer(4.into()),
            BigRational::from_integer(6.into()),
        );
        let (p, k) = m.to_primitive();
        assert_eq!(p, IntMatrix::from_i64(4, 1, 8, 12));
        assert_eq!(k, BigRational::from_integer(2.into()));
        assert!(m.same_action(&p.to_rational()));
    }

    #[test]
    fn same_action_detects_scalars() {
        let a = RationalMatrix::from_ints(46, 28, 36, 22);
        let b = RationalMatrix::from_ints(23, 14, 18, 11);
        assert!(a.same_action(&b));
        assert!(!a.same_action(&RationalMatrix::from_ints(23, 14, 18, 12)));
    }

    #[test]
    fn normalization_negates() {
        let m = IntMatrix::from_i64(-1, 2, -3, 5);
        assert_eq!(m.normalized(), IntMatrix::from_i64(1, -2, 3, -5));
        assert_eq!(IntMatrix::from_i64(-1, 4, 0, -1).normalized(), IntMatrix::from_i64(1, -4, 0, 1));
    }
}
