//! Truncated formal Laurent series in `q` on the `q^{1/24}` exponent grid.
//!
//! A [`QSeries`] stores its nonzero coefficients sparsely together with a
//! precision bound: every exponent strictly below the bound is known, and
//! nothing at or above it is. Arithmetic propagates the bound pessimistically
//! and comparing past it is an error.
//!
//! Euler products `f_r = prod (1 - q^{rn})` are generated from the pentagonal
//! number theorem, so multiplying or dividing by `f_r` touches only the
//! `O(sqrt(T/r))` nonzero pentagonal terms. [`QSeries::mul_euler_power`] is the
//! hot path for every eta-quotient expansion.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{unit_sign, Coefficient};

/// Exponent denominator of the grid.
pub const GRID: i64 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("non-invertible series")]
    NonInvertible,
    #[error("U_{0} on non-integral series")]
    NonIntegral(u64),
    #[error("cannot reduce rational mod {0}")]
    RationalModulus(u64),
    #[error("precision underflow: need {needed}, have {available}")]
    PrecisionUnderflow {
        needed: Exponent,
        available: Exponent,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// An exponent of `q`, stored as a numerator over [`GRID`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent(i64);

impl Exponent {
    pub const fn from_24ths(n: i64) -> Self {
        Exponent(n)
    }

    pub const fn integer(n: i64) -> Self {
        Exponent(n * GRID)
    }

    pub const fn numerator(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % GRID == 0
    }

    /// Integer value, `None` for a fractional exponent.
    pub fn as_integer(self) -> Option<i64> {
        self.is_integral().then_some(self.0 / GRID)
    }

    /// Smallest integer `n` with `n >= self`.
    pub fn ceil(self) -> i64 {
        ceil_div(self.0, GRID)
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::integer(n)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.0.gcd(&GRID);
        if g == GRID {
            write!(f, "{}", self.0 / GRID)
        } else {
            write!(f, "{}/{}", self.0 / g, GRID / g)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Arithmetic progression `m n + r`, `0 <= r < m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progression {
    modulus: u64,
    residue: u64,
}

impl Progression {
    pub fn new(modulus: u64, residue: u64) -> Result<Self, SeriesError> {
        if modulus == 0 {
            return Err(SeriesError::InvalidArgument("progression modulus must be positive"));
        }
        if residue >= modulus {
            return Err(SeriesError::InvalidArgument("progression residue out of range"));
        }
        Ok(Progression { modulus, residue })
    }

    /// `m n + c` for any `c >= 0`, folding `c` into the residue and returning
    /// the index shift `c div m` separately.
    pub fn with_offset(modulus: u64, offset: u64) -> Result<(Self, u64), SeriesError> {
        if modulus == 0 {
            return Err(SeriesError::InvalidArgument("progression modulus must be positive"));
        }
        Ok((Progression::new(modulus, offset % modulus)?, offset / modulus))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }
}

/// Truncated Laurent series `sum c_e q^{e/24}` with exact coefficients.
#[derive(Clone, PartialEq)]
pub struct QSeries<T> {
    coeffs: BTreeMap<i64, T>,
    precision: i64,
}

impl<T: Coefficient> QSeries<T> {
    /// The zero series known below `precision`.
    pub fn zero(precision: impl Into<Exponent>) -> Self {
        QSeries {
            coeffs: BTreeMap::new(),
            precision: precision.into().0,
        }
    }

    pub fn one(precision: impl Into<Exponent>) -> Self {
        Self::monomial(Exponent(0), T::one(), precision)
    }

    /// `c q^e + O(q^precision)`.
    pub fn monomial(exponent: Exponent, c: T, precision: impl Into<Exponent>) -> Self {
        let mut s = Self::zero(precision);
        s.insert(exponent.0, c);
        s
    }

    /// Builds a series from integer-exponent terms; repeated exponents add.
    pub fn from_terms<I>(terms: I, precision: impl Into<Exponent>) -> Self
    where
        I: IntoIterator<Item = (i64, T)>,
    {
        Self::from_grid_terms(
            terms.into_iter().map(|(e, c)| (Exponent::integer(e), c)),
            precision,
        )
    }

    pub fn from_grid_terms<I>(terms: I, precision: impl Into<Exponent>) -> Self
    where
        I: IntoIterator<Item = (Exponent, T)>,
    {
        let mut s = Self::zero(precision);
        for (e, c) in terms {
            s.insert(e.0, c);
        }
        s
    }

    /// Dense integer-exponent constructor: `coeffs[i]` is the coefficient of `q^i`,
    /// precision is the vector length.
    pub fn from_dense(coeffs: Vec<T>) -> Self {
        let n = coeffs.len() as i64;
        Self::from_terms(coeffs.into_iter().enumerate().map(|(i, c)| (i as i64, c)), n)
    }

    fn insert(&mut self, e: i64, c: T) {
        if e >= self.precision || c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn precision(&self) -> Exponent {
        Exponent(self.precision)
    }

    /// Lowest exponent with a nonzero coefficient; the precision for the zero series.
    pub fn valuation(&self) -> Exponent {
        Exponent(self.coeffs.keys().next().copied().unwrap_or(self.precision))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.keys().all(|e| e % GRID == 0)
    }

    /// Coefficient of `q^n`. Zero when absent; panics past the precision.
    pub fn coeff(&self, n: i64) -> T {
        self.coeff_at(Exponent::integer(n))
    }

    pub fn coeff_at(&self, e: Exponent) -> T {
        assert!(
            e.0 < self.precision,
            "coefficient at q^{e} requested beyond precision {}",
            self.precision()
        );
        self.coeffs.get(&e.0).cloned().unwrap_or_else(T::zero)
    }

    /// Checked variant of [`QSeries::coeff`].
    pub fn try_coeff(&self, n: i64) -> Result<T, SeriesError> {
        let e = Exponent::integer(n);
        if e.0 >= self.precision {
            return Err(SeriesError::PrecisionUnderflow {
                needed: Exponent(e.0 + GRID),
                available: self.precision(),
            });
        }
        Ok(self.coeffs.get(&e.0).cloned().unwrap_or_else(T::zero))
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &T)> {
        self.coeffs.iter().map(|(&e, c)| (Exponent(e), c))
    }

    /// Coefficients of `q^0 .. q^{n-1}` as a dense vector.
    pub fn dense_prefix(&self, n: usize) -> Vec<T> {
        (0..n as i64).map(|i| self.coeff(i)).collect()
    }

    /// Drop everything at or above `bound` (never raises the precision).
    pub fn truncate(&self, bound: impl Into<Exponent>) -> Self {
        let bound = bound.into().0.min(self.precision);
        QSeries {
            coeffs: self.coeffs.range(..bound).map(|(&e, c)| (e, c.clone())).collect(),
            precision: bound,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.precision());
        for (&e, a) in &self.coeffs {
            out.insert(e, a.mul_ref(c));
        }
        out
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: Exponent) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k.0, c.clone())).collect(),
            precision: self.precision + k.0,
        }
    }

    /// Cauchy product; precision `min(a.prec + b.val, b.prec + a.val)`.
    pub fn multiply(&self, other: &Self) -> Self {
        let precision = (self.precision + other.valuation().0)
            .min(other.precision + self.valuation().0);
        if self.is_zero() || other.is_zero() {
            return QSeries {
                coeffs: BTreeMap::new(),
                precision,
            };
        }
        let (small, large) = if self.nnz() <= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        let step = grid_step([small, large]);
        let base = small.valuation().0 + large.valuation().0;
        let mut buf = DenseBuf::zeros(base, step, precision);
        let large_terms: Vec<(i64, &T)> = large.coeffs.iter().map(|(&e, c)| (e, c)).collect();
        for (&ea, ca) in &small.coeffs {
            let sign = unit_sign(ca);
            for &(eb, cb) in &large_terms {
                let e = ea + eb;
                if e >= precision {
                    break;
                }
                let slot: &mut T = buf.slot_mut(e);
                match sign {
                    Some(true) => *slot += cb,
                    Some(false) => *slot -= cb,
                    None => slot.add_product(ca, cb),
                }
            }
        }
        buf.into_series()
    }

    /// `self / other`, valid when the leading coefficient of `other` is a unit
    /// that divides every step of the recurrence.
    pub fn divide(&self, other: &Self) -> Result<Self, SeriesError> {
        let (vb, lead) = match other.coeffs.iter().next() {
            Some((&e, c)) => (e, c.clone()),
            None => return Err(SeriesError::NonInvertible),
        };
        let va = self.valuation().0;
        let precision = (self.precision - vb).min(other.precision - 2 * vb + va);
        if self.is_zero() {
            return Ok(Self::zero(Exponent(precision)));
        }
        let step = grid_step([self, other]);
        let base = va - vb;
        let mut buf = DenseBuf::zeros(base, step, precision);
        for (&e, c) in &self.coeffs {
            if e - vb < precision {
                *buf.slot_mut(e - vb) += c;
            }
        }
        let tail: Vec<(usize, &T, Option<bool>)> = other
            .coeffs
            .iter()
            .skip(1)
            .map(|(&e, c)| (((e - vb) / step) as usize, c, unit_sign(c)))
            .collect();
        let lead_unit = unit_sign(&lead);
        for i in 0..buf.data.len() {
            let (done, rest) = buf.data.split_at_mut(i);
            let cur: &mut T = &mut rest[0];
            for &(off, c, sign) in &tail {
                if off > i {
                    break;
                }
                let prev = &done[i - off];
                match sign {
                    Some(true) => *cur -= prev,
                    Some(false) => *cur += prev,
                    None => cur.sub_product(c, prev),
                }
            }
            match lead_unit {
                Some(true) => {}
                Some(false) => *cur = -cur.clone(),
                None => {
                    *cur = cur.checked_div(&lead).ok_or(SeriesError::NonInvertible)?;
                }
            }
        }
        Ok(buf.into_series())
    }

    pub fn invert(&self) -> Result<Self, SeriesError> {
        let vb = self.valuation().0;
        if self.is_zero() {
            return Err(SeriesError::NonInvertible);
        }
        // 1 known to the same relative precision as self.
        let one = Self::one(Exponent(self.precision - vb));
        one.divide(self)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(Exponent(self.precision - self.valuation().0));
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base);
            }
        }
        acc
    }

    /// Multiply by `f_r^e` where `f_r = prod_{n>=1} (1 - q^{rn})`, in place on a
    /// dense buffer. Precision is unchanged: `f_r` is known exactly.
    pub fn mul_euler_power(&self, r: u64, e: i64) -> Self {
        self.mul_euler_product(&[(r, e)])
    }

    /// Multiply by `prod f_r^{e_r}` in a single dense pass.
    pub fn mul_euler_product(&self, factors: &[(u64, i64)]) -> Self {
        assert!(factors.iter().all(|&(r, _)| r >= 1), "Euler product index must be positive");
        if factors.iter().all(|&(_, e)| e == 0) || self.is_zero() {
            return self.clone();
        }
        let step = factors
            .iter()
            .filter(|f| f.1 != 0)
            .fold(grid_step([self]), |g, &(r, _)| gcd_i64(g, GRID * r as i64));
        let mut buf = DenseBuf::from_series(self, step);
        for &(r, e) in factors {
            buf.apply_euler(r, e);
        }
        buf.into_series()
    }

    /// `q -> q^d`: exponents and precision scale by `d`.
    pub fn dilate(&self, d: u64) -> Self {
        assert!(d >= 1, "dilation factor must be positive");
        let d = d as i64;
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e * d, c.clone())).collect(),
            precision: self.precision.saturating_mul(d),
        }
    }

    /// Atkin's `U_d`: `sum a(n) q^n -> sum a(dn) q^n`.
    pub fn u_operator(&self, d: u64) -> Result<Self, SeriesError> {
        if d == 0 {
            return Err(SeriesError::InvalidArgument("U_d needs d >= 1"));
        }
        if !self.is_integral() {
            return Err(SeriesError::NonIntegral(d));
        }
        let di = d as i64;
        let step = GRID * di;
        let precision = GRID * ceil_div(self.precision, step);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(e, _)| *e % step == 0)
            .map(|(&e, c)| (e / di, c.clone()))
            .collect();
        Ok(QSeries { coeffs, precision })
    }

    /// `sum a(mn + r) q^n`.
    pub fn extract_progression(&self, p: Progression) -> Result<Self, SeriesError> {
        if !self.is_integral() {
            return Err(SeriesError::NonIntegral(p.modulus));
        }
        let m = p.modulus as i64;
        let r = p.residue as i64;
        // mn + r < P  <=>  n < (P - r) / m
        let precision = GRID * ceil_div(self.precision - GRID * r, GRID * m);
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(&e, c)| {
                let n = e / GRID;
                ((n - r).rem_euclid(m) == 0).then(|| (GRID * (n - r).div_euclid(m), c.clone()))
            })
            .collect();
        Ok(QSeries { coeffs, precision })
    }

    /// `q -> -q` on an integral series.
    pub fn negate_q(&self) -> Result<Self, SeriesError> {
        if !self.is_integral() {
            return Err(SeriesError::NonIntegral(1));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&e, c)| {
                let c = if (e / GRID).rem_euclid(2) == 1 { -c.clone() } else { c.clone() };
                (e, c)
            })
            .collect();
        Ok(QSeries {
            coeffs,
            precision: self.precision,
        })
    }

    /// Least nonnegative residues mod `m`; requires integral coefficients.
    pub fn reduce_mod(&self, m: u64) -> Result<Self, SeriesError> {
        if m == 0 {
            return Err(SeriesError::InvalidArgument("modulus must be positive"));
        }
        let mb = BigInt::from(m);
        let mut out = Self::zero(self.precision());
        for (&e, c) in &self.coeffs {
            let v = c.to_bigint().ok_or(SeriesError::RationalModulus(m))?;
            out.insert(e, T::from_bigint(v.mod_floor(&mb)));
        }
        Ok(out)
    }

    /// True iff every coefficient below `bound` is divisible by `m`.
    pub fn is_zero_mod(&self, m: u64) -> Result<bool, SeriesError> {
        Ok(self.reduce_mod(m)?.is_zero())
    }

    /// Coefficientwise equality below `bound`.
    pub fn equals_to(&self, other: &Self, bound: impl Into<Exponent>) -> Result<bool, SeriesError> {
        let bound = bound.into();
        let available = self.precision().min(other.precision());
        if available < bound {
            return Err(SeriesError::PrecisionUnderflow {
                needed: bound,
                available,
            });
        }
        Ok(self.coeffs.range(..bound.0).eq(other.coeffs.range(..bound.0)))
    }

    /// First exponent below `bound` where the series differ.
    pub fn first_difference(&self, other: &Self, bound: impl Into<Exponent>) -> Result<Option<Exponent>, SeriesError> {
        let bound = bound.into();
        if !self.equals_to(other, bound)? {
            let diff = self.truncate(bound) - other.truncate(bound);
            return Ok(Some(diff.valuation()));
        }
        Ok(None)
    }

    /// Report serialization: ascending `(exponent numerator over 24, "p/q")` pairs.
    pub fn to_report(&self) -> SeriesReport {
        SeriesReport {
            precision: self.precision,
            terms: self
                .coeffs
                .iter()
                .map(|(&e, c)| (e, c.to_rational().to_string()))
                .collect(),
        }
    }

    /// Maps coefficients into another ring (e.g. `BigInt -> BigRational`).
    pub fn convert<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> QSeries<U> {
        let mut out = QSeries::zero(self.precision());
        for (&e, c) in &self.coeffs {
            out.insert(e, f(c));
        }
        out
    }
}

/// Serialized form of a series for check witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    /// Precision bound, numerator over 24.
    pub precision: i64,
    pub terms: Vec<(i64, String)>,
}

/// `f_r^e` truncated below `q^T`.
pub fn euler_product<T: Coefficient>(r: u64, e: i64, precision: impl Into<Exponent>) -> QSeries<T> {
    QSeries::one(precision).mul_euler_power(r, e)
}

/// Generalized pentagonal exponents `k(3k-1)/2`, `k = ±1, ±2, ...`, below
/// `bound`, with the sign `(-1)^k`, ascending.
pub fn pentagonal_terms(bound: i64) -> Vec<(i64, bool)> {
    let mut out = Vec::new();
    let mut k: i64 = 1;
    loop {
        let a = k * (3 * k - 1) / 2;
        let b = k * (3 * k + 1) / 2;
        if a >= bound {
            break;
        }
        let positive = k % 2 == 0;
        out.push((a, positive));
        if b < bound {
            out.push((b, positive));
        }
        k += 1;
    }
    out
}

/// `ceil(a / b)` for `b > 0`.
pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Common spacing of all exponents of the given series (0 if each is a monomial).
fn grid_step<'a, T: 'a, I: IntoIterator<Item = &'a QSeries<T>>>(series: I) -> i64 {
    let mut g = 0i64;
    for s in series {
        if let Some(&first) = s.coeffs.keys().next() {
            for &e in s.coeffs.keys() {
                g = g.gcd(&(e - first));
                if g == 1 {
                    return 1;
                }
            }
        }
    }
    if g == 0 {
        GRID
    } else {
        g
    }
}

/// Dense working storage for exponents `base + i * step` below `bound`.
struct DenseBuf<T> {
    base: i64,
    step: i64,
    bound: i64,
    data: Vec<T>,
}

impl<T: Coefficient> DenseBuf<T> {
    fn zeros(base: i64, step: i64, bound: i64) -> Self {
        let len = if bound > base { ceil_div(bound - base, step) as usize } else { 0 };
        DenseBuf {
            base,
            step,
            bound,
            data: vec![T::zero(); len],
        }
    }

    fn from_series(s: &QSeries<T>, step: i64) -> Self {
        let mut buf = Self::zeros(s.valuation().0, step, s.precision);
        for (&e, c) in &s.coeffs {
            *buf.slot_mut(e) += c;
        }
        buf
    }

    fn slot_mut(&mut self, e: i64) -> &mut T {
        debug_assert_eq!((e - self.base) % self.step, 0);
        &mut self.data[((e - self.base) / self.step) as usize]
    }

    fn apply_euler(&mut self, r: u64, e: i64) {
        let len = self.data.len() as i64;
        let stride = GRID * r as i64;
        debug_assert_eq!(stride % self.step, 0);
        let unit = stride / self.step;
        let pent: Vec<(usize, bool)> = pentagonal_terms(ceil_div(len, unit))
            .into_iter()
            .map(|(k, s)| ((k * unit) as usize, s))
            .collect();
        let n = self.data.len();
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                // descending: each slot reads only lower, not yet updated slots
                for i in (0..n).rev() {
                    let (lo, hi) = self.data.split_at_mut(i);
                    let cur = &mut hi[0];
                    for &(off, positive) in &pent {
                        if off > i {
                            break;
                        }
                        if positive {
                            *cur += &lo[i - off];
                        } else {
                            *cur -= &lo[i - off];
                        }
                    }
                }
            } else {
                for i in 0..n {
                    let (lo, hi) = self.data.split_at_mut(i);
                    let cur = &mut hi[0];
                    for &(off, positive) in &pent {
                        if off > i {
                            break;
                        }
                        if positive {
                            *cur -= &lo[i - off];
                        } else {
                            *cur += &lo[i - off];
                        }
                    }
                }
            }
        }
    }

    fn into_series(self) -> QSeries<T> {
        let DenseBuf { base, step, bound, data } = self;
        let coeffs = data
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (base + step * i as i64, c))
            .collect();
        QSeries {
            coeffs,
            precision: bound,
        }
    }
}

impl<T: Coefficient> Add for &QSeries<T> {
    type Output = QSeries<T>;

    fn add(self, rhs: &QSeries<T>) -> QSeries<T> {
        let mut out = self.truncate(Exponent(self.precision.min(rhs.precision)));
        for (&e, c) in &rhs.coeffs {
            out.insert(e, c.clone());
        }
        out
    }
}

impl<T: Coefficient> Add for QSeries<T> {
    type Output = QSeries<T>;

    fn add(self, rhs: QSeries<T>) -> QSeries<T> {
        &self + &rhs
    }
}

impl<T: Coefficient> Neg for &QSeries<T> {
    type Output = QSeries<T>;

    fn neg(self) -> QSeries<T> {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c.clone())).collect(),
            precision: self.precision,
        }
    }
}

impl<T: Coefficient> Neg for QSeries<T> {
    type Output = QSeries<T>;

    fn neg(self) -> QSeries<T> {
        -&self
    }
}

impl<T: Coefficient> Sub for &QSeries<T> {
    type Output = QSeries<T>;

    fn sub(self, rhs: &QSeries<T>) -> QSeries<T> {
        self + &(-rhs)
    }
}

impl<T: Coefficient> Sub for QSeries<T> {
    type Output = QSeries<T>;

    fn sub(self, rhs: QSeries<T>) -> QSeries<T> {
        &self - &rhs
    }
}

impl<T: Coefficient> Mul for &QSeries<T> {
    type Output = QSeries<T>;

    fn mul(self, rhs: &QSeries<T>) -> QSeries<T> {
        self.multiply(rhs)
    }
}

impl<T: Coefficient> Mul for QSeries<T> {
    type Output = QSeries<T>;

    fn mul(self, rhs: QSeries<T>) -> QSeries<T> {
        self.multiply(&rhs)
    }
}

impl<T: Coefficient> fmt::Debug for QSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: Coefficient> fmt::Display for QSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&e, c) in &self.coeffs {
            let exp = Exponent(e);
            let c_str = c.to_string();
            let (neg, mag) = match c_str.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, c_str),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let is_one = mag == "1";
            match (e, is_one) {
                (0, _) => f.write_str(&mag)?,
                (_, true) => write!(f, "q^{exp}")?,
                (_, false) => write!(f, "{mag}*q^{exp}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.precision())
    }
}

/// `sum_{n>=1} sigma_k(n) q^n` style divisor sums, used for Eisenstein series.
pub fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// `E_{2k}`-style Eisenstein series `1 + factor * sum sigma_{power}(n) q^n`.
pub fn eisenstein<T: Coefficient>(factor: i64, power: u32, precision: i64) -> QSeries<T> {
    let f = BigInt::from(factor);
    let mut terms = vec![(0, T::one())];
    for n in 1..precision {
        terms.push((n, T::from_bigint(&f * divisor_power_sum(n as u64, power))));
    }
    QSeries::from_terms(terms, precision)
}

impl<T: Coefficient> QSeries<T> {
    /// Constant-term check helper: the series equals `1 + O(q^bound)`.
    pub fn is_one_below(&self, bound: impl Into<Exponent>) -> Result<bool, SeriesError> {
        let bound = bound.into();
        self.equals_to(&QSeries::one(self.precision().max(bound)), bound)
    }

    pub fn constant_term(&self) -> T {
        self.coeffs.get(&0).cloned().unwrap_or_else(T::zero)
    }

    /// Every coefficient is `1` for the constant term only.
    pub fn is_identity(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    type S = QSeries<BigInt>;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn poly(terms: &[(i64, i64)], prec: i64) -> S {
        S::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))), prec)
    }

    #[test]
    fn euler_product_small_cases() {
        let f1: S = euler_product(1, 1, 6);
        assert_eq!(f1.dense_prefix(6), ints(&[1, -1, -1, 0, 0, 1]));
        assert_eq!(f1.precision(), Exponent::integer(6));

        let p: S = euler_product(1, -1, 6);
        assert_eq!(p.dense_prefix(6), ints(&[1, 1, 2, 3, 5, 7]));

        let f7: S = euler_product(7, 1, 7);
        assert!(f7.is_identity());
        assert_eq!(f7.precision(), Exponent::integer(7));
    }

    #[test]
    fn multiply_precision_rule() {
        let a = poly(&[(0, 1), (1, 1)], 10);
        let b = poly(&[(0, 1), (1, -1)], 10);
        assert_eq!(a.multiply(&b), poly(&[(0, 1), (2, -1)], 10));

        let c = poly(&[(2, 1)], 5);
        let d = poly(&[(0, 3), (3, 1)], 8);
        // min(5 + 0, 8 + 2)
        assert_eq!(c.multiply(&d).precision(), Exponent::integer(5));
    }

    #[test]
    fn invert_geometric_and_laurent() {
        let a = poly(&[(0, 1), (1, -1)], 8);
        assert_eq!(a.invert().unwrap().dense_prefix(8), ints(&[1; 8]));

        let b = poly(&[(1, 1), (2, 1)], 8);
        let inv = b.invert().unwrap();
        assert_eq!(inv.valuation(), Exponent::integer(-1));
        let expect = poly(&[(-1, 1), (0, -1), (1, 1), (2, -1), (3, 1), (4, -1), (5, 1)], 6);
        assert!(inv.equals_to(&expect, 6).unwrap());
        assert!(b.multiply(&inv).is_one_below(7).unwrap());
    }

    #[test]
    fn invert_rejects_zero_and_non_units() {
        assert_eq!(S::zero(5).invert(), Err(SeriesError::NonInvertible));
        let two = poly(&[(0, 2), (1, 1)], 4);
        assert_eq!(two.invert(), Err(SeriesError::NonInvertible));
        let r = two.convert(|c| BigRational::from_integer(c.clone()));
        let inv = r.invert().unwrap();
        assert_eq!(inv.coeff(0), BigRational::new(1.into(), 2.into()));
        assert_eq!(inv.coeff(1), BigRational::new((-1).into(), 4.into()));
    }

    #[test]
    fn dilate_and_u_operator() {
        let a = poly(&[(0, 1), (1, 1)], 5);
        let d = a.dilate(3);
        assert_eq!(d, poly(&[(0, 1), (3, 1)], 15));

        let q3 = poly(&[(3, 1)], 10);
        assert_eq!(q3.u_operator(3).unwrap(), poly(&[(1, 1)], 4));

        let p = poly(&[(0, 1), (1, 1), (2, 2), (3, 3), (4, 5)], 5);
        let u = p.u_operator(2).unwrap();
        assert_eq!(u, poly(&[(0, 1), (1, 2), (2, 5)], 3));
    }

    #[test]
    fn u_operator_rejects_fractional_exponents() {
        let s = S::monomial(Exponent::from_24ths(1), BigInt::one(), 4);
        assert_eq!(s.u_operator(3), Err(SeriesError::NonIntegral(3)));
        let prog = Progression::new(2, 1).unwrap();
        assert!(s.extract_progression(prog).is_err());
    }

    #[test]
    fn extract_identity_progression() {
        let a = poly(&[(0, 1), (1, 1), (2, 1)], 3);
        let p = Progression::new(1, 0).unwrap();
        assert_eq!(a.extract_progression(p).unwrap(), a);
        assert!(Progression::new(0, 0).is_err());
        assert!(Progression::new(3, 3).is_err());
    }

    #[test]
    fn reduce_mod_cases() {
        assert!(poly(&[(1, 24)], 3).reduce_mod(12).unwrap().is_zero());
        assert_eq!(poly(&[(0, 5), (1, 7)], 3).reduce_mod(3).unwrap(), poly(&[(0, 2), (1, 1)], 3));
        assert_eq!(poly(&[(0, -1)], 3).reduce_mod(4).unwrap(), poly(&[(0, 3)], 3));
        let half = QSeries::from_terms([(0, BigRational::new(1.into(), 2.into()))], 2);
        assert_eq!(half.reduce_mod(3), Err(SeriesError::RationalModulus(3)));
    }

    #[test]
    fn e6_is_one_mod_8() {
        let e6: S = eisenstein(-504, 5, 200);
        assert!(e6.reduce_mod(8).unwrap().is_identity());
        assert_eq!(e6.coeff(1), BigInt::from(-504));
        assert_eq!(e6.coeff(2), BigInt::from(-504 * 33));
    }

    #[test]
    fn equals_to_guards_precision() {
        let a = poly(&[(0, 1)], 5);
        assert!(a.equals_to(&a, 5).unwrap());
        assert!(matches!(a.equals_to(&a, 6), Err(SeriesError::PrecisionUnderflow { .. })));
        let f1: S = euler_product(1, 1, 30);
        assert!(f1.multiply(&f1.invert().unwrap()).is_one_below(30).unwrap());
    }

    #[test]
    fn fractional_grid_multiplication() {
        // q^{1/24} (1 - q) * q^{2/24} = q^{3/24} - q^{27/24}
        let a = S::from_grid_terms(
            [(Exponent::from_24ths(1), BigInt::one()), (Exponent::from_24ths(25), -BigInt::one())],
            Exponent::from_24ths(24 * 5 + 1),
        );
        let b = S::monomial(Exponent::from_24ths(2), BigInt::one(), 10);
        let c = a.multiply(&b);
        assert_eq!(c.coeff_at(Exponent::from_24ths(3)), BigInt::one());
        assert_eq!(c.coeff_at(Exponent::from_24ths(27)), -BigInt::one());
        assert_eq!(c.nnz(), 2);
    }

    #[test]
    fn negate_q_flips_odd_terms() {
        let a = poly(&[(0, 1), (1, 2), (2, 3)], 3);
        assert_eq!(a.negate_q().unwrap(), poly(&[(0, 1), (1, -2), (2, 3)], 3));
    }

    #[test]
    fn exponent_display() {
        assert_eq!(Exponent::integer(3).to_string(), "3");
        assert_eq!(Exponent::from_24ths(3).to_string(), "1/8");
        assert_eq!(Exponent::from_24ths(-26).to_string(), "-13/12");
        assert_eq!(Exponent::from_24ths(25).ceil(), 2);
    }

    #[test]
    fn display_is_readable() {
        let a = poly(&[(0, 1), (1, -1), (2, 3)], 4);
        assert_eq!(a.to_string(), "1 - q^1 + 3*q^2 + O(q^4)");
    }
}
