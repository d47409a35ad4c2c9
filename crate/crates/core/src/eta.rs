//! Symbolic eta quotients `q^k prod eta(delta tau)^{r_delta}` at a level `N`.
//!
//! Besides expansion to q-series this module carries the classical
//! modularity tooling: Newman's conditions, the Ligozat order of vanishing
//! at the cusps of `Gamma_0(N)`, cusp enumeration and Sturm bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{divisors, factorize, gcd, totient};
use crate::scalar::Coefficient;
use crate::series::{Exponent, QSeries, SeriesError, GRID};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EtaError {
    #[error("eta argument {delta} does not divide level {level}")]
    DeltaNotDividing { delta: u64, level: u64 },
    #[error("level must be positive")]
    ZeroLevel,
    #[error("cusp [{a}/{c}] is not a cusp of Gamma_0({level})")]
    BadCusp { a: i64, c: u64, level: u64 },
    #[error("Sturm bound needs even weight >= 2, got {0}")]
    BadWeight(u64),
    #[error("cannot parse eta quotient: {0}")]
    Parse(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `q^{extra} prod_{delta | N} eta(delta tau)^{r_delta}`.
///
/// `extra` lives on the 1/24 grid so that plain Euler products
/// `prod f_delta^{r_delta}` are representable too (see [`EtaQuotient::f_product`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    level: u64,
    exponents: BTreeMap<u64, i64>,
    extra: Exponent,
}

impl EtaQuotient {
    pub fn new<I>(level: u64, exponents: I) -> Result<Self, EtaError>
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        if level == 0 {
            return Err(EtaError::ZeroLevel);
        }
        let mut map = BTreeMap::new();
        for (delta, r) in exponents {
            if delta == 0 || level % delta != 0 {
                return Err(EtaError::DeltaNotDividing { delta, level });
            }
            *map.entry(delta).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        Ok(EtaQuotient {
            level,
            exponents: map,
            extra: Exponent::default(),
        })
    }

    /// Level defaults to the lcm of the arguments.
    pub fn from_exponents<I>(exponents: I) -> Self
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        let pairs: Vec<(u64, i64)> = exponents.into_iter().collect();
        let level = pairs.iter().filter(|p| p.1 != 0).fold(1u64, |l, &(d, _)| l.lcm(&d));
        Self::new(level, pairs).expect("lcm level always admits its divisors")
    }

    /// The Euler product `prod f_delta^{r_delta}` (no q-power), written as an
    /// eta quotient times the compensating `q^{-sum delta r / 24}`.
    pub fn f_product<I>(exponents: I) -> Self
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        let mut e = Self::from_exponents(exponents);
        e.extra = Exponent::from_24ths(-e.eta_shift().numerator());
        e
    }

    pub fn identity() -> Self {
        Self::from_exponents([])
    }

    /// `Delta = eta(tau)^24`.
    pub fn delta() -> Self {
        Self::from_exponents([(1, 24)])
    }

    /// `phi(q) = f_2^5 / (f_1^2 f_4^2)`, the theta series `sum q^{n^2}`.
    pub fn theta_phi() -> Self {
        Self::from_exponents([(1, -2), (2, 5), (4, -2)])
    }

    pub fn with_extra(mut self, extra: Exponent) -> Self {
        self.extra = extra;
        self
    }

    /// Re-declares the level; every argument must divide it.
    pub fn at_level(&self, level: u64) -> Result<Self, EtaError> {
        let mut e = Self::new(level, self.exponents.iter().map(|(&d, &r)| (d, r)))?;
        e.extra = self.extra;
        Ok(e)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, delta: u64) -> i64 {
        self.exponents.get(&delta).copied().unwrap_or(0)
    }

    pub fn extra(&self) -> Exponent {
        self.extra
    }

    /// `(1/2) sum r_delta`.
    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.exponents.values().sum(), 2)
    }

    /// The automatic `q^{sum delta r / 24}`.
    pub fn eta_shift(&self) -> Exponent {
        Exponent::from_24ths(self.exponents.iter().map(|(&d, &r)| d as i64 * r).sum())
    }

    /// Leading exponent of the expansion.
    pub fn order_at_infinity(&self) -> Exponent {
        Exponent::from_24ths(self.eta_shift().numerator() + self.extra.numerator())
    }

    /// Same exponent map, ignoring level and q-prefactor.
    pub fn same_eta_part(&self, other: &Self) -> bool {
        self.exponents == other.exponents
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exps = self.exponents.clone();
        for (&d, &r) in &other.exponents {
            *exps.entry(d).or_insert(0) += r;
        }
        exps.retain(|_, r| *r != 0);
        EtaQuotient {
            level: self.level.lcm(&other.level),
            exponents: exps,
            extra: Exponent::from_24ths(self.extra.numerator() + other.extra.numerator()),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let mut exps: BTreeMap<u64, i64> = self.exponents.iter().map(|(&d, &r)| (d, r * k)).collect();
        exps.retain(|_, r| *r != 0);
        EtaQuotient {
            level: self.level,
            exponents: exps,
            extra: Exponent::from_24ths(self.extra.numerator() * k),
        }
    }

    /// `tau -> d tau`.
    pub fn dilate(&self, d: u64) -> Self {
        EtaQuotient {
            level: self.level * d,
            exponents: self.exponents.iter().map(|(&delta, &r)| (delta * d, r)).collect(),
            extra: Exponent::from_24ths(self.extra.numerator() * d as i64),
        }
    }

    /// q-expansion truncated below `precision`.
    pub fn expand<T: Coefficient>(&self, precision: impl Into<Exponent>) -> QSeries<T> {
        let factors: Vec<(u64, i64)> = self.exponents.iter().map(|(&d, &r)| (d, r)).collect();
        QSeries::monomial(self.order_at_infinity(), T::one(), precision).mul_euler_product(&factors)
    }

    /// Newman's four conditions at the declared level (prefactor ignored).
    pub fn newman_check(&self) -> NewmanReport {
        let n = self.level as i64;
        let sum_r: i64 = self.exponents.values().sum();
        let sum_dr: i64 = self.exponents.iter().map(|(&d, &r)| d as i64 * r).sum();
        let sum_codr: i64 = self.exponents.iter().map(|(&d, &r)| n / d as i64 * r).sum();
        NewmanReport {
            level: self.level,
            weight_zero: sum_r == 0,
            delta_sum_div_24: sum_dr.rem_euclid(24) == 0,
            codelta_sum_div_24: sum_codr.rem_euclid(24) == 0,
            product_is_square: self.product_is_square(),
        }
    }

    /// `prod delta^{r_delta}` is a rational square.
    fn product_is_square(&self) -> bool {
        let mut prime_exps: BTreeMap<u64, i64> = BTreeMap::new();
        for (&d, &r) in &self.exponents {
            for (p, k) in factorize(d) {
                *prime_exps.entry(p).or_insert(0) += k as i64 * r;
            }
        }
        prime_exps.values().all(|e| e % 2 == 0)
    }

    /// Ligozat: `(N/24) sum gcd(c, delta)^2 r_delta / (gcd(c, N/c) c delta)`.
    pub fn cusp_order(&self, cusp: &Cusp) -> Result<Ratio<i64>, EtaError> {
        if cusp.level != self.level || self.level % cusp.c != 0 {
            return Err(EtaError::BadCusp {
                a: cusp.a,
                c: cusp.c,
                level: self.level,
            });
        }
        let n = self.level as i64;
        let c = cusp.c as i64;
        let width = gcd(cusp.c, self.level / cusp.c) as i64;
        let mut total = Ratio::zero();
        for (&d, &r) in &self.exponents {
            let g = gcd(cusp.c, d) as i64;
            total += Ratio::new(g * g * r, width * c * d as i64);
        }
        Ok(total * Ratio::new(n, 24))
    }

    /// `(cusp, order)` for every cusp of `Gamma_0(N)`.
    pub fn cusp_orders(&self) -> Vec<(Cusp, Ratio<i64>)> {
        cusps(self.level)
            .into_iter()
            .map(|c| {
                let ord = self.cusp_order(&c).expect("cusps of own level");
                (c, ord)
            })
            .collect()
    }

    /// Holomorphic modular form on `Gamma_0(N)` with trivial character:
    /// positive even weight, Newman's congruence conditions with the
    /// character condition `(-1)^k prod delta^r` a square, and nonnegative
    /// order at every cusp.
    pub fn holomorphic_form_check(&self) -> HolomorphyReport {
        let newman = self.newman_check();
        let weight = self.weight();
        let k = weight.to_integer();
        let integral_even = weight.is_integer() && k > 0 && k % 2 == 0;
        let orders = self.cusp_orders();
        let min_order = orders.iter().map(|(_, o)| *o).min().unwrap_or_else(Ratio::zero);
        let holomorphic = integral_even
            && newman.delta_sum_div_24
            && newman.codelta_sum_div_24
            && newman.product_is_square
            && !min_order.is_negative();
        HolomorphyReport {
            weight,
            newman,
            min_cusp_order: min_order,
            holomorphic,
        }
    }

    /// Parses the CLI text form, e.g. `"q^-1 * 1^-8 2^4 3^8 6^-4 @ 6"`.
    pub fn parse(s: &str) -> Result<Self, EtaError> {
        s.parse()
    }
}

impl FromStr for EtaQuotient {
    type Err = EtaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| EtaError::Parse(format!("{m} in {s:?}"));
        let (extra, body) = match s.split_once('*') {
            Some((pre, rest)) => {
                let pre = pre.trim();
                let k = pre.strip_prefix("q^").ok_or_else(|| err("prefix must be q^k"))?;
                (parse_exponent(k.trim()).ok_or_else(|| err("bad q exponent"))?, rest)
            }
            None => (Exponent::default(), s),
        };
        let (factors, level) = match body.split_once('@') {
            Some((f, l)) => {
                let l: u64 = l.trim().parse().map_err(|_| err("bad level"))?;
                (f, Some(l))
            }
            None => (body, None),
        };
        let mut pairs = Vec::new();
        for tok in factors.split_whitespace() {
            let (d, r) = match tok.split_once('^') {
                Some((d, r)) => (d, r.parse::<i64>().map_err(|_| err("bad exponent"))?),
                None => (tok, 1),
            };
            let d: u64 = d.parse().map_err(|_| err("bad eta argument"))?;
            pairs.push((d, r));
        }
        let e = match level {
            Some(l) => EtaQuotient::new(l, pairs)?,
            None => EtaQuotient::from_exponents(pairs),
        };
        Ok(e.with_extra(extra))
    }
}

fn parse_exponent(s: &str) -> Option<Exponent> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d <= 0 || GRID % d != 0 {
                return None;
            }
            Some(Exponent::from_24ths(n * (GRID / d)))
        }
        None => s.parse::<i64>().ok().map(Exponent::integer),
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.extra != Exponent::default() {
            write!(f, "q^{} * ", self.extra)?;
        }
        for (&d, &r) in &self.exponents {
            write!(f, "{d}^{r} ")?;
        }
        write!(f, "@ {}", self.level)
    }
}

impl Serialize for EtaQuotient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewmanReport {
    pub level: u64,
    pub weight_zero: bool,
    pub delta_sum_div_24: bool,
    pub codelta_sum_div_24: bool,
    pub product_is_square: bool,
}

impl NewmanReport {
    pub fn holds(&self) -> bool {
        self.weight_zero && self.delta_sum_div_24 && self.codelta_sum_div_24 && self.product_is_square
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolomorphyReport {
    pub weight: Ratio<i64>,
    pub newman: NewmanReport,
    pub min_cusp_order: Ratio<i64>,
    pub holomorphic: bool,
}

/// Cusp `[a/c]_N` of `Gamma_0(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cusp {
    pub a: i64,
    pub c: u64,
    pub level: u64,
}

impl Cusp {
    pub fn new(a: i64, c: u64, level: u64) -> Result<Self, EtaError> {
        let bad = EtaError::BadCusp { a, c, level };
        if c == 0 || level == 0 || level % c != 0 || gcd(a.unsigned_abs(), c) != 1 {
            return Err(bad);
        }
        Ok(Cusp { a, c, level })
    }

    /// `gcd(c, N/c)`; the classes over `c` are indexed by units modulo it.
    pub fn class_modulus(&self) -> u64 {
        gcd(self.c, self.level / self.c)
    }

    pub fn is_infinity(&self) -> bool {
        self.c == self.level
    }

    pub fn is_zero(&self) -> bool {
        self.c == 1
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/{}]_{}", self.a, self.c, self.level)
    }
}

/// One representative per `Gamma_0(N)` cusp class: for each `c | N` and each
/// unit residue `u` modulo `gcd(c, N/c)`, the least `a >= 1` with
/// `a = u (mod gcd)` and `gcd(a, c) = 1`.
pub fn cusps(level: u64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for c in divisors(level) {
        let m = gcd(c, level / c);
        for u in 0..m {
            if gcd(u, m) != 1 {
                continue;
            }
            let mut a = if u == 0 { m } else { u };
            while gcd(a, c) != 1 {
                a += m;
            }
            out.push(Cusp {
                a: a as i64,
                c,
                level,
            });
        }
    }
    out
}

/// Number of cusps of `Gamma_0(N)`.
pub fn cusp_count(level: u64) -> u64 {
    divisors(level).into_iter().map(|c| totient(gcd(c, level / c))).sum()
}

/// `[SL_2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(level: u64) -> u64 {
    factorize(level)
        .into_iter()
        .fold(level, |acc, (p, _)| acc / p * (p + 1))
}

/// Sturm bound `floor(k [SL_2(Z) : Gamma_0(N)] / 12)` for trivial character.
pub fn sturm_bound(weight: u64, level: u64) -> Result<u64, EtaError> {
    if weight < 2 || weight % 2 != 0 {
        return Err(EtaError::BadWeight(weight));
    }
    if level == 0 {
        return Err(EtaError::ZeroLevel);
    }
    Ok(weight * gamma0_index(level) / 12)
}

/// `coefficient * q-product` summand list sharing a common eta prefactor.
///
/// The internal-mode modular functions are sums of eta quotients; family
/// mode uses a single summand with coefficient one.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaSum {
    pub prefactor: EtaQuotient,
    pub terms: Vec<(BigRational, EtaQuotient)>,
}

impl EtaSum {
    pub fn single(prefactor: EtaQuotient, term: EtaQuotient) -> Self {
        EtaSum {
            prefactor,
            terms: vec![(BigRational::one(), term)],
        }
    }

    pub fn level(&self) -> u64 {
        self.terms
            .iter()
            .fold(self.prefactor.level(), |l, (_, t)| l.lcm(&t.level()))
    }

    /// Each summand multiplied out with the prefactor, at the common level.
    pub fn summands(&self) -> Vec<(BigRational, EtaQuotient)> {
        let level = self.level();
        self.terms
            .iter()
            .map(|(c, t)| {
                let q = self
                    .prefactor
                    .mul(t)
                    .at_level(level)
                    .expect("summand arguments divide the common level");
                (c.clone(), q)
            })
            .collect()
    }

    /// Weights of all summands (all equal for a well-formed sum).
    pub fn weights(&self) -> Vec<Ratio<i64>> {
        self.summands().iter().map(|(_, q)| q.weight()).collect()
    }

    pub fn expand<T: Coefficient>(&self, precision: impl Into<Exponent>) -> Result<QSeries<T>, EtaError> {
        let precision = precision.into();
        let mut acc = QSeries::zero(precision);
        for (c, q) in self.summands() {
            let coeff = T::from_rational(&c).ok_or(SeriesError::InvalidArgument(
                "summand coefficient not representable in coefficient ring",
            ))?;
            acc = &acc + &q.expand::<T>(precision).scale(&coeff);
        }
        Ok(acc)
    }
}

impl fmt::Display for EtaSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) * [", self.prefactor)?;
        for (i, (c, t)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*({t})")?;
        }
        f.write_str("]")
    }
}

/// Sum of the cusp orders over all classes.
pub fn total_cusp_order(e: &EtaQuotient) -> Ratio<i64> {
    e.cusp_orders().into_iter().map(|(_, o)| o).sum()
}

/// Integer big-rational helper for EtaSum coefficients.
pub fn coeff(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma0_6_lhs() -> EtaQuotient {
        EtaQuotient::new(6, [(1, -8), (2, 4), (3, 8), (6, -4)]).unwrap()
    }

    #[test]
    fn level_must_be_divisible() {
        assert_eq!(
            EtaQuotient::new(6, [(4, 1)]),
            Err(EtaError::DeltaNotDividing { delta: 4, level: 6 })
        );
        assert_eq!(EtaQuotient::new(0, []), Err(EtaError::ZeroLevel));
    }

    #[test]
    fn weights() {
        assert_eq!(EtaQuotient::delta().weight(), Ratio::from_integer(12));
        assert_eq!(EtaQuotient::theta_phi().weight(), Ratio::new(1, 2));
        assert_eq!(gamma0_6_lhs().weight(), Ratio::zero());
    }

    #[test]
    fn newman_examples() {
        assert!(gamma0_6_lhs().newman_check().holds());
        let eta = EtaQuotient::new(1, [(1, 1)]).unwrap();
        let rep = eta.newman_check();
        assert!(!rep.weight_zero);
        assert!(!rep.holds());
    }

    #[test]
    fn cusp_lists() {
        let c6 = cusps(6);
        assert_eq!(c6.len(), 4);
        assert!(c6.iter().all(|c| c.a == 1));
        assert_eq!(cusps(1), vec![Cusp { a: 1, c: 1, level: 1 }]);
        let c36 = cusps(36);
        assert_eq!(c36.len(), 12);
        assert_eq!(c36.iter().filter(|c| c.c == 6).count(), 2);
        assert_eq!(cusp_count(36), 12);
        for c in &c36 {
            assert_eq!(gcd(c.a as u64, c.c), 1);
        }
    }

    #[test]
    fn ligozat_on_gamma0_6() {
        let e = gamma0_6_lhs();
        let at = |c: u64| e.cusp_order(&Cusp::new(1, c, 6).unwrap()).unwrap();
        assert_eq!(at(1), Ratio::from_integer(-1));
        assert_eq!(at(2), Ratio::zero());
        assert_eq!(at(3), Ratio::from_integer(1));
        assert_eq!(at(6), Ratio::zero());
        assert_eq!(total_cusp_order(&e), Ratio::zero());
        let empty = EtaQuotient::new(6, []).unwrap();
        assert!(empty.cusp_orders().iter().all(|(_, o)| o.is_zero()));
    }

    #[test]
    fn cusp_representative_does_not_change_order() {
        let e = EtaQuotient::new(36, [(1, -2), (2, 5), (3, 1), (4, -2), (6, -3), (12, 1)]).unwrap();
        for c in [6u64, 12, 3] {
            let reps: Vec<i64> = (1..40).filter(|a| gcd(*a as u64, c) == 1).collect();
            let orders: Vec<_> = reps
                .iter()
                .map(|&a| e.cusp_order(&Cusp::new(a, c, 36).unwrap()).unwrap())
                .collect();
            assert!(orders.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn sturm_bounds() {
        assert_eq!(sturm_bound(12, 6).unwrap(), 12);
        assert_eq!(sturm_bound(18, 36).unwrap(), 108);
        assert_eq!(sturm_bound(12, 1).unwrap(), 1);
        assert_eq!(sturm_bound(3, 4), Err(EtaError::BadWeight(3)));
    }

    #[test]
    fn parse_and_display() {
        let e: EtaQuotient = "1^-8 2^4 3^8 6^-4 @ 6".parse().unwrap();
        assert_eq!(e, gamma0_6_lhs());
        assert_eq!(e.to_string(), "1^-8 2^4 3^8 6^-4 @ 6");
        let p: EtaQuotient = "q^-1 * 1^-1 4 @ 4".parse().unwrap();
        assert_eq!(p.extra(), Exponent::integer(-1));
        assert_eq!(p.exponent(4), 1);
        let back: EtaQuotient = p.to_string().parse().unwrap();
        assert_eq!(back, p);
        let frac: EtaQuotient = "q^-1/8 * 1^-1 4^1".parse().unwrap();
        assert_eq!(frac.extra(), Exponent::from_24ths(-3));
        assert!("1^x @ 4".parse::<EtaQuotient>().is_err());
        assert!("4^1 @ 6".parse::<EtaQuotient>().is_err());
        assert!("z^1 * 1 @ 1".parse::<EtaQuotient>().is_err());
    }

    #[test]
    fn expand_eta_and_phi() {
        let eta = EtaQuotient::from_exponents([(1, 1)]);
        let s: QSeries<BigInt> = eta.expand(Exponent::from_24ths(73));
        let got: Vec<(i64, i64)> = s
            .terms()
            .map(|(e, c)| (e.numerator(), i64::try_from(c.clone()).unwrap()))
            .collect();
        assert_eq!(got, vec![(1, 1), (25, -1), (49, -1)]);

        let phi: QSeries<BigInt> = EtaQuotient::theta_phi().expand(10);
        let expect: Vec<BigInt> = [1, 2, 0, 0, 2, 0, 0, 0, 0, 2].iter().map(|&x| x.into()).collect();
        assert_eq!(phi.dense_prefix(10), expect);

        let one: QSeries<BigInt> = EtaQuotient::identity().expand(5);
        assert!(one.is_identity());
    }

    #[test]
    fn f_product_has_no_shift() {
        let ped = EtaQuotient::f_product([(1, -1), (4, 1)]);
        assert_eq!(ped.order_at_infinity(), Exponent::default());
        let s: QSeries<BigInt> = ped.expand(8);
        let expect: Vec<BigInt> = [1, 1, 2, 3, 4, 6, 9, 12].iter().map(|&x| x.into()).collect();
        assert_eq!(s.dense_prefix(8), expect);
    }

    #[test]
    fn holomorphy_of_delta_and_phi_ratio() {
        let d = EtaQuotient::delta().holomorphic_form_check();
        assert!(d.holomorphic);
        assert_eq!(d.min_cusp_order, Ratio::from_integer(1));
        let lhs = gamma0_6_lhs().holomorphic_form_check();
        assert!(!lhs.holomorphic);
    }
}
