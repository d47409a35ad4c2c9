//! The eta transformation law and the action of conjugated Atkin-Lehner
//! matrices on eta quotients.
//!
//! Roots of unity are tracked exactly as `e^{2 pi i k / 48}`; the grid is 48
//! rather than 24 because `eta(tau + 1/2)` contributes `e^{pi i / 24}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{extended_gcd, pow3};
use crate::eta::{EtaQuotient, EtaSum};
use crate::matrix::{IntMatrix, Mat2, RationalMatrix};

pub const UNITY_GRID: i64 = 48;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("undefined Dedekind sum s({d}, {c})")]
    UndefinedDedekind { d: BigInt, c: BigInt },
    #[error("matrix {0} is not in SL2(Z) with normalized bottom row")]
    NotSl2(String),
    #[error("determinant of {0} is not positive")]
    DetNonPositive(String),
    #[error("unsupported cusp shift {0} (only 0 and 1/2 mod 1)")]
    UnsupportedShift(BigRational),
    #[error("eta argument rewrites to non-integral dilation {0}")]
    NonIntegralArgument(BigRational),
    #[error("weight mismatch: residual automorphy power {0}")]
    WeightMismatch(Ratio<i64>),
    #[error("multiplier residue: {0}")]
    MultiplierResidue(String),
    #[error("entry too large for direct summation: {0}")]
    Overflow(BigInt),
}

/// `e^{2 pi i k / 48} * scalar`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multiplier {
    unity: i64,
    scalar: BigRational,
}

impl Multiplier {
    pub fn new(unity_exponent: i64, scalar: BigRational) -> Self {
        Multiplier {
            unity: unity_exponent.rem_euclid(UNITY_GRID),
            scalar,
        }
    }

    pub fn one() -> Self {
        Self::new(0, BigRational::one())
    }

    pub fn unity(k: i64) -> Self {
        Self::new(k, BigRational::one())
    }

    pub fn real(x: BigRational) -> Self {
        if x.is_negative() {
            Self::new(24, -x)
        } else {
            Self::new(0, x)
        }
    }

    /// Canonical exponent in `[0, 48)`.
    pub fn unity_exponent(&self) -> i64 {
        self.unity
    }

    pub fn scalar(&self) -> &BigRational {
        &self.scalar
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.unity + other.unity, &self.scalar * &other.scalar)
    }

    pub fn pow(&self, k: i64) -> Self {
        let s = if k >= 0 {
            num_traits::pow(self.scalar.clone(), k as usize)
        } else {
            num_traits::pow(self.scalar.recip(), (-k) as usize)
        };
        Self::new(self.unity * k, s)
    }

    pub fn is_real(&self) -> bool {
        self.unity % 24 == 0
    }

    pub fn real_value(&self) -> Option<BigRational> {
        match self.unity {
            0 => Some(self.scalar.clone()),
            24 => Some(-self.scalar.clone()),
            _ => None,
        }
    }

    /// `(re, im)` in floating point.
    pub fn to_f64(&self) -> (f64, f64) {
        let s = self.scalar.to_f64().unwrap_or(f64::NAN);
        let t = 2.0 * std::f64::consts::PI * self.unity as f64 / UNITY_GRID as f64;
        (s * t.cos(), s * t.sin())
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.real_value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "e^(2 pi i {}/48) * {}", self.unity, self.scalar),
        }
    }
}

impl Serialize for Multiplier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Multiplier", 2)?;
        st.serialize_field("unity_exponent", &format!("{}/48", self.unity))?;
        st.serialize_field("scalar", &self.scalar.to_string())?;
        st.end()
    }
}

/// The factor `(scale * (-i (c tau + d)))^{power}` with `(c, d)` primitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphy {
    pub power: Ratio<i64>,
    pub c: BigInt,
    pub d: BigInt,
    pub scale: BigRational,
}

impl Automorphy {
    fn trivial() -> Self {
        Automorphy {
            power: Ratio::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
            scale: BigRational::one(),
        }
    }
}

/// `eta(delta * gamma tau) = multiplier * automorphy * result(tau)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformResult {
    pub multiplier: Multiplier,
    pub automorphy: Automorphy,
    pub result: EtaQuotient,
}

impl TransformResult {
    pub fn automorphy_power(&self) -> Ratio<i64> {
        self.automorphy.power
    }
}

fn small(x: &BigInt) -> Result<i64, TransformError> {
    x.to_i64().ok_or_else(|| TransformError::Overflow(x.clone()))
}

/// `s(d, c) = sum_{r=1}^{c-1} ((r/c)) ((d r / c))` by direct summation.
pub fn dedekind_sum(d: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<BigRational, TransformError> {
    let (d, c) = (d.into(), c.into());
    if !c.is_positive() || !d.gcd(&c).is_one() {
        return Err(TransformError::UndefinedDedekind { d, c });
    }
    let ci = small(&c)? as i128;
    let di = d.mod_floor(&c).to_i128().expect("reduced below c");
    // ((r/c)) ((dr/c)) = (2r - c)(2(dr mod c) - c) / (4c^2) for c coprime to r.
    let mut acc: i128 = 0;
    for r in 1..ci {
        acc += (2 * r - ci) * (2 * ((di * r) % ci) - ci);
    }
    Ok(BigRational::new(acc.into(), (4 * ci * ci).into()))
}

/// `epsilon(a, b, c, d)` with `eta(M tau) = epsilon (-i (c tau + d))^{1/2} eta(tau)`
/// for `c > 0`, and `eta(tau + b) = epsilon eta(tau)` for `c = 0`.
pub fn eta_epsilon(
    a: impl Into<BigInt>,
    b: impl Into<BigInt>,
    c: impl Into<BigInt>,
    d: impl Into<BigInt>,
) -> Result<Multiplier, TransformError> {
    let m = Mat2::new(a.into(), b.into(), c.into(), d.into());
    if !m.is_sl2() || m.c.is_negative() || (m.c.is_zero() && !m.d.is_one()) {
        return Err(TransformError::NotSl2(m.to_string()));
    }
    if m.c.is_zero() {
        return Ok(Multiplier::unity(2 * small(&m.b.mod_floor(&BigInt::from(24)))?));
    }
    // paired with (-i (c tau + d))^{1/2}, which already carries e^{-pi i / 4}
    let x = BigRational::new(&m.a + &m.d, BigInt::from(12) * &m.c) - dedekind_sum(m.d.clone(), m.c.clone())?;
    // e^{pi i x} = e^{2 pi i (24 x) / 48}
    let k = x * BigRational::from_integer(24.into());
    if !k.is_integer() {
        return Err(TransformError::MultiplierResidue(format!("epsilon exponent {k}/48")));
    }
    Ok(Multiplier::unity(small(&k.to_integer().mod_floor(&BigInt::from(UNITY_GRID)))?))
}

/// `M = S T` with `S` in SL2(Z) and `T = [g, B x + D y; 0, det/g]`, where
/// `A x + C y = g = gcd(A, C)` and `|y|` is minimal.
pub fn sl2_factor(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix), TransformError> {
    sl2_factor_shifted(m, 0)
}

/// As [`sl2_factor`], moving `t` steps along the Bézout solution line.
pub fn sl2_factor_shifted(m: &IntMatrix, t: i64) -> Result<(IntMatrix, IntMatrix), TransformError> {
    let det = m.det();
    if !det.is_positive() {
        return Err(TransformError::DetNonPositive(m.to_string()));
    }
    let (g, x0, y0) = extended_gcd(&m.a, &m.c);
    let (ag, cg) = (&m.a / &g, &m.c / &g);
    let k = if ag.is_zero() {
        // x is free; minimise |x| along x0 + cg k
        nearest_step(&x0, &cg, false)
    } else {
        nearest_step(&y0, &ag, true)
    } + BigInt::from(t);
    let x = &x0 + &cg * &k;
    let y = &y0 - &ag * &k;
    let s = Mat2::new(ag.clone(), -&y, cg.clone(), x.clone());
    let tm = Mat2::new(g.clone(), &m.b * &x + &m.d * &y, BigInt::zero(), &det / &g);
    debug_assert!(s.is_sl2());
    debug_assert_eq!(&s * &tm, *m);
    Ok((s, tm))
}

/// The integer `k` minimising `|v - step k|` (or `|v + step k|` when
/// `subtract` is false), ties toward the positive result.
fn nearest_step(v: &BigInt, step: &BigInt, subtract: bool) -> BigInt {
    let step = if subtract { step.clone() } else { -step };
    let lo = v.div_floor(&step);
    let best = [lo.clone(), &lo + 1u32]
        .into_iter()
        .min_by(|p, q| {
            let rp = v - &step * p;
            let rq = v - &step * q;
            rp.abs().cmp(&rq.abs()).then(rq.cmp(&rp))
        })
        .expect("two candidates");
    best
}

/// `eta(delta gamma tau)` rewritten as a multiplier, an automorphy factor and
/// an eta quotient in `tau`.
pub fn eta_at_matrix(delta: u64, gamma: &RationalMatrix) -> Result<TransformResult, TransformError> {
    eta_at_matrix_shifted(delta, gamma, 0)
}

/// As [`eta_at_matrix`] with an alternate Bézout pair in the factorization.
pub fn eta_at_matrix_shifted(delta: u64, gamma: &RationalMatrix, t: i64) -> Result<TransformResult, TransformError> {
    let scaled = gamma.scale_top(&BigRational::from_integer(delta.into()));
    let (m, _) = scaled.to_primitive();
    let m = m.normalized();
    let (s, tri) = sl2_factor_shifted(&m, t)?;

    // w = (g tau + h) / e
    let lambda = BigRational::new(tri.a.clone(), tri.d.clone());
    let mu = BigRational::new(tri.b.clone(), tri.d.clone());
    if !lambda.is_integer() {
        return Err(TransformError::NonIntegralArgument(lambda));
    }
    let lam = lambda
        .to_integer()
        .to_u64()
        .ok_or_else(|| TransformError::NonIntegralArgument(lambda.clone()))?;

    let (mut multiplier, automorphy) = if s.c.is_zero() {
        // S = ±[1, b; 0, 1] acts as the translation w -> w + b/d
        let shift = &s.b * &s.d;
        (Multiplier::unity(2 * small(&shift.mod_floor(&BigInt::from(24)))?), Automorphy::trivial())
    } else {
        let eps = eta_epsilon(s.a.clone(), s.b.clone(), s.c.clone(), s.d.clone())?;
        let g = m.c.gcd(&m.d);
        let aut = Automorphy {
            power: Ratio::new(1, 2),
            c: &m.c / &g,
            d: &m.d / &g,
            scale: BigRational::new(g, tri.d.clone()),
        };
        (eps, aut)
    };

    let frac = &mu - mu.floor();
    let result = if frac.is_zero() {
        // eta(x + k) = e^{2 pi i 2k / 48} eta(x)
        let k = mu.to_integer().mod_floor(&BigInt::from(24));
        multiplier = multiplier.mul(&Multiplier::unity(2 * small(&k)?));
        EtaQuotient::from_exponents([(lam, 1)])
    } else if frac == BigRational::new(1.into(), 2.into()) {
        // eta(x + m + 1/2) = e^{2 pi i (2m + 1) / 48} eta(2x)^3 / (eta(x) eta(4x))
        let k = mu.floor().to_integer().mod_floor(&BigInt::from(24));
        multiplier = multiplier.mul(&Multiplier::unity(2 * small(&k)? + 1));
        EtaQuotient::from_exponents([(lam, -1), (2 * lam, 3), (4 * lam, -1)])
    } else {
        return Err(TransformError::UnsupportedShift(frac));
    };

    Ok(TransformResult {
        multiplier,
        automorphy,
        result,
    })
}

/// `P(gamma tau) = constant * Q(tau)` for a weight-zero eta quotient `P`.
pub fn quotient_transform(p: &EtaQuotient, gamma: &RationalMatrix) -> Result<(Multiplier, EtaQuotient), TransformError> {
    quotient_transform_shifted(p, gamma, 0)
}

pub fn quotient_transform_shifted(
    p: &EtaQuotient,
    gamma: &RationalMatrix,
    t: i64,
) -> Result<(Multiplier, EtaQuotient), TransformError> {
    if !p.extra().numerator().is_zero() {
        return Err(TransformError::MultiplierResidue(format!(
            "q-prefactor {} is not an eta quotient",
            p.extra()
        )));
    }
    let mut unity = Multiplier::one();
    let mut result = EtaQuotient::identity();
    let mut power = Ratio::<i64>::zero();
    // product of scale^{r} over the half-power factors; its square root is the scalar
    let mut scale_sq = BigRational::one();
    let mut base: Option<(BigInt, BigInt)> = None;
    for (&delta, &r) in p.exponents() {
        let tr = eta_at_matrix_shifted(delta, gamma, t)?;
        unity = unity.mul(&tr.multiplier.pow(r));
        result = result.mul(&tr.result.pow(r));
        let a = &tr.automorphy;
        if !a.power.is_zero() {
            let row = (a.c.clone(), a.d.clone());
            match &base {
                Some(b) if *b != row => {
                    return Err(TransformError::MultiplierResidue(format!(
                        "automorphy rows ({}, {}) and ({}, {}) differ",
                        b.0, b.1, row.0, row.1
                    )))
                }
                _ => base = Some(row),
            }
            power += a.power * r;
            scale_sq *= pow_signed(&a.scale, r);
        }
    }
    if !power.is_zero() {
        return Err(TransformError::WeightMismatch(power));
    }
    let scalar = rational_sqrt(&scale_sq)
        .ok_or_else(|| TransformError::MultiplierResidue(format!("scale {scale_sq} is not a square")))?;
    let constant = unity.mul(&Multiplier::new(0, scalar));
    if !constant.is_real() {
        return Err(TransformError::MultiplierResidue(format!(
            "aggregate unity exponent {}/48 is not real",
            constant.unity_exponent()
        )));
    }
    let result = result.at_level(p.level()).unwrap_or(result);
    Ok((constant, result))
}

fn pow_signed(x: &BigRational, r: i64) -> BigRational {
    if r >= 0 {
        num_traits::pow(x.clone(), r as usize)
    } else {
        num_traits::pow(x.recip(), (-r) as usize)
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

/// Every summand `c * prefactor * term` of `sum`, transformed by `gamma`.
/// Returned coefficients absorb the (real) constants.
pub fn transform_sum(sum: &EtaSum, gamma: &RationalMatrix) -> Result<Vec<(BigRational, EtaQuotient)>, TransformError> {
    sum.summands()
        .into_iter()
        .map(|(c, q)| {
            let (k, r) = quotient_transform(&q, gamma)?;
            let v = k.real_value().expect("quotient_transform asserts reality");
            Ok((c * v, r))
        })
        .collect()
}

/// The constant `lambda` with `transformed = lambda * target`, matching
/// summands by their exponent maps.
pub fn match_summands(transformed: &[(BigRational, EtaQuotient)], target: &EtaSum) -> Option<BigRational> {
    let collect = |items: &[(BigRational, EtaQuotient)]| {
        let mut map: BTreeMap<Vec<(u64, i64)>, BigRational> = BTreeMap::new();
        for (c, q) in items {
            let key: Vec<(u64, i64)> = q.exponents().iter().map(|(&d, &r)| (d, r)).collect();
            *map.entry(key).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        map
    };
    let lhs = collect(transformed);
    let rhs = collect(&target.summands());
    if lhs.len() != rhs.len() || lhs.is_empty() {
        return None;
    }
    let mut lambda: Option<BigRational> = None;
    for (key, c) in &lhs {
        let ratio = c / rhs.get(key)?;
        match &lambda {
            Some(l) if *l != ratio => return None,
            _ => lambda = Some(ratio),
        }
    }
    lambda
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `nu = [1, 1/2; 0, 1]`, the map `q -> -q`.
pub fn nu() -> RationalMatrix {
    Mat2::new(rat(1, 1), rat(1, 2), rat(0, 1), rat(1, 1))
}

/// Atkin-Lehner matrix with `Q = 4` at level `12 * 3^{2 alpha + 1}`.
pub fn atkin_lehner_family(alpha: u32) -> RationalMatrix {
    let k = pow3(2 * alpha + 1) as i64;
    RationalMatrix::from_ints(4, -1, 12 * k, 1 - 3 * k)
}

/// `gamma` with `nu W nu = 2 gamma`.
pub fn gamma_family(alpha: u32) -> RationalMatrix {
    let k = pow3(2 * alpha + 1) as i64;
    Mat2::new(
        rat(2 + 3 * k, 1),
        rat(3 + 3 * k, 4),
        rat(6 * k, 1),
        rat(1 + 3 * k, 2),
    )
}

/// Atkin-Lehner matrix with `Q = 4` at level 36.
pub fn atkin_lehner_internal() -> RationalMatrix {
    RationalMatrix::from_ints(28, 3, 36, 4)
}

pub fn gamma_internal() -> RationalMatrix {
    let g = &(&nu() * &atkin_lehner_internal()) * &nu();
    assert_eq!(g, RationalMatrix::from_ints(46, 28, 36, 22));
    g
}
