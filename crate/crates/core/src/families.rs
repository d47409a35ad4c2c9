//! The modular functions `P` and `L = U_3^j(P)` attached to each partition
//! kind, in the infinite-family mode (level `12 * 3^{2 alpha + 1}`) and the
//! internal mode (level 36).

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::pow3;
use crate::eta::{coeff, EtaQuotient, EtaSum};
use crate::partitions::{partition_series, PartitionKind};
use crate::series::{Exponent, Progression, QSeries, SeriesError};
use crate::IntSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "alpha")]
pub enum Mode {
    Family(u32),
    Internal,
}

impl Mode {
    /// Number of `U_3` applications taking `P` to `L`.
    pub fn u_power(self) -> u32 {
        match self {
            Mode::Family(alpha) => 2 * alpha + 1,
            Mode::Internal => 1,
        }
    }

    pub fn level(self) -> u64 {
        match self {
            Mode::Family(alpha) => 12 * pow3(2 * alpha + 1),
            Mode::Internal => 36,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Family(a) => write!(f, "family(alpha={a})"),
            Mode::Internal => f.write_str("internal"),
        }
    }
}

/// A congruence `a(3^{2 alpha + 1} n + offset) = 0 (mod modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub kind: PartitionKind,
    pub alpha: u32,
    pub stride: u64,
    pub offset: u64,
    pub modulus: u64,
}

impl FamilySpec {
    pub fn new(kind: PartitionKind, alpha: u32) -> Self {
        assert!(alpha >= 1, "families start at alpha = 1");
        let s = pow3(2 * alpha);
        let (num, modulus) = match kind {
            PartitionKind::Ped => (17 * s - 1, 6),
            PartitionKind::Pod => (23 * s + 1, 3),
            PartitionKind::PoBar => (8 * s, 6),
            PartitionKind::PBar => (16 * s, 12),
        };
        assert_eq!(num % 8, 0, "offset must be integral");
        FamilySpec {
            kind,
            alpha,
            stride: 3 * s,
            offset: num / 8,
            modulus,
        }
    }

    /// The index `stride * n + offset`.
    pub fn index(&self, n: u64) -> u64 {
        self.stride * n + self.offset
    }
}

fn eta(pairs: &[(u64, i64)]) -> EtaQuotient {
    EtaQuotient::from_exponents(pairs.iter().copied())
}

fn scaled(k: u64, pairs: &[(u64, i64)]) -> Vec<(u64, i64)> {
    pairs.iter().map(|&(d, r)| (k * d, r)).collect()
}

/// The eta-quotient expression `P` (prefactor times bracketed summands).
pub fn build_p(kind: PartitionKind, mode: Mode) -> EtaSum {
    match mode {
        Mode::Family(alpha) => {
            let k = pow3(2 * alpha + 1);
            let level = 12 * k;
            let (outer, inner): (&[(u64, i64)], &[(u64, i64)]) = match kind {
                PartitionKind::Ped => (&[(6, 4), (1, -2), (3, -1), (12, -1)], &[(4, 1), (1, -1)]),
                PartitionKind::Pod => (
                    &[(2, 4), (4, 6), (1, -4), (3, -3), (6, -1), (12, -1)],
                    &[(2, 1), (1, -1), (4, -1)],
                ),
                PartitionKind::PoBar => (&[(6, 1), (12, 1), (1, -2)], &[(2, 3), (1, -2), (4, -1)]),
                PartitionKind::PBar => (
                    &[(2, 22), (12, 1), (1, -10), (3, -2), (4, -6), (6, -4)],
                    &[(4, 1), (2, -2)],
                ),
            };
            let prefactor = EtaQuotient::new(level, scaled(k, outer)).expect("divisors of the family level");
            let term = EtaQuotient::new(level, inner.iter().copied()).expect("divisors of the family level");
            EtaSum::single(prefactor, term)
        }
        Mode::Internal => match kind {
            PartitionKind::Ped => EtaSum {
                prefactor: eta(&[(9, 2), (12, 3), (3, -3), (36, -2)]),
                terms: vec![
                    (coeff(1), eta(&[(4, 1), (1, -1)])),
                    (coeff(1), eta(&[(2, 2), (3, 4), (4, 1), (1, -5), (6, -2)])),
                    (coeff(24), eta(&[(2, 3), (3, 3), (4, 1), (6, 3), (1, -10)])),
                ],
            },
            PartitionKind::Pod => EtaSum {
                prefactor: eta(&[(6, 4), (12, 5), (36, 2), (3, -1), (9, -4), (18, -5)]),
                terms: vec![
                    (coeff(1), eta(&[(2, 1), (1, -1), (4, -1)])),
                    (coeff(10), eta(&[(2, 1), (6, 24), (1, -7), (3, -6), (4, -7), (12, -6)])),
                    (coeff(16), eta(&[(2, 7), (3, 3), (6, 6), (12, 3), (1, -10), (4, -10)])),
                    (coeff(1), eta(&[(2, 13), (3, 12), (12, 12), (1, -13), (4, -13), (6, -12)])),
                ],
            },
            PartitionKind::PoBar => EtaSum {
                prefactor: eta(&[(6, 9), (9, 4), (36, 2), (3, -6), (12, -3), (18, -6)]),
                terms: vec![
                    (coeff(1), eta(&[(2, 3), (1, -2), (4, -1)])),
                    (coeff(-1), eta(&[(2, 5), (3, 4), (1, -6), (4, -1), (6, -2)])),
                    (coeff(-24), eta(&[(2, 6), (3, 3), (6, 3), (1, -11), (4, -1)])),
                ],
            },
            PartitionKind::PBar => EtaSum {
                prefactor: eta(&[(6, 19), (18, 1), (3, -6), (9, -6), (12, -5), (36, -2)]),
                terms: vec![
                    (coeff(1), eta(&[(4, 1), (2, -2)])),
                    (coeff(-1), eta(&[(4, 13), (6, 24), (2, -26), (12, -12)])),
                    (coeff(-128), eta(&[(4, 10), (6, 15), (2, -23), (12, -3)])),
                    (coeff(-640), eta(&[(4, 7), (6, 6), (12, 6), (2, -20)])),
                ],
            },
        },
    }
}

/// `L = U_3^j(P)` through `q^{precision - 1}`.
pub fn build_l(kind: PartitionKind, mode: Mode, precision: i64) -> Result<IntSeries, SeriesError> {
    let stride = pow3(mode.u_power());
    let p = build_p(kind, mode)
        .expand::<BigInt>(precision * stride as i64)
        .map_err(|e| match e {
            crate::EtaError::Series(s) => s,
            _ => SeriesError::InvalidArgument("P does not expand"),
        })?;
    let l = p.u_operator(stride)?;
    if l.precision() < Exponent::from(precision) {
        return Err(SeriesError::PrecisionUnderflow {
            needed: precision.into(),
            available: l.precision(),
        });
    }
    Ok(l.truncate(precision))
}

/// The Euler-product prefactor `prod f_r^{e_r}` and q-power of the displayed
/// closed form for `L`.
pub fn l_prefactor(kind: PartitionKind, mode: Mode) -> (Vec<(u64, i64)>, i64) {
    let f: &[(u64, i64)] = match (mode, kind) {
        (Mode::Family(_), PartitionKind::Ped) => &[(6, 4), (1, -2), (3, -1), (12, -1)],
        (Mode::Family(_), PartitionKind::Pod) => &[(2, 4), (4, 6), (1, -4), (3, -3), (6, -1), (12, -1)],
        (Mode::Family(_), PartitionKind::PoBar) => &[(6, 1), (12, 1), (1, -2)],
        (Mode::Family(_), PartitionKind::PBar) => &[(2, 22), (12, 1), (1, -10), (3, -2), (4, -6), (6, -4)],
        (Mode::Internal, PartitionKind::Ped) => &[(3, 2), (4, 3), (1, -3), (12, -2)],
        (Mode::Internal, PartitionKind::Pod) => &[(2, 4), (4, 5), (12, 2), (1, -1), (3, -4), (6, -5)],
        (Mode::Internal, PartitionKind::PoBar) => &[(2, 9), (3, 4), (12, 2), (1, -6), (4, -3), (6, -6)],
        (Mode::Internal, PartitionKind::PBar) => &[(2, 19), (6, 1), (1, -6), (3, -6), (4, -5), (12, -2)],
    };
    let shift = match (mode, kind) {
        (Mode::Family(_), _) => 1,
        (Mode::Internal, PartitionKind::Ped) | (Mode::Internal, PartitionKind::PoBar) => 0,
        (Mode::Internal, PartitionKind::Pod) => 1,
        // the eta prefactor of the internal P for overpartitions has order -3
        (Mode::Internal, PartitionKind::PBar) => -1,
    };
    (f.to_vec(), shift)
}

/// `sum_n a(m n + c) q^n` through `q^{precision - 1}`.
pub fn progression_series(kind: PartitionKind, modulus: u64, offset: u64, precision: i64) -> Result<IntSeries, SeriesError> {
    let base = partition_series(kind, modulus as i64 * precision + offset as i64);
    let (p, skip) = Progression::with_offset(modulus, offset)?;
    Ok(base.extract_progression(p)?.shift(Exponent::from(-(skip as i64))).truncate(precision))
}

/// The displayed product-times-progression formula for `L`, assembled from
/// partition numbers directly.
pub fn l_closed_form(kind: PartitionKind, mode: Mode, precision: i64) -> Result<IntSeries, SeriesError> {
    let (f, shift) = l_prefactor(kind, mode);
    let n = precision + 2;
    let sum = match mode {
        Mode::Family(alpha) => {
            let spec = FamilySpec::new(kind, alpha);
            let prog = progression_series(kind, spec.stride, spec.offset, n)?;
            if kind == PartitionKind::PBar {
                prog.dilate(2)
            } else {
                prog
            }
        }
        Mode::Internal => {
            let (r3, r27, sign) = match kind {
                PartitionKind::Ped => (1, 10, 1),
                PartitionKind::Pod => (2, 17, 1),
                PartitionKind::PoBar => (0, 0, -1),
                PartitionKind::PBar => (0, 0, -1),
            };
            let a = progression_series(kind, 3, r3, n)?;
            let b = progression_series(kind, 27, r27, n)?;
            let s = if sign > 0 { &a + &b } else { &a - &b };
            if kind == PartitionKind::PBar {
                s.dilate(2)
            } else {
                s
            }
        }
    };
    let prefactor = EtaQuotient::f_product(f).expand::<BigInt>(n);
    let out = prefactor.multiply(&sum).shift(Exponent::from(shift));
    if out.precision() < Exponent::from(precision) {
        return Err(SeriesError::PrecisionUnderflow {
            needed: precision.into(),
            available: out.precision(),
        });
    }
    Ok(out.truncate(precision))
}

/// `QSeries` wrapper for an Euler product expanded from `q^0`.
pub fn f_series(exponents: &[(u64, i64)], precision: i64) -> IntSeries {
    EtaQuotient::f_product(exponents.iter().copied()).expand::<BigInt>(precision)
}

/// `q^k * prod f_r^{e_r}`.
pub fn qf_series(k: i64, exponents: &[(u64, i64)], precision: i64) -> IntSeries {
    f_series(exponents, precision - k.min(0)).shift(Exponent::from(k)).truncate(precision)
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub type Series = QSeries<BigInt>;

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn offsets_are_integral() {
        for alpha in 1..=6 {
            for k in PartitionKind::ALL {
                let s = FamilySpec::new(k, alpha);
                assert!(s.offset < s.stride);
            }
        }
        let s = FamilySpec::new(PartitionKind::Pod, 1);
        assert_eq!((s.stride, s.offset, s.modulus), (27, 26, 3));
        assert_eq!(FamilySpec::new(PartitionKind::Ped, 1).offset, 19);
        assert_eq!(FamilySpec::new(PartitionKind::PBar, 1).index(0), 18);
    }

    #[test]
    fn progression_rewrites() {
        // 3^{2a}(3n+1) = 3^{2a+1} n + 3^{2a} and 3^{2a}(3n+2) = 3^{2a+1} n + 2 3^{2a}
        for alpha in 1..=4 {
            let s = pow3(2 * alpha);
            let po = FamilySpec::new(PartitionKind::PoBar, alpha);
            let pb = FamilySpec::new(PartitionKind::PBar, alpha);
            for n in 0..5 {
                assert_eq!(s * (3 * n + 1), po.index(n));
                assert_eq!(s * (3 * n + 2), pb.index(n));
            }
        }
    }

    #[test]
    fn p_functions_are_modular_functions() {
        for mode in [Mode::Family(1), Mode::Family(2), Mode::Family(3), Mode::Internal] {
            for k in PartitionKind::ALL {
                let p = build_p(k, mode);
                assert_eq!(p.level(), mode.level());
                for (_, q) in p.summands() {
                    assert_eq!(q.weight(), Ratio::from_integer(0));
                    assert!(q.newman_check().holds(), "{k} {mode}: {q}");
                }
            }
        }
    }

    #[test]
    fn l_matches_closed_form_family_alpha1() {
        for k in PartitionKind::ALL {
            let l = build_l(k, Mode::Family(1), 40).unwrap();
            let c = l_closed_form(k, Mode::Family(1), 40).unwrap();
            assert_eq!(l.first_difference(&c, 40).unwrap(), None, "{k}");
        }
    }

    #[test]
    fn l_matches_closed_form_internal() {
        for k in PartitionKind::ALL {
            let l = build_l(k, Mode::Internal, 60).unwrap();
            let c = l_closed_form(k, Mode::Internal, 60).unwrap();
            assert_eq!(l.first_difference(&c, 60).unwrap(), None, "{k}");
        }
    }
}
