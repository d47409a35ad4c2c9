//! The four restricted partition functions and their generating functions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::eta::EtaQuotient;
use crate::IntSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    /// Partitions with even parts distinct.
    Ped,
    /// Partitions with odd parts distinct.
    Pod,
    /// Overpartitions into odd parts.
    PoBar,
    /// Overpartitions.
    PBar,
}

impl PartitionKind {
    pub const ALL: [PartitionKind; 4] = [
        PartitionKind::Ped,
        PartitionKind::Pod,
        PartitionKind::PoBar,
        PartitionKind::PBar,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PartitionKind::Ped => "ped",
            PartitionKind::Pod => "pod",
            PartitionKind::PoBar => "po_bar",
            PartitionKind::PBar => "p_bar",
        }
    }

    /// Exponents of the Euler product `prod f_r^{e_r}`.
    pub fn euler_exponents(self) -> &'static [(u64, i64)] {
        match self {
            PartitionKind::Ped => &[(1, -1), (4, 1)],
            PartitionKind::Pod => &[(1, -1), (2, 1), (4, -1)],
            PartitionKind::PoBar => &[(1, -2), (2, 3), (4, -1)],
            PartitionKind::PBar => &[(1, -2), (2, 1)],
        }
    }

    /// The generating function `sum a(n) q^n` as an Euler product.
    pub fn gen_fn(self) -> EtaQuotient {
        EtaQuotient::f_product(self.euler_exponents().iter().copied())
    }
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PartitionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ped" => Ok(PartitionKind::Ped),
            "pod" => Ok(PartitionKind::Pod),
            "po_bar" | "pobar" => Ok(PartitionKind::PoBar),
            "p_bar" | "pbar" => Ok(PartitionKind::PBar),
            _ => Err(format!("unknown partition kind '{s}' (ped, pod, po_bar, p_bar)")),
        }
    }
}

/// `sum_{n < precision} a(n) q^n`.
pub fn partition_series(kind: PartitionKind, precision: i64) -> IntSeries {
    kind.gen_fn().expand::<BigInt>(precision)
}

/// Direct enumeration: walks every partition of `n` by descending part size.
pub fn brute_force_count(kind: PartitionKind, n: u64) -> BigInt {
    fn walk(kind: PartitionKind, rest: u64, max_part: u64) -> BigInt {
        if rest == 0 {
            return BigInt::one();
        }
        let mut total = BigInt::zero();
        for part in (1..=max_part.min(rest)).rev() {
            let max_mult = match kind {
                PartitionKind::Ped if part % 2 == 0 => 1,
                PartitionKind::Pod if part % 2 == 1 => 1,
                PartitionKind::PoBar if part % 2 == 0 => 0,
                _ => rest / part,
            };
            // an overlined copy may mark the first occurrence of each size
            let weight = match kind {
                PartitionKind::PoBar | PartitionKind::PBar => 2u32,
                _ => 1,
            };
            for m in 1..=max_mult.min(rest / part) {
                total += walk(kind, rest - m * part, part - 1) * weight;
            }
        }
        total
    }
    walk(kind, n, n)
}
