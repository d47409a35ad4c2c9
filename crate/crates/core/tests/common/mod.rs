//! Independent oracles: floating-point eta evaluation and naive product
//! expansion. Nothing here calls into the series kernels.

#![allow(dead_code)]

use num_complex::Complex64;

pub const MIN_TERMS: usize = 300;

/// `eta(tau) = e^{pi i tau / 12} prod (1 - q^n)` by direct product, at least
/// `MIN_TERMS` factors and until `|q^n| < 1e-18`.
pub fn eta(tau: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * std::f64::consts::PI * i * tau).exp();
    let mut prod = Complex64::new(1.0, 0.0);
    let mut qn = q;
    let mut n = 1;
    while n <= MIN_TERMS || qn.norm() > 1e-18 {
        prod *= Complex64::new(1.0, 0.0) - qn;
        qn *= q;
        n += 1;
    }
    (std::f64::consts::PI * i * tau / 12.0).exp() * prod
}

/// `prod eta(delta tau)^{r}`.
pub fn eta_quotient(pairs: &[(u64, i64)], tau: Complex64) -> Complex64 {
    pairs
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &(d, r)| acc * eta(tau * d as f64).powi(r as i32))
}

pub fn mobius(a: f64, b: f64, c: f64, d: f64, tau: Complex64) -> Complex64 {
    (tau * a + b) / (tau * c + d)
}

/// `prod_{n >= 1} (1 - q^{r n})^e` truncated below `len`, by repeated
/// schoolbook multiplication with binomial / geometric factors.
pub fn naive_euler(r: usize, e: i64, len: usize) -> Vec<i128> {
    let mut out = vec![0i128; len];
    out[0] = 1;
    let mut n = 1;
    while r * n < len {
        let step = r * n;
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                // multiply by (1 - x^step)
                for k in (step..len).rev() {
                    out[k] -= out[k - step];
                }
            } else {
                // multiply by 1 / (1 - x^step) = sum x^{j step}
                let mut next = vec![0i128; len];
                for (k, v) in out.iter().enumerate() {
                    if *v == 0 {
                        continue;
                    }
                    let mut j = k;
                    while j < len {
                        next[j] += v;
                        j += step;
                    }
                }
                out = next;
            }
        }
        n += 1;
    }
    out
}

/// Deterministic generator for the seeded property checks.
pub fn rng(seed: u64) -> rand::rngs::StdRng {
    use rand::SeedableRng;
    rand::rngs::StdRng::seed_from_u64(seed)
}

/// `log eta(tau)` on some branch, by summing `log(1 - q^n)`; safe for
/// quotients whose values overflow `f64`.
pub fn log_eta(tau: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * std::f64::consts::PI * i * tau).exp();
    let mut acc = std::f64::consts::PI * i * tau / 12.0;
    let mut qn = q;
    let mut n = 1;
    while n <= MIN_TERMS || qn.norm() > 1e-18 {
        acc += (Complex64::new(1.0, 0.0) - qn).ln();
        qn *= q;
        n += 1;
    }
    acc
}

/// `sum r log eta(delta tau)`.
pub fn log_eta_quotient(pairs: &[(u64, i64)], tau: Complex64) -> Complex64 {
    pairs.iter().map(|&(d, r)| log_eta(tau * d as f64) * r as f64).sum()
}
