mod common;

use etawb::families::{build_p, Mode};
use etawb::partitions::PartitionKind;
use etawb::transform::{eta_epsilon, gamma_family};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use num_complex::Complex64;
use num_integer::Integer;
use rand::Rng;

/// Checks `eta(M tau) = eps (-i(c tau + d))^{1/2} eta(tau)` in floating point.
fn law_error(a: i64, b: i64, c: i64, d: i64, tau: Complex64) -> f64 {
    let (re, im) = eta_epsilon(a, b, c, d).unwrap().to_f64();
    let eps = Complex64::new(re, im);
    let mt = common::mobius(a as f64, b as f64, c as f64, d as f64, tau);
    let lhs = common::eta(mt);
    let auto = (Complex64::new(0.0, -1.0) * (tau * c as f64 + d as f64)).sqrt();
    let rhs = eps * auto * common::eta(tau);
    (lhs - rhs).norm() / rhs.norm().max(1e-300)
}

#[test]
fn eta_law_on_random_matrices() {
    let mut rng = common::rng(2024);
    let mut seen = 0;
    while seen < 20 {
        let c: i64 = rng.gen_range(1..=12);
        let d: i64 = rng.gen_range(-20..=20);
        if c.gcd(&d) != 1 {
            continue;
        }
        let a = (1..=c).find(|a| (a * d - 1).rem_euclid(c) == 0).unwrap();
        let b = (a * d - 1) / c;
        assert_eq!(a * d - b * c, 1);
        // c tau + d = x + i s keeps both tau and M tau away from the real axis
        let x: f64 = rng.gen_range(-0.5..0.5);
        let s: f64 = rng.gen_range(0.6..1.2);
        let tau = Complex64::new((x - d as f64) / c as f64, s / c as f64);
        let err = law_error(a, b, c, d, tau);
        assert!(err < 1e-9, "[{a}, {b}; {c}, {d}] at {tau}: error {err}");
        seen += 1;
    }
}

#[test]
fn eta_law_at_fixed_point() {
    let tau = Complex64::new(1.0, 1.0) / 7.0;
    assert!(law_error(23, 5, 9, 2, tau) < 1e-9);
    assert!(law_error(0, -1, 1, 0, Complex64::new(0.1, 0.8)) < 1e-9);
}

#[test]
fn eta_law_small_matrix() {
    let tau = Complex64::new(-0.2, 0.9);
    assert!(law_error(1, 1, 1, 2, tau) < 1e-9);
}

/// `P_source(gamma tau) / P_target(tau)` for the family quotients.
fn family_ratio(source: PartitionKind, target: PartitionKind, alpha: u32, x: f64) -> Complex64 {
    let g = gamma_family(alpha);
    let ints = |v: &BigRational| v.to_integer().to_f64().unwrap();
    let (a, b, c, d) = (ints(&g.a), ints(&g.b), ints(&g.c), ints(&g.d));
    let pairs = |k| {
        let q = build_p(k, Mode::Family(alpha)).summands().remove(0).1;
        q.exponents().iter().map(|(&d, &r)| (d, r)).collect::<Vec<_>>()
    };
    let tau = Complex64::new((x - d) / c, 1.0 / c);
    let gt = common::mobius(a, b, c, d, tau);
    (common::log_eta_quotient(&pairs(source), gt) - common::log_eta_quotient(&pairs(target), tau)).exp()
}

#[test]
fn family_constants_numerically() {
    for alpha in [1u32, 2] {
        let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
        for x in [-0.3, 0.2] {
            let ped = family_ratio(PartitionKind::Ped, PartitionKind::PoBar, alpha, x);
            let pod = family_ratio(PartitionKind::Pod, PartitionKind::PBar, alpha, x);
            assert!((ped - sign).norm() < 1e-8, "alpha={alpha}: ped ratio {ped}");
            assert!((pod - sign / 4.0).norm() < 1e-8, "alpha={alpha}: pod ratio {pod}");
        }
    }
}
