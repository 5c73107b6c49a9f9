//! Truncated evaluation of the hom-counting Dirichlet series with a
//! certified tail, and the matching Euler-product evaluation with local
//! conditions.
//!
//! Tail certificate: if N(t) = sum_{k <= t} b_k satisfies N(t) <= C t^{u}
//! with u = 1/a + eps, then by Abel summation
//! sum_{k > Y} b_k k^{-s} <= C s/(s - u) Y^{u - s}. The constant C is
//! measured over the enumerated coefficient range (counting only mass past
//! the truncation point) and then doubled.

use crate::abelian::DirichletCoeffs;
use crate::error::{Error, Result};

/// Slack added to 1/a in the tail exponent.
pub const TAIL_EPSILON: f64 = 0.05;

/// Factor applied to the measured counting constant.
pub const SAFETY_FACTOR: f64 = 2.0;

/// A value together with a one-sided certified tail bound.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Certified {
    pub value: f64,
    pub tail_bound: f64,
}

/// Sum of b_k k^{-s} over k <= y, with a certified bound on the omitted
/// tail. `a_inv` is a(A) = ind(A), locating the rightmost pole at 1/a.
pub fn eval_truncated(coeffs: &DirichletCoeffs, s: f64, y: u64, a_inv: u64) -> Result<Certified> {
    let pole = 1.0 / a_inv as f64;
    if s <= pole {
        return Err(Error::Divergence { s, pole });
    }
    let y = y.min(coeffs.bound);
    let value: f64 = coeffs
        .coeffs
        .range(..=y)
        .map(|(&k, &b)| b as f64 * (k as f64).powf(-s))
        .sum();
    let u = pole + TAIL_EPSILON;
    if s <= u {
        return Err(Error::Divergence { s, pole: u });
    }
    // measured constant: growth of the coefficient mass beyond y
    let n_y = coeffs.partial_sum(y);
    let mut c = 0.0f64;
    let mut running = n_y;
    for (&k, &b) in coeffs.coeffs.range(y + 1..) {
        running += b;
        let ratio = (running - n_y) as f64 / (k as f64).powf(u);
        c = c.max(ratio);
    }
    let tail_bound = SAFETY_FACTOR * c * s / (s - u) * (y as f64).powf(u - s);
    Ok(Certified { value, tail_bound })
}

/// Constraint on the local factor at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalForce {
    Ramified,
    Unramified,
}

/// Euler-product value of the C_ell hom-counting series at s, with local
/// factors forced per `conditions`, truncated at `prime_bound`:
/// (1 + (ell+1) ell^{-2(ell-1)s}) prod_{p = 1 mod ell} (1 + (ell-1) p^{-(ell-1)s}).
/// Forcing Ramified keeps only the ramified part of the factor; forcing
/// Unramified replaces the factor by 1.
pub fn g_lambda_value(
    ell: u32,
    s: f64,
    conditions: &[(u64, LocalForce)],
    prime_bound: u64,
) -> Result<f64> {
    let a_inv = (ell - 1) as f64;
    if s <= 1.0 / a_inv {
        return Err(Error::Divergence { s, pole: 1.0 / a_inv });
    }
    for &(p, _) in conditions {
        let admissible = p == ell as u64 || p % ell as u64 == 1;
        if !admissible {
            return Err(Error::InvalidCondition(format!(
                "prime {p} cannot ramify in a C_{ell} field"
            )));
        }
    }
    let force_at = |p: u64| conditions.iter().find(|&&(q, _)| q == p).map(|&(_, f)| f);
    let mut prod = 1.0f64;
    // wild factor at ell (conductor ell^2), series-verbatim weight ell + 1
    let wild_part = (ell as f64 + 1.0) * (ell as f64).powf(-2.0 * a_inv * s);
    prod *= match force_at(ell as u64) {
        None => 1.0 + wild_part,
        Some(LocalForce::Ramified) => wild_part,
        Some(LocalForce::Unramified) => 1.0,
    };
    let mut p = 2u64;
    while p <= prime_bound {
        if p % ell as u64 == 1 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            let ram = (ell as f64 - 1.0) * (p as f64).powf(-a_inv * s);
            prod *= match force_at(p) {
                None => 1.0 + ram,
                Some(LocalForce::Ramified) => ram,
                Some(LocalForce::Unramified) => 1.0,
            };
        }
        p += 1;
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{hom_coefficients, WildConvention};
    use std::collections::BTreeMap;

    #[test]
    fn singleton_series() {
        let coeffs = DirichletCoeffs {
            coeffs: BTreeMap::from([(1u64, 1u64)]),
            bound: 1_000,
        };
        let out = eval_truncated(&coeffs, 2.0, 1_000, 4).unwrap();
        assert_eq!(out.value, 1.0);
        assert_eq!(out.tail_bound, 0.0);
    }

    #[test]
    fn pole_rejection() {
        let coeffs = DirichletCoeffs {
            coeffs: BTreeMap::from([(1u64, 1u64)]),
            bound: 10,
        };
        assert!(matches!(
            eval_truncated(&coeffs, 0.25, 10, 4),
            Err(Error::Divergence { .. })
        ));
        assert!(g_lambda_value(5, 0.25, &[], 100).is_err());
    }

    #[test]
    fn two_path_agreement() {
        // full coefficient range to 10^8, truncate the sum at 10^6
        let bound = 100_000_000u64;
        let coeffs = hom_coefficients(5, bound, WildConvention::SeriesVerbatim).unwrap();
        let s = 0.6;
        let truncated = eval_truncated(&coeffs, s, 1_000_000, 4).unwrap();
        let product = g_lambda_value(5, s, &[], 2_000_000).unwrap();
        assert!(truncated.tail_bound > 0.0);
        assert!(
            (product - truncated.value).abs() <= truncated.tail_bound,
            "product {product}, sum {} +- {}",
            truncated.value,
            truncated.tail_bound
        );
        // value increases with Y, tail bound decreases
        let shorter = eval_truncated(&coeffs, s, 100_000, 4).unwrap();
        assert!(shorter.value <= truncated.value);
        assert!(shorter.tail_bound >= truncated.tail_bound);
    }

    #[test]
    fn forced_factor_ratio() {
        let ell = 5u32;
        let s = 0.6;
        let p0 = 11u64;
        let full = g_lambda_value(ell, s, &[], 500_000).unwrap();
        let forced = g_lambda_value(ell, s, &[(p0, LocalForce::Ramified)], 500_000).unwrap();
        let ram = 4.0 * (p0 as f64).powf(-4.0 * s);
        let expected = full * ram / (1.0 + ram);
        assert!((forced - expected).abs() < 1e-12 * full);
        assert!(forced / full <= 1.0);
        // forcing an inadmissible prime is rejected
        assert!(g_lambda_value(ell, s, &[(7, LocalForce::Ramified)], 100).is_err());
    }
}
