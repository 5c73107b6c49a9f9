//! The Euler-product constants of the asymptotic count of S3 x C_ell
//! composita (ell > 5 prime): the raw main/secondary constants, their wild
//! local factors at ell, and the final Aut-orbit-corrected C1, C2.
//!
//! Per-prime structure at p = 1 mod ell, Delta = (ell-1)/ell:
//!   main:      (1 + (ell-1) p^{-3D}) * {1 + p^{-D} A_p R + p^{-2D} A_{p^2} R
//!                                          - A_p R - A_{p^2} R},
//!              R = (ell-1) p^{-3D} / (1 + (ell-1) p^{-3D}),
//!   secondary: same shape with B_p/B_{p^2}, exponents 5D/6, 5D/3 and
//!              R' built from p^{-5D/2}.
//! The hom-series factor and the bracket are multiplied in one fused pass so
//! no partial product is left slowly convergent on its own.

use crate::densities::{global_constants, local_densities, Term};
use crate::error::{Error, Result};

/// A truncated Euler-product value with a certified tail bound.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Truncated {
    pub value: f64,
    pub truncation_bound: f64,
}

fn require_ell(ell: u32) -> Result<()> {
    let composite = (2..ell).take_while(|d| d * d <= ell).any(|d| ell % d == 0);
    if ell <= 5 || composite {
        return Err(Error::InvalidCondition(format!(
            "ell must be a prime > 5, got {ell}"
        )));
    }
    Ok(())
}

/// Odd primes p = 1 mod ell with p <= bound, ascending.
fn primes_one_mod(ell: u32, bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            if p as u64 % u64::from(ell) == 1 {
                out.push(p as u64);
            }
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    out
}

/// Local weights of the three tame cubic classes at p, normalized to sum
/// to 1: unramified, partially ramified, totally ramified.
fn cubic_weights(p: u64, term: Term) -> (f64, f64, f64) {
    let d = local_densities(p);
    match term {
        Term::Main => (1.0 - d.ap - d.ap2, d.ap, d.ap2),
        Term::Secondary => (1.0 - d.bp - d.bp2, d.bp, d.bp2),
    }
}

/// The wild local factor at ell (c_ell for the main term, d_ell for the
/// secondary term): sum over the pair classes (cubic tame at ell: unramified
/// / partial / total) x (C_ell side: unramified / conductor ell^2) of the
/// discriminant ratio, the forced hom-series ratio, and the cubic density.
/// The compositum discriminant in the wild column uses the defect
/// v_K (ell - 1), giving the ratio ell^{v_K Delta} (main) and
/// ell^{5 v_K Delta / 6} (secondary); the unramified column's ratio is 1.
pub fn wild_factor(ell: u32, term: Term) -> Result<f64> {
    require_ell(ell)?;
    let lf = f64::from(ell);
    let delta = (lf - 1.0) / lf;
    let w = match term {
        Term::Main => (lf + 1.0) * lf.powf(-6.0 * delta),
        Term::Secondary => (lf + 1.0) * lf.powf(-5.0 * delta),
    };
    let ratio_exp = match term {
        Term::Main => delta,
        Term::Secondary => 5.0 * delta / 6.0,
    };
    let weights = cubic_weights(u64::from(ell), term);
    let mut sum = 0.0;
    for (vk, a_sigma) in [(0.0, weights.0), (1.0, weights.1), (2.0, weights.2)] {
        let unram = 1.0 / (1.0 + w);
        let wild = w / (1.0 + w) * lf.powf(ratio_exp * vk);
        sum += a_sigma * (unram + wild);
    }
    Ok(sum)
}

fn raw_constant(ell: u32, prime_bound: u64, term: Term) -> Result<Truncated> {
    require_ell(ell)?;
    if prime_bound < u64::from(ell) {
        return Err(Error::InvalidCondition(format!(
            "prime bound {prime_bound} below ell = {ell}"
        )));
    }
    let lf = f64::from(ell);
    let delta = (lf - 1.0) / lf;
    let (series_exp, damp1, damp2) = match term {
        Term::Main => (3.0 * delta, delta, 2.0 * delta),
        Term::Secondary => (5.0 * delta / 2.0, 5.0 * delta / 6.0, 5.0 * delta / 3.0),
    };
    let g = global_constants(15)?;
    let front = match term {
        Term::Main => g.a,
        Term::Secondary => g.b,
    };
    // the ell-factor of the hom series
    let wild_series = match term {
        Term::Main => 1.0 + (lf + 1.0) * lf.powf(-6.0 * delta),
        Term::Secondary => 1.0 + (lf + 1.0) * lf.powf(-5.0 * delta),
    };
    let mut prod = 1.0f64;
    for p in primes_one_mod(ell, prime_bound) {
        let pf = p as f64;
        let (_, ram1, ram2) = cubic_weights(p, term);
        let series = 1.0 + (lf - 1.0) * pf.powf(-series_exp);
        let r = (lf - 1.0) * pf.powf(-series_exp) / series;
        let bracket = 1.0 + pf.powf(-damp1) * ram1 * r + pf.powf(-damp2) * ram2 * r
            - ram1 * r
            - ram2 * r;
        prod *= series * bracket;
    }
    let value = front * wild_factor(ell, term)? * wild_series * prod;
    // tail: each omitted factor is 1 + O(p^{-series_exp}) with constant
    // <= 2(ell-1); bound sum over all integers past the cutoff by an integral
    let pb = prime_bound as f64;
    let tail_log = 2.0 * (lf - 1.0) * pb.powf(1.0 - series_exp) / (series_exp - 1.0);
    let truncation_bound = value.abs() * (tail_log.exp() - 1.0);
    Ok(Truncated { value, truncation_bound })
}

/// The raw main-term constant: A times the wild factor times the fused
/// hom-series/density Euler product over p = 1 mod ell up to the bound.
pub fn c1_raw(ell: u32, prime_bound: u64) -> Result<Truncated> {
    raw_constant(ell, prime_bound, Term::Main)
}

/// The raw secondary-term constant (carries the sign of B, i.e. negative).
pub fn c2_raw(ell: u32, prime_bound: u64) -> Result<Truncated> {
    raw_constant(ell, prime_bound, Term::Secondary)
}

/// Final constants for S3 x C_ell composita counted by discriminant, after
/// removing the trivial C_ell map and dividing by |Aut(C_ell)| = ell - 1.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FinalConstants {
    pub ell: u32,
    pub prime_bound: u64,
    pub c1: f64,
    pub c2: f64,
    pub c1_truncation: f64,
    pub c2_truncation: f64,
    pub wild_main: f64,
    pub wild_secondary: f64,
}

pub fn final_constants(ell: u32, prime_bound: u64) -> Result<FinalConstants> {
    let raw1 = c1_raw(ell, prime_bound)?;
    let raw2 = c2_raw(ell, prime_bound)?;
    let g = global_constants(15)?;
    let aut = f64::from(ell - 1);
    Ok(FinalConstants {
        ell,
        prime_bound,
        c1: (raw1.value - g.a) / aut,
        c2: (raw2.value - g.b) / aut,
        c1_truncation: raw1.truncation_bound / aut,
        c2_truncation: raw2.truncation_bound / aut,
        wild_main: wild_factor(ell, Term::Main)?,
        wild_secondary: wild_factor(ell, Term::Secondary)?,
    })
}
