//! Generation of canonical reduced representatives for all maximal,
//! irreducible GL2(Z)-classes of integral binary cubic forms with
//! 0 < |disc| <= X, i.e. one form per cubic field.
//!
//! Positive discriminant: loop over (a, b, c, d) constrained so that the
//! Hessian satisfies 0 <= Q <= P <= R with P <= sqrt(X); rigorous coefficient
//! bounds follow from the root geometry of reduced forms
//! (a <= (2/3)^{3/2} X^{1/4}, |b| <= 3a/2 + sqrt(2P)).
//!
//! Negative discriminant: loop within bounds implied by the reduced real
//! quadratic factor x^2 + pxy + qy^2 (|p| <= 1 <= q), namely
//! a^4 q^3 <= 16X/27 and a^4 r^4 <= 4X/3 for the real root r.

use super::forms::{is_maximal_at, BinaryCubicForm};
use crate::error::{Error, Result};
use rayon::prelude::*;
use std::collections::HashSet;

/// Hard ceiling on X for field enumeration.
pub const ENUM_LIMIT: u64 = 100_000_000;

/// Canonical forms of all maximal irreducible classes with 0 < |disc| <= x,
/// deduplicated and sorted by (|disc|, coefficients).
pub fn reduced_maximal_forms(x: u64) -> Result<Vec<BinaryCubicForm>> {
    if x > ENUM_LIMIT {
        return Err(Error::ResourceLimit {
            requested: x as u128,
            limit: ENUM_LIMIT as u128,
        });
    }
    let xf = x as f64;
    let amax_pos = ((2.0f64 / 3.0).powf(1.5) * xf.powf(0.25)).floor() as i64 + 1;
    let amax_neg = (16.0 * xf / 27.0).powf(0.25).floor() as i64 + 1;
    let amax = amax_pos.max(amax_neg);

    let mut forms: Vec<BinaryCubicForm> = (1..=amax)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            if a <= amax_pos {
                pos_forms_for_a(x, a, &mut out);
            }
            if a <= amax_neg {
                neg_forms_for_a(x, a, &mut out);
            }
            out.into_iter()
        })
        .collect();

    // classes on the boundary of the reduction cone (disc > 0) are emitted
    // once per reduced representative; all copies are already canonical
    let mut seen = HashSet::with_capacity(forms.len() * 2);
    forms.retain(|f| seen.insert(*f));
    forms.sort_by_key(|f| (f.disc().unsigned_abs(), f.coeffs()));
    Ok(forms)
}

fn keep(f: BinaryCubicForm, out: &mut Vec<BinaryCubicForm>) {
    if f.is_irreducible() && maximal_everywhere(&f) {
        out.push(f);
    }
}

/// Maximality of R_f at every prime; only p with p^2 | disc can fail.
fn maximal_everywhere(f: &BinaryCubicForm) -> bool {
    let mut n = f.disc().unsigned_abs();
    let mut p: u128 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e >= 2 && !is_maximal_at(f, p as u32) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

fn pos_forms_for_a(x: u64, a: i64, out: &mut Vec<BinaryCubicForm>) {
    let xf = x as f64;
    let s = xf.sqrt().floor() as i64; // P <= sqrt(disc) <= sqrt(X)
    let bmax = (1.5 * a as f64 + std::f64::consts::SQRT_2 * xf.powf(0.25)).floor() as i64 + 1;
    for b in -bmax..=bmax {
        // 1 <= P = b^2 - 3ac <= s
        let clo = num_integer::div_ceil(b * b - s, 3 * a);
        let chi = num_integer::div_floor(b * b - 1, 3 * a);
        for c in clo..=chi {
            let p = b * b - 3 * a * c;
            // 0 <= Q = bc - 9ad <= P
            let dlo = num_integer::div_ceil(b * c - p, 9 * a);
            let dhi = num_integer::div_floor(b * c, 9 * a);
            for d in dlo..=dhi {
                if c * c - 3 * b * d < p {
                    continue; // R >= P
                }
                let f = BinaryCubicForm::new(a, b, c, d);
                let disc = f.disc();
                if disc <= 0 || disc > x as i128 {
                    continue;
                }
                let g = f.canonical();
                if f.is_irreducible() && maximal_everywhere(&f) {
                    out.push(g);
                }
            }
        }
    }
}

fn neg_forms_for_a(x: u64, a: i64, out: &mut Vec<BinaryCubicForm>) {
    let xf = x as f64;
    let af = a as f64;
    let rmax = 2.0f64.max((4.0 * xf / 3.0).powf(0.25) / af);
    let qmax = (16.0 * xf / 27.0).powf(1.0 / 3.0) / af.powf(4.0 / 3.0);
    // mirror normalization b > 0 (or b = 0, d > 0) restricts to b >= 0
    let bmax = (af * (1.0 + rmax)).floor() as i64 + 1;
    let cmin = (af * (1.0 - rmax)).floor() as i64 - 1;
    let cmax = (af * (qmax + rmax)).ceil() as i64 + 1;
    for b in 0..=bmax {
        let bf = b as f64;
        for c in cmin..=cmax {
            let cf = c as f64;
            // -X <= disc(d) is a downward parabola in d
            let a2 = 27.0 * af * af;
            let b2 = 18.0 * af * bf * cf - 4.0 * bf * bf * bf;
            let c2 = bf * bf * cf * cf - 4.0 * af * cf * cf * cf + xf;
            let delta = b2 * b2 + 4.0 * a2 * c2;
            if delta < 0.0 {
                continue;
            }
            let sq = delta.sqrt();
            let dlo = ((b2 - sq) / (2.0 * a2)).floor() as i64 - 1;
            let dhi = ((b2 + sq) / (2.0 * a2)).ceil() as i64 + 1;
            for d in dlo..=dhi {
                let f = BinaryCubicForm::new(a, b, c, d);
                let disc = f.disc();
                if disc >= 0 || disc < -(x as i128) {
                    continue;
                }
                if !f.is_neg_reduced() {
                    continue;
                }
                keep(f, out);
            }
        }
    }
}

/// Independent completeness oracle: scan every form in a box provably
/// containing all canonical representatives with |disc| <= x, filter, and
/// canonicalize by the iterative reduction algorithm. Intended for small x.
pub fn naive_forms(x: u64) -> Vec<BinaryCubicForm> {
    assert!(x <= 2_000, "brute-force oracle is restricted to small x");
    let xf = x as f64;
    let q4 = xf.powf(0.25);
    let amax = (0.878 * q4).floor() as i64 + 1;
    let bmax = {
        let pos = 1.5 * amax as f64 + std::f64::consts::SQRT_2 * q4;
        let neg = amax as f64 + (4.0 * xf / 3.0).powf(0.25);
        pos.max(neg).floor() as i64 + 2
    };
    let cmax = {
        let pos = 0.75 * amax as f64 + 3.87 * q4 + 4.99 * xf.sqrt();
        let neg = (16.0 * xf / 27.0).powf(1.0 / 3.0) + (4.0 * xf / 3.0).powf(0.25);
        pos.max(neg).ceil() as i64 + 2
    };
    let dmax = {
        let pos = (0.5 + 1.289 * q4).powi(3);
        let neg = (16.0 * xf / 27.0).powf(1.0 / 3.0) * (4.0 * xf / 3.0).powf(0.25);
        pos.max(neg).ceil() as i64 + 2
    };
    let mut set: HashSet<BinaryCubicForm> = HashSet::new();
    for a in 1..=amax {
        for b in -bmax..=bmax {
            for c in -cmax..=cmax {
                for d in -dmax..=dmax {
                    let f = BinaryCubicForm::new(a, b, c, d);
                    let disc = f.disc();
                    if disc == 0 || disc.unsigned_abs() > x as u128 {
                        continue;
                    }
                    if !f.is_irreducible() || !maximal_everywhere(&f) {
                        continue;
                    }
                    set.insert(f.reduce());
                }
            }
        }
    }
    let mut forms: Vec<BinaryCubicForm> = set.into_iter().collect();
    forms.sort_by_key(|f| (f.disc().unsigned_abs(), f.coeffs()));
    forms
}
