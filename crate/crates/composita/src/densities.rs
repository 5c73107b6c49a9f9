//! Local densities and global constants of the two-term cubic field count
//! N(X) = A X + B X^{5/6} + error, together with their ramified local
//! factors for counts with partial/total ramification conditions.

use crate::error::{Error, Result};
use crate::special::{check_digits, gamma, zeta_alternating, zeta_em};
use num_rational::Rational64;
use once_cell::sync::Lazy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamType {
    Partial,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Main,
    Secondary,
}

/// Local density data at one prime.
#[derive(Debug, Clone, Copy)]
pub struct LocalDensity {
    pub p: u64,
    pub ap: f64,
    pub ap2: f64,
    pub bp: f64,
    pub bp2: f64,
    /// Error-term dependency C_p = p^{4/5} (with the default exponent).
    pub cp_err: f64,
}

/// Error-dependency exponents; the proven admissible choice is 4/5 for both.
pub const DEFAULT_ERROR_EXPONENTS: (f64, f64) = (0.8, 0.8);

pub fn local_densities(p: u64) -> LocalDensity {
    let pf = p as f64;
    let cp = 1.0 + 1.0 / pf + 1.0 / (pf * pf);
    let t = pf.powf(-1.0 / 3.0);
    // K_p = (1 - p^{-5/3})(1 + p^{-1}) / (1 - p^{-1/3})
    let kp = (1.0 - pf.powf(-5.0 / 3.0)) * (1.0 + 1.0 / pf) / (1.0 - t);
    LocalDensity {
        p,
        ap: 1.0 / (cp * pf),
        ap2: 1.0 / (cp * pf * pf),
        bp: (1.0 + t) * (1.0 + t) / (kp * pf),
        bp2: (1.0 + t) / (kp * pf * pf),
        cp_err: pf.powf(DEFAULT_ERROR_EXPONENTS.0),
    }
}

/// Main-term densities as exact rationals: A_p = (1+p^{-1}+p^{-2})^{-1}/p.
pub fn main_density_rational(p: u64, ram: RamType) -> Rational64 {
    let p = p as i64;
    let cp_num = p * p + p + 1; // C_p = cp_num / p^2
    match ram {
        RamType::Partial => Rational64::new(p, cp_num),
        RamType::Total => Rational64::new(1, cp_num),
    }
}

pub fn local_density(p: u64, ram: RamType, term: Term) -> f64 {
    let d = local_densities(p);
    match (ram, term) {
        (RamType::Partial, Term::Main) => d.ap,
        (RamType::Total, Term::Main) => d.ap2,
        (RamType::Partial, Term::Secondary) => d.bp,
        (RamType::Total, Term::Secondary) => d.bp2,
    }
}

/// The global constants A = 1/(3 zeta(3)) and
/// B = (1 + sqrt 3) 4 zeta(1/3) / (5 Gamma(2/3)^3 zeta(5/3)).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GlobalConstants {
    pub a: f64,
    pub b: f64,
    pub precision: u32,
}

static GLOBAL: Lazy<GlobalConstants> = Lazy::new(|| {
    let a = 1.0 / (3.0 * zeta_em(3.0));
    let b = (1.0 + 3.0f64.sqrt()) * 4.0 * zeta_alternating(1.0 / 3.0)
        / (5.0 * gamma(2.0 / 3.0).powi(3) * zeta_em(5.0 / 3.0));
    GlobalConstants { a, b, precision: 15 }
});

pub fn global_constants(digits: u32) -> Result<GlobalConstants> {
    check_digits(digits)?;
    Ok(GlobalConstants {
        precision: digits,
        ..*GLOBAL
    })
}

/// A two-term asymptotic C1 X^{e1} + C2 X^{e2} with an error exponent.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Asymptotic {
    pub c1: f64,
    pub e1: f64,
    pub c2: f64,
    pub e2: f64,
    pub error_exponent: f64,
}

impl Asymptotic {
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.c1 * x.powf(self.e1) + self.c2 * x.powf(self.e2)
    }
}

fn prime_factors(mut n: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Err(Error::InvalidCondition(format!("{} is not squarefree", n)));
            }
            out.push(p);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    if out.iter().any(|&p| p == 2 || p == 3) {
        return Err(Error::InvalidCondition("wild prime in condition modulus".into()));
    }
    Ok(out)
}

/// Predicted count of S3 cubics with |disc| <= X, partially ramified at
/// every p | q and totally ramified at every p | r:
/// A (prod A_p)(prod A_{p^2}) X + B (prod B_p)(prod B_{p^2}) X^{5/6}.
pub fn predicted_asymptotic(q: u64, r: u64) -> Result<Asymptotic> {
    let qp = prime_factors(q)?;
    let rp = prime_factors(r)?;
    if qp.iter().any(|p| rp.contains(p)) {
        return Err(Error::InvalidCondition(format!("{q} and {r} overlap")));
    }
    let g = *GLOBAL;
    let mut c1 = g.a;
    let mut c2 = g.b;
    for &p in &qp {
        let d = local_densities(p);
        c1 *= d.ap;
        c2 *= d.bp;
    }
    for &p in &rp {
        let d = local_densities(p);
        c1 *= d.ap2;
        c2 *= d.bp2;
    }
    Ok(Asymptotic {
        c1,
        e1: 1.0,
        c2,
        e2: 5.0 / 6.0,
        error_exponent: 2.0 / 3.0,
    })
}

pub fn predicted_nqr(x: u64, q: u64, r: u64) -> Result<f64> {
    Ok(predicted_asymptotic(q, r)?.value(x as f64))
}
