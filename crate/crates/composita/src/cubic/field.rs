//! Field records built from enumerated forms: Galois type, ramification
//! profile, conditioned counts, 3-class-number sums, and uniformity ratios.

use super::enumerate::reduced_maximal_forms;
use super::forms::BinaryCubicForm;
use crate::error::{Error, Result};
use crate::permgroup::TameInertia;
use num_bigint::BigUint;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum GaloisType {
    S3,
    C3,
    /// Cyclic field of odd prime degree ell (produced by the abelian module).
    Cl(u32),
}

impl std::fmt::Display for GaloisType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaloisType::S3 => write!(f, "S3"),
            GaloisType::C3 => write!(f, "C3"),
            GaloisType::Cl(l) => write!(f, "C{l}"),
        }
    }
}

/// Local behavior at a single prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalDatum {
    Tame(TameInertia),
    /// Wild ramification (p in {2, 3} for cubic fields, p = ell for C_ell);
    /// classified only by the discriminant exponent.
    Wild { p: u32, disc_exponent: u32 },
}

impl LocalDatum {
    pub fn disc_exponent(&self) -> u32 {
        match self {
            // cubic side: index of the inertia generator in S3
            LocalDatum::Tame(t @ (TameInertia::S3Partial | TameInertia::S3Total)) => {
                t.disc_exponent(3)
            }
            // C_ell side: the generator is regular of full order, index ell - 1
            LocalDatum::Tame(TameInertia::AbelianElem { order }) => order - 1,
            LocalDatum::Tame(TameInertia::Unramified) => 0,
            LocalDatum::Wild { disc_exponent, .. } => *disc_exponent,
        }
    }
}

/// One enumerated number field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldRecord {
    pub abs_disc: BigUint,
    pub sign: i8,
    pub galois: GaloisType,
    /// Ramified primes only; absent prime means unramified.
    pub ram: BTreeMap<u64, LocalDatum>,
    /// Canonical defining form for cubic records.
    pub form: Option<BinaryCubicForm>,
}

impl FieldRecord {
    /// Machine-word fast path for the discriminant magnitude.
    pub fn abs_disc_u64(&self) -> Option<u64> {
        u64::try_from(&self.abs_disc).ok()
    }

    pub fn signed_disc_i64(&self) -> Option<i64> {
        let m = i64::try_from(&self.abs_disc).ok()?;
        Some(if self.sign < 0 { -m } else { m })
    }

    /// Local datum at p, explicit Unramified when p does not divide the
    /// discriminant.
    pub fn classify_ramification(&self, p: u64) -> LocalDatum {
        self.ram
            .get(&p)
            .copied()
            .unwrap_or(LocalDatum::Tame(TameInertia::Unramified))
    }

    /// True when no prime is totally ramified. For cubic fields this is
    /// equivalent to the discriminant being a fundamental quadratic
    /// discriminant; both routes are kept and cross-checked in tests.
    pub fn nowhere_totally_ramified(&self) -> bool {
        self.ram.values().all(|d| match d {
            LocalDatum::Tame(TameInertia::S3Total) => false,
            LocalDatum::Tame(_) => true,
            // wild cubic primes: at 3, total ramification has v_3 >= 3;
            // at 2, v_2 = 2 with a triple root mod 2 is tame-total and is
            // classified during construction, so a Wild datum at 2 is partial
            LocalDatum::Wild { p: 3, disc_exponent } => *disc_exponent < 3,
            LocalDatum::Wild { .. } => true,
        })
    }
}

/// Multiplicities of the repeated projective root of f over F_p, if any;
/// for a maximal ring this mirrors the p-splitting: 2 = partially ramified,
/// 3 = totally ramified.
fn repeated_root_multiplicity(f: &BinaryCubicForm, p: u64) -> Option<u32> {
    let pi = p as i128;
    let (a, b, c, d) = (f.a as i128, f.b as i128, f.c as i128, f.d as i128);
    let md = |x: i128| x.rem_euclid(pi);
    // root at infinity (1 : 0): multiplicity = number of leading coeffs
    // divisible by p, from a down
    if md(a) == 0 && md(b) == 0 {
        return Some(if md(c) == 0 { 3 } else { 2 });
    }
    for r in 0..pi {
        let fr = md(((a * r + b) * r + c) * r + d);
        if fr != 0 {
            continue;
        }
        let dfr = md((3 * a * r + 2 * b) * r + c);
        if dfr != 0 {
            continue;
        }
        // moving the root to (0 : 1) sends the x^2 y coefficient to
        // 3 a r + b; multiplicity 3 iff p divides it too (valid at every p,
        // including 2 and 3). Computed mod p: the full translated
        // coefficients overflow for large r.
        return Some(if md(3 * a * r + b) == 0 { 3 } else { 2 });
    }
    None
}

fn build_record(f: BinaryCubicForm) -> FieldRecord {
    let disc = f.disc();
    let sign = if disc < 0 { -1 } else { 1 };
    let abs = disc.unsigned_abs();
    let galois = if sign > 0 && is_square_u128(abs) {
        GaloisType::C3
    } else {
        GaloisType::S3
    };
    let mut ram = BTreeMap::new();
    let mut n = abs;
    let mut p: u128 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut v = 0u32;
            while n % p == 0 {
                n /= p;
                v += 1;
            }
            ram.insert(p as u64, local_datum(&f, p as u64, v));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        ram.insert(n as u64, local_datum(&f, n as u64, 1));
    }
    FieldRecord {
        abs_disc: BigUint::from(abs),
        sign,
        galois,
        ram,
        form: Some(f),
    }
}

fn local_datum(f: &BinaryCubicForm, p: u64, v: u32) -> LocalDatum {
    if p == 2 || p == 3 {
        // v_2 = 2 with a triple root mod 2 is the tame totally ramified case
        if p == 2 && v == 2 && repeated_root_multiplicity(f, 2) == Some(3) {
            return LocalDatum::Tame(TameInertia::S3Total);
        }
        if p == 3 && v == 1 {
            return LocalDatum::Tame(TameInertia::S3Partial);
        }
        return LocalDatum::Wild {
            p: p as u32,
            disc_exponent: v,
        };
    }
    let t = match v {
        1 => TameInertia::S3Partial,
        2 => TameInertia::S3Total,
        _ => unreachable!("tame prime {p} with disc exponent {v}"),
    };
    debug_assert_eq!(
        repeated_root_multiplicity(f, p),
        Some(if v == 1 { 2 } else { 3 })
    );
    LocalDatum::Tame(t)
}

fn is_square_u128(n: u128) -> bool {
    let r = (n as f64).sqrt().round() as u128;
    (r.saturating_sub(2)..=r + 2).any(|s| s * s == n)
}

/// All cubic fields with |disc| <= x, one record per isomorphism class,
/// sorted by (|disc|, canonical form).
pub fn enumerate_cubic_fields(x: u64) -> Result<Vec<FieldRecord>> {
    let forms = reduced_maximal_forms(x)?;
    Ok(forms.into_par_iter().map(build_record).collect())
}

/// Read-only query table over one enumeration run.
pub struct CubicTable {
    pub x: u64,
    pub records: Vec<FieldRecord>,
}

/// One row of a uniformity report: the scaled count
/// N_{q,r}(S3, X) q^{1/6} r^2 / X.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UniformityRow {
    pub q: u64,
    pub r: u64,
    pub count: u64,
    pub ratio: f64,
}

impl CubicTable {
    pub fn build(x: u64) -> Result<Self> {
        Ok(CubicTable {
            x,
            records: enumerate_cubic_fields(x)?,
        })
    }

    fn check_range(&self, x: u64) -> Result<()> {
        if x > self.x {
            return Err(Error::ResourceLimit {
                requested: x as u128,
                limit: self.x as u128,
            });
        }
        Ok(())
    }

    /// S3 cubic fields with |disc| <= x, partially ramified at every p | q
    /// and totally ramified at every p | r.
    pub fn count_with_conditions(&self, x: u64, q: u64, r: u64) -> Result<u64> {
        self.check_range(x)?;
        let qp = validated_primes(q)?;
        let rp = validated_primes(r)?;
        if qp.iter().any(|p| rp.contains(p)) {
            return Err(Error::InvalidCondition(format!(
                "q = {q} and r = {r} are not coprime"
            )));
        }
        let n = self
            .records
            .iter()
            .filter(|rec| {
                rec.galois == GaloisType::S3
                    && rec.abs_disc_u64().is_some_and(|d| d <= x)
                    && qp.iter().all(|&p| {
                        rec.classify_ramification(p)
                            == LocalDatum::Tame(TameInertia::S3Partial)
                    })
                    && rp.iter().all(|&p| {
                        rec.classify_ramification(p) == LocalDatum::Tame(TameInertia::S3Total)
                    })
            })
            .count();
        Ok(n as u64)
    }

    /// Sum of h3*(F) over quadratic fields F with |Disc F| <= x and
    /// q | Disc F, where h3* = 1 + 2 (number of S3 cubic fields with
    /// discriminant equal to Disc F). Cubics with fundamental discriminant
    /// are exactly the nowhere totally ramified ones.
    pub fn h3_star_sum(&self, x: u64, q: u64) -> Result<u64> {
        self.check_range(x)?;
        validated_primes(q)?;
        let mut by_disc: BTreeMap<i64, u64> = BTreeMap::new();
        for rec in &self.records {
            if rec.galois != GaloisType::S3 || !rec.nowhere_totally_ramified() {
                continue;
            }
            if let Some(d) = rec.signed_disc_i64() {
                if d.unsigned_abs() <= x {
                    debug_assert!(is_fundamental_disc(d));
                    *by_disc.entry(d).or_default() += 1;
                }
            }
        }
        let mut total = 0u64;
        let xi = x as i64;
        for d in -xi..=xi {
            if !is_fundamental_disc(d) || (q > 1 && d.unsigned_abs() % q != 0) {
                continue;
            }
            total += 1 + 2 * by_disc.get(&d).copied().unwrap_or(0);
        }
        Ok(total)
    }

    /// Scaled counts for boundedness inspection.
    pub fn uniformity_report(&self, x: u64, cells: &[(u64, u64)]) -> Result<Vec<UniformityRow>> {
        self.check_range(x)?;
        cells
            .iter()
            .map(|&(q, r)| {
                let count = if q as u128 * (r as u128).pow(2) > x as u128 {
                    0
                } else {
                    self.count_with_conditions(x, q, r)?
                };
                let ratio = count as f64 * (q as f64).powf(1.0 / 6.0) * (r as f64).powi(2)
                    / x as f64;
                Ok(UniformityRow { q, r, count, ratio })
            })
            .collect()
    }
}

/// d is a fundamental quadratic discriminant (d != 0, 1).
pub fn is_fundamental_disc(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        squarefree(d.unsigned_abs())
    } else if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        (r == 2 || r == 3) && squarefree(m.unsigned_abs())
    } else {
        false
    }
}

fn squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Squarefree, coprime-to-6 moduli for ramification conditions; returns the
/// prime divisors.
fn validated_primes(q: u64) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::InvalidCondition("modulus must be positive".into()));
    }
    let mut n = q;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Err(Error::InvalidCondition(format!("{q} is not squarefree")));
            }
            out.push(p);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    if out.iter().any(|&p| p == 2 || p == 3) {
        return Err(Error::InvalidCondition(format!(
            "{q} has a wild prime factor (2 or 3)"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(x: u64) -> CubicTable {
        CubicTable::build(x).unwrap()
    }

    #[test]
    fn x100_field_list() {
        let t = table(100);
        let s3: Vec<i64> = t
            .records
            .iter()
            .filter(|r| r.galois == GaloisType::S3)
            .map(|r| r.signed_disc_i64().unwrap())
            .collect();
        assert_eq!(s3, vec![-23, -31, -44, -59, -76, -83, -87]);
        let c3: Vec<i64> = t
            .records
            .iter()
            .filter(|r| r.galois == GaloisType::C3)
            .map(|r| r.signed_disc_i64().unwrap())
            .collect();
        assert_eq!(c3, vec![49, 81]);
    }

    #[test]
    fn cyclic_cubics_up_to_1000() {
        let t = table(1000);
        let c3: Vec<i64> = t
            .records
            .iter()
            .filter(|r| r.galois == GaloisType::C3)
            .map(|r| r.signed_disc_i64().unwrap())
            .collect();
        // squares of the conductors 7, 9, 13, 19, 31
        assert_eq!(c3, vec![49, 81, 169, 361, 961]);
    }

    #[test]
    fn ramification_classification() {
        let t = table(100);
        let rec44 = t
            .records
            .iter()
            .find(|r| r.signed_disc_i64() == Some(-44))
            .unwrap();
        assert_eq!(
            rec44.classify_ramification(11),
            LocalDatum::Tame(TameInertia::S3Partial)
        );
        let rec23 = t
            .records
            .iter()
            .find(|r| r.signed_disc_i64() == Some(-23))
            .unwrap();
        assert_eq!(
            rec23.classify_ramification(5),
            LocalDatum::Tame(TameInertia::Unramified)
        );
        assert_eq!(
            rec23.classify_ramification(23),
            LocalDatum::Tame(TameInertia::S3Partial)
        );
    }

    #[test]
    fn tame_valuations_in_law() {
        let t = table(2000);
        for rec in &t.records {
            for (&p, datum) in &rec.ram {
                if p != 2 && p != 3 {
                    assert!(matches!(
                        datum,
                        LocalDatum::Tame(TameInertia::S3Partial)
                            | LocalDatum::Tame(TameInertia::S3Total)
                    ));
                }
                assert!(datum.disc_exponent() >= 1);
            }
            // product of local exponents reconstructs |disc|
            let mut prod = BigUint::from(1u32);
            for (&p, datum) in &rec.ram {
                prod *= BigUint::from(p).pow(datum.disc_exponent());
            }
            assert_eq!(prod, rec.abs_disc);
        }
    }

    #[test]
    fn nowhere_total_matches_fundamental() {
        let t = table(2000);
        for rec in t.records.iter().filter(|r| r.galois == GaloisType::S3) {
            assert_eq!(
                rec.nowhere_totally_ramified(),
                is_fundamental_disc(rec.signed_disc_i64().unwrap()),
                "disc {:?}",
                rec.signed_disc_i64()
            );
        }
    }

    #[test]
    fn conditioned_counts() {
        let t = table(100);
        assert_eq!(t.count_with_conditions(100, 11, 1).unwrap(), 1);
        assert_eq!(t.count_with_conditions(100, 1, 1).unwrap(), 7);
        assert_eq!(t.count_with_conditions(100, 1, 5).unwrap(), 0);
        assert!(t.count_with_conditions(100, 10, 1).is_err()); // wild factor 2
        assert!(t.count_with_conditions(100, 25, 1).is_err()); // not squarefree
        assert!(t.count_with_conditions(100, 5, 5).is_err()); // overlap
    }

    #[test]
    fn h3_sums() {
        let t = table(100);
        // |D| <= 3: only D = -3, class number 1
        assert_eq!(t.h3_star_sum(3, 1).unwrap(), 1);
        // 15 fundamental discs with |D| <= 23, one cubic (disc -23)
        assert_eq!(t.h3_star_sum(23, 1).unwrap(), 15 + 2);
        assert_eq!(t.h3_star_sum(100, 101).unwrap(), 0);
    }

    #[test]
    fn uniformity_zero_cells() {
        let t = table(100);
        let rows = t.uniformity_report(100, &[(1, 1), (101, 1), (1, 11)]).unwrap();
        assert_eq!(rows[0].count, 7);
        assert_eq!(rows[1].count, 0);
        assert_eq!(rows[2].count, 0); // q r^2 = 121 > 100
    }
}
