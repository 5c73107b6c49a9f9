//! The inclusion-exclusion sieve over joint ramification profiles of pairs
//! (K, L): K an S3 cubic field, L a C_ell field, ordered by the compositum
//! discriminant Disc(KL) = Disc(K)^m Disc(L)^3 / L_rho.
//!
//! A local condition rho = (wild block, q-matrix) prescribes the exact local
//! pair data at the primes dividing m and, per sieve cell (cubic shape x
//! element order), a squarefree modulus of jointly tamely ramified primes.
//! B(rho^alpha, X) counts pairs meeting rho with the product discriminant
//! below X, where alpha marks per cell whether the listed primes are the
//! only ones realizing that cell. G(X) is assembled as
//! sum over rho of B(rho^0, X L_rho) and checked against an independent
//! direct count over the enumerated pools; all discriminant comparisons are
//! exact big-integer comparisons.

use crate::cubic::{enumerate_cubic_fields, FieldRecord, GaloisType, LocalDatum};
use crate::abelian::enumerate_cl_fields;
use crate::error::{Error, Result};
use crate::permgroup::{compositum_exponent_tame, AbelianGroupSpec, TameInertia};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet, HashSet};

/// Exact local pair data at a prime dividing m: the (tame) cubic inertia
/// class and whether L is wildly ramified there (conductor exponent 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WildPair {
    pub sigma: TameInertia,
    pub lambda_wild: bool,
}

/// A sieve condition rho = (w, q_ij): exact wild-prime data plus, per cell
/// (i, element order), a squarefree product of jointly ramified tame primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LocalConditionRho {
    pub wild: BTreeMap<u64, WildPair>,
    pub q: BTreeMap<(u8, u32), u64>,
}

/// Compositum discriminant defect at ell when L is wild there (conductor
/// ell^2) and K is tame with v = v_ell(Disc K): e = v (ell - 1). Derived
/// from conductor-discriminant over the 3 ell-point permutation
/// representation: the ell characters restrict to v + 6(ell-1) per
/// nontrivial twist; see the fixture test below.
pub fn wild_compositum_exponent(sigma: TameInertia, ell: u32) -> Result<u64> {
    let v = match sigma {
        TameInertia::Unramified => 0u64,
        TameInertia::S3Partial => 1,
        TameInertia::S3Total => 2,
        TameInertia::AbelianElem { .. } => {
            return Err(Error::UnsupportedWild { p: ell })
        }
    };
    Ok(v * u64::from(ell - 1))
}

fn validate_rho(rho: &LocalConditionRho, group: &AbelianGroupSpec) -> Result<()> {
    let m = group.order();
    let orders: BTreeSet<u32> = group.nonidentity_orders().into_iter().collect();
    for (&p, _) in &rho.wild {
        if m % p != 0 {
            return Err(Error::InvalidCondition(format!(
                "wild-block prime {p} does not divide |A| = {m}"
            )));
        }
    }
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    for (&(i, order), &q) in &rho.q {
        if i != 1 && i != 2 {
            return Err(Error::InvalidCondition(format!("cell shape {i} not in {{1,2}}")));
        }
        if !orders.contains(&order) {
            return Err(Error::InvalidCondition(format!(
                "no element of order {order} in A"
            )));
        }
        for p in prime_factors_squarefree(q)? {
            if 6 * m % p == 0 {
                return Err(Error::InvalidCondition(format!(
                    "tame modulus prime {p} divides 6|A|"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::InvalidCondition(format!(
                    "prime {p} appears in two cells"
                )));
            }
        }
    }
    Ok(())
}

fn prime_factors_squarefree(mut n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidCondition("zero modulus".into()));
    }
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Err(Error::InvalidCondition(format!("modulus not squarefree at {p}")));
            }
            out.push(p);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Ok(out)
}

/// The exact integer L_rho = prod_{p in w} p^{e(sigma_p, lambda_p)}
/// prod q_ij^{e(a_i, b_j)}.
pub fn l_rho(rho: &LocalConditionRho, group: &AbelianGroupSpec) -> Result<BigUint> {
    validate_rho(rho, group)?;
    let m = group.order() as u32;
    let mut out = BigUint::one();
    for (&p, wp) in &rho.wild {
        if wp.lambda_wild {
            let e = wild_compositum_exponent(wp.sigma, p as u32)?;
            out *= BigUint::from(p).pow(e as u32);
        }
    }
    for (&(i, order), &q) in &rho.q {
        let sigma = if i == 1 { TameInertia::S3Partial } else { TameInertia::S3Total };
        let e = compositum_exponent_tame(sigma, TameInertia::AbelianElem { order }, m);
        out *= BigUint::from(q).pow(e as u32);
    }
    Ok(out)
}

/// K's local class at p as a tame inertia value; None for wild ramification.
fn cubic_class(k: &FieldRecord, p: u64) -> Option<TameInertia> {
    match k.ram.get(&p) {
        None => Some(TameInertia::Unramified),
        Some(LocalDatum::Tame(t)) => Some(*t),
        Some(LocalDatum::Wild { .. }) => None,
    }
}

/// L's tame inertia order at p (None if unramified or wild there).
fn abelian_tame_order(l: &FieldRecord, p: u64) -> Option<u32> {
    match l.ram.get(&p) {
        Some(LocalDatum::Tame(TameInertia::AbelianElem { order })) => Some(*order),
        _ => None,
    }
}

fn abelian_wild_at(l: &FieldRecord, p: u64) -> bool {
    matches!(l.ram.get(&p), Some(LocalDatum::Wild { .. }))
}

/// The exact profile rho(K, L): one wild-block entry per prime dividing m,
/// one q-matrix prime per jointly tamely ramified prime.
pub fn pair_profile(
    k: &FieldRecord,
    l: &FieldRecord,
    group: &AbelianGroupSpec,
) -> Result<LocalConditionRho> {
    let m = group.order();
    let mut rho = LocalConditionRho::default();
    let mut p = 2u64;
    let mut rest = m;
    while rest > 1 {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            let sigma = cubic_class(k, p).ok_or(Error::UnsupportedWild { p: p as u32 })?;
            rho.wild.insert(p, WildPair { sigma, lambda_wild: abelian_wild_at(l, p) });
        }
        p += 1;
    }
    for (&p, _) in &l.ram {
        if m % p == 0 {
            continue;
        }
        let Some(order) = abelian_tame_order(l, p) else {
            return Err(Error::UnsupportedWild { p: p as u32 });
        };
        match cubic_class(k, p) {
            Some(TameInertia::S3Partial) => *rho.q.entry((1, order)).or_insert(1) *= p,
            Some(TameInertia::S3Total) => *rho.q.entry((2, order)).or_insert(1) *= p,
            Some(_) => {}
            None => return Err(Error::UnsupportedWild { p: p as u32 }),
        }
    }
    Ok(rho)
}

/// Disc(KL) = Disc(K)^m Disc(L)^3 / L_rho(K,L), as an exact big integer.
pub fn pair_discriminant(
    k: &FieldRecord,
    l: &FieldRecord,
    group: &AbelianGroupSpec,
) -> Result<BigUint> {
    let rho = pair_profile(k, l, group)?;
    let denom = l_rho(&rho, group)?;
    let num = k.abs_disc.pow(group.order() as u32) * l.abs_disc.pow(3u32);
    let (quot, rem) = num.div_rem(&denom);
    assert!(rem == BigUint::from(0u32), "L_rho must divide the product discriminant");
    Ok(quot)
}

use num_integer::Integer as _;

/// Immutable enumerated field pools for oracle-mode pair counting.
pub struct PairPools {
    pub group: AbelianGroupSpec,
    pub cubics: Vec<FieldRecord>,
    pub abelians: Vec<FieldRecord>,
    k_bound: u64,
    l_bound: u64,
    /// Disc(K)^m and Disc(L)^3, precomputed.
    k_pow: Vec<BigUint>,
    l_cubed: Vec<BigUint>,
}

impl PairPools {
    /// Enumerate S3 cubics with |disc| <= k_bound and C_ell fields with
    /// disc <= l_bound.
    pub fn build(ell: u32, k_bound: u64, l_bound: u64) -> Result<Self> {
        if ell <= 5 {
            return Err(Error::UnsupportedWild { p: ell });
        }
        let group = AbelianGroupSpec::cyclic(ell);
        let cubics: Vec<FieldRecord> = enumerate_cubic_fields(k_bound)?
            .into_iter()
            .filter(|f| f.galois == GaloisType::S3)
            .collect();
        let abelians = enumerate_cl_fields(ell, l_bound)?;
        let m = group.order() as u32;
        let k_pow = cubics.iter().map(|f| f.abs_disc.pow(m)).collect();
        let l_cubed = abelians.iter().map(|f| f.abs_disc.pow(3u32)).collect();
        Ok(PairPools { group, cubics, abelians, k_bound, l_bound, k_pow, l_cubed })
    }

    /// Hand-assembled pools (fixtures).
    pub fn synthetic(
        group: AbelianGroupSpec,
        cubics: Vec<FieldRecord>,
        abelians: Vec<FieldRecord>,
    ) -> Self {
        let m = group.order() as u32;
        let k_bound = cubics.iter().filter_map(|f| f.abs_disc_u64()).max().unwrap_or(0);
        let l_bound = abelians.iter().filter_map(|f| f.abs_disc_u64()).max().unwrap_or(0);
        let k_pow = cubics.iter().map(|f| f.abs_disc.pow(m)).collect();
        let l_cubed = abelians.iter().map(|f| f.abs_disc.pow(3u32)).collect();
        PairPools { group, cubics, abelians, k_bound, l_bound, k_pow, l_cubed }
    }

    fn ell(&self) -> u32 {
        self.group.order() as u32
    }

    /// Largest X for which every pair with Disc(KL) <= X lies in the pools:
    /// Disc(KL) >= Disc(K)^m Disc(L) (since L_rho | Disc(L)^2) and
    /// Disc(KL) >= Disc(K) Disc(L)^3 (since L_rho | Disc(K)^{m-1}), so the
    /// out-of-pool minima bound the reachable range.
    pub fn coverage_limit(&self) -> BigUint {
        let ell = self.ell();
        // least possible C_ell discriminant: f0^{ell-1} with f0 the smaller
        // of ell^2 and the least prime = 1 mod ell
        let mut p = 2u64 * u64::from(ell);
        let least_prime = loop {
            let q = p + 1;
            if q % u64::from(ell) == 1 && prime_factors_squarefree(q).map_or(false, |f| f == [q]) {
                break q;
            }
            p += u64::from(ell);
        };
        let f0 = least_prime.min(u64::from(ell) * u64::from(ell));
        let min_l = BigUint::from(f0).pow(ell - 1);
        let min_k = BigUint::from(23u32); // least |disc| of an S3 cubic
        let via_k = BigUint::from(self.k_bound).pow(ell) * min_l;
        let via_l = BigUint::from(self.l_bound).pow(3u32) * min_k;
        via_k.min(via_l)
    }

    fn check_coverage(&self, x: &BigUint) -> Result<()> {
        let limit = self.coverage_limit();
        if *x > limit {
            return Err(Error::Coverage(format!(
                "X = {x} exceeds the pool coverage limit {limit}"
            )));
        }
        Ok(())
    }

    /// Primes that are tamely ramified in some pool L and (partially or
    /// totally) ramified in some pool K: the only candidates for extra
    /// sieve primes.
    fn joint_tame_primes(&self) -> Vec<u64> {
        let m = self.group.order();
        let l_primes: BTreeSet<u64> = self
            .abelians
            .iter()
            .flat_map(|l| l.ram.keys().copied())
            .filter(|&p| m % p != 0)
            .collect();
        l_primes
            .into_iter()
            .filter(|&p| {
                self.cubics.iter().any(|k| {
                    matches!(
                        cubic_class(k, p),
                        Some(TameInertia::S3Partial | TameInertia::S3Total)
                    )
                })
            })
            .collect()
    }
}

fn matches_rho1(k: &FieldRecord, l: &FieldRecord, rho: &LocalConditionRho) -> Result<bool> {
    for (&p, wp) in &rho.wild {
        let sigma = cubic_class(k, p).ok_or(Error::UnsupportedWild { p: p as u32 })?;
        if sigma != wp.sigma || abelian_wild_at(l, p) != wp.lambda_wild {
            return Ok(false);
        }
    }
    for (&(i, order), &q) in &rho.q {
        let want = if i == 1 { TameInertia::S3Partial } else { TameInertia::S3Total };
        for p in prime_factors_squarefree(q)? {
            if cubic_class(k, p) != Some(want) || abelian_tame_order(l, p) != Some(order) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// B(rho^alpha, X): pairs satisfying rho with Disc(K)^m Disc(L)^3 <= X.
/// `exclusive` lists the cells with alpha = 0 (their q-primes must be the
/// only primes realizing the cell).
pub fn b_count(
    rho: &LocalConditionRho,
    exclusive: &BTreeSet<(u8, u32)>,
    x: &BigUint,
    pools: &PairPools,
) -> Result<u64> {
    validate_rho(rho, &pools.group)?;
    let mut count = 0u64;
    for (ki, k) in pools.cubics.iter().enumerate() {
        for (li, l) in pools.abelians.iter().enumerate() {
            if &pools.k_pow[ki] * &pools.l_cubed[li] > *x {
                continue;
            }
            if !matches_rho1(k, l, rho)? {
                continue;
            }
            if !exclusive.is_empty() {
                let profile = pair_profile(k, l, &pools.group)?;
                let exact = exclusive.iter().all(|cell| {
                    profile.q.get(cell).copied().unwrap_or(1)
                        == rho.q.get(cell).copied().unwrap_or(1)
                });
                if !exact {
                    continue;
                }
            }
            count += 1;
        }
    }
    Ok(count)
}

fn all_cells(group: &AbelianGroupSpec) -> BTreeSet<(u8, u32)> {
    group
        .nonidentity_orders()
        .into_iter()
        .flat_map(|o| [(1u8, o), (2u8, o)])
        .collect()
}

/// B(rho^0, X) by Moebius summation over all eta coprime to rho:
/// sum mu(eta) B((rho eta)^1, X). Candidate primes come from the pools'
/// jointly ramifiable set; branches whose forced minimal product
/// discriminant already exceeds X are pruned.
pub fn inclusion_exclusion(
    rho: &LocalConditionRho,
    x: &BigUint,
    pools: &PairPools,
) -> Result<i64> {
    validate_rho(rho, &pools.group)?;
    let m = pools.group.order();
    let used: BTreeSet<u64> = rho
        .q
        .values()
        .map(|&q| prime_factors_squarefree(q))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let candidates: Vec<u64> = pools
        .joint_tame_primes()
        .into_iter()
        .filter(|p| !used.contains(p))
        .collect();
    let cells: Vec<(u8, u32)> = all_cells(&pools.group).into_iter().collect();
    fn rec(
        current: &mut LocalConditionRho,
        cand: &[u64],
        idx: usize,
        sign: i64,
        min_extra: &BigUint,
        x: &BigUint,
        m: u64,
        cells: &[(u8, u32)],
        pools: &PairPools,
        acc: &mut i64,
    ) -> Result<()> {
        if idx == cand.len() {
            *acc += sign * b_count(current, &BTreeSet::new(), x, pools)? as i64;
            return Ok(());
        }
        // candidate not in eta
        rec(current, cand, idx + 1, sign, min_extra, x, m, cells, pools, acc)?;
        let p = cand[idx];
        for &(i, order) in cells {
            // forced minimum: p^{m i} from Disc(K)^m, p^{3(m - m/order)}
            // from Disc(L)^3
            let e = m * u64::from(i) + 3 * (m - m / u64::from(order));
            let extra = min_extra * BigUint::from(p).pow(e as u32);
            if &extra > x {
                continue;
            }
            let entry = current.q.entry((i, order)).or_insert(1);
            *entry *= p;
            rec(current, cand, idx + 1, -sign, &extra, x, m, cells, pools, acc)?;
            let entry = current.q.entry((i, order)).or_insert(1);
            *entry /= p;
            if *entry == 1 {
                current.q.remove(&(i, order));
            }
        }
        Ok(())
    }
    let mut acc = 0i64;
    let mut current = rho.clone();
    let min_extra = BigUint::one();
    rec(
        &mut current,
        &candidates,
        0,
        1,
        &min_extra,
        x,
        m,
        &cells,
        pools,
        &mut acc,
    )?;
    Ok(acc)
}

/// G(X) = #{(K, L) : Disc(KL) <= X} assembled through the sieve:
/// sum over realized profiles rho of B(rho^0, X L_rho), each B computed by
/// inclusion-exclusion.
pub fn assemble_g(x: &BigUint, pools: &PairPools) -> Result<u64> {
    pools.check_coverage(x)?;
    let mut profiles: HashSet<LocalConditionRho> = HashSet::new();
    for k in &pools.cubics {
        for l in &pools.abelians {
            profiles.insert(pair_profile(k, l, &pools.group)?);
        }
    }
    let mut total = 0i64;
    for rho in &profiles {
        let scaled = x * l_rho(rho, &pools.group)?;
        total += inclusion_exclusion(rho, &scaled, pools)?;
    }
    assert!(total >= 0, "assembled count must be nonnegative");
    Ok(total as u64)
}

/// Independent oracle: count pairs by their individually computed
/// compositum discriminants.
pub fn direct_pair_count(x: &BigUint, pools: &PairPools) -> Result<u64> {
    pools.check_coverage(x)?;
    let mut count = 0u64;
    for k in &pools.cubics {
        for l in &pools.abelians {
            if pair_discriminant(k, l, &pools.group)? <= *x {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// A synthetic multiset factor with counting function N(t) and its known
/// asymptotic N(t) <= A t^n ln^r t.
pub struct SyntheticFactor {
    pub a_const: f64,
    pub n: f64,
    pub r: u32,
    pub count: Box<dyn Fn(u64) -> u64 + Sync>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ProductLemmaReport {
    pub p_x: u64,
    pub explicit_bound: f64,
    pub bound_holds: bool,
    /// (X, P(X) / (X^{n1/a} ln^{r1} X)) over a ladder through the last
    /// decade below X.
    pub ratios: Vec<(f64, f64)>,
    pub last_decade_variation: f64,
}

/// P_{a,b}(X) = #{(s1, s2) : s1^a s2^b <= X} for two synthetic factors,
/// with the explicit bound
/// A1 A2 (r2! / (b^{r2} a^{r1})) (n1/a - n2/b)^{-(r2+1)} (n1/a)
/// X^{n1/a} ln^{r1} X.
pub fn product_lemma_check(
    f1: &SyntheticFactor,
    f2: &SyntheticFactor,
    a: u32,
    b: u32,
    x: u64,
) -> Result<ProductLemmaReport> {
    if a == 0 || b == 0 {
        return Err(Error::HypothesisViolation("a, b must be positive".into()));
    }
    let (e1, e2) = (f1.n / f64::from(a), f2.n / f64::from(b));
    if e1 <= e2 {
        return Err(Error::HypothesisViolation(format!(
            "requires n1/a > n2/b, got {e1} <= {e2}"
        )));
    }
    let p_at = |x: u64| -> u64 {
        let mut total = 0u64;
        let mut prev = 0u64;
        let mut s2 = 1u64;
        loop {
            let cost = (s2 as u128).pow(b);
            if cost > u128::from(x) {
                break;
            }
            let n2 = (f2.count)(s2);
            let weight = n2 - prev;
            prev = n2;
            if weight > 0 {
                let budget = u128::from(x) / cost;
                // largest s1 with s1^a <= budget
                let mut t = (budget as f64).powf(1.0 / f64::from(a)) as u64 + 2;
                while t > 0 && (t as u128).pow(a) > budget {
                    t -= 1;
                }
                total += weight * (f1.count)(t);
            }
            s2 += 1;
        }
        total
    };
    let p_x = p_at(x);
    let xf = x as f64;
    let fact: f64 = (1..=f2.r).map(f64::from).product::<f64>().max(1.0);
    let explicit_bound = f1.a_const
        * f2.a_const
        * (fact / (f64::from(b).powi(f2.r as i32) * f64::from(a).powi(f1.r as i32)))
        * (e1 - e2).powi(-(f2.r as i32 + 1))
        * e1
        * xf.powf(e1)
        * xf.ln().powi(f1.r as i32);
    let normalize = |x: u64, p: u64| {
        let xf = x as f64;
        let lg = if f1.r > 0 { xf.ln().powi(f1.r as i32) } else { 1.0 };
        p as f64 / (xf.powf(e1) * lg)
    };
    let mut ratios = Vec::new();
    for i in 0..=4u32 {
        // five points spanning the decade [X/10, X]
        let xi = ((x as f64) / 10f64.powf(f64::from(4 - i) / 4.0)).round() as u64;
        ratios.push((xi as f64, normalize(xi, p_at(xi))));
    }
    let lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.1).fold(0.0f64, f64::max);
    Ok(ProductLemmaReport {
        p_x,
        explicit_bound,
        bound_holds: (p_x as f64) <= explicit_bound,
        ratios,
        last_decade_variation: hi / lo - 1.0,
    })
}
