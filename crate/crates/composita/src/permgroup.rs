//! Cycle-type arithmetic, abelian group invariants, and tame compositum
//! discriminant exponents.
//!
//! Everything here is exact integer arithmetic on conjugacy data: a tamely
//! ramified inertia group is generated by a single element, and the exponent
//! of `p` in the discriminant of a compositum depends only on the cycle types
//! of the two inertia generators.

use crate::error::{Error, Result};
use num_integer::Integer;

/// A cycle type: the multiset of cycle lengths of a permutation, kept sorted
/// in decreasing order. The degree is the sum of the parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    parts: Vec<u32>,
}

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(!parts.is_empty() && parts.iter().all(|&p| p >= 1));
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    /// Cycle type of an element of order `order` in the regular representation
    /// of an abelian group of order `m`: m/order cycles of length `order`.
    pub fn regular(order: u32, m: u32) -> Self {
        assert!(order >= 1 && m % order == 0);
        CycleType {
            parts: vec![order; (m / order) as usize],
        }
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// ind(g) = degree - number of orbits.
    pub fn index(&self) -> u32 {
        self.degree() - self.parts.len() as u32
    }
}

/// Number of orbits of the pair acting on the product of the two underlying
/// sets: sum of gcd(|c_k|, |d_l|) over all cycle pairs.
pub fn pair_orbit_count(ct1: &CycleType, ct2: &CycleType) -> u64 {
    let mut total = 0u64;
    for &c in ct1.parts() {
        for &d in ct2.parts() {
            total += u64::from(c.gcd(&d));
        }
    }
    total
}

/// Index of the pair element acting on degree(ct1) * degree(ct2) letters.
pub fn pair_index(ct1: &CycleType, ct2: &CycleType) -> u64 {
    u64::from(ct1.degree()) * u64::from(ct2.degree()) - pair_orbit_count(ct1, ct2)
}

/// A tame inertia class for one side of a pair (K cubic, L abelian).
///
/// Unramified is an explicit variant; the compositum exponent with an
/// unramified side is 0 by definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TameInertia {
    Unramified,
    /// Inertia generated by a transposition: p partially ramified in the cubic.
    S3Partial,
    /// Inertia generated by a 3-cycle: p totally ramified in the cubic.
    S3Total,
    /// Non-identity element of the abelian group, stored by its order.
    AbelianElem { order: u32 },
}

impl TameInertia {
    /// Cycle type in the defining permutation representation. `m` is |A| and
    /// is only consulted for the abelian case.
    pub fn cycle_type(&self, m: u32) -> Option<CycleType> {
        match *self {
            TameInertia::Unramified => None,
            TameInertia::S3Partial => Some(CycleType::new(vec![2, 1])),
            TameInertia::S3Total => Some(CycleType::new(vec![3])),
            TameInertia::AbelianElem { order } => {
                assert!(order > 1, "abelian inertia must be a non-identity element");
                Some(CycleType::regular(order, m))
            }
        }
    }

    /// Valuation of the discriminant on this side alone (= index of the
    /// generator), 0 when unramified.
    pub fn disc_exponent(&self, m: u32) -> u32 {
        self.cycle_type(m).map_or(0, |ct| ct.index())
    }
}

/// e(sigma, lambda): the defect of Disc(KL) below Disc(K)^m Disc(L)^3 at a
/// prime where both sides are tame. Computed from
/// `p^e = Disc(sigma)^m Disc(lambda)^3 / Disc(sigma, lambda)`
/// with the compositum exponent `3m - sum gcd` of the cycle data.
pub fn compositum_exponent_tame(sigma: TameInertia, lambda: TameInertia, m: u32) -> u64 {
    let (ct1, ct2) = match (sigma.cycle_type(3), lambda.cycle_type(m)) {
        (Some(a), Some(b)) => (a, b),
        // An unramified side contributes nothing to the defect.
        _ => return 0,
    };
    debug_assert_eq!(ct1.degree(), 3);
    debug_assert_eq!(ct2.degree(), m);
    let pair_exp = u64::from(3 * m) - pair_orbit_count(&ct1, &ct2);
    u64::from(m) * u64::from(ct1.index()) + 3 * u64::from(ct2.index()) - pair_exp
}

/// Cap below which abelian invariants are established by exhausting elements;
/// above it the proven closed forms are used directly.
pub const EXHAUSTIVE_CAP: u64 = 10_000;

/// An odd abelian group in invariant-factor-style presentation, with the
/// derived invariants used throughout the exponent calculus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupSpec {
    factors: Vec<u32>,
    m: u64,
    p_min: u32,
}

impl std::fmt::Display for AbelianGroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|c| format!("C{c}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl AbelianGroupSpec {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::GroupSpec("empty factor list".into()));
        }
        let mut m: u64 = 1;
        for &f in &factors {
            if f < 2 {
                return Err(Error::GroupSpec(format!("factor {f} < 2")));
            }
            if f % 2 == 0 {
                return Err(Error::GroupSpec(format!("factor {f} is even; A must be odd")));
            }
            m = m
                .checked_mul(u64::from(f))
                .ok_or_else(|| Error::GroupSpec("group order overflows u64".into()))?;
        }
        let p_min = smallest_prime_divisor(m);
        Ok(AbelianGroupSpec { factors, m, p_min })
    }

    /// Cyclic group of prime order.
    pub fn cyclic(ell: u32) -> Self {
        AbelianGroupSpec::new(vec![ell]).expect("odd ell")
    }

    /// Parse the CLI grammar "C{n}" joined by "x", e.g. "C3xC9".
    pub fn parse(spec: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for piece in spec.split(['x', 'X']) {
            let piece = piece.trim();
            let digits = piece
                .strip_prefix(['C', 'c'])
                .ok_or_else(|| Error::GroupSpec(format!("bad component {piece:?}")))?;
            let n: u32 = digits
                .parse()
                .map_err(|_| Error::GroupSpec(format!("bad component {piece:?}")))?;
            factors.push(n);
        }
        AbelianGroupSpec::new(factors)
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    pub fn p_min(&self) -> u32 {
        self.p_min
    }

    /// ind(A) = m - m/p_min, the minimal index over non-identity elements.
    pub fn ind(&self) -> u64 {
        if self.m <= EXHAUSTIVE_CAP {
            self.element_orders()
                .into_iter()
                .filter(|&(d, _)| d > 1)
                .map(|(d, _)| self.m - self.m / u64::from(d))
                .min()
                .expect("non-trivial group")
        } else {
            self.m - self.m / u64::from(self.p_min)
        }
    }

    /// Malle invariant a(A) = ind(A) for abelian A.
    pub fn a_invariant(&self) -> u64 {
        self.ind()
    }

    /// Distinct element orders with multiplicities, by direct iteration over
    /// the product of cyclic factors (requires m within the exhaustive cap).
    pub fn element_orders(&self) -> Vec<(u32, u64)> {
        assert!(self.m <= EXHAUSTIVE_CAP, "element iteration capped at m <= 10^4");
        let mut counts: std::collections::BTreeMap<u32, u64> = Default::default();
        let mut idx = vec![0u32; self.factors.len()];
        loop {
            let order = idx
                .iter()
                .zip(&self.factors)
                .map(|(&i, &f)| f / f.gcd(&i))
                .fold(1u32, |acc, o| acc.lcm(&o));
            *counts.entry(order).or_insert(0) += 1;
            // odometer increment
            let mut k = 0;
            loop {
                if k == self.factors.len() {
                    let total: u64 = counts.values().sum();
                    debug_assert_eq!(total, self.m);
                    return counts.into_iter().collect();
                }
                idx[k] += 1;
                if idx[k] < self.factors[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Distinct non-identity element orders. For m above the exhaustive cap
    /// these are the divisors > 1 of the exponent of A.
    pub fn nonidentity_orders(&self) -> Vec<u32> {
        if self.m <= EXHAUSTIVE_CAP {
            self.element_orders()
                .into_iter()
                .filter(|&(d, _)| d > 1)
                .map(|(d, _)| d)
                .collect()
        } else {
            let exponent = self.factors.iter().fold(1u64, |acc, &f| acc.lcm(&u64::from(f)));
            divisors(exponent)
                .into_iter()
                .filter(|&d| d > 1)
                .map(|d| d as u32)
                .collect()
        }
    }
}

fn smallest_prime_divisor(m: u64) -> u32 {
    let mut p = 3u64;
    while p * p <= m {
        if m % p == 0 {
            return p as u32;
        }
        p += 2;
    }
    m as u32
}

fn divisors(n: u64) -> Vec<u64> {
    let mut divs = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            divs.push(d);
            if d * d != n {
                divs.push(n / d);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    divs
}

/// All odd abelian groups of order in [3, max_m], one per isomorphism class,
/// presented by prime-power cyclic factors.
pub fn all_odd_abelian(max_m: u64) -> Vec<AbelianGroupSpec> {
    let mut out = Vec::new();
    let mut m = 3u64;
    while m <= max_m {
        // prime-power partitions per prime, crossed over the factorization
        let mut lists: Vec<Vec<Vec<u32>>> = Vec::new();
        let mut n = m;
        let mut p = 3u64;
        while p * p <= n {
            if n % p == 0 {
                let mut e = 0u32;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                lists.push(
                    partitions(e)
                        .into_iter()
                        .map(|parts| parts.iter().map(|&k| (p as u32).pow(k)).collect())
                        .collect(),
                );
            }
            p += 2;
        }
        if n > 1 {
            lists.push(vec![vec![n as u32]]);
        }
        let mut combos: Vec<Vec<u32>> = vec![Vec::new()];
        for options in &lists {
            combos = combos
                .iter()
                .flat_map(|c| {
                    options.iter().map(move |opt| {
                        let mut c = c.clone();
                        c.extend_from_slice(opt);
                        c
                    })
                })
                .collect();
        }
        for factors in combos {
            out.push(AbelianGroupSpec::new(factors).expect("odd factors"));
        }
        m += 2;
    }
    out
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            rec(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Check the index inequalities ind((12),c) > 2m and ind((123),c) > m for all
/// non-identity c, by exhaustion. Returns any violating orders.
pub fn lemma24_check(group: &AbelianGroupSpec) -> (bool, Vec<u32>) {
    let m = group.order() as u32;
    let partial = CycleType::new(vec![2, 1]);
    let total = CycleType::new(vec![3]);
    let mut violations = Vec::new();
    for order in group.nonidentity_orders() {
        let ct = CycleType::regular(order, m);
        let ok = pair_index(&partial, &ct) > 2 * u64::from(m)
            && pair_index(&total, &ct) > u64::from(m);
        if !ok {
            violations.push(order);
        }
    }
    (violations.is_empty(), violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_basics() {
        assert_eq!(CycleType::new(vec![2, 1]).index(), 1);
        assert_eq!(CycleType::new(vec![3]).index(), 2);
        assert_eq!(CycleType::new(vec![5]).index(), 4);
    }

    #[test]
    fn orbit_counts() {
        let p21 = CycleType::new(vec![2, 1]);
        let c5 = CycleType::new(vec![5]);
        let c7 = CycleType::new(vec![7]);
        assert_eq!(pair_orbit_count(&p21, &c5), 2);
        assert_eq!(pair_orbit_count(&CycleType::new(vec![3]), &c7), 1);
        assert_eq!(pair_orbit_count(&p21, &CycleType::new(vec![3, 3, 3])), 6);
    }

    #[test]
    fn pair_indices() {
        let p21 = CycleType::new(vec![2, 1]);
        let t3 = CycleType::new(vec![3]);
        assert_eq!(pair_index(&p21, &CycleType::new(vec![5])), 13);
        assert_eq!(pair_index(&t3, &CycleType::new(vec![7])), 20);
        assert_eq!(pair_index(&t3, &CycleType::regular(3, 3)), 6);
    }

    #[test]
    fn compositum_exponents() {
        for ell in [5u32, 7, 11, 13] {
            let lam = TameInertia::AbelianElem { order: ell };
            assert_eq!(
                compositum_exponent_tame(TameInertia::S3Partial, lam, ell),
                u64::from(ell) - 1
            );
        }
        let gen7 = TameInertia::AbelianElem { order: 7 };
        assert_eq!(compositum_exponent_tame(TameInertia::S3Total, gen7, 7), 12);
        assert_eq!(
            compositum_exponent_tame(TameInertia::S3Partial, TameInertia::Unramified, 7),
            0
        );
        assert_eq!(
            compositum_exponent_tame(TameInertia::Unramified, gen7, 7),
            0
        );
    }

    #[test]
    fn group_enumeration() {
        // isomorphism classes of odd abelian groups: orders 3,5,7,9(x2),11,13,15
        let groups = all_odd_abelian(15);
        assert_eq!(groups.len(), 8);
        assert_eq!(groups.iter().filter(|g| g.order() == 9).count(), 2);
        let orders: Vec<u64> = groups.iter().map(|g| g.order()).collect();
        assert!(orders.contains(&15));
        // p^3 gives the three partitions of 3
        assert_eq!(all_odd_abelian(27).iter().filter(|g| g.order() == 27).count(), 3);
    }

    #[test]
    fn lemma24_small_groups() {
        for spec in ["C5", "C3", "C7xC7", "C3xC9", "C15"] {
            let g = AbelianGroupSpec::parse(spec).unwrap();
            let (ok, viols) = lemma24_check(&g);
            assert!(ok, "{spec}: violations {viols:?}");
        }
    }

    #[test]
    fn abelian_invariants() {
        let g = AbelianGroupSpec::parse("C3xC9").unwrap();
        assert_eq!(g.order(), 27);
        assert_eq!(g.p_min(), 3);
        assert_eq!(g.ind(), 27 - 9);
        let c35 = AbelianGroupSpec::parse("C35").unwrap();
        assert_eq!(c35.p_min(), 5);
        assert_eq!(c35.ind(), 35 - 7);
    }

    #[test]
    fn ind_matches_closed_form_exhaustively() {
        // every odd abelian A with m <= 45
        for m in (3u64..=45).step_by(2) {
            for factors in factorizations(m) {
                let g = AbelianGroupSpec::new(factors.clone()).unwrap();
                assert_eq!(
                    g.ind(),
                    m - m / u64::from(g.p_min()),
                    "factors {factors:?}"
                );
            }
        }
    }

    #[test]
    fn compositum_exponent_nonnegative_all_small_groups() {
        for m in (3u64..=45).step_by(2) {
            for factors in factorizations(m) {
                let g = AbelianGroupSpec::new(factors).unwrap();
                for order in g.nonidentity_orders() {
                    for sigma in [TameInertia::S3Partial, TameInertia::S3Total] {
                        let lam = TameInertia::AbelianElem { order };
                        // u64 subtraction would panic on underflow, which is the check
                        let _ = compositum_exponent_tame(sigma, lam, m as u32);
                    }
                }
            }
        }
    }

    #[test]
    fn coprime_orders_match_theorem_23() {
        // for gcd(e1, e2) = 1 the pair exponent is mn - k*l
        let p21 = CycleType::new(vec![2, 1]);
        for ell in [5u32, 7, 11, 13, 25, 35] {
            let ct = CycleType::regular(ell, ell);
            let k = p21.parts().len() as u64;
            let l = ct.parts().len() as u64;
            assert_eq!(pair_orbit_count(&p21, &ct), k * l);
        }
    }

    /// All multisets of odd factors > 1 with the given product.
    pub(super) fn factorizations(m: u64) -> Vec<Vec<u32>> {
        fn rec(m: u64, min: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if m == 1 {
                if !cur.is_empty() {
                    out.push(cur.clone());
                }
                return;
            }
            let mut d = min;
            while d <= m {
                if m % d == 0 {
                    cur.push(d as u32);
                    rec(m / d, d, cur, out);
                    cur.pop();
                }
                d += 2;
            }
        }
        let mut out = Vec::new();
        rec(m, 3, &mut Vec::new(), &mut out);
        out
    }
}
