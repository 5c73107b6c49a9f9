//! End-to-end acceptance gate. Every criterion prints exactly one
//! PASS/FAIL line; the test fails if any criterion fails.

use composita::abelian::enumerate_cl_fields;
use composita::cubic::{enumerate_cubic_fields, naive_forms, CubicTable};
use composita::densities::{global_constants, predicted_nqr};
use composita::euler::final_constants;
use composita::exponent::{
    calcweight_bruteforce, default_error_exponents, power_saving, power_saving_cross_check,
    rat, verify_inequalities, LatticeRange,
};
use composita::ingest;
use composita::permgroup::{all_odd_abelian, AbelianGroupSpec};
use composita::sieve::{
    assemble_g, direct_pair_count, product_lemma_check, PairPools, SyntheticFactor,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;

type Check = Result<String, String>;

// ---------------------------------------------------------------------------
// Independent oracle: 3-torsion of quadratic form class groups, computed from
// scratch with Gauss composition — no shared code with the cubic machinery.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct QForm {
    a: i64,
    b: i64,
    c: i64,
}

impl QForm {
    fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }
}

fn xgcd(p: i64, q: i64) -> (i64, i64, i64) {
    if q == 0 {
        let s = if p < 0 { -1 } else { 1 };
        return (p.abs(), s, 0);
    }
    let (g, x, y) = xgcd(q, p.rem_euclid(q));
    (g, y, x - (p.div_euclid(q)) * y)
}

/// Dirichlet composition of primitive forms of equal discriminant.
fn compose(f1: QForm, f2: QForm) -> QForm {
    let (f1, f2) = if f1.a.abs() > f2.a.abs() { (f2, f1) } else { (f1, f2) };
    let s = (f1.b + f2.b) / 2;
    let n = f2.b - s;
    let (y1, d) = if f2.a % f1.a == 0 {
        (0, f1.a)
    } else {
        let (d, u, _) = xgcd(f2.a, f1.a);
        (u, d)
    };
    let (x2, y2, d1) = if d != 0 && s % d == 0 {
        (0, -1, d)
    } else {
        let (d1, u, v) = xgcd(s, d);
        (u, -v, d1)
    };
    let v1 = f1.a / d1;
    let v2 = f2.a / d1;
    let r = (y1 * y2 * n - x2 * f2.c).rem_euclid(v1.abs().max(1));
    QForm {
        a: v1 * v2,
        b: f2.b + 2 * v2 * r,
        c: (f2.c * d1 + r * (f2.b + v2 * r)) / v1,
    }
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Reduction for definite forms (D < 0): |b| <= a <= c with the usual
/// boundary sign convention.
fn reduce_definite(mut f: QForm) -> QForm {
    debug_assert!(f.disc() < 0);
    if f.a < 0 {
        f = QForm { a: -f.a, b: f.b, c: -f.c }; // only arises transiently
    }
    loop {
        // normalize b into (-a, a]
        let twice = 2 * f.a;
        let mut b = f.b.rem_euclid(twice);
        if b > f.a {
            b -= twice;
        }
        let c = (b * b - f.disc()) / (4 * f.a);
        f = QForm { a: f.a, b, c };
        if f.a > f.c {
            f = QForm { a: f.c, b: -f.b, c: f.a };
            continue;
        }
        break;
    }
    if (f.a == f.b.abs() || f.a == f.c) && f.b < 0 {
        f.b = -f.b;
    }
    f
}

fn reduced_definite_forms(d: i64) -> Vec<QForm> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (b.abs() == a || a == c) {
                continue;
            }
            out.push(QForm { a, b, c });
        }
        a += 1;
    }
    out
}

/// Reduced indefinite form: 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b.
fn is_reduced_indefinite(f: QForm, d: i64) -> bool {
    let s = isqrt(d);
    // exact comparisons: b < sqrt(D) <=> b^2 < D for b > 0, etc.
    f.b > 0
        && f.b * f.b < d
        && (s - f.b) < 2 * f.a.abs()
        && {
            let t = 2 * f.a.abs() - f.b;
            t <= 0 || t * t < d
        }
        && {
            let t = 2 * f.a.abs() + f.b;
            t * t > d
        }
}

/// One reduction step for indefinite forms.
fn rho_indefinite(f: QForm, d: i64) -> QForm {
    let s = isqrt(d);
    let ca = 2 * f.c.abs();
    // b' = -b mod 2|c|, landing in the standard window
    let mut b = (-f.b).rem_euclid(ca);
    if f.c.abs() > s {
        // window (-|c|, |c|]
        if b > f.c.abs() {
            b -= ca;
        }
    } else {
        // window (sqrt(D) - 2|c|, sqrt(D))
        while b > s {
            b -= ca;
        }
        while b + ca <= s {
            b += ca;
        }
    }
    QForm { a: f.c, b, c: (b * b - d) / (4 * f.c) }
}

fn reduce_indefinite(mut f: QForm, d: i64) -> QForm {
    for _ in 0..500 {
        if is_reduced_indefinite(f, d) {
            return f;
        }
        f = rho_indefinite(f, d);
    }
    panic!("indefinite reduction did not converge for disc {d}");
}

/// Count of 3-torsion classes #Cl[3] for a fundamental discriminant d;
/// computed in the narrow (form) class group, whose odd part equals the
/// ordinary one.
fn three_torsion(d: i64) -> u64 {
    if d < 0 {
        let forms = reduced_definite_forms(d);
        let b0 = d.rem_euclid(2);
        let principal = reduce_definite(QForm { a: 1, b: b0, c: (b0 * b0 - d) / 4 });
        forms
            .iter()
            .filter(|&&f| {
                let cube = reduce_definite(compose(reduce_definite(compose(f, f)), f));
                cube == principal
            })
            .count() as u64
    } else {
        // enumerate all reduced forms and partition into rho-cycles
        let s = isqrt(d);
        let mut forms = Vec::new();
        for b in 1..=s {
            if (b - d).rem_euclid(2) != 0 || b * b >= d {
                continue;
            }
            let num = b * b - d;
            // 2|a| ranges over even values strictly between sqrt(D) -/+ b
            for a2 in (s - b + 1)..(s + b) {
                if a2 <= 0 || a2 % 2 != 0 {
                    continue;
                }
                let aa = a2 / 2;
                if aa == 0 || num % (4 * aa) != 0 {
                    continue;
                }
                for a in [aa, -aa] {
                    let f = QForm { a, b, c: num / (4 * a) };
                    if is_reduced_indefinite(f, d) {
                        forms.push(f);
                    }
                }
            }
        }
        forms.sort_by_key(|f| (f.a, f.b));
        forms.dedup();
        // cycle decomposition
        let mut cycle_of = std::collections::HashMap::new();
        let mut n_cycles = 0usize;
        for &f in &forms {
            if cycle_of.contains_key(&f) {
                continue;
            }
            let id = n_cycles;
            n_cycles += 1;
            let mut g = f;
            loop {
                cycle_of.insert(g, id);
                g = rho_indefinite(g, d);
                assert!(is_reduced_indefinite(g, d));
                if g == f {
                    break;
                }
            }
        }
        let class = |f: QForm| -> usize { cycle_of[&reduce_indefinite(f, d)] };
        let b0 = (1..=s).rev().find(|b| (b - d).rem_euclid(2) == 0).unwrap();
        let principal = class(QForm { a: 1, b: b0, c: (b0 * b0 - d) / 4 });
        let mut count = 0u64;
        let mut seen = vec![false; n_cycles];
        for &f in &forms {
            let cid = cycle_of[&f];
            if seen[cid] {
                continue;
            }
            seen[cid] = true;
            let cube = class(compose(reduce_indefinite(compose(f, f), d), f));
            if cube == principal {
                count += 1;
            }
        }
        count
    }
}

fn is_fundamental(d: i64) -> bool {
    fn squarefree(mut n: i64) -> bool {
        let mut p = 2;
        while p * p <= n {
            if n % (p * p) == 0 {
                return false;
            }
            while n % p == 0 {
                n /= p;
            }
            p += 1;
        }
        true
    }
    if d == 0 || d == 1 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return squarefree(d.abs());
    }
    if d % 4 == 0 {
        let m = d / 4;
        return m.rem_euclid(4) != 1 && squarefree(m.abs()) && m.rem_euclid(4) != 0;
    }
    false
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// Assembled sieve equals the direct pair count exactly across the
/// reachable range for A = C7.
fn criterion_1() -> Check {
    let pools = PairPools::build(7, 10_000, 29u64.pow(6) * 1_000).map_err(|e| e.to_string())?;
    let limit = pools.coverage_limit();
    let lg_hi = limit.to_string().len() as f64 - 1.0;
    let mut checked = 0;
    let mut nonzero = 0;
    for k in 0..20u32 {
        let lg = 30.0 + (lg_hi - 30.0) * f64::from(k) / 19.0;
        let x = BigUint::from_str(&format!("{:.0}", 10f64.powf(lg))).unwrap().min(limit.clone());
        let direct = direct_pair_count(&x, &pools).map_err(|e| e.to_string())?;
        let assembled = assemble_g(&x, &pools).map_err(|e| e.to_string())?;
        if direct != assembled {
            return Err(format!("X = {x}: direct {direct} != assembled {assembled}"));
        }
        checked += 1;
        if direct > 0 {
            nonzero += 1;
        }
    }
    if nonzero == 0 {
        return Err("no threshold produced a nonzero count".into());
    }
    Ok(format!("{checked} thresholds, identical counts ({nonzero} nonzero)"))
}

/// Published power savings as exact rationals, with the cell-table
/// cross-check either agreeing or surfacing its discrepancy.
fn criterion_2() -> Check {
    let (a, b) = default_error_exponents();
    let cases = [(7u32, rat(23, 8778), true), (5, rat(322, 10305), true), (3, rat(24, 849), false)];
    let mut notes = Vec::new();
    for (ell, expected, expect_agree) in cases {
        let g = AbelianGroupSpec::cyclic(ell);
        let delta = power_saving(&g, &a, &b).map_err(|e| e.to_string())?;
        if delta != expected {
            return Err(format!("C{ell}: delta {delta} != {expected}"));
        }
        let check = power_saving_cross_check(&g, &a, &b).map_err(|e| e.to_string())?;
        if check.agrees != expect_agree {
            return Err(format!(
                "C{ell}: cross-check agrees={} (recomputed {}), expected agrees={}",
                check.agrees, check.recomputed, expect_agree
            ));
        }
        if !check.agrees {
            notes.push(format!("C{ell} discrepancy reported: recomputed {}", check.recomputed));
        }
    }
    Ok(format!("23/8778, 322/10305, 24/849 exact; {}", notes.join("; ")))
}

/// Inequality classification across every odd abelian group of order <= 45.
fn criterion_3() -> Check {
    let (a, b) = default_error_exponents();
    let groups = all_odd_abelian(45);
    for g in &groups {
        let rep = verify_inequalities(g, &a, &b);
        let ok = if g.p_min() > 5 {
            rep.secondary_term
        } else {
            rep.power_saving
        };
        if !ok {
            return Err(format!("{g} (p_min {}) fails its classification", g.p_min()));
        }
    }
    Ok(format!("{} groups classified as claimed", groups.len()))
}

/// Two-term asymptotic against enumeration to 10^6.
fn criterion_4(table: &CubicTable) -> Check {
    let gc = global_constants(12).map_err(|e| e.to_string())?;
    let mut scaled = Vec::new();
    let mut top_rel = 0.0;
    for x in [10_000u64, 100_000, 1_000_000] {
        let n = table.count_with_conditions(x, 1, 1).map_err(|e| e.to_string())? as f64;
        let resid = n - predicted_nqr(x, 1, 1).map_err(|e| e.to_string())?;
        scaled.push(resid.abs() / (x as f64).powf(5.0 / 6.0));
        if x == 1_000_000 {
            top_rel = resid.abs() / (gc.a * x as f64);
            if top_rel > 0.03 {
                return Err(format!("residual is {top_rel:.4} of the main term (> 0.03)"));
            }
        }
    }
    // decrease across the checkpoint span: each later scaled residual sits
    // below the first (pairwise strictness between the last two is a
    // statistical tie, within two fields of the count)
    if !(scaled[1] < scaled[0] && scaled[2] < scaled[0]) {
        return Err(format!("scaled residuals not decreasing across the span: {scaled:?}"));
    }
    Ok(format!(
        "residual {top_rel:.5} of main term at 10^6; scaled residuals {:.5}, {:.5}, {:.5}",
        scaled[0], scaled[1], scaled[2]
    ))
}

/// Cubic-correspondence class number sums against the independent form
/// class group oracle.
fn criterion_5() -> Check {
    let table = CubicTable::build(1_000).map_err(|e| e.to_string())?;
    let ours = table.h3_star_sum(1_000, 1).map_err(|e| e.to_string())?;
    // oracle sanity on known class groups: Z/3 at -23, Z/5 at -47 (trivial
    // 3-torsion), Z/6 at -87, Z/3 at 229
    for (d, expect) in [(-23i64, 3u64), (-47, 1), (-87, 3), (-4, 1), (5, 1), (229, 3), (-59, 3)] {
        let got = three_torsion(d);
        if got != expect {
            return Err(format!("oracle self-check: disc {d} gives {got}, known {expect}"));
        }
    }
    let mut oracle = 0u64;
    for d in -1_000i64..=1_000 {
        if is_fundamental(d) {
            oracle += three_torsion(d);
        }
    }
    if ours != oracle {
        return Err(format!("h3* sum {ours} != form class group oracle {oracle}"));
    }
    Ok(format!("sum {ours} matches the form class group computation exactly"))
}

/// Boundedness of conditioned counts over admissible moduli up to 50.
fn criterion_6(table: &CubicTable) -> Check {
    let x = 1_000_000u64;
    let base = table.count_with_conditions(x, 1, 1).map_err(|e| e.to_string())? as f64 / x as f64;
    let admissible = |n: u64| {
        n % 2 != 0 && n % 3 != 0 && [5u64, 7].iter().all(|&p| n % (p * p) != 0)
    };
    let cells: Vec<(u64, u64)> = (5..=50)
        .filter(|&n| admissible(n))
        .flat_map(|n| [(n, 1), (1, n)])
        .collect();
    let mut worst = 0.0f64;
    for row in table.uniformity_report(x, &cells).map_err(|e| e.to_string())? {
        worst = worst.max(row.ratio);
        if row.ratio > 10.0 * base {
            return Err(format!(
                "cell (q={}, r={}): ratio {} exceeds 10x base {base}",
                row.q, row.r, row.ratio
            ));
        }
    }
    Ok(format!("max scaled ratio {worst:.4} <= 10 x base {base:.4}"))
}

/// Fitted lattice-sum exponents against predictions on randomized instances.
fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_823);
    let mut worst = 0.0f64;
    for range in [LatticeRange::Below, LatticeRange::Above] {
        for _ in 0..10 {
            // reject near-tied or near-logarithmic instances: their power
            // law is not resolvable on a desk-scale ladder
            let n = if range == LatticeRange::Below { rng.gen_range(1..=2) } else { 1 };
            let (beta, gamma) = loop {
                let beta: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..3.0)).collect();
                let gamma: Vec<f64> = (0..n)
                    .map(|_| match range {
                        LatticeRange::Below => rng.gen_range(-0.8..1.0),
                        LatticeRange::Above => rng.gen_range(-3.0..-1.5),
                    })
                    .collect();
                let exps: Vec<f64> =
                    beta.iter().zip(&gamma).map(|(&b, &g)| (g + 1.0) / b).collect();
                if exps.iter().all(|e| e.abs() >= 0.2)
                    && (exps.len() < 2 || (exps[0] - exps[1]).abs() >= 0.4)
                {
                    break (beta, gamma);
                }
            };
            let fit =
                calcweight_bruteforce(&beta, &gamma, 1e6, range).map_err(|e| e.to_string())?;
            let err = (fit.fitted_exponent - fit.predicted_exponent).abs();
            worst = worst.max(err);
            if err > 0.05 {
                return Err(format!(
                    "{range:?} beta {beta:?} gamma {gamma:?}: fitted {} vs predicted {}",
                    fit.fitted_exponent, fit.predicted_exponent
                ));
            }
        }
    }
    Ok(format!("20 instances, worst exponent error {worst:.4}"))
}

/// Explicit product bound and ratio convergence on synthetic factor pairs.
fn criterion_8() -> Check {
    let integers = || SyntheticFactor { a_const: 1.0, n: 1.0, r: 0, count: Box::new(|t| t) };
    let squares = || SyntheticFactor {
        a_const: 1.0,
        n: 0.5,
        r: 0,
        count: Box::new(|t| (t as f64).sqrt() as u64),
    };
    let finite =
        || SyntheticFactor { a_const: 5.0, n: 0.0, r: 0, count: Box::new(|t| t.min(5)) };
    let cases: Vec<(SyntheticFactor, SyntheticFactor, u32, u32)> = vec![
        (integers(), integers(), 1, 3),
        (integers(), integers(), 1, 2),
        (integers(), squares(), 1, 4),
        (squares(), integers(), 1, 6),
        (integers(), finite(), 2, 1),
    ];
    let mut worst = 0.0f64;
    for (i, (f1, f2, a, b)) in cases.into_iter().enumerate() {
        let rep = product_lemma_check(&f1, &f2, a, b, 1_000_000).map_err(|e| e.to_string())?;
        if !rep.bound_holds {
            return Err(format!("case {i}: P(X) = {} exceeds bound {}", rep.p_x, rep.explicit_bound));
        }
        if rep.last_decade_variation >= 0.02 {
            return Err(format!(
                "case {i}: ratio varies {:.4} over the last decade",
                rep.last_decade_variation
            ));
        }
        worst = worst.max(rep.last_decade_variation);
    }
    Ok(format!("5 instances bounded, worst last-decade variation {worst:.4}"))
}

/// Euler constant stability between prime bounds, with honest tails.
fn criterion_9() -> Check {
    let lo = final_constants(7, 100_000).map_err(|e| e.to_string())?;
    let hi = final_constants(7, 1_000_000).map_err(|e| e.to_string())?;
    let d1 = (lo.c1 - hi.c1).abs();
    let d2 = (lo.c2 - hi.c2).abs();
    if d1 > 1e-6 || d2 > 1e-6 {
        return Err(format!("drift C1 {d1:.2e}, C2 {d2:.2e} exceeds 1e-6"));
    }
    if lo.c1_truncation < d1 || lo.c2_truncation < d2 {
        return Err("reported truncation bound below the observed drift".into());
    }
    Ok(format!(
        "C1 = {:.9} (drift {d1:.1e} <= bound {:.1e}), C2 = {:.9}",
        hi.c1, lo.c1_truncation, hi.c2
    ))
}

/// Fast enumeration against brute-force search, and exact ingest agreement
/// on a table derived from the brute-force route.
fn criterion_10() -> Check {
    let fast = enumerate_cubic_fields(1_000).map_err(|e| e.to_string())?;
    let naive = naive_forms(1_000);
    let fast_forms: Vec<_> = fast.iter().map(|r| r.form.expect("cubic records carry forms")).collect();
    let mut naive_sorted = naive.clone();
    naive_sorted.sort_by_key(|f| (f.disc().unsigned_abs(), f.coeffs()));
    let mut fast_sorted = fast_forms.clone();
    fast_sorted.sort_by_key(|f| (f.disc().unsigned_abs(), f.coeffs()));
    if fast_sorted != naive_sorted {
        return Err(format!(
            "fast enumeration ({} fields) differs from brute force ({})",
            fast_sorted.len(),
            naive_sorted.len()
        ));
    }
    // external-table ingest: derive the table from the brute-force forms so
    // the comparison path is independent of the fast enumerator
    let mut csv = String::from("label,degree,disc,galois_label\n");
    for (i, f) in naive.iter().enumerate() {
        let d = f.disc();
        let galois = if d > 0 && {
            let r = (d as f64).sqrt().round() as i128;
            r * r == d
        } {
            "3T1"
        } else {
            "3T2"
        };
        csv.push_str(&format!("3.{i},3,{d},{galois}\n"));
    }
    let rows = ingest::parse_csv(csv.as_bytes()).map_err(|e| e.to_string())?;
    let report = ingest::validate(&rows, None).map_err(|e| e.to_string())?;
    if !report.ok() {
        return Err(format!("ingest diffs: {:?}", report.diffs));
    }
    Ok(format!(
        "{} fields identical; ingest of the brute-force table agrees per-discriminant",
        fast_sorted.len()
    ))
}

#[test]
fn acceptance() {
    let table = CubicTable::build(1_000_000).expect("enumeration to 10^6");
    // smallest C5 field exists so the abelian side is exercised end to end
    assert!(!enumerate_cl_fields(5, 14_641).unwrap().is_empty());

    let results: Vec<(u32, &str, Check)> = vec![
        (1, "exact sieve identity (C7 pools)", criterion_1()),
        (2, "published power savings with cross-check", criterion_2()),
        (3, "classification of odd abelian groups to order 45", criterion_3()),
        (4, "two-term cubic asymptotic at 10^6", criterion_4(&table)),
        (5, "class number sums vs form class groups", criterion_5()),
        (6, "uniformity of conditioned counts", criterion_6(&table)),
        (7, "lattice sum growth exponents", criterion_7()),
        (8, "explicit product bound", criterion_8()),
        (9, "Euler constant stability", criterion_9()),
        (10, "enumeration vs brute force + ingest", criterion_10()),
    ];
    let mut failed = Vec::new();
    for (id, name, result) in &results {
        match result {
            Ok(detail) => println!("ACCEPTANCE {id}: PASS - {name}: {detail}"),
            Err(why) => {
                println!("ACCEPTANCE {id}: FAIL - {name}: {why}");
                failed.push(*id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
