//! Integral binary cubic forms and the GL2(Z) reduction theory used to
//! tabulate cubic rings and fields.
//!
//! Conventions: the action is the twisted one, (gamma . f)(v) =
//! f(v gamma) / det(gamma), under which the discriminant is invariant and
//! f ~ -f. For positive discriminant we reduce the (integral, positive
//! definite) Hessian; for negative discriminant we reduce the positive
//! definite real quadratic factor of f, with all comparisons done through
//! exact integer sign evaluations of f at rational points.

/// A binary cubic form a x^3 + b x^2 y + c x y^2 + d y^3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryCubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl BinaryCubicForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        BinaryCubicForm { a, b, c, d }
    }

    pub fn coeffs(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    /// disc = 18abcd + b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2.
    pub fn disc(&self) -> i128 {
        let (a, b, c, d) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        );
        18 * a * b * c * d + b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d
            - 27 * a * a * d * d
    }

    /// Hessian covariant (P, Q, R) with P = b^2 - 3ac, Q = bc - 9ad,
    /// R = c^2 - 3bd; it satisfies Q^2 - 4PR = -3 disc.
    pub fn hessian(&self) -> (i64, i64, i64) {
        let (a, b, c, d) = self.coeffs();
        (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)
    }

    /// Twisted action of gamma = [[p, q], [r, s]] (must have det ±1).
    pub fn apply(&self, p: i64, q: i64, r: i64, s: i64) -> BinaryCubicForm {
        let det = p * s - q * r;
        debug_assert!(det == 1 || det == -1);
        let (a, b, c, d) = self.coeffs();
        let a2 = a * p * p * p + b * p * p * r + c * p * r * r + d * r * r * r;
        let d2 = a * q * q * q + b * q * q * s + c * q * s * s + d * s * s * s;
        let b2 = 3 * a * p * p * q
            + b * (p * p * s + 2 * p * q * r)
            + c * (2 * p * r * s + q * r * r)
            + 3 * d * r * r * s;
        let c2 = 3 * a * p * q * q
            + b * (q * q * r + 2 * p * q * s)
            + c * (p * s * s + 2 * q * r * s)
            + 3 * d * r * s * s;
        BinaryCubicForm::new(a2 * det, b2 * det, c2 * det, d2 * det)
    }

    /// Translation x -> x + k y, y -> y (determinant one).
    pub fn translate(&self, k: i64) -> BinaryCubicForm {
        self.apply(1, k, 0, 1)
    }

    /// f(x, 1) evaluated at the rational u / a, cleared of denominators:
    /// G(u) = u^3 + b u^2 + (ac) u + a^2 d has the same sign as f(u/a, 1)
    /// when a > 0.
    fn g_at(&self, u: i128) -> i128 {
        let (a, b, c, d) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        );
        u * u * u + b * u * u + a * c * u + a * a * d
    }

    /// Rational-root test for f(x, 1); a form with a != 0 is reducible over Q
    /// iff the monic companion G has an integer root (dividing a^2 d).
    pub fn is_irreducible(&self) -> bool {
        assert!(self.a != 0);
        let n = (self.a as i128) * (self.a as i128) * (self.d as i128);
        if n == 0 {
            return false;
        }
        let bound = n.unsigned_abs();
        let mut r: u128 = 1;
        while r * r <= bound {
            if bound % r == 0 {
                for cand in [r as i128, -(r as i128), (bound / r) as i128, -((bound / r) as i128)]
                {
                    if self.g_at(cand) == 0 {
                        return false;
                    }
                }
            }
            r += 1;
        }
        true
    }

    /// Reduction predicate for disc > 0: the Hessian lies in the GL2(Z)
    /// fundamental cone 0 <= Q <= P <= R. Classes on the cone boundary occur
    /// more than once and are collapsed by [`canonical`](Self::canonical).
    pub fn is_hessian_reduced(&self) -> bool {
        let (p, q, r) = self.hessian();
        0 <= q && q <= p && p <= r
    }

    /// Reduction predicate for irreducible forms with disc < 0 and a > 0:
    /// the positive definite quadratic factor x^2 + pxy + qy^2 of f over R
    /// satisfies |p| <= 1 <= q. Both are expressed as exact sign conditions;
    /// equality cannot occur for irreducible f.
    ///
    /// Includes the mirror normalization b > 0, or b = 0 and d > 0, which
    /// picks one of the two reduced forms per class.
    pub fn is_neg_reduced(&self) -> bool {
        debug_assert!(self.a > 0);
        let (a, b, d) = (self.a as i128, self.b as i128, self.d as i128);
        // q > 1  <=>  d^2 - bd + ac - a^2 > 0
        if d * d - b * d + a * (self.c as i128) - a * a <= 0 {
            return false;
        }
        // p <= 1  <=>  real root r <= (a - b)/a  <=>  G(a - b) > 0
        if self.g_at(a - b) <= 0 {
            return false;
        }
        // p >= -1  <=>  r >= -(a + b)/a  <=>  G(-a - b) < 0
        if self.g_at(-a - b) >= 0 {
            return false;
        }
        self.b > 0 || (self.b == 0 && self.d > 0)
    }

    /// Canonical representative of the GL2(Z)-class, assuming `self` already
    /// satisfies the reduction predicate for its discriminant sign.
    ///
    /// For disc < 0 the reduced normalized form is unique. For disc > 0 the
    /// residual ambiguity is the automorphism group of the reduced Hessian,
    /// whose elements have entries in {-1, 0, 1}; we take the
    /// lexicographically least orbit member with positive leading
    /// coefficient.
    pub fn canonical(&self) -> BinaryCubicForm {
        if self.disc() < 0 {
            return *self;
        }
        let h = self.hessian();
        let mut best = *self;
        for (p, q, r, s) in UNIT_MATRICES.iter().copied() {
            let g = self.apply(p, q, r, s);
            if g.a > 0 && g.hessian() == h && g < best {
                best = g;
            }
        }
        best
    }

    /// Bring an arbitrary irreducible form with nonzero discriminant to its
    /// canonical class representative by iterated reduction steps.
    pub fn reduce(&self) -> BinaryCubicForm {
        let mut f = *self;
        if f.a < 0 || (f.a == 0 && leading_sign(&f) < 0) {
            f = BinaryCubicForm::new(-f.a, -f.b, -f.c, -f.d);
        }
        if self.disc() > 0 {
            reduce_positive(f).canonical()
        } else {
            reduce_negative(f)
        }
    }
}

fn leading_sign(f: &BinaryCubicForm) -> i64 {
    for v in [f.a, f.b, f.c, f.d] {
        if v != 0 {
            return v.signum();
        }
    }
    0
}

/// All gamma in GL2(Z) with entries in {-1, 0, 1}; enough to contain the
/// automorphism group of any reduced positive definite binary quadratic form.
static UNIT_MATRICES: once_cell::sync::Lazy<Vec<(i64, i64, i64, i64)>> =
    once_cell::sync::Lazy::new(|| {
        let mut out = Vec::new();
        let vals = [-1i64, 0, 1];
        for p in vals {
            for q in vals {
                for r in vals {
                    for s in vals {
                        let det = p * s - q * r;
                        if det == 1 || det == -1 {
                            out.push((p, q, r, s));
                        }
                    }
                }
            }
        }
        out
    });

/// Gauss reduction of the Hessian, transported to the cubic form.
fn reduce_positive(mut f: BinaryCubicForm) -> BinaryCubicForm {
    loop {
        let (p, q, r) = f.hessian();
        assert!(p > 0 && r > 0, "Hessian not definite: disc must be > 0");
        if r < p {
            // swap the variables
            f = f.apply(0, 1, 1, 0);
            continue;
        }
        if q.abs() > p {
            // translate to center Q; H(x + ky, y) has Q' = Q + 2kP
            let k = (-q).div_euclid(2 * p) + i64::from((-q).rem_euclid(2 * p) > p);
            f = f.translate(k);
            continue;
        }
        if q < 0 {
            // mirror (x, y) -> (x, -y) flips the sign of Q
            f = f.apply(1, 0, 0, -1);
            continue;
        }
        if f.a < 0 {
            f = BinaryCubicForm::new(-f.a, -f.b, -f.c, -f.d);
        }
        return f;
    }
}

/// Reduction for disc < 0 via the real quadratic factor, using only exact
/// integer predicates. Mirrors the classical continued-fraction walk:
/// translate until |p| <= 1, invert while q < 1.
fn reduce_negative(mut f: BinaryCubicForm) -> BinaryCubicForm {
    assert!(f.a > 0);
    loop {
        // translate so that -1 <= p <= 1
        let k = translate_step(&f);
        if k != 0 {
            f = f.translate(k);
            continue;
        }
        // q > 1?
        let (a, b, c, d) = (f.a as i128, f.b as i128, f.c as i128, f.d as i128);
        if d * d - b * d + a * c - a * a > 0 {
            if !(f.b > 0 || (f.b == 0 && f.d > 0)) {
                f = BinaryCubicForm::new(f.a, -f.b, f.c, -f.d);
            }
            debug_assert!(f.is_neg_reduced());
            return f;
        }
        // invert: (x, y) -> (y, x), then restore a > 0
        f = f.apply(0, 1, 1, 0);
        if f.a < 0 {
            f = BinaryCubicForm::new(-f.a, -f.b, -f.c, -f.d);
        }
    }
}

/// Integer k such that the quadratic factor of f.translate(k) has |p| <= 1,
/// found from a float estimate of the real root and corrected by exact sign
/// tests. Returns 0 when f already satisfies |p| <= 1.
fn translate_step(f: &BinaryCubicForm) -> i64 {
    let p_ok = |g: &BinaryCubicForm| {
        let (a, b) = (g.a as i128, g.b as i128);
        g.g_at(a - b) > 0 && g.g_at(-a - b) < 0
    };
    if p_ok(f) {
        return 0;
    }
    // p = b/a + r; aim for k ~ -p/2 rounded, walk to the unique valid k
    let r = real_root_estimate(f);
    let p_est = f.b as f64 / f.a as f64 + r;
    let mut k = (-p_est / 2.0).round() as i64;
    for _ in 0..64 {
        let g = f.translate(k);
        if p_ok(&g) {
            return k;
        }
        // G(a - b) <= 0 means r > (a-b)/a, i.e. p > 1: shift left
        let (a, b) = (g.a as i128, g.b as i128);
        if g.g_at(a - b) <= 0 {
            k -= 1;
        } else {
            k += 1;
        }
    }
    unreachable!("translation step did not converge for {f:?}");
}

/// Float estimate of the unique real root of f(x, 1) for disc < 0, a > 0.
fn real_root_estimate(f: &BinaryCubicForm) -> f64 {
    let (a, b, c, d) = (f.a as f64, f.b as f64, f.c as f64, f.d as f64);
    let eval = |x: f64| ((a * x + b) * x + c) * x + d;
    let mut lo = -1.0;
    let mut hi = 1.0;
    while eval(lo) > 0.0 {
        lo *= 2.0;
    }
    while eval(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximality of the cubic ring R_f at p, by the Davenport-Heilbronn local
/// conditions: R_f is non-maximal at p iff p divides f entirely, or f has a
/// repeated root (x0 : y0) in P^1(F_p) such that, with the root moved to
/// (0 : 1), the transformed coefficients satisfy p | c', p^2 | d'.
pub fn is_maximal_at(f: &BinaryCubicForm, p: u32) -> bool {
    let pi = p as i128;
    let (a, b, c, d) = (
        f.a as i128,
        f.b as i128,
        f.c as i128,
        f.d as i128,
    );
    let md = |x: i128| x.rem_euclid(pi);
    if md(a) == 0 && md(b) == 0 && md(c) == 0 && md(d) == 0 {
        return false;
    }
    // root at infinity: y^2 | f mod p <=> p | a and p | b
    if md(a) == 0 && md(b) == 0 {
        // reversed form has c' = b, d' = a; repeated root needs p | b (given)
        if a.rem_euclid(pi * pi) == 0 {
            return false;
        }
    }
    // finite repeated roots: f(r) = 0 and f'(r) = 0 mod p
    for r in 0..pi {
        let fr = ((a * r + b) * r + c) * r + d;
        if md(fr) != 0 {
            continue;
        }
        let dfr = (3 * a * r + 2 * b) * r + c;
        if md(dfr) != 0 {
            continue;
        }
        // shifted constant term is f(r); lift-independent mod p^2 here
        if fr.rem_euclid(pi * pi) == 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_values() {
        // x^3 - x - 1 has disc -23
        assert_eq!(BinaryCubicForm::new(1, 0, -1, -1).disc(), -23);
        // x^3 + x^2 - 2x - 1 (conductor 7 cyclic) has disc 49
        assert_eq!(BinaryCubicForm::new(1, 1, -2, -1).disc(), 49);
    }

    #[test]
    fn hessian_identity() {
        for f in [
            BinaryCubicForm::new(1, 0, -1, -1),
            BinaryCubicForm::new(2, 3, -5, 7),
            BinaryCubicForm::new(1, -4, 2, 9),
        ] {
            let (p, q, r) = f.hessian();
            assert_eq!(
                (q as i128) * (q as i128) - 4 * (p as i128) * (r as i128),
                -3 * f.disc()
            );
        }
    }

    #[test]
    fn action_preserves_disc_and_composes() {
        let f = BinaryCubicForm::new(1, -2, 3, -4);
        let g = f.apply(2, 1, 1, 1); // det 1
        assert_eq!(g.disc(), f.disc());
        let h = f.apply(0, 1, 1, 0); // det -1
        assert_eq!(h.disc(), f.disc());
        // action of the identity
        assert_eq!(f.apply(1, 0, 0, 1), f);
    }

    #[test]
    fn hessian_is_covariant() {
        let f = BinaryCubicForm::new(1, -2, 3, -4);
        for (p, q, r, s) in [(1i64, 3, 0, 1), (0, 1, 1, 0), (2, 1, 1, 1), (1, 0, -2, -1)] {
            let g = f.apply(p, q, r, s);
            let (hp, hq, hr) = f.hessian();
            // H_g(x, y) = H_f(px + qy, rx + sy)
            let hp2 = hp * p * p + hq * p * r + hr * r * r;
            let hq2 = 2 * hp * p * q + hq * (p * s + q * r) + 2 * hr * r * s;
            let hr2 = hp * q * q + hq * q * s + hr * s * s;
            assert_eq!(g.hessian(), (hp2, hq2, hr2));
        }
    }

    #[test]
    fn irreducibility() {
        assert!(BinaryCubicForm::new(1, 0, -1, -1).is_irreducible());
        // (x - y)(x^2 + xy + y^2) = x^3 - y^3
        assert!(!BinaryCubicForm::new(1, 0, 0, -1).is_irreducible());
        assert!(!BinaryCubicForm::new(2, 1, -1, 0).is_irreducible());
    }

    #[test]
    fn reduce_reaches_fixed_point_and_respects_class() {
        let f = BinaryCubicForm::new(1, 0, -1, -1);
        let red = f.reduce();
        assert_eq!(red.disc(), -23);
        // translate far away and reduce back
        for k in [-7i64, -2, 3, 11] {
            let g = f.translate(k);
            assert_eq!(g.reduce(), red, "k = {k}");
        }
        for (p, q, r, s) in [(2i64, 1, 1, 1), (0, 1, 1, 0), (3, -1, 1, 0)] {
            assert_eq!(f.apply(p, q, r, s).reduce(), red);
        }
    }

    #[test]
    fn reduce_positive_disc_class() {
        // x^3 + x^2 - 2x - 1: cyclic, disc 49
        let f = BinaryCubicForm::new(1, 1, -2, -1);
        let red = f.reduce();
        assert_eq!(red.disc(), 49);
        for k in [-5i64, 4, 9] {
            assert_eq!(f.translate(k).reduce(), red);
        }
        for (p, q, r, s) in [(1i64, 0, 1, 1), (0, 1, 1, 0), (1, 2, 2, 5)] {
            assert_eq!(f.apply(p, q, r, s).reduce(), red);
        }
        assert!(red.is_hessian_reduced());
    }

    #[test]
    fn maximality_monic_examples() {
        // x^3 - 20 is 2-non-maximal? theta^2/2 is not integral; Eisenstein-like
        // checks instead: x^3 - p k with p^2 not dividing the constant is
        // p-maximal, x^3 - p^2 k is not.
        let f = BinaryCubicForm::new(1, 0, 0, -5 * 7);
        assert!(is_maximal_at(&f, 5));
        let g = BinaryCubicForm::new(1, 0, 0, -25 * 7);
        assert!(!is_maximal_at(&g, 5));
        // x^3 - x - 1: disc -23 squarefree, maximal everywhere
        let h = BinaryCubicForm::new(1, 0, -1, -1);
        for p in [2u32, 3, 5, 23] {
            assert!(is_maximal_at(&h, p));
        }
        // multiple of p is never maximal at p
        let m = BinaryCubicForm::new(3, 3, -6, 9);
        assert!(!is_maximal_at(&m, 3));
    }
}
