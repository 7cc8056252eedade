//! Exact arithmetic in the real quadratic rings `ℤ[√2]`, `ℤ[τ]` and `ℤ[√3]`.
//!
//! An element is stored as `a + b·ω` with 64-bit coefficients, where `ω` is
//! the ring generator. All three rings are norm-Euclidean, so division with
//! rounded quotients gives a terminating Euclidean algorithm and a gcd that is
//! unique up to units. Arithmetic is checked: overflow is reported, never
//! wrapped.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three quadratic rings used by the cyclotomic modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingTag {
    /// `ℤ[√2]`, `ω² = 2`.
    Sqrt2,
    /// `ℤ[τ]`, `ω² = ω + 1`.
    GoldenTau,
    /// `ℤ[√3]`, `ω² = 3`.
    Sqrt3,
}

impl RingTag {
    pub const ALL: [RingTag; 3] = [RingTag::Sqrt2, RingTag::GoldenTau, RingTag::Sqrt3];

    /// Coefficients `(p, q)` of the minimal polynomial `ω² = p·ω + q`.
    pub const fn min_poly(self) -> (i64, i64) {
        match self {
            RingTag::Sqrt2 => (0, 2),
            RingTag::GoldenTau => (1, 1),
            RingTag::Sqrt3 => (0, 3),
        }
    }

    /// Discriminant `p² + 4q` of the minimal polynomial; `2ω - p = √D`.
    pub const fn discriminant(self) -> i64 {
        let (p, q) = self.min_poly();
        p * p + 4 * q
    }

    /// Real value of `ω`.
    pub fn omega(self) -> f64 {
        match self {
            RingTag::Sqrt2 => std::f64::consts::SQRT_2,
            RingTag::GoldenTau => (1.0 + 5f64.sqrt()) / 2.0,
            RingTag::Sqrt3 => 3f64.sqrt(),
        }
    }

    /// Real value of the Galois conjugate `ω' = p - ω`.
    pub fn omega_conj(self) -> f64 {
        match self {
            RingTag::Sqrt2 => -std::f64::consts::SQRT_2,
            RingTag::GoldenTau => (1.0 - 5f64.sqrt()) / 2.0,
            RingTag::Sqrt3 => -(3f64.sqrt()),
        }
    }

    /// Fundamental unit `ε > 1`: `1+√2`, `τ`, `2+√3`.
    pub const fn fundamental_unit(self) -> QuadInt {
        match self {
            RingTag::Sqrt2 => QuadInt::new(1, 1, self),
            RingTag::GoldenTau => QuadInt::new(0, 1, self),
            RingTag::Sqrt3 => QuadInt::new(2, 1, self),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RingTag::Sqrt2 => "√2",
            RingTag::GoldenTau => "τ",
            RingTag::Sqrt3 => "√3",
        }
    }
}

/// Exact element `a + b·ω` of a real quadratic ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    a: i64,
    b: i64,
    ring: RingTag,
}

fn narrow(v: i128, op: &'static str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(op))
}

/// `n / d` rounded to the nearest integer, ties away from zero.
fn round_div(n: i128, d: i128) -> i128 {
    debug_assert!(d != 0);
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    let q = n.div_euclid(d);
    let r = n - q * d;
    match (2 * r).cmp(&d) {
        Ordering::Greater => q + 1,
        Ordering::Equal if q >= 0 => q + 1,
        _ => q,
    }
}

impl QuadInt {
    pub const fn new(a: i64, b: i64, ring: RingTag) -> Self {
        QuadInt { a, b, ring }
    }

    pub const fn integer(a: i64, ring: RingTag) -> Self {
        QuadInt { a, b: 0, ring }
    }

    pub const fn zero(ring: RingTag) -> Self {
        QuadInt::integer(0, ring)
    }

    pub const fn one(ring: RingTag) -> Self {
        QuadInt::integer(1, ring)
    }

    /// The generator `ω` itself.
    pub const fn omega(ring: RingTag) -> Self {
        QuadInt::new(0, 1, ring)
    }

    #[inline]
    pub const fn a(self) -> i64 {
        self.a
    }

    #[inline]
    pub const fn b(self) -> i64 {
        self.b
    }

    #[inline]
    pub const fn ring(self) -> RingTag {
        self.ring
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn same_ring(self, rhs: Self) -> Result<()> {
        if self.ring == rhs.ring {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "ring mismatch: {:?} vs {:?}",
                self.ring, rhs.ring
            )))
        }
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.same_ring(rhs)?;
        let a = self.a.checked_add(rhs.a).ok_or(Error::Overflow("add"))?;
        let b = self.b.checked_add(rhs.b).ok_or(Error::Overflow("add"))?;
        Ok(QuadInt::new(a, b, self.ring))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.same_ring(rhs)?;
        let a = self.a.checked_sub(rhs.a).ok_or(Error::Overflow("sub"))?;
        let b = self.b.checked_sub(rhs.b).ok_or(Error::Overflow("sub"))?;
        Ok(QuadInt::new(a, b, self.ring))
    }

    pub fn checked_neg(self) -> Result<Self> {
        let a = self.a.checked_neg().ok_or(Error::Overflow("neg"))?;
        let b = self.b.checked_neg().ok_or(Error::Overflow("neg"))?;
        Ok(QuadInt::new(a, b, self.ring))
    }

    /// Product, reduced with `ω² = p·ω + q`.
    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.same_ring(rhs)?;
        let (a, b) = self.mul_wide(rhs).ok_or(Error::Overflow("mul"))?;
        Ok(QuadInt::new(narrow(a, "mul")?, narrow(b, "mul")?, self.ring))
    }

    fn mul_wide(self, rhs: Self) -> Option<(i128, i128)> {
        let (p, q) = self.ring.min_poly();
        let (a, b) = (self.a as i128, self.b as i128);
        let (c, d) = (rhs.a as i128, rhs.b as i128);
        let bd = b.checked_mul(d)?;
        let re = a.checked_mul(c)?.checked_add(bd.checked_mul(q as i128)?)?;
        let om = a
            .checked_mul(d)?
            .checked_add(b.checked_mul(c)?)?
            .checked_add(bd.checked_mul(p as i128)?)?;
        Some((re, om))
    }

    /// Multiplication by a rational integer.
    pub fn checked_scale(self, k: i64) -> Result<Self> {
        let a = self.a.checked_mul(k).ok_or(Error::Overflow("scale"))?;
        let b = self.b.checked_mul(k).ok_or(Error::Overflow("scale"))?;
        Ok(QuadInt::new(a, b, self.ring))
    }

    /// Galois conjugate: `√d ↦ -√d`, `τ ↦ 1 - τ`.
    ///
    /// Panics if the conjugate is not representable, which needs coefficients
    /// within a factor two of `i64::MAX`.
    pub fn conj(self) -> Self {
        let (p, _) = self.ring.min_poly();
        let a = self
            .b
            .checked_mul(p)
            .and_then(|pb| self.a.checked_add(pb))
            .expect("conjugate overflows i64");
        let b = self.b.checked_neg().expect("conjugate overflows i64");
        QuadInt::new(a, b, self.ring)
    }

    fn norm_wide(self) -> i128 {
        let (p, q) = self.ring.min_poly();
        let (a, b) = (self.a as i128, self.b as i128);
        a * a + (p as i128) * a * b - (q as i128) * b * b
    }

    /// Signed algebraic norm `x·conj(x)`.
    pub fn norm(self) -> Result<i64> {
        narrow(self.norm_wide(), "norm")
    }

    pub fn is_unit(self) -> bool {
        self.norm_wide().abs() == 1
    }

    /// Real embedding `a + b·ω`.
    #[inline]
    pub fn embed(self) -> f64 {
        self.a as f64 + self.b as f64 * self.ring.omega()
    }

    /// Real embedding of the conjugate, `a + b·ω'`.
    #[inline]
    pub fn embed_conj(self) -> f64 {
        self.a as f64 + self.b as f64 * self.ring.omega_conj()
    }

    /// Exact sign of the real embedding.
    ///
    /// Uses `2(a + bω) = (2a + pb) + b√D`. Panics only for coefficients near
    /// the `i64` limits.
    pub fn signum(self) -> i32 {
        let (p, _) = self.ring.min_poly();
        let big_a = 2 * self.a as i128 + p as i128 * self.b as i128;
        let b = self.b as i128;
        let sa = big_a.signum() as i32;
        let sb = b.signum() as i32;
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = big_a.checked_mul(big_a).expect("signum overflow");
        let rhs = b
            .checked_mul(b)
            .and_then(|bb| bb.checked_mul(self.ring.discriminant() as i128))
            .expect("signum overflow");
        // D is not a square, so equality is impossible
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    /// Exact comparison of real embeddings.
    pub fn cmp_real(self, other: Self) -> Result<Ordering> {
        let d = self.checked_sub(other)?;
        Ok(d.signum().cmp(&0))
    }

    /// Division with remainder: `self = q·d + r` with `|N(r)| < |N(d)|`.
    ///
    /// The quotient is the exact field quotient with both coordinates rounded
    /// to the nearest integer, ties away from zero.
    pub fn div_rem(self, d: Self) -> Result<(Self, Self)> {
        self.same_ring(d)?;
        if d.is_zero() {
            return Err(Error::usage("division by zero"));
        }
        let (u, v) = self.mul_wide(d.conj()).ok_or(Error::Overflow("div_rem"))?;
        let n = d.norm_wide();
        let q = QuadInt::new(
            narrow(round_div(u, n), "div_rem")?,
            narrow(round_div(v, n), "div_rem")?,
            self.ring,
        );
        let r = self.checked_sub(q.checked_mul(d)?)?;
        Ok((q, r))
    }

    /// Exact quotient `self / d` if `d` divides `self`, otherwise `None`.
    pub fn div_exact(self, d: Self) -> Result<Option<Self>> {
        self.same_ring(d)?;
        if d.is_zero() {
            return Err(Error::usage("division by zero"));
        }
        let (u, v) = self.mul_wide(d.conj()).ok_or(Error::Overflow("div_exact"))?;
        let n = d.norm_wide();
        if u % n != 0 || v % n != 0 {
            return Ok(None);
        }
        Ok(Some(QuadInt::new(
            narrow(u / n, "div_exact")?,
            narrow(v / n, "div_exact")?,
            self.ring,
        )))
    }

    pub fn divides(self, x: Self) -> Result<bool> {
        Ok(x.div_exact(self)?.is_some())
    }

    /// Inverse of a unit; `None` for non-units.
    pub fn unit_inverse(self) -> Option<Self> {
        match self.norm_wide() {
            1 => Some(self.conj()),
            -1 => Some(-self.conj()),
            _ => None,
        }
    }

    /// The associate `±ε^k·x` with real embedding in `[1, ε)`, where `ε` is
    /// the fundamental unit. Zero maps to zero.
    pub fn canonical_associate(self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self);
        }
        if self.is_unit() {
            return Ok(QuadInt::one(self.ring));
        }
        let eps = self.ring.fundamental_unit();
        let eps_inv = eps.unit_inverse().expect("fundamental unit");
        let one = QuadInt::one(self.ring);
        let mut x = if self.signum() < 0 {
            self.checked_neg()?
        } else {
            self
        };
        while x.cmp_real(eps)? != Ordering::Less {
            x = x.checked_mul(eps_inv)?;
        }
        while x.cmp_real(one)? == Ordering::Less {
            x = x.checked_mul(eps)?;
        }
        Ok(x)
    }

    /// Greatest common divisor, normalised to the canonical associate.
    pub fn gcd(self, other: Self) -> Result<Self> {
        self.same_ring(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::usage("gcd(0, 0) is undefined"));
        }
        let (mut x, mut y) = (self, other);
        while !y.is_zero() {
            let (_, r) = x.div_rem(y)?;
            x = y;
            y = r;
        }
        x.canonical_associate()
    }

    /// Whether `self` and `other` generate the unit ideal.
    pub fn coprime(self, other: Self) -> Result<bool> {
        Ok(self.gcd(other)?.is_unit())
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.ring.symbol();
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "{sym}"),
            (0, -1) => write!(f, "-{sym}"),
            (0, b) => write!(f, "{b}{sym}"),
            (a, 1) => write!(f, "{a}+{sym}"),
            (a, -1) => write!(f, "{a}-{sym}"),
            (a, b) if b > 0 => write!(f, "{a}+{b}{sym}"),
            (a, b) => write!(f, "{a}{b}{sym}"),
        }
    }
}

// Operator forms panic on ring mismatch or overflow, like the std integer
// operators in debug builds. Use the checked_* methods where that matters.

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("QuadInt add")
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("QuadInt sub")
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("QuadInt mul")
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> Self {
        self.checked_neg().expect("QuadInt neg")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use RingTag::*;

    fn q(a: i64, b: i64, r: RingTag) -> QuadInt {
        QuadInt::new(a, b, r)
    }

    #[test]
    fn products_reduce_with_minimal_polynomial() {
        assert_eq!(q(1, 1, Sqrt2) * q(1, -1, Sqrt2), q(-1, 0, Sqrt2));
        assert_eq!(q(0, 1, GoldenTau) * q(0, 1, GoldenTau), q(1, 1, GoldenTau));
        assert_eq!(q(1, 1, Sqrt3) * q(1, 1, Sqrt3), q(4, 2, Sqrt3));
    }

    #[test]
    fn norms() {
        assert_eq!(q(3, 1, Sqrt2).norm().unwrap(), 7);
        assert_eq!(q(1, 1, Sqrt2).norm().unwrap(), -1);
        let x = q(1, 1, Sqrt3);
        assert_eq!(x.norm().unwrap(), -2);
        let xx = x * x.conj();
        assert_eq!(xx, q(-2, 0, Sqrt3));
    }

    #[test]
    fn conjugates() {
        assert_eq!(q(0, 1, Sqrt2).conj(), q(0, -1, Sqrt2));
        assert_eq!(q(0, 1, GoldenTau).conj(), q(1, -1, GoldenTau));
        assert!((q(0, 1, GoldenTau).conj().embed() - RingTag::GoldenTau.omega_conj()).abs() < 1e-15);
    }

    #[test]
    fn units() {
        assert!(q(1, 1, Sqrt2).is_unit());
        assert!(!q(2, 0, Sqrt2).is_unit());
        assert!(q(0, 1, GoldenTau).is_unit());
        assert!(q(2, 1, Sqrt3).is_unit());
        assert!(!q(1, 1, Sqrt3).is_unit());
    }

    #[test]
    fn embeddings() {
        assert!((q(1, 1, Sqrt2).embed() - 2.414_213_562_373_095).abs() < 1e-12);
        assert!((q(0, 1, GoldenTau).embed() - 1.618_033_988_749_895).abs() < 1e-12);
        assert_eq!(QuadInt::zero(Sqrt3).embed(), 0.0);
    }

    #[test]
    fn simple_gcds() {
        assert_eq!(q(4, 0, Sqrt2).gcd(q(6, 0, Sqrt2)).unwrap(), q(2, 0, Sqrt2));
        assert_eq!(q(0, 1, Sqrt2).gcd(q(2, 0, Sqrt2)).unwrap(), q(0, 1, Sqrt2));
        let x = q(1, 1, Sqrt3);
        assert_eq!(x.gcd(x).unwrap(), x);
        // 5 = τ³·(-15 + 10τ), and the latter embeds into [1, τ)
        assert_eq!(q(5, 0, GoldenTau).gcd(QuadInt::zero(GoldenTau)).unwrap(), q(-15, 10, GoldenTau));
    }

    #[test]
    fn gcd_of_zeros_is_usage_error() {
        let z = QuadInt::zero(Sqrt2);
        assert!(matches!(z.gcd(z), Err(Error::Usage(_))));
    }

    #[test]
    fn mismatched_rings_rejected() {
        assert!(matches!(
            q(1, 0, Sqrt2).checked_add(q(1, 0, Sqrt3)),
            Err(Error::Usage(_))
        ));
        assert!(q(1, 0, Sqrt2).gcd(q(1, 0, GoldenTau)).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let big = q(i64::MAX / 2, i64::MAX / 2, Sqrt2);
        assert!(matches!(big.checked_mul(big), Err(Error::Overflow(_))));
        assert!(matches!(big.checked_add(big).and_then(|x| x.checked_add(big)), Err(Error::Overflow(_))));
        assert!(q(i64::MAX, 3, Sqrt2).norm().is_err());
    }

    #[test]
    fn rounding_ties_go_away_from_zero() {
        assert_eq!(round_div(5, 2), 3);
        assert_eq!(round_div(-5, 2), -3);
        assert_eq!(round_div(5, -2), -3);
        assert_eq!(round_div(7, 3), 2);
        assert_eq!(round_div(-7, 3), -2);
        assert_eq!(round_div(0, 3), 0);
    }

    #[test]
    fn canonical_associate_lies_in_fundamental_interval() {
        for ring in RingTag::ALL {
            let eps = ring.fundamental_unit();
            for (a, b) in [(2, 0), (-7, 3), (5, -2), (0, 3), (11, 4)] {
                let x = q(a, b, ring);
                let c = x.canonical_associate().unwrap();
                assert!(c.embed() >= 1.0 && c.embed() < eps.embed(), "{x} -> {c}");
                assert_eq!(c.norm().unwrap().abs(), x.norm().unwrap().abs());
            }
        }
    }

    #[test]
    fn signum_matches_float_on_close_calls() {
        // 7 - 5√2 ≈ -0.071, 99 - 70√2 ≈ 0.00714
        assert_eq!(q(7, -5, Sqrt2).signum(), -1);
        assert_eq!(q(99, -70, Sqrt2).signum(), 1);
        assert_eq!(q(-1, 1, GoldenTau).signum(), 1);
        assert_eq!(q(2, -1, Sqrt3).signum(), 1);
    }

    /// Brute-force divisor search bounded by the norm: every element of
    /// norm dividing N(x) with small coefficients that divides both inputs
    /// must divide the computed gcd.
    #[test]
    fn gcd_sqrt2_two_against_divisor_search() {
        let x = q(0, 1, Sqrt2);
        let y = q(2, 0, Sqrt2);
        let g = x.gcd(y).unwrap();
        let mut best = 0i64;
        for a in -6..=6 {
            for b in -6..=6 {
                let d = q(a, b, Sqrt2);
                if d.is_zero() {
                    continue;
                }
                if d.divides(x).unwrap() && d.divides(y).unwrap() {
                    assert!(d.divides(g).unwrap());
                    best = best.max(d.norm().unwrap().abs());
                }
            }
        }
        assert_eq!(best, 2);
        assert_eq!(g.norm().unwrap().abs(), 2);
        assert!(g.divides(x).unwrap() && g.divides(y).unwrap());
    }

    fn ring_strategy() -> impl Strategy<Value = RingTag> {
        prop_oneof![Just(Sqrt2), Just(GoldenTau), Just(Sqrt3)]
    }

    proptest! {
        #[test]
        fn conj_is_involutive_homomorphism(ring in ring_strategy(),
                                          a in -1000i64..1000, b in -1000i64..1000,
                                          c in -1000i64..1000, d in -1000i64..1000) {
            let x = q(a, b, ring);
            let y = q(c, d, ring);
            prop_assert_eq!(x.conj().conj(), x);
            prop_assert_eq!((x * y).conj(), x.conj() * y.conj());
            prop_assert_eq!((x + y).conj(), x.conj() + y.conj());
        }

        #[test]
        fn embedding_is_multiplicative(ring in ring_strategy(),
                                       a in -1000i64..1000, b in -1000i64..1000,
                                       c in -1000i64..1000, d in -1000i64..1000) {
            let x = q(a, b, ring);
            let y = q(c, d, ring);
            let lhs = (x * y).embed();
            let rhs = x.embed() * y.embed();
            // cancellation inside a + bω limits the attainable relative accuracy
            let scale = (x.a.abs() as f64 + x.b.abs() as f64 * 2.0)
                * (y.a.abs() as f64 + y.b.abs() as f64 * 2.0);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale.max(1.0));
        }

        #[test]
        fn signum_agrees_with_embedding(ring in ring_strategy(),
                                        a in -100_000i64..100_000, b in -100_000i64..100_000) {
            let x = q(a, b, ring);
            let e = x.embed();
            if e.abs() > 1e-6 {
                prop_assert_eq!(x.signum() as f64, e.signum());
            }
        }
    }
}
