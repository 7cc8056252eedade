//! Cyclotomic module points `x₁ + x₂·ζₙ`, the star map into internal space,
//! planar embeddings, and regular-polygon windows.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{QuadInt, RingTag};

/// Which cyclotomic module a point lives in.
///
/// `Eight` is `ℤ[ζ₈] = ℤ[√2] ⊕ ℤ[√2]·ζ₈`, `Five` is `ℤ[ζ₅] = ℤ[τ] ⊕ ℤ[τ]·ζ₅`,
/// `Twelve` is `ℤ[ζ₁₂] = ℤ[√3] ⊕ ℤ[√3]·ζ₁₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CycloTag {
    Eight,
    Five,
    Twelve,
}

impl CycloTag {
    pub const ALL: [CycloTag; 3] = [CycloTag::Eight, CycloTag::Five, CycloTag::Twelve];

    pub fn from_order(n: u32) -> Result<Self> {
        match n {
            8 => Ok(CycloTag::Eight),
            5 => Ok(CycloTag::Five),
            12 => Ok(CycloTag::Twelve),
            _ => Err(Error::usage(format!(
                "unsupported cyclotomic order {n} (expected 5, 8 or 12)"
            ))),
        }
    }

    /// Root order `n` of `ζₙ`.
    pub const fn n(self) -> u32 {
        match self {
            CycloTag::Eight => 8,
            CycloTag::Five => 5,
            CycloTag::Twelve => 12,
        }
    }

    pub const fn ring(self) -> RingTag {
        match self {
            CycloTag::Eight => RingTag::Sqrt2,
            CycloTag::Five => RingTag::GoldenTau,
            CycloTag::Twelve => RingTag::Sqrt3,
        }
    }

    /// Exponent `s` of the star map `ζₙ ↦ ζₙˢ`.
    pub const fn star_power(self) -> u32 {
        match self {
            CycloTag::Eight => 3,
            CycloTag::Five => 2,
            CycloTag::Twelve => 5,
        }
    }

    /// `(u, v)` with `ζₙ² = u·ζₙ + v`.
    pub const fn reduction(self) -> (QuadInt, QuadInt) {
        let r = self.ring();
        match self {
            CycloTag::Eight => (QuadInt::new(0, 1, r), QuadInt::integer(-1, r)),
            CycloTag::Five => (QuadInt::new(-1, 1, r), QuadInt::integer(-1, r)),
            CycloTag::Twelve => (QuadInt::new(0, 1, r), QuadInt::integer(-1, r)),
        }
    }

    /// Direct-space image of `ζₙ`.
    pub fn zeta(self) -> PlanarPoint {
        PlanarPoint::polar(1.0, TAU / self.n() as f64)
    }

    /// Internal-space image of `ζₙ`, i.e. `ζₙ^s`.
    pub fn star_zeta(self) -> PlanarPoint {
        PlanarPoint::polar(1.0, TAU * self.star_power() as f64 / self.n() as f64)
    }

    pub fn name(self) -> &'static str {
        match self {
            CycloTag::Eight => "Z[zeta8]",
            CycloTag::Five => "Z[zeta5]",
            CycloTag::Twelve => "Z[zeta12]",
        }
    }
}

/// Planar point with real coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        PlanarPoint { x, y }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        PlanarPoint::new(r * c, r * s)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        PlanarPoint::new(self.x * s, self.y * s)
    }

    /// Rotation about the origin by `theta` radians.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        PlanarPoint::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PlanarPoint {
    type Output = PlanarPoint;
    #[inline]
    fn add(self, o: Self) -> Self {
        PlanarPoint::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanarPoint {
    type Output = PlanarPoint;
    #[inline]
    fn sub(self, o: Self) -> Self {
        PlanarPoint::new(self.x - o.x, self.y - o.y)
    }
}

/// Exact module element `x₁ + x₂·ζₙ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModulePoint {
    pub x1: QuadInt,
    pub x2: QuadInt,
    pub tag: CycloTag,
}

impl ModulePoint {
    pub fn new(x1: QuadInt, x2: QuadInt, tag: CycloTag) -> Result<Self> {
        if x1.ring() != tag.ring() || x2.ring() != tag.ring() {
            return Err(Error::usage(format!(
                "coefficients must lie in {:?} for module {}",
                tag.ring(),
                tag.name()
            )));
        }
        Ok(ModulePoint { x1, x2, tag })
    }

    /// From the integer coordinates `[x₁.a, x₁.b, x₂.a, x₂.b]`.
    #[inline]
    pub fn from_coeffs(tag: CycloTag, c: [i64; 4]) -> Self {
        let r = tag.ring();
        ModulePoint {
            x1: QuadInt::new(c[0], c[1], r),
            x2: QuadInt::new(c[2], c[3], r),
            tag,
        }
    }

    #[inline]
    pub fn coeffs(&self) -> [i64; 4] {
        [self.x1.a(), self.x1.b(), self.x2.a(), self.x2.b()]
    }

    pub fn zero(tag: CycloTag) -> Self {
        ModulePoint::from_coeffs(tag, [0; 4])
    }

    pub fn one(tag: CycloTag) -> Self {
        ModulePoint::from_coeffs(tag, [1, 0, 0, 0])
    }

    pub fn zeta(tag: CycloTag) -> Self {
        ModulePoint::from_coeffs(tag, [0, 0, 1, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.x1.is_zero() && self.x2.is_zero()
    }

    fn same_module(&self, o: &Self) -> Result<()> {
        if self.tag == o.tag {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "module mismatch: {} vs {}",
                self.tag.name(),
                o.tag.name()
            )))
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.same_module(o)?;
        Ok(ModulePoint {
            x1: self.x1.checked_add(o.x1)?,
            x2: self.x2.checked_add(o.x2)?,
            tag: self.tag,
        })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.same_module(o)?;
        Ok(ModulePoint {
            x1: self.x1.checked_sub(o.x1)?,
            x2: self.x2.checked_sub(o.x2)?,
            tag: self.tag,
        })
    }

    /// Module (ring) product, reduced with `ζ² = u·ζ + v`.
    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.same_module(o)?;
        let (u, v) = self.tag.reduction();
        let top = self.x2.checked_mul(o.x2)?;
        let x1 = self.x1.checked_mul(o.x1)?.checked_add(v.checked_mul(top)?)?;
        let x2 = self
            .x1
            .checked_mul(o.x2)?
            .checked_add(self.x2.checked_mul(o.x1)?)?
            .checked_add(u.checked_mul(top)?)?;
        Ok(ModulePoint { x1, x2, tag: self.tag })
    }

    /// Multiplication by a scalar of the coefficient ring.
    pub fn checked_scale(&self, s: QuadInt) -> Result<Self> {
        Ok(ModulePoint {
            x1: self.x1.checked_mul(s)?,
            x2: self.x2.checked_mul(s)?,
            tag: self.tag,
        })
    }

    pub fn checked_pow(&self, e: u32) -> Result<Self> {
        let mut acc = ModulePoint::one(self.tag);
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Star map: `conj(x₁) + conj(x₂)·ζₙˢ`, written back in the `{1, ζₙ}` basis.
    pub fn star(&self) -> Self {
        let zs = star_zeta_coeffs(self.tag);
        let c2 = self.x2.conj();
        ModulePoint {
            x1: self.x1.conj() + c2 * zs.x1,
            x2: c2 * zs.x2,
            tag: self.tag,
        }
    }

    /// Direct-space position `x₁ + x₂·ζₙ` in the plane.
    #[inline]
    pub fn embed_direct(&self) -> PlanarPoint {
        let z = self.tag.zeta();
        let e1 = self.x1.embed();
        let e2 = self.x2.embed();
        PlanarPoint::new(e1 + e2 * z.x, e2 * z.y)
    }

    /// Internal-space position, equal to `embed_direct(star(x))`.
    #[inline]
    pub fn embed_internal(&self) -> PlanarPoint {
        let z = self.tag.star_zeta();
        let e1 = self.x1.embed_conj();
        let e2 = self.x2.embed_conj();
        PlanarPoint::new(e1 + e2 * z.x, e2 * z.y)
    }

    /// Gcd of the two coordinates (canonical associate).
    pub fn content(&self) -> Result<QuadInt> {
        self.x1.gcd(self.x2)
    }
}

/// `ζₙˢ` written as `c₀ + c₁·ζₙ`.
fn star_zeta_coeffs(tag: CycloTag) -> ModulePoint {
    // ζ₈³ = ζ₈ - √2, ζ₅² = (τ-1)ζ₅ - 1, ζ₁₂⁵ = ζ₁₂ - √3
    match tag {
        CycloTag::Eight => ModulePoint::from_coeffs(tag, [0, -1, 1, 0]),
        CycloTag::Five => ModulePoint::from_coeffs(tag, [-1, 0, -1, 1]),
        CycloTag::Twelve => ModulePoint::from_coeffs(tag, [0, -1, 1, 0]),
    }
}

impl fmt::Display for ModulePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})·ζ{}", self.x1, self.x2, self.tag.n())
    }
}

impl Add for ModulePoint {
    type Output = ModulePoint;
    fn add(self, o: Self) -> Self {
        self.checked_add(&o).expect("ModulePoint add")
    }
}

impl Sub for ModulePoint {
    type Output = ModulePoint;
    fn sub(self, o: Self) -> Self {
        self.checked_sub(&o).expect("ModulePoint sub")
    }
}

impl Mul for ModulePoint {
    type Output = ModulePoint;
    fn mul(self, o: Self) -> Self {
        self.checked_mul(&o).expect("ModulePoint mul")
    }
}

/// Relative width of the band around an edge inside which a point counts as
/// lying on that edge.
const EDGE_REL_TOL: f64 = 1e-12;

/// Points whose internal image is closer than this to a window edge are
/// reported by [`Window::near_boundary`].
pub const BOUNDARY_FLAG_BAND: f64 = 1e-9;

/// Regular convex polygon window, optionally rotated and shifted.
///
/// `rotation = 0` puts a vertex on the positive x-axis. Boundary points are
/// half-open: a point on the interior of an edge belongs to the window iff
/// the edge's outward normal has negative x, or zero x and negative y. A
/// vertex is decided by the edge that starts there (counter-clockwise).
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    sides: u32,
    edge_length: f64,
    rotation: f64,
    shift: PlanarPoint,
    normals: Vec<PlanarPoint>,
    apothem: f64,
}

impl Window {
    pub fn new(sides: u32, edge_length: f64) -> Result<Self> {
        Window::with_params(sides, edge_length, 0.0, PlanarPoint::ORIGIN)
    }

    pub fn with_params(sides: u32, edge_length: f64, rotation: f64, shift: PlanarPoint) -> Result<Self> {
        if sides < 3 {
            return Err(Error::usage(format!("window needs at least 3 sides, got {sides}")));
        }
        if !(edge_length > 0.0 && edge_length.is_finite()) {
            return Err(Error::usage(format!("window edge length must be positive, got {edge_length}")));
        }
        if !rotation.is_finite() || !shift.is_finite() {
            return Err(Error::usage("window rotation and shift must be finite"));
        }
        let n = sides as f64;
        let normals = (0..sides)
            .map(|k| PlanarPoint::polar(1.0, rotation + PI * (2 * k + 1) as f64 / n))
            .collect();
        let apothem = edge_length / (2.0 * (PI / n).tan());
        Ok(Window {
            sides,
            edge_length,
            rotation,
            shift,
            normals,
            apothem,
        })
    }

    pub fn sides(&self) -> u32 {
        self.sides
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn shift(&self) -> PlanarPoint {
        self.shift
    }

    pub fn circumradius(&self) -> f64 {
        self.edge_length / (2.0 * (PI / self.sides as f64).sin())
    }

    pub fn apothem(&self) -> f64 {
        self.apothem
    }

    pub fn area(&self) -> f64 {
        0.5 * self.sides as f64 * self.edge_length * self.apothem
    }

    /// Vertices in counter-clockwise order, shift included.
    pub fn vertices(&self) -> Vec<PlanarPoint> {
        let r = self.circumradius();
        let n = self.sides as f64;
        (0..self.sides)
            .map(|k| PlanarPoint::polar(r, self.rotation + TAU * k as f64 / n) + self.shift)
            .collect()
    }

    /// `(x_min, x_max, y_min, y_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.vertices().iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(x0, x1, y0, y1), v| (x0.min(v.x), x1.max(v.x), y0.min(v.y), y1.max(v.y)),
        )
    }

    fn owns_edge(&self, k: usize) -> bool {
        let n = self.normals[k];
        if n.x.abs() <= EDGE_REL_TOL {
            n.y < 0.0
        } else {
            n.x < 0.0
        }
    }

    /// Half-open containment test.
    pub fn contains(&self, p: PlanarPoint) -> Result<bool> {
        if !p.is_finite() {
            return Err(Error::usage(format!("non-finite point ({}, {})", p.x, p.y)));
        }
        Ok(self.contains_finite(p))
    }

    /// Containment for points already known to be finite.
    #[inline]
    pub fn contains_finite(&self, p: PlanarPoint) -> bool {
        let q = p - self.shift;
        let tol = EDGE_REL_TOL * self.apothem;
        let mut on = [usize::MAX; 2];
        let mut count = 0;
        for (k, n) in self.normals.iter().enumerate() {
            let s = n.dot(q) - self.apothem;
            if s > tol {
                return false;
            }
            if s >= -tol {
                if count < 2 {
                    on[count] = k;
                }
                count += 1;
            }
        }
        match count {
            0 => true,
            1 => self.owns_edge(on[0]),
            _ => {
                // vertex between edges on[0] and on[1]; it starts the later one
                let m = self.normals.len();
                let start = if on[0] == 0 && on[1] == m - 1 { 0 } else { on[1] };
                self.owns_edge(start)
            }
        }
    }

    /// Signed distance-like margin `max_k (n_k·(p - shift) - apothem)`;
    /// negative inside, positive outside.
    pub fn margin(&self, p: PlanarPoint) -> f64 {
        let q = p - self.shift;
        self.normals
            .iter()
            .map(|n| n.dot(q) - self.apothem)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True if `p` lies within [`BOUNDARY_FLAG_BAND`] of the window boundary.
    pub fn near_boundary(&self, p: PlanarPoint) -> bool {
        self.margin(p).abs() < BOUNDARY_FLAG_BAND
    }

    /// Similarity image `s·W`: edge length and shift scaled by `s`.
    pub fn scale(&self, s: f64) -> Result<Window> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::usage(format!("window scale factor must be positive, got {s}")));
        }
        Window::with_params(self.sides, self.edge_length * s, self.rotation, self.shift.scale(s))
    }

    /// Point reflection `-W` (the shift changes sign).
    pub fn reflect(&self) -> Window {
        Window::with_params(
            self.sides,
            self.edge_length,
            self.rotation + PI,
            self.shift.scale(-1.0),
        )
        .expect("reflection of a valid window")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(p: PlanarPoint, x: f64, y: f64, tol: f64) -> bool {
        (p.x - x).abs() < tol && (p.y - y).abs() < tol
    }

    /// Numeric star map: coefficients at the conjugate root, `ζ` at `ζˢ`,
    /// evaluated with complex floating arithmetic.
    fn numeric_star(p: &ModulePoint) -> PlanarPoint {
        let w = p.tag.ring().omega_conj();
        let c1 = p.x1.a() as f64 + p.x1.b() as f64 * w;
        let c2 = p.x2.a() as f64 + p.x2.b() as f64 * w;
        let ang = TAU * p.tag.star_power() as f64 / p.tag.n() as f64;
        PlanarPoint::new(c1 + c2 * ang.cos(), c2 * ang.sin())
    }

    #[test]
    fn reduction_relations_hold_numerically() {
        for tag in CycloTag::ALL {
            let (u, v) = tag.reduction();
            let z = tag.zeta();
            // ζ² computed as a complex number
            let z2 = PlanarPoint::new(z.x * z.x - z.y * z.y, 2.0 * z.x * z.y);
            let rhs = PlanarPoint::new(u.embed() * z.x + v.embed(), u.embed() * z.y);
            assert!(close(z2, rhs.x, rhs.y, 1e-12), "{tag:?}");
        }
    }

    #[test]
    fn star_of_zeta_is_zeta_to_the_star_power() {
        for tag in CycloTag::ALL {
            let z = ModulePoint::zeta(tag);
            let s = z.star();
            let expected = z.checked_pow(tag.star_power()).unwrap();
            assert_eq!(s, expected, "{tag:?}");
            let p = s.embed_direct();
            let ang = TAU * tag.star_power() as f64 / tag.n() as f64;
            assert!(close(p, ang.cos(), ang.sin(), 1e-12));
        }
    }

    #[test]
    fn star_examples() {
        let t = CycloTag::Eight;
        let sqrt2 = ModulePoint::from_coeffs(t, [0, 1, 0, 0]);
        assert_eq!(sqrt2.star(), ModulePoint::from_coeffs(t, [0, -1, 0, 0]));
        for tag in CycloTag::ALL {
            assert_eq!(ModulePoint::one(tag).star(), ModulePoint::one(tag));
        }
    }

    #[test]
    fn embeddings() {
        assert!(close(ModulePoint::one(CycloTag::Eight).embed_direct(), 1.0, 0.0, 1e-15));
        assert!(close(ModulePoint::zeta(CycloTag::Eight).embed_direct(), FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1e-5));
        assert!(close(ModulePoint::zeta(CycloTag::Five).embed_direct(), 0.30902, 0.95106, 1e-5));
        assert!(close(ModulePoint::one(CycloTag::Eight).embed_internal(), 1.0, 0.0, 1e-15));
        assert!(close(ModulePoint::zeta(CycloTag::Eight).embed_internal(), -FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1e-5));
        assert!(close(ModulePoint::zeta(CycloTag::Twelve).embed_internal(), -0.86603, 0.5, 1e-5));
    }

    #[test]
    fn star_squared_is_identity_for_eight_and_twelve_and_complex_conjugation_for_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for tag in CycloTag::ALL {
            for _ in 0..2000 {
                let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-500..500));
                let x = ModulePoint::from_coeffs(tag, c);
                let twice = x.star().star();
                match tag {
                    CycloTag::Five => {
                        let p = x.embed_direct();
                        let q = twice.embed_direct();
                        assert!((p.x - q.x).abs() < 1e-8 && (p.y + q.y).abs() < 1e-8);
                        assert_eq!(twice.star().star(), x);
                    }
                    _ => assert_eq!(twice, x),
                }
            }
        }
    }

    #[test]
    fn embed_internal_matches_numeric_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for tag in CycloTag::ALL {
            for _ in 0..5000 {
                let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-1000..1000));
                let x = ModulePoint::from_coeffs(tag, c);
                let a = x.embed_internal();
                let b = numeric_star(&x);
                let c2 = x.star().embed_direct();
                assert!((a - b).norm() < 1e-9, "{x}");
                assert!((a - c2).norm() < 1e-9, "{x}");
            }
        }
    }

    /// A nonzero module element has field norm `|x|²·|x*|² ≥ 1`, so with
    /// coefficients bounded by 10³ two distinct points cannot share a
    /// position to within 1e-9.
    #[test]
    fn embed_direct_is_injective_on_small_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for tag in CycloTag::ALL {
            for _ in 0..20_000 {
                let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-1000..=1000));
                let d: [i64; 4] = std::array::from_fn(|_| rng.random_range(-1000..=1000));
                if c == d {
                    continue;
                }
                let diff = ModulePoint::from_coeffs(tag, c) - ModulePoint::from_coeffs(tag, d);
                let p = diff.embed_direct().norm();
                let q = diff.embed_internal().norm();
                assert!(p * q >= 1.0 - 1e-6, "{diff}");
                assert!(p > 1e-9);
            }
        }
        // and along a unit orbit, where the direct image shrinks fastest
        let t = CycloTag::Eight;
        let mut x = ModulePoint::one(t);
        let shrink = ModulePoint::from_coeffs(t, [-1, 1, 0, 0]);
        for _ in 0..10 {
            x = x * shrink;
            let p = x.embed_direct().norm();
            let q = x.embed_internal().norm();
            assert!((p * q - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn window_examples() {
        let w8 = Window::new(8, 1.0).unwrap();
        assert!(w8.contains(PlanarPoint::ORIGIN).unwrap());
        assert!((w8.circumradius() - 1.306_562_964_876_376_6).abs() < 1e-12);
        assert!(!w8.contains(PlanarPoint::new(2.0, 0.0)).unwrap());
        let tau = RingTag::GoldenTau.omega();
        let w10 = Window::new(10, ((tau + 2.0) / 5.0).sqrt()).unwrap();
        assert!(w10.contains(PlanarPoint::ORIGIN).unwrap());
        assert!((w10.circumradius() - 1.376_381_920_471_173_5).abs() < 1e-12);
        assert!(w8.contains(PlanarPoint::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn scaling_window() {
        let w = Window::new(8, 1.0).unwrap();
        assert_eq!(w.scale(1.0).unwrap(), w);
        let s = 1.0 + std::f64::consts::SQRT_2;
        assert!((w.scale(s).unwrap().edge_length() - 2.414_213_562_373_095).abs() < 1e-12);
        assert!(w.scale(0.0).is_err());
        assert!(w.scale(-1.0).is_err());
    }

    #[test]
    fn opposite_boundary_points_split_by_half_open_rule() {
        for sides in [8u32, 10, 12] {
            for rot in [0.0, PI / sides as f64, 0.3] {
                let w = Window::with_params(sides, 1.0, rot, PlanarPoint::ORIGIN).unwrap();
                let verts = w.vertices();
                let n = verts.len();
                for k in 0..n {
                    let a = verts[k];
                    let b = verts[(k + 1) % n];
                    for t in [0.0, 0.25, 0.5, 0.9] {
                        let p = a.scale(1.0 - t) + b.scale(t);
                        let q = p.scale(-1.0);
                        let inside = [w.contains(p).unwrap(), w.contains(q).unwrap()];
                        assert_eq!(
                            inside.iter().filter(|&&x| x).count(),
                            1,
                            "sides {sides} rot {rot} edge {k} t {t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_maps_membership() {
        let w = Window::with_params(12, 1.0, 0.1, PlanarPoint::new(1e-4, 2e-4)).unwrap();
        let r = w.reflect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let p = PlanarPoint::new(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5));
            if w.margin(p).abs() > 1e-9 {
                assert_eq!(w.contains(p).unwrap(), r.contains(p.scale(-1.0)).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn containment_is_similarity_invariant(sides in prop_oneof![Just(8u32), Just(10), Just(12)],
                                              x in -2.0f64..2.0, y in -2.0f64..2.0,
                                              s in 0.1f64..10.0, rot in 0.0f64..1.0) {
            let w = Window::with_params(sides, 1.0, rot, PlanarPoint::new(0.01, -0.02)).unwrap();
            let p = PlanarPoint::new(x, y);
            prop_assume!(w.margin(p).abs() > 1e-9);
            prop_assert_eq!(w.contains(p).unwrap(), w.scale(s).unwrap().contains(p.scale(s)).unwrap());
        }

        #[test]
        fn star_is_a_ring_homomorphism(tag in prop_oneof![Just(CycloTag::Eight), Just(CycloTag::Five), Just(CycloTag::Twelve)],
                                       c in proptest::array::uniform4(-300i64..300),
                                       d in proptest::array::uniform4(-300i64..300)) {
            let x = ModulePoint::from_coeffs(tag, c);
            let y = ModulePoint::from_coeffs(tag, d);
            prop_assert_eq!((x + y).star(), x.star() + y.star());
            prop_assert_eq!((x * y).star(), x.star() * y.star());
        }
    }
}
