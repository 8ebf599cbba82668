//! Hamilton quaternions, imaginary units and the spheres `x + y𝕊`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::DEFAULT_EPS;

/// A quaternion `w + x i + y j + z k`.
///
/// Serialized as the JSON array `[w, x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Real part.
    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part as a quaternion with zero real component.
    pub fn im(self) -> Self {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Euclidean inner product on ℍ ≅ ℝ⁴.
    pub fn dot(self, other: Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `q⁻¹ = q̄ / |q|²`, refusing moduli at or below [`DEFAULT_EPS`].
    pub fn inverse(self) -> Result<Self> {
        self.inverse_eps(DEFAULT_EPS)
    }

    pub fn inverse_eps(self, eps: f64) -> Result<Self> {
        let n2 = self.norm_sqr();
        let modulus = n2.sqrt();
        if modulus <= eps {
            return Err(Error::ZeroDivisor { modulus });
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// `p⁻¹ q p`, the conjugation used by the regular product formula.
    pub fn conjugate_by(self, p: Quaternion) -> Result<Self> {
        Ok(p.inverse()? * self * p)
    }

    /// Writes `q = x + y I` with `y = |Im q| ≥ 0`.
    pub fn slice_decompose(self) -> SliceCoords {
        let y = self.im_norm();
        let unit = if y > 0.0 {
            Some(ImaginaryUnit::from_normalized(self.im().scale(1.0 / y)))
        } else {
            None
        };
        SliceCoords { x: self.w, y, unit }
    }

    /// The sphere `S_q = Re q + |Im q| 𝕊` containing `q`.
    pub fn sphere(self) -> SphereRef {
        SphereRef {
            x: self.w,
            y: self.im_norm(),
        }
    }

    /// Shares a sphere `x + y𝕊` with `other` up to `tol` in both coordinates.
    pub fn same_sphere(self, other: Quaternion, tol: f64) -> bool {
        (self.re() - other.re()).abs() <= tol && (self.im_norm() - other.im_norm()).abs() <= tol
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: u32) -> Self {
        let mut base = self;
        let mut acc = Quaternion::ONE;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

pub fn mul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

pub fn inverse(q: Quaternion) -> Result<Quaternion> {
    q.inverse()
}

pub fn slice_decompose(q: Quaternion) -> SliceCoords {
    q.slice_decompose()
}

pub fn same_sphere(p: Quaternion, q: Quaternion, tol: f64) -> bool {
    p.same_sphere(q, tol)
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Quaternion) {
        *self = *self * o;
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.w, self.x, self.y, self.z)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        Ok(Quaternion::from_array(a))
    }
}

/// A unit of `𝕊 = { q : q² = −1 }`: purely imaginary with modulus one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImaginaryUnit(Quaternion);

impl ImaginaryUnit {
    pub const I: ImaginaryUnit = ImaginaryUnit(Quaternion::I);
    pub const J: ImaginaryUnit = ImaginaryUnit(Quaternion::J);
    pub const K: ImaginaryUnit = ImaginaryUnit(Quaternion::K);

    /// Projects onto the imaginary part and renormalizes.
    pub fn new(q: Quaternion) -> Result<Self> {
        let im = q.im();
        let n = im.norm();
        if n <= DEFAULT_EPS {
            return Err(Error::Invalid(format!("{q} has no imaginary direction to normalize")));
        }
        Ok(ImaginaryUnit::from_normalized(im.scale(1.0 / n)))
    }

    fn from_normalized(q: Quaternion) -> Self {
        // one more pass of normalization removes the last ulp of drift
        let n = q.norm();
        ImaginaryUnit(q.scale(1.0 / n))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }

    /// A unit `J ∈ 𝕊` orthogonal to `self`, so that `1, I, J, IJ` is an
    /// orthonormal basis of ℍ.
    pub fn orthogonal(self) -> ImaginaryUnit {
        let i = self.0;
        // pick the coordinate axis least aligned with I and Gram-Schmidt it
        let axes = [Quaternion::I, Quaternion::J, Quaternion::K];
        let mut best = axes[0];
        let mut best_dot = f64::INFINITY;
        for a in axes {
            let d = a.dot(i).abs();
            if d < best_dot {
                best_dot = d;
                best = a;
            }
        }
        let v = best - i.scale(best.dot(i));
        ImaginaryUnit::from_normalized(v)
    }
}

impl Neg for ImaginaryUnit {
    type Output = ImaginaryUnit;

    fn neg(self) -> ImaginaryUnit {
        ImaginaryUnit(-self.0)
    }
}

impl From<ImaginaryUnit> for Quaternion {
    fn from(u: ImaginaryUnit) -> Quaternion {
        u.0
    }
}

impl Serialize for ImaginaryUnit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ImaginaryUnit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let q = Quaternion::deserialize(d)?;
        ImaginaryUnit::new(q).map_err(serde::de::Error::custom)
    }
}

/// Output of [`Quaternion::slice_decompose`]: `q = x + y I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceCoords {
    pub x: f64,
    pub y: f64,
    pub unit: Option<ImaginaryUnit>,
}

/// The 2-sphere `x + y𝕊` (a single real point when `y = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereRef {
    pub x: f64,
    pub y: f64,
}

impl SphereRef {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y >= 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Invalid(format!(
                "sphere needs finite x and y >= 0, got ({x}, {y})"
            )));
        }
        Ok(SphereRef { x, y })
    }

    pub fn is_real_point(self) -> bool {
        self.y == 0.0
    }

    /// The point `x + y I` of the sphere.
    pub fn point(self, unit: ImaginaryUnit) -> Quaternion {
        Quaternion::real(self.x) + unit.get().scale(self.y)
    }

    /// Modulus shared by all points of the sphere.
    pub fn modulus(self) -> f64 {
        self.x.hypot(self.y)
    }
}
