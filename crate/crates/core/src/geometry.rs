//! Geometry of a regular function: the sphere-preserving map `T_f`, quotient
//! evaluation, the real differential, zeros on spheres with their
//! multiplicities, and re-expansion of `f` around a nonreal point of a slice.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::{ImaginaryUnit, Quaternion, SphereRef};
use crate::series::{geometric_tail, SliceSeries};
use crate::DEFAULT_EPS;

/// Below this imaginary modulus a point is treated as real.
const REAL_AXIS_TOL: f64 = 1e-14;

/// `T_f(q) = f^c(q)⁻¹ q f^c(q)`.
pub fn t_map(f: &SliceSeries, q: Quaternion) -> Result<Quaternion> {
    let fc = f.conjugate().eval(q)?;
    if fc.norm() <= DEFAULT_EPS {
        return Err(Error::ZeroDivisor { modulus: fc.norm() });
    }
    q.conjugate_by(fc)
}

/// `(f^{-*} * g)(q) = f(T_f(q))⁻¹ g(T_f(q))` for `q` off the zero set of `f^s`.
pub fn quotient_eval(f: &SliceSeries, g: &SliceSeries, q: Quaternion) -> Result<Quaternion> {
    let fs = f.symmetrize().eval(q)?;
    if fs.norm() <= DEFAULT_EPS {
        return Err(Error::ZeroDivisor { modulus: fs.norm() });
    }
    let t = t_map(f, q)?;
    Ok(f.eval(t)?.inverse()? * g.eval(t)?)
}

/// `F(q) G(F(q)⁻¹ q F(q))`: the regular product evaluated from pointwise
/// values of its factors, 0 where `F(q) = 0`.
pub fn star_product_pointwise<F, G>(f: F, g: G, q: Quaternion) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Result<Quaternion>,
    G: Fn(Quaternion) -> Result<Quaternion>,
{
    let fq = f(q)?;
    if fq.norm() <= DEFAULT_EPS {
        return Ok(Quaternion::ZERO);
    }
    Ok(fq * g(q.conjugate_by(fq)?)?)
}

/// The real differential `df_q` as a 4×4 matrix on ℍ ≅ ℝ⁴ (basis `1, i, j, k`).
///
/// On `L_I` it is right multiplication by `cullen_part`, on `L_I^⊥` right
/// multiplication by `spherical_part`; at real points `cullen_part` acts on
/// all of ℍ.
#[derive(Clone, Debug, PartialEq)]
pub struct RealDifferential {
    pub matrix: Matrix4<f64>,
    pub cullen_part: Quaternion,
    pub spherical_part: Option<Quaternion>,
    pub unit: Option<ImaginaryUnit>,
}

impl RealDifferential {
    fn assemble(cullen: Quaternion, spherical: Option<Quaternion>, unit: Option<ImaginaryUnit>) -> Self {
        let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
        let mut matrix = Matrix4::zeros();
        for (col, &e) in basis.iter().enumerate() {
            let image = apply_split(e, cullen, spherical, unit);
            matrix.set_column(col, &to_vec(image));
        }
        RealDifferential {
            matrix,
            cullen_part: cullen,
            spherical_part: spherical,
            unit,
        }
    }

    pub fn apply(&self, v: Quaternion) -> Quaternion {
        from_vec(&(self.matrix * to_vec(v)))
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Solves `df_q(v) = w`.
    pub fn solve(&self, w: Quaternion) -> Option<Quaternion> {
        self.matrix.lu().solve(&to_vec(w)).map(|v| from_vec(&v))
    }

    /// Smallest singular value of the matrix.
    pub fn min_singular_value(&self) -> f64 {
        self.matrix
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn apply_split(
    v: Quaternion,
    cullen: Quaternion,
    spherical: Option<Quaternion>,
    unit: Option<ImaginaryUnit>,
) -> Quaternion {
    match (spherical, unit) {
        (Some(s), Some(i)) => {
            let i = i.get();
            let par = Quaternion::real(v.w) + i.scale(v.dot(i));
            let perp = v - par;
            par * cullen + perp * s
        }
        _ => v * cullen,
    }
}

pub(crate) fn to_vec(q: Quaternion) -> Vector4<f64> {
    Vector4::new(q.w, q.x, q.y, q.z)
}

pub(crate) fn from_vec(v: &Vector4<f64>) -> Quaternion {
    Quaternion::new(v[0], v[1], v[2], v[3])
}

/// A series together with its Cullen derivative, for repeated pointwise
/// differential computations.
#[derive(Clone, Debug)]
pub struct RegularFn {
    f: SliceSeries,
    dc: SliceSeries,
}

impl RegularFn {
    pub fn new(f: SliceSeries) -> Self {
        let dc = f.cullen_derivative();
        RegularFn { f, dc }
    }

    pub fn series(&self) -> &SliceSeries {
        &self.f
    }

    pub fn derivative(&self) -> &SliceSeries {
        &self.dc
    }

    pub fn radius(&self) -> f64 {
        self.f.radius()
    }

    pub fn value(&self, q: Quaternion) -> Result<Quaternion> {
        self.f.eval(q)
    }

    pub fn cullen(&self, q: Quaternion) -> Result<Quaternion> {
        self.dc.eval(q)
    }

    /// Spherical derivative; equals the Cullen derivative at real points.
    pub fn spherical(&self, q: Quaternion) -> Quaternion {
        self.f.spherical_parts(q.re(), q.norm_sqr()).0
    }

    pub fn differential(&self, q: Quaternion) -> Result<RealDifferential> {
        let cullen = self.dc.eval(q)?;
        let c = q.slice_decompose();
        if c.y <= REAL_AXIS_TOL {
            return Ok(RealDifferential::assemble(cullen, None, None));
        }
        let spherical = self.spherical(q);
        Ok(RealDifferential::assemble(cullen, Some(spherical), c.unit))
    }
}

pub fn real_differential(f: &SliceSeries, q: Quaternion) -> Result<RealDifferential> {
    f.eval(q)?;
    RegularFn::new(f.clone()).differential(q)
}

/// Scale-aware singularity threshold `1e-8 (1 + |∂_c f(q)|⁴)`.
pub fn default_singular_tol(cullen: Quaternion) -> f64 {
    1e-8 * (1.0 + cullen.norm_sqr() * cullen.norm_sqr())
}

/// `|det df_q| < tol`, with `tol` defaulting to [`default_singular_tol`].
pub fn is_singular(f: &SliceSeries, q: Quaternion, tol: Option<f64>) -> Result<bool> {
    let d = real_differential(f, q)?;
    let tol = tol.unwrap_or_else(|| default_singular_tol(d.cullen_part));
    Ok(d.determinant().abs() < tol)
}

/// Zero structure of a series on one sphere `x + y𝕊`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub sphere: SphereRef,
    /// Spherical multiplicity `2m`.
    #[serde(rename = "spherical")]
    pub spherical_mult: usize,
    /// Isolated multiplicity `n`.
    #[serde(rename = "isolated")]
    pub isolated_mult: usize,
    #[serde(rename = "point")]
    pub isolated_point: Option<Quaternion>,
    /// Minimum of `|h|` over the sphere for the zero-free cofactor `h`,
    /// measured to working precision only.
    pub cofactor_min_modulus: f64,
}

impl MultiplicityReport {
    pub fn total(&self) -> usize {
        self.spherical_mult + self.isolated_mult
    }
}

/// `f(x + yI) = b + I c` with `b, c` independent of `I`.
fn affine_on_sphere(f: &SliceSeries, s: SphereRef) -> (Quaternion, Quaternion) {
    let m2 = s.x * s.x + s.y * s.y;
    let (p, q) = f.spherical_parts(s.x, m2);
    let b = f.coeff(0) + p.scale(s.x) - q.scale(m2);
    let c = p.scale(s.y);
    (b, c)
}

/// `min_{I∈𝕊} |b + I c|` and the minimizing unit, if `c ≠ 0`.
fn sphere_minimum(b: Quaternion, c: Quaternion) -> (f64, Option<ImaginaryUnit>) {
    let cn = c.norm();
    if cn == 0.0 {
        return (b.norm(), None);
    }
    // b + Ic = (I − w) c with w = −b c⁻¹
    let w = -(b * c.conj().scale(1.0 / (cn * cn)));
    let im = w.im_norm();
    let dist = (w.w * w.w + (im - 1.0) * (im - 1.0)).sqrt();
    let unit = if im > 0.0 { ImaginaryUnit::new(w).ok() } else { None };
    (dist * cn, unit)
}

fn sphere_scale(f: &SliceSeries, modulus: f64) -> f64 {
    let mut w = 1.0;
    let mut acc = 0.0;
    for a in f.coeffs() {
        acc += a.norm() * w;
        w *= modulus;
    }
    acc
}

/// Default relative tolerance of [`find_zero_on_sphere`].
pub const SPHERE_ZERO_TOL: f64 = 1e-9;

pub fn find_zero_on_sphere(f: &SliceSeries, s: SphereRef) -> Result<MultiplicityReport> {
    find_zero_on_sphere_tol(f, s, SPHERE_ZERO_TOL)
}

/// Factors `f = [(q−x)²+y²]^m (q−p₁)*…*(q−pₙ)*h` on the sphere `s` and
/// reports `2m`, `n` and `p₁`. `tol` is relative to `Σ |aₙ| |s|ⁿ`.
pub fn find_zero_on_sphere_tol(f: &SliceSeries, s: SphereRef, tol: f64) -> Result<MultiplicityReport> {
    if !(s.y > 0.0) {
        return Err(Error::Invalid("find_zero_on_sphere needs a sphere with y > 0".into()));
    }
    let modulus = s.modulus();
    if modulus >= f.radius() {
        return Err(Error::Domain {
            modulus,
            radius: f.radius(),
        });
    }
    let degenerate = || Error::Degenerate { x: s.x, y: s.y };
    let scale = sphere_scale(f, modulus);
    if scale == 0.0 {
        return Err(degenerate());
    }
    let abs_tol = tol * scale;

    let mut g = f.trimmed();
    let mut m = 0;
    loop {
        let (b, c) = affine_on_sphere(&g, s);
        if b.norm() > abs_tol || c.norm() > abs_tol {
            break;
        }
        if g.order() < 2 {
            return Err(degenerate());
        }
        let (quot, _) = g.divide_real_quadratic(-2.0 * s.x, modulus * modulus);
        g = quot.trimmed();
        m += 1;
    }

    let mut n = 0;
    let mut point = None;
    loop {
        let local_scale = sphere_scale(&g, modulus).max(f64::MIN_POSITIVE);
        let (b, c) = affine_on_sphere(&g, s);
        let (min, unit) = sphere_minimum(b, c);
        let unit = match unit {
            Some(u) if min <= tol * local_scale && g.order() >= 1 => u,
            _ => {
                return Ok(MultiplicityReport {
                    sphere: s,
                    spherical_mult: 2 * m,
                    isolated_mult: n,
                    isolated_point: point,
                    cofactor_min_modulus: min,
                });
            }
        };
        let p = s.point(unit);
        point.get_or_insert(p);
        g = g.divide_linear_with_remainder(p).0.trimmed();
        n += 1;
    }
}

/// Re-expands `f` around `p = x + yI` along the slice `L_I`: the series
/// `f_p` of order `order` on `B(0, R − |p|)` with `f_p(z) = f(p + z)` for
/// `z ∈ L_I`. Coefficients come from a DFT of `f(p + z)` on a circle of
/// radius `0.8 (R − |p|)` in `L_I` sampled at `4·order` points.
pub fn recenter_slice(f: &SliceSeries, p: Quaternion, order: usize) -> Result<SliceSeries> {
    let new_radius = f.radius() - p.norm();
    if !(new_radius > 0.0) {
        return Err(Error::Domain {
            modulus: p.norm(),
            radius: f.radius(),
        });
    }
    let unit = p.slice_decompose().unit.unwrap_or(ImaginaryUnit::I);
    let i = unit.get();
    let j = unit.orthogonal().get();
    let ij = i * j;
    let samples = 4 * order.max(1);
    let circle = 0.8 * new_radius;

    let mut alpha = Vec::with_capacity(samples);
    let mut beta = Vec::with_capacity(samples);
    let mut peak: f64 = 0.0;
    for k in 0..samples {
        let theta = 2.0 * PI * k as f64 / samples as f64;
        let z = Quaternion::real(circle * theta.cos()) + i.scale(circle * theta.sin());
        let w = f.eval_unchecked(p + z);
        peak = peak.max(w.norm());
        // w = α + β J with α, β ∈ L_I
        alpha.push(Complex64::new(w.w, w.dot(i)));
        beta.push(Complex64::new(w.dot(j), w.dot(ij)));
    }
    let fft = FftPlanner::new().plan_fft_forward(samples);
    fft.process(&mut alpha);
    fft.process(&mut beta);

    let noise_floor = 1e-14 * peak.max(f64::MIN_POSITIVE);
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut weight = 1.0 / samples as f64;
    for n in 0..=order {
        let a = alpha[n] * weight;
        let b = beta[n] * weight;
        let c = Quaternion::real(a.re) + i.scale(a.im) + j.scale(b.re) + ij.scale(b.im);
        // c·circleⁿ is what the transform resolves; below the floor it is rounding noise
        let resolved = c.norm() * circle.powi(n as i32);
        coeffs.push(if resolved < noise_floor { Quaternion::ZERO } else { c });
        weight /= circle;
    }
    let top: f64 = coeffs
        .iter()
        .enumerate()
        .skip(order.saturating_sub(1))
        .map(|(n, c)| c.norm() * circle.powi(n as i32))
        .fold(0.0, f64::max);
    if top > 1e-12 * peak.max(1.0) {
        log::warn!("recenter_slice: top coefficients not decayed ({top:e}); raise the order to avoid aliasing");
    }
    let mut s = SliceSeries::new(coeffs, new_radius)?;
    let tail = geometric_tail(s.coeffs(), s.tail_radius());
    s = s.with_tail(tail);
    Ok(s)
}
