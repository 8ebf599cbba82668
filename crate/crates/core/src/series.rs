//! Truncated slice regular power series `f(q) = Σ qⁿ aₙ` on a ball `B(0, R)`.
//!
//! Coefficients multiply on the right. Every series carries a tail bound: a
//! bound on `Σ_{n>N} |aₙ| ρⁿ` with `ρ = min(R, 1)`, i.e. on the modulus of
//! the discarded remainder anywhere in the closed ball of radius `ρ`. The
//! bound is exact bookkeeping for sums and products and a geometric-decay
//! estimate where no closed form is available (reciprocals, derivatives).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::DEFAULT_EPS;

/// Default cap on the order of a regular product.
pub const DEFAULT_MAX_ORDER: usize = 256;

const RADIUS_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct SliceSeries {
    coeffs: Vec<Quaternion>,
    radius: f64,
    tail: f64,
    truncated: bool,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    radius: f64,
    coeffs: Vec<Quaternion>,
    #[serde(default, skip_serializing_if = "is_zero")]
    tail: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    truncated: bool,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl TryFrom<SeriesJson> for SliceSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        if !(j.tail >= 0.0) {
            return Err(Error::Invalid(format!("tail bound must be >= 0, got {}", j.tail)));
        }
        let mut s = SliceSeries::new(j.coeffs, j.radius)?;
        s.tail = j.tail;
        s.truncated = j.truncated;
        Ok(s)
    }
}

impl From<SliceSeries> for SeriesJson {
    fn from(s: SliceSeries) -> Self {
        SeriesJson {
            radius: s.radius,
            coeffs: s.coeffs,
            tail: s.tail,
            truncated: s.truncated,
        }
    }
}

impl SliceSeries {
    pub fn new(coeffs: Vec<Quaternion>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("series needs at least one coefficient".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Invalid(format!(
                "series radius must be positive and finite, got {radius}"
            )));
        }
        if let Some(n) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("coefficient {n} is not finite")));
        }
        Ok(SliceSeries {
            coeffs,
            radius,
            tail: 0.0,
            truncated: false,
        })
    }

    fn raw(coeffs: Vec<Quaternion>, radius: f64, tail: f64) -> Self {
        debug_assert!(!coeffs.is_empty());
        SliceSeries {
            coeffs,
            radius,
            tail,
            truncated: false,
        }
    }

    /// Builds a series from real coefficients.
    pub fn from_reals(coeffs: &[f64], radius: f64) -> Result<Self> {
        SliceSeries::new(coeffs.iter().map(|&c| Quaternion::real(c)).collect(), radius)
    }

    pub fn constant(c: Quaternion, radius: f64) -> Self {
        SliceSeries::raw(vec![c], radius, 0.0)
    }

    pub fn zero(radius: f64) -> Self {
        SliceSeries::constant(Quaternion::ZERO, radius)
    }

    /// `f(q) = q`.
    pub fn identity(radius: f64) -> Self {
        SliceSeries::raw(vec![Quaternion::ZERO, Quaternion::ONE], radius, 0.0)
    }

    /// `f(q) = q - q0`.
    pub fn linear(q0: Quaternion, radius: f64) -> Self {
        SliceSeries::raw(vec![-q0, Quaternion::ONE], radius, 0.0)
    }

    pub fn with_tail(mut self, tail: f64) -> Self {
        self.tail = tail;
        self
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    /// Coefficient `aₙ`, zero beyond the stored order.
    pub fn coeff(&self, n: usize) -> Quaternion {
        self.coeffs.get(n).copied().unwrap_or(Quaternion::ZERO)
    }

    /// Truncation degree `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Set when a product hit the order cap and dropped coefficients.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Radius at which the tail bound is measured.
    pub fn tail_radius(&self) -> f64 {
        self.radius.min(1.0)
    }

    /// Weighted ℓ¹ norm `Σ |aₙ| ρⁿ`, `ρ = min(R, 1)`: bounds `|f|` on `B̄(0, ρ)`.
    pub fn l1_norm(&self) -> f64 {
        weighted_l1(&self.coeffs, self.tail_radius())
    }

    /// Errors with [`Error::Truncated`] unless the caller opts in.
    pub fn require_untruncated(&self, allow_truncated: bool) -> Result<()> {
        if self.truncated && !allow_truncated {
            Err(Error::Truncated)
        } else {
            Ok(())
        }
    }

    fn check_domain(&self, q: Quaternion) -> Result<()> {
        let m = q.norm();
        if m < self.radius {
            Ok(())
        } else {
            Err(Error::Domain {
                modulus: m,
                radius: self.radius,
            })
        }
    }

    fn check_radius(&self, other: &SliceSeries) -> Result<()> {
        let (a, b) = (self.radius, other.radius);
        if (a - b).abs() <= RADIUS_REL_TOL * a.max(b) {
            Ok(())
        } else {
            Err(Error::RadiusMismatch { left: a, right: b })
        }
    }

    /// Horner evaluation `a₀ + q(a₁ + q(a₂ + …))`.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        self.check_domain(q)?;
        Ok(self.eval_unchecked(q))
    }

    pub(crate) fn eval_unchecked(&self, q: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for &a in self.coeffs.iter().rev() {
            acc = a + q * acc;
        }
        acc
    }

    pub fn add(&self, other: &SliceSeries) -> Result<SliceSeries> {
        self.check_radius(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        let mut s = SliceSeries::raw(coeffs, self.radius, self.tail + other.tail);
        s.truncated = self.truncated || other.truncated;
        Ok(s)
    }

    pub fn sub(&self, other: &SliceSeries) -> Result<SliceSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SliceSeries {
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|c| *c = -*c);
        s
    }

    /// `f + c` for a quaternion constant `c`.
    pub fn add_constant(&self, c: Quaternion) -> SliceSeries {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    /// `c * f`, coefficients `c aₙ`.
    pub fn left_mul(&self, c: Quaternion) -> SliceSeries {
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|a| *a = c * *a);
        s.tail *= c.norm();
        s
    }

    /// `f * c = f(q) c`, coefficients `aₙ c`.
    pub fn right_mul(&self, c: Quaternion) -> SliceSeries {
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|a| *a *= c);
        s.tail *= c.norm();
        s
    }

    /// `q * f = q f(q)`: shifts the coefficients up by one degree.
    pub fn shift_up(&self) -> SliceSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Quaternion::ZERO);
        coeffs.extend_from_slice(&self.coeffs);
        let mut s = SliceSeries::raw(coeffs, self.radius, self.tail * self.tail_radius());
        s.truncated = self.truncated;
        s
    }

    /// Keeps degrees `0..=order`, moving the dropped mass into the tail bound.
    pub fn truncate_to(&self, order: usize) -> SliceSeries {
        if order >= self.order() {
            return self.clone();
        }
        let rho = self.tail_radius();
        let dropped = weighted_l1_from(&self.coeffs, order + 1, rho);
        let mut s = SliceSeries::raw(self.coeffs[..=order].to_vec(), self.radius, self.tail + dropped);
        s.truncated = self.truncated;
        s
    }

    /// Drops trailing coefficients that are exactly zero.
    pub fn trimmed(&self) -> SliceSeries {
        let mut s = self.clone();
        while s.coeffs.len() > 1 && *s.coeffs.last().unwrap() == Quaternion::ZERO {
            s.coeffs.pop();
        }
        s
    }

    /// `g(q) = f(λ q)`: coefficients `aₙ λⁿ` on the ball of radius `R / λ`.
    pub fn rescale_argument(&self, lambda: f64) -> Result<SliceSeries> {
        if !(lambda > 0.0) {
            return Err(Error::Invalid(format!("argument scale must be positive, got {lambda}")));
        }
        let mut p = 1.0;
        let coeffs: Vec<Quaternion> = self
            .coeffs
            .iter()
            .map(|&a| {
                let c = a.scale(p);
                p *= lambda;
                c
            })
            .collect();
        let radius = self.radius / lambda;
        let mut s = SliceSeries::raw(coeffs, radius, 0.0);
        if self.tail > 0.0 {
            s.tail = geometric_tail(&s.coeffs, s.tail_radius()).max(self.tail);
        }
        s.truncated = self.truncated;
        Ok(s)
    }

    /// Regular product with the default order cap.
    pub fn star_mul(&self, other: &SliceSeries) -> Result<SliceSeries> {
        self.star_mul_capped(other, DEFAULT_MAX_ORDER)
    }

    /// Regular product `cₙ = Σₖ aₖ b_{n−k}`, capped at `cap`. Sets the
    /// truncated flag when the cap drops coefficients.
    pub fn star_mul_capped(&self, other: &SliceSeries, cap: usize) -> Result<SliceSeries> {
        let full = self.order() + other.order();
        let mut s = self.convolve(other, full.min(cap))?;
        if full > cap {
            s.truncated = true;
        }
        Ok(s)
    }

    /// Regular product deliberately truncated at `order`; the dropped mass is
    /// accounted in the tail bound and the truncated flag is not set.
    pub fn star_mul_truncated(&self, other: &SliceSeries, order: usize) -> Result<SliceSeries> {
        let full = self.order() + other.order();
        self.convolve(other, full.min(order))
    }

    fn convolve(&self, other: &SliceSeries, order: usize) -> Result<SliceSeries> {
        self.check_radius(other)?;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let full = a.len() + b.len() - 2;
        let mut c = vec![Quaternion::ZERO; full + 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == Quaternion::ZERO {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                c[i + j] += ai * bj;
            }
        }
        let rho = self.tail_radius();
        let dropped = weighted_l1_from(&c, order + 1, rho);
        c.truncate(order + 1);
        let (na, nb) = (self.l1_norm(), other.l1_norm());
        let tail = na * other.tail + self.tail * nb + self.tail * other.tail + dropped;
        let mut s = SliceSeries::raw(c, self.radius, tail);
        s.truncated = self.truncated || other.truncated;
        Ok(s)
    }

    /// `(f*g)(q)` through `f(q) g(f(q)⁻¹ q f(q))`, or 0 where `f(q) = 0`.
    pub fn star_eval_formula(&self, other: &SliceSeries, q: Quaternion) -> Result<Quaternion> {
        self.check_domain(q)?;
        let fq = self.eval_unchecked(q);
        if fq.norm() <= DEFAULT_EPS {
            return Ok(Quaternion::ZERO);
        }
        let moved = q.conjugate_by(fq)?;
        Ok(fq * other.eval(moved)?)
    }

    /// Regular conjugate `f^c`: conjugated coefficients.
    pub fn conjugate(&self) -> SliceSeries {
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|a| *a = a.conj());
        s
    }

    /// Symmetrization `f^s = f * f^c`, projected onto real coefficients.
    pub fn symmetrize(&self) -> SliceSeries {
        self.symmetrize_with_residual().0
    }

    /// Like [`symmetrize`](Self::symmetrize), also returning the largest
    /// imaginary magnitude discarded by the projection.
    pub fn symmetrize_with_residual(&self) -> (SliceSeries, f64) {
        let order = 2 * self.order();
        let (coeffs, residual) = self.symmetrized_coeffs(order);
        let na = self.l1_norm();
        let tail = 2.0 * na * self.tail + self.tail * self.tail;
        let mut s = SliceSeries::raw(coeffs, self.radius, tail);
        s.truncated = self.truncated;
        (s, residual)
    }

    fn symmetrized_coeffs(&self, order: usize) -> (Vec<Quaternion>, f64) {
        let a = &self.coeffs;
        let mut residual: f64 = 0.0;
        let coeffs = (0..=order)
            .map(|n| {
                let lo = n.saturating_sub(a.len() - 1);
                let hi = n.min(a.len() - 1);
                let mut acc = Quaternion::ZERO;
                for k in lo..=hi {
                    acc += a[k] * a[n - k].conj();
                }
                residual = residual.max(acc.im_norm());
                Quaternion::real(acc.w)
            })
            .collect();
        (coeffs, residual)
    }

    /// Regular reciprocal `f^{-*} = (f^s)^{-1} f^c` as a series of the same order.
    pub fn reciprocal(&self) -> Result<SliceSeries> {
        self.reciprocal_eps(DEFAULT_EPS)
    }

    pub fn reciprocal_eps(&self, eps: f64) -> Result<SliceSeries> {
        let a0 = self.coeffs[0].norm();
        if a0 <= eps {
            return Err(Error::NonInvertible { modulus: a0 });
        }
        let order = self.order();
        let (sym, _) = self.symmetrized_coeffs(order);
        let s: Vec<f64> = sym.iter().map(|c| c.w).collect();
        // real series inverse: b₀ = 1/s₀, bₙ = −(1/s₀) Σ_{k≥1} sₖ b_{n−k}
        let inv_s0 = 1.0 / s[0];
        let mut b = vec![0.0; order + 1];
        b[0] = inv_s0;
        for n in 1..=order {
            let mut acc = 0.0;
            for k in 1..=n {
                acc += s[k] * b[n - k];
            }
            b[n] = -inv_s0 * acc;
        }
        // real coefficients commute, so the product with f^c is a plain convolution
        let ac = &self.coeffs;
        let coeffs: Vec<Quaternion> = (0..=order)
            .map(|n| {
                let mut acc = Quaternion::ZERO;
                for k in 0..=n {
                    acc += ac[n - k].conj().scale(b[k]);
                }
                acc
            })
            .collect();
        let mut r = SliceSeries::raw(coeffs, self.radius, 0.0);
        let est = geometric_tail(&r.coeffs, r.tail_radius());
        let norm = r.l1_norm();
        r.tail = est + norm * norm * self.tail;
        r.truncated = self.truncated;
        Ok(r)
    }

    /// Cullen derivative: the termwise derivative `Σ n qⁿ⁻¹ aₙ`.
    pub fn cullen_derivative(&self) -> SliceSeries {
        let coeffs: Vec<Quaternion> = if self.coeffs.len() == 1 {
            vec![Quaternion::ZERO]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &a)| a.scale(n as f64))
                .collect()
        };
        let mut s = SliceSeries::raw(coeffs, self.radius, 0.0);
        if self.tail > 0.0 {
            s.tail = geometric_tail(&s.coeffs, s.tail_radius());
        }
        s.truncated = self.truncated;
        s
    }

    /// `(P, Q)` with `P = Σ Sₙ aₙ`, `Q = Σ Sₙ₋₁ aₙ`, `Sₙ = (qⁿ − q̄ⁿ)/(q − q̄)`.
    ///
    /// `Sₙ` is real and obeys `Sₙ₊₁ = 2x Sₙ − |q|² Sₙ₋₁`, so on the sphere
    /// `x + y𝕊` one has `f(x + yI) = a₀ + (x + yI) P − |q|² Q` with `P, Q`
    /// independent of `I`. `P` is the spherical derivative; at real points it
    /// is the Cullen derivative.
    pub(crate) fn spherical_parts(&self, x: f64, modulus_sqr: f64) -> (Quaternion, Quaternion) {
        let t = 2.0 * x;
        let mut s_prev = 0.0; // S₀
        let mut s_cur = 1.0; // S₁
        let mut p = Quaternion::ZERO;
        let mut q = Quaternion::ZERO;
        for &a in self.coeffs.iter().skip(1) {
            p += a.scale(s_cur);
            q += a.scale(s_prev);
            let next = t * s_cur - modulus_sqr * s_prev;
            s_prev = s_cur;
            s_cur = next;
        }
        (p, q)
    }

    /// `∂_s f(q) = (q − q̄)⁻¹ (f(q) − f(q̄))` at a nonreal point.
    pub fn spherical_derivative_at(&self, q: Quaternion) -> Result<Quaternion> {
        self.check_domain(q)?;
        if q.im_norm() <= DEFAULT_EPS {
            return Err(Error::RealPoint { x: q.re() });
        }
        Ok(self.spherical_parts(q.re(), q.norm_sqr()).0)
    }

    /// The difference quotient evaluated literally, for cross-checks.
    pub fn spherical_difference_quotient(&self, q: Quaternion) -> Result<Quaternion> {
        self.check_domain(q)?;
        let d = q - q.conj();
        Ok(d.inverse()? * (self.eval_unchecked(q) - self.eval_unchecked(q.conj())))
    }

    /// Finds `h` with `(q − q0) * h = f` through order `N − 1`.
    pub fn star_divide_linear(&self, q0: Quaternion) -> Result<SliceSeries> {
        self.star_divide_linear_eps(q0, DEFAULT_EPS)
    }

    pub fn star_divide_linear_eps(&self, q0: Quaternion, eps: f64) -> Result<SliceSeries> {
        let (h, remainder) = self.divide_linear_with_remainder(q0);
        if remainder.norm() > eps {
            return Err(Error::NonzeroRemainder {
                remainder: remainder.norm(),
            });
        }
        Ok(h)
    }

    /// Synthetic division from the top: `h_{n−1} = cₙ + q0 hₙ`; the
    /// remainder `c₀ + q0 h₀` equals `f(q0)`.
    pub(crate) fn divide_linear_with_remainder(&self, q0: Quaternion) -> (SliceSeries, Quaternion) {
        let c = &self.coeffs;
        let n = c.len() - 1;
        if n == 0 {
            return (SliceSeries::zero(self.radius), c[0]);
        }
        let mut h = vec![Quaternion::ZERO; n];
        h[n - 1] = c[n];
        for k in (1..n).rev() {
            h[k - 1] = c[k] + q0 * h[k];
        }
        let remainder = c[0] + q0 * h[0];
        let rho = self.tail_radius();
        let tail = if self.tail == 0.0 {
            0.0
        } else if q0.norm() < rho {
            self.tail / (rho - q0.norm())
        } else {
            f64::INFINITY
        };
        let mut s = SliceSeries::raw(h, self.radius, tail);
        s.truncated = self.truncated;
        (s, remainder)
    }

    /// Division by the real quadratic `q² + b q + c`; returns quotient and the
    /// remainder coefficients `(r₀, r₁)` of `r₀ + q r₁`.
    pub(crate) fn divide_real_quadratic(&self, b: f64, c: f64) -> (SliceSeries, [Quaternion; 2]) {
        let a = &self.coeffs;
        let n = a.len() - 1;
        if n < 2 {
            let r1 = if n == 1 { a[1] } else { Quaternion::ZERO };
            return (SliceSeries::zero(self.radius), [a[0], r1]);
        }
        let mut rem: Vec<Quaternion> = a.clone();
        let mut quot = vec![Quaternion::ZERO; n - 1];
        for k in (2..=n).rev() {
            let lead = rem[k];
            quot[k - 2] = lead;
            rem[k] = Quaternion::ZERO;
            rem[k - 1] -= lead.scale(b);
            rem[k - 2] -= lead.scale(c);
        }
        let mut s = SliceSeries::raw(quot, self.radius, self.tail);
        s.truncated = self.truncated;
        (s, [rem[0], rem[1]])
    }
}

fn weighted_l1(c: &[Quaternion], rho: f64) -> f64 {
    weighted_l1_from(c, 0, rho)
}

fn weighted_l1_from(c: &[Quaternion], start: usize, rho: f64) -> f64 {
    if start >= c.len() {
        return 0.0;
    }
    let mut w = rho.powi(start as i32);
    let mut acc = 0.0;
    for a in &c[start..] {
        acc += a.norm() * w;
        w *= rho;
    }
    acc
}

/// Estimates `Σ_{n>N} |aₙ| ρⁿ` by extrapolating the decay of the last
/// coefficients geometrically. Returns infinity when no decay is visible.
pub fn geometric_tail(c: &[Quaternion], rho: f64) -> f64 {
    let n = c.len();
    if n < 4 {
        return if c.iter().all(|a| *a == Quaternion::ZERO) {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let k = (n / 4).clamp(1, 16);
    let weight = |i: usize| c[i].norm() * rho.powi(i as i32);
    let late = (n - k..n).map(weight).fold(0.0, f64::max);
    if late == 0.0 {
        return 0.0;
    }
    let early = (n - 2 * k..n - k).map(weight).fold(0.0, f64::max);
    if early == 0.0 {
        return f64::INFINITY;
    }
    let theta = (late / early).powf(1.0 / k as f64);
    if theta >= 1.0 {
        f64::INFINITY
    } else {
        // late bounds the envelope at index n − k
        late * theta.powi(k as i32) / (1.0 - theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn random_series(s: &mut Sampler, order: usize, scale: f64) -> SliceSeries {
        SliceSeries::new((0..=order).map(|_| s.quaternion().scale(scale)).collect(), 1.0).unwrap()
    }

    fn coeff_diff(a: &SliceSeries, b: &SliceSeries) -> f64 {
        let n = a.coeffs().len().max(b.coeffs().len());
        (0..n).map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
    }

    /// Σ qⁿ aₙ with explicit powers.
    fn naive_eval(f: &SliceSeries, x: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        let mut p = Quaternion::ONE;
        for &a in f.coeffs() {
            acc += p * a;
            p *= x;
        }
        acc
    }

    #[test]
    fn eval_examples() {
        let f = SliceSeries::new(vec![Quaternion::ZERO, Quaternion::I], 2.0).unwrap();
        assert_eq!(f.eval(Quaternion::J).unwrap(), -Quaternion::K);
        let g = SliceSeries::from_reals(&[1.0, 0.0, 1.0], 2.0).unwrap();
        assert_eq!(g.eval(Quaternion::I).unwrap(), Quaternion::ZERO);
        assert!(matches!(g.eval(q(2.0, 0.0, 0.0, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn horner_matches_power_sum() {
        let mut s = Sampler::new(7);
        for _ in 0..200 {
            let f = random_series(&mut s, 6, 1.0);
            let x = s.in_ball_radial(1.0);
            assert!((f.eval(x).unwrap() - naive_eval(&f, x)).norm() < 1e-12);
        }
    }

    #[test]
    fn product_examples() {
        let i = Quaternion::I;
        let f = SliceSeries::linear(i, 2.0);
        let g = SliceSeries::linear(-i, 2.0);
        let p = f.star_mul(&g).unwrap();
        assert!(coeff_diff(&p, &SliceSeries::from_reals(&[1.0, 0.0, 1.0], 2.0).unwrap()) < 1e-15);

        let mut s = Sampler::new(1);
        let h = random_series(&mut s, 5, 1.0);
        let c = s.quaternion();
        let lhs = SliceSeries::constant(c, 1.0).star_mul(&h).unwrap();
        assert!(coeff_diff(&lhs, &h.left_mul(c)) < 1e-15);
    }

    #[test]
    fn product_radius_mismatch() {
        let f = SliceSeries::identity(1.0);
        let g = SliceSeries::identity(2.0);
        assert!(matches!(f.star_mul(&g), Err(Error::RadiusMismatch { .. })));
    }

    #[test]
    fn product_cap_sets_flag() {
        let f = SliceSeries::from_reals(&[1.0; 6], 1.0).unwrap();
        let p = f.star_mul_capped(&f, 7).unwrap();
        assert!(p.is_truncated());
        assert_eq!(p.order(), 7);
        assert!(p.tail() > 0.0);
        assert!(p.require_untruncated(false).is_err());
        assert!(p.require_untruncated(true).is_ok());
        let t = f.star_mul_truncated(&f, 7).unwrap();
        assert!(!t.is_truncated());
        assert_eq!(t.tail(), p.tail());
        assert!(!f.star_mul(&f).unwrap().is_truncated());
    }

    #[test]
    fn ring_axioms() {
        let mut s = Sampler::new(2);
        for _ in 0..50 {
            let f = random_series(&mut s, 4, 1.0);
            let g = random_series(&mut s, 5, 1.0);
            let h = random_series(&mut s, 3, 1.0);
            let l = f.star_mul(&g).unwrap().star_mul(&h).unwrap();
            let r = f.star_mul(&g.star_mul(&h).unwrap()).unwrap();
            assert!(coeff_diff(&l, &r) < 1e-12);
            let l = f.star_mul(&g.add(&h).unwrap()).unwrap();
            let r = f.star_mul(&g).unwrap().add(&f.star_mul(&h).unwrap()).unwrap();
            assert!(coeff_diff(&l, &r) < 1e-12);
            let l = f.add(&g).unwrap().star_mul(&h).unwrap();
            let r = f.star_mul(&h).unwrap().add(&g.star_mul(&h).unwrap()).unwrap();
            assert!(coeff_diff(&l, &r) < 1e-12);
            let one = SliceSeries::constant(Quaternion::ONE, 1.0);
            assert!(coeff_diff(&f.star_mul(&one).unwrap(), &f) < 1e-15);
            assert!(coeff_diff(&f.add(&g).unwrap(), &g.add(&f).unwrap()) == 0.0);
            assert!(f.sub(&f).unwrap().coeffs().iter().all(|c| *c == Quaternion::ZERO));
        }
    }

    #[test]
    fn star_eval_formula_examples() {
        let i = Quaternion::I;
        let f = SliceSeries::linear(i, 2.0);
        let g = SliceSeries::linear(-i, 2.0);
        assert_eq!(f.star_eval_formula(&g, i).unwrap(), Quaternion::ZERO);

        let mut s = Sampler::new(4);
        let f = SliceSeries::from_reals(&[0.3, -0.2, 0.5], 1.0).unwrap();
        let g = SliceSeries::from_reals(&[0.1, 0.7, 0.0, -0.4], 1.0).unwrap();
        for _ in 0..50 {
            let x = s.in_ball_radial(0.9);
            let lhs = f.star_eval_formula(&g, x).unwrap();
            let rhs = f.eval(x).unwrap() * g.eval(x).unwrap();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn star_eval_formula_matches_convolution() {
        let mut s = Sampler::new(5);
        for _ in 0..100 {
            let f = random_series(&mut s, 5, 1.0);
            let g = random_series(&mut s, 6, 1.0);
            let x = s.in_ball_radial(1.0);
            let conv = f.star_mul(&g).unwrap().eval(x).unwrap();
            let formula = f.star_eval_formula(&g, x).unwrap();
            assert!((conv - formula).norm() < 1e-11);
        }
    }

    #[test]
    fn conjugation() {
        let f = SliceSeries::new(vec![Quaternion::ZERO, Quaternion::I], 1.0).unwrap();
        assert_eq!(f.conjugate().coeffs(), &[Quaternion::ZERO, -Quaternion::I]);
        let r = SliceSeries::from_reals(&[1.0, 2.0, -3.0], 1.0).unwrap();
        assert_eq!(r.conjugate(), r);
        let mut s = Sampler::new(6);
        for _ in 0..50 {
            let f = random_series(&mut s, 4, 1.0);
            let g = random_series(&mut s, 4, 1.0);
            assert_eq!(f.conjugate().conjugate(), f);
            let l = f.star_mul(&g).unwrap().conjugate();
            let r = g.conjugate().star_mul(&f.conjugate()).unwrap();
            assert!(coeff_diff(&l, &r) < 1e-12);
        }
    }

    #[test]
    fn symmetrization() {
        let f = SliceSeries::linear(Quaternion::I, 1.0);
        assert!(
            coeff_diff(
                &f.symmetrize(),
                &SliceSeries::from_reals(&[1.0, 0.0, 1.0], 1.0).unwrap()
            ) < 1e-15
        );
        let c = q(0.5, -1.0, 2.0, 0.25);
        let fs = SliceSeries::constant(c, 1.0).symmetrize();
        assert!((fs.coeff(0).w - c.norm_sqr()).abs() < 1e-15);

        let mut s = Sampler::new(8);
        for _ in 0..100 {
            let f = random_series(&mut s, 8, 1.0);
            let (sym, residual) = f.symmetrize_with_residual();
            assert!(residual < 1e-12);
            assert!(sym.coeffs().iter().all(|c| c.im_norm() == 0.0));
            let a = f.star_mul(&f.conjugate()).unwrap();
            let b = f.conjugate().star_mul(&f).unwrap();
            assert!(coeff_diff(&a, &b) < 1e-12);
            assert!(coeff_diff(&a, &sym) < 1e-12);
        }
    }

    #[test]
    fn reciprocal_examples() {
        let c = q(0.5, 1.0, -1.0, 2.0);
        let r = SliceSeries::constant(c, 1.0).reciprocal().unwrap();
        assert!((r.coeff(0) - c.inverse().unwrap()).norm() < 1e-15);
        assert!(matches!(
            SliceSeries::identity(1.0).reciprocal(),
            Err(Error::NonInvertible { .. })
        ));

        // 1 − q q̄₀ inverts to Σ qⁿ q̄₀ⁿ
        let q0 = q(0.2, 0.3, -0.1, 0.4);
        let n = 40;
        let mut coeffs = vec![Quaternion::ZERO; n + 1];
        coeffs[0] = Quaternion::ONE;
        coeffs[1] = -q0.conj();
        let f = SliceSeries::new(coeffs, 1.0).unwrap();
        let r = f.reciprocal().unwrap();
        for k in 0..=n {
            assert!((r.coeff(k) - q0.conj().powi(k as u32)).norm() < 1e-14);
        }
        let id = f.star_mul_truncated(&r, n).unwrap();
        assert!((id.coeff(0) - Quaternion::ONE).norm() < 1e-14);
        for k in 1..=n {
            assert!(id.coeff(k).norm() < 1e-14);
        }
    }

    #[test]
    fn reciprocal_is_a_star_inverse() {
        let mut s = Sampler::new(9);
        for _ in 0..100 {
            let mut f = random_series(&mut s, 10, 0.3);
            f.coeffs[0] = Quaternion::ONE;
            let r = f.reciprocal().unwrap();
            let n = f.order();
            for prod in [f.star_mul(&r).unwrap(), r.star_mul(&f).unwrap()] {
                assert!((prod.coeff(0) - Quaternion::ONE).norm() < 1e-11);
                for k in 1..=n {
                    assert!(prod.coeff(k).norm() < 1e-11, "k = {k}");
                }
            }
        }
    }

    #[test]
    fn cullen_derivative_examples() {
        let f = SliceSeries::from_reals(&[0.0, 0.0, 1.0], 1.0).unwrap();
        assert_eq!(
            f.cullen_derivative().coeffs(),
            &[Quaternion::ZERO, Quaternion::real(2.0)]
        );
        let c = SliceSeries::constant(Quaternion::I, 1.0);
        assert_eq!(c.cullen_derivative().coeffs(), &[Quaternion::ZERO]);
    }

    #[test]
    fn cullen_derivative_matches_finite_difference_on_reals() {
        let mut s = Sampler::new(10);
        let h = 1e-6;
        for _ in 0..50 {
            let f = random_series(&mut s, 6, 1.0);
            let x = Quaternion::real(s.uniform(-0.8, 0.8));
            let fd = (f.eval(x + Quaternion::real(h)).unwrap() - f.eval(x).unwrap()).scale(1.0 / h);
            let d = f.cullen_derivative().eval(x).unwrap();
            assert!((fd - d).norm() < 1e-4, "{}", (fd - d).norm());
        }
    }

    #[test]
    fn spherical_derivative_examples() {
        let sq = SliceSeries::from_reals(&[0.0, 0.0, 1.0], 3.0).unwrap();
        let x = q(1.0, 1.0, 0.0, 0.0);
        assert!((sq.spherical_derivative_at(x).unwrap() - Quaternion::real(2.0)).norm() < 1e-15);
        let id = SliceSeries::identity(3.0);
        assert_eq!(
            id.spherical_derivative_at(q(0.3, 0.0, 0.2, 0.1)).unwrap(),
            Quaternion::ONE
        );
        assert!(matches!(
            id.spherical_derivative_at(Quaternion::real(0.5)),
            Err(Error::RealPoint { .. })
        ));
    }

    #[test]
    fn spherical_derivative_constant_on_spheres() {
        let mut s = Sampler::new(12);
        for _ in 0..100 {
            let f = random_series(&mut s, 7, 1.0);
            let p = s.in_ball_radial(0.95);
            if p.im_norm() < 1e-3 {
                continue;
            }
            let mate = p.sphere().point(s.imaginary_unit());
            let a = f.spherical_derivative_at(p).unwrap();
            let b = f.spherical_derivative_at(mate).unwrap();
            assert!((a - b).norm() < 1e-12);
            let lit = f.spherical_difference_quotient(p).unwrap();
            assert!((a - lit).norm() < 1e-10);
        }
    }

    #[test]
    fn divide_linear_examples() {
        let f = SliceSeries::from_reals(&[1.0, 0.0, 1.0], 2.0).unwrap();
        let h = f.star_divide_linear(Quaternion::I).unwrap();
        assert!(coeff_diff(&h, &SliceSeries::linear(-Quaternion::I, 2.0)) < 1e-15);

        let g = SliceSeries::new(
            vec![q(1.0, 2.0, 3.0, 4.0), q(0.0, 1.0, 0.0, 0.0), q(-1.0, 0.5, 0.0, 0.0)],
            2.0,
        )
        .unwrap();
        let shifted = g.shift_up();
        let h = shifted.star_divide_linear(Quaternion::ZERO).unwrap();
        assert_eq!(h.coeffs(), g.coeffs());

        let bad = SliceSeries::from_reals(&[1.0, 0.0, 1.0], 2.0).unwrap();
        assert!(matches!(
            bad.star_divide_linear(Quaternion::real(0.5)),
            Err(Error::NonzeroRemainder { .. })
        ));

        let mut s = Sampler::new(13);
        for _ in 0..100 {
            let g = random_series(&mut s, 6, 1.0);
            let q0 = s.in_ball_radial(1.0);
            let f = SliceSeries::linear(q0, 1.0).star_mul(&g).unwrap();
            let h = f.star_divide_linear(q0).unwrap();
            assert!(coeff_diff(&h, &g) < 1e-11);
        }
    }

    #[test]
    fn quadratic_division_is_exact_on_products() {
        let mut s = Sampler::new(14);
        for _ in 0..50 {
            let g = random_series(&mut s, 5, 1.0);
            let (x, y) = (s.uniform(-0.5, 0.5), s.uniform(0.1, 0.8));
            let quad = SliceSeries::from_reals(&[x * x + y * y, -2.0 * x, 1.0], 1.0).unwrap();
            let f = quad.star_mul(&g).unwrap();
            let (h, r) = f.divide_real_quadratic(-2.0 * x, x * x + y * y);
            assert!(r[0].norm() < 1e-13 && r[1].norm() < 1e-13);
            assert!(coeff_diff(&h, &g) < 1e-13);
        }
    }

    #[test]
    fn tails_propagate_through_products() {
        let f = SliceSeries::identity(1.0).with_tail(0.01);
        let g = SliceSeries::from_reals(&[0.5, 0.25], 1.0).unwrap().with_tail(0.02);
        let p = f.star_mul(&g).unwrap();
        let expect = 1.0 * 0.02 + 0.01 * 0.75 + 0.01 * 0.02;
        assert!((p.tail() - expect).abs() < 1e-15);
    }

    #[test]
    fn geometric_tail_estimates_geometric_sums() {
        let theta: f64 = 0.5;
        let c: Vec<Quaternion> = (0..64).map(|n| Quaternion::real(theta.powi(n))).collect();
        let est = geometric_tail(&c, 1.0);
        let exact = theta.powi(64) / (1.0 - theta);
        assert!((est - exact).abs() < 1e-3 * exact);
        let poly = vec![Quaternion::ONE, Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO];
        assert_eq!(geometric_tail(&poly, 1.0), 0.0);
        let growing: Vec<Quaternion> = (0..32).map(|n| Quaternion::real(1.1f64.powi(n))).collect();
        assert_eq!(geometric_tail(&growing, 1.0), f64::INFINITY);
    }

    #[test]
    fn json_format() {
        let f = SliceSeries::new(vec![Quaternion::ZERO, Quaternion::ONE], 1.0).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"radius":1.0,"coeffs":[[0.0,0.0,0.0,0.0],[1.0,0.0,0.0,0.0]]}"#);
        let back: SliceSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<SliceSeries>(r#"{"radius":-1,"coeffs":[[0,0,0,0]]}"#).is_err());
        assert!(serde_json::from_str::<SliceSeries>(r#"{"radius":1,"coeffs":[]}"#).is_err());
    }
}
