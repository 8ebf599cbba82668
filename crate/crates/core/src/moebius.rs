//! Classical and regular Möbius transformations of the unit ball `𝔹`.
//!
//! The classical map is `M_a(q) = (1 − q ā)⁻¹ (q − a)`. The regular map is
//! `𝓜_{q₀}(q) = (1 − q q̄₀)^{-*} * (q − q₀)`; pointwise it equals the
//! classical map precomposed with `T(q) = (1 − q q₀)⁻¹ q (1 − q q₀)`, and as
//! a series it has the telescoped coefficients `c₀ = −q₀`,
//! `cₙ = q̄₀ⁿ⁻¹ (1 − |q₀|²)` for `n ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::series::{SliceSeries, DEFAULT_MAX_ORDER};
use crate::DEFAULT_EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoebiusKind {
    Classical,
    Regular,
}

/// `q ↦ M(q) u` for a center `|q₀| < 1` and a unit `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MoebiusJson")]
pub struct MoebiusSpec {
    pub kind: MoebiusKind,
    pub center: Quaternion,
    pub right_unit: Quaternion,
}

#[derive(Deserialize)]
struct MoebiusJson {
    kind: MoebiusKind,
    center: Quaternion,
    right_unit: Quaternion,
}

impl TryFrom<MoebiusJson> for MoebiusSpec {
    type Error = Error;
    fn try_from(j: MoebiusJson) -> Result<Self> {
        MoebiusSpec::new(j.kind, j.center, j.right_unit)
    }
}

const UNIT_TOL: f64 = 1e-13;

impl MoebiusSpec {
    pub fn new(kind: MoebiusKind, center: Quaternion, right_unit: Quaternion) -> Result<Self> {
        if !(center.norm() < 1.0 - DEFAULT_EPS) {
            return Err(Error::Invalid(format!(
                "Moebius center {center} must lie in the open unit ball"
            )));
        }
        if !((right_unit.norm() - 1.0).abs() < UNIT_TOL) {
            return Err(Error::Invalid(format!("right unit {right_unit} must have modulus one")));
        }
        Ok(MoebiusSpec {
            kind,
            center,
            right_unit,
        })
    }

    pub fn regular(center: Quaternion, right_unit: Quaternion) -> Result<Self> {
        MoebiusSpec::new(MoebiusKind::Regular, center, right_unit)
    }

    pub fn classical(center: Quaternion, right_unit: Quaternion) -> Result<Self> {
        MoebiusSpec::new(MoebiusKind::Classical, center, right_unit)
    }

    /// Pointwise value `M(q) u`.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        let m = match self.kind {
            MoebiusKind::Classical => classical_eval(self.center, q)?,
            MoebiusKind::Regular => regular_eval(self.center, q)?,
        };
        Ok(m * self.right_unit)
    }
}

/// `M_a(q) = (1 − q ā)⁻¹ (q − a)`.
pub fn classical_eval(a: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let den = Quaternion::ONE - q * a.conj();
    let m = den.norm();
    if m <= DEFAULT_EPS {
        return Err(Error::Pole { modulus: m });
    }
    Ok(den.inverse()? * (q - a))
}

/// Pointwise value of the regular transformation `𝓜_{q₀}(q)`, without truncation.
pub fn regular_eval(q0: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let fc = Quaternion::ONE - q * q0;
    let t = q.conjugate_by(fc).map_err(|_| Error::Pole { modulus: fc.norm() })?;
    classical_eval(q0, t)
}

/// Tail `Σ_{n>N} |cₙ|` of the regular Möbius series, i.e. `|q₀|ᴺ (1 + |q₀|)`.
pub fn regular_series_tail(center_modulus: f64, order: usize) -> f64 {
    center_modulus.powi(order as i32) * (1.0 + center_modulus)
}

/// Order used when none is given: 128 up to `|q₀| = 0.7`, then enough to push
/// the tail below 1e-16, capped at the product order limit.
pub fn default_order(center_modulus: f64) -> usize {
    let mut n = 128;
    while n < DEFAULT_MAX_ORDER && regular_series_tail(center_modulus, n) > 1e-16 {
        n += 1;
    }
    n
}

/// Series of `𝓜_{q₀}(q) u` through order `N` with its tail bound attached.
pub fn regular_moebius_series(spec: &MoebiusSpec, order: usize) -> Result<SliceSeries> {
    if spec.kind != MoebiusKind::Regular {
        return Err(Error::Invalid("series expansion needs a regular Moebius spec".into()));
    }
    let q0 = spec.center;
    let u = spec.right_unit;
    let qb = q0.conj();
    let factor = 1.0 - q0.norm_sqr();
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(-(q0 * u));
    let mut pow = Quaternion::ONE; // q̄₀ⁿ⁻¹
    for _ in 1..=order {
        coeffs.push((pow * u).scale(factor));
        pow *= qb;
    }
    Ok(SliceSeries::new(coeffs, 1.0)?.with_tail(regular_series_tail(q0.norm(), order)))
}

/// Two-sided bound on `|M_b(q)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MoebiusBound {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

/// `(|b|−|q|)/(1−|b||q|) ≤ |M_b(q)| ≤ (|q|+|b|)/(1+|b||q|)`.
pub fn moebius_bound(b: Quaternion, q: Quaternion) -> Result<MoebiusBound> {
    let (nb, nq) = (b.norm(), q.norm());
    if !(nb < 1.0 && nq < 1.0) {
        return Err(Error::Domain {
            modulus: nb.max(nq),
            radius: 1.0,
        });
    }
    Ok(MoebiusBound {
        lower: (nb - nq) / (1.0 - nb * nq),
        value: classical_eval(b, q)?.norm(),
        upper: (nq + nb) / (1.0 + nb * nq),
    })
}

/// `|M_{−a}(M_a(q)) − q|` for real `a ∈ (0, 1)`.
pub fn moebius_inverse_identity_check(a: f64, q: Quaternion) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Invalid(format!("a = {a} must lie in (0, 1)")));
    }
    let ra = Quaternion::real(a);
    let there = classical_eval(ra, q)?;
    Ok((classical_eval(-ra, there)? - q).norm())
}
