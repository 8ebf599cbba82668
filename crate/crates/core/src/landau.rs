//! Landau-type certificates for regular self-maps of the unit ball fixing 0:
//! the radius `ρ(a)`, extremal functions, injectivity and covering reports,
//! the rescaled version for maps bounded by `C` on `B(0, R)`, and
//! pseudorandom self-maps built from regular Möbius factors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RegularFn;
use crate::moebius::{default_order, regular_moebius_series, MoebiusSpec};
use crate::newton::{solve_value, solve_value_continuation, NewtonParams};
use crate::quaternion::Quaternion;
use crate::sampling::Sampler;
use crate::scan::{injectivity_scan, ScanParams, Witness};
use crate::series::{SliceSeries, DEFAULT_MAX_ORDER};

/// `ρ(a) = (1 − √(1 − a²))/a`, evaluated as `a/(1 + √(1 − a²))`.
pub fn landau_rho(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain {
            modulus: a,
            radius: 1.0,
        });
    }
    Ok(a / (1.0 + (1.0 - a * a).sqrt()))
}

/// Lower and upper radial bounds on `|f(q)|` at `|q| = r` for a self-map
/// with `f(0) = 0` and `|∂_c f(0)| = a`.
pub fn minmax_bounds(a: f64, r: f64) -> (f64, f64) {
    (r * (a - r) / (1.0 - a * r), r * (r + a) / (1.0 + a * r))
}

fn check_unit(u: Quaternion) -> Result<()> {
    if (u.norm() - 1.0).abs() > 1e-13 {
        return Err(Error::Invalid(format!("{u} is not a unit quaternion")));
    }
    Ok(())
}

/// `Φ_u(q) = q 𝓜_{−aū}(q) u` through order `order` (0 picks an order from `a`).
pub fn extremal_phi(a: f64, u: Quaternion, order: usize) -> Result<SliceSeries> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain {
            modulus: a,
            radius: 1.0,
        });
    }
    check_unit(u)?;
    let order = if order == 0 { default_order(a) + 1 } else { order.max(1) };
    let spec = MoebiusSpec::regular(-(u.conj().scale(a)), u)?;
    Ok(regular_moebius_series(&spec, order - 1)?.shift_up())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    LandauTheorem,
    SingularScan,
    CollisionScan,
    /// Nothing found; the upper bound is the scanned radius.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
    pub witness: Option<Witness>,
    pub grid_resolution: f64,
    /// `lower_bound ≤ upper_bound + grid_resolution`.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub source_radius: f64,
    pub target_radius: f64,
    pub targets_total: usize,
    pub targets_hit: usize,
    pub max_preimage_residual: f64,
    pub failures: Vec<Quaternion>,
}

impl CoverageReport {
    pub fn complete(&self) -> bool {
        self.targets_hit == self.targets_total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageParams {
    pub targets: usize,
    pub seed: u64,
    pub newton: NewtonParams,
    pub continuation_steps: usize,
}

impl Default for CoverageParams {
    fn default() -> Self {
        CoverageParams {
            targets: 500,
            seed: 0,
            newton: NewtonParams::default(),
            continuation_steps: 16,
        }
    }
}

/// Targets: an eighth on the sphere `|v| = t`, the rest radially uniform in
/// `B(0, t)`.
fn coverage_targets(t: f64, n: usize, seed: u64) -> Vec<Quaternion> {
    let mut s = Sampler::new(seed ^ 0xC0FE);
    let on_boundary = n / 8;
    (0..n)
        .map(|i| {
            if i < on_boundary {
                s.on_sphere(t)
            } else {
                s.in_ball_radial(t)
            }
        })
        .collect()
}

/// Checks `B(f(0), t) ⊆ f(B(0, r))` on seeded targets by Newton inversion.
pub fn verify_covering(f: &SliceSeries, r: f64, t: f64, p: &CoverageParams) -> Result<CoverageReport> {
    if r >= f.radius() {
        return Err(Error::Domain {
            modulus: r,
            radius: f.radius(),
        });
    }
    let g = RegularFn::new(f.clone());
    let f0 = f.coeff(0);
    let lin = f.coeff(1);
    let lin_inv = lin.inverse().ok();
    let targets = coverage_targets(t, p.targets, p.seed);
    let results: Vec<(Quaternion, Option<f64>)> = targets
        .par_iter()
        .map(|&d| {
            let v = f0 + d;
            let seed = lin_inv.map_or(Quaternion::ZERO, |li| d * li);
            let seed = if seed.norm() < r { seed } else { Quaternion::ZERO };
            let mut out = solve_value(&g, v, seed, r, &p.newton);
            if !out.converged {
                out = solve_value_continuation(&g, v, r, p.continuation_steps, &p.newton);
            }
            let hit = out.converged && out.point.norm() < r;
            (v, hit.then_some(out.residual))
        })
        .collect();
    let mut report = CoverageReport {
        source_radius: r,
        target_radius: t,
        targets_total: targets.len(),
        targets_hit: 0,
        max_preimage_residual: 0.0,
        failures: Vec::new(),
    };
    for (v, hit) in results {
        match hit {
            Some(res) => {
                report.targets_hit += 1;
                report.max_preimage_residual = report.max_preimage_residual.max(res);
            }
            None => report.failures.push(v),
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfMapCheck {
    pub radius: f64,
    pub points: usize,
    pub max_modulus: f64,
    pub tail: f64,
    pub ok: bool,
}

/// Samples `|f|` on the sphere `|q| = radius`; by the maximum modulus
/// principle a margin `1 − max|f|` larger than the tail bound extends inward.
pub fn certify_self_map(f: &SliceSeries, radius: f64, points: usize, seed: u64) -> Result<SelfMapCheck> {
    let mut s = Sampler::new(seed ^ 0x5E1F);
    let pts: Vec<Quaternion> = (0..points).map(|_| s.on_sphere(radius)).collect();
    let mut max_modulus: f64 = 0.0;
    for q in pts {
        max_modulus = max_modulus.max(f.eval(q)?.norm());
    }
    Ok(SelfMapCheck {
        radius,
        points,
        max_modulus,
        tail: f.tail(),
        ok: 1.0 - max_modulus > f.tail(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauParams {
    pub scan: ScanParams,
    pub coverage: CoverageParams,
    /// Covered radius as a fraction of `ρ²`.
    pub coverage_fraction: f64,
    pub selfmap_radius: f64,
    pub selfmap_points: usize,
    pub origin_tol: f64,
}

impl Default for LandauParams {
    fn default() -> Self {
        LandauParams {
            scan: ScanParams::default(),
            coverage: CoverageParams::default(),
            coverage_fraction: 0.99,
            selfmap_radius: 0.97,
            selfmap_points: 2000,
            origin_tol: 1e-12,
        }
    }
}

impl LandauParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.scan.seed = seed;
        self.coverage.seed = seed;
        self
    }
}

/// Hypotheses of the Landau theorem; returns `a = |∂_c f(0)|`.
pub fn landau_hypotheses(f: &SliceSeries, p: &LandauParams) -> Result<f64> {
    let f0 = f.coeff(0).norm();
    if f0 > p.origin_tol {
        return Err(Error::Hypothesis(format!("f(0) = {} is not 0", f.coeff(0))));
    }
    let a = f.coeff(1).norm();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Hypothesis(format!("|f'(0)| = {a} is not in (0, 1)")));
    }
    let check = certify_self_map(
        f,
        p.selfmap_radius.min(f.radius() * 0.999),
        p.selfmap_points,
        p.scan.seed,
    )?;
    if !check.ok {
        return Err(Error::Hypothesis(format!(
            "self-map check failed: max |f| = {} at radius {} with tail {}",
            check.max_modulus, check.radius, check.tail
        )));
    }
    Ok(a)
}

pub fn landau_certify(f: &SliceSeries, p: &LandauParams) -> Result<(InjectivityReport, CoverageReport)> {
    let a = landau_hypotheses(f, p)?;
    let rho = landau_rho(a)?;
    let mut scan = p.scan;
    scan.r_max = scan.r_max.min(0.999 * f.radius().min(1.0));
    let out = injectivity_scan(&RegularFn::new(f.clone()), &scan);
    let witness = out.best().copied();
    let (upper_bound, upper_method) = match witness {
        Some(w @ Witness::Singular { .. }) => (w.radius(), BoundMethod::SingularScan),
        Some(w @ Witness::Collision { .. }) => (w.radius(), BoundMethod::CollisionScan),
        None => (f.radius().min(1.0), BoundMethod::None),
    };
    let injectivity = InjectivityReport {
        lower_bound: rho,
        upper_bound,
        lower_method: BoundMethod::LandauTheorem,
        upper_method,
        witness,
        grid_resolution: out.resolution,
        consistent: rho <= upper_bound + out.resolution,
    };
    let coverage = verify_covering(f, rho, p.coverage_fraction * rho * rho, &p.coverage)?;
    Ok((injectivity, coverage))
}

fn map_witness(w: Witness, r: f64, c: f64, f0: Quaternion) -> Witness {
    match w {
        Witness::Singular { point, kind, value } => Witness::Singular {
            point: point.scale(r),
            kind,
            value: f0 + value.scale(c),
        },
        Witness::Collision { q, q2, value, gap } => Witness::Collision {
            q: q.scale(r),
            q2: q2.scale(r),
            value: f0 + value.scale(c),
            gap: gap * c,
        },
    }
}

/// Normalizes `g(q) = (f(qR) − f(0))/C`, certifies `g`, and maps the reports
/// back: radii by `R`, values by `C` around `f(0)`.
pub fn landaubd_apply(
    f: &SliceSeries,
    r: f64,
    c: f64,
    p: &LandauParams,
) -> Result<(InjectivityReport, CoverageReport)> {
    if !(r > 0.0 && c > 0.0) {
        return Err(Error::Invalid(format!("R = {r} and C = {c} must be positive")));
    }
    let f0 = f.coeff(0);
    let g = f
        .rescale_argument(r)?
        .add_constant(-f0)
        .left_mul(Quaternion::real(1.0 / c));
    let (inj, cov) = landau_certify(&g, p)?;
    let inj = InjectivityReport {
        lower_bound: inj.lower_bound * r,
        upper_bound: inj.upper_bound * r,
        witness: inj.witness.map(|w| map_witness(w, r, c, f0)),
        grid_resolution: inj.grid_resolution * r,
        ..inj
    };
    let cov = CoverageReport {
        source_radius: cov.source_radius * r,
        target_radius: cov.target_radius * c,
        max_preimage_residual: cov.max_preimage_residual * c,
        failures: cov.failures.iter().map(|v| f0 + v.scale(c)).collect(),
        ..cov
    };
    Ok((inj, cov))
}

/// `q * 𝓜_{p₁} * … * 𝓜_{p_k} * u` through order `order`, with `|pᵢ| < 0.6`
/// and `u` a unit, all drawn from `seed`. `k = 0` gives `q u`.
pub fn generate_self_map(seed: u64, k: usize, order: usize) -> Result<SliceSeries> {
    let order = order.clamp(1, DEFAULT_MAX_ORDER);
    let mut s = Sampler::new(seed);
    let u = s.unit_quaternion();
    let mut prod = SliceSeries::constant(Quaternion::ONE, 1.0);
    for _ in 0..k {
        let spec = MoebiusSpec::regular(s.center(0.6), Quaternion::ONE)?;
        let m = regular_moebius_series(&spec, order - 1)?;
        prod = prod.star_mul_truncated(&m, order - 1)?;
    }
    let f = prod.shift_up().right_mul(u);
    let mut c = f.coeffs().to_vec();
    c.resize(order + 1, Quaternion::ZERO);
    Ok(SliceSeries::new(c, 1.0)?.with_tail(f.tail()))
}
