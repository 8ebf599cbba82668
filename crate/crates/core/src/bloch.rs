//! Bloch–Landau procedure on one slice: locate where `(1 − r) max |∂_c f|`
//! last equals 1, re-expand `f` there and certify a covered ball of radius
//! `2(31 − 8√15)` around the image of that point.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::recenter_slice;
use crate::landau::{landau_rho, landaubd_apply, CoverageParams, CoverageReport, InjectivityReport, LandauParams};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::scan::ScanParams;
use crate::series::SliceSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochParams {
    /// Samples of `h` on `[0, 1)`.
    pub r_grid: usize,
    pub circle_points: usize,
    pub bisection_tol: f64,
    pub recenter_order: usize,
    pub landau: LandauParams,
}

impl Default for BlochParams {
    fn default() -> Self {
        BlochParams {
            r_grid: 200,
            circle_points: 128,
            bisection_tol: 1e-6,
            recenter_order: 64,
            landau: LandauParams {
                scan: ScanParams {
                    shells: 100,
                    points_per_sphere: 32,
                    collision_shells: 16,
                    collision_points: 12,
                    ..ScanParams::default()
                },
                coverage: CoverageParams {
                    targets: 200,
                    ..CoverageParams::default()
                },
                ..LandauParams::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochCertificate {
    pub slice: ImaginaryUnit,
    pub p: Quaternion,
    pub r0: f64,
    pub rho0: f64,
    pub rho: f64,
    pub inner_radius: f64,
    pub covered_radius: f64,
    pub center_value: Quaternion,
    pub injectivity_verified: bool,
    pub coverage_verified: bool,
    /// `h` crossed 1 more than once between grid samples.
    pub grid_warning: bool,
    pub h_table: Vec<[f64; 2]>,
    pub injectivity: InjectivityReport,
    pub coverage: CoverageReport,
}

/// `2ρ²` with `ρ = 4 − √15`, i.e. `2(31 − 8√15)`.
pub fn bloch_radius() -> f64 {
    let rho = landau_rho(0.25).expect("1/4 is in range");
    2.0 * rho * rho
}

fn circle_point(unit: Quaternion, r: f64, theta: f64) -> Quaternion {
    Quaternion::real(r * theta.cos()) + unit.scale(r * theta.sin())
}

/// `max_θ |∂_c f(r e^{Iθ})|` and the maximizing angle.
fn circle_max(df: &SliceSeries, unit: Quaternion, r: f64, points: usize) -> (f64, f64) {
    let value = |t: f64| df.eval_unchecked(circle_point(unit, r, t)).norm();
    if r == 0.0 {
        return (value(0.0), 0.0);
    }
    let step = 2.0 * PI / points as f64;
    let (mut best_t, mut best) = (0.0, value(0.0));
    for k in 1..points {
        let t = k as f64 * step;
        let v = value(t);
        if v > best {
            (best_t, best) = (t, v);
        }
    }
    // golden-section refinement on the bracketing cell
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (value(c), value(d));
    for _ in 0..60 {
        if fc > fd {
            hi = d;
            (d, fd) = (c, fc);
            c = hi - g * (hi - lo);
            fc = value(c);
        } else {
            lo = c;
            (c, fc) = (d, fd);
            d = lo + g * (hi - lo);
            fd = value(d);
        }
    }
    let t = 0.5 * (lo + hi);
    let v = value(t);
    if v > best {
        (v, t)
    } else {
        (best, best_t)
    }
}

pub fn bloch_landau(f: &SliceSeries, unit: ImaginaryUnit, p: &BlochParams) -> Result<BlochCertificate> {
    if !(f.radius() > 1.0) {
        return Err(Error::Hypothesis(format!("radius {} must exceed 1", f.radius())));
    }
    let a = f.coeff(1).norm();
    if (a - 1.0).abs() > 1e-10 {
        return Err(Error::Hypothesis(format!("|f'(0)| = {a} is not 1")));
    }
    let df = f.cullen_derivative();
    let i = unit.get();
    let h = |r: f64| (1.0 - r) * circle_max(&df, i, r, p.circle_points).0;

    let n = p.r_grid.max(2);
    let table: Vec<[f64; 2]> = (0..n)
        .into_par_iter()
        .map(|k| {
            let r = k as f64 / n as f64;
            [r, h(r)]
        })
        .collect();
    let last = table.iter().rposition(|e| e[1] >= 1.0).unwrap_or(0);
    let crossings = table
        .windows(2)
        .filter(|w| (w[0][1] >= 1.0) != (w[1][1] >= 1.0))
        .count();
    let grid_warning = crossings > 1;
    if grid_warning {
        log::warn!("h crosses 1 {crossings} times on the grid; r0 may be under-resolved");
    }
    let (mut lo, mut hi) = (table[last][0], table.get(last + 1).map_or(1.0, |e| e[0]));
    while hi - lo > p.bisection_tol {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r0 = lo;
    let (_, theta) = circle_max(&df, i, r0, p.circle_points);
    let point = circle_point(i, r0, theta);
    let rho0 = 0.5 * (1.0 - r0);

    let fp = if r0 == 0.0 {
        f.clone()
    } else {
        recenter_slice(f, point, p.recenter_order)?
    };
    let (injectivity, coverage) = landaubd_apply(&fp, rho0, 2.0, &p.landau)?;
    let rho = landau_rho(0.25)?;
    let inner_radius = rho0 * rho;
    let injectivity_verified = injectivity
        .witness
        .is_none_or(|w| w.radius() >= inner_radius - injectivity.grid_resolution);
    Ok(BlochCertificate {
        slice: unit,
        p: point,
        r0,
        rho0,
        rho,
        inner_radius,
        covered_radius: 2.0 * rho * rho,
        center_value: fp.coeff(0),
        injectivity_verified,
        coverage_verified: coverage.complete(),
        grid_warning,
        h_table: table,
        injectivity,
        coverage,
    })
}
