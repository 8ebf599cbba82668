//! Damped Newton iterations on `ℍ ≅ ℝ⁴` driven by the real differential.

use nalgebra::{Matrix4x2, Vector4};
use serde::{Deserialize, Serialize};

use crate::geometry::{to_vec, RegularFn};
use crate::quaternion::{ImaginaryUnit, Quaternion};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonParams {
    /// Accept when the residual drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams {
            tol: 1e-12,
            max_iter: 60,
            max_halvings: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub point: Quaternion,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `f(q) = v` from `seed`, keeping iterates inside `B(0, limit)`.
///
/// A step that leaves the ball or fails to decrease the residual is halved
/// up to `max_halvings` times; if that does not help the run stops and is
/// reported as not converged.
pub fn solve_value(f: &RegularFn, v: Quaternion, seed: Quaternion, limit: f64, p: &NewtonParams) -> NewtonOutcome {
    let residual_at = |q: Quaternion| -> Option<f64> {
        if q.norm() >= limit {
            return None;
        }
        f.value(q).ok().map(|w| (w - v).norm())
    };
    let mut q = seed;
    let mut res = match residual_at(q) {
        Some(r) => r,
        None => {
            return NewtonOutcome {
                point: q,
                residual: f64::INFINITY,
                iterations: 0,
                converged: false,
            }
        }
    };
    for it in 0..p.max_iter {
        if res < p.tol {
            return NewtonOutcome {
                point: q,
                residual: res,
                iterations: it,
                converged: true,
            };
        }
        let step = match f.differential(q).ok().and_then(|d| d.solve(v - f.value(q).ok()?)) {
            Some(s) if s.is_finite() => s,
            _ => break,
        };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=p.max_halvings {
            let cand = q + step.scale(t);
            if let Some(r) = residual_at(cand) {
                if r < res {
                    accepted = Some((cand, r));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, r)) => {
                q = cand;
                res = r;
            }
            None => break,
        }
    }
    NewtonOutcome {
        point: q,
        residual: res,
        iterations: p.max_iter,
        converged: res < p.tol,
    }
}

/// Tracks `f(q) = f(0) + s (v − f(0))` for `s = 1/steps, …, 1`, each stage
/// seeded by the previous solution.
pub fn solve_value_continuation(
    f: &RegularFn,
    v: Quaternion,
    limit: f64,
    steps: usize,
    p: &NewtonParams,
) -> NewtonOutcome {
    let f0 = f.series().coeff(0);
    let loose = NewtonParams {
        tol: p.tol.max(1e-9),
        ..*p
    };
    let mut q = Quaternion::ZERO;
    for k in 1..steps {
        let target = f0 + (v - f0).scale(k as f64 / steps as f64);
        let out = solve_value(f, target, q, limit, &loose);
        if !out.converged {
            return out;
        }
        q = out.point;
    }
    solve_value(f, v, q, limit, p)
}

/// Zero of the Cullen derivative near `seed`.
pub fn solve_cullen_zero(f: &RegularFn, seed: Quaternion, limit: f64, p: &NewtonParams) -> NewtonOutcome {
    let df = RegularFn::new(f.derivative().clone());
    solve_value(&df, Quaternion::ZERO, seed, limit, p)
}

/// Sphere `x + y𝕊` (y > 0) on which the spherical derivative vanishes, by
/// Gauss–Newton in `(x, y)` on `P(x, x² + y²) = 0`. The returned point lies on
/// that sphere along `unit`.
pub fn solve_spherical_zero(
    f: &RegularFn,
    seed: Quaternion,
    unit: ImaginaryUnit,
    limit: f64,
    p: &NewtonParams,
) -> NewtonOutcome {
    let series = f.series();
    let eval = |x: f64, y: f64| -> Vector4<f64> { to_vec(series.spherical_parts(x, x * x + y * y).0) };
    let c = seed.slice_decompose();
    let (mut x, mut y) = (c.x, c.y);
    let inside = |x: f64, y: f64| y > 0.0 && (x * x + y * y).sqrt() < limit;
    let point = |x: f64, y: f64| Quaternion::real(x) + unit.get().scale(y);
    if !inside(x, y) {
        return NewtonOutcome {
            point: seed,
            residual: f64::INFINITY,
            iterations: 0,
            converged: false,
        };
    }
    let mut r = eval(x, y);
    let mut res = r.norm();
    for it in 0..p.max_iter {
        if res < p.tol {
            return NewtonOutcome {
                point: point(x, y),
                residual: res,
                iterations: it,
                converged: true,
            };
        }
        let h = 1e-7 * (1.0 + x.abs() + y);
        let jx = (eval(x + h, y) - eval(x - h, y)) / (2.0 * h);
        let jy = (eval(x, y + h) - eval(x, y - h)) / (2.0 * h);
        let j = Matrix4x2::from_columns(&[jx, jy]);
        let step = match j.svd(true, true).solve(&(-r), 1e-14) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=p.max_halvings {
            let (nx, ny) = (x + t * step[0], y + t * step[1]);
            if inside(nx, ny) {
                let nr = eval(nx, ny);
                if nr.norm() < res {
                    (x, y, r, res) = (nx, ny, nr, nr.norm());
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    NewtonOutcome {
        point: point(x, y),
        residual: res,
        iterations: p.max_iter,
        converged: res < p.tol,
    }
}
