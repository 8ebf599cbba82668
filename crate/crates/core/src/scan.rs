//! Searches for witnesses of non-injectivity inside a ball: singular points
//! of the real differential and collision pairs `f(q) = f(q′)`, `q ≠ q′`.
//!
//! Shell samples only produce seeds; every witness is a Newton-refined point,
//! so reported radii are not quantized to the shell grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::RegularFn;
use crate::newton::{solve_cullen_zero, solve_spherical_zero, solve_value, NewtonParams};
use crate::quaternion::Quaternion;
use crate::sampling::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    /// Shells of the singular scan, evenly spaced on `(0, r_max]`.
    pub shells: usize,
    pub points_per_sphere: usize,
    pub collision_shells: usize,
    pub collision_points: usize,
    pub r_max: f64,
    pub seed: u64,
    pub newton: NewtonParams,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            shells: 200,
            points_per_sphere: 64,
            collision_shells: 32,
            collision_points: 24,
            r_max: 0.999,
            seed: 0,
            newton: NewtonParams::default(),
        }
    }
}

impl ScanParams {
    pub fn resolution(&self) -> f64 {
        self.r_max / self.shells.max(1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    Cullen,
    Spherical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Singular {
        point: Quaternion,
        kind: SingularKind,
        value: Quaternion,
    },
    Collision {
        q: Quaternion,
        q2: Quaternion,
        value: Quaternion,
        gap: f64,
    },
}

impl Witness {
    /// Smallest `r` with the witness inside the closed ball `B̄(0, r)`.
    pub fn radius(&self) -> f64 {
        match self {
            Witness::Singular { point, .. } => point.norm(),
            Witness::Collision { q, q2, .. } => q.norm().max(q2.norm()),
        }
    }

    pub fn value(&self) -> Quaternion {
        match self {
            Witness::Singular { value, .. } | Witness::Collision { value, .. } => *value,
        }
    }

    /// `|q| |q′|`, or `|q|²` for a singular point.
    pub fn modulus_product(&self) -> f64 {
        match self {
            Witness::Singular { point, .. } => point.norm_sqr(),
            Witness::Collision { q, q2, .. } => q.norm() * q2.norm(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    /// Sorted by radius.
    pub witnesses: Vec<Witness>,
    pub resolution: f64,
}

impl ScanOutcome {
    pub fn best(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

const SEEDS_PER_KIND: usize = 24;

fn shell_sampler(seed: u64, salt: u64, shell: usize) -> Sampler {
    Sampler::new(seed ^ salt ^ (shell as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn shell_radius(r_max: f64, shells: usize, k: usize) -> f64 {
    r_max * (k + 1) as f64 / shells.max(1) as f64
}

fn sort_by_key_then_index<T>(v: &mut [(f64, usize, T)]) {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

/// Singular points of `f` in `B(0, r_max)`.
pub fn singular_scan(f: &RegularFn, p: &ScanParams) -> Vec<Witness> {
    let per_shell = p.points_per_sphere + 2;
    let samples: Vec<(Quaternion, f64, f64)> = (0..p.shells)
        .into_par_iter()
        .flat_map_iter(|k| {
            let r = shell_radius(p.r_max, p.shells, k);
            let mut s = shell_sampler(p.seed, 0x51, k);
            let mut pts = vec![Quaternion::real(r), Quaternion::real(-r)];
            pts.extend((0..p.points_per_sphere).map(|_| s.on_sphere(r)));
            pts
        })
        .map(|q| {
            let c = f.cullen(q).map(|c| c.norm()).unwrap_or(f64::INFINITY);
            let sp = if q.im_norm() > 0.0 {
                f.spherical(q).norm()
            } else {
                f64::INFINITY
            };
            (q, c, sp)
        })
        .collect();
    debug_assert_eq!(samples.len(), p.shells * per_shell);

    let mut by_cullen: Vec<(f64, usize, Quaternion)> = samples.iter().enumerate().map(|(i, s)| (s.1, i, s.0)).collect();
    let mut by_spherical: Vec<(f64, usize, Quaternion)> =
        samples.iter().enumerate().map(|(i, s)| (s.2, i, s.0)).collect();
    sort_by_key_then_index(&mut by_cullen);
    sort_by_key_then_index(&mut by_spherical);

    let limit = p.r_max;
    let mut seeds: Vec<(SingularKind, Quaternion)> = by_cullen
        .iter()
        .take(SEEDS_PER_KIND)
        .map(|s| (SingularKind::Cullen, s.2))
        .collect();
    seeds.extend(
        by_spherical
            .iter()
            .filter(|s| s.0.is_finite())
            .take(SEEDS_PER_KIND)
            .map(|s| (SingularKind::Spherical, s.2)),
    );
    let found: Vec<Option<Witness>> = seeds
        .par_iter()
        .map(|&(kind, seed)| {
            let out = match kind {
                SingularKind::Cullen => solve_cullen_zero(f, seed, limit, &p.newton),
                SingularKind::Spherical => {
                    let unit = seed.slice_decompose().unit?;
                    solve_spherical_zero(f, seed, unit, limit, &p.newton)
                }
            };
            if !out.converged {
                return None;
            }
            let value = f.value(out.point).ok()?;
            Some(Witness::Singular {
                point: out.point,
                kind,
                value,
            })
        })
        .collect();
    let mut w: Vec<Witness> = found.into_iter().flatten().collect();
    dedup(&mut w);
    w
}

fn dedup(w: &mut Vec<Witness>) {
    w.sort_by(|a, b| a.radius().total_cmp(&b.radius()));
    let mut out: Vec<Witness> = Vec::with_capacity(w.len());
    for x in w.drain(..) {
        let dup = out.iter().any(|y| match (y, &x) {
            (Witness::Singular { point: a, .. }, Witness::Singular { point: b, .. }) => (*a - *b).norm() < 1e-8,
            (Witness::Collision { q: a, q2: a2, .. }, Witness::Collision { q: b, q2: b2, .. }) => {
                ((*a - *b).norm() < 1e-8 && (*a2 - *b2).norm() < 1e-8)
                    || ((*a - *b2).norm() < 1e-8 && (*a2 - *b).norm() < 1e-8)
            }
            _ => false,
        });
        if !dup {
            out.push(x);
        }
    }
    *w = out;
}

/// Collision pairs with both points in `B(0, min(r_max, below))`. Shells are
/// visited outward and the search stops at the smallest witness radius found.
pub fn collision_scan(f: &RegularFn, p: &ScanParams, below: f64) -> Vec<Witness> {
    let limit = p.r_max;
    let mut bound = below.min(limit);
    let mut found = Vec::new();
    for k in 0..p.collision_shells {
        let r = shell_radius(limit, p.collision_shells, k);
        if r >= bound {
            break;
        }
        let mut s = shell_sampler(p.seed, 0xC0, k);
        let tasks: Vec<(Quaternion, Vec<Quaternion>)> = (0..p.collision_points)
            .map(|_| {
                let q = s.on_sphere(r);
                let c = q.slice_decompose();
                let mut seeds = vec![q.conj(), -q, -q.conj()];
                for _ in 0..2 {
                    seeds.push(Quaternion::real(c.x) + s.imaginary_unit().get().scale(c.y));
                }
                for _ in 0..2 {
                    seeds.push(s.in_ball_radial(r));
                }
                (q, seeds)
            })
            .collect();
        let hits: Vec<Option<Witness>> = tasks
            .par_iter()
            .map(|(q, seeds)| {
                let v = f.value(*q).ok()?;
                let mut best: Option<Witness> = None;
                for &seed in seeds {
                    let out = solve_value(f, v, seed, limit, &p.newton);
                    if !out.converged {
                        continue;
                    }
                    let sigma = f.differential(out.point).map(|d| d.min_singular_value()).unwrap_or(0.0);
                    let sep = (1e3 * out.residual / sigma.max(1e-300)).max(1e-6);
                    if (out.point - *q).norm() <= sep {
                        continue;
                    }
                    let w = Witness::Collision {
                        q: *q,
                        q2: out.point,
                        value: v,
                        gap: out.residual,
                    };
                    if best.is_none_or(|b| w.radius() < b.radius()) {
                        best = Some(w);
                    }
                }
                best
            })
            .collect();
        for w in hits.into_iter().flatten() {
            bound = bound.min(w.radius());
            found.push(w);
        }
    }
    dedup(&mut found);
    found
}

/// Singular scan followed by a collision scan bounded by the best singular
/// witness.
pub fn injectivity_scan(f: &RegularFn, p: &ScanParams) -> ScanOutcome {
    let mut witnesses = singular_scan(f, p);
    let below = witnesses.first().map_or(p.r_max, |w| w.radius());
    witnesses.extend(collision_scan(f, p, below));
    dedup(&mut witnesses);
    ScanOutcome {
        witnesses,
        resolution: p.resolution(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SliceSeries;

    fn params() -> ScanParams {
        ScanParams {
            shells: 50,
            points_per_sphere: 16,
            collision_shells: 10,
            collision_points: 8,
            ..ScanParams::default()
        }
    }

    #[test]
    fn linear_maps_have_no_witnesses() {
        let f = RegularFn::new(SliceSeries::constant(Quaternion::new(0.3, 0.2, -0.1, 0.4), 1.0).shift_up());
        let out = injectivity_scan(&f, &params());
        assert!(out.witnesses.is_empty(), "{:?}", out.witnesses);
    }

    #[test]
    fn square_has_singular_origin_and_imaginary_plane() {
        let f = RegularFn::new(SliceSeries::from_reals(&[0.0, 0.0, 1.0], 1.0).unwrap());
        let w = singular_scan(&f, &params());
        assert!(!w.is_empty());
        for x in &w {
            if let Witness::Singular { point, .. } = x {
                assert!(point.re().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadratic_collision_and_critical_point() {
        // q + c q² is not injective past |q| = 1/(2|c|)
        let f = RegularFn::new(SliceSeries::from_reals(&[0.0, 1.0, 1.0], 1.0).unwrap());
        let out = injectivity_scan(&f, &params());
        let best = out.best().unwrap();
        assert!((best.radius() - 0.5).abs() < 1e-9, "{best:?}");
        // sphere-mates q, q̄ on Re q = −1/2 collide as well
        let w = collision_scan(&f, &params(), 1.0);
        for x in &w {
            if let Witness::Collision { q, q2, value, .. } = x {
                assert!((f.value(*q).unwrap() - *value).norm() < 1e-10);
                assert!((f.value(*q2).unwrap() - *value).norm() < 1e-10);
                assert!((*q - *q2).norm() > 1e-6);
            }
        }
    }

    #[test]
    fn scans_are_deterministic() {
        let f = RegularFn::new(SliceSeries::from_reals(&[0.0, 1.0, 0.8, 0.3], 1.0).unwrap());
        let a = injectivity_scan(&f, &params());
        let b = injectivity_scan(&f, &params());
        assert_eq!(a, b);
    }
}
