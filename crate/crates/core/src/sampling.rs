//! Seeded pseudorandom sampling of quaternions, balls and spheres.
//!
//! Every sampled quantity in the crate goes through [`Sampler`], so a seed
//! fully determines the points a scan or a check looks at.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::quaternion::{ImaginaryUnit, Quaternion};

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent stream, e.g. one per fixture or per check.
    pub fn fork(&mut self, salt: u64) -> Sampler {
        let s: u64 = self.rng.random();
        Sampler::new(s ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Components uniform in `[-1, 1]`.
    pub fn quaternion(&mut self) -> Quaternion {
        Quaternion::new(
            self.uniform(-1.0, 1.0),
            self.uniform(-1.0, 1.0),
            self.uniform(-1.0, 1.0),
            self.uniform(-1.0, 1.0),
        )
    }

    /// Uniform on the unit 3-sphere `∂𝔹`.
    pub fn unit_quaternion(&mut self) -> Quaternion {
        loop {
            let q = Quaternion::new(self.normal(), self.normal(), self.normal(), self.normal());
            let n = q.norm();
            if n > 1e-8 {
                return q.scale(1.0 / n);
            }
        }
    }

    /// Uniform on `𝕊`.
    pub fn imaginary_unit(&mut self) -> ImaginaryUnit {
        loop {
            let q = Quaternion::new(0.0, self.normal(), self.normal(), self.normal());
            if q.norm() > 1e-8 {
                return ImaginaryUnit::new(q).expect("nonzero imaginary part");
            }
        }
    }

    pub fn on_sphere(&mut self, radius: f64) -> Quaternion {
        self.unit_quaternion().scale(radius)
    }

    /// Radius uniform in `[0, r_max)`, direction uniform on the sphere.
    ///
    /// Not uniform in volume: this weights the region near the boundary
    /// more heavily than volume sampling would.
    pub fn in_ball_radial(&mut self, r_max: f64) -> Quaternion {
        let r = self.uniform(0.0, r_max);
        self.on_sphere(r)
    }

    /// Uniform in volume inside `B(0, r_max)`.
    pub fn in_ball_volume(&mut self, r_max: f64) -> Quaternion {
        let r = r_max * self.rng.random::<f64>().powf(0.25);
        self.on_sphere(r)
    }

    /// A quaternion with modulus uniform in `[0, r_max)`.
    pub fn center(&mut self, r_max: f64) -> Quaternion {
        self.in_ball_radial(r_max)
    }
}
