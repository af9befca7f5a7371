//! Deterministic seeded draws for verification scans.
//!
//! The generator is ChaCha8 seeded from a u64; floats are produced from the
//! raw 64-bit stream as (x >> 11) * 2^-53, so a given seed yields an
//! identical draw sequence on every platform and run.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::theta::{dist_to_lattice, ModularParams, DELTA_GEN};

pub struct Draws {
    rng: ChaCha8Rng,
}

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn complex_box(&mut self, re: (f64, f64), im: (f64, f64)) -> Complex64 {
        Complex64::new(self.in_range(re.0, re.1), self.in_range(im.0, im.1))
    }

    /// A spectral parameter away from Z + Z tau by DELTA_GEN (redraws until
    /// the margin holds; generic boxes make rejection vanishingly rare).
    pub fn generic_xi(&mut self, params: &ModularParams) -> Complex64 {
        loop {
            let xi = self.complex_box((-0.45, 0.45), (-0.3 * params.tau.im, 0.3 * params.tau.im));
            if dist_to_lattice(xi, params.tau) > 100.0 * DELTA_GEN {
                return xi;
            }
        }
    }

    /// A point of the open strip D, kept off the real line edges.
    pub fn point_in_domain(&mut self, params: &ModularParams) -> Complex64 {
        let h = params.tau.im / 2.0;
        self.complex_box((0.0, 1.0), (-0.8 * h, 0.8 * h))
    }

    /// n strip points whose pairwise differences stay away from Z.
    pub fn generic_points(&mut self, params: &ModularParams, n: usize, min_gap: f64) -> Vec<Complex64> {
        let mut pts: Vec<Complex64> = Vec::with_capacity(n);
        'outer: loop {
            let z = self.point_in_domain(params);
            for &p in &pts {
                let d = z - p;
                if (d.re - d.re.round()).abs().hypot(d.im) < min_gap {
                    continue 'outer;
                }
            }
            pts.push(z);
            if pts.len() == n {
                return pts;
            }
        }
    }
}
