//! Deterministic spectral-parameter sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::c64;

/// Seeded source of spectral parameters.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform point on the annulus `r_min ≤ |u| ≤ r_max` (radii in units of
    /// `scale`).
    pub fn annulus(&mut self, r_min: f64, r_max: f64, scale: f64) -> c64 {
        let r = self.rng.gen_range(r_min..=r_max) * scale;
        let phase = self.rng.gen_range(0.0..std::f64::consts::TAU);
        c64::from_polar(r, phase)
    }

    /// Annulus point at distance at least `min_dist` from every entry of
    /// `avoid` and from every previously accepted point in `taken`.
    pub fn annulus_avoiding(
        &mut self,
        r_min: f64,
        r_max: f64,
        scale: f64,
        avoid: &[c64],
        taken: &[c64],
        min_dist: f64,
    ) -> c64 {
        let mut best = self.annulus(r_min, r_max, scale);
        let mut best_d = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let z = if best_d == f64::NEG_INFINITY {
                best
            } else {
                self.annulus(r_min, r_max, scale)
            };
            let d = avoid
                .iter()
                .chain(taken)
                .map(|a| (z - a).norm())
                .fold(f64::INFINITY, f64::min);
            if d >= min_dist {
                return z;
            }
            if d > best_d {
                best = z;
                best_d = d;
            }
        }
        best
    }

    /// `n` well-separated annulus points avoiding `avoid`.
    pub fn points(&mut self, n: usize, r_min: f64, r_max: f64, scale: f64, avoid: &[c64], min_dist: f64) -> Vec<c64> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let z = self.annulus_avoiding(r_min, r_max, scale, avoid, &out, min_dist);
            out.push(z);
        }
        out
    }

    /// A generic pair `(u, v)` with `u ± v` and `u − v + η`, `u + v + η` bounded
    /// away from zero by `gap·|η|`.
    pub fn generic_pair(&mut self, eta: c64, gap: f64) -> (c64, c64) {
        let scale = eta.norm();
        loop {
            let u = self.annulus(0.2, 0.9, scale);
            let v = self.annulus(0.2, 0.9, scale);
            let bad = [u - v, u + v, u - v + eta, u + v + eta, u - v - eta, u + v + eta * 2.0]
                .iter()
                .any(|z| z.norm() < gap * scale);
            if !bad {
                return (u, v);
            }
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let a: Vec<_> = (0..5).map({
            let mut s = Sampler::new(42);
            move |_| s.annulus(0.5, 1.5, 1.0)
        }).collect();
        let mut s = Sampler::new(42);
        let b: Vec<_> = (0..5).map(|_| s.annulus(0.5, 1.5, 1.0)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn annulus_bounds_and_avoidance() {
        let mut s = Sampler::new(7);
        let avoid = [c64::new(0.5, 0.0), c64::new(-0.5, 0.0)];
        let pts = s.points(20, 0.5, 1.5, 2.0, &avoid, 0.05);
        for (i, z) in pts.iter().enumerate() {
            assert!(z.norm() >= 1.0 - 1e-12 && z.norm() <= 3.0 + 1e-12);
            for a in avoid.iter().chain(&pts[..i]) {
                assert!((z - a).norm() >= 0.05);
            }
        }
    }

    #[test]
    fn generic_pair_gaps() {
        let mut s = Sampler::new(3);
        let eta = c64::new(1.0, 0.0);
        for _ in 0..20 {
            let (u, v) = s.generic_pair(eta, 0.1);
            assert!((u - v).norm() >= 0.1 && (u + v + eta).norm() >= 0.1);
        }
    }
}
