//! Deterministic, splittable random source.
//!
//! Every experiment in this crate draws from a [`GaussianStream`] derived
//! from a [`Seed`]. A seed is a root word plus a path of stream indices;
//! deriving a child seed is O(1) and distinct paths give statistically
//! independent streams. Replica-parallel Monte Carlo assigns one substream
//! per replica index, which makes all numeric output independent of the
//! number of worker threads.
//!
//! Not cryptographic. Quasi-random sequences are out of scope.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::util::ln_factorial;
use crate::Result;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer; full-avalanche 64-bit mix.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Root value plus a path of substream indices. `(root, path)` fully
/// determines every draw of the stream it opens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Seed {
    root: u64,
    path: Vec<u64>,
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Seed { root, path: Vec::new() }
    }

    /// Child seed for substream `index`. Children of distinct indices (and
    /// of distinct parents) open independent streams.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Seed { root: self.root, path }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Expand (root, path) into a 256-bit generator key by absorbing the
    /// path into a splitmix64 sponge. Path length is absorbed too, so
    /// `[a, b]` and `[a ^ b]` style collisions cannot occur.
    fn key(&self) -> [u8; 32] {
        let mut s = mix64(self.root ^ GOLDEN);
        for &p in &self.path {
            s = mix64(s.wrapping_add(GOLDEN) ^ p);
        }
        s = mix64(s.wrapping_add(GOLDEN) ^ self.path.len() as u64);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            s = mix64(s.wrapping_add(GOLDEN));
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        key
    }
}

/// A reproducible stream of random variates. The k-th complex Gaussian draw
/// is a function of the seed alone; replaying from the same seed reproduces
/// the identical sequence bitwise.
///
/// A stream is confined to one worker at a time: it may be sent between
/// threads but never shared concurrently.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha12Rng,
    position: u64,
}

impl GaussianStream {
    pub fn new(seed: &Seed) -> Self {
        GaussianStream {
            rng: ChaCha12Rng::from_seed(seed.key()),
            position: 0,
        }
    }

    /// Index of the next variate to be drawn.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Standard complex Gaussian: independent real and imaginary parts of
    /// mean 0 and variance 1/2, so E N = E N^2 = 0 and E |N|^2 = 1.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        self.position += 1;
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Standard real Gaussian, mean 0 variance 1.
    pub fn next_real_gaussian(&mut self) -> f64 {
        self.position += 1;
        self.rng.sample(StandardNormal)
    }

    /// Uniform on [0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        self.position += 1;
        self.rng.gen::<f64>()
    }

    /// Uniform point on the complex unit circle.
    pub fn next_unit_circle(&mut self) -> Complex64 {
        let phi = 2.0 * std::f64::consts::PI * self.next_uniform();
        Complex64::new(phi.cos(), phi.sin())
    }

    /// Uniform index in `0..bound` (unbiased).
    pub fn next_index(&mut self, bound: usize) -> usize {
        self.position += 1;
        self.rng.gen_range(0..bound)
    }

    /// Exp(1) variate via the inverse CDF -log(1 - U).
    pub fn next_standard_exponential(&mut self) -> f64 {
        let u = self.next_uniform();
        exp_inv_cdf(u)
    }

    /// Poisson(lambda) variate. Inversion by sequential search for
    /// lambda <= 30, Hörmann's PTRS transformed rejection above.
    pub fn next_poisson(&mut self, lambda: f64) -> Result<u64> {
        if !(lambda > 0.0) {
            return Err(Error::domain(format!(
                "poisson parameter must be positive, got {lambda}"
            )));
        }
        if lambda <= 30.0 {
            Ok(self.poisson_inversion(lambda))
        } else {
            Ok(self.poisson_ptrs(lambda))
        }
    }

    fn poisson_inversion(&mut self, lambda: f64) -> u64 {
        let u = self.next_uniform();
        let mut p = (-lambda).exp();
        let mut cdf = p;
        let mut k = 0u64;
        // 30 + 40*sqrt(30) < 250; events beyond the cap have probability
        // below 1e-100 and only guard against FP loop pathologies.
        while u > cdf && k < 1000 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        k
    }

    /// PTRS transformed rejection (Hörmann 1993), valid for lambda >= 10.
    fn poisson_ptrs(&mut self, lambda: f64) -> u64 {
        let log_lambda = lambda.ln();
        let b = 0.931 + 2.53 * lambda.sqrt();
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.next_uniform() - 0.5;
            let v = self.next_uniform();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let rhs = k * log_lambda - lambda - ln_factorial(k as u64);
            if (v * inv_alpha / (a / (us * us) + b)).ln() <= rhs {
                return k as u64;
            }
        }
    }
}

/// Inverse CDF of Exp(1); u in [0, 1) keeps the log argument in (0, 1].
#[inline]
fn exp_inv_cdf(u: f64) -> f64 {
    -(1.0 - u).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::mean_se;

    fn stream(root: u64) -> GaussianStream {
        GaussianStream::new(&Seed::new(root))
    }

    #[test]
    fn replay_is_bitwise_identical() {
        let seed = Seed::new(42).child(7);
        let a: Vec<Complex64> = {
            let mut s = GaussianStream::new(&seed);
            (0..1000).map(|_| s.next_complex_gaussian()).collect()
        };
        let b: Vec<Complex64> = {
            let mut s = GaussianStream::new(&seed);
            (0..1000).map(|_| s.next_complex_gaussian()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn complex_gaussian_moments() {
        let mut s = stream(1);
        let n = 1_000_000usize;
        let mut sum = Complex64::default();
        let mut sum_sq = Complex64::default();
        let mut sum_abs2 = 0.0;
        for _ in 0..n {
            let z = s.next_complex_gaussian();
            sum += z;
            sum_sq += z * z;
            sum_abs2 += z.norm_sqr();
        }
        let inv = 1.0 / n as f64;
        // CLT-scaled tolerances: 4/sqrt(n) for unit-variance statistics.
        assert!((sum * inv).norm() <= 4e-3, "mean modulus {}", (sum * inv).norm());
        assert!((sum_sq * inv).norm() <= 6e-3, "E[N^2] modulus {}", (sum_sq * inv).norm());
        assert!((sum_abs2 * inv - 1.0).abs() <= 4e-3, "E|N|^2 = {}", sum_abs2 * inv);
    }

    #[test]
    fn substreams_are_uncorrelated() {
        let base = Seed::new(99);
        for (i, j) in [(0u64, 1u64), (1, 2), (0, 7)] {
            let mut a = GaussianStream::new(&base.child(i));
            let mut b = GaussianStream::new(&base.child(j));
            let n = 100_000usize;
            let mut cross = Complex64::default();
            for _ in 0..n {
                cross += a.next_complex_gaussian() * b.next_complex_gaussian().conj();
            }
            let corr = (cross / n as f64).norm();
            assert!(corr <= 0.02, "streams {i},{j}: correlation {corr}");
        }
    }

    #[test]
    fn exponential_endpoint_and_moments() {
        assert_eq!(exp_inv_cdf(0.0), 0.0);
        let mut s = stream(2);
        let n = 1_000_000usize;
        let mut draws: Vec<f64> = (0..n).map(|_| s.next_standard_exponential()).collect();
        let (mean, _) = mean_se(&draws);
        assert!((mean - 1.0).abs() <= 4e-3, "mean {mean}");
        draws.sort_by(|a, b| a.total_cmp(b));
        let median = draws[n / 2];
        assert!(
            (median - std::f64::consts::LN_2).abs() <= 3e-3,
            "median {median}"
        );
    }

    #[test]
    fn poisson_rejects_nonpositive_lambda() {
        let mut s = stream(3);
        assert!(s.next_poisson(0.0).is_err());
        assert!(s.next_poisson(-1.0).is_err());
    }

    #[test]
    fn poisson_tiny_mean_is_zero() {
        let mut s = stream(4);
        for _ in 0..10_000 {
            assert_eq!(s.next_poisson(1e-9).unwrap(), 0);
        }
    }

    #[test]
    fn poisson_unit_mean_and_variance() {
        let mut s = stream(5);
        let n = 1_000_000usize;
        let draws: Vec<f64> = (0..n).map(|_| s.next_poisson(1.0).unwrap() as f64).collect();
        let (mean, _) = mean_se(&draws);
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.0).abs() <= 4e-3, "mean {mean}");
        assert!((var - 1.0).abs() <= 1e-2, "variance {var}");
    }

    #[test]
    fn poisson_rejection_regime_moments() {
        let mut s = stream(6);
        let n = 200_000usize;
        let lambda = 80.0;
        let draws: Vec<f64> = (0..n)
            .map(|_| s.next_poisson(lambda).unwrap() as f64)
            .collect();
        let (mean, se) = mean_se(&draws);
        assert!((mean - lambda).abs() <= 4.0 * se, "mean {mean} se {se}");
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((var / lambda - 1.0).abs() <= 0.02, "variance {var}");
    }

    #[test]
    fn distinct_paths_distinct_streams() {
        let base = Seed::new(11);
        let mut a = GaussianStream::new(&base.child(1));
        let mut b = GaussianStream::new(&base.child(2));
        assert_ne!(a.next_complex_gaussian(), b.next_complex_gaussian());
        // Nested paths differ from flat ones.
        let mut c = GaussianStream::new(&base.child(1).child(2));
        let mut d = GaussianStream::new(&base.child(1));
        d.next_complex_gaussian();
        assert_ne!(c.next_complex_gaussian(), d.next_complex_gaussian());
    }
}
