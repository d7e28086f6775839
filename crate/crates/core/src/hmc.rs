//! Chaos coefficient samplers, the good/bad splitting of a coefficient by
//! its largest active frequency, and linear statistics.
//!
//! A coefficient c_{n+r} splits as good + bad, where the good part collects
//! the compositions whose largest frequency q is the unique large one: for
//! some block index K in 1..L, q lies in (Kn/L, (K+1)n/L], appears with
//! multiplicity one, and every other frequency is at most Kn/L. Summing over
//! q turns the good part into
//!
//!   sum_{K=1}^{L-1} sum_{Kn/L < q <= (K+1)n/L} sqrt(theta) g_q c_{n+r-q, Kn/L}
//!
//! with g_q the generator coefficient and c_{s,u} the frequency-restricted
//! coefficients, which is how [`good_part`] evaluates it: one restricted
//! table per K, reused across q. Cutoffs written Kn/L mean floor(Kn/L); for
//! n not divisible by L the half-open convention (Kn/L, (K+1)n/L] decides
//! boundary membership. A literal composition-filter oracle
//! ([`enumerate_split`]) covers small degrees.

use num_complex::Complex64;

use crate::error::Error;
use crate::rng::{GaussianStream, Seed};
use crate::series::{
    exp_series, for_each_partition, restricted_exp, CoeffVec, GeneratorVec,
    BRUTE_FORCE_MAX_DEGREE,
};
use crate::util::SQRT_PI;
use crate::Result;

/// One materialized chaos sample: the Gaussians N_1..N_{n+d} drawn in index
/// order and the coefficients c_0..c_{n+d} of exp(sqrt(theta) G).
#[derive(Debug, Clone)]
pub struct HmcSample {
    gaussians: Vec<Complex64>,
    coeffs: CoeffVec,
    theta: f64,
}

impl HmcSample {
    /// Build a sample from explicitly given Gaussians (forced inputs in
    /// tests, or draws the caller manages).
    pub fn from_gaussians(gaussians: Vec<Complex64>, theta: f64) -> Self {
        let g = GeneratorVec::from_gaussians(&gaussians);
        let coeffs = exp_series(&g, theta, gaussians.len());
        HmcSample { gaussians, coeffs, theta }
    }

    /// N_k for k >= 1.
    pub fn gaussian(&self, k: usize) -> Complex64 {
        self.gaussians[k - 1]
    }

    pub fn gaussians(&self) -> &[Complex64] {
        &self.gaussians
    }

    /// Largest index k for which N_k is materialized.
    pub fn max_index(&self) -> usize {
        self.gaussians.len()
    }

    pub fn coeffs(&self) -> &CoeffVec {
        &self.coeffs
    }

    /// c_s.
    pub fn coeff(&self, s: usize) -> Complex64 {
        self.coeffs.coeff(s)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn generator(&self) -> GeneratorVec {
        GeneratorVec::from_gaussians(&self.gaussians)
    }
}

/// Draw N_1..N_{n+d} from the seed's stream in index order and return the
/// coefficients c_0..c_{n+d}.
pub fn sample_coeffs(n: usize, d: usize, theta: f64, seed: &Seed) -> HmcSample {
    let mut stream = GaussianStream::new(seed);
    sample_coeffs_from_stream(n, d, theta, &mut stream)
}

/// As [`sample_coeffs`], drawing from an already-open stream.
pub fn sample_coeffs_from_stream(
    n: usize,
    d: usize,
    theta: f64,
    stream: &mut GaussianStream,
) -> HmcSample {
    let gaussians: Vec<Complex64> = (0..n + d).map(|_| stream.next_complex_gaussian()).collect();
    HmcSample::from_gaussians(gaussians, theta)
}

/// Parameters of the good/bad split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitConfig {
    /// Target index; the split decomposes c_{n+r}.
    pub n: usize,
    /// Shift.
    pub r: usize,
    /// Number of blocks.
    pub l_blocks: usize,
}

impl SplitConfig {
    /// Requires l_blocks >= 2 and n >= l_blocks so the block boundaries
    /// floor(Kn/L) are strictly increasing.
    pub fn new(n: usize, r: usize, l_blocks: usize) -> Result<Self> {
        if l_blocks < 2 {
            return Err(Error::domain(format!("need at least 2 blocks, got {l_blocks}")));
        }
        if n < l_blocks {
            return Err(Error::domain(format!(
                "n = {n} must be at least the block count {l_blocks}"
            )));
        }
        Ok(SplitConfig { n, r, l_blocks })
    }
}

/// good + bad = c_{n+r} exactly (up to float roundoff).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitResult {
    pub good: Complex64,
    pub bad: Complex64,
}

/// The good part of c_{n+r}, via the restricted-table representation.
/// Errors if the sample does not hold Gaussians up to n + r.
pub fn good_part(sample: &HmcSample, cfg: SplitConfig) -> Result<Complex64> {
    let SplitConfig { n, r, l_blocks: l } = cfg;
    if sample.max_index() < n + r {
        return Err(Error::size(format!(
            "sample holds N_1..N_{}, split needs index {}",
            sample.max_index(),
            n + r
        )));
    }
    let sqrt_theta = sample.theta().sqrt();
    let gen = sample.generator();
    let mut total = Complex64::default();
    for k_block in 1..l {
        let u = k_block * n / l;
        let q_lo = u + 1;
        let q_hi = (k_block + 1) * n / l;
        if q_hi < q_lo {
            continue;
        }
        let table = restricted_exp(&gen, sample.theta(), u, n + r - q_lo);
        for q in q_lo..=q_hi {
            total += sqrt_theta * gen.coeff(q) * table.coeff(n + r - q);
        }
    }
    Ok(total)
}

/// The bad part: c_{n+r} minus the good part.
pub fn bad_part(sample: &HmcSample, cfg: SplitConfig) -> Result<Complex64> {
    Ok(sample.coeff(cfg.n + cfg.r) - good_part(sample, cfg)?)
}

/// Both parts with one restricted-table pass.
pub fn split(sample: &HmcSample, cfg: SplitConfig) -> Result<SplitResult> {
    let good = good_part(sample, cfg)?;
    Ok(SplitResult {
        good,
        bad: sample.coeff(cfg.n + cfg.r) - good,
    })
}

/// Literal composition-filter oracle for the split, capped at n + r <= 14.
/// Enumerates every composition of n + r, classifies it good or bad by the
/// largest-frequency rule, and sums the composition terms directly.
pub fn enumerate_split(sample: &HmcSample, cfg: SplitConfig) -> Result<SplitResult> {
    let SplitConfig { n, r, l_blocks: l } = cfg;
    let total = n + r;
    if total > BRUTE_FORCE_MAX_DEGREE {
        return Err(Error::size(format!(
            "split enumeration capped at n + r = {BRUTE_FORCE_MAX_DEGREE}, got {total}"
        )));
    }
    if sample.max_index() < total {
        return Err(Error::size("sample too short for split enumeration".to_string()));
    }
    let sqrt_theta = sample.theta().sqrt();
    let gen = sample.generator();
    let mut good = Complex64::default();
    let mut bad = Complex64::default();
    for_each_partition(total, &mut |parts| {
        let mut term = Complex64::new(1.0, 0.0);
        for &(k, mult) in parts {
            let base = gen.coeff(k) * sqrt_theta;
            let mut pow = Complex64::new(1.0, 0.0);
            let mut fact = 1.0;
            for j in 1..=mult {
                pow *= base;
                fact *= j as f64;
            }
            term *= pow / fact;
        }
        if is_good_composition(parts, n, l) {
            good += term;
        } else {
            bad += term;
        }
    });
    Ok(SplitResult { good, bad })
}

/// Largest-frequency classification of a composition given as (part, mult)
/// pairs with strictly decreasing parts.
fn is_good_composition(parts: &[(usize, usize)], n: usize, l: usize) -> bool {
    let Some(&(k_max, mult_max)) = parts.first() else {
        return false; // empty composition (degree 0) has no large frequency
    };
    // Bad outright: everything at or below n/L, or something above n.
    if k_max * l <= n || k_max > n {
        return false;
    }
    // Unique K with Kn/L < k_max <= (K+1)n/L.
    let k_block = (k_max * l - 1) / n;
    debug_assert!((1..l).contains(&k_block));
    if mult_max != 1 {
        return false;
    }
    match parts.get(1) {
        None => true,
        Some(&(second, _)) => second * l <= k_block * n,
    }
}

/// Complex polynomial p(z) = sum_r a_r z^r.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    a: Vec<Complex64>,
}

impl Poly {
    pub fn new(a: Vec<Complex64>) -> Self {
        assert!(!a.is_empty(), "polynomial needs at least a constant term");
        Poly { a }
    }

    /// 1 + z, the workhorse test polynomial.
    pub fn one_plus_z() -> Self {
        Poly::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn constant_one() -> Self {
        Poly::new(vec![Complex64::new(1.0, 0.0)])
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    /// a_r (zero above the stored degree).
    pub fn coeff(&self, r: usize) -> Complex64 {
        self.a.get(r).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for &c in self.a.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

/// The linear statistic X_n(p) = sum_r a_r c_{n+r}.
pub fn x_n_p(sample: &HmcSample, p: &Poly, n: usize) -> Complex64 {
    (0..=p.degree()).map(|r| p.coeff(r) * sample.coeff(n + r)).sum()
}

/// sqrt(pi) |c_n|^2 sqrt(log n): the statistic whose limit CDF is x/(1+x).
/// Needs n >= 2 so that log n is positive.
pub fn scaled_modulus_sq(sample: &HmcSample, n: usize) -> Result<f64> {
    scaled_sq_stat(sample.coeff(n).norm_sqr(), n)
}

/// Shared scaling sqrt(pi) |c|^2 sqrt(log n) for a precomputed |c|^2.
pub fn scaled_sq_stat(abs_sq: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("scaled statistic needs n >= 2, got {n}")));
    }
    Ok(SQRT_PI * abs_sq * (n as f64).ln().sqrt())
}
