//! Reproducible sharded Monte Carlo / quasi-Monte Carlo estimation.
//!
//! All randomness flows from a single 64-bit seed. Work is split into shards
//! with independent counter-based RNG streams, and the reduction is an
//! ordered sum over shard index, so a given (seed, shards, samples) triple
//! yields bit-identical results whether shards run on one thread or many.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadMethod {
    MonteCarlo,
    /// Owen-scrambled Sobol points (seedable; f32 resolution).
    Sobol,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: QuadMethod,
    pub samples: u64,
    pub seed: u64,
    pub shards: u64,
    /// If > 0, the sample budget is doubled (up to 16x) until the estimated
    /// relative error falls below this target.
    pub target_rel_err: f64,
}

impl QuadratureConfig {
    pub fn mc(samples: u64, seed: u64) -> Self {
        QuadratureConfig {
            method: QuadMethod::MonteCarlo,
            samples,
            seed,
            shards: 64,
            target_rel_err: 0.0,
        }
    }

    pub fn with_shards(mut self, shards: u64) -> Self {
        self.shards = shards.max(1);
        self
    }

    pub fn with_method(mut self, method: QuadMethod) -> Self {
        self.method = method;
        self
    }
}

/// A complex Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub est_err: f64,
    pub samples: u64,
    /// Samples discarded by the caller's exclusion rules (near-contour band).
    pub rejected: u64,
}

impl Estimate {
    pub fn scaled(mut self, c: f64) -> Estimate {
        self.value *= c;
        self.est_err *= c.abs();
        self
    }
}

#[derive(Default, Clone, Copy)]
struct Accum {
    sum_re: f64,
    sum_im: f64,
    sum_re2: f64,
    sum_im2: f64,
    count: u64,
    rejected: u64,
}

impl Accum {
    fn push(&mut self, v: Complex64) {
        self.sum_re += v.re;
        self.sum_im += v.im;
        self.sum_re2 += v.re * v.re;
        self.sum_im2 += v.im * v.im;
        self.count += 1;
    }

    fn merge(&mut self, other: &Accum) {
        self.sum_re += other.sum_re;
        self.sum_im += other.sum_im;
        self.sum_re2 += other.sum_re2;
        self.sum_im2 += other.sum_im2;
        self.count += other.count;
        self.rejected += other.rejected;
    }

    fn finish(&self) -> Estimate {
        let n = self.count.max(1) as f64;
        let mean = Complex64::new(self.sum_re / n, self.sum_im / n);
        let var_re = (self.sum_re2 / n - mean.re * mean.re).max(0.0);
        let var_im = (self.sum_im2 / n - mean.im * mean.im).max(0.0);
        Estimate {
            value: mean,
            est_err: ((var_re + var_im) / n).sqrt(),
            samples: self.count,
            rejected: self.rejected,
        }
    }
}

/// Run one closure per shard index. Parallel when the `parallel` feature is
/// enabled; the sequential path produces the same output in the same order.
#[cfg(feature = "parallel")]
pub fn run_shards<T: Send, F: Fn(usize) -> T + Sync + Send>(shards: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..shards).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_shards<T: Send, F: Fn(usize) -> T + Sync + Send>(shards: usize, f: F) -> Vec<T> {
    run_shards_sequential(shards, f)
}

/// Sequential shard runner, kept unconditionally for benchmarks and as the
/// fallback when `parallel` is disabled.
pub fn run_shards_sequential<T: Send, F: Fn(usize) -> T + Sync + Send>(shards: usize, f: F) -> Vec<T> {
    (0..shards).map(f).collect()
}

fn shard_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean of `integrand` over the unit cube [0,1)^dim.
///
/// `stream_offset` separates independent uses of the same seed (per diagram,
/// per coefficient); the integrand may return `None` to reject a sample
/// (rejections are counted and kept out of the mean).
pub fn cube_mean(
    cfg: &QuadratureConfig,
    dim: usize,
    stream_offset: u64,
    integrand: impl Fn(&[f64]) -> Option<Complex64> + Sync,
) -> Estimate {
    let mut samples = cfg.samples;
    let mut rounds: u32 = 0;
    loop {
        let est = cube_mean_once(
            cfg,
            dim,
            stream_offset.wrapping_add((rounds as u64) << 56),
            samples,
            &integrand,
        );
        if cfg.target_rel_err <= 0.0
            || est.est_err <= cfg.target_rel_err * est.value.norm()
            || rounds >= 4
        {
            return est;
        }
        samples *= 2;
        rounds += 1;
    }
}

fn cube_mean_once(
    cfg: &QuadratureConfig,
    dim: usize,
    stream_offset: u64,
    samples: u64,
    integrand: &(impl Fn(&[f64]) -> Option<Complex64> + Sync),
) -> Estimate {
    let shards = cfg.shards.max(1);
    let per_shard = samples / shards;
    let remainder = samples % shards;
    let accums = run_shards(shards as usize, |s| {
        let s = s as u64;
        let n = per_shard + u64::from(s < remainder);
        let mut acc = Accum::default();
        let mut point = vec![0.0f64; dim];
        match cfg.method {
            QuadMethod::MonteCarlo => {
                let mut rng = shard_rng(cfg.seed, stream_offset.wrapping_add(s));
                for _ in 0..n {
                    for x in point.iter_mut() {
                        *x = rng.gen::<f64>();
                    }
                    match integrand(&point) {
                        Some(v) => acc.push(v),
                        None => acc.rejected += 1,
                    }
                }
            }
            QuadMethod::Sobol => {
                let sobol_seed = (cfg.seed ^ stream_offset) as u32;
                let base = s * per_shard.max(1);
                for i in 0..n {
                    let idx = (base + i) as u32;
                    for (d, x) in point.iter_mut().enumerate() {
                        *x = f64::from(sobol_burley::sample(idx, d as u32, sobol_seed));
                    }
                    match integrand(&point) {
                        Some(v) => acc.push(v),
                        None => acc.rejected += 1,
                    }
                }
            }
        }
        acc
    });
    let mut total = Accum::default();
    for a in &accums {
        total.merge(a);
    }
    total.finish()
}

/// Mean over sorted samples of the ordered simplex 0 ≤ t_1 ≤ … ≤ t_n ≤ 1.
///
/// Draws n uniforms and sorts ascending; the simplex volume 1/n! is NOT
/// applied here — callers multiply.
pub fn simplex_mean(
    cfg: &QuadratureConfig,
    n: usize,
    stream_offset: u64,
    integrand: impl Fn(&[f64]) -> Option<Complex64> + Sync,
) -> Estimate {
    cube_mean(cfg, n, stream_offset, |point| {
        let mut sorted: smallbuf::Buf = smallbuf::Buf::from_slice(point);
        sorted
            .as_mut()
            .sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        integrand(sorted.as_ref())
    })
}

/// Tiny fixed-capacity buffer to avoid per-sample allocation when sorting.
mod smallbuf {
    pub struct Buf {
        data: [f64; 16],
        len: usize,
    }

    impl Buf {
        pub fn from_slice(s: &[f64]) -> Buf {
            assert!(s.len() <= 16);
            let mut data = [0.0; 16];
            data[..s.len()].copy_from_slice(s);
            Buf { data, len: s.len() }
        }

        pub fn as_mut(&mut self) -> &mut [f64] {
            &mut self.data[..self.len]
        }

        pub fn as_ref(&self) -> &[f64] {
            &self.data[..self.len]
        }
    }
}

/// Nodes and weights of 16-point Gauss-Legendre quadrature on [-1, 1],
/// computed once by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre_16() -> (&'static [f64; 16], &'static [f64; 16]) {
    static TABLE: Lazy<([f64; 16], [f64; 16])> = Lazy::new(|| {
        let n = 16usize;
        let mut nodes = [0.0; 16];
        let mut weights = [0.0; 16];
        for i in 0..n {
            // Chebyshev-based initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    });
    (&TABLE.0, &TABLE.1)
}

/// Legendre polynomial P_n(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
