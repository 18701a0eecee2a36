//! Dense square complex matrices, just large enough for Lie-algebra work.
//!
//! The matrices here are small (N ≤ 6 in practice), so everything is a plain
//! row-major `Vec<Complex64>` with naive O(N³) multiplication.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        CMat {
            n: self.n,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &CMat) -> CMat {
        self.mul(other).sub(&other.mul(self))
    }

    /// Max-abs entry, used for scalar-matrix and convergence checks.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor series.
    ///
    /// The input is scaled by 2^-s until its norm is below 0.5, the series is
    /// summed to machine precision, and the result squared back up.
    pub fn exp(&self) -> CMat {
        let norm = self.frobenius_norm();
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = self.scale(Complex64::new(0.5f64.powi(s as i32), 0.0));
        let mut sum = CMat::identity(self.n);
        let mut term = CMat::identity(self.n);
        for k in 1..=40 {
            term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        let mut out = sum;
        for _ in 0..s {
            out = out.mul(&out);
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}
