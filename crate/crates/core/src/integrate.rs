//! Monte Carlo evaluation of iterated Cauchy-kernel integrals (χ) and
//! cyclically-ordered analytic factors over simplex domains.
//!
//! Conventions: a sorted uniform sample of the cube gives one point of the
//! ordered simplex t₁ ≤ … ≤ t_n (volume 1/n! applied by the caller-facing
//! functions here, not by the sampler). Cyclic domains are evaluated as the
//! sum over the n cyclic relabelings of a single sorted sample, which
//! enforces the orbit symmetry sample-by-sample.

use num_complex::Complex64;

use crate::diagrams::FeynmanDiagram;
use crate::error::{Error, Result};
use crate::geometry::{Contour, PointClass, RegionMask, Surface, CHART_RADIUS_MAX};
use crate::propagators::{GaugeChoice, Normalization, PropagatorKernel};
use crate::quad::{cube_mean, simplex_mean, Estimate, QuadratureConfig};

const TWO_PI_I: Complex64 = Complex64::new(0.0, std::f64::consts::TAU);

/// Fraction of the contour diameter treated as the near-contour exclusion
/// band for χ evaluation points and region samples.
pub const EXCLUSION_FRACTION: f64 = 1e-3;

/// Hard cap on the χ-oracle and sphere-covariance orders; the closed-form
/// reasoning behind both breaks down past n = 2.
pub const ORACLE_ORDER_CAP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    PathOrdered,
    CyclicOrdered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderedDomain {
    pub n: usize,
    pub kind: DomainKind,
}

impl OrderedDomain {
    pub fn path(n: usize) -> OrderedDomain {
        OrderedDomain {
            n,
            kind: DomainKind::PathOrdered,
        }
    }

    pub fn cyclic(n: usize) -> OrderedDomain {
        OrderedDomain {
            n,
            kind: DomainKind::CyclicOrdered,
        }
    }
}

/// A numerical value with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy)]
pub struct ChiEvaluation {
    pub value: Complex64,
    pub est_err: f64,
    pub samples: u64,
    /// Samples discarded by exclusion bands (bias bound, reported upward).
    pub rejected: u64,
}

impl From<Estimate> for ChiEvaluation {
    fn from(e: Estimate) -> ChiEvaluation {
        ChiEvaluation {
            value: e.value,
            est_err: e.est_err,
            samples: e.samples,
            rejected: e.rejected,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Deterministic per-diagram RNG substream separator.
fn diagram_stream(d: &FeynmanDiagram) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &(a, b) in &d.pairs {
        h = h.wrapping_mul(0x100000001b3) ^ (a as u64).wrapping_shl(8) ^ b as u64;
    }
    h << 16 >> 8 // leave headroom for round offsets in the high byte
}

/// χ over the ordered (or cyclically ordered) n-point domain:
/// (1/(2πi)ⁿ) ∫ Π_k γ̇(t_k)/(z_k − γ(t_k)) dt, with `points` listed as
/// (z_n, …, z_1) so z_k pairs with t_k, t₁ ≤ … ≤ t_n.
pub fn chi(
    contour: &Contour,
    points: &[Complex64],
    domain: OrderedDomain,
    cfg: &QuadratureConfig,
) -> Result<ChiEvaluation> {
    let n = domain.n;
    if n == 0 || points.len() != n {
        return Err(Error::InvalidParameter(format!(
            "chi needs n = {n} points, got {}",
            points.len()
        )));
    }
    let exclusion = EXCLUSION_FRACTION * contour.diameter();
    for &z in points {
        let dist = contour.distance_to(z);
        if dist <= exclusion {
            return Err(Error::PointOnContour {
                re: z.re,
                im: z.im,
                dist,
            });
        }
    }
    // z for ascending time index k (0-based) is points[n-1-k]
    let z_asc: Vec<Complex64> = points.iter().rev().copied().collect();
    let est = simplex_mean(cfg, n, 0x5ec7, |ts| {
        let samples: Vec<(Complex64, Complex64)> = ts.iter().map(|&t| contour.sample(t)).collect();
        let one_rotation = |r: usize| -> Complex64 {
            let mut prod = Complex64::new(1.0, 0.0);
            for (k, &z) in z_asc.iter().enumerate() {
                let (p, dp) = samples[(k + r) % n];
                prod *= dp / (z - p);
            }
            prod
        };
        let total = match domain.kind {
            DomainKind::PathOrdered => one_rotation(0),
            DomainKind::CyclicOrdered => (0..n).map(one_rotation).sum(),
        };
        Some(total)
    });
    let norm = (Complex64::new(1.0, 0.0) / TWO_PI_I).powu(n as u32) / factorial(n);
    let mut out = ChiEvaluation::from(est);
    out.value *= norm;
    out.est_err *= norm.norm();
    Ok(out)
}

/// Cyclically-ordered analytic factor of a diagram:
/// (1/2n) ∫ over the cyclic 2n-point domain of Π over pairs (i,j) of
/// p̂(γ(t_i), γ(t_j))·γ̇₊(t_i)·γ̇₊(t_j).
pub fn analytic_factor(
    contour: &Contour,
    surface: &Surface,
    gauge: GaugeChoice,
    d: &FeynmanDiagram,
    cfg: &QuadratureConfig,
) -> Result<ChiEvaluation> {
    let n = d.n;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "analytic factor needs order n >= 1".into(),
        ));
    }
    if matches!(surface, Surface::PlaneWithDensity { .. }) {
        return Err(Error::Unsupported(
            "plane densities enter only through areas; kernels exist for the \
             standard plane and the round sphere"
                .into(),
        ));
    }
    let normalization = if surface.is_plane() {
        Normalization::Raw
    } else {
        Normalization::HatNormalized
    };
    let kernel = PropagatorKernel::new(surface, gauge, normalization)?;
    let m = 2 * n;
    let est = simplex_mean(cfg, m, diagram_stream(d), |ts| {
        let samples: Vec<(Complex64, Complex64)> = ts.iter().map(|&t| contour.sample(t)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for r in 0..m {
            let mut prod = Complex64::new(1.0, 0.0);
            let mut ok = true;
            for &(i, j) in &d.pairs {
                let (zi, dzi) = samples[(i - 1 + r) % m];
                let (zj, dzj) = samples[(j - 1 + r) % m];
                match kernel.eval(zi, zj) {
                    Ok(p) => {
                        prod *= p * kernel.tangent_plus(dzi) * kernel.tangent_plus(dzj);
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                return None;
            }
            total += prod;
        }
        Some(total)
    });
    let scale = 1.0 / (factorial(m) * m as f64);
    let mut out = ChiEvaluation::from(est);
    out.value *= scale;
    out.est_err *= scale;
    Ok(out)
}

/// Independent oracle for plane holomorphic analytic factors at n ≤ 2:
/// the factor equals (1/2n)·∫_{ℂⁿ} χ with arguments identified per the
/// matching, and the χ closed form reduces the integrand to
/// 1/(2n−1)! × [all sample points inside R]. Estimated by rejection sampling
/// on the 10%-padded bounding box.
pub fn analytic_factor_via_chi(
    contour: &Contour,
    cfg: &QuadratureConfig,
    d: &FeynmanDiagram,
) -> Result<ChiEvaluation> {
    let n = d.n;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "oracle needs order n >= 1".into(),
        ));
    }
    if n > ORACLE_ORDER_CAP {
        return Err(Error::CapExceeded {
            requested: n,
            cap: ORACLE_ORDER_CAP,
        });
    }
    let (lo, hi) = contour.bounding_box();
    let span = hi - lo;
    let pad = Complex64::new(0.05 * span.re, 0.05 * span.im);
    let (lo, hi) = (lo - pad, hi + pad);
    let span = hi - lo;
    let box_area = span.re * span.im;
    // the integrand here is a bounded indicator, so the exclusion band only
    // needs to cover the polyline's deviation from the true contour; keep it
    // far below the Monte Carlo error so the discard bias is negligible
    let mask = RegionMask::new(contour, 1e-4 * contour.diameter());
    let est = cube_mean(cfg, 2 * n, 0x0bac1e ^ diagram_stream(d), |u| {
        let mut all_inside = true;
        for k in 0..n {
            let z = Complex64::new(lo.re + u[2 * k] * span.re, lo.im + u[2 * k + 1] * span.im);
            match mask.classify(z) {
                PointClass::Band => return None,
                PointClass::Inside => {}
                PointClass::Outside => all_inside = false,
            }
        }
        Some(Complex64::new(if all_inside { 1.0 } else { 0.0 }, 0.0))
    });
    let m = 2 * n;
    let scale = box_area.powi(n as i32) / (factorial(m - 1) * m as f64);
    let mut out = ChiEvaluation::from(est);
    out.value *= scale;
    out.est_err *= scale;
    Ok(out)
}

/// Closed-form cyclically-ordered analytic factor ρⁿ/(2n)! shared by every
/// diagram of order n for circles with rotationally symmetric density.
pub fn sphere_circle_factor(n: usize, rho: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(0.0..=0.25).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in [0, 1/4], got {rho}"
        )));
    }
    Ok(rho.powi(n as i32) / factorial(2 * n))
}

/// Draw a point of the round sphere, uniform in the normalized area measure
/// d̂σ = (1/π) d²z/(1+|z|²)², from two unit uniforms.
fn sphere_chart_point(v: f64, b: f64) -> Option<Complex64> {
    if v >= 1.0 - 1e-12 {
        return None;
    }
    let r = (v / (1.0 - v)).sqrt();
    if r > CHART_RADIUS_MAX {
        return None;
    }
    Some(Complex64::from_polar(r, std::f64::consts::TAU * b))
}

/// γ and γ̇ tabulated on a uniform parameter grid, with the closing point
/// repeated so cumulative quadrature runs over the full period.
fn contour_grid(contour: &Contour, m_grid: usize) -> Vec<(Complex64, Complex64)> {
    let mut grid: Vec<(Complex64, Complex64)> = (0..m_grid)
        .map(|j| contour.sample(j as f64 / m_grid as f64))
        .collect();
    grid.push(grid[0]);
    grid
}

/// χ over the cyclic m-point domain for fixed arguments, by cumulative
/// trapezoid quadrature of the iterated integral on a contour grid.
///
/// The path-ordered integral is the last value of the nested cumulative
/// F_k(t) = ∫₀ᵗ f_k F_{k−1}; the cyclic value sums the m rotations of the
/// argument assignment. Deterministic — the only error is discretization,
/// controlled by choosing the grid fine against the exclusion band.
fn chi_cyclic_on_grid(grid: &[(Complex64, Complex64)], args: &[Complex64]) -> Complex64 {
    let m = args.len();
    let pts = grid.len();
    let h = 1.0 / (pts - 1) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev = vec![Complex64::new(0.0, 0.0); pts];
    let mut cur = vec![Complex64::new(0.0, 0.0); pts];
    for r in 0..m {
        prev.iter_mut().for_each(|v| *v = Complex64::new(1.0, 0.0));
        for k in 0..m {
            let z = args[(k + m - r) % m];
            cur[0] = Complex64::new(0.0, 0.0);
            let mut g_prev = grid[0].1 / (z - grid[0].0) * prev[0];
            for j in 1..pts {
                let g = grid[j].1 / (z - grid[j].0) * prev[j];
                cur[j] = cur[j - 1] + (g_prev + g) * (0.5 * h);
                g_prev = g;
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        total += prev[pts - 1];
    }
    total * (Complex64::new(1.0, 0.0) / TWO_PI_I).powu(m as u32)
}

/// Nested covariance of χ in the matched entries under the normalized round
/// measure: cov_{i₁j₁}⋯cov_{iₙjₙ}(χ_{γ̃^{2n}_ord}).
///
/// Monte Carlo runs over sphere points only; for each sampled tuple the
/// covariance expands into 2ⁿ coincident/split argument patterns with signs
/// (−1)^{#split}, and each pattern's χ is evaluated by deterministic grid
/// quadrature, keeping the per-sample values logarithmically bounded. Equals
/// 2n × the analytic factor for circles; exploratory elsewhere.
pub fn sphere_cov_chi(
    contour: &Contour,
    surface: &Surface,
    d: &FeynmanDiagram,
    cfg: &QuadratureConfig,
) -> Result<ChiEvaluation> {
    if !matches!(surface, Surface::SphereRound { .. }) {
        return Err(Error::Unsupported(
            "sphere_cov_chi requires a SphereRound surface".into(),
        ));
    }
    let n = d.n;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if n > ORACLE_ORDER_CAP {
        return Err(Error::CapExceeded {
            requested: n,
            cap: ORACLE_ORDER_CAP,
        });
    }
    let m = 2 * n;
    let band = EXCLUSION_FRACTION * contour.diameter();
    let mask = RegionMask::new(contour, band);
    // resolve the sharpest feature scale band/|γ̇| with several grid points
    let max_speed = (0..512)
        .map(|j| contour.sample(j as f64 / 512.0).1.norm())
        .fold(0.0, f64::max);
    let m_grid = ((8.0 * max_speed / band) as usize)
        .next_power_of_two()
        .clamp(1 << 12, 1 << 15);
    let grid = contour_grid(contour, m_grid);
    let est = cube_mean(cfg, 4 * n, 0x0c0c ^ diagram_stream(d), |u| {
        // a coincident point and a split partner per pair
        let mut pts = [Complex64::new(0.0, 0.0); 4];
        for k in 0..2 * n {
            let z = sphere_chart_point(u[2 * k], u[2 * k + 1])?;
            if mask.classify(z) == PointClass::Band {
                return None;
            }
            pts[k] = z;
        }
        let mut total = Complex64::new(0.0, 0.0);
        let mut args = [Complex64::new(0.0, 0.0); 4];
        for subset in 0..(1u32 << n) {
            let sign = if subset.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            for (k, &(i, j)) in d.pairs.iter().enumerate() {
                let u_k = pts[2 * k];
                let split = subset & (1 << k) != 0;
                args[i - 1] = u_k;
                args[j - 1] = if split { pts[2 * k + 1] } else { u_k };
            }
            total += chi_cyclic_on_grid(&grid, &args[..m]) * sign;
        }
        Some(total)
    });
    Ok(ChiEvaluation::from(est))
}
