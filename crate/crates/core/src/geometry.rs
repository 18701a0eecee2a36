//! Oriented closed contours on the plane chart ℂ and the stereographic chart
//! of S², with areas, winding numbers and smooth deformations.
//!
//! Contours are lists of parametric pieces with exact tangents. The global
//! parametrization is uniform concatenation: piece `j` of `m` covers
//! `[j/m, (j+1)/m]`, with no arclength reparametrization.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre_16;

const TAU: f64 = std::f64::consts::TAU;

/// Default chart bound for sphere work; contours through the north pole are
/// rejected upstream of the kernel formulas.
pub const CHART_RADIUS_MAX: f64 = 1e6;

/// One parametric segment `u ∈ [0,1] → ℂ` with an exact tangent map.
#[derive(Debug, Clone)]
pub enum Piece {
    /// `center + radius·e^{i(start_angle + sweep·u)}`
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// Polynomial `Σ coeffs[k]·u^k`.
    Poly { coeffs: Vec<Complex64> },
    /// Truncated Fourier loop `Σ a_k e^{2πi k u}` over `(k, a_k)` pairs.
    Fourier { coeffs: Vec<(i64, Complex64)> },
}

impl Piece {
    pub fn point(&self, u: f64) -> Complex64 {
        match self {
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + Complex64::from_polar(*radius, start_angle + sweep * u),
            Piece::Poly { coeffs } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    acc = acc * u + c;
                }
                acc
            }
            Piece::Fourier { coeffs } => coeffs
                .iter()
                .map(|&(k, a)| a * Complex64::from_polar(1.0, TAU * k as f64 * u))
                .sum(),
        }
    }

    pub fn tangent(&self, u: f64) -> Complex64 {
        match self {
            Piece::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => {
                Complex64::new(0.0, *sweep)
                    * Complex64::from_polar(*radius, start_angle + sweep * u)
            }
            Piece::Poly { coeffs } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * u + c * k as f64;
                }
                acc
            }
            Piece::Fourier { coeffs } => coeffs
                .iter()
                .map(|&(k, a)| {
                    a * Complex64::new(0.0, TAU * k as f64)
                        * Complex64::from_polar(1.0, TAU * k as f64 * u)
                })
                .sum(),
        }
    }

    fn transformed(&self, a: Complex64, b: Complex64) -> Piece {
        match self {
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Piece::Arc {
                center: a * center + b,
                radius: radius * a.norm(),
                start_angle: start_angle + a.arg(),
                sweep: *sweep,
            },
            Piece::Poly { coeffs } => {
                let mut c: Vec<Complex64> = coeffs.iter().map(|&x| a * x).collect();
                if c.is_empty() {
                    c.push(Complex64::new(0.0, 0.0));
                }
                c[0] += b;
                Piece::Poly { coeffs: c }
            }
            Piece::Fourier { coeffs } => {
                let mut c: Vec<(i64, Complex64)> =
                    coeffs.iter().map(|&(k, x)| (k, a * x)).collect();
                if let Some(zero) = c.iter_mut().find(|(k, _)| *k == 0) {
                    zero.1 += b;
                } else {
                    c.push((0, b));
                }
                Piece::Fourier { coeffs: c }
            }
        }
    }

    /// Reparametrize by `u → 1-u`.
    fn reversed(&self) -> Piece {
        match self {
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Piece::Arc {
                center: *center,
                radius: *radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
            Piece::Poly { coeffs } => {
                // Σ c_k (1-u)^k re-expanded in u by binomial expansion.
                let n = coeffs.len();
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (k, &c) in coeffs.iter().enumerate() {
                    let mut binom = 1.0;
                    for (j, o) in out.iter_mut().enumerate().take(k + 1) {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        *o += c * sign * binom;
                        binom = binom * (k - j) as f64 / (j + 1) as f64;
                    }
                }
                Piece::Poly { coeffs: out }
            }
            Piece::Fourier { coeffs } => Piece::Fourier {
                coeffs: coeffs
                    .iter()
                    .map(|&(k, a)| (-k, a * Complex64::from_polar(1.0, TAU * k as f64)))
                    .collect(),
            },
        }
    }
}

/// Oriented closed piecewise-smooth contour in a surface chart.
///
/// `overlays` hold trig-interpolant deformations in the global parameter `t`;
/// they keep exact tangents for deformed contours.
#[derive(Debug, Clone)]
pub struct Contour {
    pieces: Vec<Piece>,
    overlays: Vec<(i64, Complex64)>,
    pub closure_tolerance: f64,
}

impl Contour {
    /// Build a contour, checking junction closure and nonvanishing tangents
    /// on a sample grid.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        assert!(!pieces.is_empty());
        let mut scale = 0.0f64;
        for p in &pieces {
            for i in 0..=8 {
                scale = scale.max(p.point(i as f64 / 8.0).norm());
            }
        }
        let closure_tolerance = 1e-9 * scale.max(1.0);
        let m = pieces.len();
        for j in 0..m {
            let end = pieces[j].point(1.0);
            let start = pieces[(j + 1) % m].point(0.0);
            let gap = (end - start).norm();
            if gap > closure_tolerance {
                return Err(Error::NotClosed {
                    gap,
                    tolerance: closure_tolerance,
                });
            }
        }
        for p in &pieces {
            for i in 0..=32 {
                let u = i as f64 / 32.0;
                if p.tangent(u).norm() < 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "vanishing tangent at piece parameter u = {u}"
                    )));
                }
            }
        }
        Ok(Contour {
            pieces,
            overlays: Vec::new(),
            closure_tolerance,
        })
    }

    pub fn circle(center: Complex64, radius: f64) -> Contour {
        Contour::new(vec![Piece::Arc {
            center,
            radius,
            start_angle: 0.0,
            sweep: TAU,
        }])
        .expect("circle is closed")
    }

    /// Axis-aligned ellipse `a cos 2πt + i b sin 2πt` centered at the origin.
    pub fn ellipse(a: f64, b: f64) -> Contour {
        Contour::new(vec![Piece::Fourier {
            coeffs: vec![
                (1, Complex64::new((a + b) / 2.0, 0.0)),
                (-1, Complex64::new((a - b) / 2.0, 0.0)),
            ],
        }])
        .expect("ellipse is closed")
    }

    /// Closed loop `γ(t) = Σ a_k e^{2πi k t}` from `(k, a_k)` pairs.
    pub fn fourier(coeffs: Vec<(i64, Complex64)>) -> Result<Contour> {
        Contour::new(vec![Piece::Fourier { coeffs }])
    }

    /// Polygon through `vertices` (CCW), optionally rounding each corner
    /// with an arc of radius `rounding` tangent to both incident edges.
    pub fn polygon(vertices: &[Complex64], rounding: f64) -> Result<Contour> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if rounding == 0.0 {
            return Err(Error::InvalidParameter(
                "corner_rounding must be positive: cusps and exact corners have \
                 vanishing-tangent junctions under the Arc/Poly representation; \
                 use a small rounding radius"
                    .into(),
            ));
        }
        let mut pieces = Vec::new();
        // tangent offsets q_i at each vertex
        let mut offsets = Vec::with_capacity(n);
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let v = vertices[i];
            let next = vertices[(i + 1) % n];
            let e_in = (v - prev) / (v - prev).norm();
            let e_out = (next - v) / (next - v).norm();
            let turn = (e_out / e_in).arg();
            let q = rounding * (turn.abs() / 2.0).tan();
            offsets.push((e_in, e_out, turn, q));
        }
        for i in 0..n {
            let v = vertices[i];
            let next = vertices[(i + 1) % n];
            let (e_in, e_out, turn, q) = offsets[i];
            // corner arc at vertex i
            let p1 = v - e_in * q;
            let normal_sign = if turn >= 0.0 { 1.0 } else { -1.0 };
            let n1 = e_in * Complex64::new(0.0, normal_sign);
            let center = p1 + n1 * rounding;
            let start_angle = (p1 - center).arg();
            pieces.push(Piece::Arc {
                center,
                radius: rounding,
                start_angle,
                sweep: turn,
            });
            // straight edge from this corner's exit to the next corner's entry
            let p2 = v + e_out * q;
            let q_next = offsets[(i + 1) % n].3;
            let p3 = next - e_out * q_next;
            pieces.push(Piece::Poly {
                coeffs: vec![p2, p3 - p2],
            });
        }
        Contour::new(pieces)
    }

    /// Rounded axis-aligned square of the given side length, centered at the origin.
    pub fn rounded_square(side: f64, rounding: f64) -> Contour {
        let h = side / 2.0;
        Contour::polygon(
            &[
                Complex64::new(h, -h),
                Complex64::new(h, h),
                Complex64::new(-h, h),
                Complex64::new(-h, -h),
            ],
            rounding,
        )
        .expect("square is a valid polygon")
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    fn overlay_point(&self, t: f64) -> Complex64 {
        self.overlays
            .iter()
            .map(|&(k, b)| b * Complex64::from_polar(1.0, TAU * k as f64 * t))
            .sum()
    }

    fn overlay_tangent(&self, t: f64) -> Complex64 {
        self.overlays
            .iter()
            .map(|&(k, b)| {
                b * Complex64::new(0.0, TAU * k as f64)
                    * Complex64::from_polar(1.0, TAU * k as f64 * t)
            })
            .sum()
    }

    /// γ(t) and dγ/dt under the concatenated parametrization, t ∈ [0,1).
    ///
    /// At a junction `t = j/m` the tangent is that of the incoming piece
    /// (left-limit convention); `t = 0` uses the first piece.
    pub fn sample(&self, t: f64) -> (Complex64, Complex64) {
        let m = self.pieces.len() as f64;
        let scaled = t * m;
        let mut j = scaled.floor() as usize;
        let mut u = scaled - j as f64;
        if j >= self.pieces.len() {
            j = self.pieces.len() - 1;
            u = 1.0;
        } else if u == 0.0 && j > 0 {
            j -= 1;
            u = 1.0;
        }
        let p = &self.pieces[j];
        let mut point = p.point(u);
        let mut tangent = p.tangent(u) * m;
        if !self.overlays.is_empty() {
            point += self.overlay_point(t);
            tangent += self.overlay_tangent(t);
        }
        (point, tangent)
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.sample(t).0
    }

    /// Orientation-reversed copy.
    pub fn reversed(&self) -> Contour {
        let pieces: Vec<Piece> = self.pieces.iter().rev().map(|p| p.reversed()).collect();
        let overlays = self
            .overlays
            .iter()
            .map(|&(k, b)| (-k, b))
            .collect();
        Contour {
            pieces,
            overlays,
            closure_tolerance: self.closure_tolerance,
        }
    }

    /// Image under `z → a·z + b`.
    pub fn transformed(&self, a: Complex64, b: Complex64) -> Contour {
        Contour {
            pieces: self.pieces.iter().map(|p| p.transformed(a, b)).collect(),
            overlays: self.overlays.iter().map(|&(k, x)| (k, a * x)).collect(),
            closure_tolerance: self.closure_tolerance * a.norm().max(1e-300),
        }
    }

    pub fn translated(&self, b: Complex64) -> Contour {
        self.transformed(Complex64::new(1.0, 0.0), b)
    }

    pub fn dilated(&self, s: f64) -> Contour {
        self.transformed(Complex64::new(s, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Bounding box as (min corner, max corner), from a dense sample.
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..1024 {
            let z = self.point(i as f64 / 1024.0);
            lo.re = lo.re.min(z.re);
            lo.im = lo.im.min(z.im);
            hi.re = hi.re.max(z.re);
            hi.im = hi.im.max(z.im);
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    pub fn max_chart_radius(&self) -> f64 {
        (0..1024)
            .map(|i| self.point(i as f64 / 1024.0).norm())
            .fold(0.0, f64::max)
    }

    /// Approximate distance from `z` to the contour: dense sample plus a
    /// local golden-section refinement around the best parameter.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let m = 512;
        let mut best = f64::INFINITY;
        let mut best_t = 0.0;
        for i in 0..m {
            let t = i as f64 / m as f64;
            let d = (self.point(t) - z).norm();
            if d < best {
                best = d;
                best_t = t;
            }
        }
        let mut a = best_t - 1.0 / m as f64;
        let mut b = best_t + 1.0 / m as f64;
        for _ in 0..40 {
            let m1 = a + (b - a) * 0.382;
            let m2 = a + (b - a) * 0.618;
            let f1 = (self.point(m1.rem_euclid(1.0)) - z).norm();
            let f2 = (self.point(m2.rem_euclid(1.0)) - z).norm();
            if f1 < f2 {
                b = m2;
                best = best.min(f1);
            } else {
                a = m1;
                best = best.min(f2);
            }
        }
        best
    }

    /// Tolerance band treated as "on contour" for winding tests.
    pub fn on_contour_tolerance(&self) -> f64 {
        1e-9 * self.diameter().max(1.0)
    }

    /// Winding number about `z` by quadrature of the Cauchy index.
    ///
    /// Sign convention: counterclockwise contours give +1 for interior
    /// points. This equals `-(2πi)·χ_γ(z)` at n = 1 conjugated, i.e. the
    /// n = 1 kernel function satisfies `χ_γ(z) = -winding` for the contour
    /// orientation used here.
    pub fn winding_number(&self, z: Complex64) -> Result<i64> {
        let tol = self.on_contour_tolerance();
        let dist = self.distance_to(z);
        if dist <= tol {
            return Err(Error::PointOnContour {
                re: z.re,
                im: z.im,
                dist,
            });
        }
        let f = |t: f64| {
            let (p, dp) = self.sample(t);
            (dp / (p - z)).im
        };
        let mut subs = (self.pieces.len() * 4).max(16);
        let mut prev = composite_gl(&f, subs) / TAU;
        loop {
            subs *= 2;
            let cur = composite_gl(&f, subs) / TAU;
            if (cur - prev).abs() < 0.2 || subs > 1 << 14 {
                let w = cur.round();
                return Ok(w as i64);
            }
            prev = cur;
        }
    }

    /// Whether the chart signed area is positive.
    pub fn is_counterclockwise(&self) -> bool {
        self.chart_signed_area() > 0.0
    }

    /// Green's-theorem signed area in the flat chart: (1/2)∮(x dy − y dx).
    pub fn chart_signed_area(&self) -> f64 {
        let f = |t: f64| {
            let (p, dp) = self.sample(t);
            (p.conj() * dp).im
        };
        let mut subs = (self.pieces.len() * 4).max(16);
        let scale = self.diameter().powi(2).max(1e-30);
        let mut prev = composite_gl(&f, subs) / 2.0;
        loop {
            subs *= 2;
            let cur = composite_gl(&f, subs) / 2.0;
            if (cur - prev).abs() < 1e-11 * scale || subs > 1 << 15 {
                return cur;
            }
            prev = cur;
        }
    }

    /// Deform by `t ↦ γ(t) + s·field(γ(t))`, returning a new contour.
    ///
    /// The field is projected onto a 256-mode trig interpolant in `t` so the
    /// deformed contour keeps an exact tangent. Errors if the deformed
    /// contour enters the exclusion disks around `avoid` points.
    pub fn deform(
        &self,
        field: &dyn Fn(Complex64) -> Complex64,
        s: f64,
        avoid: &[Complex64],
        exclusion: f64,
    ) -> Result<Contour> {
        const M: usize = 256;
        let samples: Vec<Complex64> = (0..M)
            .map(|j| field(self.point(j as f64 / M as f64)))
            .collect();
        let mut coeffs: Vec<(i64, Complex64)> = Vec::new();
        let max_mag = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for k in -(M as i64 / 2 - 1)..=(M as i64 / 2 - 1) {
            let mut b = Complex64::new(0.0, 0.0);
            for (j, &v) in samples.iter().enumerate() {
                b += v * Complex64::from_polar(1.0, -TAU * k as f64 * j as f64 / M as f64);
            }
            b /= M as f64;
            if b.norm() > 1e-13 * max_mag.max(1e-300) {
                coeffs.push((k, b * s));
            }
        }
        let mut deformed = self.clone();
        for (k, b) in coeffs {
            if let Some(existing) = deformed.overlays.iter_mut().find(|(kk, _)| *kk == k) {
                existing.1 += b;
            } else {
                deformed.overlays.push((k, b));
            }
        }
        for &p in avoid {
            if deformed.distance_to(p) < exclusion {
                return Err(Error::SingularityCrossed { re: p.re, im: p.im });
            }
        }
        Ok(deformed)
    }

    /// Pairwise intersection test on a polyline approximation. The check is
    /// configurable strictness: callers decide when to invoke it.
    pub fn check_simple(&self, resolution: usize) -> Result<()> {
        let pts: Vec<Complex64> = (0..resolution)
            .map(|i| self.point(i as f64 / resolution as f64))
            .collect();
        let n = pts.len();
        for i in 0..n {
            let (a1, a2) = (pts[i], pts[(i + 1) % n]);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // adjacent through wraparound
                }
                let (b1, b2) = (pts[j], pts[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return Err(Error::NonSimple {
                        t1: i as f64 / n as f64,
                        t2: j as f64 / n as f64,
                    });
                }
            }
        }
        Ok(())
    }

    /// Fast point locator for bulk winding / distance queries.
    pub fn locator(&self, segments: usize) -> PointLocator {
        PointLocator::new(self, segments)
    }
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segments_intersect(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Composite 16-point Gauss-Legendre quadrature of `f` over [0,1].
fn composite_gl(f: &dyn Fn(f64) -> f64, subdivisions: usize) -> f64 {
    let (nodes, weights) = gauss_legendre_16();
    let h = 1.0 / subdivisions as f64;
    let mut total = 0.0;
    for s in 0..subdivisions {
        let a = s as f64 * h;
        for (&x, &w) in nodes.iter().zip(weights.iter()) {
            total += w * f(a + h * 0.5 * (x + 1.0));
        }
    }
    total * h * 0.5
}

/// Polyline-based winding and distance queries, for Monte Carlo point masses.
#[derive(Debug, Clone)]
pub struct PointLocator {
    pts: Vec<Complex64>,
}

impl PointLocator {
    pub fn new(contour: &Contour, segments: usize) -> Self {
        let pts = (0..segments)
            .map(|i| contour.point(i as f64 / segments as f64))
            .collect();
        PointLocator { pts }
    }

    /// Signed crossing-number winding of the polyline about `z`.
    pub fn winding(&self, z: Complex64) -> i64 {
        let mut w = 0i64;
        let n = self.pts.len();
        for i in 0..n {
            let a = self.pts[i];
            let b = self.pts[(i + 1) % n];
            if a.im <= z.im {
                if b.im > z.im && cross(a, b, z) > 0.0 {
                    w += 1;
                }
            } else if b.im <= z.im && cross(a, b, z) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        let n = self.pts.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.pts[i];
            let b = self.pts[(i + 1) % n];
            best = best.min(point_segment_distance(z, a, b));
        }
        best
    }
}

/// Grid-accelerated interior test with a near-contour exclusion band.
///
/// Cells whose center is farther from the contour than the cell diagonal
/// plus the band are classified once at build time; only the thin layer of
/// boundary cells falls back to exact polyline queries per point.
#[derive(Debug, Clone)]
pub struct RegionMask {
    lo: Complex64,
    inv_cell: (f64, f64),
    n: usize,
    /// 1 inside, 0 outside, -1 near the boundary (exact fallback).
    cells: Vec<i8>,
    locator: PointLocator,
    band: f64,
}

/// Classification of a point against a [`RegionMask`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Inside,
    Outside,
    /// Within the exclusion band of the contour.
    Band,
}

impl RegionMask {
    pub fn new(contour: &Contour, band: f64) -> RegionMask {
        let (lo, hi) = contour.bounding_box();
        let pad = 0.02 * (hi - lo).norm() + 2.0 * band;
        let lo = lo - Complex64::new(pad, pad);
        let hi = hi + Complex64::new(pad, pad);
        let n = 256usize;
        let locator = contour.locator(2048);
        let cell = ((hi.re - lo.re) / n as f64, (hi.im - lo.im) / n as f64);
        let diag = 0.5 * (cell.0 * cell.0 + cell.1 * cell.1).sqrt();
        let mut cells = vec![0i8; n * n];
        for j in 0..n {
            for i in 0..n {
                let z = Complex64::new(
                    lo.re + (i as f64 + 0.5) * cell.0,
                    lo.im + (j as f64 + 0.5) * cell.1,
                );
                cells[j * n + i] = if locator.distance(z) <= diag + band {
                    -1
                } else if locator.winding(z) == 1 {
                    1
                } else {
                    0
                };
            }
        }
        RegionMask {
            lo,
            inv_cell: (1.0 / cell.0, 1.0 / cell.1),
            n,
            cells,
            locator,
            band,
        }
    }

    pub fn classify(&self, z: Complex64) -> PointClass {
        let i = ((z.re - self.lo.re) * self.inv_cell.0).floor();
        let j = ((z.im - self.lo.im) * self.inv_cell.1).floor();
        if i < 0.0 || j < 0.0 || i >= self.n as f64 || j >= self.n as f64 {
            // the grid covers the contour bbox plus more than the band
            return PointClass::Outside;
        }
        match self.cells[j as usize * self.n + i as usize] {
            1 => PointClass::Inside,
            0 => PointClass::Outside,
            _ => {
                if self.locator.distance(z) < self.band {
                    PointClass::Band
                } else if self.locator.winding(z) == 1 {
                    PointClass::Inside
                } else {
                    PointClass::Outside
                }
            }
        }
    }
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a).re * ab.re + (z - a).im * ab.im) / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Area-form choice for the underlying surface chart.
#[derive(Clone)]
pub enum Surface {
    PlaneStandard,
    /// Standard plane form scaled by a density that equals 1 outside
    /// `|z| <= support_radius`.
    PlaneWithDensity {
        density: std::sync::Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
        support_radius: f64,
    },
    /// Round form scaled so the whole sphere has `total_area`.
    SphereRound { total_area: f64 },
}

impl std::fmt::Debug for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Surface::PlaneStandard => write!(f, "PlaneStandard"),
            Surface::PlaneWithDensity { support_radius, .. } => {
                write!(f, "PlaneWithDensity(support_radius={support_radius})")
            }
            Surface::SphereRound { total_area } => {
                write!(f, "SphereRound(total_area={total_area})")
            }
        }
    }
}

impl Surface {
    pub fn sphere(total_area: f64) -> Result<Surface> {
        if total_area <= 0.0 {
            return Err(Error::InvalidParameter("total_area must be > 0".into()));
        }
        Ok(Surface::SphereRound { total_area })
    }

    /// Chart density of the area form at `z`, per unit d²z.
    pub fn density(&self, z: Complex64) -> f64 {
        match self {
            Surface::PlaneStandard => 1.0,
            Surface::PlaneWithDensity { density, .. } => density(z),
            Surface::SphereRound { total_area } => {
                total_area / (std::f64::consts::PI * (1.0 + z.norm_sqr()).powi(2))
            }
        }
    }

    pub fn is_plane(&self) -> bool {
        !matches!(self, Surface::SphereRound { .. })
    }
}

/// Signed chart area on the standard plane, density-weighted area otherwise.
///
/// For `SphereRound` a clockwise contour is interpreted as bounding the
/// complement region through the point at infinity, so the two orientations'
/// areas sum to `total_area`.
pub fn signed_area(contour: &Contour, surface: &Surface) -> Result<f64> {
    match surface {
        Surface::PlaneStandard => Ok(contour.chart_signed_area()),
        Surface::PlaneWithDensity { .. } => {
            let chart = contour.chart_signed_area();
            let ccw = if chart >= 0.0 {
                contour.clone()
            } else {
                contour.reversed()
            };
            let a = density_area(&ccw, surface)?;
            Ok(if chart >= 0.0 { a } else { -a })
        }
        Surface::SphereRound { total_area } => {
            if contour.max_chart_radius() > CHART_RADIUS_MAX {
                return Err(Error::ChartOverflow {
                    modulus: contour.max_chart_radius(),
                    max: CHART_RADIUS_MAX,
                });
            }
            if contour.is_counterclockwise() {
                density_area(contour, surface)
            } else {
                let inner = density_area(&contour.reversed(), surface)?;
                Ok(total_area - inner)
            }
        }
    }
}

/// Density-weighted area of the region enclosed by a CCW contour: midpoint
/// grid over the bounding box masked by winding number, with resolution
/// doubling until the estimate settles.
fn density_area(contour: &Contour, surface: &Surface) -> Result<f64> {
    if !contour.is_counterclockwise() {
        return Err(Error::OrientationError);
    }
    let (lo, hi) = contour.bounding_box();
    let pad = 0.02 * (hi - lo).norm();
    let (lo, hi) = (
        lo - Complex64::new(pad, pad),
        hi + Complex64::new(pad, pad),
    );
    let locator = contour.locator(1024);
    let mut prev = f64::NAN;
    let mut n = 128usize;
    loop {
        let dx = (hi.re - lo.re) / n as f64;
        let dy = (hi.im - lo.im) / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(
                    lo.re + (i as f64 + 0.5) * dx,
                    lo.im + (j as f64 + 0.5) * dy,
                );
                if locator.winding(z) == 1 {
                    total += surface.density(z);
                }
            }
        }
        let area = total * dx * dy;
        if !prev.is_nan() && ((area - prev).abs() < 2e-4 * area.abs().max(1e-12) || n >= 2048) {
            // one Richardson step: midpoint-grid mask error is O(1/n)
            return Ok(2.0 * area - prev);
        }
        prev = area;
        n *= 2;
    }
}

/// Region of a surface bounded by a counterclockwise simple contour.
#[derive(Debug, Clone)]
pub struct Region {
    pub boundary: Contour,
    pub area: f64,
}

/// Strictness of the self-intersection check at region construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplicityCheck {
    Off,
    /// Pairwise test on a polyline of the given resolution.
    Polyline(usize),
}

impl Region {
    pub fn new(boundary: Contour, surface: &Surface, check: SimplicityCheck) -> Result<Region> {
        if !boundary.is_counterclockwise() {
            return Err(Error::OrientationError);
        }
        if let SimplicityCheck::Polyline(res) = check {
            boundary.check_simple(res)?;
        }
        let area = signed_area(&boundary, surface)?;
        Ok(Region { boundary, area })
    }
}

// ---------------------------------------------------------------------------
// File-format specs
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ContourSpec {
    Circle { center: [f64; 2], radius: f64 },
    Polygon {
        vertices: Vec<[f64; 2]>,
        corner_rounding: f64,
    },
    Fourier {
        coeffs_re: Vec<f64>,
        coeffs_im: Vec<f64>,
        /// Frequency of `coeffs[0]`; entry `i` has frequency `k_min + i`.
        #[serde(default)]
        k_min: i64,
    },
}

impl ContourSpec {
    pub fn build(&self) -> Result<Contour> {
        match self {
            ContourSpec::Circle { center, radius } => Ok(Contour::circle(
                Complex64::new(center[0], center[1]),
                *radius,
            )),
            ContourSpec::Polygon {
                vertices,
                corner_rounding,
            } => {
                let vs: Vec<Complex64> =
                    vertices.iter().map(|v| Complex64::new(v[0], v[1])).collect();
                Contour::polygon(&vs, *corner_rounding)
            }
            ContourSpec::Fourier {
                coeffs_re,
                coeffs_im,
                k_min,
            } => {
                if coeffs_re.len() != coeffs_im.len() {
                    return Err(Error::InvalidParameter(
                        "coeffs_re and coeffs_im must have equal length".into(),
                    ));
                }
                let coeffs = coeffs_re
                    .iter()
                    .zip(coeffs_im.iter())
                    .enumerate()
                    .map(|(i, (&re, &im))| (k_min + i as i64, Complex64::new(re, im)))
                    .collect();
                Contour::fourier(coeffs)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "surface", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Plane,
    PlaneDensity {
        /// Expression in `x`, `y` (e.g. `"1 + 0.5*exp(-(x^2+y^2))"`).
        density: String,
        /// Radius outside which the density must equal 1.
        #[serde(default = "default_support_radius")]
        support_radius: f64,
    },
    Sphere { total_area: f64 },
}

fn default_support_radius() -> f64 {
    10.0
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<Surface> {
        match self {
            SurfaceSpec::Plane => Ok(Surface::PlaneStandard),
            SurfaceSpec::PlaneDensity {
                density,
                support_radius,
            } => {
                let expr: meval::Expr = density
                    .parse()
                    .map_err(|e| Error::InvalidParameter(format!("density expr: {e}")))?;
                // bind2 captures an Rc context; evaluate with a fresh context
                // instead so the closure stays Send + Sync
                let f = move |x: f64, y: f64| {
                    let mut ctx = meval::Context::new();
                    ctx.var("x", x).var("y", y);
                    expr.eval_with_context(&ctx).unwrap_or(f64::NAN)
                };
                {
                    let probe = f(0.1, 0.2);
                    if !probe.is_finite() {
                        return Err(Error::InvalidParameter(
                            "density expr does not evaluate to a finite number".into(),
                        ));
                    }
                }
                let r = *support_radius;
                // spot-check the compactly-supported-deviation invariant
                for i in 0..16 {
                    let ang = TAU * i as f64 / 16.0;
                    let z = Complex64::from_polar(1.5 * r, ang);
                    let v = f(z.re, z.im);
                    if (v - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidParameter(format!(
                            "density must equal 1 outside |z| <= {r}, got {v} at radius {}",
                            1.5 * r
                        )));
                    }
                }
                Ok(Surface::PlaneWithDensity {
                    density: std::sync::Arc::new(move |z| f(z.re, z.im)),
                    support_radius: r,
                })
            }
            SurfaceSpec::Sphere { total_area } => Surface::sphere(*total_area),
        }
    }
}

pub fn contour_from_json(json: &str) -> Result<Contour> {
    let spec: ContourSpec = serde_json::from_str(json)?;
    spec.build()
}

pub fn surface_from_json(json: &str) -> Result<Surface> {
    let spec: SurfaceSpec = serde_json::from_str(json)?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_area_is_pi() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        let a = signed_area(&c, &Surface::PlaneStandard).unwrap();
        assert_relative_eq!(a, PI, max_relative = 1e-10);
    }

    #[test]
    fn rounded_square_area() {
        // side 1, rounding r: area = 1 - (4 - π) r²
        let r = 0.05;
        let c = Contour::rounded_square(1.0, r);
        let a = signed_area(&c, &Surface::PlaneStandard).unwrap();
        assert_relative_eq!(a, 1.0 - (4.0 - PI) * r * r, max_relative = 1e-9);
    }

    #[test]
    fn clockwise_circle_rejected_as_region() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0).reversed();
        let err = Region::new(c, &Surface::PlaneStandard, SimplicityCheck::Off).unwrap_err();
        assert!(matches!(err, Error::OrientationError));
    }

    #[test]
    fn reversed_area_negates() {
        let c = Contour::ellipse(2.0, 1.0);
        let a = signed_area(&c, &Surface::PlaneStandard).unwrap();
        let b = signed_area(&c.reversed(), &Surface::PlaneStandard).unwrap();
        assert_relative_eq!(a, -b, max_relative = 1e-10);
        assert_relative_eq!(a, 2.0 * PI, max_relative = 1e-10);
    }

    #[test]
    fn winding_numbers() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        assert_eq!(c.winding_number(Complex64::new(0.0, 0.0)).unwrap(), 1);
        assert_eq!(c.winding_number(Complex64::new(2.0, 0.0)).unwrap(), 0);
        let e = Contour::ellipse(2.0, 1.0);
        assert_eq!(e.winding_number(Complex64::new(0.5, 0.0)).unwrap(), 1);
        assert!(c.winding_number(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn sample_circle() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        let (p, dp) = c.sample(0.0);
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((dp - Complex64::new(0.0, TAU)).norm() < 1e-14);
        let (p, dp) = c.sample(0.25);
        assert!((p - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((dp - Complex64::new(-TAU, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn corner_tangent_uses_incoming_piece() {
        let c = Contour::rounded_square(2.0, 0.1);
        // t = 1/m lands exactly on the junction between pieces 0 and 1
        let m = c.num_pieces() as f64;
        let (_, tangent_at_corner) = c.sample(1.0 / m);
        let (_, incoming) = c.sample(1.0 / m - 1e-12);
        assert!((tangent_at_corner - incoming).norm() < 1e-6 * incoming.norm());
    }

    #[test]
    fn radial_deform_grows_circle() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        let d = c.deform(&|z| z, 0.5, &[], 0.0).unwrap();
        for i in 0..16 {
            let t = i as f64 / 16.0;
            assert!((d.point(t).norm() - 1.5).abs() < 1e-10);
        }
    }

    #[test]
    fn deform_zero_field_is_identity() {
        let c = Contour::ellipse(2.0, 1.0);
        let d = c
            .deform(&|_| Complex64::new(0.0, 0.0), 1.0, &[], 0.0)
            .unwrap();
        for i in 0..16 {
            let t = i as f64 / 16.0;
            assert!((d.point(t) - c.point(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn deform_respects_exclusion() {
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        let inward = |z: Complex64| -z;
        let err = c.deform(&inward, 0.9, &[Complex64::new(0.0, 0.0)], 0.5);
        assert!(matches!(err, Err(Error::SingularityCrossed { .. })));
    }

    #[test]
    fn sphere_complement_areas_sum_to_total() {
        let total = 4.0 * PI;
        let s = Surface::sphere(total).unwrap();
        let c = Contour::circle(Complex64::new(0.3, -0.1), 0.8);
        let a = signed_area(&c, &s).unwrap();
        let b = signed_area(&c.reversed(), &s).unwrap();
        assert_relative_eq!(a + b, total, max_relative = 2e-3);
    }

    #[test]
    fn hemisphere_is_half_total() {
        let s = Surface::sphere(1.0).unwrap();
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        let a = signed_area(&c, &s).unwrap();
        assert_relative_eq!(a, 0.5, max_relative = 2e-3);
    }

    #[test]
    fn self_intersection_detected() {
        // figure-eight-like Fourier loop
        let c = Contour::fourier(vec![
            (1, Complex64::new(1.0, 0.0)),
            (-2, Complex64::new(0.9, 0.0)),
        ])
        .unwrap();
        assert!(c.check_simple(512).is_err());
        let circle = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        assert!(circle.check_simple(512).is_ok());
    }

    #[test]
    fn contour_specs_parse() {
        let c =
            contour_from_json(r#"{"type":"circle","center":[0.0,0.0],"radius":1.0}"#).unwrap();
        assert_relative_eq!(c.chart_signed_area(), PI, max_relative = 1e-10);
        let p = contour_from_json(
            r#"{"type":"polygon","vertices":[[1,-1],[1,1],[-1,1],[-1,-1]],"corner_rounding":0.1}"#,
        )
        .unwrap();
        assert!(p.is_counterclockwise());
        let f = contour_from_json(
            r#"{"type":"fourier","coeffs_re":[0.0,1.0],"coeffs_im":[0.0,0.0]}"#,
        )
        .unwrap();
        assert_relative_eq!(f.chart_signed_area(), PI, max_relative = 1e-10);
    }

    #[test]
    fn density_surface_area() {
        let s = surface_from_json(
            r#"{"surface":"plane_density","density":"1 + 0*x + 0*y","support_radius":5.0}"#,
        )
        .unwrap();
        let c = Contour::circle(Complex64::new(0.0, 0.0), 1.0);
        let a = signed_area(&c, &s).unwrap();
        assert_relative_eq!(a, PI, max_relative = 2e-3);
    }

    #[test]
    fn translation_invariance_of_plane_area() {
        let c = Contour::ellipse(2.0, 1.0);
        let a = signed_area(&c, &Surface::PlaneStandard).unwrap();
        let shifted = c.translated(Complex64::new(3.7, -1.2));
        let b = signed_area(&shifted, &Surface::PlaneStandard).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }
}
