//! Orthonormal antihermitian bases for u(N), su(N), so(N), Casimir numbers
//! by brute force, and Lie algebraic factors of Feynman diagrams.
//!
//! Inner product convention: ⟨X, Y⟩ = −tr(X·Y), so every basis satisfies
//! −tr(e_a e_b) = δ_ab. All factors carry their signs through this
//! convention; coefficient assembly downstream applies no extra sign.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::str::FromStr;

use crate::cmat::CMat;
use crate::diagrams::FeynmanDiagram;
use crate::error::{Error, Result};

/// Caps for the brute-force dimⁿ index sum.
pub const LIE_ORDER_CAP: usize = 4;
pub const LIE_RANK_CAP: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    U,
    Su,
    So,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub family: GroupFamily,
    pub n: usize,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, n: usize) -> Result<GroupSpec> {
        let min = match family {
            GroupFamily::So => 3,
            _ => 1,
        };
        if n < min {
            return Err(Error::UnsupportedGroup(format!(
                "{family:?}({n}): rank must be >= {min}"
            )));
        }
        if n > LIE_RANK_CAP {
            return Err(Error::UnsupportedGroup(format!(
                "{family:?}({n}): rank cap is {LIE_RANK_CAP}"
            )));
        }
        Ok(GroupSpec { family, n })
    }

    pub fn dim(&self) -> usize {
        let n = self.n;
        match self.family {
            GroupFamily::U => n * n,
            GroupFamily::Su => n * n - 1,
            GroupFamily::So => n * (n - 1) / 2,
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses "u:N", "su:N", "so:N" (case-insensitive).
    fn from_str(s: &str) -> Result<GroupSpec> {
        let err = || Error::UnsupportedGroup(format!("cannot parse group spec '{s}'"));
        let (fam, rank) = s.split_once(':').ok_or_else(err)?;
        let n: usize = rank.parse().map_err(|_| err())?;
        let family = match fam.to_ascii_lowercase().as_str() {
            "u" => GroupFamily::U,
            "su" => GroupFamily::Su,
            "so" => GroupFamily::So,
            _ => return Err(err()),
        };
        GroupSpec::new(family, n)
    }
}

impl std::fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fam = match self.family {
            GroupFamily::U => "U",
            GroupFamily::Su => "SU",
            GroupFamily::So => "SO",
        };
        write!(f, "{fam}({})", self.n)
    }
}

#[derive(Debug, Clone)]
pub struct LieAlgebraBasis {
    pub group: GroupSpec,
    pub elements: Vec<CMat>,
}

impl LieAlgebraBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }
}

fn e_unit(n: usize, j: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(n);
    m[(j, k)] = Complex64::new(1.0, 0.0);
    m
}

/// Builds the basis with a fixed, documented enumeration order:
///
/// - u(N): i·E_jj for j = 0..N, then for each j < k the pair
///   (E_jk − E_kj)/√2 and i(E_jk + E_kj)/√2.
/// - su(N): Cartan elements h_m = i·diag(1,…,1,−m,0,…)/√(m(m+1)) for
///   m = 1..N, then the same off-diagonal pairs as u(N).
/// - so(N): (E_jk − E_kj)/√2 for j < k (real antisymmetric).
pub fn build_basis(g: GroupSpec) -> Result<LieAlgebraBasis> {
    let n = g.n;
    let i1 = Complex64::new(0.0, 1.0);
    let s = 1.0 / 2.0f64.sqrt();
    let mut elements = Vec::with_capacity(g.dim());
    match g.family {
        GroupFamily::U => {
            for j in 0..n {
                elements.push(e_unit(n, j, j).scale(i1));
            }
        }
        GroupFamily::Su => {
            for m in 1..n {
                let norm = 1.0 / ((m * (m + 1)) as f64).sqrt();
                let mut h = CMat::zeros(n);
                for j in 0..m {
                    h[(j, j)] = i1 * norm;
                }
                h[(m, m)] = -i1 * (m as f64) * norm;
                elements.push(h);
            }
        }
        GroupFamily::So => {}
    }
    for j in 0..n {
        for k in j + 1..n {
            let a = e_unit(n, j, k).sub(&e_unit(n, k, j)).scale(s.into());
            match g.family {
                GroupFamily::So => elements.push(a),
                _ => {
                    let b = e_unit(n, j, k).add(&e_unit(n, k, j)).scale(i1 * s);
                    elements.push(a);
                    elements.push(b);
                }
            }
        }
    }
    debug_assert_eq!(elements.len(), g.dim());
    Ok(LieAlgebraBasis { group: g, elements })
}

/// ⟨X, Y⟩ = −tr(X·Y), real part (imaginary part vanishes for antihermitian
/// arguments).
pub fn inner(x: &CMat, y: &CMat) -> f64 {
    -x.mul(y).trace().re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirData {
    pub c_fundamental: f64,
    /// Adjoint Casimir on the traceless (semisimple) part; 0 for U(1).
    pub c_adjoint: f64,
}

/// Σ_a [e_a, [e_a, x]].
pub fn adjoint_double_commutator(b: &LieAlgebraBasis, x: &CMat) -> CMat {
    let mut out = CMat::zeros(x.n);
    for e in &b.elements {
        out = out.add(&e.commutator(&e.commutator(x)));
    }
    out
}

/// Extracts C_F from Σ e_a e_a (must be a scalar matrix) and fits C_A from
/// the adjoint double commutator on the traceless projections of the basis.
pub fn casimirs(b: &LieAlgebraBasis) -> Result<CasimirData> {
    let n = b.group.n;
    let mut sq = CMat::zeros(n);
    for e in &b.elements {
        sq = sq.add(&e.mul(e));
    }
    let c = sq.trace().re / n as f64;
    let dev = sq.sub(&CMat::identity(n).scale(c.into())).max_abs();
    if dev > 1e-10 || sq.trace().im.abs() > 1e-10 {
        return Err(Error::NotScalar { deviation: dev });
    }

    let mut c_a = 0.0;
    let mut weight = 0.0;
    for e in &b.elements {
        // project out the central (trace) part; ad kills it anyway
        let t = e.trace() / n as f64;
        let x = e.sub(&CMat::identity(n).scale(t));
        let nx = inner(&x, &x);
        if nx < 1e-12 {
            continue;
        }
        let dx = adjoint_double_commutator(b, &x);
        let coeff = inner(&x, &dx) / nx;
        let resid = dx.sub(&x.scale(coeff.into())).max_abs();
        if resid > 1e-8 {
            return Err(Error::NotScalar { deviation: resid });
        }
        c_a += coeff * nx;
        weight += nx;
    }
    if weight > 0.0 {
        c_a /= weight;
    }
    Ok(CasimirData {
        c_fundamental: c,
        c_adjoint: c_a,
    })
}

/// (1/N)·trace in the fundamental representation.
pub fn observable_trace(m: &CMat) -> Complex64 {
    m.trace() / m.n as f64
}

fn lie_factor_partial(
    d: &FeynmanDiagram,
    b: &LieAlgebraBasis,
    pair_of_pos: &[usize],
    a0: usize,
) -> Complex64 {
    let dim = b.dim();
    let n = d.n;
    let mut assign = vec![0usize; n];
    assign[0] = a0;
    let mut total = Complex64::new(0.0, 0.0);
    let combos = dim.pow((n - 1) as u32);
    for mut rest in 0..combos {
        for slot in assign.iter_mut().skip(1) {
            *slot = rest % dim;
            rest /= dim;
        }
        // right-to-left product: position 1 is rightmost
        let mut prod = b.elements[assign[pair_of_pos[2 * n - 1]]].clone();
        for pos in (1..2 * n - 1).rev() {
            prod = prod.mul(&b.elements[assign[pair_of_pos[pos]]]);
        }
        let first = &b.elements[assign[pair_of_pos[0]]];
        total += observable_trace(&prod.mul(first));
    }
    total
}

/// Lie algebraic factor of a matching: Σ over index assignments a: pairs →
/// basis of (1/N)·tr(e_{b_{2n}} ⋯ e_{b_1}), where b_pos is the index
/// assigned to the pair containing position pos, the product ordered right
/// to left (position 1 rightmost).
///
/// The sum is real for these bases; |Im| ≥ 1e−10 is treated as a bug.
pub fn lie_factor(d: &FeynmanDiagram, b: &LieAlgebraBasis) -> Result<Complex64> {
    if d.n > LIE_ORDER_CAP {
        return Err(Error::CapExceeded {
            requested: d.n,
            cap: LIE_ORDER_CAP,
        });
    }
    if d.n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let n = d.n;
    let mut pair_of_pos = vec![usize::MAX; 2 * n];
    for (idx, &(a, b_)) in d.pairs.iter().enumerate() {
        for v in [a, b_] {
            if v < 1 || v > 2 * n || pair_of_pos[v - 1] != usize::MAX {
                return Err(Error::BadMatching(format!("bad vertex {v}")));
            }
            pair_of_pos[v - 1] = idx;
        }
    }
    let dim = b.dim();

    // shard across the leading index; ordered map keeps the reduction
    // deterministic under any thread count
    #[cfg(feature = "parallel")]
    let partials: Vec<Complex64> = (0..dim)
        .into_par_iter()
        .map(|a0| lie_factor_partial(d, b, &pair_of_pos, a0))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Complex64> = (0..dim)
        .map(|a0| lie_factor_partial(d, b, &pair_of_pos, a0))
        .collect();

    let total: Complex64 = partials.iter().sum();
    assert!(
        total.im.abs() < 1e-10 * (1.0 + total.re.abs()),
        "lie factor has spurious imaginary part {}",
        total.im
    );
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{classes_at_order, enumerate_matchings};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn basis(s: &str) -> LieAlgebraBasis {
        build_basis(s.parse().unwrap()).unwrap()
    }

    fn check_basis_invariants(b: &LieAlgebraBasis) {
        assert_eq!(b.dim(), b.group.dim());
        for (i, x) in b.elements.iter().enumerate() {
            assert!(x.add(&x.dagger()).max_abs() < 1e-14, "not antihermitian");
            for (j, y) in b.elements.iter().enumerate() {
                let g = inner(x, y);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "gram[{i}][{j}] = {g}");
                let im = x.mul(y).trace().im;
                assert!(im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bases_are_orthonormal_antihermitian() {
        for s in ["u:1", "u:2", "u:3", "su:2", "su:3", "su:4", "so:3", "so:4", "so:5"] {
            check_basis_invariants(&basis(s));
        }
    }

    #[test]
    fn u1_basis_is_i() {
        let b = basis("u:1");
        assert_eq!(b.dim(), 1);
        assert!((b.elements[0][(0, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn su2_basis_spans_pauli_directions() {
        let b = basis("su:2");
        assert_eq!(b.dim(), 3);
        // each element squares to −Id/2 (iσ/√2 up to basis rotation)
        for e in &b.elements {
            let sq = e.mul(e);
            assert!(sq.sub(&CMat::identity(2).scale((-0.5).into())).max_abs() < 1e-14);
        }
    }

    #[test]
    fn so3_dimension() {
        assert_eq!(basis("so:3").dim(), 3);
        assert!("so:2".parse::<GroupSpec>().is_err());
        assert!("sp:2".parse::<GroupSpec>().is_err());
        assert!("u:7".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn casimir_values() {
        let u1 = casimirs(&basis("u:1")).unwrap();
        assert_relative_eq!(u1.c_fundamental, -1.0, max_relative = 1e-12);
        assert_relative_eq!(u1.c_adjoint, 0.0, epsilon = 1e-12);

        let su2 = casimirs(&basis("su:2")).unwrap();
        assert_relative_eq!(su2.c_fundamental, -1.5, max_relative = 1e-12);
        assert_relative_eq!(su2.c_adjoint, -4.0, max_relative = 1e-10);

        for n in 3..=5 {
            let so = casimirs(&basis(&format!("so:{n}"))).unwrap();
            assert_relative_eq!(so.c_fundamental, -((n - 1) as f64) / 2.0, max_relative = 1e-12);
            assert_relative_eq!(so.c_adjoint, -((n - 2) as f64), max_relative = 1e-10);
        }

        for n in 2..=4 {
            let su = casimirs(&basis(&format!("su:{n}"))).unwrap();
            let nf = n as f64;
            assert_relative_eq!(su.c_fundamental, -(nf * nf - 1.0) / nf, max_relative = 1e-12);
            assert_relative_eq!(su.c_adjoint, -2.0 * nf, max_relative = 1e-10);
        }
    }

    #[test]
    fn adjoint_casimir_scalar_on_random_elements() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for s in ["su:2", "su:3", "so:3", "so:4"] {
            let b = basis(s);
            let cas = casimirs(&b).unwrap();
            for _ in 0..10 {
                let mut x = CMat::zeros(b.group.n);
                for e in &b.elements {
                    x = x.add(&e.scale((rng.gen::<f64>() - 0.5).into()));
                }
                let dx = adjoint_double_commutator(&b, &x);
                assert!(
                    dx.sub(&x.scale(cas.c_adjoint.into())).max_abs() < 1e-9 * (1.0 + x.max_abs()),
                    "{s}: adjoint Casimir not scalar"
                );
            }
        }
    }

    #[test]
    fn lie_factor_basics() {
        let un = |n: usize| basis(&format!("u:{n}"));
        let d0 = FeynmanDiagram { n: 0, pairs: vec![] };
        assert!((lie_factor(&d0, &un(2)).unwrap().re - 1.0).abs() < 1e-14);

        let d1 = FeynmanDiagram::new(1, vec![(1, 2)]).unwrap();
        for n in 1..=3 {
            let v = lie_factor(&d1, &un(n)).unwrap();
            assert_relative_eq!(v.re, -(n as f64), max_relative = 1e-12);
        }

        let crossed = FeynmanDiagram::new(2, vec![(1, 3), (2, 4)]).unwrap();
        let rainbow = FeynmanDiagram::new(2, vec![(1, 2), (3, 4)]).unwrap();
        for n in 1..=3 {
            let nf = n as f64;
            let c = lie_factor(&crossed, &un(n)).unwrap();
            assert_relative_eq!(c.re, 1.0, max_relative = 1e-12);
            let r = lie_factor(&rainbow, &un(n)).unwrap();
            assert_relative_eq!(r.re, nf * nf, max_relative = 1e-12);
            // sum over all three matchings reproduces the 2N² + 1 combination
            let nested = FeynmanDiagram::new(2, vec![(1, 4), (2, 3)]).unwrap();
            let s = r.re + c.re + lie_factor(&nested, &un(n)).unwrap().re;
            assert_relative_eq!(s, 2.0 * nf * nf + 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn lie_factor_cyclic_invariance() {
        for s in ["u:2", "su:2", "so:3"] {
            let b = basis(s);
            for n in 1..=3 {
                for d in enumerate_matchings(n).unwrap() {
                    let v = lie_factor(&d, &b).unwrap();
                    let w = lie_factor(&d.rotated(), &b).unwrap();
                    assert!(
                        (v - w).norm() < 1e-10 * (1.0 + v.norm()),
                        "{s} n={n} {:?}",
                        d.pairs
                    );
                }
            }
        }
    }

    #[test]
    fn lie_factor_constant_on_cyclic_classes() {
        let b = basis("su:2");
        for cls in classes_at_order(3).unwrap() {
            let rep = lie_factor(&cls.representative, &b).unwrap();
            let mut cur = cls.representative.rotated();
            while cur != cls.representative {
                let v = lie_factor(&cur, &b).unwrap();
                assert!((v - rep).norm() < 1e-10 * (1.0 + rep.norm()));
                cur = cur.rotated();
            }
        }
    }

    #[test]
    fn lie_factor_basis_independent() {
        // rotate the basis by a random orthogonal matrix (preserves the
        // inner product, hence orthonormality)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for s in ["u:2", "su:3"] {
            let b = basis(s);
            let dim = b.dim();
            // Gram-Schmidt on a random real matrix
            let mut q: Vec<Vec<f64>> = (0..dim)
                .map(|_| (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect())
                .collect();
            for i in 0..dim {
                for j in 0..i {
                    let dot: f64 = (0..dim).map(|k| q[i][k] * q[j][k]).sum();
                    for k in 0..dim {
                        q[i][k] -= dot * q[j][k];
                    }
                }
                let norm: f64 = (0..dim).map(|k| q[i][k] * q[i][k]).sum::<f64>().sqrt();
                for k in 0..dim {
                    q[i][k] /= norm;
                }
            }
            let rotated = LieAlgebraBasis {
                group: b.group,
                elements: (0..dim)
                    .map(|i| {
                        let mut m = CMat::zeros(b.group.n);
                        for k in 0..dim {
                            m = m.add(&b.elements[k].scale(q[i][k].into()));
                        }
                        m
                    })
                    .collect(),
            };
            check_basis_invariants(&rotated);
            for n in 1..=2 {
                for d in enumerate_matchings(n).unwrap() {
                    let v = lie_factor(&d, &b).unwrap();
                    let w = lie_factor(&d, &rotated).unwrap();
                    assert!((v - w).norm() < 1e-10 * (1.0 + v.norm()));
                }
            }
        }
    }

    #[test]
    fn observable_trace_examples() {
        assert!((observable_trace(&CMat::identity(4)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((observable_trace(&CMat::zeros(3).exp()) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let theta = 0.9;
        let mut x = CMat::zeros(2);
        x[(0, 0)] = Complex64::new(0.0, theta);
        x[(1, 1)] = Complex64::new(0.0, -theta);
        let t = observable_trace(&x.exp());
        assert!((t.re - theta.cos()).abs() < 1e-13 && t.im.abs() < 1e-13);
    }

    #[test]
    fn order_cap_enforced() {
        let b = basis("u:1");
        let d = FeynmanDiagram::new(5, vec![(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]).unwrap();
        assert!(matches!(
            lie_factor(&d, &b),
            Err(Error::CapExceeded { .. })
        ));
    }
}
