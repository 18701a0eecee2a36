//! Feynman diagrams at order n: perfect matchings of the 2n contour
//! insertion points, grouped into cyclic-rotation equivalence classes.
//!
//! Insertion points are labeled 1..=2n in cyclic order around the contour.
//! A diagram pairs them up; there are (2n-1)!! matchings. Rotating all labels
//! by one step (i ↦ i mod 2n + 1) permutes the matchings, and both the group
//! factor and the analytic factor are constant on each orbit, so only one
//! representative per class is ever integrated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matchings are enumerated exactly, so the order is capped where the
/// double-factorial count stays comfortably small.
pub const ORDER_CAP: usize = 6;

/// A perfect matching of {1, ..., 2n}, pairs stored as (low, high) and
/// sorted by the low endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeynmanDiagram {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl FeynmanDiagram {
    pub fn new(n: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.len() != n {
            return Err(Error::BadMatching(format!(
                "expected {n} pairs, got {}",
                pairs.len()
            )));
        }
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let mut seen = vec![false; 2 * n + 1];
        for &(a, b) in &pairs {
            if a == b || a < 1 || b > 2 * n {
                return Err(Error::BadMatching(format!("bad pair ({a}, {b})")));
            }
            for v in [a, b] {
                if seen[v] {
                    return Err(Error::BadMatching(format!("vertex {v} repeated")));
                }
                seen[v] = true;
            }
        }
        Ok(FeynmanDiagram { n, pairs })
    }

    /// Rotate every label one step around the loop: i ↦ (i mod 2n) + 1.
    pub fn rotated(&self) -> FeynmanDiagram {
        let m = 2 * self.n;
        let pairs = self
            .pairs
            .iter()
            .map(|&(a, b)| (a % m + 1, b % m + 1))
            .collect();
        FeynmanDiagram::new(self.n, pairs).expect("rotation preserves matchings")
    }

    /// True when the pairing has no crossings drawn as chords of a circle,
    /// i.e. no pairs (a,b), (c,d) with a < c < b < d.
    pub fn is_planar(&self) -> bool {
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            for &(c, d) in &self.pairs[i + 1..] {
                let inside_c = a < c && c < b;
                let inside_d = a < d && d < b;
                if inside_c != inside_d {
                    return false;
                }
            }
        }
        true
    }
}

/// All (2n-1)!! perfect matchings of {1..2n}, in lexicographic order of the
/// sorted pair list (the smallest unmatched label is paired with each larger
/// one in turn).
pub fn enumerate_matchings(n: usize) -> Result<Vec<FeynmanDiagram>> {
    if n > ORDER_CAP {
        return Err(Error::CapExceeded {
            requested: n,
            cap: ORDER_CAP,
        });
    }
    let mut out = Vec::new();
    let mut used = vec![false; 2 * n + 1];
    let mut pairs = Vec::with_capacity(n);
    fn go(
        n: usize,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<FeynmanDiagram>,
    ) {
        let a = match (1..=2 * n).find(|&v| !used[v]) {
            Some(a) => a,
            None => {
                out.push(FeynmanDiagram {
                    n,
                    pairs: pairs.clone(),
                });
                return;
            }
        };
        used[a] = true;
        for b in a + 1..=2 * n {
            if used[b] {
                continue;
            }
            used[b] = true;
            pairs.push((a, b));
            go(n, used, pairs, out);
            pairs.pop();
            used[b] = false;
        }
        used[a] = false;
    }
    go(n, &mut used, &mut pairs, &mut out);
    Ok(out)
}

/// An orbit of matchings under cyclic rotation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclicClass {
    /// Lexicographically least member of the orbit.
    pub representative: FeynmanDiagram,
    pub orbit_size: usize,
}

/// Group a complete list of order-n matchings into cyclic classes.
///
/// The input must be exactly the output of [`enumerate_matchings`] (any
/// order); a partial or padded list is rejected.
pub fn cyclic_classes(diagrams: &[FeynmanDiagram]) -> Result<Vec<CyclicClass>> {
    let n = match diagrams.first() {
        Some(d) => d.n,
        None => return Err(Error::InconsistentInput),
    };
    let full = enumerate_matchings(n)?;
    {
        let mut sorted: Vec<_> = diagrams.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted != full {
            return Err(Error::InconsistentInput);
        }
    }
    let mut assigned = std::collections::HashSet::new();
    let mut classes = Vec::new();
    for d in &full {
        if assigned.contains(d) {
            continue;
        }
        let mut orbit = vec![d.clone()];
        let mut cur = d.rotated();
        while &cur != d {
            orbit.push(cur.clone());
            cur = cur.rotated();
        }
        let orbit_size = {
            let mut uniq: Vec<_> = orbit.clone();
            uniq.sort();
            uniq.dedup();
            uniq.len()
        };
        let representative = orbit.iter().min().unwrap().clone();
        for m in orbit {
            assigned.insert(m);
        }
        classes.push(CyclicClass {
            representative,
            orbit_size,
        });
    }
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(classes)
}

/// Convenience: enumerate and classify in one step.
pub fn classes_at_order(n: usize) -> Result<Vec<CyclicClass>> {
    cyclic_classes(&enumerate_matchings(n)?)
}

fn double_factorial(k: isize) -> usize {
    if k <= 0 {
        1
    } else {
        k as usize * double_factorial(k - 2)
    }
}

/// (2n-1)!!, the number of matchings at order n.
pub fn matching_count(n: usize) -> usize {
    double_factorial(2 * n as isize - 1)
}
