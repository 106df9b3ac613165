//! Basis of `E ⊗ ∧L`: wedge monomials indexed by strictly increasing tuples.

use std::fmt;

/// A strictly increasing tuple of 0-based generator indices; the empty tuple
/// is the unit of the exterior algebra. The derived `Ord` compares at the
/// first differing slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExteriorIndex(pub Vec<usize>);

impl ExteriorIndex {
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// The tuple with slot `k` removed.
    pub fn without_slot(&self, k: usize) -> ExteriorIndex {
        let mut v = self.0.clone();
        v.remove(k);
        ExteriorIndex(v)
    }

    /// Appends `i`, which must exceed every entry (so the result stays sorted).
    pub fn wedge_last(&self, i: usize) -> ExteriorIndex {
        debug_assert!(self.0.last().is_none_or(|&l| l < i));
        let mut v = self.0.clone();
        v.push(i);
        ExteriorIndex(v)
    }
}

impl fmt::Display for ExteriorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, ")")
    }
}

/// Sorts a wedge word, returning the permutation sign, or `None` when an
/// index repeats (the monomial vanishes).
pub fn normalize_wedge(word: &[usize]) -> Option<(f64, ExteriorIndex)> {
    let mut inversions = 0usize;
    for a in 0..word.len() {
        for b in a + 1..word.len() {
            match word[a].cmp(&word[b]) {
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = word.to_vec();
    sorted.sort_unstable();
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, ExteriorIndex(sorted)))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Flat coordinates of `E ⊗ ∧^p L` for every `p`: within a degree the layout
/// is tuple-major (in tuple order), then the `E` coordinate.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    space_dim: usize,
    algebra_dim: usize,
    degrees: Vec<Vec<ExteriorIndex>>,
}

impl GradedBasis {
    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    /// Tuples of degree `p` in increasing order.
    pub fn tuples(&self, p: usize) -> &[ExteriorIndex] {
        self.degrees.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn position(&self, alpha: &ExteriorIndex) -> Option<usize> {
        self.degrees.get(alpha.degree())?.binary_search(alpha).ok()
    }

    /// Dimension of `E ⊗ ∧^p L`.
    pub fn block_size(&self, p: usize) -> usize {
        self.space_dim * self.tuples(p).len()
    }

    /// Flat coordinate of `e_coord ⊗ x_alpha` inside the degree block.
    pub fn offset(&self, alpha: &ExteriorIndex, e_coord: usize) -> Option<usize> {
        self.position(alpha).map(|pos| pos * self.space_dim + e_coord)
    }

    /// Dimension of the whole graded space, `d · 2^m`.
    pub fn total_size(&self) -> usize {
        (0..=self.algebra_dim).map(|p| self.block_size(p)).sum()
    }

    /// Start of degree `p` in the degree-major concatenation of all blocks.
    pub fn degree_start(&self, p: usize) -> usize {
        (0..p).map(|q| self.block_size(q)).sum()
    }
}

fn combinations(m: usize, p: usize) -> Vec<ExteriorIndex> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<ExteriorIndex>) {
        if left == 0 {
            out.push(ExteriorIndex(cur.clone()));
            return;
        }
        for i in start..=(m - left) {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= m {
        rec(0, m, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

/// Enumerates the graded basis for a `d`-dimensional space and an
/// `m`-dimensional algebra.
pub fn exterior_basis(d: usize, m: usize) -> GradedBasis {
    GradedBasis {
        space_dim: d,
        algebra_dim: m,
        degrees: (0..=m).map(|p| combinations(m, p)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[usize]) -> ExteriorIndex {
        ExteriorIndex(v.to_vec())
    }

    #[test]
    fn two_generators() {
        let b = exterior_basis(1, 2);
        assert_eq!(b.tuples(0), &[t(&[])]);
        assert_eq!(b.tuples(1), &[t(&[0]), t(&[1])]);
        assert_eq!(b.tuples(2), &[t(&[0, 1])]);
    }

    #[test]
    fn degree_two_of_three_is_ordered() {
        let b = exterior_basis(1, 3);
        assert_eq!(b.tuples(2), &[t(&[0, 1]), t(&[0, 2]), t(&[1, 2])]);
        assert_eq!(format!("{}", b.tuples(2)[1]), "(1,3)");
    }

    #[test]
    fn four_generators_have_sixteen_tuples() {
        let b = exterior_basis(3, 4);
        let count: usize = (0..=4).map(|p| b.tuples(p).len()).sum();
        assert_eq!(count, 16);
        assert_eq!(b.total_size(), 48);
        for p in 0..=4 {
            assert_eq!(b.block_size(p), 3 * binomial(4, p));
        }
    }

    #[test]
    fn offsets_are_bijective() {
        let b = exterior_basis(2, 3);
        for p in 0..=3 {
            let mut seen = vec![false; b.block_size(p)];
            for alpha in b.tuples(p) {
                for e in 0..2 {
                    let o = b.offset(alpha, e).unwrap();
                    assert!(!seen[o]);
                    seen[o] = true;
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(normalize_wedge(&[2, 0, 1]), Some((1.0, t(&[0, 1, 2]))));
        assert_eq!(normalize_wedge(&[1, 0]), Some((-1.0, t(&[0, 1]))));
        assert_eq!(normalize_wedge(&[1, 0, 1]), None);
        assert_eq!(normalize_wedge(&[]), Some((1.0, t(&[]))));
    }
}
