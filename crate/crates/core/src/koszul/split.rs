//! Numerical check of the decomposition of `d(f)` along
//! `E⊗∧^p L = (E⊗∧^p L') ⊕ (E⊗∧^{p-1} L')∧x_n`.

use serde::{Deserialize, Serialize};

use super::{add_block, assemble_boundary, boundary, exterior_basis, lp_operators, Character, GradedBasis};
use crate::error::Result;
use crate::liealg::LieAlgebra;
use crate::numkit::{fro_norm, CMatrix, Tolerances, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitReport {
    /// `per_degree[p - 1]` is the relative residual for `d_{p-1}`, `1 ≤ p ≤ m`.
    pub per_degree: Vec<f64>,
    pub max: f64,
}

/// Copies the `(r, c)` block of `src` (blocks of size `d`) into `dst` at `(dr, dc)`, scaled.
pub(crate) fn place(dst: &mut CMatrix, dr: usize, dc: usize, src: &CMatrix, r: usize, c: usize, d: usize, s: f64) {
    let block = src.view((r * d, c * d), (d, d)).into_owned();
    add_block(dst, dr, dc, d, &block, C64::new(s, 0.0));
}

/// Position in the full basis of a sub-algebra tuple, optionally followed by `x_n`.
pub(crate) fn lift(full: &GradedBasis, sub: &GradedBasis, p: usize, pos: usize, with_last: bool) -> usize {
    let t = &sub.tuples(p)[pos];
    let t = if with_last { t.wedge_last(full.algebra_dim() - 1) } else { t.clone() };
    full.position(&t).expect("lifted tuple is a basis tuple")
}

/// Assembles the right-hand sides of both split equations and compares them
/// with `d_{p-1}(f)` block by block.
pub fn split_check(alg: &LieAlgebra, f: &Character, tol: &Tolerances) -> Result<SplitReport> {
    let bf = boundary(alg, f, tol)?;
    let m = alg.dim();
    let n = m - 1;
    let d = alg.space_dim();
    let sub_sc = alg.constants().restrict(n);
    let (_, sub_maps) = assemble_boundary(&alg.family().generators()[..n], &sub_sc, &f.coords[..n], d);
    let lps = lp_operators(alg, f, tol)?;
    let full = &bf.basis;
    let sub = exterior_basis(d, n);

    let mut per_degree = Vec::with_capacity(m);
    for p in 1..=m {
        let dm = bf.d(p - 1).expect("degree in range");
        let mut expected = CMatrix::zeros(dm.nrows(), dm.ncols());
        // d_{p-1}(f) restricted to E⊗∧^p L' is the sub-algebra boundary
        if p <= n {
            let dt = &sub_maps[p - 1];
            for c in 0..sub.tuples(p).len() {
                for r in 0..sub.tuples(p - 1).len() {
                    let (fr, fc) = (lift(full, &sub, p - 1, r, false), lift(full, &sub, p, c, false));
                    place(&mut expected, fr, fc, dt, r, c, d, 1.0);
                }
            }
        }
        // on a∧x_n: (-1)^{p+1} L_{p-1}(a) + d_{p-2}(a)∧x_n
        let sign = if (p + 1) % 2 == 0 { 1.0 } else { -1.0 };
        for c in 0..sub.tuples(p - 1).len() {
            let fc = lift(full, &sub, p - 1, c, true);
            for r in 0..sub.tuples(p - 1).len() {
                let fr = lift(full, &sub, p - 1, r, false);
                place(&mut expected, fr, fc, &lps[p - 1], r, c, d, sign);
            }
            if p >= 2 {
                let dt = &sub_maps[p - 2];
                for r in 0..sub.tuples(p - 2).len() {
                    let fr = lift(full, &sub, p - 2, r, true);
                    place(&mut expected, fr, fc, dt, r, c, d, 1.0);
                }
            }
        }
        per_degree.push(fro_norm(&(dm - expected)) / (1.0 + fro_norm(dm)));
    }
    let max = per_degree.iter().copied().fold(0.0, f64::max);
    Ok(SplitReport { per_degree, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::testutil::algebra;
    use crate::liealg::fixtures::*;
    use crate::numkit::{c64, ZERO};

    #[test]
    fn g2_at_zero() {
        let alg = algebra(&["y", "x"], vec![g2_y(), g2_x()]);
        let rep = split_check(&alg, &Character::zero(2), &Tolerances::default()).unwrap();
        assert_eq!(rep.per_degree.len(), 2);
        assert!(rep.max <= 1e-10, "{rep:?}");
    }

    #[test]
    fn single_generator() {
        let alg = algebra(&["x"], vec![real(2, &[1.0, 2.0, 0.0, 3.0])]);
        let rep = split_check(&alg, &Character::from_real(&[0.4]), &Tolerances::default()).unwrap();
        assert!(rep.max <= 1e-15);
    }

    #[test]
    fn borel_with_complex_character() {
        // adapted order for the upper-triangular 2x2 algebra plus a nilpotent corner
        let alg = algebra(
            &["e13", "e12", "e23", "h"],
            vec![unit(3, 0, 2), unit(3, 0, 1), unit(3, 1, 2), diag(&[1.0, 0.0, -2.0])],
        );
        let f = Character::new(vec![ZERO, ZERO, ZERO, c64(0.3, -1.2)]);
        let rep = split_check(&alg, &f, &Tolerances::default()).unwrap();
        assert!(rep.max <= 1e-10, "{rep:?}");
    }
}
