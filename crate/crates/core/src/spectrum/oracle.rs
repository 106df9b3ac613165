//! Joint eigenvalues of a commuting family by repeated deflation.

use super::dedup_points;
use crate::error::{Error, Result};
use crate::liealg::{commutator, common_eigenvector, OperatorFamily};
use crate::numkit::{fro_norm, orthogonal_complement, CMatrix, Tolerances, C64};

/// All joint eigenvalue tuples of a commuting family: find a common
/// eigenvector, record its weights, compress every matrix onto the unitary
/// complement of the vector and repeat until the space is exhausted.
pub fn taylor_oracle(fam: &OperatorFamily, tol: &Tolerances) -> Result<Vec<Vec<C64>>> {
    let gens = fam.generators();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let norm = fro_norm(&commutator(&gens[i], &gens[j])?);
            if norm > tol.residual * (1.0 + fro_norm(&gens[i]) * fro_norm(&gens[j])) {
                return Err(Error::NotCommuting { i, j, norm });
            }
        }
    }
    let mut current: Vec<CMatrix> = gens.to_vec();
    let mut tuples = Vec::with_capacity(fam.space_dim());
    while current[0].nrows() > 0 {
        let ce = common_eigenvector(&current, tol)?;
        tuples.push(ce.weights);
        let v = CMatrix::from_columns(&[ce.vector]);
        let q = orthogonal_complement(&v);
        current = current.iter().map(|m| q.adjoint() * m * &q).collect();
    }
    let radius = tol.eig_cluster * fam.max_norm().max(1.0);
    dedup_points(&mut tuples, radius);
    Ok(tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::fixtures::*;
    use crate::numkit::c64;

    fn fam(gens: Vec<CMatrix>) -> OperatorFamily {
        OperatorFamily::unlabeled(gens, &Tolerances::default()).unwrap()
    }

    #[test]
    fn diagonal_pair() {
        let pts = taylor_oracle(&fam(vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]), &Tolerances::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[0][0] - c64(1.0, 0.0)).norm() < 1e-12 && (pts[0][1] - c64(3.0, 0.0)).norm() < 1e-12);
        assert!((pts[1][0] - c64(2.0, 0.0)).norm() < 1e-12 && (pts[1][1] - c64(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn single_jordan_block() {
        let pts = taylor_oracle(&fam(vec![real(2, &[5.0, 1.0, 0.0, 5.0])]), &Tolerances::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0][0] - c64(5.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn non_commuting_is_rejected() {
        assert!(matches!(
            taylor_oracle(&fam(vec![g2_y(), g2_x()]), &Tolerances::default()),
            Err(Error::NotCommuting { i: 0, j: 1, .. })
        ));
    }
}
