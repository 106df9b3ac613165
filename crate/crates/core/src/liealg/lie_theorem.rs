//! Constructive Lie's theorem: a common eigenvector of a solvable family.

use super::closure_constants;
use super::series::{classify, derived_series, Classification};
use crate::error::{Error, Result};
use crate::numkit::{
    eigen_clusters, fro_norm, identity, lex_cmp, normalize_phase, null_space, numerical_rank_scaled, range_basis,
    stack_as_columns, CMatrix, CVector, Tolerances, C64, ONE,
};

#[derive(Debug, Clone)]
pub struct CommonEigenvector {
    /// Unit vector, phase-normalised by [`normalize_phase`].
    pub vector: CVector,
    /// `weights[i]` is the eigenvalue of `mats[i]` on `vector`.
    pub weights: Vec<C64>,
}

/// Finds `v ≠ 0` with `mats[i] v = λ_i v` for every `i`.
///
/// The matrices may be linearly dependent; an independent spanning subset is
/// extracted first and its structure constants are computed by least squares.
/// The recursion descends through a codimension-one ideal containing the
/// derived algebra, intersects its weight spaces and diagonalises the
/// remaining generator there.
pub fn common_eigenvector(mats: &[CMatrix], tol: &Tolerances) -> Result<CommonEigenvector> {
    let d = match mats.first() {
        Some(m) => m.nrows(),
        None => return Err(Error::Dimension("common_eigenvector needs at least one matrix".into())),
    };
    if mats.iter().any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::Dimension("matrices must share one square shape".into()));
    }
    if d == 0 {
        return Err(Error::Dimension("zero-dimensional space has no eigenvectors".into()));
    }
    let scale = mats.iter().map(fro_norm).fold(1.0, f64::max);
    let basis = independent_subset(mats, tol, scale);
    let v = solvable_eigenvector(&basis, d, tol, scale)?;
    let v = normalize_phase(&v);
    let weights: Vec<C64> = mats.iter().map(|m| rayleigh(m, &v)).collect();
    for (m, &w) in mats.iter().zip(&weights) {
        let res = (m * &v - &v * w).norm();
        let bound = tol.residual * fro_norm(m).max(1.0);
        if res > bound {
            return Err(Error::Tolerance(format!(
                "common eigenvector residual {res:.3e} exceeds {bound:.3e}; try a looser rank_rel"
            )));
        }
    }
    Ok(CommonEigenvector { vector: v, weights })
}

pub(crate) fn rayleigh(m: &CMatrix, v: &CVector) -> C64 {
    let num = (v.adjoint() * m * v)[(0, 0)];
    num / v.norm_squared()
}

fn independent_subset(mats: &[CMatrix], tol: &Tolerances, scale: f64) -> Vec<CMatrix> {
    let mut chosen: Vec<CMatrix> = Vec::new();
    for m in mats {
        let mut trial = chosen.clone();
        trial.push(m.clone());
        if numerical_rank_scaled(&stack_as_columns(&trial), tol, scale) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

fn solvable_eigenvector(basis: &[CMatrix], d: usize, tol: &Tolerances, scale: f64) -> Result<CVector> {
    match basis.len() {
        0 => {
            let mut v = CVector::zeros(d);
            v[0] = ONE;
            Ok(v)
        }
        1 => preferred_eigenvector(&basis[0], tol),
        n => {
            let sc = closure_constants(basis, tol)?;
            let derived = derived_series(&sc, tol);
            let d2 = derived.subspaces[1].clone();
            if d2.ncols() == n || classify(&sc, tol) == Classification::NonSolvable {
                return Err(Error::Classification(Classification::NonSolvable.to_string()));
            }
            let (ideal, extra) = codimension_one_ideal(&d2, n);
            let ideal_mats: Vec<CMatrix> = (0..ideal.ncols())
                .map(|c| {
                    (0..n).fold(CMatrix::zeros(d, d), |acc, a| acc + &basis[a] * ideal[(a, c)])
                })
                .collect();
            let v0 = solvable_eigenvector(&ideal_mats, d, tol, scale)?;
            let stacked = {
                let mut s = CMatrix::zeros(d * ideal_mats.len(), d);
                for (i, m) in ideal_mats.iter().enumerate() {
                    let w = rayleigh(m, &v0);
                    let shifted = m - identity(d) * w;
                    s.view_mut((i * d, 0), (d, d)).copy_from(&shifted);
                }
                s
            };
            let weight_space = null_space(&stacked, tol.rank_rel * scale);
            if weight_space.ncols() == 0 {
                return Err(Error::Tolerance(
                    "joint weight space is empty; try a looser rank_rel".into(),
                ));
            }
            let x = &basis[extra];
            let restricted = weight_space.adjoint() * x * &weight_space;
            let u = preferred_eigenvector(&restricted, tol)?;
            Ok(&weight_space * u)
        }
    }
}

/// Coordinates of a codimension-one subspace containing `derived` (extended
/// greedily by unit vectors) and the index of a unit vector completing it.
fn codimension_one_ideal(derived: &CMatrix, n: usize) -> (CMatrix, usize) {
    let mut cols: Vec<CVector> = (0..derived.ncols()).map(|c| derived.column(c).into_owned()).collect();
    let mut extra = None;
    for a in 0..n {
        let mut e = CVector::zeros(n);
        e[a] = ONE;
        let mut trial = cols.clone();
        trial.push(e);
        let independent = range_basis(&CMatrix::from_columns(&trial), 1e-8).ncols() == trial.len();
        if !independent {
            continue;
        }
        if cols.len() < n - 1 {
            cols = trial;
        } else if extra.is_none() {
            extra = Some(a);
        }
    }
    (CMatrix::from_columns(&cols), extra.expect("a complement direction exists"))
}

/// Eigenvector of a single matrix: the eigenvalue with the largest eigenspace
/// wins, ties broken by lexicographic `(re, im)`; within the eigenspace the
/// projection of the first sufficiently represented unit vector is taken.
fn preferred_eigenvector(a: &CMatrix, tol: &Tolerances) -> Result<CVector> {
    let n = a.nrows();
    let scale = fro_norm(a).max(1.0);
    let threshold = tol.rank_rel * scale;
    let mut best: Option<(usize, C64, CMatrix)> = None;
    for cluster in eigen_clusters(a, tol)? {
        let kernel = null_space(&(a - identity(n) * cluster.value), threshold);
        let dim = kernel.ncols();
        if dim == 0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bd, bv, _)) => {
                dim > *bd || (dim == *bd && lex_cmp(cluster.value, *bv, tol.eig_cluster).is_lt())
            }
        };
        if better {
            best = Some((dim, cluster.value, kernel));
        }
    }
    let (_, _, kernel) = best.ok_or_else(|| {
        Error::Tolerance("no eigenvector found at the computed eigenvalues; try a looser rank_rel".into())
    })?;
    let cutoff = 0.5 / (n as f64).sqrt();
    for i in 0..n {
        let mut e = CVector::zeros(n);
        e[i] = ONE;
        let p = &kernel * (kernel.adjoint() * &e);
        if p.norm() >= cutoff {
            return Ok(p.normalize());
        }
    }
    Ok(kernel.column(0).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::fixtures::*;
    use crate::numkit::c64;

    fn proportional(v: &CVector, expected: &[f64]) -> bool {
        let e = CVector::from_iterator(expected.len(), expected.iter().map(|&x| c64(x, 0.0)));
        let e = e.normalize();
        let overlap = (e.adjoint() * v)[(0, 0)].norm();
        (overlap - 1.0).abs() < 1e-10
    }

    #[test]
    fn single_nilpotent_matrix() {
        let ce = common_eigenvector(&[g2_y()], &Tolerances::default()).unwrap();
        assert!(proportional(&ce.vector, &[1.0, -1.0]));
        assert!(ce.weights[0].norm() < 1e-12);
    }

    #[test]
    fn g2_family() {
        let ce = common_eigenvector(&[g2_y(), g2_x()], &Tolerances::default()).unwrap();
        assert!(proportional(&ce.vector, &[1.0, -1.0]));
        assert!(ce.weights[0].norm() < 1e-12);
        assert!((ce.weights[1] - c64(-0.5, 0.0)).norm() < 1e-12);
        // direct multiplication check
        let v = CVector::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)]);
        assert!((g2_x() * &v + &v * c64(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn commuting_diagonal_pair_picks_lexicographically_first_axis() {
        let ce = common_eigenvector(&[diag(&[1.0, 2.0]), diag(&[3.0, 4.0])], &Tolerances::default()).unwrap();
        assert!(proportional(&ce.vector, &[1.0, 0.0]));
        assert!((ce.weights[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((ce.weights[1] - c64(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn larger_eigenspace_wins_the_tie_break() {
        let ce = common_eigenvector(&[diag(&[5.0, 1.0, 5.0])], &Tolerances::default()).unwrap();
        assert!((ce.weights[0] - c64(5.0, 0.0)).norm() < 1e-12);
        assert!(proportional(&ce.vector, &[1.0, 0.0, 0.0]));
    }

    #[test]
    fn dependent_spanning_set_is_accepted() {
        let y = g2_y();
        let ce = common_eigenvector(&[y.clone(), g2_x(), &y * c64(3.0, 0.0)], &Tolerances::default()).unwrap();
        assert_eq!(ce.weights.len(), 3);
        assert!((ce.weights[1] - c64(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sl2_is_rejected() {
        let mats = [unit(2, 0, 1), unit(2, 1, 0), diag(&[1.0, -1.0])];
        assert!(matches!(
            common_eigenvector(&mats, &Tolerances::default()),
            Err(Error::Classification(_))
        ));
    }

    #[test]
    fn upper_triangular_borel_of_size_three() {
        let tol = Tolerances::default();
        let mats = vec![
            diag(&[1.0, 2.0, 3.0]),
            diag(&[0.0, 1.0, -1.0]),
            unit(3, 0, 1),
            unit(3, 1, 2),
            unit(3, 0, 2),
        ];
        let ce = common_eigenvector(&mats, &tol).unwrap();
        for (m, w) in mats.iter().zip(&ce.weights) {
            assert!((m * &ce.vector - &ce.vector * *w).norm() < 1e-10);
        }
    }
}
