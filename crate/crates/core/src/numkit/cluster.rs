//! Grouping of computed eigenvalues into numerically distinct eigenvalues.
//!
//! A defective eigenvalue of multiplicity `m` comes out of the Schur iteration
//! as a ring of `m` values with spread of order `eps^(1/m)`, far wider than any
//! sensible dedup radius. The ring's mean is accurate to working precision, so
//! clusters are formed by single linkage at a descending ladder of radii and a
//! candidate cluster is accepted only if its mean has generalized eigenspace
//! dimension equal to the cluster size.

use super::{eigenvalues, fro_norm, identity, lex_cmp, null_space, CMatrix, Tolerances, C64};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCluster {
    pub value: C64,
    pub multiplicity: usize,
}

const RADIUS_LADDER: [f64; 12] = [
    3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7,
];

/// Dimension of the generalized eigenspace of `a` at `mu`, computed as the
/// stable length of the chain `K_{q+1} = ker(P_{K_q}^perp (a - mu))`.
pub fn generalized_kernel_dim(a: &CMatrix, mu: C64, threshold: f64) -> usize {
    let n = a.nrows();
    let shifted = a - identity(n) * mu;
    let mut basis = CMatrix::zeros(n, 0);
    loop {
        let projected = if basis.ncols() == 0 {
            shifted.clone()
        } else {
            &shifted - &basis * (basis.adjoint() * &shifted)
        };
        let next = null_space(&projected, threshold);
        if next.ncols() <= basis.ncols() || next.ncols() == n {
            return next.ncols().max(basis.ncols());
        }
        basis = next;
    }
}

fn linkage_component(values: &[C64], seed: usize, radius: f64) -> Vec<usize> {
    let mut member = vec![false; values.len()];
    member[seed] = true;
    let mut stack = vec![seed];
    while let Some(i) = stack.pop() {
        for j in 0..values.len() {
            if !member[j] && (values[i] - values[j]).norm() <= radius {
                member[j] = true;
                stack.push(j);
            }
        }
    }
    (0..values.len()).filter(|&i| member[i]).collect()
}

/// Distinct eigenvalues of `a` with algebraic multiplicities, sorted
/// lexicographically by `(re, im)`.
pub fn eigen_clusters(a: &CMatrix, tol: &Tolerances) -> Result<Vec<EigenCluster>> {
    let raw = eigenvalues(a)?;
    let scale = fro_norm(a).max(1.0);
    let threshold = tol.rank_rel * scale;
    let mut remaining = raw;
    remaining.sort_by(|x, y| lex_cmp(*x, *y, 0.0));
    let mut radii: Vec<f64> = RADIUS_LADDER.iter().map(|r| r * scale).collect();
    radii.push(tol.eig_cluster);
    radii.retain(|&r| r >= tol.eig_cluster);

    let mut clusters = Vec::new();
    while !remaining.is_empty() {
        let mut accepted: Option<Vec<usize>> = None;
        let mut last: Option<Vec<usize>> = None;
        for &radius in &radii {
            let group = linkage_component(&remaining, 0, radius);
            if last.as_ref() == Some(&group) {
                continue;
            }
            let mean = mean_of(&remaining, &group);
            if generalized_kernel_dim(a, mean, threshold) == group.len() {
                accepted = Some(group);
                break;
            }
            last = Some(group);
        }
        let group = accepted.unwrap_or_else(|| linkage_component(&remaining, 0, tol.eig_cluster));
        let mean = mean_of(&remaining, &group);
        clusters.push(EigenCluster { value: mean, multiplicity: group.len() });
        let mut idx = 0;
        remaining.retain(|_| {
            let keep = !group.contains(&idx);
            idx += 1;
            keep
        });
    }
    clusters.sort_by(|x, y| lex_cmp(x.value, y.value, 0.0));
    Ok(clusters)
}

fn mean_of(values: &[C64], group: &[usize]) -> C64 {
    let sum: C64 = group.iter().map(|&i| values[i]).sum();
    sum / group.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{c64, solve_linear};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn conjugate(m: &CMatrix, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = m.nrows();
        let g = identity(n)
            + CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)));
        let tol = Tolerances::default();
        let ginv = solve_linear(&g, &identity(n), &tol).unwrap();
        &g * m * ginv
    }

    #[test]
    fn defective_two_by_two_collapses() {
        let y = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0), c64(-1.0, 0.0)]);
        let cl = eigen_clusters(&y, &Tolerances::default()).unwrap();
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 2);
        assert!(cl[0].value.norm() < 1e-14);
    }

    #[test]
    fn jordan_block_of_size_four_after_conjugation() {
        let mut j = CMatrix::zeros(5, 5);
        for i in 0..3 {
            j[(i, i + 1)] = c64(1.0, 0.0);
        }
        for i in 0..4 {
            j[(i, i)] = c64(0.5, 0.0);
        }
        j[(4, 4)] = c64(-1.0, 0.0);
        let a = conjugate(&j, 5);
        let cl = eigen_clusters(&a, &Tolerances::default()).unwrap();
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].multiplicity, 1);
        assert!((cl[0].value - c64(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(cl[1].multiplicity, 4);
        assert!((cl[1].value - c64(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn close_but_distinct_eigenvalues_stay_apart() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(0.0, 0.0),
            c64(1e-4, 0.0),
            c64(2.0, 0.0),
        ]));
        let a = conjugate(&d, 9);
        let cl = eigen_clusters(&a, &Tolerances::default()).unwrap();
        assert_eq!(cl.len(), 3);
        assert!(cl.iter().all(|c| c.multiplicity == 1));
    }

    #[test]
    fn generalized_kernel_of_jordan_block() {
        let mut j = CMatrix::zeros(3, 3);
        j[(0, 1)] = c64(1.0, 0.0);
        j[(1, 2)] = c64(1.0, 0.0);
        assert_eq!(generalized_kernel_dim(&j, c64(0.0, 0.0), 1e-10), 3);
        assert_eq!(generalized_kernel_dim(&j, c64(1.0, 0.0), 1e-10), 0);
    }
}
