use super::lie_theorem::common_eigenvector;
use super::series::{classify, derived_series};
use super::{LieAlgebra, OperatorFamily, StructureConstants};
use crate::error::{Error, Result};
use crate::numkit::{normalize_phase, range_basis, CMatrix, CVector, Tolerances, C64, ONE};

/// A Jordan–Hölder basis: the first `i` adapted generators span an ideal
/// `L_i` for every `i`, and `L_k = [L, L]`.
#[derive(Debug, Clone)]
pub struct JordanHolderFlag {
    /// Column `c` holds the original-basis coordinates of adapted generator `c`.
    pub change_of_basis: CMatrix,
    pub adapted: LieAlgebra,
    pub ideal_dims: Vec<usize>,
    pub k: usize,
    /// `[L, L_i] ⊆ L_{i-1}` holds in the adapted basis.
    pub nilpotent_shape: bool,
}

impl JordanHolderFlag {
    pub fn constants(&self) -> &StructureConstants {
        self.adapted.constants()
    }

    /// Converts adapted dual coordinates `(f(x'_1), …)` to original dual coordinates.
    pub fn to_original_coords(&self, adapted: &[C64], tol: &Tolerances) -> Result<Vec<C64>> {
        // f(x'_c) = Σ_i P[i][c] f(x_i)  ⇒  f_orig = P^{-T} f_adapted
        let n = adapted.len();
        let rhs = CMatrix::from_iterator(n, 1, adapted.iter().copied());
        let sol = crate::numkit::solve_linear(&self.change_of_basis.transpose(), &rhs, tol)?;
        Ok(sol.iter().copied().collect())
    }
}

/// Largest `|c^h_{ij}|` with `h > i`, `i < j` (violations of the triangular shape).
pub(crate) fn triangular_defect(sc: &StructureConstants) -> f64 {
    let n = sc.dim();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            for h in i + 1..n {
                worst = worst.max(sc.c(h, i, j).norm());
            }
        }
    }
    worst
}

/// Largest `|c^i_{ij}|` with `i < j` (diagonal constants, zero for nilpotent shape).
pub(crate) fn diagonal_defect(sc: &StructureConstants) -> f64 {
    let n = sc.dim();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            worst = worst.max(sc.c(i, i, j).norm());
        }
    }
    worst
}

/// Builds a Jordan–Hölder flag: common eigenvectors of `ad(L)` on successive
/// quotients inside `[L, L]` give `L_1 ⊂ … ⊂ L_k = [L, L]`; the remaining
/// directions are original basis vectors taken greedily in index order.
pub fn jordan_holder_flag(alg: &LieAlgebra, tol: &Tolerances) -> Result<JordanHolderFlag> {
    let sc = alg.constants();
    let class = classify(sc, tol);
    if !class.is_solvable() {
        return Err(Error::Classification(class.to_string()));
    }
    let n = alg.dim();
    let derived = derived_series(sc, tol).subspaces[1].clone();
    let k = derived.ncols();
    let ads: Vec<CMatrix> = (0..n).map(|a| sc.ad(a)).collect();

    let mut flag: Vec<CVector> = Vec::with_capacity(n);
    for _ in 0..k {
        let quotient = if flag.is_empty() {
            derived.clone()
        } else {
            let current = range_basis(&CMatrix::from_columns(&flag), 1e-8);
            let projected = &derived - &current * (current.adjoint() * &derived);
            range_basis(&projected, 0.5)
        };
        let acting: Vec<CMatrix> = ads.iter().map(|ad| quotient.adjoint() * ad * &quotient).collect();
        let ce = common_eigenvector(&acting, tol)?;
        flag.push(normalize_phase(&(&quotient * &ce.vector)));
    }
    for a in 0..n {
        if flag.len() == n {
            break;
        }
        let mut e = CVector::zeros(n);
        e[a] = ONE;
        let mut trial = flag.clone();
        trial.push(e.clone());
        if range_basis(&CMatrix::from_columns(&trial), 1e-8).ncols() == trial.len() {
            flag.push(e);
        }
    }
    if flag.len() != n {
        return Err(Error::Flag(format!("could only build {} of {n} flag directions", flag.len())));
    }
    let change_of_basis = CMatrix::from_columns(&flag);

    let fam = alg.family();
    let mut labels = Vec::with_capacity(n);
    let mut gens = Vec::with_capacity(n);
    for c in 0..n {
        let col: Vec<C64> = change_of_basis.column(c).iter().copied().collect();
        gens.push(fam.element(&col));
        labels.push(adapted_label(&col, fam.labels(), c));
    }
    let adapted = LieAlgebra::new(OperatorFamily::new(labels, gens, tol)?, tol)?;

    let asc = adapted.constants();
    let bound = tol.residual * asc.scale();
    let defect = triangular_defect(asc);
    if defect > bound {
        return Err(Error::Flag(format!(
            "adapted constants violate the triangular shape by {defect:.3e}"
        )));
    }
    let nilpotent_shape = diagonal_defect(asc) <= bound;

    Ok(JordanHolderFlag {
        change_of_basis,
        adapted,
        ideal_dims: (0..=n).collect(),
        k,
        nilpotent_shape,
    })
}

fn adapted_label(col: &[C64], labels: &[String], c: usize) -> String {
    let support: Vec<usize> = (0..col.len()).filter(|&i| col[i].norm() > 1e-12).collect();
    if support.len() == 1 && (col[support[0]] - ONE).norm() < 1e-12 {
        labels[support[0]].clone()
    } else {
        format!("b{}", c + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::fixtures::*;
    use crate::numkit::{fro_norm, identity};

    fn algebra(labels: &[&str], gens: Vec<CMatrix>) -> LieAlgebra {
        let tol = Tolerances::default();
        let fam = OperatorFamily::new(labels.iter().map(|s| s.to_string()).collect(), gens, &tol).unwrap();
        LieAlgebra::new(fam, &tol).unwrap()
    }

    #[test]
    fn g2_is_already_adapted() {
        let alg = algebra(&["y", "x"], vec![g2_y(), g2_x()]);
        let flag = jordan_holder_flag(&alg, &Tolerances::default()).unwrap();
        assert_eq!(flag.k, 1);
        assert!(fro_norm(&(&flag.change_of_basis - identity(2))) < 1e-12);
        assert_eq!(flag.adapted.family().labels(), &["y".to_string(), "x".to_string()]);
        assert!(!flag.nilpotent_shape);
        assert_eq!(flag.ideal_dims, vec![0, 1, 2]);
    }

    #[test]
    fn abelian_keeps_the_basis() {
        let alg = algebra(&["a", "b"], vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]);
        let flag = jordan_holder_flag(&alg, &Tolerances::default()).unwrap();
        assert_eq!(flag.k, 0);
        assert!(fro_norm(&(&flag.change_of_basis - identity(2))) < 1e-15);
        assert!(flag.nilpotent_shape);
    }

    #[test]
    fn shuffled_heisenberg_puts_the_centre_first() {
        let tol = Tolerances::default();
        let (p, q, z) = (unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2));
        let alg = algebra(&["q", "z", "p"], vec![q, z.clone(), p]);
        let flag = jordan_holder_flag(&alg, &tol).unwrap();
        assert_eq!(flag.k, 1);
        assert!(flag.nilpotent_shape);
        assert!(fro_norm(&(flag.adapted.family().generator(0) - &z)) < 1e-12);
        assert_eq!(flag.adapted.family().labels(), &["z".to_string(), "q".to_string(), "p".to_string()]);
        // [L, L_i] ⊆ L_{i-1} by span computations in the adapted basis
        let asc = flag.constants();
        for i in 0..3 {
            for g in 0..3 {
                for h in i..3 {
                    assert!(asc.bracket_coeff(g, i, h).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sl2_has_no_flag() {
        let alg = algebra(&["e", "f", "h"], vec![unit(2, 0, 1), unit(2, 1, 0), diag(&[1.0, -1.0])]);
        assert!(matches!(
            jordan_holder_flag(&alg, &Tolerances::default()),
            Err(Error::Classification(_))
        ));
    }

    #[test]
    fn borel_subalgebra_flag_is_triangular() {
        let tol = Tolerances::default();
        // basis deliberately starts outside the derived algebra
        let alg = algebra(
            &["h1", "e13", "h2", "e12", "e23"],
            vec![diag(&[1.0, 2.0, 3.0]), unit(3, 0, 2), diag(&[0.0, 1.0, -1.0]), unit(3, 0, 1), unit(3, 1, 2)],
        );
        let flag = jordan_holder_flag(&alg, &tol).unwrap();
        assert_eq!(flag.k, 3);
        assert!(triangular_defect(flag.constants()) < 1e-12);
        assert!(!flag.nilpotent_shape);
        let back = flag.to_original_coords(&[C64::new(0.0, 0.0); 5], &tol).unwrap();
        assert!(back.iter().all(|z| z.norm() == 0.0));
    }
}
