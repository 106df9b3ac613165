//! Joint spectrum of a solvable family: weights, component spectra, Koszul
//! homology at a character, and the search over the finite candidate grid.

mod checks;
mod oracle;

use crate::error::{Error, Result};
use crate::koszul::{binomial, boundary, exterior_basis, xbar, Character, ExteriorIndex};
use crate::liealg::flag::{jordan_holder_flag, triangular_defect, JordanHolderFlag};
use crate::liealg::{classify, Classification};
use crate::liealg::{LieAlgebra, OperatorFamily, StructureConstants};
use crate::numkit::{
    eigen_clusters, fro_norm, lex_cmp, lex_cmp_tuple, max_dist, numerical_rank_scaled, Tolerances, C64, ZERO,
};

pub use checks::{
    fine_grid_scan, nilpotent_bound_check, projection_check, FineGridReport, NilpotentBoundReport, ProjectionReport,
};
pub use oracle::taylor_oracle;

/// `r_α` for every tuple `α` over the generators preceding `x_j`.
#[derive(Debug, Clone)]
pub struct WeightTable {
    pub j: usize,
    pub entries: Vec<(ExteriorIndex, C64)>,
}

impl WeightTable {
    pub fn get(&self, alpha: &ExteriorIndex) -> Option<C64> {
        self.entries.iter().find(|(a, _)| a == alpha).map(|(_, r)| *r)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|(_, r)| r.norm()).fold(0.0, f64::max)
    }
}

/// `r_α = Σ_k c^{i_k}_{i_k j}` for all `α ⊆ {0, …, j-1}`, in tuple order.
pub fn weights(sc: &StructureConstants, j: usize, tol: &Tolerances) -> Result<WeightTable> {
    if j >= sc.dim() {
        return Err(Error::Dimension(format!("generator index {j} outside 0..{}", sc.dim())));
    }
    let defect = triangular_defect(sc);
    if defect > tol.residual * sc.scale() {
        return Err(Error::Shape(format!(
            "triangular defect {defect:.3e}"
        )));
    }
    let basis = exterior_basis(1, j);
    let mut entries = Vec::with_capacity(1 << j);
    for p in 0..=j {
        for alpha in basis.tuples(p) {
            let r: C64 = alpha.indices().iter().map(|&i| sc.c(i, i, j)).sum();
            entries.push((alpha.clone(), r));
        }
    }
    Ok(WeightTable { j, entries })
}

/// Merges values closer than `radius`, keeping the first representative.
pub(crate) fn dedup_values(values: &mut Vec<C64>, radius: f64) {
    values.sort_by(|a, b| lex_cmp(*a, *b, 0.0));
    let mut out: Vec<C64> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        if !out.iter().any(|w| (w - v).norm() <= radius) {
            out.push(v);
        }
    }
    out.sort_by(|a, b| lex_cmp(*a, *b, radius));
    *values = out;
}

/// `Sp(x̄_j) = ∪_α (Sp(x_j) - r_α)`, cross-checked against the eigenvalues
/// of the assembled `x̄_j`.
pub fn component_spectrum(alg: &LieAlgebra, j: usize, tol: &Tolerances) -> Result<Vec<C64>> {
    let table = weights(alg.constants(), j, tol)?;
    let x = alg.family().generator(j);
    let mut formula = Vec::new();
    for cluster in eigen_clusters(x, tol)? {
        for (_, r) in &table.entries {
            formula.push(cluster.value - r);
        }
    }
    dedup_values(&mut formula, tol.eig_cluster);

    let xb = xbar(alg, j, tol)?;
    let radius = tol.eig_cluster * fro_norm(x).max(1.0);
    let direct: Vec<C64> = eigen_clusters(&xb, tol)?.into_iter().map(|c| c.value).collect();
    let unmatched = |a: &[C64], b: &[C64]| a.iter().find(|v| b.iter().all(|w| (*v - w).norm() > radius)).copied();
    if let Some(v) = unmatched(&direct, &formula).or_else(|| unmatched(&formula, &direct)) {
        return Err(Error::Internal(format!(
            "component spectrum of generator {} disagrees with the eigenvalues of x̄ at {v}",
            j + 1
        )));
    }
    Ok(formula)
}

/// Magnitude used as the floor of every rank cutoff in the complex of `alg`.
fn homology_scale(alg: &LieAlgebra, f: &Character) -> f64 {
    let fmax = f.coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
    alg.family().max_norm().max(fmax).max(1.0)
}

/// `(dim H_0, …, dim H_m)` of `(E⊗∧L, d(f))`.
pub fn homology_dims(alg: &LieAlgebra, f: &Character, tol: &Tolerances) -> Result<Vec<usize>> {
    let bf = boundary(alg, f, tol)?;
    let m = alg.dim();
    let d = alg.space_dim();
    let scale = homology_scale(alg, f);
    let ranks: Vec<usize> = bf.maps().iter().map(|dm| numerical_rank_scaled(dm, tol, scale)).collect();
    let rank = |q: isize| -> usize {
        if q < 0 {
            0
        } else {
            ranks.get(q as usize).copied().unwrap_or(0)
        }
    };
    let mut betti = Vec::with_capacity(m + 1);
    for p in 0..=m {
        let size = d * binomial(m, p);
        let used = rank(p as isize - 1) + rank(p as isize);
        if used > size {
            return Err(Error::Tolerance(format!(
                "negative homology dimension in degree {p}: ranks {} + {} exceed {size}; adjust rank_rel",
                rank(p as isize - 1),
                rank(p as isize)
            )));
        }
        betti.push(size - used);
    }
    let euler: isize = betti.iter().enumerate().map(|(p, &b)| if p % 2 == 0 { b as isize } else { -(b as isize) }).sum();
    if m >= 1 && euler != 0 {
        return Err(Error::Internal(format!("Euler characteristic {euler} should vanish")));
    }
    Ok(betti)
}

pub fn is_in_spectrum(alg: &LieAlgebra, f: &Character, tol: &Tolerances) -> Result<bool> {
    Ok(homology_dims(alg, f, tol)?.iter().any(|&b| b > 0))
}

#[derive(Debug, Clone)]
pub struct SpectrumPoint {
    /// Values on the adapted generators.
    pub adapted: Character,
    /// Values on the generators as given.
    pub original: Vec<C64>,
    pub betti: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub classification: Classification,
    pub flag: JordanHolderFlag,
    /// `candidate_grid[j] = Sp(x̄_j)` for the adapted generators.
    pub candidate_grid: Vec<Vec<C64>>,
    pub candidates_tested: usize,
    /// Sorted lexicographically by adapted coordinates.
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumResult {
    pub fn adapted(&self) -> &LieAlgebra {
        &self.flag.adapted
    }

    pub fn adapted_points(&self) -> Vec<Vec<C64>> {
        self.points.iter().map(|p| p.adapted.coords.clone()).collect()
    }

    pub fn original_points(&self) -> Vec<Vec<C64>> {
        self.points.iter().map(|p| p.original.clone()).collect()
    }

    /// Max-norm distance from `coords` to the product grid.
    pub fn grid_distance(&self, coords: &[C64]) -> f64 {
        coords
            .iter()
            .zip(&self.candidate_grid)
            .map(|(c, values)| values.iter().map(|v| (c - v).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

/// Cutoff under which a component value in the derived block is read as zero.
fn derived_block_radius(alg: &LieAlgebra, tol: &Tolerances) -> f64 {
    tol.eig_cluster * alg.family().max_norm().max(1.0)
}

/// Computes `Sp(L, E)` by testing every character of the candidate grid.
pub fn joint_spectrum(fam: &OperatorFamily, tol: &Tolerances) -> Result<SpectrumResult> {
    tol.validate()?;
    let alg = LieAlgebra::new(fam.clone(), tol)?;
    let classification = classify(alg.constants(), tol);
    if !classification.is_solvable() {
        return Err(Error::Classification(classification.to_string()));
    }
    let flag = jordan_holder_flag(&alg, tol)?;
    let adapted = &flag.adapted;
    let m = adapted.dim();
    let mut grid = Vec::with_capacity(m);
    for j in 0..m {
        grid.push(component_spectrum(adapted, j, tol)?);
    }

    let radius = derived_block_radius(adapted, tol);
    let choices: Vec<Vec<C64>> = grid
        .iter()
        .enumerate()
        .map(|(j, values)| {
            if j < flag.k {
                if values.iter().any(|v| v.norm() <= radius) {
                    vec![ZERO]
                } else {
                    Vec::new()
                }
            } else {
                values.clone()
            }
        })
        .collect();

    let mut points: Vec<SpectrumPoint> = Vec::new();
    let mut tested = 0usize;
    if choices.iter().all(|c| !c.is_empty()) {
        let mut odometer = vec![0usize; m];
        'outer: loop {
            let coords: Vec<C64> = (0..m).map(|j| choices[j][odometer[j]]).collect();
            let f = Character::new(coords);
            tested += 1;
            let betti = homology_dims(adapted, &f, tol)?;
            if betti.iter().any(|&b| b > 0) {
                if !points.iter().any(|p| max_dist(&p.adapted.coords, &f.coords) <= tol.eig_cluster) {
                    let original = flag.to_original_coords(&f.coords, tol)?;
                    points.push(SpectrumPoint { adapted: f, original, betti });
                }
            }
            for j in (0..m).rev() {
                odometer[j] += 1;
                if odometer[j] < choices[j].len() {
                    continue 'outer;
                }
                odometer[j] = 0;
            }
            break;
        }
    }
    if points.is_empty() {
        return Err(Error::Internal(format!(
            "no spectrum point among {tested} candidates; the spectrum of a solvable family is nonempty, so tolerances are too tight"
        )));
    }
    points.sort_by(|a, b| lex_cmp_tuple(&a.adapted.coords, &b.adapted.coords, tol.eig_cluster));
    Ok(SpectrumResult { classification, flag, candidate_grid: grid, candidates_tested: tested, points })
}

/// Symmetric difference of two point sets under max-norm matching.
#[derive(Debug, Clone, Default)]
pub struct SetComparison {
    /// In `expected` but not matched in `actual`.
    pub missing: Vec<Vec<C64>>,
    /// In `actual` but not matched in `expected`.
    pub extra: Vec<Vec<C64>>,
    /// Largest nearest-neighbour distance among matched points.
    pub max_matched_distance: f64,
}

impl SetComparison {
    pub fn equal(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn compare_point_sets(expected: &[Vec<C64>], actual: &[Vec<C64>], radius: f64) -> SetComparison {
    let nearest = |p: &Vec<C64>, set: &[Vec<C64>]| set.iter().map(|q| max_dist(p, q)).fold(f64::INFINITY, f64::min);
    let mut out = SetComparison::default();
    for p in expected {
        let d = nearest(p, actual);
        if d > radius {
            out.missing.push(p.clone());
        } else {
            out.max_matched_distance = out.max_matched_distance.max(d);
        }
    }
    for p in actual {
        let d = nearest(p, expected);
        if d > radius {
            out.extra.push(p.clone());
        } else {
            out.max_matched_distance = out.max_matched_distance.max(d);
        }
    }
    out
}

/// Merges tuples closer than `radius` and sorts them lexicographically.
pub fn dedup_points(points: &mut Vec<Vec<C64>>, radius: f64) {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(points.len());
    for p in points.iter() {
        if !out.iter().any(|q| max_dist(p, q) <= radius) {
            out.push(p.clone());
        }
    }
    out.sort_by(|a, b| lex_cmp_tuple(a, b, radius));
    *points = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::testutil::algebra;
    use crate::liealg::fixtures::*;
    use crate::numkit::c64;

    fn g2() -> LieAlgebra {
        algebra(&["y", "x"], vec![g2_y(), g2_x()])
    }

    fn close(a: &[C64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - c64(*y, 0.0)).norm() < 1e-10)
    }

    #[test]
    fn g2_weights() {
        let tol = Tolerances::default();
        let w = weights(g2().constants(), 1, &tol).unwrap();
        assert_eq!(w.entries.len(), 2);
        assert!(w.get(&ExteriorIndex(vec![])).unwrap().norm() == 0.0);
        assert!((w.get(&ExteriorIndex(vec![0])).unwrap() - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn weights_are_additive() {
        let tol = Tolerances::default();
        let alg = algebra(
            &["e13", "e12", "e23", "h"],
            vec![unit(3, 0, 2), unit(3, 0, 1), unit(3, 1, 2), diag(&[1.0, 0.0, -2.0])],
        );
        let w = weights(alg.constants(), 3, &tol).unwrap();
        for (alpha, r) in &w.entries {
            let parts: C64 = alpha.indices().iter().map(|&i| w.get(&ExteriorIndex(vec![i])).unwrap()).sum();
            assert!((r - parts).norm() < 1e-12);
        }
    }

    #[test]
    fn weights_reject_unadapted_constants() {
        let alg = algebra(&["x", "y"], vec![g2_x(), g2_y()]);
        assert!(matches!(weights(alg.constants(), 1, &Tolerances::default()), Err(Error::Shape(_))));
    }

    #[test]
    fn g2_component_spectra() {
        let tol = Tolerances::default();
        let c1 = component_spectrum(&g2(), 0, &tol).unwrap();
        assert!(close(&c1, &[0.0]));
        let c2 = component_spectrum(&g2(), 1, &tol).unwrap();
        assert!(close(&c2, &[-1.5, -0.5, 0.5]), "{c2:?}");
    }

    #[test]
    fn commutative_component_spectrum_is_plain() {
        let tol = Tolerances::default();
        let alg = algebra(&["a", "b"], vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]);
        assert!(close(&component_spectrum(&alg, 1, &tol).unwrap(), &[3.0, 4.0]));
    }

    #[test]
    fn g2_homology() {
        let tol = Tolerances::default();
        let b = homology_dims(&g2(), &Character::from_real(&[0.0, 0.5]), &tol).unwrap();
        assert!(b.iter().sum::<usize>() > 0);
        let b = homology_dims(&g2(), &Character::from_real(&[0.0, -0.5]), &tol).unwrap();
        assert_eq!(b, vec![0, 0, 0]);
        assert!(is_in_spectrum(&g2(), &Character::from_real(&[0.0, -1.5]), &tol).unwrap());
        assert!(!is_in_spectrum(&g2(), &Character::from_real(&[0.0, 5.0]), &tol).unwrap());
    }

    #[test]
    fn single_operator_cokernel() {
        let tol = Tolerances::default();
        let alg = algebra(&["x"], vec![real(2, &[1.0, 1.0, 0.0, 1.0])]);
        assert_eq!(homology_dims(&alg, &Character::from_real(&[1.0]), &tol).unwrap(), vec![1, 1]);
        let id = algebra(&["i"], vec![identity_matrix(2)]);
        assert!(is_in_spectrum(&id, &Character::from_real(&[1.0]), &tol).unwrap());
        // rounding in f must not hide the homology of a zero boundary
        let near = Character::new(vec![c64(1.0 + 1e-15, 0.0)]);
        assert_eq!(homology_dims(&id, &near, &tol).unwrap(), vec![2, 2]);
    }

    fn identity_matrix(d: usize) -> crate::numkit::CMatrix {
        crate::numkit::identity(d)
    }

    #[test]
    fn g2_joint_spectrum() {
        let tol = Tolerances::default();
        let fam = g2().family().clone();
        let res = joint_spectrum(&fam, &tol).unwrap();
        let pts = res.original_points();
        assert_eq!(pts.len(), 2);
        assert!(close(&pts[0], &[0.0, -1.5]));
        assert!(close(&pts[1], &[0.0, 0.5]));
        assert_eq!(res.candidates_tested, 3);
    }

    #[test]
    fn diagonal_pair_joint_spectrum() {
        let tol = Tolerances::default();
        let fam = algebra(&["a", "b"], vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]).family().clone();
        let pts = joint_spectrum(&fam, &tol).unwrap().original_points();
        assert_eq!(pts.len(), 2);
        assert!(close(&pts[0], &[1.0, 3.0]));
        assert!(close(&pts[1], &[2.0, 4.0]));
    }

    #[test]
    fn heisenberg_joint_spectrum() {
        let tol = Tolerances::default();
        let fam = algebra(&["p", "q", "z"], vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)]).family().clone();
        let res = joint_spectrum(&fam, &tol).unwrap();
        assert_eq!(res.classification, Classification::Nilpotent);
        assert_eq!(res.original_points().len(), 1);
        assert!(close(&res.original_points()[0], &[0.0, 0.0, 0.0]));
    }

    #[test]
    fn sl2_is_rejected() {
        let fam = algebra(&["e", "f", "h"], vec![unit(2, 0, 1), unit(2, 1, 0), diag(&[1.0, -1.0])]).family().clone();
        assert!(matches!(joint_spectrum(&fam, &Tolerances::default()), Err(Error::Classification(_))));
    }

    #[test]
    fn point_set_comparison() {
        let a = vec![vec![c64(0.0, 0.0)], vec![c64(1.0, 0.0)]];
        let b = vec![vec![c64(1e-9, 0.0)], vec![c64(2.0, 0.0)]];
        let cmp = compare_point_sets(&a, &b, 1e-7);
        assert_eq!(cmp.missing.len(), 1);
        assert_eq!(cmp.extra.len(), 1);
        assert!(!cmp.equal());
    }
}
