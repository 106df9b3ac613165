//! The chain complex `(E ⊗ ∧L, d(f))` of a character `f`, the derivation
//! `θ(x)`, the operators `L_p`, and the homotopy built from their inverses.
//!
//! Every function here assumes an adapted basis where it matters (`theta`,
//! `lp_operator`, the split and homotopy routines); `boundary` works in any
//! basis.

mod exterior;
mod homotopy;
mod split;

use crate::error::{Error, Result};
use crate::liealg::{LieAlgebra, StructureConstants};
use crate::numkit::{fro_norm, identity, CMatrix, Tolerances, C64, ZERO};

pub use exterior::{binomial, exterior_basis, normalize_wedge, ExteriorIndex, GradedBasis};
pub use homotopy::{homotopy, HomotopyFamily, HomotopyResiduals};
pub use split::{split_check, SplitReport};

/// A linear functional on the algebra, by its values on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    pub coords: Vec<C64>,
}

impl Character {
    pub fn new(coords: Vec<C64>) -> Self {
        Character { coords }
    }

    pub fn zero(m: usize) -> Self {
        Character { coords: vec![ZERO; m] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Character { coords: values.iter().map(|&v| C64::new(v, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Largest `|f([x_a, x_b])|` over basis pairs.
    pub fn derived_defect(&self, sc: &StructureConstants) -> f64 {
        let n = sc.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                let v: C64 = (0..n).map(|h| sc.bracket_coeff(a, b, h) * self.coords[h]).sum();
                worst = worst.max(v.norm());
            }
        }
        worst
    }
}

/// Fails unless `f` has the right length and vanishes on `[L, L]`.
pub fn check_character(sc: &StructureConstants, f: &Character, tol: &Tolerances) -> Result<()> {
    if f.dim() != sc.dim() {
        return Err(Error::Dimension(format!(
            "character has {} coordinates, algebra has dimension {}",
            f.dim(),
            sc.dim()
        )));
    }
    if f.coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let fmax = f.coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = tol.eig_cluster.max(tol.residual) * sc.scale() * (1.0 + fmax);
    let defect = f.derived_defect(sc);
    if defect > bound {
        return Err(Error::NotCharacter(defect));
    }
    Ok(())
}

/// The boundary maps `d_{p-1}(f): E⊗∧^p L → E⊗∧^{p-1} L` for `1 ≤ p ≤ m`.
#[derive(Debug, Clone)]
pub struct BoundaryFamily {
    pub character: Character,
    pub basis: GradedBasis,
    /// `maps[q]` is `d_q`, from degree `q + 1` to degree `q`.
    maps: Vec<CMatrix>,
}

impl BoundaryFamily {
    /// `d_q`, or `None` outside `0 ≤ q < m` (where the map is zero).
    pub fn d(&self, q: usize) -> Option<&CMatrix> {
        self.maps.get(q)
    }

    pub fn maps(&self) -> &[CMatrix] {
        &self.maps
    }

    /// Largest `‖d_{q} d_{q+1}‖_F / (1 + ‖d_q‖_F ‖d_{q+1}‖_F)`.
    pub fn dd_residual(&self) -> f64 {
        self.maps
            .windows(2)
            .map(|w| fro_norm(&(&w[0] * &w[1])) / (1.0 + fro_norm(&w[0]) * fro_norm(&w[1])))
            .fold(0.0, f64::max)
    }
}

/// Adds `scale · block` into the `(row_pos, col_pos)` block of size `d × d`.
fn add_block(dst: &mut CMatrix, row_pos: usize, col_pos: usize, d: usize, block: &CMatrix, scale: C64) {
    let mut view = dst.view_mut((row_pos * d, col_pos * d), (d, d));
    view += block * scale;
}

fn add_scalar_block(dst: &mut CMatrix, row_pos: usize, col_pos: usize, d: usize, value: C64) {
    for e in 0..d {
        dst[(row_pos * d + e, col_pos * d + e)] += value;
    }
}

/// Assembles the boundary maps from raw generators and constants; `gens` may
/// be empty, in which case there are no maps.
pub(crate) fn assemble_boundary(
    gens: &[CMatrix],
    sc: &StructureConstants,
    f: &[C64],
    d: usize,
) -> (GradedBasis, Vec<CMatrix>) {
    let m = gens.len();
    let basis = exterior_basis(d, m);
    let shifted: Vec<CMatrix> = gens.iter().zip(f).map(|(x, &fx)| x - identity(d) * fx).collect();
    let mut maps = Vec::with_capacity(m);
    for p in 1..=m {
        let mut dm = CMatrix::zeros(basis.block_size(p - 1), basis.block_size(p));
        for (col, alpha) in basis.tuples(p).iter().enumerate() {
            let slots = alpha.indices();
            for k in 0..p {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let row = basis.position(&alpha.without_slot(k)).expect("sub-tuple is a basis tuple");
                add_block(&mut dm, row, col, d, &shifted[slots[k]], C64::new(sign, 0.0));
            }
            for k in 0..p {
                for l in k + 1..p {
                    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
                    let rest: Vec<usize> =
                        (0..p).filter(|&s| s != k && s != l).map(|s| slots[s]).collect();
                    for h in 0..m {
                        let coeff = sc.bracket_coeff(slots[k], slots[l], h);
                        if coeff == ZERO {
                            continue;
                        }
                        let mut word = Vec::with_capacity(p - 1);
                        word.push(h);
                        word.extend_from_slice(&rest);
                        if let Some((s, beta)) = normalize_wedge(&word) {
                            let row = basis.position(&beta).expect("normalized wedge is a basis tuple");
                            add_scalar_block(&mut dm, row, col, d, coeff * (sign * s));
                        }
                    }
                }
            }
        }
        maps.push(dm);
    }
    (basis, maps)
}

/// Builds `d(f)` for a character `f` of `alg`.
pub fn boundary(alg: &LieAlgebra, f: &Character, tol: &Tolerances) -> Result<BoundaryFamily> {
    check_character(alg.constants(), f, tol)?;
    let (basis, maps) = assemble_boundary(alg.family().generators(), alg.constants(), &f.coords, alg.space_dim());
    Ok(BoundaryFamily { character: f.clone(), basis, maps })
}

/// Largest coefficient of `[x_j, x_i]` (`i < j`) outside `span(x_0, …, x_{j-1})`.
pub fn ideal_defect(sc: &StructureConstants, j: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..j {
        for h in j..sc.dim() {
            worst = worst.max(sc.c(h, i, j).norm());
        }
    }
    worst
}

/// `θ(x_j)` on `∧^p span(x_0, …, x_{j-1})` for `p = 0..=j`, without the `E` factor.
pub fn theta_wedge(sc: &StructureConstants, j: usize, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    if j >= sc.dim() {
        return Err(Error::Dimension(format!("generator index {j} outside 0..{}", sc.dim())));
    }
    let defect = ideal_defect(sc, j);
    if defect > tol.residual * sc.scale() {
        return Err(Error::Flag(format!(
            "ad(x_{}) leaves the span of the preceding generators by {defect:.3e}",
            j + 1
        )));
    }
    let basis = exterior_basis(1, j);
    let mut out = Vec::with_capacity(j + 1);
    for p in 0..=j {
        let tuples = basis.tuples(p);
        let mut th = CMatrix::zeros(tuples.len(), tuples.len());
        for (col, alpha) in tuples.iter().enumerate() {
            for k in 0..p {
                let i = alpha.indices()[k];
                for h in 0..j {
                    let coeff = sc.c(h, i, j);
                    if coeff == ZERO {
                        continue;
                    }
                    let mut word = alpha.indices().to_vec();
                    word[k] = h;
                    if let Some((s, beta)) = normalize_wedge(&word) {
                        let row = basis.position(&beta).expect("basis tuple");
                        th[(row, col)] += coeff * s;
                    }
                }
            }
        }
        out.push(th);
    }
    Ok(out)
}

/// `1_E ⊗ θ(x_j)` on `E ⊗ ∧^p L_{j}` (the span of the first `j` generators).
pub fn theta(alg: &LieAlgebra, j: usize, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    let d = alg.space_dim();
    Ok(theta_wedge(alg.constants(), j, tol)?
        .iter()
        .map(|th| th.kronecker(&identity(d)))
        .collect())
}

/// `(x_j - c) ⊗ 1 - 1 ⊗ θ(x_j)` on `E ⊗ ∧^p`, given the degree-`p` theta block.
fn shifted_operator(x: &CMatrix, shift: C64, theta_p: &CMatrix) -> CMatrix {
    let d = x.nrows();
    let count = theta_p.nrows();
    let xs = x - identity(d) * shift;
    identity(count).kronecker(&xs) - theta_p.kronecker(&identity(d))
}

/// `x̄_j = x_j ⊗ 1 - 1 ⊗ θ(x_j)` on all of `E ⊗ ∧L_j`, degree blocks on the diagonal.
pub fn xbar(alg: &LieAlgebra, j: usize, tol: &Tolerances) -> Result<CMatrix> {
    let thetas = theta_wedge(alg.constants(), j, tol)?;
    let x = alg.family().generator(j);
    let blocks: Vec<CMatrix> = thetas.iter().map(|th| shifted_operator(x, ZERO, th)).collect();
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(total, total);
    let mut at = 0;
    for b in &blocks {
        out.view_mut((at, at), (b.nrows(), b.nrows())).copy_from(b);
        at += b.nrows();
    }
    Ok(out)
}

/// `L_p = (x_n - f(x_n)) ⊗ 1 - 1 ⊗ θ(x_n)` on `E ⊗ ∧^p L_{n-1}` for `0 ≤ p ≤ n-1`.
pub fn lp_operator(alg: &LieAlgebra, f: &Character, p: usize, tol: &Tolerances) -> Result<CMatrix> {
    let m = alg.dim();
    if f.dim() != m {
        return Err(Error::Dimension(format!("character has {} coordinates, expected {m}", f.dim())));
    }
    if p + 1 > m {
        return Err(Error::DegreeOutOfRange { degree: p, max: m.saturating_sub(1) });
    }
    let last = m - 1;
    let thetas = theta_wedge(alg.constants(), last, tol)?;
    Ok(shifted_operator(alg.family().generator(last), f.coords[last], &thetas[p]))
}

pub(crate) fn lp_operators(alg: &LieAlgebra, f: &Character, tol: &Tolerances) -> Result<Vec<CMatrix>> {
    let last = alg.dim() - 1;
    let thetas = theta_wedge(alg.constants(), last, tol)?;
    let x = alg.family().generator(last);
    Ok(thetas.iter().map(|th| shifted_operator(x, f.coords[last], th)).collect())
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::liealg::{LieAlgebra, OperatorFamily};
    use crate::numkit::{CMatrix, Tolerances};

    pub fn algebra(labels: &[&str], gens: Vec<CMatrix>) -> LieAlgebra {
        let tol = Tolerances::default();
        let fam = OperatorFamily::new(labels.iter().map(|s| s.to_string()).collect(), gens, &tol).unwrap();
        LieAlgebra::new(fam, &tol).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::algebra;
    use super::*;
    use crate::liealg::fixtures::*;
    use crate::numkit::c64;

    fn g2() -> LieAlgebra {
        algebra(&["y", "x"], vec![g2_y(), g2_x()])
    }

    fn heisenberg_adapted() -> LieAlgebra {
        algebra(&["z", "q", "p"], vec![unit(3, 0, 2), unit(3, 1, 2), unit(3, 0, 1)])
    }

    #[test]
    fn single_generator_boundary_is_shift() {
        let tol = Tolerances::default();
        let x = real(2, &[1.0, 2.0, 0.0, 3.0]);
        let alg = algebra(&["x"], vec![x.clone()]);
        let bf = boundary(&alg, &Character::from_real(&[0.5]), &tol).unwrap();
        assert_eq!(bf.maps().len(), 1);
        assert!(fro_norm(&(bf.d(0).unwrap() - (x - identity(2) * c64(0.5, 0.0)))) < 1e-15);
        assert!(bf.d(1).is_none());
    }

    #[test]
    fn g2_first_boundary_row() {
        let tol = Tolerances::default();
        let t = 0.7;
        let bf = boundary(&g2(), &Character::from_real(&[0.0, t]), &tol).unwrap();
        let d0 = bf.d(0).unwrap();
        assert_eq!(d0.shape(), (2, 4));
        assert!(fro_norm(&(d0.columns(0, 2) - g2_y())) < 1e-15);
        assert!(fro_norm(&(d0.columns(2, 2) - (g2_x() - identity(2) * c64(t, 0.0)))) < 1e-15);
        assert!(bf.dd_residual() < 1e-14);
    }

    #[test]
    fn g2_second_boundary_by_hand() {
        // d_1(e ⊗ y∧x) = (x - t) e ⊗ ... worked out: ((1 + t - x)e, y e)
        let tol = Tolerances::default();
        let t = -0.3;
        let bf = boundary(&g2(), &Character::from_real(&[0.0, t]), &tol).unwrap();
        let d1 = bf.d(1).unwrap();
        let expected_top = identity(2) * c64(1.0 + t, 0.0) - g2_x();
        assert!(fro_norm(&(d1.rows(0, 2) - expected_top)) < 1e-15);
        assert!(fro_norm(&(d1.rows(2, 2) - g2_y())) < 1e-15);
    }

    #[test]
    fn non_character_is_rejected() {
        let tol = Tolerances::default();
        // f(y) ≠ 0 but y = [x, y] lies in the derived algebra
        assert!(matches!(
            boundary(&g2(), &Character::from_real(&[1.0, 0.0]), &tol),
            Err(Error::NotCharacter(_))
        ));
    }

    #[test]
    fn shapes_follow_binomials() {
        let tol = Tolerances::default();
        let bf = boundary(&heisenberg_adapted(), &Character::zero(3), &tol).unwrap();
        for q in 0..3 {
            let d = bf.d(q).unwrap();
            assert_eq!(d.shape(), (3 * binomial(3, q), 3 * binomial(3, q + 1)));
        }
        assert!(bf.dd_residual() < 1e-14);
    }

    #[test]
    fn theta_examples() {
        let tol = Tolerances::default();
        let th = theta(&g2(), 1, &tol).unwrap();
        assert_eq!(th.len(), 2);
        assert!(fro_norm(&th[0]) == 0.0);
        assert!(fro_norm(&(&th[1] - identity(2))) < 1e-12);

        let ab = algebra(&["a", "b"], vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]);
        assert!(theta(&ab, 1, &tol).unwrap().iter().all(|m| fro_norm(m) == 0.0));

        // p acting on ∧<z, q>: [p, q] = -z (opposite product), [p, z] = 0
        let hw = theta_wedge(heisenberg_adapted().constants(), 2, &tol).unwrap();
        let deg1 = &hw[1];
        assert!((deg1[(0, 1)] - c64(-1.0, 0.0)).norm() < 1e-12);
        for r in 0..2 {
            for c in 0..=r {
                assert!(deg1[(r, c)].norm() < 1e-12);
            }
        }
        assert!(hw.iter().all(|m| (0..m.nrows()).all(|i| m[(i, i)].norm() < 1e-12)));
    }

    #[test]
    fn theta_requires_an_ideal() {
        let tol = Tolerances::default();
        // order (x, y): span(x) is not an ideal
        let alg = algebra(&["x", "y"], vec![g2_x(), g2_y()]);
        assert!(matches!(theta(&alg, 1, &tol), Err(Error::Flag(_))));
    }

    #[test]
    fn lp_examples() {
        let tol = Tolerances::default();
        let t = 0.25;
        let f = Character::from_real(&[0.0, t]);
        let l0 = lp_operator(&g2(), &f, 0, &tol).unwrap();
        assert!(fro_norm(&(l0 - (g2_x() - identity(2) * c64(t, 0.0)))) < 1e-15);
        let l1 = lp_operator(&g2(), &f, 1, &tol).unwrap();
        assert!(fro_norm(&(l1 - (g2_x() - identity(2) * c64(t + 1.0, 0.0)))) < 1e-12);
        assert!(matches!(
            lp_operator(&g2(), &f, 2, &tol),
            Err(Error::DegreeOutOfRange { degree: 2, max: 1 })
        ));

        let ab = algebra(&["a", "b"], vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]);
        let f = Character::from_real(&[0.0, 1.0]);
        let l1 = lp_operator(&ab, &f, 1, &tol).unwrap();
        assert!(fro_norm(&(l1 - (diag(&[3.0, 4.0]) - identity(2)))) < 1e-15);
    }

    #[test]
    fn boundary_is_affine_in_the_character() {
        let tol = Tolerances::default();
        let alg = heisenberg_adapted();
        let f0 = Character::new(vec![ZERO, c64(0.3, -0.2), c64(1.1, 0.4)]);
        let f1 = Character::new(vec![ZERO, c64(-0.7, 0.5), c64(0.2, 0.0)]);
        let mid = Character::new(f0.coords.iter().zip(&f1.coords).map(|(a, b)| (a + b) * 0.5).collect());
        let b0 = boundary(&alg, &f0, &tol).unwrap();
        let b1 = boundary(&alg, &f1, &tol).unwrap();
        let bm = boundary(&alg, &mid, &tol).unwrap();
        for q in 0..3 {
            let interp = (b0.d(q).unwrap() + b1.d(q).unwrap()) * c64(0.5, 0.0);
            assert!(fro_norm(&(interp - bm.d(q).unwrap())) < 1e-15);
        }
    }

    #[test]
    fn xbar_dimension_and_g2_spectrum() {
        let tol = Tolerances::default();
        let xb = xbar(&g2(), 1, &tol).unwrap();
        assert_eq!(xb.nrows(), 4);
        let mut ev: Vec<f64> = crate::numkit::eigen_clusters(&xb, &tol).unwrap().iter().map(|c| c.value.re).collect();
        ev.sort_by(f64::total_cmp);
        let expected = [-1.5, -0.5, 0.5];
        assert_eq!(ev.len(), 3);
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
