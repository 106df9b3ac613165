//! Lie algebras of matrices under the opposite product `[a, b] = b·a − a·b`.

pub(crate) mod flag;
mod lie_theorem;
mod series;

use crate::error::{Error, Result};
use crate::numkit::{
    ensure_finite, fro_norm, least_squares, numerical_rank, stack_as_columns, CMatrix, CVector, Tolerances, C64, ZERO,
};

pub use flag::{jordan_holder_flag, JordanHolderFlag};
pub use lie_theorem::{common_eigenvector, CommonEigenvector};
pub use series::{classify, derived_series, lower_central_series, Classification, SeriesChain, SeriesKind};

/// The bracket of the opposite product: `b·a − a·b`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "commutator needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(b * a - a * b)
}

/// `n` linearly independent `d x d` matrices spanning a Lie algebra.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    space_dim: usize,
    generators: Vec<CMatrix>,
    labels: Vec<String>,
}

impl OperatorFamily {
    pub fn new(labels: Vec<String>, generators: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Dimension("a family needs at least one generator".into()));
        }
        if labels.len() != generators.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} generators",
                labels.len(),
                generators.len()
            )));
        }
        let d = generators[0].nrows();
        for (label, g) in labels.iter().zip(&generators) {
            if g.nrows() != d || g.ncols() != d {
                return Err(Error::Dimension(format!(
                    "generator {label:?} is {}x{}, expected {d}x{d}",
                    g.nrows(),
                    g.ncols()
                )));
            }
            ensure_finite(g)?;
        }
        let rank = numerical_rank(&stack_as_columns(&generators), tol);
        if rank < generators.len() {
            return Err(Error::DegenerateBasis { rank, count: generators.len() });
        }
        Ok(OperatorFamily { space_dim: d, generators, labels })
    }

    /// Family with default labels `x1, x2, ...`.
    pub fn unlabeled(generators: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        let labels = (1..=generators.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, generators, tol)
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The algebra element with the given coordinates.
    pub fn element(&self, coords: &[C64]) -> CMatrix {
        let d = self.space_dim;
        coords
            .iter()
            .zip(&self.generators)
            .fold(CMatrix::zeros(d, d), |acc, (c, g)| acc + g * *c)
    }

    pub fn max_norm(&self) -> f64 {
        self.generators.iter().map(fro_norm).fold(0.0, f64::max)
    }
}

/// Bracket coefficients in a fixed basis.
///
/// Stored as `[x_a, x_b] = Σ_h bracket_coeff(a, b, h) x_h` for all ordered
/// pairs, antisymmetric in `(a, b)`. [`StructureConstants::c`] reads the
/// same tensor in the Jordan–Hölder convention `[x_j, x_i] = Σ_h c^h_{ij} x_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    data: Vec<C64>,
}

impl StructureConstants {
    pub fn zeros(n: usize) -> Self {
        StructureConstants { n, data: vec![ZERO; n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, h: usize) -> usize {
        (a * self.n + b) * self.n + h
    }

    pub fn bracket_coeff(&self, a: usize, b: usize, h: usize) -> C64 {
        self.data[self.idx(a, b, h)]
    }

    /// Sets the coefficients of `[x_a, x_b]` and, antisymmetrically, of `[x_b, x_a]`.
    pub fn set_bracket(&mut self, a: usize, b: usize, coeffs: &[C64]) {
        for (h, &c) in coeffs.iter().enumerate() {
            let i = self.idx(a, b, h);
            self.data[i] = c;
            let j = self.idx(b, a, h);
            self.data[j] = -c;
        }
    }

    /// `c^h_{ij}`: coefficient of `x_h` in `[x_j, x_i]` (0-based indices).
    pub fn c(&self, h: usize, i: usize, j: usize) -> C64 {
        self.bracket_coeff(j, i, h)
    }

    /// Matrix of `ad(x_a)` acting on coordinate vectors.
    pub fn ad(&self, a: usize) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |h, b| self.bracket_coeff(a, b, h))
    }

    /// Bracket of two elements given by coordinates.
    pub fn bracket(&self, u: &CVector, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.n);
        for a in 0..self.n {
            if u[a] == ZERO {
                continue;
            }
            for b in 0..self.n {
                let w = u[a] * v[b];
                if w == ZERO {
                    continue;
                }
                for h in 0..self.n {
                    out[h] += w * self.bracket_coeff(a, b, h);
                }
            }
        }
        out
    }

    /// Constants of the span of the first `j` basis elements (meaningful when
    /// that span is a subalgebra).
    pub fn restrict(&self, j: usize) -> StructureConstants {
        let j = j.min(self.n);
        let mut out = StructureConstants::zeros(j);
        for a in 0..j {
            for b in 0..j {
                for h in 0..j {
                    let i = out.idx(a, b, h);
                    out.data[i] = self.bracket_coeff(a, b, h);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Reference magnitude for rank decisions on spans of brackets.
    pub fn scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.n {
            for b in 0..self.n {
                for h in 0..self.n {
                    worst = worst.max((self.bracket_coeff(a, b, h) + self.bracket_coeff(b, a, h)).norm());
                }
            }
        }
        worst
    }

    /// Largest coefficient of `[[x_a,x_b],x_c] + [[x_b,x_c],x_a] + [[x_c,x_a],x_b]`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.n;
        let unit = |i: usize| {
            let mut v = CVector::zeros(n);
            v[i] = crate::numkit::ONE;
            v
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (ea, eb, ec) = (unit(a), unit(b), unit(c));
                    let s = self.bracket(&self.bracket(&ea, &eb), &ec)
                        + self.bracket(&self.bracket(&eb, &ec), &ea)
                        + self.bracket(&self.bracket(&ec, &ea), &eb);
                    worst = worst.max(s.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
        worst
    }
}

/// Expresses every pairwise bracket in the span of the generators.
pub fn verify_closure(fam: &OperatorFamily, tol: &Tolerances) -> Result<StructureConstants> {
    closure_constants(fam.generators(), tol)
}

pub(crate) fn closure_constants(gens: &[CMatrix], tol: &Tolerances) -> Result<StructureConstants> {
    let n = gens.len();
    let mut sc = StructureConstants::zeros(n);
    if n < 2 {
        return Ok(sc);
    }
    let basis = stack_as_columns(gens);
    let rank = numerical_rank(&basis, tol);
    if rank < n {
        return Err(Error::DegenerateBasis { rank, count: n });
    }
    for a in 0..n {
        for b in a + 1..n {
            let br = commutator(&gens[a], &gens[b])?;
            let target = CMatrix::from_column_slice(br.len(), 1, br.as_slice());
            let coeffs = least_squares(&basis, &target, 0.0);
            let fitted = &basis * &coeffs;
            let residual = (fitted - &target).norm();
            if residual > tol.residual * (1.0 + target.norm()) {
                return Err(Error::NotClosed { i: a, j: b, residual });
            }
            let coeffs: Vec<C64> = coeffs.iter().copied().collect();
            sc.set_bracket(a, b, &coeffs);
        }
    }
    Ok(sc)
}

/// An operator family together with its structure constants.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    family: OperatorFamily,
    constants: StructureConstants,
}

impl LieAlgebra {
    pub fn new(family: OperatorFamily, tol: &Tolerances) -> Result<Self> {
        let constants = verify_closure(&family, tol)?;
        Ok(LieAlgebra { family, constants })
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn dim(&self) -> usize {
        self.family.algebra_dim()
    }

    pub fn space_dim(&self) -> usize {
        self.family.space_dim()
    }

    /// Subalgebra spanned by the first `j` generators; fails unless that span is closed.
    pub fn prefix(&self, j: usize, tol: &Tolerances) -> Result<LieAlgebra> {
        if j == 0 || j > self.dim() {
            return Err(Error::Dimension(format!("prefix length {j} outside 1..={}", self.dim())));
        }
        let family = OperatorFamily::new(
            self.family.labels()[..j].to_vec(),
            self.family.generators()[..j].to_vec(),
            tol,
        )?;
        LieAlgebra::new(family, tol)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::numkit::{c64, CMatrix, C64};

    pub fn real(d: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(d, d, data.iter().map(|&x| c64(x, 0.0)))
    }

    pub fn unit(d: usize, i: usize, j: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(i, j)] = c64(1.0, 0.0);
        m
    }

    pub fn g2_y() -> CMatrix {
        real(2, &[1.0, 1.0, -1.0, -1.0])
    }

    pub fn g2_x() -> CMatrix {
        real(2, &[0.0, 0.5, 0.5, 0.0])
    }

    pub fn diag(values: &[f64]) -> CMatrix {
        let v: Vec<C64> = values.iter().map(|&x| c64(x, 0.0)).collect();
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::numkit::{c64, fro_norm};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn opposite_bracket_on_g2() {
        let br = commutator(&g2_x(), &g2_y()).unwrap();
        assert!(fro_norm(&(br - g2_y())) < 1e-15);
        // the ordinary commutator x·y − y·x gives −y
        let ordinary = g2_x() * g2_y() - g2_y() * g2_x();
        assert!(fro_norm(&(ordinary + g2_y())) < 1e-15);
    }

    #[test]
    fn commutator_is_alternating() {
        let m = real(3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 2.0, 2.0, 1.0]);
        assert_eq!(fro_norm(&commutator(&m, &m).unwrap()), 0.0);
        let a = real(3, &[0.3, 1.0, 0.0, 0.0, 2.0, -1.0, 4.0, 0.0, 1.0]);
        let s = commutator(&m, &a).unwrap() + commutator(&a, &m).unwrap();
        assert_eq!(fro_norm(&s), 0.0);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        assert!(commutator(&CMatrix::zeros(2, 2), &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn g2_structure_constants() {
        let fam = OperatorFamily::unlabeled(vec![g2_y(), g2_x()], &tol()).unwrap();
        let sc = verify_closure(&fam, &tol()).unwrap();
        // [x2, x1] = [x, y] = y = x1
        assert!((sc.c(0, 0, 1) - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(sc.c(1, 0, 1).norm() < 1e-12);
        assert!((sc.bracket_coeff(0, 1, 0) + c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn single_generator_has_no_brackets() {
        let fam = OperatorFamily::unlabeled(vec![g2_x()], &tol()).unwrap();
        let sc = verify_closure(&fam, &tol()).unwrap();
        assert_eq!(sc.dim(), 1);
        assert_eq!(sc.max_abs(), 0.0);
    }

    #[test]
    fn heisenberg_bracket_sign_matches_direct_multiplication() {
        let (p, q, z) = (unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2));
        // oracle: q·p − p·q computed entrywise
        let direct = &q * &p - &p * &q;
        assert!(fro_norm(&(&direct + &z)) < 1e-15, "opposite bracket [p,q] = -z");
        let fam = OperatorFamily::unlabeled(vec![p, q, z], &tol()).unwrap();
        let sc = verify_closure(&fam, &tol()).unwrap();
        let mut nonzero = Vec::new();
        for a in 0..3 {
            for b in a + 1..3 {
                for h in 0..3 {
                    if sc.bracket_coeff(a, b, h).norm() > 1e-12 {
                        nonzero.push((a, b, h, sc.bracket_coeff(a, b, h)));
                    }
                }
            }
        }
        assert_eq!(nonzero.len(), 1);
        let (a, b, h, v) = nonzero[0];
        assert_eq!((a, b, h), (0, 1, 2));
        assert!((v + c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dependent_generators_are_rejected() {
        let y = g2_y();
        let twice = &y * c64(2.0, 0.0);
        assert!(matches!(
            OperatorFamily::unlabeled(vec![y, twice], &tol()),
            Err(Error::DegenerateBasis { rank: 1, count: 2 })
        ));
    }

    #[test]
    fn non_closed_family_names_the_pair() {
        let a = unit(3, 0, 1);
        let b = unit(3, 1, 2);
        let fam = OperatorFamily::unlabeled(vec![a, b], &tol()).unwrap();
        match verify_closure(&fam, &tol()) {
            Err(Error::NotClosed { i, j, .. }) => assert_eq!((i, j), (0, 1)),
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_and_antisymmetry_on_heisenberg() {
        let fam = OperatorFamily::unlabeled(vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)], &tol()).unwrap();
        let sc = verify_closure(&fam, &tol()).unwrap();
        assert!(sc.antisymmetry_residual() == 0.0);
        assert!(sc.jacobi_residual() < 1e-12);
    }
}
