use serde::{Deserialize, Serialize};

use super::StructureConstants;
use crate::numkit::{identity, range_basis, CMatrix, CVector, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Derived,
    LowerCentral,
}

/// Descending chain of subspaces of the algebra, each given by orthonormal
/// coordinate columns.
#[derive(Debug, Clone)]
pub struct SeriesChain {
    pub kind: SeriesKind,
    pub subspaces: Vec<CMatrix>,
    pub dims: Vec<usize>,
}

impl SeriesChain {
    /// True when the chain reaches the zero subspace.
    pub fn terminates(&self) -> bool {
        self.dims.last() == Some(&0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Abelian,
    Nilpotent,
    Solvable,
    NonSolvable,
}

impl Classification {
    pub fn is_solvable(self) -> bool {
        self != Classification::NonSolvable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Abelian => "abelian",
            Classification::Nilpotent => "nilpotent",
            Classification::Solvable => "solvable",
            Classification::NonSolvable => "non_solvable",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn columns(m: &CMatrix) -> Vec<CVector> {
    (0..m.ncols()).map(|c| m.column(c).into_owned()).collect()
}

fn span_of(vectors: &[CVector], n: usize, threshold: f64) -> CMatrix {
    if vectors.is_empty() {
        return CMatrix::zeros(n, 0);
    }
    let m = CMatrix::from_columns(vectors);
    range_basis(&m, threshold)
}

fn iterate(
    sc: &StructureConstants,
    tol: &Tolerances,
    kind: SeriesKind,
    next: impl Fn(&CMatrix) -> Vec<CVector>,
) -> SeriesChain {
    let n = sc.dim();
    let threshold = tol.rank_rel * sc.scale();
    let mut current = identity(n);
    let mut subspaces = vec![current.clone()];
    let mut dims = vec![n];
    while current.ncols() > 0 {
        let term = span_of(&next(&current), n, threshold);
        let dim = term.ncols();
        subspaces.push(term.clone());
        dims.push(dim);
        if dim == current.ncols() {
            break;
        }
        current = term;
    }
    SeriesChain { kind, subspaces, dims }
}

/// `L ⊇ [L,L] ⊇ [[L,L],[L,L]] ⊇ …`, stopping at zero or at the first repeat.
pub fn derived_series(sc: &StructureConstants, tol: &Tolerances) -> SeriesChain {
    iterate(sc, tol, SeriesKind::Derived, |current| {
        let cols = columns(current);
        let mut out = Vec::new();
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                out.push(sc.bracket(&cols[i], &cols[j]));
            }
        }
        out
    })
}

/// `L ⊇ [L,L] ⊇ [L,[L,L]] ⊇ …`, stopping at zero or at the first repeat.
pub fn lower_central_series(sc: &StructureConstants, tol: &Tolerances) -> SeriesChain {
    let n = sc.dim();
    iterate(sc, tol, SeriesKind::LowerCentral, |current| {
        let cols = columns(current);
        let mut out = Vec::new();
        for a in 0..n {
            let mut e = CVector::zeros(n);
            e[a] = crate::numkit::ONE;
            for w in &cols {
                out.push(sc.bracket(&e, w));
            }
        }
        out
    })
}

/// Strongest of abelian ⇒ nilpotent ⇒ solvable, or non-solvable.
pub fn classify(sc: &StructureConstants, tol: &Tolerances) -> Classification {
    let derived = derived_series(sc, tol);
    if derived.dims.get(1).copied().unwrap_or(0) == 0 {
        return Classification::Abelian;
    }
    if lower_central_series(sc, tol).terminates() {
        return Classification::Nilpotent;
    }
    if derived.terminates() {
        Classification::Solvable
    } else {
        Classification::NonSolvable
    }
}
