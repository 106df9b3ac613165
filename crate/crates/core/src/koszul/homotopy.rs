//! Contracting homotopy for characters with every `L_p` invertible.

use serde::{Deserialize, Serialize};

use super::split::{lift, place};
use super::{assemble_boundary, boundary, exterior_basis, lp_operators, Character};
use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::numkit::{fro_norm, identity, solve_linear, CMatrix, Tolerances};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyResiduals {
    /// `‖d_p S_p + S_{p-1} d_{p-1} - I‖_F` for `p = 0..=m`.
    pub identity: Vec<f64>,
    /// Relative residual of `S_p d_p L_{p+1} = (-1)^p d_p ∧ x_n` for `p = 0..=m-2`.
    pub intertwining: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct HomotopyFamily {
    /// `maps[p]` is `S_p: E⊗∧^p L → E⊗∧^{p+1} L`, `0 ≤ p < m`.
    pub maps: Vec<CMatrix>,
    pub residuals: HomotopyResiduals,
}

/// Builds `S_p = (-1)^p L_p^{-1}(·) ∧ x_n` on `E⊗∧^p L'`, zero on the
/// `∧x_n` summand, and checks both identities.
pub fn homotopy(alg: &LieAlgebra, f: &Character, tol: &Tolerances) -> Result<HomotopyFamily> {
    let bf = boundary(alg, f, tol)?;
    let m = alg.dim();
    let n = m - 1;
    let d = alg.space_dim();
    let lps = lp_operators(alg, f, tol)?;
    let mut inverses = Vec::with_capacity(m);
    for (p, lp) in lps.iter().enumerate() {
        let inv = solve_linear(lp, &identity(lp.nrows()), tol).map_err(|e| match e {
            Error::Singular { rank, dim } => Error::NotApplicable { degree: p, rank, dim },
            other => other,
        })?;
        inverses.push(inv);
    }

    let full = &bf.basis;
    let sub = exterior_basis(d, n);
    let mut maps = Vec::with_capacity(m);
    for p in 0..m {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let mut s = CMatrix::zeros(full.block_size(p + 1), full.block_size(p));
        let count = sub.tuples(p).len();
        for c in 0..count {
            let fc = lift(full, &sub, p, c, false);
            for r in 0..count {
                let fr = lift(full, &sub, p, r, true);
                place(&mut s, fr, fc, &inverses[p], r, c, d, sign);
            }
        }
        maps.push(s);
    }

    let mut identity_res = Vec::with_capacity(m + 1);
    for q in 0..=m {
        let size = full.block_size(q);
        let mut t = -identity(size);
        if q < m {
            t += bf.d(q).expect("degree in range") * &maps[q];
        }
        if q >= 1 {
            t += &maps[q - 1] * bf.d(q - 1).expect("degree in range");
        }
        identity_res.push(fro_norm(&t));
    }

    let sub_sc = alg.constants().restrict(n);
    let (_, sub_maps) = assemble_boundary(&alg.family().generators()[..n], &sub_sc, &f.coords[..n], d);
    let mut intertwining = Vec::new();
    for p in 0..m.saturating_sub(1) {
        let dp = bf.d(p).expect("degree in range");
        let cols: Vec<usize> = (0..sub.tuples(p + 1).len())
            .flat_map(|c| {
                let fc = lift(full, &sub, p + 1, c, false);
                (0..d).map(move |e| fc * d + e)
            })
            .collect();
        let restricted = dp.select_columns(cols.iter());
        let lhs = &maps[p] * restricted * &lps[p + 1];
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let mut rhs = CMatrix::zeros(full.block_size(p + 1), sub.block_size(p + 1));
        for c in 0..sub.tuples(p + 1).len() {
            for r in 0..sub.tuples(p).len() {
                let fr = lift(full, &sub, p, r, true);
                place(&mut rhs, fr, c, &sub_maps[p], r, c, d, sign);
            }
        }
        intertwining.push(fro_norm(&(&lhs - &rhs)) / (1.0 + fro_norm(&rhs)));
    }

    let residuals = HomotopyResiduals { identity: identity_res, intertwining };
    let worst_id = residuals.identity.iter().copied().fold(0.0, f64::max);
    if worst_id > tol.homotopy_residual {
        return Err(Error::Numerical(format!(
            "homotopy identity residual {worst_id:.3e} exceeds {:.3e}",
            tol.homotopy_residual
        )));
    }
    let worst_int = residuals.intertwining.iter().copied().fold(0.0, f64::max);
    if worst_int > tol.homotopy_residual {
        return Err(Error::Numerical(format!(
            "intertwining residual {worst_int:.3e} exceeds {:.3e}",
            tol.homotopy_residual
        )));
    }
    Ok(HomotopyFamily { maps, residuals })
}
