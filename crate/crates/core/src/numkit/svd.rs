//! One-sided Jacobi SVD for complex matrices.
//!
//! Columns of `A` are rotated pairwise until mutually orthogonal; the
//! accumulated rotations form a full unitary `V`, the column norms are the
//! singular values and the normalised columns give `U`. Small singular
//! values come out with high relative accuracy, which is what the rank
//! decisions in this crate depend on.

use super::{CMatrix, C64};

/// `A V = W` with `V` unitary (`n × n`) and the columns of `W` orthogonal,
/// sorted by decreasing norm.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Singular values, one per column of the input, descending.
    pub values: Vec<f64>,
    pub v: CMatrix,
    /// `A V`, column `i` has norm `values[i]`.
    pub w: CMatrix,
}

const MAX_SWEEPS: usize = 80;

pub fn jacobi_svd(a: &CMatrix) -> Svd {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    // columns below rounding level of the whole matrix are treated as zero;
    // rotating them against each other only stirs noise
    let negligible = (f64::EPSILON * a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&w.as_slice()[p * m..(p + 1) * m], &w.as_slice()[q * m..(q + 1) * m]);
                    let mut acc = (0.0, 0.0, C64::new(0.0, 0.0));
                    for (x, y) in cp.iter().zip(cq) {
                        acc.0 += x.norm_sqr();
                        acc.1 += y.norm_sqr();
                        acc.2 += x.conj() * y;
                    }
                    acc
                };
                let g = gamma.norm();
                if alpha <= negligible || beta <= negligible || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // rotate (a_p, a_q e^{-iφ}) by the real Jacobi rotation
                rotate(w.as_mut_slice(), m, p, q, phase, c, s);
                rotate(v.as_mut_slice(), n, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|c| w.column(c).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    Svd {
        values: order.iter().map(|&i| norms[i]).collect(),
        v: v.select_columns(order.iter()),
        w: w.select_columns(order.iter()),
    }
}

fn rotate(data: &mut [C64], len: usize, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * len);
    let cp = &mut head[p * len..(p + 1) * len];
    let cq = &mut tail[..len];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y * phase);
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}
