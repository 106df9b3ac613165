//! Complex Schur iteration: Householder reduction to Hessenberg form followed
//! by single-shift QR sweeps with Givens rotations.

use super::{fro_norm, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

pub(super) fn eigenvalues(mut h: CMatrix) -> Result<Vec<C64>> {
    let n = h.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    h /= C64::new(scale, 0.0);
    reduce_to_hessenberg(&mut h);
    qr_iterate(&mut h)?;
    Ok((0..n).map(|i| h[(i, i)] * scale).collect())
}

fn reduce_to_hessenberg(a: &mut CMatrix) {
    let n = a.nrows();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * norm;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        // left: rows k+1.., columns k..
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)]).sum();
            let f = dot * beta;
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= vt * f;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| a[(i, k + 1 + t)] * vt).sum();
            let f = dot * beta;
            for (t, vt) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= f * vt.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Rotation `[c, s; -conj(s), c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn wilkinson_shift(h: &CMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_iterate(h: &mut CMatrix) -> Result<()> {
    let n = h.nrows();
    let eps = f64::EPSILON;
    let norm = fro_norm(h);
    let mut hi = n - 1;
    let mut sweeps_without_deflation = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * local || sub <= eps * norm {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps_without_deflation = 0;
            continue;
        }
        sweeps_without_deflation += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::Numerical("Schur iteration did not converge".into()));
        }
        let shift = if sweeps_without_deflation % 11 == 10 {
            // exceptional shift to break cycles
            let s = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + C64::new(0.75 * s, 0.4375 * s)
        } else {
            wilkinson_shift(h, hi)
        };
        qr_sweep(h, lo, hi, shift);
    }
    Ok(())
}

fn qr_sweep(h: &mut CMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        h[(k + 1, k)] = ZERO;
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + s.conj() * y;
            h[(i, k + 1)] = -s * x + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}
