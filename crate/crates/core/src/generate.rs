//! Seeded random families with known triangular structure.
//!
//! Every family is built upper triangular and then conjugated by a random
//! well-conditioned matrix, so the diagonals of the triangular form (the
//! joint weights of the invariant flag) are known exactly. Diagonal entries
//! are drawn from the quarter lattice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::liealg::OperatorFamily;
use crate::numkit::{c64, identity, numerical_rank, solve_linear, stack_as_columns, CMatrix, Tolerances, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Solvable,
    Nilpotent,
    Commuting,
}

#[derive(Debug, Clone)]
pub struct GeneratedFamily {
    pub family: OperatorFamily,
    /// Per basis vector of the triangular form, the diagonal entries of all
    /// generators there.
    pub diagonal_tuples: Vec<Vec<C64>>,
}

/// Options shared by the generators.
#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    /// Draw diagonal entries from the complex quarter lattice instead of the real one.
    pub complex_diagonal: bool,
    /// Largest absolute value of a diagonal entry (real and imaginary part).
    pub diagonal_range: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { complex_diagonal: false, diagonal_range: 1.5 }
    }
}

fn quarter(rng: &mut ChaCha8Rng, range: f64) -> f64 {
    let steps = (range * 4.0).round() as i64;
    rng.random_range(-steps..=steps) as f64 * 0.25
}

fn diagonal_entry(rng: &mut ChaCha8Rng, opts: &GenOptions) -> C64 {
    let re = quarter(rng, opts.diagonal_range);
    let im = if opts.complex_diagonal { quarter(rng, opts.diagonal_range) } else { 0.0 };
    c64(re, im)
}

fn unit_matrix(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = c64(1.0, 0.0);
    m
}

/// A random set of strictly upper positions `(i, j)`, closed under
/// `(i, j), (j, l) ⇒ (i, l)`, with exactly `size` elements.
fn closed_positions(rng: &mut ChaCha8Rng, d: usize, size: usize) -> Option<Vec<(usize, usize)>> {
    let all: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    if size > all.len() {
        return None;
    }
    for _ in 0..200 {
        let mut set: Vec<(usize, usize)> = Vec::new();
        while set.len() < size {
            let pick = all[rng.random_range(0..all.len())];
            if set.contains(&pick) {
                continue;
            }
            let mut trial = set.clone();
            trial.push(pick);
            loop {
                let mut added = false;
                for a in 0..trial.len() {
                    for b in 0..trial.len() {
                        let (i, j) = trial[a];
                        let (j2, l) = trial[b];
                        if j == j2 && !trial.contains(&(i, l)) {
                            trial.push((i, l));
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
            }
            if trial.len() > size {
                break;
            }
            set = trial;
        }
        if set.len() == size {
            set.sort_unstable();
            return Some(set);
        }
    }
    None
}

/// A random conjugator `I + A/2` with entries of `A` in the complex unit box,
/// retried until its condition number is moderate.
fn conjugator(rng: &mut ChaCha8Rng, d: usize, tol: &Tolerances) -> (CMatrix, CMatrix) {
    loop {
        let g = identity(d)
            + CMatrix::from_fn(d, d, |_, _| c64(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)));
        let s = crate::numkit::singular_values(&g);
        if s[s.len() - 1] * 20.0 < s[0] {
            continue;
        }
        if let Ok(ginv) = solve_linear(&g, &identity(d), tol) {
            return (g, ginv);
        }
    }
}

/// Random integer change of basis with entries in {-1, 0, 1}, unimodular up to sign.
fn mixing(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    // unit lower times unit upper triangular is invertible over the integers
    let lower: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else if j < i { rng.random_range(-1..=1) as f64 } else { 0.0 }).collect())
        .collect();
    let upper: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else if j > i { rng.random_range(-1..=1) as f64 } else { 0.0 }).collect())
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| lower[i][k] * upper[k][j]).sum()).collect())
        .collect()
}

fn finish(
    rng: &mut ChaCha8Rng,
    triangular: Vec<CMatrix>,
    mix: bool,
    prefix: &str,
    tol: &Tolerances,
) -> Result<GeneratedFamily> {
    let d = triangular[0].nrows();
    let n = triangular.len();
    let mixed: Vec<CMatrix> = if mix {
        let w = mixing(rng, n);
        (0..n)
            .map(|a| (0..n).fold(CMatrix::zeros(d, d), |acc, b| acc + &triangular[b] * c64(w[a][b], 0.0)))
            .collect()
    } else {
        triangular
    };
    let diagonal_tuples = (0..d).map(|e| mixed.iter().map(|m| m[(e, e)]).collect()).collect();
    let (g, ginv) = conjugator(rng, d, tol);
    let gens: Vec<CMatrix> = mixed.iter().map(|m| &g * m * &ginv).collect();
    let labels = (1..=n).map(|i| format!("{prefix}{i}")).collect();
    let family = OperatorFamily::new(labels, gens, tol)?;
    Ok(GeneratedFamily { family, diagonal_tuples })
}

fn independent(mats: &[CMatrix], tol: &Tolerances) -> bool {
    numerical_rank(&stack_as_columns(mats), tol) == mats.len()
}

/// Diagonal generators plus elementary matrices on a closed set of upper
/// positions, mixed by an integer change of basis and conjugated.
pub fn random_solvable(seed: u64, d: usize, n: usize, opts: &GenOptions) -> Result<GeneratedFamily> {
    let tol = Tolerances::default();
    let max_n = d * (d + 1) / 2;
    if d == 0 || n == 0 || n > max_n {
        return Err(Error::Instance(format!(
            "no solvable family of dimension {n} on C^{d} in this construction (need 1 <= n <= {max_n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_nil = d * (d - 1) / 2;
    for _ in 0..100 {
        let lo = n.saturating_sub(d);
        let hi = n.min(max_nil);
        let s = rng.random_range(lo..=hi);
        let Some(positions) = closed_positions(&mut rng, d, s) else { continue };
        let mut gens: Vec<CMatrix> = Vec::with_capacity(n);
        for _ in 0..n - s {
            let entries: Vec<C64> = (0..d).map(|_| diagonal_entry(&mut rng, opts)).collect();
            gens.push(CMatrix::from_diagonal(&crate::numkit::CVector::from_vec(entries)));
        }
        if !independent(&gens, &tol) {
            continue;
        }
        gens.extend(positions.iter().map(|&(i, j)| unit_matrix(d, i, j)));
        return finish(&mut rng, gens, true, "s", &tol);
    }
    Err(Error::Instance(format!("could not draw a solvable family with d = {d}, n = {n}")))
}

/// Elementary matrices on a closed set of upper positions, optionally with
/// a scalar generator, mixed and conjugated.
pub fn random_nilpotent(seed: u64, d: usize, n: usize) -> Result<GeneratedFamily> {
    let tol = Tolerances::default();
    let max_nil = d * (d.max(1) - 1) / 2;
    if d == 0 || n == 0 || n > max_nil + 1 {
        return Err(Error::Instance(format!(
            "no nilpotent family of dimension {n} on C^{d} in this construction (need 1 <= n <= {})",
            max_nil + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let with_scalar = n > max_nil || (n > 1 && rng.random_bool(0.3));
        let s = if with_scalar { n - 1 } else { n };
        let Some(positions) = closed_positions(&mut rng, d, s) else { continue };
        let mut gens: Vec<CMatrix> = positions.iter().map(|&(i, j)| unit_matrix(d, i, j)).collect();
        if with_scalar {
            gens.push(identity(d) * c64(quarter(&mut rng, 1.0).max(0.25), 0.0));
        }
        return finish(&mut rng, gens, true, "n", &tol);
    }
    Err(Error::Instance(format!("could not draw a nilpotent family with d = {d}, n = {n}")))
}

/// Commuting families: either polynomials in one nonderogatory upper
/// triangular matrix, or simultaneously diagonalisable matrices with a
/// unit upper triangular eigenbasis. Conjugated in both cases.
pub fn random_commuting(seed: u64, d: usize, n: usize, opts: &GenOptions) -> Result<GeneratedFamily> {
    let tol = Tolerances::default();
    if d == 0 || n == 0 || n > d {
        return Err(Error::Instance(format!(
            "no commuting family of dimension {n} on C^{d} in this construction (need 1 <= n <= d)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let gens: Vec<CMatrix> = if rng.random_bool(0.5) {
            // polynomials in A; a nonzero superdiagonal makes A nonderogatory
            let mut a = CMatrix::zeros(d, d);
            for i in 0..d {
                a[(i, i)] = diagonal_entry(&mut rng, opts);
                for j in i + 1..d {
                    a[(i, j)] = if j == i + 1 {
                        c64(if rng.random_bool(0.5) { 1.0 } else { -0.5 }, 0.0)
                    } else {
                        c64(quarter(&mut rng, 0.5), 0.0)
                    };
                }
            }
            let mut powers = vec![identity(d)];
            for k in 1..d {
                powers.push(&powers[k - 1] * &a);
            }
            (0..n)
                .map(|_| {
                    let mut m = CMatrix::zeros(d, d);
                    for p in &powers {
                        m += p * c64(rng.random_range(-1..=1) as f64 * 0.5, 0.0);
                    }
                    m
                })
                .collect()
        } else {
            let mut t = identity(d);
            for i in 0..d {
                for j in i + 1..d {
                    t[(i, j)] = c64(quarter(&mut rng, 0.5), 0.0);
                }
            }
            let tinv = solve_linear(&t, &identity(d), &tol)?;
            (0..n)
                .map(|_| {
                    let entries: Vec<C64> = (0..d).map(|_| diagonal_entry(&mut rng, opts)).collect();
                    &t * CMatrix::from_diagonal(&crate::numkit::CVector::from_vec(entries)) * &tinv
                })
                .collect()
        };
        if gens.iter().all(|m| m.iter().all(|z| *z == ZERO)) || !independent(&gens, &tol) {
            continue;
        }
        return finish(&mut rng, gens, false, "c", &tol);
    }
    Err(Error::Instance(format!("could not draw a commuting family with d = {d}, n = {n}")))
}

pub fn random_family(kind: FamilyKind, seed: u64, d: usize, n: usize, opts: &GenOptions) -> Result<GeneratedFamily> {
    match kind {
        FamilyKind::Solvable => random_solvable(seed, d, n, opts),
        FamilyKind::Nilpotent => random_nilpotent(seed, d, n),
        FamilyKind::Commuting => random_commuting(seed, d, n, opts),
    }
}
