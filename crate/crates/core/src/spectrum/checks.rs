//! Property checks on a computed spectrum: projection onto ideal prefixes,
//! the nilpotent product and norm bounds, and a brute-force lattice scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{compare_point_sets, dedup_points, homology_dims, joint_spectrum, weights, SetComparison, SpectrumResult};
use crate::error::{Error, Result};
use crate::koszul::Character;
use crate::liealg::{Classification, OperatorFamily};
use crate::numkit::{c64, eigen_clusters, op_norm, CMatrix, Tolerances, C64, ZERO};

#[derive(Debug, Clone)]
pub struct ProjectionReport {
    pub j: usize,
    /// Spectrum of the ideal spanned by the first `j` adapted generators.
    pub ideal_spectrum: Vec<Vec<C64>>,
    /// Truncations of the full spectrum to the first `j` coordinates.
    pub projected: Vec<Vec<C64>>,
    pub comparison: SetComparison,
}

impl ProjectionReport {
    pub fn pass(&self) -> bool {
        self.comparison.equal()
    }
}

/// Compares the spectrum of the ideal `L_j` with the projection of the full spectrum.
pub fn projection_check(result: &SpectrumResult, j: usize, radius: f64, tol: &Tolerances) -> Result<ProjectionReport> {
    let fam = result.adapted().family();
    let m = fam.algebra_dim();
    if j == 0 || j > m {
        return Err(Error::Dimension(format!("ideal prefix {j} outside 1..={m}")));
    }
    let sub = OperatorFamily::new(fam.labels()[..j].to_vec(), fam.generators()[..j].to_vec(), tol)?;
    let ideal_spectrum = joint_spectrum(&sub, tol)?.original_points();
    let mut projected: Vec<Vec<C64>> = result.adapted_points().into_iter().map(|p| p[..j].to_vec()).collect();
    dedup_points(&mut projected, radius);
    let comparison = compare_point_sets(&ideal_spectrum, &projected, radius);
    Ok(ProjectionReport { j, ideal_spectrum, projected, comparison })
}

#[derive(Debug, Clone)]
pub struct NilpotentBoundReport {
    /// Largest `|r_α|` over all generators and tuples.
    pub max_weight: f64,
    /// Largest distance from a point coordinate to the spectrum of its generator.
    pub product_distance: f64,
    /// Largest `|f(x)| - ‖x‖` over points and sampled unit elements.
    pub max_norm_excess: f64,
    pub elements_checked: usize,
}

impl NilpotentBoundReport {
    pub fn pass(&self, weight_bound: f64, radius: f64, norm_slack: f64) -> bool {
        self.max_weight <= weight_bound && self.product_distance <= radius && self.max_norm_excess <= norm_slack
    }
}

fn spectrum_distance(m: &CMatrix, value: C64, tol: &Tolerances) -> Result<f64> {
    Ok(eigen_clusters(m, tol)?.iter().map(|c| (c.value - value).norm()).fold(f64::INFINITY, f64::min))
}

/// Measures the nilpotent bounds on `fam` (the family as given) against `result`:
/// zero weights, points inside `∏ Sp(x_i)` in both coordinate systems, and
/// `|f(x)| ≤ ‖x‖` for the generators and `samples` random unit elements.
pub fn nilpotent_bound_check(
    fam: &OperatorFamily,
    result: &SpectrumResult,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<NilpotentBoundReport> {
    if !matches!(result.classification, Classification::Nilpotent | Classification::Abelian) {
        return Err(Error::Classification(format!("{} (nilpotent required)", result.classification)));
    }
    let adapted = result.adapted();
    let m = adapted.dim();
    let mut max_weight: f64 = 0.0;
    for j in 0..m {
        max_weight = max_weight.max(weights(adapted.constants(), j, tol)?.max_abs());
    }

    let mut product_distance: f64 = 0.0;
    for point in &result.points {
        for i in 0..m {
            product_distance = product_distance
                .max(spectrum_distance(adapted.family().generator(i), point.adapted.coords[i], tol)?)
                .max(spectrum_distance(fam.generator(i), point.original[i], tol)?);
        }
    }

    let mut elements: Vec<Vec<C64>> = (0..m)
        .map(|i| (0..m).map(|a| if a == i { c64(1.0, 0.0) } else { ZERO }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let coeffs: Vec<C64> = (0..m).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        elements.push(coeffs);
    }
    let mut max_norm_excess = f64::NEG_INFINITY;
    for coeffs in &elements {
        let x = fam.element(coeffs);
        let norm = op_norm(&x);
        if norm == 0.0 {
            continue;
        }
        // rescale to a unit element
        for point in &result.points {
            let fx: C64 = coeffs.iter().zip(&point.original).map(|(c, v)| c * v).sum();
            max_norm_excess = max_norm_excess.max(fx.norm() / norm - 1.0);
        }
    }
    Ok(NilpotentBoundReport {
        max_weight,
        product_distance,
        max_norm_excess,
        elements_checked: elements.len(),
    })
}

#[derive(Debug, Clone)]
pub struct FineGridReport {
    pub step: f64,
    pub nodes: usize,
    /// Nodes with nonzero homology.
    pub nonzero_nodes: usize,
    /// Nodes with nonzero homology farther than the radius from the candidate grid.
    pub offenders: Vec<(Vec<C64>, f64)>,
    /// Set when the lattice exceeds the node budget and the scan did not run.
    pub skipped: Option<String>,
}

impl FineGridReport {
    pub fn pass(&self) -> bool {
        self.offenders.is_empty()
    }
}

fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let a = (lo / step).floor() as i64;
    let b = (hi / step).ceil() as i64;
    (a..=b).map(|i| i as f64 * step).collect()
}

/// Scans characters on a lattice of spacing `step` covering the bounding
/// rectangle of all component eigenvalues and reports every node with
/// nonzero homology lying farther than `radius` from the candidate grid.
pub fn fine_grid_scan(
    result: &SpectrumResult,
    step: f64,
    radius: f64,
    max_nodes: usize,
    tol: &Tolerances,
) -> Result<FineGridReport> {
    let adapted = result.adapted();
    let m = adapted.dim();
    let k = result.flag.k;
    let all: Vec<C64> = result.candidate_grid.iter().flatten().copied().collect();
    let (mut re_lo, mut re_hi, mut im_lo, mut im_hi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for v in &all {
        re_lo = re_lo.min(v.re);
        re_hi = re_hi.max(v.re);
        im_lo = im_lo.min(v.im);
        im_hi = im_hi.max(v.im);
    }
    let axis: Vec<C64> = lattice(re_lo, re_hi, step)
        .into_iter()
        .flat_map(|re| lattice(im_lo, im_hi, step).into_iter().map(move |im| c64(re, im)))
        .collect();
    let free = m - k;
    let nodes = axis.len().checked_pow(free as u32).unwrap_or(usize::MAX);
    let mut report = FineGridReport { step, nodes, nonzero_nodes: 0, offenders: Vec::new(), skipped: None };
    if nodes > max_nodes {
        report.skipped = Some(format!("{nodes} lattice nodes exceed the budget of {max_nodes}"));
        return Ok(report);
    }
    let mut odometer = vec![0usize; free];
    for _ in 0..nodes {
        let mut coords = vec![ZERO; m];
        for (slot, &i) in odometer.iter().enumerate() {
            coords[k + slot] = axis[i];
        }
        let betti = homology_dims(adapted, &Character::new(coords.clone()), tol)?;
        if betti.iter().any(|&b| b > 0) {
            report.nonzero_nodes += 1;
            let dist = result.grid_distance(&coords);
            if dist > radius {
                report.offenders.push((coords, dist));
            }
        }
        for slot in (0..free).rev() {
            odometer[slot] += 1;
            if odometer[slot] < axis.len() {
                break;
            }
            odometer[slot] = 0;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::fixtures::*;

    fn family(gens: Vec<CMatrix>) -> OperatorFamily {
        OperatorFamily::unlabeled(gens, &Tolerances::default()).unwrap()
    }

    #[test]
    fn g2_projection() {
        let tol = Tolerances::default();
        let res = joint_spectrum(&family(vec![g2_y(), g2_x()]), &tol).unwrap();
        let rep = projection_check(&res, 1, 1e-7, &tol).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.ideal_spectrum.len(), 1);
        assert!(rep.ideal_spectrum[0][0].norm() < 1e-12);
        assert!(projection_check(&res, 2, 1e-7, &tol).unwrap().pass());
    }

    #[test]
    fn heisenberg_bounds() {
        let tol = Tolerances::default();
        let fam = family(vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)]);
        let res = joint_spectrum(&fam, &tol).unwrap();
        let rep = nilpotent_bound_check(&fam, &res, 20, 7, &tol).unwrap();
        assert!(rep.pass(1e-10, 1e-7, 1e-8), "{rep:?}");
        assert_eq!(rep.elements_checked, 23);
        assert!(projection_check(&res, 2, 1e-7, &tol).unwrap().pass());
    }

    #[test]
    fn g2_is_not_nilpotent() {
        let tol = Tolerances::default();
        let fam = family(vec![g2_y(), g2_x()]);
        let res = joint_spectrum(&fam, &tol).unwrap();
        assert!(matches!(nilpotent_bound_check(&fam, &res, 5, 1, &tol), Err(Error::Classification(_))));
    }

    #[test]
    fn g2_lattice_scan() {
        let tol = Tolerances::default();
        let res = joint_spectrum(&family(vec![g2_y(), g2_x()]), &tol).unwrap();
        let rep = fine_grid_scan(&res, 0.25, 1e-6, 10_000, &tol).unwrap();
        assert!(rep.skipped.is_none());
        // lattice -1.5..=0.5 in steps of 0.25
        assert_eq!(rep.nodes, 9);
        // both spectrum points sit on the lattice
        assert_eq!(rep.nonzero_nodes, 2);
        assert!(rep.pass());
    }
}
