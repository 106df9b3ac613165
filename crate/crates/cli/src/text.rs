//! Plain-text rendering of a [`Report`].

use std::fmt::Write;

use liespec::verify::CheckStatus;

use crate::report::{Cx, Report};

fn fmt_cx(z: &Cx) -> String {
    match (z[0], z[1]) {
        (re, im) if im == 0.0 => format!("{re}"),
        (re, im) if re == 0.0 => format!("{im}i"),
        (re, im) if im < 0.0 => format!("{re}-{}i", -im),
        (re, im) => format!("{re}+{im}i"),
    }
}

fn fmt_tuple(values: &[Cx]) -> String {
    let parts: Vec<String> = values.iter().map(fmt_cx).collect();
    format!("({})", parts.join(", "))
}

fn fmt_set(values: &[Cx]) -> String {
    let parts: Vec<String> = values.iter().map(fmt_cx).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn render(report: &Report) -> String {
    let mut out = String::new();
    let inst = &report.instance;
    let _ = writeln!(out, "{} {}: d = {}, n = {}", report.command, inst.name, inst.space_dim, inst.algebra_dim);
    let _ = writeln!(out, "generators: {}", inst.labels.join(", "));
    if let Some(c) = report.classification {
        let _ = writeln!(out, "classification: {c}");
    }
    if let Some(s) = &report.series {
        let _ = writeln!(out, "derived series dims: {:?}", s.derived);
        let _ = writeln!(out, "lower central series dims: {:?}", s.lower_central);
    }
    if let Some(f) = &report.flag {
        let _ = writeln!(out, "flag: k = {}, ideal dims {:?}, nilpotent shape {}", f.k, f.ideal_dims, f.nilpotent_shape);
        for (c, label) in f.adapted_labels.iter().enumerate() {
            let col: Vec<Cx> = f.change_of_basis.iter().map(|row| row[c]).collect();
            let _ = writeln!(out, "  {label} = {}", fmt_tuple(&col));
        }
    }
    if let Some(sc) = &report.structure_constants {
        let _ = writeln!(out, "structure constants ({} basis, c^h_ij = coefficient of x_h in [x_j, x_i]):", sc.basis);
        if sc.entries.is_empty() {
            let _ = writeln!(out, "  all zero");
        }
        for e in &sc.entries {
            let _ = writeln!(out, "  c^{}_{}{} = {}", e.h, e.i, e.j, fmt_cx(&e.value));
        }
    }
    if let Some(grid) = &report.component_spectra {
        let _ = writeln!(out, "component spectra:");
        for (j, values) in grid.iter().enumerate() {
            let _ = writeln!(out, "  j = {}: {}", j + 1, fmt_set(values));
        }
    }
    if let Some(ws) = &report.weights {
        let _ = writeln!(out, "weights r_alpha:");
        for w in ws {
            let parts: Vec<String> = w
                .entries
                .iter()
                .map(|e| format!("{:?} -> {}", e.alpha, fmt_cx(&e.r)))
                .collect();
            let _ = writeln!(out, "  j = {}: {}", w.j, parts.join(", "));
        }
    }
    if let Some(sp) = &report.spectrum {
        let _ = writeln!(out, "spectrum ({} points, {} candidates tested):", sp.points.len(), sp.candidates_tested);
        for p in &sp.points {
            let _ = writeln!(
                out,
                "  {}  adapted {}  betti {:?}",
                fmt_tuple(&p.original),
                fmt_tuple(&p.adapted),
                p.betti
            );
        }
    }
    if let Some(points) = &report.oracle {
        let _ = writeln!(out, "joint eigenvalues ({}):", points.len());
        for p in points {
            let _ = writeln!(out, "  {}", fmt_tuple(p));
        }
    }
    if let Some(checks) = &report.checks {
        let _ = writeln!(out, "checks:");
        for c in checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skipped",
            };
            match c.max_residual {
                Some(r) => writeln!(out, "  {:<10} {status} (max {r:e}): {}", c.name.as_str(), c.detail),
                None => writeln!(out, "  {:<10} {}", c.name.as_str(), c.detail),
            }
            .expect("writing to a String");
        }
    }
    if let Some(e) = &report.error {
        let _ = writeln!(out, "error (exit {}): {}", e.exit_code, e.message);
    }
    out
}
