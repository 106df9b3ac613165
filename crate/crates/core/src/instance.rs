//! JSON instance files and the bundled corpus.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::OperatorFamily;
use crate::numkit::{c64, CMatrix, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub label: String,
    /// Rows of `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig_cluster: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            rank_rel: self.rank_rel.unwrap_or(base.rank_rel),
            eig_cluster: self.eig_cluster.unwrap_or(base.eig_cluster),
            residual: self.residual.unwrap_or(base.residual),
            ..base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub space_dim: usize,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// A validated instance: the family plus the tolerances in force for it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub family: OperatorFamily,
    pub tolerances: Tolerances,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<InstanceFile> {
        serde_json::from_str(text).map_err(|e| Error::Instance(format!("{e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialise")
    }

    pub fn from_family(name: &str, fam: &OperatorFamily) -> InstanceFile {
        let generators = fam
            .labels()
            .iter()
            .zip(fam.generators())
            .map(|(label, m)| GeneratorEntry {
                label: label.clone(),
                matrix: (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect(),
            })
            .collect();
        InstanceFile { name: name.to_string(), space_dim: fam.space_dim(), generators, tolerances: None }
    }

    /// Checks shapes and values, then builds the family. `base` supplies the
    /// tolerances not overridden by the file.
    pub fn validate(&self, base: Tolerances) -> Result<Instance> {
        let d = self.space_dim;
        if d == 0 {
            return Err(Error::Instance("space_dim must be at least 1".into()));
        }
        if self.generators.is_empty() {
            return Err(Error::Instance("generators: at least one generator is required".into()));
        }
        let tolerances = self.tolerances.unwrap_or_default().apply(base);
        tolerances.validate().map_err(|e| Error::Instance(format!("tolerances: {e}")))?;
        let mut labels = Vec::with_capacity(self.generators.len());
        let mut mats = Vec::with_capacity(self.generators.len());
        for (g, entry) in self.generators.iter().enumerate() {
            let who = format!("generators[{g}] (label \"{}\")", entry.label);
            if labels.contains(&entry.label) {
                return Err(Error::Instance(format!("{who}: duplicate label")));
            }
            if entry.matrix.len() != d {
                return Err(Error::Instance(format!(
                    "{who}: matrix has {} rows, expected space_dim = {d}",
                    entry.matrix.len()
                )));
            }
            for (r, row) in entry.matrix.iter().enumerate() {
                if row.len() != d {
                    return Err(Error::Instance(format!(
                        "{who}: matrix row {r} has {} entries, expected space_dim = {d}",
                        row.len()
                    )));
                }
                if let Some(c) = row.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
                    return Err(Error::Instance(format!("{who}: entry ({r}, {c}) is not finite")));
                }
            }
            labels.push(entry.label.clone());
            mats.push(CMatrix::from_fn(d, d, |r, c| {
                let z = entry.matrix[r][c];
                c64(z[0], z[1])
            }));
        }
        let family = OperatorFamily::new(labels, mats, &tolerances)?;
        Ok(Instance { name: self.name.clone(), family, tolerances })
    }
}

pub fn parse_instance_str(text: &str, base: Tolerances) -> Result<Instance> {
    InstanceFile::from_json(text)?.validate(base)
}

pub fn parse_instance(path: &Path, base: Tolerances) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance_str(&text, base)
}

/// The bundled example files, by file name.
pub const CORPUS: [(&str, &str); 4] = [
    ("g2.json", include_str!("../corpus/g2.json")),
    ("heisenberg.json", include_str!("../corpus/heisenberg.json")),
    ("abelian_diag.json", include_str!("../corpus/abelian_diag.json")),
    ("sl2.json", include_str!("../corpus/sl2.json")),
];

/// Looks up a bundled file by name, with or without the `.json` suffix.
pub fn corpus_file(name: &str) -> Option<&'static str> {
    CORPUS
        .iter()
        .find(|(file, _)| *file == name || file.trim_end_matches(".json") == name)
        .map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_g2_parses() {
        let inst = parse_instance_str(corpus_file("g2").unwrap(), Tolerances::default()).unwrap();
        assert_eq!(inst.family.space_dim(), 2);
        assert_eq!(inst.family.algebra_dim(), 2);
        assert_eq!(inst.family.labels(), &["y".to_string(), "x".to_string()]);
    }

    #[test]
    fn every_bundled_file_parses() {
        for (name, text) in CORPUS {
            parse_instance_str(text, Tolerances::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn wrong_row_length_names_the_label() {
        let text = r#"{"name": "bad", "space_dim": 2, "generators": [
            {"label": "a", "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]},
            {"label": "b", "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]]]}]}"#;
        let err = parse_instance_str(text, Tolerances::default()).unwrap_err().to_string();
        assert!(err.contains("label \"b\""), "{err}");
        assert!(err.contains("row 0 has 3 entries"), "{err}");
    }

    #[test]
    fn dependent_generators_are_rejected() {
        let text = r#"{"name": "dep", "space_dim": 2, "generators": [
            {"label": "y", "matrix": [[[1,0],[1,0]],[[-1,0],[-1,0]]]},
            {"label": "2y", "matrix": [[[2,0],[2,0]],[[-2,0],[-2,0]]]}]}"#;
        assert!(matches!(
            parse_instance_str(text, Tolerances::default()),
            Err(Error::DegenerateBasis { rank: 1, count: 2 })
        ));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_instance_str("{\"name\": \"x\",\n \"space_dim\": \"two\"}", Tolerances::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"name": "x", "space_dim": 1, "generators": [], "extra": 1}"#;
        assert!(parse_instance_str(text, Tolerances::default()).is_err());
    }

    #[test]
    fn overrides_apply() {
        let text = r#"{"name": "x", "space_dim": 1, "generators": [{"label": "a", "matrix": [[[2,0]]]}],
            "tolerances": {"eig_cluster": 1e-6}}"#;
        let inst = parse_instance_str(text, Tolerances::default()).unwrap();
        assert_eq!(inst.tolerances.eig_cluster, 1e-6);
        assert_eq!(inst.tolerances.rank_rel, Tolerances::default().rank_rel);
    }

    #[test]
    fn round_trip() {
        let inst = parse_instance_str(corpus_file("heisenberg.json").unwrap(), Tolerances::default()).unwrap();
        let file = InstanceFile::from_family(&inst.name, &inst.family);
        let back = InstanceFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
    }
}
