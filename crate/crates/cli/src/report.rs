//! The structured run report and its deterministic number formatting.

use liespec::liealg::{Classification, JordanHolderFlag, StructureConstants};
use liespec::numkit::{CMatrix, Tolerances, C64};
use liespec::spectrum::{SpectrumResult, WeightTable};
use liespec::verify::CheckResult;
use serde::{Deserialize, Serialize};

/// Version tag carried by every report.
pub const SCHEMA: &str = "liespec-report/1";

/// Magnitude below which matrix entries and structure constants print as zero.
pub const CHOP: f64 = 1e-12;

/// A complex number as `[re, im]`.
pub type Cx = [f64; 2];

/// Rounds to 12 significant digits; negative zero becomes zero.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounded `[re, im]` with parts of magnitude `<= chop` set to zero.
pub fn cx(z: C64, chop: f64) -> Cx {
    let part = |v: f64| if v.abs() <= chop { 0.0 } else { round12(v) };
    [part(z.re), part(z.im)]
}

pub fn cx_vec(values: &[C64], chop: f64) -> Vec<Cx> {
    values.iter().map(|&z| cx(z, chop)).collect()
}

pub fn cx_matrix(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| cx(m[(r, c)], CHOP)).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub name: String,
    pub space_dim: usize,
    pub algebra_dim: usize,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub derived: Vec<usize>,
    pub lower_central: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagSummary {
    /// Column `c` holds the original coordinates of adapted generator `c + 1`.
    pub change_of_basis: Vec<Vec<Cx>>,
    pub adapted_labels: Vec<String>,
    pub ideal_dims: Vec<usize>,
    pub k: usize,
    pub nilpotent_shape: bool,
}

impl FlagSummary {
    pub fn new(flag: &JordanHolderFlag) -> Self {
        FlagSummary {
            change_of_basis: cx_matrix(&flag.change_of_basis),
            adapted_labels: flag.adapted.family().labels().to_vec(),
            ideal_dims: flag.ideal_dims.clone(),
            k: flag.k,
            nilpotent_shape: flag.nilpotent_shape,
        }
    }
}

/// One nonzero `c^h_{ij}` (1-based, `i < j`): the coefficient of `x_h` in `[x_j, x_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub value: Cx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSummary {
    /// `"adapted"` or `"original"`.
    pub basis: String,
    pub entries: Vec<ConstantEntry>,
}

impl ConstantsSummary {
    pub fn new(basis: &str, sc: &StructureConstants) -> Self {
        let n = sc.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for h in 0..n {
                    let value = cx(sc.c(h, i, j), CHOP);
                    if value != [0.0, 0.0] {
                        entries.push(ConstantEntry { h: h + 1, i: i + 1, j: j + 1, value });
                    }
                }
            }
        }
        ConstantsSummary { basis: basis.to_string(), entries }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    /// 1-based generator indices of the tuple.
    pub alpha: Vec<usize>,
    pub r: Cx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    /// 1-based index of the generator the weights belong to.
    pub j: usize,
    pub entries: Vec<WeightEntry>,
}

impl WeightSummary {
    pub fn new(table: &WeightTable) -> Self {
        WeightSummary {
            j: table.j + 1,
            entries: table
                .entries
                .iter()
                .map(|(alpha, r)| WeightEntry { alpha: alpha.indices().iter().map(|i| i + 1).collect(), r: cx(*r, CHOP) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub adapted: Vec<Cx>,
    pub original: Vec<Cx>,
    pub betti: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub candidates_tested: usize,
    pub points: Vec<PointSummary>,
}

impl SpectrumSummary {
    /// Coordinates are only meaningful to `eig_cluster`, so smaller parts print as zero.
    pub fn new(result: &SpectrumResult, tol: &Tolerances) -> Self {
        SpectrumSummary {
            candidates_tested: result.candidates_tested,
            points: result
                .points
                .iter()
                .map(|p| PointSummary {
                    adapted: cx_vec(&p.adapted.coords, tol.eig_cluster),
                    original: cx_vec(&p.original, tol.eig_cluster),
                    betti: p.betti.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub exit_code: i32,
    pub message: String,
}

/// Everything a run produced. Sections a command does not compute are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub instance: InstanceSummary,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<FlagSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<ConstantsSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_spectra: Option<Vec<Vec<Cx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightSummary>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<Vec<Cx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorSummary>,
}

impl Report {
    pub fn new(command: &str, instance: InstanceSummary, tolerances: Tolerances) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            instance,
            tolerances,
            classification: None,
            series: None,
            flag: None,
            structure_constants: None,
            component_spectra: None,
            weights: None,
            spectrum: None,
            checks: None,
            oracle: None,
            error: None,
        }
    }

    /// Indented JSON with arrays of scalars (complex pairs, tuples) on one line.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("reports always serialise");
        let mut out = String::new();
        write_value(&mut out, &value, 0);
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

fn is_scalar(v: &serde_json::Value) -> bool {
    !(v.is_array() || v.is_object())
}

/// Scalar lists, and short lists of scalar lists such as a tuple of complex pairs.
fn inline(items: &[serde_json::Value]) -> bool {
    let scalar_list = |v: &serde_json::Value| v.as_array().is_some_and(|a| a.iter().all(is_scalar));
    items.iter().all(is_scalar) || (items.len() <= 8 && items.iter().all(scalar_list))
}

fn write_value(out: &mut String, v: &serde_json::Value, depth: usize) {
    use serde_json::Value;
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if inline(items) => {
            out.push('[');
            for (n, item) in items.iter().enumerate() {
                if n > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, depth + 1);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (n, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if n + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (n, (key, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if n + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Rounds the residual of a check to the report precision.
pub fn rounded_check(mut c: CheckResult) -> CheckResult {
    c.max_residual = c.max_residual.map(round12);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use liespec::numkit::c64;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-1.5), -1.5);
        assert_eq!(round12(1.234567890123456e-20), 1.23456789012e-20);
        assert_eq!(round12(-0.0).to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn compact_layout() {
        let v = serde_json::json!({"a": [[1.0, 0.0], [2.0, -0.5]], "b": {"c": []}, "d": "x"});
        let mut out = String::new();
        write_value(&mut out, &v, 0);
        assert_eq!(out, "{\n  \"a\": [[1.0, 0.0], [2.0, -0.5]],\n  \"b\": {\n    \"c\": []\n  },\n  \"d\": \"x\"\n}");
        assert_eq!(serde_json::from_str::<serde_json::Value>(&out).unwrap(), v);
    }

    #[test]
    fn chop_small_parts() {
        assert_eq!(cx(c64(-3e-13, 0.5), CHOP), [0.0, 0.5]);
        assert_eq!(cx(c64(2e-9, -1.0), 1e-8), [0.0, -1.0]);
    }
}
