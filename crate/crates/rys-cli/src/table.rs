//! Machine-readable table document: the one output shape every table
//! command emits, serializable as JSON (schema under `schema/`) or CSV.

use serde::Serialize;
use std::collections::BTreeMap;

/// Echo of the run configuration. Fields that do not apply to a command are
/// serialized as null so the document shape is uniform.
#[derive(Serialize, Debug, Clone)]
pub struct ParamsEcho {
    pub command: String,
    pub z: Option<f64>,
    pub lambda: Option<f64>,
    pub n: Option<u64>,
    pub digits: u32,
    pub z0: Option<f64>,
    pub z1: Option<f64>,
    pub steps: Option<u64>,
}

impl ParamsEcho {
    pub fn point(command: &str, z: f64, lambda: f64, n: usize, digits: u32) -> Self {
        ParamsEcho {
            command: command.to_string(),
            z: Some(z),
            lambda: Some(lambda),
            n: Some(n as u64),
            digits,
            z0: None,
            z1: None,
            steps: None,
        }
    }
}

/// Tabular output document: column names, rows of numbers (null where a
/// quantity is undefined at that row), and scalar residual diagnostics.
#[derive(Serialize, Debug, Clone)]
pub struct TableDoc {
    pub params: ParamsEcho,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub residual_summary: BTreeMap<String, Option<f64>>,
}

/// Shortest decimal representation that parses back to exactly the same
/// double; plain notation in a human range, scientific outside it. Both
/// forms round-trip, so emitted files are bit-stable for a fixed input.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Covers -0.0 too; the distinction carries no information here.
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl TableDoc {
    pub fn new(params: ParamsEcho, columns: &[&str]) -> Self {
        TableDoc {
            params,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            residual_summary: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the column list"
        );
        self.rows.push(row);
    }

    pub fn set_summary(&mut self, key: &str, value: Option<f64>) {
        self.residual_summary.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialization cannot fail");
        s.push('\n');
        s
    }

    /// CSV: header, data rows (empty field for null), then the residual
    /// summary as `# key,value` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|v| v.map(fmt_f64).unwrap_or_default())
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        for (k, v) in &self.residual_summary {
            out.push_str("# ");
            out.push_str(k);
            out.push(',');
            if let Some(v) = v {
                out.push_str(&fmt_f64(*v));
            }
            out.push('\n');
        }
        out
    }
}
