//! Dual-format command reports: a machine-readable JSON document (schema
//! versioned) and an aligned human-readable table. Both renderings are
//! byte-identical across runs for identical inputs.

use serde_json::{json, Value};

use crate::cell::AxiomReport;
use crate::rep::Classification;

/// Versioned structured result plus its plain-text rendering.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    pub fn new(mut json: Value, text: String) -> Report {
        if let Value::Object(map) = &mut json {
            map.insert("schema".into(), Value::from(1));
        }
        Report { json, text }
    }

    pub fn render(&self, json_mode: bool) -> String {
        if json_mode {
            serde_json::to_string_pretty(&self.json).expect("report json serializes")
        } else {
            self.text.clone()
        }
    }
}

/// Structured form of an axiom report, shared by the CLI and the C ABI.
pub fn axiom_json(report: &AxiomReport) -> Value {
    let mut checks = serde_json::Map::new();
    for (name, outcome) in report.lines() {
        checks.insert(
            name.to_string(),
            match outcome.witness() {
                None => json!({"pass": true}),
                Some(w) => json!({"pass": false, "witness": w}),
            },
        );
    }
    json!({ "passed": report.passed(), "checks": checks })
}

pub fn axiom_text(name: &str, report: &AxiomReport) -> String {
    let mut out = format!("axiom report for {name}\n");
    for (check, outcome) in report.lines() {
        out.push_str(&format!("  {check:<14} {outcome}\n"));
    }
    out.push_str(if report.passed() {
        "all axioms pass\n"
    } else {
        "AXIOM FAILURE\n"
    });
    out
}

/// Structured form of a classification table.
pub fn classification_json(c: &Classification) -> Value {
    json!({
        "rows": c.rows.iter().map(|r| json!({
            "cell": r.cell.to_string(),
            "dim_w": r.dim_w,
            "dim_l": r.dim_l,
            "in_lambda0": r.in_lambda0,
            "fingerprint": r.fingerprint,
        })).collect::<Vec<_>>(),
        "fingerprint_collision": c.fingerprint_collision,
    })
}

pub fn classification_text(name: &str, c: &Classification) -> String {
    let rows: Vec<Vec<String>> = c
        .rows
        .iter()
        .map(|r| {
            vec![
                r.cell.to_string(),
                r.dim_w.to_string(),
                r.dim_l.to_string(),
                if r.in_lambda0 { "yes".into() } else { "no".into() },
            ]
        })
        .collect();
    let mut text = format!("classification of {name}\n");
    text.push_str(&aligned_table(&["cell", "dim_W", "dim_L", "in_L0"], &rows));
    if c.fingerprint_collision {
        text.push_str(
            "warning: trace fingerprints collide; non-isomorphism certificate inconclusive\n",
        );
    }
    text
}

/// Left-aligned fixed-width table with a header rule.
pub fn aligned_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let render_row = |cells: &[String]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if i + 1 < cols {
                for _ in cell.len()..widths[i] {
                    line.push(' ');
                }
            }
        }
        line
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    out.push_str(&render_row(&header_cells));
    out.push('\n');
    let rule_len = widths.iter().sum::<usize>() + 2 * (cols.saturating_sub(1));
    out.push_str(&"-".repeat(rule_len));
    out.push('\n');
    for row in rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    out
}
