use serde_json::{json, Value};

use super::{check_proposition, RefinedTable};
use crate::series::{rat_to_string, Coefficient};

pub fn table_to_json(table: &RefinedTable) -> Value {
    let report = check_proposition(table);
    let entries: Vec<Value> = (0..=table.window())
        .map(|i| {
            json!({
                "i": i,
                "N": table.n(i).to_json(),
                "M": table.m_entry(i).to_json(),
                "N_at_y1": rat_to_string(&table.y1_n(i)),
            })
        })
        .collect();
    json!({
        "surface": table.surface,
        "bundle": table.bundle,
        "geometry": table.geometry,
        "delta": table.delta,
        "m": table.m,
        "truncation": {"n_max": table.n_max, "x_order": table.x_order},
        "entries": entries,
        "checks": report,
    })
}

const CSV_HEADER: &str = "surface,bundle,delta,i,N_i,M_i,N_i_at_y1";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(tables: &[RefinedTable]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for t in tables {
        for i in 0..=t.window() {
            let row = [
                t.surface.clone(),
                t.bundle.clone(),
                t.delta.to_string(),
                i.to_string(),
                t.n(i).to_y_string(),
                t.m_entry(i).to_y_string(),
                rat_to_string(&t.y1_n(i)),
            ];
            let row: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

/// Aligned columns, one row per `(table, i)`.
pub fn render_table(tables: &[RefinedTable]) -> String {
    let header = ["surface", "bundle", "delta", "i", "N_i", "M_i", "N_i(y=1)"];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for t in tables {
        for i in 0..=t.window() {
            rows.push(vec![
                t.surface.clone(),
                t.bundle.clone(),
                t.delta.to_string(),
                i.to_string(),
                t.n(i).to_y_string(),
                t.m_entry(i).to_y_string(),
                rat_to_string(&t.y1_n(i)),
            ]);
        }
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
