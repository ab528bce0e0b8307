//! Result rows and their human, CSV and JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// One line of output. CSV and JSON carry exactly these fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub nu_or_c: String,
    pub published_nodes: u64,
    pub update_info_bytes: f64,
    pub ops: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub title: String,
    /// Header of the first column.
    pub key: String,
    /// Display unit for `update_info_bytes` and its size in bytes.
    pub size_unit: (String, f64),
    pub ops_label: String,
    pub rows: Vec<Row>,
    pub footnotes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Csv,
    Json,
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

pub fn from_csv(text: &str) -> Result<Vec<Row>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

pub fn to_json(rows: &[Row]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

fn short(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() < 0.1 {
        format!("{v:.3}")
    } else {
        format!("{v:.2}")
    }
}

pub fn render_human(t: &Table) -> String {
    let (unit, scale) = &t.size_unit;
    let header = [t.key.clone(), "published".into(), format!("|U| ({unit})"), t.ops_label.clone(), "time (s)".into()];
    let cells: Vec<[String; 5]> = t
        .rows
        .iter()
        .map(|r| {
            [
                r.nu_or_c.clone(),
                r.published_nodes.to_string(),
                short(r.update_info_bytes / scale),
                r.ops.to_string(),
                if r.seconds == 0.0 { "~0".into() } else { format!("{:.4}", r.seconds) },
            ]
        })
        .collect();
    let mut width = header.clone().map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    writeln!(out, "{}", t.title).unwrap();
    let line = |out: &mut String, row: &[String; 5]| {
        let parts: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(out, "  {}", parts.join("  ")).unwrap();
    };
    line(&mut out, &header);
    for row in &cells {
        line(&mut out, row);
    }
    for (i, f) in t.footnotes.iter().enumerate() {
        writeln!(out, "  [{}] {f}", i + 1).unwrap();
    }
    out
}

pub fn render(t: &Table, format: Format) -> String {
    match format {
        Format::Human => render_human(t),
        Format::Csv => to_csv(&t.rows),
        Format::Json => to_json(&t.rows) + "\n",
    }
}
