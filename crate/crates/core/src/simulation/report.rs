use std::io::Write;

use super::ScenarioReport;
use crate::error::Result;

const COLUMNS: [&str; 10] = [
    "scenario_id",
    "family",
    "mean_ratio",
    "std_ratio",
    "skew_ratio",
    "utility_id",
    "a",
    "success_pct",
    "n_pairs",
    "n_regenerations",
];

fn rows(reports: &[ScenarioReport]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in reports {
        let s = &r.spec;
        for u in &r.results {
            out.push(vec![
                s.id.clone(),
                s.family.name().to_string(),
                s.mean_ratio.to_string(),
                s.std_ratio.to_string(),
                s.skew_ratio.map(|x| x.to_string()).unwrap_or_default(),
                u.utility.id(),
                u.utility.a().to_string(),
                format!("{:.2}", u.success_pct),
                r.n_pairs_run.to_string(),
                r.n_regenerations.to_string(),
            ]);
        }
    }
    out
}

fn write_header_comments<W: Write>(out: &mut W, manifest: &[(String, String)], prefix: &str) -> Result<()> {
    for (k, v) in manifest {
        writeln!(out, "{prefix}{k}: {v}")?;
    }
    Ok(())
}

/// One row per (scenario, utility). `manifest` entries are written first as
/// `# key: value` comment lines.
pub fn write_csv<W: Write>(reports: &[ScenarioReport], manifest: &[(String, String)], mut out: W) -> Result<()> {
    write_header_comments(&mut out, manifest, "# ")?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| std::io::Error::other(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for row in rows(reports) {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// The same rows as [`write_csv`] as an aligned Markdown table.
pub fn write_markdown<W: Write>(reports: &[ScenarioReport], manifest: &[(String, String)], mut out: W) -> Result<()> {
    if !manifest.is_empty() {
        write_header_comments(&mut out, manifest, "- ")?;
        writeln!(out)?;
    }
    let header: Vec<String> = COLUMNS.iter().map(|c| c.to_string()).collect();
    markdown_table(&header, &rows(reports), &mut out)
}

/// Writes an aligned Markdown table; numeric-looking columns are right-aligned.
pub fn markdown_table<W: Write + ?Sized>(header: &[String], rows: &[Vec<String>], out: &mut W) -> Result<()> {
    let n = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len().max(3)).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let numeric: Vec<bool> = (0..n)
        .map(|c| {
            !rows.is_empty()
                && rows
                    .iter()
                    .all(|r| r.get(c).is_none_or(|x| x.is_empty() || x.parse::<f64>().is_ok()))
        })
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = (0..n)
            .map(|c| {
                let cell = cells.get(c).map(String::as_str).unwrap_or("");
                if numeric[c] {
                    format!("{cell:>w$}", w = widths[c])
                } else {
                    format!("{cell:<w$}", w = widths[c])
                }
            })
            .collect();
        format!("| {} |", parts.join(" | "))
    };
    writeln!(out, "{}", line(header))?;
    let rule: Vec<String> = (0..n)
        .map(|c| {
            if numeric[c] {
                format!("{}:", "-".repeat(widths[c] - 1))
            } else {
                "-".repeat(widths[c])
            }
        })
        .collect();
    writeln!(out, "| {} |", rule.join(" | "))?;
    for row in rows {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}
