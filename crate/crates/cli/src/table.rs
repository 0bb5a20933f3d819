//! Merging run reports into one comparison table.

use std::fmt::Write as _;

use vicert::certificates::CertificateRecord;

use crate::run::SolutionRecord;

pub const HEADER: [&str; 6] = ["problem", "condition", "verdict", "margin", "seed", "run"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub problem: String,
    pub condition: String,
    pub verdict: String,
    pub margin: f64,
    pub seed: Option<u64>,
    pub run: String,
}

impl Row {
    fn cells(&self) -> [String; 6] {
        [
            self.problem.clone(),
            self.condition.clone(),
            self.verdict.clone(),
            format!("{:e}", self.margin),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.run.clone(),
        ]
    }
}

/// Rows of one report. Records that do not parse are skipped and described
/// in the returned warnings.
pub fn rows_from_text(run: &str, text: &str) -> (Vec<Row>, Vec<String>) {
    let mut warnings = Vec::new();
    let value: toml::Table = match text.parse() {
        Ok(v) => v,
        Err(e) => {
            warnings.push(format!("{run}: not a run report: {}", e.message().trim()));
            return (Vec::new(), warnings);
        }
    };
    let Some(problem) = value
        .get("run")
        .and_then(|r| r.get("problem"))
        .and_then(|p| p.as_str())
        .map(str::to_string)
    else {
        warnings.push(format!("{run}: missing run.problem"));
        return (Vec::new(), warnings);
    };
    let seed = value
        .get("config")
        .and_then(|c| c.get("seed"))
        .and_then(|s| s.as_integer())
        .and_then(|s| u64::try_from(s).ok());

    let mut rows = Vec::new();
    let records = |key: &str| {
        value
            .get(key)
            .and_then(|v| v.as_array())
            .cloned()
            .unwrap_or_default()
    };
    for (n, rec) in records("solutions").into_iter().enumerate().take(1) {
        match rec.try_into::<SolutionRecord>() {
            Ok(s) => rows.push(Row {
                problem: problem.clone(),
                condition: "solve".into(),
                verdict: s.status,
                margin: s.residual,
                seed,
                run: run.into(),
            }),
            Err(e) => warnings.push(format!(
                "{run}: solution {n} skipped: {}",
                e.message().trim()
            )),
        }
    }
    for (n, rec) in records("certificates").into_iter().enumerate() {
        match rec.try_into::<CertificateRecord>() {
            Ok(c) => rows.push(Row {
                problem: problem.clone(),
                condition: c.condition,
                verdict: c.verdict,
                margin: c.margin,
                seed: c.seed.or(seed),
                run: run.into(),
            }),
            Err(e) => warnings.push(format!(
                "{run}: certificate {n} skipped: {}",
                e.message().trim()
            )),
        }
    }
    (rows, warnings)
}

/// Sorts by problem, then condition; ties keep input order.
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| (&a.problem, &a.condition).cmp(&(&b.problem, &b.condition)));
}

pub fn render_text(rows: &[Row]) -> String {
    let cells: Vec<[String; 6]> = rows.iter().map(Row::cells).collect();
    let mut widths = HEADER.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cols: &[String]| {
        let joined: Vec<String> = cols
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", joined.join("  ").trim_end());
    };
    line(&HEADER.map(String::from));
    for row in &cells {
        line(row);
    }
    out
}

pub fn render_delimited(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row.cells()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(
            render_delimited(&[]),
            "problem,condition,verdict,margin,seed,run\n"
        );
        assert_eq!(render_text(&[]).lines().count(), 1);
    }

    #[test]
    fn malformed_certificates_are_skipped() {
        let text = r#"
[run]
problem = "p"

[[certificates]]
condition = "pmatrix"
verdict = "fail"
margin = -5.0

[[certificates]]
condition = "growth"
"#;
        let (rows, warnings) = rows_from_text("a.toml", text);
        assert_eq!(rows.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("certificate 1"));
    }

    #[test]
    fn garbage_is_a_warning() {
        let (rows, warnings) = rows_from_text("x", "this is = = not toml");
        assert!(rows.is_empty());
        assert_eq!(warnings.len(), 1);
    }
}
