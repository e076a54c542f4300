//! Per-language score tables with the zero-resource average (`AVG_X`, over
//! DE ES IT ZH) and the all-language average (`AVG`).

use serde::Serialize;

pub const LANGUAGES: [&str; 5] = ["DE", "ES", "IT", "ZH", "EN"];

/// Rounds half away from zero to one decimal. Scores are sums of values
/// with one decimal, so a tie like 71.575 may sit a hair below the midpoint
/// in binary; the epsilon absorbs that.
pub fn round1(x: f64) -> f64 {
    ((x * 10.0) + x.signum() * 1e-9).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub label: String,
    /// DE, ES, IT, ZH, EN.
    pub scores: [f64; 5],
}

impl ScoreRow {
    pub fn new(label: impl Into<String>, scores: [f64; 5]) -> Self {
        ScoreRow { label: label.into(), scores }
    }

    pub fn avg_x(&self) -> f64 {
        self.scores[..4].iter().sum::<f64>() / 4.0
    }

    pub fn avg(&self) -> f64 {
        self.scores.iter().sum::<f64>() / 5.0
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    label: &'a str,
    #[serde(rename = "DE")]
    de: f64,
    #[serde(rename = "ES")]
    es: f64,
    #[serde(rename = "IT")]
    it: f64,
    #[serde(rename = "ZH")]
    zh: f64,
    #[serde(rename = "EN")]
    en: f64,
    #[serde(rename = "AVG_X")]
    avg_x: f64,
    #[serde(rename = "AVG")]
    avg: f64,
}

pub fn render_json(rows: &[ScoreRow]) -> serde_json::Value {
    let rows: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            label: &r.label,
            de: r.scores[0],
            es: r.scores[1],
            it: r.scores[2],
            zh: r.scores[3],
            en: r.scores[4],
            avg_x: round1(r.avg_x()),
            avg: round1(r.avg()),
        })
        .collect();
    serde_json::json!({ "rows": rows })
}

pub fn render_table(rows: &[ScoreRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(5);
    let mut out = format!("{:<width$}", "Model");
    for h in LANGUAGES.iter().chain(&["AVG_X", "AVG"]) {
        out.push_str(&format!(" {h:>6}"));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:<width$}", r.label));
        for s in r.scores.iter().chain(&[round1(r.avg_x()), round1(r.avg())]) {
            out.push_str(&format!(" {s:>6.1}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headline_row() {
        let row = ScoreRow::new("ours", [73.1, 75.9, 75.4, 61.9, 83.9]);
        assert_eq!(round1(row.avg()), 74.0);
        assert_eq!(round1(row.avg_x()), 71.6);
        let table = render_table(&[row]);
        assert!(table.lines().next().unwrap().ends_with("AVG_X    AVG"));
        assert!(table.contains("  71.6   74.0"));
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round1(0.25), 0.3);
        assert_eq!(round1(-0.25), -0.3);
        assert_eq!(round1(286.3 / 4.0), 71.6);
    }
}
