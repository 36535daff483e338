use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::discretization::GridDescriptor;

/// Outcome of one named residual check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub residual_max: f64,
    pub residual_l2: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid: GridDescriptor,
    pub notes: String,
}

impl VerificationReport {
    /// `pass` is derived from `residual_max ≤ tolerance`. Non-finite residuals are
    /// stored as `f64::MAX` and fail.
    pub fn new(
        check: impl Into<String>,
        residual_max: f64,
        residual_l2: f64,
        tolerance: f64,
        grid: GridDescriptor,
        notes: impl Into<String>,
    ) -> Self {
        let mut notes = notes.into();
        let mut clean = |v: f64| {
            if v.is_finite() {
                v.abs()
            } else {
                if !notes.contains("non-finite") {
                    if !notes.is_empty() {
                        notes.push_str("; ");
                    }
                    notes.push_str("non-finite residual");
                }
                f64::MAX
            }
        };
        let residual_max = clean(residual_max);
        let residual_l2 = clean(residual_l2);
        Self {
            check: check.into(),
            residual_max,
            residual_l2,
            tolerance,
            pass: residual_max <= tolerance,
            grid,
            notes,
        }
    }

    pub fn with_note(mut self, note: &str) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note);
        self
    }

    /// Forces failure, e.g. when a precondition does not hold.
    pub fn failed(mut self, note: &str) -> Self {
        self.pass = false;
        self.with_note(note)
    }
}

/// JSON array with object keys in sorted order.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let value: Value = serde_json::to_value(reports).expect("reports serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub fn reports_from_json(text: &str) -> Result<Vec<VerificationReport>, serde_json::Error> {
    serde_json::from_str(text)
}

pub const CSV_HEADER: &str = "check,residual_max,residual_l2,tolerance,pass,nr,nphi,notes";

pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{},{},{},{}\n",
            csv_field(&r.check),
            r.residual_max,
            r.residual_l2,
            r.tolerance,
            r.pass,
            r.grid.nr,
            r.grid.nphi,
            csv_field(&r.notes)
        ));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridDescriptor {
        GridDescriptor { nr: 8, nphi: 16 }
    }

    #[test]
    fn pass_follows_tolerance() {
        assert!(VerificationReport::new("a", 1e-3, 1e-4, 1e-3, grid(), "").pass);
        assert!(!VerificationReport::new("a", 2e-3, 1e-4, 1e-3, grid(), "").pass);
        let r = VerificationReport::new("a", f64::NAN, 0.0, 1.0, grid(), "");
        assert!(!r.pass);
        assert!(r.notes.contains("non-finite"));
    }

    #[test]
    fn empty_outputs() {
        assert_eq!(reports_to_json(&[]).trim(), "[]");
        assert_eq!(reports_to_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn json_round_trip_and_sorted_keys() {
        let reports = vec![
            VerificationReport::new("weingarten", 0.1 + 0.2, 1.0 / 3.0, 1e-2, grid(), "x, \"y\""),
            VerificationReport::new("k_convexity", 0.0, 0.0, 0.0, grid(), ""),
        ];
        let text = reports_to_json(&reports);
        assert_eq!(reports_from_json(&text).unwrap(), reports);
        let first = text.find("\"check\"").unwrap();
        assert!(first < text.find("\"grid\"").unwrap());
        assert!(text.find("\"residual_max\"").unwrap() < text.find("\"tolerance\"").unwrap());
        assert!(reports_to_csv(&reports).contains("\"x, \"\"y\"\"\""));
    }
}
