//! Line-oriented run reports.
//!
//! ```text
//! TOOL semireg 0.1.0
//! COMMAND verify
//! SPEC polar2 DIGEST 3f1c...
//! SEED 1
//! TOL residual=1e-8 rank=1e-9
//! NOTE ...
//! CHECK <name> POINT <coords> LEFT <v> RIGHT <v> RESID <v> FLAGS <...> VERDICT <pass|fail>
//! SUMMARY status=pass ...
//! ```
//!
//! Floats are printed in shortest round-trip exponent form, so reports are
//! byte-identical whenever the computed values are.

use std::fmt::Write as _;

use crate::cartan::ResidualReport;

pub const TOOL: &str = concat!("semireg ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    /// Sort key; probes use indices past the sample points.
    pub point_index: usize,
    pub point: Vec<f64>,
    pub left: f64,
    pub right: f64,
    pub resid: f64,
    pub flags: Vec<String>,
    pub pass: bool,
}

impl CheckRecord {
    pub fn from_residual(index: usize, r: &ResidualReport, tol: f64) -> Self {
        let name = if r.identity.starts_with("frame_") {
            format!("{}[{}]", r.identity, r.fields.first().map_or("", |s| s.as_str()))
                .replace(' ', ",")
        } else {
            r.identity.clone()
        };
        let mut flags = Vec::new();
        if r.flags.on_locus {
            flags.push("on-locus".to_string());
        }
        if r.flags.out_of_image {
            flags.push("out-of-image".to_string());
        }
        CheckRecord {
            name,
            point_index: index,
            point: r.point.clone(),
            left: r.left,
            right: r.right,
            resid: r.rel_residual,
            flags,
            pass: r.passed(tol),
        }
    }

    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    pub fn render(&self) -> String {
        format!(
            "CHECK {} POINT {} LEFT {} RIGHT {} RESID {} FLAGS {} VERDICT {}",
            self.name,
            format_point(&self.point),
            num(self.left),
            num(self.right),
            num(self.resid),
            if self.flags.is_empty() {
                "-".to_string()
            } else {
                self.flags.join(",")
            },
            if self.pass { "pass" } else { "fail" }
        )
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn format_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    pub spec_name: String,
    pub digest: String,
    pub seed: Option<u64>,
    pub tol: f64,
    pub rank_tol: f64,
    pub notes: Vec<String>,
    pub records: Vec<CheckRecord>,
    /// Extra `key=value` items for the summary line.
    pub summary: Vec<(String, String)>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, spec_name: &str, digest: &str, tol: f64, rank_tol: f64) -> Self {
        RunReport {
            command: command.to_string(),
            spec_name: spec_name.to_string(),
            digest: digest.to_string(),
            seed: None,
            tol,
            rank_tol,
            notes: Vec::new(),
            records: Vec::new(),
            summary: Vec::new(),
            passed: true,
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn summarize(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    /// Orders records by point, then check name.
    pub fn sort(&mut self) {
        self.records
            .sort_by(|a, b| a.point_index.cmp(&b.point_index).then_with(|| a.name.cmp(&b.name)));
    }

    pub fn failed_count(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "TOOL {TOOL}");
        let _ = writeln!(s, "COMMAND {}", self.command);
        let _ = writeln!(s, "SPEC {} DIGEST {}", self.spec_name, self.digest);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "SEED {seed}");
        }
        let _ = writeln!(s, "TOL residual={} rank={}", num(self.tol), num(self.rank_tol));
        for n in &self.notes {
            let _ = writeln!(s, "NOTE {n}");
        }
        for r in &self.records {
            let _ = writeln!(s, "{}", r.render());
        }
        let _ = write!(
            s,
            "SUMMARY status={} records={} failed={}",
            if self.passed { "pass" } else { "fail" },
            self.records.len(),
            self.failed_count()
        );
        for (k, v) in &self.summary {
            let _ = write!(s, " {k}={v}");
        }
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_line_shape() {
        let r = CheckRecord {
            name: "first_structural".into(),
            point_index: 0,
            point: vec![0.0, 0.5],
            left: 1.0,
            right: 0.5,
            resid: 0.25,
            flags: vec!["on-locus".into(), "out-of-image".into()],
            pass: false,
        };
        assert_eq!(
            r.render(),
            "CHECK first_structural POINT (0,0.5) LEFT 1e0 RIGHT 5e-1 RESID 2.5e-1 \
             FLAGS on-locus,out-of-image VERDICT fail"
        );
    }

    #[test]
    fn summary_is_last() {
        let mut rep = RunReport::new("check", "polar2", "ab", 1e-8, 1e-9);
        rep.summarize("verdict", "radical-stationary");
        let text = rep.render();
        let last = text.lines().last().unwrap();
        assert!(last.starts_with("SUMMARY status=pass"));
        assert!(last.ends_with("verdict=radical-stationary"));
        assert!(text.contains("TOL residual=1e-8 rank=1e-9"));
    }
}
