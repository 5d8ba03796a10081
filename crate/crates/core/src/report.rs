//! Structured-text reports: energy records, experiment reports, and the
//! acceptance manifest. All output is deterministic: fixed field order,
//! shortest round-trip float formatting, no timestamps.

use std::fmt::Write as _;

/// One key/value record line: `name k1=v1 k2=v2 ...`.
pub fn record(name: &str, fields: &[(&str, String)]) -> String {
    let mut line = String::from(name);
    for (k, v) in fields {
        let _ = write!(line, " {k}={v}");
    }
    line.push('\n');
    line
}

/// Render a float with shortest round-trip formatting.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub details: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} {} {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name
        )
    }
}

/// Full acceptance run.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    /// Deterministic manifest text.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        out.push_str("acceptance-manifest v1\n");
        let _ = writeln!(out, "program rearrange {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "prng chacha8 seed {}", self.seed);
        let _ = writeln!(
            out,
            "status {}",
            if self.all_pass() { "PASS" } else { "FAIL" }
        );
        for r in &self.results {
            let _ = writeln!(out, "{}", r.line());
            for d in &r.details {
                let _ = writeln!(out, "  {d}");
            }
        }
        out
    }
}
