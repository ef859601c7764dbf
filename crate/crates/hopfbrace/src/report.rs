//! Suite reports: pass/fail counts plus replayable failure witnesses.
//!
//! The JSON rendering depends only on the suite name, the configuration echo
//! and the recorded checks, so identical configurations produce byte-identical
//! reports. Wall-clock time is shown in the text rendering only.

use serde::{Deserialize, Serialize};

/// A single failed identity with enough data to reproduce it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub seed: u64,
    pub inputs: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: serde_json::Value,
    pub trials: u64,
    pub checks: u64,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            config: serde_json::Value::Null,
            trials: 0,
            checks: 0,
            failures: Vec::new(),
        }
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, ok: bool, mk_failure: impl FnOnce() -> Failure) {
        self.checks += 1;
        if !ok {
            self.failures.push(mk_failure());
        }
    }

    /// Convenience for checks whose operands render with `Display`.
    pub fn check_eq<T: PartialEq, F: Fn(&T) -> String>(
        &mut self,
        check: &str,
        seed: u64,
        inputs: &str,
        lhs: &T,
        rhs: &T,
        fmt: F,
    ) {
        let ok = lhs == rhs;
        self.checks += 1;
        if !ok {
            self.failures.push(Failure {
                check: check.to_string(),
                seed,
                inputs: inputs.to_string(),
                lhs: fmt(lhs),
                rhs: fmt(rhs),
            });
        }
    }

    pub fn absorb(&mut self, other: Report) {
        self.trials += other.trials;
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "[{status}] {} — {} trials, {} checks, {} failures\n",
            self.suite,
            self.trials,
            self.checks,
            self.failures.len()
        ));
        for f in self.failures.iter().take(10) {
            out.push_str(&format!(
                "  failure in {} (seed {}):\n    inputs: {}\n    lhs: {}\n    rhs: {}\n",
                f.check, f.seed, f.inputs, f.lhs, f.rhs
            ));
        }
        if self.failures.len() > 10 {
            out.push_str(&format!("  ... and {} more\n", self.failures.len() - 10));
        }
        out
    }
}
