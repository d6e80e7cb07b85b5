//! Check reports: counts of performed checks and located violations.

use serde::Serialize;
use std::fmt;

const KEEP: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report { name: name.to_string(), ..Default::default() }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    /// Records one check; the witness is only built on failure.
    pub fn check<F: FnOnce() -> String>(&mut self, check: &str, passed: bool, witness: F) {
        self.checks += 1;
        if !passed {
            self.fail(check, witness());
        }
    }

    pub fn fail(&mut self, check: &str, witness: String) {
        self.failures += 1;
        if self.violations.len() < KEEP {
            self.violations.push(Violation { check: check.to_string(), witness });
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checks += other.checks;
        self.failures += other.failures;
        for v in other.violations {
            if self.violations.len() < KEEP {
                self.violations.push(v);
            }
        }
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn has_check(&self, check: &str) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "{}: ok ({} checks)", self.name, self.checks)
        } else {
            write!(f, "{}: {} violations in {} checks", self.name, self.failures, self.checks)?;
            for v in &self.violations {
                write!(f, "\n  {}: {}", v.check, v.witness)?;
            }
            Ok(())
        }
    }
}
