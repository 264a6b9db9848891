//! Verdicts with raw index counterexamples, shared by every checker.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            counterexample: None,
            note: None,
        }
    }

    pub fn fail(name: impl Into<String>, counterexample: Vec<usize>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            counterexample: Some(counterexample),
            note: None,
        }
    }

    /// Pass if `counterexample` is `None`.
    pub fn from_counterexample(name: impl Into<String>, counterexample: Option<Vec<usize>>) -> Self {
        match counterexample {
            None => Check::pass(name),
            Some(c) => Check::fail(name, c),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn failure_names(&self) -> Vec<String> {
        self.failures().map(|c| c.name.clone()).collect()
    }
}
