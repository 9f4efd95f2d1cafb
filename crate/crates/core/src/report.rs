//! Machine-readable pass/fail reports shared by the verification suites.

use serde::Serialize;

#[derive(Serialize, Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct CheckReport {
    pub checks: Vec<CheckLine>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(CheckLine {
            name: name.into(),
            pass: true,
            detail: None,
        });
    }

    /// Passing check that still carries a recorded value.
    pub fn pass_with_detail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckLine {
            name: name.into(),
            pass: true,
            detail: Some(detail.into()),
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckLine {
            name: name.into(),
            pass: false,
            detail: Some(detail.into()),
        });
    }

    /// Records a pass, or a failure carrying the given detail.
    pub fn record(&mut self, name: impl Into<String>, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => self.pass(name),
            Err(detail) => self.fail(name, detail),
        }
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
