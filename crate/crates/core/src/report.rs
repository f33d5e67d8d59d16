//! Residual reports: every verification returns data rather than panicking.

use std::fmt::Display;

use num_traits::Zero;
use serde::Serialize;

use crate::exact::{fmt_scalar, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub at: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            checked: 0,
            failures: Vec::new(),
            note: None,
        }
    }

    /// Records one exact comparison; a nonzero residual is a failure.
    pub fn exact(&mut self, at: impl Display, residual: &Scalar) {
        self.checked += 1;
        if !residual.is_zero() {
            self.failures.push(Failure {
                at: at.to_string(),
                residual: fmt_scalar(residual),
            });
        }
    }

    /// Records a boolean condition with a free-form description of the miss.
    pub fn holds(&mut self, at: impl Display, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(Failure {
                at: at.to_string(),
                residual: detail(),
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures.into_iter().map(|f| Failure {
            at: format!("{}: {}", other.name, f.at),
            residual: f.residual,
        }));
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
