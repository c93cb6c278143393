//! Pass/fail reports shared by the verifiers.

use std::fmt::Write as _;

use serde::Serialize;

use crate::kernel::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub condition_id: String,
    pub residual_text: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub subject: String,
    pub conditions: Vec<Condition>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            conditions: Vec::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, residual_text: impl Into<String>, ok: bool) {
        self.conditions.push(Condition {
            condition_id: id.into(),
            residual_text: residual_text.into(),
            verdict: Verdict::from_bool(ok),
        });
    }

    /// Passes when `residual` is identically zero.
    pub fn expect_zero(&mut self, id: impl Into<String>, residual: &Expr) {
        self.push(id, residual.to_string(), residual.is_identically_zero());
    }

    /// Passes when `value` is not identically zero.
    pub fn expect_nonzero(&mut self, id: impl Into<String>, value: &Expr) {
        self.push(id, value.to_string(), !value.is_identically_zero());
    }

    pub fn extend(&mut self, other: Report) {
        self.conditions.extend(other.conditions);
    }

    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    /// Fixed-width text table; long residuals are cut at 72 characters.
    pub fn to_table(&self) -> String {
        let width = self
            .conditions
            .iter()
            .map(|c| c.condition_id.len())
            .max()
            .unwrap_or(9)
            .max(9);
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.subject);
        let _ = writeln!(out, "{:<width$}  {:<7}  residual", "condition", "verdict");
        for c in &self.conditions {
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
            };
            let mut text = c.residual_text.clone();
            if text.chars().count() > 72 {
                text = text.chars().take(69).collect::<String>() + "...";
            }
            let _ = writeln!(out, "{:<width$}  {:<7}  {}", c.condition_id, verdict, text);
        }
        let _ = writeln!(out, "overall: {}", if self.passed() { "pass" } else { "FAIL" });
        out
    }
}
