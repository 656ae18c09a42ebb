//! Check verdicts and their witnesses.
//!
//! Every checker in the crate answers with a `CheckReport`: it holds, it
//! fails with a replayable witness, or the truncation bound was too small to
//! decide. Soundness rule: a verdict other than `Inconclusive` is only
//! produced when the computation was exhaustive at the recorded exactness.

use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// The search touched the truncation ceiling; no claim either way.
    InconclusiveAtBound,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

/// How far a computed answer can be trusted beyond the stored truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    /// Every constraint of the full (untruncated) statement was visible.
    Exact,
    /// Exact because the target is coskeletal at the recorded degree.
    ExactByCoskeletality(u8),
    /// Exhaustive for the truncated data only; higher cells could differ.
    BoundedAt(u8),
}

/// Replayable evidence attached to a failing (or inconclusive) verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    Cell { level: String, name: String },
    CellPair { level: String, left: String, right: String },
    Edge { name: String },
    /// A lifting square with no diagonal: the generating map plus the two
    /// boundary maps, serialized by level.
    Square {
        generator: String,
        top: serde_json::Value,
        bottom: serde_json::Value,
    },
    MapElement { description: String, data: serde_json::Value },
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    /// Slug of the mathematical condition this report certifies; the suite
    /// output aggregates these into a traceability matrix.
    pub rule: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub exactness: Exactness,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Wall-clock time; deliberately not serialized so reports stay
    /// byte-identical across runs with the same seed.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn holds(rule: &str, exactness: Exactness) -> Self {
        CheckReport {
            rule: rule.to_string(),
            verdict: Verdict::Holds,
            witness: None,
            exactness,
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn fails(rule: &str, exactness: Exactness, witness: Witness) -> Self {
        CheckReport {
            rule: rule.to_string(),
            verdict: Verdict::Fails,
            witness: Some(witness),
            exactness,
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn inconclusive(rule: &str, note: &str) -> Self {
        CheckReport {
            rule: rule.to_string(),
            verdict: Verdict::InconclusiveAtBound,
            witness: None,
            exactness: Exactness::BoundedAt(0),
            notes: vec![note.to_string()],
            elapsed: Duration::ZERO,
        }
    }

    pub fn with_note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }
}
