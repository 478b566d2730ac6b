//! Derivation certificates and their verifier.
//!
//! A certificate is a list of primitive moves over node sets of size `n + 1`:
//!
//! * `input j` yields `{j, ..., n + j}` for `0 <= j <= n - 2`;
//! * `dilate src` yields the doubled set `2S`;
//! * `eliminate src1 src2 removed` requires the two sources to share exactly
//!   `n` elements, `removed` among them, and yields their union minus `removed`.
//!
//! The verifier recomputes every set from scratch and never trusts anything
//! the generator may have cached.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::nodeset::NodeSet;

/// Largest order accepted by the engine. Node values stay within `u64`.
pub const MAX_ORDER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum Step {
    Input { j: usize },
    Dilate { src: usize },
    Eliminate { src1: usize, src2: usize, removed: u64 },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Input { j } => write!(f, "input {j}"),
            Step::Dilate { src } => write!(f, "dilate #{src}"),
            Step::Eliminate { src1, src2, removed } => write!(f, "eliminate {removed} between #{src1} and #{src2}"),
        }
    }
}

/// An order-`n` derivation: the certificate that `final_set` is reachable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derivation {
    pub n: usize,
    pub steps: Vec<Step>,
    #[serde(rename = "final")]
    pub final_set: NodeSet,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(#[from] serde_json::Error),
}

impl Derivation {
    /// Deterministic JSON: one step per line, trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"n\": {},\n", self.n));
        out.push_str("  \"steps\": [");
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&serde_json::to_string(step).expect("steps serialize"));
        }
        if !self.steps.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("],\n");
        out.push_str("  \"final\": ");
        out.push_str(&serde_json::to_string(&self.final_set).expect("sets serialize"));
        out.push_str("\n}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The legality rule a rejected step broke.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule")]
pub enum Rule {
    InvalidOrder { n: usize },
    OrderMismatch { expected: usize, found: usize },
    EmptyDerivation,
    InputOutOfRange { j: usize },
    ForwardReference { src: usize },
    Overflow,
    IntersectionNotN { expected: usize, found: usize },
    NodeNotShared { removed: u64 },
    FinalMismatch,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::InvalidOrder { n } => write!(f, "InvalidOrder: n = {n} outside 2..={MAX_ORDER}"),
            Rule::OrderMismatch { expected, found } => write!(f, "OrderMismatch: expected n = {expected}, certificate has {found}"),
            Rule::EmptyDerivation => write!(f, "EmptyDerivation: no steps"),
            Rule::InputOutOfRange { j } => write!(f, "InputOutOfRange: input {j} is not among the given shifts"),
            Rule::ForwardReference { src } => write!(f, "ForwardReference: source #{src} is not an earlier step"),
            Rule::Overflow => write!(f, "Overflow: doubled set exceeds 64-bit range"),
            Rule::IntersectionNotN { expected, found } => {
                write!(f, "IntersectionNotN: sources share {found} elements, expected {expected}")
            }
            Rule::NodeNotShared { removed } => write!(f, "NodeNotShared: {removed} is not in both sources"),
            Rule::FinalMismatch => write!(f, "FinalMismatch: claimed final set differs from the last step"),
        }
    }
}

/// Structured rejection. `step` is `None` for whole-certificate problems.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}", match .step { Some(i) => format!("step {i}: {rule}"), None => rule.to_string() })]
pub struct Rejection {
    pub step: Option<usize>,
    pub rule: Rule,
}

/// Output of a successful verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verified {
    pub n: usize,
    /// Set produced by each step, in step order.
    pub sets: Vec<NodeSet>,
    /// Whether the final set is `{0, 1, 2, 4, ..., 2^(n-1)}`.
    pub reaches_target: bool,
}

fn reject(step: Option<usize>, rule: Rule) -> Rejection {
    Rejection { step, rule }
}

/// Checks every step of `d` as an order-`n` derivation.
pub fn verify_derivation(n: usize, d: &Derivation) -> Result<Verified, Rejection> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(reject(None, Rule::InvalidOrder { n }));
    }
    if d.n != n {
        return Err(reject(None, Rule::OrderMismatch { expected: n, found: d.n }));
    }
    if d.steps.is_empty() {
        return Err(reject(None, Rule::EmptyDerivation));
    }
    let mut sets: Vec<NodeSet> = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        let source = |src: usize| sets.get(src).filter(|_| src < i).ok_or(reject(Some(i), Rule::ForwardReference { src }));
        let produced = match *step {
            Step::Input { j } => {
                if j > n - 2 {
                    return Err(reject(Some(i), Rule::InputOutOfRange { j }));
                }
                NodeSet::interval(j as u64, (n + j) as u64)
            }
            Step::Dilate { src } => source(src)?.doubled().ok_or(reject(Some(i), Rule::Overflow))?,
            Step::Eliminate { src1, src2, removed } => {
                let (s, t) = (source(src1)?, source(src2)?);
                let found = s.intersection_len(t);
                if found != n {
                    return Err(reject(Some(i), Rule::IntersectionNotN { expected: n, found }));
                }
                if !(s.contains(removed) && t.contains(removed)) {
                    return Err(reject(Some(i), Rule::NodeNotShared { removed }));
                }
                s.union_without(t, removed)
            }
        };
        sets.push(produced);
    }
    if sets.last() != Some(&d.final_set) {
        return Err(reject(None, Rule::FinalMismatch));
    }
    let reaches_target = d.final_set == NodeSet::geometric(n);
    Ok(Verified { n, sets, reaches_target })
}
