//! The good-set calculus: node sets of size `n + 1`, closed under doubling
//! and under elimination of a shared element between two sets that share
//! exactly `n` elements.

mod certificate;
mod generate;
mod nodeset;
mod replay;

pub use certificate::{verify_derivation, CertificateError, Derivation, Rejection, Rule, Step, Verified, MAX_ORDER};
pub use generate::{
    derive_geometric, intruder_profile, render_stage, step2_profile_formula, step2_row, EngineError, Generated,
    IntruderProfile, RowProfile, Stage, StageKind, Trace,
};
pub use nodeset::{is_intruder, is_power_of_two, NodeSet};
pub use replay::{replay_derivation, replay_derivation_with, ReplayError};

use crate::exec::Execution;

/// Initial sets `{j, ..., n + j}` for `j = 0..=n-2`.
pub fn initial_sets(n: usize) -> Result<Vec<NodeSet>, EngineError> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(EngineError::InvalidOrder(n));
    }
    Ok((0..=n - 2).map(|j| NodeSet::interval(j as u64, (n + j) as u64)).collect())
}

/// Generates derivations for several orders at once, in input order.
pub fn derive_many(orders: &[usize], exec: Execution) -> Vec<Result<Generated, EngineError>> {
    exec.map(orders, |&n| derive_geometric(n))
}
