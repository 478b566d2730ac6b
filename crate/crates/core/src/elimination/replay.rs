//! Lifting a verified certificate to exact stencil algebra.

use thiserror::Error;

use super::certificate::{verify_derivation, Derivation, Rejection, Step};
use crate::exec::Execution;
use crate::rational::Rational;
use crate::stencil::{self, Stencil, StencilError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("certificate rejected: {0}")]
    Rejected(#[from] Rejection),
    #[error("step {step}: stencil operation failed: {source}")]
    Stencil { step: usize, source: StencilError },
    #[error("step {step}: replayed stencil differs from the Vandermonde solution on {nodes}")]
    ReplayMismatch { step: usize, nodes: String },
}

/// Replays `d` as stencil operations: inputs become forward shifts, dilations
/// double the nodes, eliminations cancel the removed node. Every step is then
/// checked against the unique stencil on its node set.
pub fn replay_derivation(n: usize, d: &Derivation) -> Result<Vec<Stencil>, ReplayError> {
    replay_derivation_with(n, d, Execution::default())
}

pub fn replay_derivation_with(n: usize, d: &Derivation, exec: Execution) -> Result<Vec<Stencil>, ReplayError> {
    let verified = verify_derivation(n, d)?;
    let forward = stencil::forward_riemann(n).map_err(|source| ReplayError::Stencil { step: 0, source })?;
    let two = Rational::from(2);

    let mut stencils: Vec<Stencil> = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        let s = match *step {
            Step::Input { j } => Ok(stencil::shift(&forward, &Rational::from(j))),
            Step::Dilate { src } => stencil::dilate(&stencils[src], &two),
            Step::Eliminate { src1, src2, removed } => {
                stencil::eliminate(&stencils[src1], &stencils[src2], &Rational::from(removed))
            }
        }
        .map_err(|source| ReplayError::Stencil { step: i, source })?;
        stencils.push(s);
    }

    let checks = exec.map_range(stencils.len(), |i| {
        let nodes: Vec<Rational> = verified.sets[i].elements().iter().map(|&x| Rational::from(x)).collect();
        match Stencil::from_nodes(&nodes, n) {
            Ok(expected) => expected == stencils[i],
            Err(_) => false,
        }
    });
    if let Some(step) = checks.iter().position(|ok| !ok) {
        return Err(ReplayError::ReplayMismatch {
            step,
            nodes: verified.sets[step].to_string(),
        });
    }
    Ok(stencils)
}
