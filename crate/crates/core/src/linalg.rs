//! Exact solver for the Vandermonde conditions of a generalized Riemann
//! difference.
//!
//! Given `n + 1` distinct nodes `a_0 < ... < a_n`, the conditions
//!
//! ```text
//! sum_i A_i * a_i^j = n! * delta(j, n)     for j = 0..=n,   0^0 = 1
//! ```
//!
//! form a transposed Vandermonde system with a unique solution. It is solved
//! by elimination in the Newton basis `N_k(x) = (x - a_0)...(x - a_{k-1})`:
//! a forward sweep turns the right-hand side into the functionals `L(N_k)`,
//! and the resulting triangular system is back-substituted with running
//! divided-difference denominators. Every step is exact rational arithmetic
//! and the whole solve is `O(n^2)`.

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("DuplicateNodes: node {0} appears twice")]
    DuplicateNodes(Rational),
    #[error("ArityMismatch: expected {expected} entries, found {found}")]
    ArityMismatch { expected: usize, found: usize },
}

/// Entry `j` is `sum_i A_i a_i^j - n! delta(j, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VandermondeResidual {
    pub values: Vec<Rational>,
}

impl VandermondeResidual {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rational::is_zero)
    }

    /// True when every condition below the top one holds.
    pub fn lower_conditions_hold(&self) -> bool {
        let n = self.values.len().saturating_sub(1);
        self.values[..n].iter().all(Rational::is_zero)
    }
}

/// Sorts nodes ascending and rejects duplicates.
pub fn sorted_distinct(nodes: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    let mut sorted = nodes.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(LinalgError::DuplicateNodes(w[0].clone()));
    }
    Ok(sorted)
}

/// Coefficients of the unique order-`order` generalized Riemann difference
/// on `nodes`, aligned to the nodes sorted ascending.
pub fn solve_vandermonde(nodes: &[Rational], order: usize) -> Result<Vec<Rational>, LinalgError> {
    if nodes.len() != order + 1 {
        return Err(LinalgError::ArityMismatch {
            expected: order + 1,
            found: nodes.len(),
        });
    }
    let nodes = sorted_distinct(nodes)?;
    let mut rhs = vec![Rational::zero(); order + 1];
    rhs[order] = Rational::factorial(order);
    Ok(solve_transposed(&nodes, rhs))
}

/// Solves `sum_i w_i a_i^j = rhs_j` for distinct `nodes`.
fn solve_transposed(nodes: &[Rational], mut rhs: Vec<Rational>) -> Vec<Rational> {
    let n = nodes.len() - 1;

    // Forward sweep: rhs_k <- L(N_k).
    for k in 0..n {
        for j in (k + 1..=n).rev() {
            let t = &nodes[k] * &rhs[j - 1];
            rhs[j] -= t;
        }
    }

    // Back substitution: w_i = sum_{k >= i} L(N_k) / prod_{m <= k, m != i} (a_i - a_m).
    (0..=n)
        .map(|i| {
            let mut denom: Rational = (0..i).map(|m| &nodes[i] - &nodes[m]).product();
            let mut w = Rational::zero();
            for k in i..=n {
                if k > i {
                    denom *= &nodes[i] - &nodes[k];
                }
                if !rhs[k].is_zero() {
                    w += &rhs[k] / &denom;
                }
            }
            w
        })
        .collect()
}

/// Exact residual of the order-`order` Vandermonde conditions.
pub fn vandermonde_residual(
    coefficients: &[Rational],
    nodes: &[Rational],
    order: usize,
) -> Result<VandermondeResidual, LinalgError> {
    if coefficients.len() != nodes.len() {
        return Err(LinalgError::ArityMismatch {
            expected: nodes.len(),
            found: coefficients.len(),
        });
    }
    let mut values = vec![Rational::zero(); order + 1];
    for (c, a) in coefficients.iter().zip(nodes) {
        let mut power = Rational::one();
        for (j, v) in values.iter_mut().enumerate() {
            if j > 0 {
                power *= a;
            }
            *v += c * &power;
        }
    }
    values[order] -= Rational::factorial(order);
    Ok(VandermondeResidual { values })
}
