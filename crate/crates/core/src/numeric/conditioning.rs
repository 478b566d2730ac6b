use std::collections::BTreeSet;

use serde::Serialize;

use crate::rational::Rational;
use crate::stencil::{mz_difference, shift_family, Stencil, StencilError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditioningReport {
    pub stencil: String,
    pub order: usize,
    pub node_count: usize,
    /// Largest node minus smallest node.
    pub span: Rational,
    pub abs_sum: Rational,
    pub abs_sum_f64: f64,
    pub max_abs: Rational,
}

pub fn conditioning_report(label: &str, s: &Stencil) -> ConditioningReport {
    let abs_sum: Rational = s.coefficients().iter().map(Rational::abs).sum();
    let max_abs = s.coefficients().iter().map(Rational::abs).max().unwrap_or_else(Rational::zero);
    let span = match (s.nodes().first(), s.nodes().last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => Rational::zero(),
    };
    ConditioningReport {
        stencil: label.to_string(),
        order: s.order(),
        node_count: s.len(),
        span,
        abs_sum_f64: abs_sum.to_f64(),
        abs_sum,
        max_abs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    /// Number of separate limits the method needs.
    pub limits: usize,
    /// Distinct base points across all stencils of the method.
    pub points: Vec<Rational>,
    pub point_count: usize,
    pub max_point: Rational,
    pub stencils: Vec<ConditioningReport>,
}

impl MethodSummary {
    fn new(method: &str, stencils: Vec<(String, Stencil)>) -> Self {
        let points: BTreeSet<Rational> = stencils.iter().flat_map(|(_, s)| s.nodes().iter().cloned()).collect();
        let points: Vec<Rational> = points.into_iter().collect();
        MethodSummary {
            method: method.to_string(),
            limits: stencils.len(),
            point_count: points.len(),
            max_point: points.last().cloned().unwrap_or_else(Rational::zero),
            points,
            stencils: stencils.iter().map(|(l, s)| conditioning_report(l, s)).collect(),
        }
    }
}

/// The doubling-recursion difference against the forward shift family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareTable {
    pub order: usize,
    pub mz: MethodSummary,
    pub shifts: MethodSummary,
}

pub fn compare(order: usize) -> Result<CompareTable, StencilError> {
    if order < 2 {
        return Err(StencilError::InvalidOrder(order));
    }
    let mz = mz_difference(order)?.stencil;
    let family = shift_family(order)?;
    Ok(CompareTable {
        order,
        mz: MethodSummary::new("mz", vec![(format!("mz({order})"), mz)]),
        shifts: MethodSummary::new(
            "shifts",
            family.into_iter().enumerate().map(|(j, s)| (format!("D_{{{order},{j}}}"), s)).collect(),
        ),
    })
}
