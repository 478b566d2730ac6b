//! Generalized Riemann difference stencils and the operations that build new
//! ones from old: shifts, dilations, pairwise elimination, and the
//! Marcinkiewicz–Zygmund doubling recursion.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StencilError {
    #[error("invalid order {0}")]
    InvalidOrder(usize),
    #[error("dilation factor must be nonzero")]
    ZeroDilation,
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("node sets share {found} elements, expected {expected}")]
    IntersectionNotN { expected: usize, found: usize },
    #[error("node {0} is not shared by both stencils")]
    NodeNotShared(Rational),
    #[error("combination is degenerate: {0}")]
    DegenerateCombination(String),
    #[error("zero coefficient at node {0}")]
    ZeroCoefficient(Rational),
    #[error("coefficients do not satisfy the order-{0} Vandermonde conditions")]
    NotVandermonde(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An order-`n` generalized Riemann difference on `n + 1` distinct nodes.
///
/// Nodes are strictly increasing, every coefficient is nonzero, and
/// `sum_i A_i a_i^j = n! delta(j, n)` holds exactly for `j = 0..=n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StencilRecord", into = "StencilRecord")]
pub struct Stencil {
    order: usize,
    nodes: Vec<Rational>,
    coefficients: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StencilRecord {
    order: usize,
    nodes: Vec<Rational>,
    coefficients: Vec<Rational>,
}

impl From<Stencil> for StencilRecord {
    fn from(s: Stencil) -> Self {
        StencilRecord {
            order: s.order,
            nodes: s.nodes,
            coefficients: s.coefficients,
        }
    }
}

impl TryFrom<StencilRecord> for Stencil {
    type Error = StencilError;
    fn try_from(r: StencilRecord) -> Result<Self, StencilError> {
        Stencil::new(r.order, r.nodes, r.coefficients)
    }
}

/// Sorts `(node, coefficient)` pairs by node.
fn sort_pairs(nodes: Vec<Rational>, coefficients: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let mut pairs: Vec<_> = nodes.into_iter().zip(coefficients).collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    pairs.into_iter().unzip()
}

impl Stencil {
    /// Validating constructor. Pairs are sorted by node before checking.
    pub fn new(order: usize, nodes: Vec<Rational>, coefficients: Vec<Rational>) -> Result<Self, StencilError> {
        if nodes.len() != order + 1 || coefficients.len() != order + 1 {
            return Err(LinalgError::ArityMismatch {
                expected: order + 1,
                found: nodes.len().max(coefficients.len()),
            }
            .into());
        }
        let (nodes, coefficients) = sort_pairs(nodes, coefficients);
        linalg::sorted_distinct(&nodes)?;
        if let Some(i) = coefficients.iter().position(Rational::is_zero) {
            return Err(StencilError::ZeroCoefficient(nodes[i].clone()));
        }
        if !linalg::vandermonde_residual(&coefficients, &nodes, order)?.is_zero() {
            return Err(StencilError::NotVandermonde(order));
        }
        Ok(Stencil {
            order,
            nodes,
            coefficients,
        })
    }

    /// The unique stencil on `nodes`.
    pub fn from_nodes(nodes: &[Rational], order: usize) -> Result<Self, StencilError> {
        let coefficients = linalg::solve_vandermonde(nodes, order)?;
        let nodes = linalg::sorted_distinct(nodes)?;
        Ok(Stencil {
            order,
            nodes,
            coefficients,
        })
    }

    /// Callers guarantee the invariants; pairs are sorted here.
    fn from_parts(order: usize, nodes: Vec<Rational>, coefficients: Vec<Rational>) -> Self {
        let (nodes, coefficients) = sort_pairs(nodes, coefficients);
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Stencil {
            order,
            nodes,
            coefficients,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.nodes.iter().zip(&self.coefficients)
    }

    pub fn coefficient_at(&self, node: &Rational) -> Option<&Rational> {
        self.nodes.binary_search(node).ok().map(|i| &self.coefficients[i])
    }

    pub fn residual(&self) -> linalg::VandermondeResidual {
        linalg::vandermonde_residual(&self.coefficients, &self.nodes, self.order)
            .expect("stencil nodes and coefficients have equal length")
    }
}

impl fmt::Debug for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Stencil(n={}; ", self.order)?;
        for (i, (a, c)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}@{a}")?;
        }
        write!(f, ")")
    }
}

fn binomial_row(n: usize) -> Vec<Rational> {
    let mut row = vec![Rational::one()];
    for i in 1..=n {
        let prev = row[i - 1].clone();
        row.push(prev * Rational::from(n + 1 - i) / Rational::from(i));
    }
    row
}

fn riemann(n: usize, offset: Rational) -> Result<Stencil, StencilError> {
    if n == 0 {
        return Err(StencilError::InvalidOrder(n));
    }
    let binom = binomial_row(n);
    let (nodes, coefficients) = (0..=n)
        .map(|i| {
            let node = Rational::from(n - i) - &offset;
            let c = if i % 2 == 0 { binom[i].clone() } else { -&binom[i] };
            (node, c)
        })
        .unzip();
    Ok(Stencil::from_parts(n, nodes, coefficients))
}

/// Forward Riemann difference: coefficient `(-1)^i C(n, i)` at node `n - i`.
pub fn forward_riemann(n: usize) -> Result<Stencil, StencilError> {
    riemann(n, Rational::zero())
}

/// Symmetric Riemann difference: coefficient `(-1)^i C(n, i)` at node `n/2 - i`.
pub fn symmetric_riemann(n: usize) -> Result<Stencil, StencilError> {
    riemann(n, Rational::new(n as i64, 2))
}

/// `r`-translate: every node moves by `r`, coefficients unchanged.
pub fn shift(s: &Stencil, r: &Rational) -> Stencil {
    Stencil {
        order: s.order,
        nodes: s.nodes.iter().map(|a| a + r).collect(),
        coefficients: s.coefficients.clone(),
    }
}

/// Forward shifts `j = 0..=n-2` of the order-`n` forward Riemann difference.
pub fn shift_family(n: usize) -> Result<Vec<Stencil>, StencilError> {
    if n < 2 {
        return Err(StencilError::InvalidOrder(n));
    }
    let base = forward_riemann(n)?;
    Ok((0..=n - 2).map(|j| shift(&base, &Rational::from(j))).collect())
}

/// Dilation by `r`: nodes `r a_i`, coefficients `r^-n A_i`.
pub fn dilate(s: &Stencil, r: &Rational) -> Result<Stencil, StencilError> {
    if r.is_zero() {
        return Err(StencilError::ZeroDilation);
    }
    let scale = r.pow(-(s.order as i32));
    Ok(Stencil::from_parts(
        s.order,
        s.nodes.iter().map(|a| a * r).collect(),
        s.coefficients.iter().map(|c| c * &scale).collect(),
    ))
}

/// Cancels node `a` between two order-`n` stencils sharing exactly `n`
/// nodes, and rescales the combination back onto the Vandermonde conditions.
pub fn eliminate(s: &Stencil, t: &Stencil, a: &Rational) -> Result<Stencil, StencilError> {
    if s.order != t.order {
        return Err(StencilError::OrderMismatch(s.order, t.order));
    }
    let n = s.order;
    let shared = s.nodes.iter().filter(|x| t.nodes.binary_search(x).is_ok()).count();
    if shared != n {
        return Err(StencilError::IntersectionNotN {
            expected: n,
            found: shared,
        });
    }
    let (sa, ta) = match (s.coefficient_at(a), t.coefficient_at(a)) {
        (Some(sa), Some(ta)) => (sa.clone(), ta.clone()),
        _ => return Err(StencilError::NodeNotShared(a.clone())),
    };

    // ta * s - sa * t has a zero coefficient at `a`.
    let mut combined: BTreeMap<Rational, Rational> = BTreeMap::new();
    for (x, c) in s.pairs() {
        *combined.entry(x.clone()).or_default() += &ta * c;
    }
    for (x, c) in t.pairs() {
        *combined.entry(x.clone()).or_default() -= &sa * c;
    }
    combined.remove(a);
    if let Some((x, _)) = combined.iter().find(|(_, c)| c.is_zero()) {
        return Err(StencilError::DegenerateCombination(format!(
            "node {x} cancelled together with {a}"
        )));
    }

    let moment: Rational = combined.iter().map(|(x, c)| c * &x.pow(n as i32)).sum();
    if moment.is_zero() {
        return Err(StencilError::DegenerateCombination("top moment vanishes".into()));
    }
    let scale = Rational::factorial(n) / moment;
    let (nodes, coefficients) = combined.into_iter().map(|(x, c)| (x, c * &scale)).unzip();
    Ok(Stencil::from_parts(n, nodes, coefficients))
}

/// A difference satisfying the Vandermonde conditions below the top one,
/// with a nonzero top moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RawDifference {
    pub order: usize,
    pub nodes: Vec<Rational>,
    pub coefficients: Vec<Rational>,
}

impl RawDifference {
    /// `sum_i A_i a_i^n`.
    pub fn top_moment(&self) -> Rational {
        let n = self.order as i32;
        self.nodes.iter().zip(&self.coefficients).map(|(a, c)| c * &a.pow(n)).sum()
    }
}

/// The Marcinkiewicz–Zygmund difference of order `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MzDifference {
    pub raw: RawDifference,
    pub lambda: Rational,
    pub stencil: Stencil,
}

/// Builds `D_n(h) = D_{n-1}(2h) - 2^{n-1} D_{n-1}(h)` from `D_1(h) = f(x+h) - f(x)`,
/// then normalizes by `lambda = n! / top moment`.
pub fn mz_difference(n: usize) -> Result<MzDifference, StencilError> {
    if n == 0 {
        return Err(StencilError::InvalidOrder(n));
    }
    let mut terms: BTreeMap<Rational, Rational> = BTreeMap::new();
    terms.insert(Rational::zero(), Rational::from(-1));
    terms.insert(Rational::one(), Rational::one());
    let two = Rational::from(2);
    for k in 2..=n {
        let weight = two.pow(k as i32 - 1);
        let mut next: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (a, c) in &terms {
            *next.entry(a * &two).or_default() += c;
            *next.entry(a.clone()).or_default() -= c * &weight;
        }
        next.retain(|_, c| !c.is_zero());
        terms = next;
    }
    let (nodes, coefficients): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
    let raw = RawDifference {
        order: n,
        nodes,
        coefficients,
    };
    let moment = raw.top_moment();
    if moment.is_zero() {
        return Err(StencilError::DegenerateCombination("top moment vanishes".into()));
    }
    let lambda = Rational::factorial(n) / moment;
    let stencil = Stencil::from_parts(
        n,
        raw.nodes.clone(),
        raw.coefficients.iter().map(|c| c * &lambda).collect(),
    );
    Ok(MzDifference { raw, lambda, stencil })
}

/// `{0, 1, 2, 4, ..., 2^(n-1)}`.
pub fn geometric_nodes(n: usize) -> Vec<Rational> {
    std::iter::once(Rational::zero())
        .chain((0..n).map(|k| Rational::from(2).pow(k as i32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn forward_examples() {
        let s = forward_riemann(1).unwrap();
        assert_eq!((s.nodes(), s.coefficients()), (&ints(&[0, 1])[..], &ints(&[-1, 1])[..]));
        let s = forward_riemann(2).unwrap();
        assert_eq!(s.coefficients(), &ints(&[1, -2, 1])[..]);
        let s = forward_riemann(3).unwrap();
        assert_eq!(s.nodes(), &ints(&[0, 1, 2, 3])[..]);
        assert_eq!(s.coefficients(), &ints(&[-1, 3, -3, 1])[..]);
        assert_eq!(forward_riemann(0), Err(StencilError::InvalidOrder(0)));
    }

    #[test]
    fn symmetric_examples() {
        let s = symmetric_riemann(2).unwrap();
        assert_eq!(s.nodes(), &ints(&[-1, 0, 1])[..]);
        assert_eq!(s.coefficients(), &ints(&[1, -2, 1])[..]);
        let s = symmetric_riemann(1).unwrap();
        assert_eq!(s.nodes(), &[q(-1, 2), q(1, 2)][..]);
        assert_eq!(s.coefficients(), &ints(&[-1, 1])[..]);
        let s = symmetric_riemann(3).unwrap();
        assert_eq!(s.nodes(), &[q(-3, 2), q(-1, 2), q(1, 2), q(3, 2)][..]);
        assert_eq!(s.coefficients(), &ints(&[-1, 3, -3, 1])[..]);
        assert!(s.residual().is_zero());
        assert_eq!(symmetric_riemann(0), Err(StencilError::InvalidOrder(0)));
    }

    #[test]
    fn shift_examples() {
        let s = forward_riemann(3).unwrap();
        let t = shift(&s, &Rational::one());
        assert_eq!(t.nodes(), &ints(&[1, 2, 3, 4])[..]);
        assert_eq!(t.coefficients(), &ints(&[-1, 3, -3, 1])[..]);
        assert!(t.residual().is_zero());
        assert_eq!(shift(&s, &Rational::zero()), s);
        assert_eq!(shift(&shift(&s, &q(5, 3)), &q(-5, 3)), s);
    }

    #[test]
    fn shift_family_sizes() {
        assert_eq!(shift_family(2).unwrap(), vec![forward_riemann(2).unwrap()]);
        let fam = shift_family(3).unwrap();
        assert_eq!(fam[0].nodes(), &ints(&[0, 1, 2, 3])[..]);
        assert_eq!(fam[1].nodes(), &ints(&[1, 2, 3, 4])[..]);
        let fam = shift_family(4).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam[2].nodes(), &ints(&[2, 3, 4, 5, 6])[..]);
        assert_eq!(shift_family(1), Err(StencilError::InvalidOrder(1)));
    }

    #[test]
    fn dilate_examples() {
        let s = forward_riemann(1).unwrap();
        let d = dilate(&s, &Rational::from(2)).unwrap();
        assert_eq!(d.nodes(), &ints(&[0, 2])[..]);
        assert_eq!(d.coefficients(), &[q(-1, 2), q(1, 2)][..]);
        let s = mz_difference(4).unwrap().stencil;
        assert_eq!(dilate(&s, &Rational::one()).unwrap(), s);
        let back = dilate(&dilate(&s, &Rational::from(2)).unwrap(), &q(1, 2)).unwrap();
        assert_eq!(back, s);
        // Negative factors reverse the node order; pairs are re-sorted.
        let neg = dilate(&forward_riemann(3).unwrap(), &Rational::from(-1)).unwrap();
        assert_eq!(neg.nodes(), &ints(&[-3, -2, -1, 0])[..]);
        assert!(neg.residual().is_zero());
        assert_eq!(dilate(&s, &Rational::zero()), Err(StencilError::ZeroDilation));
    }

    #[test]
    fn eliminate_reproduces_mz3() {
        let fam = shift_family(3).unwrap();
        let e = eliminate(&fam[0], &fam[1], &Rational::from(3)).unwrap();
        assert_eq!(e.nodes(), &ints(&[0, 1, 2, 4])[..]);
        assert_eq!(e.coefficients(), &[q(-3, 4), q(2, 1), q(-3, 2), q(1, 4)][..]);
        assert_eq!(eliminate(&fam[1], &fam[0], &Rational::from(3)).unwrap(), e);
    }

    #[test]
    fn eliminate_errors() {
        let fam = shift_family(4).unwrap();
        assert_eq!(
            eliminate(&fam[0], &fam[1], &Rational::from(5)),
            Err(StencilError::NodeNotShared(Rational::from(5)))
        );
        assert_eq!(
            eliminate(&fam[0], &fam[2], &Rational::from(3)),
            Err(StencilError::IntersectionNotN { expected: 4, found: 3 })
        );
        assert_eq!(
            eliminate(&fam[0], &forward_riemann(3).unwrap(), &Rational::one()),
            Err(StencilError::OrderMismatch(4, 3))
        );
        // Identical stencils cancel everything at once.
        assert!(matches!(
            eliminate(&fam[0], &fam[0], &Rational::one()),
            Err(StencilError::IntersectionNotN { .. })
        ));
    }

    #[test]
    fn mz_tables() {
        let m = mz_difference(3).unwrap();
        assert_eq!(m.raw.nodes, ints(&[0, 1, 2, 4]));
        assert_eq!(m.raw.coefficients, ints(&[-3, 8, -6, 1]));
        assert_eq!(m.lambda, q(1, 4));
        let m = mz_difference(4).unwrap();
        assert_eq!(m.raw.coefficients, ints(&[21, -64, 56, -14, 1]));
        assert_eq!(m.lambda, q(1, 56));
        let m = mz_difference(5).unwrap();
        assert_eq!(m.raw.nodes, ints(&[0, 1, 2, 4, 8, 16]));
        assert_eq!(m.raw.coefficients, ints(&[-315, 1024, -960, 280, -30, 1]));
        assert_eq!(m.lambda, q(1, 2688));
        assert_eq!(mz_difference(2).unwrap().lambda, Rational::one());
        assert_eq!(mz_difference(1).unwrap().stencil, forward_riemann(1).unwrap());
        assert_eq!(mz_difference(0), Err(StencilError::InvalidOrder(0)));
    }

    #[test]
    fn new_validates() {
        assert!(Stencil::new(1, ints(&[1, 0]), ints(&[1, -1])).is_ok());
        assert_eq!(
            Stencil::new(1, ints(&[0, 1]), ints(&[1, 1])),
            Err(StencilError::NotVandermonde(1))
        );
        assert!(matches!(
            Stencil::new(1, ints(&[0, 0]), ints(&[-1, 1])),
            Err(StencilError::Linalg(LinalgError::DuplicateNodes(_)))
        ));
    }

    #[test]
    fn json_record() {
        let s = mz_difference(3).unwrap().stencil;
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"order":3,"nodes":["0","1","2","4"],"coefficients":["-3/4","2","-3/2","1/4"]}"#
        );
        let back: Stencil = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"order":3,"nodes":["0","1","2","4"],"coefficients":["1","2","-3/2","1/4"]}"#;
        assert!(serde_json::from_str::<Stencil>(bad).is_err());
    }
}
