//! The four-step elimination algorithm that carries the shifted arithmetic
//! progressions `{j, ..., n + j}` to the geometric set `{0, 1, 2, 4, ..., 2^(n-1)}`.
//!
//! Rows of the working array are kept top to bottom. Compound moves are
//! expanded into primitive [`Step`]s as they happen; the grouped [`Trace`]
//! records the array after each stage.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::certificate::{Derivation, Step, MAX_ORDER};
use super::nodeset::NodeSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid order {0}; expected 2..={MAX_ORDER}")]
    InvalidOrder(usize),
    #[error("row {k} out of range for n = {n}")]
    RowOutOfRange { n: usize, k: usize },
    #[error("generator defect at n = {n}: {detail}")]
    Defect { n: usize, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    /// Step 1: the given shifts as a parallelogram.
    Input,
    /// Step 2: rows ending in even entries, odd entries eliminated.
    Step2,
    /// Step 3: rows above the power-of-two marker cut off against it.
    Step3,
    /// One application of Step 4.
    Step4 { kept_top: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub kind: StageKind,
    /// Rows after the stage, top to bottom.
    pub rows: Vec<NodeSet>,
    /// The doubled top row used as the elimination base in Step 4.
    pub base: Option<NodeSet>,
    /// The power of two marked in Step 3.
    pub marker: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub n: usize,
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub derivation: Derivation,
    pub trace: Trace,
    /// Set produced by each step, aligned with `derivation.steps`.
    pub sets: Vec<NodeSet>,
}

struct Builder {
    n: usize,
    steps: Vec<Step>,
    sets: Vec<NodeSet>,
}

impl Builder {
    fn defect(&self, detail: String) -> EngineError {
        EngineError::Defect { n: self.n, detail }
    }

    fn push(&mut self, step: Step, set: NodeSet) -> usize {
        self.steps.push(step);
        self.sets.push(set);
        self.steps.len() - 1
    }

    fn input(&mut self, j: usize) -> usize {
        self.push(Step::Input { j }, NodeSet::interval(j as u64, (self.n + j) as u64))
    }

    fn dilate(&mut self, src: usize) -> Result<usize, EngineError> {
        let set = self.sets[src]
            .doubled()
            .ok_or_else(|| self.defect(format!("doubling #{src} overflows")))?;
        Ok(self.push(Step::Dilate { src }, set))
    }

    fn eliminate(&mut self, src1: usize, src2: usize, removed: u64) -> Result<usize, EngineError> {
        let (s, t) = (&self.sets[src1], &self.sets[src2]);
        if s.intersection_len(t) != self.n || !s.contains(removed) || !t.contains(removed) {
            return Err(self.defect(format!("cannot eliminate {removed} between {s} and {t}")));
        }
        let set = s.union_without(t, removed);
        Ok(self.push(Step::Eliminate { src1, src2, removed }, set))
    }

    /// Replaces the largest intruder of `row` by eliminating it against `partner`.
    fn cut(&mut self, row: usize, partner: usize) -> Result<usize, EngineError> {
        let x = self.sets[row]
            .largest_intruder()
            .ok_or_else(|| self.defect(format!("row {} has no intruder to cut", self.sets[row])))?;
        self.eliminate(partner, row, x)
    }

    fn snapshot(&self, rows: &[usize]) -> Vec<NodeSet> {
        rows.iter().map(|&r| self.sets[r].clone()).collect()
    }
}

/// Step-2 rows by elimination. `U(lo, hi)` is `[lo, hi]` minus its
/// `hi - lo - n` largest odd entries; for even `hi` it is the elimination of
/// the next odd entry between `U(lo, hi - 1)` (the row above) and `U(lo + 1, hi)`.
struct Step2<'a> {
    b: &'a mut Builder,
    memo: HashMap<(u64, u64), usize>,
}

impl Step2<'_> {
    fn row(&mut self, lo: u64, hi: u64) -> Result<usize, EngineError> {
        let n = self.b.n as u64;
        let extra = hi - lo - n;
        if extra == 0 {
            // Inputs occupy steps 0..=n-2 in order.
            return Ok(lo as usize);
        }
        if hi % 2 == 1 {
            return self.row(lo, hi - 1);
        }
        if let Some(&idx) = self.memo.get(&(lo, hi)) {
            return Ok(idx);
        }
        let above = self.row(lo, hi - 1)?;
        let current = self.row(lo + 1, hi)?;
        let idx = self.b.eliminate(above, current, hi - 2 * extra + 1)?;
        self.memo.insert((lo, hi), idx);
        Ok(idx)
    }
}

/// Generates the derivation of `{0, 1, 2, 4, ..., 2^(n-1)}` together with
/// its grouped trace.
pub fn derive_geometric(n: usize) -> Result<Generated, EngineError> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(EngineError::InvalidOrder(n));
    }
    let mut b = Builder {
        n,
        steps: Vec::new(),
        sets: Vec::new(),
    };
    let mut stages = Vec::new();

    // Step 1.
    let inputs: Vec<usize> = (0..=n - 2).map(|j| b.input(j)).collect();
    stages.push(Stage {
        kind: StageKind::Input,
        rows: b.snapshot(&inputs),
        base: None,
        marker: None,
    });

    // Step 2: keep rows ending in an even entry.
    let mut rows = Vec::new();
    {
        let mut step2 = Step2 {
            b: &mut b,
            memo: HashMap::new(),
        };
        for j in (0..=n - 2).filter(|j| (n + j).is_multiple_of(2)) {
            rows.push(step2.row(0, (n + j) as u64)?);
        }
    }
    stages.push(Stage {
        kind: StageKind::Step2,
        rows: b.snapshot(&rows),
        base: None,
        marker: None,
    });

    // Step 3: the unique row ending in a power of two.
    let marked: Vec<usize> = (0..rows.len())
        .filter(|&t| b.sets[rows[t]].largest().is_some_and(u64::is_power_of_two))
        .collect();
    let &[star] = marked.as_slice() else {
        return Err(b.defect(format!("expected one power-of-two row end, found {}", marked.len())));
    };
    if star > 0 {
        for t in (0..star).rev() {
            rows[t] = b.cut(rows[t], rows[t + 1])?;
        }
        stages.push(Stage {
            kind: StageKind::Step3,
            rows: b.snapshot(&rows),
            base: None,
            marker: b.sets[rows[star]].largest(),
        });
    }

    // Step 4, repeated.
    while let Some(last) = b.sets[rows[0]].largest_intruder() {
        let keep = last % 2 == 0;
        if !keep && rows.len() == 1 {
            return Err(b.defect("odd intruder left in the only row".into()));
        }
        let base = b.dilate(rows[0])?;
        let stop = if keep { 0 } else { 1 };
        let mut partner = base;
        for t in (stop..rows.len()).rev() {
            rows[t] = b.cut(rows[t], partner)?;
            partner = rows[t];
        }
        if !keep {
            rows.remove(0);
        }
        stages.push(Stage {
            kind: StageKind::Step4 { kept_top: keep },
            rows: b.snapshot(&rows),
            base: Some(b.sets[base].clone()),
            marker: None,
        });
    }

    if rows.len() != 1 {
        return Err(b.defect(format!("{} rows remain without intruders", rows.len())));
    }
    let final_idx = rows[0];
    if final_idx != b.steps.len() - 1 {
        return Err(b.defect("final row is not the last step".into()));
    }
    let final_set = b.sets[final_idx].clone();
    Ok(Generated {
        derivation: Derivation {
            n,
            steps: b.steps,
            final_set,
        },
        trace: Trace { n, stages },
        sets: b.sets,
    })
}

/// Closed form of the `k`-th Step-2 row from the bottom:
/// `{0, 1, ..., 2k} ∪ {2(k+1), 2(k+2), ..., 2(n-k)}`, for `1 <= k <= floor(n/2)`.
pub fn step2_row(n: usize, k: usize) -> Result<NodeSet, EngineError> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(EngineError::InvalidOrder(n));
    }
    if k == 0 || k > n / 2 {
        return Err(EngineError::RowOutOfRange { n, k });
    }
    let (k, n) = (k as u64, n as u64);
    let mut v: Vec<u64> = (0..=2 * k).collect();
    v.extend((k + 1..=n - k).map(|m| 2 * m));
    Ok(NodeSet::from_unsorted(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowProfile {
    /// Odd intruders.
    pub alpha: usize,
    /// Even intruders.
    pub beta: usize,
    /// All intruders.
    pub gamma: usize,
    /// Powers of two `>= 2` present in the row.
    pub eta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntruderProfile {
    /// One entry per input row, in input order.
    pub rows: Vec<RowProfile>,
    /// Number of rows.
    pub nu: usize,
}

/// Direct counts of intruders in each row.
pub fn intruder_profile(rows: &[NodeSet]) -> IntruderProfile {
    let rows: Vec<RowProfile> = rows
        .iter()
        .map(|row| {
            let alpha = row.intruders().filter(|x| x % 2 == 1).count();
            let beta = row.intruders().filter(|x| x % 2 == 0).count();
            let eta = row.elements().iter().filter(|&&x| x >= 2 && x.is_power_of_two()).count();
            RowProfile {
                alpha,
                beta,
                gamma: alpha + beta,
                eta,
            }
        })
        .collect();
    IntruderProfile { nu: rows.len(), rows }
}

/// Predicted profile of the `k`-th Step-2 row from the bottom:
/// `alpha = k - 1`, `eta = floor(log2 2(n-k))`, `beta = n - k - eta`.
pub fn step2_profile_formula(n: usize, k: usize) -> RowProfile {
    let eta = (2 * (n - k)).ilog2() as usize;
    let alpha = k - 1;
    let beta = n - k - eta;
    RowProfile {
        alpha,
        beta,
        gamma: alpha + beta,
        eta,
    }
}

/// Human-readable array, one row per line, intruders in `**bold**`, the
/// Step-3 marker with a trailing `*`.
pub fn render_stage(stage: &Stage) -> String {
    let mut out = String::new();
    let render_row = |row: &NodeSet, out: &mut String| {
        let cells: Vec<String> = row
            .elements()
            .iter()
            .map(|&x| {
                if Some(x) == stage.marker {
                    format!("{x}*")
                } else if super::nodeset::is_intruder(x) {
                    format!("**{x}**")
                } else {
                    x.to_string()
                }
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    };
    for row in &stage.rows {
        render_row(row, &mut out);
    }
    if let Some(base) = &stage.base {
        out.push_str("base: ");
        render_row(base, &mut out);
    }
    out
}

impl StageKind {
    pub fn label(&self) -> &'static str {
        match self {
            StageKind::Input => "step 1: input",
            StageKind::Step2 => "step 2: eliminate odd entries",
            StageKind::Step3 => "step 3: cut off above the marker",
            StageKind::Step4 { kept_top: true } => "step 4: cut off all rows",
            StageKind::Step4 { kept_top: false } => "step 4: delete top row, cut off the rest",
        }
    }
}
