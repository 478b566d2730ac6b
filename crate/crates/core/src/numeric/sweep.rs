use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::functions::TestFunction;
use super::quotient::{quotient_exact, quotient_f64, Mode};
use super::EvalError;
use crate::exec::Execution;
use crate::rational::Rational;
use crate::stencil::{forward_riemann, mz_difference, shift_family, Stencil};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Exact when every sample has an exact value, float otherwise.
    #[default]
    Auto,
    Exact,
    Float,
}

impl FromStr for SweepMode {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, EvalError> {
        match s {
            "auto" => Ok(SweepMode::Auto),
            "exact" => Ok(SweepMode::Exact),
            "float" => Ok(SweepMode::Float),
            _ => Err(EvalError::InvalidParams(format!("unknown mode {s:?}"))),
        }
    }
}

/// The sweep `h_k = h0 ratio^k`, `k = 0..count`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepParams {
    pub h0: Rational,
    pub ratio: Rational,
    pub count: usize,
    pub tol: f64,
    pub mode: SweepMode,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            h0: Rational::new(1, 2),
            ratio: Rational::new(1, 2),
            count: 40,
            tol: 1e-6,
            mode: SweepMode::Auto,
        }
    }
}

impl SweepParams {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.h0.is_zero() {
            return Err(EvalError::ZeroStep);
        }
        if !(self.ratio.is_positive() && self.ratio < 1) {
            return Err(EvalError::InvalidParams(format!("ratio {} not in (0, 1)", self.ratio)));
        }
        if self.count < 3 {
            return Err(EvalError::InvalidParams(format!("count {} is below 3", self.count)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(EvalError::InvalidParams(format!("tol {} is not positive", self.tol)));
        }
        Ok(())
    }

    pub fn steps(&self) -> Vec<Rational> {
        let mut h = self.h0.clone();
        let mut out = Vec::with_capacity(self.count);
        for _ in 0..self.count {
            out.push(h.clone());
            h = &h * &self.ratio;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    NotConverged,
    /// Some sample could not be evaluated.
    Incomplete,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::NotConverged => "not converged",
            Verdict::Incomplete => "incomplete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub h: f64,
    pub h_exact: Rational,
    pub quotient: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Rational>,
    /// `|q_k - q_(k-1)|`; absent for the first sample.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub stencil: String,
    pub function: String,
    pub x: Rational,
    pub order: usize,
    pub mode: Mode,
    pub params: SweepParams,
    pub samples: Vec<Sample>,
    pub verdict: Verdict,
    /// Final quotient, when converged.
    pub limit: Option<f64>,
    /// Cluster values of the tail of the sequence.
    pub limit_points: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EstimateReport {
    pub fn converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }

    pub fn last_quotient(&self) -> Option<f64> {
        self.samples.last().map(|s| s.quotient)
    }
}

/// Values visited at least twice within `tol`: sorted values are chained
/// into clusters while consecutive differences stay below `tol`, and each
/// cluster with two or more members contributes its mean.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] >= tol {
            let group = &sorted[start..i];
            if group.len() >= 2 {
                out.push(group.iter().sum::<f64>() / group.len() as f64);
            }
            start = i;
        }
    }
    out
}

pub fn estimate_limit(
    label: &str,
    s: &Stencil,
    f: &TestFunction,
    x: &Rational,
    params: &SweepParams,
) -> Result<EstimateReport, EvalError> {
    estimate_limit_with(label, s, f, x, params, Execution::default())
}

/// Sweeps `h` and records every quotient. Samples are evaluated
/// independently under `exec`; the report does not depend on it.
pub fn estimate_limit_with(
    label: &str,
    s: &Stencil,
    f: &TestFunction,
    x: &Rational,
    params: &SweepParams,
    exec: Execution,
) -> Result<EstimateReport, EvalError> {
    params.validate()?;
    let hs = params.steps();
    let exact = || exec.map(&hs, |h| quotient_exact(s, f, x, h));
    let float = || {
        let xf = x.to_f64();
        exec.map(&hs, |h| quotient_f64(s, f, xf, h.to_f64()))
    };
    let (mode, values): (Mode, Lifted) = match params.mode {
        SweepMode::Exact => (Mode::Exact, lift_exact(exact())),
        SweepMode::Float => (Mode::Float, lift_float(float())),
        SweepMode::Auto => {
            let attempt = exact();
            if attempt.iter().all(Result::is_ok) {
                (Mode::Exact, lift_exact(attempt))
            } else {
                (Mode::Float, lift_float(float()))
            }
        }
    };

    let mut samples: Vec<Sample> = Vec::with_capacity(hs.len());
    let mut error = None;
    for (h, value) in hs.iter().zip(values) {
        let (quotient, exact) = match value {
            Ok(v) => v,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        };
        let gap = samples.last().map(|prev| match (&prev.exact, &exact) {
            (Some(a), Some(b)) => (b - a).abs().to_f64(),
            _ => (quotient - prev.quotient).abs(),
        });
        samples.push(Sample { h: h.to_f64(), h_exact: h.clone(), quotient, exact, gap });
    }

    let verdict = if error.is_some() {
        Verdict::Incomplete
    } else {
        let gaps: Vec<f64> = samples.iter().filter_map(|s| s.gap).collect();
        let tail = &gaps[gaps.len().saturating_sub(3)..];
        if tail.iter().all(|&g| g < params.tol) {
            Verdict::Converged
        } else {
            Verdict::NotConverged
        }
    };
    let tail: Vec<f64> = samples[samples.len() / 2..].iter().map(|s| s.quotient).collect();
    Ok(EstimateReport {
        stencil: label.to_string(),
        function: f.name(),
        x: x.clone(),
        order: s.order(),
        mode,
        params: params.clone(),
        limit: (verdict == Verdict::Converged).then(|| samples.last().map(|s| s.quotient)).flatten(),
        limit_points: cluster_values(&tail, params.tol),
        samples,
        verdict,
        error,
    })
}

type Lifted = Vec<Result<(f64, Option<Rational>), EvalError>>;

fn lift_exact(values: Vec<Result<Rational, EvalError>>) -> Lifted {
    values.into_iter().map(|r| r.map(|q| (q.to_f64(), Some(q)))).collect()
}

fn lift_float(values: Vec<Result<f64, EvalError>>) -> Lifted {
    values.into_iter().map(|r| r.map(|q| (q, None))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftFamilyReport {
    pub order: usize,
    pub reports: Vec<EstimateReport>,
    /// All shifts converged and their limits agree within `tol`.
    pub agreement: bool,
}

impl ShiftFamilyReport {
    /// Mean of the shifted limits, when they agree.
    pub fn estimate(&self) -> Option<f64> {
        self.agreement
            .then(|| self.reports.iter().filter_map(|r| r.limit).sum::<f64>() / self.reports.len() as f64)
    }
}

pub fn shift_family_report(
    n: usize,
    f: &TestFunction,
    x: &Rational,
    params: &SweepParams,
) -> Result<ShiftFamilyReport, EvalError> {
    shift_family_report_with(n, f, x, params, Execution::default())
}

pub fn shift_family_report_with(
    n: usize,
    f: &TestFunction,
    x: &Rational,
    params: &SweepParams,
    exec: Execution,
) -> Result<ShiftFamilyReport, EvalError> {
    let family = shift_family(n)?;
    let reports = family
        .iter()
        .enumerate()
        .map(|(j, s)| estimate_limit_with(&format!("D_{{{n},{j}}}"), s, f, x, params, exec))
        .collect::<Result<Vec<_>, _>>()?;
    let limits: Vec<f64> = reports.iter().filter_map(|r| r.limit).collect();
    let agreement = limits.len() == reports.len()
        && limits
            .iter()
            .enumerate()
            .all(|(i, a)| limits[i + 1..].iter().all(|b| (a - b).abs() < params.tol));
    Ok(ShiftFamilyReport { order: n, reports, agreement })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// One doubling-recursion difference per order.
    Mz,
    /// The full forward shift family per order.
    Shifts,
}

impl FromStr for Method {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, EvalError> {
        match s {
            "mz" => Ok(Method::Mz),
            "shifts" => Ok(Method::Shifts),
            _ => Err(EvalError::InvalidParams(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeanoEntry {
    pub order: usize,
    pub estimate: Option<f64>,
    pub converged: bool,
    pub reports: Vec<EstimateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeanoProfile {
    pub function: String,
    pub x: Rational,
    pub method: Method,
    pub entries: Vec<PeanoEntry>,
}

impl PeanoProfile {
    pub fn all_converged(&self) -> bool {
        self.entries.iter().all(|e| e.converged)
    }

    pub fn estimates(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.estimate).collect()
    }
}

pub fn peano_profile(
    f: &TestFunction,
    x: &Rational,
    n: usize,
    method: Method,
    params: &SweepParams,
) -> Result<PeanoProfile, EvalError> {
    peano_profile_with(f, x, n, method, params, Execution::default())
}

/// Estimates `f_(1)(x), ..., f_(n)(x)`.
pub fn peano_profile_with(
    f: &TestFunction,
    x: &Rational,
    n: usize,
    method: Method,
    params: &SweepParams,
    exec: Execution,
) -> Result<PeanoProfile, EvalError> {
    if n == 0 {
        return Err(EvalError::InvalidParams("order must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(n);
    for k in 1..=n {
        let entry = match (method, k) {
            (Method::Mz, _) => single(&format!("mz({k})"), &mz_difference(k)?.stencil, f, x, params, exec)?,
            (Method::Shifts, 1) => single("D_1", &forward_riemann(1)?, f, x, params, exec)?,
            (Method::Shifts, _) => {
                let family = shift_family_report_with(k, f, x, params, exec)?;
                PeanoEntry { order: k, estimate: family.estimate(), converged: family.agreement, reports: family.reports }
            }
        };
        entries.push(entry);
    }
    Ok(PeanoProfile { function: f.name(), x: x.clone(), method, entries })
}

fn single(
    label: &str,
    s: &Stencil,
    f: &TestFunction,
    x: &Rational,
    params: &SweepParams,
    exec: Execution,
) -> Result<PeanoEntry, EvalError> {
    let report = estimate_limit_with(label, s, f, x, params, exec)?;
    Ok(PeanoEntry { order: s.order(), estimate: report.limit, converged: report.converged(), reports: vec![report] })
}

/// One row per sample with columns `h, quotient, gap`; a leading `stencil`
/// column is added when there is more than one report.
pub fn reports_to_csv(reports: &[&EstimateReport]) -> Result<String, csv::Error> {
    let labelled = reports.len() > 1;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["h", "quotient", "gap"];
    if labelled {
        header.insert(0, "stencil");
    }
    w.write_record(&header)?;
    for r in reports {
        for s in &r.samples {
            let mut row = vec![s.h.to_string(), s.quotient.to_string(), s.gap.map(|g| g.to_string()).unwrap_or_default()];
            if labelled {
                row.insert(0, r.stencil.clone());
            }
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
