use serde::Serialize;

use super::functions::TestFunction;
use super::EvalError;
use crate::rational::Rational;
use crate::stencil::Stencil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuotientValue {
    Exact(Rational),
    Float(f64),
}

impl QuotientValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            QuotientValue::Exact(r) => r.to_f64(),
            QuotientValue::Float(v) => *v,
        }
    }
}

/// Neumaier's compensated sum, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// `sum_i A_i f(x + a_i h) / h^n`, exactly.
pub fn quotient_exact(s: &Stencil, f: &TestFunction, x: &Rational, h: &Rational) -> Result<Rational, EvalError> {
    if h.is_zero() {
        return Err(EvalError::ZeroStep);
    }
    let mut total = Rational::zero();
    for (a, c) in s.pairs() {
        let point = x + &(a * h);
        let value = f
            .eval_exact(&point)
            .ok_or_else(|| EvalError::ExactUnavailable { function: f.name(), point: point.to_string() })?;
        total += c * &value;
    }
    Ok(total / h.pow(s.order() as i32))
}

/// `sum_i A_i f(x + a_i h) / h^n` in `f64`, summed in ascending node order
/// with compensation.
pub fn quotient_f64(s: &Stencil, f: &TestFunction, x: f64, h: f64) -> Result<f64, EvalError> {
    if h == 0.0 {
        return Err(EvalError::ZeroStep);
    }
    let sum = compensated_sum(s.pairs().map(|(a, c)| c.to_f64() * f.eval_f64(x + a.to_f64() * h)));
    Ok(sum / h.powi(s.order() as i32))
}

/// Dispatches on `mode`; float mode rounds `x` and `h` to `f64` first.
pub fn evaluate_quotient(
    s: &Stencil,
    f: &TestFunction,
    x: &Rational,
    h: &Rational,
    mode: Mode,
) -> Result<QuotientValue, EvalError> {
    match mode {
        Mode::Exact => quotient_exact(s, f, x, h).map(QuotientValue::Exact),
        Mode::Float => quotient_f64(s, f, x.to_f64(), h.to_f64()).map(QuotientValue::Float),
    }
}
