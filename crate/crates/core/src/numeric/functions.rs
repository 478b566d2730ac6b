//! The closed catalog of test functions.
//!
//! Each function has a float evaluator and, where the value at a rational
//! point is itself rational, an exact evaluator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use super::EvalError;
use crate::rational::Rational;

/// Polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<i64>,
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<i64>) -> Self {
        while coefficients.len() > 1 && coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0);
        }
        Polynomial { coefficients }
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0; degree + 1];
        c[degree] = 1;
        Polynomial::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn eval_exact(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, &c| acc * x + Rational::from(c))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    /// `k`-th derivative at `x`, exactly.
    pub fn derivative_at(&self, k: usize, x: &Rational) -> Rational {
        let mut c: Vec<Rational> = self.coefficients.iter().map(|&v| Rational::from(v)).collect();
        for _ in 0..k {
            if c.len() <= 1 {
                return Rational::zero();
            }
            c = c.iter().enumerate().skip(1).map(|(i, v)| v * &Rational::from(i)).collect();
        }
        c.iter().rev().fold(Rational::zero(), |acc, v| acc * x + v)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 && !(first && d == 0) {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let body = match (d, mag) {
                (0, m) => m.to_string(),
                (1, 1) => "x".to_string(),
                (1, m) => format!("{m}x"),
                (_, 1) => format!("x^{d}"),
                (_, m) => format!("{m}x^{d}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = EvalError;

    /// Sums of terms `c`, `cx`, `c*x`, `x^k`, `cx^k` with integer `c` and `k`.
    fn from_str(s: &str) -> Result<Self, EvalError> {
        let bad = || EvalError::UnknownFunction(format!("poly:{s}"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad());
        }
        let mut coefficients: Vec<i64> = Vec::new();
        let mut rest = text.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ if rest.len() == text.len() => (1, rest),
                _ => return Err(bad()),
            };
            let end = body[1.min(body.len())..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() || term.starts_with(['+', '-']) {
                return Err(bad());
            }

            let (coef, degree) = match term.find('x') {
                None => (term.parse::<i64>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let coef_text = term[..pos].trim_end_matches('*');
                    let coef = if coef_text.is_empty() {
                        1
                    } else {
                        coef_text.parse::<i64>().map_err(|_| bad())?
                    };
                    let tail = &term[pos + 1..];
                    let degree = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .and_then(|d| d.parse::<usize>().ok())
                            .filter(|&d| d <= 64)
                            .ok_or_else(bad)?
                    };
                    (coef, degree)
                }
            };
            if coefficients.len() <= degree {
                coefficients.resize(degree + 1, 0);
            }
            coefficients[degree] = coefficients[degree].checked_add(sign * coef).ok_or_else(bad)?;
        }
        Ok(Polynomial::new(coefficients))
    }
}

/// Test functions used to probe generalized Riemann and Peano derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestFunction {
    Poly(Polynomial),
    /// The sign function.
    Sgn,
    /// `x^3 sin(1/x)`, extended by `0` at the origin.
    X3Sin,
    /// `x^(n - 1/2)` for `x >= 0`, `(-1)^(n-1) (-x)^(n - 1/2)` for `x < 0`.
    Parity(u32),
    /// `(-1)^(m+k) x^3` on `x = 2^m 3^k`, and `0` elsewhere.
    Group23,
    /// `exp(x)`; float only.
    Exp,
}

impl TestFunction {
    pub fn name(&self) -> String {
        match self {
            TestFunction::Poly(p) => format!("poly:{p}"),
            TestFunction::Sgn => "sgn".into(),
            TestFunction::X3Sin => "x3sin".into(),
            TestFunction::Parity(n) => format!("parity:{n}"),
            TestFunction::Group23 => "group23".into(),
            TestFunction::Exp => "exp".into(),
        }
    }

    /// Known facts at the distinguished point.
    pub fn facts(&self) -> String {
        match self {
            TestFunction::Poly(p) => format!("smooth; Peano derivatives of every order exist everywhere (degree {})", p.degree()),
            TestFunction::Sgn => "symmetric second difference vanishes at 0; not continuous at 0".into(),
            TestFunction::X3Sin => "f_(1)(0) = f_(2)(0) = 0; ordinary f''(0) does not exist".into(),
            TestFunction::Parity(n) => format!(
                "f_(0..{})(0) = 0; symmetric order-{n} derivative at 0 is 0; f_({n})(0) does not exist",
                n.saturating_sub(1)
            ),
            TestFunction::Group23 => {
                "f_(0..2)(0) = 0; forward third derivative at 0 is 0 on 2^m 3^k steps; f_(3)(0) does not exist".into()
            }
            TestFunction::Exp => "smooth; every derivative at x equals exp(x)".into(),
        }
    }

    /// Exact value, or `None` when it is not a rational number this catalog
    /// can produce.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        match self {
            TestFunction::Poly(p) => Some(p.eval_exact(x)),
            TestFunction::Sgn => Some(Rational::from(x.signum())),
            TestFunction::X3Sin => x.is_zero().then(Rational::zero),
            TestFunction::Parity(n) => {
                let m = *n as i32;
                if x.is_negative() {
                    let y = -x;
                    let v = y.pow(m - 1) * y.sqrt_exact()?;
                    Some(if (m - 1) % 2 == 0 { v } else { -v })
                } else {
                    Some(x.pow(m - 1) * x.sqrt_exact()?)
                }
            }
            TestFunction::Group23 => {
                if !x.is_positive() {
                    return Some(Rational::zero());
                }
                Some(match in_group_23(x).ok().flatten() {
                    Some((m, k)) => {
                        let cube = x.pow(3);
                        if (m + k).rem_euclid(2) == 0 {
                            cube
                        } else {
                            -cube
                        }
                    }
                    None => Rational::zero(),
                })
            }
            TestFunction::Exp => None,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            TestFunction::Poly(p) => p.eval_f64(x),
            TestFunction::Sgn => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            TestFunction::X3Sin => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x * x * (1.0 / x).sin()
                }
            }
            TestFunction::Parity(n) => {
                let e = *n as f64 - 0.5;
                if x >= 0.0 {
                    x.powf(e)
                } else if n % 2 == 1 {
                    (-x).powf(e)
                } else {
                    -(-x).powf(e)
                }
            }
            TestFunction::Group23 => match Rational::from_f64(x) {
                Some(r) => self.eval_exact(&r).map_or(f64::NAN, |v| v.to_f64()),
                None => f64::NAN,
            },
            TestFunction::Exp => x.exp(),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TestFunction {
    type Err = EvalError;

    /// `poly:<expr>`, `group23`, `parity:<n>`, `sgn`, `x3sin`, `exp`.
    fn from_str(s: &str) -> Result<Self, EvalError> {
        let s = s.trim();
        if let Some(expr) = s.strip_prefix("poly:") {
            return Ok(TestFunction::Poly(expr.parse()?));
        }
        if let Some(n) = s.strip_prefix("parity:") {
            return n
                .parse::<u32>()
                .ok()
                .filter(|&n| (1..=64).contains(&n))
                .map(TestFunction::Parity)
                .ok_or_else(|| EvalError::UnknownFunction(s.to_string()));
        }
        match s {
            "sgn" => Ok(TestFunction::Sgn),
            "x3sin" => Ok(TestFunction::X3Sin),
            "group23" => Ok(TestFunction::Group23),
            "exp" => Ok(TestFunction::Exp),
            _ => Err(EvalError::UnknownFunction(s.to_string())),
        }
    }
}

/// The built-in catalog.
pub fn builtin_functions() -> Vec<TestFunction> {
    let mut v: Vec<TestFunction> = (0..=8).map(|m| TestFunction::Poly(Polynomial::monomial(m))).collect();
    v.push(TestFunction::Sgn);
    v.push(TestFunction::X3Sin);
    v.extend((1..=8).map(TestFunction::Parity));
    v.push(TestFunction::Group23);
    v.push(TestFunction::Exp);
    v
}

/// `(m, k)` with `q = 2^m 3^k`, or `None` when `q` has another prime factor.
pub fn in_group_23(q: &Rational) -> Result<Option<(i64, i64)>, EvalError> {
    if !q.is_positive() {
        return Err(EvalError::NonPositive(q.clone()));
    }
    let mut numer: BigInt = q.numer().clone();
    let mut denom: BigInt = q.denom().clone();
    let m = Rational::strip_factor(&mut numer, 2) - Rational::strip_factor(&mut denom, 2);
    let k = Rational::strip_factor(&mut numer, 3) - Rational::strip_factor(&mut denom, 3);
    Ok((numer.is_one() && denom.is_one()).then_some((m, k)))
}
