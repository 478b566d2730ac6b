use std::path::Path;

use peano_core::elimination::{derive_geometric, replay_derivation, verify_derivation, Derivation, ReplayError};
use peano_core::numeric::{
    self, estimate_limit, peano_profile, reports_to_csv, EstimateReport, Method, SweepMode, SweepParams, TestFunction,
};
use peano_core::stencil::{forward_riemann, mz_difference, symmetric_riemann, Stencil};
use peano_core::Rational;
use serde_json::json;

use crate::render;
use crate::{usage, CliError, EstimateArgs, Format, MethodArg, ModeArg, Outcome, StencilKind, TraceKind};

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("payload serializes");
    s.push('\n');
    s
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    text.trim().parse().map_err(|e| usage(format!("invalid rational {text:?}: {e}")))
}

pub fn stencil(order: usize, nodes: &str, format: Format) -> Result<Outcome, CliError> {
    let nodes = nodes.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
    let s = Stencil::from_nodes(&nodes, order).map_err(usage)?;
    Ok(Outcome::ok(match format {
        Format::Text => render::stencil(&s),
        Format::Json => to_json(&s),
        Format::Csv => render::csv(
            &["node", "coefficient"],
            s.pairs().map(|(a, c)| vec![a.to_string(), c.to_string()]),
        ),
    }))
}

pub fn mz(n: usize, format: Format) -> Result<Outcome, CliError> {
    let d = mz_difference(n).map_err(usage)?;
    Ok(Outcome::ok(match format {
        Format::Text => render::mz(&d),
        Format::Json => to_json(&d),
        Format::Csv => render::csv(
            &["node", "raw", "coefficient"],
            d.raw
                .nodes
                .iter()
                .zip(&d.raw.coefficients)
                .zip(d.stencil.coefficients())
                .map(|((a, r), c)| vec![a.to_string(), r.to_string(), c.to_string()]),
        ),
    }))
}

pub fn derive(n: usize, out: Option<&Path>, trace: TraceKind, format: Format) -> Result<Outcome, CliError> {
    let g = derive_geometric(n).map_err(usage)?;
    let certificate = g.derivation.to_json();
    if let Some(path) = out {
        std::fs::write(path, &certificate).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Outcome::ok(match format {
        Format::Text => match trace {
            TraceKind::Grouped => render::grouped_trace(&g.trace, &g.derivation),
            TraceKind::Primitive => render::primitive_trace(&g.derivation, &g.sets),
        },
        Format::Json => certificate,
        Format::Csv => render::csv(
            &["index", "op", "src1", "src2", "removed", "set"],
            g.derivation.steps.iter().zip(&g.sets).enumerate().map(|(i, (step, set))| {
                let mut row = render::step_fields(step);
                row.insert(0, i.to_string());
                row.push(set.to_string());
                row
            }),
        ),
    }))
}

fn read_certificate(path: &Path) -> Result<Derivation, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
    Derivation::from_json(&text).map_err(|e| CliError::Malformed(e.to_string()))
}

pub fn verify(path: &Path, format: Format) -> Result<Outcome, CliError> {
    let d = read_certificate(path)?;
    match verify_derivation(d.n, &d) {
        Ok(v) => Ok(Outcome::ok(match format {
            Format::Json => to_json(&json!({
                "valid": true,
                "n": v.n,
                "steps": d.steps.len(),
                "final": d.final_set,
                "reaches_target": v.reaches_target,
            })),
            Format::Csv => render::csv(
                &["valid", "n", "steps", "final", "reaches_target"],
                [vec!["true".into(), v.n.to_string(), d.steps.len().to_string(), d.final_set.to_string(), v.reaches_target.to_string()]],
            ),
            Format::Text => format!(
                "valid: n = {}, {} steps, final {}{}\n",
                v.n,
                d.steps.len(),
                d.final_set,
                if v.reaches_target { " (geometric target)" } else { "" }
            ),
        })),
        Err(rej) => Ok(Outcome::failed(match format {
            Format::Json => to_json(&json!({ "valid": false, "step": rej.step, "rule": rej.rule })),
            Format::Csv => render::csv(
                &["valid", "step", "rule"],
                [vec!["false".into(), rej.step.map(|s| s.to_string()).unwrap_or_default(), rej.rule.to_string()]],
            ),
            Format::Text => format!("rejected: {rej}\n"),
        })),
    }
}

pub fn replay(path: &Path, format: Format) -> Result<Outcome, CliError> {
    let d = read_certificate(path)?;
    match replay_derivation(d.n, &d) {
        Ok(stencils) => {
            let last = stencils.last().expect("verified derivations are nonempty");
            Ok(Outcome::ok(match format {
                Format::Json => to_json(&json!({ "valid": true, "n": d.n, "steps": stencils.len(), "final": last })),
                Format::Csv => render::csv(
                    &["node", "coefficient"],
                    last.pairs().map(|(a, c)| vec![a.to_string(), c.to_string()]),
                ),
                Format::Text => format!("replayed {} steps; every stencil matches its node set\n{}", stencils.len(), render::stencil(last)),
            }))
        }
        Err(e) => {
            let step = match &e {
                ReplayError::Rejected(r) => r.step,
                ReplayError::Stencil { step, .. } | ReplayError::ReplayMismatch { step, .. } => Some(*step),
            };
            Ok(Outcome::failed(match format {
                Format::Json => to_json(&json!({ "valid": false, "step": step, "error": e.to_string() })),
                Format::Csv => render::csv(
                    &["valid", "step", "error"],
                    [vec!["false".into(), step.map(|s| s.to_string()).unwrap_or_default(), e.to_string()]],
                ),
                Format::Text => format!("rejected: {e}\n"),
            }))
        }
    }
}

fn sweep_params(args: &EstimateArgs) -> Result<SweepParams, CliError> {
    let params = SweepParams {
        h0: parse_rational(&args.h0)?,
        ratio: parse_rational(&args.ratio)?,
        count: args.count,
        tol: args.tol,
        mode: match args.mode {
            ModeArg::Auto => SweepMode::Auto,
            ModeArg::Exact => SweepMode::Exact,
            ModeArg::Float => SweepMode::Float,
        },
    };
    params.validate().map_err(usage)?;
    Ok(params)
}

pub fn estimate(args: &EstimateArgs, format: Format) -> Result<Outcome, CliError> {
    let f: TestFunction = args.function.parse().map_err(usage)?;
    let x = parse_rational(&args.x)?;
    let params = sweep_params(args)?;
    if args.order == 0 {
        return Err(usage("order must be at least 1"));
    }

    if let Some(kind) = args.stencil {
        let n = args.order;
        let (label, s) = match kind {
            StencilKind::Forward => (format!("D_{n}"), forward_riemann(n)),
            StencilKind::Symmetric => (format!("D^s_{n}"), symmetric_riemann(n)),
            StencilKind::Mz => (format!("mz({n})"), mz_difference(n).map(|d| d.stencil)),
        };
        let s = s.map_err(usage)?;
        let report = estimate_limit(&label, &s, &f, &x, &params).map_err(usage)?;
        let payload = match format {
            Format::Text => render::report(&report, true),
            Format::Json => to_json(&report),
            Format::Csv => reports_to_csv(&[&report]).map_err(usage)?,
        };
        return Ok(if report.converged() { Outcome::ok(payload) } else { Outcome::failed(payload) });
    }

    let method = match args.method {
        MethodArg::Mz => Method::Mz,
        MethodArg::Shifts => Method::Shifts,
    };
    let profile = peano_profile(&f, &x, args.order, method, &params).map_err(usage)?;
    let payload = match format {
        Format::Text => render::profile(&profile),
        Format::Json => to_json(&profile),
        Format::Csv => {
            let reports: Vec<&EstimateReport> = profile.entries.iter().flat_map(|e| &e.reports).collect();
            reports_to_csv(&reports).map_err(usage)?
        }
    };
    Ok(if profile.all_converged() { Outcome::ok(payload) } else { Outcome::failed(payload) })
}

pub fn compare(n: usize, format: Format) -> Result<Outcome, CliError> {
    let table = numeric::compare(n).map_err(usage)?;
    Ok(Outcome::ok(match format {
        Format::Text => render::compare(&table),
        Format::Json => to_json(&table),
        Format::Csv => render::csv(
            &["method", "stencil", "nodes", "span", "abs_sum", "max_abs", "limits", "distinct_points"],
            [&table.mz, &table.shifts].into_iter().flat_map(|m| {
                m.stencils.iter().map(move |s| {
                    vec![
                        m.method.clone(),
                        s.stencil.clone(),
                        s.node_count.to_string(),
                        s.span.to_string(),
                        s.abs_sum.to_string(),
                        s.max_abs.to_string(),
                        m.limits.to_string(),
                        m.point_count.to_string(),
                    ]
                })
            }),
        ),
    }))
}
