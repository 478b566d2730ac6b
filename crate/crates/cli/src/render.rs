//! Plain-text renderings.

use std::fmt::Write;

use peano_core::elimination::{render_stage, Derivation, NodeSet, Step, Trace};
use peano_core::numeric::{CompareTable, EstimateReport, MethodSummary, PeanoProfile};
use peano_core::stencil::MzDifference;
use peano_core::Stencil;

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn table(out: &mut String, header: [&str; 2], rows: impl Iterator<Item = (String, String)>) {
    let rows: Vec<(String, String)> = rows.collect();
    let width = rows.iter().map(|r| r.0.len()).chain([header[0].len()]).max().unwrap_or(0);
    writeln!(out, "{:>width$}  {}", header[0], header[1]).unwrap();
    for (a, b) in rows {
        writeln!(out, "{a:>width$}  {b}").unwrap();
    }
}

pub fn stencil(s: &Stencil) -> String {
    let mut out = format!("order {}\n", s.order());
    table(&mut out, ["node", "coefficient"], s.pairs().map(|(a, c)| (a.to_string(), c.to_string())));
    out
}

pub fn mz(d: &MzDifference) -> String {
    let mut out = format!("order {}\n", d.raw.order);
    let join = |v: &[peano_core::Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    writeln!(out, "nodes: {}", join(&d.raw.nodes)).unwrap();
    writeln!(out, "raw: {}", join(&d.raw.coefficients)).unwrap();
    writeln!(out, "lambda: {}", d.lambda).unwrap();
    writeln!(out, "stencil: {}", join(d.stencil.coefficients())).unwrap();
    out
}

pub fn grouped_trace(trace: &Trace, d: &Derivation) -> String {
    let mut out = format!("n = {}, {} primitive steps\n", trace.n, d.steps.len());
    for stage in &trace.stages {
        let marker = stage.marker.map(|m| format!(" (marker {m})")).unwrap_or_default();
        writeln!(out, "\n# {}{}", stage.kind.label(), marker).unwrap();
        out.push_str(&render_stage(stage));
    }
    writeln!(out, "\nfinal: {}", d.final_set).unwrap();
    out
}

pub fn primitive_trace(d: &Derivation, sets: &[NodeSet]) -> String {
    let mut out = format!("n = {}, {} primitive steps\n", d.n, d.steps.len());
    for (i, (step, set)) in d.steps.iter().zip(sets).enumerate() {
        writeln!(out, "#{i}: {step} -> {set}").unwrap();
    }
    writeln!(out, "final: {}", d.final_set).unwrap();
    out
}

/// `op, src1, src2, removed`; an input's shift goes in `src1`.
pub fn step_fields(step: &Step) -> Vec<String> {
    match step {
        Step::Input { j } => vec!["input".into(), j.to_string(), String::new(), String::new()],
        Step::Dilate { src } => vec!["dilate".into(), src.to_string(), String::new(), String::new()],
        Step::Eliminate { src1, src2, removed } => {
            vec!["eliminate".into(), src1.to_string(), src2.to_string(), removed.to_string()]
        }
    }
}

fn summary(r: &EstimateReport) -> String {
    let mut line = format!("{} on {} at x = {} ({} mode): {}", r.stencil, r.function, r.x, format!("{:?}", r.mode).to_lowercase(), r.verdict);
    match (r.limit, r.last_quotient()) {
        (Some(l), _) => write!(line, ", limit {}", num(l)).unwrap(),
        (None, Some(q)) => write!(line, ", last quotient {}", num(q)).unwrap(),
        _ => {}
    }
    if !r.limit_points.is_empty() && r.limit.is_none() {
        let pts: Vec<String> = r.limit_points.iter().map(|&p| num(p)).collect();
        write!(line, ", cluster values {{{}}}", pts.join(", ")).unwrap();
    }
    if let Some(e) = &r.error {
        write!(line, " [{e}]").unwrap();
    }
    line
}

pub fn report(r: &EstimateReport, samples: bool) -> String {
    let mut out = summary(r);
    out.push('\n');
    if samples {
        writeln!(out, "{:>4}  {:>24}  {:>24}  {:>12}", "k", "h", "quotient", "gap").unwrap();
        for (k, s) in r.samples.iter().enumerate() {
            let gap = s.gap.map(|g| format!("{g:.3e}")).unwrap_or_default();
            writeln!(out, "{k:>4}  {:>24}  {:>24}  {gap:>12}", num(s.h), num(s.quotient)).unwrap();
        }
    }
    out
}

pub fn profile(p: &PeanoProfile) -> String {
    let mut out = format!(
        "Peano profile of {} at x = {} ({} method)\n",
        p.function,
        p.x,
        format!("{:?}", p.method).to_lowercase()
    );
    for e in &p.entries {
        let value = e.estimate.map_or_else(|| "none".to_string(), num);
        let verdict = if e.converged { "converged" } else { "not converged" };
        writeln!(out, "f_({}) = {value}  [{verdict}]", e.order).unwrap();
        for r in &e.reports {
            writeln!(out, "    {}", summary(r)).unwrap();
        }
    }
    out
}

fn method_block(out: &mut String, m: &MethodSummary) {
    let pts = &m.points;
    let range = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => String::new(),
    };
    writeln!(
        out,
        "{}: {} stencil(s), {} limit(s), {} distinct points in {range}, largest {}",
        m.method,
        m.stencils.len(),
        m.limits,
        m.point_count,
        m.max_point
    )
    .unwrap();
    writeln!(out, "    {:<10} {:>6} {:>8} {:>12}  exact", "stencil", "nodes", "span", "sum |A|").unwrap();
    for s in &m.stencils {
        writeln!(
            out,
            "    {:<10} {:>6} {:>8} {:>12}  {}",
            s.stencil,
            s.node_count,
            s.span.to_string(),
            num(s.abs_sum_f64),
            s.abs_sum
        )
        .unwrap();
    }
}

pub fn compare(t: &CompareTable) -> String {
    let mut out = format!("order {}\n", t.order);
    method_block(&mut out, &t.mz);
    method_block(&mut out, &t.shifts);
    out
}
