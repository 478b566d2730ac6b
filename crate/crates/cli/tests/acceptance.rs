//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use peano_core::elimination::{
    derive_geometric, intruder_profile, replay_derivation, step2_row, verify_derivation, NodeSet, StageKind,
};
use peano_core::linalg::{solve_vandermonde, vandermonde_residual};
use peano_core::numeric::{
    conditioning_report, peano_profile, quotient_exact, quotient_f64, Method, Polynomial, SweepParams, TestFunction,
};
use peano_core::rational::{q, Rational};
use peano_core::stencil::{eliminate, forward_riemann, mz_difference, shift, symmetric_riemann};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from(x)).collect()
}

fn mz_tables() -> Check {
    let table: [(usize, &[i64], &[i64], Rational); 4] = [
        (2, &[0, 1, 2], &[1, -2, 1], q(1, 1)),
        (3, &[0, 1, 2, 4], &[-3, 8, -6, 1], q(1, 4)),
        (4, &[0, 1, 2, 4, 8], &[21, -64, 56, -14, 1], q(1, 56)),
        (5, &[0, 1, 2, 4, 8, 16], &[-315, 1024, -960, 280, -30, 1], q(1, 2688)),
    ];
    for (n, nodes, raw, lambda) in table {
        let d = mz_difference(n).map_err(|e| e.to_string())?;
        ensure!(d.raw.nodes == ints(nodes), "n = {n}: nodes {:?}", d.raw.nodes);
        ensure!(d.raw.coefficients == ints(raw), "n = {n}: raw {:?}", d.raw.coefficients);
        ensure!(d.lambda == lambda, "n = {n}: lambda {}", d.lambda);
    }
    Ok("raw differences and lambda_2..lambda_5 exact".into())
}

fn elimination_identity() -> Check {
    let d30 = forward_riemann(3).map_err(|e| e.to_string())?;
    let d31 = shift(&d30, &q(1, 1));
    let e = eliminate(&d30, &d31, &q(3, 1)).map_err(|e| e.to_string())?;
    let mz = mz_difference(3).unwrap().stencil;
    ensure!(e == mz, "{e:?} vs {mz:?}");
    ensure!(e.coefficients() == [q(-3, 4), q(2, 1), q(-3, 2), q(1, 4)], "{e:?}");
    Ok("eliminating 3 between D_{3,0} and D_{3,1} gives lambda_3 times the n = 3 difference".into())
}

fn rows(text: &[&[u64]]) -> Vec<NodeSet> {
    text.iter().map(|r| NodeSet::from_sorted(r.to_vec()).unwrap()).collect()
}

fn intervals(n: u64) -> Vec<NodeSet> {
    (0..=n - 2).map(|j| NodeSet::interval(j, j + n)).collect()
}

fn golden_derivations() -> Check {
    let golden: Vec<(usize, Vec<Vec<NodeSet>>)> = vec![
        (3, vec![intervals(3), rows(&[&[0, 1, 2, 4]])]),
        (4, vec![intervals(4), rows(&[&[0, 1, 2, 3, 4], &[0, 1, 2, 4, 6]]), rows(&[&[0, 1, 2, 4, 8]])]),
        (
            7,
            vec![
                intervals(7),
                rows(&[&[0, 1, 2, 3, 4, 5, 6, 8], &[0, 1, 2, 3, 4, 6, 8, 10], &[0, 1, 2, 4, 6, 8, 10, 12]]),
                rows(&[&[0, 1, 2, 3, 4, 5, 8, 16], &[0, 1, 2, 3, 4, 6, 8, 16], &[0, 1, 2, 4, 6, 8, 10, 16]]),
                rows(&[&[0, 1, 2, 3, 4, 8, 16, 32], &[0, 1, 2, 4, 6, 8, 16, 32]]),
                rows(&[&[0, 1, 2, 4, 8, 16, 32, 64]]),
            ],
        ),
        (
            10,
            vec![
                intervals(10),
                rows(&[
                    &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
                    &[0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12],
                    &[0, 1, 2, 3, 4, 5, 6, 8, 10, 12, 14],
                    &[0, 1, 2, 3, 4, 6, 8, 10, 12, 14, 16],
                    &[0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 18],
                ]),
                rows(&[
                    &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 16],
                    &[0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 16],
                    &[0, 1, 2, 3, 4, 5, 6, 8, 10, 12, 16],
                    &[0, 1, 2, 3, 4, 6, 8, 10, 12, 14, 16],
                    &[0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 18],
                ]),
                rows(&[
                    &[0, 1, 2, 3, 4, 5, 6, 7, 8, 16, 32],
                    &[0, 1, 2, 3, 4, 5, 6, 8, 10, 16, 32],
                    &[0, 1, 2, 3, 4, 6, 8, 10, 12, 16, 32],
                    &[0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 32],
                ]),
                rows(&[
                    &[0, 1, 2, 3, 4, 5, 6, 8, 16, 32, 64],
                    &[0, 1, 2, 3, 4, 6, 8, 10, 16, 32, 64],
                    &[0, 1, 2, 4, 6, 8, 10, 12, 16, 32, 64],
                ]),
                rows(&[
                    &[0, 1, 2, 3, 4, 5, 8, 16, 32, 64, 128],
                    &[0, 1, 2, 3, 4, 6, 8, 16, 32, 64, 128],
                    &[0, 1, 2, 4, 6, 8, 10, 16, 32, 64, 128],
                ]),
                rows(&[&[0, 1, 2, 3, 4, 8, 16, 32, 64, 128, 256], &[0, 1, 2, 4, 6, 8, 16, 32, 64, 128, 256]]),
                rows(&[&[0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512]]),
            ],
        ),
    ];
    let mut slowest = Duration::ZERO;
    for (n, arrays) in golden {
        let start = Instant::now();
        let g = derive_geometric(n).map_err(|e| e.to_string())?;
        let v = verify_derivation(n, &g.derivation).map_err(|e| format!("n = {n}: {e}"))?;
        ensure!(v.reaches_target, "n = {n}: final {}", g.derivation.final_set);
        ensure!(g.derivation.final_set == NodeSet::geometric(n), "n = {n}: final set");
        let got: Vec<&Vec<NodeSet>> = g.trace.stages.iter().map(|s| &s.rows).collect();
        ensure!(got.len() == arrays.len(), "n = {n}: {} arrays, expected {}", got.len(), arrays.len());
        for (i, (a, b)) in got.iter().zip(&arrays).enumerate() {
            ensure!(*a == b, "n = {n}, array {i}: {a:?} vs {b:?}");
        }
        let elapsed = start.elapsed();
        ensure!(elapsed < Duration::from_secs(1), "n = {n} took {elapsed:?}");
        slowest = slowest.max(elapsed);
    }
    Ok(format!("n = 3, 4, 7, 10 arrays match row for row (slowest {slowest:.1?})"))
}

fn scale_and_replay() -> Check {
    let start = Instant::now();
    let mut steps = 0;
    for n in 2..=32 {
        let g = derive_geometric(n).map_err(|e| e.to_string())?;
        let v = verify_derivation(n, &g.derivation).map_err(|e| format!("n = {n}: {e}"))?;
        ensure!(v.reaches_target && g.derivation.final_set == NodeSet::geometric(n), "n = {n}: final set");
        let stencils = replay_derivation(n, &g.derivation).map_err(|e| format!("n = {n}: {e}"))?;
        let mz = mz_difference(n).unwrap().stencil;
        ensure!(stencils.last() == Some(&mz), "n = {n}: replayed stencil differs from the recursion");
        steps += g.derivation.steps.len();
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("n = 2..=32 verified and replayed, {steps} steps in {elapsed:.1?}"))
}

fn step2_closed_form() -> Check {
    for n in 4..=32usize {
        let g = derive_geometric(n).map_err(|e| e.to_string())?;
        let stage = &g.trace.stages[1];
        ensure!(stage.kind == StageKind::Step2, "n = {n}: stage kind");
        let nu = stage.rows.len();
        ensure!(nu == n / 2, "n = {n}: {nu} rows");
        let profile = intruder_profile(&stage.rows);
        ensure!(profile.nu == n / 2, "n = {n}: nu = {}", profile.nu);
        for (t, row) in stage.rows.iter().enumerate() {
            let k = nu - t;
            ensure!(*row == step2_row(n, k).unwrap(), "n = {n}, k = {k}: {row}");
            let p = &profile.rows[t];
            let eta = (2 * (n - k)).ilog2() as usize;
            ensure!(p.eta == eta, "n = {n}, k = {k}: eta {} vs {eta}", p.eta);
            ensure!(p.alpha == k - 1, "n = {n}, k = {k}: alpha {}", p.alpha);
            ensure!(p.beta == n - k - eta, "n = {n}, k = {k}: beta {}", p.beta);
            ensure!(p.gamma == p.alpha + p.beta, "n = {n}, k = {k}: gamma {}", p.gamma);
        }
    }
    Ok("step-2 rows and intruder counts match the closed forms for n = 4..=32".into())
}

fn vandermonde_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..500 {
        let n = rng.gen_range(1..=8usize);
        let mut nodes: Vec<Rational> = Vec::new();
        while nodes.len() < n + 1 {
            let a = q(rng.gen_range(-50..=50), rng.gen_range(1..=7));
            if !nodes.contains(&a) {
                nodes.push(a);
            }
        }
        let coeffs = solve_vandermonde(&nodes, n).map_err(|e| e.to_string())?;
        nodes.sort();
        let r = vandermonde_residual(&coeffs, &nodes, n).unwrap();
        ensure!(r.is_zero(), "case {case}: nonzero residual");
        let i = rng.gen_range(0..=n);
        let mut perturbed = coeffs.clone();
        perturbed[i] += q(rng.gen_range(1..=9), rng.gen_range(1..=9));
        ensure!(!vandermonde_residual(&perturbed, &nodes, n).unwrap().is_zero(), "case {case}: perturbation accepted");
    }
    Ok("500 random instances round-trip; every perturbation breaks the conditions".into())
}

fn group23_counterexample() -> Check {
    let s = forward_riemann(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (m, k) = (rng.gen_range(-20..=20), rng.gen_range(-20..=20));
        let h = q(2, 1).pow(m) * q(3, 1).pow(k);
        let v = quotient_exact(&s, &TestFunction::Group23, &Rational::zero(), &h).map_err(|e| e.to_string())?;
        ensure!(v.is_zero(), "h = 2^{m} 3^{k}: {v}");
    }
    for k in 0..=40 {
        let h = q(1, 2).pow(k);
        let ratio = TestFunction::Group23.eval_exact(&h).unwrap() / h.pow(3);
        let want = if k % 2 == 0 { 1 } else { -1 };
        ensure!(ratio == Rational::from(want), "k = {k}: f(h)/h^3 = {ratio}");
    }
    Ok("forward third quotient is 0 on 200 group steps; f(h)/h^3 alternates +1, -1".into())
}

fn parity_counterexample() -> Check {
    let mut worst: f64 = 0.0;
    for n in [3u32, 5, 7] {
        let f = TestFunction::Parity(n);
        let s = symmetric_riemann(n as usize).unwrap();
        let abs_sum = conditioning_report("", &s).abs_sum_f64;
        for k in 1..=20 {
            let h = 2f64.powi(-k);
            let v = quotient_f64(&s, &f, 0.0, h).map_err(|e| e.to_string())?;
            let fmax = s.nodes().iter().map(|a| f.eval_f64(a.to_f64() * h).abs()).fold(0.0, f64::max);
            let scale = abs_sum * fmax / h.powi(n as i32);
            worst = worst.max(v.abs() / scale);
            ensure!(v.abs() <= 1e-10 * scale, "n = {n}, h = 2^-{k}: {v} vs scale {scale}");
        }
        let fwd = quotient_f64(&forward_riemann(n as usize).unwrap(), &f, 0.0, 2f64.powi(-40)).unwrap();
        ensure!(fwd.abs() > 1e3, "n = {n}: forward quotient {fwd}");
    }
    Ok(format!("symmetric cancellation within {worst:.1e} of scale; forward quotients exceed 1e3"))
}

fn peano_profiles() -> Check {
    let params = SweepParams::default();
    let quintic = TestFunction::Poly(Polynomial::monomial(5));
    for method in [Method::Mz, Method::Shifts] {
        let p = peano_profile(&quintic, &q(1, 1), 4, method, &params).map_err(|e| e.to_string())?;
        for (e, want) in p.entries.iter().zip([5.0, 20.0, 60.0, 120.0]) {
            let v = e.estimate.ok_or(format!("{method:?}: order {} has no estimate", e.order))?;
            ensure!((v - want).abs() < 1e-6, "{method:?}: order {}: {v}", e.order);
        }
        let g = peano_profile(&TestFunction::X3Sin, &Rational::zero(), 2, method, &params).map_err(|e| e.to_string())?;
        for e in &g.entries {
            let v = e.estimate.ok_or(format!("{method:?}: x3sin order {} has no estimate", e.order))?;
            ensure!(v.abs() < 1e-6, "{method:?}: x3sin order {}: {v}", e.order);
        }
    }
    Ok("x^5 at 1 gives (5, 20, 60, 120) and x^3 sin(1/x) at 0 gives (0, 0) under both methods".into())
}

fn comparison_table() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_peano"))
        .args(["compare", "11", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "exit {:?}", out.status.code());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(v["mz"]["point_count"] == 12, "mz nodes {}", v["mz"]["point_count"]);
    ensure!(v["mz"]["max_point"] == "1024", "mz max {}", v["mz"]["max_point"]);
    ensure!(v["mz"]["limits"] == 1, "mz limits");
    let points: Vec<String> = (0..=20).map(|i| i.to_string()).collect();
    ensure!(v["shifts"]["points"] == serde_json::json!(points), "shift points {}", v["shifts"]["points"]);
    ensure!(v["shifts"]["limits"] == 10, "shift limits {}", v["shifts"]["limits"]);
    let r = conditioning_report("D_11", &forward_riemann(11).unwrap());
    ensure!(r.abs_sum == q(2048, 1), "sum |A| = {}", r.abs_sum);
    Ok("12 nodes up to 1024 vs 21 points 0..20 with 10 limits; forward sum |A| = 2048".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("MZ tables", mz_tables),
        ("elimination identity", elimination_identity),
        ("golden derivations", golden_derivations),
        ("scale and replay", scale_and_replay),
        ("step-2 closed form", step2_closed_form),
        ("Vandermonde property suite", vandermonde_suite),
        ("counterexample (ii)", group23_counterexample),
        ("counterexample (i)", parity_counterexample),
        ("Peano profiles", peano_profiles),
        ("comparison table", comparison_table),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{elapsed:.2?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
