//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any of them fails.
//!
//! Run with `cargo test -p rumor-core --test acceptance`.

use std::time::Instant;

use rumor_core::engine::TrialResult;
use rumor_core::harness::{self, ExperimentConfig};
use rumor_core::oracle;
use rumor_core::rng::derive_seed;
use rumor_core::{
    generate, lambda_max_pp, predict_rounds, protocol_constant, simulate, two_block_matrix, CompleteGraph, Family,
    FamilySpec, Graph, Protocol, ProtocolConfig, Topology,
};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn runtimes(results: &[TrialResult]) -> Vec<f64> {
    results.iter().filter_map(|r| r.runtime()).map(f64::from).collect()
}

fn trials<T: Topology + ?Sized>(g: &T, cfg: &ProtocolConfig, tag: u64, count: usize) -> Vec<TrialResult> {
    let seeds: Vec<u64> = (0..count).map(|i| derive_seed(SEED, &[tag, i as u64])).collect();
    harness::run_point(g, cfg, &seeds, false).expect("simulation")
}

fn all_completed(results: &[TrialResult]) -> bool {
    results.iter().all(|r| r.completed)
}

fn self_bounding() -> Outcome {
    let records = oracle::self_bounding_sweep(5, &[0.3, 0.7, 1.0]).expect("sweep");
    let worst = records
        .iter()
        .map(|r| r.variance - r.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    let failed = records.iter().filter(|r| !r.pass).count();
    outcome(
        failed == 0 && worst <= 1e-12,
        format!("{} cases, max Var-E = {worst:.3e}, failures = {failed}", records.len()),
    )
}

fn engine_agreement() -> Outcome {
    let instances = oracle::fixed_instances();
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let rec = oracle::engine_agreement(inst, 100_000, 4.0, derive_seed(SEED, &[2, i as u64])).expect("agreement");
        worst = worst.max(rec.z);
        if !rec.pass {
            failed.push(rec.instance);
        }
    }
    outcome(
        instances.len() == 20 && failed.is_empty(),
        format!("{} instances, max |z| = {worst:.2}, failures = {failed:?}", instances.len()),
    )
}

fn expectation_formulas() -> Outcome {
    let records = oracle::expectation_sweep(5, &[0.3, 0.7, 1.0]).expect("sweep");
    let worst = records
        .iter()
        .map(|r| {
            let e = &r.report;
            (e.pull_formula - e.pull_exact).abs().max((e.push_formula - e.push_exact).abs())
        })
        .fold(0.0, f64::max);
    let failed = records.iter().filter(|r| !r.report.pass).count();
    outcome(
        failed == 0 && worst <= 1e-12,
        format!("{} cases, max error = {worst:.3e}", records.len()),
    )
}

fn runtime_constants() -> Outcome {
    let ns: Vec<usize> = (10..=14).map(|k| 1usize << k).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (qi, q) in [0.5, 1.0].into_iter().enumerate() {
        for (pi, protocol) in Protocol::ALL.into_iter().enumerate() {
            let cfg = ProtocolConfig::new(protocol, q);
            let mut points = Vec::new();
            for &n in &ns {
                let g = CompleteGraph::new(n).unwrap();
                let tag = 400 + 100 * qi as u64 + 10 * pi as u64;
                let results = trials(&g, &cfg, derive_seed(tag, &[n as u64]), 200);
                pass &= all_completed(&results);
                points.push((n as f64, harness::mean(&runtimes(&results)).unwrap_or(f64::NAN)));
            }
            let slope = harness::fit_slope(&points).map(|f| f.slope).unwrap_or(f64::NAN);
            let c = protocol_constant(protocol, q).unwrap();
            let rel = (slope - c).abs() / c;
            pass &= rel <= 0.15;
            parts.push(format!("{protocol}@q={q}: slope {slope:.3} vs c {c:.3} ({:+.1}%)", 100.0 * (slope - c) / c));
        }
    }
    outcome(pass, parts.join("; "))
}

struct AdversaryRuns {
    push_adv: Vec<f64>,
    push_kn: Vec<f64>,
    pull_adv: Vec<f64>,
    pull_kn: Vec<f64>,
    tilde_push_adv: Vec<f64>,
    complete: bool,
}

fn push_adversary_runs() -> AdversaryRuns {
    let n = 1 << 13;
    let spec = FamilySpec::new(Family::PushAdversary { eps: 0.3 }, n).unwrap();
    let adv = generate(&spec, derive_seed(SEED, &[5])).expect("push adversary");
    let kn = CompleteGraph::new(n).unwrap();
    let push = ProtocolConfig::new(Protocol::Push, 1.0);
    let pull = ProtocolConfig::new(Protocol::Pull, 1.0);
    let push_adv = trials(&adv, &push, 51, 400);
    let push_kn = trials(&kn, &push, 52, 400);
    let pull_adv = trials(&adv, &pull, 53, 400);
    let pull_kn = trials(&kn, &pull, 54, 400);
    let complete = [&push_adv, &push_kn, &pull_adv, &pull_kn].iter().all(|r| all_completed(r));
    AdversaryRuns {
        tilde_push_adv: push_adv.iter().filter_map(|r| r.t_tilde).map(f64::from).collect(),
        push_adv: runtimes(&push_adv),
        push_kn: runtimes(&push_kn),
        pull_adv: runtimes(&pull_adv),
        pull_kn: runtimes(&pull_kn),
        complete,
    }
}

fn push_slowdown(runs: &AdversaryRuns) -> Outcome {
    let cmp = harness::compare_means(&runs.push_adv, &runs.push_kn, derive_seed(SEED, &[55])).expect("bootstrap");
    outcome(
        runs.complete && cmp.difference > 0.0 && cmp.p_value < 0.01,
        format!(
            "mean T_push adversary {:.3} vs K_n {:.3}, p = {:.4}",
            harness::mean(&runs.push_adv).unwrap_or(f64::NAN),
            harness::mean(&runs.push_kn).unwrap_or(f64::NAN),
            cmp.p_value
        ),
    )
}

fn pull_robustness(runs: &AdversaryRuns) -> Outcome {
    let adv = harness::mean(&runs.pull_adv).unwrap_or(f64::NAN);
    let kn = harness::mean(&runs.pull_kn).unwrap_or(f64::NAN);
    outcome(
        runs.complete && (adv - kn).abs() <= 2.0,
        format!("mean T_pull adversary {adv:.3} vs K_n {kn:.3}, gap {:.3}", (adv - kn).abs()),
    )
}

fn tilde_threshold(runs: &AdversaryRuns) -> Outcome {
    let n = (1u64 << 13) as f64;
    let target = n.ln() / 2f64.ln();
    let got = harness::mean(&runs.tilde_push_adv).unwrap_or(f64::NAN);
    let rel = (got - target).abs() / target;
    outcome(
        runs.tilde_push_adv.len() == 400 && rel <= 0.15,
        format!("mean T~_push {got:.3} vs {target:.3} ({:+.1}%)", 100.0 * (got - target) / target),
    )
}

fn pp_adversary() -> Outcome {
    let n = 1 << 13;
    let family = Family::PpAdversary { eps: 0.4 };
    let g = generate(&FamilySpec::new(family, n).unwrap(), derive_seed(SEED, &[8])).expect("pp adversary");
    let results = trials(&g, &ProtocolConfig::new(Protocol::Pp, 0.9), 81, 400);
    let got = harness::mean(&runtimes(&results)).unwrap_or(f64::NAN);
    let target = predict_rounds(&family, Protocol::Pp, n as f64, 0.9).unwrap().value;
    let rel = (got - target).abs() / target;
    outcome(
        all_completed(&results) && rel <= 0.20,
        format!("mean T_pp {got:.3} vs {target:.3} ({:+.1}%)", 100.0 * (got - target) / target),
    )
}

fn lambda_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    let mut above = true;
    for i in 0..50 {
        let eps = 0.49 * i as f64 / 49.0;
        for j in 0..50 {
            let q = 0.02 + 0.98 * j as f64 / 49.0;
            let closed = lambda_max_pp(eps, q).unwrap();
            let m = two_block_matrix(eps, q).unwrap();
            let eig = nalgebra::Matrix2::new(m.m11, m.m12, m.m21(), m.m22).symmetric_eigen();
            let top = eig.eigenvalues.max();
            worst = worst.max((closed - top).abs());
            if eps > 0.0 {
                above &= closed > 1.0 + 2.0 * q;
            }
        }
    }
    outcome(
        worst <= 1e-12 && above,
        format!("max |closed - eigensolve| = {worst:.3e}, above 1+2q: {above}"),
    )
}

fn boundary_growth() -> Outcome {
    let n = 1 << 14;
    let spec = FamilySpec::new(Family::Regular { d: 128 }, n).unwrap();
    let g = generate(&spec, derive_seed(SEED, &[10])).expect("regular graph");
    let cfg = ProtocolConfig::new(Protocol::Pull, 1.0);
    let seeds: Vec<u64> = (0..50).map(|i| derive_seed(SEED, &[101, i])).collect();
    let results = harness::run_point(&g, &cfg, &seeds, true).expect("simulation");
    let ratios: Vec<f64> = results.iter().filter_map(|r| harness::boundary_growth(&r.trace, n)).collect();
    let avg = harness::mean(&ratios).unwrap_or(f64::NAN);
    outcome(
        ratios.len() == 50 && (1.8..=2.2).contains(&avg),
        format!("mean ratio {avg:.4} over {} trials", ratios.len()),
    )
}

fn star_pp() -> Outcome {
    let g = Graph::star(50).unwrap();
    let mut worst = 0;
    for i in 0..1000u64 {
        let cfg = ProtocolConfig::new(Protocol::Pp, 1.0).with_start(i as usize % g.n());
        let r = simulate(&g, &cfg, derive_seed(SEED, &[11, i])).unwrap();
        worst = worst.max(if r.completed { r.rounds } else { u32::MAX });
    }
    outcome(worst <= 2, format!("max T = {worst} over 1000 trials, starts cycling all 50 vertices"))
}

fn determinism() -> Outcome {
    let run = || {
        let mut cfg = ExperimentConfig::new(
            Family::Gnp { p: 0.05 },
            Protocol::Pp,
            0.7,
            vec![200, 400, 800],
            40,
            SEED,
        );
        cfg.families.push(Family::PushAdversary { eps: 0.2 });
        let summary = harness::run_trials(&cfg).expect("sweep");
        let mut csv = Vec::new();
        summary.write_csv(&mut csv).unwrap();
        (csv, summary.to_json().unwrap())
    };
    let (a_csv, a_json) = run();
    let (b_csv, b_json) = run();
    outcome(
        !a_csv.is_empty() && a_csv == b_csv && a_json == b_json,
        format!("{} CSV bytes, identical: {}", a_csv.len(), a_csv == b_csv),
    )
}

fn main() {
    harness::configure_threads();
    let started = Instant::now();
    let mut failures = 0;
    let mut report = |id: u32, name: &str, check: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {id:>2} {name}: {} ({:.1}s)", o.detail, t.elapsed().as_secs_f64());
        failures += usize::from(!o.pass);
    };

    report(1, "self-bounding variance", &self_bounding);
    report(2, "engine/oracle agreement", &engine_agreement);
    report(3, "expectation formulas", &expectation_formulas);
    report(4, "runtime constants on K_n", &runtime_constants);
    let t = Instant::now();
    let runs = push_adversary_runs();
    println!("       push-adversary runs shared by 5-7 took {:.1}s", t.elapsed().as_secs_f64());
    report(5, "push slowdown on push-adversary", &|| push_slowdown(&runs));
    report(6, "pull robustness on push-adversary", &|| pull_robustness(&runs));
    report(7, "almost-robustness threshold", &|| tilde_threshold(&runs));
    report(8, "pp-adversary runtime", &pp_adversary);
    report(9, "lambda_max closed form", &lambda_closed_form);
    report(10, "pull boundary growth", &boundary_growth);
    report(11, "star push&pull bound", &star_pp);
    report(12, "sweep determinism", &determinism);

    println!(
        "acceptance: {} of 12 criteria passed in {:.1}s",
        12 - failures,
        started.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
