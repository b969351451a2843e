//! Acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Runs without the libtest harness so the lines always show. The process
//! exits non-zero on any FAIL outside `EXPECTED_FAILURES`; those still
//! print FAIL together with the reason.

use std::time::{Duration, Instant};

use hshift::combine::project_pair;
use hshift::cost_model::{exponents_with_memory, Strategy};
use hshift::group_arith::{ceil_log2, Modulus};
use hshift::instance::{HiddenShiftInstance, Mode, Secret};
use hshift::pipeline::{schedule_single, schedule_uniform, Routine, Schedule};
use hshift::recover::{
    candidate_from_sample, iqft_distribution, iqft_distribution_direct, odd_qubits, recover, semiclassical_iqft,
    success_probability, RecoverConfig, MAX_DIRECT_QUBITS,
};
use hshift::seeding::{derive, rng_for};
use hshift::subset_sum::{solve, IntervalInstance, ModularInstance, SolveOptions, SolverId, SubsetSumInstance};
use rand::Rng;
use rayon::prelude::*;

const EXPECTED_FAILURES: &[(u32, &str)] = &[(
    1,
    "the published quadratic-gap query exponent for c = 0.291 is 0.312, but sqrt(0.291/3) = 0.31145 rounds to 0.311",
)];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration, limit: Duration) -> Outcome {
    let in_time = elapsed <= limit;
    let pass = pass && in_time;
    println!(
        "{} criterion {id} ({name}): {detail}; {:.2}s (limit {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    Outcome { id, pass, detail }
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    use Strategy::*;
    // (c, strategy, poly memory, published query, published time)
    let rows: [(f64, Strategy, bool, Option<f64>, f64); 13] = [
        (0.291, MinClassical, false, Some(0.539), 0.539),
        (0.291, QuadGap, false, Some(0.312), 0.623),
        (0.72, MinClassical, true, Some(0.849), 0.849),
        (0.72, QuadGap, true, Some(0.490), 0.980),
        (1.0, UniformImproved, true, Some(0.707), 1.414),
        (1.0, MinClassical, true, Some(1.0), 1.0),
        (1.0, QuadGap, true, Some(0.577), 1.155),
        (0.5, UniformImproved, true, Some(0.5), 1.0),
        (0.5, MinClassical, true, Some(0.707), 0.707),
        (0.241, QuadGap, false, Some(0.283), 0.567),
        (0.241, MinClassical, false, Some(0.491), 0.491),
        (0.226, QuadGap, false, Some(0.274), 0.549),
        (0.226, MinClassical, false, Some(0.475), 0.475),
    ];
    let r3 = |x: f64| (x * 1000.0).round() / 1000.0;
    let mut mismatches = Vec::new();
    for (c, strategy, poly, q, t) in rows {
        let p = exponents_with_memory(c, strategy, poly).unwrap();
        let got_q = p.query_exp.map(r3);
        if got_q != q || r3(p.time_exp) != t {
            mismatches.push(format!(
                "c={c} {strategy}: got {:.4}/{:.4}, published {:.3}/{t:.3}",
                p.query_exp.unwrap_or(f64::NAN),
                p.time_exp,
                q.unwrap_or(f64::NAN)
            ));
        }
    }
    let detail = if mismatches.is_empty() {
        format!("all {} rows match to 3 decimals", rows.len())
    } else {
        format!("{}/{} rows match; {}", rows.len() - mismatches.len(), rows.len(), mismatches.join("; "))
    };
    report(1, "table reproduction", mismatches.is_empty(), detail, start.elapsed(), Duration::from_secs(1))
}

/// Enumerates every subset directly.
fn oracle_solutions(inst: &SubsetSumInstance) -> Vec<u64> {
    let w = inst.weights();
    let k = w.len();
    let mut out = Vec::new();
    for x in 0..(1u64 << k) {
        let sum: u128 = (0..k).filter(|i| x >> i & 1 == 1).map(|i| w[i] as u128).sum();
        let hit = match inst {
            SubsetSumInstance::Modular(m) => sum % (1u128 << m.r) == m.target as u128,
            SubsetSumInstance::Interval(iv) => (sum << (iv.r - 1)) / iv.bound as u128 == iv.target as u128,
        };
        if hit {
            out.push(x);
        }
    }
    out
}

fn solver_equivalence() -> Outcome {
    let start = Instant::now();
    let per_flavor = 500u64;
    let results: Vec<[bool; 4]> = (0..2 * per_flavor)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(2024, "criterion-2", i);
            let k = rng.gen_range(8..=20usize);
            let inst: SubsetSumInstance = if i < per_flavor {
                ModularInstance::random_planted(k, k as u32, &mut rng).into()
            } else {
                let r = k as u32 - ceil_log2(k as u64);
                IntervalInstance::random_planted(k, 1 << 32, r, &mut rng).into()
            };
            let truth = oracle_solutions(&inst);
            let opts = SolveOptions::with_seed(derive(2024, "solver", i));
            let mut row = [false; 4];
            for (slot, solver) in
                [SolverId::Mitm, SolverId::SchroeppelShamir, SolverId::Representation, SolverId::Memoryless]
                    .into_iter()
                    .enumerate()
            {
                row[slot] = solve(&inst, solver, &opts).unwrap().solutions == truth;
            }
            row
        })
        .collect();
    let rate = |slot: usize| results.iter().filter(|r| r[slot]).count() as f64 / results.len() as f64;
    let (mitm, ss, rep, memless) = (rate(0), rate(1), rate(2), rate(3));
    let pass = mitm == 1.0 && ss == 1.0 && rep >= 0.99 && memless >= 0.95;
    let detail = format!(
        "{} instances; exact-set rates mitm {mitm:.3}, ss {ss:.3}, rep {rep:.3}, memless {memless:.3}",
        results.len()
    );
    report(2, "solver oracle equivalence", pass, detail, start.elapsed(), Duration::from_secs(300))
}

fn simulation_exactness() -> Outcome {
    let start = Instant::now();
    let rep = hshift::cli::validate_suite(10, 10, 7).unwrap();
    let pass = rep.max_tv_distance < 1e-12 && rep.max_phase_deviation < 1e-9 && rep.max_label_deviation < 1e-9;
    let detail = format!(
        "{} moduli, {} combinations; max TV {:.2e}, max phase deviation {:.2e}, max label deviation {:.2e}",
        rep.moduli, rep.combinations, rep.max_tv_distance, rep.max_phase_deviation, rep.max_label_deviation
    );
    report(3, "simulation exactness", pass, detail, start.elapsed(), Duration::from_secs(120))
}

fn projection_law() -> Outcome {
    let start = Instant::now();
    let trials = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for size in [3u64, 5, 7] {
        let mut rng = rng_for(4, "criterion-4", size);
        let support: Vec<u64> = (0..size).map(|i| i * 17 + 3).collect();
        let failures = (0..trials).filter(|_| project_pair(&support, &mut rng).is_none()).count();
        let rate = failures as f64 / trials as f64;
        pass &= (rate - 1.0 / size as f64).abs() <= 0.01 && rate <= 1.0 / 3.0 + 0.01;
        parts.push(format!("|J|={size}: {rate:.4} vs {:.4}", 1.0 / size as f64));
    }
    report(4, "projection law", pass, parts.join(", "), start.elapsed(), Duration::from_secs(60))
}

/// Verified-correct count and slowest run.
fn recovery_runs(modulus: u64, sched: &Schedule, runs: u64, tag: &str) -> (usize, f64) {
    let results: Vec<(bool, f64)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let seed = derive(5, tag, i);
            let start = Instant::now();
            let mut inst = HiddenShiftInstance::with_mode(modulus, Secret::Random, seed, Mode::Validation).unwrap();
            let mut rng = rng_for(seed, "pipeline", 0);
            let mut cfg = RecoverConfig::default();
            cfg.pipeline.solve.seed = derive(seed, "solver", 0);
            let got = recover(&mut inst, sched, &cfg, &mut rng);
            let secs = start.elapsed().as_secs_f64();
            let s = inst.reveal_secret().unwrap();
            (matches!(got, Ok(ref r) if r.verified && r.s == s), secs)
        })
        .collect();
    (results.iter().filter(|r| r.0).count(), results.iter().map(|r| r.1).fold(0.0, f64::max))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let pow2 = schedule_uniform(16, 8, Routine::Pow2).unwrap();
    let (ok2, slow2) = recovery_runs(1 << 16, &pow2, 20, "criterion-5-pow2");
    let odd_n = 1_000_003;
    let odd = schedule_uniform(ceil_log2(odd_n), 16, Routine::Interval).unwrap();
    let (ok_odd, slow_odd) = recovery_runs(odd_n, &odd, 20, "criterion-5-odd");
    let pass = ok2 >= 19 && slow2 < 60.0 && ok_odd >= 18 && slow_odd < 300.0;
    let detail = format!(
        "N=2^16: {ok2}/20 correct, slowest {slow2:.2}s; N={odd_n}: {ok_odd}/20 correct, slowest {slow_odd:.2}s"
    );
    report(5, "end-to-end recovery", pass, detail, start.elapsed(), Duration::from_secs(20 * 60 + 20 * 300))
}

fn min_query_regime() -> Outcome {
    let start = Instant::now();
    let runs = 20;
    let mut means = Vec::new();
    let mut all_ok = true;
    for n in [10u32, 12, 14] {
        let sched = schedule_single(n, Routine::Pow2).unwrap().with_solver(SolverId::Mitm);
        let per: Vec<(bool, u64)> = (0..runs)
            .into_par_iter()
            .map(|i| {
                let seed = derive(6, "criterion-6", (n as u64) << 32 | i);
                let mut inst = HiddenShiftInstance::with_mode(1 << n, Secret::Random, seed, Mode::Benchmark).unwrap();
                let mut rng = rng_for(seed, "pipeline", 0);
                let rec = recover(&mut inst, &sched, &RecoverConfig::default(), &mut rng);
                (matches!(rec, Ok(ref r) if r.verified), inst.q_queries())
            })
            .collect();
        all_ok &= per.iter().all(|p| p.0);
        means.push((n, per.iter().map(|p| p.1 as f64).sum::<f64>() / runs as f64));
    }
    let c = means[0].1 / 100.0;
    let ratios: Vec<f64> = means.iter().map(|&(n, q)| q / (c * (n * n) as f64)).collect();
    let pass = all_ok && ratios.iter().all(|&r| r <= 2.0);
    let detail = format!(
        "C = {c:.3} from n=10; mean queries {}; q/(C n^2) = {}",
        means.iter().map(|(n, q)| format!("n={n}: {q:.1}")).collect::<Vec<_>>().join(", "),
        ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
    );
    report(6, "min-query regime", pass, detail, start.elapsed(), Duration::from_secs(600))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn scaling_slopes() -> Outcome {
    let start = Instant::now();
    let slope = |solver: SolverId, instances: u64| {
        let points: Vec<(f64, f64)> = [16usize, 20, 24, 28]
            .into_iter()
            .map(|k| {
                let total: f64 = (0..instances)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = rng_for(7, "criterion-7", (k as u64) << 32 | i);
                        let inst: SubsetSumInstance = ModularInstance::random_planted(k, k as u32, &mut rng).into();
                        (solve(&inst, solver, &SolveOptions::default()).unwrap().op_count as f64).log2()
                    })
                    .sum();
                (k as f64, total / instances as f64)
            })
            .collect();
        least_squares_slope(&points)
    };
    let brute = slope(SolverId::Brute, 2);
    let ss = slope(SolverId::SchroeppelShamir, 20);
    let pass = (brute - 1.0).abs() <= 0.15 && (ss - 0.5).abs() <= 0.15;
    let detail = format!("log2(ops) slope over k in 16..28: brute {brute:.3} (target 1.0), ss {ss:.3} (target 0.5)");
    report(7, "scaling slopes", pass, detail, start.elapsed(), Duration::from_secs(600))
}

fn iqft_peak() -> Outcome {
    let start = Instant::now();
    let trials = 10_000u64;
    let mut pass = true;
    let mut parts = Vec::new();
    for modulus in [3u64, 7, 101, 999, 4001] {
        let nq = odd_qubits(&Modulus::new(modulus).unwrap(), 2);
        let s = rng_for(8, "criterion-8-s", modulus).gen_range(0..modulus);
        let dist = if nq <= MAX_DIRECT_QUBITS {
            iqft_distribution_direct(s, modulus, nq).unwrap()
        } else {
            iqft_distribution(s, modulus, nq).unwrap()
        };
        let p = success_probability(&dist, s, modulus, nq);
        let peak = dist.iter().cloned().fold(0.0, f64::max);
        let hits: u64 = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut inst =
                    HiddenShiftInstance::new(modulus, Secret::Fixed(s), derive(8, "criterion-8", modulus ^ t << 20))
                        .unwrap();
                let m = inst.modulus();
                let elems = (0..nq)
                    .map(|j| inst.ideal_element(hshift::group_arith::pow_mod(2, j as u64, &m)).unwrap())
                    .collect();
                let k = semiclassical_iqft(&mut inst, elems).unwrap();
                u64::from(candidate_from_sample(k, modulus, nq) == s)
            })
            .sum();
        let freq = hits as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64);
        let ok = (freq - p).abs() <= 3.0 * sigma && peak >= 0.405;
        pass &= ok;
        parts.push(format!("N={modulus}: success {freq:.4} vs {p:.4}, peak {peak:.3}"));
    }
    report(8, "IQFT peak", pass, parts.join("; "), start.elapsed(), Duration::from_secs(600))
}

fn main() {
    let outcomes = [
        table_reproduction(),
        solver_equivalence(),
        simulation_exactness(),
        projection_law(),
        end_to_end(),
        min_query_regime(),
        scaling_slopes(),
        iqft_peak(),
    ];
    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    println!("{}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    let mut unexpected = Vec::new();
    for o in &failed {
        match EXPECTED_FAILURES.iter().find(|(id, _)| *id == o.id) {
            Some((_, why)) => println!("expected failure, criterion {}: {why}", o.id),
            None => unexpected.push(format!("criterion {}: {}", o.id, o.detail)),
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:#?}");
        std::process::exit(1);
    }
}
