use hshift::instance::{HiddenShiftInstance, Mode, Secret};
use hshift::pipeline::{
    schedule_affine, schedule_improved, schedule_increasing, schedule_single, schedule_uniform, Routine, Schedule,
};
use hshift::recover::{recover, RecoverConfig};
use hshift::seeding::rng_for;
use hshift::subset_sum::SolverId;

fn recovers(modulus: u64, sched: &Schedule, seeds: u64) {
    for seed in 0..seeds {
        let mut inst = HiddenShiftInstance::new(modulus, Secret::Random, seed).unwrap();
        let s = inst.reveal_secret().unwrap();
        let mut rng = rng_for(seed, "e2e", 0);
        let rec = recover(&mut inst, sched, &RecoverConfig::default(), &mut rng).unwrap();
        assert!(rec.verified);
        assert_eq!(rec.s, s, "N = {modulus}, seed {seed}, {:?}", sched.params.kind);
        assert_eq!(rec.ledger.q_queries, inst.q_queries());
    }
}

#[test]
fn every_strategy_recovers_pow2() {
    let n = 14;
    let scheds = [
        schedule_uniform(n, 6, Routine::Pow2).unwrap(),
        schedule_improved(n, 0.5, Routine::Pow2).unwrap(),
        schedule_increasing(n, 0.5, Routine::Pow2).unwrap(),
        schedule_affine(n, 0.5, Some(0.2), Routine::Pow2).unwrap(),
        schedule_single(n, Routine::Pow2).unwrap(),
    ];
    for sched in scheds {
        recovers(1 << n, &sched.with_solver(SolverId::Mitm), 3);
    }
}

#[test]
fn every_solver_recovers_pow2() {
    let sched = schedule_uniform(16, 10, Routine::Pow2).unwrap();
    for solver in SolverId::ALL {
        recovers(1 << 16, &sched.clone().with_solver(solver), 2);
    }
}

#[test]
fn odd_moduli() {
    for modulus in [3u64, 15, 1001, 65_537] {
        let sched = schedule_uniform(hshift::group_arith::ceil_log2(modulus), 10, Routine::Interval).unwrap();
        recovers(modulus, &sched.with_solver(SolverId::SchroeppelShamir), 3);
    }
    recovers(4099, &schedule_single(13, Routine::Interval).unwrap().with_solver(SolverId::Mitm), 2);
}

#[test]
fn benchmark_mode_seals_the_secret() {
    let mut inst = HiddenShiftInstance::with_mode(1 << 10, Secret::Random, 1, Mode::Benchmark).unwrap();
    assert!(inst.reveal_secret().is_err());
    assert!(inst.ideal_element(3).is_err());
    let sched = schedule_uniform(10, 6, Routine::Pow2).unwrap();
    let rec = recover(&mut inst, &sched, &RecoverConfig::default(), &mut rng_for(1, "e2e", 0)).unwrap();
    assert!(rec.verified && !inst.tampered());
}
