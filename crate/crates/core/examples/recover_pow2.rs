//! Recovers the shift on Z_(2^20) with a uniform schedule.

use hshift::instance::{HiddenShiftInstance, Mode, Secret};
use hshift::pipeline::{schedule_uniform, Routine};
use hshift::recover::{recover, RecoverConfig};
use hshift::seeding::rng_for;
use hshift::subset_sum::SolverId;

fn main() -> hshift::Result<()> {
    let sched = schedule_uniform(20, 8, Routine::Pow2)?.with_solver(SolverId::Mitm);
    print!("{}", sched.render());
    for seed in 0..5 {
        let mut inst = HiddenShiftInstance::with_mode(1 << 20, Secret::Random, seed, Mode::Benchmark)?;
        let mut rng = rng_for(seed, "pipeline", 0);
        let rec = recover(&mut inst, &sched, &RecoverConfig::default(), &mut rng)?;
        println!(
            "seed {seed}: s = {:>7}  verified {}  queries {:>6}  solver ops {:>9}  wasted {:>5}",
            rec.s, rec.verified, rec.ledger.q_queries, rec.ledger.solver_ops, rec.ledger.elements_wasted
        );
    }
    Ok(())
}
