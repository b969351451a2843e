//! Recovers the shift on Z_N for a prime N near one million.

use hshift::instance::{HiddenShiftInstance, Mode, Secret};
use hshift::pipeline::{schedule_uniform, Routine};
use hshift::recover::{recover, RecoverConfig};
use hshift::seeding::rng_for;

fn main() -> hshift::Result<()> {
    let n = 1_000_003;
    let sched = schedule_uniform(20, 16, Routine::Interval)?;
    for seed in 0..3 {
        let mut inst = HiddenShiftInstance::with_mode(n, Secret::Random, seed, Mode::Benchmark)?;
        let mut rng = rng_for(seed, "pipeline", 0);
        let rec = recover(&mut inst, &sched, &RecoverConfig::default(), &mut rng)?;
        println!(
            "seed {seed}: s = {:>7}  verified {}  attempts {}  queries {:>6}  {:.2}s",
            rec.s, rec.verified, rec.attempts, rec.ledger.q_queries, rec.ledger.wall_seconds
        );
    }
    Ok(())
}
