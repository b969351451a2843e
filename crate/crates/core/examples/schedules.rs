//! Prints the schedule of every strategy for a 64-bit group order.

use hshift::pipeline::{
    schedule_affine, schedule_improved, schedule_increasing, schedule_single, schedule_uniform, Routine,
};

fn main() -> hshift::Result<()> {
    let n = 64;
    let c = 0.5;
    for sched in [
        schedule_uniform(n, 12, Routine::Pow2)?,
        schedule_improved(n, c, Routine::Pow2)?,
        schedule_increasing(n, c, Routine::Pow2)?,
        schedule_affine(n, c, None, Routine::Pow2)?,
        schedule_single(20, Routine::Interval)?,
    ] {
        print!("{}", sched.render());
        println!();
    }
    Ok(())
}
