//! Runs every solver on the same random instances and compares them with
//! brute force.

use hshift::seeding::rng_for;
use hshift::subset_sum::{solve, IntervalInstance, ModularInstance, SolveOptions, SolverId, SubsetSumInstance};

fn main() -> hshift::Result<()> {
    let k = 18;
    let mut rng = rng_for(7, "example", 0);
    let instances: Vec<(&str, SubsetSumInstance)> = vec![
        ("mod", ModularInstance::random_planted(k, k as u32, &mut rng).into()),
        ("interval", IntervalInstance::random_planted(k, 1 << 30, (k - 5) as u32, &mut rng).into()),
    ];
    for (flavor, inst) in &instances {
        let truth = solve(inst, SolverId::Brute, &SolveOptions::default())?;
        println!("{flavor} k={k}: {} solutions", truth.len());
        for solver in SolverId::ALL {
            let set = solve(inst, solver, &SolveOptions::with_seed(1))?;
            println!(
                "  {:<8} ops 2^{:<6.2} mem {:>7}  rounds {:>2}  {}",
                solver.name(),
                (set.op_count.max(1) as f64).log2(),
                set.mem_peak,
                set.rounds,
                if set.solutions == truth.solutions { "exact" } else { "differs" }
            );
        }
    }
    Ok(())
}
