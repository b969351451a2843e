//! One power-of-two combination and one interval combination, with their
//! success rates over many trials.

use hshift::combine::{combine_interval, combine_pow2, IntervalStep, LabelView};
use hshift::instance::{HiddenShiftInstance, Secret};
use hshift::seeding::rng_for;
use hshift::subset_sum::{SolveOptions, SolverId};

fn main() -> hshift::Result<()> {
    let opts = SolveOptions::default();
    let mut rng = rng_for(3, "example", 0);

    let mut inst = HiddenShiftInstance::new(1 << 16, Secret::Random, 11)?;
    let (k, r, trials) = (8, 4, 2000);
    let mut ok = 0;
    let mut valuations = [0u32; 17];
    for _ in 0..trials {
        let elems = (0..k).map(|_| inst.sample_element()).collect();
        let out = combine_pow2(&inst, elems, r, 0, SolverId::Brute, &opts, &mut rng)?;
        if let Ok(e) = out.result {
            ok += 1;
            valuations[e.label().trailing_zeros().min(16) as usize] += 1;
        }
    }
    println!("pow2  k={k} r={r}: {ok}/{trials} succeeded");
    println!("  output 2-adic valuations: {:?}", &valuations[..8]);

    let mut inst = HiddenShiftInstance::new(1_000_003, Secret::Random, 12)?;
    let step = IntervalStep::halving(4, 1 << 14);
    let view = LabelView::identity(inst.modulus());
    let mut ok = 0;
    let mut max_label = 0;
    for _ in 0..trials {
        let elems = (0..k)
            .map(|_| inst.ideal_element(rand::Rng::gen_range(&mut rng, 0..step.bound)))
            .collect::<Result<Vec<_>, _>>()?;
        let out = combine_interval(&inst, elems, &step, &view, SolverId::Brute, &opts, &mut rng)?;
        if let Ok(e) = out.result {
            ok += 1;
            max_label = max_label.max(e.label());
        }
    }
    println!(
        "interval k={k} B={} -> {}: {ok}/{trials} succeeded, largest label {max_label}",
        step.bound, step.bound_out
    );
    Ok(())
}
