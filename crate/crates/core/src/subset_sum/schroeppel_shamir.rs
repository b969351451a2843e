//! Four-list merging with a guessed intermediate value.
//!
//! The weights are split into quarters `S1..S4`. For each class `g` of the
//! partial sum `S12 = S1 + S2` modulo `P`, the solver builds only the
//! entries of `S12` in that class and only the entries of `S34` whose
//! residue is compatible with the target, then joins the two. Every
//! solution lands in exactly one class, so the union over `g` is the exact
//! solution set. With `2^t ~ 2^(k/4)` classes all lists stay near
//! `2^(k/4)` entries and the total work is near `2^(k/2)`.
//!
//! Modular targets guess `S12 mod 2^t` directly. Interval targets of width
//! `w` use classes of `w` consecutive residues modulo `2^t * w`, so the
//! compatible `S34` residues form a window of width `2w - 1`.

use super::list::{merge_join, JoinConstraint, OpCounter, PartialSumList};
use super::{SolutionSet, SubsetSumInstance};
use crate::error::Result;

pub fn solve_schroeppel_shamir(inst: &SubsetSumInstance, ops: &mut OpCounter) -> Result<SolutionSet> {
    let k = inst.k();
    assert!(k >= 4, "Schroeppel-Shamir needs at least four weights");
    let weights = inst.weights();
    let bounds = [0, k / 4, k / 2, k / 2 + (k - k / 2) / 2, k];
    let quarter = |i: usize| -> PartialSumList {
        let pos: Vec<usize> = (bounds[i]..bounds[i + 1]).collect();
        PartialSumList::subset_sums(weights, &pos)
    };
    let lists = [quarter(0), quarter(1), quarter(2), quarter(3)];
    let base_cells: usize = lists.iter().map(|l| l.len()).sum();
    ops.charge(base_cells as u64)?;

    let target = inst.target_constraint();
    let (class_width, guess_bits) = match (inst, &target) {
        (SubsetSumInstance::Modular(m), _) => (1i128, m.r.min((k / 4) as u32)),
        (SubsetSumInstance::Interval(_), JoinConstraint::Range { lo, hi }) => ((hi - lo).max(1), (k / 4) as u32),
        _ => unreachable!("interval instances always produce a range target"),
    };
    let modulus = class_width << guess_bits;

    let mut solutions = Vec::new();
    for g in 0..(1i128 << guess_bits) {
        let class_lo = g * class_width;
        let left_class = JoinConstraint::residue(modulus, class_lo, class_width);
        let right_class = target.sibling(modulus, class_lo, class_width);
        let s12 = merge_join(&lists[0], &lists[1], &left_class, |_| true, ops)?;
        let s34 = merge_join(&lists[2], &lists[3], &right_class, |_| true, ops)?;
        let out = merge_join(&s12, &s34, &target, |_| true, ops)?;
        ops.observe_mem((base_cells + s12.len() + s34.len() + out.len()) as u64);
        solutions.extend(out.entries.iter().map(|e| e.plus));
    }
    Ok(SolutionSet::from_parts(solutions, ops, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset_sum::{solve_bruteforce, IntervalInstance, ModularInstance};
    use rand::SeedableRng;

    fn both(inst: SubsetSumInstance) -> (Vec<u64>, Vec<u64>) {
        let brute = solve_bruteforce(&inst, &mut OpCounter::new(None)).unwrap();
        let ss = solve_schroeppel_shamir(&inst, &mut OpCounter::new(None)).unwrap();
        (brute.solutions, ss.solutions)
    }

    #[test]
    fn four_weight_example() {
        let (brute, ss) = both(ModularInstance::new(vec![1, 2, 3, 4], 3, 3).unwrap().into());
        // only {1,2} and {3} reach 3 mod 8; the total is 10
        assert_eq!(brute, vec![0b0011, 0b0100]);
        assert_eq!(ss, brute);
    }

    #[test]
    fn random_instances_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in 4..=14 {
            for r in 0..=(k as u32) {
                let m = ModularInstance::random(k, r, &mut rng);
                let (brute, ss) = both(m.into());
                assert_eq!(brute, ss, "modular k={k} r={r}");
            }
            for r in 1..=(k as u32) {
                let i = IntervalInstance::random_planted(k, 1 << 12, r, &mut rng);
                let (brute, ss) = both(i.into());
                assert_eq!(brute, ss, "interval k={k} r={r}");
            }
        }
    }
}
