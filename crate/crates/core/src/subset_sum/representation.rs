//! Representation-technique solver.
//!
//! A solution `x` of weight `p` is written as `x = y + z` with `y`, `z` in
//! `{-1,0,1}^k`: `y` takes `floor(p/2)` of the ones of `x` and `z` the rest,
//! and both carry `e` extra `+1/-1` pairs that cancel on positions where
//! `x` is zero. A solution has many such representations, so the solver can
//! afford to keep only the `y` whose partial sum falls in one random residue
//! class modulo `P = 2^t * D` and only the `z` whose residue is compatible
//! with the target. `t` is chosen so that a solution keeps a few
//! representations on average.
//!
//! With depth 2, `y` and `z` are enumerated by a plain left/right split.
//! With depth 3, `y` and `z` are themselves built by one more
//! representation step under a finer class. Merges check digit
//! consistency: overlapping digits must stay in `{-1,0,1}` and the digit
//! counts must match.
//!
//! One round finds each solution with constant probability. Rounds repeat
//! with fresh classes until the found set has not changed for
//! `stable_rounds` consecutive rounds. A round in which every class has
//! size one is exhaustive and ends the repetition immediately.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use rand::Rng;

use super::list::{merge_join, JoinConstraint, OpCounter, PartialSumList};
use super::{SolutionSet, SubsetSumInstance};
use crate::error::Result;
use crate::seeding::{self, SimRng};

#[derive(Debug, Clone, PartialEq)]
pub struct RepParams {
    /// Number of list levels: 2 or 3.
    pub depth: u32,
    /// Extra `+1/-1` pairs per split, as a fraction of `k`.
    pub minus_fraction: f64,
    /// Class sizes keep about `2^margin_bits` representations per solution.
    pub margin_bits: u32,
    pub stable_rounds: u32,
    pub max_rounds: u32,
}

impl Default for RepParams {
    fn default() -> Self {
        RepParams { depth: 2, minus_fraction: 1.0 / 16.0, margin_bits: 2, stable_rounds: 3, max_rounds: 64 }
    }
}

fn choose(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Round<'a> {
    weights: &'a [u64],
    k: usize,
    extra: u32,
    margin: u32,
    rng: SimRng,
    halves: HashMap<(bool, u32, u32), Rc<PartialSumList>>,
    exhaustive: bool,
}

impl Round<'_> {
    fn half(&mut self, right: bool, ones: u32, minus: u32, ops: &mut OpCounter) -> Result<Rc<PartialSumList>> {
        if let Some(list) = self.halves.get(&(right, ones, minus)) {
            return Ok(list.clone());
        }
        let mid = self.k / 2;
        let positions: Vec<usize> = if right { (mid..self.k).collect() } else { (0..mid).collect() };
        let list = Rc::new(PartialSumList::signed_sums(self.weights, &positions, ones, minus));
        ops.charge(list.len() as u64)?;
        self.halves.insert((right, ones, minus), list.clone());
        Ok(list)
    }

    fn cached_cells(&self) -> u64 {
        self.halves.values().map(|l| l.len() as u64).sum()
    }

    /// All vectors with exactly `ones` ones and `minus` minus-ones whose sum
    /// satisfies `constraint` (up to the random class filtering below).
    #[allow(clippy::too_many_arguments)]
    fn build(
        &mut self,
        ones: u32,
        minus: u32,
        constraint: JoinConstraint,
        class_width: i128,
        max_bits: u32,
        level: u32,
        ops: &mut OpCounter,
    ) -> Result<PartialSumList> {
        let exact = move |e: &super::PartialSum| e.ones() == ones && e.minus_ones() == minus;
        if level <= 1 {
            let left = self.half(false, ones, minus, ops)?;
            let right = self.half(true, ones, minus, ops)?;
            let out = merge_join(&left, &right, &constraint, exact, ops)?;
            ops.observe_mem(self.cached_cells() + out.len() as u64);
            return Ok(out);
        }

        let zeros = self.k as u32 - ones - minus;
        let e = self.extra.min(zeros / 2);
        let (y_ones, y_minus) = (ones / 2 + e, minus / 2 + e);
        let (z_ones, z_minus) = (ones - ones / 2 + e, minus - minus / 2 + e);
        let reps = choose(ones, ones / 2) * choose(minus, minus / 2) * choose(zeros, e) * choose(zeros - e, e);
        let bits = (reps.log2().floor() as i64 - self.margin as i64).clamp(0, max_bits as i64) as u32;
        if bits > 0 {
            self.exhaustive = false;
        }
        let modulus = class_width << bits;
        let class_lo = self.rng.gen_range(0..(1i128 << bits)) * class_width;
        let y_class = JoinConstraint::residue(modulus, class_lo, class_width);
        let z_class = constraint.sibling(modulus, class_lo, class_width);

        let ys = self.build(y_ones, y_minus, y_class, class_width, bits, level - 1, ops)?;
        let zs = self.build(z_ones, z_minus, z_class, class_width, bits, level - 1, ops)?;
        let mut out = merge_join(&ys, &zs, &constraint, exact, ops)?;
        out.dedup();
        ops.observe_mem(self.cached_cells() + (ys.len() + zs.len() + out.len()) as u64);
        Ok(out)
    }
}

pub fn solve_representation(
    inst: &SubsetSumInstance,
    params: &RepParams,
    seed: u64,
    ops: &mut OpCounter,
) -> Result<SolutionSet> {
    assert!(params.depth == 2 || params.depth == 3, "representation depth must be 2 or 3");
    let k = inst.k();
    let target = inst.target_constraint();
    let (class_width, max_bits) = match (inst, &target) {
        (SubsetSumInstance::Modular(m), _) => (1i128, m.r),
        (SubsetSumInstance::Interval(i), JoinConstraint::Range { lo, hi }) => ((hi - lo).max(1), i.r - 1),
        _ => unreachable!("interval instances always produce a range target"),
    };
    let extra = (params.minus_fraction * k as f64).round() as u32;

    let mut found = BTreeSet::new();
    let mut stable = 0;
    let mut rounds = 0;
    while rounds < params.max_rounds.max(1) {
        let mut round = Round {
            weights: inst.weights(),
            k,
            extra,
            margin: params.margin_bits,
            rng: seeding::rng_for(seed, "rep-round", rounds as u64),
            halves: HashMap::new(),
            exhaustive: true,
        };
        let before = found.len();
        for weight in 0..=k as u32 {
            let out = round.build(weight, 0, target, class_width, max_bits, params.depth, ops)?;
            found.extend(out.entries.iter().map(|e| e.plus));
        }
        rounds += 1;
        if round.exhaustive {
            break;
        }
        stable = if found.len() > before { 0 } else { stable + 1 };
        if stable >= params.stable_rounds {
            break;
        }
    }
    Ok(SolutionSet::from_parts(found.into_iter().collect(), ops, rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subset_sum::{solve_bruteforce, solve_mitm, IntervalInstance, ModularInstance};
    use rand::SeedableRng;

    fn rep(inst: &SubsetSumInstance, params: &RepParams, seed: u64) -> SolutionSet {
        solve_representation(inst, params, seed, &mut OpCounter::new(None)).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(choose(5, 2), 10.0);
        assert_eq!(choose(4, 5), 0.0);
        assert_eq!(choose(0, 0), 1.0);
    }

    #[test]
    fn no_minus_ones_matches_mitm() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let params = RepParams { minus_fraction: 0.0, ..Default::default() };
        for k in 8..=14 {
            let inst: SubsetSumInstance = ModularInstance::random_planted(k, k as u32 - 1, &mut rng).into();
            let mitm = solve_mitm(&inst, &mut OpCounter::new(None)).unwrap();
            assert_eq!(rep(&inst, &params, k as u64).solutions, mitm.solutions);
        }
    }

    #[test]
    fn depth_three_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let params = RepParams { depth: 3, ..Default::default() };
        for k in 8..=14 {
            let inst: SubsetSumInstance = ModularInstance::random_planted(k, k as u32 - 1, &mut rng).into();
            let brute = solve_bruteforce(&inst, &mut OpCounter::new(None)).unwrap();
            assert_eq!(rep(&inst, &params, 9).solutions, brute.solutions, "k={k}");
        }
    }

    #[test]
    fn interval_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for k in 8..=14 {
            let r = k as u32 - crate::group_arith::ceil_log2(k as u64);
            let inst: SubsetSumInstance = IntervalInstance::random_planted(k, 1 << 20, r, &mut rng).into();
            let brute = solve_bruteforce(&inst, &mut OpCounter::new(None)).unwrap();
            let got = rep(&inst, &RepParams::default(), 4);
            assert_eq!(got.solutions, brute.solutions, "k={k}");
            assert!(got.solutions.iter().all(|&x| inst.is_solution(x)));
        }
    }

    #[test]
    fn planted_solution_at_k_32() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let k = 32;
        let weights: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & ((1 << 31) - 1)).collect();
        let planted: u64 = rng.gen::<u64>() & 0xFFFF_FFFF;
        let target = (crate::subset_sum::eval_sum(&weights, planted) as u64) & ((1 << 31) - 1);
        let inst: SubsetSumInstance = ModularInstance::new(weights, 31, target).unwrap().into();
        let params = RepParams { minus_fraction: 0.0, stable_rounds: 1, ..Default::default() };
        let got = rep(&inst, &params, 5);
        assert!(got.solutions.contains(&planted));
        assert!(got.solutions.iter().all(|&x| inst.is_solution(x)));
    }
}
