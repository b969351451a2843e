use super::list::OpCounter;
use super::{low_mask, SolutionSet, SubsetSumInstance};
use crate::error::{Error, Result};

/// Size guard for exhaustive enumeration.
pub const MAX_BRUTE_K: usize = 30;

/// Enumerates all `2^k` vectors in Gray-code order, updating the sum with
/// one addition per step.
pub fn solve_bruteforce(inst: &SubsetSumInstance, ops: &mut OpCounter) -> Result<SolutionSet> {
    let k = inst.k();
    if k > MAX_BRUTE_K {
        return Err(Error::SizeGuard { what: "k", value: k as u64, limit: MAX_BRUTE_K as u64 });
    }
    ops.charge(1u64 << k)?;
    let mut found = Vec::new();
    match inst {
        SubsetSumInstance::Modular(m) => {
            let mask = low_mask(m.r);
            let weights: Vec<u64> = m.weights.iter().map(|w| w & mask).collect();
            let (mut x, mut sum) = (0u64, 0u64);
            if m.target == 0 {
                found.push(0);
            }
            for i in 1u64..(1 << k) {
                let bit = i.trailing_zeros() as usize;
                x ^= 1 << bit;
                sum = if x >> bit & 1 == 1 { sum.wrapping_add(weights[bit]) } else { sum.wrapping_sub(weights[bit]) }
                    & mask;
                if sum == m.target {
                    found.push(x);
                }
            }
        }
        SubsetSumInstance::Interval(inter) => {
            let (lo, hi) = inter.sum_window();
            let (lo, hi) = (lo.max(0) as u128, hi.max(0) as u128);
            let (mut x, mut sum) = (0u64, 0u128);
            if lo == 0 && hi > 0 {
                found.push(0);
            }
            for i in 1u64..(1 << k) {
                let bit = i.trailing_zeros() as usize;
                x ^= 1 << bit;
                if x >> bit & 1 == 1 {
                    sum += inter.weights[bit] as u128;
                } else {
                    sum -= inter.weights[bit] as u128;
                }
                if lo <= sum && sum < hi {
                    found.push(x);
                }
            }
        }
    }
    ops.observe_mem(k as u64 + 2);
    Ok(SolutionSet::from_parts(found, ops, 1))
}
