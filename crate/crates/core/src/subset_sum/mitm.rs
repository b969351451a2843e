use super::list::{merge_join, OpCounter, PartialSumList};
use super::{SolutionSet, SubsetSumInstance};
use crate::error::Result;

/// Plain two-list meet-in-the-middle: all sums of each half, one join.
pub fn solve_mitm(inst: &SubsetSumInstance, ops: &mut OpCounter) -> Result<SolutionSet> {
    let k = inst.k();
    let half = k / 2;
    let left: Vec<usize> = (0..half).collect();
    let right: Vec<usize> = (half..k).collect();
    let a = PartialSumList::subset_sums(inst.weights(), &left);
    let b = PartialSumList::subset_sums(inst.weights(), &right);
    ops.charge((a.len() + b.len()) as u64)?;
    let out = merge_join(&a, &b, &inst.target_constraint(), |_| true, ops)?;
    ops.observe_mem((a.len() + b.len() + out.len()) as u64);
    let solutions = out.entries.iter().map(|e| e.plus).collect();
    Ok(SolutionSet::from_parts(solutions, ops, 1))
}
