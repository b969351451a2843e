//! Solvers for the subset-sum equations behind the combination routines.
//!
//! Two flavors of instance are supported:
//!
//! * modular: `x . l = V (mod 2^r)`;
//! * interval: `floor(x . l * 2^(r-1) / B) = V`, which is the same as
//!   `x . l` lying in an integer window `[lo, hi)`.
//!
//! Every solver returns *all* solutions `x` in `{0,1}^k`, encoded as bit
//! masks (bit `i` set when `x_i = 1`). Brute force, meet-in-the-middle and
//! Schroeppel–Shamir are exact. The representation and memoryless solvers
//! are randomized and repeat with fresh randomness until the found set has
//! been stable for a configurable number of rounds.

mod brute;
pub mod list;
mod memoryless;
mod mitm;
mod representation;
mod schroeppel_shamir;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use list::{JoinConstraint, OpCounter};

pub use brute::{solve_bruteforce, MAX_BRUTE_K};
pub use list::{merge_join, PartialSum, PartialSumList, ResidueWindow};
pub use memoryless::{solve_memoryless, MemlessParams};
pub use mitm::solve_mitm;
pub use representation::{solve_representation, RepParams};
pub use schroeppel_shamir::solve_schroeppel_shamir;

/// Largest number of weights any solver accepts (solutions are `u64` masks).
pub const MAX_K: usize = 63;
/// Largest modular constraint size.
pub const MAX_R: u32 = 62;

/// `x . l = V (mod 2^r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularInstance {
    pub weights: Vec<u64>,
    pub r: u32,
    #[serde(rename = "V")]
    pub target: u64,
}

/// `floor(x . l * 2^(r-1) / B) = V` with every weight below `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalInstance {
    pub weights: Vec<u64>,
    #[serde(rename = "B")]
    pub bound: u64,
    pub r: u32,
    #[serde(rename = "V")]
    pub target: u64,
}

/// Either flavor; serialized as `{flavor, weights, r, B?, V}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "lowercase")]
pub enum SubsetSumInstance {
    #[serde(rename = "mod")]
    Modular(ModularInstance),
    Interval(IntervalInstance),
}

impl ModularInstance {
    pub fn new(weights: Vec<u64>, r: u32, target: u64) -> Result<Self> {
        let inst = ModularInstance { weights, r, target };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        check_k(self.weights.len())?;
        if self.r > MAX_R {
            return Err(Error::InvalidInstance(format!("r = {} exceeds {MAX_R}", self.r)));
        }
        if self.target >> self.r != 0 {
            return Err(Error::InvalidInstance(format!("V = {} is not below 2^{}", self.target, self.r)));
        }
        Ok(())
    }

    /// Draws uniform weights in `[0, 2^r)` and `V` as the image of a uniform
    /// `x`, so that the instance has at least one solution.
    pub fn random_planted<R: Rng>(k: usize, r: u32, rng: &mut R) -> Self {
        let mask = low_mask(r);
        let weights: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & mask).collect();
        let x: u64 = rng.gen::<u64>() & low_mask(k as u32);
        let target = (eval_sum(&weights, x) as u128 & mask as u128) as u64;
        ModularInstance { weights, r, target }
    }

    /// Draws uniform weights and a uniform target.
    pub fn random<R: Rng>(k: usize, r: u32, rng: &mut R) -> Self {
        let mask = low_mask(r);
        let weights = (0..k).map(|_| rng.gen::<u64>() & mask).collect();
        ModularInstance { weights, r, target: rng.gen::<u64>() & mask }
    }
}

impl IntervalInstance {
    pub fn new(weights: Vec<u64>, bound: u64, r: u32, target: u64) -> Result<Self> {
        let inst = IntervalInstance { weights, bound, r, target };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let k = self.weights.len();
        check_k(k)?;
        if self.bound == 0 || self.weights.iter().any(|&w| w >= self.bound) {
            return Err(Error::InvalidInstance("every weight must lie in [0, B)".into()));
        }
        if self.r == 0 || self.r > 60 {
            return Err(Error::InvalidInstance(format!("r = {} must lie in [1, 60]", self.r)));
        }
        if (self.bound as u128) * (k as u128) >= 1u128 << 64 {
            return Err(Error::InvalidInstance("k * B must stay below 2^64".into()));
        }
        let max_v = (k as u128) << (self.r - 1);
        if self.target as u128 > max_v {
            return Err(Error::InvalidInstance(format!("V = {} exceeds k * 2^(r-1) = {max_v}", self.target)));
        }
        Ok(())
    }

    /// The window `[lo, hi)` of sums `S` with `floor(S * 2^(r-1) / B) = V`.
    pub fn sum_window(&self) -> (i128, i128) {
        let scale = 1i128 << (self.r - 1);
        let b = self.bound as i128;
        let v = self.target as i128;
        let ceil_div = |num: i128| (num + scale - 1).div_euclid(scale);
        (ceil_div(v * b), ceil_div((v + 1) * b))
    }

    /// The ancilla value of a subset sum.
    pub fn ancilla(&self, sum: u128) -> u64 {
        ((sum << (self.r - 1)) / self.bound as u128) as u64
    }

    /// Uniform weights in `[0, B)` and `V` taken from a uniform `x`.
    pub fn random_planted<R: Rng>(k: usize, bound: u64, r: u32, rng: &mut R) -> Self {
        let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(0..bound)).collect();
        let x: u64 = rng.gen::<u64>() & low_mask(k as u32);
        let mut inst = IntervalInstance { weights, bound, r, target: 0 };
        inst.target = inst.ancilla(eval_sum(&inst.weights, x) as u128);
        inst
    }
}

impl SubsetSumInstance {
    pub fn validate(&self) -> Result<()> {
        match self {
            SubsetSumInstance::Modular(m) => m.validate(),
            SubsetSumInstance::Interval(i) => i.validate(),
        }
    }

    pub fn weights(&self) -> &[u64] {
        match self {
            SubsetSumInstance::Modular(m) => &m.weights,
            SubsetSumInstance::Interval(i) => &i.weights,
        }
    }

    pub fn k(&self) -> usize {
        self.weights().len()
    }

    /// The condition on `x . l` that defines a solution.
    pub fn target_constraint(&self) -> JoinConstraint {
        match self {
            SubsetSumInstance::Modular(m) => JoinConstraint::residue(1i128 << m.r, m.target as i128, 1),
            SubsetSumInstance::Interval(i) => {
                let (lo, hi) = i.sum_window();
                JoinConstraint::Range { lo, hi }
            }
        }
    }

    /// Whether `x` solves the instance, by direct evaluation.
    pub fn is_solution(&self, x: u64) -> bool {
        if self.k() < 64 && x >> self.k() != 0 {
            return false;
        }
        let sum = eval_sum(self.weights(), x);
        match self {
            SubsetSumInstance::Modular(m) => (sum & ((1i128 << m.r) - 1)) as u64 == m.target,
            SubsetSumInstance::Interval(i) => i.ancilla(sum as u128) == i.target,
        }
    }
}

impl From<ModularInstance> for SubsetSumInstance {
    fn from(m: ModularInstance) -> Self {
        SubsetSumInstance::Modular(m)
    }
}

impl From<IntervalInstance> for SubsetSumInstance {
    fn from(i: IntervalInstance) -> Self {
        SubsetSumInstance::Interval(i)
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidInstance(format!("k = {k} must lie in [1, {MAX_K}]")));
    }
    Ok(())
}

#[inline]
pub(crate) fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// `x . l` as an exact integer.
#[inline]
pub fn eval_sum(weights: &[u64], x: u64) -> i128 {
    let mut sum = 0i128;
    let mut rest = x;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        sum += weights[i] as i128;
        rest &= rest - 1;
    }
    sum
}

/// Every solution of an instance, with the cost of finding them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    /// Sorted, duplicate-free solution masks.
    pub solutions: Vec<u64>,
    pub op_count: u64,
    pub mem_peak: u64,
    /// Repetition rounds used by the randomized solvers; 1 otherwise.
    pub rounds: u32,
}

impl SolutionSet {
    pub(crate) fn from_parts(mut solutions: Vec<u64>, ops: &OpCounter, rounds: u32) -> Self {
        solutions.sort_unstable();
        solutions.dedup();
        SolutionSet { solutions, op_count: ops.spent(), mem_peak: ops.mem_peak(), rounds }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverId {
    Brute,
    Mitm,
    #[serde(rename = "ss")]
    SchroeppelShamir,
    #[serde(rename = "rep")]
    Representation,
    #[serde(rename = "memless")]
    Memoryless,
}

impl SolverId {
    pub const ALL: [SolverId; 5] =
        [SolverId::Brute, SolverId::Mitm, SolverId::SchroeppelShamir, SolverId::Representation, SolverId::Memoryless];

    pub fn name(&self) -> &'static str {
        match self {
            SolverId::Brute => "brute",
            SolverId::Mitm => "mitm",
            SolverId::SchroeppelShamir => "ss",
            SolverId::Representation => "rep",
            SolverId::Memoryless => "memless",
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SolverId::Brute | SolverId::Mitm | SolverId::SchroeppelShamir)
    }

    /// Smallest `k` the solver accepts.
    pub fn min_k(&self) -> usize {
        match self {
            SolverId::Brute | SolverId::Mitm => 1,
            SolverId::Memoryless => 2,
            SolverId::SchroeppelShamir => 4,
            SolverId::Representation => 8,
        }
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown solver '{s}' (brute, mitm, ss, rep, memless)")))
    }
}

/// Knobs for [`solve`].
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Abstract operation budget; `None` is unlimited.
    pub budget: Option<u64>,
    /// Seed for the randomized solvers.
    pub seed: u64,
    pub rep: RepParams,
    pub memless: MemlessParams,
}

impl SolveOptions {
    pub fn with_seed(seed: u64) -> Self {
        SolveOptions { seed, ..Default::default() }
    }
}

/// Dispatches to the chosen solver.
///
/// Running out of budget is reported as [`Error::BudgetExhausted`], never as
/// an empty solution set. Instances below a solver's minimum size fall back
/// to brute force.
pub fn solve(inst: &SubsetSumInstance, solver: SolverId, opts: &SolveOptions) -> Result<SolutionSet> {
    inst.validate()?;
    let mut ops = OpCounter::new(opts.budget);
    if inst.k() < solver.min_k() {
        return solve_bruteforce(inst, &mut ops);
    }
    match solver {
        SolverId::Brute => solve_bruteforce(inst, &mut ops),
        SolverId::Mitm => solve_mitm(inst, &mut ops),
        SolverId::SchroeppelShamir => solve_schroeppel_shamir(inst, &mut ops),
        SolverId::Representation => solve_representation(inst, &opts.rep, opts.seed, &mut ops),
        SolverId::Memoryless => solve_memoryless(inst, &opts.memless, opts.seed, &mut ops),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_window_matches_definition() {
        let inst = IntervalInstance::new(vec![3, 5, 6, 7], 8, 2, 2).unwrap();
        let (lo, hi) = inst.sum_window();
        for s in 0u128..40 {
            let inside = (lo..hi).contains(&(s as i128));
            assert_eq!(inside, inst.ancilla(s) == 2, "s = {s}");
        }
    }

    #[test]
    fn instance_validation() {
        assert!(ModularInstance::new(vec![1, 2], 2, 4).is_err());
        assert!(ModularInstance::new(vec![], 2, 0).is_err());
        assert!(IntervalInstance::new(vec![8], 8, 2, 0).is_err());
        assert!(IntervalInstance::new(vec![7], 8, 0, 0).is_err());
        assert!(IntervalInstance::new(vec![7, 1], 8, 2, 5).is_err());
    }

    #[test]
    fn fixture_json_shape() {
        let m: SubsetSumInstance = ModularInstance::new(vec![1, 2, 3], 2, 0).unwrap().into();
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json, serde_json::json!({"flavor": "mod", "weights": [1, 2, 3], "r": 2, "V": 0}));
        let i: SubsetSumInstance =
            serde_json::from_str(r#"{"flavor":"interval","weights":[3,5],"r":2,"B":8,"V":1}"#).unwrap();
        assert_eq!(i.k(), 2);
        assert_eq!(serde_json::from_value::<SubsetSumInstance>(json).unwrap(), m);
    }

    #[test]
    fn solver_names_round_trip() {
        for id in SolverId::ALL {
            assert_eq!(id.name().parse::<SolverId>().unwrap(), id);
        }
        assert!("grover".parse::<SolverId>().is_err());
    }

    #[test]
    fn tiny_budget_is_reported_distinctly() {
        let inst: SubsetSumInstance = ModularInstance::new(vec![5, 9, 12, 1, 7, 3, 11, 2, 6, 4], 9, 17).unwrap().into();
        let opts = SolveOptions { budget: Some(10), ..Default::default() };
        for solver in SolverId::ALL {
            assert!(matches!(solve(&inst, solver, &opts), Err(Error::BudgetExhausted { .. })), "{solver}");
        }
    }
}
