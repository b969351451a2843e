//! Memoryless collision search.
//!
//! The weights are split into a left part of `k1` positions and a right part
//! of `k2` positions. The domain is the disjoint union of `{0,1}^k1` (side 0)
//! and `{0,1}^k2` (side 1). Side 0 maps `u` to a key of `a(u) = sum_L(u)`,
//! side 1 maps `v` to a key of `c(v) = target - sum_R(v)`, and a keyed hash
//! sends the key back into the domain. A cross-side collision of the keys
//! is a candidate solution, found by Floyd cycle detection in constant
//! memory.
//!
//! Keys are `a mod 2^r` for modular instances. For interval instances with
//! window width `w` they are `floor(a / w)` against `floor(c / w)` in one
//! pass and `floor(c / w) + 1` in the other, which together cover every
//! `a` in `[c, c + w)`. Candidates are checked by full evaluation.
//!
//! Each run uses a fresh hash and start point and yields at most one
//! collision. Rounds of runs repeat until the found set has not changed for
//! `stable_rounds` consecutive rounds.

use std::collections::BTreeSet;

use rand::Rng;

use super::list::OpCounter;
use super::{eval_sum, low_mask, SolutionSet, SubsetSumInstance};
use crate::error::Result;
use crate::seeding::{self, splitmix64};

#[derive(Debug, Clone, PartialEq)]
pub struct MemlessParams {
    pub stable_rounds: u32,
    /// Runs per round, as a multiple of the domain size times the expected
    /// number of solutions plus one.
    pub runs_per_round_factor: f64,
    pub max_rounds: u32,
}

impl Default for MemlessParams {
    fn default() -> Self {
        MemlessParams { stable_rounds: 3, runs_per_round_factor: 1.0, max_rounds: 64 }
    }
}

struct Walk<'a> {
    inst: &'a SubsetSumInstance,
    k1: usize,
    left_size: u64,
    size: u64,
    offset: i128,
    width: i128,
    hash_seed: u64,
}

impl Walk<'_> {
    fn split(&self, point: u64) -> (bool, u64) {
        if point < self.left_size {
            (false, point)
        } else {
            (true, point - self.left_size)
        }
    }

    /// The collision key of a domain point.
    fn key(&self, point: u64) -> i128 {
        let w = self.inst.weights();
        let (right, bits) = self.split(point);
        match self.inst {
            SubsetSumInstance::Modular(m) => {
                let mask = (1i128 << m.r) - 1;
                if right {
                    (m.target as i128 - eval_sum(w, bits << self.k1)) & mask
                } else {
                    eval_sum(w, bits) & mask
                }
            }
            SubsetSumInstance::Interval(i) => {
                let (lo, _) = i.sum_window();
                if right {
                    (lo - eval_sum(w, bits << self.k1) + self.offset).div_euclid(self.width)
                } else {
                    eval_sum(w, bits).div_euclid(self.width)
                }
            }
        }
    }

    fn step(&self, point: u64, ops: &mut OpCounter) -> Result<u64> {
        ops.charge(1)?;
        let key = self.key(point);
        let h = splitmix64(self.hash_seed ^ splitmix64(key as u64) ^ splitmix64((key >> 64) as u64).rotate_left(23));
        Ok(((h as u128 * self.size as u128) >> 64) as u64)
    }

    /// Two distinct points with equal images, or `None` if the start lies on
    /// its own cycle.
    fn find_collision(&self, start: u64, ops: &mut OpCounter) -> Result<Option<(u64, u64)>> {
        let mut tortoise = self.step(start, ops)?;
        let mut hare = self.step(tortoise, ops)?;
        while tortoise != hare {
            tortoise = self.step(tortoise, ops)?;
            hare = self.step(self.step(hare, ops)?, ops)?;
        }
        let mut t = start;
        let mut h = hare;
        if t == h {
            return Ok(None);
        }
        loop {
            let (nt, nh) = (self.step(t, ops)?, self.step(h, ops)?);
            if nt == nh {
                return Ok(Some((t, h)));
            }
            t = nt;
            h = nh;
        }
    }

    fn candidate(&self, p: u64, q: u64) -> Option<u64> {
        let (a, b) = (self.split(p), self.split(q));
        match (a, b) {
            ((false, u), (true, v)) | ((true, v), (false, u)) => Some(u | v << self.k1),
            _ => None,
        }
    }
}

pub fn solve_memoryless(
    inst: &SubsetSumInstance,
    params: &MemlessParams,
    seed: u64,
    ops: &mut OpCounter,
) -> Result<SolutionSet> {
    let k = inst.k();
    let k1 = k / 2;
    let k2 = k - k1;
    let left_size = 1u64 << k1;
    let size = left_size + (1u64 << k2);
    let width = match inst {
        SubsetSumInstance::Modular(_) => 1,
        SubsetSumInstance::Interval(i) => {
            let (lo, hi) = i.sum_window();
            (hi - lo).max(1)
        }
    };
    let offsets: &[i128] = match inst {
        SubsetSumInstance::Modular(_) => &[0],
        SubsetSumInstance::Interval(_) => &[0, width],
    };
    let key_space = match inst {
        SubsetSumInstance::Modular(m) => 2f64.powi(m.r as i32),
        SubsetSumInstance::Interval(_) => inst.weights().iter().sum::<u64>() as f64 / width as f64 + 1.0,
    };
    let expected_solutions = 2f64.powi(k as i32) / key_space;
    let runs_per_round =
        ((params.runs_per_round_factor * size as f64 * (expected_solutions + 1.0)).ceil() as u64).max(1);
    ops.observe_mem(2 * k as u64 + 8);

    let mut found = BTreeSet::new();
    let mut stable = 0;
    let mut rounds = 0;
    while rounds < params.max_rounds.max(1) {
        let mut rng = seeding::rng_for(seed, "memless-round", rounds as u64);
        let before = found.len();
        for run in 0..runs_per_round {
            let walk = Walk {
                inst,
                k1,
                left_size,
                size,
                offset: offsets[run as usize % offsets.len()],
                width,
                hash_seed: rng.gen(),
            };
            let start = rng.gen_range(0..size);
            if let Some((p, q)) = walk.find_collision(start, ops)? {
                if let Some(x) = walk.candidate(p, q) {
                    if x & !low_mask(k as u32) == 0 && inst.is_solution(x) {
                        found.insert(x);
                    }
                }
            }
        }
        rounds += 1;
        stable = if found.len() > before { 0 } else { stable + 1 };
        if stable >= params.stable_rounds {
            break;
        }
    }
    Ok(SolutionSet::from_parts(found.into_iter().collect(), ops, rounds))
}
