//! Partial-sum lists and the sorted-list join shared by every list-merging
//! solver.
//!
//! A [`PartialSum`] is a digit vector over `{-1, 0, 1}` (stored as two bit
//! masks) together with its exact weighted sum. Plain splits only ever use
//! the `plus` mask.

use std::cmp::Ordering;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialSum {
    pub value: i128,
    pub plus: u64,
    pub minus: u64,
}

impl PartialSum {
    pub const EMPTY: PartialSum = PartialSum { value: 0, plus: 0, minus: 0 };

    #[inline]
    pub fn ones(&self) -> u32 {
        self.plus.count_ones()
    }

    #[inline]
    pub fn minus_ones(&self) -> u32 {
        self.minus.count_ones()
    }

    /// Digit-wise sum, or `None` when some position would leave `{-1,0,1}`.
    #[inline]
    pub fn combine(&self, other: &PartialSum) -> Option<PartialSum> {
        if self.plus & other.plus != 0 || self.minus & other.minus != 0 {
            return None;
        }
        let plus = self.plus | other.plus;
        let minus = self.minus | other.minus;
        Some(PartialSum { value: self.value + other.value, plus: plus & !minus, minus: minus & !plus })
    }
}

/// `v` belongs iff `(v - lo) mod modulus < width`, a cyclic window of
/// residues. A width of at least `modulus` admits everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueWindow {
    pub modulus: i128,
    pub lo: i128,
    pub width: i128,
}

impl ResidueWindow {
    pub fn new(modulus: i128, lo: i128, width: i128) -> Self {
        assert!(modulus >= 1 && width >= 1);
        ResidueWindow { modulus, lo: lo.rem_euclid(modulus), width: width.min(modulus) }
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.width >= self.modulus
    }

    #[inline]
    pub fn contains(&self, v: i128) -> bool {
        self.is_full() || (v - self.lo).rem_euclid(self.modulus) < self.width
    }
}

/// Condition on the sum of two joined entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinConstraint {
    Any,
    Residue(ResidueWindow),
    /// `lo <= sum < hi`.
    Range {
        lo: i128,
        hi: i128,
    },
}

impl JoinConstraint {
    pub fn residue(modulus: i128, lo: i128, width: i128) -> Self {
        let w = ResidueWindow::new(modulus, lo, width);
        if w.is_full() {
            JoinConstraint::Any
        } else {
            JoinConstraint::Residue(w)
        }
    }

    #[inline]
    pub fn contains(&self, v: i128) -> bool {
        match self {
            JoinConstraint::Any => true,
            JoinConstraint::Residue(w) => w.contains(v),
            JoinConstraint::Range { lo, hi } => *lo <= v && v < *hi,
        }
    }

    /// Constraint on `z` that is necessary for `y + z` to satisfy `self`
    /// when `y mod modulus` lies in `[class_lo, class_lo + class_width)`.
    ///
    /// For a residue constraint, `modulus` must divide its modulus.
    pub fn sibling(&self, modulus: i128, class_lo: i128, class_width: i128) -> JoinConstraint {
        let (lo, width) = match *self {
            JoinConstraint::Any => return JoinConstraint::Any,
            JoinConstraint::Residue(w) => {
                assert_eq!(w.modulus % modulus, 0, "sibling modulus must divide the parent modulus");
                (w.lo, w.width)
            }
            JoinConstraint::Range { lo, hi } => (lo, (hi - lo).max(1)),
        };
        JoinConstraint::residue(modulus, lo - class_lo - class_width + 1, width + class_width - 1)
    }
}

/// Operation and memory accounting with an optional budget.
#[derive(Debug, Clone, Default)]
pub struct OpCounter {
    spent: u64,
    budget: Option<u64>,
    mem_peak: u64,
}

impl OpCounter {
    pub fn new(budget: Option<u64>) -> Self {
        OpCounter { spent: 0, budget, mem_peak: 0 }
    }

    #[inline]
    pub fn charge(&mut self, ops: u64) -> Result<()> {
        self.spent = self.spent.saturating_add(ops);
        match self.budget {
            Some(budget) if self.spent > budget => Err(Error::BudgetExhausted { budget, spent: self.spent }),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn observe_mem(&mut self, cells: u64) {
        self.mem_peak = self.mem_peak.max(cells);
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    pub fn mem_peak(&self) -> u64 {
        self.mem_peak
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialSumList {
    pub entries: Vec<PartialSum>,
}

impl PartialSumList {
    pub fn new(entries: Vec<PartialSum>) -> Self {
        PartialSumList { entries }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts by value and drops repeated digit vectors.
    pub fn dedup(&mut self) {
        self.entries.sort_unstable_by_key(|e| (e.plus, e.minus));
        self.entries.dedup_by(|a, b| a.plus == b.plus && a.minus == b.minus);
    }

    /// All subset sums over `positions`, as plain `{0,1}` vectors.
    pub fn subset_sums(weights: &[u64], positions: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(1 << positions.len());
        entries.push(PartialSum::EMPTY);
        for &p in positions {
            let w = weights[p] as i128;
            for i in 0..entries.len() {
                let e: PartialSum = entries[i];
                entries.push(PartialSum { value: e.value + w, plus: e.plus | (1 << p), minus: 0 });
            }
        }
        PartialSumList { entries }
    }

    /// All `{-1,0,1}` vectors over `positions` with at most `max_plus` ones
    /// and at most `max_minus` minus-ones.
    pub fn signed_sums(weights: &[u64], positions: &[usize], max_plus: u32, max_minus: u32) -> Self {
        let mut entries = vec![PartialSum::EMPTY];
        for &p in positions {
            let w = weights[p] as i128;
            let bit = 1u64 << p;
            for i in 0..entries.len() {
                let e = entries[i];
                if e.ones() < max_plus {
                    entries.push(PartialSum { value: e.value + w, plus: e.plus | bit, minus: e.minus });
                }
                if e.minus_ones() < max_minus {
                    entries.push(PartialSum { value: e.value - w, plus: e.plus, minus: e.minus | bit });
                }
            }
        }
        PartialSumList { entries }
    }
}

fn log2_ceil(n: usize) -> u64 {
    (usize::BITS - n.max(1).saturating_sub(1).leading_zeros()).max(1) as u64
}

/// All pairs `(a, b)` with `a.value + b.value` satisfying `constraint`,
/// whose digit vectors combine within `{-1,0,1}` and pass `accept`.
///
/// `a` is sorted by the constraint key and each entry of `b` looks up its
/// matching range by binary search. Charges `|A| log|A| + |B| log|A|` plus
/// one operation per examined candidate pair.
pub fn merge_join(
    a: &PartialSumList,
    b: &PartialSumList,
    constraint: &JoinConstraint,
    accept: impl Fn(&PartialSum) -> bool,
    ops: &mut OpCounter,
) -> Result<PartialSumList> {
    let mut out = Vec::new();
    if a.is_empty() || b.is_empty() {
        return Ok(PartialSumList::new(out));
    }
    let lg = log2_ceil(a.len());
    ops.charge((a.len() as u64 + b.len() as u64) * lg)?;

    let mut examined = 0u64;
    let mut emit = |x: &PartialSum, y: &PartialSum, out: &mut Vec<PartialSum>| {
        examined += 1;
        if let Some(c) = x.combine(y) {
            if accept(&c) {
                out.push(c);
            }
        }
    };

    match constraint {
        JoinConstraint::Any => {
            for y in &b.entries {
                for x in &a.entries {
                    emit(x, y, &mut out);
                }
            }
        }
        JoinConstraint::Residue(w) => {
            let m = w.modulus;
            let mut keyed: Vec<(i128, PartialSum)> = a.entries.iter().map(|e| (e.value.rem_euclid(m), *e)).collect();
            keyed.sort_unstable_by_key(|p| p.0);
            let scan = |from: i128,
                        to: i128,
                        y: &PartialSum,
                        out: &mut Vec<PartialSum>,
                        emit: &mut dyn FnMut(&PartialSum, &PartialSum, &mut Vec<PartialSum>)| {
                let start = keyed.partition_point(|p| p.0 < from);
                for (k, x) in &keyed[start..] {
                    if *k >= to {
                        break;
                    }
                    emit(x, y, out);
                }
            };
            for y in &b.entries {
                let start = (w.lo - y.value).rem_euclid(m);
                let end = start + w.width;
                if end <= m {
                    scan(start, end, y, &mut out, &mut emit);
                } else {
                    scan(start, m, y, &mut out, &mut emit);
                    scan(0, end - m, y, &mut out, &mut emit);
                }
            }
        }
        JoinConstraint::Range { lo, hi } => {
            let mut sorted = a.entries.clone();
            sorted.sort_unstable_by_key(|p| p.value);
            for y in &b.entries {
                let from = lo - y.value;
                let to = hi - y.value;
                let start = sorted.partition_point(|p| p.value < from);
                for x in &sorted[start..] {
                    if x.value >= to {
                        break;
                    }
                    emit(x, y, &mut out);
                }
            }
        }
    }
    ops.charge(examined)?;
    Ok(PartialSumList::new(out))
}

/// Orders entries by their digit vectors; used to compare outputs.
pub fn canonical_order(a: &PartialSum, b: &PartialSum) -> Ordering {
    (a.plus, a.minus).cmp(&(b.plus, b.minus))
}
