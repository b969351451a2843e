//! Label-level combination and projection routines.
//!
//! A combination takes `k` phase elements, measures a classical function of
//! the subset register `|j>`, and keeps two of the surviving basis states.
//! The measured value is sampled by drawing `j*` uniformly and evaluating
//! the function at `j*`: all `2^k` amplitudes have equal modulus, so this
//! has exactly the distribution of the physical measurement. The full
//! preimage set comes from a subset-sum solver.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_arith::{inv_pow2_mod, pow_mod, Modulus};
use crate::instance::{HiddenShiftInstance, PhaseElement};
use crate::phase_sim::AncillaBranch;
use crate::subset_sum::{self, eval_sum, IntervalInstance, ModularInstance, SolveOptions, SolverId, SubsetSumInstance};

/// The classical function measured into the ancilla register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AncillaMap {
    /// `(sum mod 2^(shift+bits)) >> shift`.
    Pow2 { shift: u32, bits: u32 },
    /// `floor(sum * 2^(r-1) / bound)`.
    Interval { r: u32, bound: u64 },
}

impl AncillaMap {
    pub fn eval(&self, sum: u128) -> u64 {
        match *self {
            AncillaMap::Pow2 { shift, bits } => ((sum >> shift) & ((1u128 << bits) - 1)) as u64,
            AncillaMap::Interval { r, bound } => ((sum << (r - 1)) / bound as u128) as u64,
        }
    }
}

/// Why a combination produced no element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    /// The projection chain ended on a singleton.
    Projection,
    /// The output was dropped by rejection sampling.
    Rejected,
}

#[derive(Debug)]
pub struct CombineOutcome {
    pub result: std::result::Result<PhaseElement, Failure>,
    pub v_measured: u64,
    pub support_size: usize,
    pub pair: Option<(u64, u64)>,
    pub solver_ops: u64,
    pub mem_peak: u64,
}

impl CombineOutcome {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }
}

/// Simulates repeated two-outcome projections on the sorted support `j`.
///
/// Each attempt keeps the next untried pair with probability `2/m` and
/// otherwise removes it, so the chain fails exactly when one element is
/// left: with probability `1/|J|` for odd `|J|` and never for even `|J|`.
pub fn project_pair<R: Rng + ?Sized>(support: &[u64], rng: &mut R) -> Option<(u64, u64)> {
    assert!(!support.is_empty(), "projection needs a non-empty support");
    let mut m = support.len();
    let mut next = 0;
    while m >= 2 {
        if rng.gen_bool(2.0 / m as f64) {
            return Some((support[next], support[next + 1]));
        }
        next += 2;
        m -= 2;
    }
    None
}

/// `sum_i (j2_i - j1_i) * w_i`.
fn pair_difference(weights: &[u64], pair: (u64, u64)) -> i128 {
    eval_sum(weights, pair.1) - eval_sum(weights, pair.0)
}

fn check_inputs(inst: &HiddenShiftInstance, elems: &[PhaseElement]) -> Result<()> {
    if elems.is_empty() || elems.len() > subset_sum::MAX_K {
        return Err(Error::InvalidInstance(format!("k = {} must lie in [1, {}]", elems.len(), subset_sum::MAX_K)));
    }
    elems.iter().try_for_each(|e| inst.check_owner(e))
}

fn solve_with<R: Rng + ?Sized>(
    inst: &SubsetSumInstance,
    solver: SolverId,
    opts: &SolveOptions,
    rng: &mut R,
) -> Result<subset_sum::SolutionSet> {
    let opts = SolveOptions { seed: rng.gen(), ..opts.clone() };
    subset_sum::solve(inst, solver, &opts)
}

/// Combination for powers of two: every input label is divisible by `2^a`
/// and a successful output is divisible by `2^(a+r)`.
///
/// Consumes all inputs whatever the outcome.
pub fn combine_pow2<R: Rng + ?Sized>(
    inst: &HiddenShiftInstance,
    elems: Vec<PhaseElement>,
    r: u32,
    a: u32,
    solver: SolverId,
    opts: &SolveOptions,
    rng: &mut R,
) -> Result<CombineOutcome> {
    check_inputs(inst, &elems)?;
    let k = elems.len();
    if r == 0 || r as usize >= k || r > subset_sum::MAX_R {
        return Err(Error::InvalidInstance(format!("r = {r} must lie in [1, k - 1] for k = {k}")));
    }
    if let Some(e) = elems.iter().find(|e| e.label() % (1u64 << a.min(63)) != 0) {
        return Err(Error::WrongLabels(format!("label {} is not divisible by 2^{a}", e.label())));
    }
    let mask = (1u64 << r) - 1;
    let weights: Vec<u64> = elems.iter().map(|e| (e.label() >> a) & mask).collect();
    let j_star = rng.gen::<u64>() & subset_sum::low_mask(k as u32);
    let v = (eval_sum(&weights, j_star) as u64) & mask;

    let ss = SubsetSumInstance::Modular(ModularInstance::new(weights, r, v)?);
    let set = solve_with(&ss, solver, opts, rng)?;
    debug_assert!(set.solutions.binary_search(&j_star).is_ok());

    let labels: Vec<u64> = elems.iter().map(|e| e.label()).collect();
    drop(elems);
    let pair = project_pair(&set.solutions, rng);
    let result = match pair {
        Some(p) => Ok(inst.mint(inst.modulus().reduce_signed(pair_difference(&labels, p)))),
        None => Err(Failure::Projection),
    };
    Ok(CombineOutcome {
        result,
        v_measured: v,
        support_size: set.len(),
        pair,
        solver_ops: set.op_count,
        mem_peak: set.mem_peak,
    })
}

/// A rescaled view of the labels of one instance: the view label of an
/// element is `to_view * label mod N`, and view label `d` belongs to the
/// true label `from_view * d mod N`.
///
/// Working in the view with multiplier `2^-j` turns "reach label 1" into
/// "reach label `2^j`".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelView {
    modulus: Modulus,
    to_view: u64,
    from_view: u64,
}

impl LabelView {
    pub fn identity(modulus: Modulus) -> Self {
        LabelView { modulus, to_view: 1, from_view: 1 }
    }

    /// Multiplier `2^-j`; needs odd `N`.
    pub fn scaled_by_inverse_pow2(j: u32, modulus: Modulus) -> Result<Self> {
        Ok(LabelView { modulus, to_view: inv_pow2_mod(j, &modulus)?, from_view: pow_mod(2, j as u64, &modulus) })
    }

    pub fn view(&self, label: u64) -> u64 {
        crate::group_arith::mul_mod(self.to_view, label, &self.modulus)
    }

    pub fn unview(&self, view_label: u64) -> u64 {
        crate::group_arith::mul_mod(self.from_view, self.modulus.reduce(view_label), &self.modulus)
    }
}

/// Parameters of one interval combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntervalStep {
    /// Shrink parameter of the ancilla map.
    pub r: u32,
    /// Every input view label lies in `[0, bound)`.
    pub bound: u64,
    /// Accepted outputs are uniform on `[0, bound_out)`.
    pub bound_out: u64,
}

impl IntervalStep {
    /// The default output bound `floor(B / 2^r)`, half the ancilla window.
    pub fn halving(r: u32, bound: u64) -> Self {
        IntervalStep { r, bound, bound_out: (bound >> r).max(1) }
    }
}

/// Rejection step that turns the triangular law of `|S1 - S2|` for two
/// sums in a window of width `w` into a uniform law on `[0, b)`.
pub fn acceptance_probability(d: u64, width: u64, b: u64) -> f64 {
    if d >= b || b > width {
        return 0.0;
    }
    let (w, b, d) = (width as f64, b as f64, d as f64);
    if d == 0.0 {
        (2.0 * (w - b) / w).min(1.0)
    } else {
        (w - b) / (w - d)
    }
}

/// Combination for small labels: inputs lie in `[0, B)` in the given view,
/// the raw output `|(j2 - j1) . l|` lies below the ancilla window width
/// `~B / 2^(r-1)`, and rejection sampling keeps it uniform on
/// `[0, bound_out)`.
///
/// Consumes all inputs whatever the outcome.
#[allow(clippy::too_many_arguments)]
pub fn combine_interval<R: Rng + ?Sized>(
    inst: &HiddenShiftInstance,
    elems: Vec<PhaseElement>,
    step: &IntervalStep,
    view: &LabelView,
    solver: SolverId,
    opts: &SolveOptions,
    rng: &mut R,
) -> Result<CombineOutcome> {
    check_inputs(inst, &elems)?;
    let labels: Vec<u64> = elems.iter().map(|e| view.view(e.label())).collect();
    drop(elems);
    if let Some(l) = labels.iter().find(|&&l| l >= step.bound) {
        return Err(Error::WrongLabels(format!("view label {l} is not below B = {}", step.bound)));
    }
    let j_star = rng.gen::<u64>() & subset_sum::low_mask(labels.len() as u32);
    let map = AncillaMap::Interval { r: step.r, bound: step.bound };
    let v = map.eval(eval_sum(&labels, j_star) as u128);

    let interval = IntervalInstance::new(labels.clone(), step.bound, step.r, v)?;
    let (lo, hi) = interval.sum_window();
    let ss = SubsetSumInstance::Interval(interval);
    let set = solve_with(&ss, solver, opts, rng)?;
    debug_assert!(set.solutions.binary_search(&j_star).is_ok());

    let pair = project_pair(&set.solutions, rng);
    let result = match pair {
        None => Err(Failure::Projection),
        Some(p) => {
            // A negative difference is the same state with the pair swapped.
            let d = pair_difference(&labels, p).unsigned_abs() as u64;
            if rng.gen_bool(acceptance_probability(d, (hi - lo) as u64, step.bound_out)) {
                Ok(inst.mint(view.unview(d)))
            } else {
                Err(Failure::Rejected)
            }
        }
    };
    Ok(CombineOutcome {
        result,
        v_measured: v,
        support_size: set.len(),
        pair,
        solver_ops: set.op_count,
        mem_peak: set.mem_peak,
    })
}

/// The `(V, J)` law computed from preimage sets: `P(V) = |J_V| / 2^k`, with
/// `J_V` found by the chosen solver for every reachable `V`.
pub fn label_level_distribution(
    labels: &[u64],
    map: &AncillaMap,
    solver: SolverId,
    opts: &SolveOptions,
) -> Result<BTreeMap<u64, AncillaBranch>> {
    let k = labels.len();
    let total = (1u64 << k) as f64;
    let values: Box<dyn Iterator<Item = u64>> = match *map {
        AncillaMap::Pow2 { bits, .. } => Box::new(0..(1u64 << bits)),
        AncillaMap::Interval { r, .. } => Box::new(0..=((k as u64) << (r - 1))),
    };
    let mut dist = BTreeMap::new();
    for v in values {
        let inst = match *map {
            AncillaMap::Pow2 { shift, bits } => {
                let mask = (1u64 << bits) - 1;
                let weights = labels.iter().map(|l| (l >> shift) & mask).collect();
                SubsetSumInstance::Modular(ModularInstance::new(weights, bits, v)?)
            }
            AncillaMap::Interval { r, bound } => {
                SubsetSumInstance::Interval(IntervalInstance::new(labels.to_vec(), bound, r, v)?)
            }
        };
        let set = subset_sum::solve(&inst, solver, opts)?;
        if !set.is_empty() {
            dist.insert(v, AncillaBranch { prob: set.len() as f64 / total, preimages: set.solutions });
        }
    }
    Ok(dist)
}

/// Largest difference between two outcome laws, in total variation.
pub fn total_variation(a: &BTreeMap<u64, AncillaBranch>, b: &BTreeMap<u64, AncillaBranch>) -> f64 {
    let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
    let p = |m: &BTreeMap<u64, AncillaBranch>, k: u64| m.get(&k).map_or(0.0, |x| x.prob);
    keys.into_iter().map(|k| (p(a, k) - p(b, k)).abs()).sum::<f64>() / 2.0
}
