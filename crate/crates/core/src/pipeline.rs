//! Stage schedules and the driver that pushes elements through them.
//!
//! A schedule is a list of stages `(k, r, routine)`. Stage `i` consumes
//! `k_i` elements produced by stage `i - 1` (stage 0 draws fresh elements
//! from the instance) and gains about `r_i` bits per successful
//! invocation. Schedules are nominal: the driver clamps the last stages to
//! the bits the requested target actually needs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::combine::{self, IntervalStep, LabelView};
use crate::error::{Error, Result};
use crate::group_arith::{ceil_log2, two_adic_valuation};
use crate::instance::{HiddenShiftInstance, PhaseElement};
use crate::seeding::SimRng;
use crate::subset_sum::{SolveOptions, SolverId, MAX_K};

/// Largest `n` accepted by [`schedule_single`].
pub const MAX_SINGLE_N: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Routine {
    Pow2,
    Interval,
}

impl Routine {
    /// Bits gained by a stage of width `k`.
    pub fn bits_for(&self, k: usize) -> u32 {
        let k32 = k as u32;
        let r = match self {
            Routine::Pow2 => k32.saturating_sub(1),
            Routine::Interval => k32.saturating_sub(ceil_log2(k as u64)),
        };
        r.clamp(1, k32.saturating_sub(1).max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub k: usize,
    pub r: u32,
    pub routine: Routine,
}

/// How a schedule was derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Uniform,
    Improved,
    MinClass,
    QuadGap,
    MinQuery,
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => ScheduleKind::Uniform,
            "improved" => ScheduleKind::Improved,
            "minclass" => ScheduleKind::MinClass,
            "quadgap" => ScheduleKind::QuadGap,
            "minquery" => ScheduleKind::MinQuery,
            _ => {
                return Err(Error::Usage(format!(
                    "unknown strategy '{s}' (uniform, improved, minclass, quadgap, minquery)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub kind: ScheduleKind,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    /// Real-valued stage widths before rounding.
    pub formula_widths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub stages: Vec<Stage>,
    pub solver: SolverId,
    pub params: ScheduleParams,
}

impl Schedule {
    pub fn total_bits(&self) -> u32 {
        self.stages.iter().map(|s| s.r).sum()
    }

    pub fn with_solver(mut self, solver: SolverId) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.params.n;
        if self.stages.is_empty() && n > 1 {
            return Err(Error::InvalidSchedule("no stages".into()));
        }
        for (i, s) in self.stages.iter().enumerate() {
            if s.k < 2 || s.k > MAX_K {
                return Err(Error::InvalidSchedule(format!("stage {i}: k = {} outside [2, {MAX_K}]", s.k)));
            }
            if s.r == 0 || s.r as usize >= s.k {
                return Err(Error::InvalidSchedule(format!(
                    "stage {i}: need 1 <= r < k, got k = {}, r = {}",
                    s.k, s.r
                )));
            }
            if s.routine == Routine::Interval && s.r > Routine::Interval.bits_for(s.k) {
                return Err(Error::InvalidSchedule(format!(
                    "stage {i}: interval stages need r <= k - ceil(log2 k), got k = {}, r = {}",
                    s.k, s.r
                )));
            }
        }
        if self.total_bits() < n.saturating_sub(1) {
            return Err(Error::InvalidSchedule(format!(
                "stages gain {} bits, need {}",
                self.total_bits(),
                n.saturating_sub(1)
            )));
        }
        Ok(())
    }

    /// Human-readable table of the stages next to the formula widths.
    pub fn render(&self) -> String {
        let mut out = format!("# {:?} schedule, n = {}, solver = {}\n", self.params.kind, self.params.n, self.solver);
        if let Some(c) = self.params.c {
            out += &format!("# c = {c}");
            if let Some(a) = self.params.alpha {
                out += &format!(", alpha = {a:.4}");
            }
            if let Some(b) = self.params.beta {
                out += &format!(", beta = {b:.4}");
            }
            out.push('\n');
        }
        out += "stage  formula      k    r  routine\n";
        for (i, s) in self.stages.iter().enumerate() {
            let f = self.params.formula_widths.get(i).copied().unwrap_or(s.k as f64);
            out += &format!("{i:>5}  {f:>7.3}  {:>5}  {:>3}  {:?}\n", s.k, s.r, s.routine);
        }
        out += &format!("total bits: {}\n", self.total_bits());
        out
    }
}

fn params(kind: ScheduleKind, n: u32) -> ScheduleParams {
    ScheduleParams { kind, n, c: None, alpha: None, beta: None, formula_widths: Vec::new() }
}

/// `ceil((n-1)/r)` identical stages of width `k`.
pub fn schedule_uniform(n: u32, k: usize, routine: Routine) -> Result<Schedule> {
    if !(2..=30).contains(&k) {
        return Err(Error::InvalidSchedule(format!("uniform width k = {k} must lie in [2, 30]")));
    }
    let r = routine.bits_for(k);
    let m = n.saturating_sub(1).div_ceil(r) as usize;
    let mut p = params(ScheduleKind::Uniform, n);
    p.formula_widths = vec![k as f64; m];
    Ok(Schedule { stages: vec![Stage { k, r, routine }; m], solver: SolverId::Brute, params: p })
}

/// Uniform schedule at the width `sqrt(n log2 n / (2c))` that balances
/// queries against solver time.
pub fn schedule_improved(n: u32, c: f64, routine: Routine) -> Result<Schedule> {
    check_c(c)?;
    let width = (n as f64 * (n as f64).log2() / (2.0 * c)).sqrt();
    let k = (width.round() as usize).clamp(2, 30);
    let mut sched = schedule_uniform(n, k, routine)?;
    sched.params.kind = ScheduleKind::Improved;
    sched.params.c = Some(c);
    sched.params.formula_widths = vec![width; sched.stages.len()];
    Ok(sched)
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidSchedule(format!("solver exponent c = {c} must lie in (0, 1]")));
    }
    Ok(())
}

fn widths_until_covered(n: u32, routine: Routine, width: impl Fn(usize) -> f64) -> Result<(Vec<Stage>, Vec<f64>)> {
    let need = n.saturating_sub(1);
    let (mut stages, mut formula) = (Vec::new(), Vec::new());
    let mut bits = 0;
    let mut i = 1;
    while bits < need {
        let w = width(i);
        let k = (w.round() as usize).max(2);
        if k > MAX_K {
            return Err(Error::SizeGuard { what: "stage width", value: k as u64, limit: MAX_K as u64 });
        }
        let r = routine.bits_for(k);
        bits += r;
        stages.push(Stage { k, r, routine });
        formula.push(w);
        i += 1;
    }
    Ok((stages, formula))
}

/// Widths growing by `log2(n) / (2c)` per stage, so that every stage costs
/// about the same once its call count is taken into account.
pub fn schedule_increasing(n: u32, c: f64, routine: Routine) -> Result<Schedule> {
    check_c(c)?;
    let step = (n as f64).log2() / (2.0 * c);
    let (stages, formula) = widths_until_covered(n, routine, |i| i as f64 * step)?;
    let mut p = params(ScheduleKind::MinClass, n);
    p.c = Some(c);
    p.alpha = Some(step);
    p.formula_widths = formula;
    Ok(Schedule { stages, solver: SolverId::Brute, params: p })
}

/// Widths `i * log2(n)/(2c) + beta * sqrt(n log2 n)`. `beta = 0` is the
/// increasing schedule; `beta = 1/sqrt(3c)` gives the quadratic gap.
pub fn schedule_affine(n: u32, c: f64, beta: Option<f64>, routine: Routine) -> Result<Schedule> {
    check_c(c)?;
    let beta = beta.unwrap_or(1.0 / (3.0 * c).sqrt());
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidSchedule(format!("beta = {beta} must be non-negative")));
    }
    let step = (n as f64).log2() / (2.0 * c);
    let offset = beta * (n as f64 * (n as f64).log2()).sqrt();
    let (stages, formula) = widths_until_covered(n, routine, |i| i as f64 * step + offset)?;
    let mut p = params(ScheduleKind::QuadGap, n);
    p.c = Some(c);
    p.alpha = Some(step);
    p.beta = Some(beta);
    p.formula_widths = formula;
    Ok(Schedule { stages, solver: SolverId::Brute, params: p })
}

/// One combination that gains all `n - 1` bits at once.
pub fn schedule_single(n: u32, routine: Routine) -> Result<Schedule> {
    if n > MAX_SINGLE_N {
        return Err(Error::SizeGuard { what: "n", value: n as u64, limit: MAX_SINGLE_N as u64 });
    }
    let need = n.saturating_sub(1).max(1);
    let k = match routine {
        Routine::Pow2 => need as usize + 2,
        Routine::Interval => (need as usize + 1..).find(|&k| Routine::Interval.bits_for(k) >= need).unwrap_or(2),
    };
    let mut p = params(ScheduleKind::MinQuery, n);
    p.formula_widths = vec![k as f64];
    Ok(Schedule { stages: vec![Stage { k, r: need, routine }], solver: SolverId::Brute, params: p })
}

/// What the pipeline must output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// A label `(2a + 1) * 2^j` (for `N = 2^n`).
    Pow2Level(u32),
    /// A label that is `1` in the given view (for odd `N`).
    SmallOne(LabelView),
}

/// Per-stage accounting.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageCost {
    pub k: usize,
    pub r: u32,
    pub invocations: u64,
    pub successes: u64,
    pub projection_failures: u64,
    pub rejections: u64,
    pub consumed: u64,
    pub wasted: u64,
    pub solver_ops: u64,
    pub mem_peak: u64,
}

impl StageCost {
    pub fn success_rate(&self) -> f64 {
        if self.invocations == 0 {
            0.0
        } else {
            self.successes as f64 / self.invocations as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CostLedger {
    pub q_queries: u64,
    pub c_queries: u64,
    pub solver_ops: u64,
    pub mem_peak_cells: u64,
    pub elements_generated: u64,
    /// Inputs of failed invocations, in each stage's own input units, plus
    /// discarded final outputs.
    pub elements_wasted: u64,
    /// Final-stage outputs dropped for not being the requested target.
    pub targets_discarded: u64,
    /// Generated elements still sitting in pools at the end.
    pub leftovers: u64,
    pub wall_seconds: f64,
    pub stages: Vec<StageCost>,
}

impl CostLedger {
    /// Adds `other` into `self`; stage rows are matched by index.
    pub fn absorb(&mut self, other: &CostLedger) {
        self.q_queries += other.q_queries;
        self.c_queries += other.c_queries;
        self.solver_ops += other.solver_ops;
        self.mem_peak_cells = self.mem_peak_cells.max(other.mem_peak_cells);
        self.elements_generated += other.elements_generated;
        self.elements_wasted += other.elements_wasted;
        self.targets_discarded += other.targets_discarded;
        self.leftovers += other.leftovers;
        self.wall_seconds += other.wall_seconds;
        if self.stages.len() < other.stages.len() {
            self.stages.resize(other.stages.len(), StageCost::default());
        }
        for (mine, theirs) in self.stages.iter_mut().zip(&other.stages) {
            mine.k = mine.k.max(theirs.k);
            mine.r = mine.r.max(theirs.r);
            mine.invocations += theirs.invocations;
            mine.successes += theirs.successes;
            mine.projection_failures += theirs.projection_failures;
            mine.rejections += theirs.rejections;
            mine.consumed += theirs.consumed;
            mine.wasted += theirs.wasted;
            mine.solver_ops += theirs.solver_ops;
            mine.mem_peak = mine.mem_peak.max(theirs.mem_peak);
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub solve: SolveOptions,
    /// Invocations allowed per produced element are
    /// `retry_factor * ceil(k / p_prior)`.
    pub retry_factor: u64,
    pub p_prior: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { solve: SolveOptions::default(), retry_factor: 10, p_prior: 0.25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Pow2 { k: usize, r: u32, a: u32 },
    Interval { k: usize, step: IntervalStep },
}

impl Step {
    fn k(&self) -> usize {
        match self {
            Step::Pow2 { k, .. } | Step::Interval { k, .. } => *k,
        }
    }

    fn r(&self) -> u32 {
        match self {
            Step::Pow2 { r, .. } => *r,
            Step::Interval { step, .. } => step.r,
        }
    }
}

/// Keeps the surplus `k - r` of a stage when its bit gain is clamped.
fn clamped_width(stage: &Stage, r: u32) -> usize {
    (r as usize + (stage.k - stage.r as usize)).min(stage.k)
}

fn stage_at(sched: &Schedule, i: usize) -> Result<Stage> {
    sched.stages.get(i).or(sched.stages.last()).copied().ok_or_else(|| Error::InvalidSchedule("no stages".into()))
}

/// The concrete steps a schedule takes for a target. Later stages reuse
/// the last stage's parameters when the nominal ones fall short.
fn plan(sched: &Schedule, target: &Target, modulus: u64) -> Result<Vec<Step>> {
    let mut steps = Vec::new();
    match target {
        Target::Pow2Level(j) => {
            let mut a = 0;
            while a < *j {
                let stage = stage_at(sched, steps.len())?;
                if stage.routine != Routine::Pow2 {
                    return Err(Error::InvalidSchedule("power-of-two targets need pow2 stages".into()));
                }
                let r = stage.r.min(j - a);
                steps.push(Step::Pow2 { k: clamped_width(&stage, r), r, a });
                a += r;
            }
        }
        Target::SmallOne(_) => {
            // Inputs are folded into [0, (N+1)/2) before the first stage.
            let mut bound = modulus.div_ceil(2);
            while bound > 2 {
                let stage = stage_at(sched, steps.len())?;
                if stage.routine != Routine::Interval {
                    return Err(Error::InvalidSchedule("small-label targets need interval stages".into()));
                }
                // Largest r leaving an ancilla window of width >= 3.
                let r_last = (1..64).take_while(|r| 3u128 << (r - 1) <= bound as u128).last().unwrap_or(1);
                let step = if stage.r >= r_last {
                    IntervalStep { r: r_last, bound, bound_out: 2 }
                } else {
                    IntervalStep::halving(stage.r, bound)
                };
                steps.push(Step::Interval { k: clamped_width(&stage, step.r), step });
                bound = step.bound_out;
            }
        }
    }
    Ok(steps)
}

struct Driver<'a> {
    inst: &'a mut HiddenShiftInstance,
    steps: Vec<Step>,
    view: LabelView,
    fold: bool,
    solver: SolverId,
    cfg: &'a PipelineConfig,
    pools: Vec<Vec<PhaseElement>>,
    ledger: CostLedger,
}

impl Driver<'_> {
    fn budget(&self, k: usize) -> u64 {
        self.cfg.retry_factor.max(1) * (k as f64 / self.cfg.p_prior).ceil().max(1.0) as u64
    }

    fn fresh(&mut self) -> Result<PhaseElement> {
        let elem = self.inst.sample_element();
        self.ledger.elements_generated += 1;
        if self.fold && self.view.view(elem.label()) > self.inst.modulus().get() / 2 {
            return self.inst.negate(elem);
        }
        Ok(elem)
    }

    /// One element from the output pool of `level` (level 0 is fresh
    /// sampling), invoking the level's step as often as needed.
    fn pop(&mut self, level: usize, rng: &mut SimRng) -> Result<PhaseElement> {
        if level == 0 {
            return self.fresh();
        }
        if let Some(e) = self.pools[level].pop() {
            return Ok(e);
        }
        let step = self.steps[level - 1];
        let budget = self.budget(step.k());
        for _ in 0..budget {
            let mut inputs = Vec::with_capacity(step.k());
            for _ in 0..step.k() {
                inputs.push(self.pop(level - 1, rng)?);
            }
            let outcome = match step {
                Step::Pow2 { r, a, .. } => {
                    combine::combine_pow2(self.inst, inputs, r, a, self.solver, &self.cfg.solve, rng)?
                }
                Step::Interval { step: ref s, .. } => {
                    combine::combine_interval(self.inst, inputs, s, &self.view, self.solver, &self.cfg.solve, rng)?
                }
            };
            let cost = &mut self.ledger.stages[level - 1];
            cost.invocations += 1;
            cost.consumed += step.k() as u64;
            cost.solver_ops += outcome.solver_ops;
            cost.mem_peak = cost.mem_peak.max(outcome.mem_peak);
            match outcome.result {
                Ok(elem) => {
                    cost.successes += 1;
                    return Ok(elem);
                }
                Err(failure) => {
                    match failure {
                        combine::Failure::Projection => cost.projection_failures += 1,
                        combine::Failure::Rejected => cost.rejections += 1,
                    }
                    cost.wasted += step.k() as u64;
                }
            }
        }
        Err(Error::RetryExhausted { stage: level - 1, attempts: budget })
    }

    fn is_target(&self, elem: &PhaseElement, target: &Target) -> bool {
        match target {
            Target::Pow2Level(j) => two_adic_valuation(elem.label()) == *j,
            Target::SmallOne(view) => view.view(elem.label()) == 1,
        }
    }
}

/// Produces one target element and the cost of producing it.
pub fn run_pipeline(
    inst: &mut HiddenShiftInstance,
    sched: &Schedule,
    target: Target,
    cfg: &PipelineConfig,
    rng: &mut SimRng,
) -> Result<(PhaseElement, CostLedger)> {
    let start = Instant::now();
    let q0 = inst.q_queries();
    let c0 = inst.c_queries();
    let modulus = inst.modulus();
    let (view, fold) = match target {
        Target::Pow2Level(j) => {
            if !modulus.is_power_of_two() {
                return Err(Error::InvalidSchedule(format!("N = {} is not a power of two", modulus.get())));
            }
            if j >= modulus.bits().max(1) {
                return Err(Error::InvalidSchedule(format!("level {j} is out of range for N = {}", modulus.get())));
            }
            (LabelView::identity(modulus), false)
        }
        Target::SmallOne(view) => {
            if !modulus.is_odd() {
                return Err(Error::EvenModulus(modulus.get()));
            }
            (view, true)
        }
    };
    let steps = plan(sched, &target, modulus.get())?;
    let stages = steps.iter().map(|s| StageCost { k: s.k(), r: s.r(), ..Default::default() }).collect();
    let levels = steps.len();
    let mut driver = Driver {
        inst,
        steps,
        view,
        fold,
        solver: sched.solver,
        cfg,
        pools: (0..=levels).map(|_| Vec::new()).collect(),
        ledger: CostLedger { stages, ..Default::default() },
    };

    let last_k = driver.steps.last().map_or(1, |s| s.k());
    let budget = driver.budget(last_k);
    let mut found = None;
    for _ in 0..budget {
        let elem = driver.pop(levels, rng)?;
        if driver.is_target(&elem, &target) {
            found = Some(elem);
            break;
        }
        driver.ledger.targets_discarded += 1;
    }
    let mut ledger = driver.ledger;
    let elem = found.ok_or(Error::RetryExhausted { stage: levels, attempts: budget })?;
    ledger.elements_wasted = ledger.stages.iter().map(|s| s.wasted).sum::<u64>() + ledger.targets_discarded;
    ledger.leftovers = driver.pools.iter().map(|p| p.len() as u64).sum();
    ledger.solver_ops = ledger.stages.iter().map(|s| s.solver_ops).sum();
    ledger.mem_peak_cells = ledger.stages.iter().map(|s| s.mem_peak).max().unwrap_or(0);
    ledger.q_queries = driver.inst.q_queries() - q0;
    ledger.c_queries = driver.inst.c_queries() - c0;
    ledger.wall_seconds = start.elapsed().as_secs_f64();
    Ok((elem, ledger))
}

/// Pow2 target for the top level `n - 1`.
pub fn pow2_top(inst: &HiddenShiftInstance) -> Target {
    Target::Pow2Level(inst.modulus().bits().saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Secret;
    use crate::seeding::rng_for;

    fn widths(s: &Schedule) -> Vec<usize> {
        s.stages.iter().map(|st| st.k).collect()
    }

    #[test]
    fn uniform_schedules() {
        let s = schedule_uniform(16, 5, Routine::Pow2).unwrap();
        assert_eq!(s.stages.len(), 4);
        assert!(s.stages.iter().all(|st| st.r == 4));
        let s = schedule_uniform(16, 16, Routine::Pow2).unwrap();
        assert_eq!(s.stages.len(), 1);
        assert_eq!(s.stages[0].r, 15);
        assert!(schedule_uniform(16, 1, Routine::Pow2).is_err());
        let s = schedule_uniform(20, 8, Routine::Interval).unwrap();
        assert!(s.stages.iter().all(|st| st.r == 5));
        assert_eq!(s.stages.len(), 4);
        s.validate().unwrap();
    }

    #[test]
    fn increasing_schedules() {
        assert_eq!(widths(&schedule_increasing(16, 1.0, Routine::Pow2).unwrap()), vec![2, 4, 6, 8]);
        assert_eq!(widths(&schedule_increasing(16, 0.5, Routine::Pow2).unwrap()), vec![4, 8, 12]);
        for n in 2..40 {
            for c in [0.226, 0.291, 0.5, 0.72, 1.0] {
                let s = schedule_increasing(n, c, Routine::Pow2).unwrap();
                assert!(s.total_bits() >= n - 1);
                s.validate().unwrap();
            }
        }
        assert!(schedule_increasing(16, 0.0, Routine::Pow2).is_err());
    }

    #[test]
    fn affine_schedules() {
        let a = schedule_affine(24, 0.5, Some(0.0), Routine::Pow2).unwrap();
        let b = schedule_increasing(24, 0.5, Routine::Pow2).unwrap();
        assert_eq!(a.stages, b.stages);
        let big = schedule_affine(24, 0.5, Some(3.0), Routine::Pow2).unwrap();
        assert_eq!(big.stages.len(), 1);
        let q = schedule_affine(25, 1.0, None, Routine::Pow2).unwrap();
        assert!((q.params.beta.unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_schedules() {
        let s = schedule_single(12, Routine::Pow2).unwrap();
        assert_eq!(s.stages, vec![Stage { k: 13, r: 11, routine: Routine::Pow2 }]);
        assert!(matches!(schedule_single(31, Routine::Pow2), Err(Error::SizeGuard { .. })));
        let s = schedule_single(4, Routine::Interval).unwrap();
        s.validate().unwrap();
    }

    #[test]
    fn schedule_json() {
        let s = schedule_uniform(16, 5, Routine::Pow2).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["stages"][0], serde_json::json!({"k": 5, "r": 4, "routine": "pow2"}));
        assert_eq!(v["solver"], "brute");
        let back: Schedule = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn plan_clamps_to_the_target() {
        let s = schedule_uniform(16, 5, Routine::Pow2).unwrap();
        let steps = plan(&s, &Target::Pow2Level(15), 1 << 16).unwrap();
        let rs: Vec<u32> = steps.iter().map(|s| s.r()).collect();
        assert_eq!(rs, vec![4, 4, 4, 3]);
        let steps = plan(&s, &Target::Pow2Level(2), 1 << 16).unwrap();
        assert_eq!(steps, vec![Step::Pow2 { k: 3, r: 2, a: 0 }]);
        assert!(plan(&s, &Target::Pow2Level(0), 1 << 16).unwrap().is_empty());
    }

    #[test]
    fn pow2_runs_reach_the_top() {
        let sched = schedule_uniform(8, 4, Routine::Pow2).unwrap();
        for seed in 0..20 {
            let mut inst = HiddenShiftInstance::new(256, Secret::Random, seed).unwrap();
            let mut rng = rng_for(seed, "pipeline", 0);
            let target = pow2_top(&inst);
            let (elem, ledger) = run_pipeline(&mut inst, &sched, target, &PipelineConfig::default(), &mut rng).unwrap();
            assert_eq!(elem.label(), 128);
            assert_eq!(ledger.q_queries, inst.q_queries());
            assert_eq!(ledger.q_queries, ledger.elements_generated);
            let consumed: u64 = ledger.stages[0].consumed;
            assert_eq!(consumed + ledger.leftovers, ledger.elements_generated);
        }
    }

    #[test]
    fn small_one_runs() {
        let sched = schedule_uniform(20, 8, Routine::Interval).unwrap();
        for (n, seed) in [(3u64, 1u64), (5, 2), (1_000_003, 3)] {
            let mut inst = HiddenShiftInstance::new(n, Secret::Random, seed).unwrap();
            let mut rng = rng_for(seed, "pipeline", 0);
            let view = LabelView::identity(inst.modulus());
            let (elem, _) =
                run_pipeline(&mut inst, &sched, Target::SmallOne(view), &PipelineConfig::default(), &mut rng).unwrap();
            assert_eq!(elem.label(), 1);
        }
    }

    #[test]
    fn wrong_targets_are_refused() {
        let sched = schedule_uniform(8, 4, Routine::Pow2).unwrap();
        let mut inst = HiddenShiftInstance::new(255, Secret::Random, 0).unwrap();
        let mut rng = rng_for(0, "pipeline", 0);
        assert!(run_pipeline(&mut inst, &sched, Target::Pow2Level(3), &PipelineConfig::default(), &mut rng).is_err());
    }
}
