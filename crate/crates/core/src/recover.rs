//! From target elements to the hidden shift.
//!
//! For `N = 2^n` one bit is read per level: an element with label
//! `(2a+1) * 2^j` has phase `(2a+1) * s / 2^(n-j)`, so once the low
//! `n-1-j` bits of `s` are known the remaining phase is `b/2` with `b` the
//! next bit.
//!
//! For odd `N` the pipeline builds `psi_(2^j)` for `j < n` in a view
//! rescaled by `2^-j`, and a semiclassical inverse QFT over those `n`
//! qubits samples an estimate of `s * 2^n / N`.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::combine::LabelView;
use crate::error::{Error, Result};
use crate::group_arith::{ceil_log2, pow_mod, Modulus};
use crate::instance::{HiddenShiftInstance, PhaseElement};
use crate::phase_sim::{measure_with_correction, Turns};
use crate::pipeline::{run_pipeline, CostLedger, PipelineConfig, Schedule, Target};
use crate::seeding::SimRng;

/// Largest qubit count for [`iqft_distribution_direct`].
pub const MAX_DIRECT_QUBITS: u32 = 12;
/// Largest qubit count for the closed-form and path-enumeration laws.
pub const MAX_EXACT_QUBITS: u32 = 24;

#[derive(Debug, Clone)]
pub struct RecoverConfig {
    pub pipeline: PipelineConfig,
    pub verify_trials: u32,
    pub max_attempts: u32,
    /// Extra qubits beyond `ceil(log2 N)` for odd `N`.
    pub guard_bits: u32,
}

impl Default for RecoverConfig {
    fn default() -> Self {
        RecoverConfig { pipeline: PipelineConfig::default(), verify_trials: 16, max_attempts: 8, guard_bits: 2 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Recovery {
    pub s: u64,
    pub verified: bool,
    pub attempts: u32,
    pub ledger: CostLedger,
}

/// Recovers `s` for `N = 2^n`, one bit per pipeline run.
pub fn recover_pow2(
    inst: &mut HiddenShiftInstance,
    sched: &Schedule,
    cfg: &RecoverConfig,
    rng: &mut SimRng,
) -> Result<Recovery> {
    let m = inst.modulus();
    if !m.is_power_of_two() {
        return Err(Error::InvalidSchedule(format!("N = {} is not a power of two", m.get())));
    }
    let n = m.bits();
    let mut ledger = CostLedger::default();
    for attempt in 1..=cfg.max_attempts.max(1) {
        let mut s_low = 0u64;
        for i in 0..n {
            let j = n - 1 - i;
            let (elem, cost) = run_pipeline(inst, sched, Target::Pow2Level(j), &cfg.pipeline, rng)?;
            ledger.absorb(&cost);
            let odd = elem.label() >> j;
            let correction = Turns::dyadic(-((odd as i128) * s_low as i128), i + 1);
            let out = measure_with_correction(inst, elem, correction)?;
            s_low |= (out.bit as u64) << i;
        }
        let c0 = inst.c_queries();
        let verified = inst.classical_verify(s_low, cfg.verify_trials);
        ledger.c_queries += inst.c_queries() - c0;
        if verified {
            return Ok(Recovery { s: s_low, verified, attempts: attempt, ledger });
        }
    }
    Err(Error::VerificationFailed { attempts: cfg.max_attempts.max(1) as u64 })
}

/// Number of qubits used for odd `N`.
pub fn odd_qubits(modulus: &Modulus, guard_bits: u32) -> u32 {
    ceil_log2(modulus.get()) + guard_bits
}

/// Recovers `s` for odd `N` from `psi_(2^j)`, `j < n`, built by the
/// small-label pipeline in rescaled views.
pub fn recover_odd(
    inst: &mut HiddenShiftInstance,
    sched: &Schedule,
    cfg: &RecoverConfig,
    rng: &mut SimRng,
) -> Result<Recovery> {
    let m = inst.modulus();
    if !m.is_odd() {
        return Err(Error::EvenModulus(m.get()));
    }
    let nq = odd_qubits(&m, cfg.guard_bits);
    if nq > MAX_EXACT_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: nq as u64, limit: MAX_EXACT_QUBITS as u64 });
    }
    let mut ledger = CostLedger::default();
    for attempt in 1..=cfg.max_attempts.max(1) {
        let mut elems = Vec::with_capacity(nq as usize);
        for j in 0..nq {
            let view = LabelView::scaled_by_inverse_pow2(j, m)?;
            let (elem, cost) = run_pipeline(inst, sched, Target::SmallOne(view), &cfg.pipeline, rng)?;
            ledger.absorb(&cost);
            elems.push(elem);
        }
        let k = semiclassical_iqft(inst, elems)?;
        let candidate = candidate_from_sample(k, m.get(), nq);
        let c0 = inst.c_queries();
        let verified = inst.classical_verify(candidate, cfg.verify_trials);
        ledger.c_queries += inst.c_queries() - c0;
        if verified {
            return Ok(Recovery { s: candidate, verified, attempts: attempt, ledger });
        }
    }
    Err(Error::VerificationFailed { attempts: cfg.max_attempts.max(1) as u64 })
}

/// Dispatches on the group order; even orders other than powers of two
/// are not supported.
pub fn recover(
    inst: &mut HiddenShiftInstance,
    sched: &Schedule,
    cfg: &RecoverConfig,
    rng: &mut SimRng,
) -> Result<Recovery> {
    let m = inst.modulus();
    if m.is_power_of_two() {
        recover_pow2(inst, sched, cfg, rng)
    } else if m.is_odd() {
        recover_odd(inst, sched, cfg, rng)
    } else {
        Err(Error::InvalidModulus(m.get(), "even group orders must be powers of two"))
    }
}

/// Correction before measuring output bit `m`, given the bits `low`
/// already measured: `-low / 2^(m+1)` turns.
#[inline]
pub fn iqft_correction(m: u32, low: u64) -> Turns {
    Turns::dyadic(-(low as i128), m + 1)
}

/// Semiclassical inverse QFT on `psi_(2^j)`, `j < n`, given in order of
/// `j`. Qubit `j` yields output bit `n-1-j`; qubits are measured from
/// `j = n-1` down with the bits found so far fed back as phase
/// corrections. Returns the sample `k` in `[0, 2^n)`.
pub fn semiclassical_iqft(inst: &mut HiddenShiftInstance, elems: Vec<PhaseElement>) -> Result<u64> {
    let m = inst.modulus();
    let n = elems.len() as u32;
    if n == 0 || n > 63 {
        return Err(Error::WrongLabels(format!("need between 1 and 63 elements, got {n}")));
    }
    for (j, e) in elems.iter().enumerate() {
        inst.check_owner(e)?;
        let want = pow_mod(2, j as u64, &m);
        if e.label() != want {
            return Err(Error::WrongLabels(format!("element {j} has label {}, expected {want}", e.label())));
        }
    }
    let mut k = 0u64;
    for (bit, elem) in elems.into_iter().rev().enumerate() {
        let out = measure_with_correction(inst, elem, iqft_correction(bit as u32, k))?;
        k |= (out.bit as u64) << bit;
    }
    Ok(k)
}

/// `round(k * N / 2^n) mod N`.
pub fn candidate_from_sample(k: u64, modulus: u64, n: u32) -> u64 {
    let scaled = (k as u128 * modulus as u128 + (1u128 << n >> 1)) >> n;
    (scaled % modulus as u128) as u64
}

/// Probability that a sample maps back to `s` under [`candidate_from_sample`].
pub fn success_probability(dist: &[f64], s: u64, modulus: u64, n: u32) -> f64 {
    dist.iter().enumerate().filter(|(k, _)| candidate_from_sample(*k as u64, modulus, n) == s).map(|(_, p)| p).sum()
}

/// `x * (s * 2^n - k * N) mod (N * 2^n)` as a fraction of a turn.
fn turns_of(x: u64, s: u64, k: u64, modulus: u64, n: u32) -> f64 {
    let den = (modulus as i128) << n;
    let step = ((s as i128) << n) - k as i128 * modulus as i128;
    ((x as i128 * step).rem_euclid(den)) as f64 / den as f64
}

/// `P(k) = |sum_x chi(x s / N - x k / 2^n)|^2 / 4^n`, by direct summation.
pub fn iqft_distribution_direct(s: u64, modulus: u64, n: u32) -> Result<Vec<f64>> {
    if n > MAX_DIRECT_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: n as u64, limit: MAX_DIRECT_QUBITS as u64 });
    }
    let size = 1u64 << n;
    let norm = (size as f64).powi(2);
    Ok((0..size)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for x in 0..size {
                let t = 2.0 * PI * turns_of(x, s, k, modulus, n);
                re += t.cos();
                im += t.sin();
            }
            (re * re + im * im) / norm
        })
        .collect())
}

/// The same law through the closed form `sin^2(pi 2^n d) / sin^2(pi d)`.
pub fn iqft_distribution(s: u64, modulus: u64, n: u32) -> Result<Vec<f64>> {
    if n > MAX_EXACT_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: n as u64, limit: MAX_EXACT_QUBITS as u64 });
    }
    let size = 1u64 << n;
    let norm = (size as f64).powi(2);
    Ok((0..size)
        .map(|k| {
            let d = turns_of(1, s, k, modulus, n);
            if d == 0.0 {
                return 1.0;
            }
            // 2^n * d mod 1 = (s * 2^n - k N) / N mod 1, kept exact.
            let step = ((s as i128) << n) - k as i128 * modulus as i128;
            let full = step.rem_euclid(modulus as i128) as f64 / modulus as f64;
            ((PI * full).sin() / (PI * d).sin()).powi(2) / norm
        })
        .collect())
}

/// Law of the semiclassical sampler, by enumerating every measurement
/// path with the same corrections the sampler applies.
pub fn semiclassical_distribution(s: u64, modulus: u64, n: u32) -> Result<Vec<f64>> {
    if n > MAX_EXACT_QUBITS {
        return Err(Error::SizeGuard { what: "qubits", value: n as u64, limit: MAX_EXACT_QUBITS as u64 });
    }
    let m = Modulus::new(modulus)?;
    let phases: Vec<Turns> = (0..n)
        .map(|j| {
            let label = pow_mod(2, j as u64, &m);
            Turns::exact(s as u128 * label as u128 % modulus as u128, modulus as u128)
        })
        .collect();
    let mut probs = vec![1.0f64];
    for bit in 0..n {
        let phase = phases[(n - 1 - bit) as usize];
        let mut next = vec![0.0; probs.len() * 2];
        for (low, &p) in probs.iter().enumerate() {
            let p0 = (phase + iqft_correction(bit, low as u64)).prob_zero();
            next[low] = p * p0;
            next[low | 1 << bit] = p * (1.0 - p0);
        }
        probs = next;
    }
    Ok(probs)
}

/// Draws one sample from the semiclassical law without an instance,
/// for Monte Carlo checks of the exact laws.
pub fn sample_semiclassical<R: Rng + ?Sized>(s: u64, modulus: &Modulus, n: u32, rng: &mut R) -> u64 {
    let mut k = 0u64;
    for bit in 0..n {
        let j = n - 1 - bit;
        let label = pow_mod(2, j as u64, modulus);
        let phase = Turns::exact(s as u128 * label as u128 % modulus.get() as u128, modulus.get() as u128);
        let p0 = (phase + iqft_correction(bit, k)).prob_zero();
        if rng.gen::<f64>() >= p0 {
            k |= 1 << bit;
        }
    }
    k
}
