//! Single-qubit phase measurements and two brute-force statevector
//! validators.
//!
//! Phases are measured in turns (`1 turn = 2*pi`). They are kept as exact
//! rationals while the numerators and denominators fit in `u128`, and fall
//! back to `f64` otherwise.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::combine::AncillaMap;
use crate::error::{Error, Result};
use crate::instance::{HiddenShiftInstance, PhaseElement};

/// Largest group order accepted by [`statevector_generate`].
pub const MAX_STATEVECTOR_N: u64 = 1 << 10;
/// Largest number of qubits accepted by [`statevector_combine_dist`].
pub const MAX_STATEVECTOR_K: usize = 12;

/// A phase in turns, reduced into `[0, 1)`.
#[derive(Debug, Clone, Copy)]
pub enum Turns {
    Exact { num: u128, den: u128 },
    Approx(f64),
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Turns {
    pub const ZERO: Turns = Turns::Exact { num: 0, den: 1 };

    pub fn exact(num: u128, den: u128) -> Turns {
        assert!(den > 0);
        let num = num % den;
        let g = gcd(num, den).max(1);
        Turns::Exact { num: num / g, den: den / g }
    }

    /// `num / 2^bits` for a signed numerator.
    pub fn dyadic(num: i128, bits: u32) -> Turns {
        if bits >= 127 {
            return Turns::Approx((num as f64 / 2f64.powi(bits as i32)).rem_euclid(1.0));
        }
        let den = 1i128 << bits;
        Turns::exact(num.rem_euclid(den) as u128, den as u128)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Turns::Exact { num, den } => num as f64 / den as f64,
            Turns::Approx(x) => x.rem_euclid(1.0),
        }
    }

    /// `cos^2(pi * theta)`, exact at 0 and 1/2.
    pub fn prob_zero(self) -> f64 {
        match self {
            Turns::Exact { num: 0, .. } => 1.0,
            Turns::Exact { num: 1, den: 2 } => 0.0,
            t => (PI * t.to_f64()).cos().powi(2),
        }
    }
}

impl std::ops::Add for Turns {
    type Output = Turns;

    fn add(self, other: Turns) -> Turns {
        if let (Turns::Exact { num: a, den: b }, Turns::Exact { num: c, den: d }) = (self, other) {
            let g = gcd(b, d);
            let lcm = (b / g).checked_mul(d);
            if let Some(lcm) = lcm {
                let lhs = a.checked_mul(lcm / b);
                let rhs = c.checked_mul(lcm / d);
                if let (Some(x), Some(y)) = (lhs, rhs) {
                    if let Some(sum) = x.checked_add(y) {
                        return Turns::exact(sum, lcm);
                    }
                }
            }
        }
        Turns::Approx((self.to_f64() + other.to_f64()).rem_euclid(1.0))
    }
}

impl PartialEq for Turns {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Turns::Exact { num: a, den: b }, Turns::Exact { num: c, den: d }) => a == c && b == d,
            _ => circular_distance(self.to_f64(), other.to_f64()) < 1e-12,
        }
    }
}

/// Distance between two phases on the unit circle, in turns.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub bit: u8,
    /// Probability that the bit was 0.
    pub p0: f64,
}

/// Measures `elem` in the Hadamard basis after rotating it by
/// `correction` turns. Consumes the element.
pub fn measure_with_correction(
    inst: &mut HiddenShiftInstance,
    elem: PhaseElement,
    correction: Turns,
) -> Result<MeasurementOutcome> {
    inst.check_owner(&elem)?;
    let theta = inst.phase_of(elem.label()) + correction;
    let p0 = theta.prob_zero();
    let bit = if p0 >= 1.0 {
        0
    } else if p0 <= 0.0 {
        1
    } else {
        u8::from(inst.measure_rng().gen::<f64>() >= p0)
    };
    Ok(MeasurementOutcome { bit, p0 })
}

/// Result of simulating element generation on the full three-register state.
#[derive(Debug, Clone, Serialize)]
pub struct GenerationReport {
    /// `P(label = l)` for every `l` in `Z_N`.
    pub label_probs: Vec<f64>,
    /// Relative phase of the surviving qubit for each label, in turns.
    pub phases: Vec<f64>,
    /// Largest `|P(l) - 1/N|`.
    pub max_uniform_deviation: f64,
    /// Largest circular distance between a simulated phase and `s*l/N`,
    /// over every function-register outcome.
    pub max_phase_deviation: f64,
}

/// Simulates `sum_x |0>|x>|f(x)> + |1>|x>|g(x)>`, the measurement of the
/// function register, the QFT on `Z_N`, and the label measurement.
pub fn statevector_generate(inst: &HiddenShiftInstance) -> Result<GenerationReport> {
    let n = inst.modulus().get();
    if n > MAX_STATEVECTOR_N {
        return Err(Error::SizeGuard { what: "N", value: n, limit: MAX_STATEVECTOR_N });
    }
    let nn = n as usize;
    let amp0 = Complex64::new(1.0 / ((2 * nn) as f64).sqrt(), 0.0);

    // Nonzero amplitudes of the initial state, bucketed by function value.
    let mut by_output: Vec<Vec<(u8, u64, Complex64)>> = vec![Vec::new(); nn];
    for x in 0..n {
        by_output[inst.f_uncounted(x) as usize].push((0, x, amp0));
        by_output[inst.g_uncounted(x) as usize].push((1, x, amp0));
    }

    let expected_phase = |l: u64| inst.phase_of(l).to_f64();
    let mut label_probs = vec![0.0; nn];
    let mut phases = vec![f64::NAN; nn];
    let mut max_phase_deviation: f64 = 0.0;
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();

    for branch in by_output.iter().filter(|b| !b.is_empty()) {
        let p_branch: f64 = branch.iter().map(|(_, _, a)| a.norm_sqr()).sum();
        let scale = 1.0 / p_branch.sqrt();
        for l in 0..n {
            let mut out = [Complex64::new(0.0, 0.0); 2];
            for &(c, x, a) in branch {
                let turns = ((x as u128 * l as u128) % n as u128) as f64 / n as f64;
                out[c as usize] += a * scale * inv_sqrt_n * Complex64::from_polar(1.0, 2.0 * PI * turns);
            }
            let p_label = out[0].norm_sqr() + out[1].norm_sqr();
            label_probs[l as usize] += p_branch * p_label;
            if p_label > 1e-15 {
                let rel = (out[1] * out[0].conj()).arg() / (2.0 * PI);
                let rel = rel.rem_euclid(1.0);
                max_phase_deviation = max_phase_deviation.max(circular_distance(rel, expected_phase(l)));
                phases[l as usize] = rel;
            }
        }
    }

    let uniform = 1.0 / n as f64;
    let max_uniform_deviation = label_probs.iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    Ok(GenerationReport { label_probs, phases, max_uniform_deviation, max_phase_deviation })
}

/// One ancilla outcome of a combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AncillaBranch {
    pub prob: f64,
    /// Subset vectors `j` (bit `i` = coordinate `i`) mapping to this outcome.
    pub preimages: Vec<u64>,
}

/// Joint distribution of the ancilla value `V` and the surviving support,
/// computed from the amplitudes of `tensor_i psi_{l_i}`.
pub fn statevector_combine_dist(
    inst: &HiddenShiftInstance,
    labels: &[u64],
    map: &AncillaMap,
) -> Result<BTreeMap<u64, AncillaBranch>> {
    let k = labels.len();
    if k > MAX_STATEVECTOR_K {
        return Err(Error::SizeGuard { what: "k", value: k as u64, limit: MAX_STATEVECTOR_K as u64 });
    }
    let m = inst.modulus();
    let norm = 1.0 / ((1u64 << k) as f64).sqrt();
    let mut dist: BTreeMap<u64, AncillaBranch> = BTreeMap::new();
    for j in 0..(1u64 << k) {
        let sum: u128 = (0..k).filter(|i| j >> i & 1 == 1).map(|i| labels[i] as u128).sum();
        let phase = inst.phase_of((sum % m.get() as u128) as u64).to_f64();
        let amp = Complex64::from_polar(norm, 2.0 * PI * phase);
        let v = map.eval(sum);
        let entry = dist.entry(v).or_insert(AncillaBranch { prob: 0.0, preimages: Vec::new() });
        entry.prob += amp.norm_sqr();
        entry.preimages.push(j);
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Secret;

    #[test]
    fn turns_arithmetic() {
        assert_eq!(Turns::exact(3, 8) + Turns::exact(5, 8), Turns::ZERO);
        assert_eq!(Turns::dyadic(-1, 2), Turns::exact(3, 4));
        assert_eq!(Turns::exact(2, 4), Turns::exact(1, 2));
        assert_eq!(Turns::exact(1, 2).prob_zero(), 0.0);
        assert!((Turns::exact(1, 4).prob_zero() - 0.5).abs() < 1e-15);
        let big = Turns::exact(1, (1u128 << 100) + 1) + Turns::exact(1, (1u128 << 100) + 3);
        assert!(matches!(big, Turns::Approx(_)));
    }

    #[test]
    fn top_label_gives_parity() {
        for s in 0..16 {
            let mut inst = HiddenShiftInstance::new(16, Secret::Fixed(s), 1).unwrap();
            let elem = inst.ideal_element(8).unwrap();
            let out = measure_with_correction(&mut inst, elem, Turns::ZERO).unwrap();
            assert_eq!(out.bit as u64, s % 2);
            assert_eq!(out.p0, if s % 2 == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let mut a = HiddenShiftInstance::new(16, Secret::Fixed(1), 1).unwrap();
        let mut b = HiddenShiftInstance::new(16, Secret::Fixed(1), 1).unwrap();
        let elem = b.sample_element();
        assert!(matches!(measure_with_correction(&mut a, elem, Turns::ZERO), Err(Error::ForeignElement { .. })));
    }

    #[test]
    fn generation_small_cases() {
        let inst = HiddenShiftInstance::new(8, Secret::Fixed(3), 5).unwrap();
        let rep = statevector_generate(&inst).unwrap();
        for (l, p) in rep.label_probs.iter().enumerate() {
            assert!((p - 0.125).abs() < 1e-12);
            let expected = (3 * l % 8) as f64 / 8.0;
            assert!(circular_distance(rep.phases[l], expected) < 1e-9);
        }

        let inst = HiddenShiftInstance::new(2, Secret::Fixed(0), 5).unwrap();
        let rep = statevector_generate(&inst).unwrap();
        assert!(rep.phases.iter().all(|&p| circular_distance(p, 0.0) < 1e-12));

        let inst = HiddenShiftInstance::new(5, Secret::Fixed(2), 5).unwrap();
        let rep = statevector_generate(&inst).unwrap();
        assert!(rep.max_phase_deviation < 1e-9);
        assert!(rep.max_uniform_deviation < 1e-9);

        let big = HiddenShiftInstance::new(2048, Secret::Fixed(2), 5).unwrap();
        assert!(statevector_generate(&big).is_err());
    }

    #[test]
    fn combine_distribution_example() {
        let inst = HiddenShiftInstance::new(64, Secret::Fixed(11), 5).unwrap();
        let dist = statevector_combine_dist(&inst, &[1, 2, 3], &AncillaMap::Pow2 { shift: 0, bits: 2 }).unwrap();
        // subset sums 0,1,2,3,3,4,5,6: only {} and {1,3} vanish mod 4
        let zero = &dist[&0];
        assert!((zero.prob - 2.0 / 8.0).abs() < 1e-12);
        assert_eq!(zero.preimages, vec![0b000, 0b101]);
        let total: f64 = dist.values().map(|b| b.prob).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let constant = statevector_combine_dist(&inst, &[4, 8, 12], &AncillaMap::Pow2 { shift: 0, bits: 2 }).unwrap();
        assert_eq!(constant.len(), 1);
        assert_eq!(constant[&0].preimages.len(), 8);
    }
}
