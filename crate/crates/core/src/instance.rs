//! The hidden-shift referee.
//!
//! A [`HiddenShiftInstance`] owns the secret shift `s` and answers every
//! request that needs it: emitting phase elements, computing measurement
//! phases, and checking candidate shifts against the classical oracles.
//! Solver and pipeline code only ever see labels.
//!
//! Element generation draws the label uniformly from `Z_N`. After the
//! function register is measured and the QFT applied, the measured label is
//! uniform and independent of `s` and of the collapsed `x_0`, so the draw is
//! distribution-exact; `phase_sim::statevector_generate` checks this at
//! small `N`.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_arith::{mul_mod, Modulus};
use crate::phase_sim::Turns;
use crate::seeding::{self, splitmix64, SimRng};

static NEXT_INSTANCE_ID: AtomicU64 = AtomicU64::new(1);

/// Whether the secret may be revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Tests and validation: `reveal_secret` and ideal elements allowed.
    Validation,
    /// Measurement runs: the secret never leaves the referee.
    Benchmark,
}

/// How the secret shift is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Secret {
    Fixed(u64),
    Random,
}

/// The single-qubit state `|0> + chi(s * label / N)|1>`, known to the
/// caller only through its label.
///
/// Elements are deliberately neither `Clone` nor `Copy`: combining or
/// measuring one moves it, so an element is used at most once.
#[derive(Debug, PartialEq, Eq)]
pub struct PhaseElement {
    label: u64,
    instance_id: u64,
}

impl PhaseElement {
    #[inline]
    pub fn label(&self) -> u64 {
        self.label
    }

    #[inline]
    pub fn instance_id(&self) -> u64 {
        self.instance_id
    }
}

/// Seeded keyed permutation of `[0, N)`.
///
/// A four-round balanced Feistel network on the next even power of two,
/// restricted to `[0, N)` by cycle walking.
#[derive(Debug, Clone)]
pub struct KeyedPermutation {
    n: u64,
    half_bits: u32,
    key: u64,
}

impl KeyedPermutation {
    const ROUNDS: u64 = 4;

    pub fn new(n: u64, key: u64) -> Self {
        let bits = crate::group_arith::ceil_log2(n).max(2);
        KeyedPermutation { n, half_bits: bits.div_ceil(2), key }
    }

    fn round(&self, r: u64, half: u64) -> u64 {
        splitmix64(self.key ^ splitmix64(r.wrapping_mul(0x1000_0000_01B3) ^ half)) & ((1 << self.half_bits) - 1)
    }

    fn feistel(&self, x: u64) -> u64 {
        let mask = (1u64 << self.half_bits) - 1;
        let (mut left, mut right) = (x >> self.half_bits, x & mask);
        for r in 0..Self::ROUNDS {
            let next = left ^ self.round(r, right);
            left = right;
            right = next;
        }
        (left << self.half_bits) | right
    }

    pub fn apply(&self, x: u64) -> u64 {
        debug_assert!(x < self.n);
        let mut y = self.feistel(x);
        while y >= self.n {
            y = self.feistel(y);
        }
        y
    }
}

/// Serializable summary of an instance for experiment logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    #[serde(rename = "N")]
    pub modulus: u64,
    pub seed: u64,
    pub s_present: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
}

#[derive(Debug)]
pub struct HiddenShiftInstance {
    modulus: Modulus,
    secret: u64,
    seed: u64,
    mode: Mode,
    id: u64,
    oracle: KeyedPermutation,
    label_rng: SimRng,
    measure_rng: SimRng,
    query_rng: SimRng,
    q_queries: u64,
    c_queries: u64,
    tampered: bool,
}

impl HiddenShiftInstance {
    /// Builds a deterministic instance for `(N, s, seed)` in validation mode.
    pub fn new(n: u64, secret: Secret, seed: u64) -> Result<Self> {
        Self::with_mode(n, secret, seed, Mode::Validation)
    }

    pub fn with_mode(n: u64, secret: Secret, seed: u64, mode: Mode) -> Result<Self> {
        let modulus = Modulus::new(n)?;
        let secret = match secret {
            Secret::Fixed(s) if s >= n => return Err(Error::SecretOutOfRange { secret: s, modulus: n }),
            Secret::Fixed(s) => s,
            Secret::Random => seeding::rng_for(seed, "secret", 0).gen_range(0..n),
        };
        Ok(HiddenShiftInstance {
            modulus,
            secret,
            seed,
            mode,
            id: NEXT_INSTANCE_ID.fetch_add(1, Ordering::Relaxed),
            oracle: KeyedPermutation::new(n, seeding::derive(seed, "oracle-key", 0)),
            label_rng: seeding::rng_for(seed, "labels", 0),
            measure_rng: seeding::rng_for(seed, "measure", 0),
            query_rng: seeding::rng_for(seed, "classical", 0),
            q_queries: 0,
            c_queries: 0,
            tampered: false,
        })
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn id(&self) -> u64 {
        self.id
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn mode(&self) -> Mode {
        self.mode
    }

    #[inline]
    pub fn q_queries(&self) -> u64 {
        self.q_queries
    }

    #[inline]
    pub fn c_queries(&self) -> u64 {
        self.c_queries
    }

    /// Set once the secret has been revealed or an ideal element minted.
    #[inline]
    pub fn tampered(&self) -> bool {
        self.tampered
    }

    /// One quantum query: a fresh element with a uniform label.
    pub fn sample_element(&mut self) -> PhaseElement {
        self.q_queries += 1;
        let label = self.label_rng.gen_range(0..self.modulus.get());
        PhaseElement { label, instance_id: self.id }
    }

    /// Oracle `f(x) = P(x)`.
    pub fn f(&mut self, x: u64) -> u64 {
        self.c_queries += 1;
        self.f_uncounted(x)
    }

    /// Oracle `g(x) = P(x - s)`.
    pub fn g(&mut self, x: u64) -> u64 {
        self.c_queries += 1;
        self.g_uncounted(x)
    }

    pub(crate) fn f_uncounted(&self, x: u64) -> u64 {
        self.oracle.apply(x)
    }

    pub(crate) fn g_uncounted(&self, x: u64) -> u64 {
        self.oracle.apply(self.modulus.sub(x, self.secret))
    }

    /// Checks `f(x) = g(x + candidate)` on `trials` random points.
    pub fn classical_verify(&mut self, candidate: u64, trials: u32) -> bool {
        let n = self.modulus.get();
        let candidate = candidate % n;
        let mut ok = true;
        for _ in 0..trials.max(1) {
            let x = self.query_rng.gen_range(0..n);
            let lhs = self.f(x);
            let rhs = self.g(self.modulus.add(x, candidate));
            ok &= lhs == rhs;
        }
        ok
    }

    /// Returns `s`. Refused in benchmark mode; marks the instance tampered.
    pub fn reveal_secret(&mut self) -> Result<u64> {
        match self.mode {
            Mode::Benchmark => Err(Error::SecretSealed),
            Mode::Validation => {
                self.tampered = true;
                Ok(self.secret)
            }
        }
    }

    /// An element with a chosen label, for validating recovery against
    /// ideal inputs. Validation mode only; counts as one quantum query.
    pub fn ideal_element(&mut self, label: u64) -> Result<PhaseElement> {
        if self.mode == Mode::Benchmark {
            return Err(Error::SecretSealed);
        }
        self.tampered = true;
        self.q_queries += 1;
        Ok(PhaseElement { label: self.modulus.reduce(label), instance_id: self.id })
    }

    /// Relabels the output of a combination. Only the combination routines
    /// call this, after consuming their inputs.
    pub(crate) fn mint(&self, label: u64) -> PhaseElement {
        PhaseElement { label: self.modulus.reduce(label), instance_id: self.id }
    }

    /// Swaps the two basis states of an element: `psi_l` becomes
    /// `psi_(N-l)` up to a global phase. Costs no query.
    pub fn negate(&self, elem: PhaseElement) -> Result<PhaseElement> {
        self.check_owner(&elem)?;
        Ok(self.mint(self.modulus.neg(elem.label)))
    }

    pub(crate) fn check_owner(&self, elem: &PhaseElement) -> Result<()> {
        if elem.instance_id != self.id {
            return Err(Error::ForeignElement { expected: self.id, found: elem.instance_id });
        }
        Ok(())
    }

    /// Phase of `elem` in turns, `s * label / N mod 1`, kept exact.
    pub(crate) fn phase_of(&self, label: u64) -> Turns {
        Turns::exact(mul_mod(self.secret, label, &self.modulus) as u128, self.modulus.get() as u128)
    }

    pub(crate) fn measure_rng(&mut self) -> &mut SimRng {
        &mut self.measure_rng
    }

    pub fn descriptor(&self) -> InstanceDescriptor {
        let s = match self.mode {
            Mode::Validation => Some(self.secret),
            Mode::Benchmark => None,
        };
        InstanceDescriptor { modulus: self.modulus.get(), seed: self.seed, s_present: s.is_some(), s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_and_guards() {
        let inst = HiddenShiftInstance::new(16, Secret::Fixed(5), 42).unwrap();
        assert_eq!(inst.modulus().bits(), 4);
        assert_eq!(inst.q_queries(), 0);
        assert!(HiddenShiftInstance::new(1, Secret::Random, 0).is_err());
        assert!(matches!(HiddenShiftInstance::new(16, Secret::Fixed(16), 0), Err(Error::SecretOutOfRange { .. })));
    }

    #[test]
    fn random_secret_is_seeded() {
        let mut a = HiddenShiftInstance::new(15, Secret::Random, 7).unwrap();
        let mut b = HiddenShiftInstance::new(15, Secret::Random, 7).unwrap();
        let s = a.reveal_secret().unwrap();
        assert!(s < 15);
        assert_eq!(s, b.reveal_secret().unwrap());
    }

    #[test]
    fn label_stream_is_deterministic_and_secret_independent() {
        let mut a = HiddenShiftInstance::new(1000, Secret::Fixed(3), 9).unwrap();
        let mut b = HiddenShiftInstance::new(1000, Secret::Fixed(777), 9).unwrap();
        for _ in 0..100 {
            assert_eq!(a.sample_element().label(), b.sample_element().label());
        }
        assert_eq!(a.q_queries(), 100);
    }

    #[test]
    fn two_element_group_labels() {
        let mut inst = HiddenShiftInstance::new(2, Secret::Fixed(1), 1).unwrap();
        for _ in 0..50 {
            assert!(inst.sample_element().label() < 2);
        }
    }

    #[test]
    fn permutation_is_a_bijection() {
        for &n in &[2u64, 3, 15, 16, 17, 100, 1000] {
            let p = KeyedPermutation::new(n, 1234);
            let mut seen = vec![false; n as usize];
            for x in 0..n {
                let y = p.apply(x);
                assert!(y < n);
                assert!(!seen[y as usize]);
                seen[y as usize] = true;
            }
        }
    }

    #[test]
    fn classical_verification_and_accounting() {
        let mut inst = HiddenShiftInstance::new(16, Secret::Fixed(5), 3).unwrap();
        assert!(inst.classical_verify(5, 10));
        assert_eq!(inst.c_queries(), 20);
        assert!(!inst.classical_verify(6, 10));
        assert_eq!(inst.c_queries(), 40);
    }

    #[test]
    fn promise_holds_everywhere() {
        let mut inst = HiddenShiftInstance::new(101, Secret::Fixed(37), 3).unwrap();
        for x in 0..101 {
            assert_eq!(inst.f(x), inst.g((x + 37) % 101));
        }
    }

    #[test]
    fn reveal_is_gated() {
        let mut inst = HiddenShiftInstance::new(16, Secret::Fixed(5), 3).unwrap();
        assert!(!inst.tampered());
        assert_eq!(inst.reveal_secret().unwrap(), 5);
        assert!(inst.tampered());

        let mut sealed = HiddenShiftInstance::with_mode(16, Secret::Fixed(5), 3, Mode::Benchmark).unwrap();
        assert!(matches!(sealed.reveal_secret(), Err(Error::SecretSealed)));
        assert!(sealed.ideal_element(1).is_err());
        assert!(!sealed.tampered());
    }

    #[test]
    fn descriptor_hides_secret_in_benchmark_mode() {
        let sealed = HiddenShiftInstance::with_mode(16, Secret::Fixed(5), 3, Mode::Benchmark).unwrap();
        let json = serde_json::to_value(sealed.descriptor()).unwrap();
        assert_eq!(json, serde_json::json!({"N": 16, "seed": 3, "s_present": false}));

        let open = HiddenShiftInstance::new(16, Secret::Fixed(5), 3).unwrap();
        let json = serde_json::to_value(open.descriptor()).unwrap();
        assert_eq!(json["s"], 5);
    }
}
