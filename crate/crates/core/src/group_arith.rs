//! Arithmetic in the cyclic group Z_N.
//!
//! Residues are `u64` values in `[0, N)`. Products go through `u128`, so
//! every modulus up to `2^63 - 1` is handled without overflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported group order.
pub const MAX_MODULUS: u64 = (1 << 63) - 1;

/// Sentinel returned by [`two_adic_valuation`] for zero.
pub const VALUATION_INFINITE: u32 = u32::MAX;

/// The order `N` of the cyclic group together with its bit length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus {
    n: u64,
    bits: u32,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModulus(n, "group order must be at least 2"));
        }
        if n > MAX_MODULUS {
            return Err(Error::InvalidModulus(n, "group order exceeds 2^63 - 1"));
        }
        Ok(Modulus { n, bits: ceil_log2(n) })
    }

    /// The group order `N`.
    #[inline]
    pub fn get(&self) -> u64 {
        self.n
    }

    /// `ceil(log2 N)`.
    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn is_odd(&self) -> bool {
        self.n & 1 == 1
    }

    #[inline]
    pub fn is_power_of_two(&self) -> bool {
        self.n.is_power_of_two()
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.n
    }

    /// Reduces a signed integer into `[0, N)`.
    #[inline]
    pub fn reduce_signed(&self, x: i128) -> u64 {
        x.rem_euclid(self.n as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.n as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.n - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.n - a
        }
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        Modulus::new(n)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.n
    }
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `a * b mod N`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: &Modulus) -> u64 {
    ((a as u128 * b as u128) % m.get() as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: &Modulus) -> u64 {
    let mut acc = 1 % m.get();
    base %= m.get();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The inverse of `2^j` modulo an odd `N`.
///
/// `2^{-1} = (N + 1) / 2`, so the result is that value raised to `j`.
pub fn inv_pow2_mod(j: u32, m: &Modulus) -> Result<u64> {
    if !m.is_odd() {
        return Err(Error::EvenModulus(m.get()));
    }
    let half = m.get() / 2 + 1;
    Ok(pow_mod(half, j as u64, m))
}

/// Largest `a` with `2^a | x`; [`VALUATION_INFINITE`] for zero.
#[inline]
pub fn two_adic_valuation(x: u64) -> u32 {
    if x == 0 {
        VALUATION_INFINITE
    } else {
        x.trailing_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn modulus(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn mul_mod_small() {
        assert_eq!(mul_mod(3, 5, &modulus(7)), 1);
        assert_eq!(mul_mod(0, 123_456, &modulus(1_000_003)), 0);
    }

    #[test]
    fn mul_mod_against_wide_reference() {
        let m = modulus((1 << 61) - 1);
        let a = 1u64 << 31;
        // 2^62 mod (2^61 - 1) = 2
        assert_eq!(mul_mod(a, a, &m), 2);
    }

    #[test]
    fn mul_mod_hundred_thousand_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let n = rng.gen_range(2..=MAX_MODULUS);
            let m = modulus(n);
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            assert_eq!(mul_mod(a, b, &m) as u128, (a as u128 * b as u128) % n as u128);
        }
    }

    #[test]
    fn inverse_powers_of_two() {
        assert_eq!(inv_pow2_mod(1, &modulus(15)).unwrap(), 8);
        assert_eq!(inv_pow2_mod(0, &modulus(9)).unwrap(), 1);
        let m = modulus(1_000_003);
        let t = inv_pow2_mod(5, &m).unwrap();
        assert_eq!(mul_mod(t, 32, &m), 1);
        assert!(inv_pow2_mod(3, &modulus(16)).is_err());
    }

    #[test]
    fn valuation() {
        assert_eq!(two_adic_valuation(12), 2);
        assert_eq!(two_adic_valuation(1), 0);
        assert_eq!(two_adic_valuation(0), VALUATION_INFINITE);
    }

    #[test]
    fn modulus_bits_and_guards() {
        assert_eq!(modulus(16).bits(), 4);
        assert_eq!(modulus(15).bits(), 4);
        assert_eq!(modulus(17).bits(), 5);
        assert_eq!(modulus(2).bits(), 1);
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(1 << 63).is_err());
    }

    fn ext_gcd_inverse(a: i128, n: i128) -> i128 {
        let (mut r0, mut r1) = (a, n);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        assert_eq!(r0, 1);
        s0.rem_euclid(n)
    }

    proptest! {
        #[test]
        fn mul_mod_matches_u128(a in any::<u64>(), b in any::<u64>(), n in 2u64..=MAX_MODULUS) {
            let m = modulus(n);
            let (a, b) = (a % n, b % n);
            prop_assert_eq!(mul_mod(a, b, &m) as u128, (a as u128 * b as u128) % n as u128);
        }

        #[test]
        fn inv_pow2_matches_extended_gcd(j in 0u32..200, half in 1u64..(1 << 40)) {
            let n = 2 * half + 1;
            let m = modulus(n);
            let t = inv_pow2_mod(j, &m).unwrap();
            prop_assert_eq!(mul_mod(t, pow_mod(2, j as u64, &m), &m), 1);
            let two_j = pow_mod(2, j as u64, &m) as i128;
            prop_assert_eq!(t as i128, ext_gcd_inverse(two_j, n as i128));
        }
    }
}
