//! Insecure integer mock backend for oracle testing.
//!
//! All three groups are the additive group `(Z_p, +)` for a runtime prime
//! `p`: `g^a` is `a*g mod p`, the group law is addition mod p, and the
//! pairing is `e(x, y) = x*y mod p`. Discrete logs are trivial by design,
//! which makes every protocol identity checkable with plain integers.
//! Elements encode as 8-byte little-endian integers.

use rand::RngCore;

use super::{Backend, EncodingError, SecurityProfile, SetupError};

const ELEM_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MockParams {
    pub p: u64,
}

/// A residue mod p. The modulus travels with the value so element
/// arithmetic needs no external context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MockElem {
    pub v: u64,
    pub p: u64,
}

impl MockElem {
    fn new(v: u64, p: u64) -> Self {
        MockElem { v: v % p, p }
    }
}

fn same_p(a: &MockElem, b: &MockElem) -> u64 {
    assert_eq!(a.p, b.p, "mock elements from different groups");
    a.p
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, complete for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn elem_from_bytes(params: &MockParams, bytes: &[u8]) -> Result<MockElem, EncodingError> {
    if bytes.len() != ELEM_LEN {
        return Err(EncodingError::MalformedLength {
            expected: ELEM_LEN,
            got: bytes.len(),
        });
    }
    let v = u64::from_le_bytes(bytes.try_into().expect("length checked"));
    if v >= params.p {
        return Err(EncodingError::NonCanonical);
    }
    Ok(MockElem { v, p: params.p })
}

fn elem_to_bytes(a: &MockElem) -> Vec<u8> {
    a.v.to_le_bytes().to_vec()
}

fn random_residue(p: u64, rng: &mut dyn RngCore) -> u64 {
    let wide = ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128;
    (wide % p as u128) as u64
}

impl Backend for Mock {
    type Params = MockParams;
    type Scalar = MockElem;
    type G1 = MockElem;
    type G2 = MockElem;
    type Gt = MockElem;

    const NAME: &'static str = "mock";
    const TAG: u8 = 2;

    fn params_from_profile(profile: &SecurityProfile) -> Result<MockParams, SetupError> {
        match profile {
            SecurityProfile::Mock(p) => {
                if !is_prime_u64(*p) {
                    return Err(SetupError::NotPrime(*p));
                }
                Ok(MockParams { p: *p })
            }
            SecurityProfile::Standard128 => Err(SetupError::UnsupportedProfile { backend: Self::NAME }),
        }
    }
    fn params_to_bytes(params: &MockParams) -> Vec<u8> {
        params.p.to_le_bytes().to_vec()
    }
    fn params_from_bytes(bytes: &[u8]) -> Result<MockParams, EncodingError> {
        if bytes.len() != ELEM_LEN {
            return Err(EncodingError::MalformedLength {
                expected: ELEM_LEN,
                got: bytes.len(),
            });
        }
        let p = u64::from_le_bytes(bytes.try_into().expect("length checked"));
        if !is_prime_u64(p) {
            return Err(EncodingError::NonCanonical);
        }
        Ok(MockParams { p })
    }

    fn scalar_len(_: &MockParams) -> usize {
        ELEM_LEN
    }
    fn g1_len(_: &MockParams) -> usize {
        ELEM_LEN
    }
    fn g2_len(_: &MockParams) -> usize {
        ELEM_LEN
    }
    fn gt_len(_: &MockParams) -> usize {
        ELEM_LEN
    }

    fn scalar_zero(params: &MockParams) -> MockElem {
        MockElem::new(0, params.p)
    }
    fn scalar_one(params: &MockParams) -> MockElem {
        MockElem::new(1, params.p)
    }
    fn scalar_from_u64(params: &MockParams, v: u64) -> MockElem {
        MockElem::new(v, params.p)
    }
    fn scalar_random(params: &MockParams, rng: &mut dyn RngCore) -> MockElem {
        MockElem::new(random_residue(params.p, rng), params.p)
    }
    fn scalar_add(a: &MockElem, b: &MockElem) -> MockElem {
        let p = same_p(a, b);
        MockElem::new(add_mod(a.v, b.v, p), p)
    }
    fn scalar_sub(a: &MockElem, b: &MockElem) -> MockElem {
        let p = same_p(a, b);
        MockElem::new(sub_mod(a.v, b.v, p), p)
    }
    fn scalar_mul(a: &MockElem, b: &MockElem) -> MockElem {
        let p = same_p(a, b);
        MockElem::new(mul_mod(a.v, b.v, p), p)
    }
    fn scalar_neg(a: &MockElem) -> MockElem {
        MockElem::new(sub_mod(0, a.v, a.p), a.p)
    }
    fn scalar_invert(a: &MockElem) -> Option<MockElem> {
        if a.v == 0 {
            return None;
        }
        Some(MockElem::new(pow_mod(a.v, a.p - 2, a.p), a.p))
    }
    fn scalar_is_zero(a: &MockElem) -> bool {
        a.v == 0
    }
    fn scalar_is_one(a: &MockElem) -> bool {
        a.v == 1 % a.p
    }
    fn scalar_to_bytes(a: &MockElem) -> Vec<u8> {
        elem_to_bytes(a)
    }
    fn scalar_from_bytes(params: &MockParams, bytes: &[u8]) -> Result<MockElem, EncodingError> {
        elem_from_bytes(params, bytes)
    }

    fn g1_generator(params: &MockParams) -> MockElem {
        MockElem::new(1, params.p)
    }
    fn g1_identity(params: &MockParams) -> MockElem {
        MockElem::new(0, params.p)
    }
    fn g1_is_identity(a: &MockElem) -> bool {
        a.v == 0
    }
    fn g1_mul(a: &MockElem, b: &MockElem) -> MockElem {
        let p = same_p(a, b);
        MockElem::new(add_mod(a.v, b.v, p), p)
    }
    fn g1_inv(a: &MockElem) -> MockElem {
        MockElem::new(sub_mod(0, a.v, a.p), a.p)
    }
    fn g1_pow(a: &MockElem, e: &MockElem) -> MockElem {
        let p = same_p(a, e);
        MockElem::new(mul_mod(a.v, e.v, p), p)
    }
    fn g1_to_bytes(a: &MockElem) -> Vec<u8> {
        elem_to_bytes(a)
    }
    fn g1_from_bytes(params: &MockParams, bytes: &[u8]) -> Result<MockElem, EncodingError> {
        elem_from_bytes(params, bytes)
    }

    fn g2_generator(params: &MockParams) -> MockElem {
        MockElem::new(1, params.p)
    }
    fn g2_identity(params: &MockParams) -> MockElem {
        MockElem::new(0, params.p)
    }
    fn g2_is_identity(a: &MockElem) -> bool {
        a.v == 0
    }
    fn g2_mul(a: &MockElem, b: &MockElem) -> MockElem {
        Self::g1_mul(a, b)
    }
    fn g2_inv(a: &MockElem) -> MockElem {
        Self::g1_inv(a)
    }
    fn g2_pow(a: &MockElem, e: &MockElem) -> MockElem {
        Self::g1_pow(a, e)
    }
    fn g2_to_bytes(a: &MockElem) -> Vec<u8> {
        elem_to_bytes(a)
    }
    fn g2_from_bytes(params: &MockParams, bytes: &[u8]) -> Result<MockElem, EncodingError> {
        elem_from_bytes(params, bytes)
    }

    fn gt_identity(params: &MockParams) -> MockElem {
        MockElem::new(0, params.p)
    }
    fn gt_is_identity(a: &MockElem) -> bool {
        a.v == 0
    }
    fn gt_mul(a: &MockElem, b: &MockElem) -> MockElem {
        Self::g1_mul(a, b)
    }
    fn gt_inv(a: &MockElem) -> MockElem {
        Self::g1_inv(a)
    }
    fn gt_pow(a: &MockElem, e: &MockElem) -> MockElem {
        Self::g1_pow(a, e)
    }
    fn gt_to_bytes(a: &MockElem) -> Vec<u8> {
        elem_to_bytes(a)
    }
    fn gt_from_bytes(params: &MockParams, bytes: &[u8]) -> Result<MockElem, EncodingError> {
        elem_from_bytes(params, bytes)
    }

    fn pairing(a: &MockElem, b: &MockElem) -> MockElem {
        let p = same_p(a, b);
        MockElem::new(mul_mod(a.v, b.v, p), p)
    }

    fn multi_pairing(pairs: &[(&MockElem, &MockElem)]) -> MockElem {
        let p = same_p(pairs[0].0, pairs[0].1);
        let mut acc = 0u64;
        for (a, b) in pairs {
            acc = add_mod(acc, mul_mod(a.v, b.v, same_p(a, b)), p);
        }
        MockElem::new(acc, p)
    }
}
