//! Bilinear group arithmetic behind a backend trait.
//!
//! Two backends are provided: a BLS12-381 pairing at the 128-bit level
//! ([`Bls381`]) and an insecure integer mock ([`Mock`]) in which all three
//! groups are `(Z_p, +)`, `g^a = a*g mod p` and `e(x, y) = x*y mod p`. The
//! mock makes every algebraic identity checkable with plain integers and is
//! used by the test oracles; it must never be used for real data.
//!
//! All element types are immutable after construction and safe to share
//! across threads. Exponentiations and pairings are routed through the
//! instrumentation hook in [`counters`], which is free when no counter
//! scope is active.


pub mod bls;
pub mod counters;
pub mod mock;

use std::fmt;

use rand::{CryptoRng, RngCore};
use thiserror::Error;

pub use bls::Bls381;
pub use counters::{counted, CounterError, OpCounters};
pub use mock::Mock;

/// Element decoding failures. Each case is a distinct code so callers can
/// report precisely what was wrong with the bytes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("encoding has wrong length: expected {expected} bytes, got {got}")]
    MalformedLength { expected: usize, got: usize },
    #[error("non-canonical encoding")]
    NonCanonical,
    #[error("element is not on the curve or not in the prime-order subgroup")]
    OffCurve,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetupError {
    #[error("profile not supported by backend `{backend}`")]
    UnsupportedProfile { backend: &'static str },
    #[error("mock modulus {0} is not prime")]
    NotPrime(u64),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("product of pairings over an empty list")]
    EmptyProduct,
}

/// Parameter profile for [`bilinear_setup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecurityProfile {
    /// A pairing-friendly curve at the 128-bit security level (BLS12-381).
    Standard128,
    /// The insecure integer mock over Z_p for a small prime p.
    Mock(u64),
}

/// A pairing backend: scalar ring, the three groups, and the maps between
/// them. Group operations are written multiplicatively to match the usual
/// pairing-equation notation; `pow` is exponentiation by a scalar.
pub trait Backend: Sized + Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    type Params: Clone + fmt::Debug + PartialEq + Eq + Send + Sync;
    type Scalar: Clone + fmt::Debug + PartialEq + Eq + Send + Sync;
    type G1: Clone + fmt::Debug + PartialEq + Eq + Send + Sync;
    type G2: Clone + fmt::Debug + PartialEq + Eq + Send + Sync;
    type Gt: Clone + fmt::Debug + PartialEq + Eq + Send + Sync;

    const NAME: &'static str;
    /// Backend tag byte used by the artifact headers.
    const TAG: u8;

    fn params_from_profile(profile: &SecurityProfile) -> Result<Self::Params, SetupError>;
    /// Extra parameter bytes stored in artifact headers (the modulus for
    /// the mock backend, empty for a fixed curve).
    fn params_to_bytes(params: &Self::Params) -> Vec<u8>;
    fn params_from_bytes(bytes: &[u8]) -> Result<Self::Params, EncodingError>;

    fn scalar_len(params: &Self::Params) -> usize;
    fn g1_len(params: &Self::Params) -> usize;
    fn g2_len(params: &Self::Params) -> usize;
    fn gt_len(params: &Self::Params) -> usize;

    fn scalar_zero(params: &Self::Params) -> Self::Scalar;
    fn scalar_one(params: &Self::Params) -> Self::Scalar;
    fn scalar_from_u64(params: &Self::Params, v: u64) -> Self::Scalar;
    fn scalar_random(params: &Self::Params, rng: &mut dyn RngCore) -> Self::Scalar;
    fn scalar_add(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_sub(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_neg(a: &Self::Scalar) -> Self::Scalar;
    fn scalar_invert(a: &Self::Scalar) -> Option<Self::Scalar>;
    fn scalar_is_zero(a: &Self::Scalar) -> bool;
    fn scalar_is_one(a: &Self::Scalar) -> bool;
    fn scalar_to_bytes(a: &Self::Scalar) -> Vec<u8>;
    fn scalar_from_bytes(params: &Self::Params, bytes: &[u8]) -> Result<Self::Scalar, EncodingError>;

    fn g1_generator(params: &Self::Params) -> Self::G1;
    fn g1_identity(params: &Self::Params) -> Self::G1;
    fn g1_is_identity(a: &Self::G1) -> bool;
    fn g1_mul(a: &Self::G1, b: &Self::G1) -> Self::G1;
    fn g1_inv(a: &Self::G1) -> Self::G1;
    fn g1_pow(a: &Self::G1, e: &Self::Scalar) -> Self::G1;
    fn g1_to_bytes(a: &Self::G1) -> Vec<u8>;
    fn g1_from_bytes(params: &Self::Params, bytes: &[u8]) -> Result<Self::G1, EncodingError>;

    fn g2_generator(params: &Self::Params) -> Self::G2;
    fn g2_identity(params: &Self::Params) -> Self::G2;
    fn g2_is_identity(a: &Self::G2) -> bool;
    fn g2_mul(a: &Self::G2, b: &Self::G2) -> Self::G2;
    fn g2_inv(a: &Self::G2) -> Self::G2;
    fn g2_pow(a: &Self::G2, e: &Self::Scalar) -> Self::G2;
    fn g2_to_bytes(a: &Self::G2) -> Vec<u8>;
    fn g2_from_bytes(params: &Self::Params, bytes: &[u8]) -> Result<Self::G2, EncodingError>;

    fn gt_identity(params: &Self::Params) -> Self::Gt;
    fn gt_is_identity(a: &Self::Gt) -> bool;
    fn gt_mul(a: &Self::Gt, b: &Self::Gt) -> Self::Gt;
    fn gt_inv(a: &Self::Gt) -> Self::Gt;
    fn gt_pow(a: &Self::Gt, e: &Self::Scalar) -> Self::Gt;
    fn gt_to_bytes(a: &Self::Gt) -> Vec<u8>;
    fn gt_from_bytes(params: &Self::Params, bytes: &[u8]) -> Result<Self::Gt, EncodingError>;

    fn pairing(a: &Self::G1, b: &Self::G2) -> Self::Gt;
    fn multi_pairing(pairs: &[(&Self::G1, &Self::G2)]) -> Self::Gt;

    /// Whether `prod e(lhs) == rhs_extra * prod e(rhs)`. Backends may
    /// fold both sides into one product to save final exponentiations;
    /// the predicate must equal the naive evaluation exactly.
    fn pairing_products_equal(
        lhs: &[(&Self::G1, &Self::G2)],
        rhs: &[(&Self::G1, &Self::G2)],
        rhs_extra: &Self::Gt,
    ) -> bool {
        let l = Self::multi_pairing(lhs);
        let r = Self::gt_mul(&Self::multi_pairing(rhs), rhs_extra);
        l == r
    }
}

macro_rules! wrapper_type {
    ($name:ident, $inner:ident) => {
        pub struct $name<B: Backend>(pub(crate) B::$inner);

        impl<B: Backend> Clone for $name<B> {
            fn clone(&self) -> Self {
                Self(self.0.clone())
            }
        }
        impl<B: Backend> fmt::Debug for $name<B> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({:?})"), self.0)
            }
        }
        impl<B: Backend> PartialEq for $name<B> {
            fn eq(&self, other: &Self) -> bool {
                self.0 == other.0
            }
        }
        impl<B: Backend> Eq for $name<B> {}
    };
}

wrapper_type!(Scalar, Scalar);
wrapper_type!(G1, G1);
wrapper_type!(G2, G2);
wrapper_type!(Gt, Gt);

impl<B: Backend> Scalar<B> {
    pub fn add(&self, other: &Self) -> Self {
        Self(B::scalar_add(&self.0, &other.0))
    }
    pub fn sub(&self, other: &Self) -> Self {
        Self(B::scalar_sub(&self.0, &other.0))
    }
    pub fn mul(&self, other: &Self) -> Self {
        Self(B::scalar_mul(&self.0, &other.0))
    }
    pub fn neg(&self) -> Self {
        Self(B::scalar_neg(&self.0))
    }
    /// Multiplicative inverse; `None` for zero.
    pub fn invert(&self) -> Option<Self> {
        B::scalar_invert(&self.0).map(Self)
    }
    pub fn is_zero(&self) -> bool {
        B::scalar_is_zero(&self.0)
    }
    pub fn is_one(&self) -> bool {
        B::scalar_is_one(&self.0)
    }
    pub fn to_bytes(&self) -> Vec<u8> {
        B::scalar_to_bytes(&self.0)
    }
}

/// Common surface of the three group-element wrappers, used by the
/// proof-system code to stay generic over the source group.
pub trait GroupElem<B: Backend>: Clone + fmt::Debug + PartialEq + Eq + Send + Sync {
    fn identity(group: &BilinearGroup<B>) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    fn pow(&self, e: &Scalar<B>) -> Self;
    fn is_identity(&self) -> bool;
    fn to_bytes(&self) -> Vec<u8>;
}

macro_rules! group_elem_impl {
    ($name:ident, $identity:ident, $is_identity:ident, $mul:ident, $inv:ident, $pow:ident, $to_bytes:ident, $record:path) => {
        impl<B: Backend> GroupElem<B> for $name<B> {
            fn identity(group: &BilinearGroup<B>) -> Self {
                Self(B::$identity(&group.params))
            }
            fn mul(&self, other: &Self) -> Self {
                Self(B::$mul(&self.0, &other.0))
            }
            fn inv(&self) -> Self {
                Self(B::$inv(&self.0))
            }
            fn pow(&self, e: &Scalar<B>) -> Self {
                $record();
                Self(B::$pow(&self.0, &e.0))
            }
            fn is_identity(&self) -> bool {
                B::$is_identity(&self.0)
            }
            fn to_bytes(&self) -> Vec<u8> {
                B::$to_bytes(&self.0)
            }
        }

        impl<B: Backend> $name<B> {
            pub fn mul(&self, other: &Self) -> Self {
                <Self as GroupElem<B>>::mul(self, other)
            }
            pub fn inv(&self) -> Self {
                <Self as GroupElem<B>>::inv(self)
            }
            pub fn pow(&self, e: &Scalar<B>) -> Self {
                <Self as GroupElem<B>>::pow(self, e)
            }
            pub fn is_identity(&self) -> bool {
                <Self as GroupElem<B>>::is_identity(self)
            }
            pub fn to_bytes(&self) -> Vec<u8> {
                <Self as GroupElem<B>>::to_bytes(self)
            }
        }
    };
}

group_elem_impl!(
    G1,
    g1_identity,
    g1_is_identity,
    g1_mul,
    g1_inv,
    g1_pow,
    g1_to_bytes,
    counters::record_exp_g1
);
group_elem_impl!(
    G2,
    g2_identity,
    g2_is_identity,
    g2_mul,
    g2_inv,
    g2_pow,
    g2_to_bytes,
    counters::record_exp_g2
);
group_elem_impl!(
    Gt,
    gt_identity,
    gt_is_identity,
    gt_mul,
    gt_inv,
    gt_pow,
    gt_to_bytes,
    counters::record_exp_gt
);

impl<B: Backend> Gt<B> {
    /// `a / b` in the target group.
    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }
}

/// The public pairing context: group order, generators and the pairing
/// map. Immutable after construction.
pub struct BilinearGroup<B: Backend> {
    params: B::Params,
    g1: G1<B>,
    g2: G2<B>,
    gt: Gt<B>,
}

impl<B: Backend> Clone for BilinearGroup<B> {
    fn clone(&self) -> Self {
        Self {
            params: self.params.clone(),
            g1: self.g1.clone(),
            g2: self.g2.clone(),
            gt: self.gt.clone(),
        }
    }
}

impl<B: Backend> fmt::Debug for BilinearGroup<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BilinearGroup")
            .field("backend", &B::NAME)
            .field("params", &self.params)
            .finish()
    }
}

impl<B: Backend> PartialEq for BilinearGroup<B> {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}
impl<B: Backend> Eq for BilinearGroup<B> {}

/// Builds the pairing context for a backend. Fails if the profile does not
/// match the backend or names a non-prime mock modulus.
pub fn bilinear_setup<B: Backend>(profile: &SecurityProfile) -> Result<BilinearGroup<B>, SetupError> {
    let params = B::params_from_profile(profile)?;
    Ok(BilinearGroup::from_params(params))
}

impl<B: Backend> BilinearGroup<B> {
    pub fn from_params(params: B::Params) -> Self {
        let g1 = G1(B::g1_generator(&params));
        let g2 = G2(B::g2_generator(&params));
        let gt = Gt(B::pairing(&g1.0, &g2.0));
        Self { params, g1, g2, gt }
    }

    pub fn backend_name(&self) -> &'static str {
        B::NAME
    }
    pub fn params(&self) -> &B::Params {
        &self.params
    }

    /// Generator of G1.
    pub fn g1(&self) -> &G1<B> {
        &self.g1
    }
    /// Generator of G2.
    pub fn g2(&self) -> &G2<B> {
        &self.g2
    }
    /// `e(g1, g2)`, cached at construction.
    pub fn gt_generator(&self) -> &Gt<B> {
        &self.gt
    }

    pub fn g1_identity(&self) -> G1<B> {
        G1(B::g1_identity(&self.params))
    }
    pub fn g2_identity(&self) -> G2<B> {
        G2(B::g2_identity(&self.params))
    }
    pub fn gt_identity(&self) -> Gt<B> {
        Gt(B::gt_identity(&self.params))
    }

    pub fn scalar_zero(&self) -> Scalar<B> {
        Scalar(B::scalar_zero(&self.params))
    }
    pub fn scalar_one(&self) -> Scalar<B> {
        Scalar(B::scalar_one(&self.params))
    }
    pub fn scalar_from_u64(&self, v: u64) -> Scalar<B> {
        Scalar(B::scalar_from_u64(&self.params, v))
    }
    pub fn random_scalar<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Scalar<B> {
        Scalar(B::scalar_random(&self.params, rng))
    }
    /// Uniform nonzero scalar.
    pub fn random_nonzero_scalar<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Scalar<B> {
        loop {
            let s = self.random_scalar(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }
    /// Uniform element of the target group (a random power of `e(g1, g2)`).
    pub fn random_gt<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Gt<B> {
        self.gt.pow(&self.random_scalar(rng))
    }

    /// The bilinear map. Counted as one pairing when a counter scope is
    /// active.
    pub fn pair(&self, a: &G1<B>, b: &G2<B>) -> Gt<B> {
        counters::record_pairings(1);
        Gt(B::pairing(&a.0, &b.0))
    }

    /// Product of pairings, counted as `pairs.len()` pairings. Rejects an
    /// empty product.
    pub fn multi_pair(&self, pairs: &[(&G1<B>, &G2<B>)]) -> Result<Gt<B>, PairingError> {
        if pairs.is_empty() {
            return Err(PairingError::EmptyProduct);
        }
        counters::record_pairings(pairs.len() as u64);
        let raw: Vec<(&B::G1, &B::G2)> = pairs.iter().map(|(a, b)| (&a.0, &b.0)).collect();
        Ok(Gt(B::multi_pairing(&raw)))
    }

    /// Whether `prod e(lhs) == rhs_extra * prod e(rhs)`, counted as
    /// `lhs.len() + rhs.len()` pairings. Both sides must be non-empty.
    pub fn pairing_products_equal(
        &self,
        lhs: &[(&G1<B>, &G2<B>)],
        rhs: &[(&G1<B>, &G2<B>)],
        rhs_extra: &Gt<B>,
    ) -> Result<bool, PairingError> {
        if lhs.is_empty() || rhs.is_empty() {
            return Err(PairingError::EmptyProduct);
        }
        counters::record_pairings((lhs.len() + rhs.len()) as u64);
        let lhs_raw: Vec<(&B::G1, &B::G2)> = lhs.iter().map(|(a, b)| (&a.0, &b.0)).collect();
        let rhs_raw: Vec<(&B::G1, &B::G2)> = rhs.iter().map(|(a, b)| (&a.0, &b.0)).collect();
        Ok(B::pairing_products_equal(&lhs_raw, &rhs_raw, &rhs_extra.0))
    }

    pub fn scalar_len(&self) -> usize {
        B::scalar_len(&self.params)
    }
    pub fn g1_len(&self) -> usize {
        B::g1_len(&self.params)
    }
    pub fn g2_len(&self) -> usize {
        B::g2_len(&self.params)
    }
    pub fn gt_len(&self) -> usize {
        B::gt_len(&self.params)
    }

    pub fn scalar_from_bytes(&self, bytes: &[u8]) -> Result<Scalar<B>, EncodingError> {
        B::scalar_from_bytes(&self.params, bytes).map(Scalar)
    }
    pub fn g1_from_bytes(&self, bytes: &[u8]) -> Result<G1<B>, EncodingError> {
        B::g1_from_bytes(&self.params, bytes).map(G1)
    }
    pub fn g2_from_bytes(&self, bytes: &[u8]) -> Result<G2<B>, EncodingError> {
        B::g2_from_bytes(&self.params, bytes).map(G2)
    }
    pub fn gt_from_bytes(&self, bytes: &[u8]) -> Result<Gt<B>, EncodingError> {
        B::gt_from_bytes(&self.params, bytes).map(Gt)
    }
}

/// Folds a non-empty iterator of group elements into their product,
/// starting from the identity.
pub fn product<B: Backend, E: GroupElem<B>>(
    group: &BilinearGroup<B>,
    elems: impl IntoIterator<Item = E>,
) -> E {
    let mut acc = E::identity(group);
    for e in elems {
        acc = acc.mul(&e);
    }
    acc
}
