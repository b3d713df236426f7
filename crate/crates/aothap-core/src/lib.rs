//! Adaptive k-out-of-N oblivious transfer with hidden access policies.
//!
//! A sender publishes a policy-encrypted database; receivers obtain
//! attribute keys and adaptively decrypt chosen records without revealing
//! their choices or attributes. There is no attribute issuer: the sender
//! hands out attribute keys against a randomized, proof-carrying attribute
//! list. Every protocol message carries non-interactive proofs over
//! pairing product equations.
//!
//! Layering, bottom up:
//!
//! - [`bilinear`]: group arithmetic behind a backend trait, with a real
//!   BLS12-381 curve and an insecure integer mock for oracle tests.
//! - [`gs`]: commitments and proofs for pairing product equations, CRS
//!   generation in the sound and witness-indistinguishable settings,
//!   trapdoor extraction and equation-scoped simulation.
//! - [`attributes`]: attribute universes, lists, policies and the
//!   conjunctive satisfaction predicate.
//! - [`protocol`]: the four protocol phases (CRS setup, database setup
//!   with public verifiability, issue, transfer) as pure functions of
//!   their inputs and caller-supplied randomness.
//! - [`codec`] / [`artifacts`]: canonical binary encodings and the
//!   on-disk artifact files.
//! - [`testkit`]: trapdoor-powered oracles and operation counters used by
//!   the test suites and the bench command.
//!
//! The whole stack is generic over the pairing backend; [`Real`] and
//! [`MockBackend`] are the two concrete instantiations.

pub mod artifacts;
pub mod attributes;
pub mod bilinear;
pub mod codec;
pub mod gs;
pub mod protocol;
pub mod testkit;

pub use bilinear::{bilinear_setup, Backend, BilinearGroup, SecurityProfile};

/// The production backend (BLS12-381).
pub type Real = bilinear::Bls381;
/// The insecure test backend (integers mod a small prime).
pub type MockBackend = bilinear::Mock;

/// Pairing context over the real curve.
pub type RealGroup = BilinearGroup<Real>;
/// Pairing context over the mock backend.
pub type MockGroup = BilinearGroup<MockBackend>;
