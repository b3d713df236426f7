//! BLS12-381 backend on top of arkworks.
//!
//! Encodings are the standard compressed point formats (48 bytes for G1,
//! 96 for G2), 32-byte little-endian scalars, and the canonical 576-byte
//! Fq12 tower encoding for target-group elements. Deserialization checks
//! curve and subgroup membership and rejects non-canonical byte strings by
//! re-encoding.

use ark_bls12_381::{Bls12_381, Fq12, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::Pairing;
use ark_ec::{AffineRepr, CurveGroup, Group};
use ark_ff::{Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};
use rand::RngCore;

use super::{Backend, EncodingError, SecurityProfile, SetupError};

const SCALAR_LEN: usize = 32;
const G1_LEN: usize = 48;
const G2_LEN: usize = 96;
const GT_LEN: usize = 576;

/// The 128-bit-level pairing backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bls381;

fn check_len(expected: usize, bytes: &[u8]) -> Result<(), EncodingError> {
    if bytes.len() != expected {
        return Err(EncodingError::MalformedLength {
            expected,
            got: bytes.len(),
        });
    }
    Ok(())
}

fn affine_from_bytes<A>(expected: usize, bytes: &[u8]) -> Result<A, EncodingError>
where
    A: AffineRepr + CanonicalSerialize + CanonicalDeserialize + ark_serialize::Valid,
{
    check_len(expected, bytes)?;
    let point = A::deserialize_with_mode(bytes, Compress::Yes, Validate::No)
        .map_err(|_| EncodingError::NonCanonical)?;
    // Validate::No skips the group checks; run them explicitly so the
    // failure maps to the right error code.
    if !point_valid(&point) {
        return Err(EncodingError::OffCurve);
    }
    let mut round = Vec::with_capacity(expected);
    point
        .serialize_compressed(&mut round)
        .map_err(|_| EncodingError::NonCanonical)?;
    if round != bytes {
        return Err(EncodingError::NonCanonical);
    }
    Ok(point)
}

fn point_valid<A: AffineRepr>(point: &A) -> bool {
    // Valid::check runs the on-curve and subgroup tests.
    point.check().is_ok()
}

impl Backend for Bls381 {
    type Params = ();
    type Scalar = Fr;
    type G1 = G1Projective;
    type G2 = G2Projective;
    type Gt = Fq12;

    const NAME: &'static str = "bls12-381";
    const TAG: u8 = 1;

    fn params_from_profile(profile: &SecurityProfile) -> Result<(), SetupError> {
        match profile {
            SecurityProfile::Standard128 => Ok(()),
            SecurityProfile::Mock(_) => Err(SetupError::UnsupportedProfile { backend: Self::NAME }),
        }
    }
    fn params_to_bytes(_: &()) -> Vec<u8> {
        Vec::new()
    }
    fn params_from_bytes(bytes: &[u8]) -> Result<(), EncodingError> {
        check_len(0, bytes)
    }

    fn scalar_len(_: &()) -> usize {
        SCALAR_LEN
    }
    fn g1_len(_: &()) -> usize {
        G1_LEN
    }
    fn g2_len(_: &()) -> usize {
        G2_LEN
    }
    fn gt_len(_: &()) -> usize {
        GT_LEN
    }

    fn scalar_zero(_: &()) -> Fr {
        Fr::zero()
    }
    fn scalar_one(_: &()) -> Fr {
        Fr::one()
    }
    fn scalar_from_u64(_: &(), v: u64) -> Fr {
        Fr::from(v)
    }
    fn scalar_random(_: &(), rng: &mut dyn RngCore) -> Fr {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        Fr::from_le_bytes_mod_order(&wide)
    }
    fn scalar_add(a: &Fr, b: &Fr) -> Fr {
        a + b
    }
    fn scalar_sub(a: &Fr, b: &Fr) -> Fr {
        a - b
    }
    fn scalar_mul(a: &Fr, b: &Fr) -> Fr {
        a * b
    }
    fn scalar_neg(a: &Fr) -> Fr {
        -*a
    }
    fn scalar_invert(a: &Fr) -> Option<Fr> {
        a.inverse()
    }
    fn scalar_is_zero(a: &Fr) -> bool {
        a.is_zero()
    }
    fn scalar_is_one(a: &Fr) -> bool {
        a.is_one()
    }
    fn scalar_to_bytes(a: &Fr) -> Vec<u8> {
        let mut out = Vec::with_capacity(SCALAR_LEN);
        a.serialize_compressed(&mut out).expect("scalar encoding");
        out
    }
    fn scalar_from_bytes(_: &(), bytes: &[u8]) -> Result<Fr, EncodingError> {
        check_len(SCALAR_LEN, bytes)?;
        Fr::deserialize_compressed(bytes).map_err(|_| EncodingError::NonCanonical)
    }

    fn g1_generator(_: &()) -> G1Projective {
        G1Projective::generator()
    }
    fn g1_identity(_: &()) -> G1Projective {
        G1Projective::zero()
    }
    fn g1_is_identity(a: &G1Projective) -> bool {
        a.is_zero()
    }
    fn g1_mul(a: &G1Projective, b: &G1Projective) -> G1Projective {
        a + b
    }
    fn g1_inv(a: &G1Projective) -> G1Projective {
        -*a
    }
    fn g1_pow(a: &G1Projective, e: &Fr) -> G1Projective {
        a.mul_bigint(e.into_bigint())
    }
    fn g1_to_bytes(a: &G1Projective) -> Vec<u8> {
        let mut out = Vec::with_capacity(G1_LEN);
        a.into_affine().serialize_compressed(&mut out).expect("G1 encoding");
        out
    }
    fn g1_from_bytes(_: &(), bytes: &[u8]) -> Result<G1Projective, EncodingError> {
        affine_from_bytes::<G1Affine>(G1_LEN, bytes).map(Into::into)
    }

    fn g2_generator(_: &()) -> G2Projective {
        G2Projective::generator()
    }
    fn g2_identity(_: &()) -> G2Projective {
        G2Projective::zero()
    }
    fn g2_is_identity(a: &G2Projective) -> bool {
        a.is_zero()
    }
    fn g2_mul(a: &G2Projective, b: &G2Projective) -> G2Projective {
        a + b
    }
    fn g2_inv(a: &G2Projective) -> G2Projective {
        -*a
    }
    fn g2_pow(a: &G2Projective, e: &Fr) -> G2Projective {
        a.mul_bigint(e.into_bigint())
    }
    fn g2_to_bytes(a: &G2Projective) -> Vec<u8> {
        let mut out = Vec::with_capacity(G2_LEN);
        a.into_affine().serialize_compressed(&mut out).expect("G2 encoding");
        out
    }
    fn g2_from_bytes(_: &(), bytes: &[u8]) -> Result<G2Projective, EncodingError> {
        affine_from_bytes::<G2Affine>(G2_LEN, bytes).map(Into::into)
    }

    fn gt_identity(_: &()) -> Fq12 {
        Fq12::one()
    }
    fn gt_is_identity(a: &Fq12) -> bool {
        a.is_one()
    }
    fn gt_mul(a: &Fq12, b: &Fq12) -> Fq12 {
        a * b
    }
    fn gt_inv(a: &Fq12) -> Fq12 {
        a.inverse().expect("target-group element is a unit")
    }
    fn gt_pow(a: &Fq12, e: &Fr) -> Fq12 {
        a.pow(e.into_bigint())
    }
    fn gt_to_bytes(a: &Fq12) -> Vec<u8> {
        let mut out = Vec::with_capacity(GT_LEN);
        a.serialize_compressed(&mut out).expect("GT encoding");
        out
    }
    fn gt_from_bytes(_: &(), bytes: &[u8]) -> Result<Fq12, EncodingError> {
        check_len(GT_LEN, bytes)?;
        let f = Fq12::deserialize_with_mode(bytes, Compress::Yes, Validate::No)
            .map_err(|_| EncodingError::NonCanonical)?;
        // Membership in GT, the order-r multiplicative subgroup.
        if f.is_zero() || !f.pow(Fr::MODULUS).is_one() {
            return Err(EncodingError::OffCurve);
        }
        Ok(f)
    }

    fn pairing(a: &G1Projective, b: &G2Projective) -> Fq12 {
        Bls12_381::pairing(a.into_affine(), b.into_affine()).0
    }

    fn multi_pairing(pairs: &[(&G1Projective, &G2Projective)]) -> Fq12 {
        let lhs: Vec<G1Projective> = pairs.iter().map(|(a, _)| **a).collect();
        let rhs: Vec<G2Projective> = pairs.iter().map(|(_, b)| **b).collect();
        let lhs = G1Projective::normalize_batch(&lhs);
        let rhs = G2Projective::normalize_batch(&rhs);
        Bls12_381::multi_pairing(lhs, rhs).0
    }

    fn pairing_products_equal(
        lhs: &[(&G1Projective, &G2Projective)],
        rhs: &[(&G1Projective, &G2Projective)],
        rhs_extra: &Fq12,
    ) -> bool {
        // One Miller loop over lhs plus the negated rhs, one final
        // exponentiation, compared against the extra factor.
        let mut g1s: Vec<G1Projective> = lhs.iter().map(|(a, _)| **a).collect();
        g1s.extend(rhs.iter().map(|(a, _)| -**a));
        let mut g2s: Vec<G2Projective> = lhs.iter().map(|(_, b)| **b).collect();
        g2s.extend(rhs.iter().map(|(_, b)| **b));
        let g1s = G1Projective::normalize_batch(&g1s);
        let g2s = G2Projective::normalize_batch(&g2s);
        let ml = Bls12_381::multi_miller_loop(g1s, g2s);
        match Bls12_381::final_exponentiation(ml) {
            Some(out) => out.0 == *rhs_extra,
            None => false,
        }
    }
}
