//! Database setup: sender key generation, the key-consistency proof, and
//! record encryption with embedded (hidden) policies.

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::attributes::AccessPolicy;
use crate::bilinear::{Backend, Gt, Scalar, G2};
use crate::gs::{commit_g2, prove_ppe, verify_ppe, GsError, PpeProof};

use super::statements::psi_statement;
use super::{
    g1_product, CiphertextRecord, Crs, ProtocolError, PublicKey, SecretKey, SenderKeys,
};

/// Why `verify_db` rejected.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DbRejection {
    #[error("record {index} is malformed for this universe")]
    MalformedRecord { index: usize },
    #[error("record {index} failed the signature check")]
    RecordCheckFailed { index: usize },
    #[error("key-consistency proof failed verification")]
    KeyProofInvalid,
}

/// Secrets of one encrypted record, available through the testkit for
/// oracle tests. Never serialized.
#[derive(Clone, Debug)]
pub struct RecordOpening<B: Backend> {
    pub shares: Vec<Scalar<B>>,
    pub r: Scalar<B>,
}

/// Draws the sender key pair.
pub fn sender_keygen<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    rng: &mut R,
) -> (PublicKey<B>, SecretKey<B>) {
    let group = &crs.group;
    let w = group.random_scalar(rng);
    let x = group.random_scalar(rng);
    let alpha = group.random_nonzero_scalar(rng);
    let beta = group.random_nonzero_scalar(rng);
    let gamma = group.random_scalar(rng);

    let blind_base = group.g1().pow(&beta);
    let sig_pk = group.g1().pow(&x);
    let h = group.g2().pow(&gamma);
    let g2_w = group.g2().pow(&w);
    let payload_mask = group.pair(group.g1(), &g2_w);
    let response_mask = group.pair(&blind_base, &h);
    let (com_h, _) = commit_g2(group, &crs.gs_r, &h, rng);

    let sk = SecretKey {
        x,
        alpha: alpha.clone(),
        beta,
        gamma: gamma.clone(),
        w: w.clone(),
        b_gamma: blind_base.pow(&gamma),
        g1_w: group.g1().pow(&w),
        g1_alpha: group.g1().pow(&alpha),
        g2_w,
        g2_alpha: group.g2().pow(&alpha),
        h,
    };
    let pk = PublicKey {
        blind_base,
        sig_pk,
        payload_mask,
        response_mask,
        com_h,
    };
    (pk, sk)
}

/// Proves that the published key parts are consistent with the secrets
/// used for encryption (the proof `psi`).
pub fn prove_key_consistency<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    sk: &SecretKey<B>,
    rng: &mut R,
) -> Result<PpeProof<B>, GsError> {
    let system = psi_statement(crs, &pk.blind_base);
    let xs = vec![sk.g1_w.clone(), sk.g1_alpha.clone(), sk.b_gamma.clone()];
    let ys = vec![
        sk.g2_w.clone(),
        sk.h.clone(),
        sk.g2_alpha.clone(),
        crs.group.g2().clone(),
    ];
    prove_ppe(&crs.group, &crs.gs_s, &system, &xs, &ys, rng)
}

/// BB-style signature `g2^{1/(x+r)}`; undefined when `x + r = 0`.
pub(crate) fn bb_sign<B: Backend>(
    crs: &Crs<B>,
    x: &Scalar<B>,
    r: &Scalar<B>,
) -> Option<G2<B>> {
    let exp = x.add(r).invert()?;
    Some(crs.group.g2().pow(&exp))
}

pub(crate) fn encrypt_records_opened<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    sk: &SecretKey<B>,
    records: &[(Gt<B>, AccessPolicy)],
    rng: &mut R,
) -> Result<(Vec<CiphertextRecord<B>>, Vec<RecordOpening<B>>), ProtocolError> {
    let group = &crs.group;
    let universe = &crs.universe;
    if records.is_empty() {
        return Err(ProtocolError::EmptyDatabase);
    }
    let n = universe.attribute_count();
    let mut out = Vec::with_capacity(records.len());
    let mut openings = Vec::with_capacity(records.len());
    for (payload, policy) in records {
        universe.validate_policy(policy)?;
        let mut shares: Vec<Scalar<B>> = (0..n).map(|_| group.random_scalar(rng)).collect();
        let mut r = shares
            .iter()
            .fold(group.scalar_zero(), |acc, s| acc.add(s));
        // x + r = 0 would leave the signature undefined; redraw the last
        // share until it is not.
        while sk.x.add(&r).is_zero() {
            shares[n - 1] = group.random_scalar(rng);
            r = shares
                .iter()
                .fold(group.scalar_zero(), |acc, s| acc.add(s));
        }
        let c1 = bb_sign(crs, &sk.x, &r).expect("x + r is nonzero");
        let c2 = pk.blind_base.pow(&r);
        let c3 = payload
            .mul(&pk.payload_mask.pow(&r))
            .mul(&group.pair(&c2, &sk.h));
        let mut c4 = Vec::with_capacity(n);
        let mut c5 = Vec::with_capacity(n);
        for l in 0..n {
            c4.push(group.g1().pow(&shares[l]));
            let exp = sk.alpha.mul(&shares[l]);
            let mut row = Vec::with_capacity(universe.value_count(l));
            for t in 0..universe.value_count(l) {
                if policy.allow[l][t] {
                    row.push(crs.a_consts[l][t].pow(&exp));
                } else {
                    row.push(group.g1().pow(&group.random_scalar(rng)));
                }
            }
            c5.push(row);
        }
        out.push(CiphertextRecord { c1, c2, c3, c4, c5 });
        openings.push(RecordOpening { shares, r });
    }
    Ok((out, openings))
}

/// Encrypts one record per `(payload, policy)` pair. The pairing cost of
/// the whole call is one per record (inside `c3`).
pub fn encrypt_records<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    sk: &SecretKey<B>,
    records: &[(Gt<B>, AccessPolicy)],
    rng: &mut R,
) -> Result<Vec<CiphertextRecord<B>>, ProtocolError> {
    encrypt_records_opened(crs, pk, sk, records, rng).map(|(r, _)| r)
}

/// Runs the whole initialization phase: key generation, the proof `psi`,
/// and encryption of every record.
pub fn db_setup<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    records: &[(Gt<B>, AccessPolicy)],
    rng: &mut R,
) -> Result<(SenderKeys<B>, Vec<CiphertextRecord<B>>), ProtocolError> {
    let (pk, sk) = sender_keygen(crs, rng);
    let psi = prove_key_consistency(crs, &pk, &sk, rng)?;
    let cdb = encrypt_records(crs, &pk, &sk, records, rng)?;
    Ok((SenderKeys { pk, sk, psi }, cdb))
}

/// Public verification of a published database: every record must pass
/// the signature equation `e(prod_l c4_l * y, c1) = e(g1, g2)` and the
/// key proof must verify under the sender GS string.
pub fn verify_db<B: Backend>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    psi: &PpeProof<B>,
    records: &[CiphertextRecord<B>],
) -> Result<(), DbRejection> {
    let group = &crs.group;
    for (i, record) in records.iter().enumerate() {
        if !record.matches_universe(&crs.universe) {
            return Err(DbRejection::MalformedRecord { index: i });
        }
        let base = g1_product(group, &record.c4).mul(&pk.sig_pk);
        if group.pair(&base, &record.c1) != *group.gt_generator() {
            return Err(DbRejection::RecordCheckFailed { index: i });
        }
    }
    let system = psi_statement(crs, &pk.blind_base);
    match verify_ppe(group, &crs.gs_s, &system, psi) {
        Ok(true) => Ok(()),
        _ => Err(DbRejection::KeyProofInvalid),
    }
}
