//! The transfer phase: blind decryption of one chosen record.

use rand::{CryptoRng, RngCore};

use crate::bilinear::{Backend, Gt};
use crate::gs::{commitment_pow, prove_ppe, verify_ppe, GsError};

use super::statements::{delta_statement, pi_statement};
use super::{
    g1_product, AttributeSecretKey, CiphertextRecord, Crs, ProtocolError, PublicKey, SecretKey,
    TransferRequest, TransferResponse, TransferSecret,
};

/// Blinds the chosen record's handle: `Req = c2 * B^v` with proof that the
/// handle comes from a valid record, plus the private unblinding mask
/// `Pri = H^v`. `sigma` is the record's index in the verified database; it
/// stays with the receiver.
pub fn transfer_request<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    record: &CiphertextRecord<B>,
    sigma: usize,
    rng: &mut R,
) -> Result<(TransferRequest<B>, TransferSecret<B>), ProtocolError> {
    if !record.matches_universe(&crs.universe) {
        return Err(ProtocolError::MalformedRecord);
    }
    let group = &crs.group;
    let v = group.random_scalar(rng);
    let req = record.c2.mul(&pk.blind_base.pow(&v));
    let pri = pk.response_mask.pow(&v);
    let com_hv = commitment_pow(&pk.com_h, &v);

    let system = pi_statement(crs, pk, &req);
    let xs = vec![g1_product(group, &record.c4), record.c2.clone()];
    let ys = vec![record.c1.clone(), group.g2().pow(&v)];
    let proof = prove_ppe(group, &crs.gs_r, &system, &xs, &ys, rng)?;

    Ok((
        TransferRequest { req, proof, com_hv },
        TransferSecret { sigma, v, pri },
    ))
}

/// Checks the request proof and answers with the masked decryption share
/// `Res = e(Req, h)` plus a proof that the same `h`, `gamma` from
/// database setup were used. An invalid request yields a refusal (the
/// null-string answer).
pub fn transfer_respond<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    sk: &SecretKey<B>,
    request: &TransferRequest<B>,
    rng: &mut R,
) -> Result<TransferResponse<B>, ProtocolError> {
    let group = &crs.group;
    let system = pi_statement(crs, pk, &request.req);
    match verify_ppe(group, &crs.gs_r, &system, &request.proof) {
        Ok(true) => {}
        _ => return Err(ProtocolError::ProofInvalid),
    }
    let res = group.pair(&request.req, &sk.h);

    let delta_sys = delta_statement(crs, pk, &request.req);
    let xs = vec![request.req.pow(&sk.gamma), sk.b_gamma.clone()];
    let ys = vec![sk.h.clone(), group.g2().clone()];
    let delta = prove_ppe(group, &crs.gs_s, &delta_sys, &xs, &ys, rng)?;

    Ok(TransferResponse { res, delta })
}

/// Verifies the response proof and evaluates the decryption equation
///
/// ```text
///        c3 * prod_l e(c4_l, d1_l) * Pri
///   ------------------------------------------
///   e(c2, d0) * prod_l e(c5_{l,t_l}, d3_l) * Res
/// ```
///
/// The result equals the record's payload exactly when the key's
/// attribute list satisfies the record's hidden policy; otherwise it is
/// some other group element. No error distinguishes the two cases — the
/// policy stays hidden either way.
pub fn transfer_finalize<B: Backend>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    ask: &AttributeSecretKey<B>,
    record: &CiphertextRecord<B>,
    secret: &TransferSecret<B>,
    response: &TransferResponse<B>,
) -> Result<Gt<B>, ProtocolError> {
    let group = &crs.group;
    crs.universe.validate_list(&ask.list)?;
    if !record.matches_universe(&crs.universe) {
        return Err(ProtocolError::MalformedRecord);
    }

    let req = record.c2.mul(&pk.blind_base.pow(&secret.v));
    let delta_sys = delta_statement(crs, pk, &req);
    match verify_ppe(group, &crs.gs_s, &delta_sys, &response.delta) {
        Ok(true) => {}
        _ => return Err(ProtocolError::ResponseProofInvalid),
    }

    let share_pairs: Vec<_> = record
        .c4
        .iter()
        .zip(ask.rows.iter().map(|row| &row.d1))
        .collect();
    let val1 = group.multi_pair(&share_pairs).map_err(GsError::from)?;

    let selected: Vec<_> = ask
        .list
        .choices
        .iter()
        .enumerate()
        .map(|(l, &t)| &record.c5[l][t])
        .collect();
    let slot_pairs: Vec<_> = selected
        .into_iter()
        .zip(ask.rows.iter().map(|row| &row.d3))
        .collect();
    let val2 = group.multi_pair(&slot_pairs).map_err(GsError::from)?;

    let numerator = record.c3.mul(&val1).mul(&secret.pri);
    let denominator = group
        .pair(&record.c2, &ask.d0)
        .mul(&val2)
        .mul(&response.res);
    Ok(numerator.div(&denominator))
}
