//! Test-only oracles and instrumentation.
//!
//! These functions wield the CRS trapdoors and the sender's key material
//! the way the security analysis does: extracting committed witnesses
//! from request proofs, recovering a record's payload and hidden policy,
//! and counting group operations per protocol phase. Trapdoors and
//! secret-key views flow through dedicated types that the artifact codec
//! has no encoding for, so none of this can leak into published files.

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::attributes::{AccessPolicy, AttributeList};
use crate::bilinear::{Backend, G2, Gt};
use crate::gs::{extract_commitment_g1, extract_commitment_g2, GsError};
use crate::protocol::{
    self, g1_product, AttributeSecretKey, CiphertextRecord, Crs, CrsTrapdoors, IssueRequest,
    IssueResponse, IssueTrace, ProtocolError, RecordOpening, SecretKey, SenderKeys,
    TransferRequest,
};

pub use crate::bilinear::counters::{counted, CounterError, OpCounters};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("extracted witness for attribute {attribute} matches no CRS constant")]
    ForeignWitness { attribute: usize },
    #[error("request or record does not fit the universe")]
    Malformed,
    #[error(transparent)]
    Gs(#[from] GsError),
}

/// The slice of the sender secret key the record-extraction oracle needs.
/// Built from a borrowed key; never serialized.
#[derive(Clone, Copy, Debug)]
pub struct SkView<'a, B: Backend> {
    pub h: &'a G2<B>,
    pub g2_w: &'a G2<B>,
    pub g2_alpha: &'a G2<B>,
}

impl<'a, B: Backend> SkView<'a, B> {
    pub fn of(sk: &'a SecretKey<B>) -> Self {
        SkView {
            h: &sk.h,
            g2_w: &sk.g2_w,
            g2_alpha: &sk.g2_alpha,
        }
    }
}

/// Recovers the attribute list behind an issue request by extracting the
/// committed constants from the proof and matching them against the CRS
/// tables. A witness that matches no constant is reported as foreign.
pub fn extract_attribute_list<B: Backend>(
    crs: &Crs<B>,
    trapdoors: &CrsTrapdoors<B>,
    request: &IssueRequest<B>,
) -> Result<AttributeList, OracleError> {
    let n = crs.universe.attribute_count();
    if request.proof.c.len() != 2 * n {
        return Err(OracleError::Malformed);
    }
    let mut choices = Vec::with_capacity(n);
    for l in 0..n {
        let witness = extract_commitment_g1(&trapdoors.gs_r, &request.proof.c[l])?;
        let t = crs.a_consts[l]
            .iter()
            .position(|a| *a == witness)
            .ok_or(OracleError::ForeignWitness { attribute: l })?;
        choices.push(t);
    }
    Ok(AttributeList { choices })
}

/// Recovers the record index behind a transfer request by extracting the
/// committed record components and scanning the database. `None` means
/// the proof vouches for a record outside the database, which for an
/// accepting proof would be a signature forgery.
pub fn extract_transfer_index<B: Backend>(
    crs: &Crs<B>,
    trapdoors: &CrsTrapdoors<B>,
    records: &[CiphertextRecord<B>],
    request: &TransferRequest<B>,
) -> Result<Option<usize>, OracleError> {
    if request.proof.c.len() != 2 || request.proof.d.len() != 2 {
        return Err(OracleError::Malformed);
    }
    let share_product = extract_commitment_g1(&trapdoors.gs_r, &request.proof.c[0])?;
    let blinded_handle = extract_commitment_g1(&trapdoors.gs_r, &request.proof.c[1])?;
    let signature = extract_commitment_g2(&trapdoors.gs_r, &request.proof.d[0])?;
    for (i, record) in records.iter().enumerate() {
        if record.c1 == signature
            && record.c2 == blinded_handle
            && g1_product(&crs.group, &record.c4) == share_product
        {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Recovers a record's payload and hidden policy from the sender's view:
/// `m = c3 / (e(prod c4, g2^w) e(c2, h))`, and value `(l, t)` is allowed
/// iff `e(c5_{l,t}^{1/a_{l,t}}, g2) = e(c4_l, g2^alpha)`.
pub fn extract_record<B: Backend>(
    crs: &Crs<B>,
    trapdoors: &CrsTrapdoors<B>,
    sk_view: SkView<'_, B>,
    record: &CiphertextRecord<B>,
) -> Result<(Gt<B>, AccessPolicy), OracleError> {
    if !record.matches_universe(&crs.universe) {
        return Err(OracleError::Malformed);
    }
    let group = &crs.group;
    let shares = g1_product(group, &record.c4);
    let mask = group
        .pair(&shares, sk_view.g2_w)
        .mul(&group.pair(&record.c2, sk_view.h));
    let payload = record.c3.div(&mask);

    let mut allow = Vec::with_capacity(crs.universe.attribute_count());
    for l in 0..crs.universe.attribute_count() {
        let rhs = group.pair(&record.c4[l], sk_view.g2_alpha);
        let mut row = Vec::with_capacity(crs.universe.value_count(l));
        for t in 0..crs.universe.value_count(l) {
            let inv_a = trapdoors.a_exps[l][t]
                .invert()
                .expect("CRS exponents are nonzero");
            let lhs = group.pair(&record.c5[l][t].pow(&inv_a), group.g2());
            row.push(lhs == rhs);
        }
        allow.push(row);
    }
    Ok((payload, AccessPolicy { allow }))
}

/// `db_setup` that also returns each record's encryption randomness.
pub fn db_setup_traced<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    records: &[(Gt<B>, AccessPolicy)],
    rng: &mut R,
) -> Result<(SenderKeys<B>, Vec<CiphertextRecord<B>>, Vec<RecordOpening<B>>), ProtocolError> {
    let (pk, sk) = protocol::sender_keygen(crs, rng);
    let psi = protocol::prove_key_consistency(crs, &pk, &sk, rng)?;
    let (cdb, openings) = protocol::encrypt_records_opened(crs, &pk, &sk, records, rng)?;
    Ok((SenderKeys { pk, sk, psi }, cdb, openings))
}

/// `issue_respond` that also returns the sender-side randomness.
pub fn issue_respond_traced<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    sk: &SecretKey<B>,
    request: &IssueRequest<B>,
    rng: &mut R,
) -> Result<(IssueResponse<B>, IssueTrace<B>), ProtocolError> {
    protocol::issue_respond_traced_impl(crs, sk, request, rng)
}

/// Direct evaluation of the decryption equation from exponents, used to
/// check the pairing-computed value against the algebraic derivation.
pub struct DecryptionOracle<'a, B: Backend> {
    pub crs: &'a Crs<B>,
    pub trapdoors: &'a CrsTrapdoors<B>,
}

impl<'a, B: Backend> DecryptionOracle<'a, B> {
    /// `val1 = e(g1,g2)^{s*r + sum_l s_l a_{l,t_l} lambda_l}` computed in
    /// the exponent ring.
    pub fn val1(
        &self,
        opening: &RecordOpening<B>,
        trace: &IssueTrace<B>,
        ask: &AttributeSecretKey<B>,
    ) -> Gt<B> {
        let group = &self.crs.group;
        let mut exp = trace.s.mul(&opening.r);
        for (l, share) in opening.shares.iter().enumerate() {
            let a = &self.trapdoors.a_exps[l][ask.list.choices[l]];
            exp = exp.add(&share.mul(a).mul(&trace.lambdas[l]));
        }
        group.gt_generator().pow(&exp)
    }

    /// `val2 = e(g1,g2)^{sum_l s_l a_{l,t_l} lambda_l}` for a satisfying
    /// selection.
    pub fn val2(
        &self,
        opening: &RecordOpening<B>,
        trace: &IssueTrace<B>,
        ask: &AttributeSecretKey<B>,
    ) -> Gt<B> {
        let group = &self.crs.group;
        let mut exp = group.scalar_zero();
        for (l, share) in opening.shares.iter().enumerate() {
            let a = &self.trapdoors.a_exps[l][ask.list.choices[l]];
            exp = exp.add(&share.mul(a).mul(&trace.lambdas[l]));
        }
        group.gt_generator().pow(&exp)
    }
}

/// One row of the bench table.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub phase: String,
    pub label: String,
    pub counters: OpCounters,
    pub bytes: u64,
}

impl BenchRow {
    pub fn csv_header() -> &'static str {
        "phase,label,pairings,exp_g1,exp_g2,exp_gt,bytes"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.phase,
            self.label,
            self.counters.pairings,
            self.counters.exp_g1,
            self.counters.exp_g2,
            self.counters.exp_gt,
            self.bytes
        )
    }
}
