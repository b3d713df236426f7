//! The four protocol phases as deterministic functions of their inputs
//! and caller-supplied randomness.
//!
//! * CRS setup publishes the pairing context, two sound Groth-Sahai
//!   strings (one for the sender's proofs, one for receivers') and a pair
//!   of group constants `A_{l,t} = g1^{a_{l,t}}`, `B_{l,t} = g2^{a_{l,t}}`
//!   per attribute value.
//! * Database setup generates the sender key pair, a proof `psi` of key
//!   consistency, and one ciphertext record per message. Records are
//!   publicly verifiable against a short signature equation.
//! * Issue hands a receiver an attribute secret key against a randomized,
//!   proof-carrying attribute list; the sender learns nothing about the
//!   list.
//! * Transfer blindly decrypts one chosen record per round; the sender
//!   learns neither the index nor whether the receiver's attributes
//!   satisfy the record's hidden policy.
//!
//! Nothing here keeps session state; quota and approval policies live in
//! the wire layer.

mod dbsetup;
mod issue;
pub mod statements;
mod transfer;

#[cfg(test)]
mod tests;

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::attributes::{AttrError, AttributeList, AttributeUniverse};
use crate::bilinear::{Backend, BilinearGroup, G1, G2, Gt, Scalar};
use crate::gs::{gs_crs_gen, CommitmentG2, CrsMode, GsCrs, GsError, GsTrapdoor, PpeProof};

pub use dbsetup::{
    db_setup, encrypt_records, prove_key_consistency, sender_keygen, verify_db, DbRejection,
    RecordOpening,
};
pub(crate) use dbsetup::encrypt_records_opened;
pub use issue::{ask_check, issue_finalize, issue_request, issue_respond, IssueTrace};
pub(crate) use issue::issue_respond_traced_impl;
pub use transfer::{transfer_finalize, transfer_request, transfer_respond};

#[derive(Debug, Error)]
pub enum ProtocolError {
    /// The request's proof failed verification; mirrors the sender
    /// answering with a null string.
    #[error("request proof failed verification")]
    ProofInvalid,
    /// The response's proof failed verification; mirrors the receiver
    /// outputting a null string.
    #[error("response proof failed verification")]
    ResponseProofInvalid,
    #[error("attribute key check failed at attribute {attribute}")]
    KeyCheckFailed { attribute: usize },
    #[error("record is malformed for this universe")]
    MalformedRecord,
    #[error("database must contain at least one record")]
    EmptyDatabase,
    #[error(transparent)]
    Attr(#[from] AttrError),
    #[error(transparent)]
    Gs(#[from] GsError),
}

/// The protocol's common reference string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crs<B: Backend> {
    pub group: BilinearGroup<B>,
    pub universe: AttributeUniverse,
    /// Sound GS string for the sender's proofs (psi, delta).
    pub gs_s: GsCrs<B>,
    /// Sound GS string for receiver proofs (phi, pi).
    pub gs_r: GsCrs<B>,
    /// `A_{l,t} = g1^{a_{l,t}}`, ragged by the universe.
    pub a_consts: Vec<Vec<G1<B>>>,
    /// `B_{l,t} = g2^{a_{l,t}}`.
    pub b_consts: Vec<Vec<G2<B>>>,
}

/// CRS generation secrets. Test-only: the artifact codec has no encoding
/// for this type, so it can never leak into a published CRS.
#[derive(Clone, Debug)]
pub struct CrsTrapdoors<B: Backend> {
    pub a_exps: Vec<Vec<Scalar<B>>>,
    pub gs_s: GsTrapdoor<B>,
    pub gs_r: GsTrapdoor<B>,
}

impl<B: Backend> Crs<B> {
    pub fn attribute_const_g1(&self, l: usize, t: usize) -> &G1<B> {
        &self.a_consts[l][t]
    }
    pub fn attribute_const_g2(&self, l: usize, t: usize) -> &G2<B> {
        &self.b_consts[l][t]
    }

    /// Number of group elements the serialized CRS carries: two GS
    /// strings of 18 vectors-entries each plus a constant pair per
    /// attribute value.
    pub fn element_count(&self) -> usize {
        2 * self.universe.total_values() + 36
    }

    /// Public discrete-log consistency check of the constant tables:
    /// `e(A_{l,t}, g2) = e(g1, B_{l,t})` for every value.
    pub fn check_constants(&self) -> bool {
        for l in 0..self.universe.attribute_count() {
            for t in 0..self.universe.value_count(l) {
                let lhs = self.group.pair(&self.a_consts[l][t], self.group.g2());
                let rhs = self.group.pair(self.group.g1(), &self.b_consts[l][t]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

/// Generates the protocol CRS over an existing pairing context. Trapdoors
/// are returned only when explicitly requested and exist for the test
/// oracles; production callers drop them.
pub fn crs_setup<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    universe: &AttributeUniverse,
    rng: &mut R,
    emit_trapdoors: bool,
) -> (Crs<B>, Option<CrsTrapdoors<B>>) {
    let n = universe.attribute_count();
    let mut a_exps = Vec::with_capacity(n);
    let mut a_consts = Vec::with_capacity(n);
    let mut b_consts = Vec::with_capacity(n);
    for l in 0..n {
        let mut row_e = Vec::with_capacity(universe.value_count(l));
        let mut row_a = Vec::with_capacity(universe.value_count(l));
        let mut row_b = Vec::with_capacity(universe.value_count(l));
        for _ in 0..universe.value_count(l) {
            // Nonzero keeps the constants invertible for the extraction
            // oracle.
            let a = group.random_nonzero_scalar(rng);
            row_a.push(group.g1().pow(&a));
            row_b.push(group.g2().pow(&a));
            row_e.push(a);
        }
        a_exps.push(row_e);
        a_consts.push(row_a);
        b_consts.push(row_b);
    }
    let (gs_s, td_s) = gs_crs_gen(group, CrsMode::Sound, rng);
    let (gs_r, td_r) = gs_crs_gen(group, CrsMode::Sound, rng);
    let crs = Crs {
        group: group.clone(),
        universe: universe.clone(),
        gs_s,
        gs_r,
        a_consts,
        b_consts,
    };
    let tds = emit_trapdoors.then_some(CrsTrapdoors {
        a_exps,
        gs_s: td_s,
        gs_r: td_r,
    });
    (crs, tds)
}

/// Sender public key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey<B: Backend> {
    /// `B = g1^{beta}`, the base every request is blinded against.
    pub blind_base: G1<B>,
    /// `y = g1^x`, the signature verification key for record validity.
    pub sig_pk: G1<B>,
    /// `Y = e(g1, g2^w)`, the payload mask.
    pub payload_mask: Gt<B>,
    /// `H = e(B, h)`, the response mask.
    pub response_mask: Gt<B>,
    /// Commitment to `h` under the receiver GS string; receivers
    /// re-randomize it by exponentiation during transfer.
    pub com_h: CommitmentG2<B>,
}

/// Sender secret key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey<B: Backend> {
    pub x: Scalar<B>,
    pub alpha: Scalar<B>,
    pub beta: Scalar<B>,
    pub gamma: Scalar<B>,
    pub w: Scalar<B>,
    /// `h = g2^{gamma}`.
    pub h: G2<B>,
    /// `B^{gamma}`.
    pub b_gamma: G1<B>,
    pub g1_w: G1<B>,
    pub g1_alpha: G1<B>,
    pub g2_w: G2<B>,
    pub g2_alpha: G2<B>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SenderKeys<B: Backend> {
    pub pk: PublicKey<B>,
    pub sk: SecretKey<B>,
    /// Key-consistency proof over the sender GS string.
    pub psi: PpeProof<B>,
}

/// One database entry. The policy is embedded in `c5` and never appears
/// in clear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiphertextRecord<B: Backend> {
    /// `g2^{1/(x + r)}`, a short signature binding the record randomness.
    pub c1: G2<B>,
    /// `B^r`.
    pub c2: G1<B>,
    /// `m * Y^r * e(c2, h)`.
    pub c3: Gt<B>,
    /// `g1^{s_l}` per attribute; the shares `s_l` sum to `r`.
    pub c4: Vec<G1<B>>,
    /// Per value `(l, t)`: `A_{l,t}^{alpha * s_l}` when the policy allows
    /// it, a fresh random `g1^z` otherwise.
    pub c5: Vec<Vec<G1<B>>>,
}

impl<B: Backend> CiphertextRecord<B> {
    /// Structural fit against a universe.
    pub fn matches_universe(&self, universe: &AttributeUniverse) -> bool {
        self.c4.len() == universe.attribute_count()
            && self.c5.len() == universe.attribute_count()
            && self
                .c5
                .iter()
                .enumerate()
                .all(|(l, row)| row.len() == universe.value_count(l))
    }
}

/// Receiver's attribute secret key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeSecretKey<B: Backend> {
    pub list: AttributeList,
    /// `d0 = g2^{(w + s) / beta}`.
    pub d0: G2<B>,
    pub rows: Vec<AskRow<B>>,
}

/// Per-attribute key material: `d1 = g2^{s + a_{l,t} lambda_l}`,
/// `d2 = g2^{lambda_l}`, `d3 = g2^{lambda_l / alpha}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AskRow<B: Backend> {
    pub d1: G2<B>,
    pub d2: G2<B>,
    pub d3: G2<B>,
}

/// Issue round trip: the receiver sends randomized attribute constants
/// with a proof, the sender answers with a blinded key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssueRequest<B: Backend> {
    /// `R_l = B_{l,t_l} * g2^{z_l}`.
    pub randomized: Vec<G2<B>>,
    /// Proof phi that each `R_l` randomizes some CRS constant.
    pub proof: PpeProof<B>,
}

/// Receiver-side issue secrets: the chosen list and the blinders `z_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssueSecret<B: Backend> {
    pub list: AttributeList,
    pub blinders: Vec<Scalar<B>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssueResponse<B: Backend> {
    pub d0: G2<B>,
    pub rows: Vec<IssueResponseRow<B>>,
}

/// `d1_blinded = g2^s * R_l^{lambda_l}` still carries the receiver's
/// blinder; finalize strips it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssueResponseRow<B: Backend> {
    pub d1_blinded: G2<B>,
    pub d2: G2<B>,
    pub d3: G2<B>,
}

/// Transfer round trip: a blinded record handle plus proof, answered by a
/// masked decryption share with proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferRequest<B: Backend> {
    /// `Req = c2 * B^v`.
    pub req: G1<B>,
    /// Proof pi: the handle blinds a valid record of the database.
    pub proof: PpeProof<B>,
    /// `Com'(h)^v`; carried for the benefit of the security analysis and
    /// ignored by the sender.
    pub com_hv: CommitmentG2<B>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferSecret<B: Backend> {
    pub sigma: usize,
    pub v: Scalar<B>,
    /// `Pri = H^v`.
    pub pri: Gt<B>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferResponse<B: Backend> {
    /// `Res = e(Req, h)`.
    pub res: Gt<B>,
    /// Proof delta that the same `h`, `gamma` from database setup were
    /// used.
    pub delta: PpeProof<B>,
}

pub(crate) fn g1_product<B: Backend>(group: &BilinearGroup<B>, elems: &[G1<B>]) -> G1<B> {
    let mut acc = group.g1_identity();
    for e in elems {
        acc = acc.mul(e);
    }
    acc
}
