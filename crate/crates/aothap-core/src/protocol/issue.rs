//! The issue phase: a receiver obtains an attribute secret key for its
//! list without revealing the list.

use rand::{CryptoRng, RngCore};

use crate::attributes::AttributeList;
use crate::bilinear::{Backend, Scalar, G1};
use crate::gs::{prove_ppe, verify_ppe};

use super::statements::phi_statement;
use super::{
    AskRow, AttributeSecretKey, Crs, IssueRequest, IssueResponse, IssueResponseRow, IssueSecret,
    ProtocolError, PublicKey, SecretKey,
};

/// Sender-side randomness of one issue response, available through the
/// testkit for oracle tests.
#[derive(Clone, Debug)]
pub struct IssueTrace<B: Backend> {
    pub s: Scalar<B>,
    pub lambdas: Vec<Scalar<B>>,
}

/// Randomizes the receiver's attribute list: `R_l = B_{l,t_l} * g2^{z_l}`
/// with a proof that each `R_l` blinds some CRS constant. The returned
/// secret holds the blinders needed to strip the response.
pub fn issue_request<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    list: &AttributeList,
    rng: &mut R,
) -> Result<(IssueRequest<B>, IssueSecret<B>), ProtocolError> {
    crs.universe.validate_list(list)?;
    let group = &crs.group;
    let n = crs.universe.attribute_count();

    let blinders: Vec<Scalar<B>> = (0..n).map(|_| group.random_scalar(rng)).collect();
    let randomized: Vec<_> = (0..n)
        .map(|l| {
            crs.b_consts[l][list.choices[l]].mul(&group.g2().pow(&blinders[l]))
        })
        .collect();

    // Witnesses: the chosen constants, then the blinding shadows
    // T_l = g1^{z_l}.
    let mut xs: Vec<G1<B>> = (0..n)
        .map(|l| crs.a_consts[l][list.choices[l]].clone())
        .collect();
    xs.extend(blinders.iter().map(|z| group.g1().pow(z)));

    let system = phi_statement(crs, &randomized);
    let proof = prove_ppe(group, &crs.gs_r, &system, &xs, &[], rng)?;

    Ok((
        IssueRequest { randomized, proof },
        IssueSecret {
            list: list.clone(),
            blinders,
        },
    ))
}

/// Checks the request proof and, if valid, answers with a blinded
/// attribute key. An invalid proof yields a refusal, mirroring the
/// sender's approval bit being zero.
pub fn issue_respond<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    sk: &SecretKey<B>,
    request: &IssueRequest<B>,
    rng: &mut R,
) -> Result<IssueResponse<B>, ProtocolError> {
    issue_respond_traced_impl(crs, sk, request, rng).map(|(resp, _)| resp)
}

pub(crate) fn issue_respond_traced_impl<B: Backend, R: RngCore + CryptoRng>(
    crs: &Crs<B>,
    sk: &SecretKey<B>,
    request: &IssueRequest<B>,
    rng: &mut R,
) -> Result<(IssueResponse<B>, IssueTrace<B>), ProtocolError> {
    let group = &crs.group;
    if request.randomized.len() != crs.universe.attribute_count() {
        return Err(ProtocolError::ProofInvalid);
    }
    let system = phi_statement(crs, &request.randomized);
    match verify_ppe(group, &crs.gs_r, &system, &request.proof) {
        Ok(true) => {}
        _ => return Err(ProtocolError::ProofInvalid),
    }
    let s = group.random_scalar(rng);
    let lambdas: Vec<Scalar<B>> = (0..crs.universe.attribute_count())
        .map(|_| group.random_scalar(rng))
        .collect();
    let resp = issue_respond_with(crs, sk, request, &s, &lambdas);
    Ok((resp, IssueTrace { s, lambdas }))
}

/// Deterministic core of the response: `d0 = g2^{(w+s)/beta}` and per
/// attribute `d'_{l,1} = g2^s * R_l^{lambda_l}`, `d2 = g2^{lambda_l}`,
/// `d3 = g2^{lambda_l / alpha}`. The same `s` spans all attributes.
pub(crate) fn issue_respond_with<B: Backend>(
    crs: &Crs<B>,
    sk: &SecretKey<B>,
    request: &IssueRequest<B>,
    s: &Scalar<B>,
    lambdas: &[Scalar<B>],
) -> IssueResponse<B> {
    let group = &crs.group;
    let beta_inv = sk.beta.invert().expect("beta is nonzero");
    let alpha_inv = sk.alpha.invert().expect("alpha is nonzero");
    let d0 = group.g2().pow(&sk.w.add(s).mul(&beta_inv));
    let g2_s = group.g2().pow(s);
    let rows = request
        .randomized
        .iter()
        .zip(lambdas)
        .map(|(r_l, lambda)| IssueResponseRow {
            d1_blinded: g2_s.mul(&r_l.pow(lambda)),
            d2: group.g2().pow(lambda),
            d3: group.g2().pow(&lambda.mul(&alpha_inv)),
        })
        .collect();
    IssueResponse { d0, rows }
}

/// The public per-attribute key check:
/// `e(g1, d1_l) * Y / e(B, d0) = e(A_{l,t_l}, d2_l)`. Returns the first
/// failing attribute index.
pub fn ask_check<B: Backend>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    ask: &AttributeSecretKey<B>,
) -> Result<(), usize> {
    let group = &crs.group;
    let denom = group.pair(&pk.blind_base, &ask.d0);
    for (l, row) in ask.rows.iter().enumerate() {
        let lhs = group
            .pair(group.g1(), &row.d1)
            .mul(&pk.payload_mask)
            .div(&denom);
        let rhs = group.pair(&crs.a_consts[l][ask.list.choices[l]], &row.d2);
        if lhs != rhs {
            return Err(l);
        }
    }
    Ok(())
}

/// Strips the blinders from the response (`d1_l = d'_{l,1} * d2_l^{-z_l}`)
/// and accepts the key only if the check equation holds for every
/// attribute.
pub fn issue_finalize<B: Backend>(
    crs: &Crs<B>,
    pk: &PublicKey<B>,
    secret: &IssueSecret<B>,
    response: &IssueResponse<B>,
) -> Result<AttributeSecretKey<B>, ProtocolError> {
    if response.rows.len() != crs.universe.attribute_count() {
        return Err(ProtocolError::KeyCheckFailed { attribute: 0 });
    }
    let rows = response
        .rows
        .iter()
        .zip(&secret.blinders)
        .map(|(row, z)| AskRow {
            d1: row.d1_blinded.mul(&row.d2.pow(&z.neg())),
            d2: row.d2.clone(),
            d3: row.d3.clone(),
        })
        .collect();
    let ask = AttributeSecretKey {
        list: secret.list.clone(),
        d0: response.d0.clone(),
        rows,
    };
    ask_check(crs, pk, &ask).map_err(|attribute| ProtocolError::KeyCheckFailed { attribute })?;
    Ok(ask)
}
