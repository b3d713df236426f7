//! Canonical binary encodings for protocol structures.
//!
//! Counts are big-endian; group elements use the backend's fixed-length
//! encodings, so every structure's length is derivable from the universe
//! and the small count headers. Decoding validates every embedded group
//! element (length, canonicity, curve and subgroup membership).

use thiserror::Error;

use crate::attributes::{AttributeDef, AttributeList, AttributeUniverse};
use crate::bilinear::{Backend, BilinearGroup, EncodingError, G1, G2, Gt, Scalar};
use crate::gs::{
    CommitmentG1, CommitmentG2, CrsMode, EquationProof, GsCrs, PpeProof, Vec3,
};
use crate::protocol::{
    AskRow, AttributeSecretKey, CiphertextRecord, Crs, IssueRequest, IssueResponse,
    IssueResponseRow, IssueSecret, PublicKey, SecretKey, TransferRequest, TransferResponse,
    TransferSecret,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("{0} trailing bytes after value")]
    TrailingBytes(usize),
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown tag {0}")]
    UnknownTag(u8),
    #[error("count field out of range")]
    CountOutOfRange,
    #[error("invalid group element: {0}")]
    Element(#[from] EncodingError),
    #[error("invalid value: {0}")]
    BadValue(String),
}

/// Cursor over an input buffer.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.buf.len() - self.pos < n {
            return Err(CodecError::UnexpectedEof);
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn finish(self) -> Result<(), CodecError> {
        let rest = self.buf.len() - self.pos;
        if rest != 0 {
            return Err(CodecError::TrailingBytes(rest));
        }
        Ok(())
    }
}

pub fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_be_bytes());
}
pub fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}
pub fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn put_string(out: &mut Vec<u8>, s: &str) {
    put_u16(out, s.len() as u16);
    out.extend_from_slice(s.as_bytes());
}

fn get_string(r: &mut Reader<'_>) -> Result<String, CodecError> {
    let len = r.u16()? as usize;
    let bytes = r.take(len)?;
    String::from_utf8(bytes.to_vec()).map_err(|_| CodecError::BadValue("non-utf8 string".into()))
}

const MAX_COUNT: usize = 1 << 20;

fn checked_count(v: usize) -> Result<usize, CodecError> {
    if v > MAX_COUNT {
        return Err(CodecError::CountOutOfRange);
    }
    Ok(v)
}

// Group element helpers.

pub fn put_g1<B: Backend>(out: &mut Vec<u8>, e: &G1<B>) {
    out.extend_from_slice(&e.to_bytes());
}
pub fn put_g2<B: Backend>(out: &mut Vec<u8>, e: &G2<B>) {
    out.extend_from_slice(&e.to_bytes());
}
pub fn put_gt<B: Backend>(out: &mut Vec<u8>, e: &Gt<B>) {
    out.extend_from_slice(&e.to_bytes());
}
pub fn put_scalar<B: Backend>(out: &mut Vec<u8>, e: &Scalar<B>) {
    out.extend_from_slice(&e.to_bytes());
}

pub fn get_g1<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<G1<B>, CodecError> {
    Ok(group.g1_from_bytes(r.take(group.g1_len())?)?)
}
pub fn get_g2<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<G2<B>, CodecError> {
    Ok(group.g2_from_bytes(r.take(group.g2_len())?)?)
}
pub fn get_gt<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<Gt<B>, CodecError> {
    Ok(group.gt_from_bytes(r.take(group.gt_len())?)?)
}
pub fn get_scalar<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<Scalar<B>, CodecError> {
    Ok(group.scalar_from_bytes(r.take(group.scalar_len())?)?)
}

fn put_vec3_g1<B: Backend>(out: &mut Vec<u8>, v: &Vec3<G1<B>>) {
    for e in v.iter() {
        put_g1(out, e);
    }
}
fn put_vec3_g2<B: Backend>(out: &mut Vec<u8>, v: &Vec3<G2<B>>) {
    for e in v.iter() {
        put_g2(out, e);
    }
}
fn get_vec3_g1<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<Vec3<G1<B>>, CodecError> {
    Ok(Vec3::new(get_g1(r, group)?, get_g1(r, group)?, get_g1(r, group)?))
}
fn get_vec3_g2<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<Vec3<G2<B>>, CodecError> {
    Ok(Vec3::new(get_g2(r, group)?, get_g2(r, group)?, get_g2(r, group)?))
}

// Universe.

pub fn put_universe(out: &mut Vec<u8>, u: &AttributeUniverse) {
    put_u16(out, u.attribute_count() as u16);
    for attr in u.attributes() {
        put_string(out, &attr.name);
        put_u16(out, attr.values.len() as u16);
        for v in &attr.values {
            put_string(out, v);
        }
    }
}

pub fn get_universe(r: &mut Reader<'_>) -> Result<AttributeUniverse, CodecError> {
    let n = checked_count(r.u16()? as usize)?;
    let mut attrs = Vec::with_capacity(n);
    for _ in 0..n {
        let name = get_string(r)?;
        let n_l = checked_count(r.u16()? as usize)?;
        let values = (0..n_l).map(|_| get_string(r)).collect::<Result<_, _>>()?;
        attrs.push(AttributeDef { name, values });
    }
    AttributeUniverse::new(attrs).map_err(|e| CodecError::BadValue(e.to_string()))
}

// Proofs. Per-equation tag byte: 1 = P only, 2 = P' only, 3 = both.

pub fn put_proof<B: Backend>(out: &mut Vec<u8>, proof: &PpeProof<B>) {
    put_u16(out, proof.c.len() as u16);
    put_u16(out, proof.d.len() as u16);
    put_u16(out, proof.equations.len() as u16);
    for com in &proof.c {
        put_vec3_g1(out, &com.vec);
    }
    for com in &proof.d {
        put_vec3_g2(out, &com.vec);
    }
    for eq in &proof.equations {
        let tag = match (&eq.p, &eq.p_prime) {
            (Some(_), None) => 1u8,
            (None, Some(_)) => 2,
            (Some(_), Some(_)) => 3,
            (None, None) => 0,
        };
        out.push(tag);
        if let Some(p) = &eq.p {
            for v in p {
                put_vec3_g2(out, v);
            }
        }
        if let Some(pp) = &eq.p_prime {
            for v in pp {
                put_vec3_g1(out, v);
            }
        }
    }
}

pub fn get_proof<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<PpeProof<B>, CodecError> {
    let n1 = checked_count(r.u16()? as usize)?;
    let n2 = checked_count(r.u16()? as usize)?;
    let n_eqs = checked_count(r.u16()? as usize)?;
    let c = (0..n1)
        .map(|_| Ok(CommitmentG1 { vec: get_vec3_g1(r, group)? }))
        .collect::<Result<_, CodecError>>()?;
    let d = (0..n2)
        .map(|_| Ok(CommitmentG2 { vec: get_vec3_g2(r, group)? }))
        .collect::<Result<_, CodecError>>()?;
    let mut equations = Vec::with_capacity(n_eqs);
    for _ in 0..n_eqs {
        let tag = r.u8()?;
        let p = if tag & 1 != 0 {
            Some([
                get_vec3_g2(r, group)?,
                get_vec3_g2(r, group)?,
                get_vec3_g2(r, group)?,
            ])
        } else {
            None
        };
        let p_prime = if tag & 2 != 0 {
            Some([
                get_vec3_g1(r, group)?,
                get_vec3_g1(r, group)?,
                get_vec3_g1(r, group)?,
            ])
        } else {
            None
        };
        if tag == 0 || tag > 3 {
            return Err(CodecError::UnknownTag(tag));
        }
        equations.push(EquationProof { p, p_prime });
    }
    Ok(PpeProof { c, d, equations })
}

// GS CRS.

pub fn put_gs_crs<B: Backend>(out: &mut Vec<u8>, crs: &GsCrs<B>) {
    out.push(match crs.mode {
        CrsMode::Sound => 0,
        CrsMode::Wi => 1,
    });
    for u in &crs.u {
        put_vec3_g1(out, u);
    }
    for v in &crs.v {
        put_vec3_g2(out, v);
    }
}

pub fn get_gs_crs<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<GsCrs<B>, CodecError> {
    let mode = match r.u8()? {
        0 => CrsMode::Sound,
        1 => CrsMode::Wi,
        t => return Err(CodecError::UnknownTag(t)),
    };
    let u = [
        get_vec3_g1(r, group)?,
        get_vec3_g1(r, group)?,
        get_vec3_g1(r, group)?,
    ];
    let v = [
        get_vec3_g2(r, group)?,
        get_vec3_g2(r, group)?,
        get_vec3_g2(r, group)?,
    ];
    Ok(GsCrs { mode, u, v })
}

// Protocol CRS body (without the artifact header; see `artifacts`).

pub fn put_crs_body<B: Backend>(out: &mut Vec<u8>, crs: &Crs<B>) {
    put_universe(out, &crs.universe);
    put_gs_crs(out, &crs.gs_s);
    put_gs_crs(out, &crs.gs_r);
    for row in &crs.a_consts {
        for e in row {
            put_g1(out, e);
        }
    }
    for row in &crs.b_consts {
        for e in row {
            put_g2(out, e);
        }
    }
}

pub fn get_crs_body<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<Crs<B>, CodecError> {
    let universe = get_universe(r)?;
    let gs_s = get_gs_crs(r, group)?;
    let gs_r = get_gs_crs(r, group)?;
    let mut a_consts = Vec::with_capacity(universe.attribute_count());
    for l in 0..universe.attribute_count() {
        a_consts.push(
            (0..universe.value_count(l))
                .map(|_| get_g1(r, group))
                .collect::<Result<_, _>>()?,
        );
    }
    let mut b_consts = Vec::with_capacity(universe.attribute_count());
    for l in 0..universe.attribute_count() {
        b_consts.push(
            (0..universe.value_count(l))
                .map(|_| get_g2(r, group))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(Crs {
        group: group.clone(),
        universe,
        gs_s,
        gs_r,
        a_consts,
        b_consts,
    })
}

// Keys.

pub fn put_public_key<B: Backend>(out: &mut Vec<u8>, pk: &PublicKey<B>) {
    put_g1(out, &pk.blind_base);
    put_g1(out, &pk.sig_pk);
    put_gt(out, &pk.payload_mask);
    put_gt(out, &pk.response_mask);
    put_vec3_g2(out, &pk.com_h.vec);
}

pub fn get_public_key<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<PublicKey<B>, CodecError> {
    Ok(PublicKey {
        blind_base: get_g1(r, group)?,
        sig_pk: get_g1(r, group)?,
        payload_mask: get_gt(r, group)?,
        response_mask: get_gt(r, group)?,
        com_h: CommitmentG2 { vec: get_vec3_g2(r, group)? },
    })
}

pub fn put_secret_key<B: Backend>(out: &mut Vec<u8>, sk: &SecretKey<B>) {
    put_scalar(out, &sk.x);
    put_scalar(out, &sk.alpha);
    put_scalar(out, &sk.beta);
    put_scalar(out, &sk.gamma);
    put_scalar(out, &sk.w);
    put_g2(out, &sk.h);
    put_g1(out, &sk.b_gamma);
    put_g1(out, &sk.g1_w);
    put_g1(out, &sk.g1_alpha);
    put_g2(out, &sk.g2_w);
    put_g2(out, &sk.g2_alpha);
}

pub fn get_secret_key<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<SecretKey<B>, CodecError> {
    Ok(SecretKey {
        x: get_scalar(r, group)?,
        alpha: get_scalar(r, group)?,
        beta: get_scalar(r, group)?,
        gamma: get_scalar(r, group)?,
        w: get_scalar(r, group)?,
        h: get_g2(r, group)?,
        b_gamma: get_g1(r, group)?,
        g1_w: get_g1(r, group)?,
        g1_alpha: get_g1(r, group)?,
        g2_w: get_g2(r, group)?,
        g2_alpha: get_g2(r, group)?,
    })
}

// Records.

pub fn put_record<B: Backend>(out: &mut Vec<u8>, record: &CiphertextRecord<B>) {
    put_g2(out, &record.c1);
    put_g1(out, &record.c2);
    put_gt(out, &record.c3);
    for e in &record.c4 {
        put_g1(out, e);
    }
    for row in &record.c5 {
        for e in row {
            put_g1(out, e);
        }
    }
}

pub fn get_record<B: Backend>(
    r: &mut Reader<'_>,
    crs: &Crs<B>,
) -> Result<CiphertextRecord<B>, CodecError> {
    let group = &crs.group;
    let c1 = get_g2(r, group)?;
    let c2 = get_g1(r, group)?;
    let c3 = get_gt(r, group)?;
    let n = crs.universe.attribute_count();
    let c4 = (0..n).map(|_| get_g1(r, group)).collect::<Result<_, _>>()?;
    let mut c5 = Vec::with_capacity(n);
    for l in 0..n {
        c5.push(
            (0..crs.universe.value_count(l))
                .map(|_| get_g1(r, group))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(CiphertextRecord { c1, c2, c3, c4, c5 })
}

// Attribute secret key.

pub fn put_ask<B: Backend>(out: &mut Vec<u8>, ask: &AttributeSecretKey<B>) {
    put_u16(out, ask.list.choices.len() as u16);
    for &t in &ask.list.choices {
        put_u16(out, t as u16);
    }
    put_g2(out, &ask.d0);
    for row in &ask.rows {
        put_g2(out, &row.d1);
        put_g2(out, &row.d2);
        put_g2(out, &row.d3);
    }
}

pub fn get_ask<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<AttributeSecretKey<B>, CodecError> {
    let n = checked_count(r.u16()? as usize)?;
    let choices = (0..n)
        .map(|_| r.u16().map(|t| t as usize))
        .collect::<Result<_, _>>()?;
    let d0 = get_g2(r, group)?;
    let rows = (0..n)
        .map(|_| {
            Ok(AskRow {
                d1: get_g2(r, group)?,
                d2: get_g2(r, group)?,
                d3: get_g2(r, group)?,
            })
        })
        .collect::<Result<_, CodecError>>()?;
    Ok(AttributeSecretKey {
        list: AttributeList { choices },
        d0,
        rows,
    })
}

// Phase messages.

pub fn put_issue_request<B: Backend>(out: &mut Vec<u8>, req: &IssueRequest<B>) {
    put_u16(out, req.randomized.len() as u16);
    for e in &req.randomized {
        put_g2(out, e);
    }
    put_proof(out, &req.proof);
}

pub fn get_issue_request<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<IssueRequest<B>, CodecError> {
    let n = checked_count(r.u16()? as usize)?;
    let randomized = (0..n).map(|_| get_g2(r, group)).collect::<Result<_, _>>()?;
    let proof = get_proof(r, group)?;
    Ok(IssueRequest { randomized, proof })
}

pub fn put_issue_response<B: Backend>(out: &mut Vec<u8>, resp: &IssueResponse<B>) {
    put_u16(out, resp.rows.len() as u16);
    put_g2(out, &resp.d0);
    for row in &resp.rows {
        put_g2(out, &row.d1_blinded);
        put_g2(out, &row.d2);
        put_g2(out, &row.d3);
    }
}

pub fn get_issue_response<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<IssueResponse<B>, CodecError> {
    let n = checked_count(r.u16()? as usize)?;
    let d0 = get_g2(r, group)?;
    let rows = (0..n)
        .map(|_| {
            Ok(IssueResponseRow {
                d1_blinded: get_g2(r, group)?,
                d2: get_g2(r, group)?,
                d3: get_g2(r, group)?,
            })
        })
        .collect::<Result<_, CodecError>>()?;
    Ok(IssueResponse { d0, rows })
}

pub fn put_transfer_request<B: Backend>(out: &mut Vec<u8>, req: &TransferRequest<B>) {
    put_g1(out, &req.req);
    put_proof(out, &req.proof);
    put_vec3_g2(out, &req.com_hv.vec);
}

pub fn get_transfer_request<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<TransferRequest<B>, CodecError> {
    Ok(TransferRequest {
        req: get_g1(r, group)?,
        proof: get_proof(r, group)?,
        com_hv: CommitmentG2 { vec: get_vec3_g2(r, group)? },
    })
}

pub fn put_transfer_response<B: Backend>(out: &mut Vec<u8>, resp: &TransferResponse<B>) {
    put_gt(out, &resp.res);
    put_proof(out, &resp.delta);
}

pub fn get_transfer_response<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<TransferResponse<B>, CodecError> {
    Ok(TransferResponse {
        res: get_gt(r, group)?,
        delta: get_proof(r, group)?,
    })
}

// Receiver-side secrets (CLI step files; never sent on the wire).

pub fn put_issue_secret<B: Backend>(out: &mut Vec<u8>, sec: &IssueSecret<B>) {
    put_u16(out, sec.list.choices.len() as u16);
    for &t in &sec.list.choices {
        put_u16(out, t as u16);
    }
    for z in &sec.blinders {
        put_scalar(out, z);
    }
}

pub fn get_issue_secret<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<IssueSecret<B>, CodecError> {
    let n = checked_count(r.u16()? as usize)?;
    let choices = (0..n)
        .map(|_| r.u16().map(|t| t as usize))
        .collect::<Result<_, _>>()?;
    let blinders = (0..n)
        .map(|_| get_scalar(r, group))
        .collect::<Result<_, _>>()?;
    Ok(IssueSecret {
        list: AttributeList { choices },
        blinders,
    })
}

pub fn put_transfer_secret<B: Backend>(out: &mut Vec<u8>, sec: &TransferSecret<B>) {
    put_u32(out, sec.sigma as u32);
    put_scalar(out, &sec.v);
    put_gt(out, &sec.pri);
}

pub fn get_transfer_secret<B: Backend>(
    r: &mut Reader<'_>,
    group: &BilinearGroup<B>,
) -> Result<TransferSecret<B>, CodecError> {
    Ok(TransferSecret {
        sigma: r.u32()? as usize,
        v: get_scalar(r, group)?,
        pri: get_gt(r, group)?,
    })
}

/// Number of group elements in an encoded transfer request (handle, proof
/// elements, re-randomized commitment).
pub fn transfer_request_element_count<B: Backend>(req: &TransferRequest<B>) -> usize {
    1 + req.proof.element_count() + 3
}

/// Number of group elements in an encoded transfer response.
pub fn transfer_response_element_count<B: Backend>(resp: &TransferResponse<B>) -> usize {
    1 + resp.delta.element_count()
}
