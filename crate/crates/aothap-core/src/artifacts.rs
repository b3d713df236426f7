//! On-disk artifact files and the byte-payload envelope.
//!
//! Every artifact starts with a 4-byte magic, a version byte and the
//! backend tag. `crs.bin` additionally embeds the backend parameters and
//! the attribute universe, from which the length of every other field in
//! every artifact is derivable.
//!
//! ```text
//!   crs.bin  "AOTC" | ver | backend | params | universe | GS strings | constants
//!   pub.bin  "AOTP" | ver | backend | pk | psi | N | records (+ sealed blobs)
//!   sk.bin   "AOTS" | ver | backend | secret key
//!   ask.bin  "AOTA" | ver | backend | attribute list | key rows
//! ```

use sha2::{Digest, Sha256};

use crate::bilinear::{Backend, BilinearGroup, Gt};
use crate::codec::{self, CodecError, Reader};
use crate::gs::PpeProof;
use crate::protocol::{AttributeSecretKey, CiphertextRecord, Crs, PublicKey, SecretKey};

pub const CRS_MAGIC: &[u8; 4] = b"AOTC";
pub const PUB_MAGIC: &[u8; 4] = b"AOTP";
pub const SK_MAGIC: &[u8; 4] = b"AOTS";
pub const ASK_MAGIC: &[u8; 4] = b"AOTA";
pub const VERSION: u8 = 1;

fn put_header(out: &mut Vec<u8>, magic: &[u8; 4], backend_tag: u8) {
    out.extend_from_slice(magic);
    out.push(VERSION);
    out.push(backend_tag);
}

fn check_header(r: &mut Reader<'_>, magic: &[u8; 4], backend_tag: u8) -> Result<(), CodecError> {
    if r.take(4)? != magic {
        return Err(CodecError::BadMagic);
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(CodecError::UnsupportedVersion(version));
    }
    let tag = r.u8()?;
    if tag != backend_tag {
        return Err(CodecError::BadValue(format!(
            "artifact was produced by backend tag {tag}, expected {backend_tag}"
        )));
    }
    Ok(())
}

/// Backend tag of any artifact, for dispatch before the typed decode.
pub fn peek_backend_tag(bytes: &[u8]) -> Result<u8, CodecError> {
    let mut r = Reader::new(bytes);
    r.take(4)?;
    let version = r.u8()?;
    if version != VERSION {
        return Err(CodecError::UnsupportedVersion(version));
    }
    r.u8()
}

pub fn encode_crs<B: Backend>(crs: &Crs<B>) -> Vec<u8> {
    let mut out = Vec::new();
    put_header(&mut out, CRS_MAGIC, B::TAG);
    let params = B::params_to_bytes(crs.group.params());
    codec::put_u16(&mut out, params.len() as u16);
    out.extend_from_slice(&params);
    codec::put_crs_body(&mut out, crs);
    out
}

pub fn decode_crs<B: Backend>(bytes: &[u8]) -> Result<Crs<B>, CodecError> {
    let mut r = Reader::new(bytes);
    check_header(&mut r, CRS_MAGIC, B::TAG)?;
    let len = r.u16()? as usize;
    let params = B::params_from_bytes(r.take(len)?)?;
    let group = BilinearGroup::<B>::from_params(params);
    let crs = codec::get_crs_body(&mut r, &group)?;
    r.finish()?;
    Ok(crs)
}

/// What the sender publishes: public key, key proof, and the ciphertext
/// database. `sealed[i]` optionally wraps a byte payload under record
/// `i`'s target-group element (see [`seal_bytes`]); it is empty when the
/// payload is used as a bare group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishedDb<B: Backend> {
    pub pk: PublicKey<B>,
    pub psi: PpeProof<B>,
    pub records: Vec<CiphertextRecord<B>>,
    pub sealed: Vec<Vec<u8>>,
}

pub fn encode_published_db<B: Backend>(db: &PublishedDb<B>) -> Vec<u8> {
    let mut out = Vec::new();
    put_header(&mut out, PUB_MAGIC, B::TAG);
    codec::put_public_key(&mut out, &db.pk);
    codec::put_proof(&mut out, &db.psi);
    codec::put_u32(&mut out, db.records.len() as u32);
    for (record, sealed) in db.records.iter().zip(&db.sealed) {
        codec::put_record(&mut out, record);
        codec::put_u32(&mut out, sealed.len() as u32);
        out.extend_from_slice(sealed);
    }
    out
}

pub fn decode_published_db<B: Backend>(
    bytes: &[u8],
    crs: &Crs<B>,
) -> Result<PublishedDb<B>, CodecError> {
    let mut r = Reader::new(bytes);
    check_header(&mut r, PUB_MAGIC, B::TAG)?;
    let pk = codec::get_public_key(&mut r, &crs.group)?;
    let psi = codec::get_proof(&mut r, &crs.group)?;
    let n = r.u32()? as usize;
    if n > (1 << 20) {
        return Err(CodecError::CountOutOfRange);
    }
    let mut records = Vec::with_capacity(n);
    let mut sealed = Vec::with_capacity(n);
    for _ in 0..n {
        records.push(codec::get_record(&mut r, crs)?);
        let len = r.u32()? as usize;
        if len > (64 << 20) {
            return Err(CodecError::CountOutOfRange);
        }
        sealed.push(r.take(len)?.to_vec());
    }
    r.finish()?;
    Ok(PublishedDb {
        pk,
        psi,
        records,
        sealed,
    })
}

pub fn encode_secret_key<B: Backend>(sk: &SecretKey<B>) -> Vec<u8> {
    let mut out = Vec::new();
    put_header(&mut out, SK_MAGIC, B::TAG);
    codec::put_secret_key(&mut out, sk);
    out
}

pub fn decode_secret_key<B: Backend>(
    bytes: &[u8],
    group: &BilinearGroup<B>,
) -> Result<SecretKey<B>, CodecError> {
    let mut r = Reader::new(bytes);
    check_header(&mut r, SK_MAGIC, B::TAG)?;
    let sk = codec::get_secret_key(&mut r, group)?;
    r.finish()?;
    Ok(sk)
}

pub fn encode_ask<B: Backend>(ask: &AttributeSecretKey<B>) -> Vec<u8> {
    let mut out = Vec::new();
    put_header(&mut out, ASK_MAGIC, B::TAG);
    codec::put_ask(&mut out, ask);
    out
}

pub fn decode_ask<B: Backend>(
    bytes: &[u8],
    group: &BilinearGroup<B>,
) -> Result<AttributeSecretKey<B>, CodecError> {
    let mut r = Reader::new(bytes);
    check_header(&mut r, ASK_MAGIC, B::TAG)?;
    let ask = codec::get_ask(&mut r, group)?;
    r.finish()?;
    Ok(ask)
}

/// XORs `data` with a keystream derived from the canonical encoding of a
/// target-group element. Applying it twice with the same element is the
/// identity, so the same function seals and unseals.
///
/// Deliberately unauthenticated: decrypting with the wrong element yields
/// uniformly-looking bytes rather than a failure, so the byte envelope
/// never signals whether a policy was satisfied.
pub fn seal_bytes<B: Backend>(key_elem: &Gt<B>, data: &[u8]) -> Vec<u8> {
    use rand::{RngCore, SeedableRng};
    let mut hasher = Sha256::new();
    hasher.update(b"aothap/seal/v1");
    hasher.update(key_elem.to_bytes());
    let seed: [u8; 32] = hasher.finalize().into();
    let mut stream = rand_chacha::ChaCha20Rng::from_seed(seed);
    let mut keystream = vec![0u8; data.len()];
    stream.fill_bytes(&mut keystream);
    data.iter().zip(keystream).map(|(d, k)| d ^ k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::{AccessPolicy, AttributeDef, AttributeUniverse};
    use crate::bilinear::{bilinear_setup, SecurityProfile};
    use crate::protocol::{crs_setup, db_setup};
    use crate::MockBackend;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup() -> (Crs<MockBackend>, ChaCha20Rng) {
        let group =
            bilinear_setup::<MockBackend>(&SecurityProfile::Mock(2305843009213693951)).unwrap();
        let u = AttributeUniverse::new(vec![
            AttributeDef {
                name: "a0".into(),
                values: vec!["x".into(), "y".into()],
            },
            AttributeDef {
                name: "a1".into(),
                values: vec!["p".into(), "q".into(), "r".into()],
            },
        ])
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let (crs, _) = crs_setup(&group, &u, &mut rng, false);
        (crs, rng)
    }

    #[test]
    fn crs_roundtrip_and_determinism() {
        let (crs, _) = setup();
        let bytes = encode_crs(&crs);
        let back = decode_crs::<MockBackend>(&bytes).unwrap();
        assert_eq!(back, crs);
        assert_eq!(encode_crs(&back), bytes);
        assert_eq!(peek_backend_tag(&bytes).unwrap(), 2);
    }

    #[test]
    fn published_db_roundtrip() {
        let (crs, mut rng) = setup();
        let payload = crs.group.random_gt(&mut rng);
        let (keys, records) = db_setup(
            &crs,
            &[(payload, AccessPolicy::allow_all(&crs.universe))],
            &mut rng,
        )
        .unwrap();
        let db = PublishedDb {
            pk: keys.pk.clone(),
            psi: keys.psi.clone(),
            records,
            sealed: vec![b"hello".to_vec()],
        };
        let bytes = encode_published_db(&db);
        let back = decode_published_db::<MockBackend>(&bytes, &crs).unwrap();
        assert_eq!(back, db);

        let sk_bytes = encode_secret_key(&keys.sk);
        assert_eq!(
            decode_secret_key::<MockBackend>(&sk_bytes, &crs.group).unwrap(),
            keys.sk
        );
    }

    #[test]
    fn corrupted_artifacts_rejected() {
        let (crs, _) = setup();
        let mut bytes = encode_crs(&crs);
        bytes[0] ^= 0xff;
        assert!(matches!(
            decode_crs::<MockBackend>(&bytes),
            Err(CodecError::BadMagic)
        ));

        let bytes = encode_crs(&crs);
        let truncated = &bytes[..bytes.len() - 1];
        assert!(decode_crs::<MockBackend>(truncated).is_err());

        let mut extended = bytes.clone();
        extended.push(0);
        assert!(matches!(
            decode_crs::<MockBackend>(&extended),
            Err(CodecError::TrailingBytes(1))
        ));
    }

    #[test]
    fn seal_is_an_involution_and_key_sensitive() {
        let (crs, mut rng) = setup();
        let k1 = crs.group.random_gt(&mut rng);
        let k2 = crs.group.random_gt(&mut rng);
        let msg = b"the quick brown fox".to_vec();
        let sealed = seal_bytes(&k1, &msg);
        assert_ne!(sealed, msg);
        assert_eq!(seal_bytes(&k1, &sealed), msg);
        // Wrong key gives garbage, not an error.
        assert_ne!(seal_bytes(&k2, &sealed), msg);
    }
}
