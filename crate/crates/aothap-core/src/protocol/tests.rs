use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::attributes::{all_lists, AccessPolicy, AttributeDef, AttributeList, AttributeUniverse};
use crate::bilinear::{bilinear_setup, counted, Backend, BilinearGroup, SecurityProfile};
use crate::gs::prove_ppe;
use crate::{MockBackend, Real};

use super::dbsetup::bb_sign;
use super::issue::issue_respond_with;
use super::statements::{phi_statement, pi_statement};
use super::*;

const BIG_MOCK_P: u64 = 2305843009213693951;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn universe(shape: &[usize]) -> AttributeUniverse {
    AttributeUniverse::new(
        shape
            .iter()
            .enumerate()
            .map(|(l, &n)| AttributeDef {
                name: format!("a{l}"),
                values: (0..n).map(|t| format!("v{l}_{t}")).collect(),
            })
            .collect(),
    )
    .unwrap()
}

fn mock_group(p: u64) -> BilinearGroup<MockBackend> {
    bilinear_setup::<MockBackend>(&SecurityProfile::Mock(p)).unwrap()
}

fn policy(rows: &[&[bool]]) -> AccessPolicy {
    AccessPolicy {
        allow: rows.iter().map(|r| r.to_vec()).collect(),
    }
}

/// Full issue + transfer round trip. Returns the decrypted value.
fn run_flow<B: Backend>(
    crs: &Crs<B>,
    keys: &SenderKeys<B>,
    cdb: &[CiphertextRecord<B>],
    list: &AttributeList,
    sigma: usize,
    rng: &mut ChaCha20Rng,
) -> crate::bilinear::Gt<B> {
    let (ireq, isec) = issue_request(crs, list, rng).unwrap();
    let iresp = issue_respond(crs, &keys.sk, &ireq, rng).unwrap();
    let ask = issue_finalize(crs, &keys.pk, &isec, &iresp).unwrap();

    let (treq, tsec) = transfer_request(crs, &keys.pk, &cdb[sigma], sigma, rng).unwrap();
    let tresp = transfer_respond(crs, &keys.pk, &keys.sk, &treq, rng).unwrap();
    transfer_finalize(crs, &keys.pk, &ask, &cdb[sigma], &tsec, &tresp).unwrap()
}

#[test]
fn crs_constants_are_dl_consistent() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 3]);
    let (crs, _) = crs_setup(&group, &u, &mut rng(1), false);
    assert_eq!(u.total_values(), 5);
    assert_eq!(crs.a_consts.iter().map(Vec::len).sum::<usize>(), 5);
    assert!(crs.check_constants());
}

#[test]
fn crs_element_count_is_affine_in_m_with_slope_2() {
    let group = mock_group(BIG_MOCK_P);
    let mut counts = Vec::new();
    for m in [4usize, 8, 16] {
        let u = universe(&[m / 2, m / 2]);
        assert_eq!(u.total_values(), m);
        let (crs, _) = crs_setup(&group, &u, &mut rng(2), false);
        counts.push(crs.element_count());
    }
    assert_eq!(counts[1] - counts[0], 2 * 4);
    assert_eq!(counts[2] - counts[1], 2 * 8);
}

#[test]
fn crs_setup_is_deterministic_for_fixed_seed() {
    let group = mock_group(101);
    let u = universe(&[2, 2]);
    let (crs_a, _) = crs_setup(&group, &u, &mut rng(3), false);
    let (crs_b, _) = crs_setup(&group, &u, &mut rng(3), false);
    assert_eq!(crs_a, crs_b);
}

#[test]
fn bb_signature_mock_closed_form() {
    // p = 101, x = 3, r = 5: the signing exponent is 8^{-1} = 38, and
    // (3 + 5) * 38 = 304 = 1 mod 101 closes the verification equation.
    let group = mock_group(101);
    let u = universe(&[1]);
    let (crs, _) = crs_setup(&group, &u, &mut rng(4), false);
    let x = group.scalar_from_u64(3);
    let r = group.scalar_from_u64(5);
    let sig = bb_sign(&crs, &x, &r).unwrap();
    assert_eq!(sig.0.v, 38);
    let base = group.g1().pow(&x).mul(&group.g1().pow(&r));
    assert_eq!(group.pair(&base, &sig), *group.gt_generator());

    // x + r = 0 is undefined.
    let neg = x.neg();
    assert!(bb_sign(&crs, &x, &neg).is_none());
}

#[test]
fn db_setup_core_pairings_are_n_plus_2() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(5);
    for n_records in [1usize, 4, 16] {
        let (crs, _) = crs_setup(&group, &u, &mut r, false);
        let records: Vec<_> = (0..n_records)
            .map(|_| (group.random_gt(&mut r), AccessPolicy::allow_all(&u)))
            .collect();
        let ((), counts) = counted("db-core", || {
            let (pk, sk) = sender_keygen(&crs, &mut r);
            let _ = encrypt_records(&crs, &pk, &sk, &records, &mut r).unwrap();
        })
        .unwrap();
        assert_eq!(counts.pairings, n_records as u64 + 2);
    }
}

#[test]
fn full_policy_record_decrypts_for_every_list() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(6);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let payload = group.random_gt(&mut r);
    let (keys, cdb) =
        db_setup(&crs, &[(payload.clone(), AccessPolicy::allow_all(&u))], &mut r).unwrap();
    verify_db(&crs, &keys.pk, &keys.psi, &cdb).unwrap();
    for list in all_lists(&u) {
        let out = run_flow(&crs, &keys, &cdb, &list, 0, &mut r);
        assert_eq!(out, payload);
    }
}

#[test]
fn decryption_matches_policy_exhaustively() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(7);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let policies = vec![
        policy(&[&[true, false], &[true, true]]),
        policy(&[&[false, true], &[true, false]]),
        policy(&[&[true, true], &[false, true]]),
        policy(&[&[true, false], &[false, true]]),
    ];
    let records: Vec<_> = policies
        .iter()
        .map(|w| (group.random_gt(&mut r), w.clone()))
        .collect();
    let (keys, cdb) = db_setup(&crs, &records, &mut r).unwrap();
    for list in all_lists(&u) {
        for sigma in 0..records.len() {
            let out = run_flow(&crs, &keys, &cdb, &list, sigma, &mut r);
            let should = u.satisfies(&list, &policies[sigma]).unwrap();
            assert_eq!(out == records[sigma].0, should, "list {list:?} sigma {sigma}");
        }
    }
}

#[test]
fn verify_db_rejects_mutations_and_foreign_psi() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(8);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let records: Vec<_> = (0..3)
        .map(|_| (group.random_gt(&mut r), AccessPolicy::allow_all(&u)))
        .collect();
    let (keys, cdb) = db_setup(&crs, &records, &mut r).unwrap();
    verify_db(&crs, &keys.pk, &keys.psi, &cdb).unwrap();

    let mut broken = cdb.clone();
    broken[1].c1 = group.g2().pow(&group.random_nonzero_scalar(&mut r));
    assert_eq!(
        verify_db(&crs, &keys.pk, &keys.psi, &broken),
        Err(DbRejection::RecordCheckFailed { index: 1 })
    );

    // psi from a different key pair over the same CRS.
    let (other_keys, _) = db_setup(&crs, &records, &mut r).unwrap();
    assert_eq!(
        verify_db(&crs, &keys.pk, &other_keys.psi, &cdb),
        Err(DbRejection::KeyProofInvalid)
    );
}

#[test]
fn issue_response_mock_closed_form() {
    // p = 101, beta = 2, w = 3, s = 5: d0 carries (w + s) / beta =
    // 8 * 51 = 4 mod 101.
    let group = mock_group(101);
    let u = universe(&[1]);
    let mut r = rng(9);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let (_, mut sk) = sender_keygen(&crs, &mut r);
    sk.beta = group.scalar_from_u64(2);
    sk.w = group.scalar_from_u64(3);
    let list = AttributeList { choices: vec![0] };
    let (req, _) = issue_request(&crs, &list, &mut r).unwrap();
    let resp = issue_respond_with(
        &crs,
        &sk,
        &req,
        &group.scalar_from_u64(5),
        &[group.scalar_from_u64(7)],
    );
    // Oracle recomputation in scalar arithmetic.
    let expected = group
        .scalar_from_u64(8)
        .mul(&group.scalar_from_u64(2).invert().unwrap());
    assert_eq!(resp.d0, group.g2().pow(&expected));
    assert_eq!(resp.d0.0.v, 4);
}

#[test]
fn issue_rejects_mutated_proof_and_flags_tampered_row() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 3, 2]);
    let mut r = rng(10);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let (keys, _) = db_setup(
        &crs,
        &[(group.random_gt(&mut r), AccessPolicy::allow_all(&u))],
        &mut r,
    )
    .unwrap();
    let list = AttributeList { choices: vec![1, 2, 0] };
    let (mut req, sec) = issue_request(&crs, &list, &mut r).unwrap();

    // Mutate one commitment of phi: the sender must refuse.
    let good_proof = req.proof.clone();
    req.proof.c[0].vec.0[2] = group.g1().pow(&group.random_nonzero_scalar(&mut r));
    assert!(matches!(
        issue_respond(&crs, &keys.sk, &req, &mut r),
        Err(ProtocolError::ProofInvalid)
    ));
    req.proof = good_proof;

    let mut resp = issue_respond(&crs, &keys.sk, &req, &mut r).unwrap();
    // Tamper d2 of the third attribute: finalize names that attribute.
    resp.rows[2].d2 = group.g2().pow(&group.random_nonzero_scalar(&mut r));
    assert!(matches!(
        issue_finalize(&crs, &keys.pk, &sec, &resp),
        Err(ProtocolError::KeyCheckFailed { attribute: 2 })
    ));
}

#[test]
fn issue_with_zero_blinders_is_degenerate_but_valid() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(11);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let (keys, _) = db_setup(
        &crs,
        &[(group.random_gt(&mut r), AccessPolicy::allow_all(&u))],
        &mut r,
    )
    .unwrap();
    let list = AttributeList { choices: vec![0, 1] };

    // Hand-built request with z_l = 0: R_l is the bare CRS constant.
    let randomized: Vec<_> = (0..2)
        .map(|l| crs.b_consts[l][list.choices[l]].clone())
        .collect();
    assert_eq!(randomized[0], crs.b_consts[0][0]);
    let mut xs: Vec<_> = (0..2)
        .map(|l| crs.a_consts[l][list.choices[l]].clone())
        .collect();
    xs.extend((0..2).map(|_| group.g1_identity()));
    let system = phi_statement(&crs, &randomized);
    let proof = prove_ppe(&group, &crs.gs_r, &system, &xs, &[], &mut r).unwrap();
    let req = IssueRequest { randomized, proof };
    let sec = IssueSecret {
        list,
        blinders: vec![group.scalar_zero(), group.scalar_zero()],
    };

    let resp = issue_respond(&crs, &keys.sk, &req, &mut r).unwrap();
    // With z = 0 the blinded and final d1 coincide.
    let ask = issue_finalize(&crs, &keys.pk, &sec, &resp).unwrap();
    assert_eq!(ask.rows[0].d1, resp.rows[0].d1_blinded);
}

#[test]
fn issue_proofs_verify_for_random_lists() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 3, 4]);
    let mut r = rng(30);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let (keys, _) = db_setup(
        &crs,
        &[(group.random_gt(&mut r), AccessPolicy::allow_all(&u))],
        &mut r,
    )
    .unwrap();
    use rand::Rng;
    for _ in 0..50 {
        let list = AttributeList {
            choices: (0..u.attribute_count())
                .map(|l| r.gen_range(0..u.value_count(l)))
                .collect(),
        };
        let (req, _) = issue_request(&crs, &list, &mut r).unwrap();
        // issue_respond verifies phi before answering.
        assert!(issue_respond(&crs, &keys.sk, &req, &mut r).is_ok());
    }
}

#[test]
fn issue_requests_for_same_list_differ() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(12);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let list = AttributeList { choices: vec![1, 0] };
    let (a, _) = issue_request(&crs, &list, &mut r).unwrap();
    let (b, _) = issue_request(&crs, &list, &mut r).unwrap();
    assert_ne!(a, b);
}

#[test]
fn transfer_with_zero_blinding_recovers_payload() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(13);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let payload = group.random_gt(&mut r);
    let (keys, cdb) =
        db_setup(&crs, &[(payload.clone(), AccessPolicy::allow_all(&u))], &mut r).unwrap();
    let list = AttributeList { choices: vec![0, 0] };
    let (ireq, isec) = issue_request(&crs, &list, &mut r).unwrap();
    let iresp = issue_respond(&crs, &keys.sk, &ireq, &mut r).unwrap();
    let ask = issue_finalize(&crs, &keys.pk, &isec, &iresp).unwrap();

    // v = 0: Req = c2 and Pri is the identity.
    let record = &cdb[0];
    let v = group.scalar_zero();
    let req = record.c2.clone();
    let system = pi_statement(&crs, &keys.pk, &req);
    let xs = vec![g1_product(&group, &record.c4), record.c2.clone()];
    let ys = vec![record.c1.clone(), group.g2_identity()];
    let proof = prove_ppe(&group, &crs.gs_r, &system, &xs, &ys, &mut r).unwrap();
    let treq = TransferRequest {
        req: req.clone(),
        proof,
        com_hv: crate::gs::commitment_pow(&keys.pk.com_h, &v),
    };
    let tsec = TransferSecret {
        sigma: 0,
        v,
        pri: group.gt_identity(),
    };
    let tresp = transfer_respond(&crs, &keys.pk, &keys.sk, &treq, &mut r).unwrap();
    let out = transfer_finalize(&crs, &keys.pk, &ask, record, &tsec, &tresp).unwrap();
    assert_eq!(out, payload);
}

#[test]
fn transfer_rejects_mutated_proofs_on_both_sides() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(14);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let (keys, cdb) = db_setup(
        &crs,
        &[(group.random_gt(&mut r), AccessPolicy::allow_all(&u))],
        &mut r,
    )
    .unwrap();
    let list = AttributeList { choices: vec![1, 1] };
    let (ireq, isec) = issue_request(&crs, &list, &mut r).unwrap();
    let iresp = issue_respond(&crs, &keys.sk, &ireq, &mut r).unwrap();
    let ask = issue_finalize(&crs, &keys.pk, &isec, &iresp).unwrap();

    let (mut treq, tsec) = transfer_request(&crs, &keys.pk, &cdb[0], 0, &mut r).unwrap();
    let good = treq.proof.clone();
    treq.proof.d[0].vec.0[1] = group.g2().pow(&group.random_nonzero_scalar(&mut r));
    assert!(matches!(
        transfer_respond(&crs, &keys.pk, &keys.sk, &treq, &mut r),
        Err(ProtocolError::ProofInvalid)
    ));
    treq.proof = good;

    let mut tresp = transfer_respond(&crs, &keys.pk, &keys.sk, &treq, &mut r).unwrap();
    tresp.delta.c[0].vec.0[0] = group.g1().pow(&group.random_nonzero_scalar(&mut r));
    assert!(matches!(
        transfer_finalize(&crs, &keys.pk, &ask, &cdb[0], &tsec, &tresp),
        Err(ProtocolError::ResponseProofInvalid)
    ));
}

#[test]
fn requests_for_different_records_differ() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(15);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let records: Vec<_> = (0..2)
        .map(|_| (group.random_gt(&mut r), AccessPolicy::allow_all(&u)))
        .collect();
    let (keys, cdb) = db_setup(&crs, &records, &mut r).unwrap();
    // Same blinding v against two records gives different handles.
    let mut ra = rng(99);
    let mut rb = rng(99);
    let (qa, _) = transfer_request(&crs, &keys.pk, &cdb[0], 0, &mut ra).unwrap();
    let (qb, _) = transfer_request(&crs, &keys.pk, &cdb[1], 1, &mut rb).unwrap();
    assert_ne!(qa.req, qb.req);
}

#[test]
fn transfer_proof_size_independent_of_database_size() {
    let group = mock_group(BIG_MOCK_P);
    let u = universe(&[2, 2]);
    let mut r = rng(16);
    let mut sizes = Vec::new();
    for n_records in [8usize, 64] {
        let (crs, _) = crs_setup(&group, &u, &mut r, false);
        let records: Vec<_> = (0..n_records)
            .map(|_| (group.random_gt(&mut r), AccessPolicy::allow_all(&u)))
            .collect();
        let (keys, cdb) = db_setup(&crs, &records, &mut r).unwrap();
        let (treq, _) = transfer_request(&crs, &keys.pk, &cdb[5], 5, &mut r).unwrap();
        sizes.push(treq.proof.element_count());
    }
    assert_eq!(sizes[0], sizes[1]);
}

#[test]
fn end_to_end_on_real_curve() {
    let group = bilinear_setup::<Real>(&SecurityProfile::Standard128).unwrap();
    let u = universe(&[2, 2]);
    let mut r = rng(17);
    let (crs, _) = crs_setup(&group, &u, &mut r, false);
    let payload = group.random_gt(&mut r);
    let restrictive = policy(&[&[true, false], &[true, true]]);
    let (keys, cdb) = db_setup(&crs, &[(payload.clone(), restrictive)], &mut r).unwrap();
    verify_db(&crs, &keys.pk, &keys.psi, &cdb).unwrap();

    let good = AttributeList { choices: vec![0, 1] };
    assert_eq!(run_flow(&crs, &keys, &cdb, &good, 0, &mut r), payload);

    let bad = AttributeList { choices: vec![1, 0] };
    assert_ne!(run_flow(&crs, &keys, &cdb, &bad, 0, &mut r), payload);
}
