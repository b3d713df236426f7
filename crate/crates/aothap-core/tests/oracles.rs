//! Trapdoor-oracle behavior: witness extraction from request proofs,
//! record extraction, and the algebraic derivation behind decryption.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use aothap_core::attributes::{AccessPolicy, AttributeDef, AttributeList, AttributeUniverse};
use aothap_core::bilinear::{bilinear_setup, BilinearGroup, SecurityProfile};
use aothap_core::gs::prove_ppe;
use aothap_core::protocol::statements::phi_statement;
use aothap_core::protocol::{
    crs_setup, issue_finalize, issue_request, transfer_finalize, transfer_request,
    transfer_respond, Crs, CrsTrapdoors, IssueRequest, SenderKeys,
};
use aothap_core::testkit::{
    db_setup_traced, extract_attribute_list, extract_record, extract_transfer_index,
    issue_respond_traced, DecryptionOracle, OracleError, SkView,
};
use aothap_core::MockBackend;

const BIG_MOCK_P: u64 = 2305843009213693951;

fn mock_group() -> BilinearGroup<MockBackend> {
    bilinear_setup::<MockBackend>(&SecurityProfile::Mock(BIG_MOCK_P)).unwrap()
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

fn random_list(u: &AttributeUniverse, rng: &mut ChaCha20Rng) -> AttributeList {
    AttributeList {
        choices: (0..u.attribute_count())
            .map(|l| rng.gen_range(0..u.value_count(l)))
            .collect(),
    }
}

struct Setup {
    crs: Crs<MockBackend>,
    tds: CrsTrapdoors<MockBackend>,
    keys: SenderKeys<MockBackend>,
    cdb: Vec<aothap_core::protocol::CiphertextRecord<MockBackend>>,
    payloads: Vec<aothap_core::bilinear::Gt<MockBackend>>,
    policies: Vec<AccessPolicy>,
}

fn setup(shape: &[usize], n_records: usize, seed: u64, restrictive: bool) -> (Setup, ChaCha20Rng) {
    let group = mock_group();
    let u = universe(shape);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (crs, tds) = crs_setup(&group, &u, &mut rng, true);
    let policies: Vec<AccessPolicy> = (0..n_records)
        .map(|_| {
            if !restrictive {
                return AccessPolicy::allow_all(&u);
            }
            AccessPolicy {
                allow: (0..u.attribute_count())
                    .map(|l| loop {
                        let row: Vec<bool> =
                            (0..u.value_count(l)).map(|_| rng.gen_bool(0.5)).collect();
                        if row.iter().any(|&b| b) {
                            break row;
                        }
                    })
                    .collect(),
            }
        })
        .collect();
    let records: Vec<_> = policies
        .iter()
        .map(|p| (crs.group.random_gt(&mut rng), p.clone()))
        .collect();
    let payloads = records.iter().map(|(m, _)| m.clone()).collect();
    let (keys, cdb, _) = db_setup_traced(&crs, &records, &mut rng).unwrap();
    (
        Setup {
            crs,
            tds: tds.unwrap(),
            keys,
            cdb,
            payloads,
            policies,
        },
        rng,
    )
}

#[test]
fn attribute_list_extraction_matches_choice() {
    let (s, mut rng) = setup(&[2, 3, 4], 1, 1, false);
    for _ in 0..50 {
        let list = random_list(&s.crs.universe, &mut rng);
        let (req, _) = issue_request(&s.crs, &list, &mut rng).unwrap();
        let extracted = extract_attribute_list(&s.crs, &s.tds, &req).unwrap();
        assert_eq!(extracted, list);
    }
}

#[test]
fn single_attribute_universe_extraction() {
    let (s, mut rng) = setup(&[3], 1, 2, false);
    let list = AttributeList { choices: vec![2] };
    let (req, _) = issue_request(&s.crs, &list, &mut rng).unwrap();
    assert_eq!(
        extract_attribute_list(&s.crs, &s.tds, &req).unwrap(),
        list
    );
}

#[test]
fn foreign_witness_reported() {
    let (s, mut rng) = setup(&[2], 1, 3, false);
    let group = &s.crs.group;
    // A DL-consistent constant pair that is not in the CRS tables still
    // satisfies the product equation, but extraction must flag it.
    let a_star = group.random_nonzero_scalar(&mut rng);
    let foreign_a = group.g1().pow(&a_star);
    let foreign_b = group.g2().pow(&a_star);
    let z = group.random_scalar(&mut rng);
    let randomized = vec![foreign_b.mul(&group.g2().pow(&z))];
    let xs = vec![foreign_a, group.g1().pow(&z)];
    let system = phi_statement(&s.crs, &randomized);
    let proof = prove_ppe(group, &s.crs.gs_r, &system, &xs, &[], &mut rng).unwrap();
    let req = IssueRequest { randomized, proof };
    match extract_attribute_list(&s.crs, &s.tds, &req) {
        Err(OracleError::ForeignWitness { attribute: 0 }) => {}
        other => panic!("expected foreign witness, got {other:?}"),
    }
}

#[test]
fn transfer_index_extraction_sweep() {
    let (s, mut rng) = setup(&[2, 2], 16, 4, false);
    for sigma in 0..16 {
        let (req, _) =
            transfer_request(&s.crs, &s.keys.pk, &s.cdb[sigma], sigma, &mut rng).unwrap();
        let idx = extract_transfer_index(&s.crs, &s.tds, &s.cdb, &req).unwrap();
        assert_eq!(idx, Some(sigma));
    }
}

#[test]
fn transfer_index_never_none_for_honest_requests() {
    let (s, mut rng) = setup(&[2, 2], 8, 5, false);
    for trial in 0..200 {
        let sigma = rng.gen_range(0..s.cdb.len());
        let (req, _) =
            transfer_request(&s.crs, &s.keys.pk, &s.cdb[sigma], sigma, &mut rng).unwrap();
        let idx = extract_transfer_index(&s.crs, &s.tds, &s.cdb, &req).unwrap();
        assert_eq!(idx, Some(sigma), "trial {trial}");
    }
}

#[test]
fn record_extraction_roundtrips_payload_and_policy() {
    let (s, _) = setup(&[2, 3], 16, 6, true);
    let view = SkView::of(&s.keys.sk);
    for i in 0..16 {
        let (payload, policy) = extract_record(&s.crs, &s.tds, view, &s.cdb[i]).unwrap();
        assert_eq!(payload, s.payloads[i], "payload of record {i}");
        assert_eq!(policy, s.policies[i], "policy of record {i}");
    }
}

#[test]
fn full_policy_rows_recovered_in_full() {
    let (s, _) = setup(&[2, 2], 2, 7, false);
    let view = SkView::of(&s.keys.sk);
    let (_, policy) = extract_record(&s.crs, &s.tds, view, &s.cdb[0]).unwrap();
    assert_eq!(policy, AccessPolicy::allow_all(&s.crs.universe));
}

#[test]
fn per_value_test_has_no_false_positives() {
    // The membership test compares e(c5^{1/a}, g2) with e(c4, g2^alpha);
    // a random slot passes only if its exponent hits a*alpha*s exactly.
    let (s, mut rng) = setup(&[2], 1, 8, false);
    let group = &s.crs.group;
    let share = group.random_scalar(&mut rng);
    let c4 = group.g1().pow(&share);
    let rhs = group.pair(&c4, &s.keys.sk.g2_alpha);
    let inv_a = s.tds.a_exps[0][0].invert().unwrap();
    let mut false_positives = 0;
    for _ in 0..10_000 {
        let slot = group.g1().pow(&group.random_scalar(&mut rng));
        if group.pair(&slot.pow(&inv_a), group.g2()) == rhs {
            false_positives += 1;
        }
    }
    assert_eq!(false_positives, 0);
}

#[test]
fn response_equals_masked_exponent_oracle() {
    // Res must equal e(B, h)^{r + v}, recomputed from the opening.
    let group = mock_group();
    let u = universe(&[2, 2]);
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let (crs, _) = crs_setup(&group, &u, &mut rng, false);
    let records = vec![(group.random_gt(&mut rng), AccessPolicy::allow_all(&u))];
    let (keys, cdb, openings) = db_setup_traced(&crs, &records, &mut rng).unwrap();
    let (req, sec) = transfer_request(&crs, &keys.pk, &cdb[0], 0, &mut rng).unwrap();
    let resp = transfer_respond(&crs, &keys.pk, &keys.sk, &req, &mut rng).unwrap();
    let expected = keys.pk.response_mask.pow(&openings[0].r.add(&sec.v));
    assert_eq!(resp.res, expected);
}

/// The full derivation chain: val1, val2 and the denominator pairing all
/// match their exponent-ring recomputations, and the quotient lands on
/// the payload exactly.
#[test]
fn decryption_matches_exponent_oracle() {
    let group = mock_group();
    let u = universe(&[2, 3]);
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let (crs, tds) = crs_setup(&group, &u, &mut rng, true);
    let tds = tds.unwrap();
    let records = vec![(group.random_gt(&mut rng), AccessPolicy::allow_all(&u))];
    let (keys, cdb, openings) = db_setup_traced(&crs, &records, &mut rng).unwrap();

    let list = AttributeList { choices: vec![1, 2] };
    let (ireq, isec) = issue_request(&crs, &list, &mut rng).unwrap();
    let (iresp, trace) = issue_respond_traced(&crs, &keys.sk, &ireq, &mut rng).unwrap();
    let ask = issue_finalize(&crs, &keys.pk, &isec, &iresp).unwrap();

    let (treq, tsec) = transfer_request(&crs, &keys.pk, &cdb[0], 0, &mut rng).unwrap();
    let tresp = transfer_respond(&crs, &keys.pk, &keys.sk, &treq, &mut rng).unwrap();

    let oracle = DecryptionOracle { crs: &crs, trapdoors: &tds };
    let record = &cdb[0];
    let opening = &openings[0];

    // val1 = prod_l e(c4_l, d1_l)
    let mut val1 = group.gt_identity();
    for (l, row) in ask.rows.iter().enumerate() {
        val1 = val1.mul(&group.pair(&record.c4[l], &row.d1));
    }
    assert_eq!(val1, oracle.val1(opening, &trace, &ask), "val1 chain");

    // val2 = prod_l e(c5_{l,t_l}, d3_l) for the satisfying selection
    let mut val2 = group.gt_identity();
    for (l, row) in ask.rows.iter().enumerate() {
        val2 = val2.mul(&group.pair(&record.c5[l][list.choices[l]], &row.d3));
    }
    assert_eq!(val2, oracle.val2(opening, &trace, &ask), "val2 chain");

    // e(c2, d0) = e(g1, g2)^{r (w + s)}
    let denom = group.pair(&record.c2, &ask.d0);
    let exp = opening.r.mul(&keys.sk.w.add(&trace.s));
    assert_eq!(denom, group.gt_generator().pow(&exp), "denominator chain");

    // val1 / (e(c2,d0) val2) = Y^{-r}: the payload-mask cancellation.
    let lhs = val1.div(&denom.mul(&val2));
    assert_eq!(lhs, keys.pk.payload_mask.pow(&opening.r).inv(), "mask cancellation");

    let out = transfer_finalize(&crs, &keys.pk, &ask, record, &tsec, &tresp).unwrap();
    assert_eq!(out, records[0].0, "end-to-end payload");
}
