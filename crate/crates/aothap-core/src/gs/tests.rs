use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::bilinear::{bilinear_setup, Backend, BilinearGroup, SecurityProfile};
use crate::{MockBackend, Real};

use super::verify::verification_sides;
use super::*;

const BIG_MOCK_P: u64 = 2305843009213693951; // 2^61 - 1

fn mock_group(p: u64) -> BilinearGroup<MockBackend> {
    bilinear_setup::<MockBackend>(&SecurityProfile::Mock(p)).unwrap()
}

fn real_group() -> BilinearGroup<Real> {
    bilinear_setup::<Real>(&SecurityProfile::Standard128).unwrap()
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[test]
fn sound_crs_third_coordinate() {
    let group = real_group();
    let mut r = rng(1);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let expect = group.g1().pow(&td.xi1.add(&td.xi2));
    assert_eq!(crs.u[2][2], expect);
    assert_eq!(td.kind, TrapdoorKind::Extraction);
}

#[test]
fn wi_crs_third_coordinate() {
    let group = real_group();
    let mut r = rng(2);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Wi, &mut r);
    // g1^{xi1 + xi2 + 1}
    let exp = td.xi1.add(&td.xi2).add(&group.scalar_one());
    assert_eq!(crs.u[2][2], group.g1().pow(&exp));
    let exp2 = td.xi1.add(&td.xi2).add(&group.scalar_one());
    assert_eq!(crs.v[2][2], group.g2().pow(&exp2));
    assert_eq!(td.kind, TrapdoorKind::Simulation);
}

#[test]
fn mock_crs_vectors_match_hand_computation() {
    let group = mock_group(101);
    let crs = gs_crs_from_scalars(
        &group,
        CrsMode::Sound,
        &group.scalar_from_u64(2),
        &group.scalar_from_u64(3),
        &group.scalar_from_u64(1),
        &group.scalar_from_u64(1),
    );
    let vals = |v: &Vec3<crate::bilinear::G1<MockBackend>>| [v[0].0.v, v[1].0.v, v[2].0.v];
    assert_eq!(vals(&crs.u[0]), [2, 0, 1]);
    assert_eq!(vals(&crs.u[1]), [0, 3, 1]);
    assert_eq!(vals(&crs.u[2]), [2, 3, 2]);
}

#[test]
fn mock_commitment_third_coordinate() {
    let group = mock_group(101);
    let crs = gs_crs_from_scalars(
        &group,
        CrsMode::Sound,
        &group.scalar_from_u64(2),
        &group.scalar_from_u64(3),
        &group.scalar_from_u64(1),
        &group.scalar_from_u64(1),
    );
    let x = group.g1().pow(&group.scalar_from_u64(7));
    let rand = CommitRand {
        r: [
            group.scalar_from_u64(1),
            group.scalar_from_u64(1),
            group.scalar_from_u64(1),
        ],
    };
    let com = commit_g1_with(&group, &crs, &x, &rand);
    // x + r1*u1[2] + r2*u2[2] + r3*u3[2] = 7 + 1 + 1 + 2
    assert_eq!(com.vec[2].0.v, 11);
}

#[test]
fn mock_extraction_closed_form() {
    let group = mock_group(101);
    let a = group.scalar_from_u64(5);
    let b = group.scalar_from_u64(7);
    let crs = gs_crs_from_scalars(
        &group,
        CrsMode::Sound,
        &a,
        &b,
        &group.scalar_from_u64(3),
        &group.scalar_from_u64(4),
    );
    let td = GsTrapdoor {
        kind: TrapdoorKind::Extraction,
        a,
        b,
        xi1: group.scalar_from_u64(3),
        xi2: group.scalar_from_u64(4),
    };
    let x = group.g1().pow(&group.scalar_from_u64(42));
    let mut r = rng(7);
    let (com, _) = commit_g1(&group, &crs, &x, &mut r);
    // Additive form of Z / (X^{1/a} Y^{1/b}).
    let inv_a = td.a.invert().unwrap();
    let inv_b = td.b.invert().unwrap();
    let by_hand = com.vec[2]
        .mul(&com.vec[0].pow(&inv_a).inv())
        .mul(&com.vec[1].pow(&inv_b).inv());
    assert_eq!(extract_commitment_g1(&td, &com).unwrap(), by_hand);
    assert_eq!(by_hand, x);
}

#[test]
fn extraction_roundtrip_both_groups() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(11);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    for _ in 0..20 {
        let x = group.g1().pow(&group.random_scalar(&mut r));
        let (com, _) = commit_g1(&group, &crs, &x, &mut r);
        assert_eq!(extract_commitment_g1(&td, &com).unwrap(), x);

        let y = group.g2().pow(&group.random_scalar(&mut r));
        let (com2, _) = commit_g2(&group, &crs, &y, &mut r);
        assert_eq!(extract_commitment_g2(&td, &com2).unwrap(), y);
    }
    // Identity commits and extracts to identity.
    let (com, _) = commit_g1(&group, &crs, &group.g1_identity(), &mut r);
    assert!(extract_commitment_g1(&td, &com).unwrap().is_identity());
}

#[test]
fn extraction_needs_extraction_trapdoor() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(12);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let (_, wi_td) = gs_crs_gen(&group, CrsMode::Wi, &mut r);
    let (com, _) = commit_g1(&group, &crs, group.g1(), &mut r);
    assert_eq!(
        extract_commitment_g1(&wi_td, &com).unwrap_err(),
        GsError::WrongTrapdoorKind
    );
}

#[test]
fn commitments_randomize() {
    let group = real_group();
    let mut r = rng(13);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let x = group.g1().pow(&group.random_scalar(&mut r));
    let (c1, _) = commit_g1(&group, &crs, &x, &mut r);
    let (c2, _) = commit_g1(&group, &crs, &x, &mut r);
    assert_ne!(c1, c2);
}

/// Random satisfied system of the requested shape; the target of each
/// equation is set to the direct evaluation, so the witnesses satisfy it
/// by construction.
fn random_system<B: Backend, R: rand::RngCore + rand::CryptoRng>(
    group: &BilinearGroup<B>,
    shape: PpeShape,
    rng: &mut R,
) -> (PpeSystem<B>, Vec<crate::bilinear::G1<B>>, Vec<crate::bilinear::G2<B>>) {
    let n1 = match shape {
        PpeShape::LinearG2 => 0,
        _ => 1 + (rng.next_u32() % 3) as usize,
    };
    let n2 = match shape {
        PpeShape::LinearG1 => 0,
        _ => 1 + (rng.next_u32() % 3) as usize,
    };
    let xs: Vec<_> = (0..n1).map(|_| group.g1().pow(&group.random_scalar(rng))).collect();
    let ys: Vec<_> = (0..n2).map(|_| group.g2().pow(&group.random_scalar(rng))).collect();
    let n_eqs = 1 + (rng.next_u32() % 2) as usize;
    let mut all_terms: Vec<Vec<PpeTerm<B>>> = Vec::new();
    for _ in 0..n_eqs {
        let n_terms = 1 + (rng.next_u32() % 3) as usize;
        let mut terms = Vec::new();
        for _ in 0..n_terms {
            let small = |rng: &mut R| group.scalar_from_u64((rng.next_u32() % 3) as u64);
            terms.push(PpeTerm {
                a: group.g1().pow(&group.random_scalar(rng)),
                alpha: (0..n1).map(|_| small(rng)).collect(),
                b: group.g2().pow(&group.random_scalar(rng)),
                beta: (0..n2).map(|_| small(rng)).collect(),
            });
        }
        all_terms.push(terms);
    }
    // Every witness must be referenced somewhere, otherwise its commitment
    // is unconstrained by the verification equations.
    for i in 0..n1 {
        if !all_terms.iter().flatten().any(|t| !t.alpha[i].is_zero()) {
            let eq = (rng.next_u32() as usize) % all_terms.len();
            all_terms[eq][0].alpha[i] = group.scalar_one();
        }
    }
    for i in 0..n2 {
        if !all_terms.iter().flatten().any(|t| !t.beta[i].is_zero()) {
            let eq = (rng.next_u32() as usize) % all_terms.len();
            all_terms[eq][0].beta[i] = group.scalar_one();
        }
    }
    let equations = all_terms
        .into_iter()
        .map(|terms| {
            let target = eval_equation(
                group,
                &Ppe {
                    shape,
                    terms: terms.clone(),
                    target: group.gt_identity(),
                },
                &xs,
                &ys,
            );
            Ppe { shape, terms, target }
        })
        .collect();
    (PpeSystem { n1, n2, equations }, xs, ys)
}

#[test]
fn completeness_all_shapes_mock() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(17);
    for mode in [CrsMode::Sound, CrsMode::Wi] {
        let (crs, _) = gs_crs_gen(&group, mode, &mut r);
        for shape in [PpeShape::General, PpeShape::LinearG1, PpeShape::LinearG2] {
            for _ in 0..100 {
                let (system, xs, ys) = random_system(&group, shape, &mut r);
                let proof = prove_ppe(&group, &crs, &system, &xs, &ys, &mut r).unwrap();
                assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());
            }
        }
    }
}

#[test]
fn completeness_all_shapes_real() {
    let group = real_group();
    let mut r = rng(18);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    for shape in [PpeShape::General, PpeShape::LinearG1, PpeShape::LinearG2] {
        for _ in 0..3 {
            let (system, xs, ys) = random_system(&group, shape, &mut r);
            let proof = prove_ppe(&group, &crs, &system, &xs, &ys, &mut r).unwrap();
            assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());
        }
    }
}

#[test]
fn verification_matrices_match_componentwise() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(19);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let (system, xs, ys) = random_system(&group, PpeShape::General, &mut r);
    let proof = prove_ppe(&group, &crs, &system, &xs, &ys, &mut r).unwrap();
    for qi in 0..system.equations.len() {
        let (lhs, rhs) = verification_sides(&group, &crs, &system, &proof, qi).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                assert_eq!(lhs.entries[k][l], rhs.entries[k][l], "entry ({k},{l})");
            }
        }
    }
}

/// The quotient-form check used by `verify_ppe` must agree with the
/// matrix comparison on accepting and rejecting proofs, on both backends.
#[test]
fn verify_agrees_with_matrix_reference() {
    fn matrix_verdict<B: Backend>(
        group: &BilinearGroup<B>,
        crs: &GsCrs<B>,
        system: &PpeSystem<B>,
        proof: &PpeProof<B>,
    ) -> bool {
        (0..system.equations.len()).all(|qi| {
            let (lhs, rhs) = verification_sides(group, crs, system, proof, qi).unwrap();
            lhs == rhs
        })
    }

    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(26);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    for _ in 0..20 {
        let (system, xs, ys) = random_system(&group, PpeShape::General, &mut r);
        let proof = prove_ppe(&group, &crs, &system, &xs, &ys, &mut r).unwrap();
        assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());
        assert!(matrix_verdict(&group, &crs, &system, &proof));
        let n_slots = mutate_proof(&group, &proof, usize::MAX, &mut r).unwrap_err();
        let slot = (r.next_u64() as usize) % n_slots;
        let mutated = mutate_proof(&group, &proof, slot, &mut r).unwrap();
        if mutated == proof {
            continue;
        }
        assert_eq!(
            verify_ppe(&group, &crs, &system, &mutated).unwrap(),
            matrix_verdict(&group, &crs, &system, &mutated)
        );
    }

    let group = real_group();
    let mut r = rng(27);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let (system, xs, ys) = random_system(&group, PpeShape::General, &mut r);
    let proof = prove_ppe(&group, &crs, &system, &xs, &ys, &mut r).unwrap();
    assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());
    assert!(matrix_verdict(&group, &crs, &system, &proof));
    let mutated = mutate_proof(&group, &proof, 0, &mut r).unwrap();
    assert!(!verify_ppe(&group, &crs, &system, &mutated).unwrap());
    assert!(!matrix_verdict(&group, &crs, &system, &mutated));
}

#[test]
fn unsatisfying_witnesses_rejected_at_prove_time() {
    let group = real_group();
    let mut r = rng(20);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    // e(g1, y) = e(g1, g2) with witness y = g2 proves; y = g2^2 errors.
    let system = PpeSystem {
        n1: 0,
        n2: 1,
        equations: vec![Ppe {
            shape: PpeShape::LinearG2,
            terms: vec![PpeTerm {
                a: group.g1().clone(),
                alpha: vec![],
                b: group.g2_identity(),
                beta: vec![group.scalar_one()],
            }],
            target: group.pair(group.g1(), group.g2()),
        }],
    };
    let proof = prove_ppe(&group, &crs, &system, &[], &[group.g2().clone()], &mut r).unwrap();
    assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());

    let bad = group.g2().pow(&group.scalar_from_u64(2));
    assert_eq!(
        prove_ppe(&group, &crs, &system, &[], &[bad], &mut r).unwrap_err(),
        GsError::WitnessesDoNotSatisfy { equation: 0 }
    );
}

/// Replaces one group element of the proof, chosen by `slot`, with a
/// random element. Returns the number of replaceable slots when `slot` is
/// out of range.
pub(crate) fn mutate_proof<B: Backend, R: rand::RngCore + rand::CryptoRng>(
    group: &BilinearGroup<B>,
    proof: &PpeProof<B>,
    slot: usize,
    rng: &mut R,
) -> Result<PpeProof<B>, usize> {
    let mut slots: Vec<(usize, usize, usize)> = Vec::new(); // (kind, idx, coord)
    for i in 0..proof.c.len() {
        for k in 0..3 {
            slots.push((0, i, k));
        }
    }
    for i in 0..proof.d.len() {
        for k in 0..3 {
            slots.push((1, i, k));
        }
    }
    for (qi, eq) in proof.equations.iter().enumerate() {
        if eq.p.is_some() {
            for jk in 0..9 {
                slots.push((2, qi, jk));
            }
        }
        if eq.p_prime.is_some() {
            for jk in 0..9 {
                slots.push((3, qi, jk));
            }
        }
    }
    if slot >= slots.len() {
        return Err(slots.len());
    }
    let mut out = proof.clone();
    let (kind, idx, coord) = slots[slot];
    match kind {
        0 => out.c[idx].vec.0[coord] = group.g1().pow(&group.random_nonzero_scalar(rng)),
        1 => out.d[idx].vec.0[coord] = group.g2().pow(&group.random_nonzero_scalar(rng)),
        2 => {
            let p = out.equations[idx].p.as_mut().unwrap();
            p[coord / 3].0[coord % 3] = group.g2().pow(&group.random_nonzero_scalar(rng));
        }
        _ => {
            let pp = out.equations[idx].p_prime.as_mut().unwrap();
            pp[coord / 3].0[coord % 3] = group.g1().pow(&group.random_nonzero_scalar(rng));
        }
    }
    Ok(out)
}

#[test]
fn mutated_proofs_rejected() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(21);
    let (crs, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let mut rejected = 0;
    let mut total = 0;
    while total < 50 {
        let (system, xs, ys) = random_system(&group, PpeShape::General, &mut r);
        let proof = prove_ppe(&group, &crs, &system, &xs, &ys, &mut r).unwrap();
        let n_slots = mutate_proof(&group, &proof, usize::MAX, &mut r).unwrap_err();
        for _ in 0..5 {
            if total >= 50 {
                break;
            }
            let slot = (r.next_u64() as usize) % n_slots;
            let mutated = mutate_proof(&group, &proof, slot, &mut r).unwrap();
            if mutated == proof {
                continue; // replacement happened to hit the same value
            }
            total += 1;
            if !verify_ppe(&group, &crs, &system, &mutated).unwrap() {
                rejected += 1;
            }
        }
    }
    assert_eq!(rejected, total);
}

#[test]
fn proof_under_wrong_crs_rejected() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(22);
    let (crs_a, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let (crs_b, _) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    for _ in 0..10 {
        let (system, xs, ys) = random_system(&group, PpeShape::General, &mut r);
        let proof = prove_ppe(&group, &crs_a, &system, &xs, &ys, &mut r).unwrap();
        assert!(verify_ppe(&group, &crs_a, &system, &proof).unwrap());
        assert!(!verify_ppe(&group, &crs_b, &system, &proof).unwrap());
    }
}

/// The delta-style family: two product equations satisfied by identity
/// witnesses plus the pin equation e(g1, g') = e(g1, g2).
fn pin_family_system<B: Backend>(group: &BilinearGroup<B>) -> PpeSystem<B> {
    let zero = group.scalar_zero();
    let one = group.scalar_one();
    PpeSystem {
        n1: 1,
        n2: 2,
        equations: vec![
            Ppe {
                shape: PpeShape::General,
                terms: vec![
                    PpeTerm {
                        a: group.g1().inv(),
                        alpha: vec![zero.clone()],
                        b: group.g2_identity(),
                        beta: vec![one.clone(), zero.clone()],
                    },
                    PpeTerm {
                        a: group.g1_identity(),
                        alpha: vec![one.clone()],
                        b: group.g2_identity(),
                        beta: vec![zero.clone(), one.clone()],
                    },
                ],
                target: group.gt_identity(),
            },
            Ppe {
                shape: PpeShape::LinearG2,
                terms: vec![PpeTerm {
                    a: group.g1().clone(),
                    alpha: vec![zero.clone()],
                    b: group.g2_identity(),
                    beta: vec![zero.clone(), one.clone()],
                }],
                target: group.pair(group.g1(), group.g2()),
            },
        ],
    }
}

#[test]
fn simulation_verifies_under_wi_crs() {
    for seed in 0..5u64 {
        let group = mock_group(BIG_MOCK_P);
        let mut r = rng(100 + seed);
        let (crs, td) = gs_crs_gen(&group, CrsMode::Wi, &mut r);
        let system = pin_family_system(&group);
        let proof = simulate_proof(&group, &crs, &td, &system, &mut r).unwrap();
        assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());
    }
    // Also on the real curve.
    let group = real_group();
    let mut r = rng(200);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Wi, &mut r);
    let system = pin_family_system(&group);
    let proof = simulate_proof(&group, &crs, &td, &system, &mut r).unwrap();
    assert!(verify_ppe(&group, &crs, &system, &proof).unwrap());
}

#[test]
fn simulation_refused_under_sound_crs() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(23);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let system = pin_family_system(&group);
    assert_eq!(
        simulate_proof(&group, &crs, &td, &system, &mut r).unwrap_err(),
        GsError::WrongCrsMode { expected: CrsMode::Wi }
    );
}

#[test]
fn simulation_rejects_unsupported_equations() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(24);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Wi, &mut r);
    // e(g1^2, y) = e(g1, g2) has no identity opening and is not a pin.
    let system = PpeSystem {
        n1: 0,
        n2: 1,
        equations: vec![Ppe {
            shape: PpeShape::LinearG2,
            terms: vec![PpeTerm {
                a: group.g1().pow(&group.scalar_from_u64(2)),
                alpha: vec![],
                b: group.g2_identity(),
                beta: vec![group.scalar_one()],
            }],
            target: group.pair(group.g1(), group.g2()),
        }],
    };
    assert_eq!(
        simulate_proof(&group, &crs, &td, &system, &mut r).unwrap_err(),
        GsError::UnsupportedEquation { equation: 0 }
    );
}

#[test]
fn commitment_pow_properties() {
    let group = mock_group(BIG_MOCK_P);
    let mut r = rng(25);
    let (crs, td) = gs_crs_gen(&group, CrsMode::Sound, &mut r);
    let h = group.g2().pow(&group.random_scalar(&mut r));
    let (com, _) = commit_g2(&group, &crs, &h, &mut r);

    assert_eq!(commitment_pow(&com, &group.scalar_one()), com);

    let zeroed = commitment_pow(&com, &group.scalar_zero());
    let id_com = commit_g2_with(
        &group,
        &crs,
        &group.g2_identity(),
        &CommitRand {
            r: [group.scalar_zero(), group.scalar_zero(), group.scalar_zero()],
        },
    );
    assert_eq!(zeroed, id_com);

    let v = group.random_scalar(&mut r);
    let powered = commitment_pow(&com, &v);
    assert_eq!(extract_commitment_g2(&td, &powered).unwrap(), h.pow(&v));
}
