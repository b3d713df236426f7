//! Shared fixtures for the wire and acceptance suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use aothap_core::artifacts::PublishedDb;
use aothap_core::attributes::{AccessPolicy, AttributeDef, AttributeList, AttributeUniverse};
use aothap_core::bilinear::{bilinear_setup, Backend, BilinearGroup, Gt, SecurityProfile};
use aothap_core::protocol::{crs_setup, db_setup, Crs, SenderKeys};
use aothap_core::{MockBackend, Real};

pub const BIG_MOCK_P: u64 = 2305843009213693951; // 2^61 - 1

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn universe(shape: &[usize]) -> AttributeUniverse {
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

pub fn mock_group() -> BilinearGroup<MockBackend> {
    bilinear_setup::<MockBackend>(&SecurityProfile::Mock(BIG_MOCK_P)).unwrap()
}

pub fn real_group() -> BilinearGroup<Real> {
    bilinear_setup::<Real>(&SecurityProfile::Standard128).unwrap()
}

/// A random policy that allows at least one value per attribute and, when
/// possible, forbids at least one value of some attribute.
pub fn random_policy(
    universe: &AttributeUniverse,
    rng: &mut ChaCha20Rng,
) -> AccessPolicy {
    loop {
        let allow: Vec<Vec<bool>> = (0..universe.attribute_count())
            .map(|l| loop {
                let row: Vec<bool> = (0..universe.value_count(l))
                    .map(|_| rng.gen_bool(0.6))
                    .collect();
                if row.iter().any(|&b| b) {
                    break row;
                }
            })
            .collect();
        let policy = AccessPolicy { allow };
        let restrictive = policy
            .allow
            .iter()
            .any(|row| row.iter().any(|&b| !b));
        if restrictive || universe.total_values() == universe.attribute_count() {
            return policy;
        }
    }
}

/// A list satisfying the policy.
pub fn satisfying_list(policy: &AccessPolicy, rng: &mut ChaCha20Rng) -> AttributeList {
    let choices = policy
        .allow
        .iter()
        .map(|row| {
            let allowed: Vec<usize> = row
                .iter()
                .enumerate()
                .filter_map(|(t, &b)| b.then_some(t))
                .collect();
            allowed[rng.gen_range(0..allowed.len())]
        })
        .collect();
    AttributeList { choices }
}

/// A list violating the policy, when one exists.
pub fn violating_list(policy: &AccessPolicy, rng: &mut ChaCha20Rng) -> Option<AttributeList> {
    let mut list = satisfying_list(policy, rng);
    let candidates: Vec<usize> = policy
        .allow
        .iter()
        .enumerate()
        .filter(|(_, row)| row.iter().any(|&b| !b))
        .map(|(l, _)| l)
        .collect();
    let l = *candidates.get(rng.gen_range(0..candidates.len().max(1)))?;
    let forbidden: Vec<usize> = policy.allow[l]
        .iter()
        .enumerate()
        .filter_map(|(t, &b)| (!b).then_some(t))
        .collect();
    list.choices[l] = forbidden[rng.gen_range(0..forbidden.len())];
    Some(list)
}

pub struct Env<B: Backend> {
    pub crs: Arc<Crs<B>>,
    pub keys: Arc<SenderKeys<B>>,
    pub db: Arc<PublishedDb<B>>,
    pub payloads: Vec<Gt<B>>,
    pub policies: Vec<AccessPolicy>,
}

/// Full sender-side setup over an existing group.
pub fn setup_env<B: Backend>(
    group: &BilinearGroup<B>,
    shape: &[usize],
    n_records: usize,
    seed: u64,
    policies: Option<Vec<AccessPolicy>>,
) -> Env<B> {
    let mut rng = rng(seed);
    let u = universe(shape);
    let (crs, _) = crs_setup(group, &u, &mut rng, false);
    let policies: Vec<AccessPolicy> = policies.unwrap_or_else(|| {
        (0..n_records)
            .map(|_| random_policy(&u, &mut rng))
            .collect()
    });
    let records: Vec<(Gt<B>, AccessPolicy)> = policies
        .iter()
        .map(|p| (crs.group.random_gt(&mut rng), p.clone()))
        .collect();
    let payloads: Vec<Gt<B>> = records.iter().map(|(m, _)| m.clone()).collect();
    let (keys, cdb) = db_setup(&crs, &records, &mut rng).unwrap();
    let db = PublishedDb {
        pk: keys.pk.clone(),
        psi: keys.psi.clone(),
        records: cdb,
        sealed: vec![Vec::new(); payloads.len()],
    };
    Env {
        crs: Arc::new(crs),
        keys: Arc::new(keys),
        db: Arc::new(db),
        payloads,
        policies,
    }
}
