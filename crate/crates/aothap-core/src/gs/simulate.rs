//! Proof simulation under a WI-mode CRS.
//!
//! The supported family is the one the protocol needs: systems in which
//! every equation is satisfied when all witnesses are set to the group
//! identity, except *pin equations* `e(a, y) = e(a, g2)` with a single G2
//! witness. Under the WI string `v3 = v1^{xi1} v2^{xi2} (1, 1, g2)`, a
//! commitment to the identity with randomness `(s1, s2, s3)` is equally a
//! commitment to `g2` with randomness `(s1 + xi1, s2 + xi2, s3 - 1)`, so
//! the simulator opens the pinned witness to the identity in the product
//! equations and to `g2` in the pin equation.

use rand::{CryptoRng, RngCore};

use crate::bilinear::{Backend, BilinearGroup, G1, G2};

use super::{
    commit_g1_with, commit_g2_with, prove::equation_components, prove::eval_equation, CommitRand,
    CrsMode, GsCrs, GsError, GsTrapdoor, Ppe, PpeProof, PpeShape, PpeSystem, TrapdoorKind,
};

/// Index of the pinned witness if the equation is a pin equation.
fn pin_witness<B: Backend>(group: &BilinearGroup<B>, eq: &Ppe<B>) -> Option<usize> {
    if eq.shape != PpeShape::LinearG2 || eq.terms.len() != 1 {
        return None;
    }
    let term = &eq.terms[0];
    if !term.b.is_identity() {
        return None;
    }
    let mut pinned = None;
    for (i, e) in term.beta.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        if !e.is_one() || pinned.is_some() {
            return None;
        }
        pinned = Some(i);
    }
    let i = pinned?;
    // The equation must pin its witness to g2 exactly: e(a, y) = e(a, g2).
    if eq.target != group.pair(&term.a, group.g2()) {
        return None;
    }
    Some(i)
}

/// Fabricates an accepting proof for the supported equation family
/// without knowledge of any real witnesses. Requires the WI CRS and its
/// simulation trapdoor.
pub fn simulate_proof<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    trapdoor: &GsTrapdoor<B>,
    system: &PpeSystem<B>,
    rng: &mut R,
) -> Result<PpeProof<B>, GsError> {
    if crs.mode != CrsMode::Wi {
        return Err(GsError::WrongCrsMode { expected: CrsMode::Wi });
    }
    if trapdoor.kind != TrapdoorKind::Simulation {
        return Err(GsError::WrongTrapdoorKind);
    }
    system.validate()?;

    let xs_id: Vec<G1<B>> = (0..system.n1).map(|_| group.g1_identity()).collect();
    let ys_id: Vec<G2<B>> = (0..system.n2).map(|_| group.g2_identity()).collect();

    // Classify every equation up front so an unsupported system fails
    // before any commitments are produced.
    let mut pins: Vec<Option<usize>> = Vec::with_capacity(system.equations.len());
    for (qi, eq) in system.equations.iter().enumerate() {
        if let Some(i) = pin_witness(group, eq) {
            pins.push(Some(i));
        } else if eval_equation(group, eq, &xs_id, &ys_id) == eq.target {
            pins.push(None);
        } else {
            return Err(GsError::UnsupportedEquation { equation: qi });
        }
    }

    let mut c = Vec::with_capacity(system.n1);
    let mut rx: Vec<CommitRand<B>> = Vec::with_capacity(system.n1);
    for x in &xs_id {
        let rand = CommitRand {
            r: [
                group.random_scalar(rng),
                group.random_scalar(rng),
                group.random_scalar(rng),
            ],
        };
        c.push(commit_g1_with(group, crs, x, &rand));
        rx.push(rand);
    }
    let mut d = Vec::with_capacity(system.n2);
    let mut ry: Vec<CommitRand<B>> = Vec::with_capacity(system.n2);
    for y in &ys_id {
        let rand = CommitRand {
            r: [
                group.random_scalar(rng),
                group.random_scalar(rng),
                group.random_scalar(rng),
            ],
        };
        d.push(commit_g2_with(group, crs, y, &rand));
        ry.push(rand);
    }

    let one = group.scalar_one();
    let equations = system
        .equations
        .iter()
        .zip(&pins)
        .map(|(eq, pin)| match pin {
            None => equation_components(group, eq, &xs_id, &rx, &ry, &d),
            Some(i) => {
                // Re-open commitment i to g2: (s1+xi1, s2+xi2, s3-1).
                let mut ry_eq = ry.clone();
                ry_eq[*i] = CommitRand {
                    r: [
                        ry[*i].r[0].add(&trapdoor.xi1),
                        ry[*i].r[1].add(&trapdoor.xi2),
                        ry[*i].r[2].sub(&one),
                    ],
                };
                equation_components(group, eq, &xs_id, &rx, &ry_eq, &d)
            }
        })
        .collect();

    Ok(PpeProof { c, d, equations })
}
