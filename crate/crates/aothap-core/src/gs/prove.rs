//! Proof generation.

use rand::{CryptoRng, RngCore};

use crate::bilinear::{Backend, BilinearGroup, GroupElem, G1, G2, Gt, Scalar};

use super::{
    commit_g1, commit_g2, CommitRand, CommitmentG2, EquationProof, GsCrs, GsError, Ppe, PpeProof,
    PpeShape, PpeSystem, Vec3,
};

/// Witness-side G1 value of one term: `a_q * prod_i x_i^{alpha_{q,i}}`.
pub(super) fn term_g1_value<B: Backend>(
    term_a: &G1<B>,
    alpha: &[Scalar<B>],
    xs: &[G1<B>],
) -> G1<B> {
    let mut acc = term_a.clone();
    for (x, e) in xs.iter().zip(alpha) {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            acc = acc.mul(x);
        } else {
            acc = acc.mul(&x.pow(e));
        }
    }
    acc
}

pub(super) fn term_g2_value<B: Backend>(
    term_b: &G2<B>,
    beta: &[Scalar<B>],
    ys: &[G2<B>],
) -> G2<B> {
    let mut acc = term_b.clone();
    for (y, e) in ys.iter().zip(beta) {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            acc = acc.mul(y);
        } else {
            acc = acc.mul(&y.pow(e));
        }
    }
    acc
}

/// Evaluates an equation directly on the witnesses: one pairing per term.
pub fn eval_equation<B: Backend>(
    group: &BilinearGroup<B>,
    eq: &Ppe<B>,
    xs: &[G1<B>],
    ys: &[G2<B>],
) -> Gt<B> {
    let mut acc = group.gt_identity();
    for term in &eq.terms {
        let lhs = term_g1_value(&term.a, &term.alpha, xs);
        let rhs = term_g2_value(&term.b, &term.beta, ys);
        acc = acc.mul(&group.pair(&lhs, &rhs));
    }
    acc
}

/// Linear combination of committed 3-vectors plus the embedded public
/// coefficient: `mu(b_q) * prod_i d_i^{beta_{q,i}}`.
pub(super) fn hat_vec<B: Backend, E: GroupElem<B>>(
    group: &BilinearGroup<B>,
    coeff: &E,
    exps: &[Scalar<B>],
    coms: &[Vec3<E>],
) -> Vec3<E> {
    let mut acc = Vec3::embed(group, coeff);
    for (com, e) in coms.iter().zip(exps) {
        if e.is_zero() {
            continue;
        }
        if e.is_one() {
            acc = acc.mul(com);
        } else {
            acc = acc.mul(&com.pow(e));
        }
    }
    acc
}

fn dot<B: Backend>(group: &BilinearGroup<B>, exps: &[Scalar<B>], rands: &[CommitRand<B>], j: usize) -> Scalar<B> {
    let mut acc = group.scalar_zero();
    for (e, rand) in exps.iter().zip(rands) {
        if e.is_zero() {
            continue;
        }
        acc = acc.add(&e.mul(&rand.r[j]));
    }
    acc
}

/// Builds the per-equation proof vectors from the witnesses and the
/// commitment randomness.
///
/// For `j = 1, 2, 3`:
///   `P_j  = prod_q dhat_q ^ (sum_i alpha_{q,i} r_{j,i})`  over G2 vectors,
///   `P'_j = mu1( prod_q X_q ^ (sum_i beta_{q,i} s_{j,i}) )` over G1,
/// where `dhat_q` folds the G2 commitments of the term and `X_q` is the
/// term's G1 witness-side value.
pub(super) fn equation_components<B: Backend>(
    group: &BilinearGroup<B>,
    eq: &Ppe<B>,
    xs: &[G1<B>],
    rx: &[CommitRand<B>],
    ry: &[CommitRand<B>],
    d_coms: &[CommitmentG2<B>],
) -> EquationProof<B> {
    let needs_p = matches!(eq.shape, PpeShape::General | PpeShape::LinearG1);
    let needs_p_prime = matches!(eq.shape, PpeShape::General | PpeShape::LinearG2);

    let p = needs_p.then(|| {
        let d_vecs: Vec<Vec3<G2<B>>> = d_coms.iter().map(|c| c.vec.clone()).collect();
        let mut out: Vec<Vec3<G2<B>>> = Vec::with_capacity(3);
        for j in 0..3 {
            let mut acc = Vec3::identity(group);
            for term in &eq.terms {
                let e = dot(group, &term.alpha, rx, j);
                if e.is_zero() {
                    continue;
                }
                let dhat = hat_vec(group, &term.b, &term.beta, &d_vecs);
                acc = acc.mul(&dhat.pow(&e));
            }
            out.push(acc);
        }
        [out[0].clone(), out[1].clone(), out[2].clone()]
    });

    let p_prime = needs_p_prime.then(|| {
        let mut out: Vec<Vec3<G1<B>>> = Vec::with_capacity(3);
        for j in 0..3 {
            let mut acc = group.g1_identity();
            for term in &eq.terms {
                let f = dot(group, &term.beta, ry, j);
                if f.is_zero() {
                    continue;
                }
                let x_q = term_g1_value(&term.a, &term.alpha, xs);
                acc = acc.mul(&x_q.pow(&f));
            }
            out.push(Vec3::embed(group, &acc));
        }
        [out[0].clone(), out[1].clone(), out[2].clone()]
    });

    EquationProof { p, p_prime }
}

/// Proves a system of pairing product equations. The witnesses are checked
/// against every equation first; proving with a non-satisfying witness is
/// an error rather than a silently unsound proof.
pub fn prove_ppe<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    system: &PpeSystem<B>,
    xs: &[G1<B>],
    ys: &[G2<B>],
    rng: &mut R,
) -> Result<PpeProof<B>, GsError> {
    system.validate()?;
    if xs.len() != system.n1 || ys.len() != system.n2 {
        return Err(GsError::Dimensions(format!(
            "witness arity ({}, {}) does not match system ({}, {})",
            xs.len(),
            ys.len(),
            system.n1,
            system.n2
        )));
    }
    for (qi, eq) in system.equations.iter().enumerate() {
        if eval_equation(group, eq, xs, ys) != eq.target {
            return Err(GsError::WitnessesDoNotSatisfy { equation: qi });
        }
    }

    let mut c = Vec::with_capacity(system.n1);
    let mut rx = Vec::with_capacity(system.n1);
    for x in xs {
        let (com, rand) = commit_g1(group, crs, x, rng);
        c.push(com);
        rx.push(rand);
    }
    let mut d = Vec::with_capacity(system.n2);
    let mut ry = Vec::with_capacity(system.n2);
    for y in ys {
        let (com, rand) = commit_g2(group, crs, y, rng);
        d.push(com);
        ry.push(rand);
    }

    let equations = system
        .equations
        .iter()
        .map(|eq| equation_components(group, eq, xs, &rx, &ry, &d))
        .collect();

    Ok(PpeProof { c, d, equations })
}
