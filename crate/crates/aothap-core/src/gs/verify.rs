//! Proof verification through the 3x3 pairing-matrix map.

use crate::bilinear::{Backend, BilinearGroup, G1, G2, Gt};

use super::{prove::hat_vec, GsCrs, GsError, PpeProof, PpeShape, PpeSystem, Vec3};

/// An element of GT^9, written as a 3x3 matrix. `F(x, y)` maps a pair of
/// 3-vectors to the matrix of pairwise pairings; two matrices multiply
/// componentwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GtMat3<B: Backend> {
    pub entries: [[Gt<B>; 3]; 3],
}

impl<B: Backend> GtMat3<B> {
    pub fn identity(group: &BilinearGroup<B>) -> Self {
        let row = || {
            [
                group.gt_identity(),
                group.gt_identity(),
                group.gt_identity(),
            ]
        };
        GtMat3 {
            entries: [row(), row(), row()],
        }
    }

    /// The embedding of a target value: identity everywhere except the
    /// (3,3) entry.
    pub fn embed_target(group: &BilinearGroup<B>, t: &Gt<B>) -> Self {
        let mut m = Self::identity(group);
        m.entries[2][2] = t.clone();
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for k in 0..3 {
            for l in 0..3 {
                m.entries[k][l] = self.entries[k][l].mul(&other.entries[k][l]);
            }
        }
        m
    }
}

/// Computes `prod_s F(x_s, y_s)` with one product-of-pairings per matrix
/// entry.
pub(super) fn f_product<B: Backend>(
    group: &BilinearGroup<B>,
    pairs: &[(&Vec3<G1<B>>, &Vec3<G2<B>>)],
) -> GtMat3<B> {
    let mut m = GtMat3::identity(group);
    if pairs.is_empty() {
        return m;
    }
    for k in 0..3 {
        for l in 0..3 {
            let cell: Vec<(&G1<B>, &G2<B>)> =
                pairs.iter().map(|(x, y)| (&x[k], &y[l])).collect();
            m.entries[k][l] = group
                .multi_pair(&cell)
                .expect("non-empty pairing product");
        }
    }
    m
}

/// Both sides of the verification equation for equation `qi` of the
/// system. Exposed for tests that assert the matrices match entrywise.
pub(crate) fn verification_sides<B: Backend>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    system: &PpeSystem<B>,
    proof: &PpeProof<B>,
    qi: usize,
) -> Result<(GtMat3<B>, GtMat3<B>), GsError> {
    let eq = &system.equations[qi];
    let comps = &proof.equations[qi];
    match eq.shape {
        PpeShape::General => {
            if comps.p.is_none() || comps.p_prime.is_none() {
                return Err(GsError::ShapeMismatch);
            }
        }
        PpeShape::LinearG1 => {
            if comps.p.is_none() || comps.p_prime.is_some() {
                return Err(GsError::ShapeMismatch);
            }
        }
        PpeShape::LinearG2 => {
            if comps.p.is_some() || comps.p_prime.is_none() {
                return Err(GsError::ShapeMismatch);
            }
        }
    }

    let c_vecs: Vec<Vec3<G1<B>>> = proof.c.iter().map(|c| c.vec.clone()).collect();
    let d_vecs: Vec<Vec3<G2<B>>> = proof.d.iter().map(|d| d.vec.clone()).collect();

    // LHS: commitments folded per term.
    let chat: Vec<Vec3<G1<B>>> = eq
        .terms
        .iter()
        .map(|t| hat_vec(group, &t.a, &t.alpha, &c_vecs))
        .collect();
    let dhat: Vec<Vec3<G2<B>>> = eq
        .terms
        .iter()
        .map(|t| hat_vec(group, &t.b, &t.beta, &d_vecs))
        .collect();
    let lhs_pairs: Vec<(&Vec3<G1<B>>, &Vec3<G2<B>>)> =
        chat.iter().zip(dhat.iter()).collect();
    let lhs = f_product(group, &lhs_pairs);

    // RHS: embedded target times the correction terms of the shape.
    let mut rhs_pairs: Vec<(&Vec3<G1<B>>, &Vec3<G2<B>>)> = Vec::with_capacity(6);
    if let Some(p) = &comps.p {
        for j in 0..3 {
            rhs_pairs.push((&crs.u[j], &p[j]));
        }
    }
    if let Some(p_prime) = &comps.p_prime {
        for j in 0..3 {
            rhs_pairs.push((&p_prime[j], &crs.v[j]));
        }
    }
    let rhs = GtMat3::embed_target(group, &eq.target).mul(&f_product(group, &rhs_pairs));
    Ok((lhs, rhs))
}

/// Verifies a proof against a system under a CRS. `Ok(true)` means every
/// equation's verification matrices match entrywise; structural problems
/// (arity or shape mismatches) are errors, not rejections.
///
/// Each matrix cell is checked as a single product-of-pairings identity
/// (left side against right side times the embedded target), which is
/// entrywise-equal to comparing the two matrices of
/// [`verification_sides`].
pub fn verify_ppe<B: Backend>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    system: &PpeSystem<B>,
    proof: &PpeProof<B>,
) -> Result<bool, GsError> {
    system.validate()?;
    if proof.c.len() != system.n1
        || proof.d.len() != system.n2
        || proof.equations.len() != system.equations.len()
    {
        return Err(GsError::ShapeMismatch);
    }

    let c_vecs: Vec<Vec3<G1<B>>> = proof.c.iter().map(|c| c.vec.clone()).collect();
    let d_vecs: Vec<Vec3<G2<B>>> = proof.d.iter().map(|d| d.vec.clone()).collect();

    for (eq, comps) in system.equations.iter().zip(&proof.equations) {
        match eq.shape {
            PpeShape::General => {
                if comps.p.is_none() || comps.p_prime.is_none() {
                    return Err(GsError::ShapeMismatch);
                }
            }
            PpeShape::LinearG1 => {
                if comps.p.is_none() || comps.p_prime.is_some() {
                    return Err(GsError::ShapeMismatch);
                }
            }
            PpeShape::LinearG2 => {
                if comps.p.is_some() || comps.p_prime.is_none() {
                    return Err(GsError::ShapeMismatch);
                }
            }
        }

        let chat: Vec<Vec3<G1<B>>> = eq
            .terms
            .iter()
            .map(|t| hat_vec(group, &t.a, &t.alpha, &c_vecs))
            .collect();
        let dhat: Vec<Vec3<G2<B>>> = eq
            .terms
            .iter()
            .map(|t| hat_vec(group, &t.b, &t.beta, &d_vecs))
            .collect();

        let identity = group.gt_identity();
        for k in 0..3 {
            for l in 0..3 {
                let lhs_cell: Vec<(&G1<B>, &G2<B>)> = chat
                    .iter()
                    .zip(dhat.iter())
                    .map(|(c, d)| (&c[k], &d[l]))
                    .collect();
                let mut rhs_cell: Vec<(&G1<B>, &G2<B>)> = Vec::with_capacity(6);
                if let Some(p) = &comps.p {
                    for j in 0..3 {
                        rhs_cell.push((&crs.u[j][k], &p[j][l]));
                    }
                }
                if let Some(p_prime) = &comps.p_prime {
                    for j in 0..3 {
                        rhs_cell.push((&p_prime[j][k], &crs.v[j][l]));
                    }
                }
                let extra = if k == 2 && l == 2 { &eq.target } else { &identity };
                if !group.pairing_products_equal(&lhs_cell, &rhs_cell, extra)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
