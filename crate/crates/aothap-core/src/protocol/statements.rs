//! The pairing-product statements the four proofs are about.
//!
//! Both sides of the protocol rebuild these systems independently from
//! public data, so the witness ordering fixed here is part of the wire
//! contract:
//!
//! * `psi`:   x = [g1^w, g1^alpha, B^gamma],  y = [g2^w, h, g2^alpha, g']
//! * `phi`:   x = [A_{1,t_1} .. A_{n,t_n}, T_1 .. T_n]
//! * `pi`:    x = [prod_l c4_l, c2],          y = [c1, g2^v]
//! * `delta`: x = [Req^gamma, B^gamma],       y = [h, g']
//!
//! `g'` is the pinned witness, constrained to `g2` by the equation
//! `e(g1, g') = e(g1, g2)`.

use crate::bilinear::{Backend, G1, G2};
use crate::gs::{Ppe, PpeShape, PpeSystem, PpeTerm};

use super::{Crs, PublicKey};

/// Key-consistency statement proven at database setup:
///   e(g1^{-1}, g2^w) e(g1^w, g') = 1
///   e(B^{-1}, h) e(B^gamma, g') = 1
///   e(g1^{-1}, g2^alpha) e(g1^alpha, g') = 1
///   e(g1, g') = e(g1, g2)
pub fn psi_statement<B: Backend>(crs: &Crs<B>, blind_base: &G1<B>) -> PpeSystem<B> {
    let group = &crs.group;
    let zero = group.scalar_zero();
    let one = group.scalar_one();
    let g1_inv = group.g1().inv();
    let product_eq = |a1: G1<B>, beta1: usize, alpha2: usize| Ppe {
        shape: PpeShape::General,
        terms: vec![
            PpeTerm {
                a: a1,
                alpha: vec![zero.clone(), zero.clone(), zero.clone()],
                b: group.g2_identity(),
                beta: {
                    let mut v = vec![zero.clone(); 4];
                    v[beta1] = one.clone();
                    v
                },
            },
            PpeTerm {
                a: group.g1_identity(),
                alpha: {
                    let mut v = vec![zero.clone(); 3];
                    v[alpha2] = one.clone();
                    v
                },
                b: group.g2_identity(),
                beta: vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
            },
        ],
        target: group.gt_identity(),
    };
    PpeSystem {
        n1: 3,
        n2: 4,
        equations: vec![
            product_eq(g1_inv.clone(), 0, 0), // ties g2^w to g1^w
            product_eq(blind_base.inv(), 1, 2), // ties h to B^gamma
            product_eq(g1_inv, 2, 1),         // ties g2^alpha to g1^alpha
            pin_equation(crs, 3, 4, 3),
        ],
    }
}

/// The pin equation `e(g1, g') = e(g1, g2)` over an `(n1, n2)` witness
/// vector with the pinned witness at `pin_index` on the G2 side.
fn pin_equation<B: Backend>(crs: &Crs<B>, n1: usize, n2: usize, pin_index: usize) -> Ppe<B> {
    let group = &crs.group;
    let mut beta = vec![group.scalar_zero(); n2];
    beta[pin_index] = group.scalar_one();
    Ppe {
        shape: PpeShape::LinearG2,
        terms: vec![PpeTerm {
            a: group.g1().clone(),
            alpha: vec![group.scalar_zero(); n1],
            b: group.g2_identity(),
            beta,
        }],
        target: group.gt_generator().clone(),
    }
}

/// Issue statement: `e(g1, prod_l R_l) = e(prod_l A_{l,t_l} * prod_l T_l, g2)`
/// with the `A` and `T` values as G1 witnesses. The `R_l` are public, so
/// the right-hand product becomes the target.
pub fn phi_statement<B: Backend>(crs: &Crs<B>, randomized: &[G2<B>]) -> PpeSystem<B> {
    let group = &crs.group;
    let n = randomized.len();
    let mut r_prod = group.g2_identity();
    for r in randomized {
        r_prod = r_prod.mul(r);
    }
    let target = group.pair(group.g1(), &r_prod);
    PpeSystem {
        n1: 2 * n,
        n2: 0,
        equations: vec![Ppe {
            shape: PpeShape::LinearG1,
            terms: vec![PpeTerm {
                a: group.g1_identity(),
                alpha: vec![group.scalar_one(); 2 * n],
                b: group.g2().clone(),
                beta: vec![],
            }],
            target,
        }],
    }
}

/// Transfer request statement:
///   e(y * prod_l c4_l, c1) = e(g1, g2)        (the handle blinds a valid record)
///   e(c2, g2) e(B, g2^v) = e(Req, g2)         (Req randomizes that record's c2)
pub fn pi_statement<B: Backend>(crs: &Crs<B>, pk: &PublicKey<B>, req: &G1<B>) -> PpeSystem<B> {
    let group = &crs.group;
    let zero = group.scalar_zero();
    let one = group.scalar_one();
    let record_validity = Ppe {
        shape: PpeShape::General,
        terms: vec![PpeTerm {
            a: pk.sig_pk.clone(),
            alpha: vec![one.clone(), zero.clone()],
            b: group.g2_identity(),
            beta: vec![one.clone(), zero.clone()],
        }],
        target: group.gt_generator().clone(),
    };
    let req_wellformed = Ppe {
        shape: PpeShape::General,
        terms: vec![
            PpeTerm {
                a: group.g1_identity(),
                alpha: vec![zero.clone(), one.clone()],
                b: group.g2().clone(),
                beta: vec![zero.clone(), zero.clone()],
            },
            PpeTerm {
                a: pk.blind_base.clone(),
                alpha: vec![zero.clone(), zero.clone()],
                b: group.g2_identity(),
                beta: vec![zero.clone(), one.clone()],
            },
        ],
        target: group.pair(req, group.g2()),
    };
    PpeSystem {
        n1: 2,
        n2: 2,
        equations: vec![record_validity, req_wellformed],
    }
}

/// Transfer response statement:
///   e(Req^{-1}, h) e(Req^gamma, g') = 1
///   e(B^{-1}, h) e(B^gamma, g') = 1
///   e(g1, g') = e(g1, g2)
pub fn delta_statement<B: Backend>(crs: &Crs<B>, pk: &PublicKey<B>, req: &G1<B>) -> PpeSystem<B> {
    let group = &crs.group;
    let zero = group.scalar_zero();
    let one = group.scalar_one();
    let product_eq = |base_inv: G1<B>, alpha_idx: usize| Ppe {
        shape: PpeShape::General,
        terms: vec![
            PpeTerm {
                a: base_inv,
                alpha: vec![zero.clone(), zero.clone()],
                b: group.g2_identity(),
                beta: vec![one.clone(), zero.clone()],
            },
            PpeTerm {
                a: group.g1_identity(),
                alpha: {
                    let mut v = vec![zero.clone(); 2];
                    v[alpha_idx] = one.clone();
                    v
                },
                b: group.g2_identity(),
                beta: vec![zero.clone(), one.clone()],
            },
        ],
        target: group.gt_identity(),
    };
    PpeSystem {
        n1: 2,
        n2: 2,
        equations: vec![
            product_eq(req.inv(), 0),
            product_eq(pk.blind_base.inv(), 1),
            pin_equation(crs, 2, 2, 1),
        ],
    }
}
