//! Commitments and non-interactive proofs for pairing product equations.
//!
//! A pairing product equation over witnesses `x_i` in G1 and `y_i` in G2
//! has the form
//!
//! ```text
//!   prod_q e(a_q * prod_i x_i^{alpha_{q,i}},  b_q * prod_i y_i^{beta_{q,i}})  =  t_T
//! ```
//!
//! with public coefficients `a_q`, `b_q`, exponent matrices `alpha`,
//! `beta` and target `t_T`. Witnesses are committed under a common
//! reference string of six 3-vectors; each equation contributes proof
//! vectors that let a verifier check the equation over commitments through
//! the map `F` that sends a pair of 3-vectors to the 3x3 matrix of
//! pairwise pairings.
//!
//! The CRS comes in two computationally indistinguishable flavors. In the
//! *sound* setting commitments are perfectly binding and a trapdoor
//! extracts committed witnesses. In the *witness-indistinguishable*
//! setting commitments are perfectly hiding and a trapdoor equivocates
//! them, which powers proof simulation for the specific equation family
//! the protocol uses (all witnesses openable to the identity, plus a pin
//! equation `e(g1, g') = e(g1, g2)` whose witness is re-opened to `g2`).
//!
//! Exactly three equation shapes are supported: the general form above,
//! linear equations whose only witnesses live in G1, and linear equations
//! whose only witnesses live in G2. Systems of equations share one set of
//! commitments.

#[cfg(test)]
mod tests;

mod prove;
mod simulate;
mod verify;

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::bilinear::{Backend, BilinearGroup, GroupElem, G1, G2, Gt, PairingError, Scalar};

pub use prove::{eval_equation, prove_ppe};
pub use simulate::simulate_proof;
pub use verify::{verify_ppe, GtMat3};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GsError {
    #[error("equation system dimensions are inconsistent: {0}")]
    Dimensions(String),
    #[error("proof shape does not match the equation system")]
    ShapeMismatch,
    #[error("witnesses do not satisfy equation {equation}")]
    WitnessesDoNotSatisfy { equation: usize },
    #[error("trapdoor kind does not match the requested operation")]
    WrongTrapdoorKind,
    #[error("operation requires a {expected:?}-mode CRS")]
    WrongCrsMode { expected: CrsMode },
    #[error("equation {equation} is outside the supported simulation family")]
    UnsupportedEquation { equation: usize },
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

/// A 3-vector over one of the source groups, multiplied componentwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vec3<E>(pub [E; 3]);

impl<E> Vec3<E> {
    pub fn new(a: E, b: E, c: E) -> Self {
        Vec3([a, b, c])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, E> {
        self.0.iter()
    }
}

impl<E> std::ops::Index<usize> for Vec3<E> {
    type Output = E;
    fn index(&self, i: usize) -> &E {
        &self.0[i]
    }
}

impl<E> Vec3<E> {
    pub fn identity<B: Backend>(group: &BilinearGroup<B>) -> Self
    where
        E: GroupElem<B>,
    {
        Vec3([E::identity(group), E::identity(group), E::identity(group)])
    }

    /// The embedding `mu(x) = (1, 1, x)`.
    pub fn embed<B: Backend>(group: &BilinearGroup<B>, x: &E) -> Self
    where
        E: GroupElem<B>,
    {
        Vec3([E::identity(group), E::identity(group), x.clone()])
    }

    pub fn mul<B: Backend>(&self, other: &Self) -> Self
    where
        E: GroupElem<B>,
    {
        Vec3([
            self.0[0].mul(&other.0[0]),
            self.0[1].mul(&other.0[1]),
            self.0[2].mul(&other.0[2]),
        ])
    }

    pub fn pow<B: Backend>(&self, e: &Scalar<B>) -> Self
    where
        E: GroupElem<B>,
    {
        Vec3([self.0[0].pow(e), self.0[1].pow(e), self.0[2].pow(e)])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrsMode {
    /// Perfectly binding commitments; extraction trapdoor.
    Sound,
    /// Perfectly hiding commitments; simulation trapdoor.
    Wi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapdoorKind {
    Extraction,
    Simulation,
}

/// A Groth-Sahai common reference string: three 3-vectors over each source
/// group. In sound mode `u3 = u1^{xi1} * u2^{xi2}`; in WI mode the third
/// coordinate carries an extra generator so `u3` leaves the span of
/// `(u1, u2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsCrs<B: Backend> {
    pub mode: CrsMode,
    pub u: [Vec3<G1<B>>; 3],
    pub v: [Vec3<G2<B>>; 3],
}

/// CRS trapdoor. Extraction (sound CRS) divides commitments by their
/// blinding; simulation (WI CRS) re-opens commitments using `xi1, xi2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsTrapdoor<B: Backend> {
    pub kind: TrapdoorKind,
    pub(crate) a: Scalar<B>,
    pub(crate) b: Scalar<B>,
    pub(crate) xi1: Scalar<B>,
    pub(crate) xi2: Scalar<B>,
}

/// Generates a CRS and its trapdoor. Emitting the trapdoor is the
/// caller's explicit choice; production flows drop it immediately.
pub fn gs_crs_gen<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    mode: CrsMode,
    rng: &mut R,
) -> (GsCrs<B>, GsTrapdoor<B>) {
    // a, b must be invertible for extraction to exist.
    let a = group.random_nonzero_scalar(rng);
    let b = group.random_nonzero_scalar(rng);
    let xi1 = group.random_scalar(rng);
    let xi2 = group.random_scalar(rng);
    (
        gs_crs_from_scalars(group, mode, &a, &b, &xi1, &xi2),
        GsTrapdoor {
            kind: match mode {
                CrsMode::Sound => TrapdoorKind::Extraction,
                CrsMode::Wi => TrapdoorKind::Simulation,
            },
            a,
            b,
            xi1,
            xi2,
        },
    )
}

/// Deterministic CRS construction from explicit scalars.
pub fn gs_crs_from_scalars<B: Backend>(
    group: &BilinearGroup<B>,
    mode: CrsMode,
    a: &Scalar<B>,
    b: &Scalar<B>,
    xi1: &Scalar<B>,
    xi2: &Scalar<B>,
) -> GsCrs<B> {
    let g1 = group.g1();
    let g2 = group.g2();
    let u1 = Vec3::new(g1.pow(a), group.g1_identity(), g1.clone());
    let u2 = Vec3::new(group.g1_identity(), g1.pow(b), g1.clone());
    let mut u3 = u1.pow(xi1).mul(&u2.pow(xi2));
    let v1 = Vec3::new(g2.pow(a), group.g2_identity(), g2.clone());
    let v2 = Vec3::new(group.g2_identity(), g2.pow(b), g2.clone());
    let mut v3 = v1.pow(xi1).mul(&v2.pow(xi2));
    if mode == CrsMode::Wi {
        u3 = u3.mul(&Vec3::embed(group, g1));
        v3 = v3.mul(&Vec3::embed(group, g2));
    }
    GsCrs {
        mode,
        u: [u1, u2, u3],
        v: [v1, v2, v3],
    }
}

/// Commitment to a G1 element: `mu(x) * u1^{r1} * u2^{r2} * u3^{r3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentG1<B: Backend> {
    pub vec: Vec3<G1<B>>,
}

/// Commitment to a G2 element, over the `v` vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitmentG2<B: Backend> {
    pub vec: Vec3<G2<B>>,
}

/// Commitment randomness, retained by the committer only. There is no
/// codec for this type; it never leaves the prover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitRand<B: Backend> {
    pub(crate) r: [Scalar<B>; 3],
}

fn commit_vec3<B: Backend, E: GroupElem<B>>(
    group: &BilinearGroup<B>,
    basis: &[Vec3<E>; 3],
    x: &E,
    r: &[Scalar<B>; 3],
) -> Vec3<E> {
    Vec3::embed(group, x)
        .mul(&basis[0].pow(&r[0]))
        .mul(&basis[1].pow(&r[1]))
        .mul(&basis[2].pow(&r[2]))
}

fn random_rand<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    rng: &mut R,
) -> CommitRand<B> {
    CommitRand {
        r: [
            group.random_scalar(rng),
            group.random_scalar(rng),
            group.random_scalar(rng),
        ],
    }
}

pub fn commit_g1<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    x: &G1<B>,
    rng: &mut R,
) -> (CommitmentG1<B>, CommitRand<B>) {
    let rand = random_rand(group, rng);
    let com = commit_g1_with(group, crs, x, &rand);
    (com, rand)
}

pub fn commit_g1_with<B: Backend>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    x: &G1<B>,
    rand: &CommitRand<B>,
) -> CommitmentG1<B> {
    CommitmentG1 {
        vec: commit_vec3(group, &crs.u, x, &rand.r),
    }
}

pub fn commit_g2<B: Backend, R: RngCore + CryptoRng>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    y: &G2<B>,
    rng: &mut R,
) -> (CommitmentG2<B>, CommitRand<B>) {
    let rand = random_rand(group, rng);
    let com = commit_g2_with(group, crs, y, &rand);
    (com, rand)
}

pub fn commit_g2_with<B: Backend>(
    group: &BilinearGroup<B>,
    crs: &GsCrs<B>,
    y: &G2<B>,
    rand: &CommitRand<B>,
) -> CommitmentG2<B> {
    CommitmentG2 {
        vec: commit_vec3(group, &crs.v, y, &rand.r),
    }
}

fn extract_vec3<B: Backend, E: GroupElem<B>>(td: &GsTrapdoor<B>, com: &Vec3<E>) -> Result<E, GsError> {
    if td.kind != TrapdoorKind::Extraction {
        return Err(GsError::WrongTrapdoorKind);
    }
    let inv_a = td.a.invert().expect("CRS scalar a is nonzero");
    let inv_b = td.b.invert().expect("CRS scalar b is nonzero");
    // x = Z / (X^{1/a} * Y^{1/b})
    let blind = com[0].pow(&inv_a).mul(&com[1].pow(&inv_b));
    Ok(com[2].mul(&blind.inv()))
}

/// Recovers the committed G1 element from a commitment formed under the
/// matching sound CRS.
pub fn extract_commitment_g1<B: Backend>(
    td: &GsTrapdoor<B>,
    com: &CommitmentG1<B>,
) -> Result<G1<B>, GsError> {
    extract_vec3(td, &com.vec)
}

pub fn extract_commitment_g2<B: Backend>(
    td: &GsTrapdoor<B>,
    com: &CommitmentG2<B>,
) -> Result<G2<B>, GsError> {
    extract_vec3(td, &com.vec)
}

/// Componentwise exponentiation of a commitment. The result is a valid
/// commitment to `y^v` whose randomness is the original scaled by `v`.
pub fn commitment_pow<B: Backend>(com: &CommitmentG2<B>, v: &Scalar<B>) -> CommitmentG2<B> {
    CommitmentG2 {
        vec: com.vec.pow(v),
    }
}

/// Equation shape. `LinearG1` equations reference only G1 witnesses,
/// `LinearG2` only G2 witnesses; `General` equations may reference both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpeShape {
    General,
    LinearG1,
    LinearG2,
}

/// One pairing term `e(a * prod x_i^{alpha_i}, b * prod y_i^{beta_i})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpeTerm<B: Backend> {
    pub a: G1<B>,
    pub alpha: Vec<Scalar<B>>,
    pub b: G2<B>,
    pub beta: Vec<Scalar<B>>,
}

/// A single pairing product equation over the witness vector of its
/// surrounding system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ppe<B: Backend> {
    pub shape: PpeShape,
    pub terms: Vec<PpeTerm<B>>,
    pub target: Gt<B>,
}

/// A conjunction of equations sharing one witness vector (`n1` G1
/// witnesses, `n2` G2 witnesses) and hence one set of commitments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpeSystem<B: Backend> {
    pub n1: usize,
    pub n2: usize,
    pub equations: Vec<Ppe<B>>,
}

impl<B: Backend> PpeSystem<B> {
    /// Checks dimension and shape consistency.
    pub fn validate(&self) -> Result<(), GsError> {
        if self.equations.is_empty() {
            return Err(GsError::Dimensions("no equations".into()));
        }
        for (qi, eq) in self.equations.iter().enumerate() {
            if eq.terms.is_empty() {
                return Err(GsError::Dimensions(format!("equation {qi} has no terms")));
            }
            let mut uses_g1 = false;
            let mut uses_g2 = false;
            for term in &eq.terms {
                if term.alpha.len() != self.n1 || term.beta.len() != self.n2 {
                    return Err(GsError::Dimensions(format!(
                        "equation {qi}: exponent rows do not match witness arity"
                    )));
                }
                uses_g1 |= term.alpha.iter().any(|s| !s.is_zero());
                uses_g2 |= term.beta.iter().any(|s| !s.is_zero());
            }
            let shape_ok = match eq.shape {
                PpeShape::General => true,
                PpeShape::LinearG1 => !uses_g2,
                PpeShape::LinearG2 => !uses_g1,
            };
            if !shape_ok {
                return Err(GsError::Dimensions(format!(
                    "equation {qi}: shape {:?} inconsistent with exponents",
                    eq.shape
                )));
            }
        }
        Ok(())
    }
}

/// Per-equation proof vectors. Which side is present depends on the
/// equation shape: general equations carry both, linear ones carry the
/// side that corrects for the committed witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationProof<B: Backend> {
    pub p: Option<[Vec3<G2<B>>; 3]>,
    pub p_prime: Option<[Vec3<G1<B>>; 3]>,
}

/// Commitments to all witnesses plus per-equation proof vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpeProof<B: Backend> {
    pub c: Vec<CommitmentG1<B>>,
    pub d: Vec<CommitmentG2<B>>,
    pub equations: Vec<EquationProof<B>>,
}

impl<B: Backend> PpeProof<B> {
    /// Number of group elements a serialized proof carries.
    pub fn element_count(&self) -> usize {
        let coms = 3 * (self.c.len() + self.d.len());
        let eqs: usize = self
            .equations
            .iter()
            .map(|e| {
                e.p.as_ref().map_or(0, |_| 9) + e.p_prime.as_ref().map_or(0, |_| 9)
            })
            .sum();
        coms + eqs
    }
}
