//! KZG vector commitment over the Lagrange basis of `{0, .., N-1}`. Updates
//! need no published information: everything follows from public tables.

use std::convert::Infallible;

use ark_ec::AffineRepr;
use ark_ff::{batch_inversion, One, Zero};
use rayon::prelude::*;

use crate::batch::UpdateBatch;
use crate::error::{Result, VcError};
use crate::pairing::{
    fixed_base_g1, msm, trusted_setup, verify_kzg, G1Affine, G1Projective, Scalar, Srs, Trapdoor,
};
use crate::poly::barycentric_denominator;
use crate::updinfo::{BackendId, UpdateInfo};
use crate::vc::{DynamicVc, OpCounter, UpdateOutcome};

/// Largest `N` for which the full `N x N` proof table is kept in memory.
pub const DENSE_TABLE_LIMIT: usize = 1 << 10;

/// Commitments `[L_i]` and the openings `pi_{i,j}` of each `L_i` at each `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangeTable {
    n: usize,
    commitments: Vec<G1Affine>,
    /// Column-major: `proofs[j * n + i] = pi_{i,j}`.
    proofs: Option<Vec<G1Affine>>,
    /// Barycentric denominators `w_i` and their inverses.
    weights: Vec<Scalar>,
    weights_inv: Vec<Scalar>,
}

/// Builds the setup and the Lagrange table for vectors of length `n`.
pub fn keygen(n: usize, seed: &[u8]) -> Result<(Srs, LagrangeTable)> {
    if n == 0 {
        return Err(VcError::InvalidParameter("vector length must be positive".into()));
    }
    let srs = trusted_setup(n, seed)?;
    let table = LagrangeTable::generate(n, &Trapdoor::from_seed(seed));
    Ok((srs, table))
}

/// `L_i(tau)` for every i, via `V(tau) / ((tau - i) w_i)`.
pub(crate) fn lagrange_at(n: usize, tau: &Trapdoor) -> (Vec<Scalar>, Vec<Scalar>) {
    let t = tau.0;
    let weights: Vec<Scalar> = (0..n).map(|i| barycentric_denominator(n, i)).collect();
    let v: Scalar = (0..n as u64).map(|x| t - Scalar::from(x)).product();
    let mut denom: Vec<Scalar> = (0..n).map(|i| (t - Scalar::from(i as u64)) * weights[i]).collect();
    batch_inversion(&mut denom);
    (denom.iter().map(|d| v * d).collect(), weights)
}

impl LagrangeTable {
    pub(crate) fn generate(n: usize, tau: &Trapdoor) -> Self {
        let (lag, weights) = lagrange_at(n, tau);
        let commitments = fixed_base_g1(&lag);
        let proofs = (n <= DENSE_TABLE_LIMIT).then(|| {
            let mut shift_inv: Vec<Scalar> = (0..n).map(|j| tau.0 - Scalar::from(j as u64)).collect();
            batch_inversion(&mut shift_inv);
            let scalars: Vec<Scalar> = (0..n * n)
                .into_par_iter()
                .map(|k| {
                    let (j, i) = (k / n, k % n);
                    let delta = if i == j { Scalar::one() } else { Scalar::zero() };
                    (lag[i] - delta) * shift_inv[j]
                })
                .collect();
            fixed_base_g1(&scalars)
        });
        let mut weights_inv = weights.clone();
        batch_inversion(&mut weights_inv);
        Self { n, commitments, proofs, weights, weights_inv }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_dense(&self) -> bool {
        self.proofs.is_some()
    }

    pub fn commitments(&self) -> &[G1Affine] {
        &self.commitments
    }

    pub fn commitment(&self, i: usize) -> G1Affine {
        self.commitments[i]
    }

    /// `pi_{i,j}`, from the table or rebuilt from the commitments.
    pub fn proof(&self, i: usize, j: usize) -> G1Projective {
        match &self.proofs {
            Some(p) => p[j * self.n + i].into_group(),
            None => self.combine_proofs(j, &[(i, Scalar::one())]).0,
        }
    }

    /// `sum_t s_t * pi_{i_t, x}` together with the number of scalar
    /// multiplications performed.
    ///
    /// Without the dense table: for `i != x`,
    /// `pi_{i,x} = ([L_i] - (w_x / w_i) [L_x]) / (i - x)`, and
    /// `pi_{x,x} = -sum_{i != x} pi_{i,x}` because the basis sums to one.
    pub fn combine_proofs(&self, x: usize, terms: &[(usize, Scalar)]) -> (G1Projective, u64) {
        if let Some(p) = &self.proofs {
            let col = &p[x * self.n..(x + 1) * self.n];
            let mut acc = G1Projective::zero();
            for (i, s) in terms {
                acc += col[*i] * s;
            }
            return (acc, terms.len() as u64);
        }
        let diag: Scalar = terms.iter().filter(|t| t.0 == x).map(|t| t.1).sum();
        let mut coef: Vec<(usize, Scalar)> = if diag.is_zero() {
            terms.iter().filter(|t| t.0 != x).copied().collect()
        } else {
            let mut dense = vec![-diag; self.n];
            for (i, s) in terms.iter().filter(|t| t.0 != x) {
                dense[*i] += s;
            }
            dense.into_iter().enumerate().filter(|(i, c)| *i != x && !c.is_zero()).collect()
        };
        let mut inv: Vec<Scalar> = coef.iter().map(|(i, _)| Scalar::from(*i as u64) - Scalar::from(x as u64)).collect();
        batch_inversion(&mut inv);
        let mut tail = Scalar::zero();
        for ((i, c), d) in coef.iter_mut().zip(&inv) {
            *c *= d;
            tail += *c * self.weights[x] * self.weights_inv[*i];
        }
        let bases: Vec<G1Affine> = coef.iter().map(|(i, _)| self.commitments[*i]).collect();
        let scalars: Vec<Scalar> = coef.iter().map(|(_, c)| *c).collect();
        let acc = msm(&bases, &scalars) - self.commitments[x] * tail;
        (acc, scalars.len() as u64 + 1)
    }

    /// Checks every cell against the pairing equation. Quadratic.
    pub fn check(&self, srs: &Srs) -> bool {
        (0..self.n).into_par_iter().all(|j| {
            (0..self.n).all(|i| {
                let v = if i == j { Scalar::one() } else { Scalar::zero() };
                verify_kzg(srs, &self.commitments[i].into_group(), &Scalar::from(j as u64), &v, &self.proof(i, j))
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KzgState {
    pub messages: Vec<Scalar>,
}

pub struct KzgVc {
    srs: Srs,
    table: LagrangeTable,
}

impl KzgVc {
    pub fn new(n: usize, seed: &[u8]) -> Result<Self> {
        let (srs, table) = keygen(n, seed)?;
        Ok(Self { srs, table })
    }

    pub fn from_parts(srs: Srs, table: LagrangeTable) -> Self {
        Self { srs, table }
    }

    pub fn srs(&self) -> &Srs {
        &self.srs
    }

    pub fn table(&self) -> &LagrangeTable {
        &self.table
    }

    /// `C * prod [L_i]^(m_i' - m_i)`: one exponentiation per update.
    pub fn update_commitment(&self, c: &G1Projective, batch: &UpdateBatch<Scalar>) -> Result<(G1Projective, OpCounter)> {
        batch.check_bounds(self.table.n)?;
        let mut out = *c;
        let mut ops = OpCounter::default();
        for u in batch {
            out += self.table.commitments[u.index] * (u.new - u.old);
            ops.exps += 1;
        }
        Ok((out, ops))
    }
}

impl DynamicVc for KzgVc {
    type Message = Scalar;
    type Commitment = G1Projective;
    type Proof = G1Projective;
    type State = KzgState;
    type Node = Infallible;

    const BACKEND: BackendId = BackendId::Kzg;

    fn vector_len(&self) -> usize {
        self.table.n
    }

    fn commit(&self, messages: &[Scalar]) -> Result<(G1Projective, KzgState)> {
        if messages.len() != self.table.n {
            return Err(VcError::UnsupportedLength(messages.len()));
        }
        let c = msm(&self.table.commitments, messages);
        Ok((c, KzgState { messages: messages.to_vec() }))
    }

    fn open(&self, state: &KzgState, index: usize) -> Result<G1Projective> {
        if index >= self.table.n {
            return Err(VcError::IndexOutOfRange { index, len: self.table.n });
        }
        if let Some(p) = &self.table.proofs {
            return Ok(msm(&p[index * self.table.n..(index + 1) * self.table.n], &state.messages));
        }
        let terms: Vec<(usize, Scalar)> =
            state.messages.iter().enumerate().filter(|(_, m)| !m.is_zero()).map(|(i, m)| (i, *m)).collect();
        Ok(self.table.combine_proofs(index, &terms).0)
    }

    fn verify(&self, c: &G1Projective, m: &Scalar, index: usize, proof: &G1Projective) -> bool {
        index < self.table.n && verify_kzg(&self.srs, c, &Scalar::from(index as u64), m, proof)
    }

    fn update(&self, c: &G1Projective, state: &KzgState, batch: &UpdateBatch<Scalar>) -> Result<UpdateOutcome<Self>> {
        batch.check_against(&state.messages)?;
        let (commitment, ops) = self.update_commitment(c, batch)?;
        let mut next = state.clone();
        for u in batch {
            next.messages[u.index] = u.new;
        }
        Ok(UpdateOutcome { commitment, info: UpdateInfo::empty(0), state: next, ops })
    }

    /// `pi_x * prod pi_{i,x}^(m_i' - m_i)`.
    fn proof_update(
        &self,
        proof: &G1Projective,
        index: usize,
        batch: &UpdateBatch<Scalar>,
        _: &UpdateInfo<Infallible>,
    ) -> Result<(G1Projective, OpCounter)> {
        if index >= self.table.n {
            return Err(VcError::IndexOutOfRange { index, len: self.table.n });
        }
        batch.check_bounds(self.table.n)?;
        let terms: Vec<(usize, Scalar)> = batch.iter().map(|u| (u.index, u.new - u.old)).collect();
        let (delta, exps) = self.table.combine_proofs(index, &terms);
        Ok((*proof + delta, OpCounter { exps, ..Default::default() }))
    }
}
