//! Verkle trees: `c`-ary trees whose inner nodes are KZG vector commitments
//! to the hashes of their children, with a single aggregated opening for a
//! whole root-to-leaf path.
//!
//! Node paths are stored as bit paths: a node at level `j` with index `a`
//! is `NodePath(j * log2 c, a)`. `U` lists every changed commitment plus the
//! new messages at the leaf level.

use ark_ec::{pairing::Pairing, CurveGroup};
use ark_ff::{Field, One, PrimeField, Zero};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::batch::UpdateBatch;
use crate::error::{FormatError, Result, VcError};
use crate::kzg::{keygen as kzg_keygen, LagrangeTable};
use crate::pairing::{
    g1_from_bytes, g1_to_bytes, hash_to_scalar, msm, scalar_from_bytes, scalar_to_bytes, Bls12_381, G1Projective,
    G2Projective, Scalar, Srs, G1_BYTES, SCALAR_BYTES,
};
use crate::path::NodePath;
use crate::updinfo::{BackendId, NodeValue, UpdateInfo};
use crate::vc::{DynamicVc, OpCounter, UpdateOutcome};

/// `H(C)`: SHA-256 of the compressed point, reduced mod the group order.
pub fn hash_commitment(c: &G1Projective) -> Scalar {
    Scalar::from_le_bytes_mod_order(&Sha256::digest(g1_to_bytes(c)))
}

/// `H(m)` over the 32-byte scalar encoding.
pub fn hash_message(m: &Scalar) -> Scalar {
    Scalar::from_le_bytes_mod_order(&Sha256::digest(scalar_to_bytes(m)))
}

/// A published value: an inner commitment, or a message at the leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerkleNode {
    Commitment(G1Projective),
    Leaf(Scalar),
}

impl VerkleNode {
    pub fn hash(&self) -> Scalar {
        match self {
            Self::Commitment(c) => hash_commitment(c),
            Self::Leaf(m) => hash_message(m),
        }
    }
}

impl NodeValue for VerkleNode {
    const BACKEND: BackendId = BackendId::Verkle;
    fn encode_value(&self, out: &mut Vec<u8>) {
        match self {
            Self::Commitment(c) => out.extend_from_slice(&g1_to_bytes(c)),
            Self::Leaf(m) => out.extend_from_slice(&scalar_to_bytes(m)),
        }
    }
    fn decode_value(bytes: &[u8]) -> Result<Self, FormatError> {
        match bytes.len() {
            G1_BYTES => Ok(Self::Commitment(g1_from_bytes(bytes)?)),
            SCALAR_BYTES => Ok(Self::Leaf(scalar_from_bytes(bytes)?)),
            n => Err(FormatError::InvalidValue(format!("verkle node of {n} bytes"))),
        }
    }
}

/// KZG setup and Lagrange table over the child domain `{0, .., c-1}`.
pub struct VerkleParams {
    c: usize,
    log_c: u8,
    srs: Srs,
    table: LagrangeTable,
}

impl VerkleParams {
    pub fn new(c: usize, seed: &[u8]) -> Result<Self> {
        if !(2..=256).contains(&c) || !c.is_power_of_two() {
            return Err(VcError::InvalidParameter(format!("degree c = {c} must be a power of two in [2, 256]")));
        }
        let (srs, table) = kzg_keygen(c, seed)?;
        Ok(Self { c, log_c: c.trailing_zeros() as u8, srs, table })
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn srs(&self) -> &Srs {
        &self.srs
    }

    pub fn table(&self) -> &LagrangeTable {
        &self.table
    }

    /// Height `h` with `c^h = n`, if any.
    pub fn height_for(&self, n: usize) -> Result<u8> {
        if n < self.c || !n.is_power_of_two() || n.trailing_zeros() % self.log_c as u32 != 0 {
            return Err(VcError::UnsupportedLength(n));
        }
        let h = (n.trailing_zeros() / self.log_c as u32) as u8;
        if h as u32 * self.log_c as u32 > crate::path::MAX_HEIGHT as u32 {
            return Err(VcError::UnsupportedLength(n));
        }
        Ok(h)
    }

    fn path(&self, level: u8, index: usize) -> NodePath {
        NodePath::new(level * self.log_c, index as u64).expect("index fits level")
    }

    /// Digit `b_{j+1}` of `x`, most significant first.
    fn digit(&self, x: usize, h: u8, j: u8) -> usize {
        (x >> (self.log_c as u32 * (h - 1 - j) as u32)) & (self.c - 1)
    }

    fn commit_children(&self, hashes: &[Scalar]) -> G1Projective {
        msm(self.table.commitments(), hashes)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerkleTree {
    height: u8,
    /// `levels[j][a]`: commitment of node `a` at level `j < h`.
    levels: Vec<Vec<G1Projective>>,
    messages: Vec<Scalar>,
}

impl VerkleTree {
    pub fn build(params: &VerkleParams, messages: &[Scalar]) -> Result<Self> {
        let h = params.height_for(messages.len())?;
        let mut levels = vec![Vec::new(); h as usize];
        let mut hashes: Vec<Scalar> = messages.par_iter().map(hash_message).collect();
        for j in (0..h as usize).rev() {
            levels[j] = hashes.par_chunks(params.c).map(|ch| params.commit_children(ch)).collect();
            hashes = levels[j].par_iter().map(hash_commitment).collect();
        }
        Ok(Self { height: h, levels, messages: messages.to_vec() })
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    /// The root commitment `C_{b_0}`.
    pub fn root(&self) -> G1Projective {
        self.levels[0][0]
    }

    /// `u_{b_0} = H(C_{b_0})`.
    pub fn root_hash(&self) -> Scalar {
        hash_commitment(&self.root())
    }

    pub fn commitment(&self, level: u8, index: usize) -> G1Projective {
        self.levels[level as usize][index]
    }

    pub fn messages(&self) -> &[Scalar] {
        &self.messages
    }

    fn child_node(&self, level: u8, index: usize) -> VerkleNode {
        if level == self.height {
            VerkleNode::Leaf(self.messages[index])
        } else {
            VerkleNode::Commitment(self.levels[level as usize][index])
        }
    }

    pub fn open(&self, params: &VerkleParams, x: usize) -> Result<(VerkleProof, ProofContext)> {
        if x >= self.messages.len() {
            return Err(VcError::IndexOutOfRange { index: x, len: self.messages.len() });
        }
        let h = self.height;
        let c = params.c;
        let mut openings = Vec::with_capacity(h as usize);
        let mut children = Vec::with_capacity(h as usize);
        for j in 0..h {
            let a = x >> (params.log_c as u32 * (h - j) as u32);
            let kids: Vec<VerkleNode> = (0..c).map(|i| self.child_node(j + 1, a * c + i)).collect();
            let hashes: Vec<(usize, Scalar)> = kids.iter().map(|k| k.hash()).enumerate().collect();
            let b = params.digit(x, h, j);
            openings.push(params.table.combine_proofs(b, &hashes).0);
            children.push(kids);
        }
        let ctx = ProofContext { index: x, root: self.root(), openings, children };
        let proof = ctx.aggregate(params)?;
        Ok((proof, ctx))
    }

    /// Applies the batch bottom-up: each changed child contributes
    /// `[L_digit]^(H(new) - H(old))` to its parent.
    pub fn update(&self, params: &VerkleParams, batch: &UpdateBatch<Scalar>) -> Result<(Self, UpdateInfo<VerkleNode>, OpCounter)> {
        batch.check_against(&self.messages)?;
        let h = self.height;
        let c = params.c;
        let mut next = self.clone();
        let mut ops = OpCounter::default();
        let mut entries = Vec::new();
        // (index, hash delta) of changed nodes at the current level.
        let mut changed: Vec<(usize, Scalar)> = Vec::new();
        for u in batch {
            if u.new != u.old {
                next.messages[u.index] = u.new;
                entries.push((params.path(h, u.index), VerkleNode::Leaf(u.new)));
                changed.push((u.index, hash_message(&u.new) - hash_message(&u.old)));
                ops.hashes += 2;
            }
        }
        for j in (0..h).rev() {
            let mut parents: Vec<usize> = changed.iter().map(|(i, _)| i / c).collect();
            parents.dedup();
            for (i, d) in &changed {
                next.levels[j as usize][i / c] += params.table.commitment(i % c) * d;
                ops.exps += 1;
            }
            changed = parents
                .into_iter()
                .map(|p| {
                    ops.hashes += 2;
                    let d = hash_commitment(&next.levels[j as usize][p]) - hash_commitment(&self.levels[j as usize][p]);
                    entries.push((params.path(j, p), VerkleNode::Commitment(next.levels[j as usize][p])));
                    (p, d)
                })
                .collect();
        }
        let info = UpdateInfo::from_entries(h * params.log_c, entries)?;
        Ok((next, info, ops))
    }
}

/// `(C_{b_0,b_1}, .., C_{b_0..b_{h-1}})`, `D` and `pi'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerkleProof {
    pub path: Vec<G1Projective>,
    pub d: G1Projective,
    pub pi: G1Projective,
}

impl VerkleProof {
    pub fn height(&self) -> u8 {
        self.path.len() as u8 + 1
    }

    /// `u8 h | (h-1) x G1 | D | pi'`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + (self.path.len() + 2) * G1_BYTES);
        out.push(self.height());
        for c in self.path.iter().chain([&self.d, &self.pi]) {
            out.extend_from_slice(&g1_to_bytes(c));
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let h = *bytes.first().ok_or(FormatError::Truncated { offset: 0, needed: 1 })? as usize;
        if h == 0 {
            return Err(FormatError::InvalidValue("height must be positive".into()));
        }
        let want = 1 + (h + 1) * G1_BYTES;
        if bytes.len() != want {
            return Err(if bytes.len() < want {
                FormatError::Truncated { offset: bytes.len(), needed: want - bytes.len() }
            } else {
                FormatError::TrailingBytes(bytes.len() - want)
            });
        }
        let pts = bytes[1..].chunks(G1_BYTES).map(g1_from_bytes).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { path: pts[..h - 1].to_vec(), d: pts[h - 1], pi: pts[h] })
    }
}

/// What a user keeps next to their proof: the per-level openings and every
/// child of every node on their path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofContext {
    pub index: usize,
    pub root: G1Projective,
    /// `pi^{f_j}_{b_{j+1}}` for each level `j`.
    pub openings: Vec<G1Projective>,
    /// `children[j][i]`: child `i` of the level-`j` path node.
    pub children: Vec<Vec<VerkleNode>>,
}

/// `r = H(C_{b_0}, .., C_{b_0..b_{h-1}}, u_{b_0,b_1}, .., u_leaf, b_1, .., b_h)`
fn challenge_r(params: &VerkleParams, commitments: &[G1Projective], values: &[Scalar], x: usize) -> Scalar {
    let h = commitments.len() as u8;
    let mut parts: Vec<Vec<u8>> = Vec::with_capacity(3 * h as usize);
    parts.extend(commitments.iter().map(|c| g1_to_bytes(c).to_vec()));
    parts.extend(values.iter().map(|u| scalar_to_bytes(u).to_vec()));
    parts.extend((0..h).map(|j| (params.digit(x, h, j) as u32).to_le_bytes().to_vec()));
    let refs: Vec<&[u8]> = parts.iter().map(|p| p.as_slice()).collect();
    hash_to_scalar(b"svc/verkle/r", &refs)
}

/// `t = H(r, D)`
fn challenge_t(r: &Scalar, d: &G1Projective) -> Scalar {
    hash_to_scalar(b"svc/verkle/t", &[&scalar_to_bytes(r), &g1_to_bytes(d)])
}

/// `r^j / (t - b_{j+1})` per level.
fn weights(params: &VerkleParams, x: usize, h: u8, r: &Scalar, t: &Scalar) -> Option<Vec<Scalar>> {
    let mut out = Vec::with_capacity(h as usize);
    let mut rj = Scalar::one();
    for j in 0..h {
        let inv = (*t - Scalar::from(params.digit(x, h, j) as u64)).inverse()?;
        out.push(rj * inv);
        rj *= r;
    }
    Some(out)
}

impl ProofContext {
    fn height(&self) -> u8 {
        self.openings.len() as u8
    }

    /// `C_{b_0}, .., C_{b_0..b_{h-1}}` and `u_{b_0,b_1}, .., u_leaf`.
    fn path_values(&self, params: &VerkleParams) -> (Vec<G1Projective>, Vec<Scalar>) {
        let h = self.height();
        let mut cs = vec![self.root];
        let mut us = Vec::with_capacity(h as usize);
        for j in 0..h {
            let node = &self.children[j as usize][params.digit(self.index, h, j)];
            if let VerkleNode::Commitment(c) = node {
                cs.push(*c);
            }
            us.push(node.hash());
        }
        (cs, us)
    }

    /// Folds the per-level openings into `D` and `pi'`.
    fn aggregate(&self, params: &VerkleParams) -> Result<VerkleProof> {
        let h = self.height();
        let (cs, us) = self.path_values(params);
        let r = challenge_r(params, &cs, &us, self.index);
        let mut rj = Scalar::one();
        let mut d = G1Projective::zero();
        for p in &self.openings {
            d += *p * rj;
            rj *= r;
        }
        let t = challenge_t(&r, &d);
        let w = weights(params, self.index, h, &r, &t)
            .ok_or_else(|| VcError::InvalidParameter("challenge collides with a child index".into()))?;
        let pi = self.openings.iter().zip(&w).map(|(p, s)| *p * s).sum();
        Ok(VerkleProof { path: cs[1..].to_vec(), d, pi })
    }
}

pub fn verify(params: &VerkleParams, root: &G1Projective, m: &Scalar, x: usize, proof: &VerkleProof) -> bool {
    let h = proof.height();
    if (x as u128) >> (params.log_c as u32 * h as u32) != 0 {
        return false;
    }
    let mut cs = vec![*root];
    cs.extend_from_slice(&proof.path);
    let mut us: Vec<Scalar> = proof.path.iter().map(hash_commitment).collect();
    us.push(hash_message(m));
    let r = challenge_r(params, &cs, &us, x);
    let t = challenge_t(&r, &proof.d);
    let Some(w) = weights(params, x, h, &r, &t) else { return false };
    // y = sum r^j u_{j+1} / (t - b_{j+1}),  E = sum r^j C_j / (t - b_{j+1})
    let y: Scalar = w.iter().zip(&us).map(|(a, b)| *a * b).sum();
    let e = msm(&G1Projective::normalize_batch(&cs), &w);
    let srs = &params.srs;
    let g2 = G2Projective::from(srs.g2());
    let lhs = e - proof.d - G1Projective::from(srs.g1()) * y;
    Bls12_381::multi_pairing([lhs, -proof.pi], [g2, G2Projective::from(srs.g2_tau()) - g2 * t]).is_zero()
}

/// Refreshes the context from `U`, then recomputes the aggregate. Each
/// changed child of a path node costs one exponentiation, and the two
/// aggregates cost `h` each.
pub fn proof_update(
    params: &VerkleParams,
    ctx: &ProofContext,
    info: &UpdateInfo<VerkleNode>,
) -> Result<(VerkleProof, ProofContext, OpCounter)> {
    let h = ctx.height();
    if info.height() != h * params.log_c {
        return Err(VcError::InvalidParameter("update info height does not match the proof".into()));
    }
    let c = params.c;
    let mut next = ctx.clone();
    let mut ops = OpCounter::default();
    ops.lookups += 1;
    match info.get(&NodePath::ROOT) {
        Some(VerkleNode::Commitment(r)) => next.root = *r,
        Some(VerkleNode::Leaf(_)) => return Err(VcError::InvalidParameter("leaf value at the root".into())),
        None => {}
    }
    for j in 0..h {
        let a = ctx.index >> (params.log_c as u32 * (h - j) as u32);
        let b = params.digit(ctx.index, h, j);
        let mut terms = Vec::new();
        for i in 0..c {
            ops.lookups += 1;
            if let Some(v) = info.get(&params.path(j + 1, a * c + i)) {
                let old = &ctx.children[j as usize][i];
                if std::mem::discriminant(v) != std::mem::discriminant(old) {
                    return Err(VcError::InvalidParameter("published node has the wrong kind".into()));
                }
                terms.push((i, v.hash() - old.hash()));
                ops.hashes += 2;
                next.children[j as usize][i] = v.clone();
            }
        }
        if !terms.is_empty() {
            let (delta, exps) = params.table.combine_proofs(b, &terms);
            next.openings[j as usize] += delta;
            ops.exps += exps;
        }
    }
    let proof = next.aggregate(params)?;
    ops.exps += 2 * h as u64;
    Ok((proof, next, ops))
}

/// A proof together with the context needed to refresh it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerkleOpening {
    pub proof: VerkleProof,
    pub context: ProofContext,
}

pub struct VerkleVc {
    params: VerkleParams,
    n: usize,
}

impl VerkleVc {
    pub fn new(n: usize, c: usize, seed: &[u8]) -> Result<Self> {
        let params = VerkleParams::new(c, seed)?;
        params.height_for(n)?;
        Ok(Self { params, n })
    }

    pub fn params(&self) -> &VerkleParams {
        &self.params
    }
}

impl DynamicVc for VerkleVc {
    type Message = Scalar;
    type Commitment = G1Projective;
    type Proof = VerkleOpening;
    type State = VerkleTree;
    type Node = VerkleNode;

    const BACKEND: BackendId = BackendId::Verkle;

    fn vector_len(&self) -> usize {
        self.n
    }

    fn commit(&self, messages: &[Scalar]) -> Result<(G1Projective, VerkleTree)> {
        if messages.len() != self.n {
            return Err(VcError::UnsupportedLength(messages.len()));
        }
        let t = VerkleTree::build(&self.params, messages)?;
        Ok((t.root(), t))
    }

    fn open(&self, state: &VerkleTree, index: usize) -> Result<VerkleOpening> {
        let (proof, context) = state.open(&self.params, index)?;
        Ok(VerkleOpening { proof, context })
    }

    fn verify(&self, c: &G1Projective, m: &Scalar, index: usize, p: &VerkleOpening) -> bool {
        index < self.n && verify(&self.params, c, m, index, &p.proof)
    }

    fn update(&self, _: &G1Projective, state: &VerkleTree, batch: &UpdateBatch<Scalar>) -> Result<UpdateOutcome<Self>> {
        let (state, info, ops) = state.update(&self.params, batch)?;
        Ok(UpdateOutcome { commitment: state.root(), info, state, ops })
    }

    fn proof_update(
        &self,
        p: &VerkleOpening,
        index: usize,
        _: &UpdateBatch<Scalar>,
        info: &UpdateInfo<VerkleNode>,
    ) -> Result<(VerkleOpening, OpCounter)> {
        if p.context.index != index {
            return Err(VcError::ProofMismatch(index));
        }
        let (proof, context, ops) = proof_update(&self.params, &p.context, info)?;
        Ok((VerkleOpening { proof, context }, ops))
    }
}
