//! SHA-256 Merkle tree. Leaves are `H(m)`, inner nodes `H(left || right)`.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

use crate::batch::UpdateBatch;
use crate::error::{FormatError, Result, VcError};
use crate::path::{exact_log2, NodePath};
use crate::updinfo::{BackendId, NodeValue, UpdateInfo};
use crate::vc::{DynamicVc, OpCounter, UpdateOutcome};

pub type Hash32 = [u8; 32];

pub fn hash_leaf(m: &[u8]) -> Hash32 {
    Sha256::digest(m).into()
}

pub fn hash_node(left: &Hash32, right: &Hash32) -> Hash32 {
    let mut h = Sha256::new();
    h.update(left);
    h.update(right);
    h.finalize().into()
}

impl NodeValue for Hash32 {
    const BACKEND: BackendId = BackendId::Merkle;
    fn encode_value(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(self);
    }
    fn decode_value(bytes: &[u8]) -> Result<Self, FormatError> {
        bytes.try_into().map_err(|_| FormatError::InvalidValue("merkle node must be 32 bytes".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleTree {
    height: u8,
    /// `levels[d][j]` is the value of the node at depth `d`, index `j`.
    levels: Vec<Vec<Hash32>>,
    messages: Vec<Vec<u8>>,
}

/// Sibling hashes from depth 1 down to the leaf level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleProof {
    pub index: usize,
    pub siblings: Vec<Hash32>,
}

impl MerkleTree {
    pub fn build(messages: &[Vec<u8>]) -> Result<Self> {
        let h = exact_log2(messages.len()).ok_or(VcError::UnsupportedLength(messages.len()))?;
        let mut levels = vec![Vec::new(); h as usize + 1];
        levels[h as usize] = messages.iter().map(|m| hash_leaf(m)).collect();
        for d in (0..h as usize).rev() {
            levels[d] = levels[d + 1].chunks(2).map(|c| hash_node(&c[0], &c[1])).collect();
        }
        Ok(Self { height: h, levels, messages: messages.to_vec() })
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn root(&self) -> Hash32 {
        self.levels[0][0]
    }

    pub fn node(&self, path: &NodePath) -> Hash32 {
        self.levels[path.depth() as usize][path.bits() as usize]
    }

    pub fn messages(&self) -> &[Vec<u8>] {
        &self.messages
    }

    pub fn open(&self, index: usize) -> Result<MerkleProof> {
        if index >= self.len() {
            return Err(VcError::IndexOutOfRange { index, len: self.len() });
        }
        let leaf = NodePath::leaf(index as u64, self.height);
        let siblings = (1..=self.height).map(|d| self.node(&leaf.ancestor(d).sibling().unwrap())).collect();
        Ok(MerkleProof { index, siblings })
    }

    /// Applies the batch and publishes every node whose hash changed.
    pub fn update(&self, batch: &UpdateBatch<Vec<u8>>) -> Result<(Self, UpdateInfo<Hash32>, OpCounter)> {
        batch.check_against(&self.messages)?;
        let mut next = self.clone();
        let mut ops = OpCounter::default();
        let mut dirty = BTreeSet::new();
        let h = self.height;
        for u in batch {
            next.messages[u.index] = u.new.clone();
            next.levels[h as usize][u.index] = hash_leaf(&u.new);
            ops.hashes += 1;
            dirty.insert(u.index as u64);
        }
        for d in (0..h as usize).rev() {
            let parents: BTreeSet<u64> = dirty.iter().map(|j| j >> 1).collect();
            for &j in &parents {
                let j = j as usize;
                next.levels[d][j] = hash_node(&next.levels[d + 1][2 * j], &next.levels[d + 1][2 * j + 1]);
                ops.hashes += 1;
            }
            dirty = parents;
        }
        let mut entries = Vec::new();
        for (d, (old, new)) in self.levels.iter().zip(&next.levels).enumerate() {
            for (j, (a, b)) in old.iter().zip(new).enumerate() {
                if a != b {
                    entries.push((NodePath::new(d as u8, j as u64)?, *b));
                }
            }
        }
        let info = UpdateInfo::from_entries(h, entries)?;
        Ok((next, info, ops))
    }
}

pub fn verify(root: &Hash32, message: &[u8], index: usize, proof: &MerkleProof) -> bool {
    let h = proof.siblings.len();
    if proof.index != index || h > 63 || (index as u64) >> h != 0 {
        return false;
    }
    let mut acc = hash_leaf(message);
    for (level, sib) in proof.siblings.iter().rev().enumerate() {
        acc = if (index >> level) & 1 == 0 { hash_node(&acc, sib) } else { hash_node(sib, &acc) };
    }
    acc == *root
}

/// Replaces each sibling with its published value, if any. One lookup per
/// level.
pub fn proof_update(proof: &MerkleProof, info: &UpdateInfo<Hash32>) -> Result<(MerkleProof, OpCounter)> {
    let h = proof.siblings.len() as u8;
    if info.height() != h {
        return Err(VcError::InvalidParameter(format!("update info height {} != proof height {h}", info.height())));
    }
    let leaf = NodePath::leaf(proof.index as u64, h);
    let mut out = proof.clone();
    let mut ops = OpCounter::default();
    for d in 1..=h {
        ops.lookups += 1;
        if let Some(v) = info.get(&leaf.ancestor(d).sibling().unwrap()) {
            out.siblings[d as usize - 1] = *v;
        }
    }
    Ok((out, ops))
}

pub struct MerkleVc {
    n: usize,
}

impl MerkleVc {
    pub fn new(n: usize) -> Result<Self> {
        exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
        Ok(Self { n })
    }
}

impl DynamicVc for MerkleVc {
    type Message = Vec<u8>;
    type Commitment = Hash32;
    type Proof = MerkleProof;
    type State = MerkleTree;
    type Node = Hash32;

    const BACKEND: BackendId = BackendId::Merkle;

    fn vector_len(&self) -> usize {
        self.n
    }

    fn commit(&self, messages: &[Vec<u8>]) -> Result<(Hash32, MerkleTree)> {
        if messages.len() != self.n {
            return Err(VcError::UnsupportedLength(messages.len()));
        }
        let t = MerkleTree::build(messages)?;
        Ok((t.root(), t))
    }

    fn open(&self, state: &MerkleTree, index: usize) -> Result<MerkleProof> {
        state.open(index)
    }

    fn verify(&self, c: &Hash32, m: &Vec<u8>, index: usize, proof: &MerkleProof) -> bool {
        index < self.n && proof.siblings.len() as u32 == self.n.trailing_zeros() && verify(c, m, index, proof)
    }

    fn update(&self, _: &Hash32, state: &MerkleTree, batch: &UpdateBatch<Vec<u8>>) -> Result<UpdateOutcome<Self>> {
        let (state, info, ops) = state.update(batch)?;
        Ok(UpdateOutcome { commitment: state.root(), info, state, ops })
    }

    fn proof_update(
        &self,
        proof: &MerkleProof,
        index: usize,
        _: &UpdateBatch<Vec<u8>>,
        info: &UpdateInfo<Hash32>,
    ) -> Result<(MerkleProof, OpCounter)> {
        if proof.index != index {
            return Err(VcError::ProofMismatch(index));
        }
        proof_update(proof, info)
    }
}
