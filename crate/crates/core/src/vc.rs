//! The interface shared by every backend.

use std::fmt::Debug;
use std::ops::AddAssign;

use crate::batch::UpdateBatch;
use crate::error::Result;
use crate::updinfo::{BackendId, NodeValue, UpdateInfo};

/// Operation tallies. Every backend bumps the fields that apply to it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    /// Group scalar multiplications.
    pub exps: u64,
    /// Hash evaluations: SHA-256 calls, or compositions of the lattice
    /// hash when walking one level up.
    pub hashes: u64,
    /// Partial digests applied to a node.
    pub digests: u64,
    /// Lookups into published update information.
    pub lookups: u64,
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, o: Self) {
        self.exps += o.exps;
        self.hashes += o.hashes;
        self.digests += o.digests;
        self.lookups += o.lookups;
    }
}

pub struct UpdateOutcome<V: DynamicVc + ?Sized> {
    pub commitment: V::Commitment,
    pub info: UpdateInfo<V::Node>,
    pub state: V::State,
    pub ops: OpCounter,
}

/// A vector commitment whose owner publishes update information after each
/// batch, from which users refresh their own proofs.
pub trait DynamicVc: Sync {
    type Message: Clone + PartialEq + Debug + Send + Sync;
    type Commitment: Clone + PartialEq + Debug + Send + Sync;
    /// Whatever a user holds to prove membership of their entry.
    type Proof: Clone + PartialEq + Debug + Send + Sync;
    /// Owner-side auxiliary data.
    type State: Clone + Send + Sync;
    type Node: NodeValue + Clone + Debug + Send + Sync;

    const BACKEND: BackendId;

    /// Number of committed positions.
    fn vector_len(&self) -> usize;

    fn commit(&self, messages: &[Self::Message]) -> Result<(Self::Commitment, Self::State)>;

    fn open(&self, state: &Self::State, index: usize) -> Result<Self::Proof>;

    fn verify(&self, commitment: &Self::Commitment, message: &Self::Message, index: usize, proof: &Self::Proof) -> bool;

    fn update(
        &self,
        commitment: &Self::Commitment,
        state: &Self::State,
        batch: &UpdateBatch<Self::Message>,
    ) -> Result<UpdateOutcome<Self>>;

    fn proof_update(
        &self,
        proof: &Self::Proof,
        index: usize,
        batch: &UpdateBatch<Self::Message>,
        info: &UpdateInfo<Self::Node>,
    ) -> Result<(Self::Proof, OpCounter)>;
}
