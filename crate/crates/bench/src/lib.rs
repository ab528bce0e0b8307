//! Shared fixtures for the benchmarks: a committed vector, one batch and
//! the matching update information per backend.

use ark_ff::UniformRand;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use svc_core::amt::{self, AmtProof, AmtTree, LagrangeAmtParams};
use svc_core::lattice::{self, HmtProof, LatticeParams, LatticeTree, NodeVector};
use svc_core::merkle::{Hash32, MerkleProof, MerkleTree};
use svc_core::verkle::{ProofContext, VerkleNode, VerkleParams, VerkleTree};
use svc_core::{G1Projective, Nu, Scalar, Update, UpdateBatch, UpdateInfo};

pub const SEED: u64 = 0x5eed;

pub fn rng() -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(SEED)
}

pub fn scalars(rng: &mut ChaCha20Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| Scalar::rand(rng)).collect()
}

fn scalar_batch(rng: &mut ChaCha20Rng, old: &[Scalar], k: usize) -> UpdateBatch<Scalar> {
    let us = sample(rng, old.len(), k).into_iter().map(|i| Update::new(i, old[i], Scalar::rand(rng))).collect();
    UpdateBatch::new(us).expect("distinct indices")
}

pub struct AmtFixture {
    pub params: LagrangeAmtParams,
    pub batch: UpdateBatch<Scalar>,
    pub info: UpdateInfo<G1Projective>,
    pub proof: AmtProof,
}

/// Zero vector of length `n`; parameters cover only the updated bases and
/// one user, which keeps large `n` cheap to set up.
pub fn amt(n: usize, k: usize, nu: Nu) -> AmtFixture {
    let mut r = rng();
    let updated = sample(&mut r, n, k).into_vec();
    let user = r.gen_range(0..n);
    let params = LagrangeAmtParams::generate_subset(n, &SEED.to_le_bytes(), &updated, &[user]).expect("params");
    let tree = AmtTree::zero(n).expect("power of two");
    let batch = UpdateBatch::new(updated.iter().map(|&i| Update::new(i, Scalar::from(0u64), Scalar::rand(&mut r))).collect())
        .expect("distinct");
    let (_, info, _) = amt::update(&params, &tree, &batch, nu).expect("update");
    AmtFixture { params, batch, info, proof: tree.open(user).expect("in range") }
}

pub struct LatticeFixture {
    pub params: LatticeParams,
    pub tree: LatticeTree,
    pub batch: UpdateBatch<u64>,
    pub info: UpdateInfo<NodeVector>,
    pub proof: HmtProof,
}

pub fn lattice(n: usize, k: usize, nu: Nu) -> LatticeFixture {
    let mut r = rng();
    let params = LatticeParams::toy(&SEED.to_le_bytes());
    let m: Vec<u64> = (0..n).map(|_| r.gen()).collect();
    let tree = LatticeTree::build(&params, &m).expect("tree");
    let batch = UpdateBatch::new(sample(&mut r, n, k).into_iter().map(|i| Update::new(i, m[i], r.gen())).collect()).expect("distinct");
    let (_, info, _) = lattice::update(&params, &tree, &batch, nu).expect("update");
    let proof = tree.open(r.gen_range(0..n)).expect("in range");
    LatticeFixture { params, tree, batch, info, proof }
}

pub struct MerkleFixture {
    pub info: UpdateInfo<Hash32>,
    pub proof: MerkleProof,
}

pub fn merkle(n: usize, k: usize) -> MerkleFixture {
    let mut r = rng();
    let m: Vec<Vec<u8>> = (0..n).map(|i| (i as u64).to_le_bytes().to_vec()).collect();
    let tree = MerkleTree::build(&m).expect("tree");
    let batch = UpdateBatch::new(sample(&mut r, n, k).into_iter().map(|i| Update::new(i, m[i].clone(), vec![r.gen()])).collect())
        .expect("distinct");
    let (_, info, _) = tree.update(&batch).expect("update");
    MerkleFixture { info, proof: tree.open(r.gen_range(0..n)).expect("in range") }
}

pub struct VerkleFixture {
    pub params: VerkleParams,
    pub info: UpdateInfo<VerkleNode>,
    pub context: ProofContext,
}

pub fn verkle(c: usize, n: usize, k: usize) -> VerkleFixture {
    let mut r = rng();
    let params = VerkleParams::new(c, &SEED.to_le_bytes()).expect("degree");
    let m = scalars(&mut r, n);
    let tree = VerkleTree::build(&params, &m).expect("tree");
    let batch = scalar_batch(&mut r, &m, k);
    let (_, info, _) = tree.update(&params, &batch).expect("update");
    let (_, context) = tree.open(&params, r.gen_range(0..n)).expect("in range");
    VerkleFixture { params, info, context }
}
