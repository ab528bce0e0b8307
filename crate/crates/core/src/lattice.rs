//! Homomorphic Merkle tree from an SIS-style hash. Leaves hash as
//! `f(m) = M enc(m)`, inner nodes as `f~(x, y) = L x + R y` with
//! `[L | R] = M`. Nodes are stored as digit vectors whose radix-2 value is
//! the hash, which makes every node a plain sum of per-leaf contributions.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::batch::{Update, UpdateBatch};
use crate::codec::Reader;
use crate::error::{FormatError, Result, VcError};
use crate::path::{exact_log2, NodePath};
use crate::sublinear::{self, Nu, PartialDigestScheme, UpdateCounters};
use crate::updinfo::{BackendId, NodeValue, UpdateInfo};
use crate::vc::{DynamicVc, OpCounter, UpdateOutcome};

const PARAMS_MAGIC: &str = "SVCLAT01";

pub const LOCALITY: u8 = 0;

/// Toy dimensions: far from secure, small enough for exhaustive tests.
pub const TOY_K: u16 = 8;
pub const TOY_Q: u32 = 12289;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeParams {
    k: usize,
    q: u32,
    log_q: usize,
    /// `k x 2d`, row-major.
    m: Vec<u32>,
}

/// Digits of a node. Entry `e` is bounded by the number of leaves below.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeVector(pub Vec<u32>);

impl NodeValue for NodeVector {
    const BACKEND: BackendId = BackendId::Lattice;
    fn encode_value(&self, out: &mut Vec<u8>) {
        for v in &self.0 {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    fn decode_value(bytes: &[u8]) -> Result<Self, FormatError> {
        if bytes.len() % 4 != 0 {
            return Err(FormatError::InvalidValue("node vector length not a multiple of 4".into()));
        }
        Ok(NodeVector(bytes.chunks(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect()))
    }
}

impl LatticeParams {
    pub fn toy(seed: &[u8]) -> Self {
        Self::generate(TOY_K, TOY_Q, seed).expect("toy dimensions are valid")
    }

    pub fn generate(k: u16, q: u32, seed: &[u8]) -> Result<Self> {
        if k == 0 || q < 3 {
            return Err(VcError::InvalidParameter(format!("lattice dimensions k = {k}, q = {q}")));
        }
        let log_q = (32 - (q - 1).leading_zeros()) as usize;
        let k = k as usize;
        let mut rng = ChaCha20Rng::from_seed(Sha256::digest([b"svc/lattice/M".as_slice(), seed].concat()).into());
        let m = (0..k * 2 * k * log_q).map(|_| rng.gen_range(0..q)).collect();
        Ok(Self { k, q, log_q, m })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Digits per node, `k * ceil(log2 q)`.
    pub fn d(&self) -> usize {
        self.k * self.log_q
    }

    fn row(&self, r: usize) -> &[u32] {
        let w = 2 * self.d();
        &self.m[r * w..(r + 1) * w]
    }

    fn mat_vec(&self, col0: usize, x: &[u32]) -> Vec<u32> {
        (0..self.k)
            .map(|r| {
                let row = &self.row(r)[col0..col0 + x.len()];
                let acc: u64 = row.iter().zip(x).map(|(a, b)| *a as u64 * (*b % self.q) as u64).sum();
                (acc % self.q as u64) as u32
            })
            .collect()
    }

    /// `f(x) = M x mod q` over integer vectors of length `2d`.
    pub fn hash_leaf(&self, x: &[u32]) -> Result<Vec<u32>> {
        self.check_len(x.len(), 2 * self.d())?;
        Ok(self.mat_vec(0, x))
    }

    /// `f~(x, y) = L x + R y mod q`.
    pub fn hash_pair(&self, x: &NodeVector, y: &NodeVector) -> Result<Vec<u32>> {
        let d = self.d();
        self.check_len(x.0.len(), d)?;
        self.check_len(y.0.len(), d)?;
        let a = self.mat_vec(0, &x.0);
        let b = self.mat_vec(d, &y.0);
        Ok(a.iter().zip(&b).map(|(u, v)| (u + v) % self.q).collect())
    }

    fn check_len(&self, got: usize, want: usize) -> Result<()> {
        if got != want {
            return Err(VcError::InvalidParameter(format!("dimension mismatch: expected {want}, got {got}")));
        }
        Ok(())
    }

    /// Message bits, least significant first, zero-padded to `2d`.
    pub fn encode_message(&self, m: u64) -> Vec<u32> {
        let mut v = vec![0u32; 2 * self.d()];
        for (b, slot) in v.iter_mut().enumerate().take(64) {
            *slot = ((m >> b) & 1) as u32;
        }
        v
    }

    /// Binary expansion `b(v)`, `log q` digits per entry, LSB first.
    pub fn decompose(&self, v: &[u32]) -> NodeVector {
        let mut out = Vec::with_capacity(self.d());
        for x in v {
            for s in 0..self.log_q {
                out.push((x >> s) & 1);
            }
        }
        NodeVector(out)
    }

    /// `g^-1`: weights each digit block by powers of two, mod q.
    pub fn g_inverse(&self, u: &NodeVector) -> Vec<u32> {
        u.0.chunks(self.log_q)
            .map(|c| {
                let acc: u64 = c.iter().enumerate().map(|(s, x)| ((*x as u64) << s) % self.q as u64).sum();
                (acc % self.q as u64) as u32
            })
            .collect()
    }

    /// One step up: `b(L v)` when the node is a left child, `b(R v)`
    /// otherwise.
    fn step(&self, v: &NodeVector, right: bool) -> NodeVector {
        self.decompose(&self.mat_vec(if right { self.d() } else { 0 }, &v.0))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(14 + 4 * self.m.len());
        out.extend_from_slice(PARAMS_MAGIC.as_bytes());
        out.extend_from_slice(&(self.k as u16).to_le_bytes());
        out.extend_from_slice(&self.q.to_le_bytes());
        for v in &self.m {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader::new(bytes);
        r.magic(PARAMS_MAGIC)?;
        let k = r.u16()? as usize;
        let q = r.u32()?;
        if k == 0 || q < 3 {
            return Err(FormatError::InvalidValue(format!("lattice dimensions k = {k}, q = {q}")));
        }
        let log_q = (32 - (q - 1).leading_zeros()) as usize;
        let len = k * 2 * k * log_q;
        let mut m = Vec::with_capacity(len);
        for _ in 0..len {
            let v = r.u32()?;
            if v >= q {
                return Err(FormatError::InvalidValue("matrix entry not reduced mod q".into()));
            }
            m.push(v);
        }
        r.finish()?;
        Ok(Self { k, q, log_q, m })
    }
}

/// `h_{i,j}(m)`: the contribution of leaf `i` holding `m` to its ancestor at
/// depth `j`. Costs exactly `h - j` steps, tallied in `ops.hashes`.
pub fn partial_digest(params: &LatticeParams, h: u8, i: usize, j: u8, m: u64, ops: &mut OpCounter) -> Result<NodeVector> {
    if j > h || (i as u64) >> h != 0 {
        return Err(VcError::InvalidParameter(format!("invalid digest coordinates ({i}, {j}) for height {h}")));
    }
    let leaf = NodePath::leaf(i as u64, h);
    let mut v = params.decompose(&params.mat_vec(0, &params.encode_message(m)));
    for d in (j + 1..=h).rev() {
        v = params.step(&v, leaf.bit(d));
        ops.hashes += 1;
    }
    Ok(v)
}

/// `u + h_{i,j}(new) - h_{i,j}(old)`, entrywise over the integers.
pub fn node_update(params: &LatticeParams, node: &NodeVector, h: u8, i: usize, j: u8, old: u64, new: u64) -> Result<NodeVector> {
    let mut ops = OpCounter::default();
    let d = digest_difference(params, h, i, j, old, new, &mut ops)?;
    let mut out = node.clone();
    apply_difference(&mut out, &d);
    Ok(out)
}

fn digest_difference(params: &LatticeParams, h: u8, i: usize, j: u8, old: u64, new: u64, ops: &mut OpCounter) -> Result<Vec<i64>> {
    if old == new {
        return Ok(vec![0; params.d()]);
    }
    let a = partial_digest(params, h, i, j, old, ops)?;
    let b = partial_digest(params, h, i, j, new, ops)?;
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| *y as i64 - *x as i64).collect())
}

/// Out-of-range results saturate, so they fail the digit bound check
/// instead of wrapping into something plausible.
fn apply_difference(node: &mut NodeVector, d: &[i64]) {
    for (x, dx) in node.0.iter_mut().zip(d) {
        *x = u32::try_from(*x as i64 + dx).unwrap_or(u32::MAX);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTree {
    height: u8,
    levels: Vec<Vec<NodeVector>>,
    messages: Vec<u64>,
}

/// Both children at every depth `1..=h`, top-down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmtProof {
    pub n: usize,
    pub index: usize,
    pub pairs: Vec<(NodeVector, NodeVector)>,
}

impl LatticeTree {
    pub fn build(params: &LatticeParams, messages: &[u64]) -> Result<Self> {
        let n = messages.len();
        let h = exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
        let mut cur: Vec<NodeVector> =
            messages.par_iter().map(|m| params.decompose(&params.mat_vec(0, &params.encode_message(*m)))).collect();
        let mut levels = vec![Vec::new(); h as usize + 1];
        for j in (0..=h).rev() {
            let span = 1usize << (h - j);
            levels[j as usize] = cur
                .par_chunks(span)
                .map(|c| {
                    let mut acc = vec![0u32; params.d()];
                    for v in c {
                        for (a, b) in acc.iter_mut().zip(&v.0) {
                            *a += b;
                        }
                    }
                    NodeVector(acc)
                })
                .collect();
            if j > 0 {
                cur = cur
                    .par_iter()
                    .enumerate()
                    .map(|(i, v)| params.step(v, NodePath::leaf(i as u64, h).bit(j)))
                    .collect();
            }
        }
        Ok(Self { height: h, levels, messages: messages.to_vec() })
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn messages(&self) -> &[u64] {
        &self.messages
    }

    pub fn node(&self, path: &NodePath) -> &NodeVector {
        &self.levels[path.depth() as usize][path.bits() as usize]
    }

    fn node_mut(&mut self, path: &NodePath) -> &mut NodeVector {
        &mut self.levels[path.depth() as usize][path.bits() as usize]
    }

    /// `g^-1(u_root)`.
    pub fn root_digest(&self, params: &LatticeParams) -> Vec<u32> {
        params.g_inverse(&self.levels[0][0])
    }

    pub fn open(&self, index: usize) -> Result<HmtProof> {
        let n = self.messages.len();
        if index >= n {
            return Err(VcError::IndexOutOfRange { index, len: n });
        }
        let pairs = (1..=self.height)
            .map(|d| {
                let parent = NodePath::prefix_of_leaf(index as u64, self.height, d - 1);
                (self.node(&parent.child(false)).clone(), self.node(&parent.child(true)).clone())
            })
            .collect();
        Ok(HmtProof { n, index, pairs })
    }

    /// Applies the batch to every ancestor of every updated leaf.
    pub fn apply(&mut self, params: &LatticeParams, batch: &UpdateBatch<u64>) -> Result<OpCounter> {
        batch.check_against(&self.messages)?;
        let h = self.height;
        let diffs: Vec<(Vec<(NodePath, Vec<i64>)>, OpCounter)> = batch
            .as_slice()
            .par_iter()
            .map(|u| {
                let mut ops = OpCounter::default();
                let mut out = Vec::with_capacity(h as usize + 1);
                for p in sublinear::affected_paths(u.index, h, LOCALITY) {
                    out.push((p, digest_difference(params, h, u.index, p.depth(), u.old, u.new, &mut ops)?));
                }
                Ok((out, ops))
            })
            .collect::<Result<_>>()?;
        let mut total = OpCounter::default();
        for (u, (list, ops)) in batch.iter().zip(diffs) {
            for (p, d) in list {
                apply_difference(self.node_mut(&p), &d);
            }
            total += ops;
            self.messages[u.index] = u.new;
        }
        Ok(total)
    }
}

fn digits_within(u: &NodeVector, bound: u64, d: usize) -> bool {
    u.0.len() == d && u.0.iter().all(|x| (*x as u64) <= bound)
}

/// Walks the proof from the leaf up: `g^-1(leaf) = f(m)`, each on-path
/// node satisfies `g^-1(u) = f~(children)`, and the top pair hashes to the
/// root digest. Digits must not exceed the node's leaf count.
pub fn verify(params: &LatticeParams, root: &[u32], m: u64, proof: &HmtProof) -> bool {
    let Some(h) = exact_log2(proof.n) else { return false };
    if proof.index >= proof.n || proof.pairs.len() != h as usize {
        return false;
    }
    let leaf_hash = params.mat_vec(0, &params.encode_message(m));
    if h == 0 {
        return leaf_hash == root;
    }
    let d = params.d();
    let path = NodePath::leaf(proof.index as u64, h);
    for (k, (a, b)) in proof.pairs.iter().enumerate() {
        let bound = 1u64 << (h as usize - k - 1);
        if !digits_within(a, bound, d) || !digits_within(b, bound, d) {
            return false;
        }
    }
    let pick = |depth: u8| {
        let (a, b) = &proof.pairs[depth as usize - 1];
        if path.bit(depth) { b } else { a }
    };
    if params.g_inverse(pick(h)) != leaf_hash {
        return false;
    }
    for depth in 1..h {
        let (a, b) = &proof.pairs[depth as usize];
        match params.hash_pair(a, b) {
            Ok(v) if v == params.g_inverse(pick(depth)) => {}
            _ => return false,
        }
    }
    let (a, b) = &proof.pairs[0];
    params.hash_pair(a, b).is_ok_and(|v| v == root)
}

impl HmtProof {
    /// The digest at the top of the proof, `f~(u_0, u_1)`.
    pub fn root_digest(&self, params: &LatticeParams) -> Option<Vec<u32>> {
        let (a, b) = self.pairs.first()?;
        params.hash_pair(a, b).ok()
    }
}

/// User-side scheme. Counts hash steps across calls.
pub struct LatticeScheme<'a> {
    pub params: &'a LatticeParams,
    pub height: u8,
    pub steps: AtomicU64,
}

impl<'a> LatticeScheme<'a> {
    pub fn new(params: &'a LatticeParams, height: u8) -> Self {
        Self { params, height, steps: AtomicU64::new(0) }
    }
}

impl PartialDigestScheme for LatticeScheme<'_> {
    type Message = u64;
    type Node = NodeVector;
    type Digest = Vec<i64>;

    fn locality(&self) -> u8 {
        LOCALITY
    }

    fn height(&self) -> u8 {
        self.height
    }

    fn partial_digest(&self, path: &NodePath, u: &Update<u64>) -> Result<Vec<i64>> {
        let mut ops = OpCounter::default();
        let d = digest_difference(self.params, self.height, u.index, path.depth(), u.old, u.new, &mut ops)?;
        self.steps.fetch_add(ops.hashes, Ordering::Relaxed);
        Ok(d)
    }

    fn absorb(&self, node: &mut NodeVector, d: Vec<i64>) {
        apply_difference(node, &d);
    }
}

pub fn update(
    params: &LatticeParams,
    tree: &LatticeTree,
    batch: &UpdateBatch<u64>,
    nu: Nu,
) -> Result<(LatticeTree, UpdateInfo<NodeVector>, OpCounter)> {
    let mut next = tree.clone();
    let ops = next.apply(params, batch)?;
    let chosen = sublinear::plan(tree.height, LOCALITY, batch, nu);
    let info = UpdateInfo::from_entries(tree.height, chosen.into_iter().map(|p| (p, next.node(&p).clone())).collect())?;
    Ok((next, info, ops))
}

/// Returns the refreshed proof, the engine counters and the number of hash
/// steps spent on partial digests.
pub fn proof_update(
    params: &LatticeParams,
    proof: &HmtProof,
    batch: &UpdateBatch<u64>,
    info: &UpdateInfo<NodeVector>,
) -> Result<(HmtProof, UpdateCounters, u64)> {
    let h = exact_log2(proof.n).ok_or(VcError::UnsupportedLength(proof.n))?;
    if proof.pairs.len() != h as usize || proof.index >= proof.n {
        return Err(VcError::ProofMismatch(proof.index));
    }
    batch.check_bounds(proof.n)?;
    let mut nodes = Vec::with_capacity(2 * h as usize);
    for (k, (a, b)) in proof.pairs.iter().enumerate() {
        let parent = NodePath::prefix_of_leaf(proof.index as u64, h, k as u8);
        nodes.push((parent.child(false), a.clone()));
        nodes.push((parent.child(true), b.clone()));
    }
    let scheme = LatticeScheme::new(params, h);
    let counters = sublinear::refresh_nodes(&scheme, &mut nodes, batch, info)?;
    let mut it = nodes.into_iter().map(|n| n.1);
    let pairs = (0..h).map(|_| (it.next().unwrap(), it.next().unwrap())).collect();
    Ok((HmtProof { n: proof.n, index: proof.index, pairs }, counters, scheme.steps.into_inner()))
}

pub struct LatticeVc {
    params: LatticeParams,
    n: usize,
    nu: Nu,
}

impl LatticeVc {
    pub fn new(n: usize, seed: &[u8], nu: Nu) -> Result<Self> {
        exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
        Ok(Self { params: LatticeParams::toy(seed), n, nu })
    }

    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    pub fn nu(&self) -> Nu {
        self.nu
    }

    pub fn set_nu(&mut self, nu: Nu) {
        self.nu = nu;
    }
}

impl DynamicVc for LatticeVc {
    type Message = u64;
    type Commitment = Vec<u32>;
    type Proof = HmtProof;
    type State = LatticeTree;
    type Node = NodeVector;

    const BACKEND: BackendId = BackendId::Lattice;

    fn vector_len(&self) -> usize {
        self.n
    }

    fn commit(&self, messages: &[u64]) -> Result<(Vec<u32>, LatticeTree)> {
        if messages.len() != self.n {
            return Err(VcError::UnsupportedLength(messages.len()));
        }
        let t = LatticeTree::build(&self.params, messages)?;
        Ok((t.root_digest(&self.params), t))
    }

    fn open(&self, state: &LatticeTree, index: usize) -> Result<HmtProof> {
        state.open(index)
    }

    fn verify(&self, c: &Vec<u32>, m: &u64, index: usize, proof: &HmtProof) -> bool {
        proof.index == index && proof.n == self.n && verify(&self.params, c, *m, proof)
    }

    fn update(&self, _: &Vec<u32>, state: &LatticeTree, batch: &UpdateBatch<u64>) -> Result<UpdateOutcome<Self>> {
        let (state, info, ops) = update(&self.params, state, batch, self.nu)?;
        Ok(UpdateOutcome { commitment: state.root_digest(&self.params), info, state, ops })
    }

    fn proof_update(
        &self,
        proof: &HmtProof,
        index: usize,
        batch: &UpdateBatch<u64>,
        info: &UpdateInfo<NodeVector>,
    ) -> Result<(HmtProof, OpCounter)> {
        if proof.index != index {
            return Err(VcError::ProofMismatch(index));
        }
        let (p, c, steps) = proof_update(&self.params, proof, batch, info)?;
        Ok((p, OpCounter { exps: 0, hashes: steps, digests: c.digests, lookups: c.lookups }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::all_paths;

    fn params() -> LatticeParams {
        LatticeParams::toy(b"unit")
    }

    #[test]
    fn dimensions() {
        let p = params();
        assert_eq!((p.k(), p.q(), p.d()), (8, 12289, 112));
        assert_eq!(p.m.len(), 8 * 224);
    }

    #[test]
    fn hash_basics() {
        let p = params();
        assert_eq!(p.hash_leaf(&vec![0; 224]).unwrap(), vec![0; 8]);
        let x = p.decompose(&[1, 2, 3, 4, 5, 6, 7, 8]);
        let zero = NodeVector(vec![0; 112]);
        let mut xz = x.0.clone();
        xz.extend(vec![0; 112]);
        assert_eq!(p.hash_pair(&x, &zero).unwrap(), p.hash_leaf(&xz).unwrap());
        assert!(p.hash_leaf(&[1, 2]).is_err());
        assert!(p.hash_pair(&x, &NodeVector(vec![0; 3])).is_err());
    }

    #[test]
    fn g_inverse_inverts_decompose() {
        let p = params();
        let v = vec![0, 1, 12288, 4096, 77, 9000, 3, 12000];
        assert_eq!(p.g_inverse(&p.decompose(&v)), v);
        assert_eq!(p.g_inverse(&NodeVector(vec![0; 112])), vec![0; 8]);
    }

    #[test]
    fn leaf_digest_costs_nothing_and_counts_steps() {
        let p = params();
        let mut ops = OpCounter::default();
        let leaf = partial_digest(&p, 3, 5, 3, 42, &mut ops).unwrap();
        assert_eq!(ops.hashes, 0);
        assert_eq!(leaf, p.decompose(&p.hash_leaf(&p.encode_message(42)).unwrap()));
        for j in 0..=3u8 {
            let mut ops = OpCounter::default();
            partial_digest(&p, 3, 5, j, 42, &mut ops).unwrap();
            assert_eq!(ops.hashes, 3 - j as u64);
        }
        assert!(partial_digest(&p, 3, 8, 1, 0, &mut ops).is_err());
        assert!(partial_digest(&p, 3, 1, 4, 0, &mut ops).is_err());
    }

    #[test]
    fn single_leaf_root_is_leaf_hash() {
        let p = params();
        let t = LatticeTree::build(&p, &[99]).unwrap();
        assert_eq!(t.root_digest(&p), p.hash_leaf(&p.encode_message(99)).unwrap());
        assert!(verify(&p, &t.root_digest(&p), 99, &t.open(0).unwrap()));
    }

    #[test]
    fn node_identity_on_eight_leaves() {
        let p = params();
        let m: Vec<u64> = (0..8).map(|i| 1000 + 37 * i).collect();
        let t = LatticeTree::build(&p, &m).unwrap();
        for path in all_paths(3) {
            let mut acc = vec![0u32; p.d()];
            for i in path.leaf_range(3) {
                let mut ops = OpCounter::default();
                let h = partial_digest(&p, 3, i as usize, path.depth(), m[i as usize], &mut ops).unwrap();
                for (a, b) in acc.iter_mut().zip(&h.0) {
                    *a += b;
                }
            }
            assert_eq!(t.node(&path).0, acc, "{path}");
        }
        for path in all_paths(2) {
            let l = t.node(&path.child(false));
            let r = t.node(&path.child(true));
            assert_eq!(p.g_inverse(t.node(&path)), p.hash_pair(l, r).unwrap());
        }
    }

    #[test]
    fn roundtrip_and_bit_flip() {
        let p = params();
        for n in [2usize, 4, 8] {
            let m: Vec<u64> = (0..n as u64).map(|i| i * 0x9e37 + 5).collect();
            let t = LatticeTree::build(&p, &m).unwrap();
            let root = t.root_digest(&p);
            for i in 0..n {
                let pr = t.open(i).unwrap();
                assert!(verify(&p, &root, m[i], &pr));
                assert!(!verify(&p, &root, m[i] ^ 1, &pr));
                assert_eq!(pr.root_digest(&p).unwrap(), root);
            }
        }
    }

    #[test]
    fn digit_bound_is_enforced() {
        let p = params();
        let t = LatticeTree::build(&p, &[1, 2, 3, 4]).unwrap();
        let mut pr = t.open(0).unwrap();
        pr.pairs[1].1 .0[0] = 2;
        assert!(!verify(&p, &t.root_digest(&p), 1, &pr));
    }

    #[test]
    fn node_update_matches_rebuild() {
        let p = params();
        let m: Vec<u64> = (0..8).collect();
        let t = LatticeTree::build(&p, &m).unwrap();
        let mut m2 = m.clone();
        m2[6] = 12345;
        let t2 = LatticeTree::build(&p, &m2).unwrap();
        for j in 0..=3u8 {
            let path = NodePath::prefix_of_leaf(6, 3, j);
            assert_eq!(&node_update(&p, t.node(&path), 3, 6, j, 6, 12345).unwrap(), t2.node(&path));
            assert_eq!(&node_update(&p, t.node(&path), 3, 6, j, 6, 6).unwrap(), t.node(&path));
        }
    }

    #[test]
    fn params_file_roundtrip() {
        let p = params();
        let b = p.to_bytes();
        assert_eq!(&b[..8], b"SVCLAT01");
        assert_eq!(b.len(), 8 + 2 + 4 + 4 * 8 * 224);
        assert_eq!(LatticeParams::from_bytes(&b).unwrap(), p);
    }

    #[test]
    fn user_five_digest_counts() {
        // N = 8, batch {0, 1, 5}, nu = 1/2: only u_root, u_0, u_00 are
        // published. User 5 holds both children at each depth.
        let p = params();
        let m: Vec<u64> = (0..8).collect();
        let t = LatticeTree::build(&p, &m).unwrap();
        let batch = UpdateBatch::new([0usize, 1, 5].iter().map(|&i| Update::new(i, m[i], 100 + i as u64)).collect()).unwrap();
        let (t2, info, _) = update(&p, &t, &batch, Nu::HALF).unwrap();
        let published: Vec<String> = info.paths().map(|x| x.to_string()).collect();
        assert_eq!(published, ["⊥", "⊥0", "⊥00"]);
        let scheme = LatticeScheme::new(&p, 3);
        let pr = t.open(5).unwrap();
        let mut per_node = Vec::new();
        for (k, (a, b)) in pr.pairs.iter().enumerate() {
            let parent = NodePath::prefix_of_leaf(5, 3, k as u8);
            for (c, v) in [(false, a), (true, b)] {
                let mut nodes = vec![(parent.child(c), v.clone())];
                let cnt = sublinear::refresh_nodes(&scheme, &mut nodes, &batch, &info).unwrap();
                per_node.push((parent.child(c).to_string(), cnt.digests));
                assert_eq!(&nodes[0].1, t2.node(&parent.child(c)));
            }
        }
        let want = [("⊥0", 0), ("⊥1", 1), ("⊥10", 1), ("⊥11", 0), ("⊥100", 0), ("⊥101", 1)];
        let want: Vec<(String, u64)> = want.iter().map(|(a, b)| (a.to_string(), *b)).collect();
        assert_eq!(per_node, want);
        let (pr2, _, _) = proof_update(&p, &pr, &batch, &info).unwrap();
        assert_eq!(pr2, t2.open(5).unwrap());
        assert!(verify(&p, &t2.root_digest(&p), 105, &pr2));
    }
}
