//! Authenticated multipoint evaluation trees. Each node commits to the
//! quotient of dividing the parent's remainder by the vanishing polynomial
//! of the node's leaf range, so an opening is one root-to-leaf path.
//!
//! A node only depends on the messages under its parent, which makes the
//! partial digests have locality one.

use std::collections::BTreeMap;

use ark_ec::{pairing::Pairing, AffineRepr, CurveGroup};
use ark_ff::{batch_inversion, Field, One, Zero};
use rayon::prelude::*;

use crate::batch::{Update, UpdateBatch};
use crate::codec::Reader;
use crate::error::{FormatError, Result, VcError};
use crate::pairing::{
    commit_poly, commit_poly_g2, fixed_base_g1, fixed_base_g2, g1_from_bytes, g1_to_bytes, g2_from_bytes, g2_to_bytes,
    trusted_setup_with, Bls12_381, G1Affine, G1Projective, G2Affine, Scalar, SetupOptions, Srs, Trapdoor, G1_BYTES,
    G2_BYTES,
};
use crate::path::{all_paths, exact_log2, NodePath};
use crate::poly::DensePolynomial;
use crate::sublinear::{self, Nu, PartialDigestScheme, UpdateCounters};
use crate::updinfo::{BackendId, NodeValue, UpdateInfo};
use crate::vc::{DynamicVc, OpCounter, UpdateOutcome};

const PARAMS_MAGIC: &str = "SVCAMT01";

/// Locality of the partial digests.
pub const LOCALITY: u8 = 1;

/// Above this size the division-based build is too slow to be useful.
pub const HONEST_BUILD_LIMIT: usize = 1 << 12;

impl NodeValue for G1Projective {
    const BACKEND: BackendId = BackendId::Amt;
    fn encode_value(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&g1_to_bytes(self));
    }
    fn decode_value(bytes: &[u8]) -> Result<Self, FormatError> {
        g1_from_bytes(bytes)
    }
}

/// Leaf indices under `path` in a tree of height `h`.
pub fn range(path: &NodePath, h: u8) -> std::ops::Range<u64> {
    path.leaf_range(h)
}

fn heap_index(p: &NodePath) -> usize {
    (1usize << p.depth()) - 1 + p.bits() as usize
}

/// Nonzero nodes of the AMT of one basis polynomial `L_i`: the two
/// children of every node on the path to leaf `i`. The root is always the
/// identity because `deg L_i < N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisTree {
    index: usize,
    /// `levels[d - 1][c]` is the node at depth `d` with parent on the path
    /// and last bit `c`.
    levels: Vec<[G1Affine; 2]>,
    /// `[L_i]`
    commitment: G1Affine,
}

impl BasisTree {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn commitment(&self) -> G1Affine {
        self.commitment
    }

    /// `None` when the node is not one the basis tree can be nonzero at.
    pub fn node(&self, path: &NodePath) -> Option<G1Affine> {
        let h = self.levels.len() as u8;
        if path.depth() > h {
            return None;
        }
        if path.is_root() {
            return Some(G1Affine::zero());
        }
        let d = path.depth();
        let on_path = NodePath::prefix_of_leaf(self.index as u64, h, d - 1);
        (path.parent() == Some(on_path)).then(|| self.levels[d as usize - 1][path.last_bit().unwrap() as usize])
    }

    pub fn nonzero_nodes(&self) -> impl Iterator<Item = (NodePath, G1Affine)> + '_ {
        let h = self.levels.len() as u8;
        (1..=h).flat_map(move |d| {
            let parent = NodePath::prefix_of_leaf(self.index as u64, h, d - 1);
            [false, true].into_iter().map(move |c| (parent.child(c), self.levels[d as usize - 1][c as usize]))
        })
        .filter(|(_, v)| !v.is_zero())
    }
}

/// Public parameters: basis trees plus G2 commitments to every vanishing
/// polynomial `V_path`. May cover only a subset of the indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangeAmtParams {
    n: usize,
    height: u8,
    bases: BTreeMap<usize, BasisTree>,
    vanishing: BTreeMap<NodePath, G2Affine>,
    g1: G1Affine,
    g2: G2Affine,
}

/// Evaluations at `tau` of every vanishing polynomial, by heap index.
fn vanishing_at(n: usize, h: u8, tau: &Scalar) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); 2 * n - 1];
    let leaf0 = n - 1;
    for x in 0..n {
        v[leaf0 + x] = *tau - Scalar::from(x as u64);
    }
    for d in (0..h as usize).rev() {
        let start = (1 << d) - 1;
        for j in 0..(1 << d) {
            v[start + j] = v[2 * (start + j) + 1] * v[2 * (start + j) + 2];
        }
    }
    v
}

fn factorials(n: usize) -> Vec<Scalar> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(Scalar::one());
    for k in 1..=n {
        f.push(f[k - 1] * Scalar::from(k as u64));
    }
    f
}

/// `prod_{x in [a, a+len)} (i - x)` for `i` outside the interval.
fn vanishing_at_index(f: &[Scalar], i: usize, a: usize, len: usize) -> Scalar {
    if i < a {
        let s = f[a + len - 1 - i] * f[a - 1 - i].inverse().unwrap();
        if len % 2 == 1 {
            -s
        } else {
            s
        }
    } else {
        debug_assert!(i >= a + len);
        f[i - a] * f[i - a - len].inverse().unwrap()
    }
}

impl LagrangeAmtParams {
    /// Parameters for all `n` indices.
    pub fn generate(n: usize, seed: &[u8]) -> Result<Self> {
        Self::generate_subset(n, seed, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>())
    }

    /// Basis trees for `bases` only, and vanishing commitments along the
    /// paths to `leaves`. Enough to run updates over `bases` and verify
    /// proofs for `leaves`.
    pub fn generate_subset(n: usize, seed: &[u8], bases: &[usize], leaves: &[usize]) -> Result<Self> {
        let h = exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
        if let Some(&bad) = bases.iter().chain(leaves).find(|&&i| i >= n) {
            return Err(VcError::IndexOutOfRange { index: bad, len: n });
        }
        let tau = Trapdoor::from_seed(seed).0;
        let v = vanishing_at(n, h, &tau);
        let mut v_inv = v.clone();
        batch_inversion(&mut v_inv);
        let f = factorials(n);

        let mut bases: Vec<usize> = bases.to_vec();
        bases.sort_unstable();
        bases.dedup();
        // Per basis: 2h quotient evaluations followed by L_i(tau).
        let per = 2 * h as usize + 1;
        let scalars: Vec<Scalar> = bases
            .par_iter()
            .flat_map_iter(|&i| {
                let mut out = vec![Scalar::zero(); per];
                let mut ell = Scalar::one();
                for d in (1..=h).rev() {
                    let on = NodePath::leaf(i as u64, h).ancestor(d);
                    let sib = on.sibling().unwrap();
                    let r = sib.leaf_range(h);
                    let parent_ell =
                        ell * v[heap_index(&sib)] * vanishing_at_index(&f, i, r.start as usize, (r.end - r.start) as usize).inverse().unwrap();
                    let bit = on.last_bit().unwrap() as usize;
                    out[2 * (d as usize - 1) + bit] = (parent_ell - ell) * v_inv[heap_index(&on)];
                    out[2 * (d as usize - 1) + 1 - bit] = parent_ell * v_inv[heap_index(&sib)];
                    ell = parent_ell;
                }
                out[per - 1] = ell;
                out
            })
            .collect();
        let points = fixed_base_g1(&scalars);
        let bases = bases
            .iter()
            .zip(points.chunks(per))
            .map(|(&i, c)| {
                let levels = (0..h as usize).map(|d| [c[2 * d], c[2 * d + 1]]).collect();
                (i, BasisTree { index: i, levels, commitment: c[per - 1] })
            })
            .collect();

        let mut paths: Vec<NodePath> = leaves
            .iter()
            .flat_map(|&x| (0..=h).map(move |d| NodePath::prefix_of_leaf(x as u64, h, d)))
            .collect();
        paths.sort_unstable();
        paths.dedup();
        let vs: Vec<Scalar> = paths.iter().map(|p| v[heap_index(p)]).collect();
        let vanishing = paths.into_iter().zip(fixed_base_g2(&vs)).collect();
        Ok(Self {
            n,
            height: h,
            bases,
            vanishing,
            g1: G1Affine::generator(),
            g2: G2Affine::generator(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn basis(&self, i: usize) -> Result<&BasisTree> {
        self.bases.get(&i).ok_or_else(|| VcError::MissingParameters(format!("basis tree {i}")))
    }

    pub fn lagrange_commitment(&self, i: usize) -> Result<G1Affine> {
        Ok(self.basis(i)?.commitment)
    }

    pub fn vanishing(&self, path: &NodePath) -> Option<G2Affine> {
        self.vanishing.get(path).copied()
    }

    pub fn is_complete(&self) -> bool {
        self.bases.len() == self.n && self.vanishing.len() == 2 * self.n - 1
    }

    /// `SVCAMT01 | u32 N | per basis: u16 count, (path, G1)* | vanishing
    /// commitments in canonical order | [L_i] for each i`. Only complete
    /// parameter sets are serializable.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if !self.is_complete() {
            return Err(VcError::MissingParameters("a complete parameter set".into()));
        }
        let mut out = Vec::new();
        out.extend_from_slice(PARAMS_MAGIC.as_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for b in self.bases.values() {
            let nodes: Vec<_> = b.nonzero_nodes().collect();
            out.extend_from_slice(&(nodes.len() as u16).to_le_bytes());
            for (p, g) in nodes {
                out.push(p.depth());
                p.pack(&mut out);
                out.extend_from_slice(&g1_to_bytes(&g.into_group()));
            }
        }
        for g in self.vanishing.values() {
            out.extend_from_slice(&g2_to_bytes(g));
        }
        for b in self.bases.values() {
            out.extend_from_slice(&g1_to_bytes(&b.commitment.into_group()));
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader::new(bytes);
        r.magic(PARAMS_MAGIC)?;
        let n = r.u32()? as usize;
        let h = exact_log2(n).ok_or_else(|| FormatError::InvalidValue(format!("N = {n} is not a power of two")))?;
        let mut bases = Vec::with_capacity(n.min(1 << 20));
        for i in 0..n {
            let count = r.u16()? as usize;
            let mut levels = vec![[G1Affine::zero(); 2]; h as usize];
            for _ in 0..count {
                let depth = r.u8()?;
                let p = NodePath::unpack(depth, r.take(NodePath::packed_len(depth))?)?;
                let parent = p.parent().ok_or(FormatError::InvalidPath("root is never stored".into()))?;
                if depth > h || parent != NodePath::prefix_of_leaf(i as u64, h, depth - 1) {
                    return Err(FormatError::InvalidPath(format!("{p} is not adjacent to the path of {i}")));
                }
                levels[depth as usize - 1][p.last_bit().unwrap() as usize] = g1_from_bytes(r.take(G1_BYTES)?)?.into_affine();
            }
            bases.push(levels);
        }
        let mut vanishing = BTreeMap::new();
        for p in all_paths(h) {
            vanishing.insert(p, g2_from_bytes(r.take(G2_BYTES)?)?);
        }
        let mut map = BTreeMap::new();
        for (i, levels) in bases.into_iter().enumerate() {
            let commitment = g1_from_bytes(r.take(G1_BYTES)?)?.into_affine();
            map.insert(i, BasisTree { index: i, levels, commitment });
        }
        r.finish()?;
        Ok(Self { n, height: h, bases: map, vanishing, g1: G1Affine::generator(), g2: G2Affine::generator() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmtTree {
    height: u8,
    /// `nodes[d][j]`: node at depth `d`, index `j`.
    nodes: Vec<Vec<G1Projective>>,
    commitment: G1Projective,
    messages: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmtProof {
    pub n: usize,
    pub index: usize,
    /// Path nodes from the root down to the leaf.
    pub nodes: Vec<G1Projective>,
}

impl AmtTree {
    /// The honest construction by repeated polynomial division. Quadratic
    /// in `N`.
    pub fn build(srs: &Srs, messages: &[Scalar]) -> Result<Self> {
        let n = messages.len();
        let h = exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
        if srs.degree_bound() < n {
            return Err(VcError::DegreeBound { degree: n, bound: srs.degree_bound() });
        }
        let phi = DensePolynomial::interpolate(messages);
        let commitment = commit_poly(srs, &phi)?;
        let vanish = vanishing_tree(n, h);
        let mut nodes = vec![Vec::new(); h as usize + 1];
        let mut rem = vec![phi];
        for d in 0..=h as usize {
            let parents = std::mem::take(&mut rem);
            let (q, r): (Vec<_>, Vec<_>) = (0..1usize << d)
                .into_par_iter()
                .map(|j| {
                    let parent = if d == 0 { &parents[0] } else { &parents[j >> 1] };
                    let (q, r) = parent.div_rem(&vanish[d][j]);
                    (commit_poly(srs, &q).expect("degree within bound"), r)
                })
                .unzip();
            nodes[d] = q;
            rem = r;
        }
        Ok(Self { height: h, nodes, commitment, messages: messages.to_vec() })
    }

    /// The tree of the all-zero vector: every node is the identity.
    pub fn zero(n: usize) -> Result<Self> {
        let h = exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
        let nodes = (0..=h).map(|d| vec![G1Projective::zero(); 1 << d]).collect();
        Ok(Self { height: h, nodes, commitment: G1Projective::zero(), messages: vec![Scalar::zero(); n] })
    }

    /// Builds from parameters as a Lagrange combination of basis trees.
    pub fn from_params(params: &LagrangeAmtParams, messages: &[Scalar]) -> Result<Self> {
        let mut t = Self::zero(params.n)?;
        if messages.len() != params.n {
            return Err(VcError::UnsupportedLength(messages.len()));
        }
        let batch = UpdateBatch::new(
            messages
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_zero())
                .map(|(i, m)| Update::new(i, Scalar::zero(), *m))
                .collect(),
        )?;
        t.apply(params, &batch)?;
        Ok(t)
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn commitment(&self) -> G1Projective {
        self.commitment
    }

    pub fn messages(&self) -> &[Scalar] {
        &self.messages
    }

    pub fn node(&self, path: &NodePath) -> G1Projective {
        self.nodes[path.depth() as usize][path.bits() as usize]
    }

    pub fn open(&self, index: usize) -> Result<AmtProof> {
        let n = self.messages.len();
        if index >= n {
            return Err(VcError::IndexOutOfRange { index, len: n });
        }
        let nodes = (0..=self.height).map(|d| self.node(&NodePath::prefix_of_leaf(index as u64, self.height, d))).collect();
        Ok(AmtProof { n, index, nodes })
    }

    /// Applies `u' = u * (u^i)^(m_i' - m_i)` to every affected node and to
    /// the commitment. Returns the exponentiation count.
    pub fn apply(&mut self, params: &LagrangeAmtParams, batch: &UpdateBatch<Scalar>) -> Result<OpCounter> {
        batch.check_against(&self.messages)?;
        let h = self.height;
        let deltas: Vec<Vec<(NodePath, G1Projective)>> = batch
            .as_slice()
            .par_iter()
            .map(|u| {
                let b = params.basis(u.index)?;
                let d = u.new - u.old;
                let mut out = vec![(NodePath::ROOT, b.commitment * d)];
                for p in sublinear::affected_paths(u.index, h, LOCALITY).filter(|p| !p.is_root()) {
                    out.push((p, b.node(&p).unwrap() * d));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut ops = OpCounter::default();
        for (u, list) in batch.iter().zip(deltas) {
            let mut it = list.into_iter();
            self.commitment += it.next().unwrap().1;
            for (p, g) in it {
                self.nodes[p.depth() as usize][p.bits() as usize] += g;
            }
            ops.exps += 2 * h as u64 + 1;
            self.messages[u.index] = u.new;
        }
        Ok(ops)
    }
}

/// Vanishing polynomials of every node, per depth.
fn vanishing_tree(n: usize, h: u8) -> Vec<Vec<DensePolynomial>> {
    let mut levels = vec![Vec::new(); h as usize + 1];
    levels[h as usize] = (0..n as u64).map(|x| DensePolynomial::linear_root(Scalar::from(x))).collect();
    for d in (0..h as usize).rev() {
        levels[d] = levels[d + 1].par_chunks(2).map(|c| &c[0] * &c[1]).collect();
    }
    levels
}

/// G2 commitments to the vanishing polynomials, computed from the powers
/// of tau rather than the trapdoor.
pub fn honest_vanishing_commitments(srs: &Srs, n: usize) -> Result<BTreeMap<NodePath, G2Affine>> {
    let h = exact_log2(n).ok_or(VcError::UnsupportedLength(n))?;
    let tree = vanishing_tree(n, h);
    all_paths(h)
        .map(|p| Ok((p, commit_poly_g2(srs, &tree[p.depth() as usize][p.bits() as usize])?.into_affine())))
        .collect()
}

/// `e(C - m g, g2) = prod_j e(u_j, [V_j])` over the path to the leaf.
pub fn verify(params: &LagrangeAmtParams, c: &G1Projective, m: &Scalar, proof: &AmtProof) -> bool {
    let h = params.height;
    if proof.n != params.n || proof.index >= params.n || proof.nodes.len() != h as usize + 1 {
        return false;
    }
    let mut g1s = vec![*c - params.g1 * m];
    let mut g2s = vec![params.g2.into_group()];
    for (d, u) in proof.nodes.iter().enumerate() {
        let Some(v) = params.vanishing(&NodePath::prefix_of_leaf(proof.index as u64, h, d as u8)) else {
            return false;
        };
        g1s.push(-*u);
        g2s.push(v.into_group());
    }
    Bls12_381::multi_pairing(g1s, g2s).is_zero()
}

/// `h_{i,j,c}(delta)`: the basis node at depth `depth` whose parent is on
/// the path to `i`, with last bit `c`, raised to `delta`. At the root `c`
/// must be `None`.
pub fn partial_digest(
    params: &LagrangeAmtParams,
    index: usize,
    depth: u8,
    c: Option<bool>,
    delta: &Scalar,
) -> Result<G1Projective> {
    let h = params.height;
    if index >= params.n || depth > h || (depth == 0) != c.is_none() {
        return Err(VcError::InvalidParameter(format!("invalid digest coordinates ({index}, {depth}, {c:?})")));
    }
    let path = match c {
        None => NodePath::ROOT,
        Some(bit) => NodePath::prefix_of_leaf(index as u64, h, depth - 1).child(bit),
    };
    Ok(params.basis(index)?.node(&path).unwrap() * delta)
}

/// The user-side view of the AMT as a homomorphic tree.
pub struct AmtScheme<'a> {
    pub params: &'a LagrangeAmtParams,
}

impl PartialDigestScheme for AmtScheme<'_> {
    type Message = Scalar;
    type Node = G1Projective;
    type Digest = G1Projective;

    fn locality(&self) -> u8 {
        LOCALITY
    }

    fn height(&self) -> u8 {
        self.params.height
    }

    fn partial_digest(&self, path: &NodePath, u: &Update<Scalar>) -> Result<G1Projective> {
        let b = self.params.basis(u.index)?;
        let node = b.node(path).ok_or_else(|| VcError::InvalidParameter(format!("{path} is not affected by {}", u.index)))?;
        Ok(node * (u.new - u.old))
    }

    fn absorb(&self, node: &mut G1Projective, d: G1Projective) {
        *node += d;
    }
}

/// New commitment from the old one and the batch alone.
pub fn update_commitment(params: &LagrangeAmtParams, c: &G1Projective, batch: &UpdateBatch<Scalar>) -> Result<G1Projective> {
    let mut out = *c;
    for u in batch {
        out += params.lagrange_commitment(u.index)? * (u.new - u.old);
    }
    Ok(out)
}

/// Publishes the nodes chosen by the planner, taken from the updated tree.
pub fn update(
    params: &LagrangeAmtParams,
    tree: &AmtTree,
    batch: &UpdateBatch<Scalar>,
    nu: Nu,
) -> Result<(AmtTree, UpdateInfo<G1Projective>, OpCounter)> {
    let mut next = tree.clone();
    let ops = next.apply(params, batch)?;
    let chosen = sublinear::plan(tree.height, LOCALITY, batch, nu);
    let info = UpdateInfo::from_entries(tree.height, chosen.into_iter().map(|p| (p, next.node(&p))).collect())?;
    Ok((next, info, ops))
}

pub fn proof_update(
    params: &LagrangeAmtParams,
    proof: &AmtProof,
    batch: &UpdateBatch<Scalar>,
    info: &UpdateInfo<G1Projective>,
) -> Result<(AmtProof, UpdateCounters)> {
    if proof.n != params.n || proof.nodes.len() != params.height as usize + 1 {
        return Err(VcError::ProofMismatch(proof.index));
    }
    batch.check_bounds(params.n)?;
    let h = params.height;
    let mut nodes: Vec<(NodePath, G1Projective)> = proof
        .nodes
        .iter()
        .enumerate()
        .map(|(d, u)| (NodePath::prefix_of_leaf(proof.index as u64, h, d as u8), *u))
        .collect();
    let counters = sublinear::refresh_nodes(&AmtScheme { params }, &mut nodes, batch, info)?;
    Ok((AmtProof { n: proof.n, index: proof.index, nodes: nodes.into_iter().map(|n| n.1).collect() }, counters))
}

/// Proof refresh with nothing published: every node absorbs the digests of
/// all updates under its parent.
pub fn proof_update_no_info(
    params: &LagrangeAmtParams,
    proof: &AmtProof,
    batch: &UpdateBatch<Scalar>,
) -> Result<(AmtProof, UpdateCounters)> {
    proof_update(params, proof, batch, &UpdateInfo::empty(params.height))
}

/// AMT as a [`DynamicVc`]. Holds an SRS when the honest construction is
/// wanted; otherwise commits by combining basis trees.
pub struct AmtVc {
    params: LagrangeAmtParams,
    srs: Option<Srs>,
    nu: Nu,
}

impl AmtVc {
    /// Full parameters; the honest construction is used up to
    /// [`HONEST_BUILD_LIMIT`] entries.
    pub fn new(n: usize, seed: &[u8], nu: Nu) -> Result<Self> {
        let params = LagrangeAmtParams::generate(n, seed)?;
        let srs = if n <= HONEST_BUILD_LIMIT { Some(trusted_setup_with(n, seed, SetupOptions::default())?) } else { None };
        Ok(Self { params, srs, nu })
    }

    pub fn from_params(params: LagrangeAmtParams, srs: Option<Srs>, nu: Nu) -> Self {
        Self { params, srs, nu }
    }

    pub fn params(&self) -> &LagrangeAmtParams {
        &self.params
    }

    pub fn nu(&self) -> Nu {
        self.nu
    }

    pub fn set_nu(&mut self, nu: Nu) {
        self.nu = nu;
    }
}

impl DynamicVc for AmtVc {
    type Message = Scalar;
    type Commitment = G1Projective;
    type Proof = AmtProof;
    type State = AmtTree;
    type Node = G1Projective;

    const BACKEND: BackendId = BackendId::Amt;

    fn vector_len(&self) -> usize {
        self.params.n
    }

    fn commit(&self, messages: &[Scalar]) -> Result<(G1Projective, AmtTree)> {
        if messages.len() != self.params.n {
            return Err(VcError::UnsupportedLength(messages.len()));
        }
        let t = match &self.srs {
            Some(srs) => AmtTree::build(srs, messages)?,
            None if messages.iter().all(|m| m.is_zero()) => AmtTree::zero(self.params.n)?,
            None => AmtTree::from_params(&self.params, messages)?,
        };
        Ok((t.commitment, t))
    }

    fn open(&self, state: &AmtTree, index: usize) -> Result<AmtProof> {
        state.open(index)
    }

    fn verify(&self, c: &G1Projective, m: &Scalar, index: usize, proof: &AmtProof) -> bool {
        proof.index == index && verify(&self.params, c, m, proof)
    }

    fn update(&self, _: &G1Projective, state: &AmtTree, batch: &UpdateBatch<Scalar>) -> Result<UpdateOutcome<Self>> {
        let (state, info, ops) = update(&self.params, state, batch, self.nu)?;
        Ok(UpdateOutcome { commitment: state.commitment, info, state, ops })
    }

    fn proof_update(
        &self,
        proof: &AmtProof,
        index: usize,
        batch: &UpdateBatch<Scalar>,
        info: &UpdateInfo<G1Projective>,
    ) -> Result<(AmtProof, OpCounter)> {
        if proof.index != index {
            return Err(VcError::ProofMismatch(index));
        }
        let (p, c) = proof_update(&self.params, proof, batch, info)?;
        Ok((p, OpCounter { exps: c.digests, digests: c.digests, lookups: c.lookups, hashes: 0 }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::trusted_setup;
    use ark_ff::UniformRand;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rand_msgs(n: usize, seed: u64) -> Vec<Scalar> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| Scalar::rand(&mut rng)).collect()
    }

    #[test]
    fn range_examples() {
        let h = 3;
        assert_eq!(range(&NodePath::ROOT, h), 0..8);
        assert_eq!(range(&NodePath::ROOT.child(true), h), 4..8);
        assert_eq!(range(&NodePath::leaf(6, h), h), 6..7);
    }

    #[test]
    fn zero_vector_tree_is_all_identity() {
        let srs = trusted_setup(4, b"z").unwrap();
        let t = AmtTree::build(&srs, &[Scalar::zero(); 4]).unwrap();
        assert_eq!(t, AmtTree::zero(4).unwrap());
        let params = LagrangeAmtParams::generate(4, b"z").unwrap();
        assert!(verify(&params, &G1Projective::zero(), &Scalar::zero(), &t.open(2).unwrap()));
    }

    #[test]
    fn two_leaf_root_child_is_explicit_quotient() {
        // phi = m0 + (m1 - m0) X. At depth 1 the node for leaf 0 holds
        // phi div (X - 0) = m1 - m0, a constant.
        let srs = trusted_setup(2, b"two").unwrap();
        let m = [Scalar::from(3u64), Scalar::from(10u64)];
        let t = AmtTree::build(&srs, &m).unwrap();
        let g = srs.g1().into_group();
        assert!(t.node(&NodePath::ROOT).is_zero());
        assert_eq!(t.node(&NodePath::leaf(0, 1)), g * Scalar::from(7u64));
        assert_eq!(t.node(&NodePath::leaf(1, 1)), g * Scalar::from(7u64));
    }

    #[test]
    fn trapdoor_params_match_honest_trees() {
        let n = 8;
        let seed = b"cross";
        let srs = trusted_setup_with(n, seed, SetupOptions { g2_powers: n + 1, insecure_retain_trapdoor: false }).unwrap();
        let params = LagrangeAmtParams::generate(n, seed).unwrap();
        for i in 0..n {
            let mut e = vec![Scalar::zero(); n];
            e[i] = Scalar::one();
            let t = AmtTree::build(&srs, &e).unwrap();
            let b = params.basis(i).unwrap();
            assert_eq!(t.commitment(), b.commitment().into_group());
            for p in all_paths(3) {
                let want = b.node(&p).map(|g| g.into_group()).unwrap_or(G1Projective::zero());
                assert_eq!(t.node(&p), want, "basis {i} node {p}");
            }
            assert!(b.nonzero_nodes().count() <= 2 * 3 + 1);
        }
        let honest = honest_vanishing_commitments(&srs, n).unwrap();
        assert_eq!(honest, params.vanishing);
    }

    #[test]
    fn roundtrip_and_tamper() {
        for n in [1, 2, 4, 8] {
            let vc = AmtVc::new(n, b"rt", Nu::HALF).unwrap();
            let m = rand_msgs(n, n as u64);
            let (c, t) = vc.commit(&m).unwrap();
            for i in 0..n {
                let p = vc.open(&t, i).unwrap();
                assert!(vc.verify(&c, &m[i], i, &p));
                assert!(!vc.verify(&c, &(m[i] + Scalar::one()), i, &p));
            }
        }
    }

    #[test]
    fn homomorphism_against_basis_trees() {
        let n = 4;
        let srs = trusted_setup(n, b"hom").unwrap();
        let params = LagrangeAmtParams::generate(n, b"hom").unwrap();
        let m = rand_msgs(n, 11);
        let t = AmtTree::build(&srs, &m).unwrap();
        assert_eq!(AmtTree::from_params(&params, &m).unwrap(), t);
        for p in all_paths(2) {
            let r = match p.parent() {
                Some(q) => q.leaf_range(2),
                None => 0..4,
            };
            let mut acc = G1Projective::zero();
            for i in r {
                acc += params.basis(i as usize).unwrap().node(&p).unwrap() * m[i as usize];
            }
            assert_eq!(t.node(&p), acc);
        }
    }

    #[test]
    fn partial_digest_coordinates() {
        let params = LagrangeAmtParams::generate(8, b"pd").unwrap();
        assert!(partial_digest(&params, 5, 0, None, &Scalar::from(4u64)).unwrap().is_zero());
        let b = params.basis(5).unwrap();
        let one = partial_digest(&params, 5, 2, Some(false), &Scalar::one()).unwrap();
        assert_eq!(one, b.node(&NodePath::leaf(5, 3).ancestor(1).child(false)).unwrap().into_group());
        assert!(partial_digest(&params, 5, 2, Some(true), &Scalar::zero()).unwrap().is_zero());
        assert!(partial_digest(&params, 5, 0, Some(true), &Scalar::one()).is_err());
        assert!(partial_digest(&params, 5, 2, None, &Scalar::one()).is_err());
        assert!(partial_digest(&params, 8, 1, Some(true), &Scalar::one()).is_err());
        assert!(partial_digest(&params, 5, 4, Some(true), &Scalar::one()).is_err());
    }

    #[test]
    fn no_info_refresh_matches_fresh_open() {
        let n = 4;
        let vc = AmtVc::new(n, b"noinfo", Nu::HALF).unwrap();
        let m = rand_msgs(n, 2);
        let (_, t) = vc.commit(&m).unwrap();
        let new = rand_msgs(n, 3);
        for batch in [
            UpdateBatch::new(vec![Update::new(2, m[2], new[2])]).unwrap(),
            UpdateBatch::new((0..n).map(|i| Update::new(i, m[i], new[i])).collect()).unwrap(),
            UpdateBatch::default(),
        ] {
            let mut t2 = t.clone();
            let ops = t2.apply(vc.params(), &batch).unwrap();
            assert_eq!(ops.exps, batch.len() as u64 * 5);
            for x in 0..n {
                let (p, c) = proof_update_no_info(vc.params(), &t.open(x).unwrap(), &batch).unwrap();
                assert_eq!(p, t2.open(x).unwrap());
                assert!(c.digests <= batch.len() as u64 * 3);
            }
        }
    }

    #[test]
    fn params_file_roundtrip() {
        let params = LagrangeAmtParams::generate(4, b"file").unwrap();
        let bytes = params.to_bytes().unwrap();
        assert_eq!(&bytes[..8], b"SVCAMT01");
        assert_eq!(LagrangeAmtParams::from_bytes(&bytes).unwrap(), params);
        let sub = LagrangeAmtParams::generate_subset(4, b"file", &[1], &[1]).unwrap();
        assert!(sub.to_bytes().is_err());
        assert_eq!(sub.basis(1).unwrap(), params.basis(1).unwrap());
        assert!(sub.basis(0).is_err());
    }
}
