//! End-to-end runs: commit, apply one batch, refresh user proofs from the
//! published information and check them against fresh openings.

use std::time::Instant;

use ark_ff::UniformRand;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use svc_core::amt::{self, AmtVc};
use svc_core::kzg::{KzgVc, DENSE_TABLE_LIMIT};
use svc_core::lattice::{self, LatticeVc};
use svc_core::merkle::MerkleVc;
use svc_core::path::{all_paths, exact_log2};
use svc_core::sublinear::verify_counters;
use svc_core::verkle::VerkleVc;
use svc_core::{
    BackendId, DynamicVc, Nu, OpCounter, Scalar, Update, UpdateBatch, UpdateCounters, UpdateInfo, VcError,
};

use crate::report::Row;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum E2eError {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("verification failure: {0}")]
    Verification(String),
}

impl E2eError {
    pub fn exit_code(&self) -> u8 {
        match self {
            E2eError::Param(_) => 2,
            E2eError::Verification(_) => 3,
        }
    }
}

impl From<VcError> for E2eError {
    fn from(e: VcError) -> Self {
        E2eError::Param(e.to_string())
    }
}

fn failed(what: impl std::fmt::Display) -> E2eError {
    E2eError::Verification(what.to_string())
}

/// Backend hooks the driver needs beyond [`DynamicVc`].
pub trait Backend: DynamicVc
where
    Self::Node: PartialEq,
{
    fn random_message(rng: &mut ChaCha20Rng) -> Self::Message;

    /// The per-proof cost reported in the `ops` column.
    fn cost(ops: &OpCounter) -> u64 {
        ops.exps
    }

    /// Proof refresh, plus the engine counters when the backend runs the
    /// sublinear engine.
    fn refresh(
        &self,
        proof: &Self::Proof,
        index: usize,
        batch: &UpdateBatch<Self::Message>,
        info: &UpdateInfo<Self::Node>,
    ) -> svc_core::Result<(Self::Proof, OpCounter, Option<UpdateCounters>)> {
        let (p, ops) = self.proof_update(proof, index, batch, info)?;
        Ok((p, ops, None))
    }

    /// `(p, nu)` for backends whose counters obey the sublinear bounds.
    fn engine(&self) -> Option<(u8, Nu)> {
        None
    }

    /// Extra consistency checks on the owner's state.
    fn check_state(&self, _state: &Self::State) -> Result<(), String> {
        Ok(())
    }

    fn default_users(&self) -> usize {
        self.vector_len().min(1024)
    }
}

impl Backend for MerkleVc {
    fn random_message(rng: &mut ChaCha20Rng) -> Vec<u8> {
        let mut m = vec![0u8; 32];
        rng.fill(&mut m[..]);
        m
    }

    fn cost(ops: &OpCounter) -> u64 {
        ops.lookups
    }
}

impl Backend for KzgVc {
    fn random_message(rng: &mut ChaCha20Rng) -> Scalar {
        Scalar::rand(rng)
    }

    /// Opening without the dense table costs a full-size combination per
    /// user, so fewer users are sampled.
    fn default_users(&self) -> usize {
        if self.vector_len() <= DENSE_TABLE_LIMIT {
            self.vector_len()
        } else {
            4
        }
    }
}

impl Backend for AmtVc {
    fn random_message(rng: &mut ChaCha20Rng) -> Scalar {
        Scalar::rand(rng)
    }

    fn refresh(
        &self,
        proof: &amt::AmtProof,
        _: usize,
        batch: &UpdateBatch<Scalar>,
        info: &UpdateInfo<svc_core::G1Projective>,
    ) -> svc_core::Result<(amt::AmtProof, OpCounter, Option<UpdateCounters>)> {
        let (p, c) = amt::proof_update(self.params(), proof, batch, info)?;
        Ok((p, OpCounter { exps: c.digests, digests: c.digests, lookups: c.lookups, hashes: 0 }, Some(c)))
    }

    fn engine(&self) -> Option<(u8, Nu)> {
        Some((amt::LOCALITY, self.nu()))
    }
}

impl Backend for LatticeVc {
    fn random_message(rng: &mut ChaCha20Rng) -> u64 {
        rng.gen()
    }

    fn cost(ops: &OpCounter) -> u64 {
        ops.hashes
    }

    fn refresh(
        &self,
        proof: &lattice::HmtProof,
        _: usize,
        batch: &UpdateBatch<u64>,
        info: &UpdateInfo<lattice::NodeVector>,
    ) -> svc_core::Result<(lattice::HmtProof, OpCounter, Option<UpdateCounters>)> {
        let (p, c, steps) = lattice::proof_update(self.params(), proof, batch, info)?;
        Ok((p, OpCounter { exps: 0, digests: c.digests, lookups: c.lookups, hashes: steps }, Some(c)))
    }

    fn engine(&self) -> Option<(u8, Nu)> {
        Some((lattice::LOCALITY, self.nu()))
    }

    /// Every inner node equals the digit-wise sum of the partial digests
    /// of the leaves below it.
    fn check_state(&self, tree: &lattice::LatticeTree) -> Result<(), String> {
        let p = self.params();
        let h = tree.height();
        let m = tree.messages();
        let leaf_digests: Vec<Vec<lattice::NodeVector>> = (0..m.len())
            .into_par_iter()
            .map(|i| {
                (1..=h)
                    .map(|j| lattice::partial_digest(p, h, i, j, m[i], &mut OpCounter::default()).map_err(|e| e.to_string()))
                    .collect()
            })
            .collect::<Result<_, String>>()?;
        for path in all_paths(h).filter(|q| !q.is_root()) {
            let mut acc = vec![0u32; p.d()];
            for i in path.leaf_range(h) {
                for (a, b) in acc.iter_mut().zip(&leaf_digests[i as usize][path.depth() as usize - 1].0) {
                    *a += b;
                }
            }
            if tree.node(&path).0 != acc {
                return Err(format!("node {path} is not the sum of its partial digests"));
            }
        }
        Ok(())
    }
}

impl Backend for VerkleVc {
    fn random_message(rng: &mut ChaCha20Rng) -> Scalar {
        Scalar::rand(rng)
    }
}

/// What one batch cost, aggregated over the checked users.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub published: usize,
    pub info_bytes: usize,
    pub owner_ops: OpCounter,
    pub update_seconds: f64,
    pub users: usize,
    /// Worst per-proof cost.
    pub max_cost: u64,
    pub max_digests: u64,
    pub mean_proof_seconds: f64,
}

/// A committed vector that absorbs batches one after another.
pub struct Session<V: Backend>
where
    V::Node: PartialEq,
{
    pub vc: V,
    pub commitment: V::Commitment,
    pub state: V::State,
    pub messages: Vec<V::Message>,
}

impl<V: Backend> Session<V>
where
    V::Node: PartialEq,
{
    pub fn new(vc: V, rng: &mut ChaCha20Rng) -> Result<Self, E2eError> {
        let messages: Vec<V::Message> = (0..vc.vector_len()).map(|_| V::random_message(rng)).collect();
        let (commitment, state) = vc.commit(&messages)?;
        Ok(Self { vc, commitment, state, messages })
    }

    pub fn random_batch(&self, rng: &mut ChaCha20Rng, k: usize) -> Result<UpdateBatch<V::Message>, E2eError> {
        let n = self.messages.len();
        if k > n {
            return Err(E2eError::Param(format!("k = {k} exceeds N = {n}")));
        }
        let updates = sample(rng, n, k)
            .into_iter()
            .map(|i| Update::new(i, self.messages[i].clone(), V::random_message(rng)))
            .collect();
        Ok(UpdateBatch::new(updates)?)
    }

    /// Applies `batch`, then refreshes the proofs of `users` in parallel.
    /// Each refreshed proof must verify and, with `oracle`, equal a fresh
    /// opening on the new state.
    pub fn step(&mut self, batch: &UpdateBatch<V::Message>, users: &[usize], oracle: bool) -> Result<StepReport, E2eError> {
        let t0 = Instant::now();
        let out = self.vc.update(&self.commitment, &self.state, batch)?;
        let update_seconds = t0.elapsed().as_secs_f64();

        let bytes = out.info.to_bytes();
        match UpdateInfo::<V::Node>::from_bytes(&bytes) {
            Ok(back) if back == out.info => {}
            _ => return Err(failed("update information does not survive encoding")),
        }
        if let Some((p, nu)) = self.vc.engine() {
            check_published_bound(out.info.len(), self.vc.vector_len(), batch.len(), nu, p)?;
        }

        let per_user: Vec<(u64, u64, f64)> = users
            .par_iter()
            .map(|&x| {
                let old = self.vc.open(&self.state, x)?;
                let t = Instant::now();
                let (proof, ops, counters) =
                    self.vc.refresh(&old, x, batch, &out.info).map_err(|e| failed(format!("user {x}: {e}")))?;
                let secs = t.elapsed().as_secs_f64();
                let m = current(batch, &self.messages, x);
                if !self.vc.verify(&out.commitment, m, x, &proof) {
                    return Err(failed(format!("refreshed proof of user {x} does not verify")));
                }
                if oracle && proof != self.vc.open(&out.state, x)? {
                    return Err(failed(format!("refreshed proof of user {x} differs from a fresh opening")));
                }
                if let (Some(c), Some((p, nu))) = (counters, self.vc.engine()) {
                    verify_counters(&c, self.vc.vector_len(), batch.len(), nu, p).map_err(failed)?;
                }
                Ok((V::cost(&ops), ops.digests, secs))
            })
            .collect::<Result<_, E2eError>>()?;

        self.vc.check_state(&out.state).map_err(failed)?;
        let users_n = per_user.len();
        let report = StepReport {
            published: out.info.len(),
            info_bytes: bytes.len(),
            owner_ops: out.ops,
            update_seconds,
            users: users_n,
            max_cost: per_user.iter().map(|u| u.0).max().unwrap_or(0),
            max_digests: per_user.iter().map(|u| u.1).max().unwrap_or(0),
            mean_proof_seconds: if users_n == 0 { 0.0 } else { per_user.iter().map(|u| u.2).sum::<f64>() / users_n as f64 },
        };
        for u in batch {
            self.messages[u.index] = u.new.clone();
        }
        self.commitment = out.commitment;
        self.state = out.state;
        Ok(report)
    }
}

/// Message at `x` after `batch`.
fn current<'a, M>(batch: &'a UpdateBatch<M>, old: &'a [M], x: usize) -> &'a M {
    batch.get(x).map(|u| &u.new).unwrap_or(&old[x])
}

fn check_published_bound(published: usize, n: usize, k: usize, nu: Nu, p: u8) -> Result<(), E2eError> {
    let c = UpdateCounters { published, ..Default::default() };
    verify_counters(&c, n, k, nu, p).map_err(failed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct E2eConfig {
    pub backend: BackendId,
    pub n: usize,
    pub k: usize,
    pub nu: Nu,
    pub seed: u64,
    /// Verkle degree.
    pub c: usize,
    /// Number of users to check; `None` picks a backend default.
    pub users: Option<usize>,
    pub oracle: bool,
}

impl Default for E2eConfig {
    fn default() -> Self {
        Self { backend: BackendId::Amt, n: 1 << 10, k: 32, nu: Nu::HALF, seed: 1, c: 4, users: None, oracle: true }
    }
}

pub const MAX_PAIRING_N: usize = 1 << 16;
pub const MAX_LATTICE_N: usize = 1 << 8;
pub const MAX_MERKLE_N: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct E2eReport {
    pub config: E2eConfig,
    pub step: StepReport,
}

impl E2eReport {
    pub fn row(&self) -> Row {
        let key = match self.config.backend {
            BackendId::Verkle => self.config.c.to_string(),
            BackendId::Amt | BackendId::Lattice => self.config.nu.to_string(),
            BackendId::Merkle => "1".into(),
            BackendId::Kzg => "0".into(),
        };
        Row {
            nu_or_c: key,
            published_nodes: self.step.published as u64,
            update_info_bytes: self.step.info_bytes as f64,
            ops: self.step.max_cost,
            seconds: self.step.mean_proof_seconds,
        }
    }
}

fn check_bounds(cfg: &E2eConfig) -> Result<(), E2eError> {
    let param = |s: String| Err(E2eError::Param(s));
    let max = match cfg.backend {
        BackendId::Lattice => MAX_LATTICE_N,
        BackendId::Merkle => MAX_MERKLE_N,
        _ => MAX_PAIRING_N,
    };
    if cfg.n == 0 || cfg.n > max {
        return param(format!("N must be in 1..={max} for {}", cfg.backend.name()));
    }
    if cfg.backend != BackendId::Kzg && exact_log2(cfg.n).is_none() {
        return param(format!("N must be a power of two for {}", cfg.backend.name()));
    }
    if cfg.k > cfg.n {
        return param(format!("k = {} exceeds N = {}", cfg.k, cfg.n));
    }
    if cfg.users.is_some_and(|u| u > cfg.n) {
        return param("more users than entries".into());
    }
    Ok(())
}

fn drive<V: Backend>(vc: V, cfg: &E2eConfig, rng: &mut ChaCha20Rng) -> Result<StepReport, E2eError>
where
    V::Node: PartialEq,
{
    let mut s = Session::new(vc, rng)?;
    let batch = s.random_batch(rng, cfg.k)?;
    let n = cfg.n;
    let count = cfg.users.unwrap_or_else(|| s.vc.default_users());
    let users: Vec<usize> = if count >= n { (0..n).collect() } else { sample(rng, n, count).into_vec() };
    s.step(&batch, &users, cfg.oracle)
}

/// Deterministic for a fixed configuration, timings aside.
pub fn run(cfg: &E2eConfig) -> Result<E2eReport, E2eError> {
    check_bounds(cfg)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let seed = cfg.seed.to_le_bytes();
    let step = match cfg.backend {
        BackendId::Merkle => drive(MerkleVc::new(cfg.n)?, cfg, &mut rng)?,
        BackendId::Kzg => drive(KzgVc::new(cfg.n, &seed)?, cfg, &mut rng)?,
        BackendId::Amt => drive(AmtVc::new(cfg.n, &seed, cfg.nu)?, cfg, &mut rng)?,
        BackendId::Lattice => drive(LatticeVc::new(cfg.n, &seed, cfg.nu)?, cfg, &mut rng)?,
        BackendId::Verkle => drive(VerkleVc::new(cfg.n, cfg.c, &seed)?, cfg, &mut rng)?,
    };
    Ok(E2eReport { config: cfg.clone(), step })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(backend: BackendId, n: usize, k: usize) -> E2eConfig {
        E2eConfig { backend, n, k, ..Default::default() }
    }

    #[test]
    fn every_backend_runs_at_small_scale() {
        for b in [BackendId::Merkle, BackendId::Kzg, BackendId::Amt, BackendId::Lattice, BackendId::Verkle] {
            let r = run(&cfg(b, 16, 5)).unwrap();
            assert_eq!(r.step.users, 16, "{}", b.name());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg(BackendId::Lattice, 64, 8);
        let (a, b) = (run(&c).unwrap(), run(&c).unwrap());
        assert_eq!(a.row().published_nodes, b.row().published_nodes);
        assert_eq!(a.step.info_bytes, b.step.info_bytes);
        assert_eq!(a.step.max_cost, b.step.max_cost);
    }

    #[test]
    fn parameter_errors_exit_with_two() {
        let e = run(&cfg(BackendId::Lattice, 512, 1)).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(run(&cfg(BackendId::Amt, 12, 1)).unwrap_err().exit_code(), 2);
        assert_eq!(run(&cfg(BackendId::Merkle, 4, 5)).unwrap_err().exit_code(), 2);
        assert_eq!(run(&E2eConfig { c: 3, ..cfg(BackendId::Verkle, 16, 1) }).unwrap_err().exit_code(), 2);
        assert_eq!(E2eError::Verification("x".into()).exit_code(), 3);
    }
}
