//! Wall-clock check of the AMT cost model: a proof update should take about
//! as long as its partial digests, each one group exponentiation.

use std::hint::black_box;
use std::time::Instant;

use ark_ff::UniformRand;
use rand::{seq::index::sample, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use svc_core::amt::{self, AmtTree, LagrangeAmtParams};
use svc_core::pairing::G1Affine;
use svc_core::path::exact_log2;
use svc_core::{Nu, Scalar, Update, UpdateBatch};

use crate::e2e::E2eError;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub n: usize,
    pub k: usize,
    pub nu: Nu,
    pub seed: u64,
    pub users: usize,
    /// Exponentiations timed to estimate the unit cost.
    pub exp_samples: usize,
    /// Minimum wall time spent repeating each user's refresh.
    pub min_seconds: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { n: 1 << 16, k: 460, nu: Nu::HALF, seed: 1, users: 16, exp_samples: 512, min_seconds: 0.05 }
    }
}

/// Acceptable band for measured / predicted time.
pub const RATIO_BAND: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UserTiming {
    pub index: usize,
    pub digests: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub k: usize,
    pub nu: String,
    pub published: usize,
    pub update_info_bytes: usize,
    pub exp_seconds: f64,
    pub users: Vec<UserTiming>,
    /// Total measured refresh time over total `digests * exp_seconds`.
    pub ratio: f64,
}

impl BenchReport {
    pub fn within_band(&self) -> bool {
        self.ratio <= RATIO_BAND && self.ratio >= 1.0 / RATIO_BAND
    }

    pub fn mean_digests(&self) -> f64 {
        self.users.iter().map(|u| u.digests as f64).sum::<f64>() / self.users.len().max(1) as f64
    }

    pub fn mean_seconds(&self) -> f64 {
        self.users.iter().map(|u| u.seconds).sum::<f64>() / self.users.len().max(1) as f64
    }
}

/// Mean time of `base * scalar` over random affine bases, single-threaded.
pub fn time_exponentiation(bases: &[G1Affine], samples: usize, rng: &mut ChaCha20Rng) -> f64 {
    let scalars: Vec<Scalar> = (0..samples).map(|_| Scalar::rand(rng)).collect();
    for s in scalars.iter().take(16) {
        let _ = black_box(bases[0] * s);
    }
    let t = Instant::now();
    for (i, s) in scalars.iter().enumerate() {
        let _ = black_box(bases[i % bases.len()] * s);
    }
    t.elapsed().as_secs_f64() / samples as f64
}

fn repeat_timed<T>(min_seconds: f64, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut runs = 0u32;
    let t = Instant::now();
    let mut out = f();
    runs += 1;
    while t.elapsed().as_secs_f64() < min_seconds {
        out = black_box(f());
        runs += 1;
    }
    (out, t.elapsed().as_secs_f64() / runs as f64)
}

/// Starts from the zero vector, so old proofs are all identity and the
/// only parameters needed are the updated bases and the users' paths.
pub fn run(cfg: &BenchConfig) -> Result<BenchReport, E2eError> {
    let n = cfg.n;
    exact_log2(n).ok_or_else(|| E2eError::Param(format!("N = {n} is not a power of two")))?;
    if cfg.k == 0 || cfg.k > n || cfg.users == 0 || cfg.users > n || cfg.exp_samples == 0 {
        return Err(E2eError::Param("need 1 <= k, users <= N and at least one sample".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let updated = sample(&mut rng, n, cfg.k).into_vec();
    let users = sample(&mut rng, n, cfg.users).into_vec();
    let params = LagrangeAmtParams::generate_subset(n, &cfg.seed.to_le_bytes(), &updated, &users)?;

    let tree = AmtTree::zero(n)?;
    let batch = UpdateBatch::new(updated.iter().map(|&i| Update::new(i, Scalar::from(0u64), Scalar::rand(&mut rng))).collect())?;
    let (next, info, _) = amt::update(&params, &tree, &batch, cfg.nu)?;

    let bases: Vec<G1Affine> = updated
        .iter()
        .take(64)
        .flat_map(|&i| params.basis(i).expect("generated").nonzero_nodes().map(|(_, g)| g).collect::<Vec<_>>())
        .collect();
    let exp_seconds = time_exponentiation(&bases, cfg.exp_samples, &mut rng);

    let mut timings = Vec::with_capacity(users.len());
    for &x in &users {
        let old = tree.open(x)?;
        let ((proof, counters), secs) = repeat_timed(cfg.min_seconds, || amt::proof_update(&params, &old, &batch, &info).expect("valid proof"));
        if !amt::verify(&params, &next.commitment(), &next.messages()[x], &proof) {
            return Err(E2eError::Verification(format!("refreshed proof of user {x} does not verify")));
        }
        timings.push(UserTiming { index: x, digests: counters.digests, seconds: secs });
    }
    let measured: f64 = timings.iter().map(|u| u.seconds).sum();
    let predicted: f64 = timings.iter().map(|u| u.digests as f64 * exp_seconds).sum();
    Ok(BenchReport {
        n,
        k: cfg.k,
        nu: cfg.nu.to_string(),
        published: info.len(),
        update_info_bytes: info.to_bytes().len(),
        exp_seconds,
        users: timings,
        ratio: if predicted > 0.0 { measured / predicted } else { f64::NAN },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_consistent() {
        let cfg = BenchConfig { n: 256, k: 32, users: 4, exp_samples: 64, min_seconds: 0.0, ..Default::default() };
        let r = run(&cfg).unwrap();
        assert_eq!(r.users.len(), 4);
        assert!(r.exp_seconds > 0.0);
        assert!(r.users.iter().map(|u| u.digests).sum::<u64>() > 0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(run(&BenchConfig { n: 100, ..Default::default() }).is_err());
        assert!(run(&BenchConfig { n: 16, k: 17, ..Default::default() }).is_err());
    }
}
