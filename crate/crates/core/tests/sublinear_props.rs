use proptest::prelude::*;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use svc_core::path::all_paths;
use svc_core::sublinear::{plan, refresh_nodes, verify_counters, within_threshold, PartialDigestScheme};
use svc_core::{NodePath, Nu, Result, Update, UpdateBatch, UpdateInfo};

/// Toy homomorphic tree over integers: a node holds the sum of the leaves
/// under its `locality`-th ancestor.
struct SumTree {
    h: u8,
    p: u8,
}

impl SumTree {
    fn reference(&self, path: &NodePath) -> NodePath {
        path.ancestor(path.depth().saturating_sub(self.p))
    }

    fn value(&self, msgs: &[i64], path: &NodePath) -> i64 {
        let r = self.reference(path).leaf_range(self.h);
        msgs[r.start as usize..r.end as usize].iter().sum()
    }
}

impl PartialDigestScheme for SumTree {
    type Message = i64;
    type Node = i64;
    type Digest = i64;

    fn locality(&self) -> u8 {
        self.p
    }

    fn height(&self) -> u8 {
        self.h
    }

    fn partial_digest(&self, _: &NodePath, u: &Update<i64>) -> Result<i64> {
        Ok(u.new - u.old)
    }

    fn absorb(&self, node: &mut i64, d: i64) {
        *node += d;
    }
}

fn random_batch(rng: &mut ChaCha20Rng, msgs: &[i64], k: usize) -> UpdateBatch<i64> {
    let us = sample(rng, msgs.len(), k).into_iter().map(|i| Update::new(i, msgs[i], rng.gen_range(-50..50))).collect();
    UpdateBatch::new(us).unwrap()
}

fn nus() -> impl Strategy<Value = Nu> {
    prop_oneof![Just(Nu::ZERO), Just(Nu::new(1, 4).unwrap()), Just(Nu::HALF), Just(Nu::new(3, 4).unwrap()), Just(Nu::ONE)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// The recursion publishes exactly the nodes whose reference subtree
    /// holds more than the threshold.
    #[test]
    fn plan_matches_exhaustive_rule(seed in any::<u64>(), h in 0u8..=7, p in 0u8..=1, nu in nus()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 1usize << h;
        let k = rng.gen_range(0..=n);
        let batch = random_batch(&mut rng, &vec![0; n], k);
        let got = plan(h, p, &batch, nu);
        let tree = SumTree { h, p };
        let want: Vec<_> = all_paths(h)
            .filter(|q| !within_threshold(batch.count_within(tree.reference(q).leaf_range(h)), batch.len(), nu))
            .collect();
        prop_assert_eq!(got, want);
    }

    /// Refreshing every node of a random proof path reproduces the new tree
    /// and stays inside the size and cost bounds.
    #[test]
    fn refresh_is_correct_and_bounded(seed in any::<u64>(), h in 1u8..=12, p in 0u8..=1, nu in nus()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 1usize << h;
        let msgs: Vec<i64> = (0..n).map(|_| rng.gen_range(-50..50)).collect();
        let k = rng.gen_range(0..=n.min(600));
        let batch = random_batch(&mut rng, &msgs, k);
        let mut next = msgs.clone();
        for u in &batch {
            next[u.index] = u.new;
        }
        let tree = SumTree { h, p };
        let info = UpdateInfo::from_entries(h, plan(h, p, &batch, nu).into_iter().map(|q| (q, tree.value(&next, &q))).collect()).unwrap();
        for _ in 0..4 {
            let x = rng.gen_range(0..n);
            // p = 0 proofs carry siblings (hash trees); p = 1 proofs carry the path only.
            let mut nodes: Vec<(NodePath, i64)> = (0..=h)
                .flat_map(|d| {
                    let q = NodePath::prefix_of_leaf(x as u64, h, d);
                    if d == 0 || p == 1 { vec![q] } else { vec![q, q.sibling().unwrap()] }
                })
                .map(|q| (q, tree.value(&msgs, &q)))
                .collect();
            let c = refresh_nodes(&tree, &mut nodes, &batch, &info).unwrap();
            for (q, v) in &nodes {
                prop_assert_eq!(*v, tree.value(&next, q), "node {}", q);
            }
            verify_counters(&c, n, k, nu, p).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn threshold_is_exact_at_perfect_powers(b in 1usize..40, nu in nus()) {
        // k = b^den makes k^(1-nu) = b^(den-num) an integer.
        let den = nu.den();
        prop_assume!((b as u128).checked_pow(den).is_some_and(|k| k < 1 << 40));
        let k = (b as u128).pow(den) as usize;
        let t = (b as u128).pow(den - nu.num()) as usize;
        prop_assert!(within_threshold(t, k, nu));
        prop_assert!(!within_threshold(t + 1, k, nu));
    }
}

/// `k^(1-nu)` updates in each of `k^nu` equal blocks.
fn uniform_batch(h: u8, blocks: usize, per_block: usize) -> UpdateBatch<i64> {
    let n = 1usize << h;
    let width = n / blocks;
    let stride = width / per_block;
    let us = (0..blocks).flat_map(|b| (0..per_block).map(move |j| Update::new(b * width + j * stride, 0, 1))).collect();
    UpdateBatch::new(us).unwrap()
}

#[test]
fn uniform_spread_publishes_the_top_of_the_tree() {
    for (h, kv, kr, nu) in [(8u8, 4usize, 4usize, Nu::HALF), (10, 8, 8, Nu::HALF), (12, 16, 16, Nu::HALF), (10, 16, 4, Nu::new(2, 3).unwrap())] {
        let batch = uniform_batch(h, kv, kr);
        let k = batch.len();
        assert!(within_threshold(kr, k, nu) && !within_threshold(kr + 1, k, nu));
        // Count equal to the threshold passes, so p = 0 stops above the block roots.
        assert_eq!(plan(h, 0, &batch, nu).len(), kv - 1, "p=0 h={h}");
        assert_eq!(plan(h, 1, &batch, nu).len(), 2 * kv - 1, "p=1 h={h}");
    }
}

#[test]
fn one_extreme_publishes_everything_the_other_nothing() {
    let batch = uniform_batch(6, 4, 4);
    assert_eq!(plan(6, 0, &batch, Nu::ZERO).len(), 0);
    // At nu = 1 only nodes with two or more updates below are published.
    let at_one = plan(6, 0, &batch, Nu::ONE);
    let tree = SumTree { h: 6, p: 0 };
    assert!(at_one.iter().all(|q| batch.count_within(tree.reference(q).leaf_range(6)) >= 2));
    assert_eq!(at_one.len(), 7 + 4 * 2);
}
