use proptest::prelude::*;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use svc_core::merkle::{self, MerkleTree};
use svc_core::path::all_paths;
use svc_core::{Update, UpdateBatch};

#[test]
fn four_leaf_root_matches_frozen_digest() {
    // sha256 pairs over sha256([0]), .., sha256([3]), computed with hashlib.
    let t = MerkleTree::build(&(0..4u8).map(|i| vec![i]).collect::<Vec<_>>()).unwrap();
    assert_eq!(hex::encode(t.root()), "9675e04b4ba9dc81b06e81731e2d21caa2c95557a85dcfa3fff70c9ff0f30b2e");
    let solo = MerkleTree::build(&[b"solo".to_vec()]).unwrap();
    assert_eq!(hex::encode(solo.root()), "5364f2f2fc4f54e9d47ad29cfb08ef430c8153394bf2a0dff5cbe77a0ffef861");
}

fn scenario(seed: u64, log_n: u8) -> (Vec<Vec<u8>>, UpdateBatch<Vec<u8>>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = 1usize << log_n;
    let msgs: Vec<Vec<u8>> = (0..n).map(|_| (0..rng.gen_range(0..8)).map(|_| rng.gen()).collect()).collect();
    let k = rng.gen_range(0..=n);
    let batch = sample(&mut rng, n, k)
        .into_iter()
        .map(|i| {
            let mut new = msgs[i].clone();
            new.push(rng.gen());
            Update::new(i, msgs[i].clone(), new)
        })
        .collect();
    (msgs, UpdateBatch::new(batch).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn update_publishes_exactly_the_changed_nodes(seed in any::<u64>(), log_n in 0u8..=6) {
        let (msgs, batch) = scenario(seed, log_n);
        let t = MerkleTree::build(&msgs).unwrap();
        let (t2, info, _) = t.update(&batch).unwrap();
        let mut applied = msgs.clone();
        for u in &batch {
            applied[u.index] = u.new.clone();
        }
        prop_assert_eq!(&t2, &MerkleTree::build(&applied).unwrap());
        let changed: Vec<_> = all_paths(log_n).filter(|p| t.node(p) != t2.node(p)).collect();
        prop_assert_eq!(info.paths().collect::<Vec<_>>(), changed);
        // The changed set is the union of the updated leaves' root paths.
        let union: std::collections::BTreeSet<_> = batch
            .iter()
            .flat_map(|u| (0..=log_n).map(move |d| svc_core::NodePath::prefix_of_leaf(u.index as u64, log_n, d)))
            .collect();
        prop_assert_eq!(info.len(), union.len());
        for x in 0..msgs.len() {
            let (p, ops) = merkle::proof_update(&t.open(x).unwrap(), &info).unwrap();
            prop_assert_eq!(ops.lookups, log_n as u64);
            prop_assert_eq!(&p, &t2.open(x).unwrap());
            prop_assert!(merkle::verify(&t2.root(), &applied[x], x, &p));
        }
    }
}
