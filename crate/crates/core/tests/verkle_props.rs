use std::collections::BTreeSet;
use std::sync::OnceLock;

use ark_ff::UniformRand;
use proptest::prelude::*;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use svc_core::verkle::{self, VerkleParams, VerkleProof, VerkleTree};
use svc_core::{NodePath, Scalar, Update, UpdateBatch};

fn params(c: usize) -> &'static VerkleParams {
    static P: OnceLock<Vec<VerkleParams>> = OnceLock::new();
    &P.get_or_init(|| [2, 4].iter().map(|c| VerkleParams::new(*c, b"verkle-props").unwrap()).collect())[c.trailing_zeros() as usize - 1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn proof_update_equals_fresh_opening(seed in any::<u64>(), c in prop_oneof![Just(2usize), Just(4)], log_n in 1u32..=6) {
        let params = params(c);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 1usize << (log_n - log_n % c.trailing_zeros());
        prop_assume!(n >= c);
        let m: Vec<Scalar> = (0..n).map(|_| Scalar::rand(&mut rng)).collect();
        let tree = VerkleTree::build(params, &m).unwrap();
        let h = tree.height() as u64;
        let k = rng.gen_range(0..=n);
        let batch = UpdateBatch::new(sample(&mut rng, n, k).into_iter().map(|i| Update::new(i, m[i], Scalar::rand(&mut rng))).collect()).unwrap();
        let (next, info, _) = tree.update(params, &batch).unwrap();
        prop_assert_eq!(&next, &VerkleTree::build(params, next.messages()).unwrap());

        // U is the union of the changed root-to-leaf paths.
        let bits = (h as u8) * c.trailing_zeros() as u8;
        let union: BTreeSet<NodePath> = batch
            .indices()
            .flat_map(|i| (0..=h as u8).map(move |j| NodePath::prefix_of_leaf(i as u64, bits, j * c.trailing_zeros() as u8)))
            .collect();
        prop_assert_eq!(info.paths().collect::<BTreeSet<_>>(), union);
        prop_assert!(info.len() as u64 <= k as u64 * h + 1);

        for x in (0..4).map(|_| rng.gen_range(0..n)) {
            let (old, ctx) = tree.open(params, x).unwrap();
            prop_assert!(verkle::verify(params, &tree.root(), &m[x], x, &old));
            let (p, _, ops) = verkle::proof_update(params, &ctx, &info).unwrap();
            prop_assert_eq!(&p, &next.open(params, x).unwrap().0);
            prop_assert!(verkle::verify(params, &next.root(), &next.messages()[x], x, &p));
            prop_assert!(ops.exps <= (c as u64 + 2) * h);
            prop_assert_eq!(VerkleProof::from_bytes(&p.to_bytes()).unwrap(), p);
        }
    }
}

#[test]
fn tampered_proofs_fail() {
    let params = params(4);
    let m: Vec<Scalar> = (0..16u64).map(Scalar::from).collect();
    let tree = VerkleTree::build(params, &m).unwrap();
    let (p, _) = tree.open(params, 9).unwrap();
    assert!(verkle::verify(params, &tree.root(), &m[9], 9, &p));
    assert!(!verkle::verify(params, &tree.root(), &m[8], 9, &p));
    assert!(!verkle::verify(params, &tree.root(), &m[9], 8, &p));
    let mut bad = p.clone();
    bad.d += params.srs().g1();
    assert!(!verkle::verify(params, &tree.root(), &m[9], 9, &bad));
}

#[test]
fn single_update_on_four_binary_leaves() {
    let params = params(2);
    let m: Vec<Scalar> = (0..4u64).map(Scalar::from).collect();
    let tree = VerkleTree::build(params, &m).unwrap();
    let (_, info, _) = tree.update(params, &UpdateBatch::new(vec![Update::new(3, m[3], Scalar::from(7u64))]).unwrap()).unwrap();
    let paths: Vec<String> = info.paths().map(|p| p.to_string()).collect();
    assert_eq!(paths, ["⊥", "⊥1", "⊥11"]);
}
