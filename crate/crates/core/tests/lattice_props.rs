use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use svc_core::lattice::{self, LatticeParams, LatticeTree, NodeVector, LOCALITY};
use svc_core::path::all_paths;
use svc_core::sublinear::verify_counters;
use svc_core::{NodePath, Nu, OpCounter, Update, UpdateBatch};

fn params() -> &'static LatticeParams {
    static P: OnceLock<LatticeParams> = OnceLock::new();
    P.get_or_init(|| LatticeParams::toy(b"lattice-props"))
}

fn nus() -> impl Strategy<Value = Nu> {
    prop_oneof![Just(Nu::ZERO), Just(Nu::HALF), Just(Nu::new(2, 3).unwrap()), Just(Nu::ONE)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hashes_are_linear_mod_q(seed in any::<u64>()) {
        let p = params();
        let q = p.q();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let d = p.d();
        let x: Vec<u32> = (0..2 * d).map(|_| rng.gen_range(0..q)).collect();
        let y: Vec<u32> = (0..2 * d).map(|_| rng.gen_range(0..q)).collect();
        let s: Vec<u32> = x.iter().zip(&y).map(|(a, b)| (a + b) % q).collect();
        let (fx, fy, fs) = (p.hash_leaf(&x).unwrap(), p.hash_leaf(&y).unwrap(), p.hash_leaf(&s).unwrap());
        prop_assert_eq!(fx.iter().zip(&fy).map(|(a, b)| (a + b) % q).collect::<Vec<_>>(), fs);

        let nv = |v: &[u32]| NodeVector(v.to_vec());
        let (a1, b1, a2, b2) = (nv(&x[..d]), nv(&x[d..]), nv(&y[..d]), nv(&y[d..]));
        let lhs: Vec<u32> = p.hash_pair(&a1, &b1).unwrap().iter().zip(p.hash_pair(&a2, &b2).unwrap()).map(|(a, b)| (a + b) % q).collect();
        prop_assert_eq!(lhs, p.hash_pair(&nv(&s[..d]), &nv(&s[d..])).unwrap());

        // g^-1 undoes the sum of binary expansions.
        let (u, v) = (&fx, &fy);
        let sum = NodeVector(p.decompose(u).0.iter().zip(&p.decompose(v).0).map(|(a, b)| a + b).collect());
        prop_assert_eq!(p.g_inverse(&sum), u.iter().zip(v).map(|(a, b)| (a + b) % q).collect::<Vec<_>>());
    }

    /// Every inner node is the entrywise sum of the partial digests of
    /// the leaves below it.
    #[test]
    fn nodes_are_sums_of_partial_digests(seed in any::<u64>(), h in 1u8..=4) {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m: Vec<u64> = (0..1 << h).map(|_| rng.gen()).collect();
        let tree = LatticeTree::build(p, &m).unwrap();
        for path in all_paths(h).filter(|q| !q.is_root()) {
            let mut acc = vec![0u32; p.d()];
            for i in path.leaf_range(h) {
                let v = lattice::partial_digest(p, h, i as usize, path.depth(), m[i as usize], &mut OpCounter::default()).unwrap();
                acc.iter_mut().zip(v.0).for_each(|(a, b)| *a += b);
            }
            prop_assert_eq!(tree.node(&path), &NodeVector(acc));
        }
    }

    #[test]
    fn updates_match_rebuild_and_proofs_stay_valid(seed in any::<u64>(), h in 1u8..=6, nu in nus()) {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 1usize << h;
        let m: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        let tree = LatticeTree::build(p, &m).unwrap();
        let k = rng.gen_range(0..=n);
        let batch = UpdateBatch::new(sample(&mut rng, n, k).into_iter().map(|i| Update::new(i, m[i], rng.gen())).collect()).unwrap();
        let (next, info, _) = lattice::update(p, &tree, &batch, nu).unwrap();
        prop_assert_eq!(&next, &LatticeTree::build(p, next.messages()).unwrap());
        let root = next.root_digest(p);
        for x in (0..6).map(|_| rng.gen_range(0..n)) {
            let (proof, c, _) = lattice::proof_update(p, &tree.open(x).unwrap(), &batch, &info).unwrap();
            prop_assert_eq!(&proof, &next.open(x).unwrap());
            prop_assert!(lattice::verify(p, &root, next.messages()[x], &proof));
            verify_counters(&c, n, k, nu, LOCALITY).map_err(TestCaseError::fail)?;
        }
    }
}

#[test]
fn oversized_digits_are_rejected() {
    let p = params();
    let tree = LatticeTree::build(p, &[1, 2, 3, 4]).unwrap();
    let root = tree.root_digest(p);
    let mut proof = tree.open(2).unwrap();
    assert!(lattice::verify(p, &root, 3, &proof));
    proof.pairs[1].0 .0[0] = 2;
    assert!(!lattice::verify(p, &root, 3, &proof));
}

#[test]
fn wrong_message_fails() {
    let p = params();
    let tree = LatticeTree::build(p, &[5, 6]).unwrap();
    let proof = tree.open(NodePath::leaf(1, 1).bits() as usize).unwrap();
    assert!(lattice::verify(p, &tree.root_digest(p), 6, &proof));
    assert!(!lattice::verify(p, &tree.root_digest(p), 7, &proof));
}
