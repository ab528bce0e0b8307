//! Choosing which tree nodes to publish after a batch, and refreshing proofs
//! from what was published plus partial digests.
//!
//! A node at depth `d` is judged by the number of updated leaves under its
//! ancestor at depth `max(d - p, 0)`, where `p` is the scheme's locality.
//! If that count is at most `k^(1 - nu)` the users can recompute the node
//! themselves from partial digests; otherwise it is published. Counts only
//! shrink going down, so the search stops at the first node that passes.

use std::fmt;
use std::str::FromStr;

use crate::batch::{Update, UpdateBatch};
use crate::error::{Result, VcError};
use crate::path::NodePath;
use crate::updinfo::UpdateInfo;

/// The tradeoff parameter as an exact fraction in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Nu {
    num: u32,
    den: u32,
}

impl Nu {
    pub const ZERO: Nu = Nu { num: 0, den: 1 };
    pub const HALF: Nu = Nu { num: 1, den: 2 };
    pub const ONE: Nu = Nu { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num > den {
            return Err(VcError::InvalidParameter(format!("nu = {num}/{den} is outside [0, 1]")));
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `a/b` or a terminating decimal such as `0.25`.
impl FromStr for Nu {
    type Err = VcError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || VcError::InvalidParameter(format!("cannot parse nu from {s:?}"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            return Nu::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 9 || !frac.bytes().all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        if num > den {
            return Err(bad());
        }
        Nu::new(num as u32, den as u32)
    }
}

/// `k^(1 - nu)` as a float, for reporting and bounds.
pub fn threshold(k: usize, nu: Nu) -> f64 {
    (k as f64).powf(1.0 - nu.as_f64())
}

/// Exact test of `count <= k^(1 - nu)`, i.e. `count^den <= k^(den - num)`.
/// Falls back to logarithms when the powers overflow 128 bits.
pub fn within_threshold(count: usize, k: usize, nu: Nu) -> bool {
    if count == 0 {
        return true;
    }
    let lhs = (count as u128).checked_pow(nu.den);
    let rhs = (k as u128).checked_pow(nu.den - nu.num);
    match (lhs, rhs) {
        (Some(a), Some(b)) => a <= b,
        _ => {
            let a = nu.den as f64 * (count as f64).ln();
            let b = (nu.den - nu.num) as f64 * (k as f64).ln();
            a <= b + 1e-12 * b.abs().max(1.0)
        }
    }
}

/// Depth of the node whose update count decides `path`.
fn reference(path: &NodePath, locality: u8) -> NodePath {
    path.ancestor(path.depth().saturating_sub(locality))
}

/// The published node set, in canonical order.
pub fn plan<M>(height: u8, locality: u8, batch: &UpdateBatch<M>, nu: Nu) -> Vec<NodePath> {
    let k = batch.len();
    let mut out = Vec::new();
    let mut frontier = vec![NodePath::ROOT];
    while let Some(node) = frontier.pop() {
        let count = batch.count_within(reference(&node, locality).leaf_range(height));
        if within_threshold(count, k, nu) {
            continue;
        }
        out.push(node);
        if node.depth() < height {
            frontier.push(node.child(true));
            frontier.push(node.child(false));
        }
    }
    out.sort();
    out
}

/// Every node that an update at `index` changes: those whose reference
/// ancestor lies above the leaf.
pub fn affected_paths(index: usize, height: u8, locality: u8) -> impl Iterator<Item = NodePath> {
    let leaf = NodePath::leaf(index as u64, height);
    (0..=height).flat_map(move |d| {
        let base = leaf.ancestor(d.saturating_sub(locality));
        let extra = d - base.depth();
        (0..1u64 << extra).map(move |tail| NodePath::new(d, (base.bits() << extra) | tail).unwrap())
    })
}

/// A homomorphic tree from the user's side: what partial digests are and
/// how they fold into a node.
pub trait PartialDigestScheme: Sync {
    type Message: Clone + PartialEq + Send + Sync;
    type Node: Clone + PartialEq + Send + Sync;
    type Digest;

    /// `p`: how many levels below a node a leaf may sit while still having
    /// a computable partial digest for it.
    fn locality(&self) -> u8;

    fn height(&self) -> u8;

    /// Contribution of `update` to the node at `path`. One call is one
    /// digest in the cost accounting.
    fn partial_digest(&self, path: &NodePath, update: &Update<Self::Message>) -> Result<Self::Digest>;

    fn absorb(&self, node: &mut Self::Node, digest: Self::Digest);
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdateCounters {
    pub published: usize,
    /// Partial digests applied to one proof.
    pub digests: u64,
    pub lookups: u64,
    /// Most digests applied to any single proof node.
    pub max_node_digests: u64,
}

impl UpdateCounters {
    /// Combines counters from several proofs, keeping per-proof maxima.
    pub fn merge_max(&mut self, o: &UpdateCounters) {
        self.published = self.published.max(o.published);
        self.digests = self.digests.max(o.digests);
        self.lookups = self.lookups.max(o.lookups);
        self.max_node_digests = self.max_node_digests.max(o.max_node_digests);
    }
}

/// Brings each `(path, value)` of a proof up to date: published values
/// replace the old ones, all others absorb the partial digests of the
/// updates under their reference ancestor.
pub fn refresh_nodes<S: PartialDigestScheme>(
    scheme: &S,
    nodes: &mut [(NodePath, S::Node)],
    batch: &UpdateBatch<S::Message>,
    info: &UpdateInfo<S::Node>,
) -> Result<UpdateCounters> {
    let h = scheme.height();
    if info.height() != h {
        return Err(VcError::InvalidParameter(format!("update info height {} != tree height {h}", info.height())));
    }
    let mut c = UpdateCounters { published: info.len(), ..Default::default() };
    for (path, value) in nodes.iter_mut() {
        c.lookups += 1;
        if let Some(v) = info.get(path) {
            *value = v.clone();
            continue;
        }
        let under = batch.within(reference(path, scheme.locality()).leaf_range(h));
        for u in under {
            let d = scheme.partial_digest(path, u)?;
            scheme.absorb(value, d);
        }
        c.digests += under.len() as u64;
        c.max_node_digests = c.max_node_digests.max(under.len() as u64);
    }
    Ok(c)
}

/// Checks the size and cost bounds:
/// published `<= 2^p k^nu log2 N + 2^p` and digests `<= k^(1-nu) (h + 1)`.
pub fn verify_counters(c: &UpdateCounters, n: usize, k: usize, nu: Nu, locality: u8) -> std::result::Result<(), String> {
    let h = n.trailing_zeros() as f64;
    let fan = (1u64 << locality) as f64;
    let kf = k as f64;
    let slack = 1e-9;
    let pub_bound = fan * kf.powf(nu.as_f64()) * h + fan;
    if k == 0 {
        if c.published != 0 || c.digests != 0 {
            return Err("empty batch must publish nothing and need no digests".into());
        }
        return Ok(());
    }
    if c.published as f64 > pub_bound + slack {
        return Err(format!("published {} nodes, bound {pub_bound:.3}", c.published));
    }
    let theta = threshold(k, nu);
    let dig_bound = theta * (h + 1.0);
    if c.digests as f64 > dig_bound * (1.0 + slack) + slack {
        return Err(format!("{} digests for one proof, bound {dig_bound:.3}", c.digests));
    }
    if c.max_node_digests as f64 > theta * (1.0 + slack) + slack {
        return Err(format!("{} digests on one node, threshold {theta:.3}", c.max_node_digests));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(ix: &[usize]) -> UpdateBatch<u8> {
        UpdateBatch::new(ix.iter().map(|&i| Update::new(i, 0, 1)).collect()).unwrap()
    }

    fn names(v: &[NodePath]) -> Vec<String> {
        v.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn parse_and_reduce() {
        assert_eq!("1/2".parse::<Nu>().unwrap(), Nu::HALF);
        assert_eq!("0.5".parse::<Nu>().unwrap(), Nu::HALF);
        assert_eq!("2/4".parse::<Nu>().unwrap(), Nu::HALF);
        assert_eq!("0.25".parse::<Nu>().unwrap(), Nu::new(1, 4).unwrap());
        assert_eq!("1".parse::<Nu>().unwrap(), Nu::ONE);
        assert_eq!("0".parse::<Nu>().unwrap(), Nu::ZERO);
        assert_eq!(".75".parse::<Nu>().unwrap(), Nu::new(3, 4).unwrap());
        for bad in ["1.5", "3/2", "x", "", "1/0", "-0.5", "."] {
            assert!(bad.parse::<Nu>().is_err(), "{bad}");
        }
        assert_eq!(Nu::new(3, 4).unwrap().to_string(), "3/4");
    }

    #[test]
    fn exact_threshold_on_perfect_powers() {
        // sqrt(4) = 2 exactly: 2 passes, 3 does not.
        assert!(within_threshold(2, 4, Nu::HALF));
        assert!(!within_threshold(3, 4, Nu::HALF));
        assert!(within_threshold(1, 3, Nu::HALF));
        assert!(!within_threshold(2, 3, Nu::HALF));
        assert!(within_threshold(460, 460, Nu::ZERO));
        assert!(!within_threshold(2, 460, Nu::ONE));
        assert!(within_threshold(1, 460, Nu::ONE));
        // 16^(1/4) = 2
        assert!(within_threshold(2, 16, Nu::new(3, 4).unwrap()));
        assert!(!within_threshold(3, 16, Nu::new(3, 4).unwrap()));
    }

    #[test]
    fn float_fallback_agrees_on_huge_exponents() {
        let nu = Nu::new(1, 1000).unwrap();
        assert!(within_threshold(100, 1000, nu));
        assert!(!within_threshold(1000, 1000, Nu::new(999, 1000).unwrap()));
    }

    #[test]
    fn empty_batch_publishes_nothing() {
        assert!(plan(3, 0, &batch(&[]), Nu::HALF).is_empty());
        assert!(plan(3, 1, &batch(&[]), Nu::ONE).is_empty());
    }

    #[test]
    fn eight_leaves_three_updates() {
        let b = batch(&[0, 1, 5]);
        assert_eq!(names(&plan(3, 0, &b, Nu::HALF)), ["⊥", "⊥0", "⊥00"]);
        assert_eq!(names(&plan(3, 1, &b, Nu::HALF)), ["⊥", "⊥0", "⊥1", "⊥00", "⊥01", "⊥000", "⊥001"]);
    }

    #[test]
    fn nu_one_publishes_every_node_with_two_or_more_below() {
        let b = batch(&[0, 3]);
        assert_eq!(names(&plan(2, 0, &b, Nu::ONE)), ["⊥"]);
        assert_eq!(names(&plan(2, 1, &b, Nu::ONE)), ["⊥", "⊥0", "⊥1"]);
    }

    #[test]
    fn nu_zero_publishes_nothing() {
        assert!(plan(4, 1, &batch(&[0, 1, 2, 3, 9]), Nu::ZERO).is_empty());
    }

    #[test]
    fn affected_paths_by_locality() {
        let p0: Vec<_> = affected_paths(5, 3, 0).collect();
        assert_eq!(names(&p0), ["⊥", "⊥1", "⊥10", "⊥101"]);
        let p1: Vec<_> = affected_paths(5, 3, 1).collect();
        assert_eq!(names(&p1), ["⊥", "⊥0", "⊥1", "⊥10", "⊥11", "⊥100", "⊥101"]);
    }

    #[test]
    fn counter_bounds() {
        let ok = UpdateCounters { published: 10, digests: 5, lookups: 4, max_node_digests: 2 };
        assert!(verify_counters(&ok, 8, 4, Nu::HALF, 1).is_ok());
        let bad = UpdateCounters { max_node_digests: 3, ..ok };
        assert!(verify_counters(&bad, 8, 4, Nu::HALF, 1).is_err());
        let none = UpdateCounters::default();
        assert!(verify_counters(&none, 8, 0, Nu::HALF, 0).is_ok());
    }
}
