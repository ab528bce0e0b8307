//! Binary node paths in a complete tree of height `h`.

use std::fmt;
use std::ops::Range;

use crate::error::FormatError;

/// Maximum supported tree height.
pub const MAX_HEIGHT: u8 = 63;

/// A root-to-node path `b_1 .. b_depth`, with `b_1` the most significant bit
/// of `bits`. Ordering is by depth first, then by the path read as an
/// integer, which is breadth-first left-to-right.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath {
    depth: u8,
    bits: u64,
}

impl NodePath {
    pub const ROOT: NodePath = NodePath { depth: 0, bits: 0 };

    pub fn new(depth: u8, bits: u64) -> Result<Self, FormatError> {
        if depth > MAX_HEIGHT {
            return Err(FormatError::InvalidPath(format!("depth {depth} exceeds {MAX_HEIGHT}")));
        }
        if depth < 64 && bits >> depth != 0 {
            return Err(FormatError::InvalidPath(format!("bits {bits:#x} do not fit depth {depth}")));
        }
        Ok(Self { depth, bits })
    }

    /// Path of the leaf holding `index` in a tree of height `h`.
    pub fn leaf(index: u64, h: u8) -> Self {
        debug_assert!(h <= MAX_HEIGHT && (index >> h) == 0);
        Self { depth: h, bits: index }
    }

    /// The depth-`len` ancestor of the leaf at `index`.
    pub fn prefix_of_leaf(index: u64, h: u8, len: u8) -> Self {
        Self::leaf(index, h).ancestor(len)
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    /// The path as an integer, equal to the node's index within its level.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_root(&self) -> bool {
        self.depth == 0
    }

    pub fn child(&self, bit: bool) -> Self {
        debug_assert!(self.depth < MAX_HEIGHT);
        Self { depth: self.depth + 1, bits: (self.bits << 1) | bit as u64 }
    }

    pub fn parent(&self) -> Option<Self> {
        (self.depth > 0).then(|| Self { depth: self.depth - 1, bits: self.bits >> 1 })
    }

    /// Ancestor at depth `len`; the node itself when `len >= depth`.
    pub fn ancestor(&self, len: u8) -> Self {
        if len >= self.depth {
            return *self;
        }
        Self { depth: len, bits: self.bits >> (self.depth - len) }
    }

    /// The node obtained by flipping the last bit.
    pub fn sibling(&self) -> Option<Self> {
        (self.depth > 0).then(|| Self { depth: self.depth, bits: self.bits ^ 1 })
    }

    /// The last bit `b_depth`. `None` at the root.
    pub fn last_bit(&self) -> Option<bool> {
        (self.depth > 0).then(|| self.bits & 1 == 1)
    }

    /// Bit `b_k` for `1 <= k <= depth`.
    pub fn bit(&self, k: u8) -> bool {
        debug_assert!(k >= 1 && k <= self.depth);
        (self.bits >> (self.depth - k)) & 1 == 1
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        self.depth <= other.depth && other.ancestor(self.depth) == *self
    }

    /// Leaf indices underneath this node in a tree of height `h`.
    pub fn leaf_range(&self, h: u8) -> Range<u64> {
        debug_assert!(self.depth <= h);
        let shift = h - self.depth;
        (self.bits << shift)..((self.bits + 1) << shift)
    }

    /// Bytes needed to pack the path bits.
    pub fn packed_len(depth: u8) -> usize {
        (depth as usize).div_ceil(8)
    }

    /// Path bits, MSB-first, padded with zeros in the final byte.
    pub fn pack(&self, out: &mut Vec<u8>) {
        let n = Self::packed_len(self.depth);
        if n == 0 {
            return;
        }
        let aligned = self.bits << (n * 8 - self.depth as usize);
        out.extend_from_slice(&aligned.to_be_bytes()[8 - n..]);
    }

    pub fn unpack(depth: u8, bytes: &[u8]) -> Result<Self, FormatError> {
        let n = Self::packed_len(depth);
        if bytes.len() != n {
            return Err(FormatError::InvalidPath("packed length mismatch".into()));
        }
        let mut buf = [0u8; 8];
        buf[8 - n..].copy_from_slice(bytes);
        let raw = u64::from_be_bytes(buf);
        let pad = n * 8 - depth as usize;
        if pad > 0 && raw & ((1u64 << pad) - 1) != 0 {
            return Err(FormatError::InvalidPath("nonzero padding bits".into()));
        }
        Self::new(depth, if pad == 64 { 0 } else { raw >> pad })
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⊥")?;
        for k in 1..=self.depth {
            f.write_str(if self.bit(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses the display form, `⊥` followed by the path bits.
impl std::str::FromStr for NodePath {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, FormatError> {
        let rest = s.strip_prefix('⊥').ok_or_else(|| FormatError::InvalidPath(s.into()))?;
        if rest.len() > MAX_HEIGHT as usize {
            return Err(FormatError::InvalidPath(s.into()));
        }
        let mut bits = 0u64;
        for ch in rest.chars() {
            bits = (bits << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(FormatError::InvalidPath(s.into())),
                };
        }
        Self::new(rest.len() as u8, bits)
    }
}

impl fmt::Debug for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Every node of a height-`h` tree in canonical order.
pub fn all_paths(h: u8) -> impl Iterator<Item = NodePath> {
    (0..=h).flat_map(|d| (0..(1u64 << d)).map(move |b| NodePath { depth: d, bits: b }))
}

/// `log2(n)` when `n` is a power of two.
pub fn exact_log2(n: usize) -> Option<u8> {
    (n.is_power_of_two()).then(|| n.trailing_zeros() as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parses_back() {
        for p in all_paths(4) {
            assert_eq!(p.to_string().parse::<NodePath>().unwrap(), p);
        }
        assert!("01".parse::<NodePath>().is_err());
        assert!("⊥012".parse::<NodePath>().is_err());
    }

    fn p(s: &str) -> NodePath {
        let mut n = NodePath::ROOT;
        for c in s.chars() {
            n = n.child(c == '1');
        }
        n
    }

    #[test]
    fn display_uses_bottom_prefix() {
        assert_eq!(NodePath::ROOT.to_string(), "⊥");
        assert_eq!(p("101").to_string(), "⊥101");
    }

    #[test]
    fn canonical_order_is_depth_then_index() {
        let mut v = vec![p("1"), p(""), p("00"), p("0"), p("11"), p("01")];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(s, ["⊥", "⊥0", "⊥1", "⊥00", "⊥01", "⊥11"]);
        assert_eq!(all_paths(2).collect::<Vec<_>>().len(), 7);
    }

    #[test]
    fn navigation() {
        let x = p("0110");
        assert_eq!(x.parent(), Some(p("011")));
        assert_eq!(x.sibling(), Some(p("0111")));
        assert_eq!(x.ancestor(2), p("01"));
        assert!(x.bit(2) && x.bit(3) && !x.bit(1) && !x.bit(4));
        assert!(p("01").is_prefix_of(&x) && !p("1").is_prefix_of(&x));
        assert_eq!(p("01").leaf_range(4), 4..8);
        assert_eq!(NodePath::leaf(5, 3), p("101"));
        assert_eq!(NodePath::ROOT.parent(), None);
    }

    #[test]
    fn packing_is_msb_first() {
        let mut out = Vec::new();
        p("101").pack(&mut out);
        assert_eq!(out, vec![0b1010_0000]);
        out.clear();
        p("111111110").pack(&mut out);
        assert_eq!(out, vec![0xff, 0x00]);
        assert_eq!(NodePath::unpack(9, &out).unwrap(), p("111111110"));
        assert!(NodePath::unpack(3, &[0b1011_0000]).is_err());
        assert_eq!(NodePath::unpack(0, &[]).unwrap(), NodePath::ROOT);
    }

    #[test]
    fn constructor_validates() {
        assert!(NodePath::new(2, 4).is_err());
        assert!(NodePath::new(64, 0).is_err());
        assert!(NodePath::new(3, 7).is_ok());
    }
}
