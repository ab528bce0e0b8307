//! Published update information: a set of `(node path, new value)` pairs.
//!
//! Wire layout: `SVCUPD01 | u8 backend | u8 h | u32 count`, then per entry
//! `u8 depth | packed path | u16 len | value`, in canonical path order.

use std::convert::Infallible;
use std::fmt;

use crate::codec::Reader;
use crate::error::FormatError;
use crate::path::NodePath;

const MAGIC: &str = "SVCUPD01";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum BackendId {
    Merkle = 1,
    Kzg = 2,
    Amt = 3,
    Lattice = 4,
    Verkle = 5,
}

impl BackendId {
    pub fn from_u8(v: u8) -> Option<Self> {
        Some(match v {
            1 => Self::Merkle,
            2 => Self::Kzg,
            3 => Self::Amt,
            4 => Self::Lattice,
            5 => Self::Verkle,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Merkle => "merkle",
            Self::Kzg => "kzg",
            Self::Amt => "amt",
            Self::Lattice => "lattice",
            Self::Verkle => "verkle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Self::Merkle, Self::Kzg, Self::Amt, Self::Lattice, Self::Verkle].into_iter().find(|b| b.name() == s)
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value that can be published for a node.
pub trait NodeValue: Sized {
    const BACKEND: BackendId;
    fn encode_value(&self, out: &mut Vec<u8>);
    fn decode_value(bytes: &[u8]) -> Result<Self, FormatError>;
}

/// KZG never publishes anything.
impl NodeValue for Infallible {
    const BACKEND: BackendId = BackendId::Kzg;
    fn encode_value(&self, _: &mut Vec<u8>) {
        match *self {}
    }
    fn decode_value(_: &[u8]) -> Result<Self, FormatError> {
        Err(FormatError::InvalidValue("this backend publishes no node values".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateInfo<V> {
    height: u8,
    entries: Vec<(NodePath, V)>,
}

impl<V> UpdateInfo<V> {
    pub fn empty(height: u8) -> Self {
        Self { height, entries: Vec::new() }
    }

    /// Entries must be pairwise distinct; they are sorted here.
    pub fn from_entries(height: u8, mut entries: Vec<(NodePath, V)>) -> Result<Self, FormatError> {
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(FormatError::Unordered);
        }
        if entries.iter().any(|e| e.0.depth() > height) {
            return Err(FormatError::InvalidPath("entry deeper than tree height".into()));
        }
        Ok(Self { height, entries })
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(NodePath, V)] {
        &self.entries
    }

    pub fn paths(&self) -> impl Iterator<Item = NodePath> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// Binary search over the canonical order.
    pub fn get(&self, path: &NodePath) -> Option<&V> {
        self.entries.binary_search_by(|e| e.0.cmp(path)).ok().map(|i| &self.entries[i].1)
    }

    pub fn contains(&self, path: &NodePath) -> bool {
        self.get(path).is_some()
    }
}

impl<V: NodeValue> UpdateInfo<V> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let raw = RawUpdateInfo {
            backend: V::BACKEND as u8,
            height: self.height,
            entries: self
                .entries
                .iter()
                .map(|(p, v)| {
                    let mut buf = Vec::new();
                    v.encode_value(&mut buf);
                    (*p, buf)
                })
                .collect(),
        };
        raw.to_bytes()
    }

    pub fn encoded_len(&self) -> usize {
        self.to_bytes().len()
    }

    /// Fails when the backend byte does not match `V`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let raw = RawUpdateInfo::from_bytes(bytes)?;
        if raw.backend != V::BACKEND as u8 {
            return Err(FormatError::BackendMismatch { expected: V::BACKEND as u8, found: raw.backend });
        }
        let entries = raw
            .entries
            .into_iter()
            .map(|(p, v)| Ok((p, V::decode_value(&v)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(Self { height: raw.height, entries })
    }
}

/// Update information with undecoded values, for tooling that handles any
/// backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawUpdateInfo {
    pub backend: u8,
    pub height: u8,
    pub entries: Vec<(NodePath, Vec<u8>)>,
}

impl RawUpdateInfo {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(14 + self.entries.len() * 40);
        out.extend_from_slice(MAGIC.as_bytes());
        out.push(self.backend);
        out.push(self.height);
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for (p, v) in &self.entries {
            out.push(p.depth());
            p.pack(&mut out);
            assert!(v.len() <= u16::MAX as usize, "node value too long");
            out.extend_from_slice(&(v.len() as u16).to_le_bytes());
            out.extend_from_slice(v);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader::new(bytes);
        r.magic(MAGIC)?;
        let backend = r.u8()?;
        if BackendId::from_u8(backend).is_none() {
            return Err(FormatError::InvalidValue(format!("unknown backend id {backend}")));
        }
        let height = r.u8()?;
        let count = r.u32()? as usize;
        let mut entries: Vec<(NodePath, Vec<u8>)> = Vec::with_capacity(count.min(1 << 16));
        for _ in 0..count {
            let depth = r.u8()?;
            if depth > height {
                return Err(FormatError::InvalidPath(format!("depth {depth} exceeds height {height}")));
            }
            let path = NodePath::unpack(depth, r.take(NodePath::packed_len(depth))?)?;
            if entries.last().is_some_and(|(prev, _)| *prev >= path) {
                return Err(FormatError::Unordered);
            }
            let len = r.u16()? as usize;
            entries.push((path, r.take(len)?.to_vec()));
        }
        r.finish()?;
        Ok(Self { backend, height, entries })
    }
}
