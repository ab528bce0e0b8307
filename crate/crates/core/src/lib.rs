//! Vector commitments whose owners publish compact update information,
//! letting users refresh membership proofs without the full vector.
//!
//! Backends: [`merkle`], [`kzg`], [`amt`] (pairing-based, locality one),
//! [`lattice`] (SIS hash tree, locality zero) and [`verkle`]. The
//! [`sublinear`] engine decides which nodes to publish for a tradeoff
//! parameter `nu` in `[0, 1]`.

mod codec;

pub mod amt;
pub mod batch;
pub mod error;
pub mod kzg;
pub mod lattice;
pub mod merkle;
pub mod pairing;
pub mod path;
pub mod poly;
pub mod sublinear;
pub mod updinfo;
pub mod vc;
pub mod verkle;

pub use batch::{Update, UpdateBatch};
pub use error::{FormatError, Result, VcError};
pub use pairing::{G1Projective, Scalar};
pub use path::NodePath;
pub use poly::DensePolynomial;
pub use sublinear::{Nu, UpdateCounters};
pub use updinfo::{BackendId, NodeValue, RawUpdateInfo, UpdateInfo};
pub use vc::{DynamicVc, OpCounter, UpdateOutcome};
