//! Closed-form cost estimates for a block of `k` updates over `N` accounts.

use crate::report::{Row, Table};

/// Defaults describe a 2^24-account state with 460 updates per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticInputs {
    pub n: u64,
    pub k: u64,
    /// Verkle degree used by the parameter-size estimate.
    pub c: u64,
    pub group_bytes: f64,
    /// Size of a lattice inner node.
    pub hash_bytes: f64,
    /// Seconds per group exponentiation.
    pub t_exp: f64,
    /// Seconds per lattice hash evaluation.
    pub t_hash: f64,
}

impl Default for AnalyticInputs {
    fn default() -> Self {
        Self { n: 1 << 24, k: 460, c: 256, group_bytes: 48.0, hash_bytes: 0.21e6, t_exp: 0.000665471, t_hash: 2.74e-3 }
    }
}

pub const NUS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const DEGREES: [u64; 5] = [2, 4, 16, 64, 256];

impl AnalyticInputs {
    pub fn validate(&self) -> Result<(), String> {
        if !self.n.is_power_of_two() || self.n < 2 {
            return Err(format!("N must be a power of two >= 2, got {}", self.n));
        }
        if self.k == 0 || self.k > self.n {
            return Err(format!("k must be in 1..=N, got {}", self.k));
        }
        let real = [self.group_bytes, self.hash_bytes, self.t_exp, self.t_hash];
        if real.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("sizes and timings must be positive".into());
        }
        if !self.c.is_power_of_two() || self.c < 2 {
            return Err(format!("c must be a power of two >= 2, got {}", self.c));
        }
        Ok(())
    }

    fn log_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    fn log_c_n(&self, c: u64) -> u32 {
        self.log_n().div_ceil(c.trailing_zeros())
    }
}

/// Ceiling that ignores float noise just above an integer.
fn ceil(x: f64) -> u64 {
    (x - 1e-9).ceil().max(0.0) as u64
}

fn nu_label(nu: f64) -> String {
    format!("{nu}")
}

/// Pairing-based homomorphic tree with `p = 1`.
pub fn table2(a: &AnalyticInputs) -> Table {
    let h = a.log_n() as f64;
    let k = a.k as f64;
    let rows = NUS
        .iter()
        .map(|&nu| {
            // At nu = 0 only the root is published and it needs no index.
            let (nodes, bytes) = if nu == 0.0 {
                (1, a.group_bytes)
            } else {
                let nodes = ceil(2.0 * k.powf(nu) * h);
                (nodes, nodes as f64 * (h / 8.0 + a.group_bytes))
            };
            let exps = if nu == 1.0 { 0 } else { ceil(k.powf(1.0 - nu) * h) };
            Row { nu_or_c: nu_label(nu), published_nodes: nodes, update_info_bytes: bytes, ops: exps, seconds: exps as f64 * a.t_exp }
        })
        .collect();
    Table {
        title: "Homomorphic Merkle tree over pairings (AMT), trade-off in nu".into(),
        key: "nu".into(),
        size_unit: ("kB".into(), 1e3),
        ops_label: "group exps".into(),
        rows,
        footnotes: vec![
            "nu = 0 publishes only the new root (one group element, no index); nu = 1 needs no exponentiations.".into(),
            format!("each published index costs log2(N)/8 = {} bytes.", h / 8.0),
        ],
    }
}

/// Lattice homomorphic tree with `p = 0`.
pub fn table3(a: &AnalyticInputs) -> Table {
    let h = a.log_n();
    let k = a.k as f64;
    let rows = NUS
        .iter()
        .map(|&nu| {
            let nodes = if nu == 0.0 { 1 } else { ceil(k.powf(nu)) * h as u64 };
            let evals = if nu == 1.0 {
                0
            } else {
                let t = ceil(k.powf(1.0 - nu));
                2 * (0..h as u64).map(|i| i * t.min(1 << i)).sum::<u64>()
            };
            Row {
                nu_or_c: nu_label(nu),
                published_nodes: nodes,
                update_info_bytes: nodes as f64 * a.hash_bytes,
                ops: evals,
                seconds: evals as f64 * a.t_hash,
            }
        })
        .collect();
    Table {
        title: "Lattice homomorphic Merkle tree, trade-off in nu".into(),
        key: "nu".into(),
        size_unit: ("MB".into(), 1e6),
        ops_label: "hash evals".into(),
        rows,
        footnotes: vec![
            "nu = 0 publishes only the new root; nu = 1 needs no hash evaluations.".into(),
            format!("inner nodes are {} MB each.", a.hash_bytes / 1e6),
        ],
    }
}

/// Verkle trees over the degrees in [`DEGREES`]. The proof size goes in
/// `published_nodes`' place in human output; the CSV keeps the common
/// column names and stores it in `published_nodes` as bytes.
pub fn table4(a: &AnalyticInputs) -> Table {
    let g = a.group_bytes;
    let rows = DEGREES
        .iter()
        .map(|&c| {
            let h = a.log_c_n(c) as u64;
            let proof = (h + 1) as f64 * g;
            let exps = (c + 2) * h;
            Row {
                nu_or_c: c.to_string(),
                published_nodes: proof as u64,
                update_info_bytes: (a.k * h) as f64 * (a.log_n() as f64 + g),
                ops: exps,
                seconds: exps as f64 * a.t_exp,
            }
        })
        .collect();
    Table {
        title: "Verkle trees, trade-off in the degree c (published_nodes column holds the proof size in bytes)".into(),
        key: "c".into(),
        size_unit: ("kB".into(), 1e3),
        ops_label: "group exps".into(),
        rows,
        footnotes: vec![
            format!("each published index costs log2(N) = {} bytes, unlike the AMT table.", a.log_n()),
            "c = 4 gives a 13-element proof of 624 B; the reference table lists 628 B.".into(),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ParamSizes {
    pub amt_bytes: f64,
    pub verkle_bytes: f64,
    pub verkle_c: u64,
}

/// `(2N log N + N)|G|` for AMT and `(c + c^2)|G|` for Verkle.
pub fn params(a: &AnalyticInputs) -> ParamSizes {
    let n = a.n as f64;
    let c = a.c as f64;
    ParamSizes {
        amt_bytes: (2.0 * n * a.log_n() as f64 + n) * a.group_bytes,
        verkle_bytes: (c + c * c) * a.group_bytes,
        verkle_c: a.c,
    }
}

pub const AMT_PARAMS_REFERENCE_GB: f64 = 36.46;

pub fn params_footnote(p: &ParamSizes) -> String {
    format!(
        "AMT parameters evaluate to {:.2} GB ({:.2} GiB); the reference figure is {AMT_PARAMS_REFERENCE_GB} GB.",
        p.amt_bytes / 1e9,
        p.amt_bytes / (1u64 << 30) as f64
    )
}
