use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use svc_cli::analytic::{self, AnalyticInputs};
use svc_cli::config::Config;
use svc_cli::e2e::{self, E2eConfig, E2eError};
use svc_cli::measure::{self, BenchConfig};
use svc_cli::report::{self, Format};
use svc_cli::updinfo_json;
use svc_core::{BackendId, Nu};

#[derive(Parser)]
#[command(name = "svc", version, about = "Vector commitments with sublinear update information")]
struct Cli {
    /// key = value file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form cost tables for a full-size deployment.
    Analytic(AnalyticArgs),
    /// Commit, update and refresh proofs on one backend at desk scale.
    E2e(E2eArgs),
    /// Time AMT proof updates against the unit exponentiation cost.
    Bench(BenchArgs),
    /// Convert update information between JSON and the binary format.
    Updinfo {
        #[command(subcommand)]
        op: UpdinfoOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableId {
    #[value(name = "2")]
    Amt,
    #[value(name = "3")]
    Lattice,
    #[value(name = "4")]
    Verkle,
    Params,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(long, value_enum)]
    table: TableId,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    /// Verkle degree for the parameter size.
    #[arg(long)]
    c: Option<u64>,
    #[arg(long)]
    group_bytes: Option<f64>,
    #[arg(long)]
    hash_bytes: Option<f64>,
    /// Seconds per group exponentiation.
    #[arg(long)]
    t_exp: Option<f64>,
    /// Seconds per lattice hash evaluation.
    #[arg(long)]
    t_hash: Option<f64>,
}

#[derive(Args)]
struct E2eArgs {
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Trade-off exponent, as a decimal or a fraction like 1/3.
    #[arg(long)]
    nu: Option<Nu>,
    #[arg(long)]
    seed: Option<u64>,
    /// Verkle degree.
    #[arg(long)]
    c: Option<usize>,
    /// How many users to refresh; defaults to all of them at small N.
    #[arg(long)]
    users: Option<usize>,
    /// Skip comparing refreshed proofs with fresh openings.
    #[arg(long)]
    no_oracle: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    nu: Option<Nu>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    users: Option<usize>,
    /// Exponentiations timed for the unit cost.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum UpdinfoOp {
    /// JSON in, binary out.
    Encode {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Binary in, JSON out.
    Decode {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn param(e: impl std::fmt::Display) -> E2eError {
    E2eError::Param(e.to_string())
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, E2eError> {
    let mut buf = Vec::new();
    match path {
        Some(p) => buf = std::fs::read(p).map_err(|e| param(format!("{}: {e}", p.display())))?,
        None => _ = std::io::stdin().read_to_end(&mut buf).map_err(param)?,
    }
    Ok(buf)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), E2eError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| param(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(param),
    }
}

fn analytic(a: AnalyticArgs, cfg: &Config, format: Format) -> Result<String, E2eError> {
    cfg.check_keys(&["n", "k", "c", "group_bytes", "hash_bytes", "t_exp", "t_hash"]).map_err(param)?;
    let d = AnalyticInputs::default();
    let inputs = AnalyticInputs {
        n: cfg.pick(a.n, "n", d.n).map_err(param)?,
        k: cfg.pick(a.k, "k", d.k).map_err(param)?,
        c: cfg.pick(a.c, "c", d.c).map_err(param)?,
        group_bytes: cfg.pick(a.group_bytes, "group_bytes", d.group_bytes).map_err(param)?,
        hash_bytes: cfg.pick(a.hash_bytes, "hash_bytes", d.hash_bytes).map_err(param)?,
        t_exp: cfg.pick(a.t_exp, "t_exp", d.t_exp).map_err(param)?,
        t_hash: cfg.pick(a.t_hash, "t_hash", d.t_hash).map_err(param)?,
    };
    inputs.validate().map_err(param)?;
    let table = match a.table {
        TableId::Amt => analytic::table2(&inputs),
        TableId::Lattice => analytic::table3(&inputs),
        TableId::Verkle => analytic::table4(&inputs),
        TableId::Params => {
            let p = analytic::params(&inputs);
            return Ok(match format {
                Format::Json => serde_json::to_string_pretty(&p).expect("serializable") + "\n",
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.serialize(&p).expect("serializable");
                    String::from_utf8(w.into_inner().expect("in memory")).expect("utf-8")
                }
                Format::Human => format!(
                    "Public parameters\n  AMT (N = {}): {:.2} GB\n  Verkle (c = {}): {:.2} MB\n  [1] {}\n",
                    inputs.n,
                    p.amt_bytes / 1e9,
                    p.verkle_c,
                    p.verkle_bytes / 1e6,
                    analytic::params_footnote(&p)
                ),
            });
        }
    };
    Ok(report::render(&table, format))
}

fn run_e2e(a: E2eArgs, cfg: &Config, format: Format) -> Result<String, E2eError> {
    cfg.check_keys(&["backend", "n", "k", "nu", "seed", "c", "users"]).map_err(param)?;
    let d = E2eConfig::default();
    let backend_name = cfg.pick(a.backend, "backend", d.backend.name().to_string()).map_err(param)?;
    let backend = BackendId::from_name(&backend_name).ok_or_else(|| param(format!("unknown backend {backend_name}")))?;
    let users = match a.users {
        Some(u) => Some(u),
        None => cfg.get("users").map_err(param)?,
    };
    let c = E2eConfig {
        backend,
        n: cfg.pick(a.n, "n", d.n).map_err(param)?,
        k: cfg.pick(a.k, "k", d.k).map_err(param)?,
        nu: cfg.pick(a.nu, "nu", d.nu).map_err(param)?,
        seed: cfg.pick(a.seed, "seed", d.seed).map_err(param)?,
        c: cfg.pick(a.c, "c", d.c).map_err(param)?,
        users,
        oracle: !a.no_oracle,
    };
    let r = e2e::run(&c)?;
    let row = r.row();
    Ok(match format {
        Format::Csv => report::to_csv(&[row]),
        Format::Json => report::to_json(&[row]) + "\n",
        Format::Human => {
            let s = &r.step;
            format!(
                "{} N={} k={} nu={} c={} seed={}\n  published nodes   {}\n  update info bytes {}\n  owner ops         {} exps, {} hashes ({:.3} s)\n  refreshed proofs  {} ({}verified)\n  per-proof cost    max {} ops, max {} digests, mean {:.6} s\n",
                backend.name(),
                c.n,
                c.k,
                c.nu,
                c.c,
                c.seed,
                s.published,
                s.info_bytes,
                s.owner_ops.exps,
                s.owner_ops.hashes,
                s.update_seconds,
                s.users,
                if c.oracle { "matching fresh openings, " } else { "" },
                s.max_cost,
                s.max_digests,
                s.mean_proof_seconds,
            )
        }
    })
}

fn run_bench(a: BenchArgs, cfg: &Config, format: Format) -> Result<String, E2eError> {
    cfg.check_keys(&["n", "k", "nu", "seed", "users", "samples"]).map_err(param)?;
    let d = BenchConfig::default();
    let c = BenchConfig {
        n: cfg.pick(a.n, "n", d.n).map_err(param)?,
        k: cfg.pick(a.k, "k", d.k).map_err(param)?,
        nu: cfg.pick(a.nu, "nu", d.nu).map_err(param)?,
        seed: cfg.pick(a.seed, "seed", d.seed).map_err(param)?,
        users: cfg.pick(a.users, "users", d.users).map_err(param)?,
        exp_samples: cfg.pick(a.samples, "samples", d.exp_samples).map_err(param)?,
        ..d
    };
    let r = measure::run(&c)?;
    let row = report::Row {
        nu_or_c: r.nu.clone(),
        published_nodes: r.published as u64,
        update_info_bytes: r.update_info_bytes as f64,
        ops: r.users.iter().map(|u| u.digests).max().unwrap_or(0),
        seconds: r.mean_seconds(),
    };
    Ok(match format {
        Format::Csv => report::to_csv(&[row]),
        Format::Json => report::to_json(&[row]) + "\n",
        Format::Human => format!(
            "AMT proof update timing, N={} k={} nu={}\n  published nodes {}, update info {} bytes\n  one exponentiation {:.3e} s\n  mean digests per proof {:.1}, mean refresh {:.3e} s\n  measured / predicted = {:.3} ({} the {}x band)\n",
            r.n,
            r.k,
            r.nu,
            r.published,
            r.update_info_bytes,
            r.exp_seconds,
            r.mean_digests(),
            r.mean_seconds(),
            r.ratio,
            if r.within_band() { "inside" } else { "outside" },
            measure::RATIO_BAND,
        ),
    })
}

fn updinfo(op: UpdinfoOp) -> Result<(), E2eError> {
    match op {
        UpdinfoOp::Encode { input, output } => {
            let text = String::from_utf8(read_input(input.as_deref())?).map_err(param)?;
            let bytes = updinfo_json::encode(&text).map_err(param)?;
            write_output(output.as_deref(), &bytes)
        }
        UpdinfoOp::Decode { input, output } => {
            let doc = updinfo_json::decode(&read_input(input.as_deref())?).map_err(param)?;
            let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
            write_output(output.as_deref(), text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Human
    };
    let result = (|| {
        let cfg = match &cli.config {
            Some(p) => Config::load(p).map_err(param)?,
            None => Config::default(),
        };
        let out = match cli.command {
            Command::Analytic(a) => analytic(a, &cfg, format)?,
            Command::E2e(a) => run_e2e(a, &cfg, format)?,
            Command::Bench(a) => run_bench(a, &cfg, format)?,
            Command::Updinfo { op } => {
                updinfo(op)?;
                String::new()
            }
        };
        print!("{out}");
        Ok::<_, E2eError>(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("svc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
