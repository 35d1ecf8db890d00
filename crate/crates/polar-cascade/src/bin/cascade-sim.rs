//! Monte-Carlo simulation CLI for the BEC + deletion cascade.
//!
//! Runs a grid of (n, rate) cells, each averaging over seeded independent
//! trials, and writes one CSV row per cell. Progress goes to stderr; the
//! CSV goes to `--out` or stdout.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use polar_cascade::channel::DeletionMode;
use polar_cascade::polar::{AmbiguityPolicy, ScOptions};
use polar_cascade::sim::{
    emit_csv, render_csv, run_experiment, ExperimentConfig, ExperimentOptions, PrecodeKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecodeArg {
    Crc,
    RandomParity,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AmbiguousArg {
    Drop,
    Zero,
}

/// Monte-Carlo harness for polar coding over the BEC-deletion cascade.
#[derive(Debug, Parser)]
#[command(name = "cascade-sim", version, about)]
struct Args {
    /// Smallest block-length exponent n (N = 2^n).
    #[arg(long, default_value_t = 6)]
    n_min: u32,
    /// Largest block-length exponent n.
    #[arg(long, default_value_t = 11)]
    n_max: u32,
    /// Explicit exponent(s); overrides --n-min/--n-max. Repeatable.
    #[arg(long = "n")]
    n: Vec<u32>,
    /// BEC erasure probability.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Design rate R (k = ceil(R*N)). Repeatable.
    #[arg(long = "rate")]
    rate: Vec<f64>,
    /// Redundancy override; default is ceil(0.7*sqrt(N)).
    #[arg(long)]
    r: Option<usize>,
    /// Redundancy precoder.
    #[arg(long, value_enum, default_value_t = PrecodeArg::Crc)]
    precode: PrecodeArg,
    /// CRC generator override as r:hex (msb first, leading 1). Repeatable.
    #[arg(long = "crc-poly")]
    crc_poly: Vec<String>,
    /// Number of deletions d.
    #[arg(long, default_value_t = 1)]
    deletions: usize,
    /// Deletion position law: uniform | fixed:<i,...> (0-based) | sweep.
    #[arg(long, default_value = "uniform")]
    deletion_mode: String,
    /// Trials per grid cell.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Master seed; trial i uses the derived stream (seed, i).
    #[arg(long, default_value_t = 1729)]
    seed: u64,
    /// Handling of an erasure at an unfrozen position.
    #[arg(long, value_enum, default_value_t = AmbiguousArg::Drop)]
    ambiguous: AmbiguousArg,
    /// Drop candidates whose frozen bits decode to 1.
    #[arg(long)]
    prune_frozen_conflicts: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_deletion_mode(s: &str, d: usize) -> Result<DeletionMode> {
    match s {
        "uniform" => Ok(DeletionMode::UniformRandom),
        "sweep" => Ok(DeletionMode::SweepAll),
        other => {
            let Some(list) = other.strip_prefix("fixed:") else {
                bail!("unknown deletion mode {other:?}; expected uniform, sweep, or fixed:<i,...>");
            };
            let positions: Vec<usize> = list
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<usize>().context("bad fixed position"))
                .collect::<Result<_>>()?;
            if positions.len() != d {
                bail!(
                    "fixed:<...> lists {} positions but d = {d}",
                    positions.len()
                );
            }
            Ok(DeletionMode::FixedPositions(positions))
        }
    }
}

fn parse_crc_table(pairs: &[String]) -> Result<HashMap<usize, String>> {
    let mut table = HashMap::new();
    for pair in pairs {
        let (r, hex) = pair
            .split_once(':')
            .with_context(|| format!("--crc-poly {pair:?} is not of the form r:hex"))?;
        let r: usize = r.trim().parse().context("bad r in --crc-poly")?;
        table.insert(r, hex.trim().to_string());
    }
    Ok(table)
}

fn main() -> Result<()> {
    let args = Args::parse();

    let n_values = if args.n.is_empty() {
        if args.n_min > args.n_max {
            bail!("--n-min exceeds --n-max");
        }
        (args.n_min..=args.n_max).collect()
    } else {
        args.n.clone()
    };
    let rates = if args.rate.is_empty() {
        vec![0.5]
    } else {
        args.rate.clone()
    };

    let config = ExperimentConfig {
        n_values,
        p: args.p,
        rates,
        r_override: args.r,
        precode_kind: match args.precode {
            PrecodeArg::Crc => PrecodeKind::Crc,
            PrecodeArg::RandomParity => PrecodeKind::RandomParity,
            PrecodeArg::None => PrecodeKind::None,
        },
        crc_table: parse_crc_table(&args.crc_poly)?,
        d: args.deletions,
        deletion_mode: parse_deletion_mode(&args.deletion_mode, args.deletions)?,
        trials: args.trials,
        master_seed: args.seed,
        options: ExperimentOptions {
            sc: ScOptions {
                policy: match args.ambiguous {
                    AmbiguousArg::Drop => AmbiguityPolicy::Drop,
                    AmbiguousArg::Zero => AmbiguityPolicy::ZeroFill,
                },
                check_frozen_conflicts: args.prune_frozen_conflicts,
            },
        },
    };

    eprintln!(
        "cascade-sim: {} cells x {} trials, p={}, d={}, seed={}",
        config.n_values.len() * config.rates.len(),
        config.trials,
        config.p,
        config.d,
        config.master_seed,
    );
    let records = run_experiment(&config)?;
    for rec in &records {
        eprintln!(
            "  n={} N={} R={} r={} poly={} err_exact={:.4} err_inlist={:.4} ({:.1} ms/trial)",
            rec.n,
            rec.block_len,
            rec.rate,
            rec.r,
            if rec.crc_poly.is_empty() {
                "-"
            } else {
                &rec.crc_poly
            },
            rec.err_exact,
            rec.err_in_list,
            rec.ms_per_trial,
        );
    }

    match &args.out {
        Some(path) => emit_csv(&records, path)?,
        None => {
            let body = render_csv(&records)?;
            std::io::stdout().write_all(body.as_bytes())?;
        }
    }
    Ok(())
}
