//! Monte-Carlo experiment harness: runs the (n, rate) grid, aggregates
//! per-trial outcomes into records, and emits machine-readable CSV.
//!
//! Trials within a cell are independent and run in parallel; the aggregate
//! counters are a commutative sum, so records are identical for any thread
//! count.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::simulation_r;
use crate::channel::{
    bec_transmit, cascade_transmit, delete_symbols, BecParams, ChannelError, DeletionMode,
    DeletionParams, TrialRng,
};
use crate::listdec::{decode_received, DecodeError};
use crate::polar::{construct_code, polar_encode, PolarCodeSpec, PolarError, ScOptions};
use crate::precode::{default_generator_hex, CrcSpec, Precode, PrecodeError, RandomParitySpec};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cell n={n} rate={rate}: {message}")]
    InvalidCell { n: u32, rate: f64, message: String },
    #[error("experiment grid is empty")]
    EmptyGrid,
    #[error("no records to write")]
    NoRecords,
    #[error("trial {trial} in cell n={n} rate={rate} failed: {message}")]
    TrialFailed {
        n: u32,
        rate: f64,
        trial: u64,
        message: String,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Precode(#[from] PrecodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecodeKind {
    Crc,
    RandomParity,
    None,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExperimentOptions {
    pub sc: ScOptions,
}

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Block-length exponents n; N = 2^n.
    pub n_values: Vec<u32>,
    pub p: f64,
    /// Design rates R; k = ⌈R·N⌉.
    pub rates: Vec<f64>,
    /// Explicit redundancy; default is `simulation_r(N)`.
    pub r_override: Option<usize>,
    pub precode_kind: PrecodeKind,
    /// Per-r generator overrides (hex, msb first, leading 1 included).
    pub crc_table: HashMap<usize, String>,
    pub d: usize,
    pub deletion_mode: DeletionMode,
    pub trials: u64,
    pub master_seed: u64,
    pub options: ExperimentOptions,
}

impl ExperimentConfig {
    /// The default grid: n = 6..11, p = 0.3, R = 0.5, 1000 trials.
    pub fn grid_default() -> Self {
        Self {
            n_values: (6..=11).collect(),
            p: 0.3,
            rates: vec![0.5],
            r_override: None,
            precode_kind: PrecodeKind::Crc,
            crc_table: HashMap::new(),
            d: 1,
            deletion_mode: DeletionMode::UniformRandom,
            trials: 1000,
            master_seed: 1729,
            options: ExperimentOptions::default(),
        }
    }
}

/// Aggregated statistics for one (n, rate) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub n: u32,
    pub block_len: usize,
    pub rate: f64,
    pub k: usize,
    pub r: usize,
    pub p: f64,
    pub d: usize,
    /// Number of evaluated (trial, position-set) combinations; equals the
    /// configured trial count except in sweep mode.
    pub trials: u64,
    pub master_seed: u64,
    /// Fraction of combinations where the survivor set is not exactly the
    /// true message (post-check "list of size 1" metric).
    pub err_exact: f64,
    /// Fraction of combinations where the true word is absent from the list.
    pub err_in_list: f64,
    pub avg_list: f64,
    pub avg_survivors: f64,
    pub drops_ambiguous: u64,
    pub drops_conflict: u64,
    pub ms_per_trial: f64,
    /// Generator polynomial actually used (hex), empty unless CRC precoding.
    pub crc_poly: String,
}

/// One fully-resolved cell, ready to run trials against.
#[derive(Debug, Clone)]
pub struct CellConfig {
    pub n: u32,
    pub rate: f64,
    pub spec: PolarCodeSpec,
    pub precode: Precode,
    pub k: usize,
    pub r: usize,
    pub p: f64,
    pub d: usize,
    pub deletion_mode: DeletionMode,
    pub master_seed: u64,
    pub sc: ScOptions,
    pub crc_poly: String,
}

/// Raw counters from one trial (summed over position-set combinations in
/// sweep mode).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub combos: u64,
    pub true_in_list: u64,
    pub exact_recovery: u64,
    pub list_size_sum: u64,
    pub survivor_sum: u64,
    pub ambiguous: u64,
    pub frozen_conflicts: u64,
    pub micros: u64,
}

impl TrialOutcome {
    fn add(mut self, other: &TrialOutcome) -> TrialOutcome {
        self.combos += other.combos;
        self.true_in_list += other.true_in_list;
        self.exact_recovery += other.exact_recovery;
        self.list_size_sum += other.list_size_sum;
        self.survivor_sum += other.survivor_sum;
        self.ambiguous += other.ambiguous;
        self.frozen_conflicts += other.frozen_conflicts;
        self.micros += other.micros;
        self
    }
}

fn cell_error(n: u32, rate: f64, message: impl Into<String>) -> SimError {
    SimError::InvalidCell {
        n,
        rate,
        message: message.into(),
    }
}

/// Resolve one (n, rate) cell of the config: code construction, redundancy,
/// and precoder. All configuration problems surface here, before any trial.
pub fn build_cell(config: &ExperimentConfig, n: u32, rate: f64) -> Result<CellConfig, SimError> {
    let block_len = 1usize << n;
    if !(config.p > 0.0 && config.p < 1.0) {
        return Err(cell_error(
            n,
            rate,
            format!("p = {} outside (0, 1)", config.p),
        ));
    }
    if !(rate > 0.0 && rate < 1.0 - config.p) {
        return Err(cell_error(
            n,
            rate,
            format!("rate outside (0, {})", 1.0 - config.p),
        ));
    }
    if config.trials == 0 {
        return Err(cell_error(n, rate, "trials must be at least 1"));
    }
    let k = (rate * block_len as f64).ceil() as usize;
    let r = match config.precode_kind {
        PrecodeKind::None => 0,
        _ => config.r_override.unwrap_or_else(|| simulation_r(block_len)),
    };
    if k + r > block_len {
        return Err(cell_error(
            n,
            rate,
            format!("k + r = {} exceeds N = {block_len}", k + r),
        ));
    }
    if config.d > block_len {
        return Err(cell_error(
            n,
            rate,
            format!("d = {} exceeds N = {block_len}", config.d),
        ));
    }
    if let DeletionMode::FixedPositions(positions) = &config.deletion_mode {
        if positions.len() != config.d {
            return Err(cell_error(n, rate, "fixed position count differs from d"));
        }
        if positions.iter().any(|&p| p >= block_len) {
            return Err(cell_error(n, rate, "fixed position out of range"));
        }
    }
    let mut crc_poly = String::new();
    let precode = match config.precode_kind {
        PrecodeKind::None => Precode::None,
        PrecodeKind::Crc => {
            let hex = config
                .crc_table
                .get(&r)
                .cloned()
                .unwrap_or_else(|| default_generator_hex(r));
            let spec = CrcSpec::from_hex(&hex)
                .map_err(|e| cell_error(n, rate, format!("bad CRC generator {hex:?}: {e}")))?;
            if spec.degree() != r {
                return Err(cell_error(
                    n,
                    rate,
                    format!("generator {hex} has degree {}, expected {r}", spec.degree()),
                ));
            }
            crc_poly = hex;
            Precode::Crc(spec)
        }
        PrecodeKind::RandomParity => {
            Precode::RandomParity(RandomParitySpec::draw(k, r, config.master_seed))
        }
    };
    let spec = construct_code(block_len, config.p, k + r)?;
    Ok(CellConfig {
        n,
        rate,
        spec,
        precode,
        k,
        r,
        p: config.p,
        d: config.d,
        deletion_mode: config.deletion_mode.clone(),
        master_seed: config.master_seed,
        sc: config.options.sc,
        crc_poly,
    })
}

fn classify(
    cell: &CellConfig,
    received: &[crate::symbol::Symbol],
    coded: &[bool],
    message: &[bool],
    out: &mut TrialOutcome,
) -> Result<(), DecodeError> {
    let outcome = decode_received(received, &cell.spec, &cell.precode, cell.d, cell.sc)?;
    out.combos += 1;
    if outcome.list.iter().any(|entry| entry.word == coded) {
        out.true_in_list += 1;
    }
    let exact = outcome.survivors.len() == 1
        && outcome.list[outcome.survivors[0]].word == coded
        && outcome.selected.as_deref() == Some(message);
    if exact {
        out.exact_recovery += 1;
    }
    out.list_size_sum += outcome.list.len() as u64;
    out.survivor_sum += outcome.survivors.len() as u64;
    out.ambiguous += outcome.counters.ambiguous as u64;
    out.frozen_conflicts += outcome.counters.frozen_conflicts as u64;
    Ok(())
}

/// Run one trial of a cell. Deterministic in `(master_seed, trial_index)`.
///
/// Sweep mode evaluates every d-subset of deletion positions against a
/// single erasure draw and counts each combination separately.
pub fn run_trial(cell: &CellConfig, trial_index: u64) -> Result<TrialOutcome, SimError> {
    let started = Instant::now();
    let mut rng = TrialRng::new(cell.master_seed, trial_index).stream();
    let message: Vec<bool> = (0..cell.k).map(|_| rng.gen()).collect();
    let coded = cell.precode.attach(&message);
    let x = polar_encode(&coded, &cell.spec)?;
    let bec = BecParams { p: cell.p };

    let fail = |message: String| SimError::TrialFailed {
        n: cell.n,
        rate: cell.rate,
        trial: trial_index,
        message,
    };
    let channel_fail = |e: ChannelError| fail(e.to_string());
    let decode_fail = |e: DecodeError| fail(e.to_string());

    let mut out = TrialOutcome::default();
    match &cell.deletion_mode {
        DeletionMode::SweepAll => {
            let y = bec_transmit(&x, &bec, &mut rng);
            for positions in (0..cell.spec.block_len()).combinations(cell.d) {
                let received = delete_symbols(&y, &positions).map_err(channel_fail)?;
                classify(cell, &received, &coded, &message, &mut out).map_err(decode_fail)?;
            }
        }
        mode => {
            let del = DeletionParams {
                d: cell.d,
                mode: mode.clone(),
            };
            let (received, _positions) =
                cascade_transmit(&x, &bec, &del, &mut rng).map_err(channel_fail)?;
            classify(cell, &received, &coded, &message, &mut out).map_err(decode_fail)?;
        }
    }
    out.micros = started.elapsed().as_micros() as u64;
    Ok(out)
}

/// Run the whole (n, rate) grid and aggregate each cell into a record.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, SimError> {
    if config.n_values.is_empty() || config.rates.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    let mut records = Vec::new();
    for &n in &config.n_values {
        for &rate in &config.rates {
            let cell = build_cell(config, n, rate)?;
            let total = (0..config.trials)
                .into_par_iter()
                .map(|trial| run_trial(&cell, trial))
                .try_reduce(TrialOutcome::default, |a, b| Ok(a.add(&b)))?;
            let combos = total.combos as f64;
            records.push(ExperimentRecord {
                n,
                block_len: cell.spec.block_len(),
                rate,
                k: cell.k,
                r: cell.r,
                p: cell.p,
                d: cell.d,
                trials: total.combos,
                master_seed: cell.master_seed,
                err_exact: 1.0 - total.exact_recovery as f64 / combos,
                err_in_list: 1.0 - total.true_in_list as f64 / combos,
                avg_list: total.list_size_sum as f64 / combos,
                avg_survivors: total.survivor_sum as f64 / combos,
                drops_ambiguous: total.ambiguous,
                drops_conflict: total.frozen_conflicts,
                ms_per_trial: total.micros as f64 / 1000.0 / config.trials as f64,
                crc_poly: cell.crc_poly.clone(),
            });
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "n,N,rate,k,r,p,d,trials,seed,err_exact,err_inlist,avg_list,avg_survivors,drops_ambiguous,drops_conflict,ms_per_trial";

/// Render records as CSV: the fixed header, one row per record, fractions
/// with 6 decimal places. Byte-deterministic for identical records.
pub fn render_csv(records: &[ExperimentRecord]) -> Result<String, SimError> {
    if records.is_empty() {
        return Err(SimError::NoRecords);
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{:.3}\n",
            rec.n,
            rec.block_len,
            rec.rate,
            rec.k,
            rec.r,
            rec.p,
            rec.d,
            rec.trials,
            rec.master_seed,
            rec.err_exact,
            rec.err_in_list,
            rec.avg_list,
            rec.avg_survivors,
            rec.drops_ambiguous,
            rec.drops_conflict,
            rec.ms_per_trial,
        ));
    }
    Ok(out)
}

/// Write the CSV to a file. Nothing is created when `records` is empty.
pub fn emit_csv(records: &[ExperimentRecord], out_path: &Path) -> Result<(), SimError> {
    let body = render_csv(records)?;
    let mut file = std::fs::File::create(out_path).map_err(|source| SimError::Io {
        path: out_path.display().to_string(),
        source,
    })?;
    file.write_all(body.as_bytes())
        .map_err(|source| SimError::Io {
            path: out_path.display().to_string(),
            source,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            n_values: vec![4],
            p: 0.1,
            rates: vec![0.25],
            r_override: Some(3),
            precode_kind: PrecodeKind::Crc,
            crc_table: HashMap::new(),
            d: 1,
            deletion_mode: DeletionMode::UniformRandom,
            trials: 20,
            master_seed: 7,
            options: ExperimentOptions::default(),
        }
    }

    #[test]
    fn clean_trial_is_always_exact() {
        let mut config = tiny_config();
        config.d = 0;
        config.deletion_mode = DeletionMode::FixedPositions(vec![]);
        config.p = 1e-12;
        let cell = build_cell(&config, 4, 0.25).unwrap();
        for trial in 0..10 {
            let out = run_trial(&cell, trial).unwrap();
            assert_eq!(out.combos, 1);
            assert_eq!(out.true_in_list, 1);
            assert_eq!(out.exact_recovery, 1);
            assert_eq!(out.list_size_sum, 1);
        }
    }

    #[test]
    fn toy_fixed_deletion_recovers() {
        // N=4 repetition-style toy: one unfrozen bit, no precode.
        let config = ExperimentConfig {
            n_values: vec![2],
            p: 1e-9,
            rates: vec![0.25],
            precode_kind: PrecodeKind::None,
            deletion_mode: DeletionMode::FixedPositions(vec![1]),
            trials: 8,
            ..tiny_config()
        };
        let cell = build_cell(&config, 2, 0.25).unwrap();
        for trial in 0..8 {
            let out = run_trial(&cell, trial).unwrap();
            assert_eq!(out.exact_recovery, 1, "trial {trial}");
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let cell = build_cell(&tiny_config(), 4, 0.25).unwrap();
        for trial in 0..5 {
            let a = run_trial(&cell, trial).unwrap();
            let b = run_trial(&cell, trial).unwrap();
            assert_eq!(
                TrialOutcome { micros: 0, ..a },
                TrialOutcome { micros: 0, ..b }
            );
        }
    }

    #[test]
    fn experiment_is_reproducible() {
        let config = tiny_config();
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.len(), 1);
        for (x, y) in a.iter().zip(&b) {
            let mut x = x.clone();
            let mut y = y.clone();
            x.ms_per_trial = 0.0;
            y.ms_per_trial = 0.0;
            assert_eq!(x, y);
        }
    }

    #[test]
    fn counters_conserve_trials() {
        let records = run_experiment(&tiny_config()).unwrap();
        let rec = &records[0];
        assert_eq!(rec.trials, 20);
        let exact = ((1.0 - rec.err_exact) * rec.trials as f64).round();
        let inlist = ((1.0 - rec.err_in_list) * rec.trials as f64).round();
        assert!((0.0..=20.0).contains(&exact));
        assert!((0.0..=20.0).contains(&inlist));
    }

    #[test]
    fn sweep_counts_all_positions() {
        let config = ExperimentConfig {
            deletion_mode: DeletionMode::SweepAll,
            trials: 3,
            ..tiny_config()
        };
        let cell = build_cell(&config, 4, 0.25).unwrap();
        let out = run_trial(&cell, 0).unwrap();
        assert_eq!(out.combos, 16);
        let records = run_experiment(&config).unwrap();
        assert_eq!(records[0].trials, 3 * 16);
    }

    #[test]
    fn config_validation_happens_before_trials() {
        let mut bad = tiny_config();
        bad.rates = vec![0.95];
        assert!(matches!(
            run_experiment(&bad),
            Err(SimError::InvalidCell { .. })
        ));

        let mut bad = tiny_config();
        bad.r_override = Some(40);
        assert!(matches!(
            run_experiment(&bad),
            Err(SimError::InvalidCell { .. })
        ));

        let mut bad = tiny_config();
        bad.trials = 0;
        assert!(matches!(
            run_experiment(&bad),
            Err(SimError::InvalidCell { .. })
        ));
    }

    #[test]
    fn csv_contract() {
        let records = run_experiment(&tiny_config()).unwrap();
        let body = render_csv(&records).unwrap();
        let mut lines = body.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert!(row.starts_with("4,16,0.25,4,3,0.1,1,20,7,"));
        assert_eq!(lines.next(), None);
        // Deterministic byte output for identical records.
        assert_eq!(body, render_csv(&records).unwrap());
        assert!(matches!(render_csv(&[]), Err(SimError::NoRecords)));
    }

    #[test]
    fn emit_rejects_unwritable_path() {
        let records = run_experiment(&tiny_config()).unwrap();
        let err = emit_csv(&records, Path::new("/nonexistent-dir/out.csv"));
        assert!(matches!(err, Err(SimError::Io { .. })));
        assert!(matches!(
            emit_csv(&[], Path::new("/tmp/x.csv")),
            Err(SimError::NoRecords)
        ));
    }
}
