//! Channel models: the BEC, the adversarial d-deletion channel, and their
//! cascade.
//!
//! All randomness flows through [`TrialRng`], which derives one independent
//! ChaCha stream per `(master_seed, trial_index)` pair, so trials are
//! reproducible and may run in parallel.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("erasure probability {0} must lie in [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("deletion position {position} out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("duplicate deletion position {0}")]
    DuplicatePosition(usize),
    #[error("cannot delete {d} symbols from a length-{len} vector")]
    TooManyDeletions { d: usize, len: usize },
    #[error("SweepAll is expanded by the caller into FixedPositions runs")]
    SweepNotDirect,
}

/// Binary erasure channel parameters.
#[derive(Debug, Clone, Copy)]
pub struct BecParams {
    pub p: f64,
}

impl BecParams {
    pub fn new(p: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::ProbabilityOutOfRange(p));
        }
        Ok(Self { p })
    }
}

/// How the d deletion positions are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeletionMode {
    /// Uniform over all d-subsets of positions, drawn from the trial RNG.
    UniformRandom,
    /// Exactly these positions (0-based, distinct).
    FixedPositions(Vec<usize>),
    /// Every position set in turn; expanded by the caller.
    SweepAll,
}

#[derive(Debug, Clone)]
pub struct DeletionParams {
    pub d: usize,
    pub mode: DeletionMode,
}

/// Per-trial RNG stream, a pure function of `(master_seed, trial_index)`.
#[derive(Debug, Clone, Copy)]
pub struct TrialRng {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialRng {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    /// The derived stream: ChaCha12 keyed by the master seed with the trial
    /// index as the stream number, so distinct trials never overlap.
    pub fn stream(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// Pass a codeword through `BEC(p)`: each bit is independently erased with
/// probability `p`. Output length equals input length.
pub fn bec_transmit<R: Rng>(x: &[bool], params: &BecParams, rng: &mut R) -> Vec<Symbol> {
    x.iter()
        .map(|&bit| {
            if rng.gen_bool(params.p) {
                Symbol::Erasure
            } else {
                Symbol::from_bit(bit)
            }
        })
        .collect()
}

/// Remove the given positions, preserving the order of the rest.
pub fn delete_symbols(y: &[Symbol], positions: &[usize]) -> Result<Vec<Symbol>, ChannelError> {
    let mut drop = vec![false; y.len()];
    for &pos in positions {
        if pos >= y.len() {
            return Err(ChannelError::PositionOutOfRange {
                position: pos,
                len: y.len(),
            });
        }
        if drop[pos] {
            return Err(ChannelError::DuplicatePosition(pos));
        }
        drop[pos] = true;
    }
    Ok(y.iter()
        .enumerate()
        .filter(|(i, _)| !drop[*i])
        .map(|(_, &s)| s)
        .collect())
}

/// BEC followed by the d-deletion channel.
///
/// Returns the shortened vector and the ground-truth deletion positions.
/// The positions are instrumentation only; decoders never see them.
pub fn cascade_transmit<R: Rng>(
    x: &[bool],
    bec: &BecParams,
    del: &DeletionParams,
    rng: &mut R,
) -> Result<(Vec<Symbol>, Vec<usize>), ChannelError> {
    if del.d > x.len() {
        return Err(ChannelError::TooManyDeletions {
            d: del.d,
            len: x.len(),
        });
    }
    let y = bec_transmit(x, bec, rng);
    let mut positions = match &del.mode {
        DeletionMode::UniformRandom => rand::seq::index::sample(rng, x.len(), del.d).into_vec(),
        DeletionMode::FixedPositions(positions) => {
            if positions.len() != del.d {
                return Err(ChannelError::TooManyDeletions {
                    d: del.d,
                    len: positions.len(),
                });
            }
            positions.clone()
        }
        DeletionMode::SweepAll => return Err(ChannelError::SweepNotDirect),
    };
    positions.sort_unstable();
    let shortened = delete_symbols(&y, &positions)?;
    Ok((shortened, positions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{erasure_count, parse_symbols};

    #[test]
    fn bec_degenerate_probabilities() {
        let x = vec![true, false, true, true];
        let mut rng = TrialRng::new(7, 0).stream();
        let clean = bec_transmit(&x, &BecParams::new(0.0).unwrap(), &mut rng);
        assert_eq!(erasure_count(&clean), 0);
        assert_eq!(clean, parse_symbols("1011").unwrap());
        let gone = bec_transmit(&x, &BecParams::new(1.0).unwrap(), &mut rng);
        assert_eq!(erasure_count(&gone), 4);
    }

    #[test]
    fn bec_erasure_fraction_concentrates() {
        let len = 100_000;
        let x = vec![false; len];
        let mut rng = TrialRng::new(123, 0).stream();
        let y = bec_transmit(&x, &BecParams::new(0.3).unwrap(), &mut rng);
        let count = erasure_count(&y) as f64;
        let mean = 0.3 * len as f64;
        let sigma = (len as f64 * 0.3 * 0.7).sqrt();
        assert!(
            (count - mean).abs() <= 3.0 * sigma,
            "count {count} vs mean {mean}"
        );
    }

    #[test]
    fn bec_params_validation() {
        assert!(BecParams::new(-0.1).is_err());
        assert!(BecParams::new(1.1).is_err());
    }

    #[test]
    fn delete_examples() {
        let y = parse_symbols("01e1").unwrap();
        assert_eq!(
            delete_symbols(&y, &[1]).unwrap(),
            parse_symbols("0e1").unwrap()
        );
        assert_eq!(delete_symbols(&y, &[]).unwrap(), y);
        let ones = parse_symbols("1111").unwrap();
        assert_eq!(
            delete_symbols(&ones, &[2]).unwrap(),
            parse_symbols("111").unwrap()
        );
    }

    #[test]
    fn delete_rejects_bad_positions() {
        let y = parse_symbols("0101").unwrap();
        assert!(matches!(
            delete_symbols(&y, &[4]),
            Err(ChannelError::PositionOutOfRange {
                position: 4,
                len: 4
            })
        ));
        assert!(matches!(
            delete_symbols(&y, &[1, 1]),
            Err(ChannelError::DuplicatePosition(1))
        ));
    }

    #[test]
    fn cascade_identity_and_fixed_deletion() {
        let x = vec![true; 4];
        let bec = BecParams::new(0.0).unwrap();
        let mut rng = TrialRng::new(1, 0).stream();
        let (out, pos) = cascade_transmit(
            &x,
            &bec,
            &DeletionParams {
                d: 0,
                mode: DeletionMode::FixedPositions(vec![]),
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(out, parse_symbols("1111").unwrap());
        assert!(pos.is_empty());

        let (out, pos) = cascade_transmit(
            &x,
            &bec,
            &DeletionParams {
                d: 1,
                mode: DeletionMode::FixedPositions(vec![1]),
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(out, parse_symbols("111").unwrap());
        assert_eq!(pos, vec![1]);
    }

    #[test]
    fn cascade_length_and_erasure_count_at_scale() {
        let n = 2048;
        let x = vec![false; n];
        let bec = BecParams::new(0.3).unwrap();
        let del = DeletionParams {
            d: 1,
            mode: DeletionMode::UniformRandom,
        };
        let mut rng = TrialRng::new(99, 5).stream();
        let (out, pos) = cascade_transmit(&x, &bec, &del, &mut rng).unwrap();
        assert_eq!(out.len(), n - 1);
        assert_eq!(pos.len(), 1);
        let count = erasure_count(&out) as f64;
        let mean = 0.3 * n as f64;
        let sigma = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((count - mean).abs() <= 4.0 * sigma);
    }

    #[test]
    fn cascade_rejects_sweep_and_oversized_d() {
        let x = vec![false; 4];
        let bec = BecParams::new(0.1).unwrap();
        let mut rng = TrialRng::new(0, 0).stream();
        assert!(matches!(
            cascade_transmit(
                &x,
                &bec,
                &DeletionParams {
                    d: 1,
                    mode: DeletionMode::SweepAll
                },
                &mut rng
            ),
            Err(ChannelError::SweepNotDirect)
        ));
        assert!(matches!(
            cascade_transmit(
                &x,
                &bec,
                &DeletionParams {
                    d: 5,
                    mode: DeletionMode::UniformRandom
                },
                &mut rng
            ),
            Err(ChannelError::TooManyDeletions { d: 5, len: 4 })
        ));
    }

    #[test]
    fn trial_streams_are_deterministic_and_disjoint() {
        let x = vec![true; 64];
        let bec = BecParams::new(0.3).unwrap();
        let del = DeletionParams {
            d: 1,
            mode: DeletionMode::UniformRandom,
        };

        let mut a = TrialRng::new(42, 3).stream();
        let mut b = TrialRng::new(42, 3).stream();
        let out_a = cascade_transmit(&x, &bec, &del, &mut a).unwrap();
        let out_b = cascade_transmit(&x, &bec, &del, &mut b).unwrap();
        assert_eq!(out_a, out_b);

        let mut c = TrialRng::new(42, 4).stream();
        let out_c = cascade_transmit(&x, &bec, &del, &mut c).unwrap();
        assert_ne!(out_a, out_c);
    }
}
