//! Numerical error-probability machinery: the rate-dependent scaling
//! estimate, the two-term total-error upper bound, and the optimal
//! redundancy length.
//!
//! The `o(√n)` term of the scaling law is set to zero throughout; every
//! output is a leading-order estimate.

use statrs::function::erf::erfc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("argument {0} must lie strictly inside (0, 1)")]
    ArgumentOutOfRange(f64),
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("list size {list_size} exceeds candidate-set size {candidate_size}")]
    ListLargerThanCandidates {
        list_size: usize,
        candidate_size: usize,
    },
    #[error("SC error probability {0} must lie in [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("no sign change on the bisection bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

/// Complementary Gaussian CDF `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of `Q` by bisection, accurate to 1e-10 absolute in the argument.
pub fn q_inverse(y: f64) -> Result<f64, BoundError> {
    if !(y > 0.0 && y < 1.0) {
        return Err(BoundError::ArgumentOutOfRange(y));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    // Q is strictly decreasing: Q(lo) ≈ 1, Q(hi) ≈ 0.
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Base-2 log of the SC block-error exponent:
/// `n/2 + (√n/2)·Q⁻¹(R_polar / C)`. The estimate itself is `2^{-2^{this}}`.
pub fn scaling_exponent(
    block_len: usize,
    k_plus_r: usize,
    capacity: f64,
) -> Result<f64, BoundError> {
    if !block_len.is_power_of_two() {
        return Err(BoundError::NotPowerOfTwo(block_len));
    }
    let ratio = (k_plus_r as f64 / block_len as f64) / capacity;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(BoundError::ArgumentOutOfRange(ratio));
    }
    let n = block_len.trailing_zeros() as f64;
    Ok(n / 2.0 + (n.sqrt() / 2.0) * q_inverse(ratio)?)
}

/// Leading-order SC block-error estimate `2^{-2^{n/2 + (√n/2)Q⁻¹(R/C)}}`.
pub fn scaling_error_estimate(
    block_len: usize,
    k_plus_r: usize,
    capacity: f64,
) -> Result<f64, BoundError> {
    let exponent = scaling_exponent(block_len, k_plus_r, capacity)?;
    Ok((-exponent.exp2()).exp2())
}

/// A probability bound, with a flag reporting whether clamping to [0, 1]
/// actually fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub clamped: bool,
}

/// The union bound `|L̂| / 2^r + |A| · Pe`, clamped to [0, 1].
pub fn total_error_bound(
    list_size: usize,
    r: u32,
    candidate_size: usize,
    pe: f64,
) -> Result<BoundValue, BoundError> {
    if list_size > candidate_size {
        return Err(BoundError::ListLargerThanCandidates {
            list_size,
            candidate_size,
        });
    }
    if !(0.0..=1.0).contains(&pe) {
        return Err(BoundError::ProbabilityOutOfRange(pe));
    }
    let raw = list_size as f64 / (r as f64).exp2() + candidate_size as f64 * pe;
    if raw > 1.0 {
        Ok(BoundValue {
            value: 1.0,
            clamped: true,
        })
    } else {
        Ok(BoundValue {
            value: raw,
            clamped: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalRMode {
    /// `√N · 2^{−√((log2 N)·ln(2/δ)/2)}`, the asymptotic closed form.
    ClosedForm,
    /// Solve `r = 2^{n/2 + (√n/2)·Q⁻¹((1−δ) + r/N)}` by bisection, with
    /// rates measured in capacity-normalized units.
    ExponentBalance,
}

/// An optimized redundancy length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalR {
    /// Rounded to an integer, at least 1.
    pub r: usize,
    /// The unrounded solution.
    pub raw: f64,
    /// `raw / √N` — the Θ(√N) scaling factor.
    pub sqrt_n_factor: f64,
}

/// Redundancy length balancing the two terms of the total-error bound.
pub fn optimal_r(block_len: usize, delta: f64, mode: OptimalRMode) -> Result<OptimalR, BoundError> {
    if !block_len.is_power_of_two() {
        return Err(BoundError::NotPowerOfTwo(block_len));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundError::ArgumentOutOfRange(delta));
    }
    let big_n = block_len as f64;
    let n = block_len.trailing_zeros() as f64;
    match mode {
        OptimalRMode::ClosedForm => {
            let raw = big_n.sqrt() * (-(n * (2.0 / delta).ln() / 2.0).sqrt()).exp2();
            let r = (raw.round() as usize).max(1);
            Ok(OptimalR {
                r,
                raw,
                sqrt_n_factor: raw / big_n.sqrt(),
            })
        }
        OptimalRMode::ExponentBalance => {
            let k = ((1.0 - delta) * big_n).ceil();
            let hi_bracket = (big_n - k).max(1.0);
            let exponent = |r: f64| -> Result<f64, BoundError> {
                let ratio = ((1.0 - delta) + r / big_n).min(1.0 - 1e-12);
                Ok(n / 2.0 + (n.sqrt() / 2.0) * q_inverse(ratio)?)
            };
            // h(r) = r − 2^{exponent(r)}; the balance point is its root.
            let h = |r: f64| -> Result<f64, BoundError> { Ok(r - exponent(r)?.exp2()) };
            let (mut lo, mut hi) = (1.0f64, hi_bracket);
            if !(h(lo)? < 0.0 && h(hi)? > 0.0) {
                return Err(BoundError::NoSignChange { lo, hi });
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let raw = 0.5 * (lo + hi);
            // Pick the integer neighbour minimizing the evaluated bound
            // 2^{−r} + 2^{−2^{exponent(r)}}: maximize the smaller of the two
            // exponents (the bound is 2^{−min} to first order).
            let candidates = [(raw.floor() as usize).max(1), (raw.ceil() as usize).max(1)];
            let mut best = candidates[0];
            let mut best_key = f64::NEG_INFINITY;
            for &c in &candidates {
                let key = (c as f64).min(exponent(c as f64)?.exp2());
                if key > best_key {
                    best_key = key;
                    best = c;
                }
            }
            Ok(OptimalR {
                r: best,
                raw,
                sqrt_n_factor: raw / big_n.sqrt(),
            })
        }
    }
}

/// The simulation-grid redundancy `⌈0.7·√N⌉`.
pub fn simulation_r(block_len: usize) -> usize {
    (0.7 * (block_len as f64).sqrt()).ceil() as usize
}
