//! Polar code construction, encoding, and successive cancellation decoding
//! over the erasure alphabet.
//!
//! The encoder computes `x = u B_N G2^{⊗n}` where `G2 = [[1,0],[1,1]]` and
//! `B_N` is the bit-reversal permutation. The decoder works in the
//! bit-reversed domain: it runs the plain recursive SC schedule on
//! `w = u B_N`, then permutes the result back. Reliabilities are computed
//! with the exact BEC Bhattacharyya recursion `Z⁻ = 2Z − Z²`, `Z⁺ = Z²`,
//! so the construction is exact for the erasure channel.
//!
//! Messages take only three values: LLR `+∞` (bit 0), `−∞` (bit 1), and `0`
//! (erasure). Check nodes erase if either input is erased, otherwise XOR.
//! Variable nodes keep the agreeing value, take the single known value, or
//! erase on conflict (the saturating `+∞ + −∞ = 0`).

use thiserror::Error;

use crate::symbol::Symbol;

#[derive(Debug, Error)]
pub enum PolarError {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("erasure probability {0} must lie strictly inside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("k + r = {requested} out of range 1..={block_len}")]
    RateOutOfRange { requested: usize, block_len: usize },
    #[error("input length {got} does not match expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

/// Bit-reversal permutation on `{0, .., 2^stages − 1}`.
///
/// `perm[i]` reverses the `stages`-bit binary expansion of `i`. Applying the
/// permutation twice is the identity.
pub fn bit_reversal_permutation(stages: u32) -> Vec<usize> {
    let len = 1usize << stages;
    (0..len)
        .map(|i| {
            if stages == 0 {
                0
            } else {
                ((i as u64).reverse_bits() >> (64 - stages)) as usize
            }
        })
        .collect()
}

/// One polar code instance: block length, index sets, reliabilities.
///
/// Immutable after construction; safe to share across concurrent decoders.
#[derive(Debug, Clone)]
pub struct PolarCodeSpec {
    block_len: usize,
    stages: u32,
    info_and_parity: Vec<usize>,
    frozen_mask: Vec<bool>,
    reliabilities: Vec<f64>,
    bitrev: Vec<usize>,
    /// Frozen mask in the decoder's natural recursion order (the w domain);
    /// `frozen_mask` is its bit-reversed image.
    frozen_mask_w: Vec<bool>,
}

impl PolarCodeSpec {
    /// Block length `N = 2^n`.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// `n = log2(N)`.
    pub fn stages(&self) -> u32 {
        self.stages
    }

    /// Number of unfrozen positions, `k + r`.
    pub fn k_plus_r(&self) -> usize {
        self.info_and_parity.len()
    }

    /// Unfrozen indices in ascending order (the set `I ∪ P`).
    pub fn info_and_parity(&self) -> &[usize] {
        &self.info_and_parity
    }

    /// Frozen indices in ascending order.
    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.block_len)
            .filter(|&i| self.frozen_mask[i])
            .collect()
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        self.frozen_mask[index]
    }

    /// Bhattacharyya values of the synthesized bit-channels, indexed in the
    /// decoder's natural recursion order. The value for `u_i` is
    /// `reliabilities()[bitrev(i)]`.
    pub fn reliabilities(&self) -> &[f64] {
        &self.reliabilities
    }
}

/// Exact BEC Bhattacharyya values for all `2^stages` synthesized channels.
///
/// Index `i`'s value follows the bits of `i` from most significant to least:
/// bit 0 applies `Z ← 2Z − Z²`, bit 1 applies `Z ← Z²`, starting from `Z = p`.
pub fn bhattacharyya_values(stages: u32, p: f64) -> Vec<f64> {
    let mut z = vec![p];
    for _ in 0..stages {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &v in &z {
            next.push(2.0 * v - v * v);
            next.push(v * v);
        }
        z = next;
    }
    z
}

/// Build a code for `BEC(p)` with `k_plus_r` unfrozen positions.
///
/// The unfrozen set is the `k_plus_r` indices with the smallest Bhattacharyya
/// values; ties prefer the larger index (the later SC decoding position).
pub fn construct_code(
    block_len: usize,
    p: f64,
    k_plus_r: usize,
) -> Result<PolarCodeSpec, PolarError> {
    if !block_len.is_power_of_two() {
        return Err(PolarError::NotPowerOfTwo(block_len));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(PolarError::ProbabilityOutOfRange(p));
    }
    if k_plus_r < 1 || k_plus_r > block_len {
        return Err(PolarError::RateOutOfRange {
            requested: k_plus_r,
            block_len,
        });
    }
    let stages = block_len.trailing_zeros();
    let reliabilities = bhattacharyya_values(stages, p);

    let mut order: Vec<usize> = (0..block_len).collect();
    order.sort_by(|&a, &b| {
        reliabilities[a]
            .partial_cmp(&reliabilities[b])
            .expect("Bhattacharyya values are finite")
            .then(b.cmp(&a))
    });
    // Reliability index i lives in the decoder's natural recursion order,
    // i.e. the w = u B_N domain; the u-domain mask is the bit-reversed one.
    let mut frozen_mask_w = vec![true; block_len];
    for &j in &order[..k_plus_r] {
        frozen_mask_w[j] = false;
    }
    let bitrev = bit_reversal_permutation(stages);
    let frozen_mask: Vec<bool> = (0..block_len).map(|i| frozen_mask_w[bitrev[i]]).collect();
    let info_and_parity: Vec<usize> = (0..block_len).filter(|&i| !frozen_mask[i]).collect();

    Ok(PolarCodeSpec {
        block_len,
        stages,
        info_and_parity,
        frozen_mask,
        reliabilities,
        bitrev,
        frozen_mask_w,
    })
}

/// Encode `k + r` bits into an `N`-bit codeword, `x = u B_N G2^{⊗n}`.
///
/// Input bits are placed at the unfrozen indices in ascending order; frozen
/// positions carry 0. Runs in `O(N log N)` via the butterfly recursion.
pub fn polar_encode(
    message_plus_parity: &[bool],
    spec: &PolarCodeSpec,
) -> Result<Vec<bool>, PolarError> {
    if message_plus_parity.len() != spec.k_plus_r() {
        return Err(PolarError::LengthMismatch {
            got: message_plus_parity.len(),
            expected: spec.k_plus_r(),
        });
    }
    let n = spec.block_len;
    let mut u = vec![false; n];
    for (&idx, &bit) in spec.info_and_parity.iter().zip(message_plus_parity) {
        u[idx] = bit;
    }
    // v = u B_N, then x = v G2^{⊗n}.
    let mut x: Vec<bool> = (0..n).map(|j| u[spec.bitrev[j]]).collect();
    let mut size = n;
    while size > 1 {
        let half = size / 2;
        for start in (0..n).step_by(size) {
            for i in 0..half {
                x[start + i] ^= x[start + half + i];
            }
        }
        size = half;
    }
    Ok(x)
}

/// How an erasure arriving at an unfrozen position is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    /// Abort the decode with status `Ambiguous`.
    #[default]
    Drop,
    /// Estimate the bit as 0 and continue.
    ZeroFill,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ScOptions {
    pub policy: AmbiguityPolicy,
    /// When set, a frozen position whose incoming message is the hard value 1
    /// (contradicting the frozen 0) aborts with `FrozenConflict`.
    pub check_frozen_conflicts: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Resolved,
    Ambiguous,
    FrozenConflict,
}

/// Result of one SC decode.
///
/// `Resolved` carries both the full length-`N` estimate and the unfrozen
/// bits; the abort statuses carry neither.
#[derive(Debug, Clone)]
pub struct ScDecodeResult {
    pub status: ScStatus,
    pub full_estimate: Option<Vec<bool>>,
    pub message_plus_parity: Option<Vec<bool>>,
}

enum Halt {
    Ambiguous,
    FrozenConflict,
}

fn check_node(a: Symbol, b: Symbol) -> Symbol {
    match (a.bit(), b.bit()) {
        (Some(x), Some(y)) => Symbol::from_bit(x ^ y),
        _ => Symbol::Erasure,
    }
}

fn variable_node(left: Symbol, right: Symbol, partial: bool) -> Symbol {
    // Two estimates of the same bit: `right` directly and `left ⊕ partial`.
    match (left.bit(), right.bit()) {
        (None, _) => right,
        (Some(l), None) => Symbol::from_bit(l ^ partial),
        (Some(l), Some(r)) => {
            if (l ^ partial) == r {
                right
            } else {
                Symbol::Erasure
            }
        }
    }
}

/// Recursive SC over the plain transform `x = w G2^{⊗n}` (no bit reversal).
/// Fills `u` with the decided bits of this block and `x` with their
/// re-encoding. `scratch` needs `y.len() − 1` symbols.
fn sc_recurse(
    y: &[Symbol],
    frozen: &[bool],
    opts: ScOptions,
    u: &mut [bool],
    x: &mut [bool],
    scratch: &mut [Symbol],
) -> Result<(), Halt> {
    let m = y.len();
    if m == 1 {
        let bit = if frozen[0] {
            if opts.check_frozen_conflicts && y[0] == Symbol::One {
                return Err(Halt::FrozenConflict);
            }
            false
        } else {
            match y[0].bit() {
                Some(b) => b,
                None => match opts.policy {
                    AmbiguityPolicy::Drop => return Err(Halt::Ambiguous),
                    AmbiguityPolicy::ZeroFill => false,
                },
            }
        };
        u[0] = bit;
        x[0] = bit;
        return Ok(());
    }
    let h = m / 2;
    let (u_left, u_right) = u.split_at_mut(h);
    let (x_left, x_right) = x.split_at_mut(h);
    let (frozen_left, frozen_right) = frozen.split_at(h);
    let (msgs, rest) = scratch.split_at_mut(h);

    for i in 0..h {
        msgs[i] = check_node(y[i], y[h + i]);
    }
    {
        let (msgs_ro, rest) = (&*msgs, &mut *rest);
        sc_recurse(msgs_ro, frozen_left, opts, u_left, x_left, rest)?;
    }
    for i in 0..h {
        msgs[i] = variable_node(y[i], y[h + i], x_left[i]);
    }
    sc_recurse(msgs, frozen_right, opts, u_right, x_right, rest)?;
    for i in 0..h {
        x_left[i] ^= x_right[i];
    }
    Ok(())
}

/// Successive cancellation decode of a length-`N` ternary vector.
///
/// Frozen positions take the value 0. Complexity `O(N log N)`.
pub fn sc_decode(
    received: &[Symbol],
    spec: &PolarCodeSpec,
    opts: ScOptions,
) -> Result<ScDecodeResult, PolarError> {
    let n = spec.block_len;
    if received.len() != n {
        return Err(PolarError::LengthMismatch {
            got: received.len(),
            expected: n,
        });
    }
    let mut u_w = vec![false; n];
    let mut x = vec![false; n];
    let mut scratch = vec![Symbol::Erasure; n.saturating_sub(1)];
    match sc_recurse(
        received,
        &spec.frozen_mask_w,
        opts,
        &mut u_w,
        &mut x,
        &mut scratch,
    ) {
        Err(Halt::Ambiguous) => Ok(ScDecodeResult {
            status: ScStatus::Ambiguous,
            full_estimate: None,
            message_plus_parity: None,
        }),
        Err(Halt::FrozenConflict) => Ok(ScDecodeResult {
            status: ScStatus::FrozenConflict,
            full_estimate: None,
            message_plus_parity: None,
        }),
        Ok(()) => {
            let full: Vec<bool> = (0..n).map(|i| u_w[spec.bitrev[i]]).collect();
            let message = spec.info_and_parity.iter().map(|&i| full[i]).collect();
            Ok(ScDecodeResult {
                status: ScStatus::Resolved,
                full_estimate: Some(full),
                message_plus_parity: Some(message),
            })
        }
    }
}
