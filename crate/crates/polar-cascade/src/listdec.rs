//! Candidate-set list decoding for the erasure/deletion cascade.
//!
//! The received vector is `d` symbols short and the deletion positions are
//! unknown. Every way of re-inserting `d` erasure symbols yields a length-`N`
//! candidate; one of them masks the true channel output. Each candidate is
//! SC-decoded independently, the distinct resolved words form the list, the
//! redundancy check filters the list, and a deterministic likelihood proxy
//! picks the output message.

use std::collections::HashMap;

use thiserror::Error;

use crate::polar::{sc_decode, PolarCodeSpec, PolarError, ScOptions, ScStatus};
use crate::precode::{Precode, PrecodeError};
use crate::symbol::{erasure_count, Symbol};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("received length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("deletion count must be at least 1")]
    ZeroDeletions,
    #[error("redundancy r = {r} exceeds the {k_plus_r} unfrozen positions")]
    RedundancyTooLarge { r: usize, k_plus_r: usize },
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Precode(#[from] PrecodeError),
}

/// One erasure-insertion candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub symbols: Vec<Symbol>,
    /// Positions (in the candidate) of the inserted erasure symbols.
    pub inserted: Vec<usize>,
}

/// All distinct length-`N` vectors containing the received vector as a
/// subsequence after erasure insertion.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Candidate set for a single deletion: insert one `e` at each of the `N`
/// slots, deduplicated. Cardinality is exactly `N − α`.
pub fn build_candidate_set(
    received: &[Symbol],
    block_len: usize,
) -> Result<CandidateSet, DecodeError> {
    build_candidate_set_d(received, block_len, 1)
}

/// Candidate set for `d` deletions: all distinct vectors formed by inserting
/// `d` erasures, deduplicated by canonical (leftmost-normalized) slots.
/// Cardinality is at most `C(N, d)`; for `d = 1` it is exactly `N − α`.
pub fn build_candidate_set_d(
    received: &[Symbol],
    block_len: usize,
    d: usize,
) -> Result<CandidateSet, DecodeError> {
    if d < 1 {
        return Err(DecodeError::ZeroDeletions);
    }
    if received.len() + d != block_len {
        return Err(DecodeError::LengthMismatch {
            got: received.len(),
            expected: block_len - d.min(block_len),
        });
    }
    // Canonical insertion slots: inserting immediately after an erasure
    // duplicates inserting before it, so only the start of each erasure run
    // is an allowed slot.
    let allowed: Vec<usize> = (0..=received.len())
        .filter(|&slot| slot == 0 || !received[slot - 1].is_erasure())
        .collect();

    let mut candidates = Vec::new();
    let mut counts = vec![0usize; allowed.len()];
    assemble(received, &allowed, &mut counts, 0, d, &mut candidates);
    Ok(CandidateSet { candidates })
}

/// Enumerate multisets of allowed slots (`counts[i]` insertions at slot
/// `allowed[i]`) and materialize each candidate.
fn assemble(
    received: &[Symbol],
    allowed: &[usize],
    counts: &mut [usize],
    from: usize,
    remaining: usize,
    out: &mut Vec<Candidate>,
) {
    if remaining == 0 {
        let mut symbols = Vec::with_capacity(received.len() + counts.iter().sum::<usize>());
        let mut inserted = Vec::new();
        let mut next_slot = 0;
        for (pos, &symbol) in received.iter().enumerate() {
            while next_slot < allowed.len() && allowed[next_slot] == pos {
                for _ in 0..counts[next_slot] {
                    inserted.push(symbols.len());
                    symbols.push(Symbol::Erasure);
                }
                next_slot += 1;
            }
            symbols.push(symbol);
        }
        while next_slot < allowed.len() {
            for _ in 0..counts[next_slot] {
                inserted.push(symbols.len());
                symbols.push(Symbol::Erasure);
            }
            next_slot += 1;
        }
        out.push(Candidate { symbols, inserted });
        return;
    }
    if from == allowed.len() {
        return;
    }
    for take in (0..=remaining).rev() {
        counts[from] = take;
        assemble(received, allowed, counts, from + 1, remaining - take, out);
    }
    counts[from] = 0;
}

/// One distinct `(k+r)`-bit word in the list, with the metadata the
/// likelihood proxy ranks on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListEntry {
    pub word: Vec<bool>,
    /// Number of candidates that resolved to this word.
    pub support: usize,
    /// Minimum erasure count over those candidates.
    pub min_alpha: usize,
    /// Smallest first insertion position over those candidates.
    pub min_slot: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeCounters {
    pub candidates: usize,
    pub ambiguous: usize,
    pub frozen_conflicts: usize,
}

/// Outcome of one full list decode.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub list: Vec<ListEntry>,
    /// Indices into `list` of the entries passing the redundancy check.
    pub survivors: Vec<usize>,
    /// The selected `k`-bit message, when any survivor exists.
    pub selected: Option<Vec<bool>>,
    pub counters: DecodeCounters,
}

/// Build the candidate set and SC-decode every candidate; no filtering.
///
/// `d = 0` decodes the received vector alone (it must be full length).
pub fn list_decode(
    received: &[Symbol],
    spec: &PolarCodeSpec,
    d: usize,
    opts: ScOptions,
) -> Result<DecodeOutcome, DecodeError> {
    let candidates = if d == 0 {
        if received.len() != spec.block_len() {
            return Err(DecodeError::LengthMismatch {
                got: received.len(),
                expected: spec.block_len(),
            });
        }
        vec![Candidate {
            symbols: received.to_vec(),
            inserted: Vec::new(),
        }]
    } else {
        build_candidate_set_d(received, spec.block_len(), d)?.candidates
    };

    let mut counters = DecodeCounters {
        candidates: candidates.len(),
        ..Default::default()
    };
    let mut merged: HashMap<Vec<bool>, (usize, usize, usize)> = HashMap::new();
    for candidate in &candidates {
        let result = sc_decode(&candidate.symbols, spec, opts)?;
        match result.status {
            ScStatus::Ambiguous => counters.ambiguous += 1,
            ScStatus::FrozenConflict => counters.frozen_conflicts += 1,
            ScStatus::Resolved => {
                let word = result
                    .message_plus_parity
                    .expect("resolved result carries the word");
                let alpha = erasure_count(&candidate.symbols);
                let slot = candidate.inserted.first().copied().unwrap_or(0);
                merged
                    .entry(word)
                    .and_modify(|(support, min_alpha, min_slot)| {
                        *support += 1;
                        *min_alpha = (*min_alpha).min(alpha);
                        *min_slot = (*min_slot).min(slot);
                    })
                    .or_insert((1, alpha, slot));
            }
        }
    }
    let mut list: Vec<ListEntry> = merged
        .into_iter()
        .map(|(word, (support, min_alpha, min_slot))| ListEntry {
            word,
            support,
            min_alpha,
            min_slot,
        })
        .collect();
    // Deterministic order regardless of hash iteration.
    list.sort_by(|a, b| {
        (a.min_alpha, a.min_slot, &a.word).cmp(&(b.min_alpha, b.min_slot, &b.word))
    });
    Ok(DecodeOutcome {
        list,
        survivors: Vec::new(),
        selected: None,
        counters,
    })
}

/// Indices of the list entries that pass the redundancy check.
pub fn filter_survivors(list: &[ListEntry], precode: &Precode) -> Result<Vec<usize>, PrecodeError> {
    let mut survivors = Vec::new();
    for (i, entry) in list.iter().enumerate() {
        if precode.check(&entry.word)? {
            survivors.push(i);
        }
    }
    Ok(survivors)
}

/// Pick the most likely survivor and return its first `k` bits.
///
/// Ranking: smallest supporting erasure count first (each erasure carries a
/// factor `p < 1 − p`), then smallest insertion position, then
/// lexicographically smallest word. Deterministic.
pub fn select_message(list: &[ListEntry], survivors: &[usize], k: usize) -> Option<Vec<bool>> {
    survivors
        .iter()
        .map(|&i| &list[i])
        .min_by(|a, b| (a.min_alpha, a.min_slot, &a.word).cmp(&(b.min_alpha, b.min_slot, &b.word)))
        .map(|entry| entry.word[..k].to_vec())
}

/// Full pipeline: candidate set → SC list → redundancy filter → selection.
pub fn decode_received(
    received: &[Symbol],
    spec: &PolarCodeSpec,
    precode: &Precode,
    d: usize,
    opts: ScOptions,
) -> Result<DecodeOutcome, DecodeError> {
    let r = precode.redundancy();
    if r > spec.k_plus_r() {
        return Err(DecodeError::RedundancyTooLarge {
            r,
            k_plus_r: spec.k_plus_r(),
        });
    }
    let k = spec.k_plus_r() - r;
    let mut outcome = list_decode(received, spec, d, opts)?;
    outcome.survivors = filter_survivors(&outcome.list, precode)?;
    outcome.selected = select_message(&outcome.list, &outcome.survivors, k);
    Ok(outcome)
}
