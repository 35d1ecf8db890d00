//! Property tests for the library invariants.

use proptest::collection::vec as pvec;
use proptest::prelude::*;

use polar_cascade::channel::{
    bec_transmit, cascade_transmit, delete_symbols, BecParams, DeletionMode, DeletionParams,
    TrialRng,
};
use polar_cascade::listdec::{build_candidate_set, build_candidate_set_d, list_decode};
use polar_cascade::polar::{construct_code, polar_encode, sc_decode, ScOptions, ScStatus};
use polar_cascade::precode::{CrcSpec, Precode};
use polar_cascade::symbol::{erasure_count, from_bits, Symbol};

fn symbol_strategy() -> impl Strategy<Value = Symbol> {
    prop_oneof![Just(Symbol::Zero), Just(Symbol::One), Just(Symbol::Erasure)]
}

proptest! {
    #[test]
    fn prop1_cardinality(received in pvec(symbol_strategy(), 0..200)) {
        let block_len = received.len() + 1;
        let set = build_candidate_set(&received, block_len).unwrap();
        prop_assert_eq!(set.len(), block_len - erasure_count(&received));
    }

    #[test]
    fn candidates_are_supersequences(
        received in pvec(symbol_strategy(), 0..40),
        d in 1usize..3,
    ) {
        let set = build_candidate_set_d(&received, received.len() + d, d).unwrap();
        for candidate in &set.candidates {
            let back = delete_symbols(&candidate.symbols, &candidate.inserted).unwrap();
            prop_assert_eq!(&back, &received);
        }
    }

    #[test]
    fn d1_specialization_matches(received in pvec(symbol_strategy(), 0..60)) {
        let block_len = received.len() + 1;
        let general = build_candidate_set_d(&received, block_len, 1).unwrap();
        let special = build_candidate_set(&received, block_len).unwrap();
        prop_assert_eq!(general.candidates, special.candidates);
    }

    #[test]
    fn containment_of_the_masked_truth(
        bits in pvec(any::<bool>(), 1..40),
        erase_mask in pvec(any::<bool>(), 1..40),
        delete_at_raw in any::<usize>(),
    ) {
        // The BEC output with the deleted position replaced by e always
        // appears in the candidate set.
        let n = bits.len().min(erase_mask.len());
        let y: Vec<Symbol> = (0..n)
            .map(|i| if erase_mask[i] { Symbol::Erasure } else { Symbol::from_bit(bits[i]) })
            .collect();
        let delete_at = delete_at_raw % n;
        let received = delete_symbols(&y, &[delete_at]).unwrap();
        let mut masked = y.clone();
        masked[delete_at] = Symbol::Erasure;
        let set = build_candidate_set(&received, n).unwrap();
        prop_assert!(set.candidates.iter().any(|c| c.symbols == masked));
    }

    #[test]
    fn erasure_only_soundness(
        message_seed in any::<u64>(),
        erase_mask in pvec(any::<bool>(), 16),
    ) {
        // Erasures but no flips: a resolved SC decode is never wrong.
        let spec = construct_code(16, 0.3, 6).unwrap();
        let message: Vec<bool> = (0..6).map(|i| (message_seed >> i) & 1 == 1).collect();
        let x = polar_encode(&message, &spec).unwrap();
        let received: Vec<Symbol> = x
            .iter()
            .zip(&erase_mask)
            .map(|(&b, &e)| if e { Symbol::Erasure } else { Symbol::from_bit(b) })
            .collect();
        let result = sc_decode(&received, &spec, ScOptions::default()).unwrap();
        if result.status == ScStatus::Resolved {
            prop_assert_eq!(result.message_plus_parity.unwrap(), message);
        }
    }

    #[test]
    fn true_message_survives_when_resolved(
        message_seed in any::<u64>(),
        trial in any::<u64>(),
    ) {
        let spec = construct_code(32, 0.3, 10).unwrap();
        let precode = Precode::Crc(CrcSpec::from_hex("B").unwrap());
        let k = 7;
        let message: Vec<bool> = (0..k).map(|i| (message_seed >> i) & 1 == 1).collect();
        let coded = precode.attach(&message);
        let x = polar_encode(&coded, &spec).unwrap();
        let mut rng = TrialRng::new(17, trial).stream();
        let del = DeletionParams { d: 1, mode: DeletionMode::UniformRandom };
        let (received, positions) =
            cascade_transmit(&x, &BecParams { p: 0.3 }, &del, &mut rng).unwrap();

        // Re-derive the masked true candidate to know whether SC resolves it.
        let mut rng2 = TrialRng::new(17, trial).stream();
        let y = bec_transmit(&x, &BecParams { p: 0.3 }, &mut rng2);
        let mut masked = y.clone();
        masked[positions[0]] = Symbol::Erasure;
        let truth = sc_decode(&masked, &spec, ScOptions::default()).unwrap();

        let outcome = list_decode(&received, &spec, 1, ScOptions::default()).unwrap();
        if truth.status == ScStatus::Resolved {
            let word = truth.message_plus_parity.unwrap();
            prop_assert!(outcome.list.iter().any(|e| e.word == word));
            if word == coded {
                prop_assert!(precode.check(&word).unwrap());
            }
        }
    }

    #[test]
    fn cascade_length_bookkeeping(
        bits in pvec(any::<bool>(), 2..128),
        d_raw in any::<usize>(),
        seed in any::<u64>(),
    ) {
        let d = d_raw % bits.len();
        let del = DeletionParams { d, mode: DeletionMode::UniformRandom };
        let mut rng = TrialRng::new(seed, 0).stream();
        let (out, positions) =
            cascade_transmit(&bits, &BecParams { p: 0.4 }, &del, &mut rng).unwrap();
        prop_assert_eq!(out.len(), bits.len() - d);
        prop_assert_eq!(positions.len(), d);

        // Subsequence property: the output is the BEC output minus exactly
        // the reported positions.
        let mut rng2 = TrialRng::new(seed, 0).stream();
        let y = bec_transmit(&bits, &BecParams { p: 0.4 }, &mut rng2);
        prop_assert_eq!(delete_symbols(&y, &positions).unwrap(), out);
    }

    #[test]
    fn crc_attach_check_round_trip(message in pvec(any::<bool>(), 1..64)) {
        let precode = Precode::Crc(CrcSpec::from_hex("11021").unwrap());
        prop_assert!(precode.check(&precode.attach(&message)).unwrap());
    }
}

#[test]
fn clean_round_trip_up_to_2048() {
    let mut rng_state = 0x9e3779b97f4a7c15u64;
    let mut next_bit = move || {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        rng_state >> 63 == 1
    };
    for stages in [3u32, 6, 9, 11] {
        let block_len = 1usize << stages;
        let k_plus_r = block_len / 2;
        let spec = construct_code(block_len, 0.3, k_plus_r).unwrap();
        for _ in 0..5 {
            let message: Vec<bool> = (0..k_plus_r).map(|_| next_bit()).collect();
            let x = polar_encode(&message, &spec).unwrap();
            let result = sc_decode(&from_bits(&x), &spec, ScOptions::default()).unwrap();
            assert_eq!(result.status, ScStatus::Resolved);
            assert_eq!(result.message_plus_parity.unwrap(), message);
        }
    }
}
