//! Randomized scans of the address permutation: injectivity on large
//! samples, exact inversion, and key sensitivity.

use std::collections::HashSet;

use hypertm_core::Anonymizer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn million_address_scan_no_collisions() {
    let anon = Anonymizer::new(0x5bd1_e995_9e37_79b9_7f4a_7c15_85eb_ca6b, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(01_000_003);

    let mut inputs: Vec<u32> = (0..1_000_000).map(|_| rng.gen()).collect();
    inputs.sort_unstable();
    inputs.dedup();

    let mut outputs = HashSet::with_capacity(inputs.len());
    for &a in &inputs {
        let m = anon.anonymize(a);
        assert!(outputs.insert(m), "collision at input {a:#x}");
        assert_eq!(anon.deanonymize(m), a, "inversion failed at {a:#x}");
    }
}

#[test]
fn narrow_spaces_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 1..=31u8 {
        let anon = Anonymizer::new(rng.gen(), k).unwrap();
        let limit = 1u64 << k;
        for _ in 0..2_000 {
            let a = (rng.gen::<u64>() % limit) as u32;
            let m = anon.anonymize(a);
            assert!((m as u64) < limit, "k={k}: output {m} escapes the space");
            assert_eq!(anon.deanonymize(m), a, "k={k}: inversion failed");
        }
    }
}

#[test]
fn distinct_keys_give_distinct_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let probe: Vec<u32> = (0..64).map(|_| rng.gen()).collect();

    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for _ in 0..100 {
        let anon = Anonymizer::new(rng.gen(), 32).unwrap();
        let image: Vec<u32> = probe.iter().map(|&a| anon.anonymize(a)).collect();
        assert!(seen.insert(image), "two keys produced the same mapping");
    }
}

#[test]
fn permutation_actually_moves_addresses() {
    // not a hard requirement of a random permutation, but a sanity check
    // that the rounds are doing work: nearly all probes should move
    let anon = Anonymizer::new(1, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let moved = (0..10_000)
        .map(|_| rng.gen::<u32>())
        .filter(|&a| anon.anonymize(a) != a)
        .count();
    assert!(moved > 9_900, "only {moved}/10000 probes moved");
}
