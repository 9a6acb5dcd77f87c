//! Partition/owner consistency sweeps for the distribution maps.
//!
//! For every (N, P, dist) combination the per-pid index lists must tile
//! 0..N exactly once, and `owner` must agree with membership.

use hypertm_core::{Dist, Dmap};

fn check_partition(n: usize, p: usize, dist: Dist) {
    let map = Dmap::rows(p, dist).unwrap();
    let shape = [n, 1];

    let mut seen = vec![false; n];
    let mut owner_of = vec![usize::MAX; n];
    for pid in 0..p {
        let idx = map.global_ind(&shape, 0, pid).unwrap();
        // sorted, in range, and not claimed by anyone else
        let mut prev = None;
        for &i in &idx {
            assert!(i < n, "index {i} out of range for N={n} P={p} {dist:?}");
            if let Some(q) = prev {
                assert!(q < i, "unsorted indices for N={n} P={p} {dist:?}");
            }
            prev = Some(i);
            assert!(!seen[i], "index {i} claimed twice for N={n} P={p} {dist:?}");
            seen[i] = true;
            owner_of[i] = pid;
        }
    }
    assert!(
        seen.iter().all(|&s| s),
        "partition misses indices for N={n} P={p} {dist:?}"
    );

    for i in 0..n {
        let owner = map.owner(&shape, 0, i).unwrap();
        assert_eq!(
            owner, owner_of[i],
            "owner({i}) disagrees with membership for N={n} P={p} {dist:?}"
        );
    }
}

#[test]
fn partition_sweep_small() {
    for n in 1..=160 {
        for p in 1..=16 {
            for dist in [
                Dist::Block,
                Dist::Cyclic,
                Dist::BlockCyclic(2),
                Dist::BlockCyclic(7),
            ] {
                check_partition(n, p, dist);
            }
        }
    }
}

#[test]
fn partition_spot_large() {
    for n in [255, 256, 257, 511, 512, 513, 997, 1000] {
        for p in [1, 2, 3, 4, 7, 8, 13, 16] {
            for dist in [
                Dist::Block,
                Dist::Cyclic,
                Dist::BlockCyclic(3),
                Dist::BlockCyclic(64),
            ] {
                check_partition(n, p, dist);
            }
        }
    }
}

#[test]
fn block_equals_block_cyclic_with_ceil_block() {
    for n in 1usize..=96 {
        for p in 1usize..=12 {
            let b = n.div_ceil(p).max(1);
            let block = Dmap::rows(p, Dist::Block).unwrap();
            let bc = Dmap::rows(p, Dist::BlockCyclic(b)).unwrap();
            for pid in 0..p {
                assert_eq!(
                    block.global_ind(&[n, 1], 0, pid).unwrap(),
                    bc.global_ind(&[n, 1], 0, pid).unwrap(),
                    "Block != BlockCyclic({b}) at N={n} P={p} pid={pid}"
                );
            }
        }
    }
}

#[test]
fn cyclic_equals_block_cyclic_one() {
    for n in 1..=96 {
        for p in 1..=12 {
            let cyc = Dmap::rows(p, Dist::Cyclic).unwrap();
            let bc = Dmap::rows(p, Dist::BlockCyclic(1)).unwrap();
            for pid in 0..p {
                assert_eq!(
                    cyc.global_ind(&[n, 1], 0, pid).unwrap(),
                    bc.global_ind(&[n, 1], 0, pid).unwrap(),
                    "Cyclic != BlockCyclic(1) at N={n} P={p} pid={pid}"
                );
            }
        }
    }
}

#[test]
fn arbitrary_pid_labels_preserve_partition() {
    // the processor list relabels grid slots; the partition must not care
    let procs = vec![40, 7, 19, 3];
    let map = Dmap::new(vec![4, 1], vec![Dist::Cyclic, Dist::Block], procs.clone()).unwrap();
    let n = 23;
    let mut seen = vec![false; n];
    for (slot, &pid) in procs.iter().enumerate() {
        let idx = map.global_ind(&[n, 1], 0, pid).unwrap();
        for &i in &idx {
            assert!(!seen[i]);
            seen[i] = true;
            // slot order drives the round-robin, not the label value
            assert_eq!(i % 4, slot);
            assert_eq!(map.owner(&[n, 1], 0, i).unwrap(), pid);
        }
    }
    assert!(seen.iter().all(|&s| s));
}
