//! Deterministic seed derivation for experiment replications.
//!
//! Each (sample size, replication) pair gets its own stream seed derived
//! from the master seed, so runs are reproducible regardless of thread
//! count or execution order, and adding replications never perturbs
//! existing ones.

/// Derives a per-replication seed from a master seed via two rounds of
/// splitmix64 finalization over the mixed-in coordinates.
pub fn derive_seed(master: u64, n: usize, replication: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e37_79b9_7f4a_7c15_u64.wrapping_mul(n as u64 + 1))
        .wrapping_add(0x60642e2a34326f15_u64.wrapping_mul(replication + 1));
    for _ in 0..2 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}
