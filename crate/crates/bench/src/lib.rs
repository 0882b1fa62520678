//! Synthetic inputs for the benchmarks in `benches/`.

use fih_core::{Item, TransactionDatabase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Market-basket-like database: item popularity decays geometrically, so a
/// few items are frequent and the tail is sparse. Every transaction has at
/// least one item.
pub fn synthetic(transactions: usize, items: u32, avg_len: f64, seed: u64) -> TransactionDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // p_i = p_0 * r^i, scaled so the expected length is `avg_len`.
    let r: f64 = 0.93;
    let mass: f64 = (0..items).map(|i| r.powi(i as i32)).sum();
    let p0 = (avg_len / mass).min(0.95);
    let rows: Vec<Vec<Item>> = (0..transactions)
        .map(|_| {
            let mut t: Vec<Item> = (0..items)
                .filter(|&i| rng.random_bool(p0 * r.powi(i as i32)))
                .map(|i| i + 1)
                .collect();
            if t.is_empty() {
                t.push(rng.random_range(1..=items));
            }
            t
        })
        .collect();
    TransactionDatabase::from_transactions(rows)
}
