//! Seeded sampling and counterexample shrinking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{rat, HScalar};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational, handy as a random coefficient.
pub fn small_rational_scalar(rng: &mut ChaCha8Rng) -> HScalar {
    let mut n: i64 = rng.gen_range(-4..=4);
    if n == 0 {
        n = 1;
    }
    let d: i64 = rng.gen_range(1..=3);
    HScalar::from_rational(rat(n, d))
}

/// `count` random lists of length in `lengths` drawn from `pool` (with
/// repetition).
pub fn random_lists<T: Clone>(
    rng: &mut ChaCha8Rng,
    pool: &[T],
    lengths: std::ops::RangeInclusive<usize>,
    count: usize,
) -> Vec<Vec<T>> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(lengths.clone());
            (0..len).map(|_| pool.choose(rng).expect("nonempty pool").clone()).collect()
        })
        .collect()
}

/// All multisets of size `k` from `pool`, as index-sorted lists.
pub fn multisets<T: Clone>(pool: &[T], k: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(pool: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i].clone());
            go(pool, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Greedily drops elements while `fails` keeps returning true.
pub fn shrink_list<T: Clone>(mut items: Vec<T>, fails: impl Fn(&[T]) -> bool) -> Vec<T> {
    let mut i = 0;
    while i < items.len() {
        let mut candidate = items.clone();
        candidate.remove(i);
        if fails(&candidate) {
            items = candidate;
        } else {
            i += 1;
        }
    }
    items
}
