//! Shared input builders for the benchmark suite.

use poset_gram::Poset;

/// Fence on `n` points: underlying path with alternating arc directions.
pub fn fence(n: usize) -> Poset {
    let covers: Vec<(usize, usize)> = (1..n)
        .map(|i| if i % 2 == 1 { (i, i + 1) } else { (i + 1, i) })
        .collect();
    Poset::from_covers(n, &covers).expect("fence covers are acyclic")
}

/// Tree with arms of lengths 1, 2 and 4 meeting at a common sink.
pub fn e8_tree() -> Poset {
    let covers = [(2, 1), (3, 1), (4, 3), (5, 1), (6, 5), (7, 6), (8, 7)];
    Poset::from_covers(8, &covers).expect("tree covers are acyclic")
}
