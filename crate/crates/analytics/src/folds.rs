//! Seeded k-fold partitioning for cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FoldError {
    #[error("cannot split {m} samples into {k} folds")]
    TooFewSamples { m: usize, k: usize },
    #[error("fold count must be at least 2")]
    BadFoldCount,
}

/// Shuffle indices `0..m` with the seed and deal them into `k` folds
/// whose sizes differ by at most one (earlier folds take the remainder).
pub fn kfold_split(m: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, FoldError> {
    if k < 2 {
        return Err(FoldError::BadFoldCount);
    }
    if m < k {
        return Err(FoldError::TooFewSamples { m, k });
    }
    let mut indices: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let base = m / k;
    let remainder = m % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < remainder);
        folds.push(indices[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_split_gives_equal_folds() {
        let folds = kfold_split(10, 5, 7).unwrap();
        assert_eq!(folds.len(), 5);
        assert!(folds.iter().all(|f| f.len() == 2));
    }

    #[test]
    fn remainder_goes_to_the_leading_folds() {
        let folds = kfold_split(11, 5, 7).unwrap();
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 2, 2, 2, 2]);
    }

    #[test]
    fn folds_partition_the_index_range() {
        let folds = kfold_split(23, 4, 99).unwrap();
        let mut seen: Vec<usize> = folds.into_iter().flatten().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_reproduces_the_split() {
        assert_eq!(kfold_split(50, 5, 42).unwrap(), kfold_split(50, 5, 42).unwrap());
    }

    #[test]
    fn different_seeds_shuffle_differently() {
        assert_ne!(kfold_split(50, 5, 1).unwrap(), kfold_split(50, 5, 2).unwrap());
    }

    #[test]
    fn shuffling_actually_happens() {
        // An unshuffled split would hand fold 0 the indices 0..10 in
        // order; check at least one fold breaks that pattern.
        let folds = kfold_split(50, 5, 3).unwrap();
        assert!(folds[0] != (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert_eq!(
            kfold_split(3, 5, 0),
            Err(FoldError::TooFewSamples { m: 3, k: 5 })
        );
        assert_eq!(kfold_split(10, 1, 0), Err(FoldError::BadFoldCount));
        assert_eq!(kfold_split(10, 0, 0), Err(FoldError::BadFoldCount));
    }
}
