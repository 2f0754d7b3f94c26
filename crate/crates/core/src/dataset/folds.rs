use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Stratified assignment of instances to cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub fold_assignments: Vec<usize>,
    pub fold_count: usize,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.fold_assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.fold_assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.fold_count];
        for &f in &self.fold_assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Each class is shuffled independently, the classes are laid end to end,
/// and position `p` in that sequence goes to fold `p % fold_count`. Every
/// class is a contiguous run, so both the per-class and the overall fold
/// sizes come out within one of each other.
pub fn make_folds(d: &Dataset, fold_count: usize, seed: u64) -> Result<FoldPlan> {
    let n = d.n_instances();
    if fold_count < 2 || fold_count > n {
        return Err(Error::InvalidFoldCount {
            folds: fold_count,
            instances: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); d.n_classes()];
    for i in 0..n {
        by_class[d.label(i)].push(i);
    }
    let mut fold_assignments = vec![0; n];
    let mut position = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            fold_assignments[i] = position % fold_count;
            position += 1;
        }
    }
    Ok(FoldPlan {
        fold_assignments,
        fold_count,
        seed,
    })
}
