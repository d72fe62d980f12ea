use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Learner, ModelConfig, Samples};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best_index: usize,
    pub best: ModelConfig,
    /// Mean validation MSE of the winner.
    pub score: f64,
    /// Mean validation MSE of every grid entry, in grid order.
    pub scores: Vec<f64>,
}

/// Seeded shuffle of `0..n` dealt round-robin into `k` validation folds.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid("folds", "must be >= 2"));
    }
    if n < k {
        return Err(Error::invalid(
            "folds",
            format!("{n} rows cannot fill {k} folds"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, i) in order.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    Ok(folds)
}

/// k-fold cross-validated grid search. Ties go to the earlier grid entry.
pub fn grid_search(
    data: &Samples,
    grid: &[ModelConfig],
    folds: usize,
    seed: u64,
) -> Result<GridResult> {
    if grid.is_empty() {
        return Err(Error::Empty("grid"));
    }
    let parts = kfold_indices(data.len(), folds, seed)?;
    let splits: Vec<(Samples, Samples)> = parts
        .iter()
        .map(|valid| {
            let mut in_valid = vec![false; data.len()];
            valid.iter().for_each(|&i| in_valid[i] = true);
            let train: Vec<usize> = (0..data.len()).filter(|&i| !in_valid[i]).collect();
            (data.select(&train), data.select(valid))
        })
        .collect();

    let scores = grid
        .par_iter()
        .map(|cfg| {
            let mut total = 0.0;
            for (train, valid) in &splits {
                let model = Learner::fit(train, cfg)?;
                let mse = valid
                    .rows
                    .iter()
                    .zip(&valid.targets)
                    .map(|(r, y)| (model.predict_row(r) - y).powi(2))
                    .sum::<f64>()
                    / valid.len() as f64;
                total += mse;
            }
            Ok(total / splits.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut best_index = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s < scores[best_index] {
            best_index = i;
        }
    }
    Ok(GridResult {
        best_index,
        best: grid[best_index],
        score: scores[best_index],
        scores,
    })
}
