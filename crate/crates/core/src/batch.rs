//! Batches of independent trials. With the `parallel` feature the trials run
//! on the rayon pool; results always come back in input order.

use crate::error::{Error, Result};
use crate::fsm::trial::{run_trial, Setup, TrialResult, TrialSpec};
use crate::reentry::Turn;

/// Alternating left/right turns sweeping the interior rows, one seed per
/// trial (`base_seed + k`).
pub fn alternating_schedule(n: usize, row_count: usize, base_seed: u64) -> Result<Vec<TrialSpec>> {
    if row_count < 3 {
        return Err(Error::Argument("schedule needs at least three rows".into()));
    }
    let interior = row_count - 2;
    Ok((0..n)
        .map(|k| {
            let turn = if k % 2 == 0 { Turn::Left } else { Turn::Right };
            TrialSpec::new(1 + (k / 2) % interior, turn, base_seed.wrapping_add(k as u64))
        })
        .collect())
}

pub fn run_batch_sequential(setup: &Setup, specs: &[TrialSpec]) -> Result<Vec<TrialResult>> {
    setup.validate()?;
    specs.iter().map(|s| run_trial(setup, s)).collect()
}

#[cfg(feature = "parallel")]
pub fn run_batch_parallel(setup: &Setup, specs: &[TrialSpec]) -> Result<Vec<TrialResult>> {
    use rayon::prelude::*;
    setup.validate()?;
    specs.par_iter().map(|s| run_trial(setup, s)).collect()
}

pub fn run_batch(setup: &Setup, specs: &[TrialSpec]) -> Result<Vec<TrialResult>> {
    #[cfg(feature = "parallel")]
    {
        log::info!("running {} trials on {} threads", specs.len(), rayon::current_num_threads());
        run_batch_parallel(setup, specs)
    }
    #[cfg(not(feature = "parallel"))]
    {
        log::info!("running {} trials sequentially", specs.len());
        run_batch_sequential(setup, specs)
    }
}
