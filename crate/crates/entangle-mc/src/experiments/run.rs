//! Shard plan and execution strategy.
//!
//! The logical decomposition into shards depends only on the total sample
//! count, never on thread count: shard `k` always covers the same samples
//! with the same RNG stream. Executing the plan in parallel therefore yields
//! bit-identical results to executing it sequentially.

use crate::sampling::SampleError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Samples per logical shard.
pub const SHARD_SAMPLES: u64 = 8192;

/// How the shard plan is executed. `Parallel` uses the rayon pool when the
/// `parallel` feature is enabled and falls back to sequential otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shard {
    pub index: u32,
    pub samples: u64,
}

/// Fixed logical decomposition of `total` samples into shards.
pub fn shard_layout(total: u64) -> Vec<Shard> {
    let mut shards = Vec::with_capacity((total / SHARD_SAMPLES + 1) as usize);
    let mut remaining = total;
    let mut index = 0u32;
    while remaining > 0 {
        let samples = remaining.min(SHARD_SAMPLES);
        shards.push(Shard { index, samples });
        remaining -= samples;
        index += 1;
    }
    shards
}

/// RNG stream id for (task, shard): tasks own disjoint 32-bit blocks.
pub fn stream_id(task: u32, shard: u32) -> u64 {
    ((task as u64) << 32) | shard as u64
}

// Partials come back in shard order either way; callers fold them in that
// order so float accumulation is identical across modes.
pub(crate) fn map_shards<A, F>(total: u64, mode: ExecMode, worker: F) -> Vec<A>
where
    A: Send,
    F: Fn(Shard) -> A + Sync + Send,
{
    let shards = shard_layout(total);
    match mode {
        ExecMode::Sequential => shards.into_iter().map(worker).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                shards.into_par_iter().map(worker).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                shards.into_iter().map(worker).collect()
            }
        }
    }
}

pub(crate) fn try_map_shards<A, F>(
    total: u64,
    mode: ExecMode,
    worker: F,
) -> Result<Vec<A>, SampleError>
where
    A: Send,
    F: Fn(Shard) -> Result<A, SampleError> + Sync + Send,
{
    let shards = shard_layout(total);
    match mode {
        ExecMode::Sequential => shards.into_iter().map(worker).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                shards.into_par_iter().map(worker).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                shards.into_iter().map(worker).collect()
            }
        }
    }
}
