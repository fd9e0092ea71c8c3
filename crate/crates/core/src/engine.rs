//! Deterministic parallel replication.
//!
//! Replication `i` always draws from stream `i` of the master seed, and
//! replications are grouped in fixed chunks whose summaries are merged in
//! chunk order, so results do not depend on the number of workers.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::Result;
use crate::kernels::RngHandle;
use crate::stats::Summary;

/// Replications per chunk.
pub const CHUNK: u64 = 4096;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "LEVY_RARE_WORKERS";

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool")
    })
}

/// Summarizes `draw` over replications `start .. start + count`.
pub fn replicate_range<G>(seed: u64, start: u64, count: u64, draw: G) -> Result<Summary>
where
    G: Fn(&mut RngHandle) -> Result<f64> + Sync,
{
    let end = start + count;
    let chunks: Vec<(u64, u64)> = (start..end)
        .step_by(CHUNK as usize)
        .map(|lo| (lo, (lo + CHUNK).min(end)))
        .collect();
    let parts = pool().install(|| {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut s = Summary::default();
                for i in lo..hi {
                    let mut rng = RngHandle::new(seed, i);
                    s.push(draw(&mut rng)?);
                }
                Ok(s)
            })
            .collect::<Result<Vec<Summary>>>()
    })?;
    let mut total = Summary::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

pub fn replicate<G>(seed: u64, count: u64, draw: G) -> Result<Summary>
where
    G: Fn(&mut RngHandle) -> Result<f64> + Sync,
{
    replicate_range(seed, 0, count, draw)
}

/// Runs batches of growing size until `target_nonzero` nonzero draws are
/// seen or `max_count` replications are spent; never fewer than
/// `min_count`. Returns the summary and whether the cap was hit first.
pub fn replicate_until<G>(
    seed: u64,
    min_count: u64,
    max_count: u64,
    target_nonzero: u64,
    draw: G,
) -> Result<(Summary, bool)>
where
    G: Fn(&mut RngHandle) -> Result<f64> + Sync,
{
    let max_count = max_count.max(min_count);
    let mut total = replicate_range(seed, 0, min_count, &draw)?;
    while total.nonzero < target_nonzero && total.count < max_count {
        let batch = total.count.max(CHUNK).min(max_count - total.count);
        let part = replicate_range(seed, total.count, batch, &draw)?;
        total.merge(&part);
    }
    Ok((total, total.nonzero < target_nonzero))
}
