use paretosmg_core::pareto::{BurstExecutor, BurstTask};
use paretosmg_core::Result;
use rayon::prelude::*;

/// Runs bursts on a dedicated rayon pool; outcomes keep task order.
pub struct PoolExecutor {
    pool: rayon::ThreadPool,
}

impl PoolExecutor {
    /// `threads = None` uses one worker per available core.
    pub fn new(threads: Option<usize>) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl BurstExecutor for PoolExecutor {
    fn run(
        &self,
        tasks: &[BurstTask],
        job: &(dyn Fn(&BurstTask) -> Result<Vec<f64>> + Sync),
    ) -> Vec<Result<Vec<f64>>> {
        self.pool.install(|| tasks.par_iter().map(job).collect())
    }
}
