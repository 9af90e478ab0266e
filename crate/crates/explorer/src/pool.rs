//! Bounded pool for blocking compute jobs.

use std::sync::Arc;

use tokio::sync::Semaphore;

/// Runs at most `workers` jobs at once; waiting jobs start in FIFO order.
#[derive(Debug, Clone)]
pub struct WorkerPool {
    permits: Arc<Semaphore>,
    workers: usize,
}

impl WorkerPool {
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        Self {
            permits: Arc::new(Semaphore::new(workers)),
            workers,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Jobs currently running.
    pub fn busy(&self) -> usize {
        self.workers - self.permits.available_permits()
    }

    pub async fn run<T, F>(&self, job: F) -> T
    where
        T: Send + 'static,
        F: FnOnce() -> T + Send + 'static,
    {
        let _permit = self.permits.clone().acquire_owned().await.expect("pool semaphore closed");
        match tokio::task::spawn_blocking(job).await {
            Ok(v) => v,
            Err(e) => std::panic::resume_unwind(e.into_panic()),
        }
    }
}
