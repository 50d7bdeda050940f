//! Deterministic chunked parallelism.
//!
//! Work is split into contiguous chunks whose boundaries depend only on the
//! input range, never on the worker count; workers pull chunks from a shared
//! counter and the per-chunk results are merged in chunk order. Any
//! associative merge therefore produces bit-identical output for every
//! worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy)]
pub struct Pool {
    workers: usize,
}

impl Pool {
    pub fn new(workers: usize) -> Self {
        Pool {
            workers: workers.max(1),
        }
    }

    /// Worker count from `CFNORM_WORKERS` (which overrides the argument).
    pub fn from_env_or(workers: usize) -> Self {
        match std::env::var("CFNORM_WORKERS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
        {
            Some(n) if n >= 1 => Pool::new(n),
            _ => Pool::new(workers),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Map `f` over contiguous subranges of `[start, end)` and return the
    /// per-chunk results in chunk order.
    pub fn run_chunks<T, F>(&self, start: u64, end: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, u64) -> T + Sync,
    {
        let len = end.saturating_sub(start);
        if len == 0 {
            return Vec::new();
        }
        // Chunk geometry is a function of the range alone.
        let chunks = 64u64.min(len) as usize;
        let bounds: Vec<(u64, u64)> = (0..chunks)
            .map(|i| {
                let a = start + len * i as u64 / chunks as u64;
                let b = start + len * (i as u64 + 1) / chunks as u64;
                (a, b)
            })
            .collect();
        if self.workers == 1 {
            return bounds.iter().map(|&(a, b)| f(a, b)).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..chunks).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..self.workers.min(chunks) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= chunks {
                        break;
                    }
                    let (a, b) = bounds[i];
                    let out = f(a, b);
                    slots.lock().unwrap()[i] = Some(out);
                });
            }
        });
        slots
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|s| s.expect("chunk completed"))
            .collect()
    }

    /// Fold chunk results in order with an associative `merge`.
    pub fn run_reduce<T, F, M>(&self, start: u64, end: u64, f: F, init: T, merge: M) -> T
    where
        T: Send,
        F: Fn(u64, u64) -> T + Sync,
        M: Fn(T, T) -> T,
    {
        self.run_chunks(start, end, f)
            .into_iter()
            .fold(init, merge)
    }
}
