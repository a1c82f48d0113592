//! Detector that fans a batch out over scoped threads. Results are identical
//! to the serial detector: every center keeps its global seed and the merged
//! outcome list is cut at the first True in center order.

use std::sync::Mutex;
use std::thread;

use nhgap_core::fqed::{fqed_batch_cached, Backend, Batch, FilterCache};
use nhgap_core::{Detector, FqedConfig, Result, SpectralOperand, C64};

#[derive(Debug)]
pub struct ThreadedDetector<'a> {
    op: &'a SpectralOperand,
    cfg: FqedConfig,
    threads: usize,
    cache: Mutex<FilterCache>,
}

impl<'a> ThreadedDetector<'a> {
    pub fn new(op: &'a SpectralOperand, cfg: FqedConfig, threads: usize) -> Self {
        ThreadedDetector { op, cfg, threads: threads.max(1), cache: Mutex::new(FilterCache::new()) }
    }
}

impl Detector for ThreadedDetector<'_> {
    fn operand(&self) -> &SpectralOperand {
        self.op
    }

    fn config(&self) -> &FqedConfig {
        &self.cfg
    }

    fn batch(&self, centers: &[C64], eps_th: f64, early_exit: bool, stream: u64) -> Result<Batch> {
        let mut cache = self.cache.lock().expect("filter cache poisoned");
        if self.threads == 1 || centers.len() < 2 * self.threads {
            return fqed_batch_cached(self.op, centers, eps_th, &self.cfg, early_exit, stream, 0, &mut cache);
        }
        if self.cfg.backend == Backend::Filtered {
            for &mu in centers {
                cache.get(eps_th, mu, self.cfg.delta)?;
            }
        }
        let shared: &FilterCache = &cache;
        let chunk = centers.len().div_ceil(self.threads);
        let parts: Vec<Result<Batch>> = thread::scope(|s| {
            let handles: Vec<_> = centers
                .chunks(chunk)
                .enumerate()
                .map(|(i, c)| {
                    let offset = (i * chunk) as u64;
                    let mut local = shared.clone();
                    s.spawn(move || fqed_batch_cached(self.op, c, eps_th, &self.cfg, early_exit, stream, offset, &mut local))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("detector thread panicked")).collect()
        });
        let mut out = Batch::default();
        for (i, part) in parts.into_iter().enumerate() {
            let part = part?;
            if out.first_true.is_none() {
                if let Some(j) = part.first_true {
                    out.first_true = Some(i * chunk + j);
                }
            }
            let stop = early_exit && part.first_true.is_some();
            out.outcomes.extend(part.outcomes);
            if stop {
                break;
            }
        }
        Ok(out)
    }
}
