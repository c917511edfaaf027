//! Scans over a prime grid: deterministic task list, a worker pool sized by
//! the configuration, a single writer that appends records in task order,
//! resume against an existing output file, and a derived CSV summary.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::mpsc;

use resonator_core::arith::{is_prime_u64, next_prime_at_least};

use crate::config::RunConfig;
use crate::engine::{Engine, MIN_RECORD_Q};
use crate::records::{self, JsonlWriter, ScanRecord, SCHEMA_VERSION};
use crate::{CliError, Result};

/// One scan cell. Tasks are ordered (q ascending, then the sigma list, then
/// the theta list); the output file preserves that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Task {
    pub q: u64,
    pub sigma: f64,
    pub theta: f64,
}

impl Task {
    fn key(&self) -> records::RecordKey {
        (
            self.q,
            self.sigma.to_bits(),
            self.theta.to_bits(),
            SCHEMA_VERSION,
        )
    }
}

/// The largest prime `<= n`, if any.
fn prev_prime_at_most(n: u64) -> Option<u64> {
    (2..=n).rev().find(|&p| is_prime_u64(p))
}

/// The moduli a config selects. With a target count, `count` log-spaced
/// targets are rounded up to the next prime (targets whose next prime would
/// leave the range fall back to the largest prime `<= q_max`) and
/// deduplicated; without one, every prime in the range.
pub fn prime_targets(q_min: u64, q_max: u64, count: Option<usize>) -> Vec<u64> {
    if q_min > q_max {
        return Vec::new();
    }
    match count {
        None => {
            let mut out = Vec::new();
            let mut q = next_prime_at_least(q_min.max(2));
            while q <= q_max {
                out.push(q);
                q = next_prime_at_least(q + 1);
            }
            out
        }
        Some(c) => {
            let lo = q_min.max(2) as f64;
            let hi = q_max as f64;
            let mut out: Vec<u64> = Vec::new();
            for i in 0..c {
                let target = if c == 1 {
                    lo
                } else {
                    lo * (hi / lo).powf(i as f64 / (c - 1) as f64)
                };
                let mut p = next_prime_at_least(target.ceil() as u64);
                if p > q_max {
                    match prev_prime_at_most(q_max) {
                        Some(down) if down >= q_min => p = down,
                        _ => continue,
                    }
                }
                if out.last() != Some(&p) {
                    out.push(p);
                }
            }
            out
        }
    }
}

/// The full deterministic task list for a config.
pub fn tasks(cfg: &RunConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for q in prime_targets(cfg.q_min, cfg.q_max, cfg.count) {
        for &sigma in &cfg.sigma_list {
            for &theta in &cfg.theta_list {
                out.push(Task { q, sigma, theta });
            }
        }
    }
    out
}

/// What a scan did, for reporting.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub tasks_total: usize,
    pub skipped: usize,
    pub written: usize,
    pub out: PathBuf,
    pub summary: PathBuf,
}

/// Run a scan: skip cells already present in the output file, compute the
/// rest on `workers` threads, append records in task order (flushing each),
/// then regenerate the CSV summary from the complete file.
pub fn run(cfg: &RunConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let out = cfg.out.clone().ok_or_else(|| {
        CliError::Validation("scan needs an output path (--out or `out` in the config)".into())
    })?;

    let all = tasks(cfg);
    for t in &all {
        if t.q < MIN_RECORD_Q {
            return Err(CliError::Validation(format!(
                "scan selects q = {} but records need q >= {MIN_RECORD_Q}; raise q_min",
                t.q
            )));
        }
        if t.theta.cos() < 0.0 {
            return Err(CliError::Validation(format!(
                "theta = {} has negative cosine; records are defined only for cos(theta) >= 0",
                t.theta
            )));
        }
    }

    let done = records::existing_keys(&out)?;
    let todo: Vec<Task> = all
        .iter()
        .copied()
        .filter(|t| !done.contains(&t.key()))
        .collect();
    let skipped = all.len() - todo.len();

    let mut writer = JsonlWriter::append(&out)?;
    let written = if todo.is_empty() {
        0
    } else {
        let moduli: Vec<u64> = todo.iter().map(|t| t.q).collect();
        let engine = Engine::new(cfg, &moduli)?;
        run_tasks(cfg, &engine, &todo, &mut writer)?
    };

    let final_records = records::read_jsonl(&out)?;
    let summary = records::summary_path(&out);
    records::write_summary(&final_records, &summary)?;

    Ok(ScanReport {
        tasks_total: all.len(),
        skipped,
        written,
        out,
        summary,
    })
}

/// Execute `todo` on a pool and write results in task order. The writer
/// lives on the calling thread; workers send `(ordinal, result)` over a
/// channel, and a reorder buffer releases the contiguous prefix so an
/// interrupted scan still leaves a clean, resumable file.
fn run_tasks(
    cfg: &RunConfig,
    engine: &Engine,
    todo: &[Task],
    writer: &mut JsonlWriter,
) -> Result<usize> {
    let workers = cfg.effective_workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;

    type Item = (usize, Result<ScanRecord>);
    let (tx, rx) = mpsc::channel::<Item>();
    for (ordinal, &task) in todo.iter().enumerate() {
        let tx = tx.clone();
        let engine = engine.clone();
        let cfg = cfg.clone();
        pool.spawn(move || {
            let res = engine.resonate(&cfg, task.q, task.sigma, task.theta);
            // the receiver only disappears after an earlier task failed;
            // nothing left to report then
            let _ = tx.send((ordinal, res));
        });
    }
    drop(tx);

    let mut pending: BTreeMap<usize, Result<ScanRecord>> = BTreeMap::new();
    let mut next = 0usize;
    let mut written = 0usize;
    for (ordinal, res) in rx {
        pending.insert(ordinal, res);
        while let Some(res) = pending.remove(&next) {
            // abort on the first failure in task order; everything written
            // so far is a valid prefix, so a later resume stays consistent
            let rec = res?;
            writer.write(&rec)?;
            written += 1;
            next += 1;
        }
    }
    Ok(written)
}
