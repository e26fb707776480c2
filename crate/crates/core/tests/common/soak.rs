//! Seeded synthetic runs of the learner on the fighting task.

use std::path::Path;

use iled::ec::{BackgroundTheory, Window};
use iled::incremental::{HistoricalMemory, Hypothesis, LearnConfig};
use iled::io::{fighting_task, fighting_truth, generate_synthetic, learn_stream, RunResult, RunSinks, SyntheticConfig};
use iled::logic::LanguageConfig;
use iled::Result;

pub const SOAK_EXAMPLES: usize = 500;
pub const SOAK_SEED: u64 = 1;
pub const TEST_EXAMPLES: usize = 200;
pub const TEST_SEED: u64 = 1001;

pub fn stream(n: usize, seed: u64, g: usize) -> (BackgroundTheory, LanguageConfig, Vec<Window>) {
    let (b, lang) = fighting_task();
    let ws = generate_synthetic(&fighting_truth(), &b, &SyntheticConfig::new(n, seed), g).unwrap();
    (b, lang, ws)
}

/// Learns from the stream, writing the store, snapshots and metrics under
/// `dir` when given, and auditing after every step when `audit` is set.
pub fn run(n: usize, seed: u64, g: usize, jobs: usize, dir: Option<&Path>, audit: bool) -> Result<RunResult> {
    let (b, lang, ws) = stream(n, seed, g);
    let mut cfg = LearnConfig::new(lang);
    cfg.jobs = jobs;
    let mut mem = match dir {
        Some(d) => HistoricalMemory::open(&d.join("store"))?,
        None => HistoricalMemory::in_memory(),
    };
    let sinks = RunSinks { metrics: dir.map(|d| d.join("metrics.jsonl")), timing: None, audit };
    learn_stream(&ws, &b, &cfg, &mut mem, Hypothesis::default(), &sinks, &mut |_, _, _| Ok(()))
}

/// Every file under `dir` with its bytes, by relative path.
pub fn snapshot_files(dir: &Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    let mut out = std::collections::BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}
