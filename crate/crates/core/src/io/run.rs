//! Driving the learner over a stream and recording what each step did.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ec::{BackgroundTheory, Window};
use crate::error::{Error, Result};
use crate::incremental::{audit, iled_step, AuditReport, HistoricalMemory, Hypothesis, LearnConfig, StepReport};

/// One line of the metrics file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    #[serde(flatten)]
    pub report: StepReport,
    /// Revisions so far, counting revisions on stored windows.
    pub revisions_total: usize,
}

/// One line of the timing file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub step: u64,
    pub seconds: f64,
}

/// Where a run writes its records.
#[derive(Clone, Debug, Default)]
pub struct RunSinks {
    /// Line-delimited step records.
    pub metrics: Option<PathBuf>,
    /// Line-delimited wall-clock times, kept apart so the metrics file is reproducible.
    pub timing: Option<PathBuf>,
    /// Audit every stored window after each step and fail on a violation.
    pub audit: bool,
}

/// Outcome of a run.
#[derive(Clone, Debug, Default)]
pub struct RunResult {
    pub hypothesis: Hypothesis,
    pub records: Vec<StepRecord>,
    pub audits: Vec<AuditReport>,
    pub seconds: f64,
}

impl RunResult {
    pub fn revisions(&self) -> usize {
        self.records.last().map_or(0, |r| r.revisions_total)
    }

    pub fn window_reads(&self) -> usize {
        self.records.iter().map(|r| r.report.windows_read).sum()
    }

    pub fn max_reads_per_window(&self) -> usize {
        self.records.iter().map(|r| r.report.max_reads_per_window).max().unwrap_or(0)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_line<T: Serialize>(out: &mut Option<(PathBuf, BufWriter<File>)>, value: &T) -> Result<()> {
    if let Some((path, w)) = out {
        let line = serde_json::to_string(value).map_err(|e| Error::Data(format!("serializing record: {e}")))?;
        writeln!(w, "{line}").and_then(|_| w.flush()).map_err(|e| Error::io(path.as_path(), e))?;
    }
    Ok(())
}

/// Called before each step with the step number, the running hypothesis and the window.
pub type StepHook<'a> = dyn FnMut(u64, &Hypothesis, &Window) -> Result<()> + 'a;

/// Feeds `windows` to the learner in order, starting from `h`. After each
/// step a hypothesis snapshot is written next to a file-backed store.
pub fn learn_stream(
    windows: &[Window],
    b: &BackgroundTheory,
    cfg: &LearnConfig,
    mem: &mut HistoricalMemory,
    h: Hypothesis,
    sinks: &RunSinks,
    before_step: &mut StepHook<'_>,
) -> Result<RunResult> {
    let open = |p: &Option<PathBuf>| -> Result<Option<(PathBuf, BufWriter<File>)>> {
        p.as_ref().map(|p| Ok((p.clone(), create(p)?))).transpose()
    };
    let mut metrics = open(&sinks.metrics)?;
    let mut timing = open(&sinks.timing)?;
    let mut run = RunResult { hypothesis: h, ..Default::default() };
    let started = Instant::now();
    let first_step = mem.len() as u64 + 1;
    for (k, w) in windows.iter().enumerate() {
        let step = first_step + k as u64;
        before_step(step, &run.hypothesis, w)?;
        let t = Instant::now();
        let report = iled_step(&mut run.hypothesis, w, mem, b, cfg, step)?;
        let seconds = t.elapsed().as_secs_f64();
        let revisions_total = run.revisions() + usize::from(report.revised) + report.recheck_revisions;
        let record = StepRecord { report, revisions_total };
        write_line(&mut metrics, &record)?;
        write_line(&mut timing, &TimingRecord { step, seconds })?;
        mem.write_snapshot(step, &run.hypothesis.to_string())?;
        if sinks.audit {
            let a = audit(&run.hypothesis, mem, b)?;
            if !a.is_clean() {
                return Err(Error::Invariant(format!("audit after step {step} failed: {a:?}")));
            }
            run.audits.push(a);
        }
        run.records.push(record);
    }
    run.seconds = started.elapsed().as_secs_f64();
    Ok(run)
}
