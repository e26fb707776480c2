//! Precision and recall of a hypothesis on test windows, and run summaries.

use serde::{Deserialize, Serialize};

use crate::ec::eval::recognize_states;
use crate::ec::{BackgroundTheory, Window, WindowContext};
use crate::error::Result;
use crate::logic::term::Program;

/// What one scored decision is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Denominator {
    /// One decision per (fluent instance, time) pair.
    #[default]
    Instance,
    /// One decision per time point: a point is a true positive when the
    /// recognized and annotated instance sets are equal and nonempty, a false
    /// positive when some recognized instance is not annotated, and a false
    /// negative when some annotated instance is not recognized.
    TimePoint,
}

/// Confusion counts with the derived ratios.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scores {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

fn ratio(hit: usize, miss: usize, other_miss: usize) -> f64 {
    match hit + miss {
        0 if other_miss == 0 => 1.0,
        0 => 0.0,
        n => hit as f64 / n as f64,
    }
}

impl Scores {
    /// TP/(TP+FP); with no positive predictions, 1 if nothing was missed and 0 otherwise.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.fp, self.fn_)
    }

    /// TP/(TP+FN); with no annotated positives, 1 if nothing was wrongly predicted and 0 otherwise.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.fn_, self.fp)
    }

    fn add(&mut self, o: Scores) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

/// Scores one window: recognition starts from the annotated state at the
/// window's first time point, and every later time point is scored.
pub fn score_window(b: &BackgroundTheory, h: &Program, w: &Window, d: Denominator) -> Result<Scores> {
    let ctx = WindowContext::new(b, w)?;
    let states = recognize_states(&ctx, h)?;
    let mut s = Scores::default();
    for k in 1..=ctx.steps() {
        let (mut fp, mut fn_, mut any) = (0, 0, false);
        for (got, want) in states.iter().zip(&ctx.desired) {
            let (got, want) = (got[k], want[k]);
            match (got, want) {
                (true, true) => {
                    any = true;
                    if d == Denominator::Instance {
                        s.tp += 1;
                    }
                }
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        match d {
            Denominator::Instance => {
                s.fp += fp;
                s.fn_ += fn_;
            }
            Denominator::TimePoint => {
                s.tp += usize::from(any && fp == 0 && fn_ == 0);
                s.fp += usize::from(fp > 0);
                s.fn_ += usize::from(fn_ > 0);
            }
        }
    }
    Ok(s)
}

/// Joins windows that continue one another (next start within the previous
/// span) into single windows, so shared time points are scored once.
pub fn contiguous_segments(windows: &[Window]) -> Vec<Window> {
    let mut out: Vec<Window> = Vec::new();
    for w in windows {
        match out.last_mut() {
            Some(cur) if w.t_start >= cur.t_start && w.t_start <= cur.t_end => {
                cur.t_end = cur.t_end.max(w.t_end);
                for l in &w.narrative {
                    if !cur.narrative.contains(l) {
                        cur.narrative.push(l.clone());
                    }
                }
                for a in &w.annotation {
                    if !cur.annotation.contains(a) {
                        cur.annotation.push(a.clone());
                    }
                }
            }
            _ => {
                let mut seg = w.clone();
                seg.id = out.len() as u64 + 1;
                out.push(seg);
            }
        }
    }
    out
}

/// Summed scores over test windows. Contiguous windows are scored as one
/// segment whose state is seeded only at its first time point.
pub fn evaluate(b: &BackgroundTheory, h: &Program, test: &[Window], d: Denominator) -> Result<Scores> {
    let mut total = Scores::default();
    for w in contiguous_segments(test) {
        total.add(score_window(b, h, &w, d)?);
    }
    Ok(total)
}

/// Summary of a learning run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Head plus body literals of the final hypothesis.
    pub hypothesis_size: usize,
    pub clauses: usize,
    /// Revisions on new windows plus revisions during re-checks.
    pub revisions: usize,
    /// Stored-window reads over the whole run.
    pub window_reads: usize,
    pub windows: usize,
    /// Wall-clock seconds; informational only.
    pub training_time: f64,
}
