//! Example windows and the stream file format.
//!
//! ```text
//! window 1 1 3.
//! happensAt(abrupt(id1),1).
//! not holdsAt(close(id1,id2,23),1).
//! %% annotation
//! holdsAt(fighting(id1,id2),1).
//! ```

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::parse::parse_statements_at;
use crate::logic::term::{Literal, Term};

/// One batch of consecutive time points: narrative plus positive annotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub id: u64,
    pub t_start: i64,
    pub t_end: i64,
    /// Ground facts; a negated entry states the atom is false.
    pub narrative: Vec<Literal>,
    /// Positive `holdsAt(F,T)` atoms.
    pub annotation: Vec<Term>,
}

/// Time argument of a `happensAt/2` or `holdsAt/2` atom.
pub fn time_of(atom: &Term) -> Option<i64> {
    match atom {
        Term::Compound(f, args) if args.len() == 2 && (f == "happensAt" || f == "holdsAt") => args[1].as_int(),
        _ => None,
    }
}

/// Fluent argument of a `holdsAt/2` atom.
pub fn fluent_of(atom: &Term) -> Option<&Term> {
    match atom {
        Term::Compound(f, args) if args.len() == 2 && f == "holdsAt" => Some(&args[0]),
        _ => None,
    }
}

pub fn holds_at(fluent: Term, t: i64) -> Term {
    Term::compound("holdsAt", vec![fluent, Term::Int(t)])
}

impl Window {
    pub fn new(id: u64, t_start: i64, t_end: i64) -> Self {
        Window { id, t_start, t_end, narrative: Vec::new(), annotation: Vec::new() }
    }

    pub fn times(&self) -> std::ops::RangeInclusive<i64> {
        self.t_start..=self.t_end
    }

    pub fn len(&self) -> usize {
        (self.t_end - self.t_start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks window size, timestamps and annotation shape.
    pub fn validate(&self) -> Result<()> {
        if self.t_end <= self.t_start {
            return Err(Error::Data(format!(
                "window {} spans {}..{}; at least two time points are required",
                self.id, self.t_start, self.t_end
            )));
        }
        let in_range = |a: &Term| -> Result<()> {
            let t = time_of(a)
                .ok_or_else(|| Error::Data(format!("window {}: `{a}` is not a happensAt/holdsAt fact", self.id)))?;
            if !self.times().contains(&t) {
                return Err(Error::Data(format!(
                    "window {}: timestamp of `{a}` lies outside {}..{}",
                    self.id, self.t_start, self.t_end
                )));
            }
            if !a.is_ground() {
                return Err(Error::Data(format!("window {}: `{a}` is not ground", self.id)));
            }
            Ok(())
        };
        for l in &self.narrative {
            in_range(&l.atom)?;
        }
        for a in &self.annotation {
            in_range(a)?;
            if fluent_of(a).is_none() {
                return Err(Error::Data(format!("window {}: annotation `{a}` is not a holdsAt atom", self.id)));
            }
        }
        Ok(())
    }

    /// Concatenates consecutive windows and cuts the result into windows of
    /// `g` transitions; consecutive windows share their boundary time point.
    pub fn rewindow(windows: &[Window], g: usize) -> Result<Vec<Window>> {
        if g < 2 {
            return Err(Error::Data(format!("window size {g} is below 2")));
        }
        let (Some(first), Some(last)) = (windows.first(), windows.last()) else {
            return Ok(Vec::new());
        };
        let (start, end) = (first.t_start, last.t_end);
        let mut out = Vec::new();
        let mut t = start;
        while t < end {
            let hi = (t + g as i64).min(end);
            out.push(Window::new(out.len() as u64 + 1, t, hi));
            t = hi;
        }
        for w in windows {
            for l in &w.narrative {
                let ts = time_of(&l.atom).unwrap_or(w.t_start);
                for target in out.iter_mut().filter(|o| o.times().contains(&ts)) {
                    if !target.narrative.contains(l) {
                        target.narrative.push(l.clone());
                    }
                }
            }
            for a in &w.annotation {
                let ts = time_of(a).unwrap_or(w.t_start);
                for target in out.iter_mut().filter(|o| o.times().contains(&ts)) {
                    if !target.annotation.contains(a) {
                        target.annotation.push(a.clone());
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window {} {} {}.", self.id, self.t_start, self.t_end)?;
        for l in &self.narrative {
            writeln!(f, "{l}.")?;
        }
        writeln!(f, "%% annotation")?;
        for a in &self.annotation {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(u64, i64, i64)> {
    let bad = |msg: &str| Error::Syntax { line: lineno, col: 1, msg: msg.to_string() };
    let body = line.trim().strip_suffix('.').ok_or_else(|| bad("window header must end with `.`"))?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "window" {
        return Err(bad("expected `window <id> <t_start> <t_end>.`"));
    }
    let id = parts[1].parse().map_err(|_| bad("window id must be a non-negative integer"))?;
    let ts = parts[2].parse().map_err(|_| bad("t_start must be an integer"))?;
    let te = parts[3].parse().map_err(|_| bad("t_end must be an integer"))?;
    Ok((id, ts, te))
}

fn is_header(line: &str) -> bool {
    line.trim_start().starts_with("window ")
}

fn is_annotation_marker(line: &str) -> bool {
    line.trim() == "%% annotation"
}

/// Parses every window of a stream text.
pub fn parse_windows(src: &str) -> Result<Vec<Window>> {
    let lines: Vec<&str> = src.lines().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.trim().is_empty() || (line.trim_start().starts_with('%') && !is_annotation_marker(line)) {
            i += 1;
            continue;
        }
        if !is_header(line) {
            return Err(Error::Syntax { line: i + 1, col: 1, msg: "expected a window header".into() });
        }
        let (id, ts, te) = parse_header(line, i + 1)?;
        let mut w = Window::new(id, ts, te);
        i += 1;
        let narr_start = i;
        while i < lines.len() && !is_annotation_marker(lines[i]) && !is_header(lines[i]) {
            i += 1;
        }
        let narr = lines[narr_start..i].join("\n");
        for s in parse_statements_at(&narr, narr_start + 1)? {
            if !s.body.is_empty() {
                return Err(Error::Syntax { line: s.line, col: 1, msg: "narrative entries must be facts".into() });
            }
            w.narrative.push(s.head);
        }
        if i < lines.len() && is_annotation_marker(lines[i]) {
            i += 1;
            let ann_start = i;
            while i < lines.len() && !is_header(lines[i]) {
                i += 1;
            }
            let ann = lines[ann_start..i].join("\n");
            for s in parse_statements_at(&ann, ann_start + 1)? {
                if s.head.negated || !s.body.is_empty() {
                    return Err(Error::Syntax {
                        line: s.line,
                        col: 1,
                        msg: "annotation entries must be positive facts".into(),
                    });
                }
                w.annotation.push(s.head.atom);
            }
        }
        w.validate()?;
        out.push(w);
    }
    Ok(out)
}

/// Serializes windows in the stream format.
pub fn serialize_windows(ws: &[Window]) -> String {
    ws.iter().map(|w| w.to_string()).collect()
}

/// Reads a stream file, or every `*.win` / `*.lp` file of a directory in name order.
pub fn read_stream(path: &Path) -> Result<Vec<Window>> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p, e));
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "win"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(parse_windows(&read(&f)?)?);
        }
        Ok(out)
    } else {
        parse_windows(&read(path)?)
    }
}
