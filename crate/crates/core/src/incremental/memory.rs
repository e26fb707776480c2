//! The historical memory: an append-only window store with read accounting.
//!
//! A file-backed store keeps `windows.log` (windows in the stream format, in
//! arrival order) and `windows.idx` (one 16-byte little-endian record of
//! offset and length per window), so a single window can be read without
//! loading the others. Every read through [`HistoricalMemory::read`] is
//! counted per (step, window).

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::ec::{parse_windows, Window};
use crate::error::{Error, Result};

const INDEX_RECORD: usize = 16;

enum Backend {
    Memory(Vec<String>),
    File { dir: PathBuf, log: File, index: Vec<(u64, u64)> },
}

/// Append-only store of past windows.
pub struct HistoricalMemory {
    backend: Backend,
    ids: Vec<u64>,
    step: u64,
    /// (step, window id) ↦ number of reads.
    visits: BTreeMap<(u64, u64), usize>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

impl HistoricalMemory {
    pub fn in_memory() -> Self {
        HistoricalMemory { backend: Backend::Memory(Vec::new()), ids: Vec::new(), step: 0, visits: BTreeMap::new() }
    }

    /// Opens (or creates) a store directory, reloading its index.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let log_path = dir.join("windows.log");
        let idx_path = dir.join("windows.idx");
        let log = OpenOptions::new().create(true).read(true).append(true).open(&log_path).map_err(io_err(&log_path))?;
        let raw = match fs::read(&idx_path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(&idx_path, e)),
        };
        if raw.len() % INDEX_RECORD != 0 {
            return Err(Error::Data(format!("{}: truncated index", idx_path.display())));
        }
        let index: Vec<(u64, u64)> = raw
            .chunks(INDEX_RECORD)
            .map(|r| {
                let off = u64::from_le_bytes(r[..8].try_into().expect("8 bytes"));
                let len = u64::from_le_bytes(r[8..].try_into().expect("8 bytes"));
                (off, len)
            })
            .collect();
        let stored = index.len();
        let mut mem = HistoricalMemory {
            backend: Backend::File { dir: dir.to_path_buf(), log, index },
            ids: Vec::new(),
            step: 0,
            visits: BTreeMap::new(),
        };
        for i in 0..stored {
            let w = mem.fetch(i)?;
            mem.ids.push(w.id);
        }
        Ok(mem)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Window ids in arrival order.
    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    /// Directory of a file-backed store.
    pub fn dir(&self) -> Option<&Path> {
        match &self.backend {
            Backend::Memory(_) => None,
            Backend::File { dir, .. } => Some(dir),
        }
    }

    pub fn append(&mut self, w: &Window) -> Result<()> {
        let text = w.to_string();
        match &mut self.backend {
            Backend::Memory(v) => v.push(text),
            Backend::File { dir, log, index } => {
                let log_path = dir.join("windows.log");
                let off = log.seek(SeekFrom::End(0)).map_err(io_err(&log_path))?;
                log.write_all(text.as_bytes()).map_err(io_err(&log_path))?;
                log.flush().map_err(io_err(&log_path))?;
                let idx_path = dir.join("windows.idx");
                let mut idx =
                    OpenOptions::new().create(true).append(true).open(&idx_path).map_err(io_err(&idx_path))?;
                let mut rec = [0u8; INDEX_RECORD];
                rec[..8].copy_from_slice(&off.to_le_bytes());
                rec[8..].copy_from_slice(&(text.len() as u64).to_le_bytes());
                idx.write_all(&rec).map_err(io_err(&idx_path))?;
                index.push((off, text.len() as u64));
            }
        }
        self.ids.push(w.id);
        Ok(())
    }

    fn fetch(&mut self, i: usize) -> Result<Window> {
        let text = match &mut self.backend {
            Backend::Memory(v) => v[i].clone(),
            Backend::File { dir, log, index } => {
                let log_path = dir.join("windows.log");
                let (off, len) = index[i];
                log.seek(SeekFrom::Start(off)).map_err(io_err(&log_path))?;
                let mut buf = vec![0u8; len as usize];
                log.read_exact(&mut buf).map_err(io_err(&log_path))?;
                String::from_utf8(buf).map_err(|e| Error::Data(format!("{}: {e}", log_path.display())))?
            }
        };
        let mut ws = parse_windows(&text)?;
        if ws.len() != 1 {
            return Err(Error::Data(format!("stored window {i} does not parse to one window")));
        }
        Ok(ws.remove(0))
    }

    /// Reads the `i`-th stored window, counting the read against the current step.
    pub fn read(&mut self, i: usize) -> Result<Window> {
        let w = self.fetch(i)?;
        *self.visits.entry((self.step, w.id)).or_default() += 1;
        Ok(w)
    }

    /// Reads without accounting; for audits outside the learning loop.
    pub fn read_unaccounted(&mut self, i: usize) -> Result<Window> {
        self.fetch(i)
    }

    /// Starts accounting reads for a new step.
    pub fn begin_step(&mut self, step: u64) {
        self.step = step;
    }

    /// Reads per window during a step.
    pub fn reads_in_step(&self, step: u64) -> BTreeMap<u64, usize> {
        self.visits.range((step, 0)..=(step, u64::MAX)).map(|(&(_, w), &n)| (w, n)).collect()
    }

    pub fn visit_counter(&self) -> &BTreeMap<(u64, u64), usize> {
        &self.visits
    }

    /// Writes a per-step hypothesis snapshot next to a file-backed store.
    pub fn write_snapshot(&self, step: u64, text: &str) -> Result<Option<PathBuf>> {
        let Some(dir) = self.dir() else {
            return Ok(None);
        };
        let path = dir.join(format!("hypothesis.{step}.lp"));
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(Some(path))
    }
}
