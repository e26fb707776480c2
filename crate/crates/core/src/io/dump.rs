//! Text dumps of the intermediate artifacts of one window.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::ec::{BackgroundTheory, WindowContext};
use crate::error::Result;
use crate::incremental::AnnotatedClause;
use crate::induction::oracle::transformed_task;
use crate::induction::{generalization_transform, refinement_transform};
use crate::kernel::build_kernel;
use crate::logic::mode::LanguageConfig;
use crate::solver::ground;

/// Which artifacts to dump.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dumps {
    pub kernel: bool,
    pub transformed: bool,
    pub ground: bool,
}

impl Dumps {
    pub fn any(&self) -> bool {
        self.kernel || self.transformed || self.ground
    }
}

/// The requested artifacts of a window under the running hypothesis `h`.
pub fn dump_window(
    b: &BackgroundTheory,
    ctx: &WindowContext,
    h: &[AnnotatedClause],
    lang: &LanguageConfig,
    what: Dumps,
) -> Result<String> {
    let mut out = String::new();
    if !what.any() {
        return Ok(out);
    }
    let k = build_kernel(ctx, lang)?;
    if what.kernel {
        writeln!(out, "% window {}: kernel set (ground)", ctx.window_id).expect("string write");
        for c in &k.ground_clauses {
            writeln!(out, "{c}").expect("string write");
        }
        writeln!(out, "% window {}: kernel set (variabilized)", ctx.window_id).expect("string write");
        for c in &k.variabilized {
            writeln!(out, "{c}").expect("string write");
        }
    }
    if what.transformed {
        writeln!(out, "% window {}: transformed kernel set", ctx.window_id).expect("string write");
        write!(out, "{}", generalization_transform(&k.variabilized, lang).clauses).expect("string write");
        writeln!(out, "% window {}: transformed hypothesis", ctx.window_id).expect("string write");
        write!(out, "{}", refinement_transform(h, lang)?.clauses).expect("string write");
    }
    if what.ground {
        let task = transformed_task(b, ctx, &k.variabilized, h, lang)?;
        let g = ground(&task.background, &task.domains, &BTreeSet::new())?;
        writeln!(out, "% window {}: ground program ({} rules)", ctx.window_id, g.len()).expect("string write");
        write!(out, "{g}").expect("string write");
    }
    Ok(out)
}
