//! Kernel Sets: abduced head atoms saturated into most-specific clauses.

use std::collections::{BTreeMap, BTreeSet};

use crate::ec::{HeadKind, WindowContext};
use crate::error::{Error, Result};
use crate::logic::mode::{variabilize, LanguageConfig, Marker, ModeDeclaration};
use crate::logic::term::{Clause, Literal, Term};
use crate::solver::AbductiveSolution;

/// Ground and variabilized most-specific clauses of one window.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelSet {
    pub ground_clauses: Vec<Clause>,
    pub variabilized: Vec<Clause>,
    /// `origin[i]` is the index of the ground clause that `variabilized[i]` lifts.
    pub origin: Vec<usize>,
}

impl KernelSet {
    pub fn len(&self) -> usize {
        self.variabilized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variabilized.is_empty()
    }

    pub fn origin_of(&self, i: usize) -> &Clause {
        &self.ground_clauses[self.origin[i]]
    }
}

/// Head atoms forced by the annotation: an initiation before every false-to-true
/// transition and a termination before every true-to-false transition.
pub fn abduced_points(ctx: &WindowContext) -> Vec<(HeadKind, usize)> {
    let mut out = Vec::new();
    for p in 0..ctx.n_points() {
        match ctx.transition(p) {
            (false, true) => out.push((HeadKind::Init, p)),
            (true, false) => out.push((HeadKind::Term, p)),
            _ => {}
        }
    }
    out.sort_by_key(|&(k, p)| (k, ctx.point_parts(p).1, p));
    out
}

/// Minimal set of `initiatedAt`/`terminatedAt` atoms explaining the annotation.
///
/// Under forward stepping with the seeded initial state every transition is
/// explained by exactly one atom and no other atom may be added without
/// contradicting a closed-world negative, so the minimal explanation is unique.
pub fn abduce_heads(ctx: &WindowContext) -> AbductiveSolution {
    let delta = abduced_points(ctx).into_iter().map(|(k, p)| ctx.ground_head(k, p)).collect();
    AbductiveSolution::new(delta, 0)
}

fn cartesian(choices: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for opts in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Body literals of one mode that follow from the window given the available input terms.
fn mode_instances(
    ctx: &WindowContext,
    m: &ModeDeclaration,
    available: &BTreeMap<String, BTreeSet<Term>>,
) -> Vec<(Literal, Vec<(String, Term)>)> {
    let inputs_ok = |slots: &[crate::logic::mode::Slot]| {
        slots
            .iter()
            .filter(|s| s.marker == Marker::Input)
            .all(|s| available.get(&s.ty).is_some_and(|d| d.contains(&s.term)))
    };
    let mut out = Vec::new();
    if !m.negated {
        let name = m.schema.functor().unwrap_or_default();
        for fact in ctx.facts_of(name, m.schema.arity()) {
            let Some(slots) = m.slots(fact) else { continue };
            if !inputs_ok(&slots) {
                continue;
            }
            let outputs = slots.into_iter().filter(|s| s.marker == Marker::Output).map(|s| (s.ty, s.term)).collect();
            out.push((Literal::pos(fact.clone()), outputs));
        }
        return out;
    }
    let pms = m.placemarkers();
    if pms.iter().any(|(mk, _)| *mk == Marker::Output) {
        return out;
    }
    let empty = BTreeSet::new();
    let choices: Vec<Vec<Term>> = pms
        .iter()
        .map(|(mk, ty)| {
            let dom = match mk {
                Marker::Input => available.get(ty).unwrap_or(&empty),
                _ => ctx.typed.get(ty).unwrap_or(&empty),
            };
            dom.iter().cloned().collect()
        })
        .collect();
    for tuple in cartesian(&choices) {
        let mut it = tuple.into_iter();
        let atom = m.instantiate(&mut |_, _| it.next().expect("one term per placemarker"));
        if ctx.known_false(&atom) {
            out.push((Literal::neg(atom), Vec::new()));
        }
    }
    out
}

/// Saturates a ground head atom: every body-mode instance that holds in the
/// window and whose inputs are reachable from the head within the depth bound.
pub fn saturate_atom(ctx: &WindowContext, cfg: &LanguageConfig, head: &Term) -> Result<Clause> {
    let hm = cfg.head_mode(head).ok_or_else(|| Error::NoMatchingMode(head.to_string()))?;
    let mut available: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
    for s in hm.slots(head).expect("head mode matched") {
        available.entry(s.ty).or_default().insert(s.term);
    }
    let body_modes: Vec<&ModeDeclaration> = cfg.body_modes().collect();
    let mut found: BTreeSet<(usize, Literal)> = BTreeSet::new();
    for _layer in 0..=cfg.depth_bound {
        let mut grown = false;
        let mut next = available.clone();
        for (mi, m) in body_modes.iter().enumerate() {
            for (lit, outputs) in mode_instances(ctx, m, &available) {
                for (ty, t) in outputs {
                    grown |= next.entry(ty).or_default().insert(t);
                }
                found.insert((mi, lit));
            }
        }
        available = next;
        if !grown {
            break;
        }
    }
    let mut body: Vec<Literal> = Vec::with_capacity(found.len());
    for (_, lit) in found {
        if !body.contains(&lit) {
            body.push(lit);
        }
    }
    Ok(Clause::new(head.clone(), body))
}

/// Ground clauses for the given atoms, deduplicated, then variabilized.
pub fn saturate(ctx: &WindowContext, cfg: &LanguageConfig, delta: &[Term]) -> Result<KernelSet> {
    let mut k = KernelSet::default();
    for atom in delta {
        let g = saturate_atom(ctx, cfg, atom)?;
        if k.ground_clauses.contains(&g) {
            continue;
        }
        let v = variabilize(&g, cfg)?;
        k.origin.push(k.ground_clauses.len());
        k.ground_clauses.push(g);
        k.variabilized.push(v);
    }
    Ok(k)
}

/// Abduction followed by saturation and variabilization.
pub fn build_kernel(ctx: &WindowContext, cfg: &LanguageConfig) -> Result<KernelSet> {
    let delta = abduce_heads(ctx);
    saturate(ctx, cfg, &delta.delta)
}

/// Kernel clause for one point, as used when completing support sets.
pub fn kernel_clause_at(
    ctx: &WindowContext,
    cfg: &LanguageConfig,
    kind: HeadKind,
    p: usize,
) -> Result<(Clause, Clause)> {
    let g = saturate_atom(ctx, cfg, &ctx.ground_head(kind, p))?;
    let v = variabilize(&g, cfg)?;
    Ok((g, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::{parse_windows, BackgroundTheory};
    use crate::logic::mode::parse_modes;
    use crate::logic::term::Program;

    const MODES: &str = "modeh(initiatedAt(fighting(+pid,+pid),+time)).
modeh(terminatedAt(fighting(+pid,+pid),+time)).
modeb(happensAt(abrupt(+pid),+time)).
modeb(happensAt(walking(+pid),+time)).
modeb(holdsAt(close(+pid,+pid,#dist),+time)).
modeb(not holdsAt(close(+pid,+pid,#dist),+time)).
";

    const SINGLE_WINDOW: &str = "window 1 1 3.
happensAt(abrupt(id1),1).
happensAt(walking(id2),1).
not holdsAt(close(id1,id2,23),1).
happensAt(abrupt(id3),2).
happensAt(abrupt(id4),2).
holdsAt(close(id3,id4,23),2).
%% annotation
holdsAt(fighting(id1,id2),1).
holdsAt(fighting(id3,id4),3).
";

    fn setup() -> (WindowContext, LanguageConfig) {
        let modes = parse_modes(MODES).unwrap();
        let b = BackgroundTheory::new(modes.clone(), Program::default()).unwrap();
        let w = &parse_windows(SINGLE_WINDOW).unwrap()[0];
        (WindowContext::new(&b, w).unwrap(), LanguageConfig::new(modes, 1))
    }

    #[test]
    fn single_window_kernel() {
        let (ctx, cfg) = setup();
        let d: Vec<String> = abduce_heads(&ctx).delta.iter().map(|t| t.to_string()).collect();
        assert_eq!(d, vec!["initiatedAt(fighting(id3,id4),2)", "terminatedAt(fighting(id1,id2),1)"]);
        let k = build_kernel(&ctx, &cfg).unwrap();
        let v: Vec<String> = k.variabilized.iter().map(|c| c.to_string()).collect();
        assert!(v.contains(&"terminatedAt(fighting(X,Y),T) :- happensAt(abrupt(X),T), happensAt(walking(Y),T), not holdsAt(close(X,Y,23),T).".to_string()));
        assert!(v.contains(&"initiatedAt(fighting(X,Y),T) :- happensAt(abrupt(X),T), happensAt(abrupt(Y),T), holdsAt(close(X,Y,23),T).".to_string()));
    }
}
