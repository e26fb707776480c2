//! The abductive search over `use` atoms, specialised to Event Calculus windows.
//!
//! Each Kernel clause and each (hypothesis clause, support clause) pair is a
//! component that selects exactly one option: a subset of body literals to
//! keep (Kernel) or a subset of extra support literals to add (refinement).
//! Every option's firing points are computed as bitsets over the window's
//! (fluent instance, time) points. A branch-and-bound search then picks one
//! option per component such that the resulting hypothesis reproduces every
//! annotated transition, minimising the number of `use` atoms, then the
//! literal count of the induced clauses, then their total number of firing
//! points, then the sorted atoms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::ec::{HeadKind, WindowContext};
use crate::error::{Error, Result};
use crate::incremental::support::AnnotatedClause;
use crate::induction::transform::{align_support, AlignedSupport};
use crate::logic::term::{Clause, Literal, Term};

/// Largest body (or extra-literal set) whose subsets are enumerated.
pub const MAX_ENUMERATED_LITERALS: usize = 18;

/// Where a component comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    /// Kernel clause `i` (0-based).
    Kernel(usize),
    /// Support clause `j` of hypothesis clause `i` (both 0-based).
    Support(usize, usize),
}

/// One choice for a component.
#[derive(Clone, Debug)]
pub struct Choice {
    /// 0-based body positions (Kernel) or extra-literal positions (support).
    pub chosen: Vec<usize>,
    pub clause: Clause,
    pub fires: FixedBitSet,
    pub atoms: Vec<Term>,
}

impl Choice {
    pub fn cost(&self) -> usize {
        self.atoms.len()
    }
}

/// A component: its options, with option 0 the default (unused Kernel clause
/// or unrefined hypothesis clause).
#[derive(Clone, Debug)]
pub struct Component {
    pub source: Source,
    pub kind: HeadKind,
    pub options: Vec<Choice>,
    /// Option indices the search may branch to.
    pub branchable: Vec<usize>,
    /// The default is not admissible and some other option must be chosen.
    pub must_decide: bool,
}

/// Literal-truth bitsets shared across components.
#[derive(Default)]
pub struct TruthCache {
    map: HashMap<(Term, Literal), Option<FixedBitSet>>,
    heads: HashMap<Term, FixedBitSet>,
}

impl TruthCache {
    fn head(&mut self, ctx: &WindowContext, head: &Term) -> FixedBitSet {
        self.heads.entry(head.clone()).or_insert_with(|| ctx.head_mask(head).expect("EC head")).clone()
    }

    fn literal(&mut self, ctx: &WindowContext, head: &Term, l: &Literal) -> Option<FixedBitSet> {
        self.map.entry((head.clone(), l.clone())).or_insert_with(|| ctx.literal_truth(head, l)).clone()
    }

    /// Firing points of `base ∪ extra`, reusing cached literal truths when possible.
    fn fires(&mut self, ctx: &WindowContext, c: &Clause) -> Result<FixedBitSet> {
        let mut bits = self.head(ctx, &c.head);
        for l in &c.body {
            match self.literal(ctx, &c.head, l) {
                Some(t) => bits.intersect_with(&t),
                None => return ctx.fires(c),
            }
        }
        Ok(bits)
    }
}

fn int(n: usize) -> Term {
    Term::Int(n as i64)
}

/// Sort key for `use` atoms: `use/2` before `use/3`, then numerically.
pub fn atom_key(t: &Term) -> (usize, Vec<i64>) {
    (t.arity(), t.args().iter().map(|a| a.as_int().unwrap_or(i64::MAX)).collect())
}

fn subsets(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_ENUMERATED_LITERALS {
        return Err(Error::ResourceCap(format!(
            "clause with {n} candidate literals exceeds the enumeration limit of {MAX_ENUMERATED_LITERALS}"
        )));
    }
    let mut out: Vec<Vec<usize>> =
        (0u32..(1u32 << n)).map(|mask| (0..n).filter(|&b| mask >> b & 1 == 1).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Point classes of a window.
#[derive(Clone, Debug)]
pub struct PointClasses {
    /// Annotated false-to-true transitions.
    pub up: FixedBitSet,
    /// Annotated true-to-false transitions.
    pub down: FixedBitSet,
    /// Annotated true-to-true transitions.
    pub stay: FixedBitSet,
    /// Points where the fluent is annotated false afterwards.
    pub next_false: FixedBitSet,
}

impl PointClasses {
    pub fn of(ctx: &WindowContext) -> Self {
        let n = ctx.n_points();
        let mut c = PointClasses {
            up: FixedBitSet::with_capacity(n),
            down: FixedBitSet::with_capacity(n),
            stay: FixedBitSet::with_capacity(n),
            next_false: FixedBitSet::with_capacity(n),
        };
        for p in 0..n {
            match ctx.transition(p) {
                (false, true) => c.up.insert(p),
                (true, false) => {
                    c.down.insert(p);
                    c.next_false.insert(p)
                }
                (true, true) => c.stay.insert(p),
                (false, false) => c.next_false.insert(p),
            }
        }
        c
    }
}

fn intersects(a: &FixedBitSet, b: &FixedBitSet) -> bool {
    !a.is_disjoint(b)
}

/// The search problem for one window.
pub struct Phi<'a> {
    pub ctx: &'a WindowContext,
    pub classes: PointClasses,
    pub components: Vec<Component>,
    pub hypothesis: &'a [AnnotatedClause],
    pub aligned: BTreeMap<(usize, usize), AlignedSupport>,
    /// Components of each hypothesis clause.
    pub by_clause: BTreeMap<usize, Vec<usize>>,
    pub node_cap: usize,
}

/// A solution of the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiSolution {
    /// Chosen option per component.
    pub choice: Vec<usize>,
    pub delta: Vec<Term>,
    pub literals: usize,
    /// Total firing points of the induced clauses.
    pub firings: usize,
}

impl PhiSolution {
    pub fn cost(&self) -> usize {
        self.delta.len()
    }

    fn key(&self) -> (usize, usize, usize, Vec<(usize, Vec<i64>)>) {
        (self.delta.len(), self.literals, self.firings, self.delta.iter().map(atom_key).collect())
    }
}

impl<'a> Phi<'a> {
    /// Builds the components; `kernel` is empty when no new clauses may be introduced.
    pub fn new(
        ctx: &'a WindowContext,
        kernel: &[Clause],
        hypothesis: &'a [AnnotatedClause],
        node_cap: usize,
    ) -> Result<Self> {
        let classes = PointClasses::of(ctx);
        let mut cache = TruthCache::default();
        let mut components = Vec::new();
        let mut aligned = BTreeMap::new();
        let mut by_clause: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

        for (i, ac) in hypothesis.iter().enumerate() {
            let d = &ac.clause;
            let kind = HeadKind::of(&d.head)
                .ok_or_else(|| Error::Invariant(format!("hypothesis clause `{d}` has a non-EC head")))?;
            let base_fires = cache.fires(ctx, d)?;
            let default = Choice { chosen: Vec::new(), clause: d.clone(), fires: base_fires, atoms: Vec::new() };
            if ac.supp.is_empty() {
                by_clause.entry(i).or_default().push(components.len());
                components.push(Component {
                    source: Source::Support(i, usize::MAX),
                    kind,
                    options: vec![default],
                    branchable: Vec::new(),
                    must_decide: false,
                });
                continue;
            }
            for (j, gamma) in ac.supp.iter().enumerate() {
                let a = align_support(d, gamma)?;
                let mut options = Vec::new();
                for e in subsets(a.extras.len())? {
                    let chosen: Vec<usize> = e.iter().map(|&x| a.extras[x]).collect();
                    let clause = a.specialize(&chosen);
                    let fires = cache.fires(ctx, &clause)?;
                    let atoms = chosen
                        .iter()
                        .map(|&k| Term::compound("use", vec![int(i + 1), int(j + 1), int(k + 1)]))
                        .collect();
                    options.push(Choice { chosen, clause, fires, atoms });
                }
                by_clause.entry(i).or_default().push(components.len());
                components.push(Component {
                    source: Source::Support(i, j),
                    kind,
                    options,
                    branchable: Vec::new(),
                    must_decide: false,
                });
                aligned.insert((i, j), a);
            }
        }

        for (i, k) in kernel.iter().enumerate() {
            let kind = HeadKind::of(&k.head)
                .ok_or_else(|| Error::Invariant(format!("kernel clause `{k}` has a non-EC head")))?;
            let mut options = vec![Choice {
                chosen: Vec::new(),
                clause: Clause::new(k.head.clone(), Vec::new()),
                fires: FixedBitSet::with_capacity(ctx.n_points()),
                atoms: Vec::new(),
            }];
            for s in subsets(k.body.len())?.into_iter().filter(|s| !s.is_empty()) {
                let clause = Clause::new(k.head.clone(), s.iter().map(|&x| k.body[x].clone()).collect());
                let fires = cache.fires(ctx, &clause)?;
                let mut atoms = vec![Term::compound("use", vec![int(i + 1), int(0)])];
                atoms.extend(s.iter().map(|&x| Term::compound("use", vec![int(i + 1), int(x + 1)])));
                options.push(Choice { chosen: s, clause, fires, atoms });
            }
            components.push(Component {
                source: Source::Kernel(i),
                kind,
                options,
                branchable: Vec::new(),
                must_decide: false,
            });
        }

        let mut phi = Phi { ctx, classes, components, hypothesis, aligned, by_clause, node_cap };
        phi.prepare();
        Ok(phi)
    }

    /// Filters inadmissible and useless options and marks components that must change.
    fn prepare(&mut self) {
        let cl = self.classes.clone();
        for c in self.components.iter_mut() {
            let forbidden = if c.kind == HeadKind::Init { &cl.next_false } else { &cl.stay };
            let valid: Vec<usize> =
                (0..c.options.len()).filter(|&o| !intersects(&c.options[o].fires, forbidden)).collect();
            c.must_decide = !valid.contains(&0);
            c.branchable = valid.into_iter().filter(|&o| o != 0).collect();
        }
        for c in self.components.iter_mut() {
            if let Source::Kernel(_) = c.source {
                let target = if c.kind == HeadKind::Init { &cl.up } else { &cl.down };
                let opts = &c.options;
                let mut keep: Vec<usize> =
                    c.branchable.iter().copied().filter(|&o| intersects(&opts[o].fires, target)).collect();
                // Drop options dominated by a strictly cheaper option of the same component.
                let snapshot = keep.clone();
                keep.retain(|&o| {
                    !snapshot.iter().any(|&q| {
                        q != o
                            && opts[q].cost() < opts[o].cost()
                            && dominates(c.kind, &opts[q].fires, &opts[o].fires, &cl)
                    })
                });
                c.branchable = keep;
            }
        }
    }

    fn default_choice(&self) -> Vec<usize> {
        vec![0; self.components.len()]
    }

    fn unions(&self, choice: &[usize]) -> (FixedBitSet, FixedBitSet) {
        let n = self.ctx.n_points();
        let mut init = FixedBitSet::with_capacity(n);
        let mut term = FixedBitSet::with_capacity(n);
        for (c, &o) in self.components.iter().zip(choice) {
            match c.kind {
                HeadKind::Init => init.union_with(&c.options[o].fires),
                HeadKind::Term => term.union_with(&c.options[o].fires),
            }
        }
        (init, term)
    }

    /// Literal count and firing count of the clauses induced by a choice,
    /// one specialization per component.
    pub fn induced_size(&self, choice: &[usize]) -> (usize, usize) {
        let mut lits = 0;
        let mut fires = 0;
        for (c, &o) in self.components.iter().zip(choice) {
            if matches!(c.source, Source::Kernel(_)) && o == 0 {
                continue;
            }
            lits += c.options[o].clause.len();
            fires += c.options[o].fires.count_ones(..);
        }
        (lits, fires)
    }

    fn solution(&self, choice: &[usize]) -> PhiSolution {
        let mut delta: Vec<Term> = Vec::new();
        for (c, &o) in self.components.iter().zip(choice) {
            delta.extend(c.options[o].atoms.iter().cloned());
        }
        delta.sort_by_key(atom_key);
        let (literals, firings) = self.induced_size(choice);
        PhiSolution { choice: choice.to_vec(), delta, literals, firings }
    }

    /// Whether a full choice reproduces every annotated transition.
    pub fn is_consistent(&self, choice: &[usize]) -> bool {
        let (init, term) = self.unions(choice);
        let cl = &self.classes;
        cl.up.is_subset(&init)
            && init.is_disjoint(&cl.next_false)
            && cl.down.is_subset(&term)
            && term.is_disjoint(&cl.stay)
    }

    /// Optimal choice, or `None` when no choice is consistent.
    pub fn solve(&self) -> Result<Option<PhiSolution>> {
        let mut st =
            SearchState { best: None, visited: HashSet::new(), nodes: 0, decided: vec![false; self.components.len()] };
        let mut choice = self.default_choice();
        self.dfs(&mut choice, 0, &mut st)?;
        Ok(st.best)
    }

    fn min_cost_covering(&self, decided: &[bool], p: usize, kind: HeadKind) -> Option<usize> {
        self.components
            .iter()
            .enumerate()
            .filter(|(ci, c)| !decided[*ci] && c.kind == kind)
            .flat_map(|(_, c)| c.branchable.iter().map(move |&o| &c.options[o]))
            .filter(|o| o.fires.contains(p))
            .map(Choice::cost)
            .min()
    }

    fn dfs(&self, choice: &mut Vec<usize>, cost: usize, st: &mut SearchState) -> Result<()> {
        st.nodes += 1;
        if st.nodes > self.node_cap {
            let bound = st.best.as_ref().map_or("none".to_string(), |b| b.cost().to_string());
            return Err(Error::ResourceCap(format!(
                "clause search explored {} nodes (best cost so far: {bound})",
                self.node_cap
            )));
        }
        let key: Vec<(usize, usize)> = choice.iter().copied().enumerate().filter(|&(ci, _)| st.decided[ci]).collect();
        if !st.visited.insert(key) {
            return Ok(());
        }
        let (init, term) = self.unions(choice);
        let cl = &self.classes;
        let n_comp = self.components.len();

        // Lower bound on the remaining cost.
        let mut point_lb = 0usize;
        let mut uncovered_up = cl.up.clone();
        uncovered_up.difference_with(&init);
        let mut uncovered_down = cl.down.clone();
        uncovered_down.difference_with(&term);
        for (set, kind) in [(&uncovered_up, HeadKind::Init), (&uncovered_down, HeadKind::Term)] {
            for p in set.ones() {
                match self.min_cost_covering(&st.decided, p, kind) {
                    Some(c) => point_lb = point_lb.max(c),
                    None => return Ok(()),
                }
            }
        }
        let mut must_lb = 0usize;
        for (ci, c) in self.components.iter().enumerate() {
            if c.must_decide && !st.decided[ci] {
                match c.branchable.iter().map(|&o| c.options[o].cost()).min() {
                    Some(m) => must_lb += m,
                    None => return Ok(()),
                }
            }
        }
        let lb = cost + point_lb.max(must_lb);
        if let Some(b) = &st.best {
            if lb > b.cost() {
                return Ok(());
            }
        }

        // Collect violations with their branches; pick the one with fewest branches.
        let mut best_branch: Option<Vec<(usize, usize)>> = None;
        let mut consider = |branches: Vec<(usize, usize)>| {
            if best_branch.as_ref().is_none_or(|b| branches.len() < b.len()) {
                best_branch = Some(branches);
            }
        };
        for ci in 0..n_comp {
            let c = &self.components[ci];
            if c.must_decide && !st.decided[ci] {
                consider(c.branchable.iter().map(|&o| (ci, o)).collect());
            }
        }
        let chosen_clauses: Vec<&Clause> = (0..n_comp)
            .filter(|&ci| st.decided[ci] && matches!(self.components[ci].source, Source::Kernel(_)))
            .map(|ci| &self.components[ci].options[choice[ci]].clause)
            .collect();
        let cover_branches = |p: usize, kind: HeadKind| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            let mut seen: Vec<&Clause> = Vec::new();
            for ci in 0..n_comp {
                let c = &self.components[ci];
                if st.decided[ci] || c.kind != kind {
                    continue;
                }
                for &o in &c.branchable {
                    let opt = &c.options[o];
                    if !opt.fires.contains(p) {
                        continue;
                    }
                    if matches!(c.source, Source::Kernel(_)) {
                        if chosen_clauses.contains(&&opt.clause) || seen.contains(&&opt.clause) {
                            continue;
                        }
                        seen.push(&opt.clause);
                    }
                    out.push((ci, o));
                }
            }
            out
        };
        for p in uncovered_up.ones() {
            consider(cover_branches(p, HeadKind::Init));
        }
        for p in uncovered_down.ones() {
            consider(cover_branches(p, HeadKind::Term));
        }
        let Some(branches) = best_branch else {
            let sol = self.solution(choice);
            if st.best.as_ref().is_none_or(|b| sol.key().cmp(&b.key()) == Ordering::Less) {
                st.best = Some(sol);
            }
            return Ok(());
        };
        let mut ordered = branches;
        ordered.sort_by_key(|&(ci, o)| {
            let opt = &self.components[ci].options[o];
            (opt.cost(), opt.atoms.iter().map(atom_key).collect::<Vec<_>>())
        });
        for (ci, o) in ordered {
            let add = self.components[ci].options[o].cost();
            choice[ci] = o;
            st.decided[ci] = true;
            self.dfs(choice, cost + add, st)?;
            st.decided[ci] = false;
            choice[ci] = 0;
        }
        Ok(())
    }
}

fn dominates(kind: HeadKind, better: &FixedBitSet, worse: &FixedBitSet, cl: &PointClasses) -> bool {
    match kind {
        HeadKind::Init => worse.is_subset(better),
        HeadKind::Term => {
            let mut wd = worse.clone();
            wd.intersect_with(&cl.down);
            wd.is_subset(better)
        }
    }
}

struct SearchState {
    best: Option<PhiSolution>,
    visited: HashSet<Vec<(usize, usize)>>,
    nodes: usize,
    decided: Vec<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kernel::build_kernel;

    fn names(ts: &[Term]) -> Vec<String> {
        ts.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn single_window_generalization() {
        let fx = fixtures::single_window();
        let ctx = fx.context(0);
        let k = build_kernel(&ctx, &fx.language).unwrap();
        let phi = Phi::new(&ctx, &k.variabilized, &[], 1 << 20).unwrap();
        let sol = phi.solve().unwrap().unwrap();
        assert_eq!(names(&sol.delta), ["use(1,0)", "use(1,3)", "use(2,0)", "use(2,2)"]);
        let chosen: Vec<String> = phi
            .components
            .iter()
            .zip(&sol.choice)
            .filter(|(_, &o)| o != 0)
            .map(|(c, &o)| c.options[o].clause.to_string())
            .collect();
        assert_eq!(
            chosen,
            [
                "initiatedAt(fighting(X,Y),T) :- holdsAt(close(X,Y,23),T).",
                "terminatedAt(fighting(X,Y),T) :- happensAt(walking(Y),T).",
            ]
        );
        assert!(phi.is_consistent(&sol.choice));
    }

    #[test]
    fn minimal_refinement() {
        let fx = fixtures::refinement();
        let ctx = fx.context(0);
        let h = fixtures::refinement_hypothesis();
        let phi = Phi::new(&ctx, &[], &h, 1 << 20).unwrap();
        let sol = phi.solve().unwrap().unwrap();
        assert_eq!(names(&sol.delta), ["use(1,1,2)", "use(1,1,3)", "use(1,2,2)"]);
    }

    #[test]
    fn covered_window_needs_nothing() {
        let fx = fixtures::three_windows();
        let ctx = fx.context(1);
        let k = build_kernel(&ctx, &fx.language).unwrap();
        let c = crate::logic::parse::parse_clause("initiatedAt(fighting(X,Y),T) :- happensAt(active(X),T).").unwrap();
        let h = vec![AnnotatedClause {
            id: 1,
            clause: c.clone(),
            supp: crate::incremental::support::SupportSet::new(vec![k.variabilized[0].clone()]),
            lineage: None,
        }];
        let phi = Phi::new(&ctx, &[], &h, 1 << 20).unwrap();
        let sol = phi.solve().unwrap().unwrap();
        assert!(sol.delta.is_empty());
    }

    #[test]
    fn node_cap_is_reported() {
        let fx = fixtures::single_window();
        let ctx = fx.context(0);
        let k = build_kernel(&ctx, &fx.language).unwrap();
        let phi = Phi::new(&ctx, &k.variabilized, &[], 1).unwrap();
        assert!(matches!(phi.solve(), Err(Error::ResourceCap(_))));
    }
}
