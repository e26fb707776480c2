//! Stable models of ground programs.
//!
//! The atom dependency graph is split into strongly connected components and
//! solved bottom-up. Components without internal negation have a unique
//! least model given the lower components; components with internal negation
//! are solved by guessing their negatively occurring atoms and keeping the
//! guesses reproduced by the least model of the reduct.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::term::{Literal, Program, Term};
use crate::solver::ground::{ground, GroundProgram};

/// The set of true atom ids of a ground program.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    pub true_atoms: BTreeSet<usize>,
}

impl Interpretation {
    pub fn contains(&self, id: usize) -> bool {
        self.true_atoms.contains(&id)
    }

    pub fn atoms<'a>(&'a self, g: &'a GroundProgram) -> impl Iterator<Item = &'a Term> + 'a {
        self.true_atoms.iter().map(move |&i| &g.atoms[i])
    }

    /// Whether every literal holds; atoms unknown to the program are false.
    pub fn satisfies(&self, g: &GroundProgram, q: &[Literal]) -> bool {
        q.iter().all(|l| {
            let holds = g.atom_id(&l.atom).is_some_and(|id| self.contains(id));
            holds != l.negated
        })
    }
}

/// Solver limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum number of atoms guessed within one component.
    pub herbrand_cap: usize,
    /// Maximum number of candidate sets explored by abduction.
    pub node_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { herbrand_cap: 24, node_cap: 1 << 20 }
    }
}

/// Least model of the reduct of `g` by `model`.
pub fn reduct_least_model(g: &GroundProgram, model: &[bool]) -> Vec<bool> {
    let mut m = vec![false; g.len()];
    loop {
        let mut changed = false;
        for r in &g.rules {
            let Some(h) = r.head else { continue };
            if m[h] || r.neg.iter().any(|&a| model[a]) {
                continue;
            }
            if r.pos.iter().all(|&a| m[a]) {
                m[h] = true;
                changed = true;
            }
        }
        if !changed {
            return m;
        }
    }
}

fn violates_constraints(g: &GroundProgram, m: &[bool]) -> bool {
    g.rules.iter().filter(|r| r.head.is_none()).any(|r| r.pos.iter().all(|&a| m[a]) && r.neg.iter().all(|&a| !m[a]))
}

/// Independent reduct check: `model` equals the least model of its reduct and
/// satisfies every integrity constraint.
pub fn is_stable(g: &GroundProgram, model: &[bool]) -> bool {
    reduct_least_model(g, model) == model && !violates_constraints(g, model)
}

/// Tarjan's algorithm; components are returned dependencies first.
fn components(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'a> {
        edges: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(st: &mut St, v: usize) {
        // Explicit stack of (node, next edge position) to avoid deep recursion.
        let mut work = vec![(v, 0usize)];
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on[v] = true;
        while let Some(&mut (u, ref mut pos)) = work.last_mut() {
            if *pos < st.edges[u].len() {
                let w = st.edges[u][*pos];
                *pos += 1;
                match st.index[w] {
                    None => {
                        st.index[w] = Some(st.next);
                        st.low[w] = st.next;
                        st.next += 1;
                        st.stack.push(w);
                        st.on[w] = true;
                        work.push((w, 0));
                    }
                    Some(iw) if st.on[w] => st.low[u] = st.low[u].min(iw),
                    _ => {}
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    st.low[parent] = st.low[parent].min(st.low[u]);
                }
                if Some(st.low[u]) == st.index[u] {
                    let mut comp = Vec::new();
                    loop {
                        let w = st.stack.pop().expect("tarjan stack");
                        st.on[w] = false;
                        comp.push(w);
                        if w == u {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    st.out.push(comp);
                }
            }
        }
    }
    let mut st = St {
        edges,
        index: vec![None; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.out
}

/// All stable models of `g`, sorted.
pub fn stable_models(g: &GroundProgram, cfg: &SolverConfig) -> Result<Vec<Interpretation>> {
    let n = g.len();
    let mut edges = vec![Vec::new(); n];
    let mut rules_of = vec![Vec::new(); n];
    for (ri, r) in g.rules.iter().enumerate() {
        if let Some(h) = r.head {
            edges[h].extend(r.pos.iter().chain(&r.neg).copied());
            rules_of[h].push(ri);
        }
    }
    let comps = components(n, &edges);
    let mut comp_of = vec![0; n];
    for (ci, comp) in comps.iter().enumerate() {
        for &a in comp {
            comp_of[a] = ci;
        }
    }

    let mut partial: Vec<Vec<bool>> = vec![vec![false; n]];
    for (ci, comp) in comps.iter().enumerate() {
        let rules: Vec<usize> = comp.iter().flat_map(|&a| rules_of[a].iter().copied()).collect();
        if rules.is_empty() {
            continue;
        }
        let mut guessed: Vec<usize> =
            rules.iter().flat_map(|&ri| g.rules[ri].neg.iter().copied()).filter(|&a| comp_of[a] == ci).collect();
        guessed.sort_unstable();
        guessed.dedup();
        if guessed.len() > cfg.herbrand_cap {
            return Err(Error::ResourceCap(format!(
                "{} atoms under internal negation exceed the exhaustive cap of {}; use the temporal evaluator or abduction",
                guessed.len(),
                cfg.herbrand_cap
            )));
        }
        let mut next = Vec::new();
        for base in &partial {
            for mask in 0u64..(1u64 << guessed.len()) {
                let mut m = base.clone();
                let assumed = |a: usize| match guessed.binary_search(&a) {
                    Ok(k) => mask >> k & 1 == 1,
                    Err(_) => m[a],
                };
                let assumed: Vec<bool> = (0..n).map(assumed).collect();
                loop {
                    let mut changed = false;
                    for &ri in &rules {
                        let r = &g.rules[ri];
                        let h = r.head.expect("component rules have heads");
                        if m[h] || r.neg.iter().any(|&a| assumed[a]) {
                            continue;
                        }
                        if r.pos.iter().all(|&a| m[a]) {
                            m[h] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                let consistent = guessed.iter().enumerate().all(|(k, &a)| m[a] == (mask >> k & 1 == 1));
                if consistent {
                    next.push(m);
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            return Ok(Vec::new());
        }
    }

    let mut out = Vec::new();
    for m in partial {
        if violates_constraints(g, &m) {
            continue;
        }
        if !is_stable(g, &m) {
            return Err(Error::Invariant("component solver produced a non-stable model".into()));
        }
        out.push(Interpretation { true_atoms: (0..n).filter(|&i| m[i]).collect() });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Some stable model of `p` satisfies every literal of `q`.
pub fn credulous_entails(
    p: &Program,
    q: &[Literal],
    domains: &BTreeMap<String, BTreeSet<Term>>,
    cfg: &SolverConfig,
) -> Result<bool> {
    let mut consts = BTreeSet::new();
    for l in q {
        l.atom.collect_constants(&mut consts);
    }
    let g = ground(p, domains, &consts)?;
    Ok(stable_models(&g, cfg)?.iter().any(|m| m.satisfies(&g, q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_literal, parse_program};

    fn models(src: &str) -> Vec<Vec<String>> {
        let g = ground(&parse_program(src).unwrap(), &BTreeMap::new(), &BTreeSet::new()).unwrap();
        stable_models(&g, &SolverConfig::default())
            .unwrap()
            .iter()
            .map(|m| {
                let mut v: Vec<String> = m.atoms(&g).map(|a| a.to_string()).collect();
                v.sort();
                v
            })
            .collect()
    }

    #[test]
    fn horn_has_least_model() {
        assert_eq!(models("a. b :- a."), vec![vec!["a", "b"]]);
    }

    #[test]
    fn even_loop_has_two_models() {
        let mut m = models("a :- not b. b :- not a.");
        m.sort();
        assert_eq!(m, vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn odd_loop_has_none() {
        assert!(models("a :- not a.").is_empty());
    }

    #[test]
    fn constraints_prune() {
        assert_eq!(models("a :- not b. b :- not a. false :- a."), vec![vec!["b"]]);
    }

    #[test]
    fn credulous_queries() {
        let p = parse_program("a :- not b. b :- not a.").unwrap();
        let cfg = SolverConfig::default();
        let d = BTreeMap::new();
        assert!(credulous_entails(&p, &[parse_literal("a").unwrap()], &d, &cfg).unwrap());
        assert!(credulous_entails(&p, &[parse_literal("b").unwrap()], &d, &cfg).unwrap());
        let both = [parse_literal("a").unwrap(), parse_literal("b").unwrap()];
        assert!(!credulous_entails(&p, &both, &d, &cfg).unwrap());
    }
}
