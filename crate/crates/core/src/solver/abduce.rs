//! Abduction under credulous stable-model entailment.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::term::{Clause, Literal, Program, Signature, Term};
use crate::solver::ground::{ground, GroundProgram};
use crate::solver::stable::{stable_models, SolverConfig};

/// Background, abducible predicates, candidate instances and goals.
#[derive(Clone, Debug, Default)]
pub struct AbductiveTask {
    pub background: Program,
    pub abducibles: Vec<Signature>,
    /// Ground abducible instances the search may assume.
    pub candidates: Vec<Term>,
    pub goals: Vec<Literal>,
    pub domains: BTreeMap<String, BTreeSet<Term>>,
}

/// An explanation Δ with its objective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbductiveSolution {
    /// Sorted abduced atoms.
    pub delta: Vec<Term>,
    pub cardinality: usize,
    /// Secondary objective (literal count of whatever Δ induces).
    pub secondary: usize,
}

impl AbductiveSolution {
    pub fn new(mut delta: Vec<Term>, secondary: usize) -> Self {
        delta.sort();
        delta.dedup();
        AbductiveSolution { cardinality: delta.len(), delta, secondary }
    }

    /// Total order: cardinality, then the secondary objective, then the sorted atoms.
    pub fn objective_cmp(&self, other: &Self) -> Ordering {
        (self.cardinality, self.secondary, &self.delta).cmp(&(other.cardinality, other.secondary, &other.delta))
    }
}

/// Candidate order: time point (last integer argument), predicate, then term order.
pub fn candidate_key(t: &Term) -> (i64, String, Term) {
    let time = t.args().iter().rev().find_map(Term::as_int).unwrap_or(i64::MIN);
    (time, t.functor().unwrap_or_default().to_string(), t.clone())
}

struct Prepared {
    g: GroundProgram,
    candidates: Vec<Term>,
}

fn prepare(task: &AbductiveTask) -> Result<Prepared> {
    for c in &task.candidates {
        let sig = c.signature().ok_or_else(|| Error::Data(format!("`{c}` is not an atom")))?;
        if !task.abducibles.contains(&sig) {
            return Err(Error::Data(format!("candidate `{c}` is not abducible")));
        }
        if !c.is_ground() {
            return Err(Error::Data(format!("candidate `{c}` is not ground")));
        }
    }
    let mut candidates = task.candidates.clone();
    candidates.sort_by_key(candidate_key);
    candidates.dedup();
    let mut p = task.background.clone();
    p.clauses.extend(candidates.iter().cloned().map(Clause::fact));
    let mut consts = BTreeSet::new();
    for l in &task.goals {
        l.atom.collect_constants(&mut consts);
    }
    let g = ground(&p, &task.domains, &consts)?;
    Ok(Prepared { g, candidates })
}

impl Prepared {
    fn entails(&self, delta: &[&Term], goals: &[Literal], cfg: &SolverConfig) -> Result<bool> {
        let chosen: BTreeSet<&Term> = delta.iter().copied().collect();
        let cand: BTreeSet<&Term> = self.candidates.iter().collect();
        let g = self.g.filter_rules(|c| !(c.body.is_empty() && cand.contains(&c.head) && !chosen.contains(&c.head)));
        Ok(stable_models(&g, cfg)?.iter().any(|m| m.satisfies(&g, goals)))
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    fn rec(
        n: usize,
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            let stop = rec(n, k, i + 1, cur, f)?;
            cur.pop();
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
    rec(n, k, 0, &mut Vec::new(), f)
}

/// Abduction with a caller-supplied secondary objective.
///
/// Subsets are explored by increasing cardinality, so the first cardinality
/// with a solution is optimal; within it every solution is scored and the
/// least by [`AbductiveSolution::objective_cmp`] is returned. Without
/// `minimize` the first solution found is returned.
pub fn abduce_with(
    task: &AbductiveTask,
    minimize: bool,
    cfg: &SolverConfig,
    secondary: &dyn Fn(&[Term]) -> usize,
) -> Result<Option<AbductiveSolution>> {
    let prep = prepare(task)?;
    let n = prep.candidates.len();
    let mut nodes = 0usize;
    for k in 0..=n {
        let mut best: Option<AbductiveSolution> = None;
        for_each_subset(n, k, &mut |idx| {
            nodes += 1;
            if nodes > cfg.node_cap {
                let bound = best.as_ref().map_or("none".to_string(), |b| format!("{}", b.cardinality));
                return Err(Error::ResourceCap(format!(
                    "abduction explored {} candidate sets (best bound: {bound})",
                    cfg.node_cap
                )));
            }
            let delta: Vec<&Term> = idx.iter().map(|&i| &prep.candidates[i]).collect();
            if prep.entails(&delta, &task.goals, cfg)? {
                let owned: Vec<Term> = delta.into_iter().cloned().collect();
                let sol = AbductiveSolution::new(owned.clone(), secondary(&owned));
                if best.as_ref().is_none_or(|b| sol.objective_cmp(b) == Ordering::Less) {
                    best = Some(sol);
                }
                return Ok(!minimize);
            }
            Ok(false)
        })?;
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

/// Minimum-cardinality abduction; ties broken by the sorted atoms.
pub fn abduce(task: &AbductiveTask, minimize: bool) -> Result<Option<AbductiveSolution>> {
    abduce_with(task, minimize, &SolverConfig::default(), &|_| 0)
}

/// Every subset-minimal explanation, in objective order.
pub fn abduce_all_minimal(task: &AbductiveTask, cfg: &SolverConfig) -> Result<Vec<AbductiveSolution>> {
    let prep = prepare(task)?;
    let n = prep.candidates.len();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut nodes = 0usize;
    for k in 0..=n {
        let mut level = Vec::new();
        for_each_subset(n, k, &mut |idx| {
            if found.iter().any(|f| f.iter().all(|i| idx.contains(i))) {
                return Ok(false);
            }
            nodes += 1;
            if nodes > cfg.node_cap {
                return Err(Error::ResourceCap(format!("abduction explored {} candidate sets", cfg.node_cap)));
            }
            let delta: Vec<&Term> = idx.iter().map(|&i| &prep.candidates[i]).collect();
            if prep.entails(&delta, &task.goals, cfg)? {
                level.push(idx.to_vec());
            }
            Ok(false)
        })?;
        found.extend(level);
    }
    let mut out: Vec<AbductiveSolution> = found
        .into_iter()
        .map(|idx| AbductiveSolution::new(idx.into_iter().map(|i| prep.candidates[i].clone()).collect(), 0))
        .collect();
    out.sort_by(|a, b| a.objective_cmp(b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_literal, parse_program, parse_term};

    fn task(bg: &str, cands: &[&str], goals: &[&str]) -> AbductiveTask {
        let candidates: Vec<Term> = cands.iter().map(|c| parse_term(c).unwrap()).collect();
        let mut abducibles: Vec<Signature> = candidates.iter().filter_map(Term::signature).collect();
        abducibles.dedup();
        AbductiveTask {
            background: parse_program(bg).unwrap(),
            abducibles,
            candidates,
            goals: goals.iter().map(|g| parse_literal(g).unwrap()).collect(),
            domains: BTreeMap::new(),
        }
    }

    #[test]
    fn empty_goals_need_nothing() {
        let s = abduce(&task("g :- a.", &["a"], &[]), true).unwrap().unwrap();
        assert!(s.delta.is_empty());
    }

    #[test]
    fn independent_goals_single_union() {
        let t = task("g1 :- a. g2 :- b.", &["a", "b"], &["g1", "g2"]);
        let all = abduce_all_minimal(&t, &SolverConfig::default()).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].delta.len(), 2);
    }

    #[test]
    fn negative_goal_blocks_candidate() {
        let t = task("g :- a. g :- b. bad :- a.", &["a", "b"], &["g", "not bad"]);
        let s = abduce(&t, true).unwrap().unwrap();
        assert_eq!(s.delta, vec![parse_term("b").unwrap()]);
    }

    #[test]
    fn lexicographic_tiebreak() {
        let t = task("g :- a. g :- b.", &["b", "a"], &["g"]);
        let s = abduce(&t, true).unwrap().unwrap();
        assert_eq!(s.delta, vec![parse_term("a").unwrap()]);
    }
}
