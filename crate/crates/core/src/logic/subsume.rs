//! θ-subsumption between clauses and programs.

use crate::logic::term::{Clause, Literal, Program};
use crate::logic::unify::{match_term, Substitution};

fn match_literal(p: &Literal, t: &Literal, s: &mut Substitution) -> bool {
    p.negated == t.negated && match_term(&p.atom, &t.atom, s)
}

fn search(pending: &mut Vec<&Literal>, target: &[Literal], s: &Substitution) -> Option<Substitution> {
    if pending.is_empty() {
        return Some(s.clone());
    }
    // First-fail: expand the literal with the fewest candidate matches.
    let mut best: Option<(usize, Vec<Substitution>)> = None;
    for (idx, lit) in pending.iter().enumerate() {
        let options: Vec<Substitution> = target
            .iter()
            .filter_map(|t| {
                let mut trial = s.clone();
                match_literal(lit, t, &mut trial).then_some(trial)
            })
            .collect();
        if options.is_empty() {
            return None;
        }
        if best.as_ref().is_none_or(|(_, b)| options.len() < b.len()) {
            best = Some((idx, options));
        }
    }
    let (idx, options) = best.expect("pending is non-empty");
    let lit = pending.remove(idx);
    for opt in options {
        if let Some(found) = search(pending, target, &opt) {
            pending.insert(idx, lit);
            return Some(found);
        }
    }
    pending.insert(idx, lit);
    None
}

/// A substitution θ with head(c)θ = head(d) and body(c)θ ⊆ body(d), if any.
pub fn subsumption_witness(c: &Clause, d: &Clause) -> Option<Substitution> {
    let mut s = Substitution::new();
    if !match_term(&c.head, &d.head, &mut s) {
        return None;
    }
    let mut pending: Vec<&Literal> = c.body.iter().collect();
    search(&mut pending, &d.body, &s)
}

/// `c ⪯ d`: `c` θ-subsumes `d`.
pub fn theta_subsumes_clause(c: &Clause, d: &Clause) -> bool {
    subsumption_witness(c, d).is_some()
}

/// Every clause of `p1` θ-subsumes some clause of `p2`.
pub fn theta_subsumes_program(p1: &Program, p2: &Program) -> bool {
    p1.iter().all(|c| p2.iter().any(|d| theta_subsumes_clause(c, d)))
}

/// Mutual subsumption with equal length: the clauses are renamings of one another
/// up to literal order.
pub fn is_variant(c: &Clause, d: &Clause) -> bool {
    c.body.len() == d.body.len() && theta_subsumes_clause(c, d) && theta_subsumes_clause(d, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_clause;

    fn c(s: &str) -> Clause {
        parse_clause(s).unwrap()
    }

    #[test]
    fn specialization_is_subsumed() {
        let c2 = c("terminatedAt(fighting(X,Y),T) :- happensAt(walking(X),T).");
        let c2p = c("terminatedAt(fighting(X,Y),T) :- happensAt(walking(X),T), not holdsAt(close(X,Y,23),T).");
        assert!(theta_subsumes_clause(&c2, &c2p));
        assert!(!theta_subsumes_clause(&c2p, &c2));
        assert!(theta_subsumes_clause(&c2p, &c2p));
    }

    #[test]
    fn negation_flags_respected() {
        let a = c("h(X) :- not p(X).");
        let b = c("h(a) :- p(a).");
        assert!(!theta_subsumes_clause(&a, &b));
    }

    #[test]
    fn consistent_bindings_required() {
        let a = c("h(X) :- p(X,Y), p(Y,X).");
        assert!(theta_subsumes_clause(&a, &c("h(a) :- p(a,a).")));
        assert!(!theta_subsumes_clause(&a, &c("h(a) :- p(a,b).")));
        assert!(theta_subsumes_clause(&a, &c("h(a) :- p(a,b), p(b,a).")));
    }

    #[test]
    fn empty_program_subsumes_anything() {
        let p = Program::new(vec![c("h(X) :- p(X).")]);
        assert!(theta_subsumes_program(&Program::default(), &p));
    }
}
