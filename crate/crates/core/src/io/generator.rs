//! Seeded synthetic streams for the `fighting` fluent.
//!
//! Each person emits at most one low-level event per time point and moves on
//! a random walk inside a square. Two persons are `close` at distance 23 or
//! less; every other ordered pair gets an explicit negative `close` fact. The
//! annotation is what the truth program recognizes over the whole stream
//! from an empty initial state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ec::{recognize, BackgroundTheory, Window, WindowContext};
use crate::error::Result;
use crate::logic::mode::{parse_modes, LanguageConfig};
use crate::logic::parse::parse_program;
use crate::logic::term::{Literal, Program, Term};

/// The fighting definition used as ground truth.
pub const FIGHTING_TRUTH: &str = "\
initiatedAt(fighting(X,Y),T) :- happensAt(abrupt(X),T), not happensAt(inactive(Y),T), holdsAt(close(X,Y,23),T).
initiatedAt(fighting(X,Y),T) :- happensAt(active(X),T), not happensAt(inactive(Y),T), holdsAt(close(X,Y,23),T).
terminatedAt(fighting(X,Y),T) :- happensAt(walking(X),T), not holdsAt(close(X,Y,23),T).
terminatedAt(fighting(X,Y),T) :- happensAt(running(X),T), not holdsAt(close(X,Y,23),T).
";

/// Mode declarations whose language contains [`FIGHTING_TRUTH`].
pub const FIGHTING_MODES: &str = "\
modeh(initiatedAt(fighting(+pid,+pid),+time)).
modeh(terminatedAt(fighting(+pid,+pid),+time)).
modeb(happensAt(abrupt(+pid),+time)).
modeb(happensAt(active(+pid),+time)).
modeb(happensAt(walking(+pid),+time)).
modeb(happensAt(running(+pid),+time)).
modeb(happensAt(inactive(+pid),+time)).
modeb(not happensAt(inactive(+pid),+time)).
modeb(holdsAt(close(+pid,+pid,#dist),+time)).
modeb(not holdsAt(close(+pid,+pid,#dist),+time)).
";

/// Low-level events a person may emit.
pub const EVENTS: [&str; 5] = ["walking", "running", "active", "inactive", "abrupt"];

const CLOSE_DISTANCE: f64 = 23.0;

/// Shape of a generated stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    /// Number of persons `id1..idN`.
    pub persons: usize,
    /// Number of examples (transitions); the stream spans times `0..=n_examples`.
    pub n_examples: usize,
    pub seed: u64,
    /// Probability that a person emits an event at a time point.
    pub event_probability: f64,
    /// Side of the square the persons move in.
    pub arena: f64,
    /// Largest coordinate change per time point.
    pub max_step: f64,
}

impl SyntheticConfig {
    pub fn new(n_examples: usize, seed: u64) -> Self {
        SyntheticConfig { persons: 4, n_examples, seed, event_probability: 1.0, arena: 60.0, max_step: 6.0 }
    }
}

/// Background theory and language of the fighting task at depth bound 1.
pub fn fighting_task() -> (BackgroundTheory, LanguageConfig) {
    let modes = parse_modes(FIGHTING_MODES).expect("built-in modes parse");
    let b = BackgroundTheory::new(modes.clone(), Program::default()).expect("built-in modes are valid");
    (b, LanguageConfig::new(modes, 1))
}

pub fn fighting_truth() -> Program {
    parse_program(FIGHTING_TRUTH).expect("built-in truth parses")
}

fn atom(name: &str, args: Vec<Term>) -> Term {
    Term::compound(name, args)
}

fn person(i: usize) -> Term {
    Term::constant(&format!("id{}", i + 1))
}

/// Random narrative over times `0..=n_examples`, unannotated, as one window.
pub fn generate_narrative(cfg: &SyntheticConfig) -> Window {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pos: Vec<(f64, f64)> =
        (0..cfg.persons).map(|_| (rng.gen_range(0.0..cfg.arena), rng.gen_range(0.0..cfg.arena))).collect();
    let mut w = Window::new(1, 0, cfg.n_examples as i64);
    for t in 0..=cfg.n_examples as i64 {
        for i in 0..cfg.persons {
            let fire = rng.gen_bool(cfg.event_probability.clamp(0.0, 1.0));
            let e = rng.gen_range(0..EVENTS.len());
            if fire {
                let ev = atom(EVENTS[e], vec![person(i)]);
                w.narrative.push(Literal::pos(atom("happensAt", vec![ev, Term::Int(t)])));
            }
        }
        for i in 0..cfg.persons {
            for j in 0..cfg.persons {
                if i == j {
                    continue;
                }
                let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
                let close = atom("close", vec![person(i), person(j), Term::Int(CLOSE_DISTANCE as i64)]);
                let fact = atom("holdsAt", vec![close, Term::Int(t)]);
                w.narrative.push(if d <= CLOSE_DISTANCE { Literal::pos(fact) } else { Literal::neg(fact) });
            }
        }
        for p in pos.iter_mut() {
            p.0 = (p.0 + rng.gen_range(-cfg.max_step..=cfg.max_step)).clamp(0.0, cfg.arena);
            p.1 = (p.1 + rng.gen_range(-cfg.max_step..=cfg.max_step)).clamp(0.0, cfg.arena);
        }
    }
    w
}

/// Annotates `w` with what `truth` recognizes from an empty initial state.
pub fn annotate(b: &BackgroundTheory, truth: &Program, w: &mut Window) -> Result<()> {
    w.annotation.clear();
    let ctx = WindowContext::new(b, w)?;
    w.annotation = recognize(&ctx, truth)?.into_iter().collect();
    Ok(())
}

/// A generated stream cut into windows of `g` examples.
pub fn generate_synthetic(
    truth: &Program,
    b: &BackgroundTheory,
    cfg: &SyntheticConfig,
    g: usize,
) -> Result<Vec<Window>> {
    let mut w = generate_narrative(cfg);
    annotate(b, truth, &mut w)?;
    Window::rewindow(&[w], g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::covers;
    use crate::logic::mode::in_mode_language;

    #[test]
    fn truth_is_in_the_language() {
        let (_, lang) = fighting_task();
        for c in fighting_truth().iter() {
            assert!(in_mode_language(c, &lang), "{c}");
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let (b, _) = fighting_task();
        let cfg = SyntheticConfig::new(60, 7);
        let a = generate_synthetic(&fighting_truth(), &b, &cfg, 10).unwrap();
        let c = generate_synthetic(&fighting_truth(), &b, &cfg, 10).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.len(), 6);
        assert!(a.iter().any(|w| !w.annotation.is_empty()));
    }

    #[test]
    fn truth_covers_every_window() {
        let (b, _) = fighting_task();
        for g in [2, 7, 10] {
            for w in generate_synthetic(&fighting_truth(), &b, &SyntheticConfig::new(80, 3), g).unwrap() {
                let ctx = WindowContext::new(&b, &w).unwrap();
                assert!(covers(&ctx, &fighting_truth()).unwrap().is_covered(), "window {}", w.id);
            }
        }
    }

    #[test]
    fn no_events_no_fighting() {
        let (b, _) = fighting_task();
        let mut cfg = SyntheticConfig::new(50, 11);
        cfg.event_probability = 0.0;
        let ws = generate_synthetic(&fighting_truth(), &b, &cfg, 10).unwrap();
        assert!(ws.iter().all(|w| w.annotation.is_empty()));
    }
}
