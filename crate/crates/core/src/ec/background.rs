//! The background theory: Event Calculus axioms, user rules and fluent typing.

use crate::error::{Error, Result};
use crate::logic::mode::{Marker, ModeDeclaration, ModeKind};
use crate::logic::parse::parse_program;
use crate::logic::term::{Program, Term};

/// The two Event Calculus axioms.
pub const SDEC: &str = "holdsAt(F,T+1) :- initiatedAt(F,T).
holdsAt(F,T+1) :- holdsAt(F,T), not terminatedAt(F,T).
";

/// Whether a clause head is an initiation or a termination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadKind {
    Init,
    Term,
}

impl HeadKind {
    pub fn of(head: &Term) -> Option<HeadKind> {
        match head {
            Term::Compound(f, args) if args.len() == 2 && f == "initiatedAt" => Some(HeadKind::Init),
            Term::Compound(f, args) if args.len() == 2 && f == "terminatedAt" => Some(HeadKind::Term),
            _ => None,
        }
    }

    pub fn predicate(self) -> &'static str {
        match self {
            HeadKind::Init => "initiatedAt",
            HeadKind::Term => "terminatedAt",
        }
    }
}

/// An inertial fluent schema taken from a head mode, e.g. `fighting(+pid,+pid)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluentSchema {
    pub schema: Term,
    pub slot_types: Vec<String>,
    pub time_type: String,
}

impl FluentSchema {
    pub fn functor(&self) -> &str {
        self.schema.functor().unwrap_or_default()
    }

    pub fn arity(&self) -> usize {
        self.schema.arity()
    }

    /// Types of the fluent's arguments, or `None` if `fluent` is not an instance.
    pub fn match_fluent(&self, fluent: &Term) -> Option<Vec<(String, Term)>> {
        let m = ModeDeclaration::body(self.schema.clone(), false);
        m.slots(fluent).map(|slots| slots.into_iter().map(|s| (s.ty, s.term)).collect())
    }
}

/// SDEC axioms, user rules for statically-defined fluents, and the mode
/// declarations used to type window constants.
#[derive(Clone, Debug)]
pub struct BackgroundTheory {
    pub sdec: Program,
    pub user_rules: Program,
    pub inertial_fluents: Vec<FluentSchema>,
    pub modes: Vec<ModeDeclaration>,
}

impl BackgroundTheory {
    pub fn new(modes: Vec<ModeDeclaration>, user_rules: Program) -> Result<Self> {
        let mut inertial_fluents: Vec<FluentSchema> = Vec::new();
        for m in modes.iter().filter(|m| m.kind == ModeKind::Head) {
            let (Some(_), [fluent, time]) = (HeadKind::of(&m.schema), m.schema.args()) else {
                return Err(Error::Data(format!("head mode `{m}` must be initiatedAt/2 or terminatedAt/2")));
            };
            let time_type = match ModeDeclaration::body(time.clone(), false).placemarkers().as_slice() {
                [(Marker::Input, ty)] => ty.clone(),
                _ => return Err(Error::Data(format!("time argument of `{m}` must be a `+` placemarker"))),
            };
            let slot_types =
                ModeDeclaration::body(fluent.clone(), false).placemarkers().into_iter().map(|(_, ty)| ty).collect();
            let fs = FluentSchema { schema: fluent.clone(), slot_types, time_type };
            if !inertial_fluents.contains(&fs) {
                inertial_fluents.push(fs);
            }
        }
        let sdec = parse_program(SDEC).expect("axioms parse");
        Ok(BackgroundTheory { sdec, user_rules, inertial_fluents, modes })
    }

    pub fn fluent_schema(&self, fluent: &Term) -> Option<&FluentSchema> {
        self.inertial_fluents.iter().find(|f| f.match_fluent(fluent).is_some())
    }

    pub fn is_inertial(&self, fluent: &Term) -> bool {
        self.fluent_schema(fluent).is_some()
    }
}
