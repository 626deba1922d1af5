//! Bounded satisfiability and validity search over small models.
//!
//! Satisfiable formulas have models that are connected, so the search only
//! visits connected frames of the requested class, smallest first. A
//! negative answer is reported as `Unsatisfiable` only when the bound
//! reaches the size to which filtration shrinks every model of the formula;
//! otherwise the verdict is `Unknown`.

mod enumerate;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{expand_s, Formula};
use crate::kripke::{check_equivalence, falsifying_valuation, satisfies, Model, ValuationBudget};

pub use enumerate::{
    enumerate_frames, enumerate_frames_of_size, enumerate_with, restricted_growth_strings, EnumerateOptions,
    FrameClass, MAX_PARTITION_TUPLES,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Unsatisfiable,
    Satisfiable { model: Model, world: usize },
    CounterModel { model: Model, world: usize },
    Unknown { bound_reached: usize },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Unsatisfiable => "unsatisfiable",
            Verdict::Satisfiable { .. } => "satisfiable",
            Verdict::CounterModel { .. } => "countermodel",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<(&Model, usize)> {
        match self {
            Verdict::Satisfiable { model, world } | Verdict::CounterModel { model, world } => Some((model, *world)),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Unknown { bound_reached } => write!(f, "unknown (searched up to {bound_reached} worlds)"),
            Verdict::Satisfiable { model, world } | Verdict::CounterModel { model, world } => write!(
                f,
                "{} at `{}` in a {}-world model",
                self.label(),
                model.frame().name(*world),
                model.len()
            ),
            _ => f.write_str(self.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub class: FrameClass,
    /// Total number of (frame, valuation) pairs the search may visit.
    pub max_models: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            class: FrameClass::Ewd,
            max_models: 1 << 26,
        }
    }
}

/// World count that suffices to find a model of `f` if it has one in the
/// equivalence, directed or weakly directed class: filtration identifies
/// worlds that agree on the atoms and the modal subformulas of `f`, and
/// every other subformula is a boolean combination of those. `None` when
/// `f` uses `D`, which filtration does not cover.
pub fn completeness_bound(f: &Formula) -> Option<u64> {
    if f.contains_dist() {
        return None;
    }
    if f.is_propositional() {
        return Some(1);
    }
    let modal: BTreeSet<&Formula> = f
        .subformulas()
        .into_iter()
        .filter(|g| matches!(g, Formula::Box(..) | Formula::Diamond(..) | Formula::Some(_)))
        .collect();
    let bits = f.atoms().len() + modal.len();
    Some(if bits >= 63 { u64::MAX } else { 1 << bits })
}

/// Searches connected frames of `opts.class` with at most `max_worlds`
/// worlds, under every valuation of the atoms of `f`, for a world where
/// `f` holds.
pub fn decide_satisfiability(f: &Formula, n: usize, max_worlds: usize, opts: DecideOptions) -> Result<Verdict> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    if max_worlds == 0 {
        return Err(Error::Precondition("max_worlds must be at least 1".into()));
    }
    f.check_agents(n)?;
    let g = expand_s(f, n);
    let negated = Formula::not(g.clone());
    let atoms = g.atoms().len() as u64;
    let enum_opts = EnumerateOptions {
        class: opts.class,
        connected_only: true,
    };
    let mut visited: u64 = 0;
    for k in 1..=max_worlds {
        let frames = enumerate_frames_of_size(n, k, enum_opts)?;
        let bits = k as u64 * atoms;
        let per_frame = if bits >= 63 { u64::MAX } else { 1u64 << bits };
        for fr in frames {
            visited = visited.saturating_add(per_frame);
            if visited > opts.max_models {
                return Err(Error::Budget(format!(
                    "search would visit more than {} models",
                    opts.max_models
                )));
            }
            let budget = ValuationBudget {
                max_valuations: per_frame,
            };
            if let Some((model, world)) = falsifying_valuation(&fr, &negated, budget)? {
                verify_witness(&model, world, f, opts.class, true)?;
                return Ok(Verdict::Satisfiable { model, world });
            }
        }
    }
    let complete = match completeness_bound(&g) {
        Some(1) => true,
        Some(b) => opts.class != FrameClass::Edi && max_worlds as u64 >= b,
        None => false,
    };
    Ok(if complete {
        Verdict::Unsatisfiable
    } else {
        Verdict::Unknown {
            bound_reached: max_worlds,
        }
    })
}

/// Satisfiability of `~f`, read back as validity.
pub fn decide_validity(f: &Formula, n: usize, max_worlds: usize, opts: DecideOptions) -> Result<Verdict> {
    Ok(
        match decide_satisfiability(&Formula::not(f.clone()), n, max_worlds, opts)? {
            Verdict::Satisfiable { model, world } => Verdict::CounterModel { model, world },
            Verdict::Unsatisfiable => Verdict::Valid,
            other => other,
        },
    )
}

fn verify_witness(model: &Model, world: usize, f: &Formula, class: FrameClass, expect: bool) -> Result<()> {
    if !check_equivalence(model.frame()) || !class.contains(model.frame()) {
        return Err(Error::Internal(format!("witness frame is not in class {class}")));
    }
    if satisfies(model, world, f)? != expect {
        return Err(Error::Internal("witness does not re-check".into()));
    }
    Ok(())
}

/// Re-checks a verdict's witness against `f` and `class`.
pub fn verify_verdict(v: &Verdict, f: &Formula, class: FrameClass) -> Result<()> {
    match v {
        Verdict::Satisfiable { model, world } => verify_witness(model, *world, f, class, true),
        Verdict::CounterModel { model, world } => verify_witness(model, *world, f, class, false),
        _ => Ok(()),
    }
}
