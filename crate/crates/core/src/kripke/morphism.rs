use std::fmt;

use super::{Frame, Model, WorldMap};

/// The first p-morphism clause a map violates, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    /// Map is not total or points outside the target.
    Malformed(String),
    AgentMismatch {
        source: usize,
        target: usize,
    },
    /// Target world with no preimage.
    NotSurjective {
        target: usize,
    },
    /// `w Ri v` but not `p(w) Ri p(v)`.
    Forth {
        agent: usize,
        from: usize,
        to: usize,
    },
    /// `p(w) Ri t` but no `v` with `w Ri v` and `p(v) = t`.
    Back {
        agent: usize,
        from: usize,
        target: usize,
    },
    /// `w` and `p(w)` disagree on `atom`.
    Atom {
        world: usize,
        atom: String,
    },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Malformed(m) => write!(f, "malformed map: {m}"),
            MorphismViolation::AgentMismatch { source, target } => {
                write!(f, "agent count mismatch: {source} vs {target}")
            }
            MorphismViolation::NotSurjective { target } => {
                write!(f, "surjectivity fails: target world #{target} has no preimage")
            }
            MorphismViolation::Forth { agent, from, to } => {
                write!(f, "forth fails for agent {agent}: #{from} -> #{to} is not preserved")
            }
            MorphismViolation::Back { agent, from, target } => write!(
                f,
                "back fails for agent {agent}: image of #{from} reaches target #{target} with no matching successor"
            ),
            MorphismViolation::Atom { world, atom } => {
                write!(f, "atom `{atom}` differs between #{world} and its image")
            }
        }
    }
}

impl MorphismViolation {
    /// The same diagnostic with world names instead of indices.
    pub fn describe(&self, source: &Frame, target: &Frame) -> String {
        match self {
            MorphismViolation::NotSurjective { target: t } => {
                format!("surjectivity fails: target world `{}` has no preimage", target.name(*t))
            }
            MorphismViolation::Forth { agent, from, to } => format!(
                "forth fails for agent {agent}: `{}` -> `{}` is not preserved",
                source.name(*from),
                source.name(*to)
            ),
            MorphismViolation::Back { agent, from, target: t } => format!(
                "back fails for agent {agent}: image of `{}` reaches `{}` with no matching successor",
                source.name(*from),
                target.name(*t)
            ),
            MorphismViolation::Atom { world, atom } => {
                format!("atom `{atom}` differs between `{}` and its image", source.name(*world))
            }
            other => other.to_string(),
        }
    }
}

/// Checks surjectivity, the forth clause and the back clause, in that order.
pub fn check_p_morphism(source: &Frame, target: &Frame, map: &WorldMap) -> Result<(), MorphismViolation> {
    if source.n() != target.n() {
        return Err(MorphismViolation::AgentMismatch {
            source: source.n(),
            target: target.n(),
        });
    }
    map.validate(source, target)
        .map_err(|e| MorphismViolation::Malformed(e.to_string()))?;
    let mut hit = vec![false; target.len()];
    for &t in map.as_slice() {
        hit[t] = true;
    }
    if let Some(t) = hit.iter().position(|h| !h) {
        return Err(MorphismViolation::NotSurjective { target: t });
    }
    for i in 1..=source.n() {
        let tr = target.relation(i);
        for (w, v) in source.relation(i).pairs() {
            if !tr.contains(map.apply(w), map.apply(v)) {
                return Err(MorphismViolation::Forth {
                    agent: i,
                    from: w,
                    to: v,
                });
            }
        }
    }
    for i in 1..=source.n() {
        let sr = source.relation(i);
        let tr = target.relation(i);
        let mut reach = vec![false; target.len()];
        for w in 0..source.len() {
            reach.iter_mut().for_each(|r| *r = false);
            for &v in sr.successors(w) {
                reach[map.apply(v)] = true;
            }
            if let Some(&t) = tr.successors(map.apply(w)).iter().find(|&&t| !reach[t]) {
                return Err(MorphismViolation::Back {
                    agent: i,
                    from: w,
                    target: t,
                });
            }
        }
    }
    Ok(())
}

/// Frame clauses plus agreement on every atom.
pub fn check_model_p_morphism(source: &Model, target: &Model, map: &WorldMap) -> Result<(), MorphismViolation> {
    check_p_morphism(source.frame(), target.frame(), map)?;
    for w in 0..source.len() {
        let here = source.atoms_at(w);
        let there = target.atoms_at(map.apply(w));
        if let Some(atom) = here.symmetric_difference(there).next() {
            return Err(MorphismViolation::Atom {
                world: w,
                atom: atom.clone(),
            });
        }
    }
    Ok(())
}
