//! The epistemic language: formulas with knowledge operators for agents
//! `1..=n`, plus the derived "somebody considers possible" operator `S` and
//! distributed knowledge `D`.
//!
//! Concrete syntax (loosest binding first):
//!
//! ```text
//! phi ::= phi "<->" phi | phi "->" phi | phi "|" phi | phi "&" phi
//!       | "~" phi | "[" i "]" phi | "<" i ">" phi | "S" phi | "D" phi
//!       | atom | "(" phi ")"
//! atom ::= [a-z][a-z0-9_]*
//! ```
//!
//! `->` associates to the right, the other binary connectives to the left.

mod enumerate;
mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub use enumerate::enumerate_formulas;
pub use parser::{parse, parse_with, Syntax};

/// Agents are numbered from 1.
pub type Agent = usize;

/// Set of formulas, deduplicated up to syntactic identity.
pub type FormulaSet = BTreeSet<Formula>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Agent knows: true iff the body holds at every accessible world.
    Box(Agent, Box<Formula>),
    /// Agent considers possible.
    Diamond(Agent, Box<Formula>),
    /// Some agent considers the body possible.
    Some(Box<Formula>),
    /// Distributed knowledge of all agents.
    Dist(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn knows(agent: Agent, f: Formula) -> Self {
        Formula::Box(agent, Box::new(f))
    }

    pub fn possible(agent: Agent, f: Formula) -> Self {
        Formula::Diamond(agent, Box::new(f))
    }

    pub fn somebody(f: Formula) -> Self {
        Formula::Some(Box::new(f))
    }

    pub fn dist(f: Formula) -> Self {
        Formula::Dist(Box::new(f))
    }

    /// Conjunction of a nonempty list, folded to the left.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Disjunction of a nonempty list, folded to the left.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) | Formula::Some(a) | Formula::Dist(a) => {
                vec![a]
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
        }
    }

    /// Every subformula occurrence, parents before children.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            stack.extend(f.children().into_iter().rev());
        }
        out
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    /// Largest agent index mentioned, 0 if none.
    pub fn max_agent(&self) -> Agent {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Box(i, _) | Formula::Diamond(i, _) => Some(*i),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Nesting depth of the syntax tree; atoms have depth 0.
    pub fn depth(&self) -> usize {
        self.children().into_iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn contains_some(&self) -> bool {
        self.subformulas().into_iter().any(|f| matches!(f, Formula::Some(_)))
    }

    pub fn contains_dist(&self) -> bool {
        self.subformulas().into_iter().any(|f| matches!(f, Formula::Dist(_)))
    }

    /// True when no knowledge, possibility, `S` or `D` operator occurs.
    pub fn is_propositional(&self) -> bool {
        self.subformulas().into_iter().all(|f| {
            matches!(
                f,
                Formula::Atom(_)
                    | Formula::Not(_)
                    | Formula::And(..)
                    | Formula::Or(..)
                    | Formula::Implies(..)
                    | Formula::Iff(..)
            )
        })
    }

    /// Checks that every agent index lies in `1..=n`.
    pub fn check_agents(&self, n: usize) -> Result<()> {
        for f in self.subformulas() {
            if let Formula::Box(i, _) | Formula::Diamond(i, _) = f {
                if *i == 0 || *i > n {
                    return Err(Error::AgentOutOfRange { agent: *i, n });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::render(self))
    }
}

/// Renders a formula in the concrete syntax with minimal parentheses.
pub fn print(f: &Formula) -> String {
    print::render(f)
}

/// Replaces every `S φ` by `<1>φ | … | <n>φ`.
pub fn expand_s(f: &Formula, n: usize) -> Formula {
    let rec = |g: &Formula| Box::new(expand_s(g, n));
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::Not(rec(a)),
        Formula::And(a, b) => Formula::And(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
        Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
        Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
        Formula::Box(i, a) => Formula::Box(*i, rec(a)),
        Formula::Diamond(i, a) => Formula::Diamond(*i, rec(a)),
        Formula::Dist(a) => Formula::Dist(rec(a)),
        Formula::Some(a) => {
            let body = expand_s(a, n);
            Formula::disjunction((1..=n.max(1)).map(|i| Formula::possible(i, body.clone()))).expect("n >= 1")
        }
    }
}

/// Distinct subformulas of `f`.
pub fn distinct_subformulas(f: &Formula) -> FormulaSet {
    f.subformulas().into_iter().cloned().collect()
}

/// The closure used by filtration: every subformula and its negation.
pub fn subformula_closure(f: &Formula) -> FormulaSet {
    let mut out = FormulaSet::new();
    for g in f.subformulas() {
        out.insert(g.clone());
        out.insert(Formula::not(g.clone()));
    }
    out
}

/// Number of distinct subformulas.
pub fn formula_size(f: &Formula) -> usize {
    distinct_subformulas(f).len()
}

/// Whether `f` is a boolean combination of `[i]`/`<i>` formulas.
pub fn is_i_local(f: &Formula, i: Agent) -> bool {
    match f {
        Formula::Box(j, _) | Formula::Diamond(j, _) => *j == i,
        Formula::Not(a) => is_i_local(a, i),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            is_i_local(a, i) && is_i_local(b, i)
        }
        Formula::Atom(_) | Formula::Some(_) | Formula::Dist(_) => false,
    }
}

/// Instance of the weak-directedness axiom for `locals[i-1]` local to agent
/// `i`: `(S φ1 & … & S φn) -> S S (φ1 & … & φn)`, with `S` left unexpanded.
pub fn wd_instance(locals: &[Formula]) -> Result<Formula> {
    if locals.is_empty() {
        return Err(Error::NoAgents);
    }
    for (k, phi) in locals.iter().enumerate() {
        if !is_i_local(phi, k + 1) {
            return Err(Error::NotLocal {
                index: k + 1,
                formula: print(phi),
            });
        }
    }
    let premise = Formula::conjunction(locals.iter().cloned().map(Formula::somebody));
    let joint = Formula::conjunction(locals.iter().cloned());
    Ok(Formula::implies(
        premise.expect("nonempty"),
        Formula::somebody(Formula::somebody(joint.expect("nonempty"))),
    ))
}

/// `<1>[2]p -> [2]<1>p`.
pub fn catach_instance() -> Formula {
    let p = Formula::atom("p");
    Formula::implies(
        Formula::possible(1, Formula::knows(2, p.clone())),
        Formula::knows(2, Formula::possible(1, p)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn expand_s_examples() {
        let f = parse("S p", 2).unwrap();
        assert_eq!(print(&expand_s(&f, 2)), "<1>p | <2>p");
        assert_eq!(expand_s(&p(), 2), p());
        let ss = parse("S S p", 1).unwrap();
        assert_eq!(expand_s(&ss, 1), Formula::possible(1, Formula::possible(1, p())));
    }

    #[test]
    fn expand_s_is_idempotent_and_removes_s() {
        let f = parse("S (p & S [2]q) -> ~S p", 3).unwrap();
        let once = expand_s(&f, 3);
        assert!(!once.contains_some());
        assert_eq!(expand_s(&once, 3), once);
    }

    #[test]
    fn closure_examples() {
        let c = subformula_closure(&p());
        assert_eq!(c, [p(), Formula::not(p())].into_iter().collect());

        let kp = Formula::knows(1, p());
        let c = subformula_closure(&kp);
        let expected: FormulaSet = [kp.clone(), Formula::not(kp), p(), Formula::not(p())]
            .into_iter()
            .collect();
        assert_eq!(c, expected);

        let pp = Formula::and(p(), p());
        let c = subformula_closure(&pp);
        assert_eq!(c.len(), 4);
        assert!(c.contains(&Formula::not(pp)));
    }

    #[test]
    fn size_examples() {
        assert_eq!(formula_size(&p()), 1);
        assert_eq!(formula_size(&parse("[1]p -> p", 2).unwrap()), 3);
        assert_eq!(formula_size(&parse("p & p", 2).unwrap()), 2);
    }

    #[test]
    fn locality_examples() {
        assert!(is_i_local(&parse("[1]p", 2).unwrap(), 1));
        assert!(!is_i_local(&parse("[1]p", 2).unwrap(), 2));
        assert!(is_i_local(&parse("[2]p & ~[2]q", 2).unwrap(), 2));
        assert!(is_i_local(&parse("<1>p -> [1](q | p)", 2).unwrap(), 1));
        assert!(!is_i_local(&parse("[1]p | q", 2).unwrap(), 1));
        assert!(!is_i_local(&parse("S [1]p", 2).unwrap(), 1));
    }

    #[test]
    fn wd_instance_examples() {
        let f = wd_instance(&[parse("[1]p", 2).unwrap(), parse("[2]q", 2).unwrap()]).unwrap();
        assert_eq!(print(&f), "S [1]p & S [2]q -> S S ([1]p & [2]q)");
        assert_eq!(parse(&print(&f), 2).unwrap(), f);

        let f = wd_instance(&[parse("[1]p", 1).unwrap()]).unwrap();
        assert_eq!(print(&f), "S [1]p -> S S [1]p");

        let err = wd_instance(&[p(), parse("[2]q", 2).unwrap()]).unwrap_err();
        assert_eq!(
            err,
            Error::NotLocal {
                index: 1,
                formula: "p".into()
            }
        );
    }

    #[test]
    fn catach_prints() {
        assert_eq!(print(&catach_instance()), "<1>[2]p -> [2]<1>p");
        assert_eq!(parse("<1>[2]p -> [2]<1>p", 2).unwrap(), catach_instance());
    }

    #[test]
    fn closure_bounded_by_twice_size() {
        for text in ["p", "[1]p -> p", "~~p & <2>(q | ~p)", "p <-> [1][2]~p"] {
            let f = parse(text, 2).unwrap();
            assert!(subformula_closure(&f).len() <= 2 * formula_size(&f));
        }
    }
}
