//! Broadcast environments, perfect-recall traces and their frames.
//!
//! A state is `<a0..an; p0..pn>`: the most recent external action and the
//! private state of every agent, agent 0 being the environment. Agent `i`
//! observes the joint external action and its own private state. Each
//! agent's null action is the first external action it lists.

mod construct;
mod decompose;
mod json;
mod protocol;
mod traces;

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

pub use construct::{
    build_card_game, card_set_name, env_from_hypercube, initial_system, Modeling, FULL_GAME_HAND_SIZE,
};
pub use decompose::{product_system, verify_hypercube_decomposition, ComponentReport, DecompositionReport, VerifyMode};
pub use json::{
    environment_from_json, environment_to_json, AgentDoc, EnvironmentDoc, InitialDoc, ProtocolDoc, ProtocolRowDoc,
    TransitionRowDoc, ValuationRowDoc,
};
pub use protocol::{AgentProtocol, JointProtocol, ProtocolRow};
pub use traces::{
    derived_valuation, enabled_actions, enabled_joint_actions, generate_frame, generate_frame_with, is_consistent,
    join, perfect_recall_state, successors, GenerateOptions, Trace, TraceFrame,
};

/// Alphabets of one agent, as symbol lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentAlphabets {
    /// External actions; the first is the null action.
    pub external: Vec<String>,
    pub internal: Vec<String>,
    pub private: Vec<String>,
}

/// `<a0..an; p0..pn>` with symbols as alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub actions: Vec<usize>,
    pub private: Vec<usize>,
}

impl State {
    /// `(a0..an; pi)`.
    pub fn observation(&self, i: usize) -> Observation {
        Observation {
            actions: self.actions.clone(),
            private: self.private[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observation {
    pub actions: Vec<usize>,
    pub private: usize,
}

/// Per-agent `(external, internal)` choices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointAction {
    pub external: Vec<usize>,
    pub internal: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Initial {
    /// Initial private states `I0..In`; every combination is initial.
    Homogeneous(Vec<Vec<usize>>),
    /// Explicit private-state tuples.
    Explicit(Vec<Vec<usize>>),
}

/// `None` matches anything.
pub type Pattern = Vec<Option<usize>>;

fn matches(pattern: &[Option<usize>], values: &[usize]) -> bool {
    pattern.iter().zip(values).all(|(p, v)| p.is_none_or(|p| p == *v))
}

/// One clause of `tau_i`: when the joint external action, internal action
/// and private state match, the private state becomes `to` (unchanged when
/// `None`). The first matching row applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRow {
    pub joint: Pattern,
    pub internal: Option<usize>,
    pub from: Option<usize>,
    pub to: Option<usize>,
}

/// `atom` holds in every state matching both patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationRow {
    pub atom: String,
    pub actions: Pattern,
    pub private: Pattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastEnvironment {
    n: usize,
    agents: Vec<AgentAlphabets>,
    initial: Initial,
    env_protocol: AgentProtocol,
    transitions: Vec<Vec<TransitionRow>>,
    valuation: Vec<ValuationRow>,
}

fn check_alphabet(what: &str, symbols: &[String]) -> Result<()> {
    if symbols.is_empty() {
        return Err(Error::Invalid(format!("{what} is empty")));
    }
    let mut seen = BTreeSet::new();
    for s in symbols {
        if !seen.insert(s) {
            return Err(Error::Invalid(format!("{what} lists `{s}` twice")));
        }
    }
    Ok(())
}

fn check_pattern(what: &str, pattern: &[Option<usize>], sizes: &[usize]) -> Result<()> {
    if pattern.len() != sizes.len() {
        return Err(Error::Invalid(format!(
            "{what} has {} components, expected {}",
            pattern.len(),
            sizes.len()
        )));
    }
    for (p, &size) in pattern.iter().zip(sizes) {
        if p.is_some_and(|p| p >= size) {
            return Err(Error::Invalid(format!("{what} refers to an unknown symbol")));
        }
    }
    Ok(())
}

impl BroadcastEnvironment {
    /// Validates alphabets, initial states, tables and patterns; `agents`,
    /// `transitions` are indexed by agent `0..=n`.
    pub fn new(
        n: usize,
        agents: Vec<AgentAlphabets>,
        initial: Initial,
        env_protocol: AgentProtocol,
        transitions: Vec<Vec<TransitionRow>>,
        valuation: Vec<ValuationRow>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoAgents);
        }
        if agents.len() != n + 1 || transitions.len() != n + 1 {
            return Err(Error::Invalid(format!(
                "expected alphabets and transitions for agents 0..={n}"
            )));
        }
        for (i, a) in agents.iter().enumerate() {
            check_alphabet(&format!("external actions of agent {i}"), &a.external)?;
            check_alphabet(&format!("internal actions of agent {i}"), &a.internal)?;
            check_alphabet(&format!("private states of agent {i}"), &a.private)?;
        }
        let env = BroadcastEnvironment {
            n,
            agents,
            initial,
            env_protocol,
            transitions,
            valuation,
        };
        let ext: Vec<usize> = env.agents.iter().map(|a| a.external.len()).collect();
        let private: Vec<usize> = env.agents.iter().map(|a| a.private.len()).collect();
        match &env.initial {
            Initial::Homogeneous(sets) => {
                if sets.len() != n + 1 {
                    return Err(Error::Invalid(format!(
                        "expected initial private states for agents 0..={n}"
                    )));
                }
                for (i, set) in sets.iter().enumerate() {
                    if set.is_empty() {
                        return Err(Error::Invalid(format!("agent {i} has no initial private state")));
                    }
                    let pattern: Pattern = set.iter().map(|&p| Some(p)).collect();
                    check_pattern(
                        &format!("initial private states of agent {i}"),
                        &pattern,
                        &vec![private[i]; set.len()],
                    )?;
                }
            }
            Initial::Explicit(tuples) => {
                if tuples.is_empty() {
                    return Err(Error::Invalid("environment has no initial state".into()));
                }
                for t in tuples {
                    let pattern: Pattern = t.iter().map(|&p| Some(p)).collect();
                    check_pattern("initial state", &pattern, &private)?;
                }
            }
        }
        for (i, rows) in env.transitions.iter().enumerate() {
            for row in rows {
                let what = format!("transition row of agent {i}");
                check_pattern(&what, &row.joint, &ext)?;
                check_pattern(&what, &[row.internal], &[env.agents[i].internal.len()])?;
                check_pattern(&what, &[row.from, row.to], &[private[i], private[i]])?;
            }
        }
        for row in &env.valuation {
            let what = format!("valuation row for `{}`", row.atom);
            check_pattern(&what, &row.actions, &ext)?;
            check_pattern(&what, &row.private, &private)?;
        }
        env.env_protocol.validate(&env, 0)?;
        Ok(env)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn agent(&self, i: usize) -> &AgentAlphabets {
        &self.agents[i]
    }

    pub fn initial(&self) -> &Initial {
        &self.initial
    }

    pub fn env_protocol(&self) -> &AgentProtocol {
        &self.env_protocol
    }

    pub fn transitions(&self, i: usize) -> &[TransitionRow] {
        &self.transitions[i]
    }

    pub fn valuation_rows(&self) -> &[ValuationRow] {
        &self.valuation
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.initial, Initial::Homogeneous(_))
    }

    /// Initial states in lexicographic order of their private tuples.
    pub fn initial_states(&self) -> Vec<State> {
        let mut tuples: Vec<Vec<usize>> = match &self.initial {
            Initial::Homogeneous(sets) => {
                let mut out = vec![Vec::new()];
                for set in sets {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            set.iter().map(move |&p| {
                                let mut t = prefix.clone();
                                t.push(p);
                                t
                            })
                        })
                        .collect();
                }
                out
            }
            Initial::Explicit(tuples) => tuples.clone(),
        };
        tuples.sort();
        tuples.dedup();
        tuples
            .into_iter()
            .map(|private| State {
                actions: vec![0; self.n + 1],
                private,
            })
            .collect()
    }

    pub fn is_initial(&self, s: &State) -> bool {
        if s.actions.iter().any(|&a| a != 0) || s.private.len() != self.n + 1 {
            return false;
        }
        match &self.initial {
            Initial::Homogeneous(sets) => s.private.iter().zip(sets).all(|(p, set)| set.contains(p)),
            Initial::Explicit(tuples) => tuples.contains(&s.private),
        }
    }

    /// `O_i(s)`.
    pub fn observation(&self, i: usize, s: &State) -> Observation {
        s.observation(i)
    }

    /// `tau_i(joint, b)(p)`, or `None` where the table is silent. An empty
    /// table leaves every private state unchanged.
    pub fn transition(&self, i: usize, joint: &[usize], b: usize, p: usize) -> Option<usize> {
        if self.transitions[i].is_empty() {
            return Some(p);
        }
        self.transitions[i]
            .iter()
            .find(|row| {
                matches(&row.joint, joint) && row.internal.is_none_or(|x| x == b) && row.from.is_none_or(|x| x == p)
            })
            .map(|row| row.to.unwrap_or(p))
    }

    /// `tau(j)(s)`.
    pub fn apply(&self, j: &JointAction, s: &State) -> Result<State> {
        let private = (0..=self.n)
            .map(|i| {
                self.transition(i, &j.external, j.internal[i], s.private[i])
                    .ok_or_else(|| {
                        Error::Invalid(format!(
                            "no transition for agent {i} under {} from `{}`",
                            self.joint_action_name(j),
                            self.agents[i].private[s.private[i]]
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(State {
            actions: j.external.clone(),
            private,
        })
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.valuation.iter().map(|r| r.atom.clone()).collect()
    }

    /// `V(s, atom)`.
    pub fn holds(&self, s: &State, atom: &str) -> bool {
        self.valuation
            .iter()
            .any(|r| r.atom == atom && matches(&r.actions, &s.actions) && matches(&r.private, &s.private))
    }

    pub fn atoms_at(&self, s: &State) -> BTreeSet<String> {
        self.valuation
            .iter()
            .filter(|r| matches(&r.actions, &s.actions) && matches(&r.private, &s.private))
            .map(|r| r.atom.clone())
            .collect()
    }

    fn actions_name(&self, actions: &[usize]) -> String {
        let names: Vec<&str> = actions
            .iter()
            .enumerate()
            .map(|(i, &a)| self.agents[i].external[a].as_str())
            .collect();
        names.join(",")
    }

    /// `<a0,..,an;p0,..,pn>`.
    pub fn state_name(&self, s: &State) -> String {
        let private: Vec<&str> = s
            .private
            .iter()
            .enumerate()
            .map(|(i, &p)| self.agents[i].private[p].as_str())
            .collect();
        format!("<{};{}>", self.actions_name(&s.actions), private.join(","))
    }

    /// `<a0,..,an;pi>`.
    pub fn observation_name(&self, i: usize, o: &Observation) -> String {
        format!(
            "<{};{}>",
            self.actions_name(&o.actions),
            self.agents[i].private[o.private]
        )
    }

    pub fn joint_action_name(&self, j: &JointAction) -> String {
        let parts: Vec<String> = (0..=self.n)
            .map(|i| {
                format!(
                    "{}.{}",
                    self.agents[i].external[j.external[i]], self.agents[i].internal[j.internal[i]]
                )
            })
            .collect();
        format!("<{}>", parts.join(","))
    }

    pub(crate) fn symbol_index(&self) -> SymbolIndex {
        SymbolIndex::new(&self.agents)
    }
}

/// Reverse lookup of symbols per agent.
pub(crate) struct SymbolIndex {
    external: Vec<HashMap<String, usize>>,
    internal: Vec<HashMap<String, usize>>,
    private: Vec<HashMap<String, usize>>,
}

impl SymbolIndex {
    pub(crate) fn new(agents: &[AgentAlphabets]) -> Self {
        let index = |f: fn(&AgentAlphabets) -> &Vec<String>| {
            agents
                .iter()
                .map(|a| f(a).iter().enumerate().map(|(k, s)| (s.clone(), k)).collect())
                .collect()
        };
        SymbolIndex {
            external: index(|a| &a.external),
            internal: index(|a| &a.internal),
            private: index(|a| &a.private),
        }
    }

    fn lookup(map: &HashMap<String, usize>, what: &str, i: usize, sym: &str) -> Result<usize> {
        map.get(sym)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("`{sym}` is not a {what} of agent {i}")))
    }

    pub(crate) fn external(&self, i: usize, sym: &str) -> Result<usize> {
        Self::lookup(&self.external[i], "external action", i, sym)
    }

    pub(crate) fn internal(&self, i: usize, sym: &str) -> Result<usize> {
        Self::lookup(&self.internal[i], "internal action", i, sym)
    }

    pub(crate) fn private(&self, i: usize, sym: &str) -> Result<usize> {
        Self::lookup(&self.private[i], "private state", i, sym)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> BroadcastEnvironment {
        let agent = |private: &[&str]| AgentAlphabets {
            external: vec!["eps".into(), "go".into()],
            internal: vec!["eps".into()],
            private: private.iter().map(|s| s.to_string()).collect(),
        };
        BroadcastEnvironment::new(
            1,
            vec![agent(&["e"]), agent(&["a", "b"])],
            Initial::Homogeneous(vec![vec![0], vec![0, 1]]),
            AgentProtocol::Any,
            vec![
                vec![TransitionRow {
                    joint: vec![None, None],
                    internal: None,
                    from: None,
                    to: None,
                }],
                vec![
                    TransitionRow {
                        joint: vec![None, Some(1)],
                        internal: None,
                        from: Some(0),
                        to: Some(1),
                    },
                    TransitionRow {
                        joint: vec![None, None],
                        internal: None,
                        from: None,
                        to: None,
                    },
                ],
            ],
            vec![ValuationRow {
                atom: "p".into(),
                actions: vec![None, None],
                private: vec![None, Some(1)],
            }],
        )
        .unwrap()
    }

    #[test]
    fn initial_states_and_observations() {
        let e = tiny();
        let init = e.initial_states();
        assert_eq!(init.len(), 2);
        assert!(init.iter().all(|s| e.is_initial(s)));
        let o = e.observation(1, &init[1]);
        assert_eq!(
            o,
            Observation {
                actions: vec![0, 0],
                private: 1
            }
        );
        assert_eq!(e.observation_name(1, &o), "<eps,eps;b>");
        assert_eq!(e.observation(0, &init[1]).private, 0);
        assert_eq!(e.state_name(&init[0]), "<eps,eps;e,a>");
    }

    #[test]
    fn transitions_first_match() {
        let e = tiny();
        let s = &e.initial_states()[0];
        let j = JointAction {
            external: vec![0, 1],
            internal: vec![0, 0],
        };
        let t = e.apply(&j, s).unwrap();
        assert_eq!(
            t,
            State {
                actions: vec![0, 1],
                private: vec![0, 1]
            }
        );
        assert!(e.holds(&t, "p") && !e.holds(s, "p"));
        assert!(!e.is_initial(&t));
        assert_eq!(e.atoms_at(&t), ["p".to_string()].into());
    }

    #[test]
    fn rejects_bad_tables() {
        let agent = AgentAlphabets {
            external: vec!["eps".into()],
            internal: vec!["eps".into()],
            private: vec!["x".into()],
        };
        let bad = BroadcastEnvironment::new(
            1,
            vec![agent.clone(), agent.clone()],
            Initial::Explicit(vec![vec![0, 3]]),
            AgentProtocol::Any,
            vec![Vec::new(), Vec::new()],
            Vec::new(),
        );
        assert!(matches!(bad, Err(Error::Invalid(_))));
        let dup = AgentAlphabets {
            private: vec!["x".into(), "x".into()],
            ..agent.clone()
        };
        assert!(BroadcastEnvironment::new(
            1,
            vec![agent.clone(), dup],
            Initial::Explicit(vec![vec![0, 0]]),
            AgentProtocol::Any,
            vec![Vec::new(), Vec::new()],
            Vec::new(),
        )
        .is_err());
    }
}
