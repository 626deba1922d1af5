//! JSON form of an environment together with the agents' protocols.
//!
//! Symbols are strings. Patterns are lists with one entry per agent
//! `0..=n`, where `null` matches anything; an omitted pattern matches
//! everything.

use serde::{Deserialize, Serialize};

use super::protocol::{AgentProtocol, JointProtocol, ProtocolRow};
use super::{AgentAlphabets, BroadcastEnvironment, Initial, Pattern, SymbolIndex, TransitionRow, ValuationRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentDoc {
    pub n: usize,
    /// Agents `0..=n`, the environment first.
    pub agents: Vec<AgentDoc>,
    pub initial: InitialDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub valuation: Vec<ValuationRowDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentDoc {
    /// The first entry is the null action.
    pub external: Vec<String>,
    pub internal: Vec<String>,
    pub private: Vec<String>,
    /// Rows of `tau_i`, first match wins.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<TransitionRowDoc>,
    /// The environment protocol for agent 0, the agent's protocol otherwise.
    #[serde(default)]
    pub protocol: ProtocolDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialDoc {
    /// Initial private states per agent `0..=n`.
    Homogeneous(Vec<Vec<String>>),
    /// Private-state tuples `[p0, .., pn]`.
    Explicit(Vec<Vec<String>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolDoc {
    #[default]
    Any,
    PlayAnyCard,
    Table {
        rows: Vec<ProtocolRowDoc>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolRowDoc {
    /// Pattern on the last joint external action.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<Option<String>>>,
    /// The agent's last private state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub private: Option<String>,
    /// Enabled `[external, internal]` pairs.
    pub allow: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRowDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<Option<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    /// Omitted: the private state is unchanged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationRowDoc {
    pub atom: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<Option<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub private: Option<Vec<Option<String>>>,
}

type Lookup<'a> = &'a dyn Fn(usize, &str) -> Result<usize>;

fn pattern(n: usize, doc: &Option<Vec<Option<String>>>, lookup: Lookup) -> Result<Pattern> {
    let Some(entries) = doc else {
        return Ok(vec![None; n + 1]);
    };
    if entries.len() != n + 1 {
        return Err(Error::Invalid(format!(
            "pattern has {} entries, expected {}",
            entries.len(),
            n + 1
        )));
    }
    entries
        .iter()
        .enumerate()
        .map(|(k, e)| e.as_deref().map(|s| lookup(k, s)).transpose())
        .collect()
}

fn unpattern(p: &[Option<usize>], name: &dyn Fn(usize, usize) -> String) -> Option<Vec<Option<String>>> {
    if p.iter().all(Option::is_none) {
        return None;
    }
    Some(p.iter().enumerate().map(|(k, x)| x.map(|x| name(k, x))).collect())
}

fn protocol(n: usize, i: usize, doc: &ProtocolDoc, index: &SymbolIndex) -> Result<AgentProtocol> {
    Ok(match doc {
        ProtocolDoc::Any => AgentProtocol::Any,
        ProtocolDoc::PlayAnyCard => AgentProtocol::PlayAnyCard,
        ProtocolDoc::Table { rows } => AgentProtocol::Table(
            rows.iter()
                .map(|r| {
                    Ok(ProtocolRow {
                        actions: pattern(n, &r.actions, &|k, s| index.external(k, s))?,
                        private: r.private.as_deref().map(|s| index.private(i, s)).transpose()?,
                        allow: r
                            .allow
                            .iter()
                            .map(|(a, b)| Ok((index.external(i, a)?, index.internal(i, b)?)))
                            .collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
    })
}

impl EnvironmentDoc {
    pub fn into_environment(self) -> Result<(BroadcastEnvironment, JointProtocol)> {
        let n = self.n;
        if n == 0 {
            return Err(Error::NoAgents);
        }
        if self.agents.len() != n + 1 {
            return Err(Error::Invalid(format!(
                "expected {} agents (the environment first), got {}",
                n + 1,
                self.agents.len()
            )));
        }
        let alphabets: Vec<AgentAlphabets> = self
            .agents
            .iter()
            .map(|a| AgentAlphabets {
                external: a.external.clone(),
                internal: a.internal.clone(),
                private: a.private.clone(),
            })
            .collect();
        let index = SymbolIndex::new(&alphabets);
        let initial = match &self.initial {
            InitialDoc::Homogeneous(sets) => Initial::Homogeneous(
                sets.iter()
                    .enumerate()
                    .map(|(i, set)| set.iter().map(|s| index.private(i, s)).collect())
                    .collect::<Result<_>>()?,
            ),
            InitialDoc::Explicit(tuples) => Initial::Explicit(
                tuples
                    .iter()
                    .map(|t| {
                        if t.len() != n + 1 {
                            return Err(Error::Invalid(format!("initial state {t:?} needs {} entries", n + 1)));
                        }
                        t.iter().enumerate().map(|(i, s)| index.private(i, s)).collect()
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let transitions = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                a.transitions
                    .iter()
                    .map(|r| {
                        Ok(TransitionRow {
                            joint: pattern(n, &r.joint, &|k, s| index.external(k, s))?,
                            internal: r.internal.as_deref().map(|s| index.internal(i, s)).transpose()?,
                            from: r.from.as_deref().map(|s| index.private(i, s)).transpose()?,
                            to: r.to.as_deref().map(|s| index.private(i, s)).transpose()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let valuation = self
            .valuation
            .iter()
            .map(|r| {
                Ok(ValuationRow {
                    atom: r.atom.clone(),
                    actions: pattern(n, &r.actions, &|k, s| index.external(k, s))?,
                    private: pattern(n, &r.private, &|k, s| index.private(k, s))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let env_protocol = protocol(n, 0, &self.agents[0].protocol, &index)?;
        let agents = (1..=n)
            .map(|i| protocol(n, i, &self.agents[i].protocol, &index))
            .collect::<Result<Vec<_>>>()?;
        let env = BroadcastEnvironment::new(n, alphabets, initial, env_protocol, transitions, valuation)?;
        let joint = JointProtocol::new(&env, agents)?;
        Ok((env, joint))
    }

    pub fn from_environment(env: &BroadcastEnvironment, p: &JointProtocol) -> Self {
        let n = env.n();
        let ext = |k: usize, x: usize| env.agent(k).external[x].clone();
        let priv_name = |k: usize, x: usize| env.agent(k).private[x].clone();
        let proto = |i: usize, ap: &AgentProtocol| match ap {
            AgentProtocol::Any => ProtocolDoc::Any,
            AgentProtocol::PlayAnyCard => ProtocolDoc::PlayAnyCard,
            AgentProtocol::Table(rows) => ProtocolDoc::Table {
                rows: rows
                    .iter()
                    .map(|r| ProtocolRowDoc {
                        actions: unpattern(&r.actions, &ext),
                        private: r.private.map(|x| priv_name(i, x)),
                        allow: r
                            .allow
                            .iter()
                            .map(|&(a, b)| (ext(i, a), env.agent(i).internal[b].clone()))
                            .collect(),
                    })
                    .collect(),
            },
        };
        let agents = (0..=n)
            .map(|i| {
                let a = env.agent(i);
                AgentDoc {
                    external: a.external.clone(),
                    internal: a.internal.clone(),
                    private: a.private.clone(),
                    transitions: env
                        .transitions(i)
                        .iter()
                        .map(|r| TransitionRowDoc {
                            joint: unpattern(&r.joint, &ext),
                            internal: r.internal.map(|x| a.internal[x].clone()),
                            from: r.from.map(|x| a.private[x].clone()),
                            to: r.to.map(|x| a.private[x].clone()),
                        })
                        .collect(),
                    protocol: proto(i, if i == 0 { env.env_protocol() } else { p.agent(i) }),
                }
            })
            .collect();
        let initial = match env.initial() {
            Initial::Homogeneous(sets) => InitialDoc::Homogeneous(
                sets.iter()
                    .enumerate()
                    .map(|(i, set)| set.iter().map(|&x| priv_name(i, x)).collect())
                    .collect(),
            ),
            Initial::Explicit(tuples) => InitialDoc::Explicit(
                tuples
                    .iter()
                    .map(|t| t.iter().enumerate().map(|(i, &x)| priv_name(i, x)).collect())
                    .collect(),
            ),
        };
        let valuation = env
            .valuation_rows()
            .iter()
            .map(|r| ValuationRowDoc {
                atom: r.atom.clone(),
                actions: unpattern(&r.actions, &ext),
                private: unpattern(&r.private, &priv_name),
            })
            .collect();
        EnvironmentDoc {
            n,
            agents,
            initial,
            valuation,
        }
    }
}

pub fn environment_from_json(text: &str) -> Result<(BroadcastEnvironment, JointProtocol)> {
    let doc: EnvironmentDoc =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("environment JSON: {e}")))?;
    doc.into_environment()
}

pub fn environment_to_json(env: &BroadcastEnvironment, p: &JointProtocol) -> String {
    serde_json::to_string_pretty(&EnvironmentDoc::from_environment(env, p)).expect("serializable")
}
