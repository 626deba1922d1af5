use super::{check_pattern, matches, BroadcastEnvironment, Observation, Pattern};
use crate::error::{Error, Result};

/// One row of a memoryless protocol: when the last observation matches,
/// the `(external, internal)` pairs in `allow` are enabled. The first
/// matching row applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolRow {
    pub actions: Pattern,
    pub private: Option<usize>,
    pub allow: Vec<(usize, usize)>,
}

/// A protocol determined by the agent's last observation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AgentProtocol {
    /// Every action is enabled.
    #[default]
    Any,
    /// Private states are card sets `{c1,c2}`; enables `{c}` for each held
    /// card, or `{}` when the hand is empty.
    PlayAnyCard,
    Table(Vec<ProtocolRow>),
}

impl AgentProtocol {
    pub(crate) fn validate(&self, env: &BroadcastEnvironment, i: usize) -> Result<()> {
        let alpha = env.agent(i);
        match self {
            AgentProtocol::Any => Ok(()),
            AgentProtocol::PlayAnyCard => {
                if !alpha.external.iter().any(|a| a == "{}") {
                    return Err(Error::Invalid(format!(
                        "play-any-card needs the action `{{}}` for agent {i}"
                    )));
                }
                Ok(())
            }
            AgentProtocol::Table(rows) => {
                let ext: Vec<usize> = (0..=env.n()).map(|k| env.agent(k).external.len()).collect();
                for row in rows {
                    let what = format!("protocol row of agent {i}");
                    check_pattern(&what, &row.actions, &ext)?;
                    check_pattern(&what, &[row.private], &[alpha.private.len()])?;
                    if row.allow.is_empty() {
                        return Err(Error::Invalid(format!("{what} enables no action")));
                    }
                    for &(a, b) in &row.allow {
                        if a >= alpha.external.len() || b >= alpha.internal.len() {
                            return Err(Error::Invalid(format!("{what} enables an unknown action")));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Enabled `(external, internal)` pairs after observing `obs`, sorted.
    pub fn allowed(&self, env: &BroadcastEnvironment, i: usize, obs: &Observation) -> Result<Vec<(usize, usize)>> {
        let alpha = env.agent(i);
        let mut out = match self {
            AgentProtocol::Any => (0..alpha.external.len())
                .flat_map(|a| (0..alpha.internal.len()).map(move |b| (a, b)))
                .collect(),
            AgentProtocol::PlayAnyCard => {
                let hand = &alpha.private[obs.private];
                let cards = hand
                    .strip_prefix('{')
                    .and_then(|h| h.strip_suffix('}'))
                    .ok_or_else(|| Error::Invalid(format!("`{hand}` is not a card set")))?;
                let plays: Vec<String> = if cards.is_empty() {
                    vec!["{}".to_string()]
                } else {
                    cards.split(',').map(|c| format!("{{{c}}}")).collect()
                };
                let index = env.symbol_index();
                plays
                    .iter()
                    .map(|p| Ok((index.external(i, p)?, 0)))
                    .collect::<Result<Vec<_>>>()?
            }
            AgentProtocol::Table(rows) => rows
                .iter()
                .find(|r| matches(&r.actions, &obs.actions) && r.private.is_none_or(|p| p == obs.private))
                .map(|r| r.allow.clone())
                .ok_or_else(|| {
                    Error::Invalid(format!(
                        "protocol of agent {i} is undefined at {}",
                        env.observation_name(i, obs)
                    ))
                })?,
        };
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// Protocols of agents `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointProtocol {
    agents: Vec<AgentProtocol>,
}

impl JointProtocol {
    pub fn new(env: &BroadcastEnvironment, agents: Vec<AgentProtocol>) -> Result<Self> {
        if agents.len() != env.n() {
            return Err(Error::Invalid(format!(
                "expected {} agent protocols, got {}",
                env.n(),
                agents.len()
            )));
        }
        for (k, p) in agents.iter().enumerate() {
            p.validate(env, k + 1)?;
        }
        Ok(JointProtocol { agents })
    }

    /// Every agent may do anything.
    pub fn any(n: usize) -> Self {
        JointProtocol {
            agents: vec![AgentProtocol::Any; n],
        }
    }

    /// Protocol of agent `i` in `1..=n`.
    pub fn agent(&self, i: usize) -> &AgentProtocol {
        &self.agents[i - 1]
    }

    pub fn agents(&self) -> &[AgentProtocol] {
        &self.agents
    }
}
