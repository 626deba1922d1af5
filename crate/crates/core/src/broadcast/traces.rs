use std::collections::{BTreeSet, HashMap};

use super::{BroadcastEnvironment, JointAction, JointProtocol, Observation, State};
use crate::error::{Error, Result};
use crate::kripke::{Frame, Model, Relation};

/// A nonempty sequence of states starting in an initial state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    states: Vec<State>,
}

impl Trace {
    pub fn new(states: Vec<State>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Invalid("a trace has at least one state".into()));
        }
        Ok(Trace { states })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `fin(r)`.
    pub fn last(&self) -> &State {
        self.states.last().expect("nonempty")
    }

    /// The first `k` states.
    pub fn prefix(&self, k: usize) -> Trace {
        Trace {
            states: self.states[..k].to_vec(),
        }
    }

    pub fn extended(&self, s: State) -> Trace {
        let mut states = self.states.clone();
        states.push(s);
        Trace { states }
    }

    /// `A(r)`: the joint external action of every state.
    pub fn action_sequence(&self) -> Vec<&[usize]> {
        self.states.iter().map(|s| s.actions.as_slice()).collect()
    }

    pub fn name(&self, env: &BroadcastEnvironment) -> String {
        let parts: Vec<String> = self.states.iter().map(|s| env.state_name(s)).collect();
        parts.join(" ")
    }
}

/// `{r}_i`: agent `i`'s observations along the trace.
pub fn perfect_recall_state(tr: &Trace, i: usize) -> Vec<Observation> {
    tr.states.iter().map(|s| s.observation(i)).collect()
}

/// Actions of agent `i` enabled at `tr`: agent 0 consults the environment
/// protocol on its observation of `fin(tr)`; other agents consult their
/// protocol on their last observation.
pub fn enabled_actions(
    env: &BroadcastEnvironment,
    p: &JointProtocol,
    tr: &Trace,
    i: usize,
) -> Result<Vec<(usize, usize)>> {
    let obs = tr.last().observation(i);
    if i == 0 {
        env.env_protocol().allowed(env, 0, &obs)
    } else {
        p.agent(i).allowed(env, i, &obs)
    }
}

/// The product of the per-agent enabled sets, in lexicographic order.
pub fn enabled_joint_actions(env: &BroadcastEnvironment, p: &JointProtocol, tr: &Trace) -> Result<Vec<JointAction>> {
    let mut out = vec![JointAction {
        external: Vec::new(),
        internal: Vec::new(),
    }];
    for i in 0..=env.n() {
        let mine = enabled_actions(env, p, tr, i)?;
        if mine.is_empty() {
            return Err(Error::Invalid(format!("agent {i} has no enabled action")));
        }
        out = out
            .into_iter()
            .flat_map(|j| {
                mine.iter().map(move |&(a, b)| {
                    let mut j = j.clone();
                    j.external.push(a);
                    j.internal.push(b);
                    j
                })
            })
            .collect();
    }
    Ok(out)
}

/// Distinct states reachable in one enabled step, sorted.
pub fn successors(env: &BroadcastEnvironment, p: &JointProtocol, tr: &Trace) -> Result<Vec<State>> {
    let next: BTreeSet<State> = enabled_joint_actions(env, p, tr)?
        .iter()
        .map(|j| env.apply(j, tr.last()))
        .collect::<Result<_>>()?;
    Ok(next.into_iter().collect())
}

/// Replays `tr`: the first state is initial and every step is produced by
/// some enabled joint action.
pub fn is_consistent(env: &BroadcastEnvironment, p: &JointProtocol, tr: &Trace) -> bool {
    if !env.is_initial(&tr.states[0]) {
        return false;
    }
    for k in 1..tr.len() {
        let prefix = tr.prefix(k);
        let (from, to) = (&tr.states[k - 1], &tr.states[k]);
        if to.actions.len() != env.n() + 1 || to.private.len() != env.n() + 1 {
            return false;
        }
        // the enabled set is a product, so each agent can be checked alone
        for i in 0..=env.n() {
            let Ok(mine) = enabled_actions(env, p, &prefix, i) else {
                return false;
            };
            let justified = mine.iter().any(|&(a, b)| {
                a == to.actions[i] && env.transition(i, &to.actions, b, from.private[i]) == Some(to.private[i])
            });
            if !justified {
                return false;
            }
        }
    }
    true
}

/// `r1 ⋈_i r2`: `r1` with agent `i`'s private states taken from `r2`.
pub fn join(r1: &Trace, r2: &Trace, i: usize) -> Result<Trace> {
    if r1.action_sequence() != r2.action_sequence() {
        return Err(Error::Precondition("traces have different action sequences".into()));
    }
    let states = r1
        .states
        .iter()
        .zip(&r2.states)
        .map(|(s, t)| {
            let mut u = s.clone();
            if i >= u.private.len() {
                return Err(Error::AgentOutOfRange {
                    agent: i,
                    n: u.private.len() - 1,
                });
            }
            u.private[i] = t.private[i];
            Ok(u)
        })
        .collect::<Result<_>>()?;
    Ok(Trace { states })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    pub max_traces: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { max_traces: 1 << 18 }
    }
}

/// The perfect-recall frame on a list of traces, plus the traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFrame {
    pub frame: Frame,
    pub traces: Vec<Trace>,
}

impl TraceFrame {
    /// Worlds are the traces in order; agent `i` relates traces with equal
    /// perfect-recall states, for `i` in `1..=n`.
    pub fn from_traces(env: &BroadcastEnvironment, traces: Vec<Trace>) -> Result<Self> {
        let names = traces.iter().map(|t| t.name(env)).collect();
        let relations = (1..=env.n())
            .map(|i| {
                let mut classes: Vec<Vec<usize>> = Vec::new();
                let mut index: HashMap<Vec<Observation>, usize> = HashMap::new();
                for (w, t) in traces.iter().enumerate() {
                    let c = *index.entry(perfect_recall_state(t, i)).or_insert_with(|| {
                        classes.push(Vec::new());
                        classes.len() - 1
                    });
                    classes[c].push(w);
                }
                Relation::from_partition(traces.len(), &classes)
            })
            .collect::<Result<Vec<_>>>()?;
        let frame = Frame::new(env.n(), names, relations)?;
        Ok(TraceFrame { frame, traces })
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// `a ~_i b` for `i` in `0..=n`; agent 0 compares its own observations.
    pub fn related(&self, i: usize, a: usize, b: usize) -> bool {
        let (ta, tb) = (&self.traces[a], &self.traces[b]);
        ta.len() == tb.len()
            && ta
                .states
                .iter()
                .zip(&tb.states)
                .all(|(s, t)| s.observation(i) == t.observation(i))
    }

    pub fn index_of(&self, tr: &Trace) -> Option<usize> {
        self.traces.iter().position(|t| t == tr)
    }

    /// The same frame without world `w`.
    pub fn without(&self, env: &BroadcastEnvironment, w: usize) -> Result<Self> {
        let mut traces = self.traces.clone();
        traces.remove(w);
        Self::from_traces(env, traces)
    }
}

pub fn generate_frame(env: &BroadcastEnvironment, p: &JointProtocol, depth: usize) -> Result<TraceFrame> {
    generate_frame_with(env, p, depth, GenerateOptions::default())
}

/// Every trace of length at most `depth` consistent with `p`, by length,
/// then parent order, then successor state order.
pub fn generate_frame_with(
    env: &BroadcastEnvironment,
    p: &JointProtocol,
    depth: usize,
    opts: GenerateOptions,
) -> Result<TraceFrame> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    let mut traces: Vec<Trace> = env
        .initial_states()
        .into_iter()
        .map(|s| Trace { states: vec![s] })
        .collect();
    let over = |count: usize| Error::Budget(format!("more than {} traces ({count} so far)", opts.max_traces));
    if traces.len() > opts.max_traces {
        return Err(over(traces.len()));
    }
    let mut level = 0..traces.len();
    for _ in 1..depth {
        let start = traces.len();
        for k in level.clone() {
            for s in successors(env, p, &traces[k])? {
                let t = traces[k].extended(s);
                traces.push(t);
                if traces.len() > opts.max_traces {
                    return Err(over(traces.len()));
                }
            }
        }
        level = start..traces.len();
    }
    TraceFrame::from_traces(env, traces)
}

/// Each trace gets the atoms true at its final state.
pub fn derived_valuation(env: &BroadcastEnvironment, tf: &TraceFrame) -> Model {
    let valuation = tf.traces.iter().map(|t| env.atoms_at(t.last())).collect();
    Model::new(tf.frame.clone(), valuation).expect("one atom set per trace")
}
