use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Frame, Model, WorldMap};
use crate::error::{Error, Result};

/// Limits for the isomorphism search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsoBudget {
    pub max_worlds: usize,
    pub max_steps: u64,
}

impl Default for IsoBudget {
    fn default() -> Self {
        IsoBudget {
            max_worlds: 12,
            max_steps: 1_000_000,
        }
    }
}

impl IsoBudget {
    /// No bound on frame size; refinement usually makes large searches cheap.
    pub fn unbounded_size() -> Self {
        IsoBudget {
            max_worlds: usize::MAX,
            max_steps: 10_000_000,
        }
    }
}

/// A bijection `h` with `w Ri v <=> h(w) Ri h(v)` for every agent, if any.
pub fn find_isomorphism(a: &Frame, b: &Frame, budget: IsoBudget) -> Result<Option<WorldMap>> {
    search(a, b, None, budget)
}

/// As `find_isomorphism`, additionally requiring `π(w) = π'(h(w))`.
pub fn find_model_isomorphism(a: &Model, b: &Model, budget: IsoBudget) -> Result<Option<WorldMap>> {
    let mut ids: HashMap<&BTreeSet<String>, usize> = HashMap::new();
    let mut colors = Vec::with_capacity(a.len() + b.len());
    for s in a.valuation().iter().chain(b.valuation()) {
        let next = ids.len();
        colors.push(*ids.entry(s).or_insert(next));
    }
    let cb = colors.split_off(a.len());
    let ca = colors;
    search(a.frame(), b.frame(), Some((ca, cb)), budget)
}

fn search(
    a: &Frame,
    b: &Frame,
    initial: Option<(Vec<usize>, Vec<usize>)>,
    budget: IsoBudget,
) -> Result<Option<WorldMap>> {
    if a.n() != b.n() {
        return Err(Error::AgentMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    if a.len() > budget.max_worlds {
        return Err(Error::Budget(format!(
            "isomorphism search on {} worlds exceeds the limit of {}",
            a.len(),
            budget.max_worlds
        )));
    }
    if (1..=a.n()).any(|i| a.relation(i).pair_count() != b.relation(i).pair_count()) {
        return Ok(None);
    }
    let size = a.len();
    let init = match initial {
        Some((ca, cb)) => ca.into_iter().chain(cb).collect(),
        None => vec![0; 2 * size],
    };
    let colors = refine(a, b, init);
    let (ca, cb) = colors.split_at(size);
    let mut hist_a = ca.to_vec();
    let mut hist_b = cb.to_vec();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return Ok(None);
    }

    let order = bfs_order(a);
    let mut st = State {
        a,
        b,
        ca,
        cb,
        order: &order,
        map: vec![usize::MAX; size],
        used: vec![false; size],
        steps: 0,
        max_steps: budget.max_steps,
    };
    if st.extend(0)? {
        Ok(Some(WorldMap::new(st.map)))
    } else {
        Ok(None)
    }
}

/// Colour refinement over the disjoint union of `a` and `b`; entries
/// `0..|a|` colour `a`, the rest colour `b`.
fn refine(a: &Frame, b: &Frame, mut colors: Vec<usize>) -> Vec<usize> {
    let size = a.len();
    let n = a.n();
    let mut preds: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); 2 * size]; n];
    for i in 1..=n {
        for (x, y) in a.relation(i).pairs() {
            preds[i - 1][y].push(x);
        }
        for (x, y) in b.relation(i).pairs() {
            preds[i - 1][y + size].push(x + size);
        }
    }
    let succ = |i: usize, w: usize| -> Vec<usize> {
        if w < size {
            a.relation(i).successors(w).to_vec()
        } else {
            b.relation(i).successors(w - size).iter().map(|v| v + size).collect()
        }
    };
    let mut count = colors.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = Vec::with_capacity(2 * size);
        for w in 0..2 * size {
            let mut sig = vec![colors[w]];
            for i in 1..=n {
                let mut s: Vec<usize> = succ(i, w).into_iter().map(|v| colors[v]).collect();
                s.sort_unstable();
                let mut p: Vec<usize> = preds[i - 1][w].iter().map(|&v| colors[v]).collect();
                p.sort_unstable();
                sig.push(usize::MAX);
                sig.extend(s);
                sig.push(usize::MAX);
                sig.extend(p);
            }
            let fresh = ids.len();
            next.push(*ids.entry(sig).or_insert(fresh));
        }
        colors = next;
        if ids.len() == count {
            return colors;
        }
        count = ids.len();
    }
}

/// Worlds of `a` in breadth-first order over the undirected union relation.
fn bfs_order(a: &Frame) -> Vec<usize> {
    let mut adj = vec![Vec::new(); a.len()];
    for r in a.relations() {
        for (x, y) in r.pairs() {
            adj[x].push(y);
            adj[y].push(x);
        }
    }
    let mut seen = vec![false; a.len()];
    let mut order = Vec::with_capacity(a.len());
    for s in 0..a.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(w) = q.pop_front() {
            order.push(w);
            for &v in &adj[w] {
                if !seen[v] {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
    }
    order
}

struct State<'a> {
    a: &'a Frame,
    b: &'a Frame,
    ca: &'a [usize],
    cb: &'a [usize],
    order: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
    steps: u64,
    max_steps: u64,
}

impl State<'_> {
    fn consistent(&self, w: usize, t: usize, depth: usize) -> bool {
        (1..=self.a.n()).all(|i| {
            let ra = self.a.relation(i);
            let rb = self.b.relation(i);
            ra.contains(w, w) == rb.contains(t, t)
                && self.order[..depth].iter().all(|&u| {
                    let h = self.map[u];
                    ra.contains(w, u) == rb.contains(t, h) && ra.contains(u, w) == rb.contains(h, t)
                })
        })
    }

    fn extend(&mut self, depth: usize) -> Result<bool> {
        if depth == self.order.len() {
            return Ok(true);
        }
        let w = self.order[depth];
        for t in 0..self.b.len() {
            if self.used[t] || self.cb[t] != self.ca[w] {
                continue;
            }
            self.steps += 1;
            if self.steps > self.max_steps {
                return Err(Error::Budget(format!(
                    "isomorphism search exceeded {} steps",
                    self.max_steps
                )));
            }
            if !self.consistent(w, t, depth) {
                continue;
            }
            self.map[w] = t;
            self.used[t] = true;
            if self.extend(depth + 1)? {
                return Ok(true);
            }
            self.used[t] = false;
            self.map[w] = usize::MAX;
        }
        Ok(false)
    }
}
