use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{connected_components, Frame};

pub fn check_equivalence(fr: &Frame) -> bool {
    fr.relations().iter().all(|r| r.is_equivalence())
}

/// The intersection of all relations is the identity.
pub fn check_i(fr: &Frame) -> bool {
    fr.intersection_rows()
        .iter()
        .enumerate()
        .all(|(w, row)| row.count_ones(..) == 1 && row.contains(w))
}

/// Distinct successor sets of agent `i` over `worlds`, each with one world
/// that has it.
fn distinct_rows(fr: &Frame, i: usize, worlds: impl Iterator<Item = usize>) -> Vec<(usize, FixedBitSet)> {
    let mut out: Vec<(usize, FixedBitSet)> = Vec::new();
    for w in worlds {
        let row = fr.relation(i).row(w);
        if !out.iter().any(|(_, r)| r == row) {
            out.push((w, row.clone()));
        }
    }
    out
}

/// Looks for a choice of one row per agent whose intersection is empty.
fn empty_choice(choices: &[Vec<(usize, FixedBitSet)>], acc: &FixedBitSet, picked: &mut Vec<usize>) -> bool {
    if acc.is_clear() {
        return true;
    }
    let Some(rows) = choices.get(picked.len()) else {
        return false;
    };
    for (w, row) in rows {
        let mut next = acc.clone();
        next.intersect_with(row);
        picked.push(*w);
        if empty_choice(choices, &next, picked) {
            return true;
        }
        picked.pop();
    }
    false
}

fn joinless_tuple(fr: &Frame, domain: &[usize]) -> Option<Vec<usize>> {
    let choices: Vec<_> = (1..=fr.n())
        .map(|i| distinct_rows(fr, i, domain.iter().copied()))
        .collect();
    let mut all = FixedBitSet::with_capacity(fr.len());
    all.insert_range(..);
    let mut picked = Vec::new();
    if empty_choice(&choices, &all, &mut picked) {
        // an early exit leaves later agents unpicked; any world will do
        while picked.len() < fr.n() {
            picked.push(domain[0]);
        }
        Some(picked)
    } else {
        None
    }
}

/// A tuple `(w1..wn)` with no `w` such that `wi Ri w` for all `i`.
pub fn d_violation(fr: &Frame) -> Option<Vec<usize>> {
    let all: Vec<usize> = (0..fr.len()).collect();
    joinless_tuple(fr, &all)
}

/// Directedness.
pub fn check_d(fr: &Frame) -> bool {
    d_violation(fr).is_none()
}

/// A world `w0` and a tuple `(w1..wn)` of worlds one step from `w0` that has
/// no join.
pub fn wd_violation(fr: &Frame) -> Option<(usize, Vec<usize>)> {
    let mut seen_nbhd: Vec<FixedBitSet> = Vec::new();
    for w0 in 0..fr.len() {
        let mut nbhd = FixedBitSet::with_capacity(fr.len());
        for r in fr.relations() {
            nbhd.union_with(r.row(w0));
        }
        if nbhd.is_clear() || seen_nbhd.contains(&nbhd) {
            continue;
        }
        let domain: Vec<usize> = nbhd.ones().collect();
        if let Some(t) = joinless_tuple(fr, &domain) {
            return Some((w0, t));
        }
        seen_nbhd.push(nbhd);
    }
    None
}

/// Weak directedness.
pub fn check_wd(fr: &Frame) -> bool {
    wd_violation(fr).is_none()
}

pub fn is_connected(fr: &Frame) -> bool {
    connected_components(fr).len() == 1
}

/// Summary of the frame-property checkers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameProperties {
    pub equivalence: bool,
    pub identity_intersection: bool,
    pub directed: bool,
    pub weakly_directed: bool,
    pub components: usize,
}

pub fn properties(fr: &Frame) -> FrameProperties {
    FrameProperties {
        equivalence: check_equivalence(fr),
        identity_intersection: check_i(fr),
        directed: check_d(fr),
        weakly_directed: check_wd(fr),
        components: connected_components(fr).len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::disjoint_union;

    fn part(n: usize, size: usize, parts: &[Vec<Vec<usize>>]) -> Frame {
        assert_eq!(parts.len(), n);
        Frame::from_partitions(n, Frame::default_names(size), parts).unwrap()
    }

    fn missing_corner() -> Frame {
        part(2, 3, &[vec![vec![0, 1], vec![2]], vec![vec![0, 2], vec![1]]])
    }

    fn all_connected() -> Frame {
        part(2, 3, &[vec![vec![0, 1, 2]], vec![vec![0, 1, 2]]])
    }

    /// Worlds (x,y) in {0,1}^2 as index 2x+y; agent 1 sees y, agent 2 sees x xor y.
    fn row_diagonal() -> Frame {
        part(2, 4, &[vec![vec![0, 2], vec![1, 3]], vec![vec![0, 3], vec![1, 2]]])
    }

    #[test]
    fn identity_frames() {
        let id = part(
            2,
            3,
            &[vec![vec![0], vec![1], vec![2]], vec![vec![0], vec![1], vec![2]]],
        );
        assert!(check_equivalence(&id));
        assert!(check_i(&id));
        assert!(!check_d(&id));
        assert!(check_wd(&id));
    }

    #[test]
    fn missing_reflexive_pair() {
        let fr = Frame::from_pairs(1, Frame::default_names(2), vec![vec![(0, 0)]]).unwrap();
        assert!(!check_equivalence(&fr));
    }

    #[test]
    fn three_point_frame() {
        let fr = all_connected();
        assert!(!check_i(&fr));
        assert!(check_d(&fr));
        assert!(check_wd(&fr));
        assert!(check_i(&row_diagonal()));
        assert!(check_d(&row_diagonal()));
    }

    #[test]
    fn singleton_is_directed() {
        assert!(check_d(&part(3, 1, &[vec![vec![0]], vec![vec![0]], vec![vec![0]]])));
    }

    #[test]
    fn disjoint_union_of_directed() {
        let u = disjoint_union(&all_connected(), &row_diagonal()).unwrap();
        assert!(!check_d(&u));
        assert!(check_wd(&u));
        let t = d_violation(&u).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn missing_corner_is_not_wd() {
        let fr = missing_corner();
        assert!(check_equivalence(&fr));
        assert!(!check_wd(&fr));
        let (w0, t) = wd_violation(&fr).unwrap();
        assert_eq!(w0, 0);
        // t[0] via agent 1 and t[1] via agent 2 have no common successor
        let mut join = fr.relation(1).row(t[0]).clone();
        join.intersect_with(fr.relation(2).row(t[1]));
        assert!(join.is_clear());
        assert_eq!(properties(&fr).components, 1);
    }
}
