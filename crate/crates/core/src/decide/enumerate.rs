use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kripke::{check_d, check_i, check_wd, find_isomorphism, is_connected, Frame, IsoBudget};

/// Classes of equivalence frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameClass {
    /// All equivalence frames.
    E,
    /// Directed.
    Ed,
    /// Weakly directed.
    Ewd,
    /// Directed, with the relations intersecting to the identity.
    Edi,
}

impl FrameClass {
    /// Membership test; equivalence is assumed.
    pub fn contains(self, fr: &Frame) -> bool {
        match self {
            FrameClass::E => true,
            FrameClass::Ed => check_d(fr),
            FrameClass::Ewd => check_wd(fr),
            FrameClass::Edi => check_d(fr) && check_i(fr),
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::E => "e",
            FrameClass::Ed => "ed",
            FrameClass::Ewd => "ewd",
            FrameClass::Edi => "edi",
        })
    }
}

impl FromStr for FrameClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e" => Ok(FrameClass::E),
            "ed" => Ok(FrameClass::Ed),
            "ewd" => Ok(FrameClass::Ewd),
            "edi" => Ok(FrameClass::Edi),
            _ => Err(Error::Invalid(format!("unknown frame class `{s}`"))),
        }
    }
}

/// Restricted growth strings of length `k` in lexicographic order; each
/// encodes a partition of `0..k` by block index.
pub fn restricted_growth_strings(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            cur.push(b);
            go(k, cur, max.max(b), out);
            cur.pop();
        }
    }
    if k > 0 {
        go(k, &mut cur, 0, &mut out);
    }
    out
}

fn blocks(rgs: &[usize]) -> Vec<Vec<usize>> {
    let count = rgs.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (w, &b) in rgs.iter().enumerate() {
        out[b].push(w);
    }
    out
}

/// Upper limit on partition tuples examined per call.
pub const MAX_PARTITION_TUPLES: u64 = 5_000_000;

/// Options for frame enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub class: FrameClass,
    pub connected_only: bool,
}

/// One frame per isomorphism class of equivalence frames on exactly `k`
/// worlds in `class`. Frames come in lexicographic order of their
/// partition tuples (agent 1 outermost); the first member of each
/// isomorphism class is kept.
pub fn enumerate_frames_of_size(n: usize, k: usize, opts: EnumerateOptions) -> Result<Vec<Frame>> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let parts = restricted_growth_strings(k);
    let tuples = (parts.len() as u64).checked_pow(n as u32);
    if tuples.is_none_or(|t| t > MAX_PARTITION_TUPLES) {
        return Err(Error::Budget(format!(
            "{} partitions of {k} worlds for {n} agents exceed {MAX_PARTITION_TUPLES} tuples",
            parts.len()
        )));
    }
    let names = Frame::default_names(k);
    let mut reps: Vec<Frame> = Vec::new();
    let mut buckets: HashMap<Vec<Vec<usize>>, Vec<usize>> = HashMap::new();
    let mut choice = vec![0usize; n];
    loop {
        let partitions: Vec<Vec<Vec<usize>>> = choice.iter().map(|&c| blocks(&parts[c])).collect();
        let fr = Frame::from_partitions(n, names.clone(), &partitions)?;
        if (!opts.connected_only || is_connected(&fr)) && opts.class.contains(&fr) {
            let key: Vec<Vec<usize>> = partitions
                .iter()
                .map(|p| {
                    let mut sizes: Vec<usize> = p.iter().map(Vec::len).collect();
                    sizes.sort_unstable();
                    sizes
                })
                .collect();
            let bucket = buckets.entry(key).or_default();
            let mut fresh = true;
            for &r in bucket.iter() {
                if find_isomorphism(&reps[r], &fr, IsoBudget::unbounded_size())?.is_some() {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                bucket.push(reps.len());
                reps.push(fr);
            }
        }
        // odometer with agent n fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(reps);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < parts.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// All sizes from 1 to `max_worlds`, smallest first.
pub fn enumerate_frames(n: usize, max_worlds: usize, class: FrameClass) -> Result<Vec<Frame>> {
    enumerate_with(
        n,
        max_worlds,
        EnumerateOptions {
            class,
            connected_only: false,
        },
    )
}

pub fn enumerate_with(n: usize, max_worlds: usize, opts: EnumerateOptions) -> Result<Vec<Frame>> {
    let mut out = Vec::new();
    for k in 1..=max_worlds {
        out.extend(enumerate_frames_of_size(n, k, opts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::check_equivalence;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|k| restricted_growth_strings(k).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
        assert_eq!(restricted_growth_strings(3)[1], vec![0, 0, 1]);
    }

    #[test]
    fn small_counts() {
        let exact = EnumerateOptions {
            class: FrameClass::E,
            connected_only: false,
        };
        assert_eq!(enumerate_frames_of_size(1, 2, exact).unwrap().len(), 2);
        assert_eq!(enumerate_frames(1, 2, FrameClass::E).unwrap().len(), 3);
        assert_eq!(enumerate_frames(2, 1, FrameClass::E).unwrap().len(), 1);
        // one agent: one frame per integer partition
        assert_eq!(enumerate_frames_of_size(1, 5, exact).unwrap().len(), 7);
    }

    #[test]
    fn class_filters() {
        for fr in enumerate_frames(2, 4, FrameClass::Ed).unwrap() {
            assert!(check_equivalence(&fr) && check_d(&fr));
        }
        for fr in enumerate_frames(2, 4, FrameClass::Edi).unwrap() {
            assert!(check_i(&fr));
        }
        let all = enumerate_frames(2, 4, FrameClass::E).unwrap().len();
        let wd = enumerate_frames(2, 4, FrameClass::Ewd).unwrap().len();
        assert!(wd < all);
    }

    #[test]
    fn first_non_wd_frame_is_missing_corner() {
        let opts = EnumerateOptions {
            class: FrameClass::E,
            connected_only: true,
        };
        let first = enumerate_with(2, 3, opts)
            .unwrap()
            .into_iter()
            .find(|f| !check_wd(f))
            .unwrap();
        assert_eq!(
            first.partitions().unwrap(),
            vec![vec![vec![0, 1], vec![2]], vec![vec![0, 2], vec![1]]]
        );
    }

    #[test]
    fn parse_class() {
        assert_eq!("EWD".parse::<FrameClass>().unwrap(), FrameClass::Ewd);
        assert!("x".parse::<FrameClass>().is_err());
        assert_eq!(FrameClass::Edi.to_string(), "edi");
    }
}
