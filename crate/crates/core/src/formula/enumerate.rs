use std::collections::BTreeSet;

use super::Formula;

/// All formulas over `atoms` built from `~`, `&` and `[i]` (for `i` in
/// `1..=n`) whose syntax tree has depth at most `depth`. Conjunctions are
/// taken over unordered pairs. The result is sorted by depth, then by the
/// derived ordering on formulas.
pub fn enumerate_formulas(atoms: &[&str], n: usize, depth: usize) -> Vec<Formula> {
    let mut levels: Vec<BTreeSet<Formula>> = Vec::new();
    let mut all: BTreeSet<Formula> = atoms.iter().map(|a| Formula::atom(*a)).collect();
    levels.push(all.clone());
    for _ in 0..depth {
        let prev: Vec<Formula> = all.iter().cloned().collect();
        let mut next = BTreeSet::new();
        for (k, f) in prev.iter().enumerate() {
            next.insert(Formula::not(f.clone()));
            for i in 1..=n {
                next.insert(Formula::knows(i, f.clone()));
            }
            for g in &prev[k..] {
                next.insert(Formula::and(f.clone(), g.clone()));
            }
        }
        let fresh: BTreeSet<Formula> = next.difference(&all).cloned().collect();
        all.extend(fresh.iter().cloned());
        levels.push(fresh);
    }
    levels.into_iter().flatten().collect()
}
