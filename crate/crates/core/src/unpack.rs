//! Unpacking an equivalence directed frame into one whose relations
//! intersect to the identity, together with a p-morphism back onto it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kripke::{check_equivalence, check_wd, Frame, Relation, WorldMap};
use crate::systems::class_name;

/// Largest frame `unpack_to_edi` will build.
pub const MAX_UNPACKED_WORLDS: usize = 1 << 18;

/// Classes of the intersection of all relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub clusters: Vec<Vec<usize>>,
    pub cluster_of: Vec<usize>,
}

impl ClusterDecomposition {
    pub fn max_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn cluster_decomposition(fr: &Frame) -> Result<ClusterDecomposition> {
    if !check_equivalence(fr) {
        return Err(Error::Precondition("frame is not an equivalence frame".into()));
    }
    let rows = fr.intersection_rows();
    let mut cluster_of = vec![usize::MAX; fr.len()];
    let mut clusters = Vec::new();
    for w in 0..fr.len() {
        if cluster_of[w] == usize::MAX {
            let members: Vec<usize> = rows[w].ones().collect();
            for &v in &members {
                cluster_of[v] = clusters.len();
            }
            clusters.push(members);
        }
    }
    Ok(ClusterDecomposition { clusters, cluster_of })
}

/// A map `{0..x_size-1}^m -> {0..k-1}` such that, with any one coordinate
/// fixed, every output is still reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateSurjection {
    pub k: usize,
    pub m: usize,
    pub x_size: usize,
    table: Vec<usize>,
}

impl CoordinateSurjection {
    /// Row-major index of a tuple.
    fn index(&self, x: &[usize]) -> usize {
        x.iter().fold(0, |acc, &v| acc * self.x_size + v)
    }

    pub fn apply(&self, x: &[usize]) -> usize {
        self.table[self.index(x)]
    }

    /// All tuples with their values, in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        tuples(self.m, self.x_size).map(move |x| {
            let v = self.apply(&x);
            (x, v)
        })
    }

    /// First `(coordinate, fixed value, unreachable output)` if the
    /// coordinate clause fails.
    pub fn clause_violation(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.m {
            for xi in 0..self.x_size {
                let mut hit = vec![false; self.k];
                for (x, v) in self.entries() {
                    if x[i] == xi {
                        hit[v] = true;
                    }
                }
                if let Some(u) = hit.iter().position(|h| !h) {
                    return Some((i, xi, u));
                }
            }
        }
        None
    }
}

/// Tuples of `{0..x_size-1}^m` in lexicographic order.
fn tuples(m: usize, x_size: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = x_size.pow(m as u32);
    (0..total).map(move |mut code| {
        let mut x = vec![0; m];
        for slot in x.iter_mut().rev() {
            *slot = code % x_size;
            code /= x_size;
        }
        x
    })
}

/// `p(x) = (x1 + ... + xm) mod k`.
///
/// With a single coordinate nothing is left to vary once it is fixed, so
/// `m = 1` only works for `k = 1`.
pub fn coordinate_surjection(k: usize, m: usize, x_size: usize) -> Result<CoordinateSurjection> {
    if k == 0 || m == 0 {
        return Err(Error::Precondition(
            "cluster size and coordinate count must be positive".into(),
        ));
    }
    if x_size < k {
        return Err(Error::Precondition(format!(
            "x_size {x_size} is smaller than cluster size {k}"
        )));
    }
    if m == 1 && k > 1 {
        return Err(Error::Precondition(format!(
            "no map with one coordinate reaches {k} values from every fixed coordinate"
        )));
    }
    x_size
        .checked_pow(m as u32)
        .filter(|&s| s <= MAX_UNPACKED_WORLDS)
        .ok_or_else(|| Error::Budget(format!("{x_size}^{m} tuples")))?;
    let table = tuples(m, x_size).map(|x| x.iter().sum::<usize>() % k).collect();
    Ok(CoordinateSurjection { k, m, x_size, table })
}

/// Result of unpacking: the new frame, the p-morphism onto the input, and
/// for each new world its cluster and coordinate tuple.
#[derive(Debug, Clone)]
pub struct Unpacked {
    pub frame: Frame,
    pub map: WorldMap,
    pub points: Vec<(usize, Vec<usize>)>,
    pub x_size: usize,
}

/// Worlds are pairs of a cluster `c` and a tuple `x` in `{0..x_size-1}^n`.
/// `(c,x) ~i (d,y)` iff `x_i = y_i` and `c`, `d` lie in the same `~i` class.
/// Each `(c,x)` is sent to the member of `c` selected by the coordinate
/// surjection. `x_size` defaults to the largest cluster size.
///
/// The input must be weakly directed, so that each component is directed.
/// Classes never cross components, so the result unpacks every component
/// separately and is directed exactly when the input is.
pub fn unpack_to_edi(fr: &Frame, x_size: Option<usize>) -> Result<Unpacked> {
    let dec = cluster_decomposition(fr)?;
    if !check_wd(fr) {
        return Err(Error::Precondition("frame is not weakly directed".into()));
    }
    let x_size = x_size.unwrap_or_else(|| dec.max_size());
    let m = fr.n();
    if x_size < dec.max_size() {
        return Err(Error::Precondition(format!(
            "x_size {x_size} is smaller than the largest cluster ({})",
            dec.max_size()
        )));
    }
    let surjections = dec
        .clusters
        .iter()
        .map(|c| coordinate_surjection(c.len(), m, x_size))
        .collect::<Result<Vec<_>>>()?;
    let per_cluster = x_size.pow(m as u32);
    let total = per_cluster
        .checked_mul(dec.clusters.len())
        .filter(|&t| t <= MAX_UNPACKED_WORLDS)
        .ok_or_else(|| Error::Budget("unpacked frame is too large".into()))?;

    // index of the ~i class containing each cluster
    let class_of: Vec<Vec<usize>> = (1..=m)
        .map(|i| {
            let classes = fr.relation(i).classes().expect("equivalence");
            let mut of = vec![0; fr.len()];
            for (k, class) in classes.iter().enumerate() {
                for &w in class {
                    of[w] = k;
                }
            }
            dec.clusters.iter().map(|c| of[c[0]]).collect()
        })
        .collect();

    let mut names = Vec::with_capacity(total);
    let mut points = Vec::with_capacity(total);
    let mut map = Vec::with_capacity(total);
    for (c, members) in dec.clusters.iter().enumerate() {
        let cname = class_name(fr, members);
        for x in tuples(m, x_size) {
            let coords: Vec<String> = x.iter().map(usize::to_string).collect();
            names.push(format!("{cname}@{}", coords.join(",")));
            map.push(members[surjections[c].apply(&x)]);
            points.push((c, x));
        }
    }
    let relations = (0..m)
        .map(|i| {
            let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
            for (w, (c, x)) in points.iter().enumerate() {
                groups.entry((class_of[i][*c], x[i])).or_default().push(w);
            }
            let classes: Vec<Vec<usize>> = groups.into_values().collect();
            Relation::from_partition(total, &classes)
        })
        .collect::<Result<Vec<_>>>()?;
    let frame = Frame::new(m, names, relations)?;
    Ok(Unpacked {
        frame,
        map: WorldMap::new(map),
        points,
        x_size,
    })
}
