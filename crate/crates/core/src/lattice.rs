//! The dominance-ordered lattice up to a truncation level, with the
//! recurrence stencil of every node. It depends only on `(n, N)` and is
//! shared between all tables through a process-wide cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::domain::{enumerate_level, Composition, Root};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Step {
    pub pred: usize,
    pub root: usize,
    pub l: usize,
}

#[derive(Debug)]
pub(crate) struct Lattice {
    pub max_level: usize,
    pub roots: Vec<Root>,
    pub heights: Vec<i64>,
    pub nodes: Vec<Composition>,
    /// Nodes of level `m` occupy `level_start[m]..level_start[m + 1]`.
    pub level_start: Vec<usize>,
    pub index: HashMap<Composition, usize>,
    pub steps: Vec<Vec<Step>>,
}

type Cache = HashMap<(usize, usize), Arc<Lattice>>;

impl Lattice {
    fn build(n: usize, max_level: usize) -> Lattice {
        let roots = Root::all(n);
        let heights: Vec<i64> = roots.iter().map(|r| r.height(n)).collect();
        let vectors: Vec<Vec<i32>> = roots.iter().map(|r| r.vector(n)).collect();
        let mut nodes = Vec::new();
        let mut level_start = vec![0];
        for m in 0..=max_level {
            nodes.extend(enumerate_level(n, m));
            level_start.push(nodes.len());
        }
        let index: HashMap<Composition, usize> =
            nodes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let steps = nodes
            .iter()
            .map(|nu| {
                let level = nu.level();
                let mut out = Vec::new();
                for (r, v) in vectors.iter().enumerate() {
                    let mut l = 1;
                    while l as i64 * heights[r] <= level {
                        let mu = nu.minus(v, l as i32);
                        if mu.dominates_zero() {
                            out.push(Step {
                                pred: index[&mu],
                                root: r,
                                l,
                            });
                        }
                        l += 1;
                    }
                }
                out
            })
            .collect();
        Lattice {
            max_level,
            roots,
            heights,
            nodes,
            level_start,
            index,
            steps,
        }
    }

    pub fn shared(n: usize, max_level: usize) -> Arc<Lattice> {
        static CACHE: OnceLock<Mutex<Cache>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(l) = cache.lock().unwrap().get(&(n, max_level)) {
            return l.clone();
        }
        let built = Arc::new(Lattice::build(n, max_level));
        cache
            .lock()
            .unwrap()
            .entry((n, max_level))
            .or_insert(built)
            .clone()
    }

    pub fn level_range(&self, m: usize) -> std::ops::Range<usize> {
        self.level_start[m]..self.level_start[m + 1]
    }

    /// Largest `l` with `l <ht(alpha)> <= max_level` for every root.
    pub fn max_multiplicity(&self, root: usize) -> usize {
        (self.max_level as i64 / self.heights[root]) as usize
    }
}
