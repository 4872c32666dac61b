//! Canonical labelling search.
//!
//! Nodes are coloured by switching-invariant data (absolute weights and
//! signed triangle products) and refined until stable. Individualizing each
//! member of the first non-trivial cell in turn gives a search tree whose
//! leaves are orderings of the nodes; the tree depends only on the
//! isomorphism class, so the minimum leaf key is canonical. At a leaf the
//! lexicographically smallest switching is found greedily.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Weighted complete graph over node positions, in primitive integer form.
pub(crate) struct Problem<'a> {
    pub n: usize,
    pub w: &'a [i64],
    pub rhs: i64,
    /// Initial colour classes; class order is respected by the leaves.
    pub class: &'a [u32],
    /// Target edge order as position pairs.
    pub edges: &'a [(usize, usize)],
    pub max_leaves: u64,
}

/// Best leaf: key, ordering and switching.
#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    /// Coefficients in target edge order followed by the rhs.
    pub key: Vec<i64>,
    /// `order[p]` is the source node placed at target position `p`.
    pub order: Vec<usize>,
    /// Target positions switched.
    pub switched: Vec<bool>,
}

impl Problem<'_> {
    fn weight(&self, u: usize, v: usize) -> i64 {
        self.w[u * self.n + v]
    }

    fn initial_colours(&self) -> Vec<u32> {
        let n = self.n;
        let sigs: Vec<Vec<i64>> = (0..n)
            .map(|v| {
                let mut abs: Vec<i64> = (0..n).filter(|&u| u != v).map(|u| self.weight(v, u).abs()).collect();
                abs.sort_unstable();
                let mut tri = Vec::new();
                for u in 0..n {
                    for t in u + 1..n {
                        if u != v && t != v {
                            let p = self.weight(v, u) as i128 * self.weight(u, t) as i128 * self.weight(t, v) as i128;
                            if p != 0 {
                                tri.push(p.clamp(i64::MIN as i128, i64::MAX as i128) as i64);
                            }
                        }
                    }
                }
                tri.sort_unstable();
                let mut sig = vec![self.class[v] as i64, abs.len() as i64];
                sig.extend(abs);
                sig.push(tri.len() as i64);
                sig.extend(tri);
                sig
            })
            .collect();
        rank(&sigs)
    }

    /// Iterated colour refinement by `(colour, sorted (neighbour colour, |w|))`.
    fn refine(&self, mut colours: Vec<u32>) -> Vec<u32> {
        let n = self.n;
        let mut count = distinct(&colours);
        loop {
            let sigs: Vec<Vec<i64>> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(u32, i64)> = (0..n)
                        .filter(|&u| u != v && self.weight(v, u) != 0)
                        .map(|u| (colours[u], self.weight(v, u).abs()))
                        .collect();
                    nb.sort_unstable();
                    let mut sig = vec![colours[v] as i64];
                    sig.extend(nb.into_iter().flat_map(|(c, a)| [c as i64, a]));
                    sig
                })
                .collect();
            colours = rank(&sigs);
            let next = distinct(&colours);
            if next == count {
                return colours;
            }
            count = next;
        }
    }

    /// Minimum leaf over the whole search tree.
    pub fn canonical(&self) -> Result<Leaf> {
        let start = self.refine(self.initial_colours());
        let mut search = Search { problem: self, best: None, leaves: 0 };
        search.descend(start)?;
        Ok(search.best.expect("at least one leaf"))
    }

    /// Colours after refinement, used to prune pairwise searches.
    pub fn stable_colours(&self) -> Vec<u32> {
        self.refine(self.initial_colours())
    }
}

struct Search<'p, 'a> {
    problem: &'p Problem<'a>,
    best: Option<Leaf>,
    leaves: u64,
}

impl Search<'_, '_> {
    fn descend(&mut self, colours: Vec<u32>) -> Result<()> {
        let n = self.problem.n;
        let mut sizes = vec![0usize; n];
        for &c in &colours {
            sizes[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            return self.leaf(&colours);
        };
        let members: Vec<usize> = (0..n).filter(|&v| colours[v] as usize == target).collect();
        for v in members {
            // v keeps the cell's colour position, the rest move just after it
            let split: Vec<u32> = colours
                .iter()
                .enumerate()
                .map(|(u, &c)| 2 * c + u32::from(c as usize == target && u != v))
                .collect();
            let refined = self.problem.refine(rank_values(&split));
            self.descend(refined)?;
        }
        Ok(())
    }

    fn leaf(&mut self, colours: &[u32]) -> Result<()> {
        self.leaves += 1;
        if self.leaves > self.problem.max_leaves {
            return Err(Error::BudgetExceeded(format!(
                "more than {} leaves in the canonical search",
                self.problem.max_leaves
            )));
        }
        let mut order = vec![0usize; self.problem.n];
        for (v, &c) in colours.iter().enumerate() {
            order[c as usize] = v;
        }
        let bound = self.best.as_ref().map(|b| b.key.as_slice());
        if let Some(leaf) = switch_greedy(self.problem, order, bound) {
            self.best = Some(leaf);
        }
        Ok(())
    }
}

/// Greedy lexicographically minimal switching for a fixed ordering.
///
/// Returns `None` as soon as the key is known to exceed `bound`.
pub(crate) fn switch_greedy(p: &Problem<'_>, order: Vec<usize>, bound: Option<&[i64]>) -> Option<Leaf> {
    let n = p.n;
    let mut uf = ParityUnionFind::new(n);
    let mut key = Vec::with_capacity(p.edges.len() + 1);
    let mut decided = bound.is_none();
    let mut cut_sum: i128 = 0;
    for (e, &(a, b)) in p.edges.iter().enumerate() {
        let w = p.weight(order[a], order[b]);
        let value = if w == 0 {
            0
        } else {
            let flip = match uf.parity(a, b) {
                Some(par) => par,
                None => {
                    let flip = w > 0;
                    uf.union(a, b, flip);
                    flip
                }
            };
            if flip {
                cut_sum += w as i128;
                -w
            } else {
                w
            }
        };
        if !decided {
            match value.cmp(&bound.expect("bound")[e]) {
                Ordering::Less => decided = true,
                Ordering::Greater => return None,
                Ordering::Equal => {}
            }
        }
        key.push(value);
    }
    let rhs = (p.rhs as i128 - cut_sum) as i64;
    if !decided && rhs >= bound.expect("bound")[p.edges.len()] {
        return None;
    }
    key.push(rhs);
    let (r0, p0) = uf.find(0);
    let switched = (0..n)
        .map(|v| {
            let (r, par) = uf.find(v);
            if r == r0 { par ^ p0 } else { par }
        })
        .collect();
    Some(Leaf { key, order, switched })
}

/// Union-find that tracks the parity of each node relative to its root.
#[derive(Clone)]
pub(crate) struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), parity: vec![false; n] }
    }

    pub fn find(&mut self, v: usize) -> (usize, bool) {
        let p = self.parent[v];
        if p == v {
            return (v, false);
        }
        let (root, par) = self.find(p);
        self.parent[v] = root;
        self.parity[v] ^= par;
        (root, self.parity[v])
    }

    pub fn parity(&mut self, a: usize, b: usize) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        (ra == rb).then_some(pa ^ pb)
    }

    /// Joins the classes of `a` and `b` so that their parity is `par`.
    /// Returns `false` if they were already joined with the other parity.
    pub fn union(&mut self, a: usize, b: usize, par: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == par;
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ par;
        true
    }
}

fn distinct(colours: &[u32]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Dense ranks of signatures, in signature order.
fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    sigs.iter().map(|s| sorted.binary_search(s).expect("present") as u32).collect()
}

/// Ranks that keep ties, so equal colours start at the same index.
fn rank_values(values: &[u32]) -> Vec<u32> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    values.iter().map(|v| sorted.partition_point(|x| x < v) as u32).collect()
}
