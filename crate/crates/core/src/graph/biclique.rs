//! Largest balanced red biclique between two vertex sets.
//!
//! A red `K_{s,s}` between `L` and `R` is a pair `X ⊆ L`, `Y ⊆ R` with no
//! blue edge from `X` to `Y`. The search shrinks both sides by branching on
//! the vertex of largest blue cross degree: either drop it, or keep it and
//! drop its blue neighbours on the other side. A blue matching of size `k`
//! between the surviving sides forces `k` more deletions, which bounds the
//! balanced size by `(|L| + |R| - k) / 2`. A second bound counts vertices
//! with enough red neighbours on the other side.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::ColouredGraph;

/// A red `K_{s,s}`; both sides sorted and of equal length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Biclique {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Biclique {
    pub fn size(&self) -> usize {
        self.left.len()
    }

    pub fn empty() -> Self {
        Biclique {
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    /// The first `s` vertices of each side.
    pub fn truncated(&self, s: usize) -> Biclique {
        Biclique {
            left: self.left.iter().take(s).copied().collect(),
            right: self.right.iter().take(s).copied().collect(),
        }
    }

    pub fn is_red_in(&self, g: &ColouredGraph) -> bool {
        self.left.len() == self.right.len()
            && self
                .left
                .iter()
                .all(|&u| self.right.iter().all(|&v| g.is_red(u, v)))
    }
}

/// The largest `s` such that the red bipartite graph between `left` and
/// `right` contains `K_{s,s}`, with a witness. The two sets must be
/// disjoint. Size 0 means there is no red cross edge.
pub fn max_balanced_biclique(g: &ColouredGraph, left: &[usize], right: &[usize]) -> Biclique {
    let mut left = left.to_vec();
    let mut right = right.to_vec();
    left.sort_unstable();
    right.sort_unstable();
    let search = BicliqueSearch::new(g, &left, &right, u64::MAX);
    search.run().witness
}

/// Outcome of a biclique search that may stop early: a witness, and an
/// upper bound on the largest balanced biclique. The two agree when the
/// search finished.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicliqueBounds {
    pub witness: Biclique,
    pub upper: usize,
}

impl BicliqueBounds {
    pub fn lower(&self) -> usize {
        self.witness.size()
    }

    pub fn is_exact(&self) -> bool {
        self.lower() == self.upper
    }
}

/// As [`max_balanced_biclique`], visiting at most `budget` search nodes.
pub fn balanced_biclique_bounds(
    g: &ColouredGraph,
    left: &[usize],
    right: &[usize],
    budget: Option<u64>,
) -> BicliqueBounds {
    let mut left = left.to_vec();
    let mut right = right.to_vec();
    left.sort_unstable();
    right.sort_unstable();
    BicliqueSearch::new(g, &left, &right, budget.unwrap_or(u64::MAX)).run()
}

struct BicliqueSearch<'a> {
    left: &'a [usize],
    right: &'a [usize],
    /// Blue cross neighbours of each left vertex, indexed into `right`.
    blue_left: Vec<FixedBitSet>,
    /// Blue cross neighbours of each right vertex, indexed into `left`.
    blue_right: Vec<FixedBitSet>,
    best: usize,
    best_sides: (FixedBitSet, FixedBitSet),
    nodes_left: u64,
    /// Largest bound among subtrees abandoned when the budget ran out.
    open_upper: usize,
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

impl<'a> BicliqueSearch<'a> {
    fn new(g: &ColouredGraph, left: &'a [usize], right: &'a [usize], budget: u64) -> Self {
        let mut blue_left = vec![FixedBitSet::with_capacity(right.len()); left.len()];
        let mut blue_right = vec![FixedBitSet::with_capacity(left.len()); right.len()];
        for (i, &u) in left.iter().enumerate() {
            for (j, &v) in right.iter().enumerate() {
                debug_assert_ne!(u, v, "biclique sides must be disjoint");
                if g.is_blue(u, v) {
                    blue_left[i].insert(j);
                    blue_right[j].insert(i);
                }
            }
        }
        BicliqueSearch {
            left,
            right,
            blue_left,
            blue_right,
            best: 0,
            best_sides: (
                FixedBitSet::with_capacity(left.len()),
                FixedBitSet::with_capacity(right.len()),
            ),
            nodes_left: budget,
            open_upper: 0,
        }
    }

    fn run(mut self) -> BicliqueBounds {
        let mut cl = FixedBitSet::with_capacity(self.left.len());
        cl.insert_range(..);
        let mut cr = FixedBitSet::with_capacity(self.right.len());
        cr.insert_range(..);
        self.search(cl, cr);
        let s = self.best;
        BicliqueBounds {
            witness: Biclique {
                left: self
                    .best_sides
                    .0
                    .ones()
                    .take(s)
                    .map(|i| self.left[i])
                    .collect(),
                right: self
                    .best_sides
                    .1
                    .ones()
                    .take(s)
                    .map(|j| self.right[j])
                    .collect(),
            },
            upper: s.max(self.open_upper),
        }
    }

    fn search(&mut self, mut cl: FixedBitSet, mut cr: FixedBitSet) {
        loop {
            let (sl, sr) = (cl.count_ones(..), cr.count_ones(..));
            if sl.min(sr) <= self.best {
                return;
            }
            let mut pick: Option<(usize, Side, usize)> = None;
            let mut red_left = Vec::with_capacity(sl);
            let mut red_right = Vec::with_capacity(sr);
            let mut consider = |degree: usize, side: Side, index: usize, side_size: usize| {
                let key = (degree, side_size);
                let better = match pick {
                    None => degree > 0,
                    Some((d, s, _)) => {
                        let size = match s {
                            Side::Left => sl,
                            Side::Right => sr,
                        };
                        key > (d, size)
                    }
                };
                if better {
                    pick = Some((degree, side, index));
                }
            };
            for i in cl.ones() {
                let blue = self.blue_left[i].intersection_count(&cr);
                red_left.push(sr - blue);
                consider(blue, Side::Left, i, sl);
            }
            for j in cr.ones() {
                let blue = self.blue_right[j].intersection_count(&cl);
                red_right.push(sl - blue);
                consider(blue, Side::Right, j, sr);
            }
            let Some((_, side, v)) = pick else {
                // No blue cross edge remains.
                self.best = sl.min(sr);
                self.best_sides = (cl, cr);
                return;
            };
            let degree_bound = h_index(&mut red_left).min(h_index(&mut red_right));
            if degree_bound <= self.best {
                return;
            }
            let matched = self.cross_matching(&cl, &cr);
            let bound = degree_bound.min((sl + sr - matched) / 2);
            if bound <= self.best {
                return;
            }
            if self.nodes_left == 0 {
                self.open_upper = self.open_upper.max(bound);
                return;
            }
            self.nodes_left -= 1;
            // Keep `v`: its blue neighbours on the other side must go.
            let (mut kl, mut kr) = (cl.clone(), cr.clone());
            match side {
                Side::Left => kr.difference_with(&self.blue_left[v]),
                Side::Right => kl.difference_with(&self.blue_right[v]),
            }
            // Drop `v` first; it is the branch the greedy incumbent follows.
            let (mut dl, mut dr) = (cl.clone(), cr.clone());
            match side {
                Side::Left => dl.remove(v),
                Side::Right => dr.remove(v),
            }
            self.search(dl, dr);
            cl = kl;
            cr = kr;
        }
    }

    /// Maximum matching of blue cross edges between the current sides.
    fn cross_matching(&self, cl: &FixedBitSet, cr: &FixedBitSet) -> usize {
        // Drive from the smaller side so that failed searches stay few.
        if cl.count_ones(..) <= cr.count_ones(..) {
            max_matching(&self.blue_left, cl, cr)
        } else {
            max_matching(&self.blue_right, cr, cl)
        }
    }
}

/// Maximum matching from `from` into `into`, where `adj[i]` lists the
/// neighbours of `i` on the other side.
fn max_matching(adj: &[FixedBitSet], from: &FixedBitSet, into: &FixedBitSet) -> usize {
    let mut mate = vec![usize::MAX; into.len()];
    let mut size = 0;
    let mut free = into.clone();
    let mut unmatched = Vec::new();
    for i in from.ones() {
        match adj[i].intersection(&free).next() {
            Some(j) => {
                free.remove(j);
                mate[j] = i;
                size += 1;
            }
            None => unmatched.push(i),
        }
    }
    // Vertices seen by a failed search cannot help until the matching
    // changes, so `seen` is only reset after a success.
    let mut seen = FixedBitSet::with_capacity(into.len());
    for i in unmatched {
        if augment(adj, i, into, &mut mate, &mut seen) {
            size += 1;
            seen.clear();
        }
    }
    size
}

fn augment(
    adj: &[FixedBitSet],
    i: usize,
    into: &FixedBitSet,
    mate: &mut [usize],
    seen: &mut FixedBitSet,
) -> bool {
    for j in adj[i].intersection(into) {
        if seen.put(j) {
            continue;
        }
        if mate[j] == usize::MAX || augment(adj, mate[j], into, mate, seen) {
            mate[j] = i;
            return true;
        }
    }
    false
}

/// The largest `h` with at least `h` entries that are `>= h`.
fn h_index(values: &mut [usize]) -> usize {
    values.sort_unstable_by(|a, b| b.cmp(a));
    values
        .iter()
        .enumerate()
        .take_while(|&(i, &v)| v > i)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_red_cross_edges() {
        let g = ColouredGraph::all_red(6);
        let b = max_balanced_biclique(&g, &[0, 1, 2], &[3, 4, 5]);
        assert_eq!(b.size(), 3);
        assert!(b.is_red_in(&g));
    }

    #[test]
    fn red_perfect_matching_gives_one() {
        let mut g = ColouredGraph::all_red(6);
        for u in 0..3 {
            for v in 3..6 {
                if v != u + 3 {
                    g.set_blue(u, v).unwrap();
                }
            }
        }
        let b = max_balanced_biclique(&g, &[0, 1, 2], &[3, 4, 5]);
        assert_eq!(b.size(), 1);
        assert!(b.is_red_in(&g));
    }

    #[test]
    fn no_red_cross_edge_gives_zero() {
        let mut g = ColouredGraph::all_red(4);
        for u in 0..2 {
            for v in 2..4 {
                g.set_blue(u, v).unwrap();
            }
        }
        assert_eq!(
            max_balanced_biclique(&g, &[0, 1], &[2, 3]),
            Biclique::empty()
        );
        assert_eq!(max_balanced_biclique(&g, &[], &[2, 3]).size(), 0);
    }

    #[test]
    fn h_index_counts_large_entries() {
        assert_eq!(h_index(&mut [5, 5, 5]), 3);
        assert_eq!(h_index(&mut [0, 1, 4, 2]), 2);
        assert_eq!(h_index(&mut []), 0);
    }

    #[test]
    fn exhausted_budget_still_brackets_the_optimum() {
        let g = crate::generate::random_bipartite(40, 0.3, 5);
        let (l, r): (Vec<usize>, Vec<usize>) = (0..20).zip(20..40).unzip();
        let exact = max_balanced_biclique(&g, &l, &r).size();
        for budget in [0, 1, 5, 50] {
            let b = balanced_biclique_bounds(&g, &l, &r, Some(budget));
            assert!(b.witness.is_red_in(&g));
            assert!(
                b.lower() <= exact && exact <= b.upper,
                "{budget}: {b:?} vs {exact}"
            );
        }
        assert!(balanced_biclique_bounds(&g, &l, &r, None).is_exact());
    }
}
