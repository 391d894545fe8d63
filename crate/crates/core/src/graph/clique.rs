//! Red cliques, i.e. independent sets of the blue graph.
//!
//! Deciding whether a red `m`-clique exists is NP-hard in general. The
//! search here is exact branch and bound: vertices are taken in order of
//! largest red degree, and a node is pruned when its candidate set cannot
//! hold enough vertices. The bound uses a blue matching, since a red clique
//! holds at most one endpoint of every blue edge.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{first_common, ColouredGraph};

/// Disjoint red cliques, all of the same size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueFamily {
    pub size: usize,
    pub cliques: Vec<Vec<usize>>,
    /// Whether exact search proved that no further clique fits. When a
    /// search budget runs out this is false, but no blue neighbourhood of
    /// the leftover set still holds `size` vertices.
    pub certified: bool,
}

impl CliqueFamily {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.cliques.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

/// A maximal family of disjoint red `m`-cliques inside `within`.
///
/// Cliques are first cut greedily out of blue neighbourhoods (each of which
/// is a red clique when the blue graph has no triangle), then found by
/// search until the exact search certifies that the leftover vertices hold
/// no red `m`-clique.
pub fn max_disjoint_red_cliques(g: &ColouredGraph, within: &FixedBitSet, m: usize) -> CliqueFamily {
    max_disjoint_red_cliques_within_budget(g, within, m, None)
}

/// As [`max_disjoint_red_cliques`], giving up on the exact search after
/// `budget` branch-and-bound nodes per search.
pub fn max_disjoint_red_cliques_within_budget(
    g: &ColouredGraph,
    within: &FixedBitSet,
    m: usize,
    budget: Option<u64>,
) -> CliqueFamily {
    let mut family = CliqueFamily {
        size: m,
        cliques: Vec::new(),
        certified: true,
    };
    if m == 0 {
        return family;
    }
    let mut residual = within.clone();
    for u in 0..g.order() {
        loop {
            let mut seed = g.blue_neighbours(u).clone();
            seed.intersect_with(&residual);
            if seed.count_ones(..) < m {
                break;
            }
            let clique: Vec<usize> = seed.ones().take(m).collect();
            if !g.is_red_clique(&clique) {
                break;
            }
            for &v in &clique {
                residual.remove(v);
            }
            family.cliques.push(clique);
        }
    }
    loop {
        match search_red_clique(g, &residual, m, budget) {
            CliqueSearchOutcome::Found(clique) => {
                for &v in &clique {
                    residual.remove(v);
                }
                family.cliques.push(clique);
            }
            CliqueSearchOutcome::Absent => break,
            CliqueSearchOutcome::Unknown => {
                family.certified = false;
                break;
            }
        }
    }
    family
}

/// Result of a red-clique search that may run out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueSearchOutcome {
    Found(Vec<usize>),
    Absent,
    Unknown,
}

/// A red clique of exactly `m` vertices inside `within`, or `None` if none
/// exists. Exact; exponential in the worst case.
pub fn find_red_clique(g: &ColouredGraph, within: &FixedBitSet, m: usize) -> Option<Vec<usize>> {
    match search_red_clique(g, within, m, None) {
        CliqueSearchOutcome::Found(clique) => Some(clique),
        CliqueSearchOutcome::Absent => None,
        CliqueSearchOutcome::Unknown => unreachable!("unbounded search always decides"),
    }
}

/// Looks for a red `m`-clique inside `within`, visiting at most `budget`
/// search nodes.
pub fn search_red_clique(
    g: &ColouredGraph,
    within: &FixedBitSet,
    m: usize,
    budget: Option<u64>,
) -> CliqueSearchOutcome {
    if m == 0 {
        return CliqueSearchOutcome::Found(Vec::new());
    }
    if within.count_ones(..) < m {
        return CliqueSearchOutcome::Absent;
    }
    if let Some(clique) = greedy_red_clique(g, within, m) {
        return CliqueSearchOutcome::Found(clique);
    }
    let mut search = CliqueSearch {
        g,
        target: m,
        stack: Vec::with_capacity(m),
        nodes_left: budget.unwrap_or(u64::MAX),
        exhausted: false,
    };
    if search.expand(within.clone()) {
        let mut clique = search.stack;
        clique.truncate(m);
        clique.sort_unstable();
        CliqueSearchOutcome::Found(clique)
    } else if search.exhausted {
        CliqueSearchOutcome::Unknown
    } else {
        CliqueSearchOutcome::Absent
    }
}

/// Repeatedly takes the candidate with the fewest blue neighbours among the
/// remaining candidates.
fn greedy_red_clique(g: &ColouredGraph, within: &FixedBitSet, m: usize) -> Option<Vec<usize>> {
    let mut cand = within.clone();
    let mut degree = vec![0usize; g.order()];
    for v in cand.ones() {
        degree[v] = g.blue_degree_into(v, &cand);
    }
    let mut clique = Vec::with_capacity(m);
    while clique.len() < m {
        let v = cand.ones().min_by_key(|&v| (degree[v], v))?;
        clique.push(v);
        let mut dropped = g.blue_neighbours(v).clone();
        dropped.intersect_with(&cand);
        dropped.insert(v);
        cand.difference_with(&dropped);
        for w in dropped.ones() {
            for x in g.blue_neighbours(w).intersection(&cand) {
                degree[x] -= 1;
            }
        }
    }
    clique.sort_unstable();
    Some(clique)
}

struct CliqueSearch<'a> {
    g: &'a ColouredGraph,
    target: usize,
    stack: Vec<usize>,
    nodes_left: u64,
    exhausted: bool,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut cand: FixedBitSet) -> bool {
        loop {
            if self.nodes_left == 0 {
                self.exhausted = true;
                return false;
            }
            self.nodes_left -= 1;
            if self.stack.len() >= self.target {
                return true;
            }
            let size = cand.count_ones(..);
            if self.stack.len() + size < self.target {
                return false;
            }
            let matched = blue_matching_size(self.g, &cand);
            if matched == 0 {
                // No blue edge left: the candidates form a red clique.
                self.stack
                    .extend(cand.ones().take(self.target - self.stack.len()));
                return true;
            }
            if self.stack.len() + size - matched < self.target {
                return false;
            }
            let v = cand
                .ones()
                .min_by_key(|&v| (self.g.blue_degree_into(v, &cand), v))
                .expect("candidate set is non-empty");
            let mut next = cand.clone();
            next.difference_with(self.g.blue_neighbours(v));
            next.remove(v);
            self.stack.push(v);
            if self.expand(next) {
                return true;
            }
            self.stack.pop();
            if self.exhausted {
                return false;
            }
            cand.remove(v);
        }
    }
}

/// Size of a blue matching inside `set`: greedy, then improved along
/// alternating paths that never revisit a vertex, so every augmentation is
/// valid even when the blue graph is not bipartite.
pub(crate) fn blue_matching_size(g: &ColouredGraph, set: &FixedBitSet) -> usize {
    let mut mate = vec![usize::MAX; g.order()];
    let mut free = set.clone();
    let mut size = 0;
    for u in set.ones() {
        if !free.contains(u) {
            continue;
        }
        free.remove(u);
        if let Some(w) = first_common(g.blue_neighbours(u), &free) {
            free.remove(w);
            mate[u] = w;
            mate[w] = u;
            size += 1;
        } else {
            free.insert(u);
        }
    }
    let exposed: Vec<usize> = free.ones().collect();
    let mut visited = FixedBitSet::with_capacity(g.order());
    for u in exposed {
        if mate[u] != usize::MAX {
            continue;
        }
        visited.clear();
        visited.insert(u);
        if augment(g, set, u, &mut mate, &mut visited) {
            size += 1;
        }
    }
    size
}

fn augment(
    g: &ColouredGraph,
    set: &FixedBitSet,
    u: usize,
    mate: &mut [usize],
    visited: &mut FixedBitSet,
) -> bool {
    let neighbours: Vec<usize> = g
        .blue_neighbours(u)
        .intersection(set)
        .filter(|&w| !visited.contains(w))
        .collect();
    for &w in &neighbours {
        if mate[w] == usize::MAX {
            mate[u] = w;
            mate[w] = u;
            return true;
        }
    }
    for w in neighbours {
        let next = mate[w];
        if visited.contains(w) || visited.contains(next) {
            continue;
        }
        visited.insert(w);
        visited.insert(next);
        if augment(g, set, next, mate, visited) {
            mate[u] = w;
            mate[w] = u;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(g: &ColouredGraph) -> FixedBitSet {
        g.full_set()
    }

    /// Largest red clique by trying every subset; only for tiny graphs.
    fn brute_force_red_clique_number(g: &ColouredGraph, within: &FixedBitSet) -> usize {
        let vertices: Vec<usize> = within.ones().collect();
        let mut best = 0;
        for mask in 0u32..(1 << vertices.len()) {
            let subset: Vec<usize> = (0..vertices.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vertices[i])
                .collect();
            if subset.len() > best && g.is_red_clique(&subset) {
                best = subset.len();
            }
        }
        best
    }

    #[test]
    fn all_red_ten_vertices_gives_three_triples() {
        let g = ColouredGraph::all_red(10);
        let family = max_disjoint_red_cliques(&g, &all(&g), 3);
        assert_eq!(family.len(), 3);
        assert_eq!(family.union().len(), 9);
        for c in &family.cliques {
            assert!(g.is_red_clique(c));
        }
    }

    #[test]
    fn red_perfect_matching_has_no_red_triangle() {
        let order = 8;
        let mut g = ColouredGraph::all_red(order);
        for u in 0..order {
            for v in u + 1..order {
                if !(u % 2 == 0 && v == u + 1) {
                    g.set_blue(u, v).unwrap();
                }
            }
        }
        assert!(max_disjoint_red_cliques(&g, &all(&g), 3).is_empty());
        assert_eq!(find_red_clique(&g, &all(&g), 2).map(|c| c.len()), Some(2));
    }

    #[test]
    fn matching_bound_is_exact_on_even_cycles() {
        let g = ColouredGraph::from_blue_edges(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
        assert_eq!(blue_matching_size(&g, &all(&g)), 4);
        assert_eq!(find_red_clique(&g, &all(&g), 4).map(|c| c.len()), Some(4));
        assert_eq!(find_red_clique(&g, &all(&g), 5), None);
    }

    #[test]
    fn exact_search_agrees_with_brute_force_on_petersen_complement() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = ColouredGraph::from_blue_edges(10, outer.chain(spokes).chain(inner)).unwrap();
        let omega = brute_force_red_clique_number(&g, &all(&g));
        assert_eq!(omega, 4);
        assert!(find_red_clique(&g, &all(&g), omega).is_some());
        assert!(find_red_clique(&g, &all(&g), omega + 1).is_none());
    }

    #[test]
    fn budgeted_search_never_contradicts_the_truth() {
        for seed in 0..6 {
            let g = crate::generate::random_triangle_free(14, 0.4, usize::MAX, seed);
            let omega = brute_force_red_clique_number(&g, &all(&g));
            for m in 1..=omega + 1 {
                for budget in [0, 1, 3, 20] {
                    match search_red_clique(&g, &all(&g), m, Some(budget)) {
                        CliqueSearchOutcome::Found(c) => {
                            assert!(c.len() == m && g.is_red_clique(&c))
                        }
                        CliqueSearchOutcome::Absent => assert!(m > omega),
                        CliqueSearchOutcome::Unknown => {}
                    }
                }
            }
            let family = max_disjoint_red_cliques_within_budget(&g, &all(&g), omega, Some(0));
            for c in &family.cliques {
                assert!(g.is_red_clique(c));
            }
        }
    }
}
