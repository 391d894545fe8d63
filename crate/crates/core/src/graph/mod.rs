//! Two-coloured complete graphs.
//!
//! Only blue adjacency is stored; every other pair of distinct vertices is
//! red. The blue graphs met in practice are sparse or bipartite, so red
//! queries are answered as complements on demand.

mod biclique;
mod clique;
mod embedding;
mod io;

pub use biclique::{balanced_biclique_bounds, max_balanced_biclique, Biclique, BicliqueBounds};
pub use clique::{
    find_red_clique, max_disjoint_red_cliques, max_disjoint_red_cliques_within_budget,
    search_red_clique, CliqueFamily, CliqueSearchOutcome,
};
pub use embedding::{
    format_embedding, parse_embedding, verify_partial_embedding, verify_red_embedding, Embedding,
    EmbeddingViolation,
};
pub use io::{parse_graph, read_graph, write_graph, ParseError, ReadError};

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::hypercube::{check_dimension, HypercubeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} is out of range for a graph on {order} vertices")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("a vertex cannot be joined to itself ({vertex})")]
    Loop { vertex: usize },
    #[error(transparent)]
    Dimension(#[from] HypercubeError),
}

/// A complete graph whose edges are coloured red or blue.
#[derive(Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    blue: Vec<FixedBitSet>,
}

impl std::fmt::Debug for ColouredGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ColouredGraph")
            .field("order", &self.order())
            .field("blue_edges", &self.blue_edge_count())
            .finish()
    }
}

impl ColouredGraph {
    /// `K_order` with every edge red.
    pub fn all_red(order: usize) -> Self {
        ColouredGraph {
            blue: vec![FixedBitSet::with_capacity(order); order],
        }
    }

    pub fn from_blue_edges(
        order: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::all_red(order);
        for (u, v) in edges {
            g.set_blue(u, v)?;
        }
        Ok(g)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        let order = self.order();
        for vertex in [u, v] {
            if vertex >= order {
                return Err(GraphError::VertexOutOfRange { vertex, order });
            }
        }
        if u == v {
            return Err(GraphError::Loop { vertex: u });
        }
        Ok(())
    }

    pub fn set_blue(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        self.blue[u].insert(v);
        self.blue[v].insert(u);
        Ok(())
    }

    pub fn set_red(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        self.blue[u].remove(v);
        self.blue[v].remove(u);
        Ok(())
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.blue.len()
    }

    pub fn is_blue(&self, u: usize, v: usize) -> bool {
        self.blue[u].contains(v)
    }

    pub fn is_red(&self, u: usize, v: usize) -> bool {
        u != v && !self.blue[u].contains(v)
    }

    pub fn blue_neighbours(&self, u: usize) -> &FixedBitSet {
        &self.blue[u]
    }

    /// Red neighbourhood of `u` as a fresh set.
    pub fn red_neighbours(&self, u: usize) -> FixedBitSet {
        let mut red = self.blue[u].clone();
        red.toggle_range(..);
        red.remove(u);
        red
    }

    pub fn blue_degree(&self, u: usize) -> usize {
        self.blue[u].count_ones(..)
    }

    pub fn max_blue_degree(&self) -> usize {
        (0..self.order())
            .map(|u| self.blue_degree(u))
            .max()
            .unwrap_or(0)
    }

    /// `|N_B(u) ∩ set|`.
    pub fn blue_degree_into(&self, u: usize, set: &FixedBitSet) -> usize {
        self.blue[u].intersection_count(set)
    }

    pub fn blue_edge_count(&self) -> usize {
        (0..self.order())
            .map(|u| self.blue_degree(u))
            .sum::<usize>()
            / 2
    }

    /// Blue edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn blue_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order()).flat_map(move |u| {
            self.blue[u]
                .ones()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Number of blue edges with both ends in `set`.
    pub fn blue_edges_within(&self, set: &FixedBitSet) -> usize {
        set.ones()
            .map(|u| self.blue[u].intersection_count(set))
            .sum::<usize>()
            / 2
    }

    /// The subgraph induced on `vertices`; vertex `i` of the result is
    /// `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> ColouredGraph {
        let mut local = vec![usize::MAX; self.order()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let blue = vertices
            .iter()
            .map(|&v| {
                let mut row = FixedBitSet::with_capacity(vertices.len());
                for w in self.blue[v].ones() {
                    if local[w] != usize::MAX {
                        row.insert(local[w]);
                    }
                }
                row
            })
            .collect();
        ColouredGraph { blue }
    }

    pub fn is_red_clique(&self, vertices: &[usize]) -> bool {
        let set = self.vertex_set(vertices.iter().copied());
        if set.count_ones(..) != vertices.len() {
            return false;
        }
        vertices.iter().all(|&v| self.blue[v].is_disjoint(&set))
    }

    /// A vertex set sized for this graph.
    pub fn vertex_set(&self, vertices: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.order());
        set.extend(vertices);
        set
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.order());
        set.insert_range(..);
        set
    }

    /// A proper two-colouring of the blue graph, if it is bipartite.
    pub fn blue_bipartition(&self) -> Option<Vec<bool>> {
        let order = self.order();
        let mut side = vec![None; order];
        let mut unvisited = self.full_set();
        let mut queue = VecDeque::new();
        while let Some(root) = unvisited.minimum() {
            unvisited.remove(root);
            side[root] = Some(false);
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                let colour = side[u].expect("queued vertices are coloured");
                let mut fresh = self.blue[u].clone();
                fresh.intersect_with(&unvisited);
                for w in fresh.ones() {
                    side[w] = Some(!colour);
                    queue.push_back(w);
                }
                unvisited.difference_with(&fresh);
            }
        }
        let side: Vec<bool> = side.into_iter().map(|s| s.unwrap_or(false)).collect();
        let mut class = FixedBitSet::with_capacity(order);
        class.extend((0..order).filter(|&v| side[v]));
        let proper = (0..order).all(|u| {
            let clash = self.blue[u].intersection_count(&class);
            if side[u] {
                clash == 0
            } else {
                clash == self.blue_degree(u)
            }
        });
        proper.then_some(side)
    }

    /// Some blue triangle, smallest vertex first, or `None` if there is none.
    pub fn find_blue_triangle(&self) -> Option<[usize; 3]> {
        if self.blue_bipartition().is_some() {
            return None;
        }
        for u in 0..self.order() {
            for v in self.blue[u].ones().filter(|&v| v > u) {
                if let Some(w) = first_common(&self.blue[u], &self.blue[v]) {
                    let mut t = [u, v, w];
                    t.sort_unstable();
                    return Some(t);
                }
            }
        }
        None
    }

    pub fn is_blue_triangle_free(&self) -> bool {
        self.find_blue_triangle().is_none()
    }

    /// Connected components of the red graph, each sorted, ordered by their
    /// smallest vertex.
    pub fn red_components(&self) -> Vec<Vec<usize>> {
        let mut unvisited = self.full_set();
        let mut components = Vec::new();
        while let Some(root) = unvisited.minimum() {
            unvisited.remove(root);
            let mut component = vec![root];
            let mut frontier = vec![root];
            while let Some(u) = frontier.pop() {
                let mut fresh = unvisited.clone();
                fresh.difference_with(&self.blue[u]);
                unvisited.difference_with(&fresh);
                for w in fresh.ones() {
                    component.push(w);
                    frontier.push(w);
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }
}

pub(crate) fn first_common(a: &FixedBitSet, b: &FixedBitSet) -> Option<usize> {
    let bits = usize::BITS as usize;
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .enumerate()
        .find_map(|(i, (x, y))| {
            let both = x & y;
            (both != 0).then(|| i * bits + both.trailing_zeros() as usize)
        })
}

/// Two disjoint red cliques on `2^n - 1` vertices each, with every edge
/// between them blue.
///
/// The blue graph is bipartite, and every red component has fewer than
/// `2^n` vertices, so there is no blue triangle and no red `Q_n`.
pub fn lower_bound_coloring(n: u32) -> Result<ColouredGraph, GraphError> {
    check_dimension(n)?;
    let half = (1usize << n) - 1;
    let order = 2 * half;
    let mut first = FixedBitSet::with_capacity(order);
    first.insert_range(..half);
    let mut second = FixedBitSet::with_capacity(order);
    second.insert_range(half..);
    let blue = (0..order)
        .map(|v| {
            if v < half {
                second.clone()
            } else {
                first.clone()
            }
        })
        .collect();
    Ok(ColouredGraph { blue })
}

/// `true` when every red component has fewer than `2^n` vertices, which
/// rules out a red copy of the connected graph `Q_n`.
pub fn red_components_too_small(g: &ColouredGraph, n: u32) -> bool {
    let cube = 1usize << n;
    g.red_components().iter().all(|c| c.len() < cube)
}
