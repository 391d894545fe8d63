//! Brute-force ground truth for tiny cases.
//!
//! [`contains_red_cube`] backtracks over injective maps of `Q_n` into the
//! red graph. [`exhaustive_ramsey`] runs it on every blue-triangle-free
//! colouring of `K_N`, either all `2^C(N,2)` labelled ones or one
//! representative per isomorphism class.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{verify_red_embedding, ColouredGraph, Embedding};
use crate::hypercube::{
    bandwidth_order, check_dimension, cube_neighbours, cube_order, cube_vertices, CubeVertex,
    HypercubeError,
};

/// Outcome of the exhaustive cube search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CubeSearch {
    Found(Embedding),
    /// Every branch was closed after visiting `nodes` partial maps.
    Absent {
        nodes: u64,
    },
}

impl CubeSearch {
    pub fn is_found(&self) -> bool {
        matches!(self, CubeSearch::Found(_))
    }
}

/// Decides whether the red graph of `g` contains `Q_n`.
///
/// Cube vertices are placed in bandwidth order; each goes to an unused
/// vertex of red degree at least `n` that is red to the images of its
/// placed neighbours. `Q_n` is connected, so only red components of at least
/// `2^n` vertices are searched.
pub fn contains_red_cube(g: &ColouredGraph, n: u32) -> Result<CubeSearch, HypercubeError> {
    check_dimension(n)?;
    let order = bandwidth_order(cube_vertices(n));
    let mut search = CubeBacktrack {
        n,
        red: (0..g.order()).map(|v| g.red_neighbours(v)).collect(),
        image: vec![usize::MAX; cube_order(n)],
        order,
        nodes: 0,
    };
    if g.order() < cube_order(n) {
        return Ok(CubeSearch::Absent { nodes: 0 });
    }
    let mut eligible = FixedBitSet::with_capacity(g.order());
    for component in g.red_components() {
        if component.len() >= cube_order(n) {
            eligible.extend(
                component
                    .into_iter()
                    .filter(|&v| search.red[v].count_ones(..) >= n as usize),
            );
        }
    }
    if eligible.count_ones(..) < cube_order(n) {
        return Ok(CubeSearch::Absent { nodes: 0 });
    }
    if search.place(0, &mut eligible) {
        let mut phi = Embedding::empty(n)?;
        for x in cube_vertices(n) {
            phi.set(x, search.image[x.index()]);
        }
        debug_assert_eq!(verify_red_embedding(g, n, &phi), Ok(()));
        Ok(CubeSearch::Found(phi))
    } else {
        Ok(CubeSearch::Absent {
            nodes: search.nodes,
        })
    }
}

struct CubeBacktrack {
    n: u32,
    red: Vec<FixedBitSet>,
    image: Vec<usize>,
    order: Vec<CubeVertex>,
    nodes: u64,
}

impl CubeBacktrack {
    /// `free` holds the unused eligible vertices.
    fn place(&mut self, depth: usize, free: &mut FixedBitSet) -> bool {
        if depth == self.order.len() {
            return true;
        }
        self.nodes += 1;
        let x = self.order[depth];
        let mut cand = free.clone();
        for z in cube_neighbours(x, self.n) {
            let v = self.image[z.index()];
            if v != usize::MAX {
                cand.intersect_with(&self.red[v]);
            }
        }
        for v in cand.ones() {
            self.image[x.index()] = v;
            free.remove(v);
            if self.place(depth + 1, free) {
                return true;
            }
            free.insert(v);
        }
        self.image[x.index()] = usize::MAX;
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Enumeration {
    /// Every labelled blue graph, as a binary counter over a fixed edge
    /// order.
    Plain,
    /// One blue graph per isomorphism class, by orderly generation.
    Canonical,
}

impl Enumeration {
    /// Largest order this mode accepts.
    pub fn max_order(self) -> usize {
        match self {
            Enumeration::Plain => 7,
            Enumeration::Canonical => 9,
        }
    }
}

/// Whether every blue-triangle-free colouring of `K_order` has a red `Q_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RamseyVerdict {
    pub n: u32,
    pub order: usize,
    pub holds: bool,
    /// A colouring with no blue triangle and no red `Q_n`, when one exists.
    pub witness: Option<ColouredGraph>,
    /// Triangle-free colourings examined.
    pub examined: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{mode:?} enumeration refuses N = {order} (limit {limit}); it would cover about 2^{log2_cost} colourings")]
    TooLarge {
        mode: Enumeration,
        order: usize,
        limit: usize,
        log2_cost: usize,
    },
    #[error(transparent)]
    Cube(#[from] HypercubeError),
}

/// Edge `(i, j)`, `i < j`, in column order: `(0,1), (0,2), (1,2), (0,3), ...`.
fn edge_list(order: usize) -> Vec<(usize, usize)> {
    (1..order)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect()
}

/// Adjacency masks of the blue graph whose edges are the set bits of `code`.
fn masks_from_code(code: u64, edges: &[(usize, usize)], order: usize) -> Vec<u16> {
    let mut adj = vec![0u16; order];
    for (k, &(i, j)) in edges.iter().enumerate() {
        if code >> k & 1 == 1 {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    adj
}

fn masks_triangle_free(adj: &[u16]) -> bool {
    (0..adj.len()).all(|u| {
        let mut rest = adj[u] & !((1u16 << (u + 1)) - 1);
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            if adj[u] & adj[v] != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    })
}

fn graph_from_masks(adj: &[u16]) -> ColouredGraph {
    let order = adj.len();
    let edges = (0..order).flat_map(|u| {
        (u + 1..order)
            .filter(move |&v| adj[u] >> v & 1 == 1)
            .map(move |v| (u, v))
    });
    ColouredGraph::from_blue_edges(order, edges).expect("masks describe a simple graph")
}

fn lacks_red_cube(g: &ColouredGraph, n: u32) -> bool {
    !contains_red_cube(g, n)
        .expect("dimension checked")
        .is_found()
}

/// Exhaustively decides `r(K_3, Q_n) <= order`.
pub fn exhaustive_ramsey(
    n: u32,
    order: usize,
    mode: Enumeration,
) -> Result<RamseyVerdict, OracleError> {
    check_dimension(n)?;
    let pairs = order * order.saturating_sub(1) / 2;
    if order > mode.max_order() {
        return Err(OracleError::TooLarge {
            mode,
            order,
            limit: mode.max_order(),
            log2_cost: pairs,
        });
    }
    let (witness, examined) = match mode {
        Enumeration::Plain => plain_search(n, order),
        Enumeration::Canonical => canonical_search(n, order),
    };
    if let Some(w) = &witness {
        assert!(w.is_blue_triangle_free(), "witness has a blue triangle");
        assert!(lacks_red_cube(w, n), "witness contains a red cube");
    }
    Ok(RamseyVerdict {
        n,
        order,
        holds: witness.is_none(),
        witness,
        examined,
    })
}

fn plain_search(n: u32, order: usize) -> (Option<ColouredGraph>, u64) {
    let edges = edge_list(order);
    let total = 1u64 << edges.len();
    let chunk = 1u64 << 12;
    let chunks = total.div_ceil(chunk);
    // Chunks are scanned in parallel; the witness is the smallest counter.
    let results: Vec<(Option<u64>, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut examined = 0;
            for code in c * chunk..((c + 1) * chunk).min(total) {
                let adj = masks_from_code(code, &edges, order);
                if !masks_triangle_free(&adj) {
                    continue;
                }
                examined += 1;
                if lacks_red_cube(&graph_from_masks(&adj), n) {
                    return (Some(code), examined);
                }
            }
            (None, examined)
        })
        .collect();
    let examined = results.iter().map(|r| r.1).sum();
    let witness = results
        .iter()
        .find_map(|r| r.0)
        .map(|code| graph_from_masks(&masks_from_code(code, &edges, order)));
    (witness, examined)
}

/// Orderly generation: a graph is kept when its column-order edge string is
/// the largest over all relabellings. Deleting the last edge of such a
/// graph leaves another such graph, so extending by later edges only
/// reaches every class exactly once.
fn canonical_search(n: u32, order: usize) -> (Option<ColouredGraph>, u64) {
    let edges = edge_list(order);
    let mut stack: Vec<(Vec<u16>, usize)> = vec![(vec![0; order], 0)];
    let mut examined = 0;
    while let Some((adj, next)) = stack.pop() {
        examined += 1;
        if lacks_red_cube(&graph_from_masks(&adj), n) {
            return (Some(graph_from_masks(&adj)), examined);
        }
        for (k, &(i, j)) in edges.iter().enumerate().skip(next).rev() {
            let mut child = adj.clone();
            child[i] |= 1 << j;
            child[j] |= 1 << i;
            if child[i] & child[j] == 0 && is_canonical(&child) {
                stack.push((child, k + 1));
            }
        }
    }
    (None, examined)
}

/// Whether no relabelling gives a larger column-order edge string.
fn is_canonical(adj: &[u16]) -> bool {
    let order = adj.len();
    let mut sigma = Vec::with_capacity(order);
    let mut used = 0u16;
    !exceeds(adj, &mut sigma, &mut used)
}

/// Extends the partial relabelling `sigma` (new label to old) and reports
/// whether some completion beats the identity. Column `j` of the
/// relabelled string is fixed once `sigma[0..=j]` is.
fn exceeds(adj: &[u16], sigma: &mut Vec<usize>, used: &mut u16) -> bool {
    let j = sigma.len();
    if j == adj.len() {
        return false;
    }
    for old in 0..adj.len() {
        if *used >> old & 1 == 1 {
            continue;
        }
        let mut cmp = std::cmp::Ordering::Equal;
        for (i, &si) in sigma.iter().enumerate() {
            let relabelled = adj[si] >> old & 1;
            let original = adj[i] >> j & 1;
            if relabelled != original {
                cmp = relabelled.cmp(&original);
                break;
            }
        }
        match cmp {
            std::cmp::Ordering::Greater => return true,
            std::cmp::Ordering::Less => continue,
            std::cmp::Ordering::Equal => {
                sigma.push(old);
                *used |= 1 << old;
                let found = exceeds(adj, sigma, used);
                sigma.pop();
                *used &= !(1 << old);
                if found {
                    return true;
                }
            }
        }
    }
    false
}
