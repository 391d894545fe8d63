//! Embedding subsets of `Q_n` into snakes of red cliques.
//!
//! A snake is a family of disjoint red `m`-cliques whose link graph, with an
//! edge wherever two cliques span a red `K_{s,s}`, is connected. The cube is
//! laid out in bandwidth order and fed along a closed walk around a spanning
//! tree of the link graph: a few vertices at a time into each link witness,
//! and the bulk of a clique on the walk's last visit to it.

use std::collections::{BTreeMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{max_balanced_biclique, verify_partial_embedding, ColouredGraph, Embedding};
use crate::hypercube::{binomial, CubeVertex, HypercubeError};

/// A red `K_{s,s}` between cliques `a < b`: `left ⊆ M_a`, `right ⊆ M_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakeLink {
    pub a: usize,
    pub b: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl SnakeLink {
    /// The witness side inside clique `from`, then the side inside the other.
    fn oriented(&self, from: usize) -> (&[usize], &[usize]) {
        if from == self.a {
            (&self.left, &self.right)
        } else {
            (&self.right, &self.left)
        }
    }
}

/// An `(m, s)`-snake with one witness per link-graph edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snake {
    pub s: usize,
    pub cliques: Vec<Vec<usize>>,
    pub links: Vec<SnakeLink>,
}

impl Snake {
    /// Builds the snake on `cliques` with every link of weight at least `s`,
    /// witnesses cut down to `s` vertices per side.
    pub fn discover(g: &ColouredGraph, cliques: Vec<Vec<usize>>, s: usize) -> Snake {
        let mut links = Vec::new();
        for a in 0..cliques.len() {
            for b in a + 1..cliques.len() {
                let witness = max_balanced_biclique(g, &cliques[a], &cliques[b]);
                if s > 0 && witness.size() >= s {
                    let w = witness.truncated(s);
                    links.push(SnakeLink {
                        a,
                        b,
                        left: w.left,
                        right: w.right,
                    });
                }
            }
        }
        Snake { s, cliques, links }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Common clique size `m` (0 for the empty snake).
    pub fn clique_size(&self) -> usize {
        self.cliques.first().map_or(0, Vec::len)
    }

    /// `V(S)`, sorted.
    pub fn vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.cliques.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Link-graph adjacency lists, ascending.
    pub fn link_graph(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for link in &self.links {
            adj[link.a].push(link.b);
            adj[link.b].push(link.a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    fn link(&self, u: usize, v: usize) -> Option<&SnakeLink> {
        let (a, b) = (u.min(v), u.max(v));
        self.links.iter().find(|l| l.a == a && l.b == b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnakeViolation {
    #[error("clique {index} has {found} vertices, expected {expected}")]
    UnevenCliques {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("vertex {vertex} is outside the graph")]
    VertexOutOfRange { vertex: usize },
    #[error("vertex {vertex} appears in cliques {first} and {second}")]
    Overlap {
        first: usize,
        second: usize,
        vertex: usize,
    },
    #[error("clique {index} contains the blue edge {edge:?}")]
    NotRedClique { index: usize, edge: (usize, usize) },
    #[error("link {a}-{b} is malformed: {reason}")]
    BadLink { a: usize, b: usize, reason: String },
    #[error("link graph is disconnected: clique {0} is unreachable from clique 0")]
    Disconnected(usize),
}

/// Checks disjointness, clique-ness, witnesses and connectivity.
pub fn validate_snake(g: &ColouredGraph, snake: &Snake) -> Result<(), SnakeViolation> {
    let m = snake.clique_size();
    let mut owner = vec![usize::MAX; g.order()];
    for (index, clique) in snake.cliques.iter().enumerate() {
        if clique.len() != m {
            return Err(SnakeViolation::UnevenCliques {
                index,
                expected: m,
                found: clique.len(),
            });
        }
        for &vertex in clique {
            if vertex >= g.order() {
                return Err(SnakeViolation::VertexOutOfRange { vertex });
            }
            if owner[vertex] != usize::MAX {
                return Err(SnakeViolation::Overlap {
                    first: owner[vertex],
                    second: index,
                    vertex,
                });
            }
            owner[vertex] = index;
        }
        for (i, &u) in clique.iter().enumerate() {
            if let Some(&v) = clique[i + 1..].iter().find(|&&v| g.is_blue(u, v)) {
                return Err(SnakeViolation::NotRedClique {
                    index,
                    edge: (u.min(v), u.max(v)),
                });
            }
        }
    }
    for link in &snake.links {
        let bad = |reason: &str| {
            Err(SnakeViolation::BadLink {
                a: link.a,
                b: link.b,
                reason: reason.to_string(),
            })
        };
        if link.a >= link.b || link.b >= snake.len() {
            return bad("clique indices out of order or range");
        }
        if link.left.len() != snake.s || link.right.len() != snake.s {
            return bad("witness sides do not have s vertices");
        }
        if link.left.iter().any(|&v| owner[v] != link.a)
            || link.right.iter().any(|&v| owner[v] != link.b)
        {
            return bad("witness leaves its clique");
        }
        if link
            .left
            .iter()
            .any(|&u| link.right.iter().any(|&v| g.is_blue(u, v)))
        {
            return bad("witness has a blue edge");
        }
    }
    let adj = snake.link_graph();
    let reached = bfs_tree(&adj).0;
    if let Some(unreached) = reached.iter().position(|&r| !r) {
        return Err(SnakeViolation::Disconnected(unreached));
    }
    Ok(())
}

/// Breadth-first spanning tree from clique 0: reached flags and the
/// children of every node in ascending order.
fn bfs_tree(adj: &[Vec<usize>]) -> (Vec<bool>, Vec<Vec<usize>>) {
    let mut reached = vec![false; adj.len()];
    let mut children = vec![Vec::new(); adj.len()];
    if adj.is_empty() {
        return (reached, children);
    }
    reached[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !reached[v] {
                reached[v] = true;
                children[u].push(v);
                queue.push_back(v);
            }
        }
    }
    (reached, children)
}

/// A closed walk `w_0, ..., w_L` around a spanning tree of the link graph,
/// using every tree edge twice, so `L = 2(k - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedWalk {
    pub steps: Vec<usize>,
    /// `T`: positions `j` with `w_i != w_j` for every `i > j`.
    pub last_visits: Vec<usize>,
}

impl ClosedWalk {
    pub fn is_last_visit(&self, position: usize) -> bool {
        self.last_visits.binary_search(&position).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("the snake has no cliques")]
    Empty,
    #[error("link graph is disconnected: clique {0} is unreachable from clique 0")]
    Disconnected(usize),
}

/// Depth-first tour of the breadth-first spanning tree rooted at clique 0.
pub fn closed_tree_walk(snake: &Snake) -> Result<ClosedWalk, WalkError> {
    if snake.is_empty() {
        return Err(WalkError::Empty);
    }
    let (reached, children) = bfs_tree(&snake.link_graph());
    if let Some(unreached) = reached.iter().position(|&r| !r) {
        return Err(WalkError::Disconnected(unreached));
    }
    let mut steps = vec![0usize];
    // Explicit stack of (node, next child index) keeps deep trees off the call stack.
    let mut stack = vec![(0usize, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (node, next) = *top;
        if let Some(&child) = children[node].get(next) {
            top.1 += 1;
            steps.push(child);
            stack.push((child, 0));
        } else {
            stack.pop();
            if let Some(&(parent, _)) = stack.last() {
                steps.push(parent);
            }
        }
    }
    let mut seen = vec![false; snake.len()];
    let mut last_visits = Vec::with_capacity(snake.len());
    for (position, &w) in steps.iter().enumerate().rev() {
        if !seen[w] {
            seen[w] = true;
            last_visits.push(position);
        }
    }
    last_visits.reverse();
    Ok(ClosedWalk { steps, last_visits })
}

/// The sets `D_x` of graph vertices each cube vertex must avoid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenSets {
    sets: BTreeMap<CubeVertex, Vec<usize>>,
}

impl ForbiddenSets {
    pub fn new() -> Self {
        ForbiddenSets::default()
    }

    pub fn insert(&mut self, x: CubeVertex, mut set: Vec<usize>) {
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            self.sets.remove(&x);
        } else {
            self.sets.insert(x, set);
        }
    }

    pub fn get(&self, x: CubeVertex) -> &[usize] {
        self.sets.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn forbids(&self, x: CubeVertex, v: usize) -> bool {
        self.get(x).binary_search(&v).is_ok()
    }

    /// `Δ = max |D_x|`.
    pub fn max_size(&self) -> usize {
        self.sets.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CubeVertex, &[usize])> {
        self.sets.iter().map(|(&x, set)| (x, set.as_slice()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SnakeMode {
    /// Requires the size conditions on `m` and `s`, then follows the walk.
    Strict,
    /// Skips the size conditions; if the walk does not produce a valid
    /// embedding, places each cube vertex at the first compatible vertex of
    /// the walk's host order.
    Relaxed,
}

/// How a successful embedding was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SnakeRoute {
    Walk,
    Guided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnakeEmbedding {
    pub embedding: Embedding,
    pub route: SnakeRoute,
    /// Why the walk itself did not succeed, when the guided route was used.
    pub walk_failure: Option<String>,
}

/// The quantities in the size conditions `m >= ceil(q/k) + s + Δ` and
/// `s >= 2Δ + 8k * binom(n, floor(n/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakeBudget {
    pub q: usize,
    pub k: usize,
    pub m: usize,
    pub s: usize,
    pub delta: usize,
    pub t: usize,
}

impl SnakeBudget {
    pub fn required_m(&self) -> usize {
        self.q.div_ceil(self.k.max(1)) + self.s + self.delta
    }

    pub fn required_s(&self, n: u32) -> u64 {
        2 * self.delta as u64 + 8 * self.k as u64 * binomial(n, n / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnakeError {
    #[error("invalid snake: {0}")]
    InvalidSnake(#[from] SnakeViolation),
    #[error(
        "size conditions fail: m = {} (need {}), s = {} (need {})",
        .budget.m, .budget.required_m(), .budget.s, .required_s
    )]
    Conditions {
        budget: SnakeBudget,
        required_s: u64,
    },
    #[error("forbidden set of {x:?} leaves the snake")]
    ForbiddenOutside { x: CubeVertex },
    #[error("embedding stalled at walk position {position} after placing {placed} of {total} cube vertices: {detail}")]
    Exhausted {
        position: usize,
        placed: usize,
        total: usize,
        detail: String,
    },
    #[error(transparent)]
    Cube(#[from] HypercubeError),
}

/// Embeds the cube vertices `q` into the red graph on `V(S)`, with every
/// `x` avoiding `D_x`.
pub fn snake_embed(
    g: &ColouredGraph,
    snake: &Snake,
    q: &[CubeVertex],
    forbidden: &ForbiddenSets,
    n: u32,
    mode: SnakeMode,
) -> Result<SnakeEmbedding, SnakeError> {
    validate_snake(g, snake)?;
    let vertices = snake.vertices();
    for (x, set) in forbidden.iter() {
        if set.iter().any(|v| vertices.binary_search(v).is_err()) {
            return Err(SnakeError::ForbiddenOutside { x });
        }
    }
    let walk = closed_tree_walk(snake).map_err(|e| match e {
        WalkError::Empty => SnakeError::Exhausted {
            position: 0,
            placed: 0,
            total: q.len(),
            detail: "the snake has no cliques".to_string(),
        },
        WalkError::Disconnected(c) => SnakeError::InvalidSnake(SnakeViolation::Disconnected(c)),
    })?;
    let k = snake.len();
    let budget = SnakeBudget {
        q: q.len(),
        k,
        m: snake.clique_size(),
        s: snake.s,
        delta: forbidden.max_size(),
        t: snake.s / (4 * k),
    };
    let order = crate::hypercube::bandwidth_order(q.iter().copied());
    let mut phi = Embedding::empty(n)?;

    if mode == SnakeMode::Strict {
        let required_s = budget.required_s(n);
        if budget.m < budget.required_m() || (budget.s as u64) < required_s {
            return Err(SnakeError::Conditions { budget, required_s });
        }
        walk_embed(g, snake, &walk, &order, forbidden, &budget, &mut phi, true)?;
        if let Err(v) = verify_partial_embedding(g, &phi) {
            panic!("snake walk produced an invalid embedding under the size conditions: {v}");
        }
        check_forbidden(&phi, forbidden);
        return Ok(SnakeEmbedding {
            embedding: phi,
            route: SnakeRoute::Walk,
            walk_failure: None,
        });
    }

    let walk_failure =
        match walk_embed(g, snake, &walk, &order, forbidden, &budget, &mut phi, false) {
            Ok(()) => match verify_partial_embedding(g, &phi) {
                Ok(()) => {
                    check_forbidden(&phi, forbidden);
                    return Ok(SnakeEmbedding {
                        embedding: phi,
                        route: SnakeRoute::Walk,
                        walk_failure: None,
                    });
                }
                Err(v) => v.to_string(),
            },
            Err(e) => e.to_string(),
        };
    let mut phi = Embedding::empty(n)?;
    guided_embed(g, snake, &walk, &order, forbidden, &mut phi)?;
    if let Err(v) = verify_partial_embedding(g, &phi) {
        panic!("guided snake embedding failed verification: {v}");
    }
    check_forbidden(&phi, forbidden);
    Ok(SnakeEmbedding {
        embedding: phi,
        route: SnakeRoute::Guided,
        walk_failure: Some(walk_failure),
    })
}

fn check_forbidden(phi: &Embedding, forbidden: &ForbiddenSets) {
    for (x, v) in phi.pairs() {
        assert!(
            !forbidden.forbids(x, v),
            "{x:?} was placed on forbidden vertex {v}"
        );
    }
}

/// Which part of the snake a vertex was placed in, for the edge audit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Slot {
    X(usize),
    Y(usize),
    Flush(usize),
}

/// The walk itself: at each position `j`, flush `M_{w_j} \ X_j` if this is
/// the last visit, then place up to `t` vertices in `X_j` and `t` in `Y_j`.
#[allow(clippy::too_many_arguments)]
fn walk_embed(
    g: &ColouredGraph,
    snake: &Snake,
    walk: &ClosedWalk,
    order: &[CubeVertex],
    forbidden: &ForbiddenSets,
    budget: &SnakeBudget,
    phi: &mut Embedding,
    audit: bool,
) -> Result<(), SnakeError> {
    let t = budget.t;
    let total = order.len();
    if t == 0 && snake.len() > 1 {
        return Err(SnakeError::Exhausted {
            position: 0,
            placed: 0,
            total,
            detail: format!(
                "t = floor(s / 4k) = 0 with s = {}, k = {}",
                snake.s,
                snake.len()
            ),
        });
    }
    let last = walk.edge_count();
    let mut used = FixedBitSet::with_capacity(g.order());
    let mut placed = 0usize;
    let mut slots: Vec<Slot> = Vec::with_capacity(total);
    let mut x_use = vec![0usize; last];
    let mut flushed = vec![false; snake.len()];

    let place_from = |host: &[usize],
                      limit: usize,
                      slot: Slot,
                      placed: &mut usize,
                      used: &mut FixedBitSet,
                      phi: &mut Embedding,
                      slots: &mut Vec<Slot>|
     -> usize {
        let mut count = 0;
        let mut cursor = 0;
        while count < limit && *placed < total {
            let x = order[*placed];
            let Some(offset) = host[cursor..]
                .iter()
                .position(|&v| !used.contains(v) && !forbidden.forbids(x, v))
            else {
                break;
            };
            cursor += offset;
            let v = host[cursor];
            used.insert(v);
            phi.set(x, v);
            slots.push(slot);
            *placed += 1;
            count += 1;
        }
        count
    };

    for j in 0..=last {
        let here = walk.steps[j];
        let x_side: &[usize] = if j < last {
            snake
                .link(here, walk.steps[j + 1])
                .expect("walk follows link edges")
                .oriented(here)
                .0
        } else {
            &[]
        };
        if walk.is_last_visit(j) {
            assert!(!flushed[here], "clique {here} flushed twice");
            flushed[here] = true;
            let rest: Vec<usize> = snake.cliques[here]
                .iter()
                .copied()
                .filter(|v| !x_side.contains(v))
                .collect();
            place_from(
                &rest,
                usize::MAX,
                Slot::Flush(here),
                &mut placed,
                &mut used,
                phi,
                &mut slots,
            );
        }
        if j < last {
            let link = snake
                .link(here, walk.steps[j + 1])
                .expect("walk follows link edges");
            let (xs, ys) = link.oriented(here);
            x_use[j] += place_from(xs, t, Slot::X(j), &mut placed, &mut used, phi, &mut slots);
            place_from(ys, t, Slot::Y(j), &mut placed, &mut used, phi, &mut slots);
        }
        if placed == total {
            break;
        }
    }
    if audit {
        assert!(x_use.iter().all(|&u| u <= 2 * snake.len() * t));
        audit_edges(walk, order, &slots, phi.dimension());
    }
    if placed < total {
        return Err(SnakeError::Exhausted {
            position: last,
            placed,
            total,
            detail: format!("walk ended with {} cube vertices left", total - placed),
        });
    }
    Ok(())
}

/// Every cube edge inside the placed prefix joins vertices in the same
/// clique or in the two sides of one link.
fn audit_edges(walk: &ClosedWalk, order: &[CubeVertex], slots: &[Slot], n: u32) {
    let mut position = BTreeMap::new();
    for (i, &x) in order.iter().take(slots.len()).enumerate() {
        position.insert(x, i);
    }
    let clique_of = |slot: Slot| match slot {
        Slot::X(j) => walk.steps[j],
        Slot::Y(j) => walk.steps[j + 1],
        Slot::Flush(c) => c,
    };
    for (&x, &i) in &position {
        for bit in 0..n {
            let y = CubeVertex(x.0 ^ (1 << bit));
            let Some(&jdx) = position.get(&y) else {
                continue;
            };
            let (a, b) = (slots[i], slots[jdx]);
            let linked =
                matches!((a, b), (Slot::X(p), Slot::Y(q)) | (Slot::Y(q), Slot::X(p)) if p == q);
            assert!(
                clique_of(a) == clique_of(b) || linked,
                "cube edge {x:?}-{y:?} spans {a:?} and {b:?}"
            );
        }
    }
}

/// Host order derived from the walk: at the first visit to a clique its
/// vertices outside every witness, then `X_j`, then `Y_j`; any vertex not
/// yet listed goes at the end.
fn host_sequence(snake: &Snake, walk: &ClosedWalk) -> Vec<usize> {
    let last = walk.edge_count();
    let mut in_witness = vec![FixedBitSet::new(); snake.len()];
    for link in &snake.links {
        in_witness[link.a].extend(link.left.iter().copied());
        in_witness[link.b].extend(link.right.iter().copied());
    }
    let mut listed = std::collections::HashSet::new();
    let mut sequence = Vec::with_capacity(snake.len() * snake.clique_size());
    let mut visited = vec![false; snake.len()];
    let mut push = |v: usize, sequence: &mut Vec<usize>| {
        if listed.insert(v) {
            sequence.push(v);
        }
    };
    for j in 0..=last {
        let here = walk.steps[j];
        if !visited[here] {
            visited[here] = true;
            for &v in &snake.cliques[here] {
                if !in_witness[here].contains(v) {
                    push(v, &mut sequence);
                }
            }
        }
        if j < last {
            let (xs, ys) = snake
                .link(here, walk.steps[j + 1])
                .expect("walk follows link edges")
                .oriented(here);
            for &v in xs.iter().chain(ys) {
                push(v, &mut sequence);
            }
        }
    }
    for &v in snake.cliques.iter().flatten() {
        push(v, &mut sequence);
    }
    sequence
}

/// Places each cube vertex, in bandwidth order, at the first unused vertex
/// of the host sequence that avoids `D_x` and is red to the images of its
/// embedded cube neighbours.
fn guided_embed(
    g: &ColouredGraph,
    snake: &Snake,
    walk: &ClosedWalk,
    order: &[CubeVertex],
    forbidden: &ForbiddenSets,
    phi: &mut Embedding,
) -> Result<(), SnakeError> {
    let n = phi.dimension();
    let sequence = host_sequence(snake, walk);
    let mut used = vec![false; sequence.len()];
    let mut first_free = 0usize;
    for (placed, &x) in order.iter().enumerate() {
        while first_free < sequence.len() && used[first_free] {
            first_free += 1;
        }
        let images: Vec<usize> = (0..n)
            .filter_map(|bit| phi.get(CubeVertex(x.0 ^ (1 << bit))))
            .collect();
        let found = (first_free..sequence.len()).find(|&p| {
            let v = sequence[p];
            !used[p] && !forbidden.forbids(x, v) && images.iter().all(|&w| !g.is_blue(v, w))
        });
        let Some(p) = found else {
            return Err(SnakeError::Exhausted {
                position: first_free,
                placed,
                total: order.len(),
                detail: format!(
                    "no compatible host vertex for {} among {} unused",
                    x.to_word(n),
                    sequence.len() - placed
                ),
            });
        };
        used[p] = true;
        phi.set(x, sequence[p]);
    }
    Ok(())
}
