//! Splitting a colouring into a sparse-blue part and red snakes.
//!
//! Each round packs the active set with a maximal family of disjoint red
//! `m`-cliques, weighs every pair of cliques by its largest red `K_{s,s}`,
//! picks a threshold `s` with a multiplicative gap below it, and removes one
//! component of the resulting link graph as the next snake. Vertices with
//! many blue edges into that snake are set aside in `C`.
//!
//! Both searches are exponential in the worst case. With a node budget a
//! weight is known only up to an interval `[lower, upper]`, and a threshold
//! is accepted only if every interval clears the gap on one side.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    balanced_biclique_bounds, max_disjoint_red_cliques_within_budget, BicliqueBounds, ColouredGraph,
};
use crate::hypercube::binomial;
use crate::snake::{validate_snake, Snake, SnakeLink, SnakeViolation};

/// Constants of the decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    /// Clique size.
    pub m: usize,
    /// Range for the snake thresholds `s_i`.
    pub s_lo: usize,
    pub s_hi: usize,
    /// Gap factor: no weight may lie in `[s / lambda, s)`.
    pub lambda: f64,
    /// Later snakes send at most `s_i / mu` blue edges into `S_i`.
    pub mu: f64,
    /// `e(G_B[C]) <= density * |C|`.
    pub density: f64,
    /// Node budget for each clique or biclique search; `None` searches to
    /// the end.
    #[serde(default)]
    pub search_nodes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("m must be at least 1")]
    CliqueSize,
    #[error("need 1 <= s_lo <= s_hi, got [{0}, {1}]")]
    Range(usize, usize),
    #[error("lambda = {0} must exceed 1")]
    Lambda(f64),
    #[error("mu = {0} must exceed 1")]
    Mu(f64),
    #[error("density = {0} must be positive")]
    Density(f64),
    #[error("mu * floor(N / m) = {product} exceeds lambda = {lambda}, so the bound on later snakes cannot be guaranteed")]
    Inconsistent { product: f64, lambda: f64 },
}

impl DecompositionParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.m == 0 {
            return Err(ParamsError::CliqueSize);
        }
        if self.s_lo == 0 || self.s_lo > self.s_hi {
            return Err(ParamsError::Range(self.s_lo, self.s_hi));
        }
        if !(self.lambda > 1.0) {
            return Err(ParamsError::Lambda(self.lambda));
        }
        if !(self.mu > 1.0) {
            return Err(ParamsError::Mu(self.mu));
        }
        if !(self.density > 0.0) {
            return Err(ParamsError::Density(self.density));
        }
        Ok(())
    }

    /// Checks the parameters against a graph on `order` vertices: a snake
    /// has at most `floor(order / m)` cliques, each receiving fewer than
    /// `s / lambda` blue edges from a surviving vertex.
    pub fn validate_for(&self, order: usize) -> Result<(), ParamsError> {
        self.validate()?;
        let product = self.mu * (order / self.m) as f64;
        if product > self.lambda {
            return Err(ParamsError::Inconsistent {
                product,
                lambda: self.lambda,
            });
        }
        Ok(())
    }

    /// Small-`n` constants: `m = 2^(n-1)`, `s` between
    /// `min(2 binom(n, n/2), m) / 16` and `m`, `lambda = 16`, `mu = 2`,
    /// density `2m`. Consistent for graphs on up to `2^(n+2)` vertices.
    pub fn desk(n: u32) -> Self {
        let m = 1usize << n.saturating_sub(1);
        let reach = (2 * binomial(n, n / 2)) as usize;
        DecompositionParams {
            m,
            s_lo: (reach.min(m) / 16).max(1),
            s_hi: m,
            lambda: 16.0,
            mu: 2.0,
            density: 2.0 * m as f64,
            search_nodes: Some(DESK_SEARCH_NODES),
        }
    }

    /// The asymptotic constants: `d = ceil(log log log n) + 1`,
    /// `m = 2^(n-d)`, `s` in `[2^n n^(-1/3), 2^n n^(-1/4)]`,
    /// `lambda = 2^(3d+2)`, `mu = 2^(2d)`, density `2^(n-d+1)`. Only
    /// meaningful for very large `n`; at small `n` the range may be empty.
    pub fn asymptotic(n: u32) -> Self {
        let lll = {
            let mut x = f64::from(n.max(1));
            for _ in 0..3 {
                x = if x > 1.0 { x.log2() } else { 0.0 };
            }
            x
        };
        let d = (lll.ceil() as u32 + 1).min(n.max(1));
        let two_n = (1u64 << n) as f64;
        let nf = f64::from(n.max(1));
        DecompositionParams {
            m: 1usize << (n - d),
            s_lo: ((two_n * nf.powf(-1.0 / 3.0)).ceil() as usize).max(1),
            s_hi: (two_n * nf.powf(-0.25)).floor() as usize,
            lambda: 2f64.powi(3 * d as i32 + 2),
            mu: 2f64.powi(2 * d as i32),
            density: (1u64 << (n - d + 1)) as f64,
            search_nodes: None,
        }
    }
}

/// Default per-search node budget of [`DecompositionParams::desk`].
pub const DESK_SEARCH_NODES: u64 = 4_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no gap threshold in [{s_lo}, {s_hi}]: every grid point {grid:?} is blocked by weights {blocking:?}")]
pub struct GapError {
    pub s_lo: usize,
    pub s_hi: usize,
    pub grid: Vec<usize>,
    pub blocking: Vec<usize>,
}

/// The grid `ceil(s_lo * lambda^i)` up to `s_hi`.
pub fn gap_grid(params: &DecompositionParams) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut x = params.s_lo as f64;
    while x.ceil() <= params.s_hi as f64 {
        let point = x.ceil() as usize;
        if grid.last() != Some(&point) {
            grid.push(point);
        }
        x *= params.lambda;
    }
    grid
}

/// Whether `weight` lies in `I(x) = [x / lambda, x)`.
pub fn in_gap_interval(weight: usize, x: usize, lambda: f64) -> bool {
    weight < x && weight as f64 >= x as f64 / lambda
}

/// The smallest grid point `x` with no weight in `[x / lambda, x)`.
pub fn select_gap_threshold(
    weights: &[usize],
    params: &DecompositionParams,
) -> Result<usize, GapError> {
    let bounds: Vec<(usize, usize)> = weights.iter().map(|&w| (w, w)).collect();
    select_gap_threshold_bounds(&bounds, params)
}

/// Whether some weight in `[lower, upper]` could fall in `I(x)`.
pub fn may_meet_gap_interval(lower: usize, upper: usize, x: usize, lambda: f64) -> bool {
    lower < x && upper as f64 >= x as f64 / lambda
}

/// The smallest grid point `x` such that each weight interval lies wholly
/// at or above `x` or wholly below `x / lambda`.
pub fn select_gap_threshold_bounds(
    weights: &[(usize, usize)],
    params: &DecompositionParams,
) -> Result<usize, GapError> {
    let grid = gap_grid(params);
    let blocks =
        |(lo, hi): (usize, usize), x: usize| may_meet_gap_interval(lo, hi, x, params.lambda);
    grid.iter()
        .copied()
        .find(|&x| !weights.iter().any(|&w| blocks(w, x)))
        .ok_or_else(|| {
            let mut blocking: Vec<usize> = weights
                .iter()
                .copied()
                .filter(|&w| grid.iter().any(|&x| blocks(w, x)))
                .map(|(lo, _)| lo)
                .collect();
            blocking.sort_unstable();
            blocking.dedup();
            GapError {
                s_lo: params.s_lo,
                s_hi: params.s_hi,
                grid: grid.clone(),
                blocking,
            }
        })
}

/// A weighted pair of cliques of one round, by index into the round's
/// family. `weight` has a witness; `upper` bounds the true weight and equals
/// it unless a search ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueWeight {
    pub a: usize,
    pub b: usize,
    pub weight: usize,
    pub upper: usize,
}

/// What one round saw and chose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAudit {
    pub active_size: usize,
    pub cliques: Vec<Vec<usize>>,
    /// False when the packing search ran out of budget before proving that
    /// no further clique fits.
    pub packing_certified: bool,
    pub weights: Vec<CliqueWeight>,
    pub s: usize,
    /// Indices of the cliques forming this round's snake.
    pub snake_cliques: Vec<usize>,
    /// `C_{j+1}`, sorted.
    pub cleaned: Vec<usize>,
}

/// One snake of the partition with its vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakePart {
    pub vertices: Vec<usize>,
    pub snake: Snake,
}

impl SnakePart {
    pub fn s(&self) -> usize {
        self.snake.s
    }
}

/// `V(G) = C ⊎ S_1 ⊎ ... ⊎ S_r` with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub order: usize,
    /// `C`, sorted.
    pub c: Vec<usize>,
    pub snakes: Vec<SnakePart>,
    /// `A_r`, the final active set (a subset of `C`).
    pub residual: Vec<usize>,
    pub audit: Vec<RoundAudit>,
    /// Whether the final search proved that `A_r` holds no red `m`-clique.
    pub residual_certified: bool,
}

impl Decomposition {
    pub fn snake_vertex_count(&self) -> usize {
        self.snakes.iter().map(|s| s.vertices.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decompositions serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("blue triangle {0:?}")]
    BlueTriangle([usize; 3]),
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamsError),
    #[error("round {round}: {source}")]
    NoGap { round: usize, source: GapError },
}

/// Weights and witnesses of clique pairs, kept across rounds: both depend
/// only on the two vertex sets.
#[derive(Default)]
struct WeightCache {
    known: HashMap<(Vec<usize>, Vec<usize>), BicliqueBounds>,
}

impl WeightCache {
    fn weigh(
        &mut self,
        g: &ColouredGraph,
        cliques: &[Vec<usize>],
        budget: Option<u64>,
    ) -> Vec<Vec<Option<BicliqueBounds>>> {
        let pairs: Vec<(usize, usize)> = (0..cliques.len())
            .flat_map(|a| (a + 1..cliques.len()).map(move |b| (a, b)))
            .collect();
        let missing: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(a, b)| {
                !self
                    .known
                    .contains_key(&(cliques[a].clone(), cliques[b].clone()))
            })
            .collect();
        let fresh: Vec<((usize, usize), BicliqueBounds)> = missing
            .par_iter()
            .map(|&(a, b)| {
                (
                    (a, b),
                    balanced_biclique_bounds(g, &cliques[a], &cliques[b], budget),
                )
            })
            .collect();
        for ((a, b), witness) in fresh {
            self.known
                .insert((cliques[a].clone(), cliques[b].clone()), witness);
        }
        let mut table = vec![vec![None; cliques.len()]; cliques.len()];
        for (a, b) in pairs {
            table[a][b] = Some(self.known[&(cliques[a].clone(), cliques[b].clone())].clone());
        }
        table
    }
}

/// Runs the rounds until no red `m`-clique is found in the active set.
pub fn decompose(
    g: &ColouredGraph,
    params: &DecompositionParams,
) -> Result<Decomposition, DecompositionError> {
    params.validate_for(g.order())?;
    if let Some(t) = g.find_blue_triangle() {
        return Err(DecompositionError::BlueTriangle(t));
    }
    let mut active = g.full_set();
    let mut c_set = FixedBitSet::with_capacity(g.order());
    let mut snakes = Vec::new();
    let mut audit = Vec::new();
    let mut cache = WeightCache::default();

    let residual_certified = loop {
        let family =
            max_disjoint_red_cliques_within_budget(g, &active, params.m, params.search_nodes);
        if family.is_empty() {
            break family.certified;
        }
        let round = audit.len();
        let active_size = active.count_ones(..);
        let packing_certified = family.certified;
        let cliques = family.cliques;
        let table = cache.weigh(g, &cliques, params.search_nodes);
        let mut weights = Vec::new();
        for (a, row) in table.iter().enumerate() {
            for (b, entry) in row.iter().enumerate() {
                if let Some(w) = entry {
                    weights.push(CliqueWeight {
                        a,
                        b,
                        weight: w.lower(),
                        upper: w.upper,
                    });
                }
            }
        }
        let values: Vec<(usize, usize)> = weights.iter().map(|w| (w.weight, w.upper)).collect();
        let s = select_gap_threshold_bounds(&values, params)
            .map_err(|source| DecompositionError::NoGap { round, source })?;

        let component = link_component(cliques.len(), &weights, s);
        let snake = build_snake(&cliques, &component, &table, s);
        let mut snake_set = FixedBitSet::with_capacity(g.order());
        snake_set.extend(snake.cliques.iter().flatten().copied());
        let clique_sets: Vec<FixedBitSet> = snake
            .cliques
            .iter()
            .map(|c| g.vertex_set(c.iter().copied()))
            .collect();
        let threshold = s as f64 / params.lambda;
        let mut cleaned = Vec::new();
        for v in active.ones() {
            if snake_set.contains(v) {
                continue;
            }
            if clique_sets
                .iter()
                .any(|m| g.blue_degree_into(v, m) as f64 >= threshold)
            {
                cleaned.push(v);
            }
        }

        let mut next_active = active.clone();
        next_active.difference_with(&snake_set);
        for &v in &cleaned {
            next_active.remove(v);
            c_set.insert(v);
        }
        check_round(g, params, &snake, &snake_set, &next_active, &cleaned);
        assert!(
            next_active.count_ones(..) < active_size,
            "active set must shrink"
        );

        snakes.push(SnakePart {
            vertices: snake_set.ones().collect(),
            snake,
        });
        audit.push(RoundAudit {
            active_size,
            cliques,
            packing_certified,
            weights,
            s,
            snake_cliques: component,
            cleaned,
        });
        active = next_active;
    };

    let residual: Vec<usize> = active.ones().collect();
    c_set.union_with(&active);
    Ok(Decomposition {
        order: g.order(),
        c: c_set.ones().collect(),
        snakes,
        residual,
        audit,
        residual_certified,
    })
}

/// Clique indices in the component of clique 0 in the link graph `w >= s`.
fn link_component(count: usize, weights: &[CliqueWeight], s: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); count];
    for w in weights.iter().filter(|w| w.weight >= s) {
        adj[w.a].push(w.b);
        adj[w.b].push(w.a);
    }
    let mut seen = vec![false; count];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    (0..count).filter(|&i| seen[i]).collect()
}

fn build_snake(
    cliques: &[Vec<usize>],
    component: &[usize],
    table: &[Vec<Option<BicliqueBounds>>],
    s: usize,
) -> Snake {
    let mut links = Vec::new();
    for (i, &a) in component.iter().enumerate() {
        for (j, &b) in component.iter().enumerate().skip(i + 1) {
            let bounds = table[a][b].as_ref().expect("pairs a < b are weighed");
            if bounds.lower() >= s {
                let w = bounds.witness.truncated(s);
                links.push(SnakeLink {
                    a: i,
                    b: j,
                    left: w.left,
                    right: w.right,
                });
            }
        }
    }
    Snake {
        s,
        cliques: component.iter().map(|&c| cliques[c].clone()).collect(),
        links,
    }
}

/// The per-round conditions: the snake is valid, surviving vertices send
/// fewer than `s / mu` blue edges into it, and set-aside vertices send at
/// most `2m` blue edges into what is left of the active set.
fn check_round(
    g: &ColouredGraph,
    params: &DecompositionParams,
    snake: &Snake,
    snake_set: &FixedBitSet,
    next_active: &FixedBitSet,
    cleaned: &[usize],
) {
    if let Err(v) = validate_snake(g, snake) {
        panic!("round produced an invalid snake: {v}");
    }
    let bound = snake.s as f64 / params.mu;
    for v in next_active.ones() {
        let count = g.blue_degree_into(v, snake_set);
        assert!(
            (count as f64) < bound,
            "vertex {v} keeps {count} blue edges into the new snake, bound {bound}"
        );
    }
    let mut rest = next_active.clone();
    rest.extend(cleaned.iter().copied());
    for &v in cleaned {
        let count = g.blue_degree_into(v, &rest);
        assert!(
            count <= 2 * params.m,
            "set-aside vertex {v} has {count} blue edges into the active set"
        );
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionViolation {
    #[error("the parts do not partition the {0} vertices")]
    NotPartition(usize),
    #[error("(a) e(G_B[C]) = {edges} exceeds {bound}")]
    DenseC { edges: usize, bound: f64 },
    #[error("(b) snake {index}: {source}")]
    InvalidSnake {
        index: usize,
        source: SnakeViolation,
    },
    #[error("(b) snake {index} does not span its vertex set or has the wrong clique size")]
    NotSpanning { index: usize },
    #[error("(b) snake {index} has s = {s} outside [{s_lo}, {s_hi}]")]
    ThresholdRange {
        index: usize,
        s: usize,
        s_lo: usize,
        s_hi: usize,
    },
    #[error("(c) vertex {vertex} of a later snake has {count} blue edges into snake {index}, bound {bound}")]
    LaterSnakeDegree {
        index: usize,
        vertex: usize,
        count: usize,
        bound: f64,
    },
    #[error(
        "maximality: vertex {vertex} has {count} >= m blue edges into the residual active set"
    )]
    Maximality { vertex: usize, count: usize },
    #[error("gap: vertex {vertex} set aside in round {round} has {count} blue edges into clique {clique}, outside the snake")]
    Gap {
        round: usize,
        vertex: usize,
        clique: usize,
        count: usize,
    },
}

/// Re-checks a decomposition from scratch.
pub fn verify_decomposition(
    g: &ColouredGraph,
    d: &Decomposition,
    params: &DecompositionParams,
) -> Result<(), DecompositionViolation> {
    let order = g.order();
    let mut seen = FixedBitSet::with_capacity(order);
    let mut count = 0;
    for &v in
        d.c.iter()
            .chain(d.snakes.iter().flat_map(|s| s.vertices.iter()))
    {
        if v >= order || seen.put(v) {
            return Err(DecompositionViolation::NotPartition(order));
        }
        count += 1;
    }
    if count != order || d.order != order {
        return Err(DecompositionViolation::NotPartition(order));
    }

    let c_set = g.vertex_set(d.c.iter().copied());
    let edges = g.blue_edges_within(&c_set);
    let bound = params.density * d.c.len() as f64;
    if edges as f64 > bound {
        return Err(DecompositionViolation::DenseC { edges, bound });
    }

    for (index, part) in d.snakes.iter().enumerate() {
        validate_snake(g, &part.snake)
            .map_err(|source| DecompositionViolation::InvalidSnake { index, source })?;
        let mut spanned: Vec<usize> = part.snake.vertices();
        spanned.dedup();
        let mut vertices = part.vertices.clone();
        vertices.sort_unstable();
        if spanned != vertices || part.snake.clique_size() != params.m {
            return Err(DecompositionViolation::NotSpanning { index });
        }
        if part.s() < params.s_lo || part.s() > params.s_hi {
            return Err(DecompositionViolation::ThresholdRange {
                index,
                s: part.s(),
                s_lo: params.s_lo,
                s_hi: params.s_hi,
            });
        }
    }
    for (index, part) in d.snakes.iter().enumerate() {
        let set = g.vertex_set(part.vertices.iter().copied());
        let bound = part.s() as f64 / params.mu;
        for later in &d.snakes[index + 1..] {
            for &vertex in &later.vertices {
                let count = g.blue_degree_into(vertex, &set);
                if count as f64 > bound {
                    return Err(DecompositionViolation::LaterSnakeDegree {
                        index,
                        vertex,
                        count,
                        bound,
                    });
                }
            }
        }
    }

    let residual = g.vertex_set(d.residual.iter().copied());
    for vertex in 0..order {
        let count = g.blue_degree_into(vertex, &residual);
        if count >= params.m {
            return Err(DecompositionViolation::Maximality { vertex, count });
        }
    }
    verify_gap_consequence(g, d, params)
}

/// For every vertex set aside in a round, its blue degree into each clique
/// of that round outside the snake stays below `s / lambda`.
pub fn verify_gap_consequence(
    g: &ColouredGraph,
    d: &Decomposition,
    params: &DecompositionParams,
) -> Result<(), DecompositionViolation> {
    for (round, entry) in d.audit.iter().enumerate() {
        let threshold = entry.s as f64 / params.lambda;
        for (clique, members) in entry.cliques.iter().enumerate() {
            if entry.snake_cliques.contains(&clique) {
                continue;
            }
            let set = g.vertex_set(members.iter().copied());
            for &vertex in &entry.cleaned {
                let count = g.blue_degree_into(vertex, &set);
                if count as f64 >= threshold {
                    return Err(DecompositionViolation::Gap {
                        round,
                        vertex,
                        clique,
                        count,
                    });
                }
            }
        }
    }
    Ok(())
}
