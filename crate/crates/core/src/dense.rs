//! Embedding `Q_n` into colourings with few blue edges.
//!
//! The cube is cut into initial subcubes, each matched to a red clique of
//! slightly more than its size ([`PartialAssignment`]). Cliques are peeled
//! off blue neighbourhoods by [`extend_or_clean`] until every vertex has low
//! blue degree into what is left; the subcubes are then embedded into their
//! cliques and the rest of the cube is placed greedily in the leftover set.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{verify_red_embedding, ColouredGraph, Embedding};
use crate::hypercube::{
    bandwidth_order, cube_order, cube_vertices, partition_complement, CubeVertex, HypercubeError,
    InitialSubcube, SubcubeFamily,
};

/// One matched pair: the subcube `Q_x` and the red clique `S` reserved for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    pub subcube: InitialSubcube,
    pub set: Vec<usize>,
}

impl AssignmentEntry {
    pub fn codim(&self) -> u32 {
        self.subcube.codim()
    }
}

/// A sequence of subcube/clique pairs with the density margin `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialAssignment {
    pub gamma: f64,
    pub entries: Vec<AssignmentEntry>,
}

/// `ceil((1 + gamma) * 2^(n - codim))`.
pub fn required_set_size(gamma: f64, n: u32, codim: u32) -> usize {
    ((1.0 + gamma) * (1u64 << (n - codim)) as f64).ceil() as usize
}

/// Whether `count` blue edges into the set of entry with co-dimension
/// `codim` stay within the allowance `(gamma / codim) * 2^(n - codim)`.
fn within_allowance(count: usize, gamma: f64, n: u32, codim: u32) -> bool {
    codim == 0 || (count as f64) * f64::from(codim) <= gamma * (1u64 << (n - codim)) as f64
}

impl PartialAssignment {
    pub fn new(gamma: f64) -> Self {
        PartialAssignment {
            gamma,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn subcubes(&self) -> Vec<InitialSubcube> {
        self.entries.iter().map(|e| e.subcube).collect()
    }

    /// Number of cube vertices covered by the subcubes.
    pub fn covered(&self, n: u32) -> usize {
        self.entries.iter().map(|e| e.subcube.size(n)).sum()
    }

    pub fn covers_cube(&self, n: u32) -> bool {
        self.covered(n) == cube_order(n)
    }

    pub fn used_vertices(&self, order: usize) -> FixedBitSet {
        let mut used = FixedBitSet::with_capacity(order);
        used.extend(self.entries.iter().flat_map(|e| e.set.iter().copied()));
        used
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignmentViolation {
    #[error("gamma {0} is not in (0, 1)")]
    GammaOutOfRange(f64),
    #[error("(a) co-dimension of entry {index} is smaller than the one before it")]
    CodimOutOfOrder { index: usize },
    #[error("(a) entry {index} has co-dimension {codim} > n = {n}")]
    CodimExceedsDimension { index: usize, codim: u32, n: u32 },
    #[error("(b) set {index} has {found} vertices, expected {expected}")]
    WrongSetSize {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("(b) set {index} contains vertex {vertex} outside the graph")]
    VertexOutOfRange { index: usize, vertex: usize },
    #[error("(b) vertex {vertex} appears in sets {first} and {second}")]
    SetsOverlap {
        first: usize,
        second: usize,
        vertex: usize,
    },
    #[error("(c) subcubes {first} and {second} overlap")]
    SubcubesOverlap { first: usize, second: usize },
    #[error("set {index} is not a red clique: {edge:?} is blue")]
    NotRedClique { index: usize, edge: (usize, usize) },
    #[error(
        "(2.1) vertex {vertex} of set {later} has {count} blue neighbours in set {earlier}, allowance {allowance:.3}"
    )]
    BlueDegree {
        earlier: usize,
        later: usize,
        vertex: usize,
        count: usize,
        allowance: f64,
    },
}

impl AssignmentViolation {
    /// The violated clause: `"a"`, `"b"`, `"c"`, `"clique"`, `"2.1"` or `"gamma"`.
    pub fn clause(&self) -> &'static str {
        match self {
            AssignmentViolation::GammaOutOfRange(_) => "gamma",
            AssignmentViolation::CodimOutOfOrder { .. }
            | AssignmentViolation::CodimExceedsDimension { .. } => "a",
            AssignmentViolation::WrongSetSize { .. }
            | AssignmentViolation::VertexOutOfRange { .. }
            | AssignmentViolation::SetsOverlap { .. } => "b",
            AssignmentViolation::SubcubesOverlap { .. } => "c",
            AssignmentViolation::NotRedClique { .. } => "clique",
            AssignmentViolation::BlueDegree { .. } => "2.1",
        }
    }
}

/// Checks every defining condition of a partial assignment of `Q_n` into `h`.
pub fn check_partial_assignment(
    h: &ColouredGraph,
    pa: &PartialAssignment,
    n: u32,
) -> Result<(), AssignmentViolation> {
    if !(pa.gamma > 0.0 && pa.gamma < 1.0) {
        return Err(AssignmentViolation::GammaOutOfRange(pa.gamma));
    }
    let mut owner = vec![usize::MAX; h.order()];
    for (index, entry) in pa.entries.iter().enumerate() {
        let codim = entry.codim();
        if codim > n {
            return Err(AssignmentViolation::CodimExceedsDimension { index, codim, n });
        }
        if index > 0 && pa.entries[index - 1].codim() > codim {
            return Err(AssignmentViolation::CodimOutOfOrder { index });
        }
        let expected = required_set_size(pa.gamma, n, codim);
        if entry.set.len() != expected {
            return Err(AssignmentViolation::WrongSetSize {
                index,
                expected,
                found: entry.set.len(),
            });
        }
        for &vertex in &entry.set {
            if vertex >= h.order() {
                return Err(AssignmentViolation::VertexOutOfRange { index, vertex });
            }
            if owner[vertex] != usize::MAX {
                return Err(AssignmentViolation::SetsOverlap {
                    first: owner[vertex],
                    second: index,
                    vertex,
                });
            }
            owner[vertex] = index;
        }
        if let Some(first) = pa.entries[..index]
            .iter()
            .position(|e| !e.subcube.is_disjoint(&entry.subcube))
        {
            return Err(AssignmentViolation::SubcubesOverlap {
                first,
                second: index,
            });
        }
        if let Some(edge) = blue_edge_inside(h, &entry.set) {
            return Err(AssignmentViolation::NotRedClique { index, edge });
        }
    }
    for (later, entry) in pa.entries.iter().enumerate() {
        for (earlier, prior) in pa.entries[..later].iter().enumerate() {
            if !prior.subcube.is_adjacent(&entry.subcube) {
                continue;
            }
            let prior_set = h.vertex_set(prior.set.iter().copied());
            for &vertex in &entry.set {
                let count = h.blue_degree_into(vertex, &prior_set);
                if !within_allowance(count, pa.gamma, n, prior.codim()) {
                    return Err(AssignmentViolation::BlueDegree {
                        earlier,
                        later,
                        vertex,
                        count,
                        allowance: pa.gamma / f64::from(prior.codim())
                            * (1u64 << (n - prior.codim())) as f64,
                    });
                }
            }
        }
    }
    Ok(())
}

fn blue_edge_inside(h: &ColouredGraph, set: &[usize]) -> Option<(usize, usize)> {
    let members = h.vertex_set(set.iter().copied());
    set.iter().find_map(|&u| {
        h.blue_neighbours(u)
            .intersection(&members)
            .next()
            .map(|v| (u.min(v), u.max(v)))
    })
}

/// Hypotheses the dense embedder requires of its input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DenseHypothesis {
    #[error("gamma {0} is not in (0, 1)")]
    Gamma(f64),
    #[error("{found} vertices, at least {required} needed")]
    TooFewVertices { required: usize, found: usize },
    #[error("vertex {vertex} has blue degree {degree} > {bound}")]
    BlueDegree {
        vertex: usize,
        degree: usize,
        bound: usize,
    },
    #[error("threshold schedule: {0}")]
    Schedule(String),
    #[error("the active set meets the assigned cliques at vertex {0}")]
    ActiveSetOverlaps(usize),
    #[error("the assigned subcubes already cover the cube")]
    CubeCovered,
    #[error("parameter a = {0} must be at least 1")]
    DepthBelowOne(u32),
    #[error("co-dimension b = {b} must lie between {low} and n = {n}")]
    CodimRange { b: u32, low: u32, n: u32 },
    #[error("vertex {vertex} of an assigned clique has {count} blue neighbours in the active set, bound {bound}")]
    BlueIntoActive {
        vertex: usize,
        count: usize,
        bound: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenseStage {
    Cleaning,
    PartialEmbedding,
    Completion,
}

/// Why the dense embedder stopped, with the counting slack
/// `|C| - (cube vertices left for C) - n * (largest blue degree into C)`
/// evaluated when it stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseFailure {
    pub stage: DenseStage,
    pub j: usize,
    pub ell: usize,
    pub slack: i64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DenseError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(DenseHypothesis),
    #[error("invalid partial assignment: {0}")]
    InvalidAssignment(AssignmentViolation),
    #[error("blue triangle {0:?}")]
    BlueTriangle([usize; 3]),
    #[error("dense embedding failed at {:?} (j = {}, l = {}, slack {}): {}", .0.stage, .0.j, .0.ell, .0.slack, .0.detail)]
    Failure(DenseFailure),
    #[error(transparent)]
    Cube(#[from] HypercubeError),
}

/// Embeds every subcube `Q_{x_i}` into its clique `S_i`, last entry first,
/// choosing for each cube vertex the lowest free vertex of `S_i` that is not
/// blue to an already embedded cube neighbour.
pub fn embed_partial_assignment(
    h: &ColouredGraph,
    pa: &PartialAssignment,
    n: u32,
) -> Result<Embedding, DenseError> {
    check_partial_assignment(h, pa, n).map_err(DenseError::InvalidAssignment)?;
    let mut phi = Embedding::empty(n)?;
    let mut used = FixedBitSet::with_capacity(h.order());
    for (index, entry) in pa.entries.iter().enumerate().rev() {
        let mut set = entry.set.clone();
        set.sort_unstable();
        for x in entry.subcube.word_range(n)?.map(CubeVertex) {
            let v =
                lowest_compatible(h, &phi, x, n, set.iter().copied(), &used).ok_or_else(|| {
                    DenseError::Failure(DenseFailure {
                        stage: DenseStage::PartialEmbedding,
                        j: 0,
                        ell: index,
                        slack: 0,
                        detail: format!("no room for {} in set {index}", x.to_word(n)),
                    })
                })?;
            used.insert(v);
            phi.set(x, v);
        }
    }
    Ok(phi)
}

/// First vertex from `candidates` that is unused and red to the image of
/// every embedded cube neighbour of `x`.
pub(crate) fn lowest_compatible(
    h: &ColouredGraph,
    phi: &Embedding,
    x: CubeVertex,
    n: u32,
    candidates: impl IntoIterator<Item = usize>,
    used: &FixedBitSet,
) -> Option<usize> {
    let images: Vec<usize> = (0..n)
        .filter_map(|bit| phi.get(CubeVertex(x.0 ^ (1 << bit))))
        .collect();
    candidates
        .into_iter()
        .find(|&v| !used.contains(v) && images.iter().all(|&w| !h.is_blue(v, w)))
}

/// Outcome of one application of [`extend_or_clean`].
#[derive(Debug, Clone, PartialEq)]
pub enum Extension {
    /// The assignment with one more entry, of co-dimension `b`, inside `A`.
    Extended(PartialAssignment),
    /// A set `C ⊆ A` into which every vertex sends fewer than `2^(n-b+1)`
    /// blue edges, with `|C| >= |A| - (b^2 / gamma) 2^(n-a+1)`.
    Cleaned(Vec<usize>),
}

/// Either extends `pa` by a clique inside `active` matched to the first
/// free co-dimension-`b` subcube, or cleans `active` of the vertices with
/// high blue degree into neighbouring cliques.
pub fn extend_or_clean(
    h: &ColouredGraph,
    pa: &PartialAssignment,
    active: &[usize],
    a: u32,
    b: u32,
    n: u32,
) -> Result<Extension, DenseError> {
    check_partial_assignment(h, pa, n).map_err(DenseError::InvalidAssignment)?;
    let hypothesis = |hyp| Err(DenseError::Hypothesis(hyp));
    let used = pa.used_vertices(h.order());
    if let Some(&v) = active.iter().find(|&&v| used.contains(v)) {
        return hypothesis(DenseHypothesis::ActiveSetOverlaps(v));
    }
    if pa.covers_cube(n) {
        return hypothesis(DenseHypothesis::CubeCovered);
    }
    if a < 1 {
        return hypothesis(DenseHypothesis::DepthBelowOne(a));
    }
    let low = pa.entries.last().map_or(0, AssignmentEntry::codim);
    if b < low || b > n {
        return hypothesis(DenseHypothesis::CodimRange { b, low, n });
    }
    let active_set = h.vertex_set(active.iter().copied());
    let bound = 1usize << (n - a.min(n));
    for v in used.ones() {
        let count = h.blue_degree_into(v, &active_set);
        if count > bound {
            return hypothesis(DenseHypothesis::BlueIntoActive {
                vertex: v,
                count,
                bound,
            });
        }
    }

    let family = SubcubeFamily::new(n, pa.subcubes())?;
    let y = partition_complement(&family, b)?
        .into_iter()
        .next()
        .expect("an uncovered cube has a free subcube at every co-dimension >= d_m");

    let mut cleaned = active_set.clone();
    for entry in pa.entries.iter().filter(|e| e.subcube.is_adjacent(&y)) {
        let set = h.vertex_set(entry.set.iter().copied());
        for v in active_set.ones() {
            let count = h.blue_degree_into(v, &set);
            let high = (count as f64) * f64::from(entry.codim())
                >= pa.gamma * (1u64 << (n - entry.codim())) as f64;
            if high {
                cleaned.remove(v);
            }
        }
    }

    let threshold = 1usize << (n + 1 - b);
    let size = required_set_size(pa.gamma, n, b);
    for u in 0..h.order() {
        if h.blue_degree_into(u, &cleaned) < threshold {
            continue;
        }
        let set: Vec<usize> = h
            .blue_neighbours(u)
            .intersection(&cleaned)
            .take(size)
            .collect();
        if let Some((v, w)) = blue_edge_inside(h, &set) {
            return Err(DenseError::BlueTriangle(sorted_triple(u, v, w)));
        }
        let mut extended = pa.clone();
        extended.entries.push(AssignmentEntry { subcube: y, set });
        return Ok(Extension::Extended(extended));
    }
    Ok(Extension::Cleaned(cleaned.ones().collect()))
}

fn sorted_triple(u: usize, v: usize, w: usize) -> [usize; 3] {
    let mut t = [u, v, w];
    t.sort_unstable();
    t
}

/// Nondecreasing co-dimension thresholds `b_0 <= ... <= b_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    pub b: Vec<u32>,
}

impl ThresholdSchedule {
    pub fn new(b: Vec<u32>) -> Result<Self, DenseHypothesis> {
        if b.len() < 2 {
            return Err(DenseHypothesis::Schedule(
                "needs at least b_0 and b_1".to_string(),
            ));
        }
        if b[0] < 1 {
            return Err(DenseHypothesis::Schedule(
                "b_0 must be at least 1".to_string(),
            ));
        }
        if b.windows(2).any(|w| w[0] > w[1]) {
            return Err(DenseHypothesis::Schedule(format!(
                "{b:?} is not nondecreasing"
            )));
        }
        Ok(ThresholdSchedule { b })
    }

    /// Number of cleaning stages, `k + 1`.
    pub fn stages(&self) -> usize {
        self.b.len() - 1
    }

    /// `b_j = ceil(3 log_{(k-j+2)} n)`, clamped to `[1, n - 1]` and made
    /// nondecreasing. The formula only separates stages for astronomically
    /// large `n`.
    pub fn iterated_log(n: u32, k: usize) -> Self {
        let top = n.saturating_sub(1).max(1);
        let mut b: Vec<u32> = (0..=k + 1)
            .map(|j| {
                let mut value = f64::from(n);
                for _ in 0..(k + 2 - j) {
                    value = if value > 1.0 { value.log2() } else { 0.0 };
                }
                ((3.0 * value).ceil() as u32).clamp(1, top)
            })
            .collect();
        for i in 1..b.len() {
            b[i] = b[i].max(b[i - 1]);
        }
        ThresholdSchedule { b }
    }
}

/// What [`dense_embed`] built on its way to the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseRun {
    pub embedding: Embedding,
    pub assignment: PartialAssignment,
    /// The leftover set the residual cube was embedded into.
    pub cleaned: Vec<usize>,
}

/// Embeds `Q_n` into the red graph of `h`, or explains where it ran out.
pub fn dense_embed(
    h: &ColouredGraph,
    n: u32,
    gamma: f64,
    schedule: &ThresholdSchedule,
) -> Result<DenseRun, DenseError> {
    let hypothesis = |hyp| Err(DenseError::Hypothesis(hyp));
    if !(gamma > 0.0 && gamma < 1.0) {
        return hypothesis(DenseHypothesis::Gamma(gamma));
    }
    crate::hypercube::check_dimension(n)?;
    let required = ((1.0 + 3.0 * gamma) * (1u64 << n) as f64).ceil() as usize;
    if h.order() < required {
        return hypothesis(DenseHypothesis::TooFewVertices {
            required,
            found: h.order(),
        });
    }
    let top = *schedule.b.last().expect("schedules are non-empty");
    if top + 1 > n {
        return hypothesis(DenseHypothesis::Schedule(format!(
            "b_(k+1) + 1 = {} exceeds n = {n}",
            top + 1
        )));
    }
    let degree_bound = 1usize << (n - schedule.b[0]);
    if let Some(vertex) = (0..h.order()).find(|&v| h.blue_degree(v) > degree_bound) {
        return hypothesis(DenseHypothesis::BlueDegree {
            vertex,
            degree: h.blue_degree(vertex),
            bound: degree_bound,
        });
    }
    if let Some(t) = h.find_blue_triangle() {
        return Err(DenseError::BlueTriangle(t));
    }

    let mut pa = PartialAssignment::new(gamma);
    let mut active: Vec<usize> = (0..h.order()).collect();
    let (mut j, mut ell) = (1usize, 0usize);
    while !pa.covers_cube(n) && j <= schedule.stages() {
        let (a, b) = (schedule.b[j - 1], schedule.b[j] + 1);
        match extend_or_clean(h, &pa, &active, a, b, n) {
            Ok(Extension::Extended(next)) => {
                let added = h.vertex_set(
                    next.entries
                        .last()
                        .expect("one entry added")
                        .set
                        .iter()
                        .copied(),
                );
                active.retain(|&v| !added.contains(v));
                pa = next;
                ell += 1;
            }
            Ok(Extension::Cleaned(c)) => {
                active = c;
                j += 1;
            }
            Err(DenseError::Hypothesis(hyp)) => {
                return Err(DenseError::Failure(DenseFailure {
                    stage: DenseStage::Cleaning,
                    j,
                    ell,
                    slack: completion_slack(h, &active, cube_order(n) - pa.covered(n), n),
                    detail: hyp.to_string(),
                }));
            }
            Err(e) => return Err(e),
        }
    }

    let mut phi = embed_partial_assignment(h, &pa, n)?;
    let residual = bandwidth_order(cube_vertices(n).filter(|&x| !phi.is_defined(x)));
    let slack = completion_slack(h, &active, residual.len(), n);
    let mut used = pa.used_vertices(h.order());
    for (placed, &x) in residual.iter().enumerate() {
        match lowest_compatible(h, &phi, x, n, active.iter().copied(), &used) {
            Some(v) => {
                used.insert(v);
                phi.set(x, v);
            }
            None => {
                debug_assert!(
                    slack < 0,
                    "greedy completion cannot fail with slack {slack}"
                );
                return Err(DenseError::Failure(DenseFailure {
                    stage: DenseStage::Completion,
                    j,
                    ell,
                    slack,
                    detail: format!(
                        "no room for {} after placing {placed} of {} residual cube vertices in |C| = {}",
                        x.to_word(n),
                        residual.len(),
                        active.len()
                    ),
                }));
            }
        }
    }
    if let Err(violation) = verify_red_embedding(h, n, &phi) {
        panic!("dense embedding failed verification: {violation}");
    }
    Ok(DenseRun {
        embedding: phi,
        assignment: pa,
        cleaned: active,
    })
}

/// `|C| - remaining - n * max_v |N_B(v) ∩ C|`; the greedy completion into
/// `C` cannot get stuck while this is positive.
fn completion_slack(h: &ColouredGraph, cleaned: &[usize], remaining: usize, n: u32) -> i64 {
    let set = h.vertex_set(cleaned.iter().copied());
    let max_into = (0..h.order())
        .map(|v| h.blue_degree_into(v, &set))
        .max()
        .unwrap_or(0);
    cleaned.len() as i64 - remaining as i64 - i64::from(n) * max_into as i64
}
