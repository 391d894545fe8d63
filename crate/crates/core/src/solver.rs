//! The end-to-end search for a red `Q_n`.
//!
//! After decomposing the colouring, the cube goes wherever there is more
//! room. If the sparse-blue part `C` holds at least half the vertices, its
//! few high-degree vertices are dropped and the dense embedder runs on the
//! rest. Otherwise the cube is cut into initial subcubes, each snake gets a
//! share proportional to its size, and the snakes are filled last to first,
//! every cube vertex avoiding the blue neighbours of its already placed
//! cube neighbours.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{
    decompose, verify_decomposition, Decomposition, DecompositionError, DecompositionParams,
};
use crate::dense::{dense_embed, DenseError, ThresholdSchedule};
use crate::generate::target_order;
use crate::graph::{verify_red_embedding, ColouredGraph, Embedding};
use crate::hypercube::{
    check_dimension, cube_neighbours, subcube_vertices, CubeVertex, HypercubeError, InitialSubcube,
};
use crate::snake::{snake_embed, ForbiddenSets, SnakeError, SnakeMode, SnakeRoute};

/// Every knob of [`solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Required excess: `v(G) >= ceil((1 + epsilon) 2^(n+1))`.
    pub epsilon: f64,
    /// Margin handed to the dense embedder.
    pub gamma: f64,
    pub schedule: ThresholdSchedule,
    pub decomp: DecompositionParams,
    /// Co-dimension of the subcubes shared out among snakes.
    pub codim_split: u32,
    /// Vertices of `C` with at least this many blue neighbours in `C` are
    /// removed before the dense embedder runs.
    pub high_degree_cutoff: usize,
    pub snake_mode: SnakeMode,
}

impl SolverParams {
    /// Small-`n` constants: `epsilon = 0.1`, `gamma = epsilon / 4`,
    /// schedule `[1, n - 2]`, the desk decomposition, subcubes of
    /// co-dimension 3 and cutoff `2^(n-1) + 1`.
    pub fn desk(n: u32) -> Self {
        let epsilon = 0.1;
        let b0 = 1;
        let top = n.saturating_sub(2).max(b0);
        SolverParams {
            epsilon,
            gamma: epsilon / 4.0,
            schedule: ThresholdSchedule { b: vec![b0, top] },
            decomp: DecompositionParams::desk(n),
            codim_split: 3.min(n),
            high_degree_cutoff: (1usize << (n - b0)) + 1,
            snake_mode: SnakeMode::Relaxed,
        }
    }

    /// The asymptotic constants, with `codim_split = 2d` and cutoff
    /// `2^n / log log log n`.
    pub fn asymptotic(n: u32) -> Self {
        let decomp = DecompositionParams::asymptotic(n);
        let d = n - decomp.m.trailing_zeros();
        let lll = {
            let mut x = f64::from(n.max(2));
            for _ in 0..3 {
                x = if x > 1.0 { x.log2() } else { 1.0 };
            }
            x.max(1.0)
        };
        let epsilon = 0.1;
        SolverParams {
            epsilon,
            gamma: epsilon / 4.0,
            schedule: ThresholdSchedule::iterated_log(n, 1),
            decomp,
            codim_split: (2 * d).min(n),
            high_degree_cutoff: ((1u64 << n) as f64 / lll).ceil() as usize,
            snake_mode: SnakeMode::Relaxed,
        }
    }

    pub fn validate(&self, n: u32) -> Result<(), String> {
        if !(self.epsilon > 0.0) {
            return Err(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(format!("gamma = {} must lie in (0, 1)", self.gamma));
        }
        if self.codim_split == 0 || self.codim_split > n {
            return Err(format!(
                "codim_split = {} must lie in [1, n = {n}]",
                self.codim_split
            ));
        }
        if self.high_degree_cutoff == 0 {
            return Err("high_degree_cutoff must be positive".to_string());
        }
        ThresholdSchedule::new(self.schedule.b.clone()).map_err(|e| e.to_string())?;
        self.decomp.validate().map_err(|e| e.to_string())
    }
}

/// Owner snake of each initial subcube of one co-dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcubeAssignment {
    pub codim: u32,
    /// `(subcube, snake index)` in prefix order.
    pub owners: Vec<(InitialSubcube, usize)>,
}

impl SubcubeAssignment {
    pub fn subcubes_of(&self, snake: usize) -> Vec<InitialSubcube> {
        self.owners
            .iter()
            .filter(|&&(_, j)| j == snake)
            .map(|&(x, _)| x)
            .collect()
    }

    /// `Q(j)`, in increasing order.
    pub fn cube_vertices_of(&self, snake: usize, n: u32) -> Vec<CubeVertex> {
        self.subcubes_of(snake)
            .iter()
            .flat_map(|x| subcube_vertices(x, n).expect("codim at most n"))
            .collect()
    }

    /// `floor(size / 2^(n-c)) - 1`, the most subcubes a snake of `size`
    /// vertices may receive.
    pub fn capacity(size: usize, n: u32, codim: u32) -> usize {
        (size >> (n - codim)).saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignError {
    #[error("snake capacities total {capacity} but {needed} subcubes of co-dimension {codim} need owners (deficit {})", .needed - .capacity)]
    Deficit {
        codim: u32,
        needed: usize,
        capacity: usize,
    },
    #[error("co-dimension {codim} exceeds n = {n}")]
    Codim { codim: u32, n: u32 },
}

/// Hands the `2^c` initial subcubes of co-dimension `c` to the snakes in
/// prefix order, filling snake 0 up to capacity, then snake 1, and so on.
pub fn assign_subcubes(
    snake_sizes: &[usize],
    n: u32,
    codim_split: u32,
) -> Result<SubcubeAssignment, AssignError> {
    if codim_split > n {
        return Err(AssignError::Codim {
            codim: codim_split,
            n,
        });
    }
    let needed = 1usize << codim_split;
    let caps: Vec<usize> = snake_sizes
        .iter()
        .map(|&size| SubcubeAssignment::capacity(size, n, codim_split))
        .collect();
    let capacity: usize = caps.iter().sum();
    if capacity < needed {
        return Err(AssignError::Deficit {
            codim: codim_split,
            needed,
            capacity,
        });
    }
    let mut owners = Vec::with_capacity(needed);
    let mut snake = 0;
    let mut taken = 0;
    for prefix in 0..needed as u32 {
        while taken == caps[snake] {
            snake += 1;
            taken = 0;
        }
        let x = InitialSubcube::new(prefix, codim_split).expect("prefix fits the co-dimension");
        owners.push((x, snake));
        taken += 1;
    }
    Ok(SubcubeAssignment {
        codim: codim_split,
        owners,
    })
}

/// `D_x` for each `x` in `qj`: the vertices of `sj` blue to the image of an
/// embedded cube neighbour of `x`.
pub fn forbidden_sets(
    g: &ColouredGraph,
    phi: &Embedding,
    qj: &[CubeVertex],
    sj: &FixedBitSet,
    n: u32,
) -> ForbiddenSets {
    let mut out = ForbiddenSets::new();
    for &x in qj {
        let mut set = FixedBitSet::with_capacity(g.order());
        for z in cube_neighbours(x, n) {
            if let Some(v) = phi.get(z) {
                set.union_with(g.blue_neighbours(v));
            }
        }
        set.intersect_with(sj);
        out.insert(x, set.ones().collect());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveCase {
    /// `|C| >= v(G) / 2`: dense embedding into `C` minus its high-degree
    /// vertices.
    Dense,
    /// The cube is spread over the snakes.
    Snakes,
}

/// A verified embedding with the evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub embedding: Embedding,
    pub case: SolveCase,
    pub decomposition: Decomposition,
    /// `C'`, the vertices removed from `C` in the dense case.
    pub high_degree: Vec<usize>,
    pub assignment: Option<SubcubeAssignment>,
    /// How each snake was filled, by snake index.
    pub snake_routes: Vec<SnakeRoute>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveHypothesis {
    #[error("{found} vertices, at least {required} needed")]
    TooFewVertices { required: usize, found: usize },
    #[error("blue triangle {0:?}")]
    BlueTriangle([usize; 3]),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Cube(#[from] HypercubeError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(#[from] SolveHypothesis),
    #[error("decomposition: {0}")]
    Decompose(DecompositionError),
    #[error("subcube assignment: {0}")]
    Assign(#[from] AssignError),
    #[error("dense case on {available} vertices ({removed} high-degree removed): {source}")]
    Dense {
        available: usize,
        removed: usize,
        source: DenseError,
    },
    #[error("snake {snake} of {count}: {source}")]
    Snake {
        snake: usize,
        count: usize,
        source: SnakeError,
    },
}

impl SolveError {
    /// Short name of the stage that stopped, `"hypothesis"` when the input
    /// itself was rejected.
    pub fn stage(&self) -> &'static str {
        match self {
            SolveError::Hypothesis(_) => "hypothesis",
            SolveError::Decompose(DecompositionError::BlueTriangle(_)) => "hypothesis",
            SolveError::Decompose(DecompositionError::Params(_)) => "hypothesis",
            SolveError::Decompose(_) => "decompose",
            SolveError::Assign(_) => "assign",
            SolveError::Dense {
                source: DenseError::Hypothesis(_),
                ..
            } => "dense-hypothesis",
            SolveError::Dense { .. } => "dense",
            SolveError::Snake { .. } => "snake",
        }
    }

    pub fn is_hypothesis(&self) -> bool {
        self.stage() == "hypothesis"
    }
}

/// Looks for a red `Q_n` in `g`. Any embedding returned has been re-checked
/// edge by edge.
pub fn solve(g: &ColouredGraph, n: u32, params: &SolverParams) -> Result<Solution, SolveError> {
    check_dimension(n).map_err(SolveHypothesis::Cube)?;
    params.validate(n).map_err(SolveHypothesis::Params)?;
    let required = target_order(n, params.epsilon);
    if g.order() < required {
        return Err(SolveHypothesis::TooFewVertices {
            required,
            found: g.order(),
        }
        .into());
    }
    if let Some(t) = g.find_blue_triangle() {
        return Err(SolveHypothesis::BlueTriangle(t).into());
    }
    let decomposition = decompose(g, &params.decomp).map_err(SolveError::Decompose)?;
    if let Err(v) = verify_decomposition(g, &decomposition, &params.decomp) {
        panic!("decomposition failed its own certificate: {v}");
    }

    let solution = if 2 * decomposition.c.len() >= g.order() {
        solve_dense(g, n, params, decomposition)?
    } else {
        solve_snakes(g, n, params, decomposition)?
    };
    if let Err(v) = verify_red_embedding(g, n, &solution.embedding) {
        panic!("assembled embedding failed verification: {v}");
    }
    Ok(solution)
}

fn solve_dense(
    g: &ColouredGraph,
    n: u32,
    params: &SolverParams,
    decomposition: Decomposition,
) -> Result<Solution, SolveError> {
    let c_set = g.vertex_set(decomposition.c.iter().copied());
    let (high_degree, kept): (Vec<usize>, Vec<usize>) = decomposition
        .c
        .iter()
        .partition(|&&v| g.blue_degree_into(v, &c_set) >= params.high_degree_cutoff);
    let h = g.induced(&kept);
    let run =
        dense_embed(&h, n, params.gamma, &params.schedule).map_err(|source| SolveError::Dense {
            available: kept.len(),
            removed: high_degree.len(),
            source,
        })?;
    Ok(Solution {
        embedding: run.embedding.relabel(&kept),
        case: SolveCase::Dense,
        decomposition,
        high_degree,
        assignment: None,
        snake_routes: Vec::new(),
    })
}

fn solve_snakes(
    g: &ColouredGraph,
    n: u32,
    params: &SolverParams,
    decomposition: Decomposition,
) -> Result<Solution, SolveError> {
    let sizes: Vec<usize> = decomposition
        .snakes
        .iter()
        .map(|s| s.vertices.len())
        .collect();
    let assignment = assign_subcubes(&sizes, n, params.codim_split)?;
    let count = decomposition.snakes.len();
    let mut phi = Embedding::empty(n).map_err(SolveHypothesis::Cube)?;
    let mut routes = vec![SnakeRoute::Walk; count];
    let mut all_forbidden = Vec::with_capacity(count);

    for j in (0..count).rev() {
        let part = &decomposition.snakes[j];
        let qj = assignment.cube_vertices_of(j, n);
        if qj.is_empty() {
            continue;
        }
        let sj = g.vertex_set(part.vertices.iter().copied());
        let forbidden = forbidden_sets(g, &phi, &qj, &sj, n);
        let max_into = phi
            .pairs()
            .map(|(_, v)| g.blue_degree_into(v, &sj))
            .max()
            .unwrap_or(0);
        assert!(
            forbidden.max_size() <= params.codim_split as usize * max_into,
            "snake {j}: a forbidden set of {} exceeds {} embedded neighbours times {max_into}",
            forbidden.max_size(),
            params.codim_split
        );
        let placed = snake_embed(g, &part.snake, &qj, &forbidden, n, params.snake_mode).map_err(
            |source| SolveError::Snake {
                snake: j,
                count,
                source,
            },
        )?;
        routes[j] = placed.route;
        phi.absorb(&placed.embedding);
        all_forbidden.push(forbidden);
    }

    for forbidden in &all_forbidden {
        for (x, _) in forbidden.iter() {
            let v = phi.get(x).expect("every assigned cube vertex is placed");
            assert!(
                !forbidden.forbids(x, v),
                "{} sits on a forbidden vertex",
                x.to_word(n)
            );
        }
    }
    Ok(Solution {
        embedding: phi,
        case: SolveCase::Snakes,
        decomposition,
        high_degree: Vec::new(),
        assignment: Some(assignment),
        snake_routes: routes,
    })
}
