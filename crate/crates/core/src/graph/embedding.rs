use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::io::ParseError;
use super::ColouredGraph;
use crate::hypercube::{check_dimension, cube_order, CubeVertex, HypercubeError};

/// A map from cube vertices to graph vertices, possibly partial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    dimension: u32,
    image: Vec<Option<usize>>,
}

impl Embedding {
    pub fn empty(dimension: u32) -> Result<Self, HypercubeError> {
        check_dimension(dimension)?;
        Ok(Embedding {
            dimension,
            image: vec![None; cube_order(dimension)],
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn get(&self, x: CubeVertex) -> Option<usize> {
        self.image.get(x.index()).copied().flatten()
    }

    pub fn set(&mut self, x: CubeVertex, v: usize) {
        self.image[x.index()] = Some(v);
    }

    pub fn is_defined(&self, x: CubeVertex) -> bool {
        self.get(x).is_some()
    }

    pub fn defined_count(&self) -> usize {
        self.image.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.image.iter().all(Option::is_some)
    }

    /// Defined pairs in increasing cube-vertex order.
    pub fn pairs(&self) -> impl Iterator<Item = (CubeVertex, usize)> + '_ {
        self.image
            .iter()
            .enumerate()
            .filter_map(|(x, v)| v.map(|v| (CubeVertex(x as u32), v)))
    }

    /// Copies every defined pair of `other` into `self`.
    pub fn absorb(&mut self, other: &Embedding) {
        assert_eq!(self.dimension, other.dimension);
        for (x, v) in other.pairs() {
            self.set(x, v);
        }
    }

    /// Relabels graph vertices through `map`, e.g. back from an induced subgraph.
    pub fn relabel(&self, map: &[usize]) -> Embedding {
        Embedding {
            dimension: self.dimension,
            image: self.image.iter().map(|v| v.map(|v| map[v])).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingViolation {
    #[error("embedding is for Q_{found}, expected Q_{expected}")]
    DimensionMismatch { expected: u32, found: u32 },
    #[error("cube vertex {0:?} has no image")]
    Undefined(CubeVertex),
    #[error("cube vertex {cube:?} maps to {vertex}, outside the graph")]
    OutOfRange { cube: CubeVertex, vertex: usize },
    #[error("cube vertices {first:?} and {second:?} both map to {vertex}")]
    NotInjective {
        first: CubeVertex,
        second: CubeVertex,
        vertex: usize,
    },
    #[error("cube edge {0:?}-{1:?} maps to a blue edge")]
    BlueEdge(CubeVertex, CubeVertex),
}

/// Checks that `phi` is total on `Q_n`, injective, and sends every cube
/// edge to a red edge of `g`.
pub fn verify_red_embedding(
    g: &ColouredGraph,
    n: u32,
    phi: &Embedding,
) -> Result<(), EmbeddingViolation> {
    if phi.dimension != n {
        return Err(EmbeddingViolation::DimensionMismatch {
            expected: n,
            found: phi.dimension,
        });
    }
    if let Some(x) = phi.image.iter().position(Option::is_none) {
        return Err(EmbeddingViolation::Undefined(CubeVertex(x as u32)));
    }
    verify_partial_embedding(g, phi)
}

/// As [`verify_red_embedding`], restricted to the defined part of `phi`.
pub fn verify_partial_embedding(
    g: &ColouredGraph,
    phi: &Embedding,
) -> Result<(), EmbeddingViolation> {
    let mut preimage: Vec<Option<CubeVertex>> = vec![None; g.order()];
    for (x, v) in phi.pairs() {
        if v >= g.order() {
            return Err(EmbeddingViolation::OutOfRange { cube: x, vertex: v });
        }
        if let Some(first) = preimage[v] {
            return Err(EmbeddingViolation::NotInjective {
                first,
                second: x,
                vertex: v,
            });
        }
        preimage[v] = Some(x);
    }
    for (x, v) in phi.pairs() {
        for bit in 0..phi.dimension {
            let y = CubeVertex(x.0 ^ (1 << bit));
            if y > x {
                if let Some(w) = phi.get(y) {
                    if !g.is_red(v, w) {
                        return Err(EmbeddingViolation::BlueEdge(x, y));
                    }
                }
            }
        }
    }
    Ok(())
}

/// One `cube_vertex graph_vertex` line per defined pair, the cube vertex
/// written as its `n`-character word.
pub fn format_embedding(phi: &Embedding) -> String {
    let mut out = String::new();
    for (x, v) in phi.pairs() {
        writeln!(out, "{} {v}", x.to_word(phi.dimension)).expect("writing to a String");
    }
    out
}

pub fn parse_embedding(text: &str, n: u32) -> Result<Embedding, ParseError> {
    let mut phi = Embedding::empty(n).map_err(|e| ParseError::new(1, e.to_string()))?;
    for (i, body) in text.lines().enumerate() {
        let line = i + 1;
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let mut fields = body.split_whitespace();
        let (Some(word), Some(vertex), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(ParseError::new(line, "expected `cube_vertex graph_vertex`"));
        };
        let x = match CubeVertex::parse_word(word) {
            Some((x, len)) if len == n => x,
            _ => {
                return Err(ParseError::new(
                    line,
                    format!("bad cube vertex {word:?} for Q_{n}"),
                ))
            }
        };
        let v: usize = vertex
            .parse()
            .map_err(|_| ParseError::new(line, format!("bad graph vertex {vertex:?}")))?;
        if phi.is_defined(x) {
            return Err(ParseError::new(
                line,
                format!("cube vertex {word} listed twice"),
            ));
        }
        phi.set(x, v);
    }
    Ok(phi)
}
