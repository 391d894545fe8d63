//! Vertices, initial subcubes and level orderings of the hypercube `Q_n`.
//!
//! A cube vertex is an `n`-bit word `y_1 y_2 ... y_n`. Coordinate 1 is stored
//! in the most significant of the `n` bits, so the word printed by
//! [`CubeVertex::to_word`] reads left to right as `y_1 ... y_n` and every
//! initial subcube is a contiguous range of integers.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported cube dimension. Vertex words must fit in a `u32`, and
/// anything near this size is far beyond what the embedders can hold anyway.
pub const MAX_DIMENSION: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypercubeError {
    #[error("dimension {n} exceeds the supported maximum {MAX_DIMENSION}")]
    DimensionTooLarge { n: u32 },
    #[error("co-dimension {codim} exceeds the cube dimension {n}")]
    CodimExceedsDimension { codim: u32, n: u32 },
    #[error("prefix {prefix} does not fit in {codim} coordinates")]
    PrefixOutOfRange { prefix: u32, codim: u32 },
    #[error("subcubes {first} and {second} overlap")]
    OverlappingMembers {
        first: InitialSubcube,
        second: InitialSubcube,
    },
    #[error("target co-dimension {target} is below the co-dimension of member {member}")]
    TargetBelowMember { target: u32, member: InitialSubcube },
}

pub(crate) fn check_dimension(n: u32) -> Result<(), HypercubeError> {
    if n > MAX_DIMENSION {
        Err(HypercubeError::DimensionTooLarge { n })
    } else {
        Ok(())
    }
}

/// A vertex of `Q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CubeVertex(pub u32);

impl CubeVertex {
    /// Number of ones in the word, i.e. the level of the vertex.
    pub fn level(self) -> u32 {
        self.0.count_ones()
    }

    /// Coordinate `i` (1-based) of the vertex in `Q_n`.
    pub fn coordinate(self, i: u32, n: u32) -> bool {
        debug_assert!(i >= 1 && i <= n);
        (self.0 >> (n - i)) & 1 == 1
    }

    /// The word `y_1 ... y_n` as a string of `0`/`1`.
    pub fn to_word(self, n: u32) -> String {
        (1..=n)
            .map(|i| if self.coordinate(i, n) { '1' } else { '0' })
            .collect()
    }

    /// Parses a word of `0`/`1` characters; the dimension is its length.
    pub fn parse_word(word: &str) -> Option<(CubeVertex, u32)> {
        let n = u32::try_from(word.len()).ok()?;
        if n == 0 || n > MAX_DIMENSION {
            return None;
        }
        let mut value = 0u32;
        for ch in word.chars() {
            value = (value << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return None,
                };
        }
        Some((CubeVertex(value), n))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Number of vertices of `Q_n`.
pub fn cube_order(n: u32) -> usize {
    1usize << n
}

/// All vertices of `Q_n` in increasing word order.
pub fn cube_vertices(n: u32) -> impl Iterator<Item = CubeVertex> {
    (0..(1u32 << n)).map(CubeVertex)
}

/// The `n` vertices at Hamming distance one from `v`, in increasing word order.
pub fn cube_neighbours(v: CubeVertex, n: u32) -> Vec<CubeVertex> {
    debug_assert!(n == 32 || v.0 < (1u32 << n));
    let mut out: Vec<CubeVertex> = (0..n).map(|bit| CubeVertex(v.0 ^ (1 << bit))).collect();
    out.sort_unstable();
    out
}

/// Both endpoints of every edge of `Q_n`, each edge listed once with the
/// smaller word first.
pub fn cube_edges(n: u32) -> impl Iterator<Item = (CubeVertex, CubeVertex)> {
    cube_vertices(n).flat_map(move |v| {
        (0..n).filter_map(move |bit| {
            let w = v.0 ^ (1 << bit);
            (w > v.0).then_some((v, CubeVertex(w)))
        })
    })
}

/// The initial subcube `Q_x` of all vertices whose first `codim` coordinates
/// spell the prefix `x`.
///
/// The prefix is stored as an integer whose binary expansion (most
/// significant first) is `x_1 ... x_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InitialSubcube {
    prefix: u32,
    codim: u32,
}

impl InitialSubcube {
    /// The whole cube, `x = ()`.
    pub const WHOLE: InitialSubcube = InitialSubcube {
        prefix: 0,
        codim: 0,
    };

    pub fn new(prefix: u32, codim: u32) -> Result<Self, HypercubeError> {
        check_dimension(codim)?;
        if codim < 32 && prefix >> codim != 0 {
            return Err(HypercubeError::PrefixOutOfRange { prefix, codim });
        }
        Ok(InitialSubcube { prefix, codim })
    }

    /// Builds the subcube from explicit coordinates `x_1, ..., x_d`.
    pub fn from_coords(coords: &[u8]) -> Self {
        assert!(coords.len() as u32 <= MAX_DIMENSION);
        let prefix = coords
            .iter()
            .fold(0u32, |acc, &c| (acc << 1) | u32::from(c != 0));
        InitialSubcube {
            prefix,
            codim: coords.len() as u32,
        }
    }

    pub fn prefix(&self) -> u32 {
        self.prefix
    }

    pub fn codim(&self) -> u32 {
        self.codim
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.codim)
            .rev()
            .map(|shift| ((self.prefix >> shift) & 1) as u8)
            .collect()
    }

    /// The first `len` coordinates of the prefix, as an integer.
    fn truncated(&self, len: u32) -> u32 {
        debug_assert!(len <= self.codim);
        self.prefix >> (self.codim - len)
    }

    /// Number of cube vertices in `Q_x` for the ambient dimension `n`.
    pub fn size(&self, n: u32) -> usize {
        1usize << (n - self.codim)
    }

    /// The subcube as a half-open range of vertex words.
    pub fn word_range(&self, n: u32) -> Result<std::ops::Range<u32>, HypercubeError> {
        check_dimension(n)?;
        if self.codim > n {
            return Err(HypercubeError::CodimExceedsDimension {
                codim: self.codim,
                n,
            });
        }
        let shift = n - self.codim;
        let start = self.prefix << shift;
        Ok(start..start + (1u32 << shift))
    }

    pub fn contains(&self, v: CubeVertex, n: u32) -> bool {
        self.codim <= n && (v.0 >> (n - self.codim)) == self.prefix
    }

    /// The two subcubes of co-dimension `codim + 1` inside this one.
    pub fn children(&self) -> [InitialSubcube; 2] {
        let codim = self.codim + 1;
        [
            InitialSubcube {
                prefix: self.prefix << 1,
                codim,
            },
            InitialSubcube {
                prefix: (self.prefix << 1) | 1,
                codim,
            },
        ]
    }

    pub fn is_disjoint(&self, other: &InitialSubcube) -> bool {
        subcube_distance(self, other) > 0
    }

    pub fn is_adjacent(&self, other: &InitialSubcube) -> bool {
        subcube_distance(self, other) == 1
    }
}

impl fmt::Display for InitialSubcube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", coords.join(","))
    }
}

impl PartialOrd for InitialSubcube {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Subcubes order by prefix read as a binary integer, then by co-dimension.
impl Ord for InitialSubcube {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.prefix, self.codim).cmp(&(other.prefix, other.codim))
    }
}

/// Number of disagreeing coordinates over the common prefix length.
///
/// Zero means one subcube contains the other, one means they are disjoint and
/// adjacent.
pub fn subcube_distance(x: &InitialSubcube, z: &InitialSubcube) -> u32 {
    let common = x.codim.min(z.codim);
    (x.truncated(common) ^ z.truncated(common)).count_ones()
}

/// All vertices of `Q_x` in increasing word order.
pub fn subcube_vertices(x: &InitialSubcube, n: u32) -> Result<Vec<CubeVertex>, HypercubeError> {
    Ok(x.word_range(n)?.map(CubeVertex).collect())
}

/// A family of pairwise disjoint initial subcubes of `Q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcubeFamily {
    n: u32,
    members: Vec<InitialSubcube>,
}

impl SubcubeFamily {
    pub fn new(n: u32, members: Vec<InitialSubcube>) -> Result<Self, HypercubeError> {
        check_dimension(n)?;
        for (i, x) in members.iter().enumerate() {
            if x.codim > n {
                return Err(HypercubeError::CodimExceedsDimension { codim: x.codim, n });
            }
            if let Some(z) = members[..i].iter().find(|z| !z.is_disjoint(x)) {
                return Err(HypercubeError::OverlappingMembers {
                    first: *z,
                    second: *x,
                });
            }
        }
        Ok(SubcubeFamily { n, members })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[InitialSubcube] {
        &self.members
    }

    /// Total number of cube vertices covered.
    pub fn covered(&self) -> usize {
        self.members.iter().map(|x| x.size(self.n)).sum()
    }

    pub fn covers_cube(&self) -> bool {
        self.covered() == cube_order(self.n)
    }
}

/// Partitions `V(Q_n)` minus the union of `family` into initial subcubes of
/// co-dimension `target`, returned in increasing prefix order.
///
/// Works by binary splitting from the whole cube: a node covered by a member
/// emits nothing, a node meeting no member is refined straight down to
/// co-dimension `target`, and anything else is split once more.
pub fn partition_complement(
    family: &SubcubeFamily,
    target: u32,
) -> Result<Vec<InitialSubcube>, HypercubeError> {
    let n = family.n;
    if target > n {
        return Err(HypercubeError::CodimExceedsDimension { codim: target, n });
    }
    if let Some(member) = family.members.iter().find(|x| x.codim > target) {
        return Err(HypercubeError::TargetBelowMember {
            target,
            member: *member,
        });
    }
    let mut out = Vec::new();
    split_complement(InitialSubcube::WHOLE, &family.members, target, &mut out);
    Ok(out)
}

fn split_complement(
    node: InitialSubcube,
    members: &[InitialSubcube],
    target: u32,
    out: &mut Vec<InitialSubcube>,
) {
    let meeting: Vec<InitialSubcube> = members
        .iter()
        .filter(|x| subcube_distance(x, &node) == 0)
        .copied()
        .collect();
    if meeting.iter().any(|x| x.codim <= node.codim) {
        return;
    }
    if meeting.is_empty() {
        let shift = target - node.codim;
        let base = node.prefix << shift;
        out.extend((0..(1u32 << shift)).map(|offset| InitialSubcube {
            prefix: base + offset,
            codim: target,
        }));
        return;
    }
    // Every meeting member is strictly inside `node`, so node.codim < target.
    for child in node.children() {
        split_complement(child, &meeting, target, out);
    }
}

/// Orders vertices by level, breaking ties by word value.
///
/// In this order two adjacent vertices of `Q_n` on levels `k - 1` and `k` are
/// at most `binom(n, k) + binom(n, k - 1)` positions apart.
pub fn bandwidth_order(vertices: impl IntoIterator<Item = CubeVertex>) -> Vec<CubeVertex> {
    let mut order: Vec<CubeVertex> = vertices.into_iter().collect();
    order.sort_unstable_by_key(|v| (v.level(), v.0));
    order.dedup();
    order
}

/// `2 * binom(n, floor(n/2))`, the level-order bandwidth bound for `Q_n`.
pub fn bandwidth_bound(n: u32) -> u64 {
    2 * binomial(n, n / 2)
}

/// Largest index gap, in `order`, between two members adjacent in `Q_n`.
pub fn max_edge_stretch(order: &[CubeVertex], n: u32) -> usize {
    let mut position = vec![usize::MAX; cube_order(n)];
    for (i, v) in order.iter().enumerate() {
        position[v.index()] = i;
    }
    let mut stretch = 0;
    for (i, v) in order.iter().enumerate() {
        for bit in 0..n {
            let j = position[(v.0 ^ (1 << bit)) as usize];
            if j != usize::MAX && j > i {
                stretch = stretch.max(j - i);
            }
        }
    }
    stretch
}

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}
