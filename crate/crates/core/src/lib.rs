//! Red hypercubes in two-coloured complete graphs with no blue triangle.
//!
//! The crate follows a constructive route to a red copy of `Q_n`: split the
//! colouring into a part with few blue edges and a sequence of red snakes,
//! then embed the cube greedily into whichever part is larger. Every stage
//! returns either a verified result or a structured diagnosis.

pub mod decompose;
pub mod dense;
pub mod generate;
pub mod graph;
pub mod hypercube;
pub mod oracle;
pub mod snake;
pub mod solver;

pub use graph::{ColouredGraph, Embedding};
pub use hypercube::{CubeVertex, InitialSubcube};
