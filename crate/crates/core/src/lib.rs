//! Exact computations with locally finite symmetric operads and N-graded algebras.

pub mod scalars;
pub mod symmetry;
pub mod linalg;
pub mod interval;
pub mod series;
pub mod graded_algebra;
pub mod operad;
pub mod functors;
pub mod families;
pub mod worked_examples;
pub mod cli;
