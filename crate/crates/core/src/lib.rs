//! Poincare-Dulac normal forms of polynomial vector fields in exact
//! arithmetic, with resonance analysis, unfolding into linear blocks over an
//! orbit-space field, symmetry and convergence diagnostics, and a numerical
//! validation harness.

pub mod algebra;
pub mod convergence;
pub mod normalform;
pub mod resonance;
pub mod symmetry;
pub mod unfold;
pub mod numerics;
pub mod cli;
