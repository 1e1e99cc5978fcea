//! A learning constraint-optimization solver for problems with
//! pseudo-Boolean objectives.
//!
//! The solver runs lazy-clause-generation branch and bound with conflict
//! analysis, and layers unsatisfiable-core search strategies on top of it:
//! candidate filtering at the root, nested active/contingent core tracking,
//! and clause-splitting notification. Active cores additionally feed two
//! lower-bound strengthening schemes, a Fourier-Motzkin style disjoint
//! combination and an exact rational LP with dual-derived explanations.

pub mod bounding;
pub mod conflict;
pub mod cores;
pub mod domains;
pub mod model;
pub mod propagation;
pub mod search;
pub mod simplex;
pub mod stats;

pub use bounding::Bounding;
pub use domains::{DomainStore, Lit, LitKind, Reason, Truth, VarId};
pub use model::{Constraint, ParseError, Problem, SoftSpec};
pub use search::{solve, Incumbent, LimitReason, Mode, Outcome, Solver, SolverConfig};
pub use stats::{SolverEvent, Stats, Trace};
