//! Probability-vector representation of quantum states and measurements
//! built on symmetric reference measurements, with a Dutch-book coherence
//! checker for the probabilistic form of the Born rule.
//!
//! The pieces:
//!
//! - [`linalg`]: dense complex operators, trace pairings, Hermitian
//!   eigenvalue tests, density/POVM validation.
//! - [`sic`]: discrete displacement operators, numerical fiducial search by
//!   frame-potential minimization, construction and verification of the
//!   symmetric reference measurement.
//! - [`repr`]: operator objects to probability objects and back, the Born
//!   rule in the form q = R Phi p, and its gap against the classical Law of
//!   Total Probability.
//! - [`qplex`]: inner-product bounds of the state space, mutually-maximally-
//!   distant sets, polarity, ball radii, physical-validity membership, and a
//!   least-squares linear-extension certifier.
//! - [`coherence`]: price validation, additivity and joint/conditional
//!   checks, Born-rule coherence, and explicit loss-guaranteeing ticket
//!   portfolios as witnesses.
//! - [`experiments`]: seeded, bit-reproducible Monte-Carlo sampling of the
//!   one-stage and two-stage experiments.
//! - [`io`]: the JSON file formats shared with the command-line tools.
//! - [`random`]: seeded generators for states, POVMs, and unitaries.
//!
//! All operations are pure functions over immutable values; everything here
//! is safe to share across threads.

pub mod coherence;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub(crate) mod optim;
pub mod qplex;
pub mod random;
pub mod repr;
pub mod sic;

pub use coherence::{CoherenceVerdict, Direction, DutchBookWitness, Ticket, Transaction};
pub use error::{Error, Result};
pub use experiments::{CountTable, RunConfig};
pub use linalg::{Complex64, ComplexMatrix, ValidationReport};
pub use qplex::{MmdResult, QplexGeometry};
pub use repr::{BornOutcome, CondMatrix, OutcomeDist, ProbState};
pub use sic::{Fiducial, SicSystem};
