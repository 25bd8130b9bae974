//! riskeq: risk-modeling valuations of mixed profiles in finite minimization
//! games.
//!
//! Players carry a valuation `V = E + R`: expected cost plus a nonnegative
//! risk term that vanishes exactly when the cost is constant over the
//! opponents' supported choices. This crate evaluates such valuations
//! exactly (rational arithmetic) or in floats, verifies and searches
//! V-equilibria, and constructs the hardness-gadget games in which equilibria
//! encode solutions of SAT, 3-DIMENSIONAL MATCHING and MULTIBALANCED
//! PARTITION instances.
//!
//! Entry points:
//! - [`game`]: finite games, mixed profiles, supports.
//! - [`valuation`]: the valuation zoo and two-value closed forms.
//! - [`scheduling`]: player-specific scheduling games and the moment formula.
//! - [`equilibrium`]: verification, support enumeration, grid search,
//!   best-response dynamics.
//! - [`gadgets`]: Crawford and SAT games, the matching-to-scheduling
//!   reduction chain, delta thresholds.
//! - [`properties`]: executable property suites with re-evaluable
//!   counterexamples.
//! - [`cli`]: the `riskeq` command-line interface.
//!
//! A rendered guide lives in `book/`; its code snippets compile as doc-tests
//! of the [`guide`] module.

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod gadgets;
pub mod game;
pub mod guide;
mod linalg;
pub mod properties;
pub mod sampling;
pub mod scalar;
pub mod scheduling;
pub mod valuation;

pub use error::{Error, Result};
pub use game::{Game, MixedProfile, PureProfile, Support};
pub use scalar::{Mode, Scalar, DEFAULT_TOL};
pub use valuation::ValuationSpec;
