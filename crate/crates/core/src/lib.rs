//! Simple games as boolean combinations of weighted games, with exhaustive
//! coalition sweeps, intersection rewrites of weighted unions, dimension upper
//! bounds for the EU Council's Lisbon rule, and pairwise-incompatibility lower
//! bound certificates.
//!
//! Players are 0-based inside the library. Anything printed or read from a
//! file uses 1-based population ranks.

pub mod cli;
pub mod coalition;
mod compiled;
pub mod data;
pub mod decomposition;
pub mod error;
pub mod eu;
pub mod game;
pub mod lower_bound;
pub mod sweep;

pub use coalition::{Coalition, MAX_PLAYERS};
pub use data::{build_eu_rule, EuRule, PopulationTable, RuleConfig};
pub use decomposition::{
    compute_d_summary, construction_one, theorem_one, veto_game, DSummary, DecompositionResult,
    Method,
};
pub use error::{GameError, Result};
pub use eu::{eu_upper_bound, BoundReport};
pub use game::{GameExpr, WeightedGame};
pub use lower_bound::{
    find_certificate, search_certificate_set, verify_certificate_set, CertificateSetReport,
    IncompatibilityCertificate,
};
pub use sweep::{equivalent, maximal_satisfying, stream, Equivalence, IntervalPredicate, SweepConfig};
