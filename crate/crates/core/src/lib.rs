//! Local search for the set-union knapsack problem (SUKP) and the budgeted
//! maximum coverage problem (BMCP).
//!
//! ```
//! use e2ls_core::instance::{generate_uniform, UniformSpec};
//! use e2ls_core::search::{solve, SearchParams};
//!
//! let inst = generate_uniform(&UniformSpec::sukp(40, 40, 0.1, 0.75), 1).unwrap();
//! let params = SearchParams::defaults_for(&inst).with_cutoff(0.05);
//! let record = solve(&inst, &params).unwrap();
//! assert!(inst.is_feasible(&record.best_solution));
//! ```

pub mod bitset;
pub mod construct;
pub mod instance;
pub mod oracle;
pub mod search;
pub mod solution;
pub mod tabu;

pub use instance::{Instance, ProblemKind};
pub use search::{solve, RunRecord, SearchParams};
pub use solution::{Solution, SolutionState};
