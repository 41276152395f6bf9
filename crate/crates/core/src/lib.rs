//! Symbolic sequences from coding functions, and finite-scale probes of the
//! combinatorics that separate dynamical classes: word complexity, projection
//! counts, free (interpolation) sets, sequence entropy and WAP subsets of `Z`.
//!
//! Sources are pure maps from a group element to a symbol. Rotation and sphere
//! codings run on exact dyadic arithmetic ([`torus`]); evaluations too close to
//! a partition boundary are reported, never guessed, and any analysis that
//! had to skip them is marked tainted.
//!
//! ```
//! use symdyn::lang::{complexity_table, ShiftBudget};
//! use symdyn::spec::SourceDocument;
//!
//! let fib = SourceDocument::fibonacci().build().unwrap();
//! let table = complexity_table(&fib, 8, &ShiftBudget::first(10_000)).unwrap();
//! assert_eq!(table.p(8), Some(9));
//! ```

pub mod classify;
pub mod cli;
pub mod entropy;
pub mod indep;
pub mod lang;
pub mod manifest;
pub mod sources;
pub mod spec;
pub mod torus;
pub mod wapset;
