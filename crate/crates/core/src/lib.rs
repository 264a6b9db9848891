//! Finite Menger (2,n)-semigroups: algebras of partial n-place functions under
//! (n+1)-ary superposition and the n binary Mann compositions.
//!
//! Everything here works on finite tables and is checked by exhaustive search.
//! Argument slots are 0-based throughout: slot `0` is the first argument of a
//! function, and `mann_compose(f, g, 0)` substitutes `g` into that slot.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod nfun;
pub mod relations;
pub mod report;
pub mod represent;

pub use error::{Error, Result};
