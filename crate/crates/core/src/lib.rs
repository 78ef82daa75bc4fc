//! Certificate-producing searches in word combinatorics and partial
//! semigroup theory: Hales-Jewett line finders, bounded J-set witness
//! search, witness lifting through homomorphisms, and constrained
//! variable-word existence searches.
//!
//! Every search is bounded, deterministic, and canonical-least: re-running
//! with permuted inputs or a different thread count yields byte-identical
//! results, and every positive result ships with a certificate that an
//! independent verifier can re-check without re-running the search.

pub mod cert;
pub mod error;
pub mod hj;
pub mod jset;
pub mod lift;
pub mod psg;
pub mod textio;
mod util;
pub mod words;

pub use error::{Error, Result};

/// Bounds shared by all searches. Everything is finite and explicit; a
/// search that exhausts its bounds says so rather than growing them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Largest witness arity `m` to try.
    pub m_max: usize,
    /// Largest sequence index `t` to touch.
    pub t_horizon: usize,
    /// Length cap for pool words.
    pub pool_len: usize,
    /// Length cap for searched words (variable-word searches).
    pub word_len: usize,
    /// Worker threads for the search pools; 0 = library default. Affects
    /// wall clock only, never results.
    pub threads: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            m_max: 2,
            t_horizon: 8,
            pool_len: 2,
            word_len: 12,
            threads: 0,
        }
    }
}

/// Tool version recorded in certificates.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
