//! Deterministic symbolic sources: pure maps from a group element to a symbol.
//!
//! Every construction in this crate (rotation codings, sphere codings,
//! substitution fixed points, integer-set indicators, the block-concatenation
//! word, free-group circle codings) is exposed through [`SymbolicSource`].
//! Evaluation never guesses: a point too close to a partition boundary yields
//! [`SourceError::AmbiguousBoundary`] and callers decide what to do with it.

mod free_group;
mod integer_set;
mod rotation;
mod sphere;
mod words;

use std::ops::Range;

use rayon::prelude::*;
use thiserror::Error;

use crate::torus::TorusError;

pub use free_group::{
    eval_free_group, reduced_words, FreeGroupCoding, FreeWord, Generator, MAX_WORD_LEN,
};
pub use integer_set::{ip_membership, IntegerSet, IntegerSetKind};
pub use rotation::{ArcPartition, RotationCoding};
pub use sphere::{choose_safe_radius, SafeRadius, SphereCoding};
pub use words::{
    champernowne_prefix, kerr_li_block_start, kerr_li_word, substitution_expand, SubstitutionSpec,
    WordKind, WordSource,
};

pub type Symbol = u8;

/// One materialized evaluation; `None` marks an ambiguous (guard-band) point.
pub type Cell = Option<Symbol>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SourceError {
    #[error("ambiguous boundary at index {index}: raise the precision")]
    AmbiguousBoundary { index: String },
    #[error("index {index} outside the materialized range (limit {limit})")]
    IndexOutOfRange { index: i64, limit: i64 },
    #[error("free-group word of length {len} exceeds the cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("index does not belong to this source's domain ({0})")]
    DomainMismatch(String),
    #[error("substitution is not prolongable: image of seed {0} does not begin with it")]
    NonProlongable(Symbol),
    #[error("no safe radius: largest gap {gap:.3e} is below twice the margin {delta:.3e}")]
    NoSafeRadius { gap: f64, delta: f64 },
    #[error("invalid source: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

impl SourceError {
    pub fn is_ambiguous(&self) -> bool {
        matches!(self, SourceError::AmbiguousBoundary { .. })
    }
}

/// A group element in the domain of some source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Index {
    Z(i64),
    Lattice(Vec<i64>),
    Word(FreeWord),
}

/// The acting group a source is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexDomain {
    Integers,
    Lattice(usize),
    FreeGroup,
}

#[derive(Debug)]
pub enum SymbolicSource {
    Rotation(RotationCoding),
    Sphere(SphereCoding),
    Word(WordSource),
    Indicator(IntegerSet),
    FreeGroup(FreeGroupCoding),
}

impl SymbolicSource {
    pub fn domain(&self) -> IndexDomain {
        match self {
            SymbolicSource::Rotation(r) if r.generators() > 1 => {
                IndexDomain::Lattice(r.generators())
            }
            SymbolicSource::FreeGroup(_) => IndexDomain::FreeGroup,
            _ => IndexDomain::Integers,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            SymbolicSource::Rotation(r) => r.partition().len(),
            SymbolicSource::Sphere(_) | SymbolicSource::Indicator(_) => 2,
            SymbolicSource::Word(w) => w.alphabet_size(),
            SymbolicSource::FreeGroup(f) => f.alphabet_size(),
        }
    }

    pub fn eval(&self, g: &Index) -> Result<Symbol, SourceError> {
        match (self, g) {
            (SymbolicSource::FreeGroup(f), Index::Word(w)) => eval_free_group(f, w),
            (SymbolicSource::Rotation(r), Index::Lattice(n)) => r.eval_lattice(n),
            (_, Index::Z(n)) => self.eval_z(*n),
            (_, other) => Err(SourceError::DomainMismatch(format!("{other:?}"))),
        }
    }

    /// Evaluation on `Z`.
    pub fn eval_z(&self, n: i64) -> Result<Symbol, SourceError> {
        match self {
            SymbolicSource::Rotation(r) => r.eval_lattice(&[n]),
            SymbolicSource::Sphere(s) => s.eval(n),
            SymbolicSource::Word(w) => w.eval(n),
            SymbolicSource::Indicator(set) => Ok(Symbol::from(set.contains(n))),
            SymbolicSource::FreeGroup(_) => Err(SourceError::DomainMismatch(
                "free-group coding indexed by an integer".into(),
            )),
        }
    }

    /// Evaluates every index of `range`, mapping ambiguous points to `None`.
    ///
    /// The range is cut into `workers` contiguous shards evaluated
    /// independently; the output does not depend on `workers`.
    pub fn materialize(&self, range: Range<i64>, workers: usize) -> Result<Vec<Cell>, SourceError> {
        if range.end <= range.start {
            return Ok(Vec::new());
        }
        let shards = shard_ranges(range, workers);
        let parts: Vec<Result<Vec<Cell>, SourceError>> = shards
            .into_par_iter()
            .map(|r| self.materialize_serial(r))
            .collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }

    fn materialize_serial(&self, range: Range<i64>) -> Result<Vec<Cell>, SourceError> {
        match self {
            SymbolicSource::Rotation(r) => r.materialize(range),
            SymbolicSource::Sphere(s) => s.materialize(range),
            SymbolicSource::Word(w) => w.materialize(range),
            _ => range
                .map(|n| match self.eval_z(n) {
                    Ok(s) => Ok(Some(s)),
                    Err(e) if e.is_ambiguous() => Ok(None),
                    Err(e) => Err(e),
                })
                .collect(),
        }
    }
}

/// Splits `range` into at most `workers` contiguous, ordered pieces.
pub fn shard_ranges(range: Range<i64>, workers: usize) -> Vec<Range<i64>> {
    let len = (range.end - range.start).max(0) as u64;
    let k = (workers.max(1) as u64).min(len.max(1));
    let base = len / k;
    let extra = len % k;
    let mut out = Vec::with_capacity(k as usize);
    let mut start = range.start;
    for i in 0..k {
        let size = base + u64::from(i < extra);
        out.push(start..start + size as i64);
        start += size as i64;
    }
    out
}
