//! Sequence entropy along an increasing integer sequence `A`.
//!
//! `N_n` counts the patterns observed on `{a_0, …, a_{n-1}}` and
//! `slope_n = log2(N_n) / n`. The limsup is approximated by the largest slope
//! over the final third of the computed rows.

use serde::{Deserialize, Serialize};

use crate::lang::{nested_counts, LangError, ShiftBudget};
use crate::sources::{kerr_li_block_start, SymbolicSource};

/// Largest `n_max` accepted by [`sequence_entropy`].
pub const MAX_ENTROPY_N: usize = 24;

/// Default block level of [`EntropySequence::KerrLiBlocks`].
pub const KERR_LI_LEVEL: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "sequence", rename_all = "snake_case")]
pub enum EntropySequence {
    /// `a_i = i`.
    Identity,
    /// `a_i = 2^i`.
    Geometric,
    /// `a_i = s + i`, where `s` is the first position of block `level` of the
    /// block-concatenation word.
    KerrLiBlocks {
        level: u32,
    },
    Explicit {
        terms: Vec<i64>,
    },
}

impl EntropySequence {
    pub fn kerr_li_blocks() -> Self {
        EntropySequence::KerrLiBlocks {
            level: KERR_LI_LEVEL,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EntropySequence::Identity => "identity",
            EntropySequence::Geometric => "geometric",
            EntropySequence::KerrLiBlocks { .. } => "kerr_li_blocks",
            EntropySequence::Explicit { .. } => "explicit",
        }
    }

    /// The first `n` terms.
    pub fn terms(&self, n: usize) -> Result<Vec<i64>, LangError> {
        let terms: Vec<i64> = match self {
            EntropySequence::Identity => (0..n as i64).collect(),
            EntropySequence::Geometric => {
                if n > 62 {
                    return Err(LangError::InvalidWindow(format!("2^{} overflows", n - 1)));
                }
                (0..n).map(|i| 1i64 << i).collect()
            }
            EntropySequence::KerrLiBlocks { level } => {
                if *level > 40 {
                    return Err(LangError::InvalidWindow(format!(
                        "block level {level} too large"
                    )));
                }
                let s = kerr_li_block_start(*level);
                (0..n as i64).map(|i| s + i).collect()
            }
            EntropySequence::Explicit { terms } => {
                if terms.len() < n {
                    return Err(LangError::InvalidWindow(format!(
                        "explicit sequence has {} terms, {n} requested",
                        terms.len()
                    )));
                }
                terms[..n].to_vec()
            }
        };
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LangError::InvalidWindow(
                "sequence must be strictly increasing".into(),
            ));
        }
        Ok(terms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub n: usize,
    #[serde(rename = "N_n")]
    pub n_patterns: u64,
    pub slope: f64,
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub sequence: EntropySequence,
    pub terms: Vec<i64>,
    pub rows: Vec<EntropyRow>,
    pub tail_max: f64,
    /// Number of trailing rows `tail_max` ranges over.
    pub tail_rows: usize,
    pub budget: ShiftBudget,
    pub tainted: bool,
}

impl EntropyEstimate {
    pub fn row(&self, n: usize) -> Option<&EntropyRow> {
        self.rows.get(n.checked_sub(1)?)
    }

    /// Columns `n,N_n,slope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,N_n,slope\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.n_patterns, r.slope));
        }
        out
    }
}

pub fn sequence_entropy(
    source: &SymbolicSource,
    sequence: &EntropySequence,
    n_max: usize,
    shifts: &ShiftBudget,
) -> Result<EntropyEstimate, LangError> {
    if n_max > MAX_ENTROPY_N {
        return Err(LangError::WindowTooLarge {
            size: n_max,
            limit: MAX_ENTROPY_N,
        });
    }
    let terms = sequence.terms(n_max)?;
    let counts = nested_counts(source, &terms, shifts)?;
    let rows: Vec<EntropyRow> = counts
        .into_iter()
        .enumerate()
        .map(|(i, (count, skipped))| EntropyRow {
            n: i + 1,
            n_patterns: count,
            slope: (count.max(1) as f64).log2() / (i + 1) as f64,
            skipped,
        })
        .collect();
    let tail_rows = (rows.len() / 3).max(1).min(rows.len());
    let tail_max = rows[rows.len() - tail_rows..]
        .iter()
        .map(|r| r.slope)
        .fold(0.0, f64::max);
    Ok(EntropyEstimate {
        sequence: sequence.clone(),
        terms,
        tainted: rows.iter().any(|r| r.skipped > 0),
        rows,
        tail_max,
        tail_rows,
        budget: *shifts,
    })
}

/// Ordinary topological entropy: [`sequence_entropy`] along `a_i = i`.
pub fn topological_entropy(
    source: &SymbolicSource,
    n_max: usize,
    shifts: &ShiftBudget,
) -> Result<EntropyEstimate, LangError> {
    sequence_entropy(source, &EntropySequence::Identity, n_max, shifts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::SourceDocument;

    #[test]
    fn constant_source_has_zero_slopes() {
        let src = SourceDocument::constant().build().unwrap();
        let e = topological_entropy(&src, 12, &ShiftBudget::first(1000)).unwrap();
        assert!(e.rows.iter().all(|r| r.n_patterns == 1 && r.slope == 0.0));
        assert_eq!(e.tail_max, 0.0);
    }

    #[test]
    fn fibonacci_slope_at_sixteen() {
        let src = SourceDocument::fibonacci().build().unwrap();
        let e = topological_entropy(&src, 16, &ShiftBudget::first(1_000_000)).unwrap();
        let r = e.row(16).unwrap();
        assert_eq!(r.n_patterns, 17);
        assert_eq!(r.slope, 17f64.log2() / 16.0);
        assert!(r.slope < 0.3);
        // the final third starts at n = 12, whose slope dominates
        assert_eq!(e.tail_rows, 5);
        assert_eq!(e.tail_max, 13f64.log2() / 12.0);
    }

    #[test]
    fn morse_tail_decreases() {
        let src = SourceDocument::morse(1 << 21).build().unwrap();
        let b = ShiftBudget::first(1_000_000);
        let tails: Vec<f64> = [8, 12, 16]
            .iter()
            .map(|&n| topological_entropy(&src, n, &b).unwrap().tail_max)
            .collect();
        assert!(tails[0] > tails[1] && tails[1] > tails[2]);
        assert!(tails[2] <= 0.45);
        let full = topological_entropy(&src, 16, &b).unwrap();
        let counts: Vec<u64> = full.rows.iter().map(|r| r.n_patterns).collect();
        assert_eq!(
            counts,
            vec![2, 4, 6, 10, 12, 16, 20, 22, 24, 28, 32, 36, 40, 42, 44, 46]
        );
    }

    #[test]
    fn identity_matches_explicit() {
        let src = SourceDocument::morse(10_000).build().unwrap();
        let b = ShiftBudget::first(5000);
        let a = topological_entropy(&src, 10, &b).unwrap();
        let explicit = EntropySequence::Explicit {
            terms: (0..10).collect(),
        };
        let e = sequence_entropy(&src, &explicit, 10, &b).unwrap();
        assert_eq!(a.rows, e.rows);
    }

    #[test]
    fn sequences_and_limits() {
        assert_eq!(
            EntropySequence::Geometric.terms(4).unwrap(),
            vec![1, 2, 4, 8]
        );
        assert_eq!(
            EntropySequence::kerr_li_blocks().terms(2).unwrap(),
            vec![6153, 6154]
        );
        let bad = EntropySequence::Explicit {
            terms: vec![0, 3, 3],
        };
        assert!(bad.terms(3).is_err());
        assert!(bad.terms(4).is_err());
        let src = SourceDocument::constant().build().unwrap();
        assert!(topological_entropy(&src, 25, &ShiftBudget::first(10)).is_err());
        let csv = topological_entropy(&src, 2, &ShiftBudget::first(10))
            .unwrap()
            .to_csv();
        assert_eq!(csv, "n,N_n,slope\n1,1,0\n2,1,0\n");
    }
}
