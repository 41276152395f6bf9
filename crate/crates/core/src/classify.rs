//! Verdicts on three nested dimensions: positive entropy, non-nullness and
//! consistency with tameness.
//!
//! Positive verdicts rest on embedded free-set certificates that can be
//! re-verified against the source. Tameness is never certified, only
//! evidenced, since no finite observation rules out an infinite free set.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::indep::{
    free_density_profile, verify_certificate, DensityProfile, FreeSetCertificate, SymbolPair,
    DENSITY_THRESHOLD, DENSITY_WINDOWS,
};
use crate::lang::{
    extract_patterns, projection_growth, CoordinateSet, LangError, PrefixFamily, ProjectionGrowth,
    ShiftBudget,
};
use crate::sources::SymbolicSource;

pub const SCHEMA_VERSION: u32 = 1;

pub const LIMITATION: &str = "No verdict on hereditary non-sensitivity is emitted: for subshifts \
it is equivalent to countability, which finite sampling cannot attest. Tameness is evidence \
only; positive verdicts are relative to the recorded budgets.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetProfile {
    pub shifts: ShiftBudget,
    /// Increasing window lengths `L` searched on `{0, …, L-1}`.
    pub windows: Vec<usize>,
    /// Size of free set that certifies non-nullness.
    pub k_target: usize,
    pub node_budget: u64,
    /// Size of the largest prefix in each growth family.
    pub prefix_len: usize,
    pub families: Vec<PrefixFamily>,
}

impl BudgetProfile {
    pub fn new(shifts: ShiftBudget, windows: Vec<usize>, k_target: usize) -> Self {
        Self {
            shifts,
            windows,
            k_target,
            node_budget: 1 << 22,
            prefix_len: 12,
            families: PrefixFamily::defaults(),
        }
    }

    fn validate(&self) -> Result<(), LangError> {
        if self.windows.len() < DENSITY_WINDOWS {
            return Err(LangError::InvalidWindow(format!(
                "at least {DENSITY_WINDOWS} window lengths are required"
            )));
        }
        if self.windows.windows(2).any(|w| w[0] >= w[1]) || self.windows[0] < 3 {
            return Err(LangError::InvalidWindow(
                "window lengths must increase and start at 3 or more".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    EvidenceFor,
    EvidenceAgainst,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    PositiveEntropy,
    Nonnull,
    TameConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EvidenceKind {
    Certificate,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Density {
        profile: DensityProfile,
    },
    Certificate {
        certificate: FreeSetCertificate,
    },
    KStars {
        windows: Vec<usize>,
        k_stars: Vec<usize>,
    },
    Growth {
        family: String,
        growth: ProjectionGrowth,
    },
    NoPair {
        observed: Vec<u8>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub kind: EvidenceKind,
    pub dimension: Dimension,
    pub note: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub plateau_windows: usize,
    pub density: f64,
    pub k_target: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub positive_entropy: Verdict,
    pub nonnull: Verdict,
    pub tame_consistent: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub verdicts: Verdicts,
    pub pair: Option<SymbolPair>,
    pub windows: Vec<usize>,
    pub k_stars: Vec<usize>,
    pub thresholds: Thresholds,
    pub budgets: BudgetProfile,
    pub evidence: Vec<Evidence>,
    pub limitations: Vec<String>,
    pub tainted: bool,
}

impl ClassificationReport {
    pub fn certificates(&self) -> impl Iterator<Item = &FreeSetCertificate> {
        self.evidence.iter().flat_map(|e| match &e.payload {
            Payload::Density { profile } => profile.certificates.iter().collect::<Vec<_>>(),
            Payload::Certificate { certificate } => vec![certificate],
            _ => Vec::new(),
        })
    }
}

/// Re-verifies every certificate embedded in `report`.
pub fn recheck(source: &SymbolicSource, report: &ClassificationReport) -> bool {
    report.certificates().all(|c| verify_certificate(source, c))
}

fn plateau(k: &[usize]) -> bool {
    k.len() >= DENSITY_WINDOWS
        && k[k.len() - DENSITY_WINDOWS..]
            .windows(2)
            .all(|w| w[0] == w[1])
}

fn increasing(k: &[usize]) -> bool {
    k.len() >= 2 && k.windows(2).all(|w| w[0] < w[1])
}

pub fn classify(
    source: &SymbolicSource,
    budgets: &BudgetProfile,
) -> Result<ClassificationReport, LangError> {
    budgets.validate()?;
    let mut evidence = Vec::new();
    let mut tainted = false;

    let observed: BTreeSet<u8> = {
        let store = extract_patterns(source, &CoordinateSet::contiguous(1)?, &budgets.shifts)?;
        tainted |= store.tainted;
        store.patterns.iter().map(|p| *p as u8).collect()
    };
    let mut symbols = observed.iter().copied();
    let pair = match (symbols.next(), symbols.next()) {
        (Some(a), Some(b)) => Some(SymbolPair::new(a, b)?),
        _ => None,
    };

    let (k_stars, profile) = match pair {
        Some(pair) => {
            let profile = free_density_profile(
                source,
                &budgets.windows,
                pair,
                &budgets.shifts,
                budgets.node_budget,
            )?;
            tainted |= profile.tainted;
            (
                profile.rows.iter().map(|r| r.k_star).collect::<Vec<_>>(),
                Some(profile),
            )
        }
        None => {
            evidence.push(Evidence {
                kind: EvidenceKind::Heuristic,
                dimension: Dimension::TameConsistent,
                note: "fewer than two symbols observed; no free coordinate exists".into(),
                payload: Payload::NoPair {
                    observed: observed.iter().copied().collect(),
                },
            });
            (vec![0; budgets.windows.len()], None)
        }
    };
    let budget_hit = profile
        .as_ref()
        .is_some_and(|p| p.rows.iter().any(|r| !r.exhaustive && r.k_star < r.length));

    let positive_entropy = match &profile {
        Some(p) if p.positive_density => Verdict::Certified,
        _ if plateau(&k_stars) => Verdict::EvidenceAgainst,
        _ if budget_hit => Verdict::Undetermined,
        Some(p)
            if p.rows[p.rows.len() - DENSITY_WINDOWS..]
                .iter()
                .all(|r| r.ratio >= DENSITY_THRESHOLD) =>
        {
            Verdict::EvidenceFor
        }
        _ => Verdict::Undetermined,
    };

    let best = profile
        .as_ref()
        .and_then(|p| {
            p.certificates
                .iter()
                .filter(|c| c.verified)
                .max_by_key(|c| c.size())
        })
        .cloned();
    let nonnull = if positive_entropy == Verdict::Certified
        || best.as_ref().is_some_and(|c| c.size() >= budgets.k_target)
    {
        Verdict::Certified
    } else if plateau(&k_stars) {
        Verdict::EvidenceAgainst
    } else if budget_hit {
        Verdict::Undetermined
    } else if increasing(&k_stars) {
        Verdict::EvidenceFor
    } else {
        Verdict::Undetermined
    };

    let mut all_subexponential = true;
    for family in &budgets.families {
        let prefixes = family.prefixes(budgets.prefix_len)?;
        let growth = projection_growth(source, &prefixes, &budgets.shifts)?;
        tainted |= growth.tainted;
        all_subexponential &= !growth.fit.label.is_exponential();
        evidence.push(Evidence {
            kind: EvidenceKind::Heuristic,
            dimension: Dimension::TameConsistent,
            note: format!(
                "{} prefixes: {} growth",
                family.name(),
                growth.fit.label.name()
            ),
            payload: Payload::Growth {
                family: family.name().into(),
                growth,
            },
        });
    }
    let tame_consistent = if plateau(&k_stars) && all_subexponential {
        Verdict::EvidenceFor
    } else if increasing(&k_stars) {
        Verdict::EvidenceAgainst
    } else {
        Verdict::Undetermined
    };

    evidence.push(Evidence {
        kind: EvidenceKind::Heuristic,
        dimension: Dimension::TameConsistent,
        note: format!("k* across windows {:?}: {:?}", budgets.windows, k_stars),
        payload: Payload::KStars {
            windows: budgets.windows.clone(),
            k_stars: k_stars.clone(),
        },
    });
    if let Some(profile) = profile {
        let kind = if positive_entropy == Verdict::Certified {
            EvidenceKind::Certificate
        } else {
            EvidenceKind::Heuristic
        };
        evidence.push(Evidence {
            kind,
            dimension: Dimension::PositiveEntropy,
            note: format!(
                "free-set density over the last {DENSITY_WINDOWS} windows, threshold {DENSITY_THRESHOLD}"
            ),
            payload: Payload::Density { profile },
        });
    }
    if let Some(certificate) = best {
        evidence.push(Evidence {
            kind: if nonnull == Verdict::Certified {
                EvidenceKind::Certificate
            } else {
                EvidenceKind::Heuristic
            },
            dimension: Dimension::Nonnull,
            note: format!(
                "largest verified free set has {} coordinates",
                certificate.size()
            ),
            payload: Payload::Certificate { certificate },
        });
    }

    Ok(ClassificationReport {
        schema_version: SCHEMA_VERSION,
        verdicts: Verdicts {
            positive_entropy,
            nonnull,
            tame_consistent,
        },
        pair,
        windows: budgets.windows.clone(),
        k_stars,
        thresholds: Thresholds {
            plateau_windows: DENSITY_WINDOWS,
            density: DENSITY_THRESHOLD,
            k_target: budgets.k_target,
        },
        budgets: budgets.clone(),
        evidence,
        limitations: vec![LIMITATION.into()],
        tainted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{WordKind, WordSource};
    use crate::spec::SourceDocument;

    #[test]
    fn champernowne_is_certified() {
        let src = SymbolicSource::Word(WordSource::new(WordKind::Champernowne, 2_000_000));
        let budgets = BudgetProfile::new(ShiftBudget::first(1_000_000), vec![4, 7, 10], 10);
        let r = classify(&src, &budgets).unwrap();
        assert_eq!(r.verdicts.positive_entropy, Verdict::Certified);
        assert_eq!(r.verdicts.nonnull, Verdict::Certified);
        assert_eq!(r.verdicts.tame_consistent, Verdict::EvidenceAgainst);
        assert!(recheck(&src, &r));
    }

    #[test]
    fn fibonacci_is_tame_consistent() {
        let src = SourceDocument::fibonacci().build().unwrap();
        let budgets = BudgetProfile::new(ShiftBudget::first(100_000), vec![8, 16, 32], 3);
        let r = classify(&src, &budgets).unwrap();
        assert_eq!(r.k_stars, vec![2, 2, 2]);
        assert_eq!(r.verdicts.positive_entropy, Verdict::EvidenceAgainst);
        assert_eq!(r.verdicts.nonnull, Verdict::EvidenceAgainst);
        assert_eq!(r.verdicts.tame_consistent, Verdict::EvidenceFor);
        assert!(!r.tainted);
        assert!(recheck(&src, &r));
    }

    #[test]
    fn constant_source_is_trivial() {
        let src = SourceDocument::constant().build().unwrap();
        let budgets = BudgetProfile::new(ShiftBudget::first(1000), vec![4, 8, 12], 2);
        let r = classify(&src, &budgets).unwrap();
        assert_eq!(r.pair, None);
        assert_eq!(r.k_stars, vec![0, 0, 0]);
        assert_eq!(r.verdicts.tame_consistent, Verdict::EvidenceFor);
        assert_ne!(r.verdicts.positive_entropy, Verdict::Certified);
        assert!(r.limitations[0].contains("countability"));
    }

    #[test]
    fn profile_validation() {
        let src = SourceDocument::constant().build().unwrap();
        let bad = BudgetProfile::new(ShiftBudget::first(10), vec![4, 8], 2);
        assert!(classify(&src, &bad).is_err());
        let bad = BudgetProfile::new(ShiftBudget::first(10), vec![2, 8, 9], 2);
        assert!(classify(&src, &bad).is_err());
    }
}
