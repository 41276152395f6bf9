use serde::{Deserialize, Serialize};

use super::SourceError;

/// Membership rule for a subset `D ⊂ Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegerSetKind {
    /// `{1, 2, 3, …}`.
    Natural,
    /// Finite sums of distinct powers `base^a`, `a >= t_min`.
    IpBase { base: u64, t_min: u32 },
    /// `{n : n mod modulus ∈ residues}`.
    Periodic { modulus: u64, residues: Vec<u64> },
    /// A finite set confined to `window = [lo, hi]`.
    Explicit { members: Vec<i64>, window: [i64; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerSet {
    #[serde(flatten)]
    kind: IntegerSetKind,
    /// Reads membership of `-n` instead of `n`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    reflect: bool,
}

impl IntegerSet {
    pub fn new(kind: IntegerSetKind, reflect: bool) -> Result<Self, SourceError> {
        match &kind {
            IntegerSetKind::Natural => {}
            IntegerSetKind::IpBase { base, .. } => {
                if *base < 2 {
                    return Err(SourceError::InvalidSpec("IP base must be >= 2".into()));
                }
            }
            IntegerSetKind::Periodic { modulus, residues } => {
                if *modulus == 0 {
                    return Err(SourceError::InvalidSpec("modulus must be positive".into()));
                }
                if residues.windows(2).any(|w| w[0] >= w[1])
                    || residues.iter().any(|r| r >= modulus)
                {
                    return Err(SourceError::InvalidSpec(
                        "residues must be sorted, distinct and below the modulus".into(),
                    ));
                }
            }
            IntegerSetKind::Explicit { members, window } => {
                if window[0] > window[1] {
                    return Err(SourceError::InvalidSpec("empty window".into()));
                }
                if members.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(SourceError::InvalidSpec(
                        "explicit members must be sorted and distinct".into(),
                    ));
                }
                if members.iter().any(|m| *m < window[0] || *m > window[1]) {
                    return Err(SourceError::InvalidSpec(
                        "explicit members must lie inside the window".into(),
                    ));
                }
            }
        }
        Ok(Self { kind, reflect })
    }

    pub fn natural() -> Self {
        Self::new(IntegerSetKind::Natural, false).expect("valid")
    }

    pub fn ip_powers_of_ten() -> Self {
        Self::new(IntegerSetKind::IpBase { base: 10, t_min: 1 }, false).expect("valid")
    }

    pub fn periodic(modulus: u64, residues: Vec<u64>) -> Result<Self, SourceError> {
        Self::new(IntegerSetKind::Periodic { modulus, residues }, false)
    }

    pub fn explicit(members: Vec<i64>, window: [i64; 2]) -> Result<Self, SourceError> {
        Self::new(IntegerSetKind::Explicit { members, window }, false)
    }

    pub fn empty() -> Self {
        Self::explicit(Vec::new(), [0, 0]).expect("valid")
    }

    pub fn kind(&self) -> &IntegerSetKind {
        &self.kind
    }

    pub fn reflect(&self) -> bool {
        self.reflect
    }

    pub fn contains(&self, n: i64) -> bool {
        let n = if self.reflect { n.wrapping_neg() } else { n };
        match &self.kind {
            IntegerSetKind::Natural => n >= 1,
            IntegerSetKind::IpBase { base, t_min } => ip_membership(*base, *t_min, n),
            IntegerSetKind::Periodic { modulus, residues } => {
                let r = n.rem_euclid(*modulus as i64) as u64;
                residues.binary_search(&r).is_ok()
            }
            IntegerSetKind::Explicit { members, .. } => members.binary_search(&n).is_ok(),
        }
    }

    /// Members of `[-limit, limit]` ordered by `|x|`, negatives first on ties.
    pub fn members_by_magnitude(&self, limit: u64) -> impl Iterator<Item = i64> + '_ {
        let limit = limit.min(i64::MAX as u64) as i64;
        (0..=limit)
            .flat_map(|k| if k == 0 { vec![0] } else { vec![-k, k] })
            .filter(move |x| self.contains(*x))
    }
}

/// `1` iff `n` is a nonempty sum of distinct powers `base^a` with `a >= t_min`:
/// every base-`base` digit is 0 or 1 and the lowest `t_min` digits vanish.
pub fn ip_membership(base: u64, t_min: u32, n: i64) -> bool {
    if n <= 0 || base < 2 {
        return false;
    }
    let mut m = n as u64;
    let mut position = 0;
    while m > 0 {
        let digit = m % base;
        if digit > 1 || (digit == 1 && position < t_min) {
            return false;
        }
        m /= base;
        position += 1;
    }
    true
}
