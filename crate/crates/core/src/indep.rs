//! Free (interpolation) sets with checkable witness certificates.
//!
//! A coordinate set `A` is free for a symbol pair `(s0, s1)` when every
//! pattern in `{s0, s1}^A` is the restriction of some in-budget translate.
//! Binary patterns are read with the smallest coordinate as the
//! least-significant bit, bit value 1 meaning `s1`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lang::{cover, CoordinateSet, LangError, ShiftBudget};
use crate::sources::{shard_ranges, Index, IndexDomain, SourceError, Symbol, SymbolicSource};

/// Largest coordinate set accepted by [`is_free`].
pub const MAX_FREE_SET: usize = 24;

/// Positive-density threshold on `k*(L) / L`.
pub const DENSITY_THRESHOLD: f64 = 0.25;

/// Number of trailing window lengths the density threshold must hold on.
pub const DENSITY_WINDOWS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Symbol; 2]", into = "[Symbol; 2]")]
pub struct SymbolPair {
    s0: Symbol,
    s1: Symbol,
}

impl SymbolPair {
    pub fn new(s0: Symbol, s1: Symbol) -> Result<Self, LangError> {
        if s0 == s1 {
            return Err(SourceError::InvalidSpec(format!(
                "pair symbols must differ, got {s0} twice"
            ))
            .into());
        }
        Ok(Self { s0, s1 })
    }

    pub fn binary() -> Self {
        Self { s0: 0, s1: 1 }
    }

    pub fn s0(&self) -> Symbol {
        self.s0
    }

    pub fn s1(&self) -> Symbol {
        self.s1
    }

    fn bit(&self, s: Symbol) -> Option<u64> {
        if s == self.s0 {
            Some(0)
        } else if s == self.s1 {
            Some(1)
        } else {
            None
        }
    }
}

impl TryFrom<[Symbol; 2]> for SymbolPair {
    type Error = LangError;

    fn try_from(v: [Symbol; 2]) -> Result<Self, Self::Error> {
        Self::new(v[0], v[1])
    }
}

impl From<SymbolPair> for [Symbol; 2] {
    fn from(p: SymbolPair) -> Self {
        [p.s0, p.s1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub pattern_hex: String,
    pub shift: i64,
}

impl Witness {
    pub fn pattern(&self) -> Option<u64> {
        u64::from_str_radix(&self.pattern_hex, 16).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetSpan {
    pub start: i64,
    pub end: i64,
}

impl From<&ShiftBudget> for BudgetSpan {
    fn from(b: &ShiftBudget) -> Self {
        Self {
            start: b.start,
            end: b.end,
        }
    }
}

/// A free set with one witness shift per binary pattern, ascending by pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeSetCertificate {
    pub coords: CoordinateSet,
    pub pair: SymbolPair,
    pub witnesses: Vec<Witness>,
    pub budget: BudgetSpan,
    pub verified: bool,
    /// Some shift was skipped for ambiguity while scanning.
    pub tainted: bool,
}

impl FreeSetCertificate {
    pub fn size(&self) -> usize {
        self.coords.len()
    }
}

/// The binary patterns of `{s0, s1}^A` that no in-budget shift realizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingPatterns {
    pub coords: CoordinateSet,
    pub pair: SymbolPair,
    #[serde(with = "hex_list")]
    pub missing: Vec<u64>,
    pub realized: u64,
    pub budget: BudgetSpan,
    pub tainted: bool,
}

mod hex_list {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|p| format!("{p:x}")))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|h| u64::from_str_radix(h, 16).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Freeness {
    Free(FreeSetCertificate),
    Missing(MissingPatterns),
}

impl Freeness {
    pub fn certificate(&self) -> Option<&FreeSetCertificate> {
        match self {
            Freeness::Free(c) => Some(c),
            Freeness::Missing(_) => None,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Freeness::Free(_))
    }

    pub fn tainted(&self) -> bool {
        match self {
            Freeness::Free(c) => c.tainted,
            Freeness::Missing(m) => m.tainted,
        }
    }
}

/// Distinct restrictions of translates to a window, as bitmasks over the
/// window positions, each with its smallest shift.
struct Rows {
    /// `(bits, valid, ambiguous, shift)`: `valid` marks positions carrying a
    /// pair symbol, `bits` which of them carry `s1`.
    rows: Vec<(u64, u64, u64, i64)>,
}

fn require_integers(source: &SymbolicSource) -> Result<(), LangError> {
    if source.domain() != IndexDomain::Integers {
        return Err(
            SourceError::DomainMismatch("free sets need an integer-indexed source".into()).into(),
        );
    }
    Ok(())
}

impl Rows {
    fn scan(
        source: &SymbolicSource,
        window: &CoordinateSet,
        pair: SymbolPair,
        shifts: &ShiftBudget,
    ) -> Result<Self, LangError> {
        require_integers(source)?;
        if shifts.is_empty() {
            return Err(LangError::EmptyBudget);
        }
        let (lo, hi) = (window.min().unwrap_or(0), window.max().unwrap_or(0));
        let (cells, base) = cover(source, shifts, lo, hi)?;
        let offsets: Vec<usize> = window
            .as_slice()
            .iter()
            .map(|a| (a - lo) as usize)
            .collect();
        let parts: Vec<HashMap<(u64, u64, u64), i64>> =
            shard_ranges(shifts.as_range(), shifts.workers)
                .into_par_iter()
                .map(|r| {
                    let mut seen: HashMap<(u64, u64, u64), i64> = HashMap::new();
                    for m in r {
                        let start = (m + lo - base) as usize;
                        let (mut bits, mut valid, mut amb) = (0u64, 0u64, 0u64);
                        for (i, off) in offsets.iter().enumerate() {
                            match cells[start + off] {
                                None => amb |= 1 << i,
                                Some(s) => {
                                    if let Some(b) = pair.bit(s) {
                                        valid |= 1 << i;
                                        bits |= b << i;
                                    }
                                }
                            }
                        }
                        seen.entry((bits, valid, amb)).or_insert(m);
                    }
                    seen
                })
                .collect();
        let mut merged: HashMap<(u64, u64, u64), i64> = HashMap::new();
        for part in parts {
            for (k, m) in part {
                let e = merged.entry(k).or_insert(m);
                *e = (*e).min(m);
            }
        }
        let mut rows: Vec<(u64, u64, u64, i64)> = merged
            .into_iter()
            .map(|((b, v, a), m)| (b, v, a, m))
            .collect();
        rows.sort_unstable_by_key(|r| r.3);
        Ok(Self { rows })
    }

    fn tainted(&self, mask: u64) -> bool {
        self.rows.iter().any(|r| r.2 & mask != 0)
    }

    /// True iff every pattern on `mask` is realized.
    fn covers(&self, mask: u64, seen: &mut Vec<u64>) -> bool {
        let k = mask.count_ones();
        let need = 1usize << k;
        seen.clear();
        seen.resize(need.div_ceil(64), 0);
        let mut count = 0;
        for &(bits, valid, _, _) in &self.rows {
            if valid & mask != mask {
                continue;
            }
            let p = extract_bits(bits, mask) as usize;
            if seen[p / 64] >> (p % 64) & 1 == 0 {
                seen[p / 64] |= 1 << (p % 64);
                count += 1;
                if count == need {
                    return true;
                }
            }
        }
        false
    }

    /// Smallest witness shift per pattern on `mask`.
    fn witnesses(&self, mask: u64) -> Vec<Option<i64>> {
        let mut out = vec![None; 1usize << mask.count_ones()];
        for &(bits, valid, _, m) in &self.rows {
            if valid & mask == mask {
                let slot = &mut out[extract_bits(bits, mask) as usize];
                if slot.is_none_or(|w| m < w) {
                    *slot = Some(m);
                }
            }
        }
        out
    }
}

/// Gathers the bits of `x` selected by `mask` into the low bits.
fn extract_bits(x: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    let mut i = 0;
    while m != 0 {
        let low = m.trailing_zeros();
        out |= (x >> low & 1) << i;
        i += 1;
        m &= m - 1;
    }
    out
}

fn certificate_from(
    source: &SymbolicSource,
    rows: &Rows,
    window: &CoordinateSet,
    mask: u64,
    pair: SymbolPair,
    shifts: &ShiftBudget,
) -> Result<Freeness, LangError> {
    let coords = window.select(mask);
    let witnesses = rows.witnesses(mask);
    let tainted = rows.tainted(mask);
    let missing: Vec<u64> = witnesses
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(p, _)| p as u64)
        .collect();
    if !missing.is_empty() {
        return Ok(Freeness::Missing(MissingPatterns {
            coords,
            pair,
            realized: (witnesses.len() - missing.len()) as u64,
            missing,
            budget: shifts.into(),
            tainted,
        }));
    }
    let mut cert = FreeSetCertificate {
        coords,
        pair,
        witnesses: witnesses
            .into_iter()
            .enumerate()
            .map(|(p, w)| Witness {
                pattern_hex: format!("{p:x}"),
                shift: w.expect("all patterns realized"),
            })
            .collect(),
        budget: shifts.into(),
        verified: false,
        tainted,
    };
    cert.verified = verify_certificate(source, &cert);
    Ok(Freeness::Free(cert))
}

/// Decides whether `coords` is free over the budget.
pub fn is_free(
    source: &SymbolicSource,
    coords: &CoordinateSet,
    pair: SymbolPair,
    shifts: &ShiftBudget,
) -> Result<Freeness, LangError> {
    if coords.len() > MAX_FREE_SET {
        return Err(LangError::WindowTooLarge {
            size: coords.len(),
            limit: MAX_FREE_SET,
        });
    }
    let rows = Rows::scan(source, coords, pair, shifts)?;
    let full = if coords.is_empty() {
        0
    } else {
        u64::MAX >> (64 - coords.len())
    };
    certificate_from(source, &rows, coords, full, pair, shifts)
}

/// Faults found when re-evaluating a certificate; empty means it holds.
///
/// Every witness is re-evaluated point by point through [`SymbolicSource::eval`],
/// independently of the scan that produced it.
pub fn check_certificate(source: &SymbolicSource, cert: &FreeSetCertificate) -> Vec<String> {
    let mut faults = Vec::new();
    let k = cert.coords.len();
    if k > MAX_FREE_SET {
        return vec![format!("{k} coordinates exceed the limit {MAX_FREE_SET}")];
    }
    let need = 1usize << k;
    let mut seen = vec![false; need];
    for w in &cert.witnesses {
        let Some(p) = w.pattern().filter(|p| (*p as usize) < need) else {
            faults.push(format!("bad pattern `{}`", w.pattern_hex));
            continue;
        };
        if std::mem::replace(&mut seen[p as usize], true) {
            faults.push(format!("pattern {p:x} listed twice"));
        }
        if w.shift < cert.budget.start || w.shift >= cert.budget.end {
            faults.push(format!("shift {} outside the budget", w.shift));
        }
        for (i, a) in cert.coords.as_slice().iter().enumerate() {
            let expected = if p >> i & 1 == 1 {
                cert.pair.s1
            } else {
                cert.pair.s0
            };
            let Some(g) = a.checked_add(w.shift) else {
                faults.push(format!("shift {} overflows", w.shift));
                break;
            };
            match source.eval(&Index::Z(g)) {
                Ok(s) if s == expected => {}
                Ok(s) => {
                    faults.push(format!(
                        "pattern {p:x}: symbol {s} at {g}, expected {expected}"
                    ));
                    break;
                }
                Err(e) if e.is_ambiguous() => {
                    faults.push(format!(
                        "pattern {p:x}: tainted, ambiguous evaluation at {g}"
                    ));
                    break;
                }
                Err(e) => {
                    faults.push(format!("pattern {p:x}: {e}"));
                    break;
                }
            }
        }
    }
    if let Some(p) = seen.iter().position(|s| !s) {
        faults.push(format!("pattern {p:x} has no witness"));
    }
    faults
}

pub fn verify_certificate(source: &SymbolicSource, cert: &FreeSetCertificate) -> bool {
    check_certificate(source, cert).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub window: CoordinateSet,
    pub pair: SymbolPair,
    pub best: FreeSetCertificate,
    pub k_star: usize,
    /// No free set of size `k* + 1` exists in the window at this budget.
    pub exhaustive: bool,
    pub nodes: u64,
    pub budget_hit: bool,
    pub k_max: usize,
    pub node_budget: u64,
    pub tainted: bool,
}

struct Search<'a> {
    rows: &'a Rows,
    n: usize,
    k_max: usize,
    node_budget: u64,
    nodes: u64,
    hit: bool,
    best: (usize, u64),
    scratch: Vec<u64>,
}

impl Search<'_> {
    /// Extends the free set `mask` (largest position `< next`) by later positions.
    fn extend(&mut self, mask: u64, size: usize, next: usize) {
        for c in next..self.n {
            if self.hit || self.best.0 >= self.k_max {
                return;
            }
            if size + (self.n - c) <= self.best.0 {
                return;
            }
            if self.nodes >= self.node_budget {
                self.hit = true;
                return;
            }
            self.nodes += 1;
            let cand = mask | 1 << c;
            if self.rows.covers(cand, &mut self.scratch) {
                if size + 1 > self.best.0 {
                    self.best = (size + 1, cand);
                }
                if size + 1 < self.k_max {
                    self.extend(cand, size + 1, c + 1);
                }
            }
        }
    }
}

/// Largest free subset of `window`, searched depth first.
///
/// Coordinates are tried in ascending order and only free sets are extended,
/// since a superset of a non-free set is never free. The search stops at
/// size `k_max` or after `node_budget` freeness checks.
pub fn max_free_size(
    source: &SymbolicSource,
    window: &CoordinateSet,
    pair: SymbolPair,
    shifts: &ShiftBudget,
    k_max: usize,
    node_budget: u64,
) -> Result<SearchReport, LangError> {
    let rows = Rows::scan(source, window, pair, shifts)?;
    let k_max = k_max.min(window.len()).min(MAX_FREE_SET);
    let mut search = Search {
        rows: &rows,
        n: window.len(),
        k_max,
        node_budget,
        nodes: 0,
        hit: false,
        best: (0, 0),
        scratch: Vec::new(),
    };
    search.extend(0, 0, 0);
    let (k_star, mask) = search.best;
    let (nodes, hit) = (search.nodes, search.hit);
    let best = match certificate_from(source, &rows, window, mask, pair, shifts)? {
        Freeness::Free(c) => c,
        Freeness::Missing(_) => unreachable!("search only records free sets"),
    };
    let full_mask = if window.is_empty() {
        0
    } else {
        u64::MAX >> (64 - window.len())
    };
    Ok(SearchReport {
        window: window.clone(),
        pair,
        best,
        k_star,
        exhaustive: !hit && (k_star < k_max || k_star == window.len()),
        nodes,
        budget_hit: hit,
        k_max,
        node_budget,
        tainted: rows.tainted(full_mask),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub length: usize,
    pub k_star: usize,
    pub ratio: f64,
    pub exhaustive: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub rows: Vec<DensityRow>,
    pub threshold: f64,
    /// `k*(L)/L >= threshold` with exhaustive searches on the last three lengths.
    pub positive_density: bool,
    pub tainted: bool,
    /// Certificates of the best sets, one per length.
    pub certificates: Vec<FreeSetCertificate>,
}

/// `k*` on `{0, …, L-1}` for each length, with `k_max = L`.
pub fn free_density_profile(
    source: &SymbolicSource,
    lengths: &[usize],
    pair: SymbolPair,
    shifts: &ShiftBudget,
    node_budget: u64,
) -> Result<DensityProfile, LangError> {
    if lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LangError::InvalidWindow("lengths must increase".into()));
    }
    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    let mut tainted = false;
    for &l in lengths {
        let window = CoordinateSet::contiguous(l)?;
        let report = max_free_size(source, &window, pair, shifts, l, node_budget)?;
        tainted |= report.tainted;
        rows.push(DensityRow {
            length: l,
            k_star: report.k_star,
            ratio: if l == 0 {
                0.0
            } else {
                report.k_star as f64 / l as f64
            },
            exhaustive: report.exhaustive,
            nodes: report.nodes,
        });
        certificates.push(report.best);
    }
    let positive_density = rows.len() >= DENSITY_WINDOWS
        && rows[rows.len() - DENSITY_WINDOWS..]
            .iter()
            .all(|r| r.ratio >= DENSITY_THRESHOLD && r.exhaustive);
    Ok(DensityProfile {
        rows,
        threshold: DENSITY_THRESHOLD,
        positive_density,
        tainted,
        certificates,
    })
}
