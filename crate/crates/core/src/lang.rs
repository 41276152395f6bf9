//! Finite languages of a source: restrictions of orbit translates to a
//! coordinate set, word-complexity tables and projection counts.
//!
//! Patterns are packed into a `u128`, `bits_per_symbol` bits per coordinate,
//! the smallest coordinate in the least-significant position. A shift whose
//! window touches an ambiguous evaluation is skipped and counted; any skip
//! marks the result tainted.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sources::{shard_ranges, Cell, Index, IndexDomain, SourceError, Symbol, SymbolicSource};

/// Largest coordinate set accepted anywhere.
pub const MAX_WINDOW: usize = 64;

/// Largest window of the refinement counter (complexity and entropy tables).
pub const MAX_TABLE_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LangError {
    #[error("window of {size} coordinates exceeds the limit {limit}")]
    WindowTooLarge { size: usize, limit: usize },
    #[error("invalid coordinate set: {0}")]
    InvalidWindow(String),
    #[error("empty shift budget")]
    EmptyBudget,
    #[error("shift budget overflows the index range")]
    BudgetOverflow,
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// A half-open range of shifts `[start, end)`, plus the number of shards it
/// is scanned with. The shard count never changes results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftBudget {
    pub start: i64,
    pub end: i64,
    #[serde(skip, default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

impl ShiftBudget {
    pub fn range(start: i64, end: i64) -> Self {
        Self {
            start,
            end,
            workers: rayon::current_num_threads(),
        }
    }

    /// `[0, m)`.
    pub fn first(m: u64) -> Self {
        Self::range(0, m as i64)
    }

    /// `[-⌊m/2⌋, m - ⌊m/2⌋)`: `m` shifts around the origin.
    pub fn centered(m: u64) -> Self {
        let m = m as i64;
        Self::range(-(m / 2), m - m / 2)
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn len(&self) -> u64 {
        (self.end - self.start).max(0) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn as_range(&self) -> Range<i64> {
        self.start..self.end
    }

    /// Same range, shifted so that it starts at `start`.
    pub fn starting_at(mut self, start: i64) -> Self {
        let len = self.end - self.start;
        self.start = start;
        self.end = start + len;
        self
    }
}

/// Sorted, distinct integer coordinates, at most [`MAX_WINDOW`] of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct CoordinateSet(Vec<i64>);

impl CoordinateSet {
    /// Sorts `coords`; duplicates are rejected.
    pub fn new(mut coords: Vec<i64>) -> Result<Self, LangError> {
        if coords.len() > MAX_WINDOW {
            return Err(LangError::WindowTooLarge {
                size: coords.len(),
                limit: MAX_WINDOW,
            });
        }
        coords.sort_unstable();
        if let Some(w) = coords.windows(2).find(|w| w[0] == w[1]) {
            return Err(LangError::InvalidWindow(format!(
                "duplicate coordinate {}",
                w[0]
            )));
        }
        Ok(Self(coords))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `{0, 1, …, n-1}`.
    pub fn contiguous(n: usize) -> Result<Self, LangError> {
        Self::new((0..n as i64).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &CoordinateSet) -> bool {
        self.0.iter().all(|x| other.contains(*x))
    }

    pub fn min(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.0.last().copied()
    }

    /// The subset picked by the bits of `mask` (bit `i` is the `i`-th smallest).
    pub fn select(&self, mask: u64) -> CoordinateSet {
        CoordinateSet(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| *x)
                .collect(),
        )
    }
}

impl TryFrom<Vec<i64>> for CoordinateSet {
    type Error = LangError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<CoordinateSet> for Vec<i64> {
    fn from(c: CoordinateSet) -> Self {
        c.0
    }
}

impl fmt::Display for CoordinateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `max(1, ⌈log2 alphabet⌉)`.
pub fn bits_per_symbol(alphabet: usize) -> u32 {
    (usize::BITS - alphabet.saturating_sub(1).leading_zeros()).max(1)
}

fn check_packable(len: usize, alphabet: usize) -> Result<(), LangError> {
    let bps = bits_per_symbol(alphabet) as usize;
    if len > MAX_WINDOW || len * bps > 128 {
        let limit = MAX_WINDOW.min(128 / bps);
        return Err(LangError::WindowTooLarge { size: len, limit });
    }
    Ok(())
}

/// Packs symbols, first symbol in the lowest bits.
pub fn pack(symbols: &[Symbol], alphabet: usize) -> u128 {
    let bps = bits_per_symbol(alphabet);
    symbols.iter().enumerate().fold(0u128, |acc, (i, s)| {
        acc | (u128::from(*s) << (i as u32 * bps))
    })
}

pub fn unpack(pattern: u128, len: usize, alphabet: usize) -> Vec<Symbol> {
    let bps = bits_per_symbol(alphabet);
    let mask = (1u128 << bps) - 1;
    (0..len)
        .map(|i| ((pattern >> (i as u32 * bps)) & mask) as Symbol)
        .collect()
}

/// Renders a pattern as a digit string, first coordinate first.
pub fn pattern_string(pattern: u128, len: usize, alphabet: usize) -> String {
    unpack(pattern, len, alphabet)
        .iter()
        .map(|s| char::from_digit(u32::from(*s), 36).unwrap_or('?'))
        .collect()
}

mod hex_patterns {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use std::collections::BTreeSet;

    pub fn serialize<S: Serializer>(set: &BTreeSet<u128>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(set.iter().map(|p| format!("{p:x}")))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeSet<u128>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|h| u128::from_str_radix(h, 16).map_err(D::Error::custom))
            .collect()
    }
}

/// Coordinate window of a store: integers, or points of `Z^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Window {
    Integers(CoordinateSet),
    Lattice(Vec<Vec<i64>>),
}

impl Window {
    pub fn len(&self) -> usize {
        match self {
            Window::Integers(c) => c.len(),
            Window::Lattice(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Observed restrictions of orbit translates to a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternStore {
    pub window: Window,
    pub alphabet: usize,
    #[serde(with = "hex_patterns")]
    pub patterns: BTreeSet<u128>,
    /// Integer ranges are `[start, end)`; lattice boxes list per-axis radii.
    pub budget: BudgetRecord,
    pub skipped: u64,
    pub tainted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetRecord {
    Range { start: i64, end: i64 },
    Box { radii: Vec<u64> },
}

impl From<&ShiftBudget> for BudgetRecord {
    fn from(b: &ShiftBudget) -> Self {
        BudgetRecord::Range {
            start: b.start,
            end: b.end,
        }
    }
}

impl PatternStore {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, pattern: u128) -> bool {
        self.patterns.contains(&pattern)
    }

    pub fn strings(&self) -> Vec<String> {
        self.patterns
            .iter()
            .map(|p| pattern_string(*p, self.window.len(), self.alphabet))
            .collect()
    }
}

fn require_integers(source: &SymbolicSource) -> Result<(), LangError> {
    match source.domain() {
        IndexDomain::Integers => Ok(()),
        other => Err(SourceError::DomainMismatch(format!(
            "integer windows on a source indexed by {other:?}"
        ))
        .into()),
    }
}

/// Cells covering `shift + offset` for every shift in the budget and offset
/// in `[lo, hi]`; the returned base is the index of the first cell.
pub(crate) fn cover(
    source: &SymbolicSource,
    shifts: &ShiftBudget,
    lo: i64,
    hi: i64,
) -> Result<(Vec<Cell>, i64), LangError> {
    let first = shifts
        .start
        .checked_add(lo)
        .ok_or(LangError::BudgetOverflow)?;
    let last = (shifts.end - 1)
        .checked_add(hi)
        .and_then(|x| x.checked_add(1))
        .ok_or(LangError::BudgetOverflow)?;
    let cells = source.materialize(first..last, shifts.workers)?;
    Ok((cells, first))
}

fn check_symbol(s: Symbol, alphabet: usize) -> Result<Symbol, LangError> {
    if usize::from(s) >= alphabet {
        return Err(SourceError::InvalidSpec(format!(
            "symbol {s} outside the alphabet of size {alphabet}"
        ))
        .into());
    }
    Ok(s)
}

/// All patterns `(eval(a + m))_{a ∈ K}` over the shift budget.
pub fn extract_patterns(
    source: &SymbolicSource,
    window: &CoordinateSet,
    shifts: &ShiftBudget,
) -> Result<PatternStore, LangError> {
    require_integers(source)?;
    if shifts.is_empty() {
        return Err(LangError::EmptyBudget);
    }
    let alphabet = source.alphabet_size();
    check_packable(window.len(), alphabet)?;
    let (lo, hi) = (window.min().unwrap_or(0), window.max().unwrap_or(0));
    let (cells, base) = cover(source, shifts, lo, hi)?;
    let bps = bits_per_symbol(alphabet);
    let offsets: Vec<usize> = window
        .as_slice()
        .iter()
        .map(|a| (a - lo) as usize)
        .collect();

    let parts = shard_ranges(shifts.as_range(), shifts.workers)
        .into_par_iter()
        .map(|r| -> Result<(HashSet<u128>, u64), LangError> {
            let mut seen = HashSet::new();
            let mut skipped = 0;
            'shift: for m in r {
                let start = (m + lo - base) as usize;
                let mut pattern = 0u128;
                for (i, off) in offsets.iter().enumerate() {
                    match cells[start + off] {
                        Some(s) => {
                            pattern |= u128::from(check_symbol(s, alphabet)?) << (i as u32 * bps)
                        }
                        None => {
                            skipped += 1;
                            continue 'shift;
                        }
                    }
                }
                seen.insert(pattern);
            }
            Ok((seen, skipped))
        })
        .collect::<Vec<_>>();

    let mut patterns = BTreeSet::new();
    let mut skipped = 0;
    for part in parts {
        let (seen, s) = part?;
        patterns.extend(seen);
        skipped += s;
    }
    Ok(PatternStore {
        window: Window::Integers(window.clone()),
        alphabet,
        patterns,
        budget: shifts.into(),
        skipped,
        tainted: skipped > 0,
    })
}

/// Axis-aligned box of lattice shifts `∏ [-r_i, r_i]`, centered at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub radii: Vec<u64>,
}

impl LatticeBox {
    pub fn cube(dim: usize, radius: u64) -> Self {
        Self {
            radii: vec![radius; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    pub fn size(&self) -> u64 {
        self.radii.iter().map(|r| 2 * r + 1).product()
    }

    /// The `i`-th point in lexicographic order, first axis slowest.
    pub fn point(&self, mut i: u64) -> Vec<i64> {
        let mut out = vec![0; self.radii.len()];
        for (axis, r) in self.radii.iter().enumerate().rev() {
            let side = 2 * r + 1;
            out[axis] = (i % side) as i64 - *r as i64;
            i /= side;
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.size()).map(|i| self.point(i))
    }
}

/// Patterns of a `Z^k`-indexed source on a lattice window.
pub fn extract_lattice_patterns(
    source: &SymbolicSource,
    window: &[Vec<i64>],
    shifts: &LatticeBox,
    workers: usize,
) -> Result<PatternStore, LangError> {
    let dim = match source.domain() {
        IndexDomain::Lattice(k) => k,
        IndexDomain::Integers => 1,
        IndexDomain::FreeGroup => {
            return Err(
                SourceError::DomainMismatch("lattice windows on a free group".into()).into(),
            )
        }
    };
    if window.iter().any(|p| p.len() != dim) || shifts.dim() != dim {
        return Err(LangError::InvalidWindow(format!(
            "lattice points must have {dim} coordinates"
        )));
    }
    let mut sorted = window.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != window.len() {
        return Err(LangError::InvalidWindow("duplicate lattice point".into()));
    }
    let alphabet = source.alphabet_size();
    check_packable(sorted.len(), alphabet)?;
    if shifts.size() == 0 {
        return Err(LangError::EmptyBudget);
    }
    let bps = bits_per_symbol(alphabet);
    let total = shifts.size() as i64;
    let parts = shard_ranges(0..total, workers)
        .into_par_iter()
        .map(|r| -> Result<(HashSet<u128>, u64), LangError> {
            let mut seen = HashSet::new();
            let mut skipped = 0;
            'shift: for i in r {
                let m = shifts.point(i as u64);
                let mut pattern = 0u128;
                for (j, a) in sorted.iter().enumerate() {
                    let g: Vec<i64> = a.iter().zip(&m).map(|(x, y)| x + y).collect();
                    let index = if dim == 1 && source.domain() == IndexDomain::Integers {
                        Index::Z(g[0])
                    } else {
                        Index::Lattice(g)
                    };
                    match source.eval(&index) {
                        Ok(s) => {
                            pattern |= u128::from(check_symbol(s, alphabet)?) << (j as u32 * bps)
                        }
                        Err(e) if e.is_ambiguous() => {
                            skipped += 1;
                            continue 'shift;
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                seen.insert(pattern);
            }
            Ok((seen, skipped))
        })
        .collect::<Vec<_>>();
    let mut patterns = BTreeSet::new();
    let mut skipped = 0;
    for part in parts {
        let (seen, s) = part?;
        patterns.extend(seen);
        skipped += s;
    }
    Ok(PatternStore {
        window: Window::Lattice(sorted),
        alphabet,
        patterns,
        budget: BudgetRecord::Box {
            radii: shifts.radii.clone(),
        },
        skipped,
        tainted: skipped > 0,
    })
}

/// Pattern counts on the nested windows `{c_0}, {c_0, c_1}, …`.
///
/// Each shift carries a class id for its restriction to the current prefix;
/// adding a coordinate refines the classes through a dense
/// `(class, symbol) → class` table. Entry `j` of the result is the number of
/// classes after `j + 1` coordinates, with the number of shifts skipped so far.
pub(crate) fn nested_counts(
    source: &SymbolicSource,
    order: &[i64],
    shifts: &ShiftBudget,
) -> Result<Vec<(u64, u64)>, LangError> {
    require_integers(source)?;
    if shifts.is_empty() {
        return Err(LangError::EmptyBudget);
    }
    if order.len() > MAX_TABLE_LEN {
        return Err(LangError::WindowTooLarge {
            size: order.len(),
            limit: MAX_TABLE_LEN,
        });
    }
    let mut seen = order.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(LangError::InvalidWindow("repeated coordinate".into()));
    }
    if order.is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi) = (seen[0], seen[seen.len() - 1]);
    let (cells, base) = cover(source, shifts, lo, hi)?;
    let alphabet = source.alphabet_size();
    const BAD: u32 = u32::MAX;
    let len = shifts.len() as usize;
    let mut class = vec![0u32; len];
    let mut classes = 1usize;
    let mut skipped = 0u64;
    let mut table: Vec<u32> = Vec::new();
    let mut out = Vec::with_capacity(order.len());
    for &k in order {
        table.clear();
        table.resize(classes * alphabet, BAD);
        let mut next = 0u32;
        let offset = (shifts.start + k - base) as usize;
        for (i, c) in class.iter_mut().enumerate() {
            if *c == BAD {
                continue;
            }
            match cells[offset + i] {
                None => {
                    *c = BAD;
                    skipped += 1;
                }
                Some(s) => {
                    let slot = *c as usize * alphabet + usize::from(check_symbol(s, alphabet)?);
                    if table[slot] == BAD {
                        table[slot] = next;
                        next += 1;
                    }
                    *c = table[slot];
                }
            }
        }
        classes = next as usize;
        out.push((u64::from(next), skipped));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub p_n: u64,
    pub skipped: u64,
}

/// Word complexity `p(n)`: the number of distinct factors on `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityTable {
    pub rows: Vec<ComplexityRow>,
    pub budget: ShiftBudget,
    pub tainted: bool,
}

impl ComplexityTable {
    pub fn p(&self, n: usize) -> Option<u64> {
        self.rows.get(n.checked_sub(1)?).map(|r| r.p_n)
    }

    /// Columns `n,p_n,budget,tainted`; `budget` is the number of shifts.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p_n,budget,tainted\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.n,
                r.p_n,
                self.budget.len(),
                r.skipped > 0
            ));
        }
        out
    }
}

pub fn complexity_table(
    source: &SymbolicSource,
    n_max: usize,
    shifts: &ShiftBudget,
) -> Result<ComplexityTable, LangError> {
    let order: Vec<i64> = (0..n_max as i64).collect();
    let counts = nested_counts(source, &order, shifts)?;
    let rows: Vec<ComplexityRow> = counts
        .into_iter()
        .enumerate()
        .map(|(i, (p_n, skipped))| ComplexityRow {
            n: i + 1,
            p_n,
            skipped,
        })
        .collect();
    Ok(ComplexityTable {
        tainted: rows.iter().any(|r| r.skipped > 0),
        rows,
        budget: *shifts,
    })
}

/// Growth class of a count sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum GrowthLabel {
    Bounded,
    /// Exponent below the linear band.
    Sublinear {
        exponent: f64,
    },
    Linear {
        exponent: f64,
    },
    Polynomial {
        exponent: f64,
    },
    /// `count ≈ c · 2^{rate·|K|}`.
    Exponential {
        rate: f64,
    },
}

impl GrowthLabel {
    pub fn is_exponential(&self) -> bool {
        matches!(self, GrowthLabel::Exponential { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GrowthLabel::Bounded => "bounded",
            GrowthLabel::Sublinear { .. } => "sublinear",
            GrowthLabel::Linear { .. } => "linear",
            GrowthLabel::Polynomial { .. } => "polynomial",
            GrowthLabel::Exponential { .. } => "exponential",
        }
    }
}

/// Thresholds of [`fit_growth`].
pub const EXPONENTIAL_RATE: f64 = 0.5;
pub const POLYNOMIAL_EXPONENT: f64 = 1.5;
pub const LINEAR_EXPONENT: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub label: GrowthLabel,
    /// Slope of `ln count` against `ln |K|`.
    pub exponent: f64,
    /// Slope of `log2 count` against `|K|`.
    pub rate: f64,
    pub power_rss: f64,
    pub exponential_rss: f64,
    /// Number of trailing points the fit used.
    pub points: usize,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (my + slope * (x - mx));
            r * r
        })
        .sum();
    (slope, rss)
}

/// Labels `(size, count)` points by least squares on log-transformed counts.
///
/// Bounded if the last three counts agree. Otherwise both `count = c·|K|^e`
/// and `count = c·2^{r|K|}` are fitted on the trailing half of the points
/// (at least three when available): exponential if `r >= 0.5` and its
/// residual is smaller, then polynomial for `e >= 1.5`, linear for
/// `e >= 0.75`, sublinear below.
pub fn fit_growth(points: &[(usize, u64)]) -> GrowthFit {
    let pts: Vec<(usize, u64)> = points.iter().copied().filter(|(k, _)| *k > 0).collect();
    let bounded = |points| GrowthFit {
        label: GrowthLabel::Bounded,
        exponent: 0.0,
        rate: 0.0,
        power_rss: 0.0,
        exponential_rss: 0.0,
        points,
    };
    if pts.len() < 2 {
        return bounded(pts.len());
    }
    let tail_len = pts.len().min(3).max(pts.len().div_ceil(2));
    let tail = &pts[pts.len() - tail_len..];
    let last = &pts[pts.len().saturating_sub(3)..];
    if last.iter().all(|(_, c)| *c == last[0].1) {
        return bounded(last.len());
    }
    let ln_counts: Vec<f64> = tail
        .iter()
        .map(|(_, c)| (*c).max(1) as f64)
        .map(f64::ln)
        .collect();
    let ln_sizes: Vec<f64> = tail.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let scaled: Vec<f64> = tail
        .iter()
        .map(|(k, _)| *k as f64 * std::f64::consts::LN_2)
        .collect();
    let (exponent, power_rss) = least_squares(&ln_sizes, &ln_counts);
    let (rate, exponential_rss) = least_squares(&scaled, &ln_counts);
    let label = if rate >= EXPONENTIAL_RATE && exponential_rss < power_rss {
        GrowthLabel::Exponential { rate }
    } else if exponent >= POLYNOMIAL_EXPONENT {
        GrowthLabel::Polynomial { exponent }
    } else if exponent >= LINEAR_EXPONENT {
        GrowthLabel::Linear { exponent }
    } else {
        GrowthLabel::Sublinear { exponent }
    };
    GrowthFit {
        label,
        exponent,
        rate,
        power_rss,
        exponential_rss,
        points: tail_len,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub size: usize,
    pub count: u64,
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionGrowth {
    pub prefixes: Vec<CoordinateSet>,
    pub points: Vec<GrowthPoint>,
    pub fit: GrowthFit,
    pub budget: ShiftBudget,
    pub tainted: bool,
}

/// Pattern counts along strictly nested coordinate sets, with a growth fit.
pub fn projection_growth(
    source: &SymbolicSource,
    prefixes: &[CoordinateSet],
    shifts: &ShiftBudget,
) -> Result<ProjectionGrowth, LangError> {
    let mut order: Vec<i64> = Vec::new();
    let mut marks = Vec::with_capacity(prefixes.len());
    for (i, k) in prefixes.iter().enumerate() {
        if i > 0 && !(prefixes[i - 1].is_subset(k) && prefixes[i - 1].len() < k.len()) {
            return Err(LangError::InvalidWindow(format!(
                "prefix {} is not strictly nested in {}",
                prefixes[i - 1],
                k
            )));
        }
        let fresh: Vec<i64> = k
            .as_slice()
            .iter()
            .copied()
            .filter(|x| !order.contains(x))
            .collect();
        order.extend(fresh);
        marks.push(k.len());
    }
    let counts = nested_counts(source, &order, shifts)?;
    let points: Vec<GrowthPoint> = marks
        .iter()
        .map(|&size| {
            let (count, skipped) = if size == 0 { (1, 0) } else { counts[size - 1] };
            GrowthPoint {
                size,
                count,
                skipped,
            }
        })
        .collect();
    let fit = fit_growth(&points.iter().map(|p| (p.size, p.count)).collect::<Vec<_>>());
    Ok(ProjectionGrowth {
        prefixes: prefixes.to_vec(),
        tainted: points.iter().any(|p| p.skipped > 0),
        points,
        fit,
        budget: *shifts,
    })
}

/// Families of nested prefixes of an intended infinite coordinate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PrefixFamily {
    /// `{0}, {0,1}, {0,1,2}, …`
    Contiguous,
    /// `{0}, {0,1}, {0,1,2}, {0,1,2,4}, …`
    Geometric,
    /// Gaps drawn uniformly from `1..=max_gap` by a seeded generator.
    RandomSparse { seed: u64, max_gap: u32 },
}

impl PrefixFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PrefixFamily::Contiguous => "contiguous",
            PrefixFamily::Geometric => "geometric",
            PrefixFamily::RandomSparse { .. } => "random_sparse",
        }
    }

    pub fn coordinates(&self, n: usize) -> Vec<i64> {
        match *self {
            PrefixFamily::Contiguous => (0..n as i64).collect(),
            PrefixFamily::Geometric => (0..n)
                .map(|i| if i == 0 { 0 } else { 1i64 << (i - 1) })
                .collect(),
            PrefixFamily::RandomSparse { seed, max_gap } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut x = 0i64;
                (0..n)
                    .map(|i| {
                        if i > 0 {
                            x += i64::from(rng.gen_range(1..=max_gap.max(1)));
                        }
                        x
                    })
                    .collect()
            }
        }
    }

    /// The nested prefixes of sizes `1..=n`.
    pub fn prefixes(&self, n: usize) -> Result<Vec<CoordinateSet>, LangError> {
        let coords = self.coordinates(n);
        (1..=n)
            .map(|k| CoordinateSet::new(coords[..k].to_vec()))
            .collect()
    }

    /// The default families used for growth evidence.
    pub fn defaults() -> Vec<PrefixFamily> {
        vec![
            PrefixFamily::Contiguous,
            PrefixFamily::Geometric,
            PrefixFamily::RandomSparse {
                seed: 0x5eed,
                max_gap: 8,
            },
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{IntegerSet, WordKind, WordSource};
    use crate::spec::SourceDocument;

    fn fib() -> SymbolicSource {
        SourceDocument::fibonacci().build().unwrap()
    }

    fn set(v: &[i64]) -> CoordinateSet {
        CoordinateSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn packing_round_trip() {
        assert_eq!(bits_per_symbol(1), 1);
        assert_eq!(bits_per_symbol(2), 1);
        assert_eq!(bits_per_symbol(3), 2);
        assert_eq!(bits_per_symbol(5), 3);
        let w = [2, 0, 1, 2];
        assert_eq!(unpack(pack(&w, 3), 4, 3), w);
        assert_eq!(pack(&[1, 0], 2), 1);
        assert_eq!(pattern_string(0b10, 2, 2), "01");
    }

    #[test]
    fn coordinate_set_rules() {
        assert_eq!(set(&[3, -1, 2]).as_slice(), &[-1, 2, 3]);
        assert!(CoordinateSet::new(vec![1, 1]).is_err());
        assert!(CoordinateSet::new((0..65).collect()).is_err());
        assert_eq!(set(&[1, 5, 9]).select(0b101), set(&[1, 9]));
        let json = serde_json::to_string(&set(&[0, 2])).unwrap();
        assert_eq!(json, "[0,2]");
        assert!(serde_json::from_str::<CoordinateSet>("[2,2]").is_err());
    }

    #[test]
    fn centered_budget() {
        let b = ShiftBudget::centered(41);
        assert_eq!((b.start, b.end, b.len()), (-20, 21, 41));
        assert_eq!(ShiftBudget::first(5).as_range(), 0..5);
    }

    #[test]
    fn constant_source_has_one_pattern() {
        let src = SourceDocument::constant().build().unwrap();
        let store = extract_patterns(&src, &set(&[0, 3, 7]), &ShiftBudget::centered(100)).unwrap();
        assert_eq!(store.len(), 1);
        let t = complexity_table(&src, 10, &ShiftBudget::first(100)).unwrap();
        assert!(t.rows.iter().all(|r| r.p_n == 1));
    }

    #[test]
    fn fibonacci_single_coordinate() {
        let store = extract_patterns(&fib(), &set(&[0]), &ShiftBudget::first(100)).unwrap();
        assert_eq!(store.strings(), vec!["0", "1"]);
        assert!(!store.tainted);
    }

    #[test]
    fn natural_indicator_is_monotone() {
        let src = SymbolicSource::Indicator(IntegerSet::natural());
        let store = extract_patterns(&src, &set(&[0, 5]), &ShiftBudget::range(-20, 21)).unwrap();
        assert_eq!(store.strings(), vec!["00", "01", "11"]);
    }

    #[test]
    fn morse_factors_of_length_two() {
        let src = SourceDocument::morse(20_000).build().unwrap();
        let t = complexity_table(&src, 2, &ShiftBudget::first(10_000)).unwrap();
        assert_eq!(t.p(2), Some(4));
    }

    #[test]
    fn fibonacci_complexity_small() {
        let t = complexity_table(&fib(), 10, &ShiftBudget::first(100_000)).unwrap();
        for r in &t.rows {
            assert_eq!(r.p_n, r.n as u64 + 1);
        }
        assert!(t
            .to_csv()
            .starts_with("n,p_n,budget,tainted\n1,2,100000,false\n"));
    }

    #[test]
    fn refinement_agrees_with_direct_extraction() {
        let sources = [
            fib(),
            SourceDocument::morse(5000).build().unwrap(),
            SymbolicSource::Word(WordSource::new(WordKind::Champernowne, 5000)),
            SourceDocument::kerr_li().build().unwrap(),
        ];
        let order = [0, 3, 1, 7, 2];
        for src in &sources {
            let b = ShiftBudget::first(3000);
            let counts = nested_counts(src, &order, &b).unwrap();
            for j in 0..order.len() {
                let k = CoordinateSet::new(order[..=j].to_vec()).unwrap();
                let direct = extract_patterns(src, &k, &b).unwrap();
                assert_eq!(counts[j].0, direct.len() as u64);
            }
        }
    }

    #[test]
    fn ambiguous_shifts_are_skipped() {
        // shift -1 places coordinate 0 on the cut
        let store = extract_patterns(&fib(), &set(&[0, 1]), &ShiftBudget::range(-3, 50)).unwrap();
        assert_eq!(store.skipped, 2);
        assert!(store.tainted);
        let t = complexity_table(&fib(), 3, &ShiftBudget::range(-3, 50)).unwrap();
        assert_eq!(
            t.rows.iter().map(|r| r.skipped).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert!(t.to_csv().contains(",true\n"));
    }

    #[test]
    fn shard_count_does_not_matter() {
        let src = SourceDocument::morse(50_000).build().unwrap();
        let k = set(&[0, 1, 4, 9, 13]);
        let one = extract_patterns(&src, &k, &ShiftBudget::first(40_000).with_workers(1)).unwrap();
        let many = extract_patterns(&src, &k, &ShiftBudget::first(40_000).with_workers(7)).unwrap();
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&many).unwrap()
        );
    }

    #[test]
    fn store_json_round_trip() {
        let store = extract_patterns(&fib(), &set(&[0, 2]), &ShiftBudget::first(100)).unwrap();
        let json = serde_json::to_string(&store).unwrap();
        assert!(json.contains("\"patterns\":[\"0\",\"1\",\"2\",\"3\"]"));
        let back: PatternStore = serde_json::from_str(&json).unwrap();
        assert_eq!(back, store);
    }

    #[test]
    fn growth_labels() {
        let lin: Vec<(usize, u64)> = (1..=10).map(|k| (k, k as u64 + 1)).collect();
        assert_eq!(fit_growth(&lin).label.name(), "linear");
        let exp: Vec<(usize, u64)> = (1..=10).map(|k| (k, 1u64 << k)).collect();
        let fit = fit_growth(&exp);
        assert_eq!(fit.label, GrowthLabel::Exponential { rate: fit.rate });
        assert!((fit.rate - 1.0).abs() < 1e-12);
        let quad: Vec<(usize, u64)> = (1..=12).map(|k| (k, (k * k) as u64)).collect();
        assert_eq!(fit_growth(&quad).label.name(), "polynomial");
        let flat: Vec<(usize, u64)> = (1..=6).map(|k| (k, 1)).collect();
        assert_eq!(fit_growth(&flat).label, GrowthLabel::Bounded);
        assert_eq!(fit_growth(&[(1, 2)]).label, GrowthLabel::Bounded);
    }

    #[test]
    fn projection_growth_families() {
        let src = fib();
        let prefixes = PrefixFamily::Contiguous.prefixes(10).unwrap();
        let g = projection_growth(&src, &prefixes, &ShiftBudget::first(100_000)).unwrap();
        assert!(g.points.iter().all(|p| p.count <= 2 * p.size as u64));
        assert_eq!(g.fit.label.name(), "linear");

        let champ = SymbolicSource::Word(WordSource::new(WordKind::Champernowne, 200_000));
        let g = projection_growth(&champ, &prefixes, &ShiftBudget::first(100_000)).unwrap();
        assert!(g.points.iter().all(|p| p.count == 1 << p.size));
        assert!(g.fit.label.is_exponential());

        assert_eq!(PrefixFamily::Geometric.coordinates(5), vec![0, 1, 2, 4, 8]);
        let sparse = PrefixFamily::RandomSparse {
            seed: 1,
            max_gap: 5,
        };
        assert_eq!(sparse.coordinates(6), sparse.coordinates(6));
        assert!(
            projection_growth(&src, &[set(&[0, 1]), set(&[0, 2])], &ShiftBudget::first(10))
                .is_err()
        );
    }

    #[test]
    fn lattice_extraction_on_two_generators() {
        let doc = SourceDocument::from_json(
            r#"{"kind":"rotation","bits":128,
                "alphas":[{"kind":"golden"},{"kind":"sqrt_rational","p":2,"q":1}],
                "base":{"kind":"rational","p":1,"q":7},
                "cuts":["0",{"kind":"rational","p":1,"q":2}]}"#,
        )
        .unwrap();
        let src = doc.build().unwrap();
        let window = vec![vec![0, 0], vec![1, 0], vec![0, 1]];
        let store = extract_lattice_patterns(&src, &window, &LatticeBox::cube(2, 20), 4).unwrap();
        assert!(store.len() > 1 && store.len() <= 8);
        assert_eq!(LatticeBox::cube(2, 1).points().count(), 9);
        assert_eq!(LatticeBox::cube(2, 1).point(0), vec![-1, -1]);
    }
}
