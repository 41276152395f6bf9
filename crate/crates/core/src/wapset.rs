//! Finite-horizon probe of Ruppert's criterion for WAP subsets of `Z`.
//!
//! For a candidate set `B` and finite `F ⊆ B`, with `B_N = B ∩ [-N, N]`:
//!
//! ```text
//! S_F(N) = ⋂_{b ∈ F} (b + D) ∩ [-N, N]
//! T_F(N) = ⋂_{b ∈ B_N \ F} (b + D) ∩ [-N, N]
//! ```
//!
//! `D` passes when some `F` drawn from the first `f_max` elements of `B`
//! keeps `|S_F(N) \ T_F(N)|` constant across the last two horizons.
//! Sets are bitsets over the window; every intersection is a word-wise AND.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indep::{max_free_size, SearchReport, SymbolPair};
use crate::lang::{complexity_table, ComplexityTable, CoordinateSet, LangError, ShiftBudget};
use crate::sources::{IntegerSet, SymbolicSource};

/// Largest accepted horizon.
pub const MAX_HORIZON: u64 = 1 << 26;

/// Largest accepted `f_max`.
pub const MAX_F: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WapError {
    #[error(
        "B has only {found} elements within the smallest horizon {horizon}, f_max is {needed}"
    )]
    InsufficientB {
        found: usize,
        needed: usize,
        horizon: u64,
    },
    #[error("invalid probe: {0}")]
    InvalidProbe(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuppertProbe {
    pub d: IntegerSet,
    pub b: IntegerSet,
    pub f_max: usize,
    pub horizons: Vec<u64>,
}

impl RuppertProbe {
    pub fn new(
        d: IntegerSet,
        b: IntegerSet,
        f_max: usize,
        horizons: Vec<u64>,
    ) -> Result<Self, WapError> {
        if horizons.len() < 3 {
            return Err(WapError::InvalidProbe(
                "at least three horizons are required".into(),
            ));
        }
        if horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WapError::InvalidProbe(
                "horizons must increase strictly".into(),
            ));
        }
        if horizons[0] == 0 || *horizons.last().unwrap() > MAX_HORIZON {
            return Err(WapError::InvalidProbe(format!(
                "horizons must lie in 1..={MAX_HORIZON}"
            )));
        }
        if f_max > MAX_F {
            return Err(WapError::InvalidProbe(format!(
                "f_max {f_max} exceeds {MAX_F}"
            )));
        }
        Ok(Self {
            d,
            b,
            f_max,
            horizons,
        })
    }

    /// The first `f_max` elements of `B` ordered by magnitude.
    pub fn pool(&self) -> Result<Vec<i64>, WapError> {
        let horizon = self.horizons[0];
        let pool: Vec<i64> = self
            .b
            .members_by_magnitude(horizon)
            .take(self.f_max)
            .collect();
        if pool.len() < self.f_max {
            return Err(WapError::InsufficientB {
                found: pool.len(),
                needed: self.f_max,
                horizon,
            });
        }
        Ok(pool)
    }
}

#[derive(Debug, Clone)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn ones(len: usize) -> Self {
        let mut b = Self {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        b.trim();
        b
    }

    fn from_fn(len: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            if f(i) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self { words, len }
    }

    fn trim(&mut self) {
        if !self.len.is_multiple_of(64) {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// 64 bits of `self` starting at bit `start` (zero past the end).
    fn word_at(&self, start: usize) -> u64 {
        let (q, r) = (start / 64, start % 64);
        let lo = self.words.get(q).copied().unwrap_or(0);
        if r == 0 {
            lo
        } else {
            let hi = self.words.get(q + 1).copied().unwrap_or(0);
            lo >> r | hi << (64 - r)
        }
    }

    /// `self &= src[offset .. offset + self.len]`.
    fn and_window(&mut self, src: &Bits, offset: usize) {
        for (k, w) in self.words.iter_mut().enumerate() {
            *w &= src.word_at(offset + 64 * k);
        }
        self.trim();
    }

    fn and(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    fn count_and_not(&self, other: &Bits) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & !b).count_ones()))
            .sum()
    }

    fn members(&self, offset: i64) -> Vec<i64> {
        (0..self.len)
            .filter(|i| self.get(*i))
            .map(|i| i as i64 - offset)
            .collect()
    }
}

/// Membership of `D` on `[-2N, 2N]`, with the translate helper for `b + D`.
struct Horizon {
    n: u64,
    d: Bits,
}

impl Horizon {
    fn new(d: &IntegerSet, n: u64) -> Self {
        let n2 = 2 * n as i64;
        Self {
            n,
            d: Bits::from_fn(4 * n as usize + 1, |j| d.contains(j as i64 - n2)),
        }
    }

    fn width(&self) -> usize {
        2 * self.n as usize + 1
    }

    /// `⋂_{b ∈ shifts} (b + D) ∩ [-N, N]`; the whole window when empty.
    fn intersect(&self, shifts: &[i64]) -> Bits {
        let mut acc = Bits::ones(self.width());
        for &b in shifts {
            // bit i is the integer i - N, lying in b + D iff D(i - N - b)
            acc.and_window(&self.d, (self.n as i64 - b) as usize);
        }
        acc
    }

    fn intersect_par(&self, shifts: &[i64]) -> Bits {
        shifts
            .par_chunks(256)
            .map(|chunk| self.intersect(chunk))
            .reduce(
                || Bits::ones(self.width()),
                |mut a, b| {
                    a.and(&b);
                    a
                },
            )
    }
}

/// `S_F(N)` and `T_F(N)` as sorted member lists, for a fixed list standing
/// in for `B_N \ F`. Every `|b| <= N` is required.
pub fn difference_sets(d: &IntegerSet, f: &[i64], rest: &[i64], n: u64) -> (Vec<i64>, Vec<i64>) {
    assert!(
        f.iter().chain(rest).all(|b| b.unsigned_abs() <= n),
        "translates must lie within the horizon"
    );
    let h = Horizon::new(d, n);
    (
        h.intersect(f).members(n as i64),
        h.intersect(rest).members(n as i64),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuppertOutcome {
    Pass,
    FailEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthFlag {
    Constant,
    /// Strictly increasing, roughly proportional to the horizon.
    Linear,
    /// Strictly increasing, but not proportional to the horizon.
    Increasing,
    Irregular,
}

fn growth_flag(horizons: &[u64], sizes: &[u64]) -> (GrowthFlag, Option<f64>) {
    if sizes.windows(2).all(|w| w[0] == w[1]) {
        return (GrowthFlag::Constant, None);
    }
    if !sizes.windows(2).all(|w| w[0] < w[1]) || sizes[0] == 0 {
        return (GrowthFlag::Irregular, None);
    }
    let xs: Vec<f64> = horizons.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = sizes.iter().map(|s| (*s as f64).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let e = sxy / sxx;
    let flag = if (0.75..1.5).contains(&e) {
        GrowthFlag::Linear
    } else {
        GrowthFlag::Increasing
    };
    (flag, Some(e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FRow {
    pub f: Vec<i64>,
    /// `|S_F(N) \ T_F(N)|` per horizon.
    pub sizes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuppertVerdict {
    pub outcome: RuppertOutcome,
    /// The passing `F`, or the `F` with the smallest final size.
    pub f: Vec<i64>,
    pub horizons: Vec<u64>,
    pub sizes: Vec<u64>,
    pub growth: GrowthFlag,
    /// Log-log slope of the sizes against the horizons, when increasing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_exponent: Option<f64>,
    pub pool: Vec<i64>,
    /// `|B_N|` per horizon.
    pub b_counts: Vec<u64>,
    pub table: Vec<FRow>,
}

/// Subsets of `0..k` by size, then lexicographically.
fn subsets_in_order(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=k {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.clone());
            let Some(i) = (0..size).rev().find(|&i| combo[i] < k - size + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

pub fn ruppert_test(probe: &RuppertProbe) -> Result<RuppertVerdict, WapError> {
    let pool = probe.pool()?;
    let subsets = subsets_in_order(pool.len());
    let mut table: Vec<FRow> = subsets
        .iter()
        .map(|s| FRow {
            f: s.iter().map(|&i| pool[i]).collect(),
            sizes: Vec::with_capacity(probe.horizons.len()),
        })
        .collect();
    let mut b_counts = Vec::with_capacity(probe.horizons.len());
    for &n in &probe.horizons {
        let h = Horizon::new(&probe.d, n);
        let rest: Vec<i64> = (-(n as i64)..=n as i64)
            .filter(|x| probe.b.contains(*x) && !pool.contains(x))
            .collect();
        b_counts.push((rest.len() + pool.len()) as u64);
        let g = h.intersect_par(&rest);
        let sizes: Vec<u64> = subsets
            .par_iter()
            .map(|s| {
                let f: Vec<i64> = s.iter().map(|&i| pool[i]).collect();
                let others: Vec<i64> = pool.iter().copied().filter(|b| !f.contains(b)).collect();
                let mut t = h.intersect(&others);
                t.and(&g);
                h.intersect(&f).count_and_not(&t)
            })
            .collect();
        for (row, s) in table.iter_mut().zip(sizes) {
            row.sizes.push(s);
        }
    }
    let stable = |r: &FRow| {
        let k = r.sizes.len();
        r.sizes[k - 1] == r.sizes[k - 2]
    };
    let (outcome, chosen) = match table.iter().position(stable) {
        Some(i) => (RuppertOutcome::Pass, i),
        None => {
            let min = table
                .iter()
                .map(|r| *r.sizes.last().unwrap())
                .min()
                .unwrap();
            let i = table
                .iter()
                .position(|r| *r.sizes.last().unwrap() == min)
                .unwrap();
            (RuppertOutcome::FailEvidence, i)
        }
    };
    let row = table[chosen].clone();
    let (growth, growth_exponent) = growth_flag(&probe.horizons, &row.sizes);
    Ok(RuppertVerdict {
        outcome,
        f: row.f,
        horizons: probe.horizons.clone(),
        sizes: row.sizes,
        growth,
        growth_exponent,
        pool,
        b_counts,
        table,
    })
}

pub const COUNTABILITY_LIMITATION: &str = "Word complexity and free-set sizes of the indicator \
subshift are reported for context only. Countability of the subshift, which decides the \
hereditarily non-sensitive case, cannot be attested by finite sampling: a Sturmian subshift \
and the indicator subshift of the naturals share p(n) = n + 1 yet differ in cardinality.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountabilityNote {
    pub complexity: ComplexityTable,
    pub search: SearchReport,
    pub limitation: String,
    pub tainted: bool,
}

/// Complexity table and free-set search on the indicator subshift of `D`.
///
/// The search runs on the window `{0, …, window_len-1}` with `k_max = window_len`.
pub fn wap_countability_note(
    d: &IntegerSet,
    n_max: usize,
    window_len: usize,
    shifts: &ShiftBudget,
    node_budget: u64,
) -> Result<CountabilityNote, LangError> {
    let source = SymbolicSource::Indicator(d.clone());
    let complexity = complexity_table(&source, n_max, shifts)?;
    let window = CoordinateSet::contiguous(window_len)?;
    let search = max_free_size(
        &source,
        &window,
        SymbolPair::binary(),
        shifts,
        window_len,
        node_budget,
    )?;
    Ok(CountabilityNote {
        tainted: complexity.tainted || search.tainted,
        complexity,
        search,
        limitation: COUNTABILITY_LIMITATION.into(),
    })
}
