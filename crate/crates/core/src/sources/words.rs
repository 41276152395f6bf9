use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::OnceLock;

use super::{Cell, SourceError, Symbol};

/// A substitution `σ` together with a prolongable seed letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionSpec {
    rules: BTreeMap<Symbol, Vec<Symbol>>,
    seed: Symbol,
    max_iterations: u32,
}

impl SubstitutionSpec {
    pub fn new(
        rules: BTreeMap<Symbol, Vec<Symbol>>,
        seed: Symbol,
        max_iterations: u32,
    ) -> Result<Self, SourceError> {
        for (letter, image) in &rules {
            if image.is_empty() {
                return Err(SourceError::InvalidSpec(format!(
                    "image of {letter} is empty"
                )));
            }
            if let Some(missing) = image.iter().find(|s| !rules.contains_key(s)) {
                return Err(SourceError::InvalidSpec(format!(
                    "letter {missing} has no rule"
                )));
            }
        }
        match rules.get(&seed) {
            None => {
                return Err(SourceError::InvalidSpec(format!("seed {seed} has no rule")));
            }
            Some(image) if image[0] != seed => return Err(SourceError::NonProlongable(seed)),
            _ => {}
        }
        Ok(Self {
            rules,
            seed,
            max_iterations,
        })
    }

    pub fn morse() -> Self {
        Self::new(BTreeMap::from([(0, vec![0, 1]), (1, vec![1, 0])]), 0, 64).expect("valid")
    }

    pub fn fibonacci() -> Self {
        Self::new(BTreeMap::from([(0, vec![0, 1]), (1, vec![0])]), 0, 128).expect("valid")
    }

    pub fn rules(&self) -> &BTreeMap<Symbol, Vec<Symbol>> {
        &self.rules
    }

    pub fn seed(&self) -> Symbol {
        self.seed
    }

    pub fn alphabet_size(&self) -> usize {
        self.rules
            .keys()
            .next_back()
            .map_or(1, |m| usize::from(*m) + 1)
    }
}

/// Iterates `σ` from the seed until the word has at least `min_len` letters
/// and returns the first `min_len` letters of the fixed point.
pub fn substitution_expand(
    spec: &SubstitutionSpec,
    min_len: usize,
) -> Result<Vec<Symbol>, SourceError> {
    if spec.rules[&spec.seed][0] != spec.seed {
        return Err(SourceError::NonProlongable(spec.seed));
    }
    let mut word = vec![spec.seed];
    let mut iterations = 0;
    while word.len() < min_len {
        if iterations == spec.max_iterations {
            return Err(SourceError::InvalidSpec(format!(
                "reached {} letters after the iteration cap {}",
                word.len(),
                spec.max_iterations
            )));
        }
        // only the prefix that can still reach min_len matters
        let mut next = Vec::with_capacity(word.len() * 2);
        for s in &word {
            next.extend_from_slice(&spec.rules[s]);
            if next.len() >= min_len {
                break;
            }
        }
        if next.len() == word.len() {
            return Err(SourceError::InvalidSpec(format!(
                "fixed point stalls at {} letters",
                word.len()
            )));
        }
        word = next;
        iterations += 1;
    }
    word.truncate(min_len);
    Ok(word)
}

/// Concatenation of the binary expansions of `1, 2, 3, …`; its first `len`
/// letters.
pub fn champernowne_prefix(len: usize) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(len + 64);
    let mut k: u64 = 1;
    while out.len() < len {
        let width = 64 - k.leading_zeros();
        for b in (0..width).rev() {
            out.push(((k >> b) & 1) as Symbol);
        }
        k += 1;
    }
    out.truncate(len);
    out
}

/// Position (1-based, in `w`) of the first letter of block `u_level`.
///
/// `w_n = u_n v_n` has length `4n·2^n`, so `u_L` starts after
/// `Σ_{j<L} 4j·2^j` letters.
pub fn kerr_li_block_start(level: u32) -> i64 {
    1 + (1..level).map(|j| (4 * i64::from(j)) << j).sum::<i64>()
}

/// Letter `n` of the block-concatenation word `w`.
///
/// For `n >= 1` this is letter `n` of `w_1 w_2 w_3 ⋯` where `w_L = u_L v_L`,
/// `u_L` concatenates `a 0^L` over all `a ∈ {0,1}^L` in lexicographic order,
/// and `v_L = 0^{|u_L|}`. Indices `n <= 0` read `0`.
pub fn kerr_li_word(n: i64) -> Symbol {
    if n <= 0 {
        return 0;
    }
    let mut pos = (n - 1) as u64;
    let mut level: u64 = 1;
    loop {
        let u_len = (2 * level) << level;
        if pos < 2 * u_len {
            if pos >= u_len {
                return 0;
            }
            let word = pos / (2 * level);
            let offset = pos % (2 * level);
            if offset >= level {
                return 0;
            }
            // letter `offset` of the level-bit binary expansion of `word`, MSB first
            return ((word >> (level - 1 - offset)) & 1) as Symbol;
        }
        pos -= 2 * u_len;
        level += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordKind {
    Substitution(SubstitutionSpec),
    Champernowne,
    KerrLi,
}

/// A one-sided word source, materialized lazily up to a fixed length.
///
/// Substitution and Champernowne words are read at positions `0..len`. The
/// block-concatenation word is computed letter by letter, reads `0` at
/// positions `<= 0`, and refuses positions beyond `len`.
#[derive(Debug)]
pub struct WordSource {
    kind: WordKind,
    len: usize,
    cache: OnceLock<Result<Vec<Symbol>, SourceError>>,
}

impl WordSource {
    pub fn new(kind: WordKind, len: usize) -> Self {
        Self {
            kind,
            len,
            cache: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> &WordKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn alphabet_size(&self) -> usize {
        match &self.kind {
            WordKind::Substitution(s) => s.alphabet_size(),
            _ => 2,
        }
    }

    fn letters(&self) -> Result<&[Symbol], SourceError> {
        let cached = self.cache.get_or_init(|| match &self.kind {
            WordKind::Substitution(spec) => substitution_expand(spec, self.len),
            WordKind::Champernowne => Ok(champernowne_prefix(self.len)),
            WordKind::KerrLi => Ok(Vec::new()),
        });
        cached.as_deref().map_err(Clone::clone)
    }

    fn out_of_range(&self, n: i64) -> SourceError {
        SourceError::IndexOutOfRange {
            index: n,
            limit: self.len as i64,
        }
    }

    pub(crate) fn eval(&self, n: i64) -> Result<Symbol, SourceError> {
        match self.kind {
            WordKind::KerrLi => {
                if n > self.len as i64 {
                    return Err(self.out_of_range(n));
                }
                Ok(kerr_li_word(n))
            }
            _ => {
                let letters = self.letters()?;
                usize::try_from(n)
                    .ok()
                    .and_then(|i| letters.get(i).copied())
                    .ok_or_else(|| self.out_of_range(n))
            }
        }
    }

    pub(crate) fn materialize(&self, range: Range<i64>) -> Result<Vec<Cell>, SourceError> {
        if range.is_empty() {
            return Ok(Vec::new());
        }
        match self.kind {
            WordKind::KerrLi => range.map(|n| self.eval(n).map(Some)).collect(),
            _ => {
                let letters = self.letters()?;
                if range.start < 0 {
                    return Err(self.out_of_range(range.start));
                }
                if range.end as usize > letters.len() {
                    return Err(self.out_of_range(range.end - 1));
                }
                Ok(letters[range.start as usize..range.end as usize]
                    .iter()
                    .map(|&s| Some(s))
                    .collect())
            }
        }
    }
}
