//! Codings of a two-generator free group acting on the circle.
//!
//! The circle `[0,1)` is identified with the real projective line through
//! `θ ↦ [cos πθ : sin πθ]`, so `SL(2,R)` acts on it by Möbius maps. Generator
//! `a` is the rotation by `ρ` (the rotation matrix of angle `πρ`), generator `b`
//! a parabolic matrix. This path is floating point; an explicit guard band
//! replaces the exact arithmetic used for rotations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{SourceError, Symbol};

/// Hard cap on word length; longer products accumulate too much rounding.
pub const MAX_WORD_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    AInv,
    B,
    BInv,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::A, Generator::AInv, Generator::B, Generator::BInv];

    pub fn inverse(self) -> Self {
        match self {
            Generator::A => Generator::AInv,
            Generator::AInv => Generator::A,
            Generator::B => Generator::BInv,
            Generator::BInv => Generator::B,
        }
    }

    fn letter(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::AInv => 'A',
            Generator::B => 'b',
            Generator::BInv => 'B',
        }
    }
}

/// A word over `a, a⁻¹, b, b⁻¹`, written `a A b B` (capitals are inverses).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord(Vec<Generator>);

impl FreeWord {
    pub fn new(letters: Vec<Generator>) -> Self {
        Self(letters)
    }

    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].inverse())
    }
}

impl FromStr for FreeWord {
    type Err = SourceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'a' => Ok(Generator::A),
                'A' => Ok(Generator::AInv),
                'b' => Ok(Generator::B),
                'B' => Ok(Generator::BInv),
                other => Err(SourceError::InvalidSpec(format!(
                    "unknown generator `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FreeWord)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        self.0.iter().try_for_each(|g| write!(f, "{}", g.letter()))
    }
}

/// All reduced words of length `<= max_len`, in shortlex order.
pub fn reduced_words(max_len: usize) -> Vec<FreeWord> {
    let mut out = vec![FreeWord::identity()];
    let mut layer = vec![FreeWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for g in Generator::ALL {
                if w.0.last().is_some_and(|l| *l == g.inverse()) {
                    continue;
                }
                let mut letters = w.0.clone();
                letters.push(g);
                next.push(FreeWord(letters));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

type Mat = [f64; 4];

fn apply(m: &Mat, theta: f64) -> f64 {
    let (s, c) = (PI * theta).sin_cos();
    let x = m[0] * c + m[1] * s;
    let y = m[2] * c + m[3] * s;
    (y.atan2(x) / PI).rem_euclid(1.0)
}

fn inverse(m: &Mat) -> Mat {
    [m[3], -m[1], -m[2], m[0]]
}

#[derive(Debug, Clone)]
pub struct FreeGroupCoding {
    rho: f64,
    generators: [Mat; 4],
    z: f64,
    cuts: Vec<f64>,
    float_guard: f64,
    max_len: usize,
}

impl FreeGroupCoding {
    /// `mobius = (p, q, r)` gives the matrix `[[p, q], [r, (1 + q r)/p]]`,
    /// which has determinant 1 and must be parabolic (`|trace| = 2`).
    pub fn new(
        rho: f64,
        mobius: [f64; 3],
        z: f64,
        cuts: Vec<f64>,
        float_guard: f64,
        max_len: usize,
    ) -> Result<Self, SourceError> {
        let [p, q, r] = mobius;
        if !(p.is_finite() && q.is_finite() && r.is_finite() && rho.is_finite()) || p == 0.0 {
            return Err(SourceError::InvalidSpec(
                "Möbius parameters must be finite with p != 0".into(),
            ));
        }
        let parabolic = [p, q, r, (1.0 + q * r) / p];
        let det = parabolic[0] * parabolic[3] - parabolic[1] * parabolic[2];
        if (det - 1.0).abs() > 1e-12 {
            return Err(SourceError::InvalidSpec(format!("determinant {det} != 1")));
        }
        if ((parabolic[0] + parabolic[3]).abs() - 2.0).abs() > 1e-9 {
            return Err(SourceError::InvalidSpec(
                "second generator must be parabolic (|trace| = 2)".into(),
            ));
        }
        if !(0.0..1.0).contains(&z) {
            return Err(SourceError::InvalidSpec(
                "base point must lie in [0,1)".into(),
            ));
        }
        if cuts.first() != Some(&0.0)
            || cuts.windows(2).any(|w| w[0] >= w[1])
            || cuts.last().is_some_and(|c| *c >= 1.0)
        {
            return Err(SourceError::InvalidSpec(
                "cuts must start at 0 and increase strictly inside [0,1)".into(),
            ));
        }
        if float_guard.is_nan() || float_guard <= 0.0 {
            return Err(SourceError::InvalidSpec(
                "float_guard must be positive".into(),
            ));
        }
        if max_len > MAX_WORD_LEN {
            return Err(SourceError::InvalidSpec(format!(
                "word-length cap {max_len} exceeds {MAX_WORD_LEN}"
            )));
        }
        let (s, c) = (PI * rho).sin_cos();
        let rotation = [c, -s, s, c];
        Ok(Self {
            rho,
            generators: [rotation, inverse(&rotation), parabolic, inverse(&parabolic)],
            z,
            cuts,
            float_guard,
            max_len,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn base_point(&self) -> f64 {
        self.z
    }

    pub fn alphabet_size(&self) -> usize {
        self.cuts.len()
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    fn matrix(&self, g: Generator) -> &Mat {
        &self.generators[g as usize]
    }

    /// The image `g·z`, composing right to left.
    pub fn act(&self, word: &FreeWord) -> f64 {
        word.0
            .iter()
            .rev()
            .fold(self.z, |theta, g| apply(self.matrix(*g), theta))
    }

    fn classify(&self, theta: f64) -> Option<Symbol> {
        let idx = self.cuts.partition_point(|c| *c <= theta);
        let below = self.cuts[idx - 1];
        let above = self.cuts.get(idx).copied().unwrap_or(1.0);
        if theta - below < self.float_guard || above - theta < self.float_guard {
            return None;
        }
        Some((idx - 1) as Symbol)
    }
}

/// Symbol of `word · z`.
pub fn eval_free_group(spec: &FreeGroupCoding, word: &FreeWord) -> Result<Symbol, SourceError> {
    if word.len() > spec.max_len {
        return Err(SourceError::WordTooLong {
            len: word.len(),
            cap: spec.max_len,
        });
    }
    if !word.is_reduced() {
        return Err(SourceError::DomainMismatch(format!(
            "word {word} is not reduced"
        )));
    }
    spec.classify(spec.act(word))
        .ok_or_else(|| SourceError::AmbiguousBoundary {
            index: word.to_string(),
        })
}
