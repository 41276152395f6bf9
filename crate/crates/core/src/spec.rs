//! JSON source documents.
//!
//! A document has a top-level `"kind"` discriminator: `rotation`, `sphere`,
//! `substitution`, `indicator`, `kerr_li`, `champernowne` or `free_group`.
//! Fixed-point values are either hex mantissa strings (read at the document's
//! `"bits"`) or constant objects such as `{"kind": "golden"}` or
//! `{"kind": "rational", "p": 1, "q": 3}`. The schema lives in
//! `docs/source-spec.schema.json`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::sources::{
    choose_safe_radius, ArcPartition, FreeGroupCoding, IntegerSet, IntegerSetKind, RotationCoding,
    SourceError, SphereCoding, SubstitutionSpec, SymbolicSource, WordKind, WordSource,
    MAX_WORD_LEN,
};
use crate::torus::{
    Constant, FixedPointFrac, RotationSpec, SqFrac, TorusError, TorusPoint, DEFAULT_BITS,
};

/// A circle value: a hex mantissa at the document precision, or a constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstantValue {
    Hex(String),
    Named(Constant),
}

impl ConstantValue {
    pub fn resolve(&self, doc_bits: u32, bits: u32) -> Result<FixedPointFrac, TorusError> {
        match self {
            ConstantValue::Hex(h) => FixedPointFrac::from_hex(h, doc_bits)?.with_bits(bits),
            ConstantValue::Named(c) => c.resolve(bits),
        }
    }
}

impl From<Constant> for ConstantValue {
    fn from(c: Constant) -> Self {
        ConstantValue::Named(c)
    }
}

fn default_bits() -> u32 {
    DEFAULT_BITS
}

fn default_max_iterations() -> u32 {
    64
}

fn default_float_guard() -> f64 {
    1e-9
}

fn default_word_cap() -> usize {
    MAX_WORD_LEN
}

fn default_kerr_li_cap() -> usize {
    1 << 40
}

/// Squared radius of a sphere coding: explicit, or chosen at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusDocument {
    /// Hex mantissas carrying `2·bits` fractional bits.
    Explicit {
        sq_radius: String,
        guard: String,
    },
    Auto {
        auto: AutoRadius,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutoRadius {
    /// Orbit points `|n| <= n` are kept clear of the sphere.
    pub n: u64,
    pub r_min: ConstantValue,
    pub r_max: ConstantValue,
    /// Margin `2^-delta_bits` on squared distances; also used as the guard.
    pub delta_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceDocument {
    Rotation {
        #[serde(default = "default_bits")]
        bits: u32,
        /// One rotation number per generator of `Z^k`.
        alphas: Vec<ConstantValue>,
        base: ConstantValue,
        /// Sorted cuts, the first exactly 0.
        cuts: Vec<ConstantValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        guard_bits: Option<u32>,
    },
    Sphere {
        #[serde(default = "default_bits")]
        bits: u32,
        alpha: Vec<ConstantValue>,
        y0: Vec<ConstantValue>,
        center: Vec<ConstantValue>,
        radius: RadiusDocument,
    },
    Substitution {
        /// Single-digit letters, e.g. `{"0": "01", "1": "10"}`.
        rules: BTreeMap<String, String>,
        seed: String,
        length: usize,
        #[serde(default = "default_max_iterations")]
        max_iterations: u32,
    },
    Indicator {
        set: IntegerSetKind,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        reflect: bool,
    },
    KerrLi {
        #[serde(default = "default_kerr_li_cap")]
        cap: usize,
    },
    Champernowne {
        length: usize,
    },
    FreeGroup {
        rho: f64,
        mobius: [f64; 3],
        z: f64,
        cuts: Vec<f64>,
        #[serde(default = "default_float_guard")]
        float_guard: f64,
        #[serde(default = "default_word_cap")]
        max_word_len: usize,
    },
}

fn letter(s: &str) -> Result<u8, SourceError> {
    match s.as_bytes() {
        [d @ b'0'..=b'9'] => Ok(d - b'0'),
        _ => Err(SourceError::InvalidSpec(format!(
            "letters are single digits, got `{s}`"
        ))),
    }
}

fn point(values: &[ConstantValue], doc_bits: u32, bits: u32) -> Result<TorusPoint, SourceError> {
    let coords = values
        .iter()
        .map(|v| v.resolve(doc_bits, bits))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TorusPoint::new(coords)?)
}

impl SourceDocument {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Canonical form: sorted keys, no whitespace.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("documents serialize");
        serde_json::to_string(&value).expect("values serialize")
    }

    /// Lowercase hex SHA-256 of [`Self::canonical_json`].
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical_json().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn bits(&self) -> Option<u32> {
        match self {
            SourceDocument::Rotation { bits, .. } | SourceDocument::Sphere { bits, .. } => {
                Some(*bits)
            }
            _ => None,
        }
    }

    pub fn build(&self) -> Result<SymbolicSource, SourceError> {
        self.build_at(self.bits().unwrap_or(DEFAULT_BITS))
    }

    /// Builds the source with every fixed-point value re-resolved at `bits`.
    ///
    /// Named constants are recomputed; hex mantissas are re-expressed exactly.
    /// An explicit `guard_bits` is kept, otherwise the default `bits/2` applies.
    pub fn build_at(&self, bits: u32) -> Result<SymbolicSource, SourceError> {
        match self {
            SourceDocument::Rotation {
                bits: doc_bits,
                alphas,
                base,
                cuts,
                guard_bits,
            } => {
                let alphas = alphas
                    .iter()
                    .map(|a| Ok(TorusPoint::from(a.resolve(*doc_bits, bits)?)))
                    .collect::<Result<Vec<_>, TorusError>>()?;
                let cuts = cuts
                    .iter()
                    .map(|c| c.resolve(*doc_bits, bits))
                    .collect::<Result<Vec<_>, _>>()?;
                let coding = RotationCoding::new(
                    RotationSpec::new(alphas)?,
                    base.resolve(*doc_bits, bits)?,
                    ArcPartition::new(cuts)?,
                    *guard_bits,
                )?;
                Ok(SymbolicSource::Rotation(coding))
            }
            SourceDocument::Sphere {
                bits: doc_bits,
                alpha,
                y0,
                center,
                radius,
            } => {
                let alpha = point(alpha, *doc_bits, bits)?;
                let y0 = point(y0, *doc_bits, bits)?;
                let center = point(center, *doc_bits, bits)?;
                let fb = 2 * bits;
                let (sq_radius, guard) = match radius {
                    RadiusDocument::Explicit { sq_radius, guard } => (
                        SqFrac::from_hex(sq_radius, 2 * doc_bits)?.with_frac_bits(fb),
                        SqFrac::from_hex(guard, 2 * doc_bits)?.with_frac_bits(fb),
                    ),
                    RadiusDocument::Auto { auto } => {
                        let delta = SqFrac::pow2_neg(auto.delta_bits, fb);
                        let safe = choose_safe_radius(
                            &alpha,
                            &y0,
                            &center,
                            auto.n,
                            &auto.r_min.resolve(*doc_bits, bits)?,
                            &auto.r_max.resolve(*doc_bits, bits)?,
                            &delta,
                        )?;
                        (safe.sq_radius, delta)
                    }
                };
                Ok(SymbolicSource::Sphere(SphereCoding::new(
                    alpha, y0, center, sq_radius, guard,
                )?))
            }
            SourceDocument::Substitution {
                rules,
                seed,
                length,
                max_iterations,
            } => {
                let rules = rules
                    .iter()
                    .map(|(k, v)| {
                        let image = v
                            .chars()
                            .map(|c| letter(&c.to_string()))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok((letter(k)?, image))
                    })
                    .collect::<Result<BTreeMap<_, _>, SourceError>>()?;
                let spec = SubstitutionSpec::new(rules, letter(seed)?, *max_iterations)?;
                Ok(SymbolicSource::Word(WordSource::new(
                    WordKind::Substitution(spec),
                    *length,
                )))
            }
            SourceDocument::Indicator { set, reflect } => Ok(SymbolicSource::Indicator(
                IntegerSet::new(set.clone(), *reflect)?,
            )),
            SourceDocument::KerrLi { cap } => Ok(SymbolicSource::Word(WordSource::new(
                WordKind::KerrLi,
                *cap,
            ))),
            SourceDocument::Champernowne { length } => Ok(SymbolicSource::Word(WordSource::new(
                WordKind::Champernowne,
                *length,
            ))),
            SourceDocument::FreeGroup {
                rho,
                mobius,
                z,
                cuts,
                float_guard,
                max_word_len,
            } => Ok(SymbolicSource::FreeGroup(FreeGroupCoding::new(
                *rho,
                *mobius,
                *z,
                cuts.clone(),
                *float_guard,
                *max_word_len,
            )?)),
        }
    }

    /// The Fibonacci coding: `α = (√5−1)/2`, cut `1 − α`, base point 0.
    pub fn fibonacci() -> Self {
        SourceDocument::Rotation {
            bits: DEFAULT_BITS,
            alphas: vec![Constant::golden().into()],
            base: Constant::rational(0, 1).into(),
            cuts: vec![
                Constant::rational(0, 1).into(),
                Constant::golden().negated().into(),
            ],
            guard_bits: None,
        }
    }

    pub fn morse(length: usize) -> Self {
        SourceDocument::Substitution {
            rules: BTreeMap::from([("0".into(), "01".into()), ("1".into(), "10".into())]),
            seed: "0".into(),
            length,
            max_iterations: default_max_iterations(),
        }
    }

    pub fn champernowne(length: usize) -> Self {
        SourceDocument::Champernowne { length }
    }

    pub fn indicator(set: IntegerSetKind) -> Self {
        SourceDocument::Indicator {
            set,
            reflect: false,
        }
    }

    /// The all-zero sequence (indicator of the empty set).
    pub fn constant() -> Self {
        Self::indicator(IntegerSetKind::Explicit {
            members: Vec::new(),
            window: [0, 0],
        })
    }

    pub fn kerr_li() -> Self {
        SourceDocument::KerrLi {
            cap: default_kerr_li_cap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::Index;

    #[test]
    fn parses_rotation_with_mixed_constants() {
        let doc = SourceDocument::from_json(
            r#"{"kind":"rotation","bits":64,
                "alphas":[{"kind":"golden"}],
                "base":"0",
                "cuts":["0",{"kind":"golden","negate":true}]}"#,
        )
        .unwrap();
        let src = doc.build().unwrap();
        let got: Vec<u8> = (0..6).map(|n| src.eval(&Index::Z(n)).unwrap()).collect();
        assert_eq!(got, vec![0, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn fibonacci_document_round_trips() {
        let doc = SourceDocument::fibonacci();
        let back = SourceDocument::from_json(&doc.canonical_json()).unwrap();
        assert_eq!(doc, back);
        assert_eq!(doc.digest(), back.digest());
        assert_eq!(doc.digest().len(), 64);
    }

    #[test]
    fn rejects_unknown_kind_and_fields() {
        assert!(SourceDocument::from_json(r#"{"kind":"lorenz"}"#).is_err());
        assert!(SourceDocument::from_json(r#"{"kind":"champernowne","length":5,"x":1}"#).is_err());
        let err = SourceDocument::from_json("{\"kind\":\n").unwrap_err();
        assert_eq!(err.line(), 2);
    }

    #[test]
    fn substitution_and_indicator_documents() {
        let doc = SourceDocument::from_json(
            r#"{"kind":"substitution","rules":{"0":"01","1":"10"},"seed":"0","length":16}"#,
        )
        .unwrap();
        let src = doc.build().unwrap();
        assert_eq!(src.eval_z(3).unwrap(), 0);
        assert_eq!(src.alphabet_size(), 2);

        let doc = SourceDocument::from_json(
            r#"{"kind":"indicator","set":{"type":"ip_base","base":10,"t_min":1}}"#,
        )
        .unwrap();
        let src = doc.build().unwrap();
        assert_eq!(src.eval_z(110).unwrap(), 1);
        assert_eq!(src.eval_z(11).unwrap(), 0);
    }

    #[test]
    fn bad_letters_rejected() {
        let doc = SourceDocument::from_json(
            r#"{"kind":"substitution","rules":{"0":"0x"},"seed":"0","length":4}"#,
        )
        .unwrap();
        assert!(doc.build().is_err());
    }

    #[test]
    fn rebuild_at_double_precision() {
        let doc = SourceDocument::fibonacci();
        let hi = doc.build_at(512).unwrap();
        let lo = doc.build().unwrap();
        for n in 0..200 {
            assert_eq!(lo.eval_z(n).unwrap(), hi.eval_z(n).unwrap());
        }
    }
}
