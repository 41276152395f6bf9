use std::ops::Range;

use crate::torus::{boundary_distance, rotate, FixedPointFrac, RotationSpec, TorusPoint};

use super::{Cell, SourceError, Symbol};

/// Half-open arcs `[c_i, c_{i+1})` of the circle; arc `i` carries symbol `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcPartition {
    cuts: Vec<FixedPointFrac>,
}

impl ArcPartition {
    pub fn new(cuts: Vec<FixedPointFrac>) -> Result<Self, SourceError> {
        let first = cuts
            .first()
            .ok_or_else(|| SourceError::InvalidSpec("partition needs at least one cut".into()))?;
        if !first.is_zero() {
            return Err(SourceError::InvalidSpec(
                "first cut must be exactly 0".into(),
            ));
        }
        if cuts.len() > usize::from(Symbol::MAX) {
            return Err(SourceError::InvalidSpec("too many arcs".into()));
        }
        for w in cuts.windows(2) {
            if w[0].bits() != w[1].bits() {
                return Err(SourceError::InvalidSpec("cuts must share precision".into()));
            }
            if w[0] >= w[1] {
                return Err(SourceError::InvalidSpec(
                    "cuts must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { cuts })
    }

    /// The two-arc partition `[0, c) ∪ [c, 1)`.
    pub fn two_arcs(c: FixedPointFrac) -> Result<Self, SourceError> {
        Self::new(vec![FixedPointFrac::zero(c.bits())?, c])
    }

    pub fn cuts(&self) -> &[FixedPointFrac] {
        &self.cuts
    }

    /// Number of arcs, which is also the alphabet size.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn symbol_of(&self, x: &FixedPointFrac) -> Symbol {
        (self.cuts.partition_point(|c| c <= x) - 1) as Symbol
    }
}

/// `n ↦ f(z + n_1 α_1 + … + n_k α_k)` for an arc coloring `f` of the circle.
#[derive(Debug, Clone)]
pub struct RotationCoding {
    rotation: RotationSpec,
    base: FixedPointFrac,
    partition: ArcPartition,
    guard_bits: u32,
}

impl RotationCoding {
    /// `guard_bits` defaults to `B/2`: a point closer than `2^-guard_bits` to a
    /// cut is reported as ambiguous.
    pub fn new(
        rotation: RotationSpec,
        base: FixedPointFrac,
        partition: ArcPartition,
        guard_bits: Option<u32>,
    ) -> Result<Self, SourceError> {
        if rotation.dim() != 1 {
            return Err(SourceError::InvalidSpec(
                "rotation codings act on the circle (d = 1)".into(),
            ));
        }
        let bits = rotation.bits();
        if base.bits() != bits || partition.cuts()[0].bits() != bits {
            return Err(SourceError::InvalidSpec(
                "base point, rotation and cuts must share precision".into(),
            ));
        }
        let guard_bits = guard_bits.unwrap_or(bits / 2);
        if guard_bits >= bits {
            return Err(SourceError::InvalidSpec(format!(
                "guard_bits {guard_bits} must be below the precision {bits}"
            )));
        }
        Ok(Self {
            rotation,
            base,
            partition,
            guard_bits,
        })
    }

    /// Classical Sturmian-like coding of `z + nα` by `[0, c) ∪ [c, 1)`.
    pub fn sturmian(
        alpha: FixedPointFrac,
        c: FixedPointFrac,
        z: FixedPointFrac,
    ) -> Result<Self, SourceError> {
        Self::new(
            RotationSpec::circle(alpha),
            z,
            ArcPartition::two_arcs(c)?,
            None,
        )
    }

    pub fn generators(&self) -> usize {
        self.rotation.generators()
    }

    pub fn partition(&self) -> &ArcPartition {
        &self.partition
    }

    pub fn rotation(&self) -> &RotationSpec {
        &self.rotation
    }

    pub fn base(&self) -> &FixedPointFrac {
        &self.base
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    pub fn bits(&self) -> u32 {
        self.rotation.bits()
    }

    /// Shifts beyond `2^(B/2)` would expose the periodicity of the dyadic
    /// approximation, so they are refused.
    pub fn max_index(&self) -> i64 {
        let half = self.bits() / 2;
        if half >= 62 {
            i64::MAX
        } else {
            1i64 << half
        }
    }

    fn check_index(&self, n: i64) -> Result<(), SourceError> {
        let limit = self.max_index();
        if n.unsigned_abs() > limit as u64 {
            return Err(SourceError::IndexOutOfRange { index: n, limit });
        }
        Ok(())
    }

    /// `exact` marks the base point itself (index zero), which carries no
    /// rotation drift and is decided by the half-open arcs alone.
    fn classify(&self, x: &FixedPointFrac, exact: bool) -> Option<Symbol> {
        if !exact && boundary_distance(x, self.partition.cuts()).below_pow2(self.guard_bits) {
            None
        } else {
            Some(self.partition.symbol_of(x))
        }
    }

    pub(crate) fn eval_lattice(&self, n: &[i64]) -> Result<Symbol, SourceError> {
        for &ni in n {
            self.check_index(ni)?;
        }
        let p = rotate(&TorusPoint::from(self.base), &self.rotation, n)?;
        let at_base = n.iter().all(|&ni| ni == 0);
        self.classify(&p.coords()[0], at_base)
            .ok_or_else(|| SourceError::AmbiguousBoundary {
                index: format!("{n:?}"),
            })
    }

    /// Sequential orbit walk for a `Z`-indexed coding: one exact addition per step.
    pub(crate) fn materialize(&self, range: Range<i64>) -> Result<Vec<Cell>, SourceError> {
        if self.generators() != 1 {
            return Err(SourceError::DomainMismatch(format!(
                "Z^{} coding indexed by integers",
                self.generators()
            )));
        }
        if range.is_empty() {
            return Ok(Vec::new());
        }
        self.check_index(range.start)?;
        self.check_index(range.end - 1)?;
        let alpha = self.rotation.alphas()[0].coords()[0];
        let mut x = self.base.add(&alpha.mul_int(range.start));
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        for n in range {
            out.push(self.classify(&x, n == 0));
            x.add_assign(&alpha);
        }
        Ok(out)
    }
}
