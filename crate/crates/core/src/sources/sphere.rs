use std::ops::Range;

use crate::torus::{rotate, torus_sq_distance, FixedPointFrac, RotationSpec, SqFrac, TorusPoint};

use super::{Cell, SourceError, Symbol};

/// `n ↦ 1_D(y0 + nα)` for a closed ball `D` of `T^d`, `d >= 2`.
///
/// The radius is stored squared. A point whose squared distance to the center
/// is within `guard` of the squared radius is ambiguous.
#[derive(Debug, Clone)]
pub struct SphereCoding {
    alpha: TorusPoint,
    y0: TorusPoint,
    center: TorusPoint,
    sq_radius: SqFrac,
    guard: SqFrac,
}

impl SphereCoding {
    pub fn new(
        alpha: TorusPoint,
        y0: TorusPoint,
        center: TorusPoint,
        sq_radius: SqFrac,
        guard: SqFrac,
    ) -> Result<Self, SourceError> {
        let d = alpha.dim();
        if d < 2 {
            return Err(SourceError::InvalidSpec(
                "sphere codings need d >= 2".into(),
            ));
        }
        if y0.dim() != d || center.dim() != d {
            return Err(SourceError::InvalidSpec(
                "alpha, y0 and center must share dimension".into(),
            ));
        }
        let bits = alpha.bits();
        if y0.bits() != bits || center.bits() != bits {
            return Err(SourceError::InvalidSpec(
                "points must share precision".into(),
            ));
        }
        let fb = 2 * bits;
        if sq_radius.frac_bits() != fb || guard.frac_bits() != fb {
            return Err(SourceError::InvalidSpec(format!(
                "squared radius and guard must carry {fb} fractional bits"
            )));
        }
        if sq_radius <= SqFrac::zero(fb) || sq_radius >= max_sq_radius(d, bits) {
            return Err(SourceError::InvalidSpec(
                "squared radius must lie in (0, d/4)".into(),
            ));
        }
        if guard <= SqFrac::zero(fb) {
            return Err(SourceError::InvalidSpec("guard must be positive".into()));
        }
        Ok(Self {
            alpha,
            y0,
            center,
            sq_radius,
            guard,
        })
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn sq_radius(&self) -> &SqFrac {
        &self.sq_radius
    }

    pub fn guard(&self) -> &SqFrac {
        &self.guard
    }

    fn classify(&self, p: &TorusPoint) -> Result<Option<Symbol>, SourceError> {
        let d2 = torus_sq_distance(p, &self.center)?;
        if d2.abs_diff(&self.sq_radius) < self.guard {
            Ok(None)
        } else {
            Ok(Some(Symbol::from(d2 <= self.sq_radius)))
        }
    }

    pub(crate) fn eval(&self, n: i64) -> Result<Symbol, SourceError> {
        let spec = RotationSpec::new(vec![self.alpha.clone()])?;
        let p = rotate(&self.y0, &spec, &[n])?;
        self.classify(&p)?
            .ok_or_else(|| SourceError::AmbiguousBoundary {
                index: n.to_string(),
            })
    }

    pub(crate) fn materialize(&self, range: Range<i64>) -> Result<Vec<Cell>, SourceError> {
        if range.is_empty() {
            return Ok(Vec::new());
        }
        let spec = RotationSpec::new(vec![self.alpha.clone()])?;
        let mut p = rotate(&self.y0, &spec, &[range.start])?;
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        for _ in range {
            out.push(self.classify(&p)?);
            p.add_assign(&self.alpha);
        }
        Ok(out)
    }
}

fn max_sq_radius(d: usize, bits: u32) -> SqFrac {
    SqFrac::from_ratio(d as u64, 4, 2 * bits)
}

/// A squared radius with its certified distance to every sampled orbit point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeRadius {
    pub sq_radius: SqFrac,
    pub margin: SqFrac,
    /// Orbit points whose squared distance fell inside `[r_min², r_max²]`.
    pub obstructions: usize,
}

/// Picks a squared radius in `[r_min², r_max²]` far from every
/// `dist²(y0 + nα, center)`, `|n| <= n_bound`.
///
/// The sampled squared distances inside the range are sorted together with the
/// two endpoints, and the midpoint of the widest gap is returned. `delta` is a
/// margin on squared distances; the call fails when the widest gap is narrower
/// than `2·delta`.
pub fn choose_safe_radius(
    alpha: &TorusPoint,
    y0: &TorusPoint,
    center: &TorusPoint,
    n_bound: u64,
    r_min: &FixedPointFrac,
    r_max: &FixedPointFrac,
    delta: &SqFrac,
) -> Result<SafeRadius, SourceError> {
    let d = alpha.dim();
    let bits = alpha.bits();
    if y0.dim() != d || center.dim() != d {
        return Err(SourceError::InvalidSpec("dimension mismatch".into()));
    }
    if r_min.is_zero() || r_min >= r_max {
        return Err(SourceError::InvalidSpec("need 0 < r_min < r_max".into()));
    }
    let lo = SqFrac::square_of(r_min);
    let hi = SqFrac::square_of(r_max);
    if hi >= max_sq_radius(d, bits) {
        return Err(SourceError::InvalidSpec(
            "r_max² must stay below d/4".into(),
        ));
    }
    if delta.frac_bits() != 2 * bits {
        return Err(SourceError::InvalidSpec(format!(
            "delta must carry {} fractional bits",
            2 * bits
        )));
    }
    let bound = i64::try_from(n_bound)
        .map_err(|_| SourceError::InvalidSpec("shift bound too large".into()))?;

    let spec = RotationSpec::new(vec![alpha.clone()])?;
    let mut p = rotate(y0, &spec, &[-bound])?;
    let mut marks = vec![lo.clone()];
    for _ in -bound..=bound {
        let d2 = torus_sq_distance(&p, center)?;
        if d2 >= lo && d2 <= hi {
            marks.push(d2);
        }
        p.add_assign(alpha);
    }
    let obstructions = marks.len() - 1;
    marks.push(hi);
    marks.sort();

    let (a, b) = marks
        .windows(2)
        .map(|w| (&w[0], &w[1]))
        .max_by(|x, y| x.1.abs_diff(x.0).cmp(&y.1.abs_diff(y.0)).then(y.0.cmp(x.0)))
        .expect("at least the two endpoints");
    let gap = b.abs_diff(a);
    let twice = delta.add(delta);
    if gap < twice {
        return Err(SourceError::NoSafeRadius {
            gap: gap.to_f64(),
            delta: delta.to_f64(),
        });
    }
    let mid = a.midpoint(b);
    let margin = mid.abs_diff(a).min(b.abs_diff(&mid));
    Ok(SafeRadius {
        sq_radius: mid,
        margin,
        obstructions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::Constant;

    const B: u32 = 128;

    fn pt(cs: &[Constant]) -> TorusPoint {
        TorusPoint::new(cs.iter().map(|c| c.resolve(B).unwrap()).collect()).unwrap()
    }

    fn range_bounds() -> (FixedPointFrac, FixedPointFrac) {
        (
            Constant::rational(1, 10).resolve(B).unwrap(),
            Constant::rational(2, 5).resolve(B).unwrap(),
        )
    }

    #[test]
    fn empty_obstruction_set_gives_range_midpoint() {
        let origin = TorusPoint::origin(2, B).unwrap();
        let alpha = pt(&[Constant::golden(), Constant::sqrt_rational(2, 1)]);
        let (r0, r1) = range_bounds();
        let delta = SqFrac::pow2_neg(40, 2 * B);
        let safe = choose_safe_radius(&alpha, &origin, &origin, 0, &r0, &r1, &delta).unwrap();
        assert_eq!(safe.obstructions, 0);
        let expect = SqFrac::square_of(&r0).midpoint(&SqFrac::square_of(&r1));
        assert_eq!(safe.sq_radius, expect);
    }

    #[test]
    fn period_two_orbit_misses_the_range() {
        let origin = TorusPoint::origin(2, B).unwrap();
        let half = Constant::rational(1, 2);
        let alpha = pt(&[half.clone(), half]);
        let (r0, r1) = range_bounds();
        let delta = SqFrac::pow2_neg(40, 2 * B);
        let safe = choose_safe_radius(&alpha, &origin, &origin, 50, &r0, &r1, &delta).unwrap();
        assert_eq!(safe.obstructions, 0);
        let expect = SqFrac::square_of(&r0).midpoint(&SqFrac::square_of(&r1));
        assert_eq!(safe.sq_radius, expect);
    }

    #[test]
    fn chosen_radius_keeps_orbit_clear() {
        let origin = TorusPoint::origin(2, B).unwrap();
        let center = pt(&[Constant::rational(1, 2), Constant::rational(1, 3)]);
        let alpha = pt(&[Constant::golden(), Constant::sqrt_rational(2, 1)]);
        let (r0, r1) = range_bounds();
        let delta = SqFrac::pow2_neg(40, 2 * B);
        let n = 2_000;
        let safe = choose_safe_radius(&alpha, &origin, &center, n, &r0, &r1, &delta).unwrap();
        assert!(safe.margin >= delta);
        let coding =
            SphereCoding::new(alpha, origin, center, safe.sq_radius.clone(), delta).unwrap();
        let cells = coding.materialize(-(n as i64)..n as i64 + 1).unwrap();
        assert!(cells.iter().all(Option::is_some));
        assert!(cells.contains(&Some(1)));
        assert!(cells.contains(&Some(0)));
        for (i, n) in (-(n as i64)..=n as i64).enumerate().step_by(97) {
            assert_eq!(Some(coding.eval(n).unwrap()), cells[i]);
        }
    }

    #[test]
    fn impossible_margin_is_reported() {
        let origin = TorusPoint::origin(2, B).unwrap();
        let center = pt(&[Constant::rational(1, 2), Constant::rational(1, 3)]);
        let alpha = pt(&[Constant::golden(), Constant::sqrt_rational(2, 1)]);
        let (r0, r1) = range_bounds();
        let delta = SqFrac::from_ratio(1, 10, 2 * B);
        let err = choose_safe_radius(&alpha, &origin, &center, 100, &r0, &r1, &delta).unwrap_err();
        assert!(matches!(err, SourceError::NoSafeRadius { .. }));
    }

    #[test]
    fn radius_validation() {
        let origin = TorusPoint::origin(2, B).unwrap();
        let alpha = pt(&[Constant::golden(), Constant::sqrt_rational(2, 1)]);
        let g = SqFrac::pow2_neg(40, 2 * B);
        assert!(SphereCoding::new(
            alpha.clone(),
            origin.clone(),
            origin.clone(),
            SqFrac::from_ratio(1, 2, 2 * B),
            g.clone()
        )
        .is_err());
        assert!(SphereCoding::new(alpha, origin.clone(), origin, SqFrac::zero(2 * B), g).is_err());
    }
}
