//! Exact dyadic arithmetic on the circle `T = R/Z` and on `T^d`.
//!
//! A [`FixedPointFrac`] stores `mantissa / 2^B` with `mantissa < 2^B`. Addition,
//! subtraction and integer scaling wrap modulo 1 without any rounding, so orbit
//! points `z + n·α` are reproducible bit-for-bit on every platform. Irrational
//! rotation numbers enter as `B`-bit truncations produced by [`Constant::resolve`].
//!
//! Squared torus distances are carried as exact `2B`-bit values ([`SqFrac`]) and
//! are only ever compared, never square-rooted.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported precision in fractional bits.
pub const MAX_BITS: u32 = 512;
/// Precision used when a document does not name one.
pub const DEFAULT_BITS: u32 = 256;

const LIMBS: usize = (MAX_BITS / 64) as usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("malformed constant: {0}")]
    MalformedConstant(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("precision mismatch: {0} vs {1} bits")]
    PrecisionMismatch(u32, u32),
    #[error("unsupported precision {0} (must be 1..={MAX_BITS})")]
    UnsupportedPrecision(u32),
}

/// A point of the circle stored as an exact `B`-bit dyadic fraction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPointFrac {
    limbs: [u64; LIMBS],
    bits: u32,
}

impl FixedPointFrac {
    pub fn zero(bits: u32) -> Result<Self, TorusError> {
        if bits == 0 || bits > MAX_BITS {
            return Err(TorusError::UnsupportedPrecision(bits));
        }
        Ok(Self {
            limbs: [0; LIMBS],
            bits,
        })
    }

    /// Builds a value from its mantissa; fails unless `mantissa < 2^bits`.
    pub fn from_mantissa(mantissa: &BigUint, bits: u32) -> Result<Self, TorusError> {
        let mut out = Self::zero(bits)?;
        if mantissa.bits() > u64::from(bits) {
            return Err(TorusError::MalformedConstant(format!(
                "mantissa needs {} bits but precision is {bits}",
                mantissa.bits()
            )));
        }
        for (i, d) in mantissa.iter_u64_digits().enumerate() {
            out.limbs[i] = d;
        }
        Ok(out)
    }

    pub fn from_u64(mantissa: u64, bits: u32) -> Result<Self, TorusError> {
        Self::from_mantissa(&BigUint::from(mantissa), bits)
    }

    /// Parses a lowercase (or uppercase) hex mantissa.
    pub fn from_hex(hex: &str, bits: u32) -> Result<Self, TorusError> {
        let digits = hex.trim_start_matches("0x");
        if digits.is_empty() {
            return Err(TorusError::MalformedConstant("empty hex mantissa".into()));
        }
        let m = BigUint::parse_bytes(digits.as_bytes(), 16)
            .ok_or_else(|| TorusError::MalformedConstant(format!("invalid hex `{hex}`")))?;
        Self::from_mantissa(&m, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn nlimbs(&self) -> usize {
        self.bits.div_ceil(64) as usize
    }

    fn mask_top(&mut self) {
        let rem = self.bits % 64;
        if rem != 0 {
            let top = self.nlimbs() - 1;
            self.limbs[top] &= (1u64 << rem) - 1;
        }
    }

    pub fn mantissa(&self) -> BigUint {
        BigUint::from_slice(
            &self.limbs[..self.nlimbs()]
                .iter()
                .flat_map(|l| [*l as u32, (*l >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }

    /// Lowercase hex of the mantissa, zero-padded to `ceil(B/4)` digits.
    pub fn to_hex(&self) -> String {
        let width = self.bits.div_ceil(4) as usize;
        format!("{:0>width$}", self.mantissa().to_str_radix(16))
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Nearest `f64`, for display and for the floating-point free-group path.
    pub fn to_f64(&self) -> f64 {
        let n = self.nlimbs();
        let mut acc = 0.0f64;
        for i in 0..n {
            acc = acc / 18446744073709551616.0 + self.limbs[i] as f64;
        }
        // acc is now mantissa / 2^(64(n-1)); scale to / 2^bits
        acc * 2f64.powi(64 * (n as i32 - 1) - self.bits as i32)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.bits, other.bits,
            "fixed-point operands must share precision"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        out.add_assign(other);
        out
    }

    /// In-place `self += other (mod 1)`.
    pub fn add_assign(&mut self, other: &Self) {
        self.check_same(other);
        let mut carry = 0u64;
        for i in 0..self.nlimbs() {
            let (s1, c1) = self.limbs[i].overflowing_add(other.limbs[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            self.limbs[i] = s2;
            carry = u64::from(c1) + u64::from(c2);
        }
        self.mask_top();
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `-self (mod 1)`.
    pub fn neg(&self) -> Self {
        let mut out = *self;
        let mut carry = 1u64;
        for i in 0..self.nlimbs() {
            let (s, c) = (!out.limbs[i]).overflowing_add(carry);
            out.limbs[i] = s;
            carry = u64::from(c);
        }
        out.mask_top();
        out
    }

    /// `n · self (mod 1)` for any `i64`.
    pub fn mul_int(&self, n: i64) -> Self {
        let k = n.unsigned_abs();
        let mut out = *self;
        let mut carry = 0u128;
        for i in 0..self.nlimbs() {
            let prod = u128::from(self.limbs[i]) * u128::from(k) + carry;
            out.limbs[i] = prod as u64;
            carry = prod >> 64;
        }
        out.mask_top();
        if n < 0 {
            out.neg()
        } else {
            out
        }
    }

    /// `1/2 - |self - 1/2|`: the distance from `self` to `0` on the circle.
    pub fn circle_norm(&self) -> Self {
        if self.top_bit() {
            self.neg()
        } else {
            *self
        }
    }

    fn top_bit(&self) -> bool {
        let b = self.bits - 1;
        (self.limbs[(b / 64) as usize] >> (b % 64)) & 1 == 1
    }

    /// Circular distance `min(|x - y|, 1 - |x - y|)`.
    pub fn circular_distance(&self, other: &Self) -> Self {
        self.sub(other).circle_norm()
    }

    /// True iff `self < 2^-k`. For `k >= B` only zero qualifies.
    pub fn below_pow2(&self, k: u32) -> bool {
        if k >= self.bits {
            return self.is_zero();
        }
        // value < 2^-k  <=>  mantissa < 2^(B-k)  <=>  bits >= B-k all clear
        let cut = self.bits - k;
        let limb = (cut / 64) as usize;
        let off = cut % 64;
        if off != 0 && (self.limbs[limb] >> off) != 0 {
            return false;
        }
        let start = if off == 0 { limb } else { limb + 1 };
        self.limbs[start..self.nlimbs()].iter().all(|&l| l == 0)
    }

    /// Re-expresses the same dyadic value at a higher precision (exact), or
    /// truncates toward zero at a lower one.
    pub fn with_bits(&self, bits: u32) -> Result<Self, TorusError> {
        let m = self.mantissa();
        let m = if bits >= self.bits {
            m << (bits - self.bits)
        } else {
            m >> (self.bits - bits)
        };
        Self::from_mantissa(&m, bits)
    }

    /// Square of the circle norm, exact with `2B` fractional bits.
    fn sq_norm(&self) -> BigUint {
        let m = self.circle_norm().mantissa();
        &m * &m
    }
}

impl PartialOrd for FixedPointFrac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FixedPointFrac {
    fn cmp(&self, other: &Self) -> Ordering {
        self.check_same(other);
        for i in (0..self.nlimbs()).rev() {
            match self.limbs[i].cmp(&other.limbs[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for FixedPointFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FixedPointFrac({:.6}, 0x{}/2^{})",
            self.to_f64(),
            self.to_hex(),
            self.bits
        )
    }
}

/// A built-in or literal circle constant, resolved to any precision on demand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstantKind {
    /// `(√5 − 1)/2`.
    Golden,
    /// Fractional part of `√(p/q)`.
    SqrtRational { p: u64, q: u64 },
    /// `p/q` with `0 <= p/q < 1` in lowest terms.
    Rational { p: u64, q: u64 },
    /// Literal mantissa; `bits` is the precision it was written at.
    Hex { hex: String, bits: u32 },
}

/// A constant, optionally negated modulo 1 (so `1 − α` is `α` negated).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constant {
    #[serde(flatten)]
    pub kind: ConstantKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negate: bool,
}

impl Constant {
    pub fn golden() -> Self {
        ConstantKind::Golden.into()
    }

    pub fn rational(p: u64, q: u64) -> Self {
        ConstantKind::Rational { p, q }.into()
    }

    pub fn sqrt_rational(p: u64, q: u64) -> Self {
        ConstantKind::SqrtRational { p, q }.into()
    }

    pub fn hex(hex: impl Into<String>, bits: u32) -> Self {
        ConstantKind::Hex {
            hex: hex.into(),
            bits,
        }
        .into()
    }

    pub fn negated(mut self) -> Self {
        self.negate = !self.negate;
        self
    }

    pub fn resolve(&self, bits: u32) -> Result<FixedPointFrac, TorusError> {
        let v = make_constant(&self.kind, bits)?;
        Ok(if self.negate { v.neg() } else { v })
    }
}

impl From<ConstantKind> for Constant {
    fn from(kind: ConstantKind) -> Self {
        Constant {
            kind,
            negate: false,
        }
    }
}

/// Integer square root by Newton iteration: the largest `r` with `r² <= n`.
pub fn isqrt_newton(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    // start above the root: 2^ceil(bits/2)
    let mut x = BigUint::one() << n.bits().div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

fn is_perfect_square(n: u64) -> bool {
    let r = isqrt_newton(&BigUint::from(n));
    &r * &r == BigUint::from(n)
}

/// `floor(value · 2^B)` for a built-in constant, by exact integer arithmetic.
pub fn make_constant(kind: &ConstantKind, bits: u32) -> Result<FixedPointFrac, TorusError> {
    if bits == 0 || bits > MAX_BITS {
        return Err(TorusError::UnsupportedPrecision(bits));
    }
    let one = BigUint::one() << bits;
    match kind {
        ConstantKind::Golden => {
            // floor((√5·2^B − 2^B)/2) = floor((isqrt(5·2^2B) − 2^B)/2)
            let s = isqrt_newton(&(BigUint::from(5u32) << (2 * bits)));
            FixedPointFrac::from_mantissa(&((s - &one) >> 1u32), bits)
        }
        ConstantKind::Rational { p, q } => {
            if *q == 0 || p >= q {
                return Err(TorusError::MalformedConstant(format!(
                    "rational {p}/{q} outside [0,1)"
                )));
            }
            if p.gcd(q) != 1 {
                return Err(TorusError::MalformedConstant(format!(
                    "rational {p}/{q} not in lowest terms"
                )));
            }
            FixedPointFrac::from_mantissa(&((BigUint::from(*p) << bits) / *q), bits)
        }
        ConstantKind::SqrtRational { p, q } => {
            if *q == 0 || *p == 0 {
                return Err(TorusError::MalformedConstant(format!(
                    "sqrt_rational {p}/{q} must be positive"
                )));
            }
            if p.gcd(q) != 1 {
                return Err(TorusError::MalformedConstant(format!(
                    "sqrt_rational {p}/{q} not in lowest terms"
                )));
            }
            if is_perfect_square(*p) && is_perfect_square(*q) {
                return Err(TorusError::MalformedConstant(format!(
                    "sqrt_rational {p}/{q} is a rational square"
                )));
            }
            let scaled = (BigUint::from(*p) << (2 * bits)) / *q;
            let root = isqrt_newton(&scaled);
            // drop the integer part
            let frac = root % &one;
            FixedPointFrac::from_mantissa(&frac, bits)
        }
        ConstantKind::Hex { hex, bits: written } => {
            FixedPointFrac::from_hex(hex, *written)?.with_bits(bits)
        }
    }
}

/// A point of `T^d`; all coordinates share one precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    coords: Vec<FixedPointFrac>,
}

impl TorusPoint {
    pub fn new(coords: Vec<FixedPointFrac>) -> Result<Self, TorusError> {
        let first = coords.first().ok_or(TorusError::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        if let Some(c) = coords.iter().find(|c| c.bits() != first.bits()) {
            return Err(TorusError::PrecisionMismatch(first.bits(), c.bits()));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize, bits: u32) -> Result<Self, TorusError> {
        Self::new(vec![FixedPointFrac::zero(bits)?; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn bits(&self) -> u32 {
        self.coords[0].bits()
    }

    pub fn coords(&self) -> &[FixedPointFrac] {
        &self.coords
    }

    pub fn add_assign(&mut self, other: &TorusPoint) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            a.add_assign(b);
        }
    }

    fn scaled(&self, n: i64) -> TorusPoint {
        TorusPoint {
            coords: self.coords.iter().map(|c| c.mul_int(n)).collect(),
        }
    }
}

impl From<FixedPointFrac> for TorusPoint {
    fn from(x: FixedPointFrac) -> Self {
        TorusPoint { coords: vec![x] }
    }
}

/// The rotation vectors `α_1, …, α_k` of a `Z^k` action on `T^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSpec {
    alphas: Vec<TorusPoint>,
}

impl RotationSpec {
    pub fn new(alphas: Vec<TorusPoint>) -> Result<Self, TorusError> {
        let first = alphas.first().ok_or(TorusError::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        for a in &alphas {
            if a.dim() != first.dim() {
                return Err(TorusError::DimensionMismatch {
                    expected: first.dim(),
                    found: a.dim(),
                });
            }
            if a.bits() != first.bits() {
                return Err(TorusError::PrecisionMismatch(first.bits(), a.bits()));
            }
        }
        Ok(Self { alphas })
    }

    /// A single rotation of the circle.
    pub fn circle(alpha: FixedPointFrac) -> Self {
        Self {
            alphas: vec![alpha.into()],
        }
    }

    pub fn generators(&self) -> usize {
        self.alphas.len()
    }

    pub fn dim(&self) -> usize {
        self.alphas[0].dim()
    }

    pub fn bits(&self) -> u32 {
        self.alphas[0].bits()
    }

    pub fn alphas(&self) -> &[TorusPoint] {
        &self.alphas
    }
}

/// `z + n_1 α_1 + … + n_k α_k (mod 1)`, coordinatewise and exact.
pub fn rotate(z: &TorusPoint, spec: &RotationSpec, n: &[i64]) -> Result<TorusPoint, TorusError> {
    if n.len() != spec.generators() {
        return Err(TorusError::DimensionMismatch {
            expected: spec.generators(),
            found: n.len(),
        });
    }
    if z.dim() != spec.dim() {
        return Err(TorusError::DimensionMismatch {
            expected: spec.dim(),
            found: z.dim(),
        });
    }
    if z.bits() != spec.bits() {
        return Err(TorusError::PrecisionMismatch(z.bits(), spec.bits()));
    }
    let mut out = z.clone();
    for (alpha, &ni) in spec.alphas.iter().zip(n) {
        out.add_assign(&alpha.scaled(ni));
    }
    Ok(out)
}

/// Minimum circular distance from `x` to any of `cuts`.
///
/// `cuts` must be nonempty, sorted and distinct; only the two cuts bracketing
/// `x` are inspected.
pub fn boundary_distance(x: &FixedPointFrac, cuts: &[FixedPointFrac]) -> FixedPointFrac {
    assert!(!cuts.is_empty(), "boundary_distance needs at least one cut");
    let idx = cuts.partition_point(|c| c <= x);
    let below = if idx == 0 { cuts.len() - 1 } else { idx - 1 };
    let above = if idx == cuts.len() { 0 } else { idx };
    let a = x.circular_distance(&cuts[below]);
    let b = x.circular_distance(&cuts[above]);
    a.min(b)
}

/// An exact non-negative fixed-point value `num / 2^frac_bits`, used for
/// squared distances and squared radii.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SqFrac {
    num: BigUint,
    frac_bits: u32,
}

impl SqFrac {
    pub fn new(num: BigUint, frac_bits: u32) -> Self {
        Self { num, frac_bits }
    }

    pub fn zero(frac_bits: u32) -> Self {
        Self::new(BigUint::zero(), frac_bits)
    }

    /// `p/q` floored to `frac_bits` fractional bits.
    pub fn from_ratio(p: u64, q: u64, frac_bits: u32) -> Self {
        Self::new((BigUint::from(p) << frac_bits) / q, frac_bits)
    }

    /// `2^-k` at the given precision.
    pub fn pow2_neg(k: u32, frac_bits: u32) -> Self {
        Self::new(BigUint::one() << frac_bits.saturating_sub(k), frac_bits)
    }

    /// Exact square of a circle value, at `2B` fractional bits.
    pub fn square_of(x: &FixedPointFrac) -> Self {
        let m = x.mantissa();
        Self::new(&m * &m, 2 * x.bits())
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn to_hex(&self) -> String {
        self.num.to_str_radix(16)
    }

    pub fn from_hex(hex: &str, frac_bits: u32) -> Result<Self, TorusError> {
        let m = BigUint::parse_bytes(hex.trim_start_matches("0x").as_bytes(), 16)
            .ok_or_else(|| TorusError::MalformedConstant(format!("invalid hex `{hex}`")))?;
        Ok(Self::new(m, frac_bits))
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.num.bits();
        let shift = bits.saturating_sub(60);
        let top: u64 = (&self.num >> shift).try_into().unwrap_or(u64::MAX);
        top as f64 * 2f64.powi(shift as i32 - self.frac_bits as i32)
    }

    pub fn add(&self, other: &SqFrac) -> SqFrac {
        self.assert_same(other);
        SqFrac::new(&self.num + &other.num, self.frac_bits)
    }

    /// `|self − other|`.
    pub fn abs_diff(&self, other: &SqFrac) -> SqFrac {
        self.assert_same(other);
        let d = if self.num >= other.num {
            &self.num - &other.num
        } else {
            &other.num - &self.num
        };
        SqFrac::new(d, self.frac_bits)
    }

    /// `floor((self + other)/2)`.
    pub fn midpoint(&self, other: &SqFrac) -> SqFrac {
        self.assert_same(other);
        SqFrac::new((&self.num + &other.num) >> 1u32, self.frac_bits)
    }

    /// Re-expresses at another precision (exact when raising it).
    pub fn with_frac_bits(&self, frac_bits: u32) -> SqFrac {
        let num = if frac_bits >= self.frac_bits {
            &self.num << (frac_bits - self.frac_bits)
        } else {
            &self.num >> (self.frac_bits - frac_bits)
        };
        SqFrac::new(num, frac_bits)
    }

    fn assert_same(&self, other: &SqFrac) {
        assert_eq!(
            self.frac_bits, other.frac_bits,
            "squared values must share precision"
        );
    }
}

impl PartialOrd for SqFrac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SqFrac {
    fn cmp(&self, other: &Self) -> Ordering {
        self.assert_same(other);
        self.num.cmp(&other.num)
    }
}

impl fmt::Debug for SqFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SqFrac({:.6e})", self.to_f64())
    }
}

/// `Σ_i min(|Δ_i|, 1 − |Δ_i|)²` in `2B` fractional bits.
pub fn torus_sq_distance(p: &TorusPoint, q: &TorusPoint) -> Result<SqFrac, TorusError> {
    if p.dim() != q.dim() {
        return Err(TorusError::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if p.bits() != q.bits() {
        return Err(TorusError::PrecisionMismatch(p.bits(), q.bits()));
    }
    let sum = p
        .coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| a.sub(b).sq_norm())
        .fold(BigUint::zero(), |acc, x| acc + x);
    Ok(SqFrac::new(sum, 2 * p.bits()))
}
