//! Closed real intervals and axis-aligned interval boxes.
//!
//! Bounds of `+`, `-`, `*`, `/` and `sqrt` are rounded outward exactly: the
//! rounding error of each endpoint is recovered with an error-free
//! transformation (two-sum or fused multiply-add) and the endpoint is moved
//! by one ulp only when the rounded value lies on the wrong side of the true
//! value. Transcendental functions go through the platform libm, whose
//! results are not correctly rounded, so their bounds are widened by a fixed
//! number of ulps instead.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ulps added to each bound of a libm-backed function.
const LIBM_SLACK_ULPS: u32 = 2;

#[inline]
fn widen_down(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |acc, _| acc.next_down())
}

#[inline]
fn widen_up(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |acc, _| acc.next_up())
}

// Directed rounding for a rounded result `s` whose exact value is `s + err`.
#[inline]
fn round_down(s: f64, err: f64) -> f64 {
    if s.is_nan() {
        f64::NEG_INFINITY
    } else if s == f64::INFINITY {
        // overflow of two finite operands: the true value is finite
        f64::MAX
    } else if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
fn round_up(s: f64, err: f64) -> f64 {
    if s.is_nan() {
        f64::INFINITY
    } else if s == f64::NEG_INFINITY {
        f64::MIN
    } else if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return (s, 0.0);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    round_down(s, e)
}

#[inline]
fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    round_up(s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    // 0 * inf is taken to be 0 for interval endpoints
    if a == 0.0 || b == 0.0 {
        return (0.0, 0.0);
    }
    let p = a * b;
    if !p.is_finite() {
        return (p, 0.0);
    }
    (p, a.mul_add(b, -p))
}

#[inline]
fn mul_down(a: f64, b: f64) -> f64 {
    let (p, e) = two_prod(a, b);
    round_down(p, e)
}

#[inline]
fn mul_up(a: f64, b: f64) -> f64 {
    let (p, e) = two_prod(a, b);
    round_up(p, e)
}

#[inline]
fn div_err(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    if !q.is_finite() || q == 0.0 && a == 0.0 {
        return (q, 0.0);
    }
    // a - q*b is exact; sign of the quotient error follows sign(r) * sign(b)
    let r = (-q).mul_add(b, a);
    (q, if b > 0.0 { r } else { -r })
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    let (q, e) = div_err(a, b);
    round_down(q, e)
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    let (q, e) = div_err(a, b);
    round_up(q, e)
}

#[inline]
fn sqrt_err(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    if !s.is_finite() || s == 0.0 {
        return (s, 0.0);
    }
    (s, (-s).mul_add(s, x))
}

/// A closed interval `[lo, hi]`, or the empty set.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::try_new(v[0], v[1])
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            write!(f, "[{:?}, {:?}]", self.lo, self.hi)
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Panics when `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).expect("invalid interval bounds")
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Interval `[c - r, c + r]` rounded outward.
    pub fn centered(c: f64, r: f64) -> Self {
        Interval {
            lo: add_down(c, -r),
            hi: add_up(c, r),
        }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    /// Diameter `hi - lo` rounded up; 0 for the empty interval.
    #[inline]
    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            add_up(self.hi, -self.lo)
        }
    }

    #[inline]
    pub fn mid(&self) -> f64 {
        if self.lo == f64::NEG_INFINITY || self.hi == f64::INFINITY {
            if self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY {
                return 0.0;
            }
            return if self.lo == f64::NEG_INFINITY {
                f64::MIN
            } else {
                f64::MAX
            };
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value of the interval's members.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`. The empty interval is a subset of everything.
    pub fn is_subset(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo.max(other.lo) <= self.hi.min(other.hi)
    }

    #[inline]
    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval::EMPTY
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Widen both sides by `delta >= 0`.
    pub fn inflate(&self, delta: f64) -> Interval {
        if self.is_empty() {
            return *self;
        }
        Interval {
            lo: add_down(self.lo, -delta),
            hi: add_up(self.hi, delta),
        }
    }

    /// Product with a scalar, rounded outward.
    pub fn scale(&self, c: f64) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        if c == 0.0 {
            return Interval::point(0.0);
        }
        if c > 0.0 {
            Interval {
                lo: mul_down(self.lo, c),
                hi: mul_up(self.hi, c),
            }
        } else {
            Interval {
                lo: mul_down(self.hi, c),
                hi: mul_up(self.lo, c),
            }
        }
    }

    /// Quotient by a scalar, rounded outward; the whole line for `c = 0`.
    pub fn div_scalar(&self, c: f64) -> Interval {
        if self.is_empty() {
            return Interval::EMPTY;
        }
        if c == 0.0 {
            return Interval::ENTIRE;
        }
        if c > 0.0 {
            Interval {
                lo: div_down(self.lo, c),
                hi: div_up(self.hi, c),
            }
        } else {
            Interval {
                lo: div_down(self.hi, c),
                hi: div_up(self.lo, c),
            }
        }
    }

    pub fn sqr(&self) -> Interval {
        if self.is_empty() {
            return *self;
        }
        if self.lo >= 0.0 {
            Interval {
                lo: mul_down(self.lo, self.lo),
                hi: mul_up(self.hi, self.hi),
            }
        } else if self.hi <= 0.0 {
            Interval {
                lo: mul_down(self.hi, self.hi),
                hi: mul_up(self.lo, self.lo),
            }
        } else {
            let m = self.lo.abs().max(self.hi);
            Interval {
                lo: 0.0,
                hi: mul_up(m, m),
            }
        }
    }

    /// Square root of the non-negative part; empty when `hi < 0`.
    pub fn sqrt(&self) -> Interval {
        if self.is_empty() || self.hi < 0.0 {
            return Interval::EMPTY;
        }
        let lo = if self.lo <= 0.0 {
            0.0
        } else {
            let (s, e) = sqrt_err(self.lo);
            round_down(s, e)
        };
        let (s, e) = sqrt_err(self.hi);
        Interval {
            lo,
            hi: round_up(s, e),
        }
    }

    /// Members `x` of `self` with `x * x` in `sq`, hulled.
    pub fn sqr_preimage(&self, sq: &Interval) -> Interval {
        let root = sq.sqrt();
        if root.is_empty() {
            return Interval::EMPTY;
        }
        let pos = self.intersect(&root);
        let neg = self.intersect(&-root);
        pos.hull(&neg)
    }

    pub fn recip(&self) -> Interval {
        Interval::point(1.0) / *self
    }

    pub fn sin(&self) -> Interval {
        self.periodic_range(f64::sin, FRAC_PI_2)
    }

    pub fn cos(&self) -> Interval {
        self.periodic_range(f64::cos, 0.0)
    }

    // Range of sin or cos: `f` peaks at `phase + 2k*pi` and bottoms out at
    // `phase + (2k+1)*pi`.
    fn periodic_range(&self, f: fn(f64) -> f64, phase: f64) -> Interval {
        if self.is_empty() {
            return *self;
        }
        if !(self.width() < TAU) {
            return Interval::new(-1.0, 1.0);
        }
        let (a, b) = (f(self.lo), f(self.hi));
        let mut lo = widen_down(a.min(b), LIBM_SLACK_ULPS);
        let mut hi = widen_up(a.max(b), LIBM_SLACK_ULPS);
        // one extra multiple on each side absorbs rounding of k*pi + phase
        let k_lo = ((self.lo - phase) / PI).ceil() - 1.0;
        let k_hi = ((self.hi - phase) / PI).floor() + 1.0;
        let slack = 8.0 * f64::EPSILON * self.mag().max(1.0);
        let mut k = k_lo;
        while k <= k_hi {
            let c = phase + k * PI;
            if c >= self.lo - slack && c <= self.hi + slack {
                if (k as i64).rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
            k += 1.0;
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    /// Quadrant-aware enclosure of `atan2(y, x)` over the box `y × x`.
    /// A box crossing the negative x-axis gets an interval around `π` whose
    /// upper end exceeds `π`; read it modulo 2π. Returns the flag `true` only
    /// when the box contains the origin and the result is the full turn.
    pub fn atan2(y: &Interval, x: &Interval) -> (Interval, bool) {
        if y.is_empty() || x.is_empty() {
            return (Interval::EMPTY, false);
        }
        if y.contains_zero() && x.contains_zero() {
            return (Interval::new(-PI, PI), true);
        }
        if y.contains_zero() && x.hi < 0.0 {
            // rotate by π so the box sits on the positive x-axis
            let (r, _) = Interval::atan2(&-*y, &-*x);
            return (
                Interval {
                    lo: widen_down(r.lo + PI, LIBM_SLACK_ULPS),
                    hi: widen_up(r.hi + PI, LIBM_SLACK_ULPS),
                },
                false,
            );
        }
        let corners = [
            y.lo.atan2(x.lo),
            y.lo.atan2(x.hi),
            y.hi.atan2(x.lo),
            y.hi.atan2(x.hi),
        ];
        let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (
            Interval {
                lo: widen_down(lo, LIBM_SLACK_ULPS).max(-PI),
                hi: widen_up(hi, LIBM_SLACK_ULPS).min(PI),
            },
            false,
        )
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;

    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: add_down(self.lo, rhs.lo),
            hi: add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval {
            lo: add_down(self.lo, -rhs.hi),
            hi: add_up(self.hi, -rhs.lo),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        // sign cases pick the two endpoint products that bound the result
        let (lo, hi) = if a >= 0.0 {
            if c >= 0.0 {
                (mul_down(a, c), mul_up(b, d))
            } else if d <= 0.0 {
                (mul_down(b, c), mul_up(a, d))
            } else {
                (mul_down(b, c), mul_up(b, d))
            }
        } else if b <= 0.0 {
            if c >= 0.0 {
                (mul_down(a, d), mul_up(b, c))
            } else if d <= 0.0 {
                (mul_down(b, d), mul_up(a, c))
            } else {
                (mul_down(a, d), mul_up(a, c))
            }
        } else if c >= 0.0 {
            (mul_down(a, d), mul_up(b, d))
        } else if d <= 0.0 {
            (mul_down(b, c), mul_up(a, c))
        } else {
            (
                mul_down(a, d).min(mul_down(b, c)),
                mul_up(a, c).max(mul_up(b, d)),
            )
        };
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;

    /// Division by an interval containing zero yields the whole real line.
    fn div(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        if rhs.contains_zero() {
            return Interval::ENTIRE;
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let (lo, hi) = if c > 0.0 {
            if a >= 0.0 {
                (div_down(a, d), div_up(b, c))
            } else if b <= 0.0 {
                (div_down(a, c), div_up(b, d))
            } else {
                (div_down(a, c), div_up(b, c))
            }
        } else if a >= 0.0 {
            (div_down(b, d), div_up(a, c))
        } else if b <= 0.0 {
            (div_down(b, c), div_up(a, d))
        } else {
            (div_down(b, d), div_up(a, d))
        };
        Interval { lo, hi }
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;

    fn mul(self, rhs: f64) -> Interval {
        self.scale(rhs)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Component chosen for bisection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BisectionRule {
    /// Cycle through components by tree depth.
    #[default]
    RoundRobin,
    /// Widest component, lowest index on ties.
    LargestFirst,
}

/// An ordered product of intervals, one per variable.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalBox {
    components: Vec<Interval>,
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.components.iter()).finish()
    }
}

impl IntervalBox {
    pub fn new(components: Vec<Interval>) -> Self {
        IntervalBox { components }
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Self {
        IntervalBox::new(bounds.iter().map(|&(l, h)| Interval::new(l, h)).collect())
    }

    pub fn uniform(dim: usize, iv: Interval) -> Self {
        IntervalBox::new(vec![iv; dim])
    }

    pub fn from_point(p: &[f64]) -> Self {
        IntervalBox::new(p.iter().copied().map(Interval::point).collect())
    }

    pub fn empty(dim: usize) -> Self {
        IntervalBox::uniform(dim.max(1), Interval::EMPTY)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Interval] {
        &mut self.components
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.components.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().any(Interval::is_empty)
    }

    /// Largest component diameter.
    pub fn width(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyBox);
        }
        Ok(self.max_width())
    }

    // width without the emptiness check; 0 for an empty box
    pub(crate) fn max_width(&self) -> f64 {
        self.components
            .iter()
            .map(Interval::width)
            .fold(0.0, f64::max)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.components.iter().map(Interval::mid).collect()
    }

    /// Product of component widths; 0 for empty or degenerate boxes.
    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.components.iter().map(|c| c.hi - c.lo).product()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.components.iter().zip(p).all(|(c, &x)| c.contains(x))
    }

    pub fn is_subset(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim()
            && (self.is_empty()
                || self
                    .components
                    .iter()
                    .zip(&other.components)
                    .all(|(a, b)| a.is_subset(b)))
    }

    pub fn intersects(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.intersects(b))
    }

    pub fn intersect(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.check_dim(other)?;
        Ok(IntervalBox::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        ))
    }

    pub fn hull(&self, other: &IntervalBox) -> Result<IntervalBox> {
        self.check_dim(other)?;
        Ok(IntervalBox::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.hull(b))
                .collect(),
        ))
    }

    /// Widen every component by `delta` on both sides.
    pub fn inflate(&self, delta: f64) -> IntervalBox {
        assert!(delta >= 0.0, "inflation must be non-negative");
        IntervalBox::new(self.components.iter().map(|c| c.inflate(delta)).collect())
    }

    /// Translate the box by `offset`, rounding outward.
    pub fn shift(&self, offset: &[f64]) -> Result<IntervalBox> {
        if offset.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: offset.len(),
            });
        }
        Ok(IntervalBox::new(
            self.components
                .iter()
                .zip(offset)
                .map(|(c, &o)| *c + Interval::point(o))
                .collect(),
        ))
    }

    fn check_dim(&self, other: &IntervalBox) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Index of the component to split, considering only components at least
    /// `min_width` wide (and always strictly positive).
    pub fn split_index(&self, rule: BisectionRule, depth: usize, min_width: f64) -> Option<usize> {
        let n = self.dim();
        let splittable = |c: &Interval| {
            let w = c.width();
            w > 0.0 && w >= min_width && c.mid() > c.lo && c.mid() < c.hi
        };
        match rule {
            BisectionRule::RoundRobin => (0..n)
                .map(|k| (depth + k) % n)
                .find(|&i| splittable(&self.components[i])),
            BisectionRule::LargestFirst => {
                let mut best: Option<(usize, f64)> = None;
                for (i, c) in self.components.iter().enumerate() {
                    if !splittable(c) {
                        continue;
                    }
                    let w = c.width();
                    if best.is_none_or(|(_, bw)| w > bw) {
                        best = Some((i, w));
                    }
                }
                best.map(|(i, _)| i)
            }
        }
    }

    /// Split at the midpoint of the component selected by `rule`.
    pub fn bisect(&self, rule: BisectionRule, depth: usize) -> Result<(IntervalBox, IntervalBox)> {
        self.bisect_min_width(rule, depth, 0.0)
    }

    pub fn bisect_min_width(
        &self,
        rule: BisectionRule,
        depth: usize,
        min_width: f64,
    ) -> Result<(IntervalBox, IntervalBox)> {
        if self.is_empty() {
            return Err(Error::EmptyBox);
        }
        let i = self
            .split_index(rule, depth, min_width)
            .or_else(|| self.split_index(rule, depth, 0.0))
            .ok_or(Error::UnsplittableBox)?;
        Ok(self.bisect_at(i))
    }

    pub fn bisect_at(&self, i: usize) -> (IntervalBox, IntervalBox) {
        let c = self.components[i];
        let m = c.mid();
        let mut left = self.clone();
        let mut right = self.clone();
        left.components[i] = Interval { lo: c.lo, hi: m };
        right.components[i] = Interval { lo: m, hi: c.hi };
        (left, right)
    }
}

impl std::ops::Index<usize> for IntervalBox {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.components[i]
    }
}

impl std::ops::IndexMut<usize> for IntervalBox {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.components[i]
    }
}

pub fn interval_add(a: Interval, b: Interval) -> Interval {
    a + b
}

pub fn interval_mul(a: Interval, b: Interval) -> Interval {
    a * b
}

pub fn box_width(b: &IntervalBox) -> Result<f64> {
    b.width()
}

pub fn box_bisect(
    b: &IntervalBox,
    rule: BisectionRule,
    depth: usize,
) -> Result<(IntervalBox, IntervalBox)> {
    b.bisect(rule, depth)
}

pub fn box_inflate(b: &IntervalBox, delta: f64) -> IntervalBox {
    b.inflate(delta)
}
