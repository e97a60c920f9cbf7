//! Double-double arithmetic built on error-free transformations.
//!
//! A [`DoubleF64`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand. It is used where the predictor
//! taps are many orders of magnitude larger than the quantity they combine
//! into, and by the signal generators so that every sample is rounded once.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// `a + b = s + err` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Requires `|a| >= |b|`.
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[cfg(target_feature = "fma")]
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `a * b = p + err` exactly (Dekker's product; no hardware FMA assumed).
#[cfg(not(target_feature = "fma"))]
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

#[cfg(not(target_feature = "fma"))]
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleF64 {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleF64 {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Self = Self {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };
    pub const FRAC_PI_2: Self = Self {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Self::from_prod(q1, b);
        let q2 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    /// Sine and cosine, reduced by the nearest multiple of pi/2.
    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / Self::FRAC_PI_2.hi).round();
        let r = self - Self::FRAC_PI_2 * Self::new(k, 0.0);
        let (s, c) = sin_cos_taylor(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }
}

/// Taylor series for `|r| <= pi/4` (plus reduction slack).
fn sin_cos_taylor(r: DoubleF64) -> (DoubleF64, DoubleF64) {
    if r.hi == 0.0 {
        return (r, DoubleF64::ONE);
    }
    let r2 = r * r;
    let mut sin = r;
    let mut cos = DoubleF64::ONE;
    let mut term_s = r;
    let mut term_c = DoubleF64::ONE;
    let mut n = 1.0;
    loop {
        term_c = -(term_c * r2).div_f64(n * (n + 1.0));
        term_s = -(term_s * r2).div_f64((n + 1.0) * (n + 2.0));
        cos += term_c;
        sin += term_s;
        n += 2.0;
        if term_c.hi.abs() < 1e-34 && term_s.hi.abs() < 1e-34 {
            break;
        }
    }
    (sin, cos)
}

impl Add for DoubleF64 {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
    }
}

impl Add<f64> for DoubleF64 {
    type Output = Self;
    #[inline]
    fn add(self, b: f64) -> Self {
        let (s1, s2) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Self { hi, lo }
    }
}

impl AddAssign for DoubleF64 {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl Neg for DoubleF64 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleF64 {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleF64 {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleF64 {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + q3
    }
}

impl From<f64> for DoubleF64 {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

/// Running sum of `tap * x` products where each tap is itself a double-double.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductAccumulator {
    sum: DoubleF64,
}

impl ProductAccumulator {
    #[inline]
    pub fn add_product(&mut self, tap_hi: f64, tap_lo: f64, x: f64) {
        let (p, e) = two_prod(tap_hi, x);
        self.sum += DoubleF64::from_sum(p, e + tap_lo * x);
    }

    #[inline]
    pub fn value(&self) -> DoubleF64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_and_two_prod_are_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
        let a = 1.0 + f64::EPSILON;
        let (p, e) = two_prod(a, a);
        // (1 + eps)^2 = 1 + 2 eps + eps^2
        assert_eq!(p, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(e, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn division_recovers_one_third() {
        let third = DoubleF64::ONE / DoubleF64::from(3.0);
        let back = third.mul_f64(3.0) - DoubleF64::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sin_cos_matches_known_values() {
        let (s, c) = DoubleF64::FRAC_PI_2.mul_f64(0.5).sin_cos();
        let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.to_f64() - half_sqrt2).abs() < 1e-16);
        assert!((c.to_f64() - half_sqrt2).abs() < 1e-16);
        // sin^2 + cos^2 = 1 to double-double accuracy
        for x in [0.1, 1.0, 2.5, -3.0, 1234.5678] {
            let (s, c) = DoubleF64::from(x).sin_cos();
            let one = s * s + c * c - DoubleF64::ONE;
            assert!(one.to_f64().abs() < 1e-30, "x = {x}: {one:?}");
            assert!((s.to_f64() - x.sin()).abs() < 2e-16);
            assert!((c.to_f64() - x.cos()).abs() < 2e-16);
        }
    }

    #[test]
    fn cos_of_large_integer_multiple_is_accurate() {
        // cos(pi/3 * 6000) = cos(2000 pi) = 1, evaluated through a double-double phase.
        let phase = DoubleF64::PI.div_f64(3.0).mul_f64(6000.0);
        assert!((phase.cos().to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn accumulator_cancels_large_taps() {
        let mut acc = ProductAccumulator::default();
        acc.add_product(1e17, 0.0, 1.0);
        acc.add_product(0.75, 0.0, 1.0);
        acc.add_product(-1e17, 0.0, 1.0);
        assert_eq!(acc.value().to_f64(), 0.75);
    }
}
