//! Arbitrary-precision real and complex numbers backed by MPFR.
//!
//! Precision travels with each value. A binary operation rounds its result
//! once, at the larger of the two operand precisions.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::{Float, Integer, Rational};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Binary floating-point number with its own precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        BigReal(Float::with_val(prec, 1))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        BigReal(Float::with_val(prec, x))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        BigReal(Float::with_val(prec, x))
    }

    pub fn from_integer(x: &Integer, prec: u32) -> Self {
        BigReal(Float::with_val(prec, x))
    }

    pub fn from_rational(x: &Rational, prec: u32) -> Self {
        BigReal(Float::with_val(prec, x))
    }

    pub fn from_float(x: Float) -> Self {
        BigReal(x)
    }

    pub fn pi(prec: u32) -> Self {
        BigReal(Float::with_val(prec, Constant::Pi))
    }

    /// `2^e` at the given precision.
    pub fn exp2i(e: i32, prec: u32) -> Self {
        BigReal(Float::with_val(prec, 1) << e)
    }

    /// Parses a decimal string such as `-2.13359e-69`.
    pub fn parse_decimal(s: &str, prec: u32) -> Option<Self> {
        Float::parse(s.trim()).ok().map(|p| BigReal(Float::with_val(prec, p)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Rounds (or extends) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigReal(Float::with_val(prec, &self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_positive()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// `log2 |x|` as an `f64`; valid far outside the `f64` exponent range.
    /// Returns `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }

    pub fn abs(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.abs_ref()))
    }

    pub fn sqrt(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn exp(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn ln(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn sin(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.sin_ref()))
    }

    pub fn cos(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.cos_ref()))
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let p = self.prec();
        let (s, c) = self.0.clone().sin_cos(Float::new(p));
        (BigReal(s), BigReal(c))
    }

    /// `atan2(self, x)`, the angle of the point `(x, self)`.
    pub fn atan2(&self, x: &BigReal) -> Self {
        let p = self.prec().max(x.prec());
        BigReal(Float::with_val(p, self.0.atan2_ref(&x.0)))
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigReal(Float::with_val(self.prec(), &self.0 * k))
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        BigReal(Float::with_val(self.prec(), &self.0 * q))
    }

    pub fn square(&self) -> Self {
        BigReal(Float::with_val(self.prec(), self.0.square_ref()))
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_integer(&self) -> Option<Integer> {
        self.0.to_integer()
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci(&self, digits: usize) -> String {
        format_sci(&self.0, digits)
    }

    /// Decimal string carrying every significant digit of the precision.
    pub fn to_decimal_string(&self) -> String {
        let digits = decimal_digits_for_prec(self.prec());
        format_sci(&self.0, digits)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Number of decimal digits that round-trip a binary mantissa of `prec` bits.
pub fn decimal_digits_for_prec(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn format_sci(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0e0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // rug prints "d.ddde±x"; normalise to a plain e-notation.
    let s = x.to_string_radix(10, Some(digits.max(1)));
    match s.split_once('e') {
        Some((mant, exp)) => {
            let e: i64 = exp.parse().unwrap_or(0);
            format!("{mant}e{e}")
        }
        None => format!("{s}e0"),
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let p = self.prec().max(rhs.prec());
                BigReal(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(Float::with_val(self.prec(), -&self.0))
    }
}

/// Complex number whose parts share one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    re: BigReal,
    im: BigReal,
}

impl BigComplex {
    /// Builds from parts, promoting both to the larger precision.
    pub fn new(re: BigReal, im: BigReal) -> Self {
        let p = re.prec().max(im.prec());
        let re = if re.prec() == p { re } else { re.with_prec(p) };
        let im = if im.prec() == p { im } else { im.with_prec(p) };
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex { re: BigReal::zero(prec), im: BigReal::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        BigComplex { re: BigReal::one(prec), im: BigReal::zero(prec) }
    }

    pub fn i(prec: u32) -> Self {
        BigComplex { re: BigReal::zero(prec), im: BigReal::one(prec) }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.prec();
        BigComplex { re, im: BigReal::zero(p) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex { re: BigReal::from_f64(re, prec), im: BigReal::from_f64(im, prec) }
    }

    pub fn from_i64(re: i64, prec: u32) -> Self {
        BigComplex::from_real(BigReal::from_i64(re, prec))
    }

    pub fn re(&self) -> &BigReal {
        &self.re
    }

    pub fn im(&self) -> &BigReal {
        &self.im
    }

    pub fn into_parts(self) -> (BigReal, BigReal) {
        (self.re, self.im)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigReal {
        let p = self.prec();
        let re2 = Float::with_val(2 * p, self.re.0.square_ref());
        let im2 = Float::with_val(2 * p, self.im.0.square_ref());
        BigReal(Float::with_val(p, &re2 + &im2))
    }

    pub fn abs(&self) -> BigReal {
        let p = self.prec();
        BigReal(Float::with_val(p, self.re.0.hypot_ref(&self.im.0)))
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    /// `log2 |z|` as an `f64`.
    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let hi = a.max(b);
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        let lo = a.min(b);
        hi + 0.5 * (1.0 + (2.0 * (lo - hi)).exp2()).log2()
    }

    pub fn scale(&self, x: &BigReal) -> Self {
        BigComplex::new(&self.re * x, &self.im * x)
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        BigComplex { re: self.re.mul_rational(q), im: self.im.mul_rational(q) }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigComplex { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        BigComplex { re: -&self.im, im: self.re.clone() }
    }

    pub fn square(&self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, self.re.0.square_ref()) - Float::with_val(p, self.im.0.square_ref());
        let im = Float::with_val(p, &self.re.0 * &self.im.0) << 1u32;
        BigComplex { re: BigReal(re), im: BigReal(im) }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        BigComplex { re: &self.re / &d, im: -(&self.im / &d) }
    }

    /// `z^k` by binary exponentiation.
    pub fn pow_u64(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn pow_i64(&self, k: i64) -> Self {
        if k >= 0 {
            self.pow_u64(k as u64)
        } else {
            self.pow_u64(k.unsigned_abs()).recip()
        }
    }

    pub fn exp(&self) -> Self {
        cplx_exp(self)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        BigComplex::new(self.abs().ln(), self.arg())
    }

    /// Scientific rendering of both parts at `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let im = &self.im;
        if im.is_sign_negative() {
            format!("{} - {} i", self.re.to_sci(digits), im.abs().to_sci(digits))
        } else {
            format!("{} + {} i", self.re.to_sci(digits), im.to_sci(digits))
        }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = decimal_digits_for_prec(self.prec());
        f.write_str(&self.to_sci(digits))
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        // Each part is rounded once from exact products.
        let re = mul_sub(p, &self.re.0, &rhs.re.0, &self.im.0, &rhs.im.0);
        let im = mul_add(p, &self.re.0, &rhs.im.0, &self.im.0, &rhs.re.0);
        BigComplex { re: BigReal(re), im: BigReal(im) }
    }
}

fn mul_sub(p: u32, a: &Float, b: &Float, c: &Float, d: &Float) -> Float {
    let ab = Float::with_val(a.prec() + b.prec(), a * b);
    let cd = Float::with_val(c.prec() + d.prec(), c * d);
    Float::with_val(p, &ab - &cd)
}

fn mul_add(p: u32, a: &Float, b: &Float, c: &Float, d: &Float) -> Float {
    let ab = Float::with_val(a.prec() + b.prec(), a * b);
    let cd = Float::with_val(c.prec() + d.prec(), c * d);
    Float::with_val(p, &ab + &cd)
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        let d = rhs.norm_sqr().with_prec(p + 8);
        let num = self * &rhs.conj();
        BigComplex {
            re: (num.re.with_prec(p + 8) / &d).with_prec(p),
            im: (num.im.with_prec(p + 8) / &d).with_prec(p),
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -&self.re, im: -&self.im }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -self.re, im: -self.im }
    }
}

macro_rules! complex_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
    };
}

complex_owned_binop!(Add, add);
complex_owned_binop!(Sub, sub);
complex_owned_binop!(Mul, mul);
complex_owned_binop!(Div, div);

/// `e(x) = exp(2πi x)` at the precision of `x`.
pub fn e_of(x: &BigReal) -> BigComplex {
    let p = x.prec();
    // Reduce to [-1/2, 1/2] first so large arguments keep their accuracy.
    let n = x.round_to_integer().unwrap_or_default();
    let frac = x.with_prec(p + 16) - BigReal::from_integer(&n, p + 16);
    let angle = (BigReal::pi(p + 16) * frac).mul_i64(2);
    let (s, c) = angle.sin_cos();
    BigComplex::new(c.with_prec(p), s.with_prec(p))
}

/// `e(q)` for an exact rational, reduced modulo 1 before any rounding.
pub fn e_of_rational(q: &Rational, prec: u32) -> BigComplex {
    let (frac, _) = q.clone().fract_floor(Integer::new());
    e_of(&BigReal::from_rational(&frac, prec))
}

/// Complex exponential.
pub fn cplx_exp(z: &BigComplex) -> BigComplex {
    let p = z.prec();
    let m = z.re.with_prec(p + 8).exp();
    let (s, c) = z.im.with_prec(p + 8).sin_cos();
    BigComplex::new((&m * &c).with_prec(p), (&m * &s).with_prec(p))
}

/// True iff `a` and `b` agree to `digits` significant decimal digits, or both
/// are negligible at the working precision.
pub fn agree_to_digits(a: &BigComplex, b: &BigComplex, digits: u32) -> bool {
    assert!(digits >= 1, "digits must be positive");
    let prec = a.prec().max(b.prec());
    let la = a.log2_abs();
    let lb = b.log2_abs();
    let floor = -(prec as f64) * 0.3 * std::f64::consts::LOG2_10;
    if la < floor && lb < floor {
        return true;
    }
    let diff = (a - b).log2_abs();
    let bound = (1.0 - digits as f64) * std::f64::consts::LOG2_10 + la.max(lb);
    diff <= bound
}

/// Relative agreement to `digits` significant digits with no special case for
/// tiny magnitudes.
pub fn agree_relative(a: &BigComplex, b: &BigComplex, digits: u32) -> bool {
    if a == b {
        return true;
    }
    log2_rel_diff(a, b) <= (1.0 - digits as f64) * std::f64::consts::LOG2_10
}

/// Relative distance `|a - b| / max(|a|, |b|)` as `log2`, or `-inf` when equal.
pub fn log2_rel_diff(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = (a - b).log2_abs();
    d - a.log2_abs().max(b.log2_abs())
}
