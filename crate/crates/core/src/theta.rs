//! Theta constants with characteristics, the product `Θ` built from them, and
//! the genus-1 Siegel function.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use crate::bigcomplex::{cplx_exp, e_of_rational, BigComplex, BigReal};
use crate::error::{Error, Result};
use crate::symplectic::SiegelPoint;

/// A characteristic `[r; s]` with rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaChar {
    r: Vec<Rational>,
    s: Vec<Rational>,
}

impl ThetaChar {
    pub fn new(r: Vec<Rational>, s: Vec<Rational>) -> Result<Self> {
        if r.len() != s.len() || r.is_empty() {
            return Err(Error::Dimension(format!("characteristic halves of length {} and {}", r.len(), s.len())));
        }
        Ok(ThetaChar { r, s })
    }

    /// Splits `[r_1..r_g, s_1..s_g]`.
    pub fn from_vector(v: &[Rational]) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension("characteristic vector must have even length".into()));
        }
        let g = v.len() / 2;
        ThetaChar::new(v[..g].to_vec(), v[g..].to_vec())
    }

    /// `[k_1/N, …, k_{2g}/N]`.
    pub fn from_numerators(k: &[i64], n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLevel(n));
        }
        let v: Vec<Rational> = k.iter().map(|&x| Rational::from((x, n))).collect();
        ThetaChar::from_vector(&v)
    }

    pub fn g(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[Rational] {
        &self.r
    }

    pub fn s(&self) -> &[Rational] {
        &self.s
    }

    pub fn to_vector(&self) -> Vec<Rational> {
        self.r.iter().chain(&self.s).cloned().collect()
    }

    /// Entries reduced into `[0, 1)`.
    pub fn reduced(&self) -> Self {
        let red = |x: &Rational| x.clone().fract_floor(Integer::new()).0;
        ThetaChar { r: self.r.iter().map(red).collect(), s: self.s.iter().map(red).collect() }
    }

    pub fn negated(&self) -> Self {
        ThetaChar {
            r: self.r.iter().map(|x| Rational::from(-x)).collect(),
            s: self.s.iter().map(|x| Rational::from(-x)).collect(),
        }
    }

    /// `self + shift` for an integer vector of length `2g`.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        assert_eq!(shift.len(), 2 * self.g());
        let v: Vec<Rational> = self.to_vector().into_iter().zip(shift).map(|(x, &k)| x + k).collect();
        ThetaChar::from_vector(&v).expect("same length")
    }

    /// `self − other`.
    pub fn minus(&self, other: &ThetaChar) -> Self {
        let v: Vec<Rational> =
            self.to_vector().iter().zip(other.to_vector()).map(|(a, b)| Rational::from(a - &b)).collect();
        ThetaChar::from_vector(&v).expect("same length")
    }

    /// Least common denominator of all entries.
    pub fn denominator(&self) -> Integer {
        self.r.iter().chain(&self.s).fold(Integer::from(1), |acc, x| acc.lcm(x.denom()))
    }

    pub fn is_integral(&self) -> bool {
        self.denominator() == 1
    }

    pub fn is_half_integral(&self) -> bool {
        self.denominator() <= 2
    }

    /// `r^T s`.
    pub fn rs_dot(&self) -> Rational {
        self.r.iter().zip(&self.s).fold(Rational::new(), |acc, (a, b)| acc + Rational::from(a * b))
    }
}

impl fmt::Display for ThetaChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "[{}; {}]", join(&self.r), join(&self.s))
    }
}

/// Accepts `[1/5, 2/5; 0, 3/5]` or the flat form `1/5,2/5,0,3/5`.
impl FromStr for ThetaChar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let flat = s.trim().trim_start_matches('[').trim_end_matches(']').replace(';', ",");
        let entries = flat
            .split(',')
            .map(|t| t.trim().parse::<Rational>().map_err(|_| Error::Parse(format!("bad rational '{}'", t.trim()))))
            .collect::<Result<Vec<_>>>()?;
        ThetaChar::from_vector(&entries)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Odd iff `4 r^T s` is an odd integer.
pub fn classify_char(v: &ThetaChar) -> Result<Parity> {
    if !v.is_half_integral() {
        return Err(Error::NotHalfIntegral);
    }
    let four = v.rs_dot() * 4u32;
    let k = four.numer();
    Ok(if k.is_odd() { Parity::Odd } else { Parity::Even })
}

/// Half-integer characteristics in `{0, 1/2}^{2g}` split by parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSets {
    pub g: usize,
    pub s_minus: Vec<ThetaChar>,
    pub s_plus: Vec<ThetaChar>,
}

pub fn build_char_sets(g: usize) -> CharSets {
    assert!(g >= 1, "genus must be positive");
    let mut sets = CharSets { g, s_minus: Vec::new(), s_plus: Vec::new() };
    for mask in 0u64..(1u64 << (2 * g)) {
        let v: Vec<Rational> = (0..2 * g)
            .map(|k| if mask >> (2 * g - 1 - k) & 1 == 1 { Rational::from((1, 2)) } else { Rational::new() })
            .collect();
        let c = ThetaChar::from_vector(&v).expect("even length");
        match classify_char(&c).expect("half-integral") {
            Parity::Odd => sets.s_minus.push(c),
            Parity::Even => sets.s_plus.push(c),
        }
    }
    sets
}

/// Box `center + [-radius, radius]^g` of summation indices.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationPlan {
    pub radius: u32,
    pub center: Vec<i64>,
    /// Lower bound on the smallest eigenvalue of `Im Z`.
    pub lambda_min: f64,
    /// `log2` of the bound on the discarded part of the sum.
    pub tail_log2: f64,
}

impl TruncationPlan {
    pub fn tail_bound(&self, prec: u32) -> BigReal {
        BigReal::from_float(Float::with_val(prec, self.tail_log2).exp2())
    }

    pub fn box_size(&self) -> u64 {
        (2 * u64::from(self.radius) + 1).pow(self.center.len() as u32)
    }
}

fn imag_f64(z: &SiegelPoint) -> Vec<Vec<f64>> {
    z.imag().iter().map(|row| row.iter().map(BigReal::to_f64).collect()).collect()
}

/// Lower bound on the smallest eigenvalue of `Im Z`.
pub fn lambda_min_bound(z: &SiegelPoint) -> Result<f64> {
    let safety = 1.0 - (-20f64).exp2();
    let y = z.imag();
    let g = y.len();
    let bound = match g {
        1 => y[0][0].to_f64(),
        2 => {
            // det / λ_max avoids cancellation in the smaller root.
            let p = y[0][0].prec().min(256);
            let (a, b, c) = (y[0][0].with_prec(p), y[0][1].with_prec(p), y[1][1].with_prec(p));
            let half_tr = (&a + &c).mul_rational(&Rational::from((1, 2)));
            let half_diff = (&a - &c).mul_rational(&Rational::from((1, 2)));
            let disc = (half_diff.square() + b.square()).sqrt();
            let lmax = &half_tr + &disc;
            let det = &(&a * &c) - &b.square();
            (&det / &lmax).to_f64() * safety
        }
        _ => {
            let yf = imag_f64(z);
            let gersh = (0..g)
                .map(|i| yf[i][i] - (0..g).filter(|&j| j != i).map(|j| yf[i][j].abs()).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            if gersh > 0.0 {
                gersh
            } else {
                let m = DMatrix::from_fn(g, g, |i, j| yf[i][j]);
                SymmetricEigen::new(m).eigenvalues.min() * safety
            }
        }
    };
    if bound > 0.0 && bound.is_finite() {
        Ok(bound)
    } else {
        Err(Error::NotInSiegelSpace("no positive lower bound on the eigenvalues of Im Z".into()))
    }
}

/// `log2` of `Σ_{k>B} 2g (2k+1)^{g-1} exp(-π λ (k - 1/2)^2)`.
fn shell_tail_log2(g: usize, lambda: f64, radius: u32) -> f64 {
    let term = |k: f64| {
        (2.0 * g as f64).log2() + (g as f64 - 1.0) * (2.0 * k + 1.0).log2()
            - std::f64::consts::PI * lambda * (k - 0.5).powi(2) / std::f64::consts::LN_2
    };
    let mut k = f64::from(radius) + 1.0;
    let mut acc = f64::NEG_INFINITY;
    loop {
        let t = term(k);
        let next = term(k + 1.0);
        acc = log2_add(acc, t);
        // Terms are eventually ratio-decreasing; once the ratio is below 1/2
        // the remainder is at most the next term.
        if next - t < -1.0 && next < acc - 64.0 {
            return log2_add(acc, next);
        }
        k += 1.0;
    }
}

fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Chooses the smallest box whose tail is below `2^{-target_prec}`.
pub fn plan_truncation(z: &SiegelPoint, v: &ThetaChar, target_prec: u32) -> Result<TruncationPlan> {
    let g = z.g();
    if v.g() != g {
        return Err(Error::Dimension(format!("characteristic genus {} vs point genus {g}", v.g())));
    }
    let lambda = lambda_min_bound(z)?;
    let center: Vec<i64> = v
        .r()
        .iter()
        .map(|x| {
            let (_, nearest) = x.clone().fract_round(Integer::new());
            -nearest.to_i64().expect("small characteristic")
        })
        .collect();
    let target = -f64::from(target_prec);
    let mut radius = 1u32;
    while shell_tail_log2(g, lambda, radius) >= target {
        radius += if radius < 64 { 1 } else { radius / 8 };
        if radius > 1 << 20 {
            return Err(Error::NotInSiegelSpace("imaginary part too small to truncate".into()));
        }
    }
    Ok(TruncationPlan { radius, center, lambda_min: lambda, tail_log2: shell_tail_log2(g, lambda, radius) })
}

/// `θ([r; s], Z)` with absolute error below `2^{-prec}` (plus rounding).
pub fn theta_eval(v: &ThetaChar, z: &SiegelPoint, prec: u32) -> Result<BigComplex> {
    theta_eval_planned(v, z, prec).map(|(val, _)| val)
}

/// As [`theta_eval`], also returning the truncation plan used.
pub fn theta_eval_planned(v: &ThetaChar, z: &SiegelPoint, prec: u32) -> Result<(BigComplex, TruncationPlan)> {
    let g = z.g();
    let plan = plan_truncation(z, v, prec + 4)?;
    let count = plan.box_size();
    let guard = 24 + 64 - (count.leading_zeros());
    let wp = prec + guard;
    let pi = BigReal::pi(wp);
    // πi Z, entrywise.
    let pz: Vec<Vec<BigComplex>> = (0..g)
        .map(|i| (0..g).map(|j| z.entry(i, j).with_prec(wp).scale(&pi).mul_i()).collect())
        .collect();
    let y = imag_f64(z);
    // Terms below this (log2) are dropped; together they stay under 2^{-prec-6}.
    let skip = -f64::from(prec) - 6.0 - (count as f64).log2();
    let r = v.r();
    let s = v.s();
    let mut acc = BigComplex::zero(wp);
    let mut idx = vec![-(plan.radius as i64); g];
    loop {
        let m: Vec<Rational> = (0..g).map(|i| Rational::from(&r[i] + (plan.center[i] + idx[i]))).collect();
        let mf: Vec<f64> = m.iter().map(Rational::to_f64).collect();
        let quad: f64 = (0..g).map(|i| (0..g).map(|j| mf[i] * y[i][j] * mf[j]).sum::<f64>()).sum();
        let mag_log2 = -std::f64::consts::PI * quad / std::f64::consts::LN_2;
        if mag_log2 > skip - 8.0 {
            let mut w = BigComplex::zero(wp);
            for i in 0..g {
                for j in 0..g {
                    let c = Rational::from(&m[i] * &m[j]);
                    w = &w + &pz[i][j].scale_rational(&c);
                }
            }
            let ms = m.iter().zip(s).fold(Rational::new(), |a, (x, y)| a + Rational::from(x * y));
            let term = &cplx_exp(&w) * &e_of_rational(&ms, wp);
            acc = &acc + &term;
        }
        // Lexicographic advance over the box.
        let mut k = g;
        loop {
            if k == 0 {
                return Ok((acc.with_prec(prec), plan));
            }
            k -= 1;
            if idx[k] < plan.radius as i64 {
                idx[k] += 1;
                break;
            }
            idx[k] = -(plan.radius as i64);
        }
    }
}

/// Relative-accuracy wrapper: raises the absolute target until the value
/// carries `prec` significant bits.
fn theta_relative(v: &ThetaChar, z: &SiegelPoint, prec: u32) -> Result<BigComplex> {
    let first = theta_eval(v, z, prec)?;
    let mag = first.log2_abs();
    if mag >= -8.0 {
        return Ok(first);
    }
    let extra = if mag.is_finite() { (-mag).ceil() as u32 + 8 } else { prec };
    let z_hi = z.with_prec(z.prec().max(prec + extra));
    theta_eval(v, &z_hi, prec + extra).map(|x| x.with_prec(prec))
}

/// Internal precision of [`big_theta`]: `prec + 64 + 4⌈log2(total power count)⌉`.
/// Callers should supply `Z` accurate to at least this many bits.
pub fn big_theta_working_prec(g: usize, level: i64, prec: u32) -> u32 {
    let two_g = 1i64 << g;
    let minus = (two_g / 2) * (two_g - 1);
    let plus = (two_g / 2) * (two_g + 1);
    let powers = minus * 4 * level * (two_g + 1) + plus * 4 * level * (two_g - 1);
    prec + 64 + 4 * (powers as f64).log2().ceil() as u32
}

/// `Θ([r; s], Z)` for a characteristic with denominator dividing `level`.
pub fn big_theta(v: &ThetaChar, level: i64, z: &SiegelPoint, prec: u32) -> Result<BigComplex> {
    if level < 2 {
        return Err(Error::InvalidLevel(level));
    }
    if !Integer::from(level).is_divisible(&v.denominator()) {
        return Err(Error::DenominatorMismatch(level));
    }
    let g = z.g();
    if v.g() != g {
        return Err(Error::Dimension(format!("characteristic genus {} vs point genus {g}", v.g())));
    }
    let sets = build_char_sets(g);
    let two_g = 1i64 << g;
    let n = level;
    let e_num = 4 * n * (two_g + 1);
    let e_den = 4 * n * (two_g - 1);
    let wp = big_theta_working_prec(g, level, prec);

    let shifted: Vec<ThetaChar> = sets.s_minus.iter().map(|a| a.minus(v)).collect();
    for c in &shifted {
        if c.is_half_integral() && classify_char(c)? == Parity::Odd {
            return Ok(BigComplex::zero(prec));
        }
    }
    let zw = z.with_prec(z.prec().max(wp));
    let nums: Vec<BigComplex> =
        shifted.par_iter().map(|c| theta_relative(c, &zw, wp)).collect::<Result<_>>()?;
    let dens: Vec<BigComplex> =
        sets.s_plus.par_iter().map(|c| theta_relative(c, &zw, wp)).collect::<Result<_>>()?;
    let pole = -f64::from(prec) / 2.0;
    if let Some(k) = dens.iter().position(|t| t.log2_abs() < pole) {
        return Err(Error::PoleOfTheta(format!("theta{} vanishes numerically", sets.s_plus[k])));
    }

    let mut num = BigComplex::one(wp);
    for t in &nums {
        num = &num * &t.pow_u64(e_num as u64);
    }
    let mut den = BigComplex::one(wp);
    for t in &dens {
        den = &den * &t.pow_u64(e_den as u64);
    }
    let coeff = Rational::from(-two_g * n * (two_g - 1) * (two_g + 1)) * v.rs_dot();
    let pre = e_of_rational(&coeff, wp).scale(&BigReal::exp2i((4 * n) as i32, wp));
    Ok((&(&pre * &num) / &den).with_prec(prec))
}

/// `B_2(x) = x^2 - x + 1/6`.
pub fn bernoulli2(x: &Rational) -> Rational {
    Rational::from(x * x) - x + Rational::from((1, 6))
}

/// Genus-1 Siegel function `g_{[r; s]}(τ)` as a `q`-product.
pub fn siegel_function(v: &ThetaChar, tau: &BigComplex, prec: u32) -> Result<BigComplex> {
    if v.g() != 1 {
        return Err(Error::Dimension("the Siegel function takes a genus-1 characteristic".into()));
    }
    if !tau.im().is_positive() {
        return Err(Error::NotUpperHalfPlane);
    }
    if v.is_integral() {
        return Err(Error::IntegralCharacteristic);
    }
    let wp = prec + 32;
    let tau = tau.with_prec(wp);
    let r = &v.r()[0];
    let s = &v.s()[0];
    let two_pi_i = BigComplex::from_real(BigReal::pi(wp).mul_i64(2)).mul_i();
    // q^x e(y) = exp(2πi (x τ + y)).
    let qe = |x: &Rational, y: &Rational| -> BigComplex {
        let (fy, _) = y.clone().fract_floor(Integer::new());
        let arg = &tau.scale_rational(x) + &BigComplex::from_real(BigReal::from_rational(&fy, wp));
        cplx_exp(&(&two_pi_i * &arg))
    };
    let one = BigComplex::one(wp);
    let half_b2 = bernoulli2(r) / 2u32;
    let lead_phase = (s * Rational::from(r - 1u32)) / 2u32;
    let mut acc = -&(&qe(&half_b2, &Rational::new()) * &e_of_rational(&lead_phase, wp));
    acc = &acc * &(&one - &qe(r, s));
    let q_log2 = -2.0 * std::f64::consts::PI * tau.im().to_f64() / std::f64::consts::LN_2;
    let r_abs = r.to_f64().abs().ceil();
    let neg_s = Rational::from(-s);
    let mut n = 1i64;
    loop {
        let a = Rational::from(r + n);
        let b = Rational::from(n - r);
        acc = &acc * &(&(&one - &qe(&a, s)) * &(&one - &qe(&b, &neg_s)));
        if q_log2 * (n as f64 - 1.0 - r_abs) < -f64::from(prec) - 16.0 {
            break;
        }
        n += 1;
    }
    Ok(acc.with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::CMatrix;
    use crate::symplectic::{act_on_h, random_symplectic, transpose_act};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    fn random_point<R: Rng>(g: usize, prec: u32, rng: &mut R) -> SiegelPoint {
        loop {
            let mut rows = vec![vec![BigComplex::zero(prec); g]; g];
            for i in 0..g {
                for j in i..g {
                    let re = rng.gen_range(-0.5..0.5);
                    let im = if i == j { rng.gen_range(0.8..1.5) } else { rng.gen_range(-0.3..0.3) };
                    rows[i][j] = BigComplex::from_f64(re, im, prec);
                    rows[j][i] = rows[i][j].clone();
                }
            }
            if let Ok(p) = SiegelPoint::new(CMatrix::from_rows(rows)) {
                return p;
            }
        }
    }

    fn random_char<R: Rng>(g: usize, n: i64, rng: &mut R) -> ThetaChar {
        let k: Vec<i64> = (0..2 * g).map(|_| rng.gen_range(0..n)).collect();
        ThetaChar::from_numerators(&k, n).unwrap()
    }

    #[test]
    fn parity_classification() {
        let odd = ThetaChar::new(vec![q(1, 2)], vec![q(1, 2)]).unwrap();
        assert_eq!(classify_char(&odd), Ok(Parity::Odd));
        let even = ThetaChar::new(vec![q(0, 1)], vec![q(0, 1)]).unwrap();
        assert_eq!(classify_char(&even), Ok(Parity::Even));
        let third = ThetaChar::new(vec![q(1, 3)], vec![q(0, 1)]).unwrap();
        assert_eq!(classify_char(&third), Err(Error::NotHalfIntegral));
    }

    #[test]
    fn char_set_sizes() {
        let s1 = build_char_sets(1);
        assert_eq!(s1.s_minus, vec![ThetaChar::new(vec![q(1, 2)], vec![q(1, 2)]).unwrap()]);
        assert_eq!(s1.s_plus.len(), 3);
        for (g, minus, plus) in [(2, 6, 10), (3, 28, 36)] {
            let s = build_char_sets(g);
            assert_eq!((s.s_minus.len(), s.s_plus.len()), (minus, plus));
        }
    }

    #[test]
    fn reduction_and_display() {
        let v = ThetaChar::from_numerators(&[6, -3, 0, 13], 5).unwrap();
        let red = v.reduced();
        assert_eq!(red, ThetaChar::from_numerators(&[1, 2, 0, 3], 5).unwrap());
        assert_eq!(red.to_string(), "[1/5, 2/5; 0, 3/5]");
        assert_eq!(red.denominator(), 5);
        assert_eq!(red.to_string().parse::<ThetaChar>().unwrap(), red);
        assert_eq!("1/5,2/5,0,3/5".parse::<ThetaChar>().unwrap(), red);
        assert!("1/5,x".parse::<ThetaChar>().is_err());
    }

    #[test]
    fn plan_for_identity_point() {
        for g in 1..=3 {
            let z = SiegelPoint::i_times_identity(g, 128);
            let zero = ThetaChar::from_numerators(&vec![0; 2 * g], 1).unwrap();
            let plan = plan_truncation(&z, &zero, 64).unwrap();
            assert!(plan.radius <= 10, "radius {}", plan.radius);
            assert!(plan.tail_log2 < -64.0);
        }
    }

    #[test]
    fn plan_shrinks_with_larger_imaginary_part() {
        let p = 128;
        let base = SiegelPoint::i_times_identity(2, p);
        let four = SiegelPoint::new(base.matrix().add(&base.matrix().add(&base.matrix().add(base.matrix())))).unwrap();
        let v = ThetaChar::from_numerators(&[1, 2, 0, 3], 5).unwrap();
        for target in [64, 256, 1024] {
            let b1 = plan_truncation(&base, &v, target).unwrap().radius;
            let b4 = plan_truncation(&four, &v, target).unwrap().radius;
            assert!(b4 <= b1.div_ceil(2) + 1, "{b4} vs {b1}");
        }
        let odd = ThetaChar::new(vec![q(1, 2), q(0, 1)], vec![q(1, 2), q(0, 1)]).unwrap();
        assert!(plan_truncation(&base, &odd, 64).unwrap().radius < 100);
    }

    #[test]
    fn theta_null_at_i_factorizes() {
        let prec = 200;
        // Independent 1-D sum at doubled precision.
        let wp = 2 * prec;
        let mut one_d = BigReal::zero(wp);
        for n in -40i64..=40 {
            one_d = &one_d + &(-&BigReal::pi(wp).mul_i64(n * n)).exp();
        }
        for g in 1..=3usize {
            let z = SiegelPoint::i_times_identity(g, prec);
            let zero = ThetaChar::from_numerators(&vec![0; 2 * g], 1).unwrap();
            let val = theta_eval(&zero, &z, prec).unwrap();
            let mut want = BigReal::one(wp);
            for _ in 0..g {
                want = &want * &one_d;
            }
            let want = BigComplex::from_real(want);
            assert!((&val - &want).log2_abs() < -(prec as f64) + 8.0);
        }
    }

    #[test]
    fn odd_thetas_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in 1..=2 {
            let z = random_point(g, 192, &mut rng);
            for a in build_char_sets(g).s_minus {
                let (val, plan) = theta_eval_planned(&a, &z, 160).unwrap();
                assert!(val.log2_abs() < (plan.tail_log2 + 1.0).max(-150.0), "{a}: {}", val.log2_abs());
            }
        }
    }

    #[test]
    fn parity_of_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..6 {
            let g = rng.gen_range(1..=2);
            let z = random_point(g, 192, &mut rng);
            let v = random_char(g, 7, &mut rng);
            let a = theta_eval(&v, &z, 160).unwrap();
            let b = theta_eval(&v.negated(), &z, 160).unwrap();
            assert!((&a - &b).log2_abs() < -150.0);
        }
    }

    #[test]
    fn big_theta_level_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = random_point(2, 128, &mut rng);
        let v = random_char(2, 3, &mut rng);
        let a = big_theta(&v, 3, &z, 96).unwrap();
        let b = big_theta(&v.shifted(&[1, -2, 0, 3]), 3, &z, 96).unwrap();
        assert!(crate::bigcomplex::log2_rel_diff(&a, &b) < -64.0);
    }

    #[test]
    fn big_theta_modular_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = random_point(2, 160, &mut rng);
        for _ in 0..2 {
            let gamma = random_symplectic(2, 4, &mut rng);
            let Ok(gz) = act_on_h(&gamma, &z) else { continue };
            let v = random_char(2, 2 + rng.gen_range(1..3), &mut rng);
            let n = v.denominator().to_i64().unwrap().max(2);
            let lhs = big_theta(&v, n, &gz, 96);
            let rhs = big_theta(&transpose_act(&gamma, &v), n, &z, 96);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => assert!(crate::bigcomplex::log2_rel_diff(&a, &b) < -48.0),
                (Err(Error::PoleOfTheta(_)), _) | (_, Err(Error::PoleOfTheta(_))) => {}
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn genus_one_matches_siegel_function() {
        let prec = 128;
        let tau = BigComplex::from_f64(0.21, 0.93, prec);
        let z = SiegelPoint::from_tau(tau.clone()).unwrap();
        for (k, n) in [(vec![1, 2], 5), (vec![2, 3], 6), (vec![-1, 4], 3), (vec![0, 1], 4)] {
            let v = ThetaChar::from_numerators(&k, n).unwrap();
            let big = big_theta(&v, n, &z, prec).unwrap();
            let g = siegel_function(&v, &tau, prec + 64).unwrap().pow_u64(12 * n as u64);
            assert!(crate::bigcomplex::log2_rel_diff(&big, &g) < -100.0, "{v}");
        }
    }

    #[test]
    fn siegel_function_basics() {
        assert_eq!(bernoulli2(&Rational::new()), q(1, 6));
        let tau = BigComplex::from_f64(0.0, 1.0, 128);
        let v = ThetaChar::from_numerators(&[1, 3], 5).unwrap();
        let a = siegel_function(&v, &tau, 128).unwrap();
        assert!(a.log2_abs() > -50.0);
        let b = siegel_function(&v.shifted(&[1, 0]), &tau, 128).unwrap();
        let rel = crate::bigcomplex::log2_rel_diff(&a.pow_u64(60), &b.pow_u64(60));
        assert!(rel < -100.0);
        let low = BigComplex::from_f64(0.0, -1.0, 64);
        assert_eq!(siegel_function(&v, &low, 64), Err(Error::NotUpperHalfPlane));
        let int = ThetaChar::from_numerators(&[5, 0], 5).unwrap();
        assert_eq!(siegel_function(&int, &tau, 64), Err(Error::IntegralCharacteristic));
    }

    #[test]
    fn exactly_odd_shift_gives_zero() {
        // v half-integral: some a - v is odd, so the numerator vanishes.
        let z = SiegelPoint::i_times_identity(1, 128);
        let v = ThetaChar::from_numerators(&[0, 0], 2).unwrap();
        assert!(big_theta(&v, 2, &z, 64).unwrap().is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn parity_holds_for_random_characteristics(
            k in proptest::collection::vec(-10i64..10, 2),
            n in 2i64..9,
            x in -0.5f64..0.5,
            y in 0.6f64..2.0,
        ) {
            let z = SiegelPoint::from_tau(BigComplex::from_f64(x, y, 128)).unwrap();
            let v = ThetaChar::from_numerators(&k, n).unwrap();
            let a = theta_eval(&v, &z, 110).unwrap();
            let b = theta_eval(&v.negated(), &z, 110).unwrap();
            prop_assert!((&a - &b).log2_abs() < -100.0);
        }
    }
}
