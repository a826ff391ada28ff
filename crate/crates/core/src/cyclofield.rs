//! Exact arithmetic in the cyclotomic field `K = Q(ζ_ℓ)` for an odd prime `ℓ`.
//!
//! Elements are stored in the basis `ζ, ζ^2, …, ζ^(ℓ-1)`. The relation
//! `1 + ζ + … + ζ^(ℓ-1) = 0` removes the constant term, so the coordinate
//! vector is canonical and also a Z-basis of the ring of integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::bigcomplex::{e_of_rational, BigComplex};
use crate::error::{Error, Result};
use crate::qmat::QMatrix;

pub fn is_odd_prime(n: u32) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse of `i` modulo `m`, if it exists.
pub fn inv_mod(i: i64, m: i64) -> Option<i64> {
    let (mut a, mut b) = (i.rem_euclid(m), m);
    let (mut x0, mut x1) = (1i64, 0i64);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (x0, x1) = (x1, x0 - q * x1);
    }
    (a == 1).then(|| x0.rem_euclid(m))
}

/// An element of `Q(ζ_ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloElem {
    ell: u32,
    coords: Vec<Rational>,
}

impl CycloElem {
    pub fn zero(ell: u32) -> Self {
        CycloElem { ell, coords: vec![Rational::new(); ell as usize - 1] }
    }

    pub fn one(ell: u32) -> Self {
        CycloElem::from_rational(ell, &Rational::from(1))
    }

    pub fn from_rational(ell: u32, q: &Rational) -> Self {
        // q = -q (ζ + … + ζ^(ℓ-1))
        CycloElem { ell, coords: vec![Rational::from(-q); ell as usize - 1] }
    }

    pub fn from_i64(ell: u32, n: i64) -> Self {
        CycloElem::from_rational(ell, &Rational::from(n))
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(ell: u32, k: i64) -> Self {
        CycloElem::from_terms(ell, &[(k, Rational::from(1))])
    }

    /// Builds `Σ c ζ^k` from `(k, c)` pairs with arbitrary exponents.
    pub fn from_terms(ell: u32, terms: &[(i64, Rational)]) -> Self {
        let mut full = vec![Rational::new(); ell as usize];
        for (k, c) in terms {
            full[k.rem_euclid(ell as i64) as usize] += c;
        }
        CycloElem::from_full(ell, full)
    }

    /// Canonicalises coefficients of `ζ^0, …, ζ^(ℓ-1)`.
    fn from_full(ell: u32, full: Vec<Rational>) -> Self {
        debug_assert_eq!(full.len(), ell as usize);
        let c0 = full[0].clone();
        let coords = full[1..].iter().map(|c| Rational::from(c - &c0)).collect();
        CycloElem { ell, coords }
    }

    /// Coordinates in the basis `ζ^1, …, ζ^(ℓ-1)`.
    pub fn from_coords(ell: u32, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != ell as usize - 1 {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                ell - 1,
                coords.len()
            )));
        }
        Ok(CycloElem { ell, coords })
    }

    pub fn from_int_coords(ell: u32, coords: &[i64]) -> Result<Self> {
        CycloElem::from_coords(ell, coords.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn degree(&self) -> usize {
        self.ell as usize - 1
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    /// True iff the element lies in `Z[ζ_ℓ]`.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| *c.denom() == 1)
    }

    /// Integer coordinates, if integral.
    pub fn int_coords(&self) -> Option<Vec<Integer>> {
        self.is_integral().then(|| self.coords.iter().map(|c| c.numer().clone()).collect())
    }

    /// Largest absolute coordinate.
    pub fn height(&self) -> Rational {
        self.coords.iter().map(|c| Rational::from(c.abs_ref())).max().unwrap_or_default()
    }

    /// The rational value if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<Rational> {
        let first = &self.coords[0];
        self.coords.iter().all(|c| c == first).then(|| Rational::from(-first))
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(self.ell, other.ell, "elements of different cyclotomic fields");
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycloElem { ell: self.ell, coords: self.coords.iter().map(|c| Rational::from(c * q)).collect() }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = CycloElem::one(self.ell);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Matrix of multiplication by `self` in the coordinate basis: column `j`
    /// holds the coordinates of `self · ζ^(j+1)`.
    pub fn mult_matrix(&self) -> QMatrix {
        let n = self.degree();
        let mut m = QMatrix::zeros(n, n);
        for j in 0..n {
            let prod = self * &CycloElem::zeta_pow(self.ell, j as i64 + 1);
            for (i, c) in prod.coords.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        m
    }

    /// Multiplicative inverse via the multiplication matrix.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.ell));
        }
        let one = CycloElem::one(self.ell);
        let x = self.mult_matrix().solve(&one.coords).ok_or(Error::DivisionByZero(self.ell))?;
        Ok(CycloElem { ell: self.ell, coords: x })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// `a^{φ_i}` where `φ_i(ζ) = ζ^i`.
    pub fn galois_apply(&self, i: i64) -> Result<Self> {
        let ell = self.ell as i64;
        if i.rem_euclid(ell) == 0 {
            return Err(Error::GaloisExponent(i, self.ell));
        }
        let mut coords = vec![Rational::new(); self.degree()];
        for (k, c) in self.coords.iter().enumerate() {
            let t = ((k as i64 + 1) * i).rem_euclid(ell) as usize;
            coords[t - 1] = c.clone();
        }
        Ok(CycloElem { ell: self.ell, coords })
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conjugate(&self) -> Self {
        let mut coords = self.coords.clone();
        coords.reverse();
        CycloElem { ell: self.ell, coords }
    }

    /// All `ℓ - 1` Galois conjugates, indexed by `i = 1..ℓ-1`.
    pub fn conjugates(&self) -> Vec<Self> {
        (1..self.ell as i64).map(|i| self.galois_apply(i).expect("unit exponent")).collect()
    }

    /// `Tr_{K/Q}`; every `ζ^k` with `ℓ ∤ k` has trace `-1`.
    pub fn trace(&self) -> Rational {
        let s: Rational = self.coords.iter().sum();
        -s
    }

    /// `N_{K/Q}` as the product of all conjugates.
    pub fn norm(&self) -> Rational {
        let prod = self.conjugates().iter().fold(CycloElem::one(self.ell), |acc, c| &acc * c);
        prod.to_rational().expect("norm lies in Q")
    }

    /// Numerical value of `a^{φ_i}` with `ζ = exp(2πi/ℓ)`.
    pub fn embed(&self, i: i64, prec: u32) -> Result<BigComplex> {
        let ell = self.ell as i64;
        if i.rem_euclid(ell) == 0 {
            return Err(Error::GaloisExponent(i, self.ell));
        }
        let work = prec + 16;
        let mut acc = BigComplex::zero(work);
        for (k, c) in self.coords.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let e = ((k as i64 + 1) * i).rem_euclid(ell);
            let z = e_of_rational(&Rational::from((e, ell)), work);
            acc = &acc + &z.scale_rational(c);
        }
        Ok(acc.with_prec(prec))
    }

    /// The coefficients of `Σ_{k=0}^{ℓ-1} d_k ζ^k` with the most zeros, used for
    /// printing.
    fn display_terms(&self) -> Vec<(usize, Rational)> {
        let zero = Rational::new();
        let mut candidates: Vec<&Rational> = vec![&zero];
        candidates.extend(self.coords.iter());
        let mut best = &zero;
        let mut best_count = 0;
        for cand in &candidates {
            let count = candidates.iter().filter(|c| **c == *cand).count();
            if count > best_count {
                best = cand;
                best_count = count;
            }
        }
        let shift = best.clone();
        let mut terms = Vec::new();
        if shift != 0 {
            terms.push((0, Rational::from(-&shift)));
        }
        for (k, c) in self.coords.iter().enumerate() {
            let d = Rational::from(c - &shift);
            if d != 0 {
                terms.push((k + 1, d));
            }
        }
        terms
    }

    /// Parses strings such as `2 + z^1 - 3/2*z^4`, where `z` stands for `ζ_ℓ`.
    pub fn parse(ell: u32, s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut terms = Vec::new();
        let bytes: Vec<char> = compact.chars().collect();
        let mut start = 0;
        for idx in 1..=bytes.len() {
            let boundary = idx == bytes.len()
                || ((bytes[idx] == '+' || bytes[idx] == '-') && bytes[idx - 1] != '^');
            if boundary {
                let tok: String = bytes[start..idx].iter().collect();
                terms.push(parse_term(&tok)?);
                start = idx;
            }
        }
        Ok(CycloElem::from_terms(ell, &terms))
    }
}

fn parse_term(tok: &str) -> Result<(i64, Rational)> {
    let bad = || Error::Parse(format!("bad term '{tok}'"));
    let (sign, body) = match tok.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, tok.strip_prefix('+').unwrap_or(tok)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef, exp) = match body.find('z') {
        None => (body, None),
        Some(pos) => {
            let before = body[..pos].trim_end_matches('*');
            let after = &body[pos + 1..];
            let exp = if after.is_empty() {
                1
            } else {
                after.strip_prefix('^').ok_or_else(bad)?.parse::<i64>().map_err(|_| bad())?
            };
            (before, Some(exp))
        }
    };
    let c = if coef.is_empty() {
        Rational::from(1)
    } else {
        Rational::from_str(coef).map_err(|_| bad())?
    };
    Ok((exp.unwrap_or(0), c * sign))
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.display_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (k, c)) in terms.iter().enumerate() {
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            match (*k, mag == 1) {
                (0, _) => write!(f, "{mag}")?,
                (k, true) => write!(f, "z^{k}")?,
                (k, false) => write!(f, "{mag}*z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add<&CycloElem> for &CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: &CycloElem) -> CycloElem {
        self.check_same_field(rhs);
        CycloElem {
            ell: self.ell,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| Rational::from(a + b)).collect(),
        }
    }
}

impl Sub<&CycloElem> for &CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: &CycloElem) -> CycloElem {
        self.check_same_field(rhs);
        CycloElem {
            ell: self.ell,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| Rational::from(a - b)).collect(),
        }
    }
}

impl Mul<&CycloElem> for &CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: &CycloElem) -> CycloElem {
        self.check_same_field(rhs);
        let ell = self.ell as usize;
        let mut full = vec![Rational::new(); ell];
        for (i, a) in self.coords.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if *b == 0 {
                    continue;
                }
                full[(i + j + 2) % ell] += Rational::from(a * b);
            }
        }
        CycloElem::from_full(self.ell, full)
    }
}

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem { ell: self.ell, coords: self.coords.iter().map(|c| Rational::from(-c)).collect() }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<CycloElem> for CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: CycloElem) -> CycloElem {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// A principal integral ideal `λ O_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloIdeal {
    generator: CycloElem,
}

impl CycloIdeal {
    pub fn new(generator: CycloElem) -> Result<Self> {
        if generator.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Ok(CycloIdeal { generator })
    }

    pub fn generator(&self) -> &CycloElem {
        &self.generator
    }

    /// Absolute norm `|O_K / λ O_K|` (for integral generators).
    pub fn norm(&self) -> Rational {
        self.generator.norm().abs()
    }
}

/// Exact coordinates of an element in a given Q-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCoords {
    pub coeffs: Vec<Rational>,
    pub integral: bool,
}

impl BasisCoords {
    pub fn int_coeffs(&self) -> Option<Vec<Integer>> {
        self.integral.then(|| self.coeffs.iter().map(|c| c.numer().clone()).collect())
    }
}

/// Matrix whose column `j` holds the coordinates of `basis[j]`.
pub fn basis_matrix(basis: &[CycloElem]) -> QMatrix {
    let n = basis.first().map_or(0, CycloElem::degree);
    let mut m = QMatrix::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (i, c) in b.coords().iter().enumerate() {
            m[(i, j)] = c.clone();
        }
    }
    m
}

/// Solves `target = Σ r_j basis_j` exactly.
pub fn solve_in_basis(target: &CycloElem, basis: &[CycloElem]) -> Result<BasisCoords> {
    if basis.len() != target.degree() {
        return Err(Error::Dimension(format!(
            "basis has {} elements, field degree is {}",
            basis.len(),
            target.degree()
        )));
    }
    if let Some(b) = basis.iter().find(|b| b.ell() != target.ell()) {
        return Err(Error::FieldMismatch(target.ell(), b.ell()));
    }
    let m = basis_matrix(basis);
    if m.det() == 0 {
        return Err(Error::BasisNotIndependent);
    }
    let coeffs = m.solve(target.coords()).ok_or(Error::BasisNotIndependent)?;
    let integral = coeffs.iter().all(|c| *c.denom() == 1);
    Ok(BasisCoords { coeffs, integral })
}

/// `Σ r_j basis_j`.
pub fn combine(coeffs: &[Rational], basis: &[CycloElem]) -> CycloElem {
    let ell = basis[0].ell();
    coeffs
        .iter()
        .zip(basis)
        .fold(CycloElem::zero(ell), |acc, (c, b)| &acc + &b.scale(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(k: i64) -> CycloElem {
        CycloElem::zeta_pow(5, k)
    }

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn galois_on_monomials() {
        assert_eq!(z(1).galois_apply(2).unwrap(), z(2));
        let a = &CycloElem::from_i64(5, 2) + &z(1);
        assert_eq!(a.galois_apply(3).unwrap(), &CycloElem::from_i64(5, 2) + &z(3));
        assert!(matches!(a.galois_apply(10), Err(Error::GaloisExponent(10, 5))));
    }

    #[test]
    fn traces() {
        assert_eq!(CycloElem::one(5).trace(), q(4));
        assert_eq!(z(1).trace(), q(-1));
        assert_eq!((&z(1) + &z(4)).trace(), q(-2));
    }

    #[test]
    fn norms_match_conjugate_product() {
        let a = &CycloElem::from_i64(5, 2) + &z(1);
        // Independent check: Φ_5(-2) = 16 - 8 + 4 - 2 + 1.
        assert_eq!(a.norm(), q(11));
        assert_eq!(CycloElem::one(5).norm(), q(1));
        assert_eq!((&CycloElem::one(5) + &z(1)).norm(), q(1));
    }

    #[test]
    fn conjugation() {
        assert_eq!(z(1).conjugate(), z(4));
        let xi = (&z(1) - &z(-1)).scale(&Rational::from((1, 5)));
        assert_eq!(xi.conjugate(), -&xi);
        assert_eq!(xi.conjugate(), xi.galois_apply(4).unwrap());
    }

    #[test]
    fn embedding_values() {
        let p = 128;
        let one = CycloElem::one(5).embed(2, p).unwrap();
        assert!((&one - &BigComplex::one(p)).log2_abs() < -120.0);
        let e = z(1).embed(1, p).unwrap();
        let want = e_of_rational(&Rational::from((1, 5)), p);
        assert!((&e - &want).log2_abs() < -120.0);
    }

    #[test]
    fn inverse_and_division() {
        let a = &CycloElem::from_i64(5, 2) + &z(1);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, CycloElem::one(5));
        assert!(CycloElem::zero(5).inverse().is_err());
    }

    #[test]
    fn parse_and_print() {
        let a = CycloElem::parse(5, "2 + z^1 - 3/2*z^4").unwrap();
        let b = CycloElem::from_terms(5, &[(0, q(2)), (1, q(1)), (4, Rational::from((-3, 2)))]);
        assert_eq!(a, b);
        assert_eq!(CycloElem::parse(5, &a.to_string()).unwrap(), a);
        assert_eq!((&CycloElem::from_i64(5, 2) + &z(1)).to_string(), "2 + z^1");
        assert_eq!(CycloElem::parse(5, "z^-1").unwrap(), z(4));
        assert_eq!(CycloElem::zero(5).to_string(), "0");
        assert!(CycloElem::parse(5, "2 + y").is_err());
    }

    #[test]
    fn solve_in_x_basis() {
        let basis = vec![z(2), z(4), z(1), &z(1) + &z(3)];
        let sol = solve_in_basis(&z(4), &basis).unwrap();
        assert_eq!(sol.coeffs, vec![q(0), q(1), q(0), q(0)]);
        assert!(sol.integral);
        let lam = &CycloElem::from_i64(5, 2) + &z(1);
        let phi = &lam * &lam.galois_apply(3).unwrap();
        let sol = solve_in_basis(&phi, &basis).unwrap();
        let reduced: Vec<i64> =
            sol.int_coeffs().unwrap().iter().map(|c| Integer::from(c.mod_u(5)).to_i64().unwrap()).collect();
        assert_eq!(reduced, vec![1, 2, 0, 3]);
        let dependent = vec![z(1), z(2), &z(1) + &z(2), z(3)];
        assert_eq!(solve_in_basis(&z(1), &dependent), Err(Error::BasisNotIndependent));
    }

    #[test]
    fn ideal_rejects_zero() {
        assert_eq!(CycloIdeal::new(CycloElem::zero(5)), Err(Error::ZeroIdeal));
    }

    fn arb_elem(ell: u32) -> impl Strategy<Value = CycloElem> {
        proptest::collection::vec(-6i64..=6, ell as usize - 1)
            .prop_map(move |c| CycloElem::from_int_coords(ell, &c).unwrap())
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_elem(7), b in arb_elem(7), c in arb_elem(7)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn galois_is_a_ring_action(a in arb_elem(7), b in arb_elem(7), i in 1i64..7, j in 1i64..7) {
            let lhs = a.galois_apply(i).unwrap().galois_apply(j).unwrap();
            prop_assert_eq!(lhs, a.galois_apply(i * j % 7).unwrap());
            prop_assert_eq!((&a * &b).galois_apply(i).unwrap(), &a.galois_apply(i).unwrap() * &b.galois_apply(i).unwrap());
        }

        #[test]
        fn conjugation_is_involution(a in arb_elem(5)) {
            prop_assert_eq!(a.conjugate().conjugate(), a.clone());
            prop_assert_eq!(a.conjugate(), a.galois_apply(4).unwrap());
        }

        #[test]
        fn imaginary_elements_have_zero_trace(a in arb_elem(7)) {
            let c = &a - &a.conjugate();
            prop_assert_eq!(c.trace(), Rational::new());
        }

        #[test]
        fn trace_and_norm_match_embeddings(a in arb_elem(5)) {
            let p = 256;
            let mut sum = BigComplex::zero(p);
            let mut prod = BigComplex::one(p);
            for i in 1..5 {
                let v = a.embed(i, p).unwrap();
                sum = &sum + &v;
                prod = &prod * &v;
            }
            let tr = BigComplex::from_real(crate::bigcomplex::BigReal::from_rational(&a.trace(), p));
            let nm = BigComplex::from_real(crate::bigcomplex::BigReal::from_rational(&a.norm(), p));
            prop_assert!((&sum - &tr).log2_abs() < -200.0);
            prop_assert!((&prod - &nm).log2_abs() < -200.0 + nm.log2_abs().max(0.0));
        }

        #[test]
        fn conjugation_commutes_with_embedding(a in arb_elem(5), i in 1i64..5) {
            let p = 192;
            let v = a.embed(i, p).unwrap();
            let w = a.conjugate().embed(i, p).unwrap();
            prop_assert!((&w - &v.conj()).log2_abs() < -150.0);
        }

        #[test]
        fn solve_round_trip(a in arb_elem(5)) {
            let basis = vec![z(2), z(4), z(1), &z(1) + &z(3)];
            let sol = solve_in_basis(&a, &basis).unwrap();
            prop_assert!(sol.integral);
            prop_assert_eq!(combine(&sol.coeffs, &basis), a);
        }

        #[test]
        fn inverse_is_exact(a in arb_elem(7)) {
            prop_assume!(!a.is_zero());
            prop_assert_eq!(&a * &a.inverse().unwrap(), CycloElem::one(7));
        }
    }
}
