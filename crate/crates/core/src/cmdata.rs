//! CM-type data for `K = Q(ζ_ℓ)`: the type `{φ_1, …, φ_g}` with
//! `g = (ℓ-1)/2`, its type norm, the embedding `Ψ`, Riemann forms given by the
//! trace pairing, and the scalar `m_c` that makes the polarization principal.

use rug::Rational;

use crate::bigcomplex::BigComplex;
use crate::cyclofield::{inv_mod, is_odd_prime, CycloElem, CycloIdeal};
use crate::error::{Error, Result};
use crate::qmat::QMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmContext {
    ell: u32,
    g: usize,
    xi: CycloElem,
    type_exponents: Vec<i64>,
    reflex_exponents: Vec<i64>,
}

impl CmContext {
    pub fn new(ell: u32) -> Result<Self> {
        if !is_odd_prime(ell) {
            return Err(Error::NotOddPrime(ell));
        }
        let g = (ell as usize - 1) / 2;
        let l = ell as i64;
        let xi = (&CycloElem::zeta_pow(ell, 1) - &CycloElem::zeta_pow(ell, -1))
            .scale(&Rational::from((1, l)));
        let type_exponents: Vec<i64> = (1..=g as i64).collect();
        let reflex_exponents =
            type_exponents.iter().map(|&i| inv_mod(i, l).expect("prime modulus")).collect();
        Ok(CmContext { ell, g, xi, type_exponents, reflex_exponents })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// `ξ = (ζ - ζ^{-1}) / ℓ`.
    pub fn xi(&self) -> &CycloElem {
        &self.xi
    }

    pub fn type_exponents(&self) -> &[i64] {
        &self.type_exponents
    }

    pub fn reflex_exponents(&self) -> &[i64] {
        &self.reflex_exponents
    }

    /// `φ(a) = Π_i a^{φ_i^{-1}}`.
    pub fn type_norm(&self, a: &CycloElem) -> CycloElem {
        self.reflex_exponents.iter().fold(CycloElem::one(self.ell), |acc, &i| {
            &acc * &a.galois_apply(i).expect("reflex exponent is a unit")
        })
    }

    /// `Ψ(a) = (a^{φ_1}, …, a^{φ_g})`.
    pub fn psi_embed(&self, a: &CycloElem, prec: u32) -> Vec<BigComplex> {
        self.type_exponents
            .iter()
            .map(|&i| a.embed(i, prec).expect("type exponent is a unit"))
            .collect()
    }

    /// The symplectic seed basis
    /// `x_j = ζ^{2j}` for `j ≤ g` and `x_j = Σ_{k=1}^{j-g} ζ^{2k-1}` for `j > g`.
    pub fn x_basis(&self) -> Vec<CycloElem> {
        let ell = self.ell;
        let g = self.g as i64;
        let mut basis: Vec<CycloElem> = (1..=g).map(|j| CycloElem::zeta_pow(ell, 2 * j)).collect();
        for j in g + 1..=2 * g {
            let terms: Vec<(i64, Rational)> =
                (1..=j - g).map(|k| (2 * k - 1, Rational::from(1))).collect();
            basis.push(CycloElem::from_terms(ell, &terms));
        }
        basis
    }

    /// Every `ξ^{φ_i}` lies on the positive imaginary axis.
    pub fn xi_is_positive(&self, prec: u32) -> bool {
        let tol = -(prec as f64) + 16.0;
        self.psi_embed(&self.xi, prec)
            .iter()
            .all(|v| v.re().log2_abs() < tol && v.im().is_positive())
    }

    /// `N φ(λ)^{-1} x_j`, a Z-basis of `N · φ(λ O_K)^{-1}`.
    pub fn lattice_basis(&self, level: i64, lambda: &CycloElem) -> Result<Vec<CycloElem>> {
        let scale = self.type_norm(lambda).inverse()?.scale(&Rational::from(level));
        Ok(self.x_basis().iter().map(|x| &scale * x).collect())
    }

    /// The polarization `E_{ξ m_c}` attached to conductor `N O_K` and `c = λ O_K`.
    pub fn polarization(&self, level: i64, ideal: &CycloIdeal) -> RiemannFormSpec {
        RiemannFormSpec::new(self.xi.clone(), compute_mc(level, ideal)).expect("xi is imaginary")
    }
}

/// A Riemann form `E(Ψ(a), Ψ(b)) = Tr(c a b̄)` with `c = xi · scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiemannFormSpec {
    xi: CycloElem,
    scale: Rational,
    c: CycloElem,
}

impl RiemannFormSpec {
    /// Rejects `xi` that is not purely imaginary.
    pub fn new(xi: CycloElem, scale: Rational) -> Result<Self> {
        if xi.conjugate() != -&xi {
            return Err(Error::NotAlternating);
        }
        let c = xi.scale(&scale);
        Ok(RiemannFormSpec { xi, scale, c })
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn xi(&self) -> &CycloElem {
        &self.xi
    }

    /// The purely imaginary element `ξ · m`.
    pub fn c(&self) -> &CycloElem {
        &self.c
    }

    pub fn pairing(&self, a: &CycloElem, b: &CycloElem) -> Rational {
        riemann_pairing(self, a, b)
    }
}

/// `Tr_{K/Q}(c a b̄)`.
pub fn riemann_pairing(spec: &RiemannFormSpec, a: &CycloElem, b: &CycloElem) -> Rational {
    (&(&spec.c * a) * &b.conjugate()).trace()
}

/// `m_c = N_K(c) / N²` for `f = N O_K` (the real subfield is Q, so `d_0 = 2`).
pub fn compute_mc(level: i64, ideal: &CycloIdeal) -> Rational {
    ideal.norm() / Rational::from(level * level)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub matrix: QMatrix,
    /// Equals `[[0, -I], [I, 0]]` exactly.
    pub is_standard: bool,
}

pub fn gram_matrix(spec: &RiemannFormSpec, basis: &[CycloElem]) -> Result<GramMatrix> {
    let n = basis.len();
    if !n.is_multiple_of(2) {
        return Err(Error::Dimension(format!("basis of odd length {n}")));
    }
    let mut m = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let e = riemann_pairing(spec, &basis[i], &basis[j]);
            m[(j, i)] = Rational::from(-&e);
            m[(i, j)] = e;
        }
    }
    let is_standard = m == QMatrix::standard_j(n / 2);
    Ok(GramMatrix { matrix: m, is_standard })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(k: i64) -> CycloElem {
        CycloElem::zeta_pow(5, k)
    }

    fn two_plus_zeta() -> CycloElem {
        &CycloElem::from_i64(5, 2) + &z(1)
    }

    #[test]
    fn context_for_ell_5() {
        let ctx = CmContext::new(5).unwrap();
        assert_eq!(ctx.g(), 2);
        assert_eq!(ctx.reflex_exponents(), &[1, 3]);
        assert_eq!(ctx.x_basis(), vec![z(2), z(4), z(1), &z(1) + &z(3)]);
        assert!(ctx.xi_is_positive(256));
        assert!(CmContext::new(9).is_err());
    }

    #[test]
    fn positivity_holds_for_supported_primes() {
        for ell in [3, 5, 7, 11, 13] {
            assert!(CmContext::new(ell).unwrap().xi_is_positive(256), "ell = {ell}");
        }
    }

    #[test]
    fn type_norm_of_two_plus_zeta() {
        let ctx = CmContext::new(5).unwrap();
        assert_eq!(ctx.type_norm(&CycloElem::one(5)), CycloElem::one(5));
        let want = CycloElem::from_int_coords(5, &[-2, -4, -2, -3]).unwrap();
        assert_eq!(ctx.type_norm(&two_plus_zeta()), want);
    }

    #[test]
    fn psi_embed_basics() {
        let ctx = CmContext::new(5).unwrap();
        let p = 128;
        assert!(ctx.psi_embed(&CycloElem::zero(5), p).iter().all(BigComplex::is_zero));
        let v = ctx.psi_embed(&z(1), p);
        assert_eq!(v.len(), 2);
        let w1 = crate::bigcomplex::e_of_rational(&Rational::from((1, 5)), p);
        let w2 = crate::bigcomplex::e_of_rational(&Rational::from((2, 5)), p);
        assert!((&v[0] - &w1).log2_abs() < -120.0);
        assert!((&v[1] - &w2).log2_abs() < -120.0);
    }

    #[test]
    fn mc_values() {
        let ideal = CycloIdeal::new(two_plus_zeta()).unwrap();
        assert_eq!(compute_mc(5, &ideal), Rational::from((11, 25)));
        let unit = CycloIdeal::new(CycloElem::one(5)).unwrap();
        assert_eq!(compute_mc(7, &unit), Rational::from((1, 49)));
        let mu = &CycloElem::from_i64(5, 3) - &z(2);
        let prod = CycloIdeal::new(&two_plus_zeta() * &mu).unwrap();
        assert_eq!(compute_mc(5, &prod), compute_mc(5, &ideal) * mu.norm());
    }

    #[test]
    fn example_basis_is_symplectic() {
        let ctx = CmContext::new(5).unwrap();
        let lambda = two_plus_zeta();
        let ideal = CycloIdeal::new(lambda.clone()).unwrap();
        let spec = ctx.polarization(5, &ideal);
        let basis = ctx.lattice_basis(5, &lambda).unwrap();
        let gram = gram_matrix(&spec, &basis).unwrap();
        assert!(gram.is_standard, "gram =\n{}", gram.matrix);
    }

    #[test]
    fn permuted_basis_permutes_gram() {
        let ctx = CmContext::new(5).unwrap();
        let spec = RiemannFormSpec::new(ctx.xi().clone(), Rational::from(1)).unwrap();
        let basis = ctx.x_basis();
        let perm = [2, 0, 3, 1];
        let permuted: Vec<CycloElem> = perm.iter().map(|&i| basis[i].clone()).collect();
        let g = gram_matrix(&spec, &basis).unwrap().matrix;
        let gp = gram_matrix(&spec, &permuted).unwrap().matrix;
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(gp[(i, j)], g[(perm[i], perm[j])]);
            }
        }
    }

    #[test]
    fn xi_generates_the_inverse_different() {
        // Tr(ξ a b̄) is integral on O_K with unimodular Gram matrix.
        let ctx = CmContext::new(5).unwrap();
        let spec = RiemannFormSpec::new(ctx.xi().clone(), Rational::from(1)).unwrap();
        let powers: Vec<CycloElem> = (1..5).map(z).collect();
        let gram = gram_matrix(&spec, &powers).unwrap().matrix;
        assert!(gram.is_integral());
        assert_eq!(gram.det().abs(), Rational::from(1));
    }

    #[test]
    fn rejects_real_xi() {
        assert!(RiemannFormSpec::new(&z(1) + &z(4), Rational::from(1)).is_err());
    }

    fn arb_elem() -> impl Strategy<Value = CycloElem> {
        proptest::collection::vec(-5i64..=5, 4)
            .prop_map(|c| CycloElem::from_int_coords(5, &c).unwrap())
    }

    proptest! {
        #[test]
        fn pairing_is_alternating(a in arb_elem(), b in arb_elem()) {
            let ctx = CmContext::new(5).unwrap();
            let spec = RiemannFormSpec::new(ctx.xi().clone(), Rational::from((11, 25))).unwrap();
            prop_assert_eq!(riemann_pairing(&spec, &a, &a), Rational::new());
            prop_assert_eq!(riemann_pairing(&spec, &a, &b), -riemann_pairing(&spec, &b, &a));
        }

        #[test]
        fn type_norm_is_multiplicative(a in arb_elem(), b in arb_elem()) {
            let ctx = CmContext::new(5).unwrap();
            prop_assert_eq!(ctx.type_norm(&(&a * &b)), &ctx.type_norm(&a) * &ctx.type_norm(&b));
        }

        #[test]
        fn psi_is_additive(a in arb_elem(), b in arb_elem()) {
            let ctx = CmContext::new(5).unwrap();
            let s = ctx.psi_embed(&(&a + &b), 160);
            let pa = ctx.psi_embed(&a, 160);
            let pb = ctx.psi_embed(&b, 160);
            for k in 0..2 {
                prop_assert!((&s[k] - &(&pa[k] + &pb[k])).log2_abs() < -140.0);
            }
        }

        #[test]
        fn gram_is_antisymmetric(cs in proptest::collection::vec(arb_elem(), 4)) {
            let ctx = CmContext::new(5).unwrap();
            let spec = RiemannFormSpec::new(ctx.xi().clone(), Rational::from(3)).unwrap();
            prop_assert!(gram_matrix(&spec, &cs).unwrap().matrix.is_antisymmetric());
        }

        #[test]
        fn polarization_integral_on_lattice(coords in proptest::collection::vec(-3i64..=3, 4)) {
            let lambda = CycloElem::from_int_coords(5, &coords).unwrap();
            prop_assume!(!lambda.is_zero());
            let ctx = CmContext::new(5).unwrap();
            for level in [2i64, 5, 6] {
                let ideal = CycloIdeal::new(lambda.clone()).unwrap();
                let spec = ctx.polarization(level, &ideal);
                let basis = ctx.lattice_basis(level, &lambda).unwrap();
                let gram = gram_matrix(&spec, &basis).unwrap();
                prop_assert!(gram.matrix.is_integral());
                prop_assert!(gram.is_standard);
            }
        }
    }
}
