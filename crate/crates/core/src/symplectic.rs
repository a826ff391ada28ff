//! Integer symplectic linear algebra and points of the Siegel upper half-space.

use std::fmt;

use rand::Rng;
use rug::ops::DivRounding;
use rug::{Integer, Rational};
use serde_json::Value;

use crate::bigcomplex::{BigComplex, BigReal};
use crate::cmat::CMatrix;
use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::theta::ThetaChar;

/// Square integer matrix, usually `2g × 2g` and split into `g × g` blocks
/// `[[A, B], [C, D]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    /// `J = [[0, -I], [I, 0]]`.
    pub fn standard_j(g: usize) -> Self {
        let mut m = IntMatrix { n: 2 * g, data: vec![0; 4 * g * g] };
        for i in 0..g {
            m.set(i, g + i, -1);
            m.set(g + i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("integer matrix must be square".into()));
        }
        Ok(IntMatrix { n, data: rows.concat() })
    }

    pub fn from_blocks(a: &[Vec<i64>], b: &[Vec<i64>], c: &[Vec<i64>], d: &[Vec<i64>]) -> Self {
        let g = a.len();
        let mut m = IntMatrix { n: 2 * g, data: vec![0; 4 * g * g] };
        for i in 0..g {
            for j in 0..g {
                m.set(i, j, a[i][j]);
                m.set(i, g + j, b[i][j]);
                m.set(g + i, j, c[i][j]);
                m.set(g + i, g + j, d[i][j]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn genus(&self) -> usize {
        self.n / 2
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = IntMatrix { n, data: vec![0; n * n] };
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    fn block(&self, bi: usize, bj: usize) -> Vec<Vec<i64>> {
        let g = self.genus();
        (0..g).map(|i| (0..g).map(|j| self.get(bi * g + i, bj * g + j)).collect()).collect()
    }

    /// The blocks `(A, B, C, D)`.
    pub fn blocks(&self) -> [Vec<Vec<i64>>; 4] {
        [self.block(0, 0), self.block(0, 1), self.block(1, 0), self.block(1, 1)]
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_i64_rows(&self.to_rows())
    }

    /// JSON array of rows of decimal strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.to_rows()
                .into_iter()
                .map(|r| Value::Array(r.into_iter().map(|x| Value::String(x.to_string())).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array".into()))?;
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_array().ok_or_else(|| Error::Parse("row must be an array".into()))?;
            let parsed: Result<Vec<i64>> = row
                .iter()
                .map(|x| match x {
                    Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'"))),
                    Value::Number(n) => n.as_i64().ok_or_else(|| Error::Parse(format!("bad integer {n}"))),
                    _ => Err(Error::Parse("matrix entries must be strings".into())),
                })
                .collect();
            out.push(parsed?);
        }
        IntMatrix::from_rows(&out)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Exact check of `M^T J M = J`.
pub fn is_symplectic(m: &IntMatrix) -> bool {
    if !m.dim().is_multiple_of(2) || m.dim() == 0 {
        return false;
    }
    let j = IntMatrix::standard_j(m.genus());
    m.transpose().mul(&j).mul(m) == j
}

/// Standard generators of `Sp_{2g}(Z)`: `J`, the translations
/// `[[I, S], [0, I]]` by elementary symmetric `S`, and `diag(U, U^{-T})` for
/// elementary `U`.
pub fn sp_generators(g: usize) -> Vec<IntMatrix> {
    let mut gens = vec![IntMatrix::standard_j(g)];
    let id: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| i64::from(i == j)).collect()).collect();
    let zero = vec![vec![0i64; g]; g];
    for sign in [1i64, -1] {
        for i in 0..g {
            for j in i..g {
                let mut s = zero.clone();
                s[i][j] = sign;
                s[j][i] = sign;
                gens.push(IntMatrix::from_blocks(&id, &s, &zero, &id));
            }
        }
        for i in 0..g {
            for j in 0..g {
                if i == j {
                    continue;
                }
                let mut u = id.clone();
                u[i][j] = sign;
                let mut u_inv_t = id.clone();
                u_inv_t[j][i] = -sign;
                gens.push(IntMatrix::from_blocks(&u, &zero, &zero, &u_inv_t));
            }
        }
    }
    gens
}

/// Product of `len` random standard generators.
pub fn random_symplectic<R: Rng + ?Sized>(g: usize, len: usize, rng: &mut R) -> IntMatrix {
    let gens = sp_generators(g);
    (0..len).fold(IntMatrix::identity(2 * g), |acc, _| acc.mul(&gens[rng.gen_range(0..gens.len())]))
}

/// A point of the Siegel upper half-space `H_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    z: CMatrix,
}

impl SiegelPoint {
    /// Validates symmetry and positive definiteness of the imaginary part.
    pub fn new(z: CMatrix) -> Result<Self> {
        if z.rows() != z.cols() || z.rows() == 0 {
            return Err(Error::Dimension("Siegel point must be a nonempty square matrix".into()));
        }
        let prec = z.prec();
        let scale = z.log2_max_abs().max(0.0);
        if z.log2_asymmetry() >= -(prec as f64) + 16.0 + scale {
            return Err(Error::NotInSiegelSpace("matrix is not symmetric".into()));
        }
        let z = z.symmetrized();
        if !is_positive_definite(&z.imag_part()) {
            return Err(Error::NotInSiegelSpace("imaginary part is not positive definite".into()));
        }
        Ok(SiegelPoint { z })
    }

    /// Genus-1 point `τ`.
    pub fn from_tau(tau: BigComplex) -> Result<Self> {
        SiegelPoint::new(CMatrix::from_rows(vec![vec![tau]]))
    }

    /// Parses `re:im` entries, columns split by `,` and rows by `;`, e.g.
    /// `0.3:1.2,-0.2:0.4;-0.2:0.4,0.1:0.9`.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let number = |x: &str| {
            BigReal::parse_decimal(x.trim(), prec).ok_or_else(|| Error::Parse(format!("bad number '{}'", x.trim())))
        };
        let entry = |t: &str| -> Result<BigComplex> {
            let (re, im) = t.split_once(':').ok_or_else(|| Error::Parse(format!("entry '{}' is not re:im", t.trim())))?;
            Ok(BigComplex::new(number(re)?, number(im)?))
        };
        let rows = text
            .split(';')
            .map(|row| row.split(',').map(entry).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::Dimension("period matrix must be square".into()));
        }
        SiegelPoint::new(CMatrix::from_rows(rows))
    }

    /// `i · I_g`.
    pub fn i_times_identity(g: usize, prec: u32) -> Self {
        let mut z = CMatrix::zeros(g, g, prec);
        for k in 0..g {
            z.set(k, k, BigComplex::i(prec));
        }
        SiegelPoint { z }
    }

    pub fn g(&self) -> usize {
        self.z.rows()
    }

    pub fn prec(&self) -> u32 {
        self.z.prec()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.z
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigComplex {
        self.z.get(i, j)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        SiegelPoint { z: self.z.with_prec(prec) }
    }

    /// `Im Z` as a real matrix.
    pub fn imag(&self) -> Vec<Vec<BigReal>> {
        self.z.imag_part()
    }
}

/// Cholesky test; every pivot must exceed `2^{-prec/2}` relative to the
/// largest diagonal entry.
fn is_positive_definite(y: &[Vec<BigReal>]) -> bool {
    let n = y.len();
    let prec = y[0][0].prec();
    let scale = (0..n).map(|i| y[i][i].log2_abs()).fold(f64::NEG_INFINITY, f64::max);
    let threshold = scale - prec as f64 / 2.0;
    let mut l: Vec<Vec<BigReal>> = vec![vec![BigReal::zero(prec); n]; n];
    for j in 0..n {
        let mut d = y[j][j].clone();
        for k in 0..j {
            d = &d - &l[j][k].square();
        }
        if !d.is_positive() || d.log2_abs() < threshold {
            return false;
        }
        let ljj = d.sqrt();
        for i in j + 1..n {
            let mut s = y[i][j].clone();
            for k in 0..j {
                s = &s - &(&l[i][k] * &l[j][k]);
            }
            l[i][j] = &s / &ljj;
        }
        l[j][j] = ljj;
    }
    true
}

/// `γ(Z) = (AZ + B)(CZ + D)^{-1}`.
pub fn act_on_h(m: &IntMatrix, z: &SiegelPoint) -> Result<SiegelPoint> {
    if !is_symplectic(m) {
        return Err(Error::NotSymplectic);
    }
    if m.genus() != z.g() {
        return Err(Error::Dimension(format!("matrix genus {} vs point genus {}", m.genus(), z.g())));
    }
    let prec = z.prec();
    let work = z.matrix().with_prec(prec + 32);
    let [a, b, c, d] = m.blocks();
    let num = CMatrix::left_mul_int(&a, &work).add_int(&b);
    let den = CMatrix::left_mul_int(&c, &work).add_int(&d);
    let inv = den.inverse().ok_or(Error::UnstableAction)?;
    let cond = den.log2_inf_norm() + inv.log2_inf_norm();
    if !cond.is_finite() || cond > prec as f64 / 2.0 {
        return Err(Error::UnstableAction);
    }
    let out = num.mul(&inv).with_prec(prec);
    SiegelPoint::new(out)
}

/// Outcome of reducing an alternating form to `[[0, -E], [E, 0]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticReduction {
    /// Rows are the new basis in terms of the old one: `T G T^T` is canonical.
    pub transform: QMatrix,
    /// `ε_1 | ε_2 | … | ε_g`.
    pub divisors: Vec<Rational>,
}

impl SymplecticReduction {
    pub fn canonical_form(&self) -> QMatrix {
        QMatrix::block_form(&self.divisors)
    }

    pub fn is_principal(&self) -> bool {
        self.divisors.iter().all(|e| *e == 1)
    }
}

/// Tie-breaking rule for pivot selection among entries of equal size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotOrder {
    /// Lowest row index, then lowest column.
    #[default]
    Forward,
    /// Highest row index, then highest column.
    Reversed,
}

/// Alternating Smith reduction over Z (after clearing denominators).
pub fn symplectic_reduce(form: &QMatrix, order: PivotOrder) -> Result<SymplecticReduction> {
    if !form.is_antisymmetric() || !form.rows().is_multiple_of(2) {
        return Err(Error::NotAlternating);
    }
    let n = form.rows();
    let g = n / 2;
    let denom = form.common_denominator();
    let mut h: Vec<Vec<Integer>> = (0..n)
        .map(|i| (0..n).map(|j| Integer::from(form[(i, j)].numer() * &denom) / form[(i, j)].denom()).collect())
        .collect();
    let mut t: Vec<Vec<Integer>> =
        (0..n).map(|i| (0..n).map(|j| Integer::from(i32::from(i == j))).collect()).collect();

    // e_r += k e_s, applied to the basis and to both sides of the form.
    let add_multiple = |h: &mut Vec<Vec<Integer>>, t: &mut Vec<Vec<Integer>>, r: usize, s: usize, k: &Integer| {
        if *k == 0 {
            return;
        }
        for c in 0..n {
            let v = Integer::from(k * &t[s][c]);
            t[r][c] += v;
            let v = Integer::from(k * &h[s][c]);
            h[r][c] += v;
        }
        for row in h.iter_mut() {
            let v = Integer::from(k * &row[s]);
            row[r] += v;
        }
    };

    let mut active: Vec<usize> = (0..n).collect();
    let mut firsts = Vec::with_capacity(g);
    let mut seconds = Vec::with_capacity(g);
    let mut divisors = Vec::with_capacity(g);
    while !active.is_empty() {
        let (i, j) = loop {
            let mut best: Option<(usize, usize)> = None;
            for &a in &active {
                for &b in &active {
                    if a == b || h[a][b] == 0 {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((x, y)) => {
                            let cur = h[x][y].clone().abs();
                            let cand = h[a][b].clone().abs();
                            cand < cur
                                || (cand == cur
                                    && match order {
                                        PivotOrder::Forward => (a, b) < (x, y),
                                        PivotOrder::Reversed => (a, b) > (x, y),
                                    })
                        }
                    };
                    if better {
                        best = Some((a, b));
                    }
                }
            }
            let (i, j) = best.ok_or(Error::DegenerateForm)?;
            let d = h[i][j].clone();
            let mut dirty = false;
            for &r in &active {
                if r == i || r == j {
                    continue;
                }
                let q = h[i][r].clone().div_floor(&d);
                add_multiple(&mut h, &mut t, r, j, &(-q));
                let q = h[j][r].clone().div_floor(&d);
                add_multiple(&mut h, &mut t, r, i, &q);
                dirty |= h[i][r] != 0 || h[j][r] != 0;
            }
            if dirty {
                continue;
            }
            let mut offender = None;
            'search: for &r in &active {
                for &s in &active {
                    if r == i || r == j || s == i || s == j {
                        continue;
                    }
                    if !h[r][s].is_divisible(&d) {
                        offender = Some(r);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(r) => add_multiple(&mut h, &mut t, i, r, &Integer::from(1)),
                None => break (i, j),
            }
        };
        let d = h[i][j].clone();
        let (first, second) = if d > 0 { (j, i) } else { (i, j) };
        divisors.push(Rational::from((d.abs(), denom.clone())));
        firsts.push(first);
        seconds.push(second);
        active.retain(|&x| x != i && x != j);
    }
    let order_rows: Vec<usize> = firsts.into_iter().chain(seconds).collect();
    let transform = QMatrix::from_rows(
        order_rows.iter().map(|&r| t[r].iter().map(|x| Rational::from(x.clone())).collect()).collect(),
    );
    let reduction = SymplecticReduction { transform, divisors };
    debug_assert_eq!(
        &(&reduction.transform * form) * &reduction.transform.transpose(),
        reduction.canonical_form()
    );
    Ok(reduction)
}

/// `γ^T v` for a rational characteristic `v = [r; s]`.
pub fn transpose_act(m: &IntMatrix, v: &ThetaChar) -> ThetaChar {
    let x = v.to_vector();
    let n = m.dim();
    let out: Vec<Rational> = (0..n)
        .map(|i| (0..n).fold(Rational::new(), |acc, k| acc + Rational::from(m.get(k, i)) * &x[k]))
        .collect();
    ThetaChar::from_vector(&out).expect("even length")
}

/// The permutation of half-integer characteristics induced by `γ`:
/// `[a; b] ↦ γ^T [a; b] + ½ [{A^T C}; {B^T D}]  (mod Z^{2g})`.
pub fn char_permute(m: &IntMatrix, v: &ThetaChar) -> Result<ThetaChar> {
    if !is_symplectic(m) {
        return Err(Error::NotSymplectic);
    }
    if !v.is_half_integral() {
        return Err(Error::NotHalfIntegral);
    }
    let g = m.genus();
    let [a, b, c, d] = m.blocks();
    let diag = |x: &[Vec<i64>], y: &[Vec<i64>]| -> Vec<Rational> {
        (0..g).map(|i| Rational::from(((0..g).map(|k| x[k][i] * y[k][i]).sum::<i64>(), 2))).collect()
    };
    let shift: Vec<Rational> = diag(&a, &c).into_iter().chain(diag(&b, &d)).collect();
    let moved = transpose_act(m, v).to_vector();
    let out: Vec<Rational> = moved.iter().zip(&shift).map(|(x, s)| Rational::from(x + s)).collect();
    Ok(ThetaChar::from_vector(&out)?.reduced())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::build_char_sets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_point(prec: u32) -> SiegelPoint {
        let z = CMatrix::from_rows(vec![
            vec![BigComplex::from_f64(0.3, 1.2, prec), BigComplex::from_f64(-0.2, 0.4, prec)],
            vec![BigComplex::from_f64(-0.2, 0.4, prec), BigComplex::from_f64(0.1, 0.9, prec)],
        ]);
        SiegelPoint::new(z).unwrap()
    }

    fn max_diff(a: &SiegelPoint, b: &SiegelPoint) -> f64 {
        a.matrix().sub(b.matrix()).log2_max_abs()
    }

    #[test]
    fn symplectic_membership() {
        assert!(is_symplectic(&IntMatrix::identity(4)));
        assert!(is_symplectic(&IntMatrix::standard_j(2)));
        let mut diag = IntMatrix::identity(4);
        diag.set(0, 0, 2);
        assert!(!is_symplectic(&diag));
        for m in sp_generators(3) {
            assert!(is_symplectic(&m));
        }
    }

    #[test]
    fn identity_and_j_actions() {
        let z = sample_point(256);
        let same = act_on_h(&IntMatrix::identity(4), &z).unwrap();
        assert!(max_diff(&same, &z) < -240.0);
        let flipped = act_on_h(&IntMatrix::standard_j(2), &z).unwrap();
        let want = z.matrix().inverse().unwrap().neg();
        assert!(flipped.matrix().sub(&want).log2_max_abs() < -230.0);
    }

    #[test]
    fn action_is_a_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z = sample_point(256);
        for _ in 0..10 {
            let m1 = random_symplectic(2, 3, &mut rng);
            let m2 = random_symplectic(2, 3, &mut rng);
            let lhs = act_on_h(&m1.mul(&m2), &z).unwrap();
            let rhs = act_on_h(&m1, &act_on_h(&m2, &z).unwrap()).unwrap();
            assert!(max_diff(&lhs, &rhs) < -200.0);
        }
    }

    #[test]
    fn parse_points() {
        let z = SiegelPoint::parse("0.3:1.2,-0.2:0.4; -0.2:0.4,0.1:0.9", 128).unwrap();
        assert!(max_diff(&z, &sample_point(128)) < -50.0);
        assert!(SiegelPoint::parse("0:1,0:0", 64).is_err());
        assert!(SiegelPoint::parse("0:-1", 64).is_err());
        assert!(SiegelPoint::parse("x:1", 64).is_err());
    }

    #[test]
    fn rejects_non_siegel_points() {
        let p = 128;
        let asym = CMatrix::from_rows(vec![
            vec![BigComplex::from_f64(0.0, 1.0, p), BigComplex::from_f64(0.5, 0.0, p)],
            vec![BigComplex::from_f64(0.0, 0.0, p), BigComplex::from_f64(0.0, 1.0, p)],
        ]);
        assert!(SiegelPoint::new(asym).is_err());
        let indefinite = CMatrix::from_rows(vec![
            vec![BigComplex::from_f64(0.0, 1.0, p), BigComplex::from_f64(0.0, 2.0, p)],
            vec![BigComplex::from_f64(0.0, 2.0, p), BigComplex::from_f64(0.0, 1.0, p)],
        ]);
        assert!(SiegelPoint::new(indefinite).is_err());
        let nonsymp = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(act_on_h(&nonsymp, &SiegelPoint::i_times_identity(1, p)), Err(Error::NotSymplectic));
    }

    #[test]
    fn reduce_standard_form_is_trivial() {
        let j = QMatrix::standard_j(2);
        let red = symplectic_reduce(&j, PivotOrder::Forward).unwrap();
        assert_eq!(red.divisors, vec![Rational::from(1), Rational::from(1)]);
        assert_eq!(&(&red.transform * &j) * &red.transform.transpose(), j);
    }

    #[test]
    fn reduce_finds_elementary_divisors() {
        let g = QMatrix::from_i64_rows(&[
            vec![0, 2, 4, 6],
            vec![-2, 0, 8, 2],
            vec![-4, -8, 0, 12],
            vec![-6, -2, -12, 0],
        ]);
        for order in [PivotOrder::Forward, PivotOrder::Reversed] {
            let red = symplectic_reduce(&g, order).unwrap();
            assert_eq!(&(&red.transform * &g) * &red.transform.transpose(), red.canonical_form());
            assert_eq!(red.transform.det().abs(), Rational::from(1));
            assert!(red.divisors[1].numer().is_divisible(red.divisors[0].numer()));
            // Pfaffian = 2·12 - 4·2 + 6·8 = 64 = ε_1 ε_2.
            let prod = Rational::from(&red.divisors[0] * &red.divisors[1]);
            assert_eq!(prod, Rational::from(64));
        }
    }

    #[test]
    fn reduce_rejects_degenerate_forms() {
        let g = QMatrix::from_i64_rows(&[vec![0, 1, 0, 0], vec![-1, 0, 0, 0], vec![0; 4], vec![0; 4]]);
        assert_eq!(symplectic_reduce(&g, PivotOrder::Forward), Err(Error::DegenerateForm));
        let sym = QMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(symplectic_reduce(&sym, PivotOrder::Forward), Err(Error::NotAlternating));
    }

    #[test]
    fn divisors_are_invariant_under_unimodular_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = QMatrix::from_i64_rows(&[
            vec![0, 0, -3, 0],
            vec![0, 0, 0, -6],
            vec![3, 0, 0, 0],
            vec![0, 6, 0, 0],
        ]);
        let base = symplectic_reduce(&g, PivotOrder::Forward).unwrap().divisors;
        for _ in 0..20 {
            // Random unimodular U from elementary row operations.
            let mut u = QMatrix::identity(4);
            for _ in 0..8 {
                let (a, b) = (rng.gen_range(0..4), rng.gen_range(0..4));
                if a == b {
                    continue;
                }
                let k = Rational::from(rng.gen_range(-2i64..=2));
                for c in 0..4 {
                    let v = Rational::from(&u[(b, c)] * &k);
                    u[(a, c)] += v;
                }
            }
            let changed = &(&u * &g) * &u.transpose();
            assert_eq!(symplectic_reduce(&changed, PivotOrder::Forward).unwrap().divisors, base);
        }
    }

    #[test]
    fn rational_forms_reduce() {
        let g = QMatrix::standard_j(2).scaled(&Rational::from((1, 25)));
        let red = symplectic_reduce(&g, PivotOrder::Forward).unwrap();
        assert_eq!(red.divisors, vec![Rational::from((1, 25)); 2]);
    }

    #[test]
    fn char_permute_identity() {
        let v = ThetaChar::from_vector(&[Rational::from((1, 2)), Rational::new()]).unwrap();
        assert_eq!(char_permute(&IntMatrix::identity(2), &v).unwrap(), v);
    }

    #[test]
    fn char_permute_preserves_parity_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sets = build_char_sets(2);
        for _ in 0..50 {
            let m = random_symplectic(2, 6, &mut rng);
            let image: Vec<ThetaChar> =
                sets.s_minus.iter().map(|v| char_permute(&m, v).unwrap()).collect();
            for w in &image {
                assert!(sets.s_minus.contains(w));
            }
            let mut uniq = image.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), sets.s_minus.len());
            let image_plus: Vec<ThetaChar> =
                sets.s_plus.iter().map(|v| char_permute(&m, v).unwrap()).collect();
            let mut uniq = image_plus.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), sets.s_plus.len());
            assert!(uniq.iter().all(|w| sets.s_plus.contains(w)));
        }
    }

    #[test]
    fn char_permute_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sets = build_char_sets(2);
        for _ in 0..30 {
            let m1 = random_symplectic(2, 4, &mut rng);
            let m2 = random_symplectic(2, 4, &mut rng);
            for v in sets.s_minus.iter().chain(&sets.s_plus) {
                // Acting by m1 then m2 on characteristics matches the product m1·m2.
                let step = char_permute(&m2, &char_permute(&m1, v).unwrap()).unwrap();
                assert_eq!(step, char_permute(&m1.mul(&m2), v).unwrap());
            }
        }
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = IntMatrix::standard_j(2);
        let json = m.to_json();
        assert_eq!(json[0][2], Value::String("-1".into()));
        assert_eq!(IntMatrix::from_json(&json).unwrap(), m);
    }
}
