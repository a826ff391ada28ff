//! Ray classes of `K = Q(ζ_ℓ)` modulo `f = N O_K` (class number one), their
//! r-vectors, the CM point, and the Siegel invariants `Θ_f(C)`.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::bigcomplex::{agree_relative, e_of_rational, BigComplex, BigReal};
use crate::cmat::CMatrix;
use crate::cmdata::{gram_matrix, CmContext};
use crate::cyclofield::{solve_in_basis, CycloElem, CycloIdeal};
use crate::error::{Error, Result};
use crate::reference::reference_table;
use crate::symplectic::{symplectic_reduce, PivotOrder, SiegelPoint};
use crate::theta::{big_theta, big_theta_working_prec, ThetaChar};

/// Primes whose cyclotomic field has class number one.
pub const SUPPORTED_ELLS: [u32; 7] = [3, 5, 7, 11, 13, 17, 19];

/// Largest residue ring `O_K / N O_K` enumerated exhaustively.
pub const MAX_RESIDUE_RING: usize = 1 << 21;

/// Arithmetic in `O_K / N O_K` on coordinates in the basis `ζ^1, …, ζ^{ℓ-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    ell: u32,
    n: i64,
    dim: usize,
    primes: Vec<i64>,
}

impl ResidueRing {
    pub fn new(ell: u32, n: i64) -> Self {
        let mut primes = Vec::new();
        let mut m = n;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                primes.push(p);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        ResidueRing { ell, n, dim: ell as usize - 1, primes }
    }

    /// `N^{ℓ-1}`, saturating.
    pub fn size(&self) -> usize {
        (0..self.dim).try_fold(1usize, |acc, _| acc.checked_mul(self.n as usize)).unwrap_or(usize::MAX)
    }

    pub fn index(&self, c: &[i64]) -> usize {
        c.iter().fold(0usize, |acc, &x| acc * self.n as usize + x.rem_euclid(self.n) as usize)
    }

    pub fn coords(&self, mut idx: usize) -> Vec<i64> {
        let mut c = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            c[k] = (idx % self.n as usize) as i64;
            idx /= self.n as usize;
        }
        c
    }

    pub fn one(&self) -> Vec<i64> {
        // 1 = -(ζ + … + ζ^{ℓ-1}).
        vec![(-1i64).rem_euclid(self.n); self.dim]
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let l = self.ell as usize;
        let mut full = vec![0i64; l];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                full[(i + j + 2) % l] += x * y;
            }
        }
        (1..l).map(|k| (full[k] - full[0]).rem_euclid(self.n)).collect()
    }

    pub fn pow(&self, a: &[i64], k: u64) -> Vec<i64> {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Residue of an integral element.
    pub fn reduce(&self, x: &CycloElem) -> Result<Vec<i64>> {
        let ints = x.int_coords().ok_or_else(|| Error::NotCoprime(format!("{x} is not integral")))?;
        let n = self.n as u32;
        Ok(ints.iter().map(|c| i64::from(c.mod_u(n))).collect())
    }

    /// Lift with coordinates in `(-N/2, N/2]`.
    pub fn lift(&self, c: &[i64]) -> CycloElem {
        let centered: Vec<i64> = c.iter().map(|&x| if 2 * x > self.n { x - self.n } else { x }).collect();
        CycloElem::from_int_coords(self.ell, &centered).expect("dimension matches")
    }

    /// Invertible iff the multiplication map is invertible modulo every prime
    /// dividing `N`.
    pub fn is_unit(&self, a: &[i64]) -> bool {
        let cols: Vec<Vec<i64>> = (0..self.dim)
            .map(|k| {
                let mut e = vec![0; self.dim];
                e[k] = 1;
                self.mul(a, &e)
            })
            .collect();
        self.primes.iter().all(|&p| det_mod_p(&cols, p) != 0)
    }
}

fn det_mod_p(cols: &[Vec<i64>], p: i64) -> i64 {
    let n = cols.len();
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].rem_euclid(p)).collect()).collect();
    let mut det = 1i64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            det = (p - det) % p;
        }
        det = det * m[c][c] % p;
        let inv = mod_inverse(m[c][c], p);
        for r in c + 1..n {
            let f = m[r][c] * inv % p;
            if f == 0 {
                continue;
            }
            for k in c..n {
                m[r][k] = (m[r][k] - f * m[c][k]).rem_euclid(p);
            }
        }
    }
    det
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    let mut result = 1i64;
    let mut base = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Generators of `O_K^×`: `-ζ` and the cyclotomic units `(1 - ζ^a)/(1 - ζ)`, `a = 2..g`.
pub fn unit_generators(ell: u32) -> Vec<CycloElem> {
    let g = (ell as i64 - 1) / 2;
    let mut gens = vec![-&CycloElem::zeta_pow(ell, 1)];
    for a in 2..=g {
        let terms: Vec<(i64, Rational)> = (0..a).map(|k| (k, Rational::from(1))).collect();
        gens.push(CycloElem::from_terms(ell, &terms));
    }
    gens
}

/// One ray class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayClass {
    /// `1..=h`; the identity class carries label `h`.
    pub label: usize,
    /// Exponents with respect to the table generators.
    pub exponents: Vec<u32>,
    pub representative: CycloElem,
    pub residue: Vec<i64>,
    /// Whether the representative reproduces a reference r-vector, when one exists.
    pub reference_match: Option<bool>,
}

impl RayClass {
    pub fn name(&self) -> String {
        format!("C_{}", self.label)
    }
}

/// The group `(O_K / f)^× / image(O_K^×)` with a cyclic decomposition.
#[derive(Clone, Debug)]
pub struct RayClassTable {
    ell: u32,
    level: i64,
    ring: ResidueRing,
    coset_of: Vec<u32>,
    label_of_coset: Vec<usize>,
    classes: Vec<RayClass>,
    orders: Vec<u32>,
    residue_units: usize,
    unit_image: usize,
}

impl RayClassTable {
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn order(&self) -> usize {
        self.classes.len()
    }

    /// Orders of the cyclic factors, largest first.
    pub fn cyclic_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn is_cyclic(&self) -> bool {
        self.orders.len() <= 1
    }

    /// `|(O_K / f)^×|`.
    pub fn residue_unit_count(&self) -> usize {
        self.residue_units
    }

    /// Order of the image of the global units.
    pub fn unit_image_order(&self) -> usize {
        self.unit_image
    }

    pub fn classes(&self) -> &[RayClass] {
        &self.classes
    }

    pub fn class(&self, label: usize) -> Result<&RayClass> {
        if label == 0 || label > self.classes.len() {
            return Err(Error::UnknownClass(label));
        }
        Ok(&self.classes[label - 1])
    }

    pub fn identity_label(&self) -> usize {
        self.classes.len()
    }

    /// Label of the class of `λ O_K`.
    pub fn class_of(&self, lambda: &CycloElem) -> Result<usize> {
        let res = self.ring.reduce(lambda)?;
        let c = self.coset_of[self.ring.index(&res)];
        if c == u32::MAX {
            return Err(Error::NotCoprime(lambda.to_string()));
        }
        Ok(self.label_of_coset[c as usize])
    }

    pub fn same_class(&self, a: &CycloElem, b: &CycloElem) -> Result<bool> {
        Ok(self.class_of(a)? == self.class_of(b)?)
    }

    fn label_of_exponents(&self, e: &[u32]) -> usize {
        let idx = e.iter().zip(&self.orders).rev().fold(0usize, |acc, (&x, &o)| acc * o as usize + x as usize);
        if idx == 0 {
            self.classes.len()
        } else {
            idx
        }
    }

    pub fn mul_labels(&self, a: usize, b: usize) -> Result<usize> {
        let (ca, cb) = (self.class(a)?, self.class(b)?);
        let e: Vec<u32> =
            ca.exponents.iter().zip(&cb.exponents).zip(&self.orders).map(|((x, y), o)| (x + y) % o).collect();
        Ok(self.label_of_exponents(&e))
    }

    pub fn inverse_label(&self, a: usize) -> Result<usize> {
        let e: Vec<u32> = self.class(a)?.exponents.iter().zip(&self.orders).map(|(x, o)| (o - x) % o).collect();
        Ok(self.label_of_exponents(&e))
    }

    /// All unit residues in a class, as centered lifts.
    pub fn class_residues(&self, label: usize) -> Result<Vec<CycloElem>> {
        self.class(label)?;
        Ok(self
            .coset_of
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != u32::MAX && self.label_of_coset[c as usize] == label)
            .map(|(i, _)| self.ring.lift(&self.ring.coords(i)))
            .collect())
    }
}

/// Candidate representatives `Σ c_k ζ^k` (`k = 0..ℓ-2`, `|c_k| ≤ 3`) sorted by
/// height, then `l1` norm, then lexicographically.
fn candidate_coords(ell: u32) -> Vec<Vec<i64>> {
    let dim = ell as usize - 1;
    let max_support = if ell <= 7 { dim } else { 3 };
    let mut out = Vec::new();
    let mut cur = vec![0i64; dim];
    fn rec(k: usize, support: usize, max_support: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == cur.len() {
            if support > 0 {
                out.push(cur.clone());
            }
            return;
        }
        for c in -3..=3i64 {
            if c != 0 && support == max_support {
                continue;
            }
            cur[k] = c;
            rec(k + 1, support + usize::from(c != 0), max_support, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, 0, max_support, &mut cur, &mut out);
    out.sort_by_key(|c| {
        let h = c.iter().map(|x| x.abs()).max().unwrap_or(0);
        let l1: i64 = c.iter().map(|x| x.abs()).sum();
        (h, l1, c.clone())
    });
    out
}

fn power_basis_elem(ell: u32, c: &[i64]) -> CycloElem {
    let terms: Vec<(i64, Rational)> =
        c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, &x)| (k as i64, Rational::from(x))).collect();
    CycloElem::from_terms(ell, &terms)
}

/// `φ(λ) = Σ r_j x_j`, reduced into `[0, N)`.
pub fn r_vector_of(ctx: &CmContext, level: i64, lambda: &CycloElem) -> Result<Vec<i64>> {
    let sol = solve_in_basis(&ctx.type_norm(lambda), &ctx.x_basis())?;
    let ints = sol.int_coeffs().ok_or(Error::NonIntegralBasis)?;
    let n = level as u32;
    Ok(ints.iter().map(|c| i64::from(c.mod_u(n))).collect())
}

/// Enumerates `Cl(N O_K)` for a class-number-one cyclotomic field.
pub fn enumerate_ray_classes(ell: u32, level: i64) -> Result<RayClassTable> {
    if !SUPPORTED_ELLS.contains(&ell) {
        return Err(Error::UnsupportedClassNumber(ell));
    }
    if level < 2 {
        return Err(Error::InvalidLevel(level));
    }
    let ctx = CmContext::new(ell)?;
    let ring = ResidueRing::new(ell, level);
    let size = ring.size();
    if size > MAX_RESIDUE_RING {
        return Err(Error::Dimension(format!("residue ring of size {level}^{} is too large", ell - 1)));
    }

    // Image of the unit group.
    let gens: Vec<Vec<i64>> = unit_generators(ell).iter().map(|u| ring.reduce(u)).collect::<Result<_>>()?;
    let mut in_sub = vec![false; size];
    let one = ring.one();
    in_sub[ring.index(&one)] = true;
    let mut subgroup = vec![one.clone()];
    let mut queue = VecDeque::from([one.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = ring.mul(&x, g);
            let i = ring.index(&y);
            if !in_sub[i] {
                in_sub[i] = true;
                subgroup.push(y.clone());
                queue.push_back(y);
            }
        }
    }

    // Cosets of the unit image inside (O/f)^×.
    let mut coset_of = vec![u32::MAX; size];
    let mut coset_rep = Vec::new();
    let mut residue_units = 0usize;
    for idx in 0..size {
        let x = ring.coords(idx);
        if coset_of[idx] != u32::MAX {
            residue_units += 1;
            continue;
        }
        if !ring.is_unit(&x) {
            continue;
        }
        residue_units += 1;
        let id = coset_rep.len() as u32;
        for u in &subgroup {
            coset_of[ring.index(&ring.mul(&x, u))] = id;
        }
        coset_rep.push(x);
    }
    let h = coset_rep.len();
    let qmul = |a: usize, b: usize| coset_of[ring.index(&ring.mul(&coset_rep[a], &coset_rep[b]))] as usize;
    let identity = coset_of[ring.index(&one)] as usize;

    // Candidate representatives per coset, in preference order.
    let mut candidates: Vec<Vec<CycloElem>> = vec![Vec::new(); h];
    for c in candidate_coords(ell) {
        let elem = power_basis_elem(ell, &c);
        let res = ring.reduce(&elem)?;
        let id = coset_of[ring.index(&res)];
        if id != u32::MAX && candidates[id as usize].len() < 64 {
            candidates[id as usize].push(elem);
        }
    }
    let coset_key: Vec<usize> = {
        let all = candidate_coords(ell);
        let mut first = vec![usize::MAX; h];
        for (rank, c) in all.iter().enumerate() {
            let res = ring.reduce(&power_basis_elem(ell, c))?;
            let id = coset_of[ring.index(&res)];
            if id != u32::MAX && first[id as usize] == usize::MAX {
                first[id as usize] = rank;
            }
        }
        first
    };

    let reference = reference_table(ell, level);
    let coset_with_vector = |target: &[i64]| -> Result<Option<usize>> {
        for (id, cands) in candidates.iter().enumerate() {
            for c in cands {
                if r_vector_of(&ctx, level, c)? == target {
                    return Ok(Some(id));
                }
            }
        }
        for idx in 0..size {
            let id = coset_of[idx];
            if id != u32::MAX && r_vector_of(&ctx, level, &ring.lift(&ring.coords(idx)))? == target {
                return Ok(Some(id as usize));
            }
        }
        Ok(None)
    };
    let preferred = match reference {
        Some(rows) => coset_with_vector(&rows[0].r_vector)?,
        None => None,
    };

    // Cyclic decomposition by successive maximal-order lifts.
    let order_in = |x: usize, sub: &[bool]| -> u32 {
        let mut y = x;
        let mut k = 1u32;
        while !sub[y] {
            y = qmul(y, x);
            k += 1;
        }
        k
    };
    let mut by_pref: Vec<usize> = (0..h).collect();
    by_pref.sort_by_key(|&c| (preferred != Some(c), coset_key[c], c));
    let mut in_q = vec![false; h];
    in_q[identity] = true;
    let mut sub_elems = vec![identity];
    let mut gen_cosets = Vec::new();
    let mut orders = Vec::new();
    let trivial = {
        let mut t = vec![false; h];
        t[identity] = true;
        t
    };
    while sub_elems.len() < h {
        let mut best = (by_pref[0], 0u32);
        for &x in &by_pref {
            let k = order_in(x, &in_q);
            if k > best.1 {
                best = (x, k);
            }
        }
        let (x, k) = best;
        let y = sub_elems
            .iter()
            .map(|&s| qmul(x, s))
            .find(|&y| order_in(y, &trivial) == k)
            .expect("a lift of maximal order exists");
        let mut next = Vec::with_capacity(sub_elems.len() * k as usize);
        let mut p = identity;
        for _ in 0..k {
            for &s in &sub_elems {
                next.push(qmul(s, p));
            }
            p = qmul(p, y);
        }
        for &e in &next {
            in_q[e] = true;
        }
        sub_elems = next;
        gen_cosets.push(y);
        orders.push(k);
    }

    // Labels from mixed-radix exponents.
    let mut label_of_coset = vec![0usize; h];
    let mut exponents_of_coset = vec![Vec::new(); h];
    for idx in 0..h {
        let mut e = Vec::with_capacity(orders.len());
        let mut rest = idx;
        let mut elem = identity;
        for (g, &o) in gen_cosets.iter().zip(&orders) {
            let k = (rest % o as usize) as u32;
            rest /= o as usize;
            for _ in 0..k {
                elem = qmul(elem, *g);
            }
            e.push(k);
        }
        label_of_coset[elem] = if idx == 0 { h } else { idx };
        exponents_of_coset[elem] = e;
    }

    let mut classes = Vec::with_capacity(h);
    for label in 1..=h {
        let coset = label_of_coset.iter().position(|&l| l == label).expect("labels are a bijection");
        let target = reference.and_then(|rows| rows.get(label - 1)).map(|r| r.r_vector.to_vec());
        let mut chosen = None;
        let mut reference_match = None;
        if let Some(t) = &target {
            for c in &candidates[coset] {
                if r_vector_of(&ctx, level, c)? == *t {
                    chosen = Some(c.clone());
                    break;
                }
            }
            if chosen.is_none() {
                for idx in 0..size {
                    if coset_of[idx] as usize == coset {
                        let c = ring.lift(&ring.coords(idx));
                        if r_vector_of(&ctx, level, &c)? == *t {
                            chosen = Some(c);
                            break;
                        }
                    }
                }
            }
            reference_match = Some(chosen.is_some());
        }
        let representative = chosen
            .or_else(|| candidates[coset].first().cloned())
            .unwrap_or_else(|| ring.lift(&coset_rep[coset]));
        let residue = ring.reduce(&representative)?;
        classes.push(RayClass {
            label,
            exponents: exponents_of_coset[coset].clone(),
            representative,
            residue,
            reference_match,
        });
    }
    Ok(RayClassTable {
        ell,
        level,
        ring,
        coset_of,
        label_of_coset,
        classes,
        orders,
        residue_units,
        unit_image: subgroup.len(),
    })
}

/// r-vector of a class, from its representative.
pub fn r_vector(ctx: &CmContext, table: &RayClassTable, label: usize) -> Result<Vec<i64>> {
    r_vector_of(ctx, table.level(), &table.class(label)?.representative)
}

/// `Z = [Ψ(b_{g+1}) ⋯ Ψ(b_{2g})]^{-1} [Ψ(b_1) ⋯ Ψ(b_g)]` for a symplectic basis `b`.
pub fn cm_point_from_basis(ctx: &CmContext, basis: &[CycloElem], prec: u32) -> Result<SiegelPoint> {
    let g = ctx.g();
    if basis.len() != 2 * g {
        return Err(Error::Dimension(format!("expected {} basis elements, got {}", 2 * g, basis.len())));
    }
    let size = basis.iter().map(|b| b.height().to_f64().max(1.0).log2()).fold(0.0, f64::max);
    let wp = prec + 32 + 4 * size.ceil() as u32;
    let cols = |range: &[CycloElem]| -> Vec<Vec<BigComplex>> { range.iter().map(|b| ctx.psi_embed(b, wp)).collect() };
    let left = CMatrix::from_columns(&cols(&basis[g..]));
    let right = CMatrix::from_columns(&cols(&basis[..g]));
    let inv = left.inverse().ok_or(Error::DegenerateCmData)?;
    if left.log2_inf_norm() + inv.log2_inf_norm() > f64::from(wp) / 2.0 {
        return Err(Error::DegenerateCmData);
    }
    SiegelPoint::new(inv.mul(&right).with_prec(prec))
}

/// The CM point `Z_ℓ^*` built from the seed basis.
pub fn cm_point(ctx: &CmContext, prec: u32) -> Result<SiegelPoint> {
    cm_point_from_basis(ctx, &ctx.x_basis(), prec)
}

/// `Θ_f(C) = Θ(r/N, Z_ℓ^*)`.
pub fn siegel_invariant(ctx: &CmContext, table: &RayClassTable, label: usize, prec: u32) -> Result<BigComplex> {
    let z = cm_point(ctx, big_theta_working_prec(ctx.g(), table.level(), prec))?;
    invariant_at(ctx, table, label, &z, prec)
}

fn invariant_at(ctx: &CmContext, table: &RayClassTable, label: usize, z: &SiegelPoint, prec: u32) -> Result<BigComplex> {
    let r = r_vector(ctx, table, label)?;
    let v = ThetaChar::from_numerators(&r, table.level())?;
    big_theta(&v, table.level(), z, prec)
}

/// One row of a computed invariant table.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantRow {
    pub label: usize,
    pub representative: CycloElem,
    pub r_vector: Vec<i64>,
    pub value: BigComplex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTable {
    pub ell: u32,
    pub level: i64,
    pub prec: u32,
    pub cyclic_orders: Vec<u32>,
    pub cm_point: SiegelPoint,
    pub rows: Vec<InvariantRow>,
}

impl InvariantTable {
    pub fn values(&self) -> Vec<BigComplex> {
        self.rows.iter().map(|r| r.value.clone()).collect()
    }

    pub fn value(&self, label: usize) -> Option<&BigComplex> {
        self.rows.get(label.wrapping_sub(1)).map(|r| &r.value)
    }
}

/// Nonzero values must not fall below `2^{-2·prec}`.
pub fn check_magnitudes(rows: &[InvariantRow], prec: u32) -> Result<()> {
    let floor = -2.0 * f64::from(prec);
    for row in rows {
        let m = row.value.log2_abs();
        if m.is_finite() && m < floor {
            return Err(Error::InsufficientPrecision(format!(
                "C_{} has magnitude 2^{:.0}, below 2^{floor:.0}; use at least {} bits",
                row.label,
                m,
                (-m / 2.0).ceil()
            )));
        }
    }
    Ok(())
}

/// All invariants of a table, computed in parallel and ordered by label.
pub fn compute_invariants(ctx: &CmContext, table: &RayClassTable, prec: u32) -> Result<InvariantTable> {
    let z = cm_point(ctx, big_theta_working_prec(ctx.g(), table.level(), prec))?;
    let rows: Vec<InvariantRow> = table
        .classes()
        .par_iter()
        .map(|cls| {
            let wrap = |e: Error| Error::ClassFailure { label: cls.name(), source: Box::new(e) };
            let r_vector = r_vector(ctx, table, cls.label).map_err(wrap)?;
            let value = invariant_at(ctx, table, cls.label, &z, prec).map_err(wrap)?;
            Ok(InvariantRow { label: cls.label, representative: cls.representative.clone(), r_vector, value })
        })
        .collect::<Result<_>>()?;
    check_magnitudes(&rows, prec)?;
    Ok(InvariantTable {
        ell: table.ell(),
        level: table.level(),
        prec,
        cyclic_orders: table.cyclic_orders().to_vec(),
        cm_point: z.with_prec(prec),
        rows,
    })
}

/// Result of recomputing an invariant through another ideal and another
/// symplectic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceOutcome {
    pub base: BigComplex,
    pub alternate: BigComplex,
    pub alternate_r_vector: Vec<i64>,
    pub agree: bool,
}

/// Symplectic basis of `N φ(λ)^{-1} O_K` for `E_{ξ m_c}`, obtained by reducing
/// the Gram matrix of `N φ(λ)^{-1} ζ^k`.
pub fn reduced_lattice_basis(
    ctx: &CmContext,
    level: i64,
    lambda: &CycloElem,
    order: PivotOrder,
) -> Result<Vec<CycloElem>> {
    let ell = ctx.ell();
    let scale = ctx.type_norm(lambda).inverse()?.scale(&Rational::from(level));
    let raw: Vec<CycloElem> = (1..ell as i64).map(|k| &scale * &CycloElem::zeta_pow(ell, k)).collect();
    let spec = ctx.polarization(level, &CycloIdeal::new(lambda.clone())?);
    let gram = gram_matrix(&spec, &raw)?;
    let red = symplectic_reduce(&gram.matrix, order)?;
    if !red.is_principal() {
        let divs: Vec<String> = red.divisors.iter().map(ToString::to_string).collect();
        return Err(Error::NotPrincipal(divs.join(", ")));
    }
    let t = &red.transform;
    Ok((0..raw.len())
        .map(|i| {
            raw.iter().enumerate().fold(CycloElem::zero(ell), |acc, (k, b)| &acc + &b.scale(&t[(i, k)]))
        })
        .collect())
}

/// Recomputes `Θ_f(C)` from `alt` via a freshly reduced symplectic basis and
/// compares with the table representative at `prec / 8` digits.
pub fn independence_check(
    ctx: &CmContext,
    table: &RayClassTable,
    label: usize,
    alt: &CycloElem,
    order: PivotOrder,
    prec: u32,
) -> Result<IndependenceOutcome> {
    let cls = table.class(label)?;
    if table.class_of(alt)? != label {
        return Err(Error::NotSameRayClass);
    }
    let level = table.level();
    let wp = big_theta_working_prec(ctx.g(), level, prec);
    let base = siegel_invariant(ctx, table, cls.label, prec)?;
    let basis = reduced_lattice_basis(ctx, level, alt, order)?;
    let z = cm_point_from_basis(ctx, &basis, wp)?;
    let sol = solve_in_basis(&CycloElem::from_i64(ctx.ell(), level), &basis)?;
    let ints = sol.int_coeffs().ok_or(Error::NonIntegralBasis)?;
    let n = level as u32;
    let r: Vec<i64> = ints.iter().map(|c| i64::from(c.mod_u(n))).collect();
    let v = ThetaChar::from_numerators(&r, level)?;
    let alternate = big_theta(&v, level, &z, prec)?;
    let agree = agree_relative(&base, &alternate, prec / 8);
    Ok(IndependenceOutcome { base, alternate, alternate_r_vector: r, agree })
}

/// Elements of the same ray class as the representative of `label`:
/// `λ · u · (1 + N μ)` with `u` a unit and `μ` small integral.
pub fn equivalent_representatives<R: Rng + ?Sized>(
    table: &RayClassTable,
    label: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<CycloElem>> {
    let ell = table.ell();
    let lambda = table.class(label)?.representative.clone();
    let units = unit_generators(ell);
    let inverses: Vec<CycloElem> = units.iter().map(CycloElem::inverse).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut x = lambda.clone();
        for _ in 0..rng.gen_range(0..3) {
            let k = rng.gen_range(0..units.len());
            x = if rng.gen_bool(0.5) { &x * &units[k] } else { &x * &inverses[k] };
        }
        let mu: Vec<i64> = (0..ell as usize - 1).map(|_| rng.gen_range(-1..=1)).collect();
        let nu = &CycloElem::one(ell) + &CycloElem::from_int_coords(ell, &mu)?.scale(&Rational::from(table.level()));
        let cand = &x * &nu;
        if !cand.is_zero() && cand != lambda && !out.contains(&cand) {
            out.push(cand);
        }
    }
    Ok(out)
}

/// A character of the class group, `χ(g_i) = e(k_i / m_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterValue {
    exponents: Vec<Rational>,
}

impl CharacterValue {
    pub fn new(table: &RayClassTable, ks: &[i64]) -> Result<Self> {
        if ks.len() != table.cyclic_orders().len() {
            return Err(Error::BadCharacter);
        }
        let exponents = ks
            .iter()
            .zip(table.cyclic_orders())
            .map(|(&k, &m)| Rational::from((k.rem_euclid(m as i64), m as i64)))
            .collect();
        Ok(CharacterValue { exponents })
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|e| *e == 0)
    }

    pub fn conjugate(&self) -> Self {
        let exponents = self.exponents.iter().map(|e| Rational::from(1 - e).fract_floor(Integer::new()).0).collect();
        CharacterValue { exponents }
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    /// Exact phase `χ(C) = e(phase)` with `phase ∈ [0, 1)`.
    pub fn phase(&self, table: &RayClassTable, label: usize) -> Result<Rational> {
        let cls = table.class(label)?;
        if cls.exponents.len() != self.exponents.len() {
            return Err(Error::BadCharacter);
        }
        let total = cls.exponents.iter().zip(&self.exponents).fold(Rational::new(), |acc, (&a, e)| acc + Rational::from(e * a));
        Ok(total.fract_floor(Integer::new()).0)
    }

    pub fn value(&self, table: &RayClassTable, label: usize, prec: u32) -> Result<BigComplex> {
        Ok(e_of_rational(&self.phase(table, label)?, prec))
    }
}

/// Every character of the class group, trivial character first.
pub fn all_characters(table: &RayClassTable) -> Vec<CharacterValue> {
    let orders = table.cyclic_orders();
    let total: usize = orders.iter().map(|&o| o as usize).product();
    (0..total)
        .map(|mut idx| {
            let ks: Vec<i64> = orders
                .iter()
                .map(|&o| {
                    let k = (idx % o as usize) as i64;
                    idx /= o as usize;
                    k
                })
                .collect();
            CharacterValue::new(table, &ks).expect("matching length")
        })
        .collect()
}

/// `S_f(χ) = Σ_C χ(C) ln |Θ_f(C)|`; `invariants[k]` belongs to label `k + 1`.
pub fn stickelberger_sum(
    table: &RayClassTable,
    invariants: &[BigComplex],
    chi: &CharacterValue,
    prec: u32,
) -> Result<BigComplex> {
    if invariants.len() != table.order() {
        return Err(Error::Dimension(format!("{} invariants for {} classes", invariants.len(), table.order())));
    }
    let mut acc = BigComplex::zero(prec);
    for (k, theta) in invariants.iter().enumerate() {
        if theta.is_zero() {
            return Err(Error::LogOfZero);
        }
        let log_abs: BigReal = theta.with_prec(prec).abs().ln();
        acc = &acc + &chi.value(table, k + 1, prec)?.scale(&log_abs);
    }
    Ok(acc)
}

/// Largest relative defect of `Θ(C_k) = conj Θ(C_k^{-1})` over the table, as `log2`.
pub fn conjugate_symmetry_defect(table: &RayClassTable, invariants: &[BigComplex]) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for cls in table.classes() {
        let inv = table.inverse_label(cls.label)?;
        let d = crate::bigcomplex::log2_rel_diff(&invariants[cls.label - 1], &invariants[inv - 1].conj());
        worst = worst.max(d);
    }
    Ok(worst)
}
