//! Small dense complex matrices at arbitrary precision.

use crate::bigcomplex::{BigComplex, BigReal};

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    m: usize,
    data: Vec<BigComplex>,
}

impl CMatrix {
    pub fn zeros(n: usize, m: usize, prec: u32) -> Self {
        CMatrix { n, m, data: vec![BigComplex::zero(prec); n * m] }
    }

    pub fn from_rows(rows: Vec<Vec<BigComplex>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged matrix");
        CMatrix { n, m, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigComplex>]) -> Self {
        let m = cols.len();
        let n = cols.first().map_or(0, Vec::len);
        let mut out = CMatrix { n, m, data: Vec::with_capacity(n * m) };
        for i in 0..n {
            for c in cols {
                out.data.push(c[i].clone());
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigComplex {
        &self.data[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigComplex) {
        self.data[i * self.m + j] = v;
    }

    pub fn prec(&self) -> u32 {
        self.data.iter().map(BigComplex::prec).max().unwrap_or(64)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        CMatrix { n: self.n, m: self.m, data: self.data.iter().map(|z| z.with_prec(prec)).collect() }
    }

    pub fn to_rows(&self) -> Vec<Vec<BigComplex>> {
        (0..self.n).map(|i| self.data[i * self.m..(i + 1) * self.m].to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = CMatrix::zeros(self.m, self.n, self.prec());
        for i in 0..self.n {
            for j in 0..self.m {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.m, rhs.n);
        let p = self.prec().max(rhs.prec());
        let mut out = CMatrix::zeros(self.n, rhs.m, p);
        for i in 0..self.n {
            for j in 0..rhs.m {
                let mut acc = BigComplex::zero(p);
                for k in 0..self.m {
                    acc = &acc + &(self.get(i, k) * rhs.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            m: self.m,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            m: self.m,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> CMatrix {
        CMatrix { n: self.n, m: self.m, data: self.data.iter().map(|a| -a).collect() }
    }

    /// Integer matrix times `self`.
    pub fn left_mul_int(a: &[Vec<i64>], z: &CMatrix) -> CMatrix {
        let p = z.prec();
        let mut out = CMatrix::zeros(a.len(), z.m, p);
        for (i, row) in a.iter().enumerate() {
            for j in 0..z.m {
                let mut acc = BigComplex::zero(p);
                for (k, &c) in row.iter().enumerate() {
                    if c != 0 {
                        acc = &acc + &z.get(k, j).mul_i64(c);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add_int(&self, b: &[Vec<i64>]) -> CMatrix {
        let mut out = self.clone();
        for (i, row) in b.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    let v = self.get(i, j) + &BigComplex::from_i64(c, self.prec());
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Largest absolute row sum, as `log2`.
    pub fn log2_inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let s: f64 = (0..self.m).map(|j| self.get(i, j).log2_abs().exp2()).sum();
                if s > 0.0 && s.is_finite() {
                    s.log2()
                } else {
                    (0..self.m).map(|j| self.get(i, j).log2_abs()).fold(f64::NEG_INFINITY, f64::max)
                        + (self.m as f64).log2()
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` if a pivot vanishes.
    pub fn inverse(&self) -> Option<CMatrix> {
        assert_eq!(self.n, self.m);
        let n = self.n;
        let p = self.prec();
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n, p);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| {
                    a.get(x, col).log2_abs().partial_cmp(&a.get(y, col).log2_abs()).unwrap()
                })
                .unwrap();
            if a.get(piv, col).is_zero() {
                return None;
            }
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let pr = a.get(col, col).recip();
            for j in 0..n {
                a.set(col, j, a.get(col, j) * &pr);
                inv.set(col, j, inv.get(col, j) * &pr);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - &(&f * a.get(col, j)));
                    inv.set(r, j, inv.get(r, j) - &(&f * inv.get(col, j)));
                }
            }
        }
        Some(inv)
    }

    pub fn identity(n: usize, prec: u32) -> CMatrix {
        let mut m = CMatrix::zeros(n, n, prec);
        for i in 0..n {
            m.set(i, i, BigComplex::one(prec));
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.m {
            self.data.swap(a * self.m + j, b * self.m + j);
        }
    }

    /// Entrywise imaginary part.
    pub fn imag_part(&self) -> Vec<Vec<BigReal>> {
        (0..self.n).map(|i| (0..self.m).map(|j| self.get(i, j).im().clone()).collect()).collect()
    }

    /// Largest entry of `|A - A^T|`, as `log2`.
    pub fn log2_asymmetry(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..self.n {
            for j in i + 1..self.m {
                worst = worst.max((self.get(i, j) - self.get(j, i)).log2_abs());
            }
        }
        worst
    }

    /// `(A + A^T) / 2`.
    pub fn symmetrized(&self) -> CMatrix {
        let mut out = self.clone();
        let half = BigReal::from_f64(0.5, self.prec());
        for i in 0..self.n {
            for j in i + 1..self.m {
                let v = (self.get(i, j) + self.get(j, i)).scale(&half);
                out.set(i, j, v.clone());
                out.set(j, i, v);
            }
        }
        out
    }

    /// Largest entry modulus, as `log2`.
    pub fn log2_max_abs(&self) -> f64 {
        self.data.iter().map(BigComplex::log2_abs).fold(f64::NEG_INFINITY, f64::max)
    }
}
