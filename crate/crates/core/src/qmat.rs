//! Dense matrices over Q with exact elimination.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use rug::{Integer, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::new(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::from(1);
        }
        m
    }

    /// The standard alternating matrix `[[0, -I], [I, 0]]` of size `2g`.
    pub fn standard_j(g: usize) -> Self {
        QMatrix::block_form(&vec![Rational::from(1); g])
    }

    /// `[[0, -E], [E, 0]]` with `E = diag(divisors)`.
    pub fn block_form(divisors: &[Rational]) -> Self {
        let g = divisors.len();
        let mut m = QMatrix::zeros(2 * g, 2 * g);
        for (i, e) in divisors.iter().enumerate() {
            m[(i, g + i)] = Rational::from(-e);
            m[(g + i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        QMatrix::from_rows(
            rows.iter().map(|row| row.iter().map(|&x| Rational::from(x)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self[(i, j)] == Rational::from(-&self[(j, i)]))
            })
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| *x.denom() == 1)
    }

    /// Least common multiple of all denominators.
    pub fn common_denominator(&self) -> Integer {
        self.data.iter().fold(Integer::from(1), |acc, x| acc.lcm(x.denom()))
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rational::from(x * k)).collect(),
        }
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::from(1);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[(r, col)] != 0) else {
                return Rational::new();
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            for r in col + 1..n {
                if a[(r, col)] == 0 {
                    continue;
                }
                let f = Rational::from(&a[(r, col)] / &p);
                for c in col..n {
                    let t = Rational::from(&f * &a[(col, c)]);
                    a[(r, c)] -= t;
                }
            }
        }
        det
    }

    /// Solves `self * x = b`; `None` when the matrix is singular.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert!(self.is_square() && b.len() == self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[(r, col)] != 0)?;
            if piv != col {
                a.swap_rows(piv, col);
                rhs.swap(piv, col);
            }
            let p = a[(col, col)].clone();
            for r in 0..n {
                if r == col || a[(r, col)] == 0 {
                    continue;
                }
                let f = Rational::from(&a[(r, col)] / &p);
                for c in col..n {
                    let t = Rational::from(&f * &a[(col, c)]);
                    a[(r, c)] -= t;
                }
                let t = Rational::from(&f * &rhs[col]);
                rhs[r] -= t;
            }
        }
        Some((0..n).map(|i| Rational::from(&rhs[i] / &a[(i, i)])).collect())
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        let mut inv = QMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Rational::new(); n];
            e[j] = Rational::from(1);
            let col = self.solve(&e)?;
            for (i, x) in col.into_iter().enumerate() {
                inv[(i, j)] = x;
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::new();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += Rational::from(a * b);
                }
                acc
            })
            .collect()
    }

    /// Row permutation `P * self` where row `i` of the result is row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        QMatrix::from_rows(perm.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&QMatrix> for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if *a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = Rational::from(a * &rhs[(k, j)]);
                    out[(i, j)] += t;
                }
            }
        }
        out
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
