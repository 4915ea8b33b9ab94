//! Dense matrices over the weight-polynomial ring.

use std::fmt;

use num_bigint::BigInt;

use crate::poly::WeightPoly;

#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    data: Vec<WeightPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            nvars,
            data: vec![WeightPoly::zero(nvars); rows * cols],
        }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, WeightPoly::one(nvars));
        }
        m
    }

    pub fn from_ints(entries: &[Vec<i64>], nvars: usize) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows, cols, nvars);
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set(i, j, WeightPoly::constant(nvars, v));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &WeightPoly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: WeightPoly) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &WeightPoly) {
        let cur = &self.data[i * self.cols + j];
        self.data[i * self.cols + j] = cur + v;
    }

    pub fn row(&self, i: usize) -> &[WeightPoly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = Self::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    /// `I - t M` for square `M`.
    pub fn one_minus_t(&self) -> PolyMatrix {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let mut out = Self::identity(self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if !e.is_zero() {
                    let cur = out.get(i, j).clone();
                    out.set(i, j, &cur - &e.mul_t_pow(1));
                }
            }
        }
        out
    }

    /// First entry where the matrices differ, in row-major order.
    pub fn first_difference(&self, other: &PolyMatrix) -> Option<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        (0..self.rows * self.cols)
            .find(|&k| self.data[k] != other.data[k])
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn merge_weights(&self, map: &[usize], nvars: usize) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            data: self.data.iter().map(|p| p.merge_weights(map, nvars)).collect(),
        }
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        (0..self.rows).all(|i| self.get(i, j).is_zero())
    }

    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn det(&self) -> WeightPoly {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 0 {
            return WeightPoly::one(self.nvars);
        }
        let mut m: Vec<Vec<WeightPoly>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut negate = false;
        let mut prev = WeightPoly::one(self.nvars);
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        negate = !negate;
                    }
                    None => return WeightPoly::zero(self.nvars),
                }
            }
            let (top, bottom) = m.split_at_mut(k + 1);
            let pivot_row = &top[k];
            let pivot = &pivot_row[k];
            for row in bottom.iter_mut() {
                let lead = std::mem::replace(&mut row[k], WeightPoly::zero(self.nvars));
                for j in k + 1..n {
                    let mut v = pivot * &row[j];
                    if !lead.is_zero() && !pivot_row[j].is_zero() {
                        v = &v - &(&lead * &pivot_row[j]);
                    }
                    row[j] = if prev.is_one() {
                        v
                    } else {
                        v.exact_div(&prev)
                            .expect("Bareiss step must divide exactly")
                    };
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            -&d
        } else {
            d
        }
    }

    pub fn format_with(&self, names: &[String]) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|p| p.format_with(names)).collect();
            out.push_str(&format!("[{}]\n", row.join(", ")));
        }
        out
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("w{i}")).collect();
        write!(f, "PolyMatrix {}x{}\n{}", self.rows, self.cols, self.format_with(&names))
    }
}

/// `det(I - t M)`.
pub fn char_poly(m: &PolyMatrix) -> WeightPoly {
    m.one_minus_t().det()
}

/// Integer-valued view of a matrix whose entries are constants.
pub fn constant_entries(m: &PolyMatrix) -> Option<Vec<Vec<BigInt>>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|p| {
                    if p.is_zero() {
                        Some(BigInt::from(0))
                    } else if p.len() == 1 && p.terms().next().unwrap().0.is_one() {
                        Some(p.constant_term())
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}
