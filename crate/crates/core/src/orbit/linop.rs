//! Exact rational matrices: rank by fraction-free elimination, kernels by Gauss-Jordan.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Q;

/// Sparse exact linear operator `Q^cols -> Q^rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOpQ {
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<usize, Q>>,
    pub row_labels: Option<Vec<String>>,
    pub col_labels: Option<Vec<String>>,
}

impl LinOpQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinOpQ {
            rows,
            cols,
            entries: vec![BTreeMap::new(); rows],
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn from_dense(m: &[Vec<Q>]) -> Self {
        let cols = m.first().map_or(0, Vec::len);
        let mut op = Self::zeros(m.len(), cols);
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                op.set(i, j, v.clone());
            }
        }
        op
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.entries[i].get(&j).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.entries[i].remove(&j);
        } else {
            self.entries[i].insert(j, v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Q) {
        if v.is_zero() {
            return;
        }
        let e = self.entries[i].entry(j).or_insert_with(Q::zero);
        *e += v;
        if e.is_zero() {
            self.entries[i].remove(&j);
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(BTreeMap::len).sum()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Q)> {
        self.entries[i].iter().map(|(j, v)| (*j, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row {
                t.entries[*j].insert(i, v.clone());
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinOpQ) -> Self {
        assert_eq!(self.cols, other.rows, "operator shapes do not compose");
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (k, a) in row {
                for (j, b) in &other.entries[*k] {
                    out.add_to(i, j.to_owned(), &(a * b));
                }
            }
        }
        out.row_labels = self.row_labels.clone();
        out.col_labels = other.col_labels.clone();
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.entries
            .iter()
            .map(|row| row.iter().fold(Q::zero(), |acc, (j, a)| acc + a * &v[*j]))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Exact rank. Eliminates along the shorter dimension.
    pub fn rank(&self) -> usize {
        let m = if self.rows <= self.cols { self.clone() } else { self.transpose() };
        let mut ech = Echelon::new();
        for row in &m.entries {
            ech.insert(integer_row(row));
        }
        ech.rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the kernel from the reduced row echelon form.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (rref, pivots) = rref(self.to_dense(), self.cols);
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -rref[r][free].clone();
            }
            basis.push(v);
        }
        basis
    }
}

/// Row scaled to coprime integers.
fn integer_row(row: &BTreeMap<usize, Q>) -> Vec<(usize, BigInt)> {
    let l = row.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut out: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(j, v)| (*j, v.numer() * (&l / v.denom())))
        .collect();
    remove_content(&mut out);
    out
}

fn remove_content(row: &mut [(usize, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v /= &g;
    }
}

/// Incremental integer echelon form keyed by pivot column.
#[derive(Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, Vec<(usize, BigInt)>>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots; keeps it if independent. Returns whether it was.
    pub fn insert(&mut self, mut row: Vec<(usize, BigInt)>) -> bool {
        while let Some((lead, a)) = row.first().cloned() {
            let Some(p) = self.pivots.get(&lead) else {
                if a.is_negative() {
                    for (_, v) in row.iter_mut() {
                        *v = -&*v;
                    }
                }
                self.pivots.insert(lead, row);
                return true;
            };
            // row <- (b/g) row - (a/g) p, with b the pivot entry
            let b = &p[0].1;
            let g = a.gcd(b);
            let fr = b / &g;
            let fp = &a / &g;
            let mut out = Vec::with_capacity(row.len() + p.len());
            let (mut i, mut j) = (1, 1);
            while i < row.len() || j < p.len() {
                let ci = row.get(i).map_or(usize::MAX, |e| e.0);
                let cj = p.get(j).map_or(usize::MAX, |e| e.0);
                let (c, v) = if ci < cj {
                    i += 1;
                    (ci, &row[i - 1].1 * &fr)
                } else if cj < ci {
                    j += 1;
                    (cj, -(&p[j - 1].1 * &fp))
                } else {
                    i += 1;
                    j += 1;
                    (ci, &row[i - 1].1 * &fr - &p[j - 1].1 * &fp)
                };
                if !v.is_zero() {
                    out.push((c, v));
                }
            }
            remove_content(&mut out);
            row = out;
        }
        false
    }
}

/// The Mersenne prime `2^61 − 1`.
pub const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(MODULUS)) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_mod(v: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    let r = v.mod_floor(&m);
    r.iter_u64_digits().next().unwrap_or(0)
}

/// Rank of integer rows modulo [`MODULUS`]. It never exceeds the rank over Q,
/// and equals it whenever it reaches the number of rows.
pub fn rank_mod_p(rows: &[Vec<(usize, BigInt)>]) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    for r in rows {
        let mut row: Vec<(usize, u64)> = r
            .iter()
            .map(|(c, v)| (*c, reduce_mod(v)))
            .filter(|e| e.1 != 0)
            .collect();
        while let Some(&(lead, a)) = row.first() {
            let Some(p) = pivots.get(&lead) else {
                let inv = pow_mod(a, MODULUS - 2);
                for e in row.iter_mut() {
                    e.1 = mul_mod(e.1, inv);
                }
                pivots.insert(lead, row);
                break;
            };
            // row <- row - a p, with p normalized to a unit pivot
            let mut out = Vec::with_capacity(row.len() + p.len());
            let (mut i, mut j) = (1, 1);
            while i < row.len() || j < p.len() {
                let ci = row.get(i).map_or(usize::MAX, |e| e.0);
                let cj = p.get(j).map_or(usize::MAX, |e| e.0);
                let (c, v) = if ci < cj {
                    i += 1;
                    (ci, row[i - 1].1)
                } else if cj < ci {
                    j += 1;
                    (cj, MODULUS - mul_mod(a, p[j - 1].1))
                } else {
                    i += 1;
                    j += 1;
                    (ci, (row[i - 1].1 + MODULUS - mul_mod(a, p[j - 1].1)) % MODULUS)
                };
                if v != 0 && v != MODULUS {
                    out.push((c, v));
                }
            }
            row = out;
        }
    }
    pivots.len()
}

/// Reduced row echelon form over Q. Returns the nonzero rows and their pivot columns.
pub fn rref(mut m: Vec<Vec<Q>>, cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

/// Rank of a set of exact vectors.
pub fn span_rank(vectors: &[Vec<Q>]) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        let row: BTreeMap<usize, Q> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (j, x.clone()))
            .collect();
        ech.insert(integer_row(&row));
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn rank_and_kernel() {
        let m = LinOpQ::from_dense(&[
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1)],
            vec![q(1, 2), q(0, 1), q(1, 3)],
        ]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn hilbert_matrix_full_rank() {
        let n = 8;
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| q(1, (i + j + 1) as i64)).collect())
            .collect();
        assert_eq!(LinOpQ::from_dense(&rows).rank(), n);
        assert_eq!(span_rank(&rows), n);
    }

    #[test]
    fn modular_rank() {
        let rows: Vec<Vec<(usize, BigInt)>> = vec![
            vec![(0, 2.into()), (1, 4.into())],
            vec![(0, (-1).into()), (1, (-2).into())],
            vec![(1, 3.into()), (2, 7.into())],
        ];
        assert_eq!(rank_mod_p(&rows), 2);
        let mut e = Echelon::new();
        for r in rows {
            e.insert(r);
        }
        assert_eq!(e.rank(), 2);
    }
}
