//! Small dense matrices over scalars and over jets.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Row-major square or rectangular matrix of jets sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Jet<S>>,
}

impl<S: Scalar> JetMatrix<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet<S>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        JetMatrix { rows, cols, data }
    }

    pub fn identity(size: usize, dim: usize, order: usize) -> Self {
        Self::from_fn(size, size, |i, j| {
            if i == j {
                Jet::one(dim, order)
            } else {
                Jet::zero(dim, order)
            }
        })
    }

    pub fn constant(values: &[Vec<S>], dim: usize, order: usize) -> Self {
        let rows = values.len();
        let cols = values.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| Jet::constant(dim, order, values[i][j].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Jet<S> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet<S>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn jet_dim(&self) -> usize {
        self.data[0].dim()
    }

    pub fn values(&self) -> Vec<Vec<S>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).constant_term()).collect())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Jet<S>) -> Self {
        self.map(|x| x * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let dim = self.jet_dim();
        let order = self.order().min(other.order());
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Jet::zero(dim, order);
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Jet<S>]) -> Vec<Jet<S>> {
        let dim = self.jet_dim();
        (0..self.rows)
            .map(|i| {
                let mut acc = Jet::zero(dim, self.order().min(v.iter().map(Jet::order).min().unwrap_or(0)));
                for (k, vk) in v.iter().enumerate() {
                    acc = &acc + &(self.get(i, k) * vk);
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Jet<S> {
        let mut acc = Jet::zero(self.jet_dim(), self.order());
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    /// Inverse by Newton iteration `X <- X + X (I - A X)` from the inverse of the value matrix.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::RankMismatch("inverse of a non-square matrix".into()));
        }
        let dim = self.jet_dim();
        let order = self.order();
        let v0 = invert_values(&self.values())?;
        let mut x = Self::constant(&v0, dim, order);
        let id = Self::identity(self.rows, dim, order);
        let mut known = 0usize; // x is correct through this degree
        while known < order {
            let residual = id.sub(&self.mul(&x));
            x = x.add(&x.mul(&residual));
            known = 2 * known + 1;
        }
        Ok(x)
    }

    /// Determinant by cofactor expansion (intended for n <= 5).
    pub fn determinant(&self) -> Jet<S> {
        fn det<S: Scalar>(m: &JetMatrix<S>, rows: &[usize], cols: &[usize]) -> Jet<S> {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc: Option<Jet<S>> = None;
            for (k, &c) in cols.iter().enumerate() {
                let entry = m.get(rows[0], c);
                if entry.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det(m, &rows[1..], &sub_cols);
                let term = entry * &minor;
                let term = if k % 2 == 0 { term } else { -term };
                acc = Some(match acc {
                    Some(a) => &a + &term,
                    None => term,
                });
            }
            acc.unwrap_or_else(|| Jet::zero(m.jet_dim(), m.order()))
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        det(self, &idx, &idx)
    }
}

/// Gauss-Jordan inverse of a scalar matrix.
pub fn invert_values<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&x, &y| {
                a[x][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&a[y][col].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(Error::NotInvertibleMetric)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        if S::BACKEND == crate::scalar::Backend::Float && p.to_f64().abs() < 1e-300 {
            return Err(Error::NotInvertibleMetric);
        }
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].clone() - f.clone() * a[col][j].clone();
                inv[r][j] = inv[r][j].clone() - f.clone() * inv[col][j].clone();
            }
        }
    }
    Ok(inv)
}

/// Inertia `(p, q)` of a symmetric matrix by congruence diagonalization.
/// Entries within `tol` of zero count as zero on the float backend.
pub fn inertia<S: Scalar>(m: &[Vec<S>], tol: f64) -> Result<(usize, usize)> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let (mut p, mut q) = (0, 0);
    for k in 0..n {
        // find a nonzero diagonal pivot among the remaining block
        let diag = (k..n).find(|&i| !a[i][i].is_negligible(tol));
        let piv = match diag {
            Some(i) => i,
            None => {
                // all remaining diagonals vanish: combine rows/cols i and j with a_ij != 0
                let pair = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_negligible(tol));
                let (i, j) = pair.ok_or(Error::NotInvertibleMetric)?;
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] = a[r][i].clone() + v;
                }
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] = a[i][c].clone() + v;
                }
                if a[i][i].is_negligible(tol) {
                    return Err(Error::NotInvertibleMetric);
                }
                i
            }
        };
        a.swap(k, piv);
        for row in a.iter_mut() {
            row.swap(k, piv);
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            p += 1;
        } else {
            q += 1;
        }
        // Schur complement on the trailing block stays symmetric
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone() / d.clone();
            for c in k + 1..n {
                let v = f.clone() * a[k][c].clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    #[test]
    fn inverse_of_jet_matrix() {
        let x: Jet<Q> = Jet::variable(2, 3, 0);
        let one = Jet::one(2, 3);
        let m = JetMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => &one + &x,
            (1, 1) => one.scale(&q(2, 1)),
            (0, 1) | (1, 0) => x.clone(),
            _ => unreachable!(),
        });
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), JetMatrix::identity(2, 2, 3));
    }

    #[test]
    fn inertia_counts() {
        let m = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(-3, 1)]];
        assert_eq!(inertia(&m, 0.0).unwrap(), (1, 1));
        let hyperbolic = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(inertia(&hyperbolic, 0.0).unwrap(), (1, 1));
        let pd = vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(2, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(2, 1)],
        ];
        assert_eq!(inertia(&pd, 0.0).unwrap(), (3, 0));
        let singular = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        assert!(inertia(&singular, 0.0).is_err());
    }
}
