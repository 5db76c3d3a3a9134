//! Spectra of small real operators at the origin and their extension to jets.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::jet::{monomials, Jet};
use crate::tensor::JetMatrix;

/// Relative eigenvalue gap below which a spectrum counts as non-simple.
pub const SIMPLICITY_THRESHOLD: f64 = 1e-6;

/// Eigen-decomposition of a real square matrix.
///
/// Eigenvalues are sorted by real part, then imaginary part. Each eigenvector has
/// unit norm and its largest-magnitude coordinate is real and positive.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub matrix: DMatrix<f64>,
    pub eigenvalues: Vec<Complex<f64>>,
    pub eigenvectors: Vec<DVector<Complex<f64>>>,
    pub min_gap: f64,
}

impl SpectralData {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        let mut eigenvalues: Vec<Complex<f64>> = if matrix == matrix.transpose() {
            matrix.clone().symmetric_eigenvalues().iter().map(|&v| Complex::new(v, 0.0)).collect()
        } else {
            matrix.complex_eigenvalues().iter().copied().collect()
        };
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mc = matrix.map(|v| Complex::new(v, 0.0));
        let eigenvectors = eigenvalues
            .iter()
            .map(|&mu| {
                let shifted = &mc - DMatrix::from_diagonal_element(n, n, mu);
                let svd = shifted.svd(false, true);
                let v_t = svd.v_t.expect("requested");
                let k = svd.singular_values.imin();
                let v: DVector<Complex<f64>> = v_t.row(k).adjoint();
                lock_phase(v)
            })
            .collect();
        let mut min_gap = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                min_gap = min_gap.min((eigenvalues[i] - eigenvalues[j]).norm());
            }
        }
        SpectralData {
            matrix,
            eigenvalues,
            eigenvectors,
            min_gap,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_simple(&self) -> bool {
        self.min_gap > SIMPLICITY_THRESHOLD * self.spectral_radius()
    }

    pub fn require_simple(&self) -> Result<()> {
        if self.is_simple() {
            Ok(())
        } else {
            Err(Error::NonSimpleSpectrum(format!(
                "minimal eigenvalue gap {:.3e} at spectral radius {:.3e}",
                self.min_gap,
                self.spectral_radius()
            )))
        }
    }

    pub fn is_real(&self) -> bool {
        let tol = 1e-9 * self.spectral_radius().max(1.0);
        self.eigenvalues.iter().all(|v| v.im.abs() <= tol)
    }

    /// Real eigenpair `i`; fails when the eigenvalue is not real.
    pub fn real_pair(&self, i: usize) -> Result<(f64, DVector<f64>)> {
        let tol = 1e-9 * self.spectral_radius().max(1.0);
        let mu = self.eigenvalues[i];
        if mu.im.abs() > tol {
            return Err(Error::DegenerateStructure(format!("eigenvalue {mu} is not real")));
        }
        Ok((mu.re, self.eigenvectors[i].map(|c| c.re)))
    }

    /// `max_i ‖M v_i − λ_i v_i‖`.
    pub fn residual(&self) -> f64 {
        let mc = self.matrix.map(|v| Complex::new(v, 0.0));
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(mu, v)| (&mc * v - v * *mu).norm())
            .fold(0.0, f64::max)
    }

    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|v| v.re).collect()
    }
}

fn lock_phase(v: DVector<Complex<f64>>) -> DVector<Complex<f64>> {
    let k = v.iter().enumerate().fold(0, |best, (i, c)| if c.norm() > v[best].norm() + 1e-12 { i } else { best });
    let phase = v[k].conj() / v[k].norm();
    let v = v * phase;
    let norm = v.norm();
    v / Complex::new(norm, 0.0)
}

/// Values at the origin.
pub fn value_matrix(m: &JetMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).constant_term())
}

/// Constant jet matrix with the given values.
pub fn constant_matrix(v: &DMatrix<f64>, dim: usize, order: usize) -> JetMatrix<f64> {
    JetMatrix::from_fn(v.nrows(), v.ncols(), |i, j| Jet::constant(dim, order, v[(i, j)]))
}

/// Jet of a simple real eigenpair of `m` through `m`'s order.
///
/// Solves `(M − μ)v = 0` degree by degree from `(μ₀, v₀)` with the normalization
/// `⟨v₀, v⟩ = 1`, so each degree is a bordered linear system with the same matrix.
pub fn eigen_jet(m: &JetMatrix<f64>, mu0: f64, v0: &DVector<f64>) -> Result<(Jet<f64>, Vec<Jet<f64>>)> {
    let n = m.rows();
    let dim = m.jet_dim();
    let order = m.order();
    let v0 = v0 / v0.norm();
    let m0 = value_matrix(m);
    let mut bordered = DMatrix::zeros(n + 1, n + 1);
    bordered
        .view_mut((0, 0), (n, n))
        .copy_from(&(m0 - DMatrix::from_diagonal_element(n, n, mu0)));
    for i in 0..n {
        bordered[(i, n)] = -v0[i];
        bordered[(n, i)] = v0[i];
    }
    let lu = bordered.lu();
    if !lu.is_invertible() {
        return Err(Error::NonSimpleSpectrum(format!("eigenvalue {mu0} is not simple")));
    }
    let mut mu = Jet::constant(dim, order, mu0);
    let mut v: Vec<Jet<f64>> = v0.iter().map(|&c| Jet::constant(dim, order, c)).collect();
    for d in 1..=order {
        let mv = m.mul_vec(&v);
        let r: Vec<Jet<f64>> = (0..n).map(|i| (&mv[i] - &(&mu * &v[i])).homogeneous_part(d)).collect();
        for alpha in monomials(dim, d) {
            let rhs = DVector::from_fn(n + 1, |i, _| if i < n { -r[i].coeff(&alpha) } else { 0.0 });
            if rhs.iter().all(|c| *c == 0.0) {
                continue;
            }
            let sol = lu.solve(&rhs).ok_or_else(|| Error::NonSimpleSpectrum("singular bordered system".into()))?;
            for i in 0..n {
                if sol[i] != 0.0 {
                    v[i] = &v[i] + &Jet::monomial(dim, order, alpha, sol[i]);
                }
            }
            mu = &mu + &Jet::monomial(dim, order, alpha, sol[n]);
        }
    }
    Ok((mu, v))
}

/// Numerical rank from singular values, relative threshold `rel · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_spectrum_and_residual() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, -1.0]);
        let s = SpectralData::new(m);
        let ev = s.real_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12 && (ev[2] - 3.0).abs() < 1e-12);
        assert!(s.residual() < 1e-12);
        assert!(s.is_simple());
    }

    #[test]
    fn rotation_has_complex_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let s = SpectralData::new(m);
        assert!(!s.is_real());
        assert!((s.eigenvalues[0].im + 1.0).abs() < 1e-12);
        assert!(s.residual() < 1e-12);
    }

    #[test]
    fn eigen_jet_of_diagonal_family() {
        // diag(x, 1 + y) : eigenvalue near 0 is x
        let x = Jet::<f64>::variable(2, 3, 0);
        let y = Jet::<f64>::variable(2, 3, 1);
        let z = Jet::zero(2, 3);
        let m = JetMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => x.clone(),
            (1, 1) => y.add_constant(&1.0),
            (0, 1) => (&x * &y).scale(&0.5),
            (1, 0) => (&x * &y).scale(&0.5),
            _ => z.clone(),
        });
        let (mu, v) = eigen_jet(&m, 0.0, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let mv = m.mul_vec(&v);
        for i in 0..2 {
            assert!((&mv[i] - &(&mu * &v[i])).is_negligible(1e-12));
        }
        assert!((mu.coeff(&crate::jet::MultiIndex::unit(0)) - 1.0).abs() < 1e-12);
    }
}
