//! Small dense complex linear-algebra helpers shared by the Hamiltonian and
//! density-matrix code. Everything here works on `DMatrix<Complex64>` of
//! dimension at most 6.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |H - H^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    // symmetrize to shave off rounding asymmetry before the solver sees it
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Spectral decomposition of a Hermitian generator, reusable for propagators
/// at many times.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectral {
    pub fn new(h: &CMatrix) -> Self {
        let (values, vectors) = hermitian_eigen(h);
        Self { values, vectors }
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        );
        let scaled = CMatrix::from_columns(
            &self
                .vectors
                .column_iter()
                .zip(phases.iter())
                .map(|(c, p)| c * *p)
                .collect::<Vec<_>>(),
        );
        scaled * self.vectors.adjoint()
    }
}

/// `(1/2) ||a - b||_1` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(&(a - b));
    0.5 * values.iter().map(|v| v.abs()).sum::<f64>()
}

/// `max |U U^dagger - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_abs(&(u * u.adjoint() - identity(u.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_is_sorted() {
        let m = diag_real(&[3.0, -1.0, 2.0]);
        let (vals, _) = hermitian_eigen(&m);
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn propagator_of_pauli_y_matches_rotation() {
        // exp(-i theta sigma_y / 2)
        let sy = CMatrix::from_row_slice(
            2,
            2,
            &[ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO],
        );
        let theta = 0.7;
        let u = Spectral::new(&sy.scale(0.5)).propagator(theta);
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        assert!((u[(0, 0)].re - c).abs() < 1e-14);
        assert!((u[(0, 1)].re + s).abs() < 1e-14);
        assert!((u[(1, 0)].re - s).abs() < 1e-14);
        assert!(unitarity_defect(&u) < 1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let a = diag_real(&[1.0, 0.0]);
        let b = diag_real(&[0.0, 1.0]);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-15);
    }
}
