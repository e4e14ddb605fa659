//! Dense Hermitian linear algebra: eigendecomposition, operator norm,
//! spectral projectors and the sign decomposition `V = V+ - V-`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_REL_TOL: f64 = 1e-12;
const EIGH_MAX_SWEEPS_PER_DIM: usize = 200;

/// A dense square complex Hermitian matrix.
///
/// Construction checks the Hermitian property to a relative tolerance and
/// then stores the exactly Hermitian part `(M + M*) / 2`, so downstream code
/// never sees round-off asymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 {
            return Err(Error::InvalidShape { rows, cols });
        }
        let max_abs = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tolerance = HERMITIAN_REL_TOL * (1.0 + max_abs);
        for col in 0..cols {
            for row in 0..=col {
                let deviation = (entries[(row, col)] - entries[(col, row)].conj()).norm();
                if !(deviation <= tolerance) {
                    return Err(Error::NonHermitianInput {
                        row,
                        col,
                        deviation,
                        tolerance,
                    });
                }
            }
        }
        Ok(Self::hermitian_part(entries))
    }

    /// Builds a matrix from row-major real and optional imaginary parts.
    pub fn from_rows(real: &[Vec<f64>], imag: Option<&[Vec<f64>]>) -> Result<Self> {
        let n = real.len();
        if n == 0 {
            return Err(Error::InvalidShape { rows: 0, cols: 0 });
        }
        if let Some(row) = real.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidShape {
                rows: n,
                cols: row.len(),
            });
        }
        if let Some(imag) = imag {
            if imag.len() != n {
                return Err(Error::InvalidShape {
                    rows: imag.len(),
                    cols: n,
                });
            }
            if let Some(row) = imag.iter().find(|r| r.len() != n) {
                return Err(Error::InvalidShape {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        let entries = CMatrix::from_fn(n, n, |i, j| {
            let im = imag.map_or(0.0, |m| m[i][j]);
            Complex64::new(real[i][j], im)
        });
        Self::new(entries)
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Result<Self> {
        let n = diagonal.len();
        if n == 0 {
            return Err(Error::InvalidShape { rows: 0, cols: 0 });
        }
        Ok(Self {
            entries: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(diagonal[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_real_diagonal(&vec![0.0; n])
    }

    /// Wraps a matrix that is Hermitian up to round-off by taking its
    /// Hermitian part. Only for matrices produced by Hermitian-preserving
    /// arithmetic inside the crate.
    pub(crate) fn hermitian_part(mut m: CMatrix) -> Self {
        let n = m.nrows();
        for col in 0..n {
            m[(col, col)] = Complex64::new(m[(col, col)].re, 0.0);
            for row in 0..col {
                let avg = (m[(row, col)] + m[(col, row)].conj()) * 0.5;
                m[(row, col)] = avg;
                m[(col, row)] = avg.conj();
            }
        }
        Self { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_inner(self) -> CMatrix {
        self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(other)?;
        Ok(Self::hermitian_part(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(other)?;
        Ok(Self::hermitian_part(&self.entries - &other.entries))
    }

    /// `self + t * other`.
    pub fn add_scaled(&self, other: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
        self.check_dim(other)?;
        Ok(Self::hermitian_part(
            &self.entries + other.entries.map(|z| z * t),
        ))
    }

    pub fn scaled(&self, t: f64) -> HermitianMatrix {
        Self::hermitian_part(self.entries.map(|z| z * t))
    }

    fn check_dim(&self, other: &HermitianMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Eigenvalues in ascending order with their orthonormal eigenvectors
/// (column `k` of `eigenvectors` belongs to `eigenvalues[k]`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue modulus, i.e. the operator norm of the matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Rebuilds `sum_k f(lambda_k) u_k u_k*`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let weight = f(lambda);
            if weight == 0.0 {
                continue;
            }
            let u = self.eigenvectors.column(k);
            out += (u * u.adjoint()).map(|z| z * weight);
        }
        HermitianMatrix::hermitian_part(out)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let max_iterations = EIGH_MAX_SWEEPS_PER_DIM * n.max(1);
    let eig = SymmetricEigen::try_new(h.entries.clone(), f64::EPSILON, max_iterations)
        .ok_or(Error::ConvergenceFailure { max_iterations })?;

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: ties keep the solver's order.
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral norm of a Hermitian matrix (largest eigenvalue modulus).
pub fn operator_norm(h: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(h)?.spectral_radius())
}

/// A Hermitian matrix together with its positive and negative spectral parts.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSplit {
    pub v: HermitianMatrix,
    pub v_plus: HermitianMatrix,
    pub v_minus: HermitianMatrix,
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub norm_v: f64,
}

impl PerturbationSplit {
    /// `|V+| + |V-|`, the quantity every bound is phrased in.
    pub fn norm_sum(&self) -> f64 {
        self.norm_plus + self.norm_minus
    }
}

/// Splits `V` into `V+ = (1 + sign V) V / 2` and `V- = (sign V - 1) V / 2`.
///
/// Eigenvalues with modulus at most `1e-12 (1 + |V|)` contribute to neither
/// part.
pub fn sign_split(v: &HermitianMatrix) -> Result<PerturbationSplit> {
    let decomp = eigh(v)?;
    let norm_v = decomp.spectral_radius();
    let zero_tol = 1e-12 * (1.0 + norm_v);

    let v_plus = decomp.apply_function(|l| if l > zero_tol { l } else { 0.0 });
    let v_minus = decomp.apply_function(|l| if l < -zero_tol { -l } else { 0.0 });
    let norm_plus = decomp
        .eigenvalues
        .iter()
        .filter(|&&l| l > zero_tol)
        .fold(0.0, |m, &l| f64::max(m, l));
    let norm_minus = decomp
        .eigenvalues
        .iter()
        .filter(|&&l| l < -zero_tol)
        .fold(0.0, |m, &l| f64::max(m, -l));

    Ok(PerturbationSplit {
        v: v.clone(),
        v_plus,
        v_minus,
        norm_plus,
        norm_minus,
        norm_v,
    })
}

/// An orthogonal projection matrix with its rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub matrix: CMatrix,
    pub rank: usize,
}

impl Projector {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `P - Q` as a Hermitian matrix.
    pub fn difference(&self, other: &Projector) -> Result<HermitianMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(HermitianMatrix::hermitian_part(&self.matrix - &other.matrix))
    }
}

/// `P = sum_{k in indices} u_k u_k*`. Repeated indices count once.
pub fn spectral_projector(decomp: &SpectralDecomposition, indices: &[usize]) -> Result<Projector> {
    let n = decomp.dim();
    let set: BTreeSet<usize> = indices.iter().copied().collect();
    if let Some(&index) = set.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index, dim: n });
    }
    let mut matrix = CMatrix::zeros(n, n);
    for &k in &set {
        let u = decomp.eigenvectors.column(k);
        matrix += u * u.adjoint();
    }
    Ok(Projector {
        matrix: HermitianMatrix::hermitian_part(matrix).into_inner(),
        rank: set.len(),
    })
}

/// Largest entry modulus of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sharp_pair(vp: f64, vm: f64) -> (HermitianMatrix, HermitianMatrix) {
        let v = vp + vm;
        let off = v * (1.0 - v * v).sqrt() / 2.0;
        let a = HermitianMatrix::from_real_diagonal(&[0.5, -0.5]).unwrap();
        let pert = HermitianMatrix::from_rows(
            &[
                vec![(vp - vm - v * v) / 2.0, off],
                vec![off, (v * v + vp - vm) / 2.0],
            ],
            None,
        )
        .unwrap();
        (a, pert)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NonHermitianInput { row: 0, col: 1, .. })
        ));
        let m = CMatrix::from_row_slice(1, 1, &[c(1.0, 0.5)]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NonHermitianInput { .. })
        ));
        assert!(matches!(
            HermitianMatrix::new(CMatrix::zeros(0, 0)),
            Err(Error::InvalidShape { .. })
        ));
        assert!(matches!(
            HermitianMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::InvalidShape { .. })
        ));
    }

    #[test]
    fn accepts_roundoff_asymmetry_and_symmetrizes() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 1e-14), c(2.0, 1.0), c(2.0 + 1e-14, -1.0), c(1.0, 0.0)],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.entries()[(0, 0)].im, 0.0);
        assert_eq!(h.entries()[(0, 1)], h.entries()[(1, 0)].conj());
    }

    #[test]
    fn eigh_diagonal() {
        let h = HermitianMatrix::from_real_diagonal(&[0.5, -0.5]).unwrap();
        let d = eigh(&h).unwrap();
        assert_eq!(d.eigenvalues, vec![-0.5, 0.5]);
        assert!(close(d.eigenvectors[(1, 0)].norm(), 1.0, 1e-15));
        assert!(close(d.eigenvectors[(0, 1)].norm(), 1.0, 1e-15));
    }

    #[test]
    fn eigh_swap_matrix() {
        let h = HermitianMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], None).unwrap();
        let d = eigh(&h).unwrap();
        assert!(close(d.eigenvalues[0], -1.0, 1e-14));
        assert!(close(d.eigenvalues[1], 1.0, 1e-14));
    }

    #[test]
    fn eigh_sharp_example() {
        let (a, v) = sharp_pair(0.25, 0.25);
        let d = eigh(&a.add(&v).unwrap()).unwrap();
        let r = 3f64.sqrt() / 4.0;
        assert!(close(d.eigenvalues[0], -r, 1e-14));
        assert!(close(d.eigenvalues[1], r, 1e-14));
    }

    #[test]
    fn eigh_complex_residual() {
        let h = HermitianMatrix::from_rows(
            &[
                vec![2.0, 1.0, 0.0],
                vec![1.0, -1.0, 0.5],
                vec![0.0, 0.5, 3.0],
            ],
            Some(&[
                vec![0.0, 0.5, -2.0],
                vec![-0.5, 0.0, 1.0],
                vec![2.0, -1.0, 0.0],
            ]),
        )
        .unwrap();
        let d = eigh(&h).unwrap();
        let norm = d.spectral_radius();
        for k in 0..3 {
            let u = d.eigenvectors.column(k);
            let r = h.entries() * u - u.map(|z| z * d.eigenvalues[k]);
            assert!(r.norm() <= 1e-10 * (1.0 + norm));
        }
        let gram = d.eigenvectors.adjoint() * &d.eigenvectors;
        assert!(max_abs(&(gram - CMatrix::identity(3, 3))) <= 1e-10);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&HermitianMatrix::zeros(3).unwrap()).unwrap(), 0.0);
        let h = HermitianMatrix::from_real_diagonal(&[-3.0, 2.0]).unwrap();
        assert_eq!(operator_norm(&h).unwrap(), 3.0);
        let (_, v) = sharp_pair(0.3, 0.2);
        assert!(close(operator_norm(&v).unwrap(), 0.3, 1e-14));
    }

    #[test]
    fn sign_split_diagonal() {
        let v = HermitianMatrix::from_real_diagonal(&[2.0, -1.0]).unwrap();
        let s = sign_split(&v).unwrap();
        assert_eq!(s.norm_plus, 2.0);
        assert_eq!(s.norm_minus, 1.0);
        assert_eq!(s.v_plus, HermitianMatrix::from_real_diagonal(&[2.0, 0.0]).unwrap());
        assert_eq!(s.v_minus, HermitianMatrix::from_real_diagonal(&[0.0, 1.0]).unwrap());
    }

    #[test]
    fn sign_split_semidefinite() {
        let v = HermitianMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], None).unwrap();
        let s = sign_split(&v).unwrap();
        assert_eq!(s.norm_minus, 0.0);
        assert!(max_abs(s.v_minus.entries()) == 0.0);
        assert!(close(s.norm_plus, 2.0, 1e-14));
    }

    #[test]
    fn sign_split_sharp_example() {
        let (_, v) = sharp_pair(0.3, 0.2);
        let s = sign_split(&v).unwrap();
        assert!(close(s.norm_plus, 0.3, 1e-14));
        assert!(close(s.norm_minus, 0.2, 1e-14));
    }

    #[test]
    fn sign_split_zero_eigenvalue_goes_nowhere() {
        let v = HermitianMatrix::from_real_diagonal(&[0.0, 1e-14, -1.0]).unwrap();
        let s = sign_split(&v).unwrap();
        assert_eq!(s.v_plus, HermitianMatrix::zeros(3).unwrap());
        assert_eq!(s.norm_plus, 0.0);
        assert_eq!(s.norm_minus, 1.0);
    }

    #[test]
    fn projector_examples() {
        let a = HermitianMatrix::from_real_diagonal(&[0.5, -0.5]).unwrap();
        let d = eigh(&a).unwrap();
        let empty = spectral_projector(&d, &[]).unwrap();
        assert_eq!(empty.rank, 0);
        assert_eq!(max_abs(&empty.matrix), 0.0);
        let all = spectral_projector(&d, &[0, 1]).unwrap();
        assert_eq!(all.rank, 2);
        assert!(max_abs(&(all.matrix - CMatrix::identity(2, 2))) < 1e-15);
        // eigenvalue 1/2 sits at index 1 after ascending sort
        let p = spectral_projector(&d, &[1]).unwrap();
        assert!(close(p.matrix[(0, 0)].re, 1.0, 1e-15));
        assert!(close(p.matrix[(1, 1)].re, 0.0, 1e-15));
        assert!(matches!(
            spectral_projector(&d, &[2]),
            Err(Error::IndexOutOfRange { index: 2, dim: 2 })
        ));
    }
}
