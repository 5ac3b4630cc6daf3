//! Small dense complex linear algebra.
//!
//! Everything here is sized for the 2×2 and 4×4 matrices that show up in
//! two-meson density matrices. The only non-trivial routine is the cyclic
//! complex Jacobi eigensolver; the matrix square root and absolute value are
//! spectral functions built on top of it.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar carried by every matrix entry.
pub type ComplexScalar = Complex64;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues down to this value are treated as round-off and clamped to zero.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix dimension must be at least 1")]
    Empty,
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    BadShape { dim: usize, expected: usize, got: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("eigenvalue {value:e} is below the PSD tolerance -{NEGATIVE_EIGEN_TOL:e}")]
    NegativeEigenvalue { value: f64 },
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

/// Builds a complex scalar, rejecting NaN and infinite components.
pub fn scalar(re: f64, im: f64) -> Result<ComplexScalar> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(LinalgError::NonFinite { row: 0, col: 0 })
    }
}

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(LinalgError::Empty);
        }
        if data.len() != dim * dim {
            return Err(LinalgError::BadShape {
                dim,
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(LinalgError::BadShape {
                dim,
                expected: dim * dim,
                got: data.len(),
            });
        }
        Self::from_vec(dim, data)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    /// Real diagonal matrix.
    pub fn from_diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.dim + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise `|H[i][j] - conj(H[j][i])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(H + H^dagger) / 2`, provided the input is Hermitian within [`HERMITIAN_TOL`].
    pub fn hermitian_part(&self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { defect });
        }
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            out.data[i * n + i] = Complex64::new(self.data[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                out.data[i * n + j] = avg;
                out.data[j * n + i] = avg.conj();
            }
        }
        Ok(out)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues sorted descending, with the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V · diag(g(λ)) · V^dagger`.
    pub fn reconstruct_with(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim;
        let mapped: Vec<f64> = self.values.iter().map(|&l| g(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &m) in mapped.iter().enumerate() {
                    if m != 0.0 {
                        acc += self.vectors.get(i, k) * self.vectors.get(j, k).conj() * m;
                    }
                }
                if i == j {
                    acc.im = 0.0;
                }
                out.data[i * n + j] = acc;
                out.data[j * n + i] = acc.conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let mut a = h.hermitian_part()?;
    let n = a.dim;
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    let target = JACOBI_REL_TOL * scale;
    let mut sweeps = 0;
    let sweep = |a: &mut ComplexMatrix, v: &mut ComplexMatrix| {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, v, p, q);
            }
        }
    };
    loop {
        let off = off_diagonal_norm(&a);
        if scale == 0.0 || off == 0.0 {
            break;
        }
        if off <= target {
            // Convergence is quadratic, so one more sweep takes the residual
            // from the stopping threshold down to rounding level.
            sweep(&mut a, &mut v);
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off_norm: off });
        }
        sweep(&mut a, &mut v);
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors.data[row * n + new_col] = v.get(row, old_col);
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.data[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing `a[p][q]`, accumulated into `v`.
///
/// The rotation is `J = Phase · R` where `Phase = diag(1, e^{-iφ})` on (p, q)
/// makes the pivot real and `R` is the classical real rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;

    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J entries on the (p, q) plane.
    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    // A <- A J
    for k in 0..n {
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        a.data[k * n + p] = akp * j_pp + akq * j_qp;
        a.data[k * n + q] = akp * j_pq + akq * j_qq;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = a.data[p * n + k];
        let aqk = a.data[q * n + k];
        a.data[p * n + k] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a.data[q * n + k] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a.data[p * n + q] = Complex64::new(0.0, 0.0);
    a.data[q * n + p] = Complex64::new(0.0, 0.0);
    a.data[p * n + p].im = 0.0;
    a.data[q * n + q].im = 0.0;

    // V <- V J
    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = vkp * j_pp + vkq * j_qp;
        v.data[k * n + q] = vkp * j_pq + vkq * j_qq;
    }
}

/// Round-off floor for a computed spectrum: eigenvalues at or below it carry
/// no information beyond rounding of the largest one.
pub fn spectral_noise_floor(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    4.0 * values.len() as f64 * f64::EPSILON * scale
}

/// Eigenvalues of a PSD matrix with round-off cleaned up: values in
/// `[-1e-10, floor]` become exactly zero, anything more negative is an error.
pub fn clamp_psd_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    let floor = spectral_noise_floor(values);
    values
        .iter()
        .map(|&l| {
            if l < -NEGATIVE_EIGEN_TOL {
                Err(LinalgError::NegativeEigenvalue { value: l })
            } else if l <= floor {
                Ok(0.0)
            } else {
                Ok(l)
            }
        })
        .collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn matrix_sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let clamped = clamp_psd_spectrum(&eig.values)?;
    let eig = EigenDecomposition {
        values: clamped,
        vectors: eig.vectors,
    };
    Ok(eig.reconstruct_with(f64::sqrt))
}

/// `|H| = V · diag(|λ|) · V^dagger`.
pub fn matrix_abs(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(h)?.reconstruct_with(f64::abs))
}
