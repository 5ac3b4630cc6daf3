//! Bures, Hilbert–Schmidt and trace distances.
//!
//! Normalizations:
//!
//! * `D_B(ρ, σ)  = √(1 − F(ρ, σ))` with `F = (Tr √(√σ ρ √σ))²`
//! * `D_HS(ρ, σ) = √(Tr[(ρ − σ)²]) / √2`
//! * `D_tr(ρ, σ) = Tr|ρ − σ| / 2`
//!
//! Bures is `√(1 − F)`, not the `√(2 − 2√F)` convention found elsewhere.
//! With these choices all three distances live in `[0, 1]` and coincide on
//! pairs of pure states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_complex::Complex64;

use crate::linalg::{hermitian_eig, matrix_sqrt_psd, ComplexMatrix, LinalgError};
use crate::states::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DistanceKind {
    #[serde(rename = "bures")]
    Bures,
    #[serde(rename = "hs")]
    HilbertSchmidt,
    #[serde(rename = "trace")]
    Trace,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 3] = [DistanceKind::Bures, DistanceKind::HilbertSchmidt, DistanceKind::Trace];

    /// Stable token used on the command line and in CSV headers.
    pub fn token(self) -> &'static str {
        match self {
            DistanceKind::Bures => "bures",
            DistanceKind::HilbertSchmidt => "hs",
            DistanceKind::Trace => "trace",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistanceKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::UnknownToken {
                what: "metric",
                token: s.to_string(),
            })
    }
}

/// One value per [`DistanceKind`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Distances {
    pub bures: f64,
    pub hs: f64,
    pub trace: f64,
}

impl Distances {
    pub fn get(&self, kind: DistanceKind) -> f64 {
        match kind {
            DistanceKind::Bures => self.bures,
            DistanceKind::HilbertSchmidt => self.hs,
            DistanceKind::Trace => self.trace,
        }
    }

    pub(crate) fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            bures: f(self.bures, other.bures),
            hs: f(self.hs, other.hs),
            trace: f(self.trace, other.trace),
        }
    }
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        }
        .into());
    }
    Ok(())
}

/// Uhlmann fidelity `(Tr √(√σ ρ √σ))²`, clamped into `[0, 1]`.
///
/// `Tr √(√σ ρ √σ)` is the trace norm of `M = √ρ √σ`. It is read off the
/// spectrum of the Hermitian embedding `[[0, M], [M†, 0]]`, whose eigenvalues
/// are `±s_i` for the singular values `s_i` of `M`. Going through `M` instead
/// of squaring it keeps small singular values accurate to rounding of `‖M‖`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let m = matrix_sqrt_psd(rho.matrix())?.matmul(&matrix_sqrt_psd(sigma.matrix())?)?;
    let trace_norm = 0.5 * abs_sum(&hermitian_eig(&hermitian_embedding(&m))?.values);
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

fn hermitian_embedding(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut data = vec![zero; 4 * n * n];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            data[i * 2 * n + (n + j)] = z;
            data[(n + j) * 2 * n + i] = z.conj();
        }
    }
    ComplexMatrix::from_vec(2 * n, data).expect("finite entries")
}

fn abs_sum(values: &[f64]) -> f64 {
    values.iter().map(|l| l.abs()).sum()
}

pub fn bures(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(bures_from_fidelity(fidelity(rho, sigma)?))
}

/// Infidelities at or below this are indistinguishable from rounding in `F`
/// and are reported as exactly zero.
pub const INFIDELITY_ROUNDOFF: f64 = 1e-14;

fn bures_from_fidelity(f: f64) -> f64 {
    let infidelity = 1.0 - f;
    if infidelity <= INFIDELITY_ROUNDOFF {
        0.0
    } else {
        infidelity.sqrt()
    }
}

pub fn hilbert_schmidt(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix().sub(sigma.matrix())?;
    // Tr[(ρ−σ)²] = Σ |d_ij|² for Hermitian d.
    let sq: f64 = diff.as_slice().iter().map(|z| z.norm_sqr()).sum();
    Ok((sq / 2.0).sqrt())
}

pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let diff = rho.matrix().sub(sigma.matrix())?;
    let eig = hermitian_eig(&diff)?;
    Ok(half_abs_sum(&eig.values))
}

fn half_abs_sum(values: &[f64]) -> f64 {
    (0.5 * abs_sum(values)).clamp(0.0, 1.0)
}

pub fn distance(kind: DistanceKind, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    match kind {
        DistanceKind::Bures => bures(rho, sigma),
        DistanceKind::HilbertSchmidt => hilbert_schmidt(rho, sigma),
        DistanceKind::Trace => trace_distance(rho, sigma),
    }
}

/// All three distances in one pass.
pub fn all_distances(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Distances> {
    Ok(Distances {
        bures: bures(rho, sigma)?,
        hs: hilbert_schmidt(rho, sigma)?,
        trace: trace_distance(rho, sigma)?,
    })
}
