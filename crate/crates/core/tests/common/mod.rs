#![allow(dead_code)]

use mesodist::linalg::ComplexMatrix;
use mesodist::DensityMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut TestRng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_matrix(rng: &mut TestRng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| Complex64::new(gauss(rng), gauss(rng))).collect();
    ComplexMatrix::from_vec(n, data).unwrap()
}

pub fn random_hermitian(rng: &mut TestRng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n);
    a.add(&a.adjoint()).unwrap().scale(0.5)
}

/// `A†A / Tr(A†A)` for Gaussian `A`; full rank with probability one.
pub fn random_density(rng: &mut TestRng, n: usize) -> DensityMatrix {
    let a = random_matrix(rng, n);
    let p = a.adjoint().matmul(&a).unwrap();
    let tr = p.trace().re;
    DensityMatrix::new(p.scale(1.0 / tr)).unwrap()
}

pub fn random_pure_vector(rng: &mut TestRng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(gauss(rng), gauss(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn projector(v: &[Complex64]) -> DensityMatrix {
    let n = v.len();
    let data = (0..n * n).map(|k| v[k / n] * v[k % n].conj()).collect();
    DensityMatrix::new(ComplexMatrix::from_vec(n, data).unwrap()).unwrap()
}

pub fn random_pure(rng: &mut TestRng, n: usize) -> DensityMatrix {
    projector(&random_pure_vector(rng, n))
}

/// Product of elementary complex rotations acting on random coordinate planes.
pub fn random_unitary(rng: &mut TestRng, n: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(n);
    for _ in 0..3 * n * n {
        let p = rng.gen_range(0..n);
        let mut q = rng.gen_range(0..n);
        while q == p {
            q = rng.gen_range(0..n);
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let chi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut g = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            g[i * n + i] = Complex64::new(1.0, 0.0);
        }
        let (c, s) = (theta.cos(), theta.sin());
        g[p * n + p] = Complex64::from_polar(c, chi);
        g[p * n + q] = Complex64::from_polar(s, phi);
        g[q * n + p] = -Complex64::from_polar(s, -phi);
        g[q * n + q] = Complex64::from_polar(c, -chi);
        u = u.matmul(&ComplexMatrix::from_vec(n, g).unwrap()).unwrap();
    }
    u
}

pub fn conjugate(u: &ComplexMatrix, rho: &DensityMatrix) -> DensityMatrix {
    let m = u.matmul(rho.matrix()).unwrap().matmul(&u.adjoint()).unwrap();
    DensityMatrix::new(m).unwrap()
}
