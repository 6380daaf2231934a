//! Independent dense oracle used by the integration tests: operators are
//! rebuilt as explicit Kronecker-product matrices and compared against the
//! engine's mask-based kernels. Nothing here shares code with the paths
//! under test.
//!
//! Each test binary only exercises a subset of these helpers.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbvqe_core::{Axis, PauliString, PauliSum, Statevector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn site_matrix(axis: Option<Axis>) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match axis {
        None => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Some(Axis::X) => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Some(Axis::Y) => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Some(Axis::Z) => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::from_element(ar * br, ac * bc, c(0.0, 0.0));
    for ia in 0..ar {
        for ja in 0..ac {
            for ib in 0..br {
                for jb in 0..bc {
                    out[(ia * br + ib, ja * bc + jb)] = a[(ia, ja)] * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Full matrix of a Pauli string; site 0 is the least significant index bit,
/// so the product runs from the highest site down.
pub fn string_matrix(s: &PauliString) -> DMatrix<Complex64> {
    let n = s.n_qubits();
    let mut acc = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for site in (0..n).rev() {
        let axis = s
            .factors()
            .iter()
            .find(|&&(q, _)| q == site)
            .map(|&(_, a)| a);
        acc = kron(&acc, &site_matrix(axis));
    }
    acc
}

pub fn sum_matrix(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    let mut acc = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for (coeff, s) in h.terms() {
        acc += string_matrix(s) * c(*coeff, 0.0);
    }
    acc
}

/// `exp(-i theta G)` for Hermitian `G`, via eigendecomposition.
pub fn expm_generator(g: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(g.clone());
    let dim = g.nrows();
    let mut d = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for k in 0..dim {
        d[(k, k)] = Complex64::from_polar(1.0, -theta * eig.eigenvalues[k]);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

pub fn to_vector(psi: &Statevector) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(psi.amplitudes())
}

pub fn from_vector(n: usize, v: &nalgebra::DVector<Complex64>) -> Statevector {
    Statevector::from_amplitudes(n, v.as_slice().to_vec()).unwrap()
}

pub fn random_state(n: usize, seed: u64) -> Statevector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Statevector::from_amplitudes(n, amps).unwrap()
}

pub fn random_string(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let factors: Vec<(usize, Axis)> = (0..n)
            .filter_map(|site| match rng.random_range(0..4u8) {
                0 => None,
                1 => Some((site, Axis::X)),
                2 => Some((site, Axis::Y)),
                _ => Some((site, Axis::Z)),
            })
            .collect();
        if !factors.is_empty() {
            return PauliString::new(n, factors).unwrap();
        }
    }
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let mut m: f64 = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        m = m.max((x - y).norm());
    }
    m
}
