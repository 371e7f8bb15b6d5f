//! Seeded generators for random states, measurements, and unitaries.
//! Used by the verification suites and handy for scripted experiments;
//! everything takes the RNG explicitly so callers own reproducibility.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, Complex64, ComplexMatrix};

fn standard_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix: independent standard complex normal entries.
pub fn ginibre<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| standard_complex(rng))
}

/// Random unit vector, uniform on the sphere.
pub fn random_ket<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d).map(|_| standard_complex(rng)).collect();
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in v.iter_mut() {
        *a /= norm;
    }
    v
}

/// Rank-1 density operator of a random pure state.
pub fn pure_state<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let v = random_ket(d, rng);
    ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj())
}

/// Full-rank random density operator A A† / tr(A A†) with Ginibre A.
pub fn density_matrix<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let a = ginibre(d, rng);
    let aa = &a * a.adjoint();
    let tr = aa.trace();
    aa / tr
}

/// Random unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, rng).qr();
    qr.q()
}

/// Random J-outcome POVM: Ginibre-based positive operators G_j whitened by
/// the inverse square root of their sum, so the effects add to the identity.
pub fn random_povm<R: Rng>(d: usize, outcomes: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    assert!(outcomes >= 1);
    let parts: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let a = ginibre(d, rng);
            &a * a.adjoint()
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &parts {
        sum += p;
    }
    let (vals, vecs) = linalg::hermitian_eigen(&sum);
    let inv_sqrt_diag = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(1.0 / vals[i].sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let whitener = &vecs * inv_sqrt_diag * vecs.adjoint();
    parts.into_iter().map(|g| &whitener * g * &whitener).collect()
}
