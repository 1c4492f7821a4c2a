//! Seeded random matrices for property tests and the invariant suite.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{hermitize, re, trace, ComplexMatrix, ComplexVector, DensityMatrix, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Ginibre matrix with unit-variance real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    hermitize(&ginibre(rng, n, n))
}

/// Full-rank mixed state `G G^dagger / tr(G G^dagger)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let g = ginibre(rng, n, n);
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    DensityMatrix::new(hermitize(&(m / re(tr)))).expect("Wishart matrix is a valid state")
}

/// Diagonal (classical) state with random populations.
pub fn diagonal_density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = p.iter().sum();
    let d = ComplexVector::from_iterator(n, p.iter().map(|x| re(x / s)));
    DensityMatrix::new(ComplexMatrix::from_diagonal(&d)).expect("positive diagonal")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let v = ComplexVector::from_fn(n, |_, _| gaussian(rng));
    DensityMatrix::pure(&v).expect("nonzero vector")
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            re(1.0)
        };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}
