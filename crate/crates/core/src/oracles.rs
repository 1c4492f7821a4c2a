//! Independent reference computations used to cross-check the main modules.
//!
//! These are deliberately naive: explicit index loops, power iteration and
//! closed-form solutions, sharing no code paths with the production routines
//! beyond basic matrix arithmetic.

use crate::error::{Error, Result};
use crate::master_eq::LindbladTerm;
use crate::numerics::{re, ComplexMatrix, ComplexVector, C64};

/// `x_a L^dag x_b L x_c` for the site projectors of a three-site graph.
fn triple(
    x: &[ComplexMatrix; 3],
    jump: &ComplexMatrix,
    a: usize,
    b: usize,
    c: usize,
) -> ComplexMatrix {
    &x[a % 3] * jump.adjoint() * &x[b % 3] * jump * &x[c % 3]
}

/// Thermal current `j -> j+1` on a three-site graph, summed term by term from
/// the resolution of the identity into the three site projectors.
pub fn triangle_thermal_current(
    terms: &[LindbladTerm],
    x: &[ComplexMatrix; 3],
    j: usize,
) -> ComplexMatrix {
    let (j0, j1, j2) = (j, j + 1, j + 2);
    let n = x[0].nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for term in terms {
        let t = |a, b, c| triple(x, &term.jump, a, b, c);
        let full = t(j0, j1, j0) - t(j1, j0, j1);
        let halves = t(j1, j1, j0) - t(j0, j0, j1) + t(j0, j1, j1) - t(j1, j0, j0) + t(j0, j1, j2)
            - t(j1, j0, j2)
            + t(j2, j1, j0)
            - t(j2, j0, j1);
        out += (full + halves * re(0.5)) * re(term.rate);
    }
    out
}

/// Eigenvalues of a Hermitian matrix by shifted power iteration with Hotelling
/// deflation, in ascending order.
pub fn power_iteration_eigenvalues(h: &ComplexMatrix, iters: usize) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let n = h.nrows();
    let bound: f64 = (0..n)
        .map(|i| h.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    // shifted so every eigenvalue of `a` is positive and the largest dominates
    let mut a = h + ComplexMatrix::identity(n, n) * re(bound + 1.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = ComplexVector::from_fn(n, |i, _| {
            C64::new(1.0 + 0.1 * i as f64, 0.05 * (i + k) as f64)
        });
        v /= re(v.norm());
        for _ in 0..iters {
            let w = &a * &v;
            let norm = w.norm();
            if norm == 0.0 {
                break;
            }
            v = w / re(norm);
        }
        let lambda = v.dotc(&(&a * &v)).re;
        out.push(lambda - bound - 1.0);
        a -= &v * v.adjoint() * re(lambda);
    }
    out.sort_by(|x, y| x.total_cmp(y));
    Ok(out)
}

/// Partial transpose on the second factor of a `3 x 3` bipartite matrix,
/// written out element by element.
pub fn partial_transpose_b(rho: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(9, 9, |r, c| {
        let (ia, ib) = (r / 3, r % 3);
        let (ja, jb) = (c / 3, c % 3);
        rho[(3 * ia + jb, 3 * ja + ib)]
    })
}

/// `|Phi><Phi|` for the maximally entangled two-qutrit state.
pub fn maximally_entangled() -> ComplexMatrix {
    let v = ComplexVector::from_fn(9, |i, _| {
        if i % 4 == 0 {
            re(1.0 / 3f64.sqrt())
        } else {
            re(0.0)
        }
    });
    &v * v.adjoint()
}

/// Pure dephasing `drho/dt = gamma (Z rho Z - rho)` for a diagonal `Z` with
/// entries `+-1`: coherences between opposite signs decay as `exp(-2 gamma t)`.
pub fn dephasing_solution(
    rho0: &ComplexMatrix,
    signs: &[f64],
    gamma: f64,
    t: f64,
) -> ComplexMatrix {
    let decay = (-2.0 * gamma * t).exp();
    ComplexMatrix::from_fn(rho0.nrows(), rho0.ncols(), |i, j| {
        if signs[i] == signs[j] {
            rho0[(i, j)]
        } else {
            rho0[(i, j)] * decay
        }
    })
}

/// Unitary evolution `exp(-iHt) rho exp(iHt)` for diagonal `H`.
pub fn diagonal_unitary_solution(rho0: &ComplexMatrix, energies: &[f64], t: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho0.nrows(), rho0.ncols(), |i, j| {
        rho0[(i, j)] * C64::from_polar(1.0, -(energies[i] - energies[j]) * t)
    })
}
