//! Heat flux, entanglement, ergotropy and coherence of rotor states.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::master_eq::Generator;
use crate::numerics::{
    hermitian_eig, hermitian_eigenvalues, hermitize, identity, partial_transpose, re, trace,
    ComplexMatrix, ComplexVector, DensityMatrix, Subsystem, C64, QUTRIT,
};
use crate::rotor::Particle;
use crate::steady_state::KernelProjector;

/// Negativity above this counts as entanglement.
pub const ENTANGLEMENT_TOL: f64 = 1e-10;

/// Points of the fallback scan used when a bisection bracket is invalid.
const FALLBACK_GRID: usize = 21;

/// Energy flow `tr(H D_alpha[rho])` from bath `alpha` into the system.
pub fn heat_flux(gen: &Generator, rho: &DensityMatrix, bath: Particle) -> f64 {
    let d = gen.dissipator(rho.matrix(), Some(bath));
    trace(&(&gen.hamiltonian * d)).re
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose on `b`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = hermitize(&partial_transpose(rho.matrix(), Subsystem::B)?);
    Ok(hermitian_eigenvalues(&pt)?
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|x| -x)
        .sum())
}

pub fn is_entangled(rho: &DensityMatrix) -> Result<bool> {
    Ok(negativity(rho)? > ENTANGLEMENT_TOL)
}

/// `tr(H rho) - sum_m E_m r_m` with `E` ascending and `r` descending.
pub fn ergotropy(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    if h.shape() != rho.matrix().shape() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: h.nrows(),
        });
    }
    let energies = hermitian_eigenvalues(h)?;
    let mut pops = rho.eigenvalues();
    pops.reverse();
    let passive: f64 = energies.iter().zip(&pops).map(|(e, r)| e * r).sum();
    Ok(rho.expect(h).re - passive)
}

/// `sum_{j != j'} |sigma_{jj'}|`.
pub fn coherence(sigma: &DensityMatrix) -> f64 {
    let m = sigma.matrix();
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}

/// `sigma_12 + conj(sigma_13) + sigma_23` (sites labelled from 1).
pub fn theta_sigma(sigma: &DensityMatrix) -> Result<C64> {
    if sigma.dim() != QUTRIT {
        return Err(Error::Dimension {
            expected: QUTRIT,
            got: sigma.dim(),
        });
    }
    let m = sigma.matrix();
    Ok(m[(0, 1)] + m[(0, 2)].conj() + m[(1, 2)])
}

/// Upper bound `sqrt(3/2 tr(sigma^2) - 1/2)` on `|theta_sigma|`.
pub fn theta_bound(sigma: &DensityMatrix) -> f64 {
    (1.5 * sigma.purity() - 0.5).max(0.0).sqrt()
}

/// Gibbs state `e^{-H/T} / Z`.
pub fn thermal_state(h: &ComplexMatrix, t: f64) -> Result<DensityMatrix> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter {
            name: "T",
            reason: format!("{t} must be positive"),
        });
    }
    let eig = hermitian_eig(h)?;
    let e0 = eig.values[0];
    let weights = eig.map(|e| (-(e - e0) / t).exp());
    DensityMatrix::normalized(&weights)
}

/// `sigma_a(delta) (x) sigma_b(delta)` with `sigma(delta) = (1 - delta)|s><s| + delta I/3`.
#[derive(Debug, Clone)]
pub struct CoherentInputFamily {
    pub delta: f64,
    pub sigma_a: DensityMatrix,
    pub sigma_b: DensityMatrix,
}

impl CoherentInputFamily {
    pub fn new(delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Parameter {
                name: "delta",
                reason: format!("{delta} is outside [0, 1]"),
            });
        }
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let ket_a = ComplexVector::from_vec(vec![re(1.0), w.conj(), w]);
        let ket_b = ComplexVector::from_vec(vec![re(1.0); 3]);
        Ok(Self {
            delta,
            sigma_a: Self::noisy(&ket_a, delta)?,
            sigma_b: Self::noisy(&ket_b, delta)?,
        })
    }

    fn noisy(ket: &ComplexVector, delta: f64) -> Result<DensityMatrix> {
        let pure = DensityMatrix::pure(ket)?;
        DensityMatrix::new(pure.matrix() * re(1.0 - delta) + identity(QUTRIT) * re(delta / 3.0))
    }

    pub fn product(&self) -> DensityMatrix {
        self.sigma_a.tensor(&self.sigma_b)
    }

    /// Closed-form purity of each single-particle state.
    pub fn purity(delta: f64) -> f64 {
        1.0 - (4.0 * delta - 2.0 * delta * delta) / 3.0
    }
}

/// Largest point of a monotone predicate that is still true, to width `tol`.
///
/// `pred(lo)` must be true and `pred(hi)` false.
fn bisect(
    pred: &mut impl FnMut(f64) -> Result<bool>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundary of `pred` on `[lo, hi]`: bisection when the endpoints bracket a
/// single change, otherwise a coarse scan picks the last true grid point.
/// `None` when the predicate is false everywhere it was evaluated.
fn threshold(
    mut pred: impl FnMut(f64) -> Result<bool>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Option<f64>> {
    if !(tol > 0.0) {
        return Err(Error::Tolerance(tol));
    }
    let (at_lo, at_hi) = (pred(lo)?, pred(hi)?);
    if at_lo && !at_hi {
        return bisect(&mut pred, lo, hi, tol).map(Some);
    }
    if at_hi {
        return Ok(Some(hi));
    }
    let step = (hi - lo) / (FALLBACK_GRID - 1) as f64;
    let mut last_true = None;
    for i in 1..FALLBACK_GRID - 1 {
        let x = lo + step * i as f64;
        if pred(x)? {
            last_true = Some(x);
        }
    }
    last_true
        .map(|x| bisect(&mut pred, x, x + step, tol))
        .transpose()
}

/// Supremum of the noise `delta` for which the product input
/// `sigma_a(delta) (x) sigma_b(delta)` still relaxes to an entangled state.
///
/// `factory(T_a, T_b)` builds the generator. The relaxed state is the exact
/// long-time limit, so degenerate stationary spaces are handled as well.
pub fn delta_max<F>(factory: F, t_a: f64, t_b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<Generator>,
{
    let gen = factory(t_a, t_b)?;
    let proj = KernelProjector::new(&gen)?;
    let pred = |delta: f64| -> Result<bool> {
        let input = CoherentInputFamily::new(delta)?.product();
        is_entangled(&proj.limit(&input)?)
    };
    Ok(threshold(pred, 0.0, 1.0, tol)?.unwrap_or(0.0))
}

/// Temperature above which the Gibbs state of `h` has positive partial transpose.
///
/// Returns 0 when no temperature on the search range gives entanglement.
pub fn entanglement_temperature(h: &ComplexMatrix, tol: f64) -> Result<f64> {
    let scale = hermitian_eigenvalues(h)?
        .iter()
        .fold(0.0_f64, |a, x| a.max(x.abs()))
        .max(1e-300);
    let pred = |t: f64| -> Result<bool> { is_entangled(&thermal_state(h, t)?) };
    let lo = 1e-3 * scale;
    let mut hi = scale;
    let mut guard = 0;
    while pred(hi)? {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Parameter {
                name: "h",
                reason: "thermal states stay entangled".into(),
            });
        }
    }
    Ok(threshold(pred, lo, hi, tol)?.unwrap_or(0.0))
}
