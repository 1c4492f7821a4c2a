//! Stationary states of the rotor generators resolved by the rigid-rotation
//! symmetry, and the map from initial data to the state reached at long times.

use std::f64::consts::PI;

use crate::currents::{particle_current, CurrentAverage};
use crate::error::{Error, Result};
use crate::master_eq::Generator;
use crate::numerics::{
    hermitize, identity, kernel_basis, matrix_power, re, trace, unvectorize, vectorize,
    ComplexMatrix, ComplexVector, DensityMatrix, C64, KERNEL_TOL, QUTRIT,
};
use crate::rotor::{global_rotation, Particle, SymmetryDecomposition, DIM};

/// Smallest sector trace accepted when normalising a projected kernel vector.
const SECTOR_TRACE_TOL: f64 = 1e-12;

/// Exact long-time map onto the kernel of a generator,
/// `P = V (W^dag V)^{-1} W^dag` with right kernel `V` and left kernel `W`.
#[derive(Debug, Clone)]
pub struct KernelProjector {
    matrix: ComplexMatrix,
    dim: usize,
}

impl KernelProjector {
    pub fn new(gen: &Generator) -> Result<Self> {
        let m = gen.superoperator();
        let right = kernel_basis(&m, KERNEL_TOL)?;
        let left = kernel_basis(&m.adjoint(), KERNEL_TOL)?;
        if right.is_empty() || right.len() != left.len() {
            return Err(Error::KernelDimension(right.len()));
        }
        let v = ComplexMatrix::from_columns(&right);
        let w = ComplexMatrix::from_columns(&left);
        let overlap = w.adjoint() * &v;
        let inv = overlap
            .try_inverse()
            .ok_or(Error::KernelDimension(right.len()))?;
        Ok(Self {
            matrix: v * inv * w.adjoint(),
            dim: gen.dim(),
        })
    }

    pub fn rank(&self) -> usize {
        trace(&self.matrix).re.round() as usize
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    /// State reached from `rho0` as `t -> infinity`.
    pub fn limit(&self, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::repaired(&self.apply(rho0.matrix()))
    }
}

/// The three symmetry-resolved stationary states.
#[derive(Debug, Clone)]
pub struct SteadyStateBasis {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    pub rho3: DensityMatrix,
    pub kernel_dim: usize,
}

impl SteadyStateBasis {
    /// Basis state of sector `k` in 1..=3.
    pub fn state(&self, k: usize) -> &DensityMatrix {
        match (k + 2) % 3 {
            0 => &self.rho1,
            1 => &self.rho2,
            _ => &self.rho3,
        }
    }

    pub fn states(&self) -> [&DensityMatrix; 3] {
        [&self.rho1, &self.rho2, &self.rho3]
    }

    /// True when the stationary space is larger than the three sectors.
    pub fn degenerate(&self) -> bool {
        self.kernel_dim != 3
    }
}

fn sector_state(sym: &SymmetryDecomposition, k: usize, m: &ComplexMatrix) -> Result<DensityMatrix> {
    let rk = sym.projector(k);
    let projected = rk * m * rk;
    let tr = trace(&projected);
    if tr.norm() < SECTOR_TRACE_TOL {
        return Err(Error::MissingSector { sector: k });
    }
    DensityMatrix::repaired(&hermitize(&(projected / tr)))
}

/// Sector states built from one kernel vector at a time. For each sector the
/// Hermitian candidate with the largest sector trace is used.
fn basis_from_kernel(
    sym: &SymmetryDecomposition,
    kernel: &[ComplexVector],
) -> Result<[DensityMatrix; 3]> {
    let candidates: Vec<ComplexMatrix> = kernel
        .iter()
        .flat_map(|v| {
            let m = unvectorize(v, DIM);
            let herm = &m + m.adjoint();
            let anti = (&m - m.adjoint()) * C64::new(0.0, -1.0);
            [herm, anti]
        })
        .collect();
    let pick = |k: usize| -> Result<DensityMatrix> {
        let rk = sym.projector(k);
        let best = candidates
            .iter()
            .map(|c| (trace(&(rk * c)).norm(), c))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .ok_or(Error::MissingSector { sector: k })?;
        sector_state(sym, k, best.1)
    };
    Ok([pick(1)?, pick(2)?, pick(3)?])
}

/// Solve `L[rho] = 0` and resolve the solutions into the rotation sectors.
///
/// With a three-dimensional kernel each sector holds exactly one state. With a
/// larger kernel the sector projections of the long-time limit of the
/// maximally mixed state are returned. A one-dimensional kernel (local and
/// classical generators) gives the unique state in all three slots.
pub fn solve_basis(gen: &Generator) -> Result<SteadyStateBasis> {
    if gen.dim() != DIM {
        return Err(Error::Dimension {
            expected: DIM,
            got: gen.dim(),
        });
    }
    let kernel = kernel_basis(&gen.superoperator(), KERNEL_TOL)?;
    let kernel_dim = kernel.len();
    let sym = global_rotation();
    let [rho1, rho2, rho3] = match kernel_dim {
        1 => {
            let m = unvectorize(&kernel[0], DIM);
            let rho = DensityMatrix::repaired(&hermitize(&(&m / trace(&m))))?;
            [rho.clone(), rho.clone(), rho]
        }
        3 => basis_from_kernel(&sym, &kernel)?,
        d if d > 3 => {
            let proj = KernelProjector::new(gen)?;
            let reference = proj.apply(&(identity(DIM) / re(DIM as f64)));
            [1, 2, 3]
                .map(|k| sector_state(&sym, k, &reference))
                .into_iter()
                .collect::<Result<Vec<_>>>()?
                .try_into()
                .expect("three sectors")
        }
        d => return Err(Error::KernelDimension(d)),
    };
    Ok(SteadyStateBasis {
        rho1,
        rho2,
        rho3,
        kernel_dim,
    })
}

/// `theta_0` and the sector weights `lambda_k = tr(R_k rho_0)` of an initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightDecomposition {
    pub theta0: C64,
    pub lambda: [f64; 3],
}

/// Sector weights from `theta_0` alone.
pub fn lambda_from_theta(theta0: C64) -> [f64; 3] {
    [1.0, 2.0, 3.0]
        .map(|k| 1.0 / 3.0 + 2.0 / 3.0 * (C64::from_polar(1.0, -2.0 * PI * k / 3.0) * theta0).re)
}

/// `sum_{j_a, j_b} <j_a, j_b| rho |j_a + 1, j_b + 1>`.
pub fn theta0(rho0: &DensityMatrix) -> C64 {
    let m = rho0.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for ja in 0..QUTRIT {
        for jb in 0..QUTRIT {
            acc += m[(3 * ja + jb, 3 * ((ja + 1) % QUTRIT) + (jb + 1) % QUTRIT)];
        }
    }
    acc
}

pub fn weights(rho0: &DensityMatrix) -> WeightDecomposition {
    let sym = global_rotation();
    let lambda = [1, 2, 3].map(|k| rho0.expect(sym.projector(k)).re);
    WeightDecomposition {
        theta0: theta0(rho0),
        lambda,
    }
}

/// `sum_k tr(R_k rho_0) rho_k`; only meaningful for a three-dimensional kernel.
pub fn asymptotic_state(basis: &SteadyStateBasis, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if basis.kernel_dim != 3 {
        return Err(Error::KernelDimension(basis.kernel_dim));
    }
    let w = weights(rho0);
    DensityMatrix::mix(&w.lambda, &basis.states())
}

/// Steady current of one particle reached from `rho0`, with its tunneling
/// and thermal parts.
///
/// The direct value is cross-checked against the closed form in `theta_0`
/// and the first-sector currents.
pub fn steady_current_decomposition(
    basis: &SteadyStateBasis,
    rho0: &DensityMatrix,
    gen: &Generator,
    particle: Particle,
) -> Result<CurrentAverage> {
    let state = asymptotic_state(basis, rho0)?;
    let direct = particle_current(gen, &state, particle, 0)?;
    let theta = theta0(rho0);
    let first = particle_current(gen, &basis.rho1, particle, 0)?;
    let tun = 2.0 * theta.im / 3f64.sqrt() * first.tun;
    let th = (2.0 - 2.0 * theta.re) / 3.0 * first.th;
    let mismatch = (direct.total - (tun + th)).abs();
    if mismatch > 1e-8 {
        return Err(Error::SteadyStateMismatch(mismatch));
    }
    Ok(direct)
}

/// Superoperator of one classical RK4 step of length `dt`.
pub fn rk4_propagator(superop: &ComplexMatrix, dt: f64) -> ComplexMatrix {
    let n = superop.nrows();
    let hl = superop * re(dt);
    let mut term = identity(n);
    let mut acc = identity(n);
    for k in 1..=4 {
        term = &term * &hl / re(k as f64);
        acc += &term;
    }
    acc
}

/// RK4 integration to time `t` with step `dt`, done by raising the one-step
/// propagator to the required power.
pub fn evolve_long_time(
    gen: &Generator,
    rho0: &DensityMatrix,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !(dt > 0.0) {
        return Err(Error::TimeStep(dt));
    }
    let steps = (t / dt).round().max(0.0) as u64;
    let step = rk4_propagator(&gen.superoperator(), dt);
    let total = matrix_power(&step, steps);
    let out = unvectorize(&(total * vectorize(rho0.matrix())), gen.dim());
    DensityMatrix::repaired(&out)
}
