//! Dense complex linear algebra used by the rest of the crate.
//!
//! Everything here works on small matrices (at most a few hundred rows), so
//! plain dense storage and one-shot decompositions are used throughout. The
//! decompositions are delegated to `nalgebra`; this module adds the domain
//! conventions on top (ascending spectra, relative null-space thresholds,
//! 3x3 bipartite index bookkeeping, a validated density-matrix type).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Local dimension of each rotor particle.
pub const QUTRIT: usize = 3;

/// Default relative threshold for numerical null spaces.
pub const KERNEL_TOL: f64 = 1e-9;

/// Default RK4 step in units with hbar = 1.
pub const DEFAULT_DT: f64 = 1e-3;

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Build a matrix from row-major entries, rejecting NaN/Inf.
pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<ComplexMatrix> {
    if rows * cols != entries.len() || rows == 0 || cols == 0 {
        return Err(Error::Shape {
            rows,
            cols,
            got: entries.len(),
        });
    }
    if let Some(k) = entries
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite {
            row: k / cols,
            col: k % cols,
        });
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, entries))
}

pub fn from_real_rows(rows: &[&[f64]]) -> Result<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    let entries: Vec<C64> = rows.iter().flat_map(|r| r.iter().map(|&x| re(x))).collect();
    from_row_major(n, m, &entries)
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        values.len(),
        values.iter().map(|&x| re(x)),
    ))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// `|i><j|` in dimension `n`.
pub fn dyad(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n);
    m[(i, j)] = re(1.0);
    m
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// max |A - A^dagger| entrywise.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// Kronecker product `a (x) b`; the first factor indexes the slow (outer) digit.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Eigen-resolution of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `f(H) = V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|x| re(f(x)))
    }

    /// Like [`map`](Self::map) for complex-valued functions.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = require_square(h)?;
    let scale = max_abs(h).max(1.0);
    let deviation = hermiticity_deviation(h);
    if deviation > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = hermitize(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eig(h).map(|e| e.values)
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis of the numerical null space of a square matrix.
///
/// A right-singular vector belongs to the kernel when its singular value is
/// below `tol * sigma_max`. The zero matrix has the whole space as kernel.
pub fn kernel_basis(m: &ComplexMatrix, tol: f64) -> Result<Vec<ComplexVector>> {
    if !(tol > 0.0) {
        return Err(Error::Tolerance(tol));
    }
    let n = require_square(m)?;
    let svd = m.clone().svd(false, true);
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    if sigma_max == 0.0 {
        return Ok((0..n)
            .map(|i| ComplexVector::from_fn(n, |r, _| re((r == i) as u8 as f64)))
            .collect());
    }
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut picked: Vec<(f64, ComplexVector)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < tol * sigma_max)
        .map(|(i, &s)| (s, v_t.row(i).adjoint()))
        .collect();
    picked.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(picked.into_iter().map(|(_, v)| v).collect())
}

/// Trace norm `tr sqrt(M^dagger M)`.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Column-major vectorisation, `vec(A X B) = (B^T (x) A) vec(X)`.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &ComplexVector, n: usize) -> ComplexMatrix {
    assert_eq!(v.len(), n * n, "vector length is not a square");
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

/// `m^e` by repeated squaring.
pub fn matrix_power(m: &ComplexMatrix, mut e: u64) -> ComplexMatrix {
    let mut base = m.clone();
    let mut acc = identity(m.nrows());
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Which factor of a bipartite 3 (x) 3 space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::A => "a",
            Subsystem::B => "b",
        }
    }
}

/// Row/column index of `|j_a, j_b>` in the 9-dimensional product basis.
#[inline]
pub fn pair_index(ja: usize, jb: usize) -> usize {
    QUTRIT * (ja % QUTRIT) + (jb % QUTRIT)
}

fn require_bipartite(m: &ComplexMatrix) -> Result<()> {
    let n = require_square(m)?;
    if n != QUTRIT * QUTRIT {
        return Err(Error::Dimension {
            expected: QUTRIT * QUTRIT,
            got: n,
        });
    }
    Ok(())
}

/// Reduced state of the `keep` factor of a two-qutrit state.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho.matrix(), keep)?;
    DensityMatrix::new(m)
}

pub fn partial_trace_matrix(m: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    require_bipartite(m)?;
    let mut out = zeros(QUTRIT);
    for i in 0..QUTRIT {
        for j in 0..QUTRIT {
            out[(i, j)] = (0..QUTRIT)
                .map(|k| match keep {
                    Subsystem::A => m[(pair_index(i, k), pair_index(j, k))],
                    Subsystem::B => m[(pair_index(k, i), pair_index(k, j))],
                })
                .sum();
        }
    }
    Ok(out)
}

/// Partial transpose on one factor:
/// `<ja jb| M^T_b |ja' jb'> = <ja jb'| M |ja' jb>`.
pub fn partial_transpose(m: &ComplexMatrix, sub: Subsystem) -> Result<ComplexMatrix> {
    require_bipartite(m)?;
    let mut out = zeros(QUTRIT * QUTRIT);
    for ja in 0..QUTRIT {
        for jb in 0..QUTRIT {
            for ka in 0..QUTRIT {
                for kb in 0..QUTRIT {
                    let src = match sub {
                        Subsystem::B => (pair_index(ja, kb), pair_index(ka, jb)),
                        Subsystem::A => (pair_index(ka, jb), pair_index(ja, kb)),
                    };
                    out[(pair_index(ja, jb), pair_index(ka, kb))] = m[src];
                }
            }
        }
    }
    Ok(out)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: ComplexMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const NEGATIVITY_TOL: f64 = 1e-10;

    /// Validate `m` as a state. Tiny anti-Hermitian noise is symmetrised away.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        require_square(&m)?;
        if let Some(k) = m
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k % m.nrows(),
                col: k / m.nrows(),
            });
        }
        let deviation = hermiticity_deviation(&m);
        if deviation > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let m = hermitize(&m);
        let tr = trace(&m).re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::Trace { trace: tr });
        }
        let min_eigenvalue = hermitian_eigenvalues(&m)?[0];
        if min_eigenvalue < -Self::NEGATIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { data: m })
    }

    /// Hermitise and rescale to unit trace before validating.
    pub fn normalized(m: &ComplexMatrix) -> Result<Self> {
        let h = hermitize(m);
        let tr = trace(&h).re;
        if !(tr.abs() > 0.0) || !tr.is_finite() {
            return Err(Error::Trace { trace: tr });
        }
        Self::new(h / re(tr))
    }

    /// Like [`normalized`](Self::normalized), but eigenvalues in
    /// `(-1e-10, 0)` are clipped to zero and the trace restored.
    pub fn repaired(m: &ComplexMatrix) -> Result<Self> {
        let h = hermitize(m);
        let tr = trace(&h).re;
        if !(tr.abs() > 0.0) || !tr.is_finite() {
            return Err(Error::Trace { trace: tr });
        }
        let h = h / re(tr);
        let eig = hermitian_eig(&h)?;
        if eig.values[0] < -Self::NEGATIVITY_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.values[0],
            });
        }
        if eig.values[0] >= 0.0 {
            return Self::new(h);
        }
        let clipped = eig.map(|x| x.max(0.0));
        let tr = trace(&clipped).re;
        Self::new(hermitize(&(clipped / re(tr))))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            data: identity(dim) / re(dim as f64),
        }
    }

    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::Trace { trace: 0.0 });
        }
        let v = psi / re(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.data
    }

    /// `tr(rho * op)`.
    pub fn expect(&self, op: &ComplexMatrix) -> C64 {
        (&self.data * op).trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.data).expect("density matrices are Hermitian")
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let d = &self.data - &other.data;
        hermitian_eigenvalues(&hermitize(&d))
            .expect("difference of states is Hermitian")
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
            / 2.0
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            data: kron(&self.data, &other.data),
        }
    }

    pub fn mix(weights: &[f64], states: &[&DensityMatrix]) -> Result<Self> {
        assert_eq!(weights.len(), states.len());
        let n = states.first().map_or(0, |s| s.dim());
        let mut acc = zeros(n);
        for (w, s) in weights.iter().zip(states) {
            acc += s.matrix() * re(*w);
        }
        Self::new(acc)
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(hermitize(&(u * &self.data * u.adjoint())))
    }
}

/// One classical fourth-order Runge-Kutta step of `dm/dt = f(m)`.
pub fn rk4_step<F>(m: &ComplexMatrix, f: &F, dt: f64) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let h = re(dt);
    let half = re(0.5 * dt);
    let k1 = f(m);
    let k2 = f(&(m + &k1 * half));
    let k3 = f(&(m + &k2 * half));
    let k4 = f(&(m + &k3 * h));
    m + (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(dt / 6.0)
}

/// Advance a state by one RK4 step of `d rho/dt = generator(rho)`.
///
/// The result is re-Hermitised. A trace drift above 1e-6 means the step is
/// too large for the generator and is reported as an error.
pub fn ode_step<F>(rho: &DensityMatrix, generator: F, dt: f64) -> Result<DensityMatrix>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    if !(dt > 0.0) {
        return Err(Error::TimeStep(dt));
    }
    let next = hermitize(&rk4_step(rho.matrix(), &generator, dt));
    let drift = (trace(&next).re - 1.0).abs();
    if drift > 1e-6 {
        return Err(Error::StepSize { drift });
    }
    let tr = trace(&next).re;
    DensityMatrix::new(next / re(tr))
}

/// Integrate to time `t` with fixed steps of at most `dt`.
pub fn ode_evolve<F>(rho: &DensityMatrix, generator: F, t: f64, dt: f64) -> Result<DensityMatrix>
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    if !(dt > 0.0) {
        return Err(Error::TimeStep(dt));
    }
    let steps = (t / dt).ceil().max(0.0) as usize;
    if steps == 0 {
        return Ok(rho.clone());
    }
    let h = t / steps as f64;
    let mut state = rho.clone();
    for _ in 0..steps {
        state = ode_step(&state, &generator, h)?;
    }
    Ok(state)
}
