//! Lattice-to-continuum check of the tunneling current.
//!
//! A ring of `2N + 1` sites `q_n = n l_N`, `n = -N..=N`, with spacing
//! `l_N = l eps_N` and `eps_N = 1/sqrt(2N + 1)`. Momentum eigenstates satisfy
//! `<q_k|p_n> = eps_N exp(2 pi i eps_N^2 k n)` and `p_n = 2 pi n eps_N / l`.
//! All operators are circulant; hbar = 1.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{max_abs, re, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumParams {
    pub n: usize,
    pub ell: f64,
    pub mass: f64,
}

impl ContinuumParams {
    pub fn new(n: usize, ell: f64, mass: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter {
                name: "N",
                reason: "must be positive".into(),
            });
        }
        for (name, v) in [("ell", ell), ("mass", mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter {
                    name,
                    reason: format!("{v} must be positive"),
                });
            }
        }
        Ok(Self { n, ell, mass })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn eps(&self) -> f64 {
        1.0 / (self.dim() as f64).sqrt()
    }

    /// Lattice spacing `l_N`.
    pub fn spacing(&self) -> f64 {
        self.ell * self.eps()
    }

    /// Matrix index of lattice site `n` (cyclic).
    pub fn index(&self, site: i64) -> usize {
        (site + self.n as i64).rem_euclid(self.dim() as i64) as usize
    }

    /// Momentum eigenvalue of mode `n`.
    pub fn momentum(&self, mode: i64) -> f64 {
        2.0 * PI * self.eps() * mode as f64 / self.ell
    }

    fn modes(&self) -> impl Iterator<Item = i64> {
        let n = self.n as i64;
        -n..=n
    }

    fn phase(&self, k: i64, n: i64) -> C64 {
        let d = self.dim() as i64;
        C64::from_polar(1.0, 2.0 * PI * ((k * n).rem_euclid(d)) as f64 / d as f64)
    }

    /// Circulant matrix with `<q_k| M |q_k'> = c((k - k') mod d)`.
    fn circulant(&self, c: &[C64]) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| c[(i + d - j) % d])
    }

    /// `<q_m| f(P) |q_0>` for `m = 0..d`.
    fn spectral_column(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        let e2 = self.eps() * self.eps();
        let weights: Vec<(i64, C64)> = self
            .modes()
            .map(|n| (n, f(self.momentum(n)) * e2))
            .collect();
        (0..self.dim() as i64)
            .map(|m| weights.iter().map(|(n, w)| w * self.phase(m, *n)).sum())
            .collect()
    }

    /// Columns `|p_n>` for the modes with `|p_n| <= cutoff`.
    pub fn momentum_band(&self, cutoff: f64) -> ComplexMatrix {
        let modes: Vec<i64> = self
            .modes()
            .filter(|&n| self.momentum(n).abs() <= cutoff)
            .collect();
        let eps = self.eps();
        ComplexMatrix::from_fn(self.dim(), modes.len(), |i, c| {
            let k = i as i64 - self.n as i64;
            self.phase(k, modes[c]) * eps
        })
    }
}

pub fn momentum_op(p: &ContinuumParams) -> ComplexMatrix {
    p.circulant(&p.spectral_column(re))
}

/// `exp(-i P l_N)`, which shifts `|q_n>` to `|q_{n+1}>`.
pub fn translation_op(p: &ContinuumParams) -> ComplexMatrix {
    let l = p.spacing();
    p.circulant(&p.spectral_column(|x| C64::from_polar(1.0, -x * l)))
}

/// `sum_m eps^2 (eps^2 m)^2 exp(-2 pi i eps^2 m k)` over `m = -N..=N`.
pub fn riemann_sum(n: usize, k: i64) -> C64 {
    let d = (2 * n + 1) as f64;
    let e2 = 1.0 / d;
    let n = n as i64;
    (-n..=n)
        .map(|m| {
            let x = e2 * m as f64;
            C64::from_polar(e2 * x * x, -2.0 * PI * ((m * k) as f64 / d))
        })
        .sum()
}

/// Limit `(-1)^k / (2 pi^2 k^2)` of [`riemann_sum`].
pub fn riemann_limit(k: i64) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign / (2.0 * PI * PI * (k * k) as f64)
}

/// `<q_n| P^2 |q_{n+k}>`, independent of `n`.
pub fn p_squared_offdiag(p: &ContinuumParams, k: usize) -> Result<C64> {
    if k == 0 || k > p.n {
        return Err(Error::Parameter {
            name: "k",
            reason: format!("{k} is outside 1..={}", p.n),
        });
    }
    let e2 = p.eps() * p.eps();
    let k = k as i64;
    Ok(p.modes()
        .map(|n| {
            C64::from_polar(
                e2 * p.momentum(n).powi(2),
                -2.0 * PI * e2 * ((n * k) as f64),
            )
        })
        .sum())
}

/// Free Hamiltonian `P^2 / 2m`.
pub fn kinetic_hamiltonian(p: &ContinuumParams) -> ComplexMatrix {
    let m = p.mass;
    p.circulant(&p.spectral_column(|x| re(x * x / (2.0 * m))))
}

/// Tunneling current operator `i (x_a H x_b - x_b H x_a)` between two sites.
fn add_edge_current(out: &mut ComplexMatrix, h: &ComplexMatrix, a: usize, b: usize, weight: f64) {
    out[(a, b)] += C64::new(0.0, weight) * h[(a, b)];
    out[(b, a)] -= C64::new(0.0, weight) * h[(b, a)];
}

/// `J(q_n) = sum_{k=1}^{N} k l_N J_{n -> n+k}` with `H = P^2/2m`.
pub fn assembled_current(p: &ContinuumParams, site: i64) -> ComplexMatrix {
    let h = kinetic_hamiltonian(p);
    let d = p.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    let a = p.index(site);
    for k in 1..=p.n as i64 {
        add_edge_current(&mut out, &h, a, p.index(site + k), k as f64 * p.spacing());
    }
    out
}

/// `{P, |q_n><q_n|} / 2m`.
pub fn anticommutator_current(p: &ContinuumParams, site: i64) -> ComplexMatrix {
    let mom = momentum_op(p);
    let a = p.index(site);
    let d = p.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        out[(a, j)] += mom[(a, j)];
        out[(j, a)] += mom[(j, a)];
    }
    out / re(2.0 * p.mass)
}

/// Largest entry of `J(q_0) - {P, x_0}/2m`.
pub fn current_error_max(p: &ContinuumParams) -> f64 {
    max_abs(&(assembled_current(p, 0) - anticommutator_current(p, 0)))
}

/// Largest momentum-basis matrix element of `J(q_0) - {P, x_0}/2m` between
/// modes with `|p| <= cutoff`.
pub fn current_error_band(p: &ContinuumParams, cutoff: f64) -> f64 {
    let band = p.momentum_band(cutoff);
    let diff = assembled_current(p, 0) - anticommutator_current(p, 0);
    max_abs(&(band.adjoint() * diff * &band))
}

/// `i[H, x_n] - sum_{m != n} J_{m -> n}` for the free Hamiltonian.
pub fn continuity_residual(p: &ContinuumParams, site: i64) -> f64 {
    let h = kinetic_hamiltonian(p);
    let d = p.dim();
    let a = p.index(site);
    let mut x = ComplexMatrix::zeros(d, d);
    x[(a, a)] = re(1.0);
    let lhs = (&h * &x - &x * &h) * C64::new(0.0, 1.0);
    let mut rhs = ComplexMatrix::zeros(d, d);
    for b in (0..d).filter(|&b| b != a) {
        add_edge_current(&mut rhs, &h, b, a, 1.0);
    }
    max_abs(&(lhs - rhs))
}

fn log_series_scalar(x: C64, k_max: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut power = x;
    for k in 1..=k_max {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc += power * (sign / k as f64);
        power *= x;
    }
    acc
}

/// `sum_{k=1}^{k_max} (-1)^{k-1} T^k / k` evaluated mode by mode, with
/// `T = exp(-i P l_N)`.
pub fn log_series_spectral(p: &ContinuumParams, k_max: usize) -> ComplexMatrix {
    let l = p.spacing();
    p.circulant(&p.spectral_column(|x| log_series_scalar(C64::from_polar(1.0, -x * l), k_max)))
}

/// The same partial sum built from powers of the lattice shift.
pub fn log_series_shift(p: &ContinuumParams, k_max: usize) -> ComplexMatrix {
    let d = p.dim();
    let mut c = vec![C64::new(0.0, 0.0); d];
    for k in 1..=k_max {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        c[k % d] += re(sign / k as f64);
    }
    p.circulant(&c)
}

/// `ln(I + exp(-i P l_N))` through the spectral theorem.
pub fn log_series_exact(p: &ContinuumParams) -> ComplexMatrix {
    let l = p.spacing();
    p.circulant(&p.spectral_column(|x| (C64::from_polar(1.0, -x * l) + 1.0).ln()))
}
