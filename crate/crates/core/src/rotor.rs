//! Operators of the two-qutrit rotor.
//!
//! Product basis states `|j_a, j_b>` are stored at index `3 j_a + j_b` with
//! sites 0-based and taken mod 3. Particle `a` is the first tensor factor.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    dyad, identity, kron, matrix_power, pair_index, re, zeros, ComplexMatrix, Subsystem, C64,
    QUTRIT,
};

pub type Particle = Subsystem;

pub const DIM: usize = QUTRIT * QUTRIT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    /// Tunneling rate.
    pub tau: f64,
    /// Potts coupling `K`.
    pub k: f64,
    /// Phase of the Potts potential, radians.
    pub phi: f64,
}

impl RotorParams {
    pub fn new(tau: f64, k: f64, phi: f64) -> Result<Self> {
        let p = Self { tau, k, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau", self.tau), ("K", self.k), ("phi", self.phi)] {
            if !v.is_finite() {
                return Err(Error::Parameter {
                    name,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        if self.tau < 0.0 {
            return Err(Error::Parameter {
                name: "tau",
                reason: format!("{} is negative", self.tau),
            });
        }
        Ok(())
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    pub fn with_k(self, k: f64) -> Self {
        Self { k, ..self }
    }
}

/// Nearest-neighbour hopping on a ring of three sites.
pub fn x_op() -> ComplexMatrix {
    ComplexMatrix::from_fn(QUTRIT, QUTRIT, |i, j| re(if i == j { 0.0 } else { 1.0 }))
}

/// Cyclic shift `|j> -> |j+1>`.
pub fn shift_op() -> ComplexMatrix {
    ComplexMatrix::from_fn(QUTRIT, QUTRIT, |i, j| {
        re(if i == (j + 1) % QUTRIT { 1.0 } else { 0.0 })
    })
}

/// `U[j_a][j_b] = (K/2) cos(2 pi (j_a - j_b)/3 + phi)`.
pub fn potts_potential(p: &RotorParams) -> [[f64; QUTRIT]; QUTRIT] {
    let mut u = [[0.0; QUTRIT]; QUTRIT];
    for (ja, row) in u.iter_mut().enumerate() {
        for (jb, v) in row.iter_mut().enumerate() {
            let d = ja as f64 - jb as f64;
            *v = 0.5 * p.k * (2.0 * PI * d / 3.0 + p.phi).cos();
        }
    }
    u
}

/// Potential value at arbitrary (cyclic) site labels.
pub fn potential_at(u: &[[f64; QUTRIT]; QUTRIT], ja: usize, jb: usize) -> f64 {
    u[ja % QUTRIT][jb % QUTRIT]
}

pub fn interaction_hamiltonian(p: &RotorParams) -> ComplexMatrix {
    let u = potts_potential(p);
    let mut h = zeros(DIM);
    for ja in 0..QUTRIT {
        for jb in 0..QUTRIT {
            h[(pair_index(ja, jb), pair_index(ja, jb))] = re(u[ja][jb]);
        }
    }
    h
}

pub fn rotor_hamiltonian(p: &RotorParams) -> ComplexMatrix {
    let x = x_op();
    let i3 = identity(QUTRIT);
    let hop = kron(&x, &i3) + kron(&i3, &x);
    hop * re(p.tau) + interaction_hamiltonian(p)
}

/// Eigenresolution `R = sum_k e^{2 pi i k/3} R_k` of the rigid rotation.
#[derive(Debug, Clone)]
pub struct SymmetryDecomposition {
    pub r: ComplexMatrix,
    /// `R_1, R_2, R_3` in that order.
    pub projectors: [ComplexMatrix; 3],
    pub eigenvalues: [C64; 3],
}

impl SymmetryDecomposition {
    /// Projector `R_k` for `k` in 1..=3 (taken mod 3, so `R_0 = R_3`).
    pub fn projector(&self, k: usize) -> &ComplexMatrix {
        &self.projectors[(k + 2) % 3]
    }
}

fn omega(k: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k / 3.0)
}

/// Projector onto the eigenvalue `e^{2 pi i k/3}` subspace of a unitary `u`
/// with `u^3 = I`.
pub fn cyclic_projector(u: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut acc = zeros(u.nrows());
    for m in 0..3u64 {
        acc += matrix_power(u, m) * omega(-((k as u64 * m) as f64));
    }
    acc / re(3.0)
}

pub fn global_rotation() -> SymmetryDecomposition {
    let s = shift_op();
    let r = kron(&s, &s);
    let projectors = [1, 2, 3].map(|k| cyclic_projector(&r, k));
    let eigenvalues = [1.0, 2.0, 3.0].map(omega);
    SymmetryDecomposition {
        r,
        projectors,
        eigenvalues,
    }
}

/// Shift of one particle, identity on the other.
pub fn local_rotation(particle: Particle) -> ComplexMatrix {
    let s = shift_op();
    let i3 = identity(QUTRIT);
    match particle {
        Particle::A => kron(&s, &i3),
        Particle::B => kron(&i3, &s),
    }
}

pub fn swap() -> ComplexMatrix {
    let mut m = zeros(DIM);
    for ja in 0..QUTRIT {
        for jb in 0..QUTRIT {
            m[(pair_index(jb, ja), pair_index(ja, jb))] = re(1.0);
        }
    }
    m
}

/// Particle exchange combined with a rotation of `b` by `-k` sites.
///
/// `|j_a, j_b> -> |j_b - k, j_a>`, which commutes with the Hamiltonian when
/// `phi = k pi / 3`.
pub fn generalized_exchange(k: i64) -> ComplexMatrix {
    let power = (-k).rem_euclid(3) as u64;
    swap() * matrix_power(&local_rotation(Particle::B), power)
}

pub fn coupling_op(particle: Particle) -> ComplexMatrix {
    let x = x_op() / re(3.0);
    let i3 = identity(QUTRIT);
    match particle {
        Particle::A => kron(&x, &i3),
        Particle::B => kron(&i3, &x),
    }
}

/// Bath coupling operators `(A_a, A_b)`.
pub fn coupling_ops() -> (ComplexMatrix, ComplexMatrix) {
    (coupling_op(Particle::A), coupling_op(Particle::B))
}

/// Projector onto one site of one particle.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteProjector {
    particle: Particle,
    site: usize,
    matrix: ComplexMatrix,
}

impl SiteProjector {
    /// `site` is 0-based and taken mod 3.
    pub fn new(particle: Particle, site: usize) -> Self {
        let site = site % QUTRIT;
        let local = dyad(QUTRIT, site, site);
        let i3 = identity(QUTRIT);
        let matrix = match particle {
            Particle::A => kron(&local, &i3),
            Particle::B => kron(&i3, &local),
        };
        Self {
            particle,
            site,
            matrix,
        }
    }

    pub fn particle(&self) -> Particle {
        self.particle
    }

    /// 0-based site index.
    pub fn site(&self) -> usize {
        self.site
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// The projector on the next site of the same particle.
    pub fn next(&self) -> Self {
        Self::new(self.particle, self.site + 1)
    }

    /// Human-readable 1-based label such as `2a`.
    pub fn label(&self) -> String {
        format!("{}{}", self.site + 1, self.particle.label())
    }
}

/// The six site projectors, particle `a` first.
pub fn site_projectors() -> Vec<SiteProjector> {
    [Particle::A, Particle::B]
        .into_iter()
        .flat_map(|p| (0..QUTRIT).map(move |j| SiteProjector::new(p, j)))
        .collect()
}
