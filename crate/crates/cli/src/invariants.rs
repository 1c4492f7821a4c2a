//! Seeded invariant suite with measured residuals.

use std::f64::consts::PI;

use qcurrent::continuum::{continuity_residual, ContinuumParams};
use qcurrent::currents::{current_op_general, particle_current, thermal_current_op, tsm_current};
use qcurrent::master_eq::{
    bath_rate, build, build_global_resolved, BathParams, Generator, GeneratorKind, LindbladTerm,
};
use qcurrent::numerics::{
    dyad, hermitian_eig, kron, max_abs, max_abs_diff, partial_trace, partial_transpose, trace,
    trace_norm, ComplexMatrix,
};
use qcurrent::observables::{ergotropy, negativity, thermal_state};
use qcurrent::oracles::triangle_thermal_current;
use qcurrent::random;
use qcurrent::rotor::{
    local_rotation, potts_potential, rotor_hamiltonian, Particle, RotorParams, SiteProjector,
};
use qcurrent::steady_state::{solve_basis, theta0, KernelProjector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::run::Table;

/// Deliberate corruption used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Every bath rate evaluated at `-omega` instead of `omega`.
    RateSign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantEntry {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl InvariantEntry {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub seed: u64,
    pub entries: Vec<InvariantEntry>,
}

impl InvariantReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.passed()).count()
    }

    pub fn table(&self) -> Table {
        let columns = ["invariant", "residual", "tolerance", "status"]
            .map(String::from)
            .to_vec();
        let rows = self
            .entries
            .iter()
            .map(|e| {
                let status = if e.passed() { "PASS" } else { "FAIL" };
                vec![
                    e.name.to_string(),
                    format!("{:e}", e.residual),
                    format!("{:e}", e.tolerance),
                    status.into(),
                ]
            })
            .collect();
        Table { columns, rows }
    }
}

fn corrupt(gen: &Generator, b: &BathParams, fault: Option<Fault>) -> qcurrent::Result<Generator> {
    match fault {
        None => Ok(gen.clone()),
        Some(Fault::RateSign) => {
            gen.with_rates(|t: &LindbladTerm| bath_rate(-t.frequency, b.beta(t.bath), b.g(t.bath)))
        }
    }
}

struct Suite {
    rng: ChaCha8Rng,
    fault: Option<Fault>,
    entries: Vec<InvariantEntry>,
}

impl Suite {
    fn record(
        &mut self,
        name: &'static str,
        tolerance: f64,
        f: impl FnOnce(&mut Self) -> qcurrent::Result<f64>,
    ) {
        let residual = f(self).unwrap_or(f64::INFINITY);
        let residual = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        self.entries.push(InvariantEntry {
            name,
            residual,
            tolerance,
        });
    }

    fn rotor(&mut self) -> RotorParams {
        let tau = self.rng.random_range(0.02..1.0);
        let phi = self.rng.random_range(0.1..0.95);
        RotorParams { tau, k: 2.0, phi }
    }

    fn global(&mut self, p: &RotorParams, b: &BathParams) -> qcurrent::Result<Generator> {
        corrupt(&build_global_resolved(p, b)?.0, b, self.fault)
    }
}

pub fn run_invariant_suite(seed: u64, fault: Option<Fault>) -> InvariantReport {
    let mut s = Suite {
        rng: ChaCha8Rng::seed_from_u64(seed),
        fault,
        entries: Vec::new(),
    };
    let baths = BathParams {
        t_a: 0.2,
        t_b: 1.0,
        g_a: 0.2,
        g_b: 0.2,
    };

    s.record("numerics: kron mixed product", 1e-12, |s| {
        let m: Vec<ComplexMatrix> = (0..4)
            .map(|i| random::ginibre(&mut s.rng, 2 + i % 2, 2 + i % 2))
            .collect();
        let lhs = kron(&m[0], &m[1]) * kron(&m[2], &m[3]);
        Ok(max_abs_diff(
            &lhs,
            &kron(&(&m[0] * &m[2]), &(&m[1] * &m[3])),
        ))
    });
    s.record("numerics: eigen reconstruction", 1e-9, |s| {
        let h = random::hermitian(&mut s.rng, 9);
        Ok(max_abs_diff(&h, &hermitian_eig(&h)?.reconstruct()))
    });
    s.record("numerics: partial transpose keeps trace", 1e-12, |s| {
        let rho = random::density_matrix(&mut s.rng, 9);
        Ok((trace(&partial_transpose(rho.matrix(), Particle::B)?) - 1.0).norm())
    });
    s.record("numerics: trace norm of a state", 1e-10, |s| {
        let rho = random::density_matrix(&mut s.rng, 9);
        Ok((trace_norm(rho.matrix()) - 1.0).abs())
    });
    s.record("rotor: 2pi/3 phase shift is a rotation of b", 1e-12, |s| {
        let p = s.rotor();
        let rb = local_rotation(Particle::B);
        let shifted = rotor_hamiltonian(&RotorParams {
            phi: p.phi + 2.0 * PI / 3.0,
            ..p
        });
        Ok(max_abs_diff(
            &shifted,
            &(&rb * rotor_hamiltonian(&p) * rb.adjoint()),
        ))
    });
    s.record("rotor: potential is rotation invariant", 1e-12, |s| {
        let u = potts_potential(&s.rotor());
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max((u[(a + 1) % 3][(b + 1) % 3] - u[a][b]).abs());
            }
        }
        Ok(worst)
    });
    s.record("master_eq: detailed balance of rate pairs", 1e-12, |s| {
        let p = s.rotor();
        let gen = s.global(&p, &baths)?;
        let mut worst: f64 = 0.0;
        for up in gen.terms.iter().filter(|t| t.frequency > 0.0) {
            let partner = gen
                .terms
                .iter()
                .find(|t| t.bath == up.bath && (t.frequency + up.frequency).abs() < 1e-9);
            if let Some(down) = partner {
                let expect = (-baths.beta(up.bath) * up.frequency).exp();
                worst = worst.max((down.rate / up.rate / expect - 1.0).abs());
            }
        }
        Ok(worst)
    });
    s.record(
        "master_eq: Gibbs state is stationary at equal temperatures",
        1e-9,
        |s| {
            let p = s.rotor();
            let t = s.rng.random_range(0.3..2.0);
            let b = BathParams {
                t_a: t,
                t_b: t,
                g_a: 0.2,
                g_b: 0.2,
            };
            let gen = s.global(&p, &b)?;
            Ok(max_abs(
                &gen.apply(thermal_state(&gen.hamiltonian, t)?.matrix()),
            ))
        },
    );
    s.record("master_eq: each bath preserves trace", 1e-12, |s| {
        let p = s.rotor();
        let gen = s.global(&p, &baths)?;
        let rho = random::density_matrix(&mut s.rng, 9);
        let a = trace(&gen.dissipator(rho.matrix(), Some(Particle::A))).norm();
        Ok(a.max(trace(&gen.dissipator(rho.matrix(), Some(Particle::B))).norm()))
    });
    s.record(
        "currents: operator continuity for every generator kind",
        1e-11,
        |s| {
            let p = s.rotor();
            let mut worst: f64 = 0.0;
            for kind in [
                GeneratorKind::Classical,
                GeneratorKind::Local,
                GeneratorKind::Global,
            ] {
                let gen = corrupt(&build(kind, &p, &baths)?, &baths, s.fault)?;
                for particle in [Particle::A, Particle::B] {
                    for j in 0..3 {
                        let x = SiteProjector::new(particle, j);
                        let mut inflow = ComplexMatrix::zeros(9, 9);
                        for jp in (0..3).filter(|&jp| jp != j) {
                            inflow +=
                                current_op_general(&gen, &SiteProjector::new(particle, jp), &x)?;
                        }
                        worst = worst.max(max_abs_diff(&gen.apply_adjoint(x.matrix()), &inflow));
                    }
                }
            }
            Ok(worst)
        },
    );
    s.record(
        "currents: thermal current equals regrouped triangle form",
        1e-12,
        |s| {
            let h = random::hermitian(&mut s.rng, 3);
            let mut terms = Vec::new();
            for _ in 0..2 {
                let rate = s.rng.random_range(0.05..2.0);
                terms.push(LindbladTerm::new(
                    rate,
                    random::ginibre(&mut s.rng, 3, 3),
                    Particle::A,
                    0.0,
                )?);
            }
            let gen = Generator::new(h, terms, GeneratorKind::Global)?;
            let x: [ComplexMatrix; 3] = std::array::from_fn(|j| dyad(3, j, j));
            let mut worst: f64 = 0.0;
            for j in 0..3 {
                let direct = thermal_current_op(&gen, &x[j], &x[(j + 1) % 3])?;
                worst = worst.max(max_abs_diff(
                    &direct,
                    &triangle_thermal_current(&gen.terms, &x, j),
                ));
            }
            Ok(worst)
        },
    );
    s.record(
        "currents: TSM equals thermal current for dyad jumps",
        1e-12,
        |s| {
            let p = s.rotor();
            let gen = build(GeneratorKind::Classical, &p, &baths)?;
            let rho = random::density_matrix(&mut s.rng, 9);
            let mut worst: f64 = 0.0;
            for j in 0..3 {
                let (x, y) = (
                    SiteProjector::new(Particle::A, j),
                    SiteProjector::new(Particle::A, (j + 1) % 3),
                );
                let th = rho.expect(&thermal_current_op(&gen, &x, &y)?).re;
                worst = worst.max((tsm_current(&gen, &rho, &x, &y)? - th).abs());
            }
            Ok(worst)
        },
    );
    s.record("steady_state: sector relations and marginals", 1e-9, |s| {
        let p = s.rotor();
        let gen = s.global(&p, &baths)?;
        let basis = solve_basis(&gen)?;
        let j: Vec<_> = basis
            .states()
            .iter()
            .map(|r| particle_current(&gen, r, Particle::A, 0))
            .collect::<qcurrent::Result<_>>()?;
        let mut worst = (j[0].tun + j[1].tun)
            .abs()
            .max((j[0].th - j[1].th).abs())
            .max(j[2].total.abs());
        for r in basis.states() {
            let diff = max_abs_diff(
                partial_trace(r, Particle::A)?.matrix(),
                partial_trace(r, Particle::B)?.matrix(),
            );
            worst = worst.max(diff);
        }
        Ok(worst)
    });
    s.record(
        "steady_state: decomposition matches the long-time limit",
        1e-9,
        |s| {
            let p = s.rotor();
            let gen = s.global(&p, &baths)?;
            let basis = solve_basis(&gen)?;
            let rho0 = random::density_matrix(&mut s.rng, 9);
            let limit = KernelProjector::new(&gen)?.limit(&rho0)?;
            let theta = theta0(&rho0);
            let first = particle_current(&gen, &basis.rho1, Particle::A, 0)?;
            let predicted =
                2.0 * theta.im / 3f64.sqrt() * first.tun + (2.0 - 2.0 * theta.re) / 3.0 * first.th;
            Ok((predicted - particle_current(&gen, &limit, Particle::A, 0)?.total).abs())
        },
    );
    s.record(
        "observables: negativity is local-unitary invariant",
        1e-10,
        |s| {
            let rho = random::density_matrix(&mut s.rng, 9);
            let u = kron(
                &random::unitary(&mut s.rng, 3),
                &random::unitary(&mut s.rng, 3),
            );
            Ok((negativity(&rho)? - negativity(&rho.conjugated(&u)?)?).abs())
        },
    );
    s.record("observables: Gibbs states are passive", 1e-10, |s| {
        let h = rotor_hamiltonian(&s.rotor());
        let t = s.rng.random_range(0.05..5.0);
        Ok(ergotropy(&thermal_state(&h, t)?, &h)?.abs())
    });
    s.record("continuum: discrete continuity at N = 31", 1e-10, |s| {
        let site = s.rng.random_range(-31..=31);
        Ok(continuity_residual(
            &ContinuumParams::new(31, 1.0, 1.0)?,
            site,
        ))
    });
    InvariantReport {
        seed,
        entries: s.entries,
    }
}
