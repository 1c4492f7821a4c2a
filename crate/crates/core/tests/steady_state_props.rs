use std::f64::consts::PI;

use proptest::prelude::*;
use qcurrent::currents::{particle_current, CurrentAverage};
use qcurrent::master_eq::{build_global, BathParams, Generator, DEFAULT_GAP_TOL};
use qcurrent::numerics::{max_abs_diff, partial_trace, DensityMatrix};
use qcurrent::random;
use qcurrent::rotor::{global_rotation, Particle, RotorParams};
use qcurrent::steady_state::{
    asymptotic_state, lambda_from_theta, solve_basis, steady_current_decomposition, theta0,
    weights, KernelProjector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn generator(tau: f64, phi: f64, t_a: f64, t_b: f64) -> Generator {
    build_global(
        &RotorParams::new(tau, 2.0, phi).unwrap(),
        &BathParams::new(t_a, t_b, 0.2, 0.2).unwrap(),
        DEFAULT_GAP_TOL,
    )
    .unwrap()
}

fn current(
    gen: &Generator,
    rho: &DensityMatrix,
    particle: Particle,
    site: usize,
) -> CurrentAverage {
    particle_current(gen, rho, particle, site).unwrap()
}

fn close(a: CurrentAverage, b: CurrentAverage, tol: f64) -> bool {
    (a.tun - b.tun).abs() < tol && (a.th - b.th).abs() < tol && (a.total - b.total).abs() < tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sector_relations(tau in 0.02f64..1.0, phi in 0.1f64..0.95, t_a in 0.2f64..1.0, t_b in 1.0f64..3.0) {
        let gen = generator(tau, phi, t_a, t_b);
        let basis = solve_basis(&gen).unwrap();
        prop_assert_eq!(basis.kernel_dim, 3);
        for particle in [Particle::A, Particle::B] {
            let j1 = current(&gen, &basis.rho1, particle, 0);
            let j2 = current(&gen, &basis.rho2, particle, 0);
            let j3 = current(&gen, &basis.rho3, particle, 0);
            prop_assert!((j1.tun + j2.tun).abs() < 1e-9);
            prop_assert!((j1.th - j2.th).abs() < 1e-9);
            prop_assert!(j3.total.abs() < 1e-9);
            for (k, rho) in basis.states().iter().enumerate() {
                let first = current(&gen, rho, particle, 0);
                for site in 1..3 {
                    prop_assert!(close(first, current(&gen, rho, particle, site), 1e-10), "sector {}", k + 1);
                }
            }
        }
        for rho in basis.states() {
            let ja = current(&gen, rho, Particle::A, 0);
            let jb = current(&gen, rho, Particle::B, 0);
            prop_assert!((ja.tun - jb.tun).abs() < 1e-9);
            let ra = partial_trace(rho, Particle::A).unwrap();
            let rb = partial_trace(rho, Particle::B).unwrap();
            prop_assert!(max_abs_diff(ra.matrix(), rb.matrix()) < 1e-9);
        }
    }

    #[test]
    fn thermal_current_vanishes_at_equal_temperatures(seed in any::<u64>(), tau in 0.02f64..1.0, phi in 0.1f64..0.95, t in 0.3f64..3.0) {
        let gen = generator(tau, phi, t, t);
        let basis = solve_basis(&gen).unwrap();
        let rho0 = random::density_matrix(&mut ChaCha8Rng::seed_from_u64(seed), 9);
        let st = asymptotic_state(&basis, &rho0).unwrap();
        for particle in [Particle::A, Particle::B] {
            prop_assert!(current(&gen, &st, particle, 0).th.abs() < 1e-9);
        }
    }

    #[test]
    fn currents_period_two_thirds_pi(tau in 0.02f64..1.0, phi in 0.1f64..0.95) {
        let g0 = generator(tau, phi, 0.2, 1.0);
        let g1 = generator(tau, phi + 2.0 * PI / 3.0, 0.2, 1.0);
        let b0 = solve_basis(&g0).unwrap();
        let b1 = solve_basis(&g1).unwrap();
        for k in 1..=3 {
            for particle in [Particle::A, Particle::B] {
                let a = current(&g0, b0.state(k), particle, 0);
                let b = current(&g1, b1.state(k), particle, 0);
                prop_assert!(close(a, b, 1e-9));
            }
        }
    }

    #[test]
    fn lambda_matches_sector_traces(seed in any::<u64>()) {
        let rho0 = random::density_matrix(&mut ChaCha8Rng::seed_from_u64(seed), 9);
        let w = weights(&rho0);
        let from_theta = lambda_from_theta(theta0(&rho0));
        for k in 0..3 {
            prop_assert!((w.lambda[k] - from_theta[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn thermal_current_vanishes_at_symmetric_phases() {
    for k in 0..6 {
        let gen = generator(0.1, k as f64 * PI / 3.0, 0.2, 1.0);
        let basis = solve_basis(&gen).unwrap();
        for rho in basis.states() {
            for particle in [Particle::A, Particle::B] {
                assert!(current(&gen, rho, particle, 0).th.abs() < 1e-9, "k = {k}");
            }
        }
    }
}

#[test]
fn decomposition_matches_direct_currents() {
    let gen = generator(0.1, PI / 6.0, 0.2, 1.0);
    let basis = solve_basis(&gen).unwrap();
    let projector = KernelProjector::new(&gen).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let rho0 = random::density_matrix(&mut r, 9);
        let limit = projector.limit(&rho0).unwrap();
        for particle in [Particle::A, Particle::B] {
            let decomposed = steady_current_decomposition(&basis, &rho0, &gen, particle).unwrap();
            let direct = current(&gen, &limit, particle, 0);
            assert!(close(decomposed, direct, 1e-9));
        }
    }
}

#[test]
fn sector_weights_sum_to_one() {
    let sym = global_rotation();
    let total = sym.projector(1) + sym.projector(2) + sym.projector(3);
    assert!(max_abs_diff(&total, &qcurrent::numerics::identity(9)) < 1e-12);
}
