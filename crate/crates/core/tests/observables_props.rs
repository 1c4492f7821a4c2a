use std::f64::consts::PI;

use proptest::prelude::*;
use qcurrent::master_eq::{build_global, BathParams, Generator, DEFAULT_GAP_TOL};
use qcurrent::numerics::kron;
use qcurrent::observables::{ergotropy, heat_flux, negativity, thermal_state};
use qcurrent::random;
use qcurrent::rotor::{Particle, RotorParams};
use qcurrent::steady_state::{solve_basis, KernelProjector};
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn heat_and_negativity_period_two_thirds_pi(tau in 0.02f64..1.0, phi in 0.1f64..0.95) {
        let g0 = generator(tau, phi, 0.2, 1.0);
        let g1 = generator(tau, phi + 2.0 * PI / 3.0, 0.2, 1.0);
        let b0 = solve_basis(&g0).unwrap();
        let b1 = solve_basis(&g1).unwrap();
        for k in 1..=3 {
            for bath in [Particle::A, Particle::B] {
                let q0 = heat_flux(&g0, b0.state(k), bath);
                let q1 = heat_flux(&g1, b1.state(k), bath);
                prop_assert!((q0 - q1).abs() < 1e-9);
            }
            let n0 = negativity(b0.state(k)).unwrap();
            let n1 = negativity(b1.state(k)).unwrap();
            prop_assert!((n0 - n1).abs() < 1e-9);
        }
    }

    #[test]
    fn negativity_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::density_matrix(&mut r, 9);
        let u = kron(&random::unitary(&mut r, 3), &random::unitary(&mut r, 3));
        let moved = rho.conjugated(&u).unwrap();
        prop_assert!((negativity(&rho).unwrap() - negativity(&moved).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn ergotropy_does_not_grow_at_equal_temperatures(seed in any::<u64>(), tau in 0.02f64..1.0, phi in 0.0f64..6.3, t in 0.3f64..3.0) {
        let gen = generator(tau, phi, t, t);
        let rho0 = random::density_matrix(&mut ChaCha8Rng::seed_from_u64(seed), 9);
        let st = KernelProjector::new(&gen).unwrap().limit(&rho0).unwrap();
        let before = ergotropy(&rho0, &gen.hamiltonian).unwrap();
        let after = ergotropy(&st, &gen.hamiltonian).unwrap();
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }

    #[test]
    fn thermal_states_are_passive(tau in 0.0f64..2.0, phi in 0.0f64..6.3, t in 0.05f64..5.0) {
        let h = qcurrent::rotor::rotor_hamiltonian(&RotorParams::new(tau, 2.0, phi).unwrap());
        prop_assert!(ergotropy(&thermal_state(&h, t).unwrap(), &h).unwrap().abs() < 1e-10);
    }
}

#[test]
fn negativity_sector_ordering() {
    let gen = generator(0.1, PI / 6.0, 0.2, 1.0);
    let basis = solve_basis(&gen).unwrap();
    let n: Vec<f64> = basis
        .states()
        .iter()
        .map(|r| negativity(r).unwrap())
        .collect();
    assert!((n[0] - n[1]).abs() < 1e-9);
    assert!(n[1] >= n[2] && n[2] > 0.0, "{n:?}");
}
