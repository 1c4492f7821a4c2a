//! Probability-current operators and their averages.
//!
//! For vertex projectors `x_j` the current along `j -> j'` is
//! `J = {x_j, dx_j'/dt}/2 - {x_j', dx_j/dt}/2` with `dx/dt` given by the
//! Heisenberg-picture generator. It splits into a tunneling part driven by
//! the Hamiltonian and a thermal part driven by the dissipators.

use crate::error::{Error, Result};
use crate::master_eq::Generator;
use crate::numerics::{anticommutator, max_abs, trace, ComplexMatrix, DensityMatrix, C64, QUTRIT};
use crate::rotor::{Particle, SiteProjector};

/// Imaginary parts of averages above this are treated as a bug.
const IMAG_TOL: f64 = 1e-9;

/// Threshold below which a Margenau-Hill rate counts as numerically zero.
pub const CONTEXTUALITY_TOL: f64 = 1e-12;

/// Anything that is a vertex projector.
pub trait Vertex {
    fn projector(&self) -> &ComplexMatrix;
}

impl Vertex for ComplexMatrix {
    fn projector(&self) -> &ComplexMatrix {
        self
    }
}

impl Vertex for SiteProjector {
    fn projector(&self) -> &ComplexMatrix {
        self.matrix()
    }
}

fn distinct<'a>(
    xj: &'a impl Vertex,
    xj2: &'a impl Vertex,
) -> Result<(&'a ComplexMatrix, &'a ComplexMatrix)> {
    let (x, y) = (xj.projector(), xj2.projector());
    if x.shape() != y.shape() {
        return Err(Error::Dimension {
            expected: x.nrows(),
            got: y.nrows(),
        });
    }
    if max_abs(&(x * y)) > 1e-12 {
        return Err(Error::SameSite);
    }
    Ok((x, y))
}

/// Directed edge between two sites of one rotor particle (0-based sites).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub particle: Particle,
    pub from: usize,
    pub to: usize,
}

impl Edge {
    pub fn new(particle: Particle, from: usize, to: usize) -> Result<Self> {
        let (from, to) = (from % QUTRIT, to % QUTRIT);
        if from == to {
            return Err(Error::SameSite);
        }
        Ok(Self { particle, from, to })
    }

    /// `j -> j+1` starting at site `j`.
    pub fn forward(particle: Particle, site: usize) -> Self {
        Self {
            particle,
            from: site % QUTRIT,
            to: (site + 1) % QUTRIT,
        }
    }

    pub fn reversed(self) -> Self {
        Self {
            from: self.to,
            to: self.from,
            ..self
        }
    }

    pub fn projectors(&self) -> (SiteProjector, SiteProjector) {
        (
            SiteProjector::new(self.particle, self.from),
            SiteProjector::new(self.particle, self.to),
        )
    }

    /// All six ordered pairs of distinct sites of one particle.
    pub fn all(particle: Particle) -> Vec<Edge> {
        let mut out = Vec::with_capacity(6);
        for from in 0..QUTRIT {
            for to in 0..QUTRIT {
                if from != to {
                    out.push(Self { particle, from, to });
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        format!(
            "{}{}->{}{}",
            self.from + 1,
            self.particle.label(),
            self.to + 1,
            self.particle.label()
        )
    }
}

/// `{x_j, D x_j'}/2 - {x_j', D x_j}/2` for the Heisenberg generator `D`.
pub fn current_op_general(
    gen: &Generator,
    xj: &impl Vertex,
    xj2: &impl Vertex,
) -> Result<ComplexMatrix> {
    let (x, y) = distinct(xj, xj2)?;
    let dx = gen.apply_adjoint(x);
    let dy = gen.apply_adjoint(y);
    Ok((anticommutator(x, &dy) - anticommutator(y, &dx)) * C64::new(0.5, 0.0))
}

/// `i (x_j H x_j' - x_j' H x_j)`.
pub fn tunneling_current_op(
    h: &ComplexMatrix,
    xj: &impl Vertex,
    xj2: &impl Vertex,
) -> Result<ComplexMatrix> {
    let (x, y) = distinct(xj, xj2)?;
    Ok((x * h * y - y * h * x) * C64::new(0.0, 1.0))
}

/// `sum_l gamma_l [{x_j, L^dag x_j' L} - {x_j', L^dag x_j L}] / 2`.
pub fn thermal_current_op(
    gen: &Generator,
    xj: &impl Vertex,
    xj2: &impl Vertex,
) -> Result<ComplexMatrix> {
    let (x, y) = distinct(xj, xj2)?;
    let n = x.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for t in &gen.terms {
        let ly = t.jump_dag() * y * &t.jump;
        let lx = t.jump_dag() * x * &t.jump;
        out += (anticommutator(x, &ly) - anticommutator(y, &lx)) * C64::new(0.5 * t.rate, 0.0);
    }
    Ok(out)
}

/// Tunneling and thermal current operators of one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentOperators {
    pub tunneling: ComplexMatrix,
    pub thermal: ComplexMatrix,
    pub total: ComplexMatrix,
    pub edge: Edge,
}

impl CurrentOperators {
    pub fn new(gen: &Generator, edge: Edge) -> Result<Self> {
        let (x, y) = edge.projectors();
        let tunneling = tunneling_current_op(&gen.hamiltonian, &x, &y)?;
        let thermal = thermal_current_op(gen, &x, &y)?;
        let total = &tunneling + &thermal;
        Ok(Self {
            tunneling,
            thermal,
            total,
            edge,
        })
    }
}

/// Averages of the current flavours.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentAverage {
    pub tun: f64,
    pub th: f64,
    pub total: f64,
}

impl std::ops::Add for CurrentAverage {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            tun: self.tun + o.tun,
            th: self.th + o.th,
            total: self.total + o.total,
        }
    }
}

impl std::ops::Mul<f64> for CurrentAverage {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            tun: self.tun * s,
            th: self.th * s,
            total: self.total * s,
        }
    }
}

/// `tr(rho op)`, which must be real.
pub fn real_expectation(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<f64> {
    let v = rho.expect(op);
    if v.im.abs() > IMAG_TOL {
        return Err(Error::NonHermitianCurrent(v.im));
    }
    Ok(v.re)
}

pub fn average_current(ops: &CurrentOperators, rho: &DensityMatrix) -> Result<CurrentAverage> {
    Ok(CurrentAverage {
        tun: real_expectation(rho, &ops.tunneling)?,
        th: real_expectation(rho, &ops.thermal)?,
        total: real_expectation(rho, &ops.total)?,
    })
}

/// Average current of one particle along `site -> site + 1`.
pub fn particle_current(
    gen: &Generator,
    rho: &DensityMatrix,
    particle: Particle,
    site: usize,
) -> Result<CurrentAverage> {
    average_current(
        &CurrentOperators::new(gen, Edge::forward(particle, site))?,
        rho,
    )
}

/// Current inferred from two projective position measurements.
pub fn tsm_current(
    gen: &Generator,
    rho: &DensityMatrix,
    xj: &impl Vertex,
    xj2: &impl Vertex,
) -> Result<f64> {
    let (x, y) = distinct(xj, xj2)?;
    let r = rho.matrix();
    let flow = |a: &ComplexMatrix, b: &ComplexMatrix| -> C64 {
        let collapsed = a * r * a;
        gen.terms
            .iter()
            .map(|t| trace(&(&t.jump * &collapsed * t.jump_dag() * b)) * t.rate)
            .sum()
    };
    Ok((flow(x, y) - flow(y, x)).re)
}

/// Time derivative of the Margenau-Hill distribution for `x_j` then `x_j'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MHRate {
    pub value: f64,
}

/// `Re tr[x_j D(x_j') rho]`.
pub fn mh_rate(
    gen: &Generator,
    rho: &DensityMatrix,
    xj: &impl Vertex,
    xj2: &impl Vertex,
) -> Result<MHRate> {
    let (x, y) = distinct(xj, xj2)?;
    let dy = gen.apply_adjoint(y);
    Ok(MHRate {
        value: trace(&(x * dy * rho.matrix())).re,
    })
}

/// Finite-`eps` weak value `tr[x_j {rho, x_j'(eps)}] / (2 tr[x_j'(eps) rho])`
/// with `x_j'(eps) = x_j' + eps D(x_j')`.
pub fn weak_value(
    gen: &Generator,
    rho: &DensityMatrix,
    xj: &impl Vertex,
    xj2: &impl Vertex,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Parameter {
            name: "eps",
            reason: format!("{eps} must be positive"),
        });
    }
    let (x, y) = distinct(xj, xj2)?;
    let y_eps = y + gen.apply_adjoint(y) * C64::new(eps, 0.0);
    let r = rho.matrix();
    let num = trace(&(x * anticommutator(r, &y_eps))).re;
    let den = 2.0 * trace(&(&y_eps * r)).re;
    if den.abs() <= 1e-14 {
        return Err(Error::Postselection(den));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextualityWitness {
    pub is_contextual: bool,
    pub min_mh: f64,
    pub edge: Edge,
}

/// Smallest Margenau-Hill rate over the ordered site pairs of a particle.
pub fn contextuality_witness(
    gen: &Generator,
    rho: &DensityMatrix,
    particle: Particle,
) -> Result<ContextualityWitness> {
    let mut best: Option<(f64, Edge)> = None;
    for edge in Edge::all(particle) {
        let (x, y) = edge.projectors();
        let mu = mh_rate(gen, rho, &x, &y)?.value;
        if best.is_none_or(|(m, _)| mu < m) {
            best = Some((mu, edge));
        }
    }
    let (min_mh, edge) = best.expect("a qutrit has ordered site pairs");
    Ok(ContextualityWitness {
        is_contextual: min_mh < -CONTEXTUALITY_TOL,
        min_mh,
        edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master_eq::{
        build_classical, build_global, BathParams, GeneratorKind, LindbladTerm, DEFAULT_GAP_TOL,
    };
    use crate::numerics::{diag_real, dyad, max_abs_diff, zeros};
    use crate::random;
    use crate::rotor::{RotorParams, DIM};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn fig2_global(tau: f64) -> Generator {
        let p = RotorParams::new(tau, 2.0, PI / 6.0).unwrap();
        let b = BathParams::new(0.2, 1.0, 0.2, 0.2).unwrap();
        build_global(&p, &b, DEFAULT_GAP_TOL).unwrap()
    }

    fn vertex(j: usize) -> ComplexMatrix {
        dyad(3, j, j)
    }

    #[test]
    fn general_operator_examples() {
        let (x, y) = Edge::forward(Particle::A, 0).projectors();
        let zero = Generator::zero(DIM);
        assert!(max_abs(&current_op_general(&zero, &x, &y).unwrap()) == 0.0);
        let gen = fig2_global(0.1);
        let fwd = current_op_general(&gen, &x, &y).unwrap();
        let back = current_op_general(&gen, &y, &x).unwrap();
        assert!(max_abs(&(&fwd + &back)) < 1e-15);
        let split = CurrentOperators::new(&gen, Edge::forward(Particle::A, 0)).unwrap();
        assert!(max_abs_diff(&fwd, &split.total) < 1e-12);
        assert_eq!(current_op_general(&gen, &x, &x), Err(Error::SameSite));
    }

    #[test]
    fn tunneling_examples() {
        let (x, y) = Edge::forward(Particle::A, 0).projectors();
        let d = diag_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert!(max_abs(&tunneling_current_op(&d, &x, &y).unwrap()) == 0.0);

        let tau = 0.1;
        let gen = fig2_global(tau);
        let j = tunneling_current_op(&gen.hamiltonian, &x, &y).unwrap();
        let mut local = zeros(3);
        local[(0, 1)] = C64::new(0.0, tau);
        local[(1, 0)] = C64::new(0.0, -tau);
        let expect = crate::numerics::kron(&local, &crate::numerics::identity(3));
        assert!(max_abs_diff(&j, &expect) < 1e-15);
        assert!(trace(&j).norm() < 1e-15);
    }

    #[test]
    fn thermal_single_qutrit_dyad() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (g01, g10) = (0.7, 0.3);
        let terms = vec![
            LindbladTerm::new(g01, dyad(3, 1, 0), Particle::A, 0.0).unwrap(),
            LindbladTerm::new(g10, dyad(3, 0, 1), Particle::A, 0.0).unwrap(),
        ];
        let gen = Generator::new(zeros(3), terms, GeneratorKind::Classical).unwrap();
        let rho = random::density_matrix(&mut rng, 3);
        let op = thermal_current_op(&gen, &vertex(0), &vertex(1)).unwrap();
        let avg = real_expectation(&rho, &op).unwrap();
        let r = rho.matrix();
        assert!((avg - (g01 * r[(0, 0)].re - g10 * r[(1, 1)].re)).abs() < 1e-14);

        let bare = Generator::new(
            random::hermitian(&mut rng, 3),
            vec![],
            GeneratorKind::Global,
        )
        .unwrap();
        assert!(max_abs(&thermal_current_op(&bare, &vertex(0), &vertex(2)).unwrap()) == 0.0);
    }

    #[test]
    fn average_examples() {
        let gen = fig2_global(0.1);
        let ops = CurrentOperators::new(&gen, Edge::forward(Particle::A, 1)).unwrap();
        let mixed = DensityMatrix::maximally_mixed(DIM);
        assert!(average_current(&ops, &mixed).unwrap().tun.abs() < 1e-15);

        let p = RotorParams::new(0.1, 2.0, PI / 6.0).unwrap();
        let gen = build_global(&p, &BathParams::equal(0.7, 0.2).unwrap(), DEFAULT_GAP_TOL).unwrap();
        let e = crate::numerics::hermitian_eig(&gen.hamiltonian).unwrap();
        let th = e.map(|x| (-(x - e.values[0]) / 0.7).exp());
        let th = DensityMatrix::normalized(&th).unwrap();
        for particle in [Particle::A, Particle::B] {
            let avg = particle_current(&gen, &th, particle, 0).unwrap();
            assert!(avg.total.abs() < 1e-12);
        }
    }

    #[test]
    fn classical_regime_matches_rate_current() {
        let p = RotorParams::new(0.0, 2.0, PI / 6.0).unwrap();
        let b = BathParams::new(0.2, 1.0, 0.2, 0.2).unwrap();
        let c = build_classical(&p, &b).unwrap();
        let gen = c.to_generator().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random::diagonal_density_matrix(&mut rng, DIM);
        let pops: Vec<f64> = (0..DIM).map(|i| rho.matrix()[(i, i)].re).collect();
        let edge = Edge::forward(Particle::A, 2);
        let (x, y) = edge.projectors();
        let avg = average_current(&CurrentOperators::new(&gen, edge).unwrap(), &rho).unwrap();
        let expect: f64 = (0..QUTRIT)
            .map(|jb| c.current(&pops, 3 * edge.from + jb, 3 * edge.to + jb))
            .sum();
        assert!((avg.total - expect).abs() < 1e-14);
        let tsm = tsm_current(&gen, &rho, &x, &y).unwrap();
        assert!((tsm - avg.th).abs() < 1e-14);
        let mu = mh_rate(&gen, &rho, &x, &y).unwrap().value;
        let expect: f64 = (0..QUTRIT)
            .map(|jb| pops[3 * edge.from + jb] * c.rate(3 * edge.from + jb, 3 * edge.to + jb))
            .sum();
        assert!((mu - expect).abs() < 1e-14 && mu >= 0.0);
        let wv = weak_value(&gen, &rho, &x, &y, 1e-3).unwrap();
        assert!((0.0..=1.0).contains(&wv));
        assert!(
            !contextuality_witness(&gen, &rho, Particle::A)
                .unwrap()
                .is_contextual
        );
    }

    #[test]
    fn tsm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random::density_matrix(&mut rng, DIM);
        let (x, y) = Edge::forward(Particle::B, 0).projectors();
        let bare = Generator::new(
            random::hermitian(&mut rng, DIM),
            vec![],
            GeneratorKind::Global,
        )
        .unwrap();
        assert_eq!(tsm_current(&bare, &rho, &x, &y).unwrap(), 0.0);

        let p = RotorParams::new(0.1, 2.0, PI / 6.0).unwrap();
        let b = BathParams::new(0.2, 1.0, 0.2, 0.2).unwrap();
        let gen = build_global(&p, &b, DEFAULT_GAP_TOL).unwrap();
        let basis = crate::steady_state::solve_basis(&gen).unwrap();
        let (x, y) = Edge::forward(Particle::A, 0).projectors();
        let tsm = tsm_current(&gen, &basis.rho1, &x, &y).unwrap();
        let avg = particle_current(&gen, &basis.rho1, Particle::A, 0).unwrap();
        assert!((tsm - avg.total).abs() > 1e-6);
    }

    #[test]
    fn mh_identity_and_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let gen = fig2_global(0.1);
        let zero = Generator::zero(DIM);
        for _ in 0..5 {
            let rho = random::density_matrix(&mut rng, DIM);
            for edge in Edge::all(Particle::A) {
                let (x, y) = edge.projectors();
                let avg =
                    average_current(&CurrentOperators::new(&gen, edge).unwrap(), &rho).unwrap();
                let fwd = mh_rate(&gen, &rho, &x, &y).unwrap().value;
                let back = mh_rate(&gen, &rho, &y, &x).unwrap().value;
                assert!((avg.total - (fwd - back)).abs() < 1e-12);
                assert_eq!(mh_rate(&zero, &rho, &x, &y).unwrap().value, 0.0);
            }
        }
        let rho = random::density_matrix(&mut rng, DIM);
        let (x, y) = Edge::forward(Particle::A, 0).projectors();
        let mu = mh_rate(&gen, &rho, &x, &y).unwrap().value;
        let py = rho.expect(y.matrix()).re;
        let slope = |eps: f64| weak_value(&gen, &rho, &x, &y, eps).unwrap() / eps * py;
        assert!((slope(1e-6) - mu).abs() < 1e-5);
        assert!((slope(1e-7) - mu).abs() < (slope(1e-6) - mu).abs() + 1e-12);
    }

    #[test]
    fn maximally_mixed_is_not_contextual() {
        let rho = DensityMatrix::maximally_mixed(DIM);
        for tau in [0.05, 0.1, 0.5] {
            let w = contextuality_witness(&fig2_global(tau), &rho, Particle::A).unwrap();
            assert!(!w.is_contextual, "tau = {tau}: {}", w.min_mh);
        }
    }

    #[test]
    fn weak_value_rejects_bad_input() {
        let gen = fig2_global(0.1);
        let rho = DensityMatrix::maximally_mixed(DIM);
        let (x, y) = Edge::forward(Particle::A, 0).projectors();
        assert!(weak_value(&gen, &rho, &x, &y, 0.0).is_err());
        let pure = DensityMatrix::new(dyad(DIM, 0, 0)).unwrap();
        let zero = Generator::zero(DIM);
        assert!(matches!(
            weak_value(&zero, &pure, &x, &y, 1e-3),
            Err(Error::Postselection(_))
        ));
    }
}
