//! Markovian generators for the rotor: classical rate matrix, local
//! (phenomenological) GKLS equation and the microscopically derived global
//! GKLS equation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::{
    dyad, hermitian_eig, identity, kernel_basis, kron, re, zeros, ComplexMatrix, C64, KERNEL_TOL,
    QUTRIT,
};
use crate::rotor::{coupling_op, potts_potential, rotor_hamiltonian, Particle, RotorParams, DIM};

/// Relative clustering tolerance for energy levels and Bohr frequencies.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Jump operators with every entry below this are dropped.
const ZERO_JUMP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub t_a: f64,
    pub t_b: f64,
    pub g_a: f64,
    pub g_b: f64,
}

impl BathParams {
    pub fn new(t_a: f64, t_b: f64, g_a: f64, g_b: f64) -> Result<Self> {
        let b = Self { t_a, t_b, g_a, g_b };
        b.validate()?;
        Ok(b)
    }

    /// Both baths at the same temperature and coupling.
    pub fn equal(t: f64, g: f64) -> Result<Self> {
        Self::new(t, t, g, g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("T_a", self.t_a),
            ("T_b", self.t_b),
            ("g_a", self.g_a),
            ("g_b", self.g_b),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter {
                    name,
                    reason: format!("{v} must be positive and finite"),
                });
            }
        }
        Ok(())
    }

    pub fn temperature(&self, bath: Particle) -> f64 {
        match bath {
            Particle::A => self.t_a,
            Particle::B => self.t_b,
        }
    }

    pub fn beta(&self, bath: Particle) -> f64 {
        1.0 / self.temperature(bath)
    }

    pub fn g(&self, bath: Particle) -> f64 {
        match bath {
            Particle::A => self.g_a,
            Particle::B => self.g_b,
        }
    }
}

/// Bosonic bath rate `g|w| / (1 - e^{-beta|w|})`, times `e^{beta w}` for `w < 0`.
pub fn bath_rate(omega: f64, beta: f64, g: f64) -> f64 {
    if omega == 0.0 {
        return g / beta;
    }
    let up = g * omega.abs() / -(-beta * omega.abs()).exp_m1();
    if omega > 0.0 {
        up
    } else {
        up * (beta * omega).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Classical,
    Local,
    Global,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Classical => "classical",
            GeneratorKind::Local => "local",
            GeneratorKind::Global => "global",
        }
    }
}

/// One dissipative channel `rate * S[jump]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladTerm {
    pub rate: f64,
    pub jump: ComplexMatrix,
    pub bath: Particle,
    /// Frequency at which the bath rate was evaluated.
    pub frequency: f64,
    jump_dag: ComplexMatrix,
    decay: ComplexMatrix,
}

impl LindbladTerm {
    pub fn new(rate: f64, jump: ComplexMatrix, bath: Particle, frequency: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Parameter {
                name: "rate",
                reason: format!("{rate} must be non-negative"),
            });
        }
        let jump_dag = jump.adjoint();
        let decay = &jump_dag * &jump;
        Ok(Self {
            rate,
            jump,
            bath,
            frequency,
            jump_dag,
            decay,
        })
    }

    pub fn jump_dag(&self) -> &ComplexMatrix {
        &self.jump_dag
    }

    /// `L^dagger L`.
    pub fn decay(&self) -> &ComplexMatrix {
        &self.decay
    }

    /// `rate (L rho L^dagger - {L^dagger L, rho}/2)`.
    pub fn dissipate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let jump_part = &self.jump * rho * &self.jump_dag;
        let anti = &self.decay * rho + rho * &self.decay;
        (jump_part - anti * re(0.5)) * re(self.rate)
    }

    /// Heisenberg-picture dual of [`dissipate`](Self::dissipate).
    pub fn dissipate_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let jump_part = &self.jump_dag * x * &self.jump;
        let anti = &self.decay * x + x * &self.decay;
        (jump_part - anti * re(0.5)) * re(self.rate)
    }
}

/// A Hamiltonian plus dissipative channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub hamiltonian: ComplexMatrix,
    pub terms: Vec<LindbladTerm>,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn new(
        hamiltonian: ComplexMatrix,
        terms: Vec<LindbladTerm>,
        kind: GeneratorKind,
    ) -> Result<Self> {
        let n = hamiltonian.nrows();
        if !hamiltonian.is_square() {
            return Err(Error::NotSquare {
                rows: n,
                cols: hamiltonian.ncols(),
            });
        }
        if let Some(t) = terms.iter().find(|t| t.jump.shape() != (n, n)) {
            return Err(Error::Dimension {
                expected: n,
                got: t.jump.nrows(),
            });
        }
        Ok(Self {
            hamiltonian,
            terms,
            kind,
        })
    }

    /// The zero generator on an `n`-dimensional space.
    pub fn zero(n: usize) -> Self {
        Self {
            hamiltonian: zeros(n),
            terms: Vec::new(),
            kind: GeneratorKind::Global,
        }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// Schroedinger picture `-i[H, rho] + sum_l D_l[rho]`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.hamiltonian;
        let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
        for t in &self.terms {
            out += t.dissipate(rho);
        }
        out
    }

    /// Heisenberg picture `i[H, x] + sum_l D*_l[x]`.
    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.hamiltonian;
        let mut out = (h * x - x * h) * C64::new(0.0, 1.0);
        for t in &self.terms {
            out += t.dissipate_adjoint(x);
        }
        out
    }

    /// Dissipative part only, restricted to one bath when given.
    pub fn dissipator(&self, rho: &ComplexMatrix, bath: Option<Particle>) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
        for t in self
            .terms
            .iter()
            .filter(|t| bath.is_none_or(|b| t.bath == b))
        {
            out += t.dissipate(rho);
        }
        out
    }

    pub fn terms_of(&self, bath: Particle) -> impl Iterator<Item = &LindbladTerm> {
        self.terms.iter().filter(move |t| t.bath == bath)
    }

    /// Column-major matrix of the generator: `vec(L[rho]) = M vec(rho)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        let n = self.dim();
        let id = identity(n);
        let h = &self.hamiltonian;
        let mut m = (kron(&id, h) - kron(&h.transpose(), &id)) * C64::new(0.0, -1.0);
        for t in &self.terms {
            let r = re(t.rate);
            let half = re(0.5 * t.rate);
            m += kron(&t.jump.map(|z| z.conj()), &t.jump) * r;
            m -= kron(&id, t.decay()) * half;
            m -= kron(&t.decay().transpose(), &id) * half;
        }
        m
    }

    /// Numerical dimension of the stationary space.
    pub fn kernel_dim(&self) -> Result<usize> {
        Ok(kernel_basis(&self.superoperator(), KERNEL_TOL)?.len())
    }

    /// Copy with every rate replaced by `f(term)`.
    pub fn with_rates(&self, f: impl Fn(&LindbladTerm) -> f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| LindbladTerm::new(f(t), t.jump.clone(), t.bath, t.frequency))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.hamiltonian.clone(), terms, self.kind)
    }
}

pub fn apply(gen: &Generator, rho: &ComplexMatrix) -> ComplexMatrix {
    gen.apply(rho)
}

pub fn apply_adjoint(gen: &Generator, x: &ComplexMatrix) -> ComplexMatrix {
    gen.apply_adjoint(x)
}

pub fn superoperator_matrix(gen: &Generator) -> ComplexMatrix {
    gen.superoperator()
}

/// Group sorted values by single linkage: a new cluster starts whenever the
/// step to the previous value exceeds `tol`. A step in `(tol, 2 tol)` is
/// reported as ambiguous.
fn cluster_sorted(values: &[f64], tol: f64) -> Result<Vec<std::ops::Range<usize>>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() {
            if !values.is_empty() {
                out.push(start..i);
            }
            break;
        }
        let step = values[i] - values[i - 1];
        if step > tol {
            if step < 2.0 * tol {
                return Err(Error::Degeneracy {
                    left: values[i - 1],
                    right: values[i],
                    tol,
                });
            }
            out.push(start..i);
            start = i;
        }
    }
    Ok(out)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Tolerance `rel * max|E|` for the spectrum of `h`.
pub fn absolute_gap_tol(h: &ComplexMatrix, rel: f64) -> Result<f64> {
    let e = hermitian_eig(h)?;
    Ok(rel * e.values.iter().fold(0.0_f64, |a, x| a.max(x.abs())))
}

/// Bohr-frequency decomposition `A = sum_w Lambda(w)` of a coupling operator.
///
/// `Lambda(w) = sum_{E_k - E_m = w} Pi_m A Pi_k`. Levels and frequencies are
/// clustered with the absolute tolerance `gap_tol`. Frequencies whose
/// operator vanishes are omitted. Output is sorted by frequency.
pub fn global_jump_ops(
    h: &ComplexMatrix,
    a_op: &ComplexMatrix,
    gap_tol: f64,
) -> Result<Vec<(f64, ComplexMatrix)>> {
    if !(gap_tol >= 0.0) {
        return Err(Error::Tolerance(gap_tol));
    }
    let eig = hermitian_eig(h)?;
    let n = eig.values.len();
    if a_op.shape() != (n, n) {
        return Err(Error::Dimension {
            expected: n,
            got: a_op.nrows(),
        });
    }
    let levels: Vec<(f64, ComplexMatrix)> = cluster_sorted(&eig.values, gap_tol)?
        .into_iter()
        .map(|r| {
            let v = eig.vectors.columns(r.start, r.len());
            (mean(&eig.values[r]), v * v.adjoint())
        })
        .collect();

    let mut pieces: Vec<(f64, ComplexMatrix)> = Vec::with_capacity(levels.len() * levels.len());
    for (ek, pk) in &levels {
        for (em, pm) in &levels {
            pieces.push((ek - em, pm * a_op * pk));
        }
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let freqs: Vec<f64> = pieces.iter().map(|p| p.0).collect();

    let mut out = Vec::new();
    for r in cluster_sorted(&freqs, gap_tol)? {
        let omega = mean(&freqs[r.clone()]);
        let mut lambda = zeros(n);
        for (_, m) in &pieces[r] {
            lambda += m;
        }
        if lambda.iter().any(|z| z.norm() > ZERO_JUMP) {
            out.push((omega, lambda));
        }
    }
    Ok(out)
}

/// Global GKLS generator; `rel_gap_tol` is relative to `max|E|`.
pub fn build_global(p: &RotorParams, b: &BathParams, rel_gap_tol: f64) -> Result<Generator> {
    p.validate()?;
    b.validate()?;
    let h = rotor_hamiltonian(p);
    let tol = absolute_gap_tol(&h, rel_gap_tol)?;
    let mut terms = Vec::new();
    for bath in [Particle::A, Particle::B] {
        let a = coupling_op(bath);
        for (omega, lambda) in global_jump_ops(&h, &a, tol)? {
            let rate = bath_rate(omega, b.beta(bath), b.g(bath));
            terms.push(LindbladTerm::new(rate, lambda, bath, omega)?);
        }
    }
    Generator::new(h, terms, GeneratorKind::Global)
}

/// Relative gap tolerances tried by [`build_global_resolved`], in order.
pub const GAP_TOL_LADDER: [f64; 5] = [DEFAULT_GAP_TOL, 1e-7, 1e-6, 1e-5, 1e-4];

/// Global generator with the first tolerance of [`GAP_TOL_LADDER`] that
/// clusters the spectrum unambiguously, together with that tolerance.
///
/// Widening merges Bohr frequencies split by less than the tolerance, which
/// only happens for splittings far below the bath rates.
pub fn build_global_resolved(p: &RotorParams, b: &BathParams) -> Result<(Generator, f64)> {
    let mut last = None;
    for rel in GAP_TOL_LADDER {
        match build_global(p, b, rel) {
            Ok(gen) => return Ok((gen, rel)),
            Err(e @ Error::Degeneracy { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("ladder is not empty"))
}

/// One classical hop of a single particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub from: usize,
    pub to: usize,
    pub particle: Particle,
    /// `U_from - U_to`.
    pub omega: f64,
    pub rate: f64,
}

/// Rate matrix of the classical chain on configurations `(j_a, j_b)`.
///
/// `w[(f, i)]` is the rate of `i -> f`, so `dp/dt = w p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalGenerator {
    pub w: DMatrix<f64>,
    pub hops: Vec<Hop>,
    pub potential: [[f64; QUTRIT]; QUTRIT],
}

impl ClassicalGenerator {
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.w[(to, from)]
    }

    /// Probability flux `p_i W_{i->f} - p_f W_{f->i}`.
    pub fn current(&self, p: &[f64], from: usize, to: usize) -> f64 {
        p[from] * self.rate(from, to) - p[to] * self.rate(to, from)
    }

    pub fn kernel_dim(&self) -> Result<usize> {
        Ok(kernel_basis(&self.w.map(re), KERNEL_TOL)?.len())
    }

    /// Stationary distribution, assuming a one-dimensional kernel.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let k = kernel_basis(&self.w.map(re), KERNEL_TOL)?;
        if k.len() != 1 {
            return Err(Error::KernelDimension(k.len()));
        }
        let v: Vec<f64> = k[0].iter().map(|z| z.re).collect();
        let s: f64 = v.iter().sum();
        Ok(v.iter().map(|x| x / s).collect())
    }

    /// The chain as a GKLS generator with `H = diag(U)` and vertex dyads.
    pub fn to_generator(&self) -> Result<Generator> {
        let mut h = zeros(DIM);
        for ja in 0..QUTRIT {
            for jb in 0..QUTRIT {
                h[(3 * ja + jb, 3 * ja + jb)] = re(self.potential[ja][jb]);
            }
        }
        let terms = self.dyad_terms()?;
        Generator::new(h, terms, GeneratorKind::Classical)
    }

    fn dyad_terms(&self) -> Result<Vec<LindbladTerm>> {
        self.hops
            .iter()
            .map(|hop| {
                LindbladTerm::new(
                    hop.rate,
                    dyad(DIM, hop.to, hop.from),
                    hop.particle,
                    hop.omega,
                )
            })
            .collect()
    }
}

pub fn build_classical(p: &RotorParams, b: &BathParams) -> Result<ClassicalGenerator> {
    p.validate()?;
    b.validate()?;
    let u = potts_potential(p);
    let mut w = DMatrix::<f64>::zeros(DIM, DIM);
    let mut hops = Vec::with_capacity(4 * DIM);
    for ja in 0..QUTRIT {
        for jb in 0..QUTRIT {
            let from = 3 * ja + jb;
            for step in [1, QUTRIT - 1] {
                let targets = [
                    (Particle::A, (ja + step) % QUTRIT, jb),
                    (Particle::B, ja, (jb + step) % QUTRIT),
                ];
                for (particle, fa, fb) in targets {
                    let to = 3 * fa + fb;
                    let omega = u[ja][jb] - u[fa][fb];
                    let rate = bath_rate(omega, b.beta(particle), b.g(particle));
                    w[(to, from)] += rate;
                    w[(from, from)] -= rate;
                    hops.push(Hop {
                        from,
                        to,
                        particle,
                        omega,
                        rate,
                    });
                }
            }
        }
    }
    Ok(ClassicalGenerator {
        w,
        hops,
        potential: u,
    })
}

/// Local GKLS generator: the rotor Hamiltonian with classical hops as jumps.
pub fn build_local(p: &RotorParams, b: &BathParams) -> Result<Generator> {
    let c = build_classical(p, b)?;
    Generator::new(rotor_hamiltonian(p), c.dyad_terms()?, GeneratorKind::Local)
}

/// Generator of the chosen kind at the given parameters.
pub fn build(kind: GeneratorKind, p: &RotorParams, b: &BathParams) -> Result<Generator> {
    match kind {
        GeneratorKind::Global => build_global(p, b, DEFAULT_GAP_TOL),
        GeneratorKind::Local => build_local(p, b),
        GeneratorKind::Classical => build_classical(p, b)?.to_generator(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{commutator, max_abs, max_abs_diff, trace, unvectorize, vectorize};
    use crate::random;
    use crate::rotor::global_rotation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn fig2(tau: f64, phi: f64) -> (RotorParams, BathParams) {
        (
            RotorParams::new(tau, 2.0, phi).unwrap(),
            BathParams::new(0.2, 1.0, 0.2, 0.2).unwrap(),
        )
    }

    fn thermal(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let e = hermitian_eig(h).unwrap();
        let e0 = e.values[0];
        let m = e.map(|x| (-(x - e0) / t).exp());
        let z = trace(&m);
        m / z
    }

    #[test]
    fn rate_examples() {
        let (w, beta) = (1.7, 2.3);
        let ratio = bath_rate(-w, beta, 0.4) / bath_rate(w, beta, 0.4);
        assert!((ratio - (-beta * w).exp()).abs() < 1e-12);
        assert!((bath_rate(1.0, 1e3, 1.0) - 1.0).abs() < 1e-6);
        assert!(bath_rate(-1.0, 1e3, 1.0) < 1e-300);
        assert_eq!(bath_rate(0.0, 4.0, 0.2), 0.2 * 0.25);
        assert!((bath_rate(1e-9, 4.0, 0.2) - 0.05).abs() < 1e-9);
    }

    #[test]
    fn two_level_jump_ops() {
        let h = crate::numerics::diag_real(&[0.0, 1.0]);
        let a = crate::numerics::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let ops = global_jump_ops(&h, &a, 1e-8).unwrap();
        assert_eq!(ops.len(), 2);
        assert!((ops[0].0 + 1.0).abs() < 1e-12 && (ops[1].0 - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&ops[0].1, &ops[1].1.adjoint()) < 1e-15);
    }

    #[test]
    fn jump_ops_complete_and_symmetric() {
        let (p, _) = fig2(0.1, PI / 6.0);
        let h = rotor_hamiltonian(&p);
        let r = global_rotation().r;
        for bath in [Particle::A, Particle::B] {
            let a = coupling_op(bath);
            let ops =
                global_jump_ops(&h, &a, absolute_gap_tol(&h, DEFAULT_GAP_TOL).unwrap()).unwrap();
            let sum = ops.iter().fold(zeros(DIM), |acc, (_, l)| acc + l);
            assert!(max_abs_diff(&sum, &a) < 1e-10);
            for (w, l) in &ops {
                assert!(max_abs(&commutator(l, &r)) < 1e-10);
                let partner = ops
                    .iter()
                    .find(|(v, _)| (v + w).abs() < 1e-9)
                    .expect("negative partner");
                assert!(max_abs_diff(&partner.1, &l.adjoint()) < 1e-10);
            }
        }
    }

    #[test]
    fn ambiguous_clustering_is_reported() {
        let h = crate::numerics::diag_real(&[0.0, 1.5e-8, 1.0]);
        let a = crate::numerics::from_real_rows(&[
            &[0.0, 1.0, 1.0],
            &[1.0, 0.0, 1.0],
            &[1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            global_jump_ops(&h, &a, 1e-8),
            Err(Error::Degeneracy { .. })
        ));
    }

    #[test]
    fn resolved_build_widens_only_when_needed() {
        let b = BathParams::new(0.2, 1.0, 0.2, 0.2).unwrap();
        let tiny = RotorParams::new(0.001, 2.0, PI / 6.0).unwrap();
        assert!(matches!(
            build_global(&tiny, &b, DEFAULT_GAP_TOL),
            Err(Error::Degeneracy { .. })
        ));
        let (gen, rel) = build_global_resolved(&tiny, &b).unwrap();
        assert!(rel > DEFAULT_GAP_TOL);
        assert_eq!(gen.kernel_dim().unwrap(), 3);
        let (_, rel) =
            build_global_resolved(&RotorParams::new(0.1, 2.0, PI / 6.0).unwrap(), &b).unwrap();
        assert_eq!(rel, DEFAULT_GAP_TOL);
    }

    #[test]
    fn global_thermal_state_is_stationary() {
        for t in [0.5, 1.0, 2.0] {
            let p = RotorParams::new(0.1, 2.0, PI / 6.0).unwrap();
            let gen =
                build_global(&p, &BathParams::equal(t, 0.2).unwrap(), DEFAULT_GAP_TOL).unwrap();
            let rho = thermal(&gen.hamiltonian, t);
            assert!(max_abs(&gen.apply(&rho)) < 1e-10, "T = {t}");
        }
    }

    #[test]
    fn global_covariance_and_trace() {
        let (p, b) = fig2(0.1, PI / 6.0);
        let gen = build_global(&p, &b, DEFAULT_GAP_TOL).unwrap();
        let r = global_rotation().r;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let rho = random::density_matrix(&mut rng, DIM).into_matrix();
            let out = gen.apply(&rho);
            assert!(trace(&out).norm() < 1e-12);
            let lhs = &r * &out * r.adjoint();
            let rhs = gen.apply(&(&r * &rho * r.adjoint()));
            assert!(max_abs_diff(&lhs, &rhs) < 1e-11);
        }
    }

    #[test]
    fn classical_examples() {
        let (p, b) = fig2(0.0, PI / 6.0);
        let c = build_classical(&p, &b).unwrap();
        for hop in c.hops.iter().filter(|h| h.particle == Particle::A) {
            let back = c.rate(hop.to, hop.from);
            let ratio = hop.rate / back;
            assert!(
                (ratio - (b.beta(Particle::A) * hop.omega).exp()).abs() < 1e-12 * ratio.max(1.0)
            );
        }
        for col in 0..DIM {
            assert!(c.w.column(col).sum().abs() < 1e-14);
        }
        assert_eq!(c.kernel_dim().unwrap(), 1);

        let c0 = build_classical(&p.with_k(0.0), &b).unwrap();
        for hop in &c0.hops {
            let expect = b.g(hop.particle) * b.temperature(hop.particle);
            assert!((hop.rate - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn local_examples() {
        let (p, b) = fig2(0.0, PI / 6.0);
        let c = build_classical(&p, &b).unwrap();
        let gen = build_local(&p, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random::diagonal_density_matrix(&mut rng, DIM);
        let out = gen.apply(rho.matrix());
        let pops: Vec<f64> = (0..DIM).map(|i| rho.matrix()[(i, i)].re).collect();
        for f in 0..DIM {
            let wp: f64 = (0..DIM).map(|i| c.w[(f, i)] * pops[i]).sum();
            assert!((out[(f, f)].re - wp).abs() < 1e-14);
        }

        let gen = build_local(&p.with_tau(0.2), &b).unwrap();
        assert_eq!(gen.kernel_dim().unwrap(), 1);

        let r = global_rotation().r;
        let rho = random::density_matrix(&mut rng, DIM).into_matrix();
        let lhs = &r * gen.apply(&rho) * r.adjoint();
        let rhs = gen.apply(&(&r * &rho * r.adjoint()));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        assert!(gen
            .terms
            .iter()
            .all(|t| max_abs(&commutator(&t.jump, &r)) > 0.5));
    }

    #[test]
    fn adjoint_examples() {
        let (p, b) = fig2(0.1, PI / 6.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for gen in [
            build_global(&p, &b, DEFAULT_GAP_TOL).unwrap(),
            build_local(&p, &b).unwrap(),
            build_classical(&p, &b).unwrap().to_generator().unwrap(),
        ] {
            assert!(max_abs(&gen.apply_adjoint(&identity(DIM))) < 1e-12);
            let rho = random::density_matrix(&mut rng, DIM).into_matrix();
            let x = random::hermitian(&mut rng, DIM);
            let lhs = trace(&(&x * gen.apply(&rho)));
            let rhs = trace(&(gen.apply_adjoint(&x) * &rho));
            assert!((lhs - rhs).norm() < 1e-12);
        }
        let h = rotor_hamiltonian(&p);
        let gen = Generator::new(h.clone(), vec![], GeneratorKind::Global).unwrap();
        let x = random::hermitian(&mut rng, DIM);
        let expect = commutator(&h, &x) * C64::new(0.0, 1.0);
        assert!(max_abs_diff(&gen.apply_adjoint(&x), &expect) < 1e-15);
    }

    #[test]
    fn superoperator_examples() {
        assert!(max_abs(&Generator::zero(DIM).superoperator()) == 0.0);
        let (p, b) = fig2(0.1, PI / 6.0);
        let gen = build_global(&p, &b, DEFAULT_GAP_TOL).unwrap();
        let m = gen.superoperator();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let rho = random::density_matrix(&mut rng, DIM).into_matrix();
            let via = unvectorize(&(&m * vectorize(&rho)), DIM);
            assert!(max_abs_diff(&via, &gen.apply(&rho)) < 1e-12);
        }
        assert_eq!(gen.kernel_dim().unwrap(), 3);
        let (p, b) = fig2(0.1, PI / 3.0);
        assert_eq!(
            build_global(&p, &b, DEFAULT_GAP_TOL)
                .unwrap()
                .kernel_dim()
                .unwrap(),
            6
        );
    }

    #[test]
    fn bath_split_is_trace_free() {
        let (p, b) = fig2(0.1, PI / 6.0);
        let gen = build_global(&p, &b, DEFAULT_GAP_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random::density_matrix(&mut rng, DIM);
        let da = gen.dissipator(rho.matrix(), Some(Particle::A));
        let db = gen.dissipator(rho.matrix(), Some(Particle::B));
        assert!(trace(&da).norm() < 1e-13 && trace(&db).norm() < 1e-13);
        assert!(max_abs_diff(&(da + db), &gen.dissipator(rho.matrix(), None)) < 1e-15);
    }
}
