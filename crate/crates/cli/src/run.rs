//! Scenario evaluation into tables.

use std::io::Write;

use qcurrent::continuum::ContinuumParams;
use qcurrent::continuum::{
    continuity_residual, current_error_band, current_error_max, riemann_limit, riemann_sum,
};
use qcurrent::currents::{contextuality_witness, particle_current, weak_value, CurrentAverage};
use qcurrent::master_eq::{build, build_global_resolved, BathParams, Generator};
use qcurrent::numerics::{ode_evolve, ComplexMatrix, DensityMatrix, C64};
use qcurrent::observables::{
    delta_max, ergotropy, heat_flux, negativity, thermal_state, CoherentInputFamily,
};
use qcurrent::rotor::{Particle, RotorParams};
use qcurrent::steady_state::{solve_basis, KernelProjector, SteadyStateBasis};
use rayon::prelude::*;

use crate::config::{InitialSpec, MeKind, OutputGroup, Point, ScenarioConfig};
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DELTA_TOL: f64 = 1e-4;
const WEAK_EPS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    /// CSV with a `#` header echoing the command, seed and full config.
    pub fn write(
        &self,
        out: &mut impl Write,
        command: &str,
        seed: u64,
        config: Option<&ScenarioConfig>,
    ) -> Result<()> {
        let io = |e: std::io::Error| CliError::Output(e.to_string());
        writeln!(out, "# qcurrent-cli {VERSION}").map_err(io)?;
        writeln!(out, "# command: {command}").map_err(io)?;
        writeln!(out, "# seed: {seed}").map_err(io)?;
        if let Some(cfg) = config {
            for line in cfg.to_toml().lines() {
                writeln!(out, "# {line}").map_err(io)?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn generator(kind: MeKind, p: &RotorParams, b: &BathParams) -> Result<Generator> {
    Ok(match kind {
        MeKind::Global => build_global_resolved(p, b)?.0,
        other => build(other.into(), p, b)?,
    })
}

/// Initial state with any file already loaded.
#[derive(Debug, Clone)]
pub enum Initial {
    Spec(InitialSpec),
    Matrix(DensityMatrix),
}

impl Initial {
    pub fn resolve(cfg: &ScenarioConfig) -> Result<Self> {
        match cfg.initial_spec()? {
            InitialSpec::MatrixFile(path) => Ok(Initial::Matrix(read_matrix_file(&path)?)),
            spec => Ok(Initial::Spec(spec)),
        }
    }

    fn sector(&self) -> Option<usize> {
        match self {
            Initial::Spec(InitialSpec::BasisSector(k)) => Some(*k),
            _ => None,
        }
    }

    fn state(&self, gen: &Generator) -> Result<DensityMatrix> {
        Ok(match self {
            Initial::Matrix(m) => m.clone(),
            Initial::Spec(InitialSpec::Thermal(t)) => thermal_state(&gen.hamiltonian, *t)?,
            Initial::Spec(InitialSpec::ProductCoherent(d)) => {
                CoherentInputFamily::new(*d)?.product()
            }
            Initial::Spec(InitialSpec::MaximallyMixed)
            | Initial::Spec(InitialSpec::MatrixFile(_)) => {
                DensityMatrix::maximally_mixed(gen.dim())
            }
            Initial::Spec(InitialSpec::BasisSector(k)) => {
                let sym = qcurrent::rotor::global_rotation();
                DensityMatrix::normalized(sym.projector(*k))?
            }
        })
    }
}

/// Nine rows of nine complex entries written as `re im` pairs, separated by
/// commas or whitespace.
pub fn read_matrix_file(path: &str) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let bad = |why: String| CliError::Config(format!("{path}: {why}"));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| bad(format!("'{t}' is not a number")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.len() != 9 || rows.iter().any(|r| r.len() != 18) {
        return Err(bad("expected 9 rows of 18 numbers".into()));
    }
    let m = ComplexMatrix::from_fn(9, 9, |i, j| C64::new(rows[i][2 * j], rows[i][2 * j + 1]));
    DensityMatrix::new(m).map_err(|e| bad(e.to_string()))
}

struct Evaluated {
    gen: Generator,
    kernel_dim: usize,
    basis: Option<SteadyStateBasis>,
    state: DensityMatrix,
    flagged: bool,
}

fn evaluate(
    cfg: &ScenarioConfig,
    initial: &Initial,
    p: &Point,
    need_basis: bool,
) -> Result<Evaluated> {
    let gen = generator(cfg.generator.kind, &p.rotor, &p.bath)?;
    let kernel_dim = gen.kernel_dim()?;
    let basis = if need_basis || initial.sector().is_some() {
        Some(solve_basis(&gen)?)
    } else {
        None
    };
    let (state, flagged) = match (initial.sector(), &basis) {
        (Some(k), Some(b)) => (b.state(k).clone(), kernel_dim == 6),
        _ => (
            KernelProjector::new(&gen)?.limit(&initial.state(&gen)?)?,
            false,
        ),
    };
    Ok(Evaluated {
        gen,
        kernel_dim,
        basis,
        state,
        flagged,
    })
}

fn current_cells(c: CurrentAverage) -> [String; 3] {
    [num(c.tun), num(c.th), num(c.total)]
}

fn group_columns(group: OutputGroup) -> Vec<String> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    match group {
        OutputGroup::KernelDim => s(&["kernel_dim"]),
        OutputGroup::Currents => s(&["j_tun_a", "j_th_a", "j_a", "j_tun_b", "j_th_b", "j_b"]),
        OutputGroup::Sectors => (1..=3)
            .flat_map(|k| {
                [
                    format!("j_tun_a_s{k}"),
                    format!("j_th_a_s{k}"),
                    format!("j_a_s{k}"),
                ]
            })
            .collect(),
        OutputGroup::Heat => s(&["q_a", "q_b"]),
        OutputGroup::Negativity => s(&["negativity"]),
        OutputGroup::Ergotropy => s(&["ergotropy"]),
        OutputGroup::Mu => s(&["mu_min_a", "contextual_a", "mu_min_b", "contextual_b"]),
        OutputGroup::DeltaMax => s(&["delta_max", "negativity_half_delta"]),
    }
}

fn group_cells(
    cfg: &ScenarioConfig,
    group: OutputGroup,
    p: &Point,
    e: &Evaluated,
) -> Result<Vec<String>> {
    let rho = &e.state;
    Ok(match group {
        OutputGroup::KernelDim => vec![e.kernel_dim.to_string()],
        OutputGroup::Currents => {
            let mut v = current_cells(particle_current(&e.gen, rho, Particle::A, 0)?).to_vec();
            v.extend(current_cells(particle_current(
                &e.gen,
                rho,
                Particle::B,
                0,
            )?));
            v
        }
        OutputGroup::Sectors => {
            let basis = e.basis.as_ref().expect("basis computed for sector output");
            let mut v = Vec::with_capacity(9);
            for r in basis.states() {
                v.extend(current_cells(particle_current(&e.gen, r, Particle::A, 0)?));
            }
            v
        }
        OutputGroup::Heat => vec![
            num(heat_flux(&e.gen, rho, Particle::A)),
            num(heat_flux(&e.gen, rho, Particle::B)),
        ],
        OutputGroup::Negativity => vec![num(negativity(rho)?)],
        OutputGroup::Ergotropy => vec![num(ergotropy(rho, &e.gen.hamiltonian)?)],
        OutputGroup::Mu => {
            let mut v = Vec::with_capacity(4);
            for particle in [Particle::A, Particle::B] {
                let w = contextuality_witness(&e.gen, rho, particle)?;
                v.push(num(w.min_mh));
                v.push(w.is_contextual.to_string());
            }
            v
        }
        OutputGroup::DeltaMax => {
            let kind = cfg.generator.kind;
            let rotor = p.rotor;
            let g = (p.bath.g_a, p.bath.g_b);
            let factory = |t_a: f64, t_b: f64| -> qcurrent::Result<Generator> {
                let b = BathParams::new(t_a, t_b, g.0, g.1)?;
                generator(kind, &rotor, &b).map_err(|err| match err {
                    CliError::Numerical(x) => x,
                    other => qcurrent::Error::Parameter {
                        name: "generator",
                        reason: other.to_string(),
                    },
                })
            };
            let d = delta_max(factory, p.bath.t_a, p.bath.t_b, DELTA_TOL)?;
            let start = CoherentInputFamily::new(d / 2.0)?.product();
            let limit = KernelProjector::new(&e.gen)?.limit(&start)?;
            vec![num(d), num(negativity(&limit)?)]
        }
    })
}

fn lead_columns(cfg: &ScenarioConfig) -> Vec<String> {
    let mut cols = Vec::new();
    if let Some(s) = &cfg.sweep {
        if let Some(v) = s.series_variable {
            cols.push(v.name().to_string());
        }
        cols.push(s.variable.name().to_string());
    }
    cols.push("status".into());
    cols
}

fn lead_cells(p: &Point, flagged: bool) -> Vec<String> {
    let mut v: Vec<String> = p.series.into_iter().chain(p.x).map(num).collect();
    v.push(if flagged {
        "kernel_dim=6".into()
    } else {
        "ok".into()
    });
    v
}

fn par_map<T: Send, F>(jobs: usize, points: &[Point], f: F) -> Result<Vec<T>>
where
    F: Fn(&Point) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| points.par_iter().map(&f).collect())
}

/// One row per sweep point, in config order whatever the worker count.
pub fn run_scenario(cfg: &ScenarioConfig, jobs: usize) -> Result<Table> {
    let initial = Initial::resolve(cfg)?;
    let groups = &cfg.output.columns;
    let need_basis = groups.contains(&OutputGroup::Sectors);
    let mut columns = lead_columns(cfg);
    for g in groups {
        columns.extend(group_columns(*g));
    }
    let rows = par_map(jobs, &cfg.points(), |p| {
        let e = evaluate(cfg, &initial, p, need_basis)?;
        let mut row = lead_cells(p, e.flagged);
        for g in groups {
            row.extend(group_cells(cfg, *g, p, &e)?);
        }
        Ok(row)
    })?;
    Ok(Table { columns, rows })
}

/// Base point only, ignoring any sweep.
pub fn run_steady(cfg: &ScenarioConfig) -> Result<Table> {
    let mut single = cfg.clone();
    single.sweep = None;
    run_scenario(&single, 1)
}

/// Minimum Margenau-Hill rate over the ordered edges, with the weak value on
/// the most negative edge, at every sweep point.
pub fn run_contextuality_scan(cfg: &ScenarioConfig, jobs: usize) -> Result<Table> {
    let initial = Initial::resolve(cfg)?;
    let mut columns = lead_columns(cfg);
    columns.extend(
        [
            "particle",
            "edge",
            "mu_min",
            "contextual",
            "weak_value",
            "j_th",
        ]
        .map(String::from),
    );
    let blocks = par_map(jobs, &cfg.points(), |p| {
        let e = evaluate(cfg, &initial, p, false)?;
        let mut rows = Vec::new();
        for particle in [Particle::A, Particle::B] {
            let w = contextuality_witness(&e.gen, &e.state, particle)?;
            let (x, y) = w.edge.projectors();
            let wv = match weak_value(&e.gen, &e.state, &x, &y, WEAK_EPS) {
                Ok(v) => num(v),
                Err(qcurrent::Error::Postselection(_)) => String::new(),
                Err(err) => return Err(err.into()),
            };
            let mut row = lead_cells(p, e.flagged);
            row.extend([
                particle.label().to_string(),
                w.edge.label(),
                num(w.min_mh),
                w.is_contextual.to_string(),
                wv,
                num(particle_current(&e.gen, &e.state, particle, 0)?.th),
            ]);
            rows.push(row);
        }
        Ok(rows)
    })?;
    Ok(Table {
        columns,
        rows: blocks.into_iter().flatten().collect(),
    })
}

/// Integrate from the initial state and sample observables along the way.
pub fn run_evolve(cfg: &ScenarioConfig) -> Result<Table> {
    let ev = cfg
        .evolve
        .ok_or_else(|| CliError::Config("evolve needs an [evolve] section".into()))?;
    let initial = Initial::resolve(cfg)?;
    let p = cfg.points()[0];
    let gen = generator(cfg.generator.kind, &p.rotor, &p.bath)?;
    let start = initial.state(&gen)?;
    let limit = KernelProjector::new(&gen)?.limit(&start)?;
    let columns = [
        "t",
        "distance_to_limit",
        "j_a",
        "q_b",
        "negativity",
        "ergotropy",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::with_capacity(ev.samples + 1);
    let mut state = start;
    let chunk = ev.t_max / ev.samples as f64;
    for i in 0..=ev.samples {
        if i > 0 {
            state = ode_evolve(&state, |m| gen.apply(m), chunk, ev.dt)?;
        }
        rows.push(vec![
            num(chunk * i as f64),
            num(state.trace_distance(&limit)),
            num(particle_current(&gen, &state, Particle::A, 0)?.total),
            num(heat_flux(&gen, &state, Particle::B)),
            num(negativity(&state)?),
            num(ergotropy(&state, &gen.hamiltonian)?),
        ]);
    }
    Ok(Table { columns, rows })
}

/// Error ladder of the lattice current against its continuum form.
pub fn run_continuum_check(cfg: Option<&ScenarioConfig>) -> Result<Table> {
    let c = cfg.and_then(|c| c.continuum.clone()).unwrap_or_default();
    let columns = [
        "n",
        "band_error",
        "max_error",
        "continuity_residual",
        "riemann_dev_k1",
        "riemann_dev_k2",
        "riemann_dev_k3",
    ]
    .map(String::from)
    .to_vec();
    let mut rows = Vec::new();
    for &n in &c.ns {
        let p = ContinuumParams::new(n, c.ell, c.mass)?;
        let mut row = vec![
            n.to_string(),
            num(current_error_band(&p, c.cutoff)),
            num(current_error_max(&p)),
            num(continuity_residual(&p, 0)),
        ];
        for k in 1..=3 {
            row.push(num((riemann_sum(n, k).re - riemann_limit(k)).abs()));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
