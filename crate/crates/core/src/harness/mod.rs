//! Simulation driver, diagnostics and numerical studies.

mod diagnostics;
mod studies;

pub use diagnostics::{dispersion_metrics, l2_error, moving_median, DispersionMetrics, Sampled, Staggering};
pub use studies::{
    compare_study, convergence_study, grid_study, CompareReport, ConvergenceReport, ConvergenceSpec,
    FieldOrder, GridDeviation, LevelErrors, StudyField,
};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excitation::{ClosedPipe, HeatPulse};
use crate::grid::{init_equilibrium, FieldState, GridIndex, Probe, ProbeField, ProbeLocation, StaggeredGrid, TimeLayout};
use crate::integrators::{stability_warnings, Rk4Integrator, SemiDiscrete, SplittingIntegrator, SyncFields};
use crate::params::DimensionlessParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorKind {
    Splitting,
    Rk4,
}

impl IntegratorKind {
    pub fn name(self) -> &'static str {
        match self {
            IntegratorKind::Splitting => "splitting",
            IntegratorKind::Rk4 => "rk4",
        }
    }
}

/// Everything needed to run one heated closed-pipe simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub params: DimensionlessParams,
    pub cells: usize,
    /// `dt / dx`.
    pub courant: f64,
    pub t_end: f64,
    pub pulse: HeatPulse,
    pub integrator: IntegratorKind,
    /// Extra probes beyond the standard columns.
    pub probes: Vec<Probe>,
    /// Steps between probe records.
    pub probe_stride: usize,
    pub snapshot_times: Vec<f64>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<StaggeredGrid> {
        self.params.validate()?;
        self.pulse.validate()?;
        let grid = StaggeredGrid::new(self.cells)?;
        if !(self.courant.is_finite() && self.courant > 0.0) {
            return Err(Error::validation("courant", format!("must be > 0, got {}", self.courant)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::validation("t_end", format!("must be > 0, got {}", self.t_end)));
        }
        if self.probe_stride == 0 {
            return Err(Error::validation("probe_stride", "must be at least 1"));
        }
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_end).contains(&t) {
                return Err(Error::validation(
                    "snapshot_times",
                    format!("{t} lies outside [0, {}]", self.t_end),
                ));
            }
        }
        for p in &self.probes {
            p.validate(&grid)?;
        }
        Ok(grid)
    }

    pub fn dt(&self) -> f64 {
        self.courant / self.cells as f64
    }

    /// Number of steps needed to reach `t_end`.
    pub fn total_steps(&self) -> u64 {
        steps_to_reach(self.t_end, self.dt())
    }
}

/// Smallest step count whose end time is at or past `t`, forgiving rounding
/// in `t / dt`.
pub(crate) fn steps_to_reach(t: f64, dt: f64) -> u64 {
    let x = t / dt;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

enum Stepper {
    Splitting(SplittingIntegrator),
    Rk4(Box<Rk4Integrator>),
}

/// A simulation that can be advanced one step at a time.
pub struct Simulation {
    params: DimensionlessParams,
    grid: StaggeredGrid,
    pipe: ClosedPipe,
    sd: SemiDiscrete,
    dt: f64,
    state: FieldState,
    stepper: Stepper,
    injected: f64,
}

impl Simulation {
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        let grid = config.validate()?;
        let params = config.params.clone();
        let dt = config.dt();
        let mut state = init_equilibrium(&grid, &params);
        let stepper = match config.integrator {
            IntegratorKind::Splitting => Stepper::Splitting(SplittingIntegrator::new(&params, &grid, dt)?),
            IntegratorKind::Rk4 => {
                state.layout = TimeLayout::Synchronous;
                Stepper::Rk4(Box::new(Rk4Integrator::new(&params, &grid, dt)?))
            }
        };
        Ok(Simulation {
            sd: SemiDiscrete::new(&params, &grid),
            pipe: ClosedPipe::new(config.pulse, params.rho0_hat),
            params,
            grid,
            dt,
            state,
            stepper,
            injected: 0.0,
        })
    }

    /// Advances one step and returns the heat injected through the wall.
    pub fn step(&mut self) -> Result<f64> {
        let pipe = self.pipe;
        let flux = |t: f64| pipe.left_flux(t);
        let heat = match &mut self.stepper {
            Stepper::Splitting(it) => it.step(&mut self.state, flux)?.injected_heat(self.dt),
            Stepper::Rk4(it) => {
                let t0 = self.state.steps as f64 * self.dt;
                it.step(&mut self.state, flux)?;
                let h = self.dt;
                h / 6.0 * (flux(t0) + 4.0 * flux(t0 + 0.5 * h) + flux(t0 + h))
            }
        };
        self.injected += heat;
        Ok(heat)
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn grid(&self) -> &StaggeredGrid {
        &self.grid
    }

    pub fn params(&self) -> &DimensionlessParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time level of `v`.
    pub fn time(&self) -> f64 {
        self.state.steps as f64 * self.dt
    }

    /// Time level of the stored `rho`.
    pub fn rho_time(&self) -> f64 {
        match self.state.layout {
            TimeLayout::Staggered => self.time() - 0.5 * self.dt,
            TimeLayout::Synchronous => self.time(),
        }
    }

    /// Cumulative wall heat input per unit cross-section.
    pub fn injected_heat(&self) -> f64 {
        self.injected
    }

    pub fn synchronized(&self) -> SyncFields {
        self.sd.synchronize(&self.state, self.dt)
    }

    /// Value of one field at one grid location, at the time level of `v`.
    pub fn sample(&self, field: ProbeField, at: GridIndex) -> f64 {
        let s = &self.state;
        match (field, at) {
            (ProbeField::V, GridIndex::Node(i)) => s.v[i],
            (ProbeField::Q, GridIndex::Node(i)) => {
                if i == 0 || i == s.cells() {
                    s.q[i]
                } else {
                    let (_, hi) = self.sd.synchronized_cell(s, i, self.dt);
                    let (_, lo) = self.sd.synchronized_cell(s, i - 1, self.dt);
                    -self.sd.conductivity * (hi - lo) / self.sd.dx
                }
            }
            (ProbeField::T, GridIndex::Half(k)) => self.sd.synchronized_cell(s, k, self.dt).1,
            (ProbeField::Rho, GridIndex::Half(k)) => self.sd.synchronized_cell(s, k, self.dt).0,
            (ProbeField::P, GridIndex::Half(k)) => {
                let (rho, t) = self.sd.synchronized_cell(s, k, self.dt);
                self.params.pressure(t, rho)
            }
            _ => unreachable!("probe indices are resolved against field staggering"),
        }
    }
}

/// One row of the standard probe table.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRecord {
    pub step: u64,
    pub t_hat: f64,
    /// Time level of the two density columns.
    pub t_hat_half: f64,
    pub t_front: f64,
    pub t_rear: f64,
    pub rho_front_half: f64,
    pub rho_rear_half: f64,
    /// Rear density brought to `t_hat`; not part of the written table.
    pub rho_rear: f64,
    pub p_front: f64,
    pub p_rear: f64,
    pub v_mid: f64,
    pub q0: f64,
    /// Values of the configured extra probes, in [`RunResult::extra_columns`] order.
    pub extra: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub requested: f64,
    pub t_hat: f64,
    pub step: u64,
    pub fields: SyncFields,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub step: u64,
    pub t_hat: f64,
    /// Change of the total mass relative to its initial value.
    pub mass_drift: f64,
    pub injected_heat: f64,
    /// `rho0 dx (sum T - sum T_initial)` minus the injected heat.
    pub heat_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StabilityOutcome {
    Stable,
    /// The run stopped early; everything recorded before is kept.
    Unstable { step: u64, field: &'static str, stage: &'static str },
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub integrator: IntegratorKind,
    pub dt: f64,
    pub cells: usize,
    pub extra_columns: Vec<String>,
    pub probes: Vec<ProbeRecord>,
    pub snapshots: Vec<Snapshot>,
    /// Written at every probe record; the worst values over all steps are
    /// kept in `max_mass_drift` and `max_heat_residual`.
    pub ledger: Vec<LedgerEntry>,
    pub max_mass_drift: f64,
    pub max_heat_residual: f64,
    pub total_injected_heat: f64,
    pub outcome: StabilityOutcome,
    pub warnings: Vec<String>,
    pub wall_clock: Duration,
}

impl RunResult {
    pub fn is_stable(&self) -> bool {
        self.outcome == StabilityOutcome::Stable
    }
}

fn location_label(loc: ProbeLocation) -> String {
    match loc {
        ProbeLocation::FrontHalfCell => "front".into(),
        ProbeLocation::RearHalfCell => "rear".into(),
        ProbeLocation::NodeIndex(i) => format!("node{i}"),
        ProbeLocation::HalfNodeIndex(i) => format!("half{i}"),
    }
}

/// Runs a configured simulation from rest to `t_end`.
///
/// Instabilities end the run early with [`StabilityOutcome::Unstable`]; the
/// records gathered so far are returned. Invalid configurations are errors.
pub fn run_simulation(config: &SimulationConfig) -> Result<RunResult> {
    let started = Instant::now();
    let mut sim = Simulation::new(config)?;
    let grid = *sim.grid();
    let warnings: Vec<String> = stability_warnings(&config.params, &grid, config.courant)
        .iter()
        .map(|w| w.to_string())
        .collect();
    for w in &warnings {
        log::warn!("{w}");
    }

    let mut extra_columns = Vec::new();
    let mut extra_index = Vec::new();
    for probe in &config.probes {
        for &field in &probe.fields {
            extra_columns.push(format!("{}_{}", field.name(), location_label(probe.location)));
            extra_index.push((field, probe.resolve(field, &grid)?));
        }
    }

    let total = config.total_steps();
    let dt = sim.dt();
    let mut snapshot_steps: Vec<(u64, f64)> = config
        .snapshot_times
        .iter()
        .map(|&t| (((t / dt).round() as u64).min(total), t))
        .collect();
    snapshot_steps.sort_by(|a, b| a.partial_cmp(b).expect("snapshot times are finite"));

    let n = grid.cells();
    let mass0 = sim.state().total_mass();
    let excess0 = sim.state().excess_mass();
    let heat_scale = config.params.rho0_hat * grid.dx();
    let sum_t0: f64 = sim.state().t_dev.iter().sum();

    let mut out = RunResult {
        integrator: config.integrator,
        dt,
        cells: n,
        extra_columns,
        probes: Vec::new(),
        snapshots: Vec::new(),
        ledger: Vec::new(),
        max_mass_drift: 0.0,
        max_heat_residual: 0.0,
        total_injected_heat: 0.0,
        outcome: StabilityOutcome::Stable,
        warnings,
        wall_clock: Duration::ZERO,
    };

    let mut next_snapshot = 0;
    let mut record = |sim: &Simulation, out: &mut RunResult, write_probe: bool| {
        let s = sim.state();
        let step = s.steps;
        let sum_t: f64 = s.t_dev.iter().sum();
        let mass_drift = (s.excess_mass() - excess0) / mass0;
        let heat_residual = heat_scale * (sum_t - sum_t0) - sim.injected_heat();
        out.max_mass_drift = out.max_mass_drift.max(mass_drift.abs());
        out.max_heat_residual = out.max_heat_residual.max(heat_residual.abs());
        out.total_injected_heat = sim.injected_heat();
        if write_probe {
            let front = GridIndex::Half(0);
            let rear = GridIndex::Half(n - 1);
            out.probes.push(ProbeRecord {
                step,
                t_hat: sim.time(),
                t_hat_half: sim.rho_time(),
                t_front: sim.sample(ProbeField::T, front),
                t_rear: sim.sample(ProbeField::T, rear),
                rho_front_half: s.rho(0),
                rho_rear_half: s.rho(n - 1),
                rho_rear: sim.sample(ProbeField::Rho, rear),
                p_front: sim.sample(ProbeField::P, front),
                p_rear: sim.sample(ProbeField::P, rear),
                v_mid: s.v[n / 2],
                q0: s.q[0],
                extra: extra_index.iter().map(|&(f, at)| sim.sample(f, at)).collect(),
            });
            out.ledger.push(LedgerEntry {
                step,
                t_hat: sim.time(),
                mass_drift,
                injected_heat: sim.injected_heat(),
                heat_residual,
            });
        }
        while next_snapshot < snapshot_steps.len() && snapshot_steps[next_snapshot].0 == step {
            let fields = sim.synchronized();
            out.snapshots.push(Snapshot {
                requested: snapshot_steps[next_snapshot].1,
                t_hat: sim.time(),
                step,
                p: fields.pressure(sim.params()),
                fields,
            });
            next_snapshot += 1;
        }
    };

    record(&sim, &mut out, true);
    let stride = config.probe_stride as u64;
    for step in 1..=total {
        if let Err(e) = sim.step() {
            match e {
                Error::Instability { step, field, stage } => {
                    log::error!("run became unstable at step {step} in `{field}` ({stage})");
                    out.outcome = StabilityOutcome::Unstable { step, field, stage };
                    break;
                }
                other => return Err(other),
            }
        }
        record(&sim, &mut out, step % stride == 0 || step == total);
    }
    out.wall_clock = started.elapsed();
    Ok(out)
}
