use crate::error::{check_len, Error, Result};
use crate::grid::{FieldState, Phase, StaggeredGrid, TimeLayout};
use crate::params::DimensionlessParams;

use super::{SemiDiscrete, Tendencies};

/// Summary of one completed time step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    /// Index of the step just completed, starting at one.
    pub step: u64,
    /// Left-wall flux samples used by the two irreversible half steps.
    pub flux_samples: [f64; 2],
    /// Largest absolute change of `rho`, `v` and `t` over the step.
    pub max_change: [f64; 3],
    /// All fields finite after the step.
    pub finite: bool,
}

impl StepReport {
    /// Heat injected through the left wall during the step, per unit
    /// cross-section, as seen by the discrete temperature equation.
    pub fn injected_heat(&self, dt: f64) -> f64 {
        0.5 * dt * (self.flux_samples[0] + self.flux_samples[1])
    }
}

/// Splitting integrator with preallocated stage buffers.
#[derive(Clone, Debug)]
pub struct SplittingIntegrator {
    sd: SemiDiscrete,
    dt: f64,
    v_stage: Vec<f64>,
    t_stage: Vec<f64>,
    prev: [Vec<f64>; 3],
}

impl SplittingIntegrator {
    pub fn new(params: &DimensionlessParams, grid: &StaggeredGrid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::validation("dt", format!("must be > 0, got {dt}")));
        }
        let n = grid.cells();
        Ok(SplittingIntegrator {
            sd: SemiDiscrete::new(params, grid),
            dt,
            v_stage: vec![0.0; n + 1],
            t_stage: vec![0.0; n],
            prev: [vec![0.0; n], vec![0.0; n + 1], vec![0.0; n]],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn semi_discrete(&self) -> &SemiDiscrete {
        &self.sd
    }

    /// Explicit-midpoint step of length `dt/2` for the dissipative fluxes,
    /// starting at time `t_start`. The stage flux is sampled at
    /// `t_start + dt/4`; the returned value is that sample. On entry `q` and
    /// `pi` must belong to the current `v` and `t`.
    pub fn irreversible_half_step<F: Fn(f64) -> f64>(
        &mut self,
        state: &mut FieldState,
        left_flux: F,
        t_start: f64,
    ) -> f64 {
        let n = state.cells();
        let c = 1.0 / (self.sd.rho0 * self.sd.dx);
        let quarter = 0.25 * self.dt;
        let half = 0.5 * self.dt;

        self.v_stage[0] = state.v[0];
        self.v_stage[n] = state.v[n];
        for i in 1..n {
            self.v_stage[i] = state.v[i] - quarter * c * (state.pi[i] - state.pi[i - 1]);
        }
        for k in 0..n {
            self.t_stage[k] = state.t_dev[k] - quarter * c * (state.q[k + 1] - state.q[k]);
        }

        let flux = left_flux(t_start + quarter);
        self.sd.heat_flux(&self.t_stage, &mut state.q, flux, 0.0);
        self.sd.viscous_pressure(&self.v_stage, &mut state.pi);

        for i in 1..n {
            state.v[i] -= half * c * (state.pi[i] - state.pi[i - 1]);
        }
        for k in 0..n {
            state.t_dev[k] -= half * c * (state.q[k + 1] - state.q[k]);
        }
        flux
    }

    /// Drift of `rho` and `t` with the current velocity followed by a kick of
    /// the interior velocities with the updated `rho` and `t`. The wall
    /// velocities are set to `walls`; `q` and `pi` are recomputed with
    /// `left_flux` afterwards.
    pub fn reversible_step(&mut self, state: &mut FieldState, walls: (f64, f64), left_flux: f64) {
        let n = state.cells();
        let dt = self.dt;
        let dx = self.sd.dx;
        for k in 0..n {
            let dv = (state.v[k + 1] - state.v[k]) / dx;
            state.rho_dev[k] -= dt * self.sd.rho0 * dv;
            state.t_dev[k] -= dt * self.sd.compression_heating * dv;
        }
        for i in 1..n {
            state.v[i] -= dt
                * (self.sd.thermal_force * (state.t_dev[i] - state.t_dev[i - 1]) / dx
                    + self.sd.density_force * (state.rho_dev[i] - state.rho_dev[i - 1]) / dx);
        }
        state.v[0] = walls.0;
        state.v[n] = walls.1;
        self.sd.update_constitutive(state, left_flux, 0.0);
    }

    /// One full step from `state.steps * dt` for a closed pipe whose left
    /// wall flux is `left_flux(t)`.
    pub fn step<F: Fn(f64) -> f64>(&mut self, state: &mut FieldState, left_flux: F) -> Result<StepReport> {
        debug_assert_eq!(state.layout, TimeLayout::Staggered);
        let t0 = state.steps as f64 * self.dt;
        let step = state.steps + 1;
        self.prev[0].copy_from_slice(&state.rho_dev);
        self.prev[1].copy_from_slice(&state.v);
        self.prev[2].copy_from_slice(&state.t_dev);

        state.phase = Phase::AtStepStart;
        let f1 = self.irreversible_half_step(state, &left_flux, t0);
        state.phase = Phase::AfterFirstIrrev;
        check_finite(state, step, "first irreversible half step")?;

        self.reversible_step(state, (0.0, 0.0), left_flux(t0 + 0.5 * self.dt));
        state.phase = Phase::AfterRev;
        check_finite(state, step, "reversible step")?;

        let f2 = self.irreversible_half_step(state, &left_flux, t0 + 0.5 * self.dt);
        self.sd.update_constitutive(state, left_flux(t0 + self.dt), 0.0);
        check_finite(state, step, "second irreversible half step")?;
        state.phase = Phase::Complete;
        state.steps = step;

        let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        Ok(StepReport {
            step,
            flux_samples: [f1, f2],
            max_change: [
                max_diff(&state.rho_dev, &self.prev[0]),
                max_diff(&state.v, &self.prev[1]),
                max_diff(&state.t_dev, &self.prev[2]),
            ],
            finite: true,
        })
    }
}

fn check_finite(state: &FieldState, step: u64, stage: &'static str) -> Result<()> {
    match state.first_non_finite() {
        None => Ok(()),
        Some(field) => Err(Error::Instability { step, field, stage }),
    }
}

/// Builds a staggered state from absolute fields all given at `t = 0`.
///
/// `rho` and `t` are moved back to `-dt/2` by an explicit-midpoint step of
/// the reversible subsystem with step `-dt/2`. `q` and `pi` are evaluated from
/// the shifted `t` and the given `v`, as after every completed step.
pub fn init_from_synchronous(
    rho: &[f64],
    v: &[f64],
    t: &[f64],
    params: &DimensionlessParams,
    grid: &StaggeredGrid,
    dt: f64,
    left_flux: f64,
) -> Result<FieldState> {
    check_len("rho", grid.cells(), rho.len())?;
    check_len("v", grid.nodes(), v.len())?;
    check_len("t", grid.cells(), t.len())?;
    let sd = SemiDiscrete::new(params, grid);
    let h = -0.5 * dt;

    let mut k = Tendencies::zeros(grid);
    sd.reversible_tendencies(rho, v, t, &mut k);
    let mid = |u: &[f64], du: &[f64]| -> Vec<f64> { u.iter().zip(du).map(|(u, d)| u + 0.5 * h * d).collect() };
    let (rho_m, v_m, t_m) = (mid(rho, &k.rho), mid(v, &k.v), mid(t, &k.t));
    sd.reversible_tendencies(&rho_m, &v_m, &t_m, &mut k);

    let n = grid.cells();
    let (rho0, t0) = (params.rho0_hat, params.t0_hat);
    let mut state = FieldState {
        rho_dev: rho.iter().zip(&k.rho).map(|(u, d)| (u - rho0) + h * d).collect(),
        v: v.to_vec(),
        t_dev: t.iter().zip(&k.t).map(|(u, d)| (u - t0) + h * d).collect(),
        q: vec![0.0; n + 1],
        pi: vec![0.0; n],
        steps: 0,
        phase: Phase::Complete,
        layout: TimeLayout::Staggered,
        rho_ref: rho0,
        t_ref: t0,
    };
    sd.update_constitutive(&mut state, left_flux, 0.0);
    Ok(state)
}
