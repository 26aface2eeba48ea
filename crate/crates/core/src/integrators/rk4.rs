use crate::error::{Error, Result};
use crate::grid::{FieldState, Phase, StaggeredGrid, TimeLayout};
use crate::params::DimensionlessParams;

use super::{SemiDiscrete, Tendencies};

/// Classical fourth-order Runge-Kutta on the unsplit semi-discrete system.
/// The left-wall flux is sampled at the stage times.
#[derive(Clone, Debug)]
pub struct Rk4Integrator {
    sd: SemiDiscrete,
    dt: f64,
    k: [Tendencies; 4],
    rho: Vec<f64>,
    v: Vec<f64>,
    t: Vec<f64>,
    q: Vec<f64>,
    pi: Vec<f64>,
}

impl Rk4Integrator {
    pub fn new(params: &DimensionlessParams, grid: &StaggeredGrid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::validation("dt", format!("must be > 0, got {dt}")));
        }
        let n = grid.cells();
        let z = Tendencies::zeros(grid);
        Ok(Rk4Integrator {
            sd: SemiDiscrete::new(params, grid),
            dt,
            k: [z.clone(), z.clone(), z.clone(), z],
            rho: vec![0.0; n],
            v: vec![0.0; n + 1],
            t: vec![0.0; n],
            q: vec![0.0; n + 1],
            pi: vec![0.0; n],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn semi_discrete(&self) -> &SemiDiscrete {
        &self.sd
    }

    fn stage(&mut self, state: &FieldState, from: usize, scale: f64) {
        let k = &self.k[from];
        for (i, x) in self.rho.iter_mut().enumerate() {
            *x = state.rho_dev[i] + scale * k.rho[i];
        }
        for (i, x) in self.v.iter_mut().enumerate() {
            *x = state.v[i] + scale * k.v[i];
        }
        for (i, x) in self.t.iter_mut().enumerate() {
            *x = state.t_dev[i] + scale * k.t[i];
        }
    }

    fn eval(&mut self, into: usize, flux: f64) {
        let (rho, v, t) = (&self.rho, &self.v, &self.t);
        self.sd
            .rhs(rho, v, t, flux, 0.0, &mut self.q, &mut self.pi, &mut self.k[into]);
    }

    /// One step from `state.steps * dt`. Returns the largest absolute change
    /// of `rho`, `v` and `t`.
    pub fn step<F: Fn(f64) -> f64>(&mut self, state: &mut FieldState, left_flux: F) -> Result<[f64; 3]> {
        debug_assert_eq!(state.layout, TimeLayout::Synchronous);
        let h = self.dt;
        let t0 = state.steps as f64 * h;
        self.sd.rhs(
            &state.rho_dev,
            &state.v,
            &state.t_dev,
            left_flux(t0),
            0.0,
            &mut self.q,
            &mut self.pi,
            &mut self.k[0],
        );
        self.stage(state, 0, 0.5 * h);
        self.eval(1, left_flux(t0 + 0.5 * h));
        self.stage(state, 1, 0.5 * h);
        self.eval(2, left_flux(t0 + 0.5 * h));
        self.stage(state, 2, h);
        self.eval(3, left_flux(t0 + h));

        let w = h / 6.0;
        let k = &self.k;
        let mut change = [0.0f64; 3];
        let mut combine = |u: &mut [f64], sel: fn(&Tendencies) -> &[f64], slot: usize| {
            let (a, b, c, d) = (sel(&k[0]), sel(&k[1]), sel(&k[2]), sel(&k[3]));
            for i in 0..u.len() {
                let du = w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
                u[i] += du;
                change[slot] = change[slot].max(du.abs());
            }
        };
        combine(&mut state.rho_dev, |k| &k.rho, 0);
        combine(&mut state.v, |k| &k.v, 1);
        combine(&mut state.t_dev, |k| &k.t, 2);

        let n = state.cells();
        state.v[0] = 0.0;
        state.v[n] = 0.0;
        state.steps += 1;
        state.phase = Phase::Complete;
        self.sd.update_constitutive(state, left_flux(t0 + h), 0.0);
        if let Some(field) = state.first_non_finite() {
            return Err(Error::Instability {
                step: state.steps,
                field,
                stage: "rk4 step",
            });
        }
        Ok(change)
    }
}
