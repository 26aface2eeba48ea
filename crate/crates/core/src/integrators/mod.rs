//! Time integration of the semi-discrete thermoacoustic system.
//!
//! The semi-discrete right-hand side splits into a reversible part (the
//! coupled wave system acting on density, velocity and temperature) and an
//! irreversible part (viscous and conductive fluxes acting on velocity and
//! temperature). [`SplittingIntegrator`] composes an explicit-midpoint half
//! step of the irreversible part, a quasi-symplectic step of the reversible
//! part and another irreversible half step. [`Rk4Integrator`] integrates the
//! unsplit system as a method-of-lines baseline.

mod rk4;
mod splitting;

pub use rk4::Rk4Integrator;
pub use splitting::{init_from_synchronous, SplittingIntegrator, StepReport};

use crate::error::Result;
use crate::grid::{FieldState, StaggeredGrid, TimeLayout};
use crate::params::DimensionlessParams;

/// Time derivatives of the evolved fields. `v` has node length with zero
/// entries at the walls.
#[derive(Clone, Debug, PartialEq)]
pub struct Tendencies {
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
}

impl Tendencies {
    pub fn zeros(grid: &StaggeredGrid) -> Self {
        Tendencies {
            rho: vec![0.0; grid.cells()],
            v: vec![0.0; grid.nodes()],
            t: vec![0.0; grid.cells()],
        }
    }
}

/// Coefficients of the semi-discrete equations on one grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiDiscrete {
    pub dx: f64,
    pub rho0: f64,
    /// `B Ec_a`, reversible temperature response to compression.
    pub compression_heating: f64,
    /// `B / (gamma T0)`, thermal-expansion force.
    pub thermal_force: f64,
    /// `1 / (gamma rho0)`, density force.
    pub density_force: f64,
    /// `gamma rho0 / (Pr Re_a)`, Fourier coefficient.
    pub conductivity: f64,
    /// `rho0 (r_eta + 4/3) / Re_a`, Newtonian coefficient.
    pub viscosity: f64,
}

impl SemiDiscrete {
    pub fn new(params: &DimensionlessParams, grid: &StaggeredGrid) -> Self {
        SemiDiscrete {
            dx: grid.dx(),
            rho0: params.rho0_hat,
            compression_heating: params.b * params.ec_a,
            thermal_force: params.b / (params.gamma * params.t0_hat),
            density_force: 1.0 / (params.gamma * params.rho0_hat),
            conductivity: params.gamma * params.rho0_hat * params.inv_pe(),
            viscosity: params.rho0_hat * (params.r_eta + 4.0 / 3.0) * params.inv_re(),
        }
    }

    /// Fourier heat flux at the nodes from half-node temperatures; the wall
    /// entries take the supplied boundary values.
    pub fn heat_flux(&self, t: &[f64], q: &mut [f64], left: f64, right: f64) {
        let n = t.len();
        q[0] = left;
        q[n] = right;
        for i in 1..n {
            q[i] = -self.conductivity * (t[i] - t[i - 1]) / self.dx;
        }
    }

    /// Newtonian viscous pressure at the half nodes.
    pub fn viscous_pressure(&self, v: &[f64], pi: &mut [f64]) {
        for (k, p) in pi.iter_mut().enumerate() {
            *p = -self.viscosity * (v[k + 1] - v[k]) / self.dx;
        }
    }

    /// Recomputes `q` and `pi` of `state` from its `t` and `v`.
    pub fn update_constitutive(&self, state: &mut FieldState, left_flux: f64, right_flux: f64) {
        self.heat_flux(&state.t_dev, &mut state.q, left_flux, right_flux);
        self.viscous_pressure(&state.v, &mut state.pi);
    }

    /// Reversible (wave) tendencies.
    pub fn reversible_tendencies(&self, rho: &[f64], v: &[f64], t: &[f64], out: &mut Tendencies) {
        let n = rho.len();
        for k in 0..n {
            let dv = (v[k + 1] - v[k]) / self.dx;
            out.rho[k] = -self.rho0 * dv;
            out.t[k] = -self.compression_heating * dv;
        }
        out.v[0] = 0.0;
        out.v[n] = 0.0;
        for i in 1..n {
            out.v[i] = -self.thermal_force * (t[i] - t[i - 1]) / self.dx
                - self.density_force * (rho[i] - rho[i - 1]) / self.dx;
        }
    }

    /// Irreversible (dissipative) tendencies from given constitutive fields.
    /// The density tendency is identically zero.
    pub fn irreversible_tendencies(&self, q: &[f64], pi: &[f64], out: &mut Tendencies) {
        let n = pi.len();
        out.rho.iter_mut().for_each(|r| *r = 0.0);
        for k in 0..n {
            out.t[k] = -(q[k + 1] - q[k]) / (self.rho0 * self.dx);
        }
        out.v[0] = 0.0;
        out.v[n] = 0.0;
        for i in 1..n {
            out.v[i] = -(pi[i] - pi[i - 1]) / (self.rho0 * self.dx);
        }
    }

    /// Full semi-discrete right-hand side with the constitutive fields
    /// substituted. `q` and `pi` are scratch buffers that receive the
    /// constitutive fields evaluated at this state.
    #[allow(clippy::too_many_arguments)]
    pub fn rhs(
        &self,
        rho: &[f64],
        v: &[f64],
        t: &[f64],
        left_flux: f64,
        right_flux: f64,
        q: &mut [f64],
        pi: &mut [f64],
        out: &mut Tendencies,
    ) {
        let n = rho.len();
        self.heat_flux(t, q, left_flux, right_flux);
        self.viscous_pressure(v, pi);
        for k in 0..n {
            let dv = (v[k + 1] - v[k]) / self.dx;
            out.rho[k] = -self.rho0 * dv;
            out.t[k] = -(q[k + 1] - q[k]) / (self.rho0 * self.dx) - self.compression_heating * dv;
        }
        out.v[0] = 0.0;
        out.v[n] = 0.0;
        for i in 1..n {
            out.v[i] = -self.thermal_force * (t[i] - t[i - 1]) / self.dx
                - self.density_force * (rho[i] - rho[i - 1]) / self.dx
                - (pi[i] - pi[i - 1]) / (self.rho0 * self.dx);
        }
    }

    /// Density and temperature deviations at cell `k` brought to the integer
    /// time level of `v`. Staggered states carry the reversible part of both
    /// fields half a step behind; a forward half drift with the current
    /// velocity closes the gap to second order.
    pub fn synchronized_dev(&self, state: &FieldState, k: usize, dt: f64) -> (f64, f64) {
        match state.layout {
            TimeLayout::Synchronous => (state.rho_dev[k], state.t_dev[k]),
            TimeLayout::Staggered => {
                let dv = (state.v[k + 1] - state.v[k]) / self.dx;
                (
                    state.rho_dev[k] - 0.5 * dt * self.rho0 * dv,
                    state.t_dev[k] - 0.5 * dt * self.compression_heating * dv,
                )
            }
        }
    }

    /// Absolute density and temperature at cell `k`, synchronized as in
    /// [`SemiDiscrete::synchronized_dev`].
    pub fn synchronized_cell(&self, state: &FieldState, k: usize, dt: f64) -> (f64, f64) {
        let (r, t) = self.synchronized_dev(state, k, dt);
        (state.rho_ref + r, state.t_ref + t)
    }

    /// All fields at the integer time level of `v`, with absolute density
    /// and temperature.
    pub fn synchronize(&self, state: &FieldState, dt: f64) -> SyncFields {
        let n = state.cells();
        let (rho_dev, t_dev): (Vec<f64>, Vec<f64>) =
            (0..n).map(|k| self.synchronized_dev(state, k, dt)).unzip();
        let mut q = state.q.clone();
        self.heat_flux(&t_dev, &mut q, state.q[0], state.q[n]);
        let rho = rho_dev.iter().map(|r| state.rho_ref + r).collect();
        let t = t_dev.iter().map(|t| state.t_ref + t).collect();
        SyncFields {
            rho,
            v: state.v.clone(),
            t,
            q,
            pi: state.pi.clone(),
        }
    }
}

/// Fields of a state, all at one integer time level. Density and
/// temperature are absolute.
#[derive(Clone, Debug, PartialEq)]
pub struct SyncFields {
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    pub pi: Vec<f64>,
}

impl SyncFields {
    pub fn pressure(&self, params: &DimensionlessParams) -> Vec<f64> {
        self.t
            .iter()
            .zip(&self.rho)
            .map(|(&t, &r)| params.pressure(t, r))
            .collect()
    }
}

/// Free-function form of [`SemiDiscrete::update_constitutive`].
pub fn update_constitutive(
    state: &mut FieldState,
    params: &DimensionlessParams,
    grid: &StaggeredGrid,
    left_flux: f64,
    right_flux: f64,
) -> Result<()> {
    state.check_shape(grid)?;
    SemiDiscrete::new(params, grid).update_constitutive(state, left_flux, right_flux);
    Ok(())
}

/// Free-function form of [`SemiDiscrete::rhs`].
pub fn semi_discrete_rhs(
    rho: &[f64],
    v: &[f64],
    t: &[f64],
    params: &DimensionlessParams,
    grid: &StaggeredGrid,
    left_flux: f64,
) -> Result<Tendencies> {
    use crate::error::check_len;
    check_len("rho", grid.cells(), rho.len())?;
    check_len("v", grid.nodes(), v.len())?;
    check_len("t", grid.cells(), t.len())?;
    let sd = SemiDiscrete::new(params, grid);
    let mut out = Tendencies::zeros(grid);
    let mut q = vec![0.0; grid.nodes()];
    let mut pi = vec![0.0; grid.cells()];
    sd.rhs(rho, v, t, left_flux, 0.0, &mut q, &mut pi, &mut out);
    Ok(out)
}

/// Courant and diffusive step-size checks. Violations are advisory.
#[derive(Clone, Debug, PartialEq)]
pub enum StabilityWarning {
    /// `Co` times the reversible wave speed exceeds one.
    WaveCourant { effective: f64 },
    /// `dt` above `dx^2 Pe / (2 gamma)`.
    Conduction { dt: f64, limit: f64 },
    /// `dt` above `dx^2 Re / (2 (r_eta + 4/3))`.
    Viscosity { dt: f64, limit: f64 },
}

impl std::fmt::Display for StabilityWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StabilityWarning::WaveCourant { effective } => write!(
                f,
                "effective wave Courant number {effective:.6} exceeds 1; the wave step is unstable"
            ),
            StabilityWarning::Conduction { dt, limit } => {
                write!(f, "dt = {dt:e} exceeds the explicit conduction limit {limit:e}")
            }
            StabilityWarning::Viscosity { dt, limit } => {
                write!(f, "dt = {dt:e} exceeds the explicit viscous limit {limit:e}")
            }
        }
    }
}

pub fn stability_warnings(
    params: &DimensionlessParams,
    grid: &StaggeredGrid,
    courant: f64,
) -> Vec<StabilityWarning> {
    let dx = grid.dx();
    let dt = courant * dx;
    let mut out = Vec::new();
    let effective = courant * params.reversible_wave_speed();
    if effective > 1.0 {
        out.push(StabilityWarning::WaveCourant { effective });
    }
    let inv_pe = params.inv_pe();
    if inv_pe > 0.0 {
        let limit = dx * dx / (2.0 * params.gamma * inv_pe);
        if dt > limit {
            out.push(StabilityWarning::Conduction { dt, limit });
        }
    }
    let inv_re = params.inv_re();
    if inv_re > 0.0 {
        let limit = dx * dx / (2.0 * (params.r_eta + 4.0 / 3.0) * inv_re);
        if dt > limit {
            out.push(StabilityWarning::Viscosity { dt, limit });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::init_equilibrium;

    fn params() -> DimensionlessParams {
        DimensionlessParams::from_groups(1.4, 0.5, 0.3, 0.7, 20.0, 14.0, 0.5, 1.1, 0.9).unwrap()
    }

    #[test]
    fn uniform_temperature_has_no_interior_flux() {
        let g = StaggeredGrid::new(6).unwrap();
        let p = params();
        let mut s = init_equilibrium(&g, &p);
        s.v = (0..=6).map(|i| if i == 0 || i == 6 { 0.0 } else { 0.3 }).collect();
        update_constitutive(&mut s, &p, &g, 0.25, 0.0).unwrap();
        assert_eq!(s.q[0], 0.25);
        assert!(s.q[1..6].iter().all(|&q| q == 0.0));
        // interior cells see uniform v, only the wall cells feel the step
        assert!(s.pi[1..5].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn linear_temperature_gives_constant_flux() {
        let g = StaggeredGrid::new(8).unwrap();
        let p = params();
        let slope = 0.37;
        let mut s = init_equilibrium(&g, &p);
        s.t_dev = (0..8).map(|k| slope * g.half_x(k)).collect();
        update_constitutive(&mut s, &p, &g, 0.0, 0.0).unwrap();
        let expected = -p.gamma * p.rho0_hat * slope / (p.pr * p.re_a);
        for &q in &s.q[1..8] {
            assert!((q - expected).abs() < 1e-13, "{q} vs {expected}");
        }
    }

    #[test]
    fn uniform_velocity_has_no_viscous_pressure() {
        let g = StaggeredGrid::new(4).unwrap();
        let p = params();
        let mut s = init_equilibrium(&g, &p);
        s.v = vec![0.2; 5];
        update_constitutive(&mut s, &p, &g, 0.0, 0.0).unwrap();
        assert!(s.pi.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn equilibrium_has_zero_tendencies() {
        let g = StaggeredGrid::new(5).unwrap();
        let p = params();
        let s = init_equilibrium(&g, &p);
        let out = semi_discrete_rhs(&s.rho_dev, &s.v, &s.t_dev, &p, &g, 0.0).unwrap();
        assert!(out.rho.iter().chain(&out.v).chain(&out.t).all(|&x| x == 0.0));
    }

    #[test]
    fn rhs_is_sum_of_parts() {
        let g = StaggeredGrid::new(7).unwrap();
        let p = params();
        let sd = SemiDiscrete::new(&p, &g);
        let rho: Vec<f64> = (0..7).map(|k| 0.9 + 0.01 * (k as f64 * 1.3).sin()).collect();
        let t: Vec<f64> = (0..7).map(|k| 1.1 + 0.02 * (k as f64 * 0.7).cos()).collect();
        let mut v: Vec<f64> = (0..8).map(|i| 0.05 * (i as f64 * 2.1).sin()).collect();
        v[0] = 0.0;
        v[7] = 0.0;
        let flux = 0.013;
        let full = semi_discrete_rhs(&rho, &v, &t, &p, &g, flux).unwrap();

        let mut q = vec![0.0; 8];
        let mut pi = vec![0.0; 7];
        sd.heat_flux(&t, &mut q, flux, 0.0);
        sd.viscous_pressure(&v, &mut pi);
        let mut rev = Tendencies::zeros(&g);
        let mut irr = Tendencies::zeros(&g);
        sd.reversible_tendencies(&rho, &v, &t, &mut rev);
        sd.irreversible_tendencies(&q, &pi, &mut irr);
        assert!(irr.rho.iter().all(|&x| x == 0.0));
        let close = |a: &[f64], b: &[f64], c: &[f64]| {
            a.iter().zip(b).zip(c).all(|((a, b), c)| (a - (b + c)).abs() <= 1e-14 * (1.0 + a.abs()))
        };
        assert!(close(&full.rho, &rev.rho, &irr.rho));
        assert!(close(&full.v, &rev.v, &irr.v));
        assert!(close(&full.t, &rev.t, &irr.t));
    }

    #[test]
    fn two_cell_rhs_by_hand() {
        // gamma = 1, B = 0, rho0 = 1, Pe = 1, inviscid; T = (1, 2), v = 0
        let p = DimensionlessParams::from_groups(1.0, 0.0, 0.0, 1.0, f64::INFINITY, 1.0, 0.0, 1.0, 1.0)
            .unwrap();
        let g = StaggeredGrid::new(2).unwrap();
        let out = semi_discrete_rhs(&[1.0, 1.0], &[0.0; 3], &[1.0, 2.0], &p, &g, 0.0).unwrap();
        // q1 = -(2 - 1) / 0.5 = -2 ; dT0 = -(q1 - q0)/0.5 = 4 ; dT1 = -(q2 - q1)/0.5 = -4
        assert_eq!(out.t, vec![4.0, -4.0]);
        assert_eq!(out.rho, vec![0.0, 0.0]);
        assert_eq!(out.v, vec![0.0; 3]);
    }

    #[test]
    fn courant_warning_uses_reversible_wave_speed() {
        let g = StaggeredGrid::new(100).unwrap();
        let rounded = DimensionlessParams::from_groups(
            12.868, 41.744, 0.007, 5.805, 1722695.711, 1e7, 6.0, 1.00287, 0.68666,
        )
        .unwrap();
        let consistent = DimensionlessParams { ec_a: 0.0068299, ..rounded.clone() };
        assert!(matches!(
            stability_warnings(&rounded, &g, 1.0)[..],
            [StabilityWarning::WaveCourant { .. }]
        ));
        assert!(stability_warnings(&consistent, &g, 1.0).is_empty());
        assert!(stability_warnings(&rounded, &g, 0.95).is_empty());
    }

    #[test]
    fn diffusive_limits_are_reported() {
        let g = StaggeredGrid::new(100).unwrap();
        let p = DimensionlessParams::from_groups(1.4, 0.0, 0.0, 1.0, 10.0, 10.0, 0.0, 1.0, 1.0).unwrap();
        let w = stability_warnings(&p, &g, 0.9);
        assert!(w.iter().any(|w| matches!(w, StabilityWarning::Conduction { .. })));
        assert!(w.iter().any(|w| matches!(w, StabilityWarning::Viscosity { .. })));
    }
}
