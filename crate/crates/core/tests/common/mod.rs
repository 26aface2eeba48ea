#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use thermoacoustics::grid::{init_equilibrium, FieldState, StaggeredGrid, TimeLayout};
use thermoacoustics::harness::{IntegratorKind, SimulationConfig};
use thermoacoustics::integrators::update_constitutive;
use thermoacoustics::{DimensionlessParams, HeatPulse, Rk4Integrator, SplittingIntegrator};

/// Supercritical CO2 groups of the wave test with the given transport numbers.
pub fn sc_params(re_a: f64, pe_a: f64) -> DimensionlessParams {
    DimensionlessParams::from_groups(12.868, 41.744, 0.0068299, 5.805, re_a, pe_a, 6.0, 1.00287, 0.68666).unwrap()
}

/// The damped wave test: inviscid, `Pe = 1e5`, short pulse at the left wall.
pub fn wave_config(cells: usize, courant: f64, t_end: f64) -> SimulationConfig {
    SimulationConfig {
        params: sc_params(f64::INFINITY, 1e5),
        cells,
        courant,
        t_end,
        pulse: HeatPulse {
            q_hat: 0.001,
            tp_hat: 0.1,
        },
        integrator: IntegratorKind::Splitting,
        probes: vec![],
        probe_stride: 1,
        snapshot_times: vec![],
    }
}

/// Layout of the unknown vector: `rho` on cells, interior `v`, `T` on cells.
pub struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn len(&self) -> usize {
        3 * self.n - 1
    }
    fn rho(&self, k: usize) -> usize {
        k
    }
    /// Interior node `i` in `1..n`.
    fn v(&self, i: usize) -> usize {
        self.n + i - 1
    }
    fn t(&self, k: usize) -> usize {
        2 * self.n - 1 + k
    }

    pub fn pack(&self, rho: &[f64], v: &[f64], t: &[f64]) -> DVector<f64> {
        let mut u = DVector::zeros(self.len());
        for k in 0..self.n {
            u[self.rho(k)] = rho[k];
            u[self.t(k)] = t[k];
        }
        for i in 1..self.n {
            u[self.v(i)] = v[i];
        }
        u
    }

    pub fn unpack(&self, u: &DVector<f64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let rho = (0..self.n).map(|k| u[self.rho(k)]).collect();
        let t = (0..self.n).map(|k| u[self.t(k)]).collect();
        let mut v = vec![0.0; self.n + 1];
        for i in 1..self.n {
            v[i] = u[self.v(i)];
        }
        (rho, v, t)
    }
}

/// Dense generator of the closed-pipe semi-discrete system for deviations
/// from equilibrium, written out entry by entry from the continuous
/// equations with walls at rest and insulated.
pub fn generator(p: &DimensionlessParams, n: usize) -> DMatrix<f64> {
    let l = Layout { n };
    let dx = 1.0 / n as f64;
    let mut a = DMatrix::zeros(l.len(), l.len());
    let kappa = if p.pe_a.is_infinite() { 0.0 } else { p.gamma * p.rho0_hat / p.pe_a };
    let mu = if p.re_a.is_infinite() { 0.0 } else { p.rho0_hat * (p.r_eta + 4.0 / 3.0) / p.re_a };
    for k in 0..n {
        // divergence of v over cell k; wall velocities are zero
        for (i, sign) in [(k + 1, 1.0), (k, -1.0)] {
            if i == 0 || i == n {
                continue;
            }
            a[(l.rho(k), l.v(i))] += -p.rho0_hat * sign / dx;
            a[(l.t(k), l.v(i))] += -p.b * p.ec_a * sign / dx;
        }
        // -(q_{k+1} - q_k) / (rho0 dx) with q_i = -kappa (T_i - T_{i-1}) / dx
        let c = kappa / (p.rho0_hat * dx * dx);
        if k + 1 < n {
            a[(l.t(k), l.t(k + 1))] += c;
            a[(l.t(k), l.t(k))] -= c;
        }
        if k > 0 {
            a[(l.t(k), l.t(k - 1))] += c;
            a[(l.t(k), l.t(k))] -= c;
        }
    }
    for i in 1..n {
        let row = l.v(i);
        a[(row, l.t(i))] += -p.b / (p.gamma * p.t0_hat) / dx;
        a[(row, l.t(i - 1))] += p.b / (p.gamma * p.t0_hat) / dx;
        a[(row, l.rho(i))] += -1.0 / (p.gamma * p.rho0_hat) / dx;
        a[(row, l.rho(i - 1))] += 1.0 / (p.gamma * p.rho0_hat) / dx;
        // -(Pi_i - Pi_{i-1}) / (rho0 dx) with Pi_k = -mu (v_{k+1} - v_k) / dx
        let c = mu / (p.rho0_hat * dx * dx);
        for (j, w) in [(i + 1, 1.0), (i, -2.0), (i - 1, 1.0)] {
            if j > 0 && j < n {
                a[(row, l.v(j))] += c * w;
            }
        }
    }
    a
}

/// Splitting step of length `h` taken on synchronized data: the density and
/// temperature are moved half a drift back before the step and half a drift
/// forward after it, so input and output both live on the integer level.
pub fn splitting_sync_step(p: &DimensionlessParams, n: usize, h: f64, u: &DVector<f64>) -> DVector<f64> {
    let l = Layout { n };
    let grid = StaggeredGrid::new(n).unwrap();
    let (rho, v, t) = l.unpack(u);
    let dx = grid.dx();
    let mut s = init_equilibrium(&grid, p);
    for k in 0..n {
        let dv = (v[k + 1] - v[k]) / dx;
        s.rho_dev[k] = rho[k] + 0.5 * h * p.rho0_hat * dv;
        s.t_dev[k] = t[k] + 0.5 * h * p.b * p.ec_a * dv;
    }
    s.v = v;
    update_constitutive(&mut s, p, &grid, 0.0, 0.0).unwrap();
    let mut it = SplittingIntegrator::new(p, &grid, h).unwrap();
    it.step(&mut s, |_| 0.0).unwrap();
    let out = it.semi_discrete().synchronize(&s, h);
    let rho: Vec<f64> = out.rho.iter().map(|r| r - p.rho0_hat).collect();
    let t: Vec<f64> = out.t.iter().map(|x| x - p.t0_hat).collect();
    l.pack(&rho, &out.v, &t)
}

pub fn rk4_step(p: &DimensionlessParams, n: usize, h: f64, u: &DVector<f64>) -> DVector<f64> {
    let l = Layout { n };
    let grid = StaggeredGrid::new(n).unwrap();
    let (rho, v, t) = l.unpack(u);
    let mut s: FieldState = init_equilibrium(&grid, p);
    s.layout = TimeLayout::Synchronous;
    s.rho_dev = rho;
    s.v = v;
    s.t_dev = t;
    let mut it = Rk4Integrator::new(p, &grid, h).unwrap();
    it.step(&mut s, |_| 0.0).unwrap();
    l.pack(&s.rho_dev, &s.v, &s.t_dev)
}

pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
