use rayon::prelude::*;

use super::{run_simulation, steps_to_reach, IntegratorKind, RunResult, Simulation, SimulationConfig};
use super::diagnostics::{dispersion_metrics, l2_error, DispersionMetrics, Sampled};
use crate::error::{Error, Result};
use crate::integrators::SyncFields;

/// The five discrete fields, in output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StudyField {
    Rho,
    V,
    T,
    Q,
    Pi,
    P,
}

impl StudyField {
    pub const ALL: [StudyField; 5] = [StudyField::Rho, StudyField::V, StudyField::T, StudyField::Q, StudyField::Pi];

    pub fn name(self) -> &'static str {
        match self {
            StudyField::Rho => "rho",
            StudyField::V => "v",
            StudyField::T => "T",
            StudyField::Q => "q",
            StudyField::Pi => "Pi",
            StudyField::P => "p",
        }
    }

    fn on_nodes(self) -> bool {
        matches!(self, StudyField::V | StudyField::Q)
    }

    fn values(self, f: &SyncFields) -> &[f64] {
        match self {
            StudyField::Rho => &f.rho,
            StudyField::V => &f.v,
            StudyField::T => &f.t,
            StudyField::Q => &f.q,
            StudyField::Pi => &f.pi,
            StudyField::P => unreachable!("pressure is derived, not stored"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceSpec {
    /// Cell counts of the study levels; `dt` follows from the base Courant number.
    pub levels: Vec<usize>,
    /// Reference cell count over the finest level.
    pub reference_factor: usize,
    /// Comparison time.
    pub t_compare: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelErrors {
    pub cells: usize,
    pub dt: f64,
    /// L2 errors in [`StudyField::ALL`] order.
    pub errors: [f64; 5],
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldOrder {
    pub field: StudyField,
    /// Least-squares slope of `ln e` against `ln dt`; `None` when some error
    /// is exactly zero and no slope exists.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub reference_cells: usize,
    pub levels: Vec<LevelErrors>,
    pub orders: Vec<FieldOrder>,
}

/// Runs `config` to exactly `t` and returns the synchronized fields.
fn fields_at(config: &SimulationConfig, t: f64) -> Result<SyncFields> {
    let mut sim = Simulation::new(config)?;
    let dt = sim.dt();
    let steps = steps_to_reach(t, dt);
    if ((steps as f64) * dt - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::validation(
            "t_compare",
            format!("{t} is not a whole number of steps of {dt} at {} cells", config.cells),
        ));
    }
    for _ in 0..steps {
        sim.step()?;
    }
    Ok(sim.synchronized())
}

/// Restricts a fine-grid field onto a coarse grid `ratio` times coarser.
/// Nodes coincide; coarse half nodes either coincide with a fine half node
/// (odd ratio) or sit midway between two of them (even ratio), in which case
/// the two are averaged.
fn restrict(fine: &[f64], on_nodes: bool, coarse_cells: usize, ratio: usize) -> Vec<f64> {
    if on_nodes {
        (0..=coarse_cells).map(|n| fine[ratio * n]).collect()
    } else if ratio % 2 == 1 {
        (0..coarse_cells).map(|n| fine[ratio * n + ratio / 2]).collect()
    } else {
        (0..coarse_cells)
            .map(|n| {
                let j = ratio * n + ratio / 2;
                0.5 * (fine[j - 1] + fine[j])
            })
            .collect()
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Observed order of accuracy at fixed Courant number against a much finer
/// reference run.
pub fn convergence_study(base: &SimulationConfig, spec: &ConvergenceSpec) -> Result<ConvergenceReport> {
    if spec.levels.len() < 3 {
        return Err(Error::validation("levels", "need at least three levels"));
    }
    if spec.reference_factor < 4 {
        return Err(Error::validation("reference_factor", "must be at least 4"));
    }
    let finest = *spec.levels.iter().max().expect("non-empty");
    let reference_cells = finest * spec.reference_factor;
    for &n in &spec.levels {
        if !reference_cells.is_multiple_of(n) {
            return Err(Error::validation(
                "levels",
                format!("{n} cells does not divide the reference {reference_cells}"),
            ));
        }
    }
    let mut all: Vec<usize> = spec.levels.clone();
    all.push(reference_cells);
    let runs: Vec<Result<SyncFields>> = all
        .par_iter()
        .map(|&cells| {
            let c = SimulationConfig {
                cells,
                t_end: spec.t_compare,
                snapshot_times: vec![],
                probes: vec![],
                ..base.clone()
            };
            fields_at(&c, spec.t_compare)
        })
        .collect();
    let mut runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let reference = runs.pop().expect("reference run");

    let levels: Vec<LevelErrors> = spec
        .levels
        .iter()
        .zip(&runs)
        .map(|(&cells, fields)| {
            let ratio = reference_cells / cells;
            let dx = 1.0 / cells as f64;
            let mut errors = [0.0; 5];
            for (e, field) in errors.iter_mut().zip(StudyField::ALL) {
                let r = restrict(field.values(&reference), field.on_nodes(), cells, ratio);
                let wrap = |v: Vec<f64>| if field.on_nodes() { Sampled::node(v) } else { Sampled::half(v) };
                *e = l2_error(&wrap(field.values(fields).to_vec()), &wrap(r), dx).expect("same staggering");
            }
            LevelErrors {
                cells,
                dt: base.courant * dx,
                errors,
            }
        })
        .collect();

    let orders = StudyField::ALL
        .iter()
        .enumerate()
        .map(|(i, &field)| {
            let errs: Vec<f64> = levels.iter().map(|l| l.errors[i]).collect();
            let order = if errs.iter().all(|&e| e > 0.0) {
                let x: Vec<f64> = levels.iter().map(|l| l.dt.ln()).collect();
                let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
                Some(least_squares_slope(&x, &y))
            } else {
                None
            };
            FieldOrder { field, order }
        })
        .collect();

    Ok(ConvergenceReport {
        reference_cells,
        levels,
        orders,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridDeviation {
    pub cells: usize,
    pub field: StudyField,
    /// `max_t |u_N - u_ref| / max_t |u_ref - u_eq|` at the rear probe.
    pub deviation: f64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Rear-probe time series of runs at several resolutions compared with the
/// largest one. Temperature, density and pressure are compared at the rear
/// half cell on a common set of sample times; velocity and heat flux vanish
/// at the rear wall and carry no information there.
pub fn grid_study(base: &SimulationConfig, cell_counts: &[usize]) -> Result<Vec<GridDeviation>> {
    let reference_cells = *cell_counts
        .iter()
        .max()
        .ok_or_else(|| Error::validation("cell_counts", "empty"))?;
    let mut period = 1;
    for &n in cell_counts {
        if n == 0 || reference_cells % n != 0 {
            return Err(Error::validation(
                "cell_counts",
                format!("{n} does not divide the reference {reference_cells}"),
            ));
        }
        let r = reference_cells / n;
        period = period / gcd(period, r) * r;
    }
    let mut counts: Vec<usize> = cell_counts.to_vec();
    counts.sort_unstable();
    counts.dedup();

    let runs = counts
        .par_iter()
        .map(|&cells| {
            let c = SimulationConfig {
                cells,
                probe_stride: period / (reference_cells / cells),
                snapshot_times: vec![],
                probes: vec![],
                ..base.clone()
            };
            let r = run_simulation(&c)?;
            if !r.is_stable() {
                return Err(Error::validation("cell_counts", format!("run with {cells} cells is unstable")));
            }
            Ok(r)
        })
        .collect::<Result<Vec<RunResult>>>()?;
    let reference = runs.last().expect("non-empty");
    let eq = [base.params.t0_hat, base.params.rho0_hat, base.params.p0_hat];
    let fields = [StudyField::T, StudyField::Rho, StudyField::P];
    let pick = |r: &RunResult, f: usize| -> Vec<f64> {
        let stride = (period / (reference_cells / r.cells)) as u64;
        r.probes
            .iter()
            .filter(|p| p.step % stride == 0)
            .map(|p| match f {
                0 => p.t_rear,
                1 => p.rho_rear,
                _ => p.p_rear,
            })
            .collect()
    };

    let mut out = Vec::new();
    for (run, &cells) in runs.iter().zip(&counts) {
        for (f, &field) in fields.iter().enumerate() {
            let a = pick(run, f);
            let b = pick(reference, f);
            let m = a.len().min(b.len());
            let diff = a[..m].iter().zip(&b[..m]).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
            let amp = b.iter().fold(0.0f64, |acc, y| acc.max((y - eq[f]).abs()));
            out.push(GridDeviation {
                cells,
                field,
                deviation: if amp > 0.0 { diff / amp } else { 0.0 },
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub splitting: RunResult,
    pub rk4: RunResult,
    pub splitting_metrics: DispersionMetrics,
    pub rk4_metrics: DispersionMetrics,
}

/// Splitting and RK4 runs with identical settings, scored by the dispersion
/// metrics of their rear-probe temperature.
pub fn compare_study(base: &SimulationConfig) -> Result<CompareReport> {
    let configs = [IntegratorKind::Splitting, IntegratorKind::Rk4].map(|integrator| SimulationConfig {
        integrator,
        ..base.clone()
    });
    let mut runs = configs
        .par_iter()
        .map(run_simulation)
        .collect::<Result<Vec<RunResult>>>()?;
    let rk4 = runs.pop().expect("two runs");
    let splitting = runs.pop().expect("two runs");
    let metrics = |r: &RunResult| {
        let series: Vec<f64> = r.probes.iter().filter(|p| p.step % base.probe_stride as u64 == 0).map(|p| p.t_rear).collect();
        dispersion_metrics(&series, base.params.t0_hat, r.dt * base.probe_stride as f64)
    };
    Ok(CompareReport {
        splitting_metrics: metrics(&splitting),
        rk4_metrics: metrics(&rk4),
        splitting,
        rk4,
    })
}
