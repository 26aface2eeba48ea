//! Staggered grid, discrete fields and central-difference operators.
//!
//! The unit interval is split into `N` cells. Velocity `v` and heat flux `q`
//! live on the `N + 1` integer nodes `x = n dx`; density, temperature and
//! viscous pressure live on the `N` half nodes `x = (n + 1/2) dx`. In the
//! splitting scheme density is additionally staggered by half a step in time.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::params::DimensionlessParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaggeredGrid {
    cells: usize,
    dx: f64,
}

impl StaggeredGrid {
    pub fn new(cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::validation("cells", format!("need at least 2, got {cells}")));
        }
        Ok(StaggeredGrid {
            cells,
            dx: 1.0 / cells as f64,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn node_x(&self, n: usize) -> f64 {
        n as f64 * self.dx
    }

    pub fn half_x(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.dx
    }
}

/// Which substep of a splitting step the state last completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    AtStepStart,
    AfterFirstIrrev,
    AfterRev,
    Complete,
}

/// How the fields are laid out in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeLayout {
    /// Splitting scheme: after `k` steps `v`, `q`, `pi` sit at `k dt` while
    /// `rho` sits at `(k - 1/2) dt`. The reversible part of `t` shares the
    /// half-level offset of `rho`.
    Staggered,
    /// Method-of-lines integrators: every field at `k dt`.
    Synchronous,
}

/// The five discrete fields plus time-level bookkeeping.
///
/// Density and temperature are stored as deviations from the reference
/// state `(rho_ref, t_ref)`. Near equilibrium the per-step updates are many
/// orders of magnitude below the reference values and would be rounded away
/// if added to them.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    /// Density deviation at half nodes.
    pub rho_dev: Vec<f64>,
    /// Velocity at nodes.
    pub v: Vec<f64>,
    /// Temperature deviation at half nodes.
    pub t_dev: Vec<f64>,
    /// Heat flux at nodes.
    pub q: Vec<f64>,
    /// Viscous pressure at half nodes.
    pub pi: Vec<f64>,
    /// Number of completed time steps.
    pub steps: u64,
    pub phase: Phase,
    pub layout: TimeLayout,
    pub rho_ref: f64,
    pub t_ref: f64,
}

impl FieldState {
    pub fn cells(&self) -> usize {
        self.rho_dev.len()
    }

    pub fn check_shape(&self, grid: &StaggeredGrid) -> Result<()> {
        let n = grid.cells();
        check_len("rho", n, self.rho_dev.len())?;
        check_len("t", n, self.t_dev.len())?;
        check_len("pi", n, self.pi.len())?;
        check_len("v", n + 1, self.v.len())?;
        check_len("q", n + 1, self.q.len())
    }

    /// First non-finite field, if any.
    pub fn first_non_finite(&self) -> Option<&'static str> {
        let fields: [(&'static str, &[f64]); 5] = [
            ("rho", &self.rho_dev),
            ("v", &self.v),
            ("t", &self.t_dev),
            ("q", &self.q),
            ("pi", &self.pi),
        ];
        fields
            .into_iter()
            .find(|(_, a)| a.iter().any(|x| !x.is_finite()))
            .map(|(name, _)| name)
    }

    /// Absolute density in cell `k`.
    pub fn rho(&self, k: usize) -> f64 {
        self.rho_ref + self.rho_dev[k]
    }

    /// Absolute temperature in cell `k`.
    pub fn temperature(&self, k: usize) -> f64 {
        self.t_ref + self.t_dev[k]
    }

    /// Sum of the density deviations; zero at the reference state.
    pub fn excess_mass(&self) -> f64 {
        self.rho_dev.iter().sum()
    }

    /// Sum of the absolute cell densities.
    pub fn total_mass(&self) -> f64 {
        self.rho_ref * self.cells() as f64 + self.excess_mass()
    }
}

/// Homogeneous static equilibrium.
///
/// Reversible tendencies vanish here, so extending `rho` and `t` backwards
/// to `-dt/2` leaves them unchanged.
pub fn init_equilibrium(grid: &StaggeredGrid, params: &DimensionlessParams) -> FieldState {
    let n = grid.cells();
    FieldState {
        rho_dev: vec![0.0; n],
        v: vec![0.0; n + 1],
        t_dev: vec![0.0; n],
        q: vec![0.0; n + 1],
        pi: vec![0.0; n],
        steps: 0,
        phase: Phase::Complete,
        layout: TimeLayout::Staggered,
        rho_ref: params.rho0_hat,
        t_ref: params.t0_hat,
    }
}

/// `(u[n+1] - u[n]) / dx` for every cell.
pub fn diff_nodes_to_half(u: &[f64], dx: f64) -> Result<Vec<f64>> {
    if u.len() < 2 {
        return Err(Error::Shape {
            what: "node array",
            expected: 2,
            found: u.len(),
        });
    }
    Ok(u.windows(2).map(|w| (w[1] - w[0]) / dx).collect())
}

/// `(w[n+1/2] - w[n-1/2]) / dx` at the interior nodes `1..N-1`.
pub fn diff_half_to_nodes(w: &[f64], dx: f64) -> Result<Vec<f64>> {
    if w.len() < 2 {
        return Err(Error::Shape {
            what: "half-node array",
            expected: 2,
            found: w.len(),
        });
    }
    Ok(w.windows(2).map(|p| (p[1] - p[0]) / dx).collect())
}

/// Where a probe samples the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeLocation {
    /// Half node `1/2` for cell fields, node `0` for node fields.
    FrontHalfCell,
    /// Half node `N - 1/2` for cell fields, node `N` for node fields.
    RearHalfCell,
    NodeIndex(usize),
    HalfNodeIndex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProbeField {
    #[serde(rename = "T")]
    T,
    #[serde(rename = "rho")]
    Rho,
    #[serde(rename = "p")]
    P,
    #[serde(rename = "v")]
    V,
    #[serde(rename = "q")]
    Q,
}

impl ProbeField {
    pub fn name(self) -> &'static str {
        match self {
            ProbeField::T => "T",
            ProbeField::Rho => "rho",
            ProbeField::P => "p",
            ProbeField::V => "v",
            ProbeField::Q => "q",
        }
    }

    fn on_nodes(self) -> bool {
        matches!(self, ProbeField::V | ProbeField::Q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub location: ProbeLocation,
    pub fields: Vec<ProbeField>,
}

/// Index into a node or half-node array, as resolved for one probe field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridIndex {
    Node(usize),
    Half(usize),
}

impl Probe {
    pub fn resolve(&self, field: ProbeField, grid: &StaggeredGrid) -> Result<GridIndex> {
        let n = grid.cells();
        let idx = match (self.location, field.on_nodes()) {
            (ProbeLocation::FrontHalfCell, true) => GridIndex::Node(0),
            (ProbeLocation::FrontHalfCell, false) => GridIndex::Half(0),
            (ProbeLocation::RearHalfCell, true) => GridIndex::Node(n),
            (ProbeLocation::RearHalfCell, false) => GridIndex::Half(n - 1),
            (ProbeLocation::NodeIndex(i), true) if i <= n => GridIndex::Node(i),
            (ProbeLocation::HalfNodeIndex(i), false) if i < n => GridIndex::Half(i),
            (ProbeLocation::NodeIndex(i), true) | (ProbeLocation::HalfNodeIndex(i), false) => {
                return Err(Error::validation(
                    "probes",
                    format!("index {i} outside a grid of {n} cells"),
                ))
            }
            (loc, _) => {
                return Err(Error::validation(
                    "probes",
                    format!("field `{}` is not stored at {loc:?}", field.name()),
                ))
            }
        };
        Ok(idx)
    }

    pub fn validate(&self, grid: &StaggeredGrid) -> Result<()> {
        if self.fields.is_empty() {
            return Err(Error::validation("probes", "a probe needs at least one field"));
        }
        for &f in &self.fields {
            self.resolve(f, grid)?;
        }
        Ok(())
    }
}
