use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excitation::HeatPulse;
use crate::grid::Probe;
use crate::harness::{ConvergenceSpec, IntegratorKind, SimulationConfig};
use crate::params::DimensionlessParams;

/// Dimensionless groups as written in a case file. `gamma0` defaults to
/// `(gamma - 1) / b` and `p0_hat` to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub gamma: f64,
    pub b: f64,
    pub ec_a: f64,
    pub pr: f64,
    /// `inf` for an inviscid fluid.
    pub re_a: f64,
    pub pe_a: f64,
    pub r_eta: f64,
    pub t0_hat: f64,
    pub rho0_hat: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
}

impl ParamsSection {
    pub fn to_params(&self) -> Result<DimensionlessParams> {
        let mut p = DimensionlessParams::from_groups(
            self.gamma,
            self.b,
            self.ec_a,
            self.pr,
            self.re_a,
            self.pe_a,
            self.r_eta,
            self.t0_hat,
            self.rho0_hat,
        )?;
        if let Some(g0) = self.gamma0 {
            p.gamma0 = g0;
        }
        if let Some(p0) = self.p0_hat {
            p.p0_hat = p0;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub cells: usize,
    /// `dt / dx`.
    pub courant: f64,
    pub t_end: f64,
    pub integrator: IntegratorKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub probe_stride: usize,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub probes: Vec<Probe>,
}

/// Settings used only by the `study` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    /// Cell counts of the convergence levels.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<usize>,
    /// Reference resolution over the finest convergence level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_factor: Option<usize>,
    /// Time of the convergence comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_compare: Option<f64>,
    /// Cell counts of the grid-independence runs; the largest is the reference.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cell_counts: Vec<usize>,
}

impl StudySection {
    pub fn convergence_spec(&self) -> Result<ConvergenceSpec> {
        let missing = |f: &str| Error::Config(format!("[study] needs `{f}` for a convergence study"));
        if self.levels.is_empty() {
            return Err(missing("levels"));
        }
        Ok(ConvergenceSpec {
            levels: self.levels.clone(),
            reference_factor: self.reference_factor.ok_or_else(|| missing("reference_factor"))?,
            t_compare: self.t_compare.ok_or_else(|| missing("t_compare"))?,
        })
    }
}

/// A complete case description. All quantities are dimensionless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub params: ParamsSection,
    pub grid: GridSection,
    pub pulse: HeatPulse,
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds and validates the simulation configuration.
    pub fn to_config(&self) -> Result<SimulationConfig> {
        let config = SimulationConfig {
            params: self.params.to_params()?,
            cells: self.grid.cells,
            courant: self.grid.courant,
            t_end: self.grid.t_end,
            pulse: self.pulse,
            integrator: self.grid.integrator,
            probes: self.output.probes.clone(),
            probe_stride: self.output.probe_stride,
            snapshot_times: self.output.snapshot_times.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ProbeField, ProbeLocation};
    use proptest::prelude::*;

    const WAVE: &str = r#"
name = "wave"
description = "short pulse"

[params]
gamma = 12.868
b = 41.744
ec_a = 0.0068299
pr = 5.805
re_a = inf
pe_a = 1e5
r_eta = 6.0
t0_hat = 1.00287
rho0_hat = 0.68666

[grid]
cells = 100
courant = 0.95
t_end = 2.0
integrator = "splitting"

[pulse]
q_hat = 0.001
tp_hat = 0.1

[output]
probe_stride = 10
snapshot_times = [0.25, 1.0]

[[output.probes]]
location = { node_index = 50 }
fields = ["v", "q"]

[[output.probes]]
location = "rear_half_cell"
fields = ["T"]
"#;

    #[test]
    fn parses_a_full_case() {
        let c = CaseFile::parse(WAVE).unwrap();
        assert_eq!(c.params.re_a, f64::INFINITY);
        assert_eq!(c.output.probes[0].location, ProbeLocation::NodeIndex(50));
        assert_eq!(c.output.probes[1].fields, vec![ProbeField::T]);
        let cfg = c.to_config().unwrap();
        assert_eq!(cfg.params.inv_re(), 0.0);
        assert!((cfg.params.gamma0 - 11.868 / 41.744).abs() < 1e-15);
        assert_eq!(cfg.integrator, IntegratorKind::Splitting);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = WAVE.replace("probe_stride = 10", "probe_stride = 10\ncolour = 3");
        assert!(matches!(CaseFile::parse(&bad), Err(Error::Config(_))));
        let bad = WAVE.replace("r_eta = 6.0", "r_eta = 6.0\nmach = 0.1");
        assert!(CaseFile::parse(&bad).is_err());
    }

    #[test]
    fn rejects_missing_keys() {
        let bad = WAVE.replace("tp_hat = 0.1", "");
        assert!(CaseFile::parse(&bad).is_err());
    }

    #[test]
    fn invalid_values_fail_validation() {
        let bad = WAVE.replace("courant = 0.95", "courant = -1.0");
        let c = CaseFile::parse(&bad).unwrap();
        assert!(matches!(c.to_config(), Err(Error::Validation { .. })));
        let bad = WAVE.replace("[0.25, 1.0]", "[0.25, 3.0]");
        assert!(CaseFile::parse(&bad).unwrap().to_config().is_err());
    }

    #[test]
    fn study_section_requires_its_fields() {
        let s = StudySection {
            levels: vec![50, 100, 200],
            reference_factor: None,
            t_compare: Some(2.0),
            cell_counts: vec![],
        };
        assert!(s.convergence_spec().is_err());
    }

    fn arb_case() -> impl Strategy<Value = CaseFile> {
        let params = (
            1.0f64..20.0,
            0.0f64..50.0,
            0.0f64..1.0,
            0.1f64..10.0,
            prop_oneof![Just(f64::INFINITY), 1.0f64..1e7],
            1.0f64..1e8,
            0.0f64..10.0,
            0.5f64..2.0,
            0.001f64..2.0,
            prop::option::of(-1.0f64..1.0),
        )
            .prop_map(|(gamma, b, ec_a, pr, re_a, pe_a, r_eta, t0_hat, rho0_hat, p0_hat)| ParamsSection {
                gamma,
                b,
                ec_a,
                pr,
                re_a,
                pe_a,
                r_eta,
                t0_hat,
                rho0_hat,
                p0_hat,
                gamma0: None,
            });
        let probe = (
            prop_oneof![
                Just(ProbeLocation::FrontHalfCell),
                Just(ProbeLocation::RearHalfCell),
                (0usize..10).prop_map(ProbeLocation::NodeIndex),
                (0usize..10).prop_map(ProbeLocation::HalfNodeIndex),
            ],
            prop::collection::vec(
                prop_oneof![
                    Just(ProbeField::T),
                    Just(ProbeField::Rho),
                    Just(ProbeField::P),
                    Just(ProbeField::V),
                    Just(ProbeField::Q)
                ],
                1..4,
            ),
        )
            .prop_map(|(location, fields)| Probe { location, fields });
        (
            "[a-z][a-z0-9_-]{0,12}",
            ".{0,40}",
            params,
            (2usize..500, 0.01f64..1.5, 0.1f64..1e4, prop::bool::ANY),
            (0.0f64..1.0, 0.01f64..100.0),
            (1usize..100, prop::collection::vec(0.0f64..10.0, 0..4), prop::collection::vec(probe, 0..3)),
            prop::option::of((prop::collection::vec(2usize..400, 0..4), prop::option::of(4usize..16))),
        )
            .prop_map(|(name, description, params, g, pulse, out, study)| CaseFile {
                name,
                description,
                params,
                grid: GridSection {
                    cells: g.0,
                    courant: g.1,
                    t_end: g.2,
                    integrator: if g.3 { IntegratorKind::Splitting } else { IntegratorKind::Rk4 },
                },
                pulse: HeatPulse {
                    q_hat: pulse.0,
                    tp_hat: pulse.1,
                },
                output: OutputSection {
                    probe_stride: out.0,
                    snapshot_times: out.1,
                    probes: out.2,
                },
                study: study.map(|(levels, reference_factor)| StudySection {
                    levels,
                    reference_factor,
                    t_compare: Some(2.0),
                    cell_counts: vec![20, 50, 100],
                }),
            })
    }

    proptest! {
        #[test]
        fn toml_round_trip(case in arb_case()) {
            let text = case.to_toml().unwrap();
            let back = CaseFile::parse(&text).unwrap();
            prop_assert_eq!(back, case);
        }
    }
}
