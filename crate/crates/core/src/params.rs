//! Material data, dimensionless groups and the linearized equation of state.
//!
//! The simulator works entirely in dimensionless variables: time is scaled by
//! the acoustic transit time `X / a_s`, lengths by the pipe length `X`,
//! temperature and density by their critical values. [`DimensionlessParams`]
//! carries every group that appears in the governing equations. It can be
//! built directly from groups (how experiment cases are specified) or derived
//! from a [`MaterialState`] with [`derive_dimensionless`].

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Dimensional equilibrium state and transport properties of a fluid (SI units).
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialState {
    /// Temperature [K].
    pub t_bar: f64,
    /// Pressure [Pa].
    pub p_bar: f64,
    /// Density [kg/m³].
    pub rho_bar: f64,
    /// Isobaric specific heat [J/(kg K)].
    pub c_p: f64,
    /// Isentropic speed of sound [m/s].
    pub a_s: f64,
    /// Isobaric volumetric thermal expansion coefficient [1/K].
    pub beta_p: f64,
    /// Specific-heat ratio.
    pub gamma: f64,
    /// Kinematic viscosity [m²/s].
    pub nu: f64,
    /// Thermal diffusivity [m²/s].
    pub a_th: f64,
    /// Volume-to-shear viscosity ratio.
    pub r_eta: f64,
    /// Critical temperature [K].
    pub t_c: f64,
    /// Critical density [kg/m³].
    pub rho_c: f64,
}

/// Whether `nu = 0` is accepted by [`derive_dimensionless`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViscosityPolicy {
    RequireViscous,
    /// `nu = 0` is accepted and yields `re_a = inf`, `pr = 0`.
    AllowInviscid,
}

/// Dimensionless groups parametrizing the 1-D linear thermoacoustic system.
///
/// `re_a` and `pe_a` may be `f64::INFINITY`, which switches viscosity or heat
/// conduction off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessParams {
    pub gamma: f64,
    /// Dimensionless thermal expansion `beta_p * T`.
    pub b: f64,
    /// Acoustic Eckert number `a_s^2 / (c_p T_c)`.
    pub ec_a: f64,
    pub pr: f64,
    /// Acoustic Reynolds number `a_s X / nu`.
    pub re_a: f64,
    /// Acoustic Péclet number `a_s X / a`.
    pub pe_a: f64,
    pub r_eta: f64,
    /// Equilibrium temperature over critical temperature.
    pub t0_hat: f64,
    /// Equilibrium density over critical density.
    pub rho0_hat: f64,
    #[serde(default)]
    pub p0_hat: f64,
    /// Grüneisen parameter `beta_p a_s^2 / c_p`.
    pub gamma0: f64,
}

impl DimensionlessParams {
    /// Builds a parameter set from groups given directly.
    ///
    /// The Grüneisen parameter is filled in from the thermodynamic identity
    /// `gamma = 1 + B * Gamma0` and `p0_hat` defaults to zero.
    #[allow(clippy::too_many_arguments)]
    pub fn from_groups(
        gamma: f64,
        b: f64,
        ec_a: f64,
        pr: f64,
        re_a: f64,
        pe_a: f64,
        r_eta: f64,
        t0_hat: f64,
        rho0_hat: f64,
    ) -> Result<Self> {
        let gamma0 = if b == 0.0 { 0.0 } else { (gamma - 1.0) / b };
        let p = DimensionlessParams {
            gamma,
            b,
            ec_a,
            pr,
            re_a,
            pe_a,
            r_eta,
            t0_hat,
            rho0_hat,
            p0_hat: 0.0,
            gamma0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("gamma", self.gamma),
            ("b", self.b),
            ("ec_a", self.ec_a),
            ("pr", self.pr),
            ("r_eta", self.r_eta),
            ("t0_hat", self.t0_hat),
            ("rho0_hat", self.rho0_hat),
            ("p0_hat", self.p0_hat),
            ("gamma0", self.gamma0),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::validation(name, format!("must be finite, got {value}")));
            }
        }
        if self.gamma < 1.0 {
            return Err(Error::validation("gamma", format!("must be >= 1, got {}", self.gamma)));
        }
        for (name, value) in [("t0_hat", self.t0_hat), ("rho0_hat", self.rho0_hat)] {
            if value <= 0.0 {
                return Err(Error::validation(name, format!("must be > 0, got {value}")));
            }
        }
        for (name, value) in [("ec_a", self.ec_a), ("r_eta", self.r_eta), ("pr", self.pr)] {
            if value < 0.0 {
                return Err(Error::validation(name, format!("must be >= 0, got {value}")));
            }
        }
        for (name, value) in [("re_a", self.re_a), ("pe_a", self.pe_a)] {
            if value.is_nan() || value <= 0.0 {
                return Err(Error::validation(
                    name,
                    format!("must be > 0 (inf disables the process), got {value}"),
                ));
            }
        }
        if self.gamma0 != 0.0 && self.b != 0.0 && self.gamma0.signum() != self.b.signum() {
            return Err(Error::validation("gamma0", "must share the sign of b"));
        }
        Ok(())
    }

    /// `1 / Re_a`, zero in the inviscid limit.
    pub fn inv_re(&self) -> f64 {
        if self.re_a.is_infinite() {
            0.0
        } else {
            1.0 / self.re_a
        }
    }

    /// `1 / Pe_a = 1 / (Pr Re_a)`, zero for a non-conducting fluid.
    pub fn inv_pe(&self) -> f64 {
        if self.pe_a.is_infinite() {
            0.0
        } else {
            1.0 / self.pe_a
        }
    }

    /// Wave speed of the reversible subsystem in units of `a_s`.
    ///
    /// Equals one exactly when the groups satisfy `gamma - 1 = B^2 Ec_a / T0`;
    /// rounded inputs shift it slightly, which matters at Courant numbers
    /// close to one.
    pub fn reversible_wave_speed(&self) -> f64 {
        ((1.0 + self.b * self.b * self.ec_a / self.t0_hat) / self.gamma).sqrt()
    }

    /// Linearized thermal equation of state at a single point.
    pub fn pressure(&self, t_hat: f64, rho_hat: f64) -> f64 {
        self.p0_hat
            + self.rho0_hat * self.b / (self.gamma * self.t0_hat) * (t_hat - self.t0_hat)
            + (rho_hat - self.rho0_hat) / self.gamma
    }
}

/// Derives all dimensionless groups for a pipe of length `pipe_length` [m].
pub fn derive_dimensionless(
    mat: &MaterialState,
    pipe_length: f64,
    policy: ViscosityPolicy,
) -> Result<DimensionlessParams> {
    let positive = [
        ("t_bar", mat.t_bar),
        ("rho_bar", mat.rho_bar),
        ("c_p", mat.c_p),
        ("a_s", mat.a_s),
        ("a_th", mat.a_th),
        ("t_c", mat.t_c),
        ("rho_c", mat.rho_c),
        ("pipe_length", pipe_length),
    ];
    for (name, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::validation(name, format!("must be > 0, got {value}")));
        }
    }
    for (name, value) in [("nu", mat.nu), ("r_eta", mat.r_eta)] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::validation(name, format!("must be >= 0, got {value}")));
        }
    }
    if !(mat.gamma.is_finite() && mat.gamma >= 1.0) {
        return Err(Error::validation("gamma", format!("must be >= 1, got {}", mat.gamma)));
    }
    if !mat.beta_p.is_finite() {
        return Err(Error::validation("beta_p", "must be finite"));
    }
    if mat.nu == 0.0 && policy == ViscosityPolicy::RequireViscous {
        return Err(Error::validation(
            "nu",
            "zero viscosity requires the inviscid limit to be requested",
        ));
    }

    let re_a = if mat.nu == 0.0 {
        f64::INFINITY
    } else {
        mat.a_s * pipe_length / mat.nu
    };
    let p = DimensionlessParams {
        gamma: mat.gamma,
        b: mat.beta_p * mat.t_bar,
        ec_a: mat.a_s * mat.a_s / (mat.c_p * mat.t_c),
        pr: mat.nu / mat.a_th,
        re_a,
        pe_a: mat.a_s * pipe_length / mat.a_th,
        r_eta: mat.r_eta,
        t0_hat: mat.t_bar / mat.t_c,
        rho0_hat: mat.rho_bar / mat.rho_c,
        p0_hat: 0.0,
        gamma0: mat.beta_p * mat.a_s * mat.a_s / mat.c_p,
    };
    Ok(p)
}

/// Evaluates the linearized equation of state on matching temperature and
/// density arrays.
pub fn pressure_field(
    t_hat: &[f64],
    rho_hat: &[f64],
    params: &DimensionlessParams,
) -> Result<Vec<f64>> {
    check_len("rho_hat", t_hat.len(), rho_hat.len())?;
    Ok(t_hat
        .iter()
        .zip(rho_hat)
        .map(|(&t, &r)| params.pressure(t, r))
        .collect())
}

/// One row of a property table, as read from CSV (SI units).
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct MaterialRow {
    /// Optional label, needed when two rows share `(T, p)`.
    #[serde(default)]
    pub material: Option<String>,
    #[serde(rename = "T")]
    pub t: f64,
    pub p: f64,
    pub rho: f64,
    pub cp: f64,
    #[serde(rename = "as")]
    pub a_s: f64,
    pub betap: f64,
    pub gamma: f64,
    pub nu: f64,
    pub ath: f64,
}

impl MaterialRow {
    /// Completes the row with the data a property table does not carry.
    pub fn to_state(&self, r_eta: f64, t_c: f64, rho_c: f64) -> MaterialState {
        MaterialState {
            t_bar: self.t,
            p_bar: self.p,
            rho_bar: self.rho,
            c_p: self.cp,
            a_s: self.a_s,
            beta_p: self.betap,
            gamma: self.gamma,
            nu: self.nu,
            a_th: self.ath,
            r_eta,
            t_c,
            rho_c,
        }
    }
}

/// Property table with header `T,p,rho,cp,as,betap,gamma,nu,ath`.
#[derive(Clone, Debug, Default)]
pub struct MaterialTable {
    pub rows: Vec<MaterialRow>,
}

impl MaterialTable {
    pub const HEADER: [&'static str; 9] = ["T", "p", "rho", "cp", "as", "betap", "gamma", "nu", "ath"];

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
        for col in Self::HEADER {
            if !headers.iter().any(|h| h == col) {
                return Err(Error::Table(format!("missing column `{col}`")));
            }
        }
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<MaterialRow>, _>>()
            .map_err(|e| Error::Table(e.to_string()))?;
        Ok(MaterialTable { rows })
    }

    /// Row whose temperature and pressure equal `(t, p)` exactly and, when
    /// `material` is given, whose label matches it.
    pub fn find(&self, t: f64, p: f64, material: Option<&str>) -> Option<&MaterialRow> {
        self.rows
            .iter()
            .filter(|r| material.is_none() || r.material.as_deref() == material)
            .find(|r| r.t == t && r.p == p)
    }
}
