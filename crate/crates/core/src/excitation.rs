//! Pulse-like boundary heating and the closed-pipe wall conditions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FieldState;

/// Raised-cosine heat pulse injected at the left wall.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatPulse {
    /// Dimensionless cross-section specific heat delivered by the pulse.
    pub q_hat: f64,
    /// Dimensionless pulse duration.
    pub tp_hat: f64,
}

impl HeatPulse {
    pub fn new(q_hat: f64, tp_hat: f64) -> Result<Self> {
        let p = HeatPulse { q_hat, tp_hat };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tp_hat.is_finite() && self.tp_hat > 0.0) {
            return Err(Error::validation("tp_hat", format!("must be > 0, got {}", self.tp_hat)));
        }
        if !(self.q_hat.is_finite() && self.q_hat >= 0.0) {
            return Err(Error::validation("q_hat", format!("must be >= 0, got {}", self.q_hat)));
        }
        Ok(())
    }
}

/// Left-wall heat flux `(1/rho0) (q/tP) [1 - cos(2 pi t / tP)]` on `[0, tP]`.
pub fn pulse_flux(t_hat: f64, pulse: &HeatPulse, rho0_hat: f64) -> f64 {
    if (0.0..=pulse.tp_hat).contains(&t_hat) {
        pulse.q_hat / (rho0_hat * pulse.tp_hat) * (1.0 - (2.0 * PI * t_hat / pulse.tp_hat).cos())
    } else {
        0.0
    }
}

/// Closed, rigid pipe heated at the left end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedPipe {
    pub pulse: HeatPulse,
    pub rho0_hat: f64,
}

impl ClosedPipe {
    pub fn new(pulse: HeatPulse, rho0_hat: f64) -> Self {
        ClosedPipe { pulse, rho0_hat }
    }

    pub fn left_flux(&self, t_hat: f64) -> f64 {
        pulse_flux(t_hat, &self.pulse, self.rho0_hat)
    }

    /// Wall velocities, zero for a closed pipe.
    pub fn wall_velocity(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    /// Enforces the wall conditions at time `t_hat`.
    pub fn apply(&self, state: &mut FieldState, t_hat: f64) {
        apply_closed_walls(state, self.left_flux(t_hat));
    }
}

/// Rigid adiabatic walls except for the prescribed left-wall flux.
pub fn apply_closed_walls(state: &mut FieldState, left_flux: f64) {
    let last = state.v.len() - 1;
    state.v[0] = 0.0;
    state.v[last] = 0.0;
    state.q[0] = left_flux;
    state.q[last] = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_vanishes_at_ends() {
        let p = HeatPulse::new(0.001, 0.1).unwrap();
        assert_eq!(pulse_flux(0.0, &p, 0.7), 0.0);
        assert!(pulse_flux(0.1, &p, 0.7).abs() < 1e-16);
        assert_eq!(pulse_flux(0.1 + 1e-12, &p, 0.7), 0.0);
        assert_eq!(pulse_flux(-1e-12, &p, 0.7), 0.0);
        assert_eq!(pulse_flux(5.0, &p, 0.7), 0.0);
    }

    #[test]
    fn flux_peak_at_mid_pulse() {
        let p = HeatPulse::new(0.001, 0.1).unwrap();
        let peak = pulse_flux(0.05, &p, 0.68666);
        assert!((peak - 2.0 * 0.001 / (0.68666 * 0.1)).abs() < 1e-15);
    }

    #[test]
    fn pulse_integral_is_heat_over_density() {
        // composite Simpson with many panels against the analytic q/rho0
        let p = HeatPulse::new(0.00035, 50.0).unwrap();
        let rho0 = 0.68666;
        let m = 20_000;
        let h = p.tp_hat / m as f64;
        let mut s = pulse_flux(0.0, &p, rho0) + pulse_flux(p.tp_hat, &p, rho0);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * pulse_flux(i as f64 * h, &p, rho0);
        }
        let integral = s * h / 3.0;
        assert!((integral - p.q_hat / rho0).abs() < 1e-10);
    }

    #[test]
    fn peak_is_twice_the_mean() {
        let p = HeatPulse::new(0.125, 73.694).unwrap();
        let mean = p.q_hat / (1.0 * p.tp_hat);
        assert!((pulse_flux(p.tp_hat / 2.0, &p, 1.0) - 2.0 * mean).abs() < 1e-15);
    }

    #[test]
    fn flux_nonnegative() {
        let p = HeatPulse::new(0.3, 1.3).unwrap();
        for i in 0..=1000 {
            assert!(pulse_flux(i as f64 * 0.002 - 0.3, &p, 0.5) >= 0.0);
        }
    }

    #[test]
    fn invalid_pulses() {
        assert!(HeatPulse::new(0.1, 0.0).is_err());
        assert!(HeatPulse::new(-0.1, 1.0).is_err());
    }
}
