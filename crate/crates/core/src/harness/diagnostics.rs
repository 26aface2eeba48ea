use crate::error::{Error, Result};

/// Whether a sampled field lives on the nodes or on the half nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Staggering {
    Node,
    Half,
}

/// A field sampled on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    pub at: Staggering,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn node(values: Vec<f64>) -> Self {
        Sampled { at: Staggering::Node, values }
    }

    pub fn half(values: Vec<f64>) -> Self {
        Sampled { at: Staggering::Half, values }
    }
}

/// Discrete L2 distance `sqrt(dx * sum (sol - ref)^2)`.
pub fn l2_error(sol: &Sampled, reference: &Sampled, dx: f64) -> Result<f64> {
    if sol.at != reference.at {
        return Err(Error::validation(
            "l2_error",
            format!("cannot compare a {:?} field with a {:?} field", sol.at, reference.at),
        ));
    }
    crate::error::check_len("reference", sol.values.len(), reference.values.len())?;
    let sum: f64 = sol
        .values
        .iter()
        .zip(&reference.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((dx * sum).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionMetrics {
    /// `max(0, T0 - min T)`.
    pub max_undershoot: f64,
    /// Sum of squared consecutive differences of the series after removing
    /// its centered moving median.
    pub oscillation_energy: f64,
}

/// Centered moving median; the window shrinks near the ends.
pub fn moving_median(series: &[f64], window: usize) -> Vec<f64> {
    let half = window.max(1) / 2;
    let mut buf = Vec::with_capacity(2 * half + 1);
    (0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(series.len());
            buf.clear();
            buf.extend_from_slice(&series[lo..hi]);
            buf.sort_by(f64::total_cmp);
            let m = buf.len();
            if m % 2 == 1 {
                buf[m / 2]
            } else {
                0.5 * (buf[m / 2 - 1] + buf[m / 2])
            }
        })
        .collect()
}

/// Undershoot and high-frequency content of a temperature series sampled
/// every `sample_interval`. The median window spans one acoustic transit,
/// which is one time unit.
pub fn dispersion_metrics(series: &[f64], t0_hat: f64, sample_interval: f64) -> DispersionMetrics {
    if series.is_empty() {
        return DispersionMetrics {
            max_undershoot: 0.0,
            oscillation_energy: 0.0,
        };
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let window = (1.0 / sample_interval).round().max(1.0) as usize;
    let median = moving_median(series, window);
    let residual: Vec<f64> = series.iter().zip(&median).map(|(s, m)| s - m).collect();
    let oscillation_energy = residual.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    DispersionMetrics {
        max_undershoot: (t0_hat - min).max(0.0),
        oscillation_energy,
    }
}
