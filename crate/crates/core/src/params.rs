//! Map parameters and dynamical-regime classification.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dynamical regime of the classical sawtooth map for a given chaos
/// parameter `K`: chaotic for K > 0 or K < -4, integrable exactly at
/// K in {-3, -2, -1, 0}, mixed phase space elsewhere in [-4, 0].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Integrable,
    Mixed,
    Chaotic,
}

impl Regime {
    pub fn classify(chaos: f64) -> Regime {
        if !(-4.0..=0.0).contains(&chaos) {
            Regime::Chaotic
        } else if chaos == 0.0 || chaos == -1.0 || chaos == -2.0 || chaos == -3.0 {
            Regime::Integrable
        } else {
            Regime::Mixed
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Integrable => "integrable",
            Regime::Mixed => "mixed",
            Regime::Chaotic => "chaotic",
        };
        f.write_str(s)
    }
}

/// Parameters of one quantum sawtooth map instance.
///
/// The Hilbert dimension is `dim = 2^n_qubits`. The kick period is tied
/// to the dimension, `period = 2π / dim`, which places the system at the
/// quantum scale where one map cell covers the whole torus; the kick
/// strength follows from the chaos parameter via `kick * period = chaos`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapParams {
    /// Number of qubits of the simulating register.
    pub n_qubits: u32,
    /// Hilbert-space dimension, `2^n_qubits`.
    pub dim: usize,
    /// Dimensionless chaos parameter `K = kick * period`.
    pub chaos: f64,
    /// Kick period `T = 2π / dim`.
    pub period: f64,
    /// Kick strength `k = K / T`.
    pub kick: f64,
    /// Classical dynamical regime implied by `chaos`.
    pub regime: Regime,
}

impl MapParams {
    /// Upper bound on the register size; 2^24 amplitudes is the largest
    /// state we are willing to allocate (256 MiB).
    pub const MAX_QUBITS: u32 = 24;

    pub fn new(n_qubits: u32, chaos: f64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > Self::MAX_QUBITS {
            return Err(Error::InvalidParams(format!(
                "n_qubits must be in 1..={}, got {n_qubits}",
                Self::MAX_QUBITS
            )));
        }
        if !chaos.is_finite() {
            return Err(Error::InvalidParams(format!(
                "chaos parameter must be finite, got {chaos}"
            )));
        }
        let dim = 1usize << n_qubits;
        let period = TAU / dim as f64;
        let kick = chaos / period;
        Ok(MapParams {
            n_qubits,
            dim,
            chaos,
            period,
            kick,
            regime: Regime::classify(chaos),
        })
    }

    /// Physical momentum level of amplitude index `m` (symmetric window,
    /// `n = m - dim/2`).
    #[inline]
    pub fn momentum_of_index(&self, m: usize) -> f64 {
        m as f64 - (self.dim / 2) as f64
    }

    /// Angle grid point `θ_j = 2π j / dim`.
    #[inline]
    pub fn angle_of_index(&self, j: usize) -> f64 {
        TAU * j as f64 / self.dim as f64
    }

    /// Default minimal-uncertainty momentum width `σ_n = sqrt(dim / 4π)`,
    /// for which `σ_θ σ_n = 1/2`.
    pub fn default_packet_width(&self) -> f64 {
        (self.dim as f64 / (2.0 * TAU)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn builds_params_with_bound_constraints() {
        let p = MapParams::new(8, 2.0_f64.sqrt()).unwrap();
        assert_eq!(p.dim, 256);
        assert_eq!(p.period, TAU / 256.0);
        // kick is forced by kick * period = chaos
        assert_eq!(p.kick, 2.0_f64.sqrt() * 256.0 / TAU);
        assert!((p.kick * p.period - p.chaos).abs() <= f64::EPSILON * p.chaos.abs());
        assert_eq!(p.regime, Regime::Chaotic);
    }

    #[test]
    fn single_qubit_zero_kick_is_integrable() {
        let p = MapParams::new(1, 0.0).unwrap();
        assert_eq!(p.dim, 2);
        assert_eq!(p.period, PI);
        assert_eq!(p.kick, 0.0);
        assert_eq!(p.regime, Regime::Integrable);
    }

    #[test]
    fn regime_classification() {
        assert_eq!(Regime::classify(-1.0), Regime::Integrable);
        assert_eq!(Regime::classify(-2.0), Regime::Integrable);
        assert_eq!(Regime::classify(-3.0), Regime::Integrable);
        assert_eq!(Regime::classify(0.0), Regime::Integrable);
        assert_eq!(Regime::classify(0.5), Regime::Chaotic);
        assert_eq!(Regime::classify(2.0_f64.sqrt()), Regime::Chaotic);
        assert_eq!(Regime::classify(-4.5), Regime::Chaotic);
        assert_eq!(Regime::classify(-2.1), Regime::Mixed);
        assert_eq!(Regime::classify(-4.0), Regime::Mixed);
        assert_eq!(Regime::classify(-0.3), Regime::Mixed);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(MapParams::new(0, 1.0).is_err());
        assert!(MapParams::new(25, 1.0).is_err());
        assert!(MapParams::new(4, f64::NAN).is_err());
        assert!(MapParams::new(4, f64::INFINITY).is_err());
    }

    #[test]
    fn symmetric_momentum_window() {
        let p = MapParams::new(3, 1.0).unwrap();
        assert_eq!(p.momentum_of_index(0), -4.0);
        assert_eq!(p.momentum_of_index(4), 0.0);
        assert_eq!(p.momentum_of_index(7), 3.0);
    }
}
