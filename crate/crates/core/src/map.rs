//! Exact (gate-free) evolution of the quantum sawtooth map.
//!
//! One Floquet period applies, in order: the transform to the angle
//! representation, the kick phase `exp(i k (θ_j - π)² / 2)`, the transform
//! back to the momentum representation, and the free-rotation phase
//! `exp(-i T n² / 2)` with `n = m - dim/2`.
//!
//! The transform convention is fixed so the gate-level simulator can
//! reproduce it exactly:
//! `ψ_ang(j) = (1/√dim) Σ_m ψ_mom(m) exp(i (m - dim/2) θ_j)`, with the
//! inverse using the conjugate kernel. In terms of an unnormalized FFT
//! this is an inverse FFT followed by a `(-1)^j` sign; the two signs from
//! the forward and backward transforms cancel against the diagonal kick,
//! so the fused step below multiplies the kick phase by `1/dim` only.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::params::MapParams;
use crate::state::{Representation, StateVector};

/// FFT-based propagator for one sawtooth-map instance. Construction
/// precomputes the FFT plans and the diagonal phase tables; stepping is
/// allocation-free.
pub struct SawtoothMap {
    params: MapParams,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Kick phases with the `1/dim` FFT normalization folded in.
    kick_scaled: Vec<Complex64>,
    /// Free-rotation phases `exp(-i T n² / 2)`.
    free: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SawtoothMap {
    pub fn new(params: MapParams) -> Self {
        let dim = params.dim;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft(dim, FftDirection::Forward);
        let inv = planner.plan_fft(dim, FftDirection::Inverse);
        let kick_scaled = (0..dim)
            .map(|j| {
                let t = params.angle_of_index(j) - std::f64::consts::PI;
                Complex64::cis(params.kick * t * t / 2.0) / dim as f64
            })
            .collect();
        let free = (0..dim)
            .map(|m| {
                let n = params.momentum_of_index(m);
                Complex64::cis(-params.period * n * n / 2.0)
            })
            .collect();
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        SawtoothMap {
            params,
            fwd,
            inv,
            kick_scaled,
            free,
            scratch: vec![Complex64::ZERO; scratch_len],
        }
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    /// One Floquet period. The state must be in the momentum
    /// representation and keeps it.
    pub fn step(&mut self, state: &mut StateVector) {
        assert_eq!(
            state.repr(),
            Representation::Momentum,
            "exact step requires a momentum-representation state"
        );
        assert_eq!(state.dim(), self.params.dim, "state/params dimension mismatch");
        let amps = state.amps_mut();
        self.inv.process_with_scratch(amps, &mut self.scratch);
        for (a, k) in amps.iter_mut().zip(&self.kick_scaled) {
            *a *= k;
        }
        self.fwd.process_with_scratch(amps, &mut self.scratch);
        for (a, f) in amps.iter_mut().zip(&self.free) {
            *a *= f;
        }
    }

    /// Iterates [`SawtoothMap::step`]; `steps = 0` is the identity.
    pub fn evolve(&mut self, state: &mut StateVector, steps: usize) {
        for _ in 0..steps {
            self.step(state);
        }
    }

    /// Momentum → angle transform in the documented convention.
    pub fn to_angle(&mut self, state: &mut StateVector) {
        assert_eq!(state.repr(), Representation::Momentum);
        let scale = 1.0 / (self.params.dim as f64).sqrt();
        let amps = state.amps_mut();
        self.inv.process_with_scratch(amps, &mut self.scratch);
        for (j, a) in amps.iter_mut().enumerate() {
            *a *= if j % 2 == 0 { scale } else { -scale };
        }
        state.set_repr(Representation::Angle);
    }

    /// Angle → momentum transform (conjugate kernel).
    pub fn to_momentum(&mut self, state: &mut StateVector) {
        assert_eq!(state.repr(), Representation::Angle);
        let scale = 1.0 / (self.params.dim as f64).sqrt();
        let amps = state.amps_mut();
        for (j, a) in amps.iter_mut().enumerate() {
            if j % 2 == 1 {
                *a = -*a;
            }
        }
        self.fwd.process_with_scratch(amps, &mut self.scratch);
        for a in amps.iter_mut() {
            *a *= scale;
        }
        state.set_repr(Representation::Momentum);
    }
}
