//! Explicit quantum-gate decomposition of one sawtooth-map period.
//!
//! The circuit realizes the exact Floquet step with
//! `2 n_q² + 2 n_q` elementary gates:
//!
//! 1. a swap-free Fourier ladder (Hadamards plus controlled phases) that
//!    maps the momentum register to the angle register with the output
//!    index bit-reversed,
//! 2. the kick phase `exp(i (k/2) (2π/dim)² (j - dim/2)²)`, decomposed
//!    over the binary expansion of `j` and addressed through the
//!    bit-reversed qubit order left by the ladder,
//! 3. the conjugate ladder in mirror order, which also undoes the bit
//!    reversal,
//! 4. the free-rotation phase `exp(-i (T/2) (m - dim/2)²)` decomposed the
//!    same way in natural qubit order.
//!
//! Constant phases produced by the diagonal decompositions are not
//! emitted as gates; they are accumulated in [`Circuit::global_phase`]
//! so the gate count stays at the closed-form value and the circuit
//! reproduces the exact step including its global phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::MapParams;
use crate::state::{Representation, StateVector};

/// One elementary gate. Qubit `a` carries bit `a` of the amplitude index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    /// Hadamard on one qubit.
    Hadamard { target: u32 },
    /// `diag(1, 1, 1, e^{iφ})` on a control/target pair.
    ControlledPhase { control: u32, target: u32, angle: f64 },
    /// `diag(1, e^{iφ})` on one qubit.
    SinglePhase { target: u32, angle: f64 },
}

impl Gate {
    fn validate(&self, n_qubits: u32) -> Result<()> {
        let check = |q: u32| {
            if q >= n_qubits {
                Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                })
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Hadamard { target } => check(target),
            Gate::SinglePhase { target, angle } => {
                if !angle.is_finite() {
                    return Err(Error::InvalidParams("non-finite gate angle".into()));
                }
                check(target)
            }
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => {
                if !angle.is_finite() {
                    return Err(Error::InvalidParams("non-finite gate angle".into()));
                }
                if control == target {
                    return Err(Error::InvalidParams(
                        "controlled phase needs distinct qubits".into(),
                    ));
                }
                check(control)?;
                check(target)
            }
        }
    }

    /// True for gates diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        !matches!(self, Gate::Hadamard { .. })
    }
}

/// Gate list realizing one Floquet period for a fixed [`MapParams`].
#[derive(Clone, Debug)]
pub struct Circuit {
    params: MapParams,
    gates: Vec<Gate>,
    /// Constant phase folded out of the diagonal decompositions; applying
    /// all gates and then this phase reproduces the exact step.
    global_phase: f64,
}

impl Circuit {
    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    /// Closed-form gate count of the decomposition: two Fourier ladders
    /// of `n(n+1)/2` gates plus two diagonal blocks of `n(n-1)/2 + n`.
    pub fn expected_gate_count(n_qubits: u32) -> usize {
        let n = n_qubits as usize;
        2 * n * n + 2 * n
    }

    /// Applies the circuit (gates, then the recorded global phase) to a
    /// momentum-representation state. With no imperfections this equals
    /// the exact Floquet step.
    pub fn apply(&self, state: &mut StateVector) {
        assert_eq!(state.repr(), Representation::Momentum);
        for gate in &self.gates {
            apply_gate_unchecked(state.amps_mut(), gate);
        }
        let phase = Complex64::cis(self.global_phase);
        for a in state.amps_mut() {
            *a *= phase;
        }
    }

    /// Plain-text gate listing for debugging dumps.
    pub fn describe(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# floquet circuit: n_qubits={} chaos={:+.6} gates={} global_phase={:+.17e}",
            self.params.n_qubits,
            self.params.chaos,
            self.gates.len(),
            self.global_phase
        );
        for (i, g) in self.gates.iter().enumerate() {
            let line = match *g {
                Gate::Hadamard { target } => format!("{i:5}  H        q{target}"),
                Gate::SinglePhase { target, angle } => {
                    format!("{i:5}  PHASE    q{target}  angle={angle:+.17e}")
                }
                Gate::ControlledPhase {
                    control,
                    target,
                    angle,
                } => format!("{i:5}  CPHASE   q{control},q{target}  angle={angle:+.17e}"),
            };
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// Applies one gate to a `2^n_qubits` amplitude array in O(dim).
pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    let n_qubits = state.dim().trailing_zeros();
    gate.validate(n_qubits)?;
    apply_gate_unchecked(state.amps_mut(), gate);
    Ok(())
}

pub(crate) fn apply_gate_unchecked(amps: &mut [Complex64], gate: &Gate) {
    match *gate {
        Gate::Hadamard { target } => {
            let bit = 1usize << target;
            let step = bit << 1;
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            let mut base = 0;
            while base < amps.len() {
                for low in base..base + bit {
                    let hi = low + bit;
                    let x = amps[low];
                    let y = amps[hi];
                    amps[low] = (x + y) * inv_sqrt2;
                    amps[hi] = (x - y) * inv_sqrt2;
                }
                base += step;
            }
        }
        Gate::SinglePhase { target, angle } => {
            let bit = 1usize << target;
            let step = bit << 1;
            let phase = Complex64::cis(angle);
            let mut base = 0;
            while base < amps.len() {
                for a in &mut amps[base + bit..base + step] {
                    *a *= phase;
                }
                base += step;
            }
        }
        Gate::ControlledPhase {
            control,
            target,
            angle,
        } => {
            let mask = (1usize << control) | (1usize << target);
            let phase = Complex64::cis(angle);
            // Iterate only over indices with both bits set by inserting
            // 1-bits into a compressed counter.
            let lo = control.min(target);
            let hi = control.max(target);
            let count = amps.len() >> 2;
            for c in 0..count {
                let with_lo = insert_one_bit(c, lo);
                let idx = insert_one_bit(with_lo, hi);
                debug_assert_eq!(idx & mask, mask);
                amps[idx] *= phase;
            }
        }
    }
}

#[inline]
fn insert_one_bit(x: usize, pos: u32) -> usize {
    let low = x & ((1usize << pos) - 1);
    ((x >> pos) << (pos + 1)) | (1usize << pos) | low
}

/// Emits the swap-free Fourier ladder. Applied to a momentum state it
/// produces the angle amplitudes `(1/√dim) Σ_m ψ(m) e^{+2πi m j / dim}`
/// at bit-reversed index positions.
fn fourier_ladder(n_qubits: u32) -> Vec<Gate> {
    let mut gates = Vec::new();
    for a in (0..n_qubits).rev() {
        gates.push(Gate::Hadamard { target: a });
        for b in (0..a).rev() {
            gates.push(Gate::ControlledPhase {
                control: b,
                target: a,
                angle: std::f64::consts::PI / (1u64 << (a - b)) as f64,
            });
        }
    }
    gates
}

/// Conjugate of [`fourier_ladder`] in mirror order; consumes the
/// bit-reversed angle register back into natural momentum order.
fn fourier_ladder_inverse(n_qubits: u32) -> Vec<Gate> {
    let mut gates = fourier_ladder(n_qubits);
    gates.reverse();
    for g in &mut gates {
        if let Gate::ControlledPhase { angle, .. } = g {
            *angle = -*angle;
        }
    }
    gates
}

/// Decomposes the diagonal phase `exp(i c (x - dim/2)²)` over the binary
/// expansion of the index `x`. `qubit_of` maps the logical bit position
/// of `x` to the physical qubit carrying it (identity in natural order,
/// `n-1-a` in the bit-reversed register left by the Fourier ladder).
/// Returns the constant term `c dim²/4` for the caller's global phase.
fn quadratic_diagonal(
    n_qubits: u32,
    coefficient: f64,
    qubit_of: impl Fn(u32) -> u32,
    gates: &mut Vec<Gate>,
) -> f64 {
    let dim = (1u64 << n_qubits) as f64;
    // Pairs first, lexicographic (a < b ascending), then singles.
    for a in 0..n_qubits {
        for b in (a + 1)..n_qubits {
            let weight = (1u64 << (a + b + 1)) as f64;
            gates.push(Gate::ControlledPhase {
                control: qubit_of(a),
                target: qubit_of(b),
                angle: coefficient * weight,
            });
        }
    }
    for a in 0..n_qubits {
        let quad = (1u64 << (2 * a)) as f64;
        let lin = dim * (1u64 << a) as f64;
        gates.push(Gate::SinglePhase {
            target: qubit_of(a),
            angle: coefficient * (quad - lin),
        });
    }
    coefficient * dim * dim / 4.0
}

/// Builds the gate decomposition of one Floquet period.
pub fn build_floquet_circuit(params: &MapParams) -> Circuit {
    let n = params.n_qubits;
    let dim = params.dim as f64;
    let mut gates = Vec::with_capacity(Circuit::expected_gate_count(n));
    let mut global_phase = 0.0;

    gates.extend(fourier_ladder(n));

    // Kick phase on the angle index j, which sits bit-reversed after the
    // ladder: logical bit a of j lives on qubit n-1-a.
    let kick_coeff = params.kick / 2.0 * (std::f64::consts::TAU / dim).powi(2);
    global_phase += quadratic_diagonal(n, kick_coeff, |a| n - 1 - a, &mut gates);

    gates.extend(fourier_ladder_inverse(n));

    // Free rotation on the momentum index, natural order.
    let free_coeff = -params.period / 2.0;
    global_phase += quadratic_diagonal(n, free_coeff, |a| a, &mut gates);

    debug_assert_eq!(gates.len(), Circuit::expected_gate_count(n));
    Circuit {
        params: params.clone(),
        gates,
        global_phase: global_phase.rem_euclid(std::f64::consts::TAU),
    }
}
