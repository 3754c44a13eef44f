//! Static hardware imperfections and the noisy gate-level propagator.
//!
//! The error model is a time-independent detuning Hamiltonian
//! `Σ_i δ_i σ_i^z` acting for one unit of dwell time after every
//! elementary gate. The detunings are drawn once per run, uniformly from
//! `[-ε, ε]`, from a seeded ChaCha8 stream, so a run is reproducible from
//! its seed. The mean level spacing term is compensable by a frame
//! rotation and is kept at zero (recorded in the config so it can be
//! re-enabled).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{apply_gate_unchecked, Circuit, Gate};
use crate::state::{Representation, StateVector};

/// Random-number generator used for detuning draws, recorded in output
/// metadata.
pub const DETUNING_GENERATOR: &str = "chacha8(seed_from_u64)";

/// One realization of the static imperfections.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImperfectionConfig {
    /// Imperfection strength ε (half-width of the detuning interval).
    pub epsilon: f64,
    /// Seed the detunings were drawn from.
    pub seed: u64,
    /// Per-qubit detunings δ_i, constant for the entire run.
    pub detunings: Vec<f64>,
    /// Mean qubit level spacing; fixed to zero (frame-compensable).
    pub mean_level_spacing: f64,
    /// Generator algorithm used for the draw.
    pub generator: String,
}

impl ImperfectionConfig {
    pub fn n_qubits(&self) -> u32 {
        self.detunings.len() as u32
    }
}

/// Draws `n_qubits` detunings i.i.d. uniform on `[-ε, ε]`.
pub fn sample_imperfections(n_qubits: u32, epsilon: f64, seed: u64) -> Result<ImperfectionConfig> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidParams(format!(
            "imperfection strength must be finite and >= 0, got {epsilon}"
        )));
    }
    let detunings = if epsilon == 0.0 {
        vec![0.0; n_qubits as usize]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n_qubits)
            .map(|_| rng.random_range(-epsilon..=epsilon))
            .collect()
    };
    Ok(ImperfectionConfig {
        epsilon,
        seed,
        detunings,
        mean_level_spacing: 0.0,
        generator: DETUNING_GENERATOR.to_string(),
    })
}

/// Stable sub-seed derivation (splitmix64 over master and stream index).
/// Used for realization and cell seeds so parallel fan-out never changes
/// results.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add((stream.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Accumulated detuning phase of basis state `m`:
/// `Σ_i δ_i s_i(m)` with `s_i = +1` for bit i clear, `-1` for bit i set.
fn detuning_phase(config: &ImperfectionConfig, m: usize) -> f64 {
    config
        .detunings
        .iter()
        .enumerate()
        .map(|(i, d)| if m & (1 << i) == 0 { *d } else { -*d })
        .sum()
}

/// Diagonal unitary `exp(-i Σ_i δ_i σ_i^z)` for one unit of dwell time,
/// precomputed as `2^n_qubits` phases.
pub fn error_unitary(config: &ImperfectionConfig) -> Vec<Complex64> {
    let dim = 1usize << config.n_qubits();
    (0..dim)
        .map(|m| Complex64::cis(-detuning_phase(config, m)))
        .collect()
}

/// Segments of the circuit with the per-gate error dwell folded in.
enum Pass {
    /// A Hadamard followed by one error application.
    Hadamard { target: u32 },
    /// A maximal run of diagonal gates and their error applications,
    /// fused into a single table: `Π gates × exp(-i g Σ δ_i s_i)` with
    /// `g` the number of gates in the run.
    FusedDiagonal { table: Vec<Complex64> },
}

/// Gate-level propagator for one Floquet period under a fixed
/// imperfection realization.
///
/// Faithful to one error application per elementary gate: diagonal gates
/// commute with the (diagonal) error unitary, so each maximal diagonal
/// run is applied as one precomputed table carrying the error raised to
/// the run length. Hadamards do not commute with the error and keep
/// their individual dwell.
pub struct NoisyEngine {
    circuit_gate_count: usize,
    global_phase: Complex64,
    passes: Vec<Pass>,
    /// One unit of error dwell, applied after each Hadamard.
    error_phases: Vec<Complex64>,
    dim: usize,
}

impl NoisyEngine {
    pub fn new(circuit: &Circuit, config: &ImperfectionConfig) -> Result<Self> {
        if config.n_qubits() != circuit.params().n_qubits {
            return Err(Error::InvalidParams(format!(
                "imperfection config has {} qubits, circuit needs {}",
                config.n_qubits(),
                circuit.params().n_qubits
            )));
        }
        let dim = circuit.params().dim;
        let phases: Vec<f64> = (0..dim).map(|m| detuning_phase(config, m)).collect();

        let mut passes = Vec::new();
        let mut pending: Vec<&Gate> = Vec::new();
        let flush = |pending: &mut Vec<&Gate>, passes: &mut Vec<Pass>| {
            if pending.is_empty() {
                return;
            }
            let dwell = pending.len() as f64;
            let mut table = vec![Complex64::ONE; dim];
            for gate in pending.iter() {
                apply_gate_unchecked(&mut table, gate);
            }
            for (m, t) in table.iter_mut().enumerate() {
                *t *= Complex64::cis(-dwell * phases[m]);
            }
            passes.push(Pass::FusedDiagonal { table });
            pending.clear();
        };
        for gate in circuit.gates() {
            if gate.is_diagonal() {
                pending.push(gate);
            } else {
                flush(&mut pending, &mut passes);
                match *gate {
                    Gate::Hadamard { target } => passes.push(Pass::Hadamard { target }),
                    _ => unreachable!("non-diagonal gates are Hadamards"),
                }
            }
        }
        flush(&mut pending, &mut passes);

        // Error dwell for the Hadamard passes, one unit each.
        let error_phases: Vec<Complex64> = phases.iter().map(|p| Complex64::cis(-p)).collect();
        Ok(NoisyEngine {
            circuit_gate_count: circuit.gate_count(),
            global_phase: Complex64::cis(circuit.global_phase()),
            passes,
            error_phases,
            dim,
        })
    }

    pub fn gate_count(&self) -> usize {
        self.circuit_gate_count
    }

    /// One noisy Floquet period: every elementary gate followed by one
    /// error application, then the circuit's recorded global phase.
    pub fn step(&self, state: &mut StateVector) {
        assert_eq!(state.repr(), Representation::Momentum);
        assert_eq!(state.dim(), self.dim);
        let amps = state.amps_mut();
        for pass in &self.passes {
            match pass {
                Pass::Hadamard { target } => {
                    apply_gate_unchecked(amps, &Gate::Hadamard { target: *target });
                    for (a, e) in amps.iter_mut().zip(&self.error_phases) {
                        *a *= e;
                    }
                }
                Pass::FusedDiagonal { table } => {
                    for (a, t) in amps.iter_mut().zip(table) {
                        *a *= t;
                    }
                }
            }
        }
        for a in amps.iter_mut() {
            *a *= self.global_phase;
        }
    }

    pub fn evolve(&self, state: &mut StateVector, steps: usize) {
        for _ in 0..steps {
            self.step(state);
        }
    }
}
