//! Simulation and signal-analysis toolkit for the quantum sawtooth map.
//!
//! The crate evolves the quantum sawtooth map two ways: exactly, with
//! FFT-based split-step propagation ([`map`]), and through its explicit
//! quantum-gate decomposition corrupted by static hardware imperfections
//! ([`gates`], [`noise`]). The squared overlap between the two evolutions
//! is the fidelity of the simulation ([`fidelity`]); the fractal dimension
//! of its time fluctuations, measured with a modified box-counting
//! estimator ([`fractal`]), discriminates integrable from chaotic
//! dynamics and drives a phase-space tomography scan ([`phase_space`]).
//!
//! All computations are deterministic for a fixed seed: imperfection
//! detunings come from a seeded ChaCha stream, and every experiment is
//! reproducible from the metadata sidecar written next to its output.

pub mod error;
pub mod fidelity;
pub mod fractal;
pub mod gates;
pub mod io;
pub mod map;
pub mod noise;
pub mod params;
pub mod phase_space;
pub mod run;
pub mod state;

pub use error::Error;
pub use fidelity::{compute_fidelity_series, detect_transient, FidelitySeries, InitialState};
pub use fractal::{
    auto_fit_window, estimate_dimension, fit_dimension, modified_box_count, synth_signal,
    BoxCountResult, SynthKind, WindowSpec,
};
pub use gates::{apply_gate, build_floquet_circuit, Circuit, Gate};
pub use map::SawtoothMap;
pub use noise::{derive_seed, sample_imperfections, ImperfectionConfig, NoisyEngine};
pub use params::{MapParams, Regime};
pub use phase_space::{husimi, tomography_scan, HusimiGrid, SeedPolicy, TomographyGrid};
pub use state::{GaussianPacketSpec, Representation, StateVector};

/// Crate version as embedded in output metadata.
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}
