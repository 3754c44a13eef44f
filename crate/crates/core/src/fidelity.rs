//! Paired exact/noisy evolution and the fidelity time series.
//!
//! The fidelity is the squared overlap of the exactly evolved state with
//! the state evolved by the noisy gate sequence, sampled once per map
//! period. It starts at one, decays to a saturation plateau, and
//! oscillates around it after a transient time `t*`; the fractal analysis
//! applies to the post-`t*` segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::build_floquet_circuit;
use crate::map::SawtoothMap;
use crate::noise::{ImperfectionConfig, NoisyEngine};
use crate::params::MapParams;
use crate::state::{gaussian_packet, GaussianPacketSpec, StateVector};

/// Initial condition of a fidelity run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Gaussian(GaussianPacketSpec),
    /// Momentum eigenstate `|n⟩`.
    Basis { momentum: i64 },
}

impl InitialState {
    pub fn build(&self, params: &MapParams) -> Result<StateVector> {
        match self {
            InitialState::Gaussian(spec) => gaussian_packet(params, spec),
            InitialState::Basis { momentum } => StateVector::basis_momentum(params, *momentum),
        }
    }
}

/// Fidelity `F(t)` for `t = 0..=t_max`, one sample per Floquet period.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelitySeries {
    pub params: MapParams,
    pub config: ImperfectionConfig,
    pub initial: InitialState,
    pub values: Vec<f64>,
    /// Detected transient cutoff, if [`detect_transient`] has been run
    /// or an override was supplied.
    pub t_star: Option<usize>,
}

impl FidelitySeries {
    /// Number of recorded steps (series length minus the t=0 sample).
    pub fn t_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Post-transient segment used by the fractal analysis.
    pub fn saturated_segment(&self, t_star: usize) -> &[f64] {
        &self.values[t_star.min(self.values.len() - 1)..]
    }

    /// Successive differences `ΔF(t) = F(t+1) - F(t)` of a segment.
    pub fn fluctuations(&self, from: usize) -> Vec<f64> {
        self.values[from.min(self.values.len() - 1)..]
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect()
    }
}

/// Runs the paired evolutions and records the fidelity at every step.
///
/// `F(0) = 1` by construction (both evolutions start from the identical
/// state); `F(t)` for `t >= 1` is the squared overlap after `t` periods.
pub fn compute_fidelity_series(
    params: &MapParams,
    config: &ImperfectionConfig,
    initial: &InitialState,
    t_max: usize,
) -> Result<FidelitySeries> {
    if t_max < 1 {
        return Err(Error::InvalidParams("t_max must be >= 1".into()));
    }
    let mut exact = initial.build(params)?;
    let mut noisy = exact.clone();
    let mut map = SawtoothMap::new(params.clone());
    let circuit = build_floquet_circuit(params);
    let engine = NoisyEngine::new(&circuit, config)?;

    let mut values = Vec::with_capacity(t_max + 1);
    values.push(1.0);
    for _ in 1..=t_max {
        map.step(&mut exact);
        engine.step(&mut noisy);
        values.push(noisy.fidelity_with(&exact));
    }
    Ok(FidelitySeries {
        params: params.clone(),
        config: config.clone(),
        initial: initial.clone(),
        values,
        t_star: None,
    })
}

/// Confirmation window: the series must stay inside the saturation band
/// this many consecutive steps before `t*` is declared.
const CONFIRMATION_STEPS: usize = 100;

/// Absolute floor on the band half-width so that numerically constant
/// series (ε = 0) saturate at t = 0.
const BAND_FLOOR: f64 = 1e-12;

/// Finds the transient cutoff `t*`: the first step at which the series
/// enters, and stays inside for [`CONFIRMATION_STEPS`], the band
/// `mean ± 2σ` of the final half of the series.
pub fn detect_transient(values: &[f64]) -> Result<usize> {
    if values.len() < 100 {
        return Err(Error::InvalidParams(format!(
            "transient detection needs at least 100 samples, got {}",
            values.len()
        )));
    }
    let tail = &values[values.len() / 2..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tail.len() as f64;
    let half_width = (2.0 * var.sqrt()).max(BAND_FLOOR);
    let (lo, hi) = (mean - half_width, mean + half_width);

    let mut run_start: Option<usize> = None;
    for (t, &v) in values.iter().enumerate() {
        if v >= lo && v <= hi {
            let start = *run_start.get_or_insert(t);
            if t - start + 1 >= CONFIRMATION_STEPS {
                return Ok(start);
            }
        } else {
            run_start = None;
        }
    }
    // Trailing in-band runs shorter than the confirmation window do not
    // qualify.
    Err(Error::NoSaturation)
}

/// Histogram of fidelity fluctuations `ΔF` over fixed-width bins.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
}

/// Bins the values into `bins` equal-width bins spanning `range`
/// (defaults to the data range).
pub fn histogram(values: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins == 0 || values.is_empty() {
        return Err(Error::InvalidParams(
            "histogram needs at least one bin and one value".into(),
        ));
    }
    let (mut lo, mut hi) = range.unwrap_or_else(|| {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    });
    let span = hi - lo;
    if !span.is_finite() || span <= 0.0 {
        // Degenerate data range: a single bin catches everything.
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    let probabilities = counts.iter().map(|c| *c as f64 / total).collect();
    let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram {
        edges,
        counts,
        probabilities,
    })
}

/// Overlap coefficient of two histograms over identical bins:
/// `Σ min(p_i, q_i)`.
pub fn overlap_coefficient(a: &Histogram, b: &Histogram) -> f64 {
    a.probabilities
        .iter()
        .zip(&b.probabilities)
        .map(|(p, q)| p.min(*q))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::sample_imperfections;

    fn setup(n_q: u32, chaos: f64, eps: f64, seed: u64) -> (MapParams, ImperfectionConfig) {
        let params = MapParams::new(n_q, chaos).unwrap();
        let config = sample_imperfections(n_q, eps, seed).unwrap();
        (params, config)
    }

    #[test]
    fn starts_at_one_and_stays_bounded() {
        let (params, config) = setup(4, 2.0_f64.sqrt(), 0.05, 3);
        let initial = InitialState::Basis { momentum: 0 };
        let series = compute_fidelity_series(&params, &config, &initial, 200).unwrap();
        assert_eq!(series.values[0], 1.0);
        for &f in &series.values {
            assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        }
    }

    #[test]
    fn zero_epsilon_keeps_fidelity_at_one() {
        let (params, config) = setup(5, -1.0, 0.0, 1);
        let initial = InitialState::Gaussian(GaussianPacketSpec::minimal(1.0, 2.0));
        let series = compute_fidelity_series(&params, &config, &initial, 300).unwrap();
        for &f in &series.values {
            assert!(f >= 1.0 - 1e-9);
        }
        assert_eq!(detect_transient(&series.values).unwrap(), 0);
    }

    #[test]
    fn echo_is_symmetric_under_tag_swap() {
        // |⟨a|b⟩|² = |⟨b|a⟩|², checked on the actual evolved pair.
        let (params, config) = setup(4, 2.0_f64.sqrt(), 0.08, 11);
        let initial = InitialState::Basis { momentum: 1 };
        let mut exact = initial.build(&params).unwrap();
        let mut noisy = exact.clone();
        let mut map = SawtoothMap::new(params.clone());
        let circuit = build_floquet_circuit(&params);
        let engine = NoisyEngine::new(&circuit, &config).unwrap();
        for _ in 0..50 {
            map.step(&mut exact);
            engine.step(&mut noisy);
        }
        let f_ab = noisy.fidelity_with(&exact);
        let f_ba = exact.fidelity_with(&noisy);
        assert!((f_ab - f_ba).abs() < 1e-15);
    }

    #[test]
    fn first_step_fidelity_drops_iff_noisy() {
        let (params, config) = setup(6, -1.0, 1e-3, 17);
        let initial = InitialState::Gaussian(GaussianPacketSpec::minimal(0.5, 0.0));
        let series = compute_fidelity_series(&params, &config, &initial, 1).unwrap();
        assert!(series.values[1] <= 1.0 + 1e-12);
        assert!(series.values[1] < 1.0 - 1e-9);

        let clean = sample_imperfections(6, 0.0, 17).unwrap();
        let series = compute_fidelity_series(&params, &clean, &initial, 1).unwrap();
        assert!((series.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        let (params, config) = setup(5, 2.0_f64.sqrt(), 1e-2, 77);
        let initial = InitialState::Gaussian(GaussianPacketSpec::minimal(2.2, -3.0));
        let a = compute_fidelity_series(&params, &config, &initial, 150).unwrap();
        let b = compute_fidelity_series(&params, &config, &initial, 150).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn constant_series_saturates_immediately() {
        let values = vec![0.42; 500];
        assert_eq!(detect_transient(&values).unwrap(), 0);
    }

    #[test]
    fn decaying_series_has_positive_transient() {
        // Smooth decay onto a noisy plateau around 0.2.
        let mut values: Vec<f64> = (0..400).map(|t| 0.2 + 0.8 * (-(t as f64) / 40.0).exp()).collect();
        values.extend((0..600).map(|t| 0.2 + 0.01 * ((t as f64) * 0.7).sin()));
        let t_star = detect_transient(&values).unwrap();
        assert!(t_star > 0, "t*={t_star}");
        assert!(t_star < 400, "t*={t_star}");
    }

    #[test]
    fn no_saturation_flagged_when_band_keeps_breaking() {
        // Excursions every 50 steps keep interrupting the in-band dwell,
        // so no 100-step confirmation window ever completes.
        let values: Vec<f64> = (0..1000)
            .map(|t| if t % 50 == 0 { 40.0 } else { (t as f64) * 1e-3 })
            .collect();
        match detect_transient(&values) {
            Err(Error::NoSaturation) => {}
            other => panic!("expected no-saturation flag, got {other:?}"),
        }
    }

    #[test]
    fn histogram_overlap_of_identical_data_is_one() {
        let vals: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
        let h = histogram(&vals, 32, None).unwrap();
        assert!((overlap_coefficient(&h, &h) - 1.0).abs() < 1e-12);
        assert_eq!(h.counts.iter().sum::<u64>(), 1000);
    }
}
