//! Modified box-counting estimator for the fractal dimension of a
//! sampled signal, plus synthetic validation signals of known dimension.
//!
//! The index axis is partitioned into strips of width `L` samples; each
//! strip contributes a rectangle of height `Δ_i`, the signal excursion
//! over the strip, and `M(L) = Σ_i Δ_i / L`. Over a scaling window
//! `L_min < L < L_max` the count follows `M ∝ L^{-D}` and `D` is minus
//! the slope of the log-log fit: 1 for a smooth curve, 2 for a periodic
//! curve observed far beyond its period, fractional in between.
//!
//! A strip of width `L` spans samples `[iL, iL + L]` inclusive, so
//! adjacent strips share endpoints and a straight line of slope `s`
//! yields `Δ_i = sL` exactly. Before counting, the signal is rescaled by
//! one global factor mapping its full excursion onto its duration, which
//! makes strip width and strip height commensurate; the factor shifts
//! `log M` by a constant and leaves the fitted slope untouched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest strip width as a fraction of the signal: `len / LADDER_CAP_DIV`.
const LADDER_CAP_DIV: usize = 4;
/// Auto-selected windows never extend past `len / WINDOW_CAP_DIV`.
const WINDOW_CAP_DIV: usize = 8;
/// Hard floor on the saturation cut: slopes at or below this count as
/// the finite-length -2 regime no matter where the plateau sits.
const SATURATION_SLOPE: f64 = -1.8;
/// A local slope this far below the small-L plateau marks the onset of
/// the bend toward the finite-length limit.
const PLATEAU_DEPARTURE: f64 = 0.3;
/// Number of leading local slopes used to estimate the plateau.
const PLATEAU_PROBE: usize = 4;
/// Minimum ladder points required inside a fit window.
const MIN_FIT_POINTS: usize = 4;
/// Fits with `r² < 0.9` are flagged unreliable.
const RELIABLE_R2: f64 = 0.9;

/// Diagnostics attached to a dimension estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    /// `r²` of the log-log fit below 0.9.
    UnreliableFit,
    /// Fitted dimension fell outside the plausible planar bracket
    /// `[0.9, 2.1]`.
    OutOfBracket,
}

/// Straight-line fit on `(log L, log M)` restricted to a window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxFit {
    pub dimension: f64,
    pub std_error: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub flags: Vec<FitFlag>,
}

/// Full result of a box-counting dimension estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxCountResult {
    /// Strip widths, in samples.
    pub strip_widths: Vec<usize>,
    /// `M(L)` for each strip width.
    pub counts: Vec<f64>,
    /// Fit window `(L_min, L_max)` actually used.
    pub fit_window: (f64, f64),
    pub dimension: f64,
    pub std_error: f64,
    pub r_squared: f64,
    /// Spread of the dimension across ±1 ladder-step perturbations of
    /// the window.
    pub sensitivity: (f64, f64),
    pub flags: Vec<FitFlag>,
}

/// How to choose the fit window.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum WindowSpec {
    /// Detect the scaling region: `L_min = 1`, `L_max` at the onset of
    /// the finite-length saturation.
    Auto,
    /// Explicit `(L_min, L_max)` bounds, inclusive.
    Explicit(f64, f64),
}

/// Modified box count: `(L, M(L))` for every ladder entry.
///
/// The final incomplete strip is dropped rather than padded. Signals
/// shorter than four times the largest requested strip are rejected.
pub fn modified_box_count(signal: &[f64], ladder: &[usize]) -> Result<Vec<(usize, f64)>> {
    if ladder.is_empty() {
        return Err(Error::EmptyLadder);
    }
    if ladder.contains(&0) {
        return Err(Error::InvalidParams("strip widths must be >= 1".into()));
    }
    let max_l = *ladder.iter().max().unwrap();
    if signal.len() < 4 * max_l {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            max_l,
            need: 4 * max_l,
        });
    }
    let scale = commensuration_scale(signal);
    let mut table = Vec::with_capacity(ladder.len());
    for &l in ladder {
        let mut total = 0.0;
        let mut start = 0;
        // Strips [start, start + l] inclusive; drop the incomplete tail.
        while start + l < signal.len() {
            let window = &signal[start..=start + l];
            let mut lo = window[0];
            let mut hi = window[0];
            for &v in &window[1..] {
                if v < lo {
                    lo = v;
                }
                if v > hi {
                    hi = v;
                }
            }
            total += (hi - lo) * scale;
            start += l;
        }
        table.push((l, total / l as f64));
    }
    Ok(table)
}

/// Excursions below this fraction of the data magnitude are rounding
/// noise of the double-precision pipeline, not signal.
const FLAT_EXCURSION: f64 = 1e-12;

/// Global factor mapping the signal's full excursion onto its duration
/// in samples. Signals whose excursion sits at rounding-noise level
/// count as flat and get scale 0, making every count zero; such tables
/// are flagged degenerate downstream.
fn commensuration_scale(signal: &[f64]) -> f64 {
    let lo = signal.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = signal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let excursion = hi - lo;
    let floor = FLAT_EXCURSION * hi.abs().max(lo.abs()).max(1.0);
    if excursion > floor {
        signal.len() as f64 / excursion
    } else {
        0.0
    }
}

/// Least-squares line on `(log L, log M)` inside the window; the
/// dimension is minus the slope. Rows with nonpositive counts are
/// skipped. Fewer than four usable in-window points is an error;
/// poor fits are returned flagged, not rejected.
pub fn fit_dimension(table: &[(f64, f64)], window: (f64, f64)) -> Result<BoxFit> {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|(l, m)| *l >= window.0 && *l <= window.1 && *m > 0.0 && *l > 0.0)
        .map(|(l, m)| (l.ln(), m.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientFitPoints);
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientFitPoints);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    let std_error = if pts.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let dimension = -slope;
    let mut flags = Vec::new();
    if r_squared < RELIABLE_R2 {
        flags.push(FitFlag::UnreliableFit);
    }
    if !(0.9..=2.1).contains(&dimension) {
        flags.push(FitFlag::OutOfBracket);
    }
    Ok(BoxFit {
        dimension,
        std_error,
        r_squared,
        points_used: pts.len(),
        flags,
    })
}

/// Selects the scaling window for a fidelity-style series.
///
/// `L_min` is one map period (one sample). `L_max` is the smaller of
/// `series_len / 8` and the largest strip width before the local slope
/// leaves the small-L scaling plateau and saturates toward the
/// finite-length limit -2; the departure is confirmed on two consecutive
/// local slopes (three consecutive ladder points). The cut sits
/// [`PLATEAU_DEPARTURE`] below the plateau median, with a hard floor at
/// [`SATURATION_SLOPE`] in case the plateau estimate is itself
/// corrupted. Windows with `L_max <= 4 L_min` are degenerate: the
/// series has no scaling region (for instance a flat ε = 0 series).
pub fn auto_fit_window(table: &[(f64, f64)], series_len: usize) -> Result<(f64, f64)> {
    let usable: Vec<(f64, f64)> = table
        .iter()
        .filter(|(l, m)| *l > 0.0 && *m > 0.0)
        .map(|&(l, m)| (l, m))
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateWindow);
    }
    let cap = (series_len / WINDOW_CAP_DIV) as f64;
    let slopes: Vec<f64> = usable
        .windows(2)
        .map(|w| (w[1].1.ln() - w[0].1.ln()) / (w[1].0.ln() - w[0].0.ln()))
        .collect();
    let mut probe: Vec<f64> = slopes.iter().take(PLATEAU_PROBE).cloned().collect();
    probe.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let plateau = probe[probe.len() / 2];
    let cut = (plateau - PLATEAU_DEPARTURE).max(SATURATION_SLOPE);
    let mut l_max = cap;
    for i in 0..slopes.len().saturating_sub(1) {
        if slopes[i] <= cut && slopes[i + 1] <= cut {
            l_max = l_max.min(usable[i].0);
            break;
        }
    }
    let l_min = 1.0;
    if l_max <= 4.0 * l_min {
        return Err(Error::DegenerateWindow);
    }
    Ok((l_min, l_max))
}

/// Geometric ladder of strip widths: powers of two up to `len / 4`,
/// optionally densified with `×1.5` midpoints.
pub fn strip_ladder(len: usize, densify: bool) -> Vec<usize> {
    let cap = (len / LADDER_CAP_DIV).max(1);
    let mut ladder = Vec::new();
    let mut l = 1usize;
    while l <= cap {
        ladder.push(l);
        if densify {
            let mid = l + l / 2;
            if mid > l && mid < l * 2 && mid <= cap {
                ladder.push(mid);
            }
        }
        l *= 2;
    }
    ladder
}

/// End-to-end dimension estimate of a sampled signal: ladder, count,
/// window, fit, and the window-sensitivity band.
///
/// With [`WindowSpec::Auto`], a power-of-two ladder is used first; if it
/// leaves fewer than 8 points inside the selected window the ladder is
/// densified with ×1.5 midpoints and the count rerun.
pub fn estimate_dimension(signal: &[f64], window: WindowSpec) -> Result<BoxCountResult> {
    let mut densify = false;
    loop {
        let ladder = strip_ladder(signal.len(), densify);
        let table = modified_box_count(signal, &ladder)?;
        let table_f: Vec<(f64, f64)> = table.iter().map(|&(l, m)| (l as f64, m)).collect();
        let win = match window {
            WindowSpec::Auto => auto_fit_window(&table_f, signal.len())?,
            WindowSpec::Explicit(lo, hi) => {
                if hi <= lo {
                    return Err(Error::InvalidParams(format!(
                        "empty fit window [{lo}, {hi}]"
                    )));
                }
                (lo, hi)
            }
        };
        let in_window = table_f
            .iter()
            .filter(|(l, m)| *l >= win.0 && *l <= win.1 && *m > 0.0)
            .count();
        if in_window < 8 && !densify {
            densify = true;
            continue;
        }
        let fit = fit_dimension(&table_f, win)?;
        let sensitivity = window_sensitivity(&table_f, win, fit.dimension);
        return Ok(BoxCountResult {
            strip_widths: table.iter().map(|&(l, _)| l).collect(),
            counts: table.iter().map(|&(_, m)| m).collect(),
            fit_window: win,
            dimension: fit.dimension,
            std_error: fit.std_error,
            r_squared: fit.r_squared,
            sensitivity,
            flags: fit.flags,
        });
    }
}

/// Dimension spread across windows perturbed by one ladder step on
/// either edge, reflecting the estimate's sensitivity to the window
/// choice.
fn window_sensitivity(table: &[(f64, f64)], window: (f64, f64), center: f64) -> (f64, f64) {
    let ls: Vec<f64> = table
        .iter()
        .filter(|(l, m)| *l > 0.0 && *m > 0.0)
        .map(|(l, _)| *l)
        .collect();
    let inside: Vec<f64> = ls
        .iter()
        .cloned()
        .filter(|l| *l >= window.0 && *l <= window.1)
        .collect();
    let mut lo = center;
    let mut hi = center;
    if inside.len() >= 2 {
        let first = inside[0];
        let last = *inside.last().unwrap();
        let next_in_lo = inside.get(1).cloned().unwrap_or(first);
        let prev_in_hi = inside[inside.len().saturating_sub(2)];
        let below = ls.iter().cloned().filter(|l| *l < first).fold(f64::NAN, f64::max);
        let above = ls.iter().cloned().filter(|l| *l > last).fold(f64::NAN, f64::min);
        let mut candidates = vec![(next_in_lo, window.1), (window.0, prev_in_hi)];
        if below.is_finite() {
            candidates.push((below, window.1));
        }
        if above.is_finite() {
            candidates.push((window.0, above));
        }
        for win in candidates {
            if let Ok(fit) = fit_dimension(table, win) {
                lo = lo.min(fit.dimension);
                hi = hi.max(fit.dimension);
            }
        }
    }
    (lo, hi)
}

/// Subtracts a fitted exponential trend `exp(a + b t)` from a decaying
/// segment, for analyses of the pre-saturation fidelity. Returns the
/// residual signal.
pub fn detrend_exponential(signal: &[f64]) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = signal
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (t as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return signal.to_vec();
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return signal.to_vec();
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    signal
        .iter()
        .enumerate()
        .map(|(t, v)| v - (intercept + slope * t as f64).exp())
        .collect()
}

/// Synthetic signal families with known box dimension.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    /// `s · i` over the sample index: dimension 1.
    Line { slope: f64 },
    /// `sin(2π i / period)`: dimension 2 once strips exceed the period.
    Sinusoid { period: f64 },
    /// Weierstrass graph `Σ aⁿ cos(bⁿ π t)` over `t ∈ [0, t_span]`:
    /// dimension `2 + ln a / ln b`.
    Weierstrass { a: f64, b: f64, t_span: f64 },
}

impl SynthKind {
    /// Analytic box dimension of the family, where defined.
    pub fn analytic_dimension(&self) -> Option<f64> {
        match self {
            SynthKind::Line { .. } => Some(1.0),
            SynthKind::Sinusoid { .. } => Some(2.0),
            SynthKind::Weierstrass { a, b, .. } => Some(2.0 + a.ln() / b.ln()),
        }
    }
}

/// Series coefficients below this threshold are dropped from the
/// Weierstrass sum.
const WEIERSTRASS_CUTOFF: f64 = 1e-12;

/// Deterministic synthetic signal generator; `length >= 1024`.
pub fn synth_signal(kind: SynthKind, length: usize) -> Result<Vec<f64>> {
    if length < 1024 {
        return Err(Error::InvalidParams(format!(
            "synthetic signals need length >= 1024, got {length}"
        )));
    }
    match kind {
        SynthKind::Line { slope } => Ok((0..length).map(|i| slope * i as f64).collect()),
        SynthKind::Sinusoid { period } => {
            if !period.is_finite() || period <= 0.0 {
                return Err(Error::InvalidParams("period must be positive".into()));
            }
            Ok((0..length)
                .map(|i| (std::f64::consts::TAU * i as f64 / period).sin())
                .collect())
        }
        SynthKind::Weierstrass { a, b, t_span } => {
            if !a.is_finite() || a <= 0.0 || a >= 1.0 || !b.is_finite() || b <= 1.0 {
                return Err(Error::InvalidParams(format!(
                    "weierstrass needs 0 < a < 1 and b > 1, got a={a}, b={b}"
                )));
            }
            if !t_span.is_finite() || t_span <= 0.0 {
                return Err(Error::InvalidParams("t_span must be positive".into()));
            }
            let n_terms = (WEIERSTRASS_CUTOFF.ln() / a.ln()).ceil() as usize;
            let dt = t_span / length as f64;
            Ok((0..length)
                .map(|i| {
                    let t = i as f64 * dt;
                    (0..n_terms)
                        .map(|n| a.powi(n as i32) * (b.powi(n as i32) * std::f64::consts::PI * t).cos())
                        .sum()
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_counts_follow_exact_power_law() {
        // Δ_i = sL in every strip, so M(L) = s_scaled · duration / L.
        // Length 4097 makes every power-of-two ladder entry divide the
        // duration, so no incomplete strip is dropped.
        let signal = synth_signal(SynthKind::Line { slope: 0.5 }, 4097).unwrap();
        let ladder = vec![1usize, 2, 4, 8, 16, 32];
        let table = modified_box_count(&signal, &ladder).unwrap();
        let products: Vec<f64> = table.iter().map(|&(l, m)| m * l as f64).collect();
        for p in &products {
            assert!((p - products[0]).abs() / products[0] < 1e-9);
        }
        let table_f: Vec<(f64, f64)> = table.iter().map(|&(l, m)| (l as f64, m)).collect();
        let fit = fit_dimension(&table_f, (1.0, 32.0)).unwrap();
        assert!((fit.dimension - 1.0).abs() < 1e-9);
        assert!(fit.flags.is_empty());
    }

    #[test]
    fn exact_power_law_recovers_exponent() {
        let table: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let l = (1u64 << i) as f64;
                (l, 300.0 * l.powf(-1.5))
            })
            .collect();
        let fit = fit_dimension(&table, (1.0, 4096.0)).unwrap();
        assert!((fit.dimension - 1.5).abs() < 1e-6);
        assert!(fit.std_error < 1e-6);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn sinusoid_far_beyond_period_fills_area() {
        let signal = synth_signal(SynthKind::Sinusoid { period: 16.0 }, 32_769).unwrap();
        let result = estimate_dimension(&signal, WindowSpec::Explicit(64.0, 4096.0)).unwrap();
        assert!(
            (1.9..=2.05).contains(&result.dimension),
            "D={}",
            result.dimension
        );
    }

    #[test]
    fn weierstrass_matches_analytic_dimension() {
        let kind = SynthKind::Weierstrass {
            a: 0.5,
            b: 3.0,
            t_span: 8.0,
        };
        let signal = synth_signal(kind, 32_768).unwrap();
        let result = estimate_dimension(&signal, WindowSpec::Explicit(4.0, 4096.0)).unwrap();
        let analytic = kind.analytic_dimension().unwrap();
        assert!(
            (result.dimension - analytic).abs() <= 0.1,
            "D={} analytic={}",
            result.dimension,
            analytic
        );
    }

    #[test]
    fn affine_changes_leave_dimension_unchanged() {
        let kind = SynthKind::Weierstrass {
            a: 0.5,
            b: 5.0,
            t_span: 8.0,
        };
        let signal = synth_signal(kind, 16_384).unwrap();
        let shifted: Vec<f64> = signal.iter().map(|v| 3.1 * v + 11.0).collect();
        let d0 = estimate_dimension(&signal, WindowSpec::Explicit(4.0, 2048.0)).unwrap();
        let d1 = estimate_dimension(&shifted, WindowSpec::Explicit(4.0, 2048.0)).unwrap();
        assert!((d0.dimension - d1.dimension).abs() < 1e-3);
    }

    #[test]
    fn flat_signal_has_degenerate_window() {
        let signal = vec![0.25; 4096];
        match estimate_dimension(&signal, WindowSpec::Auto) {
            Err(Error::DegenerateWindow) => {}
            other => panic!("expected degenerate window, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_power_law_keeps_full_ladder() {
        // Slopes never saturate toward -2, so the cap is the only bound.
        let table: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let l = (1u64 << i) as f64;
                (l, 1e6 * l.powf(-1.3))
            })
            .collect();
        let (lo, hi) = auto_fit_window(&table, (1usize << 20) * 8).unwrap();
        assert_eq!(lo, 1.0);
        assert!(hi >= (1u64 << 20) as f64);
    }

    #[test]
    fn auto_window_stops_at_saturation() {
        // Slope -1.2 for L <= 64, then -2 beyond: L_max should sit at the
        // start of the saturated run.
        let mut table = Vec::new();
        let mut m = 1e6;
        let mut l = 1.0;
        for i in 0..14 {
            table.push((l, m));
            let slope = if l >= 64.0 { -2.0 } else { -1.2 };
            m *= 2f64.powf(slope);
            l *= 2.0;
            let _ = i;
        }
        let (_, hi) = auto_fit_window(&table, 1 << 20).unwrap();
        assert_eq!(hi, 64.0);
    }

    #[test]
    fn ladder_respects_cap_and_densification() {
        let plain = strip_ladder(1024, false);
        assert_eq!(plain, vec![1, 2, 4, 8, 16, 32, 64, 128, 256]);
        let dense = strip_ladder(1024, true);
        assert!(dense.windows(2).all(|w| w[0] < w[1]));
        assert!(dense.contains(&3) && dense.contains(&6) && dense.contains(&192));
    }

    #[test]
    fn box_count_input_validation() {
        let signal = vec![1.0; 64];
        assert!(matches!(
            modified_box_count(&signal, &[]),
            Err(Error::EmptyLadder)
        ));
        assert!(matches!(
            modified_box_count(&signal, &[32]),
            Err(Error::SignalTooShort { .. })
        ));
        assert!(modified_box_count(&signal, &[16]).is_ok());
    }

    #[test]
    fn synth_validation() {
        assert!(synth_signal(SynthKind::Line { slope: 1.0 }, 100).is_err());
        assert!(synth_signal(
            SynthKind::Weierstrass {
                a: 1.5,
                b: 3.0,
                t_span: 1.0
            },
            2048
        )
        .is_err());
        assert!(synth_signal(
            SynthKind::Weierstrass {
                a: 0.5,
                b: 0.9,
                t_span: 1.0
            },
            2048
        )
        .is_err());
        let line = synth_signal(SynthKind::Line { slope: 1.0 }, 1024).unwrap();
        assert_eq!(line[0], 0.0);
        assert_eq!(line[3], 3.0);
        // quarter period: sin(π/2) = 1
        let sine = synth_signal(SynthKind::Sinusoid { period: 8.0 }, 1024).unwrap();
        assert!((sine[0]).abs() < 1e-12);
        assert!((sine[2] - 1.0).abs() < 1e-12);
    }
}
