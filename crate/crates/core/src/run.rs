//! Experiment orchestration: serializable run configurations, the
//! per-subcommand pipelines, and deterministic parallel fan-out.
//!
//! Every pipeline writes its numeric outputs as CSV plus a JSON metadata
//! sidecar carrying the resolved configuration, the drawn detunings, the
//! gate count, fit windows, and the tool version — enough to re-derive
//! the file. Re-executing a persisted configuration reproduces the
//! numeric payloads byte for byte, independent of the worker count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fidelity::{
    compute_fidelity_series, detect_transient, histogram, InitialState,
};
use crate::fractal::{
    detrend_exponential, estimate_dimension, synth_signal, BoxCountResult, SynthKind, WindowSpec,
};
use crate::gates::{build_floquet_circuit, Circuit};
use crate::io;
use crate::map::SawtoothMap;
use crate::noise::{derive_seed, sample_imperfections};
use crate::params::{MapParams, Regime};
use crate::phase_space::{husimi, tomography_scan, SeedPolicy};
use crate::state::GaussianPacketSpec;

/// Default initial condition for fidelity experiments: a
/// minimal-uncertainty packet at `(θ = π/2, n = 0)`, safely away from
/// the sawtooth discontinuity at θ = 0.
pub fn default_initial() -> InitialState {
    InitialState::Gaussian(GaussianPacketSpec::minimal(std::f64::consts::FRAC_PI_2, 0.0))
}

fn default_t_max() -> usize {
    1 << 14
}

fn default_realizations() -> u32 {
    4
}

fn default_grid() -> usize {
    8
}

fn default_husimi_resolution() -> usize {
    64
}

fn default_synth_length() -> usize {
    32_768
}

/// One persisted, re-executable experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Fidelity(FidelityConfig),
    Fracdim(FracdimConfig),
    Sweep(SweepConfig),
    Tomography(TomographyConfig),
    Husimi(HusimiConfig),
    Synth(SynthConfig),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityConfig {
    pub n_qubits: u32,
    pub chaos: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
    /// Emit a ΔF histogram with this many bins.
    #[serde(default)]
    pub histogram_bins: Option<usize>,
    /// Dump the gate list of the Floquet circuit alongside the series.
    #[serde(default)]
    pub dump_circuit: bool,
}

/// Where the fracdim signal comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FracdimSource {
    /// Compute a fidelity series first.
    Fidelity(FidelityConfig),
    /// Analyze a third-party signal from CSV (values in the last column).
    File { path: PathBuf },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FracdimConfig {
    pub source: FracdimSource,
    /// Override the detected transient cutoff.
    #[serde(default)]
    pub t_star: Option<usize>,
    /// Explicit fit window `(L_min, L_max)`; default auto-detects.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    /// Subtract a fitted exponential trend before counting.
    #[serde(default)]
    pub detrend: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_qubits_list: Vec<u32>,
    pub chaos_list: Vec<f64>,
    pub epsilon_list: Vec<f64>,
    #[serde(default = "default_realizations")]
    pub realizations: u32,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TomographyConfig {
    pub n_qubits: u32,
    pub chaos: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_seed_policy")]
    pub seed_policy: SeedPolicy,
    /// Resolution of the Husimi grid emitted alongside the scan.
    #[serde(default = "default_husimi_resolution")]
    pub husimi_resolution: usize,
    /// Initial packet for the emitted Husimi distribution; defaults to
    /// the scan's own default packet.
    #[serde(default)]
    pub husimi_initial: Option<(f64, f64)>,
    /// Retain every cell's fidelity series in a `cells/` bundle
    /// directory.
    #[serde(default)]
    pub keep_series: bool,
}

fn default_seed_policy() -> SeedPolicy {
    SeedPolicy::Shared
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HusimiConfig {
    pub n_qubits: u32,
    pub chaos: f64,
    pub theta: f64,
    pub momentum: f64,
    #[serde(default)]
    pub momentum_width: Option<f64>,
    /// Exact evolution steps applied before projecting.
    #[serde(default)]
    pub steps: usize,
    #[serde(default = "default_husimi_resolution")]
    pub grid_theta: usize,
    #[serde(default = "default_husimi_resolution")]
    pub grid_momentum: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthConfig {
    pub kind: SynthKind,
    #[serde(default = "default_synth_length")]
    pub length: usize,
}

/// Files written by an execution, plus the summary the CLI prints.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

fn tool_meta() -> serde_json::Value {
    json!({ "name": "sawfid", "version": crate::version() })
}

/// Executes a configuration, writing outputs under `out_dir`. `workers`
/// bounds the rayon pool; `None` uses the global default. Outputs are
/// independent of the worker count.
pub fn execute(config: &RunConfig, out_dir: &Path, workers: Option<usize>) -> Result<RunOutput> {
    let body = || match config {
        RunConfig::Fidelity(c) => cmd_fidelity(c, out_dir),
        RunConfig::Fracdim(c) => cmd_fracdim(c, out_dir),
        RunConfig::Sweep(c) => cmd_sweep(c, out_dir),
        RunConfig::Tomography(c) => cmd_tomography(c, out_dir),
        RunConfig::Husimi(c) => cmd_husimi(c, out_dir),
        RunConfig::Synth(c) => cmd_synth(c, out_dir),
    };
    match workers {
        None => body(),
        Some(w) => {
            if w == 0 {
                return Err(Error::Config("worker count must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            pool.install(body)
        }
    }
}

struct SeriesRun {
    params: MapParams,
    series: crate::fidelity::FidelitySeries,
    gate_count: usize,
    t_star: Option<usize>,
    transient_detected: bool,
}

fn run_series(c: &FidelityConfig) -> Result<SeriesRun> {
    let params = MapParams::new(c.n_qubits, c.chaos)?;
    let config = sample_imperfections(c.n_qubits, c.epsilon, c.seed)?;
    let mut series = compute_fidelity_series(&params, &config, &c.initial, c.t_max)?;
    let (t_star, detected) = match detect_transient(&series.values) {
        Ok(t) => (Some(t), true),
        Err(_) => (None, false),
    };
    series.t_star = t_star;
    let gate_count = Circuit::expected_gate_count(c.n_qubits);
    Ok(SeriesRun {
        params,
        series,
        gate_count,
        t_star,
        transient_detected: detected,
    })
}

fn series_meta(c: &FidelityConfig, run: &SeriesRun) -> serde_json::Value {
    json!({
        "tool": tool_meta(),
        "run_config": RunConfig::Fidelity(c.clone()),
        "params": run.params,
        "imperfections": run.series.config,
        "gate_count": run.gate_count,
        "t_star": run.t_star,
        "transient_detected": run.transient_detected,
        "conventions": {
            "momentum_window": "n = m - dim/2",
            "fidelity_sampling": "one sample per map period",
        },
    })
}

fn cmd_fidelity(c: &FidelityConfig, out_dir: &Path) -> Result<RunOutput> {
    let run = run_series(c)?;
    let mut files = Vec::new();

    let series_path = out_dir.join("fidelity.csv");
    io::write_series_csv(&series_path, &run.series.values)?;
    files.push(series_path);

    if let Some(bins) = c.histogram_bins {
        let from = run.t_star.unwrap_or(0);
        let fluct = run.series.fluctuations(from);
        let hist = histogram(&fluct, bins, None)?;
        let rows: Vec<Vec<String>> = hist
            .counts
            .iter()
            .enumerate()
            .map(|(i, count)| {
                vec![
                    io::fmt_f64(hist.edges[i]),
                    io::fmt_f64(hist.edges[i + 1]),
                    count.to_string(),
                    io::fmt_f64(hist.probabilities[i]),
                ]
            })
            .collect();
        let hist_path = out_dir.join("fluctuation_histogram.csv");
        io::write_table_csv(&hist_path, "bin_left,bin_right,count,probability", &rows)?;
        files.push(hist_path);
    }

    if c.dump_circuit {
        let circuit = build_floquet_circuit(&run.params);
        let path = out_dir.join("circuit.txt");
        std::fs::write(&path, circuit.describe())
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
        files.push(path);
    }

    let meta = series_meta(c, &run);
    let meta_path = out_dir.join("fidelity.meta.json");
    io::write_json(&meta_path, &meta)?;
    files.push(meta_path);

    Ok(RunOutput {
        files,
        summary: json!({
            "t_max": c.t_max,
            "t_star": run.t_star,
            "final_fidelity": run.series.values.last(),
        }),
    })
}

fn boxcount_rows(result: &BoxCountResult) -> Vec<Vec<String>> {
    result
        .strip_widths
        .iter()
        .zip(&result.counts)
        .map(|(l, m)| vec![l.to_string(), io::fmt_f64(*m)])
        .collect()
}

fn fit_json(result: &BoxCountResult) -> serde_json::Value {
    json!({
        "dimension": result.dimension,
        "std_error": result.std_error,
        "r_squared": result.r_squared,
        "fit_window": result.fit_window,
        "sensitivity": result.sensitivity,
        "flags": result.flags,
    })
}

fn cmd_fracdim(c: &FracdimConfig, out_dir: &Path) -> Result<RunOutput> {
    let mut files = Vec::new();
    let mut source_meta = json!(null);
    let (signal, default_t_star): (Vec<f64>, Option<usize>) = match &c.source {
        FracdimSource::File { path } => (io::read_signal_csv(path)?, None),
        FracdimSource::Fidelity(fc) => {
            let run = run_series(fc)?;
            let series_path = out_dir.join("fidelity.csv");
            io::write_series_csv(&series_path, &run.series.values)?;
            files.push(series_path);
            source_meta = series_meta(fc, &run);
            (run.series.values.clone(), run.t_star)
        }
    };

    let t_star = c.t_star.or(default_t_star).unwrap_or(0);
    let mut segment: Vec<f64> = signal[t_star.min(signal.len().saturating_sub(1))..].to_vec();
    if c.detrend {
        segment = detrend_exponential(&segment);
    }
    let window = match c.window {
        Some((lo, hi)) => WindowSpec::Explicit(lo, hi),
        None => WindowSpec::Auto,
    };

    let (fit, table_files) = match estimate_dimension(&segment, window) {
        Ok(result) => {
            let table_path = out_dir.join("boxcount.csv");
            io::write_table_csv(&table_path, "L,M", &boxcount_rows(&result))?;
            (Ok(result), vec![table_path])
        }
        Err(Error::DegenerateWindow) => (Err(Error::DegenerateWindow), Vec::new()),
        Err(e) => return Err(e),
    };
    files.extend(table_files);

    let fit_meta = match &fit {
        Ok(result) => fit_json(result),
        Err(_) => json!({ "flags": ["degenerate_window"], "dimension": null }),
    };
    let meta = json!({
        "tool": tool_meta(),
        "run_config": RunConfig::Fracdim(c.clone()),
        "source": source_meta,
        "t_star_used": t_star,
        "detrended": c.detrend,
        "segment_length": segment.len(),
        "fit": fit_meta,
    });
    let meta_path = out_dir.join("fracdim.meta.json");
    io::write_json(&meta_path, &meta)?;
    files.push(meta_path);

    let summary = match &fit {
        Ok(r) => json!({
            "dimension": r.dimension,
            "std_error": r.std_error,
            "r_squared": r.r_squared,
            "fit_window": r.fit_window,
            "flags": r.flags,
        }),
        Err(_) => json!({ "dimension": null, "flags": ["degenerate_window"] }),
    };
    Ok(RunOutput { files, summary })
}

/// One sweep job: a (n_qubits, chaos, epsilon, realization) tuple.
#[derive(Clone, Debug, Serialize)]
struct SweepJob {
    n_qubits: u32,
    chaos: f64,
    epsilon: f64,
    realization: u32,
    seed: u64,
}

#[derive(Clone, Debug, Serialize)]
struct SweepJobResult {
    #[serde(flatten)]
    job: SweepJob,
    regime: Regime,
    dimension: Option<f64>,
    t_star: Option<usize>,
    transient_fallback: bool,
    failed: Option<String>,
}

fn run_sweep_job(job: &SweepJob, t_max: usize, initial: &InitialState) -> SweepJobResult {
    let mut out = SweepJobResult {
        job: job.clone(),
        regime: Regime::classify(job.chaos),
        dimension: None,
        t_star: None,
        transient_fallback: false,
        failed: None,
    };
    let run = (|| -> Result<(f64, usize, bool)> {
        let params = MapParams::new(job.n_qubits, job.chaos)?;
        let config = sample_imperfections(job.n_qubits, job.epsilon, job.seed)?;
        let series = compute_fidelity_series(&params, &config, initial, t_max)?;
        let (t_star, fallback) = match detect_transient(&series.values) {
            Ok(t) => (t, false),
            Err(_) => (t_max / 4, true),
        };
        let result = estimate_dimension(series.saturated_segment(t_star), WindowSpec::Auto)?;
        Ok((result.dimension, t_star, fallback))
    })();
    match run {
        Ok((d, t_star, fallback)) => {
            out.dimension = Some(d);
            out.t_star = Some(t_star);
            out.transient_fallback = fallback;
        }
        Err(e) => out.failed = Some(e.to_string()),
    }
    out
}

fn mean_and_spread(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let spread = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, spread)
}

/// Threshold on the integrable-regime mean dimension marking the
/// imperfection-induced transition to chaos.
pub const EPS_C_DIMENSION_THRESHOLD: f64 = 1.1;

/// ε_c estimates from a `(ε, mean D)` curve sampled on an ascending
/// ladder: the first ladder point whose mean exceeds the threshold, and
/// the log-interpolated crossing (continuous in the data, so ties across
/// register sizes are broken).
pub fn eps_c_estimates(curve: &[(f64, f64)]) -> (Option<f64>, Option<f64>) {
    let ladder = curve
        .iter()
        .find(|(_, d)| *d > EPS_C_DIMENSION_THRESHOLD)
        .map(|(e, _)| *e);
    let mut interp = None;
    for pair in curve.windows(2) {
        let (e0, d0) = pair[0];
        let (e1, d1) = pair[1];
        if d0 <= EPS_C_DIMENSION_THRESHOLD && d1 > EPS_C_DIMENSION_THRESHOLD && d1 > d0 {
            let f = (EPS_C_DIMENSION_THRESHOLD - d0) / (d1 - d0);
            interp = Some((e0.ln() + f * (e1.ln() - e0.ln())).exp());
            break;
        }
    }
    if interp.is_none() {
        if let Some((e0, d0)) = curve.first() {
            if *d0 > EPS_C_DIMENSION_THRESHOLD {
                interp = Some(*e0);
            }
        }
    }
    (ladder, interp)
}

fn cmd_sweep(c: &SweepConfig, out_dir: &Path) -> Result<RunOutput> {
    if c.n_qubits_list.is_empty() || c.chaos_list.is_empty() || c.epsilon_list.is_empty() {
        return Err(Error::Config(
            "sweep needs nonempty n_qubits, chaos, and epsilon lists".into(),
        ));
    }
    if c.realizations == 0 {
        return Err(Error::Config("sweep needs at least one realization".into()));
    }
    let mut eps_sorted = c.epsilon_list.clone();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut jobs = Vec::new();
    for &n_q in &c.n_qubits_list {
        for &chaos in &c.chaos_list {
            for &eps in &eps_sorted {
                for r in 0..c.realizations {
                    jobs.push(SweepJob {
                        n_qubits: n_q,
                        chaos,
                        epsilon: eps,
                        realization: r,
                        seed: derive_seed(c.master_seed, r as u64),
                    });
                }
            }
        }
    }

    let mut results: Vec<(usize, SweepJobResult)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| (i, run_sweep_job(job, c.t_max, &c.initial)))
        .collect();
    results.sort_by_key(|(i, _)| *i);
    let results: Vec<SweepJobResult> = results.into_iter().map(|(_, r)| r).collect();
    let failures = results.iter().filter(|r| r.failed.is_some()).count();

    let mut files = Vec::new();

    // D vs K table: one row per (n_qubits, chaos, epsilon).
    let mut d_vs_k_rows = Vec::new();
    for &n_q in &c.n_qubits_list {
        for &chaos in &c.chaos_list {
            for &eps in &eps_sorted {
                let ds: Vec<f64> = results
                    .iter()
                    .filter(|r| {
                        r.job.n_qubits == n_q && r.job.chaos == chaos && r.job.epsilon == eps
                    })
                    .filter_map(|r| r.dimension)
                    .collect();
                let (mean, spread) = mean_and_spread(&ds);
                d_vs_k_rows.push(vec![
                    n_q.to_string(),
                    io::fmt_f64(chaos),
                    io::fmt_f64(eps),
                    Regime::classify(chaos).to_string(),
                    io::fmt_f64(mean),
                    io::fmt_f64(spread),
                    ds.len().to_string(),
                ]);
            }
        }
    }
    let d_vs_k_path = out_dir.join("d_vs_k.csv");
    io::write_table_csv(
        &d_vs_k_path,
        "n_qubits,K,epsilon,regime,d_mean,d_spread,n_ok",
        &d_vs_k_rows,
    )?;
    files.push(d_vs_k_path);

    // D vs ε per regime, averaged over the chaos values in each regime.
    let mut d_vs_eps_rows = Vec::new();
    let mut integrable_curves: BTreeMap<u32, Vec<(f64, f64)>> = BTreeMap::new();
    for &n_q in &c.n_qubits_list {
        for regime in [Regime::Integrable, Regime::Mixed, Regime::Chaotic] {
            if !c.chaos_list.iter().any(|&k| Regime::classify(k) == regime) {
                continue;
            }
            for &eps in &eps_sorted {
                let ds: Vec<f64> = results
                    .iter()
                    .filter(|r| {
                        r.job.n_qubits == n_q && r.regime == regime && r.job.epsilon == eps
                    })
                    .filter_map(|r| r.dimension)
                    .collect();
                let (mean, spread) = mean_and_spread(&ds);
                d_vs_eps_rows.push(vec![
                    n_q.to_string(),
                    io::fmt_f64(eps),
                    regime.to_string(),
                    io::fmt_f64(mean),
                    io::fmt_f64(spread),
                    ds.len().to_string(),
                ]);
                if regime == Regime::Integrable && mean.is_finite() {
                    integrable_curves.entry(n_q).or_default().push((eps, mean));
                }
            }
        }
    }
    let d_vs_eps_path = out_dir.join("d_vs_eps.csv");
    io::write_table_csv(
        &d_vs_eps_path,
        "n_qubits,epsilon,regime,d_mean,d_spread,n_ok",
        &d_vs_eps_rows,
    )?;
    files.push(d_vs_eps_path);

    // ε_c per register size from the integrable-regime mean curve.
    let mut eps_c_rows = Vec::new();
    let mut eps_c_summary = Vec::new();
    for (&n_q, curve) in &integrable_curves {
        let (ladder, interp) = eps_c_estimates(curve);
        let fmt_opt = |v: Option<f64>| v.map(io::fmt_f64).unwrap_or_else(|| "".into());
        eps_c_rows.push(vec![n_q.to_string(), fmt_opt(ladder), fmt_opt(interp)]);
        eps_c_summary.push(json!({ "n_qubits": n_q, "eps_c_ladder": ladder, "eps_c_interp": interp }));
    }
    if !eps_c_rows.is_empty() {
        let eps_c_path = out_dir.join("eps_c.csv");
        io::write_table_csv(&eps_c_path, "n_qubits,eps_c_ladder,eps_c_interp", &eps_c_rows)?;
        files.push(eps_c_path);
    }

    // Per-job log for provenance.
    let job_rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.job.n_qubits.to_string(),
                io::fmt_f64(r.job.chaos),
                io::fmt_f64(r.job.epsilon),
                r.job.realization.to_string(),
                r.job.seed.to_string(),
                r.regime.to_string(),
                r.dimension.map(io::fmt_f64).unwrap_or_default(),
                r.t_star.map(|t| t.to_string()).unwrap_or_default(),
                (r.transient_fallback as u8).to_string(),
                r.failed.clone().unwrap_or_default().replace(',', ";"),
            ]
        })
        .collect();
    let jobs_path = out_dir.join("sweep_jobs.csv");
    io::write_table_csv(
        &jobs_path,
        "n_qubits,K,epsilon,realization,seed,regime,dimension,t_star,transient_fallback,failed",
        &job_rows,
    )?;
    files.push(jobs_path);

    let meta = json!({
        "tool": tool_meta(),
        "run_config": RunConfig::Sweep(c.clone()),
        "jobs": jobs.len(),
        "failures": failures,
        "eps_c": eps_c_summary,
        "seed_derivation": "splitmix64(master, realization)",
    });
    let meta_path = out_dir.join("sweep.meta.json");
    io::write_json(&meta_path, &meta)?;
    files.push(meta_path);

    Ok(RunOutput {
        files,
        summary: json!({ "jobs": jobs.len(), "failures": failures, "eps_c": eps_c_summary }),
    })
}

fn cmd_tomography(c: &TomographyConfig, out_dir: &Path) -> Result<RunOutput> {
    let params = MapParams::new(c.n_qubits, c.chaos)?;
    let scan = tomography_scan(
        &params,
        c.epsilon,
        c.t_max,
        c.grid,
        c.master_seed,
        c.seed_policy,
        c.keep_series,
    )?;

    let mut files = Vec::new();

    if c.keep_series {
        for j in 0..c.grid {
            for i in 0..c.grid {
                if let Some(series) = &scan.cell(i, j).series {
                    let path = out_dir.join(format!("cells/cell_{i}_{j}.csv"));
                    io::write_series_csv(&path, series)?;
                    files.push(path);
                }
            }
        }
    }

    // Dimension grid: G rows (momentum ascending) × G columns (angle).
    let d_rows: Vec<Vec<f64>> = scan
        .dimension_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|d| d.unwrap_or(f64::NAN)).collect())
        .collect();
    let dgrid_path = out_dir.join("dgrid.csv");
    io::write_matrix_csv(&dgrid_path, &d_rows)?;
    files.push(dgrid_path);

    // Husimi of the exactly evolved reference packet.
    let (h_theta, h_n) = c
        .husimi_initial
        .unwrap_or((std::f64::consts::FRAC_PI_2, 0.0));
    let spec = GaussianPacketSpec::minimal(h_theta, h_n);
    let mut reference = crate::state::gaussian_packet(&params, &spec)?;
    let mut map = SawtoothMap::new(params.clone());
    map.evolve(&mut reference, c.t_max);
    let hgrid = husimi(
        &reference,
        &params,
        c.husimi_resolution,
        c.husimi_resolution,
    )?;
    let husimi_path = out_dir.join("husimi.csv");
    io::write_matrix_csv(&husimi_path, &hgrid.values)?;
    files.push(husimi_path);

    // Per-cell provenance table.
    let cell_rows: Vec<Vec<String>> = (0..c.grid)
        .flat_map(|j| (0..c.grid).map(move |i| (i, j)))
        .map(|(i, j)| {
            let cell = scan.cell(i, j);
            vec![
                i.to_string(),
                j.to_string(),
                io::fmt_f64(cell.theta),
                io::fmt_f64(cell.momentum),
                cell.seed.to_string(),
                cell.dimension.map(io::fmt_f64).unwrap_or_default(),
                cell.std_error.map(io::fmt_f64).unwrap_or_default(),
                cell.r_squared.map(io::fmt_f64).unwrap_or_default(),
                cell.fit_window
                    .map(|w| io::fmt_f64(w.0))
                    .unwrap_or_default(),
                cell.fit_window
                    .map(|w| io::fmt_f64(w.1))
                    .unwrap_or_default(),
                cell.t_star.map(|t| t.to_string()).unwrap_or_default(),
                (cell.transient_fallback as u8).to_string(),
                cell.failed.clone().unwrap_or_default().replace(',', ";"),
            ]
        })
        .collect();
    let cells_path = out_dir.join("cells.csv");
    io::write_table_csv(
        &cells_path,
        "theta_index,momentum_index,theta,momentum,seed,dimension,std_error,r_squared,l_min,l_max,t_star,transient_fallback,failed",
        &cell_rows,
    )?;
    files.push(cells_path);

    let failed = scan.cells.iter().filter(|c| c.failed.is_some()).count();
    let meta = json!({
        "tool": tool_meta(),
        "run_config": RunConfig::Tomography(c.clone()),
        "params": params,
        "grid_convention": {
            "theta_centers": "2π i / G, column index i",
            "momentum_centers": "-dim/2 + j dim / G, row index j",
            "dgrid_orientation": "rows ascend in momentum, columns in angle",
        },
        "husimi_initial": { "theta": h_theta, "momentum": h_n },
        "color_map_recommendation": "map low→high through blue→yellow→red",
        "gate_count": Circuit::expected_gate_count(c.n_qubits),
        "failed_cells": failed,
    });
    let meta_path = out_dir.join("tomography.meta.json");
    io::write_json(&meta_path, &meta)?;
    files.push(meta_path);

    Ok(RunOutput {
        files,
        summary: json!({ "cells": scan.cells.len(), "failed_cells": failed }),
    })
}

fn cmd_husimi(c: &HusimiConfig, out_dir: &Path) -> Result<RunOutput> {
    let params = MapParams::new(c.n_qubits, c.chaos)?;
    let spec = GaussianPacketSpec {
        center_angle: c.theta,
        center_momentum: c.momentum,
        momentum_width: c.momentum_width,
    };
    let mut state = crate::state::gaussian_packet(&params, &spec)?;
    let mut map = SawtoothMap::new(params.clone());
    map.evolve(&mut state, c.steps);
    let grid = husimi(&state, &params, c.grid_theta, c.grid_momentum)?;

    let husimi_path = out_dir.join("husimi.csv");
    io::write_matrix_csv(&husimi_path, &grid.values)?;
    let meta = json!({
        "tool": tool_meta(),
        "run_config": RunConfig::Husimi(c.clone()),
        "params": params,
        "theta_centers": grid.theta_centers,
        "momentum_centers": grid.momentum_centers,
        "normalization": "grid sum times cell area equals 1",
    });
    let meta_path = out_dir.join("husimi.meta.json");
    io::write_json(&meta_path, &meta)?;

    Ok(RunOutput {
        files: vec![husimi_path, meta_path],
        summary: json!({ "grid_theta": c.grid_theta, "grid_momentum": c.grid_momentum }),
    })
}

fn cmd_synth(c: &SynthConfig, out_dir: &Path) -> Result<RunOutput> {
    let signal = synth_signal(c.kind, c.length)?;
    let rows: Vec<Vec<String>> = signal
        .iter()
        .enumerate()
        .map(|(t, v)| vec![t.to_string(), io::fmt_f64(*v)])
        .collect();
    let signal_path = out_dir.join("signal.csv");
    io::write_table_csv(&signal_path, "t,value", &rows)?;
    let meta = json!({
        "tool": tool_meta(),
        "run_config": RunConfig::Synth(c.clone()),
        "analytic_dimension": c.kind.analytic_dimension(),
    });
    let meta_path = out_dir.join("synth.meta.json");
    io::write_json(&meta_path, &meta)?;

    Ok(RunOutput {
        files: vec![signal_path, meta_path],
        summary: json!({ "length": c.length, "analytic_dimension": c.kind.analytic_dimension() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_c_interpolation_crosses_threshold() {
        let curve = vec![(1e-6, 1.0), (1e-5, 1.02), (1e-4, 1.05), (1e-3, 1.3), (1e-2, 1.5)];
        let (ladder, interp) = eps_c_estimates(&curve);
        assert_eq!(ladder, Some(1e-3));
        let x = interp.unwrap();
        assert!(x > 1e-4 && x < 1e-3, "interp={x}");
    }

    #[test]
    fn eps_c_none_when_never_crossing() {
        let curve = vec![(1e-6, 1.0), (1e-5, 1.01)];
        let (ladder, interp) = eps_c_estimates(&curve);
        assert!(ladder.is_none());
        assert!(interp.is_none());
    }

    #[test]
    fn eps_c_degenerate_start_above_threshold() {
        let curve = vec![(1e-6, 1.3), (1e-5, 1.4)];
        let (ladder, interp) = eps_c_estimates(&curve);
        assert_eq!(ladder, Some(1e-6));
        assert_eq!(interp, Some(1e-6));
    }

    #[test]
    fn run_config_round_trips_through_json() {
        let config = RunConfig::Sweep(SweepConfig {
            n_qubits_list: vec![4, 6],
            chaos_list: vec![-1.0, 2.0_f64.sqrt()],
            epsilon_list: vec![1e-4, 1e-3],
            realizations: 2,
            master_seed: 42,
            t_max: 512,
            initial: default_initial(),
        });
        let text = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string(&back).unwrap();
        assert_eq!(text, again);
    }
}
