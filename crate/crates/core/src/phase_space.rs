//! Husimi phase-space distribution and the fractal-dimension tomography
//! scan.
//!
//! The Husimi value at a grid point is the squared overlap of the state
//! with the minimal-uncertainty Gaussian packet centered there. The
//! tomography scan runs one fidelity experiment per grid cell and maps
//! the fractal dimension of the post-transient fluctuations over the
//! torus: integer dimension marks integrable islands, fractional
//! dimension the chaotic sea.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{compute_fidelity_series, detect_transient, InitialState};
use crate::fractal::{estimate_dimension, WindowSpec};
use crate::noise::{derive_seed, sample_imperfections, ImperfectionConfig};
use crate::params::MapParams;
use crate::state::{gaussian_packet, GaussianPacketSpec, StateVector};

/// Husimi distribution sampled on a `θ × n` grid, normalized so the grid
/// integrates to one over the torus.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HusimiGrid {
    /// Angle centers, length `grid_theta`.
    pub theta_centers: Vec<f64>,
    /// Momentum centers, length `grid_momentum`.
    pub momentum_centers: Vec<f64>,
    /// Row-major values: `values[j][i]` belongs to
    /// `(theta_centers[i], momentum_centers[j])`.
    pub values: Vec<Vec<f64>>,
}

/// Grid centers: `θ_i = 2π i / G` and `n_j = -dim/2 + j dim / G`, so that
/// coarser grids sample a subset of finer ones.
fn grid_centers(params: &MapParams, grid_theta: usize, grid_momentum: usize) -> (Vec<f64>, Vec<f64>) {
    let thetas = (0..grid_theta)
        .map(|i| std::f64::consts::TAU * i as f64 / grid_theta as f64)
        .collect();
    let dim = params.dim as f64;
    let momenta = (0..grid_momentum)
        .map(|j| -dim / 2.0 + j as f64 * dim / grid_momentum as f64)
        .collect();
    (thetas, momenta)
}

/// Computes the Husimi distribution of `state` on a
/// `grid_theta × grid_momentum` grid of coherent-state centers.
pub fn husimi(
    state: &StateVector,
    params: &MapParams,
    grid_theta: usize,
    grid_momentum: usize,
) -> Result<HusimiGrid> {
    if grid_theta < 2 || grid_momentum < 2 {
        return Err(Error::InvalidParams(
            "husimi grid needs at least 2 points per axis".into(),
        ));
    }
    let (theta_centers, momentum_centers) = grid_centers(params, grid_theta, grid_momentum);
    let mut values = vec![vec![0.0; grid_theta]; grid_momentum];
    for (j, &n0) in momentum_centers.iter().enumerate() {
        for (i, &theta0) in theta_centers.iter().enumerate() {
            let coherent = gaussian_packet(params, &GaussianPacketSpec::minimal(theta0, n0))?;
            values[j][i] = coherent.fidelity_with(state);
        }
    }
    // Normalize: Σ values · cell_area = 1 on the (θ, n) torus.
    let cell_area = (std::f64::consts::TAU / grid_theta as f64)
        * (params.dim as f64 / grid_momentum as f64);
    let total: f64 = values.iter().flatten().sum();
    if total > 0.0 {
        let norm = 1.0 / (total * cell_area);
        for row in &mut values {
            for v in row {
                *v *= norm;
            }
        }
    }
    Ok(HusimiGrid {
        theta_centers,
        momentum_centers,
        values,
    })
}

/// Disorder-seed policy of a tomography scan.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    /// One imperfection realization for the whole scan (the same
    /// hardware probed with different initial conditions). This is the
    /// default, matching a single-realization experiment.
    Shared,
    /// Independent realization per cell, derived as
    /// `derive_seed(master, cell_index)`.
    PerCell,
}

/// Outcome of one tomography cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TomographyCell {
    pub theta: f64,
    pub momentum: f64,
    pub seed: u64,
    pub dimension: Option<f64>,
    pub std_error: Option<f64>,
    pub r_squared: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub t_star: Option<usize>,
    /// Set when the transient never confirmed and the fallback cutoff
    /// `t_max / 4` was used for the analysis segment.
    pub transient_fallback: bool,
    /// Set when the cell's analysis failed (degenerate window, fit
    /// failure); `dimension` is `None` in that case.
    pub failed: Option<String>,
    /// Full fidelity series, retained only on request.
    pub series: Option<Vec<f64>>,
}

/// Fractal-dimension map over initial conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TomographyGrid {
    pub params: MapParams,
    pub epsilon: f64,
    pub master_seed: u64,
    pub seed_policy: SeedPolicy,
    pub t_max: usize,
    pub grid: usize,
    /// Row-major: `cells[j * grid + i]` is the cell at
    /// `(theta_centers[i], momentum_centers[j])`.
    pub cells: Vec<TomographyCell>,
}

impl TomographyGrid {
    pub fn cell(&self, theta_index: usize, momentum_index: usize) -> &TomographyCell {
        &self.cells[momentum_index * self.grid + theta_index]
    }

    /// Dimension matrix with `None` for failed cells.
    pub fn dimension_rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.grid)
            .map(|j| {
                (0..self.grid)
                    .map(|i| self.cell(i, j).dimension)
                    .collect()
            })
            .collect()
    }
}

fn scan_cell(
    params: &MapParams,
    t_max: usize,
    theta: f64,
    momentum: f64,
    seed: u64,
    config: &ImperfectionConfig,
    keep_series: bool,
) -> TomographyCell {
    let mut cell = TomographyCell {
        theta,
        momentum,
        seed,
        dimension: None,
        std_error: None,
        r_squared: None,
        fit_window: None,
        t_star: None,
        transient_fallback: false,
        failed: None,
        series: None,
    };
    let initial = InitialState::Gaussian(GaussianPacketSpec::minimal(theta, momentum));
    let series = match compute_fidelity_series(params, config, &initial, t_max) {
        Ok(s) => s,
        Err(e) => {
            cell.failed = Some(e.to_string());
            return cell;
        }
    };
    let t_star = match detect_transient(&series.values) {
        Ok(t) => t,
        Err(_) => {
            cell.transient_fallback = true;
            t_max / 4
        }
    };
    cell.t_star = Some(t_star);
    let segment = series.saturated_segment(t_star);
    match estimate_dimension(segment, WindowSpec::Auto) {
        Ok(result) => {
            cell.dimension = Some(result.dimension);
            cell.std_error = Some(result.std_error);
            cell.r_squared = Some(result.r_squared);
            cell.fit_window = Some(result.fit_window);
        }
        Err(e) => {
            cell.failed = Some(e.to_string());
        }
    }
    if keep_series {
        cell.series = Some(series.values);
    }
    cell
}

/// Runs the tomography scan: one fidelity experiment per cell of a
/// `grid × grid` lattice of Gaussian initial conditions, in parallel.
/// Per-cell failures are recorded on the cell and never abort the scan.
/// `keep_series` retains each cell's full fidelity series for bundle
/// output.
#[allow(clippy::too_many_arguments)]
pub fn tomography_scan(
    params: &MapParams,
    epsilon: f64,
    t_max: usize,
    grid: usize,
    master_seed: u64,
    seed_policy: SeedPolicy,
    keep_series: bool,
) -> Result<TomographyGrid> {
    if !(2..=64).contains(&grid) {
        return Err(Error::InvalidParams(format!(
            "tomography grid must be in 2..=64, got {grid}"
        )));
    }
    if t_max < 100 {
        return Err(Error::InvalidParams(
            "tomography needs t_max >= 100".into(),
        ));
    }
    let (thetas, momenta) = grid_centers(params, grid, grid);
    let shared_config = sample_imperfections(params.n_qubits, epsilon, master_seed)?;

    let jobs: Vec<(usize, f64, f64, u64)> = (0..grid * grid)
        .map(|idx| {
            let i = idx % grid;
            let j = idx / grid;
            let seed = match seed_policy {
                SeedPolicy::Shared => master_seed,
                SeedPolicy::PerCell => derive_seed(master_seed, idx as u64),
            };
            (idx, thetas[i], momenta[j], seed)
        })
        .collect();

    let mut cells: Vec<(usize, TomographyCell)> = jobs
        .par_iter()
        .map(|&(idx, theta, momentum, seed)| {
            let config = match seed_policy {
                SeedPolicy::Shared => shared_config.clone(),
                SeedPolicy::PerCell => sample_imperfections(params.n_qubits, epsilon, seed)
                    .expect("epsilon validated above"),
            };
            (
                idx,
                scan_cell(params, t_max, theta, momentum, seed, &config, keep_series),
            )
        })
        .collect();
    cells.sort_by_key(|(idx, _)| *idx);

    Ok(TomographyGrid {
        params: params.clone(),
        epsilon,
        master_seed,
        seed_policy,
        t_max,
        grid,
        cells: cells.into_iter().map(|(_, c)| c).collect(),
    })
}
