//! Shared test oracles, all coded independently of the library's
//! computational paths: dense matrices from definitions, a standard
//! square-grid box counter, and classical sawtooth trajectories.

#![allow(dead_code)]
// Dense oracles are written with explicit index loops on purpose: they
// mirror the matrix-element definitions they check against.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use sawfid::gates::Gate;
use sawfid::params::MapParams;
use sawfid::state::{Representation, StateVector};

pub type Matrix = Vec<Vec<Complex64>>;

pub fn mat_vec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Matrix {
    let mut m = vec![vec![Complex64::ZERO; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::ONE;
    }
    m
}

/// Momentum → angle transform matrix of the documented convention:
/// `A[j][m] = exp(i (m - N/2) θ_j) / √N`.
pub fn dft_matrix(params: &MapParams) -> Matrix {
    let n = params.dim;
    (0..n)
        .map(|j| {
            let theta = params.angle_of_index(j);
            (0..n)
                .map(|m| {
                    Complex64::cis(params.momentum_of_index(m) * theta) / (n as f64).sqrt()
                })
                .collect()
        })
        .collect()
}

pub fn conj_transpose(m: &Matrix) -> Matrix {
    let n = m.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[j][i].conj()).collect())
        .collect()
}

/// Dense Floquet matrix built from the definition:
/// `U = diag(free) · A† · diag(kick) · A`.
pub fn floquet_dense(params: &MapParams) -> Matrix {
    let n = params.dim;
    let a = dft_matrix(params);
    let a_dag = conj_transpose(&a);
    let mut kick_a = vec![vec![Complex64::ZERO; n]; n];
    for j in 0..n {
        let theta = params.angle_of_index(j) - std::f64::consts::PI;
        let kick = Complex64::cis(params.kick * theta * theta / 2.0);
        for m in 0..n {
            kick_a[j][m] = kick * a[j][m];
        }
    }
    let mut u = mat_mul(&a_dag, &kick_a);
    for (m, row) in u.iter_mut().enumerate() {
        let momentum = params.momentum_of_index(m);
        let free = Complex64::cis(-params.period * momentum * momentum / 2.0);
        for entry in row.iter_mut() {
            *entry = free * *entry;
        }
    }
    u
}

/// Dense matrix of one elementary gate, from its definition on basis
/// states (not from the library's apply path).
pub fn gate_dense(gate: &Gate, n_qubits: u32) -> Matrix {
    let dim = 1usize << n_qubits;
    let mut m = vec![vec![Complex64::ZERO; dim]; dim];
    match *gate {
        Gate::Hadamard { target } => {
            let bit = 1usize << target;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for col in 0..dim {
                let row0 = col & !bit;
                let row1 = col | bit;
                if col & bit == 0 {
                    m[row0][col] += Complex64::new(s, 0.0);
                    m[row1][col] += Complex64::new(s, 0.0);
                } else {
                    m[row0][col] += Complex64::new(s, 0.0);
                    m[row1][col] += Complex64::new(-s, 0.0);
                }
            }
        }
        Gate::SinglePhase { target, angle } => {
            let bit = 1usize << target;
            for col in 0..dim {
                m[col][col] = if col & bit != 0 {
                    Complex64::cis(angle)
                } else {
                    Complex64::ONE
                };
            }
        }
        Gate::ControlledPhase {
            control,
            target,
            angle,
        } => {
            let mask = (1usize << control) | (1usize << target);
            for col in 0..dim {
                m[col][col] = if col & mask == mask {
                    Complex64::cis(angle)
                } else {
                    Complex64::ONE
                };
            }
        }
    }
    m
}

/// Dense diagonal of the static-imperfection unitary from the σ_z
/// definition.
pub fn error_dense(detunings: &[f64]) -> Matrix {
    let dim = 1usize << detunings.len();
    let mut m = vec![vec![Complex64::ZERO; dim]; dim];
    for col in 0..dim {
        let mut phase = 0.0;
        for (i, d) in detunings.iter().enumerate() {
            phase += if col & (1 << i) == 0 { *d } else { -*d };
        }
        m[col][col] = Complex64::cis(-phase);
    }
    m
}

/// Deterministic pseudo-random unit state (independent of the library's
/// RNG machinery).
pub fn pseudo_random_state(params: &MapParams, salt: u64) -> StateVector {
    let mut x = salt.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut next = move || {
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        (x.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 11) as f64 / (1u64 << 53) as f64
    };
    let amps: Vec<Complex64> = (0..params.dim)
        .map(|_| Complex64::new(next() - 0.5, next() - 0.5))
        .collect();
    StateVector::from_amplitudes(amps, Representation::Momentum).unwrap()
}

pub fn max_amp_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Standard square-grid box counter for the graph of a sampled signal:
/// strips of `L` samples (sharing endpoints), counting the vertical
/// stack of `L×L` cells touched in each strip. Uses the same global
/// commensuration convention as the modified counter.
pub fn grid_box_count(signal: &[f64], ladder: &[usize]) -> Vec<(usize, f64)> {
    let lo = signal.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = signal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = if hi > lo {
        signal.len() as f64 / (hi - lo)
    } else {
        0.0
    };
    ladder
        .iter()
        .map(|&l| {
            let mut boxes = 0u64;
            let mut start = 0;
            while start + l < signal.len() {
                let window = &signal[start..=start + l];
                let (mut wmin, mut wmax) = (window[0], window[0]);
                for &v in &window[1..] {
                    wmin = wmin.min(v);
                    wmax = wmax.max(v);
                }
                let cell_lo = ((wmin - lo) * scale / l as f64).floor() as i64;
                let cell_hi = ((wmax - lo) * scale / l as f64).floor() as i64;
                boxes += (cell_hi - cell_lo + 1) as u64;
                start += l;
            }
            (l, boxes as f64)
        })
        .collect()
}

/// Log-log slope fit of a grid-count table; returns the dimension.
pub fn grid_dimension(table: &[(usize, f64)], window: (f64, f64)) -> f64 {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|(l, n)| (*l as f64) >= window.0 && (*l as f64) <= window.1 && *n > 0.0)
        .map(|(l, n)| ((*l as f64).ln(), n.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    -(sxy / sxx)
}

/// Classical sawtooth trajectory in scaled momentum `p = T n`;
/// returns the maximum |p - p0| over the horizon.
pub fn classical_momentum_excursion(chaos: f64, theta0: f64, p0: f64, steps: usize) -> f64 {
    let mut theta = theta0;
    let mut p = p0;
    let mut max_exc = 0.0f64;
    for _ in 0..steps {
        p += chaos * (theta - std::f64::consts::PI);
        theta = (theta + p).rem_euclid(std::f64::consts::TAU);
        max_exc = max_exc.max((p - p0).abs());
    }
    max_exc
}

/// Island/sea label for a tomography cell: the cell-center trajectory is
/// an island when its momentum excursion never leaves the cell's own
/// momentum band (half a grid cell), i.e. the dynamics is bounded at the
/// resolution the scan probes.
pub fn classical_cell_is_island(chaos: f64, theta0: f64, momentum0: f64, dim: usize, grid: usize) -> bool {
    let period = std::f64::consts::TAU / dim as f64;
    let p0 = momentum0 * period;
    let band = std::f64::consts::PI / grid as f64;
    classical_momentum_excursion(chaos, theta0, p0, 8192) <= band
}
