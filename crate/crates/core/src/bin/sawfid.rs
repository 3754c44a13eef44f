//! Command-line front end: builds a run configuration from flags (or a
//! persisted JSON config overridden by flags) and executes it.
//!
//! Exit codes: 0 on success, 2 on invalid configuration, 3 on job
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sawfid::error::Error;
use sawfid::fidelity::InitialState;
use sawfid::fractal::SynthKind;
use sawfid::io::resolve_out_dir;
use sawfid::phase_space::SeedPolicy;
use sawfid::run::{
    default_initial, execute, FidelityConfig, FracdimConfig, FracdimSource, HusimiConfig,
    RunConfig, SweepConfig, SynthConfig, TomographyConfig,
};
use sawfid::state::GaussianPacketSpec;

#[derive(Parser)]
#[command(
    name = "sawfid",
    version,
    about = "Quantum sawtooth map: fidelity decay and fractal-dimension analysis"
)]
struct Cli {
    /// Load a persisted run configuration (JSON); flags override fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $SAWFID_OUTDIR or the current dir).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for parallel fan-out (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct InitialArgs {
    /// Center angle of the initial Gaussian packet.
    #[arg(long)]
    theta0: Option<f64>,
    /// Center momentum of the initial Gaussian packet.
    #[arg(long)]
    n0: Option<f64>,
    /// Momentum width of the initial packet (default minimal
    /// uncertainty).
    #[arg(long)]
    sigma_n: Option<f64>,
    /// Use the momentum eigenstate |n⟩ instead of a Gaussian packet.
    #[arg(long, conflicts_with_all = ["theta0", "n0", "sigma_n"])]
    basis: Option<i64>,
}

impl InitialArgs {
    fn apply(&self, base: InitialState) -> InitialState {
        if let Some(n) = self.basis {
            return InitialState::Basis { momentum: n };
        }
        if self.theta0.is_none() && self.n0.is_none() && self.sigma_n.is_none() {
            return base;
        }
        let mut spec = match base {
            InitialState::Gaussian(spec) => spec,
            InitialState::Basis { .. } => GaussianPacketSpec::minimal(0.0, 0.0),
        };
        if let Some(t) = self.theta0 {
            spec.center_angle = t;
        }
        if let Some(n) = self.n0 {
            spec.center_momentum = n;
        }
        if let Some(s) = self.sigma_n {
            spec.momentum_width = Some(s);
        }
        InitialState::Gaussian(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a paired exact/noisy evolution and record the fidelity series.
    Fidelity {
        #[arg(long)]
        n_qubits: Option<u32>,
        /// Chaos parameter K.
        #[arg(long)]
        chaos: Option<f64>,
        /// Imperfection strength ε.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        t_max: Option<usize>,
        /// Also emit a ΔF histogram with this many bins.
        #[arg(long)]
        histogram_bins: Option<usize>,
        /// Dump the gate list of the Floquet circuit.
        #[arg(long)]
        dump_circuit: bool,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// Estimate the fractal dimension of a fidelity series or CSV signal.
    Fracdim {
        /// Analyze a signal from this CSV file instead of simulating.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n_qubits: Option<u32>,
        #[arg(long)]
        chaos: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        t_max: Option<usize>,
        /// Override the transient cutoff t*.
        #[arg(long)]
        t_star: Option<usize>,
        /// Explicit fit window lower edge.
        #[arg(long)]
        l_min: Option<f64>,
        /// Explicit fit window upper edge.
        #[arg(long)]
        l_max: Option<f64>,
        /// Subtract a fitted exponential trend before counting.
        #[arg(long)]
        detrend: bool,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// Fan out fidelity + dimension jobs over (n_qubits, K, ε, seeds).
    Sweep {
        /// Comma-separated register sizes.
        #[arg(long, value_delimiter = ',')]
        n_qubits: Vec<u32>,
        /// Comma-separated chaos parameters.
        #[arg(long, value_delimiter = ',')]
        chaos: Vec<f64>,
        /// Comma-separated imperfection strengths.
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
        /// Disorder realizations per point.
        #[arg(long)]
        realizations: Option<u32>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        t_max: Option<usize>,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// Map the fractal dimension over a grid of initial conditions.
    Tomography {
        #[arg(long)]
        n_qubits: Option<u32>,
        #[arg(long)]
        chaos: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        t_max: Option<usize>,
        /// Grid resolution G (G×G cells).
        #[arg(long)]
        grid: Option<usize>,
        /// Disorder policy: shared (one realization per scan) or per-cell.
        #[arg(long)]
        per_cell_seeds: bool,
        /// Resolution of the emitted Husimi grid.
        #[arg(long)]
        husimi_resolution: Option<usize>,
        /// Center of the Husimi reference packet (angle).
        #[arg(long)]
        husimi_theta: Option<f64>,
        /// Center of the Husimi reference packet (momentum).
        #[arg(long)]
        husimi_n: Option<f64>,
        /// Retain per-cell fidelity series in a cells/ bundle.
        #[arg(long)]
        keep_series: bool,
    },
    /// Project a (possibly evolved) Gaussian packet onto the Husimi grid.
    Husimi {
        #[arg(long)]
        n_qubits: Option<u32>,
        #[arg(long)]
        chaos: Option<f64>,
        #[arg(long)]
        theta0: Option<f64>,
        #[arg(long)]
        n0: Option<f64>,
        #[arg(long)]
        sigma_n: Option<f64>,
        /// Exact evolution steps before projecting.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        grid_theta: Option<usize>,
        #[arg(long)]
        grid_momentum: Option<usize>,
    },
    /// Generate a synthetic validation signal of known dimension.
    Synth {
        /// Signal family: line, sinusoid, weierstrass.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        slope: Option<f64>,
        #[arg(long)]
        period: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        t_span: Option<f64>,
        #[arg(long)]
        length: Option<usize>,
    },
}

fn load_config(path: &PathBuf) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    // Accept both a bare RunConfig and a metadata sidecar containing one.
    if let Ok(config) = serde_json::from_str::<RunConfig>(&text) {
        return Ok(config);
    }
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad JSON: {e}")))?;
    if let Some(inner) = value.get("run_config") {
        return serde_json::from_value(inner.clone())
            .map_err(|e| Error::Config(format!("bad run_config: {e}")));
    }
    Err(Error::Config(format!(
        "{} holds neither a run config nor a metadata sidecar",
        path.display()
    )))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::Config(format!("missing required --{flag} (or config field)")))
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let base = cli.config.as_ref().map(load_config).transpose()?;
    match &cli.command {
        Command::Fidelity {
            n_qubits,
            chaos,
            epsilon,
            seed,
            t_max,
            histogram_bins,
            dump_circuit,
            initial,
        } => {
            let mut c = match base {
                Some(RunConfig::Fidelity(c)) => c,
                Some(_) => return Err(Error::Config("config file is not a fidelity config".into())),
                None => FidelityConfig {
                    n_qubits: require(*n_qubits, "n-qubits")?,
                    chaos: require(*chaos, "chaos")?,
                    epsilon: require(*epsilon, "epsilon")?,
                    seed: 0,
                    t_max: 1 << 14,
                    initial: default_initial(),
                    histogram_bins: None,
                    dump_circuit: false,
                },
            };
            if let Some(v) = n_qubits {
                c.n_qubits = *v;
            }
            if let Some(v) = chaos {
                c.chaos = *v;
            }
            if let Some(v) = epsilon {
                c.epsilon = *v;
            }
            if let Some(v) = seed {
                c.seed = *v;
            }
            if let Some(v) = t_max {
                c.t_max = *v;
            }
            if histogram_bins.is_some() {
                c.histogram_bins = *histogram_bins;
            }
            if *dump_circuit {
                c.dump_circuit = true;
            }
            c.initial = initial.apply(c.initial);
            Ok(RunConfig::Fidelity(c))
        }
        Command::Fracdim {
            input,
            n_qubits,
            chaos,
            epsilon,
            seed,
            t_max,
            t_star,
            l_min,
            l_max,
            detrend,
            initial,
        } => {
            let mut c = match base {
                Some(RunConfig::Fracdim(c)) => c,
                Some(_) => return Err(Error::Config("config file is not a fracdim config".into())),
                None => {
                    let source = if let Some(path) = input {
                        FracdimSource::File { path: path.clone() }
                    } else {
                        FracdimSource::Fidelity(FidelityConfig {
                            n_qubits: require(*n_qubits, "n-qubits")?,
                            chaos: require(*chaos, "chaos")?,
                            epsilon: require(*epsilon, "epsilon")?,
                            seed: 0,
                            t_max: 1 << 14,
                            initial: default_initial(),
                            histogram_bins: None,
                            dump_circuit: false,
                        })
                    };
                    FracdimConfig {
                        source,
                        t_star: None,
                        window: None,
                        detrend: false,
                    }
                }
            };
            if let Some(path) = input {
                c.source = FracdimSource::File { path: path.clone() };
            }
            if let FracdimSource::Fidelity(fc) = &mut c.source {
                if let Some(v) = n_qubits {
                    fc.n_qubits = *v;
                }
                if let Some(v) = chaos {
                    fc.chaos = *v;
                }
                if let Some(v) = epsilon {
                    fc.epsilon = *v;
                }
                if let Some(v) = seed {
                    fc.seed = *v;
                }
                if let Some(v) = t_max {
                    fc.t_max = *v;
                }
                fc.initial = initial.apply(fc.initial.clone());
            }
            if t_star.is_some() {
                c.t_star = *t_star;
            }
            match (l_min, l_max) {
                (Some(lo), Some(hi)) => c.window = Some((*lo, *hi)),
                (None, None) => {}
                _ => {
                    return Err(Error::Config(
                        "--l-min and --l-max must be given together".into(),
                    ))
                }
            }
            if *detrend {
                c.detrend = true;
            }
            Ok(RunConfig::Fracdim(c))
        }
        Command::Sweep {
            n_qubits,
            chaos,
            epsilon,
            realizations,
            master_seed,
            t_max,
            initial,
        } => {
            let mut c = match base {
                Some(RunConfig::Sweep(c)) => c,
                Some(_) => return Err(Error::Config("config file is not a sweep config".into())),
                None => SweepConfig {
                    n_qubits_list: Vec::new(),
                    chaos_list: Vec::new(),
                    epsilon_list: Vec::new(),
                    realizations: 4,
                    master_seed: 0,
                    t_max: 1 << 14,
                    initial: default_initial(),
                },
            };
            if !n_qubits.is_empty() {
                c.n_qubits_list = n_qubits.clone();
            }
            if !chaos.is_empty() {
                c.chaos_list = chaos.clone();
            }
            if !epsilon.is_empty() {
                c.epsilon_list = epsilon.clone();
            }
            if let Some(v) = realizations {
                c.realizations = *v;
            }
            if let Some(v) = master_seed {
                c.master_seed = *v;
            }
            if let Some(v) = t_max {
                c.t_max = *v;
            }
            c.initial = initial.apply(c.initial);
            Ok(RunConfig::Sweep(c))
        }
        Command::Tomography {
            n_qubits,
            chaos,
            epsilon,
            master_seed,
            t_max,
            grid,
            per_cell_seeds,
            husimi_resolution,
            husimi_theta,
            husimi_n,
            keep_series,
        } => {
            let mut c = match base {
                Some(RunConfig::Tomography(c)) => c,
                Some(_) => {
                    return Err(Error::Config("config file is not a tomography config".into()))
                }
                None => TomographyConfig {
                    n_qubits: require(*n_qubits, "n-qubits")?,
                    chaos: require(*chaos, "chaos")?,
                    epsilon: require(*epsilon, "epsilon")?,
                    master_seed: 0,
                    t_max: 1 << 14,
                    grid: 8,
                    seed_policy: SeedPolicy::Shared,
                    husimi_resolution: 64,
                    husimi_initial: None,
                    keep_series: false,
                },
            };
            if let Some(v) = n_qubits {
                c.n_qubits = *v;
            }
            if let Some(v) = chaos {
                c.chaos = *v;
            }
            if let Some(v) = epsilon {
                c.epsilon = *v;
            }
            if let Some(v) = master_seed {
                c.master_seed = *v;
            }
            if let Some(v) = t_max {
                c.t_max = *v;
            }
            if let Some(v) = grid {
                c.grid = *v;
            }
            if *per_cell_seeds {
                c.seed_policy = SeedPolicy::PerCell;
            }
            if *keep_series {
                c.keep_series = true;
            }
            if let Some(v) = husimi_resolution {
                c.husimi_resolution = *v;
            }
            match (husimi_theta, husimi_n) {
                (Some(t), Some(n)) => c.husimi_initial = Some((*t, *n)),
                (None, None) => {}
                _ => {
                    return Err(Error::Config(
                        "--husimi-theta and --husimi-n must be given together".into(),
                    ))
                }
            }
            Ok(RunConfig::Tomography(c))
        }
        Command::Husimi {
            n_qubits,
            chaos,
            theta0,
            n0,
            sigma_n,
            steps,
            grid_theta,
            grid_momentum,
        } => {
            let mut c = match base {
                Some(RunConfig::Husimi(c)) => c,
                Some(_) => return Err(Error::Config("config file is not a husimi config".into())),
                None => HusimiConfig {
                    n_qubits: require(*n_qubits, "n-qubits")?,
                    chaos: require(*chaos, "chaos")?,
                    theta: require(*theta0, "theta0")?,
                    momentum: require(*n0, "n0")?,
                    momentum_width: None,
                    steps: 0,
                    grid_theta: 64,
                    grid_momentum: 64,
                },
            };
            if let Some(v) = n_qubits {
                c.n_qubits = *v;
            }
            if let Some(v) = chaos {
                c.chaos = *v;
            }
            if let Some(v) = theta0 {
                c.theta = *v;
            }
            if let Some(v) = n0 {
                c.momentum = *v;
            }
            if sigma_n.is_some() {
                c.momentum_width = *sigma_n;
            }
            if let Some(v) = steps {
                c.steps = *v;
            }
            if let Some(v) = grid_theta {
                c.grid_theta = *v;
            }
            if let Some(v) = grid_momentum {
                c.grid_momentum = *v;
            }
            Ok(RunConfig::Husimi(c))
        }
        Command::Synth {
            kind,
            slope,
            period,
            a,
            b,
            t_span,
            length,
        } => {
            let mut c = match base {
                Some(RunConfig::Synth(c)) => Some(c),
                Some(_) => return Err(Error::Config("config file is not a synth config".into())),
                None => None,
            };
            if let Some(kind_name) = kind {
                let new_kind = match kind_name.as_str() {
                    "line" => SynthKind::Line {
                        slope: slope.unwrap_or(1.0),
                    },
                    "sinusoid" => SynthKind::Sinusoid {
                        period: require(*period, "period")?,
                    },
                    "weierstrass" => SynthKind::Weierstrass {
                        a: require(*a, "a")?,
                        b: require(*b, "b")?,
                        t_span: t_span.unwrap_or(8.0),
                    },
                    other => {
                        return Err(Error::Config(format!(
                            "unknown synth kind '{other}' (line, sinusoid, weierstrass)"
                        )))
                    }
                };
                c = Some(SynthConfig {
                    kind: new_kind,
                    length: length.or(c.map(|c| c.length)).unwrap_or(32_768),
                });
            } else if let (Some(cfg), Some(len)) = (&mut c, length) {
                cfg.length = *len;
            }
            let c = c.ok_or_else(|| Error::Config("missing --kind (or config file)".into()))?;
            Ok(RunConfig::Synth(c))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sawfid: {e}");
            return ExitCode::from(2);
        }
    };
    let out_dir = resolve_out_dir(cli.out_dir.as_deref());
    match execute(&config, &out_dir, cli.workers) {
        Ok(output) => {
            for f in &output.files {
                println!("wrote {}", f.display());
            }
            println!("{}", output.summary);
            ExitCode::SUCCESS
        }
        Err(e @ (Error::Config(_) | Error::InvalidParams(_))) => {
            eprintln!("sawfid: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("sawfid: {e}");
            ExitCode::from(3)
        }
    }
}
