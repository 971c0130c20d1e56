//! Config file + flag merging. Every solver knob and acceptance threshold
//! is a named field here so a single TOML file reproduces a whole run;
//! flags override file fields, which override defaults.

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use fractoback_core::spectral::BasisKind;
use fractoback_core::{
    geometric_grid, DiagonalOperator, FractionalOrders, MlfConfig, SolveConfig, SourceTerm,
    SpectralVector,
};

use crate::error::{CliError, CliResult};
use crate::presets;

pub const OUTDIR_ENV: &str = "FRACTOBACK_OUTDIR";

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// TOML config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (precedence: flag, FRACTOBACK_OUTDIR, config, ".")
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    /// Seed for randomized families
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mode count for the dirichlet1d basis
    #[arg(long)]
    pub modes: Option<usize>,
    /// Fractional orders, strictly decreasing, e.g. 0.8,0.4
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
    /// Order weights, first entry 1, e.g. 1,1
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// Time horizon T
    #[arg(long = "t-final", alias = "T")]
    pub t_final: Option<f64>,
    /// Initial-data preset (see list-presets)
    #[arg(long)]
    pub initial: Option<String>,
    /// Source profile preset ("zero" or any initial-data preset)
    #[arg(long = "source-profile")]
    pub source_profile: Option<String>,
    /// Source time profile ("const:c", "poly:c0,c1,...", "exp:a,r")
    #[arg(long = "source-time")]
    pub source_time: Option<String>,
    /// Source smoothness index in (0,1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of output times
    #[arg(long = "n-times")]
    pub n_times: Option<usize>,
    /// Output time grid: "geometric" or "uniform"
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    operator: Option<RawOperator>,
    orders: Option<RawOrders>,
    problem: Option<RawProblem>,
    tolerances: Option<RawTolerances>,
    experiment: Option<RawExperiment>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    basis: Option<String>,
    n_modes: Option<usize>,
    eigenvalues: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrders {
    rhos: Option<Vec<f64>>,
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    horizon: Option<f64>,
    initial: Option<String>,
    final_data: Option<String>,
    source_profile: Option<String>,
    source_time: Option<String>,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    series_tol: Option<f64>,
    series_kmax: Option<usize>,
    z_switch: Option<f64>,
    contour_nodes: Option<usize>,
    talbot_nodes: Option<usize>,
    conv_panels: Option<usize>,
    conv_tol: Option<f64>,
    roundtrip_tol: Option<f64>,
    reforward_tol: Option<f64>,
    slope_tol: Option<f64>,
    sweep_tol: Option<f64>,
    growth_tol: Option<f64>,
    residual_margin: Option<f64>,
    kernel_tol: Option<f64>,
    erfc_tol: Option<f64>,
    oracle_tol: Option<f64>,
    asym_tol: Option<f64>,
    asym_slope_tol: Option<f64>,
    semigroup_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    seed: Option<u64>,
    kmax: Option<usize>,
    illposed_eps: Option<f64>,
    stability_eps: Option<f64>,
    b0: Option<f64>,
    cases: Option<usize>,
    noise: Option<f64>,
    noise_mode: Option<usize>,
    grid: Option<String>,
    n_times: Option<usize>,
    t_min: Option<f64>,
    base_steps: Option<usize>,
    levels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    outdir: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    Geometric,
}

/// Acceptance thresholds and experiment shape knobs, post-merge.
#[derive(Clone, Debug)]
pub struct Knobs {
    pub kmax: usize,
    pub illposed_eps: f64,
    pub stability_eps: f64,
    pub b0: f64,
    pub cases: usize,
    pub noise: f64,
    /// 1-based mode the noise lands on; 0 means the highest mode.
    pub noise_mode: usize,
    pub grid: GridKind,
    pub n_times: usize,
    pub t_min: f64,
    pub base_steps: usize,
    pub levels: usize,
    pub roundtrip_tol: f64,
    pub reforward_tol: f64,
    pub slope_tol: f64,
    pub sweep_tol: f64,
    pub growth_tol: f64,
    pub residual_margin: f64,
    pub kernel_tol: f64,
    pub erfc_tol: f64,
    pub oracle_tol: f64,
    pub asym_tol: f64,
    pub asym_slope_tol: f64,
    pub semigroup_tol: f64,
}

/// Fully validated run description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub op: DiagonalOperator,
    pub orders: FractionalOrders,
    pub horizon: f64,
    pub initial: SpectralVector,
    /// Explicit final data, when the config supplies one; otherwise the
    /// backward pipelines generate it with the forward solver.
    pub final_data: Option<SpectralVector>,
    pub source: SourceTerm,
    pub epsilon: f64,
    pub solve: SolveConfig,
    pub knobs: Knobs,
    pub outdir: PathBuf,
    pub seed: u64,
}

fn field_err(field: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {detail}"))
}

/// Prefix the offending field onto an error bubbling up from a preset
/// resolver without stacking a second "config:" tag.
fn prefix_field(field: &str, e: CliError) -> CliError {
    match e {
        CliError::Config(msg) => CliError::Config(format!("{field}: {msg}")),
        other => other,
    }
}

pub fn load(common: &CommonArgs) -> CliResult<ExperimentConfig> {
    let raw: RawConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RawConfig::default(),
    };
    let op_raw = raw.operator.unwrap_or_default();
    let orders_raw = raw.orders.unwrap_or_default();
    let problem = raw.problem.unwrap_or_default();
    let tol = raw.tolerances.unwrap_or_default();
    let exp = raw.experiment.unwrap_or_default();
    let output = raw.output.unwrap_or_default();

    let basis = op_raw.basis.as_deref().unwrap_or("dirichlet1d");
    let op = match basis {
        "dirichlet1d" => {
            let n = common.modes.or(op_raw.n_modes).unwrap_or(16);
            DiagonalOperator::dirichlet_laplacian_1d(n)
                .map_err(|e| field_err("[operator].n_modes", e))?
        }
        "diagonal" => {
            if common.modes.is_some() {
                return Err(field_err(
                    "--modes",
                    "applies to the dirichlet1d basis; the diagonal basis takes explicit eigenvalues",
                ));
            }
            let eig = op_raw.eigenvalues.ok_or_else(|| {
                field_err("[operator].eigenvalues", "required for basis = \"diagonal\"")
            })?;
            DiagonalOperator::diagonal(eig)
                .map_err(|e| field_err("[operator].eigenvalues", e))?
        }
        other => {
            return Err(field_err(
                "[operator].basis",
                format!("`{other}` is not \"dirichlet1d\" or \"diagonal\""),
            ))
        }
    };

    let rhos = common.rho.clone().or(orders_raw.rhos).unwrap_or_else(|| vec![0.8, 0.4]);
    let weights =
        common.q.clone().or(orders_raw.weights).unwrap_or_else(|| vec![1.0; rhos.len()]);
    let orders = FractionalOrders::new_relaxed(rhos, weights)
        .map_err(|e| field_err("[orders]", e))?;

    let horizon = common.t_final.or(problem.horizon).unwrap_or(1.0);
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(field_err("[problem].horizon", format!("must be positive, got {horizon}")));
    }

    let initial_spec =
        common.initial.clone().or(problem.initial).unwrap_or_else(|| "mode:1".into());
    let initial = presets::initial_data(&initial_spec, &op)
        .map_err(|e| prefix_field("[problem].initial", e))?;

    let final_data = match &problem.final_data {
        Some(spec) => Some(
            presets::initial_data(spec, &op).map_err(|e| prefix_field("[problem].final_data", e))?,
        ),
        None => None,
    };

    let epsilon = common.epsilon.or(problem.epsilon).unwrap_or(0.5);
    let profile_spec = common
        .source_profile
        .clone()
        .or(problem.source_profile)
        .unwrap_or_else(|| "zero".into());
    let source = if profile_spec == "zero" {
        SourceTerm::zero()
    } else {
        let profile = presets::initial_data(&profile_spec, &op)
            .map_err(|e| prefix_field("[problem].source_profile", e))?;
        let time_spec = common
            .source_time
            .clone()
            .or(problem.source_time)
            .unwrap_or_else(|| "const:1".into());
        let time =
            presets::time_profile(&time_spec)
                .map_err(|e| prefix_field("[problem].source_time", e))?;
        SourceTerm::separable(profile, time, epsilon)
            .map_err(|e| field_err("[problem].epsilon", e))?
    };

    let mut mlf = MlfConfig::default();
    if let Some(v) = tol.series_tol {
        mlf.series_tol = v;
    }
    if let Some(v) = tol.series_kmax {
        mlf.series_kmax = v;
    }
    if let Some(v) = tol.z_switch {
        mlf.z_switch = v;
    }
    if let Some(v) = tol.contour_nodes {
        mlf.contour_nodes = v;
    }
    if let Some(v) = tol.talbot_nodes {
        mlf.talbot_nodes = v;
    }
    let mut solve = SolveConfig { mlf, ..SolveConfig::default() };
    if let Some(v) = tol.conv_panels {
        solve.conv_panels = v;
    }
    if let Some(v) = tol.conv_tol {
        solve.conv_tol = v;
    }

    let grid_spec = common.grid.clone().or(exp.grid).unwrap_or_else(|| "geometric".into());
    let grid = match grid_spec.as_str() {
        "uniform" => GridKind::Uniform,
        "geometric" => GridKind::Geometric,
        other => {
            return Err(field_err(
                "[experiment].grid",
                format!("`{other}` is not \"uniform\" or \"geometric\""),
            ))
        }
    };
    let n_times = common.n_times.or(exp.n_times).unwrap_or(33);
    if n_times < 5 {
        return Err(field_err("[experiment].n_times", "needs at least 5 output times"));
    }
    let t_min = exp.t_min.unwrap_or(horizon * 1e-3);
    if !(t_min > 0.0 && t_min < horizon) {
        return Err(field_err(
            "[experiment].t_min",
            format!("must lie in (0, horizon), got {t_min}"),
        ));
    }

    let knobs = Knobs {
        kmax: exp.kmax.unwrap_or_else(|| op.n_modes().min(32)),
        illposed_eps: exp.illposed_eps.unwrap_or(0.1),
        stability_eps: exp.stability_eps.unwrap_or(0.5),
        b0: exp.b0.unwrap_or(1.0),
        cases: exp.cases.unwrap_or(50),
        noise: exp.noise.unwrap_or(0.0),
        noise_mode: exp.noise_mode.unwrap_or(0),
        grid,
        n_times,
        t_min,
        base_steps: exp.base_steps.unwrap_or(160),
        levels: exp.levels.unwrap_or(3),
        roundtrip_tol: tol.roundtrip_tol.unwrap_or(1e-6),
        reforward_tol: tol.reforward_tol.unwrap_or(1e-8),
        slope_tol: tol.slope_tol.unwrap_or(0.05),
        sweep_tol: tol.sweep_tol.unwrap_or(1e-8),
        growth_tol: tol.growth_tol.unwrap_or(0.10),
        residual_margin: tol.residual_margin.unwrap_or(0.2),
        kernel_tol: tol.kernel_tol.unwrap_or(1e-10),
        erfc_tol: tol.erfc_tol.unwrap_or(1e-8),
        oracle_tol: tol.oracle_tol.unwrap_or(1e-8),
        asym_tol: tol.asym_tol.unwrap_or(1e-4),
        asym_slope_tol: tol.asym_slope_tol.unwrap_or(0.3),
        semigroup_tol: tol.semigroup_tol.unwrap_or(1e-8),
    };

    let outdir = common
        .outdir
        .clone()
        .or_else(|| std::env::var_os(OUTDIR_ENV).map(PathBuf::from))
        .or_else(|| output.outdir.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let seed = common.seed.or(exp.seed).unwrap_or(42);

    Ok(ExperimentConfig {
        op,
        orders,
        horizon,
        initial,
        final_data,
        source,
        epsilon,
        solve,
        knobs,
        outdir,
        seed,
    })
}

impl ExperimentConfig {
    /// Output times for trajectory runs: either uniform including t = 0 or
    /// one zero node followed by a geometric ramp (dense near 0, where the
    /// solution loses smoothness).
    pub fn output_times(&self) -> CliResult<Vec<f64>> {
        match self.knobs.grid {
            GridKind::Uniform => {
                let n = self.knobs.n_times;
                Ok((0..n).map(|i| self.horizon * i as f64 / (n - 1) as f64).collect())
            }
            GridKind::Geometric => {
                let mut times = vec![0.0];
                times.extend(geometric_grid(
                    self.knobs.t_min,
                    self.horizon,
                    self.knobs.n_times - 1,
                )?);
                Ok(times)
            }
        }
    }

    /// Operator resized to at least `k` Dirichlet modes (mode sweeps may
    /// exceed the configured count).
    pub fn op_with_at_least(&self, k: usize) -> CliResult<DiagonalOperator> {
        if k <= self.op.n_modes() {
            return Ok(self.op.clone());
        }
        if self.op.basis() != BasisKind::DirichletLaplacian1D {
            return Err(CliError::Config(format!(
                "[experiment].kmax: {k} exceeds the {} explicit eigenvalues",
                self.op.n_modes()
            )));
        }
        Ok(DiagonalOperator::dirichlet_laplacian_1d(k)?)
    }
}
