//! Subcommand implementations. Each experiment computes through the core
//! crate, writes its CSV/JSON artifacts, prints a terminal summary, and
//! returns `CliError::Acceptance` when a gated property fails so the
//! process exits with code 3.

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use fractoback_core::{
    backward_solve_with, conditional_stability_check_with, forward_solve_with, fractional_norm,
    illposedness_demo_with, mlf_eval_with, smoothing_check, two_sided_ratios,
    BackwardProblemSpec, MLArguments, MLParams, PrioriBound, SpectralVector, StabilityCase,
    TrajectoryResult,
};

use crate::checks::{run_check, CheckOutcome, CHECK_NAMES};
use crate::config::{self, CommonArgs, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::presets;
use crate::report::{cell, write_csv, write_json, Header};

#[derive(Args, Debug)]
pub struct MlfEvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Arguments z_1..z_M, comma separated, each <= 0
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub z: Vec<f64>,
    /// First kernel parameter; defaults to rho_1 + 1
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Also write mlf_eval.json to the output directory
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct BackwardArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Additive perturbation applied to one coefficient of the final data
    #[arg(long)]
    pub noise: Option<f64>,
    /// 1-based mode hit by --noise; 0 or omitted means the highest mode
    #[arg(long)]
    pub noise_mode: Option<usize>,
    /// Also run a random family of this size through the two-sided ratio
    /// check, repeated at doubled mode count
    #[arg(long)]
    pub two_sided_family: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct IllposedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Decay exponent of the data family, in (0, 1)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Highest mode of the sweep
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Smoothness index of the a-priori bound
    #[arg(long)]
    pub eps: Option<f64>,
    /// A-priori radius B_0
    #[arg(long)]
    pub b0: Option<f64>,
    /// Family size (the check reruns with twice this many cases)
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// kernel | asymptotic | oracle | semigroup | residual | all
    #[arg(long, default_value = "all")]
    pub check: String,
}

// ---------------------------------------------------------------- mlf-eval

pub fn run_mlf_eval(args: &MlfEvalArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let beta0 = args.beta0.unwrap_or(cfg.orders.rho1() + 1.0);
    let params = MLParams::new_relaxed(beta0, cfg.orders.kernel_exponents())
        .map_err(|e| CliError::Config(format!("--beta0/--rho: {e}")))?;
    let z = MLArguments::new(args.z.clone()).map_err(|e| CliError::Config(format!("--z: {e}")))?;
    let result = mlf_eval_with(&cfg.solve.mlf, &params, &z)?;

    let betas: Vec<String> = params.betas().iter().map(|b| cell(*b)).collect();
    let zs: Vec<String> = z.z().iter().map(|v| cell(*v)).collect();
    println!("E[({}); {}]({}) = {}", betas.join(", "), cell(beta0), zs.join(", "), cell(result.value));
    println!("method: {}", result.method);
    println!("estimated absolute error: {:.3e}", result.est_abs_error);

    if args.json {
        let summary = json!({
            "header": Header::new("mlf-eval", cfg.seed),
            "beta0": beta0,
            "betas": params.betas(),
            "z": z.z(),
            "value": result.value,
            "method": result.method.to_string(),
            "est_abs_error": result.est_abs_error,
        });
        let path = write_json(&cfg.outdir, "mlf_eval.json", &summary)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

// ----------------------------------------------------------------- forward

pub fn run_forward(args: &ForwardArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let times = cfg.output_times()?;
    let traj =
        forward_solve_with(&cfg.solve, &cfg.op, &cfg.orders, &cfg.initial, &cfg.source, &times)?;
    let smoothing =
        smoothing_check(&cfg.op, &cfg.orders, &traj, &cfg.initial, &cfg.source, cfg.epsilon)?;

    let mut headers: Vec<String> = vec!["t".into(), "norm_l2".into(), "norm_graph".into()];
    for k in 1..=cfg.op.n_modes() {
        headers.push(format!("u_{k}"));
    }
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..times.len())
        .map(|i| {
            let mut row = vec![cell(times[i]), cell(traj.norm0[i]), cell(traj.norm1[i])];
            row.extend(traj.states[i].coeffs().iter().map(|c| cell(*c)));
            row
        })
        .collect();
    let csv = write_csv(&cfg.outdir, "forward_trajectory.csv", &header_refs, &rows)?;

    let summary = json!({
        "header": Header::new("forward", cfg.seed),
        "n_modes": cfg.op.n_modes(),
        "orders": cfg.orders.rhos(),
        "weights": cfg.orders.weights(),
        "horizon": cfg.horizon,
        "final_norm_l2": traj.norm0.last(),
        "final_norm_graph": traj.norm1.last(),
        "smoothing": {
            "sup_ratio": smoothing.sup_ratio,
            "early_sup": smoothing.early_sup,
            "late_sup": smoothing.late_sup,
            "pass": smoothing.pass,
        },
    });
    let js = write_json(&cfg.outdir, "forward_summary.json", &summary)?;

    println!(
        "forward: {} modes, {} times on [0, {}], final |u| = {}",
        cfg.op.n_modes(),
        times.len(),
        cell(cfg.horizon),
        cell(*traj.norm0.last().expect("nonempty")),
    );
    println!(
        "smoothing ratio sup {} (early {} / late {}): {}",
        cell(smoothing.sup_ratio),
        cell(smoothing.early_sup),
        cell(smoothing.late_sup),
        pass_str(smoothing.pass)
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", js.display());
    if !smoothing.pass {
        return Err(CliError::Acceptance(
            "smoothing-estimate ratio grows toward t = 0 beyond the allowed margin".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------- backward

fn final_data_for(cfg: &ExperimentConfig) -> CliResult<(Option<SpectralVector>, SpectralVector)> {
    if let Some(data) = &cfg.final_data {
        return Ok((None, data.clone()));
    }
    let traj = forward_solve_with(
        &cfg.solve,
        &cfg.op,
        &cfg.orders,
        &cfg.initial,
        &cfg.source,
        &[cfg.horizon],
    )?;
    Ok((Some(cfg.initial.clone()), traj.final_state().clone()))
}

pub fn run_backward(args: &BackwardArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let noise = args.noise.unwrap_or(cfg.knobs.noise);
    let noise_mode = args.noise_mode.unwrap_or(cfg.knobs.noise_mode);

    let (phi_true, mut data) = final_data_for(&cfg)?;
    let hit_mode = if noise != 0.0 {
        let m = if noise_mode == 0 { cfg.op.n_modes() } else { noise_mode };
        if m < 1 || m > cfg.op.n_modes() {
            return Err(CliError::Config(format!(
                "--noise-mode: {m} outside 1..={}",
                cfg.op.n_modes()
            )));
        }
        let mut coeffs = data.into_coeffs();
        coeffs[m - 1] += noise;
        data = SpectralVector::new(coeffs)?;
        Some(m)
    } else {
        None
    };

    let spec = BackwardProblemSpec::new(
        cfg.op.clone(),
        cfg.orders.clone(),
        cfg.horizon,
        data.clone(),
        cfg.source.clone(),
    )?;
    let recon = backward_solve_with(&cfg.solve, &spec)?;

    let rows: Vec<Vec<String>> = (0..cfg.op.n_modes())
        .map(|k| {
            vec![
                cell((k + 1) as f64),
                cell(cfg.op.eigenvalues()[k]),
                cell(recon.denominators[k]),
                cell(data.coeffs()[k]),
                cell(recon.phi_hat.coeffs()[k]),
                cell(recon.amplification[k]),
            ]
        })
        .collect();
    let csv = write_csv(
        &cfg.outdir,
        "backward_modes.csv",
        &["k", "lambda", "d_k", "final_coeff", "phi_hat", "amplification"],
        &rows,
    )?;

    let recon_err = match &phi_true {
        Some(phi) => {
            let diff = recon.phi_hat.minus(phi)?;
            let denom = fractional_norm(&cfg.op, phi, 0.0)?;
            Some(fractional_norm(&cfg.op, &diff, 0.0)? / denom)
        }
        None => None,
    };
    let noise_block = hit_mode.map(|m| {
        json!({
            "delta": noise,
            "mode": m,
            "response": noise * recon.amplification[m - 1],
        })
    });
    let summary = json!({
        "header": Header::new("backward", cfg.seed),
        "n_modes": cfg.op.n_modes(),
        "horizon": cfg.horizon,
        "data_generated_by_forward_solve": phi_true.is_some(),
        "recon_norm": recon.diagnostics.recon_norm,
        "final_graph_norm": recon.diagnostics.final_graph_norm,
        "stability_ratio": recon.diagnostics.stability_ratio,
        "max_amplification": recon.diagnostics.max_amplification,
        "recon_rel_err_vs_true": recon_err,
        "noise": noise_block,
    });
    let js = write_json(&cfg.outdir, "backward_summary.json", &summary)?;

    println!(
        "backward: |u(0)| = {}, stability ratio {}, max amplification {}",
        cell(recon.diagnostics.recon_norm),
        cell(recon.diagnostics.stability_ratio),
        cell(recon.diagnostics.max_amplification),
    );
    if let Some(err) = recon_err {
        println!("reconstruction vs the state that generated the data: rel err {err:.3e}");
    }
    if let Some(m) = hit_mode {
        println!(
            "data perturbation {} in mode {m} shifts the reconstruction by {} in that mode (1/D_{m} = {}); no filtering is applied",
            cell(noise),
            cell(noise * recon.amplification[m - 1]),
            cell(recon.amplification[m - 1]),
        );
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", js.display());

    if let Some(n_family) = args.two_sided_family {
        let outcome = two_sided_pipeline(&cfg, n_family)?;
        let rows: Vec<Vec<String>> = (0..n_family)
            .map(|i| {
                vec![
                    cell((i + 1) as f64),
                    cell(outcome.ratios_base[i]),
                    cell(outcome.ratios_doubled[i]),
                ]
            })
            .collect();
        let csv = write_csv(
            &cfg.outdir,
            "two_sided_ratios.csv",
            &["draw", "ratio_base", "ratio_doubled"],
            &rows,
        )?;
        let summary = json!({
            "header": Header::new("backward --two-sided-family", cfg.seed),
            "family": n_family,
            "n_modes_base": cfg.op.n_modes(),
            "interval_base": [outcome.lo_base, outcome.hi_base],
            "interval_doubled": [outcome.lo_doubled, outcome.hi_doubled],
            "max_endpoint_change": outcome.max_change,
            "pass": outcome.pass,
        });
        let js = write_json(&cfg.outdir, "two_sided_summary.json", &summary)?;
        println!(
            "two-sided ratios over {} draws: [{}, {}] at N = {}, [{}, {}] at N = {}; endpoints moved {:.2}%: {}",
            n_family,
            cell(outcome.lo_base),
            cell(outcome.hi_base),
            cfg.op.n_modes(),
            cell(outcome.lo_doubled),
            cell(outcome.hi_doubled),
            2 * cfg.op.n_modes(),
            outcome.max_change * 100.0,
            pass_str(outcome.pass)
        );
        println!("wrote {}", csv.display());
        println!("wrote {}", js.display());
        if !outcome.pass {
            return Err(CliError::Acceptance(
                "two-sided ratio interval is not stable under mode doubling".into(),
            ));
        }
    }
    Ok(())
}

pub struct TwoSidedOutcome {
    pub ratios_base: Vec<f64>,
    pub ratios_doubled: Vec<f64>,
    pub lo_base: f64,
    pub hi_base: f64,
    pub lo_doubled: f64,
    pub hi_doubled: f64,
    /// Largest relative movement of an interval endpoint.
    pub max_change: f64,
    pub pass: bool,
}

fn random_family(seed: u64, count: usize, n_modes: usize) -> Vec<SpectralVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = (0..n_modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
            SpectralVector::new(coeffs).expect("finite coefficients")
        })
        .collect()
}

/// Draw `count` random states band-limited to the configured mode count,
/// record the interval of |u(T)|_1 / |u(0)|, and repeat at doubled mode
/// count: both interval endpoints must move by less than `growth_tol`.
pub fn two_sided_pipeline(cfg: &ExperimentConfig, count: usize) -> CliResult<TwoSidedOutcome> {
    if count < 2 {
        return Err(CliError::Config("--two-sided-family needs at least 2 draws".into()));
    }
    let n = cfg.op.n_modes();
    let op2 = cfg.op_with_at_least(2 * n)?;
    let phis = random_family(cfg.seed, count, n);
    let phis2 = random_family(cfg.seed, count, 2 * n);
    let ratios_base = two_sided_ratios(&cfg.op, &cfg.orders, cfg.horizon, &phis)?;
    let ratios_doubled = two_sided_ratios(&op2, &cfg.orders, cfg.horizon, &phis2)?;
    let bounds = |xs: &[f64]| {
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(0.0f64, f64::max);
        (lo, hi)
    };
    let (lo_base, hi_base) = bounds(&ratios_base);
    let (lo_doubled, hi_doubled) = bounds(&ratios_doubled);
    let max_change = ((lo_doubled - lo_base).abs() / lo_base)
        .max((hi_doubled - hi_base).abs() / hi_base);
    let pass = lo_base > 0.0 && lo_doubled > 0.0 && max_change < cfg.knobs.growth_tol;
    Ok(TwoSidedOutcome {
        ratios_base,
        ratios_doubled,
        lo_base,
        hi_base,
        lo_doubled,
        hi_doubled,
        max_change,
        pass,
    })
}

// --------------------------------------------------------------- roundtrip

pub struct RoundtripOutcome {
    pub rel_err: f64,
    pub reforward_err: f64,
    pub pass: bool,
    pub phi: SpectralVector,
    pub phi_hat: SpectralVector,
}

/// Forward-solve the configured initial state, reconstruct it from the final
/// data, and forward-solve the reconstruction again; both the state error
/// and the re-hit error are gated.
pub fn roundtrip_pipeline(cfg: &ExperimentConfig) -> CliResult<RoundtripOutcome> {
    let phi = cfg.initial.clone();
    let traj: TrajectoryResult =
        forward_solve_with(&cfg.solve, &cfg.op, &cfg.orders, &phi, &cfg.source, &[cfg.horizon])?;
    let data = traj.final_state().clone();
    let spec = BackwardProblemSpec::new(
        cfg.op.clone(),
        cfg.orders.clone(),
        cfg.horizon,
        data.clone(),
        cfg.source.clone(),
    )?;
    let recon = backward_solve_with(&cfg.solve, &spec)?;
    let rel_err = fractional_norm(&cfg.op, &recon.phi_hat.minus(&phi)?, 0.0)?
        / fractional_norm(&cfg.op, &phi, 0.0)?;
    let re = forward_solve_with(
        &cfg.solve,
        &cfg.op,
        &cfg.orders,
        &recon.phi_hat,
        &cfg.source,
        &[cfg.horizon],
    )?;
    let reforward_err = fractional_norm(&cfg.op, &re.final_state().minus(&data)?, 0.0)?
        / fractional_norm(&cfg.op, &data, 0.0)?;
    let pass = rel_err <= cfg.knobs.roundtrip_tol && reforward_err <= cfg.knobs.reforward_tol;
    Ok(RoundtripOutcome { rel_err, reforward_err, pass, phi, phi_hat: recon.phi_hat })
}

pub fn run_roundtrip(args: &RoundtripArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let outcome = roundtrip_pipeline(&cfg)?;
    let rows: Vec<Vec<String>> = (0..cfg.op.n_modes())
        .map(|k| {
            let a = outcome.phi.coeffs()[k];
            let b = outcome.phi_hat.coeffs()[k];
            vec![
                cell((k + 1) as f64),
                cell(cfg.op.eigenvalues()[k]),
                cell(a),
                cell(b),
                cell((a - b).abs()),
            ]
        })
        .collect();
    let csv = write_csv(
        &cfg.outdir,
        "roundtrip_modes.csv",
        &["k", "lambda", "phi", "phi_hat", "abs_err"],
        &rows,
    )?;
    let summary = json!({
        "header": Header::new("roundtrip", cfg.seed),
        "n_modes": cfg.op.n_modes(),
        "horizon": cfg.horizon,
        "rel_err": outcome.rel_err,
        "reforward_err": outcome.reforward_err,
        "rel_err_tol": cfg.knobs.roundtrip_tol,
        "reforward_tol": cfg.knobs.reforward_tol,
        "pass": outcome.pass,
    });
    let js = write_json(&cfg.outdir, "roundtrip.json", &summary)?;
    println!(
        "roundtrip: reconstruction rel err {:.3e} (tol {:.0e}), re-forward rel err {:.3e} (tol {:.0e}): {}",
        outcome.rel_err,
        cfg.knobs.roundtrip_tol,
        outcome.reforward_err,
        cfg.knobs.reforward_tol,
        pass_str(outcome.pass)
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", js.display());
    if !outcome.pass {
        return Err(CliError::Acceptance("roundtrip error above tolerance".into()));
    }
    Ok(())
}

// ------------------------------------------------------------ illposed-demo

pub struct IllposedOutcome {
    /// Full sweep from mode 1, as written to the CSV.
    pub report: fractoback_core::IllposednessReport,
    /// Same sweep restricted to [window_lo, kmax], where the gates live.
    pub window: fractoback_core::IllposednessReport,
    pub window_lo: usize,
    pub pass: bool,
}

/// Vanishing data / exploding reconstruction sweep. The table covers the
/// whole mode range; the monotonicity and slope gates use the tail window
/// [max(2, kmax/4), kmax] where the inversion factor has entered its
/// algebraic regime (the growth statements are asymptotic, and at small
/// eps the first mode sits before the crossover).
pub fn illposed_pipeline(cfg: &ExperimentConfig, eps: f64, kmax: usize) -> CliResult<IllposedOutcome> {
    let op = cfg.op_with_at_least(kmax)?;
    let report =
        illposedness_demo_with(&cfg.solve.mlf, &op, &cfg.orders, cfg.horizon, eps, (1, kmax))?;
    let window_lo = (kmax / 4).max(2);
    let window =
        illposedness_demo_with(&cfg.solve.mlf, &op, &cfg.orders, cfg.horizon, eps, (window_lo, kmax))?;
    let pass = (window.slope - 1.0).abs() <= cfg.knobs.slope_tol
        && window.data_norms_decreasing
        && window.recon_norms_increasing
        && window.graph_norms_increasing;
    Ok(IllposedOutcome { report, window, window_lo, pass })
}

pub fn run_illposed(args: &IllposedArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let eps = args.eps.unwrap_or(cfg.knobs.illposed_eps);
    let kmax = args.kmax.unwrap_or(cfg.knobs.kmax);
    let outcome = illposed_pipeline(&cfg, eps, kmax)?;
    let rep = &outcome.report;

    let rows: Vec<Vec<String>> = (0..rep.ks.len())
        .map(|i| {
            vec![
                cell(rep.ks[i] as f64),
                cell(rep.lambdas[i]),
                cell(rep.data_norms[i]),
                cell(rep.data_graph_norms[i]),
                cell(rep.recon_norms[i]),
                cell(rep.amplification[i]),
            ]
        })
        .collect();
    let csv = write_csv(
        &cfg.outdir,
        "illposed.csv",
        &["k", "lambda", "data_norm", "data_graph_norm", "recon_norm", "amplification"],
        &rows,
    )?;
    let summary = json!({
        "header": Header::new("illposed-demo", cfg.seed),
        "eps": eps,
        "kmax": kmax,
        "horizon": cfg.horizon,
        "slope_all": rep.slope,
        "slope_window": outcome.window.slope,
        "window": [outcome.window_lo, kmax],
        "window_data_norms_decreasing": outcome.window.data_norms_decreasing,
        "window_recon_norms_increasing": outcome.window.recon_norms_increasing,
        "window_graph_norms_increasing": outcome.window.graph_norms_increasing,
        "full_recon_norms_increasing": rep.recon_norms_increasing,
        "pass": outcome.pass,
    });
    let js = write_json(&cfg.outdir, "illposed_summary.json", &summary)?;

    println!(
        "illposed-demo on k in [{}, {kmax}]: data norms decrease ({}), reconstruction norms increase ({})",
        outcome.window_lo,
        outcome.window.data_norms_decreasing,
        outcome.window.recon_norms_increasing
    );
    println!(
        "1/D_k vs lambda_k slope: {:.4} on the window (all modes: {:.4}), want 1 +/- {}: {}",
        outcome.window.slope,
        rep.slope,
        cfg.knobs.slope_tol,
        pass_str(outcome.pass)
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", js.display());
    if !outcome.pass {
        return Err(CliError::Acceptance("instability sweep off its expected profile".into()));
    }
    Ok(())
}

// ---------------------------------------------------- conditional-stability

pub struct StabilityOutcome {
    pub qs_base: Vec<f64>,
    pub qs_doubled: Vec<f64>,
    pub sup_base: f64,
    pub sup_doubled: f64,
    pub growth: f64,
    pub sweep_scales: Vec<f64>,
    pub sweep_max_deviation: f64,
    pub pass: bool,
}

fn stability_family(
    cfg: &ExperimentConfig,
    bound: &PrioriBound,
    count: usize,
) -> CliResult<Vec<StabilityCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.op.n_modes();
    let mut cases = Vec::with_capacity(count);
    for _ in 0..count {
        let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fill: f64 = rng.gen_range(0.2..1.0);
        let raw = SpectralVector::new(coeffs)?;
        let norm = fractional_norm(&cfg.op, &raw, bound.epsilon)?;
        let phi = raw.scaled(bound.b0 * fill / norm);
        cases.push(StabilityCase { phi, source: cfg.source.clone() });
    }
    Ok(cases)
}

/// Random family inside the a-priori ball: every stability quotient must be
/// finite, the quotient must be invariant under joint rescaling of data,
/// source and radius (the estimate is homogeneous of degree one), and the
/// sup must stabilize when the family doubles.
pub fn stability_pipeline(
    cfg: &ExperimentConfig,
    eps: f64,
    b0: f64,
    count: usize,
) -> CliResult<StabilityOutcome> {
    if count < 2 {
        return Err(CliError::Config("--cases needs at least 2".into()));
    }
    let bound = PrioriBound::new(eps, b0)?;
    let sweep_scales = vec![1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];
    // same seed: the doubled family extends the base family draw-for-draw
    let cases = stability_family(cfg, &bound, count)?;
    let cases_doubled = stability_family(cfg, &bound, 2 * count)?;
    let base = conditional_stability_check_with(
        &cfg.solve,
        &cfg.op,
        &cfg.orders,
        cfg.horizon,
        &cases,
        bound,
        &sweep_scales,
    )?;
    let doubled = conditional_stability_check_with(
        &cfg.solve,
        &cfg.op,
        &cfg.orders,
        cfg.horizon,
        &cases_doubled,
        bound,
        &[],
    )?;
    let growth = (doubled.sup_q - base.sup_q) / base.sup_q;
    let pass = base.all_finite
        && doubled.all_finite
        && base.sweep_max_deviation <= cfg.knobs.sweep_tol
        && growth < cfg.knobs.growth_tol;
    Ok(StabilityOutcome {
        qs_base: base.qs,
        qs_doubled: doubled.qs,
        sup_base: base.sup_q,
        sup_doubled: doubled.sup_q,
        growth,
        sweep_scales,
        sweep_max_deviation: base.sweep_max_deviation,
        pass,
    })
}

pub fn run_stability(args: &StabilityArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let eps = args.eps.unwrap_or(cfg.knobs.stability_eps);
    let b0 = args.b0.unwrap_or(cfg.knobs.b0);
    let count = args.cases.unwrap_or(cfg.knobs.cases);
    let outcome = stability_pipeline(&cfg, eps, b0, count)?;

    let rows: Vec<Vec<String>> = (0..outcome.qs_doubled.len())
        .map(|i| {
            vec![
                cell((i + 1) as f64),
                if i < outcome.qs_base.len() { "base".into() } else { "extension".into() },
                cell(outcome.qs_doubled[i]),
            ]
        })
        .collect();
    let csv =
        write_csv(&cfg.outdir, "stability_cases.csv", &["case", "family", "q"], &rows)?;
    let summary = json!({
        "header": Header::new("conditional-stability", cfg.seed),
        "eps": eps,
        "b0": b0,
        "cases": count,
        "sup_q": outcome.sup_base,
        "sup_q_doubled": outcome.sup_doubled,
        "sup_growth": outcome.growth,
        "sweep_scales": outcome.sweep_scales,
        "sweep_max_deviation": outcome.sweep_max_deviation,
        "pass": outcome.pass,
    });
    let js = write_json(&cfg.outdir, "stability_summary.json", &summary)?;

    println!(
        "conditional stability over {count} cases: sup Q = {} (doubled family: {}, growth {:.2}%)",
        cell(outcome.sup_base),
        cell(outcome.sup_doubled),
        outcome.growth * 100.0,
    );
    println!(
        "homogeneity sweep over {:?}: max deviation {:.3e} (tol {:.0e}): {}",
        outcome.sweep_scales,
        outcome.sweep_max_deviation,
        cfg.knobs.sweep_tol,
        pass_str(outcome.pass)
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", js.display());
    if !outcome.pass {
        return Err(CliError::Acceptance(
            "stability quotient not finite, not scale-invariant, or not saturating".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------- validate

pub fn run_validate(args: &ValidateArgs) -> CliResult<()> {
    let cfg = config::load(&args.common)?;
    let names: Vec<&str> = if args.check == "all" {
        CHECK_NAMES.to_vec()
    } else {
        vec![args.check.as_str()]
    };
    let mut failures = Vec::new();
    for name in names {
        let outcome = run_check(name, &cfg)?;
        write_outcome(&cfg, &outcome)?;
        println!("check {}: {}", outcome.name, pass_str(outcome.pass));
        for line in &outcome.details {
            println!("  {line}");
        }
        if !outcome.pass {
            failures.push(outcome.name);
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Acceptance(format!("checks failed: {}", failures.join(", "))));
    }
    Ok(())
}

fn write_outcome(cfg: &ExperimentConfig, outcome: &CheckOutcome) -> CliResult<()> {
    let csv = write_csv(
        &cfg.outdir,
        &format!("validate_{}.csv", outcome.name),
        &outcome.headers,
        &outcome.rows,
    )?;
    let summary = json!({
        "header": Header::new(&format!("validate --check {}", outcome.name), cfg.seed),
        "check": outcome.name,
        "pass": outcome.pass,
        "details": outcome.details,
    });
    let js = write_json(&cfg.outdir, &format!("validate_{}.json", outcome.name), &summary)?;
    println!("wrote {}", csv.display());
    println!("wrote {}", js.display());
    Ok(())
}

// ------------------------------------------------------------ list-presets

pub fn run_list_presets() -> CliResult<()> {
    println!("initial-data and source presets (use with --initial / --source-profile / --source-time):");
    for (name, desc) in presets::LISTING {
        println!("  {name:<22} {desc}");
    }
    Ok(())
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
