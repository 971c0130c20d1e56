//! One test per acceptance criterion, at the stated tolerances. Each prints
//! a single ACCEPTANCE verdict line (visible with --nocapture or on
//! failure) before asserting.

use std::path::PathBuf;
use std::process::Command;

use fractoback::checks::run_check;
use fractoback::commands::{
    illposed_pipeline, roundtrip_pipeline, stability_pipeline, two_sided_pipeline,
};
use fractoback::config::{self, CommonArgs};

fn default_cfg() -> config::ExperimentConfig {
    config::load(&CommonArgs::default()).expect("default config")
}

fn cfg_with_modes(n: usize) -> config::ExperimentConfig {
    let args = CommonArgs { modes: Some(n), ..CommonArgs::default() };
    config::load(&args).expect("config")
}

fn gate(number: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {number} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_single_term_reduction() {
    let outcome = run_check("kernel", &default_cfg()).expect("kernel check");
    gate(1, "single-term reduction", outcome.pass, &outcome.details.join("; "));
}

#[test]
fn criterion_02_asymptotic_validity() {
    let outcome = run_check("asymptotic", &default_cfg()).expect("asymptotic check");
    gate(2, "asymptotic expansion", outcome.pass, &outcome.details.join("; "));
}

#[test]
fn criterion_03_oracle_agreement() {
    let outcome = run_check("oracle", &default_cfg()).expect("oracle check");
    gate(3, "Laplace-inversion oracle", outcome.pass, &outcome.details.join("; "));
}

#[test]
fn criterion_04_classical_limit() {
    let outcome = run_check("semigroup", &default_cfg()).expect("semigroup check");
    gate(4, "classical limit", outcome.pass, &outcome.details.join("; "));
}

#[test]
fn criterion_05_residual_convergence() {
    let outcome = run_check("residual", &default_cfg()).expect("residual check");
    gate(5, "discrete residual order", outcome.pass, &outcome.details.join("; "));
}

#[test]
fn criterion_06_backward_roundtrip() {
    let args = CommonArgs {
        modes: Some(32),
        initial: Some("poly".into()),
        source_profile: Some("mode:1".into()),
        source_time: Some("const:0.5".into()),
        ..CommonArgs::default()
    };
    let cfg = config::load(&args).expect("config");
    let outcome = roundtrip_pipeline(&cfg).expect("roundtrip");
    gate(
        6,
        "backward round trip",
        outcome.pass,
        &format!(
            "recon rel err {:.3e} (tol 1e-6), re-forward {:.3e} (tol 1e-8)",
            outcome.rel_err, outcome.reforward_err
        ),
    );
}

#[test]
fn criterion_07_illposedness() {
    let outcome = illposed_pipeline(&default_cfg(), 0.1, 32).expect("illposed sweep");
    gate(
        7,
        "ill-posedness sweep",
        outcome.pass,
        &format!(
            "slope {:.4} on k in [{}, 32] (want 1 +/- 0.05), data norms decreasing {}, recon norms increasing {}",
            outcome.window.slope,
            outcome.window_lo,
            outcome.window.data_norms_decreasing,
            outcome.window.recon_norms_increasing
        ),
    );
}

#[test]
fn criterion_08_two_sided_stability() {
    let outcome = two_sided_pipeline(&cfg_with_modes(32), 100).expect("two-sided family");
    gate(
        8,
        "two-sided ratio interval",
        outcome.pass,
        &format!(
            "[{:.4}, {:.4}] at N=32 vs [{:.4}, {:.4}] at N=64, endpoints moved {:.2}% (< 10%)",
            outcome.lo_base,
            outcome.hi_base,
            outcome.lo_doubled,
            outcome.hi_doubled,
            outcome.max_change * 100.0
        ),
    );
}

#[test]
fn criterion_09_conditional_stability() {
    let outcome = stability_pipeline(&cfg_with_modes(32), 0.5, 1.0, 50).expect("stability family");
    gate(
        9,
        "conditional stability",
        outcome.pass,
        &format!(
            "sup Q {:.4}, sweep deviation {:.3e} (tol 1e-8), doubling growth {:.2}% (< 10%)",
            outcome.sup_base,
            outcome.sweep_max_deviation,
            outcome.growth * 100.0
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_fractoback");
    let base = std::env::temp_dir().join(format!("fractoback-det-{}", std::process::id()));
    let run = |dir: &PathBuf| {
        std::fs::create_dir_all(dir).expect("outdir");
        for args in [
            vec!["illposed-demo", "--T", "1", "--eps", "0.1", "--kmax", "32"],
            vec!["backward", "--modes", "16", "--two-sided-family", "20", "--seed", "7"],
            vec!["forward", "--initial", "gauss", "--n-times", "9"],
        ] {
            let status = Command::new(bin)
                .args(&args)
                .arg("--outdir")
                .arg(dir)
                .output()
                .expect("spawn");
            assert!(
                status.status.success(),
                "{args:?} failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
        }
    };
    let (d1, d2) = (base.join("run1"), base.join("run2"));
    run(&d1);
    run(&d2);
    let mut compared = 0;
    let mut identical = true;
    let mut detail = String::new();
    for entry in std::fs::read_dir(&d1).expect("read run1") {
        let name = entry.expect("entry").file_name();
        if !name.to_string_lossy().ends_with(".csv") {
            continue;
        }
        compared += 1;
        let a = std::fs::read(d1.join(&name)).expect("read a");
        let b = std::fs::read(d2.join(&name)).expect("read b");
        if a != b {
            identical = false;
            detail = format!("{} differs between reruns", name.to_string_lossy());
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    gate(
        10,
        "rerun determinism",
        compared >= 4 && identical,
        &if identical { format!("{compared} CSV files byte-identical across reruns") } else { detail },
    );
}
