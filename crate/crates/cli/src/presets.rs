//! Named initial-data and source presets so configs stay short.

use std::f64::consts::PI;

use fractoback_core::spectral::BasisKind;
use fractoback_core::{project, uniform_grid, DiagonalOperator, SpectralVector, TimeFn};

use crate::error::{CliError, CliResult};

pub const LISTING: &[(&str, &str)] = &[
    ("mode:<k>", "initial data: unit coefficient on eigenmode k (1-based)"),
    ("poly", "initial data: projection of x(pi-x) onto the first N modes (Dirichlet basis)"),
    ("gauss", "initial data: projection of a Gaussian bump at pi/2 (Dirichlet basis)"),
    ("coeffs:<c1,c2,...>", "initial data: explicit coefficients, zero-padded to N modes"),
    ("zero", "source profile: no source term"),
    ("const:<c>", "time profile: h(t) = c"),
    ("poly:<c0,c1,...>", "time profile: h(t) = c0 + c1*t + ..."),
    ("exp:<a>,<r>", "time profile: h(t) = a*exp(r*t)"),
];

fn parse_floats(field: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{field}: `{s}` is not a number")))
        })
        .collect()
}

/// Resolve an initial-data preset ("mode:2", "poly", "gauss",
/// "coeffs:1,0.5") against an operator.
pub fn initial_data(spec: &str, op: &DiagonalOperator) -> CliResult<SpectralVector> {
    let n = op.n_modes();
    if let Some(k_text) = spec.strip_prefix("mode:") {
        let k: usize = k_text
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("preset mode:<k>: `{k_text}` is not an integer")))?;
        return SpectralVector::unit(n, k)
            .map_err(|e| CliError::Config(format!("preset {spec}: {e}")));
    }
    if let Some(c_text) = spec.strip_prefix("coeffs:") {
        let mut coeffs = parse_floats("preset coeffs", c_text)?;
        if coeffs.len() > n {
            return Err(CliError::Config(format!(
                "preset coeffs: {} values but the operator has {n} modes",
                coeffs.len()
            )));
        }
        coeffs.resize(n, 0.0);
        return SpectralVector::new(coeffs).map_err(|e| CliError::Config(e.to_string()));
    }
    match spec {
        "poly" => projected(op, |x| x * (PI - x)),
        "gauss" => {
            let sigma: f64 = 0.4;
            projected(op, move |x| (-(x - PI / 2.0).powi(2) / (2.0 * sigma * sigma)).exp())
        }
        other => Err(CliError::Config(format!(
            "unknown initial-data preset `{other}` (see list-presets)"
        ))),
    }
}

fn projected(op: &DiagonalOperator, f: impl Fn(f64) -> f64) -> CliResult<SpectralVector> {
    if op.basis() != BasisKind::DirichletLaplacian1D {
        return Err(CliError::Config(
            "function presets need the dirichlet1d basis; use coeffs:<...> instead".into(),
        ));
    }
    // dense enough that aliasing of the smooth profile is below 1e-9
    let n_samples = (4 * op.n_modes() + 1).max(2049);
    let grid = uniform_grid(n_samples)?;
    let samples: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    Ok(project(op, &samples)?)
}

/// Resolve a time-profile preset ("const:2", "poly:0,1", "exp:1,-0.5").
pub fn time_profile(spec: &str) -> CliResult<TimeFn> {
    if let Some(c) = spec.strip_prefix("const:") {
        let v = parse_floats("preset const", c)?;
        if v.len() != 1 {
            return Err(CliError::Config("preset const:<c> takes one number".into()));
        }
        return Ok(TimeFn::Constant(v[0]));
    }
    if let Some(c) = spec.strip_prefix("poly:") {
        return Ok(TimeFn::Poly(parse_floats("preset poly", c)?));
    }
    if let Some(c) = spec.strip_prefix("exp:") {
        let v = parse_floats("preset exp", c)?;
        if v.len() != 2 {
            return Err(CliError::Config("preset exp:<a>,<r> takes two numbers".into()));
        }
        return Ok(TimeFn::Exp { amplitude: v[0], rate: v[1] });
    }
    Err(CliError::Config(format!(
        "unknown time-profile preset `{spec}` (see list-presets)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_listed_initial_preset_resolves() {
        let op = DiagonalOperator::dirichlet_laplacian_1d(8).unwrap();
        for spec in ["mode:1", "mode:8", "poly", "gauss", "coeffs:1,0.5"] {
            assert!(initial_data(spec, &op).is_ok(), "{spec}");
        }
        for spec in ["const:1.5", "poly:0,1,2", "exp:1,-0.5"] {
            assert!(time_profile(spec).is_ok(), "{spec}");
        }
    }

    #[test]
    fn poly_preset_matches_the_closed_form_coefficients() {
        // x(pi-x) = sum over odd k of (8/(pi k^3)) sin(kx); normalized
        // coefficients are sqrt(2/pi) * 4 / k^3 for odd k, 0 for even k
        let op = DiagonalOperator::dirichlet_laplacian_1d(16).unwrap();
        let g = initial_data("poly", &op).unwrap();
        let scale = (2.0 / PI).sqrt() * 4.0;
        for (i, &c) in g.coeffs().iter().enumerate() {
            let k = i + 1;
            let want = if k % 2 == 1 { scale / (k * k * k) as f64 } else { 0.0 };
            assert_relative_eq!(c, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn coeffs_preset_pads_and_validates() {
        let op = DiagonalOperator::dirichlet_laplacian_1d(4).unwrap();
        let g = initial_data("coeffs:1,2", &op).unwrap();
        assert_eq!(g.coeffs(), &[1.0, 2.0, 0.0, 0.0]);
        assert!(initial_data("coeffs:1,2,3,4,5", &op).is_err());
        assert!(initial_data("mode:0", &op).is_err());
        assert!(initial_data("nope", &op).is_err());
    }
}
