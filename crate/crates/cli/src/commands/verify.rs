use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use ibc_core::dirichlet_box::{box_ground_energy, box_positive_levels, BoxSpec};
use ibc_core::oracle::{lattice_spectrum_extrapolated, verify_completeness, verify_orthonormality, LatticeModel};
use ibc_core::single_source::{diffraction_coefficient, flux_balance, ground_state, reflection_amplitude, scattering_state, Coupling};
use ibc_core::Complex64;
use serde_json::json;

use super::parse_complex;
use crate::error::CliError;
use crate::output::{num, Csv, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Orthonormality,
    Completeness,
    Flux,
    Oracle,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Line,
    Box,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    c: Complex64,
    /// Model compared against the lattice oracle; the `all` suite runs both.
    #[arg(long, value_enum, default_value_t = Target::Line)]
    target: Target,
}

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance }
    }

    fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

const WAVENUMBER_PAIRS: [(f64, f64); 4] = [(1.0, 2.0), (0.7, 0.7), (0.3, -4.0), (5.0, 0.2)];
const POSITIONS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 3.0];
const FLUX_WAVENUMBERS: [f64; 8] = [-7.5, -2.0, -0.3, 0.05, 0.4, 1.0, 3.3, 12.0];

fn orthonormality(c: &Coupling) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for (k, kp) in WAVENUMBER_PAIRS {
        let r = verify_orthonormality(c, k, kp)?;
        let tag = format!("k={k},k'={kp}");
        out.push(Check::new(format!("ground_closed_form({tag})"), r.ground_closed_form, 1e-12));
        out.push(Check::new(format!("ground_quadrature({tag})"), r.ground_quadrature, 1e-7));
        out.push(Check::new(format!("scattering_closed_form({tag})"), r.scattering_closed_form, 1e-12));
        out.push(Check::new(format!("scattering_intermediate({tag})"), r.scattering_intermediate, 1e-12));
    }
    Ok(out)
}

fn completeness(c: &Coupling) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for x in POSITIONS {
        let r = verify_completeness(c, x, 0.5)?;
        out.push(Check::new(format!("vacuum(x={x})"), r.vacuum, 1e-10));
        out.push(Check::new(format!("mixed(x={x})"), r.mixed, 1e-7));
        out.push(Check::new(format!("smeared(x={x},y=0.5)"), r.smeared, 1e-5));
    }
    Ok(out)
}

fn flux(c: &Coupling) -> Result<Vec<Check>, CliError> {
    let (mut balance, mut unitarity, mut optical): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in FLUX_WAVENUMBERS {
        let s = scattering_state(c, k);
        // Currents of a δ-normalised state are of order |k|/π.
        balance = balance.max(flux_balance(&s, c).residual / (k.abs() / PI));
        let b = reflection_amplitude(c, k);
        unitarity = unitarity.max(((1.0 + b).norm_sqr() + b.norm_sqr() - 1.0).abs());
        let d = diffraction_coefficient(c, k.abs())?;
        optical = optical.max((d.im + d.norm_sqr() / (2.0 * k.abs())).abs() / d.norm());
    }
    let g = ground_state(c);
    let bound = flux_balance(&g, c).residual;
    Ok(vec![
        Check::new("scattering_flux_balance", balance, 1e-12),
        Check::new("ground_flux_balance", bound, 1e-12),
        Check::new("unitarity", unitarity, 1e-13),
        Check::new("optical_theorem", optical, 1e-13),
    ])
}

/// `2·ceil(half/h)` intervals over `[-half, half]`, so the centre and all
/// refinements stay on the grid.
fn fitted_step(half: f64, h: f64) -> f64 {
    half / (half / h).ceil()
}

fn oracle_line(c: &Coupling) -> Result<Vec<Check>, CliError> {
    let kappa = c.kappa();
    let half = (20.0f64).max(20.0 / kappa).ceil();
    let h = fitted_step(half, (4e-3f64).min(0.1 / kappa));
    let ex = lattice_spectrum_extrapolated(|hh| LatticeModel::line(c, half, hh), h, 1)?;
    let exact = ground_state(c).energy;
    Ok(vec![Check::new("line_ground_relative", (ex[0].value - exact).abs() / exact.abs(), 1e-3)])
}

fn oracle_box(c: &Coupling) -> Result<Vec<Check>, CliError> {
    let spec = BoxSpec::centred(1.0, *c)?;
    let mut expected = vec![box_ground_energy(&spec)];
    expected.extend(box_positive_levels(&spec, 400.0)?.into_iter().take(4));
    let h = fitted_step(0.5, (2e-3f64).min(0.1 / c.kappa()));
    let ex = lattice_spectrum_extrapolated(|hh| LatticeModel::dirichlet_box(&spec, hh), h, expected.len())?;
    Ok(ex
        .iter()
        .zip(&expected)
        .enumerate()
        .map(|(n, (a, b))| Check::new(format!("box_level_{n}_relative"), (a.value - b).abs() / b.abs().max(1.0), 1e-3))
        .collect())
}

pub fn run(args: &VerifyArgs) -> Result<Report, CliError> {
    let c = Coupling::new(args.c)?;
    let mut checks = Vec::new();
    let all = args.suite == Suite::All;
    if all || args.suite == Suite::Orthonormality {
        checks.extend(orthonormality(&c)?);
    }
    if all || args.suite == Suite::Completeness {
        checks.extend(completeness(&c)?);
    }
    if all || args.suite == Suite::Flux {
        checks.extend(flux(&c)?);
    }
    if all || args.suite == Suite::Oracle {
        if all || args.target == Target::Line {
            checks.extend(oracle_line(&c)?);
        }
        if all || args.target == Target::Box {
            checks.extend(oracle_box(&c)?);
        }
    }

    let passed = checks.iter().all(Check::passed);
    let suite = args.suite.to_possible_value().expect("no skipped variants").get_name().to_string();
    let mut csv = Csv::new(&["check", "value", "tolerance", "passed"]);
    for ch in &checks {
        csv.row(&[ch.name.clone(), num(ch.value), num(ch.tolerance), ch.passed().to_string()]);
    }
    let json = json!({
        "suite": suite,
        "coupling": [args.c.re, args.c.im],
        "passed": passed,
        "checks": checks
            .iter()
            .map(|ch| json!({ "name": ch.name, "value": ch.value, "tolerance": ch.tolerance, "passed": ch.passed() }))
            .collect::<Vec<_>>(),
    });
    let mut report = Report::new(csv.finish(), json);
    report.passed = passed;
    Ok(report)
}
