use clap::{Args, Subcommand};
use ibc_core::dirichlet_box::{box_ground_kappa, box_ground_secular, box_level_function, box_positive_levels, BoxSpec, TraceFormula};
use ibc_core::multi_source::{coulomb_slope, ground_state_multi, interaction_energy, secular_sum, Source};
use ibc_core::single_source::{ground_state, Coupling};
use ibc_core::Complex64;
use serde_json::json;

use super::parse_complex;
use crate::error::CliError;
use crate::output::{num, Csv, Report};

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[command(subcommand)]
    figure: Figure,
}

#[derive(Debug, Subcommand)]
enum Figure {
    /// Ground-state energy of two sources against their separation R.
    TwoSourceEnergy(TwoSourceArgs),
    /// Box ground-state energy against the source position l1.
    BoxGroundVsPosition(BoxGroundArgs),
    /// Exact spectral staircase of a box against its orbit expansion.
    Staircase(StaircaseArgs),
}

#[derive(Debug, Args)]
struct TwoSourceArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    c1: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    c2: Complex64,
    /// Number of log-spaced separations in [1e-3, r-max], after R = 0.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 50.0)]
    r_max: f64,
}

#[derive(Debug, Args)]
struct BoxGroundArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    c: Complex64,
    /// Box lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0, 10.0])]
    lengths: Vec<f64>,
    /// Interior source positions per box; odd counts include the midpoint.
    #[arg(long, default_value_t = 199)]
    points: usize,
}

#[derive(Debug, Args)]
struct StaircaseArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "20")]
    c: Complex64,
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    /// Distance from the left wall to the source.
    #[arg(long, default_value_t = 0.5)]
    l1: f64,
    /// Number of shortest orbits kept in the expansion.
    #[arg(long, default_value_t = 2855)]
    orbits: usize,
    #[arg(long, default_value_t = 1000.0)]
    e_max: f64,
    #[arg(long, default_value_t = 2000)]
    points: usize,
}

fn positive(value: f64, name: &str) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{name} must be positive, got {value}")))
    }
}

fn two_source(args: &TwoSourceArgs) -> Result<Report, CliError> {
    positive(args.r_max, "--r-max")?;
    if args.r_max <= 1e-3 || args.points < 2 {
        return Err(CliError::Input("need --r-max > 1e-3 and --points >= 2".into()));
    }
    let e0 = interaction_energy(args.c1, args.c2, 0.0)?;
    let slope = coulomb_slope(args.c1, args.c2);
    let ratio = (args.r_max / 1e-3).ln() / (args.points - 1) as f64;
    let mut radii = vec![0.0];
    radii.extend((0..args.points).map(|i| 1e-3 * (ratio * i as f64).exp()));

    let mut csv = Csv::new(&["R", "E", "E_linear"]);
    let (mut rs, mut es, mut lin) = (Vec::new(), Vec::new(), Vec::new());
    let mut max_residual: f64 = 0.0;
    for &r in &radii {
        let e = if r == 0.0 {
            e0
        } else {
            let sources = [Source::new(0.0, args.c1), Source::new(r, args.c2)];
            let g = ground_state_multi(&sources)?;
            let cube = 2.0 * g.kappa.powi(3);
            max_residual = max_residual.max((cube - secular_sum(&sources, g.kappa)).abs() / cube);
            g.energy
        };
        let e_lin = e0 + slope * r;
        csv.row(&[num(r), num(e), num(e_lin)]);
        rs.push(r);
        es.push(e);
        lin.push(e_lin);
    }
    csv.comment(&format!("max_secular_residual {}", num(max_residual)));
    let json = json!({
        "figure": "two-source-energy",
        "c1": [args.c1.re, args.c1.im],
        "c2": [args.c2.re, args.c2.im],
        "slope_at_zero": slope,
        "max_secular_residual": max_residual,
        "R": rs,
        "E": es,
        "E_linear": lin,
    });
    Ok(Report::new(csv.finish(), json))
}

fn box_ground(args: &BoxGroundArgs) -> Result<Report, CliError> {
    let coupling = Coupling::new(args.c)?;
    if args.points == 0 || args.lengths.is_empty() {
        return Err(CliError::Input("need --points >= 1 and at least one length".into()));
    }
    let limit = ground_state(&coupling).energy;
    let mut csv = Csv::new(&["l1", "E_exact", "E_smallbox", "E_limit"]);
    let mut series = Vec::new();
    let mut max_residual: f64 = 0.0;
    for &l in &args.lengths {
        positive(l, "box length")?;
        csv.comment(&format!("l = {}", num(l)));
        let (mut l1s, mut exact, mut small) = (Vec::new(), Vec::new(), Vec::new());
        for i in 1..=args.points {
            let l1 = l * i as f64 / (args.points + 1) as f64;
            let spec = BoxSpec::new(l1, l - l1, coupling)?;
            let kappa = box_ground_kappa(&spec);
            max_residual = max_residual.max(box_ground_secular(&spec, kappa).abs() / kappa.powi(3));
            let e = -kappa * kappa;
            let e_small = -coupling.modulus_sq() * l1 * (l - l1) / l;
            csv.row(&[num(l1), num(e), num(e_small), num(limit)]);
            l1s.push(l1);
            exact.push(e);
            small.push(e_small);
        }
        series.push(json!({ "l": l, "l1": l1s, "E_exact": exact, "E_smallbox": small }));
    }
    let json = json!({
        "figure": "box-ground-vs-position",
        "c": [args.c.re, args.c.im],
        "E_limit": limit,
        "max_secular_residual": max_residual,
        "boxes": series,
    });
    Ok(Report::new(csv.finish(), json))
}

fn staircase(args: &StaircaseArgs) -> Result<Report, CliError> {
    positive(args.e_max, "--e-max")?;
    if args.points == 0 {
        return Err(CliError::Input("--points must be at least 1".into()));
    }
    let spec = BoxSpec::new(args.l1, args.l - args.l1, Coupling::new(args.c)?)?;
    let levels = box_positive_levels(&spec, args.e_max)?;
    let trace = TraceFormula::new(&spec, args.orbits);
    let level_residual = levels.iter().map(|&e| box_level_function(&spec, e.sqrt()).abs() / e.powf(1.5)).fold(0.0, f64::max);
    let mut csv = Csv::new(&["E", "N_exact", "N_trace"]);
    csv.comment("N_exact counts the bound state together with the positive levels");
    let (mut es, mut exact, mut approx) = (Vec::new(), Vec::new(), Vec::new());
    for i in 1..=args.points {
        let e = args.e_max * i as f64 / args.points as f64;
        let n = 1 + levels.iter().filter(|&&x| x <= e).count();
        let t = trace.evaluate(e);
        csv.row(&[num(e), n.to_string(), num(t)]);
        es.push(e);
        exact.push(n);
        approx.push(t);
    }
    let json = json!({
        "figure": "staircase",
        "c": [args.c.re, args.c.im],
        "l": args.l,
        "l1": args.l1,
        "orbits": trace.orbits.len(),
        "levels": levels,
        "max_level_residual": level_residual,
        "E": es,
        "N_exact": exact,
        "N_trace": approx,
    });
    Ok(Report::new(csv.finish(), json))
}

pub fn run(args: &FigureArgs) -> Result<Report, CliError> {
    match &args.figure {
        Figure::TwoSourceEnergy(a) => two_source(a),
        Figure::BoxGroundVsPosition(a) => box_ground(a),
        Figure::Staircase(a) => staircase(a),
    }
}
