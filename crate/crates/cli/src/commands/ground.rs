use std::path::PathBuf;

use clap::Args;
use ibc_core::dirichlet_box::{box_ground_kappa, box_ground_secular, box_ground_weights, BoxSpec};
use ibc_core::multi_source::{ground_state_multi, Source};
use ibc_core::single_source::{ground_state, ground_state_massive, Coupling, SectorState, Side};
use ibc_core::Complex64;
use serde_json::json;

use super::{parse_complex, parse_pair, parse_source, Variant};
use crate::error::CliError;
use crate::output::{num, Csv, Report};

#[derive(Debug, Args)]
pub struct GroundArgs {
    /// Coupling constant as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    c: Complex64,
    /// Rest energy of the created particle.
    #[arg(long)]
    mass: Option<f64>,
    /// Source as `position,re[,im]`; repeat for several sources.
    #[arg(long = "source", value_parser = parse_source, allow_hyphen_values = true)]
    sources: Vec<Source>,
    /// Dirichlet box `l1,l2`: walls at distance l1 left and l2 right of the source.
    #[arg(long = "box", value_parser = parse_pair)]
    dirichlet_box: Option<(f64, f64)>,
    /// Graph config file; the lowest eigenvalue is reported.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    variant: Variant,
}

struct Ground {
    target: &'static str,
    kappa: f64,
    energy: f64,
    weights: (f64, f64),
    residual: f64,
    residual_kind: &'static str,
}

fn line(c: Complex64, mass: Option<f64>) -> Result<Ground, CliError> {
    let coupling = Coupling::new(c)?;
    let (g, target) = match mass {
        Some(m) => (ground_state_massive(&coupling, m)?, "massive"),
        None => (ground_state(&coupling), "line"),
    };
    let jump = g.phi1_derivative(0.0, Side::Right) - g.phi1_derivative(0.0, Side::Left);
    let residual = (jump - c * g.phi0).norm() / c.norm();
    Ok(Ground { target, kappa: g.kappa, energy: g.energy, weights: g.weights(), residual, residual_kind: "ibc_jump_relative" })
}

fn multi(sources: &[Source]) -> Result<Ground, CliError> {
    let g = ground_state_multi(sources)?;
    if let Some(w) = &g.warning {
        eprintln!("warning: {w}");
    }
    let residual = sources
        .iter()
        .enumerate()
        .map(|(i, s)| (g.derivative_jump(i) - s.coupling * g.phi0).norm() / s.coupling.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(Ground { target: "multi", kappa: g.kappa, energy: g.energy, weights: g.weights(), residual, residual_kind: "ibc_jump_relative" })
}

fn dirichlet_box(c: Complex64, (l1, l2): (f64, f64)) -> Result<Ground, CliError> {
    let spec = BoxSpec::new(l1, l2, Coupling::new(c)?)?;
    let kappa = box_ground_kappa(&spec);
    let residual = box_ground_secular(&spec, kappa).abs() / kappa.powi(3);
    Ok(Ground {
        target: "box",
        kappa,
        energy: -kappa * kappa,
        weights: box_ground_weights(&spec),
        residual,
        residual_kind: "secular_relative",
    })
}

fn graph(path: &PathBuf, variant: Variant) -> Result<Ground, CliError> {
    let g = super::graph::load(path)?;
    let lo = super::graph::energy_floor(&g, variant);
    let s = ibc_core::graph::graph_spectrum(&g, lo, -1e-12, variant.core())?;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    let energy = *s.levels.first().ok_or(ibc_core::IbcError::NoBoundState)?;
    let state = ibc_core::graph::graph_eigenstate(&g, energy, variant.core())?;
    let (cont, ibc) = state.residuals(&g);
    Ok(Ground {
        target: "graph",
        kappa: (-energy).sqrt(),
        energy,
        weights: state.weights()?,
        residual: cont.max(ibc),
        residual_kind: "vertex_conditions",
    })
}

pub fn run(args: &GroundArgs) -> Result<Report, CliError> {
    let exclusive = [args.mass.is_some(), !args.sources.is_empty(), args.dirichlet_box.is_some(), args.graph.is_some()];
    if exclusive.iter().filter(|&&b| b).count() > 1 {
        return Err(CliError::Input("choose at most one of --mass, --source, --box, --graph".into()));
    }
    let g = if let Some(path) = &args.graph {
        graph(path, args.variant)?
    } else if !args.sources.is_empty() {
        multi(&args.sources)?
    } else if let Some(lengths) = args.dirichlet_box {
        dirichlet_box(args.c, lengths)?
    } else {
        line(args.c, args.mass)?
    };
    let mut csv = Csv::new(&["target", "kappa", "energy", "weight_vacuum", "weight_particle", "residual"]);
    csv.row(&[g.target.to_string(), num(g.kappa), num(g.energy), num(g.weights.0), num(g.weights.1), num(g.residual)]);
    let json = json!({
        "target": g.target,
        "kappa": g.kappa,
        "energy": g.energy,
        "weight_vacuum": g.weights.0,
        "weight_particle": g.weights.1,
        "residual": { "kind": g.residual_kind, "value": g.residual },
        "normalisation_residual": (g.weights.0 + g.weights.1 - 1.0).abs(),
    });
    Ok(Report::new(csv.finish(), json))
}
