use std::path::{Path, PathBuf};

use clap::Args;
use ibc_core::graph::{graph_eigenstate, graph_spectrum, MetricGraph};
use ibc_core::IbcError;
use serde_json::json;

use super::Variant;
use crate::config::parse_graph;
use crate::error::CliError;
use crate::output::{num, Csv, Report};

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph config file (`vertex <id> <c_re> <c_im> [dirichlet|kirchhoff]`,
    /// `edge <j> <k> <length>`).
    config: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    variant: Variant,
    /// Lower end of the energy window; defaults to a bound below the ground state.
    #[arg(long, allow_hyphen_values = true)]
    e_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 100.0)]
    e_max: f64,
    /// Also report vacuum/particle weights and vertex residuals per level.
    #[arg(long)]
    eigenstates: bool,
}

pub fn load(path: &Path) -> Result<MetricGraph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

/// Lower bound on the spectrum from the quadratic form.
///
/// Each vertex term is bounded by `|c|(δ|φ⁰|² + |φ(v)|²/δ)` and
/// `|φ(v)|² ≤ (2/a)‖φ‖² + 2a‖φ′‖²` on the first `a ≤ l/2` of its longest
/// edge. With `2a|c| ≤ δ` the kinetic term absorbs the derivative, leaving
/// `E ≥ -max(δ Σ|c|, max 2|c|/(δa))` (`max |c|` in place of the sum when each
/// vertex has its own vacuum). The best `δ` on a log grid is used.
pub fn energy_floor(graph: &MetricGraph, variant: Variant) -> f64 {
    let charged: Vec<(f64, f64)> = graph
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.coupling.norm() > 0.0)
        .map(|(j, v)| {
            let l = graph.edges().iter().filter(|e| e.from == j || e.to == j).map(|e| e.length).fold(0.0, f64::max);
            (v.coupling.norm(), l)
        })
        .collect();
    if charged.is_empty() {
        return -1.0;
    }
    let vacuum_scale = match variant {
        Variant::Shared => charged.iter().map(|&(c, _)| c).sum::<f64>(),
        Variant::Trapped => charged.iter().map(|&(c, _)| c).fold(0.0, f64::max),
    };
    let bound = |delta: f64| {
        let particle = charged
            .iter()
            .map(|&(c, l)| 2.0 * c / (delta * (l / 2.0).min(delta / (2.0 * c))))
            .fold(0.0, f64::max);
        (delta * vacuum_scale).max(particle)
    };
    let best = (-400..=400).map(|i| bound(10f64.powf(i as f64 / 40.0))).fold(f64::INFINITY, f64::min);
    -1.05 * best - 1e-6
}

pub fn run(args: &GraphArgs) -> Result<Report, CliError> {
    let graph = load(&args.config)?;
    let e_min = args.e_min.unwrap_or_else(|| energy_floor(&graph, args.variant));
    let spectrum = graph_spectrum(&graph, e_min, args.e_max, args.variant.core())?;
    for w in &spectrum.warnings {
        eprintln!("warning: {w}");
    }

    let mut header = vec!["variant", "index", "energy"];
    if args.eigenstates {
        header.extend(["multiplicity", "weight_vacuum", "weight_particle", "continuity_residual", "ibc_residual"]);
    }
    let mut csv = Csv::new(&header);
    csv.comment(&format!("window [{}, {}]", num(e_min), num(args.e_max)));
    csv.comment(&format!("max_imag_ratio {}", num(spectrum.max_imag_ratio)));
    for w in &spectrum.warnings {
        csv.comment(&format!("warning: {w}"));
    }

    let mut levels = Vec::new();
    for (i, &e) in spectrum.levels.iter().enumerate() {
        let mut fields = vec![args.variant.tag().to_string(), i.to_string(), num(e)];
        let mut entry = json!({ "index": i, "energy": e });
        if args.eigenstates {
            match graph_eigenstate(&graph, e, args.variant.core()) {
                Ok(state) => {
                    let (w0, w1) = state.weights()?;
                    let (cont, ibc) = state.residuals(&graph);
                    fields.extend(["1".to_string(), num(w0), num(w1), num(cont), num(ibc)]);
                    entry["multiplicity"] = json!(1);
                    entry["weight_vacuum"] = json!(w0);
                    entry["weight_particle"] = json!(w1);
                    entry["continuity_residual"] = json!(cont);
                    entry["ibc_residual"] = json!(ibc);
                }
                Err(IbcError::DegenerateNullspace(n)) => {
                    fields.extend([n.to_string(), String::new(), String::new(), String::new(), String::new()]);
                    entry["multiplicity"] = json!(n);
                }
                Err(e) => return Err(e.into()),
            }
        }
        csv.row(&fields);
        levels.push(entry);
    }

    let json = json!({
        "variant": args.variant.tag(),
        "window": [e_min, args.e_max],
        "levels": levels,
        "warnings": spectrum.warnings,
        "max_imag_ratio": spectrum.max_imag_ratio,
    });
    Ok(Report::new(csv.finish(), json))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ibc_core::graph::build_graph;
    use ibc_core::Complex64;

    #[test]
    fn floor_lies_below_ground_state() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let cases = [
            build_graph(&[(0, 1, 0.05), (1, 2, 3.0), (2, 0, 1.0)], &[c(5.0), c(0.0), c(-2.0)]).unwrap(),
            build_graph(&[(0, 1, 10.0), (0, 2, 10.0), (0, 3, 10.0)], &[c(3.0), c(0.0), c(0.0), c(0.0)]).unwrap(),
        ];
        for g in &cases {
            for v in [Variant::Shared, Variant::Trapped] {
                let floor = energy_floor(g, v);
                let s = graph_spectrum(g, 2.0 * floor, -1e-9, v.core()).unwrap();
                assert!(s.levels[0] > floor, "{} vs {floor}", s.levels[0]);
            }
        }
    }
}
