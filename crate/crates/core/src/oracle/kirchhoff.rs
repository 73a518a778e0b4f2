use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::graph::{MetricGraph, VertexCondition};
use crate::numerics::golden_minimize;
use crate::{IbcError, Result};

/// `I - U(k)` on directed bonds, `U_{b'b} = σ_{b'b} e^{ikl_b}` with the
/// Kirchhoff vertex scattering matrix `σ = 2/d - δ` (`-1` at Dirichlet ends).
/// Bond `2e` runs along edge `e`, bond `2e + 1` against it.
pub fn kirchhoff_bond_matrix(graph: &MetricGraph, k: f64) -> DMatrix<Complex64> {
    let edges = graph.edges();
    let nb = 2 * edges.len();
    let head = |b: usize| if b % 2 == 0 { edges[b / 2].to } else { edges[b / 2].from };
    let tail = |b: usize| if b % 2 == 0 { edges[b / 2].from } else { edges[b / 2].to };
    let mut m = DMatrix::<Complex64>::identity(nb, nb);
    for b in 0..nb {
        let v = head(b);
        let phase = Complex64::from_polar(1.0, k * edges[b / 2].length);
        let dirichlet = graph.vertices()[v].condition == VertexCondition::Dirichlet;
        let d = graph.valency(v) as f64;
        for bp in 0..nb {
            if tail(bp) != v {
                continue;
            }
            let back = bp / 2 == b / 2;
            let sigma = if dirichlet { -1.0 } else { 2.0 / d - if back { 1.0 } else { 0.0 } };
            m[(bp, b)] -= sigma * phase;
        }
    }
    m
}

fn smallest_singular(graph: &MetricGraph, k: f64) -> (f64, Vec<f64>) {
    let s: Vec<f64> = kirchhoff_bond_matrix(graph, k).svd(false, false).singular_values.iter().copied().collect();
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    (min, s)
}

/// Positive Kirchhoff eigenvalues up to `e_max`, repeated by multiplicity.
/// Couplings must all vanish.
pub fn kirchhoff_levels(graph: &MetricGraph, e_max: f64) -> Result<Vec<f64>> {
    if graph.vertices().iter().any(|v| v.coupling.norm() != 0.0) {
        return Err(IbcError::InvalidGraph("Kirchhoff oracle needs zero couplings".into()));
    }
    if graph.num_edges() == 0 || !(e_max > 0.0) {
        return Err(IbcError::InvalidParameter("need edges and a positive energy window".into()));
    }
    let k_max = e_max.sqrt();
    let step = std::f64::consts::PI / graph.longest_edge() / 40.0;
    let n = (k_max / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..=n).map(|j| (j as f64 + 0.5) * step).collect();
    let vals: Vec<f64> = grid.iter().map(|&k| smallest_singular(graph, k).0).collect();
    let mut levels = Vec::new();
    for j in 1..n {
        if vals[j] < vals[j - 1] && vals[j] <= vals[j + 1] {
            let (k, s) = golden_minimize(|k| smallest_singular(graph, k).0, grid[j - 1], grid[j + 1], 1e-15 * grid[j + 1]);
            if s < 1e-8 && k <= k_max {
                let count = smallest_singular(graph, k).1.iter().filter(|&&x| x < 1e-7).count().max(1);
                levels.extend(std::iter::repeat_n(k * k, count));
            }
        }
    }
    Ok(levels)
}
