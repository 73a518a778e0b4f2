use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::graph::{MetricGraph, VacuumVariant, VertexCondition};
use crate::{IbcError, Result};

/// Finite-difference Hamiltonian of a metric graph, in the scaled variables
/// `ψ = √w φ` that make it Hermitian. Each edge is cut into `⌈l/h⌉` equal
/// pieces; a vertex node carries weight `Σ h_e/2` over its edges. Dirichlet
/// vertices are dropped from the unknowns. The vacuum amplitudes come last.
pub fn lattice_graph_hamiltonian(graph: &MetricGraph, h: f64, variant: VacuumVariant) -> Result<DMatrix<Complex64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(IbcError::InvalidParameter(format!("grid spacing {h} must be positive")));
    }
    let nv = graph.num_vertices();
    let mut node_of_vertex = vec![None; nv];
    let mut weights = Vec::new();
    for (j, v) in graph.vertices().iter().enumerate() {
        if v.condition != VertexCondition::Dirichlet && graph.valency(j) > 0 {
            node_of_vertex[j] = Some(weights.len());
            weights.push(0.0);
        }
    }
    // (node a, node b or None for a Dirichlet end, spacing)
    let mut links: Vec<(usize, Option<usize>, f64)> = Vec::new();
    for e in graph.edges() {
        let pieces = (e.length / h).ceil().max(2.0) as usize;
        let he = e.length / pieces as f64;
        for end in [e.from, e.to] {
            if let Some(n) = node_of_vertex[end] {
                weights[n] += 0.5 * he;
            }
        }
        let first = weights.len();
        weights.extend(std::iter::repeat_n(he, pieces - 1));
        let mut prev = node_of_vertex[e.from];
        for j in 0..pieces - 1 {
            let node = first + j;
            match prev {
                Some(p) => links.push((p, Some(node), he)),
                None => links.push((node, None, he)),
            }
            prev = Some(node);
        }
        let last = prev.expect("at least one interior node");
        links.push((last, node_of_vertex[e.to], he));
    }
    let n = weights.len();
    let vacua = match variant {
        VacuumVariant::Shared => 1,
        VacuumVariant::Trapped => nv,
    };
    let mut m = DMatrix::<Complex64>::zeros(n + vacua, n + vacua);
    for &(a, b, he) in &links {
        m[(a, a)] += 1.0 / (he * weights[a]);
        if let Some(b) = b {
            m[(b, b)] += 1.0 / (he * weights[b]);
            let off = -1.0 / (he * (weights[a] * weights[b]).sqrt());
            m[(a, b)] += off;
            m[(b, a)] += off;
        }
    }
    for (j, v) in graph.vertices().iter().enumerate() {
        if let Some(node) = node_of_vertex[j] {
            let col = n + if variant == VacuumVariant::Shared { 0 } else { j };
            let c = v.coupling / weights[node].sqrt();
            m[(node, col)] += c;
            m[(col, node)] += c.conj();
        }
    }
    Ok(m)
}

/// All eigenvalues of the lattice graph Hamiltonian, ascending.
pub fn lattice_graph_spectrum(graph: &MetricGraph, h: f64, variant: VacuumVariant) -> Result<Vec<f64>> {
    let m = lattice_graph_hamiltonian(graph, h, variant)?;
    let mut ev: Vec<f64> = SymmetricEigen::try_new(m, 1e-14, 10_000)
        .ok_or_else(|| IbcError::Eigensolver("symmetric eigensolver did not converge".into()))?
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
