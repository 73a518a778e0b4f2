//! Metric graphs with an interior-boundary condition at every vertex.
//!
//! On each edge `φ¹` solves `-φ'' = Eφ`. At vertex `j` the one-particle wave
//! function is continuous and the sum of outgoing derivatives equals
//! `c_j φ⁰` (shared vacuum) or `c_j φ⁰_j` (trapped variant, one vacuum
//! amplitude per vertex). The vacuum rows are `Eφ⁰ = Σ_j c̄_j φ¹(v_j)`
//! respectively `Eφ⁰_j = c̄_j φ¹(v_j)`. A vertex with `c_j = 0` is Kirchhoff.
//!
//! All conditions are collected into a square secular matrix acting on two
//! basis coefficients per edge plus the vacuum amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::numerics::{golden_minimize, integrate, solve_root, Bracket, Domain};
use crate::{IbcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VacuumVariant {
    /// One vacuum amplitude shared by all vertices.
    Shared,
    /// One vacuum amplitude per vertex, recording where the particle was absorbed.
    Trapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexCondition {
    /// Continuity plus the IBC; Kirchhoff when the coupling vanishes.
    Ibc,
    /// `φ¹ = 0` at a vertex of valency one without coupling.
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub coupling: Complex64,
    pub condition: VertexCondition,
}

/// Edge from `from` to `to`; the edge coordinate runs from 0 at `from` to
/// `length` at `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Start,
    Finish,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// Per vertex, the incident edge ends.
    incidence: Vec<Vec<(usize, End)>>,
}

/// Builds a simple metric graph with `couplings.len()` vertices.
pub fn build_graph(edge_list: &[(usize, usize, f64)], couplings: &[Complex64]) -> Result<MetricGraph> {
    let n = couplings.len();
    let mut edges = Vec::with_capacity(edge_list.len());
    let mut incidence = vec![Vec::new(); n];
    for &(j, k, length) in edge_list {
        if j >= n || k >= n {
            return Err(IbcError::InvalidGraph(format!("edge ({j}, {k}) refers to a missing vertex")));
        }
        if j == k {
            return Err(IbcError::InvalidGraph(format!("loop at vertex {j}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(IbcError::InvalidGraph(format!("edge ({j}, {k}) has non-positive length {length}")));
        }
        if edges.iter().any(|e: &Edge| (e.from == j && e.to == k) || (e.from == k && e.to == j)) {
            return Err(IbcError::InvalidGraph(format!("duplicate edge ({j}, {k})")));
        }
        incidence[j].push((edges.len(), End::Start));
        incidence[k].push((edges.len(), End::Finish));
        edges.push(Edge { from: j, to: k, length });
    }
    for (j, c) in couplings.iter().enumerate() {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(IbcError::InvalidGraph(format!("coupling at vertex {j} is not finite")));
        }
        if c.norm() > 0.0 && incidence[j].is_empty() {
            return Err(IbcError::InvalidGraph(format!("vertex {j} carries a coupling but has no edges")));
        }
    }
    let vertices = couplings.iter().map(|&coupling| Vertex { coupling, condition: VertexCondition::Ibc }).collect();
    Ok(MetricGraph { vertices, edges, incidence })
}

impl MetricGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn valency(&self, j: usize) -> usize {
        self.incidence[j].len()
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.num_vertices()]; self.num_vertices()];
        for e in &self.edges {
            a[e.from][e.to] = 1;
            a[e.to][e.from] = 1;
        }
        a
    }

    /// Index of the edge joining `j` and `k`, in either orientation.
    pub fn edge_between(&self, j: usize, k: usize) -> Option<usize> {
        self.edges.iter().position(|e| (e.from == j && e.to == k) || (e.from == k && e.to == j))
    }

    pub fn longest_edge(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// Imposes a Dirichlet condition at a coupling-free vertex of valency one.
    pub fn with_dirichlet(mut self, j: usize) -> Result<Self> {
        let v = self.vertices.get(j).ok_or_else(|| IbcError::InvalidGraph(format!("no vertex {j}")))?;
        if self.incidence[j].len() != 1 || v.coupling.norm() != 0.0 {
            return Err(IbcError::InvalidGraph(format!(
                "Dirichlet condition needs valency 1 and zero coupling at vertex {j}"
            )));
        }
        self.vertices[j].condition = VertexCondition::Dirichlet;
        Ok(self)
    }

    /// Places a new vertex with `coupling` on `edge` at distance `position`
    /// from its start, splitting the edge in two. The new vertex gets the
    /// last index.
    pub fn insert_source_on_edge(&self, edge: usize, position: f64, coupling: Complex64) -> Result<Self> {
        let e = *self.edges.get(edge).ok_or_else(|| IbcError::InvalidGraph(format!("no edge {edge}")))?;
        if !(position > 0.0 && position < e.length) {
            return Err(IbcError::InvalidGraph(format!("position {position} not inside edge of length {}", e.length)));
        }
        let new = self.num_vertices();
        let mut list: Vec<(usize, usize, f64)> =
            self.edges.iter().enumerate().filter(|(i, _)| *i != edge).map(|(_, e)| (e.from, e.to, e.length)).collect();
        list.push((e.from, new, position));
        list.push((new, e.to, e.length - position));
        let mut couplings: Vec<Complex64> = self.vertices.iter().map(|v| v.coupling).collect();
        couplings.push(coupling);
        let mut g = build_graph(&list, &couplings)?;
        for (j, v) in self.vertices.iter().enumerate() {
            g.vertices[j].condition = v.condition;
        }
        Ok(g)
    }

    fn vacuum_count(&self, variant: VacuumVariant) -> usize {
        match variant {
            VacuumVariant::Shared => 1,
            VacuumVariant::Trapped => self.num_vertices(),
        }
    }
}

/// Edge basis at fixed energy: `cos(kx), sin(kx)` above threshold, decaying
/// exponentials `e^{-κx}, e^{-κ(l-x)}` below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeBasis {
    Oscillating { k: f64 },
    Decaying { kappa: f64 },
}

impl EdgeBasis {
    fn for_energy(energy: f64) -> Self {
        if energy > 0.0 {
            EdgeBasis::Oscillating { k: energy.sqrt() }
        } else {
            EdgeBasis::Decaying { kappa: (-energy).sqrt() }
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            EdgeBasis::Oscillating { k } => k,
            EdgeBasis::Decaying { kappa } => kappa,
        }
    }

    /// Values of the two basis functions at `x` on an edge of length `l`.
    fn values(&self, x: f64, l: f64) -> [f64; 2] {
        match *self {
            EdgeBasis::Oscillating { k } => [(k * x).cos(), (k * x).sin()],
            EdgeBasis::Decaying { kappa } => [(-kappa * x).exp(), (-kappa * (l - x)).exp()],
        }
    }

    fn derivatives(&self, x: f64, l: f64) -> [f64; 2] {
        match *self {
            EdgeBasis::Oscillating { k } => [-k * (k * x).sin(), k * (k * x).cos()],
            EdgeBasis::Decaying { kappa } => [-kappa * (-kappa * x).exp(), kappa * (-kappa * (l - x)).exp()],
        }
    }
}

/// Secular matrix at one energy.
#[derive(Debug, Clone)]
pub struct SecularSystem {
    pub matrix: DMatrix<Complex64>,
    pub energy: f64,
    pub basis: EdgeBasis,
    pub variant: VacuumVariant,
}

impl SecularSystem {
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.clone().determinant()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

fn end_position(edge: &Edge, end: End) -> f64 {
    match end {
        End::Start => 0.0,
        End::Finish => edge.length,
    }
}

/// Assembles the secular matrix. Derivative rows are divided by `k` (or `κ`)
/// and vacuum rows by `max(1, |E|)`; row scaling leaves the zeros in place.
pub fn assemble(graph: &MetricGraph, energy: f64, variant: VacuumVariant) -> Result<SecularSystem> {
    if energy == 0.0 || !energy.is_finite() {
        return Err(IbcError::InvalidParameter(format!("energy {energy} must be finite and nonzero")));
    }
    let basis = EdgeBasis::for_energy(energy);
    let q = basis.scale();
    let ne = graph.num_edges();
    let nvac = graph.vacuum_count(variant);
    let dim = 2 * ne + nvac;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let vac_col = |j: usize| match variant {
        VacuumVariant::Shared => 2 * ne,
        VacuumVariant::Trapped => 2 * ne + j,
    };
    let value = |e: usize, end: End| {
        let edge = &graph.edges[e];
        basis.values(end_position(edge, end), edge.length)
    };
    let outgoing = |e: usize, end: End| {
        let edge = &graph.edges[e];
        let d = basis.derivatives(end_position(edge, end), edge.length);
        let s = if end == End::Start { 1.0 } else { -1.0 };
        [s * d[0] / q, s * d[1] / q]
    };

    let mut row = 0;
    for (j, vertex) in graph.vertices.iter().enumerate() {
        let ends = &graph.incidence[j];
        if ends.is_empty() {
            continue;
        }
        if vertex.condition == VertexCondition::Dirichlet {
            let (e, end) = ends[0];
            let v = value(e, end);
            m[(row, 2 * e)] = v[0].into();
            m[(row, 2 * e + 1)] = v[1].into();
            row += 1;
            continue;
        }
        let (e0, end0) = ends[0];
        let v0 = value(e0, end0);
        for &(e, end) in &ends[1..] {
            let v = value(e, end);
            m[(row, 2 * e0)] += v0[0];
            m[(row, 2 * e0 + 1)] += v0[1];
            m[(row, 2 * e)] -= v[0];
            m[(row, 2 * e + 1)] -= v[1];
            row += 1;
        }
        for &(e, end) in ends {
            let d = outgoing(e, end);
            m[(row, 2 * e)] += d[0];
            m[(row, 2 * e + 1)] += d[1];
        }
        m[(row, vac_col(j))] -= vertex.coupling / q;
        row += 1;
    }

    let s = energy.abs().max(1.0);
    let vacuum_entries = |m: &mut DMatrix<Complex64>, row: usize, j: usize| {
        let vertex = &graph.vertices[j];
        if vertex.coupling.norm() == 0.0 {
            return;
        }
        let (e, end) = graph.incidence[j][0];
        let v = value(e, end);
        m[(row, 2 * e)] -= vertex.coupling.conj() * v[0] / s;
        m[(row, 2 * e + 1)] -= vertex.coupling.conj() * v[1] / s;
    };
    match variant {
        VacuumVariant::Shared => {
            m[(row, 2 * ne)] = (energy / s).into();
            for j in 0..graph.num_vertices() {
                vacuum_entries(&mut m, row, j);
            }
            row += 1;
        }
        VacuumVariant::Trapped => {
            for j in 0..graph.num_vertices() {
                m[(row, 2 * ne + j)] = (energy / s).into();
                vacuum_entries(&mut m, row, j);
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, dim);
    Ok(SecularSystem { matrix: m, energy, basis, variant })
}

/// Determinant of the (row-scaled) secular matrix. Real up to round-off for
/// real `E`, including complex couplings.
pub fn secular_determinant(graph: &MetricGraph, energy: f64, variant: VacuumVariant) -> Result<Complex64> {
    Ok(assemble(graph, energy, variant)?.determinant())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpectrum {
    /// Eigenvalues in the requested window, repeated by multiplicity.
    pub levels: Vec<f64>,
    pub warnings: Vec<String>,
    /// Largest `|Im det|/|det|` seen on the scan grid.
    pub max_imag_ratio: f64,
}

fn relative_sigma(system: &SecularSystem) -> (f64, Vec<f64>) {
    let s = system.singular_values();
    let max = s.first().copied().unwrap_or(0.0);
    let min = s.last().copied().unwrap_or(0.0);
    (if max > 0.0 { min / max } else { 0.0 }, s)
}

const NULL_THRESHOLD: f64 = 1e-10;
const ROOT_RESIDUAL: f64 = 1e-8;

/// All eigenvalues in `[e_min, e_max]` (excluding `E = 0`).
///
/// Scans `k = √E` (or `κ = √-E`) with step `(π/l_max)/20`. Simple roots are
/// bracketed by sign changes of `Re det`; roots of even multiplicity show up
/// as zeros of the smallest singular value without a sign change and are
/// located by minimising `σ_min/σ_max`. Multiplicities come from counting
/// singular values below `1e-10·σ_max`.
pub fn graph_spectrum(graph: &MetricGraph, e_min: f64, e_max: f64, variant: VacuumVariant) -> Result<GraphSpectrum> {
    if !(e_min < e_max) || !e_min.is_finite() || !e_max.is_finite() {
        return Err(IbcError::InvalidParameter(format!("bad energy window [{e_min}, {e_max}]")));
    }
    if graph.num_edges() == 0 {
        return Err(IbcError::InvalidGraph("graph has no edges".into()));
    }
    let step = std::f64::consts::PI / graph.longest_edge() / 20.0;
    let mut out = GraphSpectrum { levels: Vec::new(), warnings: Vec::new(), max_imag_ratio: 0.0 };
    if e_min < 0.0 {
        let lo = if e_max < 0.0 { (-e_max).sqrt() } else { 0.0 };
        scan_segment(graph, variant, lo, (-e_min).sqrt(), step, -1.0, &mut out)?;
    }
    if e_max > 0.0 {
        let lo = if e_min > 0.0 { e_min.sqrt() } else { 0.0 };
        scan_segment(graph, variant, lo, e_max.sqrt(), step, 1.0, &mut out)?;
    }
    out.levels.sort_by(f64::total_cmp);
    Ok(out)
}

fn scan_segment(
    graph: &MetricGraph,
    variant: VacuumVariant,
    q_lo: f64,
    q_hi: f64,
    step: f64,
    sign: f64,
    out: &mut GraphSpectrum,
) -> Result<()> {
    let energy = |q: f64| sign * q * q;
    let start = q_lo.max(1e-3 * step);
    if start >= q_hi {
        return Ok(());
    }
    let n = ((q_hi - start) / step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|j| (start + j as f64 * step).min(q_hi)).collect();
    let mut det = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    for &q in &grid {
        let sys = assemble(graph, energy(q), variant)?;
        let d = sys.determinant();
        if d.norm() > 0.0 {
            out.max_imag_ratio = out.max_imag_ratio.max(d.im.abs() / d.norm());
        }
        det.push(d.re);
        ratio.push(relative_sigma(&sys).0);
    }
    let re_det = |q: f64| assemble(graph, energy(q), variant).map(|s| s.determinant().re).unwrap_or(f64::NAN);
    let sigma = |q: f64| assemble(graph, energy(q), variant).map(|s| relative_sigma(&s).0).unwrap_or(f64::INFINITY);

    let mut roots: Vec<f64> = Vec::new();
    for j in 0..n {
        if det[j] == 0.0 {
            roots.push(grid[j]);
        } else if det[j].signum() == -det[j + 1].signum() {
            roots.push(solve_root(re_det, Bracket::new(grid[j], grid[j + 1])?, 1e-15 * grid[j + 1])?);
        }
    }
    let sign_changes = roots.len();
    for j in 1..n {
        if ratio[j] < ratio[j - 1] && ratio[j] <= ratio[j + 1] && ratio[j] < 0.25 {
            let (q, r) = golden_minimize(sigma, grid[j - 1], grid[j + 1], 1e-15 * grid[j + 1]);
            if r < ROOT_RESIDUAL && !roots.iter().any(|&x| (x - q).abs() < 1e-7 * q.max(1.0)) {
                roots.push(q);
            }
        }
    }

    // Census at half the step: more sign changes means roots closer than
    // the grid spacing.
    let fine: usize = (0..2 * n)
        .map(|j| (start + j as f64 * 0.5 * step).min(q_hi))
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| {
            let (a, b) = (re_det(w[0]), re_det(w[1]));
            a != 0.0 && a.signum() == -b.signum()
        })
        .count();
    if fine > sign_changes {
        out.warnings.push(format!(
            "scan resolution: {fine} sign changes at half step versus {sign_changes} on [{start}, {q_hi}]"
        ));
    }

    for q in roots {
        let e = energy(q);
        let sys = assemble(graph, e, variant)?;
        let (r, s) = relative_sigma(&sys);
        if r > ROOT_RESIDUAL {
            out.warnings.push(format!("root at E = {e} has residual {r:e}"));
        }
        let max = s[0];
        let multiplicity = s.iter().filter(|&&x| x < NULL_THRESHOLD * max).count().max(1);
        out.levels.extend(std::iter::repeat_n(e, multiplicity));
    }
    Ok(())
}

/// Normalised eigenfunction for a non-degenerate eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    pub energy: f64,
    pub variant: VacuumVariant,
    pub basis: EdgeBasis,
    /// One amplitude (shared) or one per vertex (trapped).
    pub phi0: Vec<Complex64>,
    /// Basis coefficients per edge.
    pub edge_coefficients: Vec<[Complex64; 2]>,
    edges: Vec<Edge>,
}

impl GraphState {
    /// `φ¹` on edge `e` at distance `x` from the edge's start.
    pub fn phi1(&self, e: usize, x: f64) -> Complex64 {
        let b = self.basis.values(x, self.edges[e].length);
        self.edge_coefficients[e][0] * b[0] + self.edge_coefficients[e][1] * b[1]
    }

    pub fn phi1_derivative(&self, e: usize, x: f64) -> Complex64 {
        let b = self.basis.derivatives(x, self.edges[e].length);
        self.edge_coefficients[e][0] * b[0] + self.edge_coefficients[e][1] * b[1]
    }

    /// `φ¹` on the edge between `j` and `k`, measured from `j`; reversing
    /// the orientation maps `x` to `l - x`.
    pub fn phi1_between(&self, j: usize, k: usize, x: f64) -> Option<Complex64> {
        let e = self.edges.iter().position(|e| (e.from == j && e.to == k) || (e.from == k && e.to == j))?;
        let edge = &self.edges[e];
        Some(if edge.from == j { self.phi1(e, x) } else { self.phi1(e, edge.length - x) })
    }

    /// `(Σ|φ⁰|², Σ_edges ∫|φ¹|²)`
    pub fn weights(&self) -> Result<(f64, f64)> {
        let w0 = self.phi0.iter().map(|a| a.norm_sqr()).sum();
        let mut w1 = 0.0;
        for (e, edge) in self.edges.iter().enumerate() {
            let r = integrate(|x| Complex64::new(self.phi1(e, x).norm_sqr(), 0.0), Domain::Finite { a: 0.0, b: edge.length }, 1e-15)
                .or_else(|err| match err {
                    IbcError::QuadratureNotConverged { estimate, error } if error < 1e-12 => {
                        Ok(crate::numerics::QuadResult { value: estimate, error, evaluations: 0 })
                    }
                    other => Err(other),
                })?;
            w1 += r.value.re;
        }
        Ok((w0, w1))
    }

    /// Largest violation of continuity and of the IBC over all vertices.
    pub fn residuals(&self, graph: &MetricGraph) -> (f64, f64) {
        let mut continuity: f64 = 0.0;
        let mut ibc: f64 = 0.0;
        for (j, vertex) in graph.vertices.iter().enumerate() {
            let ends = &graph.incidence[j];
            if ends.is_empty() {
                continue;
            }
            let at = |(e, end): (usize, End)| self.phi1(e, end_position(&self.edges[e], end));
            let v0 = at(ends[0]);
            if vertex.condition == VertexCondition::Dirichlet {
                continuity = continuity.max(v0.norm());
                continue;
            }
            for &pair in &ends[1..] {
                continuity = continuity.max((at(pair) - v0).norm());
            }
            let flux: Complex64 = ends
                .iter()
                .map(|&(e, end)| {
                    let d = self.phi1_derivative(e, end_position(&self.edges[e], end));
                    if end == End::Start {
                        d
                    } else {
                        -d
                    }
                })
                .sum();
            let vac = match self.variant {
                VacuumVariant::Shared => self.phi0[0],
                VacuumVariant::Trapped => self.phi0[j],
            };
            ibc = ibc.max((flux - vertex.coupling * vac).norm());
        }
        (continuity, ibc)
    }
}

/// Eigenfunction at eigenvalue `energy`, from the null vector of the
/// secular matrix, normalised to unit total weight.
pub fn graph_eigenstate(graph: &MetricGraph, energy: f64, variant: VacuumVariant) -> Result<GraphState> {
    let sys = assemble(graph, energy, variant)?;
    let svd = sys.matrix.clone().svd(false, true);
    let s = &svd.singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let (imin, &smin) = s.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty matrix");
    if smin > ROOT_RESIDUAL * max {
        return Err(IbcError::NotAnEigenvalue(energy));
    }
    let nullity = s.iter().filter(|&&x| x < NULL_THRESHOLD * max).count();
    if nullity > 1 {
        return Err(IbcError::DegenerateNullspace(nullity));
    }
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let v: Vec<Complex64> = v_t.row(imin).iter().map(|z| z.conj()).collect();

    let ne = graph.num_edges();
    let mut state = GraphState {
        energy,
        variant,
        basis: sys.basis,
        phi0: v[2 * ne..].to_vec(),
        edge_coefficients: (0..ne).map(|e| [v[2 * e], v[2 * e + 1]]).collect(),
        edges: graph.edges.clone(),
    };
    let (w0, w1) = state.weights()?;
    let norm = (w0 + w1).sqrt();
    // Fix the global phase on the largest vacuum or edge coefficient.
    let lead = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("non-empty");
    let phase = lead.conj() / lead.norm() / norm;
    state.phi0.iter_mut().for_each(|z| *z *= phase);
    state.edge_coefficients.iter_mut().for_each(|c| {
        c[0] *= phase;
        c[1] *= phase;
    });
    Ok(state)
}
