//! Graph config files:
//!
//! ```text
//! # comment
//! vertex <id> <c_re> <c_im> [dirichlet|kirchhoff]
//! edge <j> <k> <length>
//! ```
//!
//! Vertex ids must be `0..n-1`, each declared once.

use ibc_core::graph::{build_graph, MetricGraph};
use ibc_core::Complex64;

use crate::error::CliError;

const MAX_VERTEX_ID: usize = 100_000;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}: {msg}"))
}

fn number<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T, CliError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("cannot parse {what} from '{tok}'")))
}

pub fn parse_graph(text: &str) -> Result<MetricGraph, CliError> {
    let mut vertices: Vec<Option<(Complex64, bool, usize)>> = Vec::new();
    let mut edges = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tok = content.split_whitespace();
        match tok.next() {
            Some("vertex") => {
                let id: usize = number(tok.next(), "vertex id", line)?;
                let re: f64 = number(tok.next(), "c_re", line)?;
                let im: f64 = number(tok.next(), "c_im", line)?;
                let c = Complex64::new(re, im);
                let dirichlet = match tok.next() {
                    None => false,
                    Some("kirchhoff") if c.norm() != 0.0 => {
                        return Err(parse_err(line, "a kirchhoff vertex must have zero coupling"))
                    }
                    Some("kirchhoff") => false,
                    Some("dirichlet") => true,
                    Some(other) => return Err(parse_err(line, format!("unknown vertex condition '{other}'"))),
                };
                if let Some(extra) = tok.next() {
                    return Err(parse_err(line, format!("unexpected token '{extra}'")));
                }
                if id > MAX_VERTEX_ID {
                    return Err(parse_err(line, format!("vertex id {id} exceeds {MAX_VERTEX_ID}")));
                }
                if id >= vertices.len() {
                    vertices.resize(id + 1, None);
                }
                if vertices[id].is_some() {
                    return Err(parse_err(line, format!("vertex {id} declared twice")));
                }
                vertices[id] = Some((c, dirichlet, line));
            }
            Some("edge") => {
                let j: usize = number(tok.next(), "vertex j", line)?;
                let k: usize = number(tok.next(), "vertex k", line)?;
                let len: f64 = number(tok.next(), "edge length", line)?;
                if let Some(extra) = tok.next() {
                    return Err(parse_err(line, format!("unexpected token '{extra}'")));
                }
                edges.push((j, k, len, line));
            }
            Some(other) => return Err(parse_err(line, format!("unknown keyword '{other}'"))),
            None => unreachable!("empty lines are skipped"),
        }
    }
    let mut couplings = Vec::with_capacity(vertices.len());
    for (id, v) in vertices.iter().enumerate() {
        match v {
            Some((c, _, _)) => couplings.push(*c),
            None => return Err(CliError::Input(format!("vertex {id} is never declared"))),
        }
    }
    for &(j, k, len, line) in &edges {
        if j >= couplings.len() || k >= couplings.len() {
            return Err(parse_err(line, format!("edge ({j}, {k}) refers to an undeclared vertex")));
        }
        if j == k {
            return Err(parse_err(line, format!("loop at vertex {j}")));
        }
        if !(len > 0.0 && len.is_finite()) {
            return Err(parse_err(line, format!("edge length {len} must be positive")));
        }
        if edges.iter().filter(|&&(a, b, _, _)| (a, b) == (j, k) || (a, b) == (k, j)).count() > 1 {
            return Err(parse_err(line, format!("duplicate edge ({j}, {k})")));
        }
    }
    let list: Vec<(usize, usize, f64)> = edges.iter().map(|&(j, k, l, _)| (j, k, l)).collect();
    let mut graph = build_graph(&list, &couplings).map_err(CliError::from)?;
    for (id, v) in vertices.iter().enumerate() {
        if let Some((_, true, line)) = v {
            graph = graph.with_dirichlet(id).map_err(|e| parse_err(*line, e))?;
        }
    }
    Ok(graph)
}
