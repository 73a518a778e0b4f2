pub mod figure;
pub mod graph;
pub mod ground;
pub mod verify;

use clap::ValueEnum;
use ibc_core::graph::VacuumVariant;
use ibc_core::multi_source::Source;
use ibc_core::Complex64;

/// `re` or `re,im`
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("cannot parse '{t}' as a number"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected 're' or 're,im', got '{s}'")),
    }
}

/// `position,re[,im]`
pub fn parse_source(s: &str) -> Result<Source, String> {
    let (pos, c) = s.split_once(',').ok_or_else(|| format!("expected 'position,re[,im]', got '{s}'"))?;
    let position = pos.trim().parse::<f64>().map_err(|_| format!("cannot parse position '{pos}'"))?;
    Ok(Source::new(position, parse_complex(c)?))
}

/// `a,b`
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'a,b', got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("cannot parse '{t}' as a number"));
    Ok((num(a)?, num(b)?))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    /// One vacuum amplitude for the whole graph.
    #[default]
    Shared,
    /// One vacuum amplitude per vertex.
    Trapped,
}

impl Variant {
    pub fn core(self) -> VacuumVariant {
        match self {
            Variant::Shared => VacuumVariant::Shared,
            Variant::Trapped => VacuumVariant::Trapped,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Shared => "shared",
            Variant::Trapped => "trapped",
        }
    }
}
