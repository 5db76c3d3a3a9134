//! Metric definition files and JSON reports.
//!
//! File format, one `key = value` per line, `#` starts a comment:
//!
//! ```text
//! dim = 3
//! signature = 3,0
//! coords = x, y, z
//! order = 4
//! basepoint = 0, 0, 1/2
//! g[1][1] = 1 + x^2
//! g[2][3] = x*y
//! ```
//!
//! Indices are 1-based; entries with `i > j` are mirrored, omitted entries are zero.

mod expr;
mod report;

pub use expr::{parse_expr, parse_expr_at, Expr, Func};
pub use report::{InvariantEntry, Meta, Report, ResidualEntry, ReportValue};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{AnyJet, Jet};
use crate::scalar::{format_rational, parse_rational, Backend, Scalar, Q};
use crate::tensor::MetricJet;

/// Parsed contents of a metric file. `components` is the full symmetric `n × n` array.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub dim: usize,
    pub signature: (usize, usize),
    pub coords: Vec<String>,
    pub components: Vec<Vec<Expr>>,
    pub basepoint: Vec<Q>,
    pub order: usize,
}

/// A metric jet on whichever backend its components required.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMetric {
    Exact(MetricJet<Q>),
    Float(MetricJet<f64>),
}

impl AnyMetric {
    pub fn backend(&self) -> Backend {
        match self {
            AnyMetric::Exact(_) => Backend::Exact,
            AnyMetric::Float(_) => Backend::Float,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyMetric::Exact(g) => g.dim(),
            AnyMetric::Float(g) => g.dim(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            AnyMetric::Exact(g) => g.order(),
            AnyMetric::Float(g) => g.order(),
        }
    }

    pub fn signature(&self) -> (usize, usize) {
        match self {
            AnyMetric::Exact(g) => g.signature(),
            AnyMetric::Float(g) => g.signature(),
        }
    }

    pub fn to_float(&self) -> MetricJet<f64> {
        match self {
            AnyMetric::Exact(g) => g.to_float(),
            AnyMetric::Float(g) => g.clone(),
        }
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
    value_col: usize,
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).collect()
}

fn parse_count(l: &Line<'_>) -> Result<usize> {
    l.value
        .trim()
        .parse()
        .map_err(|_| perr(l.no, l.value_col, format!("`{}` expects a non-negative integer", l.key)))
}

/// `g[i][j]` with 1-based indices, returned 0-based.
fn parse_component_key(key: &str) -> Option<(usize, usize)> {
    let rest = key.strip_prefix("g[")?;
    let (i, rest) = rest.split_once("][")?;
    let j = rest.strip_suffix(']')?;
    let i: usize = i.trim().parse().ok()?;
    let j: usize = j.trim().parse().ok()?;
    (i >= 1 && j >= 1).then(|| (i - 1, j - 1))
}

pub fn parse_metric(text: &str) -> Result<MetricSpec> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| perr(no, 1, "expected `key = value`"))?;
        let value_col = key.chars().count() + 2;
        lines.push(Line {
            no,
            key: key.trim(),
            value,
            value_col,
        });
    }

    let mut header: BTreeMap<&str, &Line<'_>> = BTreeMap::new();
    let mut entries = Vec::new();
    for l in &lines {
        match l.key {
            "dim" | "signature" | "coords" | "order" | "basepoint" => {
                if header.insert(l.key, l).is_some() {
                    return Err(perr(l.no, 1, format!("duplicate key `{}`", l.key)));
                }
            }
            k if k.starts_with('g') => {
                let (i, j) = parse_component_key(k)
                    .ok_or_else(|| perr(l.no, 1, format!("malformed component key `{k}`")))?;
                entries.push((i, j, l));
            }
            k => return Err(perr(l.no, 1, format!("unknown key `{k}`"))),
        }
    }
    let need = |k: &str| {
        header
            .get(k)
            .copied()
            .ok_or_else(|| perr(text.lines().count().max(1), 1, format!("missing key `{k}`")))
    };

    let dim_line = need("dim")?;
    let dim = parse_count(dim_line)?;
    if dim == 0 {
        return Err(perr(dim_line.no, dim_line.value_col, "dim must be positive"));
    }

    let sig_line = need("signature")?;
    let sig: Vec<&str> = split_list(sig_line.value);
    if sig.len() != 2 {
        return Err(Error::Arity(format!(
            "signature expects two entries p,q (line {})",
            sig_line.no
        )));
    }
    let p: usize = sig[0]
        .parse()
        .map_err(|_| perr(sig_line.no, sig_line.value_col, "signature entries must be integers"))?;
    let q: usize = sig[1]
        .parse()
        .map_err(|_| perr(sig_line.no, sig_line.value_col, "signature entries must be integers"))?;
    if p + q != dim {
        return Err(Error::SignatureMismatch(format!("p + q = {} but dim = {dim}", p + q)));
    }

    let coord_line = need("coords")?;
    let coords: Vec<String> = split_list(coord_line.value).into_iter().map(String::from).collect();
    if coords.len() != dim {
        return Err(Error::Arity(format!(
            "{} coordinates declared for dim = {dim} (line {})",
            coords.len(),
            coord_line.no
        )));
    }
    for (k, c) in coords.iter().enumerate() {
        let ok = c.chars().next().is_some_and(|ch| ch.is_alphabetic() || ch == '_')
            && c.chars().all(|ch| ch.is_alphanumeric() || ch == '_');
        if !ok || ["exp", "sin", "cos"].contains(&c.as_str()) {
            return Err(perr(coord_line.no, coord_line.value_col, format!("invalid coordinate name `{c}`")));
        }
        if coords[..k].contains(c) {
            return Err(perr(coord_line.no, coord_line.value_col, format!("duplicate coordinate `{c}`")));
        }
    }

    let order = parse_count(need("order")?)?;

    let bp_line = need("basepoint")?;
    let bp_items = split_list(bp_line.value);
    if bp_items.len() != dim {
        return Err(Error::Arity(format!(
            "basepoint has {} entries for dim = {dim} (line {})",
            bp_items.len(),
            bp_line.no
        )));
    }
    let basepoint = bp_items
        .iter()
        .map(|s| parse_rational(s).ok_or_else(|| perr(bp_line.no, bp_line.value_col, format!("invalid rational `{s}`"))))
        .collect::<Result<Vec<_>>>()?;

    let mut given: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
    for (i, j, l) in entries {
        if i >= dim || j >= dim {
            return Err(Error::Arity(format!(
                "component g[{}][{}] outside dim = {dim} (line {})",
                i + 1,
                j + 1,
                l.no
            )));
        }
        let e = parse_expr_at(l.value, &coords, l.no, l.value_col)?;
        if given.insert((i, j), e).is_some() {
            return Err(perr(l.no, 1, format!("duplicate component g[{}][{}]", i + 1, j + 1)));
        }
    }

    let mut components = vec![vec![Expr::zero(); dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let e = match (given.get(&(i, j)), given.get(&(j, i))) {
                (Some(a), Some(b)) if i != j && a != b => {
                    log::warn!("g[{}][{}] and g[{}][{}] differ; symmetrizing", i + 1, j + 1, j + 1, i + 1);
                    Expr::Div(
                        Box::new(Expr::Add(Box::new(a.clone()), Box::new(b.clone()))),
                        Box::new(Expr::Num(Q::from_integer(2.into()))),
                    )
                }
                (Some(a), _) | (None, Some(a)) => a.clone(),
                (None, None) => Expr::zero(),
            };
            components[i][j] = e.clone();
            components[j][i] = e;
        }
    }

    Ok(MetricSpec {
        dim,
        signature: (p, q),
        coords,
        components,
        basepoint,
        order,
    })
}

impl fmt::Display for MetricSpec {
    /// Serializes back to the file format; nonzero upper-triangle entries only.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim = {}", self.dim)?;
        writeln!(f, "signature = {},{}", self.signature.0, self.signature.1)?;
        writeln!(f, "coords = {}", self.coords.join(", "))?;
        writeln!(f, "order = {}", self.order)?;
        let bp: Vec<String> = self.basepoint.iter().map(format_rational).collect();
        writeln!(f, "basepoint = {}", bp.join(", "))?;
        for i in 0..self.dim {
            for j in i..self.dim {
                let e = &self.components[i][j];
                if !e.is_zero_literal() {
                    writeln!(f, "g[{}][{}] = {}", i + 1, j + 1, e.display(&self.coords))?;
                }
            }
        }
        Ok(())
    }
}

impl MetricSpec {
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

fn assemble<S: Scalar>(spec: &MetricSpec, jets: Vec<Vec<Jet<S>>>) -> Result<MetricJet<S>> {
    MetricJet::new(jets, spec.signature, spec.basepoint.clone())
}

/// Expands every component at the basepoint. If any component needs the float
/// backend, all of them are expanded on it.
pub fn build_metric_jet(spec: &MetricSpec) -> Result<AnyMetric> {
    let n = spec.dim;
    let mut exact = Vec::with_capacity(n);
    let mut promote = false;
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            match spec.components[i][j].to_jet(&spec.basepoint, spec.order)? {
                AnyJet::Exact(jet) => row.push(jet),
                AnyJet::Float(_) => {
                    promote = true;
                    row.push(Jet::zero(n, spec.order));
                }
            }
        }
        exact.push(row);
    }
    if !promote {
        return Ok(AnyMetric::Exact(assemble(spec, exact)?));
    }
    let float = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| spec.components[i][j].eval::<f64>(&spec.basepoint, spec.order))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnyMetric::Float(assemble(spec, float)?))
}

/// Reads, parses and expands a metric file.
pub fn load_metric(path: &std::path::Path) -> Result<(MetricSpec, AnyMetric)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let spec = parse_metric(&text)?;
    let g = build_metric_jet(&spec)?;
    Ok((spec, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    const EUCLID: &str = "dim = 3\nsignature = 3,0\ncoords = x1, x2, x3\norder = 2\nbasepoint = 0, 0, 0\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = 1\n";

    #[test]
    fn euclidean() {
        let spec = parse_metric(EUCLID).unwrap();
        assert_eq!(spec.dim, 3);
        let AnyMetric::Exact(g) = build_metric_jet(&spec).unwrap() else { panic!() };
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { Jet::one(3, 2) } else { Jet::zero(3, 2) };
                assert_eq!(g.component(i, j), &want);
            }
        }
    }

    #[test]
    fn sphere_at_one_promotes() {
        let text = "dim = 2\nsignature = 2,0\ncoords = t, p\norder = 3\nbasepoint = 1, 0\ng[1][1] = 1\ng[2][2] = sin(t)^2\n";
        let g = build_metric_jet(&parse_metric(text).unwrap()).unwrap();
        let AnyMetric::Float(g) = g else { panic!("expected float backend") };
        assert!((g.component(1, 1).constant_term() - 1f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn signature_checks() {
        let bad = EUCLID.replace("signature = 3,0", "signature = 3,1");
        assert!(matches!(parse_metric(&bad), Err(Error::SignatureMismatch(_))));
        let text = "dim = 4\nsignature = 3,1\ncoords = a, b, c, d\norder = 1\nbasepoint = 0,0,0,0\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = 1\ng[4][4] = 1\n";
        let spec = parse_metric(text).unwrap();
        assert!(matches!(build_metric_jet(&spec), Err(Error::SignatureMismatch(_))));
        let sing = EUCLID.replace("g[3][3] = 1\n", "g[3][3] = x1\n");
        assert!(matches!(
            build_metric_jet(&parse_metric(&sing).unwrap()),
            Err(Error::NotInvertibleMetric)
        ));
    }

    #[test]
    fn malformed() {
        let bad = EUCLID.replace("g[1][1] = 1\n", "g[1][1] = 1 +\n");
        match parse_metric(&bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (6, 14)),
            other => panic!("{other:?}"),
        }
        let bad = EUCLID.replace("coords = x1, x2, x3", "coords = x1, x2");
        assert!(matches!(parse_metric(&bad), Err(Error::Arity(_))));
        let bad = EUCLID.replace("basepoint = 0, 0, 0", "basepoint = 0, 0");
        assert!(matches!(parse_metric(&bad), Err(Error::Arity(_))));
        let bad = format!("{EUCLID}g[4][1] = 1\n");
        assert!(matches!(parse_metric(&bad), Err(Error::Arity(_))));
    }

    #[test]
    fn lower_entries_mirror_and_symmetrize() {
        let text = format!("{EUCLID}g[2][1] = x1\n");
        let spec = parse_metric(&text).unwrap();
        assert_eq!(spec.components[0][1], spec.components[1][0]);
        let text = format!("{EUCLID}g[1][2] = 1/3\ng[2][1] = x1\n");
        let spec = parse_metric(&text).unwrap();
        let j = spec.components[0][1].eval::<Q>(&spec.basepoint, 1).unwrap();
        assert_eq!(j.constant_term(), q(1, 6));
    }

    #[test]
    fn round_trip() {
        let text = "# test\ndim = 3\nsignature = 2,1\ncoords = t, x, y\norder = 4\nbasepoint = 1/2, 0, -3\ng[1][1] = -exp(2*x*y)\ng[2][2] = 1/(1 + t^2)\ng[3][3] = (1 - x)*(1 + y/3)\ng[2][3] = 0.5*sin(x)^2\n";
        let spec = parse_metric(text).unwrap();
        let again = parse_metric(&spec.serialize()).unwrap();
        assert_eq!(spec, again);
    }
}
