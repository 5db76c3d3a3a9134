//! End-to-end evaluation of the exported invariants of a metric jet.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::metric_io::{AnyMetric, InvariantEntry, Meta, Report, ReportValue, ResidualEntry};
use crate::scalar::Backend;
use crate::tensor::{JetMatrix, MetricJet};

use super::frame::{
    canonical_frame, compatibility_residual, cotton_york_frame, frame_christoffel, invariant_derivation,
    quaternionic_frame_4d, structure_constants, CanonicalFrame, QuaternionicData,
};
use super::spectral::{value_matrix, SpectralData};
use super::{
    cotton_york, cotton_york_jet, cotton_york_ratio, cotton_york_ratio_exact, default_words, eigen_operators,
    fundamental_tensor, normalization_residual, normalize, self_adjoint_residual, spectral_count,
    trace_invariants, trace_invariants_exact, weyl_operator, weyl_operator_jet, word_traces,
    FundamentalTensor, NormalizedStructure,
};
use crate::tensor::norm_sq;

/// A scalar invariant evaluated at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValue {
    pub name: String,
    pub order: usize,
    pub value: f64,
}

/// Order of the first nontrivial invariants: 2 for n ≥ 4, 3 for n = 3.
pub fn base_order(n: usize) -> usize {
    if n == 3 {
        3
    } else {
        2
    }
}

/// Everything computed for one metric jet.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub fundamental: FundamentalTensor<f64>,
    pub normalized: NormalizedStructure<f64>,
    /// Weyl operator on `Λ²` (n ≥ 4) or oriented Cotton–York operator (n = 3) of `g₀`, coordinate basis.
    pub operator: JetMatrix<f64>,
    /// The operator at the origin in a `g₀`-orthonormal basis.
    pub spectrum: SpectralData,
    /// Base scalar invariants as jets.
    pub base: Vec<(String, Jet<f64>)>,
    pub frame: Option<CanonicalFrame>,
    pub quaternionic: Option<QuaternionicData>,
    /// Why the frame or the word traces are missing.
    pub skipped: Vec<String>,
    pub values: Vec<InvariantValue>,
    pub residuals: Vec<(String, f64)>,
}

impl Evaluation {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }
}

fn index_name(prefix: &str, k: usize, i: usize, j: usize) -> String {
    format!("{prefix}^{}_{}{}", k + 1, i + 1, j + 1)
}

/// Evaluates every invariant of order `≤ max_order` that the jet order allows.
///
/// Fails only when the fundamental tensor or the normalization fails; a missing
/// frame (non-simple spectrum, null eigenvectors) drops the frame invariants and is
/// recorded in [`Evaluation::skipped`].
pub fn evaluate(g: &MetricJet<f64>, max_order: usize) -> Result<Evaluation> {
    let n = g.dim();
    let f = fundamental_tensor(g)?;
    let nz = normalize(g, &f)?;
    let g0 = &nz.g0;
    let b = base_order(n);
    let mut residuals = vec![("normalization".to_string(), normalization_residual(&nz, &f)?)];
    let mut values = Vec::new();
    let mut skipped = Vec::new();
    let mut base: Vec<(String, Jet<f64>)> = Vec::new();

    let (operator, spectrum) = if n == 3 {
        let y = cotton_york_jet(g0, &f)?;
        let spec = cotton_york(g0, &f)?;
        base.push(("Y_ratio".to_string(), cotton_york_ratio(&y)?));
        (y, spec)
    } else {
        let w = weyl_operator_jet(g0, &f)?;
        let (spec, weights) = weyl_operator(g0, &f)?;
        residuals.push(("operator_self_adjoint".into(), self_adjoint_residual(&spec.matrix, &weights)));
        let s0 = norm_sq(&f.tensor, g0)?;
        for (k, jet) in trace_invariants(&w, &s0)?.into_iter().enumerate() {
            base.push((format!("I_{}", k + 2), jet));
        }
        (w, spec)
    };
    let scale = spectrum.matrix.amax().max(1e-300);
    residuals.push(("operator_trace".into(), spectrum.matrix.trace().abs() / scale));
    residuals.push(("eigen_residual".into(), spectrum.residual() / scale));

    if max_order >= b {
        for (name, jet) in &base {
            values.push(InvariantValue {
                name: name.clone(),
                order: b,
                value: jet.constant_term(),
            });
        }
    }

    let mut ops = None;
    if n >= 4 {
        match eigen_operators(&operator, g0) {
            Ok(a) => {
                if max_order >= b {
                    let d = spectral_count(n);
                    for (w, v) in default_words(d).iter().zip(word_traces(&a, &default_words(d))) {
                        let name = w
                            .iter()
                            .enumerate()
                            .filter(|(_, &k)| k > 0)
                            .map(|(i, k)| format!("A{}^{k}", i + 1))
                            .collect::<Vec<_>>()
                            .join(" ");
                        values.push(InvariantValue {
                            name: format!("tr({name})"),
                            order: b,
                            value: v,
                        });
                    }
                }
                ops = Some(a);
            }
            Err(e) => {
                log::warn!("word traces skipped: {e}");
                skipped.push(format!("word traces: {e}"));
            }
        }
    }

    let mut frame = None;
    let mut quaternionic = None;
    if max_order > b && operator.order() >= 1 {
        let reference = base.iter().find(|(name, _)| name == "I_3" || name == "Y_ratio").map(|(_, j)| j);
        let built: Result<CanonicalFrame> = if n == 3 {
            cotton_york_frame(g0, &operator, reference)
        } else if n == 4 && g0.is_riemannian() {
            quaternionic_frame_4d(g0, &operator, reference).map(|(fr, data)| {
                quaternionic = Some(data);
                fr
            })
        } else {
            match &ops {
                Some(a) => canonical_frame(g0, a, reference).map(|(fr, _)| fr),
                None => Err(Error::NoSimpleWordOperator),
            }
        };
        match built {
            Ok(fr) => frame = Some(fr),
            Err(e) => {
                log::warn!("frame invariants skipped: {e}");
                skipped.push(format!("frame: {e}"));
            }
        }
    }

    if let Some(fr) = &frame {
        let o = b + 1;
        for (name, jet) in &base {
            for (j, v) in invariant_derivation(fr, jet)?.into_iter().enumerate() {
                values.push(InvariantValue {
                    name: format!("nabla_{}({name})", j + 1),
                    order: o,
                    value: v,
                });
            }
        }
        let c = structure_constants(fr)?;
        for (k, ck) in c.iter().enumerate() {
            for i in 0..n {
                for j in i + 1..n {
                    values.push(InvariantValue {
                        name: index_name("c", k, i, j),
                        order: o,
                        value: ck[i][j],
                    });
                }
            }
        }
        let gamma = frame_christoffel(g0, fr)?;
        for (k, gk) in gamma.iter().enumerate() {
            for i in 0..n {
                for j in i..n {
                    values.push(InvariantValue {
                        name: index_name("Gamma", k, i, j),
                        order: o,
                        value: gk[i][j],
                    });
                }
            }
        }
        residuals.push(("frame_gram".into(), fr.gram_residual(g0)));
        residuals.push(("frame_compatibility".into(), compatibility_residual(g0, fr, &gamma)));
        if let Some(q) = &quaternionic {
            residuals.push(("quaternion_relations".into(), q.relation_residual));
            residuals.push(("quaternion_commutators".into(), q.commutator_residual));
        }
    }

    Ok(Evaluation {
        fundamental: f,
        normalized: nz,
        operator,
        spectrum,
        base,
        frame,
        quaternionic,
        skipped,
        values,
        residuals,
    })
}

/// Invariant values of order `≤ max_order` at the origin.
pub fn invariant_values(g: &MetricJet<f64>, max_order: usize) -> Result<Vec<InvariantValue>> {
    Ok(evaluate(g, max_order)?.values)
}

/// The report for a parsed metric: float invariants, exact ones where the
/// backend allows, and the self-check residuals.
pub fn invariant_report(metric: &AnyMetric, max_order: usize, seed: Option<u64>) -> Result<Report> {
    let g = metric.to_float();
    let n = g.dim();
    let ev = evaluate(&g, max_order)?;
    let mut invariants = Vec::new();
    for v in &ev.values {
        let exact = match (metric, v.name.as_str()) {
            (AnyMetric::Exact(ge), "Y_ratio") => Some(cotton_york_ratio_exact(ge)?),
            _ => None,
        };
        invariants.push(match exact {
            Some(q) => InvariantEntry {
                name: v.name.clone(),
                order: v.order,
                backend: Backend::Exact,
                value: ReportValue::exact(&q),
            },
            None => InvariantEntry {
                name: v.name.clone(),
                order: v.order,
                backend: Backend::Float,
                value: ReportValue::Float(v.value),
            },
        });
    }
    if let AnyMetric::Exact(ge) = metric {
        if n >= 4 && max_order >= base_order(n) {
            for (i, j, r) in trace_invariants_exact(ge)? {
                invariants.push(InvariantEntry {
                    name: format!("R_{i}_{j}"),
                    order: base_order(n),
                    backend: Backend::Exact,
                    value: ReportValue::exact(&r),
                });
            }
        }
    }
    let (p, qn) = metric.signature();
    Ok(Report {
        invariants,
        residuals: ev
            .residuals
            .iter()
            .map(|(check, value)| ResidualEntry {
                check: check.clone(),
                value: *value,
            })
            .collect(),
        meta: Meta {
            dim: n,
            signature: [p, qn],
            order: metric.order(),
            seed,
        },
    })
}

/// Spectrum of the fundamental operator at the origin, for display.
pub fn operator_spectrum(ev: &Evaluation) -> Vec<f64> {
    let _ = value_matrix(&ev.operator);
    ev.spectrum.real_eigenvalues()
}
