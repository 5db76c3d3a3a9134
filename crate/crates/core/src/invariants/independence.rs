//! Functional independence of invariant families by the numerical rank of their
//! Jacobian with respect to the metric-jet coefficients.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::pipeline::evaluate;
use crate::error::{Error, Result};
use crate::jet::{monomials_up_to, Jet, MultiIndex};
use crate::scalar::Q;
use crate::tensor::MetricJet;

/// Relative singular-value threshold for the numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-7;

/// Finite-difference step.
pub const STEP: f64 = 1e-3;

/// Gradient rows below `ROW_NOISE · (1 + |I|)` are round-off of a constant invariant.
pub const ROW_NOISE: f64 = 1e-8;

/// Minimum number of random trials.
pub const MIN_TRIALS: usize = 3;

/// Maps a metric jet to a vector of invariant values.
pub type Evaluator = Arc<dyn Fn(&MetricJet<f64>) -> Result<Vec<f64>> + Send + Sync>;

/// A named family of invariants with the rank it should reach.
#[derive(Clone)]
pub struct InvariantFamily {
    pub name: String,
    pub dim: usize,
    pub order: usize,
    pub expected_rank: usize,
    pub evaluator: Evaluator,
}

/// Every exported invariant of order `≤ order`, by name, failing when one is missing.
pub fn named_evaluator(names: Vec<String>, order: usize) -> Evaluator {
    Arc::new(move |g| {
        let ev = evaluate(g, order)?;
        names
            .iter()
            .map(|name| {
                ev.value(name)
                    .ok_or_else(|| Error::DegenerateStructure(format!("invariant {name} unavailable: {:?}", ev.skipped)))
            })
            .collect()
    })
}

/// All exported invariants of order `≤ order`; fails when the frame is missing.
pub fn pipeline_evaluator(order: usize, need_frame: bool) -> Evaluator {
    Arc::new(move |g| {
        let ev = evaluate(g, order)?;
        if need_frame && ev.frame.is_none() {
            return Err(Error::DegenerateStructure(format!("frame unavailable: {:?}", ev.skipped)));
        }
        Ok(ev.values.iter().map(|v| v.value).collect())
    })
}

/// The standard families: `(4,2)` base invariants and word traces, `(3,3)` the
/// Cotton–York ratio, `(4,3)` everything through order 3.
pub fn standard_family(n: usize, k: usize) -> Result<InvariantFamily> {
    let (expected_rank, evaluator, name): (usize, Evaluator, &str) = match (n, k) {
        (4, 2) => (3, pipeline_evaluator(2, false), "I_i and word traces"),
        (3, 3) => (1, named_evaluator(vec!["Y_ratio".into()], 3), "Cotton-York ratio"),
        (4, 3) => (39, pipeline_evaluator(3, true), "I_i, nabla_j I_i, c^k_ij, frame Gamma"),
        _ => {
            return Err(Error::WrongDimension(format!(
                "no standard invariant family for n = {n}, k = {k}; available: (4,2), (3,3), (4,3)"
            )))
        }
    };
    Ok(InvariantFamily {
        name: name.into(),
        dim: n,
        order: k,
        expected_rank,
        evaluator,
    })
}

/// Riemannian metric k-jet with value `δ` and uniform `[−1, 1]` higher coefficients.
pub fn random_float_metric(n: usize, k: usize, seed: u64) -> MetricJet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mons = monomials_up_to(n, k);
    let mut comps = vec![vec![Jet::zero(n, k); n]; n];
    for i in 0..n {
        for j in i..n {
            let terms: Vec<(MultiIndex, f64)> = mons
                .iter()
                .filter(|m| m.degree() > 0)
                .map(|m| (*m, rng.gen_range(-1.0..=1.0)))
                .collect();
            let mut jet = Jet::from_terms(n, k, terms);
            if i == j {
                jet = jet.add_constant(&1.0);
            }
            comps[i][j] = jet.clone();
            comps[j][i] = jet;
        }
    }
    MetricJet::new(comps, (n, 0), vec![Q::from_integer(0.into()); n]).expect("value δ is positive definite")
}

fn perturbed(g: &MetricJet<f64>, i: usize, j: usize, m: &MultiIndex, h: f64) -> Result<MetricJet<f64>> {
    let n = g.dim();
    let k = g.order();
    let bump = Jet::monomial(n, k, *m, h);
    let comps = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let c = g.component(a, b);
                    if (a, b) == (i, j) || (a, b) == (j, i) {
                        c + &bump
                    } else {
                        c.clone()
                    }
                })
                .collect()
        })
        .collect();
    MetricJet::new(comps, g.signature(), g.basepoint().to_vec())
}

/// Values at `g` and the Jacobian: one row per invariant, one column per
/// coefficient of `g_ij` (`i ≤ j`).
pub fn jacobian(evaluator: &Evaluator, g: &MetricJet<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = g.dim();
    let mons = monomials_up_to(n, g.order());
    let mut coords = Vec::new();
    for i in 0..n {
        for j in i..n {
            for m in &mons {
                coords.push((i, j, *m));
            }
        }
    }
    let values = evaluator(g)?;
    let rows = values.len();
    let column = |&(i, j, m): &(usize, usize, MultiIndex)| -> Result<Vec<f64>> {
        let mut f = [vec![], vec![], vec![], vec![]];
        for (slot, h) in [2.0 * STEP, STEP, -STEP, -2.0 * STEP].into_iter().enumerate() {
            f[slot] = evaluator(&perturbed(g, i, j, &m, h)?)?;
            if f[slot].len() != rows {
                return Err(Error::DegenerateStructure("invariant count changed under perturbation".into()));
            }
        }
        Ok((0..rows)
            .map(|r| (-f[0][r] + 8.0 * f[1][r] - 8.0 * f[2][r] + f[3][r]) / (12.0 * STEP))
            .collect())
    };
    let workers = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(coords.len().max(1));
    let chunk = coords.len().div_ceil(workers).max(1);
    let columns: Vec<Result<Vec<f64>>> = std::thread::scope(|s| {
        let handles: Vec<_> = coords
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(column).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((values, DMatrix::from_fn(rows, coords.len(), |r, c| columns[c][r])))
}

/// Numerical rank after dropping round-off rows and scaling the rest to unit norm.
pub fn normalized_rank(values: &[f64], jac: &DMatrix<f64>) -> usize {
    let kept: Vec<usize> = (0..jac.nrows())
        .filter(|&r| jac.row(r).norm() > ROW_NOISE * (1.0 + values[r].abs()))
        .collect();
    if kept.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(kept.len(), jac.ncols(), |r, c| {
        let row = kept[r];
        jac[(row, c)] / jac.row(row).norm()
    });
    super::spectral::numerical_rank(&m, RANK_THRESHOLD)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub invariants: usize,
    pub coordinates: usize,
    /// Rank per trial; `None` for a degenerate trial.
    pub trial_ranks: Vec<Option<usize>>,
    pub rank: usize,
    pub expected_rank: usize,
}

/// Maximal Jacobian rank of `family` over `trials` random jets seeded by `seed + t`.
///
/// Trials run in a fixed order; degenerate samples are skipped, and
/// [`Error::DegenerateSample`] is raised when every trial is degenerate.
pub fn jacobian_rank(family: &InvariantFamily, seed: u64, trials: usize) -> Result<RankReport> {
    let n = family.dim;
    let k = family.order;
    let trials = trials.max(MIN_TRIALS);
    let mut trial_ranks = Vec::with_capacity(trials);
    let mut last_error = None;
    let mut shape = (0, 0);
    for t in 0..trials as u64 {
        let g = random_float_metric(n, k, seed.wrapping_add(t));
        match jacobian(&family.evaluator, &g) {
            Ok((values, jac)) => {
                shape = (jac.nrows(), jac.ncols());
                trial_ranks.push(Some(normalized_rank(&values, &jac)));
            }
            Err(e) => {
                log::warn!("trial {t} of {}: {e}", family.name);
                last_error = Some(e);
                trial_ranks.push(None);
            }
        }
    }
    let rank = match trial_ranks.iter().flatten().max() {
        Some(&r) => r,
        None => {
            return Err(Error::DegenerateSample(format!(
                "all {trials} trials of {} failed; last: {}",
                family.name,
                last_error.map(|e| e.to_string()).unwrap_or_default()
            )))
        }
    };
    Ok(RankReport {
        family: family.name.clone(),
        n,
        k,
        seed,
        invariants: shape.0,
        coordinates: shape.1,
        trial_ranks,
        rank,
        expected_rank: family.expected_rank,
    })
}
