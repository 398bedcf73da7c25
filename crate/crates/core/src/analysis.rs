//! Loop scores over time, their relative contributions, rankings and
//! catalog comparisons.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::discovery::{LoopCatalog, LoopRecord};
use crate::dsl::{Model, VarKind};
use crate::scoring::LinkScoreSeries;
use crate::sim::eval::{self, Inputs};
use crate::sim::{Replayer, RunResult};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("loop edge {src} -> {dst} is not a dependency of the model")]
    MissingEdge { src: String, dst: String },
    #[error("loop variable {0} is not in the model")]
    UnknownVariable(String),
    #[error("{0} has no self-adjustment, so its steady-state gain is undefined")]
    NoSelfAdjustment(String),
    #[error("derivative of {0} could not be evaluated")]
    Evaluation(String),
}

/// Signed product of the loop's link scores at every step.
pub fn loop_score_series(record: &LoopRecord, series: &LinkScoreSeries) -> Result<Vec<f64>, AnalysisError> {
    let mut product = vec![1.0; series.times.len()];
    for (src, dst) in record.edges() {
        let edge = series.series(src, dst).ok_or_else(|| AnalysisError::MissingEdge {
            src: src.into(),
            dst: dst.into(),
        })?;
        for (p, s) in product.iter_mut().zip(edge) {
            *p *= s;
        }
    }
    Ok(product)
}

/// Per-step share of each loop in the total loop score magnitude.
///
/// `scores[loop][k]`. Steps where every loop scores 0 get 0 for all loops;
/// otherwise the shares sum to 1.
pub fn relative_scores(scores: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let steps = scores.first().map_or(0, Vec::len);
    let mut relative = vec![vec![0.0; steps]; scores.len()];
    for k in 0..steps {
        // dividing by the largest magnitude first keeps huge products finite
        let largest = scores.iter().map(|s| s[k].abs()).fold(0.0, f64::max);
        if largest == 0.0 || !largest.is_finite() {
            continue;
        }
        let total: f64 = scores.iter().map(|s| s[k].abs() / largest).sum();
        for (r, s) in relative.iter_mut().zip(scores) {
            r[k] = s[k].abs() / largest / total;
        }
    }
    relative
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Reinforcing,
    Balancing,
    Mixed,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Reinforcing => "reinforcing",
            Polarity::Balancing => "balancing",
            Polarity::Mixed => "mixed",
        }
    }
}

/// Polarity from the signs of the nonzero scores. `None` when the loop is
/// never active.
pub fn classify_polarity(score_series: &[f64]) -> Option<Polarity> {
    let positive = score_series.iter().any(|&s| s > 0.0);
    let negative = score_series.iter().any(|&s| s < 0.0);
    match (positive, negative) {
        (false, false) => None,
        (true, false) => Some(Polarity::Reinforcing),
        (false, true) => Some(Polarity::Balancing),
        (true, true) => Some(Polarity::Mixed),
    }
}

pub const NEVER_ACTIVE: &str = "never active";

#[derive(Clone, Debug, PartialEq)]
pub struct LoopProfile {
    pub record: LoopRecord,
    pub score_series: Vec<f64>,
    pub relative_series: Vec<f64>,
    /// Mean relative score over steps `1..=n`.
    pub avg_contribution: f64,
    pub polarity: Polarity,
    /// [`NEVER_ACTIVE`] for loops whose score is always 0.
    pub note: Option<&'static str>,
}

/// Profiles for every loop of `catalog`, in catalog order. Relative scores
/// are normalized over this catalog only.
pub fn profile_catalog(catalog: &LoopCatalog, series: &LinkScoreSeries) -> Result<Vec<LoopProfile>, AnalysisError> {
    let scores = catalog
        .records()
        .iter()
        .map(|r| loop_score_series(r, series))
        .collect::<Result<Vec<_>, _>>()?;
    let relative = relative_scores(&scores);
    let n = series.steps();
    Ok(catalog
        .records()
        .iter()
        .zip(scores)
        .zip(relative)
        .map(|((record, score_series), relative_series)| {
            let avg_contribution = if n == 0 {
                0.0
            } else {
                relative_series[1..].iter().sum::<f64>() / n as f64
            };
            let polarity = classify_polarity(&score_series);
            LoopProfile {
                record: record.clone(),
                avg_contribution,
                polarity: polarity.unwrap_or(Polarity::Mixed),
                note: polarity.is_none().then_some(NEVER_ACTIVE),
                score_series,
                relative_series,
            }
        })
        .collect())
}

/// Profiles sorted by descending average contribution (ties keep catalog
/// order), without those below `threshold`, at most `top` of them.
pub fn rank_and_filter(
    catalog: &LoopCatalog,
    series: &LinkScoreSeries,
    threshold: f64,
    top: Option<usize>,
) -> Result<Vec<LoopProfile>, AnalysisError> {
    let mut profiles = profile_catalog(catalog, series)?;
    profiles.sort_by(|a, b| b.avg_contribution.total_cmp(&a.avg_contribution));
    profiles.retain(|p| p.avg_contribution >= threshold);
    if let Some(top) = top {
        profiles.truncate(top);
    }
    Ok(profiles)
}

/// Length of the longest run of consecutive variables shared by two cycles,
/// reading both cyclically, as a fraction of the longer cycle.
pub fn common_segment_ratio(a: &[String], b: &[String]) -> f64 {
    let (m, n) = (a.len(), b.len());
    if m == 0 || n == 0 {
        return 0.0;
    }
    let limit = m.min(n);
    let mut longest = 0;
    // longest common substring of a+a and b+b, capped at the shorter cycle
    let mut prev = vec![0usize; 2 * n + 1];
    let mut cur = vec![0usize; 2 * n + 1];
    for i in 0..2 * m {
        for j in 0..2 * n {
            cur[j + 1] = if a[i % m] == b[j % n] {
                (prev[j] + 1).min(limit)
            } else {
                0
            };
            longest = longest.max(cur[j + 1]);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    longest as f64 / m.max(n) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopEntry {
    pub cycle: Vec<String>,
    pub avg_contribution: f64,
    pub present: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearMiss {
    /// A reference loop absent from the candidate catalog.
    pub missing: Vec<String>,
    /// The most similar candidate loop.
    pub closest: Vec<String>,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport {
    pub reference_size: usize,
    pub candidate_size: usize,
    pub intersection: usize,
    /// The reference's strongest loops by average contribution.
    pub top: Vec<TopEntry>,
    pub near_misses: Vec<NearMiss>,
}

/// How much of `reference` (usually an exhaustive catalog) `candidate`
/// recovered. Each missing reference loop is paired with its most similar
/// candidate loop when their [`common_segment_ratio`] is at least
/// `near_miss_ratio`.
pub fn compare_catalogs(
    reference: &LoopCatalog,
    candidate: &LoopCatalog,
    series: &LinkScoreSeries,
    top_n: usize,
    near_miss_ratio: f64,
) -> Result<CompletenessReport, AnalysisError> {
    let ranked = rank_and_filter(reference, series, 0.0, None)?;
    // candidates must be scorable against the same series too
    profile_catalog(candidate, series)?;

    let intersection = reference
        .records()
        .iter()
        .filter(|r| candidate.contains(&r.cycle))
        .count();
    let top = ranked
        .iter()
        .take(top_n)
        .map(|p| TopEntry {
            cycle: p.record.cycle.clone(),
            avg_contribution: p.avg_contribution,
            present: candidate.contains(&p.record.cycle),
        })
        .collect();

    let mut near_misses = Vec::new();
    for p in ranked.iter().filter(|p| !candidate.contains(&p.record.cycle)) {
        let best = candidate
            .records()
            .iter()
            .map(|c| (common_segment_ratio(&p.record.cycle, &c.cycle), c))
            .fold(None::<(f64, &LoopRecord)>, |acc, x| match acc {
                Some(a) if a.0 >= x.0 => Some(a),
                _ => Some(x),
            });
        if let Some((ratio, closest)) = best {
            if ratio >= near_miss_ratio {
                near_misses.push(NearMiss {
                    missing: p.record.cycle.clone(),
                    closest: closest.cycle.clone(),
                    ratio,
                });
            }
        }
    }

    Ok(CompletenessReport {
        reference_size: reference.len(),
        candidate_size: candidate.len(),
        intersection,
        top,
        near_misses,
    })
}

struct At<'a> {
    run: &'a RunResult,
    k: usize,
}

impl Inputs for At<'_> {
    fn value(&self, var: usize) -> f64 {
        self.run.values[var][self.k]
    }
    fn time(&self) -> f64 {
        self.run.times[self.k]
    }
    fn dt(&self) -> f64 {
        self.run.spec.dt
    }
}

/// Open-loop steady-state gain of `cycle`, linearized at step `k` of `run`.
///
/// Aux and flow links contribute their partial derivative. A flow entering or
/// leaving stock `S` contributes `±1 / a`, where `a = -Σ ±∂flow/∂S` over the
/// flows attached to `S` is the stock's own adjustment rate; this is the
/// change in `S`'s equilibrium per unit of sustained flow.
pub fn steady_state_gain(model: &Model, run: &RunResult, cycle: &[String], k: usize) -> Result<f64, AnalysisError> {
    let replay = Replayer::new(model);
    let at = At { run, k };
    let index = |name: &str| {
        model
            .index_of(name)
            .ok_or_else(|| AnalysisError::UnknownVariable(name.into()))
    };
    let derivative = |z: usize, x: usize| {
        eval::partial(replay.root(z), x, &at, run.branch_trace.at(z, k))
            .map_err(|_| AnalysisError::Evaluation(model.variables[z].name.clone()))
    };

    let n = cycle.len();
    let mut gain = 1.0;
    for i in 0..n {
        let (src, dst) = (&cycle[i], &cycle[(i + 1) % n]);
        let x = index(src)?;
        let z = index(dst)?;
        let var = &model.variables[z];
        if var.kind != VarKind::Stock {
            gain *= derivative(z, x)?;
            continue;
        }
        let sign = |f: &String| if var.inflows.contains(f) { 1.0 } else { -1.0 };
        if !var.inflows.contains(src) && !var.outflows.contains(src) {
            return Err(AnalysisError::MissingEdge {
                src: src.clone(),
                dst: dst.clone(),
            });
        }
        let mut rate = 0.0;
        for f in var.inflows.iter().chain(&var.outflows) {
            rate -= sign(f) * derivative(index(f)?, z)?;
        }
        if rate == 0.0 {
            return Err(AnalysisError::NoSelfAdjustment(var.name.clone()));
        }
        gain *= sign(src) / rate;
    }
    Ok(gain)
}

#[cfg(test)]
mod tests;
