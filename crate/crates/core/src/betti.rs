//! Point set to estimator report, and majority-vote comparison.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evt::{self, EstimatorId, EstimatorReport};
use crate::pointset::PointSet;
use crate::radii::{self, RadiiSample};

/// Relative tolerance under which two estimates count as tied.
pub const VOTE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    /// Fixed tail size; `None` uses [`evt::default_k`].
    pub k: Option<usize>,
    /// Subsample cap for the pairwise step; `None` disables subsampling.
    pub max_points: Option<usize>,
    pub seed: u64,
    /// Report per-estimator medians over the default k grid.
    pub sweep: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            k: None,
            max_points: Some(radii::DEFAULT_MAX_POINTS),
            seed: radii::DEFAULT_SEED,
            sweep: false,
        }
    }
}

/// Estimator report together with the radius sample bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub n_points: usize,
    pub n_radii: usize,
    pub dropped_zeros: usize,
    pub report: EstimatorReport,
}

/// Runs radius extraction and all six estimators.
pub fn estimate(ps: &PointSet, opts: &EstimateOptions) -> Result<Estimate> {
    let rs = radii::extract_radii(ps, opts.max_points, Some(opts.seed))?;
    estimate_radii(ps.len(), &rs, opts)
}

pub fn estimate_radii(
    n_points: usize,
    rs: &RadiiSample,
    opts: &EstimateOptions,
) -> Result<Estimate> {
    let sample = rs.values();
    let report = if opts.sweep {
        evt::k_sweep(sample, None)?
    } else {
        let k = match opts.k {
            Some(k) => {
                if sample.len() < 20 {
                    return Err(Error::SampleTooSmall { m: sample.len() });
                }
                k
            }
            None => evt::default_k(sample.len())?,
        };
        evt::evaluate_all(sample, k)?
    };
    Ok(Estimate {
        n_points,
        n_radii: rs.m(),
        dropped_zeros: rs.dropped_zeros,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Vote {
    #[serde(rename = "A_larger")]
    ALarger,
    #[serde(rename = "B_larger")]
    BLarger,
    #[serde(rename = "abstain")]
    Abstain,
}

impl Vote {
    pub fn as_str(self) -> &'static str {
        match self {
            Vote::ALarger => "A_larger",
            Vote::BLarger => "B_larger",
            Vote::Abstain => "abstain",
        }
    }

    fn mirrored(self) -> Self {
        match self {
            Vote::ALarger => Vote::BLarger,
            Vote::BLarger => Vote::ALarger,
            Vote::Abstain => Vote::Abstain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "A_larger")]
    ALarger,
    #[serde(rename = "B_larger")]
    BLarger,
    #[serde(rename = "indeterminate")]
    Indeterminate,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::ALarger => "A_larger",
            Outcome::BLarger => "B_larger",
            Outcome::Indeterminate => "indeterminate",
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Outcome::ALarger => Outcome::BLarger,
            Outcome::BLarger => Outcome::ALarger,
            Outcome::Indeterminate => Outcome::Indeterminate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    /// Indexed like [`EstimatorId::ALL`].
    pub votes: [Vote; 6],
    pub a_larger: usize,
    pub b_larger: usize,
    pub abstain: usize,
    pub outcome: Outcome,
    pub a: Estimate,
    pub b: Estimate,
}

impl Verdict {
    pub fn vote(&self, id: EstimatorId) -> Vote {
        self.votes[id as usize]
    }

    /// The verdict with A and B exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            votes: self.votes.map(Vote::mirrored),
            a_larger: self.b_larger,
            b_larger: self.a_larger,
            abstain: self.abstain,
            outcome: self.outcome.mirrored(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

fn vote(a: Option<f64>, b: Option<f64>) -> Vote {
    let (Some(a), Some(b)) = (a, b) else {
        return Vote::Abstain;
    };
    let diff = a - b;
    if diff.abs() <= VOTE_TOL * a.abs().max(b.abs()).max(1.0) {
        Vote::Abstain
    } else if diff > 0.0 {
        Vote::ALarger
    } else {
        Vote::BLarger
    }
}

/// Majority vote between two already computed estimates.
pub fn verdict(a: Estimate, b: Estimate) -> Verdict {
    let votes: [Vote; 6] =
        EstimatorId::ALL.map(|id| vote(a.report.get(id).value(), b.report.get(id).value()));
    let count = |v: Vote| votes.iter().filter(|&&x| x == v).count();
    let (a_larger, b_larger, abstain) = (
        count(Vote::ALarger),
        count(Vote::BLarger),
        count(Vote::Abstain),
    );
    let outcome = match a_larger.cmp(&b_larger) {
        std::cmp::Ordering::Greater => Outcome::ALarger,
        std::cmp::Ordering::Less => Outcome::BLarger,
        std::cmp::Ordering::Equal => Outcome::Indeterminate,
    };
    Verdict {
        votes,
        a_larger,
        b_larger,
        abstain,
        outcome,
        a,
        b,
    }
}

/// Estimates both sets with the same options and lets the six estimators vote.
pub fn compare(a: &PointSet, b: &PointSet, opts: &EstimateOptions) -> Result<Verdict> {
    Ok(verdict(estimate(a, opts)?, estimate(b, opts)?))
}

/// One entry of a ranking, largest score first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    /// Position of the set in the input list.
    pub input_index: usize,
    /// Pairwise wins against sets with the same median score.
    pub tie_wins: usize,
    pub estimate: Estimate,
}

/// Orders point sets by descending `median_gamma`.
///
/// Sets whose medians are exactly equal (or both degenerate) are ordered by
/// how many pairwise majority votes they win inside that tied group, then by
/// input position. Degenerate medians sort last.
pub fn rank(sets: &[PointSet], opts: &EstimateOptions) -> Result<Vec<Ranked>> {
    if sets.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "ranking needs at least 2 point sets, got {}",
            sets.len()
        )));
    }
    let estimates = sets
        .iter()
        .map(|ps| estimate(ps, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_estimates(estimates))
}

pub fn rank_estimates(estimates: Vec<Estimate>) -> Vec<Ranked> {
    let n = estimates.len();
    let key = |e: &Estimate| e.report.median_gamma.map(f64::to_bits);
    let mut tie_wins = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if key(&estimates[i]) != key(&estimates[j]) {
                continue;
            }
            match verdict(estimates[i].clone(), estimates[j].clone()).outcome {
                Outcome::ALarger => tie_wins[i] += 1,
                Outcome::BLarger => tie_wins[j] += 1,
                Outcome::Indeterminate => {}
            }
        }
    }
    let mut ranked: Vec<Ranked> = estimates
        .into_iter()
        .enumerate()
        .map(|(input_index, estimate)| Ranked {
            input_index,
            tie_wins: tie_wins[input_index],
            estimate,
        })
        .collect();
    ranked.sort_by(|x, y| {
        let mx = x.estimate.report.median_gamma;
        let my = y.estimate.report.median_gamma;
        let by_median = match (mx, my) {
            (Some(a), Some(b)) => b.total_cmp(&a),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        by_median
            .then(y.tie_wins.cmp(&x.tie_wins))
            .then(x.input_index.cmp(&y.input_index))
    });
    ranked
}
