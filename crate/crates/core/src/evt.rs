//! Tail-index estimators over descending order statistics.
//!
//! All estimators take a positive sample sorted in non-increasing order
//! (`sample[0]` is the largest value `r(1)`) and a tail size `k`.
//! Accumulations run sequentially over `i = 1..k` so results are
//! bit-reproducible.
//!
//! With `M1 = (1/k) sum ln(r(i)/r(k+1))` and `M2` the mean of the squared log
//! spacings:
//!
//! | estimator    | value                                   |
//! |--------------|-----------------------------------------|
//! | hill         | `M1`                                    |
//! | pickands     | `ln((r(k) - r(2k)) / (r(2k) - r(4k))) / ln 2` |
//! | moment       | `M1 + 1 - 1 / (2 (1 - M1^2 / M2))`      |
//! | qq           | least-squares slope of `ln r(i)` on `-ln(i / (k+1))` |
//! | peng         | `M2 / (2 M1) + 1 - 1 / (2 (1 - M1^2 / M2))` |
//! | moment_ratio | `M2 / (2 M1)`                           |

// Negated comparisons below also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// `|1 - M1^2/M2|` below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Hill,
    Pickands,
    Moment,
    Qq,
    Peng,
    MomentRatio,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 6] = [
        EstimatorId::Hill,
        EstimatorId::Pickands,
        EstimatorId::Moment,
        EstimatorId::Qq,
        EstimatorId::Peng,
        EstimatorId::MomentRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorId::Hill => "hill",
            EstimatorId::Pickands => "pickands",
            EstimatorId::Moment => "moment",
            EstimatorId::Qq => "qq",
            EstimatorId::Peng => "peng",
            EstimatorId::MomentRatio => "moment_ratio",
        }
    }

    pub fn evaluate(self, sample: &[f64], k: usize) -> Result<f64> {
        match self {
            EstimatorId::Hill => hill(sample, k),
            EstimatorId::Pickands => pickands(sample, k),
            EstimatorId::Moment => moment(sample, k),
            EstimatorId::Qq => qq(sample, k),
            EstimatorId::Peng => peng(sample, k),
            EstimatorId::MomentRatio => moment_ratio(sample, k),
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown estimator `{s}`")))
    }
}

/// First and second moments of the top-k log spacings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSpacings {
    pub m1: f64,
    pub m2: f64,
}

impl LogSpacings {
    pub fn compute(sample: &[f64], k: usize) -> Result<Self> {
        let m = sample.len();
        if k == 0 || k + 1 > m {
            return Err(Error::KOutOfRange { k, m });
        }
        let anchor = sample[k];
        if !(anchor > 0.0) {
            return Err(Error::NonPositiveValue { index: k + 1 });
        }
        let ln_anchor = anchor.ln();
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for &r in &sample[..k] {
            let d = r.ln() - ln_anchor;
            s1 += d;
            s2 += d * d;
        }
        let kf = k as f64;
        let spacings = Self {
            m1: s1 / kf,
            m2: s2 / kf,
        };
        debug_assert!(spacings.m1 >= 0.0, "sample is not sorted descending");
        debug_assert!(
            spacings.m2 >= spacings.m1 * spacings.m1 * (1.0 - 1e-12),
            "M2 < M1^2: {spacings:?}"
        );
        Ok(spacings)
    }

    /// `1 - 1 / (2 (1 - M1^2/M2))`, the second-order correction shared by
    /// the moment and Peng estimators.
    fn moment_correction(&self) -> Result<f64> {
        if self.m2 == 0.0 {
            return Err(Error::DegenerateTail("second log moment is zero"));
        }
        let gap = 1.0 - self.m1 * self.m1 / self.m2;
        if gap.abs() < SINGULAR_TOL {
            return Err(Error::DegenerateTail("M1^2 / M2 is numerically 1"));
        }
        Ok(1.0 - 0.5 / gap)
    }
}

/// Hill estimator; returns 0 for a flat tail.
pub fn hill(sample: &[f64], k: usize) -> Result<f64> {
    Ok(LogSpacings::compute(sample, k)?.m1)
}

/// Pickands estimator. Needs `4k <= m` and strictly decreasing `r(k), r(2k), r(4k)`.
pub fn pickands(sample: &[f64], k: usize) -> Result<f64> {
    let m = sample.len();
    if k == 0 || 4 * k > m {
        return Err(Error::KOutOfRange { k, m });
    }
    let (a, b, c) = (sample[k - 1], sample[2 * k - 1], sample[4 * k - 1]);
    let upper = a - b;
    let lower = b - c;
    if !(lower > 0.0) || !(upper > 0.0) {
        return Err(Error::DegenerateSpacing(
            "tied order statistics at k, 2k, 4k",
        ));
    }
    Ok((upper / lower).ln() / std::f64::consts::LN_2)
}

/// Dekkers-Einmahl-de Haan moment estimator; may be negative.
pub fn moment(sample: &[f64], k: usize) -> Result<f64> {
    let ls = LogSpacings::compute(sample, k)?;
    Ok(ls.m1 + ls.moment_correction()?)
}

/// Slope of the Pareto QQ plot over the top `k` values.
pub fn qq(sample: &[f64], k: usize) -> Result<f64> {
    let m = sample.len();
    if k < 2 || k > m {
        return Err(Error::KOutOfRange { k, m });
    }
    if let Some(i) = sample[..k].iter().position(|&r| !(r > 0.0)) {
        return Err(Error::NonPositiveValue { index: i + 1 });
    }
    // The slope is invariant to shifting y, so anchor at ln r(k) to keep a
    // flat tail exactly flat, then regress on centred abscissae.
    let kp1 = (k + 1) as f64;
    let kf = k as f64;
    let ln_anchor = sample[k - 1].ln();
    let s_at = |i: usize| -((i + 1) as f64 / kp1).ln();
    let s_mean = (0..k).map(s_at).sum::<f64>() / kf;
    let (mut sxy, mut sxx) = (0.0f64, 0.0f64);
    for (i, &r) in sample[..k].iter().enumerate() {
        let ds = s_at(i) - s_mean;
        sxy += ds * (r.ln() - ln_anchor);
        sxx += ds * ds;
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateTail("quantile plot has no spread"));
    }
    Ok(sxy / sxx)
}

/// Peng estimator.
pub fn peng(sample: &[f64], k: usize) -> Result<f64> {
    let ls = LogSpacings::compute(sample, k)?;
    if ls.m1 == 0.0 {
        return Err(Error::DegenerateTail("first log moment is zero"));
    }
    let correction = ls.moment_correction()?;
    Ok(ls.m2 / (2.0 * ls.m1) + correction)
}

/// Moment-ratio estimator `M2 / (2 M1)`.
pub fn moment_ratio(sample: &[f64], k: usize) -> Result<f64> {
    let ls = LogSpacings::compute(sample, k)?;
    if ls.m1 == 0.0 {
        return Err(Error::DegenerateTail("first log moment is zero"));
    }
    Ok(ls.m2 / (2.0 * ls.m1))
}

/// `floor(sqrt(m))` clamped to `[5, floor(m/4)]`.
pub fn default_k(m: usize) -> Result<usize> {
    if m < 20 {
        return Err(Error::SampleTooSmall { m });
    }
    Ok(m.isqrt().clamp(5, m / 4))
}

/// Ten log-spaced tail sizes between 5 and `floor(m/4)`, deduplicated.
pub fn default_k_grid(m: usize) -> Result<Vec<usize>> {
    if m < 20 {
        return Err(Error::SampleTooSmall { m });
    }
    let (lo, hi) = (5.0f64, (m / 4) as f64);
    let mut grid: Vec<usize> = (0..10)
        .map(|i| {
            let t = i as f64 / 9.0;
            (lo.ln() + t * (hi.ln() - lo.ln())).exp().round() as usize
        })
        .map(|k| k.clamp(5, m / 4))
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Result of one estimator: a value or the reason it was skipped.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorValue {
    Value(f64),
    Degenerate(String),
}

impl EstimatorValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            EstimatorValue::Value(v) => Some(*v),
            EstimatorValue::Degenerate(_) => None,
        }
    }

    fn from_result(r: Result<f64>) -> Result<Self> {
        match r {
            Ok(v) if v.is_finite() => Ok(EstimatorValue::Value(v)),
            Ok(_) => Ok(EstimatorValue::Degenerate("non-finite estimate".into())),
            Err(e) if e.is_degenerate() || matches!(e, Error::KOutOfRange { .. }) => {
                Ok(EstimatorValue::Degenerate(e.kind().to_string()))
            }
            Err(e) => Err(e),
        }
    }
}

impl Serialize for EstimatorValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EstimatorValue::Value(v) => s.serialize_f64(*v),
            EstimatorValue::Degenerate(_) => s.serialize_str("degenerate"),
        }
    }
}

/// All six estimators on one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    /// Indexed like [`EstimatorId::ALL`].
    pub values: [EstimatorValue; 6],
    /// Tail size used; for a sweep, the default tail size of the sample.
    pub k: usize,
    /// Grid evaluated when the report holds sweep medians.
    pub k_grid: Option<Vec<usize>>,
    pub m: usize,
    /// Median of the non-degenerate values; `None` when all are degenerate.
    pub median_gamma: Option<f64>,
}

impl EstimatorReport {
    pub fn get(&self, id: EstimatorId) -> &EstimatorValue {
        &self.values[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (EstimatorId, &EstimatorValue)> {
        EstimatorId::ALL.into_iter().zip(self.values.iter())
    }

    pub fn is_degenerate(&self) -> bool {
        self.median_gamma.is_none()
    }

    fn from_values(
        values: [EstimatorValue; 6],
        k: usize,
        k_grid: Option<Vec<usize>>,
        m: usize,
    ) -> Self {
        let finite: Vec<f64> = values.iter().filter_map(EstimatorValue::value).collect();
        Self {
            median_gamma: median(&finite),
            values,
            k,
            k_grid,
            m,
        }
    }
}

/// Median with the two middle values averaged for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

fn check_sample(sample: &[f64]) -> Result<()> {
    if let Some(i) = sample.iter().position(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::NonPositiveValue { index: i + 1 });
    }
    Ok(())
}

/// Evaluates all six estimators at one `k`.
pub fn evaluate_all(sample: &[f64], k: usize) -> Result<EstimatorReport> {
    let m = sample.len();
    if k == 0 || k + 1 > m {
        return Err(Error::KOutOfRange { k, m });
    }
    check_sample(sample)?;
    let mut values = Vec::with_capacity(6);
    for id in EstimatorId::ALL {
        values.push(EstimatorValue::from_result(id.evaluate(sample, k))?);
    }
    let values: [EstimatorValue; 6] = values.try_into().expect("six estimators");
    Ok(EstimatorReport::from_values(values, k, None, m))
}

/// Per-estimator medians over a grid of tail sizes. Invalid `k` for an
/// estimator are skipped; an estimator with no valid evaluation is degenerate.
pub fn k_sweep(sample: &[f64], grid: Option<&[usize]>) -> Result<EstimatorReport> {
    let m = sample.len();
    let k_default = default_k(m)?;
    check_sample(sample)?;
    let grid = match grid {
        Some(g) if !g.is_empty() => g.to_vec(),
        Some(_) => return Err(Error::InvalidParam("empty k grid".into())),
        None => default_k_grid(m)?,
    };
    let mut values = Vec::with_capacity(6);
    for id in EstimatorId::ALL {
        let mut evals = Vec::with_capacity(grid.len());
        let mut last_reason = String::from("KOutOfRange");
        for &k in &grid {
            match EstimatorValue::from_result(id.evaluate(sample, k))? {
                EstimatorValue::Value(v) => evals.push(v),
                EstimatorValue::Degenerate(why) => last_reason = why,
            }
        }
        values.push(match median(&evals) {
            Some(v) => EstimatorValue::Value(v),
            None => EstimatorValue::Degenerate(last_reason),
        });
    }
    let values: [EstimatorValue; 6] = values.try_into().expect("six estimators");
    Ok(EstimatorReport::from_values(
        values,
        k_default,
        Some(grid),
        m,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e_powers() -> Vec<f64> {
        vec![3f64.exp(), 2f64.exp(), 1f64.exp(), 1.0]
    }

    #[test]
    fn hand_values() {
        let s = e_powers();
        assert!((hill(&s, 3).unwrap() - 2.0).abs() < 1e-12);
        assert!((moment(&s, 3).unwrap() + 0.5).abs() < 1e-12);
        assert!((peng(&s, 3).unwrap() + 4.0 / 3.0).abs() < 1e-12);
        assert!((moment_ratio(&s, 3).unwrap() - 7.0 / 6.0).abs() < 1e-12);
        assert!((pickands(&[8.0, 4.0, 3.0, 2.0], 1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pickands(&[3.0, 2.0, 1.5, 1.0], 1).unwrap(), 0.0);
        let q = [16.0, 4.0, 16.0 / 9.0];
        assert!((qq(&q, 3).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_spacings_of_e_powers() {
        let ls = LogSpacings::compute(&e_powers(), 3).unwrap();
        assert!((ls.m1 - 2.0).abs() < 1e-12);
        assert!((ls.m2 - 14.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_sample() {
        let c = [5.0; 4];
        assert_eq!(hill(&c, 3).unwrap(), 0.0);
        assert_eq!(qq(&c, 3).unwrap(), 0.0);
        assert!(matches!(moment(&c, 3), Err(Error::DegenerateTail(_))));
        assert!(matches!(peng(&c, 3), Err(Error::DegenerateTail(_))));
        assert!(matches!(moment_ratio(&c, 3), Err(Error::DegenerateTail(_))));
        assert!(matches!(pickands(&c, 1), Err(Error::DegenerateSpacing(_))));
    }

    #[test]
    fn singular_moment_guard() {
        // One spacing of size d and k-1 zeros gives M1^2/M2 = 1/k; with k = 1
        // the ratio is exactly one.
        let s = [std::f64::consts::E, 1.0];
        assert!(matches!(moment(&s, 1), Err(Error::DegenerateTail(_))));
        assert!(matches!(peng(&s, 1), Err(Error::DegenerateTail(_))));
        assert!((moment_ratio(&s, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn k_range_errors() {
        let s = e_powers();
        assert!(matches!(hill(&s, 0), Err(Error::KOutOfRange { .. })));
        assert!(matches!(hill(&s, 4), Err(Error::KOutOfRange { .. })));
        assert!(matches!(pickands(&s, 2), Err(Error::KOutOfRange { .. })));
        assert!(matches!(qq(&s, 1), Err(Error::KOutOfRange { .. })));
        assert!(qq(&s, 4).is_ok());
        assert!(matches!(
            qq(&[1.0, 0.0], 2),
            Err(Error::NonPositiveValue { index: 2 })
        ));
        assert!(matches!(
            hill(&[2.0, 0.0], 1),
            Err(Error::NonPositiveValue { index: 2 })
        ));
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(100).unwrap(), 10);
        assert_eq!(default_k(20).unwrap(), 5);
        assert_eq!(default_k(1_000_000).unwrap(), 1000);
        assert_eq!(default_k(19), Err(Error::SampleTooSmall { m: 19 }));
        for m in 20..2000 {
            let k = default_k(m).unwrap();
            assert!(k >= 5 && 4 * k <= m);
        }
    }

    #[test]
    fn default_grid_is_log_spaced_and_bounded() {
        let g = default_k_grid(124_750).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 5);
        assert_eq!(*g.last().unwrap(), 124_750 / 4);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let small = default_k_grid(20).unwrap();
        assert_eq!(small, vec![5]);
    }

    #[test]
    fn sweep_of_single_k_matches_single_evaluation() {
        let s: Vec<f64> = (1..=200).rev().map(|i| (i as f64).powf(1.3)).collect();
        let single = evaluate_all(&s, 12).unwrap();
        let swept = k_sweep(&s, Some(&[12])).unwrap();
        assert_eq!(single.values, swept.values);
        assert_eq!(swept.k_grid.as_deref(), Some(&[12][..]));
    }

    #[test]
    fn sweep_qq_on_exact_quantiles() {
        let m = 400;
        let gamma = 0.7;
        let s: Vec<f64> = (1..=m)
            .map(|i| (i as f64 / (m + 1) as f64).powf(-gamma))
            .collect();
        for k in default_k_grid(m).unwrap() {
            assert!((qq(&s, k).unwrap() - gamma).abs() < 1e-6, "k = {k}");
        }
        let rep = k_sweep(&s, None).unwrap();
        assert!((rep.get(EstimatorId::Qq).value().unwrap() - gamma).abs() < 1e-6);
    }

    #[test]
    fn report_marks_degenerate_and_medians() {
        let c = vec![5.0; 40];
        let rep = evaluate_all(&c, 5).unwrap();
        assert_eq!(rep.get(EstimatorId::Hill), &EstimatorValue::Value(0.0));
        assert_eq!(rep.get(EstimatorId::Qq), &EstimatorValue::Value(0.0));
        assert!(rep.get(EstimatorId::Moment).value().is_none());
        assert_eq!(rep.median_gamma, Some(0.0));
        assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn estimator_names_round_trip() {
        for id in EstimatorId::ALL {
            assert_eq!(id.name().parse::<EstimatorId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
    }

    fn positive_sorted() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1e-3f64..1e3, 8..80).prop_map(|mut v| {
            v.sort_by(|a, b| b.total_cmp(a));
            v
        })
    }

    proptest! {
        #[test]
        fn hill_nonnegative_and_cauchy_schwarz(s in positive_sorted(), kf in 0.0f64..1.0) {
            let k = 1 + (kf * (s.len() - 2) as f64) as usize;
            let ls = LogSpacings::compute(&s, k).unwrap();
            prop_assert!(ls.m1 >= 0.0);
            prop_assert!(ls.m2 >= ls.m1 * ls.m1 * (1.0 - 1e-12));
        }

        #[test]
        fn scale_invariance(s in positive_sorted(), c in 1e-3f64..1e3) {
            let k = (s.len() / 4).max(2);
            let scaled: Vec<f64> = s.iter().map(|v| v * c).collect();
            for id in EstimatorId::ALL {
                if let (Ok(a), Ok(b)) = (id.evaluate(&s, k), id.evaluate(&scaled, k)) {
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{id}: {a} vs {b}");
                }
            }
        }
    }
}
