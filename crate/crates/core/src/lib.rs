//! Comparative Betti-number scores for unstructured point sets.
//!
//! Every pairwise distance of a point set is halved and treated as the radius
//! of a potential hole. The descending radius list is heavy at the top when a
//! set has large holes, so classical extreme-value tail-index estimators turn
//! it into a scalar score. Six estimators are evaluated and combined by
//! majority vote when two sets are compared.
//!
//! The score is comparative: it ranks and orders point sets, it does not
//! recover integer Betti numbers.
//!
//! Pipeline:
//!
//! - [`pointset`]: point-set model plus csv / xyz / ascii ply I/O.
//! - [`synth`]: seeded circle, torus, holed-rectangle and Pareto generators.
//! - [`radii`]: sorted half pairwise distances.
//! - [`evt`]: Hill, Pickands, moment, QQ, Peng and moment-ratio estimators.
//! - [`betti`]: estimate / compare / rank.
//! - [`takens`]: delay embedding of scalar series into point clouds.

pub mod betti;
pub mod error;
pub mod evt;
pub mod pointset;
pub mod radii;
pub mod synth;
pub mod takens;

pub use betti::{compare, estimate, rank, EstimateOptions, Outcome, Verdict, Vote};
pub use error::{Error, Result};
pub use evt::{EstimatorId, EstimatorReport, EstimatorValue};
pub use pointset::{parse_pointset, write_pointset, Format, PointSet};
pub use radii::{extract_radii, RadiiSample};
pub use takens::{embed, parse_series, Series};
