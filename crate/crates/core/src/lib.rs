//! Evaluation of non-binary foreground maps against binary ground truth.
//!
//! The core measure is the structure-measure ([`structure_measure`]), which
//! blends a region-aware SSIM over a centroid-anchored block partition with
//! an object-aware foreground/background contrast term. Pixel-wise baselines
//! (Fβ, weighted Fβ, AP, AUC) live in [`baselines`], and [`meta`] holds the
//! meta-measure protocols that score an evaluation measure itself.
//! [`cli`] drives everything from a JSON dataset manifest.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod map;
pub mod meta;
pub mod smeasure;

pub use baselines::{auc, average_precision, f_beta, fbw, pr_curve, roc_curve, Curve, CurveKind, FbwParams};
pub use error::{Error, Result};
pub use map::{
    confusion_counts, foreground_centroid, invert, load_binary_map, load_gray_map, region_stats, threshold_map, BinMap, ConfusionCounts, GrayMap,
    RegionStats,
};
pub use meta::{MetaResult, RankVector, ScoreMatrix};
pub use smeasure::{object_component, object_score, region_score, ssim_block, structure_measure, BlockWeighting, SMeasureParams};
