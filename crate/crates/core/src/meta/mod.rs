//! Meta-measures: protocols that score an evaluation measure rather than a
//! saliency model.
//!
//! | id | protocol | lower is better |
//! |----|----------|-----------------|
//! | 1  | ranking agreement with an application's output quality | yes |
//! | 2  | generic (content-blind) map beating the state of the art | yes |
//! | 3  | score increase after switching to a wrong ground truth | yes |
//! | 4  | ranking stability under slight annotation perturbation | yes |
//! | 5  | rank distance between two measures' top choices | n/a |
//!
//! Every randomized step draws from a ChaCha stream keyed by `(seed, index)`,
//! so serial and parallel runs produce identical results.

pub mod annotation;
pub mod morphology;
pub mod rank_distance;
pub mod scores;
pub mod switch;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::GrayMap;

pub use annotation::{mm4_annotation_robustness, mm4_annotation_robustness_with, PerturbParams};
pub use morphology::{perturb_gt, structure_change, PerturbMode};
pub use rank_distance::{mm5_from_scores, mm5_rank_distance, select_study_pairs, RankDistanceEntry, RankDistances, StudyPair};
pub use scores::{RankVector, ScoreMatrix};
pub use switch::{mm3_gt_switch, mm3_gt_switch_grouped, mm3_gt_switch_with, GoodSelection, GtSwitchParams, TiePolicy};

/// Per-image (or per-map) share of a meta-measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: String,
    pub value: f64,
    /// Eroded annotation-change magnitude (MM4 only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub structure_change: Option<f64>,
    /// Spearman was undefined for this image (all models tied).
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaResult {
    pub mm_id: u8,
    pub value: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub percentage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub histogram: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_image: Option<Vec<Contribution>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl MetaResult {
    fn new(mm_id: u8, value: f64) -> Self {
        MetaResult {
            mm_id,
            value,
            seed: 0,
            percentage: None,
            histogram: None,
            per_image: None,
            warnings: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Pearson correlation of two rank vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    /// One of the inputs was constant; `rho` is reported as 0.
    pub degenerate: bool,
}

/// Spearman's ρ as the Pearson correlation of (tie-averaged) ranks.
pub fn spearman_rho(a: &RankVector, b: &RankVector) -> Result<Correlation> {
    let (x, y) = (a.ranks(), b.ranks());
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter("spearman needs at least 2 entries".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(Correlation { rho: 0.0, degenerate: true });
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(Correlation { rho, degenerate: false })
}

/// `1 − ρ` for one image, or 0 with a warning when ρ is undefined.
pub(crate) fn rank_disagreement(id: &str, a: &RankVector, b: &RankVector, warnings: &mut Vec<String>) -> Result<Contribution> {
    let c = spearman_rho(a, b)?;
    if c.degenerate {
        warnings.push(format!("{id}: all models tied, Spearman undefined; contribution set to 0"));
    }
    Ok(Contribution {
        id: id.to_string(),
        value: if c.degenerate { 0.0 } else { 1.0 - c.rho },
        structure_change: None,
        degenerate: c.degenerate,
    })
}

/// RNG for item `index` of a run seeded with `seed`.
pub fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Seed for item `index`, for APIs that take a plain seed.
pub fn item_seed(seed: u64, index: usize) -> u64 {
    item_rng(seed, index).next_u64()
}

/// MM1: mean over images of `1 − ρ` between the ranking of models by the
/// measure and by the application's output quality.
pub fn mm1_application_ranking(measure_scores: &ScoreMatrix, application_scores: &ScoreMatrix) -> Result<MetaResult> {
    let app = application_scores.aligned_to(measure_scores)?;
    if measure_scores.n_images() == 0 {
        return Err(Error::EmptyInput("mm1: no images"));
    }
    let mut warnings = Vec::new();
    let mut per_image = Vec::with_capacity(measure_scores.n_images());
    for (i, id) in measure_scores.image_ids().iter().enumerate() {
        let a = RankVector::from_scores(measure_scores.row(i));
        let b = RankVector::from_scores(app.row(i));
        per_image.push(rank_disagreement(id, &a, &b, &mut warnings)?);
    }
    let value = per_image.iter().map(|c| c.value).sum::<f64>() / per_image.len() as f64;
    let mut result = MetaResult::new(1, value);
    result.per_image = Some(per_image);
    result.warnings = warnings;
    Ok(result)
}

/// Centered Gaussian with `σ = sigma_frac · min(width, height)`, scaled so its
/// maximum is 1.
pub fn gaussian_baseline_map(width: usize, height: usize, sigma_frac: f64) -> Result<GrayMap> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter("gaussian map needs positive dimensions".into()));
    }
    if !(sigma_frac > 0.0 && sigma_frac.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma_frac {sigma_frac} must be positive")));
    }
    let sigma = sigma_frac * width.min(height) as f64;
    let (rc, cc) = ((height - 1) as f64 / 2.0, (width - 1) as f64 / 2.0);
    let raw = |r: usize, c: usize| {
        let (dr, dc) = (r as f64 - rc, c as f64 - cc);
        (-(dr * dr + dc * dc) / (2.0 * sigma * sigma)).exp()
    };
    // the peak sits on the pixel(s) nearest the center
    let peak = raw(height / 2, width / 2);
    GrayMap::from_fn(width, height, |r, c| (raw(r, c) / peak).min(1.0))
}

/// MM2: number of images where the generic map outscores the mean of the
/// state-of-the-art models. `generic_scores` is aligned with the matrix rows.
pub fn mm2_generic_vs_sota(sota_scores: &ScoreMatrix, generic_scores: &[f64]) -> Result<MetaResult> {
    if generic_scores.len() != sota_scores.n_images() {
        return Err(Error::IdMismatch(format!(
            "{} generic scores for {} images",
            generic_scores.len(),
            sota_scores.n_images()
        )));
    }
    if sota_scores.n_images() == 0 || sota_scores.n_models() == 0 {
        return Err(Error::EmptyInput("mm2: empty score matrix"));
    }
    let mut per_image = Vec::with_capacity(generic_scores.len());
    let mut count = 0u64;
    for (i, (id, &g)) in sota_scores.image_ids().iter().zip(generic_scores).enumerate() {
        let row = sota_scores.row(i);
        let mean = row.iter().sum::<f64>() / row.len() as f64;
        let hit = g > mean;
        count += u64::from(hit);
        per_image.push(Contribution {
            id: id.clone(),
            value: if hit { 1.0 } else { 0.0 },
            structure_change: None,
            degenerate: false,
        });
    }
    let mut result = MetaResult::new(2, count as f64);
    result.percentage = Some(100.0 * count as f64 / generic_scores.len() as f64);
    result.per_image = Some(per_image);
    Ok(result)
}
