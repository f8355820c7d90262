//! MM4, annotation robustness: model rankings should survive slight
//! morphological edits of the ground truth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::morphology::{perturb_gt, structure_change, PerturbMode};
use super::{item_seed, rank_disagreement, Contribution, MetaResult, RankVector};
use crate::error::{Error, Result};
use crate::map::{BinMap, GrayMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbParams {
    pub radius: usize,
    pub mode: PerturbMode,
    /// Erosion radius applied to the GT difference map when measuring the
    /// size of the structural change.
    pub change_radius: usize,
}

impl Default for PerturbParams {
    fn default() -> Self {
        PerturbParams {
            radius: 2,
            mode: PerturbMode::Mixed,
            change_radius: 1,
        }
    }
}

enum Outcome {
    Scored(Contribution, Vec<String>),
    Skipped(String),
}

/// MM4: mean over images of `1 − ρ` between the model ranking against the
/// ground truth and against its perturbed copy.
///
/// `sms_per_image[i]` holds every model's map for image `i`, in a fixed model
/// order. Image `i` is perturbed with `item_seed(seed, i)`. Images where the
/// measure fails on the perturbed ground truth are skipped with a warning.
pub fn mm4_annotation_robustness<F>(
    measure: F,
    image_ids: &[String],
    sms_per_image: &[Vec<GrayMap>],
    gts: &[BinMap],
    params: &PerturbParams,
    seed: u64,
) -> Result<MetaResult>
where
    F: Fn(&GrayMap, &BinMap) -> Result<f64> + Sync,
{
    if sms_per_image.len() != gts.len() {
        return Err(Error::LengthMismatch(sms_per_image.len(), gts.len()));
    }
    mm4_annotation_robustness_with(measure, image_ids, |i| Ok(sms_per_image[i].clone()), gts, params, seed)
}

/// [`mm4_annotation_robustness`] with each image's maps decoded on demand.
pub fn mm4_annotation_robustness_with<F, L>(
    measure: F,
    image_ids: &[String],
    load_maps: L,
    gts: &[BinMap],
    params: &PerturbParams,
    seed: u64,
) -> Result<MetaResult>
where
    F: Fn(&GrayMap, &BinMap) -> Result<f64> + Sync,
    L: Fn(usize) -> Result<Vec<GrayMap>> + Sync,
{
    if image_ids.len() != gts.len() {
        return Err(Error::LengthMismatch(image_ids.len(), gts.len()));
    }
    if gts.is_empty() {
        return Err(Error::EmptyInput("mm4: no images"));
    }

    let outcomes: Vec<Outcome> = (0..gts.len())
        .into_par_iter()
        .map(|i| {
            let gt = &gts[i];
            let sms = load_maps(i)?;
            if sms.len() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "mm4 needs at least 2 models; image '{}' has {}",
                    image_ids[i],
                    sms.len()
                )));
            }
            let perturbed = perturb_gt(gt, params.radius, params.mode, item_seed(seed, i))?;
            let before = sms.iter().map(|sm| measure(sm, gt)).collect::<Result<Vec<_>>>()?;
            let after = match sms.iter().map(|sm| measure(sm, &perturbed)).collect::<Result<Vec<_>>>() {
                Ok(v) => v,
                Err(e) => {
                    return Ok(Outcome::Skipped(format!(
                        "{}: skipped, measure failed on perturbed GT: {e}",
                        image_ids[i]
                    )))
                }
            };
            let mut warnings = Vec::new();
            let mut c = rank_disagreement(
                &image_ids[i],
                &RankVector::from_scores(&before),
                &RankVector::from_scores(&after),
                &mut warnings,
            )?;
            c.structure_change = Some(structure_change(gt, &perturbed, params.change_radius)? as f64);
            Ok(Outcome::Scored(c, warnings))
        })
        .collect::<Result<_>>()?;

    let mut per_image = Vec::new();
    let mut warnings = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Scored(c, w) => {
                per_image.push(c);
                warnings.extend(w);
            }
            Outcome::Skipped(w) => warnings.push(w),
        }
    }
    if per_image.is_empty() {
        return Err(Error::EmptyInput("mm4: measure failed on every perturbed ground truth"));
    }
    let value = per_image.iter().map(|c| c.value).sum::<f64>() / per_image.len() as f64;
    let mut result = MetaResult::new(4, value).with_seed(seed);
    result.per_image = Some(per_image);
    result.warnings = warnings;
    Ok(result)
}
