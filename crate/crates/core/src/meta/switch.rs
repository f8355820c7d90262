//! MM3, ground-truth switch: a measure should not reward a good map for
//! being compared against another image's ground truth.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{item_rng, Contribution, MetaResult};
use crate::error::{Error, Result};
use crate::map::{BinMap, GrayMap};

/// Which maps count as "good" and get their ground truth switched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "value")]
pub enum GoodSelection {
    /// The top fraction of maps by the measure's own score.
    TopFraction(f64),
    /// Maps scoring at least this value against their own ground truth.
    AbsoluteCutoff(f64),
}

/// Whether a wrong-GT score equal to the correct score counts as an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// `wrong >= correct` is an error: a measure that cannot tell the two
    /// ground truths apart fails the trial.
    #[default]
    CountTies,
    /// Only a strictly higher wrong-GT score is an error.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtSwitchParams {
    pub switches_per_image: usize,
    pub good: GoodSelection,
    pub ties: TiePolicy,
    pub seed: u64,
}

impl Default for GtSwitchParams {
    fn default() -> Self {
        GtSwitchParams {
            switches_per_image: 100,
            good: GoodSelection::TopFraction(0.418),
            ties: TiePolicy::CountTies,
            seed: 0,
        }
    }
}

struct MapOutcome {
    trials: u64,
    errors: u64,
    excluded: u64,
    failed: u64,
}

/// MM3 with one map per image: `sms[i]` belongs to `gts[i]`.
pub fn mm3_gt_switch<F>(measure: F, sms: &[GrayMap], gts: &[BinMap], params: &GtSwitchParams) -> Result<MetaResult>
where
    F: Fn(&GrayMap, &BinMap) -> Result<f64> + Sync,
{
    if sms.len() != gts.len() {
        return Err(Error::LengthMismatch(sms.len(), gts.len()));
    }
    let maps: Vec<(usize, &GrayMap)> = sms.iter().enumerate().collect();
    mm3_gt_switch_grouped(measure, &maps, gts, params)
}

/// MM3 over maps that each reference their image's ground truth by index;
/// wrong ground truths are always drawn from other images.
pub fn mm3_gt_switch_grouped<F>(measure: F, maps: &[(usize, &GrayMap)], gts: &[BinMap], params: &GtSwitchParams) -> Result<MetaResult>
where
    F: Fn(&GrayMap, &BinMap) -> Result<f64> + Sync,
{
    let gt_of: Vec<usize> = maps.iter().map(|&(g, _)| g).collect();
    mm3_gt_switch_with(measure, &gt_of, |i| Ok(maps[i].1.clone()), gts, params)
}

/// MM3 with maps decoded on demand: map `i` is `load(i)` and belongs to
/// `gts[gt_of[i]]`. Each map is loaded at most twice, so large datasets never
/// have to sit in memory at once.
///
/// The result's `value` is the error percentage over all (map, wrong GT)
/// trials; per-map contributions use the map index as id. Trials where the
/// measure fails on the wrong ground truth are dropped with a warning.
pub fn mm3_gt_switch_with<F, L>(measure: F, gt_of: &[usize], load: L, gts: &[BinMap], params: &GtSwitchParams) -> Result<MetaResult>
where
    F: Fn(&GrayMap, &BinMap) -> Result<f64> + Sync,
    L: Fn(usize) -> Result<GrayMap> + Sync,
{
    if gts.len() < 2 {
        return Err(Error::InvalidParameter("ground-truth switch needs at least 2 images".into()));
    }
    if let Some(&g) = gt_of.iter().find(|&&g| g >= gts.len()) {
        return Err(Error::InvalidParameter(format!("map references ground truth {g} of {}", gts.len())));
    }
    let scored: Vec<Option<f64>> = (0..gt_of.len())
        .into_par_iter()
        .map(|i| Ok(measure(&load(i)?, &gts[gt_of[i]]).ok()))
        .collect::<Result<_>>()?;
    let unscored = scored.iter().filter(|s| s.is_none()).count();
    // maps the measure cannot score never qualify as good
    let own: Vec<f64> = scored.iter().map(|s| s.unwrap_or(f64::NEG_INFINITY)).collect();
    let scorable = own.len() - unscored;

    let good: Vec<usize> = match params.good {
        GoodSelection::TopFraction(f) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParameter(format!("good fraction {f} outside [0, 1]")));
            }
            let mut order: Vec<usize> = (0..own.len()).collect();
            order.sort_by(|&a, &b| own[b].total_cmp(&own[a]).then(a.cmp(&b)));
            let keep = (f * scorable as f64).round() as usize;
            let mut top = order[..keep.min(scorable)].to_vec();
            top.sort_unstable();
            top
        }
        GoodSelection::AbsoluteCutoff(t) => (0..own.len()).filter(|&i| scored[i].is_some_and(|v| v >= t)).collect(),
    };
    if good.is_empty() {
        return Err(Error::InvalidParameter("no maps selected as good".into()));
    }

    let outcomes: Vec<MapOutcome> = good
        .par_iter()
        .map(|&i| {
            let g = gt_of[i];
            let sm = load(i)?;
            let mut candidates = Vec::with_capacity(gts.len() - 1);
            let mut excluded = 0;
            for (j, other) in gts.iter().enumerate() {
                if j == g {
                    continue;
                }
                if other.dims() == sm.dims() {
                    candidates.push(j);
                } else {
                    excluded += 1;
                }
            }
            let k = params.switches_per_image.min(candidates.len());
            let mut rng = item_rng(params.seed, i);
            let mut picks: Vec<usize> = sample(&mut rng, candidates.len(), k).into_vec();
            picks.sort_unstable();
            let (mut trials, mut errors, mut failed) = (0, 0, 0);
            for p in picks {
                let Ok(wrong) = measure(&sm, &gts[candidates[p]]) else {
                    failed += 1;
                    continue;
                };
                trials += 1;
                let is_error = match params.ties {
                    TiePolicy::CountTies => wrong >= own[i],
                    TiePolicy::Strict => wrong > own[i],
                };
                errors += u64::from(is_error);
            }
            Ok(MapOutcome {
                trials,
                errors,
                excluded,
                failed,
            })
        })
        .collect::<Result<_>>()?;

    let total = |f: fn(&MapOutcome) -> u64| outcomes.iter().map(f).sum::<u64>();
    let (trials, errors) = (total(|o| o.trials), total(|o| o.errors));
    let (excluded, failed) = (total(|o| o.excluded), total(|o| o.failed));
    let mut warnings = Vec::new();
    if unscored > 0 {
        warnings.push(format!("{unscored} maps left out: measure undefined on their own ground truth"));
    }
    if excluded > 0 {
        warnings.push(format!("{excluded} wrong-GT candidates skipped for dimension mismatch"));
    }
    if failed > 0 {
        warnings.push(format!("{failed} trials dropped: measure undefined on the wrong ground truth"));
    }
    if trials == 0 {
        warnings.push("no usable wrong ground truths; no trials run".into());
    }
    let pct = if trials == 0 { 0.0 } else { 100.0 * errors as f64 / trials as f64 };
    let per_image = good
        .iter()
        .zip(&outcomes)
        .map(|(&i, o)| Contribution {
            id: i.to_string(),
            value: if o.trials == 0 { 0.0 } else { 100.0 * o.errors as f64 / o.trials as f64 },
            structure_change: None,
            degenerate: false,
        })
        .collect();
    let mut result = MetaResult::new(3, pct).with_seed(params.seed);
    result.percentage = Some(pct);
    result.per_image = Some(per_image);
    result.warnings = warnings;
    Ok(result)
}
