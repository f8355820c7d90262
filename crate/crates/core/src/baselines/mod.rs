//! Pixel-counting baselines: Fβ on a binary map, and the threshold-sweep
//! curves (ROC, precision-recall) with their AUC and interpolated AP
//! summaries. The weighted Fβ lives in [`fbw`].

pub mod fbw;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{BinMap, ConfusionCounts, GrayMap};

pub use fbw::{fbw, FbwParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Roc,
    PrecisionRecall,
}

/// Ordered `(x, y)` points: `(FPR, TPR)` for ROC, `(recall, precision)` for PR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub points: Vec<(f64, f64)>,
}

/// `(1 + β²)·P·R / (β²·P + R)`; zero whenever there are no true positives.
pub fn f_beta(counts: &ConfusionCounts, beta_sq: f64) -> f64 {
    if counts.tp == 0 {
        return 0.0;
    }
    let tp = counts.tp as f64;
    let p = tp / (tp + counts.fp as f64);
    let r = tp / (tp + counts.fn_ as f64);
    (1.0 + beta_sq) * p * r / (beta_sq * p + r)
}

/// Highest threshold index `j` with `j / (n - 1) <= v`.
fn last_threshold_index(v: f64, n: usize) -> usize {
    let steps = (n - 1) as f64;
    let mut j = ((v * steps).floor().max(0.0) as usize).min(n - 1);
    while j + 1 < n && (j + 1) as f64 / steps <= v {
        j += 1;
    }
    while j > 0 && j as f64 / steps > v {
        j -= 1;
    }
    j
}

/// Confusion counts of `threshold_map(sm, j / (n - 1))` against `gt` for every
/// `j` in `0..n`, computed from a single histogram pass.
pub fn sweep_counts(sm: &GrayMap, gt: &BinMap, num_thresholds: usize) -> Result<Vec<ConfusionCounts>> {
    if sm.dims() != gt.dims() {
        return Err(Error::dims(sm.dims(), gt.dims()));
    }
    if num_thresholds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 thresholds, got {num_thresholds}")));
    }
    let n = num_thresholds;
    let mut pos = vec![0u64; n];
    let mut neg = vec![0u64; n];
    for (&v, &g) in sm.values().iter().zip(gt.values()) {
        let j = last_threshold_index(v, n);
        if g {
            pos[j] += 1;
        } else {
            neg[j] += 1;
        }
    }
    let total_pos: u64 = pos.iter().sum();
    let total_neg: u64 = neg.iter().sum();
    let mut out = vec![ConfusionCounts::default(); n];
    let (mut tp, mut fp) = (0u64, 0u64);
    for j in (0..n).rev() {
        tp += pos[j];
        fp += neg[j];
        out[j] = ConfusionCounts {
            tp,
            fp,
            fn_: total_pos - tp,
            tn: total_neg - fp,
        };
    }
    Ok(out)
}

fn require_both_classes(gt: &BinMap) -> Result<()> {
    let fg = gt.foreground_count();
    if fg == 0 || fg == gt.len() {
        return Err(Error::ConstantGroundTruth);
    }
    Ok(())
}

fn sort_points(points: &mut [(f64, f64)]) {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
}

/// ROC curve over thresholds `j / (n - 1)`, anchored at (0,0) and (1,1) and
/// sorted by false positive rate.
pub fn roc_curve(sm: &GrayMap, gt: &BinMap, num_thresholds: usize) -> Result<Curve> {
    require_both_classes(gt)?;
    let counts = sweep_counts(sm, gt, num_thresholds)?;
    let mut points: Vec<(f64, f64)> = counts
        .iter()
        .map(|c| {
            let fpr = c.fp as f64 / (c.fp + c.tn) as f64;
            let tpr = c.tp as f64 / (c.tp + c.fn_) as f64;
            (fpr, tpr)
        })
        .collect();
    points.push((0.0, 0.0));
    points.push((1.0, 1.0));
    sort_points(&mut points);
    Ok(Curve {
        kind: CurveKind::Roc,
        points,
    })
}

/// Precision-recall curve over the same thresholds, sorted by recall.
/// Thresholds that predict nothing get precision 1.
pub fn pr_curve(sm: &GrayMap, gt: &BinMap, num_thresholds: usize) -> Result<Curve> {
    require_both_classes(gt)?;
    let counts = sweep_counts(sm, gt, num_thresholds)?;
    let mut points: Vec<(f64, f64)> = counts
        .iter()
        .map(|c| {
            let recall = c.tp as f64 / (c.tp + c.fn_) as f64;
            let precision = if c.tp + c.fp == 0 { 1.0 } else { c.tp as f64 / (c.tp + c.fp) as f64 };
            (recall, precision)
        })
        .collect();
    sort_points(&mut points);
    Ok(Curve {
        kind: CurveKind::PrecisionRecall,
        points,
    })
}

/// Trapezoidal area under an ROC curve.
pub fn auc(curve: &Curve) -> Result<f64> {
    if curve.kind != CurveKind::Roc {
        return Err(Error::WrongCurveKind { expected: "roc" });
    }
    if curve.points.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::InvalidParameter("roc points must be sorted by FPR".into()));
    }
    let area: f64 = curve.points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0).sum();
    Ok(area.clamp(0.0, 1.0))
}

/// Mean interpolated precision `max{p(r') : r' >= r}` over `num_recall_points`
/// evenly spaced recall levels in `[0, 1]`.
///
/// Points at zero recall carry no information (precision is either 0 or the
/// empty-prediction convention) and are left out of the interpolation.
pub fn average_precision(curve: &Curve, num_recall_points: usize) -> Result<f64> {
    if curve.kind != CurveKind::PrecisionRecall {
        return Err(Error::WrongCurveKind {
            expected: "precision-recall",
        });
    }
    if num_recall_points < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 recall points, got {num_recall_points}")));
    }
    let informative: Vec<(f64, f64)> = curve.points.iter().copied().filter(|p| p.0 > 0.0).collect();
    let steps = (num_recall_points - 1) as f64;
    let total: f64 = (0..num_recall_points)
        .map(|i| {
            let r = i as f64 / steps;
            informative.iter().filter(|p| p.0 >= r).map(|p| p.1).fold(0.0, f64::max)
        })
        .sum();
    Ok(total / num_recall_points as f64)
}
