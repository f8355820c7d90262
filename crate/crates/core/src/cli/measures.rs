use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{auc, average_precision, f_beta, fbw, pr_curve, roc_curve, FbwParams};
use crate::error::{Error, Result};
use crate::map::{confusion_counts, threshold_map, BinMap, GrayMap};
use crate::smeasure::{structure_measure, SMeasureParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    S,
    Fbeta,
    Fbw,
    Ap,
    Auc,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::S, Measure::Fbeta, Measure::Fbw, Measure::Ap, Measure::Auc];

    /// Parses a comma-separated list, keeping first-seen order without repeats.
    pub fn parse_list(s: &str) -> Result<Vec<Measure>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m: Measure = part.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter("at least one measure must be selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::S => "s",
            Measure::Fbeta => "fbeta",
            Measure::Fbw => "fbw",
            Measure::Ap => "ap",
            Measure::Auc => "auc",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "s" => Measure::S,
            "fbeta" => Measure::Fbeta,
            "fbw" => Measure::Fbw,
            "ap" => Measure::Ap,
            "auc" => Measure::Auc,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown measure '{other}' (expected s, fbeta, fbw, ap, auc)"
                )))
            }
        })
    }
}

/// Parameters of every measure the CLI can compute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub s: SMeasureParams,
    pub fbw: FbwParams,
    /// Threshold count of the ROC/PR sweeps.
    pub thresholds: usize,
    /// Recall grid size of average precision.
    pub ap_points: usize,
    /// Fixed binarization threshold for Fβ.
    pub fbeta_threshold: f64,
    pub beta_sq: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            s: SMeasureParams::default(),
            fbw: FbwParams::default(),
            thresholds: 256,
            ap_points: 11,
            fbeta_threshold: 0.5,
            beta_sq: 1.0,
        }
    }
}

impl MeasureConfig {
    pub fn validate(&self) -> Result<()> {
        self.s.validate()?;
        self.fbw.validate()?;
        if self.thresholds < 2 {
            return Err(Error::InvalidParameter("--thresholds must be >= 2".into()));
        }
        if self.ap_points < 2 {
            return Err(Error::InvalidParameter("AP recall grid needs >= 2 points".into()));
        }
        if !(0.0..=1.0).contains(&self.fbeta_threshold) {
            return Err(Error::InvalidParameter("Fβ threshold must lie in [0, 1]".into()));
        }
        if !(self.beta_sq > 0.0 && self.beta_sq.is_finite()) {
            return Err(Error::InvalidParameter("β² must be positive".into()));
        }
        Ok(())
    }

    pub fn score(&self, measure: Measure, sm: &GrayMap, gt: &BinMap) -> Result<f64> {
        match measure {
            Measure::S => structure_measure(sm, gt, &self.s),
            Measure::Fbeta => {
                let pred = threshold_map(sm, self.fbeta_threshold)?;
                Ok(f_beta(&confusion_counts(&pred, gt)?, self.beta_sq))
            }
            Measure::Fbw => fbw(sm, gt, &self.fbw),
            Measure::Ap => average_precision(&pr_curve(sm, gt, self.thresholds)?, self.ap_points),
            Measure::Auc => auc(&roc_curve(sm, gt, self.thresholds)?),
        }
    }
}
