//! Dataset manifests: a JSON file listing, per image, the ground truth and
//! one map per model. Relative paths resolve against the manifest directory.
//!
//! ```json
//! {
//!   "name": "toy",
//!   "images": [
//!     {"id": "0001", "gt": "gt/0001.png",
//!      "maps": {"modelA": "A/0001.png", "modelB": "B/0001.png"},
//!      "app_scores": {"modelA": 0.91, "modelB": 0.40}}
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{load_binary_map, load_gray_map, BinMap, GrayMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestImage {
    pub id: String,
    pub gt: PathBuf,
    pub maps: BTreeMap<String, PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub app_scores: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub images: Vec<ManifestImage>,
}

/// Ground-truth pixels at or above this gray level are foreground.
pub const GT_THRESHOLD: f64 = 0.5;

impl DatasetManifest {
    /// Reads, resolves and validates a manifest. Images come back sorted by id.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut m: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for im in &mut m.images {
            im.gt = base.join(&im.gt);
            for p in im.maps.values_mut() {
                *p = base.join(&*p);
            }
        }
        m.images.sort_by(|a, b| a.id.cmp(&b.id));
        m.validate()?;
        Ok(m)
    }

    /// Checks unique ids, identical model sets and that every file exists.
    pub fn validate(&self) -> Result<()> {
        if self.images.is_empty() {
            return Err(Error::Manifest(format!("manifest '{}' lists no images", self.name)));
        }
        let mut seen = BTreeSet::new();
        for im in &self.images {
            if !seen.insert(im.id.as_str()) {
                return Err(Error::Manifest(format!("duplicate image id '{}'", im.id)));
            }
        }
        let models = self.model_ids();
        if models.is_empty() {
            return Err(Error::Manifest("no model maps listed".into()));
        }
        let mut gaps = Vec::new();
        for im in &self.images {
            let have: Vec<&String> = im.maps.keys().collect();
            if have.len() != models.len() || have.iter().zip(&models).any(|(a, b)| *a != b) {
                let missing: Vec<&str> = models.iter().filter(|m| !im.maps.contains_key(*m)).map(String::as_str).collect();
                let extra: Vec<&str> = have.iter().filter(|m| !models.contains(m)).map(|s| s.as_str()).collect();
                gaps.push(format!("{}: missing {missing:?}, extra {extra:?}", im.id));
            }
        }
        if !gaps.is_empty() {
            return Err(Error::Manifest(format!("model sets differ across images: {}", gaps.join("; "))));
        }
        let missing: Vec<String> = self
            .images
            .iter()
            .flat_map(|im| std::iter::once(&im.gt).chain(im.maps.values()))
            .filter(|p| !p.is_file())
            .map(|p| p.display().to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Manifest(format!("unresolvable paths: {}", missing.join(", "))));
        }
        Ok(())
    }

    /// Model ids of the first image, sorted.
    pub fn model_ids(&self) -> Vec<String> {
        self.images.first().map(|im| im.maps.keys().cloned().collect()).unwrap_or_default()
    }

    pub fn image_ids(&self) -> Vec<String> {
        self.images.iter().map(|im| im.id.clone()).collect()
    }

    pub fn load_gt(&self, image: usize) -> Result<BinMap> {
        load_binary_map(&self.images[image].gt, GT_THRESHOLD)
    }

    /// All model maps of one image in [`model_ids`](Self::model_ids) order,
    /// checked against the ground truth size.
    pub fn load_maps(&self, image: usize, gt: &BinMap) -> Result<Vec<GrayMap>> {
        self.images[image]
            .maps
            .values()
            .map(|p| {
                let m = load_gray_map(p)?;
                if m.dims() != gt.dims() {
                    return Err(Error::dims(m.dims(), gt.dims()));
                }
                Ok(m)
            })
            .collect()
    }

    pub fn load_map(&self, image: usize, model: usize) -> Result<GrayMap> {
        let p = self.images[image].maps.values().nth(model).expect("model index in range");
        load_gray_map(p)
    }

    /// Application scores as an images × models table, if every image has them.
    pub fn app_scores(&self) -> Option<Result<crate::meta::ScoreMatrix>> {
        let models = self.model_ids();
        let mut rows = Vec::with_capacity(self.images.len());
        for im in &self.images {
            let s = im.app_scores.as_ref()?;
            let row: Option<Vec<f64>> = models.iter().map(|m| s.get(m).copied()).collect();
            match row {
                Some(r) => rows.push(r),
                None => return Some(Err(Error::Manifest(format!("image '{}': app_scores do not cover every model", im.id)))),
            }
        }
        Some(crate::meta::ScoreMatrix::new(self.image_ids(), models, rows))
    }
}
