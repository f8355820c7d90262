#![allow(dead_code)]

pub mod oracle;

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smeval::{BinMap, GrayMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random mask with both classes present.
pub fn random_gt(rng: &mut ChaCha8Rng, w: usize, h: usize, p: f64) -> BinMap {
    loop {
        let m = BinMap::from_fn(w, h, |_, _| rng.random_bool(p)).unwrap();
        let fg = m.foreground_count();
        if fg > 0 && fg < m.len() {
            return m;
        }
    }
}

/// Random filled ellipse, a more object-like ground truth.
pub fn random_blob(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinMap {
    loop {
        let cr = rng.random_range(0.2..0.8) * h as f64;
        let cc = rng.random_range(0.2..0.8) * w as f64;
        let ar = rng.random_range(0.15..0.4) * h as f64;
        let ac = rng.random_range(0.15..0.4) * w as f64;
        let m = BinMap::from_fn(w, h, |r, c| {
            let (dr, dc) = ((r as f64 - cr) / ar, (c as f64 - cc) / ac);
            dr * dr + dc * dc <= 1.0
        })
        .unwrap();
        let fg = m.foreground_count();
        if fg > 0 && fg < m.len() {
            return m;
        }
    }
}

pub fn random_sm(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayMap {
    GrayMap::from_fn(w, h, |_, _| rng.random::<f64>()).unwrap()
}

/// A plausible prediction: the GT blurred toward noise by `mix`.
pub fn noisy_copy(rng: &mut ChaCha8Rng, gt: &BinMap, mix: f64) -> GrayMap {
    GrayMap::from_fn(gt.width(), gt.height(), |r, c| {
        let g = if gt.get(r, c) { 1.0 } else { 0.0 };
        (1.0 - mix) * g + mix * rng.random::<f64>()
    })
    .unwrap()
}

pub fn grid_f64(m: &GrayMap) -> oracle::Grid<f64> {
    (0..m.height()).map(|r| (0..m.width()).map(|c| m.get(r, c)).collect()).collect()
}

pub fn grid_bool(m: &BinMap) -> oracle::Grid<bool> {
    (0..m.height()).map(|r| (0..m.width()).map(|c| m.get(r, c)).collect()).collect()
}

/// Writes a synthetic dataset (PNG ground truths, one map per model, and a
/// manifest with application scores) into `dir`; returns the manifest path.
///
/// Model `k` blends the ground truth with `k / n_models` noise, so lower
/// indices are better.
pub fn write_dataset(dir: &Path, n_images: usize, n_models: usize, size: (usize, usize), seed: u64) -> PathBuf {
    let mut r = rng(seed);
    let mut images = Vec::new();
    std::fs::create_dir_all(dir.join("gt")).unwrap();
    for k in 0..n_models {
        std::fs::create_dir_all(dir.join(format!("model{k}"))).unwrap();
    }
    for i in 0..n_images {
        let id = format!("img{i:03}");
        let gt = random_blob(&mut r, size.0, size.1);
        gt.save(dir.join(format!("gt/{id}.png"))).unwrap();
        let mut maps = serde_json::Map::new();
        let mut app = serde_json::Map::new();
        for k in 0..n_models {
            let sm = noisy_copy(&mut r, &gt, k as f64 / n_models as f64 + 0.05);
            let rel = format!("model{k}/{id}.png");
            sm.save(dir.join(&rel)).unwrap();
            maps.insert(format!("model{k}"), rel.into());
            app.insert(format!("model{k}"), (1.0 - k as f64 / n_models as f64 + 0.01 * r.random::<f64>()).into());
        }
        images.push(serde_json::json!({"id": id, "gt": format!("gt/{id}.png"), "maps": maps, "app_scores": app}));
    }
    let manifest = serde_json::json!({"name": "synthetic", "images": images});
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    path
}
