// Library-level batch evaluation: writes a tiny dataset with a manifest,
// scores it with every measure and ranks the models, the same path the
// `smeval eval` and `smeval rank` commands take.

use std::collections::BTreeMap;

use smeval::cli::{cmd_eval, cmd_rank, DatasetManifest, EvalOptions, Measure, MeasureConfig, RankBy};
use smeval::{BinMap, GrayMap, ScoreMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::temp_dir().join(format!("smeval-batch-{}", std::process::id()));
    std::fs::create_dir_all(&root)?;

    let mut images = Vec::new();
    for i in 0..3usize {
        let id = format!("img{i}");
        let (top, left) = (4 + i, 6 + 2 * i);
        let gt = BinMap::from_fn(32, 24, |r, c| (top..top + 12).contains(&r) && (left..left + 14).contains(&c))?;
        gt.save(root.join(format!("{id}_gt.png")))?;

        let mut maps = BTreeMap::new();
        // "sharp" matches the object, "blurry" is a faded copy, "offset" misses a strip
        let sharp = GrayMap::from(&gt);
        let blurry = GrayMap::from_fn(32, 24, |r, c| if gt.get(r, c) { 0.6 } else { 0.3 })?;
        let offset = GrayMap::from_fn(32, 24, |r, c| if c >= 3 && gt.get(r, c - 3) { 1.0 } else { 0.0 })?;
        for (model, sm) in [("sharp", sharp), ("blurry", blurry), ("offset", offset)] {
            let file = format!("{id}_{model}.png");
            sm.save(root.join(&file))?;
            maps.insert(model.to_string(), file);
        }
        images.push(serde_json::json!({ "id": id, "gt": format!("{id}_gt.png"), "maps": maps }));
    }
    let manifest_path = root.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::json!({ "name": "toy", "images": images }).to_string())?;

    let manifest = DatasetManifest::load(&manifest_path)?;
    let out = root.join("out");
    let report = cmd_eval(
        &manifest,
        &EvalOptions {
            measures: Measure::ALL.to_vec(),
            config: MeasureConfig::default(),
            seed: 0,
            out: out.clone(),
        },
    )?;
    println!("scored {} images, {} failures", manifest.images.len(), report.failures.len());
    print!("{}", std::fs::read_to_string(out.join("model_means.csv"))?);

    let s = ScoreMatrix::read_csv_path(out.join("scores_s.csv"))?;
    println!("\nmodels by mean S:\n{}", cmd_rank(&s, RankBy::Model));

    std::fs::remove_dir_all(&root)?;
    Ok(())
}
