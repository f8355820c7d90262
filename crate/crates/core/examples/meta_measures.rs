// Meta-measures on a small in-memory benchmark: how well does a measure
// track an application ranking (MM1), beat a generic center prior (MM2),
// reject the wrong ground truth (MM3) and shrug off annotation noise (MM4)?

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smeval::meta::{
    gaussian_baseline_map, mm1_application_ranking, mm2_generic_vs_sota, mm3_gt_switch, mm4_annotation_robustness, GtSwitchParams, PerturbParams,
};
use smeval::{fbw, structure_measure, BinMap, FbwParams, GrayMap, Result, SMeasureParams, ScoreMatrix};

const MODELS: usize = 4;

struct Bench {
    ids: Vec<String>,
    models: Vec<String>,
    gts: Vec<BinMap>,
    maps: Vec<Vec<GrayMap>>,
    app: ScoreMatrix,
}

fn synth(seed: u64, n: usize) -> Result<Bench> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gts = Vec::new();
    let mut maps = Vec::new();
    let mut app_rows = Vec::new();
    for _ in 0..n {
        let (cr, cc, rad) = (rng.random_range(10.0..22.0), rng.random_range(12.0..28.0), rng.random_range(5.0..9.0));
        let gt = BinMap::from_fn(40, 32, |r, c| (r as f64 - cr).powi(2) + (c as f64 - cc).powi(2) <= rad * rad)?;
        // each model gets a random amount of noise and a random drift; the
        // application sees the true quality only through a noisy lens
        let mut per_model = Vec::new();
        let mut quality = Vec::new();
        for _ in 0..MODELS {
            let mix = rng.random_range(0.2..0.9);
            let shift = rng.random_range(0..4usize);
            let gt_at = |r: usize, c: usize| c >= shift && gt.get(r, c - shift);
            per_model.push(GrayMap::from_fn(40, 32, |r, c| {
                (1.0 - mix) * f64::from(u8::from(gt_at(r, c))) + mix * rng.random::<f64>()
            })?);
            quality.push(-mix - 0.1 * shift as f64 + rng.random_range(-0.1..0.1));
        }
        gts.push(gt);
        maps.push(per_model);
        app_rows.push(quality);
    }
    let ids: Vec<String> = (0..n).map(|i| format!("img{i:02}")).collect();
    let models: Vec<String> = (0..MODELS).map(|k| format!("m{k}")).collect();
    let app = ScoreMatrix::new(ids.clone(), models.clone(), app_rows)?;
    Ok(Bench { ids, models, gts, maps, app })
}

fn report<F>(name: &str, b: &Bench, measure: F) -> Result<()>
where
    F: Fn(&GrayMap, &BinMap) -> Result<f64> + Sync,
{
    let rows = b
        .maps
        .iter()
        .zip(&b.gts)
        .map(|(ms, gt)| ms.iter().map(|m| measure(m, gt)).collect())
        .collect::<Result<_>>()?;
    let scores = ScoreMatrix::new(b.ids.clone(), b.models.clone(), rows)?;
    let mm1 = mm1_application_ranking(&scores, &b.app)?;

    let generic = b
        .gts
        .iter()
        .map(|gt| measure(&gaussian_baseline_map(gt.width(), gt.height(), 0.25)?, gt))
        .collect::<Result<Vec<_>>>()?;
    let mm2 = mm2_generic_vs_sota(&scores, &generic)?;

    let best: Vec<GrayMap> = b.maps.iter().map(|ms| ms[0].clone()).collect();
    let switch = GtSwitchParams {
        switches_per_image: 10,
        ..GtSwitchParams::default()
    };
    let mm3 = mm3_gt_switch(&measure, &best, &b.gts, &switch)?;
    let mm4 = mm4_annotation_robustness(&measure, &b.ids, &b.maps, &b.gts, &PerturbParams::default(), 7)?;

    println!(
        "{name:<4} MM1 {:.3}  MM2 {:.1}%  MM3 {:.1}%  MM4 {:.3}",
        mm1.value,
        mm2.percentage.unwrap_or_default(),
        mm3.value,
        mm4.value
    );
    Ok(())
}

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let bench = synth(42, 30)?;
    let p = SMeasureParams::default();
    println!("lower is better for every column");
    report("S", &bench, |sm, gt| structure_measure(sm, gt, &p))?;
    report("Fbw", &bench, |sm, gt| fbw(sm, gt, &FbwParams::default()))?;
    Ok(())
}
