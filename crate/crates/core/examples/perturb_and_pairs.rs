// Annotation noise and study stimuli: perturb a ground truth the way MM4
// does, measure how much structure changed, then find images where two
// measures disagree on the best model.

use smeval::meta::{mm5_rank_distance, perturb_gt, select_study_pairs, structure_change, PerturbMode};
use smeval::{BinMap, RankVector};

fn show(m: &BinMap) {
    for r in 0..m.height() {
        let row: String = (0..m.width()).map(|c| if m.get(r, c) { '#' } else { '.' }).collect();
        println!("  {row}");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gt = BinMap::from_ascii(&[
        "....................",
        "....................",
        "....######......##..",
        "....######......##..",
        "....######..........",
        "....######..........",
        "............###.....",
        "............###.....",
        "....................",
        "....................",
    ])?;
    println!("ground truth:");
    show(&gt);
    // thin edits vanish once the difference is eroded; thick ones do not
    for (mode, radius) in [
        (PerturbMode::Dilate, 1),
        (PerturbMode::Dilate, 3),
        (PerturbMode::Erode, 1),
        (PerturbMode::Mixed, 2),
    ] {
        let p = perturb_gt(&gt, radius, mode, 3)?;
        println!(
            "{mode:?} r={radius}: {} -> {} foreground pixels, structure change {}",
            gt.foreground_count(),
            p.foreground_count(),
            structure_change(&gt, &p, 1)?
        );
        show(&p);
    }

    // per-image rankings of four models under measures A and B (1 = best)
    let images = ["a", "b", "c"].map(String::from).to_vec();
    let models = ["m0", "m1", "m2", "m3"].map(String::from).to_vec();
    let rank_a = vec![
        RankVector::new(vec![1.0, 2.0, 3.0, 4.0]),
        RankVector::new(vec![2.0, 1.0, 3.0, 4.0]),
        RankVector::new(vec![1.0, 2.0, 3.0, 4.0]),
    ];
    let rank_b = vec![
        RankVector::new(vec![1.0, 2.0, 3.0, 4.0]),
        RankVector::new(vec![3.0, 4.0, 1.0, 2.0]),
        RankVector::new(vec![2.0, 1.0, 3.0, 4.0]),
    ];
    let d = mm5_rank_distance(&images, &models, &rank_a, &rank_b)?;
    println!("\nrank-distance histogram {:?}", d.histogram);
    for pair in select_study_pairs(&d, 10, 1, 0)? {
        println!(
            "  show {}: {} (A's pick) vs {} (B's pick), distance {}",
            pair.image_id, pair.model_a, pair.model_b, pair.distance
        );
    }
    Ok(())
}
