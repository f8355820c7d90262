// Scores a few hand-drawn predictions against one ground truth and shows how
// the object and region terms combine.

use smeval::smeasure::partition_blocks;
use smeval::{object_score, region_score, structure_measure, BinMap, GrayMap, SMeasureParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gt = BinMap::from_ascii(&["..........", "..######..", "..######..", "..######..", "..######..", ".........."])?;
    let params = SMeasureParams::default();

    let perfect = GrayMap::from(&gt);
    let shifted = GrayMap::from_fn(10, 6, |r, c| if gt.get(r, c.saturating_sub(1)) && c > 0 { 1.0 } else { 0.0 })?;
    let fuzzy = GrayMap::from_fn(10, 6, |r, c| if gt.get(r, c) { 0.7 } else { 0.2 })?;
    let blank = GrayMap::filled(10, 6, 0.0)?;

    println!("{:<10} {:>8} {:>8} {:>8}", "map", "S", "S_o", "S_r");
    for (name, sm) in [("perfect", &perfect), ("shifted", &shifted), ("fuzzy", &fuzzy), ("blank", &blank)] {
        let s = structure_measure(sm, &gt, &params)?;
        let so = object_score(sm, &gt, params.lambda)?.combined();
        let sr = region_score(sm, &gt, params.k_blocks)?;
        println!("{name:<10} {s:>8.4} {so:>8.4} {sr:>8.4}");
    }

    println!("\nblocks around the foreground centroid:");
    for b in partition_blocks(&gt, 4)?.blocks {
        println!(
            "  rows {}..{} cols {}..{} weight {:.3}",
            b.row,
            b.row + b.height,
            b.col,
            b.col + b.width,
            b.weight
        );
    }
    Ok(())
}
