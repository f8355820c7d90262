// Two damaged predictions with identical confusion counts: a square hole
// inside the object, and the same hole cut into its edge. Pixel-wise scores
// cannot tell them apart; S can.

use smeval::{auc, average_precision, confusion_counts, pr_curve, roc_curve, structure_measure, threshold_map, BinMap, GrayMap, SMeasureParams};

fn with_hole(gt: &BinMap, r0: usize, c0: usize) -> smeval::Result<GrayMap> {
    GrayMap::from_fn(gt.width(), gt.height(), |r, c| {
        let in_hole = (r0..r0 + 5).contains(&r) && (c0..c0 + 5).contains(&c);
        if gt.get(r, c) && !in_hole {
            1.0
        } else {
            0.0
        }
    })
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gt = BinMap::from_fn(40, 40, |r, c| (8..32).contains(&r) && (12..28).contains(&c))?;
    let interior = with_hole(&gt, 17, 17)?;
    let boundary = with_hole(&gt, 17, 23)?;

    for (name, sm) in [("interior hole", &interior), ("boundary hole", &boundary)] {
        let counts = confusion_counts(&threshold_map(sm, 0.5)?, &gt)?;
        println!(
            "{name}: tp {} fp {} fn {} | AP {:.6} AUC {:.6} | S {:.6}",
            counts.tp,
            counts.fp,
            counts.fn_,
            average_precision(&pr_curve(sm, &gt, 256)?, 11)?,
            auc(&roc_curve(sm, &gt, 256)?)?,
            structure_measure(sm, &gt, &SMeasureParams::default())?,
        );
    }
    Ok(())
}
