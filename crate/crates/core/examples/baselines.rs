// The pixel-wise measures S is compared against: Fβ at a fixed threshold,
// PR / ROC curves with AP and AUC, and the weighted Fβ.

use smeval::{auc, average_precision, confusion_counts, f_beta, fbw, pr_curve, roc_curve, threshold_map, BinMap, FbwParams, GrayMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gt = BinMap::from_fn(32, 24, |r, c| (6..18).contains(&r) && (8..24).contains(&c))?;
    // a soft prediction that bleeds one ring past the object
    let sm = GrayMap::from_fn(32, 24, |r, c| {
        let inside = |dr: isize, dc: isize| {
            let (rr, cc) = (r as isize + dr, c as isize + dc);
            rr >= 0 && cc >= 0 && rr < 24 && cc < 32 && gt.get(rr as usize, cc as usize)
        };
        if gt.get(r, c) {
            0.9
        } else if inside(1, 0) || inside(-1, 0) || inside(0, 1) || inside(0, -1) {
            0.6
        } else {
            0.05
        }
    })?;

    let counts = confusion_counts(&threshold_map(&sm, 0.5)?, &gt)?;
    println!("at t = 0.5: {counts:?}");
    println!("F1      {:.4}", f_beta(&counts, 1.0));
    println!("F0.3    {:.4}", f_beta(&counts, 0.3));

    let pr = pr_curve(&sm, &gt, 256)?;
    let roc = roc_curve(&sm, &gt, 256)?;
    println!("AP      {:.4}  ({} curve points)", average_precision(&pr, 11)?, pr.points.len());
    println!("AUC     {:.4}", auc(&roc)?);
    println!("Fbw     {:.4}", fbw(&sm, &gt, &FbwParams::default())?);
    Ok(())
}
