//! The five subcommands as library functions. Each writes its files under an
//! output directory and returns a report; exit codes are decided by the caller.
//!
//! Everything written here is a pure function of (manifest, config, seed):
//! rows are sorted by image id and wall-clock times go to a separate
//! `timing.json`, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::manifest::DatasetManifest;
use super::measures::{Measure, MeasureConfig};
use crate::error::{Error, Result};
use crate::map::BinMap;
use crate::meta::scores::format_score;
use crate::meta::{
    gaussian_baseline_map, item_seed, mm1_application_ranking, mm2_generic_vs_sota, mm3_gt_switch_with, mm4_annotation_robustness_with,
    mm5_from_scores, perturb_gt, select_study_pairs, structure_change, GtSwitchParams, MetaResult, PerturbParams, RankVector, ScoreMatrix,
};

/// One image (and optionally one measure) that could not be scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageFailure {
    pub image_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    pub error: String,
}

/// Scores of one measure over a dataset; images the measure failed on are
/// absent from the matrix.
#[derive(Debug, Clone)]
pub struct MeasureScores {
    pub measure: Measure,
    pub matrix: ScoreMatrix,
    /// Score of the centered Gaussian map per matrix row, when requested.
    pub generic: Option<Vec<f64>>,
}

pub(crate) struct DatasetScores {
    pub per_measure: Vec<MeasureScores>,
    pub failures: Vec<ImageFailure>,
    pub millis: Vec<(String, f64)>,
}

pub(crate) fn score_dataset(m: &DatasetManifest, measures: &[Measure], cfg: &MeasureConfig, generic_sigma: Option<f64>) -> Result<DatasetScores> {
    cfg.validate()?;
    // per measure: model scores plus the generic map's score, or the error text
    type Scored = std::result::Result<(Vec<f64>, Option<f64>), String>;
    struct Row {
        id: String,
        millis: f64,
        result: std::result::Result<Vec<Scored>, String>,
    }
    #[derive(Default, Clone)]
    struct Acc {
        ids: Vec<String>,
        rows: Vec<Vec<f64>>,
        generic: Vec<f64>,
    }
    let rows: Vec<Row> = (0..m.images.len())
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let id = m.images[i].id.clone();
            let loaded = m.load_gt(i).and_then(|gt| {
                let maps = m.load_maps(i, &gt)?;
                let generic = generic_sigma.map(|s| gaussian_baseline_map(gt.width(), gt.height(), s)).transpose()?;
                Ok((gt, maps, generic))
            });
            let result = match loaded {
                Err(e) => Err(e.to_string()),
                Ok((gt, maps, generic)) => Ok(measures
                    .iter()
                    .map(|&ms| {
                        let row = maps.iter().map(|sm| cfg.score(ms, sm, &gt)).collect::<Result<Vec<_>>>();
                        let g = generic.as_ref().map(|g| cfg.score(ms, g, &gt)).transpose();
                        match (row, g) {
                            (Ok(r), Ok(g)) => Ok((r, g)),
                            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
                        }
                    })
                    .collect()),
            };
            Row {
                id,
                millis: start.elapsed().as_secs_f64() * 1e3,
                result,
            }
        })
        .collect();

    let models = m.model_ids();
    let mut failures = Vec::new();
    let mut acc = vec![Acc::default(); measures.len()];
    for row in &rows {
        match &row.result {
            Err(e) => failures.push(ImageFailure {
                image_id: row.id.clone(),
                measure: None,
                error: e.clone(),
            }),
            Ok(per) => {
                for (k, r) in per.iter().enumerate() {
                    match r {
                        Ok((scores, g)) => {
                            acc[k].ids.push(row.id.clone());
                            acc[k].rows.push(scores.clone());
                            acc[k].generic.extend(g);
                        }
                        Err(e) => failures.push(ImageFailure {
                            image_id: row.id.clone(),
                            measure: Some(measures[k]),
                            error: e.clone(),
                        }),
                    }
                }
            }
        }
    }
    let per_measure = measures
        .iter()
        .zip(acc)
        .map(|(&measure, a)| {
            Ok(MeasureScores {
                measure,
                matrix: ScoreMatrix::new(a.ids, models.clone(), a.rows)?,
                generic: generic_sigma.map(|_| a.generic),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DatasetScores {
        per_measure,
        failures,
        millis: rows.into_iter().map(|r| (r.id, r.millis)).collect(),
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    text.push('\n');
    write_file(path, text)
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub measures: Vec<Measure>,
    pub config: MeasureConfig,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub scores: Vec<MeasureScores>,
    pub failures: Vec<ImageFailure>,
}

#[derive(Serialize)]
struct EvalSummary<'a> {
    dataset: &'a str,
    seed: u64,
    measures: &'a [Measure],
    config: &'a MeasureConfig,
    n_images: usize,
    models: Vec<String>,
    /// measure → model → mean score over the images it could score
    means: BTreeMap<String, BTreeMap<String, f64>>,
    failures: &'a [ImageFailure],
}

/// Scores every map of the manifest with each selected measure.
///
/// Writes `scores_<measure>.csv`, `model_means.csv`, `summary.json` and
/// `timing.json` into `opts.out`.
pub fn cmd_eval(manifest: &DatasetManifest, opts: &EvalOptions) -> Result<EvalReport> {
    if opts.measures.is_empty() {
        return Err(Error::InvalidParameter("at least one measure must be selected".into()));
    }
    let scored = score_dataset(manifest, &opts.measures, &opts.config, None)?;
    create_dir(&opts.out)?;
    let models = manifest.model_ids();
    let mut means = BTreeMap::new();
    let mut means_csv = format!(
        "model_id,{}\n",
        opts.measures.iter().map(Measure::to_string).collect::<Vec<_>>().join(",")
    );
    let model_means: Vec<Vec<f64>> = scored.per_measure.iter().map(|s| s.matrix.model_means()).collect();
    for (j, model) in models.iter().enumerate() {
        let cells: Vec<String> = model_means.iter().map(|mm| format_score(mm[j])).collect();
        let _ = writeln!(means_csv, "{model},{}", cells.join(","));
    }
    for (s, mm) in scored.per_measure.iter().zip(&model_means) {
        s.matrix.write_csv_path(opts.out.join(format!("scores_{}.csv", s.measure)))?;
        means.insert(s.measure.to_string(), models.iter().cloned().zip(mm.iter().copied()).collect());
    }
    write_file(&opts.out.join("model_means.csv"), means_csv)?;
    write_json(
        &opts.out.join("summary.json"),
        &EvalSummary {
            dataset: &manifest.name,
            seed: opts.seed,
            measures: &opts.measures,
            config: &opts.config,
            n_images: manifest.images.len(),
            models,
            means,
            failures: &scored.failures,
        },
    )?;
    let timing: BTreeMap<&str, f64> = scored.millis.iter().map(|(id, ms)| (id.as_str(), *ms)).collect();
    write_json(&opts.out.join("timing.json"), &serde_json::json!({ "per_image_ms": timing }))?;
    Ok(EvalReport {
        scores: scored.per_measure,
        failures: scored.failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankBy {
    Image,
    Model,
}

fn format_rank(r: f64) -> String {
    format!("{r}")
}

/// Rankings as CSV text: per image (`image_id,<models>` of average ranks) or
/// per model (`rank,model_id,mean_score`, best first).
pub fn cmd_rank(scores: &ScoreMatrix, by: RankBy) -> String {
    let mut out = String::new();
    match by {
        RankBy::Image => {
            let _ = writeln!(out, "image_id,{}", scores.model_ids().join(","));
            for (i, id) in scores.image_ids().iter().enumerate() {
                let r = RankVector::from_scores(scores.row(i));
                let cells: Vec<String> = r.ranks().iter().map(|&v| format_rank(v)).collect();
                let _ = writeln!(out, "{id},{}", cells.join(","));
            }
        }
        RankBy::Model => {
            let means = scores.model_means();
            let ranks = RankVector::from_scores(&means);
            let mut order: Vec<usize> = (0..means.len()).collect();
            order.sort_by(|&a, &b| {
                ranks.ranks()[a]
                    .total_cmp(&ranks.ranks()[b])
                    .then_with(|| scores.model_ids()[a].cmp(&scores.model_ids()[b]))
            });
            out.push_str("rank,model_id,mean_score\n");
            for j in order {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    format_rank(ranks.ranks()[j]),
                    scores.model_ids()[j],
                    format_score(means[j])
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaKind {
    Mm1,
    Mm2,
    Mm3,
    Mm4,
    Mm5,
    /// MM1–MM3 for AP, AUC, Fbw and S on every manifest.
    Table,
}

#[derive(Debug, Clone)]
pub struct MetaOptions {
    pub kind: MetaKind,
    pub measures: Vec<Measure>,
    pub config: MeasureConfig,
    pub switch: GtSwitchParams,
    pub sigma_frac: f64,
    pub perturb: PerturbParams,
    pub seed: u64,
    pub out: PathBuf,
}

/// Inputs a meta-measure may draw on; which ones are required depends on the kind.
#[derive(Debug, Clone, Default)]
pub struct MetaInputs {
    pub manifests: Vec<DatasetManifest>,
    /// Precomputed measure scores (MM1, and measure A for MM5).
    pub scores: Option<ScoreMatrix>,
    /// Measure B scores for MM5.
    pub scores_b: Option<ScoreMatrix>,
    /// Application scores for MM1 when the manifest has none.
    pub app_scores: Option<ScoreMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetaReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    pub result: MetaResult,
}

/// One row of the MM1–MM3 comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub measure: Measure,
    /// Per dataset: MM1 (None without application scores), MM2 %, MM3 %.
    pub cells: Vec<(Option<f64>, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetaTable {
    pub datasets: Vec<String>,
    pub rows: Vec<TableRow>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum MetaOutput {
    Results(Vec<MetaReport>),
    Table(MetaTable),
}

pub const TABLE_MEASURES: [Measure; 4] = [Measure::Ap, Measure::Auc, Measure::Fbw, Measure::S];

fn one_manifest<'a>(inputs: &'a MetaInputs, what: &str) -> Result<&'a DatasetManifest> {
    match inputs.manifests.as_slice() {
        [m] => Ok(m),
        [] => Err(Error::InvalidParameter(format!("{what} needs --manifest"))),
        _ => Err(Error::InvalidParameter(format!("{what} takes exactly one --manifest"))),
    }
}

fn app_scores_for(m: &DatasetManifest, fallback: Option<&ScoreMatrix>) -> Option<Result<ScoreMatrix>> {
    m.app_scores().or_else(|| fallback.cloned().map(Ok))
}

fn mm3(m: &DatasetManifest, measure: Measure, opts: &MetaOptions) -> Result<MetaResult> {
    let gts: Vec<BinMap> = (0..m.images.len()).into_par_iter().map(|i| m.load_gt(i)).collect::<Result<_>>()?;
    let n_models = m.model_ids().len();
    let gt_of: Vec<usize> = (0..gts.len() * n_models).map(|k| k / n_models).collect();
    let params = GtSwitchParams {
        seed: opts.seed,
        ..opts.switch
    };
    let mut r = mm3_gt_switch_with(
        |sm, gt| opts.config.score(measure, sm, gt),
        &gt_of,
        |k| m.load_map(k / n_models, k % n_models),
        &gts,
        &params,
    )?;
    // name maps as image/model instead of flat indices
    let models = m.model_ids();
    for c in r.per_image.iter_mut().flatten() {
        let k: usize = c.id.parse().expect("numeric map index");
        c.id = format!("{}/{}", m.images[k / n_models].id, models[k % n_models]);
    }
    Ok(r)
}

fn mm2(m: &DatasetManifest, measure: Measure, opts: &MetaOptions) -> Result<MetaResult> {
    let scored = score_dataset(m, &[measure], &opts.config, Some(opts.sigma_frac))?;
    let s = &scored.per_measure[0];
    let mut r = mm2_generic_vs_sota(&s.matrix, s.generic.as_deref().unwrap_or_default())?;
    r.warnings
        .extend(scored.failures.iter().map(|f| format!("{}: skipped: {}", f.image_id, f.error)));
    Ok(r.with_seed(opts.seed))
}

fn mm1(m: Option<&DatasetManifest>, measure: Measure, inputs: &MetaInputs, opts: &MetaOptions) -> Result<MetaResult> {
    let (scores, app, mut warnings) = match (m, &inputs.scores) {
        (_, Some(s)) => {
            let app = m.and_then(|m| m.app_scores()).or_else(|| inputs.app_scores.clone().map(Ok));
            (s.clone(), app, Vec::new())
        }
        (Some(m), None) => {
            let scored = score_dataset(m, &[measure], &opts.config, None)?;
            let warnings = scored.failures.iter().map(|f| format!("{}: skipped: {}", f.image_id, f.error)).collect();
            (
                scored.per_measure[0].matrix.clone(),
                app_scores_for(m, inputs.app_scores.as_ref()),
                warnings,
            )
        }
        (None, None) => return Err(Error::InvalidParameter("mm1 needs --manifest or --scores".into())),
    };
    let app =
        app.ok_or_else(|| Error::InvalidParameter("mm1 needs application scores: add app_scores to the manifest or pass --app-scores".into()))??;
    // images the measure could not score are dropped from the application table too
    let keep: Vec<usize> = scores
        .image_ids()
        .iter()
        .map(|id| {
            app.image_ids()
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| Error::IdMismatch(format!("image '{id}' has no application scores")))
        })
        .collect::<Result<_>>()?;
    let app = ScoreMatrix::new(
        scores.image_ids().to_vec(),
        app.model_ids().to_vec(),
        keep.iter().map(|&i| app.row(i).to_vec()).collect(),
    )?;
    let mut r = mm1_application_ranking(&scores, &app)?;
    warnings.append(&mut r.warnings);
    r.warnings = warnings;
    Ok(r.with_seed(opts.seed))
}

/// Runs one meta-measure per selected measure, or the comparison table.
///
/// Files written to `opts.out`: `mm<N>_<measure>.json` (for MM5 `mm5.json`
/// plus `mm5_histogram.csv`), or `table.json`, `table.csv` and `table.md`.
pub fn cmd_meta(inputs: &MetaInputs, opts: &MetaOptions) -> Result<MetaOutput> {
    opts.config.validate()?;
    create_dir(&opts.out)?;
    let dataset = |m: &DatasetManifest| Some(m.name.clone());
    let output = match opts.kind {
        MetaKind::Mm5 => {
            let (a, b) = match (&inputs.scores, &inputs.scores_b) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::InvalidParameter(
                        "mm5 needs --scores (measure A) and --scores-b (measure B)".into(),
                    ))
                }
            };
            let d = mm5_from_scores(a, b)?;
            let mut hist = String::from("distance,count\n");
            for (k, c) in d.histogram.iter().enumerate() {
                let _ = writeln!(hist, "{k},{c}");
            }
            write_file(&opts.out.join("mm5_histogram.csv"), hist)?;
            let report = MetaReport {
                dataset: None,
                measure: None,
                result: d.to_meta_result().with_seed(opts.seed),
            };
            write_json(&opts.out.join("mm5.json"), &report)?;
            MetaOutput::Results(vec![report])
        }
        MetaKind::Table => {
            if inputs.manifests.is_empty() {
                return Err(Error::InvalidParameter("table needs at least one --manifest".into()));
            }
            let mut rows: Vec<TableRow> = TABLE_MEASURES.iter().map(|&measure| TableRow { measure, cells: Vec::new() }).collect();
            for m in &inputs.manifests {
                for row in &mut rows {
                    let mm1v = match app_scores_for(m, inputs.app_scores.as_ref()) {
                        Some(_) => Some(
                            mm1(
                                Some(m),
                                row.measure,
                                &MetaInputs {
                                    scores: None,
                                    ..inputs.clone()
                                },
                                opts,
                            )?
                            .value,
                        ),
                        None => None,
                    };
                    let mm2v = mm2(m, row.measure, opts)?.percentage.unwrap_or(0.0);
                    let mm3v = mm3(m, row.measure, opts)?.value;
                    row.cells.push((mm1v, mm2v, mm3v));
                }
            }
            let table = MetaTable {
                datasets: inputs.manifests.iter().map(|m| m.name.clone()).collect(),
                rows,
                seed: opts.seed,
            };
            write_json(&opts.out.join("table.json"), &table)?;
            write_file(&opts.out.join("table.csv"), table_csv(&table))?;
            write_file(&opts.out.join("table.md"), table_markdown(&table))?;
            MetaOutput::Table(table)
        }
        kind => {
            let mut reports = Vec::new();
            for &measure in &opts.measures {
                let (ds, result) = match kind {
                    MetaKind::Mm1 => {
                        let m = inputs.manifests.first();
                        (m.and_then(dataset), mm1(m, measure, inputs, opts)?)
                    }
                    MetaKind::Mm2 => {
                        let m = one_manifest(inputs, "mm2")?;
                        (dataset(m), mm2(m, measure, opts)?)
                    }
                    MetaKind::Mm3 => {
                        let m = one_manifest(inputs, "mm3")?;
                        (dataset(m), mm3(m, measure, opts)?)
                    }
                    MetaKind::Mm4 => {
                        let m = one_manifest(inputs, "mm4")?;
                        let gts: Vec<BinMap> = (0..m.images.len()).into_par_iter().map(|i| m.load_gt(i)).collect::<Result<_>>()?;
                        let r = mm4_annotation_robustness_with(
                            |sm, gt| opts.config.score(measure, sm, gt),
                            &m.image_ids(),
                            |i| m.load_maps(i, &gts[i]),
                            &gts,
                            &opts.perturb,
                            opts.seed,
                        )?;
                        (dataset(m), r)
                    }
                    MetaKind::Mm5 | MetaKind::Table => unreachable!(),
                };
                let report = MetaReport {
                    dataset: ds,
                    measure: Some(measure),
                    result,
                };
                write_json(&opts.out.join(format!("mm{}_{measure}.json", report.result.mm_id)), &report)?;
                reports.push(report);
            }
            MetaOutput::Results(reports)
        }
    };
    Ok(output)
}

fn table_csv(t: &MetaTable) -> String {
    let mut out = String::from("measure");
    for d in &t.datasets {
        let _ = write!(out, ",{d} MM1,{d} MM2(%),{d} MM3(%)");
    }
    out.push('\n');
    for row in &t.rows {
        out.push_str(&row.measure.to_string());
        for (a, b, c) in &row.cells {
            let _ = write!(
                out,
                ",{},{},{}",
                a.map(format_score).unwrap_or_default(),
                format_score(*b),
                format_score(*c)
            );
        }
        out.push('\n');
    }
    out
}

fn table_markdown(t: &MetaTable) -> String {
    let mut out = String::from("| |");
    for d in &t.datasets {
        let _ = write!(out, " {d} MM1 | {d} MM2(%) | {d} MM3(%) |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(3 * t.datasets.len()));
    out.push('\n');
    for row in &t.rows {
        let label = match row.measure {
            Measure::Ap => "AP",
            Measure::Auc => "AUC",
            Measure::Fbw => "Fbw",
            Measure::S => "S",
            Measure::Fbeta => "Fbeta",
        };
        let _ = write!(out, "| {label} |");
        for (a, b, c) in &row.cells {
            let mm1 = a.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into());
            let _ = write!(out, " {mm1} | {b:.2} | {c:.2} |");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct PerturbOptions {
    pub params: PerturbParams,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbRecord {
    pub id: String,
    pub source: PathBuf,
    /// File name inside the output directory.
    pub output: String,
    pub item_seed: u64,
    pub foreground_before: usize,
    pub foreground_after: usize,
    pub structure_change: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbReport {
    pub seed: u64,
    pub params: PerturbParams,
    pub images: Vec<PerturbRecord>,
    pub failures: Vec<ImageFailure>,
}

/// File-name-safe form of an image id.
pub fn sanitize_id(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

/// Writes one perturbed ground truth per image plus `provenance.json`.
pub fn cmd_perturb(manifest: &DatasetManifest, opts: &PerturbOptions) -> Result<PerturbReport> {
    if opts.params.radius == 0 {
        return Err(Error::InvalidParameter("perturbation radius must be >= 1".into()));
    }
    create_dir(&opts.out)?;
    let results: Vec<std::result::Result<PerturbRecord, ImageFailure>> = (0..manifest.images.len())
        .into_par_iter()
        .map(|i| {
            let im = &manifest.images[i];
            let seed = item_seed(opts.seed, i);
            let run = || -> Result<PerturbRecord> {
                let gt = manifest.load_gt(i)?;
                let p = perturb_gt(&gt, opts.params.radius, opts.params.mode, seed)?;
                let output = format!("{}.png", sanitize_id(&im.id));
                p.save(opts.out.join(&output))?;
                Ok(PerturbRecord {
                    id: im.id.clone(),
                    source: im.gt.clone(),
                    output,
                    item_seed: seed,
                    foreground_before: gt.foreground_count(),
                    foreground_after: p.foreground_count(),
                    structure_change: structure_change(&gt, &p, opts.params.change_radius)?,
                })
            };
            run().map_err(|e| ImageFailure {
                image_id: im.id.clone(),
                measure: None,
                error: e.to_string(),
            })
        })
        .collect();
    let mut report = PerturbReport {
        seed: opts.seed,
        params: opts.params,
        images: Vec::new(),
        failures: Vec::new(),
    };
    for r in results {
        match r {
            Ok(rec) => report.images.push(rec),
            Err(f) => report.failures.push(f),
        }
    }
    write_json(&opts.out.join("provenance.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct PairsOptions {
    pub max_pairs: usize,
    pub min_distance: usize,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stimulus {
    pub image_id: String,
    pub distance: usize,
    pub gt: PathBuf,
    pub model_a: String,
    pub map_a: PathBuf,
    pub model_b: String,
    pub map_b: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StimulusManifest {
    pub seed: u64,
    pub max_pairs: usize,
    pub min_distance: usize,
    /// Images per rank distance, index = distance.
    pub histogram: Vec<u64>,
    pub pairs: Vec<Stimulus>,
}

/// Picks human-study pairs where measure A's favourite map is not measure
/// B's, and writes them as `pairs.json` with file paths.
pub fn cmd_pairs(a: &ScoreMatrix, b: &ScoreMatrix, manifest: &DatasetManifest, opts: &PairsOptions) -> Result<StimulusManifest> {
    let d = mm5_from_scores(a, b)?;
    let pairs = select_study_pairs(&d, opts.max_pairs, opts.min_distance, opts.seed)?;
    let pairs = pairs
        .into_iter()
        .map(|p| {
            let im = manifest
                .images
                .iter()
                .find(|im| im.id == p.image_id)
                .ok_or_else(|| Error::IdMismatch(format!("image '{}' not in manifest", p.image_id)))?;
            let map = |model: &str| {
                im.maps
                    .get(model)
                    .cloned()
                    .ok_or_else(|| Error::IdMismatch(format!("model '{model}' not in manifest")))
            };
            Ok(Stimulus {
                gt: im.gt.clone(),
                map_a: map(&p.model_a)?,
                map_b: map(&p.model_b)?,
                image_id: p.image_id,
                distance: p.distance,
                model_a: p.model_a,
                model_b: p.model_b,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = StimulusManifest {
        seed: opts.seed,
        max_pairs: opts.max_pairs,
        min_distance: opts.min_distance,
        histogram: d.histogram,
        pairs,
    };
    create_dir(&opts.out)?;
    write_json(&opts.out.join("pairs.json"), &report)?;
    Ok(report)
}
