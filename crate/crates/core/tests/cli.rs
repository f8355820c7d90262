mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::oracle;
use smeval::cli::DatasetManifest;
use smeval::{load_binary_map, load_gray_map, ScoreMatrix};

fn smeval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smeval"))
        .args(args)
        .env("SMEVAL_JOBS", "2")
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    manifest: PathBuf,
}

fn fixture(n_images: usize, n_models: usize, seed: u64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let manifest = common::write_dataset(&root.join("data"), n_images, n_models, (20, 16), seed);
    Fixture { _dir: dir, root, manifest }
}

#[test]
fn eval_scores_match_the_oracle_after_png_round_trip() {
    let f = fixture(3, 2, 1);
    let out = f.root.join("eval");
    ok(&smeval(&["eval", "--manifest", p(&f.manifest), "--out", p(&out)]));
    for name in [
        "scores_s.csv",
        "scores_fbeta.csv",
        "scores_fbw.csv",
        "scores_ap.csv",
        "scores_auc.csv",
        "model_means.csv",
        "summary.json",
        "timing.json",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }

    let m = DatasetManifest::load(&f.manifest).unwrap();
    let s = ScoreMatrix::read_csv_path(out.join("scores_s.csv")).unwrap();
    let fbw = ScoreMatrix::read_csv_path(out.join("scores_fbw.csv")).unwrap();
    assert_eq!(s.image_ids(), ["img000", "img001", "img002"]);
    assert_eq!(s.model_ids(), ["model0", "model1"]);
    for (i, img) in m.images.iter().enumerate() {
        let gt = load_binary_map(&img.gt, 0.5).unwrap();
        for (j, model) in s.model_ids().iter().enumerate() {
            let sm = load_gray_map(&img.maps[model]).unwrap();
            let (g, b) = (common::grid_f64(&sm), common::grid_bool(&gt));
            let want = oracle::s_measure(&g, &b, 0.5, 0.5, 4);
            assert!((s.get(i, j) - want).abs() < 1e-12, "S {} {model}: {} vs {want}", img.id, s.get(i, j));
            let want = oracle::fbw(&g, &b, 1.0, 5.0, 3, 5.0);
            assert!((fbw.get(i, j) - want).abs() < 1e-9, "Fbw {} {model}", img.id);
        }
    }

    let summary = read_json(out.join("summary.json"));
    assert_eq!(summary["n_images"], 3);
    assert_eq!(summary["failures"].as_array().unwrap().len(), 0);
    let mean_s = summary["means"]["s"]["model0"].as_f64().unwrap();
    assert!((mean_s - (s.get(0, 0) + s.get(1, 0) + s.get(2, 0)) / 3.0).abs() < 1e-12);
    let means_csv = std::fs::read_to_string(out.join("model_means.csv")).unwrap();
    assert!(means_csv.starts_with("model_id,s,fbeta,fbw,ap,auc\n"));
}

#[test]
fn measure_subset_and_parameters_are_honoured() {
    let f = fixture(2, 2, 2);
    let out = f.root.join("eval");
    ok(&smeval(&[
        "eval",
        "--manifest",
        p(&f.manifest),
        "--measures",
        "s",
        "--alpha",
        "1",
        "--out",
        p(&out),
    ]));
    assert!(out.join("scores_s.csv").is_file());
    assert!(!out.join("scores_fbw.csv").exists());

    let m = DatasetManifest::load(&f.manifest).unwrap();
    let s = ScoreMatrix::read_csv_path(out.join("scores_s.csv")).unwrap();
    let gt = load_binary_map(&m.images[0].gt, 0.5).unwrap();
    let sm = load_gray_map(&m.images[0].maps["model1"]).unwrap();
    let want = oracle::s_measure(&common::grid_f64(&sm), &common::grid_bool(&gt), 1.0, 0.5, 4);
    assert!((s.get(0, 1) - want).abs() < 1e-12);
}

#[test]
fn invalid_input_exits_with_one() {
    let f = fixture(2, 2, 3);
    let out = f.root.join("eval");
    let r = smeval(&["eval", "--manifest", p(&f.manifest), "--measures", "", "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(1));
    let r = smeval(&["eval", "--manifest", p(&f.manifest), "--measures", "psnr", "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(1));
    let r = smeval(&["eval", "--manifest", p(&f.root.join("missing.json")), "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("error"));
    let r = smeval(&["eval", "--manifest", p(&f.manifest), "--alpha", "1.5", "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn corrupt_map_is_reported_and_the_rest_is_scored() {
    let f = fixture(3, 2, 4);
    std::fs::write(f.root.join("data/model1/img001.png"), b"not a png").unwrap();
    let out = f.root.join("eval");
    let r = smeval(&["eval", "--manifest", p(&f.manifest), "--measures", "s,ap", "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = read_json(out.join("summary.json"));
    let failures = summary["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0]["image_id"], "img001");
    let s = ScoreMatrix::read_csv_path(out.join("scores_s.csv")).unwrap();
    assert_eq!(s.image_ids(), ["img000", "img002"]);
}

#[test]
fn rank_round_trips_eval_output() {
    let f = fixture(4, 3, 5);
    let out = f.root.join("eval");
    ok(&smeval(&["eval", "--manifest", p(&f.manifest), "--measures", "s", "--out", p(&out)]));
    let scores = ScoreMatrix::read_csv_path(out.join("scores_s.csv")).unwrap();

    let r = smeval(&["rank", "--scores", p(&out.join("scores_s.csv"))]);
    ok(&r);
    let text = String::from_utf8(r.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("image_id,model0,model1,model2"));
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], scores.image_ids()[i]);
        let ranks: Vec<f64> = cells[1..].iter().map(|c| c.parse().unwrap()).collect();
        for (a, &rank) in ranks.iter().enumerate() {
            // rank = 1 + number of strictly better models + half the ties
            let better = (0..3).filter(|&b| scores.get(i, b) > scores.get(i, a)).count() as f64;
            let tied = (0..3).filter(|&b| b != a && scores.get(i, b) == scores.get(i, a)).count() as f64;
            assert_eq!(rank, 1.0 + better + tied / 2.0);
        }
    }

    let ranked = f.root.join("by_model.csv");
    ok(&smeval(&[
        "rank",
        "--scores",
        p(&out.join("scores_s.csv")),
        "--by",
        "model",
        "--out",
        p(&ranked),
    ]));
    let text = std::fs::read_to_string(ranked).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "rank,model_id,mean_score");
    // noise grows with the model index in the fixture
    assert!(rows[1].starts_with("1,model0,"), "{text}");
    assert_eq!(rows.len(), 4);
}

#[test]
fn meta_measures_write_reports() {
    let f = fixture(6, 3, 6);
    let out = f.root.join("meta");
    for mm in ["1", "2", "3", "4"] {
        ok(&smeval(&[
            "meta",
            "--mm",
            mm,
            "--manifest",
            p(&f.manifest),
            "--measures",
            "s,fbw",
            "--switches",
            "4",
            "--out",
            p(&out),
        ]));
        for m in ["s", "fbw"] {
            let report = read_json(out.join(format!("mm{mm}_{m}.json")));
            assert_eq!(report["result"]["mm_id"].as_u64(), Some(mm.parse().unwrap()));
            assert!(report["result"]["value"].is_number());
        }
    }
    // the fixture's application ranking follows noise order, and so does S
    let mm1 = read_json(out.join("mm1_s.json"));
    // value is the mean 1 - rho, so agreement pushes it toward 0
    assert!(mm1["result"]["value"].as_f64().unwrap() < 0.5);
    let mm3 = read_json(out.join("mm3_s.json"));
    let pct = mm3["result"]["value"].as_f64().unwrap();
    assert!((0.0..=100.0).contains(&pct));

    let r = smeval(&["meta", "--mm", "5", "--manifest", p(&f.manifest), "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(1), "MM5 needs two score files");
}

#[test]
fn mm1_without_application_scores_names_the_gap() {
    let f = fixture(3, 2, 7);
    let mut m: serde_json::Value = read_json(f.manifest.clone());
    for img in m["images"].as_array_mut().unwrap() {
        img.as_object_mut().unwrap().remove("app_scores");
    }
    std::fs::write(&f.manifest, m.to_string()).unwrap();
    let r = smeval(&["meta", "--mm", "1", "--manifest", p(&f.manifest), "--out", p(&f.root.join("o"))]);
    assert_eq!(r.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&r.stderr).contains("app"),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
}

#[test]
fn mm5_and_pairs_from_two_score_files() {
    let f = fixture(8, 4, 8);
    let eval = f.root.join("eval");
    ok(&smeval(&["eval", "--manifest", p(&f.manifest), "--measures", "s", "--out", p(&eval)]));
    let a = eval.join("scores_s.csv");
    let sa = ScoreMatrix::read_csv_path(&a).unwrap();

    // measure B agrees with A except that, on image i, it promotes model i % 4
    // to first place, which pushes A's best (model0) down to second
    let rows: Vec<Vec<f64>> = (0..8)
        .map(|i| {
            let mut row = sa.row(i).to_vec();
            row[i % 4] += 10.0;
            row
        })
        .collect();
    let sb = ScoreMatrix::new(sa.image_ids().to_vec(), sa.model_ids().to_vec(), rows).unwrap();
    let b = f.root.join("scores_b.csv");
    sb.write_csv_path(&b).unwrap();

    let out = f.root.join("mm5");
    ok(&smeval(&["meta", "--mm", "5", "--scores", p(&a), "--scores-b", p(&b), "--out", p(&out)]));
    let report = read_json(out.join("mm5.json"));
    let hist: Vec<u64> = serde_json::from_value(report["result"]["histogram"].clone()).unwrap();
    assert_eq!(hist[..2], [2, 6]);
    assert!((report["result"]["value"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!(out.join("mm5_histogram.csv").is_file());

    let pairs = f.root.join("pairs");
    ok(&smeval(&[
        "pairs",
        "--scores",
        p(&a),
        "--scores-b",
        p(&b),
        "--manifest",
        p(&f.manifest),
        "--max-pairs",
        "4",
        "--out",
        p(&pairs),
    ]));
    let stim = read_json(pairs.join("pairs.json"));
    let chosen = stim["pairs"].as_array().unwrap();
    assert_eq!(chosen.len(), 4);
    for pair in chosen {
        assert_eq!(pair["model_a"], "model0");
        assert_ne!(pair["model_b"], "model0");
        assert_eq!(pair["distance"], 1);
        assert!(Path::new(pair["map_a"].as_str().unwrap()).is_file());
    }

    // identical measures never disagree
    let r = smeval(&[
        "pairs",
        "--scores",
        p(&a),
        "--scores-b",
        p(&a),
        "--manifest",
        p(&f.manifest),
        "--out",
        p(&pairs),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("no qualifying"));
}

#[test]
fn table_has_one_column_group_per_dataset() {
    let f1 = fixture(5, 3, 9);
    let f2 = fixture(5, 3, 10);
    let out = f1.root.join("table");
    ok(&smeval(&[
        "meta",
        "--mm",
        "table",
        "--manifest",
        p(&f1.manifest),
        "--manifest",
        p(&f2.manifest),
        "--switches",
        "3",
        "--out",
        p(&out),
    ]));
    let csv = std::fs::read_to_string(out.join("table.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0].split(',').count(), 7);
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["ap", "auc", "fbw", "s"]);
    assert!(std::fs::read_to_string(out.join("table.md")).unwrap().contains("| S |"));
}

#[test]
fn perturb_is_reproducible_per_seed() {
    let f = fixture(4, 2, 11);
    let run = |seed: &str, dir: &str| {
        let out = f.root.join(dir);
        ok(&smeval(&[
            "perturb",
            "--manifest",
            p(&f.manifest),
            "--seed",
            seed,
            "--radius",
            "2",
            "--out",
            p(&out),
        ]));
        out
    };
    let (a, b, c) = (run("3", "a"), run("3", "b"), run("4", "c"));
    let prov = std::fs::read(a.join("provenance.json")).unwrap();
    assert_eq!(prov, std::fs::read(b.join("provenance.json")).unwrap());
    assert_ne!(prov, std::fs::read(c.join("provenance.json")).unwrap());
    for i in 0..4 {
        let name = format!("img{i:03}.png");
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
    }
    let report = read_json(a.join("provenance.json"));
    assert_eq!(report["seed"], 3);
    assert_eq!(report["images"].as_array().unwrap().len(), 4);

    let r = smeval(&["perturb", "--manifest", p(&f.manifest), "--radius", "0", "--out", p(&f.root.join("z"))]);
    assert_eq!(r.status.code(), Some(1));
}

const GOLDEN_FILES: [&str; 7] = [
    "scores_s.csv",
    "scores_fbeta.csv",
    "scores_fbw.csv",
    "scores_ap.csv",
    "scores_auc.csv",
    "model_means.csv",
    "summary.json",
];

/// The committed three-image fixture must reproduce the committed goldens
/// byte for byte. `SMEVAL_BLESS=1` rewrites them; the oracle check below
/// keeps a bad bless from slipping in.
#[test]
fn three_image_fixture_matches_golden() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/three");
    let golden = fixture.join("golden");
    let dir = tempfile::tempdir().unwrap();
    ok(&smeval(&[
        "eval",
        "--manifest",
        p(&fixture.join("manifest.json")),
        "--out",
        p(dir.path()),
    ]));

    if std::env::var_os("SMEVAL_BLESS").is_some() {
        std::fs::create_dir_all(&golden).unwrap();
        for name in GOLDEN_FILES {
            std::fs::copy(dir.path().join(name), golden.join(name)).unwrap();
        }
    }
    for name in GOLDEN_FILES {
        let got = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let want = std::fs::read_to_string(golden.join(name)).unwrap();
        assert_eq!(got, want, "{name} drifted from the golden copy");
    }

    let m = DatasetManifest::load(fixture.join("manifest.json")).unwrap();
    let s = ScoreMatrix::read_csv_path(golden.join("scores_s.csv")).unwrap();
    let fbw = ScoreMatrix::read_csv_path(golden.join("scores_fbw.csv")).unwrap();
    let fbeta = ScoreMatrix::read_csv_path(golden.join("scores_fbeta.csv")).unwrap();
    for (i, img) in m.images.iter().enumerate() {
        let gt = common::grid_bool(&load_binary_map(&img.gt, 0.5).unwrap());
        for (j, model) in s.model_ids().iter().enumerate() {
            let sm = common::grid_f64(&load_gray_map(&img.maps[model]).unwrap());
            assert!((s.get(i, j) - oracle::s_measure(&sm, &gt, 0.5, 0.5, 4)).abs() < 1e-12);
            assert!((fbw.get(i, j) - oracle::fbw(&sm, &gt, 1.0, 5.0, 3, 5.0)).abs() < 1e-9);

            let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
            for (srow, grow) in sm.iter().zip(&gt) {
                for (&v, &g) in srow.iter().zip(grow) {
                    match (v >= 0.5, g) {
                        (true, true) => tp += 1.0,
                        (true, false) => fp += 1.0,
                        (false, true) => fn_ += 1.0,
                        _ => {}
                    }
                }
            }
            let f1 = 2.0 * tp / (2.0 * tp + fp + fn_);
            assert!((fbeta.get(i, j) - f1).abs() < 1e-12, "F1 {} {model}", img.id);
        }
    }
}

#[test]
fn rank_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "image_id,m0,m1\nimg0,0.5\n").unwrap();
    assert_eq!(smeval(&["rank", "--scores", p(&bad)]).status.code(), Some(1));
    std::fs::write(&bad, "image_id,m0\nimg0,high\n").unwrap();
    assert_eq!(smeval(&["rank", "--scores", p(&bad)]).status.code(), Some(1));
}
