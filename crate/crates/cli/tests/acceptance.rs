//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criteria 4 and 5 reproduce published UCI benchmark figures and need the
//! dataset files in `data/uci/` (or `$MOBAYES_DATA_DIR`); run
//! `scripts/fetch_data.sh` once to download them. Without the files those
//! two tests fail with instructions — they are never silently skipped.

use std::fs;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mobayes::classifier::ClassDistribution;
use mobayes::dataset::{AttributeSpec, Cell, Dataset};
use mobayes::metrics::{accuracy, rmse, zero_one_loss, PredictionRecord};
use mobayes::moea::{enora_rank, fast_nondominated_sort, nsga2_rank, Individual};
use mobayes::pipeline::{cross_validate_pipeline, PipelineConfig};
use mobayes::moea::{ClassifierKind, RankingStrategy};
use mobayes::{fit_aode, fit_nb, load_arff, FeatureMask};
use mobayes_testkit::datagen::{random_dataset, random_objectives, DatasetShape};
use mobayes_testkit::oracle::{nb_oracle, peel_fronts, spode_oracle};

fn criterion<F: FnOnce() + UnwindSafe>(id: u32, description: &str, body: F) {
    let outcome = catch_unwind(body);
    match &outcome {
        Ok(()) => println!("criterion {id}: PASS — {description}"),
        Err(_) => println!("criterion {id}: FAIL — {description}"),
    }
    if let Err(panic) = outcome {
        resume_unwind(panic);
    }
}

#[test]
fn criterion_1_oracle_equivalence() {
    criterion(1, "classifier predictions match brute-force oracles to 1e-12", || {
        let start = Instant::now();
        let shape = DatasetShape {
            max_attributes: 6,
            max_values: 4,
            max_rows: 200,
            max_classes: 3,
            missing_rate: 0.1,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
        for _ in 0..50 {
            let ds = random_dataset(&mut rng, &shape);
            let aode = fit_aode(&ds, 1).unwrap();
            let nb = fit_nb(&ds).unwrap();
            for _ in 0..20 {
                let instance: Vec<Cell> = ds
                    .attributes()
                    .iter()
                    .map(|spec| {
                        if rng.gen_bool(0.1) {
                            Cell::Missing
                        } else {
                            Cell::Idx(rng.gen_range(0..spec.n_values()) as u32)
                        }
                    })
                    .collect();
                let got = aode.predict(&instance).unwrap();
                let want = spode_oracle(&ds, &instance, 1);
                for (g, w) in got.probabilities().iter().zip(&want) {
                    assert!((g - w).abs() < 1e-12, "aode {g} vs oracle {w}");
                }
                let got = nb.predict(&instance).unwrap();
                let want = nb_oracle(&ds, &instance);
                for (g, w) in got.probabilities().iter().zip(&want) {
                    assert!((g - w).abs() < 1e-12, "nb {g} vs oracle {w}");
                }
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 10.0, "oracle sweep took {elapsed:.1}s, budget 10s");
    });
}

#[test]
fn criterion_2_front_correctness() {
    criterion(2, "fast sort matches brute-force peeling; one slot equals global", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0xF207);
        for round in 0..1000 {
            let len = rng.gen_range(1..=64);
            let max_card = rng.gen_range(1..=16);
            let objs = random_objectives(&mut rng, len, max_card);
            assert_eq!(
                fast_nondominated_sort(&objs),
                peel_fronts(&objs),
                "population {round} disagrees"
            );

            let pop: Vec<Individual> = objs
                .iter()
                .map(|o| {
                    let mut bits = vec![false; 16];
                    for b in 0..o.cardinality {
                        bits[b] = true;
                    }
                    let mut ind = Individual::new(FeatureMask::from_bits(bits).unwrap(), 0.5, 0.5);
                    ind.set_objectives(*o);
                    ind
                })
                .collect();
            assert_eq!(enora_rank(&pop, 16, 1), nsga2_rank(&pop));
        }
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 5.0, "front sweep took {elapsed:.1}s, budget 5s");
    });
}

#[test]
fn criterion_3_metric_identities() {
    criterion(3, "0-1 loss complements accuracy; RMSE anchors hold", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x3333);
        for _ in 0..200 {
            let n_classes = rng.gen_range(2..=4);
            let records: Vec<PredictionRecord> = (0..rng.gen_range(1..60))
                .map(|_| {
                    let scores: Vec<f64> = (0..n_classes).map(|_| rng.gen::<f64>() + 1e-6).collect();
                    PredictionRecord::new(
                        rng.gen_range(0..n_classes),
                        ClassDistribution::from_scores(scores),
                    )
                })
                .collect();
            let acc = accuracy(&records).unwrap();
            let loss = zero_one_loss(&records).unwrap();
            assert_eq!(loss, 1.0 - acc, "identity must hold exactly");
        }

        let uniform: Vec<PredictionRecord> = (0..10)
            .map(|i| PredictionRecord::new(i % 2, ClassDistribution::from_scores(vec![0.5, 0.5])))
            .collect();
        assert!((rmse(&uniform, 2).unwrap() - 0.5).abs() < 1e-12);

        let perfect: Vec<PredictionRecord> = (0..10)
            .map(|i| {
                let mut scores = vec![0.0, 0.0];
                scores[i % 2] = 1.0;
                PredictionRecord::new(i % 2, ClassDistribution::from_scores(scores))
            })
            .collect();
        assert_eq!(rmse(&perfect, 2).unwrap(), 0.0);
    });
}

// ---------------------------------------------------------------------------
// Reference-figure reproduction (needs the UCI dataset files)
// ---------------------------------------------------------------------------

fn data_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("MOBAYES_DATA_DIR") {
        return PathBuf::from(dir);
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/uci")
}

fn require_datasets(files: &[&str]) -> Vec<PathBuf> {
    let dir = data_dir();
    let missing: Vec<&&str> = files.iter().filter(|f| !dir.join(**f).exists()).collect();
    assert!(
        missing.is_empty(),
        "dataset files missing from {}: {missing:?}\n\
         Run scripts/fetch_data.sh (downloads the standard UCI ARFF bundle), or set\n\
         MOBAYES_DATA_DIR to a directory that already contains these files.",
        dir.display()
    );
    files.iter().map(|f| dir.join(f)).collect()
}

#[test]
fn criterion_4_classifier_reference_accuracy() {
    criterion(4, "plain AODE 10-fold accuracy within ±3.0 points of reference", || {
        let start = Instant::now();
        let targets: [(&str, f64); 5] = [
            ("breast-cancer.arff", 72.53),
            ("diabetes.arff", 76.37),
            ("heart-c.arff", 82.48),
            ("hepatitis.arff", 84.92),
            ("lymph.arff", 86.25),
        ];
        let paths = require_datasets(&targets.map(|(f, _)| f));
        let config = PipelineConfig::default(); // no selector, AODE, 10 bins

        for ((file, target), path) in targets.iter().zip(&paths) {
            let ds = load_arff(path).unwrap();
            let mut accs = Vec::new();
            for seed in [1u64, 2, 3] {
                let report = cross_validate_pipeline(&ds, &config, 10, seed).unwrap();
                accs.push(report.aggregate.accuracy * 100.0);
            }
            let mean = accs.iter().sum::<f64>() / accs.len() as f64;
            println!("  {file}: mean accuracy {mean:.2}% (target {target} ± 3.0)");
            assert!(
                (mean - target).abs() <= 3.0,
                "{file}: accuracy {mean:.2} outside {target} ± 3.0"
            );
        }
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 120.0, "classifier sweep took {elapsed:.0}s, budget 120s");
    });
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

#[test]
fn criterion_5_full_pipeline_reference_figures() {
    criterion(5, "ENORA+AODE matches reference accuracy/RMSE and reduces attributes", || {
        let start = Instant::now();
        // (file, accuracy %, rmse)
        let targets: [(&str, f64, f64); 6] = [
            ("breast-cancer.arff", 72.73, 0.4486),
            ("diabetes.arff", 75.78, 0.4132),
            ("heart-c.arff", 83.17, 0.2232),
            ("hepatitis.arff", 87.09, 0.3165),
            ("lymph.arff", 85.81, 0.2315),
            ("credit-g.arff", 73.0, 0.4248),
        ];
        let paths = require_datasets(&targets.map(|(f, _, _)| f));
        let config = PipelineConfig {
            selector: Some(RankingStrategy::Enora),
            population_size: 50,
            generations: 50,
            classifier: ClassifierKind::Aode { m_threshold: 1 },
            ..PipelineConfig::default()
        };

        let mut strictly_reduced = 0usize;
        for ((file, acc_target, rmse_target), path) in targets.iter().zip(&paths) {
            let ds = load_arff(path).unwrap();
            let mut accs = Vec::new();
            let mut rmses = Vec::new();
            let mut cards = Vec::new();
            for seed in [1u64, 2, 3, 4, 5] {
                let report = cross_validate_pipeline(&ds, &config, 10, seed).unwrap();
                accs.push(report.aggregate.accuracy * 100.0);
                rmses.push(report.aggregate.rmse);
                cards.push(report.aggregate.mean_selected_cardinality);
            }
            let acc = median(&mut accs);
            let rm = median(&mut rmses);
            let card = median(&mut cards);
            let n = ds.n_attributes() as f64;
            println!(
                "  {file}: accuracy {acc:.2}% (target {acc_target} ± 5.0), rmse {rm:.4} \
                 (target {rmse_target} ± 0.06), attributes {card:.1}/{n}"
            );
            assert!(
                (acc - acc_target).abs() <= 5.0,
                "{file}: accuracy {acc:.2} outside {acc_target} ± 5.0"
            );
            assert!(
                (rm - rmse_target).abs() <= 0.06,
                "{file}: rmse {rm:.4} outside {rmse_target} ± 0.06"
            );
            assert!(card <= n, "{file}: selected more attributes than exist");
            if card < n - 1e-9 {
                strictly_reduced += 1;
            }
        }
        assert!(
            strictly_reduced >= 4,
            "attribute count strictly reduced on only {strictly_reduced}/6 datasets"
        );
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed < 1800.0, "pipeline sweep took {elapsed:.0}s, budget 30min");
    });
}

// ---------------------------------------------------------------------------
// Complexity, determinism, comparison machinery
// ---------------------------------------------------------------------------

fn synthetic_rows(rows: usize, attrs: usize, values: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<AttributeSpec> = (0..attrs)
        .map(|a| {
            AttributeSpec::nominal(
                format!("a{a}"),
                (0..values).map(|v| format!("v{v}")).collect(),
            )
        })
        .collect();
    let class = AttributeSpec::nominal("y", vec!["c0".into(), "c1".into()]);
    let data: Vec<Vec<Cell>> = (0..rows)
        .map(|_| {
            (0..attrs)
                .map(|_| Cell::Idx(rng.gen_range(0..values) as u32))
                .collect()
        })
        .collect();
    let classes: Vec<u32> = (0..rows).map(|_| rng.gen_range(0..2)).collect();
    Dataset::new(specs, class, data, classes).unwrap()
}

#[test]
fn criterion_6_complexity_properties() {
    criterion(6, "single pass, exact cube size, linear fit scaling", || {
        // cube cell count equals the closed form m·Σ_{i<j}v_i·v_j + m·Σv_i + m
        let mut rng = ChaCha8Rng::seed_from_u64(0x60);
        for _ in 0..20 {
            let ds = random_dataset(&mut rng, &DatasetShape::default());
            let model = fit_aode(&ds, 1).unwrap();
            let v: Vec<usize> = ds.attributes().iter().map(|a| a.n_values()).collect();
            let m = ds.n_classes();
            let pair_sum: usize = (0..v.len())
                .flat_map(|i| ((i + 1)..v.len()).map(move |j| (i, j)))
                .map(|(i, j)| v[i] * v[j])
                .sum();
            let expected = m * pair_sum + m * v.iter().sum::<usize>() + m;
            assert_eq!(model.cube().cell_count(), expected);
        }

        // instrumented fit reads each row exactly once
        let ds = synthetic_rows(5_000, 8, 4, 0x61);
        assert_eq!(ds.row_reads(), 0);
        let _ = fit_aode(&ds, 1).unwrap();
        assert_eq!(ds.row_reads(), 5_000);

        // doubling the training rows scales fit time by roughly 2x
        let small = synthetic_rows(200_000, 12, 4, 0x62);
        let large = synthetic_rows(400_000, 12, 4, 0x63);
        let time_fit = |ds: &Dataset| {
            let t = Instant::now();
            let model = fit_aode(ds, 1).unwrap();
            let dt = t.elapsed().as_secs_f64();
            std::hint::black_box(model);
            dt
        };
        let mut small_times = Vec::new();
        let mut large_times = Vec::new();
        for _ in 0..5 {
            small_times.push(time_fit(&small));
            large_times.push(time_fit(&large));
        }
        let ratio = median(&mut large_times) / median(&mut small_times);
        println!("  fit-time ratio for 2x rows: {ratio:.2}");
        assert!(
            (1.5..=3.0).contains(&ratio),
            "fit-time ratio {ratio:.2} outside [1.5, 3.0]"
        );
    });
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mobayes"))
}

fn write_mixed_csv(path: &Path, rows: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x717);
    let mut text = String::from("num,cat,other,label\n");
    for _ in 0..rows {
        let y: u32 = rng.gen_range(0..2);
        let num = y as f64 + rng.gen::<f64>();
        let cat = if rng.gen_bool(0.08) {
            "?".to_string()
        } else {
            format!("g{}", rng.gen_range(0..3))
        };
        let other: f64 = rng.gen();
        text.push_str(&format!("{num:.4},{cat},{other:.4},c{y}\n"));
    }
    fs::write(path, text).unwrap();
}

/// Recursively zeroes every `*_seconds` field so wall times drop out.
fn zero_times(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            for (key, v) in map.iter_mut() {
                if key.ends_with("_seconds") {
                    *v = serde_json::Value::from(0.0);
                } else {
                    zero_times(v);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(zero_times),
        _ => {}
    }
}

#[test]
fn criterion_7_determinism_of_reports() {
    criterion(7, "identical config and seed give byte-identical reports", || {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("mixed.csv");
        write_mixed_csv(&data, 70);

        let mut jsons = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("run{run}"));
            let output = bin()
                .args([
                    "evaluate",
                    "--data",
                    data.to_str().unwrap(),
                    "--selector",
                    "enora",
                    "--pop-size",
                    "10",
                    "--generations",
                    "4",
                    "--inner-folds",
                    "3",
                    "--folds",
                    "4",
                    "--seed",
                    "13",
                    "--out",
                    out.to_str().unwrap(),
                ])
                .output()
                .unwrap();
            assert!(output.status.success());
            jsons.push(fs::read_to_string(out.with_extension("json")).unwrap());
        }

        let mut a: serde_json::Value = serde_json::from_str(&jsons[0]).unwrap();
        let mut b: serde_json::Value = serde_json::from_str(&jsons[1]).unwrap();
        zero_times(&mut a);
        zero_times(&mut b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "reports differ beyond wall-time fields"
        );
    });
}

#[test]
fn criterion_8_win_tie_loss_recomputation() {
    criterion(8, "compare command reproduces the recomputed 3-0-4 tally", || {
        let dir = tempfile::tempdir().unwrap();
        let ours = dir.path().join("ours.csv");
        let theirs = dir.path().join("theirs.csv");
        // the published per-dataset accuracy columns, ours vs the plain
        // one-dependence baseline
        fs::write(
            &ours,
            "dataset,accuracy\nbreast-cancer,72.73\ngerman-credit,73\ndiabetes,75.78\nheart-c,83.17\nhepatitis,87.09\nlymph,85.81\nwaveform,84.1\n",
        )
        .unwrap();
        fs::write(
            &theirs,
            "dataset,accuracy\nbreast-cancer,72.53\ngerman-credit,76.42\ndiabetes,76.37\nheart-c,82.48\nhepatitis,84.92\nlymph,86.25\nwaveform,84.87\n",
        )
        .unwrap();

        let output = bin()
            .args(["compare", ours.to_str().unwrap(), theirs.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(output.status.success(), "compare must exit 0");
        let text = String::from_utf8_lossy(&output.stdout);
        assert!(
            text.contains("W-T-L: 3-0-4"),
            "expected the recomputed 3-0-4 tally, got:\n{text}"
        );
    });
}
