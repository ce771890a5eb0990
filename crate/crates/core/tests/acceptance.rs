//! Acceptance suite: one test per gate criterion, each printing a
//! pass/fail line. Criteria 4-6 share a single desk-scale experiment run.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use tradebench::config::{CorpusSource, EvalConfig, ExperimentConfig, SyntheticConfig};
use tradebench::corpus::generate_synthetic;
use tradebench::eval::{confusion, quality, RunRecord};
use tradebench::features::FeatureConfig;
use tradebench::harness::{emit_reports, render_csv, run_experiment, ExperimentResult, RunCell};
use tradebench::learners::{Algorithm, Hyperparams};
use tradebench::rng::SplitMix64;
use tradebench::tradeoff::{
    break_even, break_even_closed_form, frontier, performance, CostForm, CostModel,
    PerformancePoint, TimeBasis, BREAK_EVEN_REL_TOL,
};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}

// ---------------------------------------------------------------- shared run

struct BigRun {
    holdout: ExperimentResult,
    kfold: ExperimentResult,
    elapsed: Duration,
    out_dir: PathBuf,
}

fn synthetic_section() -> SyntheticConfig {
    SyntheticConfig {
        num_classes: 4,
        vocab_per_class: 30_000,
        shared_vocab: 10_000,
        signal_prob: 0.7,
        doc_len_range: (5, 10),
        target_bytes: 64_000_000,
        seed: None,
    }
}

fn base_config() -> ExperimentConfig {
    ExperimentConfig {
        task: "synth4".into(),
        corpus: CorpusSource { path: None, synthetic: Some(synthetic_section()) },
        algorithms: vec![
            Hyperparams::for_algorithm(Algorithm::Nb),
            // extra epochs so SGD converges on every fold of the k-fold runs
            Hyperparams { epochs: 10, ..Hyperparams::for_algorithm(Algorithm::Lr) },
            Hyperparams::for_algorithm(Algorithm::Svm),
            Hyperparams::for_algorithm(Algorithm::Knn),
        ],
        sizes_mb: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
        eval: EvalConfig { holdout: Some(0.2), kfold: None },
        features: FeatureConfig { max_features: 200_000, min_df: 2 },
        time_basis: TimeBasis::Train,
        seed: 42,
        output_dir: std::env::temp_dir()
            .join(format!("tradebench_acceptance_{}", std::process::id())),
        parallel: false,
    }
}

fn big_run() -> &'static BigRun {
    static RUN: OnceLock<BigRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = base_config();
        let started = Instant::now();
        let holdout = run_experiment(&cfg).expect("holdout experiment");

        let kfold_cfg = ExperimentConfig {
            sizes_mb: vec![8.0],
            eval: EvalConfig { holdout: None, kfold: Some(5) },
            algorithms: vec![
                Hyperparams::for_algorithm(Algorithm::Nb),
                Hyperparams { epochs: 10, ..Hyperparams::for_algorithm(Algorithm::Lr) },
                Hyperparams::for_algorithm(Algorithm::Svm),
            ],
            ..base_config()
        };
        let kfold = run_experiment(&kfold_cfg).expect("kfold experiment");
        let elapsed = started.elapsed();

        let out_dir = cfg.output_dir.clone();
        emit_reports(&holdout, &out_dir).expect("report emission");
        BigRun { holdout, kfold, elapsed, out_dir }
    })
}

fn records(res: &ExperimentResult) -> Vec<&RunRecord> {
    res.runs
        .iter()
        .filter_map(|c| match c {
            RunCell::Complete { record } => Some(record),
            RunCell::Failed { .. } => None,
        })
        .collect()
}

fn record_at(res: &ExperimentResult, algorithm: Algorithm, size_mb: f64) -> &RunRecord {
    records(res)
        .into_iter()
        .find(|r| r.algorithm == algorithm && r.size_mb == size_mb)
        .unwrap_or_else(|| panic!("missing record {algorithm} at {size_mb} MB"))
}

// ------------------------------------------------------------- criterion 1

#[test]
fn criterion_1_break_even_regression() {
    let started = Instant::now();
    let a = CostModel::new(CostForm::Linear, 12.0, 0.1, 0.0).unwrap();
    let b = CostModel::new(CostForm::Linearithmic, 2.0, 0.1, 0.05).unwrap();
    let solved = break_even(&a, &b).unwrap();
    let (t_closed, na_closed, nb_closed) = break_even_closed_form(&a, &b).unwrap();
    let elapsed = started.elapsed();

    let rel = |x: f64, want: f64| (x - want).abs() / want;
    let n_a = solved.n_a.unwrap();
    let n_b = solved.n_b.unwrap();
    let ok = solved.exists
        && rel(n_b, 512.0) <= BREAK_EVEN_REL_TOL
        && rel(n_a, 768.0) <= BREAK_EVEN_REL_TOL
        && rel(nb_closed, 512.0) <= BREAK_EVEN_REL_TOL
        && rel(na_closed, 768.0) <= BREAK_EVEN_REL_TOL
        && rel(solved.time_budget.unwrap(), t_closed) <= BREAK_EVEN_REL_TOL
        && elapsed < Duration::from_secs(1);
    report(
        1,
        ok,
        &format!(
            "bisection n_A={n_a:.9}, n_B={n_b:.9}; closed form n_A={na_closed:.9}, \
             n_B={nb_closed:.9}; {elapsed:?}"
        ),
    );
}

// ------------------------------------------------------------- criterion 2

/// Independent per-definition recomputation straight from the label lists.
fn brute_force_metrics(gold: &[usize], pred: &[usize], k: usize) -> (Vec<(f64, f64, f64)>, f64) {
    let mut per_class = Vec::new();
    for c in 0..k {
        let tp = gold.iter().zip(pred).filter(|(g, p)| **g == c && **p == c).count() as f64;
        let pred_c = pred.iter().filter(|p| **p == c).count() as f64;
        let gold_c = gold.iter().filter(|g| **g == c).count() as f64;
        let precision = if pred_c == 0.0 { 0.0 } else { tp / pred_c };
        let recall = if gold_c == 0.0 { 0.0 } else { tp / gold_c };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push((precision, recall, f1));
    }
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count() as f64;
    let accuracy = if gold.is_empty() { 0.0 } else { correct / gold.len() as f64 };
    (per_class, accuracy)
}

#[test]
fn criterion_2_metric_oracle_equivalence() {
    let mut rng = SplitMix64::new(0xC2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = 2 + rng.next_below(4) as usize; // 2..=5 classes
        let n = rng.next_below(201) as usize;
        let classes: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let gold: Vec<usize> = (0..n).map(|_| rng.next_below(k as u64) as usize).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.next_below(k as u64) as usize).collect();
        let gold_s: Vec<String> = gold.iter().map(|&i| classes[i].clone()).collect();
        let pred_s: Vec<String> = pred.iter().map(|&i| classes[i].clone()).collect();

        let q = quality(&confusion(&gold_s, &pred_s, &classes).unwrap());
        let (expected, accuracy) = brute_force_metrics(&gold, &pred, k);

        for (m, &(p, r, f)) in q.per_class.iter().zip(&expected) {
            worst = worst
                .max((m.precision - p).abs())
                .max((m.recall - r).abs())
                .max((m.f1 - f).abs());
        }
        let macro_p = expected.iter().map(|e| e.0).sum::<f64>() / k as f64;
        let macro_r = expected.iter().map(|e| e.1).sum::<f64>() / k as f64;
        let macro_f = expected.iter().map(|e| e.2).sum::<f64>() / k as f64;
        worst = worst
            .max((q.macro_precision - macro_p).abs())
            .max((q.macro_recall - macro_r).abs())
            .max((q.macro_f1 - macro_f).abs())
            .max((q.accuracy - accuracy).abs())
            .max((q.micro_f1 - q.accuracy).abs());
    }
    report(2, worst <= 1e-12, &format!("worst absolute deviation {worst:.2e} over 1000 cases"));
}

// ------------------------------------------------------------- criterion 3

#[test]
fn criterion_3_frontier_oracle_equivalence() {
    let mut rng = SplitMix64::new(0xC3);
    let mut checked_sets = 0;
    for _ in 0..500 {
        let n = 1 + rng.next_below(50) as usize;
        let points: Vec<PerformancePoint> = (0..n)
            .map(|i| {
                PerformancePoint::new(
                    Algorithm::ALL[i % 6],
                    rng.next_f64(),
                    10.0,
                    0.01 + rng.next_f64() * 10.0,
                )
                .unwrap()
            })
            .collect();
        let f = frontier(&points).unwrap();

        // O(n^2) dominance filter
        let dominated = |p: &PerformancePoint| {
            points.iter().any(|q| {
                q.quality >= p.quality
                    && q.time_s <= p.time_s
                    && (q.quality > p.quality || q.time_s < p.time_s)
            })
        };
        let mut expected: Vec<&PerformancePoint> =
            points.iter().filter(|p| !dominated(p)).collect();
        expected.sort_by(|a, b| {
            a.time_s.partial_cmp(&b.time_s).unwrap().then_with(|| a.algorithm.cmp(&b.algorithm))
        });
        let got: Vec<(f64, f64)> = f.pareto.iter().map(|p| (p.time_s, p.quality)).collect();
        let want: Vec<(f64, f64)> = expected.iter().map(|p| (p.time_s, p.quality)).collect();
        assert_eq!(got, want, "pareto mismatch on a {n}-point set");

        // every hull point maximizes quality - lambda*time for some lambda >= 0:
        // sample lambda on a grid built from adjacent hull-edge slopes
        for (i, h) in f.hull.iter().enumerate() {
            let slope = |a: &PerformancePoint, b: &PerformancePoint| {
                (b.quality - a.quality) / (b.time_s - a.time_s)
            };
            let lambda = if f.hull.len() == 1 {
                0.0
            } else if i == 0 {
                2.0 * slope(&f.hull[0], &f.hull[1]) + 1.0
            } else if i == f.hull.len() - 1 {
                0.0
            } else {
                0.5 * (slope(&f.hull[i - 1], h) + slope(h, &f.hull[i + 1]))
            };
            assert!(lambda >= 0.0);
            let objective = |p: &PerformancePoint| p.quality - lambda * p.time_s;
            let best = points.iter().map(objective).fold(f64::NEG_INFINITY, f64::max);
            assert!(
                objective(h) >= best - 1e-9,
                "hull point at (t={}, q={}) does not maximize for lambda={lambda}",
                h.time_s,
                h.quality
            );
        }
        checked_sets += 1;
    }
    report(3, checked_sets == 500, &format!("{checked_sets} random point sets checked"));
}

// ------------------------------------------------------------- criterion 4

#[test]
fn criterion_4_learning_curve_reproduction() {
    let run = big_run();
    let sizes = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let mut ok = true;
    let mut detail = String::new();
    for algo in [Algorithm::Nb, Algorithm::Lr, Algorithm::Svm] {
        let curve: Vec<f64> = sizes
            .iter()
            .map(|&s| record_at(&run.holdout, algo, s).quality.macro_f1)
            .collect();
        let monotone = curve.windows(2).all(|w| w[1] >= w[0] - 0.02);
        let reaches = curve[3] >= 0.90; // value at 8 MB
        if !(monotone && reaches) {
            ok = false;
        }
        detail.push_str(&format!(
            "{algo}: {} (monotone={monotone}, f1@8MB={:.3}); ",
            curve.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" "),
            curve[3]
        ));
    }
    let in_budget = run.elapsed <= Duration::from_secs(900);
    if !in_budget {
        ok = false;
    }
    detail.push_str(&format!("runtime {:?}", run.elapsed));
    report(4, ok, &detail);
}

// ------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_linear_time_performance_stability() {
    let run = big_run();
    let mut ok = true;
    let mut detail = String::new();
    for algo in [Algorithm::Nb, Algorithm::Lr, Algorithm::Svm] {
        let perf = |size: f64| {
            let r = record_at(&run.holdout, algo, size);
            performance(r.quality.macro_f1, r.size_mb, r.train_s).unwrap()
        };
        let ratio = perf(64.0) / perf(4.0);
        if !(ratio >= 1.0 / 3.0 && ratio <= 3.0) {
            ok = false;
        }
        detail.push_str(&format!("{algo}: p64/p4={ratio:.3}; "));
    }
    let knn_perf = |size: f64| {
        let r = record_at(&run.holdout, Algorithm::Knn, size);
        performance(r.quality.macro_f1, r.size_mb, r.train_s + r.predict_s).unwrap()
    };
    let (knn4, knn64) = (knn_perf(4.0), knn_perf(64.0));
    if !(knn64 < knn4) {
        ok = false;
    }
    detail.push_str(&format!("KNN train+predict: p4={knn4:.2}, p64={knn64:.2}"));
    report(5, ok, &detail);
}

// ------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_evaluation_method_agreement() {
    let run = big_run();
    let mut ok = true;
    let mut detail = String::new();
    for algo in [Algorithm::Nb, Algorithm::Lr, Algorithm::Svm] {
        let hold = record_at(&run.holdout, algo, 8.0).quality.macro_f1;
        let kf = record_at(&run.kfold, algo, 8.0).quality.macro_f1;
        let gap = (hold - kf).abs();
        if gap > 0.05 {
            ok = false;
        }
        detail.push_str(&format!("{algo}: holdout={hold:.4}, 5-fold={kf:.4}, gap={gap:.4}; "));
    }
    report(6, ok, &detail);
}

// ------------------------------------------------------------- criterion 7

/// Drop the measured-time columns: featurize_s, train_s, predict_s and the
/// performance column, which is computed from measured time.
fn strip_timing_columns(csv: &str) -> String {
    let timing = ["featurize_s", "train_s", "predict_s", "performance"];
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let keep: Vec<usize> =
        (0..header.len()).filter(|&i| !timing.contains(&header[i])).collect();
    let mut out = String::new();
    for line in csv.lines() {
        let fields: Vec<&str> = line.split(',').collect();
        let kept: Vec<&str> = keep.iter().map(|&i| fields[i]).collect();
        out.push_str(&kept.join(","));
        out.push('\n');
    }
    out
}

#[test]
fn criterion_7_determinism() {
    let cfg = ExperimentConfig {
        corpus: CorpusSource {
            path: None,
            synthetic: Some(SyntheticConfig {
                target_bytes: 2_000_000,
                ..synthetic_section()
            }),
        },
        algorithms: vec![
            Hyperparams::for_algorithm(Algorithm::Nb),
            Hyperparams::for_algorithm(Algorithm::Lr),
        ],
        sizes_mb: vec![1.0, 2.0],
        eval: EvalConfig { holdout: Some(0.2), kfold: Some(3) },
        ..base_config()
    };
    let csv_a = render_csv(&run_experiment(&cfg).unwrap());
    let csv_b = render_csv(&run_experiment(&cfg).unwrap());
    let csv_identical = strip_timing_columns(&csv_a) == strip_timing_columns(&csv_b);

    let spec = synthetic_section().to_spec(42);
    let corpus_identical =
        generate_synthetic(&spec).unwrap().to_tsv() == generate_synthetic(&spec).unwrap().to_tsv();

    report(
        7,
        csv_identical && corpus_identical,
        &format!("csv identical minus timing columns: {csv_identical}, corpora byte-identical: {corpus_identical}"),
    );
}

// ------------------------------------------------------------- criterion 8

struct CsvRow {
    algorithm: Algorithm,
    task: String,
    size_mb: f64,
    eval_method: String,
    seed: u64,
    train_s: f64,
    predict_s: f64,
    precision_macro: f64,
    recall_macro: f64,
    f1_macro: f64,
    f1_micro: f64,
    accuracy: f64,
}

fn parse_csv(csv: &str) -> Vec<CsvRow> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            CsvRow {
                algorithm: Algorithm::parse(f[col("algorithm")]).unwrap(),
                task: f[col("task")].to_string(),
                size_mb: f[col("size_mb")].parse().unwrap(),
                eval_method: f[col("eval_method")].to_string(),
                seed: f[col("seed")].parse().unwrap(),
                train_s: f[col("train_s")].parse().unwrap(),
                predict_s: f[col("predict_s")].parse().unwrap(),
                precision_macro: f[col("precision_macro")].parse().unwrap(),
                recall_macro: f[col("recall_macro")].parse().unwrap(),
                f1_macro: f[col("f1_macro")].parse().unwrap(),
                f1_micro: f[col("f1_micro")].parse().unwrap(),
                accuracy: f[col("accuracy")].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn criterion_8_report_integrity() {
    use tradebench::harness::fmt_float;

    let run = big_run();
    let csv = std::fs::read_to_string(run.out_dir.join("runs.csv")).unwrap();
    let rows = parse_csv(&csv);
    let recs = records(&run.holdout);
    assert_eq!(rows.len(), recs.len());

    // non-timing fields round-trip exactly (floats at the CSV's own precision)
    let mut fields_ok = true;
    for (row, rec) in rows.iter().zip(&recs) {
        fields_ok &= row.algorithm == rec.algorithm
            && row.task == rec.task
            && fmt_float(row.size_mb) == fmt_float(rec.size_mb)
            && row.eval_method == rec.eval_method.label()
            && row.seed == rec.seed
            && fmt_float(row.precision_macro) == fmt_float(rec.quality.macro_precision)
            && fmt_float(row.recall_macro) == fmt_float(rec.quality.macro_recall)
            && fmt_float(row.f1_macro) == fmt_float(rec.quality.macro_f1)
            && fmt_float(row.f1_micro) == fmt_float(rec.quality.micro_f1)
            && fmt_float(row.accuracy) == fmt_float(rec.quality.accuracy);
    }

    // frontier memberships in result.json match recomputation from the CSV
    let json: ExperimentResult =
        serde_json::from_str(&std::fs::read_to_string(run.out_dir.join("result.json")).unwrap())
            .unwrap();
    let mut frontiers_ok = true;
    for fr in &json.frontiers {
        let points: Vec<PerformancePoint> = rows
            .iter()
            .filter(|r| {
                fmt_float(r.size_mb) == fmt_float(fr.size_mb)
                    && r.eval_method == fr.eval_method.label()
            })
            .map(|r| {
                let time = match json.config.time_basis {
                    TimeBasis::Train => r.train_s,
                    TimeBasis::TrainPlusPredict => r.train_s + r.predict_s,
                };
                PerformancePoint::new(r.algorithm, r.f1_macro, fr.size_mb, time).unwrap()
            })
            .collect();
        let recomputed = frontier(&points).unwrap();
        let ids = |v: &[PerformancePoint]| v.iter().map(|p| p.algorithm).collect::<Vec<_>>();
        frontiers_ok &= ids(&recomputed.pareto) == ids(&fr.frontier.pareto)
            && ids(&recomputed.hull) == ids(&fr.frontier.hull);
    }

    report(
        8,
        fields_ok && frontiers_ok,
        &format!(
            "{} rows round-tripped: {fields_ok}; {} frontier memberships agree: {frontiers_ok}",
            rows.len(),
            json.frontiers.len()
        ),
    );
}
