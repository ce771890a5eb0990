//! Orchestration: run the algorithm x size x eval-method matrix and emit
//! CSV, JSON and SVG reports.
//!
//! Cells run strictly sequentially by default so wall-clock times are the
//! experiment's ground truth; `parallel = true` trades that fidelity for
//! throughput and stamps the CSV with a fidelity column.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::corpus::{self, mb_to_bytes, Corpus};
use crate::error::{Error, Result};
use crate::eval::{self, EvalMethod, RunRecord};
use crate::learners::{Algorithm, Hyperparams};
use crate::svg;
use crate::tradeoff::{self, Frontier, PerformancePoint, TimeBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunCell {
    Complete { record: RunRecord },
    Failed { algorithm: Algorithm, size_mb: f64, eval_method: EvalMethod, error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub size_mb: f64,
    pub eval_method: EvalMethod,
    pub frontier: Frontier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub algorithm: Algorithm,
    pub eval_method: EvalMethod,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub machine: String,
    pub runs: Vec<RunCell>,
    pub frontiers: Vec<FrontierReport>,
    pub curves: Vec<CurveReport>,
}

fn machine_description() -> String {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!("{} {}, {} logical cores", std::env::consts::OS, std::env::consts::ARCH, cores)
}

fn eval_methods(cfg: &ExperimentConfig) -> Vec<EvalMethod> {
    let mut methods = Vec::new();
    if let Some(f) = cfg.eval.holdout {
        methods.push(EvalMethod::holdout(f));
    }
    if let Some(k) = cfg.eval.kfold {
        methods.push(EvalMethod::Kfold { k });
    }
    methods
}

fn load_or_generate(cfg: &ExperimentConfig) -> Result<Corpus> {
    if let Some(path) = &cfg.corpus.path {
        corpus::load_corpus(path)
    } else {
        let spec = cfg.corpus.synthetic.as_ref().expect("validated").to_spec(cfg.seed);
        corpus::generate_synthetic(&spec)
    }
}

fn run_cell(
    prefix: &Corpus,
    h: &Hyperparams,
    method: EvalMethod,
    cfg: &ExperimentConfig,
    nominal_size_mb: f64,
) -> RunCell {
    let seed = cfg.seed.wrapping_add(h.seed);
    let task = cfg.task.as_str();
    let outcome = catch_unwind(AssertUnwindSafe(|| match method {
        EvalMethod::Holdout { .. } => eval::evaluate_holdout(
            prefix,
            h,
            method.test_fraction().unwrap(),
            &cfg.features,
            seed,
            task,
        ),
        EvalMethod::Kfold { k } => eval::evaluate_kfold(prefix, h, k, &cfg.features, seed, task),
    }));
    let outcome = match outcome {
        Ok(r) => r,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic during run".to_string());
            Err(Error::InvalidTrainingInput(msg))
        }
    };
    match outcome {
        Ok(mut record) => {
            record.size_mb = nominal_size_mb;
            let time = cfg.time_basis.seconds(&record);
            record.performance = tradeoff::performance(record.quality.macro_f1, nominal_size_mb, time).ok();
            RunCell::Complete { record }
        }
        Err(e) => RunCell::Failed {
            algorithm: h.algorithm,
            size_mb: nominal_size_mb,
            eval_method: method,
            error: e.to_string(),
        },
    }
}

/// Run the full experiment matrix.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let corpus = load_or_generate(cfg)?;
    let sizes = cfg.schedule().applicable(&corpus);
    if sizes.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no schedule entry fits the corpus ({} bytes)",
            corpus.total_bytes()
        )));
    }
    let methods = eval_methods(cfg);
    let mut runs: Vec<RunCell> = Vec::new();
    for &size_mb in &sizes {
        let prefix = corpus::take_prefix(&corpus, mb_to_bytes(size_mb));
        if cfg.parallel {
            let mut cells: Vec<Option<RunCell>> = Vec::new();
            let jobs: Vec<(&Hyperparams, EvalMethod)> = cfg
                .algorithms
                .iter()
                .flat_map(|h| methods.iter().map(move |&m| (h, m)))
                .collect();
            cells.resize_with(jobs.len(), || None);
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for (h, m) in &jobs {
                    let prefix = &prefix;
                    handles.push(scope.spawn(move || run_cell(prefix, h, *m, cfg, size_mb)));
                }
                for (slot, handle) in cells.iter_mut().zip(handles) {
                    *slot = Some(handle.join().expect("cell thread panicked"));
                }
            });
            runs.extend(cells.into_iter().map(|c| c.unwrap()));
        } else {
            for h in &cfg.algorithms {
                for &method in &methods {
                    runs.push(run_cell(&prefix, h, method, cfg, size_mb));
                }
            }
        }
    }

    let frontiers = compute_frontiers(&runs, &sizes, &methods, cfg.time_basis);
    let curves = compute_curves(&runs, cfg, &methods)?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        machine: machine_description(),
        runs,
        frontiers,
        curves,
    })
}

fn complete_records(runs: &[RunCell]) -> impl Iterator<Item = &RunRecord> {
    runs.iter().filter_map(|c| match c {
        RunCell::Complete { record } => Some(record),
        RunCell::Failed { .. } => None,
    })
}

fn compute_frontiers(
    runs: &[RunCell],
    sizes: &[f64],
    methods: &[EvalMethod],
    basis: TimeBasis,
) -> Vec<FrontierReport> {
    let mut reports = Vec::new();
    for &size_mb in sizes {
        for &method in methods {
            let points: Vec<PerformancePoint> = complete_records(runs)
                .filter(|r| r.size_mb == size_mb && r.eval_method == method)
                .filter_map(|r| PerformancePoint::from_record(r, basis).ok())
                .collect();
            if points.is_empty() {
                continue;
            }
            if let Ok(frontier) = tradeoff::frontier(&points) {
                reports.push(FrontierReport { size_mb, eval_method: method, frontier });
            }
        }
    }
    reports
}

fn compute_curves(
    runs: &[RunCell],
    cfg: &ExperimentConfig,
    methods: &[EvalMethod],
) -> Result<Vec<CurveReport>> {
    let mut curves = Vec::new();
    for h in &cfg.algorithms {
        for &method in methods {
            let records: Vec<RunRecord> = complete_records(runs)
                .filter(|r| r.algorithm == h.algorithm && r.eval_method == method)
                .cloned()
                .collect();
            if records.is_empty() {
                continue;
            }
            let points = tradeoff::performance_curve(&records, cfg.time_basis)?;
            curves.push(CurveReport { algorithm: h.algorithm, eval_method: method, points });
        }
    }
    Ok(curves)
}

/// Six-significant-digit float formatting with '.' decimal separator.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).clamp(0, 15) as usize;
    format!("{x:.decimals$}")
}

pub const CSV_HEADER: &str = "algorithm,task,size_mb,eval_method,seed,featurize_s,train_s,predict_s,precision_macro,recall_macro,f1_macro,f1_micro,accuracy,performance";

pub fn csv_row(r: &RunRecord) -> String {
    let fields = [
        r.algorithm.tag().to_string(),
        r.task.clone(),
        fmt_float(r.size_mb),
        r.eval_method.label(),
        r.seed.to_string(),
        fmt_float(r.featurize_s),
        fmt_float(r.train_s),
        fmt_float(r.predict_s),
        fmt_float(r.quality.macro_precision),
        fmt_float(r.quality.macro_recall),
        fmt_float(r.quality.macro_f1),
        fmt_float(r.quality.micro_f1),
        fmt_float(r.quality.accuracy),
        r.performance.map(fmt_float).unwrap_or_default(),
    ];
    fields.join(",")
}

pub fn render_csv(res: &ExperimentResult) -> String {
    let fidelity = res.config.parallel;
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    if fidelity {
        out.push_str(",timing_fidelity");
    }
    out.push('\n');
    for record in complete_records(&res.runs) {
        out.push_str(&csv_row(record));
        if fidelity {
            out.push_str(",parallel");
        }
        out.push('\n');
    }
    out
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn size_file_tag(size_mb: f64) -> String {
    // 1.0 -> "1", 0.5 -> "0_5"
    format!("{size_mb}").replace('.', "_")
}

/// Write runs.csv, result.json and the SVG plots into `dir`.
/// Files are written to temp names first, then renamed.
pub fn emit_reports(res: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let csv_path = dir.join("runs.csv");
    write_atomic(&csv_path, &render_csv(res))?;
    written.push(csv_path);

    let json_path = dir.join("result.json");
    let json = serde_json::to_string_pretty(res).expect("result serializes");
    write_atomic(&json_path, &json)?;
    written.push(json_path);

    let methods: Vec<EvalMethod> = {
        let mut m: Vec<EvalMethod> = Vec::new();
        for r in complete_records(&res.runs) {
            if !m.contains(&r.eval_method) {
                m.push(r.eval_method);
            }
        }
        m
    };
    let primary = methods.first().copied();

    // per-algorithm series over size, primary eval method only
    let series_for = |value: &dyn Fn(&RunRecord) -> f64| -> Vec<svg::Series> {
        res.config
            .algorithms
            .iter()
            .filter_map(|h| {
                let mut pts: Vec<(f64, f64)> = complete_records(&res.runs)
                    .filter(|r| r.algorithm == h.algorithm && Some(r.eval_method) == primary)
                    .map(|r| (r.size_mb, value(r)))
                    .collect();
                if pts.is_empty() {
                    return None;
                }
                pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                Some(svg::Series {
                    name: h.algorithm.tag().to_string(),
                    color: svg::color_of(h.algorithm),
                    points: pts,
                })
            })
            .collect()
    };

    let basis = res.config.time_basis;
    let charts: [(&str, String); 3] = [
        (
            "quality_vs_size.svg",
            svg::line_chart(
                "Quality vs. training data size",
                "size [MB]",
                "macro F1",
                &series_for(&|r| r.quality.macro_f1),
                svg::Scale::Linear,
            ),
        ),
        (
            "time_vs_size.svg",
            svg::line_chart(
                "Time vs. training data size",
                "size [MB]",
                "time [s]",
                &series_for(&|r| basis.seconds(r)),
                svg::Scale::Log10,
            ),
        ),
        (
            "performance_vs_size.svg",
            svg::line_chart(
                "Performance vs. training data size",
                "size [MB]",
                "performance [quality*MB/s]",
                &series_for(&|r| r.performance.unwrap_or(0.0)),
                svg::Scale::Linear,
            ),
        ),
    ];
    for (name, contents) in charts {
        let path = dir.join(name);
        write_atomic(&path, &contents)?;
        written.push(path);
    }

    for report in &res.frontiers {
        let name = if Some(report.eval_method) == primary {
            format!("frontier_{}.svg", size_file_tag(report.size_mb))
        } else {
            format!(
                "frontier_{}_{}.svg",
                size_file_tag(report.size_mb),
                report.eval_method.label().replace(['(', ')'], "")
            )
        };
        let title = format!("Frontier at {} MB ({})", report.size_mb, report.eval_method.label());
        let path = dir.join(name);
        write_atomic(&path, &svg::frontier_chart(&title, &report.frontier))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_float_six_significant_digits() {
        assert_eq!(fmt_float(2.0 / 3.0 * 10.0 / 5.0), "1.33333");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_float(0.0), "0.00000");
        assert_eq!(fmt_float(123456.7), "123457");
        assert_eq!(fmt_float(0.0001234567), "0.000123457");
        assert_eq!(fmt_float(1.0), "1.00000");
    }
}
