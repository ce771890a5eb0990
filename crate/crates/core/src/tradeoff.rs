//! Quality/time trade-off analysis: the performance measure, dominance
//! frontiers (Pareto set and convex hull), performance-vs-size curves and
//! the analytical break-even crossover solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::RunRecord;
use crate::learners::Algorithm;

/// Which measured times feed the performance formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeBasis {
    #[default]
    Train,
    TrainPlusPredict,
}

impl TimeBasis {
    pub fn seconds(&self, rec: &RunRecord) -> f64 {
        match self {
            TimeBasis::Train => rec.train_s,
            TimeBasis::TrainPlusPredict => rec.train_s + rec.predict_s,
        }
    }

    pub fn parse(s: &str) -> Result<TimeBasis> {
        match s {
            "train" => Ok(TimeBasis::Train),
            "train_plus_predict" => Ok(TimeBasis::TrainPlusPredict),
            other => Err(Error::InvalidConfig(format!("unknown time basis {other:?}"))),
        }
    }
}

/// performance = quality * size / time. Units: MB/s scaled by quality.
pub fn performance(quality: f64, size_mb: f64, time_s: f64) -> Result<f64> {
    if time_s <= 0.0 {
        return Err(Error::NonPositiveTime(time_s));
    }
    Ok(quality * size_mb / time_s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformancePoint {
    pub algorithm: Algorithm,
    pub quality: f64,
    pub size_mb: f64,
    pub time_s: f64,
    pub performance: f64,
}

impl PerformancePoint {
    pub fn new(algorithm: Algorithm, quality: f64, size_mb: f64, time_s: f64) -> Result<Self> {
        Ok(PerformancePoint {
            algorithm,
            quality,
            size_mb,
            time_s,
            performance: performance(quality, size_mb, time_s)?,
        })
    }

    pub fn from_record(rec: &RunRecord, basis: TimeBasis) -> Result<Self> {
        PerformancePoint::new(rec.algorithm, rec.quality.macro_f1, rec.size_mb, basis.seconds(rec))
    }
}

/// Non-dominated points and the upper-left convex hull at one fixed size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub points: Vec<PerformancePoint>,
    pub pareto: Vec<PerformancePoint>,
    pub hull: Vec<PerformancePoint>,
}

fn dominates(p: &PerformancePoint, q: &PerformancePoint) -> bool {
    p.quality >= q.quality
        && p.time_s <= q.time_s
        && (p.quality > q.quality || p.time_s < q.time_s)
}

/// Pareto set by pairwise dominance, then the convex hull of the Pareto set
/// in the (time, quality) plane, keeping the upper-left chain.
pub fn frontier(points: &[PerformancePoint]) -> Result<Frontier> {
    if points.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    let size = points[0].size_mb;
    for p in points {
        if p.size_mb != size {
            return Err(Error::MixedFrontierSizes { a: size, b: p.size_mb });
        }
    }
    let mut pareto: Vec<PerformancePoint> = points
        .iter()
        .filter(|p| !points.iter().any(|q| dominates(q, p)))
        .cloned()
        .collect();
    pareto.sort_by(|a, b| {
        a.time_s.partial_cmp(&b.time_s).unwrap().then_with(|| a.algorithm.cmp(&b.algorithm))
    });
    // monotone chain over the pareto points; after the dominance filter the
    // points are strictly increasing in both time and quality, so a single
    // upper-hull pass suffices
    let mut hull: Vec<PerformancePoint> = Vec::new();
    for p in &pareto {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (b.time_s - a.time_s) * (p.quality - a.quality)
                - (b.quality - a.quality) * (p.time_s - a.time_s);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    Ok(Frontier { points: points.to_vec(), pareto, hull })
}

/// Performance values of one algorithm across the size schedule.
pub fn performance_curve(
    runs: &[RunRecord],
    basis: TimeBasis,
) -> Result<Vec<(f64, f64)>> {
    assert!(!runs.is_empty(), "performance_curve needs at least one run");
    let mut curve: Vec<(f64, f64)> = runs
        .iter()
        .map(|r| Ok((r.size_mb, PerformancePoint::from_record(r, basis)?.performance)))
        .collect::<Result<_>>()?;
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in curve.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateCurveSize(w[0].0));
        }
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostForm {
    Linear,
    Linearithmic,
    Quadratic,
}

impl CostForm {
    /// asymptotic growth rank, for ordering cost models
    fn rank(&self) -> u8 {
        match self {
            CostForm::Linear => 0,
            CostForm::Linearithmic => 1,
            CostForm::Quadratic => 2,
        }
    }
}

/// Training-cost model T(n) with a quality rate: the algorithm finds
/// (alpha + epsilon) * n true entities after processing n units of data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub form: CostForm,
    pub c: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl CostModel {
    pub fn new(form: CostForm, c: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidCostModel("c must be positive".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidCostModel("alpha must be positive".into()));
        }
        if epsilon < 0.0 || alpha + epsilon > 1.0 {
            return Err(Error::InvalidCostModel("need 0 <= epsilon and alpha + epsilon <= 1".into()));
        }
        Ok(CostModel { form, c, alpha, epsilon })
    }

    pub fn rate(&self) -> f64 {
        self.alpha + self.epsilon
    }

    /// Time to process n units. Defined for n >= 1; linearithmic cost uses
    /// log2 and is 0 at n = 1.
    pub fn cost(&self, n: f64) -> f64 {
        match self.form {
            CostForm::Linear => self.c * n,
            CostForm::Linearithmic => self.c * n * n.log2(),
            CostForm::Quadratic => self.c * n * n,
        }
    }

    /// Units processed within time budget t, by bisection on the monotone
    /// cost function over n >= 2.
    pub fn invert(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        let lo0 = 2.0f64;
        if self.cost(lo0) >= t {
            return lo0;
        }
        let mut hi = 4.0f64;
        while self.cost(hi) < t {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cost(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub const BREAK_EVEN_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverResult {
    pub exists: bool,
    pub time_budget: Option<f64>,
    pub n_a: Option<f64>,
    pub n_b: Option<f64>,
    pub reason: Option<String>,
}

impl CrossoverResult {
    fn absent(reason: &str) -> Self {
        CrossoverResult {
            exists: false,
            time_budget: None,
            n_a: None,
            n_b: None,
            reason: Some(reason.to_string()),
        }
    }
}

/// Find the time budget at which the faster algorithm's entity count
/// catches up with the slower, higher-quality one.
///
/// A finite crossover requires that one model has both a strictly higher
/// quality rate and an asymptotically higher cost; the solver bisects on the
/// time budget T, inverting both (monotone) cost models numerically.
pub fn break_even(a: &CostModel, b: &CostModel) -> Result<CrossoverResult> {
    if a == b {
        return Ok(CrossoverResult::absent("equal everywhere"));
    }
    if a.rate() == b.rate() {
        return Ok(CrossoverResult::absent(
            "equal quality rates: the cheaper algorithm wins at every budget",
        ));
    }
    let (fast, slow) = if b.rate() > a.rate() { (a, b) } else { (b, a) };
    if slow.form.rank() <= fast.form.rank() {
        return Ok(CrossoverResult::absent(
            "the higher-quality model must have asymptotically higher cost for a crossover",
        ));
    }

    // entity difference (fast minus slow) as a function of the time budget
    let diff = |t: f64| fast.rate() * fast.invert(t) - slow.rate() * slow.invert(t);

    // bracket: for small T the slower-but-better algorithm is ahead (or the
    // crossover sits at the domain edge); expand until the sign flips
    let mut lo = f64::max(fast.cost(2.0), slow.cost(2.0)).max(1e-12);
    if diff(lo) > 0.0 {
        return Ok(CrossoverResult::absent(
            "the faster algorithm is already ahead at the smallest budget",
        ));
    }
    let mut hi = lo * 2.0;
    let mut bracketed = false;
    for _ in 0..200 {
        if diff(hi) > 0.0 {
            bracketed = true;
            break;
        }
        hi *= 2.0;
    }
    if !bracketed {
        return Ok(CrossoverResult::absent("no crossover found within the search range"));
    }
    while (hi - lo) / hi > BREAK_EVEN_REL_TOL / 4.0 {
        let mid = 0.5 * (lo + hi);
        if diff(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let (n_fast, n_slow) = (fast.invert(t), slow.invert(t));
    let (n_a, n_b) = if std::ptr::eq(fast, a) { (n_fast, n_slow) } else { (n_slow, n_fast) };
    Ok(CrossoverResult {
        exists: true,
        time_budget: Some(t),
        n_a: Some(n_a),
        n_b: Some(n_b),
        reason: None,
    })
}

/// Closed form for the linear-vs-linearithmic case:
/// log2(n_slow) = (c_fast / c_slow) * (1 + epsilon / alpha).
pub fn break_even_closed_form(fast: &CostModel, slow: &CostModel) -> Option<(f64, f64, f64)> {
    if fast.form != CostForm::Linear || slow.form != CostForm::Linearithmic {
        return None;
    }
    if slow.rate() <= fast.rate() {
        return None;
    }
    let eps = slow.rate() - fast.rate();
    let log2_n_slow = (fast.c / slow.c) * (1.0 + eps / fast.rate());
    let n_slow = 2f64.powf(log2_n_slow);
    let t = slow.cost(n_slow);
    let n_fast = t / fast.c;
    Some((t, n_fast, n_slow))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(algorithm: Algorithm, time_s: f64, quality: f64) -> PerformancePoint {
        PerformancePoint::new(algorithm, quality, 10.0, time_s).unwrap()
    }

    #[test]
    fn performance_examples() {
        assert_eq!(performance(1.0, 100.0, 100.0).unwrap(), 1.0);
        assert_eq!(performance(0.0, 5.0, 3.0).unwrap(), 0.0);
        assert_eq!(performance(0.8, 500.0, 200.0).unwrap(), 2.0);
        assert!(matches!(performance(0.5, 1.0, 0.0), Err(Error::NonPositiveTime(_))));
    }

    #[test]
    fn frontier_single_point() {
        let p = pt(Algorithm::Nb, 1.0, 0.5);
        let f = frontier(&[p.clone()]).unwrap();
        assert_eq!(f.pareto, vec![p.clone()]);
        assert_eq!(f.hull, vec![p]);
    }

    #[test]
    fn frontier_dominated_point_dropped() {
        let pts =
            [pt(Algorithm::Nb, 1.0, 0.5), pt(Algorithm::Lr, 2.0, 0.6), pt(Algorithm::Svm, 3.0, 0.55)];
        let f = frontier(&pts).unwrap();
        let algos: Vec<_> = f.pareto.iter().map(|p| p.algorithm).collect();
        assert_eq!(algos, [Algorithm::Nb, Algorithm::Lr]);
        let hull_algos: Vec<_> = f.hull.iter().map(|p| p.algorithm).collect();
        assert_eq!(hull_algos, [Algorithm::Nb, Algorithm::Lr]);
    }

    #[test]
    fn frontier_point_below_chord_off_hull() {
        let pts =
            [pt(Algorithm::Nb, 1.0, 0.5), pt(Algorithm::Lr, 2.0, 0.55), pt(Algorithm::Svm, 3.0, 0.9)];
        let f = frontier(&pts).unwrap();
        assert_eq!(f.pareto.len(), 3);
        let hull_algos: Vec<_> = f.hull.iter().map(|p| p.algorithm).collect();
        assert_eq!(hull_algos, [Algorithm::Nb, Algorithm::Svm]);
    }

    #[test]
    fn frontier_mixed_sizes_rejected() {
        let a = PerformancePoint::new(Algorithm::Nb, 0.5, 10.0, 1.0).unwrap();
        let b = PerformancePoint::new(Algorithm::Lr, 0.6, 20.0, 1.0).unwrap();
        assert!(matches!(frontier(&[a, b]), Err(Error::MixedFrontierSizes { .. })));
    }

    #[test]
    fn hull_vertices_increase_in_quality() {
        let pts = [
            pt(Algorithm::Nb, 1.0, 0.4),
            pt(Algorithm::Lr, 1.5, 0.8),
            pt(Algorithm::Svm, 2.0, 0.85),
            pt(Algorithm::Knn, 4.0, 0.95),
        ];
        let f = frontier(&pts).unwrap();
        for w in f.hull.windows(2) {
            assert!(w[0].time_s < w[1].time_s);
            assert!(w[0].quality < w[1].quality);
        }
    }

    fn rec(algorithm: Algorithm, size_mb: f64, f1: f64, train_s: f64) -> RunRecord {
        use crate::eval::{EvalMethod, QualityReport};
        RunRecord {
            algorithm,
            task: "t".into(),
            size_mb,
            eval_method: EvalMethod::holdout(0.2),
            seed: 0,
            featurize_s: 0.0,
            train_s,
            predict_s: 1.0,
            quality: QualityReport {
                per_class: vec![],
                macro_precision: f1,
                macro_recall: f1,
                macro_f1: f1,
                micro_f1: f1,
                accuracy: f1,
            },
            performance: None,
        }
    }

    #[test]
    fn curve_arithmetic_oracle() {
        let runs =
            [rec(Algorithm::Nb, 10.0, 0.5, 5.0), rec(Algorithm::Nb, 100.0, 0.6, 50.0)];
        let curve = performance_curve(&runs, TimeBasis::Train).unwrap();
        assert_eq!(curve, vec![(10.0, 1.0), (100.0, 1.2)]);
    }

    #[test]
    fn curve_flat_for_linear_time_constant_quality() {
        let runs: Vec<RunRecord> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&s| rec(Algorithm::Nb, s, 0.8, 2.0 * s))
            .collect();
        let curve = performance_curve(&runs, TimeBasis::Train).unwrap();
        for (_, p) in &curve {
            assert!((p - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_decreasing_for_linearithmic_time() {
        let runs: Vec<RunRecord> = [16.0, 64.0, 256.0]
            .iter()
            .map(|&s| rec(Algorithm::Knn, s, 0.8, 2.0 * s * s.log2()))
            .collect();
        let curve = performance_curve(&runs, TimeBasis::Train).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
    }

    #[test]
    fn curve_duplicate_sizes_rejected() {
        let runs = [rec(Algorithm::Nb, 10.0, 0.5, 5.0), rec(Algorithm::Nb, 10.0, 0.6, 5.0)];
        assert!(matches!(
            performance_curve(&runs, TimeBasis::Train),
            Err(Error::DuplicateCurveSize(_))
        ));
    }

    fn model(form: CostForm, c: f64, alpha: f64, epsilon: f64) -> CostModel {
        CostModel::new(form, c, alpha, epsilon).unwrap()
    }

    #[test]
    fn break_even_reference_case() {
        // A: rate 0.1, 12n; B: rate 0.15, 2n log2 n -> n_B = 512, n_A = 768,
        // T = 9216 (closed form: log2 n_B = (12/2)(1 + 0.5) = 9)
        let a = model(CostForm::Linear, 12.0, 0.1, 0.0);
        let b = model(CostForm::Linearithmic, 2.0, 0.1, 0.05);
        let r = break_even(&a, &b).unwrap();
        assert!(r.exists);
        let t = r.time_budget.unwrap();
        assert!((t - 9216.0).abs() / 9216.0 < BREAK_EVEN_REL_TOL);
        assert!((r.n_a.unwrap() - 768.0).abs() / 768.0 < BREAK_EVEN_REL_TOL);
        assert!((r.n_b.unwrap() - 512.0).abs() / 512.0 < BREAK_EVEN_REL_TOL);
        // closed form agrees
        let (tc, na, nb) = break_even_closed_form(&a, &b).unwrap();
        assert!((tc - t).abs() / t < BREAK_EVEN_REL_TOL);
        assert!((na - r.n_a.unwrap()).abs() / na < BREAK_EVEN_REL_TOL);
        assert!((nb - r.n_b.unwrap()).abs() / nb < BREAK_EVEN_REL_TOL);
    }

    #[test]
    fn break_even_zero_epsilon_cost_gap() {
        // same rates -> no finite crossover: the cheap one wins everywhere
        let a = model(CostForm::Linear, 12.0, 0.1, 0.0);
        let b = model(CostForm::Linearithmic, 2.0, 0.1, 0.0);
        let r = break_even(&a, &b).unwrap();
        assert!(!r.exists);
        // the closed form with epsilon = 0 gives log2 n_B = c_A/c_B = 6
        let b_eps = model(CostForm::Linearithmic, 2.0, 0.05, 0.05);
        let a_eps = model(CostForm::Linear, 12.0, 0.1, 0.0);
        // rates equal (0.1 both): equal entity counts at n_B = 64
        assert_eq!(a_eps.rate(), b_eps.rate());
        let log2_nb = (a_eps.c / b_eps.c) * 1.0;
        assert_eq!(2f64.powf(log2_nb), 64.0);
        assert!(!break_even(&a_eps, &b_eps).unwrap().exists);
    }

    #[test]
    fn break_even_identical_models() {
        let a = model(CostForm::Linear, 1.0, 0.2, 0.0);
        let r = break_even(&a, &a).unwrap();
        assert!(!r.exists);
        assert_eq!(r.reason.as_deref(), Some("equal everywhere"));
    }

    #[test]
    fn break_even_self_consistency() {
        let a = model(CostForm::Linear, 5.0, 0.2, 0.0);
        let b = model(CostForm::Quadratic, 0.01, 0.2, 0.1);
        let r = break_even(&a, &b).unwrap();
        assert!(r.exists);
        let t = r.time_budget.unwrap();
        let ea = a.rate() * r.n_a.unwrap();
        let eb = b.rate() * r.n_b.unwrap();
        assert!((ea - eb).abs() / ea.max(eb) < 1e-7, "entity counts {ea} vs {eb}");
        assert!((a.cost(r.n_a.unwrap()) - t).abs() / t < 1e-7);
        assert!((b.cost(r.n_b.unwrap()) - t).abs() / t < 1e-7);
    }

    #[test]
    fn invalid_cost_models_rejected() {
        assert!(CostModel::new(CostForm::Linear, 0.0, 0.1, 0.0).is_err());
        assert!(CostModel::new(CostForm::Linear, 1.0, 0.0, 0.0).is_err());
        assert!(CostModel::new(CostForm::Linear, 1.0, 0.9, 0.2).is_err());
    }

    #[test]
    fn scale_equivariance() {
        let pts = [
            pt(Algorithm::Nb, 1.0, 0.5),
            pt(Algorithm::Lr, 2.0, 0.55),
            pt(Algorithm::Svm, 3.0, 0.9),
        ];
        let f = frontier(&pts).unwrap();
        let s = 7.5;
        let scaled: Vec<PerformancePoint> = pts
            .iter()
            .map(|p| PerformancePoint::new(p.algorithm, p.quality, p.size_mb, p.time_s * s).unwrap())
            .collect();
        let fs = frontier(&scaled).unwrap();
        for (orig, sc) in pts.iter().zip(&scaled) {
            assert!((sc.performance - orig.performance / s).abs() < 1e-12);
        }
        let ids = |v: &[PerformancePoint]| v.iter().map(|p| p.algorithm).collect::<Vec<_>>();
        assert_eq!(ids(&f.pareto), ids(&fs.pareto));
        assert_eq!(ids(&f.hull), ids(&fs.hull));
    }
}
