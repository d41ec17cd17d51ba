//! Exit criteria. Each test prints one PASS/FAIL line per check and fails
//! if any check fails. Run with `--nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{brute_force_visibility, edge_set, naive_q_components, random_graph};
use tsnet_core::pipeline::{analyze_segments, analyze_series, PipelineOptions};
use tsnet_core::q_analysis::q_components;
use tsnet_core::report::{AnalysisReport, ComparisonTable, InputDescriptor};
use tsnet_core::series::{logistic_series, segment_series, LogisticParams, SegmentationPlan};
use tsnet_core::{
    analyze, brute_force_cliques, build_visibility_graph, maximal_cliques, Method, TimeSeries,
};

const PERIOD_16: f64 = 3.566;
const EDGE_OF_CHAOS: f64 = 3.56995;
const LENGTH: usize = 10_000;

struct Criterion {
    id: u32,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Self {
            id,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name} ({detail})", self.id);
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "criterion {} failed: {:?}",
            self.id,
            self.failures
        );
    }
}

fn within_rel(value: usize, target: f64, rel: f64) -> bool {
    (value as f64 - target).abs() <= rel * target
}

fn run(mu: f64, x0: f64) -> AnalysisReport {
    let params = LogisticParams {
        mu,
        x0,
        n: LENGTH,
        transient: 1000,
    };
    let ts = logistic_series(&params).unwrap();
    let mut input = InputDescriptor::for_series("logistic", &ts);
    input.parameters = Some(params);
    analyze_series(&ts, input, &PipelineOptions::default())
        .unwrap()
        .report
}

#[test]
fn criterion_1_period_sixteen_reproduction() {
    let mut c = Criterion::new(1);
    let start = Instant::now();
    let r = run(PERIOD_16, LogisticParams::DEFAULT_X0);
    let elapsed = start.elapsed();
    let v = &r.vectors;

    c.check(
        "levels are exactly 0..=2",
        r.q_max == 2,
        format!("q_max = {}", r.q_max),
    );
    c.check("Q[0] = 1", v.q[0] == 1, format!("{:?}", v.q));
    c.check("f[0] = 0", v.f[0] == 0, format!("{:?}", v.f));
    c.check("Qhat[2] = 0", v.qhat[2] == 0.0, format!("{:?}", v.qhat));
    c.check(
        "simplex total within 2% of 9372",
        within_rel(r.simplices, 9372.0, 0.02),
        format!("{}", r.simplices),
    );
    c.check(
        "Q[2] within 2% of 9371",
        within_rel(v.q[2], 9371.0, 0.02),
        format!("{}", v.q[2]),
    );
    c.check("S(1) = 1", r.entropy[1] == 1.0, format!("{}", r.entropy[1]));
    c.check(
        "S(2) within 0.005 of 0.96864",
        (r.entropy[2] - 0.96864).abs() <= 0.005,
        format!("{}", r.entropy[2]),
    );
    c.check(
        "max dim in [7, 9]",
        (7..=9).contains(&r.max_dim),
        format!("{}", r.max_dim),
    );
    c.check(
        "end-to-end under 60 s",
        elapsed < Duration::from_secs(60),
        format!("{elapsed:?}"),
    );
    c.finish();
}

#[test]
fn criterion_2_edge_of_chaos_reproduction() {
    let mut c = Criterion::new(2);
    let r = run(EDGE_OF_CHAOS, LogisticParams::DEFAULT_X0);
    c.check(
        "simplex total within 2% of 9981",
        within_rel(r.simplices, 9981.0, 0.02),
        format!("{}", r.simplices),
    );
    c.check(
        "Q[1] <= 40",
        r.vectors.q[1] <= 40,
        format!("{}", r.vectors.q[1]),
    );
    c.check(
        "S(2) within 0.005 of 0.96210",
        (r.entropy[2] - 0.96210).abs() <= 0.005,
        format!("{}", r.entropy[2]),
    );
    c.check(
        "max dim in [19, 27]",
        (19..=27).contains(&r.max_dim),
        format!("{}", r.max_dim),
    );
    c.finish();
}

#[test]
fn criterion_3_regime_ordering() {
    let mut c = Criterion::new(3);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let starts: Vec<f64> = (0..5).map(|_| rng.gen_range(0.05..0.95)).collect();
    let periodic: Vec<AnalysisReport> = starts.iter().map(|&x0| run(PERIOD_16, x0)).collect();
    let chaotic: Vec<AnalysisReport> = starts.iter().map(|&x0| run(EDGE_OF_CHAOS, x0)).collect();

    // Every chaotic run against every periodic run.
    let max_p = |f: &dyn Fn(&AnalysisReport) -> f64| {
        periodic.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    };
    let min_p =
        |f: &dyn Fn(&AnalysisReport) -> f64| periodic.iter().map(f).fold(f64::INFINITY, f64::min);
    let max_c = |f: &dyn Fn(&AnalysisReport) -> f64| {
        chaotic.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    };
    let min_c =
        |f: &dyn Fn(&AnalysisReport) -> f64| chaotic.iter().map(f).fold(f64::INFINITY, f64::min);

    let max_dim = |r: &AnalysisReport| r.max_dim as f64;
    let s2 = |r: &AnalysisReport| r.entropy[2];
    let f2 = |r: &AnalysisReport| r.vectors.f[2] as f64;
    let q1 = |r: &AnalysisReport| r.vectors.q[1] as f64;

    c.check(
        "max dim (chaos) > 2 x max dim (period 16)",
        min_c(&max_dim) > 2.0 * max_p(&max_dim),
        format!(
            "chaos min {} vs periodic max {}",
            min_c(&max_dim),
            max_p(&max_dim)
        ),
    );
    c.check(
        "S(2) (chaos) < S(2) (period 16)",
        max_c(&s2) < min_p(&s2),
        format!("chaos max {} vs periodic min {}", max_c(&s2), min_p(&s2)),
    );
    c.check(
        "f[2] (chaos) > f[2] (period 16)",
        min_c(&f2) > max_p(&f2),
        format!("chaos min {} vs periodic max {}", min_c(&f2), max_p(&f2)),
    );
    c.check(
        "Q[1] (chaos) < Q[1] (period 16)",
        max_c(&q1) < min_p(&q1),
        format!("chaos max {} vs periodic min {}", max_c(&q1), min_p(&q1)),
    );
    c.check(
        "five initial conditions each",
        starts.len() >= 5,
        format!("{starts:?}"),
    );
    c.finish();
}

#[test]
fn criterion_4_oracle_equivalence() {
    let mut c = Criterion::new(4);
    let mut rng = StdRng::seed_from_u64(4);

    let graphs = 600;
    let (mut clique_mismatch, mut component_mismatch) = (0, 0);
    for k in 0..graphs {
        let n = 1 + k % 12;
        let density = 0.1 + 0.8 * (k as f64 / (graphs - 1) as f64);
        let g = random_graph(&mut rng, n, density);
        let fast = maximal_cliques(&g);
        if fast != brute_force_cliques(&g).unwrap() {
            clique_mismatch += 1;
        }
        for q in 0..=fast.q_max().unwrap() {
            if q_components(&fast, q).unwrap().count != naive_q_components(fast.simplices(), q) {
                component_mismatch += 1;
            }
        }
    }
    c.check(
        "maximal cliques = subset oracle",
        clique_mismatch == 0,
        format!("{clique_mismatch} discrepancies over {graphs} graphs, n <= 12, density 0.1..0.9"),
    );
    c.check(
        "q-components = BFS oracle",
        component_mismatch == 0,
        format!("{component_mismatch} discrepancies over {graphs} graphs"),
    );

    let fixtures = 250;
    let mut visibility_mismatch = 0;
    for _ in 0..fixtures {
        let len = rng.gen_range(2..=60);
        let y: Vec<f64> = if rng.gen_bool(0.5) {
            (0..len).map(|_| rng.gen_range(-10.0..10.0)).collect()
        } else {
            (0..len).map(|_| f64::from(rng.gen_range(-5..=5))).collect()
        };
        let expected = brute_force_visibility(&y);
        let ts = TimeSeries::new(y).unwrap();
        for method in [Method::Quadratic, Method::DivideAndConquer] {
            if edge_set(&build_visibility_graph(&ts, method).unwrap()) != expected {
                visibility_mismatch += 1;
            }
        }
    }
    c.check(
        "visibility builder = triple-loop oracle",
        visibility_mismatch == 0,
        format!("{visibility_mismatch} discrepancies over {fixtures} series, length <= 60"),
    );
    c.finish();
}

#[test]
fn criterion_5_identity_suite() {
    let mut c = Criterion::new(5);
    let mut rng = StdRng::seed_from_u64(5);
    let mut runs = 0;
    let mut failures = Vec::new();

    let mut series: Vec<Vec<f64>> = vec![
        logistic_series(&LogisticParams::new(PERIOD_16, LENGTH))
            .unwrap()
            .values()
            .to_vec(),
        logistic_series(&LogisticParams::new(EDGE_OF_CHAOS, LENGTH))
            .unwrap()
            .values()
            .to_vec(),
    ];
    for _ in 0..100 {
        let len = rng.gen_range(2..300);
        series.push((0..len).map(|_| rng.gen_range(0.0..1.0)).collect());
    }
    for y in series {
        let ts = TimeSeries::new(y).unwrap();
        let g = build_visibility_graph(&ts, Method::Quadratic).unwrap();
        let a = analyze(&maximal_cliques(&g)).unwrap();
        runs += 1;
        if let Err(e) = a.check_identities(Some(g.component_count())) {
            failures.push(e.to_string());
        }
        if a.vectors.q[0] != 1 {
            failures.push(format!("visibility graph with Q[0] = {}", a.vectors.q[0]));
        }
    }
    for k in 0..300 {
        let density = rng.gen_range(0.05..0.95);
        let g = random_graph(&mut rng, 1 + k % 15, density);
        let a = analyze(&maximal_cliques(&g)).unwrap();
        runs += 1;
        if let Err(e) = a.check_identities(Some(g.component_count())) {
            failures.push(e.to_string());
        }
    }
    c.check(
        "Ns suffix sums, Q/f/Qhat at q_max, handshake, Q[0] = components, S in [0,1]",
        failures.is_empty(),
        format!("{runs} analyses, failures: {failures:?}"),
    );
    c.finish();
}

#[test]
fn criterion_6_affine_invariance() {
    let mut c = Criterion::new(6);
    let mut rng = StdRng::seed_from_u64(6);
    let fixtures = 120;
    let mut mismatches = 0;
    for _ in 0..fixtures {
        let len = rng.gen_range(2..150);
        let y: Vec<i64> = (0..len).map(|_| rng.gen_range(-100..=100)).collect();
        let a = rng.gen_range(1..=25i64);
        let b = rng.gen_range(-1000..=1000i64);
        let base = TimeSeries::new(y.iter().map(|&v| v as f64).collect()).unwrap();
        let moved = TimeSeries::new(y.iter().map(|&v| (a * v + b) as f64).collect()).unwrap();
        for method in [Method::Quadratic, Method::DivideAndConquer] {
            let g1 = build_visibility_graph(&base, method).unwrap();
            let g2 = build_visibility_graph(&moved, method).unwrap();
            if edge_set(&g1) != edge_set(&g2) {
                mismatches += 1;
            }
        }
    }
    c.check(
        "edge sets of y and a*y + b identical",
        mismatches == 0,
        format!("{mismatches} mismatches over {fixtures} fixtures"),
    );
    c.finish();
}

#[test]
fn criterion_7_segmented_batch() {
    let mut c = Criterion::new(7);
    let start = Instant::now();
    let ts = logistic_series(&LogisticParams::new(3.9, 480)).unwrap();
    let mut labels = Vec::new();
    for _ in 0..3 {
        labels.extend(["EW", "ER", "ENW", "ER"].map(String::from));
    }
    for _ in 0..3 {
        labels.extend(["HW", "HR", "HNW", "HR"].map(String::from));
    }
    let segments = segment_series(&ts, &SegmentationPlan::new(20, labels)).unwrap();
    let reports: Vec<AnalysisReport> =
        analyze_segments(&segments, "synthetic", &Default::default())
            .into_iter()
            .collect::<Result<_, _>>()
            .unwrap();
    let named: Vec<(String, AnalysisReport)> = reports
        .iter()
        .map(|r| (r.input.label.clone().unwrap_or_default(), r.clone()))
        .collect();
    let table = ComparisonTable::from_reports(&named, 3).unwrap();
    let json: Vec<String> = reports.iter().map(AnalysisReport::to_json).collect();
    let elapsed = start.elapsed();

    c.check(
        "24 per-block reports",
        reports.len() == 24,
        format!("{}", reports.len()),
    );
    c.check(
        "each segment has 20 samples",
        reports.iter().all(|r| r.input.length == 20),
        String::new(),
    );
    let header = table.header();
    c.check(
        "table columns max_dim, S(0), S(1), S(2)",
        header[1..5] == ["max_dim", "S(0)", "S(1)", "S(2)"],
        format!("{header:?}"),
    );
    c.check(
        "one table row per segment",
        table.rows.len() == 24,
        format!("{}", table.rows.len()),
    );
    c.check(
        "reports serialise max_dim and S",
        json.iter()
            .all(|j| j.contains("\"max_dim\"") && j.contains("\"S\"")),
        String::new(),
    );
    c.check(
        "batch under 5 s",
        elapsed < Duration::from_secs(5),
        format!("{elapsed:?}"),
    );
    c.finish();
}
