//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kneading::corpus::corpus;
use kneading::io::{load_map_spec, parse_real, ReportFile};
use kneading::mc::{cylinder_dimension, estimate_escape_rate, simulate_survival};
use kneading::poly::{product, WeightPoly};
use kneading::{analyze, analyze_validated, AnalyzeOptions, Analysis, HoleMap, PolyMatrix};

const DIM: f64 = 0.91994;
const GAMMA: f64 = 0.0877769;
const HTOP: f64 = 1.11531;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> HoleMap {
    load_map_spec(&fixture(name)).unwrap().to_hole_map().unwrap()
}

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome {
            ok,
            detail: detail.into(),
        }
    }
}

/// Collects failure messages; the criterion passes when none were recorded.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }

    fn finish(self, elapsed: Duration, limit: Duration, summary: String) -> Outcome {
        let mut fails = self.0;
        if elapsed >= limit {
            fails.push(format!("took {elapsed:.2?}, limit {limit:?}"));
        }
        if fails.is_empty() {
            Outcome::new(true, format!("{summary} ({elapsed:.2?})"))
        } else {
            Outcome::new(false, fails.join("; "))
        }
    }
}

// Weights of the Example under the naming a = |4|^-beta (laps 1 and 2),
// b = |3|^-beta, c = |2|^-beta.
const MERGE: [usize; 4] = [0, 0, 1, 2];

fn entry(token: &str) -> WeightPoly {
    let (sign, name) = match token.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, token),
    };
    match name {
        "0" => WeightPoly::zero(3),
        "1" => WeightPoly::constant(3, sign),
        "a" => WeightPoly::monomial(sign, 0, &[1, 0, 0]),
        "b" => WeightPoly::monomial(sign, 0, &[0, 1, 0]),
        "c" => WeightPoly::monomial(sign, 0, &[0, 0, 1]),
        _ => panic!("bad entry {token}"),
    }
}

fn printed(rows: &[&str]) -> PolyMatrix {
    let cells: Vec<Vec<&str>> = rows.iter().map(|r| r.split_whitespace().collect()).collect();
    let mut m = PolyMatrix::zeros(cells.len(), cells[0].len(), 3);
    for (i, row) in cells.iter().enumerate() {
        assert_eq!(row.len(), cells[0].len());
        for (j, tok) in row.iter().enumerate() {
            m.set(i, j, entry(tok));
        }
    }
    m
}

fn ints(rows: &[&str]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|r| r.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn compare(c: &mut Checks, name: &str, ours: &PolyMatrix, expected: &PolyMatrix) {
    let ours = ours.merge_weights(&MERGE, 3);
    let same_shape = ours.rows() == expected.rows() && ours.cols() == expected.cols();
    c.check(same_shape, || {
        format!("{name} is {}x{}, printed {}x{}", ours.rows(), ours.cols(), expected.rows(), expected.cols())
    });
    if same_shape {
        if let Some((i, j)) = ours.first_difference(expected) {
            c.check(false, || {
                format!("{name}[{},{}] = {} , printed {}", i + 1, j + 1, ours.get(i, j), expected.get(i, j))
            });
        }
    }
}

const Q: [&str; 8] = [
    "a a b 0 0 0 0 0",
    "a a b 0 0 0 0 0",
    "a a 0 b 0 0 0 0",
    "a a 0 b 0 0 c 0",
    "0 0 0 b 0 0 0 c",
    "0 0 0 b 0 0 0 c",
    "0 0 0 b 0 0 0 c",
    "0 0 0 0 b 0 0 c",
];

const B: [&str; 13] = [
    "-1 0 0 0 0 0 0 0",
    "1 0 0 0 0 0 0 0",
    "0 -1 0 0 0 0 0 0",
    "0 1 0 0 0 0 0 0",
    "0 0 -1 0 0 0 0 0",
    "0 0 1 -1 0 0 0 0",
    "0 0 0 1 -1 0 0 0",
    "0 0 0 0 1 0 0 0",
    "0 0 0 0 0 -1 0 0",
    "0 0 0 0 0 1 0 0",
    "0 0 0 0 0 0 -1 0",
    "0 0 0 0 0 0 1 -1",
    "0 0 0 0 0 0 0 1",
];

const V: [&str; 13] = [
    "a 0 0 -a b 0 0 0 0 0 0 0 0",
    "0 a 0 a -b 0 0 0 0 0 0 0 0",
    "0 -a 0 -a b 0 0 0 0 0 0 0 0",
    "0 a -a 0 -b 0 0 0 0 0 0 0 0",
    "0 -a a 0 b b 0 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 c 0 0",
    "0 a -a 0 0 0 0 0 0 0 0 c 0",
    "0 0 0 0 0 0 b b 0 0 -c -c 0",
    "0 0 0 0 0 0 -b -b 0 0 c c 0",
    "0 0 0 0 0 0 b b 0 0 -c -c 0",
    "0 0 0 0 0 0 -b -b 0 0 c c 0",
    "0 0 0 0 0 0 b 0 0 0 0 0 0",
    "0 0 0 0 0 0 0 b 0 0 0 0 c",
];

const U: [&str; 4] = [
    "1 1 0 0 0 0 0 0 0 0 0 0 0",
    "0 0 1 1 0 0 0 0 0 0 0 0 0",
    "0 0 0 0 1 1 1 1 0 0 0 0 0",
    "0 0 0 0 0 0 0 0 0 0 1 1 1",
];

const K: [&str; 4] = ["a 0 0 0", "0 -a 0 0", "0 0 b 0", "0 0 0 c"];

// image of 1..=13 under the printed permutation
const PI: [usize; 13] = [6, 1, 4, 5, 7, 11, 2, 8, 12, 13, 10, 3, 9];

const THETA: [&str; 13] = [
    "a 0 0 0 a 0 -b 0 0 0 0 0 0",
    "a 0 c -a 0 0 0 0 0 0 0 0 0",
    "0 b 0 0 0 0 0 0 0 0 0 0 0",
    "-a 0 0 0 -a 0 b 0 0 0 0 0 0",
    "a 0 0 -a 0 0 -b 0 0 0 0 0 0",
    "0 0 0 0 -a a b 0 0 0 0 0 0",
    "-a 0 0 a 0 0 b 0 0 0 b 0 0",
    "0 b -c 0 0 0 0 b 0 -c 0 0 0",
    "0 0 0 0 0 0 0 b c 0 0 0 0",
    "0 -b c 0 0 0 0 -b 0 c 0 0 0",
    "0 0 0 0 0 0 0 0 0 c 0 0 0",
    "0 -b c 0 0 0 0 -b 0 c 0 0 0",
    "0 b -c 0 0 0 0 b 0 -c 0 0 0",
];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let opts = AnalyzeOptions::default();
    let a = analyze(load("paper-example.json"), &opts).unwrap();
    let elapsed = start.elapsed();
    let report = ReportFile::from_analysis(&a, &opts);
    let mut c = Checks::default();

    let expected = [
        ("a2-", "L(M2R)^∞"),
        ("a2+", "M1(M2R)^∞"),
        ("a3-", "M1L^∞"),
        ("a3+", "M2L^∞"),
        ("a4-", "M2R^∞"),
        ("a5+", "RM2M2L^∞"),
    ];
    let got: Vec<(&str, &str)> = report
        .kneading_data
        .iter()
        .map(|e| (e.point.as_str(), e.itinerary.as_str()))
        .collect();
    c.check(got == expected, || format!("kneading data {got:?}"));

    let m = |k: i64, t: u32, e: [u32; 3]| WeightPoly::monomial(k, t, &e);
    let numerator = [
        m(1, 0, [0, 0, 0]),
        m(-2, 1, [1, 0, 0]),
        m(-1, 1, [0, 1, 0]),
        m(-1, 1, [0, 0, 1]),
        m(2, 2, [1, 0, 1]),
        m(-1, 2, [0, 1, 1]),
        m(4, 3, [1, 1, 1]),
        m(1, 3, [0, 2, 1]),
        m(1, 3, [0, 1, 2]),
        m(2, 4, [1, 2, 1]),
        m(-2, 4, [1, 1, 2]),
        m(-2, 5, [1, 2, 2]),
    ]
    .iter()
    .fold(WeightPoly::zero(3), |acc, x| &acc + x);
    let ours = a.determinant.numerator.merge_weights(&MERGE, 3);
    c.check(ours == numerator, || format!("numerator {ours}"));

    let one = WeightPoly::one(3);
    let denominator = &(&(&one - &m(1, 1, [1, 0, 0])) * &(&one - &m(1, 1, [0, 0, 1]))) * &(&one - &m(1, 2, [0, 1, 1]));
    let factors: Vec<_> = a.determinant.denominator.iter().map(|f| f.merge_weights(&MERGE, 3)).collect();
    let ours = product(&factors, 3);
    c.check(factors.len() == 3 && ours == denominator, || format!("denominator {ours}"));

    let b = a.bundle.as_ref().unwrap();
    let q = printed(&Q);
    compare(&mut c, "Q", &b.q, &q);
    let support: Vec<Vec<u8>> = (0..q.rows())
        .map(|i| (0..q.cols()).map(|j| u8::from(!q.get(i, j).is_zero())).collect())
        .collect();
    c.check(b.a == support, || format!("A {:?}", b.a));
    c.check(b.b == ints(&B), || format!("B {:?}", b.b));
    compare(&mut c, "V", &b.v, &printed(&V));
    let u: Vec<Vec<i64>> = b.u.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    c.check(u == ints(&U), || format!("U {:?}", b.u));
    compare(&mut c, "K", &b.k, &printed(&K));
    let mut pi = PolyMatrix::zeros(13, 13, 3);
    for (j, &img) in PI.iter().enumerate() {
        pi.set(img - 1, j, WeightPoly::one(3));
    }
    compare(&mut c, "Pi", &b.pi, &pi);
    compare(&mut c, "Theta", &b.theta, &printed(&THETA));

    c.finish(
        elapsed,
        Duration::from_secs(1),
        "kneading data, D(t, beta) and A, Q, B, V, U, K, Pi, Theta match the Example".into(),
    )
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let opts = AnalyzeOptions::default();
    let a = analyze(load("paper-example.json"), &opts).unwrap();
    let report = ReportFile::from_analysis(&a, &opts);
    let elapsed = start.elapsed();
    let inv = &report.invariants;
    let value = |r: &kneading::io::RealJson| parse_real(&r.value).unwrap();
    let dim = value(&inv.hausdorff_dimension);
    let gamma = value(&inv.escape_rate);
    let h = value(&inv.topological_entropy);
    let mut c = Checks::default();
    c.check((dim - DIM).abs() < 1e-5, || format!("dim_H = {dim}"));
    c.check((gamma - GAMMA).abs() < 1e-6, || format!("gamma = {gamma}"));
    c.check((h - HTOP).abs() < 1e-5, || format!("h_top = {h}"));

    let t0 = inv.t0.as_ref().map(value);
    let t1 = inv.t1.as_ref().map(value);
    let p0 = [1.0, -4.0, 1.0, 6.0, 0.0, -2.0];
    let p1 = [1.0, -4.0 / 3.0, 1.0 / 12.0, 11.0 / 36.0, -1.0 / 72.0, -1.0 / 72.0];
    let r0 = t0.map(|t| horner(&p0, t).abs());
    let r1 = t1.map(|t| horner(&p1, t).abs());
    c.check(r0.is_some_and(|r| r < 1e-10), || format!("t0 = {t0:?}, residual {r0:?}"));
    c.check(r1.is_some_and(|r| r < 1e-10), || format!("t1 = {t1:?}, residual {r1:?}"));
    c.check(t1.is_some_and(|t| (t - gamma.exp()).abs() < 1e-12), || {
        format!("t1 = {t1:?} is not e^gamma")
    });
    c.finish(
        elapsed,
        Duration::from_secs(1),
        format!(
            "dim_H = {dim:.8}, gamma = {gamma:.9}, h_top = {h:.8}, residuals {:.1e} and {:.1e}",
            r0.unwrap(),
            r1.unwrap()
        ),
    )
}

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 24;

fn corpus_analyses() -> (Vec<Analysis>, Duration) {
    let start = Instant::now();
    let maps = corpus(CORPUS_SEED, CORPUS_SIZE);
    let out = maps
        .into_iter()
        .map(|m| analyze_validated(m, &AnalyzeOptions::default()).unwrap())
        .collect();
    (out, start.elapsed())
}

fn criterion_3(corpus: &[Analysis], elapsed: Duration) -> Outcome {
    let mut c = Checks::default();
    for name in ["paper-example.json", "cantor.json"] {
        let a = analyze(load(name), &AnalyzeOptions::default()).unwrap();
        identities(&mut c, name, &a);
    }
    for a in corpus {
        identities(&mut c, a.map.hole_map().name.as_deref().unwrap_or("?"), a);
    }
    c.finish(
        elapsed,
        Duration::from_secs(60),
        format!("5 exact identities on 2 fixtures and {} corpus maps", corpus.len()),
    )
}

fn identities(c: &mut Checks, name: &str, a: &Analysis) {
    let v = a.verification.as_ref().unwrap();
    c.check(v.checks.len() == 5, || format!("{name}: {} checks", v.checks.len()));
    for check in &v.checks {
        c.check(check.passed, || format!("{name}: {} {:?}", check.name, check.detail));
    }
    // D * R = char_poly(Q), recomputed outside the identity checker
    let r = product(&a.r, a.determinant.nvars());
    let dr = (&a.determinant.numerator * &r).exact_div(&a.determinant.denominator_poly());
    c.check(dr.as_ref() == Some(&v.char_poly_q), || format!("{name}: D * R differs from char_poly(Q)"));
}

fn criterion_4(corpus: &[Analysis]) -> Outcome {
    let mut c = Checks::default();
    let a = analyze(load("cantor.json"), &AnalyzeOptions::default()).unwrap();
    let inv = &a.invariants;
    let exact = [
        ("dim_H", inv.hausdorff_dimension, 2f64.ln() / 3f64.ln()),
        ("gamma", inv.escape_rate, 1.5f64.ln()),
        ("h_top", inv.topological_entropy, 2f64.ln()),
    ];
    for (name, got, want) in exact {
        c.check((got - want).abs() < 1e-8, || format!("middle thirds {name} = {got}, want {want}"));
    }
    let mut full = 0;
    for a in corpus.iter().filter(|a| a.map.is_full_branch()) {
        full += 1;
        let inv = &a.invariants;
        let moran = inv.moran_dimension;
        c.check(moran.is_some_and(|m| (m - inv.hausdorff_dimension).abs() < 1e-8), || {
            format!("{:?}: moran {moran:?}, dim_H {}", a.map.hole_map().name, inv.hausdorff_dimension)
        });
    }
    c.check(full > 0, || "no full-branch corpus maps".into());
    Outcome::new(
        c.0.is_empty(),
        if c.0.is_empty() {
            format!("middle thirds exact within 1e-8; Moran matches on {full} full-branch maps")
        } else {
            c.0.join("; ")
        },
    )
}

fn criterion_5(corpus: &[Analysis]) -> Outcome {
    let mut c = Checks::default();
    let mut worst = 0f64;
    for a in corpus {
        let d = a.invariants.route_difference;
        worst = worst.max(d.unwrap_or(f64::INFINITY));
        c.check(d.is_some_and(|d| d < 1e-8), || {
            format!("{:?}: route difference {d:?}", a.map.hole_map().name)
        });
    }
    Outcome::new(
        c.0.is_empty(),
        if c.0.is_empty() {
            format!("{} corpus maps, worst route difference {worst:.1e}", corpus.len())
        } else {
            c.0.join("; ")
        },
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut summary = Vec::new();
    for (name, gamma) in [("paper-example.json", GAMMA), ("cantor.json", 1.5f64.ln())] {
        let map = kneading::validate_map(load(name), true).unwrap();
        let series = simulate_survival(&map, 1_000_000, 30, 42).unwrap();
        let est = estimate_escape_rate(&series, 5).unwrap();
        let tol = (3.0 * est.std_err).max(0.05 * gamma);
        let err = (est.gamma_hat - gamma).abs();
        c.check(err <= tol, || format!("{name}: gamma_hat {} vs {gamma}, tol {tol}", est.gamma_hat));
        summary.push(format!("{name} gamma_hat {:.5}", est.gamma_hat));
    }
    let map = kneading::validate_map(load("paper-example.json"), true).unwrap();
    let cyl = cylinder_dimension(&map, 10).unwrap();
    c.check((cyl.dimension - DIM).abs() < 5e-3, || format!("cylinder dimension {}", cyl.dimension));
    summary.push(format!("cylinder dimension {:.5}", cyl.dimension));
    c.finish(start.elapsed(), Duration::from_secs(120), summary.join(", "))
}

fn run(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_kneading")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

fn criterion_7() -> Outcome {
    let mut c = Checks::default();
    for name in ["paper-example.json", "cantor.json"] {
        let spec = fixture(name);
        let spec = spec.to_str().unwrap();
        let first = run(&["analyze", spec]);
        let second = run(&["analyze", spec]);
        c.check(first.0 == 0, || format!("analyze {name} exited {}", first.0));
        c.check(first.1 == second.1, || format!("analyze {name}: reports differ"));
    }
    let spec = fixture("paper-example.json");
    let spec = spec.to_str().unwrap();
    let sim = |threads: &str| run(&["simulate", spec, "--seed", "7", "--n-points", "200000", "--threads", threads]);
    let (one, four) = (sim("1"), sim("4"));
    c.check(one.0 == 0, || format!("simulate exited {}", one.0));
    c.check(one.1 == four.1 && one.2 == four.2, || "simulate output depends on the thread count".into());

    let map = kneading::validate_map(load("paper-example.json"), true).unwrap();
    let pooled = |n| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        pool.install(|| simulate_survival(&map, 300_000, 20, 42).unwrap())
    };
    c.check(pooled(1) == pooled(4), || "survival series depends on the pool size".into());
    Outcome::new(
        c.0.is_empty(),
        if c.0.is_empty() {
            "analyze reports byte-identical; simulate identical on 1 and 4 threads".into()
        } else {
            c.0.join("; ")
        },
    )
}

fn main() {
    let mut results = vec![
        (1, "Example exact symbolic layer", criterion_1()),
        (2, "Example numeric layer", criterion_2()),
    ];
    let (corpus, corpus_time) = corpus_analyses();
    results.push((3, "identity suite", criterion_3(&corpus, corpus_time)));
    results.push((4, "analytic oracles", criterion_4(&corpus)));
    results.push((5, "cross-route agreement", criterion_5(&corpus)));
    results.push((6, "statistical oracle", criterion_6()));
    results.push((7, "determinism", criterion_7()));

    let mut failed = 0;
    for (n, title, o) in &results {
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {n} {tag} {title}: {}", o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {}/{} passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
