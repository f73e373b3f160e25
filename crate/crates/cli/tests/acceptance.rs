//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Tolerances are fixed below.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qfnet::circuit::{build_mottonen_real_prep, ComputeUncomputeOptions};
use qfnet::curve::{resample_makima, Makima, PreparedCurve, PreparedKind};
use qfnet::metrics::{
    build_distance_matrix, compute_uncompute_fidelity, quantum_fidelity_swaptest, Estimator,
    MetricSpec,
};
use qfnet::netgraph::{mst, top_percent_edge_count, top_percent_network};
use qfnet::rng::{derive_seed, rng_from_seed};
use qfnet::stats::mantel;
use qfnet::transpile::{equivalence_up_to_phase, insert_ddd_xyxy, lower, DEFAULT_MIN_WINDOW};
use qfnet::{Circuit, DistanceMatrix, Gate, GateKind, MetricName, StateVector, TuningCurve};
use qfnet_pipeline::builtin::{builtin_circuit, Builtin};
use qfnet_pipeline::ingest::write_curves;
use qfnet_pipeline::{generate_synthetic, run_pipeline, ConfigMap, SyntheticSpec};

const SWAP_TOL: f64 = 1e-10;
const CU_TOL: f64 = 1e-10;
const PREP_TOL: f64 = 1e-10;
const MAKIMA_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-8;
const SHOT_TOL_10K: f64 = 3e-2;
const DEPTH_SLACK: f64 = 0.15;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(0xACCE, &[seed]))
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn unit_real(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn angles(rng: &mut impl Rng) -> PreparedCurve {
    PreparedCurve {
        kind: PreparedKind::AngleVector,
        values: (0..9).map(|_| rng.random_range(0.0..PI)).collect(),
    }
}

fn amplitudes(rng: &mut impl Rng) -> PreparedCurve {
    PreparedCurve {
        kind: PreparedKind::AmplitudeVector,
        values: unit_real(rng, 16),
    }
}

fn product_cosine(a: &PreparedCurve, b: &PreparedCurve) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| ((x - y) / 2.0).cos().powi(2))
        .product()
}

fn overlap_sq(a: &PreparedCurve, b: &PreparedCurve) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x * y)
        .sum::<f64>()
        .powi(2)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ang = builtin_circuit(Builtin::Ang).map_err(|e| e.to_string())?;
    let amp = builtin_circuit(Builtin::Amp).map_err(|e| e.to_string())?;
    let qft = builtin_circuit(Builtin::AmpQft).map_err(|e| e.to_string())?;
    let (a, m, q) = (ang.census(), amp.census(), qft.census());
    let elapsed = start.elapsed();

    let counts = |c: &qfnet::GateCensus| c.reported();
    let expect = |c: &qfnet::GateCensus, want: &[(&str, usize)]| {
        let got = counts(c);
        want.iter()
            .all(|(k, n)| got.get(*k).copied().unwrap_or(0) == *n)
            && got.values().sum::<usize>() == want.iter().map(|(_, n)| n).sum::<usize>()
    };
    check(
        a.total_gates == 36 && ang.num_wires == 18 && a.two_qubit_gates == 9 && a.depth == 3,
        format!("ang census {a:?}"),
    )?;
    check(
        expect(&a, &[("H", 9), ("RX", 18), ("CNOT", 9)]),
        "ang per-kind counts",
    )?;
    check(
        m.total_gates == 132 && amp.num_wires == 4 && m.two_qubit_gates == 56,
        format!("amp census {m:?}"),
    )?;
    check(
        expect(&m, &[("H", 16), ("RY", 60), ("CNOT", 56)]),
        "amp per-kind counts",
    )?;
    check(
        q.total_gates == 156 && qft.num_wires == 4 && q.two_qubit_gates == 72,
        format!("amp+qft census {q:?}"),
    )?;
    check(
        expect(
            &q,
            &[("H", 24), ("RY", 60), ("CNOT", 56), ("CZ", 12), ("SWAP", 4)],
        ),
        "amp+qft per-kind counts",
    )?;
    let within = |d: usize, t: f64| ((d as f64) - t).abs() <= DEPTH_SLACK * t;
    check(
        within(m.depth, 108.0) && within(q.depth, 124.0),
        format!("depths {} / {}", m.depth, q.depth),
    )?;
    check(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "ang 36/9/depth {}, amp {}/{}/depth {} (target 108), amp+qft {}/{}/depth {} (target 124), {:.1} ms",
        a.depth,
        m.total_gates,
        m.two_qubit_gates,
        m.depth,
        q.total_gates,
        q.two_qubit_gates,
        q.depth,
        elapsed.as_secs_f64() * 1e3
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let pairs: Vec<_> = (0..1000)
        .map(|_| (angles(&mut r), angles(&mut r)))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|(a, b)| {
            quantum_fidelity_swaptest(a, b, Estimator::Analytic)
                .map(|f| (f - product_cosine(a, b)).abs())
        })
        .collect::<qfnet::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    check(worst <= SWAP_TOL, format!("max error {worst:e}"))?;
    check(
        elapsed < Duration::from_secs(120),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "1000 pairs, max |error| {worst:.2e}, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b) = (amplitudes(&mut r), amplitudes(&mut r));
        let f = compute_uncompute_fidelity(
            &a,
            &b,
            ComputeUncomputeOptions::textbook(),
            Estimator::Analytic,
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max((f - overlap_sq(&a, &b)).abs());
    }
    check(worst <= CU_TOL, format!("textbook max error {worst:e}"))?;
    let mut self_worst = 0.0f64;
    for _ in 0..200 {
        let a = amplitudes(&mut r);
        let f = compute_uncompute_fidelity(
            &a,
            &a,
            ComputeUncomputeOptions::default(),
            Estimator::Analytic,
        )
        .map_err(|e| e.to_string())?;
        self_worst = self_worst.max((f - 1.0).abs());
    }
    check(
        self_worst <= CU_TOL,
        format!("self-fidelity error {self_worst:e}"),
    )?;
    Ok(format!(
        "textbook max |error| {worst:.2e} over 1000 pairs; default-layout self-fidelity max |1-F| {self_worst:.2e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let cases: Vec<(PreparedCurve, PreparedCurve, bool)> = (0..100)
        .map(|i| {
            if i % 2 == 0 {
                (angles(&mut r), angles(&mut r), true)
            } else {
                (amplitudes(&mut r), amplitudes(&mut r), false)
            }
        })
        .collect();
    let mut report = Vec::new();
    for (shots, tol) in [(10_000u64, SHOT_TOL_10K), (1000, 3.0 / 1000f64.sqrt())] {
        let hits: usize = cases
            .par_iter()
            .enumerate()
            .map(|(i, (a, b, is_swap))| {
                let est = Estimator::Shots {
                    shots,
                    seed: derive_seed(shots, &[i as u64]),
                };
                let opts = ComputeUncomputeOptions::default();
                let (exact, noisy) = if *is_swap {
                    (
                        quantum_fidelity_swaptest(a, b, Estimator::Analytic).unwrap(),
                        quantum_fidelity_swaptest(a, b, est).unwrap(),
                    )
                } else {
                    (
                        compute_uncompute_fidelity(a, b, opts, Estimator::Analytic).unwrap(),
                        compute_uncompute_fidelity(a, b, opts, est).unwrap(),
                    )
                };
                usize::from((noisy - exact).abs() <= tol)
            })
            .sum();
        check(
            hits >= 95,
            format!("{hits}/100 within {tol} at {shots} shots"),
        )?;
        report.push(format!("{hits}/100 within {tol:.3} at {shots} shots"));
    }
    Ok(report.join("; "))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let v = unit_real(&mut r, 16);
        let c = build_mottonen_real_prep(&v).map_err(|e| e.to_string())?;
        let census = c.census();
        check(
            census.count(GateKind::RY) == 15
                && census.count(GateKind::CNOT) == 14
                && census.total_gates == 29,
            format!("census {census:?}"),
        )?;
        let mut s = StateVector::zero(4).map_err(|e| e.to_string())?;
        s.apply_circuit(&c).map_err(|e| e.to_string())?;
        for (amp, want) in s.amplitudes().iter().zip(&v) {
            worst = worst.max((amp.re - want).abs()).max(amp.im.abs());
        }
    }
    check(worst <= PREP_TOL, format!("max error {worst:e}"))?;
    Ok(format!(
        "1000 vectors, max |error| {worst:.2e}, 15 RY + 14 CNOT each"
    ))
}

/// Makima coded directly from the definition, evaluated as a monomial cubic
/// on each interval.
fn oracle_makima(y: &[f64], x: f64) -> f64 {
    let s = y.len();
    let mut d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let (l0, l1) = (2.0 * d[0] - d[1], 0.0);
    let l1 = l1 + 2.0 * l0 - d[0];
    let (r0, r1) = (2.0 * d[s - 2] - d[s - 3], 0.0);
    let r1 = r1 + 2.0 * r0 - d[s - 2];
    d.insert(0, l0);
    d.insert(0, l1);
    d.push(r0);
    d.push(r1);
    let m = |i: usize| {
        let (a, b, c, e) = (d[i], d[i + 1], d[i + 2], d[i + 3]);
        let w1 = (e - c).abs() + (e + c).abs() / 2.0;
        let w2 = (b - a).abs() + (b + a).abs() / 2.0;
        if w1 + w2 == 0.0 {
            0.0
        } else {
            (w1 * b + w2 * c) / (w1 + w2)
        }
    };
    let i = (x.floor() as usize).min(s - 2);
    let t = x - i as f64;
    let delta = y[i + 1] - y[i];
    let (m0, m1) = (m(i), m(i + 1));
    y[i] + t * (m0 + t * ((3.0 * delta - 2.0 * m0 - m1) + t * (m0 + m1 - 2.0 * delta)))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut linear = 0.0f64;
    let mut knots = 0.0f64;
    for _ in 0..100 {
        let s = r.random_range(4..20);
        let (a, b): (f64, f64) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let y: Vec<f64> = (0..s).map(|k| a + b * k as f64).collect();
        let sp = Makima::new(&y).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let x = r.random_range(0.0..(s - 1) as f64);
            linear = linear.max((sp.eval(x) - (a + b * x)).abs());
        }
        let y: Vec<f64> = (0..s).map(|_| r.random_range(-1.0..1.0)).collect();
        let sp = Makima::new(&y).map_err(|e| e.to_string())?;
        for (k, v) in y.iter().enumerate() {
            knots = knots.max((sp.eval(k as f64) - v).abs());
        }
        let curve = TuningCurve::new("c", [0.0; 3], y.clone());
        let out = resample_makima(&curve, 16).map_err(|e| e.to_string())?;
        check(
            out[0] == y[0] && out[15] == y[s - 1],
            "endpoint not preserved",
        )?;
    }
    check(linear < MAKIMA_TOL, format!("linear error {linear:e}"))?;
    check(knots < MAKIMA_TOL, format!("knot error {knots:e}"))?;
    let y: Vec<f64> = (0..9).map(|_| r.random_range(-1.0..1.0)).collect();
    let sp = Makima::new(&y).map_err(|e| e.to_string())?;
    let mut oracle = 0.0f64;
    for _ in 0..100 {
        let x = r.random_range(0.0..8.0);
        oracle = oracle.max((sp.eval(x) - oracle_makima(&y, x)).abs());
    }
    check(oracle < MAKIMA_TOL, format!("oracle error {oracle:e}"))?;
    Ok(format!(
        "linear {linear:.1e}, knots {knots:.1e}, endpoints exact, oracle {oracle:.1e} at 100 points"
    ))
}

fn random_matrix(r: &mut impl Rng, n: usize) -> DistanceMatrix {
    let mut v = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x: f64 = r.random_range(0.0..1.0);
            v[i][j] = x;
            v[j][i] = x;
        }
    }
    DistanceMatrix {
        metric: MetricSpec::analytic(MetricName::Euclidean),
        size: n,
        neuron_ids: (0..n).map(|i| format!("n{i}")).collect(),
        values: v,
        evaluations: 0,
    }
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let d = random_matrix(&mut r, 20);
    let own = mantel(&d, &d, 999, 1).map_err(|e| e.to_string())?;
    check(
        own.statistic_r == 1.0 && own.p_value == 0.001,
        format!("self r {} p {}", own.statistic_r, own.p_value),
    )?;
    let mut above = 0;
    for t in 0..100 {
        let (a, b) = (random_matrix(&mut r, 10), random_matrix(&mut r, 10));
        if mantel(&a, &b, 999, t).map_err(|e| e.to_string())?.p_value > 0.05 {
            above += 1;
        }
    }
    check(above >= 90, format!("{above}/100 with p > 0.05"))?;
    for _ in 0..20 {
        let (a, b) = (random_matrix(&mut r, 12), random_matrix(&mut r, 12));
        let mut perm: Vec<usize> = (0..12).collect();
        perm.shuffle(&mut r);
        let relabel = |m: &DistanceMatrix| {
            let mut o = m.clone();
            for i in 0..12 {
                for j in 0..12 {
                    o.values[i][j] = m.values[perm[i]][perm[j]];
                }
            }
            o
        };
        let r0 = mantel(&a, &b, 9, 0).map_err(|e| e.to_string())?.statistic_r;
        let r1 = mantel(&relabel(&a), &relabel(&b), 9, 0)
            .map_err(|e| e.to_string())?
            .statistic_r;
        check(
            r0.to_bits() == r1.to_bits(),
            format!("relabel changed r: {r0} vs {r1}"),
        )?;
    }
    Ok(format!(
        "self r=1 p=0.001; independent {above}/100 with p>0.05; relabeling exact"
    ))
}

fn prufer_weight(seq: &[usize], d: &DistanceMatrix) -> f64 {
    let n = d.size;
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut w = 0.0;
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        w += d.values[leaf][s];
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    w + d.values[rest[0]][rest[1]]
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = random_matrix(&mut r, 7);
        let mut best = f64::INFINITY;
        let mut trees = 0;
        let mut seq = [0usize; 5];
        for code in 0..7usize.pow(5) {
            let mut c = code;
            for s in seq.iter_mut() {
                *s = c % 7;
                c /= 7;
            }
            best = best.min(prufer_weight(&seq, &d));
            trees += 1;
        }
        check(trees == 16807, "tree enumeration")?;
        let net = mst(&d, None).map_err(|e| e.to_string())?;
        let w: f64 = net.edges.iter().map(|e| e.distance).sum();
        worst = worst.max((w - best).abs());
    }
    check(worst < 1e-12, format!("weight gap {worst:e}"))?;
    let d = random_matrix(&mut r, 76);
    let (c5, c10) = (
        top_percent_edge_count(5.0, 2850),
        top_percent_edge_count(10.0, 2850),
    );
    let n5 = top_percent_network(&d, 5.0, None)
        .map_err(|e| e.to_string())?
        .edges
        .len();
    let n10 = top_percent_network(&d, 10.0, None)
        .map_err(|e| e.to_string())?
        .edges
        .len();
    check(
        c5 == 143 && n5 == 143 && c10 == 285 && n10 == 285,
        format!("counts {n5}/{n10}"),
    )?;
    Ok(format!(
        "100 matrices match exhaustive search (gap {worst:.1e}); n=76 gives {n5} and {n10} edges"
    ))
}

fn random_circuit(r: &mut impl Rng) -> Circuit {
    let n = r.random_range(1..=4);
    let mut c = Circuit::new(n);
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| k.num_wires() <= n)
        .collect();
    for _ in 0..r.random_range(1..40) {
        let kind = kinds[r.random_range(0..kinds.len())];
        let mut wires: Vec<usize> = (0..n).collect();
        wires.shuffle(r);
        wires.truncate(kind.num_wires());
        let params = (0..kind.num_params())
            .map(|_| r.random_range(-2.0 * PI..2.0 * PI))
            .collect();
        c.push(Gate::new(kind, wires, params).unwrap()).unwrap();
    }
    c
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let circuits: Vec<Circuit> = (0..1000).map(|_| random_circuit(&mut r)).collect();
    let results: Vec<(bool, usize)> = circuits
        .par_iter()
        .map(|c| {
            let lowered = lower(c).unwrap();
            let ddd = insert_ddd_xyxy(&lowered, DEFAULT_MIN_WINDOW);
            let ok = equivalence_up_to_phase(c, &lowered.circuit, c.num_wires).unwrap()
                && equivalence_up_to_phase(c, &ddd.circuit, c.num_wires).unwrap();
            (ok, ddd.ddd_windows)
        })
        .collect();
    let failures = results.iter().filter(|(ok, _)| !ok).count();
    let windows: usize = results.iter().map(|(_, w)| w).sum();
    check(failures == 0, format!("{failures} inequivalent circuits"))?;
    let ang = builtin_circuit(Builtin::Ang).map_err(|e| e.to_string())?;
    let ang_ddd = insert_ddd_xyxy(&lower(&ang).map_err(|e| e.to_string())?, DEFAULT_MIN_WINDOW);
    check(ang.census().depth == 3, "ang depth")?;
    check(
        ang_ddd.ddd_windows == 0,
        format!("{} insertions into ang", ang_ddd.ddd_windows),
    )?;
    Ok(format!(
        "1000 circuits equivalent within {UNITARY_TOL:e} after lowering and DDD ({windows} trains inserted); ang receives 0"
    ))
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn run_config(entries: &[(&str, String)]) -> Result<qfnet_pipeline::RunConfig, String> {
    let mut m = ConfigMap::default();
    for (k, v) in entries {
        m.set(k, v);
    }
    m.to_run_config().map_err(|e| e.to_string())
}

fn criterion_10(scratch: &Path) -> Outcome {
    let mut trees = Vec::new();
    let mut first = Duration::ZERO;
    for (name, threads) in [("a", 1), ("b", 1), ("c", 4)] {
        let out = scratch.join(format!("desk_{name}"));
        let cfg = run_config(&[
            ("output", out.display().to_string()),
            ("threads", threads.to_string()),
        ])?;
        let start = Instant::now();
        let report = run_pipeline(&cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        if trees.is_empty() {
            first = elapsed;
            check(
                report.curves.len() == 76 && report.matrices.len() == 6,
                "run shape",
            )?;
            check(report.mantel.len() == 21, "mantel all-pairs")?;
            let ang = report.matrix(MetricName::Ang).unwrap();
            check(
                ang.evaluations == 2850,
                format!("{} ang evaluations", ang.evaluations),
            )?;
            let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
            check(
                manifest.contains("\"evaluations\": 2850"),
                "manifest evaluations",
            )?;
            let svg = std::fs::read_to_string(out.join("heatmaps/ang.svg")).unwrap();
            let doc = roxmltree::Document::parse(&svg).map_err(|e| e.to_string())?;
            let cells = doc.descendants().filter(|n| n.has_tag_name("rect")).count();
            check(cells == 5776 + 10, format!("{cells} rects"))?;
            for (label, edges) in [("mst", 75), ("top5", 143), ("top10", 285)] {
                let net = report
                    .networks
                    .iter()
                    .find(|n| n.metric.name == MetricName::Amp && n.label() == label)
                    .unwrap();
                check(
                    net.edges.len() == edges,
                    format!("{label} has {}", net.edges.len()),
                )?;
            }
        }
        let mut tree = read_tree(&out);
        tree.remove("timings.json");
        trees.push(tree);
        std::fs::remove_dir_all(&out).ok();
    }
    check(first < Duration::from_secs(600), format!("took {first:?}"))?;
    check(trees[0] == trees[1], "repeated run differs")?;
    check(trees[0] == trees[2], "4-thread run differs")?;
    Ok(format!(
        "76 neurons x 6 metrics in {:.1} s; {} files byte-identical over 2 repeats and 1 vs 4 threads",
        first.as_secs_f64(),
        trees[0].len()
    ))
}

fn criterion_11(scratch: &Path) -> Outcome {
    // A user-supplied session in the documented CSV format.
    let curves = generate_synthetic(&SyntheticSpec {
        neurons: 24,
        noise: 0.2,
        seed: 2024,
        ..SyntheticSpec::default()
    });
    let csv = scratch.join("session.csv");
    std::fs::write(&csv, write_curves(&curves)).map_err(|e| e.to_string())?;
    let out = scratch.join("user_run");
    let cfg = run_config(&[
        ("input", csv.display().to_string()),
        ("output", out.display().to_string()),
    ])?;
    let report = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    check(
        report.curves == curves,
        "CSV curves differ from the session",
    )?;
    let mut lines = Vec::new();
    for (a, b) in [
        (MetricName::Euclidean, MetricName::ClassicalFidelity),
        (MetricName::Amp, MetricName::AmpQft),
    ] {
        let e = report.mantel_between(a, b).ok_or("missing Mantel pair")?;
        let (r, p) = (e.r.ok_or("r undefined")?, e.p.ok_or("p undefined")?);
        check(
            (-1.0..=1.0).contains(&r) && p >= 1.0 / 1000.0 && p <= 1.0,
            "r or p out of range",
        )?;
        // Same methodology as a direct library computation.
        let ma = build_distance_matrix(
            &curves,
            &cfg.metrics.iter().find(|m| m.name == a).unwrap().clone(),
        )
        .map_err(|e| e.to_string())?;
        let mb = build_distance_matrix(
            &curves,
            &cfg.metrics.iter().find(|m| m.name == b).unwrap().clone(),
        )
        .map_err(|e| e.to_string())?;
        let direct = mantel(&ma, &mb, cfg.permutations, e.seed).map_err(|e| e.to_string())?;
        check(
            direct.statistic_r == r && direct.p_value == p,
            "pipeline and library disagree",
        )?;
        lines.push(format!("{}/{} r={r:.3} p={p:.3}", a.as_str(), b.as_str()));
    }
    check(out.join("mantel.json").is_file(), "mantel.json missing")?;
    Ok(format!(
        "published values are dataset-bound and not targets; user CSV run reports {}",
        lines.join(", ")
    ))
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("benchmark circuit gate counts", Box::new(criterion_1)),
        ("swap test oracle", Box::new(criterion_2)),
        ("compute-uncompute oracle", Box::new(criterion_3)),
        ("shot convergence", Box::new(criterion_4)),
        ("Mottonen preparation", Box::new(criterion_5)),
        ("makima resampler", Box::new(criterion_6)),
        ("Mantel calibration", Box::new(criterion_7)),
        ("MST brute force and top-k counts", Box::new(criterion_8)),
        ("transpile soundness", Box::new(criterion_9)),
        (
            "desk-scale end-to-end run",
            Box::new(|| criterion_10(scratch.path())),
        ),
        (
            "non-reproducibility and user data",
            Box::new(|| criterion_11(scratch.path())),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
