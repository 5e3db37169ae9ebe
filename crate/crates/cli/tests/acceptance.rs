//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use morpho_core::entropy::{field_entropy, BinningSpec};
use morpho_core::layout::embed_plane;
use morpho_core::mesh::{euclidean_edge_lengths, gaussian_curvature, TriMesh};
use morpho_core::packing::{initial_packing, lengths_from_packing};
use morpho_core::ricci::{
    default_target_curvature, edge_weights, hessian, packing_curvature, power_center, ricci_flow, FlowOptions,
};
use morpho_core::synth::{
    jitter, make_disk, make_grid, make_octahedron, make_spherical_cap, make_subject, rng_for, SubjectClass, SynthSpec,
};
use morpho_ml::stats::welch_t_test;
use morpho_ml::{ClassifierKind, ConfusionMatrix};
use morpho_pipeline::{run_all, with_workers, PipelineConfig};
use rand::Rng;

type Outcome = Result<String, String>;
type FullRun = Result<(Vec<u8>, morpho_pipeline::RunAllSummary, Duration), String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn flow_fixture(mesh: &TriMesh<f64>) -> Result<morpho_core::Flow64, String> {
    let l = euclidean_edge_lengths(mesh).map_err(|e| e.to_string())?;
    let p = initial_packing(mesh, &l).map_err(|e| e.to_string())?;
    let t = default_target_curvature(mesh, &l);
    ricci_flow(mesh, &p, &t, &FlowOptions::default()).map_err(|e| e.to_string())
}

fn full_run(workers: usize) -> FullRun {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = PipelineConfig { out: dir.path().to_path_buf(), seed: 42, workers: Some(workers), ..PipelineConfig::default() };
    let start = Instant::now();
    let summary = with_workers(cfg.workers, || run_all(&cfg)).map_err(|e| e.to_string())?.map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let json = std::fs::read(&summary.classify.report_path).map_err(|e| e.to_string())?;
    Ok((json, summary, elapsed))
}

fn criterion_1(run: &FullRun) -> Outcome {
    let (_, summary, elapsed) = run.as_ref().map_err(|e| e.clone())?;
    let report = &summary.classify.report;
    if report.subjects != 160 || summary.features.exit_code() != 0 {
        return Err(format!("cohort incomplete: {} subjects, {} failed meshes", report.subjects, summary.features.failures().count()));
    }
    let acc = |scale: usize, kind: ClassifierKind| {
        report.scales[scale].evaluation.classifiers.iter().find(|c| c.classifier == kind).map(|c| c.mean.accuracy).unwrap_or(f64::NAN)
    };
    let mut notes = Vec::new();
    let mut ok = report.scales.len() == 3 && *elapsed <= Duration::from_secs(600);
    for kind in ClassifierKind::ALL {
        let a: Vec<f64> = (0..report.scales.len()).map(|s| acc(s, kind)).collect();
        ok &= a.windows(2).all(|w| w[1] >= w[0]);
        notes.push(format!("{kind} {:?}", a.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>()));
    }
    for kind in [ClassifierKind::Mlp, ClassifierKind::Lr] {
        ok &= acc(2, kind) >= 0.95;
    }
    let msg = format!("Scale 1..3 mean accuracy: {}; {:.1}s", notes.join(", "), elapsed.as_secs_f64());
    check(ok, msg.clone(), msg)
}

fn criterion_2() -> Outcome {
    let mut fixtures: Vec<(String, TriMesh<f64>)> = vec![
        ("triangle".into(), TriMesh::new(vec![[0.0; 3], [1.3, 0.2, 0.0], [0.4, 0.9, 0.3]], vec![[0, 1, 2]]).unwrap()),
        ("octahedron".into(), make_octahedron()),
    ];
    for r in 1..=10 {
        fixtures.push((format!("disk{r}"), make_disk(r)));
    }
    for seed in 0..6 {
        let class = if seed % 2 == 0 { SubjectClass::Smooth } else { SubjectClass::Atrophied };
        fixtures.push((format!("bumpy{seed}"), make_subject(&SynthSpec::for_class(class, 12, seed)).0));
    }
    let mut worst: f64 = 0.0;
    for (name, m) in &fixtures {
        let k = gaussian_curvature(m, &euclidean_edge_lengths(m).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let dev = (k.iter().sum::<f64>() - TAU * m.euler_characteristic() as f64).abs();
        if dev > 1e-9 {
            return Err(format!("{name}: deviation {dev:e}"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("{} fixtures, max |sum K - 2 pi chi| = {worst:.1e}", fixtures.len()))
}

fn criterion_3() -> Outcome {
    let mut fixtures: Vec<(String, TriMesh<f64>)> = vec![
        ("disk40".into(), make_disk(40)),
        ("cap30".into(), make_spherical_cap(30, 1.5)),
        ("grid70".into(), jitter(&make_grid(70, 70), 0.002, 0.01, 1)),
    ];
    for rings in [5, 10, 20, 40] {
        for class in [SubjectClass::Smooth, SubjectClass::Atrophied] {
            fixtures.push((format!("{class:?}{rings}"), make_subject(&SynthSpec::for_class(class, rings, rings as u64)).0));
        }
    }
    let (mut max_iter, mut max_v, mut worst) = (0, 0, 0.0f64);
    for (name, m) in &fixtures {
        if m.vertex_count() > 5000 {
            return Err(format!("{name} exceeds the size bound"));
        }
        let s = flow_fixture(m).map_err(|e| format!("{name}: {e}"))?;
        if s.residual > 1e-6 || s.iteration > 64 {
            return Err(format!("{name}: residual {:e} after {} iterations", s.residual, s.iteration));
        }
        if s.trace.windows(2).any(|w| w[1].residual > w[0].residual) {
            return Err(format!("{name}: residual increased"));
        }
        max_iter = max_iter.max(s.iteration);
        max_v = max_v.max(m.vertex_count());
        worst = worst.max(s.residual);
    }
    Ok(format!("{} fixtures up to V={max_v}: <= {max_iter} iterations, max residual {worst:.1e}", fixtures.len()))
}

fn criterion_4() -> Outcome {
    let mesh = jitter(&make_grid::<f64>(5, 4), 0.06, 0.08, 17);
    let l = euclidean_edge_lengths(&mesh).unwrap();
    let p = initial_packing(&mesh, &l).unwrap();
    let h = hessian(&mesh, &edge_weights(&mesh, &l, p.gamma()).unwrap()).to_dense();
    let n = mesh.vertex_count();
    let step = 1e-6;
    let (mut plus, mut minus, mut asym, mut rowsum) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for j in 0..n {
        let mut up = vec![0.0; n];
        let mut dn = vec![0.0; n];
        up[j] = step;
        dn[j] = -step;
        let kp = packing_curvature(&mesh, &p, &up).unwrap();
        let km = packing_curvature(&mesh, &p, &dn).unwrap();
        for i in 0..n {
            let d = (kp[i] - km[i]) / (2.0 * step);
            plus = plus.max((h[i][j] - d).abs());
            minus = minus.max((h[i][j] + d).abs());
            asym = asym.max((h[i][j] - h[j][i]).abs());
        }
    }
    for row in &h {
        rowsum = rowsum.max(row.iter().sum::<f64>().abs());
    }
    println!("      info 4: entrywise max |H - (-dK/du)| = {minus:.3e} (sign convention: the assembled matrix is +dK/du)");
    let msg = format!("V={n}: max |H - dK/du| = {plus:.2e}, max |H - H^T| = {asym:.1e}, max |H 1| = {rowsum:.1e}");
    check(plus < 1e-5 && asym == 0.0 && rowsum < 1e-12, msg.clone(), msg)
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (class, rings, seed) in [(SubjectClass::Smooth, 20, 3), (SubjectClass::Atrophied, 20, 4), (SubjectClass::Atrophied, 40, 5)] {
        let m = make_subject::<f64>(&SynthSpec::for_class(class, rings, seed)).0;
        let s = flow_fixture(&m)?;
        let a = embed_plane(&m, &s.lengths).map_err(|e| e.to_string())?;
        let b = embed_plane(&m, &s.lengths).map_err(|e| e.to_string())?;
        if a != b {
            return Err("two embeddings differ".into());
        }
        let err = a.max_relative_edge_error(&m, &s.lengths);
        let min_area = a.min_signed_area(&m);
        if err > 1e-6 || !(min_area > 0.0) {
            return Err(format!("edge error {err:e}, min signed area {min_area:e}"));
        }
        worst = worst.max(err);
        count += 1;
    }
    Ok(format!("{count} flattened subjects: max relative edge error {worst:.1e}, all areas positive, bit-identical reruns"))
}

fn criterion_6() -> Outcome {
    let fixtures: Vec<TriMesh<f64>> = vec![
        make_disk(10),
        make_grid(9, 7),
        make_spherical_cap(8, 1.4),
        jitter(&make_grid(12, 12), 0.02, 0.05, 9),
        make_subject(&SynthSpec::for_class(SubjectClass::Atrophied, 15, 2)).0,
        TriMesh::new(vec![[0.0; 3], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]], vec![[0, 1, 2]]).unwrap(),
    ];
    let mut worst = 0.0f64;
    for m in &fixtures {
        let l = euclidean_edge_lengths(m).unwrap();
        let p = initial_packing(m, &l).map_err(|e| e.to_string())?;
        let back = lengths_from_packing(m, &p, &vec![0.0; m.vertex_count()]).map_err(|e| e.to_string())?;
        for (a, b) in back.as_slice().iter().zip(l.as_slice()) {
            worst = worst.max((a - b).abs() / b);
        }
    }
    let msg = format!("{} fixtures: max relative error {worst:.1e}", fixtures.len());
    check(worst <= 1e-12, msg.clone(), msg)
}

fn criterion_7() -> Outcome {
    let mut rng = rng_for(7, &[7]);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let l: [f64; 3] = [rng.random_range(0.1..4.0), rng.random_range(0.1..4.0), rng.random_range(0.1..4.0)];
        let s = 0.5 * (l[0] + l[1] + l[2]);
        if (s - l[0]) * (s - l[1]) * (s - l[2]) * s < 1e-4 * s.powi(4) {
            continue;
        }
        let r = [rng.random_range(0.05..2.0), rng.random_range(0.05..2.0), rng.random_range(0.05..2.0)];
        let pc = power_center(l[0], l[1], l[2], r).map_err(|e| e.to_string())?;
        let pw = pc.powers(r);
        let scale = pw.iter().map(|x| x.abs()).fold(1.0, f64::max);
        worst = worst.max(((pw[0] - pw[1]).abs().max((pw[1] - pw[2]).abs())) / scale);
        n += 1;
    }
    let eq = power_center(1.0f64, 1.0, 1.0, [0.5; 3]).unwrap();
    let h_err = eq.h.iter().map(|h| (h - 1.0 / (2.0 * 3f64.sqrt())).abs()).fold(0.0, f64::max);
    let msg = format!("1000 triangles: max relative power residual {worst:.1e}; equilateral h error {h_err:.1e}");
    check(worst < 1e-9 && h_err < 1e-12, msg.clone(), msg)
}

fn criterion_8() -> Outcome {
    let mut rng = rng_for(8, &[8]);
    for _ in 0..500 {
        let bins = rng.random_range(1..100);
        let n = rng.random_range(1..300);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let spec = BinningSpec::new(bins, -1.0, 1.0, "x").unwrap();
        let e = field_entropy(&v, &spec).unwrap();
        if !(e >= 0.0 && e <= (bins as f64).log2()) {
            return Err(format!("entropy {e} outside [0, log2 {bins}]"));
        }
        let mut w = v.clone();
        w.reverse();
        w.rotate_left(n / 3);
        if field_entropy(&w, &spec).unwrap() != e {
            return Err("permutation changed entropy".into());
        }
    }
    let spec4 = BinningSpec::new(4, 0.0, 4.0, "x").unwrap();
    let uniform = field_entropy(&[0.5, 1.5, 2.5, 3.5, 0.2, 1.2, 2.2, 3.2], &spec4).unwrap();
    let constant = field_entropy(&[1.7; 50], &spec4).unwrap();
    let msg = format!("500 random fields within bounds and order-invariant; uniform-4 = {uniform}, constant = {constant}");
    check(uniform == 2.0 && constant == 0.0, msg.clone(), msg)
}

/// Student-t lower tail by Simpson quadrature in `theta = atan(x)`.
fn t_cdf_oracle(x: f64, dof: f64) -> f64 {
    let g = |theta: f64| {
        let c = theta.cos();
        if c <= 0.0 {
            return 0.0;
        }
        let t = theta.tan();
        (1.0 + t * t / dof).powf(-(dof + 1.0) / 2.0) / (c * c)
    };
    let simpson = |a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        let mut s = g(a) + g(b);
        for i in 1..n {
            s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    simpson(-PI / 2.0, x.atan(), 400_000) / simpson(-PI / 2.0, PI / 2.0, 800_000)
}

fn criterion_9() -> Outcome {
    let m = ConfusionMatrix { tp: 50, tn: 45, fp: 5, fn_: 0 }.metrics();
    let hand = [0.95, 50.0 / 55.0, 1.0, 0.9, 100.0 / 105.0];
    let metric_err = m.as_array().iter().zip(hand).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut rng = rng_for(9, &[9]);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let (na, nb) = (rng.random_range(3..30), rng.random_range(3..30));
        let mu: f64 = rng.random_range(-0.1..0.1);
        let a: Vec<f64> = (0..na).map(|_| 0.9 + rng.random_range(-0.06..0.06)).collect();
        let b: Vec<f64> = (0..nb).map(|_| 0.9 + mu + rng.random_range(-0.1..0.1)).collect();
        let r = welch_t_test(&a, &b).map_err(|e| e.to_string())?;
        let stats = |s: &[f64]| {
            let n = s.len() as f64;
            let mean = s.iter().sum::<f64>() / n;
            (n, mean, s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
        };
        let ((n1, m1, v1), (n2, m2, v2)) = (stats(&a), stats(&b));
        let se2 = v1 / n1 + v2 / n2;
        let t = (m1 - m2) / se2.sqrt();
        let dof = se2 * se2 / ((v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0));
        let p = 2.0 * t_cdf_oracle(-t.abs(), dof);
        worst = worst.max((r.t - t).abs()).max((r.p - p).abs());
    }
    let same = welch_t_test(&[0.9, 0.95, 1.0], &[0.9, 0.95, 1.0]).map_err(|e| e.to_string())?;
    let msg = format!("metric error {metric_err:.1e}; Welch max |t|,|p| error {worst:.1e} over 25 pairs; identical t={} p={}", same.t, same.p);
    check(metric_err <= 1e-12 && worst < 1e-6 && same.t == 0.0 && same.p == 1.0, msg.clone(), msg)
}

fn criterion_10(runs: &[FullRun], workers: &[usize]) -> Outcome {
    let jsons = runs.iter().map(|r| r.as_ref().map(|x| &x.0).map_err(|e| e.clone())).collect::<Result<Vec<_>, _>>()?;
    let same = jsons.windows(2).all(|w| w[0] == w[1]);
    let msg = format!("{} run-all executions (workers {:?}): report.json {} ({} bytes)", jsons.len(), workers, if same { "bit-identical" } else { "differs" }, jsons[0].len());
    check(same, msg.clone(), msg)
}

fn main() {
    let workers = [1, 8, 8];
    let runs: Vec<_> = workers.iter().map(|&w| full_run(w)).collect();
    let results: Vec<(&str, Outcome)> = vec![
        ("synthetic cohort accuracy and scale trend", criterion_1(&runs[0])),
        ("Gauss-Bonnet on fixtures", criterion_2()),
        ("flow convergence up to 5000 vertices", criterion_3()),
        ("Hessian against finite differences", criterion_4()),
        ("embedding isometry", criterion_5()),
        ("packing identity", criterion_6()),
        ("power-center equal powers", criterion_7()),
        ("entropy bounds and cases", criterion_8()),
        ("metrics and Welch oracle", criterion_9()),
        ("run-all determinism", criterion_10(&runs, &workers)),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(m) => println!("PASS {:>2} {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
