//! Acceptance suite: one PASS/FAIL line per check, non-zero exit if any fail.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schedrisk::{analyze, compute, write_artifacts, Format, RunConfig};
use schedrisk_core::metrics::{
    criticality_index, cruciality_kendall, cruciality_pearson, cruciality_spearman,
    significance_index,
};
use schedrisk_core::scheduler::{forward_pass, DurationVector, DEFAULT_FLOAT_EPS};
use schedrisk_core::stats::{kendall_tau_a, pair_counts, PairCounts};
use schedrisk_core::{
    ari, planned_schedule, rank_activities, run_batch, srb_curve, Activity, ControlGrid,
    Determinize, DurationDistribution, MetricSelection, ProjectNetwork, RiskError, Scaling,
    SimulationConfig,
};

struct Suite {
    failed: usize,
    total: usize,
}

impl Suite {
    fn check(&mut self, criterion: u32, name: &str, ok: bool, detail: impl AsRef<str>) {
        self.total += 1;
        if !ok {
            self.failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} [{criterion}] {name}: {}", detail.as_ref());
    }
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .join("project.json")
}

/// Ids ordered best rank first; ids sharing a rank are grouped in file order.
fn order_of(ids: &[String], ranks: &[usize]) -> String {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by_key(|&i| (ranks[i], i));
    idx.iter()
        .map(|&i| format!("{}({})", ids[i], ranks[i]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn strict_order(ids: &[String], ranks: &[usize], expected: &[&str]) -> bool {
    expected.iter().enumerate().all(|(pos, id)| {
        let i = ids.iter().position(|x| x == id).expect("known id");
        ranks[i] == pos + 1
    })
}

fn case_study(s: &mut Suite) {
    let config = RunConfig::new(example("case-study"));
    let start = Instant::now();
    let analysis = compute(&config).expect("case study analyzes");
    let elapsed = start.elapsed();
    let metrics = analysis.metrics.as_ref().expect("metrics");
    let report = analysis.ari.as_ref().expect("ari");
    let ids = metrics.ids.clone();
    let tie = config.tie_eps;

    let ari_norm: Vec<f64> = report.activities.iter().map(|e| e.ari_normalized).collect();
    let ranks = rank_activities(&ari_norm, tie);
    s.check(
        1,
        "ARI ranking A4 > A3 > A5 > A2 > A1",
        strict_order(&ids, &ranks, &["A4", "A3", "A5", "A2", "A1"]),
        order_of(&ids, &ranks),
    );

    let ssi = metrics.ssi.as_ref().unwrap();
    let ranks = rank_activities(ssi, tie);
    s.check(
        1,
        "SSI ranking A3 > A4 > A5 > A1 > A2",
        strict_order(&ids, &ranks, &["A3", "A4", "A5", "A1", "A2"]),
        format!("{} values {ssi:.5?}", order_of(&ids, &ranks)),
    );

    let cri = metrics.cri_pearson.as_ref().unwrap();
    let ranks = rank_activities(cri, tie);
    s.check(
        1,
        "CrI(Pearson) ranking A3 > A4 > A5 > A1 > A2",
        strict_order(&ids, &ranks, &["A3", "A4", "A5", "A1", "A2"]),
        format!("{} values {cri:.5?}", order_of(&ids, &ranks)),
    );

    let ci = metrics.ci.as_ref().unwrap();
    let ends_exact = ci[0] == 1.0 && ci[4] == 1.0;
    let middle = ci[1..4].iter().all(|c| (0.45..=0.55).contains(c));
    s.check(
        1,
        "CI(A1) = CI(A5) = 1, CI(A2..A4) in [0.45, 0.55]",
        ends_exact && middle,
        format!("{ci:.5?}"),
    );

    let si = metrics.si.as_ref().unwrap();
    let ranks = rank_activities(si, tie);
    let firsts: Vec<&str> = ids
        .iter()
        .zip(&ranks)
        .filter(|(_, r)| **r == 1)
        .map(|(id, _)| id.as_str())
        .collect();
    s.check(
        1,
        "SI rank 1 = {A1, A5}",
        firsts == ["A1", "A5"],
        order_of(&ids, &ranks),
    );

    let moi = metrics.moi.as_ref().unwrap();
    let ranks = rank_activities(moi, tie);
    s.check(
        1,
        "MOI: A3 first, A4 second",
        ranks[2] == 1 && ranks[3] == 2 && ranks.iter().filter(|&&r| r <= 2).count() == 2,
        order_of(&ids, &ranks),
    );

    s.check(
        1,
        "runtime <= 60 s",
        elapsed <= Duration::from_secs(60),
        format!("{:.2} s", elapsed.as_secs_f64()),
    );
}

fn serial_benchmark(s: &mut Suite) {
    let mut config = RunConfig::new(example("serial"));
    config.replications = 100_000;
    config.scaling = Scaling::ProportionalVariance;
    config.metrics = MetricSelection {
        ari: true,
        ..MetricSelection::none()
    };
    let analysis = compute(&config).expect("serial analyzes");
    let report = analysis.ari.as_ref().unwrap();
    let base = &report.curves[0];
    let exact = |t: f64| {
        if t <= 5.0 {
            1.28 - 0.128 * t
        } else {
            0.128 * (10.0 - t)
        }
    };
    let mut worst = 0.0f64;
    let mut ok = true;
    for (t, v) in base.times.iter().zip(&base.values) {
        let e = exact(*t);
        if e == 0.0 {
            ok &= *v == 0.0;
        } else {
            let rel = (v - e).abs() / e;
            worst = worst.max(rel);
            ok &= rel <= 0.05;
        }
    }
    s.check(
        2,
        "SRB_0 within 5% of 1.28 -> 0.64 -> 0",
        ok,
        format!(
            "{} grid points, worst relative error {worst:.4}",
            base.times.len()
        ),
    );
    s.check(
        2,
        "SRV_0 = 6.4 +/- 5%",
        (report.srv_0 - 6.4).abs() <= 0.05 * 6.4,
        format!("{:.5}", report.srv_0),
    );
    let norm: Vec<f64> = report.activities.iter().map(|e| e.ari_normalized).collect();
    s.check(
        2,
        "normalized ARI = (0.25, 0.75) +/- 0.02",
        (norm[0] - 0.25).abs() <= 0.02 && (norm[1] - 0.75).abs() <= 0.02,
        format!("{norm:.5?}"),
    );
}

/// Self-contained exact model of a small network with two-point durations.
struct Oracle {
    /// `(low, high, p_high, predecessors)`
    acts: Vec<(f64, f64, f64, Vec<usize>)>,
}

struct Moments4 {
    mean: f64,
    var: f64,
    m4: f64,
}

impl Moments4 {
    /// Standard error of the unbiased sample variance over `n` draws.
    fn variance_se(&self, n: f64) -> f64 {
        let v = self.m4 / n - self.var * self.var * (n - 3.0) / (n * (n - 1.0));
        v.max(0.0).sqrt()
    }
}

impl Oracle {
    fn paths(&self) -> Vec<Vec<usize>> {
        let n = self.acts.len();
        let succs: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| self.acts[j].3.contains(&i)).collect())
            .collect();
        fn walk(i: usize, succs: &[Vec<usize>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            path.push(i);
            if succs[i].is_empty() {
                out.push(path.clone());
            }
            for &j in &succs[i] {
                walk(j, succs, path, out);
            }
            path.pop();
        }
        let mut out = Vec::new();
        for i in (0..n).filter(|&i| self.acts[i].3.is_empty()) {
            walk(i, &succs, &mut Vec::new(), &mut out);
        }
        out
    }

    fn mean(&self, i: usize) -> f64 {
        let (lo, hi, p, _) = self.acts[i];
        lo + p * (hi - lo)
    }

    /// Every outcome as `(probability, durations)`.
    fn outcomes(&self) -> Vec<(f64, Vec<f64>)> {
        let n = self.acts.len();
        (0..1usize << n)
            .map(|mask| {
                let mut p = 1.0;
                let d = (0..n)
                    .map(|i| {
                        let (lo, hi, ph, _) = self.acts[i];
                        if mask >> i & 1 == 1 {
                            p *= ph;
                            hi
                        } else {
                            p *= 1.0 - ph;
                            lo
                        }
                    })
                    .collect();
                (p, d)
            })
            .collect()
    }

    fn longest(paths: &[Vec<usize>], d: &[f64]) -> f64 {
        paths
            .iter()
            .map(|p| p.iter().map(|&i| d[i]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn longest_through(paths: &[Vec<usize>], d: &[f64], i: usize) -> f64 {
        paths
            .iter()
            .filter(|p| p.contains(&i))
            .map(|p| p.iter().map(|&j| d[j]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Planned start of each activity at mean durations.
    fn planned_starts(&self, paths: &[Vec<usize>]) -> Vec<f64> {
        let m: Vec<f64> = (0..self.acts.len()).map(|i| self.mean(i)).collect();
        (0..self.acts.len())
            .map(|i| {
                paths
                    .iter()
                    .filter_map(|p| {
                        p.iter()
                            .position(|&j| j == i)
                            .map(|k| p[..k].iter().map(|&j| m[j]).sum())
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    fn moments(values: &[(f64, f64)]) -> Moments4 {
        let mean: f64 = values.iter().map(|(p, x)| p * x).sum();
        let var: f64 = values.iter().map(|(p, x)| p * (x - mean).powi(2)).sum();
        let m4: f64 = values.iter().map(|(p, x)| p * (x - mean).powi(4)).sum();
        Moments4 { mean, var, m4 }
    }

    /// Project duration at control time `t` under proportional-sigma
    /// progress, optionally with one activity fixed at its mean.
    fn pd_at(
        &self,
        paths: &[Vec<usize>],
        starts: &[f64],
        d: &[f64],
        t: f64,
        fixed: Option<usize>,
    ) -> f64 {
        let adj: Vec<f64> = (0..self.acts.len())
            .map(|i| {
                let m = self.mean(i);
                let x = if fixed == Some(i) { m } else { d[i] };
                let (es, ef) = (starts[i], starts[i] + m);
                if ef <= t {
                    m
                } else if es < t {
                    let f = (ef - t) / m;
                    (t - es) + f * m + f * (x - m)
                } else {
                    x
                }
            })
            .collect();
        Self::longest(paths, &adj)
    }
}

fn within(s: &mut Suite, name: &str, mc: f64, exact: f64, se: f64) {
    let ok = if se == 0.0 {
        (mc - exact).abs() <= 1e-9
    } else {
        (mc - exact).abs() <= 3.0 * se
    };
    let z = if se == 0.0 { 0.0 } else { (mc - exact) / se };
    s.check(
        3,
        name,
        ok,
        format!("mc {mc:.6} exact {exact:.6} se {se:.2e} z {z:+.2}"),
    );
}

fn exhaustive_oracle(s: &mut Suite) {
    let oracle = Oracle {
        acts: vec![
            (2.0, 4.0, 0.5, vec![]),
            (1.0, 5.0, 0.25, vec![0]),
            (3.0, 5.0, 0.5, vec![0]),
            (2.0, 4.0, 0.5, vec![1]),
        ],
    };
    let names = ["A", "B", "C", "D"];
    let net = ProjectNetwork::new(
        "two-point".to_string(),
        "days".to_string(),
        oracle
            .acts
            .iter()
            .zip(names)
            .map(|((low, high, p_high, preds), id)| {
                let preds: Vec<&str> = preds.iter().map(|&j| names[j]).collect();
                Activity::new(
                    id,
                    DurationDistribution::TwoPoint {
                        low: *low,
                        high: *high,
                        p_high: *p_high,
                    },
                    &preds,
                )
            })
            .collect(),
    )
    .expect("oracle network builds");

    let n_reps = 100_000;
    let nf = n_reps as f64;
    let cfg = SimulationConfig::new(n_reps, 42);
    let paths = oracle.paths();
    let outcomes = oracle.outcomes();

    let pd: Vec<(f64, f64)> = outcomes
        .iter()
        .map(|(p, d)| (*p, Oracle::longest(&paths, d)))
        .collect();
    let pd_m = Oracle::moments(&pd);
    let batch = run_batch(&net, cfg).expect("batch");
    within(
        s,
        "E(PD)",
        batch.project_duration_stats.mean(),
        pd_m.mean,
        (pd_m.var / nf).sqrt(),
    );
    within(
        s,
        "var(PD)",
        batch.project_duration_stats.variance(),
        pd_m.var,
        pd_m.variance_se(nf),
    );

    let ci = criticality_index(&batch, DEFAULT_FLOAT_EPS);
    let si = significance_index(&batch).expect("si");
    for i in 0..names.len() {
        let p: f64 = outcomes
            .iter()
            .filter(|(_, d)| {
                Oracle::longest(&paths, d) - Oracle::longest_through(&paths, d, i) <= 1e-12
            })
            .map(|(p, _)| p)
            .sum();
        within(
            s,
            &format!("CI({})", names[i]),
            ci[i],
            p,
            (p * (1.0 - p) / nf).sqrt(),
        );

        // SI = E[w PD] / E[PD] with w = d / (d + tf); delta-method error.
        let terms: Vec<(f64, f64, f64)> = outcomes
            .iter()
            .map(|(p, d)| {
                let total = Oracle::longest(&paths, d);
                let tf = total - Oracle::longest_through(&paths, d, i);
                (*p, d[i] / (d[i] + tf) * total, total)
            })
            .collect();
        let ey: f64 = terms.iter().map(|(p, y, _)| p * y).sum();
        let exact = ey / pd_m.mean;
        let resid: Vec<(f64, f64)> = terms.iter().map(|(p, y, x)| (*p, y - exact * x)).collect();
        let se = Oracle::moments(&resid).var.sqrt() / nf.sqrt() / pd_m.mean;
        within(s, &format!("SI({})", names[i]), si[i], exact, se);
    }

    let plan = planned_schedule(&net, Determinize::Mean).expect("plan");
    let grid = ControlGrid::new(plan.sac, 1.0).expect("grid");
    let report = ari(&net, &plan, &grid, cfg, Scaling::ProportionalSigma).expect("ari");
    let starts = oracle.planned_starts(&paths);
    let curve = |fixed: Option<usize>| -> Vec<Moments4> {
        grid.points()
            .iter()
            .map(|&t| {
                let v: Vec<(f64, f64)> = outcomes
                    .iter()
                    .map(|(p, d)| (*p, oracle.pd_at(&paths, &starts, d, t, fixed)))
                    .collect();
                Oracle::moments(&v)
            })
            .collect()
    };
    let trapezoid = |c: &[Moments4]| -> f64 {
        let t = grid.points();
        (1..t.len())
            .map(|k| (t[k] - t[k - 1]) * (c[k].var + c[k - 1].var) / 2.0)
            .sum()
    };
    let base = curve(None);
    for (k, t) in grid.points().iter().enumerate() {
        let m = &base[k];
        within(
            s,
            &format!("SRB_0({t})"),
            report.curves[0].values[k],
            m.var,
            m.variance_se(nf),
        );
    }
    let srv_0 = trapezoid(&base);
    for (i, entry) in report.activities.iter().enumerate() {
        let exact = (srv_0 - trapezoid(&curve(Some(i)))) / srv_0;
        within(
            s,
            &format!("ARI raw({})", names[i]),
            entry.ari_raw,
            exact,
            entry.stderr,
        );
    }
}

fn random_distribution(rng: &mut ChaCha8Rng) -> DurationDistribution {
    let mean: f64 = rng.random_range(2.0..10.0);
    let spread = rng.random_range(0.1..2.0);
    match rng.random_range(0..5) {
        0 => DurationDistribution::Deterministic {
            value: mean.round(),
        },
        1 => DurationDistribution::Normal { mean, sd: spread },
        2 => DurationDistribution::Triangular {
            min: mean - spread,
            mode: mean - spread * rng.random_range(-0.9..0.9),
            max: mean + spread,
        },
        3 => DurationDistribution::Uniform {
            min: mean - spread,
            max: mean + spread,
        },
        _ => DurationDistribution::Beta {
            min: mean - spread,
            max: mean + 2.0 * spread,
            alpha: rng.random_range(1.0..4.0),
            beta: rng.random_range(1.0..4.0),
        },
    }
}

fn random_network(
    rng: &mut ChaCha8Rng,
    max_acts: usize,
    dist: impl Fn(&mut ChaCha8Rng) -> DurationDistribution,
) -> ProjectNetwork {
    let n = rng.random_range(1..=max_acts);
    let ids: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
    let acts = (0..n)
        .map(|i| {
            let preds: Vec<&str> = (0..i)
                .filter(|_| rng.random_bool(0.35))
                .map(|j| ids[j].as_str())
                .collect();
            Activity::new(&ids[i], dist(rng), &preds)
        })
        .collect();
    ProjectNetwork::new("random".to_string(), "days".to_string(), acts)
        .expect("random network builds")
}

fn invariants(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = 40;
    let mut bad = [0usize; 6];
    let mut ari_defined = 0;
    let mut inconsistent = Vec::new();
    let mut other_errors = Vec::new();
    for case in 0..cases {
        let net = loop {
            let net = random_network(&mut rng, 8, random_distribution);
            if net
                .activities()
                .iter()
                .any(|a| !a.distribution.is_deterministic())
            {
                break net;
            }
        };
        let cfg = SimulationConfig::new(2000, case);
        let batch = run_batch(&net, cfg).expect("batch");
        let ci = criticality_index(&batch, DEFAULT_FLOAT_EPS);
        let cris = [
            cruciality_pearson(&batch),
            cruciality_spearman(&batch),
            cruciality_kendall(&batch),
        ];
        let unit = |v: &f64| (0.0..=1.0).contains(v);
        if !ci.iter().all(unit) {
            bad[0] += 1;
        }
        if !cris.iter().all(|c| c.iter().all(unit)) {
            bad[1] += 1;
        }
        if !(0..net.len()).all(|i| batch.floats_of(i).iter().all(|&f| f >= 0.0)) {
            bad[2] += 1;
        }
        for (i, a) in net.activities().iter().enumerate() {
            if a.distribution.is_deterministic() && cris.iter().any(|c| c[i] != 0.0) {
                bad[3] += 1;
            }
        }
        let plan = planned_schedule(&net, Determinize::Mean).expect("plan");
        let grid = ControlGrid::with_default_step(plan.sac).expect("grid");
        let small = SimulationConfig::new(1000, case);
        let scenarios =
            std::iter::once(None).chain(net.activities().iter().map(|a| Some(a.id.as_str())));
        for fixed in scenarios {
            let c =
                srb_curve(&net, fixed, &plan, &grid, small, Scaling::default()).expect("srb curve");
            if !(c.values.iter().all(|&v| v >= 0.0) && *c.values.last().unwrap() == 0.0) {
                bad[4] += 1;
            }
        }
        match ari(&net, &plan, &grid, small, Scaling::default()) {
            Ok(r) => {
                ari_defined += 1;
                let sum: f64 = r.activities.iter().map(|e| e.ari_normalized).sum();
                if (sum - 1.0).abs() > 1e-9 {
                    bad[5] += 1;
                }
            }
            Err(RiskError::Inconsistent { activity, raw, .. }) => {
                inconsistent.push(format!("case {case} {activity} raw {raw:.4}"));
            }
            Err(e) => other_errors.push(format!("case {case}: {e}")),
        }
    }
    let detail = |k: usize| format!("{} of {cases} random networks violate", bad[k]);
    s.check(4, "CI in [0, 1]", bad[0] == 0, detail(0));
    s.check(
        4,
        "CrI (Pearson, Spearman, Kendall) in [0, 1]",
        bad[1] == 0,
        detail(1),
    );
    s.check(4, "total floats >= 0", bad[2] == 0, detail(2));
    s.check(
        4,
        "CrI of deterministic activities = 0",
        bad[3] == 0,
        format!("{} violations", bad[3]),
    );
    s.check(
        4,
        "SRB >= 0 and SRB(SAC) = 0",
        bad[4] == 0,
        format!("{} curves violate", bad[4]),
    );
    s.check(
        4,
        "sum of normalized ARI = 1 +/- 1e-9",
        bad[5] == 0 && other_errors.is_empty(),
        format!(
            "{} of {ari_defined} networks with a defined ARI violate; unexpected errors: {:?}",
            bad[5], other_errors
        ),
    );
    // Fixing an activity at its mean can raise var(max) at a merge, so a
    // clearly negative raw index is a real outcome; it is reported, not scored.
    println!(
        "NOTE [4] {} of {cases} networks have a raw ARI below the noise floor (inconsistency error): {}",
        inconsistent.len(),
        inconsistent.join("; ")
    );
}

fn determinism(s: &mut Suite) {
    for format in [Format::Csv, Format::Json] {
        let mut config = RunConfig::new(example("case-study"));
        config.replications = 5000;
        config.format = format;
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| analyze(&config).expect("analyzes").1)
        };
        let reference = run(1);
        let same_run = run(1) == reference;
        let across = [4, 8].iter().all(|&t| run(t) == reference);
        s.check(
            5,
            &format!("{format:?} artifacts identical across runs"),
            same_run,
            "1 worker, twice",
        );
        s.check(
            5,
            &format!("{format:?} artifacts identical across workers"),
            across,
            "1 vs 4 vs 8 workers",
        );

        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for (dir, threads) in dirs.iter().zip([1, 8]) {
            write_artifacts(dir.path(), &run(threads)).unwrap();
        }
        let on_disk = reference.files.iter().all(|(name, _)| {
            std::fs::read(dirs[0].path().join(name)).unwrap()
                == std::fs::read(dirs[1].path().join(name)).unwrap()
        });
        s.check(
            5,
            &format!("{format:?} files byte-identical on disk"),
            on_disk,
            format!("{} files", reference.files.len()),
        );
    }
}

fn kendall(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(2000);
    let mut mismatches = 0;
    for case in 0..200 {
        let n = rng.random_range(2..=2000);
        // Small value ranges on some cases to force heavy ties.
        let levels = if case % 3 == 0 { 5 } else { 1_000_000 };
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let mut c = 0u64;
        let mut d = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                let sign = (xs[i] - xs[j]) * (ys[i] - ys[j]);
                if sign > 0.0 {
                    c += 1;
                } else if sign < 0.0 {
                    d += 1;
                }
            }
        }
        let pairs = (n * (n - 1) / 2) as f64;
        let naive_tau = (c as f64 - d as f64) / pairs;
        let tau_ok = match kendall_tau_a(&xs, &ys) {
            Some(t) => t == naive_tau,
            None => c == 0 && d == 0,
        };
        let counts_ok = pair_counts(&xs, &ys)
            == PairCounts {
                concordant: c,
                discordant: d,
            };
        if !counts_ok || !tau_ok {
            mismatches += 1;
        }
    }
    s.check(
        6,
        "fast Kendall equals naive counting",
        mismatches == 0,
        format!("{mismatches} mismatches in 200 series"),
    );
}

fn cpm_oracle(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut mismatches = 0;
    for _ in 0..500 {
        let net = random_network(&mut rng, 12, |r| DurationDistribution::Deterministic {
            value: r.random_range(0.0..20.0),
        });
        let n = net.len();
        let d: Vec<f64> = net.activities().iter().map(|a| a.mean_duration()).collect();
        let preds: Vec<Vec<usize>> = net
            .activities()
            .iter()
            .map(|a| {
                a.predecessors
                    .iter()
                    .map(|p| net.activities().iter().position(|b| &b.id == p).unwrap())
                    .collect()
            })
            .collect();
        // Every path ending at each activity, summed from the first activity.
        fn best(i: usize, acc: f64, d: &[f64], succs: &[Vec<usize>]) -> f64 {
            let here = acc + d[i];
            succs[i]
                .iter()
                .map(|&j| best(j, here, d, succs))
                .fold(here, f64::max)
        }
        let succs: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| preds[j].contains(&i)).collect())
            .collect();
        let brute = (0..n)
            .filter(|&i| preds[i].is_empty())
            .map(|i| best(i, 0.0, &d, &succs))
            .fold(0.0, f64::max);
        let dv = DurationVector::from_activity_order(&net, &d).unwrap();
        if forward_pass(&net, &dv).unwrap().project_duration != brute {
            mismatches += 1;
        }
    }
    s.check(
        7,
        "CPM makespan equals brute-force longest path",
        mismatches == 0,
        format!("{mismatches} mismatches in 500 networks"),
    );
}

fn main() -> ExitCode {
    let mut s = Suite {
        failed: 0,
        total: 0,
    };
    case_study(&mut s);
    serial_benchmark(&mut s);
    exhaustive_oracle(&mut s);
    invariants(&mut s);
    determinism(&mut s);
    kendall(&mut s);
    cpm_oracle(&mut s);
    println!(
        "acceptance: {} passed, {} failed",
        s.total - s.failed,
        s.failed
    );
    if s.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
