//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Expected values marked as derived below were computed with independent
//! oracles (brute-force dominance scans, two-sided hypervolume differences,
//! Monte Carlo estimation, dense criticality grids) and frozen here.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dfmo::algorithms::{
    dfmo_light, dfmo_strong, SelectionStrategy, SolveOptions, SolveResult, StopReason,
};
use dfmo::criticality::{gamma_max, gamma_min};
use dfmo::directions::make_directions;
use dfmo::hypervolume::{hv_increase, hypervolume, hypervolume_mc, ReferencePoint};
use dfmo::params::{AlgoParams, StoppingRule};
use dfmo::problems::builtin;
use dfmo::types::{DecisionPoint, ObjectiveVector, ParetoList, StepsizeVector};

fn obj(values: &[f64]) -> ObjectiveVector {
    ObjectiveVector::new(values.to_vec()).unwrap()
}

fn pass(number: u32, name: &str) {
    println!("acceptance {number} ({name}): PASS");
}

/// Golden hypervolume values of the appendix worked example.
#[test]
fn acceptance_01_golden_hypervolume_values() {
    let rho = ReferencePoint::from_vector(obj(&[49.0, 25.0 / 18.0]));
    let front = [obj(&[1.0, 0.5])];
    let candidate = obj(&[0.0, 16.0 / 18.0]);

    let started = Instant::now();
    let hv = hypervolume(&front, &rho).unwrap();
    let inc = hv_increase(&front, &candidate, &rho).unwrap();
    let elapsed = started.elapsed();

    assert!(
        (hv - 128.0 / 3.0).abs() <= 1e-12,
        "hypervolume {hv} differs from 128/3"
    );
    assert!((inc - 0.5).abs() <= 1e-12, "increase {inc} differs from 1/2");
    assert!(
        elapsed < Duration::from_millis(1),
        "golden values took {elapsed:?}"
    );
    pass(1, "golden hypervolume values");
}

/// Independent dominance check used by criterion 2: `y` is neither weakly
/// dominated by nor equal to any front member.
fn nondominated_and_distinct(front: &[ObjectiveVector], y: &ObjectiveVector) -> bool {
    front.iter().all(|a| {
        let weakly_dominates = a
            .values()
            .iter()
            .zip(y.values())
            .all(|(ai, yi)| ai <= yi);
        !weakly_dominates && a != y
    })
}

/// Positive hypervolume increase if and only if the candidate is
/// non-dominated by and distinct from every front member.
#[test]
fn acceptance_02_increase_iff_nondominated() {
    let started = Instant::now();
    for q in [2usize, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + q as u64);
        let rho = ReferencePoint::from_vector(obj(&vec![2.0; q]));
        for case in 0..1000 {
            let len = rng.random_range(1..=10);
            let front: Vec<ObjectiveVector> = (0..len)
                .map(|_| obj(&(0..q).map(|_| rng.random::<f64>()).collect::<Vec<_>>()))
                .collect();
            // Mix fresh candidates with exact copies of front members so the
            // "distinct" half of the equivalence is exercised.
            let y = if case % 5 == 0 {
                front[rng.random_range(0..front.len())].clone()
            } else {
                obj(&(0..q).map(|_| rng.random::<f64>()).collect::<Vec<_>>())
            };
            let inc = hv_increase(&front, &y, &rho).unwrap();
            let expected = nondominated_and_distinct(&front, &y);
            assert_eq!(
                inc > 1e-12,
                expected,
                "q={q} case={case}: increase {inc}, nondominated {expected}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    pass(2, "increase iff nondominated");
}

/// Exact hypervolume against the seeded Monte Carlo estimator.
#[test]
fn acceptance_03_exact_vs_monte_carlo() {
    let started = Instant::now();
    for q in [2usize, 3, 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + q as u64);
        let rho = ReferencePoint::from_vector(obj(&vec![2.0; q]));
        let lower = obj(&vec![0.0; q]);
        let mut within = 0;
        let cases = 50;
        for case in 0..cases {
            let len = rng.random_range(1..=10);
            let front: Vec<ObjectiveVector> = (0..len)
                .map(|_| obj(&(0..q).map(|_| rng.random::<f64>()).collect::<Vec<_>>()))
                .collect();
            let exact = hypervolume(&front, &rho).unwrap();
            let estimate =
                hypervolume_mc(&front, &rho, &lower, 1_000_000, 1000 * q as u64 + case).unwrap();
            if (estimate - exact).abs() / exact <= 0.02 {
                within += 1;
            }
        }
        assert!(
            within * 100 >= cases * 95,
            "q={q}: only {within}/{cases} estimates within 2%"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    pass(3, "exact vs monte carlo");
}

/// The twenty seeded full-list runs shared by criteria 4 and 5: ten on the
/// 1-D problem and ten on its 2-D generalization, 35 iterations each, with a
/// reference offset large enough that no clipping occurs.
fn phi_check_runs() -> Vec<(String, AlgoParams, SolveResult)> {
    let mut runs = Vec::new();
    for (name, n) in [("remark_a1", 1usize), ("remark_a1_n2", 2)] {
        for seed in 0..10u64 {
            let r_extra = (seed % 3) as usize;
            let r = 2 * n + r_extra;
            let params = AlgoParams {
                r,
                s: 50.0,
                seed,
                stop: StoppingRule {
                    max_iters: Some(35),
                    max_evals: None,
                    delta_tol: None,
                },
                ..AlgoParams::default()
            };
            let x0: Vec<f64> = (0..n)
                .map(|j| 0.5 + 0.35 * seed as f64 + 0.2 * j as f64)
                .collect();
            let starts = vec![(
                DecisionPoint::new(x0).unwrap(),
                StepsizeVector::uniform(r, 1.0).unwrap(),
            )];
            let directions = make_directions(n, r_extra, seed).unwrap();
            let mut problem = builtin(name).unwrap();
            let result = dfmo_strong(
                &mut problem,
                &starts,
                &directions,
                &params,
                &SolveOptions::default(),
            )
            .unwrap();
            assert!(
                result.trace.len() >= 31,
                "{name} seed {seed}: only {} iterations",
                result.trace.len() - 1
            );
            assert_eq!(
                result.clip_events, 0,
                "{name} seed {seed}: reference point clipped"
            );
            runs.push((format!("{name}/seed{seed}"), params, result));
        }
    }
    runs
}

/// Sufficient decrease of the cost function at every iteration.
#[test]
fn acceptance_04_phi_sufficient_decrease() {
    let q = 2;
    let mut violations = 0;
    for (label, params, result) in phi_check_runs() {
        let tilde_c = params.tilde_c(q);
        for pair in result.trace.windows(2) {
            let bound = -tilde_c * pair[1].delta_bar.powi(2 * q as i32);
            let diff = pair[1].phi_delta - pair[0].phi_delta;
            if diff > bound + 1e-10 {
                violations += 1;
                eprintln!("{label} k={}: phi diff {diff} > bound {bound}", pair[1].k);
            }
        }
    }
    assert_eq!(violations, 0);
    pass(4, "phi sufficient decrease");
}

/// Sufficient hypervolume increase on successful iterations, with the
/// case split on whether the maximum stepsize grew.
#[test]
fn acceptance_05_hypervolume_sufficient_increase() {
    let q = 2;
    let mut violations = 0;
    for (label, params, result) in phi_check_runs() {
        for pair in result.trace.windows(2) {
            if !pair[1].success {
                continue;
            }
            let delta = pair[1].delta_bar;
            let bound = if delta > pair[0].delta_bar {
                (params.gamma * delta * delta).powi(q as i32)
            } else {
                (params.gamma * params.c * params.c * delta * delta).powi(q as i32)
            };
            let gain = pair[1].hi - pair[0].hi;
            if gain < bound - 1e-10 {
                violations += 1;
                eprintln!("{label} k={}: gain {gain} < bound {bound}", pair[1].k);
            }
        }
    }
    assert_eq!(violations, 0);
    pass(5, "hypervolume sufficient increase");
}

fn convergence_params() -> AlgoParams {
    AlgoParams {
        r: 2,
        stop: StoppingRule {
            max_iters: None,
            max_evals: Some(100_000),
            delta_tol: Some(1e-3),
        },
        ..AlgoParams::default()
    }
}

fn convergence_starts() -> Vec<(DecisionPoint, StepsizeVector)> {
    vec![(
        DecisionPoint::new(vec![1.0]).unwrap(),
        StepsizeVector::uniform(2, 1.0).unwrap(),
    )]
}

/// Convergence to the known Pareto set of the 1-D problem under all three
/// solver variants.
#[test]
fn acceptance_06_convergence_to_known_pareto_set() {
    let directions = make_directions(1, 0, 0).unwrap();
    let params = convergence_params();

    let started = Instant::now();
    let mut problem = builtin("remark_a1").unwrap();
    let strong = dfmo_strong(
        &mut problem,
        &convergence_starts(),
        &directions,
        &params,
        &SolveOptions::default(),
    )
    .unwrap();
    let strong_elapsed = started.elapsed();
    assert!(
        strong_elapsed < Duration::from_secs(30),
        "strong run took {strong_elapsed:?}"
    );
    let check_containment = |list: &ParetoList, label: &str| {
        for entry in list.entries() {
            let x = entry.point.coords()[0];
            assert!(
                (-0.01..=4.01).contains(&x),
                "{label}: point {x} outside the Pareto interval"
            );
        }
    };
    check_containment(&strong.final_list, "strong");
    let mut fresh = builtin("remark_a1").unwrap();
    let gamma = gamma_max(&strong.final_list, &mut fresh, 1e-5).unwrap();
    assert!(gamma <= 5e-2, "strong: Gamma = {gamma}");

    let max_run = dfmo_light(
        &mut builtin("remark_a1").unwrap(),
        &convergence_starts(),
        &directions,
        &params,
        &SelectionStrategy::MaxMaxStep,
        &SolveOptions::default(),
    )
    .unwrap();
    check_containment(&max_run.final_list, "max");
    let gamma = gamma_max(&max_run.final_list, &mut fresh, 1e-5).unwrap();
    assert!(gamma <= 5e-2, "max: Gamma = {gamma}");

    let min_run = dfmo_light(
        &mut builtin("remark_a1").unwrap(),
        &convergence_starts(),
        &directions,
        &params,
        &SelectionStrategy::MinMaxStep,
        &SolveOptions::default(),
    )
    .unwrap();
    let gamma_bar = gamma_min(&min_run.final_list, &mut fresh, 1e-5).unwrap();
    assert!(gamma_bar <= 5e-2, "min: GammaBar = {gamma_bar}");

    pass(6, "convergence to known Pareto set");
}

/// An all-fail iteration multiplies every stepsize component by exactly
/// theta and leaves the point set unchanged.
#[test]
fn acceptance_07_failure_branch_exactness() {
    let mut problem = builtin("remark_a1").unwrap();
    let directions = make_directions(1, 0, 0).unwrap();
    // gamma near one swallows the whole objective range, so every trial is
    // rejected; uniform steps keep the floor below every component.
    let params = AlgoParams {
        gamma: 0.99,
        eta: 0.5,
        r: 2,
        stop: StoppingRule {
            max_iters: Some(1),
            max_evals: None,
            delta_tol: None,
        },
        ..AlgoParams::default()
    };
    let alpha0 = 10.0;
    let starts = vec![
        (
            DecisionPoint::new(vec![1.0]).unwrap(),
            StepsizeVector::uniform(2, alpha0).unwrap(),
        ),
        (
            DecisionPoint::new(vec![3.5]).unwrap(),
            StepsizeVector::uniform(2, alpha0).unwrap(),
        ),
    ];
    let result = dfmo_strong(
        &mut problem,
        &starts,
        &directions,
        &params,
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(!result.trace[1].success, "iteration unexpectedly succeeded");
    assert_eq!(result.final_list.len(), 2, "point set changed");
    for entry in result.final_list.entries() {
        for alpha in entry.steps.alphas() {
            assert_eq!(
                *alpha,
                params.theta * alpha0,
                "stepsize not scaled by exactly theta"
            );
        }
    }
    pass(7, "failure branch exactness");
}

/// Selection strategies pick the insertion-order-first entry attaining the
/// extreme maximum stepsize, verified against a linear scan.
#[test]
fn acceptance_08_selection_correctness() {
    use dfmo::types::{EntryId, ListEntry};
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    for case in 0..1000 {
        let len = rng.random_range(1..=30usize);
        // Objectives on an anti-diagonal are mutually non-dominated;
        // quantized steps make ties frequent.
        let entries: Vec<ListEntry> = (0..len)
            .map(|i| {
                let f1 = i as f64;
                let steps: Vec<f64> = (0..3)
                    .map(|_| 0.1 * rng.random_range(1..=10) as f64)
                    .collect();
                ListEntry::new(
                    DecisionPoint::new(vec![f1]).unwrap(),
                    obj(&[f1, len as f64 - f1]),
                    StepsizeVector::new(steps).unwrap(),
                    EntryId(i as u64),
                    None,
                    0,
                )
            })
            .collect();
        let list = ParetoList::try_new(entries).unwrap();

        // Linear-scan oracle: first index attaining the extreme.
        let max_steps: Vec<f64> = list.entries().iter().map(|e| e.max_step()).collect();
        let xi = max_steps.iter().cloned().fold(f64::INFINITY, f64::min);
        let delta_bar = max_steps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first_min = max_steps.iter().position(|&v| v == xi).unwrap();
        let first_max = max_steps.iter().position(|&v| v == delta_bar).unwrap();

        let k = rng.random_range(0..100u64);
        assert_eq!(
            SelectionStrategy::MinMaxStep.select(&list, k),
            first_min,
            "case {case}: min selection"
        );
        assert_eq!(
            SelectionStrategy::MaxMaxStep.select(&list, k),
            first_max,
            "case {case}: max selection"
        );
    }
    pass(8, "selection correctness");
}

/// Iterations to drive the worst criticality below epsilon stay finite and
/// scale tamely with 1/epsilon.
#[test]
fn acceptance_09_empirical_complexity_trend() {
    let started = Instant::now();
    let mut problem = builtin("remark_a1").unwrap();
    let directions = make_directions(1, 0, 0).unwrap();
    // A slow expansion from a non-critical start makes the worst criticality
    // decay over several iterations rather than in one jump.
    let params = AlgoParams {
        r: 2,
        delta: 0.9,
        s: 50.0,
        stop: StoppingRule {
            max_iters: Some(30),
            max_evals: Some(100_000),
            delta_tol: None,
        },
        ..AlgoParams::default()
    };
    let starts = vec![(
        DecisionPoint::new(vec![6.0]).unwrap(),
        StepsizeVector::uniform(2, 0.02).unwrap(),
    )];
    let options = SolveOptions {
        trace_criticality: true,
        ..SolveOptions::default()
    };
    let result = dfmo_strong(&mut problem, &starts, &directions, &params, &options).unwrap();

    let epsilons = [1e-1, 3e-2, 1e-2];
    let mut points = Vec::new();
    for eps in epsilons {
        let k = result
            .trace
            .iter()
            .find(|r| r.gamma_max.expect("criticality recorded") <= eps)
            .map(|r| r.k)
            .unwrap_or_else(|| panic!("criticality never reached {eps}"));
        assert!(k >= 1, "start already below {eps}");
        points.push(((1.0 / eps).ln(), (k as f64).ln()));
    }
    // Least-squares slope of ln(iterations) against ln(1/eps).
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let num: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let den: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let slope = num / den;
    assert!(slope <= 5.0, "log-log slope {slope} exceeds 2q+1 = 5");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    pass(9, "empirical complexity trend");
}

/// Byte-identical outputs for equal config and seed, and the external
/// protocol path matching the built-in objective.
#[test]
fn acceptance_10_determinism_and_protocol() {
    use std::process::Command;

    // (a) Two CLI runs with the same configuration produce identical bytes.
    let bin = env!("CARGO_BIN_EXE_dfmo");
    let args = [
        "run",
        "--problem",
        "remark_a1_n2",
        "--algo",
        "light",
        "--strategy",
        "min",
        "--r-extra",
        "2",
        "--seed",
        "13",
        "--max-iters",
        "40",
        "--trace-criticality",
        "--out",
        "out",
    ];
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for dir in &dirs {
        let status = Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for file in ["trace.csv", "front.csv", "lineage.csv", "run.json"] {
        let a = std::fs::read(dirs[0].path().join("out").join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join("out").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }

    // (b) The problem served over the line protocol matches the built-in.
    let mut external = dfmo::problems::external_blackbox(
        &format!("{bin} serve --problem remark_a1"),
        1,
        2,
        Some(Duration::from_secs(20)),
    )
    .unwrap();
    let mut native = builtin("remark_a1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    use dfmo::oracle::Objective;
    for _ in 0..100 {
        let x = DecisionPoint::new(vec![rng.random::<f64>() * 24.0 - 10.0]).unwrap();
        let via_protocol = external.eval(&x).unwrap();
        let direct = native.eval(&x).unwrap();
        for (a, b) in via_protocol.values().iter().zip(direct.values()) {
            assert!(
                (a - b).abs() <= 1e-15,
                "protocol value {a} differs from built-in {b}"
            );
        }
    }
    pass(10, "determinism and protocol");
}
