//! Acceptance gate for the solver. Every numerical guarantee the crate
//! advertises is checked end to end: weight algebra, sign admissibility,
//! discrete energy inequalities, convergence orders against an explicit
//! solution and against extrapolated references, equivalence of the two
//! scheme forms, compressed-history accuracy and cost, and stability of
//! the computed solutions under time-step refinement.
//!
//! Each test prints a single line
//! `[acceptance] criterion N: PASS - <measurements>` on success and panics
//! with the matching FAIL line otherwise, so the whole gate reads as ten
//! pass/fail lines under `cargo test --test acceptance -- --nocapture`.

use std::time::Instant;

use cq_subdiff::cq::suites::{coercivity_suite, integrated_bound_suite};
use cq_subdiff::cq::{bdf2_weight_closed_form, check_admissible};
use cq_subdiff::experiments::{
    aitken_study, fit_slope, manufactured_problem, porous_problem, timing_comparison, AitkenConfig,
    TimingConfig, POROUS_DELTA_DEFAULT, POROUS_X0_DEFAULT,
};
use cq_subdiff::fem1d::{interpolate, l2_error, l2_norm};
use cq_subdiff::{
    generate_weights, run, FemCoefVec, FracOrder, HistoryMode, Mesh1D, QuadratureMethod,
    RunOptions, SchemeForm, StoreMode, TimeGrid, WeightKind,
};

fn fo(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

/// L2(0, 1) norm of the difference of two coefficient vectors on one mesh.
fn diff_l2(mesh: &Mesh1D, a: &FemCoefVec, b: &FemCoefVec) -> f64 {
    let d: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x - y)
        .collect();
    l2_norm(mesh, &FemCoefVec::new(d))
}

fn alpha_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn pass(criterion: usize, detail: String) {
    println!("[acceptance] criterion {criterion}: PASS - {detail}");
}

#[track_caller]
fn check(criterion: usize, ok: bool, detail: String) {
    assert!(ok, "[acceptance] criterion {criterion}: FAIL - {detail}");
}

/// Convolution of the derivative and integral weight tables inverts to the
/// Kronecker delta, and the second-order weights match their closed form.
#[test]
fn criterion_01_weight_identities() {
    let started = Instant::now();
    let mut worst_inverse = 0.0f64;
    for &method in &[QuadratureMethod::Bdf1, QuadratureMethod::Bdf2] {
        for &a in &alpha_grid() {
            for &h in &[1.0, 2f64.powi(-6)] {
                let w = generate_weights(method, fo(a), WeightKind::Derivative, h, 500).unwrap();
                let b = generate_weights(method, fo(a), WeightKind::Integral, h, 500).unwrap();
                for m in 0..=500 {
                    let conv: f64 = (0..=m)
                        .map(|i| w.get(i).unwrap() * b.get(m - i).unwrap())
                        .sum();
                    let target = if m == 0 { 1.0 } else { 0.0 };
                    worst_inverse = worst_inverse.max((conv - target).abs());
                }
            }
        }
    }
    check(
        1,
        worst_inverse <= 1e-12,
        format!("convolution-inverse residual {worst_inverse:.2e} exceeds 1e-12"),
    );

    let mut worst_closed = 0.0f64;
    for &a in &alpha_grid() {
        for &h in &[1.0, 2f64.powi(-6)] {
            let series =
                generate_weights(QuadratureMethod::Bdf2, fo(a), WeightKind::Derivative, h, 50)
                    .unwrap();
            for j in 0..=50 {
                let closed = bdf2_weight_closed_form(fo(a), j, h).unwrap();
                let s = series.get(j).unwrap();
                worst_closed = worst_closed.max((closed - s).abs() / s.abs());
            }
        }
    }
    check(
        1,
        worst_closed <= 1e-11,
        format!("closed-form deviation {worst_closed:.2e} exceeds 1e-11"),
    );

    let elapsed = started.elapsed();
    check(
        1,
        elapsed.as_secs_f64() < 5.0,
        format!("took {elapsed:.2?}"),
    );
    pass(
        1,
        format!(
            "inverse residual {worst_inverse:.2e} (m <= 500), closed-form deviation \
             {worst_closed:.2e} (j <= 50), {elapsed:.2?}"
        ),
    );
}

/// The first-order weights keep the required sign pattern for every order;
/// the second-order weights first break it at j = 2 once alpha > 5/8.
#[test]
fn criterion_02_admissibility_map() {
    const N: usize = 10_000;
    for &a in &alpha_grid() {
        let t = generate_weights(
            QuadratureMethod::Bdf1,
            fo(a),
            WeightKind::Derivative,
            1.0,
            N,
        )
        .unwrap();
        let adm = check_admissible(&t);
        check(
            2,
            adm.admissible,
            format!(
                "first-order rule alpha={a}: violation at {:?}",
                adm.first_violation
            ),
        );
    }
    for &a in &[0.65, 0.7, 0.8] {
        let t = generate_weights(
            QuadratureMethod::Bdf2,
            fo(a),
            WeightKind::Derivative,
            1.0,
            N,
        )
        .unwrap();
        let adm = check_admissible(&t);
        check(
            2,
            adm.first_violation == Some(2),
            format!(
                "second-order rule alpha={a}: expected first violation at 2, got {:?}",
                adm.first_violation
            ),
        );
    }
    for &a in &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        let t = generate_weights(
            QuadratureMethod::Bdf2,
            fo(a),
            WeightKind::Derivative,
            1.0,
            N,
        )
        .unwrap();
        let adm = check_admissible(&t);
        check(
            2,
            adm.admissible,
            format!(
                "second-order rule alpha={a}: unexpected violation at {:?}",
                adm.first_violation
            ),
        );
    }
    pass(
        2,
        format!(
            "first-order rule sign-admissible to N={N} on the whole order grid; \
             second-order rule breaks exactly at j=2 for alpha in {{0.65, 0.7, 0.8}} \
             and never below 5/8"
        ),
    );
}

/// Randomized coercivity and integrated-bound suites run clean.
#[test]
fn criterion_03_inequality_suites() {
    let started = Instant::now();
    let coercive = coercivity_suite(0x5EED_0001, 1000).unwrap();
    check(
        3,
        coercive.passed(),
        format!(
            "coercivity suite: {}/{} failures, first {:?}",
            coercive.failures, coercive.samples, coercive.first_failure
        ),
    );
    let integrated = integrated_bound_suite(0x5EED_0002, 1000).unwrap();
    check(
        3,
        integrated.passed(),
        format!(
            "integrated-bound suite: {}/{} failures, first {:?}",
            integrated.failures, integrated.samples, integrated.first_failure
        ),
    );
    let elapsed = started.elapsed();
    check(
        3,
        elapsed.as_secs_f64() < 10.0,
        format!("took {elapsed:.2?}"),
    );
    pass(
        3,
        format!(
            "coercivity {}/1000 failures, integrated bound {}/1000 failures, {elapsed:.2?}",
            coercive.failures, integrated.failures
        ),
    );
}

/// Least-squares slope of log(err) against log(h).
fn lsq_order(points: &[(f64, f64)]) -> f64 {
    fit_slope(points).expect("enough points above roundoff for a fit")
}

/// Final-time convergence on the problem with a known solution: fitted
/// order near one, with a wider window for small fractional orders where
/// the predicted rate drops to alpha + 1/2. The error is measured against
/// the interpolant of the exact solution: on this fine mesh the nodal
/// values of the elliptic projection superconverge, so the temporal error
/// stays visible below the plain interpolation floor of the mesh.
#[test]
fn criterion_04_manufactured_convergence_at_final_time() {
    let started = Instant::now();
    let mut summary = Vec::new();
    for &method in &[QuadratureMethod::Bdf1, QuadratureMethod::Bdf2] {
        for &a in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let spec = manufactured_problem(fo(a));
            let mesh = spec.mesh(99).unwrap();
            let exact_t1 = interpolate(&mesh, &|x| spec.exact(x, 1.0).unwrap());
            let mut points = Vec::new();
            for &steps in &[32usize, 64, 128, 256, 512] {
                let grid = TimeGrid::new(1.0, steps).unwrap();
                let opts = RunOptions {
                    method,
                    allow_nonadmissible: true,
                    store: StoreMode::FinalOnly,
                    ..RunOptions::default()
                };
                let traj = run(&spec, &mesh, grid, &opts).unwrap();
                points.push((grid.h(), diff_l2(&mesh, traj.final_state(), &exact_t1)));
            }
            let order = lsq_order(&points);
            let window = if a < 0.5 { (0.55, 1.15) } else { (0.85, 1.15) };
            check(
                4,
                (window.0..=window.1).contains(&order),
                format!(
                    "{method} alpha={a}: fitted order {order:.3} outside [{}, {}]",
                    window.0, window.1
                ),
            );
            summary.push(format!("{method}/{a}:{order:.2}"));
        }
    }
    let elapsed = started.elapsed();
    check(
        4,
        elapsed.as_secs_f64() < 120.0,
        format!("took {elapsed:.2?}"),
    );
    pass(
        4,
        format!(
            "orders at T over N=2^5..2^9 {{{}}}, {elapsed:.2?}",
            summary.join(", ")
        ),
    );
}

/// First-step convergence on a deliberately coarse spatial mesh: the
/// fitted order at t_1 sits between alpha/2 and alpha for both rules.
/// A single step at time step h is a one-shot linear solve, so the fit
/// can afford steps small enough that the quadrature weight h^{-alpha}
/// dominates the stiffness spectrum; at larger steps the first-step error
/// is still preasymptotic for small alpha.
#[test]
fn criterion_05_first_step_order() {
    let started = Instant::now();
    let mut summary = Vec::new();
    for &method in &[QuadratureMethod::Bdf1, QuadratureMethod::Bdf2] {
        for &a in &[0.3, 0.5, 0.7] {
            let spec = manufactured_problem(fo(a));
            let mesh = spec.mesh(39).unwrap();
            let mut points = Vec::new();
            for p in 12..=16 {
                let h = 2f64.powi(-p);
                let grid = TimeGrid::new(h, 1).unwrap();
                let opts = RunOptions {
                    method,
                    allow_nonadmissible: true,
                    store: StoreMode::FinalOnly,
                    ..RunOptions::default()
                };
                let traj = run(&spec, &mesh, grid, &opts).unwrap();
                let err = l2_error(&mesh, traj.final_state(), &|x| spec.exact(x, h).unwrap());
                points.push((h, err));
            }
            let order = lsq_order(&points);
            let (lo, hi) = (a / 2.0 - 0.1, a + 0.2);
            check(
                5,
                (lo..=hi).contains(&order),
                format!(
                    "{method} alpha={a}: fitted first-step order {order:.3} outside \
                     [{lo:.2}, {hi:.2}]"
                ),
            );
            summary.push(format!("{method}/{a}:{order:.2}"));
        }
    }
    let elapsed = started.elapsed();
    pass(
        5,
        format!(
            "orders at t1 over h=2^-12..2^-16 {{{}}}, {elapsed:.2?}",
            summary.join(", ")
        ),
    );
}

/// Extrapolated orders on the localized-source problem match the reference
/// table within 0.2 for both rules across the whole order grid.
///
/// Known deviation: the reference table's first-order cell at alpha = 0.1
/// reads 0.77, yet every computation here lands at 1.00 regardless of mesh
/// size, source width, source position, base step, or history backend, and
/// the reference's own second-order cell at the same alpha reads 0.99.
/// The 0.77 cell is not reproducible from the stated extrapolation formula;
/// the assertion is kept faithful to the table, so this test documents the
/// discrepancy by failing on exactly that cell.
#[test]
fn criterion_06_extrapolated_orders() {
    let started = Instant::now();
    let reference_euler = [0.77, 0.90, 1.06, 1.08, 0.93, 0.93, 1.03, 0.93, 1.11];
    let reference_bdf2 = [0.99, 0.97, 0.95, 0.91, 0.87, 0.92, 0.97, 0.92, 0.87];
    let report = aitken_study(&AitkenConfig::default()).unwrap();
    let mut worst = 0.0f64;
    let mut cells = Vec::new();
    let mut violations = Vec::new();
    for (idx, &a) in alpha_grid().iter().enumerate() {
        for (method, reference) in [
            (QuadratureMethod::Bdf1, reference_euler[idx]),
            (QuadratureMethod::Bdf2, reference_bdf2[idx]),
        ] {
            let order = match report.order(method, a) {
                Some(p) => p,
                None => {
                    check(6, false, format!("{method} alpha={a}: no estimated order"));
                    unreachable!()
                }
            };
            let dev = (order - reference).abs();
            worst = worst.max(dev);
            cells.push(format!("{method}/{a}:{order:.2} (ref {reference})"));
            if dev > 0.2 {
                violations.push(format!(
                    "{method} alpha={a}: estimated {order:.3} vs reference {reference} \
                     (deviation {dev:.3})"
                ));
            }
        }
    }
    let elapsed = started.elapsed();
    check(
        6,
        elapsed.as_secs_f64() < 300.0,
        format!("took {elapsed:.2?}"),
    );
    check(
        6,
        violations.is_empty(),
        format!(
            "{} of 18 cells deviate by more than 0.2: [{}]; full table [{}]",
            violations.len(),
            violations.join("; "),
            cells.join(", ")
        ),
    );
    pass(
        6,
        format!("18/18 cells within 0.2 of the reference table (worst {worst:.3}), {elapsed:.2?}"),
    );
}

/// The velocity form and the direct form of the first-order scheme compute
/// the same trajectory up to linear-solver roundoff.
#[test]
fn criterion_07_velocity_direct_equivalence() {
    let mut worst = 0.0f64;
    for &a in &[0.3, 0.5, 0.7] {
        let spec = manufactured_problem(fo(a));
        let mesh = spec.mesh(40).unwrap();
        for &steps in &[64usize, 512] {
            let grid = TimeGrid::new(1.0, steps).unwrap();
            let mut opts = RunOptions::new(QuadratureMethod::Bdf1);
            opts.form = SchemeForm::Velocity;
            let velocity = run(&spec, &mesh, grid, &opts).unwrap();
            opts.form = SchemeForm::Direct;
            let direct = run(&spec, &mesh, grid, &opts).unwrap();
            for n in 1..=steps {
                let yv = velocity.state(n).unwrap().values();
                let yd = direct.state(n).unwrap().values();
                let scale = yd.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
                let diff = yv
                    .iter()
                    .zip(yd)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                worst = worst.max(diff / scale);
            }
        }
    }
    check(
        7,
        worst <= 1e-10,
        format!("step-wise relative discrepancy {worst:.2e} exceeds 1e-10"),
    );
    pass(
        7,
        format!("max step-wise relative discrepancy {worst:.2e} over N in {{64, 512}}"),
    );
}

/// The compressed history evaluator stays within its advertised tolerance
/// at N = 2^12 and its auxiliary state count scales like log N log(1/eps).
#[test]
fn criterion_08_compressed_history_accuracy_and_size() {
    let epsilon = 1e-8;
    let alpha = 0.5;
    let spec = porous_problem(fo(alpha), POROUS_X0_DEFAULT, POROUS_DELTA_DEFAULT).unwrap();
    let mesh = spec.mesh(40).unwrap();
    let steps = 1 << 12;
    let grid = TimeGrid::new(1.0, steps).unwrap();
    let mut opts = RunOptions::new(QuadratureMethod::Bdf1);
    opts.form = SchemeForm::Velocity;
    opts.store = StoreMode::FinalOnly;
    let naive = run(&spec, &mesh, grid, &opts).unwrap();
    opts.history = HistoryMode::Fast { epsilon, n0: 5 };
    let fast = run(&spec, &mesh, grid, &opts).unwrap();
    let deviation = diff_l2(&mesh, naive.final_state(), fast.final_state());
    let bound = 10.0 * epsilon * naive.max_l2_norm();
    check(
        8,
        deviation <= bound,
        format!("final-time deviation {deviation:.2e} exceeds {bound:.2e}"),
    );

    let mut cs = Vec::new();
    for &n in &[1usize << 10, 1 << 12, 1 << 14] {
        let h = 1.0 / n as f64;
        let table = generate_weights(
            QuadratureMethod::Bdf1,
            fo(1.0 - alpha),
            WeightKind::Integral,
            h,
            n,
        )
        .unwrap();
        let hist = cq_subdiff::FastHistory::new(&table, 1, n, epsilon, 5).unwrap();
        let c = hist.state_count() as f64 / ((n as f64).ln() * (1.0 / epsilon).ln());
        cs.push((n, hist.state_count(), c));
    }
    let mean = cs.iter().map(|&(_, _, c)| c).sum::<f64>() / cs.len() as f64;
    for &(n, q, c) in &cs {
        check(
            8,
            (c - mean).abs() <= 0.3 * mean,
            format!("aux-state coefficient at N={n} is {c:.3} (Q={q}), mean {mean:.3}"),
        );
    }
    let sizes: Vec<String> = cs
        .iter()
        .map(|&(n, q, c)| format!("N={n}:Q={q},c={c:.2}"))
        .collect();
    pass(
        8,
        format!(
            "final deviation {deviation:.2e} <= {bound:.2e} at N=4096; aux states {{{}}} \
             within 30% of mean",
            sizes.join(", ")
        ),
    );
}

/// The compressed evaluator buys a real speed-up: mean whole-run ratio of
/// at least 1.3 at N = 2^9, growing (weakly) with the step count.
#[test]
fn criterion_09_timing_ratio() {
    let summary = timing_comparison(&TimingConfig::default()).unwrap();
    check(
        9,
        summary.reps >= 20,
        format!("only {} repetitions", summary.reps),
    );
    check(
        9,
        summary.whole_ratio_mean >= 1.3,
        format!(
            "naive/fast whole-run ratio {:.3} +/- {:.3} below 1.3 at N=512",
            summary.whole_ratio_mean, summary.whole_ratio_sd
        ),
    );
    let mut ratios = Vec::new();
    for &steps in &[1usize << 8, 1 << 10, 1 << 12] {
        let s = timing_comparison(&TimingConfig {
            steps,
            reps: 12,
            ..TimingConfig::default()
        })
        .unwrap();
        ratios.push((steps, s.whole_ratio_mean));
    }
    for w in ratios.windows(2) {
        check(
            9,
            w[1].1 >= w[0].1,
            format!(
                "ratio decreased from {:.3} at N={} to {:.3} at N={}",
                w[0].1, w[0].0, w[1].1, w[1].0
            ),
        );
    }
    let sweep: Vec<String> = ratios
        .iter()
        .map(|&(n, r)| format!("N={n}:{r:.2}"))
        .collect();
    pass(
        9,
        format!(
            "ratio {:.2} +/- {:.2} at N=512 over {} reps; nondecreasing sweep {{{}}}",
            summary.whole_ratio_mean,
            summary.whole_ratio_sd,
            summary.reps,
            sweep.join(", ")
        ),
    );
}

/// Computed solutions of the localized-source problem are stable under
/// time-step refinement: the peak norm moves by less than one percent.
#[test]
fn criterion_10_stability_under_refinement() {
    let mut summary = Vec::new();
    for &a in &[0.3, 0.5, 0.7] {
        let spec = porous_problem(fo(a), POROUS_X0_DEFAULT, POROUS_DELTA_DEFAULT).unwrap();
        let mesh = spec.mesh(40).unwrap();
        let mut opts = RunOptions::new(QuadratureMethod::Bdf1);
        opts.store = StoreMode::FinalOnly;
        let coarse = run(&spec, &mesh, TimeGrid::new(1.0, 1 << 8).unwrap(), &opts).unwrap();
        let fine = run(&spec, &mesh, TimeGrid::new(1.0, 1 << 10).unwrap(), &opts).unwrap();
        let rel = (coarse.max_l2_norm() - fine.max_l2_norm()).abs() / fine.max_l2_norm();
        check(
            10,
            rel < 0.01,
            format!(
                "alpha={a}: peak norm moved {:.3}% between N=256 and N=1024",
                100.0 * rel
            ),
        );
        summary.push(format!("alpha={a}:{:.4}%", 100.0 * rel));
    }
    pass(
        10,
        format!(
            "peak-norm drift {{{}}} between N=256 and N=1024",
            summary.join(", ")
        ),
    );
}
