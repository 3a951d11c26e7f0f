//! Acceptance suite. Runs without the libtest harness so that every check line
//! and the `criterion N (...): PASS|FAIL` verdicts always reach stdout. Exits
//! nonzero if any criterion fails or panics.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};
use thermo1d::diagnostics::energy_identity_residual;
use thermo1d::experiments::{
    energy_audit, eps_cauchy, gamma1_admissibility, mms, positivity, rough_data,
    short_time_regularity, stability, time_shift, weak_residual_ladder, MmsConfig, Perturbation,
    Report, RoughTolerances, RunSpec,
};
use thermo1d::init::{InitialData, RoughKind, RoughParams};
use thermo1d::{Exec, Grid, Material, Scheme, SolverConfig};

fn verdict(
    n: usize,
    title: &str,
    reports: &[&dyn Report],
    extra: &[(String, bool)],
    started: Instant,
    budget: Option<Duration>,
) -> bool {
    let mut ok = true;
    for r in reports {
        print!("{}", r.summary());
        ok &= r.passed();
    }
    for (line, pass) in extra {
        println!("[{}] {line}", if *pass { "PASS" } else { "FAIL" });
        ok &= pass;
    }
    let elapsed = started.elapsed();
    if let Some(b) = budget {
        let within = elapsed <= b;
        println!(
            "[{}] runtime {:.2}s ≤ {}s",
            if within { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            b.as_secs()
        );
        ok &= within;
    }
    println!(
        "criterion {n} ({title}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn smooth_spec(n: usize, epsilon: f64, t_end: f64) -> RunSpec {
    let g = Grid::unit(n).unwrap();
    RunSpec::new(
        g,
        Material::identity(),
        SolverConfig::for_grid(&g, epsilon, t_end),
        InitialData::SmoothReference,
    )
}

fn criterion_01_energy_identity() -> bool {
    let t0 = Instant::now();
    let spec = smooth_spec(256, 0.0, 1.0);
    assert_eq!(spec.solver.dt, spec.grid.h() / 2.0);
    let r = energy_audit(&spec, 2, 1e-3, 1.8, Exec::default()).unwrap();
    verdict(
        1,
        "energy identity",
        &[&r],
        &[],
        t0,
        Some(Duration::from_secs(10)),
    )
}

fn criterion_02_eps_dissipation_identity() -> bool {
    let t0 = Instant::now();
    let mut extra = Vec::new();
    for scheme in [Scheme::Imex1, Scheme::Imex2] {
        let base = smooth_spec(256, 1e-2, 1.0);
        let jobs: Vec<usize> = vec![1, 2, 4];
        let res = Exec::default().map(jobs, |k| {
            let mut s = base.clone();
            s.solver.scheme = scheme;
            s.solver.dt /= k as f64;
            let traj = s.run().unwrap();
            let series = energy_identity_residual(&traj);
            (s.solver.dt, series.max_abs() / traj.records[0].energy)
        });
        let (dt0, r0) = res[0];
        extra.push((
            format!("{}: |E(t) - E(0) + ε∫(‖vxx‖² + ‖uxx‖²)| / E(0) = {r0:.3e} ≤ 5e-3 at dt = {dt0:.3e}", scheme.name()),
            r0 <= 5e-3,
        ));
        let dts: Vec<f64> = res.iter().map(|r| r.0).collect();
        let rs: Vec<f64> = res.iter().map(|r| r.1).collect();
        let p = thermo1d::experiments::loglog_slope(&dts, &rs);
        extra.push((
            format!(
                "{}: residual order under dt refinement {p:.3} (target {}, residuals {:.3e} {:.3e} {:.3e})",
                scheme.name(),
                scheme.order(),
                rs[0],
                rs[1],
                rs[2]
            ),
            p >= scheme.order() - 0.2,
        ));
    }
    verdict(2, "eps-dissipation identity", &[], &extra, t0, None)
}

fn criterion_03_positivity() -> bool {
    let t0 = Instant::now();
    let mut reports = Vec::new();
    for eps in [0.0, 1e-2] {
        let spec = smooth_spec(128, eps, 1.0);
        reports.push(positivity(&spec, 10, 100, 6, 0.1, 1e-12, Exec::default()).unwrap());
        reports.push(positivity(&spec, 10, 200, 6, 0.5, 1e-12, Exec::default()).unwrap());
    }
    let refs: Vec<&dyn Report> = reports.iter().map(|r| r as &dyn Report).collect();
    verdict(3, "positivity", &refs, &[], t0, None)
}

fn criterion_04_gamma1_admissibility() -> bool {
    let t0 = Instant::now();
    let g = Grid::unit(256).unwrap();
    let a = gamma1_admissibility(&g, &Material::identity(), 0.5, 1.0, 200, 11).unwrap();
    let b = gamma1_admissibility(&g, &Material::log1p(), 0.5, 1.0, 200, 12).unwrap();
    verdict(4, "Gamma1 admissibility", &[&a, &b], &[], t0, None)
}

fn criterion_05_continuous_dependence() -> bool {
    let t0 = Instant::now();
    let spec = smooth_spec(256, 0.0, 0.5);
    let r = stability(
        &spec,
        Perturbation::theta_only(),
        &[1e-2, 1e-3, 1e-4],
        (0.9, 1.1),
        Exec::default(),
    )
    .unwrap();
    verdict(
        5,
        "continuous dependence",
        &[&r],
        &[],
        t0,
        Some(Duration::from_secs(60)),
    )
}

fn criterion_06_eps_cauchy() -> bool {
    let t0 = Instant::now();
    let spec = smooth_spec(128, 0.0, 1.0);
    let r = eps_cauchy(
        &spec,
        &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
        0.25,
        Exec::default(),
    )
    .unwrap();
    println!(
        "distances {:?}, to limit {:?}",
        r.distances, r.limit_distance
    );
    verdict(6, "eps Cauchy ladder", &[&r], &[], t0, None)
}

fn criterion_07_time_shift() -> bool {
    let t0 = Instant::now();
    let spec = smooth_spec(100, 1e-2, 1.0);
    let r = time_shift(&spec, &[0.01, 0.05, 0.1]).unwrap();
    verdict(7, "time-shift estimate", &[&r], &[], t0, None)
}

fn criterion_08_short_time_regularity() -> bool {
    let t0 = Instant::now();
    let spec = smooth_spec(128, 1e-3, 1.0);
    let r = short_time_regularity(&spec).unwrap();
    println!("tau = {:e}, dt = {:e}, y0 = {}", r.tau.tau, r.dt, r.y0);
    verdict(8, "short-time regularity", &[&r], &[], t0, None)
}

fn criterion_09_rough_data() -> bool {
    let t0 = Instant::now();
    let g = Grid::unit(256).unwrap();
    let data = InitialData::Rough(
        RoughParams::new(RoughKind::StepStrain {
            jump_at: 0.5,
            left_slope: 1.0,
        })
        .theta_base(1.0),
    );
    let spec = RunSpec::new(
        g,
        Material::identity(),
        SolverConfig::for_grid(&g, 0.0, 1.0),
        data,
    );
    let r = rough_data(&spec, 3, RoughTolerances::default(), Exec::default()).unwrap();
    verdict(9, "rough data", &[&r], &[], t0, None)
}

fn criterion_10_mms_convergence() -> bool {
    let t0 = Instant::now();
    let cfgs = vec![
        MmsConfig::new(Material::identity(), 0.0, Scheme::Imex1),
        MmsConfig::new(Material::log1p(), 1e-2, Scheme::Imex1),
        MmsConfig::new(Material::log1p(), 1e-2, Scheme::Imex2),
    ];
    let reports = Exec::default().map(cfgs, |c| mms(&c, 1.9, 0.2, Exec::Sequential).unwrap());
    for r in &reports {
        println!(
            "spatial {:?} temporal {:?}",
            r.spatial_orders, r.temporal_orders
        );
    }
    let refs: Vec<&dyn Report> = reports.iter().map(|r| r as &dyn Report).collect();
    verdict(
        10,
        "MMS convergence",
        &refs,
        &[],
        t0,
        Some(Duration::from_secs(30)),
    )
}

fn criterion_11_weak_form_residuals() -> bool {
    let t0 = Instant::now();
    let spec = smooth_spec(32, 0.0, 0.5);
    let r = weak_residual_ladder(&spec, 3, 10, 7, 1.0, Exec::default()).unwrap();
    verdict(11, "weak-form residuals", &[&r], &[], t0, None)
}

type Criterion = (&'static str, fn() -> bool);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("criterion_01_energy_identity", criterion_01_energy_identity),
        (
            "criterion_02_eps_dissipation_identity",
            criterion_02_eps_dissipation_identity,
        ),
        ("criterion_03_positivity", criterion_03_positivity),
        (
            "criterion_04_gamma1_admissibility",
            criterion_04_gamma1_admissibility,
        ),
        (
            "criterion_05_continuous_dependence",
            criterion_05_continuous_dependence,
        ),
        ("criterion_06_eps_cauchy", criterion_06_eps_cauchy),
        ("criterion_07_time_shift", criterion_07_time_shift),
        (
            "criterion_08_short_time_regularity",
            criterion_08_short_time_regularity,
        ),
        ("criterion_09_rough_data", criterion_09_rough_data),
        ("criterion_10_mms_convergence", criterion_10_mms_convergence),
        (
            "criterion_11_weak_form_residuals",
            criterion_11_weak_form_residuals,
        ),
    ];
    // `cargo test -- <filter>` selects criteria by substring
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        println!("--- {name}");
        let ok = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| {
            println!("{name}: FAIL (panicked)");
            false
        });
        if !ok {
            failed.push(name);
        }
    }
    println!(
        "acceptance: {} of {ran} criteria passed{}",
        ran - failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(", failed: {}", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
