//! Acceptance suite. Each criterion prints one PASS/FAIL line with its measured figure and
//! wall time; the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bsd_kuramoto_core::cxmat::CMat;
use bsd_kuramoto_core::domains::{
    bs_deviation, boundary_rank, dims, embed_component, family_chain, sample_bs_boundary_with,
    sample_interior_with, DomainKind, DomainSpec,
};
use bsd_kuramoto_core::dynamics::{integrate_ensemble, integrate_lift, IntegrationConfig};
use bsd_kuramoto_core::flows::{
    coupled_rhs, disc_circle_rhs, mean_field, scalar_drift, EnsembleState, ModelSpec, ScalarMode, ScalarRhs,
};
use bsd_kuramoto_core::groups::{exp_group, lie_element, mobius, vector_field, GeneratorSpec, GroupSpec};
use bsd_kuramoto_core::observables::{order_parameter, pairwise_spread};
use bsd_kuramoto_core::sampling::{complex_gaussian, haar_unitary, rng_from_seed, skew_hermitian, SeededRng};
use num_complex::Complex64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI { y + 2.0 * PI } else { y }
}

fn rk4_scalar(theta: &mut [f64], dt: f64, steps: usize, f: &dyn Fn(&[f64]) -> Vec<f64>) {
    let add = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    for _ in 0..steps {
        let k1 = f(theta);
        let k2 = f(&add(theta, &k1, dt / 2.0));
        let k3 = f(&add(theta, &k2, dt / 2.0));
        let k4 = f(&add(theta, &k3, dt));
        for i in 0..theta.len() {
            theta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

fn random_generator(spec: GroupSpec, scale: f64, rng: &mut SeededRng) -> GeneratorSpec {
    let (m, n) = (spec.m(), spec.n());
    let a = skew_hermitian(m, scale, rng);
    let g = complex_gaussian(m, n, rng).scale_real(scale);
    let (b, d) = match spec.domain().kind() {
        DomainKind::TypeI => (g, Some(skew_hermitian(n, scale, rng))),
        DomainKind::TypeII => (g.antisymmetrize(), None),
        DomainKind::TypeIII => (g.symmetrize(), None),
    };
    GeneratorSpec::new(spec, a, b, d).expect("random generator")
}

fn random_drift(spec: GroupSpec, scale: f64, rng: &mut SeededRng) -> GeneratorSpec {
    let (m, n) = (spec.m(), spec.n());
    let a = skew_hermitian(m, scale, rng);
    let d = match spec.domain().kind() {
        DomainKind::TypeI => Some(skew_hermitian(n, scale, rng)),
        _ => None,
    };
    GeneratorSpec::drift(spec, a, d).expect("random drift")
}

fn boundary_ensemble(spec: &DomainSpec, n: usize, rng: &mut SeededRng) -> EnsembleState {
    EnsembleState::new((0..n).map(|_| sample_bs_boundary_with(spec, rng)).collect(), 0.0)
}

// 1. Scalar reduction to the classic system.
fn classic_reduction() -> Outcome {
    let d = DomainSpec::type_i(1, 1).unwrap();
    let mut rng = rng_from_seed(101);
    let theta0: Vec<f64> = (0..10).map(|_| rng.random_range(-PI..PI)).collect();
    let (dt, t_end, kappa) = (1e-3, 10.0, 1.0);
    let mut worst = 0.0_f64;
    for omega in [0.0, 1.0] {
        let model = ModelSpec::new(d, 0, kappa, scalar_drift(omega)).unwrap();
        let cfg = IntegrationConfig::rk4(dt, t_end).with_monitor_every(0);
        let traj = integrate_ensemble(&model, &EnsembleState::from_phases(&theta0), &cfg).unwrap();
        let got = traj.last().unwrap().phases();

        let n = theta0.len() as f64;
        let rhs = |th: &[f64]| -> Vec<f64> {
            th.iter()
                .map(|&ti| omega + 2.0 * kappa / n * th.iter().map(|&tj| (tj - ti).sin()).sum::<f64>())
                .collect()
        };
        let mut theta = theta0.clone();
        rk4_scalar(&mut theta, dt, 10_000, &rhs);
        for (g, w) in got.iter().zip(&theta) {
            worst = worst.max(wrap(g - w).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max phase discrepancy {worst:.3e} (limit 1e-8)"))
}

// 2. Finite differences of the group action against the vector field.
fn algebra_group_consistency() -> Outcome {
    let domains = [
        DomainSpec::type_i(3, 2).unwrap(),
        DomainSpec::type_ii(4).unwrap(),
        DomainSpec::type_iii(3).unwrap(),
    ];
    let mut rng = rng_from_seed(202);
    let (e1, e2) = (1e-4, 5e-5);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in domains {
        let spec = GroupSpec::for_domain(&d);
        for _ in 0..50 {
            let gen = random_generator(spec, 1.0, &mut rng);
            let x = lie_element(&spec, &gen).unwrap();
            let z = sample_interior_with(&d, &mut rng).scale_real(0.8);
            let v = vector_field(&spec, &gen, &z).unwrap();
            let err = |eps: f64| {
                let h = exp_group(&spec, &x.scale_real(eps), 1e-10).unwrap();
                let w = mobius(&h, &z, 1e-12).unwrap();
                (&(&w - &z).scale_real(1.0 / eps) - &v).frobenius_norm()
            };
            let order = (err(e1) / err(e2)).log2();
            lo = lo.min(order);
            hi = hi.max(order);
        }
    }
    outcome(
        lo >= 0.9 && hi <= 1.1,
        format!("observed order in [{lo:.4}, {hi:.4}] over 150 samples (limit 1.0 ± 0.1)"),
    )
}

// 3. Group lift against direct integration.
fn lift_equivalence() -> Outcome {
    let d = DomainSpec::type_i(2, 2).unwrap();
    let spec = GroupSpec::for_domain(&d);
    let mut rng = rng_from_seed(303);
    let drift = random_drift(spec, 1.0, &mut rng);
    let model = ModelSpec::new(d, 0, 1.0, drift).unwrap();
    let init = boundary_ensemble(&d, 5, &mut rng);
    let cfg = IntegrationConfig::rk4(1e-4, 1.0).with_monitor_every(1000);
    let direct = integrate_ensemble(&model, &init, &cfg).unwrap();
    let (_, lifted) = integrate_lift(&model, &init, &cfg).unwrap();
    let mut worst = 0.0_f64;
    for (a, b) in direct.snapshots.iter().zip(&lifted.snapshots) {
        assert_eq!(a.time, b.time);
        for (x, y) in a.oscillators.iter().zip(&b.oscillators) {
            worst = worst.max((x - y).frobenius_norm());
        }
    }
    let compared = direct.snapshots.len().min(lifted.snapshots.len());
    outcome(
        worst <= 1e-6 && compared == 11,
        format!("max Frobenius discrepancy {worst:.3e} over {compared} times (limit 1e-6)"),
    )
}

// 4. BS-boundary tangency with and without retraction.
fn bs_tangency() -> Outcome {
    let cases = [
        (DomainSpec::type_i(3, 2).unwrap(), 8),
        (DomainSpec::type_ii(4).unwrap(), 6),
        (DomainSpec::type_iii(3).unwrap(), 6),
    ];
    let mut rng = rng_from_seed(404);
    let (mut with_r, mut without_r) = (0.0_f64, 0.0_f64);
    for (d, n) in cases {
        let drift = random_drift(GroupSpec::for_domain(&d), 1.0, &mut rng);
        let model = ModelSpec::new(d, 0, 1.0, drift).unwrap();
        let init = boundary_ensemble(&d, n, &mut rng);
        let cfg = IntegrationConfig::rk4(1e-3, 5.0).with_monitor_every(10);
        let traj = integrate_ensemble(&model, &init, &cfg).unwrap();
        with_r = with_r.max(traj.max_tangency_drift());
        let cfg = IntegrationConfig::rk4(1e-3, 1.0).with_retract_every(0).with_monitor_every(0);
        let traj = integrate_ensemble(&model, &init, &cfg).unwrap();
        for z in &traj.last().unwrap().oscillators {
            without_r = without_r.max(bs_deviation(&d, z).unwrap());
        }
    }
    outcome(
        with_r <= 1e-9 && without_r <= 1e-6,
        format!("retracted drift {with_r:.3e} (limit 1e-9), unretracted at T=1 {without_r:.3e} (limit 1e-6)"),
    )
}

/// A point of boundary class `t`: a canonical representative moved by a random element of the
/// maximal compact subgroup.
fn point_of_rank(d: &DomainSpec, t: usize, rng: &mut SeededRng) -> CMat {
    let residual = match d.reduced(t) {
        Some(r) if t < d.max_boundary_class() || d.kind() != DomainKind::TypeII || t == 0 => {
            let r = if t == 0 { *d } else { r };
            sample_interior_with(&r, rng).scale_real(0.8)
        }
        _ => {
            let k = if d.kind() == DomainKind::TypeII { 2 * t } else { t };
            CMat::zeros(d.m() - k, d.n() - k)
        }
    };
    let canonical = if t == 0 { residual } else { embed_component(d, t, &residual) };
    let u = haar_unitary(d.m(), rng);
    match d.kind() {
        DomainKind::TypeI => u.matmul(&canonical).matmul(&haar_unitary(d.n(), rng)),
        DomainKind::TypeII => u.matmul(&canonical).matmul(&u.transpose()).antisymmetrize(),
        DomainKind::TypeIII => u.matmul(&canonical).matmul(&u.transpose()).symmetrize(),
    }
}

// 5. Witt invariance of the boundary class.
fn witt_rank_invariance() -> Outcome {
    let domains = [
        DomainSpec::type_i(3, 2).unwrap(),
        DomainSpec::type_i(2, 2).unwrap(),
        DomainSpec::type_ii(4).unwrap(),
        DomainSpec::type_ii(5).unwrap(),
        DomainSpec::type_iii(3).unwrap(),
    ];
    let mut rng = rng_from_seed(505);
    let (mut checked, mut violations) = (0usize, 0usize);
    for d in domains {
        let spec = GroupSpec::for_domain(&d);
        for t in 0..=d.max_boundary_class() {
            let z = point_of_rank(&d, t, &mut rng);
            assert_eq!(boundary_rank(&d, &z, 1e-8).unwrap().t(), t, "{d} t={t}");
            for _ in 0..100 {
                let x = lie_element(&spec, &random_generator(spec, 0.5, &mut rng)).unwrap();
                let h = exp_group(&spec, &x, 1e-10).unwrap();
                let w = mobius(&h, &z, 1e-12).unwrap();
                checked += 1;
                if boundary_rank(&d, &w, 1e-8).map(|c| c.t()) != Ok(t) {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations in {checked} transports"))
}

// 6. Symmetry closure of the right-hand side and the mean field.
fn symmetry_closure() -> Outcome {
    let mut rng = rng_from_seed(606);
    let (mut rhs_dev, mut field_dev) = (0.0_f64, 0.0_f64);
    for i in 0..1000 {
        let n = 2 + i % 4;
        let d = if i % 2 == 0 { DomainSpec::type_ii(n).unwrap() } else { DomainSpec::type_iii(n).unwrap() };
        let drift = random_drift(GroupSpec::for_domain(&d), 1.0, &mut rng);
        let kappa = rng.random_range(-2.0..2.0);
        let model = ModelSpec::new(d, 0, kappa, drift).unwrap();
        let size = rng.random_range(1..6);
        let ens = if i % 3 == 0 {
            EnsembleState::new((0..size).map(|_| sample_interior_with(&d, &mut rng)).collect(), 0.0)
        } else {
            boundary_ensemble(&d, size, &mut rng)
        };
        let sym = |z: &CMat| match d.kind() {
            DomainKind::TypeII => (z + &z.transpose()).max_abs(),
            _ => (z - &z.transpose()).max_abs(),
        };
        for v in coupled_rhs(&model, &ens).unwrap() {
            rhs_dev = rhs_dev.max(sym(&v));
        }
        field_dev = field_dev.max(sym(&mean_field(&ens, kappa).unwrap().z));
    }
    outcome(
        rhs_dev <= 1e-13 && field_dev == 0.0,
        format!("rhs deviation {rhs_dev:.3e} (limit 1e-13), mean-field deviation {field_dev:.1e} (exact)"),
    )
}

// 7. Type II n = 2 against circle dynamics.
fn type_ii_circle() -> Outcome {
    let d = DomainSpec::type_ii(2).unwrap();
    let spec = GroupSpec::for_domain(&d);
    let mut rng = rng_from_seed(707);
    let drift = random_drift(spec, 1.0, &mut rng);
    let a_half = drift.a().trace() * 0.5;
    let kappa = 1.0;
    let model = ModelSpec::new(d, 0, kappa, drift).unwrap();
    let theta0: Vec<f64> = (0..6).map(|_| rng.random_range(-PI..PI)).collect();
    let j = CMat::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
    let init = EnsembleState::new(theta0.iter().map(|&t| j.scale(Complex64::from_polar(1.0, t))).collect(), 0.0);
    let (dt, t_end) = (1e-3, 10.0);
    let traj = integrate_ensemble(&model, &init, &IntegrationConfig::rk4(dt, t_end).with_monitor_every(0)).unwrap();

    let rhs = |th: &[f64]| -> Vec<f64> {
        let b: Complex64 = th.iter().map(|&t| Complex64::from_polar(1.0, t)).sum::<Complex64>() * (kappa / th.len() as f64);
        th.iter()
            .map(|&t| match disc_circle_rhs(Complex64::from_polar(1.0, t), a_half, b, ScalarMode::Circle, 1e-12) {
                Ok(ScalarRhs::Circle(v)) => v,
                other => panic!("{other:?}"),
            })
            .collect()
    };
    let mut theta = theta0.clone();
    rk4_scalar(&mut theta, dt, 10_000, &rhs);
    let mut worst = 0.0_f64;
    for (z, t) in traj.last().unwrap().oscillators.iter().zip(&theta) {
        worst = worst.max((z[(0, 1)] - Complex64::from_polar(1.0, *t)).norm());
        worst = worst.max((z[(0, 1)] + z[(1, 0)]).norm());
    }
    outcome(worst <= 1e-8, format!("max discrepancy {worst:.3e} (limit 1e-8)"))
}

// 8. Fourth-order convergence.
fn integrator_order() -> Outcome {
    let d = DomainSpec::type_i(2, 1).unwrap();
    let mut rng = rng_from_seed(808);
    let drift = random_drift(GroupSpec::for_domain(&d), 1.0, &mut rng);
    let model = ModelSpec::new(d, 0, 1.0, drift).unwrap();
    let init = boundary_ensemble(&d, 4, &mut rng);
    let run = |dt: f64| {
        let cfg = IntegrationConfig::rk4(dt, 1.0).with_retract_every(0).with_monitor_every(0);
        integrate_ensemble(&model, &init, &cfg).unwrap().last().unwrap().clone()
    };
    let dt = 0.1;
    let reference = run(dt / 16.0);
    let err = |s: &EnsembleState| {
        s.oscillators
            .iter()
            .zip(&reference.oscillators)
            .map(|(a, b)| (a - b).frobenius_norm())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(&run(dt)), err(&run(dt / 2.0)));
    let ratio = e1 / e2;
    outcome(
        (12.0..=20.0).contains(&ratio),
        format!("error ratio {ratio:.3} (errors {e1:.3e}, {e2:.3e}; limit [12, 20])"),
    )
}

// 9. Synchronization at desk scale.
fn synchronization_smoke() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for d in [DomainSpec::type_i(2, 2).unwrap(), DomainSpec::type_i(2, 1).unwrap()] {
        let model = ModelSpec::without_drift(d, 0, 1.0).unwrap();
        let mut synced = 0;
        for seed in 0..10 {
            let mut rng = rng_from_seed(900 + seed);
            let init = boundary_ensemble(&d, 20, &mut rng);
            let cfg = IntegrationConfig::rk4(1e-2, 50.0).with_monitor_every(0);
            let end = integrate_ensemble(&model, &init, &cfg).unwrap();
            let last = end.last().unwrap();
            let r = order_parameter(&d, last, 1e-8).unwrap();
            if r > 0.99 && pairwise_spread(last) < 1e-2 {
                synced += 1;
            }
        }
        pass &= synced >= 9;
        details.push(format!("{d}: {synced}/10"));
    }
    outcome(pass, format!("seeds with r > 0.99 and spread < 1e-2: {} (need 9/10)", details.join(", ")))
}

// 10. Dimension table.
fn dimension_table() -> Outcome {
    let mut failures = Vec::new();
    let u2 = DomainSpec::type_i(2, 2).unwrap();
    if dims(&u2).bs != 4 || family_chain(&u2).len() != 2 {
        failures.push("D^I_{2,2}".to_string());
    }
    for m in 1..=6 {
        for n in 1..=m {
            let d = DomainSpec::type_i(m, n).unwrap();
            // appendix rows list complex dimensions
            if dims(&d).domain_real != 2 * m * n || dims(&d).bs != n * (2 * m - n) {
                failures.push(d.to_string());
            }
        }
    }
    for n in 2..=8 {
        let d = DomainSpec::type_ii(n).unwrap();
        if dims(&d).domain_real != 2 * (n * (n - 1) / 2) || dims(&d).bs != n * (n - 1) / 2 {
            failures.push(d.to_string());
        }
    }
    for n in 1..=8 {
        let d = DomainSpec::type_iii(n).unwrap();
        if dims(&d).domain_real != 2 * (n * (n + 1) / 2) || dims(&d).bs != n * (n + 1) / 2 {
            failures.push(d.to_string());
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() { "all rows exact".to_string() } else { format!("mismatch: {}", failures.join(", ")) },
    )
}

/// Name, check and runtime limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("classic reduction", classic_reduction, 1),
        ("algebra/group consistency", algebra_group_consistency, 5),
        ("group-lift equivalence", lift_equivalence, 30),
        ("BS tangency", bs_tangency, 60),
        ("Witt rank invariance", witt_rank_invariance, 10),
        ("symmetry closure", symmetry_closure, 5),
        ("type II n=2 circle equivalence", type_ii_circle, 1),
        ("integrator order", integrator_order, 10),
        ("synchronization smoke", synchronization_smoke, 120),
        ("dimension table", dimension_table, 1),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let in_time = elapsed <= Duration::from_secs(*limit);
        let ok = pass && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<32} {}  {}; {:.2} s (limit {} s)",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            limit
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
