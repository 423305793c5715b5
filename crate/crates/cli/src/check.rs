//! `check <kind> <file>`: oracle comparisons on a scenario.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use bsd_kuramoto_core::domains::{boundary_rank, bs_deviation, DomainKind};
use bsd_kuramoto_core::dynamics::{integrate_ensemble, integrate_lift, Method};
use bsd_kuramoto_core::flows::classic_kuramoto_rhs;
use bsd_kuramoto_core::groups::{exp_group, lie_element, mobius, GeneratorSpec, GroupElement, GroupSpec};
use bsd_kuramoto_core::sampling::{complex_gaussian, rng_from_seed, skew_hermitian, SeededRng};

use crate::scenario::{Prepared, Scenario};
use crate::threads::{map_indexed, worker_count};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    /// Group lift against direct integration.
    Lift,
    /// Scalar model against the classic phase equations.
    Reduction,
    /// Boundary class under random group transports and along the run.
    Rank,
    /// BS-boundary deviation along the run.
    Tangency,
}

impl CheckKind {
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckKind::Lift => 1e-6,
            CheckKind::Reduction => 1e-8,
            CheckKind::Rank => 1e-8,
            CheckKind::Tangency => 1e-9,
        }
    }

    fn name(self) -> &'static str {
        match self {
            CheckKind::Lift => "lift",
            CheckKind::Reduction => "reduction",
            CheckKind::Rank => "rank",
            CheckKind::Tangency => "tangency",
        }
    }
}

/// Largest discrepancy with the oscillator and time where it occurred.
#[derive(Clone, Copy, Debug, Default)]
struct Worst {
    value: f64,
    index: usize,
    time: f64,
}

impl Worst {
    fn update(&mut self, value: f64, index: usize, time: f64) {
        if value > self.value || value.is_nan() {
            *self = Worst { value, index, time };
        }
    }
}

fn config(field: &str, message: &str) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

pub fn check(kind: CheckKind, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let p = Scenario::load(path)?;
    let tol = p
        .scenario
        .checks
        .as_ref()
        .and_then(|c| c.tolerance)
        .unwrap_or(kind.default_tolerance());
    match kind {
        CheckKind::Lift => discrepancy_check(kind, lift(&p)?, tol, out),
        CheckKind::Reduction => discrepancy_check(kind, reduction(&p)?, tol, out),
        CheckKind::Tangency => discrepancy_check(kind, tangency(&p)?, tol, out),
        CheckKind::Rank => rank(&p, tol, out),
    }
}

fn discrepancy_check(kind: CheckKind, w: Worst, tol: f64, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(
        out,
        "{}: max discrepancy {:.3e} at t = {}, oscillator {} (tolerance {:e})",
        kind.name(),
        w.value,
        w.time,
        w.index,
        tol
    )?;
    if w.value <= tol {
        writeln!(out, "{}: ok", kind.name())?;
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "{} check failed: discrepancy {:.3e} exceeds {:e} for oscillator {} at t = {}",
            kind.name(),
            w.value,
            tol,
            w.index,
            w.time
        )))
    }
}

fn lift(p: &Prepared) -> Result<Worst, CliError> {
    if p.config.method != Method::Rk4 {
        return Err(config("integration.method", "the lift check integrates with rk4"));
    }
    let direct = integrate_ensemble(&p.model, &p.init, &p.config)?;
    let (_, lifted) = integrate_lift(&p.model, &p.init, &p.config)?;
    let mut worst = Worst::default();
    for (a, b) in direct.snapshots.iter().zip(&lifted.snapshots) {
        for (k, (x, y)) in a.oscillators.iter().zip(&b.oscillators).enumerate() {
            worst.update((x - y).frobenius_norm(), k, a.time);
        }
    }
    Ok(worst)
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

fn rk4_phases(theta: &mut [f64], h: f64, omega: f64, kappa: f64) {
    let f = |th: &[f64]| classic_kuramoto_rhs(th, omega, kappa);
    let add = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let k1 = f(theta);
    let k2 = f(&add(theta, &k1, h / 2.0));
    let k3 = f(&add(theta, &k2, h / 2.0));
    let k4 = f(&add(theta, &k3, h));
    for i in 0..theta.len() {
        theta[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn reduction(p: &Prepared) -> Result<Worst, CliError> {
    let member = p.member();
    if member.kind() != DomainKind::TypeI || member.m() != 1 || member.n() != 1 {
        return Err(config("model.domain", "the reduction check needs a scalar (1,1) model"));
    }
    if !p.boundary_run {
        return Err(config("init", "the reduction check needs oscillators on the unit circle"));
    }
    let drift = p.model.drift();
    let omega = (drift.a()[(0, 0)] - drift.d()[(0, 0)]).im;
    let kappa = p.model.coupling();
    let traj = integrate_ensemble(&p.model, &p.init, &p.config)?;

    let mut theta = p.init.phases();
    let mut t = 0.0;
    let mut worst = Worst::default();
    for snap in &traj.snapshots {
        let span = snap.time - t;
        if span > 0.0 {
            let steps = (span / p.config.dt - 1e-9).ceil().max(1.0) as usize;
            for _ in 0..steps {
                rk4_phases(&mut theta, span / steps as f64, omega, kappa);
            }
            t = snap.time;
        }
        for (k, (got, want)) in snap.phases().iter().zip(&theta).enumerate() {
            worst.update(wrap(got - want).abs(), k, snap.time);
        }
    }
    Ok(worst)
}

fn tangency(p: &Prepared) -> Result<Worst, CliError> {
    if !p.boundary_run {
        return Err(config("init", "the tangency check needs oscillators on the BS boundary"));
    }
    let member = p.member();
    let traj = integrate_ensemble(&p.model, &p.init, &p.config)?;
    let mut worst = Worst::default();
    for snap in &traj.snapshots {
        for (k, z) in snap.oscillators.iter().enumerate() {
            worst.update(bs_deviation(&member, z)?, k, snap.time);
        }
    }
    Ok(worst)
}

/// Random group element `exp(X)` with `X` drawn at the given scale.
pub fn random_group_element(spec: GroupSpec, scale: f64, rng: &mut SeededRng) -> Result<GroupElement, CliError> {
    let (m, n) = (spec.m(), spec.n());
    let a = skew_hermitian(m, scale, rng);
    let g = complex_gaussian(m, n, rng).scale_real(scale);
    let (b, d) = match spec.domain().kind() {
        DomainKind::TypeI => (g, Some(skew_hermitian(n, scale, rng))),
        DomainKind::TypeII => (g.antisymmetrize(), None),
        DomainKind::TypeIII => (g.symmetrize(), None),
    };
    let x = lie_element(&spec, &GeneratorSpec::new(spec, a, b, d)?)?;
    Ok(exp_group(&spec, &x, 1e-10)?)
}

/// First rank violation for one transport, as `(oscillator, before, after)`.
type RankViolation = Option<(usize, usize, String)>;

fn rank(p: &Prepared, tol: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let member = p.member();
    let group = GroupSpec::for_domain(&member);
    let checks = p.scenario.checks.clone().unwrap_or_default();
    let count = checks.transports.unwrap_or(100);
    let seed = checks.seed.unwrap_or(0);
    let workers = worker_count()?;

    let before = p
        .init
        .oscillators
        .iter()
        .map(|z| boundary_rank(&member, z, tol).map(|c| c.t()))
        .collect::<Result<Vec<_>, _>>()?;

    let results: Vec<Result<RankViolation, CliError>> = map_indexed(count, workers, |k| {
        let mut rng = rng_from_seed(seed.wrapping_add(k as u64));
        let h = random_group_element(group, 0.5, &mut rng)?;
        for (i, z) in p.init.oscillators.iter().enumerate() {
            let after = mobius(&h, z, p.config.tolerances.numeric).and_then(|w| boundary_rank(&member, &w, tol));
            match after {
                Ok(c) if c.t() == before[i] => {}
                Ok(c) => return Ok(Some((i, before[i], c.t().to_string()))),
                Err(e) => return Ok(Some((i, before[i], e.to_string()))),
            }
        }
        Ok(None)
    });
    let mut transport_violations = 0;
    let mut first = None;
    for (k, r) in results.into_iter().enumerate() {
        if let Some(v) = r? {
            transport_violations += 1;
            first.get_or_insert((k, v));
        }
    }
    writeln!(
        out,
        "rank: {transport_violations} violations under {count} random transports of {} oscillators",
        before.len()
    )?;

    let traj = integrate_ensemble(&p.model, &p.init, &p.config)?;
    let reference = &traj.monitors[0].observables.ranks;
    let mut run_violation = None;
    'outer: for (t, m) in traj.times.iter().zip(&traj.monitors) {
        for (i, (&r, &r0)) in m.observables.ranks.iter().zip(reference).enumerate() {
            if r != r0 {
                run_violation = Some((i, *t, r0, r));
                break 'outer;
            }
        }
    }
    writeln!(
        out,
        "rank: {} along the run ({} monitor times)",
        if run_violation.is_some() { "changed" } else { "constant" },
        traj.times.len()
    )?;

    if let Some((k, (i, r0, after))) = first {
        return Err(CliError::CheckFailed(format!(
            "rank check failed: oscillator {i} at t = {} has rank {r0} but {after} after transport {k}",
            p.init.time
        )));
    }
    if let Some((i, t, r0, r)) = run_violation {
        return Err(CliError::CheckFailed(format!(
            "rank check failed: oscillator {i} changed rank {r0} -> {r} at t = {t}"
        )));
    }
    writeln!(out, "rank: ok")?;
    Ok(())
}
