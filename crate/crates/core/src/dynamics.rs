//! Time integration of the coupled ensemble and of the group lift.
//!
//! Boundary runs use classical RK4 on the product of `N` matrix spaces followed by a polar
//! retraction back onto the BS boundary. The retraction keeps the (anti)symmetry of types II
//! and III exact. Interior runs may use the adaptive Dormand-Prince pair instead. Everything is
//! sequential, so a run is a pure function of its inputs.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cxmat::{partial_isometry_factor, polar_unitary_factor, CMat};
use crate::domains::{bs_deviation, contains_interior, on_bs_boundary, structure_check, DomainKind, DomainSpec};
use crate::error::{Error, Result};
use crate::flows::{coupled_rhs, group_lift_rhs, mean_field, transport, EnsembleState, ModelSpec};
use crate::groups::GroupElement;
use crate::observables::ObservableRecord;

/// Largest Frobenius distance from the BS boundary that [`retract_state`] accepts.
pub const RETRACT_RADIUS: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Rk45Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Initial-state BS membership and structure checks.
    pub boundary: f64,
    /// Zero-eigenvalue threshold for the rank monitor.
    pub rank: f64,
    /// Singularity thresholds inside retraction and Möbius evaluation.
    pub numeric: f64,
    /// Group drift of the lift, relative to `‖h‖_F²`.
    pub membership: f64,
    /// Adaptive step control.
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary: 1e-8,
            rank: 1e-8,
            numeric: 1e-12,
            membership: 1e-8,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    /// Retract after every this many steps; `0` disables retraction.
    pub retract_every: usize,
    /// Record a monitor every this many steps; `0` records the endpoints only.
    pub monitor_every: usize,
    pub tolerances: Tolerances,
}

impl IntegrationConfig {
    /// RK4 with retraction after every step and a monitor every step.
    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            method: Method::Rk4,
            retract_every: 1,
            monitor_every: 1,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_retract_every(mut self, k: usize) -> Self {
        self.retract_every = k;
        self
    }

    pub fn with_monitor_every(mut self, k: usize) -> Self {
        self.monitor_every = k;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be positive"));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidConfig("t_end must be positive"));
        }
        let t = &self.tolerances;
        if [t.boundary, t.rank, t.numeric, t.membership, t.rtol, t.atol]
            .iter()
            .any(|x| !(x.is_finite() && *x > 0.0))
        {
            return Err(Error::InvalidConfig("tolerances must be positive"));
        }
        Ok(())
    }

    /// Fixed-step grid: `round(t_end/dt)` steps if that is exact to rounding, otherwise one
    /// more with a shortened last step.
    fn step_count(&self) -> usize {
        let q = self.t_end / self.dt;
        let r = q.round();
        if (q - r).abs() <= 1e-9 * q.max(1.0) {
            (r as usize).max(1)
        } else {
            q.ceil() as usize
        }
    }

    fn grid_time(&self, k: usize, steps: usize) -> f64 {
        if k == steps {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }
}

/// Invariant monitor at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Monitor {
    /// Largest BS-boundary deviation over the ensemble; NaN for interior runs.
    pub max_tangency_drift: f64,
    pub observables: ObservableRecord,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<EnsembleState>,
    pub monitors: Vec<Monitor>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&EnsembleState> {
        self.snapshots.last()
    }

    /// Largest tangency drift over all monitors.
    pub fn max_tangency_drift(&self) -> f64 {
        self.monitors
            .iter()
            .map(|m| m.max_tangency_drift)
            .fold(f64::NAN, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RunKind {
    Boundary,
    Interior,
}

fn classify_initial(spec: &DomainSpec, init: &EnsembleState, tol: f64) -> Result<RunKind> {
    if init.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut kind = None;
    for z in &init.oscillators {
        z.ensure_shape(spec.m(), spec.n())?;
        if !structure_check(spec, z, tol)? {
            return Err(Error::InvalidInitialState("oscillator violates the domain symmetry"));
        }
        let this = if on_bs_boundary(spec, z, tol)? {
            RunKind::Boundary
        } else if contains_interior(spec, z, tol)? {
            RunKind::Interior
        } else {
            return Err(Error::InvalidInitialState(
                "oscillator is neither interior nor on the BS boundary",
            ));
        };
        match kind {
            None => kind = Some(this),
            Some(k) if k != this => {
                return Err(Error::InvalidInitialState(
                    "oscillators must be all interior or all on the BS boundary",
                ))
            }
            _ => {}
        }
    }
    Ok(kind.expect("non-empty"))
}

fn monitor(spec: &DomainSpec, ens: &EnsembleState, kappa: f64, run: RunKind, tol: &Tolerances) -> Result<Monitor> {
    let max_tangency_drift = match run {
        RunKind::Interior => f64::NAN,
        RunKind::Boundary => {
            let mut worst = 0.0_f64;
            for z in &ens.oscillators {
                worst = worst.max(bs_deviation(spec, z)?);
            }
            worst
        }
    };
    Ok(Monitor {
        max_tangency_drift,
        observables: ObservableRecord::compute(spec, ens, kappa, tol.rank)?,
    })
}

fn check_divergence(spec: &DomainSpec, ens: &EnsembleState) -> Result<()> {
    let limit = 10.0 * (spec.n() as f64).sqrt();
    for (index, z) in ens.oscillators.iter().enumerate() {
        let norm = z.frobenius_norm();
        if norm.is_nan() || norm > limit {
            return Err(Error::DivergenceDetected {
                time: ens.time,
                index,
                norm,
            });
        }
    }
    Ok(())
}

/// `y + Σ c_i k_i`, entrywise over the ensemble.
fn combine(y: &[CMat], terms: &[(f64, &[CMat])]) -> Vec<CMat> {
    y.iter()
        .enumerate()
        .map(|(i, yi)| {
            let mut out = yi.clone();
            for (c, k) in terms {
                if *c != 0.0 {
                    out.axpy(crate::cxmat::c64(*c, 0.0), &k[i]);
                }
            }
            out
        })
        .collect()
}

fn rk4_step<F>(f: &F, y: &[CMat], h: f64) -> Result<Vec<CMat>>
where
    F: Fn(&[CMat]) -> Result<Vec<CMat>>,
{
    let k1 = f(y)?;
    let k2 = f(&combine(y, &[(h / 2.0, &k1)]))?;
    let k3 = f(&combine(y, &[(h / 2.0, &k2)]))?;
    let k4 = f(&combine(y, &[(h, &k3)]))?;
    Ok(combine(
        y,
        &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)],
    ))
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step: the fifth-order solution and the scaled RMS error estimate.
fn dp_step<F>(f: &F, y: &[CMat], h: f64, tol: &Tolerances) -> Result<(Vec<CMat>, f64)>
where
    F: Fn(&[CMat]) -> Result<Vec<CMat>>,
{
    debug_assert_eq!(DP_C.len(), DP_A.len());
    let mut ks: Vec<Vec<CMat>> = Vec::with_capacity(7);
    for row in DP_A.iter() {
        let terms: Vec<(f64, &[CMat])> = (0..ks.len()).map(|j| (h * row[j], ks[j].as_slice())).collect();
        let ys = combine(y, &terms);
        ks.push(f(&ys)?);
    }
    let terms5: Vec<(f64, &[CMat])> = (0..7).map(|j| (h * DP_B5[j], ks[j].as_slice())).collect();
    let y5 = combine(y, &terms5);
    let mut acc = 0.0;
    let mut count = 0usize;
    for (i, (y0, y1)) in y.iter().zip(&y5).enumerate() {
        for e in 0..y0.as_slice().len() {
            let mut err = crate::cxmat::c64(0.0, 0.0);
            for j in 0..7 {
                err += ks[j][i].as_slice()[e] * (h * (DP_B5[j] - DP_B4[j]));
            }
            let scale = tol.atol + tol.rtol * y0.as_slice()[e].norm().max(y1.as_slice()[e].norm());
            acc += (err.norm() / scale).powi(2);
            count += 1;
        }
    }
    Ok((y5, (acc / count.max(1) as f64).sqrt()))
}

/// Replaces each oscillator by its nearest structured BS-boundary point.
///
/// Type I: polar factor. Type III: symmetrize, then polar factor. Type II: antisymmetrize,
/// then polar factor (even `n`) or the rank `n - 1` partial isometry (odd `n`). The result is
/// re-(anti)symmetrized so the structure holds exactly.
pub fn retract_state(spec: &DomainSpec, ens: &EnsembleState, tol: f64) -> Result<EnsembleState> {
    let mut out = Vec::with_capacity(ens.len());
    for (index, z) in ens.oscillators.iter().enumerate() {
        z.ensure_shape(spec.m(), spec.n())?;
        let distance = bs_deviation(spec, z)?;
        if distance.is_nan() || distance > RETRACT_RADIUS {
            return Err(Error::TooFarToRetract { index, distance });
        }
        let w = match spec.kind() {
            DomainKind::TypeI => polar_unitary_factor(z, tol)?,
            DomainKind::TypeIII => polar_unitary_factor(&z.symmetrize(), tol)?.symmetrize(),
            DomainKind::TypeII => {
                let s = z.antisymmetrize();
                let w = if spec.n().is_multiple_of(2) {
                    polar_unitary_factor(&s, tol)?
                } else {
                    partial_isometry_factor(&s, spec.n() - 1, tol)?
                };
                w.antisymmetrize()
            }
        };
        out.push(w);
    }
    Ok(EnsembleState::new(out, ens.time))
}

fn should(every: usize, k: usize) -> bool {
    every > 0 && k.is_multiple_of(every)
}

/// Integrates the coupled system from `init`. Monitors are taken at `t = 0`, after every
/// `monitor_every` steps and at `t_end`; snapshots are aligned with them.
pub fn integrate_ensemble(model: &ModelSpec, init: &EnsembleState, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let spec = model.member();
    let tol = &cfg.tolerances;
    let run = classify_initial(&spec, init, tol.boundary)?;
    let kappa = model.coupling();
    let f = |y: &[CMat]| coupled_rhs(model, &EnsembleState::new(y.to_vec(), 0.0));

    let mut traj = Trajectory::default();
    let mut state = init.clone();
    record(&mut traj, &spec, &state, kappa, run, tol)?;

    match cfg.method {
        Method::Rk4 => {
            let steps = cfg.step_count();
            for k in 1..=steps {
                let t0 = cfg.grid_time(k - 1, steps);
                let t1 = cfg.grid_time(k, steps);
                let y = rk4_step(&f, &state.oscillators, t1 - t0)?;
                state = EnsembleState::new(y, t1);
                advance_checks(&spec, &mut state, k, run, cfg)?;
                if should(cfg.monitor_every, k) || k == steps {
                    record(&mut traj, &spec, &state, kappa, run, tol)?;
                }
            }
        }
        Method::Rk45Adaptive => {
            let mut h = cfg.dt.min(cfg.t_end);
            let h_min = cfg.t_end * 1e-14;
            let mut k = 0usize;
            while state.time < cfg.t_end {
                let last = state.time + h >= cfg.t_end;
                let step = if last { cfg.t_end - state.time } else { h };
                let (y, err) = dp_step(&f, &state.oscillators, step, tol)?;
                if err <= 1.0 {
                    k += 1;
                    state = EnsembleState::new(y, if last { cfg.t_end } else { state.time + step });
                    advance_checks(&spec, &mut state, k, run, cfg)?;
                    if should(cfg.monitor_every, k) || state.time >= cfg.t_end {
                        record(&mut traj, &spec, &state, kappa, run, tol)?;
                    }
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = step * factor;
                if h < h_min && state.time < cfg.t_end {
                    return Err(Error::StepSizeUnderflow { time: state.time });
                }
            }
        }
    }
    Ok(traj)
}

fn advance_checks(spec: &DomainSpec, state: &mut EnsembleState, k: usize, run: RunKind, cfg: &IntegrationConfig) -> Result<()> {
    check_divergence(spec, state)?;
    if run == RunKind::Boundary && should(cfg.retract_every, k) {
        *state = retract_state(spec, state, cfg.tolerances.numeric)?;
    }
    Ok(())
}

fn record(
    traj: &mut Trajectory,
    spec: &DomainSpec,
    state: &EnsembleState,
    kappa: f64,
    run: RunKind,
    tol: &Tolerances,
) -> Result<()> {
    traj.times.push(state.time);
    traj.monitors.push(monitor(spec, state, kappa, run, tol)?);
    traj.snapshots.push(state.clone());
    Ok(())
}

/// Integrates `ḣ = x(𝒵) h` from the identity with RK4, where `𝒵` is the mean field of
/// `transport(h, init)`. Returns `h` and the transported ensemble at the monitor times.
///
/// Fails with `ConstraintViolation` once the group residual of `h`, relative to `‖h‖_F²`,
/// exceeds `tolerances.membership`.
pub fn integrate_lift(
    model: &ModelSpec,
    init: &EnsembleState,
    cfg: &IntegrationConfig,
) -> Result<(Vec<GroupElement>, Trajectory)> {
    cfg.validate()?;
    if cfg.method != Method::Rk4 {
        return Err(Error::InvalidConfig("the group lift is integrated with RK4 only"));
    }
    let spec = model.member();
    let group = model.group();
    let tol = &cfg.tolerances;
    let run = classify_initial(&spec, init, tol.boundary)?;
    let kappa = model.coupling();
    let init0 = EnsembleState::new(init.oscillators.clone(), 0.0);

    let f = |y: &[CMat]| -> Result<Vec<CMat>> {
        let h = GroupElement::new_unchecked(group, y[0].clone());
        let ens = transport(&h, &init0, tol.numeric)?;
        let field = mean_field(&ens, kappa)?;
        Ok(alloc::vec![group_lift_rhs(model, &h, &field)?])
    };

    let mut path = Vec::new();
    let mut traj = Trajectory::default();
    let mut h = GroupElement::identity(group);
    let steps = cfg.step_count();
    for k in 0..=steps {
        let t = cfg.grid_time(k, steps);
        if k > 0 {
            let t0 = cfg.grid_time(k - 1, steps);
            let y = rk4_step(&f, core::slice::from_ref(h.matrix()), t - t0)?;
            h = GroupElement::new_unchecked(group, y.into_iter().next().expect("one state"));
            let scale = h.matrix().frobenius_norm().powi(2).max(1.0);
            let drift = h.membership_residual() / scale;
            if drift.is_nan() || drift > tol.membership {
                return Err(Error::ConstraintViolation {
                    block: "h",
                    condition: "group membership along the lift",
                    deviation: drift,
                });
            }
        }
        if k == 0 || should(cfg.monitor_every, k) || k == steps {
            let mut ens = transport(&h, &init0, tol.numeric)?;
            ens.time = t;
            check_divergence(&spec, &ens)?;
            record(&mut traj, &spec, &ens, kappa, run, tol)?;
            path.push(h.clone());
        }
    }
    Ok((path, traj))
}
