//! Right-hand sides of the oscillator systems.
//!
//! Each oscillator `z^K` follows the Riccati field of a Lie-algebra element whose off-diagonal
//! block is the mean field `𝒵 = (κ/N) Σ_J z^J`:
//!
//! ```text
//! ż^K = a z^K - z^K d + (κ/N) Σ_J (z^J - z^K (z^J)† z^K)
//! ```
//!
//! with `d = ā` for types II and III. For `m = n = 1` and `z = e^{iθ}` this is the classic
//! Kuramoto system; the natural frequency enters as `a - d = iω`, so that `ż = iωz` without
//! coupling and the phase equation reads `θ̇^I = ω + (2κ/N) Σ_J sin(θ^J - θ^I)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cxmat::{c64, CMat};
use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::groups::{lie_element, mobius, riccati_field, GeneratorSpec, GroupElement, GroupSpec};

/// One member of a Kuramoto family: the domain, the chain index `t`, the coupling and the
/// drift (natural-frequency) generator of the member's group.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    domain: DomainSpec,
    family_index: usize,
    coupling: f64,
    drift: GeneratorSpec,
}

impl ModelSpec {
    pub fn new(domain: DomainSpec, family_index: usize, coupling: f64, drift: GeneratorSpec) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::InvalidConfig("coupling must be finite"));
        }
        let member = member_domain(&domain, family_index)?;
        if *drift.spec() != GroupSpec::for_domain(&member) {
            return Err(Error::ShapeMismatch {
                expected_rows: member.m(),
                expected_cols: member.n(),
                rows: drift.spec().m(),
                cols: drift.spec().n(),
            });
        }
        if !drift.is_drift_only() {
            return Err(Error::ConstraintViolation {
                block: "b",
                condition: "drift generator has b = 0",
                deviation: drift.b().frobenius_norm(),
            });
        }
        Ok(Self {
            domain,
            family_index,
            coupling,
            drift,
        })
    }

    /// Model without natural frequencies (`a = d = 0`).
    pub fn without_drift(domain: DomainSpec, family_index: usize, coupling: f64) -> Result<Self> {
        let member = member_domain(&domain, family_index)?;
        Self::new(
            domain,
            family_index,
            coupling,
            GeneratorSpec::zero(GroupSpec::for_domain(&member)),
        )
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn family_index(&self) -> usize {
        self.family_index
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn drift(&self) -> &GeneratorSpec {
        &self.drift
    }

    /// Domain on which this member's oscillators live.
    pub fn member(&self) -> DomainSpec {
        member_domain(&self.domain, self.family_index).expect("validated on construction")
    }

    pub fn group(&self) -> GroupSpec {
        GroupSpec::for_domain(&self.member())
    }
}

fn member_domain(domain: &DomainSpec, t: usize) -> Result<DomainSpec> {
    if t == 0 {
        Ok(*domain)
    } else {
        domain
            .reduced(t)
            .ok_or(Error::InvalidDimensions("family index leaves no Kuramoto member"))
    }
}

/// Drift for a `(1,1)` model with natural frequency `ω`: `a = iω/2`, `d = -iω/2`.
pub fn scalar_drift(omega: f64) -> GeneratorSpec {
    let spec = GroupSpec::for_domain(&DomainSpec::type_i(1, 1).expect("valid"));
    GeneratorSpec::drift(
        spec,
        CMat::scalar(c64(0.0, omega / 2.0)),
        Some(CMat::scalar(c64(0.0, -omega / 2.0))),
    )
    .expect("valid scalar drift")
}

/// `N` oscillators on a common domain at a given time.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleState {
    pub oscillators: Vec<CMat>,
    pub time: f64,
}

impl EnsembleState {
    pub fn new(oscillators: Vec<CMat>, time: f64) -> Self {
        Self { oscillators, time }
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    /// Unit-modulus scalar oscillators `e^{iθ}` for a `(1,1)` model.
    pub fn from_phases(phases: &[f64]) -> Self {
        Self::new(
            phases
                .iter()
                .map(|&t| CMat::scalar(Complex64::from_polar(1.0, t)))
                .collect(),
            0.0,
        )
    }

    /// Arguments of scalar oscillators.
    pub fn phases(&self) -> Vec<f64> {
        self.oscillators.iter().map(|z| z[(0, 0)].arg()).collect()
    }

    fn check_shapes(&self, spec: &DomainSpec) -> Result<()> {
        for z in &self.oscillators {
            z.ensure_shape(spec.m(), spec.n())?;
        }
        Ok(())
    }
}

/// The mean field `𝒵 = (κ/N) Σ_J z^J`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanField {
    pub z: CMat,
}

/// Sums in index order so the result is bitwise reproducible.
pub fn mean_field(ens: &EnsembleState, kappa: f64) -> Result<MeanField> {
    let first = ens.oscillators.first().ok_or(Error::EmptyEnsemble)?;
    let mut sum = CMat::zeros(first.rows(), first.cols());
    for z in &ens.oscillators {
        if z.shape() != first.shape() {
            return Err(Error::ShapeMismatch {
                expected_rows: first.rows(),
                expected_cols: first.cols(),
                rows: z.rows(),
                cols: z.cols(),
            });
        }
        sum.axpy(c64(1.0, 0.0), z);
    }
    Ok(MeanField {
        z: sum.scale_real(kappa / ens.len() as f64),
    })
}

/// Time derivative of every oscillator.
pub fn coupled_rhs(model: &ModelSpec, ens: &EnsembleState) -> Result<Vec<CMat>> {
    let member = model.member();
    ens.check_shapes(&member)?;
    let field = mean_field(ens, model.coupling)?;
    let a = model.drift.a();
    let d = model.drift.d();
    Ok(ens
        .oscillators
        .iter()
        .map(|z| riccati_field(a, &field.z, &d, z))
        .collect())
}

/// Classic all-to-all Kuramoto system `θ̇^I = ω + (2κ/N) Σ_J sin(θ^J - θ^I)`.
pub fn classic_kuramoto_rhs(phases: &[f64], omega: f64, kappa: f64) -> Vec<f64> {
    let n = phases.len() as f64;
    phases
        .iter()
        .map(|&ti| {
            let coupling: f64 = phases.iter().map(|&tj| (tj - ti).sin()).sum();
            omega + 2.0 * kappa / n * coupling
        })
        .collect()
}

/// Generator of the group lift: `ḣ = x h` with `x = [[a, 𝒵], [𝒵†, d]]`.
pub fn group_lift_rhs(model: &ModelSpec, h: &GroupElement, field: &MeanField) -> Result<CMat> {
    let spec = model.group();
    if *h.spec() != spec {
        return Err(Error::ShapeMismatch {
            expected_rows: spec.order(),
            expected_cols: spec.order(),
            rows: h.matrix().rows(),
            cols: h.matrix().cols(),
        });
    }
    let gen = model.drift.with_b(field.z.clone())?;
    let x = lie_element(&spec, &gen)?;
    Ok(x.matmul(h.matrix()))
}

/// Moves every oscillator of `initial` by the Möbius action of `h`.
pub fn transport(h: &GroupElement, initial: &EnsembleState, tol: f64) -> Result<EnsembleState> {
    let oscillators = initial
        .oscillators
        .iter()
        .map(|z| mobius(h, z, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleState::new(oscillators, initial.time))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    /// Holomorphic flow on the open unit disc.
    Disc,
    /// Restriction to the unit circle, returned as a phase velocity.
    Circle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarRhs {
    Disc(Complex64),
    Circle(f64),
}

/// Scalar flow `ż = b + 2az - b̄z²` on the disc, or its phase form
/// `θ̇ = -i b e^{-iθ} - 2ia + i b̄ e^{iθ}` on the circle. `a` must be imaginary.
pub fn disc_circle_rhs(z: Complex64, a: Complex64, b: Complex64, mode: ScalarMode, tol: f64) -> Result<ScalarRhs> {
    if a.re.abs() > tol {
        return Err(Error::ConstraintViolation {
            block: "a",
            condition: "a is imaginary",
            deviation: a.re.abs(),
        });
    }
    match mode {
        ScalarMode::Disc => {
            if z.norm() >= 1.0 {
                return Err(Error::DomainViolation("open unit disc |z| < 1"));
            }
            Ok(ScalarRhs::Disc(b + a * z * 2.0 - b.conj() * z * z))
        }
        ScalarMode::Circle => {
            if (z.norm() - 1.0).abs() > tol {
                return Err(Error::DomainViolation("unit circle |z| = 1"));
            }
            let e = z / z.norm();
            let i = c64(0.0, 1.0);
            let v = -i * b * e.conj() - i * a * 2.0 + i * b.conj() * e;
            Ok(ScalarRhs::Circle(v.re))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxmat::DEFAULT_TOL;
    use core::f64::consts::PI;

    fn model_11(omega: f64, kappa: f64) -> ModelSpec {
        ModelSpec::new(DomainSpec::type_i(1, 1).unwrap(), 0, kappa, scalar_drift(omega)).unwrap()
    }

    #[test]
    fn mean_field_examples() {
        let z = CMat::from_real_rows(&[[0.6, 0.0], [0.0, -0.8]]);
        let ens = EnsembleState::new(alloc::vec![z.clone(); 3], 0.0);
        assert!((&mean_field(&ens, 2.0).unwrap().z - &z.scale_real(2.0)).max_abs() < 1e-15);
        let ens = EnsembleState::from_phases(&[0.3, 0.3 + PI]);
        assert!(mean_field(&ens, 1.0).unwrap().z.frobenius_norm() < 1e-15);
        assert!(matches!(
            mean_field(&EnsembleState::new(alloc::vec![], 0.0), 1.0),
            Err(Error::EmptyEnsemble)
        ));
    }

    #[test]
    fn rhs_zero_without_coupling_or_drift() {
        let d = DomainSpec::type_i(3, 2).unwrap();
        let model = ModelSpec::without_drift(d, 0, 0.0).unwrap();
        let ens = EnsembleState::new(
            (0..4).map(|s| crate::domains::sample_bs_boundary(&d, s)).collect(),
            0.0,
        );
        for v in coupled_rhs(&model, &ens).unwrap() {
            assert_eq!(v.max_abs(), 0.0);
        }
    }

    #[test]
    fn single_boundary_oscillator_is_fixed() {
        let d = DomainSpec::type_i(3, 2).unwrap();
        let model = ModelSpec::without_drift(d, 0, 1.5).unwrap();
        let ens = EnsembleState::new(alloc::vec![crate::domains::sample_bs_boundary(&d, 4)], 0.0);
        assert!(coupled_rhs(&model, &ens).unwrap()[0].frobenius_norm() < 1e-14);
    }

    #[test]
    fn classic_examples() {
        assert_eq!(classic_kuramoto_rhs(&[0.7; 4], 1.25, 3.0), alloc::vec![1.25; 4]);
        let v = classic_kuramoto_rhs(&[0.0, PI / 2.0], 0.0, 1.0);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_reduction_matches_classic() {
        let phases = [0.1, 1.7, -2.4, 3.0, 0.9];
        for omega in [0.0, 1.0, -0.6] {
            let model = model_11(omega, 0.8);
            let ens = EnsembleState::from_phases(&phases);
            let zdot = coupled_rhs(&model, &ens).unwrap();
            let want = classic_kuramoto_rhs(&phases, omega, 0.8);
            for (k, (zd, w)) in zdot.iter().zip(&want).enumerate() {
                // ż = iθ̇ z
                let z = ens.oscillators[k][(0, 0)];
                let thetadot = (zd[(0, 0)] / (c64(0.0, 1.0) * z)).re;
                assert!((thetadot - w).abs() < 1e-12, "{thetadot} vs {w}");
            }
        }
    }

    #[test]
    fn circle_rhs_matches_coupled_rhs() {
        let phases = [0.4, -1.1, 2.2];
        let ens = EnsembleState::from_phases(&phases);
        let model = model_11(0.7, 1.0);
        let b = mean_field(&ens, 1.0).unwrap().z[(0, 0)];
        // scalar drift a with d = -a
        let a = model.drift().a()[(0, 0)];
        let zdot = coupled_rhs(&model, &ens).unwrap();
        for (k, &th) in phases.iter().enumerate() {
            let z = Complex64::from_polar(1.0, th);
            let ScalarRhs::Circle(v) = disc_circle_rhs(z, a, b, ScalarMode::Circle, DEFAULT_TOL).unwrap() else {
                panic!()
            };
            let via_matrix = (zdot[k][(0, 0)] / (c64(0.0, 1.0) * z)).re;
            assert!((v - via_matrix).abs() < 1e-13);
            // polar form: 2r sin(ψ - θ) - 2ia
            let polar = 2.0 * b.norm() * (b.arg() - th).sin() + (c64(0.0, -2.0) * a).re;
            assert!((v - polar).abs() < 1e-13);
        }
    }

    #[test]
    fn disc_examples() {
        let a = c64(0.0, 0.3);
        let z = c64(0.2, 0.1);
        assert_eq!(
            disc_circle_rhs(z, a, c64(0.0, 0.0), ScalarMode::Disc, DEFAULT_TOL).unwrap(),
            ScalarRhs::Disc(a * z * 2.0)
        );
        let b = c64(0.5, -0.2);
        assert_eq!(
            disc_circle_rhs(c64(0.0, 0.0), a, b, ScalarMode::Disc, DEFAULT_TOL).unwrap(),
            ScalarRhs::Disc(b)
        );
        assert!(matches!(
            disc_circle_rhs(c64(1.0, 0.5), a, b, ScalarMode::Disc, DEFAULT_TOL),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            disc_circle_rhs(c64(0.5, 0.0), a, b, ScalarMode::Circle, DEFAULT_TOL),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn lift_rhs_scalar_components() {
        let model = model_11(0.9, 1.0);
        let spec = model.group();
        let t = 0.3_f64;
        let g = CMat::from_rows(&[
            [c64(t.cosh(), 0.1), c64(0.0, t.sinh())],
            [c64(0.0, -t.sinh()), c64(t.cosh(), -0.1)],
        ]);
        let h = GroupElement::new_unchecked(spec, g);
        let zf = c64(0.25, -0.4);
        let hdot = group_lift_rhs(&model, &h, &MeanField { z: CMat::scalar(zf) }).unwrap();
        let a = model.drift().a()[(0, 0)];
        let (ca, cb) = (h.matrix()[(0, 0)], h.matrix()[(0, 1)]);
        // first row of x h: [a, 𝒵] times h
        assert!((hdot[(0, 0)] - (a * ca + zf * h.matrix()[(1, 0)])).norm() < 1e-15);
        assert!((hdot[(0, 1)] - (a * cb + zf * h.matrix()[(1, 1)])).norm() < 1e-15);
        let zero = group_lift_rhs(
            &ModelSpec::without_drift(DomainSpec::type_i(1, 1).unwrap(), 0, 1.0).unwrap(),
            &h,
            &MeanField { z: CMat::zeros(1, 1) },
        )
        .unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn transport_identity() {
        let d = DomainSpec::type_iii(2).unwrap();
        let ens = EnsembleState::new(
            (0..3).map(|s| crate::domains::sample_bs_boundary(&d, s)).collect(),
            0.0,
        );
        let id = GroupElement::identity(GroupSpec::for_domain(&d));
        assert_eq!(transport(&id, &ens, 1e-12).unwrap(), ens);
    }

    #[test]
    fn model_validation() {
        let d = DomainSpec::type_i(2, 2).unwrap();
        assert!(ModelSpec::without_drift(d, 2, 1.0).is_err());
        assert!(ModelSpec::without_drift(d, 0, f64::NAN).is_err());
        let m = ModelSpec::without_drift(d, 1, 1.0).unwrap();
        assert_eq!(m.member(), DomainSpec::type_i(1, 1).unwrap());
        // drift for the wrong group
        assert!(ModelSpec::new(d, 0, 1.0, scalar_drift(1.0)).is_err());
    }
}
