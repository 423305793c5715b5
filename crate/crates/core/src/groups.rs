//! Matrix groups acting on the domains and their Lie algebras.
//!
//! Elements are `(m+n) x (m+n)` block matrices `[[A, B], [C, D]]` acting by the matrix
//! Möbius transformation `z -> (Az + B)(Cz + D)⁻¹`. Central elements act trivially, so
//! representatives are used directly and no quotient is formed.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cxmat::{c64, herm_eig, mat_exp, solve_right, CMat};
use crate::domains::{DomainKind, DomainSpec};
use crate::error::{Error, Result};

/// Relative tolerance for the block conditions checked on generator construction.
pub const GENERATOR_TOL: f64 = 1e-12;

/// Default singularity threshold for `Cz + D`, relative to its Frobenius norm.
pub const MOBIUS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `SU(m, n)`, acting on type I domains.
    SUmn,
    /// `SO*(2n)`, acting on type II domains.
    SOstar2n,
    /// `Sp(n, R)`, acting on type III domains.
    SpnR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    m: usize,
    n: usize,
}

impl GroupSpec {
    pub fn for_domain(d: &DomainSpec) -> Self {
        let kind = match d.kind() {
            DomainKind::TypeI => GroupKind::SUmn,
            DomainKind::TypeII => GroupKind::SOstar2n,
            DomainKind::TypeIII => GroupKind::SpnR,
        };
        Self {
            kind,
            m: d.m(),
            n: d.n(),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m + self.n
    }

    pub fn domain(&self) -> DomainSpec {
        let kind = match self.kind {
            GroupKind::SUmn => DomainKind::TypeI,
            GroupKind::SOstar2n => DomainKind::TypeII,
            GroupKind::SpnR => DomainKind::TypeIII,
        };
        DomainSpec::new(kind, self.m, self.n).expect("group spec built from a valid domain")
    }

    pub fn name(&self) -> alloc::string::String {
        match self.kind {
            GroupKind::SUmn => alloc::format!("SU({},{})", self.m, self.n),
            GroupKind::SOstar2n => alloc::format!("SO*({})", 2 * self.n),
            GroupKind::SpnR => alloc::format!("Sp({},R)", self.n),
        }
    }
}

/// Invariant forms: `s = diag(-Id_m, Id_n)` always; `s1` for `SO*(2n)` and `Sp(n, R)`.
pub fn signature_forms(spec: &GroupSpec) -> (CMat, Option<CMat>) {
    let (m, n) = (spec.m, spec.n);
    let s = CMat::block_diag(&CMat::identity(m).scale_real(-1.0), &CMat::identity(n));
    let s1 = match spec.kind {
        GroupKind::SUmn => None,
        GroupKind::SOstar2n => Some(CMat::from_blocks(
            &CMat::zeros(n, n),
            &CMat::identity(n),
            &CMat::identity(n),
            &CMat::zeros(n, n),
        )),
        GroupKind::SpnR => Some(CMat::from_blocks(
            &CMat::zeros(n, n),
            &CMat::identity(n),
            &CMat::identity(n).scale_real(-1.0),
            &CMat::zeros(n, n),
        )),
    };
    (s, s1)
}

/// Residuals of the group conditions: `(‖gsg† - s‖, ‖gs1gᵀ - s1‖ or 0, |det g - 1| or 0)`.
pub fn membership_residuals(spec: &GroupSpec, g: &CMat) -> Result<(f64, f64, f64)> {
    g.ensure_shape(spec.order(), spec.order())?;
    let (s, s1) = signature_forms(spec);
    let r_s = (&g.matmul(&s).matmul(&g.adjoint()) - &s).frobenius_norm();
    let r_s1 = match &s1 {
        Some(s1) => (&g.matmul(s1).matmul(&g.transpose()) - s1).frobenius_norm(),
        None => 0.0,
    };
    let r_det = match spec.kind {
        GroupKind::SpnR => 0.0,
        _ => (g.det() - c64(1.0, 0.0)).norm(),
    };
    Ok((r_s, r_s1, r_det))
}

pub fn is_group_member(spec: &GroupSpec, g: &CMat, tol: f64) -> Result<bool> {
    let (a, b, c) = membership_residuals(spec, g)?;
    Ok(a <= tol && b <= tol && c <= tol)
}

/// A group element with its block structure.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    g: CMat,
    spec: GroupSpec,
}

impl GroupElement {
    /// Wraps `g` after checking membership to `tol`.
    pub fn new(spec: GroupSpec, g: CMat, tol: f64) -> Result<Self> {
        let (r_s, r_s1, r_det) = membership_residuals(&spec, &g)?;
        if r_s > tol {
            return Err(Error::ConstraintViolation {
                block: "g",
                condition: "g s g† = s",
                deviation: r_s,
            });
        }
        if r_s1 > tol {
            return Err(Error::ConstraintViolation {
                block: "g",
                condition: "g s1 gᵀ = s1",
                deviation: r_s1,
            });
        }
        if r_det > tol {
            return Err(Error::ConstraintViolation {
                block: "g",
                condition: "det g = 1",
                deviation: r_det,
            });
        }
        Ok(Self { g, spec })
    }

    /// Wraps `g` without checking membership (for integrator states in flight).
    pub fn new_unchecked(spec: GroupSpec, g: CMat) -> Self {
        Self { g, spec }
    }

    pub fn identity(spec: GroupSpec) -> Self {
        Self {
            g: CMat::identity(spec.order()),
            spec,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.g
    }

    pub fn into_matrix(self) -> CMat {
        self.g
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn a(&self) -> CMat {
        self.g.block(0, 0, self.spec.m, self.spec.m)
    }

    pub fn b(&self) -> CMat {
        self.g.block(0, self.spec.m, self.spec.m, self.spec.n)
    }

    pub fn c(&self) -> CMat {
        self.g.block(self.spec.m, 0, self.spec.n, self.spec.m)
    }

    pub fn d(&self) -> CMat {
        self.g.block(self.spec.m, self.spec.m, self.spec.n, self.spec.n)
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.spec, other.spec, "compose: group mismatch");
        GroupElement {
            g: self.g.matmul(&other.g),
            spec: self.spec,
        }
    }

    pub fn inverse(&self) -> Option<GroupElement> {
        self.g.inverse().map(|g| GroupElement { g, spec: self.spec })
    }

    pub fn membership_residual(&self) -> f64 {
        membership_residuals(&self.spec, &self.g)
            .map(|(a, b, c)| a.max(b).max(c))
            .unwrap_or(f64::INFINITY)
    }
}

/// Lie-algebra blocks `(a, b, d)`; `c = b†`. For types II and III `d = ā` is implied.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    spec: GroupSpec,
    a: CMat,
    b: CMat,
    d: Option<CMat>,
    trace_shift: Complex64,
}

fn rel_dev(x: &CMat, scale: &CMat) -> f64 {
    x.frobenius_norm() / scale.frobenius_norm().max(1.0)
}

impl GeneratorSpec {
    /// Validates the block conditions. For `SU(m, n)`, `tr a + tr d` is removed by subtracting
    /// the mean trace from both diagonals; the vector field is unchanged by this shift and the
    /// amount removed is available from [`GeneratorSpec::trace_shift`].
    pub fn new(spec: GroupSpec, a: CMat, b: CMat, d: Option<CMat>) -> Result<Self> {
        let (m, n) = (spec.m, spec.n);
        a.ensure_shape(m, m)?;
        b.ensure_shape(m, n)?;
        let dev = rel_dev(&(&a + &a.adjoint()), &a);
        if dev > GENERATOR_TOL {
            return Err(Error::ConstraintViolation {
                block: "a",
                condition: "a† = -a",
                deviation: dev,
            });
        }
        match spec.kind {
            GroupKind::SUmn => {
                let d = d.unwrap_or_else(|| CMat::zeros(n, n));
                d.ensure_shape(n, n)?;
                let dev = rel_dev(&(&d + &d.adjoint()), &d);
                if dev > GENERATOR_TOL {
                    return Err(Error::ConstraintViolation {
                        block: "d",
                        condition: "d† = -d",
                        deviation: dev,
                    });
                }
                let shift = (a.trace() + d.trace()) / ((m + n) as f64);
                let shift = c64(0.0, shift.im);
                let a = &a - &CMat::identity(m).scale(shift);
                let d = &d - &CMat::identity(n).scale(shift);
                Ok(Self {
                    spec,
                    a,
                    b,
                    d: Some(d),
                    trace_shift: shift,
                })
            }
            GroupKind::SOstar2n | GroupKind::SpnR => {
                if let Some(d) = &d {
                    d.ensure_shape(n, n)?;
                    let dev = rel_dev(&(d - &a.conj()), &a);
                    if dev > GENERATOR_TOL {
                        return Err(Error::ConstraintViolation {
                            block: "d",
                            condition: "d = conj(a)",
                            deviation: dev,
                        });
                    }
                }
                let (sym, cond) = if spec.kind == GroupKind::SOstar2n {
                    (&b + &b.transpose(), "bᵀ = -b")
                } else {
                    (&b - &b.transpose(), "bᵀ = b")
                };
                let dev = rel_dev(&sym, &b);
                if dev > GENERATOR_TOL {
                    return Err(Error::ConstraintViolation {
                        block: "b",
                        condition: cond,
                        deviation: dev,
                    });
                }
                Ok(Self {
                    spec,
                    a,
                    b,
                    d: None,
                    trace_shift: c64(0.0, 0.0),
                })
            }
        }
    }

    /// Drift-only generator (`b = 0`).
    pub fn drift(spec: GroupSpec, a: CMat, d: Option<CMat>) -> Result<Self> {
        let b = CMat::zeros(spec.m, spec.n);
        Self::new(spec, a, b, d)
    }

    pub fn zero(spec: GroupSpec) -> Self {
        Self::new(
            spec,
            CMat::zeros(spec.m, spec.m),
            CMat::zeros(spec.m, spec.n),
            None,
        )
        .expect("zero generator is valid")
    }

    /// Same `a`, `d` with the off-diagonal block replaced by `b` (validated).
    pub fn with_b(&self, b: CMat) -> Result<Self> {
        b.ensure_shape(self.spec.m, self.spec.n)?;
        match self.spec.kind {
            GroupKind::SUmn => {}
            GroupKind::SOstar2n => {
                let dev = rel_dev(&(&b + &b.transpose()), &b);
                if dev > GENERATOR_TOL {
                    return Err(Error::ConstraintViolation {
                        block: "b",
                        condition: "bᵀ = -b",
                        deviation: dev,
                    });
                }
            }
            GroupKind::SpnR => {
                let dev = rel_dev(&(&b - &b.transpose()), &b);
                if dev > GENERATOR_TOL {
                    return Err(Error::ConstraintViolation {
                        block: "b",
                        condition: "bᵀ = b",
                        deviation: dev,
                    });
                }
            }
        }
        let mut out = self.clone();
        out.b = b;
        Ok(out)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    /// Lower-right block: stored `d` for `SU(m, n)`, `ā` otherwise.
    pub fn d(&self) -> CMat {
        match &self.d {
            Some(d) => d.clone(),
            None => self.a.conj(),
        }
    }

    /// Multiple of the identity removed from `a` and `d` to balance traces.
    pub fn trace_shift(&self) -> Complex64 {
        self.trace_shift
    }

    pub fn is_drift_only(&self) -> bool {
        self.b.max_abs() == 0.0
    }
}

/// Residual of the algebra identities `Xs + sX† = 0` (and `Xs1 + s1Xᵀ = 0`), plus `|tr X|`
/// for `SU(m, n)`.
pub fn algebra_residual(spec: &GroupSpec, x: &CMat) -> Result<f64> {
    x.ensure_shape(spec.order(), spec.order())?;
    let (s, s1) = signature_forms(spec);
    let mut r = (&x.matmul(&s) + &s.matmul(&x.adjoint())).frobenius_norm();
    if let Some(s1) = &s1 {
        r = r.max((&x.matmul(s1) + &s1.matmul(&x.transpose())).frobenius_norm());
    }
    if spec.kind == GroupKind::SUmn {
        r = r.max(x.trace().norm());
    }
    Ok(r)
}

/// `[[a, b], [b†, d]]`.
pub fn lie_element(spec: &GroupSpec, gen: &GeneratorSpec) -> Result<CMat> {
    if gen.spec != *spec {
        return Err(Error::ShapeMismatch {
            expected_rows: spec.m,
            expected_cols: spec.n,
            rows: gen.spec.m,
            cols: gen.spec.n,
        });
    }
    let x = CMat::from_blocks(&gen.a, &gen.b, &gen.b.adjoint(), &gen.d());
    let r = algebra_residual(spec, &x)?;
    let scale = x.frobenius_norm().max(1.0);
    if r > 1e-12 * scale {
        return Err(Error::ConstraintViolation {
            block: "x",
            condition: "x s + s x† = 0",
            deviation: r,
        });
    }
    Ok(x)
}

/// `exp(X)` for `X` in the Lie algebra; membership of the result is checked to `10·tol`.
pub fn exp_group(spec: &GroupSpec, x: &CMat, tol: f64) -> Result<GroupElement> {
    let r = algebra_residual(spec, x)?;
    if r > tol {
        return Err(Error::ConstraintViolation {
            block: "X",
            condition: "X s + s X† = 0",
            deviation: r,
        });
    }
    GroupElement::new(*spec, mat_exp(x)?, 10.0 * tol)
}

/// Smallest singular value of a square matrix.
pub fn sigma_min(m: &CMat) -> Result<f64> {
    let eig = herm_eig(&m.adjoint().matmul(m), 1e-8)?;
    Ok(eig.min().max(0.0).sqrt())
}

/// Matrix Möbius action `(Az + B)(Cz + D)⁻¹`.
///
/// `SingularDenominator` if the smallest singular value of `Cz + D` is at most `tol` times its
/// Frobenius norm.
pub fn mobius(h: &GroupElement, z: &CMat, tol: f64) -> Result<CMat> {
    let spec = h.spec;
    z.ensure_shape(spec.m, spec.n)?;
    let num = &h.a().matmul(z) + &h.b();
    let den = &h.c().matmul(z) + &h.d();
    divide_checked(&num, &den, tol)
}

fn divide_checked(num: &CMat, den: &CMat, tol: f64) -> Result<CMat> {
    let smin = sigma_min(den)?;
    if smin <= tol * den.frobenius_norm() {
        return Err(Error::SingularDenominator { sigma_min: smin });
    }
    solve_right(num, den).ok_or(Error::SingularDenominator { sigma_min: 0.0 })
}

/// Infinitesimal Möbius action `b + a z - z d - z b† z`.
pub fn vector_field(spec: &GroupSpec, gen: &GeneratorSpec, z: &CMat) -> Result<CMat> {
    z.ensure_shape(spec.m, spec.n)?;
    if gen.spec != *spec {
        return Err(Error::ShapeMismatch {
            expected_rows: spec.m,
            expected_cols: spec.n,
            rows: gen.spec.m,
            cols: gen.spec.n,
        });
    }
    Ok(riccati_field(&gen.a, &gen.b, &gen.d(), z))
}

/// `b + a z - z d - z b† z` without validation.
pub(crate) fn riccati_field(a: &CMat, b: &CMat, d: &CMat, z: &CMat) -> CMat {
    let mut out = b.clone();
    out.axpy(c64(1.0, 0.0), &a.matmul(z));
    out.axpy(c64(-1.0, 0.0), &z.matmul(d));
    out.axpy(c64(-1.0, 0.0), &z.matmul(&b.adjoint()).matmul(z));
    out
}

/// Harish-Chandra coordinate `B D⁻¹`, the image of the origin.
pub fn hc_coordinate(h: &GroupElement, tol: f64) -> Result<CMat> {
    divide_checked(&h.b(), &h.d(), tol)
}
