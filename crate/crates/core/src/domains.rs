//! Bounded symmetric domains of types I, II and III and their boundary structure.
//!
//! A type I domain is the set of `m x n` complex matrices with `Id_m - zz† > 0`. Types II and
//! III are the antisymmetric and symmetric `n x n` slices of it. The topological boundary
//! splits into components indexed by the number `t` of zero eigenvalues of `Id - zz†`
//! (for type II, by the number of `2 x 2` blocks `J_t`); the closed component with the
//! largest `t` is the Bergman-Shilov (BS) boundary:
//!
//! | type | BS boundary                         |
//! |------|-------------------------------------|
//! | I    | complex Stiefel manifold `z†z = Id` |
//! | II   | unitary antisymmetric matrices      |
//! | III  | unitary symmetric matrices          |
//!
//! Dimensions are reported as real dimensions throughout.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::cxmat::{c64, herm_eig, svd, CMat};
use crate::error::{Error, Result};
use crate::sampling::{complex_gaussian, haar_unitary, rng_from_seed};

/// Cartan type of a classical bounded symmetric domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    TypeI,
    TypeII,
    TypeIII,
}

impl DomainKind {
    pub fn roman(self) -> &'static str {
        match self {
            DomainKind::TypeI => "I",
            DomainKind::TypeII => "II",
            DomainKind::TypeIII => "III",
        }
    }
}

/// One bounded domain: a Cartan type and its dimensions (`m = n` for types II and III).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DomainSpec {
    kind: DomainKind,
    m: usize,
    n: usize,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, m: usize, n: usize) -> Result<Self> {
        match kind {
            DomainKind::TypeI => {
                if n < 1 {
                    return Err(Error::InvalidDimensions("type I needs n >= 1"));
                }
                if m < n {
                    return Err(Error::InvalidDimensions("type I needs m >= n"));
                }
            }
            DomainKind::TypeII => {
                if m != n {
                    return Err(Error::InvalidDimensions("type II needs m = n"));
                }
                if n < 2 {
                    return Err(Error::InvalidDimensions("type II needs n >= 2"));
                }
            }
            DomainKind::TypeIII => {
                if m != n {
                    return Err(Error::InvalidDimensions("type III needs m = n"));
                }
                if n < 1 {
                    return Err(Error::InvalidDimensions("type III needs n >= 1"));
                }
            }
        }
        Ok(Self { kind, m, n })
    }

    pub fn type_i(m: usize, n: usize) -> Result<Self> {
        Self::new(DomainKind::TypeI, m, n)
    }

    pub fn type_ii(n: usize) -> Result<Self> {
        Self::new(DomainKind::TypeII, n, n)
    }

    pub fn type_iii(n: usize) -> Result<Self> {
        Self::new(DomainKind::TypeIII, n, n)
    }

    #[inline]
    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of unit singular values of a BS-boundary point: `n`, or `2⌊n/2⌋` for type II.
    pub fn bs_rank(&self) -> usize {
        match self.kind {
            DomainKind::TypeII => 2 * (self.n / 2),
            _ => self.n,
        }
    }

    /// Boundary class of the BS boundary: `n`, or `⌊n/2⌋` for type II.
    pub fn max_boundary_class(&self) -> usize {
        match self.kind {
            DomainKind::TypeII => self.n / 2,
            _ => self.n,
        }
    }

    /// Domain of the component `F_t` after projection, if it is a proper domain.
    pub fn reduced(&self, t: usize) -> Option<DomainSpec> {
        match self.kind {
            DomainKind::TypeI => {
                if t >= self.n {
                    None
                } else {
                    DomainSpec::type_i(self.m - t, self.n - t).ok()
                }
            }
            DomainKind::TypeII => {
                if 2 * t + 2 > self.n {
                    None
                } else {
                    DomainSpec::type_ii(self.n - 2 * t).ok()
                }
            }
            DomainKind::TypeIII => {
                if t >= self.n {
                    None
                } else {
                    DomainSpec::type_iii(self.n - t).ok()
                }
            }
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DomainKind::TypeI => write!(f, "D^I_{{{},{}}}", self.m, self.n),
            k => write!(f, "D^{}_{}", k.roman(), self.n),
        }
    }
}

/// Index `t` of the boundary component containing a point; `0` is the open domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryClass(pub usize);

impl BoundaryClass {
    pub const INTERIOR: BoundaryClass = BoundaryClass(0);

    #[inline]
    pub fn t(self) -> usize {
        self.0
    }
}

fn check_shape(spec: &DomainSpec, z: &CMat) -> Result<()> {
    z.ensure_shape(spec.m, spec.n)?;
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Type II: `z = -zᵀ`; type III: `z = zᵀ`; type I: no constraint.
pub fn structure_check(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<bool> {
    check_shape(spec, z)?;
    Ok(match spec.kind {
        DomainKind::TypeI => true,
        DomainKind::TypeII => (z + &z.transpose()).frobenius_norm() <= tol,
        DomainKind::TypeIII => (z - &z.transpose()).frobenius_norm() <= tol,
    })
}

fn require_structure(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<()> {
    if structure_check(spec, z, tol)? {
        Ok(())
    } else {
        Err(Error::StructureViolation(match spec.kind {
            DomainKind::TypeII => "antisymmetric",
            _ => "symmetric",
        }))
    }
}

/// `Id_m - z z†`.
pub fn defect(z: &CMat) -> CMat {
    &CMat::identity(z.rows()) - &z.matmul(&z.adjoint())
}

/// Spectrum of `Id_m - zz†`, ascending.
fn defect_spectrum(z: &CMat) -> Result<Vec<f64>> {
    Ok(herm_eig(&defect(z), 1e-10)?.values)
}

/// True iff `Id_m - zz†` is positive definite with smallest eigenvalue above `tol`.
pub fn contains_interior(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<bool> {
    require_structure(spec, z, tol)?;
    Ok(defect_spectrum(z)?[0] > tol)
}

/// Number of zero eigenvalues of `Id - zz†` counted within `[-tol, tol]`, without
/// rejecting points slightly outside the closure. Used by trajectory monitors.
pub fn nullity_lenient(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<usize> {
    check_shape(spec, z)?;
    let count = defect_spectrum(z)?.iter().filter(|l| l.abs() <= tol).count();
    Ok(match spec.kind {
        DomainKind::TypeII => count / 2,
        _ => count,
    })
}

/// Boundary component index `t` of a point of the closed domain.
pub fn boundary_rank(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<BoundaryClass> {
    require_structure(spec, z, tol)?;
    let spectrum = defect_spectrum(z)?;
    if spectrum[0] < -tol {
        return Err(Error::OutsideClosure {
            eigenvalue: spectrum[0],
        });
    }
    let count = spectrum.iter().filter(|l| l.abs() <= tol).count();
    match spec.kind {
        DomainKind::TypeII => {
            if count % 2 == 1 {
                Err(Error::OddNullity { nullity: count })
            } else {
                Ok(BoundaryClass(count / 2))
            }
        }
        _ => Ok(BoundaryClass(count)),
    }
}

/// Distance of `z` from the BS-boundary condition, in Frobenius norm.
///
/// Types I, III and even type II: `‖Id_n - z†z‖_F`. Odd type II: the Frobenius distance of the
/// spectrum of `z†z` from `{0, 1, ..., 1}` (a rank `n - 1` projector).
pub fn bs_deviation(spec: &DomainSpec, z: &CMat) -> Result<f64> {
    check_shape(spec, z)?;
    let gram = z.adjoint().matmul(z);
    if spec.kind == DomainKind::TypeII && spec.n % 2 == 1 {
        let eig = herm_eig(&gram, 1e-10)?;
        let mut acc = eig.values[0] * eig.values[0];
        for &l in &eig.values[1..] {
            acc += (l - 1.0) * (l - 1.0);
        }
        Ok(acc.sqrt())
    } else {
        Ok((&CMat::identity(spec.n) - &gram).frobenius_norm())
    }
}

/// BS-boundary membership to tolerance `tol`.
pub fn on_bs_boundary(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<bool> {
    require_structure(spec, z, tol)?;
    if spec.kind == DomainKind::TypeII && spec.n % 2 == 1 {
        let eig = herm_eig(&z.adjoint().matmul(z), 1e-10)?;
        Ok(eig.values[0].abs() <= tol && eig.values[1..].iter().all(|l| (l - 1.0).abs() <= tol))
    } else {
        Ok(bs_deviation(spec, z)? <= tol)
    }
}

/// `u1 · z · u2⁻¹ = diag(Id_k, X)` with `X` the diagonal of residual singular values.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Boundary component, counted as in [`boundary_rank`].
    pub t: BoundaryClass,
    /// Singular values of the residual block, descending, all `< 1`.
    pub sv: Vec<f64>,
    /// `m x m` unitary.
    pub u1: CMat,
    /// `n x n` unitary.
    pub u2: CMat,
}

impl CanonicalForm {
    /// Number of unit singular values `k` (`= 2t` for type II).
    pub fn unit_count(&self, spec: &DomainSpec) -> usize {
        match spec.kind {
            DomainKind::TypeII => 2 * self.t.0,
            _ => self.t.0,
        }
    }

    /// The canonical matrix `diag(Id_k, X)` of shape `m x n`.
    pub fn canonical_matrix(&self, spec: &DomainSpec) -> CMat {
        let k = self.unit_count(spec);
        let mut diag: Vec<Complex64> = (0..k).map(|_| c64(1.0, 0.0)).collect();
        diag.extend(self.sv.iter().map(|&s| c64(s, 0.0)));
        CMat::from_diag(spec.m, spec.n, &diag)
    }

    /// `u1⁻¹ · diag(Id_k, X) · u2`, which reproduces the original point.
    pub fn reconstruct(&self, spec: &DomainSpec) -> CMat {
        self.u1
            .adjoint()
            .matmul(&self.canonical_matrix(spec))
            .matmul(&self.u2)
    }
}

/// Diagonalises `z` by the compact subgroup action `z -> u1 z u2⁻¹` (a singular value
/// decomposition with singular values descending).
pub fn canonical_form(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<CanonicalForm> {
    require_structure(spec, z, tol)?;
    let s = svd(z)?;
    let top = s.sigma[0];
    if 1.0 - top * top < -tol {
        return Err(Error::OutsideClosure {
            eigenvalue: 1.0 - top * top,
        });
    }
    let k = s.sigma.iter().filter(|&&x| 1.0 - x * x <= tol).count();
    let t = match spec.kind {
        DomainKind::TypeII => {
            if k % 2 == 1 {
                return Err(Error::OddNullity { nullity: k });
            }
            BoundaryClass(k / 2)
        }
        _ => BoundaryClass(k),
    };
    Ok(CanonicalForm {
        t,
        sv: s.sigma[k..].to_vec(),
        u1: s.u.adjoint(),
        u2: s.v.adjoint(),
    })
}

/// The `2t x 2t` block `[[0, Id_t], [-Id_t, 0]]`.
pub fn j_block(t: usize) -> CMat {
    let mut j = CMat::zeros(2 * t, 2 * t);
    for i in 0..t {
        j[(i, t + i)] = c64(1.0, 0.0);
        j[(t + i, i)] = c64(-1.0, 0.0);
    }
    j
}

/// Leading block of a canonical representative of the component `F_t`.
fn leading_block(kind: DomainKind, t: usize) -> CMat {
    match kind {
        DomainKind::TypeII => j_block(t),
        _ => CMat::identity(t),
    }
}

/// Projects a canonical point `diag(Id_t, X)` (type II: `diag(J_t, X)`) of the component `F_t`
/// onto the smaller domain containing `X`.
pub fn project_component(spec: &DomainSpec, z: &CMat, tol: f64) -> Result<(DomainSpec, CMat)> {
    let t = boundary_rank(spec, z, tol)?.0;
    if t == 0 {
        return Err(Error::NotOnBoundary);
    }
    let k = match spec.kind {
        DomainKind::TypeII => 2 * t,
        _ => t,
    };
    let lead = leading_block(spec.kind, t);
    let mut residual_free = z.clone();
    residual_free.set_block(k, k, &CMat::zeros(spec.m - k, spec.n - k));
    let expected = CMat::block_diag(&lead, &CMat::zeros(spec.m - k, spec.n - k));
    let deviation = (&residual_free - &expected).frobenius_norm();
    if deviation > tol {
        return Err(Error::NotCanonical { deviation });
    }
    let sub = spec.reduced(t).ok_or(Error::NoResidualBlock)?;
    Ok((sub, z.block(k, k, spec.m - k, spec.n - k)))
}

/// Re-embeds a point of the projected domain into the component `F_t`.
pub fn embed_component(spec: &DomainSpec, t: usize, x: &CMat) -> CMat {
    CMat::block_diag(&leading_block(spec.kind, t), x)
}

/// Deterministic interior sample: a complex Gaussian matrix, (anti)symmetrised by type and
/// rescaled so its largest singular value is uniform in `(0, 1)`.
pub fn sample_interior(spec: &DomainSpec, seed: u64) -> CMat {
    let mut rng = rng_from_seed(seed);
    sample_interior_with(spec, &mut rng)
}

pub fn sample_interior_with<R: Rng + ?Sized>(spec: &DomainSpec, rng: &mut R) -> CMat {
    let g = complex_gaussian(spec.m, spec.n, rng);
    let g = match spec.kind {
        DomainKind::TypeI => g,
        DomainKind::TypeII => g.antisymmetrize(),
        DomainKind::TypeIII => g.symmetrize(),
    };
    let radius: f64 = rng.random::<f64>().clamp(1e-12, 1.0 - 1e-6);
    let smax = svd(&g).map(|s| s.sigma[0]).unwrap_or(0.0);
    if smax == 0.0 {
        return CMat::zeros(spec.m, spec.n);
    }
    g.scale_real(radius / smax)
}

/// Type II BS base point: `J_{⌊n/2⌋}`, padded by a zero row and column when `n` is odd.
pub fn type_ii_bs_base(n: usize) -> CMat {
    let l = n / 2;
    CMat::block_diag(&j_block(l), &CMat::zeros(n - 2 * l, n - 2 * l))
}

/// Deterministic BS-boundary sample: `u1 z0 u2⁻¹` (type I), `u J uᵀ` (type II), `u uᵀ`
/// (type III) with Haar unitaries.
pub fn sample_bs_boundary(spec: &DomainSpec, seed: u64) -> CMat {
    let mut rng = rng_from_seed(seed);
    sample_bs_boundary_with(spec, &mut rng)
}

pub fn sample_bs_boundary_with<R: Rng + ?Sized>(spec: &DomainSpec, rng: &mut R) -> CMat {
    match spec.kind {
        DomainKind::TypeI => {
            let u1 = haar_unitary(spec.m, rng);
            let u2 = haar_unitary(spec.n, rng);
            u1.block(0, 0, spec.m, spec.n).matmul(&u2.adjoint())
        }
        DomainKind::TypeII => {
            let u = haar_unitary(spec.n, rng);
            u.matmul(&type_ii_bs_base(spec.n))
                .matmul(&u.transpose())
                .antisymmetrize()
        }
        DomainKind::TypeIII => {
            let u = haar_unitary(spec.n, rng);
            u.matmul(&u.transpose()).symmetrize()
        }
    }
}

/// Real dimensions of a domain and of its BS boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub domain_real: usize,
    pub bs: usize,
}

pub fn dims(spec: &DomainSpec) -> Dims {
    dims_raw(spec.kind, spec.m, spec.n)
}

/// Dimension formulas without validating the dimensions (the type II chain ends at `n = 1`).
pub fn dims_raw(kind: DomainKind, m: usize, n: usize) -> Dims {
    match kind {
        DomainKind::TypeI => Dims {
            domain_real: 2 * m * n,
            bs: n * (2 * m - n),
        },
        DomainKind::TypeII => Dims {
            domain_real: n * n.saturating_sub(1),
            bs: n * n.saturating_sub(1) / 2,
        },
        DomainKind::TypeIII => Dims {
            domain_real: n * (n + 1),
            bs: n * (n + 1) / 2,
        },
    }
}

/// One member of the chain of BS boundaries of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub kind: DomainKind,
    /// Boundary class of the component whose BS boundary this is.
    pub t: usize,
    pub m: usize,
    pub n: usize,
}

impl FamilyMember {
    pub fn dims(&self) -> Dims {
        dims_raw(self.kind, self.m, self.n)
    }

    pub fn model_label(&self) -> alloc::string::String {
        match self.kind {
            DomainKind::TypeI => alloc::format!("KM_{{{},{}}}(I)", self.m, self.n),
            k => alloc::format!("KM_{}({})", self.n, k.roman()),
        }
    }

    pub fn domain_label(&self) -> alloc::string::String {
        match self.kind {
            DomainKind::TypeI => alloc::format!("D^I_{{{},{}}}", self.m, self.n),
            k => alloc::format!("D^{}_{}", k.roman(), self.n),
        }
    }
}

/// Chain of BS boundaries `BS(D), BS(D_{t=1}), ...`: one Kuramoto model per member.
pub fn family_chain(spec: &DomainSpec) -> Vec<FamilyMember> {
    match spec.kind {
        DomainKind::TypeI => (0..spec.n)
            .map(|t| FamilyMember {
                kind: spec.kind,
                t,
                m: spec.m - t,
                n: spec.n - t,
            })
            .collect(),
        DomainKind::TypeII => (0..)
            .map(|t| (t, spec.n as isize - 2 * t as isize))
            .take_while(|&(_, k)| k >= 1)
            .map(|(t, k)| FamilyMember {
                kind: spec.kind,
                t,
                m: k as usize,
                n: k as usize,
            })
            .collect(),
        DomainKind::TypeIII => (0..spec.n)
            .map(|t| FamilyMember {
                kind: spec.kind,
                t,
                m: spec.n - t,
                n: spec.n - t,
            })
            .collect(),
    }
}
