//! Dense complex matrices sized for the domains in this crate (order <= ~16).
//!
//! Everything here is a pure function of its inputs. Hermitian spectra come
//! from a cyclic complex Jacobi sweep and singular value decompositions from
//! the one-sided (Hestenes) variant of the same rotation, so both stay
//! accurate to a few ulps at these sizes without pulling in a LAPACK.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Default absolute eigenvalue tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 64;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries. Panics if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "CMat::from_vec: length mismatch");
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "CMat::from_rows: ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "CMat::from_real_rows: ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self { rows: r, cols: c, data }
    }

    /// Rectangular `rows x cols` matrix with `diag` on the main diagonal.
    pub fn from_diag(rows: usize, cols: usize, diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn scalar(z: Complex64) -> Self {
        Self::from_vec(1, 1, vec![z])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows == rows && self.cols == cols {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Conjugate transpose `M†`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`, in place.
    pub fn axpy(&mut self, s: Complex64, other: &CMat) {
        assert_eq!(self.shape(), other.shape(), "CMat::axpy: shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "CMat::block out of range");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMat) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "CMat::set_block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = Self::zeros(a.rows + c.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        m.set_block(a.rows, 0, c);
        m.set_block(a.rows, a.cols, d);
        m
    }

    /// Block diagonal `diag(a, b)`, either block may be rectangular.
    pub fn block_diag(a: &CMat, b: &CMat) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(a.rows, a.cols, b);
        m
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(
            self.cols, rhs.rows,
            "CMat::matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `(self - selfᵀ) / 2`; exactly antisymmetric in floating point.
    pub fn antisymmetrize(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] - self[(j, i)]) * 0.5)
    }

    /// `(self + selfᵀ) / 2`; exactly symmetric in floating point.
    pub fn symmetrize(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)]) * 0.5)
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        assert!(self.is_square(), "CMat::det on non-square matrix");
        let lu = Lu::new(self);
        let mut d = if lu.sign_flip { -Complex64::new(1.0, 0.0) } else { Complex64::new(1.0, 0.0) };
        for i in 0..self.rows {
            d *= lu.lu[(i, i)];
        }
        d
    }

    /// Inverse by LU with partial pivoting; `None` if a pivot is exactly zero.
    pub fn inverse(&self) -> Option<CMat> {
        assert!(self.is_square(), "CMat::inverse on non-square matrix");
        let lu = Lu::new(self);
        if lu.singular {
            return None;
        }
        let n = self.rows;
        let mut inv = CMat::zeros(n, n);
        let mut e = vec![Complex64::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = Complex64::zero());
            e[j] = Complex64::new(1.0, 0.0);
            let x = lu.solve(&e);
            inv.set_column(j, &x);
        }
        Some(inv)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a CMat> for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &'a CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a CMat> for &CMat {
    type Output = CMat;
    fn add(self, rhs: &'a CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "CMat add: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMat> for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &'a CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "CMat sub: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale_real(-1.0)
    }
}

struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    sign_flip: bool,
    singular: bool,
}

impl Lu {
    fn new(m: &CMat) -> Self {
        let n = m.rows;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flip = false;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm()))
                .unwrap_or(k);
            if lu[(p, k)].is_zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign_flip = !sign_flip;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Lu { lu, perm, sign_flip, singular }
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

/// Solves `X · den = num` for `X`, i.e. returns `num · den⁻¹`.
pub fn solve_right(num: &CMat, den: &CMat) -> Option<CMat> {
    assert!(den.is_square() && num.cols == den.rows, "solve_right: shape mismatch");
    // X den = num  <=>  denᵀ Xᵀ = numᵀ
    let lu = Lu::new(&den.transpose());
    if lu.singular {
        return None;
    }
    let mut out = CMat::zeros(num.rows, num.cols);
    for i in 0..num.rows {
        let row: Vec<Complex64> = (0..num.cols).map(|j| num[(i, j)]).collect();
        let x = lu.solve(&row);
        for (j, v) in x.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Some(out)
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix: `H = U · diag(values) · U†`.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMat,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `U · diag(f(λ)) · U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let u = &self.vectors;
        let n = u.rows();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMat::from_fn(n, n, |i, j| {
            (0..n).map(|k| u[(i, k)] * fv[k] * u[(j, k)].conj()).sum()
        })
    }
}

/// Rotation zeroing the off-diagonal entry of the Hermitian 2x2 `[[app, apq], [conj(apq), aqq]]`.
/// Returns `(c, s, phase)` with `phase = apq / |apq|`; the rotation acting on columns p, q is
/// `col_p' = c col_p - s conj(phase) col_q`, `col_q' = s phase col_p + c col_q`.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let mag = apq.norm();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, phase)
}

/// Hermitian eigen-decomposition by cyclic complex Jacobi rotations.
///
/// Fails with `NotHermitian` when `‖H − H†‖_F > tol · max(‖H‖_F, 1)`.
pub fn herm_eig(h: &CMat, tol: f64) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch {
            expected_rows: h.rows,
            expected_cols: h.rows,
            rows: h.rows,
            cols: h.cols,
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = h.frobenius_norm();
    let dev = (h - &h.adjoint()).frobenius_norm();
    if dev > tol * norm.max(1.0) {
        return Err(Error::NotHermitian {
            deviation: dev / norm.max(f64::MIN_POSITIVE),
        });
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = CMat::identity(n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, ph) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                // A <- R† A R with R columns: e_p -> c e_p - s conj(ph) e_q, e_q -> s ph e_p + c e_q
                let r_qp = -ph.conj() * s;
                let r_pq = ph * s;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * r_qp;
                    a[(k, q)] = akp * r_pq + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * r_qp.conj();
                    a[(q, k)] = apk * r_pq.conj() + aqk * c;
                }
                a[(p, q)] = Complex64::zero();
                a[(q, p)] = Complex64::zero();
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * r_qp;
                    v[(k, q)] = vkp * r_pq + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

/// True iff the smallest eigenvalue of the Hermitian `h` exceeds `tol`.
pub fn is_positive_definite(h: &CMat, tol: f64) -> Result<bool> {
    Ok(herm_eig(h, hermitian_tol(tol))?.min() > tol)
}

/// Symmetry tolerance used for Hermitian preconditions; eigenvalue tolerances are
/// absolute and usually much looser than the rounding left by `I - zz†`.
#[inline]
fn hermitian_tol(tol: f64) -> f64 {
    tol.max(1e-10)
}

/// `H^{-1/2}` for Hermitian positive definite `H`.
pub fn inv_sqrt_psd(h: &CMat, tol: f64) -> Result<CMat> {
    let eig = herm_eig(h, hermitian_tol(tol))?;
    if eig.min() <= tol {
        return Err(Error::SingularMatrix {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.map(|l| 1.0 / l.sqrt()))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the [13/13] Padé approximant.
pub fn mat_exp(x: &CMat) -> Result<CMat> {
    if !x.is_square() {
        return Err(Error::ShapeMismatch {
            expected_rows: x.rows,
            expected_cols: x.rows,
            rows: x.rows,
            cols: x.cols,
        });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = x.rows;
    let norm = x.norm_1();
    let s = if norm > PADE13_THETA {
        libm::ceil(libm::log2(norm / PADE13_THETA)) as i32
    } else {
        0
    };
    let a = x.scale_real(libm::pow(2.0, -(s as f64)));
    let b = &PADE13;
    let id = CMat::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut m = a6.scale_real(c6);
        m.axpy(c64(c4, 0.0), &a4);
        m.axpy(c64(c2, 0.0), &a2);
        if c0 != 0.0 {
            m.axpy(c64(c0, 0.0), &id);
        }
        m
    };
    let mut u_inner = &a6 * &lin(b[13], b[11], b[9], 0.0);
    u_inner = &u_inner + &lin(b[7], b[5], b[3], b[1]);
    let u = &a * &u_inner;
    let mut v = &a6 * &lin(b[12], b[10], b[8], 0.0);
    v = &v + &lin(b[6], b[4], b[2], b[0]);
    let p = &v + &u;
    let q = &v - &u;
    // r = q^{-1} p  <=>  solve on the left; use (pᵀ q^{-T})ᵀ
    let mut r = solve_right(&p.transpose(), &q.transpose())
        .ok_or(Error::SingularMatrix { min_eigenvalue: 0.0 })?
        .transpose();
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Unitary polar factor `W = Z (Z†Z)^{-1/2}` of a tall matrix: the nearest matrix with
/// orthonormal columns in Frobenius norm.
pub fn polar_unitary_factor(z: &CMat, tol: f64) -> Result<CMat> {
    if z.rows < z.cols {
        return Err(Error::ShapeMismatch {
            expected_rows: z.cols,
            expected_cols: z.cols,
            rows: z.rows,
            cols: z.cols,
        });
    }
    let gram = z.adjoint().matmul(z);
    let eig = herm_eig(&gram, hermitian_tol(tol))?;
    if eig.min() <= tol {
        return Err(Error::RankDeficient {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(z.matmul(&eig.map(|l| 1.0 / l.sqrt())))
}

/// Partial isometry closest to `z` among those of rank `rank`: keeps the `rank` largest
/// singular directions with unit singular values and zeros the rest.
///
/// Computed as `z · f(z†z)` with `f` the inverse square root on the retained eigenspace and
/// zero elsewhere, so any (anti)symmetry of a square `z` is inherited.
pub fn partial_isometry_factor(z: &CMat, rank: usize, tol: f64) -> Result<CMat> {
    let n = z.cols;
    assert!(rank <= n, "partial_isometry_factor: rank {rank} > {n}");
    let gram = z.adjoint().matmul(z);
    let eig = herm_eig(&gram, hermitian_tol(tol))?;
    let cut = n - rank;
    if rank > 0 && eig.values[cut] <= tol {
        return Err(Error::RankDeficient {
            min_eigenvalue: eig.values[cut],
        });
    }
    let u = &eig.vectors;
    let f = CMat::from_fn(n, n, |i, j| {
        (cut..n)
            .map(|k| u[(i, k)] * (1.0 / eig.values[k].sqrt()) * u[(j, k)].conj())
            .sum()
    });
    Ok(z.matmul(&f))
}

/// Thin-plus-completion singular value decomposition `Z = U Σ V†` of an `m x n` matrix, `m >= n`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `m x m` unitary.
    pub u: CMat,
    /// `n` singular values, descending.
    pub sigma: Vec<f64>,
    /// `n x n` unitary.
    pub v: CMat,
}

/// One-sided Jacobi SVD for tall matrices. Left singular vectors for zero singular values
/// (and the `m - n` trailing columns) are completed by Gram-Schmidt against the standard basis.
/// Each left singular vector is phase-normalised so its first non-negligible entry is real
/// positive.
pub fn svd(z: &CMat) -> Result<Svd> {
    let (m, n) = z.shape();
    if m < n {
        return Err(Error::ShapeMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: m,
            cols: n,
        });
    }
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut w = z.clone();
    let mut v = CMat::identity(n);
    let scale = z.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::zero();
                for k in 0..m {
                    alpha += w[(k, p)].norm_sqr();
                    beta += w[(k, q)].norm_sqr();
                    gamma += w[(k, p)].conj() * w[(k, q)];
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE * scale
                {
                    continue;
                }
                rotated = true;
                let (c, s, ph) = jacobi_rotation(alpha, beta, gamma);
                let r_qp = -ph.conj() * s;
                let r_pq = ph * s;
                for k in 0..m {
                    let wp = w[(k, p)];
                    let wq = w[(k, q)];
                    w[(k, p)] = wp * c + wq * r_qp;
                    w[(k, q)] = wp * r_pq + wq * c;
                }
                for k in 0..n {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = vp * c + vq * r_qp;
                    v[(k, q)] = vp * r_pq + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut v_sorted = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let negligible = smax * (m as f64) * f64::EPSILON * 16.0;

    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for (jj, &j) in order.iter().enumerate() {
        if sigma[jj] > negligible && sigma[jj] > 0.0 {
            let inv = 1.0 / sigma[jj];
            cols.push((0..m).map(|k| w[(k, j)] * inv).collect());
        } else {
            break;
        }
    }
    let rank = cols.len();
    complete_orthonormal(&mut cols, m);

    let mut u = CMat::zeros(m, m);
    for (j, col) in cols.iter().enumerate() {
        let lead = col.iter().find(|x| x.norm() > 1e-12).copied().unwrap_or(c64(1.0, 0.0));
        let ph = (lead / lead.norm()).conj();
        for k in 0..m {
            u[(k, j)] = col[k] * ph;
        }
        if j < n {
            for k in 0..n {
                v_sorted[(k, j)] *= ph;
            }
        }
    }
    let mut sigma = sigma;
    for s in sigma.iter_mut().skip(rank) {
        *s = 0.0_f64.max(*s);
    }
    Ok(Svd {
        u,
        sigma,
        v: v_sorted,
    })
}

/// Extends an orthonormal list of vectors in `C^m` to a basis using the standard basis.
fn complete_orthonormal(cols: &mut Vec<Vec<Complex64>>, m: usize) {
    let mut e = 0;
    while cols.len() < m && e < m {
        let mut x = vec![Complex64::zero(); m];
        x[e] = c64(1.0, 0.0);
        e += 1;
        for _ in 0..2 {
            for c in cols.iter() {
                let proj: Complex64 = c.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi -= proj * ci;
                }
            }
        }
        let nrm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            cols.push(x.into_iter().map(|v| v / nrm).collect());
        }
    }
}

/// Gram-Schmidt QR (two passes) of a square matrix; `R` has a real positive diagonal.
pub fn qr_gram_schmidt(a: &CMat) -> (CMat, CMat) {
    let (m, n) = a.shape();
    let mut q = CMat::zeros(m, n);
    let mut r = CMat::zeros(n, n);
    for j in 0..n {
        let mut x = a.column(j);
        for _ in 0..2 {
            for i in 0..j {
                let proj: Complex64 = (0..m).map(|k| q[(k, i)].conj() * x[k]).sum();
                r[(i, j)] += proj;
                for (k, xk) in x.iter_mut().enumerate() {
                    *xk -= proj * q[(k, i)];
                }
            }
        }
        let nrm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        r[(j, j)] = c64(nrm, 0.0);
        for (k, xk) in x.iter().enumerate() {
            q[(k, j)] = xk / nrm;
        }
    }
    (q, r)
}
