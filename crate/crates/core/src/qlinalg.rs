//! Dense complex linear algebra for one- and two-qubit operators.
//!
//! Only dimensions 2 and 4 are supported. Matrices are stored row-major in a
//! fixed-size buffer so that the hot loops of the trace-distance sweeps never
//! allocate.

use std::fmt::Write as _;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermiticity tolerance applied to every input that must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as "positive semidefinite".
pub const PSD_TOL: f64 = -1e-10;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A 2×2 or 4×4 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<&[C64]> = (0..self.dim).map(|r| self.row(r)).collect();
        f.debug_struct("ComplexMatrix")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; 16],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Build from `dim * dim` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        let mut m = Self::zeros(dim)?;
        m.data[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    /// The projector-like outer product |ψ⟩⟨ψ| (no normalization applied).
    pub fn outer(psi: &[C64]) -> Result<Self> {
        let dim = psi.len();
        let mut m = Self::zeros(dim)?;
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = psi[r] * psi[c].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(r, c)] = self[(c, r)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Elementwise (Schur) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = *self;
        for (z, w) in out.data.iter_mut().zip(other.data.iter()) {
            *z *= w;
        }
        Ok(out)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.as_slice()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |m_ij - conj(m_ji)|` over all entries, diagonal included.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0_f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Kronecker product of two 2×2 matrices.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim * other.dim,
                right: 4,
            });
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Debug dump: one matrix row per line, entries `re+imj` with 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.dim {
            let cells: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:.16e}{:+.16e}j", z.re, z.im))
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = *self;
        for (z, w) in out.data.iter_mut().zip(other.data.iter()) {
            *z -= w;
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: [ZERO; 16],
        };
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = (0..n).map(|k| self[(r, k)] * other[(k, c)]).sum();
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.dim && c < self.dim);
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.dim && c < self.dim);
        &mut self.data[r * self.dim + c]
    }
}

/// Panics on dimension mismatch; use [`ComplexMatrix::checked_sub`] otherwise.
impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs)
            .expect("dimension mismatch in matrix subtraction")
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix addition");
        let mut out = self;
        for (z, w) in out.data.iter_mut().zip(rhs.data.iter()) {
            *z += w;
        }
        out
    }
}

/// Panics on dimension mismatch; use [`ComplexMatrix::checked_mul`] otherwise.
impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs)
            .expect("dimension mismatch in matrix product")
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    let (vals, n) = jacobi_eigenvalues(m)?;
    Ok(vals[..n].to_vec())
}

/// Cyclic complex Jacobi. Returns the eigenvalues sorted ascending in the
/// first `dim` slots. The input is assumed Hermitian; only the upper triangle
/// and the real part of the diagonal are read.
pub(crate) fn jacobi_eigenvalues(m: &ComplexMatrix) -> Result<([f64; 4], usize)> {
    let n = m.dim();
    let mut a = *m;
    for r in 0..n {
        a[(r, r)] = C64::new(m[(r, r)].re, 0.0);
        for c in r + 1..n {
            a[(c, r)] = m[(r, c)].conj();
        }
    }

    let scale = a.frobenius_norm();
    let mut out = [0.0; 4];
    if scale == 0.0 {
        return Ok((out, n));
    }
    let threshold = JACOBI_TOL * scale;

    let off_max = |a: &ComplexMatrix| {
        let mut v = 0.0_f64;
        for r in 0..n {
            for c in r + 1..n {
                v = v.max(a[(r, c)].norm());
            }
        }
        v
    };

    let mut sweeps = 0;
    let mut off = off_max(&a);
    while off >= threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNotConverged {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
        off = off_max(&a);
    }

    for (i, v) in out.iter_mut().take(n).enumerate() {
        *v = a[(i, i)].re;
    }
    out[..n].sort_by(|x, y| x.total_cmp(y));
    Ok((out, n))
}

/// One unitary Jacobi rotation annihilating `a[p][q]`.
///
/// With `a_pq = g e^{iφ}` the rotation is the real Jacobi rotation applied
/// after the phase change `|q⟩ → e^{-iφ}|q⟩`, i.e. `V = diag(.., e^{-iφ}, ..) J`.
#[inline]
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase_conj = apq.conj() / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Columns of V: v_p = c e_p - s e^{-iφ} e_q, v_q = s e_p + c e^{-iφ} e_q.
    let vpp = C64::new(c, 0.0);
    let vqp = -phase_conj * s;
    let vpq = C64::new(s, 0.0);
    let vqq = phase_conj * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// `½ tr|m|` for a Hermitian operator.
pub fn half_trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    half_trace_norm_unchecked(m)
}

/// Same as [`half_trace_norm`] without the Hermiticity check, for operators
/// Hermitian by construction.
pub(crate) fn half_trace_norm_unchecked(m: &ComplexMatrix) -> Result<f64> {
    let (vals, n) = jacobi_eigenvalues(m)?;
    Ok(0.5 * vals[..n].iter().map(|v| v.abs()).sum::<f64>())
}

/// Subsystem label for two-qubit operators. [`Subsystem::First`] is the
/// leftmost tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let deviation = mat.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput { deviation });
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let (vals, _) = jacobi_eigenvalues(&mat)?;
        if vals[0] < PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:e}",
                vals[0]
            )));
        }
        Ok(Self { mat })
    }

    /// Pure state |ψ⟩⟨ψ|; ψ must be normalized within 1e-12.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            mat: ComplexMatrix::outer(psi)?,
        })
    }

    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.mat)
    }

    /// `U ρ U†`. `u` is assumed unitary; the result is re-validated.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.checked_mul(&self.mat)?.checked_mul(&u.adjoint())?;
        Self::new(m)
    }
}

/// `D(a, b) = ½ tr|a - b|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let diff = a.mat.checked_sub(&b.mat)?;
    half_trace_norm_unchecked(&diff)
}

/// Reduced state of one qubit of a two-qubit density matrix.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let m = &rho.mat;
    let mut out = ComplexMatrix::zeros(2)?;
    // Basis index = 2 * (first qubit) + (second qubit).
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::First => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
                Subsystem::Second => m[(i, j)] + m[(2 + i, 2 + j)],
            };
        }
    }
    Ok(DensityMatrix::new_unchecked(out))
}
