//! Dense complex linear algebra for small operators.
//!
//! Matrices are stored row-major. Superoperators throughout the crate act on
//! column-stacked density operators: `vec(ρ)[i + d·j] = ρ[i][j]`, so that
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`. See [`ComplexMatrix::vec_col`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const MAX_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
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

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", entries.len()),
            });
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols.max(1), col: k % cols.max(1) });
        }
        Ok(Self { rows, cols, data: entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex::new(diag[i], T::zero()) } else { Complex::zero() })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| Complex::new(lit(x), T::zero())).collect())
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
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
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * k).collect() }
    }

    pub fn scale_real(&self, k: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * k).collect() }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max)
    }

    /// `max |A - A^†|` entrywise.
    pub fn hermiticity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut defect = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                defect = defect.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn is_hermitian(&self, rel_tol: T) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(T::one())
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    /// Column-stacked vectorization: `out[i + rows·j] = self[(i, j)]`.
    pub fn vec_col(&self) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    /// Inverse of [`vec_col`](Self::vec_col) for a `d × d` matrix.
    pub fn from_vec_col(d: usize, v: &[Complex<T>]) -> Result<Self> {
        if v.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: format!("vector of length {}", d * d),
                found: format!("length {}", v.len()),
            });
        }
        Ok(Self::from_fn(d, d, |i, j| v[i + d * j]))
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shapes differ");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shapes differ");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.scale_real(-T::one())
    }
}

/// Hermitian matrix. Construction symmetrizes the input as `(A + A^†)/2`
/// and keeps the defect measured before symmetrization.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
    defect: T,
}

impl<T: Real> HermitianMatrix<T> {
    /// Accepts `a` if `max |A - A^†| ≤ hermiticity_tol · max|entry|`.
    pub fn new(a: ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidDimension(format!("{}x{} matrix is not square", a.rows, a.cols)));
        }
        let defect = a.hermiticity_defect();
        let limit = T::hermiticity_tol() * a.max_abs();
        if defect > limit {
            return Err(Error::NotHermitian {
                defect: defect.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::symmetrize(a))
    }

    /// Projects onto the Hermitian part without checking the defect.
    pub fn symmetrize(a: ComplexMatrix<T>) -> Self {
        assert!(a.is_square(), "symmetrize: matrix must be square");
        let defect = a.hermiticity_defect();
        let half = lit::<T>(0.5);
        let matrix = ComplexMatrix::from_fn(a.rows, a.cols, |i, j| (a[(i, j)] + a[(j, i)].conj()) * half);
        Self { matrix, defect }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// Hermiticity defect of the matrix this was built from.
    pub fn defect(&self) -> T {
        self.defect
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(self)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?[0])
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Real>(a: &HermitianMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_eigen(a)?.0)
}

/// Ascending eigenvalues and the unitary whose columns are the matching eigenvectors.
///
/// Cyclic complex Jacobi. Each rotation first removes the phase of the
/// pivot `a_pq` with `diag(1, e^{-iφ})`, then applies the real symmetric
/// Jacobi rotation to the resulting real 2×2 block.
pub fn hermitian_eigen<T: Real>(a: &HermitianMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    let n = a.dim();
    let mut m = a.matrix.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = T::epsilon() * scale * T::from_usize(n.max(1)).expect("dimension fits in float");

    let off_norm = |m: &ComplexMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&m);
        if off <= threshold || scale.is_zero() {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off.to_f64().unwrap_or(f64::NAN) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs <= T::min_positive_value() {
                    continue;
                }
                let phase = b / babs;
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let theta = (beta - alpha) / (lit::<T>(2.0) * babs);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // V = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let vpp = Complex::new(cs, T::zero());
                let vpq = Complex::new(sn, T::zero());
                let vqp = phase.conj() * (-sn);
                let vqq = phase.conj() * cs;

                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * vpp + miq * vqp;
                    m[(i, q)] = mip * vpq + miq * vqq;
                    let zip = v[(i, p)];
                    let ziq = v[(i, q)];
                    v[(i, p)] = zip * vpp + ziq * vqp;
                    v[(i, q)] = zip * vpq + ziq * vqq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = vpp.conj() * mpj + vqp.conj() * mqj;
                    m[(q, j)] = vpq.conj() * mpj + vqq.conj() * mqj;
                }
                m[(p, q)] = Complex::zero();
                m[(q, p)] = Complex::zero();
                m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
                m[(q, q)] = Complex::new(m[(q, q)].re, T::zero());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok((values, vectors))
}

/// Sum of singular values.
///
/// Hermitian input takes the `Σ|λ|` route; anything else goes through the
/// eigenvalues of `A^† A`.
pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    if a.is_hermitian(T::hermiticity_tol()) {
        let h = HermitianMatrix::symmetrize(a.clone());
        return Ok(hermitian_eigenvalues(&h)?.into_iter().map(T::abs).sum());
    }
    let gram = HermitianMatrix::symmetrize(a.adjoint().matmul(a));
    Ok(hermitian_eigenvalues(&gram)?.into_iter().map(|x| x.max(T::zero()).sqrt()).sum())
}

/// Condition estimate `‖A‖₁ ‖A⁻¹‖₁` returned alongside the inverse.
pub fn invert_with_condition<T: Real>(a: &ComplexMatrix<T>, cond_limit: T) -> Result<(ComplexMatrix<T>, T)> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    let n = a.rows;
    let mut work = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    let singular = || Error::SingularMap { condition: f64::INFINITY };

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| work[(i, col)].norm().partial_cmp(&work[(j, col)].norm()).expect("finite"))
            .expect("non-empty range");
        let pivot = work[(pivot_row, col)];
        if pivot.norm() <= T::min_positive_value() {
            return Err(singular());
        }
        if pivot_row != col {
            for j in 0..n {
                work.data.swap(col * n + j, pivot_row * n + j);
                inv.data.swap(col * n + j, pivot_row * n + j);
            }
        }
        let recip = pivot.inv();
        for j in 0..n {
            work[(col, j)] = work[(col, j)] * recip;
            inv[(col, j)] = inv[(col, j)] * recip;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = work[(i, col)];
            if factor.is_zero() {
                continue;
            }
            for j in 0..n {
                let w = work[(col, j)];
                let v = inv[(col, j)];
                work[(i, j)] = work[(i, j)] - factor * w;
                inv[(i, j)] = inv[(i, j)] - factor * v;
            }
        }
    }

    if inv.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(singular());
    }
    let condition = a.norm_one() * inv.norm_one();
    if !condition.is_finite() || condition > cond_limit {
        return Err(Error::SingularMap { condition: condition.to_f64().unwrap_or(f64::INFINITY) });
    }
    Ok((inv, condition))
}

/// Matrix inverse by Gauss–Jordan elimination with partial pivoting.
///
/// Fails with [`Error::SingularMap`] when the 1-norm condition estimate
/// exceeds `cond_limit`.
pub fn invert<T: Real>(a: &ComplexMatrix<T>, cond_limit: T) -> Result<ComplexMatrix<T>> {
    invert_with_condition(a, cond_limit).map(|(inv, _)| inv)
}
