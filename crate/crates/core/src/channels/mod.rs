//! Channel representations and the conversions between them.
//!
//! A map Φ on d×d operators is held in one of three forms:
//!
//! * [`KrausChannel`]: `Φ(ρ) = Σ_k K_k ρ K_k^†`;
//! * [`Superoperator`]: a d²×d² matrix acting on `vec(ρ)` (column stacking);
//! * [`ChoiOperator`]: `J(Φ) = (Φ ⊗ I)(|Ω⟩⟨Ω|)` with `|Ω⟩ = d^{-1/2} Σ_i |i⟩|i⟩`.
//!
//! Because `|Ω⟩` is already normalized, `Tr J(Φ) = 1` for a trace-preserving
//! map, and the normalized operator `Ω_Φ = J(Φ)/d` has trace `1/d`. Both are
//! exposed; positivity verdicts do not depend on the overall scale.
//!
//! Index layout of the Choi matrix: row `a·d + i` pairs output index `a` of
//! Φ with the reference index `i`, so
//! `J[a·d + i, b·d + j] = Φ(|i⟩⟨j|)[a, b] / d = S[a + d·b, i + d·j] / d`.

mod serial;

pub use serial::{ChannelFile, Entries, Representation, CONVENTION};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{hermitian_eigen, hermitian_eigenvalues, invert, ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Kraus representation `{K_k}` of a CP map on d×d operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    dim: usize,
    ops: Vec<ComplexMatrix<T>>,
    trace_preserving: bool,
}

impl<T: Real> KrausChannel<T> {
    /// Validates shapes and `Σ K^†K ≤ I`. Equality within tolerance marks the
    /// channel trace preserving; a strict inequality is kept as trace non-increasing.
    pub fn new(ops: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        let dim = first.rows();
        if dim == 0 {
            return Err(Error::InvalidDimension("Kraus operators of dimension 0".into()));
        }
        for k in &ops {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("{dim}x{dim}"),
                    found: format!("{}x{}", k.rows(), k.cols()),
                });
            }
        }
        let completeness = kraus_completeness(&ops, dim);
        let tol = T::consistency_tol();
        let trace_preserving = completeness.max_abs_diff(&ComplexMatrix::identity(dim)) <= tol;
        if !trace_preserving {
            let slack = &ComplexMatrix::identity(dim) - &completeness;
            let min = hermitian_eigenvalues(&HermitianMatrix::symmetrize(slack))?[0];
            if min < -tol {
                return Err(Error::Precondition(format!(
                    "Kraus operators increase trace (min eigenvalue of I - ΣK†K is {min})"
                )));
            }
        }
        Ok(Self { dim, ops, trace_preserving })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix<T>] {
        &self.ops
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| &acc + &k.matmul(rho).matmul(&k.adjoint()))
    }

    pub fn to_superop(&self) -> Superoperator<T> {
        kraus_to_superop(self)
    }
}

fn kraus_completeness<T: Real>(ops: &[ComplexMatrix<T>], dim: usize) -> ComplexMatrix<T> {
    ops.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, k| &acc + &k.adjoint().matmul(k))
}

/// Matrix of a linear map acting on column-stacked operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn new(dim: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("superoperator on dimension 0".into()));
        }
        let n = dim * dim;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim * dim) }
    }

    /// Builds the superoperator of an arbitrary linear action by evaluating it
    /// on the d² matrix units `|i⟩⟨j|`.
    pub fn from_action(dim: usize, action: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>) -> Self {
        let n = dim * dim;
        let mut matrix = ComplexMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let mut unit = ComplexMatrix::zeros(dim, dim);
                unit[(i, j)] = Complex::one();
                let image = action(&unit).vec_col();
                let col = i + dim * j;
                for (row, z) in image.into_iter().enumerate() {
                    matrix[(row, col)] = z;
                }
            }
        }
        Self { dim, matrix }
    }

    /// ρ ↦ ρᵀ.
    pub fn transpose_map(dim: usize) -> Self {
        Self::from_action(dim, |rho| rho.transpose())
    }

    /// ρ ↦ Tr(ρ) I/d.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let k = lit::<T>(1.0) / T::from_usize(dim).expect("dim");
        Self::from_action(dim, |rho| ComplexMatrix::identity(dim).scale(rho.trace() * k))
    }

    /// ρ ↦ U ρ U^†.
    pub fn unitary_conjugation(u: &ComplexMatrix<T>) -> Result<Self> {
        KrausChannel::new(vec![u.clone()]).map(|k| k.to_superop())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} operator", self.dim),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        ComplexMatrix::from_vec_col(self.dim, &self.matrix.mat_vec(&rho.vec_col()))
    }

    /// `(1 - λ)·self + λ·other`.
    pub fn mix(&self, other: &Self, lambda: T) -> Result<Self> {
        check_same_dim(self, other)?;
        let matrix = &self.matrix.scale_real(T::one() - lambda) + &other.matrix.scale_real(lambda);
        Ok(Self { dim: self.dim, matrix })
    }

    pub fn scale(&self, k: T) -> Self {
        Self { dim: self.dim, matrix: self.matrix.scale_real(k) }
    }

    pub fn compose(&self, inner: &Self) -> Result<Self> {
        compose(self, inner)
    }

    /// Inverse map; fails with [`Error::SingularMap`] above `cond_limit`.
    pub fn inverse(&self, cond_limit: T) -> Result<Self> {
        Ok(Self { dim: self.dim, matrix: invert(&self.matrix, cond_limit)? })
    }

    pub fn choi(&self) -> ChoiOperator<T> {
        choi_from_superop(self)
    }
}

fn check_same_dim<T: Real>(a: &Superoperator<T>, b: &Superoperator<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: format!("dimension {}", a.dim), found: format!("dimension {}", b.dim) });
    }
    Ok(())
}

/// Choi operator `J(Φ)`, or `Ω_Φ = J(Φ)/d` when `normalized` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiOperator<T: Real> {
    dim: usize,
    matrix: ComplexMatrix<T>,
    normalized: bool,
}

impl<T: Real> ChoiOperator<T> {
    pub fn new(dim: usize, matrix: ComplexMatrix<T>, normalized: bool) -> Result<Self> {
        let n = dim * dim;
        if dim == 0 || matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { dim, matrix, normalized })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Hermitian view; fails if the source map does not preserve Hermiticity.
    pub fn hermitian(&self) -> Result<HermitianMatrix<T>> {
        HermitianMatrix::new(self.matrix.clone())
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(&self.hermitian()?)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?[0])
    }
}

/// Outcome of the Choi positivity test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpVerdict<T> {
    pub completely_positive: bool,
    pub min_eigenvalue: T,
}

/// `|Ω⟩ = d^{-1/2} Σ_i |i⟩ ⊗ |i⟩`.
pub fn max_entangled_state<T: Real>(d: usize) -> Result<Vec<Complex<T>>> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let amp = Complex::new(T::one() / T::from_usize(d).expect("dim").sqrt(), T::zero());
    let mut v = vec![Complex::zero(); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    Ok(v)
}

/// Unnormalized Choi operator `J(Φ) = (Φ ⊗ I)(|Ω⟩⟨Ω|)`.
pub fn choi_from_superop<T: Real>(s: &Superoperator<T>) -> ChoiOperator<T> {
    let d = s.dim;
    let inv_d = T::one() / T::from_usize(d).expect("dim");
    let matrix = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (a, i) = (row / d, row % d);
        let (b, j) = (col / d, col % d);
        s.matrix[(a + d * b, i + d * j)] * inv_d
    });
    ChoiOperator { dim: d, matrix, normalized: false }
}

/// `Ω_Φ = J(Φ)/d`. Already-normalized input is returned unchanged.
pub fn normalize_choi<T: Real>(j: &ChoiOperator<T>) -> ChoiOperator<T> {
    if j.normalized {
        return j.clone();
    }
    let inv_d = T::one() / T::from_usize(j.dim).expect("dim");
    ChoiOperator { dim: j.dim, matrix: j.matrix.scale_real(inv_d), normalized: true }
}

/// Inverse reshuffle of [`choi_from_superop`], honoring the `normalized` flag.
pub fn superop_from_choi<T: Real>(j: &ChoiOperator<T>) -> Superoperator<T> {
    let d = j.dim;
    let df = T::from_usize(d).expect("dim");
    let k = if j.normalized { df * df } else { df };
    let matrix = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (a, b) = (row % d, row / d);
        let (i, jj) = (col % d, col / d);
        j.matrix[(a * d + i, b * d + jj)] * k
    });
    Superoperator { dim: d, matrix }
}

/// `S = Σ_k conj(K_k) ⊗ K_k`, the column-stacking form of `ρ ↦ Σ K ρ K^†`.
pub fn kraus_to_superop<T: Real>(k: &KrausChannel<T>) -> Superoperator<T> {
    let n = k.dim * k.dim;
    let matrix = k
        .ops
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, op| &acc + &op.conj().kron(op));
    Superoperator { dim: k.dim, matrix }
}

/// Choi's criterion: CP iff the minimum eigenvalue is at least `-tol`.
pub fn is_completely_positive<T: Real>(j: &ChoiOperator<T>, tol: T) -> Result<CpVerdict<T>> {
    let min_eigenvalue = j.min_eigenvalue()?;
    Ok(CpVerdict { completely_positive: min_eigenvalue >= -tol, min_eigenvalue })
}

/// Trace preservation via `Tr_out J(Φ) = I/d`.
pub fn is_trace_preserving<T: Real>(s: &Superoperator<T>, tol: T) -> bool {
    let d = s.dim;
    let j = choi_from_superop(s);
    let target = T::one() / T::from_usize(d).expect("dim");
    for i in 0..d {
        for jj in 0..d {
            let partial = (0..d).fold(Complex::<T>::zero(), |acc, a| acc + j.matrix[(a * d + i, a * d + jj)]);
            let expected = if i == jj { target } else { T::zero() };
            if (partial - Complex::new(expected, T::zero())).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// `a ∘ b`: apply `b` first.
pub fn compose<T: Real>(a: &Superoperator<T>, b: &Superoperator<T>) -> Result<Superoperator<T>> {
    check_same_dim(a, b)?;
    Ok(Superoperator { dim: a.dim, matrix: a.matrix.matmul(&b.matrix) })
}

/// Random trace-preserving CP channel with `rank` Kraus operators.
///
/// Draws a stack of complex Gaussian matrices, then whitens them with
/// `(Σ G^†G)^{-1/2}` so the completeness relation holds exactly.
pub fn random_cp_channel<T: Real>(d: usize, rank: usize, seed: u64) -> Result<KrausChannel<T>> {
    if d == 0 {
        return Err(Error::InvalidDimension("random channel on dimension 0".into()));
    }
    if rank == 0 || rank > d * d {
        return Err(Error::InvalidParameter(format!("Kraus rank {rank} outside 1..={}", d * d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> T { lit(StandardNormal.sample(&mut rng)) };
    let raw: Vec<ComplexMatrix<T>> = (0..rank)
        .map(|_| ComplexMatrix::from_fn(d, d, |_, _| Complex::new(gauss(), gauss())))
        .collect();

    let completeness = HermitianMatrix::symmetrize(kraus_completeness(&raw, d));
    let (vals, vecs) = hermitian_eigen(&completeness)?;
    let inv_sqrt: Vec<T> = vals.iter().map(|&v| T::one() / v.sqrt()).collect();
    let whitening = vecs.matmul(&ComplexMatrix::from_diag(&inv_sqrt)).matmul(&vecs.adjoint());
    KrausChannel::new(raw.iter().map(|g| g.matmul(&whitening)).collect())
}

/// Any of the three representations, as read from a channel file.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel<T: Real> {
    Kraus(KrausChannel<T>),
    Superop(Superoperator<T>),
    Choi(ChoiOperator<T>),
}

impl<T: Real> Channel<T> {
    pub fn dim(&self) -> usize {
        match self {
            Channel::Kraus(k) => k.dim(),
            Channel::Superop(s) => s.dim(),
            Channel::Choi(j) => j.dim(),
        }
    }

    pub fn superoperator(&self) -> Superoperator<T> {
        match self {
            Channel::Kraus(k) => k.to_superop(),
            Channel::Superop(s) => s.clone(),
            Channel::Choi(j) => superop_from_choi(j),
        }
    }
}
