//! Map-dependent characteristic functions and their Gram matrices.
//!
//! For a channel Φ on d×d operators with normalized Choi operator `Ω_Φ`,
//! and a unitary operator basis `{U_μ}` of the doubled space (D = d²):
//!
//! * `χ_Φ(U_μ) = Tr(Ω_Φ U_μ)`
//! * `G_μν = Tr(Ω_Φ U_μ^† U_ν)`
//!
//! `G ⪰ 0` exactly when Φ is completely positive. With Hilbert–Schmidt
//! orthogonal bases (`Tr(U_μ^† U_ν) = D δ_μν`) the spectrum of `G` is the
//! spectrum of `Ω_Φ` scaled by `D`, each eigenvalue repeated `D` times.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::algebra::{hermitian_eigenvalues, kron, ComplexMatrix, HermitianMatrix};
use crate::channels::{choi_from_superop, is_trace_preserving, normalize_choi, ChoiOperator, Superoperator};
use crate::error::{Error, Result};
use crate::scalar::{c, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Pauli,
    Weyl,
    Custom,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Pauli => "pauli",
            BasisKind::Weyl => "weyl",
            BasisKind::Custom => "custom",
        }
    }
}

/// A family of `D²` unitaries on a `D`-dimensional space.
#[derive(Clone, Debug)]
pub struct UnitaryBasis<T: Real> {
    kind: BasisKind,
    space_dim: usize,
    elements: Vec<ComplexMatrix<T>>,
    labels: Vec<String>,
    ortho_constant: T,
    orthogonal: bool,
}

impl<T: Real> UnitaryBasis<T> {
    /// Validates a user-supplied family: `D²` unitaries of size `D`.
    ///
    /// Hilbert–Schmidt orthogonality is measured, not required; a
    /// non-orthogonal family is accepted but [`is_orthogonal`](Self::is_orthogonal)
    /// reports `false`.
    pub fn from_elements(elements: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let labels = (0..elements.len()).map(|k| k.to_string()).collect();
        Self::build(BasisKind::Custom, elements, labels)
    }

    fn build(kind: BasisKind, elements: Vec<ComplexMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        let space_dim = elements.first().map_or(0, ComplexMatrix::rows);
        if space_dim < 2 {
            return Err(Error::InvalidDimension(format!("basis space dimension {space_dim} < 2")));
        }
        if elements.len() != space_dim * space_dim {
            return Err(Error::InvalidParameter(format!(
                "{} elements cannot span operators on dimension {space_dim} (need {})",
                elements.len(),
                space_dim * space_dim
            )));
        }
        let id = ComplexMatrix::identity(space_dim);
        let unit_tol = lit::<T>(100.0) * T::epsilon() * T::from_usize(space_dim).expect("dim");
        for (k, u) in elements.iter().enumerate() {
            if u.rows() != space_dim || u.cols() != space_dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("{space_dim}x{space_dim}"),
                    found: format!("{}x{} (element {k})", u.rows(), u.cols()),
                });
            }
            let defect = u.adjoint().matmul(u).max_abs_diff(&id);
            if defect > unit_tol {
                return Err(Error::InvalidParameter(format!("basis element {k} is not unitary (defect {defect})")));
            }
        }
        let ortho_constant = T::from_usize(space_dim).expect("dim");
        let ortho_tol = T::default_tol();
        let mut orthogonal = true;
        'outer: for (m, um) in elements.iter().enumerate() {
            let um_dag = um.adjoint();
            for un in elements.iter().skip(m + 1) {
                if um_dag.trace_of_product(un).norm() > ortho_tol {
                    orthogonal = false;
                    break 'outer;
                }
            }
        }
        Ok(Self { kind, space_dim, elements, labels, ortho_constant, orthogonal })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn elements(&self) -> &[ComplexMatrix<T>] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `Tr(U_μ^† U_μ)`, equal to `D` for every unitary family.
    pub fn ortho_constant(&self) -> T {
        self.ortho_constant
    }

    /// Whether `|Tr(U_μ^† U_ν)| ≤ default_tol` for all `μ ≠ ν`.
    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    /// Matrix of `Tr(U_μ^† U_ν)`.
    pub fn orthogonality_matrix(&self) -> ComplexMatrix<T> {
        let n = self.len();
        let adjoints: Vec<_> = self.elements.iter().map(ComplexMatrix::adjoint).collect();
        ComplexMatrix::from_fn(n, n, |m, k| adjoints[m].trace_of_product(&self.elements[k]))
    }
}

fn paulis<T: Real>() -> [ComplexMatrix<T>; 4] {
    let z = T::zero();
    let o = T::one();
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::new(2, 2, vec![c(z, z), c(o, z), c(o, z), c(z, z)]).expect("σx"),
        ComplexMatrix::new(2, 2, vec![c(z, z), c(z, -o), c(z, o), c(z, z)]).expect("σy"),
        ComplexMatrix::new(2, 2, vec![c(o, z), c(z, z), c(z, z), c(-o, z)]).expect("σz"),
    ]
}

/// All `4^n` tensor products of `{I, X, Y, Z}` on `n` qubits.
///
/// Ordered lexicographically with the leftmost factor most significant:
/// `II, IX, IY, IZ, XI, …, ZZ` for `n = 2`.
pub fn pauli_basis<T: Real>(qubit_count: usize) -> Result<UnitaryBasis<T>> {
    if qubit_count == 0 {
        return Err(Error::InvalidDimension("pauli basis needs at least one qubit".into()));
    }
    const NAMES: [char; 4] = ['I', 'X', 'Y', 'Z'];
    let single = paulis::<T>();
    let mut elements = vec![ComplexMatrix::identity(1)];
    let mut labels = vec![String::new()];
    for _ in 0..qubit_count {
        let mut next = Vec::with_capacity(elements.len() * 4);
        let mut next_labels = Vec::with_capacity(elements.len() * 4);
        for (e, l) in elements.iter().zip(&labels) {
            for (p, name) in single.iter().zip(NAMES) {
                next.push(kron(e, p));
                next_labels.push(format!("{l}{name}"));
            }
        }
        elements = next;
        labels = next_labels;
    }
    UnitaryBasis::build(BasisKind::Pauli, elements, labels)
}

/// Clock-and-shift basis `U_{ab} = X^a Z^b` at index `a·D + b`, with
/// `X|k⟩ = |k+1 mod D⟩` and `Z = diag(ω^k)`, `ω = e^{2πi/D}`.
pub fn weyl_basis<T: Real>(space_dim: usize) -> Result<UnitaryBasis<T>> {
    if space_dim < 2 {
        return Err(Error::InvalidDimension(format!("weyl basis needs D >= 2, got {space_dim}")));
    }
    let n = space_dim;
    let nf = T::from_usize(n).expect("dim");
    let root = |k: usize| -> Complex<T> {
        // exact values at the quarter turns keep D = 2, 4 free of rounding
        match (4 * k) % (4 * n) {
            0 => Complex::one(),
            r if r == n => c(T::zero(), T::one()),
            r if r == 2 * n => c(-T::one(), T::zero()),
            r if r == 3 * n => c(T::zero(), -T::one()),
            _ => {
                let angle = T::TAU() * T::from_usize(k % n).expect("index") / nf;
                c(angle.cos(), angle.sin())
            }
        }
    };
    let mut elements = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            // (X^a Z^b)[i, j] = δ_{i, j+a} ω^{b j}
            elements.push(ComplexMatrix::from_fn(n, n, |i, j| {
                if i == (j + a) % n {
                    root(b * j)
                } else {
                    Complex::zero()
                }
            }));
            labels.push(format!("X{a}Z{b}"));
        }
    }
    UnitaryBasis::build(BasisKind::Weyl, elements, labels)
}

fn check_space<T: Real>(omega: &ChoiOperator<T>, basis: &UnitaryBasis<T>) -> Result<()> {
    let n = omega.matrix().rows();
    if n != basis.space_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("basis on dimension {n}"),
            found: format!("basis on dimension {}", basis.space_dim()),
        });
    }
    Ok(())
}

/// `χ(U) = Tr(Ω U)`.
pub fn char_function<T: Real>(omega: &ChoiOperator<T>, u: &ComplexMatrix<T>) -> Result<Complex<T>> {
    let m = omega.matrix();
    if u.rows() != m.rows() || u.cols() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", m.rows()),
            found: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    Ok(m.trace_of_product(u))
}

/// Characteristic function evaluated on every basis element, in basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct CharFunctionTable<T: Real> {
    pub basis: BasisKind,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> CharFunctionTable<T> {
    pub fn new(omega: &ChoiOperator<T>, basis: &UnitaryBasis<T>) -> Result<Self> {
        check_space(omega, basis)?;
        let values = basis.elements().iter().map(|u| omega.matrix().trace_of_product(u)).collect();
        Ok(Self { basis: basis.kind(), values })
    }

    /// `Σ_μ χ(U_μ) U_μ^† / D`; reproduces `Ω` for an orthogonal basis.
    pub fn reconstruct(&self, basis: &UnitaryBasis<T>) -> ComplexMatrix<T> {
        let n = basis.space_dim();
        let k = T::one() / basis.ortho_constant();
        basis
            .elements()
            .iter()
            .zip(&self.values)
            .fold(ComplexMatrix::zeros(n, n), |acc, (u, &chi)| &acc + &u.adjoint().scale(chi * k))
    }
}

/// `G_μν = Tr(Ω_Φ U_μ^† U_ν)` with its smallest eigenvalue.
#[derive(Clone, Debug)]
pub struct GramMatrix<T: Real> {
    entries: HermitianMatrix<T>,
    eigenvalues: Vec<T>,
    source: ChoiOperator<T>,
    basis: BasisKind,
}

impl<T: Real> GramMatrix<T> {
    pub fn entries(&self) -> &HermitianMatrix<T> {
        &self.entries
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// The normalized Choi operator the matrix was built from.
    pub fn source(&self) -> &ChoiOperator<T> {
        &self.source
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn is_positive(&self, tol: T) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `c^† G c` as a complex number.
    pub fn form(&self, coeffs: &[Complex<T>]) -> Result<Complex<T>> {
        let g = self.entries.matrix();
        if coeffs.len() != g.rows() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coefficients", g.rows()),
                found: format!("{}", coeffs.len()),
            });
        }
        let gc = g.mat_vec(coeffs);
        Ok(coeffs.iter().zip(&gc).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b))
    }
}

/// Gram matrix of the characteristic function. Unnormalized Choi input is
/// normalized first.
pub fn gram_matrix<T: Real>(omega: &ChoiOperator<T>, basis: &UnitaryBasis<T>) -> Result<GramMatrix<T>> {
    let omega = normalize_choi(omega);
    check_space(&omega, basis)?;
    let n = basis.len();
    // G_μν = Tr(U_ν Ω U_μ^†) = ⟨U_μ, U_ν Ω⟩_HS
    let weighted: Vec<ComplexMatrix<T>> = basis.elements().iter().map(|u| u.matmul(omega.matrix())).collect();
    let elements = basis.elements();
    let g = ComplexMatrix::from_fn(n, n, |m, k| {
        elements[m]
            .entries()
            .iter()
            .zip(weighted[k].entries())
            .fold(Complex::zero(), |acc, (u, w)| acc + u.conj() * *w)
    });
    let entries = HermitianMatrix::new(g)?;
    let eigenvalues = hermitian_eigenvalues(&entries)?;
    Ok(GramMatrix { entries, eigenvalues, source: omega, basis: basis.kind() })
}

/// `Σ c̄_μ G_μν c_ν`, computed from the Gram matrix and independently as
/// `Tr(Ω X^†X)` with `X = Σ c_μ U_μ`.
///
/// Fails with [`Error::Consistency`] if the two routes disagree or leave an
/// imaginary residue.
pub fn quadratic_form<T: Real>(omega: &ChoiOperator<T>, basis: &UnitaryBasis<T>, coeffs: &[Complex<T>]) -> Result<T> {
    let gram = gram_matrix(omega, basis)?;
    let via_gram = gram.form(coeffs)?;

    let d = basis.space_dim();
    let x = basis
        .elements()
        .iter()
        .zip(coeffs)
        .fold(ComplexMatrix::zeros(d, d), |acc, (u, &ck)| &acc + &u.scale(ck));
    let via_operator = gram.source().matrix().trace_of_product(&x.adjoint().matmul(&x));

    let scale = T::one().max(via_gram.norm()).max(via_operator.norm());
    let gap = (via_gram - via_operator).norm();
    if gap > T::consistency_tol() * scale {
        return Err(Error::Consistency {
            what: "c†Gc differs from Tr(Ω X†X)".into(),
            discrepancy: gap.to_f64().unwrap_or(f64::NAN),
        });
    }
    let residue = via_gram.im.abs().max(via_operator.im.abs());
    if residue > T::hermiticity_tol() * scale {
        return Err(Error::Consistency {
            what: "quadratic form has an imaginary part".into(),
            discrepancy: residue.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(via_gram.re)
}

/// Both sides of the Choi / Gram positivity equivalence for one map.
#[derive(Clone, Debug, PartialEq)]
pub struct BochnerChoiReport<T> {
    /// Smallest eigenvalue of the unnormalized `J(Φ)`.
    pub choi_min: T,
    pub gram_min: T,
    pub choi_cp: bool,
    pub gram_cp: bool,
    pub agree: bool,
    pub trace_choi: T,
    pub trace_normalized_choi: T,
    /// Max deviation between `eig(G)` and `D·eig(Ω)` repeated `D` times.
    /// `None` for non-orthogonal bases, where the correspondence does not hold.
    pub spectral_deviation: Option<T>,
}

/// Evaluates Choi positivity and Gram positivity of a trace-preserving map.
pub fn bochner_choi_check<T: Real>(phi: &Superoperator<T>, basis: &UnitaryBasis<T>, tol: T) -> Result<BochnerChoiReport<T>> {
    if !is_trace_preserving(phi, tol.max(T::consistency_tol())) {
        return Err(Error::Precondition("map is not trace-preserving; the Gram criterion assumes a trace-preserving linear map".into()));
    }
    let j = choi_from_superop(phi);
    let choi_eigs = j.eigenvalues()?;
    let omega = normalize_choi(&j);
    let gram = gram_matrix(&omega, basis)?;

    let spectral_deviation = basis.is_orthogonal().then(|| {
        let d = phi.dim();
        let big_d = basis.space_dim();
        let df = T::from_usize(d).expect("dim");
        let k = basis.ortho_constant() / df;
        let mut expected: Vec<T> = choi_eigs.iter().flat_map(|&l| std::iter::repeat_n(l * k, big_d)).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        gram.eigenvalues().iter().zip(&expected).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max)
    });

    let choi_min = choi_eigs[0];
    let gram_min = gram.min_eigenvalue();
    let choi_cp = choi_min >= -tol;
    let gram_cp = gram_min >= -tol;
    Ok(BochnerChoiReport {
        choi_min,
        gram_min,
        choi_cp,
        gram_cp,
        agree: choi_cp == gram_cp,
        trace_choi: j.trace(),
        trace_normalized_choi: omega.trace(),
        spectral_deviation,
    })
}
