use num_complex::Complex;
use num_traits::{One, Zero};

use super::{gamma, ModelKind, RateProfile};
use crate::algebra::{hermitian_eigenvalues, trace_norm, ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Sampled solution of a master equation.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<ComplexMatrix<T>>,
    /// Largest RK4 step used.
    pub step: T,
    /// Quality notes (trace drift, loss of positivity beyond 1e-6).
    pub warnings: Vec<String>,
}

/// Column-stacking generator of `ρ ↦ LρL^† − ½{L^†L, ρ}` for the model's jump
/// operator (`σ₋` or `σ_z`); the time-dependent generator is `γ(t)` times this.
pub fn lindblad_generator<T: Real>(model: ModelKind) -> ComplexMatrix<T> {
    let (z, o) = (Complex::<T>::zero(), Complex::<T>::one());
    let jump = match model {
        ModelKind::AmplitudeDamping => ComplexMatrix::new(2, 2, vec![z, o, z, z]),
        ModelKind::PureDephasing => ComplexMatrix::new(2, 2, vec![o, z, z, -o]),
    }
    .expect("2x2 jump operator");
    let id = ComplexMatrix::identity(2);
    let ldl = jump.adjoint().matmul(&jump);
    let half = lit::<T>(0.5);
    let sandwich = jump.conj().kron(&jump);
    let anti = &id.kron(&ldl) + &ldl.transpose().kron(&id);
    &sandwich - &anti.scale_real(half)
}

/// Checks Hermiticity, unit trace and positivity within `tol`.
pub fn validate_density<T: Real>(rho: &ComplexMatrix<T>, tol: T) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidDimension("density matrix must be square".into()));
    }
    if rho.hermiticity_defect() > tol {
        return Err(Error::Precondition("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - Complex::one()).norm() > tol {
        return Err(Error::Precondition(format!("density matrix has trace {}", tr.re)));
    }
    let min = hermitian_eigenvalues(&HermitianMatrix::symmetrize(rho.clone()))?[0];
    if min < -tol {
        return Err(Error::Precondition(format!("density matrix has negative eigenvalue {min}")));
    }
    Ok(())
}

fn axpy<T: Real>(y: &[Complex<T>], a: T, x: &[Complex<T>]) -> Vec<Complex<T>> {
    y.iter().zip(x).map(|(yi, xi)| *yi + *xi * a).collect()
}

/// Classical RK4 on `vec(ρ)` with generator `γ(t)·L`, sampled at `times`.
///
/// Integration starts from `rho0` at t = 0; each gap between consecutive
/// sample times is split into equal steps no longer than `step`.
pub fn integrate_master_equation<T: Real>(
    model: ModelKind,
    p: &RateProfile<T>,
    rho0: &ComplexMatrix<T>,
    times: &[T],
    step: T,
) -> Result<Trajectory<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("integration step must be positive, got {step}")));
    }
    if rho0.rows() != 2 || rho0.cols() != 2 {
        return Err(Error::InvalidDimension("qubit models need a 2x2 initial state".into()));
    }
    let state_tol = lit::<T>(1e-8).max(T::epsilon() * lit(100.0));
    validate_density(rho0, state_tol)?;
    if times.first().is_some_and(|&t| t < T::zero()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("sample times must be non-negative and non-decreasing".into()));
    }

    let generator = lindblad_generator::<T>(model);
    let deriv = |t: T, v: &[Complex<T>]| -> Result<Vec<Complex<T>>> {
        let g = gamma(t, p)?;
        Ok(generator.mat_vec(v).into_iter().map(|z| z * g).collect())
    };

    let half = lit::<T>(0.5);
    let sixth = T::one() / lit(6.0);
    let two = lit::<T>(2.0);
    let mut v = rho0.vec_col();
    let mut t = T::zero();
    let mut states = Vec::with_capacity(times.len());
    let mut warnings = Vec::new();
    let positivity_floor = lit::<T>(-1e-6);

    for &target in times {
        let gap = target - t;
        if gap > T::zero() {
            let n = (gap / step - lit(1e-9)).ceil().max(T::one());
            let h = gap / n;
            let steps = n.to_usize().expect("step count fits usize");
            for k in 0..steps {
                let t0 = t + h * T::from_usize(k).expect("index");
                let k1 = deriv(t0, &v)?;
                let k2 = deriv(t0 + h * half, &axpy(&v, h * half, &k1))?;
                let k3 = deriv(t0 + h * half, &axpy(&v, h * half, &k2))?;
                let k4 = deriv(t0 + h, &axpy(&v, h, &k3))?;
                v = v
                    .iter()
                    .enumerate()
                    .map(|(i, vi)| *vi + (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * (h * sixth))
                    .collect();
            }
            t = target;
        }
        let rho = ComplexMatrix::from_vec_col(2, &v)?;
        let drift = (rho.trace() - Complex::one()).norm();
        if drift > state_tol {
            warnings.push(format!("t={target}: trace drifted by {drift}"));
        }
        let min = hermitian_eigenvalues(&HermitianMatrix::symmetrize(rho.clone()))?[0];
        if min < positivity_floor {
            warnings.push(format!("t={target}: state eigenvalue {min} below -1e-6"));
        }
        states.push(rho);
    }
    Ok(Trajectory { times: times.to_vec(), states, step, warnings })
}

/// `D(t) = ½‖ρ₁(t) − ρ₂(t)‖₁` along RK4 trajectories of both states.
pub fn trace_distance_trajectory<T: Real>(
    model: ModelKind,
    p: &RateProfile<T>,
    rho1: &ComplexMatrix<T>,
    rho2: &ComplexMatrix<T>,
    times: &[T],
    step: T,
) -> Result<Vec<T>> {
    let a = integrate_master_equation(model, p, rho1, times, step)?;
    let b = integrate_master_equation(model, p, rho2, times, step)?;
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| Ok(trace_norm(&(x - y))? * lit(0.5)))
        .collect()
}

/// Orthogonal initial pair whose trace distance equals the decay factor:
/// `|1⟩, |0⟩` for damping and `|+⟩, |−⟩` for dephasing.
pub fn orthogonal_pair<T: Real>(model: ModelKind) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    match model {
        ModelKind::AmplitudeDamping => {
            (ComplexMatrix::from_diag(&[T::zero(), T::one()]), ComplexMatrix::from_diag(&[T::one(), T::zero()]))
        }
        ModelKind::PureDephasing => {
            let h = lit::<T>(0.5);
            let plus = ComplexMatrix::from_fn(2, 2, |_, _| Complex::new(h, T::zero()));
            let minus = ComplexMatrix::from_fn(2, 2, |i, j| Complex::new(if i == j { h } else { -h }, T::zero()));
            (plus, minus)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{coherence_factor, survival};
    use super::*;

    fn grid(n: usize, t_max: f64) -> Vec<f64> {
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn generator_matches_direct_action() {
        let l = lindblad_generator::<f64>(ModelKind::AmplitudeDamping);
        let rho = ComplexMatrix::from_real(2, 2, &[0.3, 0.2, 0.2, 0.7]).unwrap();
        let out = ComplexMatrix::from_vec_col(2, &l.mat_vec(&rho.vec_col())).unwrap();
        // ρ̇₁₁ = −ρ₁₁, ρ̇₀₀ = +ρ₁₁, coherences at −½
        let want = ComplexMatrix::from_real(2, 2, &[0.7, -0.1, -0.1, -0.7]).unwrap();
        assert!(out.max_abs_diff(&want) < 1e-15);

        let l = lindblad_generator::<f64>(ModelKind::PureDephasing);
        let out = ComplexMatrix::from_vec_col(2, &l.mat_vec(&rho.vec_col())).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[0.0, -0.4, -0.4, 0.0]).unwrap();
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn zero_rate_keeps_state() {
        let p = RateProfile::constant(0.0).unwrap();
        let (rho, _) = orthogonal_pair::<f64>(ModelKind::PureDephasing);
        let traj = integrate_master_equation(ModelKind::PureDephasing, &p, &rho, &grid(5, 2.0), 1e-2).unwrap();
        assert!(traj.states.iter().all(|s| s.max_abs_diff(&rho) < 1e-15));
        assert!(traj.warnings.is_empty());
    }

    #[test]
    fn damping_population_follows_survival() {
        let p = RateProfile::constant(0.7).unwrap();
        let (excited, _) = orthogonal_pair::<f64>(ModelKind::AmplitudeDamping);
        let times = grid(31, 3.0);
        let traj = integrate_master_equation(ModelKind::AmplitudeDamping, &p, &excited, &times, 1e-3).unwrap();
        for (t, s) in times.iter().zip(&traj.states) {
            assert!((s[(1, 1)].re - survival(*t, &p, 1e-10).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn dephasing_coherence_follows_coherence_factor() {
        let p = RateProfile::parametric(0.2, 1.5, 4.0).unwrap();
        let (plus, _) = orthogonal_pair::<f64>(ModelKind::PureDephasing);
        let times = grid(61, 6.0);
        let traj = integrate_master_equation(ModelKind::PureDephasing, &p, &plus, &times, 1e-3).unwrap();
        for (t, s) in times.iter().zip(&traj.states) {
            assert!((s[(0, 1)].re - coherence_factor(*t, &p, 1e-10).unwrap() / 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn trace_distance_examples() {
        let p = RateProfile::parametric(0.2, 1.5, 4.0).unwrap();
        let times = grid(41, 4.0);
        let (a, _) = orthogonal_pair::<f64>(ModelKind::AmplitudeDamping);
        let same = trace_distance_trajectory(ModelKind::AmplitudeDamping, &p, &a, &a, &times, 1e-2).unwrap();
        assert!(same.iter().all(|&d| d == 0.0));

        let (plus, minus) = orthogonal_pair::<f64>(ModelKind::PureDephasing);
        let d = trace_distance_trajectory(ModelKind::PureDephasing, &p, &plus, &minus, &times, 1e-3).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15);
        for (t, dt) in times.iter().zip(&d) {
            assert!((dt - coherence_factor(*t, &p, 1e-10).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = RateProfile::constant(0.1).unwrap();
        let bad = ComplexMatrix::from_diag(&[0.6, 0.6]);
        assert!(integrate_master_equation(ModelKind::AmplitudeDamping, &p, &bad, &[1.0], 1e-2).is_err());
        let (rho, _) = orthogonal_pair::<f64>(ModelKind::AmplitudeDamping);
        assert!(integrate_master_equation(ModelKind::AmplitudeDamping, &p, &rho, &[1.0], 0.0).is_err());
        assert!(integrate_master_equation(ModelKind::AmplitudeDamping, &p, &rho, &[1.0, 0.5], 1e-2).is_err());
    }
}
