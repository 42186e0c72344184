use num_complex::Complex;
use num_traits::Zero;

use super::{survival, DynamicsOptions, ModelKind, RateProfile};
use crate::algebra::{invert_with_condition, ComplexMatrix};
use crate::channels::{compose, KrausChannel, Superoperator};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Amplitude-damping map with survival `η`.
///
/// For `η ≤ 1` it is a channel with Kraus pair `diag(1, √η)`, `√(1−η)|0⟩⟨1|`.
/// For `η > 1` (intermediate maps during a negative-rate window) no Kraus
/// form exists and only the superoperator is kept.
#[derive(Clone, Debug, PartialEq)]
pub enum DampingMap<T: Real> {
    Physical(KrausChannel<T>),
    NonPhysical(Superoperator<T>),
}

impl<T: Real> DampingMap<T> {
    pub fn is_physical(&self) -> bool {
        matches!(self, DampingMap::Physical(_))
    }

    pub fn superop(&self) -> Superoperator<T> {
        match self {
            DampingMap::Physical(k) => k.to_superop(),
            DampingMap::NonPhysical(s) => s.clone(),
        }
    }
}

pub fn ad_map<T: Real>(eta: T) -> Result<DampingMap<T>> {
    if !(eta >= T::zero()) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("damping survival must be a finite value >= 0, got {eta}")));
    }
    if eta > T::one() {
        return Ok(DampingMap::NonPhysical(ad_superop(eta)?));
    }
    let z = Complex::zero();
    let re = |x: T| Complex::new(x, T::zero());
    let k0 = ComplexMatrix::new(2, 2, vec![re(T::one()), z, z, re(eta.sqrt())])?;
    let k1 = ComplexMatrix::new(2, 2, vec![z, re((T::one() - eta).sqrt()), z, z])?;
    Ok(DampingMap::Physical(KrausChannel::new(vec![k0, k1])?))
}

/// Superoperator of the damping map for any `η ≥ 0`:
/// `ρ₀₀ ↦ ρ₀₀ + (1−η)ρ₁₁`, `ρ₁₁ ↦ ηρ₁₁`, coherences scaled by `√η`.
pub fn ad_superop<T: Real>(eta: T) -> Result<Superoperator<T>> {
    if !(eta >= T::zero()) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("damping survival must be a finite value >= 0, got {eta}")));
    }
    let root = eta.sqrt();
    Ok(Superoperator::from_action(2, |rho| {
        let mut out = ComplexMatrix::zeros(2, 2);
        out[(0, 0)] = rho[(0, 0)] + rho[(1, 1)] * (T::one() - eta);
        out[(1, 1)] = rho[(1, 1)] * eta;
        out[(0, 1)] = rho[(0, 1)] * root;
        out[(1, 0)] = rho[(1, 0)] * root;
        out
    }))
}

/// Populations fixed, coherences multiplied by `λ`.
pub fn dephasing_map<T: Real>(lambda: T) -> Superoperator<T> {
    Superoperator::from_action(2, |rho| {
        let mut out = rho.clone();
        out[(0, 1)] = rho[(0, 1)] * lambda;
        out[(1, 0)] = rho[(1, 0)] * lambda;
        out
    })
}

/// The model's map for decay factor `f` (`η` or `q`).
pub fn closed_form_map<T: Real>(model: ModelKind, factor: T) -> Result<Superoperator<T>> {
    match model {
        ModelKind::AmplitudeDamping => ad_superop(factor),
        ModelKind::PureDephasing => Ok(dephasing_map(factor)),
    }
}

fn check_times<T: Real>(t: T, s: T) -> Result<()> {
    if !(s >= T::zero() && t >= s) {
        return Err(Error::Precondition(format!("intermediate map needs t >= s >= 0, got t={t}, s={s}")));
    }
    Ok(())
}

/// `r(t, s) = η(t)/η(s)`.
pub fn intermediate_ratio<T: Real>(t: T, s: T, p: &RateProfile<T>, opts: &DynamicsOptions<T>) -> Result<T> {
    check_times(t, s)?;
    let eta_s = survival(s, p, opts.quad_tol)?;
    if eta_s < opts.singular_floor {
        return Err(Error::SingularMap { condition: (T::one() / eta_s).to_f64().unwrap_or(f64::INFINITY) });
    }
    Ok(survival(t, p, opts.quad_tol)? / eta_s)
}

/// `Φ(t, s)` by both routes.
#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateMap<T: Real> {
    /// `Φ(t, 0) Φ(s, 0)⁻¹`.
    pub general: Superoperator<T>,
    /// The model map evaluated at `f(t)/f(s)`.
    pub closed_form: Superoperator<T>,
    /// `f(t)/f(s)`: `η` ratio for damping, `q` ratio for dephasing.
    pub ratio: T,
    /// Largest entrywise difference between the two routes.
    pub discrepancy: T,
}

/// Builds `Φ(t, s)` from the decay factors at `t` and `s`.
pub(crate) fn intermediate_from_factors<T: Real>(
    model: ModelKind,
    factor_t: T,
    factor_s: T,
    opts: &DynamicsOptions<T>,
) -> Result<IntermediateMap<T>> {
    if factor_s < opts.singular_floor {
        return Err(Error::SingularMap { condition: (T::one() / factor_s).to_f64().unwrap_or(f64::INFINITY) });
    }
    let phi_t = closed_form_map(model, factor_t)?;
    let phi_s = closed_form_map(model, factor_s)?;
    let (inverse, condition) = invert_with_condition(phi_s.matrix(), opts.cond_limit)?;
    let general = compose(&phi_t, &Superoperator::new(2, inverse)?)?;
    let ratio = factor_t / factor_s;
    let closed_form = closed_form_map(model, ratio)?;
    let discrepancy = general.matrix().max_abs_diff(closed_form.matrix());
    // rounding in the inverse grows with the condition number
    let allowed = opts.path_tol.max(condition * T::epsilon() * lit(16.0));
    if discrepancy > allowed {
        return Err(Error::Consistency {
            what: "inversion and closed-form intermediate maps differ".into(),
            discrepancy: discrepancy.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(IntermediateMap { general, closed_form, ratio, discrepancy })
}

/// `Φ(t, s) = Φ(t, 0) Φ(s, 0)⁻¹`, cross-checked against the closed form.
pub fn intermediate_map<T: Real>(
    t: T,
    s: T,
    model: ModelKind,
    p: &RateProfile<T>,
    opts: &DynamicsOptions<T>,
) -> Result<IntermediateMap<T>> {
    check_times(t, s)?;
    let f_t = model.decay_factor(survival(t, p, opts.quad_tol)?);
    let f_s = model.decay_factor(survival(s, p, opts.quad_tol)?);
    intermediate_from_factors(model, f_t, f_s, opts)
}
