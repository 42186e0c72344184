use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Decay rate `γ(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateProfile<T> {
    /// `γ(t) = γ₀ + a e^{−t} cos(ωt)`.
    Parametric { gamma0: T, a: T, omega: T },
    /// Piecewise-linear interpolation of samples; strictly increasing times.
    Tabulated { times: Vec<T>, values: Vec<T> },
}

impl<T: Real> RateProfile<T> {
    pub fn parametric(gamma0: T, a: T, omega: T) -> Result<Self> {
        if !(gamma0.is_finite() && a.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidParameter("rate profile parameters must be finite".into()));
        }
        Ok(RateProfile::Parametric { gamma0, a, omega })
    }

    /// Constant rate, the Markovian semigroup limit.
    pub fn constant(gamma0: T) -> Result<Self> {
        Self::parametric(gamma0, T::zero(), T::zero())
    }

    pub fn tabulated(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "tabulated profile needs >= 2 aligned samples, got {} times and {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("tabulated profile contains non-finite samples".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("tabulated times must be strictly increasing".into()));
        }
        Ok(RateProfile::Tabulated { times, values })
    }
}

/// Evaluates the rate at `t ≥ 0`.
pub fn gamma<T: Real>(t: T, p: &RateProfile<T>) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Precondition(format!("rate requested at negative time {t}")));
    }
    match p {
        RateProfile::Parametric { gamma0, a, omega } => Ok(*gamma0 + *a * (-t).exp() * (*omega * t).cos()),
        RateProfile::Tabulated { times, values } => {
            let (start, end) = (times[0], times[times.len() - 1]);
            if t < start || t > end {
                return Err(Error::OutOfRange {
                    t: t.to_f64().unwrap_or(f64::NAN),
                    start: start.to_f64().unwrap_or(f64::NAN),
                    end: end.to_f64().unwrap_or(f64::NAN),
                });
            }
            let k = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1);
            let (t0, t1) = (times[k - 1], times[k]);
            let w = (t - t0) / (t1 - t0);
            Ok(values[k - 1] + (values[k] - values[k - 1]) * w)
        }
    }
}

const MAX_DEPTH: u32 = 48;

fn simpson<T: Real>(fa: T, fm: T, fb: T, h: T) -> T {
    h / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<T: Real>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let m = (a + b) / lit(2.0);
    let lm = (a + m) / lit(2.0);
    let rm = (m + b) / lit(2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= lit::<T>(15.0) * tol {
        return Ok(left + right + delta / lit(15.0));
    }
    if depth >= MAX_DEPTH || (b - a) <= T::epsilon() * (a.abs() + b.abs()) {
        return Err(Error::Quadrature { a: a.to_f64().unwrap_or(f64::NAN), b: b.to_f64().unwrap_or(f64::NAN) });
    }
    let half = tol / lit(2.0);
    Ok(adaptive(f, a, m, fa, flm, fm, left, half, depth + 1)? + adaptive(f, m, b, fm, frm, fb, right, half, depth + 1)?)
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`, started on
/// panels no wider than 1/4 so that oscillatory integrands are resolved.
pub(crate) fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> Result<T> {
    if b <= a {
        return Ok(T::zero());
    }
    let width = b - a;
    let panels = (width / lit(0.25)).ceil().max(T::one());
    let n = panels.to_usize().unwrap_or(1).max(1);
    let nf = T::from_usize(n).expect("panel count");
    let h = width / nf;
    let panel_tol = tol / nf;
    let mut total = T::zero();
    for k in 0..n {
        let x0 = a + h * T::from_usize(k).expect("index");
        let x1 = if k + 1 == n { b } else { x0 + h };
        let (f0, fm, f1) = (f(x0), f((x0 + x1) / lit(2.0)), f(x1));
        total = total + adaptive(&f, x0, x1, f0, fm, f1, simpson(f0, fm, f1, x1 - x0), panel_tol, 0)?;
    }
    Ok(total)
}

/// `∫_a^b γ(τ) dτ`. Tabulated profiles are integrated exactly (trapezoid on
/// each linear piece); parametric ones by adaptive quadrature.
pub fn rate_integral<T: Real>(a: T, b: T, p: &RateProfile<T>, quad_tol: T) -> Result<T> {
    if b < a {
        return Ok(-rate_integral(b, a, p, quad_tol)?);
    }
    if !(a >= T::zero()) {
        return Err(Error::Precondition(format!("rate integral from negative time {a}")));
    }
    match p {
        RateProfile::Parametric { .. } => integrate(|t| gamma(t, p).expect("t >= 0 checked above"), a, b, quad_tol),
        RateProfile::Tabulated { times, .. } => {
            let ga = gamma(a, p)?;
            let gb = gamma(b, p)?;
            let mut knots = vec![(a, ga)];
            for &t in times.iter().filter(|&&t| t > a && t < b) {
                knots.push((t, gamma(t, p)?));
            }
            knots.push((b, gb));
            Ok(knots.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / lit(2.0)).sum())
        }
    }
}

/// Excited-state survival `η(t) = exp(−∫₀ᵗ γ)`.
pub fn survival<T: Real>(t: T, p: &RateProfile<T>, quad_tol: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Precondition(format!("survival requested at negative time {t}")));
    }
    Ok((-rate_integral(T::zero(), t, p, quad_tol)?).exp())
}

/// Coherence factor of the dephasing model, `q(t) = exp(−2∫₀ᵗ γ) = η(t)²`.
pub fn coherence_factor<T: Real>(t: T, p: &RateProfile<T>, quad_tol: T) -> Result<T> {
    let eta = survival(t, p, quad_tol)?;
    Ok(eta * eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        let p = RateProfile::parametric(0.2f64, 1.5, 4.0).unwrap();
        assert_eq!(gamma(0.0, &p).unwrap(), 1.7);
        let flat = RateProfile::parametric(0.3, 0.0, 4.0).unwrap();
        for t in [0.0, 0.7, 3.0, 50.0] {
            assert_eq!(gamma(t, &flat).unwrap(), 0.3);
        }
        assert!((gamma(60.0, &p).unwrap() - 0.2).abs() < 1e-20);
        assert!(gamma(-1.0, &p).is_err());
    }

    #[test]
    fn tabulated_interpolation_and_range() {
        let p = RateProfile::tabulated(vec![0.0f64, 1.0, 3.0], vec![1.0, -1.0, 0.0]).unwrap();
        assert_eq!(gamma(0.5, &p).unwrap(), 0.0);
        assert_eq!(gamma(2.0, &p).unwrap(), -0.5);
        assert_eq!(gamma(3.0, &p).unwrap(), 0.0);
        assert!(matches!(gamma(3.5, &p), Err(Error::OutOfRange { .. })));
        // ∫₀³ = 0 (triangle up to 1) + (-1 over [1,3] linear to 0) = 0 - 1
        assert!((rate_integral(0.0, 3.0, &p, 1e-12).unwrap() + 1.0).abs() < 1e-15);
        assert!((rate_integral(0.5, 2.0, &p, 1e-12).unwrap() - (-0.25 - 0.75)).abs() < 1e-15);
        assert!(RateProfile::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(RateProfile::tabulated(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn survival_examples() {
        let p = RateProfile::parametric(0.2, 1.5, 4.0).unwrap();
        assert_eq!(survival(0.0, &p, 1e-10).unwrap(), 1.0);
        let flat = RateProfile::constant(0.4f64).unwrap();
        for t in [0.5, 2.0, 6.0] {
            assert!((survival(t, &flat, 1e-10).unwrap() - (-0.4 * t).exp()).abs() < 1e-12);
        }
        let pure_exp = RateProfile::parametric(0.0, 1.0, 0.0).unwrap();
        for t in [0.1f64, 1.0, 4.0] {
            let want = (-(1.0 - (-t).exp())).exp();
            assert!((survival(t, &pure_exp, 1e-10).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn coherence_factor_is_squared_survival() {
        let flat = RateProfile::constant(0.25).unwrap();
        assert_eq!(coherence_factor(0.0, &flat, 1e-10).unwrap(), 1.0);
        assert!((coherence_factor(2.0, &flat, 1e-10).unwrap() - (-2.0 * 0.25 * 2.0f64).exp()).abs() < 1e-12);
        let p = RateProfile::parametric(0.2, 1.5, 4.0).unwrap();
        for t in [0.3f64, 0.9, 2.5] {
            let eta = survival(t, &p, 1e-10).unwrap();
            assert!((coherence_factor(t, &p, 1e-10).unwrap() - eta * eta).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_matches_closed_form_of_damped_cosine() {
        // ∫₀ᵗ e^{−τ} cos(ωτ) dτ = [e^{−τ}(ω sin ωτ − cos ωτ)]₀ᵗ / (1 + ω²)
        let (g0, a, w) = (0.2, 1.5, 4.0);
        let p = RateProfile::parametric(g0, a, w).unwrap();
        for t in [0.37, 1.0, 2.9, 6.0] {
            let prim = |x: f64| (-x).exp() * (w * (w * x).sin() - (w * x).cos()) / (1.0 + w * w);
            let exact = g0 * t + a * (prim(t) - prim(0.0));
            assert!((rate_integral(0.0, t, &p, 1e-10).unwrap() - exact).abs() < 1e-10);
        }
    }
}
