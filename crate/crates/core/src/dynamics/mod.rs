//! Time-dependent qubit models driven by a time-local rate `γ(t)`.
//!
//! Two models are supported:
//!
//! * amplitude damping, `ρ̇ = γ(t)(σ₋ρσ₊ − ½{σ₊σ₋, ρ})`, whose map after
//!   time t is the damping channel with excited-state survival
//!   `η(t) = exp(−∫₀ᵗ γ)`;
//! * pure dephasing, `ρ̇ = γ(t)(σ_zρσ_z − ρ)`, which scales coherences by
//!   `q(t) = exp(−2∫₀ᵗ γ) = η(t)²`.
//!
//! `|0⟩` is the ground state and `σ₋ = |0⟩⟨1|`.

mod backflow;
mod integrate;
mod maps;
mod profile;
mod scan;

pub use backflow::{backflow_intervals, Backflow, BackflowInterval};
pub use integrate::{
    integrate_master_equation, lindblad_generator, orthogonal_pair, trace_distance_trajectory, validate_density,
    Trajectory,
};
pub use maps::{
    ad_map, ad_superop, closed_form_map, dephasing_map, intermediate_map, intermediate_ratio, DampingMap,
    IntermediateMap,
};
pub use profile::{coherence_factor, gamma, rate_integral, survival, RateProfile};
pub use scan::{cp_divisibility_scan, DivisibilityReport, PairFlag, PairRecord, ScanGrid, ScanOptions};

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    AmplitudeDamping,
    PureDephasing,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::AmplitudeDamping => "amplitude_damping",
            ModelKind::PureDephasing => "pure_dephasing",
        }
    }

    /// The scalar that parametrizes the model's map after time t:
    /// `η(t)` for amplitude damping, `q(t) = η(t)²` for dephasing.
    pub fn decay_factor<T: Real>(self, survival: T) -> T {
        match self {
            ModelKind::AmplitudeDamping => survival,
            ModelKind::PureDephasing => survival * survival,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "amplitude_damping" | "ad" => Ok(ModelKind::AmplitudeDamping),
            "pure_dephasing" | "dephasing" => Ok(ModelKind::PureDephasing),
            other => Err(crate::Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Numerical knobs shared by the survival quadrature, map inversion and scans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsOptions<T> {
    /// Absolute tolerance on `∫γ`.
    pub quad_tol: T,
    /// Largest accepted condition estimate when inverting `Φ(s, 0)`.
    pub cond_limit: T,
    /// Decay factors below this make `Φ(s, 0)` count as singular.
    pub singular_floor: T,
    /// Required entrywise agreement of the inversion and closed-form routes.
    pub path_tol: T,
}

impl<T: Real> Default for DynamicsOptions<T> {
    fn default() -> Self {
        Self {
            quad_tol: lit::<T>(1e-10).max(T::epsilon() * lit(100.0)),
            cond_limit: lit(1e12),
            singular_floor: lit(1e-12),
            path_tol: lit::<T>(1e-8).max(T::epsilon().sqrt()),
        }
    }
}
