//! Condition numbers for the stationary state and the fixed-point
//! perturbation bound `‖ρ₁ − ρ₂‖₁ ≤ κ·‖T₁ − T₂‖₁→₁`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, SuperOperator, TOL_ALGEBRAIC};
use crate::contraction::{self, ContractionEstimate, DEFAULT_RESTARTS};
use crate::error::{QmsError, Result};
use crate::foundation::trace_norm_unchecked;
use crate::spectral::{self, SpectralData};

/// Stationarity residual allowed for the supplied `ρ₂`.
pub const TOL_STATIONARY: f64 = 1e-9;
/// Residual allowed in the exact displacement identity.
pub const TOL_IDENTITY: f64 = 1e-8;
/// `τ(T)` at or above `1 − TOL_CONTRACTIVE` gives an infinite contraction bound.
pub const TOL_CONTRACTIVE: f64 = 1e-9;

/// `2(5π/3 + 2√2)`
pub fn spectral_upper_constant() -> f64 {
    2.0 * (5.0 * PI / 3.0 + 2.0 * SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub dim: usize,
    /// τ(Z(T))
    pub kappa_tau_z: ContractionEstimate,
    /// τ(T)
    pub tau_t: ContractionEstimate,
    /// (1 − τ(T))⁻¹; absent when the stationary state is not unique.
    #[serde(with = "crate::serde_ext::extended_float_opt")]
    pub kappa_contraction: Option<f64>,
    pub kappa_contraction_note: Option<String>,
    /// 1 / min|1 − λ|
    pub spectral_lower: f64,
    /// 2(5π/3 + 2√2)·d³ / min|1 − λ|
    #[serde(with = "crate::serde_ext::extended_float")]
    pub spectral_upper: f64,
    /// Peripheral eigenvalues other than 1 were present.
    pub peripheral_spectrum: bool,
    pub unique_stationary_state: bool,
    pub spectrum: SpectralData,
}

pub fn condition_numbers(t: &SuperOperator, opts: &AnalysisOptions) -> Result<ConditionReport> {
    let fps = spectral::fixed_point_structure(t)?;
    let z = spectral::fundamental_map_from(t, &fps.projector)?;
    let spectrum = spectral::spectral_quantities_from(&fps.eigensystem);
    let unique = fps.multiplicity == 1;

    let kappa_tau_z = contraction::tau(&z, opts.restarts, opts.seed)?;
    let tau_t = contraction::tau(t, opts.restarts, opts.seed)?;
    let (kappa_contraction, note) = if !unique {
        (
            None,
            Some(format!(
                "stationary state not unique (fixed space of dimension {})",
                fps.multiplicity
            )),
        )
    } else if tau_t.value >= 1.0 - TOL_CONTRACTIVE {
        (Some(f64::INFINITY), Some("τ(T) = 1".to_string()))
    } else {
        (Some(1.0 / (1.0 - tau_t.value)), None)
    };

    let d = t.dim() as f64;
    let (lower, upper) = if spectrum.lambda_empty {
        // No non-unit eigenvalues: the sandwich carries no information.
        (0.0, f64::INFINITY)
    } else {
        (
            1.0 / spectrum.min_dist_to_one,
            spectral_upper_constant() * d.powi(3) / spectrum.min_dist_to_one,
        )
    };
    Ok(ConditionReport {
        dim: t.dim(),
        kappa_tau_z,
        tau_t,
        kappa_contraction,
        kappa_contraction_note: note,
        spectral_lower: lower,
        spectral_upper: upper,
        peripheral_spectrum: spectrum.peripheral_count > 0,
        unique_stationary_state: unique,
        spectrum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaVariant {
    /// τ(Z(T₁))
    TauZ,
    /// (1 − τ(T₁))⁻¹
    Contraction,
    /// 2(5π/3 + 2√2)·d³ / min|1 − λ|
    SpectralUpper,
}

impl KappaVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            KappaVariant::TauZ => "tau_z",
            KappaVariant::Contraction => "contraction",
            KappaVariant::SpectralUpper => "spectral_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    General,
    HermitianOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVariant {
    pub kappa_variant: KappaVariant,
    pub norm_mode: NormMode,
    #[serde(with = "crate::serde_ext::extended_float")]
    pub kappa: f64,
    pub norm: f64,
    #[serde(with = "crate::serde_ext::extended_float")]
    pub bound: f64,
    /// bound − actual
    #[serde(with = "crate::serde_ext::extended_float")]
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationOutcome {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    /// ‖ρ₁ − ρ₂‖₁
    pub actual_distance: f64,
    /// τ(Z(T₁))·‖T₁ − T₂‖₁→₁ with the general norm.
    pub bound_value: f64,
    /// ‖(ρ₁ − ρ₂) − Z(T₁)∘(T₁ − T₂)(ρ₂)‖₁
    pub identity_residual: f64,
    pub stationarity_residual: f64,
    pub perturbation_norm: ContractionEstimate,
    pub perturbation_norm_hermitian: ContractionEstimate,
    pub conditions: ConditionReport,
    pub bounds: Vec<BoundVariant>,
}

impl PerturbationOutcome {
    pub fn slack(&self) -> f64 {
        self.bound_value - self.actual_distance
    }
}

fn require_trace_and_hermiticity(t: &SuperOperator, name: &str) -> Result<()> {
    let tp = t.trace_preservation_residual();
    let hp = t.hermiticity_residual();
    if tp > TOL_ALGEBRAIC || hp > TOL_ALGEBRAIC {
        return Err(QmsError::Precondition(format!(
            "{name} must be trace- and Hermiticity-preserving (residuals {tp:.3e}, {hp:.3e})"
        )));
    }
    Ok(())
}

/// Displacement of the stationary state `ρ₂` of `T₂` when the dynamics is
/// replaced by `T₁`, with `ρ₁ := T₁^∞(ρ₂)`.
pub fn fixed_point_perturbation(
    t1: &SuperOperator,
    t2: &SuperOperator,
    rho2: &DensityMatrix,
    opts: &AnalysisOptions,
) -> Result<PerturbationOutcome> {
    if t1.dim() != t2.dim() || rho2.dim() != t1.dim() {
        return Err(QmsError::Dimension(format!(
            "fixed_point_perturbation: T1 is d={}, T2 is d={}, rho2 is d={}",
            t1.dim(),
            t2.dim(),
            rho2.dim()
        )));
    }
    require_trace_and_hermiticity(t1, "T1")?;
    require_trace_and_hermiticity(t2, "T2")?;
    let stationarity = trace_norm_unchecked(&(t2.apply(rho2.matrix()) - rho2.matrix()));
    if stationarity > TOL_STATIONARY {
        return Err(QmsError::Precondition(format!(
            "rho2 is not stationary for T2: ‖T2(ρ₂) − ρ₂‖₁ = {stationarity:.3e}"
        )));
    }

    let fps = spectral::fixed_point_structure(t1)?;
    let z = spectral::fundamental_map_from(t1, &fps.projector)?;
    let rho1_raw = fps.projector.apply(rho2.matrix());
    let diff = t1 - t2;
    let displacement = &rho1_raw - rho2.matrix();
    let predicted = z.apply(&diff.apply(rho2.matrix()));
    let identity_residual = trace_norm_unchecked(&(&displacement - predicted));
    let actual = trace_norm_unchecked(&displacement);
    let rho1 = DensityMatrix::from_numerical(&rho1_raw)?;

    let conditions = condition_numbers(t1, opts)?;
    let norm_general = contraction::norm_1to1(&diff, opts.restarts, opts.seed, false)?;
    let norm_herm = contraction::norm_1to1(&diff, opts.restarts, opts.seed, true)?;

    let mut bounds = Vec::new();
    let kappas = [
        (KappaVariant::TauZ, Some(conditions.kappa_tau_z.value)),
        (KappaVariant::Contraction, conditions.kappa_contraction),
        (KappaVariant::SpectralUpper, Some(conditions.spectral_upper)),
    ];
    for (variant, kappa) in kappas {
        let Some(kappa) = kappa else { continue };
        for (mode, norm) in [
            (NormMode::General, norm_general.value),
            (NormMode::HermitianOnly, norm_herm.value),
        ] {
            // 0·∞ stays 0: an unperturbed map leaves the state in place.
            let bound = if norm == 0.0 { 0.0 } else { kappa * norm };
            bounds.push(BoundVariant {
                kappa_variant: variant,
                norm_mode: mode,
                kappa,
                norm,
                bound,
                slack: bound - actual,
            });
        }
    }

    Ok(PerturbationOutcome {
        rho1,
        rho2: rho2.clone(),
        actual_distance: actual,
        bound_value: conditions.kappa_tau_z.value * norm_general.value,
        identity_residual,
        stationarity_residual: stationarity,
        perturbation_norm: norm_general,
        perturbation_norm_hermitian: norm_herm,
        conditions,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn opts() -> AnalysisOptions {
        AnalysisOptions {
            restarts: 16,
            seed: 1,
        }
    }

    #[test]
    fn constant_arithmetic() {
        // 2(5π/3 + 2√2)·8/0.5
        assert_abs_diff_eq!(
            spectral_upper_constant() * 8.0 / 0.5,
            258.06,
            epsilon = 5e-3
        );
    }

    #[test]
    fn depolarizing_condition_numbers() {
        let r = condition_numbers(&SuperOperator::depolarizing(2, 0.5), &opts()).unwrap();
        assert_abs_diff_eq!(r.kappa_tau_z.value, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.kappa_contraction.unwrap(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.spectral_lower, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.spectral_upper, 258.06, epsilon = 5e-3);
        assert!(!r.peripheral_spectrum);
    }

    #[test]
    fn completely_depolarizing_condition_numbers() {
        let r = condition_numbers(&SuperOperator::depolarizing(2, 1.0), &opts()).unwrap();
        assert_abs_diff_eq!(r.kappa_tau_z.value, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.kappa_contraction.unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.spectral_lower, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_unique_fixed_point_omits_contraction_bound() {
        let r = condition_numbers(&SuperOperator::identity(2), &opts()).unwrap();
        assert!(r.kappa_contraction.is_none());
        assert!(r.kappa_contraction_note.is_some());
        assert!(r.spectral_upper.is_infinite());
    }

    #[test]
    fn tight_example() {
        let out = fixed_point_perturbation(
            &SuperOperator::depolarizing(2, 0.5),
            &SuperOperator::identity(2),
            &DensityMatrix::basis(2, 0),
            &opts(),
        )
        .unwrap();
        assert_abs_diff_eq!(out.actual_distance, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.bound_value, 1.0, epsilon = 1e-9);
        assert!(out.identity_residual < 1e-12);
        assert_eq!(out.bounds.len(), 6);
    }

    #[test]
    fn shared_fixed_point() {
        let out = fixed_point_perturbation(
            &SuperOperator::depolarizing(2, 0.5),
            &SuperOperator::depolarizing(2, 0.6),
            &DensityMatrix::maximally_mixed(2),
            &opts(),
        )
        .unwrap();
        assert_abs_diff_eq!(out.actual_distance, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.bound_value, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn equal_maps_do_not_move_the_state() {
        let t = SuperOperator::amplitude_damping(0.3);
        let out = fixed_point_perturbation(&t, &t, &DensityMatrix::basis(2, 0), &opts()).unwrap();
        assert!(out.actual_distance < 1e-12);
        assert!(out.identity_residual < 1e-12);
        assert_eq!(out.bound_value, 0.0);
    }

    #[test]
    fn rejects_non_stationary_state() {
        let err = fixed_point_perturbation(
            &SuperOperator::depolarizing(2, 0.5),
            &SuperOperator::depolarizing(2, 0.6),
            &DensityMatrix::basis(2, 0),
            &opts(),
        )
        .unwrap_err();
        assert!(matches!(err, QmsError::Precondition(_)));
    }

    #[test]
    fn report_serializes() {
        let r = condition_numbers(&SuperOperator::identity(2), &opts()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: ConditionReport = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
