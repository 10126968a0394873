//! Seeded random channels, generators and perturbations, and sweeps that run
//! the stability and finite-time checks over them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, GeneratorMap, SuperOperator};
use crate::error::{QmsError, Result};
use crate::finite_time::{self, PairRequest, ValidationOptions, DEFAULT_CONTINUOUS_STEP};
use crate::foundation::{hermitian_part, ComplexMatrix, C64};
use crate::report::{BoundReport, Regime};
use crate::rng::{derive_seed, Prng};
use crate::stability::{self, AnalysisOptions, NormMode};

/// Haar-distributed isometry `V: ℂ^d → ℂ^{d·r}` from the QR factorization of
/// a complex Gaussian matrix, with the phases fixed so that `R` has a positive
/// real diagonal.
pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let g = Prng::new(seed).gaussian_matrix(rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// CPTP map with `kraus_rank` Kraus operators cut from a random isometry.
pub fn random_channel(d: usize, kraus_rank: usize, seed: u64) -> Result<SuperOperator> {
    if kraus_rank == 0 || d == 0 {
        return Err(QmsError::Validation(
            "dimension and Kraus rank must be ≥ 1".into(),
        ));
    }
    let v = random_isometry(d * kraus_rank, d, seed);
    let kraus: Vec<ComplexMatrix> = (0..kraus_rank)
        .map(|k| v.rows(k * d, d).into_owned())
        .collect();
    SuperOperator::from_kraus(&kraus)
}

/// Lindblad generator with a Gaussian Hermitian Hamiltonian and
/// `jump_count` Gaussian jump operators.
pub fn random_generator(d: usize, jump_count: usize, seed: u64) -> Result<GeneratorMap> {
    let mut rng = Prng::new(seed);
    let h = hermitian_part(&rng.gaussian_matrix(d, d));
    let jumps: Vec<ComplexMatrix> = (0..jump_count).map(|_| rng.gaussian_matrix(d, d)).collect();
    GeneratorMap::lindblad(&h, &jumps)
}

/// `(1 − ε)·T + ε·R` with `R` a full-Kraus-rank random channel.
pub fn perturb_channel(t: &SuperOperator, eps: f64, seed: u64) -> Result<SuperOperator> {
    check_eps(eps)?;
    let d = t.dim();
    let r = random_channel(d, d * d, seed)?;
    t.convex_mix(&r, eps)
}

/// `(1 − ε)·𝔏 + ε·𝔏_R` with `𝔏_R` a random generator with `d² − 1` jumps.
pub fn perturb_generator(l: &GeneratorMap, eps: f64, seed: u64) -> Result<GeneratorMap> {
    check_eps(eps)?;
    let d = l.dim();
    let r = random_generator(d, d * d - 1, seed)?;
    l.convex_mix(&r, eps)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(QmsError::Validation(format!(
            "perturbation strength must lie in [0, 1], got {eps}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dim: usize,
    pub count: usize,
    pub master_seed: u64,
    /// Defaults to `d²`.
    pub kraus_rank: Option<usize>,
    pub perturbation_eps: f64,
    pub mode: EnsembleMode,
    /// Steps (discrete) or time samples (continuous) per trajectory.
    pub steps: u64,
    pub t_max: f64,
    pub pair: PairRequest,
    pub restarts: usize,
}

impl EnsembleConfig {
    pub fn new(dim: usize, count: usize, master_seed: u64) -> Self {
        EnsembleConfig {
            dim,
            count,
            master_seed,
            kraus_rank: None,
            perturbation_eps: 1e-3,
            mode: EnsembleMode::Discrete,
            steps: 50,
            t_max: 20.0,
            pair: PairRequest::Chi2,
            restarts: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(QmsError::Validation("count must be ≥ 1".into()));
        }
        if self.dim < 2 {
            return Err(QmsError::Validation("dimension must be ≥ 2".into()));
        }
        if self.kraus_rank == Some(0) {
            return Err(QmsError::Validation("Kraus rank must be ≥ 1".into()));
        }
        check_eps(self.perturbation_eps)
    }

    pub fn kraus_rank(&self) -> usize {
        self.kraus_rank.unwrap_or(self.dim * self.dim)
    }
}

/// Seed of instance `i`.
pub fn instance_seed(config: &EnsembleConfig, i: usize) -> u64 {
    derive_seed(config.master_seed, i as u64)
}

/// Runs every instance independently (in parallel) and concatenates the rows
/// in instance order. Failures become error rows.
pub fn sweep(config: &EnsembleConfig) -> Result<Vec<BoundReport>> {
    config.validate()?;
    let per_instance: Vec<Vec<BoundReport>> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            run_instance(config, i)
                .unwrap_or_else(|e| vec![BoundReport::error_row(i as u64, e.to_string())])
        })
        .collect();
    Ok(per_instance.into_iter().flatten().collect())
}

fn stationary_rows(
    t1: &SuperOperator,
    t2: &SuperOperator,
    opts: &AnalysisOptions,
    instance: u64,
) -> Result<Vec<BoundReport>> {
    let st = crate::spectral::stationary_states(t2)?;
    if !st.unique {
        return Err(QmsError::Hypothesis(
            "perturbed map has no unique stationary state".into(),
        ));
    }
    let out = stability::fixed_point_perturbation(t1, t2, &st.states[0], opts)?;
    Ok(out
        .bounds
        .iter()
        .filter(|b| b.norm_mode == NormMode::General)
        .map(|b| BoundReport {
            instance,
            n_or_t: f64::INFINITY,
            exact: out.actual_distance,
            bound: b.bound,
            slack: b.slack,
            regime: Regime::Stationary,
            k: None,
            rate: None,
            recipe: None,
            kappa_variant: Some(b.kappa_variant),
            error: None,
        })
        .collect())
}

fn run_instance(config: &EnsembleConfig, i: usize) -> Result<Vec<BoundReport>> {
    let seed = instance_seed(config, i);
    let d = config.dim;
    let instance = i as u64;
    let analysis = AnalysisOptions {
        restarts: config.restarts,
        seed,
    };
    let validation = ValidationOptions {
        restarts: config.restarts,
        seed,
    };
    let rho0 = DensityMatrix::basis(d, 0);
    match config.mode {
        EnsembleMode::Discrete => {
            let t = random_channel(d, config.kraus_rank(), seed)?;
            let e = perturb_channel(&t, config.perturbation_eps, derive_seed(seed, 1))?;
            let mut rows = stationary_rows(&t, &e, &analysis, instance)?;
            let mut pair = finite_time::derive_pair(&t, config.pair, config.steps, &validation)?;
            rows.extend(finite_time::discrete_trajectory_check(
                &t,
                &e,
                &rho0,
                &rho0,
                config.steps,
                &mut pair,
                &validation,
                instance,
            )?);
            Ok(rows)
        }
        EnsembleMode::Continuous => {
            let lt = random_generator(d, d * d - 1, seed)?;
            let le = perturb_generator(&lt, config.perturbation_eps, derive_seed(seed, 1))?;
            let mut rows = stationary_rows(&lt.exp(1.0)?, &le.exp(1.0)?, &analysis, instance)?;
            let mut pair = finite_time::derive_continuous_pair(
                &lt,
                config.pair,
                DEFAULT_CONTINUOUS_STEP,
                config.t_max,
                config.steps,
                &validation,
            )?;
            rows.extend(finite_time::continuous_trajectory_check(
                &lt,
                &le,
                &rho0,
                &rho0,
                config.t_max,
                config.steps,
                &mut pair,
                &validation,
                instance,
            )?);
            Ok(rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::validate;
    use crate::contraction;
    use crate::foundation::{identity, max_abs};

    #[test]
    fn isometry_has_orthonormal_columns() {
        let v = random_isometry(8, 2, 4);
        assert!(max_abs(&(v.adjoint() * &v - identity(2))) < 1e-12);
    }

    #[test]
    fn random_channel_is_cptp_and_deterministic() {
        let t = random_channel(2, 4, 17).unwrap();
        assert!(t.trace_preservation_residual() <= 1e-12);
        let rep = validate(&t, 200, 1).unwrap();
        assert!(rep.completely_positive.ok);
        assert_eq!(t, random_channel(2, 4, 17).unwrap());
        assert_ne!(t, random_channel(2, 4, 18).unwrap());
    }

    #[test]
    fn kraus_rank_one_is_unitary() {
        let t = random_channel(3, 1, 5).unwrap();
        assert!(t.unitality_residual() < 1e-12);
        let tau = contraction::tau(&t, 8, 0).unwrap();
        assert!((tau.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hamiltonian_generator_has_no_gap() {
        let l = random_generator(2, 0, 3).unwrap();
        let sd = crate::spectral::spectral_quantities(&l.exp(1.0).unwrap()).unwrap();
        assert!(sd.spectral_gap < 1e-9);
    }

    #[test]
    fn random_generator_exponential_is_cptp() {
        let l = random_generator(3, 2, 8).unwrap();
        for t in [0.1, 1.0] {
            let rep = validate(&l.exp(t).unwrap(), 100, 0).unwrap();
            assert!(rep.trace_preserving.ok && rep.completely_positive.ok);
        }
    }

    #[test]
    fn perturbation_endpoints() {
        let t = SuperOperator::depolarizing(2, 0.5);
        assert_eq!(perturb_channel(&t, 0.0, 1).unwrap().matrix(), t.matrix());
        let r = random_channel(2, 4, 1).unwrap();
        assert!(max_abs(&(perturb_channel(&t, 1.0, 1).unwrap().matrix() - r.matrix())) < 1e-15);
        let p = perturb_channel(&t, 0.01, 9).unwrap();
        let n = contraction::norm_1to1(&(&p - &t), 16, 0, false).unwrap();
        assert!(n.value <= 0.02 + 1e-12);
        assert!(perturb_channel(&t, 1.5, 0).is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut cfg = EnsembleConfig::new(2, 3, 42);
        cfg.steps = 10;
        let a = sweep(&cfg).unwrap();
        let b = sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.holds(1e-6)), "{a:?}");
    }
}
