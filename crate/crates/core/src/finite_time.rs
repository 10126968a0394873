//! Finite-time perturbation bounds for discrete and continuous evolutions,
//! and constructions of exponential convergence pairs `(K, μ)` / `(K, ν)`.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, GeneratorMap, SuperOperator};
use crate::contraction::{self, DEFAULT_RESTARTS, TOL_OPT};
use crate::error::{QmsError, Result};
use crate::foundation::{
    self, hermitian_eigen, kron, spectral_norm, trace_norm_unchecked, ComplexMatrix, C64,
};
use crate::report::{BoundReport, Regime};
use crate::rng::derive_seed;
use crate::spectral::{self, FactorMultiplicity};

/// Slack allowed in trajectory assertions.
pub const TOL_TRAJECTORY: f64 = 1e-6;
/// Default horizon for empirical pair validation.
pub const DEFAULT_VALIDATION_STEPS: u64 = 50;
/// Time step used to turn a discrete recipe into a continuous pair.
pub const DEFAULT_CONTINUOUS_STEP: f64 = 0.1;
const MIN_STATIONARY_EIGENVALUE: f64 = 1e-12;
const TOL_DETAILED_BALANCE: f64 = 1e-8;
const CIRCLE_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    UserSupplied,
    Chi2,
    DetailedBalance,
    MinimalPolynomial,
}

impl Recipe {
    pub fn as_str(self) -> &'static str {
        match self {
            Recipe::UserSupplied => "user_supplied",
            Recipe::Chi2 => "chi2",
            Recipe::DetailedBalance => "detailed_balance",
            Recipe::MinimalPolynomial => "minimal_polynomial",
        }
    }
}

/// Where empirical validation found `‖Tⁿ − T^∞‖₁→₁ > K·μⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub at: f64,
    pub norm_estimate: f64,
    pub bound: f64,
}

/// Intermediate quantities of the minimal-polynomial recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPairDetails {
    pub convention: FactorMultiplicity,
    /// |m|
    pub factor_count: usize,
    pub prefactor: f64,
    /// sup_{|z|=μ} |Π (1 − λ̄ᵢz)/(z − λᵢ)|
    pub circle_sup: f64,
    /// Π (1 − μ|λᵢ|)/(μ − |λᵢ|)
    pub modulus_product: f64,
    #[serde(rename = "K_circle")]
    pub k_circle: f64,
    #[serde(rename = "K_modulus")]
    pub k_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePair {
    #[serde(rename = "K")]
    pub k: f64,
    /// μ for discrete pairs, ν for continuous ones.
    pub rate: f64,
    pub kind: PairKind,
    pub recipe: Recipe,
    /// Largest `n` (or `t`) up to which the certified inequality was checked
    /// without a violation.
    pub validity_checked_to: f64,
    /// Set when validation found a violation; poisoned pairs are refused by
    /// the trajectory checks.
    pub violation: Option<PairViolation>,
    /// Time step of the discrete map a continuous pair was derived from.
    pub derived_step: Option<f64>,
    pub spectral_details: Option<SpectralPairDetails>,
}

impl ConvergencePair {
    pub fn discrete(k: f64, mu: f64) -> Result<Self> {
        let pair = ConvergencePair {
            k,
            rate: mu,
            kind: PairKind::Discrete,
            recipe: Recipe::UserSupplied,
            validity_checked_to: 0.0,
            violation: None,
            derived_step: None,
            spectral_details: None,
        };
        pair.check_domain()?;
        Ok(pair)
    }

    pub fn continuous(k: f64, nu: f64) -> Result<Self> {
        let pair = ConvergencePair {
            kind: PairKind::Continuous,
            ..ConvergencePair::discrete(k, 0.0)?
        };
        let pair = ConvergencePair { rate: nu, ..pair };
        pair.check_domain()?;
        Ok(pair)
    }

    pub fn is_poisoned(&self) -> bool {
        self.violation.is_some()
    }

    fn check_domain(&self) -> Result<()> {
        if !self.k.is_finite() || self.k < 0.0 {
            return Err(QmsError::Domain(format!(
                "K must be a finite value ≥ 0, got {}",
                self.k
            )));
        }
        match self.kind {
            PairKind::Discrete if !(0.0..1.0).contains(&self.rate) => Err(QmsError::Domain(
                format!("μ must lie in [0, 1), got {}", self.rate),
            )),
            PairKind::Continuous if !self.rate.is_finite() || self.rate <= 0.0 => Err(
                QmsError::Domain(format!("ν must be positive, got {}", self.rate)),
            ),
            _ => Ok(()),
        }
    }

    fn require_kind(&self, kind: PairKind) -> Result<()> {
        self.check_domain()?;
        if self.kind != kind {
            return Err(QmsError::Domain(format!(
                "expected a {kind:?} pair, got a {:?} pair",
                self.kind
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComponents {
    pub initial_term: f64,
    pub perturbation_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteTimeBound {
    /// n̂ or t̂
    pub threshold: f64,
    pub regime: Regime,
    pub bound_value: f64,
    pub components: BoundComponents,
}

/// `max(0, ⌈log(1/K)/log μ⌉)`, snapping ratios within roundoff of an integer
/// so that e.g. `K = 4, μ = 1/2` gives 2.
pub fn n_hat(k: f64, mu: f64) -> u64 {
    if k <= 1.0 {
        return 0;
    }
    if mu == 0.0 {
        return 0;
    }
    let r = (1.0 / k).ln() / mu.ln();
    let nearest = r.round();
    let r = if (r - nearest).abs() <= 1e-12 * nearest.abs().max(1.0) {
        nearest
    } else {
        r
    };
    r.ceil().max(0.0) as u64
}

/// `max(0, log K / ν)`
pub fn t_hat(k: f64, nu: f64) -> f64 {
    if k <= 1.0 {
        0.0
    } else {
        k.ln() / nu
    }
}

fn check_distances(d0: f64, d1: f64) -> Result<()> {
    if !(d0 >= 0.0 && d1 >= 0.0) {
        return Err(QmsError::Domain(format!(
            "distances must be nonnegative, got {d0} and {d1}"
        )));
    }
    Ok(())
}

/// Case-split bound on `‖ρ_n − σ_n‖₁` for `ρ_n = Tⁿ(ρ₀)`, `σ_n = Eⁿ(σ₀)`,
/// given `d0 = ‖ρ₀ − σ₀‖₁` and `d_t = ‖E − T‖₁→₁`.
pub fn discrete_bound(
    pair: &ConvergencePair,
    n: u64,
    d0: f64,
    d_t: f64,
) -> Result<FiniteTimeBound> {
    pair.require_kind(PairKind::Discrete)?;
    check_distances(d0, d_t)?;
    let (k, mu) = (pair.k, pair.rate);
    let nh = n_hat(k, mu);
    if n <= nh {
        let pert = n as f64 * d_t;
        return Ok(FiniteTimeBound {
            threshold: nh as f64,
            regime: Regime::PreThreshold,
            bound_value: d0 + pert,
            components: BoundComponents {
                initial_term: d0,
                perturbation_term: pert,
            },
        });
    }
    let mu_n = pow(mu, n);
    let initial = k * mu_n * d0;
    let pert = (nh as f64 + k * (pow(mu, nh) - mu_n) / (1.0 - mu)) * d_t;
    Ok(FiniteTimeBound {
        threshold: nh as f64,
        regime: Regime::PostThreshold,
        bound_value: initial + pert,
        components: BoundComponents {
            initial_term: initial,
            perturbation_term: pert,
        },
    })
}

/// `μⁿ` with `0⁰ = 1`.
fn pow(mu: f64, n: u64) -> f64 {
    if n == 0 {
        1.0
    } else {
        mu.powf(n as f64)
    }
}

/// Limit superior bound `(n̂ + 1/(1 − μ))·d_t`.
pub fn asymptotic_discrete(pair: &ConvergencePair, d_t: f64) -> Result<f64> {
    pair.require_kind(PairKind::Discrete)?;
    check_distances(0.0, d_t)?;
    Ok((n_hat(pair.k, pair.rate) as f64 + 1.0 / (1.0 - pair.rate)) * d_t)
}

/// Exact `n → ∞` limit of [`discrete_bound`]: `(n̂ + K·μ^n̂/(1 − μ))·d_t`.
/// Never exceeds [`asymptotic_discrete`]; the two agree when `K·μ^n̂ = 1`.
pub fn discrete_limit(pair: &ConvergencePair, d_t: f64) -> Result<f64> {
    pair.require_kind(PairKind::Discrete)?;
    check_distances(0.0, d_t)?;
    let nh = n_hat(pair.k, pair.rate);
    Ok((nh as f64 + pair.k * pow(pair.rate, nh) / (1.0 - pair.rate)) * d_t)
}

/// Case-split bound for semigroups `e^{t𝔏_T}`, `e^{t𝔏_E}` given
/// `d_l = ‖𝔏_E − 𝔏_T‖₁→₁`.
pub fn continuous_bound(
    pair: &ConvergencePair,
    t: f64,
    d0: f64,
    d_l: f64,
) -> Result<FiniteTimeBound> {
    pair.require_kind(PairKind::Continuous)?;
    check_distances(d0, d_l)?;
    if t.is_nan() || t < 0.0 {
        return Err(QmsError::Domain(format!("t must be ≥ 0, got {t}")));
    }
    let (k, nu) = (pair.k, pair.rate);
    let th = t_hat(k, nu);
    if t < th {
        let pert = t * d_l;
        return Ok(FiniteTimeBound {
            threshold: th,
            regime: Regime::PreThreshold,
            bound_value: d0 + pert,
            components: BoundComponents {
                initial_term: d0,
                perturbation_term: pert,
            },
        });
    }
    let decay = k * (-nu * t).exp();
    let initial = decay * d0;
    let pert = (k.ln() + 1.0 - decay) / nu * d_l;
    Ok(FiniteTimeBound {
        threshold: th,
        regime: Regime::PostThreshold,
        bound_value: initial + pert,
        components: BoundComponents {
            initial_term: initial,
            perturbation_term: pert,
        },
    })
}

/// `(log K + 1)/ν · d_l`
pub fn asymptotic_continuous(pair: &ConvergencePair, d_l: f64) -> Result<f64> {
    pair.require_kind(PairKind::Continuous)?;
    check_distances(0.0, d_l)?;
    Ok((pair.k.ln() + 1.0) / pair.rate * d_l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

/// Checks `‖A‖₁→₁ ≤ bound`. The cheap upper estimate `√d·‖M_A‖₂` certifies
/// directly; otherwise the multistart lower bound must not exceed `bound`.
fn norm_within(a: &SuperOperator, bound: f64, restarts: usize, seed: u64) -> Result<Option<f64>> {
    let upper = (a.dim() as f64).sqrt() * spectral_norm(a.matrix());
    if upper <= bound * (1.0 + 1e-12) + 1e-14 {
        return Ok(None);
    }
    let est = contraction::norm_1to1(a, restarts, seed, false)?.value;
    if est <= bound + TOL_OPT {
        Ok(None)
    } else {
        Ok(Some(est))
    }
}

/// Empirically checks `‖Tⁿ − T^∞‖₁→₁ ≤ K·μⁿ` for `n = 0..=n_max`, recording
/// the first violation in the pair.
pub fn validate_discrete_pair(
    pair: &mut ConvergencePair,
    t: &SuperOperator,
    n_max: u64,
    opts: &ValidationOptions,
) -> Result<()> {
    pair.require_kind(PairKind::Discrete)?;
    let p = spectral::fixed_point_projector(t)?;
    let mut power = SuperOperator::identity(t.dim());
    for n in 0..=n_max {
        if n > 0 {
            power = power.compose(t)?;
        }
        let bound = pair.k * pow(pair.rate, n);
        let diff = &power - &p;
        if let Some(est) = norm_within(&diff, bound, opts.restarts, derive_seed(opts.seed, n))? {
            pair.violation = Some(PairViolation {
                at: n as f64,
                norm_estimate: est,
                bound,
            });
            return Ok(());
        }
        pair.validity_checked_to = pair.validity_checked_to.max(n as f64);
    }
    Ok(())
}

/// Same check for `‖e^{t𝔏} − P‖₁→₁ ≤ K·e^{−νt}` on `samples` uniform times in `[0, t_max]`.
pub fn validate_continuous_pair(
    pair: &mut ConvergencePair,
    l: &GeneratorMap,
    t_max: f64,
    samples: u64,
    opts: &ValidationOptions,
) -> Result<()> {
    pair.require_kind(PairKind::Continuous)?;
    let p = semigroup_projector(l)?;
    for (i, t) in time_grid(t_max, samples).into_iter().enumerate() {
        let bound = pair.k * (-pair.rate * t).exp();
        let diff = &l.exp(t)? - &p;
        if let Some(est) = norm_within(
            &diff,
            bound,
            opts.restarts,
            derive_seed(opts.seed, i as u64),
        )? {
            pair.violation = Some(PairViolation {
                at: t,
                norm_estimate: est,
                bound,
            });
            return Ok(());
        }
        pair.validity_checked_to = pair.validity_checked_to.max(t);
    }
    Ok(())
}

/// `samples` uniform times covering `[0, t_max]` including both ends.
pub fn time_grid(t_max: f64, samples: u64) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![t_max],
        _ => (0..samples)
            .map(|i| t_max * i as f64 / (samples - 1) as f64)
            .collect(),
    }
}

/// Fixed-point projector of the semigroup, from `e^{𝔏}`.
fn semigroup_projector(l: &GeneratorMap) -> Result<SuperOperator> {
    spectral::fixed_point_projector(&l.exp(1.0)?)
}

fn unique_stationary_state(t: &SuperOperator) -> Result<DensityMatrix> {
    let st = spectral::stationary_states(t)?;
    if !st.unique {
        return Err(QmsError::Hypothesis(format!(
            "the map has a {}-dimensional space of stationary states; a unique one is required",
            st.states.len()
        )));
    }
    Ok(st.states.into_iter().next().expect("one state"))
}

/// `σ^{s}` for a full-rank state.
fn state_power(sigma: &DensityMatrix, s: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eigen(sigma.matrix())?;
    let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::new(v.powf(s), 0.0)),
    ));
    Ok(&vecs * diag * vecs.adjoint())
}

/// Superoperator of `Ω(X) = σ^{−1/4} T(σ^{1/4} X σ^{1/4}) σ^{−1/4}` and `λ_min(σ)`.
fn omega(t: &SuperOperator) -> Result<(ComplexMatrix, f64)> {
    let sigma = unique_stationary_state(t)?;
    let lambda_min = sigma.eigenvalues().first().copied().unwrap_or(0.0);
    if lambda_min <= MIN_STATIONARY_EIGENVALUE {
        return Err(QmsError::Domain(format!(
            "stationary state is rank-deficient (smallest eigenvalue {lambda_min:.3e})"
        )));
    }
    let a = state_power(&sigma, -0.25)?;
    let b = state_power(&sigma, 0.25)?;
    // vec(A X A) = (Aᵀ ⊗ A) vec(X)
    let outer = kron(&a.transpose(), &a);
    let inner = kron(&b.transpose(), &b);
    Ok((outer * t.matrix() * inner, lambda_min))
}

fn derived_pair(k: f64, mu: f64, recipe: Recipe) -> Result<ConvergencePair> {
    Ok(ConvergencePair {
        recipe,
        ..ConvergencePair::discrete(k, mu)?
    })
}

/// `K = (λ_min⁻¹ − 1)^{1/2}`, `μ` = second largest singular value of `Ω`.
/// Not yet validated; see [`derive_pair`].
pub fn pair_chi2(t: &SuperOperator) -> Result<ConvergencePair> {
    let (om, lambda_min) = omega(t)?;
    let sv = foundation::singular_values(&om);
    let mu = sv.get(1).copied().unwrap_or(0.0);
    let k = (1.0 / lambda_min - 1.0).max(0.0).sqrt();
    derived_pair(k, mu, Recipe::Chi2)
}

/// Requires `Ω` self-adjoint; `μ` = largest non-unit eigenvalue modulus,
/// `K = √(2d)·λ_min^{−1/2}`.
pub fn pair_detailed_balance(t: &SuperOperator) -> Result<ConvergencePair> {
    let (om, lambda_min) = omega(t)?;
    let residual = spectral_norm(&(&om - om.adjoint()));
    if residual > TOL_DETAILED_BALANCE {
        return Err(QmsError::Domain(format!(
            "map does not satisfy detailed balance: ‖Ω − Ω*‖₂ = {residual:.3e}"
        )));
    }
    let mu = spectral::spectral_quantities(t)?.subdominant_modulus;
    let k = (2.0 * t.dim() as f64).sqrt() / lambda_min.sqrt();
    derived_pair(k, mu, Recipe::DetailedBalance)
}

fn circle_product(roots: &[C64], z: C64) -> f64 {
    roots
        .iter()
        .map(|l| ((C64::new(1.0, 0.0) - l.conj() * z) / (z - l)).norm())
        .product()
}

/// Maximizes `|Π (1 − λ̄ᵢz)/(z − λᵢ)|` over `|z| = μ`: grid, then golden-section
/// refinement around the best grid angle.
fn circle_sup(roots: &[C64], mu: f64) -> f64 {
    let f = |theta: f64| circle_product(roots, C64::from_polar(mu, theta));
    let h = 2.0 * std::f64::consts::PI / CIRCLE_GRID as f64;
    let (mut best_i, mut best) = (0, f(0.0));
    for i in 1..CIRCLE_GRID {
        let v = f(i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let (mut a, mut b) = ((best_i as f64 - 1.0) * h, (best_i as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    for _ in 0..100 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    best.max(f((a + b) / 2.0))
}

/// Minimal-polynomial recipe at radius `μ`, default multiplicity convention.
pub fn pair_minimal_polynomial(t: &SuperOperator, mu: f64) -> Result<ConvergencePair> {
    pair_minimal_polynomial_with(t, mu, FactorMultiplicity::default())
}

pub fn pair_minimal_polynomial_with(
    t: &SuperOperator,
    mu: f64,
    convention: FactorMultiplicity,
) -> Result<ConvergencePair> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(QmsError::Domain(format!("μ must lie in (0, 1), got {mu}")));
    }
    let p = spectral::fixed_point_projector(t)?;
    let delta = spectral::transient_part(t, &p)?;
    let mp = spectral::minimal_polynomial(&delta)?;
    if let Some(r) = mp.distinct_roots.iter().find(|r| r.norm() >= mu) {
        return Err(QmsError::Domain(format!(
            "μ = {mu} does not enclose the spectrum of T − T^∞ (eigenvalue of modulus {})",
            r.norm()
        )));
    }
    let roots = mp.factors(convention);
    let count = mp.factor_count(convention);
    let prefactor = 4.0 * E * (count as f64).sqrt() / (1.0 - mu).powf(1.5);
    let sup = circle_sup(&roots, mu);
    let modulus: f64 = roots
        .iter()
        .map(|l| (1.0 - mu * l.norm()) / (mu - l.norm()))
        .product();
    // The bound reads prefactor·(…)·μ^{n+1}; fold one μ into K.
    let k_circle = prefactor * sup * mu;
    let k_modulus = prefactor * modulus * mu;
    let mut pair = derived_pair(k_circle.min(k_modulus), mu, Recipe::MinimalPolynomial)?;
    pair.spectral_details = Some(SpectralPairDetails {
        convention,
        factor_count: count,
        prefactor,
        circle_sup: sup,
        modulus_product: modulus,
        k_circle,
        k_modulus,
    });
    Ok(pair)
}

/// Discrete recipes selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "recipe")]
pub enum PairRequest {
    Chi2,
    DetailedBalance,
    MinimalPolynomial { mu: f64 },
    UserSupplied { k: f64, rate: f64 },
}

/// Builds the requested discrete pair for `t` and validates it up to `n_max`.
pub fn derive_pair(
    t: &SuperOperator,
    request: PairRequest,
    n_max: u64,
    opts: &ValidationOptions,
) -> Result<ConvergencePair> {
    let mut pair = match request {
        PairRequest::Chi2 => pair_chi2(t)?,
        PairRequest::DetailedBalance => pair_detailed_balance(t)?,
        PairRequest::MinimalPolynomial { mu } => pair_minimal_polynomial(t, mu)?,
        PairRequest::UserSupplied { k, rate } => ConvergencePair::discrete(k, rate)?,
    };
    validate_discrete_pair(&mut pair, t, n_max, opts)?;
    Ok(pair)
}

/// Continuous pair from a discrete recipe applied to `T_h = e^{h𝔏}`.
///
/// For `nh ≤ t < (n+1)h`, `e^{t𝔏} − P = (T_hⁿ − P)∘e^{(t−nh)𝔏}` and positive
/// trace-preserving maps have unit 1→1 norm, so
/// `‖e^{t𝔏} − P‖ ≤ K_h μ_h^{t/h − 1}`: `K = K_h/μ_h`, `ν = −ln(μ_h)/h`.
pub fn derive_continuous_pair(
    l: &GeneratorMap,
    request: PairRequest,
    h: f64,
    t_max: f64,
    samples: u64,
    opts: &ValidationOptions,
) -> Result<ConvergencePair> {
    let mut pair = match request {
        PairRequest::UserSupplied { k, rate } => ConvergencePair::continuous(k, rate)?,
        _ => {
            if h.is_nan() || h <= 0.0 {
                return Err(QmsError::Domain(format!(
                    "step h must be positive, got {h}"
                )));
            }
            let th = l.exp(h)?;
            let discrete = match request {
                PairRequest::Chi2 => pair_chi2(&th)?,
                PairRequest::DetailedBalance => pair_detailed_balance(&th)?,
                PairRequest::MinimalPolynomial { mu } => pair_minimal_polynomial(&th, mu)?,
                PairRequest::UserSupplied { .. } => unreachable!(),
            };
            if discrete.rate <= 0.0 {
                return Err(QmsError::Domain(
                    "discrete rate is 0; the semigroup reaches its fixed point in finite time"
                        .into(),
                ));
            }
            ConvergencePair {
                k: discrete.k / discrete.rate,
                rate: -discrete.rate.ln() / h,
                kind: PairKind::Continuous,
                derived_step: Some(h),
                ..discrete
            }
        }
    };
    pair.check_domain()?;
    validate_continuous_pair(&mut pair, l, t_max, samples, opts)?;
    Ok(pair)
}

fn refuse_poisoned(pair: &ConvergencePair) -> Result<()> {
    if let Some(v) = &pair.violation {
        return Err(QmsError::Precondition(format!(
            "convergence pair failed validation at {}: norm {:.6e} > K·rate^n = {:.6e}",
            v.at, v.norm_estimate, v.bound
        )));
    }
    Ok(())
}

/// Simulates `ρ_n = Tⁿ(ρ₀)`, `σ_n = Eⁿ(σ₀)` for `n = 1..=steps` and compares
/// each distance with the discrete bound. The pair is validated up to
/// `steps` first if it has not been already.
#[allow(clippy::too_many_arguments)]
pub fn discrete_trajectory_check(
    t: &SuperOperator,
    e: &SuperOperator,
    rho0: &DensityMatrix,
    sigma0: &DensityMatrix,
    steps: u64,
    pair: &mut ConvergencePair,
    opts: &ValidationOptions,
    instance: u64,
) -> Result<Vec<BoundReport>> {
    unique_stationary_state(t)?;
    if pair.validity_checked_to < steps as f64 && !pair.is_poisoned() {
        validate_discrete_pair(pair, t, steps, opts)?;
    }
    refuse_poisoned(pair)?;
    let d_t = contraction::norm_1to1(&(e - t), opts.restarts, opts.seed, false)?.value;
    let d0 = rho0.distance(sigma0);
    let mut rho = rho0.matrix().clone();
    let mut sigma = sigma0.matrix().clone();
    let mut rows = Vec::with_capacity(steps as usize);
    for n in 1..=steps {
        rho = t.apply(&rho);
        sigma = e.apply(&sigma);
        let exact = trace_norm_unchecked(&(&rho - &sigma));
        let b = discrete_bound(pair, n, d0, d_t)?;
        rows.push(row(instance, n as f64, exact, &b, pair));
    }
    Ok(rows)
}

fn row(
    instance: u64,
    n_or_t: f64,
    exact: f64,
    b: &FiniteTimeBound,
    pair: &ConvergencePair,
) -> BoundReport {
    BoundReport {
        instance,
        n_or_t,
        exact,
        bound: b.bound_value,
        slack: b.bound_value - exact,
        regime: b.regime,
        k: Some(pair.k),
        rate: Some(pair.rate),
        recipe: Some(pair.recipe),
        kappa_variant: None,
        error: None,
    }
}

/// Continuous analogue on `samples` uniform times in `[0, t_max]`.
#[allow(clippy::too_many_arguments)]
pub fn continuous_trajectory_check(
    lt: &GeneratorMap,
    le: &GeneratorMap,
    rho0: &DensityMatrix,
    sigma0: &DensityMatrix,
    t_max: f64,
    samples: u64,
    pair: &mut ConvergencePair,
    opts: &ValidationOptions,
    instance: u64,
) -> Result<Vec<BoundReport>> {
    unique_stationary_state(&lt.exp(1.0)?)?;
    if pair.validity_checked_to < t_max && !pair.is_poisoned() {
        validate_continuous_pair(pair, lt, t_max, samples, opts)?;
    }
    refuse_poisoned(pair)?;
    let d_l = contraction::norm_1to1(&lt.difference(le)?, opts.restarts, opts.seed, false)?.value;
    let d0 = rho0.distance(sigma0);
    let mut rows = Vec::with_capacity(samples as usize);
    for t in time_grid(t_max, samples) {
        let rho = lt.exp(t)?.apply(rho0.matrix());
        let sigma = le.exp(t)?.apply(sigma0.matrix());
        let exact = trace_norm_unchecked(&(rho - sigma));
        let b = continuous_bound(pair, t, d0, d_l)?;
        rows.push(row(instance, t, exact, &b, pair));
    }
    Ok(rows)
}
