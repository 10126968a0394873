//! Fixed-point structure of a map: the projector `T^∞`, the fundamental map
//! `Z(T) = (id − (T − T^∞))⁻¹`, spectral scalars of the non-unit spectrum and
//! the minimal polynomial of `T − T^∞`.

use serde::{Deserialize, Serialize};

use crate::channel::{DensityMatrix, SuperOperator};
use crate::error::{QmsError, Result};
use crate::foundation::{
    self, eig, identity, max_abs, singular_values, spectral_norm, ComplexMatrix, EigenSystem, C64,
    ONE, TOL_CLUSTER,
};

/// Membership tolerance for the eigenvalue-1 group.
pub const TOL_FIX: f64 = 1e-9;
/// Idempotence / commutation tolerance for `T^∞`.
pub const TOL_PROJECTOR: f64 = 1e-8;
/// Required agreement between the spectral projector and the extrapolated Cesàro mean.
pub const TOL_CESARO: f64 = 1e-6;
/// log₂ of the number of terms in the Cesàro mean.
pub const CESARO_LOG2_TERMS: u32 = 14;
/// Residual bound for `Z·Z⁻¹ = id`.
pub const TOL_FUNDAMENTAL: f64 = 1e-8;

/// Outcome of cross-validating `T^∞` against averaged powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CesaroCheck {
    Agrees {
        deviation: f64,
        terms: u64,
    },
    Disagrees {
        deviation: f64,
        terms: u64,
    },
    /// Peripheral eigenvalues other than 1 keep the powers from converging.
    SkippedPeripheral {
        peripheral_count: usize,
    },
    /// The slowest mode has not decayed after the available number of terms.
    SkippedSlowMixing {
        subdominant_modulus: f64,
    },
}

/// `T^∞` together with how it was obtained.
#[derive(Debug, Clone)]
pub struct FixedPointStructure {
    pub projector: SuperOperator,
    /// Algebraic multiplicity of the eigenvalue 1.
    pub multiplicity: usize,
    pub cesaro: CesaroCheck,
    pub eigensystem: EigenSystem,
}

fn one_group(es: &EigenSystem) -> Vec<usize> {
    es.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| (**z - ONE).norm() <= TOL_FIX)
        .map(|(i, _)| i)
        .collect()
}

/// Spectral projector onto the fixed-point space along the other invariant subspaces.
pub fn fixed_point_projector(t: &SuperOperator) -> Result<SuperOperator> {
    Ok(fixed_point_structure(t)?.projector)
}

pub fn fixed_point_structure(t: &SuperOperator) -> Result<FixedPointStructure> {
    let m = t.matrix();
    let n = m.nrows();
    let es = eig(m)?;
    let ones = one_group(&es);
    let k = ones.len();
    if k == 0 {
        return Err(QmsError::SpectralResolution(
            "no eigenvalue within 1e-9 of 1; is the map positive and trace-preserving?".into(),
        ));
    }
    if let Some(z) = es.eigenvalues.iter().find(|z| {
        let dist = (**z - ONE).norm();
        dist > TOL_FIX && dist <= TOL_CLUSTER
    }) {
        return Err(QmsError::SpectralResolution(format!(
            "eigenvalue {z} is within the clustering tolerance of 1 but outside the fixed group"
        )));
    }

    // Null spaces of (M − I) and (M − I)† give right and left fixed vectors.
    let shifted = m - identity(n);
    let right = foundation::smallest_right_singular_vectors(&shifted, k)?;
    let left = foundation::smallest_right_singular_vectors(&shifted.adjoint(), k)?;
    let null_residual = max_abs(&(&shifted * &right)).max(max_abs(&(shifted.adjoint() * &left)));
    if null_residual > TOL_PROJECTOR {
        return Err(QmsError::SpectralResolution(format!(
            "eigenvalue 1 is not semisimple (null-space residual {null_residual:.3e})"
        )));
    }
    let gram = left.adjoint() * &right;
    let gram_inv = foundation::inverse(&gram, "fixed_point_projector").map_err(|_| {
        QmsError::SpectralResolution("left/right fixed spaces are orthogonal".into())
    })?;
    let p = &right * gram_inv * left.adjoint();

    let idem = max_abs(&(&p * &p - &p));
    let comm = max_abs(&(m * &p - &p)).max(max_abs(&(&p * m - &p)));
    if idem > TOL_PROJECTOR || comm > TOL_PROJECTOR {
        return Err(QmsError::numeric(
            "fixed_point_projector",
            format!("projector residuals: idempotence {idem:.3e}, commutation {comm:.3e}"),
        ));
    }

    let cesaro = cesaro_check(m, &p, &es, &ones);
    let projector = SuperOperator::from_matrix(t.dim(), p)?;
    Ok(FixedPointStructure {
        projector,
        multiplicity: k,
        cesaro,
        eigensystem: es,
    })
}

/// Averaged powers `C_n = (1/n) Σ_{k=1..n} T^k` by doubling, with one
/// Richardson step `2·C_{2n} − C_n` to cancel the `O(1/n)` term.
pub fn cesaro_mean(m: &ComplexMatrix, log2_terms: u32) -> (ComplexMatrix, ComplexMatrix) {
    // S_n = Σ_{k=1..n} M^k and P_n = M^n, with S_{2n} = S_n + P_n S_n.
    let mut sum = m.clone();
    let mut pow = m.clone();
    let mut prev = sum.clone();
    let mut terms = 1u64;
    for _ in 0..log2_terms {
        prev = sum.clone();
        sum = &sum + &pow * &sum;
        pow = &pow * &pow;
        terms *= 2;
    }
    let c_2n = sum.scale(1.0 / terms as f64);
    let c_n = prev.scale(2.0 / terms as f64);
    let extrapolated = c_2n.scale(2.0) - &c_n;
    (c_2n, extrapolated)
}

fn cesaro_check(
    m: &ComplexMatrix,
    p: &ComplexMatrix,
    es: &EigenSystem,
    ones: &[usize],
) -> CesaroCheck {
    let rest: Vec<C64> = es
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| !ones.contains(i))
        .map(|(_, z)| *z)
        .collect();
    let peripheral = rest
        .iter()
        .filter(|z| z.norm() >= 1.0 - TOL_CLUSTER)
        .count();
    if peripheral > 0 {
        return CesaroCheck::SkippedPeripheral {
            peripheral_count: peripheral,
        };
    }
    let sub = rest.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let half = 1u64 << (CESARO_LOG2_TERMS - 1);
    if sub.powf(half as f64) > 1e-8 {
        return CesaroCheck::SkippedSlowMixing {
            subdominant_modulus: sub,
        };
    }
    let (_, extrapolated) = cesaro_mean(m, CESARO_LOG2_TERMS);
    let deviation = max_abs(&(extrapolated - p));
    let terms = 1u64 << CESARO_LOG2_TERMS;
    if deviation <= TOL_CESARO {
        CesaroCheck::Agrees { deviation, terms }
    } else {
        CesaroCheck::Disagrees { deviation, terms }
    }
}

/// `Δ = T − T^∞`
pub fn transient_part(t: &SuperOperator, projector: &SuperOperator) -> Result<SuperOperator> {
    t.difference(projector)
}

/// Stationary states spanning the fixed-point space.
#[derive(Debug, Clone)]
pub struct StationaryStates {
    pub states: Vec<DensityMatrix>,
    pub unique: bool,
}

/// Images of a spanning family of states under `T^∞`, thinned to a linearly
/// independent set.
pub fn stationary_states(t: &SuperOperator) -> Result<StationaryStates> {
    let fps = fixed_point_structure(t)?;
    stationary_states_from(&fps)
}

pub fn stationary_states_from(fps: &FixedPointStructure) -> Result<StationaryStates> {
    let d = fps.projector.dim();
    let p = &fps.projector;
    let k = fps.multiplicity;
    if k == 1 {
        let img = p.apply(DensityMatrix::maximally_mixed(d).matrix());
        return Ok(StationaryStates {
            states: vec![DensityMatrix::from_numerical(&img)?],
            unique: true,
        });
    }

    let mut probes: Vec<DensityMatrix> = (0..d).map(|i| DensityMatrix::basis(d, i)).collect();
    let i_unit = C64::new(0.0, 1.0);
    for a in 0..d {
        for b in (a + 1)..d {
            for phase in [ONE, i_unit] {
                let mut psi = ComplexMatrix::zeros(d, 1);
                psi[(a, 0)] = ONE;
                psi[(b, 0)] = phase;
                probes.push(DensityMatrix::pure(&psi));
            }
        }
    }

    let mut basis: Vec<DensityMatrix> = Vec::new();
    let mut stacked = ComplexMatrix::zeros(d * d, 0);
    for probe in probes {
        let img = DensityMatrix::from_numerical(&p.apply(probe.matrix()))?;
        let v = foundation::vec(img.matrix())?;
        let candidate = stacked
            .clone()
            .insert_column(stacked.ncols(), C64::new(0.0, 0.0));
        let mut candidate = candidate;
        candidate.set_column(stacked.ncols(), &v.column(0));
        let sv = singular_values(&candidate);
        if sv.last().copied().unwrap_or(0.0) > 1e-8 {
            stacked = candidate;
            basis.push(img);
            if basis.len() == k {
                break;
            }
        }
    }
    if basis.len() != k {
        return Err(QmsError::numeric(
            "stationary_states",
            format!(
                "found {} independent states for a {k}-dimensional fixed space",
                basis.len()
            ),
        ));
    }
    Ok(StationaryStates {
        states: basis,
        unique: false,
    })
}

/// `Z(T) = (id − (T − T^∞))⁻¹`, trace-preserving whenever `T` is.
pub fn fundamental_map(t: &SuperOperator) -> Result<SuperOperator> {
    let p = fixed_point_projector(t)?;
    fundamental_map_from(t, &p)
}

pub fn fundamental_map_from(t: &SuperOperator, projector: &SuperOperator) -> Result<SuperOperator> {
    let n = t.matrix().nrows();
    let a = identity(n) - (t.matrix() - projector.matrix());
    let z = foundation::inverse(&a, "fundamental_map")?;
    let residual = spectral_norm(&(&z * &a - identity(n)));
    if residual > TOL_FUNDAMENTAL {
        return Err(QmsError::numeric(
            "fundamental_map",
            format!(
                "inverse residual {residual:.3e} (condition estimate {:.3e})",
                foundation::condition_number(&a)
            ),
        ));
    }
    let z = SuperOperator::from_matrix(t.dim(), z)?;
    if t.is_trace_preserving() && z.trace_preservation_residual() > TOL_FUNDAMENTAL {
        return Err(QmsError::numeric(
            "fundamental_map",
            format!(
                "Z is not trace-preserving (residual {:.3e})",
                z.trace_preservation_residual()
            ),
        ));
    }
    Ok(z)
}

/// Scalars derived from the non-unit spectrum `Λ = spec[T] \ {1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    #[serde(with = "crate::serde_ext::complex_vec")]
    pub eigenvalues: Vec<C64>,
    /// min_{λ∈Λ} |1 − λ|; `inf` when Λ is empty.
    #[serde(with = "crate::serde_ext::extended_float")]
    pub min_dist_to_one: f64,
    /// min_{λ∈Λ} (1 − |λ|); `inf` when Λ is empty.
    #[serde(with = "crate::serde_ext::extended_float")]
    pub spectral_gap: f64,
    /// max_{λ∈Λ} |λ|; 0 when Λ is empty.
    pub subdominant_modulus: f64,
    /// Eigenvalues on the unit circle outside the 1-group.
    pub peripheral_count: usize,
    /// Size of the 1-group.
    pub unit_multiplicity: usize,
    /// True when Λ is empty (every eigenvalue is 1).
    pub lambda_empty: bool,
}

impl SpectralData {
    pub fn non_unit(&self) -> impl Iterator<Item = C64> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|z| (*z - ONE).norm() > TOL_FIX)
    }
}

pub fn spectral_quantities(t: &SuperOperator) -> Result<SpectralData> {
    let es = eig(t.matrix())?;
    Ok(spectral_quantities_from(&es))
}

pub fn spectral_quantities_from(es: &EigenSystem) -> SpectralData {
    let ones = one_group(es);
    let lambda: Vec<C64> = es
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| !ones.contains(i))
        .map(|(_, z)| *z)
        .collect();
    let min_dist = lambda
        .iter()
        .map(|z| (ONE - z).norm())
        .fold(f64::INFINITY, f64::min);
    let gap = lambda
        .iter()
        .map(|z| 1.0 - z.norm())
        .fold(f64::INFINITY, f64::min);
    let sub = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let peripheral = lambda
        .iter()
        .filter(|z| z.norm() >= 1.0 - TOL_CLUSTER)
        .count();
    SpectralData {
        eigenvalues: es.eigenvalues.clone(),
        min_dist_to_one: min_dist,
        spectral_gap: gap.max(0.0),
        subdominant_modulus: sub,
        peripheral_count: peripheral,
        unit_multiplicity: ones.len(),
        lambda_empty: lambda.is_empty(),
    }
}

/// Minimal polynomial `Π (z − λᵢ)^{bᵢ}` of a linear map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalPolynomial {
    #[serde(with = "crate::serde_ext::complex_vec")]
    pub distinct_roots: Vec<C64>,
    /// Largest Jordan block per root.
    pub block_sizes: Vec<usize>,
    /// Algebraic multiplicity per root.
    pub multiplicities: Vec<usize>,
    pub degree: usize,
    /// Number of linear factors counted with multiplicity (equals `degree`).
    pub linear_factor_count: usize,
    /// ‖m(Δ)‖₂
    pub annihilation_residual: f64,
}

/// How repeated roots enter products over the factors of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FactorMultiplicity {
    /// Each distinct root once.
    Distinct,
    /// Each root repeated by its largest Jordan block size.
    #[default]
    PerBlockSize,
}

impl MinimalPolynomial {
    pub fn is_diagonalizable(&self) -> bool {
        self.block_sizes.iter().all(|&b| b == 1)
    }

    /// Roots listed as factors under the given convention.
    pub fn factors(&self, convention: FactorMultiplicity) -> Vec<C64> {
        self.distinct_roots
            .iter()
            .zip(&self.block_sizes)
            .flat_map(|(&r, &b)| {
                let reps = match convention {
                    FactorMultiplicity::Distinct => 1,
                    FactorMultiplicity::PerBlockSize => b,
                };
                std::iter::repeat_n(r, reps)
            })
            .collect()
    }

    /// `|m|` under the given convention.
    pub fn factor_count(&self, convention: FactorMultiplicity) -> usize {
        match convention {
            FactorMultiplicity::Distinct => self.distinct_roots.len(),
            FactorMultiplicity::PerBlockSize => self.degree,
        }
    }
}

const RANK_THRESHOLD: f64 = 1e-8;
const STRADDLE_FACTOR: f64 = 10.0;
const TOL_ANNIHILATION: f64 = 1e-6;

/// Minimal polynomial of `Δ` with Jordan block sizes from rank stabilization.
///
/// `Δ` is a difference of maps of unit size, so tolerances never shrink below
/// the unit scale: roundoff in an exactly-zero `Δ` is treated as zero.
pub fn minimal_polynomial(delta: &SuperOperator) -> Result<MinimalPolynomial> {
    minimal_polynomial_with_scale(delta.matrix(), 1.0)
}

/// Minimal polynomial with tolerances relative to the matrix's own size.
pub fn minimal_polynomial_of_matrix(m: &ComplexMatrix) -> Result<MinimalPolynomial> {
    minimal_polynomial_with_scale(m, 0.0)
}

/// `scale_floor` is a lower bound on the size used for clustering, rank and
/// annihilation tolerances.
pub fn minimal_polynomial_with_scale(
    m: &ComplexMatrix,
    scale_floor: f64,
) -> Result<MinimalPolynomial> {
    let n = foundation::ensure_square(m, "minimal_polynomial")?;
    let vals = foundation::eigenvalues(m)?;
    let scale = spectral_norm(m).max(scale_floor);
    let radius = vals.first().map_or(0.0, |z| z.norm()).max(scale_floor);
    let clusters = foundation::cluster_values(&vals, TOL_CLUSTER * radius.max(f64::MIN_POSITIVE));

    let mut roots = Vec::new();
    let mut blocks = Vec::new();
    let mut mults = Vec::new();
    for members in &clusters {
        let a = members.len();
        let center: C64 = members.iter().map(|&i| vals[i]).sum::<C64>() / a as f64;
        let shifted = m - identity(n) * center;
        let base = spectral_norm(&shifted).max(scale);
        let mut power = identity(n);
        let mut block = None;
        for k in 1..=a {
            power = &power * &shifted;
            let threshold = RANK_THRESHOLD * base.powi(k as i32);
            let sv = singular_values(&power);
            if sv
                .iter()
                .any(|&s| s > threshold / STRADDLE_FACTOR && s < threshold * STRADDLE_FACTOR)
            {
                return Err(QmsError::IllConditionedStructure(format!(
                    "singular values of (Δ − ({:.6}{:+.6}i)·id)^{k} straddle the rank threshold {threshold:.3e}",
                    center.re, center.im
                )));
            }
            let nullity = sv.iter().filter(|&&s| s <= threshold).count();
            if nullity >= a {
                block = Some(k);
                break;
            }
        }
        let block = block.ok_or_else(|| {
            QmsError::IllConditionedStructure(format!(
                "generalized eigenspace of root {center} never reached its algebraic multiplicity {a}"
            ))
        })?;
        roots.push(center);
        blocks.push(block);
        mults.push(a);
    }

    let mut product = identity(n);
    for (&r, &b) in roots.iter().zip(&blocks) {
        let shifted = m - identity(n) * r;
        for _ in 0..b {
            product = &product * &shifted;
        }
    }
    let degree: usize = blocks.iter().sum();
    let residual = spectral_norm(&product);
    let allowed = TOL_ANNIHILATION * scale.powi(degree as i32);
    if residual > allowed {
        return Err(QmsError::IllConditionedStructure(format!(
            "m(Δ) has norm {residual:.3e} > {allowed:.3e}"
        )));
    }
    Ok(MinimalPolynomial {
        distinct_roots: roots,
        block_sizes: blocks,
        multiplicities: mults,
        degree,
        linear_factor_count: degree,
        annihilation_residual: residual,
    })
}
