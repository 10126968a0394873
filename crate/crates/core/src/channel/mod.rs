//! Linear maps on `M_d(ℂ)` in superoperator form, plus states and generators.

mod io;

pub use io::{
    parse_channel_file, parse_channel_str, parse_state_file, parse_state_str, ChannelFile,
    ChannelSpec, Representation,
};

use std::ops::{Add, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QmsError, Result};
use crate::foundation::{
    self, hermitian_eigenvalues, identity, kron, max_abs, trace, ComplexMatrix, C64, ONE, ZERO,
};
use crate::rng::Prng;
use crate::serde_ext::MatrixRows;

/// Residual tolerance for the algebraic checks (TP, unitality, Hermiticity).
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// An output eigenvalue below `-TOL_WITNESS` disproves positivity.
pub const TOL_WITNESS: f64 = 1e-8;
pub const DEFAULT_POSITIVITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Kraus,
    Explicit,
    StochasticEmbedding,
    ExponentialOfGenerator,
    Composed,
}

/// A linear map on `d×d` matrices stored as its `d²×d²` matrix in the
/// column-stacking convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl SuperOperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_provenance(dim, matrix, Provenance::Explicit)
    }

    fn with_provenance(dim: usize, matrix: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(QmsError::Dimension(
                "superoperator dimension must be ≥ 1".into(),
            ));
        }
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(QmsError::Dimension(format!(
                "superoperator for d={dim} must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        foundation::ensure_finite(&matrix, "superoperator")?;
        Ok(SuperOperator {
            dim,
            matrix,
            provenance,
        })
    }

    pub fn identity(dim: usize) -> Self {
        SuperOperator {
            dim,
            matrix: identity(dim * dim),
            provenance: Provenance::Explicit,
        }
    }

    /// `X ↦ Σ_k A_k X A_k†`, i.e. `Σ_k conj(A_k) ⊗ A_k`.
    pub fn from_kraus(operators: &[ComplexMatrix]) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| QmsError::Validation("Kraus list is empty".into()))?;
        let dim = foundation::ensure_square(first, "from_kraus")?;
        let mut matrix = ComplexMatrix::zeros(dim * dim, dim * dim);
        for (k, a) in operators.iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(QmsError::Dimension(format!(
                    "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            matrix += kron(&a.conjugate(), a);
        }
        Self::with_provenance(dim, matrix, Provenance::Kraus)
    }

    /// Embeds a stochastic matrix as `X ↦ Σ_{ij} S_ij ⟨i|X|i⟩ |j⟩⟨j|`.
    ///
    /// Row `i` of `S` is the output distribution of basis state `i`, so rows
    /// must sum to one.
    pub fn from_stochastic(s: &DMatrix<f64>) -> Result<Self> {
        let d = s.nrows();
        if d == 0 || s.ncols() != d {
            return Err(QmsError::Dimension(format!(
                "stochastic matrix must be square, got {}x{}",
                s.nrows(),
                s.ncols()
            )));
        }
        for ((i, j), &v) in s.iter().enumerate().map(|(k, v)| ((k % d, k / d), v)) {
            if !v.is_finite() || v < 0.0 {
                return Err(QmsError::Validation(format!(
                    "stochastic entry ({i}, {j}) = {v} is not a nonnegative number"
                )));
            }
        }
        for i in 0..d {
            let sum: f64 = s.row(i).iter().sum();
            if (sum - 1.0).abs() > TOL_ALGEBRAIC {
                return Err(QmsError::Validation(format!(
                    "stochastic row {i} sums to {sum}, expected 1"
                )));
            }
        }
        let mut matrix = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                matrix[(j * (d + 1), i * (d + 1))] = C64::new(s[(i, j)], 0.0);
            }
        }
        Self::with_provenance(d, matrix, Provenance::StochasticEmbedding)
    }

    /// `X ↦ U X U†`
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(std::slice::from_ref(u))
    }

    /// `X ↦ (1−p) X + p tr[X] I/d`
    pub fn depolarizing(dim: usize, p: f64) -> Self {
        let n = dim * dim;
        let id = foundation::vec(&identity(dim)).expect("square");
        let matrix = identity(n).scale(1.0 - p) + (&id * id.adjoint()).scale(p / dim as f64);
        SuperOperator {
            dim,
            matrix,
            provenance: Provenance::Explicit,
        }
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Self {
        let k0 = ComplexMatrix::from_row_slice(
            2,
            2,
            &[ONE, ZERO, ZERO, C64::new((1.0 - gamma).sqrt(), 0.0)],
        );
        let k1 =
            ComplexMatrix::from_row_slice(2, 2, &[ZERO, C64::new(gamma.sqrt(), 0.0), ZERO, ZERO]);
        Self::from_kraus(&[k0, k1]).expect("valid Kraus pair")
    }

    /// `X ↦ Xᵀ`. Positive and trace-preserving but not completely positive.
    pub fn transpose_map(dim: usize) -> Self {
        let n = dim * dim;
        let mut matrix = ComplexMatrix::zeros(n, n);
        for i in 0..dim {
            for j in 0..dim {
                matrix[(j + i * dim, i + j * dim)] = ONE;
            }
        }
        SuperOperator {
            dim,
            matrix,
            provenance: Provenance::Explicit,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = foundation::vec(x).expect("square input");
        foundation::unvec(&(&self.matrix * v), self.dim).expect("matching dimension")
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.same_dim(other, "compose")?;
        Ok(SuperOperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
            provenance: Provenance::Composed,
        })
    }

    /// `n`-fold composition (`n = 0` gives the identity).
    pub fn power(&self, n: u32) -> SuperOperator {
        let mut acc = identity(self.dim * self.dim);
        let mut base = self.matrix.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        SuperOperator {
            dim: self.dim,
            matrix: acc,
            provenance: Provenance::Composed,
        }
    }

    /// Hilbert–Schmidt adjoint, the conjugate transpose of the matrix.
    ///
    /// For Hermiticity-preserving maps this is the dual defined by
    /// `tr[T*(A) B] = tr[A T(B)]`.
    pub fn dual(&self) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
            provenance: Provenance::Explicit,
        }
    }

    /// Unnormalized Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ T(|i⟩⟨j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                // T(|a⟩⟨b|) is column a + b·d of the superoperator.
                let col = self.matrix.column(a + b * d);
                for r in 0..d {
                    for c in 0..d {
                        j[(a * d + r, b * d + c)] = col[r + c * d];
                    }
                }
            }
        }
        j
    }

    /// max |tr[T(E_ij)] − δ_ij|
    pub fn trace_preservation_residual(&self) -> f64 {
        let id = foundation::vec(&identity(self.dim)).expect("square");
        max_abs(&(id.adjoint() * &self.matrix - id.adjoint()))
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preservation_residual() <= TOL_ALGEBRAIC
    }

    /// max entry of `J − J†`
    pub fn hermiticity_residual(&self) -> f64 {
        let j = self.choi();
        max_abs(&(&j - j.adjoint()))
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_residual() <= TOL_ALGEBRAIC
    }

    pub fn unitality_residual(&self) -> f64 {
        max_abs(&(self.apply(&identity(self.dim)) - identity(self.dim)))
    }

    pub fn scaled(&self, s: f64) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            matrix: self.matrix.scale(s),
            provenance: Provenance::Explicit,
        }
    }

    fn same_dim(&self, other: &SuperOperator, op: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(QmsError::Dimension(format!(
                "{op}: dimensions {} and {} differ",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// `self − other`, checked.
    pub fn difference(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.same_dim(other, "difference")?;
        Ok(SuperOperator {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
            provenance: Provenance::Explicit,
        })
    }

    /// `(1−w)·self + w·other`
    pub fn convex_mix(&self, other: &SuperOperator, w: f64) -> Result<SuperOperator> {
        self.same_dim(other, "convex_mix")?;
        Ok(SuperOperator {
            dim: self.dim,
            matrix: self.matrix.scale(1.0 - w) + other.matrix.scale(w),
            provenance: Provenance::Composed,
        })
    }
}

impl Sub for &SuperOperator {
    type Output = SuperOperator;

    /// Panics on mismatched dimensions; use [`SuperOperator::difference`] for a checked version.
    fn sub(self, rhs: &SuperOperator) -> SuperOperator {
        self.difference(rhs).expect("matching dimensions")
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;

    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        assert_eq!(self.dim, rhs.dim, "matching dimensions");
        SuperOperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
            provenance: Provenance::Explicit,
        }
    }
}

/// Positive semidefinite unit-trace `d×d` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRows", into = "MatrixRows")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const TOL: f64 = 1e-10;

    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        foundation::ensure_square(&matrix, "density matrix")?;
        foundation::ensure_finite(&matrix, "density matrix")?;
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > Self::TOL {
            return Err(QmsError::Validation(format!(
                "density matrix is not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > Self::TOL {
            return Err(QmsError::Validation(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let min = hermitian_eigenvalues(&foundation::hermitian_part(&matrix))?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -Self::TOL {
            return Err(QmsError::Validation(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Hermitizes, clips negative eigenvalues and renormalizes. For states
    /// that are correct up to roundoff.
    pub fn from_numerical(matrix: &ComplexMatrix) -> Result<Self> {
        let h = foundation::hermitian_part(matrix);
        let (vals, vecs) = foundation::hermitian_eigen(&h)?;
        let clipped: Vec<C64> = vals.iter().map(|&v| C64::new(v.max(0.0), 0.0)).collect();
        let total: f64 = clipped.iter().map(|z| z.re).sum();
        if total <= 0.0 {
            return Err(QmsError::numeric("density matrix", "no positive weight"));
        }
        let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(clipped));
        let m = (&vecs * diag * vecs.adjoint()).scale(1.0 / total);
        Ok(DensityMatrix {
            matrix: foundation::hermitian_part(&m),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            matrix: identity(d).scale(1.0 / d as f64),
        }
    }

    /// `|i⟩⟨i|`
    pub fn basis(d: usize, i: usize) -> Self {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = ONE;
        DensityMatrix { matrix: m }
    }

    /// `|ψ⟩⟨ψ|` for a nonzero column vector (normalized here).
    pub fn pure(psi: &ComplexMatrix) -> Self {
        let n = psi.norm();
        let v = psi / C64::new(n, 0.0);
        DensityMatrix {
            matrix: &v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("Hermitian by construction")
    }

    /// ‖self − other‖₁
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        foundation::trace_norm_unchecked(&(&self.matrix - &other.matrix))
    }
}

impl From<DensityMatrix> for MatrixRows {
    fn from(rho: DensityMatrix) -> Self {
        MatrixRows::from(&rho.matrix)
    }
}

impl TryFrom<MatrixRows> for DensityMatrix {
    type Error = QmsError;

    fn try_from(rows: MatrixRows) -> Result<Self> {
        let m = ComplexMatrix::try_from(rows).map_err(QmsError::Validation)?;
        DensityMatrix::new(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorProvenance {
    LindbladParts,
    Explicit,
}

/// Superoperator `𝔏` of a continuous-time semigroup `e^{t𝔏}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMap {
    dim: usize,
    matrix: ComplexMatrix,
    provenance: GeneratorProvenance,
}

impl GeneratorMap {
    /// Checks `tr[𝔏(X)] = 0` to 1e-10.
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let so = SuperOperator::from_matrix(dim, matrix)?;
        let id = foundation::vec(&identity(dim))?;
        let residual = max_abs(&(id.adjoint() * so.matrix()));
        if residual > TOL_ALGEBRAIC {
            return Err(QmsError::Validation(format!(
                "generator is not trace-annihilating (residual {residual:.3e})"
            )));
        }
        Ok(GeneratorMap {
            dim,
            matrix: so.matrix,
            provenance: GeneratorProvenance::Explicit,
        })
    }

    /// `𝔏(X) = −i[H, X] + Σ_k (L_k X L_k† − ½{L_k†L_k, X})`
    pub fn lindblad(hamiltonian: &ComplexMatrix, jumps: &[ComplexMatrix]) -> Result<Self> {
        let d = foundation::ensure_square(hamiltonian, "lindblad")?;
        let id = identity(d);
        let minus_i = C64::new(0.0, -1.0);
        // vec(HX) = (I ⊗ H) vec X, vec(XH) = (Hᵀ ⊗ I) vec X
        let mut m = (kron(&id, hamiltonian) - kron(&hamiltonian.transpose(), &id)) * minus_i;
        for (k, l) in jumps.iter().enumerate() {
            if l.nrows() != d || l.ncols() != d {
                return Err(QmsError::Dimension(format!(
                    "jump operator {k} is {}x{}, expected {d}x{d}",
                    l.nrows(),
                    l.ncols()
                )));
            }
            let ldl = l.adjoint() * l;
            m += kron(&l.conjugate(), l);
            m -= (kron(&id, &ldl) + kron(&ldl.transpose(), &id)).scale(0.5);
        }
        foundation::ensure_finite(&m, "lindblad")?;
        Ok(GeneratorMap {
            dim: d,
            matrix: m,
            provenance: GeneratorProvenance::LindbladParts,
        })
    }

    /// `𝔏(X) = γ (tr[X] I/d − X)`, whose semigroup is depolarizing with `p = 1 − e^{−γt}`.
    pub fn depolarizing(dim: usize, gamma: f64) -> Self {
        let dep = SuperOperator::depolarizing(dim, 1.0);
        GeneratorMap {
            dim,
            matrix: (dep.matrix - identity(dim * dim)).scale(gamma),
            provenance: GeneratorProvenance::Explicit,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> GeneratorProvenance {
        self.provenance
    }

    /// `e^{t𝔏}`
    pub fn exp(&self, t: f64) -> Result<SuperOperator> {
        let m = foundation::matrix_exp(&self.matrix, t)?;
        SuperOperator::with_provenance(self.dim, m, Provenance::ExponentialOfGenerator)
    }

    /// The generator as a plain linear map (for norm estimation).
    pub fn as_superoperator(&self) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            matrix: self.matrix.clone(),
            provenance: Provenance::Explicit,
        }
    }

    pub fn difference(&self, other: &GeneratorMap) -> Result<SuperOperator> {
        self.as_superoperator()
            .difference(&other.as_superoperator())
    }

    /// `(1−w)·self + w·other`
    pub fn convex_mix(&self, other: &GeneratorMap, w: f64) -> Result<GeneratorMap> {
        if self.dim != other.dim {
            return Err(QmsError::Dimension("generator dimensions differ".into()));
        }
        Ok(GeneratorMap {
            dim: self.dim,
            matrix: self.matrix.scale(1.0 - w) + other.matrix.scale(w),
            provenance: GeneratorProvenance::Explicit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub ok: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpCheck {
    pub ok: bool,
    pub min_choi_eigenvalue: f64,
}

/// Result of sampling pure inputs for a negative output eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum PositivitySample {
    NoCounterexample {
        n_samples: usize,
    },
    Counterexample {
        /// Witness state as `[re, im]` amplitudes.
        witness: Vec<[f64; 2]>,
        min_output_eigenvalue: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub trace_preserving: ResidualCheck,
    pub hermiticity_preserving: ResidualCheck,
    pub completely_positive: CpCheck,
    pub unital: ResidualCheck,
    pub positivity_sampled: PositivitySample,
}

impl ValidationReport {
    /// TP, Hermiticity preserving, and no positivity counterexample found.
    pub fn is_positive_tp(&self) -> bool {
        self.trace_preserving.ok
            && self.hermiticity_preserving.ok
            && matches!(
                self.positivity_sampled,
                PositivitySample::NoCounterexample { .. }
            )
    }
}

/// Algebraic checks plus sampled positivity on `n_samples` Haar-random pure states.
pub fn validate(t: &SuperOperator, n_samples: usize, seed: u64) -> Result<ValidationReport> {
    if n_samples == 0 {
        return Err(QmsError::Validation("n_samples must be ≥ 1".into()));
    }
    let d = t.dim();
    let tp = t.trace_preservation_residual();
    let herm = t.hermiticity_residual();
    let unital = t.unitality_residual();
    let choi = foundation::hermitian_part(&t.choi());
    let min_choi = hermitian_eigenvalues(&choi)?
        .first()
        .copied()
        .unwrap_or(0.0);

    let mut rng = Prng::new(seed);
    let mut positivity = PositivitySample::NoCounterexample { n_samples };
    for _ in 0..n_samples {
        let psi = rng.unit_vector(d);
        let out = t.apply(&(&psi * psi.adjoint()));
        let herm_out = max_abs(&(&out - out.adjoint()));
        let min_eig = hermitian_eigenvalues(&foundation::hermitian_part(&out))?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -TOL_WITNESS || herm_out > TOL_WITNESS {
            positivity = PositivitySample::Counterexample {
                witness: psi.iter().map(|z| [z.re, z.im]).collect(),
                min_output_eigenvalue: min_eig,
            };
            break;
        }
    }

    Ok(ValidationReport {
        trace_preserving: ResidualCheck {
            ok: tp <= TOL_ALGEBRAIC,
            residual: tp,
        },
        hermiticity_preserving: ResidualCheck {
            ok: herm <= TOL_ALGEBRAIC,
            residual: herm,
        },
        completely_positive: CpCheck {
            ok: min_choi >= -TOL_ALGEBRAIC,
            min_choi_eigenvalue: min_choi,
        },
        unital: ResidualCheck {
            ok: unital <= TOL_ALGEBRAIC,
            residual: unital,
        },
        positivity_sampled: positivity,
    })
}

/// Pauli matrices `[X, Y, Z]`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::eigenvalues;
    use approx::assert_relative_eq;

    fn sorted_re(v: &[C64]) -> Vec<f64> {
        let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
        r.sort_by(|a, b| b.total_cmp(a));
        r
    }

    fn depol_kraus(p: f64) -> Vec<ComplexMatrix> {
        let [x, y, z] = paulis();
        let a = (p / 4.0).sqrt();
        vec![
            identity(2).scale((1.0 - 3.0 * p / 4.0).sqrt()),
            x.scale(a),
            y.scale(a),
            z.scale(a),
        ]
    }

    #[test]
    fn identity_kraus_is_identity() {
        let t = SuperOperator::from_kraus(&[identity(3)]).unwrap();
        assert_eq!(t.matrix(), &identity(9));
        assert_eq!(t.provenance(), Provenance::Kraus);
    }

    #[test]
    fn pauli_kraus_is_depolarizing() {
        let p = 0.3;
        let t = SuperOperator::from_kraus(&depol_kraus(p)).unwrap();
        let closed = SuperOperator::depolarizing(2, p);
        assert!(max_abs(&(t.matrix() - closed.matrix())) < 1e-14);
        let ev = sorted_re(&eigenvalues(t.matrix()).unwrap());
        for (got, want) in ev.iter().zip([1.0, 1.0 - p, 1.0 - p, 1.0 - p]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn damping_limit_sends_everything_to_ground() {
        let k0 = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let k1 = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let t = SuperOperator::from_kraus(&[k0, k1]).unwrap();
        let rho = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.3, 0.),
                C64::new(0.1, 0.2),
                C64::new(0.1, -0.2),
                C64::new(0.7, 0.),
            ],
        );
        let out = t.apply(&rho);
        assert!(max_abs(&(out - DensityMatrix::basis(2, 0).matrix())) < 1e-15);
    }

    #[test]
    fn kraus_rejects_mixed_dimensions() {
        let err = SuperOperator::from_kraus(&[identity(2), identity(3)]).unwrap_err();
        assert!(matches!(err, QmsError::Dimension(_)));
        assert!(SuperOperator::from_kraus(&[]).is_err());
    }

    #[test]
    fn stochastic_embedding() {
        let t = SuperOperator::from_stochastic(&DMatrix::identity(3, 3)).unwrap();
        for i in 0..3 {
            let e = DensityMatrix::basis(3, i);
            assert_eq!(&t.apply(e.matrix()), e.matrix());
        }
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let t = SuperOperator::from_stochastic(&swap).unwrap();
        assert_eq!(
            &t.apply(DensityMatrix::basis(2, 0).matrix()),
            DensityMatrix::basis(2, 1).matrix()
        );
        let ev = eigenvalues(t.matrix()).unwrap();
        assert!(ev.iter().any(|z| (z + ONE).norm() < 1e-12));
        assert!(t.is_trace_preserving());
        // coherences are discarded
        let mut coh = ComplexMatrix::zeros(2, 2);
        coh[(0, 1)] = ONE;
        assert_eq!(t.apply(&coh), ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn stochastic_uses_row_index_as_input() {
        let s = DMatrix::from_row_slice(2, 2, &[0.25, 0.75, 1.0, 0.0]);
        let t = SuperOperator::from_stochastic(&s).unwrap();
        let out = t.apply(DensityMatrix::basis(2, 0).matrix());
        assert_relative_eq!(out[(0, 0)].re, 0.25);
        assert_relative_eq!(out[(1, 1)].re, 0.75);
    }

    #[test]
    fn stochastic_rejects_bad_input() {
        let neg = DMatrix::from_row_slice(2, 2, &[1.5, -0.5, 0.0, 1.0]);
        assert!(matches!(
            SuperOperator::from_stochastic(&neg),
            Err(QmsError::Validation(_))
        ));
        let bad_sum = DMatrix::from_row_slice(2, 2, &[0.5, 0.4, 0.0, 1.0]);
        assert!(SuperOperator::from_stochastic(&bad_sum).is_err());
    }

    #[test]
    fn averaging_stochastic_map_is_complete_depolarization() {
        let s = DMatrix::from_element(2, 2, 0.5);
        let t = SuperOperator::from_stochastic(&s).unwrap();
        // Identical to complete depolarization: tr[X]·I/2 on diagonals, coherences dropped.
        assert!(max_abs(&(t.matrix() - SuperOperator::depolarizing(2, 1.0).matrix())) < 1e-15);
        let rho = DensityMatrix::basis(2, 1);
        assert!(max_abs(&(t.apply(rho.matrix()) - identity(2).scale(0.5))) < 1e-15);
    }

    #[test]
    fn dual_is_involution_and_preserves_identity() {
        let t = SuperOperator::amplitude_damping(0.3);
        assert_eq!(t.dual().dual().matrix(), t.matrix());
        assert!(max_abs(&(t.dual().apply(&identity(2)) - identity(2))) < 1e-12);
        assert_eq!(
            SuperOperator::identity(2).dual(),
            SuperOperator::identity(2)
        );
    }

    #[test]
    fn dual_defining_property() {
        let t = SuperOperator::amplitude_damping(0.4)
            .compose(&SuperOperator::depolarizing(2, 0.2))
            .unwrap();
        let mut rng = Prng::new(5);
        for _ in 0..100 {
            let a = rng.gaussian_matrix(2, 2);
            let b = rng.gaussian_matrix(2, 2);
            let lhs = trace(&(t.dual().apply(&a) * &b));
            let rhs = trace(&(&a * t.apply(&b)));
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn choi_examples() {
        let j = SuperOperator::identity(2).choi();
        let omega = ComplexMatrix::from_fn(4, 1, |k, _| if k == 0 || k == 3 { ONE } else { ZERO });
        assert_eq!(j, &omega * omega.adjoint());

        let j = SuperOperator::depolarizing(3, 1.0).choi();
        assert!(max_abs(&(j.clone() - identity(9).scale(1.0 / 3.0))) < 1e-14);
        assert_relative_eq!(trace(&j).re, 3.0, epsilon = 1e-13);

        let j = SuperOperator::transpose_map(2).choi();
        let ev = hermitian_eigenvalues(&j).unwrap();
        assert_relative_eq!(ev[0], -1.0, epsilon = 1e-13);
        assert_relative_eq!(ev[3], 1.0, epsilon = 1e-13);
    }

    #[test]
    fn validate_depolarizing() {
        let r = validate(&SuperOperator::depolarizing(2, 0.5), 200, 1).unwrap();
        assert!(r.trace_preserving.ok && r.hermiticity_preserving.ok && r.unital.ok);
        assert!(r.completely_positive.ok);
        // J = (1−p)|Ω⟩⟨Ω| + (p/d) I has minimum eigenvalue p/d.
        assert_relative_eq!(
            r.completely_positive.min_choi_eigenvalue,
            0.25,
            epsilon = 1e-12
        );
        assert!(r.is_positive_tp());
    }

    #[test]
    fn validate_transpose_is_positive_not_cp() {
        let r = validate(&SuperOperator::transpose_map(2), 500, 9).unwrap();
        assert!(r.trace_preserving.ok);
        assert!(!r.completely_positive.ok);
        assert_relative_eq!(
            r.completely_positive.min_choi_eigenvalue,
            -1.0,
            epsilon = 1e-12
        );
        assert_eq!(
            r.positivity_sampled,
            PositivitySample::NoCounterexample { n_samples: 500 }
        );
    }

    #[test]
    fn validate_flags_non_tp_map() {
        // X ↦ X − tr[X] I/d
        let t = &SuperOperator::identity(2) - &SuperOperator::depolarizing(2, 1.0);
        let r = validate(&t, 10, 0).unwrap();
        assert!(!r.trace_preserving.ok);
        assert!(r.trace_preserving.residual > 0.5);
        assert!(matches!(
            r.positivity_sampled,
            PositivitySample::Counterexample { .. }
        ));
    }

    #[test]
    fn validate_is_deterministic() {
        let t = SuperOperator::amplitude_damping(0.2);
        assert_eq!(validate(&t, 50, 3).unwrap(), validate(&t, 50, 3).unwrap());
        assert!(validate(&t, 0, 3).is_err());
    }

    #[test]
    fn depolarizing_generator_matches_closed_form() {
        let l = GeneratorMap::depolarizing(2, 1.0);
        let t = l.exp(1.0).unwrap();
        let want = SuperOperator::depolarizing(2, 1.0 - (-1.0f64).exp());
        assert!(max_abs(&(t.matrix() - want.matrix())) < 1e-13);
    }

    #[test]
    fn lindblad_is_trace_annihilating() {
        let mut rng = Prng::new(11);
        let h = foundation::hermitian_part(&rng.gaussian_matrix(3, 3));
        let jumps = vec![rng.gaussian_matrix(3, 3), rng.gaussian_matrix(3, 3)];
        let l = GeneratorMap::lindblad(&h, &jumps).unwrap();
        assert!(GeneratorMap::from_matrix(3, l.matrix().clone()).is_ok());
        let t = l.exp(0.7).unwrap();
        assert!(t.trace_preservation_residual() < 1e-12);
    }

    #[test]
    fn generator_rejects_non_trace_annihilating() {
        assert!(GeneratorMap::from_matrix(2, identity(4)).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(identity(2)).is_err());
        assert!(DensityMatrix::new(identity(2).scale(0.5)).is_ok());
        let neg = ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.5, 0.), ZERO, ZERO, C64::new(-0.5, 0.)],
        );
        assert!(DensityMatrix::new(neg).is_err());
        let mut nh = identity(2).scale(0.5);
        nh[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(nh).is_err());
    }
}
