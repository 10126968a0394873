//! Trace-norm contraction coefficient `τ(L)` and induced 1→1 norms.
//!
//! Every optimizer here returns a lower bound on the supremum. For qubits a
//! dense Bloch-sphere grid with a Lipschitz error term serves as the oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{paulis, SuperOperator};
use crate::error::{QmsError, Result};
use crate::foundation::{self, spectral_norm, trace_norm_unchecked, ComplexMatrix, C64};
use crate::rng::{derive_seed, Prng};

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_QUBIT_GRID: usize = 20_000;
/// Optimizer tolerance used by the inequality checks.
pub const TOL_OPT: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;
const REL_IMPROVEMENT_STOP: f64 = 1e-10;
const MAX_ITERATIONS: usize = 400;
const REFINE_STARTS: usize = 8;
const TOL_HERMITICITY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    QubitGrid,
    MultistartManifold,
    Analytic,
}

/// Which characterization of `τ` to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `½ sup_{φ⊥ψ} ‖L(φφ† − ψψ†)‖₁`; requires a Hermiticity-preserving map.
    #[default]
    OrthogonalPureStates,
    /// `sup ‖L(X)‖₁/‖X‖₁` over nonzero traceless Hermitian `X`.
    TracelessHermitian,
}

/// Point at which the best objective value was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    OrthonormalPair {
        phi: Vec<[f64; 2]>,
        psi: Vec<[f64; 2]>,
    },
    UnitPair {
        u: Vec<[f64; 2]>,
        v: Vec<[f64; 2]>,
    },
    UnitVector {
        psi: Vec<[f64; 2]>,
    },
    /// Row-major entries.
    TracelessHermitian {
        matrix: Vec<Vec<[f64; 2]>>,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    pub value: f64,
    pub method: Method,
    pub restarts: usize,
    pub best_witness: Witness,
    /// Max minus min over the optima of restarts that converged.
    pub convergence_spread: f64,
    /// Grid-resolution bound on `sup − value` (qubit grid only).
    pub error_bound: Option<f64>,
}

impl ContractionEstimate {
    fn exact(value: f64) -> Self {
        ContractionEstimate {
            value,
            method: Method::Analytic,
            restarts: 0,
            best_witness: Witness::None,
            convergence_spread: 0.0,
            error_bound: Some(0.0),
        }
    }
}

fn to_pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// `L(X)` using the column-major layout of `X` as its column-stacked vector.
fn apply(l: &ComplexMatrix, d: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let v = ComplexMatrix::from_column_slice(d * d, 1, x.as_slice());
    let out = l * v;
    ComplexMatrix::from_column_slice(d, d, out.as_slice())
}

fn outer(a: &[C64], b: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

fn params_to_vec(x: &[f64]) -> Vec<C64> {
    x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect()
}

fn normalized(v: &[C64]) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

/// Gram–Schmidt on `(u, v)`.
fn orthonormal_pair(u: &[C64], v: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let phi = normalized(u);
    let overlap: C64 = phi.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    let rest: Vec<C64> = v.iter().zip(&phi).map(|(b, a)| b - a * overlap).collect();
    (phi, normalized(&rest))
}

/// Orthonormal basis of the traceless Hermitian matrices (generalized Gell-Mann).
pub fn traceless_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            basis.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = C64::new(0.0, -s);
            anti[(k, j)] = C64::new(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            diag[(i, i)] = C64::new(norm, 0.0);
        }
        diag[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        basis.push(diag);
    }
    basis
}

struct Ascent {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

/// Gradient ascent of a scale-invariant objective with central differences,
/// renormalizing blocks of the parameter vector after each step and halving
/// the step on failure.
fn ascend(f: &dyn Fn(&[f64]) -> f64, blocks: usize, mut x: Vec<f64>) -> Ascent {
    let renormalize = |x: &mut [f64]| {
        let len = x.len() / blocks;
        for b in x.chunks_mut(len) {
            let n = b.iter().map(|t| t * t).sum::<f64>().sqrt();
            if n > 0.0 {
                b.iter_mut().for_each(|t| *t /= n);
            }
        }
    };
    renormalize(&mut x);
    let mut fx = f(&x);
    let mut step = 0.25;
    let mut grad = vec![0.0; x.len()];
    let mut probe = x.clone();
    for _ in 0..MAX_ITERATIONS {
        for i in 0..x.len() {
            probe.copy_from_slice(&x);
            probe[i] = x[i] + FD_STEP;
            let up = f(&probe);
            probe[i] = x[i] - FD_STEP;
            let down = f(&probe);
            grad[i] = (up - down) / (2.0 * FD_STEP);
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            return Ascent {
                x,
                value: fx,
                converged: true,
            };
        }
        loop {
            for i in 0..x.len() {
                probe[i] = x[i] + step * grad[i] / gnorm;
            }
            renormalize(&mut probe);
            let fp = f(&probe);
            if fp > fx {
                let gain = (fp - fx) / fx.abs().max(f64::MIN_POSITIVE);
                x.copy_from_slice(&probe);
                fx = fp;
                if gain < REL_IMPROVEMENT_STOP {
                    return Ascent {
                        x,
                        value: fx,
                        converged: true,
                    };
                }
                step = (step * 1.5).min(1.0);
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                return Ascent {
                    x,
                    value: fx,
                    converged: true,
                };
            }
        }
    }
    Ascent {
        x,
        value: fx,
        converged: false,
    }
}

/// Runs `restarts` ascents from seeded random starts in parallel and reduces
/// by index order so the result does not depend on scheduling.
fn multistart(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    n_params: usize,
    blocks: usize,
    restarts: usize,
    seed: u64,
) -> (Ascent, f64) {
    let runs: Vec<Ascent> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = Prng::new(derive_seed(seed, r as u64));
            let x0: Vec<f64> = (0..n_params).map(|_| rng.gaussian()).collect();
            ascend(f, blocks, x0)
        })
        .collect();
    let (lo, hi) = runs
        .iter()
        .filter(|a| a.converged)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            (lo.min(a.value), hi.max(a.value))
        });
    let spread = if hi >= lo { hi - lo } else { 0.0 };
    let mut best: Option<Ascent> = None;
    for a in runs {
        if best.as_ref().is_none_or(|b| a.value > b.value) {
            best = Some(a);
        }
    }
    (best.expect("at least one restart"), spread)
}

fn pure_difference(phi: &[C64], psi: &[C64]) -> ComplexMatrix {
    outer(phi, phi) - outer(psi, psi)
}

fn require_hermiticity_preserving(l: &SuperOperator) -> Result<()> {
    let r = l.hermiticity_residual();
    if r > TOL_HERMITICITY {
        return Err(QmsError::Domain(format!(
            "map is not Hermiticity-preserving (residual {r:.3e}); use the traceless-Hermitian formulation"
        )));
    }
    Ok(())
}

/// `τ(L)` with the default formulation: grid oracle for qubits, multistart otherwise.
pub fn tau(l: &SuperOperator, restarts: usize, seed: u64) -> Result<ContractionEstimate> {
    tau_with(l, restarts, seed, Formulation::OrthogonalPureStates)
}

pub fn tau_with(
    l: &SuperOperator,
    restarts: usize,
    seed: u64,
    formulation: Formulation,
) -> Result<ContractionEstimate> {
    if formulation == Formulation::OrthogonalPureStates {
        require_hermiticity_preserving(l)?;
    }
    if l.dim() == 1 {
        return Ok(ContractionEstimate::exact(0.0));
    }
    if l.dim() == 2 {
        return tau_exact_qubit(l, DEFAULT_QUBIT_GRID);
    }
    match formulation {
        Formulation::OrthogonalPureStates => tau_orthogonal_states(l, restarts, seed),
        Formulation::TracelessHermitian => tau_traceless_hermitian(l, restarts, seed),
    }
}

/// Multistart over orthonormal pairs `(φ, ψ)`, any dimension.
pub fn tau_orthogonal_states(
    l: &SuperOperator,
    restarts: usize,
    seed: u64,
) -> Result<ContractionEstimate> {
    require_hermiticity_preserving(l)?;
    let d = l.dim();
    if d < 2 {
        return Ok(ContractionEstimate::exact(0.0));
    }
    let m = l.matrix();
    let eval = |phi: &[C64], psi: &[C64]| {
        0.5 * trace_norm_unchecked(&apply(m, d, &pure_difference(phi, psi)))
    };
    let f = |x: &[f64]| {
        let (phi, psi) = orthonormal_pair(&params_to_vec(&x[..2 * d]), &params_to_vec(&x[2 * d..]));
        eval(&phi, &psi)
    };
    let (best, spread) = multistart(&f, 4 * d, 2, restarts, seed);
    let (phi, psi) = orthonormal_pair(
        &params_to_vec(&best.x[..2 * d]),
        &params_to_vec(&best.x[2 * d..]),
    );
    Ok(ContractionEstimate {
        value: eval(&phi, &psi),
        method: Method::MultistartManifold,
        restarts,
        best_witness: Witness::OrthonormalPair {
            phi: to_pairs(&phi),
            psi: to_pairs(&psi),
        },
        convergence_spread: spread,
        error_bound: None,
    })
}

fn ratio(m: &ComplexMatrix, d: usize, x: &ComplexMatrix) -> f64 {
    let den = trace_norm_unchecked(x);
    if den == 0.0 {
        return 0.0;
    }
    trace_norm_unchecked(&apply(m, d, x)) / den
}

/// Multistart over traceless Hermitian `X` of `‖L(X)‖₁/‖X‖₁`; valid for any map.
pub fn tau_traceless_hermitian(
    l: &SuperOperator,
    restarts: usize,
    seed: u64,
) -> Result<ContractionEstimate> {
    let d = l.dim();
    if d < 2 {
        return Ok(ContractionEstimate::exact(0.0));
    }
    let basis = traceless_hermitian_basis(d);
    let m = l.matrix();
    let assemble = |x: &[f64]| {
        basis
            .iter()
            .zip(x)
            .fold(ComplexMatrix::zeros(d, d), |acc, (g, c)| acc + g.scale(*c))
    };
    let f = |x: &[f64]| ratio(m, d, &assemble(x));
    let (best, spread) = multistart(&f, basis.len(), 1, restarts, seed);
    let x = assemble(&best.x);
    Ok(ContractionEstimate {
        value: ratio(m, d, &x),
        method: Method::MultistartManifold,
        restarts,
        best_witness: Witness::TracelessHermitian {
            matrix: matrix_to_rows(&x),
        },
        convergence_spread: spread,
        error_bound: None,
    })
}

/// `n` points spread evenly over the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden * i as f64;
            [r * theta.cos(), r * theta.sin(), z]
        })
        .collect()
}

fn bloch_matrix(n: &[f64]) -> ComplexMatrix {
    let [x, y, z] = paulis();
    x.scale(n[0]) + y.scale(n[1]) + z.scale(n[2])
}

/// Dense-grid evaluation of `½‖L(n·σ)‖₁` over unit Bloch vectors, then local
/// refinement from the best grid points.
pub fn tau_exact_qubit(l: &SuperOperator, grid: usize) -> Result<ContractionEstimate> {
    if l.dim() != 2 {
        return Err(QmsError::Dimension(format!(
            "tau_exact_qubit needs d = 2, got d = {}",
            l.dim()
        )));
    }
    let grid = grid.max(1);
    let m = l.matrix();
    let images: Vec<ComplexMatrix> = paulis().iter().map(|p| apply(m, 2, p)).collect();
    let objective = |n: &[f64]| {
        let out = images[0].scale(n[0]) + images[1].scale(n[1]) + images[2].scale(n[2]);
        0.5 * trace_norm_unchecked(&out)
    };
    let points = fibonacci_sphere(grid);
    let values: Vec<f64> = points.iter().map(|p| objective(p)).collect();

    let mut order: Vec<usize> = (0..grid).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let refined: Vec<Ascent> = order
        .iter()
        .take(REFINE_STARTS)
        .map(|&i| ascend(&objective, 1, points[i].to_vec()))
        .collect();
    let mut best_n = points[order[0]].to_vec();
    let mut best = values[order[0]];
    for a in &refined {
        if a.value > best {
            best = a.value;
            best_n = a.x.clone();
        }
    }
    let spacing = (4.0 * std::f64::consts::PI / grid as f64).sqrt();
    let lipschitz = 2.0 * spectral_norm(m);
    let (lo, hi) = refined
        .iter()
        .filter(|a| a.converged)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            (lo.min(a.value), hi.max(a.value))
        });
    let witness = bloch_matrix(&best_n);
    Ok(ContractionEstimate {
        value: objective(&best_n),
        method: Method::QubitGrid,
        restarts: grid,
        best_witness: Witness::TracelessHermitian {
            matrix: matrix_to_rows(&witness),
        },
        convergence_spread: if hi >= lo { hi - lo } else { 0.0 },
        error_bound: Some(lipschitz * spacing),
    })
}

/// Closed form for trace-preserving Hermiticity-preserving qubit maps: the
/// largest singular value of the real 3×3 Bloch block `A_ij = ½ tr[σ_i L(σ_j)]`.
pub fn tau_bloch(l: &SuperOperator) -> Result<ContractionEstimate> {
    if l.dim() != 2 {
        return Err(QmsError::Dimension(format!(
            "tau_bloch needs d = 2, got d = {}",
            l.dim()
        )));
    }
    require_hermiticity_preserving(l)?;
    if !l.is_trace_preserving() {
        return Err(QmsError::Domain(
            "tau_bloch needs a trace-preserving map".into(),
        ));
    }
    let p = paulis();
    let a = ComplexMatrix::from_fn(3, 3, |i, j| {
        C64::new(
            0.5 * foundation::trace(&(&p[i] * apply(l.matrix(), 2, &p[j]))).re,
            0.0,
        )
    });
    Ok(ContractionEstimate::exact(spectral_norm(&a)))
}

/// Induced trace norm `sup ‖L(X)‖₁/‖X‖₁`, estimated over rank-one `X`.
///
/// General mode optimizes `‖L(u v†)‖₁` over unit `u, v`; `hermitian_only`
/// optimizes `‖L(ψψ†)‖₁` over unit `ψ`, which is the norm restricted to
/// Hermitian inputs.
pub fn norm_1to1(
    l: &SuperOperator,
    restarts: usize,
    seed: u64,
    hermitian_only: bool,
) -> Result<ContractionEstimate> {
    let d = l.dim();
    let m = l.matrix();
    if foundation::max_abs(m) == 0.0 {
        return Ok(ContractionEstimate::exact(0.0));
    }
    if hermitian_only {
        let eval = |psi: &[C64]| trace_norm_unchecked(&apply(m, d, &outer(psi, psi)));
        let f = |x: &[f64]| eval(&normalized(&params_to_vec(x)));
        let (best, spread) = multistart(&f, 2 * d, 1, restarts, seed);
        let psi = normalized(&params_to_vec(&best.x));
        Ok(ContractionEstimate {
            value: eval(&psi),
            method: Method::MultistartManifold,
            restarts,
            best_witness: Witness::UnitVector {
                psi: to_pairs(&psi),
            },
            convergence_spread: spread,
            error_bound: None,
        })
    } else {
        let eval = |u: &[C64], v: &[C64]| trace_norm_unchecked(&apply(m, d, &outer(u, v)));
        let split = |x: &[f64]| {
            (
                normalized(&params_to_vec(&x[..2 * d])),
                normalized(&params_to_vec(&x[2 * d..])),
            )
        };
        let f = |x: &[f64]| {
            let (u, v) = split(x);
            eval(&u, &v)
        };
        let (best, spread) = multistart(&f, 4 * d, 2, restarts, seed);
        let (u, v) = split(&best.x);
        Ok(ContractionEstimate {
            value: eval(&u, &v),
            method: Method::MultistartManifold,
            restarts,
            best_witness: Witness::UnitPair {
                u: to_pairs(&u),
                v: to_pairs(&v),
            },
            convergence_spread: spread,
            error_bound: None,
        })
    }
}

/// Objective value of `estimate`'s witness under `l`, matching the
/// estimator that produced it.
pub fn evaluate_witness(l: &SuperOperator, estimate: &ContractionEstimate) -> Option<f64> {
    let d = l.dim();
    let m = l.matrix();
    match &estimate.best_witness {
        Witness::OrthonormalPair { phi, psi } => Some(
            0.5 * trace_norm_unchecked(&apply(
                m,
                d,
                &pure_difference(&from_pairs(phi), &from_pairs(psi)),
            )),
        ),
        Witness::UnitPair { u, v } => Some(trace_norm_unchecked(&apply(
            m,
            d,
            &outer(&from_pairs(u), &from_pairs(v)),
        ))),
        Witness::UnitVector { psi } => {
            let psi = from_pairs(psi);
            Some(trace_norm_unchecked(&apply(m, d, &outer(&psi, &psi))))
        }
        Witness::TracelessHermitian { matrix } => {
            let x = ComplexMatrix::from_fn(d, d, |i, j| C64::new(matrix[i][j][0], matrix[i][j][1]));
            Some(ratio(m, d, &x))
        }
        Witness::None => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCheck {
    pub n: u32,
    pub tau_of_power: f64,
    pub tau_to_power: f64,
    pub holds: bool,
}

/// Tabulates `τ(Lⁿ)` against `τ(L)ⁿ` for `n = 1..=n_max`.
pub fn tau_of_powers_check(l: &SuperOperator, n_max: u32) -> Result<Vec<PowerCheck>> {
    let base = tau(l, DEFAULT_RESTARTS, 0)?.value;
    (1..=n_max)
        .map(|n| {
            let tn = tau(&l.power(n), DEFAULT_RESTARTS, n as u64)?.value;
            let rhs = base.powi(n as i32);
            Ok(PowerCheck {
                n,
                tau_of_power: tn,
                tau_to_power: rhs,
                holds: tn <= rhs + TOL_OPT,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SuperOperator;
    use approx::assert_abs_diff_eq;

    fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
        let g = Prng::new(seed).gaussian_matrix(d, d);
        g.qr().q()
    }

    #[test]
    fn gell_mann_basis_is_orthonormal_and_traceless() {
        for d in 2..=4 {
            let b = traceless_hermitian_basis(d);
            assert_eq!(b.len(), d * d - 1);
            for (i, x) in b.iter().enumerate() {
                assert!(foundation::trace(x).norm() < 1e-14);
                for (j, y) in b.iter().enumerate() {
                    let ip = foundation::trace(&(x.adjoint() * y));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(ip.re, want, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn qubit_grid_examples() {
        let est = tau_exact_qubit(&SuperOperator::identity(2), DEFAULT_QUBIT_GRID).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
        let est =
            tau_exact_qubit(&SuperOperator::depolarizing(2, 0.25), DEFAULT_QUBIT_GRID).unwrap();
        assert_abs_diff_eq!(est.value, 0.75, epsilon = 1e-6);
        assert!(est.error_bound.unwrap() > 0.0);
        assert!(tau_exact_qubit(&SuperOperator::identity(3), 100).is_err());
    }

    #[test]
    fn averaging_stochastic_map_contracts_fully() {
        let s = nalgebra::DMatrix::from_element(2, 2, 0.5);
        let t = SuperOperator::from_stochastic(&s).unwrap();
        let grid = tau_exact_qubit(&t, DEFAULT_QUBIT_GRID).unwrap();
        assert_abs_diff_eq!(grid.value, 0.0, epsilon = 1e-12);
        let ms = tau_orthogonal_states(&t, 128, 5).unwrap();
        assert_abs_diff_eq!(ms.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_matches_bloch_closed_form() {
        let t = SuperOperator::amplitude_damping(0.3)
            .compose(&SuperOperator::unitary(&random_unitary(2, 9)).unwrap())
            .unwrap();
        let grid = tau_exact_qubit(&t, DEFAULT_QUBIT_GRID).unwrap();
        let exact = tau_bloch(&t).unwrap();
        assert_abs_diff_eq!(grid.value, exact.value, epsilon = 1e-8);
    }

    #[test]
    fn unitary_and_depolarizing_in_higher_dimension() {
        let u = SuperOperator::unitary(&random_unitary(3, 1)).unwrap();
        assert_abs_diff_eq!(tau(&u, 8, 0).unwrap().value, 1.0, epsilon = 1e-8);
        let dep = SuperOperator::depolarizing(3, 1.0);
        assert_abs_diff_eq!(tau(&dep, 8, 0).unwrap().value, 0.0, epsilon = 1e-10);
        let dep = SuperOperator::depolarizing(3, 0.4);
        assert_abs_diff_eq!(tau(&dep, 16, 0).unwrap().value, 0.6, epsilon = 1e-8);
    }

    #[test]
    fn non_hermiticity_preserving_map_needs_flag() {
        let mut m = SuperOperator::identity(3).matrix().clone();
        m[(1, 0)] = C64::new(0.0, 0.3);
        let l = SuperOperator::from_matrix(3, m).unwrap();
        assert!(matches!(tau(&l, 4, 0), Err(QmsError::Domain(_))));
        let est = tau_with(&l, 8, 0, Formulation::TracelessHermitian).unwrap();
        assert!(est.value > 0.0);
    }

    #[test]
    fn norm_examples() {
        let dep = SuperOperator::depolarizing(2, 0.5);
        for herm in [false, true] {
            let n = norm_1to1(&dep, 16, 3, herm).unwrap();
            assert_abs_diff_eq!(n.value, 1.0, epsilon = 1e-8);
            let diff = &SuperOperator::depolarizing(2, 0.4) - &SuperOperator::identity(2);
            assert_abs_diff_eq!(
                norm_1to1(&diff, 16, 3, herm).unwrap().value,
                0.4,
                epsilon = 1e-8
            );
            let diff = &SuperOperator::depolarizing(2, 0.6) - &SuperOperator::depolarizing(2, 0.5);
            assert_abs_diff_eq!(
                norm_1to1(&diff, 16, 3, herm).unwrap().value,
                0.1,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn witnesses_reproduce_values() {
        let t = SuperOperator::amplitude_damping(0.4);
        let ests = [
            tau_exact_qubit(&t, 2000).unwrap(),
            tau_orthogonal_states(&t, 8, 1).unwrap(),
            tau_traceless_hermitian(&t, 8, 1).unwrap(),
            norm_1to1(&t, 8, 1, false).unwrap(),
            norm_1to1(&t, 8, 1, true).unwrap(),
        ];
        for e in &ests {
            assert_abs_diff_eq!(evaluate_witness(&t, e).unwrap(), e.value, epsilon = 1e-9);
        }
    }

    #[test]
    fn multistart_is_schedule_independent() {
        let u = SuperOperator::amplitude_damping(0.2)
            .compose(&SuperOperator::depolarizing(2, 0.1))
            .unwrap();
        let a = norm_1to1(&u, 32, 11, false).unwrap();
        let b = norm_1to1(&u, 32, 11, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn powers_of_depolarizing() {
        let rows = tau_of_powers_check(&SuperOperator::depolarizing(2, 0.5), 3).unwrap();
        assert_abs_diff_eq!(rows[2].tau_of_power, 0.125, epsilon = 1e-8);
        assert_abs_diff_eq!(rows[2].tau_to_power, 0.125, epsilon = 1e-8);
        assert!(rows.iter().all(|r| r.holds));
    }
}
